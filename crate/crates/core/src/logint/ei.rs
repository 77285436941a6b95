//! The principal-branch exponential integral Ei(z) for complex z.
//!
//! Three evaluation routes cover the plane:
//!
//! * the power series `γ + ln z + Σ z^k/(k·k!)`, summed in double-double
//!   arithmetic, inside the series disc (radius `series_radius` in the right
//!   half-plane, [`LEFT_RADIUS`] in the left half-plane, where the series
//!   cancels exponentially);
//! * the asymptotic series `e^z/z · Σ k!/z^k` beyond the disc in the sector
//!   `|Im z| <= Re z`;
//! * the continued fraction for E1, through `Ei(z) = −E1(−z) + iπ·sgn(Im z)`,
//!   everywhere else.

use num_complex::Complex64;
use serde::Serialize;

use super::dd::CDd;
use crate::error::{invalid, LabError, Result};

/// A complex argument or value of Ei.
pub type ComplexValue = Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Radius of the series disc in the left half-plane.
pub const LEFT_RADIUS: f64 = 4.0;
const MIN_RADIUS: f64 = 30.0;
const MAX_RADIUS: f64 = 50.0;
const MAX_CF_TERMS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EiConfig {
    /// Switchover radius between the power series and the far-field
    /// expansions in the right half-plane.
    pub series_radius: f64,
}

impl Default for EiConfig {
    fn default() -> Self {
        Self { series_radius: 40.0 }
    }
}

impl EiConfig {
    /// Radii below 30 leave the asymptotic series short of double precision;
    /// above 50 the series loses more than ten digits on the imaginary axis.
    pub fn new(series_radius: f64) -> Result<Self> {
        if !(MIN_RADIUS..=MAX_RADIUS).contains(&series_radius) {
            return Err(invalid(
                "series_radius",
                format!("must lie in [{MIN_RADIUS}, {MAX_RADIUS}], got {series_radius}"),
            ));
        }
        Ok(Self { series_radius })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EiMethod {
    Series,
    Asymptotic,
    ContinuedFraction,
}

/// The route [`ei_with`] takes at `z`.
pub fn method(z: ComplexValue, cfg: &EiConfig) -> EiMethod {
    let r = z.norm();
    if r <= LEFT_RADIUS || (z.re >= 0.0 && r <= cfg.series_radius) {
        EiMethod::Series
    } else if z.re > 0.0 && z.im.abs() <= z.re {
        EiMethod::Asymptotic
    } else {
        EiMethod::ContinuedFraction
    }
}

fn check(z: ComplexValue) -> Result<()> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(invalid("z", format!("components must be finite, got {z}")));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(LabError::EiSingular);
    }
    Ok(())
}

/// Ei(z) with the default configuration.
pub fn ei(z: ComplexValue) -> Result<ComplexValue> {
    ei_with(z, &EiConfig::default())
}

pub fn ei_with(z: ComplexValue, cfg: &EiConfig) -> Result<ComplexValue> {
    check(z)?;
    Ok(match method(z, cfg) {
        EiMethod::Series => series(z),
        EiMethod::Asymptotic => asymptotic(z),
        EiMethod::ContinuedFraction => continued_fraction(z),
    })
}

/// Real Ei(x), x ≠ 0 (the Cauchy principal value for x > 0).
pub fn ei_real(x: f64) -> Result<f64> {
    Ok(ei(Complex64::new(x, 0.0))?.re)
}

/// Ei by the power series alone, at any nonzero finite z.
pub fn ei_series(z: ComplexValue) -> Result<ComplexValue> {
    check(z)?;
    Ok(series(z))
}

/// Ei by the far-field route (asymptotic series or continued fraction) that
/// applies to `z` once it lies outside the series disc.
pub fn ei_far(z: ComplexValue) -> Result<ComplexValue> {
    check(z)?;
    Ok(if z.re > 0.0 && z.im.abs() <= z.re { asymptotic(z) } else { continued_fraction(z) })
}

fn log_branch(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re.abs().ln(), 0.0)
    } else {
        z.ln()
    }
}

fn series(z: Complex64) -> Complex64 {
    let mut term = CDd::from_f64(1.0, 0.0);
    let mut sum = CDd::ZERO;
    let r = z.norm();
    let mut k = 1.0f64;
    loop {
        term = term.mul_c64(z.re, z.im).div_f64(k);
        let contrib = term.div_f64(k);
        sum = sum.add(contrib);
        if k > r && contrib.norm_f64() <= 1e-34 * sum.norm_f64().max(1e-300) {
            break;
        }
        k += 1.0;
    }
    let (sr, si) = sum.to_f64();
    let l = log_branch(z);
    let v = Complex64::new(EULER_GAMMA + l.re + sr, l.im + si);
    if z.im == 0.0 {
        Complex64::new(v.re, 0.0)
    } else {
        v
    }
}

fn stokes(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, std::f64::consts::PI.copysign(z.im))
    }
}

fn asymptotic(z: Complex64) -> Complex64 {
    let inv = 1.0 / z;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    let mut k = 1.0;
    loop {
        let next = term * inv * k;
        let size = next.norm();
        if size >= prev || size < 1e-18 {
            break;
        }
        sum += next;
        term = next;
        prev = size;
        k += 1.0;
    }
    z.exp() * inv * sum + stokes(z)
}

/// E1(w) by the modified Lentz algorithm.
fn e1_continued_fraction(w: Complex64) -> Complex64 {
    let tiny = 1e-300;
    let one = Complex64::new(1.0, 0.0);
    let mut b = w + 1.0;
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 1..MAX_CF_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = one / (d * an + b);
        c = b + c.inv() * an;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h * (-w).exp()
}

fn continued_fraction(z: Complex64) -> Complex64 {
    let v = -e1_continued_fraction(-z) + stokes(z);
    if z.im == 0.0 {
        Complex64::new(v.re, 0.0)
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn real_values() {
        assert!((ei_real(1.0).unwrap() - 1.895_117_816_355_936_8).abs() < 1e-15);
        assert!((ei_real(100f64.ln()).unwrap() - 30.126_141_584_079_63).abs() < 1e-12);
        assert!((ei_real(-1.0).unwrap() - (-0.219_383_934_395_520_3)).abs() < 1e-15);
        // far field on both sides of the origin
        assert!((ei_real(-10.0).unwrap() / -4.156_968_929_685_324e-6 - 1.0).abs() < 1e-13);
        assert!((ei_real(50.0).unwrap() / 1.058_563_689_713_169e20 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn complex_values() {
        // mpmath.ei at the given points
        let cases = [
            (c(0.0, 1.0), c(0.337_403_922_900_968_1, 2.516_879_397_162_079_6)),
            (c(-3.0, 2.0), c(0.009_095_920_874_794_729, 3.134_692_474_327_580_7)),
            (c(2.5, 60.0), c(-0.066_662_658_567_690_13, 3.333_252_180_773_494)),
        ];
        for (z, want) in cases {
            let got = ei(z).unwrap();
            assert!(rel(got, want) < 1e-12, "Ei({z}) = {got}, want {want}");
        }
    }

    #[test]
    fn conjugate_symmetry() {
        for z in [c(0.5, 14.1), c(-7.0, 0.3), c(45.0, 10.0), c(3.0, -80.0)] {
            let a = ei(z.conj()).unwrap();
            let b = ei(z).unwrap().conj();
            assert!(rel(a, b) < 1e-15);
        }
    }

    #[test]
    fn seams_agree() {
        let cfg = EiConfig::default();
        let r = cfg.series_radius;
        let n = 400;
        for i in 0..=n {
            // right half-plane arc at the configured radius
            let t = -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * i as f64 / n as f64;
            let z = Complex64::from_polar(r, t);
            let (a, b) = (ei_series(z).unwrap(), ei_far(z).unwrap());
            assert!(rel(a, b) <= 1e-10, "radius seam at {z}: {a} vs {b}");
            // left half-plane arc
            let z = Complex64::from_polar(LEFT_RADIUS, t + std::f64::consts::PI);
            let (a, b) = (ei_series(z).unwrap(), ei_far(z).unwrap());
            assert!(rel(a, b) <= 1e-10, "left seam at {z}: {a} vs {b}");
            // the imaginary axis between the two radii
            let y = LEFT_RADIUS + (r - LEFT_RADIUS) * i as f64 / n as f64;
            for z in [c(0.0, y), c(0.0, -y)] {
                let (a, b) = (ei_series(z).unwrap(), ei_far(z).unwrap());
                assert!(rel(a, b) <= 1e-10, "axis seam at {z}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn radius_is_configurable() {
        let z = c(35.0, 5.0);
        let near = ei_with(z, &EiConfig::new(40.0).unwrap()).unwrap();
        let far = ei_with(z, &EiConfig::new(30.0).unwrap()).unwrap();
        assert_eq!(method(z, &EiConfig::new(30.0).unwrap()), EiMethod::Asymptotic);
        assert!(rel(near, far) < 1e-12);
        assert!(EiConfig::new(10.0).is_err());
    }

    #[test]
    fn rejects_origin() {
        assert!(matches!(ei(c(0.0, 0.0)), Err(LabError::EiSingular)));
        assert!(ei(c(f64::NAN, 1.0)).is_err());
    }
}
