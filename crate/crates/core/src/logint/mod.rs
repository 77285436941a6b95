//! The logarithmic integral, the complex exponential integral, the
//! step-function conversion identities between π, θ and ψ, and the integral
//! envelope `∫ dt/(t^ν log^C t)`.
//!
//! `li(x) = ∫_2^x dt/log t`, so `li(2) = 0`. The offset variant
//! `li0(x) = Ei(log x)`, integrating from 0 in the principal-value sense,
//! exceeds it by `li0(2) ≈ 1.04516`.

mod convert;
mod dd;
mod ei;
mod quad;

pub use convert::{
    ap_conversions, conversion_check, mangoldt_log_sum, pi_from_theta, reciprocal_prime_sum, theta_from_pi,
    ConversionReport, IdentityRow, PiFromThetaMode,
};
pub use ei::{ei, ei_far, ei_real, ei_series, ei_with, method, ComplexValue, EiConfig, EiMethod, LEFT_RADIUS};
pub use quad::{integrate, Quadrature, QuadratureSpec};

use serde::Serialize;

use crate::error::{invalid, LabError, Result};

/// Relative disagreement between the two li routes above which [`li`]
/// reports a numerical failure.
pub const LI_AGREEMENT: f64 = 1e-10;

/// li(x) by both routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiValue {
    pub x: f64,
    pub quadrature: f64,
    pub quadrature_error: f64,
    pub series: f64,
}

impl LiValue {
    pub fn rel_disagreement(&self) -> f64 {
        let scale = self.series.abs().max(self.quadrature.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.quadrature - self.series).abs() / scale
        }
    }
}

fn check_li_arg(x: f64) -> Result<()> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(invalid("x", format!("li is defined here for finite x >= 2, got {x}")));
    }
    Ok(())
}

/// li(x) by adaptive quadrature of `e^u/u` over `[log 2, log x]`.
pub fn li_quadrature(x: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    check_li_arg(x)?;
    Ok(integrate(|u| u.exp() / u, std::f64::consts::LN_2, x.ln(), spec))
}

/// li(x) as `Ei(log x) − Ei(log 2)`.
pub fn li_series(x: f64) -> Result<f64> {
    check_li_arg(x)?;
    if x == 2.0 {
        return Ok(0.0);
    }
    Ok(ei_real(x.ln())? - ei_real(std::f64::consts::LN_2)?)
}

/// li(x) by quadrature and by the series.
pub fn li_both(x: f64, spec: &QuadratureSpec) -> Result<LiValue> {
    let q = li_quadrature(x, spec)?;
    let series = li_series(x)?;
    Ok(LiValue { x, quadrature: q.value, quadrature_error: q.error, series })
}

/// li(x) with the default quadrature tolerances. Fails if the quadrature
/// and series routes disagree by more than [`LI_AGREEMENT`] relative.
pub fn li(x: f64) -> Result<f64> {
    li_with(x, &QuadratureSpec::default())
}

pub fn li_with(x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let v = li_both(x, spec)?;
    let tol = LI_AGREEMENT.max(spec.rel_tol);
    if v.rel_disagreement() > tol && (v.quadrature - v.series).abs() > spec.abs_tol {
        return Err(LabError::Degenerate(format!(
            "li({x}): quadrature {} and series {} disagree",
            v.quadrature, v.series
        )));
    }
    Ok(v.series)
}

/// `li0(x) = Ei(log x)` for x > 1.
pub fn li0(x: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return Err(invalid("x", format!("li0 needs finite x > 1, got {x}")));
    }
    ei_real(x.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub nu: f64,
    pub c: f64,
    pub x: f64,
    pub integral: f64,
    /// `x^{1−ν} / log^C x`
    pub scale: f64,
    pub bound_ratio: f64,
}

/// `∫_2^x dt/(t^ν log^C t)` against `x^{1−ν}/log^C x`.
pub fn integral_envelope_check(nu: f64, c: f64, x: f64) -> Result<EnvelopeCheck> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(invalid("nu", format!("must be positive, got {nu}")));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(invalid("C", format!("must be positive, got {c}")));
    }
    if !(x > 2.0) || !x.is_finite() {
        return Err(invalid("x", format!("must exceed 2, got {x}")));
    }
    // t = e^u
    let q =
        integrate(|u| ((1.0 - nu) * u).exp() / u.powf(c), std::f64::consts::LN_2, x.ln(), &QuadratureSpec::default());
    let scale = x.powf(1.0 - nu) / x.ln().powf(c);
    Ok(EnvelopeCheck { nu, c, x, integral: q.value, scale, bound_ratio: q.value / scale })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn li_examples() {
        assert_eq!(li(2.0).unwrap(), 0.0);
        assert!((li(100.0).unwrap() - 29.080_977_803_962_1).abs() < 1e-9);
        let big = li(1e6).unwrap();
        assert!((big - 78_626.503_7).abs() < 1e-3);
        assert!(((big - crate::counting::pi(1_000_000) as f64) - 128.5).abs() < 0.1);
        assert!(li(1.99).is_err());
        assert!(li(f64::NAN).is_err());
    }

    #[test]
    fn li_routes_agree_on_a_grid() {
        let spec = QuadratureSpec::default();
        for i in 0..=200 {
            let x = 2.5 * (1e8f64 / 2.5).powf(i as f64 / 200.0);
            let v = li_both(x, &spec).unwrap();
            assert!(v.rel_disagreement() <= 1e-10, "x = {x}: {v:?}");
        }
    }

    #[test]
    fn ei_li_consistency() {
        let e = ei_real(100f64.ln()).unwrap();
        assert!((e - 30.126).abs() < 1e-3);
        assert!((e - ei_real(2f64.ln()).unwrap() - li(100.0).unwrap()).abs() < 1e-12);
        assert!((li0(2.0).unwrap() - 1.045_163_780_117_493).abs() < 1e-14);
    }

    #[test]
    fn envelope_examples() {
        let r = integral_envelope_check(5.0 / 12.0, 2.0, 1e6).unwrap();
        assert!(r.bound_ratio > 0.0 && r.bound_ratio <= 10.0);
        let r = integral_envelope_check(0.5, 1.0, 100.0).unwrap();
        assert!(r.bound_ratio.is_finite() && r.bound_ratio > 0.0);
        let near = integral_envelope_check(0.5, 1.0, 2.0 + 1e-9).unwrap();
        assert!(near.integral > 0.0 && near.integral < 1e-8);
        assert!(integral_envelope_check(0.0, 1.0, 10.0).is_err());
        assert!(integral_envelope_check(0.5, 1.0, 2.0).is_err());
    }
}
