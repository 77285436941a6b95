//! Zero tables, the truncated explicit formula for ψ and the
//! Riemann–von Mangoldt reconstruction of π.
//!
//! Every zero is taken as ρ = 1/2 + iγ and paired with its conjugate, so
//! each ordinate contributes `2·Re(·)`.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, LabError, Result};
use crate::logint::{ei, integrate, li0, QuadratureSpec};
use crate::sum::Neumaier;

/// The first three ordinates every table must reproduce to within 1e-4.
pub const LEADING_ORDINATES: [f64; 3] = [14.134725, 21.022040, 25.010858];
const LEADING_TOLERANCE: f64 = 1e-4;

const BUNDLED: &str = include_str!("../data/zeros_1000.txt");

/// Ascending zero ordinates, complete up to `height`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroList {
    gammas: Vec<f64>,
    source: String,
    height: f64,
}

impl ZeroList {
    /// Parse a zero table: one ordinate per line, blank lines and `#`
    /// comments ignored. A comment `# height: H` declares that the list holds
    /// every zero with ordinate below `H`; otherwise the height is the last
    /// ordinate.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let source_name = source.to_string();
        let mut declared = None;
        let mut gammas: Vec<(usize, f64)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let s = raw.trim();
            if s.is_empty() {
                continue;
            }
            if let Some(comment) = s.strip_prefix('#') {
                if let Some(h) = comment.trim().strip_prefix("height:") {
                    let h: f64 = h.trim().parse().map_err(|_| LabError::ZeroParse {
                        source_name: source_name.clone(),
                        line,
                        text: s.to_string(),
                    })?;
                    declared = Some(h);
                }
                continue;
            }
            let v: f64 = s.parse().map_err(|_| LabError::ZeroParse {
                source_name: source_name.clone(),
                line,
                text: s.to_string(),
            })?;
            if !v.is_finite() {
                return Err(LabError::ZeroParse { source_name, line, text: s.to_string() });
            }
            gammas.push((line, v));
        }
        let Some(&(_, last)) = gammas.last() else {
            return Err(LabError::ZeroEmpty { source_name });
        };
        for w in gammas.windows(2) {
            let ((_, previous), (line, value)) = (w[0], w[1]);
            if value <= previous {
                return Err(LabError::ZeroOrdering { source_name, line, value, previous });
            }
        }
        let height = declared.unwrap_or(last);
        for &(line, v) in &gammas {
            let above_cap = if declared.is_some() { v >= height } else { v > height };
            if v <= 14.0 || above_cap {
                return Err(LabError::ZeroOutOfBounds { source_name, line, value: v, max_height: height });
            }
        }
        for (index, (&(_, v), &expected)) in gammas.iter().zip(&LEADING_ORDINATES).enumerate() {
            if (v - expected).abs() > LEADING_TOLERANCE {
                return Err(LabError::ZeroMismatch { source_name, index: index + 1, value: v, expected });
            }
        }
        Ok(Self { gammas: gammas.into_iter().map(|(_, v)| v).collect(), source: source_name, height })
    }

    /// The table shipped with the library: the first 1000 ordinates.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED, "bundled:zeros_1000.txt").expect("bundled table is valid")
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// The first `k` ordinates as a table of their own.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        self.check_k(k)?;
        if k == 0 {
            return Err(invalid("k", "a zero table needs at least one entry"));
        }
        let height = if k == self.len() { self.height } else { self.gammas[k - 1] };
        Ok(Self { gammas: self.gammas[..k].to_vec(), source: format!("{}[..{k}]", self.source), height })
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.len() {
            return Err(invalid("K", format!("table holds {} zeros, asked for {k}", self.len())));
        }
        Ok(())
    }
}

/// Read and validate a zero table from a file.
pub fn load_zeros(path: impl AsRef<Path>) -> Result<ZeroList> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LabError::Io { path: path.to_path_buf(), source })?;
    ZeroList::parse(&text, &path.display().to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroCount {
    pub t: f64,
    pub counted: usize,
    /// `(T/2π) log(T/2π) − T/2π + 7/8`
    pub main_term: f64,
    pub deviation: f64,
    /// `|deviation| <= 2`, required from `T >= 30` on.
    pub within: bool,
}

pub fn zero_count_main_term(t: f64) -> f64 {
    let u = t / (2.0 * std::f64::consts::PI);
    u * u.ln() - u + 0.875
}

pub fn zero_count_check(zeros: &ZeroList, t: f64) -> Result<ZeroCount> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("T", format!("must be positive, got {t}")));
    }
    if t > zeros.height() {
        return Err(LabError::HeightBeyondTable { t, height: zeros.height() });
    }
    let counted = zeros.gammas().partition_point(|&g| g <= t);
    let main_term = zero_count_main_term(t);
    let deviation = counted as f64 - main_term;
    Ok(ZeroCount { t, counted, main_term, deviation, within: t < 30.0 || deviation.abs() <= 2.0 })
}

fn is_prime_power_value(x: f64) -> bool {
    if x.fract() != 0.0 || !(2.0..=9.0e18).contains(&x) {
        return false;
    }
    let n = x as u64;
    (1..=63 - n.leading_zeros()).any(|k| {
        let r = crate::grid::iroot(n, k);
        r.checked_pow(k) == Some(n) && crate::sieve::is_prime(r)
    })
}

fn check_explicit_x(x: f64) -> Result<()> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(invalid("x", format!("need finite x >= 2, got {x}")));
    }
    Ok(())
}

/// `x − Σ_{k<=K} 2·Re(x^ρ/ρ)` over the first `K` zeros.
pub fn psi_landau(x: f64, zeros: &ZeroList, k: usize) -> Result<f64> {
    check_explicit_x(x)?;
    if is_prime_power_value(x) {
        return Err(invalid("x", format!("{x} is a prime power, where ψ jumps; use x + 1/2")));
    }
    zeros.check_k(k)?;
    let l = x.ln();
    let s: Neumaier =
        zeros.gammas[..k].iter().map(|&g| (0.5 * (g * l).cos() + g * (g * l).sin()) / (0.25 + g * g)).collect();
    Ok(x - 2.0 * x.sqrt() * s.value())
}

/// Root mean square of `psi_landau(x) − ψ(x)` over half-integers
/// `lo + 1/2, ..., hi + 1/2`, against the sieve.
pub fn landau_rms(zeros: &ZeroList, k: usize, lo: u64, hi: u64) -> Result<f64> {
    if lo < 2 || hi < lo {
        return Err(invalid("range", format!("need 2 <= lo <= hi, got [{lo}, {hi}]")));
    }
    let xs: Vec<u64> = (lo..=hi).collect();
    let t = crate::scan::tally_at(&xs, crate::scan::Fields::CHEBYSHEV)?;
    let mut sq = Neumaier::new();
    for (&n, t) in xs.iter().zip(&t) {
        let e = psi_landau(n as f64 + 0.5, zeros, k)? - t.psi();
        sq.add(e * e);
    }
    Ok((sq.value() / xs.len() as f64).sqrt())
}

/// Options for [`pi_riemann`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RiemannTerms {
    /// Number of terms of the Möbius sum.
    pub n: u64,
    /// Number of zeros.
    pub k: usize,
    /// Include the constant `−log 2` and the integral `∫_y^∞ dt/(t(t²−1) log t)`.
    pub tails: bool,
}

impl RiemannTerms {
    /// `n = ⌊log2 x⌋`, the last index with `x^{1/n} >= 2`, all zeros, tails on.
    pub fn natural(x: f64, zeros: &ZeroList) -> Self {
        Self { n: natural_n(x), k: zeros.len(), tails: true }
    }
}

pub fn natural_n(x: f64) -> u64 {
    x.log2().floor().max(1.0) as u64
}

/// `∫_y^∞ dt/(t(t²−1) log t)` for `y > 1`.
pub fn log_tail_integral(y: f64) -> Result<f64> {
    if !(y > 1.0) {
        return Err(invalid("y", format!("need y > 1, got {y}")));
    }
    // t = e^u; beyond u0 + 20 the integrand is below e^{-2u}/u and the
    // neglected remainder below 1e-18.
    let u0 = y.ln();
    let q = integrate(|u| 1.0 / (u * (2.0 * u).exp_m1()), u0, u0 + 20.0, &QuadratureSpec::default());
    Ok(q.value)
}

/// `J(y) = li0(y) − Σ_{k<=K} 2·Re li0(y^ρ) [− log 2 + ∫_y^∞ dt/(t(t²−1) log t)]`.
fn riemann_j(y: f64, zeros: &[f64], tails: bool) -> Result<f64> {
    let ly = y.ln();
    let mut acc = Neumaier::new();
    acc.add(li0(y)?);
    for &g in zeros {
        acc.add(-2.0 * ei(Complex64::new(0.5, g) * ly)?.re);
    }
    if tails {
        acc.add(-std::f64::consts::LN_2);
        acc.add(log_tail_integral(y)?);
    }
    Ok(acc.value())
}

/// `Σ_{n<=N} μ(n)/n · J(x^{1/n})`, the explicit formula for π(x).
///
/// `li0` (the logarithmic integral from 0) is used throughout, which is what
/// makes the formula reproduce π; with `N = 1`, no zeros and no tails the
/// value is `li0(x) = li(x) + li0(2)`.
pub fn pi_riemann(x: f64, zeros: &ZeroList, terms: RiemannTerms) -> Result<f64> {
    check_explicit_x(x)?;
    if terms.n < 1 {
        return Err(invalid("N", "need N >= 1"));
    }
    zeros.check_k(terms.k)?;
    let mu = crate::sieve::mobius_range(1, terms.n + 1)?;
    let gammas = &zeros.gammas[..terms.k];
    let mut acc = Neumaier::new();
    for (i, &m) in mu.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let n = (i + 1) as f64;
        let y = x.powf(1.0 / n);
        if y <= 1.0 {
            break;
        }
        acc.add(m as f64 / n * riemann_j(y, gammas, terms.tails)?);
    }
    Ok(acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three() -> ZeroList {
        ZeroList::parse("14.134725\n21.022040\n25.010858\n", "three").unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(three().len(), 3);
        assert!(matches!(
            ZeroList::parse("14.134725\n25.010858\n21.022040\n", "t"),
            Err(LabError::ZeroOrdering { line: 3, .. })
        ));
        assert!(matches!(ZeroList::parse("", "t"), Err(LabError::ZeroEmpty { .. })));
        assert!(matches!(ZeroList::parse("# only a comment\n\n", "t"), Err(LabError::ZeroEmpty { .. })));
        assert!(matches!(ZeroList::parse("14.13x\n", "t"), Err(LabError::ZeroParse { line: 1, .. })));
        assert!(matches!(ZeroList::parse("-3\n", "t"), Err(LabError::ZeroOutOfBounds { .. })));
        assert!(matches!(ZeroList::parse("14.2\n", "t"), Err(LabError::ZeroMismatch { index: 1, .. })));
        assert!(matches!(
            ZeroList::parse("# height: 20\n14.134725\n21.022040\n", "t"),
            Err(LabError::ZeroOutOfBounds { line: 3, .. })
        ));
        let z = ZeroList::parse("# note\n14.134725\n\n# height: 30\n21.022040\n", "t").unwrap();
        assert_eq!(z.height(), 30.0);
    }

    #[test]
    fn bundled_table() {
        let z = ZeroList::bundled();
        assert_eq!(z.len(), 1000);
        assert_eq!(z.height(), 1420.0);
        for (g, want) in z.gammas().iter().zip(LEADING_ORDINATES) {
            assert!((g - want).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_count_examples() {
        let z = ZeroList::parse("# height: 25.05\n14.134725\n21.022040\n25.010858\n", "t").unwrap();
        let r = zero_count_check(&z, 25.02).unwrap();
        assert_eq!(r.counted, 3);
        assert!((r.main_term - 2.3953).abs() < 1e-4 && (r.deviation - 0.6047).abs() < 1e-4);
        let r = zero_count_check(&z, 14.0).unwrap();
        assert_eq!(r.counted, 0);
        assert!((r.main_term - 0.4320).abs() < 1e-4);
        assert!(matches!(zero_count_check(&three(), 25.02), Err(LabError::HeightBeyondTable { .. })));
        let full = ZeroList::bundled();
        let r = zero_count_check(&full, full.gammas()[999]).unwrap();
        assert_eq!(r.counted, 1000);
        assert!(r.within);
    }

    #[test]
    fn landau_examples() {
        let z = ZeroList::bundled();
        assert_eq!(psi_landau(100.5, &z, 0).unwrap(), 100.5);
        let psi = crate::chebyshev::psi(100);
        let err = psi_landau(100.5, &z, 100).unwrap() - psi;
        // the omitted constant −log 2π accounts for most of the gap
        assert!(err.abs() <= 3.0, "{err}");
        assert!((err - (2.0 * std::f64::consts::PI).ln()).abs() <= 1.0, "{err}");
        assert!(psi_landau(101.0, &z, 10).is_err());
        assert!(psi_landau(128.0, &z, 10).is_err());
        assert!(psi_landau(100.5, &z, 1001).is_err());
    }

    #[test]
    fn rms_shrinks_with_more_zeros() {
        let z = ZeroList::bundled();
        let rms: Vec<f64> = [10, 25, 50, 100].iter().map(|&k| landau_rms(&z, k, 10, 300).unwrap()).collect();
        for w in rms.windows(2) {
            assert!(w[1] <= w[0] * 1.05, "{rms:?}");
        }
        assert!(landau_rms(&z, 1000, 10, 300).unwrap() < rms[3]);
    }

    #[test]
    fn riemann_examples() {
        let z = ZeroList::bundled();
        let bare = RiemannTerms { n: 1, k: 0, tails: false };
        let li0_x = pi_riemann(1000.0, &z, bare).unwrap();
        assert!((li0_x - (crate::logint::li(1000.0).unwrap() + li0(2.0).unwrap())).abs() < 1e-10);

        let r = pi_riemann(1000.0, &z, RiemannTerms { n: 60, k: 0, tails: false }).unwrap();
        // the truncated Möbius series oscillates about R(1000) = 168.3594
        assert!((r - 168.36).abs() < 0.05, "{r}");
        let li = crate::logint::li(1000.0).unwrap();
        assert!((r - 168.0).abs() < (li - 168.0).abs());

        let p = pi_riemann(100.5, &z, RiemannTerms { n: 6, k: 100, tails: true }).unwrap();
        assert!((p - 25.0).abs() <= 1.0, "{p}");
        assert!(pi_riemann(100.5, &z, RiemannTerms { n: 0, k: 0, tails: true }).is_err());
    }

    #[test]
    fn tail_integral() {
        // mpmath quad of 1/(t(t²−1)log t) over [2, ∞)
        assert!((log_tail_integral(2.0).unwrap() - 0.140_010_101_143_287).abs() < 1e-12);
    }
}
