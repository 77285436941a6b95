//! Chebyshev θ and ψ: exact sums, progression variants, ψ − θ, and
//! sign changes of ψ(x) − x.
//!
//! ψ has two independent evaluation routes: the direct sum of Λ(n) over
//! `n <= x`, and the finite series `θ(x) + θ(x^{1/2}) + θ(x^{1/3}) + ...`
//! truncated at `k = ⌊log2 x⌋` (beyond it `x^{1/k} < 2`).

use serde::Serialize;

use crate::counting::primes_ap;
use crate::error::{invalid, Result};
use crate::grid::iroot;
use crate::report::{Table, ToTable};
use crate::scan::{self, Fields};
use crate::sum;

/// θ(x) = Σ_{p <= x} log p.
pub fn theta(x: u64) -> f64 {
    scan::tally(x, Fields::THETA).theta()
}

/// ψ(x) = Σ_{n <= x} Λ(n).
pub fn psi(x: u64) -> f64 {
    scan::tally(x, Fields::CHEBYSHEV).psi()
}

/// Integer arguments `⌊x^{1/k}⌋` for `k = 1..=⌊log2 x⌋`.
fn root_points(x: u64) -> Vec<u64> {
    if x < 2 {
        return Vec::new();
    }
    let kmax = 63 - x.leading_zeros();
    (1..=kmax).map(|k| iroot(x, k)).collect()
}

/// θ at the points `⌊x^{1/k}⌋`, `k = 1..=⌊log2 x⌋`, in order of `k`.
fn theta_roots(x: u64) -> Vec<f64> {
    let roots = root_points(x);
    let mut sorted = roots.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let tallies = scan::tally_at(&sorted, Fields::THETA).expect("sorted points");
    roots.iter().map(|r| tallies[sorted.binary_search(r).expect("present")].theta()).collect()
}

/// ψ(x) through the finite θ series.
pub fn psi_theta_series(x: u64) -> f64 {
    sum::sum(theta_roots(x))
}

/// ψ(x) − θ(x) = θ(x^{1/2}) + θ(x^{1/3}) + ...; zero below 4.
pub fn psi_minus_theta(x: u64) -> f64 {
    if x < 4 {
        return 0.0;
    }
    sum::sum(theta_roots(x).into_iter().skip(1))
}

/// θ(x; q, a) = Σ log p over primes `p <= x`, `p ≡ a (mod q)`.
pub fn theta_ap(x: u64, q: u64, a: u64) -> Result<f64> {
    Ok(sum::sum(primes_ap(x, q, a)?.into_iter().map(|p| (p as f64).ln())))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChebyshevRow {
    pub x: u64,
    pub theta: f64,
    pub psi: f64,
}

/// θ and ψ sampled on an ascending grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevProfile {
    pub samples: Vec<ChebyshevRow>,
}

/// θ and ψ at every grid point, in one streaming pass.
pub fn profile(xs: &[u64]) -> Result<ChebyshevProfile> {
    let t = scan::tally_at(xs, Fields::CHEBYSHEV)?;
    let samples = xs.iter().zip(t).map(|(&x, t)| ChebyshevRow { x, theta: t.theta(), psi: t.psi() }).collect();
    Ok(ChebyshevProfile { samples })
}

impl ToTable for ChebyshevProfile {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "theta", "psi", "theta_minus_x", "psi_minus_x"]);
        for r in &self.samples {
            let x = r.x as f64;
            t.push(vec![r.x.into(), r.theta.into(), r.psi.into(), (r.theta - x).into(), (r.psi - x).into()]);
        }
        t
    }
}

/// A sample pair `(a, b)` across which ψ(x) − x changes sign. `crossing`
/// is the first integer in `(a, b]` whose sign differs from that at `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SignChange {
    pub a: u64,
    pub b: u64,
    pub crossing: u64,
}

/// Coverage of windows `[x, factor·x]` by detected sign changes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowCoverage {
    pub factor: f64,
    pub checked: usize,
    pub uncovered: Vec<u64>,
}

impl WindowCoverage {
    pub fn all_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignChangeReport {
    pub lo: u64,
    pub hi: u64,
    pub step: u64,
    pub witnesses: Vec<SignChange>,
    /// Windows `[x, 2.02x]`.
    pub sharp: WindowCoverage,
    /// Windows `[x, 19x]`, informational.
    pub weak: WindowCoverage,
}

impl SignChangeReport {
    pub fn detected(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

impl ToTable for SignChangeReport {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["a", "b", "crossing"]);
        for w in &self.witnesses {
            t.push(vec![w.a.into(), w.b.into(), w.crossing.into()]);
        }
        t
    }
}

fn above(psi: f64, x: u64) -> bool {
    psi - x as f64 > 0.0
}

/// Scan ψ(x) − x at `lo, lo + step, ...` (up to `hi`) for sign changes.
pub fn sign_change_scan(lo: u64, hi: u64, step: u64) -> Result<SignChangeReport> {
    if lo < 2 || hi <= lo {
        return Err(invalid("range", format!("need 2 <= lo < hi, got [{lo}, {hi}]")));
    }
    if step == 0 {
        return Err(invalid("step", "must be at least 1"));
    }
    let xs: Vec<u64> = (lo..=hi).step_by(step as usize).collect();
    let t = scan::tally_at(&xs, Fields::CHEBYSHEV)?;
    let signs: Vec<bool> = xs.iter().zip(&t).map(|(&x, t)| above(t.psi(), x)).collect();

    let mut witnesses = Vec::new();
    for i in 1..xs.len() {
        if signs[i] != signs[i - 1] {
            let (a, b) = (xs[i - 1], xs[i]);
            let crossing = if b - a == 1 {
                b
            } else {
                let fine: Vec<u64> = (a + 1..=b).collect();
                let ft = scan::tally_at(&fine, Fields::CHEBYSHEV)?;
                fine.iter().zip(&ft).find(|(&n, t)| above(t.psi(), n) != signs[i - 1]).map_or(b, |(&n, _)| n)
            };
            witnesses.push(SignChange { a, b, crossing });
        }
    }

    let coverage = |factor: f64| {
        let mut checked = 0;
        let mut uncovered = Vec::new();
        for &x in &xs {
            let end = x as f64 * factor;
            if end > hi as f64 {
                break;
            }
            checked += 1;
            let hit = witnesses.iter().any(|w| w.a >= x && (w.b as f64) <= end);
            if !hit {
                uncovered.push(x);
            }
        }
        WindowCoverage { factor, checked, uncovered }
    };
    let sharp = coverage(2.02);
    let weak = coverage(19.0);
    Ok(SignChangeReport { lo, hi, step, witnesses, sharp, weak })
}

#[cfg(test)]
mod tests {
    use super::*;

    const L2: f64 = std::f64::consts::LN_2;

    fn ln(x: f64) -> f64 {
        x.ln()
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(1), 0.0);
        assert!((theta(10) - 5.347108).abs() < 1e-6);
        assert!((theta(10) - (L2 + ln(3.0) + ln(5.0) + ln(7.0))).abs() < 1e-14);
        assert!((theta(100) - 83.7284).abs() < 1e-4);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(1), 0.0);
        let want = 3.0 * L2 + 2.0 * ln(3.0) + ln(5.0) + ln(7.0);
        assert!((psi(10) - want).abs() < 1e-14);
        assert!((psi(10) - 7.832014).abs() < 1e-6);
        // proper prime powers up to 100: 4,8,16,32,64,9,27,81,25,49
        let tail = 5.0 * L2 + 3.0 * ln(3.0) + ln(5.0) + ln(7.0);
        assert!((tail - 10.3169).abs() < 1e-4);
        assert!((psi(100) - (theta(100) + tail)).abs() < 1e-12);
        assert!((psi(100) - 94.0453).abs() < 1e-4);
    }

    #[test]
    fn psi_minus_theta_examples() {
        assert!((psi_minus_theta(100) - 10.3169).abs() < 1e-4);
        assert!((psi_minus_theta(4) - L2).abs() < 1e-15);
        assert_eq!(psi_minus_theta(3), 0.0);
    }

    #[test]
    fn theta_ap_examples() {
        assert!((theta_ap(10, 4, 1).unwrap() - ln(5.0)).abs() < 1e-15);
        assert!((theta_ap(10, 4, 3).unwrap() - (ln(3.0) + ln(7.0))).abs() < 1e-15);
        assert!((theta_ap(2, 3, 2).unwrap() - L2).abs() < 1e-15);
        assert!(theta_ap(10, 6, 3).is_err());
    }

    #[test]
    fn both_psi_routes_agree() {
        for x in [2, 3, 4, 1000, 65_536, 100_000, 1_000_000] {
            let a = psi(x);
            let b = psi_theta_series(x);
            assert!((a - b).abs() <= 1e-9 * a.max(1.0), "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn profile_invariants() {
        let xs = crate::grid::log_grid(2, 2_000_000, 60);
        let p = profile(&xs).unwrap();
        for w in p.samples.windows(2) {
            assert!(w[0].theta <= w[1].theta && w[0].psi <= w[1].psi);
        }
        assert!(p.samples.iter().all(|r| r.theta <= r.psi));
        let csv = p.to_table().to_csv();
        assert!(csv.starts_with("x,theta,psi,theta_minus_x,psi_minus_x\n2,"));
    }

    fn brute_psi_minus_x(n: u64) -> f64 {
        let lam = crate::sieve::mangoldt_range(1, n + 1).unwrap();
        sum::sum(lam) - n as f64
    }

    #[test]
    fn sign_changes_to_1000() {
        let r = sign_change_scan(2, 1000, 1).unwrap();
        assert!(r.detected());
        // ψ(19) = log(2^4·3^2·5·7·11·13·17·19) > 19 while ψ(18) < 18
        assert_eq!(r.witnesses[0], SignChange { a: 18, b: 19, crossing: 19 });
        assert_eq!(r.witnesses.len(), 150);
        for w in &r.witnesses {
            assert_ne!(brute_psi_minus_x(w.a) > 0.0, brute_psi_minus_x(w.b) > 0.0);
        }
    }

    #[test]
    fn coarse_scan_refines() {
        let r = sign_change_scan(2, 1000, 7).unwrap();
        for w in &r.witnesses {
            assert!(w.a < w.crossing && w.crossing <= w.b);
            assert_ne!(brute_psi_minus_x(w.crossing - 1) > 0.0, brute_psi_minus_x(w.crossing) > 0.0);
        }
    }

    #[test]
    fn too_coarse_scan_sees_nothing() {
        let r = sign_change_scan(2, 12, 10).unwrap();
        assert!(!r.detected());
        assert!(r.witnesses.is_empty());
    }
}
