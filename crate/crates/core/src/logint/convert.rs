//! Conversions between π, θ and ψ through Stieltjes integration by parts.
//!
//! The integrands are step functions, so each integral is a finite sum over
//! the blocks on which the step function is constant, with the kernel
//! integrated in closed form on each block.

use serde::Serialize;

use crate::chebyshev;
use crate::counting::{check_progression, primes_ap};
use crate::error::{invalid, Result};
use crate::sieve::{mangoldt_range, primes_in};
use crate::sum::Neumaier;

/// `∫_2^x s(t) k(t) dt` for the step function `s` equal to `values[i]` on
/// `[jumps[i], jumps[i+1])` (and on `[jumps[last], x]`), zero before
/// `jumps[0]`. `block(a, b)` is `∫_a^b k(t) dt`.
fn step_integral(jumps: &[u64], values: &[f64], x: f64, block: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = Neumaier::new();
    for (i, (&a, &v)) in jumps.iter().zip(values).enumerate() {
        let b = jumps.get(i + 1).map_or(x, |&n| n as f64);
        acc.add(v * block(a as f64, b));
    }
    acc.value()
}

/// Running sums of `weights`.
fn cumulative(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = Neumaier::new();
    weights
        .map(|w| {
            acc.add(w);
            acc.value()
        })
        .collect()
}

fn log_block(a: f64, b: f64) -> f64 {
    (b / a).ln()
}

fn inv_log_block(a: f64, b: f64) -> f64 {
    1.0 / a.ln() - 1.0 / b.ln()
}

fn inv_block(a: f64, b: f64) -> f64 {
    1.0 / a - 1.0 / b
}

fn counts(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64).collect()
}

/// `θ(x)/log x + ∫_2^x θ(t)/(t log² t) dt` for the θ step function with
/// value `thetas[i]` from `primes[i]` on.
fn pi_via_theta(primes: &[u64], thetas: &[f64], x: f64) -> f64 {
    let total = thetas.last().copied().unwrap_or(0.0);
    total / x.ln() + step_integral(primes, thetas, x, inv_log_block)
}

/// `π(x) log x − ∫_2^x π(t)/t dt`.
fn theta_via_pi(primes: &[u64], x: f64) -> f64 {
    primes.len() as f64 * x.ln() - step_integral(primes, &counts(primes.len()), x, log_block)
}

/// `π(x)/x + ∫_2^x π(t)/t² dt`.
fn reciprocal_via_pi(primes: &[u64], x: f64) -> f64 {
    primes.len() as f64 / x + step_integral(primes, &counts(primes.len()), x, inv_block)
}

fn log_thetas(primes: &[u64]) -> Vec<f64> {
    cumulative(primes.iter().map(|&p| (p as f64).ln()))
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn check_x(x: u64, min: u64) -> Result<()> {
    if x < min {
        return Err(invalid("x", format!("need x >= {min}, got {x}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PiFromThetaMode {
    /// Telescoped sum `θ(x)/log x + Σ_{p<=x} log p (1/log p − 1/log x)`.
    ExactSum,
    /// Blockwise integral of the θ step function.
    PiecewiseIntegral,
}

/// π(x) recovered from θ.
pub fn pi_from_theta(x: u64, mode: PiFromThetaMode) -> Result<f64> {
    check_x(x, 3)?;
    let primes = primes_in(2, x + 1)?;
    let lx = (x as f64).ln();
    Ok(match mode {
        PiFromThetaMode::ExactSum => {
            let theta: Neumaier = primes.iter().map(|&p| (p as f64).ln()).collect();
            let tail: Neumaier = primes
                .iter()
                .map(|&p| {
                    let l = (p as f64).ln();
                    l * (1.0 / l - 1.0 / lx)
                })
                .collect();
            theta.value() / lx + tail.value()
        }
        PiFromThetaMode::PiecewiseIntegral => pi_via_theta(&primes, &log_thetas(&primes), x as f64),
    })
}

/// θ(x) recovered from π.
pub fn theta_from_pi(x: u64) -> Result<f64> {
    check_x(x, 3)?;
    Ok(theta_via_pi(&primes_in(2, x + 1)?, x as f64))
}

/// Both sides of one identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_discrepancy: f64,
}

impl IdentityRow {
    fn new(identity: &'static str, lhs: f64, rhs: f64) -> Self {
        Self { identity, lhs, rhs, rel_discrepancy: rel(lhs, rhs) }
    }
}

/// `Σ_{2<=n<=x} Λ(n)/log n` (left) against `ψ(x)/log x + ∫_2^x ψ(t)/(t log² t) dt`
/// (right). The common value is the weighted prime-power count.
pub fn mangoldt_log_sum(x: u64) -> Result<IdentityRow> {
    check_x(x, 2)?;
    let lambda = mangoldt_range(2, x + 1)?;
    let lhs: Neumaier =
        lambda.iter().enumerate().filter(|(_, &l)| l != 0.0).map(|(i, &l)| l / ((i + 2) as f64).ln()).collect();

    let primes = primes_in(2, x + 1)?;
    let mut powers: Vec<(u64, f64)> = Vec::with_capacity(primes.len() + 64);
    for &p in &primes {
        let lp = (p as f64).ln();
        let mut n = p;
        loop {
            powers.push((n, lp));
            match n.checked_mul(p) {
                Some(m) if m <= x => n = m,
                _ => break,
            }
        }
    }
    powers.sort_unstable_by_key(|&(n, _)| n);
    let jumps: Vec<u64> = powers.iter().map(|&(n, _)| n).collect();
    let psis = cumulative(powers.iter().map(|&(_, l)| l));
    let rhs = pi_via_theta(&jumps, &psis, x as f64);
    Ok(IdentityRow::new("mangoldt_log_sum", lhs.value(), rhs))
}

/// `Σ_{p<=x} 1/p` (left) against `π(x)/x + ∫_2^x π(t)/t² dt` (right).
pub fn reciprocal_prime_sum(x: u64) -> Result<IdentityRow> {
    check_x(x, 2)?;
    let primes = primes_in(2, x + 1)?;
    let lhs: Neumaier = primes.iter().map(|&p| 1.0 / p as f64).collect();
    Ok(IdentityRow::new("reciprocal_prime_sum", lhs.value(), reciprocal_via_pi(&primes, x as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConversionReport {
    pub x: u64,
    /// The progression `(q, a)`, absent for the full set of primes.
    pub progression: Option<(u64, u64)>,
    pub rows: Vec<IdentityRow>,
    pub max_rel_discrepancy: f64,
}

impl ConversionReport {
    fn new(x: u64, progression: Option<(u64, u64)>, rows: Vec<IdentityRow>) -> Self {
        let max_rel_discrepancy = rows.iter().map(|r| r.rel_discrepancy).fold(0.0, f64::max);
        Self { x, progression, rows, max_rel_discrepancy }
    }
}

/// All four π/θ/ψ conversions at `x`, each against its sieve oracle.
pub fn conversion_check(x: u64) -> Result<ConversionReport> {
    check_x(x, 3)?;
    let pi = primes_in(2, x + 1)?.len() as f64;
    let theta = chebyshev::theta(x);
    let rows = vec![
        IdentityRow::new("pi_from_theta/exact-sum", pi, pi_from_theta(x, PiFromThetaMode::ExactSum)?),
        IdentityRow::new("pi_from_theta/piecewise-integral", pi, pi_from_theta(x, PiFromThetaMode::PiecewiseIntegral)?),
        IdentityRow::new("theta_from_pi", theta, theta_from_pi(x)?),
        mangoldt_log_sum(x)?,
        reciprocal_prime_sum(x)?,
    ];
    Ok(ConversionReport::new(x, None, rows))
}

/// The π/θ conversions and the reciprocal sum restricted to primes
/// `p ≡ a (mod q)`.
pub fn ap_conversions(x: u64, q: u64, a: u64) -> Result<ConversionReport> {
    check_progression(q, a)?;
    check_x(x, 2)?;
    let primes = primes_ap(x, q, a)?;
    let xf = x as f64;
    let pi = primes.len() as f64;
    let thetas = log_thetas(&primes);
    let theta = chebyshev::theta_ap(x, q, a)?;
    let recip: Neumaier = primes.iter().map(|&p| 1.0 / p as f64).collect();
    let rows = vec![
        IdentityRow::new("pi_ap_from_theta_ap", pi, pi_via_theta(&primes, &thetas, xf)),
        IdentityRow::new("theta_ap_from_pi_ap", theta, theta_via_pi(&primes, xf)),
        IdentityRow::new("reciprocal_ap_sum", recip.value(), reciprocal_via_pi(&primes, xf)),
    ];
    Ok(ConversionReport::new(x, Some((q, a)), rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_from_theta_examples() {
        for mode in [PiFromThetaMode::ExactSum, PiFromThetaMode::PiecewiseIntegral] {
            assert!((pi_from_theta(100, mode).unwrap() - 25.0).abs() < 1e-12);
            assert!((pi_from_theta(3, mode).unwrap() - 2.0).abs() < 1e-15);
        }
        let a = pi_from_theta(100_000, PiFromThetaMode::ExactSum).unwrap();
        let b = pi_from_theta(100_000, PiFromThetaMode::PiecewiseIntegral).unwrap();
        assert!(rel(a, b) <= 1e-12);
        assert!(pi_from_theta(2, PiFromThetaMode::ExactSum).is_err());
    }

    #[test]
    fn theta_from_pi_examples() {
        assert!((theta_from_pi(10).unwrap() - 5.347_108).abs() < 1e-6);
        assert!((theta_from_pi(3).unwrap() - (2f64.ln() + 3f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        let x = 1000;
        let primes = primes_in(2, x + 1).unwrap();
        let thetas: Vec<f64> = (0..primes.len()).map(|i| theta_via_pi(&primes[..=i], primes[i] as f64)).collect();
        let back = pi_via_theta(&primes, &thetas, x as f64);
        assert!(rel(back, primes.len() as f64) <= 1e-8);
    }

    #[test]
    fn mangoldt_examples() {
        let r = mangoldt_log_sum(4).unwrap();
        assert!((r.lhs - 2.5).abs() < 1e-15 && (r.rhs - 2.5).abs() < 1e-14);
        let r = mangoldt_log_sum(2).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15);
        let r = mangoldt_log_sum(10_000).unwrap();
        assert!(r.rel_discrepancy <= 1e-9);
        assert!(r.lhs >= crate::counting::pi(10_000) as f64);
    }

    #[test]
    fn reciprocal_examples() {
        let r = reciprocal_prime_sum(10).unwrap();
        assert!((r.lhs - 1.176_190).abs() < 1e-6);
        assert!((r.rhs - (0.4 + 0.776_190)).abs() < 1e-6);
        assert!(r.rel_discrepancy <= 1e-12);
        let r = reciprocal_prime_sum(2).unwrap();
        assert_eq!(r.lhs, 0.5);
        assert!((r.rhs - 0.5).abs() < 1e-16);
        let r = reciprocal_prime_sum(1_000_000).unwrap();
        assert!(r.rel_discrepancy <= 1e-12);
        let mertens_constant = 0.261_497_212_847_642_8;
        assert!((r.lhs - (1e6f64.ln().ln() + mertens_constant)).abs() < 1e-3);
    }

    #[test]
    fn progression_examples() {
        assert!(ap_conversions(100, 4, 1).unwrap().max_rel_discrepancy <= 1e-9);
        let r = ap_conversions(3, 2, 1).unwrap();
        assert!(r.max_rel_discrepancy <= 1e-15, "{r:?}");
        assert!(ap_conversions(100_000, 3, 2).unwrap().max_rel_discrepancy <= 1e-9);
        assert!(ap_conversions(100, 4, 2).is_err());
        let empty = ap_conversions(2, 3, 1).unwrap();
        assert_eq!(empty.max_rel_discrepancy, 0.0);
    }

    #[test]
    fn conversion_report() {
        let r = conversion_check(1000).unwrap();
        assert_eq!(r.rows.len(), 5);
        assert!(r.max_rel_discrepancy <= 1e-9);
    }
}
