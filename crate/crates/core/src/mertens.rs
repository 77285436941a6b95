//! The Mertens function M(x) = Σ_{n<=x} μ(n), the squarefree count
//! Q(x) = Σ_{n<=x} |μ(n)|, and envelope checks on both.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::report::{Table, ToTable};
use crate::scan::{self, Fields};
use crate::sieve::{segment_map, PrimeSegment, SieveConfig, Tables};
use crate::sum::Neumaier;

/// Largest argument accepted by the envelope checks.
pub const ENVELOPE_MAX: u64 = 100_000_000;
/// Exponent of the Mertens envelope `|M(x)| <= x^{7/12}`.
pub const MERTENS_EXPONENT: f64 = 7.0 / 12.0;

fn check_x(x: u64) -> Result<()> {
    if x < 1 {
        return Err(invalid("x", "need x >= 1"));
    }
    Ok(())
}

pub fn mertens(x: u64) -> Result<i64> {
    check_x(x)?;
    Ok(scan::tally(x, Fields::MOBIUS).mertens)
}

pub fn squarefree_count(x: u64) -> Result<u64> {
    check_x(x)?;
    Ok(scan::tally(x, Fields::MOBIUS).squarefree)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MertensRow {
    pub x: u64,
    pub m: i64,
    pub q: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MertensProfile {
    pub samples: Vec<MertensRow>,
}

/// M and Q at every point of an ascending grid (points >= 1).
pub fn profile(xs: &[u64]) -> Result<MertensProfile> {
    if xs.first() == Some(&0) {
        return Err(invalid("x", "grid points must be at least 1"));
    }
    let t = scan::tally_at(xs, Fields::MOBIUS)?;
    let samples = xs.iter().zip(t).map(|(&x, t)| MertensRow { x, m: t.mertens, q: t.squarefree }).collect();
    Ok(MertensProfile { samples })
}

impl ToTable for MertensProfile {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "M", "Q"]);
        for r in &self.samples {
            t.push(vec![r.x.into(), r.m.into(), r.q.into()]);
        }
        t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub x: u64,
    pub m: i64,
    /// `|M(x)| / x^{7/12}`
    pub ratio: f64,
    /// `M(x) / √x`
    pub m_over_sqrt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MertensEnvelope {
    pub rows: Vec<EnvelopeRow>,
    /// Grid points with `|M(x)| > x^{7/12}`.
    pub violations: Vec<u64>,
    pub max_ratio: f64,
    /// Observed extremes of `M(x)/√x`, reported only.
    pub min_m_over_sqrt: f64,
    pub max_m_over_sqrt: f64,
}

impl MertensEnvelope {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

impl ToTable for MertensEnvelope {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "M", "abs_M_over_x_7_12", "M_over_sqrt_x"]);
        for r in &self.rows {
            t.push(vec![r.x.into(), r.m.into(), r.ratio.into(), r.m_over_sqrt.into()]);
        }
        t
    }
}

fn check_grid(xs: &[u64], lo: u64) -> Result<()> {
    if let Some(&x) = xs.iter().find(|&&x| x < lo || x > ENVELOPE_MAX) {
        return Err(invalid("grid", format!("points must lie in [{lo}, {ENVELOPE_MAX}], got {x}")));
    }
    Ok(())
}

/// `|M(x)| <= x^{7/12}` on an ascending grid in `[2, 10^8]`.
pub fn mertens_envelope(xs: &[u64]) -> Result<MertensEnvelope> {
    check_grid(xs, 2)?;
    let p = profile(xs)?;
    let rows: Vec<EnvelopeRow> = p
        .samples
        .iter()
        .map(|r| {
            let x = r.x as f64;
            EnvelopeRow {
                x: r.x,
                m: r.m,
                ratio: r.m.unsigned_abs() as f64 / x.powf(MERTENS_EXPONENT),
                m_over_sqrt: r.m as f64 / x.sqrt(),
            }
        })
        .collect();
    let violations = rows.iter().filter(|r| r.ratio > 1.0).map(|r| r.x).collect();
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let min_m_over_sqrt = rows.iter().map(|r| r.m_over_sqrt).fold(f64::INFINITY, f64::min);
    let max_m_over_sqrt = rows.iter().map(|r| r.m_over_sqrt).fold(f64::NEG_INFINITY, f64::max);
    Ok(MertensEnvelope { rows, violations, max_ratio, min_m_over_sqrt, max_m_over_sqrt })
}

/// Map every block of `[2, limit]` through `f`, which also receives
/// M and Q over `n < seg.lo()`.
fn mobius_stream<R, F>(limit: u64, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&PrimeSegment, i64, u64) -> R + Sync + Send,
{
    let cfg = SieveConfig::default();
    let totals = segment_map(2, limit + 1, &cfg, Tables::MU, |seg| {
        let mu = seg.mu_table().expect("mu requested");
        let m: i64 = mu.iter().map(|&v| v as i64).sum();
        let q = mu.iter().filter(|&&v| v != 0).count() as u64;
        (seg.lo(), m, q)
    })?;
    let mut prefixes = Vec::with_capacity(totals.len());
    let (mut m, mut q) = (1i64, 1u64);
    for &(lo, dm, dq) in &totals {
        prefixes.push((lo, m, q));
        m += dm;
        q += dq;
    }
    segment_map(2, limit + 1, &cfg, Tables::MU, |seg| {
        let i = prefixes.partition_point(|&(lo, _, _)| lo < seg.lo());
        let (_, m, q) = prefixes[i];
        f(seg, m, q)
    })
}

/// Envelope checks at every integer in `[2, limit]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamingCheck {
    pub limit: u64,
    /// Integers with `|M(x)| > x^{7/12}`; `first_m_violation` is the least.
    pub m_violations: u64,
    pub first_m_violation: Option<u64>,
    pub max_m_ratio: f64,
    pub max_m_ratio_at: u64,
    /// Integers `x >= 100` with `|Q(x) − 6x/π²| > 2√x`.
    pub q_violations: u64,
    pub max_q_ratio: f64,
    pub max_q_ratio_at: u64,
}

impl StreamingCheck {
    pub fn holds(&self) -> bool {
        self.m_violations == 0 && self.q_violations == 0
    }
}

#[derive(Default)]
struct BlockCheck {
    m_violations: u64,
    first_m_violation: Option<u64>,
    max_m: (f64, u64),
    q_violations: u64,
    max_q: (f64, u64),
}

/// Q density constant `6/π²`.
pub fn squarefree_density() -> f64 {
    6.0 / (PI * PI)
}

/// Checks `|M(x)| <= x^{7/12}` for every `2 <= x <= limit` and
/// `|Q(x) − 6x/π²| <= 2√x` for every `100 <= x <= limit`.
pub fn streaming_check(limit: u64) -> Result<StreamingCheck> {
    if !(2..=ENVELOPE_MAX).contains(&limit) {
        return Err(invalid("limit", format!("must lie in [2, {ENVELOPE_MAX}], got {limit}")));
    }
    let density = squarefree_density();
    let blocks = mobius_stream(limit, |seg, mut m, mut q| {
        let mu = seg.mu_table().expect("mu requested");
        let mut b = BlockCheck::default();
        for (i, &v) in mu.iter().enumerate() {
            let n = seg.lo() + i as u64;
            m += v as i64;
            q += (v != 0) as u64;
            let x = n as f64;
            let mr = m.unsigned_abs() as f64 / x.powf(MERTENS_EXPONENT);
            if mr > 1.0 {
                b.m_violations += 1;
                b.first_m_violation.get_or_insert(n);
            }
            if mr > b.max_m.0 {
                b.max_m = (mr, n);
            }
            if n >= 100 {
                let qr = (q as f64 - density * x).abs() / (2.0 * x.sqrt());
                if qr > 1.0 {
                    b.q_violations += 1;
                }
                if qr > b.max_q.0 {
                    b.max_q = (qr, n);
                }
            }
        }
        b
    })?;
    let mut out = StreamingCheck {
        limit,
        m_violations: 0,
        first_m_violation: None,
        max_m_ratio: 0.0,
        max_m_ratio_at: 2,
        q_violations: 0,
        max_q_ratio: 0.0,
        max_q_ratio_at: 100,
    };
    for b in blocks {
        out.m_violations += b.m_violations;
        if out.first_m_violation.is_none() {
            out.first_m_violation = b.first_m_violation;
        }
        if b.max_m.0 > out.max_m_ratio {
            (out.max_m_ratio, out.max_m_ratio_at) = b.max_m;
        }
        out.q_violations += b.q_violations;
        if b.max_q.0 > out.max_q_ratio {
            (out.max_q_ratio, out.max_q_ratio_at) = b.max_q;
        }
    }
    Ok(out)
}

/// `Σ_{n<N} M(n)·(1/n² − 1/(n+1)²)`, which is `2∫_1^N M(t) t^{-3} dt` for
/// the step function M; it tends to `1/ζ(2) = 6/π²`.
pub fn inverse_zeta2_shadow(n_max: u64) -> Result<f64> {
    if n_max < 2 {
        return Err(invalid("N", format!("need N >= 2, got {n_max}")));
    }
    let block = |n: u64| {
        let x = n as f64;
        1.0 / (x * x) - 1.0 / ((x + 1.0) * (x + 1.0))
    };
    let mut total = Neumaier::new();
    // n = 1: M(1) = 1
    total.add(block(1));
    if n_max > 2 {
        let parts = mobius_stream(n_max - 1, |seg, mut m, _| {
            let mut acc = Neumaier::new();
            for (i, &v) in seg.mu_table().expect("mu requested").iter().enumerate() {
                m += v as i64;
                acc.add(m as f64 * block(seg.lo() + i as u64));
            }
            acc
        })?;
        for p in &parts {
            total.merge(p);
        }
    }
    Ok(total.value())
}

/// `Σ_{d | n} μ(d)` for every `1 <= n <= limit`.
pub fn mobius_divisor_sums(limit: u64) -> Result<Vec<i64>> {
    if limit < 1 {
        return Err(invalid("limit", "need limit >= 1"));
    }
    let mu = crate::sieve::mobius_range(1, limit + 1)?;
    let mut sums = vec![0i64; limit as usize];
    for d in 1..=limit as usize {
        let m = mu[d - 1] as i64;
        if m != 0 {
            for n in (d..=limit as usize).step_by(d) {
                sums[n - 1] += m;
            }
        }
    }
    Ok(sums)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_mu(mut n: u64) -> i64 {
        let mut sign = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if n > 1 {
            sign = -sign;
        }
        sign
    }

    #[test]
    fn examples() {
        assert_eq!(mertens(1).unwrap(), 1);
        assert_eq!(mertens(2).unwrap(), 0);
        assert_eq!(mertens(10).unwrap(), -1);
        assert_eq!(squarefree_count(1).unwrap(), 1);
        assert_eq!(squarefree_count(10).unwrap(), 7);
        assert_eq!(squarefree_count(100).unwrap(), 61);
        assert!(mertens(0).is_err());
    }

    #[test]
    fn matches_naive_factorization() {
        let xs: Vec<u64> = (1..=100_000).collect();
        let p = profile(&xs).unwrap();
        let mut m = 0;
        let mut q = 0;
        for r in &p.samples {
            let mu = naive_mu(r.x);
            m += mu;
            q += (mu != 0) as u64;
            assert_eq!((r.m, r.q), (m, q), "x = {}", r.x);
        }
        for w in p.samples.windows(2) {
            assert!((w[1].m - w[0].m).abs() <= 1);
            assert!(w[1].q - w[0].q <= 1);
        }
    }

    #[test]
    fn divisor_sums() {
        let s = mobius_divisor_sums(10_000).unwrap();
        assert_eq!(s[0], 1);
        assert!(s[1..].iter().all(|&v| v == 0));
    }

    #[test]
    fn envelope_examples() {
        let e = mertens_envelope(&[2, 10]).unwrap();
        assert_eq!(e.rows[0].m, 0);
        assert_eq!(e.rows[1].m, -1);
        assert!((10f64.powf(7.0 / 12.0) - 3.83).abs() < 0.01);
        assert!(e.holds());
        assert!(mertens_envelope(&[1]).is_err());
        assert!(mertens_envelope(&[ENVELOPE_MAX + 1]).is_err());
        let csv = e.to_table().to_csv();
        assert!(csv.starts_with("x,M,abs_M_over_x_7_12,M_over_sqrt_x\n2,0,0.0,0.0\n"));
    }

    #[test]
    fn streaming_agrees_with_grid() {
        let s = streaming_check(1_000_000).unwrap();
        assert!(s.holds(), "{s:?}");
        let at = s.max_m_ratio_at;
        let m = mertens(at).unwrap();
        assert_eq!(m.unsigned_abs() as f64 / (at as f64).powf(MERTENS_EXPONENT), s.max_m_ratio);
    }

    #[test]
    fn zeta_shadow_converges() {
        let target = squarefree_density();
        let a = (inverse_zeta2_shadow(1_000).unwrap() - target).abs();
        let b = (inverse_zeta2_shadow(1_000_000).unwrap() - target).abs();
        assert!(b < a);
        assert!(b < 1e-3);
        // one block: M(1) (1 − 1/4)
        assert_eq!(inverse_zeta2_shadow(2).unwrap(), 0.75);
    }
}
