//! Streaming prefix tallies of π, θ, ψ, M and Q.
//!
//! A scan sieves `[2, max]` block by block (in parallel), records each
//! block's local running sums at the query points that fall inside it, then
//! folds the block totals sequentially in order. Block boundaries depend
//! only on the segment size, so the value reported for a point never
//! depends on which other points were queried or on the worker count.

use crate::error::{invalid, Result};
use crate::sieve::{segment_map, PrimeSegment, SieveConfig, Tables};
use crate::sum::Neumaier;

/// Which sums a scan maintains besides the prime count.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Fields {
    pub theta: bool,
    pub psi: bool,
    pub mobius: bool,
}

impl Fields {
    pub const PI: Fields = Fields { theta: false, psi: false, mobius: false };
    pub const THETA: Fields = Fields { theta: true, psi: false, mobius: false };
    pub const CHEBYSHEV: Fields = Fields { theta: true, psi: true, mobius: false };
    pub const MOBIUS: Fields = Fields { theta: false, psi: false, mobius: true };
    pub const ALL: Fields = Fields { theta: true, psi: true, mobius: true };

    fn tables(&self) -> Tables {
        Tables { mu: self.mobius, lambda: self.psi }
    }
}

/// Sums over `n` in some range: prime count, Σ log p, Σ Λ(n), Σ μ(n) and
/// Σ |μ(n)|. Fields not requested stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub pi: u64,
    pub theta: Neumaier,
    pub psi: Neumaier,
    pub mertens: i64,
    pub squarefree: u64,
}

impl Tally {
    pub fn merge(&mut self, other: &Tally) {
        self.pi += other.pi;
        self.theta.merge(&other.theta);
        self.psi.merge(&other.psi);
        self.mertens += other.mertens;
        self.squarefree += other.squarefree;
    }

    pub fn theta(&self) -> f64 {
        self.theta.value()
    }

    pub fn psi(&self) -> f64 {
        self.psi.value()
    }
}

struct BlockTally {
    total: Tally,
    snapshots: Vec<Tally>,
}

/// Walk one block, snapshotting the local tally after each `n <= q` for
/// every query `q` in `queries` (ascending, all inside the block).
fn walk_block(seg: &PrimeSegment, fields: Fields, queries: &[u64]) -> BlockTally {
    let mut t = Tally::default();
    let mut snapshots = Vec::with_capacity(queries.len());
    let mut qi = 0;
    if fields.psi || fields.mobius {
        let lambda = seg.lambda_table();
        let mu = seg.mu_table();
        for (i, n) in (seg.lo()..seg.hi()).enumerate() {
            if seg.is_prime(n) {
                t.pi += 1;
                if fields.theta {
                    t.theta.add(lambda.map_or_else(|| (n as f64).ln(), |l| l[i]));
                }
            }
            if let Some(l) = lambda {
                if l[i] != 0.0 {
                    t.psi.add(l[i]);
                }
            }
            if let Some(m) = mu {
                t.mertens += m[i] as i64;
                t.squarefree += (m[i] != 0) as u64;
            }
            while qi < queries.len() && queries[qi] == n {
                snapshots.push(t);
                qi += 1;
            }
        }
    } else {
        for p in seg.primes() {
            while qi < queries.len() && queries[qi] < p {
                snapshots.push(t);
                qi += 1;
            }
            t.pi += 1;
            if fields.theta {
                t.theta.add((p as f64).ln());
            }
        }
    }
    while snapshots.len() < queries.len() {
        snapshots.push(t);
    }
    BlockTally { total: t, snapshots }
}

/// Tally contribution of `n = 1`: μ(1) = 1, 1 is squarefree.
fn one(fields: Fields) -> Tally {
    let mut t = Tally::default();
    if fields.mobius {
        t.mertens = 1;
        t.squarefree = 1;
    }
    t
}

/// Prefix tallies over `n <= x` for every `x` in `points` (ascending).
pub fn tally_at(points: &[u64], fields: Fields) -> Result<Vec<Tally>> {
    tally_at_with(points, fields, &SieveConfig::default())
}

pub fn tally_at_with(points: &[u64], fields: Fields, cfg: &SieveConfig) -> Result<Vec<Tally>> {
    if points.windows(2).any(|w| w[0] > w[1]) {
        return Err(invalid("points", "query points must be ascending"));
    }
    let Some(&max) = points.last() else {
        return Ok(Vec::new());
    };
    let base = one(fields);
    if max < 2 {
        return Ok(points.iter().map(|&x| if x >= 1 { base } else { Tally::default() }).collect());
    }
    let blocks = segment_map(2, max + 1, cfg, fields.tables(), |seg| {
        let a = points.partition_point(|&x| x < seg.lo());
        let b = points.partition_point(|&x| x < seg.hi());
        walk_block(seg, fields, &points[a..b])
    })?;

    let mut out = Vec::with_capacity(points.len());
    for &x in points.iter().take_while(|&&x| x < 2) {
        out.push(if x >= 1 { base } else { Tally::default() });
    }
    let mut prefix = base;
    for block in &blocks {
        for snap in &block.snapshots {
            let mut t = prefix;
            t.merge(snap);
            out.push(t);
        }
        prefix.merge(&block.total);
    }
    debug_assert_eq!(out.len(), points.len());
    Ok(out)
}

/// Prefix tally over `n <= x`.
pub fn tally(x: u64, fields: Fields) -> Tally {
    tally_at(&[x], fields).expect("single point is always ascending")[0]
}

/// Tally over `n` in `[lo, hi)`, `lo >= 1`.
pub fn tally_range(lo: u64, hi: u64, fields: Fields) -> Result<Tally> {
    crate::sieve::validate_range(lo, hi, 1)?;
    let mut t = if lo == 1 { one(fields) } else { Tally::default() };
    let start = lo.max(2);
    if start < hi {
        let blocks =
            segment_map(start, hi, &SieveConfig::default(), fields.tables(), |seg| walk_block(seg, fields, &[]).total)?;
        for b in &blocks {
            t.merge(b);
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = tally_at(&[0, 1, 2, 10, 100], Fields::ALL).unwrap();
        assert_eq!(t.iter().map(|t| t.pi).collect::<Vec<_>>(), vec![0, 0, 1, 4, 25]);
        assert_eq!(t[1].mertens, 1);
        assert_eq!(t[3].mertens, -1);
        assert_eq!(t[3].squarefree, 7);
        assert_eq!(t[4].squarefree, 61);
        let theta10 = 2f64.ln() + 3f64.ln() + 5f64.ln() + 7f64.ln();
        assert!((t[3].theta() - theta10).abs() < 1e-14);
        assert!((t[3].psi() - (theta10 + 2f64.ln() * 2.0 + 3f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn point_values_do_not_depend_on_the_query_set() {
        let alone = tally(123_457, Fields::ALL);
        let many = tally_at(&[5, 99_999, 123_457, 400_000], Fields::ALL).unwrap();
        assert_eq!(alone, many[2]);
    }

    #[test]
    fn fields_agree_between_walks() {
        let a = tally(300_001, Fields::THETA);
        let b = tally(300_001, Fields::ALL);
        assert_eq!(a.pi, b.pi);
        assert!((a.theta() - b.theta()).abs() < 1e-9);
    }

    #[test]
    fn range_tally_splits() {
        let whole = tally(200_000, Fields::ALL);
        let mut left = tally_range(1, 70_001, Fields::ALL).unwrap();
        left.merge(&tally_range(70_001, 200_001, Fields::ALL).unwrap());
        assert_eq!(whole.pi, left.pi);
        assert_eq!(whole.mertens, left.mertens);
        assert!((whole.psi() - left.psi()).abs() < 1e-9);
    }

    #[test]
    fn unsorted_points_rejected() {
        assert!(tally_at(&[10, 5], Fields::PI).is_err());
    }
}
