//! Segmented sieve of Eratosthenes with Möbius and von Mangoldt tables.
//!
//! Ranges are cut into blocks aligned to multiples of the configured
//! segment size, so a block covering `n` is the same block no matter which
//! range it was requested for. Blocks are sieved independently (in parallel
//! with the `parallel` feature) and concatenated in order.
//!
//! Primality flags are packed one bit per odd integer. The Möbius table is
//! filled by sieving every prime `p <= sqrt(hi)` over the block: each hit
//! flips the sign and multiplies a running product of distinct prime
//! factors, each hit of `p^2` zeroes the entry. A block entry whose product
//! falls short of `n` has exactly one prime factor above `sqrt(hi)` left.

use crate::error::{LabError, Result};
use crate::grid::isqrt;
use crate::par;

/// Exclusive upper bound accepted by range operations.
pub const MAX_HI: u64 = 1 << 63;

/// Base primes up to this bound are held in memory; above it they are
/// regenerated block by block for every target block.
const BASE_CACHE_LIMIT: u64 = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Integers per block. Must be a positive multiple of 128.
    pub segment_size: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        // 2^18 integers -> 16 KiB of flags, plus the optional tables.
        Self { segment_size: 1 << 18 }
    }
}

impl SieveConfig {
    pub fn new(segment_size: u64) -> Result<Self> {
        if segment_size == 0 || !segment_size.is_multiple_of(128) {
            return Err(crate::error::invalid(
                "segment_size",
                format!("{segment_size} is not a positive multiple of 128"),
            ));
        }
        Ok(Self { segment_size })
    }

    /// Block boundaries covering `[lo, hi)`, aligned to multiples of the
    /// segment size.
    pub fn blocks(&self, lo: u64, hi: u64) -> Vec<(u64, u64)> {
        let s = self.segment_size;
        let mut out = Vec::new();
        let mut a = lo;
        while a < hi {
            let b = ((a / s).saturating_add(1)).saturating_mul(s).min(hi);
            out.push((a, b));
            a = b;
        }
        out
    }
}

/// Which arithmetic-function tables a block should carry.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tables {
    pub mu: bool,
    pub lambda: bool,
}

impl Tables {
    pub const NONE: Tables = Tables { mu: false, lambda: false };
    pub const MU: Tables = Tables { mu: true, lambda: false };
    pub const LAMBDA: Tables = Tables { mu: false, lambda: true };
    pub const ALL: Tables = Tables { mu: true, lambda: true };
}

/// Primes up to `limit`, used to sieve blocks whose upper end is at most
/// `limit^2`.
#[derive(Debug, Clone)]
pub struct BasePrimes {
    limit: u64,
    cached: Vec<u32>,
    streamed: bool,
}

impl BasePrimes {
    /// Base primes sufficient for sieving any block below `hi`.
    pub fn for_hi(hi: u64) -> Self {
        Self::up_to(isqrt(hi.saturating_sub(1)))
    }

    pub fn up_to(limit: u64) -> Self {
        if limit <= BASE_CACHE_LIMIT {
            Self { limit, cached: simple_primes(limit), streamed: false }
        } else {
            Self { limit, cached: simple_primes(isqrt(limit)), streamed: true }
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Visit every prime `p <= min(limit, bound)` in ascending order.
    fn for_each_upto(&self, bound: u64, mut f: impl FnMut(u64)) {
        let bound = bound.min(self.limit);
        if !self.streamed {
            for &p in &self.cached {
                if p as u64 > bound {
                    break;
                }
                f(p as u64);
            }
            return;
        }
        for &p in &self.cached {
            if p as u64 > bound {
                return;
            }
            f(p as u64);
        }
        // Remaining base primes lie above sqrt(limit); sieve them out of
        // fixed windows using the cached small primes.
        const WINDOW: u64 = 1 << 20;
        let mut lo = self.cached.last().map_or(2, |&p| p as u64 + 1);
        let mut flags = Vec::new();
        while lo <= bound {
            let hi = lo.saturating_add(WINDOW).min(bound + 1);
            flags.clear();
            flags.resize((hi - lo) as usize, true);
            for &p in &self.cached {
                let p = p as u64;
                if p * p >= hi {
                    break;
                }
                let mut m = (lo.div_ceil(p) * p).max(p * p);
                while m < hi {
                    flags[(m - lo) as usize] = false;
                    m += p;
                }
            }
            for (i, &is_p) in flags.iter().enumerate() {
                if is_p {
                    f(lo + i as u64);
                }
            }
            lo = hi;
        }
    }
}

/// Plain sieve of Eratosthenes over `[0, limit]`.
fn simple_primes(limit: u64) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut m = i * i;
            while m <= n {
                composite[m] = true;
                m += i;
            }
        }
    }
    out
}

/// One block `[lo, hi)` of integers with primality flags and, on request,
/// Möbius and von Mangoldt tables.
#[derive(Debug, Clone)]
pub struct PrimeSegment {
    lo: u64,
    hi: u64,
    /// First odd integer `>= lo`; bit `i` of `flags` stands for `odd_lo + 2i`.
    odd_lo: u64,
    flags: Vec<u64>,
    mu: Option<Vec<i8>>,
    lambda: Option<Vec<f64>>,
}

impl PrimeSegment {
    /// Sieve `[lo, hi)`. Requires `2 <= lo < hi <= 2^63` and
    /// `hi - lo <= cfg.segment_size`.
    pub fn build(lo: u64, hi: u64, cfg: &SieveConfig, tables: Tables) -> Result<Self> {
        validate_range(lo, hi, 2)?;
        if hi - lo > cfg.segment_size {
            return Err(LabError::InvalidRange { lo, hi, reason: "block exceeds the segment size" });
        }
        Ok(Self::build_with(lo, hi, &BasePrimes::for_hi(hi), tables))
    }

    pub(crate) fn build_with(lo: u64, hi: u64, base: &BasePrimes, tables: Tables) -> Self {
        debug_assert!(lo >= 2 && hi > lo);
        debug_assert!(base.limit() >= isqrt(hi - 1));
        let root = isqrt(hi - 1);
        let odd_lo = lo | 1;
        let odd_count = if hi > odd_lo { (hi - odd_lo).div_ceil(2) } else { 0 };
        let words = odd_count.div_ceil(64) as usize;
        let mut flags = vec![u64::MAX; words];
        if odd_count % 64 != 0 {
            flags[words - 1] = (1u64 << (odd_count % 64)) - 1;
        }
        if odd_lo == 1 && odd_count > 0 {
            flags[0] &= !1;
        }

        let len = (hi - lo) as usize;
        let mut mu = tables.mu.then(|| vec![1i8; len]);
        let mut prod = tables.mu.then(|| vec![1u64; len]);
        let mut lambda = tables.lambda.then(|| vec![0f64; len]);

        base.for_each_upto(root, |p| {
            if p > 2 {
                let p2 = p * p;
                let mut m = lo.div_ceil(p).saturating_mul(p).max(p2);
                if m % 2 == 0 {
                    m += p;
                }
                let step = 2 * p;
                while m < hi {
                    let i = ((m - odd_lo) / 2) as usize;
                    flags[i / 64] &= !(1u64 << (i % 64));
                    m = match m.checked_add(step) {
                        Some(v) => v,
                        None => break,
                    };
                }
            }
            if let (Some(mu), Some(prod)) = (mu.as_mut(), prod.as_mut()) {
                let mut m = lo.div_ceil(p) * p;
                while m < hi {
                    let i = (m - lo) as usize;
                    mu[i] = -mu[i];
                    prod[i] *= p;
                    m = match m.checked_add(p) {
                        Some(v) => v,
                        None => break,
                    };
                }
                if let Some(p2) = p.checked_mul(p) {
                    let mut m = lo.div_ceil(p2).saturating_mul(p2);
                    while m < hi {
                        mu[(m - lo) as usize] = 0;
                        m = match m.checked_add(p2) {
                            Some(v) => v,
                            None => break,
                        };
                    }
                }
            }
            if let Some(lambda) = lambda.as_mut() {
                let lp = (p as f64).ln();
                let mut q = p.checked_mul(p);
                while let Some(pk) = q {
                    if pk >= hi {
                        break;
                    }
                    if pk >= lo {
                        lambda[(pk - lo) as usize] = lp;
                    }
                    q = pk.checked_mul(p);
                }
            }
        });

        if let (Some(mu), Some(prod)) = (mu.as_mut(), prod.as_ref()) {
            for (i, (m, &pr)) in mu.iter_mut().zip(prod).enumerate() {
                if *m != 0 && pr != lo + i as u64 {
                    *m = -*m;
                }
            }
        }

        let mut seg = Self { lo, hi, odd_lo, flags, mu, lambda: None };
        if let Some(mut lambda) = lambda {
            for p in seg.primes() {
                lambda[(p - lo) as usize] = (p as f64).ln();
            }
            seg.lambda = Some(lambda);
        }
        seg
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }

    /// Primality of `n`, which must lie in the block.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n >= self.lo && n < self.hi, "{n} outside block [{}, {})", self.lo, self.hi);
        if n.is_multiple_of(2) {
            return n == 2;
        }
        let i = ((n - self.odd_lo) / 2) as usize;
        self.flags[i / 64] >> (i % 64) & 1 == 1
    }

    /// Primes of the block in ascending order.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        let two = (self.lo <= 2 && 2 < self.hi).then_some(2u64);
        let odd_lo = self.odd_lo;
        two.into_iter().chain(
            self.flags
                .iter()
                .enumerate()
                .flat_map(move |(w, &word)| BitIter(word).map(move |b| odd_lo + 2 * (64 * w as u64 + b as u64))),
        )
    }

    pub fn prime_count(&self) -> u64 {
        let two = (self.lo <= 2 && 2 < self.hi) as u64;
        two + self.flags.iter().map(|w| w.count_ones() as u64).sum::<u64>()
    }

    pub fn mu_table(&self) -> Option<&[i8]> {
        self.mu.as_deref()
    }

    pub fn lambda_table(&self) -> Option<&[f64]> {
        self.lambda.as_deref()
    }

    pub fn mu(&self, n: u64) -> Option<i8> {
        self.mu.as_ref().map(|t| t[(n - self.lo) as usize])
    }

    pub fn lambda(&self, n: u64) -> Option<f64> {
        self.lambda.as_ref().map(|t| t[(n - self.lo) as usize])
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    #[inline]
    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

pub(crate) fn validate_range(lo: u64, hi: u64, min_lo: u64) -> Result<()> {
    if lo < min_lo {
        return Err(LabError::InvalidRange {
            lo,
            hi,
            reason: if min_lo == 2 { "lower end must be at least 2" } else { "lower end must be at least 1" },
        });
    }
    if hi <= lo {
        return Err(LabError::InvalidRange { lo, hi, reason: "upper end must exceed lower end" });
    }
    if hi > MAX_HI {
        return Err(LabError::InvalidRange { lo, hi, reason: "upper end exceeds 2^63" });
    }
    Ok(())
}

/// Sieve `[lo, hi)` block by block and map every block through `f`.
/// Outputs come back in block order.
pub fn segment_map<R, F>(lo: u64, hi: u64, cfg: &SieveConfig, tables: Tables, f: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&PrimeSegment) -> R + Sync + Send,
{
    validate_range(lo, hi, 2)?;
    let base = BasePrimes::for_hi(hi);
    let blocks = cfg.blocks(lo, hi);
    Ok(par::map(&blocks, |&(a, b)| f(&PrimeSegment::build_with(a, b, &base, tables))))
}

/// Primes in `[lo, hi)`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Result<Vec<u64>> {
    primes_in_with(lo, hi, &SieveConfig::default())
}

pub fn primes_in_with(lo: u64, hi: u64, cfg: &SieveConfig) -> Result<Vec<u64>> {
    let parts = segment_map(lo, hi, cfg, Tables::NONE, |seg| seg.primes().collect::<Vec<_>>())?;
    Ok(parts.concat())
}

/// μ(n) for `n` in `[lo, hi)`, `lo >= 1`.
pub fn mobius_range(lo: u64, hi: u64) -> Result<Vec<i8>> {
    validate_range(lo, hi, 1)?;
    let mut out = Vec::with_capacity((hi - lo) as usize);
    if lo == 1 {
        out.push(1);
    }
    let start = lo.max(2);
    if start < hi {
        let parts = segment_map(start, hi, &SieveConfig::default(), Tables::MU, |seg| {
            seg.mu_table().expect("mu requested").to_vec()
        })?;
        parts.into_iter().for_each(|p| out.extend(p));
    }
    Ok(out)
}

/// Λ(n) for `n` in `[lo, hi)`, `lo >= 1`; natural logarithms.
pub fn mangoldt_range(lo: u64, hi: u64) -> Result<Vec<f64>> {
    validate_range(lo, hi, 1)?;
    let mut out = Vec::with_capacity((hi - lo) as usize);
    if lo == 1 {
        out.push(0.0);
    }
    let start = lo.max(2);
    if start < hi {
        let parts = segment_map(start, hi, &SieveConfig::default(), Tables::LAMBDA, |seg| {
            seg.lambda_table().expect("lambda requested").to_vec()
        })?;
        parts.into_iter().for_each(|p| out.extend(p));
    }
    Ok(out)
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality for every 64-bit integer.
///
/// Miller–Rabin with the first twelve primes as witnesses, which has no
/// strong pseudoprimes below 3.3 * 10^24.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let s = (n - 1).trailing_zeros();
    'witness: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    fn factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            if k > 0 {
                out.push((d, k));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn naive_mu(n: u64) -> i8 {
        let f = factor(n);
        if f.iter().any(|&(_, k)| k > 1) {
            0
        } else if f.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    fn naive_lambda(n: u64) -> f64 {
        match factor(n).as_slice() {
            [(p, _)] => (*p as f64).ln(),
            _ => 0.0,
        }
    }

    #[test]
    fn primes_in_examples() {
        assert_eq!(primes_in(11, 31).unwrap(), vec![11, 13, 17, 19, 23, 29]);
        assert_eq!(primes_in(2, 3).unwrap(), vec![2]);
        assert!(primes_in(24, 29).unwrap().is_empty());
    }

    #[test]
    fn inverted_range_is_rejected() {
        let err = primes_in(31, 11).unwrap_err();
        assert!(matches!(err, LabError::InvalidRange { lo: 31, hi: 11, .. }));
        assert!(err.to_string().contains("[31, 11)"));
        assert!(primes_in(1, 10).is_err());
        assert!(primes_in(2, MAX_HI + 1).is_err());
        assert!(mobius_range(0, 3).is_err());
    }

    #[test]
    fn mobius_examples() {
        let mu = mobius_range(1, 31).unwrap();
        assert_eq!(mu[0], 1);
        assert_eq!(mu[4 - 1], 0);
        assert_eq!(mu[10 - 1], 1);
        assert_eq!(mu[30 - 1], -1);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn mangoldt_examples() {
        let l = mangoldt_range(1, 10).unwrap();
        assert_eq!(l[0], 0.0);
        assert!((l[8 - 1] - 0.693147).abs() < 1e-6);
        assert_eq!(l[6 - 1], 0.0);
        assert!((l[9 - 1] - 1.098612).abs() < 1e-6);
    }

    #[test]
    fn is_prime_examples() {
        assert!(is_prime(2));
        assert!(!is_prime(561));
        assert!(is_prime((1 << 31) - 1));
        assert!(trial_prime((1 << 31) - 1));
        assert!(!is_prime(0) && !is_prime(1));
        // largest prime below 2^64
        assert!(is_prime(18_446_744_073_709_551_557));
        // strong pseudoprime to bases 2..=37 except the full set
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(!is_prime(4_294_967_297));
    }

    #[test]
    fn cross_oracle_to_1e5() {
        let n = 100_000u64;
        let primes = primes_in(2, n + 1).unwrap();
        let naive: Vec<u64> = (2..=n).filter(|&k| trial_prime(k)).collect();
        assert_eq!(primes, naive);
        let mu = mobius_range(1, n + 1).unwrap();
        let lam = mangoldt_range(1, n + 1).unwrap();
        for k in 1..=n {
            assert_eq!(mu[(k - 1) as usize], naive_mu(k), "mu({k})");
            assert_eq!(lam[(k - 1) as usize], naive_lambda(k), "lambda({k})");
            assert_eq!(is_prime(k), trial_prime(k), "is_prime({k})");
        }
    }

    #[test]
    fn small_segments_partition_consistently() {
        let cfg = SieveConfig::new(128).unwrap();
        let a = primes_in_with(2, 50_000, &cfg).unwrap();
        let b = primes_in(2, 50_000).unwrap();
        assert_eq!(a, b);
        assert!(SieveConfig::new(100).is_err());
    }

    #[test]
    fn segment_near_2_pow_63() {
        let hi = MAX_HI;
        let lo = hi - 1000;
        let ps = primes_in(lo, hi).unwrap();
        let expect: Vec<u64> = (lo..hi).filter(|&n| is_prime(n)).collect();
        assert_eq!(ps, expect);
        assert!(!ps.is_empty());
    }

    #[test]
    fn segment_build_checks_size() {
        let cfg = SieveConfig::new(128).unwrap();
        assert!(PrimeSegment::build(2, 1000, &cfg, Tables::NONE).is_err());
        let seg = PrimeSegment::build(128, 256, &cfg, Tables::ALL).unwrap();
        assert_eq!(seg.prime_count(), seg.primes().count() as u64);
        assert!(seg.is_prime(131));
        assert_eq!(seg.mu(130), Some(-1));
        assert_eq!(seg.lambda(243), Some(3f64.ln()));
    }
}
