//! Prime counting: segmented accumulation, Legendre's partial-sieve formula,
//! short intervals, arithmetic progressions and the Brun–Titchmarsh bound.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{invalid, LabError, Result};
use crate::grid::isqrt;
use crate::scan::{self, Fields};
use crate::sieve::{segment_map, SieveConfig, Tables, MAX_HI};

/// π at one point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PiCheckpoint {
    pub x: u64,
    pub pi: u64,
}

/// Number of primes `<= x`.
pub fn pi(x: u64) -> u64 {
    scan::tally(x, Fields::PI).pi
}

/// π at every point of an ascending grid, in one pass.
pub fn pi_many(xs: &[u64]) -> Result<Vec<PiCheckpoint>> {
    let t = scan::tally_at(xs, Fields::PI)?;
    Ok(xs.iter().zip(t).map(|(&x, t)| PiCheckpoint { x, pi: t.pi }).collect())
}

/// Primorial depth of the wheel used for small `a` in φ(x, a).
const WHEEL_DEPTH: usize = 6;
/// Memoize φ(y, a) for arguments below this bound.
const MEMO_LIMIT: u64 = 1 << 16;

/// Legendre's partial-sieve function φ(y, a): the count of `1 <= n <= y`
/// with no prime factor among the first `a` primes.
struct Legendre {
    primes: Vec<u64>,
    wheel_mod: u64,
    wheel: Vec<u32>,
    memo: HashMap<(u64, usize), u64>,
}

impl Legendre {
    fn new(primes: Vec<u64>) -> Self {
        let depth = WHEEL_DEPTH.min(primes.len());
        let wheel_mod: u64 = primes[..depth].iter().product();
        // wheel[r] = #{1 <= n <= r : gcd(n, wheel_mod) = 1}
        let mut wheel = Vec::with_capacity(wheel_mod as usize + 1);
        let mut c = 0u32;
        wheel.push(0);
        for n in 1..=wheel_mod {
            if primes[..depth].iter().all(|&p| n % p != 0) {
                c += 1;
            }
            wheel.push(c);
        }
        Self { primes, wheel_mod, wheel, memo: HashMap::new() }
    }

    fn depth(&self) -> usize {
        WHEEL_DEPTH.min(self.primes.len())
    }

    fn phi(&mut self, y: u64, a: usize) -> u64 {
        if y == 0 {
            return 0;
        }
        if a == 0 {
            return y;
        }
        // Every 2..=y has a prime factor <= y <= p_a.
        if y <= self.primes[a - 1] {
            return 1;
        }
        if a <= self.depth() {
            let m = self.wheel_mod;
            let full = self.wheel[m as usize] as u64;
            // the wheel counts against all `depth` primes; only valid at a == depth
            if a == self.depth() {
                return (y / m) * full + self.wheel[(y % m) as usize] as u64;
            }
            return self.phi(y, a - 1) - self.phi(y / self.primes[a - 1], a - 1);
        }
        if y < MEMO_LIMIT {
            if let Some(&v) = self.memo.get(&(y, a)) {
                return v;
            }
        }
        // φ(y, a) = φ(y, c) - Σ_{i=c+1..a} φ(y / p_i, i - 1)
        let c = self.depth();
        let mut total = self.phi(y, c) as i64;
        for i in c + 1..=a {
            let p = self.primes[i - 1];
            let q = y / p;
            if q <= self.primes[i - 2] {
                // From here on every term is 1 while p_i <= y, then 0.
                let last = self.primes[..a].partition_point(|&r| r <= y);
                total -= last.saturating_sub(i - 1) as i64;
                break;
            }
            total -= self.phi(q, i - 1) as i64;
        }
        let v = total as u64;
        if y < MEMO_LIMIT {
            self.memo.insert((y, a), v);
        }
        v
    }
}

/// π(x) by Legendre's formula `π(x) = φ(x, a) + a - 1`, `a = π(√x)`.
///
/// Only the primes up to `√x` are sieved; the count above `√x` comes from
/// the φ recursion alone.
pub fn pi_legendre(x: u64) -> Result<u64> {
    if x < 4 {
        return Err(invalid("x", format!("Legendre's formula needs x >= 4, got {x}")));
    }
    let root = isqrt(x);
    let primes = crate::sieve::primes_in(2, root + 1)?;
    let a = primes.len();
    let mut phi = Legendre::new(primes);
    Ok(phi.phi(x, a) + a as u64 - 1)
}

/// π(x + y) − π(x), sieving only `(x, x + y]`.
pub fn pi_interval(x: u64, y: u64) -> Result<u64> {
    if y == 0 {
        return Err(invalid("y", "interval length must be at least 1"));
    }
    if x < 2 {
        return Err(invalid("x", format!("interval start must be at least 2, got {x}")));
    }
    let hi = x.checked_add(y).and_then(|v| v.checked_add(1)).filter(|&v| v <= MAX_HI);
    let hi = hi.ok_or(LabError::InvalidRange { lo: x, hi: u64::MAX, reason: "x + y exceeds 2^63" })?;
    let counts = segment_map(x + 1, hi, &SieveConfig::default(), Tables::NONE, |s| s.prime_count())?;
    Ok(counts.iter().sum())
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn check_progression(q: u64, a: u64) -> Result<()> {
    if q == 0 {
        return Err(invalid("q", "modulus must be at least 1"));
    }
    if a >= q {
        return Err(invalid("a", format!("residue {a} must be below the modulus {q}")));
    }
    if gcd(a, q) != 1 {
        return Err(LabError::NotCoprime { q, a });
    }
    Ok(())
}

/// Primes `p <= x` with `p ≡ a (mod q)`, ascending.
pub fn primes_ap(x: u64, q: u64, a: u64) -> Result<Vec<u64>> {
    check_progression(q, a)?;
    if x < 2 {
        return Ok(Vec::new());
    }
    let parts = segment_map(2, x + 1, &SieveConfig::default(), Tables::NONE, |s| {
        s.primes().filter(|p| p % q == a).collect::<Vec<_>>()
    })?;
    Ok(parts.concat())
}

/// π(x; q, a).
pub fn pi_ap(x: u64, q: u64, a: u64) -> Result<u64> {
    check_progression(q, a)?;
    if x < 2 {
        return Ok(0);
    }
    let counts = segment_map(2, x + 1, &SieveConfig::default(), Tables::NONE, |s| {
        s.primes().filter(|p| p % q == a).count() as u64
    })?;
    Ok(counts.iter().sum())
}

/// Outcome of comparing a short-interval count with `2y / (log y + 3.53)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrunTitchmarsh {
    pub x: u64,
    pub y: u64,
    pub count: u64,
    pub bound: f64,
    pub satisfied: bool,
}

/// Brun–Titchmarsh check on `(x, x + y]`. A miss is reported, not raised:
/// the inequality is only claimed beyond an unspecified `x0`.
pub fn brun_titchmarsh_ratio(x: u64, y: u64) -> Result<BrunTitchmarsh> {
    if y < 2 {
        return Err(invalid("y", format!("need y >= 2, got {y}")));
    }
    let count = pi_interval(x, y)?;
    let yf = y as f64;
    let bound = 2.0 * yf / (yf.ln() + 3.53);
    Ok(BrunTitchmarsh { x, y, count, bound, satisfied: count as f64 <= bound })
}

/// Smallest scanned `x` from which a condition holds at every later scanned
/// point; `None` if it fails at the last point.
pub fn persistent_onset(rows: &[(u64, bool)]) -> Option<u64> {
    let mut onset = None;
    for &(x, ok) in rows.iter().rev() {
        if !ok {
            break;
        }
        onset = Some(x);
    }
    onset
}
