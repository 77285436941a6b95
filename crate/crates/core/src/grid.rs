//! Deterministic sample grids.

/// `n` integer points log-spaced over `[lo, hi]`, both ends included,
/// deduplicated and ascending.
pub fn log_grid(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    assert!(lo >= 1 && hi >= lo, "log_grid needs 1 <= lo <= hi");
    if n <= 1 || lo == hi {
        return vec![lo];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<u64> = (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                let t = i as f64 / (n - 1) as f64;
                ((a + (b - a) * t).exp().round() as u64).clamp(lo, hi)
            }
        })
        .collect();
    out.dedup();
    out
}

/// Van der Corput radical inverse in base 2; a low-discrepancy sequence in [0, 1).
pub fn van_der_corput(mut i: u64) -> f64 {
    let mut inv = 0.5;
    let mut out = 0.0;
    while i > 0 {
        if i & 1 == 1 {
            out += inv;
        }
        inv *= 0.5;
        i >>= 1;
    }
    out
}

/// Largest `r` with `r^k <= n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64) as u64;
    while r > 0 && pow_exceeds(r, k, n) {
        r -= 1;
    }
    while !pow_exceeds(r + 1, k, n) {
        r += 1;
    }
    r
}

pub fn isqrt(n: u64) -> u64 {
    iroot(n, 2)
}

fn pow_exceeds(r: u64, k: u32, n: u64) -> bool {
    match r.checked_pow(k) {
        Some(v) => v > n,
        None => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_and_order() {
        let g = log_grid(10, 100_000_000, 400);
        assert_eq!(g[0], 10);
        assert_eq!(*g.last().unwrap(), 100_000_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn roots() {
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(100), 10);
        assert_eq!(iroot(1000, 3), 10);
        assert_eq!(iroot(999, 3), 9);
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
        assert_eq!(iroot(1 << 62, 62), 2);
    }

    #[test]
    fn vdc_first_terms() {
        assert_eq!(van_der_corput(1), 0.5);
        assert_eq!(van_der_corput(2), 0.25);
        assert_eq!(van_der_corput(3), 0.75);
    }
}
