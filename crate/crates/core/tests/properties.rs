use primelab::chebyshev;
use primelab::counting;
use primelab::errorfit::{self, ENVELOPE_EXPONENT};
use primelab::logint::{self, ComplexValue, QuadratureSpec};
use primelab::mertens;
use primelab::scan::{self, Fields};
use primelab::shortint;
use primelab::sieve::{self, SieveConfig};
use proptest::prelude::*;

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
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

fn naive_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn primes_over_any_partition_concatenate(
        lo in 0u64..2_000_000,
        len in 1u64..400_000,
        cuts in proptest::collection::vec(0.0f64..1.0, 0..6),
    ) {
        let hi = lo + len;
        let mut points: Vec<u64> = cuts.iter().map(|c| lo + (c * len as f64) as u64).collect();
        points.extend([lo, hi]);
        points.sort_unstable();
        let parts: Vec<u64> = points
            .windows(2)
            .flat_map(|w| sieve::primes_in(w[0], w[1]).unwrap())
            .collect();
        prop_assert_eq!(parts, sieve::primes_in(lo, hi).unwrap());
    }

    #[test]
    fn segment_size_does_not_change_results(lo in 0u64..5_000_000, len in 1u64..300_000, k in 1u64..64) {
        let cfg = SieveConfig::new(128 * k).unwrap();
        prop_assert_eq!(
            sieve::primes_in_with(lo, lo + len, &cfg).unwrap(),
            sieve::primes_in(lo, lo + len).unwrap()
        );
        let x = lo + len;
        let a = scan::tally_at_with(&[x], Fields::ALL, &cfg).unwrap()[0];
        let b = scan::tally(x, Fields::ALL);
        prop_assert_eq!((a.pi, a.mertens, a.squarefree), (b.pi, b.mertens, b.squarefree));
        prop_assert!(rel(a.psi(), b.psi()) <= 1e-12);
    }

    #[test]
    fn sieve_tables_match_trial_division(lo in 1u64..100_000, len in 1u64..400) {
        let hi = (lo + len).min(100_001);
        let mu = sieve::mobius_range(lo, hi).unwrap();
        let lambda = sieve::mangoldt_range(lo, hi).unwrap();
        for (i, n) in (lo..hi).enumerate() {
            prop_assert_eq!(sieve::is_prime(n), naive_prime(n), "n = {}", n);
            prop_assert_eq!(mu[i], naive_mu(n), "n = {}", n);
            prop_assert!((lambda[i] - naive_lambda(n)).abs() < 1e-15, "n = {}", n);
        }
    }

    #[test]
    fn mertens_matches_naive_sum(x in 1u64..100_000) {
        let naive: i64 = (1..=x).map(|n| naive_mu(n) as i64).sum();
        prop_assert_eq!(mertens::mertens(x).unwrap(), naive);
    }

    #[test]
    fn interval_counts_are_differences(x in 2u64..50_000_000, y in 1u64..200_000) {
        let v = counting::pi_interval(x, y).unwrap();
        prop_assert_eq!(v, counting::pi(x + y) - counting::pi(x));
        let stat = shortint::interval_stat(x, y).unwrap();
        prop_assert_eq!(stat.count, v);
    }

    #[test]
    fn progression_counts_partition_the_primes(x in 0u64..1_000_000, qi in 0usize..4) {
        let q = [3u64, 4, 5, 8][qi];
        let total: u64 = (0..q)
            .filter(|&a| factor(q).iter().all(|&(p, _)| a % p != 0))
            .map(|a| counting::pi_ap(x, q, a).unwrap())
            .sum();
        let dividing = factor(q).iter().filter(|&&(p, _)| p <= x).count() as u64;
        prop_assert_eq!(total, counting::pi(x) - dividing);
    }

    #[test]
    fn pi_is_nondecreasing(a in 0u64..5_000_000, d in 0u64..100_000) {
        prop_assert!(counting::pi(a) <= counting::pi(a + d));
    }

    #[test]
    fn mobius_and_mangoldt_sums_match_chebyshev(x in 2u64..1_000_000) {
        let lambda = sieve::mangoldt_range(1, x + 1).unwrap();
        prop_assert!(rel(primelab::sum::sum(lambda), chebyshev::psi(x)) <= 1e-9);
    }

    #[test]
    fn ei_conjugate_symmetry(re in -60.0f64..60.0, im in -60.0f64..60.0) {
        prop_assume!(re.hypot(im) > 1e-3);
        let z = ComplexValue::new(re, im);
        let a = logint::ei(z).unwrap();
        let b = logint::ei(z.conj()).unwrap();
        prop_assert!((a.conj() - b).norm() <= 1e-13 * a.norm().max(1e-300));
    }

    #[test]
    fn li_routes_agree(e in 2.5f64.ln()..1e8f64.ln()) {
        let v = logint::li_both(e.exp(), &QuadratureSpec::default()).unwrap();
        prop_assert!(v.rel_disagreement() <= 1e-10, "x = {}: {:?}", e.exp(), v);
    }

    #[test]
    fn weighted_prime_power_count_dominates_pi(x in 2u64..2_000_000) {
        let r = logint::mangoldt_log_sum(x).unwrap();
        prop_assert!(r.lhs - counting::pi(x) as f64 >= -1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn legendre_matches_sieve(x in 4u64..100_000_000) {
        prop_assert_eq!(counting::pi_legendre(x).unwrap(), counting::pi(x));
    }

    #[test]
    fn prime_number_theorem_band(x in 1_000u64..100_000_000) {
        let r = counting::pi(x) as f64 * (x as f64).ln() / x as f64;
        prop_assert!((0.8..=1.3).contains(&r), "x = {}: {}", x, r);
    }

    #[test]
    fn chebyshev_bands(x in 10_000u64..100_000_000) {
        let t = chebyshev::theta(x);
        let p = chebyshev::psi(x);
        let xf = x as f64;
        prop_assert!((0.8..=1.1).contains(&(t / xf)), "θ(x)/x = {}", t / xf);
        let d = (p - t) / xf.sqrt();
        prop_assert!((0.8..=1.5).contains(&d), "(ψ − θ)/√x = {}", d);
        prop_assert!(rel(p, chebyshev::psi_theta_series(x)) <= 1e-9);
    }

    #[test]
    fn squarefree_envelope(x in 100u64..100_000_000) {
        let q = mertens::squarefree_count(x).unwrap() as f64;
        let xf = x as f64;
        prop_assert!((q - mertens::squarefree_density() * xf).abs() <= 2.0 * xf.sqrt());
    }

    #[test]
    fn error_rows_are_consistent(x in 10u64..100_000_000) {
        let p = errorfit::build_profile(&[x], &QuadratureSpec::default()).unwrap();
        let r = p.rows[0];
        let e_quad = r.pi as f64 - r.li_quadrature;
        prop_assert!((e_quad - r.e_pi).abs() < 1e-6);
        if let Some(eps) = r.eps_eff_pi {
            prop_assert!(eps < ENVELOPE_EXPONENT, "x = {}: eps_eff = {}", x, eps);
        }
    }
}

#[test]
fn psi_minus_theta_nonnegative_everywhere_small() {
    for x in 0..5_000 {
        assert!(chebyshev::psi_minus_theta(x) >= 0.0);
    }
}

#[test]
fn mobius_divisor_sums_are_indicator() {
    let s = mertens::mobius_divisor_sums(10_000).unwrap();
    assert_eq!(s[0], 1);
    assert!(s[1..].iter().all(|&v| v == 0));
}
