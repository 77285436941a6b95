use std::path::PathBuf;

use primelab::chebyshev;
use primelab::counting;
use primelab::errorfit::{self, EnvelopeConfig};
use primelab::explicit::{self, RiemannTerms, ZeroList};
use primelab::grid::log_grid;
use primelab::logint::{self, ComplexValue, EiConfig, QuadratureSpec};
use primelab::mertens;
use primelab::report::{Cell, Table, ToTable};
use primelab::shortint::{self, DensityOptions, YRule};
use primelab::sieve;
use primelab::LabError;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

/// Largest `bound_ratio` accepted by `li --envelope`.
pub const INTEGRAL_ENVELOPE_LIMIT: f64 = 10.0;
/// Largest relative discrepancy accepted by `convert`.
pub const CONVERSION_TOLERANCE: f64 = 1e-9;
/// Largest `|shadow − 6/π²|` accepted by `mertens --zeta-shadow`.
pub const ZETA_SHADOW_TOLERANCE: f64 = 1e-3;

#[derive(Debug)]
pub enum Failure {
    /// Bad flag combination or value, caught before any library call.
    Usage(String),
    /// Rejected input or unreadable data.
    Data(LabError),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Data(e)
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

/// What a subcommand produced.
#[derive(Debug)]
pub struct Outcome {
    /// Name of the library operation that ran.
    pub operation: &'static str,
    /// Bare value printed to stdout when no output file is given.
    pub scalar: Option<String>,
    pub table: Table,
    pub result: Value,
    /// Set when a check-style subcommand found its assertion false.
    pub violation: Option<String>,
}

impl Outcome {
    fn new(operation: &'static str, table: Table, result: impl Serialize) -> Self {
        let result = serde_json::to_value(result).expect("reports serialize");
        Self { operation, scalar: None, table, result, violation: None }
    }

    fn scalar(mut self, s: impl ToString) -> Self {
        self.scalar = Some(s.to_string());
        self
    }

    fn check(mut self, ok: bool, msg: impl FnOnce() -> String) -> Self {
        if !ok {
            self.violation = Some(msg());
        }
        self
    }
}

fn single(operation: &'static str, columns: &[&'static str], row: Vec<Cell>) -> Outcome {
    let mut t = Table::new(columns);
    let obj: serde_json::Map<String, Value> = columns
        .iter()
        .zip(&row)
        .map(|(c, v)| (c.to_string(), serde_json::to_value(v).expect("cells serialize")))
        .collect();
    t.push(row);
    Outcome::new(operation, t, obj)
}

fn float(v: f64) -> String {
    Cell::Float(v).to_string()
}

fn pair(v: &[u64]) -> (u64, u64) {
    (v[0], v[1])
}

fn grid(v: &[u64]) -> Result<Vec<u64>, Failure> {
    let (lo, hi, n) = (v[0], v[1], v[2]);
    if lo > hi {
        return usage(format!("grid needs LO <= HI, got [{lo}, {hi}]"));
    }
    Ok(log_grid(lo, hi, n as usize))
}

fn quad_spec(q: &QuadArgs) -> Result<QuadratureSpec, Failure> {
    Ok(QuadratureSpec::new(q.abs_tol, q.rel_tol, q.max_depth)?)
}

/// Resolve the zero table: an explicit file first, then `--zeros` (or its
/// environment variable), then the bundled table.
pub fn zero_list(global: Option<&PathBuf>, local: Option<&PathBuf>) -> Result<ZeroList, Failure> {
    match local.or(global) {
        Some(p) => Ok(explicit::load_zeros(p)?),
        None => Ok(ZeroList::bundled()),
    }
}

fn progression(q: Option<u64>, a: Option<u64>) -> Result<(u64, u64), Failure> {
    match (q, a) {
        (Some(q), Some(a)) => Ok((q, a)),
        _ => usage("a progression needs both --q and --a"),
    }
}

fn table_of<T: Serialize>(
    columns: &[&'static str],
    rows: impl IntoIterator<Item = Vec<Cell>>,
    result: T,
    op: &'static str,
) -> Outcome {
    let mut t = Table::new(columns);
    for r in rows {
        t.push(r);
    }
    Outcome::new(op, t, result)
}

/// Run one parsed command.
pub fn dispatch(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Pi(a) => pi(a),
        Command::Theta(a) => theta(a),
        Command::Psi(a) => psi(a),
        Command::Mertens(a) => mertens_cmd(a),
        Command::Li(a) => li(a),
        Command::Convert(a) => convert(a),
        Command::Explicit(a) => explicit_cmd(a, cli.zeros.as_ref()),
        Command::Zeros(a) => zeros(a, cli.zeros.as_ref()),
        Command::ScanDensity(a) => scan_density(a),
        Command::ScanGap(a) => scan_gap(a),
        Command::ScanVariance(a) => scan_variance(a),
        Command::ProfileError(a) => profile_error(a),
        Command::FitEpsilon(a) => fit_epsilon(a),
    }
}

const PI_MODES: &str = "pi needs one of --x, --primes, --is-prime or --grid";

fn pi(a: &PiArgs) -> Result<Outcome, Failure> {
    let modes = [a.x.is_some(), a.primes.is_some(), a.is_prime.is_some(), a.grid.is_some()];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return usage(PI_MODES);
    }
    if [a.interval.is_some(), a.bt.is_some(), a.q.is_some()].iter().filter(|&&m| m).count() > 1 {
        return usage("--interval, --bt and --q are mutually exclusive");
    }
    if a.method == PiMethod::Legendre && (a.x.is_none() || a.interval.is_some() || a.bt.is_some() || a.q.is_some()) {
        return usage("--method legendre applies to a plain --x count");
    }
    if let Some(r) = &a.primes {
        let (lo, hi) = pair(r);
        let ps = sieve::primes_in(lo, hi)?;
        return Ok(table_of(&["p"], ps.iter().map(|&p| vec![p.into()]), &ps, "primes_in"));
    }
    if let Some(n) = a.is_prime {
        let v = sieve::is_prime(n);
        return Ok(single("is_prime", &["n", "is_prime"], vec![n.into(), v.into()]).scalar(v));
    }
    if let Some(g) = &a.grid {
        let rows = counting::pi_many(&grid(g)?)?;
        return Ok(table_of(&["x", "pi"], rows.iter().map(|r| vec![r.x.into(), r.pi.into()]), &rows, "pi"));
    }
    let x = a.x.expect("mode checked");
    if let Some(y) = a.interval {
        let v = counting::pi_interval(x, y)?;
        return Ok(single("pi_interval", &["x", "y", "count"], vec![x.into(), y.into(), v.into()]).scalar(v));
    }
    if let Some(y) = a.bt {
        let r = counting::brun_titchmarsh_ratio(x, y)?;
        let row = vec![r.x.into(), r.y.into(), r.count.into(), r.bound.into(), r.satisfied.into()];
        let mut t = Table::new(&["x", "y", "count", "bound", "satisfied"]);
        t.push(row);
        return Ok(Outcome::new("brun_titchmarsh_ratio", t, r));
    }
    if a.q.is_some() {
        let (q, r) = progression(a.q, a.a)?;
        let v = counting::pi_ap(x, q, r)?;
        return Ok(single("pi_ap", &["x", "q", "a", "pi"], vec![x.into(), q.into(), r.into(), v.into()]).scalar(v));
    }
    match a.method {
        PiMethod::Sieve => {
            let v = counting::pi(x);
            Ok(single("pi", &["x", "pi"], vec![x.into(), v.into()]).scalar(v))
        }
        PiMethod::Legendre => {
            let v = counting::pi_legendre(x)?;
            Ok(single("pi_legendre", &["x", "pi"], vec![x.into(), v.into()]).scalar(v))
        }
    }
}

fn theta(a: &ThetaArgs) -> Result<Outcome, Failure> {
    match (a.x, &a.grid) {
        (Some(_), Some(_)) | (None, None) => usage("theta needs exactly one of --x or --grid"),
        (None, Some(g)) => {
            let p = chebyshev::profile(&grid(g)?)?;
            Ok(Outcome::new("theta", p.to_table(), &p))
        }
        (Some(x), None) if a.q.is_some() => {
            let (q, r) = progression(a.q, a.a)?;
            let v = chebyshev::theta_ap(x, q, r)?;
            Ok(single("theta_ap", &["x", "q", "a", "theta"], vec![x.into(), q.into(), r.into(), v.into()])
                .scalar(float(v)))
        }
        (Some(x), None) => {
            let v = chebyshev::theta(x);
            Ok(single("theta", &["x", "theta"], vec![x.into(), v.into()]).scalar(float(v)))
        }
    }
}

fn psi(a: &PsiArgs) -> Result<Outcome, Failure> {
    let modes = [a.x.is_some(), a.sign_changes.is_some(), a.lambda.is_some()];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return usage("psi needs one of --x, --sign-changes or --lambda");
    }
    if let Some(s) = &a.sign_changes {
        let r = chebyshev::sign_change_scan(s[0], s[1], s[2])?;
        return Ok(Outcome::new("sign_change_scan", r.to_table(), &r));
    }
    if let Some(r) = &a.lambda {
        let (lo, hi) = pair(r);
        let l = sieve::mangoldt_range(lo, hi)?;
        let rows = l.iter().enumerate().map(|(i, &v)| vec![(lo + i as u64).into(), v.into()]);
        return Ok(table_of(&["n", "lambda"], rows, &l, "mangoldt_range"));
    }
    let x = a.x.expect("mode checked");
    if a.minus_theta {
        let v = chebyshev::psi_minus_theta(x);
        return Ok(single("psi_minus_theta", &["x", "psi_minus_theta"], vec![x.into(), v.into()]).scalar(float(v)));
    }
    let v = if a.series { chebyshev::psi_theta_series(x) } else { chebyshev::psi(x) };
    Ok(single("psi", &["x", "psi"], vec![x.into(), v.into()]).scalar(float(v)))
}

fn mertens_cmd(a: &MertensArgs) -> Result<Outcome, Failure> {
    let modes = [
        a.x.is_some(),
        a.envelope.is_some(),
        a.grid.is_some(),
        a.mu.is_some(),
        a.check_all.is_some(),
        a.zeta_shadow.is_some(),
    ];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return usage("mertens needs one of --x, --envelope, --grid, --mu, --check-all or --zeta-shadow");
    }
    if let Some(x) = a.x {
        return Ok(if a.squarefree {
            let v = mertens::squarefree_count(x)?;
            single("squarefree_count", &["x", "Q"], vec![x.into(), v.into()]).scalar(v)
        } else {
            let v = mertens::mertens(x)?;
            single("mertens", &["x", "M"], vec![x.into(), v.into()]).scalar(v)
        });
    }
    if let Some(g) = &a.envelope {
        let e = mertens::mertens_envelope(&grid(g)?)?;
        let n = e.violations.len();
        let first = e.violations.first().copied();
        return Ok(Outcome::new("mertens_envelope", e.to_table(), &e)
            .check(n == 0, || format!("|M(x)| > x^(7/12) at {n} grid points, first x = {}", first.unwrap_or(0))));
    }
    if let Some(g) = &a.grid {
        let p = mertens::profile(&grid(g)?)?;
        return Ok(Outcome::new("mertens_profile", p.to_table(), &p));
    }
    if let Some(r) = &a.mu {
        let (lo, hi) = pair(r);
        let mu = sieve::mobius_range(lo, hi)?;
        let rows = mu.iter().enumerate().map(|(i, &v)| vec![(lo + i as u64).into(), (v as i64).into()]);
        return Ok(table_of(&["n", "mu"], rows, &mu, "mobius_range"));
    }
    if let Some(limit) = a.check_all {
        let c = mertens::streaming_check(limit)?;
        let cols =
            ["limit", "m_violations", "max_m_ratio", "max_m_ratio_at", "q_violations", "max_q_ratio", "max_q_ratio_at"];
        let row = vec![
            c.limit.into(),
            c.m_violations.into(),
            c.max_m_ratio.into(),
            c.max_m_ratio_at.into(),
            c.q_violations.into(),
            c.max_q_ratio.into(),
            c.max_q_ratio_at.into(),
        ];
        let mut t = Table::new(&cols);
        t.push(row);
        let ok = c.holds();
        let msg = format!("{} M violations, {} Q violations up to {}", c.m_violations, c.q_violations, c.limit);
        return Ok(Outcome::new("mertens_streaming_check", t, &c).check(ok, || msg));
    }
    let n = a.zeta_shadow.expect("mode checked");
    let v = mertens::inverse_zeta2_shadow(n)?;
    let target = mertens::squarefree_density();
    let diff = (v - target).abs();
    Ok(single(
        "inverse_zeta2_shadow",
        &["n", "shadow", "six_over_pi_sq", "abs_diff"],
        vec![n.into(), v.into(), target.into(), diff.into()],
    )
    .scalar(float(v))
    .check(diff <= ZETA_SHADOW_TOLERANCE, || format!("|shadow − 6/π²| = {diff} exceeds {ZETA_SHADOW_TOLERANCE}")))
}

fn li(a: &LiArgs) -> Result<Outcome, Failure> {
    let modes = [a.x.is_some(), a.ei.is_some(), a.envelope.is_some()];
    if modes.iter().filter(|&&m| m).count() != 1 {
        return usage("li needs one of --x, --ei or --envelope");
    }
    if let Some(x) = a.x {
        let spec = quad_spec(&a.quad)?;
        let v = logint::li_both(x, &spec)?;
        let value = logint::li_with(x, &spec)?;
        let row =
            vec![x.into(), value.into(), v.quadrature.into(), v.quadrature_error.into(), v.rel_disagreement().into()];
        let mut t = Table::new(&["x", "li", "li_quadrature", "quadrature_error", "rel_disagreement"]);
        t.push(row);
        return Ok(Outcome::new("li", t, v).scalar(float(value)));
    }
    if let Some(z) = &a.ei {
        let cfg = EiConfig::new(a.radius)?;
        let z = ComplexValue::new(z[0], z[1]);
        let v = logint::ei_with(z, &cfg)?;
        let m = format!("{:?}", logint::method(z, &cfg));
        let mut t = Table::new(&["re", "im", "ei_re", "ei_im", "method"]);
        t.push(vec![z.re.into(), z.im.into(), v.re.into(), v.im.into(), Cell::Text(m.clone())]);
        let result = json!({"z": [z.re, z.im], "ei": [v.re, v.im], "method": m});
        return Ok(Outcome::new("ei", t, result).scalar(format!("{} {}", float(v.re), float(v.im))));
    }
    let e = a.envelope.as_ref().expect("mode checked");
    let r = logint::integral_envelope_check(e[0], e[1], e[2])?;
    let mut t = Table::new(&["nu", "C", "x", "integral", "scale", "bound_ratio"]);
    t.push(vec![r.nu.into(), r.c.into(), r.x.into(), r.integral.into(), r.scale.into(), r.bound_ratio.into()]);
    let ratio = r.bound_ratio;
    Ok(Outcome::new("integral_envelope_check", t, r)
        .scalar(float(ratio))
        .check(ratio <= INTEGRAL_ENVELOPE_LIMIT, || format!("bound ratio {ratio} exceeds {INTEGRAL_ENVELOPE_LIMIT}")))
}

fn convert(a: &ConvertArgs) -> Result<Outcome, Failure> {
    let (report, op) = match a.check {
        ConvertCheck::Primes => {
            if a.q.is_some() || a.a.is_some() {
                return usage("--check primes takes no progression");
            }
            (logint::conversion_check(a.x)?, "pi_from_theta+theta_from_pi+mangoldt_log_sum+reciprocal_prime_sum")
        }
        ConvertCheck::Progression => {
            let (q, r) = progression(a.q, a.a)?;
            (logint::ap_conversions(a.x, q, r)?, "ap_conversions")
        }
    };
    let mut t = Table::new(&["identity", "lhs", "rhs", "rel_discrepancy"]);
    for r in &report.rows {
        t.push(vec![Cell::Text(r.identity.to_string()), r.lhs.into(), r.rhs.into(), r.rel_discrepancy.into()]);
    }
    let worst = report.max_rel_discrepancy;
    Ok(Outcome::new(op, t, &report).scalar(float(worst)).check(worst <= CONVERSION_TOLERANCE, || {
        format!("max relative discrepancy {worst} exceeds {CONVERSION_TOLERANCE}")
    }))
}

fn explicit_cmd(a: &ExplicitArgs, zeros_path: Option<&PathBuf>) -> Result<Outcome, Failure> {
    let zeros = zero_list(zeros_path, None)?;
    let k = a.k.unwrap_or(zeros.len());
    if let Some(r) = &a.rms {
        let (lo, hi) = pair(r);
        let v = explicit::landau_rms(&zeros, k, lo, hi)?;
        let row = vec![lo.into(), hi.into(), (k as u64).into(), v.into()];
        return Ok(single("psi_landau", &["lo", "hi", "k", "rms"], row).scalar(float(v)));
    }
    let Some(x) = a.x else {
        return usage("explicit needs --x or --rms");
    };
    if a.pi {
        let mut terms = RiemannTerms::natural(x, &zeros);
        terms.k = k;
        if let Some(n) = a.n {
            terms.n = n;
        }
        terms.tails = !a.no_tails;
        let v = explicit::pi_riemann(x, &zeros, terms)?;
        let row = vec![x.into(), terms.n.into(), (k as u64).into(), terms.tails.into(), v.into()];
        return Ok(single("pi_riemann", &["x", "n", "k", "tails", "pi_riemann"], row).scalar(float(v)));
    }
    let v = explicit::psi_landau(x, &zeros, k)?;
    Ok(single("psi_landau", &["x", "k", "psi_landau"], vec![x.into(), (k as u64).into(), v.into()]).scalar(float(v)))
}

fn zeros(a: &ZerosArgs, global: Option<&PathBuf>) -> Result<Outcome, Failure> {
    let zeros = zero_list(global, a.file.as_ref())?;
    if a.check {
        let t = a.t.expect("clap requires T");
        let c = explicit::zero_count_check(&zeros, t)?;
        let row = vec![c.t.into(), (c.counted as u64).into(), c.main_term.into(), c.deviation.into(), c.within.into()];
        let mut tab = Table::new(&["T", "counted", "main_term", "deviation", "within"]);
        tab.push(row);
        let scalar = format!("counted {} vs main term {}", c.counted, float(c.main_term));
        let dev = c.deviation;
        return Ok(Outcome::new("zero_count_check", tab, c)
            .scalar(scalar)
            .check(c.within, || format!("|N(T) − main term| = {} exceeds 2 at T = {t}", dev.abs())));
    }
    if a.t.is_some() {
        return usage("--T needs --check");
    }
    let g = zeros.gammas();
    let result = json!({
        "source": zeros.source(),
        "count": zeros.len(),
        "height": zeros.height(),
        "first": &g[..g.len().min(3)],
    });
    let rows = g.iter().enumerate().map(|(i, &v)| vec![(i as u64 + 1).into(), v.into()]);
    Ok(table_of(&["index", "gamma"], rows, result, "load_zeros").scalar(zeros.len()))
}

/// Parses `fixed:Y`, `power:BETA` and `log-power:DELTA`.
pub fn parse_rule(s: &str) -> Result<YRule, Failure> {
    let bad = || Failure::Usage(format!("unknown interval rule `{s}`; use fixed:Y, power:BETA or log-power:DELTA"));
    let (kind, value) = s.split_once(':').ok_or_else(bad)?;
    match kind {
        "fixed" => Ok(YRule::Fixed(crate::args::count(value).map_err(|_| bad())?)),
        "power" => Ok(YRule::Power(value.parse().map_err(|_| bad())?)),
        "log-power" => Ok(YRule::LogPower(value.parse().map_err(|_| bad())?)),
        _ => Err(bad()),
    }
}

fn scan_density(a: &DensityArgs) -> Result<Outcome, Failure> {
    let g = a.grid;
    if let Some(delta) = a.maier {
        let r = shortint::maier_ratio_stats(delta, g.lo, g.hi, g.samples as usize)?;
        return Ok(Outcome::new("maier_ratio_stats", r.to_table(), &r));
    }
    let rule = parse_rule(&a.rule)?;
    let options =
        DensityOptions { band: (a.band[0], a.band[1]), almost_all: a.almost_all, allow_small_x: a.allow_small_x };
    let r = shortint::density_scan_with(g.lo, g.hi, g.samples as usize, rule, &options)?;
    let ok = !a.check || r.almost_all;
    let share = r.in_band_share;
    Ok(Outcome::new("density_scan", r.to_table(), &r)
        .check(ok, || format!("only {share} of ratios fall in [{}, {}]", options.band.0, options.band.1)))
}

fn scan_gap(a: &GapArgs) -> Result<Outcome, Failure> {
    if a.lo > a.hi {
        return usage(format!("need --lo <= --hi, got [{}, {}]", a.lo, a.hi));
    }
    let r = shortint::bhp_gap_check(&log_grid(a.lo, a.hi, a.samples as usize))?;
    let n = r.violations.len();
    let first = r.violations.first().copied();
    Ok(Outcome::new("bhp_gap_check", r.to_table(), &r)
        .check(n == 0, || format!("{n} intervals hold no prime, first x = {}", first.unwrap_or(0))))
}

fn scan_variance(a: &VarianceArgs) -> Result<Outcome, Failure> {
    if let Some(x) = a.increments {
        let ys = shortint::low_discrepancy_lengths(x, a.count as usize);
        let r = shortint::increment_deviation(x, &ys)?;
        let ratio = r.envelope_ratio;
        return Ok(Outcome::new("increment_deviation", r.to_table(), &r)
            .check(r.within, || format!("increment envelope ratio {ratio} exceeds {}", shortint::INCREMENT_ENVELOPE)));
    }
    let (Some(n), Some(y)) = (a.n, a.y) else {
        return usage("scan-variance needs --n and --y, or --increments");
    };
    let r = shortint::interval_variance(n, y, a.stride)?;
    let cols = ["n", "y", "stride", "samples", "empirical_mean", "empirical_variance", "predicted_variance", "ratio"];
    let row = vec![
        r.n.into(),
        r.y.into(),
        r.stride.into(),
        r.samples.into(),
        r.empirical_mean.into(),
        r.empirical_variance.into(),
        r.predicted_variance.into(),
        r.ratio.into(),
    ];
    let mut t = Table::new(&cols);
    t.push(row);
    Ok(Outcome::new("interval_variance", t, r).scalar(float(r.ratio)))
}

fn profile_grid(g: &ProfileGrid) -> Result<Vec<u64>, Failure> {
    if g.lo > g.hi {
        return usage(format!("need --lo <= --hi, got [{}, {}]", g.lo, g.hi));
    }
    Ok(log_grid(g.lo, g.hi, g.samples as usize))
}

fn profile_error(a: &ProfileArgs) -> Result<Outcome, Failure> {
    let p = errorfit::build_profile(&profile_grid(&a.grid)?, &quad_spec(&a.quad)?)?;
    if !a.envelope {
        return Ok(Outcome::new("build_profile", p.to_table(), &p));
    }
    let r = errorfit::envelope_report(&p, &EnvelopeConfig { c: a.c })?;
    let (np, nt) = (r.pi_violations.len(), r.theta_violations.len());
    let msg = format!(
        "x^(7/12) exceeded by |π − li| at {np} points (first {:?}) and by |θ − x| at {nt} points (first {:?})",
        r.pi_violations.first(),
        r.theta_violations.first()
    );
    Ok(Outcome::new("envelope_report", r.to_table(), &r).check(r.holds(), || msg))
}

fn fit_epsilon(a: &FitArgs) -> Result<Outcome, Failure> {
    let p = errorfit::build_profile(&profile_grid(&a.grid)?, &quad_spec(&a.quad)?)?;
    let f = errorfit::epsilon_fit(&p)?;
    Ok(Outcome::new("epsilon_fit", f.to_table(), &f))
}
