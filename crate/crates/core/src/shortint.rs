//! Short intervals `(x, x + y]`: prime density, gaps, the Brun–Titchmarsh
//! bound, fluctuations for `y = (log x)^δ`, the variance of ψ increments and
//! θ/ψ increment deviations.

use serde::Serialize;

use crate::counting::{brun_titchmarsh_ratio, persistent_onset, BrunTitchmarsh};
use crate::error::{invalid, Result};
use crate::grid::{log_grid, van_der_corput};
use crate::par;
use crate::report::{Table, ToTable};
use crate::scan::{self, Fields};
use crate::sieve::mangoldt_range;
use crate::sum::Neumaier;

/// Exponent of the gap interval `(x − x^{0.525}, x]`.
pub const BHP_EXPONENT: f64 = 0.525;
/// Upper end of the desk-scale scan range.
pub const SCAN_MAX: u64 = 100_000_000;
pub const SCAN_MIN: u64 = 1_000;

/// One interval `(x, x + y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalStat {
    pub x: u64,
    pub y: u64,
    pub count: u64,
    /// `count · log x / y`
    pub density_ratio: f64,
    pub theta_inc: f64,
    pub psi_inc: f64,
}

/// Count, θ and ψ increments on `(x, x + y]`.
pub fn interval_stat(x: u64, y: u64) -> Result<IntervalStat> {
    if x < 2 || y < 1 {
        return Err(invalid("interval", format!("need x >= 2 and y >= 1, got ({x}, {y})")));
    }
    let t = scan::tally_range(x + 1, x + y + 1, Fields::CHEBYSHEV)?;
    Ok(IntervalStat {
        x,
        y,
        count: t.pi,
        density_ratio: t.pi as f64 * (x as f64).ln() / y as f64,
        theta_inc: t.theta(),
        psi_inc: t.psi(),
    })
}

/// How the interval length follows `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "value", rename_all = "kebab-case")]
pub enum YRule {
    Fixed(u64),
    /// `y = ⌊x^β⌋`, `0 < β < 1`.
    Power(f64),
    /// `y = ⌊(log x)^δ⌋`, `δ > 1`.
    LogPower(f64),
}

impl YRule {
    fn validate(&self) -> Result<()> {
        match *self {
            YRule::Power(b) if !(b > 0.0 && b < 1.0) => Err(invalid("beta", format!("need 0 < β < 1, got {b}"))),
            YRule::LogPower(d) if !(d > 1.0 && d.is_finite()) => Err(invalid("delta", format!("need δ > 1, got {d}"))),
            _ => Ok(()),
        }
    }

    /// Interval length at `x`, before the `y >= 1` check.
    pub fn length(&self, x: u64) -> f64 {
        match *self {
            YRule::Fixed(y) => y as f64,
            YRule::Power(b) => (x as f64).powf(b).floor(),
            YRule::LogPower(d) => (x as f64).ln().powf(d).floor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Skip {
    pub x: u64,
    pub y: f64,
    pub reason: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Self> {
        let mut acc = Neumaier::new();
        let (mut min, mut max, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0);
        for v in values {
            acc.add(v);
            min = min.min(v);
            max = max.max(v);
            count += 1;
        }
        (count > 0).then(|| Summary { count, mean: acc.value() / count as f64, min, max })
    }
}

/// Knobs of [`density_scan_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityOptions {
    /// Ratio band a point must fall in.
    pub band: (f64, f64),
    /// Share of points that must fall in the band for "almost all".
    pub almost_all: f64,
    /// Accept `x_lo` below 1000.
    pub allow_small_x: bool,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self { band: (0.7, 1.3), almost_all: 0.99, allow_small_x: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityScan {
    pub rule: YRule,
    pub options: DensityOptions,
    pub stats: Vec<IntervalStat>,
    pub skipped: Vec<Skip>,
    pub summary: Option<Summary>,
    pub in_band: usize,
    pub in_band_share: f64,
    pub almost_all: bool,
}

impl ToTable for DensityScan {
    fn to_table(&self) -> Table {
        stats_table(&self.stats)
    }
}

fn stats_table(stats: &[IntervalStat]) -> Table {
    let mut t = Table::new(&["x", "y", "count", "density_ratio", "theta_inc", "psi_inc"]);
    for s in stats {
        t.push(vec![
            s.x.into(),
            s.y.into(),
            s.count.into(),
            s.density_ratio.into(),
            s.theta_inc.into(),
            s.psi_inc.into(),
        ]);
    }
    t
}

pub fn density_scan(x_lo: u64, x_hi: u64, samples: usize, rule: YRule) -> Result<DensityScan> {
    density_scan_with(x_lo, x_hi, samples, rule, &DensityOptions::default())
}

/// Density ratios on a log-spaced grid of `samples` points in `[x_lo, x_hi]`.
pub fn density_scan_with(
    x_lo: u64,
    x_hi: u64,
    samples: usize,
    rule: YRule,
    options: &DensityOptions,
) -> Result<DensityScan> {
    let min = if options.allow_small_x { 2 } else { SCAN_MIN };
    if x_lo < min || x_hi < x_lo {
        return Err(invalid("range", format!("need {min} <= x_lo <= x_hi, got [{x_lo}, {x_hi}]")));
    }
    if samples < 1 {
        return Err(invalid("samples", "need at least one sample"));
    }
    rule.validate()?;
    let grid = log_grid(x_lo, x_hi, samples);
    let outcomes = par::map(&grid, |&x| {
        let y = rule.length(x);
        if y < 1.0 {
            return Ok(Err(Skip { x, y, reason: "interval length below 1" }));
        }
        interval_stat(x, y as u64).map(Ok)
    });
    let mut stats = Vec::with_capacity(grid.len());
    let mut skipped = Vec::new();
    for o in outcomes {
        match o? {
            Ok(s) => stats.push(s),
            Err(s) => skipped.push(s),
        }
    }
    let summary = Summary::of(stats.iter().map(|s| s.density_ratio));
    let (lo, hi) = options.band;
    let in_band = stats.iter().filter(|s| (lo..=hi).contains(&s.density_ratio)).count();
    let in_band_share = if stats.is_empty() { 0.0 } else { in_band as f64 / stats.len() as f64 };
    Ok(DensityScan {
        rule,
        options: *options,
        stats,
        skipped,
        summary,
        in_band,
        in_band_share,
        almost_all: in_band_share >= options.almost_all,
    })
}

fn check_scan_grid(xs: &[u64]) -> Result<()> {
    if let Some(&x) = xs.iter().find(|&&x| !(SCAN_MIN..=SCAN_MAX).contains(&x)) {
        return Err(invalid("grid", format!("points must lie in [{SCAN_MIN}, {SCAN_MAX}], got {x}")));
    }
    Ok(())
}

/// One gap interval `(x − y, x]`, `y = ⌈x^{0.525}⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub x: u64,
    pub y: u64,
    pub count: u64,
    /// Σ log p over the interval.
    pub log_sum: f64,
    /// `log(x − y) < Σ log p`
    pub lower_holds: bool,
    /// `Σ log p <= 2y/(log y + 3.53) · log x`
    pub upper_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    /// Grid points whose interval holds no prime.
    pub violations: Vec<u64>,
    pub lower_failures: usize,
    pub upper_failures: usize,
}

impl ToTable for GapReport {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "y", "count", "log_sum", "lower_holds", "upper_holds"]);
        for r in &self.rows {
            t.push(vec![
                r.x.into(),
                r.y.into(),
                r.count.into(),
                r.log_sum.into(),
                r.lower_holds.into(),
                r.upper_holds.into(),
            ]);
        }
        t
    }
}

pub fn gap_length(x: u64) -> u64 {
    (x as f64).powf(BHP_EXPONENT).ceil() as u64
}

/// Primes in `(x − ⌈x^{0.525}⌉, x]` at every grid point, with the
/// log-sum sandwich on the same interval.
pub fn bhp_gap_check(xs: &[u64]) -> Result<GapReport> {
    check_scan_grid(xs)?;
    let rows = par::map(xs, |&x| -> Result<GapRow> {
        let y = gap_length(x);
        let start = x - y;
        let t = scan::tally_range(start + 1, x + 1, Fields::THETA)?;
        let log_sum = t.theta();
        let yf = y as f64;
        let bt = 2.0 * yf / (yf.ln() + 3.53);
        Ok(GapRow {
            x,
            y,
            count: t.pi,
            log_sum,
            lower_holds: (start as f64).ln() < log_sum,
            upper_holds: log_sum <= bt * (x as f64).ln(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let violations = rows.iter().filter(|r| r.count == 0).map(|r| r.x).collect();
    let lower_failures = rows.iter().filter(|r| !r.lower_holds).count();
    let upper_failures = rows.iter().filter(|r| !r.upper_holds).count();
    Ok(GapReport { rows, violations, lower_failures, upper_failures })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BrunTitchmarshScan {
    pub beta: f64,
    pub rows: Vec<BrunTitchmarsh>,
    pub failures: Vec<u64>,
    /// First grid point from which the bound held at every later point.
    pub onset: Option<u64>,
}

/// The Brun–Titchmarsh bound on `(x, x + ⌊x^β⌋]` over a grid.
pub fn brun_titchmarsh_scan(xs: &[u64], beta: f64) -> Result<BrunTitchmarshScan> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(invalid("beta", format!("need 0 < β < 1, got {beta}")));
    }
    let rows = par::map(xs, |&x| brun_titchmarsh_ratio(x, ((x as f64).powf(beta).floor() as u64).max(2)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let failures = rows.iter().filter(|r| !r.satisfied).map(|r| r.x).collect();
    let flags: Vec<(u64, bool)> = rows.iter().map(|r| (r.x, r.satisfied)).collect();
    Ok(BrunTitchmarshScan { beta, onset: persistent_onset(&flags), rows, failures })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    /// Bin edges, one more than the number of bins.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

pub const HISTOGRAM_BINS: usize = 20;

impl Histogram {
    /// Equal-width bins over `[min, max]`; a single bin when all values coincide.
    pub fn of(values: &[f64], bins: usize) -> Self {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if values.is_empty() {
            return Self { edges: Vec::new(), counts: Vec::new() };
        }
        if min == max || bins <= 1 {
            return Self { edges: vec![min, max], counts: vec![values.len()] };
        }
        let width = (max - min) / bins as f64;
        let edges = (0..=bins).map(|i| if i == bins { max } else { min + width * i as f64 }).collect();
        let mut counts = vec![0; bins];
        for &v in values {
            let i = (((v - min) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { edges, counts }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaierReport {
    pub delta: f64,
    pub samples: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub above_one: usize,
    pub below_one: usize,
    pub histogram: Histogram,
    pub stats: Vec<IntervalStat>,
}

impl ToTable for MaierReport {
    fn to_table(&self) -> Table {
        stats_table(&self.stats)
    }
}

/// Observed spread of `(π(x + f) − π(x)) / (f / log x)`, `f = (log x)^δ`,
/// over a log grid. Reported, never asserted.
pub fn maier_ratio_stats(delta: f64, x_lo: u64, x_hi: u64, samples: usize) -> Result<MaierReport> {
    if !(delta > 1.0 && delta.is_finite()) {
        return Err(invalid("delta", format!("need δ > 1, got {delta}")));
    }
    if x_lo < 3 || x_hi < x_lo {
        return Err(invalid("range", format!("need 3 <= x_lo <= x_hi, got [{x_lo}, {x_hi}]")));
    }
    if samples < 1 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let grid = log_grid(x_lo, x_hi, samples);
    let stats = par::map(&grid, |&x| interval_stat(x, (x as f64).ln().powf(delta).floor().max(1.0) as u64))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = stats
        .iter()
        .map(|s| {
            let lx = (s.x as f64).ln();
            s.count as f64 / (lx.powf(delta) / lx)
        })
        .collect();
    let summary = Summary::of(ratios.iter().copied()).expect("nonempty grid");
    Ok(MaierReport {
        delta,
        samples: stats.len(),
        min_ratio: summary.min,
        max_ratio: summary.max,
        mean_ratio: summary.mean,
        above_one: ratios.iter().filter(|&&r| r > 1.0).count(),
        below_one: ratios.iter().filter(|&&r| r < 1.0).count(),
        histogram: Histogram::of(&ratios, HISTOGRAM_BINS),
        stats,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceReport {
    pub n: u64,
    pub y: u64,
    pub stride: u64,
    pub samples: u64,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    /// `y · log(N/y)`
    pub predicted_variance: f64,
    pub ratio: f64,
}

/// Mean and variance of `ψ(x + y) − ψ(x) − y` for `x = N, N + stride, ..., <= 2N`.
pub fn interval_variance(n: u64, y: u64, stride: u64) -> Result<VarianceReport> {
    if !(10_000..=SCAN_MAX).contains(&n) {
        return Err(invalid("N", format!("need 10^4 <= N <= 10^8, got {n}")));
    }
    if y < 10 || y > n / 10 {
        return Err(invalid("y", format!("need 10 <= y <= N/10 = {}, got {y}", n / 10)));
    }
    if stride < 1 {
        return Err(invalid("stride", "need stride >= 1"));
    }
    // prefix[i] = Σ Λ(m) over N < m <= N + i
    let lambda = mangoldt_range(n + 1, 2 * n + y + 1)?;
    let mut prefix = Vec::with_capacity(lambda.len() + 1);
    let mut acc = Neumaier::new();
    prefix.push(0.0);
    for &l in &lambda {
        acc.add(l);
        prefix.push(acc.value());
    }
    let yf = y as f64;
    let devs: Vec<f64> =
        (0..=n).step_by(stride as usize).map(|i| prefix[(i + y) as usize] - prefix[i as usize] - yf).collect();
    let count = devs.len() as f64;
    let mean = devs.iter().copied().collect::<Neumaier>().value() / count;
    let variance = devs.iter().map(|d| (d - mean) * (d - mean)).collect::<Neumaier>().value() / count;
    let predicted = yf * (n as f64 / yf).ln();
    Ok(VarianceReport {
        n,
        y,
        stride,
        samples: devs.len() as u64,
        empirical_mean: mean,
        empirical_variance: variance,
        predicted_variance: predicted,
        ratio: variance / predicted,
    })
}

/// Envelope factor for increment deviations against `x^{7/12}`.
pub const INCREMENT_ENVELOPE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IncrementRow {
    pub y: u64,
    pub theta_dev: f64,
    pub psi_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncrementReport {
    pub x: u64,
    pub rows: Vec<IncrementRow>,
    pub skipped: Vec<Skip>,
    pub max_theta_dev: f64,
    pub max_psi_dev: f64,
    /// `max(max_theta_dev, max_psi_dev) / x^{7/12}`
    pub envelope_ratio: f64,
    pub within: bool,
}

impl ToTable for IncrementReport {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["y", "theta_dev", "psi_dev"]);
        for r in &self.rows {
            t.push(vec![r.y.into(), r.theta_dev.into(), r.psi_dev.into()]);
        }
        t
    }
}

/// `count` lengths spread log-uniformly over `[⌈x^{7/12}⌉, x]` by the van der
/// Corput sequence.
pub fn low_discrepancy_lengths(x: u64, count: usize) -> Vec<u64> {
    let lo = (x as f64).powf(7.0 / 12.0).ceil();
    let hi = x as f64;
    (1..=count as u64).map(|i| ((lo * (hi / lo).powf(van_der_corput(i))).round() as u64).clamp(lo as u64, x)).collect()
}

/// `|θ(x + y) − θ(x) − y|` and its ψ analogue over the given lengths.
pub fn increment_deviation(x: u64, ys: &[u64]) -> Result<IncrementReport> {
    if x < 2 {
        return Err(invalid("x", format!("need x >= 2, got {x}")));
    }
    let envelope = (x as f64).powf(7.0 / 12.0);
    let min_y = envelope.ceil() as u64;
    let mut skipped = Vec::new();
    let mut kept = Vec::new();
    for &y in ys {
        if y < min_y {
            skipped.push(Skip { x, y: y as f64, reason: "length below x^(7/12)" });
        } else if y > x {
            skipped.push(Skip { x, y: y as f64, reason: "length above x" });
        } else {
            kept.push(y);
        }
    }
    let rows = par::map(&kept, |&y| -> Result<IncrementRow> {
        let s = interval_stat(x, y)?;
        Ok(IncrementRow { y, theta_dev: (s.theta_inc - y as f64).abs(), psi_dev: (s.psi_inc - y as f64).abs() })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let max_theta_dev = rows.iter().map(|r| r.theta_dev).fold(0.0, f64::max);
    let max_psi_dev = rows.iter().map(|r| r.psi_dev).fold(0.0, f64::max);
    let envelope_ratio = max_theta_dev.max(max_psi_dev) / envelope;
    Ok(IncrementReport {
        x,
        rows,
        skipped,
        max_theta_dev,
        max_psi_dev,
        envelope_ratio,
        within: envelope_ratio <= INCREMENT_ENVELOPE,
    })
}
