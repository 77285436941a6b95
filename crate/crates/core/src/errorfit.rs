//! Error terms `π(x) − li(x)`, `θ(x) − x`, `ψ(x) − x` on a grid, their
//! ratios to candidate envelopes, and effective-exponent fits.

use serde::Serialize;

use crate::error::{invalid, LabError, Result};
use crate::logint::{li_both, QuadratureSpec};
use crate::par;
use crate::report::{Cell, Table, ToTable};
use crate::scan::{self, Fields};

pub const PROFILE_MIN: u64 = 10;
pub const PROFILE_MAX: u64 = 100_000_000;
pub const ENVELOPE_EXPONENT: f64 = 7.0 / 12.0;
/// Points of the default log grid over `[PROFILE_MIN, PROFILE_MAX]`.
pub const DEFAULT_GRID_POINTS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorRow {
    pub x: u64,
    pub pi: u64,
    /// li(x) by the Ei series, with the quadrature value alongside.
    pub li: f64,
    pub li_quadrature: f64,
    pub e_pi: f64,
    pub e_theta: f64,
    pub e_psi: f64,
    /// `log|E|/log x`, absent when `E = 0`.
    pub eps_eff_pi: Option<f64>,
    pub eps_eff_theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorProfile {
    pub rows: Vec<ErrorRow>,
}

impl ToTable for ErrorProfile {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "E_pi", "E_theta", "E_psi", "eps_eff_pi", "eps_eff_theta"]);
        for r in &self.rows {
            t.push(vec![
                r.x.into(),
                r.e_pi.into(),
                r.e_theta.into(),
                r.e_psi.into(),
                r.eps_eff_pi.into(),
                r.eps_eff_theta.into(),
            ]);
        }
        t
    }
}

fn eps_eff(e: f64, x: u64) -> Option<f64> {
    (e != 0.0).then(|| e.abs().ln() / (x as f64).ln())
}

/// Exact π, θ, ψ and li at every grid point in `[10, 10^8]`.
pub fn build_profile(xs: &[u64], quad: &QuadratureSpec) -> Result<ErrorProfile> {
    if let Some(&x) = xs.iter().find(|&&x| !(PROFILE_MIN..=PROFILE_MAX).contains(&x)) {
        return Err(invalid("grid", format!("points must lie in [{PROFILE_MIN}, {PROFILE_MAX}], got {x}")));
    }
    let tallies = scan::tally_at(xs, Fields::CHEBYSHEV)?;
    let lis = par::map(xs, |&x| li_both(x as f64, quad)).into_iter().collect::<Result<Vec<_>>>()?;
    let rows = xs
        .iter()
        .zip(tallies)
        .zip(lis)
        .map(|((&x, t), li)| {
            let xf = x as f64;
            let e_pi = t.pi as f64 - li.series;
            let e_theta = t.theta() - xf;
            ErrorRow {
                x,
                pi: t.pi,
                li: li.series,
                li_quadrature: li.quadrature,
                e_pi,
                e_theta,
                e_psi: t.psi() - xf,
                eps_eff_pi: eps_eff(e_pi, x),
                eps_eff_theta: eps_eff(e_theta, x),
            }
        })
        .collect();
    Ok(ErrorProfile { rows })
}

/// Envelope shapes an error term is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Family {
    /// `x^{7/12}`
    Power712,
    /// `x^{1/2} log x`
    SqrtLog,
    /// `x exp(−c (log x)^{1/2})`
    DeLaValleePoussin,
    /// `x exp(−c (log x)^{3/5} (log log x)^{−1/5})`
    Vinogradov,
    /// `x^{21/40}`
    Power2140,
}

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Power712, Family::SqrtLog, Family::DeLaValleePoussin, Family::Vinogradov, Family::Power2140];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Power712 => "x^(7/12)",
            Family::SqrtLog => "x^(1/2)*log(x)",
            Family::DeLaValleePoussin => "x*exp(-c*log(x)^(1/2))",
            Family::Vinogradov => "x*exp(-c*log(x)^(3/5)*log(log(x))^(-1/5))",
            Family::Power2140 => "x^(21/40)",
        }
    }

    pub fn value(&self, x: f64, c: f64) -> f64 {
        let l = x.ln();
        match self {
            Family::Power712 => x.powf(7.0 / 12.0),
            Family::SqrtLog => x.sqrt() * l,
            Family::DeLaValleePoussin => x * (-c * l.sqrt()).exp(),
            Family::Vinogradov => x * (-c * l.powf(0.6) * l.ln().powf(-0.2)).exp(),
            Family::Power2140 => x.powf(21.0 / 40.0),
        }
    }
}

/// Free constant of the sub-exponential envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeConfig {
    pub c: f64,
}

impl Default for EnvelopeConfig {
    fn default() -> Self {
        Self { c: 1.0 }
    }
}

fn ratio(e: f64, env: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        e.abs() / env
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySummary {
    pub family: Family,
    pub name: &'static str,
    pub max_ratio_pi: f64,
    pub max_ratio_theta: f64,
    pub max_ratio_psi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeReport {
    pub config: EnvelopeConfig,
    pub families: Vec<FamilySummary>,
    /// `ratios[i][f]` = (|E_pi|, |E_theta|) / family f at row i.
    pub ratios: Vec<(u64, Vec<(f64, f64)>)>,
    /// Rows with `|E_pi| > x^{7/12}`.
    pub pi_violations: Vec<u64>,
    /// Rows with `|E_theta| > x^{7/12}`.
    pub theta_violations: Vec<u64>,
}

impl EnvelopeReport {
    pub fn holds(&self) -> bool {
        self.pi_violations.is_empty() && self.theta_violations.is_empty()
    }
}

impl ToTable for EnvelopeReport {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&[
            "x",
            "pi_7_12",
            "theta_7_12",
            "pi_sqrt_log",
            "theta_sqrt_log",
            "pi_dlvp",
            "theta_dlvp",
            "pi_vinogradov",
            "theta_vinogradov",
            "pi_21_40",
            "theta_21_40",
        ]);
        for (x, rs) in &self.ratios {
            let mut row: Vec<Cell> = vec![(*x).into()];
            for &(p, th) in rs {
                row.push(p.into());
                row.push(th.into());
            }
            t.push(row);
        }
        t
    }
}

/// Largest `|E|/envelope` per family, and rows breaking the `x^{7/12}`
/// envelope.
pub fn envelope_report(profile: &ErrorProfile, config: &EnvelopeConfig) -> Result<EnvelopeReport> {
    if profile.rows.is_empty() {
        return Err(LabError::Degenerate("empty error profile".into()));
    }
    if !(config.c > 0.0) {
        return Err(invalid("c", format!("must be positive, got {}", config.c)));
    }
    let ratios: Vec<(u64, Vec<(f64, f64)>)> = profile
        .rows
        .iter()
        .map(|r| {
            let x = r.x as f64;
            let rs = Family::ALL
                .iter()
                .map(|f| {
                    let env = f.value(x, config.c);
                    (ratio(r.e_pi, env), ratio(r.e_theta, env))
                })
                .collect();
            (r.x, rs)
        })
        .collect();
    let families = Family::ALL
        .iter()
        .enumerate()
        .map(|(i, &family)| {
            let max_psi =
                profile.rows.iter().map(|r| ratio(r.e_psi, family.value(r.x as f64, config.c))).fold(0.0, f64::max);
            FamilySummary {
                family,
                name: family.name(),
                max_ratio_pi: ratios.iter().map(|(_, rs)| rs[i].0).fold(0.0, f64::max),
                max_ratio_theta: ratios.iter().map(|(_, rs)| rs[i].1).fold(0.0, f64::max),
                max_ratio_psi: max_psi,
            }
        })
        .collect();
    let violations = |pick: fn(&(f64, f64)) -> f64| -> Vec<u64> {
        ratios.iter().filter(|(x, rs)| *x >= PROFILE_MIN && pick(&rs[0]) > 1.0).map(|(x, _)| *x).collect()
    };
    let pi_violations = violations(|r| r.0);
    let theta_violations = violations(|r| r.1);
    Ok(EnvelopeReport { config: *config, families, ratios, pi_violations, theta_violations })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Ordinary least squares of `v` on `u`.
fn ols(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mu = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = points.iter().map(|p| p.1).sum::<f64>() / n;
    let suu: f64 = points.iter().map(|p| (p.0 - mu) * (p.0 - mu)).sum();
    if suu == 0.0 {
        return None;
    }
    let suv: f64 = points.iter().map(|p| (p.0 - mu) * (p.1 - mv)).sum();
    let slope = suv / suu;
    Some(LineFit { slope, intercept: mv - slope * mu, points: points.len() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonRow {
    pub x: u64,
    /// `7/12 − eps_eff`
    pub eps_pi: Option<f64>,
    pub eps_theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonFit {
    pub rows: Vec<EpsilonRow>,
    /// Least-squares line of `eps_eff` against `log x`.
    pub fit_pi: Option<LineFit>,
    pub fit_theta: Option<LineFit>,
    pub all_positive_pi: bool,
    pub all_positive_theta: bool,
}

impl ToTable for EpsilonFit {
    fn to_table(&self) -> Table {
        let mut t = Table::new(&["x", "eps_pi", "eps_theta"]);
        for r in &self.rows {
            t.push(vec![r.x.into(), r.eps_pi.into(), r.eps_theta.into()]);
        }
        t
    }
}

pub const FIT_MIN_ROWS: usize = 10;
pub const FIT_MIN_DECADES: f64 = 3.0;

/// Implied `ε(x) = 7/12 − eps_eff` per row and the trend of `eps_eff`.
pub fn epsilon_fit(profile: &ErrorProfile) -> Result<EpsilonFit> {
    let rows = &profile.rows;
    if rows.len() < FIT_MIN_ROWS {
        return Err(LabError::Degenerate(format!("need at least {FIT_MIN_ROWS} rows, got {}", rows.len())));
    }
    let lo = rows.iter().map(|r| r.x).min().expect("nonempty") as f64;
    let hi = rows.iter().map(|r| r.x).max().expect("nonempty") as f64;
    if (hi / lo).log10() < FIT_MIN_DECADES {
        return Err(LabError::Degenerate(format!("grid spans {:.2} decades, need 3", (hi / lo).log10())));
    }
    if rows.iter().all(|r| r.eps_eff_pi.is_none() && r.eps_eff_theta.is_none()) {
        return Err(LabError::Degenerate("every error term is zero".into()));
    }
    let points = |pick: fn(&ErrorRow) -> Option<f64>| -> Vec<(f64, f64)> {
        rows.iter().filter_map(|r| pick(r).map(|e| ((r.x as f64).ln(), e))).collect()
    };
    let fit_pi = ols(&points(|r| r.eps_eff_pi));
    let fit_theta = ols(&points(|r| r.eps_eff_theta));
    let out: Vec<EpsilonRow> = rows
        .iter()
        .map(|r| EpsilonRow {
            x: r.x,
            eps_pi: r.eps_eff_pi.map(|e| ENVELOPE_EXPONENT - e),
            eps_theta: r.eps_eff_theta.map(|e| ENVELOPE_EXPONENT - e),
        })
        .collect();
    Ok(EpsilonFit {
        all_positive_pi: out.iter().filter_map(|r| r.eps_pi).all(|e| e > 0.0),
        all_positive_theta: out.iter().filter_map(|r| r.eps_theta).all(|e| e > 0.0),
        rows: out,
        fit_pi,
        fit_theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_grid;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn profile_examples() {
        let p = build_profile(&[10, 100], &quad()).unwrap();
        let r = p.rows[1];
        assert!((r.e_pi - (-4.080_977_8)).abs() < 1e-6);
        assert!((r.eps_eff_pi.unwrap() - 0.305_382).abs() < 1e-5);
        assert!(p.rows[0].e_pi.abs() < 10f64.powf(7.0 / 12.0));
        assert_eq!(build_profile(&[1000], &quad()).unwrap().rows.len(), 1);
        assert!(build_profile(&[9], &quad()).is_err());
    }

    #[test]
    fn theta_exponent_at_a_million() {
        let p = build_profile(&[1_000_000], &quad()).unwrap();
        let r = p.rows[0];
        assert!((r.e_theta - (-1_515.824_974)).abs() < 1e-5);
        assert!((r.eps_eff_theta.unwrap() - 0.530_108_18).abs() < 1e-7);
    }

    #[test]
    fn envelope_examples() {
        let p = build_profile(&log_grid(1000, 10_000_000, 40), &quad()).unwrap();
        let e = envelope_report(&p, &EnvelopeConfig::default()).unwrap();
        assert!(e.holds(), "{:?} {:?}", e.pi_violations, e.theta_violations);
        assert!(e.families[1].max_ratio_pi <= 1.0);
        let zero = ErrorProfile { rows: vec![ErrorRow { e_pi: 0.0, e_theta: 0.0, e_psi: 0.0, ..p.rows[0] }] };
        let z = envelope_report(&zero, &EnvelopeConfig::default()).unwrap();
        assert!(z.ratios[0].1.iter().all(|&(a, b)| a == 0.0 && b == 0.0));
        assert!(envelope_report(&ErrorProfile { rows: vec![] }, &EnvelopeConfig::default()).is_err());
        let csv = e.to_table().to_csv();
        assert_eq!(csv.lines().count(), p.rows.len() + 1);
    }

    #[test]
    fn fit_examples() {
        let p = build_profile(&log_grid(1000, 10_000_000, 40), &quad()).unwrap();
        let f = epsilon_fit(&p).unwrap();
        assert!(f.all_positive_pi && f.all_positive_theta);
        assert!(f.fit_pi.is_some());
        let same = ErrorProfile { rows: vec![p.rows[0]; 12] };
        assert!(epsilon_fit(&same).is_err());
        let narrow = build_profile(&log_grid(1000, 100_000, 20), &quad()).unwrap();
        assert!(epsilon_fit(&narrow).is_err());
    }

    #[test]
    fn li_routes_agree_in_profile() {
        let p = build_profile(&log_grid(10, 100_000_000, 30), &quad()).unwrap();
        for r in &p.rows {
            assert!((r.li - r.li_quadrature).abs() < 1e-6);
        }
        let last = p.rows.last().unwrap();
        assert!((last.e_pi - (-753.330_284)).abs() < 1e-4);
        assert!((last.e_pi.abs() / 1e8f64.powf(7.0 / 12.0) - 0.016_23).abs() < 1e-4);
    }
}
