//! Adaptive Gauss–Kronrod (7/15) quadrature.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Error targets for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-13, max_depth: 50 }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(invalid("abs_tol", format!("must be positive, got {abs_tol}")));
        }
        if !(rel_tol > 0.0) {
            return Err(invalid("rel_tol", format!("must be positive, got {rel_tol}")));
        }
        if max_depth < 1 {
            return Err(invalid("max_depth", "must be at least 1"));
        }
        Ok(Self { abs_tol, rel_tol, max_depth })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    /// False when some subinterval hit `max_depth` before meeting its target.
    pub converged: bool,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// ∫_a^b f by recursive bisection until each piece meets its share of
/// the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error: 0.0, converged: true };
    }
    let (whole, err) = gk15(&f, a, b);
    let target = spec.abs_tol.max(spec.rel_tol * whole.abs());
    let mut converged = true;
    let (value, error) = refine(&f, a, b, whole, err, target, spec.max_depth, &mut converged);
    Quadrature { value, error, converged }
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    est: f64,
    err: f64,
    target: f64,
    depth: u32,
    converged: &mut bool,
) -> (f64, f64) {
    if err <= target {
        return (est, err);
    }
    if depth == 0 {
        *converged = false;
        return (est, err);
    }
    let m = 0.5 * (a + b);
    let (l, el) = gk15(f, a, m);
    let (r, er) = gk15(f, m, b);
    let (lv, le) = refine(f, a, m, l, el, 0.5 * target, depth - 1, converged);
    let (rv, re) = refine(f, m, b, r, er, 0.5 * target, depth - 1, converged);
    (lv + rv, le + re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_exponential() {
        let s = QuadratureSpec::default();
        let q = integrate(|x| x * x, 0.0, 3.0, &s);
        assert!((q.value - 9.0).abs() < 1e-13);
        let q = integrate(f64::exp, 0.0, 20.0, &s);
        assert!((q.value - (20f64.exp() - 1.0)).abs() < 1e-13 * 20f64.exp());
        assert!(q.converged);
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(QuadratureSpec::new(0.0, 1e-9, 10).is_err());
        assert!(QuadratureSpec::new(1e-9, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-9, 1e-9, 0).is_err());
    }
}
