//! Adaptive 1-D quadrature and exact derivatives of exponential-form
//! Laplace transforms. Both are pure and re-entrant.

use crate::error::{Error, Result};

/// Tolerances and budget for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerances", "rel_tol > 0 and abs_tol > 0"));
        }
        Ok(())
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss-Kronrod panel: returns (estimate, error bound).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let estimate = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    // the usual (200*err)^1.5 sharpening is overkill here; the plain
    // Gauss/Kronrod gap is a safe overestimate for our smooth kernels
    (estimate, err)
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    estimate: f64,
    err: f64,
}

/// Adaptive integral of `f` over [lo, hi] to within
/// max(abs_tol, rel_tol * |result|). Bisects the worst segment until the
/// global error bound meets the tolerance or the budget runs out.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain("integrate: bounds must be finite".into()));
    }
    if lo > hi {
        return Err(Error::Domain(format!("integrate: lo {lo} > hi {hi}")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let (est, err) = gk15(&f, lo, hi);
    let mut segments = vec![Segment { a: lo, b: hi, estimate: est, err }];
    for _ in 0..spec.max_subdivisions {
        let total: f64 = segments.iter().map(|s| s.estimate).sum();
        let total_err: f64 = segments.iter().map(|s| s.err).sum();
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(total);
        }
        // split the segment with the largest error bound
        let (worst_idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.err.total_cmp(&b.1.err))
            .expect("nonempty");
        let worst = segments.swap_remove(worst_idx);
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval no longer splittable at f64 resolution; keep as is
            segments.push(Segment { err: 0.0, ..worst });
            continue;
        }
        let (e1, r1) = gk15(&f, worst.a, mid);
        let (e2, r2) = gk15(&f, mid, worst.b);
        segments.push(Segment { a: worst.a, b: mid, estimate: e1, err: r1 });
        segments.push(Segment { a: mid, b: worst.b, estimate: e2, err: r2 });
    }
    let total: f64 = segments.iter().map(|s| s.estimate).sum();
    let total_err: f64 = segments.iter().map(|s| s.err).sum();
    if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
        Ok(total)
    } else {
        Err(Error::Accuracy { estimate: total, error_bound: total_err })
    }
}

/// Derivatives L^{(0)}..L^{(k_max)} of L(a) = e^{g(a)} at a fixed point,
/// given the exponent's derivatives.
#[derive(Debug, Clone)]
pub struct DerivativeStack {
    values: Vec<f64>,
}

impl DerivativeStack {
    /// k-th derivative of the transform at the evaluation point.
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Exact derivatives of e^{g(a)} via the Leibniz recursion
/// L^{(k)} = sum_{j<k} C(k-1, j) g^{(k-j)} L^{(j)}.
///
/// `exponent_derivs(n)` must return g(a) for n = 0 and g^{(n)}(a) for
/// n = 1..=k_max, all at the same fixed a.
pub fn exp_form_derivatives<G: Fn(usize) -> f64>(
    exponent_derivs: G,
    k_max: usize,
) -> DerivativeStack {
    let mut g = Vec::with_capacity(k_max + 1);
    for n in 0..=k_max {
        g.push(exponent_derivs(n));
    }
    let mut values = Vec::with_capacity(k_max + 1);
    values.push(g[0].exp());
    for k in 1..=k_max {
        let mut binom = 1.0; // C(k-1, j), updated incrementally
        let mut acc = 0.0;
        for j in 0..k {
            acc += binom * g[k - j] * values[j];
            binom *= (k - 1 - j) as f64 / (j + 1) as f64;
        }
        values.push(acc);
    }
    DerivativeStack { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn integrate_constant_and_empty() {
        let spec = QuadratureSpec::default();
        assert_relative_eq!(integrate(|_| 1.0, 0.0, 1.0, &spec).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(integrate(|x| x, 3.0, 3.0, &spec).unwrap(), 0.0);
        assert!(integrate(|x| x, 1.0, 0.0, &spec).is_err());
    }

    #[test]
    fn integrate_nearest_distance_density() {
        // closed-form antiderivative: int_0^mu 2 l pi x e^{-l pi x^2} dx = 1 - e^{-l pi mu^2}
        let spec = QuadratureSpec::default();
        let lambda = 1e-4;
        let mu = 100.0;
        let f = |x: f64| 2.0 * lambda * PI * x * (-lambda * PI * x * x).exp();
        let got = integrate(f, 0.0, mu, &spec).unwrap();
        assert_relative_eq!(got, 1.0 - (-PI).exp(), epsilon = 1e-10);
    }

    #[test]
    fn integrate_oscillatory() {
        let spec = QuadratureSpec::default();
        let got = integrate(|x: f64| (10.0 * x).sin(), 0.0, 2.0, &spec).unwrap();
        let exact = (1.0 - (20.0f64).cos()) / 10.0;
        assert_relative_eq!(got, exact, epsilon = 1e-9);
    }

    #[test]
    fn integrate_reports_nonconvergence() {
        // integrable endpoint singularity with a starved budget
        let spec = QuadratureSpec { rel_tol: 1e-14, abs_tol: 1e-16, max_subdivisions: 3 };
        let r = integrate(|x: f64| x.abs().sqrt().recip().min(1e8), 0.0, 1.0, &spec);
        match r {
            Err(Error::Accuracy { estimate, error_bound }) => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn integrate_linearity() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| x * x - 2.0 * x;
        let g = |x: f64| (3.0 * x).cos();
        let a = 1.7;
        let b = -0.3;
        let lhs = integrate(|x| a * f(x) + b * g(x), 0.0, 2.0, &spec).unwrap();
        let rhs = a * integrate(f, 0.0, 2.0, &spec).unwrap() + b * integrate(g, 0.0, 2.0, &spec).unwrap();
        assert_relative_eq!(lhs, rhs, epsilon = 1e-9);
    }

    #[test]
    fn integrate_additive_over_splits() {
        let spec = QuadratureSpec::default();
        let f = |x: f64| (x * x).exp().recip();
        let whole = integrate(f, -1.0, 2.0, &spec).unwrap();
        let parts = integrate(f, -1.0, 0.4, &spec).unwrap() + integrate(f, 0.4, 2.0, &spec).unwrap();
        assert_relative_eq!(whole, parts, epsilon = 1e-9);
    }

    #[test]
    fn exp_derivatives_zero_exponent() {
        let stack = exp_form_derivatives(|_| 0.0, 5);
        assert_eq!(stack.get(0), 1.0);
        for k in 1..=5 {
            assert_eq!(stack.get(k), 0.0);
        }
    }

    #[test]
    fn exp_derivatives_pure_exponential() {
        // g(a) = -c a at a = 0.7: L^{(k)} = (-c)^k e^{-c a}
        let c = 2.5;
        let a = 0.7;
        let stack = exp_form_derivatives(
            |n| match n {
                0 => -c * a,
                1 => -c,
                _ => 0.0,
            },
            4,
        );
        for k in 0..=4usize {
            let expected = (-c as f64).powi(k as i32) * (-c * a).exp();
            assert_relative_eq!(stack.get(k), expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn exp_derivatives_match_finite_differences() {
        // g(a) = -a^2 + sin(a); derivatives known in closed form
        let g = |a: f64| -a * a + a.sin();
        let a0 = 0.8;
        let stack = exp_form_derivatives(
            |n| match n {
                0 => g(a0),
                1 => -2.0 * a0 + a0.cos(),
                2 => -2.0 - a0.sin(),
                3 => -a0.cos(),
                4 => a0.sin(),
                _ => unreachable!(),
            },
            4,
        );
        let l = |a: f64| g(a).exp();
        // central finite differences, step balanced per order
        for k in 1..=4usize {
            let h = f64::EPSILON.powf(1.0 / (k as f64 + 2.0)) * (1.0 + a0.abs());
            let fd = central_difference(&l, a0, k, h);
            assert_relative_eq!(stack.get(k), fd, max_relative = 1e-4);
        }
    }

    /// k-th central difference with step h (binomial stencil).
    pub fn central_difference<F: Fn(f64) -> f64>(f: &F, a: f64, k: usize, h: f64) -> f64 {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for i in 0..=k {
            let x = a + (k as f64 / 2.0 - i as f64) * h;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * binom * f(x);
            binom *= (k - i) as f64 / (i + 1) as f64;
        }
        acc / h.powi(k as i32)
    }
}
