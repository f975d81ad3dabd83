//! Deterministic quadrature: adaptive Gauss–Kronrod on intervals, nested
//! rules on products of intervals and tensor rules on spheres.

use crate::error::{Error, Result};
use rayon::prelude::*;
use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

/// Cap on the number of nodes of a single sphere tensor rule.
pub const SPHERE_MAX_POINTS: usize = 4_000_000;

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
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
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadEstimate {
    pub value: f64,
    /// Absolute error bound.
    pub error: f64,
    pub evaluations: usize,
}

/// One 15-point Kronrod panel: `(K15, |K15 - G7|)`.
pub fn gauss_kronrod_15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error).then(other.a.total_cmp(&self.a))
    }
}

/// Globally adaptive G7–K15 on `[a, b]` starting from `initial` equal panels.
///
/// Stops when the summed error bound is below `tol · |I|`. The returned
/// estimate is the one with the smallest error bound seen, so a larger
/// budget never reports a larger bound.
pub fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, initial: usize, tol: f64, max_evals: usize) -> Result<QuadEstimate> {
    let initial = initial.max(1);
    let mut heap = BinaryHeap::new();
    let mut evals = 0;
    let width = (b - a) / initial as f64;
    for i in 0..initial {
        let (lo, hi) = (a + width * i as f64, if i + 1 == initial { b } else { a + width * (i + 1) as f64 });
        let (value, error) = gauss_kronrod_15(f, lo, hi);
        evals += 15;
        heap.push(Panel { a: lo, b: hi, value, error });
    }
    let totals = |heap: &BinaryHeap<Panel>| {
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        panels.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
    };
    let (mut value, mut error) = totals(&heap);
    let mut best = QuadEstimate { value, error, evaluations: evals };
    loop {
        if !value.is_finite() || error.is_nan() {
            return Err(Error::Integration {
                message: "integrand produced a non-finite value".into(),
                best_estimate: best.value,
                error_estimate: best.error,
            });
        }
        if error < best.error || (error == best.error && evals != best.evaluations) {
            best = QuadEstimate { value, error, evaluations: evals };
        }
        if error <= tol * value.abs() || error == 0.0 {
            return Ok(QuadEstimate { value, error, evaluations: evals });
        }
        if evals + 30 > max_evals {
            return Err(Error::Integration {
                message: format!("budget of {max_evals} evaluations exhausted before relative tolerance {tol:e}"),
                best_estimate: best.value,
                error_estimate: best.error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            return Err(Error::Integration {
                message: "panel width reached machine precision".into(),
                best_estimate: best.value,
                error_estimate: best.error,
            });
        }
        for (lo, hi) in [(worst.a, mid), (mid, worst.b)] {
            let (v, e) = gauss_kronrod_15(f, lo, hi);
            heap.push(Panel { a: lo, b: hi, value: v, error: e });
        }
        evals += 30;
        (value, error) = totals(&heap);
    }
}

/// A coordinate axis for nested integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    Interval(f64, f64),
    /// `ℝ`, mapped through `x = c + s·t/(1 - t²)`.
    Line { center: f64, scale: f64 },
    /// `[0, 2π)`.
    Periodic,
}

pub(crate) fn line_map(center: f64, scale: f64, t: f64) -> (f64, f64) {
    let d = 1.0 - t * t;
    (center + scale * t / d, scale * (1.0 + t * t) / (d * d))
}

/// `∫ f` over one axis.
pub fn integrate_axis(f: &dyn Fn(f64) -> f64, axis: Axis, tol: f64, max_evals: usize) -> Result<QuadEstimate> {
    match axis {
        Axis::Interval(a, b) => adaptive(f, a, b, 8, tol, max_evals),
        Axis::Periodic => adaptive(f, 0.0, TAU, 32, tol, max_evals),
        Axis::Line { center, scale } => {
            let g = |t: f64| {
                let (x, jac) = line_map(center, scale, t);
                let v = f(x);
                if v == 0.0 || !jac.is_finite() {
                    0.0
                } else {
                    v * jac
                }
            };
            adaptive(&g, -1.0, 1.0, 16, tol, max_evals)
        }
    }
}

/// Nested adaptive integration over a product of axes. Inner integrals use a
/// tolerance ten times tighter than the level above.
pub fn nested(f: &dyn Fn(&[f64]) -> f64, axes: &[Axis], tol: f64, max_evals: usize) -> Result<QuadEstimate> {
    let evals = Cell::new(0usize);
    let est = nested_level(f, axes, tol, max_evals, &[], &evals)?;
    Ok(QuadEstimate { evaluations: evals.get(), ..est })
}

fn nested_level(
    f: &dyn Fn(&[f64]) -> f64,
    axes: &[Axis],
    tol: f64,
    max_evals: usize,
    prefix: &[f64],
    evals: &Cell<usize>,
) -> Result<QuadEstimate> {
    let depth = prefix.len();
    if depth + 1 == axes.len() {
        let g = |x: f64| {
            let mut v = prefix.to_vec();
            v.push(x);
            f(&v)
        };
        let est = integrate_axis(&g, axes[depth], tol, max_evals)?;
        evals.set(evals.get() + est.evaluations);
        return Ok(est);
    }
    let inner_error = Cell::new(0.0f64);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let g = |x: f64| -> f64 {
        let mut q = prefix.to_vec();
        q.push(x);
        match nested_level(f, axes, 0.1 * tol, max_evals, &q, evals) {
            Ok(e) => {
                inner_error.set(inner_error.get().max(e.error / e.value.abs().max(f64::MIN_POSITIVE)));
                e.value
            }
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let outer = integrate_axis(&g, axes[depth], tol, max_evals);
    if let Some(e) = failure.take() {
        return Err(e);
    }
    let outer = outer?;
    Ok(QuadEstimate {
        value: outer.value,
        error: outer.error + inner_error.get() * outer.value.abs(),
        evaluations: evals.get(),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Number of nodes of the sphere rule of order `m` on `S^{n-1}`.
pub fn sphere_rule_size(n: usize, m: usize) -> usize {
    if n == 2 {
        2 * m
    } else {
        m.pow(n as u32 - 2) * 2 * m
    }
}

fn log_sum_exp_pairs(parts: &[(f64, f64)]) -> f64 {
    let m = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + parts.iter().map(|(pm, s)| s * (pm - m).exp()).sum::<f64>().ln()
}

/// `log ∫_{S^{n-1}} exp(logf(x)) dx` with a fixed tensor rule: Gauss–Legendre of
/// order `m` in each polar angle (weighted by `sin^k`) and the `2m`-point
/// trapezoid rule in the azimuth.
pub fn sphere_tensor_fixed(n: usize, m: usize, logf: &(dyn Fn(&[f64]) -> f64 + Sync)) -> f64 {
    let (gx, gw) = gauss_legendre(m);
    let polar = n.saturating_sub(2);
    let combos = m.pow(polar as u32);
    let az = 2 * m;
    let dphi = TAU / az as f64;
    let parts: Vec<(f64, f64)> = (0..combos)
        .into_par_iter()
        .map(|mut idx| {
            let mut x = vec![0.0; n];
            let mut radius = 1.0;
            let mut log_w = dphi.ln();
            for (i, xi) in x.iter_mut().enumerate().take(polar) {
                let j = idx % m;
                idx /= m;
                let theta = 0.5 * PI * (1.0 + gx[j]);
                let (s, c) = theta.sin_cos();
                *xi = radius * c;
                radius *= s;
                log_w += (0.5 * PI * gw[j]).ln() + (n - 2 - i) as f64 * s.ln();
            }
            let terms: Vec<f64> = (0..az)
                .map(|k| {
                    let phi = dphi * (k as f64 + 0.5);
                    let (s, c) = phi.sin_cos();
                    let mut y = x.clone();
                    y[n - 2] = radius * c;
                    y[n - 1] = radius * s;
                    logf(&y)
                })
                .collect();
            let mx = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if !mx.is_finite() {
                return (mx, 0.0);
            }
            (mx + log_w, terms.iter().map(|t| (t - mx).exp()).sum::<f64>())
        })
        .collect();
    log_sum_exp_pairs(&parts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereEstimate {
    pub log_value: f64,
    /// Relative error estimate from the last order doubling.
    pub rel_error: f64,
    pub order: usize,
    pub evaluations: usize,
}

/// Sphere tensor rule with order doubling until successive estimates agree to `tol`.
pub fn sphere_tensor_log_integral(
    n: usize,
    logf: &(dyn Fn(&[f64]) -> f64 + Sync),
    tol: f64,
    max_points: usize,
) -> Result<SphereEstimate> {
    if n < 2 {
        return Err(Error::Unsupported("sphere rules need n >= 2".into()));
    }
    let mut m = 4;
    let mut evals = sphere_rule_size(n, m);
    let mut prev = sphere_tensor_fixed(n, m, logf);
    let mut best = SphereEstimate { log_value: prev, rel_error: f64::INFINITY, order: m, evaluations: evals };
    loop {
        let next_m = 2 * m;
        let size = sphere_rule_size(n, next_m);
        if size > max_points {
            return Err(Error::Integration {
                message: format!("sphere rule would exceed {max_points} nodes before relative tolerance {tol:e}"),
                best_estimate: best.log_value.exp(),
                error_estimate: best.rel_error * best.log_value.exp(),
            });
        }
        let cur = sphere_tensor_fixed(n, next_m, logf);
        evals += size;
        if !cur.is_finite() {
            return Err(Error::Integration {
                message: "integrand produced a non-finite value".into(),
                best_estimate: best.log_value.exp(),
                error_estimate: f64::INFINITY,
            });
        }
        let rel = (cur - prev).exp_m1().abs();
        if rel <= best.rel_error {
            best = SphereEstimate { log_value: cur, rel_error: rel, order: next_m, evaluations: evals };
        }
        if rel <= tol {
            return Ok(best);
        }
        prev = cur;
        m = next_m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for m in [1, 2, 5, 12, 33] {
            let (x, w) = gauss_legendre(m);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            let deg = 2 * m - 2;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            assert!((q - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "{m}");
        }
    }

    #[test]
    fn gaussian_on_the_line() {
        let f = |x: f64| (-0.5 * x * x).exp();
        let e = integrate_axis(&f, Axis::Line { center: 0.0, scale: 1.0 }, 1e-12, 100_000).unwrap();
        assert!((e.value - TAU.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let f = |x: f64| x.abs().sqrt();
        match adaptive(&f, -1.0, 1.0, 1, 1e-15, 200) {
            Err(Error::Integration { best_estimate, .. }) => assert!((best_estimate - 4.0 / 3.0).abs() < 1e-2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn more_budget_never_raises_the_bound() {
        let f = |x: f64| 1.0 / (1e-3 + x * x);
        let bound = |budget: usize| match adaptive(&f, -1.0, 1.0, 1, 1e-14, budget) {
            Ok(e) => e.error,
            Err(Error::Integration { error_estimate, .. }) => error_estimate,
            Err(e) => panic!("{e}"),
        };
        let mut last = f64::INFINITY;
        for budget in [60, 120, 240, 480, 960, 1920] {
            let b = bound(budget);
            assert!(b <= last, "{budget}: {b} > {last}");
            last = b;
        }
    }

    #[test]
    fn sphere_areas() {
        for n in 2..=5 {
            let e = sphere_tensor_log_integral(n, &|_: &[f64]| 0.0, 1e-12, SPHERE_MAX_POINTS).unwrap();
            assert!((e.log_value - crate::special::log_sphere_area(n)).abs() < 1e-12, "{n}");
        }
    }

    #[test]
    fn nested_gaussian_in_two_dimensions() {
        let f = |x: &[f64]| (-0.5 * (x[0] * x[0] + x[1] * x[1]) - 0.3 * x[0] * x[1]).exp();
        let line = Axis::Line { center: 0.0, scale: 1.0 };
        let e = nested(&f, &[line, line], 1e-10, 1_000_000).unwrap();
        // det of [[1, 0.3], [0.3, 1]] is 0.91.
        assert!((e.value - TAU / 0.91f64.sqrt()).abs() < 1e-9 * e.value);
    }
}
