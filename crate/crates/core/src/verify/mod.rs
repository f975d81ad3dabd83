//! Independent numerical checks.
//!
//! [`numeric_log_normalizer`] integrates the unnormalized kernel directly over
//! the sample space and never consults the closed-form log-partition, so it
//! can be compared against it. The report functions wrap the individual
//! comparisons and [`run_suite`] runs all of them for the catalog.

pub mod montecarlo;
pub mod quadrature;

use crate::construction::{MeasureSpec, NaturalParameter};
use crate::error::{Error, Result};
use crate::families::fit::FreeCoords;
use crate::families::sample::{sample, uniform_sphere};
use crate::families::{
    half_plane_to_hyperboloid, log_sum_exp, poincare_to_hyperboloid, Classical, FamilySpec,
    FamilyTag, Substitution,
};
use crate::group::{GroupElement, GroupPair};
use crate::linalg::{lorentz_inner, lorentz_to, unpack_sym};
use crate::random::{random_group_element, random_point};
use crate::space::{act, Point, SpaceTag};
use crate::special::{log_gamma, log_sphere_area};
use montecarlo::{importance, lattice_2d, McEstimate, FIBONACCI_N};
use nalgebra::{DMatrix, DVector};
use quadrature::{integrate_axis, nested, sphere_tensor_log_integral, Axis, QuadEstimate, SPHERE_MAX_POINTS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::f64::consts::{LN_2, TAU};
use std::time::Instant;

pub const DEFAULT_MC_BUDGET: usize = 1_000_000;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;
pub const DEFAULT_SEED: u64 = 20_240_601;
/// Tolerance for residuals between log densities.
pub const LOG_DENSITY_TOL: f64 = 1e-10;
/// Agreement required between deterministic quadrature and a closed form.
pub const QUADRATURE_CHECK_TOL: f64 = 1e-8;
pub const MULTIPLIER_CHECK_TOL: f64 = 1e-6;
/// Widening of the importance proposals relative to the integrand.
const SPD_PROPOSAL_SCALE: f64 = 1.01;
const HYPERBOLOID_PROPOSAL_RATE: f64 = 0.5;
const GAUSSIAN_PROPOSAL_SCALE: f64 = 1.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Exact sums on discrete spaces.
    Exact,
    AdaptiveQuadrature,
    TensorQuadrature,
    MonteCarlo,
    /// Randomly shifted rank-1 lattice (only on `H²`).
    RandomizedLattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSpec {
    pub scheme: Scheme,
    /// Maximum integrand evaluations (quadrature) or sample count (Monte Carlo).
    pub budget: usize,
    pub seed: u64,
    /// Target relative error; for Monte Carlo the largest acceptable relative standard error.
    pub tolerance: f64,
}

impl IntegratorSpec {
    pub fn quadrature(tolerance: f64) -> Self {
        IntegratorSpec { scheme: Scheme::AdaptiveQuadrature, budget: 10_000_000, seed: 0, tolerance }
    }

    pub fn monte_carlo(budget: usize, seed: u64) -> Self {
        IntegratorSpec { scheme: Scheme::MonteCarlo, budget, seed, tolerance: 1e-2 }
    }

    /// The scheme used for a space when nothing else is requested.
    pub fn default_for(space: &SpaceTag) -> Self {
        let mc = IntegratorSpec::monte_carlo(DEFAULT_MC_BUDGET, DEFAULT_SEED);
        let quad = IntegratorSpec::quadrature(DEFAULT_QUADRATURE_TOL);
        match *space {
            SpaceTag::SignSet | SpaceTag::Labels { .. } => IntegratorSpec { scheme: Scheme::Exact, budget: 1, ..quad },
            SpaceTag::RealLine | SpaceTag::PositiveReals | SpaceTag::Circle => quad,
            SpaceTag::Euclidean { n } if n <= 3 => IntegratorSpec { scheme: Scheme::TensorQuadrature, ..quad },
            SpaceTag::Sphere { n } if n <= 5 => IntegratorSpec {
                scheme: Scheme::TensorQuadrature,
                budget: SPHERE_MAX_POINTS,
                ..quad
            },
            SpaceTag::Hyperboloid { n: 2 } => IntegratorSpec {
                scheme: Scheme::RandomizedLattice,
                budget: 8 * FIBONACCI_N,
                ..mc
            },
            _ => mc,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::domain("integrator budget must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::domain("integrator tolerance must be positive"));
        }
        Ok(())
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self.scheme, Scheme::MonteCarlo | Scheme::RandomizedLattice)
    }
}

/// `log ∫_X dp̃_θ` with its relative error (standard error for stochastic schemes).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub log_value: f64,
    pub rel_error: f64,
    pub evaluations: usize,
    pub scheme: Scheme,
}

impl Estimate {
    fn from_quad(shift: f64, q: QuadEstimate, scheme: Scheme) -> Result<Self> {
        if !(q.value > 0.0) {
            return Err(Error::Integration {
                message: "integral is not positive".into(),
                best_estimate: q.value,
                error_estimate: q.error,
            });
        }
        Ok(Estimate { log_value: shift + q.value.ln(), rel_error: q.error / q.value, evaluations: q.evaluations, scheme })
    }

    fn from_mc(e: McEstimate, tol: f64, scheme: Scheme) -> Result<Self> {
        if !(e.rel_se <= tol) {
            return Err(Error::Integration {
                message: format!("relative standard error {:e} exceeds tolerance {tol:e}", e.rel_se),
                best_estimate: e.log_value.exp(),
                error_estimate: e.rel_se * e.log_value.exp(),
            });
        }
        Ok(Estimate { log_value: e.log_value, rel_error: e.rel_se, evaluations: e.samples, scheme })
    }
}

fn unsupported_scheme(space: &SpaceTag, scheme: Scheme) -> Error {
    Error::Unsupported(format!("scheme {scheme:?} is not available on {}", space.name()))
}

/// Integrate the unnormalized kernel of `θ` over the sample space.
pub fn numeric_log_normalizer(spec: &FamilySpec, theta: &NaturalParameter, integ: &IntegratorSpec) -> Result<Estimate> {
    integ.validate()?;
    spec.check_theta(theta)?;
    let space = spec.space();
    let logk = |p: &Point| spec.unnormalized_log_kernel(theta, p).unwrap_or(f64::NAN);
    let scheme = integ.scheme;
    match space {
        SpaceTag::SignSet => {
            let terms = [logk(&Point::Sign(1)), logk(&Point::Sign(-1))];
            Ok(Estimate { log_value: log_sum_exp(&terms), rel_error: 0.0, evaluations: 2, scheme: Scheme::Exact })
        }
        SpaceTag::Labels { n } => {
            let terms: Vec<f64> = (1..=n).map(|k| logk(&Point::Label(k))).collect();
            Ok(Estimate { log_value: log_sum_exp(&terms), rel_error: 0.0, evaluations: n, scheme: Scheme::Exact })
        }
        SpaceTag::RealLine => {
            require(scheme, &[Scheme::AdaptiveQuadrature], &space)?;
            let (phi1, phi2) = (theta.phi[0], theta.phi[1]);
            let (center, scale) = (-phi2 / phi1, 1.0 / (2.0 * phi1).sqrt());
            let shift = logk(&Point::Real(center));
            let f = |x: f64| (logk(&Point::Real(x)) - shift).exp();
            let q = integrate_axis(&f, Axis::Line { center, scale }, integ.tolerance, integ.budget)?;
            Estimate::from_quad(shift, q, scheme)
        }
        SpaceTag::PositiveReals => {
            require(scheme, &[Scheme::AdaptiveQuadrature], &space)?;
            // Haar measure dx/x is du for u = log x.
            let lambda = spec.tag.variant_lambda().unwrap_or(1.0);
            let (beta, alpha) = (theta.phi[0], theta.chi_exponents[0]);
            let k = alpha / lambda;
            let center = (k / beta).ln() / lambda;
            let scale = 1.0 / (lambda.abs() * k.sqrt());
            let shift = logk(&Point::Positive(center.exp()));
            let f = |u: f64| {
                let x = u.exp();
                if x == 0.0 || !x.is_finite() {
                    return 0.0;
                }
                (logk(&Point::Positive(x)) - shift).exp()
            };
            let q = integrate_axis(&f, Axis::Line { center, scale }, integ.tolerance, integ.budget)?;
            Estimate::from_quad(shift, q, scheme)
        }
        SpaceTag::Circle => {
            require(scheme, &[Scheme::AdaptiveQuadrature], &space)?;
            let shift = (0..256)
                .map(|i| logk(&Point::Angle(TAU * i as f64 / 256.0)))
                .fold(f64::NEG_INFINITY, f64::max);
            let f = |t: f64| (logk(&Point::Angle(t)) - shift).exp();
            let q = integrate_axis(&f, Axis::Periodic, integ.tolerance, integ.budget)?;
            Estimate::from_quad(shift, q, scheme)
        }
        SpaceTag::Euclidean { n } => {
            let Classical::MvNormal { sigma, mu } = spec.to_classical(theta)? else {
                return Err(Error::Internal("Euclidean space outside mvnormal".into()));
            };
            let l = sigma.cholesky().ok_or_else(|| Error::Internal("covariance lost definiteness".into()))?.l();
            let log_det_l: f64 = l.diagonal().iter().map(|d| d.ln()).sum();
            let shift = logk(&Point::Vector(mu.clone()));
            match scheme {
                Scheme::TensorQuadrature => {
                    if n > 3 {
                        return Err(Error::Unsupported("nested quadrature is limited to n <= 3".into()));
                    }
                    // x = μ + L z with Jacobian det L.
                    let f = |z: &[f64]| {
                        let x = &mu + &l * DVector::from_column_slice(z);
                        (logk(&Point::Vector(x)) - shift).exp()
                    };
                    let axes = vec![Axis::Line { center: 0.0, scale: 1.0 }; n];
                    let q = nested(&f, &axes, integ.tolerance, integ.budget)?;
                    let mut e = Estimate::from_quad(shift, q, scheme)?;
                    e.log_value += log_det_l;
                    Ok(e)
                }
                Scheme::MonteCarlo => {
                    let tau = GAUSSIAN_PROPOSAL_SCALE;
                    let mc = importance(integ.budget, integ.seed, |rng| {
                        let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                        let x = &mu + &l * &z * tau;
                        let log_q = -0.5 * n as f64 * TAU.ln() - n as f64 * tau.ln() - log_det_l - 0.5 * z.norm_squared();
                        Ok(logk(&Point::Vector(x)) - log_q)
                    })?;
                    Estimate::from_mc(mc, integ.tolerance, scheme)
                }
                s => Err(unsupported_scheme(&space, s)),
            }
        }
        SpaceTag::Sphere { n } => match scheme {
            Scheme::TensorQuadrature => {
                if n > 5 {
                    return Err(Error::Unsupported("sphere tensor rules are limited to n <= 5".into()));
                }
                let f = |x: &[f64]| logk(&Point::Sphere(DVector::from_column_slice(x)));
                let e = sphere_tensor_log_integral(n, &f, integ.tolerance, integ.budget)?;
                Ok(Estimate { log_value: e.log_value, rel_error: e.rel_error, evaluations: e.evaluations, scheme })
            }
            Scheme::MonteCarlo => {
                let area = log_sphere_area(n);
                let mc = importance(integ.budget, integ.seed, |rng| Ok(logk(&Point::Sphere(uniform_sphere(rng, n))) + area))?;
                Estimate::from_mc(mc, integ.tolerance, scheme)
            }
            s => Err(unsupported_scheme(&space, s)),
        },
        SpaceTag::SpdCone { n } => {
            require(scheme, &[Scheme::MonteCarlo], &space)?;
            let mc = spd_importance(spec, theta, n, integ)?;
            Estimate::from_mc(mc, integ.tolerance, scheme)
        }
        SpaceTag::Hyperboloid { n } => {
            let mc = hyperboloid_importance(spec, theta, n, integ)?;
            Estimate::from_mc(mc, integ.tolerance, scheme)
        }
        SpaceTag::UpperHalfPlane => {
            require(scheme, &[Scheme::MonteCarlo], &space)?;
            let mc = half_plane_importance(spec, theta, integ)?;
            Estimate::from_mc(mc, integ.tolerance, scheme)
        }
    }
}

fn require(scheme: Scheme, allowed: &[Scheme], space: &SpaceTag) -> Result<()> {
    if allowed.contains(&scheme) {
        Ok(())
    } else {
        Err(unsupported_scheme(space, scheme))
    }
}

/// `Sym⁺(n)` in whitened Cholesky coordinates: `x = C B Bᵀ Cᵀ` with `C Cᵀ = (2y)⁻¹`
/// and `B` lower triangular. Lebesgue measure on the packed upper triangle is
/// `det(C)^{n+1} 2ⁿ ∏ B_ii^{n-i+1} dB`. The proposal draws `B_ii² ~ τχ²_{ν-i+1}`
/// and `B_ij ~ N(0, τ)`.
fn spd_importance(spec: &FamilySpec, theta: &NaturalParameter, n: usize, integ: &IntegratorSpec) -> Result<McEstimate> {
    let y = unpack_sym(&theta.phi, n);
    let nu = theta.chi_exponents[0];
    let c = (y * 2.0)
        .try_inverse()
        .and_then(|m| ((&m + m.transpose()) * 0.5).cholesky())
        .ok_or_else(|| Error::Internal("y is not invertible".into()))?
        .l();
    let log_det_c: f64 = c.diagonal().iter().map(|d| d.ln()).sum();
    let tau = SPD_PROPOSAL_SCALE;
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let shape = 0.5 * (nu - i as f64);
        let g = Gamma::new(shape, 2.0 * tau).map_err(|e| Error::Internal(e.to_string()))?;
        diag.push((shape, log_gamma(shape)?, g));
    }
    let measure = spec.construction.measure.clone();
    importance(integ.budget, integ.seed, |rng| {
        let mut b = DMatrix::zeros(n, n);
        let mut log_q = 0.0;
        let mut log_jac = (n + 1) as f64 * log_det_c + n as f64 * LN_2;
        for i in 0..n {
            let (shape, lg, g) = &diag[i];
            let s: f64 = g.sample(rng);
            let bii = s.sqrt();
            b[(i, i)] = bii;
            // density of b = √s with s ~ Gamma(shape, 2τ)
            log_q += LN_2 + bii.ln() + (shape - 1.0) * s.ln() - s / (2.0 * tau) - lg - shape * (2.0 * tau).ln();
            log_jac += (n - i) as f64 * bii.ln();
            for j in 0..i {
                let z: f64 = rng.sample(StandardNormal);
                b[(i, j)] = z * tau.sqrt();
                log_q += -0.5 * (TAU * tau).ln() - 0.5 * z * z;
            }
        }
        let cb = &c * &b;
        let x = &cb * cb.transpose();
        let x = (&x + x.transpose()) * 0.5;
        let p = Point::Spd(x);
        let log_f = spec.unnormalized_log_kernel(theta, &p)? + measure.log_chart_density(&p);
        Ok(log_f + log_jac - log_q)
    })
}

/// Polar coordinates about `ξ = -φ/κ`: `v = Λ_ξ (1 + w, √(w(w+2)) ω)` with
/// volume `(w(w+2))^{(n-2)/2} dw dω`; `w ~ Gamma(n/2, rate κ/2)`, `ω` uniform.
fn hyperboloid_importance(spec: &FamilySpec, theta: &NaturalParameter, n: usize, integ: &IntegratorSpec) -> Result<McEstimate> {
    let phi = &theta.phi;
    let kappa = (-lorentz_inner(phi, phi)).sqrt();
    let xi = DVector::from_column_slice(phi) / -kappa;
    let frame = lorentz_to(&xi);
    let rate = HYPERBOLOID_PROPOSAL_RATE * kappa;
    let shape = 0.5 * n as f64;
    let log_norm_q = shape * rate.ln() - log_gamma(shape)? - log_sphere_area(n);
    let m = 0.5 * (n as f64 - 2.0);
    let weight = |w: f64, omega: &DVector<f64>| -> Result<f64> {
        if !(w > 0.0) || !w.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        let sinh_r = (w * (w + 2.0)).sqrt();
        let mut local = DVector::zeros(n + 1);
        local[0] = 1.0 + w;
        for i in 0..n {
            local[i + 1] = sinh_r * omega[i];
        }
        let mut v = &frame * local;
        // Re-project onto the sheet against rounding in the frame.
        let spatial = v.rows(1, n).norm_squared();
        v[0] = (1.0 + spatial).sqrt();
        let log_f = spec.unnormalized_log_kernel(theta, &Point::Hyperboloid(v))?;
        let log_q = log_norm_q + (shape - 1.0) * w.ln() - rate * w;
        Ok(log_f + m * (w * (w + 2.0)).ln() - log_q)
    };
    match integ.scheme {
        Scheme::MonteCarlo => {
            let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Internal(e.to_string()))?;
            importance(integ.budget, integ.seed, |rng| {
                let w: f64 = g.sample(rng);
                weight(w, &uniform_sphere(rng, n))
            })
        }
        Scheme::RandomizedLattice if n == 2 => {
            let shifts = (integ.budget / FIBONACCI_N).max(2);
            lattice_2d(shifts, integ.seed, |u1, u2| {
                if u1 >= 1.0 {
                    return f64::NEG_INFINITY;
                }
                let w = -(-u1).ln_1p() / rate;
                let (s, c) = (TAU * u2).sin_cos();
                weight(w, &DVector::from_vec(vec![c, s])).unwrap_or(f64::NAN)
            })
        }
        s => Err(unsupported_scheme(&SpaceTag::Hyperboloid { n }, s)),
    }
}

/// Upper half plane with `dx dy / y²`: `y` from an inverse Gaussian close to the
/// `y`-marginal and `x | y` from a widened normal.
fn half_plane_importance(spec: &FamilySpec, theta: &NaturalParameter, integ: &IntegratorSpec) -> Result<McEstimate> {
    let (a, b, c) = (theta.phi[0], theta.phi[1], theta.phi[2]);
    let d2 = a * c - b * b;
    let mean = d2.sqrt() / a;
    let shape = 0.9 * 2.0 * d2 / a;
    let ig = InverseGaussian::new(mean, shape).map_err(|e| Error::Internal(e.to_string()))?;
    let widen = 1.1;
    let x0 = -b / a;
    importance(integ.budget, integ.seed, |rng| {
        let y: f64 = ig.sample(rng);
        if !(y > 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        let var = widen * y / (2.0 * a);
        let z: f64 = rng.sample(StandardNormal);
        let x = x0 + var.sqrt() * z;
        let log_q_y = 0.5 * (shape / (TAU * y.powi(3))).ln() - shape * (y - mean).powi(2) / (2.0 * mean * mean * y);
        let log_q_x = -0.5 * (TAU * var).ln() - 0.5 * z * z;
        let log_f = spec.unnormalized_log_kernel(theta, &Point::HalfPlane { x, y })? - 2.0 * y.ln();
        Ok(log_f - log_q_y - log_q_x)
    })
}

/// `A(θ)` and its relative error (zero for closed forms).
pub fn log_partition_with_error(spec: &FamilySpec, theta: &NaturalParameter) -> Result<(f64, f64)> {
    match spec.normalizer {
        crate::families::NormalizerStrategy::ClosedForm => Ok((spec.log_partition(theta)?, 0.0)),
        crate::families::NormalizerStrategy::Numeric => {
            let e = numeric_log_normalizer(spec, theta, &IntegratorSpec::default_for(&spec.space()))?;
            Ok((e.log_value, e.rel_error))
        }
    }
}

/// Outcome of one check: `passed ⇔ residual ≤ tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check_tag: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub metadata: serde_json::Value,
}

impl VerificationReport {
    pub fn new(check_tag: impl Into<String>, residual: f64, tolerance: f64, metadata: serde_json::Value) -> Self {
        VerificationReport {
            check_tag: check_tag.into(),
            residual,
            tolerance,
            passed: residual <= tolerance,
            metadata,
        }
    }

    fn failed(check_tag: String, err: &Error) -> Self {
        VerificationReport::new(check_tag, f64::INFINITY, 0.0, json!({ "error": err.to_string() }))
    }

    /// One JSON object per line. Non-finite residuals are written as strings.
    pub fn to_json_line(&self) -> String {
        let num = |v: f64| if v.is_finite() { json!(v) } else { json!(v.to_string()) };
        json!({
            "check_tag": self.check_tag,
            "residual": num(self.residual),
            "tolerance": num(self.tolerance),
            "passed": self.passed,
            "metadata": self.metadata,
        })
        .to_string()
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// `|∫ dp̃_θ / exp(A(θ)) - 1|`, with the closed form on one side and direct
/// integration on the other. Stochastic schemes are judged against three
/// standard errors, deterministic ones against [`QUADRATURE_CHECK_TOL`].
pub fn normalization_residual(spec: &FamilySpec, theta: &NaturalParameter, integ: &IntegratorSpec) -> Result<VerificationReport> {
    if spec.normalizer != crate::families::NormalizerStrategy::ClosedForm {
        return Err(Error::Unsupported(format!("{} has no closed-form normalizer", spec.name())));
    }
    let start = Instant::now();
    let a = spec.log_partition(theta)?;
    let est = numeric_log_normalizer(spec, theta, integ)?;
    let residual = (est.log_value - a).exp_m1().abs();
    let tolerance = if integ.is_stochastic() {
        3.0 * est.rel_error
    } else {
        QUADRATURE_CHECK_TOL.max(integ.tolerance)
    };
    Ok(VerificationReport::new(
        format!("{}.normalization", spec.name()),
        residual,
        tolerance,
        json!({
            "theta": theta.flat(),
            "closed_form_log": a,
            "numeric_log": est.log_value,
            "estimate_rel_error": est.rel_error,
            "evaluations": est.evaluations,
            "integrator": integ,
            "runtime_ms": elapsed_ms(start),
        }),
    ))
}

/// `max_x |log p_{θ'}(g·x) + log f(g) - log p_θ(x)|` with `θ' = g·θ`.
pub fn invariance_residual(spec: &FamilySpec, theta: &NaturalParameter, g: &GroupElement, points: &[Point]) -> Result<VerificationReport> {
    let start = Instant::now();
    let pair = spec.pair();
    g.check_pair(&pair)?;
    let theta2 = spec.construction.transform_parameter(g, theta)?;
    spec.check_theta(&theta2)?;
    let (a1, e1) = log_partition_with_error(spec, theta)?;
    let (a2, e2) = log_partition_with_error(spec, &theta2)?;
    let log_f = spec.construction.measure.log_multiplier(g);
    let mut residual: f64 = 0.0;
    for x in points {
        let gx = act(&pair, g, x)?;
        let lhs = spec.unnormalized_log_kernel(&theta2, &gx)? - a2 + log_f;
        let rhs = spec.unnormalized_log_kernel(theta, x)? - a1;
        residual = residual.max((lhs - rhs).abs());
    }
    Ok(VerificationReport::new(
        format!("{}.invariance", spec.name()),
        residual,
        LOG_DENSITY_TOL + e1 + e2,
        json!({
            "theta": theta.flat(),
            "transformed_theta": theta2.flat(),
            "group_element": g.kind_name(),
            "log_multiplier": log_f,
            "points": points.len(),
            "runtime_ms": elapsed_ms(start),
        }),
    ))
}

/// Compare the half-plane family at `(a, b, c)` with the `H²` family at the
/// parameter given by `sub`, point by point through the map `ℋ → H²`.
pub fn poincare_pullback_check(params: &[[f64; 3]], points: &[(f64, f64)], sub: Substitution) -> Result<VerificationReport> {
    let start = Instant::now();
    let poincare = FamilySpec::new(FamilyTag::Poincare)?;
    let hyper = FamilySpec::new(FamilyTag::Hyperboloid { n: 2 })?;
    let mut residual: f64 = 0.0;
    for abc in params {
        let theta_p = poincare.natural(abc)?;
        poincare.check_theta(&theta_p)?;
        let (kappa, xi) = poincare_to_hyperboloid(*abc, sub)?;
        let theta_h = hyper.from_classical(&Classical::Hyperboloid { kappa, xi })?;
        let ap = poincare.log_partition(&theta_p)?;
        let ah = hyper.log_partition(&theta_h)?;
        for &(x, y) in points {
            let lp = poincare.unnormalized_log_kernel(&theta_p, &Point::HalfPlane { x, y })? - ap;
            let v = half_plane_to_hyperboloid(x, y);
            let lh = hyper.unnormalized_log_kernel(&theta_h, &Point::Hyperboloid(v))? - ah;
            residual = residual.max((lp - lh).abs());
        }
    }
    Ok(VerificationReport::new(
        format!("poincare.pullback.{}", match sub {
            Substitution::Corrected => "corrected",
            Substitution::Literal => "literal",
        }),
        residual,
        LOG_DENSITY_TOL,
        json!({
            "substitution": sub,
            "parameters": params.len(),
            "points": points.len(),
            "runtime_ms": elapsed_ms(start),
        }),
    ))
}

fn bump(d2: f64, r2: f64) -> f64 {
    if d2 >= r2 {
        0.0
    } else {
        (-1.0 / (1.0 - d2 / r2)).exp()
    }
}

/// `∫ φ(g·x) dμ(x)` against `f(g)⁻¹ ∫ φ dμ` for a smooth bump `φ` in chart
/// coordinates. Not available on `Sym⁺(n)` and `Hⁿ`.
pub fn multiplier_check(pair: &GroupPair, measure: &MeasureSpec, g: &GroupElement, integ: &IntegratorSpec) -> Result<VerificationReport> {
    let start = Instant::now();
    integ.validate()?;
    g.check_pair(pair)?;
    if pair.space() != measure.space {
        return Err(Error::dims(pair.space().chart_len(), measure.space.chart_len()));
    }
    let space = measure.space;
    let tol = integ.tolerance;
    let budget = integ.budget;
    let gx = |x: &Point| act(pair, g, x);
    let density = |x: &Point| measure.log_chart_density(x).exp();
    let (moved, reference): (f64, f64) = match space {
        SpaceTag::SignSet => {
            let phi = |s: i8| 2.0 + s as f64;
            let mut m = 0.0;
            for s in [1i8, -1] {
                if let Point::Sign(t) = gx(&Point::Sign(s))? {
                    m += phi(t);
                }
            }
            (m, phi(1) + phi(-1))
        }
        SpaceTag::Labels { n } => {
            let phi = |k: usize| 1.0 + (k * k) as f64;
            let mut m = 0.0;
            for k in 1..=n {
                if let Point::Label(j) = gx(&Point::Label(k))? {
                    m += phi(j);
                }
            }
            (m, (1..=n).map(phi).sum())
        }
        SpaceTag::RealLine | SpaceTag::PositiveReals => {
            let (center, r) = (1.3, 0.8);
            let phi = |t: f64| bump((t - center).powi(2), r * r);
            let wrap = |t: f64| if space == SpaceTag::RealLine { Point::Real(t) } else { Point::Positive(t) };
            let unwrap = |p: Point| match p {
                Point::Real(t) | Point::Positive(t) => t,
                _ => f64::NAN,
            };
            let inv = g.inverse()?;
            let ends = [unwrap(act(pair, &inv, &wrap(center - r))?), unwrap(act(pair, &inv, &wrap(center + r))?)];
            let (lo, hi) = (ends[0].min(ends[1]), ends[0].max(ends[1]));
            let moved = |t: f64| {
                let p = wrap(t);
                gx(&p).map(|q| phi(unwrap(q)) * density(&p)).unwrap_or(f64::NAN)
            };
            let fixed = |t: f64| phi(t) * density(&wrap(t));
            (
                integrate_axis(&moved, Axis::Interval(lo, hi), tol, budget)?.value,
                integrate_axis(&fixed, Axis::Interval(center - r, center + r), tol, budget)?.value,
            )
        }
        SpaceTag::Euclidean { n } => {
            if n > 3 {
                return Err(Error::Unsupported("multiplier check on R^n is limited to n <= 3".into()));
            }
            let (linear, shift) = match g {
                GroupElement::Affine { linear, shift } => (linear.clone(), shift.clone()),
                _ => return Err(Error::Internal("affine pair without affine element".into())),
            };
            let center = DVector::from_element(n, 0.4);
            let r = 0.9;
            let phi = |x: &DVector<f64>| bump((x - &center).norm_squared(), r * r);
            let inv = linear.clone().try_inverse().ok_or_else(|| Error::domain("singular linear part"))?;
            let pre_center = &inv * (&center - &shift);
            let axes_moved: Vec<Axis> = (0..n)
                .map(|i| {
                    let half = r * inv.row(i).norm();
                    Axis::Interval(pre_center[i] - half, pre_center[i] + half)
                })
                .collect();
            let axes_fixed: Vec<Axis> = (0..n).map(|i| Axis::Interval(center[i] - r, center[i] + r)).collect();
            let moved = |x: &[f64]| phi(&(&linear * DVector::from_column_slice(x) + &shift));
            let fixed = |x: &[f64]| phi(&DVector::from_column_slice(x));
            (nested(&moved, &axes_moved, tol, budget)?.value, nested(&fixed, &axes_fixed, tol, budget)?.value)
        }
        SpaceTag::Circle => {
            let (center, r) = (1.0, 0.8);
            let phi = |t: f64| {
                let d = (t - center).rem_euclid(TAU);
                bump(d.min(TAU - d).powi(2), r * r)
            };
            let moved = |t: f64| match gx(&Point::Angle(t)) {
                Ok(Point::Angle(s)) => phi(s),
                _ => f64::NAN,
            };
            (
                integrate_axis(&moved, Axis::Periodic, tol, budget)?.value,
                integrate_axis(&phi, Axis::Periodic, tol, budget)?.value,
            )
        }
        SpaceTag::Sphere { n } => {
            if n > 5 {
                return Err(Error::Unsupported("multiplier check on spheres is limited to n <= 5".into()));
            }
            let center = DVector::from_fn(n, |i, _| if i == 0 { 0.6 } else { 0.8 / ((n - 1) as f64).sqrt() });
            let r2: f64 = 0.8;
            let log_phi = |x: &DVector<f64>| {
                let d2 = (x - &center).norm_squared();
                if d2 >= r2 {
                    f64::NEG_INFINITY
                } else {
                    -1.0 / (1.0 - d2 / r2)
                }
            };
            let moved = |x: &[f64]| match gx(&Point::Sphere(DVector::from_column_slice(x))) {
                Ok(Point::Sphere(y)) => log_phi(&y),
                _ => f64::NAN,
            };
            let fixed = |x: &[f64]| log_phi(&DVector::from_column_slice(x));
            (
                sphere_tensor_log_integral(n, &moved, tol, budget)?.log_value.exp(),
                sphere_tensor_log_integral(n, &fixed, tol, budget)?.log_value.exp(),
            )
        }
        SpaceTag::UpperHalfPlane => {
            let (cx, cy, r) = (0.3, 1.2, 0.5);
            let phi = |x: f64, y: f64| bump((x - cx).powi(2) + (y - cy).powi(2), r * r);
            let inv = g.inverse()?;
            let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for k in 0..720 {
                let t = TAU * k as f64 / 720.0;
                if let Point::HalfPlane { x, y } = act(pair, &inv, &Point::HalfPlane { x: cx + r * t.cos(), y: cy + r * t.sin() })? {
                    x0 = x0.min(x);
                    x1 = x1.max(x);
                    y0 = y0.min(y);
                    y1 = y1.max(y);
                }
            }
            let (mx, my) = (0.02 * (x1 - x0), 0.02 * (y1 - y0));
            let moved = |p: &[f64]| {
                if p[1] <= 0.0 {
                    return 0.0;
                }
                match gx(&Point::HalfPlane { x: p[0], y: p[1] }) {
                    Ok(Point::HalfPlane { x, y }) => phi(x, y) / (p[1] * p[1]),
                    _ => f64::NAN,
                }
            };
            let fixed = |p: &[f64]| phi(p[0], p[1]) / (p[1] * p[1]);
            (
                nested(&moved, &[Axis::Interval(x0 - mx, x1 + mx), Axis::Interval((y0 - my).max(0.0), y1 + my)], tol, budget)?.value,
                nested(&fixed, &[Axis::Interval(cx - r, cx + r), Axis::Interval(cy - r, cy + r)], tol, budget)?.value,
            )
        }
        SpaceTag::SpdCone { .. } | SpaceTag::Hyperboloid { .. } => {
            return Err(Error::Unsupported(format!("multiplier check is not implemented on {}", space.name())))
        }
    };
    let log_f = measure.log_multiplier(g);
    let expected = reference * (-log_f).exp();
    let residual = (moved / expected - 1.0).abs();
    Ok(VerificationReport::new(
        format!("{}.multiplier", space.name()),
        residual,
        MULTIPLIER_CHECK_TOL,
        json!({
            "group_element": g.kind_name(),
            "multiplier": log_f.exp(),
            "moved_integral": moved,
            "reference_integral": reference,
            "integrator": integ,
            "runtime_ms": elapsed_ms(start),
        }),
    ))
}

/// Central-difference `∂A/∂u` along the free (gauge-fixed) coordinates.
pub fn log_partition_gradient(spec: &FamilySpec, theta: &NaturalParameter) -> Result<Vec<f64>> {
    let coords = FreeCoords::new(spec);
    let u0 = coords.project(theta);
    let mut grad = Vec::with_capacity(u0.len());
    for i in 0..u0.len() {
        let mut h = 1e-5 * u0[i].abs().max(1e-1);
        let mut value = None;
        for _ in 0..30 {
            let mut up = u0.clone();
            let mut dn = u0.clone();
            up[i] += h;
            dn[i] -= h;
            let (tu, td) = (coords.embed(&up), coords.embed(&dn));
            if spec.theta_in_domain(&tu) && spec.theta_in_domain(&td) {
                value = Some((log_partition_with_error(spec, &tu)?.0 - log_partition_with_error(spec, &td)?.0) / (2.0 * h));
                break;
            }
            h *= 0.25;
        }
        grad.push(value.ok_or_else(|| Error::Internal("cannot difference inside the natural domain".into()))?);
    }
    Ok(grad)
}

/// Exponential-family moment identity: `∂A/∂u_k = E_θ[∂_{u_k} log p̃_θ(x)]`, the
/// right side estimated from `draws` samples. The residual is the largest
/// coordinate discrepancy in units of its standard error.
pub fn moment_identity_check(spec: &FamilySpec, theta: &NaturalParameter, draws: usize, seed: u64) -> Result<VerificationReport> {
    let start = Instant::now();
    let coords = FreeCoords::new(spec);
    let u0 = coords.project(theta);
    let base = coords.embed(&u0);
    let grad = log_partition_gradient(spec, theta)?;
    let xs = sample(spec, theta, draws, seed)?;
    let d = u0.len();
    // Kernel is affine in θ, so unit differences give the partial derivatives exactly.
    let dirs: Vec<NaturalParameter> = (0..d)
        .map(|k| {
            let mut u = u0.clone();
            u[k] += 1.0;
            coords.embed(&u)
        })
        .collect();
    let mut sums = vec![(0.0, 0.0); d];
    for x in &xs {
        let k0 = spec.unnormalized_log_kernel(&base, x)?;
        for (k, dir) in dirs.iter().enumerate() {
            let v = spec.unnormalized_log_kernel(dir, x)? - k0;
            sums[k].0 += v;
            sums[k].1 += v * v;
        }
    }
    let n = draws as f64;
    let mut residual: f64 = 0.0;
    let mut z_scores = Vec::with_capacity(d);
    for k in 0..d {
        let mean = sums[k].0 / n;
        let var = (sums[k].1 / n - mean * mean).max(0.0) * n / (n - 1.0);
        let se = (var / n).sqrt().max(1e-9 * (1.0 + mean.abs()));
        let z = (grad[k] - mean).abs() / se;
        z_scores.push(z);
        residual = residual.max(z);
    }
    Ok(VerificationReport::new(
        format!("{}.moment_identity", spec.name()),
        residual,
        3.0,
        json!({
            "theta": theta.flat(),
            "gradient": grad,
            "z_scores": z_scores,
            "draws": draws,
            "seed": seed,
            "runtime_ms": elapsed_ms(start),
        }),
    ))
}

/// Options for [`run_suite`].
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    /// Restrict to one family.
    pub family: Option<FamilyTag>,
    pub mc_budget: usize,
    /// Quadrature tolerance.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { family: None, mc_budget: DEFAULT_MC_BUDGET, tolerance: DEFAULT_QUADRATURE_TOL, seed: DEFAULT_SEED }
    }
}

impl SuiteOptions {
    fn integrator(&self, space: &SpaceTag) -> IntegratorSpec {
        let mut spec = IntegratorSpec::default_for(space);
        if spec.is_stochastic() {
            spec.seed = self.seed;
            spec.budget = if spec.scheme == Scheme::RandomizedLattice {
                self.mc_budget.max(2 * FIBONACCI_N)
            } else {
                self.mc_budget
            };
        } else if spec.scheme != Scheme::Exact {
            spec.tolerance = self.tolerance;
        }
        spec
    }
}

type Check = (String, Box<dyn Fn() -> Result<VerificationReport> + Send + Sync>);

/// Run every check for the selected families; output is ordered by tag.
pub fn run_suite(options: &SuiteOptions) -> Vec<VerificationReport> {
    let tags: Vec<FamilyTag> = match options.family {
        Some(t) => vec![t],
        None => FamilyTag::defaults(),
    };
    let mut checks: Vec<Check> = Vec::new();
    for tag in tags {
        let spec = match FamilySpec::new(tag) {
            Ok(s) => s,
            Err(e) => {
                let msg = e.clone();
                checks.push((format!("{}.construction", tag.name()), Box::new(move || Err(msg.clone()))));
                continue;
            }
        };
        let name = spec.name();
        let space = spec.space();
        let integ = options.integrator(&space);
        for (i, theta) in spec.example_parameters().into_iter().enumerate() {
            let s = spec.clone();
            let t = theta.clone();
            if spec.normalizer == crate::families::NormalizerStrategy::ClosedForm {
                checks.push((
                    format!("{name}.normalization.{i}"),
                    Box::new(move || normalization_residual(&s, &t, &integ)),
                ));
            } else {
                let mc = IntegratorSpec::monte_carlo(options.mc_budget, options.seed);
                checks.push((
                    format!("{name}.normalization.{i}"),
                    Box::new(move || numeric_normalizer_agreement(&s, &t, &integ, &mc)),
                ));
            }
            let s = spec.clone();
            let t = theta.clone();
            let seed = options.seed.wrapping_add(i as u64);
            checks.push((
                format!("{name}.invariance.{i}"),
                Box::new(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let pts: Vec<Point> = (0..20).map(|_| random_point(&mut rng, &s.space())).collect();
                    let mut worst: Option<VerificationReport> = None;
                    for _ in 0..5 {
                        let g = random_group_element(&mut rng, &s.pair());
                        let r = invariance_residual(&s, &t, &g, &pts)?;
                        if worst.as_ref().is_none_or(|w| r.residual / r.tolerance > w.residual / w.tolerance) {
                            worst = Some(r);
                        }
                    }
                    Ok(worst.expect("five elements were checked"))
                }),
            ));
            if spec.normalizer == crate::families::NormalizerStrategy::ClosedForm && i == 1 {
                let s = spec.clone();
                let t = theta.clone();
                let seed = options.seed;
                checks.push((
                    format!("{name}.moment_identity"),
                    Box::new(move || moment_identity_check(&s, &t, 20_000, seed)),
                ));
            }
        }
        if !matches!(space, SpaceTag::SpdCone { .. } | SpaceTag::Hyperboloid { .. }) {
            let pair = spec.pair();
            let measure = spec.construction.measure.clone();
            let seed = options.seed;
            let quad = IntegratorSpec::quadrature(1e-10);
            checks.push((
                format!("{name}.multiplier"),
                Box::new(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let g = random_group_element(&mut rng, &pair);
                    multiplier_check(&pair, &measure, &g, &quad)
                }),
            ));
        }
        if tag == FamilyTag::Poincare {
            let seed = options.seed;
            checks.push((
                "poincare.pullback.corrected".into(),
                Box::new(move || {
                    let (params, points) = pullback_inputs(seed, 50, 50);
                    poincare_pullback_check(&params, &points, Substitution::Corrected)
                }),
            ));
            checks.push((
                "poincare.pullback.literal_rejected".into(),
                Box::new(move || {
                    let (params, points) = pullback_inputs(seed, 50, 50);
                    literal_substitution_rejected(&params, &points)
                }),
            ));
        }
    }
    let mut reports: Vec<VerificationReport> = checks
        .into_par_iter()
        .map(|(tag, check)| match check() {
            Ok(mut r) => {
                r.check_tag = tag;
                r
            }
            Err(e) => VerificationReport::failed(tag, &e),
        })
        .collect();
    reports.sort_by(|a, b| a.check_tag.cmp(&b.check_tag));
    reports
}

/// Two independent integrations of a numeric normalizer must agree within
/// three Monte Carlo standard errors plus the quadrature error.
pub fn numeric_normalizer_agreement(
    spec: &FamilySpec,
    theta: &NaturalParameter,
    primary: &IntegratorSpec,
    mc: &IntegratorSpec,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let a = numeric_log_normalizer(spec, theta, primary)?;
    let b = numeric_log_normalizer(spec, theta, mc)?;
    Ok(VerificationReport::new(
        format!("{}.normalization", spec.name()),
        (a.log_value - b.log_value).exp_m1().abs(),
        3.0 * b.rel_error + a.rel_error,
        json!({
            "theta": theta.flat(),
            "primary_log": a.log_value,
            "monte_carlo_log": b.log_value,
            "primary": primary,
            "monte_carlo": mc,
            "runtime_ms": elapsed_ms(start),
        }),
    ))
}

/// Random in-domain `(a, b, c)` and half-plane points for the pullback check.
pub fn pullback_inputs(seed: u64, n_params: usize, n_points: usize) -> (Vec<[f64; 3]>, Vec<(f64, f64)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Vec::with_capacity(n_params);
    while params.len() < n_params {
        let a: f64 = rng.random_range(0.2..3.0);
        let c: f64 = rng.random_range(0.2..3.0);
        let b: f64 = rng.random_range(-1.0..1.0) * (a * c).sqrt() * 0.95;
        params.push([a, b, c]);
    }
    let points = (0..n_points)
        .map(|_| (rng.random_range(-2.0..2.0), (rng.random_range(-1.5f64..1.5)).exp()))
        .collect();
    (params, points)
}

/// The literal substitution must disagree with the half-plane family by more
/// than `0.1` in log density; reported as `0.1 / residual ≤ 1`.
pub fn literal_substitution_rejected(params: &[[f64; 3]], points: &[(f64, f64)]) -> Result<VerificationReport> {
    let lit = poincare_pullback_check(params, points, Substitution::Literal)?;
    Ok(VerificationReport::new(
        "poincare.pullback.literal_rejected",
        0.1 / lit.residual,
        1.0,
        json!({ "literal_residual": lit.residual, "required_minimum": 0.1 }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_sums() {
        let b = FamilySpec::from_name("bernoulli", None, None).unwrap();
        let t = NaturalParameter::new(vec![0.7], vec![]);
        let e = numeric_log_normalizer(&b, &t, &IntegratorSpec::default_for(&b.space())).unwrap();
        assert!((e.log_value - ((-0.7f64).exp() + 0.7f64.exp()).ln()).abs() < 1e-15);
    }

    #[test]
    fn uniform_sphere_area() {
        let fb = FamilySpec::from_name("fisher_bingham", Some(3), None).unwrap();
        let t = NaturalParameter::new(vec![0.0; 9], vec![]);
        let e = numeric_log_normalizer(&fb, &t, &IntegratorSpec::default_for(&fb.space())).unwrap();
        assert!((e.log_value - (4.0 * PI).ln()).abs() < 1e-12);
    }

    #[test]
    fn standard_normal_integral() {
        let n = FamilySpec::from_name("normal", None, None).unwrap();
        let t = NaturalParameter::new(vec![0.5, 0.0, 0.0], vec![]);
        let e = numeric_log_normalizer(&n, &t, &IntegratorSpec::default_for(&n.space())).unwrap();
        assert!((e.log_value.exp() - TAU.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn identity_has_zero_invariance_residual() {
        let v = FamilySpec::from_name("vmf", Some(3), None).unwrap();
        let t = v.example_parameters().pop().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<Point> = (0..10).map(|_| random_point(&mut rng, &v.space())).collect();
        let r = invariance_residual(&v, &t, &v.pair().identity(), &pts).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn translation_invariance_of_normal() {
        let n = FamilySpec::from_name("normal", None, None).unwrap();
        let t = n.example_parameters()[1].clone();
        let pts: Vec<Point> = (0..100).map(|i| Point::Real(-5.0 + 0.1 * i as f64)).collect();
        let r = invariance_residual(&n, &t, &GroupElement::affine_line(1.0, 3.0), &pts).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn pullback_at_i() {
        let r = poincare_pullback_check(&[[1.0, 0.0, 1.0]], &[(0.0, 1.0)], Substitution::Corrected).unwrap();
        assert!(r.residual <= 1e-12);
    }

    #[test]
    fn multiplier_examples() {
        let quad = IntegratorSpec::quadrature(1e-10);
        let line = MeasureSpec::for_space(SpaceTag::RealLine);
        let r = multiplier_check(&GroupPair::AffineLine, &line, &GroupElement::affine_line(2.0, 0.0), &quad).unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.metadata["multiplier"].as_f64().unwrap() - 2.0).abs() < 1e-15);
        let pos = MeasureSpec::for_space(SpaceTag::PositiveReals);
        let r = multiplier_check(&GroupPair::PositiveTrivial, &pos, &GroupElement::Positive(3.0), &quad).unwrap();
        assert!(r.residual <= 1e-8, "{r:?}");
        let hp = MeasureSpec::for_space(SpaceTag::UpperHalfPlane);
        let g = GroupElement::SpecialLinear(DMatrix::from_row_slice(2, 2, &[1.2, 0.5, 0.1, 1.0 / 1.2 + 0.5 * 0.1 / 1.2]));
        let r = multiplier_check(&GroupPair::SpecialLinearRotation, &hp, &g, &quad).unwrap();
        assert!(r.passed, "{r:?}");
    }
}
