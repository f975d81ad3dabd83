//! Maximum likelihood estimation in natural coordinates.
//!
//! The average log-likelihood `ℓ(θ) = -<φ, T̄> + α·L̄ - A(θ)` is concave in
//! `θ`, so a damped Newton iteration started from a moment estimate
//! converges. Derivatives of `A` come from central differences.

use super::{Classical, FamilySpec, FamilyTag, Substitution};
use crate::construction::{NaturalParameter, SufficientStatistic};
use crate::error::{Error, Result};
use crate::linalg::{lorentz_inner, pack_sym, unpack_sym};
use crate::space::Point;
use crate::special::multivariate_log_gamma;
use crate::verify::quadrature;
use nalgebra::{DMatrix, DVector};

pub const MAX_NEWTON_ITERATIONS: usize = 200;
/// Stop once half the squared Newton decrement falls below this.
pub const DECREMENT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub theta: NaturalParameter,
    pub iterations: usize,
    /// Average log-likelihood at the estimate.
    pub mean_log_likelihood: f64,
    pub newton_decrement: f64,
}

pub fn fit_mle(spec: &FamilySpec, data: &[Point]) -> Result<NaturalParameter> {
    fit_mle_report(spec, data).map(|r| r.theta)
}

pub fn fit_mle_report(spec: &FamilySpec, data: &[Point]) -> Result<FitReport> {
    if data.is_empty() {
        return Err(Error::NonExistence("no data".into()));
    }
    let space = spec.space();
    for p in data {
        p.validate(&space)?;
    }
    let stats = data
        .iter()
        .map(|x| spec.sufficient_statistic(x))
        .collect::<Result<Vec<_>>>()?;
    let mean = mean_statistic(&stats);
    let start = start_value(spec, data, &mean)?;
    let coords = FreeCoords::new(spec);
    let log_partition = PartitionFn::new(spec, &start)?;
    newton(spec, &coords, &log_partition, &mean, coords.project(&start))
}

fn mean_statistic(stats: &[SufficientStatistic]) -> SufficientStatistic {
    let n = stats.len() as f64;
    let mut rep = vec![0.0; stats[0].rep_part.len()];
    let mut chr = vec![0.0; stats[0].char_part.len()];
    for s in stats {
        for (a, b) in rep.iter_mut().zip(&s.rep_part) {
            *a += b / n;
        }
        for (a, b) in chr.iter_mut().zip(&s.char_part) {
            *a += b / n;
        }
    }
    SufficientStatistic { rep_part: rep, char_part: chr }
}

/// Coordinates on `Θ` with the gauge directions removed.
pub(crate) struct FreeCoords {
    tag: FamilyTag,
    phi_len: usize,
    dim: usize,
}

impl FreeCoords {
    pub(crate) fn new(spec: &FamilySpec) -> Self {
        let phi_len = spec.phi_len();
        let total = spec.natural_len();
        let dim = match spec.tag {
            FamilyTag::Categorical { .. } | FamilyTag::Normal | FamilyTag::MvNormal { .. } | FamilyTag::FisherBingham { .. } => {
                total - 1
            }
            _ => total,
        };
        FreeCoords { tag: spec.tag, phi_len, dim }
    }

    pub(crate) fn project(&self, theta: &NaturalParameter) -> Vec<f64> {
        let mut flat = theta.flat();
        match self.tag {
            FamilyTag::Categorical { n } => flat.truncate(n - 1),
            FamilyTag::Normal | FamilyTag::MvNormal { .. } => {
                flat.pop();
            }
            FamilyTag::FisherBingham { n } => {
                let mut a = unpack_sym(&flat[n..], n);
                let shift = a.trace() / n as f64;
                for i in 0..n {
                    a[(i, i)] -= shift;
                }
                flat.truncate(n);
                flat.extend(pack_sym(&a));
                flat.pop();
            }
            _ => {}
        }
        flat
    }

    pub(crate) fn embed(&self, u: &[f64]) -> NaturalParameter {
        let mut flat = u.to_vec();
        match self.tag {
            FamilyTag::Categorical { .. } => flat.push(-u.iter().sum::<f64>()),
            FamilyTag::Normal | FamilyTag::MvNormal { .. } => flat.push(0.0),
            FamilyTag::FisherBingham { n } => {
                // Packed diagonal positions other than the last one.
                let mut idx = n;
                let mut diag = 0.0;
                for i in 0..n - 1 {
                    diag += u[idx];
                    idx += n - i;
                }
                flat.push(-diag);
            }
            _ => {}
        }
        NaturalParameter::from_flat(&flat, self.phi_len)
    }
}

/// `A(θ)`, with the Fisher–Bingham quadrature order frozen so the finite
/// differences see a smooth function.
struct PartitionFn<'a> {
    spec: &'a FamilySpec,
    sphere_order: Option<usize>,
}

impl<'a> PartitionFn<'a> {
    fn new(spec: &'a FamilySpec, start: &NaturalParameter) -> Result<Self> {
        let sphere_order = match spec.tag {
            FamilyTag::FisherBingham { n } => {
                let logf = |x: &[f64]| spec.construction.unnormalized_log_kernel(start, &Point::Sphere(DVector::from_column_slice(x))).unwrap_or(f64::NEG_INFINITY);
                let est = quadrature::sphere_tensor_log_integral(n, &logf, 1e-12, quadrature::SPHERE_MAX_POINTS)?;
                // One doubling of headroom for parameters visited along the way.
                Some(2 * est.order)
            }
            _ => None,
        };
        Ok(PartitionFn { spec, sphere_order })
    }

    fn eval(&self, theta: &NaturalParameter) -> Result<f64> {
        match (self.spec.tag, self.sphere_order) {
            (FamilyTag::FisherBingham { n }, Some(m)) => {
                self.spec.check_theta(theta)?;
                let logf = |x: &[f64]| -> f64 {
                    let p = Point::Sphere(DVector::from_column_slice(x));
                    self.spec.construction.unnormalized_log_kernel(theta, &p).unwrap_or(f64::NEG_INFINITY)
                };
                Ok(quadrature::sphere_tensor_fixed(n, m, &logf))
            }
            _ => self.spec.log_partition(theta),
        }
    }
}

fn objective(spec: &FamilySpec, a: &PartitionFn, mean: &SufficientStatistic, theta: &NaturalParameter) -> Result<f64> {
    Ok(spec.construction.kernel_from_statistic(theta, mean) - a.eval(theta)?)
}

fn newton(
    spec: &FamilySpec,
    coords: &FreeCoords,
    a: &PartitionFn,
    mean: &SufficientStatistic,
    mut u: Vec<f64>,
) -> Result<FitReport> {
    let d = coords.dim;
    let f = |u: &[f64]| -> Option<f64> {
        let theta = coords.embed(u);
        if !spec.theta_in_domain(&theta) {
            return None;
        }
        objective(spec, a, mean, &theta).ok()
    };
    let mut value = f(&u).ok_or_else(|| Error::Internal("starting value is outside the natural domain".into()))?;
    let mut decrement = f64::INFINITY;
    for iter in 0..MAX_NEWTON_ITERATIONS {
        let (g, h) = derivatives(&f, &u)?;
        // Solve (-H) step = g; fall back to a ridge if -H is not numerically positive definite.
        let neg_h = -&h;
        let gv = DVector::from_vec(g.clone());
        let step = match neg_h.clone().cholesky() {
            Some(c) => c.solve(&gv),
            None => {
                let ridge = neg_h.diagonal().amax().max(1e-12) * 1e-6;
                let mut m = neg_h.clone();
                let mut sol = None;
                for k in 0..30 {
                    for i in 0..d {
                        m[(i, i)] = neg_h[(i, i)] + ridge * 10f64.powi(k);
                    }
                    if let Some(c) = m.clone().cholesky() {
                        sol = Some(c.solve(&gv));
                        break;
                    }
                }
                sol.ok_or_else(|| Error::Convergence {
                    message: "Hessian of the log-likelihood is not negative definite".into(),
                    iterations: iter,
                    gradient_norm: gv.amax(),
                })?
            }
        };
        decrement = gv.dot(&step);
        if 0.5 * decrement <= DECREMENT_TOL {
            return Ok(FitReport {
                theta: finish(spec, coords, &u),
                iterations: iter,
                mean_log_likelihood: value,
                newton_decrement: decrement,
            });
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let cand: Vec<f64> = u.iter().zip(step.iter()).map(|(x, s)| x + t * s).collect();
            if let Some(v) = f(&cand) {
                if v >= value + 1e-4 * t * decrement {
                    u = cand;
                    value = v;
                    moved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            // The line search is below the noise of the finite differences.
            if 0.5 * decrement <= 1e-8 {
                return Ok(FitReport {
                    theta: finish(spec, coords, &u),
                    iterations: iter,
                    mean_log_likelihood: value,
                    newton_decrement: decrement,
                });
            }
            return Err(Error::Convergence {
                message: "line search failed to increase the likelihood".into(),
                iterations: iter,
                gradient_norm: gv.amax(),
            });
        }
    }
    Err(Error::Convergence {
        message: "Newton iteration limit reached".into(),
        iterations: MAX_NEWTON_ITERATIONS,
        gradient_norm: decrement.sqrt(),
    })
}

fn finish(spec: &FamilySpec, coords: &FreeCoords, u: &[f64]) -> NaturalParameter {
    spec.canonical_gauge(&coords.embed(u))
}

/// Central-difference gradient and Hessian of `f` at `u`; steps shrink until
/// every probe stays inside the domain.
fn derivatives(f: &dyn Fn(&[f64]) -> Option<f64>, u: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let d = u.len();
    let f0 = f(u).ok_or_else(|| Error::Internal("iterate left the natural domain".into()))?;
    let probe = |shifts: &[(usize, f64)]| -> Option<f64> {
        let mut v = u.to_vec();
        for &(i, s) in shifts {
            v[i] += s;
        }
        f(&v)
    };
    let mut hh = vec![0.0; d];
    let mut g = vec![0.0; d];
    for i in 0..d {
        let base = u[i].abs().max(1e-2);
        let mut h = 1e-6 * base;
        let mut ok = None;
        for _ in 0..40 {
            if let (Some(p), Some(m)) = (probe(&[(i, h)]), probe(&[(i, -h)])) {
                ok = Some((p - m) / (2.0 * h));
                break;
            }
            h *= 0.25;
        }
        g[i] = ok.ok_or_else(|| Error::Internal("cannot difference inside the natural domain".into()))?;
        let mut h2 = 1e-4 * base;
        for _ in 0..40 {
            if probe(&[(i, h2)]).is_some() && probe(&[(i, -h2)]).is_some() {
                break;
            }
            h2 *= 0.25;
        }
        hh[i] = h2;
    }
    let mut hess = DMatrix::zeros(d, d);
    for i in 0..d {
        let h = hh[i];
        let p = probe(&[(i, h)]);
        let m = probe(&[(i, -h)]);
        let (p, m) = (
            p.ok_or_else(|| Error::Internal("probe left the domain".into()))?,
            m.ok_or_else(|| Error::Internal("probe left the domain".into()))?,
        );
        hess[(i, i)] = (p - 2.0 * f0 + m) / (h * h);
        for j in 0..i {
            let (hi, hj) = (hh[i], hh[j]);
            let vals = [
                probe(&[(i, hi), (j, hj)]),
                probe(&[(i, hi), (j, -hj)]),
                probe(&[(i, -hi), (j, hj)]),
                probe(&[(i, -hi), (j, -hj)]),
            ];
            let v = if vals.iter().all(|v| v.is_some()) {
                let [pp, pm, mp, mm] = vals.map(|v| v.unwrap());
                (pp - pm - mp + mm) / (4.0 * hi * hj)
            } else {
                0.0
            };
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok((g, hess))
}

fn identical(data: &[Point]) -> bool {
    let first = data[0].coords();
    data.iter().all(|p| {
        p.coords()
            .iter()
            .zip(&first)
            .all(|(a, b)| (a - b).abs() <= 1e-14 * (1.0 + b.abs()))
    })
}

/// Moment / closed-form starting value; also where boundary estimates are detected.
fn start_value(spec: &FamilySpec, data: &[Point], mean: &SufficientStatistic) -> Result<NaturalParameter> {
    let none = |why: &str| Err(Error::NonExistence(why.to_string()));
    let n_data = data.len() as f64;
    let classical = match spec.tag {
        FamilyTag::Bernoulli => {
            let s = 0.5 * (1.0 + mean.rep_part[0]);
            if s <= 0.0 || s >= 1.0 {
                return none("all observations are equal, the estimate lies on the boundary s ∈ {0, 1}");
            }
            Classical::Bernoulli { s }
        }
        FamilyTag::Categorical { n } => {
            let mut counts = vec![0.0; n];
            for p in data {
                if let Point::Label(k) = p {
                    counts[k - 1] += 1.0;
                }
            }
            if counts.contains(&0.0) {
                return none("some category is never observed, so its probability estimate is 0");
            }
            Classical::Categorical { s: counts.iter().map(|c| c / n_data).collect() }
        }
        FamilyTag::Normal => {
            let m1 = mean.rep_part[1];
            let var = mean.rep_part[0] - m1 * m1;
            if !(var > 1e-14 * mean.rep_part[0].max(f64::MIN_POSITIVE)) || identical(data) {
                return none("sample variance is zero");
            }
            Classical::Normal { sigma: var.sqrt(), mu: m1 }
        }
        FamilyTag::MvNormal { n } => {
            let m = unpack_sym(&mean.rep_part, n + 1);
            let mu = m.view((0, n), (n, 1)).column(0).into_owned();
            let second = m.view((0, 0), (n, n)).into_owned();
            let cov = &second - &mu * mu.transpose();
            let cov = (&cov + cov.transpose()) * 0.5;
            let eig = cov.clone().symmetric_eigen().eigenvalues;
            if data.len() <= n || eig.min() <= 1e-12 * eig.max().max(f64::MIN_POSITIVE) {
                return none("sample covariance is singular");
            }
            Classical::MvNormal { sigma: cov, mu }
        }
        FamilyTag::GammaLambda { lambda } => {
            if identical(data) {
                return none("all observations are equal");
            }
            // y = x^λ is Gamma(k, θ^λ).
            let ys: Vec<f64> = data
                .iter()
                .map(|p| match p {
                    Point::Positive(x) => x.powf(lambda),
                    _ => f64::NAN,
                })
                .collect();
            let ybar = ys.iter().sum::<f64>() / n_data;
            let s = ybar.ln() - ys.iter().map(|y| y.ln()).sum::<f64>() / n_data;
            if !(s > 0.0) {
                return none("observations are numerically identical");
            }
            let k = (3.0 - s + ((s - 3.0).powi(2) + 24.0 * s).sqrt()) / (12.0 * s);
            let scale_y = ybar / k;
            Classical::GammaLambda { k, theta: scale_y.powf(1.0 / lambda) }
        }
        FamilyTag::Wishart { n } => {
            if identical(data) {
                return none("all observations are equal");
            }
            let xbar = unpack_sym(&mean.rep_part, n);
            let logdet_bar = crate::linalg::spd_log_det(&xbar).ok_or_else(|| Error::NonExistence("mean matrix is singular".into()))?;
            // char_part is ½ log det x.
            let mean_logdet = 2.0 * mean.char_part[0];
            let gap = logdet_bar - mean_logdet;
            if !(gap > 0.0) {
                return none("observations are numerically identical");
            }
            let alpha = wishart_profile_alpha(n, gap)?;
            let y = xbar.try_inverse().ok_or_else(|| Error::NonExistence("mean matrix is singular".into()))? * alpha;
            Classical::Wishart { y: (&y + y.transpose()) * 0.5, alpha }
        }
        FamilyTag::VonMises | FamilyTag::Vmf { .. } | FamilyTag::FisherBingham { .. } => {
            let ambient = match spec.tag {
                FamilyTag::Vmf { n } | FamilyTag::FisherBingham { n } => n,
                _ => 2,
            };
            let m = DVector::from_column_slice(&mean.rep_part[..ambient]);
            let r = m.norm();
            let dim = m.len() as f64;
            if r >= 1.0 - 1e-12 {
                return none("all directions coincide, the concentration estimate is infinite");
            }
            let kappa = if spec.tag == FamilyTag::VonMises {
                if r < 0.53 {
                    2.0 * r + r.powi(3) + 5.0 * r.powi(5) / 6.0
                } else if r < 0.85 {
                    -0.4 + 1.39 * r + 0.43 / (1.0 - r)
                } else {
                    1.0 / (r.powi(3) - 4.0 * r * r + 3.0 * r)
                }
            } else {
                r * (dim - r * r) / (1.0 - r * r)
            };
            let mu = if r > 0.0 { -m * (kappa / r) } else { m * 0.0 };
            match spec.tag {
                FamilyTag::VonMises => return Ok(NaturalParameter::new(mu.as_slice().to_vec(), vec![])),
                FamilyTag::Vmf { .. } => Classical::Vmf { mu },
                FamilyTag::FisherBingham { n } => {
                    if identical(data) {
                        return none("all observations are equal");
                    }
                    Classical::FisherBingham { mu, a: DMatrix::zeros(n, n) }
                }
                _ => unreachable!(),
            }
        }
        FamilyTag::Hyperboloid { n } => {
            if identical(data) {
                return none("all observations are equal");
            }
            let (kappa, xi) = hyperboloid_start(n, &mean.rep_part)?;
            Classical::Hyperboloid { kappa, xi }
        }
        FamilyTag::Poincare => {
            if identical(data) {
                return none("all observations are equal");
            }
            let mut vbar = DVector::zeros(3);
            for p in data {
                if let Point::HalfPlane { x, y } = p {
                    vbar += super::half_plane_to_hyperboloid(*x, *y) / n_data;
                }
            }
            let (kappa, xi) = hyperboloid_start(2, vbar.as_slice())?;
            let [a, b, c] = super::hyperboloid_to_poincare(kappa, &xi, Substitution::Corrected);
            Classical::Poincare { a, b, c }
        }
    };
    spec.from_classical(&classical)
}

fn hyperboloid_start(n: usize, vbar: &[f64]) -> Result<(f64, DVector<f64>)> {
    let q = -lorentz_inner(vbar, vbar);
    if !(q > 1.0 + 1e-12) || vbar[0] <= 0.0 {
        return Err(Error::NonExistence("observations are numerically identical".into()));
    }
    let xi = DVector::from_column_slice(vbar) / q.sqrt();
    // E[cosh r] - 1 is about (n/2)/κ for concentrated laws.
    let kappa = (0.5 * n as f64 / (q.sqrt() - 1.0)).max(1e-3);
    Ok((kappa, xi))
}

/// Solve `n log α - Σ_k ψ(α - (k-1)/2) = gap` for the Wishart shape along the
/// profile `y = α x̄⁻¹`.
fn wishart_profile_alpha(n: usize, gap: f64) -> Result<f64> {
    let lower = 0.5 * (n as f64 - 1.0);
    let h = |a: f64| -> Result<f64> {
        let eps = 1e-6 * (a - lower).min(a);
        let dlg = (multivariate_log_gamma(n, a + eps)? - multivariate_log_gamma(n, a - eps)?) / (2.0 * eps);
        Ok(n as f64 * a.ln() - dlg - gap)
    };
    // h decreases from +∞ at the lower bound to -gap at infinity.
    let mut lo = lower + 1e-9 * (1.0 + lower);
    let mut hi = lower + 1.0;
    while h(hi)? > 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::NonExistence("Wishart shape estimate diverges".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::sample;

    #[test]
    fn bernoulli_symmetric_data() {
        let spec = FamilySpec::from_name("bernoulli", None, None).unwrap();
        let theta = fit_mle(&spec, &[Point::Sign(1), Point::Sign(-1)]).unwrap();
        assert!(theta.phi[0].abs() < 1e-12);
        assert!(matches!(
            fit_mle(&spec, &[Point::Sign(1), Point::Sign(1)]),
            Err(Error::NonExistence(_))
        ));
    }

    #[test]
    fn normal_two_points() {
        let spec = FamilySpec::from_name("normal", None, None).unwrap();
        let theta = fit_mle(&spec, &[Point::Real(-1.0), Point::Real(1.0)]).unwrap();
        match spec.to_classical(&theta).unwrap() {
            Classical::Normal { sigma, mu } => {
                assert!(mu.abs() < 1e-10);
                assert!((sigma - 1.0).abs() < 1e-10);
            }
            _ => unreachable!(),
        }
        assert!(matches!(fit_mle(&spec, &vec![Point::Real(2.0); 3]), Err(Error::NonExistence(_))));
    }

    #[test]
    fn gamma_simulation() {
        let spec = FamilySpec::from_name("gamma", None, None).unwrap();
        let truth = spec.from_classical(&Classical::GammaLambda { k: 3.0, theta: 2.0 }).unwrap();
        let data = sample(&spec, &truth, 10_000, 21).unwrap();
        let est = fit_mle(&spec, &data).unwrap();
        match spec.to_classical(&est).unwrap() {
            Classical::GammaLambda { k, theta } => {
                assert!((k / 3.0 - 1.0).abs() < 0.05, "{k}");
                assert!((theta / 2.0 - 1.0).abs() < 0.05, "{theta}");
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn every_family_recovers_its_parameters() {
        for tag in FamilyTag::defaults() {
            let spec = FamilySpec::new(tag).unwrap();
            let truth = spec.example_parameters().pop().unwrap();
            let data = sample(&spec, &truth, 4000, 77).unwrap();
            let est = fit_mle_report(&spec, &data).unwrap_or_else(|e| panic!("{}: {e}", spec.name()));
            let (a, b) = (spec.canonical_gauge(&truth).flat(), est.theta.flat());
            let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 0.25 * scale, "{}: {a:?} vs {b:?}", spec.name());
            }
        }
    }
}
