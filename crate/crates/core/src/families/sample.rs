//! Seeded samplers for every family.

use super::{poincare_to_hyperboloid, Classical, FamilySpec, FamilyTag, Substitution};
use crate::construction::NaturalParameter;
use crate::error::{Error, Result};
use crate::linalg::{lorentz_to, rotation_to};
use crate::space::{wrap_angle, Point};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

/// Rejection loops give up after this many proposals per accepted draw.
pub const MAX_TRIES_PER_DRAW: usize = 100_000;

/// `count` i.i.d. draws from `p_θ`, deterministic in `seed`.
pub fn sample(spec: &FamilySpec, theta: &NaturalParameter, count: usize, seed: u64) -> Result<Vec<Point>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(spec, theta, count, &mut rng)
}

pub fn sample_with<R: Rng + ?Sized>(
    spec: &FamilySpec,
    theta: &NaturalParameter,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    spec.check_theta(theta)?;
    if count == 0 {
        return Err(Error::domain("sample count must be positive"));
    }
    let classical = spec.to_classical(theta)?;
    let phi = &theta.phi;
    let mut out = Vec::with_capacity(count);
    match (spec.tag, classical) {
        (FamilyTag::Bernoulli, Classical::Bernoulli { s }) => {
            for _ in 0..count {
                out.push(Point::Sign(if rng.random::<f64>() < s { 1 } else { -1 }));
            }
        }
        (FamilyTag::Categorical { .. }, Classical::Categorical { s }) => {
            let mut cum = Vec::with_capacity(s.len());
            let mut acc = 0.0;
            for p in &s {
                acc += p;
                cum.push(acc);
            }
            for _ in 0..count {
                let u = rng.random::<f64>() * acc;
                let k = cum.iter().position(|c| u < *c).unwrap_or(s.len() - 1);
                out.push(Point::Label(k + 1));
            }
        }
        (FamilyTag::Normal, Classical::Normal { sigma, mu }) => {
            for _ in 0..count {
                let z: f64 = rng.sample(StandardNormal);
                out.push(Point::Real(mu + sigma * z));
            }
        }
        (FamilyTag::MvNormal { n }, Classical::MvNormal { sigma, mu }) => {
            let l = sigma
                .cholesky()
                .ok_or_else(|| Error::Sampler("covariance lost positive definiteness".into()))?
                .l();
            for _ in 0..count {
                let z = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
                out.push(Point::Vector(&mu + &l * z));
            }
        }
        (FamilyTag::GammaLambda { lambda }, Classical::GammaLambda { k, theta }) => {
            // (x/θ)^λ ~ Gamma(k, 1)
            let g = Gamma::new(k, 1.0).map_err(|e| Error::Sampler(e.to_string()))?;
            for _ in 0..count {
                let y: f64 = g.sample(rng);
                let x = theta * y.powf(1.0 / lambda);
                if !(x > 0.0 && x.is_finite()) {
                    return Err(Error::Sampler(format!("draw {x} left (0, ∞)")));
                }
                out.push(Point::Positive(x));
            }
        }
        (FamilyTag::Wishart { n }, Classical::Wishart { y, alpha }) => {
            // Bartlett decomposition for Σ = (2y)⁻¹ and ν = 2α degrees of freedom.
            let sigma = (y * 2.0)
                .try_inverse()
                .ok_or_else(|| Error::Sampler("y is singular".into()))?;
            let l = sigma
                .cholesky()
                .ok_or_else(|| Error::Sampler("(2y)⁻¹ is not positive definite".into()))?
                .l();
            let nu = 2.0 * alpha;
            let chi = (0..n)
                .map(|i| Gamma::new(0.5 * (nu - i as f64), 2.0).map_err(|e| Error::Sampler(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            for _ in 0..count {
                let mut a = DMatrix::zeros(n, n);
                for i in 0..n {
                    a[(i, i)] = chi[i].sample(rng).sqrt();
                    for j in 0..i {
                        a[(i, j)] = rng.sample(StandardNormal);
                    }
                }
                let la = &l * a;
                let x = &la * la.transpose();
                out.push(Point::Spd((&x + x.transpose()) * 0.5));
            }
        }
        (FamilyTag::VonMises, Classical::VonMises { kappa, .. }) => {
            // exp(-<φ, x>) has mean direction -φ/|φ|.
            let mean = mean_direction(phi);
            for _ in 0..count {
                let x = wood(rng, 2, kappa, &mean)?;
                out.push(Point::Angle(wrap_angle(x[1].atan2(x[0]))));
            }
        }
        (FamilyTag::Vmf { n }, Classical::Vmf { mu }) => {
            let kappa = mu.norm();
            let mean = if kappa > 0.0 { -mu / kappa } else { unit(n) };
            for _ in 0..count {
                out.push(Point::Sphere(wood(rng, n, kappa, &mean)?));
            }
        }
        (FamilyTag::FisherBingham { n }, Classical::FisherBingham { mu, a }) => {
            // Uniform proposal; -μᵀx - xᵀAx <= |μ| - λ_min(A) on the sphere.
            let lmin = a.clone().symmetric_eigen().eigenvalues.min();
            let bound = mu.norm() - lmin;
            for _ in 0..count {
                let mut tries = 0;
                loop {
                    tries += 1;
                    if tries > MAX_TRIES_PER_DRAW {
                        return Err(Error::Sampler(format!(
                            "Fisher-Bingham rejection sampler exceeded {MAX_TRIES_PER_DRAW} proposals"
                        )));
                    }
                    let x = uniform_sphere(rng, n);
                    let log_k = -mu.dot(&x) - (x.transpose() * &a * &x)[(0, 0)];
                    if rng.random::<f64>().ln() <= log_k - bound {
                        out.push(Point::Sphere(x));
                        break;
                    }
                }
            }
        }
        (FamilyTag::Hyperboloid { n }, Classical::Hyperboloid { kappa, xi }) => {
            for _ in 0..count {
                out.push(Point::Hyperboloid(hyperboloid_draw(rng, n, kappa, &xi)?));
            }
        }
        (FamilyTag::Poincare, Classical::Poincare { a, b, c }) => {
            let (kappa, xi) = poincare_to_hyperboloid([a, b, c], Substitution::Corrected)?;
            for _ in 0..count {
                let v = hyperboloid_draw(rng, 2, kappa, &xi)?;
                let (x, y) = super::hyperboloid_to_half_plane(&v);
                out.push(Point::HalfPlane { x, y });
            }
        }
        _ => return Err(Error::Internal("classical parameter does not match family".into())),
    }
    let space = spec.space();
    for p in &out {
        p.validate(&space)
            .map_err(|e| Error::Sampler(format!("draw left the sample space: {e}")))?;
    }
    Ok(out)
}

fn unit(n: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[0] = 1.0;
    e
}

fn mean_direction(phi: &[f64]) -> DVector<f64> {
    let v = -DVector::from_column_slice(phi);
    let r = v.norm();
    if r > 0.0 {
        v / r
    } else {
        unit(phi.len())
    }
}

pub(crate) fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let r = v.norm();
        if r > 1e-12 {
            return v / r;
        }
    }
}

/// Draw from the density `∝ exp(κ mᵀx)` on `S^{n-1}` (Wood's rejection scheme for `w = mᵀx`).
pub(crate) fn wood<R: Rng + ?Sized>(rng: &mut R, n: usize, kappa: f64, mean: &DVector<f64>) -> Result<DVector<f64>> {
    let d = n as f64 - 1.0;
    let b = d / (2.0 * kappa + (4.0 * kappa * kappa + d * d).sqrt());
    let x0 = (1.0 - b) / (1.0 + b);
    let c = kappa * x0 + d * (1.0 - x0 * x0).ln();
    let beta = Beta::new(0.5 * d, 0.5 * d).map_err(|e| Error::Sampler(e.to_string()))?;
    for _ in 0..MAX_TRIES_PER_DRAW {
        let z: f64 = beta.sample(rng);
        let w = (1.0 - (1.0 + b) * z) / (1.0 - (1.0 - b) * z);
        let u: f64 = rng.random();
        if kappa * w + d * (1.0 - x0 * w).ln() - c >= u.ln() {
            let v = uniform_sphere(rng, n - 1);
            let s = (1.0 - w * w).max(0.0).sqrt();
            let mut x = DVector::zeros(n);
            x[0] = w;
            for i in 1..n {
                x[i] = s * v[i - 1];
            }
            let x = rotation_to(mean) * x;
            let r = x.norm();
            return Ok(x / r);
        }
    }
    Err(Error::Sampler(format!("Wood sampler exceeded {MAX_TRIES_PER_DRAW} proposals")))
}

/// Draw from `∝ exp(κ<ξ, v>)` on `Hⁿ` in polar coordinates about `ξ`.
///
/// With `w = cosh r - 1` the radial density is `(w(w+2))^m e^{-κw}`, `m = (n-2)/2`.
/// The envelope `c_m (w^{2m} + 2^m w^m) e^{-κw}` is a two-component gamma mixture.
pub(crate) fn hyperboloid_draw<R: Rng + ?Sized>(rng: &mut R, n: usize, kappa: f64, xi: &DVector<f64>) -> Result<DVector<f64>> {
    let m = 0.5 * (n as f64 - 2.0);
    let w = if m == 0.0 {
        let g = Gamma::new(1.0, 1.0 / kappa).map_err(|e| Error::Sampler(e.to_string()))?;
        g.sample(rng)
    } else {
        let high = Gamma::new(2.0 * m + 1.0, 1.0 / kappa).map_err(|e| Error::Sampler(e.to_string()))?;
        let low = Gamma::new(m + 1.0, 1.0 / kappa).map_err(|e| Error::Sampler(e.to_string()))?;
        // Component masses: Γ(2m+1)/κ^{2m+1} and 2^m Γ(m+1)/κ^{m+1}.
        let lw_high = crate::special::log_gamma(2.0 * m + 1.0)? - (2.0 * m + 1.0) * kappa.ln();
        let lw_low = m * std::f64::consts::LN_2 + crate::special::log_gamma(m + 1.0)? - (m + 1.0) * kappa.ln();
        let p_high = 1.0 / (1.0 + (lw_low - lw_high).exp());
        let c_m = if m <= 1.0 { 1.0 } else { 2f64.powf(m - 1.0) };
        let mut accepted = None;
        for _ in 0..MAX_TRIES_PER_DRAW {
            let w: f64 = if rng.random::<f64>() < p_high { high.sample(rng) } else { low.sample(rng) };
            if !(w > 0.0) {
                continue;
            }
            let target = m * (w.ln() + (w + 2.0).ln());
            let envelope = c_m.ln() + (w.powf(2.0 * m) + 2f64.powf(m) * w.powf(m)).ln();
            if rng.random::<f64>().ln() <= target - envelope {
                accepted = Some(w);
                break;
            }
        }
        accepted.ok_or_else(|| Error::Sampler(format!("hyperboloid sampler exceeded {MAX_TRIES_PER_DRAW} proposals")))?
    };
    let cosh_r = 1.0 + w;
    let sinh_r = (w * (w + 2.0)).sqrt();
    let u = uniform_sphere(rng, n);
    let mut local = DVector::zeros(n + 1);
    local[0] = cosh_r;
    for i in 0..n {
        local[i + 1] = sinh_r * u[i];
    }
    let mut v = lorentz_to(xi) * local;
    let spatial = v.rows(1, n).norm_squared();
    v[0] = (1.0 + spatial).sqrt();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::FamilySpec;

    #[test]
    fn deterministic_per_seed() {
        for tag in FamilyTag::defaults() {
            let spec = FamilySpec::new(tag).unwrap();
            let theta = &spec.example_parameters()[1];
            let a = sample(&spec, theta, 50, 11).unwrap();
            let b = sample(&spec, theta, 50, 11).unwrap();
            let c = sample(&spec, theta, 50, 12).unwrap();
            assert_eq!(a, b, "{}", spec.name());
            assert_ne!(a, c, "{}", spec.name());
        }
    }

    #[test]
    fn bernoulli_tail() {
        let spec = FamilySpec::from_name("bernoulli", None, None).unwrap();
        let draws = sample(&spec, &NaturalParameter::new(vec![-10.0], vec![]), 10_000, 5).unwrap();
        let plus = draws.iter().filter(|p| **p == Point::Sign(1)).count();
        assert!(plus >= 9990);
    }

    #[test]
    fn normal_mean() {
        let spec = FamilySpec::from_name("normal", None, None).unwrap();
        let draws = sample(&spec, &NaturalParameter::new(vec![0.5, 0.0, 0.0], vec![]), 10_000, 9).unwrap();
        let mean: f64 = draws
            .iter()
            .map(|p| match p {
                Point::Real(x) => *x,
                _ => unreachable!(),
            })
            .sum::<f64>()
            / 1e4;
        assert!(mean.abs() < 4.0 / 100.0);
    }

    #[test]
    fn rejects_out_of_domain() {
        let spec = FamilySpec::from_name("normal", None, None).unwrap();
        assert!(matches!(
            sample(&spec, &NaturalParameter::new(vec![-1.0, 0.0, 0.0], vec![]), 10, 1),
            Err(Error::Domain(_))
        ));
    }
}
