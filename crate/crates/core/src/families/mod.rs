//! The catalog of families: domains, log-partition functions, classical
//! parameterizations and densities.

pub mod fit;
pub mod sample;
pub mod schema;

use crate::construction::{Construction, NaturalParameter, RepKind, SufficientStatistic};
use crate::error::{Error, Result};
use crate::group::GroupPair;
use crate::linalg::{lorentz_inner, pack_sym, spd_log_det, sym_len, unpack_sym};
use crate::space::{wrap_angle, Point, SpaceTag};
use crate::special::{log_bessel_i, log_bessel_k, log_gamma, log_sphere_area, multivariate_log_gamma};
use crate::verify::{self, IntegratorSpec};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI, TAU};

pub use fit::fit_mle;
pub use sample::sample;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilyTag {
    Bernoulli,
    Categorical { n: usize },
    Normal,
    #[serde(rename = "mvnormal")]
    MvNormal { n: usize },
    GammaLambda { lambda: f64 },
    Wishart { n: usize },
    VonMises,
    Vmf { n: usize },
    FisherBingham { n: usize },
    Hyperboloid { n: usize },
    Poincare,
}

pub const FAMILY_NAMES: [&str; 11] = [
    "bernoulli",
    "categorical",
    "normal",
    "mvnormal",
    "gamma_lambda",
    "wishart",
    "von_mises",
    "vmf",
    "fisher_bingham",
    "hyperboloid",
    "poincare",
];

impl FamilyTag {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyTag::Bernoulli => "bernoulli",
            FamilyTag::Categorical { .. } => "categorical",
            FamilyTag::Normal => "normal",
            FamilyTag::MvNormal { .. } => "mvnormal",
            FamilyTag::GammaLambda { .. } => "gamma_lambda",
            FamilyTag::Wishart { .. } => "wishart",
            FamilyTag::VonMises => "von_mises",
            FamilyTag::Vmf { .. } => "vmf",
            FamilyTag::FisherBingham { .. } => "fisher_bingham",
            FamilyTag::Hyperboloid { .. } => "hyperboloid",
            FamilyTag::Poincare => "poincare",
        }
    }

    /// Build a tag from a family name and optional variant values.
    ///
    /// `gamma` and `inverse_gamma` are accepted as aliases for `gamma_lambda`
    /// with `λ = 1` and `λ = -1`.
    pub fn parse(name: &str, n: Option<usize>, lambda: Option<f64>) -> Result<FamilyTag> {
        let name = name.trim().to_ascii_lowercase().replace('-', "_");
        let sized = |default: usize| n.unwrap_or(default);
        let no_lambda = |tag: FamilyTag| -> Result<FamilyTag> {
            if lambda.is_some() {
                Err(Error::Schema(format!("family {} has no lambda variant", tag.name())))
            } else {
                Ok(tag)
            }
        };
        let no_n = |tag: FamilyTag| -> Result<FamilyTag> {
            if n.is_some() {
                Err(Error::Schema(format!("family {} has no n variant", tag.name())))
            } else {
                no_lambda(tag)
            }
        };
        let tag = match name.as_str() {
            "bernoulli" => no_n(FamilyTag::Bernoulli)?,
            "categorical" => no_lambda(FamilyTag::Categorical { n: sized(3) })?,
            "normal" => no_n(FamilyTag::Normal)?,
            "mvnormal" | "multivariate_normal" => no_lambda(FamilyTag::MvNormal { n: sized(2) })?,
            "gamma_lambda" | "gamma" | "inverse_gamma" => {
                if n.is_some() {
                    return Err(Error::Schema("family gamma_lambda has no n variant".into()));
                }
                let fixed = match name.as_str() {
                    "gamma" => Some(1.0),
                    "inverse_gamma" => Some(-1.0),
                    _ => None,
                };
                let l = match (fixed, lambda) {
                    (Some(f), Some(l)) if f != l => {
                        return Err(Error::Schema(format!("{name} fixes lambda = {f}, got {l}")))
                    }
                    (Some(f), _) => f,
                    (None, l) => l.unwrap_or(1.0),
                };
                FamilyTag::GammaLambda { lambda: l }
            }
            "wishart" => no_lambda(FamilyTag::Wishart { n: sized(2) })?,
            "von_mises" | "vonmises" => no_n(FamilyTag::VonMises)?,
            "vmf" | "von_mises_fisher" => no_lambda(FamilyTag::Vmf { n: sized(3) })?,
            "fisher_bingham" => no_lambda(FamilyTag::FisherBingham { n: sized(3) })?,
            "hyperboloid" => no_lambda(FamilyTag::Hyperboloid { n: sized(2) })?,
            "poincare" => no_n(FamilyTag::Poincare)?,
            other => return Err(Error::Unsupported(format!("unknown family '{other}'"))),
        };
        tag.validate()?;
        Ok(tag)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Unsupported(msg));
        match *self {
            FamilyTag::Categorical { n } if n < 2 => bad(format!("categorical needs n >= 2, got {n}")),
            FamilyTag::MvNormal { n } if n < 1 => bad("mvnormal needs n >= 1".into()),
            FamilyTag::Wishart { n } if n < 1 => bad("wishart needs n >= 1".into()),
            FamilyTag::Vmf { n } if n < 2 => bad(format!("vmf needs n >= 2, got {n}")),
            FamilyTag::FisherBingham { n } if n < 2 => bad(format!("fisher_bingham needs n >= 2, got {n}")),
            FamilyTag::Hyperboloid { n } if n < 2 => bad(format!(
                "hyperboloid needs n >= 2 (SO_0(1,{n}) is abelian, so the character group is not trivial), got {n}"
            )),
            FamilyTag::GammaLambda { lambda } if lambda == 0.0 || !lambda.is_finite() => bad(format!(
                "gamma_lambda needs a finite nonzero lambda (lambda = 0 leaves no integrable member), got {lambda}"
            )),
            _ => Ok(()),
        }
    }

    pub fn variant_n(&self) -> Option<usize> {
        match *self {
            FamilyTag::Categorical { n }
            | FamilyTag::MvNormal { n }
            | FamilyTag::Wishart { n }
            | FamilyTag::Vmf { n }
            | FamilyTag::FisherBingham { n }
            | FamilyTag::Hyperboloid { n } => Some(n),
            _ => None,
        }
    }

    pub fn variant_lambda(&self) -> Option<f64> {
        match *self {
            FamilyTag::GammaLambda { lambda } => Some(lambda),
            _ => None,
        }
    }

    /// One representative of every family with default variants.
    pub fn defaults() -> Vec<FamilyTag> {
        FAMILY_NAMES
            .iter()
            .map(|n| FamilyTag::parse(n, None, None).expect("default variants are valid"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalizerStrategy {
    ClosedForm,
    Numeric,
}

/// A catalog entry: the tag, its construction inputs and how `A(θ)` is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub tag: FamilyTag,
    pub construction: Construction,
    pub normalizer: NormalizerStrategy,
}

/// Classical coordinates of a family member.
#[derive(Debug, Clone, PartialEq)]
pub enum Classical {
    /// `s = P(x = +1)`.
    Bernoulli { s: f64 },
    Categorical { s: Vec<f64> },
    Normal { sigma: f64, mu: f64 },
    MvNormal { sigma: DMatrix<f64>, mu: DVector<f64> },
    /// Shape `k` and scale `θ`.
    GammaLambda { k: f64, theta: f64 },
    Wishart { y: DMatrix<f64>, alpha: f64 },
    VonMises { kappa: f64, mu: f64 },
    Vmf { mu: DVector<f64> },
    FisherBingham { mu: DVector<f64>, a: DMatrix<f64> },
    Hyperboloid { kappa: f64, xi: DVector<f64> },
    Poincare { a: f64, b: f64, c: f64 },
}

impl FamilySpec {
    pub fn new(tag: FamilyTag) -> Result<Self> {
        tag.validate()?;
        let (pair, kind, v0) = match tag {
            FamilyTag::Bernoulli => (GroupPair::SignTrivial, RepKind::Sign, vec![1.0]),
            FamilyTag::Categorical { n } => {
                let mut w = vec![1.0; n];
                w[0] = -(n as f64 - 1.0);
                (GroupPair::SymmetricStabilizer { n }, RepKind::PermutationSubrep { n }, w)
            }
            FamilyTag::Normal => (GroupPair::AffineLine, RepKind::AffineConjugation { k: 2 }, vec![0.0, 0.0, 1.0]),
            FamilyTag::MvNormal { n } => {
                let mut e = DMatrix::zeros(n + 1, n + 1);
                e[(n, n)] = 1.0;
                (GroupPair::Affine { n }, RepKind::AffineConjugation { k: n + 1 }, pack_sym(&e))
            }
            FamilyTag::GammaLambda { lambda } => (GroupPair::PositiveTrivial, RepKind::Power { lambda }, vec![1.0]),
            FamilyTag::Wishart { n } => (
                GroupPair::GeneralLinearOrthogonal { n },
                RepKind::Conjugation { n },
                pack_sym(&DMatrix::identity(n, n)),
            ),
            FamilyTag::VonMises => (GroupPair::CircleTrivial, RepKind::NaturalRotation { n: 2 }, vec![1.0, 0.0]),
            FamilyTag::Vmf { n } => (GroupPair::SphereRotation { n }, RepKind::NaturalRotation { n }, unit(n, 0)),
            FamilyTag::FisherBingham { n } => {
                let mut v = unit(n, 0);
                let mut e = DMatrix::zeros(n, n);
                e[(0, 0)] = 1.0;
                v.extend(pack_sym(&e));
                (GroupPair::SphereRotation { n }, RepKind::VectorPlusConjugation { n }, v)
            }
            FamilyTag::Hyperboloid { n } => (GroupPair::LorentzRotation { n }, RepKind::NaturalLorentz { n }, unit(n + 1, 0)),
            FamilyTag::Poincare => (
                GroupPair::SpecialLinearRotation,
                RepKind::Conjugation { n: 2 },
                pack_sym(&DMatrix::identity(2, 2)),
            ),
        };
        let normalizer = match tag {
            FamilyTag::FisherBingham { .. } => NormalizerStrategy::Numeric,
            _ => NormalizerStrategy::ClosedForm,
        };
        Ok(FamilySpec {
            tag,
            construction: Construction::new(pair, kind, v0)?,
            normalizer,
        })
    }

    pub fn from_name(name: &str, n: Option<usize>, lambda: Option<f64>) -> Result<Self> {
        FamilySpec::new(FamilyTag::parse(name, n, lambda)?)
    }

    pub fn name(&self) -> &'static str {
        self.tag.name()
    }

    pub fn space(&self) -> SpaceTag {
        self.construction.space()
    }

    pub fn pair(&self) -> GroupPair {
        self.construction.pair
    }

    pub fn phi_len(&self) -> usize {
        self.construction.rep.dim
    }

    pub fn chi_len(&self) -> usize {
        self.construction.basis.dim()
    }

    pub fn natural_len(&self) -> usize {
        self.phi_len() + self.chi_len()
    }

    pub fn natural(&self, values: &[f64]) -> Result<NaturalParameter> {
        if values.len() != self.natural_len() {
            return Err(Error::dims(self.natural_len(), values.len()));
        }
        Ok(NaturalParameter::from_flat(values, self.phi_len()))
    }

    /// Membership in `Θ`. Returns `false` for wrong dimensions or non-finite input.
    pub fn theta_in_domain(&self, theta: &NaturalParameter) -> bool {
        if self.construction.check_parameter(theta).is_err() {
            return false;
        }
        if !theta.flat().iter().all(|v| v.is_finite()) {
            return false;
        }
        let phi = &theta.phi;
        match self.tag {
            FamilyTag::Bernoulli | FamilyTag::VonMises | FamilyTag::Vmf { .. } | FamilyTag::FisherBingham { .. } => true,
            FamilyTag::Categorical { .. } => {
                let scale = phi.iter().fold(1.0f64, |m, v| m.max(v.abs()));
                phi.iter().sum::<f64>().abs() <= 1e-10 * scale
            }
            FamilyTag::Normal => phi[0] > 0.0,
            FamilyTag::MvNormal { n } => {
                let m = unpack_sym(phi, n + 1);
                m.view((0, 0), (n, n)).into_owned().cholesky().is_some()
            }
            FamilyTag::GammaLambda { lambda } => phi[0] > 0.0 && theta.chi_exponents[0] * lambda > 0.0,
            FamilyTag::Wishart { n } => {
                unpack_sym(phi, n).cholesky().is_some() && 0.5 * theta.chi_exponents[0] > 0.5 * (n as f64 - 1.0)
            }
            FamilyTag::Hyperboloid { .. } => phi[0] < 0.0 && lorentz_inner(phi, phi) < 0.0,
            FamilyTag::Poincare => phi[0] > 0.0 && phi[0] * phi[2] - phi[1] * phi[1] > 0.0,
        }
    }

    pub fn check_theta(&self, theta: &NaturalParameter) -> Result<()> {
        self.construction.check_parameter(theta)?;
        if self.theta_in_domain(theta) {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "parameter {:?} is outside the natural domain of {} ({})",
                theta.flat(),
                self.name(),
                self.theta_description()
            )))
        }
    }

    /// `A(θ) = log ∫_X dp̃_θ`.
    pub fn log_partition(&self, theta: &NaturalParameter) -> Result<f64> {
        self.check_theta(theta)?;
        let phi = &theta.phi;
        Ok(match self.tag {
            FamilyTag::Bernoulli => {
                let t = phi[0].abs();
                t + (-2.0 * t).exp().ln_1p()
            }
            FamilyTag::Categorical { n } => {
                // log Σ exp(-<a, 𝟙 - n e_k>); equals log Σ e^{n a_k} on W.
                let sum: f64 = phi.iter().sum();
                let terms: Vec<f64> = phi.iter().map(|a| n as f64 * a - sum).collect();
                log_sum_exp(&terms)
            }
            FamilyTag::Normal => {
                let (t1, t2, t3) = (phi[0], phi[1], phi[2]);
                0.5 * (PI / t1).ln() - t3 + t2 * t2 / t1
            }
            FamilyTag::MvNormal { n } => {
                let (t1, t2, t3) = mvnormal_blocks(phi, n);
                let chol = t1.cholesky().expect("checked by theta_in_domain");
                let logdet = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
                let quad = t2.dot(&chol.solve(&t2));
                0.5 * n as f64 * PI.ln() - 0.5 * logdet - t3 + quad
            }
            FamilyTag::GammaLambda { lambda } => {
                let (alpha, beta) = (theta.chi_exponents[0], phi[0]);
                let k = alpha / lambda;
                log_gamma(k)? - lambda.abs().ln() - k * beta.ln()
            }
            FamilyTag::Wishart { n } => {
                let alpha = 0.5 * theta.chi_exponents[0];
                let logdet = spd_log_det(&unpack_sym(phi, n)).expect("checked by theta_in_domain");
                multivariate_log_gamma(n, alpha)? - alpha * logdet
            }
            FamilyTag::VonMises => TAU.ln() + log_bessel_i(0.0, phi[0].hypot(phi[1]))?,
            FamilyTag::Vmf { n } => vmf_log_partition(n, DVector::from_column_slice(phi).norm())?,
            FamilyTag::FisherBingham { .. } => {
                return verify::numeric_log_normalizer(self, theta, &IntegratorSpec::default_for(&self.space()))
                    .map(|e| e.log_value)
            }
            FamilyTag::Hyperboloid { n } => {
                let kappa = (-lorentz_inner(phi, phi)).sqrt();
                hyperboloid_log_partition(n, kappa)?
            }
            FamilyTag::Poincare => {
                let d = (phi[0] * phi[2] - phi[1] * phi[1]).sqrt();
                PI.ln() - d.ln() - 2.0 * d
            }
        })
    }

    pub fn sufficient_statistic(&self, x: &Point) -> Result<SufficientStatistic> {
        self.construction.sufficient_statistic(x)
    }

    pub fn unnormalized_log_kernel(&self, theta: &NaturalParameter, x: &Point) -> Result<f64> {
        self.construction.unnormalized_log_kernel(theta, x)
    }

    /// `log (dp_θ/dμ)(x)` with respect to the family's base measure.
    pub fn log_density(&self, theta: &NaturalParameter, x: &Point) -> Result<f64> {
        let a = self.log_partition(theta)?;
        Ok(self.unnormalized_log_kernel(theta, x)? - a)
    }

    /// Log densities of many points, evaluating `A(θ)` once.
    pub fn log_density_many(&self, theta: &NaturalParameter, xs: &[Point]) -> Result<Vec<f64>> {
        let a = self.log_partition(theta)?;
        xs.iter()
            .map(|x| Ok(self.unnormalized_log_kernel(theta, x)? - a))
            .collect()
    }

    /// Log density with respect to Lebesgue measure in chart coordinates
    /// (same as [`FamilySpec::log_density`] for discrete spaces, `S¹`, `S^{n-1}` and `Hⁿ`).
    pub fn lebesgue_log_density(&self, theta: &NaturalParameter, x: &Point) -> Result<f64> {
        Ok(self.log_density(theta, x)? + self.construction.measure.log_chart_density(x))
    }

    /// Replace gauge coordinates that do not change the distribution by their canonical values.
    pub fn canonical_gauge(&self, theta: &NaturalParameter) -> NaturalParameter {
        let mut out = theta.clone();
        match self.tag {
            FamilyTag::Normal => out.phi[2] = 0.0,
            FamilyTag::MvNormal { n } => {
                let last = out.phi.len() - 1;
                debug_assert_eq!(last + 1, sym_len(n + 1));
                out.phi[last] = 0.0;
            }
            FamilyTag::FisherBingham { n } => {
                let mut a = unpack_sym(&out.phi[n..], n);
                let shift = a.trace() / n as f64;
                for i in 0..n {
                    a[(i, i)] -= shift;
                }
                out.phi.truncate(n);
                out.phi.extend(pack_sym(&a));
            }
            _ => {}
        }
        out
    }

    pub fn to_classical(&self, theta: &NaturalParameter) -> Result<Classical> {
        self.check_theta(theta)?;
        let phi = &theta.phi;
        Ok(match self.tag {
            FamilyTag::Bernoulli => Classical::Bernoulli { s: 1.0 / (1.0 + (2.0 * phi[0]).exp()) },
            FamilyTag::Categorical { n } => {
                let terms: Vec<f64> = phi.iter().map(|a| n as f64 * a).collect();
                let lse = log_sum_exp(&terms);
                Classical::Categorical { s: terms.iter().map(|t| (t - lse).exp()).collect() }
            }
            FamilyTag::Normal => Classical::Normal {
                sigma: 1.0 / (2.0 * phi[0]).sqrt(),
                mu: -phi[1] / phi[0],
            },
            FamilyTag::MvNormal { n } => {
                let (t1, t2, _) = mvnormal_blocks(phi, n);
                let chol = t1.cholesky().expect("checked by theta_in_domain");
                let inv = chol.inverse();
                Classical::MvNormal {
                    sigma: symmetrize(inv.clone() * 0.5),
                    mu: -(inv * t2),
                }
            }
            FamilyTag::GammaLambda { lambda } => Classical::GammaLambda {
                k: theta.chi_exponents[0] / lambda,
                theta: phi[0].powf(-1.0 / lambda),
            },
            FamilyTag::Wishart { n } => Classical::Wishart {
                y: unpack_sym(phi, n),
                alpha: 0.5 * theta.chi_exponents[0],
            },
            FamilyTag::VonMises => Classical::VonMises {
                kappa: phi[0].hypot(phi[1]),
                mu: wrap_angle(phi[1].atan2(phi[0])),
            },
            FamilyTag::Vmf { .. } => Classical::Vmf { mu: DVector::from_column_slice(phi) },
            FamilyTag::FisherBingham { n } => Classical::FisherBingham {
                mu: DVector::from_column_slice(&phi[..n]),
                a: unpack_sym(&phi[n..], n),
            },
            FamilyTag::Hyperboloid { .. } => {
                let kappa = (-lorentz_inner(phi, phi)).sqrt();
                let xi = DVector::from_column_slice(phi) * (-1.0 / kappa);
                Classical::Hyperboloid { kappa, xi }
            }
            FamilyTag::Poincare => Classical::Poincare { a: phi[0], b: phi[1], c: phi[2] },
        })
    }

    pub fn from_classical(&self, c: &Classical) -> Result<NaturalParameter> {
        let dom = |msg: String| Err(Error::domain(msg));
        let mismatch = || {
            Err(Error::Schema(format!(
                "classical parameter does not belong to family {}",
                self.name()
            )))
        };
        let theta = match (self.tag, c) {
            (FamilyTag::Bernoulli, Classical::Bernoulli { s }) => {
                if !(*s > 0.0 && *s < 1.0) {
                    return dom(format!("Bernoulli s must lie in (0, 1), got {s}"));
                }
                NaturalParameter::new(vec![0.5 * ((1.0 - s) / s).ln()], vec![])
            }
            (FamilyTag::Categorical { n }, Classical::Categorical { s }) => {
                if s.len() != n {
                    return Err(Error::dims(n, s.len()));
                }
                if s.iter().any(|v| !(*v > 0.0)) || (s.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                    return dom("categorical probabilities must be positive and sum to 1".into());
                }
                let logs: Vec<f64> = s.iter().map(|v| v.ln()).collect();
                let mean = logs.iter().sum::<f64>() / n as f64;
                NaturalParameter::new(logs.iter().map(|l| (l - mean) / n as f64).collect(), vec![])
            }
            (FamilyTag::Normal, Classical::Normal { sigma, mu }) => {
                if !(*sigma > 0.0 && sigma.is_finite() && mu.is_finite()) {
                    return dom(format!("normal needs sigma > 0 and finite mu, got ({sigma}, {mu})"));
                }
                let t1 = 1.0 / (2.0 * sigma * sigma);
                NaturalParameter::new(vec![t1, -mu * t1, 0.0], vec![])
            }
            (FamilyTag::MvNormal { n }, Classical::MvNormal { sigma, mu }) => {
                if sigma.shape() != (n, n) || mu.len() != n {
                    return Err(Error::dims(n, mu.len()));
                }
                if !crate::linalg::is_symmetric(sigma, 1e-12) {
                    return dom("covariance must be symmetric".into());
                }
                let chol = sigma
                    .clone()
                    .cholesky()
                    .ok_or_else(|| Error::domain("covariance must be positive definite"))?;
                let t1 = symmetrize(chol.inverse() * 0.5);
                let t2 = -(&t1 * mu);
                let mut full = DMatrix::zeros(n + 1, n + 1);
                full.view_mut((0, 0), (n, n)).copy_from(&t1);
                full.view_mut((0, n), (n, 1)).copy_from(&t2);
                full.view_mut((n, 0), (1, n)).copy_from(&t2.transpose());
                NaturalParameter::new(pack_sym(&full), vec![])
            }
            (FamilyTag::GammaLambda { lambda }, Classical::GammaLambda { k, theta }) => {
                if !(*k > 0.0 && *theta > 0.0 && k.is_finite() && theta.is_finite()) {
                    return dom(format!("gamma_lambda needs k > 0 and theta > 0, got ({k}, {theta})"));
                }
                NaturalParameter::new(vec![theta.powf(-lambda)], vec![k * lambda])
            }
            (FamilyTag::Wishart { n }, Classical::Wishart { y, alpha }) => {
                if y.shape() != (n, n) {
                    return Err(Error::dims(n, y.nrows()));
                }
                if !crate::linalg::is_symmetric(y, 1e-12) || y.clone().cholesky().is_none() {
                    return dom("Wishart y must be symmetric positive definite".into());
                }
                if !(*alpha > 0.5 * (n as f64 - 1.0)) {
                    return dom(format!("Wishart alpha must exceed (n-1)/2 = {}, got {alpha}", 0.5 * (n as f64 - 1.0)));
                }
                NaturalParameter::new(pack_sym(y), vec![2.0 * alpha])
            }
            (FamilyTag::VonMises, Classical::VonMises { kappa, mu }) => {
                if !(*kappa >= 0.0 && kappa.is_finite() && mu.is_finite()) {
                    return dom(format!("von Mises needs kappa >= 0 and finite mu, got ({kappa}, {mu})"));
                }
                NaturalParameter::new(vec![kappa * mu.cos(), kappa * mu.sin()], vec![])
            }
            (FamilyTag::Vmf { n }, Classical::Vmf { mu }) => {
                if mu.len() != n {
                    return Err(Error::dims(n, mu.len()));
                }
                NaturalParameter::new(mu.as_slice().to_vec(), vec![])
            }
            (FamilyTag::FisherBingham { n }, Classical::FisherBingham { mu, a }) => {
                if mu.len() != n || a.shape() != (n, n) {
                    return Err(Error::dims(n, mu.len()));
                }
                if !crate::linalg::is_symmetric(a, 1e-12) {
                    return dom("Fisher-Bingham A must be symmetric".into());
                }
                let mut phi = mu.as_slice().to_vec();
                phi.extend(pack_sym(a));
                NaturalParameter::new(phi, vec![])
            }
            (FamilyTag::Hyperboloid { n }, Classical::Hyperboloid { kappa, xi }) => {
                if xi.len() != n + 1 {
                    return Err(Error::dims(n + 1, xi.len()));
                }
                if !(*kappa > 0.0 && kappa.is_finite()) {
                    return dom(format!("hyperboloid needs kappa > 0, got {kappa}"));
                }
                Point::Hyperboloid(xi.clone()).validate(&SpaceTag::Hyperboloid { n })?;
                NaturalParameter::new((xi * -*kappa).as_slice().to_vec(), vec![])
            }
            (FamilyTag::Poincare, Classical::Poincare { a, b, c }) => NaturalParameter::new(vec![*a, *b, *c], vec![]),
            _ => return mismatch(),
        };
        self.check_theta(&theta)?;
        Ok(theta)
    }

    /// A few in-domain parameters used by the verification suite and tests.
    pub fn example_parameters(&self) -> Vec<NaturalParameter> {
        let nat = |phi: Vec<f64>, chi: Vec<f64>| NaturalParameter::new(phi, chi);
        let from = |c: Classical| self.from_classical(&c).expect("example parameters are in the domain");
        match self.tag {
            FamilyTag::Bernoulli => vec![nat(vec![-1.3], vec![]), nat(vec![0.0], vec![]), nat(vec![0.7], vec![])],
            FamilyTag::Categorical { n } => {
                let mut out = vec![nat(vec![0.0; n], vec![])];
                for scale in [0.3, -0.45] {
                    let raw: Vec<f64> = (0..n).map(|i| scale * ((i as f64 + 1.0) * 1.7).sin()).collect();
                    let mean = raw.iter().sum::<f64>() / n as f64;
                    out.push(nat(raw.iter().map(|r| r - mean).collect(), vec![]));
                }
                out
            }
            FamilyTag::Normal => vec![
                nat(vec![0.5, 0.0, 0.0], vec![]),
                nat(vec![2.0, -1.0, 0.3], vec![]),
                nat(vec![0.1, 0.2, 0.0], vec![]),
            ],
            FamilyTag::MvNormal { n } => {
                let mut out = vec![from(Classical::MvNormal {
                    sigma: DMatrix::identity(n, n),
                    mu: DVector::zeros(n),
                })];
                let mut s = DMatrix::identity(n, n) * 1.5;
                for i in 0..n.saturating_sub(1) {
                    s[(i, i + 1)] = 0.4;
                    s[(i + 1, i)] = 0.4;
                }
                out.push(from(Classical::MvNormal {
                    sigma: s.clone(),
                    mu: DVector::from_fn(n, |i, _| i as f64 - 0.5),
                }));
                out.push(from(Classical::MvNormal {
                    sigma: DMatrix::from_fn(n, n, |i, j| if i == j { 0.3 + 0.2 * i as f64 } else { 0.0 }),
                    mu: DVector::from_element(n, 2.0),
                }));
                out
            }
            FamilyTag::GammaLambda { .. } => [(1.0, 1.0), (2.5, 0.7), (0.6, 2.0)]
                .into_iter()
                .map(|(k, theta)| from(Classical::GammaLambda { k, theta }))
                .collect(),
            FamilyTag::Wishart { n } => {
                let half = 0.5 * (n as f64 - 1.0);
                let mut y2 = DMatrix::identity(n, n);
                y2[(0, 0)] = 2.0;
                let y3 = DMatrix::from_fn(n, n, |i, j| if i == j { 1.5 - 0.3 * i as f64 } else { 0.2 });
                vec![
                    from(Classical::Wishart { y: DMatrix::identity(n, n), alpha: half + 1.0 }),
                    from(Classical::Wishart { y: y2, alpha: half + 2.0 }),
                    from(Classical::Wishart { y: y3, alpha: half + 0.7 }),
                ]
            }
            FamilyTag::VonMises => vec![
                nat(vec![0.0, 0.0], vec![]),
                nat(vec![2.0, 0.0], vec![]),
                nat(vec![-0.5, 1.2], vec![]),
            ],
            FamilyTag::Vmf { n } => {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                vec![
                    nat(vec![0.0; n], vec![]),
                    nat(e, vec![]),
                    nat((0..n).map(|i| [0.5, -2.0, 1.0, 0.3][i % 4]).collect(), vec![]),
                ]
            }
            FamilyTag::FisherBingham { n } => {
                let mut kent_mu = vec![0.0; n];
                kent_mu[0] = 1.5;
                let mut a = DMatrix::zeros(n, n);
                a[(1, 1)] = 0.6;
                if n > 2 {
                    a[(2, 2)] = -0.6;
                }
                let mut general = vec![0.4; n];
                general[0] = -0.8;
                let b = DMatrix::from_fn(n, n, |i, j| if i == j { 0.5 - 0.4 * i as f64 } else { 0.3 });
                vec![
                    nat(vec![0.0; n + sym_len(n)], vec![]),
                    nat([kent_mu, pack_sym(&a)].concat(), vec![]),
                    nat([general, pack_sym(&b)].concat(), vec![]),
                ]
            }
            FamilyTag::Hyperboloid { n } => {
                let xi = |r: f64| {
                    let mut v = vec![0.0; n + 1];
                    v[0] = r.cosh();
                    v[1] = r.sinh() * 0.6;
                    v[n] += r.sinh() * 0.8;
                    DVector::from_vec(v)
                };
                [(0.5, 0.0), (1.0, 0.6), (2.0, 0.3)]
                    .into_iter()
                    .map(|(kappa, r)| from(Classical::Hyperboloid { kappa, xi: xi(r) }))
                    .collect()
            }
            FamilyTag::Poincare => vec![
                nat(vec![1.0, 0.0, 1.0], vec![]),
                nat(vec![2.0, 0.5, 1.0], vec![]),
                nat(vec![0.7, -0.3, 0.9], vec![]),
            ],
        }
    }

    pub fn theta_description(&self) -> String {
        match self.tag {
            FamilyTag::Bernoulli => "all real θ".into(),
            FamilyTag::Categorical { n } => format!("all a ∈ R^{n} with a_1 + ... + a_{n} = 0"),
            FamilyTag::Normal => "θ = (θ1, θ2, θ3) with θ1 > 0 (θ3 is a free gauge, canonical value 0)".into(),
            FamilyTag::MvNormal { n } => format!(
                "packed Sym({}) matrix [[θ1, θ2], [θ2ᵀ, θ3]] with θ1 positive definite (θ3 free, canonical 0)",
                n + 1
            ),
            FamilyTag::GammaLambda { lambda } => format!("(β, α) with β > 0 and α·λ > 0 (λ = {lambda})"),
            FamilyTag::Wishart { n } => format!(
                "(y, t) with y ∈ Sym+({n}) and α = t/2 > {}",
                0.5 * (n as f64 - 1.0)
            ),
            FamilyTag::VonMises => "all (a, b) ∈ R^2".into(),
            FamilyTag::Vmf { n } => format!("all μ ∈ R^{n}"),
            FamilyTag::FisherBingham { n } => format!(
                "all (μ, A) ∈ R^{n} ⊕ Sym({n}) (A and A + cI give the same law; canonical gauge tr A = 0)"
            ),
            FamilyTag::Hyperboloid { .. } => "y with y0 < 0 and <y, y> < 0".into(),
            FamilyTag::Poincare => "(a, b, c) with a > 0 and ac - b^2 > 0".into(),
        }
    }

    pub fn classical_description(&self) -> String {
        match self.tag {
            FamilyTag::Bernoulli => "s = e^{-θ}/(e^{-θ}+e^{θ}) = P(x = +1); θ = (1/2) log((1-s)/s)".into(),
            FamilyTag::Categorical { n } => format!("s_k = e^{{{n} a_k}} / Σ_i e^{{{n} a_i}}; a_k = (log s_k - mean log s)/{n}"),
            FamilyTag::Normal => "μ = -θ2/θ1, σ = 1/sqrt(2 θ1)".into(),
            FamilyTag::MvNormal { .. } => "μ = -θ1⁻¹ θ2, Σ = (1/2) θ1⁻¹".into(),
            FamilyTag::GammaLambda { .. } => "k = α/λ, θ = β^{-1/λ}".into(),
            FamilyTag::Wishart { .. } => {
                "(y, α) with α = t/2; density ∝ exp(-Tr(yx)) (det x)^{α-(n+1)/2} dx".into()
            }
            FamilyTag::VonMises => {
                "κ = sqrt(a²+b²), μ = atan2(b, a); density ∝ exp(-κ cos(x - μ))".into()
            }
            FamilyTag::Vmf { .. } => "μ itself; density ∝ exp(-μᵀx)".into(),
            FamilyTag::FisherBingham { .. } => "(μ, A) itself; density ∝ exp(-μᵀx - xᵀAx)".into(),
            FamilyTag::Hyperboloid { .. } => "y = -κξ with κ > 0, ξ ∈ H^n; density ∝ exp(κ<ξ, v>)".into(),
            FamilyTag::Poincare => {
                "(a, b, c) itself; corresponds to the H^2 member κ = 2 sqrt(ac-b²), ξ = ((a+c)/κ, (a-c)/κ, -2b/κ)".into()
            }
        }
    }

    pub fn normalizer_description(&self) -> String {
        match self.tag {
            FamilyTag::Bernoulli => "A(θ) = log(e^{-θ} + e^{θ})".into(),
            FamilyTag::Categorical { n } => format!("A(a) = log Σ_i e^{{{n} a_i}}"),
            FamilyTag::Normal => "A(θ) = (1/2) log(π/θ1) - θ3 + θ2²/θ1".into(),
            FamilyTag::MvNormal { n } => {
                format!("A(θ) = ({n}/2) log π - (1/2) log det θ1 - θ3 + θ2ᵀθ1⁻¹θ2")
            }
            FamilyTag::GammaLambda { .. } => "A(α, β) = log Γ(α/λ) - log|λ| - (α/λ) log β".into(),
            FamilyTag::Wishart { n } => format!(
                "A(y, α) = ({}/4) log π + Σ_{{k=1..{n}}} log Γ(α - (k-1)/2) - α log det y",
                n * n.saturating_sub(1)
            ),
            FamilyTag::VonMises => "A(a, b) = log(2π I_0(sqrt(a²+b²)))".into(),
            FamilyTag::Vmf { n } => format!(
                "A(μ) = ({n}/2) log 2π + (1-{n}/2) log|μ| + log I_{{{n}/2-1}}(|μ|); log area of S^{} at μ = 0",
                n - 1
            ),
            FamilyTag::FisherBingham { .. } => {
                "no closed form; tensor-product quadrature on the sphere (Monte Carlo beyond S^4)".into()
            }
            FamilyTag::Hyperboloid { n } => format!(
                "A(κ) = log 2 + log K_ν(κ) + ν log 2π - ν log κ with ν = {}",
                0.5 * (n as f64 - 1.0)
            ),
            FamilyTag::Poincare => "A(a, b, c) = log π - log D - 2D with D = sqrt(ac - b²)".into(),
        }
    }

    /// Base measure on `X` in words.
    pub fn measure_description(&self) -> &'static str {
        use crate::construction::BaseMeasure::*;
        match self.construction.measure.base {
            Counting => "counting measure",
            Lebesgue => "Lebesgue measure",
            HaarPositive => "Haar measure dx/x",
            ArcLength => "arc length dt on [0, 2π)",
            SphereSurface => "surface measure",
            SpdInvariant => "dx/(det x)^{(n+1)/2}, dx Lebesgue on the upper triangle",
            HyperboloidVolume => "SO_0(1,n)-invariant volume",
            PoincareArea => "dx dy / y^2",
        }
    }
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// `(θ1, θ2, θ3)` blocks of the packed `Sym(n+1)` parameter.
pub(crate) fn mvnormal_blocks(phi: &[f64], n: usize) -> (DMatrix<f64>, DVector<f64>, f64) {
    let m = unpack_sym(phi, n + 1);
    let t1 = m.view((0, 0), (n, n)).into_owned();
    let t2 = m.view((0, n), (n, 1)).column(0).into_owned();
    (t1, t2, m[(n, n)])
}

/// `log ∫_{S^{n-1}} exp(-μᵀx) dx` as a function of `r = |μ|`.
pub fn vmf_log_partition(n: usize, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(log_sphere_area(n));
    }
    let nu = 0.5 * n as f64 - 1.0;
    Ok(0.5 * n as f64 * TAU.ln() - nu * r.ln() + log_bessel_i(nu, r)?)
}

/// `-log c_κ` for the hyperboloid family on `Hⁿ`.
pub fn hyperboloid_log_partition(n: usize, kappa: f64) -> Result<f64> {
    let nu = 0.5 * (n as f64 - 1.0);
    Ok(LN_2 + log_bessel_k(nu, kappa)? + nu * TAU.ln() - nu * kappa.ln())
}

/// Which substitution between Poincaré parameters `(a, b, c)` and
/// hyperboloid parameters `(κ, ξ)` is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Substitution {
    /// `a = κ(ξ0+ξ1)/2`, `b = -κξ2/2`, `c = κ(ξ0-ξ1)/2`, the map that makes both
    /// families agree under `x + iy ↦ (1+x²+y², 1-x²-y², 2x)/(2y)`.
    Corrected,
    /// `a = κ(ξ0+ξ1)/(2π)`, `b = κξ2/2`, `c = κ(ξ0-ξ1)/2`, kept to show that it does not.
    Literal,
}

/// `z = x + iy ↦ (1 + x² + y², 1 - x² - y², 2x) / (2y) ∈ H²`.
pub fn half_plane_to_hyperboloid(x: f64, y: f64) -> DVector<f64> {
    let r2 = x * x + y * y;
    DVector::from_vec(vec![(1.0 + r2) / (2.0 * y), (1.0 - r2) / (2.0 * y), x / y])
}

/// Inverse of [`half_plane_to_hyperboloid`].
pub fn hyperboloid_to_half_plane(v: &DVector<f64>) -> (f64, f64) {
    let y = 1.0 / (v[0] + v[1]);
    (v[2] * y, y)
}

/// `(κ, ξ) ↦ (a, b, c)`.
pub fn hyperboloid_to_poincare(kappa: f64, xi: &DVector<f64>, sub: Substitution) -> [f64; 3] {
    match sub {
        Substitution::Corrected => [
            0.5 * kappa * (xi[0] + xi[1]),
            -0.5 * kappa * xi[2],
            0.5 * kappa * (xi[0] - xi[1]),
        ],
        Substitution::Literal => [
            kappa * (xi[0] + xi[1]) / TAU,
            0.5 * kappa * xi[2],
            0.5 * kappa * (xi[0] - xi[1]),
        ],
    }
}

/// `(a, b, c) ↦ (κ, ξ)`, the inverse of [`hyperboloid_to_poincare`].
pub fn poincare_to_hyperboloid(abc: [f64; 3], sub: Substitution) -> Result<(f64, DVector<f64>)> {
    let [a, b, c] = abc;
    let (k0, k1, k2) = match sub {
        Substitution::Corrected => (a + c, a - c, -2.0 * b),
        Substitution::Literal => (PI * a + c, PI * a - c, 2.0 * b),
    };
    let kk = k0 * k0 - k1 * k1 - k2 * k2;
    if !(kk > 0.0 && k0 > 0.0) {
        return Err(Error::domain(format!("({a}, {b}, {c}) has no hyperboloid counterpart")));
    }
    let kappa = kk.sqrt();
    Ok((kappa, DVector::from_vec(vec![k0 / kappa, k1 / kappa, k2 / kappa])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_point;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(name: &str) -> FamilySpec {
        FamilySpec::from_name(name, None, None).unwrap()
    }

    #[test]
    fn domain_examples() {
        let normal = spec("normal");
        assert!(normal.theta_in_domain(&NaturalParameter::new(vec![1.0, 0.0, 0.0], vec![])));
        assert!(!normal.theta_in_domain(&NaturalParameter::new(vec![-1.0, 0.0, 0.0], vec![])));
        let gamma = spec("gamma");
        assert!(gamma.theta_in_domain(&NaturalParameter::new(vec![1.0], vec![2.0])));
        assert!(!gamma.theta_in_domain(&NaturalParameter::new(vec![1.0], vec![-1.0])));
        let wishart = spec("wishart");
        let i2 = pack_sym(&DMatrix::identity(2, 2));
        assert!(!wishart.theta_in_domain(&NaturalParameter::new(i2.clone(), vec![0.8])));
        assert!(wishart.theta_in_domain(&NaturalParameter::new(i2, vec![1.2])));
        assert!(!normal.theta_in_domain(&NaturalParameter::new(vec![1.0], vec![])));
        assert!(!normal.theta_in_domain(&NaturalParameter::new(vec![f64::NAN, 0.0, 0.0], vec![])));
    }

    #[test]
    fn log_partition_examples() {
        let a = spec("normal").log_partition(&NaturalParameter::new(vec![0.5, 0.0, 0.0], vec![])).unwrap();
        assert!((a - 0.5 * TAU.ln()).abs() < 1e-15);
        let a = spec("von_mises").log_partition(&NaturalParameter::new(vec![0.0, 0.0], vec![])).unwrap();
        assert!((a - TAU.ln()).abs() < 1e-15);
        let h = spec("hyperboloid");
        let a = h.log_partition(&NaturalParameter::new(vec![-1.0, 0.0, 0.0], vec![])).unwrap();
        assert!((a - (TAU.ln() - 1.0)).abs() < 1e-12);
        assert!(matches!(
            spec("normal").log_partition(&NaturalParameter::new(vec![-0.5, 0.0, 0.0], vec![])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn log_density_examples() {
        let n = spec("normal");
        let d = n.log_density(&NaturalParameter::new(vec![0.5, 0.0, 0.0], vec![]), &Point::Real(0.0)).unwrap();
        assert!((d + 0.5 * TAU.ln()).abs() < 1e-15);
        let b = spec("bernoulli");
        for s in [1, -1] {
            let d = b.log_density(&NaturalParameter::new(vec![0.0], vec![]), &Point::Sign(s)).unwrap();
            assert!((d - 0.5f64.ln()).abs() < 1e-15);
        }
        let p = spec("poincare");
        let d = p
            .log_density(&NaturalParameter::new(vec![1.0, 0.0, 1.0], vec![]), &Point::HalfPlane { x: 0.0, y: 1.0 })
            .unwrap();
        assert!((d + PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn classical_examples() {
        let n = spec("normal");
        let c = n.to_classical(&NaturalParameter::new(vec![0.5, 0.0, 0.7], vec![])).unwrap();
        assert_eq!(c, Classical::Normal { sigma: 1.0, mu: -0.0 });
        assert_eq!(
            n.from_classical(&Classical::Normal { sigma: 1.0, mu: 0.0 }).unwrap(),
            NaturalParameter::new(vec![0.5, -0.0, 0.0], vec![])
        );
        let b = spec("bernoulli");
        assert_eq!(b.to_classical(&NaturalParameter::new(vec![0.0], vec![])).unwrap(), Classical::Bernoulli { s: 0.5 });
        let h = spec("hyperboloid");
        let c = h.to_classical(&NaturalParameter::new(vec![-2.0, 0.0, 0.0], vec![])).unwrap();
        assert_eq!(c, Classical::Hyperboloid { kappa: 2.0, xi: DVector::from_vec(vec![1.0, -0.0, -0.0]) });
        let g = spec("gamma");
        assert_eq!(
            g.from_classical(&Classical::GammaLambda { k: 1.0, theta: 1.0 }).unwrap(),
            NaturalParameter::new(vec![1.0], vec![1.0])
        );
        assert!(matches!(
            b.from_classical(&Classical::Normal { sigma: 1.0, mu: 0.0 }),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn classical_roundtrip_on_examples() {
        for tag in FamilyTag::defaults() {
            let s = FamilySpec::new(tag).unwrap();
            for theta in s.example_parameters() {
                let back = s.from_classical(&s.to_classical(&theta).unwrap()).unwrap();
                let (a, b) = (s.canonical_gauge(&theta).flat(), s.canonical_gauge(&back).flat());
                // κ = 0 has no direction, so von Mises/vMF examples at the origin are skipped.
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{} {a:?} {b:?}", s.name());
                }
            }
        }
    }

    #[test]
    fn gauge_does_not_change_density() {
        let n = spec("normal");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t0 = NaturalParameter::new(vec![0.8, -0.3, 0.0], vec![]);
        let t1 = NaturalParameter::new(vec![0.8, -0.3, 4.2], vec![]);
        for _ in 0..20 {
            let x = random_point(&mut rng, &SpaceTag::RealLine);
            let d = n.log_density(&t0, &x).unwrap() - n.log_density(&t1, &x).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn mvnormal_schur_identity() {
        // exp(det(full)/det θ1) and exp(θ3 - θ2ᵀθ1⁻¹θ2) agree.
        let s = FamilySpec::new(FamilyTag::MvNormal { n: 3 }).unwrap();
        for theta in s.example_parameters() {
            let mut phi = theta.phi.clone();
            *phi.last_mut().unwrap() = 0.9;
            let full = unpack_sym(&phi, 4);
            let (t1, t2, t3) = mvnormal_blocks(&phi, 3);
            let ratio = full.determinant() / t1.determinant();
            let schur = t3 - t2.dot(&(t1.clone().try_inverse().unwrap() * &t2));
            assert!((ratio - schur).abs() < 1e-10 * (1.0 + schur.abs()));
        }
    }

    #[test]
    fn vmf_three_dimensional_closed_form() {
        for r in [0.1, 1.0, 5.0, 30.0] {
            let a = vmf_log_partition(3, r).unwrap();
            let closed = (4.0 * PI).ln() + r.sinh().ln() - r.ln();
            assert!((a - closed).abs() < 1e-10 * closed.abs().max(1.0), "{r}");
        }
        assert!((vmf_log_partition(3, 0.0).unwrap() - (4.0 * PI).ln()).abs() < 1e-15);
    }

    #[test]
    fn wishart_one_is_gamma() {
        let w = FamilySpec::new(FamilyTag::Wishart { n: 1 }).unwrap();
        let g = spec("gamma");
        let tw = w.from_classical(&Classical::Wishart { y: DMatrix::from_element(1, 1, 1.7), alpha: 2.3 }).unwrap();
        let tg = NaturalParameter::new(vec![1.7], vec![2.3]);
        for x in [0.1, 0.8, 2.0, 5.5] {
            let a = w.log_density(&tw, &Point::Spd(DMatrix::from_element(1, 1, x))).unwrap();
            let b = g.log_density(&tg, &Point::Positive(x)).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn substitution_roundtrip() {
        let xi = DVector::from_vec(vec![1.25f64.sqrt() * 1.2, 0.3, (1.44 * 1.25 - 1.0 - 0.09f64).sqrt()]);
        assert!((lorentz_inner(xi.as_slice(), xi.as_slice()) + 1.0).abs() < 1e-12);
        for sub in [Substitution::Corrected, Substitution::Literal] {
            let abc = hyperboloid_to_poincare(1.7, &xi, sub);
            let (k, x) = poincare_to_hyperboloid(abc, sub).unwrap();
            assert!((k - 1.7).abs() < 1e-12);
            assert!((x - &xi).amax() < 1e-12);
        }
        let (x, y) = hyperboloid_to_half_plane(&half_plane_to_hyperboloid(0.3, 1.9));
        assert!((x - 0.3).abs() < 1e-15 && (y - 1.9).abs() < 1e-15);
    }

    #[test]
    fn parse_variants() {
        assert_eq!(FamilyTag::parse("inverse_gamma", None, None).unwrap(), FamilyTag::GammaLambda { lambda: -1.0 });
        assert!(matches!(FamilyTag::parse("gamma_lambda", None, Some(0.0)), Err(Error::Unsupported(_))));
        assert!(matches!(FamilyTag::parse("hyperboloid", Some(1), None), Err(Error::Unsupported(_))));
        assert!(matches!(FamilyTag::parse("student_t", None, None), Err(Error::Unsupported(_))));
        assert!(matches!(FamilyTag::parse("normal", Some(3), None), Err(Error::Schema(_))));
    }
}
