//! The generic construction: representations, the H-fixed vector, characters
//! in `Ω₀(G, H)`, relatively invariant base measures and the unnormalized
//! kernel `exp(-<φ, x·v₀>) χ(x) dμ(x)`.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupPair};
use crate::linalg::{affine_matrix, pack_sym, rot2, sym_len, sym_weights, unpack_sym};
use crate::space::{canonical_representative, Point, SpaceTag};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// How `G` acts on the coordinate vector of `V`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rep", rename_all = "snake_case")]
pub enum RepKind {
    /// `g · v = g v` on `ℝ` for `g ∈ {±1}`.
    Sign,
    /// Permutation of coordinates on `W = {v ∈ ℝⁿ : Σ vᵢ = 0}`.
    PermutationSubrep { n: usize },
    /// `S ↦ M S Mᵀ` on `Sym(k)` with `M = [[A, b], [0, 1]]`, `k = n + 1`.
    AffineConjugation { k: usize },
    /// `v ↦ g^λ v` on `ℝ` for `g ∈ ℝ_{>0}`.
    Power { lambda: f64 },
    /// `S ↦ g S gᵀ` on `Sym(n)`.
    Conjugation { n: usize },
    /// Defining action of `SO(n)` on `ℝⁿ`.
    NaturalRotation { n: usize },
    /// `(v, S) ↦ (g v, g S gᵀ)` on `ℝⁿ ⊕ Sym(n)`.
    VectorPlusConjugation { n: usize },
    /// Defining action of `SO₀(1, n)` on `ℝ^{n+1}`.
    NaturalLorentz { n: usize },
}

/// Bilinear form identifying `V^∨` with `V`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    Standard,
    /// Standard inner product restricted to the sum-zero subspace.
    RestrictedStandard,
    /// `Tr(xy)` on packed symmetric matrices.
    Trace,
    /// Standard on `ℝⁿ` plus `Tr(xy)` on `Sym(n)`.
    StandardPlusTrace,
    /// `-x0 y0 + x1 y1 + ... + xn yn`.
    Minkowski,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationDescriptor {
    pub kind: RepKind,
    /// Number of stored coordinates (for `W` this is `n`, one more than `dim W`).
    pub dim: usize,
    pub pairing: Pairing,
    /// Per-coordinate pairing weights: `<φ, v> = Σ wⱼ φⱼ vⱼ`.
    pub weights: Vec<f64>,
}

impl RepresentationDescriptor {
    pub fn new(kind: RepKind) -> Self {
        let (dim, pairing, weights) = match kind {
            RepKind::Sign | RepKind::Power { .. } => (1, Pairing::Standard, vec![1.0]),
            RepKind::PermutationSubrep { n } => (n, Pairing::RestrictedStandard, vec![1.0; n]),
            RepKind::AffineConjugation { k } => (sym_len(k), Pairing::Trace, sym_weights(k)),
            RepKind::Conjugation { n } => (sym_len(n), Pairing::Trace, sym_weights(n)),
            RepKind::NaturalRotation { n } => (n, Pairing::Standard, vec![1.0; n]),
            RepKind::VectorPlusConjugation { n } => {
                let mut w = vec![1.0; n];
                w.extend(sym_weights(n));
                (n + sym_len(n), Pairing::StandardPlusTrace, w)
            }
            RepKind::NaturalLorentz { n } => {
                let mut w = vec![1.0; n + 1];
                w[0] = -1.0;
                (n + 1, Pairing::Minkowski, w)
            }
        };
        RepresentationDescriptor { kind, dim, pairing, weights }
    }

    /// `<φ, v>` in the descriptor's pairing.
    pub fn pair(&self, phi: &[f64], v: &[f64]) -> Result<f64> {
        self.check_len(phi.len())?;
        self.check_len(v.len())?;
        Ok(self.pair_unchecked(phi, v))
    }

    pub(crate) fn pair_unchecked(&self, phi: &[f64], v: &[f64]) -> f64 {
        self.weights.iter().zip(phi).zip(v).map(|((w, a), b)| w * a * b).sum()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.dim {
            Ok(())
        } else {
            Err(Error::dims(self.dim, len))
        }
    }

    /// `ρ(g) v`.
    pub fn apply(&self, g: &GroupElement, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v.len())?;
        let wrong = || {
            Error::domain(format!(
                "{} element cannot act on representation {:?}",
                g.kind_name(),
                self.kind
            ))
        };
        Ok(match (self.kind, g) {
            (RepKind::Sign, GroupElement::Sign(s)) => vec![*s as f64 * v[0]],
            (RepKind::PermutationSubrep { n }, GroupElement::Permutation(p)) if p.len() == n => {
                let mut out = vec![0.0; n];
                for (i, &j) in p.iter().enumerate() {
                    out[j] = v[i];
                }
                out
            }
            (RepKind::AffineConjugation { k }, GroupElement::Affine { linear, shift }) if linear.nrows() + 1 == k => {
                conjugate(&affine_matrix(linear, shift), v, k)
            }
            (RepKind::Power { lambda }, GroupElement::Positive(x)) => vec![x.powf(lambda) * v[0]],
            (RepKind::Conjugation { n }, GroupElement::Linear(m) | GroupElement::SpecialLinear(m)) if m.nrows() == n => {
                conjugate(m, v, n)
            }
            (RepKind::NaturalRotation { n: 2 }, GroupElement::Angle(a)) => mat_vec(&rot2(*a), v),
            (RepKind::NaturalRotation { n }, GroupElement::Rotation(m)) if m.nrows() == n => mat_vec(m, v),
            (RepKind::VectorPlusConjugation { n }, GroupElement::Rotation(m)) if m.nrows() == n => {
                let mut out = mat_vec(m, &v[..n]);
                out.extend(conjugate(m, &v[n..], n));
                out
            }
            (RepKind::NaturalLorentz { n }, GroupElement::Lorentz(m)) if m.nrows() == n + 1 => mat_vec(m, v),
            _ => return Err(wrong()),
        })
    }

    /// Contragredient action on `V^∨` in the pairing gauge: `<g·φ, v> = <φ, ρ(g⁻¹) v>`.
    pub fn contragredient(&self, g: &GroupElement, phi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(phi.len())?;
        let inv_t = |m: &DMatrix<f64>| -> Result<DMatrix<f64>> {
            m.clone()
                .try_inverse()
                .map(|i| i.transpose())
                .ok_or_else(|| Error::domain("group element is not invertible"))
        };
        match (self.kind, g) {
            // Orthogonal actions and the Lorentz action are their own contragredients
            // in the chosen pairings.
            (RepKind::Sign, _)
            | (RepKind::PermutationSubrep { .. }, _)
            | (RepKind::NaturalRotation { .. }, _)
            | (RepKind::NaturalLorentz { .. }, _)
            | (RepKind::VectorPlusConjugation { .. }, _) => self.apply(g, phi),
            (RepKind::Power { lambda }, GroupElement::Positive(x)) => Ok(vec![x.powf(-lambda) * phi[0]]),
            (RepKind::AffineConjugation { k }, GroupElement::Affine { linear, shift }) if linear.nrows() + 1 == k => {
                Ok(conjugate(&inv_t(&affine_matrix(linear, shift))?, phi, k))
            }
            (RepKind::Conjugation { n }, GroupElement::Linear(m) | GroupElement::SpecialLinear(m)) if m.nrows() == n => {
                Ok(conjugate(&inv_t(m)?, phi, n))
            }
            _ => self.apply(g, phi),
        }
    }
}

fn mat_vec(m: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).as_slice().to_vec()
}

/// `M S Mᵀ` on packed `Sym(k)`.
fn conjugate(m: &DMatrix<f64>, packed: &[f64], k: usize) -> Vec<f64> {
    let s = unpack_sym(packed, k);
    pack_sym(&(m * s * m.transpose()))
}

/// Why `Ω₀(G, H)` is trivial for a catalog pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrivialityReason {
    Compact,
    ConnectedSemisimple,
    /// `π(G) = π(H)` for the abelianization `π: G → G/[G, G]`.
    AbelianizationCoveredBySubgroup,
}

/// A log-character `log χ: G → ℝ` in `Ω₀(G, H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterGenerator {
    /// `x ↦ log x` on `ℝ_{>0}`.
    LogPositive,
    /// `g ↦ log |det g|` on `GL(n, ℝ)`.
    LogAbsDet,
}

impl CharacterGenerator {
    pub fn eval_group(&self, g: &GroupElement) -> Result<f64> {
        match (self, g) {
            (CharacterGenerator::LogPositive, GroupElement::Positive(x)) => Ok(x.ln()),
            (CharacterGenerator::LogAbsDet, GroupElement::Linear(m)) => Ok(m.determinant().abs().ln()),
            _ => Err(Error::domain(format!("character {self:?} is not defined on {}", g.kind_name()))),
        }
    }

    /// `log χ(x)` evaluated through the coset representative's chart formula.
    pub fn eval_point(&self, x: &Point) -> Result<f64> {
        match (self, x) {
            (CharacterGenerator::LogPositive, Point::Positive(t)) => Ok(t.ln()),
            (CharacterGenerator::LogAbsDet, Point::Spd(s)) => {
                // x = g gᵀ, so log |det g| = ½ log det x.
                crate::linalg::spd_log_det(s)
                    .map(|d| 0.5 * d)
                    .ok_or_else(|| Error::domain("matrix is not positive definite"))
            }
            _ => Err(Error::domain(format!("character {self:?} is not defined at this point"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterBasis {
    pub generators: Vec<CharacterGenerator>,
    /// Set when the basis is empty.
    pub trivial_because: Option<TrivialityReason>,
}

impl CharacterBasis {
    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn log_eval(&self, exponents: &[f64], x: &Point) -> Result<f64> {
        if exponents.len() != self.dim() {
            return Err(Error::dims(self.dim(), exponents.len()));
        }
        let mut acc = 0.0;
        for (gen, a) in self.generators.iter().zip(exponents) {
            acc += a * gen.eval_point(x)?;
        }
        Ok(acc)
    }

    pub fn log_eval_group(&self, exponents: &[f64], g: &GroupElement) -> Result<f64> {
        if exponents.len() != self.dim() {
            return Err(Error::dims(self.dim(), exponents.len()));
        }
        let mut acc = 0.0;
        for (gen, a) in self.generators.iter().zip(exponents) {
            acc += a * gen.eval_group(g)?;
        }
        Ok(acc)
    }
}

/// The table of `Ω₀(G, H)` bases for the catalog pairs.
pub fn omega0_basis(pair: &GroupPair) -> Result<CharacterBasis> {
    pair.validate()?;
    let trivial = |r| CharacterBasis { generators: vec![], trivial_because: Some(r) };
    Ok(match pair {
        GroupPair::SignTrivial
        | GroupPair::SymmetricStabilizer { .. }
        | GroupPair::CircleTrivial
        | GroupPair::SphereRotation { .. } => trivial(TrivialityReason::Compact),
        GroupPair::LorentzRotation { .. } | GroupPair::SpecialLinearRotation => {
            trivial(TrivialityReason::ConnectedSemisimple)
        }
        // [G, G] = ℝⁿ (translations), so G/[G, G] ≅ GL(n, ℝ)/[GL, GL] is already covered by H.
        GroupPair::AffineLine | GroupPair::Affine { .. } => trivial(TrivialityReason::AbelianizationCoveredBySubgroup),
        GroupPair::PositiveTrivial => CharacterBasis {
            generators: vec![CharacterGenerator::LogPositive],
            trivial_because: None,
        },
        GroupPair::GeneralLinearOrthogonal { .. } => CharacterBasis {
            generators: vec![CharacterGenerator::LogAbsDet],
            trivial_because: None,
        },
    })
}

/// `∏ χᵢ(x)^{αᵢ}`.
pub fn character_eval(basis: &CharacterBasis, exponents: &[f64], x: &Point) -> Result<f64> {
    Ok(basis.log_eval(exponents, x)?.exp())
}

/// Reference relatively invariant measure on `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseMeasure {
    Counting,
    /// Lebesgue measure on `ℝⁿ`.
    Lebesgue,
    /// Haar measure `dx/x` on `ℝ_{>0}`.
    HaarPositive,
    /// Arc length `dt` on `S¹`.
    ArcLength,
    /// Riemannian surface measure on `S^{n-1}` (total mass `2π^{n/2}/Γ(n/2)`).
    SphereSurface,
    /// `dx / (det x)^{(n+1)/2}` on `Sym⁺(n)`, `dx` the Lebesgue measure on the packed upper triangle.
    SpdInvariant,
    /// `SO₀(1, n)`-invariant Riemannian volume of `Hⁿ`.
    HyperboloidVolume,
    /// `dx dy / y²` on the upper half plane.
    PoincareArea,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub base: BaseMeasure,
    pub space: SpaceTag,
}

impl MeasureSpec {
    pub fn for_space(space: SpaceTag) -> Self {
        let base = match space {
            SpaceTag::SignSet | SpaceTag::Labels { .. } => BaseMeasure::Counting,
            SpaceTag::RealLine | SpaceTag::Euclidean { .. } => BaseMeasure::Lebesgue,
            SpaceTag::PositiveReals => BaseMeasure::HaarPositive,
            SpaceTag::Circle => BaseMeasure::ArcLength,
            SpaceTag::Sphere { .. } => BaseMeasure::SphereSurface,
            SpaceTag::SpdCone { .. } => BaseMeasure::SpdInvariant,
            SpaceTag::Hyperboloid { .. } => BaseMeasure::HyperboloidVolume,
            SpaceTag::UpperHalfPlane => BaseMeasure::PoincareArea,
        };
        MeasureSpec { base, space }
    }

    /// `log f(g)` for the multiplier `dμ(g·x) = f(g) dμ(x)`.
    pub fn log_multiplier(&self, g: &GroupElement) -> f64 {
        match (self.base, g) {
            (BaseMeasure::Lebesgue, GroupElement::Affine { linear, .. }) => linear.determinant().abs().ln(),
            _ => 0.0,
        }
    }

    /// Log density of the base measure w.r.t. Lebesgue measure in chart coordinates
    /// (zero for counting, arc length and surface measures).
    pub fn log_chart_density(&self, x: &Point) -> f64 {
        match (self.base, x) {
            (BaseMeasure::HaarPositive, Point::Positive(t)) => -t.ln(),
            (BaseMeasure::SpdInvariant, Point::Spd(s)) => {
                let n = s.nrows() as f64;
                -0.5 * (n + 1.0) * crate::linalg::spd_log_det(s).unwrap_or(f64::NAN)
            }
            (BaseMeasure::PoincareArea, Point::HalfPlane { y, .. }) => -2.0 * y.ln(),
            _ => 0.0,
        }
    }
}

/// Natural parameter `θ = (φ, χ)`: `φ` in the pairing gauge, `χ` as exponents in the `Ω₀` basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalParameter {
    pub phi: Vec<f64>,
    pub chi_exponents: Vec<f64>,
}

impl NaturalParameter {
    pub fn new(phi: Vec<f64>, chi_exponents: Vec<f64>) -> Self {
        NaturalParameter { phi, chi_exponents }
    }

    /// `φ` followed by the character exponents.
    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.phi.clone();
        v.extend(&self.chi_exponents);
        v
    }

    pub fn from_flat(values: &[f64], phi_len: usize) -> Self {
        NaturalParameter {
            phi: values[..phi_len].to_vec(),
            chi_exponents: values[phi_len..].to_vec(),
        }
    }
}

/// `T(x) = (x·v₀, (log χᵢ(x))ᵢ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SufficientStatistic {
    pub rep_part: Vec<f64>,
    pub char_part: Vec<f64>,
}

impl SufficientStatistic {
    pub fn flat(&self) -> Vec<f64> {
        let mut v = self.rep_part.clone();
        v.extend(&self.char_part);
        v
    }
}

/// The inputs `(G, H, V, v₀)` together with `Ω₀(G, H)` and the base measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    pub pair: GroupPair,
    pub rep: RepresentationDescriptor,
    pub v0: Vec<f64>,
    pub basis: CharacterBasis,
    pub measure: MeasureSpec,
}

impl Construction {
    pub fn new(pair: GroupPair, kind: RepKind, v0: Vec<f64>) -> Result<Self> {
        let rep = RepresentationDescriptor::new(kind);
        if v0.len() != rep.dim {
            return Err(Error::dims(rep.dim, v0.len()));
        }
        Ok(Construction {
            pair,
            rep,
            v0,
            basis: omega0_basis(&pair)?,
            measure: MeasureSpec::for_space(pair.space()),
        })
    }

    pub fn space(&self) -> SpaceTag {
        self.pair.space()
    }

    /// `max_h ‖ρ(h) v₀ − v₀‖` over the generators of `H`.
    pub fn v0_fixedness_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for h in self.pair.subgroup_generators() {
            let moved = self.rep.apply(&h, &self.v0)?;
            for (a, b) in moved.iter().zip(&self.v0) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }

    /// `x · v₀ = ρ(g) v₀` for the canonical representative `g` of `x`.
    pub fn orbit_statistic(&self, x: &Point) -> Result<Vec<f64>> {
        let g = canonical_representative(&self.pair, x)?;
        self.rep.apply(&g, &self.v0)
    }

    /// `ρ(g) v₀` for an arbitrary coset representative `g`.
    pub fn orbit_statistic_via(&self, g: &GroupElement) -> Result<Vec<f64>> {
        g.check_pair(&self.pair)?;
        self.rep.apply(g, &self.v0)
    }

    pub fn sufficient_statistic(&self, x: &Point) -> Result<SufficientStatistic> {
        let rep_part = self.orbit_statistic(x)?;
        let char_part = self
            .basis
            .generators
            .iter()
            .map(|c| c.eval_point(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(SufficientStatistic { rep_part, char_part })
    }

    pub fn check_parameter(&self, theta: &NaturalParameter) -> Result<()> {
        if theta.phi.len() != self.rep.dim {
            return Err(Error::dims(self.rep.dim, theta.phi.len()));
        }
        if theta.chi_exponents.len() != self.basis.dim() {
            return Err(Error::dims(self.basis.dim(), theta.chi_exponents.len()));
        }
        Ok(())
    }

    /// `-<φ, x·v₀> + Σ αᵢ log χᵢ(x)`, the log density of `dp̃_θ` w.r.t. the base measure.
    pub fn unnormalized_log_kernel(&self, theta: &NaturalParameter, x: &Point) -> Result<f64> {
        self.check_parameter(theta)?;
        let t = self.sufficient_statistic(x)?;
        Ok(self.kernel_from_statistic(theta, &t))
    }

    pub(crate) fn kernel_from_statistic(&self, theta: &NaturalParameter, t: &SufficientStatistic) -> f64 {
        let chi: f64 = theta.chi_exponents.iter().zip(&t.char_part).map(|(a, l)| a * l).sum();
        -self.rep.pair_unchecked(&theta.phi, &t.rep_part) + chi
    }

    /// `θ' = (g·φ, χ)`: the parameter of the pushforward of `p_θ` under `x ↦ g·x`.
    pub fn transform_parameter(&self, g: &GroupElement, theta: &NaturalParameter) -> Result<NaturalParameter> {
        self.check_parameter(theta)?;
        g.check_pair(&self.pair)?;
        g.validate()?;
        Ok(NaturalParameter {
            phi: self.rep.contragredient(g, &theta.phi)?,
            chi_exponents: theta.chi_exponents.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pack_sym;

    fn normal() -> Construction {
        Construction::new(GroupPair::AffineLine, RepKind::AffineConjugation { k: 2 }, vec![0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn rep_apply_examples() {
        let c = normal();
        // E22 under (1, 1) gives [[1, 1], [1, 1]].
        let out = c.rep.apply(&GroupElement::affine_line(1.0, 1.0), &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(out, vec![1.0, 1.0, 1.0]);

        let w = RepresentationDescriptor::new(RepKind::Conjugation { n: 2 });
        let g = GroupElement::Linear(DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0])));
        let i2 = pack_sym(&DMatrix::identity(2, 2));
        assert_eq!(w.apply(&g, &i2).unwrap(), vec![4.0, 0.0, 1.0]);

        let s = RepresentationDescriptor::new(RepKind::Sign);
        assert_eq!(s.apply(&GroupElement::Sign(-1), &[1.0]).unwrap(), vec![-1.0]);
        assert!(matches!(s.apply(&GroupElement::Sign(-1), &[1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn orbit_statistic_examples() {
        let c = normal();
        assert_eq!(c.orbit_statistic(&Point::Real(3.0)).unwrap(), vec![9.0, 3.0, 1.0]);
        let b = Construction::new(GroupPair::SignTrivial, RepKind::Sign, vec![1.0]).unwrap();
        assert_eq!(b.orbit_statistic(&Point::Sign(-1)).unwrap(), vec![-1.0]);
    }

    #[test]
    fn omega0_table() {
        let dims = |p: GroupPair| omega0_basis(&p).unwrap().dim();
        assert_eq!(dims(GroupPair::CircleTrivial), 0);
        assert_eq!(dims(GroupPair::PositiveTrivial), 1);
        assert_eq!(dims(GroupPair::AffineLine), 0);
        assert_eq!(dims(GroupPair::GeneralLinearOrthogonal { n: 3 }), 1);
        assert_eq!(
            omega0_basis(&GroupPair::SpecialLinearRotation).unwrap().trivial_because,
            Some(TrivialityReason::ConnectedSemisimple)
        );
        assert!(matches!(
            omega0_basis(&GroupPair::LorentzRotation { n: 1 }),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn character_examples() {
        let empty = omega0_basis(&GroupPair::CircleTrivial).unwrap();
        assert_eq!(character_eval(&empty, &[], &Point::Angle(1.0)).unwrap(), 1.0);
        let gamma = omega0_basis(&GroupPair::PositiveTrivial).unwrap();
        assert!((character_eval(&gamma, &[2.0], &Point::Positive(3.0)).unwrap() - 9.0).abs() < 1e-12);
        let wishart = omega0_basis(&GroupPair::GeneralLinearOrthogonal { n: 2 }).unwrap();
        let x = Point::Spd(DMatrix::identity(2, 2) * 2.0);
        assert!((character_eval(&wishart, &[1.0], &x).unwrap() - 2.0).abs() < 1e-12);
        assert!(character_eval(&wishart, &[1.0, 2.0], &x).is_err());
    }

    #[test]
    fn kernel_examples() {
        let c = normal();
        let theta = NaturalParameter::new(vec![1.0, 0.0, 0.0], vec![]);
        assert_eq!(c.unnormalized_log_kernel(&theta, &Point::Real(2.0)).unwrap(), -4.0);

        let g = Construction::new(GroupPair::PositiveTrivial, RepKind::Power { lambda: 1.0 }, vec![1.0]).unwrap();
        let theta = NaturalParameter::new(vec![1.0], vec![1.0]);
        let k = g.unnormalized_log_kernel(&theta, &Point::Positive(3.0)).unwrap();
        assert!((k - (-3.0 + 3f64.ln())).abs() < 1e-15);
        let t = g.sufficient_statistic(&Point::Positive(std::f64::consts::E)).unwrap();
        assert!((t.rep_part[0] - std::f64::consts::E).abs() < 1e-15);
        assert!((t.char_part[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn multiplier_is_scaling_on_the_line() {
        let m = MeasureSpec::for_space(SpaceTag::RealLine);
        assert!((m.log_multiplier(&GroupElement::affine_line(2.0, 0.0)) - 2f64.ln()).abs() < 1e-15);
        let h = MeasureSpec::for_space(SpaceTag::PositiveReals);
        assert_eq!(h.log_multiplier(&GroupElement::Positive(3.0)), 0.0);
    }
}
