//! The catalog groups, their elements and the group pairs `(G, H)`.

use crate::error::{Error, Result};
use crate::linalg::{affine_matrix, lorentz_inner, rot2};
use crate::space::SpaceTag;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Orthogonality / form-preservation tolerance for matrix payloads.
pub const GROUP_TOL: f64 = 1e-10;

/// A catalog pair `(G, H)` whose quotient is one of the sample spaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "pair", rename_all = "snake_case")]
pub enum GroupPair {
    /// `({±1}, {1})`
    SignTrivial,
    /// `(S_n, S_{n-1})`, `H` the stabilizer of the label 1.
    SymmetricStabilizer { n: usize },
    /// `(ℝ^× ⋉ ℝ, ℝ^×)`
    AffineLine,
    /// `(GL(n,ℝ) ⋉ ℝⁿ, GL(n,ℝ))`
    Affine { n: usize },
    /// `(ℝ_{>0}, {1})`
    PositiveTrivial,
    /// `(GL(n,ℝ), O(n))`
    GeneralLinearOrthogonal { n: usize },
    /// `(SO(2), {I₂})`
    CircleTrivial,
    /// `(SO(n), SO(n-1))`
    SphereRotation { n: usize },
    /// `(SO₀(1,n), SO(n))`
    LorentzRotation { n: usize },
    /// `(SL(2,ℝ), SO(2))`
    SpecialLinearRotation,
}

impl GroupPair {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Unsupported(format!("{what} is not a catalog pair")));
        match *self {
            GroupPair::SymmetricStabilizer { n } if n < 2 => bad(&format!("(S_{n}, S_{})", n as i64 - 1)),
            GroupPair::Affine { n } if n < 1 => bad("(GL(0) ⋉ ℝ⁰, GL(0))"),
            GroupPair::GeneralLinearOrthogonal { n } if n < 1 => bad("(GL(0), O(0))"),
            GroupPair::SphereRotation { n } if n < 2 => bad(&format!("(SO({n}), SO({}))", n as i64 - 1)),
            // SO₀(1,1) ≅ ℝ is abelian, so the semisimple argument for a trivial Ω₀ does not apply.
            GroupPair::LorentzRotation { n } if n < 2 => bad(&format!("(SO₀(1,{n}), SO({n}))")),
            _ => Ok(()),
        }
    }

    /// Parse a pair from the group names used by `list`, e.g. `("GL(3,R)", "O(3)")`.
    pub fn from_names(g: &str, h: &str) -> Result<Self> {
        let norm = |s: &str| -> String {
            s.chars()
                .filter(|c| !c.is_whitespace())
                .collect::<String>()
                .replace("ℝ", "R")
                .to_ascii_lowercase()
        };
        let (g, h) = (norm(g), norm(h));
        let arg = |s: &str, prefix: &str| -> Option<usize> {
            let rest = s.strip_prefix(prefix)?;
            let rest = rest.strip_suffix(')').unwrap_or(rest);
            let first = rest.split(',').next()?;
            first.parse().ok()
        };
        let pair = match (g.as_str(), h.as_str()) {
            ("{±1}" | "{+-1}" | "{-1,1}", "{1}") => GroupPair::SignTrivial,
            ("r>0" | "r_{>0}" | "r_>0", "{1}") => GroupPair::PositiveTrivial,
            ("r^x⋉r" | "r^×⋉r" | "aff(1)", "r^x" | "r^×") => GroupPair::AffineLine,
            ("so(2)", "{i2}" | "{1}" | "{i_2}") => GroupPair::CircleTrivial,
            ("sl(2,r)", "so(2)") => GroupPair::SpecialLinearRotation,
            _ => {
                if let (Some(n), Some(m)) = (arg(&g, "s_"), arg(&h, "s_")) {
                    if m + 1 == n {
                        return checked(GroupPair::SymmetricStabilizer { n });
                    }
                }
                if let (Some(n), Some(m)) = (arg(&g, "gl("), arg(&h, "o(")) {
                    if n == m {
                        return checked(GroupPair::GeneralLinearOrthogonal { n });
                    }
                }
                if let (Some(n), Some(m)) = (arg(&g, "so("), arg(&h, "so(")) {
                    if m + 1 == n {
                        return checked(GroupPair::SphereRotation { n });
                    }
                }
                let lorentz = arg(&g, "so_0(1,").or_else(|| arg(&g, "so0(1,"));
                if let (Some(n), Some(m)) = (lorentz, arg(&h, "so(")) {
                    if n == m {
                        return checked(GroupPair::LorentzRotation { n });
                    }
                }
                return Err(Error::Unsupported(format!("group pair ({g}, {h}) is not in the catalog")));
            }
        };
        checked(pair)
    }

    pub fn group_name(&self) -> String {
        match *self {
            GroupPair::SignTrivial => "{±1}".into(),
            GroupPair::SymmetricStabilizer { n } => format!("S_{n}"),
            GroupPair::AffineLine => "R^× ⋉ R".into(),
            GroupPair::Affine { n } => format!("GL({n},R) ⋉ R^{n}"),
            GroupPair::PositiveTrivial => "R>0".into(),
            GroupPair::GeneralLinearOrthogonal { n } => format!("GL({n},R)"),
            GroupPair::CircleTrivial => "SO(2)".into(),
            GroupPair::SphereRotation { n } => format!("SO({n})"),
            GroupPair::LorentzRotation { n } => format!("SO_0(1,{n})"),
            GroupPair::SpecialLinearRotation => "SL(2,R)".into(),
        }
    }

    pub fn subgroup_name(&self) -> String {
        match *self {
            GroupPair::SignTrivial | GroupPair::PositiveTrivial => "{1}".into(),
            GroupPair::SymmetricStabilizer { n } => format!("S_{}", n - 1),
            GroupPair::AffineLine => "R^×".into(),
            GroupPair::Affine { n } => format!("GL({n},R)"),
            GroupPair::GeneralLinearOrthogonal { n } => format!("O({n})"),
            GroupPair::CircleTrivial => "{I_2}".into(),
            GroupPair::SphereRotation { n } => format!("SO({})", n - 1),
            GroupPair::LorentzRotation { n } => format!("SO({n})"),
            GroupPair::SpecialLinearRotation => "SO(2)".into(),
        }
    }

    /// The sample space `G/H` in its canonical chart.
    pub fn space(&self) -> SpaceTag {
        match *self {
            GroupPair::SignTrivial => SpaceTag::SignSet,
            GroupPair::SymmetricStabilizer { n } => SpaceTag::Labels { n },
            GroupPair::AffineLine => SpaceTag::RealLine,
            GroupPair::Affine { n } => SpaceTag::Euclidean { n },
            GroupPair::PositiveTrivial => SpaceTag::PositiveReals,
            GroupPair::GeneralLinearOrthogonal { n } => SpaceTag::SpdCone { n },
            GroupPair::CircleTrivial => SpaceTag::Circle,
            GroupPair::SphereRotation { n } => SpaceTag::Sphere { n },
            GroupPair::LorentzRotation { n } => SpaceTag::Hyperboloid { n },
            GroupPair::SpecialLinearRotation => SpaceTag::UpperHalfPlane,
        }
    }

    pub fn identity(&self) -> GroupElement {
        match *self {
            GroupPair::SignTrivial => GroupElement::Sign(1),
            GroupPair::SymmetricStabilizer { n } => GroupElement::Permutation((0..n).collect()),
            GroupPair::AffineLine => GroupElement::affine_line(1.0, 0.0),
            GroupPair::Affine { n } => GroupElement::Affine {
                linear: DMatrix::identity(n, n),
                shift: DVector::zeros(n),
            },
            GroupPair::PositiveTrivial => GroupElement::Positive(1.0),
            GroupPair::GeneralLinearOrthogonal { n } => GroupElement::Linear(DMatrix::identity(n, n)),
            GroupPair::CircleTrivial => GroupElement::Angle(0.0),
            GroupPair::SphereRotation { n } => GroupElement::Rotation(DMatrix::identity(n, n)),
            GroupPair::LorentzRotation { n } => GroupElement::Lorentz(DMatrix::identity(n + 1, n + 1)),
            GroupPair::SpecialLinearRotation => GroupElement::SpecialLinear(DMatrix::identity(2, 2)),
        }
    }

    /// A generating set of the subgroup `H` (used for H-fixedness checks).
    pub fn subgroup_generators(&self) -> Vec<GroupElement> {
        match *self {
            GroupPair::SignTrivial | GroupPair::PositiveTrivial | GroupPair::CircleTrivial => {
                vec![self.identity()]
            }
            GroupPair::SymmetricStabilizer { n } => (1..n.saturating_sub(1))
                .map(|i| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.swap(i, i + 1);
                    GroupElement::Permutation(p)
                })
                .chain(std::iter::once(self.identity()))
                .collect(),
            GroupPair::AffineLine => vec![
                GroupElement::affine_line(2.0, 0.0),
                GroupElement::affine_line(-1.0, 0.0),
                GroupElement::affine_line(0.3, 0.0),
            ],
            GroupPair::Affine { n } => {
                let mut gens = Vec::new();
                for i in 0..n {
                    let mut d = DMatrix::identity(n, n);
                    d[(i, i)] = -2.5;
                    gens.push(d);
                    for j in 0..n {
                        if i != j {
                            let mut e = DMatrix::identity(n, n);
                            e[(i, j)] = 1.7;
                            gens.push(e);
                        }
                    }
                }
                gens.into_iter()
                    .map(|linear| GroupElement::Affine { linear, shift: DVector::zeros(n) })
                    .collect()
            }
            GroupPair::GeneralLinearOrthogonal { n } => {
                let mut gens = Vec::new();
                let mut refl = DMatrix::identity(n, n);
                refl[(0, 0)] = -1.0;
                gens.push(GroupElement::Linear(refl));
                for i in 0..n {
                    for j in (i + 1)..n {
                        gens.push(GroupElement::Linear(plane_rotation(n, i, j, 0.7)));
                    }
                }
                gens
            }
            GroupPair::SphereRotation { n } => {
                let mut gens = vec![self.identity()];
                for i in 1..n {
                    for j in (i + 1)..n {
                        gens.push(GroupElement::Rotation(plane_rotation(n, i, j, 1.1)));
                    }
                }
                gens
            }
            GroupPair::LorentzRotation { n } => {
                let mut gens = vec![self.identity()];
                for i in 1..=n {
                    for j in (i + 1)..=n {
                        gens.push(GroupElement::Lorentz(plane_rotation(n + 1, i, j, 0.9)));
                    }
                }
                gens
            }
            GroupPair::SpecialLinearRotation => vec![
                GroupElement::SpecialLinear(rot2(0.4)),
                GroupElement::SpecialLinear(rot2(2.0)),
            ],
        }
    }

    /// `Δ_G(g)`, with the convention `μ_L(E g) = Δ_G(g) μ_L(E)` for a left Haar measure.
    pub fn modular_function(&self, g: &GroupElement) -> Result<f64> {
        g.check_pair(self)?;
        Ok(match (self, g) {
            (GroupPair::AffineLine | GroupPair::Affine { .. }, GroupElement::Affine { linear, .. }) => {
                1.0 / linear.determinant().abs()
            }
            _ => 1.0,
        })
    }

    /// `Δ_H(h)` for `h ∈ H`. Every catalog subgroup is unimodular.
    pub fn subgroup_modular_function(&self, h: &GroupElement) -> Result<f64> {
        h.check_pair(self)?;
        Ok(1.0)
    }

    /// Whether `g` lies in `H` (to [`GROUP_TOL`]).
    pub fn contains_in_subgroup(&self, g: &GroupElement) -> bool {
        if g.check_pair(self).is_err() {
            return false;
        }
        match (self, g) {
            (GroupPair::SignTrivial, GroupElement::Sign(s)) => *s == 1,
            (GroupPair::SymmetricStabilizer { .. }, GroupElement::Permutation(p)) => p[0] == 0,
            (GroupPair::AffineLine | GroupPair::Affine { .. }, GroupElement::Affine { shift, .. }) => {
                shift.amax() <= GROUP_TOL
            }
            (GroupPair::PositiveTrivial, GroupElement::Positive(x)) => (x - 1.0).abs() <= GROUP_TOL,
            (GroupPair::GeneralLinearOrthogonal { n }, GroupElement::Linear(m)) => {
                (m.transpose() * m - DMatrix::identity(*n, *n)).amax() <= GROUP_TOL
            }
            (GroupPair::CircleTrivial, GroupElement::Angle(a)) => {
                let r = a.rem_euclid(TAU);
                r <= GROUP_TOL || TAU - r <= GROUP_TOL
            }
            (GroupPair::SphereRotation { .. }, GroupElement::Rotation(m)) => {
                (m[(0, 0)] - 1.0).abs() <= GROUP_TOL
            }
            (GroupPair::LorentzRotation { .. }, GroupElement::Lorentz(m)) => {
                (m[(0, 0)] - 1.0).abs() <= GROUP_TOL
            }
            (GroupPair::SpecialLinearRotation, GroupElement::SpecialLinear(m)) => {
                (m.transpose() * m - DMatrix::identity(2, 2)).amax() <= GROUP_TOL
            }
            _ => false,
        }
    }
}

fn checked(p: GroupPair) -> Result<GroupPair> {
    p.validate().map(|_| p)
}

pub(crate) fn plane_rotation(n: usize, i: usize, j: usize, angle: f64) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n, n);
    let (s, c) = angle.sin_cos();
    m[(i, i)] = c;
    m[(j, j)] = c;
    m[(i, j)] = -s;
    m[(j, i)] = s;
    m
}

/// An element of one of the catalog groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "group", content = "payload", rename_all = "snake_case")]
pub enum GroupElement {
    /// `±1 ∈ {±1}`
    Sign(i8),
    /// `σ ∈ S_n` as the zero-based image list `i ↦ σ[i]`.
    Permutation(Vec<usize>),
    /// `(A, b) ∈ GL(n,ℝ) ⋉ ℝⁿ`, acting by `x ↦ Ax + b`; `n = 1` is `ℝ^× ⋉ ℝ`.
    Affine { linear: DMatrix<f64>, shift: DVector<f64> },
    /// `x ∈ ℝ_{>0}`
    Positive(f64),
    /// `g ∈ GL(n,ℝ)`
    Linear(DMatrix<f64>),
    /// Rotation angle of `SO(2)`.
    Angle(f64),
    /// `g ∈ SO(n)`
    Rotation(DMatrix<f64>),
    /// `g ∈ SO₀(1,n)`, acting on `ℝ^{n+1}` with coordinates `(x0, ..., xn)`.
    Lorentz(DMatrix<f64>),
    /// `g ∈ SL(2,ℝ)`
    SpecialLinear(DMatrix<f64>),
}

impl GroupElement {
    pub fn affine_line(a: f64, b: f64) -> Self {
        GroupElement::Affine {
            linear: DMatrix::from_element(1, 1, a),
            shift: DVector::from_element(1, b),
        }
    }

    /// Whether this element belongs to the group `G` of `pair`.
    pub fn check_pair(&self, pair: &GroupPair) -> Result<()> {
        let ok = match (pair, self) {
            (GroupPair::SignTrivial, GroupElement::Sign(_)) => true,
            (GroupPair::SymmetricStabilizer { n }, GroupElement::Permutation(p)) => p.len() == *n,
            (GroupPair::AffineLine, GroupElement::Affine { linear, .. }) => linear.nrows() == 1,
            (GroupPair::Affine { n }, GroupElement::Affine { linear, .. }) => linear.nrows() == *n,
            (GroupPair::PositiveTrivial, GroupElement::Positive(_)) => true,
            (GroupPair::GeneralLinearOrthogonal { n }, GroupElement::Linear(m)) => m.nrows() == *n,
            (GroupPair::CircleTrivial, GroupElement::Angle(_)) => true,
            (GroupPair::SphereRotation { n }, GroupElement::Rotation(m)) => m.nrows() == *n,
            (GroupPair::LorentzRotation { n }, GroupElement::Lorentz(m)) => m.nrows() == n + 1,
            (GroupPair::SpecialLinearRotation, GroupElement::SpecialLinear(_)) => true,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "group element {} does not belong to {}",
                self.kind_name(),
                pair.group_name()
            )))
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GroupElement::Sign(_) => "sign",
            GroupElement::Permutation(_) => "permutation",
            GroupElement::Affine { .. } => "affine",
            GroupElement::Positive(_) => "positive",
            GroupElement::Linear(_) => "linear",
            GroupElement::Angle(_) => "angle",
            GroupElement::Rotation(_) => "rotation",
            GroupElement::Lorentz(_) => "lorentz",
            GroupElement::SpecialLinear(_) => "special_linear",
        }
    }

    /// Check the payload invariants: invertibility, orthogonality, form preservation.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::domain(msg));
        match self {
            GroupElement::Sign(s) if *s != 1 && *s != -1 => fail(format!("sign must be ±1, got {s}")),
            GroupElement::Permutation(p) => {
                let mut seen = vec![false; p.len()];
                for &i in p {
                    if i >= p.len() || seen[i] {
                        return fail(format!("{p:?} is not a permutation"));
                    }
                    seen[i] = true;
                }
                Ok(())
            }
            GroupElement::Affine { linear, shift } => {
                if !linear.is_square() || shift.len() != linear.nrows() {
                    return fail("affine payload has inconsistent shape".into());
                }
                check_invertible(linear)
            }
            GroupElement::Positive(x) if !(*x > 0.0 && x.is_finite()) => {
                fail(format!("positive scalar required, got {x}"))
            }
            GroupElement::Linear(m) => {
                if !m.is_square() {
                    return fail("GL(n) payload must be square".into());
                }
                check_invertible(m)
            }
            GroupElement::Angle(a) if !a.is_finite() => fail("rotation angle must be finite".into()),
            GroupElement::Rotation(m) => {
                let n = m.nrows();
                if !m.is_square() || (m.transpose() * m - DMatrix::identity(n, n)).amax() > GROUP_TOL {
                    return fail("SO(n) payload is not orthogonal".into());
                }
                if m.determinant() <= 0.0 {
                    return fail("SO(n) payload has negative determinant".into());
                }
                Ok(())
            }
            GroupElement::Lorentz(m) => {
                let k = m.nrows();
                if !m.is_square() || k < 2 {
                    return fail("SO₀(1,n) payload must be square with n >= 1".into());
                }
                let mut j = DMatrix::identity(k, k);
                j[(0, 0)] = -1.0;
                let scale = m.amax().powi(2).max(1.0);
                if (m.transpose() * &j * m - &j).amax() > GROUP_TOL * scale {
                    return fail("SO₀(1,n) payload does not preserve the (1,n) form".into());
                }
                if m[(0, 0)] <= 0.0 || m.determinant() <= 0.0 {
                    return fail("SO₀(1,n) payload is not in the identity component".into());
                }
                Ok(())
            }
            GroupElement::SpecialLinear(m) => {
                if m.shape() != (2, 2) || (m.determinant() - 1.0).abs() > GROUP_TOL * m.amax().powi(2).max(1.0) {
                    return fail("SL(2) payload must be 2×2 with determinant 1".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Group product `self · other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        let mismatch = || Error::domain(format!("cannot compose {} with {}", self.kind_name(), other.kind_name()));
        let same_shape = |a: &DMatrix<f64>, b: &DMatrix<f64>| -> Result<()> {
            if a.shape() == b.shape() {
                Ok(())
            } else {
                Err(Error::dims(a.nrows(), b.nrows()))
            }
        };
        Ok(match (self, other) {
            (Sign(a), Sign(b)) => Sign(a * b),
            (Permutation(s), Permutation(t)) => {
                if s.len() != t.len() {
                    return Err(Error::dims(s.len(), t.len()));
                }
                Permutation(t.iter().map(|&i| s[i]).collect())
            }
            (Affine { linear: a, shift: b }, Affine { linear: a2, shift: b2 }) => {
                same_shape(a, a2)?;
                Affine { linear: a * a2, shift: a * b2 + b }
            }
            (Positive(a), Positive(b)) => Positive(a * b),
            (Linear(a), Linear(b)) => {
                same_shape(a, b)?;
                Linear(a * b)
            }
            (Angle(a), Angle(b)) => Angle((a + b).rem_euclid(TAU)),
            (Rotation(a), Rotation(b)) => {
                same_shape(a, b)?;
                Rotation(a * b)
            }
            (Lorentz(a), Lorentz(b)) => {
                same_shape(a, b)?;
                Lorentz(a * b)
            }
            (SpecialLinear(a), SpecialLinear(b)) => SpecialLinear(a * b),
            _ => return Err(mismatch()),
        })
    }

    pub fn inverse(&self) -> Result<GroupElement> {
        use GroupElement::*;
        let inv = |m: &DMatrix<f64>| {
            m.clone()
                .try_inverse()
                .ok_or_else(|| Error::domain("group element is not invertible"))
        };
        Ok(match self {
            Sign(s) => Sign(*s),
            Permutation(p) => {
                let mut q = vec![0; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    q[j] = i;
                }
                Permutation(q)
            }
            Affine { linear, shift } => {
                let ai = inv(linear)?;
                let b = -(&ai * shift);
                Affine { linear: ai, shift: b }
            }
            Positive(x) => Positive(1.0 / x),
            Linear(m) => Linear(inv(m)?),
            Angle(a) => Angle((-a).rem_euclid(TAU)),
            Rotation(m) => Rotation(m.transpose()),
            Lorentz(m) => {
                // g⁻¹ = J gᵀ J
                let k = m.nrows();
                let mut j = DMatrix::identity(k, k);
                j[(0, 0)] = -1.0;
                Lorentz(&j * m.transpose() * &j)
            }
            SpecialLinear(m) => SpecialLinear(DMatrix::from_row_slice(
                2,
                2,
                &[m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]],
            )),
        })
    }

    /// Matrix of the element in its defining representation, where one exists.
    pub fn matrix(&self) -> Option<DMatrix<f64>> {
        match self {
            GroupElement::Affine { linear, shift } => Some(affine_matrix(linear, shift)),
            GroupElement::Linear(m)
            | GroupElement::Rotation(m)
            | GroupElement::Lorentz(m)
            | GroupElement::SpecialLinear(m) => Some(m.clone()),
            GroupElement::Angle(a) => Some(rot2(*a)),
            _ => None,
        }
    }
}

fn check_invertible(m: &DMatrix<f64>) -> Result<()> {
    let det = m.determinant();
    let scale = m.amax().powi(m.nrows() as i32).max(f64::MIN_POSITIVE);
    if !det.is_finite() || det.abs() <= 1e-12 * scale {
        return Err(Error::domain(format!("matrix is singular (det = {det:e})")));
    }
    Ok(())
}

/// `⟨x, x⟩` in the (1,n) form; exposed for tests and the hyperboloid chart.
pub fn minkowski_norm_sq(x: &[f64]) -> f64 {
    lorentz_inner(x, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let g = GroupElement::affine_line(2.0, 3.0);
        let h = GroupElement::affine_line(-0.5, 1.0);
        let gh = g.compose(&h).unwrap();
        // (2,3)(-0.5,1) = (-1, 2·1 + 3)
        assert_eq!(gh, GroupElement::affine_line(-1.0, 5.0));
        let id = g.compose(&g.inverse().unwrap()).unwrap();
        assert_eq!(id, GroupPair::AffineLine.identity());

        let s = GroupElement::Permutation(vec![1, 2, 0]);
        let t = GroupElement::Permutation(vec![0, 2, 1]);
        assert_eq!(s.compose(&t).unwrap(), GroupElement::Permutation(vec![1, 0, 2]));
        assert_eq!(
            s.compose(&s.inverse().unwrap()).unwrap(),
            GroupElement::Permutation(vec![0, 1, 2])
        );
        assert!(s.compose(&GroupElement::Sign(1)).is_err());
    }

    #[test]
    fn validation() {
        assert!(GroupElement::Sign(2).validate().is_err());
        assert!(GroupElement::Permutation(vec![0, 0]).validate().is_err());
        assert!(GroupElement::affine_line(0.0, 1.0).validate().is_err());
        assert!(GroupElement::Positive(-1.0).validate().is_err());
        let mut reflection = DMatrix::identity(3, 3);
        reflection[(0, 0)] = -1.0;
        assert!(GroupElement::Rotation(reflection.clone()).validate().is_err());
        assert!(GroupElement::Lorentz(reflection).validate().is_err());
        let b = crate::linalg::boost(2, 0.8);
        assert!(GroupElement::Lorentz(b).validate().is_ok());
        let sl = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        assert!(GroupElement::SpecialLinear(sl).validate().is_ok());
    }

    #[test]
    fn pair_names_roundtrip() {
        let pairs = [
            GroupPair::SignTrivial,
            GroupPair::SymmetricStabilizer { n: 4 },
            GroupPair::AffineLine,
            GroupPair::PositiveTrivial,
            GroupPair::GeneralLinearOrthogonal { n: 3 },
            GroupPair::CircleTrivial,
            GroupPair::SphereRotation { n: 3 },
            GroupPair::LorentzRotation { n: 2 },
            GroupPair::SpecialLinearRotation,
        ];
        for p in pairs {
            assert_eq!(GroupPair::from_names(&p.group_name(), &p.subgroup_name()).unwrap(), p);
        }
        assert!(matches!(GroupPair::from_names("GL(3,R)", "SO(3)"), Err(Error::Unsupported(_))));
        assert!(matches!(GroupPair::from_names("SO_0(1,1)", "SO(1)"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn multiplier_condition_on_subgroup() {
        // f(h) = Δ_H(h)/Δ_G(h) for the Lebesgue multiplier |det A| of the affine groups.
        for pair in [GroupPair::AffineLine, GroupPair::Affine { n: 2 }] {
            for h in pair.subgroup_generators() {
                let GroupElement::Affine { linear, .. } = &h else { unreachable!() };
                let f = linear.determinant().abs();
                let ratio = pair.subgroup_modular_function(&h).unwrap() / pair.modular_function(&h).unwrap();
                assert!((f - ratio).abs() < 1e-12);
            }
        }
    }
}
