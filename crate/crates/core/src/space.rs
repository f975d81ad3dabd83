//! Sample spaces `X = G/H` in their canonical charts, the coset action and
//! canonical coset representatives.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupPair};
use crate::linalg::{is_symmetric, lorentz_inner, lorentz_to, pack_sym, rotation_to, sym_len, unpack_sym};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Chart tolerance for continuous spaces.
pub const CHART_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum SpaceTag {
    /// `{±1}`
    SignSet,
    /// `{1, ..., n}`
    Labels { n: usize },
    RealLine,
    /// `ℝⁿ`
    Euclidean { n: usize },
    PositiveReals,
    /// `Sym⁺(n, ℝ)`
    SpdCone { n: usize },
    /// `S¹` as an angle in `[0, 2π)`.
    Circle,
    /// `S^{n-1} ⊂ ℝⁿ`
    Sphere { n: usize },
    /// `Hⁿ ⊂ ℝ^{n+1}`
    Hyperboloid { n: usize },
    /// `ℋ = {x + iy : y > 0}`
    UpperHalfPlane,
}

impl SpaceTag {
    pub fn name(&self) -> String {
        match *self {
            SpaceTag::SignSet => "{±1}".into(),
            SpaceTag::Labels { n } => format!("{{1,...,{n}}}"),
            SpaceTag::RealLine => "R".into(),
            SpaceTag::Euclidean { n } => format!("R^{n}"),
            SpaceTag::PositiveReals => "R>0".into(),
            SpaceTag::SpdCone { n } => format!("Sym+({n},R)"),
            SpaceTag::Circle => "S^1".into(),
            SpaceTag::Sphere { n } => format!("S^{}", n - 1),
            SpaceTag::Hyperboloid { n } => format!("H^{n}"),
            SpaceTag::UpperHalfPlane => "upper half plane".into(),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, SpaceTag::SignSet | SpaceTag::Labels { .. })
    }

    /// Number of flattened chart coordinates.
    pub fn chart_len(&self) -> usize {
        match *self {
            SpaceTag::SignSet | SpaceTag::Labels { .. } | SpaceTag::RealLine => 1,
            SpaceTag::PositiveReals | SpaceTag::Circle => 1,
            SpaceTag::Euclidean { n } | SpaceTag::Sphere { n } => n,
            SpaceTag::SpdCone { n } => sym_len(n),
            SpaceTag::Hyperboloid { n } => n + 1,
            SpaceTag::UpperHalfPlane => 2,
        }
    }

    /// CSV column names, in flattening order.
    pub fn column_names(&self) -> Vec<String> {
        match *self {
            SpaceTag::SignSet => vec!["sign".into()],
            SpaceTag::Labels { .. } => vec!["label".into()],
            SpaceTag::RealLine | SpaceTag::PositiveReals => vec!["x".into()],
            SpaceTag::Circle => vec!["angle".into()],
            SpaceTag::Euclidean { n } | SpaceTag::Sphere { n } => (1..=n).map(|i| format!("x{i}")).collect(),
            SpaceTag::SpdCone { n } => {
                let mut out = Vec::new();
                for i in 1..=n {
                    for j in i..=n {
                        out.push(format!("s{i}{j}"));
                    }
                }
                out
            }
            SpaceTag::Hyperboloid { n } => (0..=n).map(|i| format!("x{i}")).collect(),
            SpaceTag::UpperHalfPlane => vec!["x".into(), "y".into()],
        }
    }

    /// The base point `o = eH`.
    pub fn origin(&self) -> Point {
        match *self {
            SpaceTag::SignSet => Point::Sign(1),
            SpaceTag::Labels { .. } => Point::Label(1),
            SpaceTag::RealLine => Point::Real(0.0),
            SpaceTag::Euclidean { n } => Point::Vector(DVector::zeros(n)),
            SpaceTag::PositiveReals => Point::Positive(1.0),
            SpaceTag::SpdCone { n } => Point::Spd(DMatrix::identity(n, n)),
            SpaceTag::Circle => Point::Angle(0.0),
            SpaceTag::Sphere { n } => Point::Sphere(unit(n, 0)),
            SpaceTag::Hyperboloid { n } => Point::Hyperboloid(unit(n + 1, 0)),
            SpaceTag::UpperHalfPlane => Point::HalfPlane { x: 0.0, y: 1.0 },
        }
    }
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// A point of a catalog sample space in its canonical chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", content = "coords", rename_all = "snake_case")]
pub enum Point {
    Sign(i8),
    /// One-based label.
    Label(usize),
    Real(f64),
    Vector(DVector<f64>),
    Positive(f64),
    Angle(f64),
    Sphere(DVector<f64>),
    Spd(DMatrix<f64>),
    Hyperboloid(DVector<f64>),
    HalfPlane { x: f64, y: f64 },
}

impl Point {
    /// Check the chart constraints for `space`.
    pub fn validate(&self, space: &SpaceTag) -> Result<()> {
        let fail = |msg: String| Err(Error::domain(msg));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match (space, self) {
            (SpaceTag::SignSet, Point::Sign(s)) => {
                if *s == 1 || *s == -1 {
                    Ok(())
                } else {
                    fail(format!("{s} is not in {{±1}}"))
                }
            }
            (SpaceTag::Labels { n }, Point::Label(k)) => {
                if (1..=*n).contains(k) {
                    Ok(())
                } else {
                    fail(format!("label {k} is not in 1..={n}"))
                }
            }
            (SpaceTag::RealLine, Point::Real(x)) => {
                if x.is_finite() {
                    Ok(())
                } else {
                    fail("point must be finite".into())
                }
            }
            (SpaceTag::Euclidean { n }, Point::Vector(v)) => {
                if v.len() != *n {
                    Err(Error::dims(*n, v.len()))
                } else if finite(v.as_slice()) {
                    Ok(())
                } else {
                    fail("point must be finite".into())
                }
            }
            (SpaceTag::PositiveReals, Point::Positive(x)) => {
                if *x > 0.0 && x.is_finite() {
                    Ok(())
                } else {
                    fail(format!("{x} is not a positive real"))
                }
            }
            (SpaceTag::Circle, Point::Angle(t)) => {
                if (0.0..TAU).contains(t) {
                    Ok(())
                } else {
                    fail(format!("angle {t} is not in [0, 2π)"))
                }
            }
            (SpaceTag::Sphere { n }, Point::Sphere(v)) => {
                if v.len() != *n {
                    Err(Error::dims(*n, v.len()))
                } else if (v.norm() - 1.0).abs() > CHART_TOL || !finite(v.as_slice()) {
                    fail(format!("point is not on the unit sphere (norm {})", v.norm()))
                } else {
                    Ok(())
                }
            }
            (SpaceTag::SpdCone { n }, Point::Spd(m)) => {
                if m.shape() != (*n, *n) {
                    return Err(Error::dims(*n, m.nrows()));
                }
                if !finite(m.as_slice()) || !is_symmetric(m, CHART_TOL) {
                    return fail("matrix is not symmetric".into());
                }
                if m.clone().cholesky().is_none() {
                    return fail("matrix is not positive definite".into());
                }
                Ok(())
            }
            (SpaceTag::Hyperboloid { n }, Point::Hyperboloid(v)) => {
                if v.len() != n + 1 {
                    return Err(Error::dims(n + 1, v.len()));
                }
                let q = lorentz_inner(v.as_slice(), v.as_slice());
                // Cancellation in <x,x> grows with x0², so the constraint is checked relative to it.
                if !finite(v.as_slice()) || v[0] <= 0.0 || (q + 1.0).abs() > CHART_TOL * v[0] * v[0] {
                    fail(format!("point is not on the upper sheet of the hyperboloid (<x,x> = {q})"))
                } else {
                    Ok(())
                }
            }
            (SpaceTag::UpperHalfPlane, Point::HalfPlane { x, y }) => {
                if x.is_finite() && *y > 0.0 && y.is_finite() {
                    Ok(())
                } else {
                    fail(format!("({x}, {y}) is not in the upper half plane"))
                }
            }
            _ => fail(format!("point does not belong to {}", space.name())),
        }
    }

    /// Flattened chart coordinates (see [`SpaceTag::column_names`]).
    pub fn coords(&self) -> Vec<f64> {
        match self {
            Point::Sign(s) => vec![*s as f64],
            Point::Label(k) => vec![*k as f64],
            Point::Real(x) | Point::Positive(x) | Point::Angle(x) => vec![*x],
            Point::Vector(v) | Point::Sphere(v) | Point::Hyperboloid(v) => v.as_slice().to_vec(),
            Point::Spd(m) => pack_sym(m),
            Point::HalfPlane { x, y } => vec![*x, *y],
        }
    }

    /// Inverse of [`Point::coords`]; validates the result.
    pub fn from_coords(space: &SpaceTag, c: &[f64]) -> Result<Point> {
        if c.len() != space.chart_len() {
            return Err(Error::dims(space.chart_len(), c.len()));
        }
        let integral = |x: f64| -> Result<i64> {
            if x.fract() == 0.0 && x.is_finite() {
                Ok(x as i64)
            } else {
                Err(Error::domain(format!("{x} is not an integer")))
            }
        };
        let p = match *space {
            SpaceTag::SignSet => Point::Sign(integral(c[0])?.clamp(-2, 2) as i8),
            SpaceTag::Labels { .. } => Point::Label(integral(c[0])?.max(0) as usize),
            SpaceTag::RealLine => Point::Real(c[0]),
            SpaceTag::Euclidean { .. } => Point::Vector(DVector::from_column_slice(c)),
            SpaceTag::PositiveReals => Point::Positive(c[0]),
            SpaceTag::Circle => Point::Angle(c[0]),
            SpaceTag::Sphere { .. } => Point::Sphere(DVector::from_column_slice(c)),
            SpaceTag::SpdCone { n } => Point::Spd(unpack_sym(c, n)),
            SpaceTag::Hyperboloid { .. } => Point::Hyperboloid(DVector::from_column_slice(c)),
            SpaceTag::UpperHalfPlane => Point::HalfPlane { x: c[0], y: c[1] },
        };
        p.validate(space)?;
        Ok(p)
    }
}

/// `g · x` in canonical-chart coordinates.
pub fn act(pair: &GroupPair, g: &GroupElement, x: &Point) -> Result<Point> {
    g.check_pair(pair)?;
    let space = pair.space();
    x.validate(&space)?;
    let y = match (g, x) {
        (GroupElement::Sign(s), Point::Sign(t)) => Point::Sign(s * t),
        (GroupElement::Permutation(p), Point::Label(k)) => Point::Label(p[k - 1] + 1),
        (GroupElement::Affine { linear, shift }, Point::Real(t)) => Point::Real(linear[(0, 0)] * t + shift[0]),
        (GroupElement::Affine { linear, shift }, Point::Vector(v)) => Point::Vector(linear * v + shift),
        (GroupElement::Positive(a), Point::Positive(t)) => Point::Positive(a * t),
        (GroupElement::Linear(m), Point::Spd(s)) => {
            let y = m * s * m.transpose();
            Point::Spd((&y + y.transpose()) * 0.5)
        }
        (GroupElement::Angle(a), Point::Angle(t)) => Point::Angle(wrap_angle(a + t)),
        (GroupElement::Rotation(m), Point::Sphere(v)) => {
            let y = m * v;
            let norm = y.norm();
            Point::Sphere(y / norm)
        }
        (GroupElement::Lorentz(m), Point::Hyperboloid(v)) => {
            let mut y = m * v;
            let spatial = y.rows(1, y.len() - 1).norm_squared();
            y[0] = (1.0 + spatial).sqrt();
            Point::Hyperboloid(y)
        }
        (GroupElement::SpecialLinear(m), Point::HalfPlane { x, y }) => {
            let (a, b, c, d) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
            // (az + b)/(cz + d) with z = x + iy
            let den = (c * x + d).powi(2) + (c * y).powi(2);
            let re = ((a * x + b) * (c * x + d) + a * c * y * y) / den;
            let im = y * (a * d - b * c) / den;
            Point::HalfPlane { x: re, y: im }
        }
        _ => unreachable!("check_pair and validate guarantee matching variants"),
    };
    y.validate(&space)
        .map_err(|e| Error::Internal(format!("chart constraint violated after action: {e}")))?;
    Ok(y)
}

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// A deterministic coset representative `g` with `g · o = x`.
pub fn canonical_representative(pair: &GroupPair, x: &Point) -> Result<GroupElement> {
    x.validate(&pair.space())?;
    Ok(match (pair, x) {
        (GroupPair::SignTrivial, Point::Sign(s)) => GroupElement::Sign(*s),
        (GroupPair::SymmetricStabilizer { n }, Point::Label(k)) => {
            let mut p: Vec<usize> = (0..*n).collect();
            p.swap(0, k - 1);
            GroupElement::Permutation(p)
        }
        (GroupPair::AffineLine, Point::Real(t)) => GroupElement::affine_line(1.0, *t),
        (GroupPair::Affine { n }, Point::Vector(v)) => GroupElement::Affine {
            linear: DMatrix::identity(*n, *n),
            shift: v.clone(),
        },
        (GroupPair::PositiveTrivial, Point::Positive(t)) => GroupElement::Positive(*t),
        (GroupPair::GeneralLinearOrthogonal { .. }, Point::Spd(s)) => {
            let chol = s.clone().cholesky().ok_or_else(|| Error::domain("matrix is not positive definite"))?;
            GroupElement::Linear(chol.l())
        }
        (GroupPair::CircleTrivial, Point::Angle(t)) => GroupElement::Angle(*t),
        (GroupPair::SphereRotation { .. }, Point::Sphere(v)) => GroupElement::Rotation(rotation_to(v)),
        (GroupPair::LorentzRotation { .. }, Point::Hyperboloid(v)) => GroupElement::Lorentz(lorentz_to(v)),
        (GroupPair::SpecialLinearRotation, Point::HalfPlane { x, y }) => {
            let r = y.sqrt();
            GroupElement::SpecialLinear(DMatrix::from_row_slice(2, 2, &[r, x / r, 0.0, 1.0 / r]))
        }
        _ => unreachable!("validate guarantees a matching variant"),
    })
}

/// Distance between two points in chart coordinates (angles compared on the circle).
pub fn chart_distance(a: &Point, b: &Point) -> f64 {
    match (a, b) {
        (Point::Angle(s), Point::Angle(t)) => {
            let d = (s - t).rem_euclid(TAU);
            d.min(TAU - d)
        }
        _ => a
            .coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::boost;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn action_examples() {
        let pair = GroupPair::CircleTrivial;
        let y = act(&pair, &GroupElement::Angle(FRAC_PI_2), &Point::Angle(0.0)).unwrap();
        assert_eq!(y, Point::Angle(FRAC_PI_2));

        let y = act(&GroupPair::AffineLine, &GroupElement::affine_line(2.0, 3.0), &Point::Real(1.0)).unwrap();
        assert_eq!(y, Point::Real(5.0));

        let pair = GroupPair::SphereRotation { n: 3 };
        let x = Point::Sphere(DVector::from_vec(vec![0.0, 0.6, 0.8]));
        assert_eq!(act(&pair, &pair.identity(), &x).unwrap(), x);
    }

    #[test]
    fn mismatched_tags_are_domain_errors() {
        let err = act(&GroupPair::CircleTrivial, &GroupElement::Sign(1), &Point::Angle(0.0));
        assert!(matches!(err, Err(Error::Domain(_))));
        let err = act(&GroupPair::CircleTrivial, &GroupElement::Angle(1.0), &Point::Real(0.0));
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn mobius_and_representative() {
        let pair = GroupPair::SpecialLinearRotation;
        let z = Point::HalfPlane { x: 0.7, y: 2.5 };
        let g = canonical_representative(&pair, &z).unwrap();
        let back = act(&pair, &g, &SpaceTag::UpperHalfPlane.origin()).unwrap();
        assert!(chart_distance(&back, &z) < 1e-14);

        let pair = GroupPair::LorentzRotation { n: 3 };
        let g = GroupElement::Lorentz(boost(3, 1.3));
        let x = act(&pair, &g, &SpaceTag::Hyperboloid { n: 3 }.origin()).unwrap();
        let rep = canonical_representative(&pair, &x).unwrap();
        let y = act(&pair, &rep, &SpaceTag::Hyperboloid { n: 3 }.origin()).unwrap();
        assert!(chart_distance(&x, &y) < 1e-13);
    }

    #[test]
    fn coords_roundtrip() {
        let s = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let p = Point::Spd(s);
        let space = SpaceTag::SpdCone { n: 2 };
        assert_eq!(p.coords(), vec![2.0, 0.5, 1.0]);
        assert_eq!(Point::from_coords(&space, &p.coords()).unwrap(), p);
        assert_eq!(space.column_names(), vec!["s11", "s12", "s22"]);
        assert!(Point::from_coords(&SpaceTag::Labels { n: 3 }, &[4.0]).is_err());
        assert!(Point::from_coords(&SpaceTag::SignSet, &[0.5]).is_err());
        assert!(Point::from_coords(&SpaceTag::Circle, &[7.0]).is_err());
    }
}
