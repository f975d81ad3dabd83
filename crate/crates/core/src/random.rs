//! Random group elements and points, used by property tests and the
//! invariance suite.

use crate::group::{plane_rotation, GroupElement, GroupPair};
use crate::linalg::{block_diag_one, boost, lorentz_to, rot2};
use crate::space::{Point, SpaceTag};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| normal(rng))
}

/// Haar-distributed element of `O(n)`.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let qr = gaussian_matrix(rng, n).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut q = random_orthogonal(rng, n);
    if q.determinant() < 0.0 && n > 0 {
        for i in 0..n {
            q[(i, 0)] = -q[(i, 0)];
        }
    }
    q
}

/// A well-conditioned element of `GL(n)`: `Q₁ diag(±e^{sᵢ}) Q₂` with `|sᵢ| ≤ 1`.
pub fn random_general_linear<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| {
        let s: f64 = rng.random_range(-1.0..1.0);
        s.exp()
    });
    q1 * DMatrix::from_diagonal(&d) * q2
}

pub fn random_sphere_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| normal(rng));
        let norm = v.norm();
        if norm > 1e-8 {
            return v / norm;
        }
    }
}

/// A point of `Hⁿ` with spatial part of standard-normal size times `scale`.
pub fn random_hyperboloid_point<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> DVector<f64> {
    let mut v = DVector::zeros(n + 1);
    for i in 1..=n {
        v[i] = scale * normal(rng);
    }
    v[0] = (1.0 + v.rows(1, n).norm_squared()).sqrt();
    v
}

/// A random element of `G` of moderate size.
pub fn random_group_element<R: Rng + ?Sized>(rng: &mut R, pair: &GroupPair) -> GroupElement {
    match *pair {
        GroupPair::SignTrivial => GroupElement::Sign(if rng.random_bool(0.5) { 1 } else { -1 }),
        GroupPair::SymmetricStabilizer { n } => {
            let mut p: Vec<usize> = (0..n).collect();
            p.shuffle(rng);
            GroupElement::Permutation(p)
        }
        GroupPair::AffineLine => {
            let s: f64 = rng.random_range(-1.0..1.0);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            GroupElement::affine_line(sign * s.exp(), 2.0 * normal(rng))
        }
        GroupPair::Affine { n } => GroupElement::Affine {
            linear: random_general_linear(rng, n),
            shift: DVector::from_fn(n, |_, _| 2.0 * normal(rng)),
        },
        GroupPair::PositiveTrivial => GroupElement::Positive(normal(rng).exp()),
        GroupPair::GeneralLinearOrthogonal { n } => GroupElement::Linear(random_general_linear(rng, n)),
        GroupPair::CircleTrivial => GroupElement::Angle(rng.random_range(0.0..TAU)),
        GroupPair::SphereRotation { n } => GroupElement::Rotation(random_rotation(rng, n)),
        GroupPair::LorentzRotation { n } => {
            let x = random_hyperboloid_point(rng, n, 0.8);
            let k = block_diag_one(&random_rotation(rng, n));
            GroupElement::Lorentz(lorentz_to(&x) * k)
        }
        GroupPair::SpecialLinearRotation => {
            let t: f64 = rng.random_range(-1.0..1.0);
            let d = DMatrix::from_row_slice(2, 2, &[t.exp(), 0.0, 0.0, (-t).exp()]);
            let u = DMatrix::from_row_slice(2, 2, &[1.0, normal(rng), 0.0, 1.0]);
            GroupElement::SpecialLinear(rot2(rng.random_range(0.0..TAU)) * d * u)
        }
    }
}

/// A random element of the subgroup `H`.
pub fn random_subgroup_element<R: Rng + ?Sized>(rng: &mut R, pair: &GroupPair) -> GroupElement {
    match *pair {
        GroupPair::SignTrivial | GroupPair::PositiveTrivial | GroupPair::CircleTrivial => pair.identity(),
        GroupPair::SymmetricStabilizer { n } => {
            let mut rest: Vec<usize> = (1..n).collect();
            rest.shuffle(rng);
            let mut p = vec![0];
            p.extend(rest);
            GroupElement::Permutation(p)
        }
        GroupPair::AffineLine | GroupPair::Affine { .. } => {
            let GroupElement::Affine { linear, shift } = random_group_element(rng, pair) else {
                unreachable!()
            };
            GroupElement::Affine { linear, shift: shift * 0.0 }
        }
        GroupPair::GeneralLinearOrthogonal { n } => GroupElement::Linear(random_orthogonal(rng, n)),
        GroupPair::SphereRotation { n } => {
            let mut m = DMatrix::identity(n, n);
            if n > 1 {
                m.view_mut((1, 1), (n - 1, n - 1)).copy_from(&random_rotation(rng, n - 1));
            }
            GroupElement::Rotation(m)
        }
        GroupPair::LorentzRotation { n } => GroupElement::Lorentz(block_diag_one(&random_rotation(rng, n))),
        GroupPair::SpecialLinearRotation => GroupElement::SpecialLinear(rot2(rng.random_range(0.0..TAU))),
    }
}

/// A random point of moderate size in the canonical chart.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, space: &SpaceTag) -> Point {
    match *space {
        SpaceTag::SignSet => Point::Sign(if rng.random_bool(0.5) { 1 } else { -1 }),
        SpaceTag::Labels { n } => Point::Label(rng.random_range(1..=n)),
        SpaceTag::RealLine => Point::Real(2.0 * normal(rng)),
        SpaceTag::Euclidean { n } => Point::Vector(DVector::from_fn(n, |_, _| 2.0 * normal(rng))),
        SpaceTag::PositiveReals => Point::Positive(normal(rng).exp()),
        SpaceTag::SpdCone { n } => {
            let g = random_general_linear(rng, n);
            let s = &g * g.transpose();
            Point::Spd((&s + s.transpose()) * 0.5)
        }
        SpaceTag::Circle => Point::Angle(rng.random_range(0.0..TAU)),
        SpaceTag::Sphere { n } => Point::Sphere(random_sphere_point(rng, n)),
        SpaceTag::Hyperboloid { n } => Point::Hyperboloid(random_hyperboloid_point(rng, n, 1.0)),
        SpaceTag::UpperHalfPlane => Point::HalfPlane {
            x: normal(rng),
            y: (0.7 * normal(rng)).exp(),
        },
    }
}

/// An element of `SO₀(1, n)` built from a rotation in a spatial plane and a boost.
pub fn lorentz_example(n: usize, rapidity: f64, angle: f64) -> DMatrix<f64> {
    let rot = if n >= 2 {
        plane_rotation(n + 1, 1, 2, angle)
    } else {
        DMatrix::identity(n + 1, n + 1)
    };
    rot * boost(n, rapidity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_elements_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pairs = [
            GroupPair::SignTrivial,
            GroupPair::SymmetricStabilizer { n: 5 },
            GroupPair::AffineLine,
            GroupPair::Affine { n: 3 },
            GroupPair::PositiveTrivial,
            GroupPair::GeneralLinearOrthogonal { n: 3 },
            GroupPair::CircleTrivial,
            GroupPair::SphereRotation { n: 4 },
            GroupPair::LorentzRotation { n: 3 },
            GroupPair::SpecialLinearRotation,
        ];
        for pair in pairs {
            for _ in 0..20 {
                random_group_element(&mut rng, &pair).validate().unwrap();
                let h = random_subgroup_element(&mut rng, &pair);
                h.validate().unwrap();
                assert!(pair.contains_in_subgroup(&h), "{pair:?}");
                random_point(&mut rng, &pair.space()).validate(&pair.space()).unwrap();
            }
        }
    }
}
