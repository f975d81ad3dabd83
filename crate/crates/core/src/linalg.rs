//! Small dense linear-algebra helpers on top of `nalgebra`.
//!
//! Symmetric matrices are stored packed: the upper triangle in row-major
//! order, `(s11, s12, ..., s1k, s22, ..., skk)`. Under the trace form
//! `Tr(xy)` an off-diagonal coordinate pairs with weight 2.

use nalgebra::{DMatrix, DVector};

pub fn sym_len(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Inverse of [`sym_len`].
pub fn sym_order(len: usize) -> Option<usize> {
    let k = ((((8 * len + 1) as f64).sqrt() - 1.0) / 2.0).round() as usize;
    (sym_len(k) == len).then_some(k)
}

pub fn pack_sym(m: &DMatrix<f64>) -> Vec<f64> {
    let k = m.nrows();
    let mut out = Vec::with_capacity(sym_len(k));
    for i in 0..k {
        for j in i..k {
            out.push(0.5 * (m[(i, j)] + m[(j, i)]));
        }
    }
    out
}

pub fn unpack_sym(v: &[f64], k: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(k, k);
    let mut idx = 0;
    for i in 0..k {
        for j in i..k {
            m[(i, j)] = v[idx];
            m[(j, i)] = v[idx];
            idx += 1;
        }
    }
    m
}

/// Pairing weights of the trace form on packed `Sym(k)`.
pub fn sym_weights(k: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(sym_len(k));
    for i in 0..k {
        for j in i..k {
            out.push(if i == j { 1.0 } else { 2.0 });
        }
    }
    out
}

/// Minkowski form `-a0 b0 + a1 b1 + ... + an bn`.
pub fn lorentz_inner(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + a[1..].iter().zip(&b[1..]).map(|(x, y)| x * y).sum::<f64>()
}

pub fn rot2(angle: f64) -> DMatrix<f64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, -s, s, c])
}

/// A rotation `g ∈ SO(n)` with `g e1 = x` for a unit vector `x`.
///
/// Householder reflection sending `e1` to `x`, composed on the right with the
/// reflection `e_n ↦ -e_n` (which fixes `e1`) so the determinant is `+1`.
pub fn rotation_to(x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let mut v = -x.clone();
    v[0] += 1.0;
    let vv = v.norm_squared();
    if vv < 1e-30 {
        return DMatrix::identity(n, n);
    }
    let mut h = DMatrix::identity(n, n) - (&v * v.transpose()) * (2.0 / vv);
    if n == 1 {
        return h;
    }
    for i in 0..n {
        h[(i, n - 1)] = -h[(i, n - 1)];
    }
    h
}

/// Pure boost of rapidity `r` in the `(e0, e1)` plane of `ℝ^{1,n}`.
pub fn boost(n: usize, r: f64) -> DMatrix<f64> {
    let mut b = DMatrix::identity(n + 1, n + 1);
    let (c, s) = (r.cosh(), r.sinh());
    b[(0, 0)] = c;
    b[(1, 1)] = c;
    b[(0, 1)] = s;
    b[(1, 0)] = s;
    b
}

/// Lorentz transformation `g ∈ SO₀(1,n)` with `g e0 = x` for `x ∈ Hⁿ`:
/// a boost along `e1` followed by a rotation taking `e1` to the spatial direction of `x`.
pub fn lorentz_to(x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len() - 1;
    let spatial = x.rows(1, n).into_owned();
    let s = spatial.norm();
    let r = s.asinh();
    let dir = if s > 0.0 {
        spatial / s
    } else {
        let mut e = DVector::zeros(n);
        e[0] = 1.0;
        e
    };
    let rot = rotation_to(&dir);
    let mut lifted = DMatrix::identity(n + 1, n + 1);
    lifted.view_mut((1, 1), (n, n)).copy_from(&rot);
    lifted * boost(n, r)
}

pub fn block_diag_one(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut out = DMatrix::identity(n + 1, n + 1);
    out.view_mut((1, 1), (n, n)).copy_from(m);
    out
}

/// `[[A, b], [0, 1]]`.
pub fn affine_matrix(a: &DMatrix<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::identity(n + 1, n + 1);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, 1)).copy_from(b);
    m
}

/// `log det` of a symmetric positive-definite matrix, `None` if Cholesky fails.
pub fn spd_log_det(m: &DMatrix<f64>) -> Option<f64> {
    let chol = m.clone().cholesky()?;
    Some(2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let scale = m.amax().max(1.0);
    (m - m.transpose()).amax() <= tol * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_roundtrip() {
        let m = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0]);
        let p = pack_sym(&m);
        assert_eq!(p, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(unpack_sym(&p, 3), m);
        assert_eq!(sym_order(6), Some(3));
        assert_eq!(sym_order(5), None);
        let w = sym_weights(3);
        let other = DMatrix::from_row_slice(3, 3, &[0.5, -1.0, 2.0, -1.0, 3.0, 0.0, 2.0, 0.0, 1.0]);
        let trace = (&m * &other).trace();
        let packed: f64 = pack_sym(&other).iter().zip(&p).zip(&w).map(|((a, b), w)| a * b * w).sum();
        assert!((trace - packed).abs() < 1e-12);
    }

    #[test]
    fn rotation_to_hits_target() {
        let x = DVector::from_vec(vec![0.2, -0.6, 0.3, 0.7]).normalize();
        let g = rotation_to(&x);
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        assert!((&g * e1 - &x).norm() < 1e-14);
        assert!((g.transpose() * &g - DMatrix::identity(4, 4)).amax() < 1e-14);
        assert!((g.determinant() - 1.0).abs() < 1e-13);
        let minus = DVector::from_vec(vec![-1.0, 0.0, 0.0, 0.0]);
        let g = rotation_to(&minus);
        assert!((g.determinant() - 1.0).abs() < 1e-13);
        assert!((g.column(0) - minus).norm() < 1e-14);
    }

    #[test]
    fn lorentz_to_hits_target() {
        let s: DVector<f64> = DVector::from_vec(vec![0.3, -1.2, 0.4]);
        let x0 = (1.0 + s.norm_squared()).sqrt();
        let x = DVector::from_vec(vec![x0, s[0], s[1], s[2]]);
        let g = lorentz_to(&x);
        let mut e0 = DVector::zeros(4);
        e0[0] = 1.0;
        assert!((&g * e0 - &x).norm() < 1e-13);
        let mut j = DMatrix::identity(4, 4);
        j[(0, 0)] = -1.0;
        assert!((g.transpose() * &j * &g - &j).amax() < 1e-12);
    }
}
