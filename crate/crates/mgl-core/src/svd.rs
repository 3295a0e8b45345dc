//! Deterministic singular value decomposition with full orthonormal bases.
//!
//! Wraps nalgebra's SVD with a canonical ordering and sign convention so
//! that identical matrices always produce bitwise-identical factors, and
//! completes the left and right singular vectors to full orthonormal bases
//! even for rectangular or rank-deficient input.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative threshold under which a singular value counts as zero.
pub const RANK_REL_TOL: f64 = 1e-8;

/// Singular value decomposition with completed bases.
///
/// For an n×m input: `singular` holds the min(m,n) singular values in
/// descending order, `left` is an orthonormal basis of Rⁿ whose first
/// min(m,n) vectors are the left singular vectors, and `right` is an
/// orthonormal basis of Rᵐ whose first min(m,n) vectors are the right
/// singular vectors.
#[derive(Clone, Debug)]
pub struct FullSvd {
    pub singular: Vec<f64>,
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
    pub rank: usize,
}

/// Threshold for treating singular values as nonzero.
pub fn rank_tolerance(sigma_max: f64) -> f64 {
    RANK_REL_TOL * sigma_max.max(1.0)
}

/// Decomposes `mat`, sorting singular values in descending order and fixing
/// signs so the largest-magnitude entry of each right singular vector is
/// positive (ties broken by lowest index).
pub fn full_svd(mat: &DMatrix<f64>) -> Result<FullSvd> {
    let (n, m) = (mat.nrows(), mat.ncols());
    if n == 0 || m == 0 {
        return Err(Error::Dimension("svd input must be nonempty".into()));
    }
    if mat.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("svd input must be finite".into()));
    }
    let d = n.min(m);
    let svd = mat
        .clone()
        .try_svd(true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Internal("svd iteration failed to converge".into()))?;
    let u = svd.u.expect("left vectors requested");
    let v_t = svd.v_t.expect("right vectors requested");

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("finite singular values")
            .then(a.cmp(&b))
    });

    let mut singular = Vec::with_capacity(d);
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut right: Vec<Vec<f64>> = Vec::with_capacity(m);
    for &k in &order {
        singular.push(svd.singular_values[k].max(0.0));
        let mut uv: Vec<f64> = (0..n).map(|r| u[(r, k)]).collect();
        let mut vv: Vec<f64> = (0..m).map(|c| v_t[(k, c)]).collect();
        let pivot = vv
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                a.abs()
                    .partial_cmp(&b.abs())
                    .expect("finite vector")
                    .then(ib.cmp(ia))
            })
            .map(|(_, v)| *v)
            .unwrap_or(1.0);
        if pivot < 0.0 {
            for x in uv.iter_mut() {
                *x = -*x;
            }
            for x in vv.iter_mut() {
                *x = -*x;
            }
        }
        left.push(uv);
        right.push(vv);
    }

    let tol = rank_tolerance(singular.first().copied().unwrap_or(0.0));
    let rank = singular.iter().take_while(|s| **s > tol).count();

    let left = complete_orthonormal(left, n);
    let right = complete_orthonormal(right, m);
    Ok(FullSvd {
        singular,
        left,
        right,
        rank,
    })
}

/// Extends a partial orthonormal family to a full orthonormal basis of
/// R^dim by orthogonalizing coordinate axes against it, deterministically.
pub fn complete_orthonormal(mut basis: Vec<Vec<f64>>, dim: usize) -> Vec<Vec<f64>> {
    for axis in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        for _pass in 0..2 {
            for b in &basis {
                let c: f64 = v.iter().zip(b).map(|(a, x)| a * x).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            for x in v.iter_mut() {
                *x /= norm;
            }
            basis.push(v);
        }
    }
    debug_assert_eq!(basis.len(), dim, "basis completion fell short");
    basis
}
