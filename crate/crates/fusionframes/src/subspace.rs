//! Subspaces of real N-space, carried as explicit basis matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::matrix::{norm, Matrix};
use crate::{Error, Result, Tolerances};

/// A k-dimensional subspace given by an N x k basis matrix.
///
/// Invariants: `1 <= k <= N`, entries finite, columns linearly independent
/// at the rank tolerance passed to the constructor.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl Subspace {
    pub fn new(basis: Matrix, tol: &Tolerances) -> Result<Self> {
        let (n, k) = (basis.rows(), basis.cols());
        if k == 0 || k > n {
            return Err(Error::DimensionMismatch { expected: n, got: k });
        }
        if linalg::rank(&basis, tol) < k {
            return Err(Error::RankDeficient);
        }
        Ok(Subspace { ambient: n, basis })
    }

    pub fn from_cols(cols: &[Vec<f64>], tol: &Tolerances) -> Result<Self> {
        Subspace::new(Matrix::from_cols(cols)?, tol)
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    #[inline]
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// Orthonormal basis with the same span, by modified Gram-Schmidt in
    /// column order. Already-orthonormal input comes back unchanged up to
    /// roundoff, so the map is idempotent.
    pub fn orthonormalize(&self, tol: &Tolerances) -> Result<Matrix> {
        linalg::mgs(&self.basis, tol)
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn orthogonal_complement(&self, tol: &Tolerances) -> Result<Subspace> {
        let (n, k) = (self.ambient, self.dim());
        if k == n {
            return Err(Error::FullSpace);
        }
        let q = self.orthonormalize(tol)?;
        let full = linalg::householder_full_q(&q);
        let comp: Vec<usize> = (k..n).collect();
        Subspace::new(full.select_cols(&comp), tol)
    }

    /// The orthogonal projector onto this subspace, `Q Q'`.
    pub fn orthogonal_projector_matrix(&self, tol: &Tolerances) -> Result<Matrix> {
        let q = self.orthonormalize(tol)?;
        Ok(q.mul(&q.transpose()))
    }

    /// Whether `v` lies in the subspace within `tol.eq`, scaled by the
    /// vector's size.
    pub fn contains(&self, v: &[f64], tol: &Tolerances) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, got: v.len() });
        }
        let q = self.orthonormalize(tol)?;
        let coords = q.tr_mul_vec(v);
        let back = q.mul_vec(&coords);
        let mut res = vec![0.0; v.len()];
        for i in 0..v.len() {
            res[i] = v[i] - back[i];
        }
        Ok(norm(&res) <= tol.eq * norm(v).max(1.0))
    }

    /// Indices of the standard basis vectors contained in the subspace.
    pub fn axes_contained(&self, tol: &Tolerances) -> Result<Vec<usize>> {
        let q = self.orthonormalize(tol)?;
        let mut out = Vec::new();
        for i in 0..self.ambient {
            let mut e = vec![0.0; self.ambient];
            e[i] = 1.0;
            let coords = q.tr_mul_vec(&e);
            let back = q.mul_vec(&coords);
            let mut res = 0.0;
            for (j, b) in back.iter().enumerate() {
                let d = e[j] - b;
                res += d * d;
            }
            if crate::scalar::sqrt(res) <= tol.eq {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Span equality: same dimension and the orthogonal projectors agree
    /// entrywise within `tol.eq`.
    pub fn span_equals(&self, other: &Subspace, tol: &Tolerances) -> Result<bool> {
        if self.ambient != other.ambient || self.dim() != other.dim() {
            return Ok(false);
        }
        let p = self.orthogonal_projector_matrix(tol)?;
        let q = other.orthogonal_projector_matrix(tol)?;
        Ok(p.max_abs_diff(&q) <= tol.eq)
    }
}

/// The coordinate subspace spanned by the given standard basis vectors.
/// Indices must be distinct and in range; order is preserved in the basis.
pub fn coordinate_subspace(n: usize, indices: &[usize]) -> Result<Subspace> {
    if indices.is_empty() || indices.len() > n {
        return Err(Error::BadIndexSet);
    }
    let mut seen = vec![false; n];
    let mut basis = Matrix::zeros(n, indices.len());
    for (j, &i) in indices.iter().enumerate() {
        if i >= n || seen[i] {
            return Err(Error::BadIndexSet);
        }
        seen[i] = true;
        basis[(i, j)] = 1.0;
    }
    // Columns are distinct standard basis vectors: exactly orthonormal.
    Ok(Subspace { ambient: n, basis })
}
