//! Oblique projections: idempotent matrices determined by a range and a
//! nullspace that decompose the space between them.
//!
//! The eigenstructure of an idempotent P is bare: eigenvalue 1 on the
//! range, eigenvalue 0 on the nullspace, nothing else. P is symmetric
//! exactly when the nullspace is the orthogonal complement of the range.
//! Everything interesting about non-orthogonal fusion frames comes from
//! picking the nullspace freely: `P' P` (the Gram matrix of P) can be made
//! block-sparse, triangular relative to a reordering, or exactly diagonal,
//! which is impossible for orthogonal projections of the same ranges.

use alloc::vec::Vec;

use crate::linalg;
use crate::matrix::{dot, norm, Matrix};
use crate::subspace::{coordinate_subspace, Subspace};
use crate::{Error, Result, Tolerances};

/// An idempotent matrix with its invariant pair of subspaces.
///
/// Invariants: `matrix` is N x N and idempotent within the construction
/// tolerance; `range` has dimension k, `nullspace` dimension N - k and is
/// `None` exactly when k = N (the identity projection, whose nullspace is
/// the zero space and has no basis).
#[derive(Clone, Debug)]
pub struct ObliqueProjection {
    matrix: Matrix,
    range: Subspace,
    nullspace: Option<Subspace>,
}

impl ObliqueProjection {
    /// The unique projection with the given range and nullspace.
    ///
    /// The two subspaces must have complementary dimensions and intersect
    /// only at zero; `NotComplementary` otherwise.
    pub fn new(range: &Subspace, nullspace: &Subspace, tol: &Tolerances) -> Result<Self> {
        let n = range.ambient();
        if nullspace.ambient() != n {
            return Err(Error::DimensionMismatch { expected: n, got: nullspace.ambient() });
        }
        if range.dim() + nullspace.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: range.dim() + nullspace.dim(),
            });
        }
        let qw = range.orthonormalize(tol)?;
        let qv = nullspace.orthonormalize(tol)?;
        let stacked = qw.hstack(&qv);
        if linalg::rank(&stacked, tol) < n {
            return Err(Error::NotComplementary);
        }
        // P [Qw | Qv] = [Qw | 0], solved through the transpose.
        let k = range.dim();
        let rhs = qw.hstack(&Matrix::zeros(n, n - k));
        let pt = linalg::solve_linear(&stacked.transpose(), &rhs.transpose(), tol)
            .map_err(|e| if e == Error::Singular { Error::NotComplementary } else { e })?;
        finish(pt.transpose(), range.clone(), Some(nullspace.clone()), tol)
    }

    /// The orthogonal projector onto `w` (nullspace = orthogonal
    /// complement); symmetric by construction.
    pub fn orthogonal(w: &Subspace, tol: &Tolerances) -> Result<Self> {
        let q = w.orthonormalize(tol)?;
        let p = q.mul(&q.transpose());
        let nullspace = if w.dim() == w.ambient() {
            None
        } else {
            Some(w.orthogonal_complement(tol)?)
        };
        finish(p, w.clone(), nullspace, tol)
    }

    /// Wraps an explicit matrix, deriving range and nullspace from it.
    ///
    /// Fails with `NotIdempotent` when `P^2 != P` at the tolerance, and
    /// refuses the zero matrix (its range is the zero space).
    pub fn from_matrix(matrix: Matrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch { expected: matrix.rows(), got: matrix.cols() });
        }
        let n = matrix.rows();
        let residual = matrix.mul(&matrix).max_abs_diff(&matrix);
        if residual > tol.eq * matrix.max_abs().max(1.0) {
            return Err(Error::NotIdempotent { residual });
        }
        let r = linalg::rank(&matrix, tol);
        if r == 0 {
            return Err(Error::RankDeficient);
        }
        let (_, order) = linalg::pivoted_column_norms(&matrix);
        let mut range_cols = order[..r].to_vec();
        range_cols.sort_unstable();
        let range = Subspace::new(matrix.select_cols(&range_cols), tol)?;
        let nullspace = if r == n {
            None
        } else {
            let complement = Matrix::identity(n).sub(&matrix);
            let (_, order) = linalg::pivoted_column_norms(&complement);
            let mut null_cols = order[..n - r].to_vec();
            null_cols.sort_unstable();
            Some(Subspace::new(complement.select_cols(&null_cols), tol)?)
        };
        finish(matrix, range, nullspace, tol)
    }

    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn range(&self) -> &Subspace {
        &self.range
    }

    /// `None` exactly when the projection is the identity.
    #[inline]
    pub fn nullspace(&self) -> Option<&Subspace> {
        self.nullspace.as_ref()
    }

    /// `P' P`. Symmetric positive semidefinite with the same rank as P;
    /// diagonal entries are the squared column norms.
    pub fn gram(&self) -> GramMatrix {
        GramMatrix { matrix: self.matrix.gramian() }
    }

    /// A projection is symmetric exactly when its nullspace is the
    /// orthogonal complement of its range.
    pub fn is_orthogonal(&self, tol: &Tolerances) -> bool {
        self.matrix.max_asymmetry() <= tol.eq * self.matrix.max_abs().max(1.0)
    }

    /// Recomputes the invariant subspaces from the matrix itself: the
    /// eigenvalue-1 eigenspace (column space) and the eigenvalue-0
    /// eigenspace (column space of `I - P`, `None` for the identity).
    pub fn eigen_structure(&self, tol: &Tolerances) -> Result<(Subspace, Option<Subspace>)> {
        let n = self.ambient();
        let r = self.range.dim();
        let (_, order) = linalg::pivoted_column_norms(&self.matrix);
        let mut cols = order[..r].to_vec();
        cols.sort_unstable();
        let ones = Subspace::new(self.matrix.select_cols(&cols), tol)?;
        if r == n {
            return Ok((ones, None));
        }
        let complement = Matrix::identity(n).sub(&self.matrix);
        let (_, order) = linalg::pivoted_column_norms(&complement);
        let mut cols = order[..n - r].to_vec();
        cols.sort_unstable();
        let zeros = Subspace::new(complement.select_cols(&cols), tol)?;
        Ok((ones, Some(zeros)))
    }
}

/// Crate-internal constructor for code that builds projection matrices
/// directly; runs the same validation as the public constructors.
pub(crate) fn assemble(
    matrix: Matrix,
    range: Subspace,
    nullspace: Option<Subspace>,
    tol: &Tolerances,
) -> Result<ObliqueProjection> {
    finish(matrix, range, nullspace, tol)
}

/// Shared constructor: validates idempotency, the range identity and the
/// nullspace annihilation before handing the struct out.
fn finish(
    matrix: Matrix,
    range: Subspace,
    nullspace: Option<Subspace>,
    tol: &Tolerances,
) -> Result<ObliqueProjection> {
    let n = matrix.rows();
    let null_dim = nullspace.as_ref().map_or(0, Subspace::dim);
    if range.dim() + null_dim != n {
        return Err(Error::DimensionMismatch { expected: n, got: range.dim() + null_dim });
    }
    let scale = matrix.max_abs().max(1.0);
    let residual = matrix.mul(&matrix).max_abs_diff(&matrix);
    if residual > tol.eq * scale {
        return Err(Error::NotIdempotent { residual });
    }
    let qw = range.orthonormalize(tol)?;
    if matrix.mul(&qw).max_abs_diff(&qw) > tol.eq * scale {
        return Err(Error::NotComplementary);
    }
    if let Some(ns) = &nullspace {
        let qv = ns.orthonormalize(tol)?;
        if matrix.mul(&qv).max_abs() > tol.eq * scale {
            return Err(Error::NotComplementary);
        }
    }
    Ok(ObliqueProjection { matrix, range, nullspace })
}

/// The Gram matrix `P' P` of a projection.
///
/// Symmetric positive semidefinite by construction; its diagonal lists the
/// squared norms of the projection's columns, and its support pattern is
/// what the sparse constructions control.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    matrix: Matrix,
}

impl GramMatrix {
    #[inline]
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.matrix.rows()).map(|i| self.matrix[(i, i)]).collect()
    }

    /// Entries with magnitude above `threshold` (an absolute cutoff).
    pub fn nnz(&self, threshold: f64) -> usize {
        let mut count = 0;
        for i in 0..self.matrix.rows() {
            for j in 0..self.matrix.cols() {
                if self.matrix[(i, j)].abs() > threshold {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn max_offdiag(&self) -> f64 {
        let n = self.matrix.rows();
        let mut m = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.matrix[(i, j)].abs());
                }
            }
        }
        m
    }

    pub fn is_diagonal(&self, threshold: f64) -> bool {
        self.max_offdiag() <= threshold
    }
}

/// The projection onto `w` whose nullspace is spanned by the standard
/// basis vectors *outside* `kept`. Its matrix has nonzero columns only on
/// `kept`, its rows on `kept` form the identity, and its Gram matrix is
/// supported on `kept` x `kept`.
///
/// Requires the kept coordinates to determine `w` uniquely (the kept rows
/// of an orthonormal basis must be invertible); `NotComplementary`
/// otherwise.
pub(crate) fn coordinate_nullspace_projection(
    w: &Subspace,
    kept: &[usize],
    tol: &Tolerances,
) -> Result<ObliqueProjection> {
    let n = w.ambient();
    let k = w.dim();
    if kept.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: kept.len() });
    }
    let q = w.orthonormalize(tol)?;
    let qk = q.select_rows(kept);
    // Forced vectors: the unique X in W with X's kept rows = identity;
    // X = Q (Q_K)^{-1}, solved through the transpose.
    let xt = linalg::solve_linear(&qk.transpose(), &q.transpose(), tol)
        .map_err(|e| if e == Error::Singular { Error::NotComplementary } else { e })?;
    let forced = xt.transpose();
    let mut p = Matrix::zeros(n, n);
    for (c, &i) in kept.iter().enumerate() {
        p.set_col(i, &forced.col(c));
    }
    let nullspace = if k == n {
        None
    } else {
        let rest: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
        Some(coordinate_subspace(n, &rest)?)
    };
    finish(p, w.clone(), nullspace, tol)
}

/// Projection onto `w` with a Gram matrix supported on a k x k block.
///
/// Picks the best-conditioned coordinate set K by pivoted elimination on
/// the orthonormalized basis (ties to the lowest index), then projects
/// along the complementary coordinate directions. Returns K ascending and
/// the projection.
pub fn block_sparse_projection(
    w: &Subspace,
    tol: &Tolerances,
) -> Result<(Vec<usize>, ObliqueProjection)> {
    let q = w.orthonormalize(tol)?;
    let kept = linalg::pivot_rows(&q, w.dim());
    let p = coordinate_nullspace_projection(w, &kept, tol)?;
    Ok((kept, p))
}

/// Projection onto `w` that is lower triangular after reordering
/// coordinates so K comes first.
///
/// Returns the full reordering (K ascending, then the complement
/// ascending) and the projection; entry (i, j) of the reordered matrix is
/// zero for j > i.
pub fn triangular_projection(
    w: &Subspace,
    tol: &Tolerances,
) -> Result<(Vec<usize>, ObliqueProjection)> {
    let (kept, p) = block_sparse_projection(w, tol)?;
    let n = w.ambient();
    let mut perm = kept.clone();
    perm.extend((0..n).filter(|i| !kept.contains(i)));
    Ok((perm, p))
}

/// Projection with prescribed diagonal Gram matrix, built by tilting kept
/// axes: `P e_i = e_i + y_i` for each kept axis i with its tilt `y_i`, and
/// `P e_j = 0` off `kept`.
///
/// Tilts must live on the complementary coordinates (`SupportViolation`)
/// and be pairwise orthogonal (`NotOrthogonal`); zero tilts are fine. The
/// Gram matrix comes out diagonal with entry `1 + |y_i|^2` at each kept
/// index. Returns the spanned subspace and the projection.
pub fn tilted_axes_projection(
    n: usize,
    kept: &[usize],
    tilts: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<(Subspace, ObliqueProjection)> {
    if kept.len() != tilts.len() {
        return Err(Error::DimensionMismatch { expected: kept.len(), got: tilts.len() });
    }
    // Re-validate kept as an index set.
    coordinate_subspace(n, kept)?;
    for (t, y) in tilts.iter().enumerate() {
        if y.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: y.len() });
        }
        if !y.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = crate::matrix::max_abs(y).max(1.0);
        if kept.iter().any(|&i| y[i].abs() > tol.eq * scale) {
            return Err(Error::SupportViolation { index: t });
        }
    }
    for a in 0..tilts.len() {
        for b in (a + 1)..tilts.len() {
            let bound = tol.eq * (norm(&tilts[a]) * norm(&tilts[b])).max(1.0);
            if dot(&tilts[a], &tilts[b]).abs() > bound {
                return Err(Error::NotOrthogonal { i: a, j: b });
            }
        }
    }
    let mut p = Matrix::zeros(n, n);
    let mut basis_cols: Vec<Vec<f64>> = Vec::with_capacity(kept.len());
    for (t, &i) in kept.iter().enumerate() {
        let mut col = tilts[t].clone();
        col[i] += 1.0;
        p.set_col(i, &col);
        let len = norm(&col);
        basis_cols.push(col.iter().map(|x| x / len).collect());
    }
    let w = Subspace::from_cols(&basis_cols, tol)?;
    let nullspace = if kept.len() == n {
        None
    } else {
        let rest: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
        Some(coordinate_subspace(n, &rest)?)
    };
    let p = finish(p, w.clone(), nullspace, tol)?;
    Ok((w, p))
}
