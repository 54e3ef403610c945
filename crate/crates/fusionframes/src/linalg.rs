//! The factorization kit: modified Gram-Schmidt, column-pivoted Householder
//! elimination, cyclic Jacobi eigendecomposition, partially pivoted solves.
//!
//! Everything here is deterministic. Pivot ties resolve to the lowest
//! index, trailing norms are recomputed from the updated matrix (no
//! downdating), and eigenvalues are returned ascending with a stable sort.

use alloc::vec::Vec;

use crate::matrix::{dot, norm, Matrix};
use crate::scalar;
use crate::{Error, Result, Tolerances};

/// Euclidean norm of rows `from..` of column `j`.
fn column_tail_norm(a: &Matrix, j: usize, from: usize) -> f64 {
    let mut s = 0.0;
    for i in from..a.rows() {
        s += a[(i, j)] * a[(i, j)];
    }
    scalar::sqrt(s)
}

/// Column-pivoted Householder elimination, keeping only what rank and
/// support decisions need: the pivot magnitudes `|R_tt|` (which equal the
/// selected trailing norms) and the pivot order as original column indices.
pub(crate) fn pivoted_column_norms(m: &Matrix) -> (Vec<f64>, Vec<usize>) {
    let mut a = m.clone();
    let (r, c) = (a.rows(), a.cols());
    let steps = r.min(c);
    let mut order: Vec<usize> = (0..c).collect();
    let mut norms = Vec::with_capacity(steps);
    for t in 0..steps {
        let mut best_j = t;
        let mut best_n = column_tail_norm(&a, t, t);
        for j in (t + 1)..c {
            let n = column_tail_norm(&a, j, t);
            // Exact ties go to the lowest original column index, which
            // earlier swaps may have moved to a later position.
            if n > best_n || (n == best_n && order[j] < order[best_j]) {
                best_n = n;
                best_j = j;
            }
        }
        if best_j != t {
            a.swap_cols(t, best_j);
            order.swap(t, best_j);
        }
        norms.push(best_n);
        if best_n == 0.0 {
            // Remaining trailing block is zero; the rest of the norms are too.
            norms.resize(steps, 0.0);
            break;
        }
        // Householder reflector for column t, applied to the trailing block.
        let mut v: Vec<f64> = (t..r).map(|i| a[(i, t)]).collect();
        let alpha = if v[0] >= 0.0 { -best_n } else { best_n };
        v[0] -= alpha;
        let vn2 = dot(&v, &v);
        if vn2 == 0.0 {
            continue;
        }
        for j in t..c {
            let mut proj = 0.0;
            for i in t..r {
                proj += v[i - t] * a[(i, j)];
            }
            let s = 2.0 * proj / vn2;
            for i in t..r {
                a[(i, j)] -= s * v[i - t];
            }
        }
    }
    (norms, order)
}

/// Numerical rank via pivoted elimination: pivots above `tol.rank` relative
/// to the largest one count.
pub fn rank(m: &Matrix, tol: &Tolerances) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let (norms, _) = pivoted_column_norms(m);
    let top = norms[0];
    if top <= 0.0 {
        return 0;
    }
    norms.iter().take_while(|&&n| n > tol.rank * top).count()
}

/// The `count` best-conditioned rows of an orthonormal basis, as ascending
/// indices: pivoted elimination on the transpose picks them.
pub(crate) fn pivot_rows(q: &Matrix, count: usize) -> Vec<usize> {
    let (_, order) = pivoted_column_norms(&q.transpose());
    let mut rows: Vec<usize> = order[..count].to_vec();
    rows.sort_unstable();
    rows
}

/// Modified Gram-Schmidt with a second orthogonalization pass.
///
/// Columns are processed in their given order, so an input that is already
/// orthonormal comes back unchanged up to roundoff. Dependence is flagged
/// relative to the largest original column norm.
pub(crate) fn mgs(m: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let (n, k) = (m.rows(), m.cols());
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| m.col(j)).collect();
    let scale = cols.iter().map(|c| norm(c)).fold(0.0f64, f64::max);
    if scale <= 0.0 {
        return Err(Error::RankDeficient);
    }
    for j in 0..k {
        let mut v = cols[j].clone();
        for _ in 0..2 {
            for q in cols.iter().take(j) {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let nv = norm(&v);
        if nv <= tol.rank * scale {
            return Err(Error::RankDeficient);
        }
        for vi in v.iter_mut() {
            *vi /= nv;
        }
        cols[j] = v;
    }
    let mut q = Matrix::zeros(n, k);
    for (j, col) in cols.iter().enumerate() {
        q.set_col(j, col);
    }
    Ok(q)
}

/// Full orthogonal factor of an unpivoted Householder elimination of
/// `basis` (N x k, assumed full column rank). The first k columns span the
/// column space; the rest span its orthogonal complement.
pub(crate) fn householder_full_q(basis: &Matrix) -> Matrix {
    let (n, k) = (basis.rows(), basis.cols());
    let mut a = basis.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    for t in 0..k {
        let nt = column_tail_norm(&a, t, t);
        let mut v: Vec<f64> = (t..n).map(|i| a[(i, t)]).collect();
        if nt > 0.0 {
            let alpha = if v[0] >= 0.0 { -nt } else { nt };
            v[0] -= alpha;
        }
        let vn2 = dot(&v, &v);
        if vn2 > 0.0 {
            for j in t..k {
                let mut proj = 0.0;
                for i in t..n {
                    proj += v[i - t] * a[(i, j)];
                }
                let s = 2.0 * proj / vn2;
                for i in t..n {
                    a[(i, j)] -= s * v[i - t];
                }
            }
        }
        reflectors.push(v);
    }
    // Q = H_0 H_1 ... H_{k-1}; apply reflectors to the identity in reverse.
    let mut q = Matrix::identity(n);
    for t in (0..k).rev() {
        let v = &reflectors[t];
        let vn2 = dot(v, v);
        if vn2 == 0.0 {
            continue;
        }
        for j in 0..n {
            let mut proj = 0.0;
            for i in t..n {
                proj += v[i - t] * q[(i, j)];
            }
            let s = 2.0 * proj / vn2;
            for i in t..n {
                q[(i, j)] -= s * v[i - t];
            }
        }
    }
    q
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues ascending and the matching orthonormal eigenvector
/// columns. The input must be symmetric within `tol.eq` (relative to its
/// magnitude); it is symmetrized exactly before iterating so the result is
/// a true spectral factorization of `(M + M')/2`.
pub fn symmetric_eigendecomposition(m: &Matrix, tol: &Tolerances) -> Result<(Vec<f64>, Matrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.rows(), got: m.cols() });
    }
    let n = m.rows();
    let scale = m.max_abs();
    if m.max_asymmetry() > tol.eq * scale.max(1.0) {
        return Err(Error::NotSymmetric);
    }
    let mut a = m.symmetrized();
    let mut v = Matrix::identity(n);
    let stop = 1e-14 * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                // Smaller-angle root; the asymptotic form avoids overflow.
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + scalar::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / scalar::sqrt(t * t + 1.0);
                let s = t * c;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip - s * aiq;
                    a[(i, q)] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj - s * aqj;
                    a[(q, j)] = s * apj + c * aqj;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).expect("finite eigenvalues"));
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = v.select_cols(&order);
    Ok((values, vectors))
}

/// Solves `A X = B` by Gaussian elimination with partial pivoting.
///
/// `Singular` fires when a pivot falls at or below `tol.rank` relative to
/// the largest entry of `A`.
pub fn solve_linear(a: &Matrix, b: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
    }
    let n = a.rows();
    if b.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.rows() });
    }
    let scale = a.max_abs();
    if scale <= 0.0 {
        return Err(Error::Singular);
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    for t in 0..n {
        let mut piv = t;
        let mut piv_abs = lu[(t, t)].abs();
        for r in (t + 1)..n {
            let v = lu[(r, t)].abs();
            if v > piv_abs {
                piv_abs = v;
                piv = r;
            }
        }
        if piv_abs <= tol.rank * scale {
            return Err(Error::Singular);
        }
        if piv != t {
            for j in 0..n {
                let tmp = lu[(t, j)];
                lu[(t, j)] = lu[(piv, j)];
                lu[(piv, j)] = tmp;
            }
            for j in 0..x.cols() {
                let tmp = x[(t, j)];
                x[(t, j)] = x[(piv, j)];
                x[(piv, j)] = tmp;
            }
        }
        for r in (t + 1)..n {
            let f = lu[(r, t)] / lu[(t, t)];
            if f == 0.0 {
                continue;
            }
            lu[(r, t)] = 0.0;
            for j in (t + 1)..n {
                lu[(r, j)] -= f * lu[(t, j)];
            }
            for j in 0..x.cols() {
                x[(r, j)] -= f * x[(t, j)];
            }
        }
    }
    for t in (0..n).rev() {
        for j in 0..x.cols() {
            let mut s = x[(t, j)];
            for r in (t + 1)..n {
                s -= lu[(t, r)] * x[(r, j)];
            }
            x[(t, j)] = s / lu[(t, t)];
        }
    }
    Ok(x)
}
