//! Constructions of fusion frames with prescribed operator structure.
//!
//! Orthogonal projections force dense, coupled frame operators; choosing
//! nullspaces freely makes structure a design parameter instead. This
//! module builds:
//!
//! * Parseval fusion frames from any spanning set, via rank-one oblique
//!   projections ([`parseval_from_frame`]);
//! * projections with exactly diagonal Gram matrices, either searched for
//!   ([`diagonal_gram_search`]) or prescribed entry by entry
//!   ([`prescribed_diagonal`]);
//! * tight families over a single subspace: two members when the subspace
//!   fills at least half the space ([`tight_pair`]), `L` members when the
//!   dimension divides evenly ([`tight_chain`], [`tight_chain_general`]),
//!   and an `L + 1`-member family with a known, generally non-flat
//!   spectrum for the leftover case ([`residual_chain`]).

use alloc::vec;
use alloc::vec::Vec;

use crate::fusion::{FusionFrame, WeightedProjection, TIGHT_RELATIVE_GAP};
use crate::linalg;
use crate::matrix::{dot, norm, Matrix};
use crate::projection::{
    assemble, coordinate_nullspace_projection, ObliqueProjection,
};
use crate::scalar::sqrt;
use crate::subspace::{coordinate_subspace, Subspace};
use crate::{Error, Result, Tolerances};

/// How Parseval weights are distributed among vectors sharing an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightRule {
    /// Each vector gets its own weight from its own norms.
    PerVector,
    /// All vectors assigned to one axis share a single weight.
    GroupSum,
}

/// The output of [`parseval_from_frame`].
///
/// Everything is indexed by *position after reordering*: position `t`
/// refers to the input vector `vectors[permutation[t]]`.
#[derive(Clone, Debug)]
pub struct ParsevalConstruction {
    /// Position -> original index. The first N positions hold a basis
    /// whose t-th vector has a usable t-th coordinate.
    pub permutation: Vec<usize>,
    /// The axis each vector is assigned to: `t` itself for `t < N`, the
    /// vector's largest coordinate afterwards.
    pub pivots: Vec<usize>,
    /// Squared weights `v_t^2` under the chosen rule.
    pub squared_weights: Vec<f64>,
    /// Dual vectors `y_t = e_{j_t} / x_t[j_t]`; each pairs with its
    /// vector to a rank-one idempotent `x_t y_t'`.
    pub duals: Vec<Vec<f64>>,
    /// The induced Parseval frame of singletons: `e_{j_t}` shrunk by the
    /// square root of its axis multiplicity. Independent of the rule.
    pub parseval_vectors: Vec<Vec<f64>>,
    /// The weighted rank-one family; its frame operator is the identity.
    pub frame: FusionFrame,
}

/// Builds a Parseval fusion frame of weighted rank-one oblique
/// projections from any finite spanning set.
///
/// The vectors are reordered so the first N form a basis with nonzero
/// diagonal coordinates (a matching problem; `NoValidPermutation` if no
/// assignment clears the rank floor). Each vector then projects onto its
/// own span along the coordinate hyperplane of its assigned axis, and the
/// weights are sized so the operator comes out exactly the identity.
///
/// Fails with `ZeroVector` for numerically zero inputs and `NotSpanning`
/// when the set does not span.
pub fn parseval_from_frame(
    vectors: &[Vec<f64>],
    rule: WeightRule,
    tol: &Tolerances,
) -> Result<ParsevalConstruction> {
    let m = vectors.len();
    if m == 0 {
        return Err(Error::EmptyFamily);
    }
    let n = vectors[0].len();
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let x = Matrix::from_cols(vectors)?;
    let global = x.max_abs();
    for (i, v) in vectors.iter().enumerate() {
        if crate::matrix::max_abs(v) <= tol.rank * global {
            return Err(Error::ZeroVector { index: i });
        }
    }
    if linalg::rank(&x, tol) < n {
        return Err(Error::NotSpanning);
    }

    // A well-conditioned basis among the columns, then a perfect matching
    // column -> axis over entries above the floor, so every basis vector
    // can take its own axis as pivot.
    let (_, order) = linalg::pivoted_column_norms(&x);
    let mut selected = order[..n].to_vec();
    selected.sort_unstable();
    let b = x.select_cols(&selected);
    let matched =
        perfect_matching(&b, tol.rank * b.max_abs()).ok_or(Error::NoValidPermutation)?;

    let mut permutation: Vec<usize> = matched.iter().map(|&c| selected[c]).collect();
    let mut used = vec![false; m];
    for &c in &permutation {
        used[c] = true;
    }
    permutation.extend((0..m).filter(|&c| !used[c]));

    // Axis assignment: the matched axis up front, the dominant coordinate
    // (lowest index on ties) for the remainder.
    let mut pivots = Vec::with_capacity(m);
    for (t, &orig) in permutation.iter().enumerate() {
        if t < n {
            pivots.push(t);
        } else {
            let v = &vectors[orig];
            let mut best = 0usize;
            for (j, val) in v.iter().enumerate() {
                if val.abs() > v[best].abs() {
                    best = j;
                }
            }
            pivots.push(best);
        }
    }
    let mut counts = vec![0usize; n];
    for &j in &pivots {
        counts[j] += 1;
    }

    // Per-vector cost r_t = |x_t|^2 |y_t|^2; the weights cancel it so the
    // operator's diagonal sums to one on every axis.
    let mut duals = Vec::with_capacity(m);
    let mut costs = Vec::with_capacity(m);
    let mut axis_sums = vec![0.0f64; n];
    for (t, &orig) in permutation.iter().enumerate() {
        let v = &vectors[orig];
        let j = pivots[t];
        let mut y = vec![0.0; n];
        y[j] = 1.0 / v[j];
        let r = dot(v, v) / (v[j] * v[j]);
        axis_sums[j] += r;
        duals.push(y);
        costs.push(r);
    }
    let squared_weights: Vec<f64> = (0..m)
        .map(|t| match rule {
            WeightRule::PerVector => 1.0 / (counts[pivots[t]] as f64 * costs[t]),
            WeightRule::GroupSum => 1.0 / axis_sums[pivots[t]],
        })
        .collect();
    let parseval_vectors: Vec<Vec<f64>> = (0..m)
        .map(|t| {
            let j = pivots[t];
            let mut u = vec![0.0; n];
            u[j] = 1.0 / sqrt(counts[j] as f64);
            u
        })
        .collect();

    let mut members = Vec::with_capacity(m);
    for (t, &orig) in permutation.iter().enumerate() {
        let v = &vectors[orig];
        let j = pivots[t];
        let mut p = Matrix::zeros(n, n);
        for i in 0..n {
            p[(i, j)] = v[i] / v[j];
        }
        let range = Subspace::from_cols(core::slice::from_ref(v), tol)?;
        let nullspace = if n == 1 {
            None
        } else {
            let rest: Vec<usize> = (0..n).filter(|&i| i != j).collect();
            Some(coordinate_subspace(n, &rest)?)
        };
        let projection = assemble(p, range, nullspace, tol)?;
        members.push(WeightedProjection::new(projection, sqrt(squared_weights[t]))?);
    }
    let frame = FusionFrame::new(members)?;

    Ok(ParsevalConstruction {
        permutation,
        pivots,
        squared_weights,
        duals,
        parseval_vectors,
        frame,
    })
}

/// Augmenting-path matching of axes to columns of the square matrix `b`,
/// allowing axis `a` to take column `c` only when `|b[a][c]| > floor`.
/// Candidates are tried largest first. Returns `matched[axis] = column`.
fn perfect_matching(b: &Matrix, floor: f64) -> Option<Vec<usize>> {
    let n = b.rows();
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut cols: Vec<usize> = (0..n).filter(|&c| b[(a, c)].abs() > floor).collect();
        cols.sort_by(|&p, &q| b[(a, q)].abs().partial_cmp(&b[(a, p)].abs()).unwrap());
        candidates.push(cols);
    }
    fn augment(
        a: usize,
        candidates: &[Vec<usize>],
        owner: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &c in &candidates[a] {
            if visited[c] {
                continue;
            }
            visited[c] = true;
            if owner[c].is_none() || augment(owner[c].unwrap(), candidates, owner, visited) {
                owner[c] = Some(a);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for a in 0..n {
        let mut visited = vec![false; n];
        if !augment(a, &candidates, &mut owner, &mut visited) {
            return None;
        }
    }
    let mut matched = vec![0usize; n];
    for (c, o) in owner.iter().enumerate() {
        matched[(*o)?] = c;
    }
    Some(matched)
}

/// Ambient-dimension cap for the exhaustive diagonal-Gram search.
pub const DIAGONAL_SEARCH_MAX_DIM: usize = 16;

/// Searches every k-subset of coordinates for one whose induced
/// projection onto `w` has an exactly diagonal Gram matrix, i.e. whose
/// forced spanning vectors are pairwise orthogonal.
///
/// Subsets are visited in lexicographic order and the first feasible one
/// wins, so the result is deterministic. Returns `Ok(None)` when no
/// coordinate nullspace diagonalizes the Gram matrix (many subspaces
/// admit none). Ambient dimensions above [`DIAGONAL_SEARCH_MAX_DIM`] are
/// refused with `SearchTooLarge`; use [`diagonal_gram_search_limited`] to
/// move the cap deliberately.
pub fn diagonal_gram_search(
    w: &Subspace,
    tol: &Tolerances,
) -> Result<Option<(Vec<usize>, ObliqueProjection)>> {
    diagonal_gram_search_limited(w, DIAGONAL_SEARCH_MAX_DIM, tol)
}

/// [`diagonal_gram_search`] with an explicit ambient-dimension cap. The
/// search is exhaustive over subsets, hence exponential in the ambient
/// dimension; raising the cap is a conscious trade.
pub fn diagonal_gram_search_limited(
    w: &Subspace,
    max_dim: usize,
    tol: &Tolerances,
) -> Result<Option<(Vec<usize>, ObliqueProjection)>> {
    let n = w.ambient();
    let k = w.dim();
    if n > max_dim {
        return Err(Error::SearchTooLarge { dim: n, max: max_dim });
    }
    let q = w.orthonormalize(tol)?;
    for kept in Combinations::new(n, k) {
        let qk = q.select_rows(&kept);
        // Invertibility of the kept rows, judged on singular values.
        let (eigs, _) = linalg::symmetric_eigendecomposition(&qk.gramian(), tol)?;
        if eigs[0] <= tol.rank * tol.rank {
            continue;
        }
        let xt = match linalg::solve_linear(&qk.transpose(), &q.transpose(), tol) {
            Ok(xt) => xt,
            Err(Error::Singular) => continue,
            Err(e) => return Err(e),
        };
        let forced = xt.transpose();
        let mut ok = true;
        'pairs: for a in 0..k {
            for b in (a + 1)..k {
                let xa = forced.col(a);
                let xb = forced.col(b);
                let bound = tol.eq * (norm(&xa) * norm(&xb)).max(1.0);
                if dot(&xa, &xb).abs() > bound {
                    ok = false;
                    break 'pairs;
                }
            }
        }
        if ok {
            let p = coordinate_nullspace_projection(w, &kept, tol)?;
            return Ok(Some((kept, p)));
        }
    }
    Ok(None)
}

/// Dimension of the coordinate restriction of `w`: the rank of the kept
/// rows of an orthonormal basis. A kept set can induce a projection with
/// Gram support on it only when this equals `dim w`.
pub fn restricted_dimension(w: &Subspace, kept: &[usize], tol: &Tolerances) -> Result<usize> {
    let n = w.ambient();
    let mut seen = vec![false; n];
    for &i in kept {
        if i >= n || seen[i] {
            return Err(Error::BadIndexSet);
        }
        seen[i] = true;
    }
    if kept.is_empty() {
        return Ok(0);
    }
    Ok(linalg::rank(&w.orthonormalize(tol)?.select_rows(kept), tol))
}

/// Lexicographic k-subsets of `0..n`.
struct Combinations {
    n: usize,
    k: usize,
    next: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        let next = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, k, next }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        if self.k > 0 {
            let mut succ = current.clone();
            let mut i = self.k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if succ[i] < self.n - self.k + i {
                    succ[i] += 1;
                    for j in (i + 1)..self.k {
                        succ[j] = succ[j - 1] + 1;
                    }
                    self.next = Some(succ);
                    break;
                }
            }
        }
        Some(current)
    }
}

/// Builds a projection whose Gram matrix is diagonal with the prescribed
/// entries on `kept` axes (and zero elsewhere), by tilting each kept axis
/// into its own complementary coordinate.
///
/// Every entry must be at least one (`BadEntry`): a projection's column
/// at a kept axis keeps its unit coordinate, so its squared norm starts
/// at one. Only `N - k` axes can carry a tilt, because tilts need
/// pairwise-orthogonal room in the complement. When `adjustable` is
/// `None`, the axes with entries above one claim slots in ascending
/// order; passing an explicit set of positions (indices into `kept`)
/// pins which axes may differ from one and which complement coordinate
/// each one consumes. Entries above one outside the adjustable set, or
/// more adjustable positions than there is room for, fail with
/// `InfeasibleEntries { allowed: N - k }`.
pub fn prescribed_diagonal(
    n: usize,
    kept: &[usize],
    entries: &[f64],
    adjustable: Option<&[usize]>,
    tol: &Tolerances,
) -> Result<(Subspace, ObliqueProjection)> {
    coordinate_subspace(n, kept)?;
    let k = kept.len();
    if entries.len() != k {
        return Err(Error::DimensionMismatch { expected: k, got: entries.len() });
    }
    for (i, &a) in entries.iter().enumerate() {
        if !a.is_finite() || a < 1.0 {
            return Err(Error::BadEntry { index: i });
        }
    }
    let allowed = n - k;
    let adjustable: Vec<usize> = match adjustable {
        Some(list) => {
            let mut seen = vec![false; k];
            for &p in list {
                if p >= k || seen[p] {
                    return Err(Error::BadIndexSet);
                }
                seen[p] = true;
            }
            let mut list = list.to_vec();
            list.sort_unstable();
            list
        }
        None => (0..k).filter(|&i| entries[i] > 1.0).collect(),
    };
    if adjustable.len() > allowed {
        return Err(Error::InfeasibleEntries { allowed });
    }
    for (i, &a) in entries.iter().enumerate() {
        if a > 1.0 + tol.eq && !adjustable.contains(&i) {
            return Err(Error::InfeasibleEntries { allowed });
        }
    }
    let comp: Vec<usize> = (0..n).filter(|i| !kept.contains(i)).collect();
    let mut tilts = vec![vec![0.0; n]; k];
    for (slot, &pos) in adjustable.iter().enumerate() {
        let extra = entries[pos] - 1.0;
        if extra > 0.0 {
            tilts[pos][comp[slot]] = sqrt(extra);
        }
    }
    crate::projection::tilted_axes_projection(n, kept, &tilts, tol)
}

/// A family of projections sharing one range, built to make the frame
/// operator as flat as possible.
#[derive(Clone, Debug)]
pub struct TightFamily {
    subspace: Subspace,
    projections: Vec<ObliqueProjection>,
    constant: Option<f64>,
    achieved_spectrum: Vec<f64>,
}

impl TightFamily {
    /// The common range of every member.
    #[inline]
    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    #[inline]
    pub fn projections(&self) -> &[ObliqueProjection] {
        &self.projections
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.projections.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    /// The frame constant when the achieved spectrum is flat, `None`
    /// when the construction provably cannot reach tightness.
    #[inline]
    pub fn constant(&self) -> Option<f64> {
        self.constant
    }

    /// Eigenvalues of the achieved frame operator, ascending.
    #[inline]
    pub fn achieved_spectrum(&self) -> &[f64] {
        &self.achieved_spectrum
    }

    /// The family as an unweighted fusion frame.
    pub fn to_fusion_frame(&self) -> Result<FusionFrame> {
        FusionFrame::unweighted(self.projections.clone())
    }
}

/// Diagnoses the family's operator and packages it up.
fn finalize_family(
    subspace: Subspace,
    projections: Vec<ObliqueProjection>,
    tol: &Tolerances,
) -> Result<TightFamily> {
    let frame = FusionFrame::unweighted(projections.clone())?;
    let (eigs, _) = linalg::symmetric_eigendecomposition(&frame.frame_operator(), tol)?;
    let (lo, hi) = (eigs[0], eigs[eigs.len() - 1]);
    let constant = if lo > tol.eig && (hi - lo) <= TIGHT_RELATIVE_GAP * hi {
        Some(0.5 * (lo + hi))
    } else {
        None
    };
    Ok(TightFamily { subspace, projections, constant, achieved_spectrum: eigs })
}

/// The orthogonal matrix sending `from` onto `to` (and the complement
/// onto the complement). Both must have equal ambient and dimension.
fn orthogonal_map(from: &Subspace, to: &Subspace, tol: &Tolerances) -> Result<Matrix> {
    let n = from.ambient();
    let qf = from.orthonormalize(tol)?;
    let qt = to.orthonormalize(tol)?;
    if from.dim() == n {
        return Ok(qt.mul(&qf.transpose()));
    }
    let cf = from.orthogonal_complement(tol)?;
    let ct = to.orthogonal_complement(tol)?;
    let full_f = qf.hstack(cf.basis());
    let full_t = qt.hstack(ct.basis());
    Ok(full_t.mul(&full_f.transpose()))
}

/// Conjugates every member of a canonical family by the orthogonal map
/// carrying its subspace onto `w`; tightness is preserved exactly.
fn transported(family: TightFamily, w: &Subspace, tol: &Tolerances) -> Result<TightFamily> {
    let u = orthogonal_map(&family.subspace, w, tol)?;
    let mut projections = Vec::with_capacity(family.projections.len());
    for p in &family.projections {
        let moved = u.mul(p.matrix()).mul(&u.transpose());
        let nullspace = match p.nullspace() {
            None => None,
            Some(ns) => Some(Subspace::new(u.mul(ns.basis()), tol)?),
        };
        projections.push(assemble(moved, w.clone(), nullspace, tol)?);
    }
    finalize_family(w.clone(), projections, tol)
}

/// Two projections with range `w` whose Gram matrices sum to exactly
/// `2 I`, giving a tight fusion frame with constant 2. Possible exactly
/// when `2 dim w >= N` (`DimensionTooSmall` otherwise): the two
/// coordinate nullspaces must avoid each other.
pub fn tight_pair(w: &Subspace, tol: &Tolerances) -> Result<TightFamily> {
    let n = w.ambient();
    let k = w.dim();
    if 2 * k < n {
        return Err(Error::DimensionTooSmall);
    }
    // Canonical model: k basis vectors, the first n - k of them bridging
    // coordinate i to coordinate k + i, the rest plain axes.
    let mut basis = Matrix::zeros(n, k);
    for i in 0..k {
        basis[(i, i)] = 1.0;
        if i < n - k {
            basis[(k + i, i)] = 1.0;
        }
    }
    let canonical = Subspace::new(basis, tol)?;
    let front: Vec<usize> = (0..k).collect();
    let back: Vec<usize> = (n - k..n).collect();
    let p1 = coordinate_nullspace_projection(&canonical, &front, tol)?;
    let p2 = coordinate_nullspace_projection(&canonical, &back, tol)?;
    let family = finalize_family(canonical, vec![p1, p2], tol)?;
    transported(family, w, tol)
}

/// `levels` projections onto the chain subspace of `R^{k * levels}`
/// (basis vector i touches coordinate i of every block), one per
/// coordinate block. The Gram matrices are each `levels * I` on their
/// block, so the operator is exactly `levels * I`.
pub fn tight_chain(k: usize, levels: usize, tol: &Tolerances) -> Result<TightFamily> {
    if k == 0 || levels == 0 {
        return Err(Error::DimensionTooSmall);
    }
    let n = k * levels;
    let mut basis = Matrix::zeros(n, k);
    for i in 0..k {
        for j in 0..levels {
            basis[(j * k + i, i)] = 1.0;
        }
    }
    let w = Subspace::new(basis, tol)?;
    let mut projections = Vec::with_capacity(levels);
    for j in 0..levels {
        let block: Vec<usize> = (j * k..(j + 1) * k).collect();
        projections.push(coordinate_nullspace_projection(&w, &block, tol)?);
    }
    finalize_family(w, projections, tol)
}

/// [`tight_chain`] transported onto an arbitrary subspace whose dimension
/// divides the ambient dimension; the member count `N / k` meets the
/// lower bound of [`minimal_member_count`].
pub fn tight_chain_general(w: &Subspace, tol: &Tolerances) -> Result<TightFamily> {
    let n = w.ambient();
    let k = w.dim();
    if !n.is_multiple_of(k) {
        return Err(Error::DimensionMismatch { expected: n - n % k, got: n });
    }
    let family = tight_chain(k, n / k, tol)?;
    transported(family, w, tol)
}

/// Chain construction for `N = k * levels + residue` with
/// `0 < residue < k`: the first `residue` chains gain one extra
/// coordinate in the tail, and an extra `levels + 1`-th projection covers
/// the tail together with the leftover of the last block.
///
/// The operator is diagonal but generally not flat: `levels + 1` on the
/// long chains' coordinates, `levels` on the short chains' earlier
/// blocks, and `2 * levels` where the last two members overlap. It
/// collapses to a tight family exactly at `levels = 1`.
pub fn residual_chain(
    k: usize,
    levels: usize,
    residue: usize,
    tol: &Tolerances,
) -> Result<TightFamily> {
    if k == 0 || levels == 0 || residue == 0 || residue >= k {
        return Err(Error::DimensionTooSmall);
    }
    let n = k * levels + residue;
    let mut basis = Matrix::zeros(n, k);
    for i in 0..k {
        for j in 0..levels {
            basis[(j * k + i, i)] = 1.0;
        }
        if i < residue {
            basis[(k * levels + i, i)] = 1.0;
        }
    }
    let w = Subspace::new(basis, tol)?;
    let mut projections = Vec::with_capacity(levels + 1);
    for j in 0..levels {
        let block: Vec<usize> = (j * k..(j + 1) * k).collect();
        projections.push(coordinate_nullspace_projection(&w, &block, tol)?);
    }
    let mut tail: Vec<usize> = ((levels - 1) * k + residue..levels * k).collect();
    tail.extend(k * levels..n);
    projections.push(coordinate_nullspace_projection(&w, &tail, tol)?);
    finalize_family(w, projections, tol)
}

/// No tight family of k-dimensional projections on `R^n` has fewer than
/// `ceil(n / k)` members; the chain constructions meet this exactly.
pub fn minimal_member_count(n: usize, k: usize) -> usize {
    n.div_ceil(k)
}
