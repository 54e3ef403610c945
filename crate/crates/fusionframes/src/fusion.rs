//! Weighted families of oblique projections and their frame operator.
//!
//! A family `{(P_i, v_i)}` measures a vector through the maps `f -> v_i
//! P_i f` and is recombined through the adjoints. The frame operator
//! `S = sum v_i^2 P_i' P_i` captures everything about stability: the
//! family is a fusion frame when S is positive definite, and tight when S
//! is a multiple of the identity, in which case reconstruction needs no
//! inversion at all.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::matrix::Matrix;
use crate::projection::ObliqueProjection;
use crate::{Error, Result, Tolerances};

/// Relative spectral gap under which the frame operator counts as a
/// multiple of the identity: `upper - lower <= GAP * upper`.
pub const TIGHT_RELATIVE_GAP: f64 = 1e-8;

/// One member of a fusion frame: a projection and its positive weight.
#[derive(Clone, Debug)]
pub struct WeightedProjection {
    projection: ObliqueProjection,
    weight: f64,
}

impl WeightedProjection {
    pub fn new(projection: ObliqueProjection, weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight <= 0.0 {
            return Err(Error::NonPositiveWeight);
        }
        Ok(WeightedProjection { projection, weight })
    }

    #[inline]
    pub fn projection(&self) -> &ObliqueProjection {
        &self.projection
    }

    #[inline]
    pub fn weight(&self) -> f64 {
        self.weight
    }
}

/// A finite weighted family of projections on a common ambient space.
#[derive(Clone, Debug)]
pub struct FusionFrame {
    members: Vec<WeightedProjection>,
    ambient: usize,
}

impl FusionFrame {
    pub fn new(members: Vec<WeightedProjection>) -> Result<Self> {
        let ambient = match members.first() {
            Some(m) => m.projection.ambient(),
            None => return Err(Error::EmptyFamily),
        };
        for m in &members {
            if m.projection.ambient() != ambient {
                return Err(Error::DimensionMismatch {
                    expected: ambient,
                    got: m.projection.ambient(),
                });
            }
        }
        Ok(FusionFrame { members, ambient })
    }

    /// Convenience constructor giving every projection weight one.
    pub fn unweighted(projections: Vec<ObliqueProjection>) -> Result<Self> {
        let members = projections
            .into_iter()
            .map(|p| WeightedProjection::new(p, 1.0))
            .collect::<Result<Vec<_>>>()?;
        FusionFrame::new(members)
    }

    #[inline]
    pub fn members(&self) -> &[WeightedProjection] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// `S = sum v_i^2 P_i' P_i`. Symmetric positive semidefinite.
    pub fn frame_operator(&self) -> Matrix {
        let mut s = Matrix::zeros(self.ambient, self.ambient);
        for m in &self.members {
            s.add_assign_scaled(&m.projection.matrix().gramian(), m.weight * m.weight);
        }
        s
    }

    /// Extreme eigenvalues (C, D) of the frame operator: the optimal
    /// constants in `C |f|^2 <= sum v_i^2 |P_i f|^2 <= D |f|^2`.
    pub fn frame_bounds(&self, tol: &Tolerances) -> Result<(f64, f64)> {
        let (eigs, _) = linalg::symmetric_eigendecomposition(&self.frame_operator(), tol)?;
        Ok((eigs[0], eigs[eigs.len() - 1]))
    }

    /// The measurements `v_i P_i f`, one block per member.
    pub fn analysis(&self, f: &[f64]) -> Result<Vec<Vec<f64>>> {
        if f.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, got: f.len() });
        }
        Ok(self
            .members
            .iter()
            .map(|m| {
                let mut y = m.projection.matrix().mul_vec(f);
                for x in &mut y {
                    *x *= m.weight;
                }
                y
            })
            .collect())
    }

    /// The adjoint of analysis: `sum v_i P_i' c_i`.
    pub fn synthesis(&self, coefficients: &[Vec<f64>]) -> Result<Vec<f64>> {
        if coefficients.len() != self.members.len() {
            return Err(Error::DimensionMismatch {
                expected: self.members.len(),
                got: coefficients.len(),
            });
        }
        let mut out = vec![0.0; self.ambient];
        for (m, c) in self.members.iter().zip(coefficients) {
            if c.len() != self.ambient {
                return Err(Error::DimensionMismatch { expected: self.ambient, got: c.len() });
            }
            let back = m.projection.matrix().tr_mul_vec(c);
            for (o, b) in out.iter_mut().zip(back) {
                *o += m.weight * b;
            }
        }
        Ok(out)
    }

    /// Recovers f from its measurements by applying `S^{-1}` to the
    /// synthesis of the coefficients. Fails with `NotAFrame` when the
    /// lower frame bound is not positive.
    pub fn reconstruct(&self, coefficients: &[Vec<f64>], tol: &Tolerances) -> Result<Vec<f64>> {
        let (eigs, vecs) = linalg::symmetric_eigendecomposition(&self.frame_operator(), tol)?;
        if eigs[0] <= tol.eig {
            return Err(Error::NotAFrame);
        }
        let mixed = self.synthesis(coefficients)?;
        // S^{-1} x = V diag(1/lambda) V' x
        let mut coords = vecs.tr_mul_vec(&mixed);
        for (c, l) in coords.iter_mut().zip(&eigs) {
            *c /= l;
        }
        Ok(vecs.mul_vec(&coords))
    }

    /// Full structural diagnosis of the frame operator.
    pub fn structure_report(&self, tol: &Tolerances) -> Result<OperatorReport> {
        let s = self.frame_operator();
        let (eigs, _) = linalg::symmetric_eigendecomposition(&s, tol)?;
        let lower = eigs[0];
        let upper = eigs[eigs.len() - 1];
        let is_frame = lower > tol.eig;
        let is_tight = is_frame && (upper - lower) <= TIGHT_RELATIVE_GAP * upper;
        let tight_constant = if is_tight { Some(0.5 * (lower + upper)) } else { None };

        let n = self.ambient;
        let mut nnz = 0;
        let mut max_offdiag = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let x = s[(i, j)].abs();
                if x > tol.eq {
                    nnz += 1;
                }
                if i != j {
                    max_offdiag = max_offdiag.max(x);
                }
            }
        }
        let is_diagonal = max_offdiag <= tol.eq;
        let is_identity_multiple = is_diagonal && {
            let c = s.trace() / n as f64;
            (0..n).all(|i| (s[(i, i)] - c).abs() <= tol.eq)
        };
        let block_pattern = coupling_components(&s, tol.eq);

        Ok(OperatorReport {
            operator: s,
            lower,
            upper,
            is_frame,
            is_tight,
            tight_constant,
            is_diagonal,
            is_identity_multiple,
            nnz,
            block_pattern,
        })
    }
}

/// Structural summary of a frame operator.
#[derive(Clone, Debug)]
pub struct OperatorReport {
    /// The frame operator itself.
    pub operator: Matrix,
    /// Smallest eigenvalue (optimal lower bound).
    pub lower: f64,
    /// Largest eigenvalue (optimal upper bound).
    pub upper: f64,
    /// Whether the lower bound is positive at the tolerance.
    pub is_frame: bool,
    /// Whether the spectrum collapses to one value (relative gap).
    pub is_tight: bool,
    /// Midpoint of the spectrum when tight, `None` otherwise.
    pub tight_constant: Option<f64>,
    /// No off-diagonal entry above the equality tolerance.
    pub is_diagonal: bool,
    /// Diagonal with all entries equal at the tolerance.
    pub is_identity_multiple: bool,
    /// Entries above the equality tolerance in magnitude.
    pub nnz: usize,
    /// Component label per coordinate: coordinates i and j share a label
    /// exactly when they are connected through nonzero off-diagonal
    /// entries. Labels are numbered by first appearance.
    pub block_pattern: Vec<usize>,
}

/// Connected components of the coupling graph of a symmetric matrix:
/// i ~ j when `|m[i][j]| > threshold`, labels in first-appearance order.
fn coupling_components(m: &Matrix, threshold: f64) -> Vec<usize> {
    let n = m.rows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if m[(i, j)].abs() > threshold {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let r = find(&mut parent, i);
        if label[r] == usize::MAX {
            label[r] = next;
            next += 1;
        }
        out.push(label[r]);
    }
    out
}
