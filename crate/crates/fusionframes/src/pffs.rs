//! Perturbed frames of a subspace: measurement families that stay exact
//! on the subspace while their vectors leave it.
//!
//! Start from a frame `{w_n}` of a subspace W and push each vector out of
//! W by a perturbation `z_n` orthogonal to W. Signals in W cannot tell
//! the difference: `<f, w_n + z_n> = <f, w_n>` for every `f` in W, so the
//! perturbed measurements still reconstruct W-signals exactly through the
//! canonical duals of the unperturbed frame. Off the subspace the family
//! acts obliquely: the reconstruction operator is an idempotent with
//! range W whose nullspace is steered by the perturbations. This is the
//! second road (besides direct construction) to every oblique projection
//! in this crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::matrix::{dot, norm, Matrix};
use crate::projection::{assemble, ObliqueProjection};
use crate::scalar::sqrt;
use crate::subspace::Subspace;
use crate::{Error, Result, Tolerances};

/// Canonical dual family of a frame of the subspace `w`: the vectors
/// `y_n` in W with `sum <f, x_n> y_n = f` for every `f` in W, of minimal
/// norm among all such families.
///
/// The vectors must lie in W and span it; `NotAFrameOfSubspace`
/// otherwise. For a single spanning vector this reduces to `x / |x|^2`.
pub fn canonical_duals(
    w: &Subspace,
    vectors: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<Vec<Vec<f64>>> {
    if vectors.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = w.ambient();
    let mat = Matrix::from_cols(vectors)?;
    if mat.rows() != n {
        return Err(Error::DimensionMismatch { expected: n, got: mat.rows() });
    }
    for v in vectors {
        if !w.contains(v, tol)? {
            return Err(Error::NotAFrameOfSubspace);
        }
    }
    let q = w.orthonormalize(tol)?;
    // Coefficients in the orthonormal basis, their Gram, and its inverse
    // applied back: duals = Q G^{-1} A.
    let a = q.transpose().mul(&mat);
    let g = a.mul(&a.transpose());
    let (eigs, _) = linalg::symmetric_eigendecomposition(&g, tol)?;
    if eigs[0] <= tol.eig {
        return Err(Error::NotAFrameOfSubspace);
    }
    let solved = linalg::solve_linear(&g, &a, tol)?;
    let duals = q.mul(&solved);
    Ok((0..vectors.len()).map(|j| duals.col(j)).collect())
}

/// Perturbations of the graph form `z_n = map (Q' w_n)`: one linear map
/// applied to each vector's coordinates, guaranteeing that the perturbed
/// span keeps the subspace dimension. The map's columns must be
/// orthogonal to `w` (`PerturbationNotOrthogonal` names the offending
/// column).
pub fn steered_perturbations(
    w: &Subspace,
    vectors: &[Vec<f64>],
    map: &Matrix,
    tol: &Tolerances,
) -> Result<Vec<Vec<f64>>> {
    let n = w.ambient();
    let k = w.dim();
    if map.rows() != n || map.cols() != k {
        return Err(Error::DimensionMismatch { expected: n * k, got: map.rows() * map.cols() });
    }
    let q = w.orthonormalize(tol)?;
    for j in 0..k {
        let col = map.col(j);
        let lifted = q.tr_mul_vec(&col);
        if crate::matrix::max_abs(&lifted) > tol.eq * norm(&col).max(1.0) {
            return Err(Error::PerturbationNotOrthogonal { index: j });
        }
    }
    let mut out = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.len() });
        }
        out.push(map.mul_vec(&q.tr_mul_vec(v)));
    }
    Ok(out)
}

/// How the perturbed measurements treat one signal.
#[derive(Clone, Debug)]
pub struct MeasurementReport {
    /// Whether the signal lies in the subspace (where measurements are
    /// exact).
    pub in_subspace: bool,
    /// `<f, x_n> - <f, w_n> = <f, z_n>` per member.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
}

/// Residuals of the defining identities of a perturbed frame system,
/// each maximized over an orthonormal basis of the subspace.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    /// `|f - sum <f, x_n> pi(y_n)|`: reconstruction inside the subspace.
    pub dual_reconstruction: f64,
    /// `|sum <f, x_n> (I - pi)(y_n)|`: the out-of-subspace parts of the
    /// duals must cancel against the measurements.
    pub residual_annihilation: f64,
    /// `|Y X' f - f|`: the combined operator restricted to the subspace.
    pub subspace_identity: f64,
}

impl ValidationReport {
    pub fn passes(&self, eps: f64) -> bool {
        self.dual_reconstruction <= eps
            && self.residual_annihilation <= eps
            && self.subspace_identity <= eps
    }
}

/// A frame of a subspace together with orthogonal perturbations and the
/// reconstruction machinery they induce.
#[derive(Clone, Debug)]
pub struct PffsSystem {
    subspace: Subspace,
    true_vectors: Vec<Vec<f64>>,
    perturbations: Vec<Vec<f64>>,
    analysis_vectors: Vec<Vec<f64>>,
    duals: Vec<Vec<f64>>,
    projection: ObliqueProjection,
}

impl PffsSystem {
    /// Validates and assembles a system from a frame `{w_n}` of `w` and
    /// perturbations `{z_n}` orthogonal to `w`.
    ///
    /// The reconstruction operator `f -> sum <f, w_n + z_n> y_n` (with
    /// `y_n` the canonical duals of the unperturbed frame) is always an
    /// idempotent with range `w`; its nullspace is the orthogonal
    /// complement of the perturbed span when that span keeps dimension
    /// `dim w`, and is read off the operator itself when the
    /// perturbations enlarge it.
    pub fn new(
        w: &Subspace,
        true_vectors: &[Vec<f64>],
        perturbations: &[Vec<f64>],
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = w.ambient();
        let k = w.dim();
        if true_vectors.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if perturbations.len() != true_vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: true_vectors.len(),
                got: perturbations.len(),
            });
        }
        let q = w.orthonormalize(tol)?;
        for (i, z) in perturbations.iter().enumerate() {
            if z.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: z.len() });
            }
            if !z.iter().all(|x| x.is_finite()) {
                return Err(Error::NonFinite);
            }
            let lifted = q.tr_mul_vec(z);
            if crate::matrix::max_abs(&lifted) > tol.eq * norm(z).max(1.0) {
                return Err(Error::PerturbationNotOrthogonal { index: i });
            }
        }
        let duals = canonical_duals(w, true_vectors, tol)?;
        let analysis_vectors: Vec<Vec<f64>> = true_vectors
            .iter()
            .zip(perturbations)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
            .collect();

        let x = Matrix::from_cols(&analysis_vectors)?;
        let r = linalg::rank(&x, tol);
        let (_, order) = linalg::pivoted_column_norms(&x);
        let mut span_cols = order[..r].to_vec();
        span_cols.sort_unstable();
        let ux = linalg::mgs(&x.select_cols(&span_cols), tol)?;
        // The perturbed span must stay at a positive angle from the
        // subspace or reconstruction collapses.
        let cross = ux.transpose().mul(&q);
        let (angles, _) = linalg::symmetric_eigendecomposition(&cross.gramian(), tol)?;
        if sqrt(angles[0].max(0.0)) <= tol.eig {
            return Err(Error::DegenerateDirection);
        }

        let y = Matrix::from_cols(&duals)?;
        let p = y.mul(&x.transpose());
        let nullspace = if k == n {
            None
        } else if r == k {
            Some(Subspace::new(ux, tol)?.orthogonal_complement(tol)?)
        } else {
            let complement = Matrix::identity(n).sub(&p);
            let (_, order) = linalg::pivoted_column_norms(&complement);
            let mut cols = order[..n - k].to_vec();
            cols.sort_unstable();
            Some(Subspace::new(complement.select_cols(&cols), tol)?)
        };
        let projection = assemble(p, w.clone(), nullspace, tol)?;

        Ok(PffsSystem {
            subspace: w.clone(),
            true_vectors: true_vectors.to_vec(),
            perturbations: perturbations.to_vec(),
            analysis_vectors,
            duals,
            projection,
        })
    }

    #[inline]
    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    #[inline]
    pub fn true_vectors(&self) -> &[Vec<f64>] {
        &self.true_vectors
    }

    #[inline]
    pub fn perturbations(&self) -> &[Vec<f64>] {
        &self.perturbations
    }

    /// The vectors actually measured against: `x_n = w_n + z_n`.
    #[inline]
    pub fn analysis_vectors(&self) -> &[Vec<f64>] {
        &self.analysis_vectors
    }

    /// Canonical duals of the unperturbed frame, all inside the
    /// subspace.
    #[inline]
    pub fn duals(&self) -> &[Vec<f64>] {
        &self.duals
    }

    /// The induced reconstruction operator as a projection.
    #[inline]
    pub fn projection(&self) -> &ObliqueProjection {
        &self.projection
    }

    /// `P' P` assembled from the factors `P = Y X'`.
    pub fn operator_matrix(&self) -> Matrix {
        let x = Matrix::from_cols(&self.analysis_vectors).expect("validated at construction");
        let y = Matrix::from_cols(&self.duals).expect("validated at construction");
        x.mul(&y.gramian()).mul(&x.transpose())
    }

    /// The measurements `<f, x_n>`.
    pub fn measure(&self, f: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.subspace.ambient() {
            return Err(Error::DimensionMismatch {
                expected: self.subspace.ambient(),
                got: f.len(),
            });
        }
        Ok(self.analysis_vectors.iter().map(|x| dot(f, x)).collect())
    }

    /// Reconstruction from raw measurements: `sum c_n y_n`. Lands in the
    /// subspace; equals `f` exactly when `f` was in it.
    pub fn reconstruct(&self, measurements: &[f64]) -> Result<Vec<f64>> {
        if measurements.len() != self.duals.len() {
            return Err(Error::DimensionMismatch {
                expected: self.duals.len(),
                got: measurements.len(),
            });
        }
        let n = self.subspace.ambient();
        let mut out = vec![0.0; n];
        for (c, y) in measurements.iter().zip(&self.duals) {
            for (o, v) in out.iter_mut().zip(y) {
                *o += c * v;
            }
        }
        Ok(out)
    }

    /// How measuring `f` through the perturbed vectors deviates from
    /// measuring through the true ones. Zero on the subspace.
    pub fn consistency(&self, f: &[f64], tol: &Tolerances) -> Result<MeasurementReport> {
        let n = self.subspace.ambient();
        if f.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: f.len() });
        }
        let deviations: Vec<f64> = self.perturbations.iter().map(|z| dot(f, z)).collect();
        let max_deviation = crate::matrix::max_abs(&deviations);
        Ok(MeasurementReport {
            in_subspace: self.subspace.contains(f, tol)?,
            deviations,
            max_deviation,
        })
    }

    /// Checks the defining identities against a candidate dual family
    /// (columns of `duals`), or against the system's own duals when
    /// `None`. Candidates may stick out of the subspace; the report
    /// separates in-subspace reconstruction from the required
    /// cancellation of the out-of-subspace parts.
    pub fn validate(&self, duals: Option<&Matrix>, tol: &Tolerances) -> Result<ValidationReport> {
        let n = self.subspace.ambient();
        let m = self.analysis_vectors.len();
        let own = Matrix::from_cols(&self.duals).expect("validated at construction");
        let y = duals.unwrap_or(&own);
        if y.rows() != n || y.cols() != m {
            return Err(Error::DimensionMismatch { expected: n * m, got: y.rows() * y.cols() });
        }
        let q = self.subspace.orthonormalize(tol)?;
        let pi = q.mul(&q.transpose());
        let y_in = pi.mul(y);
        let y_out = y.sub(&y_in);
        let x = Matrix::from_cols(&self.analysis_vectors).expect("validated at construction");

        let mut dual_reconstruction = 0.0f64;
        let mut residual_annihilation = 0.0f64;
        let mut subspace_identity = 0.0f64;
        for i in 0..self.subspace.dim() {
            let f = q.col(i);
            let c = x.tr_mul_vec(&f);
            let rec = y_in.mul_vec(&c);
            let diff: Vec<f64> = rec.iter().zip(&f).map(|(a, b)| a - b).collect();
            dual_reconstruction = dual_reconstruction.max(norm(&diff));
            residual_annihilation = residual_annihilation.max(norm(&y_out.mul_vec(&c)));
            let full = y.mul_vec(&c);
            let diff: Vec<f64> = full.iter().zip(&f).map(|(a, b)| a - b).collect();
            subspace_identity = subspace_identity.max(norm(&diff));
        }
        Ok(ValidationReport { dual_reconstruction, residual_annihilation, subspace_identity })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::coordinate_subspace;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn balance_plane() -> Subspace {
        Subspace::from_cols(&[vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]], &tol()).unwrap()
    }

    #[test]
    fn duals_reconstruct_on_the_subspace() {
        let w = balance_plane();
        let frame = vec![
            vec![1.0, 0.0, -1.0],
            vec![0.0, 1.0, -1.0],
            vec![1.0, 1.0, -2.0],
        ];
        let duals = canonical_duals(&w, &frame, &tol()).unwrap();
        for y in &duals {
            assert!(w.contains(y, &tol()).unwrap());
        }
        let q = w.orthonormalize(&tol()).unwrap();
        for i in 0..2 {
            let f = q.col(i);
            let mut rec = vec![0.0; 3];
            for (x, y) in frame.iter().zip(&duals) {
                let c = dot(&f, x);
                for (r, v) in rec.iter_mut().zip(y) {
                    *r += c * v;
                }
            }
            for (a, b) in rec.iter().zip(&f) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn single_vector_dual_is_normalized() {
        let w = Subspace::from_cols(&[vec![0.0, 3.0, 4.0]], &tol()).unwrap();
        let duals = canonical_duals(&w, &[vec![0.0, 3.0, 4.0]], &tol()).unwrap();
        // x / |x|^2 with |x|^2 = 25.
        assert!((duals[0][1] - 0.12).abs() < 1e-12);
        assert!((duals[0][2] - 0.16).abs() < 1e-12);
    }

    #[test]
    fn duals_reject_foreign_and_deficient_families() {
        let w = balance_plane();
        assert_eq!(
            canonical_duals(&w, &[vec![1.0, 0.0, 0.0]], &tol()).unwrap_err(),
            Error::NotAFrameOfSubspace
        );
        // In W but spanning only a line of it.
        let thin = vec![vec![1.0, 0.0, -1.0], vec![2.0, 0.0, -2.0]];
        assert_eq!(
            canonical_duals(&w, &thin, &tol()).unwrap_err(),
            Error::NotAFrameOfSubspace
        );
    }

    #[test]
    fn steering_reproduces_the_balance_projection() {
        // Perturbing along the blind direction (1,1,1) steers the
        // nullspace onto the first axis.
        let w = balance_plane();
        let frame = vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]];
        let perturbations = vec![vec![-1.0, -1.0, -1.0], vec![0.0, 0.0, 0.0]];
        let sys = PffsSystem::new(&w, &frame, &perturbations, &tol()).unwrap();
        let expect = Matrix::from_rows(&[
            vec![0.0, -1.0, -1.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!(sys.projection().matrix().max_abs_diff(&expect) < 1e-10);
        let ns = sys.projection().nullspace().unwrap();
        assert!(ns.span_equals(&coordinate_subspace(3, &[0]).unwrap(), &tol()).unwrap());
        assert!(sys.validate(None, &tol()).unwrap().passes(1e-10));
    }

    #[test]
    fn rank_one_system_matches_its_formula() {
        // W = span{x}; perturbing the normalized dual so the analysis
        // vector collapses onto one axis.
        let x = [1.0, 2.0, 2.0];
        let nsq = 9.0;
        let w = Subspace::from_cols(&[x.to_vec()], &tol()).unwrap();
        let true_vec = vec![x.iter().map(|v| v / nsq).collect::<Vec<f64>>()];
        let z: Vec<f64> = (0..3)
            .map(|j| if j == 0 { (nsq - x[0] * x[0]) / (x[0] * nsq) } else { -x[j] / nsq })
            .collect();
        let sys = PffsSystem::new(&w, &true_vec, &[z], &tol()).unwrap();
        // Measured vector degenerates to e0 / x0.
        let a = &sys.analysis_vectors()[0];
        assert!((a[0] - 1.0).abs() < 1e-12);
        assert!(a[1].abs() < 1e-12);
        assert!(a[2].abs() < 1e-12);
        // Projection sends e0 to the whole direction, kills e1 and e2.
        let p = sys.projection().matrix();
        for i in 0..3 {
            assert!((p[(i, 0)] - x[i]).abs() < 1e-12);
            assert!(p[(i, 1)].abs() < 1e-12);
            assert!(p[(i, 2)].abs() < 1e-12);
        }
        assert!(sys.validate(None, &tol()).unwrap().passes(1e-10));
    }

    #[test]
    fn measurements_exact_inside_deviating_outside() {
        let w = balance_plane();
        let frame = vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]];
        let perturbations = vec![vec![2.0, 2.0, 2.0], vec![-1.0, -1.0, -1.0]];
        let sys = PffsSystem::new(&w, &frame, &perturbations, &tol()).unwrap();

        let inside = [1.0, 1.0, -2.0];
        let r = sys.consistency(&inside, &tol()).unwrap();
        assert!(r.in_subspace);
        assert!(r.max_deviation < 1e-12);
        let m = sys.measure(&inside).unwrap();
        let back = sys.reconstruct(&m).unwrap();
        for (a, b) in back.iter().zip(&inside) {
            assert!((a - b).abs() < 1e-10);
        }

        let outside = [1.0, 0.0, 0.0];
        let r = sys.consistency(&outside, &tol()).unwrap();
        assert!(!r.in_subspace);
        assert!((r.deviations[0] - 2.0).abs() < 1e-12);
        assert!((r.deviations[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn graph_perturbations_keep_dimension() {
        let w = balance_plane();
        let frame = vec![
            vec![1.0, 0.0, -1.0],
            vec![0.0, 1.0, -1.0],
            vec![1.0, -1.0, 0.0],
        ];
        let root3 = 3.0f64.sqrt();
        let map = Matrix::from_cols(&[
            vec![1.0 / root3, 1.0 / root3, 1.0 / root3],
            vec![-0.5 / root3, -0.5 / root3, -0.5 / root3],
        ])
        .unwrap();
        let z = steered_perturbations(&w, &frame, &map, &tol()).unwrap();
        let sys = PffsSystem::new(&w, &frame, &z, &tol()).unwrap();
        assert_eq!(sys.projection().nullspace().unwrap().dim(), 1);
        assert!(sys.validate(None, &tol()).unwrap().passes(1e-9));
        let report = sys.projection().gram();
        assert_eq!(report.matrix().rows(), 3);
    }

    #[test]
    fn steering_map_columns_must_leave_the_subspace() {
        let w = balance_plane();
        let map = Matrix::from_cols(&[
            vec![1.0, 1.0, 1.0],
            vec![1.0, 0.0, -1.0], // inside W
        ])
        .unwrap();
        assert_eq!(
            steered_perturbations(&w, &[vec![1.0, 0.0, -1.0]], &map, &tol()).unwrap_err(),
            Error::PerturbationNotOrthogonal { index: 1 }
        );
    }

    #[test]
    fn perturbations_must_be_orthogonal_to_the_subspace() {
        let w = balance_plane();
        let frame = vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]];
        let bad = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, -1.0]];
        assert_eq!(
            PffsSystem::new(&w, &frame, &bad, &tol()).unwrap_err(),
            Error::PerturbationNotOrthogonal { index: 1 }
        );
    }

    #[test]
    fn widened_span_still_projects_onto_subspace() {
        // Three vectors spanning a plane, perturbed into general
        // position: the perturbed span has dimension 3 > 2, and the
        // operator still projects onto W with an honest nullspace.
        let w = balance_plane();
        let frame = vec![
            vec![1.0, 0.0, -1.0],
            vec![0.0, 1.0, -1.0],
            vec![1.0, 1.0, -2.0],
        ];
        let perturbations = vec![
            vec![1.0, 1.0, 1.0],
            vec![-2.0, -2.0, -2.0],
            vec![0.5, 0.5, 0.5],
        ];
        let sys = PffsSystem::new(&w, &frame, &perturbations, &tol()).unwrap();
        let p = sys.projection();
        assert!(p.range().span_equals(&w, &tol()).unwrap());
        assert_eq!(p.nullspace().unwrap().dim(), 1);
        let pm = p.matrix();
        assert!(pm.mul(pm).max_abs_diff(pm) < 1e-10);
        assert!(sys.validate(None, &tol()).unwrap().passes(1e-9));
    }

    #[test]
    fn overwhelming_perturbation_degenerates() {
        let w = coordinate_subspace(2, &[0]).unwrap();
        let frame = vec![vec![1.0, 0.0]];
        let huge = vec![vec![0.0, 2.0e9]];
        assert_eq!(
            PffsSystem::new(&w, &frame, &huge, &tol()).unwrap_err(),
            Error::DegenerateDirection
        );
    }

    #[test]
    fn operator_matrix_matches_projection_gram() {
        let w = balance_plane();
        let frame = vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]];
        let perturbations = vec![vec![-1.0, -1.0, -1.0], vec![0.0, 0.0, 0.0]];
        let sys = PffsSystem::new(&w, &frame, &perturbations, &tol()).unwrap();
        let direct = sys.operator_matrix();
        let via_gram = sys.projection().gram();
        assert!(direct.max_abs_diff(via_gram.matrix()) < 1e-10);
    }

    #[test]
    fn validate_checks_candidate_duals() {
        let w = balance_plane();
        let frame = vec![vec![1.0, 0.0, -1.0], vec![0.0, 1.0, -1.0]];
        let perturbations = vec![vec![-1.0, -1.0, -1.0], vec![0.0, 0.0, 0.0]];
        let sys = PffsSystem::new(&w, &frame, &perturbations, &tol()).unwrap();
        // A wrong family fails loudly.
        let wrong = Matrix::from_cols(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let report = sys.validate(Some(&wrong), &tol()).unwrap();
        assert!(!report.passes(1e-6));
        // Shifting the true duals off the subspace by a vector that the
        // measurements annihilate... does not exist here, but shifted
        // duals must shrink back to the originals under projection.
        let own = Matrix::from_cols(sys.duals()).unwrap();
        let report = sys.validate(Some(&own), &tol()).unwrap();
        assert!(report.passes(1e-10));
    }
}
