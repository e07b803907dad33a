//! The symmetrized eigenproblem. With `A = W S = L L^T`, the matrix
//! `M = L^{-1} (A K*) L^{-T} = L^T K* L^{-T}` is similar to `K*` and symmetric up to
//! the Plemelj defect `A K* - (A K*)^T`; its symmetric part is diagonalized.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::OperatorMatrices;
use crate::error::{Error, Result};
use crate::spectrum::{Method, Resolution, SpectrumResult};

/// Relative asymmetry of `W S K*` above which a warning is attached.
pub const ASYMMETRY_WARN: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SymmetrizedSpectrum {
    pub result: SpectrumResult,
    /// Cholesky factor of the symmetrized `W S`.
    pub chol_l: DMatrix<f64>,
    /// Orthonormal eigenvectors of the symmetric part of `M`, one column per raw eigenvalue.
    pub eigenvectors: DMatrix<f64>,
    /// Raw eigenvalues, in the same order as the columns of `eigenvectors`.
    pub raw_eigenvalues: Vec<f64>,
    /// Column of the deflated constant-density eigenvector, if any.
    pub constant_column: Option<usize>,
}

impl SymmetrizedSpectrum {
    /// Density `g = L^{-T} v` for eigenvector column `k`; it satisfies `K* g ≈ lambda_k g`.
    pub fn density(&self, k: usize) -> DVector<f64> {
        let v = self.eigenvectors.column(k).into_owned();
        self.chol_l
            .transpose()
            .solve_upper_triangular(&v)
            .expect("Cholesky factor has a positive diagonal")
    }

    /// Column whose eigenvalue attains the spectral radius in the mean-zero sector.
    pub fn top_column(&self) -> Option<usize> {
        (0..self.raw_eigenvalues.len())
            .filter(|k| Some(*k) != self.constant_column)
            .max_by(|&a, &b| self.raw_eigenvalues[a].abs().total_cmp(&self.raw_eigenvalues[b].abs()))
    }
}

/// Eigenvalues of `K*` through the `S`-weighted symmetrization. With
/// `drop_constant`, the eigenvector most aligned with the constant density (after
/// the back-transform) is excluded from the radius and pairing statistics.
pub fn symmetrized_spectrum(ops: &OperatorMatrices, drop_constant: bool) -> Result<SymmetrizedSpectrum> {
    let n = ops.k.nrows();
    let w = &ops.weights;
    let a = DMatrix::from_fn(n, n, |i, j| w[i] * ops.s[(i, j)]);
    let chol = a.clone().cholesky().ok_or_else(|| {
        Error::Numerical(
            "W S is not positive definite; rescale the domain into the disk of radius 1/2".into(),
        )
    })?;
    let l = chol.l();
    let kstar = ops.k_adjoint();
    // M = L^T K* L^{-T} = L^T (L^{-1} K*^T)^T
    let y = l
        .solve_lower_triangular(&kstar.transpose())
        .expect("Cholesky factor has a positive diagonal");
    let mut m = l.transpose() * y.transpose();
    let mt = m.transpose();
    m = (&m + &mt) * 0.5;
    // A K* - (A K*)^T = W (S K* - K S), the discrete Plemelj defect
    let ak = &a * &kstar;
    let asym = (&ak - ak.transpose()).norm() / ak.norm();
    let eig = SymmetricEigen::new(m);
    let raw: Vec<f64> = eig.eigenvalues.iter().copied().collect();

    let constant_column = if drop_constant {
        // c = L^{-1} W 1 pairs a coefficient vector with the constant: <L^{-T} v, 1>_W = c^T v
        let w1 = DVector::from_column_slice(w);
        let c = l.solve_lower_triangular(&w1).expect("positive diagonal");
        (0..n).max_by(|&p, &q| {
            let cp = eig.eigenvectors.column(p).dot(&c).abs();
            let cq = eig.eigenvectors.column(q).dot(&c).abs();
            cp.total_cmp(&cq)
        })
    } else {
        None
    };

    let plemelj = ops.plemelj_residual();
    let mut result = SpectrumResult::from_eigenvalues(Method::Nystrom, n, &raw, constant_column, 3.0 * asym);
    result.plemelj_residual = Some(plemelj);
    result.asymmetry_residual = Some(asym);
    result.resolution = Resolution {
        panels: Some(ops.meta.panels_per_edge),
        grading: Some(ops.meta.grading_levels),
        quad_order: Some(ops.meta.quad_order),
        ..Resolution::default()
    };
    if asym > ASYMMETRY_WARN {
        result.warnings.push(format!(
            "symmetrization defect {asym:.3e} exceeds {ASYMMETRY_WARN:e}"
        ));
    }
    Ok(SymmetrizedSpectrum {
        result,
        chol_l: l,
        eigenvectors: eig.eigenvectors,
        raw_eigenvalues: raw,
        constant_column,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_boundary_mesh, preset_from_str};

    #[test]
    fn disk_spectrum_is_one_and_zeros() {
        let d = preset_from_str("disk:0.5").unwrap();
        let m = build_boundary_mesh(&d, 32, 0, 8).unwrap();
        let ops = OperatorMatrices::assemble(&m).unwrap();
        let s = symmetrized_spectrum(&ops, true).unwrap();
        assert!((s.result.eigenvalues[0] - 1.0).abs() < 1e-10);
        assert_eq!(s.result.constant_index, Some(0));
        assert!(s.result.spectral_radius < 1e-6);
    }

    #[test]
    fn ellipse_leading_pairs() {
        let d = preset_from_str("ellipse:2,1").unwrap().rescale_to_normal();
        let m = build_boundary_mesh(&d, 32, 0, 8).unwrap();
        let ops = OperatorMatrices::assemble(&m).unwrap();
        let s = symmetrized_spectrum(&ops, true).unwrap();
        let top = s.result.top_abs(6);
        for (k, v) in top.iter().enumerate() {
            let want = (1.0f64 / 3.0).powi(k as i32 / 2 + 1);
            assert!((v - want).abs() < 1e-8, "{k}: {v} vs {want}");
        }
    }
}
