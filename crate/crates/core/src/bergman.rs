//! Orthonormal polynomial bases of the Bergman space `L^2_a(Omega)` built from
//! boundary moments.
//!
//! Area moments come from the boundary by Stokes:
//! `int_Omega z^m conj(z)^n dA = (1 / (2i (n + 1))) oint z^m conj(z)^(n+1) dz`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundaryMesh;

pub const MAX_DEGREE: usize = 60;
pub const COND_CAP_DEFAULT: f64 = 1e12;

/// `mu[m][n] = int_Omega z^m conj(z)^n dA` for `0 <= m, n <= max_deg + 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentTable {
    pub max_deg: usize,
    pub mu: Vec<Vec<C64>>,
}

impl MomentTable {
    pub fn area(&self) -> f64 {
        self.mu[0][0].re
    }

    /// `gram[m][n] = <z^n, z^m> = mu[n][m]` for degrees up to `d`.
    pub fn gram(&self, d: usize) -> DMatrix<C64> {
        DMatrix::from_fn(d + 1, d + 1, |m, n| self.mu[n][m])
    }

    /// Largest `|mu[n][m] - conj(mu[m][n])|`.
    pub fn hermitian_defect(&self) -> f64 {
        let k = self.mu.len();
        let mut worst: f64 = 0.0;
        for m in 0..k {
            for n in 0..k {
                worst = worst.max((self.mu[n][m] - self.mu[m][n].conj()).norm());
            }
        }
        worst
    }
}

pub fn boundary_moments(mesh: &BoundaryMesh, max_deg: usize) -> Result<MomentTable> {
    if max_deg > MAX_DEGREE {
        return Err(Error::Input(format!(
            "moment degree {max_deg} exceeds {MAX_DEGREE}; the monomial Gram matrix is hopelessly ill-conditioned beyond it"
        )));
    }
    if !mesh.normal {
        return Err(Error::Input(
            "moments need a rescaled domain (inside the disk of radius 1/2)".into(),
        ));
    }
    let k = max_deg + 2;
    let mut acc = vec![vec![C64::new(0.0, 0.0); k]; k];
    let mut zp = vec![C64::new(0.0, 0.0); k + 1];
    let mut zbp = vec![C64::new(0.0, 0.0); k + 1];
    for i in 0..mesh.len() {
        let z = mesh.nodes[i];
        let dz = mesh.tangents[i] * mesh.weights[i];
        powers(z, &mut zp);
        powers(z.conj(), &mut zbp);
        for (m, row) in acc.iter_mut().enumerate() {
            let a = zp[m] * dz;
            for (n, v) in row.iter_mut().enumerate() {
                *v += a * zbp[n + 1];
            }
        }
    }
    let two_i = C64::new(0.0, 2.0);
    let mu = acc
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(n, v)| v / (two_i * (n + 1) as f64))
                .collect()
        })
        .collect();
    Ok(MomentTable { max_deg, mu })
}

fn powers(z: C64, out: &mut [C64]) {
    let mut p = C64::new(1.0, 0.0);
    for o in out.iter_mut() {
        *o = p;
        p *= z;
    }
}

/// `e_k = sum_{m <= k} coeffs[(k, m)] z^m`, orthonormal in `L^2(Omega)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffMatrix {
    /// Row `k` holds the `k + 1` coefficients of `e_k`.
    pub rows: Vec<Vec<C64>>,
    pub effective_degree: usize,
    /// Condition number of the diagonally scaled Gram block that was kept.
    pub condition: f64,
}

impl CoeffMatrix {
    pub fn len(&self) -> usize {
        self.effective_degree + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lower-triangular coefficient matrix.
    pub fn matrix(&self) -> DMatrix<C64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |k, m| if m <= k { self.rows[k][m] } else { C64::new(0.0, 0.0) })
    }

    /// Basis truncated to degree `d`.
    pub fn truncated(&self, d: usize) -> CoeffMatrix {
        let d = d.min(self.effective_degree);
        CoeffMatrix {
            rows: self.rows[..=d].to_vec(),
            effective_degree: d,
            condition: self.condition,
        }
    }

    /// `C^H Gram C` written as `(conj C) Gram C^T` in the row convention, which
    /// should be the identity.
    pub fn reconstructed_gram(&self, moments: &MomentTable) -> DMatrix<C64> {
        let g = moments.gram(self.effective_degree);
        let c = self.matrix();
        c.map(|v| v.conj()) * g * c.transpose()
    }
}

/// Cholesky orthonormalization of `1, z, z^2, ...`. The Gram matrix is scaled to
/// unit diagonal first; the degree is the largest whose scaled block has
/// condition number at most `cond_cap`.
pub fn orthonormal_basis(moments: &MomentTable, cond_cap: f64) -> Result<CoeffMatrix> {
    let full = moments.gram(moments.max_deg);
    let diag: Vec<f64> = (0..full.nrows()).map(|k| full[(k, k)].re).collect();
    if diag.len() < 2 || diag[0] <= 0.0 || diag[1] <= 0.0 {
        return Err(Error::Input("Gram matrix is not positive definite at degree 1".into()));
    }
    let scaled_block = |d: usize| {
        DMatrix::from_fn(d + 1, d + 1, |m, n| full[(m, n)] / (diag[m] * diag[n]).sqrt())
    };
    let condition_of = |d: usize| -> Option<f64> {
        if diag[..=d].iter().any(|v| *v <= 0.0) {
            return None;
        }
        let e = SymmetricEigen::new(scaled_block(d)).eigenvalues;
        let lo = e.min();
        let hi = e.max();
        (lo > 0.0).then(|| hi / lo)
    };
    match condition_of(1) {
        Some(c) if c <= cond_cap => {}
        _ => return Err(Error::Input("Gram matrix is not positive definite at degree 1".into())),
    }
    let mut degree = 1;
    let mut condition = condition_of(1).unwrap();
    // the condition number grows with the block (interlacing), so stop at the first failure
    for d in 2..=moments.max_deg {
        match condition_of(d) {
            Some(c) if c <= cond_cap => {
                degree = d;
                condition = c;
            }
            _ => break,
        }
    }
    let chol = scaled_block(degree)
        .cholesky()
        .ok_or_else(|| Error::Numerical("Gram Cholesky failed inside the condition cap".into()))?;
    let n = degree + 1;
    let linv = chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::Numerical("singular Gram factor".into()))?;
    let rows = (0..n)
        .map(|k| (0..=k).map(|m| linv[(k, m)].conj() / diag[m].sqrt()).collect())
        .collect();
    Ok(CoeffMatrix {
        rows,
        effective_degree: degree,
        condition,
    })
}

/// `out[(q, k)] = e_k(points[q])`.
pub fn evaluate_basis(c: &CoeffMatrix, points: &[C64]) -> DMatrix<C64> {
    let n = c.len();
    let mut out = DMatrix::zeros(points.len(), n);
    let mut zp = vec![C64::new(0.0, 0.0); n];
    for (q, z) in points.iter().enumerate() {
        powers(*z, &mut zp);
        for k in 0..n {
            let mut v = C64::new(0.0, 0.0);
            for (a, p) in c.rows[k].iter().zip(&zp) {
                v += a * p;
            }
            out[(q, k)] = v;
        }
    }
    out
}

/// Moments and basis together, as written by the `moments` command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub schema: String,
    pub moments: MomentTable,
    pub basis: CoeffMatrix,
    pub orthonormality_defect: f64,
}

impl MomentReport {
    pub fn new(moments: MomentTable, basis: CoeffMatrix) -> Self {
        let g = basis.reconstructed_gram(&moments);
        let n = g.nrows();
        let defect = (g - DMatrix::<C64>::identity(n, n)).iter().map(|v| v.norm()).fold(0.0, f64::max);
        MomentReport {
            schema: crate::spectrum::SCHEMA.to_string(),
            moments,
            basis,
            orthonormality_defect: defect,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("moment tables always serialize")
    }
}
