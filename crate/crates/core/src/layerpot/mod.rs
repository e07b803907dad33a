//! Nyström discretizations of the boundary layer operators for the Laplace
//! kernel `G(x, y) = -(1 / 2 pi) log|x - y|`:
//!
//! * `K f(x) = (1 / pi) int <n_y, y - x> / |y - x|^2 f(y) ds(y)`, so `K 1 = 1`;
//! * `S g(x) = int G(x, y) g(y) ds(y)`;
//! * `K*` is the adjoint in the `L^2(ds)` pairing.
//!
//! Gauss-panel meshes use plain quadrature for well-separated panels, product
//! integration against the panel's Lagrange basis for nearby panels, and a
//! logarithmic product rule on the target's own panel. Trapezoid meshes of smooth
//! closed curves use the periodic logarithmic splitting of the parameter kernel.

mod energy;
mod near;
mod potential;
mod symmetrize;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use energy::{equilibrium_density, mean_zero_projection, poincare_quotient, Equilibrium, PoincareQuotient};
pub use near::{product_weights, NearWorkspace, NEAR_FACTOR};
pub use potential::{
    eval_double_layer, eval_single_layer, jump_test, Evaluation, JumpReport, H_MIN_SPACINGS,
};
pub use symmetrize::{symmetrized_spectrum, SymmetrizedSpectrum, ASYMMETRY_WARN};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, MeshRule};

/// Mesh metadata carried with the matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshMeta {
    pub rule: MeshRule,
    pub n_nodes: usize,
    pub panels_per_edge: usize,
    pub grading_levels: usize,
    pub quad_order: usize,
}

impl MeshMeta {
    pub fn of(mesh: &BoundaryMesh) -> Self {
        MeshMeta {
            rule: mesh.rule,
            n_nodes: mesh.len(),
            panels_per_edge: mesh.panels_per_edge,
            grading_levels: mesh.grading_levels,
            quad_order: mesh.quad_order,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OperatorMatrices {
    pub k: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub weights: Vec<f64>,
    /// `||W S - (W S)^T||_F / ||W S||_F` before symmetrization.
    pub s_asymmetry: f64,
    pub meta: MeshMeta,
}

impl OperatorMatrices {
    pub fn assemble(mesh: &BoundaryMesh) -> Result<Self> {
        let k = assemble_k(mesh)?;
        let (s, s_asymmetry) = assemble_s(mesh)?;
        Ok(OperatorMatrices {
            k,
            s,
            weights: mesh.weights.clone(),
            s_asymmetry,
            meta: MeshMeta::of(mesh),
        })
    }

    pub fn k_adjoint(&self) -> DMatrix<f64> {
        discrete_adjoint(&self.k, &self.weights)
    }

    pub fn plemelj_residual(&self) -> f64 {
        plemelj_residual(&self.k, &self.s, &self.weights)
    }
}

fn dot(a: C64, b: C64) -> f64 {
    a.re * b.re + a.im * b.im
}

fn k_kernel(x: C64, y: C64, ny: C64) -> f64 {
    let r = y - x;
    dot(ny, r) / (PI * r.norm_sqr())
}

fn s_kernel(x: C64, y: C64) -> f64 {
    -(y - x).norm().ln() / (2.0 * PI)
}

fn check_distinct(mesh: &BoundaryMesh) -> Result<()> {
    let scale = mesh.total_weight();
    let mut idx: Vec<usize> = (0..mesh.len()).collect();
    idx.sort_by(|&a, &b| mesh.nodes[a].re.total_cmp(&mesh.nodes[b].re));
    let tol = 1e-14 * scale;
    for (p, &i) in idx.iter().enumerate() {
        for &j in &idx[p + 1..] {
            if mesh.nodes[j].re - mesh.nodes[i].re > tol {
                break;
            }
            if (mesh.nodes[j] - mesh.nodes[i]).norm() <= tol {
                return Err(Error::Numerical(format!("nodes {i} and {j} coincide")));
            }
        }
    }
    Ok(())
}

fn from_rows(rows: Vec<Vec<f64>>) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, n, |i, j| rows[i][j])
}

/// Dense Nyström matrix of `K`.
pub fn assemble_k(mesh: &BoundaryMesh) -> Result<DMatrix<f64>> {
    check_distinct(mesh)?;
    let n = mesh.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map_init(
            || (NearWorkspace::new(mesh.quad_order), vec![0.0; mesh.quad_order]),
            |(ws, buf), i| {
                let x = mesh.nodes[i];
                let mut row = vec![0.0; n];
                if mesh.rule == MeshRule::Trapezoid {
                    for j in 0..n {
                        row[j] = if i == j {
                            mesh.curvature[i] * mesh.weights[i] / (2.0 * PI)
                        } else {
                            k_kernel(x, mesh.nodes[j], mesh.normals[j]) * mesh.weights[j]
                        };
                    }
                    return row;
                }
                let own = mesh.panel_of(i);
                for (p, panel) in mesh.panels.iter().enumerate() {
                    if p != own && near::is_near(mesh, panel, x) {
                        near::product_weights(mesh, panel, x, |y, ny| k_kernel(x, y.z, ny), ws, buf);
                        row[panel.nodes()].copy_from_slice(buf);
                    } else {
                        for j in panel.nodes() {
                            row[j] = if i == j {
                                mesh.curvature[i] * mesh.weights[i] / (2.0 * PI)
                            } else {
                                k_kernel(x, mesh.nodes[j], mesh.normals[j]) * mesh.weights[j]
                            };
                        }
                    }
                }
                row
            },
        )
        .collect();
    Ok(from_rows(rows))
}

/// Dense Nyström matrix of `S` and the relative asymmetry of `W S` that was
/// averaged away. Refuses domains that do not fit in the disk of radius 1/2.
pub fn assemble_s(mesh: &BoundaryMesh) -> Result<(DMatrix<f64>, f64)> {
    if !mesh.normal {
        return Err(Error::Input(
            "single layer needs a domain inside the disk of radius 1/2; apply rescale_to_normal first".into(),
        ));
    }
    check_distinct(mesh)?;
    let n = mesh.len();
    let rows: Vec<Vec<f64>> = if mesh.rule == MeshRule::Trapezoid {
        s_rows_periodic(mesh)
    } else {
        s_rows_panels(mesh)
    };
    let mut a = DMatrix::from_fn(n, n, |i, j| mesh.weights[i] * rows[i][j]);
    let at = a.transpose();
    let asym = (&a - &at).norm() / a.norm();
    a = (&a + &at) * 0.5;
    let s = DMatrix::from_fn(n, n, |i, j| a[(i, j)] / mesh.weights[i]);
    Ok((s, asym))
}

fn s_rows_panels(mesh: &BoundaryMesh) -> Vec<Vec<f64>> {
    let n = mesh.len();
    let q = mesh.quad_order;
    let rule = crate::quadrature::GaussRule::new(q);
    (0..n)
        .into_par_iter()
        .map_init(
            || (NearWorkspace::new(q), vec![0.0; q]),
            |(ws, buf), i| {
                let x = mesh.nodes[i];
                let mut row = vec![0.0; n];
                let own = mesh.panel_of(i);
                for (p, panel) in mesh.panels.iter().enumerate() {
                    if p == own {
                        // log|y(s) - x_i| = log|s - s_i| + log(|y(s) - x_i| / |s - s_i|)
                        let k = i - panel.start;
                        let si = rule.nodes[k];
                        let lw = rule.log_weights(si);
                        let half_t = 0.5 * (panel.t1 - panel.t0);
                        let jac_i = mesh.speed[i] * half_t;
                        for (m, j) in panel.nodes().enumerate() {
                            let jac_j = mesh.speed[j] * half_t;
                            let smooth = if j == i {
                                jac_i.ln()
                            } else {
                                ((mesh.nodes[j] - x).norm() / (rule.nodes[m] - si).abs()).ln()
                            };
                            row[j] = -(lw[m] * jac_j + smooth * mesh.weights[j]) / (2.0 * PI);
                        }
                    } else if near::is_near(mesh, panel, x) {
                        near::product_weights(mesh, panel, x, |y, _| s_kernel(x, y.z), ws, buf);
                        row[panel.nodes()].copy_from_slice(buf);
                    } else {
                        for j in panel.nodes() {
                            row[j] = s_kernel(x, mesh.nodes[j]) * mesh.weights[j];
                        }
                    }
                }
                row
            },
        )
        .collect()
}

/// Periodic logarithmic splitting: with `tau` the `2 pi`-periodic parameter,
/// `log|z(tau) - z(sigma)| = (1/2) log(4 sin^2((tau - sigma) / 2)) + H(tau, sigma)`,
/// the first part integrated exactly on trigonometric polynomials of degree `N / 2`.
fn s_rows_periodic(mesh: &BoundaryMesh) -> Vec<Vec<f64>> {
    let n = mesh.len();
    let half = n / 2;
    let step = 2.0 * PI / n as f64;
    // r[d] = R_j(tau_i) for i - j = d (mod n)
    let r: Vec<f64> = (0..n)
        .map(|d| {
            let t = d as f64 * step;
            let mut s = 0.0;
            for m in 1..half {
                s += (m as f64 * t).cos() / m as f64;
            }
            let last = if n.is_multiple_of(2) {
                PI / (half * half) as f64 * (half as f64 * t).cos()
            } else {
                0.0
            };
            -2.0 * PI / half as f64 * s - last
        })
        .collect();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = mesh.nodes[i];
            let mut row = vec![0.0; n];
            for j in 0..n {
                // |dz/dtau| = speed / (2 pi); the trapezoid weight is step * |dz/dtau|
                let speed_tau = mesh.speed[j] / (2.0 * PI);
                let h = if i == j {
                    (mesh.speed[i] / (2.0 * PI)).ln()
                } else {
                    let t = (i as f64 - j as f64) * step;
                    (x - mesh.nodes[j]).norm().ln() - 0.5 * (4.0 * (0.5 * t).sin().powi(2)).ln()
                };
                let d = (i + n - j) % n;
                row[j] = -(0.5 * r[d] * speed_tau + h * mesh.weights[j]) / (2.0 * PI);
            }
            row
        })
        .collect()
}

/// `K* = W^{-1} K^T W`.
pub fn discrete_adjoint(k: &DMatrix<f64>, weights: &[f64]) -> DMatrix<f64> {
    let n = k.nrows();
    DMatrix::from_fn(n, n, |i, j| k[(j, i)] * weights[j] / weights[i])
}

/// `||K S - S K*||_F / ||S||_F`.
pub fn plemelj_residual(k: &DMatrix<f64>, s: &DMatrix<f64>, weights: &[f64]) -> f64 {
    let ks = discrete_adjoint(k, weights);
    (k * s - s * ks).norm() / s.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_boundary_mesh, preset_from_str, BoundaryMesh, MeshRule, MAX_NODES_DEFAULT};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    fn disk(r: f64, n: usize) -> BoundaryMesh {
        let d = preset_from_str(&format!("disk:{r}")).unwrap();
        build_boundary_mesh(&d, n / 8, 0, 8).unwrap()
    }

    /// On a circle of radius R the double-layer kernel is the constant 1/(2 pi R).
    #[test]
    fn circle_k_is_rank_one() {
        let m = disk(0.4, 128);
        let k = assemble_k(&m).unwrap();
        let one = DVector::from_element(m.len(), 1.0);
        let row_sums = &k * &one;
        for v in row_sums.iter() {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-13);
        }
        let f = DVector::from_fn(m.len(), |i, _| (3.0 * m.nodes[i].arg()).cos());
        assert!((&k * f).amax() < 1e-13);
    }

    /// Oracle: the mean of `log|x - y|` over a circle of radius R through `x` is `log R`,
    /// so `S 1 = -R log R`; checked separately by brute-force quadrature below.
    #[test]
    fn circle_s_of_constant() {
        let r = 0.45;
        let m = disk(r, 256);
        let (s, asym) = assemble_s(&m).unwrap();
        assert!(asym < 1e-13);
        let v = &s * DVector::from_element(m.len(), 1.0);
        for x in v.iter() {
            assert_abs_diff_eq!(*x, -r * r.ln(), epsilon = 1e-12);
        }
        // brute force: split at the singular point and grade toward it
        let rule = crate::quadrature::GaussRule::new(20);
        let mut brute = 0.0;
        for k in 0..60 {
            let (a, b) = (PI * 0.5f64.powi(k + 1), PI * 0.5f64.powi(k));
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let t = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let dist = 2.0 * r * (0.5 * t).sin();
                brute += 2.0 * w * 0.5 * (b - a) * r * (-(dist.ln()) / (2.0 * PI));
            }
        }
        assert_abs_diff_eq!(brute, -r * r.ln(), epsilon = 1e-12);
    }

    #[test]
    fn gauss_panels_on_circle_match_closed_form() {
        let d = preset_from_str("disk:0.45").unwrap();
        let m = BoundaryMesh::build(&d, 16, 0, 16, MeshRule::Gauss, MAX_NODES_DEFAULT).unwrap();
        let want = -0.45 * 0.45f64.ln();
        for row in s_rows_panels(&m) {
            assert_abs_diff_eq!(row.iter().sum::<f64>(), want, epsilon = 1e-13);
        }
        // averaging W S with its transpose costs the near-field interpolation error
        let (s, _) = assemble_s(&m).unwrap();
        let v = &s * DVector::from_element(m.len(), 1.0);
        for x in v.iter() {
            assert_abs_diff_eq!(*x, want, epsilon = 1e-5);
        }
        let k = assemble_k(&m).unwrap();
        let rs = &k * DVector::from_element(m.len(), 1.0);
        assert!((rs.add_scalar(-1.0)).amax() < 1e-12);
    }

    #[test]
    fn weighted_s_is_symmetric() {
        let d = preset_from_str("square:1").unwrap().rescale_to_normal();
        let m = build_boundary_mesh(&d, 4, 4, 10).unwrap();
        let (s, _) = assemble_s(&m).unwrap();
        let a = DMatrix::from_fn(m.len(), m.len(), |i, j| m.weights[i] * s[(i, j)]);
        assert!((&a - a.transpose()).norm() <= 1e-12 * a.norm());
        assert!(a.clone().cholesky().is_some());
    }

    #[test]
    fn unnormalized_domain_refused() {
        let d = preset_from_str("square:2").unwrap();
        let m = build_boundary_mesh(&d, 2, 1, 8).unwrap();
        assert!(matches!(assemble_s(&m), Err(Error::Input(_))));
    }

    #[test]
    fn adjoint_is_an_involution() {
        let d = preset_from_str("lens:pi/3,pi/4").unwrap().rescale_to_normal();
        let m = build_boundary_mesh(&d, 3, 2, 8).unwrap();
        let k = assemble_k(&m).unwrap();
        let back = discrete_adjoint(&discrete_adjoint(&k, &m.weights), &m.weights);
        assert!((&back - &k).amax() <= 1e-12 * k.amax());
    }

    #[test]
    fn row_sums_on_square() {
        let d = preset_from_str("square:1").unwrap().rescale_to_normal();
        let err = |g: usize| {
            let m = build_boundary_mesh(&d, 4, g, 12).unwrap();
            let k = assemble_k(&m).unwrap();
            (&k * DVector::from_element(m.len(), 1.0)).add_scalar(-1.0).amax()
        };
        assert!(err(4) < 1e-10);
        assert!(err(10) < 1e-10);
    }

    #[test]
    fn circle_plemelj_residual() {
        let m = disk(0.5, 256);
        let ops = OperatorMatrices::assemble(&m).unwrap();
        assert!(ops.plemelj_residual() <= 1e-10);
    }
}
