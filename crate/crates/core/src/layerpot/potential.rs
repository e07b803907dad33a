//! Layer potentials off the boundary and the jump-relation check.
//!
//! `D g(x) = -(1 / 2 pi) int <n_y, y - x> / |y - x|^2 g(y) ds(y)`, so `D 1 = -1` inside
//! and `0` outside; `S f(x) = -(1 / 2 pi) int log|x - y| f(y) ds(y)`.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::near::{self, NearWorkspace};
use super::OperatorMatrices;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryMesh, MeshRule};

/// Points closer to the boundary than this many local node spacings get a warning.
pub const H_MIN_SPACINGS: f64 = 3.0;

const MAX_UPSAMPLE: usize = 64;

#[derive(Clone, Debug)]
pub struct Evaluation {
    pub values: Vec<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, PartialEq)]
enum Layer {
    Single,
    Double,
}

fn kernel(layer: Layer, x: C64, y: C64, ny: C64) -> f64 {
    let r = y - x;
    match layer {
        Layer::Single => -r.norm().ln() / (2.0 * PI),
        Layer::Double => -(ny.re * r.re + ny.im * r.im) / (2.0 * PI * r.norm_sqr()),
    }
}

pub fn eval_single_layer(mesh: &BoundaryMesh, density: &[f64], points: &[C64]) -> Result<Evaluation> {
    eval_layer(mesh, density, points, Layer::Single)
}

pub fn eval_double_layer(mesh: &BoundaryMesh, density: &[f64], points: &[C64]) -> Result<Evaluation> {
    eval_layer(mesh, density, points, Layer::Double)
}

/// Fine copy of a trapezoid mesh with the density interpolated trigonometrically.
struct Upsampled {
    nodes: Vec<C64>,
    normals: Vec<C64>,
    weights: Vec<f64>,
    density: Vec<f64>,
}

fn upsample(mesh: &BoundaryMesh, density: &[f64], factor: usize) -> Upsampled {
    let n = mesh.len();
    let m = n * factor;
    let piece = &mesh.pieces[0];
    let half = n / 2;
    // discrete Fourier coefficients for frequencies -half..=half (Nyquist split evenly)
    let coeffs: Vec<(i64, C64)> = (-(half as i64)..=(half as i64))
        .map(|k| {
            let mut c = C64::new(0.0, 0.0);
            for (j, g) in density.iter().enumerate() {
                c += C64::from_polar(*g, -2.0 * PI * (k * j as i64) as f64 / n as f64);
            }
            let scale = if n.is_multiple_of(2) && k.unsigned_abs() as usize == half { 0.5 } else { 1.0 };
            (k, c * scale / n as f64)
        })
        .collect();
    let mut out = Upsampled {
        nodes: Vec::with_capacity(m),
        normals: Vec::with_capacity(m),
        weights: Vec::with_capacity(m),
        density: Vec::with_capacity(m),
    };
    for j in 0..m {
        let t = j as f64 / m as f64;
        let p = piece.eval(t);
        out.nodes.push(p.z);
        out.normals.push(p.outward_normal());
        out.weights.push(p.speed() / m as f64);
        let v: C64 = coeffs
            .iter()
            .map(|(k, c)| c * C64::from_polar(1.0, 2.0 * PI * *k as f64 * t))
            .sum();
        out.density.push(v.re);
    }
    out
}

fn eval_layer(mesh: &BoundaryMesh, density: &[f64], points: &[C64], layer: Layer) -> Result<Evaluation> {
    if density.len() != mesh.len() {
        return Err(Error::Input(format!(
            "density has {} entries for {} nodes",
            density.len(),
            mesh.len()
        )));
    }
    let local: Vec<(f64, f64)> = points.par_iter().map(|z| mesh.local_spacing(*z)).collect();
    let mut warnings = Vec::new();
    for (k, (d, h)) in local.iter().enumerate() {
        if *d < 1e-14 {
            return Err(Error::Domain(format!("evaluation point {k} lies on the boundary")));
        }
        if *d < H_MIN_SPACINGS * h {
            warnings.push(format!(
                "point {k} is {d:.3e} from the boundary (local spacing {h:.3e}); near-field correction applied"
            ));
        }
    }
    let values: Vec<f64> = if mesh.rule == MeshRule::Trapezoid {
        let factor_for = |d: f64, h: f64| -> usize {
            if d >= 5.0 * h {
                1
            } else {
                ((5.0 * h / d).ceil() as usize).next_power_of_two().min(MAX_UPSAMPLE)
            }
        };
        let max_factor = local.iter().map(|(d, h)| factor_for(*d, *h)).max().unwrap_or(1);
        let fine = if max_factor > 1 {
            Some(upsample(mesh, density, max_factor))
        } else {
            None
        };
        points
            .par_iter()
            .zip(&local)
            .map(|(z, (d, h))| {
                if factor_for(*d, *h) == 1 {
                    (0..mesh.len())
                        .map(|j| kernel(layer, *z, mesh.nodes[j], mesh.normals[j]) * mesh.weights[j] * density[j])
                        .sum()
                } else {
                    let f = fine.as_ref().unwrap();
                    (0..f.nodes.len())
                        .map(|j| kernel(layer, *z, f.nodes[j], f.normals[j]) * f.weights[j] * f.density[j])
                        .sum()
                }
            })
            .collect()
    } else {
        points
            .par_iter()
            .map_init(
                || (NearWorkspace::new(mesh.quad_order), vec![0.0; mesh.quad_order]),
                |(ws, buf), z| {
                    let mut total = 0.0;
                    for panel in &mesh.panels {
                        if near::is_near(mesh, panel, *z) {
                            near::product_weights(mesh, panel, *z, |y, ny| kernel(layer, *z, y.z, ny), ws, buf);
                            total += buf.iter().zip(&density[panel.nodes()]).map(|(a, b)| a * b).sum::<f64>();
                        } else {
                            for j in panel.nodes() {
                                total += kernel(layer, *z, mesh.nodes[j], mesh.normals[j]) * mesh.weights[j] * density[j];
                            }
                        }
                    }
                    total
                },
            )
            .collect()
    };
    Ok(Evaluation { values, warnings })
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct JumpReport {
    pub double_interior: f64,
    pub double_exterior: f64,
    pub single_interior: f64,
    pub single_exterior: f64,
    pub max_relative: f64,
    pub tested_nodes: usize,
}

const STEPS: usize = 5;

/// Lagrange weights at `h = 0` for samples at `h = 1..=5` (value and first derivative).
fn extrapolation_weights() -> ([f64; STEPS], [f64; STEPS]) {
    let hs: Vec<f64> = (1..=STEPS).map(|k| k as f64).collect();
    let mut value = [0.0; STEPS];
    let mut slope = [0.0; STEPS];
    for k in 0..STEPS {
        let denom: f64 = (0..STEPS).filter(|&m| m != k).map(|m| hs[k] - hs[m]).product();
        let others: Vec<f64> = (0..STEPS).filter(|&m| m != k).map(|m| hs[m]).collect();
        value[k] = others.iter().map(|h| -h).product::<f64>() / denom;
        // derivative of prod (x - h_m) at 0
        let mut d = 0.0;
        for skip in 0..others.len() {
            d += others
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, h)| -h)
                .product::<f64>();
        }
        slope[k] = d / denom;
    }
    (value, slope)
}

/// Checks the four jump relations at every node farther than `clearance` from all
/// vertices, extrapolating potentials sampled along the normal at distances
/// `k * delta_i` (`k = 1..5`, `delta_i` half the node weight) to the boundary.
/// `f` drives the single-layer checks, `g` the double-layer checks.
pub fn jump_test(
    mesh: &BoundaryMesh,
    ops: &OperatorMatrices,
    f: &[f64],
    g: &[f64],
    vertices: &[C64],
    clearance: f64,
) -> Result<JumpReport> {
    let n = mesh.len();
    if f.len() != n || g.len() != n {
        return Err(Error::Input("jump_test densities must match the mesh".into()));
    }
    let nodes: Vec<usize> = (0..n)
        .filter(|&i| vertices.iter().all(|v| (mesh.nodes[i] - v).norm() > clearance))
        .collect();
    if nodes.is_empty() {
        return Ok(JumpReport::default());
    }
    let scale = f
        .iter()
        .chain(g)
        .map(|v| v.abs())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return Ok(JumpReport {
            tested_nodes: nodes.len(),
            ..JumpReport::default()
        });
    }
    let fv = DVector::from_column_slice(f);
    let gv = DVector::from_column_slice(g);
    let kg = &ops.k * &gv;
    let ksf = ops.k_adjoint() * &fv;

    let mut inner = Vec::with_capacity(nodes.len() * STEPS);
    let mut outer = Vec::with_capacity(nodes.len() * STEPS);
    for &i in &nodes {
        let delta = 0.5 * mesh.weights[i];
        for k in 1..=STEPS {
            let h = k as f64 * delta;
            inner.push(mesh.nodes[i] - mesh.normals[i] * h);
            outer.push(mesh.nodes[i] + mesh.normals[i] * h);
        }
    }
    let d_in = eval_double_layer(mesh, g, &inner)?.values;
    let d_out = eval_double_layer(mesh, g, &outer)?.values;
    let s_in = eval_single_layer(mesh, f, &inner)?.values;
    let s_out = eval_single_layer(mesh, f, &outer)?.values;
    let (wv, ws) = extrapolation_weights();
    let mut report = JumpReport {
        tested_nodes: nodes.len(),
        ..JumpReport::default()
    };
    for (p, &i) in nodes.iter().enumerate() {
        let block = p * STEPS..(p + 1) * STEPS;
        let at0 = |vals: &[f64]| -> f64 { vals[block.clone()].iter().zip(&wv).map(|(a, b)| a * b).sum() };
        let slope0 = |vals: &[f64]| -> f64 { vals[block.clone()].iter().zip(&ws).map(|(a, b)| a * b).sum() };
        let delta = 0.5 * mesh.weights[i];
        let di = at0(&d_in);
        let de = at0(&d_out);
        // moving inward is -n, so the interior normal derivative is -du/dh
        let si = -slope0(&s_in) / delta;
        let se = slope0(&s_out) / delta;
        report.double_interior = report.double_interior.max((di + 0.5 * (g[i] + kg[i])).abs() / scale);
        report.double_exterior = report.double_exterior.max((de - 0.5 * (g[i] - kg[i])).abs() / scale);
        report.single_interior = report.single_interior.max((si - 0.5 * (f[i] - ksf[i])).abs() / scale);
        report.single_exterior = report.single_exterior.max((se - 0.5 * (-f[i] - ksf[i])).abs() / scale);
    }
    report.max_relative = report
        .double_interior
        .max(report.double_exterior)
        .max(report.single_interior)
        .max(report.single_exterior);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_boundary_mesh, preset_from_str};

    #[test]
    fn gauss_identity_for_double_layer() {
        for s in ["disk:0.4", "square:0.6", "lens:pi/3,pi/2"] {
            let d = preset_from_str(s).unwrap().rescale_to_normal();
            let m = build_boundary_mesh(&d, 6, 6, 12).unwrap();
            let one = vec![1.0; m.len()];
            let pts = [C64::new(0.01, 0.02), C64::new(0.9, 0.1), C64::new(-0.05, 0.3)];
            let v = eval_double_layer(&m, &one, &pts).unwrap();
            assert!((v.values[0] + 1.0).abs() < 1e-10, "{s}: {}", v.values[0]);
            assert!(v.values[1].abs() < 1e-10, "{s}");
        }
    }

    #[test]
    fn near_points_warn_but_stay_accurate() {
        let d = preset_from_str("disk:0.4").unwrap();
        let m = build_boundary_mesh(&d, 16, 0, 8).unwrap();
        let one = vec![1.0; m.len()];
        // node spacing is about 2e-2
        let pts = [C64::new(0.4 - 2e-3, 0.0), C64::new(0.4 + 2e-3, 0.0)];
        let v = eval_double_layer(&m, &one, &pts).unwrap();
        assert_eq!(v.warnings.len(), 2);
        assert!((v.values[0] + 1.0).abs() < 1e-9, "{}", v.values[0]);
        assert!(v.values[1].abs() < 1e-9, "{}", v.values[1]);
    }

    #[test]
    fn mean_zero_single_layer_decays() {
        let d = preset_from_str("disk:0.4").unwrap();
        let m = build_boundary_mesh(&d, 16, 0, 8).unwrap();
        let f: Vec<f64> = m.nodes.iter().map(|z| z.arg().cos()).collect();
        let far = [C64::new(1e3, 0.0), C64::new(1e5, 0.0)];
        let v = eval_single_layer(&m, &f, &far).unwrap();
        assert!(v.values[1].abs() < v.values[0].abs());
        assert!(v.values[1].abs() < 1e-5);
    }

    #[test]
    fn extrapolation_weights_are_exact_on_quartics() {
        let (v, s) = extrapolation_weights();
        let p = |h: f64| 2.0 - 3.0 * h + 0.5 * h * h - h.powi(4) * 0.1;
        let val: f64 = (1..=5).map(|k| p(k as f64) * v[k - 1]).sum();
        let slope: f64 = (1..=5).map(|k| p(k as f64) * s[k - 1]).sum();
        assert!((val - 2.0).abs() < 1e-12);
        assert!((slope + 3.0).abs() < 1e-12);
    }
}
