//! The conjugated Beurling-type operator on the Bergman space, realized as a
//! complex-symmetric Galerkin matrix on an orthonormal polynomial basis.
//!
//! For a polynomial `p`, Stokes turns the principal-value area integral
//! `T p(z) = pv (1 / pi) int_Omega p(zeta) / (conj(zeta) - conj(z))^2 dA` into the
//! contour integral `(i / 2 pi) oint p(zeta) / (conj(zeta) - conj(z)) dzeta`,
//! which is smooth at interior points.
//!
//! For the antilinear map `c -> G conj(c)` with `G = G^T`, the real-linear
//! eigenvalues are `+-sigma_i`, the singular values of `G` (Takagi), so the
//! spectrum is symmetric about the origin by construction.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SVD};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bergman::{self, CoeffMatrix, COND_CAP_DEFAULT};
use crate::conformal::{mobius_apply, MobiusMap};
use crate::error::{Error, Result};
use crate::geometry::{AreaQuadrature, BoundaryMesh, DomainSpec, MeshRule, Panel, MAX_NODES_DEFAULT};
use crate::quadrature::GaussRule;
use crate::spectrum::{Method, Resolution, SpectrumResult};

/// Panels closer to the target than this multiple of their length are
/// integrated adaptively.
pub const NEAR_FACTOR: f64 = 1.0;
pub const MAX_LEVELS: usize = 12;
pub const CONTOUR_TOL: f64 = 1e-10;
/// Symmetry residual above which [`assemble_g`] fails.
pub const SYMMETRY_HARD_LIMIT: f64 = 1e-2;
/// Below this Frobenius norm `G` counts as zero and the residual is absolute.
const ZERO_NORM: f64 = 1e-10;

const LEAF_ORDER: usize = 16;

/// Panel geometry for the near-field test.
struct PanelBall {
    center: C64,
    radius: f64,
    length: f64,
}

fn panel_balls(mesh: &BoundaryMesh) -> Vec<PanelBall> {
    mesh.panels
        .iter()
        .map(|p| {
            let center = mesh.panel_point(p, 0.0).z;
            let mut radius: f64 = 0.0;
            for k in 0..=8 {
                let x = -1.0 + 0.25 * k as f64;
                radius = radius.max((mesh.panel_point(p, x).z - center).norm());
            }
            PanelBall { center, radius, length: p.length }
        })
        .collect()
}

/// Monomial contour integrals at one point: `out[m] = oint zeta^m / (conj(zeta) - conj(z)) dzeta`
/// for `m <= deg`, and `out[deg + 1] = oint dzeta / (zeta - z)` for the winding number.
struct ContourEngine<'a> {
    mesh: &'a BoundaryMesh,
    deg: usize,
    /// `zeta_j^m dzeta_j` for every node, `deg + 1` entries per node.
    table: Vec<C64>,
    balls: Vec<PanelBall>,
    leaf: GaussRule,
    /// Largest boundary modulus; scales the error test of high powers.
    rho: f64,
}

impl<'a> ContourEngine<'a> {
    fn new(mesh: &'a BoundaryMesh, deg: usize) -> Result<Self> {
        if mesh.rule != MeshRule::Gauss {
            return Err(Error::Input("the contour transform needs a Gauss-panel mesh".into()));
        }
        let mut table = Vec::with_capacity(mesh.len() * (deg + 1));
        let mut rho: f64 = 0.0;
        for i in 0..mesh.len() {
            let z = mesh.nodes[i];
            rho = rho.max(z.norm());
            let mut p = mesh.tangents[i] * mesh.weights[i];
            for _ in 0..=deg {
                table.push(p);
                p *= z;
            }
        }
        Ok(ContourEngine {
            mesh,
            deg,
            table,
            balls: panel_balls(mesh),
            leaf: GaussRule::new(LEAF_ORDER),
            rho: rho.max(1e-300),
        })
    }

    fn integrals(&self, z: C64) -> Vec<C64> {
        let w = self.deg + 1;
        let mut acc = vec![C64::new(0.0, 0.0); w + 1];
        for (panel, ball) in self.mesh.panels.iter().zip(&self.balls) {
            if (z - ball.center).norm() - ball.radius < NEAR_FACTOR * ball.length {
                self.adaptive(panel, z, &mut acc);
                continue;
            }
            for j in panel.nodes() {
                let zeta = self.mesh.nodes[j];
                let k = 1.0 / (zeta - z).conj();
                let row = &self.table[j * w..(j + 1) * w];
                for (a, p) in acc.iter_mut().zip(row) {
                    *a += k * p;
                }
                acc[w] += row[0] / (zeta - z);
            }
        }
        acc
    }

    fn leaf_sum(&self, panel: &Panel, z: C64, a: f64, b: f64) -> Vec<C64> {
        let w = self.deg + 1;
        let mut out = vec![C64::new(0.0, 0.0); w + 1];
        let h = 0.5 * (b - a);
        let half_t = 0.5 * (panel.t1 - panel.t0);
        for (x, wx) in self.leaf.nodes.iter().zip(&self.leaf.weights) {
            let p = self.mesh.panel_point(panel, 0.5 * (a + b) + h * x);
            let dzeta = p.dz * (wx * h * half_t);
            let k = 1.0 / (p.z - z).conj();
            let mut term = k * dzeta;
            for o in out.iter_mut().take(w) {
                *o += term;
                term *= p.z;
            }
            out[w] += dzeta / (p.z - z);
        }
        out
    }

    fn adaptive(&self, panel: &Panel, z: C64, acc: &mut [C64]) {
        let mut stack = vec![(-1.0, 1.0, 0usize, self.leaf_sum(panel, z, -1.0, 1.0))];
        while let Some((a, b, level, coarse)) = stack.pop() {
            let m = 0.5 * (a + b);
            let left = self.leaf_sum(panel, z, a, m);
            let right = self.leaf_sum(panel, z, m, b);
            // power m is compared relative to rho^m; the winding slot is unscaled
            let mut err: f64 = 0.0;
            let mut scale = 1.0;
            for k in 0..=self.deg {
                err = err.max((left[k] + right[k] - coarse[k]).norm() / scale);
                scale *= self.rho;
            }
            let w = self.deg + 1;
            err = err.max((left[w] + right[w] - coarse[w]).norm());
            if err <= CONTOUR_TOL || level + 1 >= MAX_LEVELS {
                for k in 0..acc.len() {
                    acc[k] += left[k] + right[k];
                }
            } else {
                stack.push((m, b, level + 1, right));
                stack.push((a, m, level + 1, left));
            }
        }
    }
}

/// Values `(T e_k)(z)` for every basis function, one row per point.
pub fn contour_t_matrix(mesh: &BoundaryMesh, c: &CoeffMatrix, points: &[C64]) -> Result<DMatrix<C64>> {
    let deg = c.effective_degree;
    let engine = ContourEngine::new(mesh, deg)?;
    let rows: Vec<Result<Vec<C64>>> = points
        .par_iter()
        .enumerate()
        .map(|(q, z)| {
            let (d, _) = mesh.local_spacing(*z);
            if d < 1e-14 {
                return Err(Error::Domain(format!("point {q} lies on the boundary")));
            }
            let acc = engine.integrals(*z);
            let wind = acc[deg + 1].im / (2.0 * PI);
            if (wind - 1.0).abs() > 0.5 {
                return Err(Error::Domain(format!(
                    "point {q} at ({:.6}, {:.6}) is outside the domain",
                    z.re, z.im
                )));
            }
            let pref = C64::new(0.0, 1.0 / (2.0 * PI));
            Ok((0..=deg)
                .map(|k| {
                    let mut v = C64::new(0.0, 0.0);
                    for (coef, a) in c.rows[k].iter().zip(&acc) {
                        v += coef * a;
                    }
                    pref * v
                })
                .collect())
        })
        .collect();
    let mut out = DMatrix::zeros(points.len(), deg + 1);
    for (q, row) in rows.into_iter().enumerate() {
        for (k, v) in row?.into_iter().enumerate() {
            out[(q, k)] = v;
        }
    }
    Ok(out)
}

/// `(T e_k)(z)` at interior points.
pub fn contour_t_apply(mesh: &BoundaryMesh, c: &CoeffMatrix, k: usize, points: &[C64]) -> Result<Vec<C64>> {
    if k > c.effective_degree {
        return Err(Error::Input(format!(
            "basis index {k} exceeds the kept degree {}",
            c.effective_degree
        )));
    }
    let t = contour_t_matrix(mesh, &c.truncated(k), points)?;
    Ok(t.column(k).iter().copied().collect())
}

#[derive(Clone, Debug)]
pub struct GMatrix {
    pub g: DMatrix<C64>,
    /// `||G - G^T|| / ||G||` before symmetrization (absolute when `G` is zero).
    pub symmetry_residual: f64,
    pub degree: usize,
    pub n_area_nodes: usize,
}

/// `G[j][k] = conj(sum_q w_q e_j(z_q) (T e_k)(z_q))`, then symmetrized.
pub fn assemble_g(mesh: &BoundaryMesh, c: &CoeffMatrix, quad: &AreaQuadrature) -> Result<GMatrix> {
    let t = contour_t_matrix(mesh, c, &quad.nodes)?;
    let e = bergman::evaluate_basis(c, &quad.nodes);
    let n = c.len();
    let mut weighted = e;
    for (q, w) in quad.weights.iter().enumerate() {
        for k in 0..n {
            weighted[(q, k)] *= *w;
        }
    }
    let g = (weighted.transpose() * t).map(|v| v.conj());
    let norm = g.norm();
    let defect = (&g - g.transpose()).norm();
    let symmetry_residual = if norm < ZERO_NORM { defect } else { defect / norm };
    if symmetry_residual > SYMMETRY_HARD_LIMIT {
        return Err(Error::Numerical(format!(
            "Galerkin matrix symmetry residual {symmetry_residual:.3e} exceeds {SYMMETRY_HARD_LIMIT:e}; increase the area quadrature order or boundary panels"
        )));
    }
    let g = (&g + g.transpose()) * C64::new(0.5, 0.0);
    Ok(GMatrix {
        g,
        symmetry_residual,
        degree: c.effective_degree,
        n_area_nodes: quad.len(),
    })
}

/// Real-linear spectrum `{+-sigma_i}` of `c -> G conj(c)`.
pub fn takagi_spectrum(g: &GMatrix) -> SpectrumResult {
    let sigma = singular_values(&g.g);
    let mut raw: Vec<f64> = sigma.to_vec();
    raw.extend(sigma.iter().map(|s| -s));
    let mut r = SpectrumResult::from_eigenvalues(Method::Bergman, g.g.nrows(), &raw, None, 0.0);
    r.asymmetry_residual = Some(g.symmetry_residual);
    r
}

fn singular_values(g: &DMatrix<C64>) -> Vec<f64> {
    if g.is_empty() {
        return vec![0.0];
    }
    let mut s: Vec<f64> = SVD::new(g.clone(), false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Resolution of the Bergman pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BergmanConfig {
    pub panels: usize,
    /// `None` picks 10 levels for domains with corners and 0 for smooth ones.
    pub grading: Option<usize>,
    pub quad_order: usize,
    /// Requested polynomial degree; the condition cap may lower it.
    pub degree: usize,
    /// `None` uses `degree + 4`.
    pub radial_order: Option<usize>,
    pub cond_cap: f64,
}

impl Default for BergmanConfig {
    fn default() -> Self {
        BergmanConfig {
            panels: 8,
            grading: None,
            quad_order: 16,
            degree: 30,
            radial_order: None,
            cond_cap: COND_CAP_DEFAULT,
        }
    }
}

impl BergmanConfig {
    pub fn with_degree(degree: usize) -> Self {
        BergmanConfig {
            degree,
            ..Self::default()
        }
    }

    fn radial(&self) -> usize {
        self.radial_order.unwrap_or(self.degree + 4)
    }
}

#[derive(Clone, Debug)]
pub struct BergmanRun {
    pub spectrum: SpectrumResult,
    pub g: GMatrix,
    pub basis: CoeffMatrix,
}

/// Rescales `d`, builds the basis and area rule, assembles `G` and returns its
/// Takagi spectrum.
pub fn bergman_spectrum(d: &DomainSpec, cfg: &BergmanConfig) -> Result<BergmanRun> {
    let kind = d.kind.clone();
    let d = d.centered();
    let grading = cfg.grading.unwrap_or(if d.is_smooth() { 0 } else { 10 });
    let mesh = BoundaryMesh::build(&d, cfg.panels, grading, cfg.quad_order, MeshRule::Gauss, MAX_NODES_DEFAULT)?;
    let moments = bergman::boundary_moments(&mesh, cfg.degree.max(1))?;
    let basis = bergman::orthonormal_basis(&moments, cfg.cond_cap)?;
    let quad = AreaQuadrature::from_mesh(&mesh, cfg.radial())?;
    let g = assemble_g(&mesh, &basis, &quad)?;
    let mut spectrum = takagi_spectrum(&g);
    spectrum.domain = Some(kind);
    spectrum.resolution = Resolution {
        panels: Some(cfg.panels),
        grading: Some(grading),
        quad_order: Some(cfg.quad_order),
        degree: Some(basis.effective_degree),
        radial_order: Some(cfg.radial()),
    };
    if basis.effective_degree < cfg.degree {
        spectrum.warnings.push(format!(
            "degree lowered from {} to {} by the Gram condition cap {:e}",
            cfg.degree, basis.effective_degree, cfg.cond_cap
        ));
    }
    Ok(BergmanRun { spectrum, g, basis })
}

/// Largest gap between the sorted top-10 singular values of `G` for `d` and for
/// its image under `map`.
pub fn mobius_invariance_check(d: &DomainSpec, map: &MobiusMap, cfg: &BergmanConfig) -> Result<f64> {
    let image = mobius_apply(map, d, false)?;
    let a = bergman_spectrum(d, cfg)?;
    let b = bergman_spectrum(&image, cfg)?;
    let sa = singular_values(&a.g.g);
    let sb = singular_values(&b.g.g);
    Ok((0..10)
        .map(|k| (sa.get(k).copied().unwrap_or(0.0) - sb.get(k).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max))
}

/// Bounded image of the exterior of `d` under `z -> 1 / (z - z0)`, with `z0`
/// inside `d` (default: the anchor). Its interior angles are `2 pi - theta_j`.
pub fn exterior_image(d: &DomainSpec, z0: Option<C64>) -> Result<DomainSpec> {
    let z0 = z0.unwrap_or(d.anchor);
    if !d.contains(z0) {
        return Err(Error::Input(format!(
            "inversion centre ({:.6}, {:.6}) must lie inside the domain",
            z0.re, z0.im
        )));
    }
    mobius_apply(&MobiusMap::inversion(z0), d, true)
}

/// Spectrum of the exterior of `d`, computed on its bounded Möbius image.
pub fn exterior_spectrum_surrogate(d: &DomainSpec, z0: Option<C64>, cfg: &BergmanConfig) -> Result<SpectrumResult> {
    Ok(bergman_spectrum(&exterior_image(d, z0)?, cfg)?.spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::preset_from_str;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(spec: &str, deg: usize) -> (BoundaryMesh, CoeffMatrix) {
        let d = preset_from_str(spec).unwrap().rescale_to_normal();
        let g = if d.is_smooth() { 0 } else { 8 };
        let mesh = BoundaryMesh::build(&d, 8, g, 16, MeshRule::Gauss, MAX_NODES_DEFAULT).unwrap();
        let c = bergman::orthonormal_basis(&bergman::boundary_moments(&mesh, deg).unwrap(), 1e12).unwrap();
        (mesh, c)
    }

    #[test]
    fn disk_transform_vanishes() {
        let (mesh, c) = setup("disk:0.5", 10);
        let pts = [C64::new(0.1, 0.2), C64::new(-0.3, 0.1), C64::new(0.0, 0.499)];
        let t = contour_t_matrix(&mesh, &c, &pts).unwrap();
        assert!(t.iter().all(|v| v.norm() < 1e-9), "{}", t.camax());
    }

    #[test]
    fn outside_point_rejected() {
        let (mesh, c) = setup("disk:0.5", 3);
        assert!(matches!(
            contour_t_apply(&mesh, &c, 0, &[C64::new(0.7, 0.0)]),
            Err(Error::Domain(_))
        ));
    }

    /// `pv (1/pi) int_Omega dA / (conj(zeta) - conj(z))^2` in polar coordinates about
    /// `z`: the radial integral is `log(R(phi) / rho)`, and the `log rho` part
    /// integrates to zero against `e^{2 i phi}`.
    fn square_pv_oracle(half: f64, z: C64) -> C64 {
        let reach = |phi: f64| {
            let (c, s) = (phi.cos(), phi.sin());
            let tx = if c > 0.0 { (half - z.re) / c } else if c < 0.0 { (-half - z.re) / c } else { f64::INFINITY };
            let ty = if s > 0.0 { (half - z.im) / s } else if s < 0.0 { (-half - z.im) / s } else { f64::INFINITY };
            tx.min(ty)
        };
        // split at the corner directions, where R is not smooth
        let mut cuts: Vec<f64> = [(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)]
            .iter()
            .map(|(x, y)| {
                let a = (C64::new(x * half, y * half) - z).arg();
                if a < 0.0 { a + 2.0 * PI } else { a }
            })
            .collect();
        cuts.push(0.0);
        cuts.push(2.0 * PI);
        cuts.sort_by(|a, b| a.total_cmp(b));
        let rule = GaussRule::new(32);
        let mut total = C64::new(0.0, 0.0);
        for w in cuts.windows(2) {
            let sub = 16;
            for s in 0..sub {
                let a = w[0] + (w[1] - w[0]) * s as f64 / sub as f64;
                let b = w[0] + (w[1] - w[0]) * (s + 1) as f64 / sub as f64;
                for (x, wx) in rule.nodes.iter().zip(&rule.weights) {
                    let phi = 0.5 * (a + b) + 0.5 * (b - a) * x;
                    total += C64::from_polar(1.0, 2.0 * phi) * reach(phi).ln() * (wx * 0.5 * (b - a));
                }
            }
        }
        total / PI
    }

    #[test]
    fn constant_matches_principal_value() {
        let d = preset_from_str("square:1").unwrap();
        let half = 0.5;
        let mesh = BoundaryMesh::build(&d, 8, 8, 16, MeshRule::Gauss, MAX_NODES_DEFAULT).unwrap();
        // constant function 1 as a one-element basis
        let c = CoeffMatrix {
            rows: vec![vec![C64::new(1.0, 0.0)]],
            effective_degree: 0,
            condition: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<C64> = (0..6)
            .map(|_| C64::new(rng.random_range(-0.45..0.45), rng.random_range(-0.45..0.45)))
            .collect();
        let t = contour_t_apply(&mesh, &c, 0, &pts).unwrap();
        for (z, v) in pts.iter().zip(&t) {
            let want = square_pv_oracle(half, *z);
            assert!((v - want).norm() < 1e-8, "{z}: {v} vs {want}");
        }
    }

    #[test]
    fn takagi_of_diagonal() {
        let g = GMatrix {
            g: DMatrix::from_element(1, 1, C64::new(1.0 / 3.0, 0.0)),
            symmetry_residual: 0.0,
            degree: 0,
            n_area_nodes: 0,
        };
        let s = takagi_spectrum(&g);
        assert!((s.eigenvalues[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0 / 3.0).abs() < 1e-15);
        let zero = GMatrix {
            g: DMatrix::zeros(3, 3),
            ..g
        };
        assert_eq!(takagi_spectrum(&zero).spectral_radius, 0.0);
    }

    #[test]
    fn disk_g_is_zero() {
        let run = bergman_spectrum(&preset_from_str("disk:1").unwrap(), &BergmanConfig::with_degree(16)).unwrap();
        assert!(run.spectrum.spectral_radius < 1e-8, "{}", run.spectrum.spectral_radius);
    }

    #[test]
    fn ellipse_singular_values() {
        let run = bergman_spectrum(&preset_from_str("ellipse:2,1").unwrap(), &BergmanConfig::with_degree(24)).unwrap();
        let s = singular_values(&run.g.g);
        for (k, v) in s.iter().take(3).enumerate() {
            let want = (1.0f64 / 3.0).powi(k as i32 + 1);
            assert!((v - want).abs() < 1e-6, "{k}: {v}");
        }
        assert!(run.g.symmetry_residual < 1e-3);
    }

    #[test]
    fn small_offset_domain_keeps_full_degree() {
        let d = preset_from_str("ellipse:2,1").unwrap();
        let tiny = d.transform_affine(C64::new(0.01, 0.0), C64::new(-0.3, 0.1));
        let a = bergman_spectrum(&d, &BergmanConfig::with_degree(16)).unwrap();
        let b = bergman_spectrum(&tiny, &BergmanConfig::with_degree(16)).unwrap();
        assert_eq!(b.basis.effective_degree, a.basis.effective_degree);
        assert!((a.spectrum.spectral_radius - b.spectrum.spectral_radius).abs() < 1e-12);
    }
}
