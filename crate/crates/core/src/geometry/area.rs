//! Area quadrature for star-shaped domains: a fan of curved triangles, one per
//! boundary panel, each carrying a tensor Gauss rule blended linearly between the
//! anchor and the curved edge.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::domain::DomainSpec;
use super::mesh::{BoundaryMesh, MeshRule, MAX_NODES_DEFAULT};
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AreaQuadrature {
    pub nodes: Vec<C64>,
    pub weights: Vec<f64>,
    /// Total polynomial degree in `(x, y)` integrated exactly on straight-edged fans.
    pub exactness_degree: usize,
    pub anchor: C64,
}

/// Fan rule on a default graded Gauss mesh of the domain.
pub fn build_area_quadrature(d: &DomainSpec, radial_order: usize) -> Result<AreaQuadrature> {
    let grading = if d.is_smooth() { 0 } else { 10 };
    let mesh = BoundaryMesh::build(d, 8, grading, 16, MeshRule::Gauss, MAX_NODES_DEFAULT)?;
    AreaQuadrature::from_mesh(&mesh, radial_order)
}

impl AreaQuadrature {
    /// Fan rule over the panels of a Gauss mesh, centred at the mesh anchor.
    pub fn from_mesh(mesh: &BoundaryMesh, radial_order: usize) -> Result<AreaQuadrature> {
        if mesh.rule != MeshRule::Gauss {
            return Err(Error::Input("the area rule needs a Gauss-panel mesh".into()));
        }
        if radial_order < 1 {
            return Err(Error::Input("radial_order must be at least 1".into()));
        }
        let a = mesh.anchor;
        check_star_shaped(mesh)?;
        let radial = GaussRule::new(radial_order);
        let along = GaussRule::new(mesh.quad_order);
        let mut nodes = Vec::with_capacity(mesh.panels.len() * radial_order * mesh.quad_order);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for panel in &mesh.panels {
            let half_t = 0.5 * (panel.t1 - panel.t0);
            for (x, wx) in along.nodes.iter().zip(&along.weights) {
                let p = mesh.panel_point(panel, *x);
                let jac = ((p.z - a).conj() * p.dz).im * half_t;
                for (s, ws) in radial.nodes.iter().zip(&radial.weights) {
                    let s = 0.5 * (s + 1.0);
                    nodes.push(a + s * (p.z - a));
                    weights.push(wx * ws * 0.5 * s * jac);
                }
            }
        }
        Ok(AreaQuadrature {
            nodes,
            weights,
            exactness_degree: (2 * radial_order).saturating_sub(2).min(2 * mesh.quad_order - 1),
            anchor: a,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(C64) -> C64) -> C64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| f(*z) * *w)
            .sum()
    }
}

/// Every ray from the anchor must cross the boundary once, i.e. the polar angle
/// of `z - anchor` increases strictly along the boundary.
fn check_star_shaped(mesh: &BoundaryMesh) -> Result<()> {
    let a = mesh.anchor;
    for panel in &mesh.panels {
        for k in 0..=32 {
            let x = -1.0 + 2.0 * k as f64 / 32.0;
            let p = mesh.panel_point(panel, x);
            let r = p.z - a;
            let scale = r.norm() * p.dz.norm();
            let cross = (r.conj() * p.dz).im;
            let at_vertex = (k == 0 || k == 32) && r.norm() < 1e-14;
            if !at_vertex && cross <= 1e-12 * scale {
                return Err(Error::Geometry(format!(
                    "domain is not star-shaped about the anchor ({:.6}, {:.6}): the ray at angle {:.6} rad meets the boundary more than once",
                    a.re,
                    a.im,
                    r.arg()
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::preset_from_str;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn disk_area() {
        let d = preset_from_str("disk:0.5").unwrap();
        let q = build_area_quadrature(&d, 12).unwrap();
        assert_abs_diff_eq!(q.area(), PI / 4.0, epsilon = 1e-10);
        assert!(q.weights.iter().all(|w| *w > 0.0));
    }

    #[test]
    fn square_area_and_interior_nodes() {
        let d = preset_from_str("square:1").unwrap();
        let q = build_area_quadrature(&d, 12).unwrap();
        assert_abs_diff_eq!(q.area(), 1.0, epsilon = 1e-10);
        assert!(q.nodes.iter().all(|z| z.re.abs() < 0.5 && z.im.abs() < 0.5));
    }

    #[test]
    fn second_moment_of_square() {
        let d = preset_from_str("square:1").unwrap();
        let q = build_area_quadrature(&d, 12).unwrap();
        let m = q.integrate(|z| C64::new(z.norm_sqr(), 0.0));
        assert_abs_diff_eq!(m.re, 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn lshape_about_far_anchor_is_rejected() {
        let d = preset_from_str("lshape").unwrap();
        let mut d2 = d.clone();
        d2.anchor = C64::new(1.8, 0.2);
        let e = build_area_quadrature(&d2, 8).unwrap_err();
        assert!(e.to_string().contains("ray at angle"));
    }
}
