//! Conformal maps: fractional linear maps acting on arc-polygons, the
//! Schwarz-Christoffel-type maps onto convex unbounded domains, and the
//! compact-perturbation kernel diagnostic.

mod kernel;
mod mobius;
mod sc;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

pub use kernel::{
    fit_singularity_exponent, perturbation_kernel, AnalyticMap, ExponentFit, PowerMap,
};
pub use mobius::MobiusMap;
pub use sc::{
    convexity_certificate, sc_derivative, sc_map, sc_map_path, trace_boundary, ConvexityCertificate,
    SCMapSpec,
};

use crate::error::{Error, Result};
use crate::geometry::{DomainKind, DomainSpec, Edge};

/// Image of `d` under `map`.
///
/// In the default mode the pole of `map` must lie outside the closed domain and
/// the image is the bounded domain `map(d)`. With `exterior = true` the pole must
/// lie inside `d`; the result is then the bounded image of the exterior of `d`,
/// whose boundary is the reversed image curve and whose angles are `2 pi - theta_j`.
/// Interior angles are checked against these predictions after mapping.
pub fn mobius_apply(map: &MobiusMap, d: &DomainSpec, exterior: bool) -> Result<DomainSpec> {
    let tol = 1e-9 * d.diameter_estimate();
    let (image_anchor, edges) = match (map.pole(), exterior) {
        (Some(pole), false) => {
            if d.contains(pole) || d.boundary_distance(pole) <= tol {
                return Err(Error::Input(format!(
                    "pole ({:.6}, {:.6}) lies in the closed domain; use the exterior mode",
                    pole.re, pole.im
                )));
            }
            (map.apply(d.anchor), map_edges(map, &d.edges))
        }
        (None, false) => (map.apply(d.anchor), map_edges(map, &d.edges)),
        (Some(pole), true) => {
            if !d.contains(pole) || d.boundary_distance(pole) <= tol {
                return Err(Error::Input(
                    "exterior mode needs the pole strictly inside the domain".into(),
                ));
            }
            let mapped = map_edges(map, &d.edges);
            let reversed: Vec<Edge> = mapped.iter().rev().map(Edge::reversed).collect();
            // image of the point at infinity
            (map.a / map.c, reversed)
        }
        (None, true) => {
            return Err(Error::Input(
                "an affine map cannot send the exterior to a bounded domain".into(),
            ))
        }
    };
    let kind = DomainKind::Mapped {
        base: Box::new(d.kind.clone()),
        map: *map,
        exterior,
    };
    let mut image = DomainSpec::new(kind, edges, Some(image_anchor))?;
    image.scale_applied = d.scale_applied;

    let mut expected = d.interior_angles();
    if exterior {
        // the edge list is reversed, so vertex j of the image sits at the end of old edge n-1-j
        let n = expected.len();
        expected = (0..n).map(|j| 2.0 * PI - expected[(n - j) % n]).collect();
    }
    let got = image.interior_angles();
    if got.len() != expected.len()
        || got.iter().zip(&expected).any(|(a, b)| (a - b).abs() > 1e-8)
    {
        return Err(Error::Numerical(format!(
            "interior angles not preserved by the map: expected {expected:?}, got {got:?}"
        )));
    }
    Ok(image)
}

fn map_edges(map: &MobiusMap, edges: &[Edge]) -> Vec<Edge> {
    edges
        .iter()
        .map(|e| Edge {
            pieces: e.pieces.iter().map(|p| p.transform(map)).collect(),
        })
        .collect()
}

/// Fits a circle through three points, returning `(center, radius)`.
pub fn circle_through(a: C64, b: C64, c: C64) -> (C64, f64) {
    let center = crate::geometry::circumcenter(a, b, c);
    (center, (a - center).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{preset_from_str, Piece};
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_keeps_domain() {
        let d = preset_from_str("lens:pi/3,pi/4").unwrap();
        let e = mobius_apply(&MobiusMap::identity(), &d, false).unwrap();
        for (a, b) in d.vertices().iter().zip(e.vertices()) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(d.area(), e.area(), epsilon = 1e-12);
    }

    #[test]
    fn translation_shifts_square() {
        let d = preset_from_str("square:1").unwrap();
        let shift = C64::new(2.0, -1.0);
        let e = mobius_apply(&MobiusMap::affine(C64::new(1.0, 0.0), shift), &d, false).unwrap();
        for (a, b) in d.vertices().iter().zip(e.vertices()) {
            assert_abs_diff_eq!((a + shift - b).norm(), 0.0, epsilon = 1e-14);
        }
        for th in e.interior_angles() {
            assert_abs_diff_eq!(th, PI / 2.0, epsilon = 1e-12);
        }
    }

    /// Oracle: three-point circle fit through samples of the image boundary.
    #[test]
    fn inverted_disk_is_a_disk() {
        let mut d = preset_from_str("disk:1").unwrap();
        d = d.transform_affine(C64::new(1.0, 0.0), C64::new(3.0, 0.5));
        let e = mobius_apply(&MobiusMap::inversion(C64::new(0.0, 0.0)), &d, false).unwrap();
        let pts: Vec<C64> = e.pieces().flat_map(|p| p.sample(40)).collect();
        let (c, r) = circle_through(pts[0], pts[13], pts[27]);
        for z in &pts {
            assert_abs_diff_eq!((z - c).norm(), r, epsilon = 1e-12);
        }
        assert!(e.area() > 0.0);
    }

    #[test]
    fn pole_inside_is_refused() {
        let d = preset_from_str("square:1").unwrap();
        let r = mobius_apply(&MobiusMap::inversion(C64::new(0.1, 0.1)), &d, false);
        assert!(matches!(r, Err(Error::Input(_))));
    }

    #[test]
    fn exterior_image_of_square_has_reflex_corners() {
        let d = preset_from_str("square:1").unwrap();
        let e = mobius_apply(&MobiusMap::inversion(C64::new(0.0, 0.0)), &d, true).unwrap();
        for th in e.interior_angles() {
            assert_abs_diff_eq!(th, 1.5 * PI, epsilon = 1e-9);
        }
        assert!(e.pieces().all(|p| matches!(p, Piece::Arc { .. })));
        assert!(e.contains(C64::new(0.0, 0.0)));
    }

    #[test]
    fn lens_angles_survive_inversion() {
        let d = preset_from_str("lens:pi/4,pi/5").unwrap();
        let e = mobius_apply(&MobiusMap::inversion(C64::new(0.3, 2.0)), &d, false).unwrap();
        let a = e.interior_angles();
        assert_abs_diff_eq!(a[0], PI / 4.0, epsilon = 1e-9);
        assert_abs_diff_eq!(a[1], PI / 5.0, epsilon = 1e-9);
    }
}
