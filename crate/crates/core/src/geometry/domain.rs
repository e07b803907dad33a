use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::curve::{CurvePoint, Piece};
use crate::conformal::MobiusMap;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Angles closer than this to 0 or 2π are rejected as degenerate.
pub const ANGLE_DEGENERACY_TOL: f64 = 1e-10;

/// Radius of the disk that a normalized domain must fit inside.
pub const NORMAL_RADIUS: f64 = 0.5;

/// Target radius used when a domain has to be rescaled.
pub const RESCALE_TARGET: f64 = 0.45;

/// How a domain was described.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainKind {
    Ellipse { a: f64, b: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
    ArcPolygon { vertices: Vec<[f64; 2]>, bulges: Vec<f64> },
    Preset { name: String, params: Vec<f64> },
    Mapped { base: Box<DomainKind>, map: MobiusMap, exterior: bool },
}

/// Boundary arc between two consecutive vertices. Internal joints between
/// pieces are tangent-continuous; only edge endpoints are corners.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub pieces: Vec<Piece>,
}

impl Edge {
    pub fn single(piece: Piece) -> Self {
        Edge { pieces: vec![piece] }
    }

    pub fn start(&self) -> C64 {
        self.pieces[0].start()
    }

    pub fn end(&self) -> C64 {
        self.pieces[self.pieces.len() - 1].end()
    }

    fn start_point(&self) -> CurvePoint {
        self.pieces[0].eval(0.0)
    }

    fn end_point(&self) -> CurvePoint {
        self.pieces[self.pieces.len() - 1].eval(1.0)
    }

    pub fn reversed(&self) -> Edge {
        Edge {
            pieces: self.pieces.iter().rev().map(Piece::reversed).collect(),
        }
    }
}

/// A simply connected planar domain bounded by a closed, counter-clockwise,
/// piecewise smooth Jordan curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub edges: Vec<Edge>,
    /// Center for the star-shaped area rule.
    pub anchor: C64,
    /// Accumulated scale factor applied by [`DomainSpec::rescale_to_normal`].
    pub scale_applied: f64,
}

impl DomainSpec {
    /// Builds and validates a domain. The anchor defaults to the area centroid.
    pub fn new(kind: DomainKind, edges: Vec<Edge>, anchor: Option<C64>) -> Result<Self> {
        let mut d = DomainSpec {
            kind,
            edges,
            anchor: C64::new(0.0, 0.0),
            scale_applied: 1.0,
        };
        d.validate()?;
        d.anchor = match anchor {
            Some(a) => a,
            None => d.centroid(),
        };
        Ok(d)
    }

    pub fn from_polygon(vertices: &[C64]) -> Result<Self> {
        let bulges = vec![0.0; vertices.len()];
        Self::from_arc_polygon(vertices, &bulges)
    }

    /// Arc-polygon with one circular arc per edge; `bulges[j]` belongs to the edge
    /// from vertex `j` to vertex `j + 1`.
    pub fn from_arc_polygon(vertices: &[C64], bulges: &[f64]) -> Result<Self> {
        if vertices.len() < 2 || (vertices.len() < 3 && bulges.iter().all(|b| *b == 0.0)) {
            return Err(Error::parse("vertices", "need at least 3 vertices (2 with arcs)"));
        }
        if bulges.len() != vertices.len() {
            return Err(Error::parse(
                "bulges",
                format!("expected {} bulges, got {}", vertices.len(), bulges.len()),
            ));
        }
        let n = vertices.len();
        let edges = (0..n)
            .map(|j| Edge::single(Piece::from_bulge(vertices[j], vertices[(j + 1) % n], bulges[j])))
            .collect();
        let to_pairs = |v: &[C64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        let kind = if bulges.iter().all(|b| *b == 0.0) {
            DomainKind::Polygon {
                vertices: to_pairs(vertices),
            }
        } else {
            DomainKind::ArcPolygon {
                vertices: to_pairs(vertices),
                bulges: bulges.to_vec(),
            }
        };
        Self::new(kind, edges, None)
    }

    /// Smooth domains have a single closed boundary piece and no vertices.
    pub fn is_smooth(&self) -> bool {
        self.edges.len() == 1 && self.edges[0].pieces.len() == 1 && self.edges[0].pieces[0].is_closed()
    }

    pub fn vertices(&self) -> Vec<C64> {
        if self.is_smooth() {
            Vec::new()
        } else {
            self.edges.iter().map(Edge::start).collect()
        }
    }

    pub fn pieces(&self) -> impl Iterator<Item = &Piece> {
        self.edges.iter().flat_map(|e| e.pieces.iter())
    }

    /// Interior angle at each vertex, measured inside the domain from the one-sided
    /// tangents of the adjacent edges. Empty for smooth domains.
    pub fn interior_angles(&self) -> Vec<f64> {
        if self.is_smooth() {
            return Vec::new();
        }
        let n = self.edges.len();
        (0..n)
            .map(|j| {
                let t_in = self.edges[(j + n - 1) % n].end_point().dz;
                let t_out = self.edges[j].start_point().dz;
                PI - (t_out / t_in).arg()
            })
            .collect()
    }

    /// Signed area from `(1/2) Im ∮ conj(z) dz`.
    pub fn area(&self) -> f64 {
        self.boundary_integral(|p| 0.5 * (p.z.conj() * p.dz).im)
    }

    pub fn perimeter(&self) -> f64 {
        self.pieces().map(Piece::length).sum()
    }

    /// Area centroid from `∫ z dA = (1/2i) ∮ |z|^2 dz`.
    pub fn centroid(&self) -> C64 {
        let a = self.area();
        let re = self.boundary_integral(|p| (p.z.norm_sqr() * p.dz / C64::new(0.0, 2.0)).re);
        let im = self.boundary_integral(|p| (p.z.norm_sqr() * p.dz / C64::new(0.0, 2.0)).im);
        C64::new(re, im) / a
    }

    fn boundary_integral(&self, f: impl Fn(&CurvePoint) -> f64) -> f64 {
        let rule = GaussRule::new(20);
        let m = 32;
        let mut s = 0.0;
        for piece in self.pieces() {
            for k in 0..m {
                let (t0, t1) = (k as f64 / m as f64, (k + 1) as f64 / m as f64);
                for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                    let t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * x;
                    s += w * 0.5 * (t1 - t0) * f(&piece.eval(t));
                }
            }
        }
        s
    }

    /// Largest `|z|` over a dense boundary sample.
    pub fn max_modulus(&self) -> f64 {
        self.pieces()
            .flat_map(|p| p.sample(256))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn diameter_estimate(&self) -> f64 {
        let pts: Vec<C64> = self.pieces().flat_map(|p| p.sample(64)).collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    /// True when the domain already lies in the disk of radius 1/2 about the origin,
    /// which keeps the logarithmic capacity below one.
    pub fn is_normal(&self) -> bool {
        self.max_modulus() <= NORMAL_RADIUS
    }

    /// Translates the anchor to the origin and scales so the boundary lies within
    /// radius [`RESCALE_TARGET`]. Domains that already fit are returned unchanged.
    pub fn rescale_to_normal(&self) -> DomainSpec {
        if self.is_normal() {
            return self.clone();
        }
        let shifted = self.transform_affine(C64::new(1.0, 0.0), -self.anchor);
        let rho = shifted.max_modulus();
        let s = RESCALE_TARGET / rho;
        self.transform_affine(C64::new(s, 0.0), -self.anchor * s)
    }

    /// Translates the anchor to the origin and scales the boundary to radius
    /// [`RESCALE_TARGET`] unconditionally. Monomial bases need this even for domains
    /// that are already normal but small or off-centre.
    pub fn centered(&self) -> DomainSpec {
        let shifted = self.transform_affine(C64::new(1.0, 0.0), -self.anchor);
        let s = RESCALE_TARGET / shifted.max_modulus();
        self.transform_affine(C64::new(s, 0.0), -self.anchor * s)
    }

    /// Image under `z -> scale * z + shift` (a similarity, so orientation is kept).
    pub fn transform_affine(&self, scale: C64, shift: C64) -> DomainSpec {
        let map = MobiusMap::affine(scale, shift);
        DomainSpec {
            kind: self.kind.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    pieces: e.pieces.iter().map(|p| p.transform(&map)).collect(),
                })
                .collect(),
            anchor: map.apply(self.anchor),
            scale_applied: self.scale_applied * scale.norm(),
        }
    }

    /// Winding number of the boundary around `z`, computed from the argument increments
    /// along a dense sample.
    pub fn winding_number(&self, z: C64) -> f64 {
        let mut total = 0.0;
        for p in self.pieces() {
            let pts = p.sample(512);
            for w in pts.windows(2) {
                total += ((w[1] - z) / (w[0] - z)).arg();
            }
        }
        total / (2.0 * PI)
    }

    pub fn contains(&self, z: C64) -> bool {
        self.winding_number(z) > 0.5
    }

    /// Distance from `z` to a dense boundary sample.
    pub fn boundary_distance(&self, z: C64) -> f64 {
        self.pieces()
            .flat_map(|p| p.sample(512))
            .map(|w| (w - z).norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        if self.edges.is_empty() || self.edges.iter().any(|e| e.pieces.is_empty()) {
            return Err(Error::Geometry("boundary has no pieces".into()));
        }
        let scale = self
            .pieces()
            .flat_map(|p| p.sample(8))
            .map(|z| z.norm())
            .fold(0.0, f64::max)
            .max(1e-300);
        let tol = 1e-9 * scale;
        if !self.is_smooth() {
            let n = self.edges.len();
            for (j, e) in self.edges.iter().enumerate() {
                if e.pieces.iter().any(Piece::is_closed) {
                    return Err(Error::Geometry("closed piece inside a polygonal boundary".into()));
                }
                for w in e.pieces.windows(2) {
                    if (w[0].end() - w[1].start()).norm() > tol {
                        return Err(Error::Geometry(format!("edge {j} has a gap between pieces")));
                    }
                    let turn = (w[1].eval(0.0).dz / w[0].eval(1.0).dz).arg();
                    if turn.abs() > 1e-8 {
                        return Err(Error::Geometry(format!(
                            "edge {j} has a non-smooth internal joint (turn {turn:.3e})"
                        )));
                    }
                }
                let next = &self.edges[(j + 1) % n];
                if (e.end() - next.start()).norm() > tol {
                    return Err(Error::Geometry(format!("boundary not closed after edge {j}")));
                }
                if (e.start() - e.end()).norm() <= tol && n > 1 {
                    return Err(Error::Geometry(format!("edge {j} has coincident vertices")));
                }
            }
            for (j, th) in self.interior_angles().iter().enumerate() {
                if !(*th > ANGLE_DEGENERACY_TOL && *th < 2.0 * PI - ANGLE_DEGENERACY_TOL) {
                    return Err(Error::Geometry(format!("degenerate interior angle {th} at vertex {j}")));
                }
            }
        }
        let area = self.area();
        if !(area > 1e-12 * scale * scale) {
            return Err(Error::Geometry(format!(
                "boundary must be counter-clockwise with positive area (got {area:.3e})"
            )));
        }
        self.check_simple()
    }

    fn check_simple(&self) -> Result<()> {
        let mut segs: Vec<(C64, C64)> = Vec::new();
        for p in self.pieces() {
            let pts = p.sample(48);
            for w in pts.windows(2) {
                segs.push((w[0], w[1]));
            }
        }
        let m = segs.len();
        for i in 0..m {
            for j in (i + 2)..m {
                if i == 0 && j == m - 1 {
                    continue;
                }
                if segments_cross(segs[i], segs[j]) {
                    return Err(Error::Geometry(format!(
                        "boundary self-intersects near ({:.4}, {:.4})",
                        segs[i].0.re, segs[i].0.im
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Closed-segment intersection test; touching and collinear overlap count as crossing.
fn segments_cross(s: (C64, C64), t: (C64, C64)) -> bool {
    let eps = 1e-12 * (s.1 - s.0).norm() * (t.1 - t.0).norm();
    let orient = |a: C64, b: C64, c: C64| {
        let v = ((b - a).conj() * (c - a)).im;
        if v.abs() <= eps {
            0.0
        } else {
            v.signum()
        }
    };
    let d1 = orient(s.0, s.1, t.0);
    let d2 = orient(s.0, s.1, t.1);
    let d3 = orient(t.0, t.1, s.0);
    let d4 = orient(t.0, t.1, s.1);
    if d1 == 0.0 && d2 == 0.0 {
        let dir = s.1 - s.0;
        let proj = |z: C64| ((z - s.0).conj() * dir).re;
        let tol = 1e-12 * dir.norm_sqr();
        let (a, b) = (proj(t.0).min(proj(t.1)), proj(t.0).max(proj(t.1)));
        return b >= -tol && a <= dir.norm_sqr() + tol;
    }
    d1 * d2 <= 0.0 && d3 * d4 <= 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn square_angles_area_perimeter() {
        let d = DomainSpec::from_polygon(&[c(0.0, 0.0), c(2.0, 0.0), c(2.0, 2.0), c(0.0, 2.0)]).unwrap();
        for th in d.interior_angles() {
            assert_abs_diff_eq!(th, PI / 2.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(d.area(), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.perimeter(), 8.0, epsilon = 1e-12);
        assert_abs_diff_eq!((d.centroid() - c(1.0, 1.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn clockwise_polygon_rejected() {
        let r = DomainSpec::from_polygon(&[c(0.0, 0.0), c(0.0, 1.0), c(1.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(r, Err(Error::Geometry(_))));
    }

    #[test]
    fn bowtie_rejected() {
        let r = DomainSpec::from_polygon(&[c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.5)]);
        assert!(r.is_err());
    }

    #[test]
    fn repeated_vertex_rejected() {
        let r = DomainSpec::from_polygon(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn rescale_fits_half_disk_and_keeps_angles() {
        let d = DomainSpec::from_polygon(&[c(0.0, 0.0), c(10.0, 0.0), c(10.0, 10.0), c(0.0, 10.0)]).unwrap();
        let r = d.rescale_to_normal();
        assert!(r.max_modulus() <= NORMAL_RADIUS);
        assert!(r.is_normal());
        assert_abs_diff_eq!(r.scale_applied, RESCALE_TARGET / 50f64.sqrt(), epsilon = 1e-9);
        for (a, b) in d.interior_angles().iter().zip(r.interior_angles()) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
        let again = r.rescale_to_normal();
        assert_eq!(again, r);
        assert_eq!(again.scale_applied, r.scale_applied);
    }
}
