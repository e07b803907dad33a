//! Boundary quadrature: composite Gauss panels graded dyadically toward every
//! vertex, or the periodic trapezoid rule on smooth closed curves.
//!
//! Grading rule: each edge is first cut into `panels_per_edge` panels of equal
//! parameter length (distributed over the edge's pieces in proportion to their
//! arclength, at least one per piece). The first and the last panel of the edge
//! are then halved `grading_levels` times, each time splitting the half that
//! touches the vertex. An edge therefore carries `panels_per_edge + 2 * grading_levels`
//! panels, unless the smallest panel would drop below `1e-12 * perimeter`, at which
//! point halving stops.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::curve::{CurvePoint, Piece};
use super::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Default cap on the number of boundary nodes.
pub const MAX_NODES_DEFAULT: usize = 20_000;

const MIN_PANEL_FRACTION: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshRule {
    /// Trapezoid on smooth closed curves, Gauss panels otherwise.
    Auto,
    Gauss,
    Trapezoid,
}

/// One quadrature panel: the parameter interval `[t0, t1]` of a boundary piece.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Panel {
    pub edge: usize,
    pub piece: usize,
    pub t0: f64,
    pub t1: f64,
    /// Number of halvings that produced this panel (0 for the uniform panels).
    pub level: usize,
    pub order: usize,
    /// Index of the panel's first node.
    pub start: usize,
    pub length: f64,
}

impl Panel {
    pub fn nodes(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.order
    }

    /// Piece parameter for the reference coordinate `x in [-1, 1]`.
    pub fn param(&self, x: f64) -> f64 {
        0.5 * (self.t0 + self.t1) + 0.5 * (self.t1 - self.t0) * x
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryMesh {
    pub nodes: Vec<C64>,
    /// Arclength weights.
    pub weights: Vec<f64>,
    pub tangents: Vec<C64>,
    pub normals: Vec<C64>,
    pub curvature: Vec<f64>,
    /// Parameter speed `|z'(t)|` at each node (in the piece parameter).
    pub speed: Vec<f64>,
    pub panels: Vec<Panel>,
    /// `vertex_offsets[j]..vertex_offsets[j + 1]` are the nodes on edge `j`.
    pub vertex_offsets: Vec<usize>,
    pub pieces: Vec<Piece>,
    pub rule: MeshRule,
    pub quad_order: usize,
    pub grading_levels: usize,
    pub panels_per_edge: usize,
    pub anchor: C64,
    /// True when the underlying domain already satisfied the normal-size test.
    pub normal: bool,
}

/// Builds the default mesh: trapezoid for smooth closed curves, graded Gauss panels otherwise.
pub fn build_boundary_mesh(
    d: &DomainSpec,
    panels_per_edge: usize,
    grading_levels: usize,
    quad_order: usize,
) -> Result<BoundaryMesh> {
    BoundaryMesh::build(d, panels_per_edge, grading_levels, quad_order, MeshRule::Auto, MAX_NODES_DEFAULT)
}

impl BoundaryMesh {
    /// Full-control constructor. With the trapezoid rule the curve carries
    /// `panels_per_edge * quad_order` equispaced parameter nodes.
    pub fn build(
        d: &DomainSpec,
        panels_per_edge: usize,
        grading_levels: usize,
        quad_order: usize,
        rule: MeshRule,
        max_nodes: usize,
    ) -> Result<BoundaryMesh> {
        if panels_per_edge == 0 {
            return Err(Error::Input("panels_per_edge must be at least 1".into()));
        }
        if !(2..=32).contains(&quad_order) {
            return Err(Error::Input(format!("quad_order must lie in [2, 32], got {quad_order}")));
        }
        let rule = match rule {
            MeshRule::Auto if d.is_smooth() => MeshRule::Trapezoid,
            MeshRule::Auto => MeshRule::Gauss,
            MeshRule::Trapezoid if !d.is_smooth() => {
                return Err(Error::Input("the trapezoid rule needs a smooth closed boundary".into()))
            }
            r => r,
        };
        let pieces: Vec<Piece> = d.pieces().cloned().collect();
        let mut mesh = BoundaryMesh {
            nodes: Vec::new(),
            weights: Vec::new(),
            tangents: Vec::new(),
            normals: Vec::new(),
            curvature: Vec::new(),
            speed: Vec::new(),
            panels: Vec::new(),
            vertex_offsets: vec![0],
            pieces,
            rule,
            quad_order,
            grading_levels,
            panels_per_edge,
            anchor: d.anchor,
            normal: d.is_normal(),
        };
        if rule == MeshRule::Trapezoid {
            let n = panels_per_edge * quad_order;
            if n > max_nodes {
                return Err(resource(n, max_nodes));
            }
            let piece = &mesh.pieces[0];
            let pts: Vec<CurvePoint> = (0..n).map(|j| piece.eval(j as f64 / n as f64)).collect();
            let length = pts.iter().map(|p| p.speed()).sum::<f64>() / n as f64;
            mesh.panels.push(Panel {
                edge: 0,
                piece: 0,
                t0: 0.0,
                t1: 1.0,
                level: 0,
                order: n,
                start: 0,
                length,
            });
            for p in pts {
                mesh.push_node(&p, p.speed() / n as f64);
            }
            mesh.vertex_offsets.push(n);
            return Ok(mesh);
        }

        let perimeter = d.perimeter();
        let min_len = MIN_PANEL_FRACTION * perimeter;
        let mut intervals: Vec<(usize, usize, f64, f64, usize)> = Vec::new();
        let mut piece_base = 0;
        for (e, edge) in d.edges.iter().enumerate() {
            let lengths: Vec<f64> = edge.pieces.iter().map(Piece::length).collect();
            let counts = distribute(panels_per_edge, &lengths);
            let mut edge_iv: Vec<(usize, f64, f64, usize)> = Vec::new();
            for (k, &m) in counts.iter().enumerate() {
                for i in 0..m {
                    edge_iv.push((piece_base + k, i as f64 / m as f64, (i + 1) as f64 / m as f64, 0));
                }
            }
            let len_of = |iv: &(usize, f64, f64, usize), pieces: &[Piece]| {
                piece_len(&pieces[iv.0], iv.1, iv.2)
            };
            if !d.is_smooth() {
                for level in 1..=grading_levels {
                    let first = edge_iv[0];
                    let mid = 0.5 * (first.1 + first.2);
                    if len_of(&(first.0, first.1, mid, 0), &mesh.pieces) < min_len {
                        break;
                    }
                    edge_iv[0] = (first.0, mid, first.2, level);
                    edge_iv.insert(0, (first.0, first.1, mid, level));
                }
                for level in 1..=grading_levels {
                    let last = *edge_iv.last().unwrap();
                    let mid = 0.5 * (last.1 + last.2);
                    if len_of(&(last.0, mid, last.2, 0), &mesh.pieces) < min_len {
                        break;
                    }
                    let n = edge_iv.len();
                    edge_iv[n - 1] = (last.0, last.1, mid, level);
                    edge_iv.push((last.0, mid, last.2, level));
                }
            }
            intervals.extend(edge_iv.into_iter().map(|(p, t0, t1, l)| (e, p, t0, t1, l)));
            piece_base += edge.pieces.len();
        }
        let total = intervals.len() * quad_order;
        if total > max_nodes {
            return Err(resource(total, max_nodes));
        }
        let gauss = GaussRule::new(quad_order);
        let mut current_edge = 0;
        for (e, p, t0, t1, level) in intervals {
            if e != current_edge {
                mesh.vertex_offsets.push(mesh.nodes.len());
                current_edge = e;
            }
            let panel = Panel {
                edge: e,
                piece: p,
                t0,
                t1,
                level,
                order: quad_order,
                start: mesh.nodes.len(),
                length: piece_len(&mesh.pieces[p], t0, t1),
            };
            let half = 0.5 * (t1 - t0);
            for (x, w) in gauss.nodes.iter().zip(&gauss.weights) {
                let pt = mesh.pieces[p].eval(panel.param(*x));
                mesh.push_node(&pt, w * half * pt.speed());
            }
            mesh.panels.push(panel);
        }
        mesh.vertex_offsets.push(mesh.nodes.len());
        Ok(mesh)
    }

    fn push_node(&mut self, p: &CurvePoint, w: f64) {
        self.nodes.push(p.z);
        self.weights.push(w);
        self.tangents.push(p.unit_tangent());
        self.normals.push(p.outward_normal());
        self.curvature.push(p.curvature());
        self.speed.push(p.speed());
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Boundary point on `panel` at reference coordinate `x in [-1, 1]`.
    pub fn panel_point(&self, panel: &Panel, x: f64) -> CurvePoint {
        self.pieces[panel.piece].eval(panel.param(x))
    }

    /// Panel containing node `i`.
    pub fn panel_of(&self, i: usize) -> usize {
        if self.rule == MeshRule::Trapezoid {
            return 0;
        }
        i / self.quad_order
    }

    /// Node index of the panel-local position `k` on panel `p`.
    pub fn node_of(&self, p: usize, k: usize) -> usize {
        self.panels[p].start + k
    }

    /// Smallest arclength of any panel (or node spacing for the trapezoid rule).
    pub fn min_spacing(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Local node spacing nearest to `z`: the weight of the closest node.
    pub fn local_spacing(&self, z: C64) -> (f64, f64) {
        let mut best = (f64::INFINITY, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let d = (x - z).norm();
            if d < best.0 {
                best = (d, *w);
            }
        }
        best
    }

    /// Refined copy of the quadrature on one panel, used for near-field evaluation:
    /// `(points, arclength weights)` from `sub` sub-panels of the given order.
    pub fn panel_refined(&self, panel: &Panel, sub: usize, rule: &GaussRule) -> Vec<(CurvePoint, f64)> {
        let mut out = Vec::with_capacity(sub * rule.len());
        for s in 0..sub {
            let a = -1.0 + 2.0 * s as f64 / sub as f64;
            let b = -1.0 + 2.0 * (s + 1) as f64 / sub as f64;
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let xr = 0.5 * (a + b) + 0.5 * (b - a) * x;
                let pt = self.panel_point(panel, xr);
                let dt = 0.5 * (panel.t1 - panel.t0);
                out.push((pt, w * 0.5 * (b - a) * dt * pt.speed()));
            }
        }
        out
    }
}

fn resource(n: usize, cap: usize) -> Error {
    Error::Resource(format!("mesh would have {n} nodes, above the cap of {cap}"))
}

fn piece_len(piece: &Piece, t0: f64, t1: f64) -> f64 {
    let rule = GaussRule::new(16);
    let h = 0.5 * (t1 - t0);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(x, w)| w * h * piece.eval(0.5 * (t0 + t1) + h * x).speed())
        .sum()
}

/// Splits `total` panels across pieces in proportion to length, at least one each.
fn distribute(total: usize, lengths: &[f64]) -> Vec<usize> {
    let n = lengths.len();
    if n == 1 {
        return vec![total];
    }
    let sum: f64 = lengths.iter().sum();
    let mut counts: Vec<usize> = lengths
        .iter()
        .map(|l| ((l / sum) * total as f64).round().max(1.0) as usize)
        .collect();
    // nudge the largest pieces until the total matches (never below one panel)
    while counts.iter().sum::<usize>() > total.max(n) {
        let k = (0..n)
            .filter(|&k| counts[k] > 1)
            .max_by(|&a, &b| (counts[a] as f64 / lengths[a]).total_cmp(&(counts[b] as f64 / lengths[b])))
            .unwrap();
        counts[k] -= 1;
    }
    while counts.iter().sum::<usize>() < total {
        let k = (0..n)
            .max_by(|&a, &b| (lengths[a] / counts[a] as f64).total_cmp(&(lengths[b] / counts[b] as f64)))
            .unwrap();
        counts[k] += 1;
    }
    counts
}
