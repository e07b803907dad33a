//! Product integration against the panel's Lagrange basis for targets close to a
//! panel. Sub-intervals are halved until each is no longer than its distance to
//! the target, then integrated with a fixed Gauss rule.

use num_complex::Complex64 as C64;

use crate::geometry::{BoundaryMesh, CurvePoint, Panel};
use crate::quadrature::GaussRule;

/// Panels whose distance to the target is below this multiple of their length
/// are integrated by [`product_weights`].
pub const NEAR_FACTOR: f64 = 1.0;

const LEAF_ORDER: usize = 16;
const MAX_DEPTH: usize = 52;

/// Reusable buffers for one thread.
pub struct NearWorkspace {
    leaf: GaussRule,
    panel_rule: GaussRule,
    basis: Vec<f64>,
    stack: Vec<(f64, f64, usize)>,
}

impl NearWorkspace {
    pub fn new(order: usize) -> Self {
        NearWorkspace {
            leaf: GaussRule::new(LEAF_ORDER),
            panel_rule: GaussRule::new(order),
            basis: vec![0.0; order],
            stack: Vec::new(),
        }
    }
}

/// Distance from `z` to a panel, estimated from its nodes and endpoints.
pub fn panel_distance(mesh: &BoundaryMesh, panel: &Panel, z: C64) -> f64 {
    let mut d = f64::INFINITY;
    for i in panel.nodes() {
        d = d.min((mesh.nodes[i] - z).norm());
    }
    for x in [-1.0, 1.0] {
        d = d.min((mesh.panel_point(panel, x).z - z).norm());
    }
    d
}

pub fn is_near(mesh: &BoundaryMesh, panel: &Panel, z: C64) -> bool {
    panel_distance(mesh, panel, z) < NEAR_FACTOR * panel.length
}

/// `out[k] = int_panel kernel(y) l_k(y) ds(y)` with `l_k` the Lagrange basis on the
/// panel's Gauss nodes. `kernel` receives the boundary point and its outward normal.
pub fn product_weights(
    mesh: &BoundaryMesh,
    panel: &Panel,
    target: C64,
    kernel: impl Fn(&CurvePoint, C64) -> f64,
    ws: &mut NearWorkspace,
    out: &mut [f64],
) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let half_t = 0.5 * (panel.t1 - panel.t0);
    ws.stack.clear();
    ws.stack.push((-1.0, 1.0, 0));
    while let Some((a, b, depth)) = ws.stack.pop() {
        let pa = mesh.panel_point(panel, a).z;
        let pb = mesh.panel_point(panel, b).z;
        let pm = mesh.panel_point(panel, 0.5 * (a + b));
        let len = pm.speed() * half_t * (b - a);
        let dist = (pa - target).norm().min((pb - target).norm()).min((pm.z - target).norm());
        if dist < len && depth < MAX_DEPTH {
            let m = 0.5 * (a + b);
            ws.stack.push((m, b, depth + 1));
            ws.stack.push((a, m, depth + 1));
            continue;
        }
        let h = 0.5 * (b - a);
        for (x, w) in ws.leaf.nodes.iter().zip(&ws.leaf.weights) {
            let xr = 0.5 * (a + b) + h * x;
            let p = mesh.panel_point(panel, xr);
            let f = kernel(&p, p.outward_normal()) * w * h * half_t * p.speed();
            ws.panel_rule.lagrange_at(xr, &mut ws.basis);
            for (o, l) in out.iter_mut().zip(&ws.basis) {
                *o += f * l;
            }
        }
    }
}
