//! Domains, interior angles and boundary / area quadrature.

mod area;
mod curve;
mod domain;
mod mesh;
mod presets;

pub use area::{build_area_quadrature, AreaQuadrature};
pub use curve::{CurvePoint, Piece};
pub use domain::{
    DomainKind, DomainSpec, Edge, ANGLE_DEGENERACY_TOL, NORMAL_RADIUS, RESCALE_TARGET,
};
pub use mesh::{build_boundary_mesh, BoundaryMesh, MeshRule, Panel, MAX_NODES_DEFAULT};
pub(crate) use curve::circumcenter;
pub use presets::{build_domain, domain_from_json, parse_number, preset, preset_from_str, PRESETS};
