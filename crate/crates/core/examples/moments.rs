//! Complex moments from boundary integrals, checked against the area rule, and the
//! orthonormal polynomial basis built from them.

use np_spectra::bergman::{boundary_moments, orthonormal_basis, MomentReport, COND_CAP_DEFAULT};
use np_spectra::geometry::{preset_from_str, AreaQuadrature, BoundaryMesh, MeshRule, MAX_NODES_DEFAULT};

fn main() -> np_spectra::Result<()> {
    for name in ["disk", "ellipse:2,1", "square", "lens:pi/3,pi/4"] {
        let d = preset_from_str(name)?.centered();
        let grading = if d.is_smooth() { 0 } else { 10 };
        let mesh = BoundaryMesh::build(&d, 16, grading, 16, MeshRule::Gauss, MAX_NODES_DEFAULT)?;
        let table = boundary_moments(&mesh, 30)?;
        let area = AreaQuadrature::from_mesh(&mesh, 24)?;
        let mut worst: f64 = 0.0;
        for m in 0..=8u32 {
            for n in 0..=(8 - m) {
                let a = area.integrate(|z| z.powu(m) * z.conj().powu(n));
                worst = worst.max((table.mu[m as usize][n as usize] - a).norm());
            }
        }
        let report = MomentReport::new(table.clone(), orthonormal_basis(&table, COND_CAP_DEFAULT)?);
        println!(
            "{name:16} area {:.6}  moment check {worst:.1e}  basis degree {}  orthonormality defect {:.1e}",
            table.area(),
            report.basis.effective_degree,
            report.orthonormality_defect
        );
    }
    Ok(())
}
