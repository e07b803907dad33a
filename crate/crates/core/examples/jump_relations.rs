//! Checks the jump relations of the single and double layer potentials on a circle
//! and, away from the corners, on the square.

use np_spectra::geometry::{preset_from_str, BoundaryMesh, MeshRule, MAX_NODES_DEFAULT};
use np_spectra::layerpot::{jump_test, OperatorMatrices};

fn main() -> np_spectra::Result<()> {
    for (name, panels, grading) in [("disk", 32, 0), ("square", 8, 8)] {
        let d = preset_from_str(name)?.rescale_to_normal();
        let mesh = BoundaryMesh::build(&d, panels, grading, 16, MeshRule::Auto, MAX_NODES_DEFAULT)?;
        let ops = OperatorMatrices::assemble(&mesh)?;
        let f: Vec<f64> = mesh.nodes.iter().map(|z| (3.0 * z.re).sin() + z.im).collect();
        let g: Vec<f64> = mesh.nodes.iter().map(|z| z.re * z.re - z.im).collect();
        let clearance = if d.is_smooth() { 0.0 } else { 0.1 * d.diameter_estimate() };
        let rep = jump_test(&mesh, &ops, &f, &g, &d.vertices(), clearance)?;
        println!("{name} (n = {}, {} nodes tested)", mesh.len(), rep.tested_nodes);
        println!("  double layer  inside {:.1e}  outside {:.1e}", rep.double_interior, rep.double_exterior);
        println!("  single layer  inside {:.1e}  outside {:.1e}", rep.single_interior, rep.single_exterior);
    }
    Ok(())
}
