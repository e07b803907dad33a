//! Single and double layer potentials off the boundary, including points close to it.

use np_spectra::geometry::{preset_from_str, BoundaryMesh, MeshRule, MAX_NODES_DEFAULT};
use np_spectra::layerpot::{eval_double_layer, eval_single_layer};
use np_spectra::C64;

fn main() -> np_spectra::Result<()> {
    let d = preset_from_str("disk:0.4")?;
    let mesh = BoundaryMesh::build(&d, 16, 0, 16, MeshRule::Gauss, MAX_NODES_DEFAULT)?;
    let ones = vec![1.0; mesh.len()];
    // Gauss: the double layer of a unit density is -1 inside and 0 outside;
    // the single layer of the unit density on |z| = r is -r log r inside.
    let points = [0.0, 0.2, 0.39, 0.3999, 0.4001, 0.6].map(|x| C64::new(x, 0.0));
    let dl = eval_double_layer(&mesh, &ones, &points)?;
    let sl = eval_single_layer(&mesh, &ones, &points)?;
    for ((p, a), b) in points.iter().zip(&dl.values).zip(&sl.values) {
        println!("x = {:.4}: double {a:+.12}  single {b:+.12}", p.re);
    }
    println!("exact single layer inside: {:+.12}", -0.4 * 0.4f64.ln());
    for w in dl.warnings.iter().chain(&sl.warnings) {
        println!("warning: {w}");
    }
    Ok(())
}
