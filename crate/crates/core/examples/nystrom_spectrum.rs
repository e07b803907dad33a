//! Nystrom spectrum of the square: radius, Plemelj residual and the extreme eigenvalues.
//!
//! `cargo run --release --example nystrom_spectrum -- lshape 10`

use np_spectra::geometry::preset_from_str;
use np_spectra::pipeline::{nystrom_spectrum, NystromConfig};

fn main() -> np_spectra::Result<()> {
    let mut args = std::env::args().skip(1);
    let domain = args.next().unwrap_or_else(|| "square".into());
    let grading: usize = args.next().and_then(|g| g.parse().ok()).unwrap_or(8);

    let d = preset_from_str(&domain)?;
    let run = nystrom_spectrum(&d, &NystromConfig::new(8, grading, 16))?;
    let r = run.result();
    println!("{domain}: n = {}, grading {grading}", r.n_nodes);
    println!("spectral radius   {:.6}", r.spectral_radius);
    println!("plemelj residual  {:.2e}", r.plemelj_residual.unwrap_or(f64::NAN));
    println!("pairing residual  {:.2e}", r.pairing_residual);
    let mz = r.mean_zero_eigenvalues();
    println!("largest  {:?}", &mz[..4]);
    println!("smallest {:?}", &mz[mz.len() - 4..]);
    for w in &r.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
