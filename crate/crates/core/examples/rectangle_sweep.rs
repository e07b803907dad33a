//! Spectral radius of rectangles as the aspect ratio grows. Near the square the
//! radius sits at the corner value 1/2; elongated rectangles pick up eigenvalues above it.

use np_spectra::geometry::preset;
use np_spectra::pipeline::{nystrom_spectrum, NystromConfig};

fn main() -> np_spectra::Result<()> {
    println!("aspect  radius   above 1/2");
    for k in 0..=10 {
        let aspect = 1.0 + 0.3 * k as f64;
        let d = preset("rectangle", &[aspect, 1.0])?;
        let r = nystrom_spectrum(&d, &NystromConfig::new(8, 6, 16))?;
        let radius = r.result().spectral_radius;
        println!("{aspect:5.2}   {radius:.4}   {:+.4}", radius - 0.5);
    }
    Ok(())
}
