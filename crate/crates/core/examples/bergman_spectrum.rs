//! Singular values of the Beurling-type operator in the Bergman polynomial basis.
//! On the ellipse with semi-axes a, b they are the powers of (a - b) / (a + b).

use np_spectra::geometry::preset_from_str;
use np_spectra::pipeline::{bergman_spectrum, BergmanConfig};

fn main() -> np_spectra::Result<()> {
    let d = preset_from_str("ellipse:2,1")?;
    let run = bergman_spectrum(&d, &BergmanConfig::with_degree(24))?;
    println!(
        "degree {} (condition {:.1e}), symmetry residual {:.1e}",
        run.basis.effective_degree, run.basis.condition, run.g.symmetry_residual
    );
    for (k, s) in run.spectrum.top_abs(12).iter().step_by(2).enumerate() {
        let exact = (1.0f64 / 3.0).powi(k as i32 + 1);
        println!("sigma_{:<2} {s:.15}  error {:.1e}", k + 1, (s - exact).abs());
    }
    Ok(())
}
