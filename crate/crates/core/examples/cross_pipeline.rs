//! Runs both discretizations on one domain and prints the deviation table.

use np_spectra::geometry::preset_from_str;
use np_spectra::pipeline::{bergman_spectrum, deviation_table, nystrom_spectrum, BergmanConfig, NystromConfig};

fn main() -> np_spectra::Result<()> {
    let domain = std::env::args().nth(1).unwrap_or_else(|| "ellipse:3,2".into());
    let d = preset_from_str(&domain)?;
    let cfg = if d.is_smooth() { NystromConfig::new(32, 0, 16) } else { NystromConfig::default() };
    let n = nystrom_spectrum(&d, &cfg)?;
    let b = bergman_spectrum(&d, &BergmanConfig::with_degree(24))?;
    println!("{domain}: nystrom radius {:.6}, bergman radius {:.6}", n.result().spectral_radius, b.spectrum.spectral_radius);
    println!("rank  nystrom            bergman            deviation");
    for row in deviation_table(n.result(), &b.spectrum, 10) {
        println!("{:4}  {:.15}  {:.15}  {:.1e}", row.rank, row.nystrom, row.bergman, row.deviation);
    }
    Ok(())
}
