//! Singular values of the Bergman-space operator are unchanged by Mobius maps,
//! and the bounded image of the exterior carries the same spectral radius.

use np_spectra::beurling::{exterior_image, mobius_invariance_check, BergmanConfig};
use np_spectra::conformal::MobiusMap;
use np_spectra::geometry::preset_from_str;
use np_spectra::pipeline::{nystrom_spectrum, NystromConfig};
use np_spectra::C64;

fn main() -> np_spectra::Result<()> {
    let d = preset_from_str("ellipse:2,1")?;
    for far in [2.0, 3.0, 6.0] {
        let z0 = C64::new(far * d.diameter_estimate(), 0.5);
        let dev = mobius_invariance_check(&d, &MobiusMap::inversion(z0), &BergmanConfig::with_degree(24))?;
        println!("pole at {z0:.2}: top-10 singular value deviation {dev:.1e}");
    }
    for name in ["ellipse:2,1", "square"] {
        let d = preset_from_str(name)?;
        let cfg = if d.is_smooth() { NystromConfig::new(32, 0, 16) } else { NystromConfig::new(8, 6, 16) };
        let inner = nystrom_spectrum(&d, &cfg)?.result().spectral_radius;
        let img = exterior_image(&d, None)?;
        let outer = nystrom_spectrum(&img, &cfg)?.result().spectral_radius;
        let angles: Vec<String> = img.interior_angles().iter().map(|t| format!("{:.0}", t.to_degrees())).collect();
        println!("{name}: interior radius {inner:.4}, exterior image radius {outer:.4}, image corners [{}]", angles.join(", "));
    }
    Ok(())
}
