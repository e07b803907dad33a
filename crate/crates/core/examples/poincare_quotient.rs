//! Energy quotient of single layer potentials: equal to the eigenvalue at an
//! eigenvector, bounded by the spectral radius elsewhere.

use nalgebra::DVector;
use np_spectra::geometry::preset_from_str;
use np_spectra::layerpot::{equilibrium_density, mean_zero_projection, poincare_quotient};
use np_spectra::pipeline::{nystrom_spectrum, NystromConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> np_spectra::Result<()> {
    let d = preset_from_str("truncated_wedge")?;
    let run = nystrom_spectrum(&d, &NystromConfig::new(8, 6, 16))?;
    let spec = &run.spectrum;
    let top = spec.top_column().expect("nonconstant spectrum");
    let q = poincare_quotient(&run.ops, &spec.density(top))?;
    println!("top eigenvalue {:.10}, quotient {:.10}", spec.raw_eigenvalues[top], q.quotient);
    println!("  interior energy {:.4e}, exterior energy {:.4e}", q.interior_energy, q.exterior_energy);

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = run.mesh.len();
    let mut largest: f64 = 0.0;
    for _ in 0..200 {
        let g = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let g = mean_zero_projection(spec, &run.ops.weights, &g);
        largest = largest.max(poincare_quotient(&run.ops, &g)?.quotient.abs());
    }
    println!("largest |quotient| over 200 random densities {largest:.6} <= radius {:.6}", run.result().spectral_radius);

    let eq = equilibrium_density(&run.ops.k, &run.ops.weights, Some(&run.ops.s))?;
    println!(
        "equilibrium density: singular gap {:.1e} / {:.1e}, potential spread {:.1e}",
        eq.sigma_min,
        eq.sigma_next,
        eq.potential_relative_spread.unwrap_or(f64::NAN)
    );
    Ok(())
}
