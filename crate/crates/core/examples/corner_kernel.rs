//! The kernel phi'(w) / (phi(eta) - phi(w)) - 1 / (eta - w) is zero for the identity
//! and bounded near the diagonal (fitted exponent about 0) for analytic maps with
//! nonvanishing derivative.

use np_spectra::conformal::{fit_singularity_exponent, MobiusMap, PowerMap};
use np_spectra::C64;

fn main() -> np_spectra::Result<()> {
    let id = fit_singularity_exponent(&MobiusMap::identity(), C64::new(0.0, 0.0), 0.3, 200, 1)?;
    println!("identity: max |K| = {:.1e}, exponent {:?}", id.max_abs, id.exponent);
    let m = MobiusMap::new(C64::new(1.0, 0.0), C64::new(0.2, 0.0), C64::new(0.3, 0.1), C64::new(1.0, 0.0))?;
    let fit = fit_singularity_exponent(&m, C64::new(0.0, 0.0), 0.3, 500, 1)?;
    println!("mobius:   max |K| = {:.2}, exponent {:+.3}", fit.max_abs, fit.exponent.unwrap());
    for alpha in [0.5, 2.0 / 3.0, 2.0] {
        let p = PowerMap { center: C64::new(0.0, 0.0), exponent: alpha };
        let fit = fit_singularity_exponent(&p, C64::new(0.5, 0.0), 0.2, 500, 2)?;
        println!("z^{alpha:.3}:  max |K| = {:.2}, exponent {:+.3}", fit.max_abs, fit.exponent.unwrap());
    }
    Ok(())
}
