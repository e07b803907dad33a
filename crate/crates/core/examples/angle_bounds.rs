//! Kuhnau lower bound and the essential-spectrum angle condition on a few domains,
//! checked against computed Nystrom spectra.

use np_spectra::bounds::{validate_domain, BOUND_TOL_DEFAULT};
use np_spectra::geometry::preset_from_str;
use np_spectra::pipeline::{nystrom_spectrum, NystromConfig};

fn main() -> np_spectra::Result<()> {
    for name in ["square", "regular_ngon:6", "rectangle:3,1", "lens:pi/4,pi/5", "lshape"] {
        let d = preset_from_str(name)?;
        let run = nystrom_spectrum(&d, &NystromConfig::new(8, 6, 16))?;
        let rep = validate_domain(&d, &[run.result()], BOUND_TOL_DEFAULT)?;
        let ess = match rep.essbound_upper {
            Some(u) => format!("{u:.4} (vertex {} last)", rep.essbound_permutation.unwrap()),
            None => "condition fails".into(),
        };
        println!(
            "{name:16} radius {:.4}  kuhnau {:.4}  essential bound {ess}",
            run.result().spectral_radius,
            rep.kuhnau_lower
        );
        for v in &rep.verdicts {
            println!("    {:22} {} margin {:+.4}  {}", v.name, if v.passed { "pass" } else { "FAIL" }, v.margin, v.note);
        }
    }
    Ok(())
}
