//! Schwarz-Christoffel maps of the disk onto unbounded convex polygons: boundary
//! trace, convexity certificate and the Krushkal value 1 - theta_min / pi.

use std::f64::consts::PI;

use np_spectra::bounds::krushkal_value;
use np_spectra::conformal::{convexity_certificate, sc_map, sc_map_path, trace_boundary, SCMapSpec};
use np_spectra::C64;

fn main() -> np_spectra::Result<()> {
    let cases = [
        ("right-angle pair", vec![0.0, PI], vec![PI / 2.0, PI / 2.0]),
        ("wedge", vec![0.0], vec![PI / 3.0]),
        ("three vertices", vec![0.3, 2.0, 4.0], vec![0.9 * PI, 0.8 * PI, 0.4 * PI]),
        ("five sharp vertices", (0..5).map(|k| 1.2 * k as f64).collect(), vec![PI / 4.0; 5]),
    ];
    for (name, args, angles) in cases {
        let spec = SCMapSpec::new(args.iter().map(|a| C64::from_polar(1.0, *a)).collect(), angles)?;
        let cert = convexity_certificate(&spec, 512)?;
        print!("{name:20} angle condition {:5}  certificate {:5} (min {:+.3e})", cert.angle_condition, cert.holds, cert.min_value);
        if cert.holds {
            print!("  krushkal {:.4}", krushkal_value(&spec.angles)?);
        }
        println!();
        let w = C64::new(0.3, 0.6);
        let a = sc_map(&spec, w, 1e-13)?;
        let b = sc_map_path(&spec, &[C64::new(0.0, 0.0), C64::new(0.3, 0.0), w], 1e-13)?;
        let trace = trace_boundary(&spec, 0.99, 64, 1e-10)?;
        let far = trace.iter().map(|z| z.norm()).fold(0.0, f64::max);
        println!("{:20} path dependence {:.1e}, trace reaches |z| = {far:.1}", "", (a - b).norm());
    }
    Ok(())
}
