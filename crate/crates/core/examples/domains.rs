//! Builds every preset domain and prints its corners, area and mesh size.

use np_spectra::geometry::{build_boundary_mesh, preset_from_str, PRESETS};

fn main() -> np_spectra::Result<()> {
    for (name, _) in PRESETS {
        let d = preset_from_str(name)?;
        let angles: Vec<String> = d
            .interior_angles()
            .iter()
            .map(|t| format!("{:.1}", t.to_degrees()))
            .collect();
        let mesh = build_boundary_mesh(&d.rescale_to_normal(), 8, 6, 16)?;
        println!(
            "{name:16} area {:8.4}  perimeter {:7.4}  nodes {:5}  corners [{}]",
            d.area(),
            d.perimeter(),
            mesh.len(),
            angles.join(", ")
        );
    }
    let json = r#"{"kind": "arc_polygon", "vertices": [[0,0],[1,0],[0.5,0.8]], "bulges": [0.2, 0, -0.1]}"#;
    let d = np_spectra::geometry::domain_from_json(json)?;
    println!("json arc triangle: angles {:?}", d.interior_angles());
    Ok(())
}
