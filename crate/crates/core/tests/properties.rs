use std::f64::consts::PI;

use nalgebra::DVector;
use np_spectra::bounds::{essbound_check, essbound_slack, krushkal_value, kuhnau_lower_bound};
use np_spectra::geometry::{preset_from_str, BoundaryMesh, MeshRule, MAX_NODES_DEFAULT};
use np_spectra::layerpot::{mean_zero_projection, poincare_quotient, symmetrized_spectrum, OperatorMatrices};
use np_spectra::C64;
use proptest::prelude::*;

fn angle_list() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..(2.0 * PI - 0.01), 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angles_survive_similarities(
        preset in prop::sample::select(vec!["square", "lens:pi/4,pi/5", "regular_ngon:5", "truncated_wedge", "lshape", "sector:2pi/3"]),
        scale in 0.1f64..10.0,
        rot in 0.0f64..(2.0 * PI),
        sx in -5.0f64..5.0,
        sy in -5.0f64..5.0,
    ) {
        let d = preset_from_str(preset).unwrap();
        let e = d.transform_affine(C64::from_polar(scale, rot), C64::new(sx, sy));
        let a = d.interior_angles();
        let b = e.interior_angles();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let ka = kuhnau_lower_bound(&a).unwrap();
        let kb = kuhnau_lower_bound(&b).unwrap();
        prop_assert!((ka - kb).abs() < 1e-10);
    }

    #[test]
    fn kuhnau_is_max_deviation(angles in angle_list()) {
        let k = kuhnau_lower_bound(&angles).unwrap();
        prop_assert!((0.0..1.0).contains(&k));
        prop_assert!(angles.iter().all(|t| (1.0 - t / PI).abs() <= k));
    }

    #[test]
    fn essbound_matches_kuhnau_when_it_holds(angles in prop::collection::vec(0.01..(PI - 0.01), 1..6)) {
        let e = essbound_check(&angles).unwrap();
        if e.holds {
            prop_assert_eq!(e.upper.unwrap(), kuhnau_lower_bound(&angles).unwrap());
            prop_assert!(essbound_slack(&angles, e.permutation.unwrap()) >= -1e-12);
            prop_assert_eq!(e.upper.unwrap(), krushkal_value(&angles).unwrap());
        } else {
            prop_assert!((0..angles.len()).all(|n| essbound_slack(&angles, n) < 0.0));
        }
    }

    #[test]
    fn cyclic_shift_keeps_condition(angles in prop::collection::vec(0.01..(PI - 0.01), 1..6), shift in 0usize..6) {
        let mut rotated = angles.clone();
        rotated.rotate_left(shift % angles.len());
        prop_assert_eq!(essbound_check(&angles).unwrap().holds, essbound_check(&rotated).unwrap().holds);
    }
}

fn small_run(preset: &str) -> (OperatorMatrices, np_spectra::layerpot::SymmetrizedSpectrum) {
    let d = preset_from_str(preset).unwrap().rescale_to_normal();
    let g = if d.is_smooth() { 0 } else { 4 };
    let mesh = BoundaryMesh::build(&d, 4, g, 8, MeshRule::Auto, MAX_NODES_DEFAULT).unwrap();
    let ops = OperatorMatrices::assemble(&mesh).unwrap();
    let spec = symmetrized_spectrum(&ops, true).unwrap();
    (ops, spec)
}

#[test]
fn weighted_single_layer_is_symmetric() {
    for p in ["ellipse:3,1", "square", "lens:pi/3,pi/4"] {
        let (ops, _) = small_run(p);
        let n = ops.s.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let a = ops.weights[i] * ops.s[(i, j)];
                let b = ops.weights[j] * ops.s[(j, i)];
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst < 1e-14, "{p}: {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quotient_bounded_by_radius(seed in any::<u64>(), preset in prop::sample::select(vec!["ellipse:2,1", "square", "truncated_wedge"])) {
        let (ops, spec) = small_run(preset);
        let n = ops.s.nrows();
        let mut x = seed | 1;
        let g = DVector::from_fn(n, |_, _| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            (x as f64 / u64::MAX as f64) - 0.5
        });
        let g = mean_zero_projection(&spec, &ops.weights, &g);
        let q = poincare_quotient(&ops, &g).unwrap();
        prop_assert!(q.quotient.abs() <= spec.result.spectral_radius + 1e-10);
        prop_assert!(q.interior_energy > 0.0 && q.exterior_energy > 0.0);
    }
}
