use std::f64::consts::PI;

use proptest::prelude::*;

use smcf_core::diagnostics::find_self_intersection;
use smcf_core::flows::{remesh::remesh_curve, Geometry};
use smcf_core::meshgeom::{CurveMesh, Orientation, Point, SurfaceMesh};
use smcf_core::{EnergyDensity, FlowState};

/// Star-shaped closed curve with random Fourier radius and random concentration.
fn star(n: usize, amp: &[f64], phase: f64, conc: &[f64]) -> CurveMesh {
    let nodes: Vec<Point> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            let r = 1.0 + amp.iter().enumerate().map(|(k, a)| a * ((k + 2) as f64 * t + phase).cos()).sum::<f64>();
            [r * t.cos(), r * t.sin()]
        })
        .collect();
    let c = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            1.0 + conc.iter().enumerate().map(|(k, a)| a * ((k + 1) as f64 * t).sin()).sum::<f64>()
        })
        .collect();
    CurveMesh::new(nodes, Orientation::NormalRightOfTangent, c).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn step_conserves_mass_and_lowers_energy(
        amp in proptest::collection::vec(-0.06f64..0.06, 3),
        conc in proptest::collection::vec(-0.3f64..0.3, 2),
        phase in 0.0f64..6.28,
        s in -2.0f64..-0.2,
    ) {
        let mesh = star(128, &amp, phase, &conc);
        let st = FlowState::new(Geometry::Curve(mesh), EnergyDensity::power_law(s, 1.0).unwrap()).unwrap();
        let next = st.step(1e-3).unwrap();
        let m0 = smcf_core::diagnostics::mass(&st).unwrap();
        let m1 = smcf_core::diagnostics::mass(&next).unwrap();
        prop_assert!((m1 - m0).abs() <= 1e-12 * m0);
        let e0 = smcf_core::diagnostics::energy(&st).unwrap();
        let e1 = smcf_core::diagnostics::energy(&next).unwrap();
        prop_assert!(e1 <= e0 * (1.0 + 1e-10));
        prop_assert!(smcf_core::diagnostics::area(&next).unwrap() < smcf_core::diagnostics::area(&st).unwrap());
        prop_assert!(smcf_core::diagnostics::min_concentration(&next) > 0.0);
    }

    #[test]
    fn laplacian_integrates_to_zero(
        amp in proptest::collection::vec(-0.1f64..0.1, 3),
        conc in proptest::collection::vec(-0.5f64..0.5, 2),
        phase in 0.0f64..6.28,
    ) {
        let mesh = star(97, &amp, phase, &conc);
        let lap = mesh.laplace_beltrami(&mesh.concentration).unwrap();
        let total = mesh.surface_integral(&lap).unwrap();
        let scale = mesh.surface_integral(&lap.iter().map(|x| x.abs()).collect::<Vec<_>>()).unwrap();
        prop_assert!(total.abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn remesh_conserves_mass(
        amp in proptest::collection::vec(-0.1f64..0.1, 3),
        conc in proptest::collection::vec(-0.5f64..0.5, 2),
        phase in 0.0f64..6.28,
        pin in 1usize..150,
    ) {
        let mesh = star(151, &amp, phase, &conc);
        let before = mesh.surface_integral(&mesh.concentration).unwrap();
        let out = remesh_curve(&mesh, &[0, pin]).unwrap();
        let after = out.surface_integral(&out.concentration).unwrap();
        prop_assert!((after - before).abs() <= 1e-12 * before);
        prop_assert_eq!(out.nodes[pin], mesh.nodes[pin]);
    }

    #[test]
    fn intersection_detection_ignores_labels(
        shift in 0usize..80,
        lobes in 2usize..5,
        embedded in any::<bool>(),
    ) {
        let n = 80;
        let pts: Vec<Point> = (0..n)
            .map(|i| {
                let t = 2.0 * PI * (i as f64 + 0.37) / n as f64;
                if embedded {
                    let r = 1.0 + 0.2 * (lobes as f64 * t).cos();
                    [r * t.cos(), r * t.sin()]
                } else {
                    // limaçon with an inner loop
                    let r = 0.5 + (t).cos();
                    [r * t.cos(), r * t.sin()]
                }
            })
            .collect();
        let base = find_self_intersection(&pts).is_some();
        prop_assert_eq!(base, !embedded);
        let mut rot = pts.clone();
        rot.rotate_left(shift);
        prop_assert_eq!(find_self_intersection(&rot).is_some(), base);
        rot.reverse();
        prop_assert_eq!(find_self_intersection(&rot).is_some(), base);
    }

    #[test]
    fn power_law_scaling_factor_identity(s in -3.0f64..0.9, alpha in 0.0f64..3.0, c in 0.05f64..5.0) {
        let d = EnergyDensity::power_law(s, alpha).unwrap();
        let g = d.scaling_factor(c, 0).unwrap();
        let direct = d.evaluate(c, 0).unwrap() - d.evaluate(c, 1).unwrap() * c;
        prop_assert!((g - c.powf(s)).abs() <= 1e-12 * c.powf(s));
        prop_assert!((g - direct).abs() <= 1e-10 * (1.0 + alpha * c + c.powf(s)));
    }
}
