use proptest::prelude::*;
use qswitch::cvcase::oracle::{
    braiding_identity_gap, closed_values, f_s_trace, fock_oracle_report, oracle_values,
    weyl_identity_gap, CvFamily, CvScenario,
};
use qswitch::cvcase::{
    alpha_min, delta_qs_displacements, delta_qs_displacements_simplified, delta_sm_aligned,
    delta_sm_disp_squeeze, f_s_disp_squeeze, n_max_rule, DisplacementParams, SqueezeAlignment,
    SqueezeParams,
};
use qswitch::optim::golden_section;
use qswitch::sample::{self, random_bloch};
use qswitch::states::{BlochState, ControlHamiltonianParams, ThermalParams};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn thermal(beta: f64) -> ThermalParams {
    ThermalParams::new(beta, 1.0).unwrap()
}

fn disp(abs: f64, phase: f64) -> DisplacementParams {
    DisplacementParams::new(abs, phase).unwrap()
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn weyl_identity_on_safe_subspace(a in 0.0f64..1.2, pa in 0.0f64..TAU, b in 0.0f64..1.2, pb in 0.0f64..TAU) {
        let (gap, k) = weyl_identity_gap(&disp(a, pa), &disp(b, pb), 80);
        prop_assert!(k >= 20);
        prop_assert!(gap < 1e-10);
    }

    #[test]
    fn braiding_identity_on_safe_subspace(a in 0.0f64..1.0, pa in 0.0f64..TAU, z in 0.0f64..0.5, xi in 0.0f64..TAU) {
        let s = SqueezeParams::new(z, xi).unwrap();
        let (gap, k) = braiding_identity_gap(&disp(a, pa), &s, 200);
        prop_assert!(k >= 5);
        prop_assert!(gap < 1e-10);
    }

    #[test]
    fn f_s_matches_fock_trace(a in 0.0f64..1.5, pa in 0.0f64..TAU, z in 0.0f64..0.8, xi in 0.0f64..TAU, cold in any::<bool>()) {
        let th = thermal(if cold { f64::INFINITY } else { 1.0 });
        let (alpha, s) = (disp(a, pa), SqueezeParams::new(z, xi).unwrap());
        let n = n_max_rule(a, z, &th).unwrap();
        let oracle = f_s_trace(&alpha, &s, &th, n).unwrap();
        prop_assert!((oracle - f_s_disp_squeeze(&alpha, &s, &th)).norm() < 1e-6);
    }

    #[test]
    fn disp_squeeze_closed_forms_match_oracle(
        a in 0.0f64..1.5, pa in 0.0f64..TAU, z in 0.0f64..0.8, xi in 0.0f64..TAU,
        cold in any::<bool>(), seed in any::<u64>(),
    ) {
        let mut rng = sample::rng(seed);
        let s = CvScenario {
            thermal: thermal(if cold { f64::INFINITY } else { 1.0 }),
            family: CvFamily::DispSqueeze(disp(a, pa), SqueezeParams::new(z, xi).unwrap()),
            t: ControlHamiltonianParams::new(1.0, 2.0, 0.3).unwrap(),
            control: random_bloch(&mut rng),
            measurement: Some(random_bloch(&mut rng)),
        };
        let n = s.default_n_max().unwrap();
        let r = fock_oracle_report(&s, &[n]).unwrap();
        prop_assert!(r.converged, "gap {}", r.final_gap);
    }
}

#[test]
fn displacement_activation_ignores_temperature() {
    let t = ControlHamiltonianParams::new(1.0, 2.0, 0.4).unwrap();
    let (a1, a2) = (disp(0.6, 0.2), disp(0.8, 1.9));
    let c = BlochState::new(1.0, 0.5).unwrap();
    let closed = delta_qs_displacements(&t, &a1, &a2, &c);
    for beta in [0.5, 1.0, 2.0] {
        let s = CvScenario {
            thermal: thermal(beta),
            family: CvFamily::Displacements(a1, a2),
            t,
            control: c,
            measurement: None,
        };
        let v = oracle_values(&s, s.default_n_max().unwrap()).unwrap();
        assert!(
            (v.delta_qs - closed).abs() < 1e-7,
            "beta {beta}: {}",
            v.delta_qs - closed
        );
    }
}

#[test]
fn displacement_post_measurement_energy_ignores_angles() {
    let (a1, a2) = (disp(0.7, 0.4), disp(0.5, 2.6));
    let want = (a1.alpha() + a2.alpha()).norm_sqr();
    let mut rng = sample::rng(42);
    let mut values = Vec::new();
    let template = CvScenario {
        thermal: thermal(1.0),
        family: CvFamily::Displacements(a1, a2),
        t: ControlHamiltonianParams::new(1.0, 1.0, 0.0).unwrap(),
        control: BlochState::plus(),
        measurement: None,
    };
    let n = template.default_n_max().unwrap();
    while values.len() < 100 {
        let s = CvScenario {
            control: random_bloch(&mut rng),
            measurement: Some(random_bloch(&mut rng)),
            ..template
        };
        if let Some(v) = oracle_values(&s, n).unwrap().delta_sm {
            assert!((v - want).abs() < 1e-6);
            values.push(v);
        }
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    assert!(var.sqrt() < 1e-6);
}

#[test]
fn stationary_displacement_matches_line_search() {
    for t_abs in [1.5, 2.0, 5.0] {
        let (x, _) = golden_section(
            |a| delta_qs_displacements_simplified(1.0, t_abs, a),
            (PI / 4.0).sqrt(),
            (3.0 * PI / 4.0).sqrt(),
            1e-12,
        );
        assert!((x - alpha_min(1.0, t_abs).unwrap()).abs() < 1e-6);
    }
}

#[test]
fn closed_values_agree_with_specializations() {
    let c = BlochState::plus();
    for (alignment, xi) in [
        (SqueezeAlignment::Aligned, 0.0),
        (SqueezeAlignment::Opposed, PI),
    ] {
        for phi_m in [FRAC_PI_2, PI, 3.0 * FRAC_PI_2] {
            let m = BlochState::new(FRAC_PI_2, phi_m).unwrap();
            let th = thermal(f64::INFINITY);
            let general = delta_sm_disp_squeeze(
                &th,
                &disp(0.9, 0.0),
                &SqueezeParams::new(0.9, xi).unwrap(),
                &c,
                &m,
            );
            let special = delta_sm_aligned(&th, 0.9, 0.9, alignment, &c, &m);
            assert!((general.unwrap().delta_sm - special.unwrap().delta_sm).abs() < 1e-12);
        }
    }
}

#[test]
fn identity_family_has_no_gaps() {
    let s = CvScenario {
        thermal: thermal(1.0),
        family: CvFamily::Identity,
        t: ControlHamiltonianParams::new(1.0, 3.0, 0.2).unwrap(),
        control: BlochState::new(1.0, 0.3).unwrap(),
        measurement: Some(BlochState::new(2.0, 1.0).unwrap()),
    };
    assert_eq!(closed_values(&s).unwrap().delta_qs, 0.0);
    let r = fock_oracle_report(&s, &[5, 10, 20, 40]).unwrap();
    for row in r.rows {
        if row.quantity == "chi" {
            assert!(row.gap.unwrap() <= 1e-15);
        } else {
            assert!(row.gap.unwrap() <= 1e-15, "{row:?}");
        }
    }
}
