mod common;

use common::*;
use huygens::dynamics::*;
use huygens::model::*;
use huygens::ode::OdeOptions;
use huygens::spectral::linear_system;
use huygens::{Error, PhysicalParams};
use proptest::prelude::*;

fn unequal() -> PhysicalParams {
    PhysicalParams { m0: 2.0, m1: 0.3, m2: 0.5, l1: 0.7, l2: 1.1, beta0: 0.4, beta1: 0.02, beta2: 0.05, k: 12.0, g: 9.81 }
}

proptest! {
    #[test]
    fn form_round_trip(x in -1.0..1.0f64, a in -3.0..3.0f64, b in -3.0..3.0f64,
                       u in -2.0..2.0f64, v in -2.0..2.0f64, w in -2.0..2.0f64) {
        let s = SystemState::q([x, a, b], [u, v, w]);
        let back = s.to_y_form().to_q_form();
        for (p, q) in back.to_array().iter().zip(s.to_array()) {
            prop_assert!((p - q).abs() < 1e-15);
        }
        prop_assert_eq!(s.to_y_form().to_y_form(), s.to_y_form());
        prop_assert_eq!(s.to_q_form(), s);
    }

    #[test]
    fn theta_factor_is_mass_minus_bob_cosines(t1 in -1.0..1.0f64, t2 in -1.0..1.0f64) {
        let p = unequal();
        let want = p.total_mass() - p.m1 * t1.cos().powi(2) - p.m2 * t2.cos().powi(2);
        let got = theta_factor(t1 + t2, t1 - t2, &p).theta_value;
        prop_assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn accelerations_agree(x in -0.5..0.5f64, t1 in -1.0..1.0f64, t2 in -1.0..1.0f64,
                           u in -2.0..2.0f64, v in -2.0..2.0f64, w in -2.0..2.0f64, rot in any::<bool>()) {
        let d = if rot { DampingModel::RotationalOnly } else { DampingModel::FullVelocity };
        let p = unequal();
        let s = SystemState::q([x, t1, t2], [u, v, w]);
        let e = Escapement::new(|t, q, qd| (0.1 * (3.0 * t).sin() - 0.2 * qd[1], 0.05 * q[2]));
        let aq = apply_l(accel_q(&s, &p, d, &e, 0.3).unwrap());
        let ay = accel_y(&s.to_y_form(), &p, d, &e, 0.3).unwrap();
        prop_assert!(accel_discrepancy(&ay, &aq) < 1e-12);
    }
}

#[test]
fn psi_taylor_residuals_shrink_with_the_expected_order() {
    let (c1, c2) = (1.0, 2.0);
    for (s, d) in [(0.2, 0.1), (-0.3, 0.25), (0.05, -0.4)] {
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..4 {
            let h = 0.5f64.powi(k);
            let (ss, dd) = (s * h, d * h);
            let e1 = (psi1(ss, dd, c1, c2) - psi1_approx(ss, dd, c1, c2)).abs();
            let e2 = (psi2(ss, dd, c1, c2) - psi2_approx(ss, dd, c1, c2)).abs();
            if let Some((p1, p2)) = prev {
                // psi1 is even, so its residual is fourth order; psi2's is third
                assert!(e1 < p1 / 12.0, "{e1} {p1}");
                assert!(e2 < p2 / 6.0, "{e2} {p2}");
            }
            prev = Some((e1, e2));
        }
    }
    assert!((psi2(0.2, 0.1, 1.0, 2.0) - 0.2).abs() < 1e-3);
    assert_eq!(psi2_approx(0.3, -0.2, 1.5, 0.5), 0.5 * (1.5 * 0.3 - 0.5 * 0.2));
}

#[test]
fn validation_names_the_field() {
    let mut p = unequal();
    p.m1 = -1.0;
    match p.validate() {
        Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "m1"),
        other => panic!("{other:?}"),
    }
    let mut p = unequal();
    p.beta2 = f64::NAN;
    assert!(matches!(p.validate(), Err(Error::InvalidParam { field: "beta2", .. })));
}

#[test]
fn params_reject_unknown_keys_and_default_gravity() {
    let ok = r#"{"m0":1,"m1":0.2,"m2":0.2,"l1":1,"l2":1,"beta0":0,"beta1":0,"beta2":0,"k":3}"#;
    let p: PhysicalParams = serde_json::from_str(ok).unwrap();
    assert_eq!(p.g, 9.81);
    let bad = r#"{"m0":1,"m1":0.2,"m2":0.2,"l1":1,"l2":1,"beta0":0,"beta1":0,"beta2":0,"k":3,"gamma":1}"#;
    assert!(serde_json::from_str::<PhysicalParams>(bad).is_err());
}

#[test]
fn reduced_coordinates_round_trip() {
    let p = PhysicalParams::from_reduced_identical(0.3, 0.7, 1.9, 0.15, 0.8, 9.81, 2.5);
    let r = reduce_params(&p).unwrap();
    assert!(rel(r.eta, 0.3) < 1e-14 && rel(r.x, 0.7) < 1e-14 && rel(r.y, 1.9) < 1e-14 && rel(r.mu, 0.15) < 1e-14);
    assert!(!r.nominal);
    assert_eq!(r.rho, 0.0);
    assert!(reduce_params(&unequal()).unwrap().nominal);
}

#[test]
fn damped_energy_never_rises() {
    let p = unequal();
    let s0 = SystemState::q([0.05, 0.8, -0.5], [0.0, 0.3, 0.0]);
    let opts = IntegrateOptions { samples: 2001, cross_check_every: Some(1), ..Default::default() };
    let tr = integrate(&s0, &p, DampingModel::FullVelocity, &Escapement::none(), 40.0, &opts).unwrap();
    let scale = tr.energies[0].abs();
    for w in tr.energies.windows(2) {
        assert!(w[1] <= w[0] + 1e-12 * scale);
    }
    assert!(tr.stats.max_energy_rise <= 1e-12, "{}", tr.stats.max_energy_rise);
    assert!(tr.stats.max_cross_check < 1e-9);
    assert!(tr.energies.last().unwrap() < &(tr.energies[0] - 0.01 * scale));
}

#[test]
fn frictionless_energy_is_conserved() {
    let p = frictionless(unequal());
    let s0 = SystemState::q([0.0, 0.9, 0.2], [0.1, 0.0, -0.4]);
    let tr = integrate(&s0, &p, DampingModel::FullVelocity, &Escapement::none(), 30.0, &IntegrateOptions::default()).unwrap();
    let e0 = tr.energies[0];
    let drift = tr.energies.iter().map(|e| rel(*e, e0)).fold(0.0, f64::max);
    assert!(drift < 1e-8, "{drift}");
}

#[test]
fn jacobian_at_rest_matches_linear_system() {
    let mut r = rng(3);
    for _ in 0..50 {
        let p = damped_params(&mut r);
        for d in [DampingModel::FullVelocity, DampingModel::RotationalOnly] {
            let a = linear_system(&p, d).unwrap().matrix;
            let h = 1e-6;
            let scale = a.amax();
            for j in 0..6 {
                let f = |sgn: f64| {
                    let mut y = [0.0; 6];
                    y[j] = sgn * h;
                    let s = SystemState::from_array(Form::Y, y);
                    let acc = accel_y(&s, &p, d, &Escapement::none(), 0.0).unwrap();
                    [y[3], y[4], y[5], acc[0], acc[1], acc[2]]
                };
                let (fp, fm) = (f(1.0), f(-1.0));
                for i in 0..6 {
                    let fd = (fp[i] - fm[i]) / (2.0 * h);
                    assert!((fd - a[(i, j)]).abs() < 1e-6 * scale, "{d:?} ({i},{j}): {fd} vs {}", a[(i, j)]);
                }
            }
        }
    }
}

#[test]
fn constant_escapement_settles_at_the_static_balance() {
    let p = unequal();
    let (f1, f2) = (0.4, -0.3);
    let e = Escapement::new(move |_, _, _| (f1, f2));
    let tr = integrate(&SystemState::zero(Form::Q), &p, DampingModel::FullVelocity, &e, 400.0, &IntegrateOptions { samples: 2, ..Default::default() }).unwrap();
    let end = tr.states.last().unwrap().to_q_form();
    let t1 = (f1 / (p.m1 * p.g)).asin();
    let t2 = (f2 / (p.m2 * p.g)).asin();
    let x = (f1 * t1.cos() + f2 * t2.cos()) / p.k;
    assert!((end.pos[1] - t1).abs() < 1e-8 && (end.pos[2] - t2).abs() < 1e-8, "{:?}", end.pos);
    assert!((end.pos[0] - x).abs() < 1e-8);
}

#[test]
fn step_budget_is_reported() {
    let opts = IntegrateOptions { ode: OdeOptions { max_steps: 10, ..Default::default() }, ..Default::default() };
    let s0 = SystemState::q([0.0, 0.5, 0.0], [0.0; 3]);
    let err = integrate(&s0, &unequal(), DampingModel::FullVelocity, &Escapement::none(), 100.0, &opts).unwrap_err();
    assert!(matches!(err, Error::MaxSteps { .. }), "{err:?}");
    assert!(integrate(&s0, &unequal(), DampingModel::FullVelocity, &Escapement::none(), -1.0, &Default::default()).is_err());
}
