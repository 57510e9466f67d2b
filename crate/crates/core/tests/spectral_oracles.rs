mod common;

use common::*;
use huygens::dynamics::DampingModel;
use huygens::linear::frequency_cubic;
use huygens::poly::poly_roots;
use huygens::spectral::*;
use huygens::PhysicalParams;
use nalgebra::DMatrix;

#[test]
fn sextic_matches_exact_determinant() {
    let mut r = rng(11);
    for i in 0..300 {
        let p = damped_params(&mut r);
        for d in [DampingModel::FullVelocity, DampingModel::RotationalOnly] {
            let got = char_poly_general(&p, d).unwrap();
            let want = exact_char_poly(&p, d);
            for (j, (a, b)) in got.coeffs().iter().zip(&want).enumerate() {
                assert!(rel(*a, *b) < 1e-10, "draw {i} {d:?} a{j}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn printed_matrix_matches_mass_matrix_assembly() {
    let mut r = rng(12);
    for _ in 0..200 {
        let p = damped_params(&mut r);
        let a = linear_system(&p, DampingModel::FullVelocity).unwrap().matrix;
        let b = linear_system_from_mass_matrix(&p, DampingModel::FullVelocity).unwrap().matrix;
        let scale = b.amax();
        assert!((a - b).amax() < 1e-11 * scale, "{}", (a - b).amax() / scale);
    }
}

#[test]
fn matrix_char_poly_matches_exact_determinant() {
    let mut r = rng(13);
    for _ in 0..100 {
        let p = damped_params(&mut r);
        let a6 = p.m0 / p.total_mass();
        let sys = linear_system(&p, DampingModel::FullVelocity).unwrap();
        let c = char_poly_of_matrix(&DMatrix::from_column_slice(6, 6, sys.matrix.as_slice()));
        let want = exact_char_poly(&p, DampingModel::FullVelocity);
        let scale = want.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in c.iter().zip(&want) {
            assert!((a * a6 - b).abs() < 1e-9 * scale);
        }
    }
}

#[test]
fn frictionless_limit_is_frequency_cubic() {
    let mut r = rng(14);
    for _ in 0..100 {
        let p = frictionless(damped_params(&mut r));
        let cubic = frequency_cubic(&p).unwrap();
        for (a, b) in cubic.coeffs().iter().zip(exact_frequency_cubic(&p)) {
            assert!(rel(*a, b) < 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn companion_roots_agree_with_aberth() {
    let mut r = rng(15);
    for _ in 0..300 {
        let p = damped_params(&mut r);
        let c = char_poly_general(&p, DampingModel::FullVelocity).unwrap();
        let mine = poly_roots(&c).unwrap();
        let oracle = aberth_roots(c.coeffs());
        let scale = mine.iter().map(|z| z.norm()).fold(0.0, f64::max);
        // clustered roots of a sextic are only determined to about eps^(1/2)
        assert!(root_set_distance(&mine, &oracle, scale) < 1e-6);
        assert!(root_set_distance(&oracle, &mine, scale) < 1e-6);
    }
}

#[test]
fn routh_chain_agrees_with_root_signs() {
    let mut r = rng(16);
    for _ in 0..500 {
        let p = damped_params(&mut r);
        let c = char_poly_general(&p, DampingModel::FullVelocity).unwrap();
        let rh = routh_hurwitz(&c).unwrap();
        assert!(rh.stable);
        assert!(aberth_roots(c.coeffs()).iter().all(|z| z.re < 0.0));
    }
    // a polynomial with a root pair in the right half plane: (z^2 - 0.2 z + 1)(z + 1)^4
    let c = huygens::poly::PolyCoeffs::new(expand(&[(1.0, -0.2, 1.0)], 4)).unwrap();
    assert!(!routh_hurwitz(&c).unwrap().stable);
    assert!(!stability_verdict(&c).unwrap());
}

/// `prod (c + b z + a z^2) * (1 + z)^k` in ascending order.
fn expand(quads: &[(f64, f64, f64)], k: usize) -> Vec<f64> {
    let mul = |a: &[f64], b: &[f64]| {
        let mut o = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                o[i + j] += x * y;
            }
        }
        o
    };
    let mut out = vec![1.0];
    for &(a, b, c) in quads {
        out = mul(&out, &[c, b, a]);
    }
    for _ in 0..k {
        out = mul(&out, &[1.0, 1.0]);
    }
    out
}

#[test]
fn roots_lie_in_the_annulus_and_gershgorin_discs() {
    let mut r = rng(17);
    for _ in 0..300 {
        let p = damped_params(&mut r);
        let c = char_poly_general(&p, DampingModel::FullVelocity).unwrap();
        let (lo, hi) = enestrom_kakeya(&c).unwrap();
        let roots = aberth_roots(c.coeffs());
        for z in &roots {
            assert!(z.norm() >= lo * (1.0 - 1e-9) && z.norm() <= hi * (1.0 + 1e-9));
        }
        let discs = gershgorin(&linear_system(&p, DampingModel::FullVelocity).unwrap());
        for z in &roots {
            assert!(discs.iter().any(|d| d.contains(*z, 1e-9)));
        }
    }
}

#[test]
fn identical_pendula_factor() {
    let mut r = rng(18);
    for _ in 0..300 {
        let mut p = damped_params(&mut r);
        p.m2 = p.m1;
        p.l2 = p.l1;
        p.beta2 = p.beta1;
        let (quad, quart) = char_poly_identical(&p).unwrap();
        let prod = quad.mul(&quart);
        for (a, b) in prod.coeffs().iter().zip(exact_char_poly(&p, DampingModel::FullVelocity)) {
            assert!(rel(*a, b) < 1e-12, "{a} vs {b}");
        }
        let rp = huygens::reduce_params(&p).unwrap();
        let ratios = ek_ratios(&rp).unwrap();
        let qc = quart.coeffs();
        for j in 0..4 {
            assert!(rel(ratios[j], qc[j] / qc[j + 1]) < 1e-12);
        }
    }
}

#[test]
fn unequal_pendula_refuse_the_factorization() {
    let p = PhysicalParams { m0: 1.0, m1: 0.3, m2: 0.31, l1: 1.0, l2: 1.0, beta0: 0.1, beta1: 0.01, beta2: 0.01, k: 5.0, g: 9.81 };
    assert!(char_poly_identical(&p).is_err());
    let rp = huygens::reduce_params(&p).unwrap();
    assert!(rp.nominal);
    assert_eq!(ek_ratios(&rp), Err(huygens::Error::NotIdentical));
}

#[test]
fn spectrum_report_of_identical_pendula_has_no_annulus_violations() {
    let p = PhysicalParams::from_reduced_identical(0.5, 0.4, 0.8, 0.25, 1.0, 9.81, 1.0);
    let rep = spectrum_report(&p, DampingModel::FullVelocity).unwrap();
    assert!(rep.stable);
    assert_eq!(rep.annulus_violations(1e-9), 0);
    assert_eq!(rep.roots.len(), 6);
    assert!(rep.factors.is_some());
    let unequal = PhysicalParams { m2: 0.3, ..p };
    let rep = spectrum_report(&unequal, DampingModel::RotationalOnly).unwrap();
    assert!(rep.zone.is_none());
    assert_eq!(rep.annulus_violations(1e-9), 0);
}
