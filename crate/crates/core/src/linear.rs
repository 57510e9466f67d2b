//! Small oscillations without friction: normal frequencies, the closed-form
//! solution for equal lengths, and related diagnostics.

use nalgebra::Matrix3;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::model::{reduce_params, DerivedConstants, PhysicalParams, SystemState};
use crate::poly::{poly_roots, PolyCoeffs};

/// `A1 y'' + V1 y = 0` in y-coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearMatrices {
    pub a1: Matrix3<f64>,
    pub v1: Matrix3<f64>,
}

/// Kinetic matrix of the quadratic Lagrangian in q-coordinates.
pub fn a_bar(p: &PhysicalParams) -> Matrix3<f64> {
    let (b1, b2) = (p.m1 * p.l1, p.m2 * p.l2);
    Matrix3::new(p.total_mass(), b1, b2, b1, b1 * p.l1, 0.0, b2, 0.0, b2 * p.l2)
}

/// Potential matrix of the quadratic Lagrangian in q-coordinates.
pub fn v_bar(p: &PhysicalParams) -> Matrix3<f64> {
    Matrix3::from_diagonal(&nalgebra::Vector3::new(p.k, p.m1 * p.l1 * p.g, p.m2 * p.l2 * p.g))
}

pub fn linearize_frictionless(p: &PhysicalParams) -> Result<LinearMatrices> {
    p.validate()?;
    let c = DerivedConstants::from_params_unchecked(p);
    let m = p.total_mass();
    let a1 = Matrix3::new(
        m, c.bm_plus, c.bm_minus, c.bm_plus, c.am_plus, c.am_minus, c.bm_minus, c.am_minus, c.am_plus,
    );
    let h = 0.5 * p.g;
    let v1 = Matrix3::new(
        p.k,
        0.0,
        0.0,
        0.0,
        c.bm_plus * h,
        c.bm_minus * h,
        0.0,
        c.bm_minus * h,
        c.bm_plus * h,
    );
    Ok(LinearMatrices { a1, v1 })
}

/// The three squared angular frequencies, plus the equal-length decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FundamentalFrequencies {
    /// Ascending, in 1/s^2.
    pub lambdas: [f64; 3],
    pub equal_length: bool,
    pub omega1_sq: Option<f64>,
    pub omega2_sq: Option<f64>,
    pub omega_sq: Option<f64>,
}

/// Cubic whose roots are the squared frequencies, ascending coefficients.
pub fn frequency_cubic(p: &PhysicalParams) -> Result<PolyCoeffs> {
    let r = reduce_params(p)?;
    let lb = r.lambda_bar;
    let l2 = r.lambda * r.lambda;
    PolyCoeffs::new(vec![
        -lb * lb * lb * l2 * r.y,
        lb * lb * l2 * (1.0 + 2.0 * r.y),
        -lb * (r.y + 2.0 * l2 * (1.0 - r.mu - r.rho)),
        1.0 - 2.0 * r.mu,
    ])
}

/// Normalized squared frequencies `omega_{1,2}^2 / omega^2` for equal lengths.
pub fn equal_length_ratios(mu: f64, y: f64) -> (f64, f64) {
    let a = 1.0 - 2.0 * mu;
    let r = ((1.0 + y) * (1.0 + y) - 4.0 * y * a).sqrt();
    // The smaller root via the product 2Y/... avoids cancellation as mu -> 0.
    let s2 = (1.0 + y + r) / (2.0 * a);
    let s1 = y / (a * s2);
    (s1, s2)
}

pub fn fundamental_frequencies(p: &PhysicalParams) -> Result<FundamentalFrequencies> {
    let r = reduce_params(p)?;
    if p.equal_lengths() {
        let w2 = r.omega * r.omega;
        let (s1, s2) = equal_length_ratios(r.mu, r.y);
        return Ok(FundamentalFrequencies {
            lambdas: [s1 * w2, w2, s2 * w2],
            equal_length: true,
            omega1_sq: Some(s1 * w2),
            omega2_sq: Some(s2 * w2),
            omega_sq: Some(w2),
        });
    }
    let roots = poly_roots(&frequency_cubic(p)?)?;
    let mut lambdas = [0.0; 3];
    for (l, z) in lambdas.iter_mut().zip(&roots) {
        debug_assert!(z.im.abs() <= 1e-8 * z.norm());
        *l = z.re;
    }
    lambdas.sort_by(f64::total_cmp);
    debug_assert!(lambdas[0] > 0.0);
    Ok(FundamentalFrequencies {
        lambdas,
        equal_length: false,
        omega1_sq: None,
        omega2_sq: None,
        omega_sq: None,
    })
}

fn require_equal_lengths(p: &PhysicalParams) -> Result<()> {
    if p.equal_lengths() {
        Ok(())
    } else {
        Err(Error::NotApplicable("pendulum lengths differ".into()))
    }
}

/// Coupling length `B(mu, Y)` for pendula of length `l`.
pub fn coupling_b_reduced(mu: f64, y: f64, l: f64) -> f64 {
    mu * l / ((1.0 + y) * (1.0 + y) - 4.0 * y * (1.0 - 2.0 * mu)).sqrt()
}

pub fn coupling_b(p: &PhysicalParams) -> Result<f64> {
    require_equal_lengths(p)?;
    let r = reduce_params(p)?;
    Ok(coupling_b_reduced(r.mu, r.y, p.l1))
}

/// `(l^2 / 2g) (w1^2 - w^2)(w2^2 - w^2) / (w1^2 - w2^2)`, which equals [`coupling_b`].
pub fn frequency_identity_b(p: &PhysicalParams) -> Result<f64> {
    require_equal_lengths(p)?;
    let f = fundamental_frequencies(p)?;
    let (w1, w2, w) = (f.omega1_sq.unwrap(), f.omega2_sq.unwrap(), f.omega_sq.unwrap());
    Ok(p.l1 * p.l1 / (2.0 * p.g) * (w1 - w) * (w2 - w) / (w1 - w2))
}

/// Frictionless small-amplitude motion for equal lengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormSolution {
    pub b: f64,
    pub zeta1: f64,
    pub zeta2: f64,
    pub c0: f64,
    pub c0_dot: f64,
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub omega: f64,
    pub omega1: f64,
    pub omega2: f64,
    /// `(m1 - m2) / (m1 + m2)`
    pub mass_asymmetry: f64,
    /// Beam amplitudes of the `omega1` and `omega2` modes, `B` included.
    pub x_amp: [f64; 2],
    /// Amplitudes of the `omega1` and `omega2` modes of `sigma`.
    pub sigma_amp: [f64; 2],
    pub delta_amp: f64,
}

fn mode(pos: f64, vel: f64, w: f64) -> (f64, f64) {
    (pos.hypot(vel / w), (vel / w).atan2(pos))
}

pub fn closed_form(p: &PhysicalParams, y0: &SystemState) -> Result<ClosedFormSolution> {
    require_equal_lengths(p)?;
    if !p.is_frictionless() {
        return Err(Error::NotApplicable("closed form needs zero damping".into()));
    }
    let r = reduce_params(p)?;
    let l = p.l1;
    let s = y0.to_y_form();
    let [x0, s0, d0] = s.pos;
    let [xd0, sd0, dd0] = s.vel;
    let w = r.omega;
    let (s1, s2) = equal_length_ratios(r.mu, r.y);
    let (w1, w2) = (w * s1.sqrt(), w * s2.sqrt());
    let zeta1 = s1 / (s1 - 1.0);
    let zeta2 = s2 / (s2 - 1.0);
    let eps = (p.m1 - p.m2) / (p.m1 + p.m2);
    let c0 = s0 + eps * d0;
    let c0_dot = sd0 + eps * dd0;
    let b = coupling_b_reduced(r.mu, r.y, l);
    let (xa1, phi2) = mode(2.0 * zeta2 * x0 / l + c0, 2.0 * zeta2 * xd0 / l + c0_dot, w1);
    let (xa2, phi1) = mode(2.0 * zeta1 * x0 / l + c0, 2.0 * zeta1 * xd0 / l + c0_dot, w2);
    let g = r.y / (r.mu * l);
    let (sa1, alpha1) = mode(g * x0 - zeta1 * c0, g * xd0 - zeta1 * c0_dot, w1);
    let (sa2, alpha2) = mode(g * x0 - zeta2 * c0, g * xd0 - zeta2 * c0_dot, w2);
    let (da, alpha) = mode(d0, dd0, w);
    Ok(ClosedFormSolution {
        b,
        zeta1,
        zeta2,
        c0,
        c0_dot,
        alpha,
        alpha1,
        alpha2,
        phi1,
        phi2,
        omega: w,
        omega1: w1,
        omega2: w2,
        mass_asymmetry: eps,
        x_amp: [b * xa1, b * xa2],
        sigma_amp: [2.0 * b / l * sa1, 2.0 * b / l * sa2],
        delta_amp: da,
    })
}

/// y-form state of the closed-form solution at time `t`.
pub fn eval_closed_form(c: &ClosedFormSolution, t: f64) -> SystemState {
    let cs = |a: f64, w: f64, ph: f64| (a * (w * t - ph).cos(), -a * w * (w * t - ph).sin());
    let (x1, xd1) = cs(c.x_amp[0], c.omega1, c.phi2);
    let (x2, xd2) = cs(c.x_amp[1], c.omega2, c.phi1);
    let (s1, sd1) = cs(c.sigma_amp[0], c.omega1, c.alpha1);
    let (s2, sd2) = cs(c.sigma_amp[1], c.omega2, c.alpha2);
    let (d, dd) = cs(c.delta_amp, c.omega, c.alpha);
    let e = c.mass_asymmetry;
    SystemState::y([x1 - x2, s1 - s2 - e * d, d], [xd1 - xd2, sd1 - sd2 - e * dd, dd])
}

/// Damped antiphase coordinate for identical pendula, linear regime.
pub fn delta_closed_form(p: &PhysicalParams, delta0: f64, delta0_dot: f64, t: f64) -> Result<f64> {
    p.validate()?;
    p.require_identical()?;
    let r = reduce_params(p)?;
    let (eta, w) = (r.eta, r.omega);
    let env = (-0.5 * eta * w * t).exp();
    let disc = eta * eta - 4.0;
    Ok(if disc.abs() <= 1e-12 {
        env * (delta0 + (delta0_dot + 0.5 * eta * w * delta0) * t)
    } else if disc > 0.0 {
        let q = disc.sqrt();
        let a = 0.5 * q * w * t;
        env * (delta0 * a.cosh() + (2.0 * delta0_dot + eta * w * delta0) / (q * w) * a.sinh())
    } else {
        let q = (-disc).sqrt();
        let a = 0.5 * q * w * t;
        env * (delta0 * a.cos() + (2.0 * delta0_dot + eta * w * delta0) / (q * w) * a.sin())
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeProfiles {
    /// 1/m
    pub phi: f64,
    pub psi1: f64,
    pub psi2: f64,
}

pub fn amplitude_profiles(mu: f64, y: f64, l: f64) -> Result<AmplitudeProfiles> {
    if !(mu > 0.0 && mu < 0.5) {
        return Err(invalid("mu", format!("must lie in (0, 1/2), got {mu}")));
    }
    if !(y > 0.0) || !y.is_finite() {
        return Err(invalid("Y", format!("must be > 0, got {y}")));
    }
    if !(l > 0.0) {
        return Err(invalid("l", format!("must be > 0, got {l}")));
    }
    let b = coupling_b_reduced(mu, y, l);
    let (s1, s2) = equal_length_ratios(mu, y);
    Ok(AmplitudeProfiles {
        phi: 2.0 * b * y / (mu * l * l),
        psi1: -2.0 / l * b * s1 / (s1 - 1.0),
        psi2: 2.0 / l * b * s2 / (s2 - 1.0),
    })
}

/// Stiffness values for which the beam motion is periodic with frequency
/// ratio `omega1 / omega2 = q_num / q_den`. Both solutions are returned,
/// smaller first; `None` when the ratio is out of reach for this `mu`.
pub fn periodicity_params(q_num: u32, q_den: u32, mu: f64) -> Result<Option<(f64, f64)>> {
    if q_num == 0 || q_num >= q_den {
        return Err(invalid("q", format!("need 0 < {q_num} < {q_den}")));
    }
    if !(mu > 0.0 && mu < 0.5) {
        return Err(invalid("mu", format!("must lie in (0, 1/2), got {mu}")));
    }
    let q = q_num as f64 / q_den as f64;
    let c = q / (1.0 + q * q);
    let a = 1.0 - 2.0 * mu;
    let disc = a - 4.0 * c * c;
    if disc < 0.0 {
        return Ok(None);
    }
    let sa = a.sqrt();
    let hi = (sa + disc.sqrt()) / (2.0 * c);
    // product of the roots is 1
    let lo = 1.0 / hi;
    Ok(Some((lo * lo, hi * hi)))
}

/// Normalized frequency cubic `P(s)`, `s = lambda / lambda_bar`, at the
/// unperturbed roots `1`, `s1`, `s2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Perturbation {
    pub at_lambda_bar: f64,
    pub at_omega1_sq: f64,
    pub at_omega2_sq: f64,
}

pub fn perturbation_p(p: &PhysicalParams) -> Result<Perturbation> {
    let r = reduce_params(p)?;
    let (mu, y, rho) = (r.mu, r.y, r.rho);
    let l2 = r.lambda * r.lambda;
    let a = 1.0 - 2.0 * mu;
    let root = ((1.0 + y) * (1.0 + y) - 4.0 * y * a).sqrt();
    let side = |sign: f64| {
        ((1.0 - l2) * (1.0 - y + 2.0 * mu * y * (3.0 + y) + sign * (1.0 + 2.0 * mu * y) * root)
            + 2.0 * rho * l2 * ((1.0 + y * y + 4.0 * mu * y) + sign * (1.0 + y) * root))
            / (2.0 * a * a)
    };
    Ok(Perturbation {
        at_lambda_bar: (1.0 - l2) * (a - y) + 2.0 * l2 * rho,
        at_omega1_sq: side(-1.0),
        at_omega2_sq: side(1.0),
    })
}

/// `P(s)` itself, for comparison with [`perturbation_p`].
pub fn normalized_cubic(p: &PhysicalParams) -> Result<PolyCoeffs> {
    let r = reduce_params(p)?;
    let l2 = r.lambda * r.lambda;
    PolyCoeffs::new(vec![
        -l2 * r.y,
        l2 * (1.0 + 2.0 * r.y),
        -(r.y + 2.0 * l2 * (1.0 - r.mu - r.rho)),
        1.0 - 2.0 * r.mu,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(mu: f64, y: f64) -> PhysicalParams {
        PhysicalParams::from_reduced_identical(0.0, 0.0, y, mu, 1.0, 9.81, 1.0)
    }

    #[test]
    fn quarter_mass_unit_stiffness() {
        let f = fundamental_frequencies(&eq(0.25, 1.0)).unwrap();
        let w2 = f.omega_sq.unwrap();
        assert!((f.omega1_sq.unwrap() / w2 - 2.0 * (1.0 - 0.5f64.sqrt())).abs() < 1e-12);
        assert!((f.omega2_sq.unwrap() / w2 - 2.0 * (1.0 + 0.5f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn coupling_value() {
        let b = coupling_b(&eq(0.25, 1.0)).unwrap();
        assert!((b - 0.25 / 2f64.sqrt()).abs() < 1e-14);
        let id = frequency_identity_b(&eq(0.25, 1.0)).unwrap();
        assert!((id - b).abs() < 1e-12);
    }

    #[test]
    fn profiles_at_unit_stiffness() {
        let a = amplitude_profiles(0.3, 1.0, 0.8).unwrap();
        assert!((a.psi1 - 0.5).abs() < 1e-12);
        assert!((a.psi2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn periodicity_zero_mass_limit() {
        let (lo, hi) = periodicity_params(1, 3, 1e-15).unwrap().unwrap();
        assert!((lo - 1.0 / 9.0).abs() < 1e-12);
        assert!((hi - 9.0).abs() < 1e-10);
        assert!(periodicity_params(3, 3, 0.1).is_err());
        // q close to 1 needs a nearly massless frame's partner
        assert_eq!(periodicity_params(99, 100, 0.2).unwrap(), None);
    }

    #[test]
    fn critical_delta() {
        let p = PhysicalParams::from_reduced_identical(2.0, 0.3, 1.0, 0.2, 1.0, 9.81, 1.0);
        let w = 9.81f64.sqrt();
        let t = 0.7;
        let d = delta_closed_form(&p, 0.01, 0.02, t).unwrap();
        let expect = (-w * t).exp() * (0.01 + (0.02 + w * 0.01) * t);
        assert!((d - expect).abs() < 1e-14);
    }
}
