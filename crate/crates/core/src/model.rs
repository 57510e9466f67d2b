//! Parameter types, derived constants, coordinate changes and the
//! trigonometric helpers shared by every other module.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Relative tolerance used to decide whether the two pendula are identical.
pub const IDENTICAL_TOL: f64 = 1e-12;

/// Dimensional parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub m0: f64,
    pub m1: f64,
    pub m2: f64,
    pub l1: f64,
    pub l2: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub k: f64,
    #[serde(default = "default_gravity")]
    pub g: f64,
}

pub fn default_gravity() -> f64 {
    9.81
}

impl PhysicalParams {
    /// Two identical pendula of mass `mp`, length `l` and damping `betap`.
    pub fn identical(m0: f64, mp: f64, l: f64, beta0: f64, betap: f64, k: f64, g: f64) -> Self {
        PhysicalParams {
            m0,
            m1: mp,
            m2: mp,
            l1: l,
            l2: l,
            beta0,
            beta1: betap,
            beta2: betap,
            k,
            g,
        }
    }

    /// Identical pendula built from the dimensionless quadrant coordinates.
    ///
    /// `m` is the total mass; the result satisfies `reduce_params` giving back
    /// `eta`, `x`, `y`, `mu`.
    pub fn from_reduced_identical(eta: f64, x: f64, y: f64, mu: f64, l: f64, g: f64, m: f64) -> Self {
        let omega = (g / l).sqrt();
        let mp = mu * m;
        PhysicalParams::identical(
            (1.0 - 2.0 * mu) * m,
            mp,
            l,
            x * m * omega,
            eta * mp * omega,
            y * m * g / l,
            g,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let positive: [(&'static str, f64); 7] = [
            ("m0", self.m0),
            ("m1", self.m1),
            ("m2", self.m2),
            ("l1", self.l1),
            ("l2", self.l2),
            ("k", self.k),
            ("g", self.g),
        ];
        for (field, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(field, format!("must be finite and > 0, got {v}")));
            }
        }
        for (field, v) in [("beta0", self.beta0), ("beta1", self.beta1), ("beta2", self.beta2)] {
            if !v.is_finite() || v < 0.0 {
                return Err(invalid(field, format!("must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Total mass of beam and pendula.
    pub fn total_mass(&self) -> f64 {
        self.m0 + self.m1 + self.m2
    }

    /// Sum of all three damping coefficients.
    pub fn beta_total(&self) -> f64 {
        self.beta0 + self.beta1 + self.beta2
    }

    pub fn is_frictionless(&self) -> bool {
        self.beta0 == 0.0 && self.beta1 == 0.0 && self.beta2 == 0.0
    }

    pub fn equal_lengths(&self) -> bool {
        rel_diff(self.l1, self.l2) <= IDENTICAL_TOL
    }

    /// Equal masses, lengths and damping coefficients.
    pub fn is_identical(&self) -> bool {
        self.equal_lengths()
            && rel_diff(self.m1, self.m2) <= IDENTICAL_TOL
            && rel_diff(self.beta1, self.beta2) <= IDENTICAL_TOL
    }

    pub fn require_identical(&self) -> Result<()> {
        if self.is_identical() {
            Ok(())
        } else {
            Err(Error::NotIdentical)
        }
    }

    pub fn mean_length(&self) -> f64 {
        0.5 * (self.l1 + self.l2)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs() + b.abs();
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// The combinations of pendulum data that recur in the equations of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub am_plus: f64,
    pub am_minus: f64,
    pub abeta_plus: f64,
    pub abeta_minus: f64,
    pub bm_plus: f64,
    pub bm_minus: f64,
    pub bbeta_plus: f64,
    pub bbeta_minus: f64,
    pub l_plus: f64,
    pub l_minus: f64,
    pub betam_plus: f64,
    pub betam_minus: f64,
}

impl DerivedConstants {
    /// Evaluates the formulas without validating `p`, so degenerate inputs
    /// (a massless pendulum, say) give whatever the formulas give.
    pub fn from_params_unchecked(p: &PhysicalParams) -> Self {
        let (m1, m2, l1, l2, b1, b2) = (p.m1, p.m2, p.l1, p.l2, p.beta1, p.beta2);
        DerivedConstants {
            am_plus: 0.25 * (m1 * l1 * l1 + m2 * l2 * l2),
            am_minus: 0.25 * (m1 * l1 * l1 - m2 * l2 * l2),
            abeta_plus: 0.25 * (b1 * l1 * l1 + b2 * l2 * l2),
            abeta_minus: 0.25 * (b1 * l1 * l1 - b2 * l2 * l2),
            bm_plus: 0.5 * (m1 * l1 + m2 * l2),
            bm_minus: 0.5 * (m1 * l1 - m2 * l2),
            bbeta_plus: 0.5 * (b1 * l1 + b2 * l2),
            bbeta_minus: 0.5 * (b1 * l1 - b2 * l2),
            l_plus: (l1 + l2) / (2.0 * l1 * l2),
            l_minus: (l1 - l2) / (2.0 * l1 * l2),
            betam_plus: 0.5 * (b1 / m1 + b2 / m2),
            betam_minus: 0.5 * (b1 / m1 - b2 / m2),
        }
    }
}

pub fn derived_constants(p: &PhysicalParams) -> Result<DerivedConstants> {
    p.validate()?;
    Ok(DerivedConstants::from_params_unchecked(p))
}

/// Dimensionless groups and scales.
///
/// `omega`, `eta` and `x` are only defined for equal pendula. For unequal
/// pendula they are evaluated with the mean length and the mean of
/// `beta_i / m_i`, and `nominal` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedParams {
    pub mu: f64,
    pub lambda_bar: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Lambda")]
    pub lambda: f64,
    pub rho: f64,
    pub omega: f64,
    pub eta: f64,
    #[serde(rename = "X")]
    pub x: f64,
    pub nominal: bool,
}

pub fn reduce_params(p: &PhysicalParams) -> Result<ReducedParams> {
    p.validate()?;
    let m = p.total_mass();
    let lsum = p.l1 + p.l2;
    let l = p.mean_length();
    let omega = (p.g / l).sqrt();
    let beta_over_m = 0.5 * (p.beta1 / p.m1 + p.beta2 / p.m2);
    Ok(ReducedParams {
        mu: (p.m1 + p.m2) / (2.0 * m),
        lambda_bar: 2.0 * p.g / lsum,
        y: p.k * lsum / (2.0 * m * p.g),
        lambda: lsum / (2.0 * (p.l1 * p.l2).sqrt()),
        rho: (p.l1 - p.l2) / lsum * (p.m1 - p.m2) / (2.0 * m),
        omega,
        eta: beta_over_m / omega,
        x: p.beta0 / m / omega,
        nominal: !p.is_identical(),
    })
}

/// Which generalized coordinates a state is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Form {
    /// (x, theta1, theta2)
    Q,
    /// (x, sigma, delta) with sigma = theta1 + theta2, delta = theta1 - theta2
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub form: Form,
    pub pos: [f64; 3],
    pub vel: [f64; 3],
}

impl SystemState {
    pub fn q(pos: [f64; 3], vel: [f64; 3]) -> Self {
        SystemState { form: Form::Q, pos, vel }
    }

    pub fn y(pos: [f64; 3], vel: [f64; 3]) -> Self {
        SystemState { form: Form::Y, pos, vel }
    }

    pub fn zero(form: Form) -> Self {
        SystemState { form, pos: [0.0; 3], vel: [0.0; 3] }
    }

    /// `[pos, vel]` flattened.
    pub fn to_array(&self) -> [f64; 6] {
        let (p, v) = (self.pos, self.vel);
        [p[0], p[1], p[2], v[0], v[1], v[2]]
    }

    pub fn from_array(form: Form, a: [f64; 6]) -> Self {
        SystemState {
            form,
            pos: [a[0], a[1], a[2]],
            vel: [a[3], a[4], a[5]],
        }
    }

    /// Applies `L`; a state already in y-form is returned unchanged.
    pub fn to_y_form(&self) -> Self {
        match self.form {
            Form::Y => *self,
            Form::Q => SystemState::y(apply_l(self.pos), apply_l(self.vel)),
        }
    }

    /// Applies `L^-1`; a state already in q-form is returned unchanged.
    pub fn to_q_form(&self) -> Self {
        match self.form {
            Form::Q => *self,
            Form::Y => SystemState::q(apply_l_inv(self.pos), apply_l_inv(self.vel)),
        }
    }
}

pub fn to_y_form(s: &SystemState) -> SystemState {
    s.to_y_form()
}

pub fn to_q_form(s: &SystemState) -> SystemState {
    s.to_q_form()
}

/// The change of coordinates q -> y.
pub const L: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, -1.0]];
/// Its inverse.
pub const L_INV: [[f64; 3]; 3] = [[1.0, 0.0, 0.0], [0.0, 0.5, 0.5], [0.0, 0.5, -0.5]];

pub(crate) fn mat3_vec(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    }
    out
}

pub fn apply_l(v: [f64; 3]) -> [f64; 3] {
    mat3_vec(&L, v)
}

pub fn apply_l_inv(v: [f64; 3]) -> [f64; 3] {
    mat3_vec(&L_INV, v)
}

/// `C1 cos(s/2) cos(d/2) + C2 sin(s/2) sin(d/2)`
pub fn psi1(sigma: f64, delta: f64, c1: f64, c2: f64) -> f64 {
    let (ss, cs) = (0.5 * sigma).sin_cos();
    let (sd, cd) = (0.5 * delta).sin_cos();
    c1 * cs * cd + c2 * ss * sd
}

/// `C1 sin(s/2) cos(d/2) + C2 cos(s/2) sin(d/2)`
pub fn psi2(sigma: f64, delta: f64, c1: f64, c2: f64) -> f64 {
    let (ss, cs) = (0.5 * sigma).sin_cos();
    let (sd, cd) = (0.5 * delta).sin_cos();
    c1 * ss * cd + c2 * cs * sd
}

/// Second order Taylor polynomial of [`psi1`] at the origin,
/// `C1 - [C1 (s^2 + d^2) / 2 - C2 s d] / 4`.
pub fn psi1_approx(sigma: f64, delta: f64, c1: f64, c2: f64) -> f64 {
    c1 - 0.25 * (0.5 * c1 * (sigma * sigma + delta * delta) - c2 * sigma * delta)
}

/// Second order Taylor polynomial of [`psi2`] at the origin.
pub fn psi2_approx(sigma: f64, delta: f64, c1: f64, c2: f64) -> f64 {
    0.5 * (c1 * sigma + c2 * delta)
}

/// Signature of an escapement force law: `(t, q, qdot) -> (f1, f2)` in newtons,
/// with `q` in q-form.
pub type EscapementFn = dyn Fn(f64, &[f64; 3], &[f64; 3]) -> (f64, f64) + Send + Sync;

/// Tangential forces on the two bobs. The default applies no force.
#[derive(Clone, Default)]
pub struct Escapement {
    law: Option<Arc<EscapementFn>>,
}

impl Escapement {
    pub fn none() -> Self {
        Escapement { law: None }
    }

    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64, &[f64; 3], &[f64; 3]) -> (f64, f64) + Send + Sync + 'static,
    {
        Escapement { law: Some(Arc::new(f)) }
    }

    pub fn is_none(&self) -> bool {
        self.law.is_none()
    }

    /// Forces at q-form position and velocity.
    pub fn eval(&self, t: f64, q: &[f64; 3], qdot: &[f64; 3]) -> (f64, f64) {
        match &self.law {
            None => (0.0, 0.0),
            Some(f) => f(t, q, qdot),
        }
    }
}

impl fmt::Debug for Escapement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.law {
            None => f.write_str("Escapement(none)"),
            Some(_) => f.write_str("Escapement(custom)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PhysicalParams {
        PhysicalParams::identical(2.0, 1.0, 1.0, 0.1, 0.05, 10.0, 9.81)
    }

    #[test]
    fn validate_names_offending_field() {
        let mut p = sample();
        p.m0 = 0.0;
        match p.validate() {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "m0"),
            other => panic!("unexpected {other:?}"),
        }
        p = sample();
        p.beta2 = -1.0;
        assert!(matches!(p.validate(), Err(Error::InvalidParam { field: "beta2", .. })));
    }

    #[test]
    fn mu_for_equal_masses() {
        let r = reduce_params(&sample()).unwrap();
        assert_eq!(r.mu, 0.25);
        assert_eq!(r.lambda, 1.0);
        assert_eq!(r.rho, 0.0);
        assert!(!r.nominal);
    }

    #[test]
    fn reduced_roundtrip() {
        let p = PhysicalParams::from_reduced_identical(0.7, 1.3, 2.1, 0.2, 0.8, 9.81, 3.0);
        let r = reduce_params(&p).unwrap();
        assert!((r.eta - 0.7).abs() < 1e-14);
        assert!((r.x - 1.3).abs() < 1e-14);
        assert!((r.y - 2.1).abs() < 1e-14);
        assert!((r.mu - 0.2).abs() < 1e-15);
        assert!((p.total_mass() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn transforms() {
        let a = 0.37;
        let s = SystemState::q([0.0, a, a], [0.0; 3]).to_y_form();
        assert_eq!(s.pos, [0.0, 2.0 * a, 0.0]);
        let s = SystemState::q([0.0, a, -a], [0.0; 3]).to_y_form();
        assert_eq!(s.pos, [0.0, 0.0, 2.0 * a]);
        let q = SystemState::q([0.3, 0.1, -0.2], [1.0, -2.0, 0.5]);
        let back = q.to_y_form().to_q_form();
        for i in 0..3 {
            assert!((back.pos[i] - q.pos[i]).abs() <= 1e-15);
            assert!((back.vel[i] - q.vel[i]).abs() <= 1e-15);
        }
    }

    #[test]
    fn psi_special_values() {
        assert_eq!(psi1(0.0, 0.0, 2.0, 3.0), 2.0);
        assert_eq!(psi2(0.0, 0.0, 2.0, 3.0), 0.0);
        let pi = std::f64::consts::PI;
        assert!((psi1(pi, pi, 2.0, 3.0) - 3.0).abs() < 1e-15);
        assert_eq!(psi2_approx(0.2, 0.1, 1.0, 2.0), 0.5 * (0.2 + 0.2));
        assert_eq!(psi1_approx(0.0, 0.0, 1.5, 2.0), psi1(0.0, 0.0, 1.5, 2.0));
    }

    #[test]
    fn escapement_default_is_zero() {
        let e = Escapement::default();
        assert_eq!(e.eval(1.0, &[0.1, 0.2, 0.3], &[1.0, 1.0, 1.0]), (0.0, 0.0));
        let e = Escapement::new(|t, _, _| (t, 2.0 * t));
        assert_eq!(e.eval(1.5, &[0.0; 3], &[0.0; 3]), (1.5, 3.0));
    }
}
