//! Nonlinear equations of motion, energy and time integration.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{psi1, psi2, DerivedConstants, Escapement, Form, PhysicalParams, SystemState};
use crate::ode::{dopri5, OdeOptions, OdeStats};

/// How friction acts on the pendula.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DampingModel {
    /// Every point mass feels `-beta_i * velocity`.
    #[default]
    #[serde(rename = "full")]
    FullVelocity,
    /// The bobs are damped only along their rotational direction.
    #[serde(rename = "rotational")]
    RotationalOnly,
}

/// The inertial denominator of the explicit y-form equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaFactor {
    pub theta_value: f64,
}

/// `m - m1 cos^2(theta1) - m2 cos^2(theta2)` written in (sigma, delta).
pub fn theta_factor(sigma: f64, delta: f64, p: &PhysicalParams) -> ThetaFactor {
    let m = p.total_mass();
    let ms = p.m1 + p.m2;
    let theta_value = m - 0.5 * (ms + psi1(2.0 * sigma, 2.0 * delta, ms, p.m2 - p.m1));
    ThetaFactor { theta_value }
}

/// Mass matrix in q-coordinates at angles `(theta1, theta2)`.
pub fn mass_matrix(theta1: f64, theta2: f64, p: &PhysicalParams) -> Matrix3<f64> {
    let b1 = p.m1 * p.l1 * theta1.cos();
    let b2 = p.m2 * p.l2 * theta2.cos();
    Matrix3::new(
        p.total_mass(),
        b1,
        b2,
        b1,
        p.m1 * p.l1 * p.l1,
        0.0,
        b2,
        0.0,
        p.m2 * p.l2 * p.l2,
    )
}

/// Generalized friction force in q-components. The state may be in either form.
pub fn generalized_damping(state: &SystemState, p: &PhysicalParams, d: DampingModel) -> [f64; 3] {
    let s = state.to_q_form();
    let [_, th1, th2] = s.pos;
    let [xd, td1, td2] = s.vel;
    let (c1, c2) = (th1.cos(), th2.cos());
    let shared = p.beta1 * p.l1 * td1 * c1 + p.beta2 * p.l2 * td2 * c2;
    match d {
        DampingModel::FullVelocity => [
            -p.beta_total() * xd - shared,
            -p.beta1 * p.l1 * (xd * c1 + p.l1 * td1),
            -p.beta2 * p.l2 * (xd * c2 + p.l2 * td2),
        ],
        DampingModel::RotationalOnly => [
            -p.beta0 * xd - shared,
            -p.beta1 * p.l1 * p.l1 * td1,
            -p.beta2 * p.l2 * p.l2 * td2,
        ],
    }
}

/// Accelerations in q-form from the mass-matrix formulation.
///
/// The escapement enters through the generalized force
/// `(f1 cos theta1 + f2 cos theta2, l1 f1, l2 f2)`.
pub fn accel_q(
    state: &SystemState,
    p: &PhysicalParams,
    d: DampingModel,
    e: &Escapement,
    t: f64,
) -> Result<[f64; 3]> {
    let s = state.to_q_form();
    let [x, th1, th2] = s.pos;
    let [_, td1, td2] = s.vel;
    let (s1, c1) = th1.sin_cos();
    let (s2, c2) = th2.sin_cos();
    let phi = generalized_damping(&s, p, d);
    let (f1, f2) = e.eval(t, &s.pos, &s.vel);
    let rhs = Vector3::new(
        -p.k * x
            + p.m1 * p.l1 * td1 * td1 * s1
            + p.m2 * p.l2 * td2 * td2 * s2
            + phi[0]
            + f1 * c1
            + f2 * c2,
        -p.m1 * p.g * p.l1 * s1 + phi[1] + p.l1 * f1,
        -p.m2 * p.g * p.l2 * s2 + phi[2] + p.l2 * f2,
    );
    let m = mass_matrix(th1, th2, p);
    let a = m.lu().solve(&rhs).ok_or(Error::DegenerateState)?;
    Ok([a[0], a[1], a[2]])
}

/// Accelerations `(x'', sigma'', delta'')` from the explicit y-form equations.
pub fn accel_y(
    state: &SystemState,
    p: &PhysicalParams,
    d: DampingModel,
    e: &Escapement,
    t: f64,
) -> Result<[f64; 3]> {
    let s = state.to_y_form();
    let [x, sg, dl] = s.pos;
    let [xd, sd, dd] = s.vel;
    let c = DerivedConstants::from_params_unchecked(p);
    let m = p.total_mass();
    let th = theta_factor(sg, dl, p).theta_value;
    if th.abs() < 1e-12 * m {
        return Err(Error::DegenerateState);
    }
    let (ssg, csg) = sg.sin_cos();
    let (sdl, cdl) = dl.sin_cos();
    let ps1 = |c1: f64, c2: f64| psi1(sg, dl, c1, c2);
    let ps2 = |c1: f64, c2: f64| psi2(sg, dl, c1, c2);

    let (f1, f2) = if e.is_none() {
        (0.0, 0.0)
    } else {
        let q = s.to_q_form();
        e.eval(t, &q.pos, &q.vel)
    };

    let centrifugal = ps2(c.bm_plus, c.bm_minus) * (sd * sd + dd * dd) + 2.0 * ps2(c.bm_minus, c.bm_plus) * sd * dd;
    let l12 = p.l1 * p.l2;
    let beta = p.beta_total();
    let w1 = p.beta1 / (p.m1 * p.l1);
    let w2 = p.beta2 / (p.m2 * p.l2);

    // beam
    let xdamp = match d {
        DampingModel::FullVelocity => {
            p.beta0 + 0.5 * (p.beta1 + p.beta2)
                - 0.5 * ((p.beta1 + p.beta2) * csg * cdl + (p.beta2 - p.beta1) * ssg * sdl)
        }
        DampingModel::RotationalOnly => p.beta0,
    };
    let ax = -p.k * x + 0.5 * p.g * ((p.m1 + p.m2) * ssg * cdl + (p.m1 - p.m2) * sdl * csg) + 0.5 * centrifugal
        - xdamp * xd;

    // sum of the angles
    let sigma_xdot = match d {
        DampingModel::FullVelocity => {
            2.0 * beta * ps1(c.l_plus, c.l_minus) - m * ps1(w1 + w2, w2 - w1)
                - 2.0 * c.betam_minus / l12
                    * (ps1(c.bm_minus, c.bm_plus) * (1.0 + csg * cdl) - ps1(c.bm_plus, c.bm_minus) * ssg * sdl)
        }
        DampingModel::RotationalOnly => 2.0 * p.beta0 * ps1(c.l_plus, c.l_minus),
    };
    let asg = -2.0 * p.g * (m * ps2(c.l_plus, -c.l_minus) - ps1(-c.bm_minus, c.bm_plus) * sdl / l12)
        + 2.0 * p.k * ps1(c.l_plus, c.l_minus) * x
        - ps1(c.l_plus, c.l_minus) * centrifugal
        + th * (f1 / (p.m1 * p.l1) + f2 / (p.m2 * p.l2))
        + sigma_xdot * xd
        - th * (c.betam_plus * sd + c.betam_minus * dd);

    // difference of the angles
    let delta_xdot = match d {
        DampingModel::FullVelocity => {
            2.0 * beta * ps1(c.l_minus, c.l_plus) - m * ps1(w2 - w1, w1 + w2)
                - 2.0 * c.betam_minus / l12
                    * (ps1(c.bm_plus, c.bm_minus) * (1.0 + csg * cdl) - ps1(c.bm_minus, c.bm_plus) * ssg * sdl)
        }
        DampingModel::RotationalOnly => 2.0 * p.beta0 * ps1(c.l_minus, c.l_plus),
    };
    let adl = -2.0 * p.g * (m * ps2(-c.l_minus, c.l_plus) - ps1(c.bm_plus, -c.bm_minus) * sdl / l12)
        - 2.0 * p.k * ps1(c.l_minus, c.l_plus) * x
        + ps1(c.l_minus, c.l_plus) * centrifugal
        + th * (f1 / (p.m1 * p.l1) - f2 / (p.m2 * p.l2))
        - delta_xdot * xd
        - th * (c.betam_minus * sd + c.betam_plus * dd);

    Ok([ax / th, asg / th, adl / th])
}

/// Total mechanical energy; the origin at rest has energy `-(m1 g l1 + m2 g l2)`.
pub fn energy(state: &SystemState, p: &PhysicalParams) -> f64 {
    let s = state.to_q_form();
    let [x, th1, th2] = s.pos;
    let [xd, td1, td2] = s.vel;
    let (c1, c2) = (th1.cos(), th2.cos());
    let kinetic = 0.5 * p.total_mass() * xd * xd
        + 0.5 * p.m1 * p.l1 * p.l1 * td1 * td1
        + 0.5 * p.m2 * p.l2 * p.l2 * td2 * td2
        + p.m1 * p.l1 * xd * td1 * c1
        + p.m2 * p.l2 * xd * td2 * c2;
    let potential = 0.5 * p.k * x * x - p.m1 * p.g * p.l1 * c1 - p.m2 * p.g * p.l2 * c2;
    kinetic + potential
}

/// Step control and sampling for [`integrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub ode: OdeOptions,
    pub t0: f64,
    /// Number of uniformly spaced output samples on `[t0, t_end]`, endpoints included.
    pub samples: usize,
    /// Compare the y-form accelerations with the mass-matrix solve every
    /// this many accepted steps.
    pub cross_check_every: Option<usize>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            ode: OdeOptions::default(),
            t0: 0.0,
            samples: 1001,
            cross_check_every: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntegrationStats {
    pub ode: OdeStats,
    /// Largest `(E(t+h) - E(t)) / |E(t)|` over accepted steps.
    pub max_energy_rise: f64,
    /// Largest relative gap between the two acceleration formulations seen
    /// by the cross-check.
    pub max_cross_check: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// y-form states
    pub states: Vec<SystemState>,
    pub energies: Vec<f64>,
    pub stats: IntegrationStats,
}

/// Relative discrepancy between two acceleration vectors.
pub fn accel_discrepancy(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    a.iter().zip(b).fold(0.0f64, |s, (u, v)| s.max((u - v).abs())) / scale
}

/// Integrates the full nonlinear system with the y-form right-hand side.
pub fn integrate(
    state0: &SystemState,
    p: &PhysicalParams,
    d: DampingModel,
    e: &Escapement,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    p.validate()?;
    if !(t_end > opts.t0) {
        return Err(crate::error::invalid("t_end", format!("must exceed t0 = {}", opts.t0)));
    }
    let t0 = opts.t0;
    let n = opts.samples.max(2);
    let times: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { t_end } else { t0 + (t_end - t0) * i as f64 / (n - 1) as f64 })
        .collect();

    let y0 = state0.to_y_form().to_array();
    let rhs = |t: f64, y: &[f64; 6]| -> Result<[f64; 6]> {
        let s = SystemState::from_array(Form::Y, *y);
        let a = accel_y(&s, p, d, e, t)?;
        Ok([y[3], y[4], y[5], a[0], a[1], a[2]])
    };

    let mut max_rise = f64::NEG_INFINITY;
    let mut max_cc = 0.0f64;
    let observer = |step: &crate::ode::Step<'_, 6>| -> Result<()> {
        let s0 = SystemState::from_array(Form::Y, *step.y0);
        let s1 = SystemState::from_array(Form::Y, *step.y1);
        let e0 = energy(&s0, p);
        let e1 = energy(&s1, p);
        let denom = if e0 == 0.0 { 1.0 } else { e0.abs() };
        max_rise = max_rise.max((e1 - e0) / denom);
        if let Some(every) = opts.cross_check_every {
            if every > 0 && step.index.is_multiple_of(every) {
                let ay = accel_y(&s1, p, d, e, step.t1)?;
                let q = s1.to_q_form();
                let aq = accel_q(&q, p, d, e, step.t1)?;
                let aq_y = crate::model::apply_l(aq);
                max_cc = max_cc.max(accel_discrepancy(&ay, &aq_y));
            }
        }
        Ok(())
    };

    let (ys, ode_stats) = dopri5(rhs, t0, y0, t_end, &times, &opts.ode, observer)?;
    let states: Vec<SystemState> = ys.into_iter().map(|y| SystemState::from_array(Form::Y, y)).collect();
    let energies = states.iter().map(|s| energy(s, p)).collect();
    Ok(Trajectory {
        times,
        states,
        energies,
        stats: IntegrationStats {
            ode: ode_stats,
            max_energy_rise: if max_rise.is_finite() { max_rise } else { 0.0 },
            max_cross_check: max_cc,
        },
    })
}
