//! Two damped pendula hanging from a beam that slides against a spring.
//!
//! The crate evaluates the nonlinear equations of motion, integrates them,
//! studies the frictionless and damped linearizations, and classifies the
//! plane of beam damping `X` and spring stiffness `Y` by how the spectrum of
//! the (x, σ) block compares with the decay of the antiphase coordinate δ.

// Comparisons are written as `!(x > 0.0)` on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod io;
pub mod linear;
pub mod model;
pub mod ode;
pub mod par;
pub mod poly;
pub mod regions;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    derived_constants, psi1, psi1_approx, psi2, psi2_approx, reduce_params, to_q_form, to_y_form,
    DerivedConstants, Escapement, Form, PhysicalParams, ReducedParams, SystemState,
};
pub use par::Execution;
