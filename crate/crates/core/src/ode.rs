//! Adaptive Dormand-Prince 5(4) integration through `ode_solvers`, with a
//! per-step observer and cubic Hermite samples on the accepted steps.

use std::cell::RefCell;

use ode_solvers::dop_shared::IntegrationError;
use ode_solvers::{Dopri5, OutputType, SVector, System};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// One accepted step, handed to the observer.
pub struct Step<'a, const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: &'a [f64; N],
    pub y1: &'a [f64; N],
    pub index: usize,
}

fn hermite<const N: usize>(t0: f64, y0: &[f64; N], f0: &[f64; N], t1: f64, y1: &[f64; N], f1: &[f64; N], t: f64) -> [f64; N] {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    std::array::from_fn(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
}

/// State carried across accepted steps: the previous point, pending samples
/// and the first error raised by the right-hand side or the observer.
struct Sink<'s, const N: usize, O> {
    samples: &'s [f64],
    next: usize,
    out: Vec<[f64; N]>,
    prev: (f64, [f64; N], [f64; N]),
    index: usize,
    observer: O,
    error: Option<Error>,
}

struct Adapter<'a, 's, const N: usize, F, O> {
    f: &'a F,
    sink: &'a RefCell<Sink<'s, N, O>>,
}

impl<const N: usize, F, O> System<f64, SVector<f64, N>> for Adapter<'_, '_, N, F, O>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(&Step<'_, N>) -> Result<()>,
{
    fn system(&self, t: f64, y: &SVector<f64, N>, dy: &mut SVector<f64, N>) {
        match (self.f)(t, &(*y).into()) {
            Ok(v) => *dy = SVector::from(v),
            Err(e) => {
                // NaN forces rejection; solout then stops the run
                dy.fill(f64::NAN);
                let mut sink = self.sink.borrow_mut();
                if sink.error.is_none() {
                    sink.error = Some(e);
                }
            }
        }
    }

    fn solout(&mut self, t: f64, y: &SVector<f64, N>, dy: &SVector<f64, N>) -> bool {
        let mut sink = self.sink.borrow_mut();
        if sink.error.is_some() {
            return true;
        }
        let (y1, f1): ([f64; N], [f64; N]) = ((*y).into(), (*dy).into());
        let (t0, y0, f0) = sink.prev;
        let step = Step { t0, t1: t, y0: &y0, y1: &y1, index: sink.index };
        if let Err(e) = (sink.observer)(&step) {
            sink.error = Some(e);
            return true;
        }
        while sink.next < sink.samples.len() && sink.samples[sink.next] <= t {
            let ts = sink.samples[sink.next];
            let v = if ts == t { y1 } else { hermite(t0, &y0, &f0, t, &y1, &f1, ts) };
            sink.out.push(v);
            sink.next += 1;
        }
        sink.prev = (t, y1, f1);
        sink.index += 1;
        false
    }
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, returning the state at each
/// of the ascending `samples` (those outside `[t0, t_end]` are dropped).
///
/// `observer` sees every accepted step; an error from it or from `f` aborts
/// the run and is returned.
pub fn dopri5<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    samples: &[f64],
    opts: &OdeOptions,
    observer: O,
) -> Result<(Vec<[f64; N]>, OdeStats)>
where
    F: Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(&Step<'_, N>) -> Result<()>,
{
    let first = samples.iter().position(|&s| s >= t0).unwrap_or(samples.len());
    let samples = &samples[first..];
    let mut out = Vec::with_capacity(samples.len());
    let mut next = 0;
    while next < samples.len() && samples[next] <= t0 {
        out.push(y0);
        next += 1;
    }
    if t_end <= t0 {
        return Ok((out, OdeStats::default()));
    }
    let f0 = f(t0, &y0)?;
    let sink = RefCell::new(Sink { samples, next, out, prev: (t0, y0, f0), index: 0, observer, error: None });
    let max_steps = u32::try_from(opts.max_steps).unwrap_or(u32::MAX);
    let mut solver = Dopri5::from_param(
        Adapter { f: &f, sink: &sink },
        t0,
        t_end,
        t_end - t0,
        SVector::from(y0),
        opts.rtol,
        opts.atol,
        0.9,
        0.04,
        0.2,
        10.0,
        opts.h_max.min(t_end - t0),
        opts.h_init.unwrap_or(0.0),
        max_steps,
        // non-stiff problems only; step-size underflow is the failure signal
        u32::MAX,
        OutputType::Sparse,
    );
    let result = solver.integrate();
    drop(solver);
    let sink = sink.into_inner();
    if let Some(e) = sink.error {
        return Err(e);
    }
    let stats = match result {
        Ok(s) => s,
        Err(IntegrationError::MaxNumStepReached { x, .. }) => return Err(Error::MaxSteps { t: x }),
        Err(IntegrationError::StepSizeUnderflow { x }) | Err(IntegrationError::StiffnessDetected { x }) => {
            return Err(Error::StepSizeUnderflow { t: x })
        }
    };
    let mut out = sink.out;
    // samples at t_end that rounding left behind
    while out.len() < samples.len() && samples[out.len()] <= t_end {
        out.push(sink.prev.1);
    }
    Ok((
        out,
        OdeStats {
            accepted: stats.accepted_steps as usize,
            rejected: stats.rejected_steps as usize,
            rhs_evals: stats.num_eval as usize + 1,
        },
    ))
}
