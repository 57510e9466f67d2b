//! Seeded cross-module consistency checks, as run by `huygens verify`.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dynamics::{accel_discrepancy, accel_q, accel_y, DampingModel};
use crate::error::Result;
use crate::linear::frequency_cubic;
use crate::model::{apply_l, Escapement, PhysicalParams, SystemState};
use crate::par::{map_indexed, Execution};
use crate::poly::{poly_roots, PolyCoeffs};
use crate::regions::{annulus, conic_values, run_decay_panel, DecayFitOptions, QuadrantPoint};
use crate::spectral::{char_poly_general, char_poly_identical, enestrom_kakeya, routh_hurwitz};

/// Deliberate corruption used to confirm that the suite catches mistakes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Scales the λ^4 coefficient of the sextic by `1 + 1e-6`.
    SexticCoefficient,
    /// Swaps the beam-damping term of the second quadrant inequality for `X`.
    ConicTwo,
}

impl FromStr for Fault {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sextic-a4" => Ok(Fault::SexticCoefficient),
            "conic2" => Ok(Fault::ConicTwo),
            other => Err(format!("unknown fault `{other}` (expected sextic-a4 or conic2)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub draws: usize,
    pub fault: Option<Fault>,
    pub exec: Execution,
    pub decay_panel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 20240601,
            draws: 10_000,
            fault: None,
            exec: Execution::Parallel,
            decay_panel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub detail: String,
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random valid parameters with positive damping; equal pendula when `identical`.
pub fn random_params<R: Rng>(rng: &mut R, identical: bool) -> PhysicalParams {
    let m1 = log_uniform(rng, 0.05, 2.0);
    let l1 = log_uniform(rng, 0.2, 2.0);
    let b1 = log_uniform(rng, 1e-3, 0.5);
    let (m2, l2, b2) = if identical {
        (m1, l1, b1)
    } else {
        (log_uniform(rng, 0.05, 2.0), log_uniform(rng, 0.2, 2.0), log_uniform(rng, 1e-3, 0.5))
    };
    PhysicalParams {
        m0: log_uniform(rng, 0.2, 5.0),
        m1,
        m2,
        l1,
        l2,
        beta0: log_uniform(rng, 1e-2, 2.0),
        beta1: b1,
        beta2: b2,
        k: log_uniform(rng, 1.0, 100.0),
        g: 9.81,
    }
}

/// Random quadrant point with `eta <= 1`.
pub fn random_quadrant<R: Rng>(rng: &mut R) -> QuadrantPoint {
    QuadrantPoint {
        x: log_uniform(rng, 1e-3, 1e2),
        y: log_uniform(rng, 1e-3, 1e2),
        eta: rng.random_range(1e-3..=1.0),
        mu: rng.random_range(1e-4..0.5),
    }
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sextic(p: &PhysicalParams, fault: Option<Fault>) -> Result<PolyCoeffs> {
    let c = char_poly_general(p, DampingModel::FullVelocity)?;
    if fault == Some(Fault::SexticCoefficient) {
        let mut v = c.coeffs().to_vec();
        v[4] *= 1.0 + 1e-6;
        return PolyCoeffs::new(v);
    }
    Ok(c)
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn finish(name: &'static str, checked: usize, failures: usize, worst: f64, what: &str) -> CheckResult {
    CheckResult {
        name,
        passed: failures == 0 && checked > 0,
        checked,
        failures,
        worst,
        detail: format!("{failures}/{checked} failures, worst {what} {worst:.3e}"),
    }
}

fn formulation_equivalence(o: &VerifyOptions) -> Result<CheckResult> {
    let mut rng = seeded(o.seed, 1);
    let cases: Vec<(PhysicalParams, SystemState, DampingModel)> = (0..o.draws)
        .map(|i| {
            let p = random_params(&mut rng, false);
            let s = SystemState::q(
                [rng.random_range(-0.5..0.5), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0)],
                [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            );
            let d = if i % 2 == 0 { DampingModel::FullVelocity } else { DampingModel::RotationalOnly };
            (p, s, d)
        })
        .collect();
    let errs = map_indexed(cases.len(), o.exec, |i| -> Result<f64> {
        let (p, s, d) = &cases[i];
        let e = Escapement::none();
        let aq = apply_l(accel_q(s, p, *d, &e, 0.0)?);
        let ay = accel_y(&s.to_y_form(), p, *d, &e, 0.0)?;
        Ok(accel_discrepancy(&ay, &aq))
    });
    let errs: Vec<f64> = errs.into_iter().collect::<Result<_>>()?;
    let worst = errs.iter().copied().fold(0.0, f64::max);
    let failures = errs.iter().filter(|e| **e > 1e-9).count();
    Ok(finish("formulation_equivalence", errs.len(), failures, worst, "relative gap"))
}

fn factorization(o: &VerifyOptions) -> Result<CheckResult> {
    let mut rng = seeded(o.seed, 2);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..o.draws {
        let p = random_params(&mut rng, true);
        let s = sextic(&p, o.fault)?;
        let (q2, q4) = char_poly_identical(&p)?;
        let prod = q2.mul(&q4);
        let e = s.coeffs().iter().zip(prod.coeffs()).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
        worst = worst.max(e);
        if e > 1e-12 {
            failures += 1;
        }
    }
    Ok(finish("factorization", o.draws, failures, worst, "relative coefficient gap"))
}

fn gamma_resolution(o: &VerifyOptions) -> Result<CheckResult> {
    let mut rng = seeded(o.seed, 3);
    let mut worst = 0.0f64;
    let mut failures = 0;
    let n = o.draws.min(1000);
    for _ in 0..n {
        let mut p = random_params(&mut rng, false);
        p.beta0 = 0.0;
        p.beta1 = 0.0;
        p.beta2 = 0.0;
        let s = sextic(&p, o.fault)?;
        let c = frequency_cubic(&p)?;
        let (a, b) = (s.coeffs(), c.coeffs());
        let e = [rel(a[6], b[3]), rel(a[4], -b[2]), rel(a[2], b[1]), rel(a[0], -b[0])]
            .into_iter()
            .fold(0.0, f64::max);
        worst = worst.max(e);
        if e > 1e-12 || a[1] != 0.0 || a[3] != 0.0 || a[5] != 0.0 {
            failures += 1;
        }
    }
    Ok(finish("gamma_resolution", n, failures, worst, "relative coefficient gap"))
}

fn spectral_checks(o: &VerifyOptions) -> Result<(CheckResult, CheckResult)> {
    let mut rng = seeded(o.seed, 4);
    let params: Vec<PhysicalParams> = (0..o.draws).map(|_| random_params(&mut rng, false)).collect();
    let outcomes = map_indexed(params.len(), o.exec, |i| -> Result<(bool, f64, f64)> {
        let s = sextic(&params[i], o.fault)?;
        let roots = poly_roots(&s)?;
        let (lo, hi) = enestrom_kakeya(&s)?;
        let rh = routh_hurwitz(&s).map(|r| r.stable).unwrap_or(false);
        let max_re = roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let stable = rh && max_re < -1e-12 * hi;
        let spill = roots
            .iter()
            .map(|z| {
                let r = z.norm();
                (lo * (1.0 - 1e-9) - r).max(r - hi * (1.0 + 1e-9)) / hi
            })
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((stable, max_re / hi, spill))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let rh_fail = outcomes.iter().filter(|o| !o.0).count();
    let rh_worst = outcomes.iter().map(|o| o.1).fold(f64::NEG_INFINITY, f64::max);
    let ek_fail = outcomes.iter().filter(|o| o.2 > 0.0).count();
    let ek_worst = outcomes.iter().map(|o| o.2).fold(f64::NEG_INFINITY, f64::max);
    Ok((
        finish("rh_vs_roots", outcomes.len(), rh_fail, rh_worst, "max Re/rho_M"),
        finish("ek_containment", outcomes.len(), ek_fail, ek_worst, "annulus overshoot/rho_M"),
    ))
}

fn quadrant_checks(o: &VerifyOptions) -> (CheckResult, CheckResult) {
    let mut rng = seeded(o.seed, 5);
    let n = o.draws * 10;
    let mut mismatches = 0;
    let mut skipped = 0;
    let mut counter = 0;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..n {
        let q = random_quadrant(&mut rng);
        let r = q.ratios();
        let mut c = conic_values(&q);
        if o.fault == Some(Fault::ConicTwo) {
            let a = 1.0 - 2.0 * q.mu;
            c[1] = q.x * q.x + q.eta * q.x * q.y + q.x + a * (q.eta * q.eta - 1.0) * q.y + 2.0 * q.mu * a * q.eta * q.eta;
        }
        let pairs = [(r[0], r[1]), (r[0], r[3]), (r[1], r[2]), (r[2], r[3])];
        for (k, (u, v)) in pairs.iter().enumerate() {
            if (u - v).abs() <= 1e-12 * u.max(*v) {
                skipped += 1;
                continue;
            }
            if (c[k] > 0.0) != (u < v) {
                mismatches += 1;
            }
        }
        let (_, hi) = annulus(&q);
        let margin = hi - 0.5 * q.eta;
        worst_margin = worst_margin.min(margin);
        if margin < 0.0 {
            counter += 1;
        }
    }
    let mut conic = finish("conic_consistency", 4 * n - skipped, mismatches, mismatches as f64, "mismatch count");
    conic.detail = format!("{mismatches} mismatches over {} comparisons ({skipped} in the boundary band)", 4 * n - skipped);
    let mut prop = finish("no_inphase", n, counter, worst_margin, "margin rho_M - eta/2");
    prop.detail = format!("{counter} counterexamples, smallest margin {worst_margin:.3e}");
    (conic, prop)
}

fn decay_panel(o: &VerifyOptions) -> Result<CheckResult> {
    let outcomes = run_decay_panel(o.exec, &DecayFitOptions::default())?;
    let failures = outcomes
        .iter()
        .filter(|p| !p.ordering_matches || p.max_rate_error > 0.05)
        .count();
    let worst = outcomes.iter().map(|p| p.max_rate_error).fold(0.0, f64::max);
    Ok(finish("decay_panel", outcomes.len(), failures, worst, "relative rate error"))
}

/// Runs every check and reports each by name.
pub fn run_verify(o: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let mut out = vec![formulation_equivalence(o)?, factorization(o)?, gamma_resolution(o)?];
    let (rh, ek) = spectral_checks(o)?;
    out.push(rh);
    out.push(ek);
    let (conic, prop) = quadrant_checks(o);
    out.push(conic);
    out.push(prop);
    if o.decay_panel {
        out.push(decay_panel(o)?);
    }
    Ok(out)
}
