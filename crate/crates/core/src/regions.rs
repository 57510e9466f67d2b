//! Classification of the (X, Y) quadrant for identical pendula, and the
//! simulation-based decay rates it is checked against.
//!
//! Quantities here are in units of `omega = sqrt(g / l)` unless noted.

use serde::Serialize;

use crate::dynamics::{integrate, DampingModel, IntegrateOptions};
use crate::error::{invalid, Error, Result};
use crate::model::{Escapement, PhysicalParams, SystemState};
use crate::ode::OdeOptions;
use crate::par::{map_indexed, Execution};
use crate::poly::{poly_roots, PolyCoeffs};
use crate::spectral::{char_poly_identical, classify_ratios, ek_ratios_normalized, quartic_normalized, Zone};

/// A point of the open quadrant together with the fixed `eta` and `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadrantPoint {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    pub eta: f64,
    pub mu: f64,
}

impl QuadrantPoint {
    pub fn new(x: f64, y: f64, eta: f64, mu: f64) -> Result<Self> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(invalid("X", format!("must be finite and > 0, got {x}")));
        }
        if !(y > 0.0) || !y.is_finite() {
            return Err(invalid("Y", format!("must be finite and > 0, got {y}")));
        }
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(invalid("eta", format!("must be finite and > 0, got {eta}")));
        }
        if !(mu > 0.0 && mu < 0.5) {
            return Err(invalid("mu", format!("must lie in (0, 1/2), got {mu}")));
        }
        Ok(QuadrantPoint { x, y, eta, mu })
    }

    pub fn ratios(&self) -> [f64; 4] {
        ek_ratios_normalized(self.eta, self.x, self.y, self.mu)
    }

    pub fn quartic(&self) -> PolyCoeffs {
        PolyCoeffs::new(quartic_normalized(self.eta, self.x, self.y, self.mu).to_vec())
            .expect("leading coefficient 1 - 2 mu is positive")
    }

    fn require_analyzed_branch(&self) -> Result<()> {
        if self.eta > 1.0 {
            Err(Error::UnsupportedBranch { eta: self.eta })
        } else {
            Ok(())
        }
    }
}

pub fn classify_zone(q: &QuadrantPoint) -> Zone {
    classify_ratios(&q.ratios()).0
}

/// `(rho_m, rho_M)` of the quartic.
pub fn annulus(q: &QuadrantPoint) -> (f64, f64) {
    let (_, lo, hi) = classify_ratios(&q.ratios());
    (lo, hi)
}

/// Left-hand sides of the four quadratic inequalities; each is positive
/// exactly when the corresponding strict ratio comparison
/// `a0/a1 < a1/a2`, `a0/a1 < a3/a4`, `a1/a2 < a2/a3`, `a2/a3 < a3/a4` holds.
pub fn conic_values(q: &QuadrantPoint) -> [f64; 4] {
    let (x, y, e, mu) = (q.x, q.y, q.eta, q.mu);
    let a = 1.0 - 2.0 * mu;
    let e2 = e * e;
    [
        x * x + (e2 - 1.0) * y * y + e * x * y + 4.0 * mu * e * x + (4.0 * mu * e2 - 1.0) * y + 4.0 * mu * mu * e2,
        x * x + e * x * y + e * x + a * (e2 - 1.0) * y + 2.0 * mu * a * e2,
        (e2 - 1.0) * x * x + y * y + e * x * y + e * x + (2.0 - a * e2) * y + 1.0 - 2.0 * mu * a * e2,
        x * x + a * e * x - a * y + a * (a * e2 - 1.0),
    ]
}

pub fn conic_conditions(q: &QuadrantPoint) -> [bool; 4] {
    conic_values(q).map(|v| v > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AntiphaseVerdict {
    /// `eta < 2 a0/a1`
    pub cond_a: bool,
    /// `eta < 2 a1/a2`
    pub cond_b: bool,
    /// The condition matching the zone's inner radius holds, i.e. `eta < 2 rho_m`.
    pub in_a_set: bool,
}

/// Both inequalities evaluated everywhere; `in_a_set` uses the one that
/// matches the zone.
pub fn antiphase_conditions(q: &QuadrantPoint) -> Result<AntiphaseVerdict> {
    q.require_analyzed_branch()?;
    let r = q.ratios();
    let cond_a = q.eta < 2.0 * r[0];
    let cond_b = q.eta < 2.0 * r[1];
    let in_a_set = if classify_zone(q).inner_is_first() { cond_a } else { cond_b };
    Ok(AntiphaseVerdict { cond_a, cond_b, in_a_set })
}

/// Line whose upper side is condition (A): `eta X + (eta^2 - 2) Y + 2 mu eta^2 < 0`.
pub fn line_a(q: &QuadrantPoint) -> f64 {
    q.eta * q.x + (q.eta * q.eta - 2.0) * q.y + 2.0 * q.mu * q.eta * q.eta
}

/// Line whose upper side is condition (B): `(2 - eta^2) X + eta Y - eta (1 - 4 mu) > 0`.
pub fn line_b(q: &QuadrantPoint) -> f64 {
    (2.0 - q.eta * q.eta) * q.x + q.eta * q.y - q.eta * (1.0 - 4.0 * q.mu)
}

/// Mass ratio at which the two lines meet on the Y axis.
pub fn mu_threshold(eta: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(invalid("eta", format!("must be > 0, got {eta}")));
    }
    if eta > 1.0 {
        return Err(Error::UnsupportedBranch { eta });
    }
    Ok((2.0 - eta * eta) / (2.0 * (4.0 - eta * eta)))
}

/// Whether the δ roots stay inside `|z| <= rho_M` in real part, and the
/// margin `rho_M - eta/2`.
pub fn no_inphase_check(q: &QuadrantPoint) -> Result<(bool, f64)> {
    q.require_analyzed_branch()?;
    let (_, hi) = annulus(q);
    let margin = hi - 0.5 * q.eta;
    Ok((margin >= 0.0, margin))
}

/// Whether the δ roots (modulus `omega`) lie inside the outer circle.
pub fn semicircle_condition(q: &QuadrantPoint) -> Result<bool> {
    q.require_analyzed_branch()?;
    let a = 1.0 - 2.0 * q.mu;
    Ok(if classify_zone(q).outer_is_third() {
        q.y > (1.0 - q.eta) * q.x + a * q.eta - 1.0
    } else {
        q.x > a * (1.0 - q.eta)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexRootBound {
    /// `a2/a4 <= 2 rho_m^2`
    pub applicable: bool,
    /// Upper bound on the real parts of the quartic roots.
    pub bound: Option<f64>,
    /// `-eta/2 >= bound`
    pub refined_ok: Option<bool>,
}

/// Real-part bound for a quartic whose roots form two conjugate pairs.
pub fn complex_root_bound(q: &QuadrantPoint) -> Result<ComplexRootBound> {
    let quart = q.quartic();
    let roots = poly_roots(&quart)?;
    if roots.iter().any(|z| z.im == 0.0) {
        return Err(Error::NotApplicable("quartic has real roots".into()));
    }
    let c = quart.coeffs();
    let (rho_m, _) = annulus(q);
    let a2 = c[2] / c[4];
    let a3 = c[3] / c[4];
    let applicable = a2 <= 2.0 * rho_m * rho_m;
    if !applicable {
        return Ok(ComplexRootBound { applicable, bound: None, refined_ok: None });
    }
    let b = 0.5 * a3;
    let cc = 0.25 * (a2 - 2.0 * rho_m * rho_m);
    let bound = 0.5 * (-b - (b * b - 4.0 * cc).sqrt());
    Ok(ComplexRootBound {
        applicable,
        bound: Some(bound),
        refined_ok: Some(-0.5 * q.eta >= bound),
    })
}

/// Smallest `|Re|` over the quartic roots.
pub fn slowest_quartic_rate(q: &QuadrantPoint) -> Result<f64> {
    let roots = poly_roots(&q.quartic())?;
    Ok(roots.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min))
}

/// Outcome of the real-part comparison `min |Re| >= eta/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// From the complex-root bound.
    Bound(bool),
    /// From the quartic roots directly, when the bound does not apply.
    Direct(bool),
}

impl Refinement {
    pub fn label(self) -> &'static str {
        match self {
            Refinement::Bound(true) => "true",
            Refinement::Bound(false) => "false",
            Refinement::Direct(true) => "direct:true",
            Refinement::Direct(false) => "direct:false",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionVerdict {
    pub zone: Zone,
    pub conics: [bool; 4],
    /// `None` when `eta > 1`.
    pub antiphase: Option<AntiphaseVerdict>,
    pub semicircle: Option<bool>,
    pub refined: Option<Refinement>,
    pub rho_m: f64,
    pub rho_big: f64,
    /// A ratio comparison is tied to within 1e-12 relative.
    pub on_boundary: bool,
}

fn near_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

pub fn evaluate_point(q: &QuadrantPoint) -> Result<RegionVerdict> {
    let r = q.ratios();
    let (zone, rho_m, rho_big) = classify_ratios(&r);
    let analyzed = q.eta <= 1.0;
    let refined = if analyzed {
        Some(match complex_root_bound(q) {
            Ok(ComplexRootBound { refined_ok: Some(ok), .. }) => Refinement::Bound(ok),
            Ok(_) | Err(Error::NotApplicable(_)) => Refinement::Direct(slowest_quartic_rate(q)? >= 0.5 * q.eta),
            Err(e) => return Err(e),
        })
    } else {
        None
    };
    Ok(RegionVerdict {
        zone,
        conics: conic_conditions(q),
        antiphase: if analyzed { Some(antiphase_conditions(q)?) } else { None },
        semicircle: if analyzed { Some(semicircle_condition(q)?) } else { None },
        refined,
        rho_m,
        rho_big,
        on_boundary: near_tie(r[0], r[1]) || near_tie(r[2], r[3]),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Deserialize, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

fn axis(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            match spacing {
                Spacing::Linear => lo + s * (hi - lo),
                Spacing::Log => (lo.ln() + s * (hi.ln() - lo.ln())).exp(),
            }
        })
        .collect()
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, lo, hi) in [("X", self.x_min, self.x_max), ("Y", self.y_min, self.y_max)] {
            if !(lo > 0.0) || !hi.is_finite() {
                return Err(Error::InvalidGrid(format!("{name} range must lie inside the open quadrant")));
            }
            if !(hi >= lo) {
                return Err(Error::InvalidGrid(format!("{name} range is empty")));
            }
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidGrid("nx and ny must be positive".into()));
        }
        Ok(())
    }

    pub fn xs(&self) -> Vec<f64> {
        axis(self.x_min, self.x_max, self.nx, self.spacing)
    }

    pub fn ys(&self) -> Vec<f64> {
        axis(self.y_min, self.y_max, self.ny, self.spacing)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionMap {
    pub grid: GridSpec,
    pub eta: f64,
    pub mu: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major with Y as the outer index.
    pub cells: Vec<RegionVerdict>,
}

impl RegionMap {
    pub fn cell(&self, ix: usize, iy: usize) -> &RegionVerdict {
        &self.cells[iy * self.grid.nx + ix]
    }
}

pub fn region_map(grid: &GridSpec, eta: f64, mu: f64, exec: Execution) -> Result<RegionMap> {
    grid.validate()?;
    QuadrantPoint::new(grid.x_min, grid.y_min, eta, mu)?;
    let xs = grid.xs();
    let ys = grid.ys();
    let nx = grid.nx;
    let cells = map_indexed(nx * grid.ny, exec, |i| {
        evaluate_point(&QuadrantPoint { x: xs[i % nx], y: ys[i / nx], eta, mu })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(RegionMap { grid: *grid, eta, mu, xs, ys, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSummary {
    pub cells: usize,
    pub eta: f64,
    pub mu: f64,
    pub zone_fractions: std::collections::BTreeMap<String, f64>,
    pub in_a_fraction: Option<f64>,
    pub semicircle_fraction: Option<f64>,
    pub boundary_cells: usize,
}

pub fn summarize(map: &RegionMap) -> RegionSummary {
    let n = map.cells.len() as f64;
    let mut zone_fractions = std::collections::BTreeMap::new();
    for z in Zone::ALL {
        let c = map.cells.iter().filter(|v| v.zone == z).count();
        zone_fractions.insert(z.label().to_string(), c as f64 / n);
    }
    let frac = |f: &dyn Fn(&RegionVerdict) -> Option<bool>| -> Option<f64> {
        let vals: Option<Vec<bool>> = map.cells.iter().map(f).collect();
        vals.map(|v| v.iter().filter(|b| **b).count() as f64 / n)
    };
    RegionSummary {
        cells: map.cells.len(),
        eta: map.eta,
        mu: map.mu,
        zone_fractions,
        in_a_fraction: frac(&|v| v.antiphase.map(|a| a.in_a_set)),
        semicircle_fraction: frac(&|v| v.semicircle),
        boundary_cells: map.cells.iter().filter(|v| v.on_boundary).count(),
    }
}

/// Asymptotic decay rates (1/s) of the (x, σ) block and of δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRates {
    pub sigma: f64,
    pub delta: f64,
}

/// Rates predicted by the linear spectrum: slowest quartic mode and slowest δ mode.
pub fn predicted_decay_rates(p: &PhysicalParams) -> Result<DecayRates> {
    let (quad, quart) = char_poly_identical(p)?;
    let slow = |c: &PolyCoeffs| -> Result<f64> {
        Ok(poly_roots(c)?.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min))
    };
    Ok(DecayRates { sigma: slow(&quart)?, delta: slow(&quad)? })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFitOptions {
    /// Samples below `floor * max|s|` are ignored.
    pub floor: f64,
    /// Fraction of the informative span discarded at the start.
    pub skip_fraction: f64,
    pub min_peaks: usize,
    /// Output samples per period of the fastest linear mode.
    pub samples_per_period: f64,
    pub ode: OdeOptions,
}

impl Default for DecayFitOptions {
    fn default() -> Self {
        DecayFitOptions {
            floor: 1e-9,
            skip_fraction: 0.4,
            min_peaks: 5,
            samples_per_period: 40.0,
            ode: OdeOptions { rtol: 1e-10, atol: 1e-20, ..OdeOptions::default() },
        }
    }
}

fn least_squares_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mt)
}

/// Rate of the slowest component from an order-two linear recurrence
/// `s[n+2k] = c1 s[n+k] + c2 s[n]` fitted over `first..=last`, which covers
/// both slow oscillations and real exponentials. Needs uniform sampling.
fn linear_prediction_rate(t: &[f64], s: &[f64], first: usize, last: usize) -> Option<f64> {
    let k = ((last - first) / 200).max(1);
    if last < first + 4 * k {
        return None;
    }
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for n in first..=last - 2 * k {
        let (u0, u1, u2) = (s[n], s[n + k], s[n + 2 * k]);
        // rows normalized so the late, small samples count as much as early ones
        let w = 1.0 / (u0.abs() + u1.abs() + u2.abs()).powi(2);
        a11 += w * u1 * u1;
        a12 += w * u1 * u0;
        a22 += w * u0 * u0;
        b1 += w * u1 * u2;
        b2 += w * u0 * u2;
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() <= 1e-14 * a11 * a22 {
        return None;
    }
    let c1 = (b1 * a22 - b2 * a12) / det;
    let c2 = (a11 * b2 - a12 * b1) / det;
    // roots of z^2 - c1 z - c2
    let disc = c1 * c1 + 4.0 * c2;
    let zmax = if disc >= 0.0 {
        (0.5 * (c1.abs() + disc.sqrt())).abs()
    } else {
        (-c2).sqrt()
    };
    let rate = -zmax.ln() / (t[first + k] - t[first]);
    (rate.is_finite() && zmax > 0.0).then_some(rate)
}

/// Exponential decay rate of a sampled signal from its late envelope.
///
/// Oscillating signals use the local maxima of `|s|` (parabolically refined).
/// With too few maxima, a straight `ln|s|` tail after the last zero crossing
/// is fitted directly, and failing that a two-term linear recurrence.
pub fn fit_decay_rate(t: &[f64], s: &[f64], opts: &DecayFitOptions) -> Result<f64> {
    let amax = s.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amax == 0.0 {
        return Err(Error::TooFewPeaks { found: 0, needed: opts.min_peaks });
    }
    let floor = opts.floor * amax;
    let last = s.iter().rposition(|v| v.abs() > floor).unwrap_or(0);
    let t_lo = t[0] + opts.skip_fraction * (t[last] - t[0]);
    let first = t.iter().position(|&v| v >= t_lo).unwrap_or(last);
    let win = first..=last;

    let mut peaks = Vec::new();
    let lo = (*win.start()).max(1);
    let hi = (*win.end()).min(s.len() - 2);
    for i in lo..=hi {
        let (y0, y1, y2) = (s[i - 1].abs(), s[i].abs(), s[i + 1].abs());
        if y1 > y0 && y1 >= y2 && y1 > floor && s[i - 1] * s[i + 1] > 0.0 {
            let den = y0 - 2.0 * y1 + y2;
            let (dt, val) = if den < 0.0 {
                let off = 0.5 * (y0 - y2) / den;
                (off * (t[i + 1] - t[i]), y1 - 0.125 * (y0 - y2) * (y0 - y2) / den)
            } else {
                (0.0, y1)
            };
            peaks.push((t[i] + dt, val.ln()));
        }
    }
    if peaks.len() >= opts.min_peaks {
        return Ok(-least_squares_line(&peaks).0);
    }
    // A non-oscillating tail after the last zero crossing, if ln|s| is straight there.
    let start = (first + 1..=last).rfind(|&i| s[i - 1] * s[i] < 0.0).unwrap_or(first);
    let pts: Vec<(f64, f64)> = (start..=last)
        .filter(|&i| s[i].abs() > floor)
        .map(|i| (t[i], s[i].abs().ln()))
        .collect();
    if pts.len() >= 10 && t[last] - t[start] >= 0.25 * (t[last] - t[first]) {
        let (slope, icpt) = least_squares_line(&pts);
        let dev = pts.iter().map(|p| (p.1 - slope * p.0 - icpt).abs()).fold(0.0, f64::max);
        if dev < 0.05 {
            return Ok(-slope);
        }
    }
    linear_prediction_rate(t, s, first, last)
        .ok_or(Error::TooFewPeaks { found: peaks.len(), needed: opts.min_peaks })
}

/// Decay rates (1/s) of σ and δ fitted to a nonlinear simulation.
pub fn empirical_decay_rates(
    p: &PhysicalParams,
    y0: &SystemState,
    t_end: f64,
    opts: &DecayFitOptions,
) -> Result<DecayRates> {
    p.require_identical()?;
    if p.is_frictionless() {
        return Err(Error::NotApplicable("decay rates need damping".into()));
    }
    let (quad, quart) = char_poly_identical(p)?;
    let fastest = poly_roots(&quart)?
        .into_iter()
        .chain(poly_roots(&quad)?)
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let dt = 2.0 * std::f64::consts::PI / (opts.samples_per_period * fastest);
    let samples = ((t_end / dt).ceil() as usize + 1).clamp(2, 5_000_000);
    let traj = integrate(
        y0,
        p,
        DampingModel::FullVelocity,
        &Escapement::none(),
        t_end,
        &IntegrateOptions { ode: opts.ode, samples, ..IntegrateOptions::default() },
    )?;
    let sig: Vec<f64> = traj.states.iter().map(|s| s.pos[1]).collect();
    let del: Vec<f64> = traj.states.iter().map(|s| s.pos[2]).collect();
    Ok(DecayRates {
        sigma: fit_decay_rate(&traj.times, &sig, opts)?,
        delta: fit_decay_rate(&traj.times, &del, opts)?,
    })
}

/// Curated quadrant points, four to six per zone, with σ and δ
/// decay rates at least 20% apart; `(eta, X, Y, mu)`.
pub const DECAY_PANEL: [(f64, f64, f64, f64); 20] = [
    (0.25, 0.2, 0.1, 0.4),
    (0.5, 0.05, 0.8, 0.25),
    (0.5, 0.4, 0.2, 0.4),
    (0.5, 0.4, 0.05, 0.25),
    (1.0, 0.05, 0.4, 0.25),
    (0.25, 1.5, 0.8, 0.25),
    (0.25, 1.5, 0.1, 0.25),
    (0.5, 1.5, 1.5, 0.25),
    (0.5, 0.8, 0.1, 0.25),
    (1.0, 1.5, 0.4, 0.25),
    (0.25, 0.8, 0.8, 0.25),
    (0.25, 0.05, 1.5, 0.25),
    (0.5, 0.1, 1.5, 0.25),
    (1.0, 0.1, 0.8, 0.1),
    (1.0, 0.2, 1.5, 0.25),
    (0.25, 1.5, 1.5, 0.25),
    (0.25, 0.8, 1.5, 0.4),
    (0.5, 0.8, 1.5, 0.4),
    (0.25, 1.5, 3.0, 0.25),
    (1.0, 1.5, 1.5, 0.25),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PanelOutcome {
    pub point: QuadrantPoint,
    pub zone: Zone,
    pub predicted: DecayRates,
    pub fitted: DecayRates,
    /// Fitted and predicted agree on which of σ, δ decays faster.
    pub ordering_matches: bool,
    /// Largest relative gap between fitted and predicted rates.
    pub max_rate_error: f64,
}

/// Runs the nonlinear simulation for one quadrant point (unit length and mass).
pub fn panel_outcome(point: QuadrantPoint, opts: &DecayFitOptions) -> Result<PanelOutcome> {
    let p = PhysicalParams::from_reduced_identical(point.eta, point.x, point.y, point.mu, 1.0, 9.81, 1.0);
    let predicted = predicted_decay_rates(&p)?;
    let slow = predicted.sigma.min(predicted.delta);
    let t_end = (1.0 / opts.floor).ln() * 1.15 / slow;
    let amp = 1e-4;
    let y0 = SystemState::y([0.0, amp, amp], [0.0; 3]);
    let fitted = empirical_decay_rates(&p, &y0, t_end, opts)?;
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    Ok(PanelOutcome {
        point,
        zone: classify_zone(&point),
        predicted,
        fitted,
        ordering_matches: (fitted.sigma > fitted.delta) == (predicted.sigma > predicted.delta),
        max_rate_error: rel(fitted.sigma, predicted.sigma).max(rel(fitted.delta, predicted.delta)),
    })
}

pub fn run_decay_panel(exec: Execution, opts: &DecayFitOptions) -> Result<Vec<PanelOutcome>> {
    map_indexed(DECAY_PANEL.len(), exec, |i| {
        let (eta, x, y, mu) = DECAY_PANEL[i];
        panel_outcome(QuadrantPoint::new(x, y, eta, mu)?, opts)
    })
    .into_iter()
    .collect()
}
