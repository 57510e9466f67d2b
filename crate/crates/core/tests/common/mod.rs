//! Oracles shared by the integration tests. None of them call into the
//! library's polynomial or linearization code.
#![allow(dead_code)]

use huygens::dynamics::DampingModel;
use huygens::PhysicalParams;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    r.random_range(lo.ln()..hi.ln()).exp()
}

/// Parameters with every damping coefficient positive.
pub fn damped_params(r: &mut impl Rng) -> PhysicalParams {
    PhysicalParams {
        m0: log_uniform(r, 0.1, 10.0),
        m1: log_uniform(r, 0.05, 3.0),
        m2: log_uniform(r, 0.05, 3.0),
        l1: log_uniform(r, 0.1, 3.0),
        l2: log_uniform(r, 0.1, 3.0),
        beta0: log_uniform(r, 1e-3, 3.0),
        beta1: log_uniform(r, 1e-4, 1.0),
        beta2: log_uniform(r, 1e-4, 1.0),
        k: log_uniform(r, 0.1, 200.0),
        g: 9.81,
    }
}

pub fn frictionless(mut p: PhysicalParams) -> PhysicalParams {
    p.beta0 = 0.0;
    p.beta1 = 0.0;
    p.beta2 = 0.0;
    p
}

pub fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

// ---- exact characteristic polynomial ----

type Q = BigRational;
type QPoly = Vec<Q>;

fn q(v: f64) -> Q {
    BigRational::from_float(v).expect("finite parameter")
}

fn padd(a: &QPoly, b: &QPoly) -> QPoly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(Q::zero) + b.get(i).cloned().unwrap_or_else(Q::zero))
        .collect()
}

fn pneg(a: &QPoly) -> QPoly {
    a.iter().map(|v| -v.clone()).collect()
}

fn pmul(a: &QPoly, b: &QPoly) -> QPoly {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `det(z^2 M + z D + K) / (m m1 m2 l1^2 l2^2)` in q-coordinates at the
/// origin, evaluated exactly in rationals from the f64 inputs and rounded
/// once at the end. Its leading coefficient is `m0 / m`.
pub fn exact_char_poly(p: &PhysicalParams, d: DampingModel) -> Vec<f64> {
    let (m0, m1, m2) = (q(p.m0), q(p.m1), q(p.m2));
    let (l1, l2) = (q(p.l1), q(p.l2));
    let (b0, b1, b2) = (q(p.beta0), q(p.beta1), q(p.beta2));
    let (k, g) = (q(p.k), q(p.g));
    let m = &m0 + &m1 + &m2;
    let z = Q::zero();
    // kinetic matrix
    let mm = [
        [m.clone(), &m1 * &l1, &m2 * &l2],
        [&m1 * &l1, &m1 * &l1 * &l1, z.clone()],
        [&m2 * &l2, z.clone(), &m2 * &l2 * &l2],
    ];
    // friction: each bob's velocity is (x' + l theta' cos, ...) for full damping
    let dd = match d {
        DampingModel::FullVelocity => [
            [&b0 + &b1 + &b2, &b1 * &l1, &b2 * &l2],
            [&b1 * &l1, &b1 * &l1 * &l1, z.clone()],
            [&b2 * &l2, z.clone(), &b2 * &l2 * &l2],
        ],
        DampingModel::RotationalOnly => [
            [b0.clone(), &b1 * &l1, &b2 * &l2],
            [z.clone(), &b1 * &l1 * &l1, z.clone()],
            [z.clone(), z.clone(), &b2 * &l2 * &l2],
        ],
    };
    let kk = [
        [k.clone(), z.clone(), z.clone()],
        [z.clone(), &m1 * &g * &l1, z.clone()],
        [z.clone(), z.clone(), &m2 * &g * &l2],
    ];
    let e = |i: usize, j: usize| -> QPoly { vec![kk[i][j].clone(), dd[i][j].clone(), mm[i][j].clone()] };
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| padd(&pmul(&e(r1, c1), &e(r2, c2)), &pneg(&pmul(&e(r1, c2), &e(r2, c1))));
    let det = padd(
        &padd(&pmul(&e(0, 0), &minor(1, 2, 1, 2)), &pneg(&pmul(&e(0, 1), &minor(1, 2, 0, 2)))),
        &pmul(&e(0, 2), &minor(1, 2, 0, 1)),
    );
    let norm = &m * &m1 * &m2 * &l1 * &l1 * &l2 * &l2;
    det.into_iter().map(|c| (c / &norm).to_f64().unwrap()).collect()
}

/// The frictionless cubic in `lambda = omega^2`: `det(lambda M - K)` with the
/// same normalization as [`exact_char_poly`].
pub fn exact_frequency_cubic(p: &PhysicalParams) -> Vec<f64> {
    let s = exact_char_poly(&frictionless(*p), DampingModel::FullVelocity);
    // det(z^2 M + K) at z^2 = -lambda equals -det(lambda M - K)
    vec![-s[0], s[2], -s[4], s[6]]
}

// ---- Aberth-Ehrlich iteration ----

/// All roots of a real polynomial (ascending coefficients) by simultaneous
/// Aberth iteration from points on a circle.
pub fn aberth_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let an = c[n];
    let eval = |z: Complex64| {
        let mut p = Complex64::zero();
        let mut dp = Complex64::zero();
        for &a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let radius = (c[0] / an).abs().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1e-300));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Largest distance from a root in `a` to its nearest root in `b`, relative
/// to `scale`.
pub fn root_set_distance(a: &[Complex64], b: &[Complex64], scale: f64) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        / scale
}
