//! Real polynomials in ascending coefficient order, and their roots.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// `a0 + a1 z + ... + an z^n` with `an != 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PolyCoeffs(Vec<f64>);

impl PolyCoeffs {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.last() {
            Some(&an) if an != 0.0 && an.is_finite() => Ok(PolyCoeffs(coeffs)),
            _ => Err(Error::LeadingCoefficientZero),
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn leading(&self) -> f64 {
        self.0[self.degree()]
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &a| acc * z + a)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Value and derivative by Horner's scheme.
    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    pub fn mul(&self, other: &PolyCoeffs) -> PolyCoeffs {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyCoeffs(out)
    }

    /// Same polynomial scaled so that the leading coefficient is one.
    pub fn monic(&self) -> PolyCoeffs {
        let an = self.leading();
        PolyCoeffs(self.0.iter().map(|a| a / an).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, a| m.max(a.abs()))
    }
}

/// All complex roots, as eigenvalues of the companion matrix followed by one
/// Newton step per root (kept only when it reduces `|p|`).
///
/// The variable is rescaled by `|a0/an|^(1/n)` first so that the companion
/// matrix is reasonably balanced. Roots are returned sorted by real part,
/// then imaginary part.
pub fn poly_roots(c: &PolyCoeffs) -> Result<Vec<Complex64>> {
    let n = c.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let a = c.coeffs();
    // Exact zero roots are peeled off; they would break the scaling.
    let zeros = a.iter().take_while(|&&v| v == 0.0).count();
    let reduced = &a[zeros..];
    let m = reduced.len() - 1;
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if m > 0 {
        let an = reduced[m];
        let scale = (reduced[0] / an).abs().powf(1.0 / m as f64);
        let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
        // q(w) = p(scale * w) / (an scale^m), monic in w
        let mut comp = DMatrix::<f64>::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        for j in 0..m {
            let qj = reduced[j] * scale.powi(j as i32) / (an * scale.powi(m as i32));
            comp[(j, m - 1)] = -qj;
        }
        for w in comp.complex_eigenvalues().iter() {
            roots.push(*w * scale);
        }
    }
    for r in roots.iter_mut() {
        let (p, dp) = c.eval_with_derivative(*r);
        if dp.norm() > 0.0 {
            let cand = *r - p / dp;
            if c.eval_complex(cand).norm() < p.norm() {
                *r = cand;
            }
        }
    }
    // Real input: snap numerically real roots and enforce conjugate symmetry.
    for r in roots.iter_mut() {
        if r.im.abs() <= 1e-14 * r.norm().max(1e-300) {
            r.im = 0.0;
        }
    }
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(roots)
}

/// `|p(r)| / (max|a_j| * max(1, |r|)^n)`, the scaled residual of a root.
pub fn scaled_residual(c: &PolyCoeffs, r: Complex64) -> f64 {
    let n = c.degree() as i32;
    c.eval_complex(r).norm() / (c.max_abs_coeff() * r.norm().max(1.0).powi(n))
}
