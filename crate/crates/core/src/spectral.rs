//! Damped linearization at the origin: characteristic polynomials, stability
//! chain and eigenvalue localization.

use nalgebra::{DMatrix, Matrix3, SMatrix};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::dynamics::DampingModel;
use crate::error::{Error, Result};
use crate::linear::a_bar;
use crate::model::{reduce_params, PhysicalParams, ReducedParams, L, L_INV};
use crate::poly::{poly_roots, PolyCoeffs};

pub type Matrix6 = SMatrix<f64, 6, 6>;

/// First-order linear system in `(x, sigma, delta, x', sigma', delta')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSystem6 {
    pub matrix: Matrix6,
}

/// Linearization with the entries written out for full-velocity damping;
/// rotational damping goes through [`linear_system_from_mass_matrix`].
pub fn linear_system(p: &PhysicalParams, d: DampingModel) -> Result<LinearSystem6> {
    p.validate()?;
    if d == DampingModel::RotationalOnly {
        return linear_system_from_mass_matrix(p, d);
    }
    let (m0, m1, m2, l1, l2, g, k) = (p.m0, p.m1, p.m2, p.l1, p.l2, p.g, p.k);
    let m = p.total_mass();
    let beta = p.beta_total();
    let (r1, r2) = (p.beta1 / m1, p.beta2 / m2);
    let mut a = Matrix6::zeros();
    a[(0, 3)] = 1.0;
    a[(1, 4)] = 1.0;
    a[(2, 5)] = 1.0;

    a[(3, 0)] = -k / m0;
    a[(3, 1)] = 0.5 * (m1 + m2) * g / m0;
    a[(3, 2)] = 0.5 * (m1 - m2) * g / m0;
    a[(3, 3)] = -p.beta0 / m0;

    let den = m0 * l1 * l2;
    a[(4, 0)] = (l1 + l2) * k / den;
    a[(4, 1)] = -(l1 + l2) * m * g / 2.0 / den;
    a[(4, 2)] = 0.5 * g * (m * (l1 - l2) - 2.0 * (m1 * l1 - m2 * l2)) / den;
    a[(4, 3)] = ((l1 + l2) * beta - m * (r1 * l2 + r2 * l1) - (r1 - r2) * (m1 * l1 - m2 * l2)) / den;
    a[(4, 4)] = -0.5 * (r1 + r2);
    a[(4, 5)] = -0.5 * (r1 - r2);

    a[(5, 0)] = -(l1 - l2) * k / den;
    a[(5, 1)] = (l1 - l2) * m * g / 2.0 / den;
    a[(5, 2)] = -0.5 * g * (m * (l1 + l2) - 2.0 * (m1 * l1 + m2 * l2)) / den;
    a[(5, 3)] = (-(l1 - l2) * beta - m * (r1 * l2 - r2 * l1) + (r1 - r2) * (m1 * l1 + m2 * l2)) / den;
    a[(5, 4)] = -0.5 * (r1 - r2);
    a[(5, 5)] = -0.5 * (r1 + r2);
    Ok(LinearSystem6 { matrix: a })
}

/// Linearization assembled from the q-form mass, stiffness and friction
/// matrices at the origin, then mapped to y-coordinates.
pub fn linear_system_from_mass_matrix(p: &PhysicalParams, d: DampingModel) -> Result<LinearSystem6> {
    p.validate()?;
    let abar = a_bar(p);
    let vbar = crate::linear::v_bar(p);
    let (b1, b2) = (p.beta1 * p.l1, p.beta2 * p.l2);
    let dmat = match d {
        DampingModel::FullVelocity => {
            Matrix3::new(p.beta_total(), b1, b2, b1, b1 * p.l1, 0.0, b2, 0.0, b2 * p.l2)
        }
        DampingModel::RotationalOnly => {
            Matrix3::new(p.beta0, b1, b2, 0.0, b1 * p.l1, 0.0, 0.0, 0.0, b2 * p.l2)
        }
    };
    let l = Matrix3::from_fn(|i, j| L[i][j]);
    let li = Matrix3::from_fn(|i, j| L_INV[i][j]);
    let inv = abar.try_inverse().ok_or(Error::DegenerateState)?;
    let kpos = -(l * inv * vbar * li);
    let kvel = -(l * inv * dmat * li);
    let mut a = Matrix6::zeros();
    for i in 0..3 {
        a[(i, i + 3)] = 1.0;
        for j in 0..3 {
            a[(i + 3, j)] = kpos[(i, j)];
            a[(i + 3, j + 3)] = kvel[(i, j)];
        }
    }
    Ok(LinearSystem6 { matrix: a })
}

/// Sextic characteristic polynomial scaled to leading coefficient `1 - 2 mu`.
pub fn char_poly_general(p: &PhysicalParams, d: DampingModel) -> Result<PolyCoeffs> {
    p.validate()?;
    let m = p.total_mass();
    let a6 = 1.0 - (p.m1 + p.m2) / m;
    if d == DampingModel::RotationalOnly {
        let sys = linear_system(p, d)?;
        let c = char_poly_of_matrix(&DMatrix::from_column_slice(6, 6, sys.matrix.as_slice()));
        return PolyCoeffs::new(c.into_iter().map(|v| v * a6).collect());
    }
    let (r1, r2) = (p.beta1 / p.m1, p.beta2 / p.m2);
    let b0 = p.beta0 / m;
    let km = p.k / m;
    let (g1, g2) = (p.g / p.l1, p.g / p.l2);
    let a5 = b0 + a6 * (r1 + r2);
    let a4 = b0 * (r1 + r2) + a6 * r1 * r2 + g2 * (m - p.m1) / m + g1 * (m - p.m2) / m + km;
    let a3 = p.beta1 / m * (g2 * (m - p.m1) / p.m1 + g1)
        + p.beta2 / m * (g1 * (m - p.m2) / p.m2 + g2)
        + km * (r1 + r2)
        + b0 * (g1 + g2 + r1 * r2);
    let a2 = g1 * g2
        + g2 * (km + r1 * (p.beta0 + p.beta2) / m)
        + g1 * (km + r2 * (p.beta0 + p.beta1) / m)
        + km * r1 * r2;
    let a1 = g1 * g2 * p.beta_total() / m + km * (g2 * r1 + g1 * r2);
    let a0 = g1 * g2 * km;
    PolyCoeffs::new(vec![a0, a1, a2, a3, a4, a5, a6])
}

/// `det(z I - A)` in ascending order, by the Faddeev-LeVerrier recursion.
pub fn char_poly_of_matrix(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let id = DMatrix::<f64>::identity(n, n);
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = a * &mk + &id * c[n + 1 - k];
        c[n - k] = -(a * &mk).trace() / k as f64;
    }
    c
}

/// The δ quadratic and the (x, σ) quartic for identical pendula.
pub fn char_poly_identical(p: &PhysicalParams) -> Result<(PolyCoeffs, PolyCoeffs)> {
    p.validate()?;
    p.require_identical()?;
    let r = reduce_params(p)?;
    let quadratic = PolyCoeffs::new(vec![p.g / p.l1, p.beta1 / p.m1, 1.0])?;
    let q = quartic_normalized(r.eta, r.x, r.y, r.mu);
    let w = r.omega;
    let quartic = PolyCoeffs::new(vec![
        q[0] * w.powi(4),
        q[1] * w.powi(3),
        q[2] * w * w,
        q[3] * w,
        q[4],
    ])?;
    Ok((quadratic, quartic))
}

/// Quartic coefficients in units of `omega`, ascending.
pub fn quartic_normalized(eta: f64, x: f64, y: f64, mu: f64) -> [f64; 5] {
    let a = 1.0 - 2.0 * mu;
    [y, eta * y + x + 2.0 * mu * eta, eta * x + y + 1.0, x + a * eta, a]
}

/// Consecutive quartic coefficient ratios `a0/a1, a1/a2, a2/a3, a3/a4` in units of `omega`.
pub fn ek_ratios_normalized(eta: f64, x: f64, y: f64, mu: f64) -> [f64; 4] {
    let a = 1.0 - 2.0 * mu;
    let s1 = x + eta * y + 2.0 * mu * eta;
    let s2 = eta * x + y + 1.0;
    let s3 = x + a * eta;
    [y / s1, s1 / s2, s2 / s3, s3 / a]
}

/// The four ratios in 1/s.
pub fn ek_ratios(rp: &ReducedParams) -> Result<[f64; 4]> {
    if rp.nominal {
        return Err(Error::NotIdentical);
    }
    Ok(ek_ratios_normalized(rp.eta, rp.x, rp.y, rp.mu).map(|v| v * rp.omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouthHurwitzReport {
    pub chain: [f64; 7],
    pub stable: bool,
}

/// First column of the Routh table for a sextic.
pub fn routh_hurwitz(c: &PolyCoeffs) -> Result<RouthHurwitzReport> {
    if c.degree() != 6 {
        return Err(Error::NotApplicable(format!("chain is written for degree 6, got {}", c.degree())));
    }
    let a = c.coeffs();
    let (a0, a1, a2, a3, a4, a5, a6) = (a[0], a[1], a[2], a[3], a[4], a[5], a[6]);
    if a5 == 0.0 {
        return Err(Error::ZeroPivot);
    }
    let b1 = a4 * a5 - a3 * a6;
    let b2 = a2 * a5 - a1 * a6;
    if b1 == 0.0 {
        return Err(Error::ZeroPivot);
    }
    let c1 = b1 / a5;
    let d1 = a3 - a5 * b2 / b1;
    let d2 = a1 - a5 * a5 * a0 / b1;
    let inner = a3 * b1 - a5 * b2;
    if inner == 0.0 || d1 == 0.0 {
        return Err(Error::ZeroPivot);
    }
    let e1 = (b2 - b1 * (a1 * b1 - a5 * a5 * a0) / inner) / a5;
    if e1 == 0.0 {
        return Err(Error::ZeroPivot);
    }
    let f1 = d2 - d1 * a0 / e1;
    let chain = [a6, a5, c1, d1, e1, f1, a0];
    Ok(RouthHurwitzReport {
        chain,
        stable: chain.iter().all(|v| *v > 0.0),
    })
}

/// Stability verdict from the chain, or from the roots when the chain hits a zero pivot.
pub fn stability_verdict(c: &PolyCoeffs) -> Result<bool> {
    match routh_hurwitz(c) {
        Ok(r) => Ok(r.stable),
        Err(Error::ZeroPivot) => Ok(poly_roots(c)?.iter().all(|z| z.re < 0.0)),
        Err(e) => Err(e),
    }
}

/// Inner and outer radii of the annulus holding every root of a polynomial
/// with positive coefficients.
pub fn enestrom_kakeya(c: &PolyCoeffs) -> Result<(f64, f64)> {
    let a = c.coeffs();
    if let Some(index) = a.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::NonPositiveCoefficient { index });
    }
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for w in a.windows(2) {
        let r = w[0] / w[1];
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo, hi))
}

/// Which ratio realizes each end of the quartic annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Zone {
    /// inner a0/a1, outer a2/a3
    Z1,
    /// inner a0/a1, outer a3/a4
    Z2,
    /// inner a1/a2, outer a2/a3
    Z3,
    /// inner a1/a2, outer a3/a4
    Z4,
}

impl Zone {
    pub const ALL: [Zone; 4] = [Zone::Z1, Zone::Z2, Zone::Z3, Zone::Z4];

    pub fn label(self) -> &'static str {
        match self {
            Zone::Z1 => "Z1",
            Zone::Z2 => "Z2",
            Zone::Z3 => "Z3",
            Zone::Z4 => "Z4",
        }
    }

    /// Inner radius is `a0/a1`.
    pub fn inner_is_first(self) -> bool {
        matches!(self, Zone::Z1 | Zone::Z2)
    }

    /// Outer radius is `a2/a3`.
    pub fn outer_is_third(self) -> bool {
        matches!(self, Zone::Z1 | Zone::Z3)
    }
}

impl Serialize for Zone {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Zone and annulus `(rho_m, rho_M)` from the four ratios; ties go to the lower index.
pub fn classify_ratios(r: &[f64; 4]) -> (Zone, f64, f64) {
    let inner_first = r[0] <= r[1];
    let outer_third = r[2] >= r[3];
    let zone = match (inner_first, outer_third) {
        (true, true) => Zone::Z1,
        (true, false) => Zone::Z2,
        (false, true) => Zone::Z3,
        (false, false) => Zone::Z4,
    };
    let rho_m = if inner_first { r[0] } else { r[1] };
    let rho_big = if outer_third { r[2] } else { r[3] };
    (zone, rho_m, rho_big)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Disc {
    pub center_re: f64,
    pub center_im: f64,
    pub radius: f64,
}

impl Disc {
    pub fn contains(&self, z: Complex64, slack: f64) -> bool {
        (z - Complex64::new(self.center_re, self.center_im)).norm() <= self.radius + slack
    }
}

/// Row discs of a real square matrix.
pub fn gershgorin_discs(m: &DMatrix<f64>) -> Vec<Disc> {
    (0..m.nrows())
        .map(|i| Disc {
            center_re: m[(i, i)],
            center_im: 0.0,
            radius: (0..m.ncols()).filter(|&j| j != i).map(|j| m[(i, j)].abs()).sum(),
        })
        .collect()
}

pub fn gershgorin(sys: &LinearSystem6) -> Vec<Disc> {
    gershgorin_discs(&DMatrix::from_column_slice(6, 6, sys.matrix.as_slice()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

/// Factored form for identical pendula.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Factors {
    pub quadratic: Vec<f64>,
    pub quartic: Vec<f64>,
    pub quartic_roots: Vec<ComplexValue>,
}

/// Everything the `spectrum` command reports, in 1/s.
///
/// For identical pendula the annulus, ratios and zone refer to the (x, σ)
/// quartic; otherwise the annulus is that of the full sextic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub coeffs: Vec<f64>,
    pub roots: Vec<ComplexValue>,
    pub rh_chain: Option<[f64; 7]>,
    pub stable: bool,
    pub rho_m: Option<f64>,
    #[serde(rename = "rho_M")]
    pub rho_big: Option<f64>,
    pub ratios: Option<[f64; 4]>,
    pub zone: Option<Zone>,
    pub gershgorin: Vec<Disc>,
    pub factors: Option<Factors>,
    pub omega: Option<f64>,
    /// Set when the annulus could not be computed.
    pub ek_error: Option<String>,
}

impl SpectrumReport {
    /// Roots that fall outside the annulus by more than the relative slack.
    pub fn annulus_violations(&self, slack: f64) -> usize {
        let (Some(lo), Some(hi)) = (self.rho_m, self.rho_big) else {
            return 0;
        };
        let roots: Vec<&ComplexValue> = match &self.factors {
            Some(f) => f.quartic_roots.iter().collect(),
            None => self.roots.iter().collect(),
        };
        roots
            .into_iter()
            .filter(|z| {
                let r = z.re.hypot(z.im);
                r < lo * (1.0 - slack) || r > hi * (1.0 + slack)
            })
            .count()
    }
}

pub fn spectrum_report(p: &PhysicalParams, d: DampingModel) -> Result<SpectrumReport> {
    let sextic = char_poly_general(p, d)?;
    let roots = poly_roots(&sextic)?;
    let (rh_chain, stable) = match routh_hurwitz(&sextic) {
        Ok(r) => (Some(r.chain), r.stable),
        Err(Error::ZeroPivot) => (None, roots.iter().all(|z| z.re < 0.0)),
        Err(e) => return Err(e),
    };
    let sys = linear_system(p, d)?;
    let mut report = SpectrumReport {
        coeffs: sextic.coeffs().to_vec(),
        roots: roots.iter().copied().map(Into::into).collect(),
        rh_chain,
        stable,
        rho_m: None,
        rho_big: None,
        ratios: None,
        zone: None,
        gershgorin: gershgorin(&sys),
        factors: None,
        omega: None,
        ek_error: None,
    };
    let annulus_source = if p.is_identical() && d == DampingModel::FullVelocity {
        let (quad, quart) = char_poly_identical(p)?;
        let r = reduce_params(p)?;
        let ratios = ek_ratios(&r)?;
        let (zone, _, _) = classify_ratios(&ratios);
        report.ratios = Some(ratios);
        report.zone = Some(zone);
        report.omega = Some(r.omega);
        report.factors = Some(Factors {
            quadratic: quad.coeffs().to_vec(),
            quartic: quart.coeffs().to_vec(),
            quartic_roots: poly_roots(&quart)?.into_iter().map(Into::into).collect(),
        });
        quart
    } else {
        sextic
    };
    match enestrom_kakeya(&annulus_source) {
        Ok((lo, hi)) => {
            report.rho_m = Some(lo);
            report.rho_big = Some(hi);
        }
        Err(e) => report.ek_error = Some(e.to_string()),
    }
    Ok(report)
}
