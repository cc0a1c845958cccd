//! Orbits of parabolic automorphisms: the closed form of `1 - |phi_m(z)|^2`,
//! Blaschke summability with a certified tail, orbit Blaschke products and
//! their invariance, and the decay rate that rules out a `c/m` law.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::{BlaschkeSequence, FiniteBlaschkeProduct, InnerFunction};
use crate::maps::{
    from_half_plane, to_half_plane, AutomorphismClass, DiskAutomorphism, LinearFractionalMap,
};
use crate::series::{
    invariance_residual_report, model_space_residual, ResidualReport, DEFAULT_ORACLE_N,
    DEFAULT_PROBES,
};

pub const MIN_TERMS: usize = 10;
/// Orbit points checked for multiplicity transport.
pub const TRANSPORT_POINTS: usize = 20;
/// Factor counts for the residual trend.
pub const TREND_FACTORS: [usize; 3] = [5, 10, 20];
/// Agreement required between iterated and closed-form `1 - |phi_m|^2`.
pub const FORMULA_TOL: f64 = 1e-10;
/// Iterates of one orbit must agree with the matrix identity to this.
pub const FORWARD_INVARIANCE_TOL: f64 = 1e-12;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitRow {
    pub m: usize,
    pub point: Complex64,
    /// `1 - |phi_m(z)|^2` from the iterate.
    pub direct: f64,
    /// `4u / ((mb + v)^2 + (1 + u)^2)`.
    pub formula: f64,
    /// `sum_{j <= m} (1 - |phi_j(z)|)`.
    pub partial_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summability {
    pub partial: f64,
    /// Upper bound on the omitted terms; infinite when none is known.
    pub tail: f64,
    pub certified: bool,
}

impl Summability {
    pub fn upper(&self) -> f64 {
        self.partial + self.tail
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    pub z: Complex64,
    pub b: f64,
    pub u: f64,
    pub v: f64,
    /// Fixed point rotated to 1 before the half-plane model is applied.
    pub zeta: Complex64,
    pub rows: Vec<OrbitRow>,
    pub fit_slope: f64,
    pub summability: Summability,
}

impl OrbitReport {
    pub fn max_formula_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.direct - r.formula).abs())
            .fold(0.0, f64::max)
    }
}

/// Parameters of the half-plane model of a parabolic orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParabolicModel {
    pub zeta: Complex64,
    pub b: f64,
    pub u: f64,
    pub v: f64,
}

impl ParabolicModel {
    pub fn new(phi: &LinearFractionalMap, z: Complex64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDisk(z));
        }
        let auto = DiskAutomorphism::classify(phi).map_err(|_| Error::NotParabolic)?;
        if auto.class() != AutomorphismClass::Parabolic {
            return Err(Error::NotParabolic);
        }
        let zeta = auto.fixed_points()[0].point;
        let b = auto.half_plane_conjugate()?.b();
        let s = to_half_plane(zeta.conj() * z);
        Ok(Self {
            zeta,
            b,
            u: s.re,
            v: s.im,
        })
    }

    /// `4u / ((mb + v)^2 + (1 + u)^2)`.
    pub fn formula(&self, m: usize) -> f64 {
        let t = m as f64 * self.b + self.v;
        4.0 * self.u / (t * t + (1.0 + self.u) * (1.0 + self.u))
    }

    /// `phi_m(z)` from the translation `s -> s + i m b`.
    pub fn point(&self, m: usize) -> Complex64 {
        let s = Complex64::new(self.u, self.v + m as f64 * self.b);
        self.zeta * from_half_plane(s)
    }

    /// Upper bound on `sum_{m > big_m}` of the formula values, valid for
    /// `big_m > 2 |v / b|`.
    pub fn tail_after(&self, big_m: usize) -> Option<f64> {
        let shift = (self.v / self.b).abs();
        let m = big_m as f64;
        (m > 2.0 * shift).then(|| 4.0 * self.u / (self.b * self.b) / (m - shift))
    }

    /// Upper bound on `sum_{m >= n} (1 - |phi_m(z)|)`.
    pub fn tail_from(&self, n: usize) -> f64 {
        let shift = (self.v / self.b).abs();
        let start = (2.0 * shift).floor() as usize + 1;
        if n > start {
            return self.tail_after(n - 1).expect("past the threshold");
        }
        let head: f64 = (n..=start).map(|m| self.formula(m)).sum();
        head + self.tail_after(start).expect("past the threshold")
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy, sxx, sxy) = points.iter().fold((0.0, 0.0, 0.0, 0.0), |acc, &(x, y)| {
        let (lx, ly) = (x.ln(), y.ln());
        (acc.0 + lx, acc.1 + ly, acc.2 + lx * lx, acc.3 + lx * ly)
    });
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Partial sum of a nonnegative sequence together with a bound on the rest.
pub fn blaschke_summability(values: &[f64], tail_bound: impl Fn(usize) -> f64) -> Summability {
    let partial = values.iter().sum();
    let tail = tail_bound(values.len());
    let certified = tail.is_finite() && tail >= 0.0;
    Summability {
        partial,
        tail: if certified { tail } else { f64::INFINITY },
        certified,
    }
}

/// Tabulates `m = 1..=terms` against the closed form.
pub fn parabolic_orbit_report(
    phi: &LinearFractionalMap,
    z: Complex64,
    terms: usize,
) -> Result<OrbitReport> {
    if terms < MIN_TERMS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_TERMS} terms, got {terms}"
        )));
    }
    let model = ParabolicModel::new(phi, z)?;
    let points = phi.iterate(z, terms)?;
    let mut rows = Vec::with_capacity(terms);
    let mut partial = 0.0;
    for (i, &p) in points.iter().enumerate() {
        let m = i + 1;
        let modulus = p.norm();
        partial += 1.0 - modulus;
        rows.push(OrbitRow {
            m,
            point: p,
            direct: (1.0 - modulus) * (1.0 + modulus),
            formula: model.formula(m),
            partial_sum: partial,
        });
    }
    let fit: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.m >= terms / 2)
        .map(|r| (r.m as f64, r.direct))
        .collect();
    let fit_slope = log_log_slope(&fit);
    let values: Vec<f64> = rows.iter().map(|r| 1.0 - r.point.norm()).collect();
    // the table starts at m = 1, so the omitted terms are m > terms
    let summability =
        blaschke_summability(&values, |n| model.tail_after(n).unwrap_or(f64::INFINITY));
    Ok(OrbitReport {
        z,
        b: model.b,
        u: model.u,
        v: model.v,
        zeta: model.zeta,
        rows,
        fit_slope,
        summability,
    })
}

/// The orbit `{phi_m(z)}_{m >= 0}` as an infinite Blaschke sequence.
pub fn orbit_sequence(phi: &LinearFractionalMap, z: Complex64) -> Result<BlaschkeSequence> {
    let model = ParabolicModel::new(phi, z)?;
    BlaschkeSequence::generated(move |n| model.point(n), move |n| model.tail_from(n))
}

/// `mult_{B_z}(phi_m(z))` against `mult_{B_z ∘ phi}(phi_m(z))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportCheck {
    pub m: usize,
    pub point: Complex64,
    pub mult: u32,
    pub mult_composed: u32,
}

impl TransportCheck {
    pub fn passes(&self) -> bool {
        self.mult <= self.mult_composed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendPoint {
    pub factors: usize,
    pub oracle: ResidualReport,
    /// Truncation-free residual against the model space.
    pub model_space: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JonesReport {
    pub orbit: OrbitReport,
    /// Distance of the fitted slope from the `c/m` slope `-1`.
    pub slope_gap: f64,
    /// Largest `|phi(phi_m(z)) - phi_{m+1}(z)|` over the transport points.
    pub forward_invariance_error: f64,
    /// Multiplicity transport against the infinite orbit product.
    pub transport: Vec<TransportCheck>,
    /// Transport points that fail against the product truncated to
    /// `TRANSPORT_POINTS` factors.
    pub truncated_failures: Vec<usize>,
    pub trend: Vec<TrendPoint>,
}

impl JonesReport {
    pub fn transport_holds(&self) -> bool {
        self.forward_invariance_error < FORWARD_INVARIANCE_TOL
            && self.transport.iter().all(TransportCheck::passes)
    }

    /// Each residual is at most 1.1 times the previous one.
    pub fn trend_decreasing(&self) -> bool {
        self.trend
            .windows(2)
            .all(|w| w[1].oracle.residual <= 1.1 * w[0].oracle.residual)
    }
}

/// Truncated orbit product with zeros `phi_0(z), ..., phi_{n-1}(z)`.
pub fn orbit_blaschke(points: &[Complex64]) -> Result<InnerFunction> {
    let zeros: Vec<(Complex64, u32)> = points.iter().map(|&p| (p, 1)).collect();
    Ok(InnerFunction::from_finite(FiniteBlaschkeProduct::new(
        0, &zeros, ONE,
    )?))
}

pub fn jones_refutation(
    phi: &LinearFractionalMap,
    z: Complex64,
    terms: usize,
) -> Result<JonesReport> {
    let orbit = parabolic_orbit_report(phi, z, terms)?;
    let model = ParabolicModel::new(phi, z)?;
    let seq = orbit_sequence(phi, z)?;
    let b_z = InnerFunction::from_sequence(seq.clone());

    let mut forward: f64 = 0.0;
    let mut transport = Vec::with_capacity(TRANSPORT_POINTS);
    for m in 0..TRANSPORT_POINTS {
        let p = model.point(m);
        let image = phi.eval(p)?;
        let via_power = phi.power(m as u64 + 1)?.eval(z)?;
        forward = forward
            .max((image - via_power).norm())
            .max((image - model.point(m + 1)).norm());
        // phi is univalent with nonvanishing derivative, so B_z ∘ phi vanishes
        // at p to the order B_z vanishes at phi(p)
        transport.push(TransportCheck {
            m,
            point: p,
            mult: b_z.mult(p),
            mult_composed: b_z.mult(image),
        });
    }

    let points: Vec<Complex64> = (0..TRANSPORT_POINTS).map(|m| model.point(m)).collect();
    let truncated = orbit_blaschke(&points)?;
    let composed = truncated.compose_zeros(phi)?;
    let truncated_failures = points
        .iter()
        .enumerate()
        .filter(|(_, &p)| {
            let have: u32 = composed
                .iter()
                .filter(|(q, _)| (*q - p).norm() < 1e-10)
                .map(|(_, k)| *k)
                .sum();
            have < truncated.mult(p)
        })
        .map(|(m, _)| m)
        .collect();

    let mut trend = Vec::with_capacity(TREND_FACTORS.len());
    for factors in TREND_FACTORS {
        let pts: Vec<Complex64> = (0..factors).map(|m| model.point(m)).collect();
        let theta = orbit_blaschke(&pts)?;
        trend.push(TrendPoint {
            factors,
            oracle: invariance_residual_report(&theta, phi, DEFAULT_ORACLE_N, DEFAULT_PROBES)?,
            model_space: model_space_residual(&theta, phi, DEFAULT_PROBES)?,
        });
    }

    Ok(JonesReport {
        slope_gap: (orbit.fit_slope + 1.0).abs(),
        orbit,
        forward_invariance_error: forward,
        transport,
        truncated_failures,
        trend,
    })
}
