//! Deciding whether `theta H^2` is invariant under `C_phi`: exact routes by
//! zero transport, Denjoy-Wolff points and fixed-point rigidity, a sampled
//! Schur-class test of `(theta ∘ phi) / theta`, and the matrix oracle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::{blaschke_term, BlaschkeSequence, InnerFunction};
use crate::maps::{AutomorphismClass, DiskAutomorphism, LinearFractionalMap};
use crate::numeric::{golden_section_max, seeded_disk_points, SEED};
use crate::series::{
    invariance_residual_report, DEFAULT_ORACLE_N, DEFAULT_PROBES, ORACLE_MEMBER_TOL,
    ORACLE_NON_MEMBER_TOL,
};

pub const DEFAULT_RADII: [f64; 3] = [0.5, 0.9, 0.99];
pub const DEFAULT_ANGLES: usize = 2048;
pub const DEFAULT_MARGIN: f64 = 1e-6;
/// Grid points closer than this to an uncancelled zero of `theta` are skipped.
pub const EXCLUSION_RADIUS: f64 = 1e-3;
/// Points used for the constancy and identity checks.
pub const CONSTANCY_POINTS: usize = 50;
pub const CONSTANCY_TOL: f64 = 1e-10;
/// Two transported zeros closer than this are the same zero.
pub const TRANSPORT_TOL: f64 = 1e-10;
/// Tolerance for evaluating infinite Blaschke parts while sampling.
const SEQUENCE_EVAL_TOL: f64 = 1e-9;
const CONSTANCY_RADIUS: f64 = 0.9;
/// Truncation error above which an oracle residual is not trusted.
const ORACLE_TAIL_LIMIT: f64 = ORACLE_MEMBER_TOL / 10.0;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictStatus {
    CertifiedMember,
    CertifiedNonMember,
    NumericallyConsistent,
    NumericallyViolated,
    Indeterminate,
}

impl VerdictStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::CertifiedMember => "CertifiedMember",
            Self::CertifiedNonMember => "CertifiedNonMember",
            Self::NumericallyConsistent => "NumericallyConsistent",
            Self::NumericallyViolated => "NumericallyViolated",
            Self::Indeterminate => "Indeterminate",
        }
    }

    pub fn is_certified(self) -> bool {
        matches!(self, Self::CertifiedMember | Self::CertifiedNonMember)
    }

    /// `Some(true)` for member-type verdicts, `Some(false)` for violations.
    pub fn says_member(self) -> Option<bool> {
        match self {
            Self::CertifiedMember | Self::NumericallyConsistent => Some(true),
            Self::CertifiedNonMember | Self::NumericallyViolated => Some(false),
            Self::Indeterminate => None,
        }
    }
}

/// A point where `|(theta ∘ phi) / theta|` exceeds one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub point: Complex64,
    pub modulus: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchurVerdict {
    pub status: VerdictStatus,
    pub witness: Option<Witness>,
    pub sup_estimate: f64,
    pub route: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    MultiplicityTest,
    AtomDenjoyWolff,
    EllipticConstant,
    InteriorFixedPointIdentity,
    NonAutomorphicRigidity,
    NumericFallback,
}

impl Route {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::MultiplicityTest => "MultiplicityTest",
            Self::AtomDenjoyWolff => "AtomDenjoyWolff",
            Self::EllipticConstant => "EllipticConstant",
            Self::InteriorFixedPointIdentity => "InteriorFixedPointIdentity",
            Self::NonAutomorphicRigidity => "NonAutomorphicRigidity",
            Self::NumericFallback => "NumericFallback",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    /// Residual below the member threshold.
    Member,
    /// Residual above the non-member threshold.
    NonMember,
    /// Residual between the thresholds, also after doubling `N`.
    Gap,
    /// Truncation error too large for the residual to count.
    Unreliable,
    /// No tail-certified expansion of `theta` exists.
    NotApplicable,
}

impl OracleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Member => "member",
            Self::NonMember => "non-member",
            Self::Gap => "gap",
            Self::Unreliable => "unreliable",
            Self::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOutcome {
    pub status: OracleStatus,
    pub residual: Option<f64>,
    pub tail_error: Option<f64>,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub verdict: SchurVerdict,
    pub route: Route,
    /// Independent sampled Schur test.
    pub sampling: SchurVerdict,
    pub skipped_points: usize,
    pub oracle: OracleOutcome,
    pub quotient_constant: Option<Complex64>,
    /// Largest deviation seen in the constancy or identity check.
    pub constancy_residual: Option<f64>,
    /// Exact verdict and oracle agree (vacuous when the oracle has no say).
    pub agreement: bool,
    /// Exact verdict and sampling agree.
    pub sampling_agreement: bool,
}

impl InvarianceReport {
    pub fn oracle_residual(&self) -> Option<f64> {
        self.oracle.residual
    }

    pub fn status(&self) -> VerdictStatus {
        self.verdict.status
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyOptions {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub margin: f64,
    pub oracle_n: usize,
    pub probes: usize,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            radii: DEFAULT_RADII.to_vec(),
            angles: DEFAULT_ANGLES,
            margin: DEFAULT_MARGIN,
            oracle_n: DEFAULT_ORACLE_N,
            probes: DEFAULT_PROBES,
        }
    }
}

impl CertifyOptions {
    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() || self.radii.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(Error::InvalidArgument(
                "sampling radii must lie in [0, 1)".into(),
            ));
        }
        if self.angles == 0 {
            return Err(Error::InvalidArgument(
                "need at least one angle per radius".into(),
            ));
        }
        if !(self.margin >= 0.0) {
            return Err(Error::InvalidArgument("margin must be nonnegative".into()));
        }
        Ok(())
    }
}

/// `(p - z) / (1 - conj(p) z)`, or `z` for `p = 0`.
fn simple_factor(p: Complex64, z: Complex64) -> Complex64 {
    if p == ZERO {
        z
    } else {
        (p - z) / (ONE - p.conj() * z)
    }
}

/// `z - p = simple_factor(p, z) * cofactor(p, z)`.
fn cofactor(p: Complex64, z: Complex64) -> Complex64 {
    if p == ZERO {
        ONE
    } else {
        -(ONE - p.conj() * z)
    }
}

fn add_point(list: &mut Vec<(Complex64, u32)>, p: Complex64, k: u32) {
    match list
        .iter_mut()
        .find(|(q, _)| (*q - p).norm() < TRANSPORT_TOL)
    {
        Some(e) => e.1 += k,
        None => list.push((p, k)),
    }
}

/// A zero `a` of the finite Blaschke part with its preimage under `phi`.
#[derive(Debug, Clone, Copy)]
struct Transported {
    zero: Complex64,
    mult: u32,
    preimage: Option<Complex64>,
}

/// Evaluates `(theta ∘ phi) / theta` with matching zero factors cancelled
/// in closed form.
#[derive(Debug, Clone)]
struct Quotient {
    coeffs: [Complex64; 4],
    phi: LinearFractionalMap,
    transported: Vec<Transported>,
    /// Zeros of the quotient (preimages left after cancellation).
    zeros: Vec<(Complex64, u32)>,
    /// Uncancelled zeros of `theta`: poles of the quotient.
    poles: Vec<(Complex64, u32)>,
    unit: Complex64,
    sequences: Vec<BlaschkeSequence>,
    atoms: Vec<(Complex64, f64)>,
}

impl Quotient {
    fn new(theta: &InnerFunction, phi: &LinearFractionalMap) -> Self {
        let b = theta.finite_part();
        let mut transported = Vec::new();
        let mut numer: Vec<(Complex64, u32)> = Vec::new();
        let mut denom: Vec<(Complex64, u32)> = Vec::new();
        let mut unit = ONE;
        for (a, k) in b.all_zeros() {
            let preimage = phi.preimage(a).filter(|z| z.norm() < 1.0 - 1e-12);
            if let Some(p) = preimage {
                add_point(&mut numer, p, k);
            }
            add_point(&mut denom, a, k);
            if a != ZERO {
                unit /= (a.norm() / a).powu(k);
            }
            transported.push(Transported {
                zero: a,
                mult: k,
                preimage,
            });
        }
        let mut zeros = Vec::new();
        for (p, k) in numer {
            match denom
                .iter_mut()
                .find(|(q, _)| (*q - p).norm() < TRANSPORT_TOL)
            {
                Some(d) => {
                    let common = k.min(d.1);
                    d.1 -= common;
                    if k > common {
                        zeros.push((p, k - common));
                    }
                }
                None => zeros.push((p, k)),
            }
        }
        denom.retain(|(_, k)| *k > 0);
        Self {
            coeffs: phi.coefficients(),
            phi: phi.clone(),
            transported,
            zeros,
            poles: denom,
            unit,
            sequences: theta.sequences().to_vec(),
            atoms: theta.atoms().to_vec(),
        }
    }

    /// `b_a(phi(z)) / simple_factor(z_a, z)` for a zero `a` with preimage `z_a`.
    fn reduced_factor(&self, a: Complex64, za: Complex64, z: Complex64) -> Complex64 {
        let [ca, cb, cc, cd] = self.coeffs;
        if a == ZERO {
            return ca * cofactor(za, z) / (cc * z + cd);
        }
        let u = a.norm() / a;
        let den = (cc - a.conj() * ca) * z + (cd - a.conj() * cb);
        u * (a * cc - ca) * cofactor(za, z) / den
    }

    fn near_pole(&self, z: Complex64) -> bool {
        self.poles
            .iter()
            .any(|(p, _)| (*p - z).norm() < EXCLUSION_RADIUS)
    }

    /// Value and an absolute error bound; `None` when the point cannot be
    /// evaluated (a pole, or an infinite Blaschke part beyond reach).
    fn eval(&self, z: Complex64) -> Option<(Complex64, f64)> {
        let w = self.phi.eval(z).ok()?;
        let mut v = self.unit;
        for t in &self.transported {
            let f = match t.preimage {
                Some(za) => self.reduced_factor(t.zero, za, z),
                None => blaschke_term(t.zero, w),
            };
            v *= f.powu(t.mult);
        }
        for &(p, k) in &self.zeros {
            v *= simple_factor(p, z).powu(k);
        }
        for &(p, k) in &self.poles {
            let d = simple_factor(p, z);
            if d == ZERO {
                return None;
            }
            v /= d.powu(k);
        }
        let mut err = 0.0;
        for s in &self.sequences {
            let (num, en) = s.eval(w, SEQUENCE_EVAL_TOL).ok()?;
            let (den, ed) = s.eval(z, SEQUENCE_EVAL_TOL).ok()?;
            if den.norm() <= 10.0 * ed || den == ZERO {
                return None;
            }
            let ratio = num / den;
            err = err * ratio.norm() + v.norm() * (en + ratio.norm() * ed) / den.norm();
            v *= ratio;
        }
        if !self.atoms.is_empty() {
            // (zeta + w)/(zeta - w) - (zeta + z)/(zeta - z) = 2 zeta (w - z) / ((zeta - w)(zeta - z))
            let e: Complex64 = self
                .atoms
                .iter()
                .map(|&(zeta, alpha)| -alpha * 2.0 * zeta * (w - z) / ((zeta - w) * (zeta - z)))
                .sum();
            v *= e.exp();
        }
        if !v.re.is_finite() || !v.im.is_finite() {
            return None;
        }
        Some((v, err + 16.0 * f64::EPSILON * v.norm()))
    }
}

/// Samples of `f = (theta ∘ phi) / theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSamples {
    pub samples: Vec<(Complex64, Complex64)>,
    /// Grid points skipped near uncancelled zeros or left unevaluated.
    pub skipped: Vec<Complex64>,
    /// Largest evaluation error bound among the samples.
    pub max_error: f64,
}

/// Values of `(theta ∘ phi) / theta` on a polar grid, with one golden-section
/// refinement around the largest sample and a ring of probes just outside
/// the exclusion disk of every uncancelled zero.
pub fn quotient_samples(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    radii: &[f64],
    angles: usize,
) -> Result<QuotientSamples> {
    if radii.iter().any(|r| !(0.0..1.0).contains(r)) {
        return Err(Error::InvalidArgument(
            "sampling radii must lie in [0, 1)".into(),
        ));
    }
    let q = Quotient::new(theta, phi);
    let mut out = QuotientSamples {
        samples: Vec::with_capacity(radii.len() * angles),
        skipped: Vec::new(),
        max_error: 0.0,
    };
    let push = |out: &mut QuotientSamples, z: Complex64| {
        if q.near_pole(z) {
            out.skipped.push(z);
            return;
        }
        match q.eval(z) {
            Some((v, e)) => {
                out.samples.push((z, v));
                out.max_error = out.max_error.max(e);
            }
            None => out.skipped.push(z),
        }
    };
    for &r in radii {
        for k in 0..angles {
            let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / angles as f64);
            push(&mut out, z);
        }
    }
    if let Some(&(best, _)) = out
        .samples
        .iter()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
    {
        let (r, t) = best.to_polar();
        let step = 2.0 * PI / angles.max(1) as f64;
        let modulus = |s: f64| {
            let z = Complex64::from_polar(r, s);
            if q.near_pole(z) {
                return 0.0;
            }
            q.eval(z).map_or(0.0, |(v, _)| v.norm())
        };
        let (s, _) = golden_section_max(modulus, t - step, t + step, 60);
        push(&mut out, Complex64::from_polar(r, s));
    }
    for &(p, _) in &q.poles.clone() {
        for j in 0..16 {
            let z = p + Complex64::from_polar(2.0 * EXCLUSION_RADIUS, 2.0 * PI * j as f64 / 16.0);
            if z.norm() < 1.0 {
                push(&mut out, z);
            }
        }
    }
    Ok(out)
}

/// Sampled Schur-class test. Never returns a certified status.
pub fn schur_membership(samples: &QuotientSamples, margin: f64) -> Result<SchurVerdict> {
    let Some(&(point, value)) = samples
        .samples
        .iter()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
    else {
        return Err(Error::InvalidArgument("no samples".into()));
    };
    let modulus = value.norm();
    let limit = 1.0 + margin + samples.max_error;
    Ok(if modulus > limit {
        SchurVerdict {
            status: VerdictStatus::NumericallyViolated,
            witness: Some(Witness { point, modulus }),
            sup_estimate: modulus,
            route: "sampling".into(),
        }
    } else {
        SchurVerdict {
            status: VerdictStatus::NumericallyConsistent,
            witness: None,
            sup_estimate: modulus,
            route: "sampling".into(),
        }
    })
}

/// Searches rings around `centres` (and radial approaches to boundary
/// points) for a point where the quotient exceeds `1 + margin`.
fn find_witness(q: &Quotient, centres: &[Complex64], margin: f64) -> Option<Witness> {
    let mut best: Option<Witness> = None;
    let mut consider = |z: Complex64| {
        if z.norm() >= 1.0 || q.near_pole(z) {
            return;
        }
        if let Some((v, e)) = q.eval(z) {
            let m = v.norm();
            if m > 1.0 + margin + e && best.map_or(true, |b| m > b.modulus) {
                best = Some(Witness {
                    point: z,
                    modulus: m,
                });
            }
        }
    };
    for &c in centres {
        if c.norm() >= 1.0 - 1e-12 {
            let dir = c / c.norm();
            for j in 1..=10 {
                consider(dir * (1.0 - 10f64.powi(-j)));
            }
        } else {
            for delta in [0.2, 0.1, 0.03, 0.01, 3e-3, 2e-3] {
                for j in 0..64 {
                    consider(c + Complex64::from_polar(delta, 2.0 * PI * j as f64 / 64.0));
                }
            }
        }
    }
    best
}

/// Largest deviation of the quotient from `target` on the fixed seeded
/// point set.
fn constancy_deviation(q: &Quotient, target: Complex64) -> f64 {
    seeded_disk_points(SEED, CONSTANCY_POINTS, CONSTANCY_RADIUS)
        .into_iter()
        .filter(|z| !q.near_pole(*z))
        .filter_map(|z| q.eval(z))
        .map(|(v, _)| (v - target).norm())
        .fold(0.0, f64::max)
}

/// Largest `|theta(phi(z)) - theta(z)|` on the seeded point set.
fn identity_deviation(theta: &InnerFunction, phi: &LinearFractionalMap) -> f64 {
    seeded_disk_points(SEED, CONSTANCY_POINTS, CONSTANCY_RADIUS)
        .into_iter()
        .filter_map(|z| {
            let w = phi.eval(z).ok()?;
            let a = theta.eval(w, SEQUENCE_EVAL_TOL).ok()?;
            let b = theta.eval(z, SEQUENCE_EVAL_TOL).ok()?;
            Some((a.value - b.value).norm())
        })
        .fold(0.0, f64::max)
}

/// Exact zero-transport test: every zero `a` of multiplicity `k` needs
/// `theta ∘ phi` to vanish at `a` to order at least `k`.
fn multiplicity_test(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
) -> Result<(bool, Vec<Complex64>)> {
    let composed = theta.compose_zeros(phi)?;
    let mut deficient = Vec::new();
    for (a, k) in theta.finite_part().all_zeros() {
        let have: u32 = composed
            .iter()
            .filter(|(z, _)| (*z - a).norm() < TRANSPORT_TOL)
            .map(|(_, m)| *m)
            .sum();
        if have < k {
            deficient.push(a);
        }
    }
    Ok((deficient.is_empty(), deficient))
}

fn oracle(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    opts: &CertifyOptions,
) -> OracleOutcome {
    let mut n = opts.oracle_n;
    let mut attempt = 0;
    loop {
        let probes = opts.probes.min(n / 4).max(1);
        let report = match invariance_residual_report(theta, phi, n, probes) {
            Ok(r) => r,
            Err(_) => {
                return OracleOutcome {
                    status: OracleStatus::NotApplicable,
                    residual: None,
                    tail_error: None,
                    n: None,
                }
            }
        };
        let status = if report.tail_error > ORACLE_TAIL_LIMIT {
            OracleStatus::Unreliable
        } else if report.residual < ORACLE_MEMBER_TOL {
            OracleStatus::Member
        } else if report.residual > ORACLE_NON_MEMBER_TOL {
            OracleStatus::NonMember
        } else {
            OracleStatus::Gap
        };
        if status == OracleStatus::Gap && attempt == 0 {
            attempt += 1;
            n *= 2;
            continue;
        }
        return OracleOutcome {
            status,
            residual: Some(report.residual),
            tail_error: Some(report.tail_error),
            n: Some(n),
        };
    }
}

fn oracle_agrees(member: Option<bool>, oracle: &OracleOutcome) -> bool {
    match (member, oracle.status) {
        (Some(true), OracleStatus::NonMember) | (Some(false), OracleStatus::Member) => false,
        (Some(_), OracleStatus::Gap) => false,
        _ => true,
    }
}

fn certified(member: bool, route: Route, sup: f64, witness: Option<Witness>) -> SchurVerdict {
    SchurVerdict {
        status: if member {
            VerdictStatus::CertifiedMember
        } else {
            VerdictStatus::CertifiedNonMember
        },
        witness: if member { None } else { witness },
        sup_estimate: sup,
        route: route.as_str().into(),
    }
}

/// `theta H^2` invariant under `C_phi`, with default sampling options.
pub fn certify_invariance(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
) -> Result<InvarianceReport> {
    certify_invariance_with(theta, phi, &CertifyOptions::default())
}

pub fn certify_invariance_with(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    opts: &CertifyOptions,
) -> Result<InvarianceReport> {
    opts.validate()?;
    let q = Quotient::new(theta, phi);
    let samples = quotient_samples(theta, phi, &opts.radii, opts.angles)?;
    let sampling = schur_membership(&samples, opts.margin)?;
    let oracle = oracle(theta, phi, opts);
    let elliptic = if phi.is_identity() {
        None
    } else {
        DiskAutomorphism::classify(phi)
            .ok()
            .filter(|a| a.class() == AutomorphismClass::Elliptic)
    };

    let mut quotient_constant = None;
    let mut constancy_residual = None;

    // exact decision as (is member, route), or a numeric verdict
    enum Decision {
        Exact(bool, Route, Vec<Complex64>),
        Numeric(Route),
    }

    let decision = if phi.is_identity() {
        quotient_constant = Some(ONE);
        Decision::Exact(true, Route::InteriorFixedPointIdentity, Vec::new())
    } else if let Some(auto) = &elliptic {
        let w = auto
            .fixed_points()
            .iter()
            .find(|f| !f.is_boundary())
            .map(|f| f.point)
            .ok_or_else(|| {
                Error::LinearAlgebra("elliptic map without interior fixed point".into())
            })?;
        if theta.is_finite_blaschke() {
            let (member, deficient) = multiplicity_test(theta, phi)?;
            if member {
                let c = phi.derivative_at(w)?.powu(theta.mult(w));
                quotient_constant = Some(c);
                constancy_residual = Some(constancy_deviation(&q, c));
            }
            Decision::Exact(member, Route::EllipticConstant, deficient)
        } else if let Some((zeta, _)) = theta.single_atom() {
            // an elliptic automorphism has no Denjoy-Wolff point
            Decision::Exact(false, Route::EllipticConstant, vec![zeta])
        } else {
            let c = if theta.mult(w) > 0 {
                phi.derivative_at(w)?.powu(theta.mult(w))
            } else {
                ONE
            };
            quotient_constant = Some(c);
            constancy_residual = Some(constancy_deviation(&q, c));
            Decision::Numeric(Route::EllipticConstant)
        }
    } else if theta.is_finite_blaschke() {
        let (member, deficient) = multiplicity_test(theta, phi)?;
        Decision::Exact(member, Route::MultiplicityTest, deficient)
    } else if let Some((zeta, _)) = theta.single_atom() {
        let psi = phi.rotation_conjugate(zeta)?;
        let member = match psi.denjoy_wolff() {
            Ok(dw) => !dw.interior && (dw.point - ONE).norm() < 1e-9,
            Err(_) => false,
        };
        Decision::Exact(member, Route::AtomDenjoyWolff, vec![zeta])
    } else {
        let interior = phi
            .fixed_points()?
            .into_iter()
            .find(|f| !f.is_boundary())
            .map(|f| f.point);
        match interior {
            Some(w) if theta.mult(w) == 0 && theta.value(w).map_or(false, |v| v.norm() > 0.0) => {
                constancy_residual = Some(identity_deviation(theta, phi));
                // phi is not an automorphism here, so only constants survive
                Decision::Exact(theta.is_constant(), Route::NonAutomorphicRigidity, vec![w])
            }
            _ => Decision::Numeric(Route::NumericFallback),
        }
    };

    let (verdict, route) = match decision {
        Decision::Exact(member, route, centres) => {
            let witness = if member {
                None
            } else {
                sampling.witness.or_else(|| {
                    let mut all: Vec<Complex64> = q.poles.iter().map(|p| p.0).collect();
                    all.extend(centres);
                    find_witness(&q, &all, opts.margin)
                })
            };
            (
                certified(member, route, sampling.sup_estimate, witness),
                route,
            )
        }
        Decision::Numeric(route) => {
            let constant_ok = constancy_residual.map(|d| d < CONSTANCY_TOL);
            let status = match (sampling.status, constant_ok, oracle.status) {
                (VerdictStatus::NumericallyViolated, _, _) => VerdictStatus::NumericallyViolated,
                (_, Some(false), _) => VerdictStatus::Indeterminate,
                (_, _, OracleStatus::NonMember | OracleStatus::Gap) => VerdictStatus::Indeterminate,
                _ => VerdictStatus::NumericallyConsistent,
            };
            (
                SchurVerdict {
                    status,
                    witness: sampling.witness,
                    sup_estimate: sampling.sup_estimate,
                    route: route.as_str().into(),
                },
                route,
            )
        }
    };

    let member = verdict.status.says_member();
    let agreement = !verdict.status.is_certified() || oracle_agrees(member, &oracle);
    let sampling_agreement = match member {
        Some(m) => sampling.status.says_member() == Some(m),
        None => true,
    };
    Ok(InvarianceReport {
        verdict,
        route,
        sampling,
        skipped_points: samples.skipped.len(),
        oracle,
        quotient_constant,
        constancy_residual,
        agreement,
        sampling_agreement,
    })
}

/// `(phi'(w))^{mult_theta(w)}` at the interior fixed point `w`, the constant
/// value of `(theta ∘ phi) / theta` for invariant `theta`.
pub fn elliptic_constant(theta: &InnerFunction, phi: &DiskAutomorphism) -> Result<Complex64> {
    if phi.class() != AutomorphismClass::Elliptic {
        return Err(Error::InvalidArgument(
            "elliptic automorphism required".into(),
        ));
    }
    let report = certify_invariance(theta, phi.map())?;
    if report.verdict.status != VerdictStatus::CertifiedMember {
        return Err(Error::NotInvariant);
    }
    let w = phi
        .fixed_points()
        .iter()
        .find(|f| !f.is_boundary())
        .map(|f| f.point)
        .ok_or_else(|| Error::LinearAlgebra("elliptic map without interior fixed point".into()))?;
    let m = theta.mult(w);
    Ok(if m > 0 {
        phi.map().derivative_at(w)?.powu(m)
    } else {
        ONE
    })
}

/// A nontrivial inner function whose Beurling subspace is invariant: the
/// Blaschke factor at an interior fixed point, otherwise an atom of weight
/// `alpha` at the boundary Denjoy-Wolff point.
pub fn construct_invariant_inner(phi: &LinearFractionalMap, alpha: f64) -> Result<InnerFunction> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let fixed = phi.fixed_points()?;
    if let Some(w) = fixed.iter().find(|f| !f.is_boundary()) {
        return InnerFunction::blaschke_factor(w.point);
    }
    let dw = phi.denjoy_wolff()?;
    InnerFunction::atom(dw.point, alpha)
}
