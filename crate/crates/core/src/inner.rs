//! Inner functions: monomials, Blaschke products (finite, or infinite with a
//! certified tail), atomic singular inner functions, and their products.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::maps::LinearFractionalMap;
use crate::numeric::boundary_sup_norm;
use crate::poly::Polynomial;

/// Zeros closer than this are the same zero.
pub const ZERO_MERGE_TOL: f64 = 1e-12;
/// Atoms closer than this on the circle are the same atom.
pub const ATOM_MERGE_TOL: f64 = 1e-12;
/// Largest prefix of an infinite Blaschke sequence ever evaluated.
pub const MAX_SEQUENCE_TERMS: usize = 1 << 22;
/// Tolerance used by [`InnerFunction::value`].
pub const DEFAULT_EVAL_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

fn check_unimodular(c: Complex64, what: &str) -> Result<Complex64> {
    if !c.re.is_finite() || !c.im.is_finite() || (c.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "{what} must be unimodular, got {c}"
        )));
    }
    Ok(c / c.norm())
}

/// Normalized Blaschke factor `(|a| / a) (a - z) / (1 - conj(a) z)`, or `z`
/// when `a = 0`.
pub fn blaschke_term(a: Complex64, z: Complex64) -> Complex64 {
    if a == ZERO {
        return z;
    }
    (a.norm() / a) * (a - z) / (ONE - a.conj() * z)
}

fn merge_zero(zeros: &mut Vec<(Complex64, u32)>, a: Complex64, mult: u32) {
    match zeros
        .iter_mut()
        .find(|(z, _)| (*z - a).norm() < ZERO_MERGE_TOL)
    {
        Some(entry) => entry.1 += mult,
        None => zeros.push((a, mult)),
    }
}

/// `c z^m prod ((|a_n| / a_n) (a_n - z) / (1 - conj(a_n) z))^{k_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteBlaschkeProduct {
    origin_order: u32,
    zeros: Vec<(Complex64, u32)>,
    constant: Complex64,
}

impl FiniteBlaschkeProduct {
    /// Zeros at (or within `ZERO_MERGE_TOL` of) the origin are folded into the
    /// monomial order; coincident zeros are merged.
    pub fn new(origin_order: u32, zeros: &[(Complex64, u32)], constant: Complex64) -> Result<Self> {
        let constant = check_unimodular(constant, "Blaschke constant")?;
        let mut m = origin_order;
        let mut merged = Vec::with_capacity(zeros.len());
        for &(a, k) in zeros {
            if k == 0 {
                return Err(Error::InvalidArgument(
                    "zero multiplicity must be positive".into(),
                ));
            }
            if !a.re.is_finite() || !a.im.is_finite() || a.norm() >= 1.0 {
                return Err(Error::OutsideDisk(a));
            }
            if a.norm() < ZERO_MERGE_TOL {
                m += k;
            } else {
                merge_zero(&mut merged, a, k);
            }
        }
        Ok(Self {
            origin_order: m,
            zeros: merged,
            constant,
        })
    }

    pub fn trivial() -> Self {
        Self {
            origin_order: 0,
            zeros: Vec::new(),
            constant: ONE,
        }
    }

    pub fn origin_order(&self) -> u32 {
        self.origin_order
    }

    /// Nonzero zeros with multiplicity.
    pub fn zeros(&self) -> &[(Complex64, u32)] {
        &self.zeros
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    pub fn degree(&self) -> u32 {
        self.origin_order + self.zeros.iter().map(|z| z.1).sum::<u32>()
    }

    /// Every zero including the origin, with multiplicity.
    pub fn all_zeros(&self) -> Vec<(Complex64, u32)> {
        let mut out = Vec::with_capacity(self.zeros.len() + 1);
        if self.origin_order > 0 {
            out.push((ZERO, self.origin_order));
        }
        out.extend_from_slice(&self.zeros);
        out
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = self.constant * z.powu(self.origin_order);
        for &(a, k) in &self.zeros {
            v *= blaschke_term(a, z).powu(k);
        }
        v
    }

    pub fn mult(&self, w: Complex64) -> u32 {
        if w.norm() < ZERO_MERGE_TOL {
            return self.origin_order;
        }
        self.zeros
            .iter()
            .filter(|(a, _)| (*a - w).norm() < ZERO_MERGE_TOL)
            .map(|(_, k)| *k)
            .sum()
    }
}

type PointFn = Arc<dyn Fn(usize) -> Complex64 + Send + Sync>;
type TailFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum SequenceZeros {
    Finite(Vec<(Complex64, u32)>),
    Generated { point: PointFn, tail: TailFn },
}

/// Zero sequence of a (possibly infinite) Blaschke product.
///
/// Generated sequences carry `tail(n)`, an upper bound for
/// `sum_{k >= n} (1 - |a_k|)`.
#[derive(Clone)]
pub struct BlaschkeSequence {
    zeros: SequenceZeros,
}

impl fmt::Debug for BlaschkeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.zeros {
            SequenceZeros::Finite(z) => f.debug_tuple("BlaschkeSequence::Finite").field(z).finish(),
            SequenceZeros::Generated { point, tail } => f
                .debug_struct("BlaschkeSequence::Generated")
                .field("first", &point(0))
                .field("tail0", &tail(0))
                .finish(),
        }
    }
}

impl BlaschkeSequence {
    /// A finite zero list; repeated points become multiplicities.
    pub fn finite(points: &[Complex64]) -> Result<Self> {
        let mut zeros = Vec::with_capacity(points.len());
        for &p in points {
            if !p.re.is_finite() || !p.im.is_finite() || p.norm() >= 1.0 {
                return Err(Error::OutsideDisk(p));
            }
            merge_zero(&mut zeros, p, 1);
        }
        Ok(Self {
            zeros: SequenceZeros::Finite(zeros),
        })
    }

    /// An infinite sequence `n -> point(n)` with a tail bound. The bound is
    /// checked against the partial sums of the first thousand terms and for
    /// decay along powers of two.
    pub fn generated(
        point: impl Fn(usize) -> Complex64 + Send + Sync + 'static,
        tail: impl Fn(usize) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let total = tail(0);
        if !total.is_finite() || total < 0.0 {
            return Err(Error::NotBlaschkeSummable(format!(
                "tail bound at 0 is {total}"
            )));
        }
        let mut prev = total;
        for k in 1..=22 {
            let t = tail(1 << k);
            if !t.is_finite() || t > prev + 1e-15 {
                return Err(Error::NotBlaschkeSummable(format!(
                    "tail bound is not nonincreasing at n = {}",
                    1usize << k
                )));
            }
            prev = t;
        }
        let mut partial = 0.0;
        for n in 0..1000 {
            // past this point every zero rounds onto the circle and is never used
            if tail(n) < 1e-15 {
                break;
            }
            let p = point(n);
            if !(p.norm() < 1.0) {
                return Err(Error::OutsideDisk(p));
            }
            partial += 1.0 - p.norm();
            if partial > total * (1.0 + 1e-12) + 1e-12 {
                return Err(Error::NotBlaschkeSummable(format!(
                    "partial sum {partial} after {} terms exceeds the tail bound {total}",
                    n + 1
                )));
            }
        }
        Ok(Self {
            zeros: SequenceZeros::Generated {
                point: Arc::new(point),
                tail: Arc::new(tail),
            },
        })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.zeros, SequenceZeros::Finite(_))
    }

    /// The zero at index `n` (finite sequences list merged zeros in order).
    pub fn point(&self, n: usize) -> Option<Complex64> {
        match &self.zeros {
            SequenceZeros::Finite(z) => z.get(n).map(|p| p.0),
            SequenceZeros::Generated { point, .. } => Some(point(n)),
        }
    }

    /// Upper bound on `sum_{k >= n} (1 - |a_k|)`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        match &self.zeros {
            SequenceZeros::Finite(z) => z
                .iter()
                .skip(n)
                .map(|(a, k)| (1.0 - a.norm()) * *k as f64)
                .sum(),
            SequenceZeros::Generated { tail, .. } => tail(n),
        }
    }

    /// The first `n` zeros as a finite Blaschke product.
    pub fn truncate(&self, n: usize) -> Result<FiniteBlaschkeProduct> {
        let zeros: Vec<(Complex64, u32)> = match &self.zeros {
            SequenceZeros::Finite(z) => z.iter().take(n).copied().collect(),
            SequenceZeros::Generated { point, .. } => (0..n).map(|k| (point(k), 1)).collect(),
        };
        FiniteBlaschkeProduct::new(0, &zeros, ONE)
    }

    /// Smallest number of terms whose omitted tail keeps the evaluation error
    /// at `z` below `tol`.
    fn terms_for(&self, z: Complex64, tol: f64) -> Result<usize> {
        let factor = 2.0 / (1.0 - z.norm());
        let ok = |n: usize| factor * self.tail_bound(n) <= tol;
        if ok(0) {
            return Ok(0);
        }
        let mut hi = 1usize;
        while !ok(hi) {
            if hi >= MAX_SEQUENCE_TERMS {
                return Err(Error::TailBoundUnavailable(tol));
            }
            hi = (hi * 2).min(MAX_SEQUENCE_TERMS);
        }
        let mut lo = hi / 2;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Value at `z` and a bound on the truncation error.
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<(Complex64, f64)> {
        match &self.zeros {
            SequenceZeros::Finite(zs) => {
                let v = zs
                    .iter()
                    .fold(ONE, |acc, &(a, k)| acc * blaschke_term(a, z).powu(k));
                Ok((v, 0.0))
            }
            SequenceZeros::Generated { point, .. } => {
                let n = self.terms_for(z, tol)?;
                let v = (0..n).fold(ONE, |acc, k| acc * blaschke_term(point(k), z));
                let err = 2.0 / (1.0 - z.norm()) * self.tail_bound(n);
                Ok((v, err))
            }
        }
    }

    /// Multiplicity of `w` among the zeros. For generated sequences the scan
    /// stops once the tail bound shows no later zero can reach `|w|`.
    pub fn mult(&self, w: Complex64) -> u32 {
        match &self.zeros {
            SequenceZeros::Finite(zs) => zs
                .iter()
                .filter(|(a, _)| (*a - w).norm() < ZERO_MERGE_TOL)
                .map(|(_, k)| *k)
                .sum(),
            SequenceZeros::Generated { point, tail } => {
                let gap = 1.0 - w.norm() - ZERO_MERGE_TOL;
                let mut count = 0;
                for n in 0..MAX_SEQUENCE_TERMS {
                    // each later term satisfies 1 - |a_k| <= tail(n)
                    if n % 64 == 0 && tail(n) < gap {
                        break;
                    }
                    if (point(n) - w).norm() < ZERO_MERGE_TOL {
                        count += 1;
                    }
                }
                count
            }
        }
    }

    fn rotated(&self, a: Complex64) -> Self {
        match &self.zeros {
            SequenceZeros::Finite(zs) => Self {
                zeros: SequenceZeros::Finite(zs.iter().map(|&(p, k)| (a * p, k)).collect()),
            },
            SequenceZeros::Generated { point, tail } => {
                let point = Arc::clone(point);
                Self {
                    zeros: SequenceZeros::Generated {
                        point: Arc::new(move |n| a * point(n)),
                        tail: Arc::clone(tail),
                    },
                }
            }
        }
    }
}

/// `c exp(-sum alpha_k (zeta_k + z) / (zeta_k - z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicSingularInner {
    atoms: Vec<(Complex64, f64)>,
    constant: Complex64,
}

impl AtomicSingularInner {
    pub fn new(atoms: &[(Complex64, f64)], constant: Complex64) -> Result<Self> {
        let constant = check_unimodular(constant, "singular constant")?;
        let mut merged: Vec<(Complex64, f64)> = Vec::with_capacity(atoms.len());
        for &(zeta, alpha) in atoms {
            let zeta = check_unimodular(zeta, "atom")?;
            if !alpha.is_finite() || alpha <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "atom weight must be positive, got {alpha}"
                )));
            }
            match merged
                .iter_mut()
                .find(|(z, _)| (*z - zeta).norm() < ATOM_MERGE_TOL)
            {
                Some(entry) => entry.1 += alpha,
                None => merged.push((zeta, alpha)),
            }
        }
        Ok(Self {
            atoms: merged,
            constant,
        })
    }

    pub fn trivial() -> Self {
        Self {
            atoms: Vec::new(),
            constant: ONE,
        }
    }

    pub fn atoms(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }

    pub fn constant(&self) -> Complex64 {
        self.constant
    }

    /// `-sum alpha_k (zeta_k + z) / (zeta_k - z)`.
    pub fn exponent(&self, z: Complex64) -> Complex64 {
        self.atoms.iter().fold(ZERO, |acc, &(zeta, alpha)| {
            acc - alpha * (zeta + z) / (zeta - z)
        })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.constant * self.exponent(z).exp()
    }
}

/// Value with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: Complex64,
    pub error: f64,
}

/// `theta = c B S`, with `B` a finite Blaschke product times any number of
/// infinite Blaschke sequences and `S` an atomic singular inner function.
/// The unimodular constants of the parts are folded into `constant`.
#[derive(Debug, Clone)]
pub struct InnerFunction {
    constant: Complex64,
    finite: FiniteBlaschkeProduct,
    sequences: Vec<BlaschkeSequence>,
    singular: AtomicSingularInner,
}

impl InnerFunction {
    pub fn constant(c: Complex64) -> Result<Self> {
        Ok(Self {
            constant: check_unimodular(c, "constant")?,
            finite: FiniteBlaschkeProduct::trivial(),
            sequences: Vec::new(),
            singular: AtomicSingularInner::trivial(),
        })
    }

    pub fn one() -> Self {
        Self::constant(ONE).expect("1 is unimodular")
    }

    /// `z^m`.
    pub fn monomial(m: u32) -> Self {
        let mut f = Self::one();
        f.finite.origin_order = m;
        f
    }

    pub fn from_finite(mut b: FiniteBlaschkeProduct) -> Self {
        let mut f = Self::one();
        f.constant = b.constant;
        b.constant = ONE;
        f.finite = b;
        f
    }

    pub fn from_sequence(s: BlaschkeSequence) -> Self {
        let mut f = Self::one();
        f.sequences.push(s);
        f
    }

    pub fn from_singular(mut s: AtomicSingularInner) -> Self {
        let mut f = Self::one();
        f.constant = s.constant;
        s.constant = ONE;
        f.singular = s;
        f
    }

    /// `exp(-alpha (zeta + z) / (zeta - z))`.
    pub fn atom(zeta: Complex64, alpha: f64) -> Result<Self> {
        Ok(Self::from_singular(AtomicSingularInner::new(
            &[(zeta, alpha)],
            ONE,
        )?))
    }

    /// Single-zero factor `(w - z) / (1 - conj(w) z)` with value `w` at the
    /// origin. For `w = 0` this returns `z`.
    pub fn blaschke_factor(w: Complex64) -> Result<Self> {
        if !w.re.is_finite() || !w.im.is_finite() || w.norm() >= 1.0 {
            return Err(Error::OutsideDisk(w));
        }
        if w.norm() < ZERO_MERGE_TOL {
            return Ok(Self::monomial(1));
        }
        // (w - z)/(1 - conj(w) z) = (w/|w|) * normalized factor
        let b = FiniteBlaschkeProduct::new(0, &[(w, 1)], w / w.norm())?;
        Ok(Self::from_finite(b))
    }

    pub fn unimodular_constant(&self) -> Complex64 {
        self.constant
    }

    pub fn finite_part(&self) -> &FiniteBlaschkeProduct {
        &self.finite
    }

    pub fn sequences(&self) -> &[BlaschkeSequence] {
        &self.sequences
    }

    pub fn singular_part(&self) -> &AtomicSingularInner {
        &self.singular
    }

    pub fn atoms(&self) -> &[(Complex64, f64)] {
        self.singular.atoms()
    }

    pub fn is_constant(&self) -> bool {
        self.finite.degree() == 0 && self.sequences.is_empty() && self.singular.atoms.is_empty()
    }

    /// True when the function is `c` times a finite Blaschke product.
    pub fn is_finite_blaschke(&self) -> bool {
        self.sequences.is_empty() && self.singular.atoms.is_empty()
    }

    /// `(zeta, alpha)` when the function is `c exp(-alpha (zeta + z) / (zeta - z))`.
    pub fn single_atom(&self) -> Option<(Complex64, f64)> {
        (self.finite.degree() == 0 && self.sequences.is_empty() && self.singular.atoms.len() == 1)
            .then(|| self.singular.atoms[0])
    }

    pub fn has_singular_part(&self) -> bool {
        !self.singular.atoms.is_empty()
    }

    /// Value at `z` with error at most `tol` (plus rounding); infinite
    /// Blaschke parts are truncated using their tail bounds.
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<Evaluation> {
        if !(z.norm() < 1.0) {
            return Err(Error::OutsideDisk(z));
        }
        let mut value = self.constant * self.finite.eval(z) * self.singular.eval(z);
        let mut error = 0.0;
        if !self.sequences.is_empty() {
            let share = tol / self.sequences.len() as f64;
            for s in &self.sequences {
                let (v, e) = s.eval(z, share)?;
                value *= v;
                error += e;
            }
        }
        let terms = self.finite.zeros.len() + self.singular.atoms.len() + 1;
        error += 8.0 * f64::EPSILON * terms as f64;
        Ok(Evaluation { value, error })
    }

    /// Value at `z` to [`DEFAULT_EVAL_TOL`].
    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval(z, DEFAULT_EVAL_TOL)?.value)
    }

    /// Order of `w` as a zero; singular factors contribute nothing.
    pub fn mult(&self, w: Complex64) -> u32 {
        self.finite.mult(w) + self.sequences.iter().map(|s| s.mult(w)).sum::<u32>()
    }

    pub fn product(&self, other: &Self) -> Self {
        let mut zeros = self.finite.zeros.clone();
        for &(a, k) in &other.finite.zeros {
            merge_zero(&mut zeros, a, k);
        }
        let mut atoms = self.singular.atoms.clone();
        for &(zeta, alpha) in &other.singular.atoms {
            match atoms
                .iter_mut()
                .find(|(z, _)| (*z - zeta).norm() < ATOM_MERGE_TOL)
            {
                Some(entry) => entry.1 += alpha,
                None => atoms.push((zeta, alpha)),
            }
        }
        let mut sequences = self.sequences.clone();
        sequences.extend(other.sequences.iter().cloned());
        Self {
            constant: self.constant * other.constant,
            finite: FiniteBlaschkeProduct {
                origin_order: self.finite.origin_order + other.finite.origin_order,
                zeros,
                constant: ONE,
            },
            sequences,
            singular: AtomicSingularInner {
                atoms,
                constant: ONE,
            },
        }
    }

    /// `theta ∘ omega` with `omega(z) = conj(a) z`, `|a| = 1`.
    pub fn precompose_rotation(&self, a: Complex64) -> Result<Self> {
        let a = check_unimodular(a, "rotation")?;
        // z^m picks up conj(a)^m; normalized factors and atoms just move
        let constant = self.constant * a.conj().powu(self.finite.origin_order);
        Ok(Self {
            constant,
            finite: FiniteBlaschkeProduct {
                origin_order: self.finite.origin_order,
                zeros: self.finite.zeros.iter().map(|&(p, k)| (a * p, k)).collect(),
                constant: ONE,
            },
            sequences: self.sequences.iter().map(|s| s.rotated(a)).collect(),
            singular: AtomicSingularInner {
                atoms: self
                    .singular
                    .atoms
                    .iter()
                    .map(|&(z, al)| (a * z, al))
                    .collect(),
                constant: ONE,
            },
        })
    }

    /// Zeros of `theta ∘ phi` in the open disk. A linear-fractional `phi` is
    /// univalent, so each zero `a` of `theta` has at most one preimage and
    /// keeps its multiplicity there.
    pub fn compose_zeros(&self, phi: &LinearFractionalMap) -> Result<Vec<(Complex64, u32)>> {
        if !self.is_finite_blaschke() {
            return Err(Error::Unsupported(
                "zero transport needs a finite Blaschke product".into(),
            ));
        }
        let mut out: Vec<(Complex64, u32)> = Vec::new();
        for (a, k) in self.finite.all_zeros() {
            if let Some(z) = phi.preimage(a) {
                if z.norm() < 1.0 - 1e-12 {
                    merge_zero(&mut out, z, k);
                }
            }
        }
        Ok(out)
    }
}

/// Rational function `num / den`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rational {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl Rational {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        Self { num, den }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn boundary_sup_norm(&self) -> f64 {
        boundary_sup_norm(|z| self.eval(z))
    }
}

/// `f = B g` with `B` finite Blaschke and `g` zero-free in the disk.
#[derive(Debug, Clone)]
pub struct RieszFactorization {
    pub blaschke: FiniteBlaschkeProduct,
    pub outer: Rational,
    pub f_sup_norm: f64,
    pub g_sup_norm: f64,
}

/// Factors a rational function bounded on the disk into its Blaschke part
/// and a zero-free quotient.
pub fn riesz_factor(num: &Polynomial, den: &Polynomial) -> Result<RieszFactorization> {
    if num.is_zero() {
        return Err(Error::ZeroFunction);
    }
    if den.is_zero() {
        return Err(Error::InvalidArgument(
            "denominator is identically zero".into(),
        ));
    }
    for (r, _) in den.roots()? {
        if r.norm() <= 1.0 + 1e-12 {
            return Err(Error::PoleInDisk(r));
        }
    }
    let roots = num.roots()?;
    let mut outer_num = num.clone();
    let mut origin = 0u32;
    let mut inside: Vec<(Complex64, u32)> = Vec::new();
    for &(r, k) in &roots {
        if r == ZERO {
            // exact zero roots: strip the low-order zero coefficients
            let shift = k as usize;
            outer_num = Polynomial::new(outer_num.coeffs()[shift..].to_vec());
            origin += k;
        } else if r.norm() < 1.0 - 1e-12 {
            for _ in 0..k {
                outer_num = outer_num.deflate(r);
                // (z - r) = -(r/|r|) (1 - conj(r) z) * normalized factor
                let factor = Polynomial::new(vec![ONE, -r.conj()]).scale(-(r / r.norm()));
                outer_num = outer_num.mul(&factor);
            }
            inside.push((r, k));
        }
    }
    let blaschke = FiniteBlaschkeProduct::new(origin, &inside, ONE)?;
    let outer = Rational::new(outer_num, den.clone());
    let f = Rational::new(num.clone(), den.clone());
    Ok(RieszFactorization {
        blaschke,
        f_sup_norm: f.boundary_sup_norm(),
        g_sup_norm: outer.boundary_sup_norm(),
        outer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{seeded_disk_points, SEED};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn blaschke_factor_examples() {
        let z = InnerFunction::blaschke_factor(ZERO).unwrap();
        assert_eq!(z.value(c(0.3, 0.2)).unwrap(), c(0.3, 0.2));

        let b = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        assert!(b.value(c(0.5, 0.0)).unwrap().norm() < 1e-16);
        assert!((b.value(ZERO).unwrap() - c(0.5, 0.0)).norm() < 1e-16);
        // (1/2 + 1) / (1 + 1/2) at z = -1; evaluate radially
        let v = b.value(c(-1.0 + 1e-12, 0.0)).unwrap();
        assert!((v - ONE).norm() < 1e-10);

        let w = c(0.3, -0.6);
        let b = InnerFunction::blaschke_factor(w).unwrap();
        let z0 = c(-0.2, 0.1);
        let expect = (w - z0) / (ONE - w.conj() * z0);
        assert!((b.value(z0).unwrap() - expect).norm() < 1e-15);
        assert!(matches!(
            InnerFunction::blaschke_factor(c(1.0, 0.0)),
            Err(Error::OutsideDisk(_))
        ));
    }

    #[test]
    fn eval_examples() {
        let z = InnerFunction::monomial(1);
        assert_eq!(z.value(c(0.0, 0.3)).unwrap(), c(0.0, 0.3));

        let s = InnerFunction::atom(ONE, 1.0).unwrap();
        assert_relative_eq!(s.value(ZERO).unwrap().re, (-1.0f64).exp(), epsilon = 1e-15);

        let b = FiniteBlaschkeProduct::new(0, &[(c(0.5, 0.0), 1), (c(-0.5, 0.0), 1)], ONE).unwrap();
        let b = InnerFunction::from_finite(b);
        assert_relative_eq!(b.value(ZERO).unwrap().norm(), 0.25, epsilon = 1e-15);
        assert!(matches!(
            b.eval(c(1.0, 0.0), 1e-10),
            Err(Error::OutsideDisk(_))
        ));
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(InnerFunction::monomial(2).mult(ZERO), 2);
        let b = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        assert_eq!(b.mult(c(0.5, 0.0)), 1);
        assert_eq!(b.mult(c(0.2, 0.0)), 0);
        let s = InnerFunction::atom(ONE, 2.0).unwrap();
        for w in seeded_disk_points(SEED, 20, 0.99) {
            assert_eq!(s.mult(w), 0);
        }
    }

    #[test]
    fn product_examples() {
        let z = InnerFunction::monomial(1);
        let zz = z.product(&z);
        assert_eq!(zz.mult(ZERO), 2);
        assert_eq!(zz.finite_part().origin_order(), 2);

        let b = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        let bb = b.product(&b);
        assert_eq!(bb.finite_part().zeros(), &[(c(0.5, 0.0), 2)]);

        let s1 = InnerFunction::atom(ONE, 1.0).unwrap();
        let s2 = InnerFunction::atom(ONE, 2.0).unwrap();
        let s = s1.product(&s2);
        assert_eq!(s.atoms(), &[(ONE, 3.0)]);
        assert_eq!(s.single_atom(), Some((ONE, 3.0)));
    }

    #[test]
    fn semigroup_law_for_atoms() {
        let zeta = Complex64::from_polar(1.0, 0.9);
        let sa = InnerFunction::atom(zeta, 0.7).unwrap();
        let sb = InnerFunction::atom(zeta, 1.6).unwrap();
        let sab = InnerFunction::atom(zeta, 2.3).unwrap();
        for z in seeded_disk_points(SEED, 50, 0.95) {
            let lhs = sa.value(z).unwrap() * sb.value(z).unwrap();
            assert!((lhs - sab.value(z).unwrap()).norm() < 1e-12);
        }
    }

    #[test]
    fn finite_blaschke_merges_duplicates() {
        let b = FiniteBlaschkeProduct::new(0, &[(c(0.5, 0.0), 1), (c(0.5, 0.0), 2)], ONE).unwrap();
        assert_eq!(b.zeros(), &[(c(0.5, 0.0), 3)]);
        let b = FiniteBlaschkeProduct::new(1, &[(ZERO, 2)], ONE).unwrap();
        assert_eq!(b.origin_order(), 3);
        assert!(FiniteBlaschkeProduct::new(0, &[(c(1.0, 0.0), 1)], ONE).is_err());
        assert!(FiniteBlaschkeProduct::new(0, &[], c(2.0, 0.0)).is_err());
    }

    #[test]
    fn unimodular_on_the_circle() {
        let b = FiniteBlaschkeProduct::new(
            2,
            &[(c(0.5, 0.1), 1), (c(-0.3, -0.8), 2)],
            Complex64::from_polar(1.0, 0.4),
        )
        .unwrap();
        for k in 0..100 {
            let z = Complex64::from_polar(1.0, k as f64 * 0.0628);
            assert!((b.eval(z).norm() - 1.0).abs() < 1e-10);
        }
    }

    fn lf(a: f64, b: f64, cc: f64, d: f64) -> LinearFractionalMap {
        LinearFractionalMap::new(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)).unwrap()
    }

    #[test]
    fn compose_zeros_examples() {
        let z = InnerFunction::monomial(1);
        let phi = lf(1.0, 0.5, 0.5, 1.0);
        let zs = z.compose_zeros(&phi).unwrap();
        assert_eq!(zs.len(), 1);
        assert!((zs[0].0 - c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(zs[0].1, 1);

        let zs = z.compose_zeros(&LinearFractionalMap::identity()).unwrap();
        assert_eq!(zs, vec![(ZERO, 1)]);

        // z/2 = 1/2 has its solution on the circle
        let b = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        assert!(b.compose_zeros(&lf(1.0, 0.0, 0.0, 2.0)).unwrap().is_empty());

        let s = InnerFunction::atom(ONE, 1.0).unwrap();
        assert!(matches!(s.compose_zeros(&phi), Err(Error::Unsupported(_))));
    }

    #[test]
    fn orbit_sequences() {
        // an increasing "tail" is rejected
        let seq = BlaschkeSequence::generated(
            |n| Complex64::new(1.0 - 0.5f64.powi(n as i32 + 1), 0.0),
            |n| n as f64 + 1.0,
        );
        assert!(matches!(seq, Err(Error::NotBlaschkeSummable(_))));
        let seq = BlaschkeSequence::generated(
            |n| Complex64::new(1.0 - 0.5f64.powi(n as i32 + 1), 0.0),
            |n| 0.5f64.powi(n as i32),
        );
        assert!(seq.is_ok());

        let fin = BlaschkeSequence::finite(&[c(0.5, 0.0), c(0.5, 0.0), c(0.1, 0.2)]).unwrap();
        let b = fin.truncate(10).unwrap();
        assert_eq!(b.zeros().len(), 2);
        assert_eq!(fin.mult(c(0.5, 0.0)), 2);

        let constant = BlaschkeSequence::generated(|_| Complex64::new(0.5, 0.0), |_| 100.0);
        assert!(matches!(constant, Err(Error::NotBlaschkeSummable(_))));
    }

    #[test]
    fn generated_sequence_evaluation_meets_tolerance() {
        let r = 0.9f64;
        // a_n = 1 - r^{n+1}: tail sum_{k>=n} r^{k+1} = r^{n+1}/(1-r)
        let seq = BlaschkeSequence::generated(
            move |n| Complex64::new(1.0 - r.powi(n as i32 + 1), 0.0),
            move |n| r.powi(n as i32 + 1) / (1.0 - r),
        )
        .unwrap();
        let f = InnerFunction::from_sequence(seq.clone());
        let z = c(0.1, 0.4);
        let e = f.eval(z, 1e-9).unwrap();
        assert!(e.error <= 1e-9 + 1e-13);
        let reference: Complex64 = (0..2000).fold(ONE, |acc, k| {
            acc * blaschke_term(Complex64::new(1.0 - r.powi(k + 1), 0.0), z)
        });
        assert!((e.value - reference).norm() <= e.error);
        assert_eq!(seq.mult(Complex64::new(1.0 - r, 0.0)), 1);
        assert_eq!(seq.mult(c(0.3, 0.0)), 0);
    }

    #[test]
    fn tail_bound_unavailable() {
        let seq = BlaschkeSequence::generated(
            |n| Complex64::new(1.0 - 1.0 / ((n + 2) as f64).powi(2), 0.0),
            |n| 1.0 / (n as f64 + 1.0),
        )
        .unwrap();
        let f = InnerFunction::from_sequence(seq);
        assert!(matches!(
            f.eval(c(0.5, 0.0), 1e-12),
            Err(Error::TailBoundUnavailable(_))
        ));
        assert!(f.eval(c(0.5, 0.0), 1e-3).is_ok());
    }

    #[test]
    fn riesz_examples() {
        // z (2 + z) / 4
        let num = Polynomial::from_real(&[0.0, 0.5, 0.25]);
        let den = Polynomial::from_real(&[1.0]);
        let rf = riesz_factor(&num, &den).unwrap();
        assert_eq!(rf.blaschke.origin_order(), 1);
        assert!(rf.blaschke.zeros().is_empty());
        assert_relative_eq!(rf.f_sup_norm, 0.75, epsilon = 1e-12);
        assert_relative_eq!(rf.g_sup_norm, 0.75, epsilon = 1e-12);

        let num = Polynomial::from_real(&[0.5, 0.25]);
        let rf = riesz_factor(&num, &den).unwrap();
        assert_eq!(rf.blaschke.degree(), 0);

        // b_{1/2} = (1/2 - z) / (1 - z/2)
        let num = Polynomial::from_real(&[0.5, -1.0]);
        let den2 = Polynomial::from_real(&[1.0, -0.5]);
        let rf = riesz_factor(&num, &den2).unwrap();
        assert_eq!(rf.blaschke.zeros().len(), 1);
        for z in seeded_disk_points(SEED, 20, 0.95) {
            assert!((rf.outer.eval(z) - ONE).norm() < 1e-12);
        }

        assert!(matches!(
            riesz_factor(&num, &Polynomial::from_real(&[1.0, -2.0])),
            Err(Error::PoleInDisk(_))
        ));
        assert!(matches!(
            riesz_factor(&Polynomial::from_real(&[0.0]), &den),
            Err(Error::ZeroFunction)
        ));
    }

    #[test]
    fn riesz_round_trip_and_zero_free_outer_part() {
        let num = Polynomial::from_roots(
            c(0.1, 0.05),
            &[c(0.5, 0.0), c(0.5, 0.0), c(-0.2, 0.6), c(1.5, 1.0), ZERO],
        );
        let den = Polynomial::from_roots(ONE, &[c(3.0, 0.0), c(0.0, -2.5)]);
        let rf = riesz_factor(&num, &den).unwrap();
        assert_eq!(rf.blaschke.mult(c(0.5, 0.0)), 2);
        assert_eq!(rf.blaschke.origin_order(), 1);
        let f = Rational::new(num.clone(), den.clone());
        for z in seeded_disk_points(SEED, 100, 0.999) {
            let lhs = f.eval(z);
            let rhs = rf.blaschke.eval(z) * rf.outer.eval(z);
            assert!((lhs - rhs).norm() < 1e-10, "{lhs} vs {rhs}");
        }
        for (r, _) in rf.outer.num.roots().unwrap() {
            assert!(r.norm() >= 1.0);
        }
        assert!((rf.f_sup_norm - rf.g_sup_norm).abs() < 1e-8);
    }

    #[test]
    fn rotation_precomposition() {
        let theta = InnerFunction::monomial(2)
            .product(&InnerFunction::blaschke_factor(c(0.3, 0.4)).unwrap())
            .product(&InnerFunction::atom(c(0.0, 1.0), 0.8).unwrap());
        let a = Complex64::from_polar(1.0, 1.3);
        let rotated = theta.precompose_rotation(a).unwrap();
        for z in seeded_disk_points(SEED, 30, 0.9) {
            let lhs = rotated.value(z).unwrap();
            let rhs = theta.value(a.conj() * z).unwrap();
            assert!((lhs - rhs).norm() < 1e-13);
        }
    }
}
