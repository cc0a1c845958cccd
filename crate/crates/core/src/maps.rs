//! Linear-fractional self-maps of the unit disk.
//!
//! A map `z -> (a z + b) / (c z + d)` is stored as its coefficient matrix,
//! scaled so that the largest coefficient has modulus one. Composition is a
//! matrix product, so iterates stay exact linear-fractional maps.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Number of boundary samples used by the self-map certificate.
pub const BOUNDARY_SAMPLES: usize = 4096;
/// Slack allowed on `|phi(e^{it})| <= 1` by the self-map certificate.
pub const SELF_MAP_TOL: f64 = 1e-10;
/// Two fixed points closer than this are merged into a double point.
pub const ROOT_MERGE_TOL: f64 = 1e-9;
/// A fixed point with `||w| - 1|` below this is a boundary point.
pub const BOUNDARY_TOL: f64 = 1e-9;
/// Coefficient-proportionality tolerance for identity detection.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Denominators below this modulus are treated as poles.
pub const POLE_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFractionalMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

/// A fixed point together with its multiplicity as a root of
/// `c z^2 + (d - a) z - b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub point: Complex64,
    pub multiplicity: u32,
}

impl FixedPoint {
    pub fn is_boundary(&self) -> bool {
        (self.point.norm() - 1.0).abs() < BOUNDARY_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AutomorphismClass {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl AutomorphismClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            AutomorphismClass::Elliptic => "elliptic",
            AutomorphismClass::Hyperbolic => "hyperbolic",
            AutomorphismClass::Parabolic => "parabolic",
        }
    }
}

/// A disk automorphism `z -> lambda (a - z) / (1 - conj(a) z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskAutomorphism {
    map: LinearFractionalMap,
    lambda: Complex64,
    a: Complex64,
    class: AutomorphismClass,
    fixed_points: Vec<FixedPoint>,
}

/// Attracting fixed point of a map that is not an elliptic automorphism.
///
/// For interior points `derivative` is `|phi'(w)|`; for boundary points it is
/// the angular derivative `phi'(w)`, which is real and lies in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenjoyWolffData {
    pub point: Complex64,
    pub derivative: f64,
    pub interior: bool,
}

/// Translation `s -> s + i b` of the right half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlaneTranslation {
    b: f64,
}

/// Cayley transform from the disk onto the right half-plane.
pub fn to_half_plane(z: Complex64) -> Complex64 {
    (ONE + z) / (ONE - z)
}

/// Inverse of [`to_half_plane`].
pub fn from_half_plane(s: Complex64) -> Complex64 {
    (s - ONE) / (s + ONE)
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - conj(w) z|`.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (ONE - w.conj() * z).norm()
}

fn max_modulus(m: &[Complex64; 4]) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn unimodular_check(x: Complex64, what: &str) -> Result<()> {
    if !x.re.is_finite() || !x.im.is_finite() || (x.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "{what} must be unimodular, got {x}"
        )));
    }
    Ok(())
}

impl LinearFractionalMap {
    /// Builds `(a z + b) / (c z + d)` and certifies that it maps the closed
    /// disk into itself.
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let map = Self::from_raw(a, b, c, d)?;
        map.certify_self_map()?;
        Ok(map)
    }

    /// Normalizes and checks the determinant, without the self-map
    /// certificate. Used for maps known to be self-maps by construction.
    fn from_raw(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let coeffs = [a, b, c, d];
        if coeffs
            .iter()
            .any(|x| !x.re.is_finite() || !x.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        let scale = max_modulus(&coeffs);
        if scale == 0.0 {
            return Err(Error::Degenerate { a, b, c, d });
        }
        let [a, b, c, d] = coeffs.map(|x| x / scale);
        if (a * d - b * c).norm() < POLE_TOL {
            return Err(Error::Degenerate { a, b, c, d });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: ONE,
            b: ZERO,
            c: ZERO,
            d: ONE,
        }
    }

    /// The rotation `z -> lambda z`.
    pub fn rotation(lambda: Complex64) -> Result<Self> {
        unimodular_check(lambda, "rotation factor")?;
        Self::from_raw(lambda / lambda.norm(), ZERO, ZERO, ONE)
    }

    /// The automorphism `z -> lambda (a - z) / (1 - conj(a) z)`.
    pub fn automorphism(lambda: Complex64, a: Complex64) -> Result<Self> {
        unimodular_check(lambda, "automorphism factor")?;
        if a.norm() >= 1.0 {
            return Err(Error::OutsideDisk(a));
        }
        let lambda = lambda / lambda.norm();
        Self::from_raw(-lambda, lambda * a, -a.conj(), ONE)
    }

    /// Parabolic automorphism with boundary fixed point `zeta`, conjugate
    /// through the Cayley transform to `s -> s + i b`.
    pub fn parabolic(b: f64, zeta: Complex64) -> Result<Self> {
        HalfPlaneTranslation::new(b)?.to_map(zeta)
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Pole `-d/c`, if the map is not affine.
    pub fn pole(&self) -> Option<Complex64> {
        (self.c.norm() > POLE_TOL).then(|| -self.d / self.c)
    }

    fn certify_self_map(&self) -> Result<()> {
        if let Some(p) = self.pole() {
            if p.norm() <= 1.0 + 1e-12 {
                return Err(Error::NotSelfMap(format!(
                    "pole {p} lies in the closed disk"
                )));
            }
        } else if self.d.norm() < POLE_TOL {
            return Err(Error::NotSelfMap("map is not finite on the disk".into()));
        }
        for k in 0..BOUNDARY_SAMPLES {
            let t = 2.0 * PI * k as f64 / BOUNDARY_SAMPLES as f64;
            let z = Complex64::from_polar(1.0, t);
            let w = self.eval(z)?;
            if w.norm() > 1.0 + SELF_MAP_TOL {
                return Err(Error::NotSelfMap(format!(
                    "|phi({z})| = {} exceeds 1",
                    w.norm()
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_TOL {
            return Err(Error::PoleAtPoint(z));
        }
        Ok((self.a * z + self.b) / den)
    }

    /// `phi'(z) = (a d - b c) / (c z + d)^2`; at a boundary fixed point this is
    /// the angular derivative.
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_TOL {
            return Err(Error::PoleAtPoint(z));
        }
        Ok(self.determinant() / (den * den))
    }

    fn matmul(outer: &Self, inner: &Self) -> [Complex64; 4] {
        [
            outer.a * inner.a + outer.b * inner.c,
            outer.a * inner.b + outer.b * inner.d,
            outer.c * inner.a + outer.d * inner.c,
            outer.c * inner.b + outer.d * inner.d,
        ]
    }

    fn matmul_map(outer: &Self, inner: &Self) -> Self {
        let [a, b, c, d] = Self::matmul(outer, inner);
        Self { a, b, c, d }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        let m = Self::matmul(self, inner);
        let scale = max_modulus(&m);
        // det(outer) det(inner) is exact up to rounding, unlike the
        // determinant recomputed from the (possibly nearly rank-one) product.
        let det = self.determinant() * inner.determinant();
        if scale == 0.0 || det.norm() / (scale * scale) == 0.0 {
            return Err(Error::DegenerateComposition);
        }
        let [a, b, c, d] = m.map(|x| x / scale);
        Ok(Self { a, b, c, d })
    }

    /// The `m`-th iterate as a linear-fractional map (`m = 0` is the identity).
    pub fn power(&self, m: u64) -> Result<Self> {
        let mut result = Self::identity();
        let mut base = *self;
        let mut e = m;
        while e > 0 {
            if e & 1 == 1 {
                result = base.compose(&result)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(result)
    }

    /// Inverse map. It is a self-map only for automorphisms.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.b.norm() < IDENTITY_TOL
            && self.c.norm() < IDENTITY_TOL
            && (self.a - self.d).norm() < IDENTITY_TOL
    }

    /// Equality of the projective classes, up to `tol` after normalizing by a
    /// common phase.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let m1 = self.coefficients();
        let m2 = other.coefficients();
        let k = (0..4)
            .max_by(|&i, &j| m1[i].norm().total_cmp(&m1[j].norm()))
            .unwrap_or(0);
        if m2[k].norm() < POLE_TOL {
            return false;
        }
        let ratio = m1[k] / m2[k];
        m1.iter()
            .zip(m2.iter())
            .all(|(x, y)| (*x - ratio * *y).norm() < tol)
    }

    /// Solves `phi(z) = w`. `None` when the preimage is the point at infinity.
    pub fn preimage(&self, w: Complex64) -> Option<Complex64> {
        let den = self.a - self.c * w;
        if den.norm() < POLE_TOL {
            return None;
        }
        Some((self.d * w - self.b) / den)
    }

    /// Fixed points in the closed disk with multiplicity.
    pub fn fixed_points(&self) -> Result<Vec<FixedPoint>> {
        if self.is_identity() {
            return Err(Error::IdentityMap);
        }
        let qa = self.c;
        let qb = self.d - self.a;
        let qc = -self.b;
        let mut roots: Vec<FixedPoint> = Vec::with_capacity(2);
        if qa.norm() < POLE_TOL {
            if qb.norm() >= POLE_TOL {
                roots.push(FixedPoint {
                    point: -qc / qb,
                    multiplicity: 1,
                });
            }
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            let merge = (ROOT_MERGE_TOL * qa.norm()).powi(2);
            let rounding = 16.0 * f64::EPSILON * (qb.norm_sqr() + 4.0 * (qa * qc).norm());
            if disc.norm() <= merge.max(rounding) {
                roots.push(FixedPoint {
                    point: -qb / (2.0 * qa),
                    multiplicity: 2,
                });
            } else {
                let s = disc.sqrt();
                let sign = if (qb.conj() * s).re >= 0.0 { 1.0 } else { -1.0 };
                let q = -0.5 * (qb + sign * s);
                roots.push(FixedPoint {
                    point: q / qa,
                    multiplicity: 1,
                });
                if q.norm() > 0.0 {
                    roots.push(FixedPoint {
                        point: qc / q,
                        multiplicity: 1,
                    });
                }
            }
        }
        Ok(roots
            .into_iter()
            .filter_map(|mut fp| {
                let r = fp.point.norm();
                if (r - 1.0).abs() < BOUNDARY_TOL {
                    fp.point /= r;
                    Some(fp)
                } else if r < 1.0 {
                    Some(fp)
                } else {
                    None
                }
            })
            .collect())
    }

    /// Canonical automorphism parameters `(lambda, a)` when the map has the
    /// form `lambda (a - z) / (1 - conj(a) z)`.
    fn automorphism_parameters(&self) -> Option<(Complex64, Complex64)> {
        if self.d.norm() < POLE_TOL || self.a.norm() < POLE_TOL {
            return None;
        }
        let lambda = -self.a / self.d;
        let p = -self.b / self.a;
        let tol = 1e-10;
        if (lambda.norm() - 1.0).abs() > tol || p.norm() >= 1.0 {
            return None;
        }
        if (self.c / self.d + p.conj()).norm() > tol {
            return None;
        }
        Some((lambda / lambda.norm(), p))
    }

    pub fn is_automorphism(&self) -> bool {
        self.automorphism_parameters().is_some()
            && Self::from_raw(self.d, -self.b, -self.c, self.a)
                .and_then(|inv| inv.certify_self_map())
                .is_ok()
    }

    /// Classifies an automorphism by its fixed points.
    pub fn classify(&self) -> Result<DiskAutomorphism> {
        DiskAutomorphism::classify(self)
    }

    pub fn denjoy_wolff(&self) -> Result<DenjoyWolffData> {
        if self.is_identity() {
            return Err(Error::IdentityMap);
        }
        let fixed = self.fixed_points()?;
        if let Some(fp) = fixed.iter().find(|fp| !fp.is_boundary()) {
            let deriv = self.derivative_at(fp.point)?.norm();
            if deriv >= 1.0 - 1e-12 {
                return Err(Error::EllipticAutomorphism);
            }
            return Ok(DenjoyWolffData {
                point: fp.point,
                derivative: deriv,
                interior: true,
            });
        }
        let mut best: Option<DenjoyWolffData> = None;
        for fp in &fixed {
            let deriv = self.derivative_at(fp.point)?;
            if deriv.im.abs() > 1e-8 * (1.0 + deriv.re.abs()) || deriv.re <= 0.0 {
                continue;
            }
            if deriv.re <= 1.0 + 1e-9 && best.is_none_or(|b| deriv.re < b.derivative) {
                best = Some(DenjoyWolffData {
                    point: fp.point,
                    derivative: deriv.re.min(1.0),
                    interior: false,
                });
            }
        }
        best.ok_or_else(|| {
            Error::InvalidArgument("no attracting fixed point found in the closed disk".into())
        })
    }

    /// `[phi_1(z), ..., phi_m(z)]`, each evaluated from the coefficient matrix
    /// of the iterate.
    pub fn iterate(&self, z: Complex64, m: usize) -> Result<Vec<Complex64>> {
        if z.norm() >= 1.0 {
            return Err(Error::OutsideDisk(z));
        }
        if m == 0 {
            return Err(Error::InvalidArgument(
                "iteration count must be positive".into(),
            ));
        }
        let mut out: Vec<Complex64> = Vec::with_capacity(m);
        // None once the iterate matrix has collapsed numerically to rank one;
        // the orbit then continues point by point
        let mut current = Some(*self);
        for step in 1..=m {
            let w = match current {
                Some(map) => map.eval(z)?,
                None => self.eval(out[step - 2])?,
            };
            if w.norm() >= 1.0 {
                return Err(Error::EscapedDisk {
                    step,
                    modulus: w.norm(),
                });
            }
            out.push(w);
            if step < m {
                current = match current.map(|c| self.compose(&c)) {
                    Some(Ok(next)) => Some(next),
                    Some(Err(Error::DegenerateComposition)) | None => None,
                    Some(Err(e)) => return Err(e),
                };
            }
        }
        Ok(out)
    }

    /// `psi = omega ∘ phi ∘ omega^{-1}` with `omega(z) = conj(a) z`.
    pub fn rotation_conjugate(&self, a: Complex64) -> Result<Self> {
        unimodular_check(a, "rotation")?;
        let a = a / a.norm();
        Self::from_raw(self.a, a.conj() * self.b, a * self.c, self.d)
    }
}

impl DiskAutomorphism {
    pub fn classify(map: &LinearFractionalMap) -> Result<Self> {
        if map.is_identity() {
            return Err(Error::IdentityMap);
        }
        let (lambda, a) = map.automorphism_parameters().ok_or_else(|| {
            Error::NotAutomorphism("not of the form lambda (a - z) / (1 - conj(a) z)".into())
        })?;
        let inverse = LinearFractionalMap::from_raw(map.d, -map.b, -map.c, map.a)?;
        inverse
            .certify_self_map()
            .map_err(|e| Error::NotAutomorphism(format!("inverse fails: {e}")))?;
        let fixed_points = map.fixed_points()?;
        let class = match fixed_points.as_slice() {
            [fp] if !fp.is_boundary() => AutomorphismClass::Elliptic,
            [fp] if fp.multiplicity == 2 => AutomorphismClass::Parabolic,
            [p, q] if p.is_boundary() && q.is_boundary() => AutomorphismClass::Hyperbolic,
            _ => {
                return Err(Error::NotAutomorphism(format!(
                    "unexpected fixed point configuration {fixed_points:?}"
                )))
            }
        };
        Ok(Self {
            map: *map,
            lambda,
            a,
            class,
            fixed_points,
        })
    }

    pub fn map(&self) -> &LinearFractionalMap {
        &self.map
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn class(&self) -> AutomorphismClass {
        self.class
    }

    pub fn fixed_points(&self) -> &[FixedPoint] {
        &self.fixed_points
    }

    /// For a parabolic automorphism with fixed point `zeta`, returns `b` with
    /// `omega ∘ psi ∘ omega^{-1} = (s -> s + i b)`, where `psi` is the map
    /// rotated so that its fixed point is 1 and `omega` is the Cayley
    /// transform.
    pub fn half_plane_conjugate(&self) -> Result<HalfPlaneTranslation> {
        if self.class != AutomorphismClass::Parabolic {
            return Err(Error::NotParabolic);
        }
        let zeta = self.fixed_points[0].point;
        let psi = self.map.rotation_conjugate(zeta)?;
        // Cayley matrices: omega = [[1, 1], [-1, 1]], omega^{-1} = [[1, -1], [1, 1]].
        let omega = LinearFractionalMap {
            a: ONE,
            b: ONE,
            c: -ONE,
            d: ONE,
        };
        let omega_inv = LinearFractionalMap {
            a: ONE,
            b: -ONE,
            c: ONE,
            d: ONE,
        };
        let m =
            LinearFractionalMap::matmul(&omega, &LinearFractionalMap::matmul_map(&psi, &omega_inv));
        let [sa, sb, sc, sd] = m;
        if sd.norm() < POLE_TOL {
            return Err(Error::NotParabolic);
        }
        let b = (sb / sd).im;
        for s in [
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 1.0),
            Complex64::new(0.5, -3.0),
        ] {
            let lhs = (sa * s + sb) / (sc * s + sd);
            let rhs = s + Complex64::new(0.0, b);
            if (lhs - rhs).norm() > 1e-12 {
                return Err(Error::NotParabolic);
            }
        }
        HalfPlaneTranslation::new(b)
    }
}

impl HalfPlaneTranslation {
    pub fn new(b: f64) -> Result<Self> {
        if !b.is_finite() || b == 0.0 {
            return Err(Error::InvalidArgument(format!(
                "translation parameter must be a nonzero real, got {b}"
            )));
        }
        Ok(Self { b })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `s -> s + i b`.
    pub fn apply(&self, s: Complex64) -> Complex64 {
        s + Complex64::new(0.0, self.b)
    }

    /// The parabolic disk automorphism `z -> zeta psi(conj(zeta) z)` where
    /// `psi = omega^{-1} ∘ sigma ∘ omega`.
    pub fn to_map(&self, zeta: Complex64) -> Result<LinearFractionalMap> {
        unimodular_check(zeta, "fixed point")?;
        let zeta = zeta / zeta.norm();
        let ib = Complex64::new(0.0, self.b);
        let two = Complex64::new(2.0, 0.0);
        LinearFractionalMap::from_raw(two - ib, zeta * ib, -zeta.conj() * ib, two + ib)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hyperbolic() -> LinearFractionalMap {
        LinearFractionalMap::new(c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = LinearFractionalMap::identity();
        assert_eq!(id.eval(c(0.3, 0.1)).unwrap(), c(0.3, 0.1));
        let m = hyperbolic();
        assert!((m.eval(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.eval(c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pole_is_reported() {
        // z / 2 has no pole; evaluate a raw map with a pole at 2.
        let m = LinearFractionalMap::from_raw(ONE, ZERO, ONE, c(-2.0, 0.0)).unwrap();
        assert!(matches!(m.eval(c(2.0, 0.0)), Err(Error::PoleAtPoint(_))));
    }

    #[test]
    fn inversion_is_not_a_self_map() {
        let r = LinearFractionalMap::new(ZERO, ONE, ONE, ZERO);
        assert!(matches!(r, Err(Error::NotSelfMap(_))));
        let r = LinearFractionalMap::new(c(2.0, 0.0), ZERO, ZERO, ONE);
        assert!(matches!(r, Err(Error::NotSelfMap(_))));
        let r = LinearFractionalMap::new(ONE, c(2.0, 0.0), c(0.5, 0.0), c(1.0, 0.0));
        assert!(r.is_err());
    }

    #[test]
    fn degenerate_coefficients() {
        let r = LinearFractionalMap::new(ONE, ONE, ONE, ONE);
        assert!(matches!(r, Err(Error::Degenerate { .. })));
    }

    #[test]
    fn compose_with_identity() {
        let m = hyperbolic();
        let r = LinearFractionalMap::identity().compose(&m).unwrap();
        assert!(r.approx_eq(&m, 1e-14));
    }

    #[test]
    fn fixed_points_examples() {
        let fps = hyperbolic().fixed_points().unwrap();
        assert_eq!(fps.len(), 2);
        let mut pts: Vec<f64> = fps.iter().map(|f| f.point.re).collect();
        pts.sort_by(f64::total_cmp);
        assert_relative_eq!(pts[0], -1.0, epsilon = 1e-14);
        assert_relative_eq!(pts[1], 1.0, epsilon = 1e-14);
        assert!(fps
            .iter()
            .all(|f| f.multiplicity == 1 && f.point.im.abs() < 1e-14));

        let rot = LinearFractionalMap::rotation(Complex64::from_polar(1.0, 1.0)).unwrap();
        let fps = rot.fixed_points().unwrap();
        assert_eq!(
            fps,
            vec![FixedPoint {
                point: ZERO,
                multiplicity: 1
            }]
        );

        let par = LinearFractionalMap::parabolic(2.0, ONE).unwrap();
        let fps = par.fixed_points().unwrap();
        assert_eq!(fps.len(), 1);
        assert_eq!(fps[0].multiplicity, 2);
        assert!((fps[0].point - ONE).norm() < 1e-14);

        assert!(matches!(
            LinearFractionalMap::identity().fixed_points(),
            Err(Error::IdentityMap)
        ));
    }

    #[test]
    fn classify_examples() {
        let neg = LinearFractionalMap::rotation(c(-1.0, 0.0)).unwrap();
        let aut = neg.classify().unwrap();
        assert_eq!(aut.class(), AutomorphismClass::Elliptic);
        assert_eq!(aut.fixed_points()[0].point, ZERO);

        let aut = hyperbolic().classify().unwrap();
        assert_eq!(aut.class(), AutomorphismClass::Hyperbolic);
        assert_relative_eq!(aut.lambda().re, -1.0, epsilon = 1e-14);
        assert_relative_eq!(aut.a().re, -0.5, epsilon = 1e-14);

        let par = LinearFractionalMap::parabolic(2.0, ONE).unwrap();
        let aut = par.classify().unwrap();
        assert_eq!(aut.class(), AutomorphismClass::Parabolic);
        assert!((aut.fixed_points()[0].point - ONE).norm() < 1e-14);

        let half = LinearFractionalMap::new(ONE, ZERO, ZERO, c(2.0, 0.0)).unwrap();
        assert!(matches!(half.classify(), Err(Error::NotAutomorphism(_))));
    }

    #[test]
    fn denjoy_wolff_examples() {
        let half = LinearFractionalMap::new(ONE, ZERO, ZERO, c(2.0, 0.0)).unwrap();
        let dw = half.denjoy_wolff().unwrap();
        assert_eq!(dw.point, ZERO);
        assert_relative_eq!(dw.derivative, 0.5, epsilon = 1e-15);
        assert!(dw.interior);

        let dw = hyperbolic().denjoy_wolff().unwrap();
        assert!((dw.point - ONE).norm() < 1e-14);
        assert_relative_eq!(dw.derivative, 1.0 / 3.0, epsilon = 1e-14);
        assert!(!dw.interior);
        // the iterates from 0 approach the same point
        let orbit: Vec<Complex64> =
            std::iter::successors(Some(ZERO), |z| hyperbolic().eval(*z).ok())
                .take(60)
                .collect();
        assert!((orbit[59] - ONE).norm() < 1e-12);

        let par = LinearFractionalMap::parabolic(2.0, ONE).unwrap();
        let dw = par.denjoy_wolff().unwrap();
        assert!((dw.point - ONE).norm() < 1e-14);
        assert_relative_eq!(dw.derivative, 1.0, epsilon = 1e-12);

        let rot = LinearFractionalMap::rotation(c(0.0, 1.0)).unwrap();
        assert!(matches!(
            rot.denjoy_wolff(),
            Err(Error::EllipticAutomorphism)
        ));
    }

    #[test]
    fn iterate_examples() {
        let z = c(0.2, -0.4);
        let id = LinearFractionalMap::identity();
        assert_eq!(id.iterate(z, 3).unwrap(), vec![z, z, z]);

        let par = LinearFractionalMap::parabolic(2.0, ONE).unwrap();
        let it = par.iterate(ZERO, 1).unwrap();
        assert!((it[0] - c(0.5, 0.5)).norm() < 1e-15);

        assert!(matches!(
            id.iterate(c(1.0, 0.0), 2),
            Err(Error::OutsideDisk(_))
        ));
    }

    #[test]
    fn iterate_reports_escape() {
        // hyperbolic orbits reach the boundary in floating point
        let r = hyperbolic().iterate(ZERO, 200);
        assert!(matches!(r, Err(Error::EscapedDisk { .. })));
    }

    #[test]
    fn half_plane_examples() {
        for b in [2.0, -0.5] {
            let par = LinearFractionalMap::parabolic(b, ONE).unwrap();
            let h = par.classify().unwrap().half_plane_conjugate().unwrap();
            assert_relative_eq!(h.b(), b, epsilon = 1e-13);
        }
        let zeta = Complex64::from_polar(1.0, 2.0);
        let par = LinearFractionalMap::parabolic(1.5, zeta).unwrap();
        let aut = par.classify().unwrap();
        assert!((aut.fixed_points()[0].point - zeta).norm() < 1e-12);
        assert_relative_eq!(
            aut.half_plane_conjugate().unwrap().b(),
            1.5,
            epsilon = 1e-12
        );

        let aut = hyperbolic().classify().unwrap();
        assert!(matches!(
            aut.half_plane_conjugate(),
            Err(Error::NotParabolic)
        ));
        assert!(HalfPlaneTranslation::new(0.0).is_err());
    }

    #[test]
    fn rotation_conjugate_examples() {
        let m = hyperbolic();
        assert!(m.rotation_conjugate(ONE).unwrap().approx_eq(&m, 1e-15));

        // a map with Denjoy-Wolff point i: rotate the hyperbolic example
        let i = c(0.0, 1.0);
        let phi = m.rotation_conjugate(i.conj()).unwrap();
        let dw = phi.denjoy_wolff().unwrap();
        assert!((dw.point - i).norm() < 1e-12);
        let psi = phi.rotation_conjugate(i).unwrap();
        assert!((psi.denjoy_wolff().unwrap().point - ONE).norm() < 1e-12);

        let a = Complex64::from_polar(1.0, 0.7);
        let back = m
            .rotation_conjugate(a)
            .unwrap()
            .rotation_conjugate(a.conj())
            .unwrap();
        assert!(back.approx_eq(&m, 1e-14));

        assert!(m.rotation_conjugate(c(0.5, 0.0)).is_err());
    }

    #[test]
    fn derivative_examples() {
        let id = LinearFractionalMap::identity();
        assert_eq!(id.derivative_at(c(0.4, 0.1)).unwrap(), ONE);
        let d = hyperbolic().derivative_at(ONE).unwrap();
        assert_relative_eq!(d.re, 1.0 / 3.0, epsilon = 1e-15);
        let neg = LinearFractionalMap::rotation(c(-1.0, 0.0)).unwrap();
        assert_eq!(neg.derivative_at(ZERO).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn automorphism_constructor_matches_form() {
        let lambda = Complex64::from_polar(1.0, 0.3);
        let a = c(0.2, -0.5);
        let m = LinearFractionalMap::automorphism(lambda, a).unwrap();
        let z = c(0.1, 0.6);
        let expect = lambda * (a - z) / (ONE - a.conj() * z);
        assert!((m.eval(z).unwrap() - expect).norm() < 1e-14);
        assert!(m.is_automorphism());
        assert!(!LinearFractionalMap::new(ONE, ZERO, ZERO, c(2.0, 0.0))
            .unwrap()
            .is_automorphism());
    }

    #[test]
    fn power_matches_repeated_composition() {
        let m = LinearFractionalMap::parabolic(0.7, c(0.0, 1.0)).unwrap();
        let p = m.power(13).unwrap();
        let mut q = LinearFractionalMap::identity();
        for _ in 0..13 {
            q = m.compose(&q).unwrap();
        }
        assert!(p.approx_eq(&q, 1e-12));
        assert!(m.power(0).unwrap().is_identity());
    }
}
