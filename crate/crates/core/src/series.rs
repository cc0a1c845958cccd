//! Truncated power series and the finite-section oracle: sections of `C_phi`
//! and `M_theta` on the monomial basis, subspace residuals, the Littlewood
//! norm bound, Szegő-kernel identities and kernel Gram norm estimates.

use nalgebra::{linalg::SymmetricEigen, Cholesky, DMatrix, DVector, QR, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::inner::InnerFunction;
use crate::maps::{pseudo_hyperbolic, LinearFractionalMap};

/// Section size for certification cross-checks.
pub const DEFAULT_ORACLE_N: usize = 64;
/// Section size for kernel identities and norm checks.
pub const DEFAULT_KERNEL_N: usize = 128;
/// Residuals below this are evidence of invariance.
pub const ORACLE_MEMBER_TOL: f64 = 1e-8;
/// Residuals above this are evidence against invariance.
pub const ORACLE_NON_MEMBER_TOL: f64 = 1e-2;
/// Number of probe columns `C_phi(theta z^k)`.
pub const DEFAULT_PROBES: usize = 4;
pub const DEFAULT_RIDGE: f64 = 1e-12;
pub const MAX_GRAM_CONDITION: f64 = 1e14;
pub const MIN_TAIL_RADIUS: f64 = 1e-3;
pub const MIN_POINT_SEPARATION: f64 = 0.1;
pub const MAX_KERNEL_POINTS: usize = 20;
pub const LITTLEWOOD_SLACK: f64 = 1e-8;
/// Oracle series are expanded to this multiple of the section size before
/// the Cauchy remainder takes over.
const EXTENSION_FACTOR: usize = 4;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `|c_n| <= constant * radius^n` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    pub radius: f64,
    pub constant: f64,
}

impl TailBound {
    pub fn coefficient_bound(&self, n: usize) -> f64 {
        self.constant * self.radius.powi(n as i32)
    }

    /// Bound on `(sum_{k >= n} |c_k|^2)^{1/2}`.
    pub fn l2_from(&self, n: usize) -> f64 {
        if self.constant == 0.0 {
            return 0.0;
        }
        let log = self.constant.ln() + n as f64 * self.radius.ln()
            - 0.5 * (1.0 - self.radius * self.radius).ln();
        log.exp()
    }

    /// Bound on `|sum_{k >= n} c_k z^k|`, infinite outside the disk of
    /// convergence of the bound.
    pub fn eval_from(&self, n: usize, z: f64) -> f64 {
        let q = self.radius * z;
        if q >= 1.0 {
            return f64::INFINITY;
        }
        self.constant * q.powi(n as i32) / (1.0 - q)
    }
}

/// Taylor coefficients `c_0 .. c_{N-1}` with an optional geometric bound
/// valid for all coefficients, stored or not.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    tail: Option<TailBound>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a power series needs N >= 1".into()));
        }
        Ok(Self { coeffs, tail: None })
    }

    /// Attaches `|c_n| <= C rho^n`. The radius is floored at
    /// [`MIN_TAIL_RADIUS`] and `C` raised to cover the stored coefficients.
    pub fn with_tail(coeffs: Vec<Complex64>, radius: f64, constant: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&radius) || !constant.is_finite() || constant < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tail bound needs 0 <= radius < 1 and C >= 0, got ({radius}, {constant})"
            )));
        }
        let mut s = Self::new(coeffs)?;
        let radius = radius.max(MIN_TAIL_RADIUS);
        let ln_r = radius.ln();
        let observed = s
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(n, c)| c.norm().ln() - n as f64 * ln_r)
            .fold(f64::NEG_INFINITY, f64::max);
        let constant = constant.max(observed.exp());
        s.tail = Some(TailBound { radius, constant });
        Ok(s)
    }

    pub fn constant(c: Complex64, n: usize) -> Result<Self> {
        let mut coeffs = vec![ZERO; n.max(1)];
        coeffs[0] = c;
        Self::with_tail(coeffs, 0.0, c.norm())
    }

    pub fn monomial(k: usize, n: usize) -> Result<Self> {
        let mut coeffs = vec![ZERO; n.max(1)];
        if k < n {
            coeffs[k] = ONE;
        }
        let radius = MIN_TAIL_RADIUS;
        Self::with_tail(coeffs, radius, radius.powi(-(k as i32)))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::monomial(1, n)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(ZERO)
    }

    pub fn tail(&self) -> Option<TailBound> {
        self.tail
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Bound on `|f(z) - eval(z)|` from the omitted coefficients.
    pub fn eval_error(&self, z: Complex64) -> Option<f64> {
        self.tail.map(|t| t.eval_from(self.len(), z.norm()))
    }

    /// Bound on the l2 norm of the omitted coefficients.
    pub fn l2_tail(&self) -> Option<f64> {
        self.tail.map(|t| t.l2_from(self.len()))
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn truncate(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n.max(1), ZERO);
        Self {
            coeffs,
            tail: self.tail,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
            tail: self.tail.map(|t| TailBound {
                radius: t.radius,
                constant: t.constant * s.norm(),
            }),
        }
    }

    fn without_tail(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs, tail: None }
    }
}

fn mul_trunc(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn product_tail(f: TailBound, g: TailBound) -> TailBound {
    let (lo, hi) = if f.radius <= g.radius {
        (f.radius, g.radius)
    } else {
        (g.radius, f.radius)
    };
    let c = f.constant * g.constant;
    if hi - lo >= 0.1 * hi {
        // sum_i rho^i sigma^{k-i} <= hi^{k+1} / (hi - lo)
        TailBound {
            radius: hi,
            constant: c * hi / (hi - lo),
        }
    } else {
        let wider = hi + (1.0 - hi) / 4.0;
        TailBound {
            radius: wider,
            constant: c / ((1.0 - f.radius / wider) * (1.0 - g.radius / wider)),
        }
    }
}

/// Cauchy product truncated to the shorter length.
pub fn series_mul(f: &PowerSeries, g: &PowerSeries) -> PowerSeries {
    let n = f.len().min(g.len());
    let coeffs = mul_trunc(&f.coeffs, &g.coeffs, n);
    match (f.tail, g.tail) {
        (Some(a), Some(b)) => {
            let t = product_tail(a, b);
            PowerSeries::with_tail(coeffs, t.radius, t.constant)
                .unwrap_or_else(|_| PowerSeries::without_tail(mul_trunc(&f.coeffs, &g.coeffs, n)))
        }
        _ => PowerSeries::without_tail(coeffs),
    }
}

/// `f ∘ phi` truncated to the shorter length, by Horner accumulation.
pub fn series_compose(f: &PowerSeries, phi: &PowerSeries) -> Result<PowerSeries> {
    let phi0 = phi.coeff(0).norm();
    if !(phi0 < 1.0) {
        return Err(Error::CompositionDiverges(phi0));
    }
    let n = f.len().min(phi.len());
    let mut acc = vec![ZERO; n];
    acc[0] = f.coeffs[n - 1];
    for k in (0..n - 1).rev() {
        acc = mul_trunc(&acc, &phi.coeffs, n);
        acc[0] += f.coeffs[k];
    }
    Ok(PowerSeries::without_tail(acc))
}

/// `f ∘ phi` with a per-coefficient bound on the error caused by the
/// coefficients of `f` beyond its stored length. Needs both tail bounds.
pub fn series_compose_certified(
    f: &PowerSeries,
    phi: &PowerSeries,
) -> Result<(PowerSeries, Vec<f64>)> {
    let out = series_compose(f, phi)?;
    let n = out.len();
    let (Some(tf), Some(tp)) = (f.tail, phi.tail) else {
        return Err(Error::TailBoundUnavailable(f64::INFINITY));
    };
    let mut errors = vec![f64::INFINITY; n];
    for r in [0.1f64, 0.25, 0.5, 0.75, 0.9, 0.99] {
        // M(r) bounds |phi| on |z| = r
        let m = phi
            .coeffs
            .iter()
            .take(n)
            .enumerate()
            .map(|(k, c)| c.norm() * r.powi(k as i32))
            .sum::<f64>()
            + tp.eval_from(n, r);
        let q = tf.radius * m;
        if !(q < 1.0) {
            continue;
        }
        let head = tf.constant * q.powi(n as i32) / (1.0 - q);
        for (k, e) in errors.iter_mut().enumerate() {
            *e = e.min(head / r.powi(k as i32));
        }
    }
    if errors.iter().any(|e| !e.is_finite()) {
        return Err(Error::TailBoundUnavailable(f64::INFINITY));
    }
    Ok((out, errors))
}

/// Exact Taylor coefficients of `(az + b) / (cz + d)`:
/// `b/d + (ad - bc)/d^2 sum_{n >= 1} (-c/d)^{n-1} z^n`.
pub fn taylor_of_map(phi: &LinearFractionalMap, n: usize) -> Result<PowerSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("a power series needs N >= 1".into()));
    }
    let [a, b, c, d] = phi.coefficients();
    if d.norm() <= c.norm() {
        let ratio = if c.norm() == 0.0 {
            0.0
        } else {
            d.norm() / c.norm()
        };
        return Err(Error::PoleTooClose(ratio));
    }
    let q = -c / d;
    let lead = (a * d - b * c) / (d * d);
    let mut coeffs = vec![ZERO; n];
    coeffs[0] = b / d;
    let mut p = lead;
    for coeff in coeffs.iter_mut().skip(1) {
        *coeff = p;
        p *= q;
    }
    let radius = q.norm().max(MIN_TAIL_RADIUS);
    let constant = (b / d).norm().max(lead.norm() / radius);
    PowerSeries::with_tail(coeffs, radius, constant)
}

/// Coefficients of `(|a|/a)(a - z)/(1 - conj(a) z)` (or `z` for `a = 0`).
fn blaschke_factor_coeffs(a: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n];
    if a == ZERO {
        if n > 1 {
            out[1] = ONE;
        }
        return out;
    }
    let u = a.norm() / a;
    out[0] = u * a;
    let mut p = u * (a.norm_sqr() - 1.0);
    for coeff in out.iter_mut().skip(1) {
        *coeff = p;
        p *= a.conj();
    }
    out
}

/// `exp(f)` by the recurrence `n g_n = sum_{k=1}^{n} k f_k g_{n-k}`.
fn exp_series(f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    let mut g = vec![ZERO; n];
    g[0] = f[0].exp();
    for m in 1..n {
        let s: Complex64 = (1..=m).map(|k| f[k] * g[m - k] * k as f64).sum();
        g[m] = s / m as f64;
    }
    g
}

/// Best Cauchy estimate `|c_n| <= M(R) R^{-n}` for the l2 tail from `n0`,
/// over a geometric grid of radii `1 < R < r_max`.
fn best_cauchy_tail(
    bound: impl Fn(f64) -> Option<f64>,
    r_max: f64,
    n0: usize,
) -> Option<TailBound> {
    let hi = if r_max.is_finite() {
        r_max.min(1.0 / MIN_TAIL_RADIUS)
    } else {
        1.0 / MIN_TAIL_RADIUS
    };
    if !(hi > 1.0) {
        return None;
    }
    let mut best: Option<(f64, TailBound)> = None;
    for j in 1..400 {
        let r = (hi.ln() * j as f64 / 400.0).exp();
        let Some(m) = bound(r) else { continue };
        if !m.is_finite() {
            continue;
        }
        let t = TailBound {
            radius: 1.0 / r,
            constant: m,
        };
        let v = t.l2_from(n0);
        if best.map_or(true, |(b, _)| v < b) {
            best = Some((v, t));
        }
    }
    best.map(|(_, t)| t)
}

/// Bound on `|theta(w)|` for `|w| <= r`, valid while `r |a| < 1` for every
/// zero `a` of the finite Blaschke product.
fn blaschke_majorant(theta: &InnerFunction, r: f64) -> Option<f64> {
    let b = theta.finite_part();
    let mut m = r.powi(b.origin_order() as i32);
    for &(a, k) in b.zeros() {
        let den = 1.0 - a.norm() * r;
        if den <= 0.0 {
            return None;
        }
        m *= ((r + a.norm()) / den).powi(k as i32);
    }
    Some(m)
}

fn largest_zero_modulus(theta: &InnerFunction) -> f64 {
    theta
        .finite_part()
        .zeros()
        .iter()
        .map(|(a, _)| a.norm())
        .fold(0.0, f64::max)
}

/// `max |phi(z)|` on `|z| = r`, from the image circle of a linear-fractional
/// map. `None` when the pole lies in `|z| <= r`.
fn lf_max_modulus(phi: &LinearFractionalMap, r: f64) -> Option<f64> {
    let [a, b, c, d] = phi.coefficients();
    let kappa = d.norm_sqr() - r * r * c.norm_sqr();
    if kappa <= 0.0 {
        return None;
    }
    let beta = d * b.conj() - r * r * c * a.conj();
    let centre = beta.conj() / kappa;
    let rad2 = beta.norm_sqr() / (kappa * kappa) - (b.norm_sqr() - r * r * a.norm_sqr()) / kappa;
    Some(centre.norm() + rad2.max(0.0).sqrt())
}

/// Taylor coefficients of an inner function. Finite Blaschke products carry
/// a Cauchy tail bound; atoms are expanded by the exponential recurrence and
/// infinite Blaschke products are truncated with a certified coefficient
/// error below `1e-12`, neither with a geometric tail.
pub fn taylor_of_inner(theta: &InnerFunction, n: usize) -> Result<PowerSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("a power series needs N >= 1".into()));
    }
    let b = theta.finite_part();
    let m = b.origin_order() as usize;
    let mut coeffs = vec![ZERO; n];
    if m < n {
        coeffs[m] = theta.unimodular_constant();
    }
    for &(a, k) in b.zeros() {
        let f = blaschke_factor_coeffs(a, n);
        for _ in 0..k {
            coeffs = mul_trunc(&coeffs, &f, n);
        }
    }
    let mut exact_tail = true;
    for seq in theta.sequences() {
        exact_tail = false;
        // |B - B_j| <= 2 tail(j) / (1 - r) on |z| = r; with r = k/(k+1) the
        // k-th coefficient error is at most 2 e (k + 1) tail(j)
        let limit = 1e-12 / (2.0 * std::f64::consts::E * n as f64);
        let mut j = 0usize;
        while seq.tail_bound(j) > limit {
            if j >= crate::inner::MAX_SEQUENCE_TERMS {
                return Err(Error::TailBoundUnavailable(1e-12));
            }
            j = (j * 2).max(1);
        }
        for idx in 0..j {
            let a = seq.point(idx).expect("generated sequences are infinite");
            coeffs = mul_trunc(&coeffs, &blaschke_factor_coeffs(a, n), n);
        }
    }
    let atoms = theta.atoms();
    if !atoms.is_empty() {
        exact_tail = false;
        // -sum alpha (zeta + z)/(zeta - z) = -sum alpha (1 + 2 sum_{n>=1} (z/zeta)^n)
        let mut e = vec![ZERO; n];
        for &(zeta, alpha) in atoms {
            e[0] -= alpha;
            let mut p = zeta.conj();
            for coeff in e.iter_mut().skip(1) {
                *coeff -= 2.0 * alpha * p;
                p *= zeta.conj();
            }
        }
        coeffs = mul_trunc(&coeffs, &exp_series(&e), n);
    }
    if !exact_tail {
        return PowerSeries::new(coeffs);
    }
    let r_max = 1.0 / largest_zero_modulus(theta);
    match best_cauchy_tail(|r| blaschke_majorant(theta, r), r_max, n) {
        Some(t) => PowerSeries::with_tail(coeffs, t.radius, t.constant),
        None => PowerSeries::new(coeffs),
    }
}

/// Which operator a section compresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionRole {
    Composition,
    Multiplication,
}

/// `N x N` compression of an operator to the first `N` monomials.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSection {
    pub entries: DMatrix<Complex64>,
    pub role: SectionRole,
    pub source: String,
}

impl OperatorSection {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn spectral_norm(&self) -> f64 {
        SVD::new(self.entries.clone(), false, false)
            .singular_values
            .iter()
            .fold(0.0, |a: f64, &b| a.max(b))
    }
}

/// Column `k` holds the coefficients of `phi^k`.
pub fn cphi_section(phi: &PowerSeries, n: usize) -> Result<OperatorSection> {
    let phi0 = phi.coeff(0).norm();
    if !(phi0 < 1.0) {
        return Err(Error::CompositionDiverges(phi0));
    }
    let base: Vec<Complex64> = (0..n).map(|k| phi.coeff(k)).collect();
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    let mut col = vec![ZERO; n];
    if n > 0 {
        col[0] = ONE;
    }
    for k in 0..n {
        for (i, &v) in col.iter().enumerate() {
            entries[(i, k)] = v;
        }
        if k + 1 < n {
            col = mul_trunc(&col, &base, n);
        }
    }
    Ok(OperatorSection {
        entries,
        role: SectionRole::Composition,
        source: format!("C_phi section, N = {n}"),
    })
}

/// Lower-triangular Toeplitz matrix with first column `theta`.
pub fn mtheta_section(theta: &PowerSeries, n: usize) -> OperatorSection {
    let mut entries = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            entries[(i, j)] = theta.coeff(i - j);
        }
    }
    OperatorSection {
        entries,
        role: SectionRole::Multiplication,
        source: format!("M_theta section, N = {n}"),
    }
}

/// Projection residual together with the truncation error it was measured
/// under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub residual: f64,
    /// Relative l2 mass of the probes and of `theta` outside the window.
    pub tail_error: f64,
    pub n: usize,
    pub probes: usize,
}

/// `l2` norm of the coefficients of `coeffs` from index `from`, plus the
/// Cauchy remainder beyond the stored length.
fn windowed_tail(coeffs: &[Complex64], from: usize, remainder: Option<TailBound>) -> f64 {
    let head: f64 = coeffs.iter().skip(from).map(|c| c.norm_sqr()).sum();
    let rest = remainder.map_or(f64::INFINITY, |t| t.l2_from(coeffs.len().max(from)));
    (head + rest * rest).sqrt()
}

/// Coefficients of `C_phi(theta z^k)` for a finite Blaschke `theta`, built
/// from the exact expansions of the linear-fractional maps `b_a ∘ phi`.
fn probe_series(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    k: usize,
    len: usize,
) -> Result<Vec<Complex64>> {
    let b = theta.finite_part();
    let phi_s = taylor_of_map(phi, len)?;
    let mut coeffs = vec![ZERO; len];
    coeffs[0] = theta.unimodular_constant();
    for _ in 0..(b.origin_order() as usize + k) {
        coeffs = mul_trunc(&coeffs, &phi_s.coeffs, len);
    }
    for &(a, mult) in b.zeros() {
        let u = a.norm() / a;
        let factor = LinearFractionalMap::new(-u, u * a, -a.conj(), ONE)?;
        let composed = taylor_of_map(&factor.compose(phi)?, len)?;
        for _ in 0..mult {
            coeffs = mul_trunc(&coeffs, &composed.coeffs, len);
        }
    }
    Ok(coeffs)
}

/// Cauchy majorant of `theta(phi(z)) phi(z)^k` on `|z| = r`.
fn probe_majorant(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    k: usize,
    r: f64,
) -> Option<f64> {
    let w = lf_max_modulus(phi, r)?;
    Some(blaschke_majorant(theta, w)? * w.powi(k as i32))
}

/// Projection residual of `C_phi(theta z^k)`, `k < probes`, against the span
/// of `theta z^j`, `j < N/2`, measured on the first `N` coefficients. The
/// truncation error is reported rather than checked.
pub fn invariance_residual_report(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    n: usize,
    probes: usize,
) -> Result<ResidualReport> {
    if n < 8 || probes == 0 || probes > n / 4 {
        return Err(Error::InvalidArgument(format!(
            "need N >= 8 and 1 <= K <= N/4, got N = {n}, K = {probes}"
        )));
    }
    if theta.is_constant() {
        return Ok(ResidualReport {
            residual: 0.0,
            tail_error: 0.0,
            n,
            probes,
        });
    }
    if !theta.is_finite_blaschke() {
        return Err(Error::TailBoundUnavailable(ORACLE_MEMBER_TOL / 10.0));
    }
    let len = EXTENSION_FACTOR * n;
    let n_eff = n / 2;
    let r_theta = 1.0 / largest_zero_modulus(theta);
    let theta_s = taylor_of_inner(theta, len)?;
    let theta_rem = best_cauchy_tail(|r| blaschke_majorant(theta, r), r_theta, len);
    let theta_tail = windowed_tail(theta_s.coeffs(), n_eff, theta_rem);

    let mut basis = DMatrix::<Complex64>::zeros(n, n_eff);
    for j in 0..n_eff {
        for i in j..n {
            basis[(i, j)] = theta_s.coeff(i - j);
        }
    }
    let q = QR::new(basis).q();

    let mut residual: f64 = 0.0;
    let mut probe_tail: f64 = 0.0;
    let r_phi = phi.pole().map_or(f64::INFINITY, |p| p.norm());
    for k in 0..probes {
        let c = probe_series(theta, phi, k, len)?;
        let v = DVector::from_iterator(n, c.iter().take(n).copied());
        let norm = v.norm();
        if norm == 0.0 {
            continue;
        }
        let proj = &q * (q.adjoint() * &v);
        residual = residual.max((&v - proj).norm() / norm);
        let rem = best_cauchy_tail(|r| probe_majorant(theta, phi, k, r), r_phi, len);
        probe_tail = probe_tail.max(windowed_tail(&c, n, rem) / norm);
    }
    Ok(ResidualReport {
        residual,
        tail_error: probe_tail + theta_tail,
        n,
        probes,
    })
}

/// [`invariance_residual_report`] that refuses windows whose truncation
/// error exceeds a tenth of [`ORACLE_MEMBER_TOL`].
pub fn invariance_residual(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    n: usize,
    probes: usize,
) -> Result<f64> {
    let report = invariance_residual_report(theta, phi, n, probes)?;
    let limit = ORACLE_MEMBER_TOL / 10.0;
    if report.tail_error > limit {
        return Err(Error::TruncationUnreliable {
            error: report.tail_error,
            limit,
        });
    }
    Ok(report.residual)
}

/// Boundary nodes for the trapezoid rule in [`model_space_residual`].
const MODEL_SPACE_NODES: usize = 4096;

/// Truncation-free counterpart of [`invariance_residual`] for finite
/// Blaschke products with simple zeros: `||P_K g|| / ||g||` for
/// `g = C_phi(theta z^k)`, where `K = H^2 ⊖ theta H^2` is spanned by the
/// Szegő kernels at the zeros.
pub fn model_space_residual(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    probes: usize,
) -> Result<f64> {
    if theta.is_constant() {
        return Ok(0.0);
    }
    if !theta.is_finite_blaschke() {
        return Err(Error::Unsupported(
            "model space residual needs a finite Blaschke product".into(),
        ));
    }
    let zeros = theta.finite_part().all_zeros();
    if zeros.iter().any(|&(_, k)| k > 1) {
        return Err(Error::Unsupported(
            "model space residual needs simple zeros".into(),
        ));
    }
    let points: Vec<Complex64> = zeros.iter().map(|z| z.0).collect();
    let n = points.len();
    let g = DMatrix::from_fn(n, n, |i, j| ONE / (ONE - points[i] * points[j].conj()));
    let chol = Cholesky::new(g).ok_or_else(|| Error::IllConditioned(f64::INFINITY))?;
    let b = theta.finite_part();
    let unit = theta.unimodular_constant();
    let mut worst: f64 = 0.0;
    for k in 0..probes.max(1) {
        let eval = |z: Complex64| -> Result<Complex64> {
            let w = phi.eval(z)?;
            Ok(unit * b.eval(w) * w.powu(k as u32))
        };
        let v = DVector::from_iterator(
            n,
            points
                .iter()
                .map(|&a| eval(a))
                .collect::<Result<Vec<_>>>()?,
        );
        let coef = chol.solve(&v);
        let proj = v.dotc(&coef).re.max(0.0);
        let mut norm2 = 0.0;
        for j in 0..MODEL_SPACE_NODES {
            let z = Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * j as f64 / MODEL_SPACE_NODES as f64,
            );
            norm2 += eval(z)?.norm_sqr();
        }
        norm2 /= MODEL_SPACE_NODES as f64;
        if norm2 > 0.0 {
            worst = worst.max((proj / norm2).sqrt());
        }
    }
    Ok(worst)
}

/// `sqrt((1 + |phi(0)|) / (1 - |phi(0)|))`.
pub fn littlewood_bound(phi: &LinearFractionalMap) -> Result<f64> {
    let p = phi.eval(ZERO)?.norm();
    Ok(((1.0 + p) / (1.0 - p)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LittlewoodCheck {
    pub section_norm: f64,
    pub bound: f64,
}

impl LittlewoodCheck {
    pub fn holds(&self) -> bool {
        self.section_norm <= self.bound + LITTLEWOOD_SLACK
    }
}

pub fn littlewood_bound_check(phi: &LinearFractionalMap, n: usize) -> Result<LittlewoodCheck> {
    let section = cphi_section(&taylor_of_map(phi, n)?, n)?;
    Ok(LittlewoodCheck {
        section_norm: section.spectral_norm(),
        bound: littlewood_bound(phi)?,
    })
}

/// `|| S^* k_w - k_{phi(w)} ||` on the first `N/2` coordinates, with `S` the
/// `N x N` composition section and `k_u = (1, conj(u), conj(u)^2, ...)`.
pub fn kernel_relation_residual(phi: &LinearFractionalMap, w: Complex64, n: usize) -> Result<f64> {
    if !(w.norm() < 1.0) {
        return Err(Error::OutsideDisk(w));
    }
    let section = cphi_section(&taylor_of_map(phi, n)?, n)?;
    let kw = DVector::from_iterator(n, (0..n).map(|i| w.conj().powu(i as u32)));
    let image = section.entries.adjoint() * kw;
    let target = phi.eval(w)?.conj();
    let mut sum = 0.0;
    let mut p = ONE;
    for j in 0..n / 2 {
        sum += (image[j] - p).norm_sqr();
        p *= target;
    }
    Ok(sum.sqrt())
}

/// Norm estimate for the map `conj(theta(w)) K_w -> conj(theta(phi(w))) K_{phi(w)}`
/// on the span of the given kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelNormEstimate {
    pub points: Vec<Complex64>,
    pub c: f64,
    pub bound: f64,
    pub ridge: f64,
}

fn gram(values: &[Complex64], points: &[Complex64]) -> DMatrix<Complex64> {
    let n = points.len();
    DMatrix::from_fn(n, n, |i, j| {
        values[i] * values[j].conj() / (ONE - points[i] * points[j].conj())
    })
}

fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> DVector<f64> {
    let sym = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(sym).eigenvalues
}

pub fn kernel_map_norm(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    points: &[Complex64],
    ridge: f64,
) -> Result<KernelNormEstimate> {
    if points.is_empty() || points.len() > MAX_KERNEL_POINTS {
        return Err(Error::InvalidArgument(format!(
            "need 1 to {MAX_KERNEL_POINTS} points, got {}",
            points.len()
        )));
    }
    if !(ridge >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "ridge must be nonnegative, got {ridge}"
        )));
    }
    for (i, &p) in points.iter().enumerate() {
        if !(p.norm() < 1.0) {
            return Err(Error::OutsideDisk(p));
        }
        for &q in &points[..i] {
            let d = pseudo_hyperbolic(p, q);
            if d < MIN_POINT_SEPARATION {
                return Err(Error::InvalidArgument(format!(
                    "points {q} and {p} are {d:.3} apart; need {MIN_POINT_SEPARATION}"
                )));
            }
        }
    }
    let images = points
        .iter()
        .map(|&w| phi.eval(w))
        .collect::<Result<Vec<_>>>()?;
    let vin = points
        .iter()
        .map(|&w| theta.value(w))
        .collect::<Result<Vec<_>>>()?;
    let vout = images
        .iter()
        .map(|&w| theta.value(w))
        .collect::<Result<Vec<_>>>()?;
    let g_in = gram(&vin, points);
    let g_out = gram(&vout, &images);

    let ev = hermitian_eigenvalues(g_in.clone());
    let (lo, hi) = ev.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    });
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if cond > MAX_GRAM_CONDITION {
        return Err(Error::IllConditioned(cond));
    }

    let n = points.len();
    let shift = DMatrix::<Complex64>::identity(n, n) * Complex64::new(ridge, 0.0);
    let chol = Cholesky::new(g_in + &shift)
        .ok_or_else(|| Error::LinearAlgebra("input Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::LinearAlgebra("Cholesky factor is singular".into()))?;
    let reduced = &l_inv * (g_out + shift) * l_inv.adjoint();
    let top = hermitian_eigenvalues(reduced)
        .iter()
        .fold(0.0f64, |a, &b| a.max(b));
    Ok(KernelNormEstimate {
        points: points.to_vec(),
        c: top.sqrt(),
        bound: littlewood_bound(phi)?,
        ridge,
    })
}

/// Deterministic kernel points: seeded draws from `|z| <= rmax`, kept when
/// they are separated from earlier picks and `|theta|` is not tiny there.
/// Prefixes of the result are the nested sets.
pub fn kernel_point_set(theta: &InnerFunction, count: usize, rmax: f64) -> Result<Vec<Complex64>> {
    const MIN_THETA_MODULUS: f64 = 1e-2;
    const DRAWS: usize = 4096;
    let mut picked: Vec<Complex64> = Vec::with_capacity(count);
    for p in crate::numeric::seeded_disk_points(crate::numeric::SEED, DRAWS, rmax) {
        if picked.len() == count {
            break;
        }
        if picked
            .iter()
            .any(|&q| pseudo_hyperbolic(p, q) < 2.0 * MIN_POINT_SEPARATION)
        {
            continue;
        }
        if theta.value(p)?.norm() >= MIN_THETA_MODULUS {
            picked.push(p);
        }
    }
    if picked.len() < count {
        return Err(Error::InvalidArgument(format!(
            "found only {} admissible kernel points out of {count}",
            picked.len()
        )));
    }
    Ok(picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{seeded_disk_points, SEED};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lf(a: f64, b: f64, cc: f64, d: f64) -> LinearFractionalMap {
        LinearFractionalMap::new(c(a, 0.0), c(b, 0.0), c(cc, 0.0), c(d, 0.0)).unwrap()
    }

    fn series(v: &[f64]) -> PowerSeries {
        PowerSeries::new(v.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn mul_examples() {
        let one = PowerSeries::constant(ONE, 4).unwrap();
        let g = series(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(series_mul(&one, &g).coeffs(), g.coeffs());
        let p = series_mul(&series(&[1.0, 1.0, 0.0]), &series(&[1.0, -1.0, 0.0]));
        assert_eq!(p.coeffs(), series(&[1.0, 0.0, -1.0]).coeffs());
    }

    #[test]
    fn mul_tail_bound_holds_at_high_order() {
        let f = taylor_of_map(&lf(1.0, 0.5, 0.5, 1.0), 200).unwrap();
        let g = taylor_of_map(&lf(1.0, 0.3, 0.3, 2.0), 200).unwrap();
        let h = series_mul(&f, &g);
        let t = h.tail().unwrap();
        assert_eq!(t.radius, 0.5);
        for (k, coeff) in h.coeffs().iter().enumerate() {
            assert!(coeff.norm() <= t.coefficient_bound(k) * (1.0 + 1e-12));
        }
        // equal radii take the widened bound
        let h2 = series_mul(&f, &f);
        let t2 = h2.tail().unwrap();
        for (k, coeff) in h2.coeffs().iter().enumerate() {
            assert!(coeff.norm() <= t2.coefficient_bound(k) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn compose_examples() {
        let f = series(&[0.3, -1.0, 2.0, 0.5, 0.0, 0.0]);
        let id = PowerSeries::identity(6).unwrap();
        assert_eq!(series_compose(&f, &id).unwrap().coeffs(), f.coeffs());

        let z2 = series(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let z4 = series_compose(&z2, &z2).unwrap();
        assert_eq!(
            z4.coeffs(),
            series(&[0.0, 0.0, 0.0, 0.0, 1.0, 0.0]).coeffs()
        );

        let shifted = series(&[1.0, 0.5]);
        assert!(matches!(
            series_compose(&f, &shifted),
            Err(Error::CompositionDiverges(_))
        ));
    }

    #[test]
    fn compose_matches_pointwise() {
        let b = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        let phi = lf(2.0, 1.0, 1.0, 2.0);
        let f = taylor_of_inner(&b, 64).unwrap();
        let g = taylor_of_map(&phi, 64).unwrap();
        let (h, errs) = series_compose_certified(&f, &g).unwrap();
        assert!(errs[0] < 1e-12);
        for z in seeded_disk_points(SEED, 5, 0.5) {
            let direct = b.value(phi.eval(z).unwrap()).unwrap();
            assert!((h.eval(z) - direct).norm() < 1e-9);
        }
    }

    #[test]
    fn taylor_of_map_examples() {
        let id = taylor_of_map(&LinearFractionalMap::identity(), 4).unwrap();
        assert_eq!(id.coeffs(), &[ZERO, ONE, ZERO, ZERO]);
        let phi = lf(1.0, 0.5, 0.5, 1.0);
        let s = taylor_of_map(&phi, 64).unwrap();
        assert_relative_eq!(s.coeff(0).re, 0.5, epsilon = 1e-15);
        for z in seeded_disk_points(SEED, 10, 0.99) {
            let err = s.eval_error(z).unwrap();
            assert!((s.eval(z) - phi.eval(z).unwrap()).norm() <= err + 1e-14);
        }
    }

    #[test]
    fn taylor_of_inner_examples() {
        let z = taylor_of_inner(&InnerFunction::monomial(1), 4).unwrap();
        assert_eq!(z.coeffs(), &[ZERO, ONE, ZERO, ZERO]);
        let b = taylor_of_inner(&InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(), 8).unwrap();
        assert_relative_eq!(b.coeff(0).re, 0.5, epsilon = 1e-15);
        assert_relative_eq!(b.coeff(1).re, -0.75, epsilon = 1e-15);
        let s = taylor_of_inner(&InnerFunction::atom(ONE, 1.0).unwrap(), 8).unwrap();
        assert_relative_eq!(s.coeff(0).re, (-1.0f64).exp(), epsilon = 1e-15);
        assert!(s.tail().is_none());
    }

    #[test]
    fn taylor_of_inner_matches_values() {
        let theta = InnerFunction::monomial(2)
            .product(&InnerFunction::blaschke_factor(c(0.3, -0.2)).unwrap())
            .product(&InnerFunction::atom(c(0.0, 1.0), 0.4).unwrap());
        let s = taylor_of_inner(&theta, 256).unwrap();
        for z in seeded_disk_points(SEED, 10, 0.6) {
            assert!((s.eval(z) - theta.value(z).unwrap()).norm() < 1e-10);
        }
        let fin = InnerFunction::blaschke_factor(c(0.3, -0.2)).unwrap();
        let s = taylor_of_inner(&fin, 32).unwrap();
        let t = s.tail().unwrap();
        for z in seeded_disk_points(SEED, 10, 0.9) {
            let err = t.eval_from(32, z.norm());
            assert!((s.eval(z) - fin.value(z).unwrap()).norm() <= err + 1e-14);
        }
    }

    #[test]
    fn section_examples() {
        let id = cphi_section(&PowerSeries::identity(6).unwrap(), 6).unwrap();
        assert_eq!(id.entries, DMatrix::identity(6, 6));
        let z2 = series(&[0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let s = cphi_section(&z2, 8).unwrap();
        for k in 0..8 {
            for i in 0..8 {
                let expect = if i == 2 * k { ONE } else { ZERO };
                assert_eq!(s.entries[(i, k)], expect);
            }
        }
        let shift = mtheta_section(&taylor_of_inner(&InnerFunction::monomial(1), 5).unwrap(), 5);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j + 1 { ONE } else { ZERO };
                assert_eq!(shift.entries[(i, j)], expect);
            }
        }
        let one = mtheta_section(&PowerSeries::constant(ONE, 5).unwrap(), 5);
        assert_eq!(one.entries, DMatrix::identity(5, 5));
        let theta =
            taylor_of_inner(&InnerFunction::blaschke_factor(c(0.2, 0.1)).unwrap(), 5).unwrap();
        let m = mtheta_section(&theta, 5);
        assert_eq!(
            m.entries.column(0).iter().copied().collect::<Vec<_>>(),
            theta.coeffs()
        );
    }

    #[test]
    fn residual_examples() {
        let z = InnerFunction::monomial(1);
        let half = lf(1.0, 0.0, 0.0, 2.0);
        assert!(invariance_residual(&z, &half, 64, 4).unwrap() < 1e-10);

        let b = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        assert!(invariance_residual(&b, &half, 64, 4).unwrap() > 0.01);

        assert_eq!(
            invariance_residual(&InnerFunction::one(), &half, 64, 4).unwrap(),
            0.0
        );
        assert!(matches!(
            invariance_residual(&z, &half, 64, 32),
            Err(Error::InvalidArgument(_))
        ));
        let atom = InnerFunction::atom(ONE, 1.0).unwrap();
        assert!(matches!(
            invariance_residual(&atom, &half, 64, 4),
            Err(Error::TailBoundUnavailable(_))
        ));
    }

    #[test]
    fn littlewood_examples() {
        let id = littlewood_bound_check(&LinearFractionalMap::identity(), 32).unwrap();
        assert_relative_eq!(id.section_norm, 1.0, epsilon = 1e-12);
        assert_relative_eq!(id.bound, 1.0, epsilon = 1e-15);
        let half = littlewood_bound_check(&lf(1.0, 0.0, 0.0, 2.0), 32).unwrap();
        assert_eq!(half.bound, 1.0);
        assert!(half.holds());
        let phi = littlewood_bound_check(&lf(1.0, 0.5, 0.5, 1.0), 64).unwrap();
        assert_relative_eq!(phi.bound, 3.0f64.sqrt(), epsilon = 1e-12);
        assert!(phi.holds());
    }

    #[test]
    fn kernel_relation_examples() {
        let id = LinearFractionalMap::identity();
        assert!(kernel_relation_residual(&id, c(0.4, -0.3), 64).unwrap() < 1e-12);
        let phi = lf(1.0, 0.5, 0.5, 1.0);
        assert!(kernel_relation_residual(&phi, c(0.3, 0.0), 128).unwrap() < 1e-8);
        assert!(matches!(
            kernel_relation_residual(&phi, c(1.0, 0.0), 16),
            Err(Error::OutsideDisk(_))
        ));
    }

    #[test]
    fn kernel_map_norm_examples() {
        let half = lf(1.0, 0.0, 0.0, 2.0);
        let z = InnerFunction::monomial(1);
        let est = kernel_map_norm(&z, &half, &[c(0.2, 0.0), c(0.0, 0.5)], DEFAULT_RIDGE).unwrap();
        assert!(est.c.is_finite());
        assert!(est.c <= 1.0 + 1e-6);

        let phi = lf(1.0, 0.5, 0.5, 1.0);
        let pts = [c(0.1, 0.0), c(-0.4, 0.3), c(0.2, -0.6)];
        let est = kernel_map_norm(&InnerFunction::one(), &phi, &pts, DEFAULT_RIDGE).unwrap();
        assert!(est.c <= est.bound + 1e-6);

        let b = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        let radii = [0.1, 0.4, 0.6, 0.75, 0.85, 0.92];
        let radial =
            |k: usize| -> Vec<Complex64> { radii[..k].iter().map(|&r| c(r, 0.0)).collect() };
        let mut prev = 0.0;
        for k in [2, 4, 6] {
            let est = kernel_map_norm(&b, &half, &radial(k), DEFAULT_RIDGE).unwrap();
            assert!(est.c >= prev);
            prev = est.c;
        }

        assert!(matches!(
            kernel_map_norm(&z, &half, &[c(0.2, 0.0), c(0.21, 0.0)], DEFAULT_RIDGE),
            Err(Error::InvalidArgument(_))
        ));
    }
}
