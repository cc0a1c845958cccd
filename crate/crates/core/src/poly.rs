//! Dense complex polynomials with companion-matrix root finding.

use nalgebra::{linalg::Schur, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Computed roots closer than this are clustered into one multiple root.
pub const ROOT_CLUSTER_TOL: f64 = 1e-8;
/// Clusters closer than this are merged when the polynomial and its
/// derivatives vanish at the merged centroid.
const ROOT_CONFIRM_RADIUS: f64 = 1e-6;
const ROOT_CONFIRM_REL: f64 = 1e-12;

/// Polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// `lead * prod (z - r)`.
    pub fn from_roots(lead: Complex64, roots: &[Complex64]) -> Self {
        let mut p = vec![lead];
        for &r in roots {
            let mut q = vec![Complex64::new(0.0, 0.0); p.len() + 1];
            for (i, &c) in p.iter().enumerate() {
                q[i + 1] += c;
                q[i] -= c * r;
            }
            p = q;
        }
        Self::new(p)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::constant(Complex64::new(0.0, 0.0));
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Synthetic division by `(z - r)`; returns the quotient and discards the
    /// remainder.
    pub fn deflate(&self, r: Complex64) -> Self {
        let n = self.degree();
        if n == 0 {
            return self.clone();
        }
        let mut q = vec![Complex64::new(0.0, 0.0); n];
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (1..=n).rev() {
            acc = acc * r + self.coeffs[k];
            q[k - 1] = acc;
        }
        Self::new(q)
    }

    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Roots with multiplicities, from the eigenvalues of the companion
    /// matrix. Exact zero roots are split off before the eigenvalue step.
    pub fn roots(&self) -> Result<Vec<(Complex64, u32)>> {
        if self.is_zero() {
            return Err(Error::ZeroFunction);
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
        let reduced = Polynomial::new(self.coeffs[lead_zeros..].to_vec());
        let n = reduced.degree();
        let mut out = Vec::new();
        if lead_zeros > 0 {
            out.push((Complex64::new(0.0, 0.0), lead_zeros as u32));
        }
        if n == 0 {
            return Ok(out);
        }
        let lead = reduced.coeffs[n];
        let mut companion = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..n {
            companion[(i, n - 1)] = -reduced.coeffs[i] / lead;
        }
        let eig = Schur::new(companion)
            .eigenvalues()
            .ok_or_else(|| Error::LinearAlgebra("Schur decomposition did not converge".into()))?;
        let mut clusters = cluster(eig.iter().copied(), ROOT_CLUSTER_TOL);
        confirm_merges(&reduced, &mut clusters);
        out.extend(clusters);
        Ok(out)
    }
}

/// Single-linkage clustering; each cluster is reported by its centroid.
fn cluster(points: impl Iterator<Item = Complex64>, tol: f64) -> Vec<(Complex64, u32)> {
    let pts: Vec<Complex64> = points.collect();
    let n = pts.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (pts[i] - pts[j]).norm() < tol {
                let (ri, rj) = (find(&mut label, i), find(&mut label, j));
                if ri != rj {
                    label[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex64, u32)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += pts[i];
                g.2 += 1;
            }
            None => groups.push((r, pts[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, sum, k)| (sum / k as f64, k))
        .collect()
}

/// Merges nearby clusters into a multiple root when `p, p', ...` all vanish
/// at the weighted centroid.
fn confirm_merges(p: &Polynomial, clusters: &mut Vec<(Complex64, u32)>) {
    let scale = p.magnitude();
    loop {
        let mut merged = false;
        'outer: for i in 0..clusters.len() {
            for j in (i + 1)..clusters.len() {
                let (zi, ki) = clusters[i];
                let (zj, kj) = clusters[j];
                if (zi - zj).norm() >= ROOT_CONFIRM_RADIUS {
                    continue;
                }
                let k = ki + kj;
                let centre = (zi * ki as f64 + zj * kj as f64) / k as f64;
                let radius_scale = centre.norm().max(1.0).powi(p.degree() as i32);
                let mut deriv = p.clone();
                let mut factorial = 1.0;
                let mut ok = true;
                for order in 0..k {
                    if order > 0 {
                        deriv = deriv.derivative();
                        factorial *= order as f64;
                    }
                    if deriv.eval(centre).norm() / factorial
                        > ROOT_CONFIRM_REL * scale * radius_scale
                    {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    clusters[i] = (centre, k);
                    clusters.remove(j);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
}
