//! Sampling helpers shared by the evaluation, certification and oracle code.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seed for every pseudo-random point set.
pub const SEED: u64 = 0x5EED;
/// Uniform boundary samples used for sup-norm estimates.
pub const SUP_NORM_SAMPLES: usize = 4096;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[lo, hi]` by golden-section search. Returns the
/// maximizer and the maximum.
pub fn golden_section_max(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// `sup |f(e^{it})|` over uniform samples, refined once by golden-section
/// search around the best sample.
pub fn boundary_sup_norm(f: impl Fn(Complex64) -> Complex64) -> f64 {
    let n = SUP_NORM_SAMPLES;
    let step = 2.0 * PI / n as f64;
    let modulus = |t: f64| f(Complex64::from_polar(1.0, t)).norm();
    let (best_t, best) = (0..n)
        .map(|k| {
            let t = k as f64 * step;
            (t, modulus(t))
        })
        .fold(
            (0.0, f64::NEG_INFINITY),
            |acc, x| if x.1 > acc.1 { x } else { acc },
        );
    let (_, refined) = golden_section_max(modulus, best_t - step, best_t + step, 60);
    best.max(refined)
}

/// `n` points drawn uniformly (in area) from the disk of radius `rmax`.
pub fn seeded_disk_points(seed: u64, n: usize, rmax: f64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = rmax * rng.gen::<f64>().sqrt();
            let t = rng.gen::<f64>() * 2.0 * PI;
            Complex64::from_polar(r, t)
        })
        .collect()
}

/// Polar grid `r e^{2 pi i k / angles}` for each radius.
pub fn polar_grid(radii: &[f64], angles: usize) -> Vec<Complex64> {
    radii
        .iter()
        .flat_map(|&r| {
            (0..angles).map(move |k| Complex64::from_polar(r, 2.0 * PI * k as f64 / angles as f64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_peak() {
        let (x, fx) = golden_section_max(|t| -(t - 0.3).powi(2) + 2.0, 0.0, 1.0, 80);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_of_shifted_identity() {
        // |2 + e^{it}| / 4 peaks at 3/4
        let s = boundary_sup_norm(|z| (z + 2.0) / 4.0);
        assert!((s - 0.75).abs() < 1e-12);
    }

    #[test]
    fn seeded_points_are_reproducible() {
        let a = seeded_disk_points(SEED, 10, 0.9);
        let b = seeded_disk_points(SEED, 10, 0.9);
        assert_eq!(a, b);
        assert!(a.iter().all(|z| z.norm() <= 0.9));
    }
}
