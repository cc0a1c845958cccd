//! The full numerical battery run alongside an exact verdict, and the
//! soundness alarm raised when the two contradict each other.

use num_complex::Complex64;

use crate::certify::{certify_invariance_with, CertifyOptions, InvarianceReport, VerdictStatus};
use crate::error::Result;
use crate::inner::InnerFunction;
use crate::maps::LinearFractionalMap;
use crate::series::{
    invariance_residual_report, kernel_map_norm, kernel_point_set, kernel_relation_residual,
    littlewood_bound_check, KernelNormEstimate, LittlewoodCheck, ResidualReport, DEFAULT_RIDGE,
};

/// Nested kernel point set sizes.
pub const KERNEL_SET_SIZES: [usize; 3] = [5, 10, 15];
/// Kernel points are drawn from `|z| <= KERNEL_RADIUS`.
pub const KERNEL_RADIUS: f64 = 0.8;
/// Allowed excess of the kernel map norm over the Littlewood bound.
pub const KERNEL_NORM_SLACK: f64 = 1e-6;
/// Points for the reproducing-kernel relation.
pub const KERNEL_RELATION_POINTS: [Complex64; 5] = [
    Complex64 { re: 0.0, im: 0.0 },
    Complex64 { re: 0.5, im: 0.0 },
    Complex64 { re: 0.0, im: -0.4 },
    Complex64 { re: 0.3, im: 0.6 },
    Complex64 { re: -0.7, im: 0.2 },
];

#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub report: InvarianceReport,
    pub residual: Result<ResidualReport>,
    pub littlewood: Result<LittlewoodCheck>,
    pub kernel_relation: Vec<(Complex64, Result<f64>)>,
    pub kernel_norms: Vec<(usize, Result<KernelNormEstimate>)>,
}

/// Reasons the battery contradicts a certified verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Alarm {
    OracleDisagrees,
    SamplingDisagrees,
    LittlewoodViolated { section_norm: f64, bound: f64 },
    KernelNormExceeds { points: usize, c: f64, bound: f64 },
}

impl CrossCheck {
    pub fn alarms(&self) -> Vec<Alarm> {
        let mut out = Vec::new();
        let status = self.report.status();
        if status.is_certified() {
            if !self.report.agreement {
                out.push(Alarm::OracleDisagrees);
            }
            if !self.report.sampling_agreement {
                out.push(Alarm::SamplingDisagrees);
            }
        }
        if let Ok(l) = &self.littlewood {
            if !l.holds() {
                out.push(Alarm::LittlewoodViolated {
                    section_norm: l.section_norm,
                    bound: l.bound,
                });
            }
        }
        if status == VerdictStatus::CertifiedMember {
            for (size, est) in &self.kernel_norms {
                if let Ok(e) = est {
                    if e.c > e.bound + KERNEL_NORM_SLACK {
                        out.push(Alarm::KernelNormExceeds {
                            points: *size,
                            c: e.c,
                            bound: e.bound,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Certifies `(theta, phi)` and runs every oracle at section size `n`.
pub fn cross_check(
    theta: &InnerFunction,
    phi: &LinearFractionalMap,
    n: usize,
    opts: &CertifyOptions,
) -> Result<CrossCheck> {
    let opts = CertifyOptions {
        oracle_n: n,
        ..opts.clone()
    };
    let report = certify_invariance_with(theta, phi, &opts)?;
    let residual = invariance_residual_report(theta, phi, n, opts.probes);
    let littlewood = littlewood_bound_check(phi, n);
    let kernel_relation = KERNEL_RELATION_POINTS
        .iter()
        .map(|&w| (w, kernel_relation_residual(phi, w, n)))
        .collect();
    let largest = KERNEL_SET_SIZES[KERNEL_SET_SIZES.len() - 1];
    let kernel_norms = match kernel_point_set(theta, largest, KERNEL_RADIUS) {
        Ok(points) => KERNEL_SET_SIZES
            .iter()
            .map(|&k| (k, kernel_map_norm(theta, phi, &points[..k], DEFAULT_RIDGE)))
            .collect(),
        Err(e) => KERNEL_SET_SIZES
            .iter()
            .map(|&k| (k, Err(e.clone())))
            .collect(),
    };
    Ok(CrossCheck {
        report,
        residual,
        littlewood,
        kernel_relation,
        kernel_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half() -> LinearFractionalMap {
        LinearFractionalMap::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)).unwrap()
    }

    #[test]
    fn member_pair_is_quiet() {
        let cc = cross_check(
            &InnerFunction::monomial(1),
            &half(),
            64,
            &CertifyOptions::default(),
        )
        .unwrap();
        assert!(cc.residual.as_ref().unwrap().residual < 1e-10);
        assert!(cc.littlewood.as_ref().unwrap().section_norm <= 1.0 + 1e-12);
        assert!(cc.alarms().is_empty(), "{:?}", cc.alarms());
        for (_, est) in &cc.kernel_norms {
            assert!(est.is_ok(), "{est:?}");
        }
    }

    #[test]
    fn non_member_pair_agrees() {
        let theta = InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap();
        let cc = cross_check(&theta, &half(), 64, &CertifyOptions::default()).unwrap();
        assert_eq!(cc.report.status(), VerdictStatus::CertifiedNonMember);
        assert!(cc.residual.as_ref().unwrap().residual > 1e-2);
        assert!(cc.alarms().is_empty());
    }
}
