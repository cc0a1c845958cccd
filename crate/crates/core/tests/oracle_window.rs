use std::f64::consts::PI;

use beurling::certify::{certify_invariance, OracleStatus, VerdictStatus};
use beurling::inner::{FiniteBlaschkeProduct, InnerFunction};
use beurling::maps::LinearFractionalMap;
use beurling::series::{invariance_residual_report, ORACLE_MEMBER_TOL, ORACLE_NON_MEMBER_TOL};
use num_complex::Complex64;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// An elliptic automorphism whose pole sits at radius 2.28: the 32-column
/// basis at N = 64 leaves the member residual just inside the gap band and
/// the pipeline settles it at N = 128.
#[test]
fn gap_band_member_resolves_at_double_window() {
    let w = Complex64::new(0.3, 0.2);
    let flip = LinearFractionalMap::automorphism(ONE, w).unwrap();
    let rot = LinearFractionalMap::rotation(Complex64::from_polar(1.0, 2.0 * PI / 5.0)).unwrap();
    let phi = flip.compose(&rot).unwrap().compose(&flip).unwrap();
    let theta = InnerFunction::from_finite(FiniteBlaschkeProduct::new(0, &[(w, 2)], ONE).unwrap());

    let r64 = invariance_residual_report(&theta, &phi, 64, 4).unwrap();
    assert!(r64.residual > ORACLE_MEMBER_TOL && r64.residual < ORACLE_NON_MEMBER_TOL);
    let r128 = invariance_residual_report(&theta, &phi, 128, 4).unwrap();
    assert!(r128.residual < 1e-14);

    let report = certify_invariance(&theta, &phi).unwrap();
    assert_eq!(report.status(), VerdictStatus::CertifiedMember);
    assert_eq!(report.oracle.status, OracleStatus::Member);
    assert_eq!(report.oracle.n, Some(128));
    assert!(report.agreement);
}
