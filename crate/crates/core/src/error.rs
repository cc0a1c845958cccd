use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator vanishes at {0}")]
    PoleAtPoint(Complex64),
    #[error("coefficients ({a}, {b}, {c}, {d}) give a degenerate map (ad - bc = 0)")]
    Degenerate {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    #[error("composition is degenerate")]
    DegenerateComposition,
    #[error("not a self-map of the unit disk: {0}")]
    NotSelfMap(String),
    #[error("the map is the identity")]
    IdentityMap,
    #[error("not an automorphism of the unit disk: {0}")]
    NotAutomorphism(String),
    #[error("elliptic automorphism has no Denjoy-Wolff point")]
    EllipticAutomorphism,
    #[error("not a parabolic automorphism")]
    NotParabolic,
    #[error("iterate {step} left the open disk (|z| = {modulus})")]
    EscapedDisk { step: usize, modulus: f64 },
    #[error("point {0} is not in the open unit disk")]
    OutsideDisk(Complex64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no tail bound reaches tolerance {0}")]
    TailBoundUnavailable(f64),
    #[error("sequence is not Blaschke summable: {0}")]
    NotBlaschkeSummable(String),
    #[error("denominator has a root {0} in the closed disk")]
    PoleInDisk(Complex64),
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("composition diverges: |phi(0)| = {0} >= 1")]
    CompositionDiverges(f64),
    #[error("pole of the map is too close to the disk (|d/c| = {0})")]
    PoleTooClose(f64),
    #[error("truncation error {error:e} exceeds {limit:e}")]
    TruncationUnreliable { error: f64, limit: f64 },
    #[error("Gram matrix condition number {0:e} is too large")]
    IllConditioned(f64),
    #[error("uncancelled zero of theta at grid point {0}")]
    ZeroDivision(Complex64),
    #[error("theta H^2 is not invariant under the composition operator")]
    NotInvariant,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),
}
