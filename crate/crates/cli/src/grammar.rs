//! Function-spec strings.
//!
//! ```text
//! spec    := inner | map
//! inner   := term { "*" term }
//! term    := "z" ["^" INT] | "blaschke(" complexList [";" "mult=" intList] ")"
//!          | "atom(" complex "," REAL ")" | "const(" complex ")" | complex
//! map     := "mobius(" complex "," complex "," complex "," complex ")"
//!          | "rot(" complex ")" | "autom(" complex "," complex ")"
//!          | "parabolic(b=" REAL [", zeta=" complex] ")"
//! complex := REAL | REAL ("+"|"-") REAL "i" | REAL "i" | "exp(" ["-"] "i" phase ")"
//! phase   := [REAL] ["pi"] ["/" REAL]
//! ```
//!
//! Whitespace is allowed between tokens.

use std::f64::consts::PI;
use std::fmt;

use beurling::inner::{FiniteBlaschkeProduct, InnerFunction};
use beurling::maps::LinearFractionalMap;
use num_complex::Complex64;
use thiserror::Error;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("syntax error at line {line}, column {column}: {reason}")]
    Syntax {
        line: usize,
        column: usize,
        reason: String,
    },
    #[error("invalid spec: {0}")]
    Semantics(String),
}

#[derive(Debug, Clone)]
pub enum Parsed {
    Inner(InnerFunction),
    Map(LinearFractionalMap),
}

#[derive(Debug, Clone)]
pub struct FunctionSpec {
    pub raw: String,
    pub parsed: Parsed,
}

impl FunctionSpec {
    pub fn canonical(&self) -> String {
        match &self.parsed {
            Parsed::Inner(f) => print_inner(f),
            Parsed::Map(m) => print_map(m),
        }
    }

    pub fn into_inner(self) -> Result<InnerFunction, SpecError> {
        match self.parsed {
            Parsed::Inner(f) => Ok(f),
            Parsed::Map(_) => Err(SpecError::Semantics(format!(
                "expected an inner function, got the map {}",
                self.raw
            ))),
        }
    }

    pub fn into_map(self) -> Result<LinearFractionalMap, SpecError> {
        match self.parsed {
            Parsed::Map(m) => Ok(m),
            Parsed::Inner(_) => Err(SpecError::Semantics(format!(
                "expected a self-map, got the inner function {}",
                self.raw
            ))),
        }
    }
}

pub fn parse_spec(raw: &str) -> Result<FunctionSpec, SpecError> {
    let mut p = Parser { src: raw, pos: 0 };
    p.skip_ws();
    let parsed = if ["mobius", "rot", "autom", "parabolic"]
        .iter()
        .any(|k| p.at_keyword(k))
    {
        Parsed::Map(p.map()?)
    } else {
        Parsed::Inner(p.inner()?)
    };
    p.skip_ws();
    if p.pos < raw.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(FunctionSpec {
        raw: raw.to_string(),
        parsed,
    })
}

/// A complex number on its own, for command arguments such as `--z`.
pub fn parse_complex(raw: &str) -> Result<Complex64, SpecError> {
    let mut p = Parser { src: raw, pos: 0 };
    let z = p.complex()?;
    p.skip_ws();
    if p.pos < raw.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(z)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn semantics(e: impl fmt::Display) -> SpecError {
    SpecError::Semantics(e.to_string())
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn error(&self, reason: impl Into<String>) -> SpecError {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        SpecError::Syntax {
            line,
            column,
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.rest().starts_with(kw)
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), SpecError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{tok}'")))
        }
    }

    fn try_real(&mut self) -> Option<f64> {
        self.skip_ws();
        let bytes = self.rest().as_bytes();
        let mut i = 0;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let mut digits = i - digits_start;
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            let frac = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            digits += i - frac;
        }
        if digits == 0 {
            return None;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let exp_start = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j > exp_start {
                i = j;
            }
        }
        let value = self.rest()[..i].parse().ok()?;
        self.pos += i;
        Some(value)
    }

    fn real(&mut self) -> Result<f64, SpecError> {
        self.try_real()
            .ok_or_else(|| self.error("expected a real number"))
    }

    fn unsigned_int(&mut self) -> Result<u32, SpecError> {
        self.skip_ws();
        let n = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if n == 0 {
            return Err(self.error("expected a nonnegative integer"));
        }
        let v = self.rest()[..n]
            .parse()
            .map_err(|_| self.error("integer out of range"))?;
        self.pos += n;
        Ok(v)
    }

    fn complex(&mut self) -> Result<Complex64, SpecError> {
        if self.eat("exp(") {
            let sign = if self.eat("-") { -1.0 } else { 1.0 };
            self.expect("i")?;
            let phase = self.phase()?;
            self.expect(")")?;
            return Ok(Complex64::from_polar(1.0, sign * phase));
        }
        let re = self.real()?;
        if self.eat("i") {
            return Ok(Complex64::new(0.0, re));
        }
        self.skip_ws();
        let sign = match self.rest().as_bytes().first() {
            Some(b'+') => 1.0,
            Some(b'-') => -1.0,
            _ => return Ok(Complex64::new(re, 0.0)),
        };
        self.pos += 1;
        self.skip_ws();
        if self.rest().starts_with(['+', '-']) {
            return Err(self.error("expected the imaginary part"));
        }
        let im = self.real()?;
        self.expect("i")?;
        Ok(Complex64::new(re, sign * im))
    }

    fn phase(&mut self) -> Result<f64, SpecError> {
        let sign = if self.eat("-") { -1.0 } else { 1.0 };
        let scale = self.try_real();
        let pi = self.eat("pi");
        if scale.is_none() && !pi {
            return Err(self.error("expected a phase"));
        }
        let mut phase = sign * scale.unwrap_or(1.0) * if pi { PI } else { 1.0 };
        if self.eat("/") {
            phase /= self.real()?;
        }
        Ok(phase)
    }

    fn complex_list(&mut self) -> Result<Vec<Complex64>, SpecError> {
        let mut out = vec![self.complex()?];
        while self.eat(",") {
            out.push(self.complex()?);
        }
        Ok(out)
    }

    fn inner(&mut self) -> Result<InnerFunction, SpecError> {
        let mut f = self.term()?;
        while self.eat("*") {
            f = f.product(&self.term()?);
        }
        Ok(f)
    }

    fn term(&mut self) -> Result<InnerFunction, SpecError> {
        self.skip_ws();
        if self.eat("blaschke(") {
            let zeros = self.complex_list()?;
            let mults = if self.eat(";") {
                self.expect("mult")?;
                self.expect("=")?;
                let mut m = vec![self.unsigned_int()?];
                while self.eat(",") {
                    m.push(self.unsigned_int()?);
                }
                m
            } else {
                vec![1; zeros.len()]
            };
            self.expect(")")?;
            if mults.len() != zeros.len() {
                return Err(SpecError::Semantics(format!(
                    "{} zeros but {} multiplicities",
                    zeros.len(),
                    mults.len()
                )));
            }
            let pairs: Vec<(Complex64, u32)> = zeros.into_iter().zip(mults).collect();
            let b = FiniteBlaschkeProduct::new(0, &pairs, ONE).map_err(semantics)?;
            return Ok(InnerFunction::from_finite(b));
        }
        if self.eat("atom(") {
            let zeta = self.complex()?;
            self.expect(",")?;
            let alpha = self.real()?;
            self.expect(")")?;
            return InnerFunction::atom(zeta, alpha).map_err(semantics);
        }
        if self.eat("const(") {
            let c = self.complex()?;
            self.expect(")")?;
            return InnerFunction::constant(c).map_err(semantics);
        }
        if self.eat("z") {
            let m = if self.eat("^") {
                self.unsigned_int()?
            } else {
                1
            };
            return Ok(InnerFunction::monomial(m));
        }
        let c = self
            .complex()
            .map_err(|_| self.error("expected z, blaschke(, atom(, const( or a constant"))?;
        InnerFunction::constant(c).map_err(semantics)
    }

    fn map(&mut self) -> Result<LinearFractionalMap, SpecError> {
        if self.eat("mobius(") {
            let a = self.complex()?;
            self.expect(",")?;
            let b = self.complex()?;
            self.expect(",")?;
            let c = self.complex()?;
            self.expect(",")?;
            let d = self.complex()?;
            self.expect(")")?;
            return LinearFractionalMap::new(a, b, c, d).map_err(semantics);
        }
        if self.eat("rot(") {
            let l = self.complex()?;
            self.expect(")")?;
            return LinearFractionalMap::rotation(l).map_err(semantics);
        }
        if self.eat("autom(") {
            let l = self.complex()?;
            self.expect(",")?;
            let a = self.complex()?;
            self.expect(")")?;
            return LinearFractionalMap::automorphism(l, a).map_err(semantics);
        }
        self.expect("parabolic(")?;
        self.expect("b")?;
        self.expect("=")?;
        let b = self.real()?;
        let zeta = if self.eat(",") {
            self.expect("zeta")?;
            self.expect("=")?;
            self.complex()?
        } else {
            ONE
        };
        self.expect(")")?;
        LinearFractionalMap::parabolic(b, zeta).map_err(semantics)
    }
}

pub fn print_real(x: f64) -> String {
    // Display gives the shortest string that parses back to the same value
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

pub fn print_complex(z: Complex64) -> String {
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => print_real(z.re),
        (true, false) => format!("{}i", print_real(z.im)),
        (false, false) if z.im < 0.0 => format!("{}-{}i", print_real(z.re), print_real(-z.im)),
        (false, false) => format!("{}+{}i", print_real(z.re), print_real(z.im)),
    }
}

/// Constant, monomial, finite zeros, then atoms. Infinite Blaschke sequences
/// have no grammar form and print as `sequence`.
pub fn print_inner(f: &InnerFunction) -> String {
    let mut terms = Vec::new();
    if f.unimodular_constant() != ONE {
        terms.push(format!("const({})", print_complex(f.unimodular_constant())));
    }
    match f.finite_part().origin_order() {
        0 => {}
        1 => terms.push("z".into()),
        m => terms.push(format!("z^{m}")),
    }
    let zeros = f.finite_part().zeros();
    if !zeros.is_empty() {
        let list: Vec<String> = zeros.iter().map(|&(a, _)| print_complex(a)).collect();
        if zeros.iter().all(|&(_, k)| k == 1) {
            terms.push(format!("blaschke({})", list.join(", ")));
        } else {
            let mults: Vec<String> = zeros.iter().map(|&(_, k)| k.to_string()).collect();
            terms.push(format!(
                "blaschke({}; mult={})",
                list.join(", "),
                mults.join(",")
            ));
        }
    }
    terms.extend(f.sequences().iter().map(|_| "sequence".to_string()));
    for &(zeta, alpha) in f.atoms() {
        terms.push(format!(
            "atom({}, {})",
            print_complex(zeta),
            print_real(alpha)
        ));
    }
    if terms.is_empty() {
        "const(1)".into()
    } else {
        terms.join(" * ")
    }
}

pub fn print_map(m: &LinearFractionalMap) -> String {
    let c: Vec<String> = m.coefficients().iter().map(|&x| print_complex(x)).collect();
    format!("mobius({})", c.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mobius_example() {
        let m = parse_spec("mobius(2,1,1,2)").unwrap().into_map().unwrap();
        assert!((m.eval(c(1.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((m.eval(c(0.0, 0.0)).unwrap() - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn duplicate_zeros_merge() {
        let s = parse_spec("blaschke(0.5, 0.5; mult=1,2)").unwrap();
        assert_eq!(s.canonical(), "blaschke(0.5; mult=3)");
    }

    #[test]
    fn products_and_constants() {
        let s = parse_spec("atom(1, 2.0) * blaschke(0.3i)").unwrap();
        assert_eq!(s.canonical(), "blaschke(0.3i) * atom(1, 2)");
        assert_eq!(parse_spec("1").unwrap().canonical(), "const(1)");
        assert_eq!(parse_spec("z^2*z").unwrap().canonical(), "z^3");
        assert_eq!(
            parse_spec("const(-1) * blaschke(0)").unwrap().canonical(),
            "const(-1) * z"
        );
    }

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.3+0.4i").unwrap(), c(0.3, 0.4));
        assert_eq!(parse_complex("0.3 - 0.4i").unwrap(), c(0.3, -0.4));
        assert_eq!(parse_complex("-0.5i").unwrap(), c(0.0, -0.5));
        assert_eq!(parse_complex("1e-3").unwrap(), c(1e-3, 0.0));
        assert_eq!(parse_complex("2E+1-1e-1i").unwrap(), c(20.0, -0.1));
        let w = parse_complex("exp(ipi/3)").unwrap();
        assert!((w - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-16);
        let w = parse_complex("exp(-i2pi/3)").unwrap();
        assert!((w - Complex64::from_polar(1.0, -2.0 * PI / 3.0)).norm() < 1e-16);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_spec("blaschke(0.5,)") {
            Err(SpecError::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 14)),
            other => panic!("{other:?}"),
        }
        match parse_spec("z *\n  foo") {
            Err(SpecError::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_spec("mobius(1,0,0,2) x"),
            Err(SpecError::Syntax { .. })
        ));
        assert!(matches!(parse_spec("z^"), Err(SpecError::Syntax { .. })));
    }

    #[test]
    fn semantic_errors() {
        assert!(matches!(
            parse_spec("blaschke(1.5)"),
            Err(SpecError::Semantics(_))
        ));
        assert!(matches!(
            parse_spec("blaschke(0.5; mult=1,2)"),
            Err(SpecError::Semantics(_))
        ));
        assert!(matches!(
            parse_spec("atom(0.5, 1)"),
            Err(SpecError::Semantics(_))
        ));
        assert!(matches!(
            parse_spec("mobius(1,0,0,0.5)"),
            Err(SpecError::Semantics(_))
        ));
        assert!(matches!(
            parse_spec("autom(1, 2)"),
            Err(SpecError::Semantics(_))
        ));
        assert!(parse_spec("z").unwrap().into_map().is_err());
        assert!(parse_spec("rot(-1)").unwrap().into_inner().is_err());
    }

    #[test]
    fn canonical_maps_reparse() {
        for s in [
            "rot(-1)",
            "parabolic(b=2)",
            "parabolic(b=-3, zeta=exp(ipi/4))",
            "autom(1, 0.3+0.2i)",
        ] {
            let m = parse_spec(s).unwrap().into_map().unwrap();
            let again = parse_spec(&print_map(&m)).unwrap().into_map().unwrap();
            assert!(again.approx_eq(&m, 1e-15), "{s}");
        }
    }
}
