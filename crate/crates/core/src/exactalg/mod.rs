//! Exact rational arithmetic and sparse multivariate Laurent polynomials.
//!
//! Coefficients are arbitrary-precision rationals. The variable universe is
//! fixed (`x`, `q1..qN`, `r`, `u`, `ε`, `ĝ`); only `r` may carry negative
//! exponents. Every symbolic module builds on [`MultiPoly`].

mod parse;
mod poly;

pub use poly::{Geometry, MultiPoly};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

/// Exact rational number.
pub type Rational = BigRational;

/// Build a rational from a numerator and denominator.
///
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Integer as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest `f64` to a rational.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Ratio of huge integers: scale down by the common bit length first.
        let n = q.numer();
        let d = q.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(1000);
        let nf = (n >> shift).to_f64().unwrap_or(f64::NAN);
        let df = (d >> shift).to_f64().unwrap_or(f64::NAN);
        nf / df
    })
}

/// Canonical text for a rational: `3`, `-3/4`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Physicists' Hermite polynomial `H_l` in `v`, from
/// `H_{l+1} = 2v H_l - 2l H_{l-1}`.
pub fn hermite(l: usize, v: Var) -> MultiPoly {
    let vars = [v];
    let x = MultiPoly::var(&vars, v).expect("own variable");
    let two = int(2);
    let (mut prev, mut cur) = (MultiPoly::zero(&vars), MultiPoly::one(&vars));
    for k in 0..l {
        let next = &x.scale(&two) * &cur - prev.scale(&int(2 * k as i64));
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

pub(crate) fn is_unit(q: &Rational) -> bool {
    q.abs().is_one()
}

pub(crate) fn is_zero(q: &Rational) -> bool {
    q.is_zero()
}

/// Symbols available to polynomials, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X,
    /// Normal coordinate `q_i`, 1-based.
    Q(u16),
    R,
    U,
    Eps,
    /// Inverse coupling `ĝ = 1/g`.
    GInv,
}

impl Var {
    /// Only `r` may carry negative exponents.
    pub fn is_laurent(self) -> bool {
        matches!(self, Var::R)
    }

    pub fn name(self) -> String {
        match self {
            Var::X => "x".into(),
            Var::Q(i) => format!("q{i}"),
            Var::R => "r".into(),
            Var::U => "u".into(),
            Var::Eps => "ε".into(),
            Var::GInv => "ĝ".into(),
        }
    }

    /// Accepts canonical names plus the ASCII spellings `eps` and `ghat`.
    pub fn from_name(s: &str) -> Option<Var> {
        match s {
            "x" => Some(Var::X),
            "r" => Some(Var::R),
            "u" => Some(Var::U),
            "ε" | "eps" => Some(Var::Eps),
            "ĝ" | "ghat" => Some(Var::GInv),
            _ => {
                let rest = s.strip_prefix('q')?;
                let i: u16 = rest.parse().ok()?;
                (i >= 1).then_some(Var::Q(i))
            }
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("variable-set mismatch: [{left}] vs [{right}]")]
    VarMismatch { left: String, right: String },
    #[error("negative exponent on non-Laurent variable {0}")]
    NegativeExponent(String),
    #[error("variable {0} is not in the polynomial's variable set")]
    MissingVar(String),
    #[error("r^-1 term in integrand; angular coefficient {0}")]
    LogSingularity(String),
    #[error("geometry {geometry} needs variable {var}")]
    Geometry { geometry: String, var: String },
    #[error("division by a non-constant or zero polynomial")]
    BadDivision,
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub(crate) fn var_list(vars: &[Var]) -> String {
    vars.iter().map(|v| v.name()).collect::<Vec<_>>().join(", ")
}

/// Sign-aware helper used by the renderer.
pub(crate) fn is_negative(q: &Rational) -> bool {
    q.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_low_orders() {
        assert_eq!(hermite(0, Var::X).to_string(), "1");
        assert_eq!(hermite(3, Var::X), MultiPoly::parse("8*x^3 - 12*x").unwrap());
        assert_eq!(hermite(4, Var::X), MultiPoly::parse("16*x^4 - 48*x^2 + 12").unwrap());
    }
}
