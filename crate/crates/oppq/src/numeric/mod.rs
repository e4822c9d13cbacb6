//! Working-precision scalars, dense polynomials in the energy variable and
//! real-root extraction.

mod linalg;
mod poly;
mod roots;

pub use linalg::{det, null_vector, poly_det};
pub use poly::EnergyPolynomial;
pub use roots::{real_roots, RootSet};

use crate::{Error, Result};
use rug::float::Round;
use rug::ops::Pow;
use rug::{Assign, Float, Integer};
use serde::{Deserialize, Serialize};

const LOG2_10: f64 = std::f64::consts::LOG2_10;
const GUARD_BITS: u32 = 8;

/// Working precision of a computation session, in decimal digits.
///
/// Every scalar created through a session carries the matching binary
/// precision, so results are reproducible for a fixed setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    digits: u32,
}

impl Precision {
    pub const DEFAULT_DIGITS: u32 = 60;
    pub const MIN_DIGITS: u32 = 30;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::InvalidPrecision(digits));
        }
        Ok(Precision { digits })
    }

    /// Precision from `OPPQ_DIGITS`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var("OPPQ_DIGITS") {
            Ok(v) => {
                let d = v
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("OPPQ_DIGITS={v}")))?;
                Self::new(d)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    /// Precision that a scalar of the given binary precision was made with.
    pub fn of(x: &Float) -> Self {
        Self::from_bits(x.prec())
    }

    pub fn from_bits(bits: u32) -> Self {
        let d = (f64::from(bits.saturating_sub(GUARD_BITS)) / LOG2_10).floor() as u32;
        Precision { digits: d.max(1) }
    }

    pub fn digits(self) -> u32 {
        self.digits
    }

    pub fn bits(self) -> u32 {
        (f64::from(self.digits) * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// The same session with `extra` more digits.
    pub fn raised(self, extra: u32) -> Self {
        Precision { digits: self.digits + extra }
    }

    pub fn float<T>(self, v: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), v)
    }

    pub fn zero(self) -> Float {
        Float::new(self.bits())
    }

    pub fn one(self) -> Float {
        self.float(1)
    }

    /// `10^(-digits * frac)`, the tolerance scale used throughout.
    pub fn tol(self, frac: f64) -> Float {
        let e = -(f64::from(self.digits) * frac);
        let ten = self.float(10);
        ten.pow(&self.float(e))
    }

    /// Parses a decimal literal, a fraction `p/q`, or `sqrt(x)` at this
    /// precision. A leading minus sign applies to the whole expression.
    pub fn parse(self, src: &str) -> Result<Float> {
        let s = src.trim();
        if let Some(rest) = s.strip_prefix('-') {
            return Ok(-self.parse(rest)?);
        }
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let v = self.parse(inner)?;
            if v < 0 {
                return Err(Error::Parse(format!("negative radicand in {src:?}")));
            }
            return Ok(v.sqrt());
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = self.parse(num)?;
            let d = self.parse(den)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {src:?}")));
            }
            return Ok(n / d);
        }
        let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("{src:?}: {e}")))?;
        Ok(self.float(parsed))
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision { digits: Self::DEFAULT_DIGITS }
    }
}

/// Shortest decimal string that reads back to exactly `x` at its precision.
pub fn exact_string(x: &Float) -> String {
    x.to_string_radix(10, None)
}

/// Reads a value written by [`exact_string`] at the given precision.
pub fn parse_exact(s: &str, prec: Precision) -> Result<Float> {
    let p = Float::parse(s).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    Ok(Float::with_val(prec.bits(), p))
}

/// Fixed-point decimal rendering with `decimals` fractional digits,
/// truncated toward zero like the printed tables it is compared with.
pub fn fixed(x: &Float, decimals: usize) -> String {
    let scale = Float::with_val(x.prec(), 10).pow(decimals as u32);
    let scaled = Float::with_val(x.prec(), x * &scale);
    let int = scaled
        .to_integer_round(Round::Zero)
        .map(|(i, _)| i)
        .unwrap_or_else(Integer::new);
    let neg = int < 0 || (int == 0 && x.is_sign_negative() && !x.is_zero());
    let digits = int.abs().to_string();
    let padded = format!("{:0>width$}", digits, width = decimals + 1);
    let (a, b) = padded.split_at(padded.len() - decimals);
    let sign = if neg { "-" } else { "" };
    if decimals == 0 {
        format!("{sign}{a}")
    } else {
        format!("{sign}{a}.{b}")
    }
}

/// Rounded fixed-point rendering, used for human-readable tables.
pub fn rounded(x: &Float, decimals: usize) -> String {
    format!("{:.*}", decimals, x.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_bounds() {
        assert_eq!(Precision::new(50).unwrap().digits(), 50);
        assert_eq!(Precision::new(200).unwrap().digits(), 200);
        assert_eq!(Precision::new(29), Err(Error::InvalidPrecision(29)));
        assert_eq!(Precision::new(30).unwrap().digits(), 30);
    }

    #[test]
    fn bits_round_trip() {
        for d in [30, 31, 45, 60, 61, 100, 200] {
            let p = Precision::new(d).unwrap();
            assert_eq!(Precision::from_bits(p.bits()), p);
            assert_eq!(Precision::of(&p.one()), p);
        }
    }

    #[test]
    fn parses_expressions() {
        let p = Precision::default();
        let r8 = p.parse("sqrt(8)").unwrap();
        let sq = Float::with_val(p.bits(), &r8 * &r8);
        assert!((sq - 8u32).abs() < p.tol(0.95));
        assert_eq!(p.parse("-13").unwrap(), -13);
        assert_eq!(p.parse("3/2").unwrap(), 1.5);
        assert_eq!(p.parse("-sqrt(4)").unwrap(), -2);
        assert!(p.parse("sqrt(-1)").is_err());
        assert!(p.parse("1/0").is_err());
        assert!(p.parse("abc").is_err());
    }

    #[test]
    fn fixed_truncates() {
        let p = Precision::default();
        assert_eq!(fixed(&p.parse("-4.70163122").unwrap(), 6), "-4.701631");
        assert_eq!(fixed(&p.parse("2.2898500246").unwrap(), 6), "2.289850");
        assert_eq!(fixed(&p.parse("-0.0000004").unwrap(), 6), "-0.000000");
        assert_eq!(fixed(&p.parse("12").unwrap(), 2), "12.00");
    }

    #[test]
    fn exact_string_round_trips() {
        let p = Precision::default();
        let x = p.parse("sqrt(2)").unwrap() / 7u32;
        let back = parse_exact(&exact_string(&x), p).unwrap();
        assert_eq!(back, x);
    }
}
