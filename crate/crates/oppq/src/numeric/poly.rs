use super::Precision;
use crate::{Error, Result};
use rug::{Assign, Float};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Dense polynomial in the energy variable, lowest power first.
///
/// Exact zero leading coefficients are trimmed on construction, so the
/// coefficient list is never empty and its last entry is nonzero unless the
/// polynomial is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyPolynomial {
    coeffs: Vec<Float>,
}

impl EnergyPolynomial {
    pub fn zero(prec: Precision) -> Self {
        EnergyPolynomial { coeffs: vec![prec.zero()] }
    }

    pub fn constant(c: Float) -> Self {
        EnergyPolynomial { coeffs: vec![c] }
    }

    pub fn one(prec: Precision) -> Self {
        Self::constant(prec.one())
    }

    /// The polynomial `E`.
    pub fn var(prec: Precision) -> Self {
        EnergyPolynomial { coeffs: vec![prec.zero(), prec.one()] }
    }

    /// `c0 + c1 E`.
    pub fn linear(c0: Float, c1: Float) -> Self {
        Self::from_coeffs(vec![c0, c1])
    }

    pub fn from_coeffs(coeffs: Vec<Float>) -> Self {
        assert!(!coeffs.is_empty(), "coefficient list must be non-empty");
        let mut p = EnergyPolynomial { coeffs };
        p.trim();
        p
    }

    /// Monic polynomial with the given roots, repeated roots allowed.
    pub fn from_roots(roots: &[Float], prec: Precision) -> Self {
        roots.iter().fold(Self::one(prec), |acc, r| {
            &acc * &Self::linear(-r.clone(), prec.one())
        })
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(Float::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn prec(&self) -> Precision {
        Precision::of(&self.coeffs[0])
    }

    fn bits(&self) -> u32 {
        self.coeffs[0].prec()
    }

    pub fn coeffs(&self) -> &[Float] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Float {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Float::new(self.bits()))
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &Float {
        self.coeffs.last().expect("non-empty")
    }

    pub fn max_abs_coeff(&self) -> Float {
        let mut m = Float::new(self.bits());
        for c in &self.coeffs {
            if c.cmp_abs(&m) == Some(std::cmp::Ordering::Greater) {
                m = Float::with_val(self.bits(), c.abs_ref());
            }
        }
        m
    }

    pub fn eval(&self, x: &Float) -> Float {
        let mut acc = Float::new(self.bits().max(x.prec()));
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// `sum |a_k| |x|^k`, the rounding scale of [`eval`](Self::eval) at `x`.
    pub fn eval_abs(&self, x: &Float) -> Float {
        let ax = Float::with_val(x.prec(), x.abs_ref());
        let mut acc = Float::new(self.bits().max(x.prec()));
        for c in self.coeffs.iter().rev() {
            acc *= &ax;
            acc += Float::with_val(c.prec(), c.abs_ref());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(self.prec());
        }
        let d = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(k, c)| Float::with_val(self.bits(), c * (k as u32 + 1)))
            .collect();
        Self::from_coeffs(d)
    }

    pub fn scale(&self, c: &Float) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .map(|a| Float::with_val(self.bits(), a * c))
                .collect(),
        )
    }

    /// Multiplication by `E`.
    pub fn mul_var(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = Vec::with_capacity(self.coeffs.len() + 1);
        v.push(Float::new(self.bits()));
        v.extend(self.coeffs.iter().cloned());
        EnergyPolynomial { coeffs: v }
    }

    /// `p(s t)` as a polynomial in `t`.
    pub fn rescale_argument(&self, s: &Float) -> Self {
        let mut pow = Float::with_val(self.bits(), 1);
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            v.push(Float::with_val(self.bits(), c * &pow));
            pow *= s;
        }
        Self::from_coeffs(v)
    }

    /// Polynomial long division `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::InvalidArgument("division by the zero polynomial".into()));
        }
        let bits = self.bits();
        let n = self.degree();
        let m = d.degree();
        if n < m || self.is_zero() {
            return Ok((Self::zero(self.prec()), self.clone()));
        }
        let mut r: Vec<Float> = self.coeffs.clone();
        let mut q = vec![Float::new(bits); n - m + 1];
        let lead = d.leading();
        for k in (0..=n - m).rev() {
            let f = Float::with_val(bits, &r[k + m] / lead);
            for (j, dc) in d.coeffs.iter().enumerate() {
                let t = Float::with_val(bits, &f * dc);
                r[k + j] -= t;
            }
            r[k + m] = Float::new(bits);
            q[k] = f;
        }
        r.truncate(m.max(1));
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }

    /// Drops leading coefficients whose contribution over `|E| <= scale` is
    /// below `rel` times the largest term there. Cancellation in assembled
    /// determinants leaves such residue above the true degree.
    pub fn trim_relative(&self, scale: &Float, rel: &Float) -> Self {
        let bits = self.bits();
        let mut pow = Float::with_val(bits, 1);
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            terms.push(Float::with_val(bits, c.abs_ref()) * &pow);
            pow *= scale;
        }
        let mut big = Float::new(bits);
        for t in &terms {
            if *t > big {
                big.clone_from(t);
            }
        }
        let cut = Float::with_val(bits, &big * rel);
        let mut len = self.coeffs.len();
        while len > 1 && terms[len - 1] <= cut {
            len -= 1;
        }
        Self::from_coeffs(self.coeffs[..len].to_vec())
    }
}

impl fmt::Display for EnergyPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && !(first && k == 0) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let v = c.to_string_radix(10, Some(12));
            match k {
                0 => write!(f, "{v}")?,
                1 => write!(f, "({v})E")?,
                _ => write!(f, "({v})E^{k}")?,
            }
        }
        Ok(())
    }
}

fn combine(a: &EnergyPolynomial, b: &EnergyPolynomial, sub: bool) -> EnergyPolynomial {
    let bits = a.bits().max(b.bits());
    let n = a.coeffs.len().max(b.coeffs.len());
    let mut v = Vec::with_capacity(n);
    for k in 0..n {
        let mut c = Float::new(bits);
        if let Some(x) = a.coeffs.get(k) {
            c += x;
        }
        if let Some(y) = b.coeffs.get(k) {
            if sub {
                c -= y;
            } else {
                c += y;
            }
        }
        v.push(c);
    }
    EnergyPolynomial::from_coeffs(v)
}

impl Add for &EnergyPolynomial {
    type Output = EnergyPolynomial;
    fn add(self, rhs: Self) -> EnergyPolynomial {
        combine(self, rhs, false)
    }
}

impl Sub for &EnergyPolynomial {
    type Output = EnergyPolynomial;
    fn sub(self, rhs: Self) -> EnergyPolynomial {
        combine(self, rhs, true)
    }
}

impl Mul for &EnergyPolynomial {
    type Output = EnergyPolynomial;
    fn mul(self, rhs: Self) -> EnergyPolynomial {
        let bits = self.bits().max(rhs.bits());
        if self.is_zero() || rhs.is_zero() {
            return EnergyPolynomial::zero(Precision::from_bits(bits));
        }
        let mut v = vec![Float::new(bits); self.coeffs.len() + rhs.coeffs.len() - 1];
        let mut t = Float::new(bits);
        for (i, x) in self.coeffs.iter().enumerate() {
            for (j, y) in rhs.coeffs.iter().enumerate() {
                t.assign(x * y);
                v[i + j] += &t;
            }
        }
        EnergyPolynomial::from_coeffs(v)
    }
}

impl Neg for &EnergyPolynomial {
    type Output = EnergyPolynomial;
    fn neg(self) -> EnergyPolynomial {
        EnergyPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for EnergyPolynomial {
            type Output = EnergyPolynomial;
            fn $m(self, rhs: Self) -> EnergyPolynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);


#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn poly(c: &[i32]) -> EnergyPolynomial {
        EnergyPolynomial::from_coeffs(c.iter().map(|&x| p().float(x)).collect())
    }

    #[test]
    fn product_of_linear_factors() {
        assert_eq!(&poly(&[1, 1]) * &poly(&[-1, 1]), poly(&[-1, 0, 1]));
    }

    #[test]
    fn additive_identity() {
        let a = poly(&[3, -2, 5]);
        assert_eq!(&a + &EnergyPolynomial::zero(p()), a);
    }

    #[test]
    fn scaling_identity() {
        let half = p().float(0.5);
        assert_eq!(poly(&[0, 2]).scale(&half), EnergyPolynomial::var(p()));
    }

    #[test]
    fn trims_cancelled_leading_terms() {
        let a = poly(&[1, 2, 3]);
        let b = poly(&[0, 1, 3]);
        let d = &a - &b;
        assert_eq!(d.degree(), 1);
        assert!((&a - &a).is_zero());
        assert_eq!((&a - &a).degree(), 0);
    }

    #[test]
    fn division_recovers_factors() {
        let a = poly(&[2, -3, 1]);
        let b = poly(&[5, 0, 0, 1]);
        let prod = &(&a * &b) + &poly(&[1, 1]);
        let (q, r) = prod.div_rem(&a).unwrap();
        assert_eq!(q, b);
        assert_eq!(r, poly(&[1, 1]));
        assert!(prod.div_rem(&EnergyPolynomial::zero(p())).is_err());
    }

    #[test]
    fn derivative_and_eval() {
        let a = poly(&[1, -4, 0, 2]);
        assert_eq!(a.derivative(), poly(&[-4, 0, 6]));
        assert_eq!(a.eval(&p().float(2)), 9);
        assert_eq!(a.eval_abs(&p().float(-2)), 25);
    }

    #[test]
    fn relative_trim_drops_residue_only() {
        let tiny = p().tol(0.9);
        let mut c: Vec<Float> = [1, 2, 3].iter().map(|&x| p().float(x)).collect();
        c.push(tiny);
        let noisy = EnergyPolynomial::from_coeffs(c);
        let t = noisy.trim_relative(&p().float(100), &p().tol(0.5));
        assert_eq!(t, poly(&[1, 2, 3]));
        let t = poly(&[1, 2, 3]).trim_relative(&p().float(100), &p().tol(0.5));
        assert_eq!(t.degree(), 2);
    }

    #[test]
    fn rescaled_argument() {
        let a = poly(&[1, 1, 1]);
        let s = p().float(2);
        assert_eq!(a.rescale_argument(&s), poly(&[1, 2, 4]));
    }
}
