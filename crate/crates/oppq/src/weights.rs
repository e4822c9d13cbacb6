//! Positive reference weights and their power-moment tables.
//!
//! Every table holds even moments `m(ρ) = ∫ x^{2ρ} w(x) dx` over the weight's
//! support, i.e. ordinary moments in `ξ = x²` on the half line. Tables for the
//! sextic exponential weight are seeded by quadrature and extended by the
//! exact two-term recursion; the Bessis weight has a Gamma-function closed
//! form.

use crate::numeric::{det, exact_string, Precision};
use crate::{Error, Result};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WeightFamily {
    /// `exp(-√g (x⁴ + (b/g) x²) / s)`.
    SexticExp,
    /// `x^{2γ} exp(-x⁴/2)` on the half line.
    BdExp,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    pub family: WeightFamily,
    pub g: Float,
    pub b: Float,
    pub s_scale: Float,
    pub gamma: Float,
    /// Integrate over `x > 0` only (halves every moment of an even weight).
    pub half_line: bool,
}

impl WeightSpec {
    pub fn sextic(g: Float, b: Float, s_scale: Float) -> Result<Self> {
        if g <= 0 || s_scale <= 0 {
            return Err(Error::InvalidArgument("sextic weight needs g > 0 and s > 0".into()));
        }
        let gamma = Float::new(g.prec());
        Ok(WeightSpec { family: WeightFamily::SexticExp, g, b, s_scale, gamma, half_line: false })
    }

    pub fn on_half_line(mut self) -> Self {
        self.half_line = true;
        self
    }

    pub fn bd(gamma: Float) -> Result<Self> {
        if gamma <= -0.5 {
            return Err(Error::InvalidArgument(format!(
                "indicial exponent {} must exceed -1/2",
                gamma.to_f64()
            )));
        }
        let prec = gamma.prec();
        Ok(WeightSpec {
            family: WeightFamily::BdExp,
            g: Float::with_val(prec, 1),
            b: Float::new(prec),
            s_scale: Float::with_val(prec, 2),
            gamma,
            half_line: true,
        })
    }

    /// The `s` of the Bessis closed form, `γ = 2s - 1/2`.
    pub fn bd_s(&self) -> Float {
        Float::with_val(self.gamma.prec(), &self.gamma + 0.5) / 2u32
    }

    pub fn prec(&self) -> Precision {
        Precision::of(&self.g)
    }

    /// Weight value at `x`, evaluated in double precision.
    pub fn eval_f64(&self, x: f64) -> f64 {
        match self.family {
            WeightFamily::SexticExp => {
                let g = self.g.to_f64();
                let b = self.b.to_f64();
                let s = self.s_scale.to_f64();
                (-(g.sqrt()) / s * (x.powi(4) + b / g * x * x)).exp()
            }
            WeightFamily::BdExp => x.abs().powf(2.0 * self.gamma.to_f64()) * (-x.powi(4) / 2.0).exp(),
        }
    }
}

/// Finite prefix of the even power moments of a positive weight.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    pub values: Vec<Float>,
    pub weight: WeightSpec,
    /// Parity shift σ applied to the base table: `values[ρ] = m(ρ + σ)`.
    pub shift: usize,
}

impl MomentTable {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn prec(&self) -> Precision {
        self.weight.prec()
    }

    /// Hankel–Hadamard determinant `Δ_{k,j} = det[m(i+l+k)]_{i,l=0..j}`.
    pub fn hankel_det(&self, k: usize, j: usize) -> Result<Float> {
        hankel_det(&self.values, k, j)
    }

    /// Checks `m(ρ) > 0`, `Δ_{0,j} > 0` and `Δ_{1,j} > 0` over the table.
    /// Returns the first failing `(k, j)`, with `k = usize::MAX` flagging a
    /// non-positive moment `m(j)`.
    pub fn check_positivity(&self) -> std::result::Result<(), (usize, usize)> {
        if let Some(j) = self.values.iter().position(|v| *v <= 0) {
            return Err((usize::MAX, j));
        }
        for k in 0..2 {
            let mut j = 0;
            while 2 * j + k < self.values.len() {
                match self.hankel_det(k, j) {
                    Ok(d) if d > 0 => {}
                    _ => return Err((k, j)),
                }
                j += 1;
            }
        }
        Ok(())
    }

    /// `rho,value` CSV at full precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,value\n");
        for (r, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{r},{}", exact_string(v));
        }
        out
    }
}

pub fn hankel_det(m: &[Float], k: usize, j: usize) -> Result<Float> {
    let need = 2 * j + k + 1;
    if m.len() < need {
        return Err(Error::LengthError { needed: need, have: m.len() });
    }
    let mat: Vec<Vec<Float>> = (0..=j)
        .map(|i| (0..=j).map(|l| m[i + l + k].clone()).collect())
        .collect();
    Ok(det(&mat))
}

/// Moments of the sextic exponential weight. `m(0)`, `m(1)` come from
/// tanh-sinh quadrature; the rest from
/// `m(ρ+2) = s(2ρ+1)/(4√g) m(ρ) - b/(2g) m(ρ+1)`.
pub fn sextic_weight_moments(w: &WeightSpec, count: usize) -> Result<MomentTable> {
    if w.family != WeightFamily::SexticExp {
        return Err(Error::InvalidArgument("sextic moments need a sextic weight".into()));
    }
    if count < 2 {
        return Err(Error::LengthError { needed: 2, have: count });
    }
    let prec = w.prec();
    let bits = prec.bits();
    let mut values = vec![sextic_quadrature(w, 0)?, sextic_quadrature(w, 1)?];
    let sg = Float::with_val(bits, w.g.sqrt_ref());
    let b_over = Float::with_val(bits, &w.b / &w.g) / 2u32;
    for r in 0..count.saturating_sub(2) {
        let c0 = Float::with_val(bits, &w.s_scale * (2 * r as u32 + 1)) / 4u32 / &sg;
        let next = c0 * &values[r] - Float::with_val(bits, &b_over * &values[r + 1]);
        values.push(next);
    }
    values.truncate(count);
    Ok(MomentTable { values, weight: w.clone(), shift: 0 })
}

/// `∫ x^{2ρ} w(x) dx` by tanh-sinh quadrature over `|x| <= R`, with `R`
/// chosen so that the neglected tail is below `10^(-digits-5)`.
pub fn sextic_quadrature(w: &WeightSpec, rho: usize) -> Result<Float> {
    let prec = w.prec();
    let work = prec.raised(10);
    let bits = work.bits();
    let g = work.float(&w.g);
    let b = work.float(&w.b);
    let s = work.float(&w.s_scale);
    let a = Float::with_val(bits, g.sqrt_ref()) / &s; // coefficient of x⁴
    let c = Float::with_val(bits, &b / &g) * &a; // coefficient of x²
    let ln10 = work.float(10).ln();

    // solve a u² + c u = T for u = R², growing T for the x^{2ρ} factor
    let mut r_cut = work.float(1);
    for _ in 0..4 {
        let lnr = Float::with_val(bits, r_cut.ln_ref()).max(&work.zero());
        let t = Float::with_val(bits, &ln10 * (prec.digits() + 5)) + lnr * (2 * rho as u32) + 5u32;
        let disc = Float::with_val(bits, &c * &c) + Float::with_val(bits, &a * &t) * 4u32;
        let u = (disc.sqrt() - &c) / Float::with_val(bits, &a * 2u32);
        r_cut = u.sqrt();
    }

    let integrand = |x: &Float| -> Float {
        let x2 = Float::with_val(bits, x * x);
        let e = Float::with_val(bits, &a * &x2) * &x2 + Float::with_val(bits, &c * &x2);
        let pw = x2.clone().pow(rho as u32);
        pw * (-e).exp()
    };
    let tol = work.float(prec.tol(1.0)) / 100u32;
    let half = tanh_sinh(&integrand, &r_cut, work, &tol).ok_or(Error::SeedFailure { rho })?;
    let total = if w.half_line { half } else { half * 2u32 };
    Ok(prec.float(total))
}

/// Tanh-sinh quadrature of `f` over `[0, r]`, refined by step halving until
/// successive levels agree to the working precision.
/// `prec` is the working precision; `tol` the relative agreement required.
fn tanh_sinh(f: &dyn Fn(&Float) -> Float, r: &Float, prec: Precision, tol: &Float) -> Option<Float> {
    let bits = prec.bits();
    let pi_half = Float::with_val(bits, Constant::Pi) / 2u32;
    let tiny = prec.tol(1.0);

    // node and weight at t: x = r / (1 + e^{-π sinh t}), dx/dt = r π cosh t q / (1+q)², q = e^{-π sinh t}
    let term = |t: &Float| -> Float {
        let sh = Float::with_val(bits, t.sinh_ref());
        let ch = Float::with_val(bits, t.cosh_ref());
        let q = (-Float::with_val(bits, &sh * &pi_half) * 2u32).exp();
        let one_q = Float::with_val(bits, &q + 1u32);
        let x = Float::with_val(bits, r / &one_q);
        let wt = Float::with_val(bits, r * &ch) * &pi_half * 2u32 * &q / Float::with_val(bits, one_q.square_ref());
        wt * f(&x)
    };

    let sum_side = |h: &Float, start: usize, stride: usize, sign: i32| -> Float {
        let mut s = Float::new(bits);
        let mut k = start;
        let mut small = 0;
        loop {
            let t = Float::with_val(bits, h * (k as u32)) * sign;
            let v = term(&t);
            let mag = Float::with_val(bits, v.abs_ref());
            s += v;
            if mag < tiny {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
            k += stride;
            if k > 1 << 16 {
                break;
            }
        }
        s
    };

    let mut h = Float::with_val(bits, 0.5);
    let mut sum = term(&Float::new(bits)) + sum_side(&h, 1, 1, 1) + sum_side(&h, 1, 1, -1);
    let mut prev = Float::with_val(bits, &sum * &h);
    for _ in 0..14 {
        h /= 2u32;
        sum += sum_side(&h, 1, 2, 1) + sum_side(&h, 1, 2, -1);
        let est = Float::with_val(bits, &sum * &h);
        let diff = Float::with_val(bits, &est - &prev).abs();
        if diff <= Float::with_val(bits, est.abs_ref()) * tol {
            return Some(est);
        }
        prev = est;
    }
    None
}

/// Closed-form moments `m(ρ) = ¼ 2^{ρ/2+s} Γ(ρ/2+s)` of the Bessis weight.
pub fn bd_weight_moments(w: &WeightSpec, count: usize) -> Result<MomentTable> {
    if w.family != WeightFamily::BdExp {
        return Err(Error::InvalidArgument("Bessis moments need a BD weight".into()));
    }
    let prec = w.prec();
    let bits = prec.bits();
    let s = w.bd_s();
    let values = (0..count)
        .map(|r| {
            let a = Float::with_val(bits, r as u32) / 2u32 + &s;
            let two = Float::with_val(bits, 2).pow(&a);
            two * a.gamma() / 4u32
        })
        .collect();
    Ok(MomentTable { values, weight: w.clone(), shift: 0 })
}

/// Shifted table `m_σ(ρ) = m(ρ + σ)`.
pub fn parity_weight_moments(base: &MomentTable, sigma: usize, count: usize) -> Result<MomentTable> {
    let need = count + sigma;
    if base.len() < need {
        return Err(Error::LengthError { needed: need, have: base.len() });
    }
    Ok(MomentTable {
        values: base.values[sigma..need].to_vec(),
        weight: base.weight.clone(),
        shift: base.shift + sigma,
    })
}

/// Moments of the even weight over all powers, `w(2ρ) = m(ρ)`, `w(2ρ+1) = 0`.
pub fn interleave_full_line(base: &MomentTable, count: usize) -> Result<Vec<Float>> {
    let need = count.div_ceil(2);
    if base.len() < need {
        return Err(Error::LengthError { needed: need, have: base.len() });
    }
    let bits = base.prec().bits();
    Ok((0..count)
        .map(|p| if p % 2 == 0 { base.values[p / 2].clone() } else { Float::new(bits) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    fn close(a: &Float, b: &Float, rel: &Float) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        d <= Float::with_val(a.prec(), b.abs_ref()) * rel
    }

    #[test]
    fn quartic_ratio_without_quadratic_term() {
        // s(2ρ+1)/(4√g) = 1 at ρ=0, s=4; independently 4 Γ(5/4)/Γ(1/4) = 1
        let w = WeightSpec::sextic(p().float(1), p().float(0), p().float(4)).unwrap();
        let t = sextic_weight_moments(&w, 6).unwrap();
        let r = Float::with_val(p().bits(), &t.values[2] / &t.values[0]);
        assert!(close(&r, &p().float(1), &p().tol(0.5)));
        let w2 = WeightSpec::sextic(p().float(1), p().float(0), p().float(1)).unwrap();
        let t2 = sextic_weight_moments(&w2, 3).unwrap();
        let r2 = Float::with_val(p().bits(), &t2.values[2] / &t2.values[0]);
        assert!(close(&r2, &p().float(0.25), &p().tol(0.5)));
    }

    #[test]
    fn pure_quartic_matches_gamma_form() {
        // ∫ x^{2ρ} e^{-a x⁴} dx = ½ a^{-(2ρ+1)/4} Γ((2ρ+1)/4)
        let w = WeightSpec::sextic(p().float(1), p().float(0), p().float(2)).unwrap();
        let t = sextic_weight_moments(&w, 8).unwrap();
        for (r, v) in t.values.iter().enumerate() {
            let e = p().float(2 * r as u32 + 1) / 4u32;
            let exact = p().float(2).pow(&e) * Float::with_val(p().bits(), e.gamma_ref()) / 2u32;
            assert!(close(v, &exact, &p().tol(0.9)), "rho={r}");
        }
    }

    #[test]
    fn seed_matches_bessel_closed_form() {
        // (e/2)^{1/4} K_{1/4}(1/4), evaluated independently to 60 digits
        let w = WeightSpec::sextic(p().float(1), p().parse("sqrt(8)").unwrap(), p().float(4)).unwrap();
        let m0 = sextic_quadrature(&w, 0).unwrap();
        let bessel = p()
            .parse("1.76753139940699684178635867207611409386168306428982777364817")
            .unwrap();
        assert!(close(&m0, &bessel, &p().tol(0.95)));
        let m1 = sextic_quadrature(&w, 1).unwrap();
        let ref1 = p()
            .parse("0.723909492571262123601088301550509364931552654333502641948184")
            .unwrap();
        assert!(close(&m1, &ref1, &p().tol(0.95)));
    }

    #[test]
    fn recursion_step_with_quadratic_term() {
        let b = p().parse("sqrt(8)").unwrap();
        let w = WeightSpec::sextic(p().float(1), b, p().float(4)).unwrap();
        let t = sextic_weight_moments(&w, 3).unwrap();
        // m(2) = m(0) - (√8/2) m(1)
        let r2 = p().parse("sqrt(2)").unwrap();
        let expect = t.values[0].clone() - r2 * &t.values[1];
        assert!(close(&t.values[2], &expect, &p().tol(0.9)));
    }

    #[test]
    fn recursion_agrees_with_quadrature() {
        for (b, s) in [("sqrt(8)", 4), ("sqrt(8)", 2), ("-1/2", 4), ("3", 2)] {
            let w = WeightSpec::sextic(p().float(1), p().parse(b).unwrap(), p().float(s)).unwrap();
            let t = sextic_weight_moments(&w, 7).unwrap();
            for r in 0..=6 {
                let q = sextic_quadrature(&w, r).unwrap();
                assert!(close(&t.values[r], &q, &p().tol(0.5)), "b={b} s={s} rho={r}");
            }
        }
    }

    #[test]
    fn bd_closed_form_values() {
        let w = WeightSpec::bd(p().float(1.5)).unwrap();
        let t = bd_weight_moments(&w, 4).unwrap();
        assert!(close(&t.values[0], &p().float(0.5), &p().tol(0.95)));
        assert!(close(&t.values[2], &p().float(1), &p().tol(0.95)));
    }

    #[test]
    fn bd_closed_form_matches_quadrature() {
        // x^{2γ} e^{-x⁴/2} with γ = 3/2: compare m(1) to direct tanh-sinh
        let w = WeightSpec::bd(p().float(1.5)).unwrap();
        let t = bd_weight_moments(&w, 3).unwrap();
        let work = p().raised(10);
        let bits = work.bits();
        let f = |x: &Float| -> Float {
            let x2 = Float::with_val(bits, x * x);
            let x4 = Float::with_val(bits, x2.square_ref());
            let pw = x2.clone() * x2.clone().pow(3u32).sqrt();
            pw * (-x4 / 2u32).exp()
        };
        let q = tanh_sinh(&f, &work.float(6), work, &work.float(p().tol(1.0))).unwrap();
        assert!(close(&t.values[1], &p().float(q), &p().tol(0.9)));
        let s = w.bd_s();
        assert_eq!(s, 1);
    }

    #[test]
    fn parity_shift() {
        let w = WeightSpec::bd(p().float(1.5)).unwrap();
        let base = bd_weight_moments(&w, 6).unwrap();
        assert_eq!(parity_weight_moments(&base, 0, 6).unwrap().values, base.values);
        let shifted = parity_weight_moments(&base, 1, 5).unwrap();
        assert_eq!(shifted.values, base.values[1..6].to_vec());
        assert!(parity_weight_moments(&base, 1, 6).is_err());
        let tiny = MomentTable { values: base.values[..3].to_vec(), ..base.clone() };
        assert_eq!(parity_weight_moments(&tiny, 1, 2).unwrap().values, base.values[1..3].to_vec());
    }

    #[test]
    fn rejects_invalid_weights() {
        assert!(WeightSpec::bd(p().float(-0.5)).is_err());
        assert!(WeightSpec::sextic(p().float(0), p().float(0), p().float(4)).is_err());
    }

    #[test]
    fn hankel_positivity_and_negative_control() {
        let w = WeightSpec::sextic(p().float(1), p().parse("sqrt(8)").unwrap(), p().float(2)).unwrap();
        let t = sextic_weight_moments(&w, 30).unwrap();
        assert_eq!(t.check_positivity(), Ok(()));
        let mut bad = t.clone();
        bad.values[3] = -bad.values[3].clone();
        assert!(bad.check_positivity().is_err());
    }

    #[test]
    fn csv_export() {
        let w = WeightSpec::bd(p().float(1.5)).unwrap();
        let t = bd_weight_moments(&w, 3).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("rho,value\n0,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
