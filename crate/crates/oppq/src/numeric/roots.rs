use super::EnergyPolynomial;
use crate::{Error, Result};
use rug::Float;
use std::cmp::Ordering;

/// Real roots of a polynomial on an interval, ascending, with repeated
/// entries for multiple roots and the evaluation residual `|p(r)|` of each.
#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Float>,
    pub residuals: Vec<Float>,
}

impl RootSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.roots.iter().map(Float::to_f64).collect()
    }
}

struct Sturm {
    seq: Vec<EnergyPolynomial>,
}

impl Sturm {
    fn new(p: &EnergyPolynomial, zero_tol: &Float) -> Sturm {
        let mut seq = vec![normalized(p)];
        let d = p.derivative();
        if !d.is_zero() {
            seq.push(normalized(&d));
        }
        while seq.len() >= 2 && seq[seq.len() - 1].degree() > 0 {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]).expect("nonzero divisor");
            if r.is_zero() || r.max_abs_coeff() <= *zero_tol {
                break;
            }
            seq.push(normalized(&-&r));
        }
        Sturm { seq }
    }

    /// Greatest common divisor of `p` and `p'`, when nontrivial.
    fn gcd(&self) -> Option<&EnergyPolynomial> {
        let last = self.seq.last()?;
        (self.seq.len() > 1 && last.degree() > 0).then_some(last)
    }

    fn variations(&self, x: &Float) -> usize {
        let mut count = 0;
        let mut prev: Option<Ordering> = None;
        for s in &self.seq {
            let v = s.eval(x);
            match v.cmp0() {
                Some(Ordering::Equal) | None => {}
                Some(o) => {
                    if prev.is_some_and(|p| p != o) {
                        count += 1;
                    }
                    prev = Some(o);
                }
            }
        }
        count
    }
}

fn normalized(p: &EnergyPolynomial) -> EnergyPolynomial {
    let m = p.max_abs_coeff();
    if m.is_zero() {
        return p.clone();
    }
    let inv = Float::with_val(m.prec(), 1) / m;
    p.scale(&inv)
}

/// Roots of `p` counted with multiplicity in `(a, b]`.
fn total_count(p: &EnergyPolynomial, a: &Float, b: &Float, zero_tol: &Float) -> usize {
    if p.degree() == 0 {
        return 0;
    }
    let st = Sturm::new(p, zero_tol);
    let distinct = st.variations(a).saturating_sub(st.variations(b));
    if distinct == 0 {
        return 0;
    }
    distinct + st.gcd().map_or(0, |g| total_count(g, a, b, zero_tol))
}

struct Ctx {
    bits: u32,
    eps: Float,
    zero_tol: Float,
    merge: Float,
}

/// All real roots of `p` in `[lo, hi]`.
///
/// Roots are isolated with a Sturm sequence and polished by safeguarded
/// Newton iteration; roots of even multiplicity are refined by Sturm
/// bisection. Roots closer than `10^(-digits/4)` are merged and reported
/// with multiplicity.
pub fn real_roots(p: &EnergyPolynomial, lo: &Float, hi: &Float) -> Result<RootSet> {
    if p.is_zero() {
        return Err(Error::InvalidArgument("root search on the zero polynomial".into()));
    }
    if lo >= hi {
        return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
    }
    let prec = p.prec();
    let bits = prec.bits();
    if p.degree() == 0 {
        return Ok(RootSet { roots: vec![], residuals: vec![] });
    }

    let mut scale = Float::with_val(bits, lo.abs_ref());
    let h = Float::with_val(bits, hi.abs_ref());
    if h > scale {
        scale = h;
    }
    if scale < 1 {
        scale = Float::with_val(bits, 1);
    }
    let q = normalized(&p.rescale_argument(&scale));
    let widen = prec.tol(0.5);
    let a0 = Float::with_val(bits, lo / &scale) - &widen;
    let b0 = Float::with_val(bits, hi / &scale) + &widen;

    let ctx = Ctx {
        bits,
        eps: Float::with_val(bits, Float::i_exp(1, 6 - bits as i32)),
        zero_tol: prec.tol(0.6),
        merge: Float::with_val(bits, prec.tol(0.25) / &scale),
    };
    let st = Sturm::new(&q, &ctx.zero_tol);
    let dq = q.derivative();

    // (root in t, multiplicity)
    let mut found: Vec<(Float, usize)> = Vec::new();
    let mut stack = vec![(a0.clone(), st.variations(&a0), b0.clone(), st.variations(&b0))];
    while let Some((a, va, b, vb)) = stack.pop() {
        let n = va.saturating_sub(vb);
        if n == 0 {
            continue;
        }
        let width = Float::with_val(bits, &b - &a);
        if n == 1 {
            let r = refine(&q, &dq, &st, &a, &b, &ctx)?;
            let mult = 1 + st.gcd().map_or(0, |g| total_count(g, &a, &b, &ctx.zero_tol));
            found.push((r, mult));
        } else if width <= ctx.merge {
            let mid = Float::with_val(bits, &a + &b) / 2u32;
            let mult = total_count(&q, &a, &b, &ctx.zero_tol).max(n);
            found.push((mid, mult));
        } else {
            let mid = Float::with_val(bits, &a + &b) / 2u32;
            let vm = st.variations(&mid);
            stack.push((mid.clone(), vm, b, vb));
            stack.push((a, va, mid, vm));
        }
    }
    found.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal));

    let mut merged: Vec<(Float, usize)> = Vec::new();
    for (r, k) in found {
        if let Some((last, lk)) = merged.last_mut() {
            let gap = Float::with_val(bits, &r - &*last);
            let mag = Float::with_val(bits, r.abs_ref()).max(&Float::with_val(bits, 1));
            if gap <= Float::with_val(bits, &ctx.merge * &mag) {
                let total = *lk + k;
                *last = (Float::with_val(bits, &*last * *lk as u32) + Float::with_val(bits, &r * k as u32))
                    / total as u32;
                *lk = total;
                continue;
            }
        }
        merged.push((r, k));
    }

    let bound = prec.tol(0.5);
    let mut roots = Vec::new();
    let mut residuals = Vec::new();
    for (t, k) in merged {
        let e = Float::with_val(bits, &t * &scale);
        let res = Float::with_val(bits, p.eval(&e).abs_ref());
        let allowed = Float::with_val(bits, &bound * &p.eval_abs(&e));
        if k == 1 && res > allowed {
            return Err(Error::NonConvergence(format!(
                "root {} has residual {:e} above {:e}",
                e.to_f64(),
                res.to_f64(),
                allowed.to_f64()
            )));
        }
        for _ in 0..k {
            roots.push(e.clone());
            residuals.push(res.clone());
        }
    }
    Ok(RootSet { roots, residuals })
}

fn refine(
    q: &EnergyPolynomial,
    dq: &EnergyPolynomial,
    st: &Sturm,
    a: &Float,
    b: &Float,
    ctx: &Ctx,
) -> Result<Float> {
    let bits = ctx.bits;
    let fa = q.eval(a);
    let fb = q.eval(b);
    if fb.is_zero() {
        return Ok(b.clone());
    }
    let mut lo = a.clone();
    let mut hi = b.clone();
    let max_iter = 4 * bits as usize;

    if fa.cmp0() != fb.cmp0() && !fa.is_zero() {
        let lo_sign = fa.cmp0();
        let mut x = Float::with_val(bits, &lo + &hi) / 2u32;
        let mut last_width = Float::with_val(bits, &hi - &lo);
        for it in 0..max_iter {
            let f = q.eval(&x);
            if f.is_zero() {
                return Ok(x);
            }
            if f.cmp0() == lo_sign {
                lo.clone_from(&x);
            } else {
                hi.clone_from(&x);
            }
            let width = Float::with_val(bits, &hi - &lo);
            let tol = Float::with_val(bits, &ctx.eps * &Float::with_val(bits, x.abs_ref()).max(&ctx.eps));
            if width <= tol {
                return Ok(x);
            }
            let fp = dq.eval(&x);
            let mut next = None;
            if !fp.is_zero() {
                let step = Float::with_val(bits, &f / &fp);
                let cand = Float::with_val(bits, &x - &step);
                if cand > lo && cand < hi {
                    if Float::with_val(bits, step.abs_ref()) <= tol {
                        return Ok(cand);
                    }
                    next = Some(cand);
                }
            }
            // fall back to bisection when Newton leaves the bracket or stalls
            let stalled = it % 2 == 1 && width * 2u32 > last_width;
            x = match next {
                Some(c) if !stalled => c,
                _ => {
                    last_width = Float::with_val(bits, &hi - &lo);
                    Float::with_val(bits, &lo + &hi) / 2u32
                }
            };
        }
        return Err(Error::NonConvergence(format!(
            "bracket [{:e}, {:e}] did not shrink",
            lo.to_f64(),
            hi.to_f64()
        )));
    }

    // even multiplicity: no sign change, bisect on the Sturm count
    let mut vlo = st.variations(&lo);
    for _ in 0..max_iter {
        let width = Float::with_val(bits, &hi - &lo);
        let mid = Float::with_val(bits, &lo + &hi) / 2u32;
        let tol = Float::with_val(bits, &ctx.eps * &Float::with_val(bits, mid.abs_ref()).max(&ctx.eps));
        if width <= tol {
            return Ok(mid);
        }
        let vm = st.variations(&mid);
        if vlo > vm {
            hi = mid;
        } else {
            lo = mid;
            vlo = vm;
        }
    }
    Err(Error::NonConvergence("even-multiplicity bisection stalled".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Precision;

    fn p() -> Precision {
        Precision::default()
    }

    fn poly(c: &[i32]) -> EnergyPolynomial {
        EnergyPolynomial::from_coeffs(c.iter().map(|&x| p().float(x)).collect())
    }

    fn roots(c: &[i32], lo: i32, hi: i32) -> Vec<f64> {
        real_roots(&poly(c), &p().float(lo), &p().float(hi)).unwrap().to_f64()
    }

    #[test]
    fn quadratic() {
        assert_eq!(roots(&[-1, 0, 1], -2, 2), vec![-1.0, 1.0]);
    }

    #[test]
    fn triple_root_at_origin() {
        assert_eq!(roots(&[0, 0, 0, 1], -1, 1), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn double_roots() {
        // (E-1)^2 (E+2)^3 (E-3)
        let f = |r: i32| EnergyPolynomial::linear(p().float(-r), p().one());
        let mut q = EnergyPolynomial::one(p());
        for r in [1, 1, -2, -2, -2, 3] {
            q = &q * &f(r);
        }
        let rs = real_roots(&q, &p().float(-5), &p().float(5)).unwrap();
        assert_eq!(rs.to_f64(), vec![-2.0, -2.0, -2.0, 1.0, 1.0, 3.0]);
    }

    #[test]
    fn window_excludes_outside_roots() {
        assert_eq!(roots(&[-6, 11, -6, 1], 0, 2), vec![1.0, 2.0]);
        assert!(roots(&[1, 0, 1], -10, 10).is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let z = EnergyPolynomial::zero(p());
        assert!(real_roots(&z, &p().float(0), &p().float(1)).is_err());
        assert!(real_roots(&poly(&[1, 1]), &p().float(1), &p().float(0)).is_err());
    }

    #[test]
    fn nearly_coincident_roots_merge() {
        let eps = p().tol(0.3);
        let r1 = p().float(2);
        let r2 = Float::with_val(p().bits(), &r1 + &eps);
        let q = EnergyPolynomial::from_roots(&[r1, r2, p().float(-1)], p());
        let rs = real_roots(&q, &p().float(-3), &p().float(3)).unwrap();
        assert_eq!(rs.len(), 3);
        assert!((rs.roots[1].to_f64() - 2.0).abs() < 1e-15);
        assert_eq!(rs.roots[1], rs.roots[2]);
    }
}
