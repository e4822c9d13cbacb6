//! Piecewise Taylor-series integration of the radial equation in arbitrary
//! precision.
//!
//! Whole-line potentials integrate `ψ'' = (V - E) ψ` directly. The singular
//! half-line case integrates `y = ψ x^{-γ}`, which obeys
//! `y'' = -(2γ/x) y' + (W - E) y`; its Frobenius series at the origin is
//! regular.

use super::Hamiltonian;
use crate::numeric::Precision;
use crate::{Error, Result};
use rug::Float;

#[derive(Clone, Debug)]
pub(crate) struct Step {
    pub x0: Float,
    pub h: Float,
    /// `y(x0 + t) = Σ a_k t^k`.
    pub a: Vec<Float>,
}

#[derive(Clone, Debug)]
pub(crate) struct Trajectory {
    pub steps: Vec<Step>,
    pub end: Float,
    pub nodes: usize,
}

const MAX_TERMS: usize = 1200;

/// Taylor coefficients of the polynomial `Σ c_i x^i` about `x0`.
fn shift_poly(c: &[Float], x0: &Float) -> Vec<Float> {
    let bits = x0.prec();
    let mut d: Vec<Float> = c.iter().map(|v| Float::with_val(bits, v)).collect();
    let n = d.len();
    // repeated synthetic division
    for j in 0..n {
        for i in (j..n - 1).rev() {
            let t = Float::with_val(bits, &d[i + 1] * x0);
            d[i] += t;
        }
    }
    d
}

/// Potential without the centrifugal term as polynomial coefficients in `x`.
fn smooth_poly(h: &Hamiltonian, e: &Float, bits: u32) -> Vec<Float> {
    let mut c = vec![Float::new(bits); 7];
    for (k, v) in h.v.iter().enumerate() {
        c[2 * k] = Float::with_val(bits, v);
    }
    c[0] -= e;
    c
}

fn converged(a: &[Float], h: &Float, scale: &Float, eps: &Float) -> bool {
    let k = a.len();
    if k < 12 {
        return false;
    }
    let bits = h.prec();
    (1..=4).all(|j| {
        let t = Float::with_val(bits, a[k - j].abs_ref()) * Float::with_val(bits, h.pow_ref_u((k - j) as u32));
        t <= Float::with_val(bits, scale * eps)
    })
}

trait PowU {
    fn pow_ref_u(&self, n: u32) -> Float;
}

impl PowU for Float {
    fn pow_ref_u(&self, n: u32) -> Float {
        use rug::ops::Pow;
        self.clone().pow(n)
    }
}

fn eval_series(a: &[Float], t: &Float) -> (Float, Float) {
    let bits = t.prec();
    let mut y = Float::new(bits);
    let mut dy = Float::new(bits);
    for (k, c) in a.iter().enumerate().rev() {
        y *= t;
        y += c;
        if k >= 1 {
            dy *= t;
            dy += Float::with_val(bits, c * k as u32);
        }
    }
    (y, dy)
}

/// Integrates from the origin to `x_end` at energy `e` with steps of at most
/// `h_max`.
pub(crate) fn integrate(ham: &Hamiltonian, e: &Float, x_end: &Float, h_max: &Float, prec: Precision) -> Result<Trajectory> {
    let bits = prec.bits();
    let eps = prec.tol(1.0);
    let poly = smooth_poly(ham, e, bits);
    let mut steps = Vec::new();
    let mut nodes = 0usize;

    // origin step
    let (x1, y1, dy1, a0) = match &ham.gamma {
        None => {
            let h = Float::with_val(bits, h_max).min(x_end);
            let mut a = if ham.parity_index() == 0 {
                vec![Float::with_val(bits, 1), Float::new(bits)]
            } else {
                vec![Float::new(bits), Float::with_val(bits, 1)]
            };
            let scale = Float::with_val(bits, 1);
            while !converged(&a, &h, &scale, &eps) {
                let k = a.len() - 2;
                if k > MAX_TERMS {
                    return Err(Error::NotConverged("Taylor series did not converge".into()));
                }
                let mut s = Float::new(bits);
                for (i, q) in poly.iter().enumerate().take(k + 1) {
                    s += Float::with_val(bits, q * &a[k - i]);
                }
                a.push(s / ((k + 1) * (k + 2)) as u32);
            }
            let (y, dy) = eval_series(&a, &h);
            (h, y, dy, a)
        }
        Some(g) => {
            // (k+2)(k+1+2γ) a_{k+2} = Σ_i c_i a_{k-i}
            let h = Float::with_val(bits, 0.5).min(&Float::with_val(bits, x_end / 2u32));
            let mut a = vec![Float::with_val(bits, 1), Float::new(bits)];
            let scale = Float::with_val(bits, 1);
            let two_g = Float::with_val(bits, g * 2u32);
            while !converged(&a, &h, &scale, &eps) {
                let k = a.len() - 2;
                if k > MAX_TERMS {
                    return Err(Error::NotConverged("Frobenius series did not converge".into()));
                }
                let mut s = Float::new(bits);
                for (i, q) in poly.iter().enumerate().take(k + 1) {
                    s += Float::with_val(bits, q * &a[k - i]);
                }
                let den = Float::with_val(bits, &two_g + (k + 1) as u32) * (k + 2) as u32;
                a.push(s / den);
            }
            let (y, dy) = eval_series(&a, &h);
            (h, y, dy, a)
        }
    };
    steps.push(Step { x0: Float::new(bits), h: x1.clone(), a: a0 });
    let mut x = x1;
    let mut y = y1;
    let mut dy = dy1;
    let mut sign = steps[0].a.iter().find(|c| !c.is_zero()).map_or(1, |c| if *c > 0 { 1 } else { -1 });
    if x < *x_end && !y.is_zero() && (y > 0) != (sign > 0) {
        nodes += 1;
        sign = -sign;
    }

    while x < *x_end {
        let mut h = Float::with_val(bits, x_end - &x).min(h_max);
        if ham.gamma.is_some() {
            h = h.min(&Float::with_val(bits, &x / 2u32));
        }
        let q = shift_poly(&poly, &x);
        // -2γ/(x0+t) = Σ p_i t^i with p_i = -2γ (-1)^i / x0^{i+1}, generated on demand
        let inv = Float::with_val(bits, x.recip_ref());
        let mut p: Vec<Float> = Vec::new();
        let scale = Float::with_val(bits, y.abs_ref()) + Float::with_val(bits, dy.abs_ref()) * &h;
        let mut a = vec![y.clone(), dy.clone()];
        while !converged(&a, &h, &scale, &eps) {
            let k = a.len() - 2;
            if k > MAX_TERMS {
                return Err(Error::NotConverged("Taylor series did not converge".into()));
            }
            let mut s = Float::new(bits);
            for (i, qi) in q.iter().enumerate().take(k + 1) {
                s += Float::with_val(bits, qi * &a[k - i]);
            }
            if let Some(g) = &ham.gamma {
                while p.len() <= k {
                    let next = match p.last() {
                        None => -(Float::with_val(bits, g * 2u32) * &inv),
                        Some(c) => -(Float::with_val(bits, c * &inv)),
                    };
                    p.push(next);
                }
            }
            for (i, pi) in p.iter().enumerate().take(k + 1) {
                let j = k - i + 1;
                s += Float::with_val(bits, pi * &a[j]) * j as u32;
            }
            a.push(s / ((k + 1) * (k + 2)) as u32);
        }
        let (ny, ndy) = eval_series(&a, &h);
        steps.push(Step { x0: x.clone(), h: h.clone(), a });
        x += &h;
        if x < *x_end && !ny.is_zero() {
            let s = if ny > 0 { 1 } else { -1 };
            if s != sign {
                nodes += 1;
                sign = s;
            }
        }
        y = ny;
        dy = ndy;
    }
    Ok(Trajectory { steps, end: y, nodes })
}

/// Energy of the `k`-th level of the sector between `lo` and `hi` by Illinois
/// false position on `y(x_end)`.
pub(crate) fn refine(
    ham: &Hamiltonian,
    k: usize,
    lo: &Float,
    hi: &Float,
    x_end: &Float,
    h_max: &Float,
    prec: Precision,
    target: &Float,
) -> Result<(Float, Trajectory)> {
    let bits = prec.bits();
    let f = |e: &Float| integrate(ham, e, x_end, h_max, prec);
    let mut lo = Float::with_val(bits, lo);
    let mut hi = Float::with_val(bits, hi);
    let tl = f(&lo)?;
    let th = f(&hi)?;
    if tl.nodes != k || th.nodes != k + 1 {
        return Err(Error::NotConverged(format!(
            "bracket [{}, {}] does not hold level {k} (nodes {} and {})",
            lo.to_f64(),
            hi.to_f64(),
            tl.nodes,
            th.nodes
        )));
    }
    let mut flo = tl.end;
    let mut fhi = th.end;
    if (flo > 0) == (fhi > 0) {
        return Err(Error::NotConverged(format!("no sign change for level {k}")));
    }
    let mut side = 0i32;
    for _ in 0..400 {
        let num = Float::with_val(bits, &lo * &fhi) - Float::with_val(bits, &hi * &flo);
        let e = num / Float::with_val(bits, &fhi - &flo);
        let t = f(&e)?;
        let width = Float::with_val(bits, &hi - &lo).abs();
        let mag = Float::with_val(bits, e.abs_ref()) + 1u32;
        if t.end.is_zero() || width <= Float::with_val(bits, target * &mag) {
            return Ok((e, t));
        }
        let fe = t.end.clone();
        if (fe > 0) == (fhi > 0) {
            hi = e;
            fhi = fe;
            if side == -1 {
                flo /= 2u32;
            }
            side = -1;
        } else {
            lo = e;
            flo = fe;
            if side == 1 {
                fhi /= 2u32;
            }
            side = 1;
        }
        let width = Float::with_val(bits, &hi - &lo).abs();
        if width <= Float::with_val(bits, target * &mag) {
            let e = Float::with_val(bits, &lo + &hi) / 2u32;
            let t = f(&e)?;
            return Ok((e, t));
        }
    }
    Err(Error::NotConverged(format!("level {k} did not converge")))
}

/// Series of `(x0 + t)^α` to `n` terms (`x0 > 0`).
fn binomial_series(x0: &Float, alpha: &Float, n: usize) -> Vec<Float> {
    let bits = x0.prec();
    let mut out = Vec::with_capacity(n);
    let base = Float::with_val(bits, x0.ln_ref()) * alpha;
    let mut c = base.exp();
    let inv = Float::with_val(bits, x0.recip_ref());
    for k in 0..n {
        out.push(c.clone());
        let f = Float::with_val(bits, alpha - k as u32) / (k + 1) as u32;
        c = c * f * &inv;
    }
    out
}

/// Series of `exp(S(x0 + t))` for a polynomial `S` to `n` terms.
fn exp_series(s: &[Float], x0: &Float, n: usize) -> Vec<Float> {
    let bits = x0.prec();
    let sh = shift_poly(s, x0);
    // S' coefficients in t
    let ds: Vec<Float> = sh.iter().enumerate().skip(1).map(|(i, c)| Float::with_val(bits, c * i as u32)).collect();
    let mut a = vec![Float::with_val(bits, sh[0].exp_ref())];
    for k in 0..n.saturating_sub(1) {
        let mut acc = Float::new(bits);
        for (i, d) in ds.iter().enumerate().take(k + 1) {
            acc += Float::with_val(bits, d * &a[k - i]);
        }
        a.push(acc / (k + 1) as u32);
    }
    a
}

fn mul_series(a: &[Float], b: &[Float], n: usize) -> Vec<Float> {
    let bits = a[0].prec();
    (0..n)
        .map(|k| {
            let mut s = Float::new(bits);
            for i in 0..=k {
                if i < a.len() && k - i < b.len() {
                    s += Float::with_val(bits, &a[i] * &b[k - i]);
                }
            }
            s
        })
        .collect()
}

/// `∫ x^α F(x) y(x)^r dx` over the trajectory for each `α`, where
/// `F = exp(S)` when `s` is given and `r` is 2 when `squared`. Each `α`
/// includes any power of `x` from the indicial factor.
pub(crate) fn integrate_moments(traj: &Trajectory, alphas: &[Float], s: Option<&[Float]>, squared: bool) -> Vec<Float> {
    let bits = traj.end.prec();
    let mut totals = vec![Float::new(bits); alphas.len()];
    for st in &traj.steps {
        let n = if squared { 2 * st.a.len() } else { st.a.len() } + 4;
        let mut ser = if squared { mul_series(&st.a, &st.a, n) } else { st.a.clone() };
        if let Some(s) = s {
            let e = exp_series(s, &st.x0, n);
            ser = mul_series(&ser, &e, n);
        }
        for (alpha, total) in alphas.iter().zip(totals.iter_mut()) {
            if st.x0.is_zero() {
                // ∫_0^h t^{α+k} dt
                let lnh = Float::with_val(bits, st.h.ln_ref());
                for (k, c) in ser.iter().enumerate() {
                    let ex = Float::with_val(bits, alpha + (k + 1) as u32);
                    let hp = Float::with_val(bits, &lnh * &ex).exp();
                    *total += Float::with_val(bits, c * hp) / ex;
                }
            } else {
                let b = binomial_series(&st.x0, alpha, n);
                let full = mul_series(&ser, &b, n);
                let mut hp = Float::with_val(bits, &st.h);
                for (k, c) in full.iter().enumerate() {
                    *total += Float::with_val(bits, c * &hp) / (k + 1) as u32;
                    hp *= &st.h;
                }
            }
        }
    }
    totals
}
