use super::Hamiltonian;
use crate::{Error, Result};

/// Outward Numerov integration of `-ψ'' + V ψ = E ψ` from the origin to `x_end`.
/// Returns `ψ(x_end)` (rescaled, sign preserved) and the number of interior
/// nodes.
pub(crate) fn shoot(h: &Hamiltonian, e: f64, step: f64, x_end: f64) -> (f64, usize) {
    let n = (x_end / step).round().max(4.0) as usize;
    let dx = x_end / n as f64;
    let k = |x: f64| e - h.v_f64(x);
    let c = dx * dx / 12.0;
    let (mut x0, mut y0, mut y1) = match h.gamma_f64() {
        None if h.parity_index() == 0 => {
            let (k0, k1) = (k(0.0), k(dx));
            (0.0, 1.0, (1.0 - 5.0 * c * k0) / (1.0 + c * k1))
        }
        None => (0.0, 0.0, dx),
        Some(g) => {
            // Frobenius series ψ = x^γ Σ a_k x^k up to a point well inside the first node
            let i0 = ((0.3f64.min(0.5 / e.abs().max(1.0).sqrt())) / dx).ceil().max(1.0) as usize;
            let x0 = i0 as f64 * dx;
            (x0, frobenius(h, g, e, x0), frobenius(h, g, e, x0 + dx))
        }
    };
    let start = match h.gamma_f64() {
        Some(_) => (x0 / dx).round() as usize + 1,
        None => 1,
    };
    let mut nodes = 0usize;
    let mut last_sign = if y0 != 0.0 { y0.signum() } else { y1.signum() };
    if y1.signum() != last_sign && y1 != 0.0 {
        nodes += 1;
        last_sign = y1.signum();
    }
    for i in start..n {
        let x1 = x0 + dx;
        let x2 = x1 + dx;
        let (ka, kb, kc) = (k(x0), k(x1), k(x2));
        // y'' = -k y
        let y2 = (2.0 * y1 * (1.0 - 5.0 * c * kb) - y0 * (1.0 + c * ka)) / (1.0 + c * kc);
        if y2 != 0.0 && y2.signum() != last_sign && i + 1 < n {
            nodes += 1;
            last_sign = y2.signum();
        }
        y0 = y1;
        y1 = y2;
        x0 = x1;
        let big = y1.abs().max(y0.abs());
        if big > 1e100 {
            y0 /= big;
            y1 /= big;
        }
    }
    (y1, nodes)
}

/// `x^γ y(x)` with `(k+2)(k+1+2γ) a_{k+2} = -E a_k + v₂ a_{k-2} + v₄ a_{k-4} + v₆ a_{k-6}`.
fn frobenius(h: &Hamiltonian, g: f64, e: f64, x: f64) -> f64 {
    let v: Vec<f64> = h.v.iter().map(|c| c.to_f64()).collect();
    let mut a = vec![1.0f64, 0.0];
    let mut sum = 1.0;
    let mut xp = 1.0;
    for k in 0..400usize {
        let mut s = (v[0] - e) * a[k];
        for (j, vj) in v.iter().enumerate().skip(1) {
            if k >= 2 * j {
                s += vj * a[k - 2 * j];
            }
        }
        let next = s / ((k + 2) as f64 * (k as f64 + 1.0 + 2.0 * g));
        a.push(next);
        xp *= x;
        let term = a[k + 1] * xp;
        sum += term;
        if k > 10 && term.abs() < 1e-18 * sum.abs() && (next * xp * x).abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    x.powf(g) * sum
}

/// Energy of the `k`-th level of the sector on a grid of spacing `step`.
pub(crate) fn level(h: &Hamiltonian, k: usize, step: f64, x_end: f64, bracket: (f64, f64)) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    // isolate: nodes(lo) <= k < nodes(hi)
    for _ in 0..200 {
        if hi - lo < 1e-3 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (_, n) = shoot(h, mid, step, x_end);
        if n > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let f = |e: f64| shoot(h, e, step, x_end).0;
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo.signum() == fhi.signum() {
        // eigenvalue sits where the node count jumps; widen to a sign change
        let (n_lo, n_hi) = (shoot(h, lo, step, x_end).1, shoot(h, hi, step, x_end).1);
        if !(n_lo <= k && n_hi > k) {
            return Err(Error::NotConverged(format!("could not bracket level {k}")));
        }
        let mut found = false;
        for i in 1..64 {
            let a = lo + (hi - lo) * i as f64 / 64.0;
            let fa = f(a);
            if fa.signum() != flo.signum() {
                hi = a;
                fhi = fa;
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::NotConverged(format!("no sign change for level {k}")));
        }
    }
    // Illinois false position
    let mut side = 0i32;
    for _ in 0..200 {
        let e = (lo * fhi - hi * flo) / (fhi - flo);
        let fe = f(e);
        if fe == 0.0 || (hi - lo).abs() < 1e-14 * (1.0 + e.abs()) {
            return Ok(e);
        }
        if fe.signum() == fhi.signum() {
            hi = e;
            fhi = fe;
            if side == -1 {
                flo /= 2.0;
            }
            side = -1;
        } else {
            lo = e;
            flo = fe;
            if side == 1 {
                fhi /= 2.0;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}
