use super::Hamiltonian;
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};

/// Lowest eigenvalues of the parity sector in a truncated harmonic-oscillator
/// basis of `size` functions with frequency `omega`.
///
/// `x = (a + a†)/√(2ω)`; powers of `x` are formed in a basis padded by six
/// so the retained block is exact.
pub(crate) fn eigenvalues(h: &Hamiltonian, size: usize, omega: f64) -> Result<Vec<f64>> {
    if h.gamma.is_some() {
        return Err(Error::InvalidArgument("harmonic basis covers whole-line potentials only".into()));
    }
    let m = size + 6;
    let mut x = DMatrix::<f64>::zeros(m, m);
    for n in 0..m - 1 {
        let v = ((n + 1) as f64 / (2.0 * omega)).sqrt();
        x[(n, n + 1)] = v;
        x[(n + 1, n)] = v;
    }
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let [v0, v2, v4, v6] = h.v.clone().map(|c| c.to_f64());
    let mut full = x6 * v6 + x4 * v4 + &x2 * (v2 - omega * omega);
    for n in 0..m {
        full[(n, n)] += omega * (2 * n + 1) as f64 + v0;
    }
    let idx: Vec<usize> = (0..size).filter(|i| i % 2 == h.parity_index()).collect();
    let k = idx.len();
    let block = DMatrix::from_fn(k, k, |i, j| full[(idx[i], idx[j])]);
    let mut ev: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(ev)
}

/// Frequency heuristic that keeps the basis converged for sextic potentials.
pub(crate) fn default_omega(h: &Hamiltonian, size: usize) -> f64 {
    let g = h.v[3].to_f64();
    let q = h.v[2].to_f64();
    if g > 0.0 {
        (0.7 * g.powf(0.25) * (size as f64).sqrt()).max(1.0)
    } else if q > 0.0 {
        (0.5 * q.powf(1.0 / 3.0) * (size as f64).powf(1.0 / 3.0)).max(1.0)
    } else {
        h.v[1].to_f64().abs().sqrt().max(1e-3)
    }
}
