//! Orthonormal polynomials of a positive weight, generated from its power
//! moments.
//!
//! The monic polynomials follow the three-term recurrence
//! `P̃^{(j+1)} = (x - α̃_{j+1}) P̃^{(j)} - γ̃_j P̃^{(j-1)}` with
//! `α̃_{j+1} = ⟨x P̃_j|P̃_j⟩ / ⟨x^j|P̃_j⟩` and
//! `γ̃_j = ⟨x^j|P̃_j⟩ / ⟨x^{j-1}|P̃_{j-1}⟩`, all inner products being moment
//! contractions. The Hankel-bordered determinant form is kept as a
//! diagnostic.

use crate::numeric::{det, exact_string, EnergyPolynomial, Precision};
use crate::weights::MomentTable;
use crate::{Error, Result};
use rug::{Assign, Float};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct OrthoBasis {
    /// Monic coefficients, `monic[j][i]` multiplies `x^i` in `P̃^{(j)}`.
    pub monic: Vec<Vec<Float>>,
    /// `alpha_t[k] = α̃_k` for `k = 1..=J`; entry 0 is unused and zero.
    pub alpha_t: Vec<Float>,
    /// `gamma_t[k] = γ̃_k` for `k = 1..=J`; entry 0 is unused and zero.
    pub gamma_t: Vec<Float>,
    /// `⟨P̃_j|P̃_j⟩`.
    pub norm_sq: Vec<Float>,
    /// `n_j = ⟨P̃_j|P̃_j⟩^{-1/2}`; empty until [`normalize`] runs.
    pub norms: Vec<Float>,
    /// Orthonormal coefficients `Ξ_i^{(j)}`; empty until [`normalize`] runs.
    pub xi: Vec<Vec<Float>>,
}

impl OrthoBasis {
    /// Highest polynomial degree held.
    pub fn max_degree(&self) -> usize {
        self.monic.len() - 1
    }

    pub fn is_normalized(&self) -> bool {
        !self.xi.is_empty()
    }

    pub fn prec(&self) -> Precision {
        Precision::of(&self.monic[0][0])
    }

    /// Orthonormal polynomial `P^{(j)}` as a polynomial object.
    pub fn orthonormal_poly(&self, j: usize) -> EnergyPolynomial {
        EnergyPolynomial::from_coeffs(self.xi[j].clone())
    }

    pub fn monic_poly(&self, j: usize) -> EnergyPolynomial {
        EnergyPolynomial::from_coeffs(self.monic[j].clone())
    }

    /// `j,i,xi` CSV of the orthonormal coefficients.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,i,xi\n");
        for (j, row) in self.xi.iter().enumerate() {
            for (i, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{j},{i},{}", exact_string(v));
            }
        }
        out
    }
}

/// `Σ_{i,k} p_i q_k m(i+k+shift)`.
fn contract(p: &[Float], q: &[Float], m: &[Float], shift: usize) -> Float {
    let bits = m[0].prec();
    let mut s = Float::new(bits);
    let mut t = Float::new(bits);
    for (i, a) in p.iter().enumerate() {
        let mut inner = Float::new(bits);
        for (k, b) in q.iter().enumerate() {
            t.assign(b * &m[i + k + shift]);
            inner += &t;
        }
        t.assign(a * &inner);
        s += &t;
    }
    s
}

/// `⟨x^j|P⟩ = Σ_i c_i m(i+j)`.
fn against_power(c: &[Float], m: &[Float], j: usize) -> Float {
    let bits = m[0].prec();
    let mut s = Float::new(bits);
    for (i, a) in c.iter().enumerate() {
        s += Float::with_val(bits, a * &m[i + j]);
    }
    s
}

/// Monic recurrence data up to degree `j_max` from a moment table.
pub fn build_monic(m: &MomentTable, j_max: usize) -> Result<OrthoBasis> {
    build_monic_from(&m.values, j_max)
}

/// [`build_monic`] over a raw moment list (e.g. all powers of an even weight).
pub fn build_monic_from(m: &[Float], j_max: usize) -> Result<OrthoBasis> {
    let need = 2 * j_max + 2;
    if m.len() < need {
        return Err(Error::LengthError { needed: need, have: m.len() });
    }
    let bits = m[0].prec();
    let zero = Float::new(bits);
    if m[0] <= 0 {
        return Err(Error::PositivityBreak { index: 0, value: exact_string(&m[0]) });
    }

    let mut monic: Vec<Vec<Float>> = vec![vec![Float::with_val(bits, 1)]];
    let mut alpha_t = vec![zero.clone()];
    let mut gamma_t = vec![zero.clone()];
    let mut norm_sq = vec![m[0].clone()];

    for j in 0..j_max {
        let p = &monic[j];
        let xpp = contract(p, p, m, 1);
        let a = Float::with_val(bits, &xpp / &norm_sq[j]);
        // (x - α̃) P̃_j - γ̃_j P̃_{j-1}
        let mut next = vec![zero.clone(); j + 2];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= Float::with_val(bits, &a * c);
        }
        if j > 0 {
            let g = &gamma_t[j];
            for (i, c) in monic[j - 1].iter().enumerate() {
                next[i] -= Float::with_val(bits, g * c);
            }
        }
        let nsq = against_power(&next, m, j + 1);
        let g_next = Float::with_val(bits, &nsq / &norm_sq[j]);
        if g_next <= 0 {
            return Err(Error::PositivityBreak { index: j + 1, value: exact_string(&g_next) });
        }
        alpha_t.push(a);
        gamma_t.push(g_next);
        norm_sq.push(nsq);
        monic.push(next);
    }
    Ok(OrthoBasis { monic, alpha_t, gamma_t, norm_sq, norms: vec![], xi: vec![] })
}

/// Fills `n_j` and `Ξ_i^{(j)} = n_j · (monic coefficient)`.
pub fn normalize(mut basis: OrthoBasis) -> OrthoBasis {
    let bits = basis.prec().bits();
    basis.norms = basis
        .norm_sq
        .iter()
        .map(|v| Float::with_val(bits, v.sqrt_ref()).recip())
        .collect();
    basis.xi = basis
        .monic
        .iter()
        .zip(&basis.norms)
        .map(|(row, n)| row.iter().map(|c| Float::with_val(bits, c * n)).collect())
        .collect();
    basis
}

/// Monic then normalized basis in one step.
pub fn orthonormal_basis(m: &MomentTable, j_max: usize) -> Result<OrthoBasis> {
    Ok(normalize(build_monic(m, j_max)?))
}

pub fn orthonormal_basis_from(m: &[Float], j_max: usize) -> Result<OrthoBasis> {
    Ok(normalize(build_monic_from(m, j_max)?))
}

/// Largest deviation of `Σ Ξ_{i1}^{(j1)} Ξ_{i2}^{(j2)} m(i1+i2)` from `δ_{j1,j2}`
/// for `j1, j2 <= j_max`.
pub fn orthonormality_residual(basis: &OrthoBasis, m: &[Float], j_max: usize) -> Float {
    let bits = basis.prec().bits();
    let mut worst = Float::new(bits);
    for j1 in 0..=j_max {
        for j2 in j1..=j_max {
            let mut v = contract(&basis.xi[j1], &basis.xi[j2], m, 0);
            if j1 == j2 {
                v -= 1u32;
            }
            let a = v.abs();
            if a > worst {
                worst = a;
            }
        }
    }
    worst
}

/// Monic polynomial of degree `j` from the Hankel-bordered determinant.
pub fn hankel_polys(m: &[Float], j: usize) -> Result<EnergyPolynomial> {
    let prec = Precision::of(&m[0]);
    if j == 0 {
        return Ok(EnergyPolynomial::one(prec));
    }
    let need = 2 * j;
    if m.len() < need {
        return Err(Error::LengthError { needed: need, have: m.len() });
    }
    let rows: Vec<Vec<Float>> = (0..j).map(|i| (0..=j).map(|k| m[i + k].clone()).collect()).collect();
    let minor = |skip: usize| -> Float {
        let sub: Vec<Vec<Float>> = rows
            .iter()
            .map(|r| r.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, v)| v.clone()).collect())
            .collect();
        det(&sub)
    };
    let lead = minor(j);
    if lead.is_zero() {
        return Err(Error::SingularHankel(j - 1));
    }
    let coeffs = (0..=j)
        .map(|k| {
            let c = minor(k) / &lead;
            if (j + k) % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .collect();
    Ok(EnergyPolynomial::from_coeffs(coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{bd_weight_moments, interleave_full_line, sextic_weight_moments, WeightSpec};

    fn p() -> Precision {
        Precision::default()
    }

    fn bd_table(count: usize) -> MomentTable {
        bd_weight_moments(&WeightSpec::bd(p().float(1.5)).unwrap(), count).unwrap()
    }

    fn abs_diff(a: &Float, b: &Float) -> Float {
        Float::with_val(a.prec(), a - b).abs()
    }

    #[test]
    fn first_monic_polynomial() {
        let t = bd_table(8);
        let b = build_monic(&t, 3).unwrap();
        let shift = Float::with_val(p().bits(), &t.values[1] / &t.values[0]);
        assert!(abs_diff(&b.monic[1][0], &-shift) < p().tol(0.9));
        assert_eq!(b.monic[1][1], 1);
    }

    #[test]
    fn gamma_one_matches_gram_schmidt() {
        let t = bd_table(8);
        let b = build_monic(&t, 3).unwrap();
        let m = &t.values;
        let r = Float::with_val(p().bits(), &m[1] / &m[0]);
        let expect = Float::with_val(p().bits(), &m[2] / &m[0]) - r.square();
        assert!(abs_diff(&b.gamma_t[1], &expect) < p().tol(0.9));
    }

    #[test]
    fn symmetric_weight_has_zero_alpha_and_parity() {
        let w = WeightSpec::sextic(p().float(1), p().parse("sqrt(8)").unwrap(), p().float(4)).unwrap();
        let base = sextic_weight_moments(&w, 20).unwrap();
        let full = interleave_full_line(&base, 34).unwrap();
        let b = orthonormal_basis_from(&full, 16).unwrap();
        for a in &b.alpha_t {
            assert!(a.is_zero() || a.clone().abs() < p().tol(0.9));
        }
        for (j, row) in b.xi.iter().enumerate() {
            for (i, c) in row.iter().enumerate() {
                if (i + j) % 2 == 1 {
                    assert!(c.clone().abs() < p().tol(0.8), "j={j} i={i}");
                }
            }
        }
    }

    #[test]
    fn zeroth_normalization_and_ratio_identity() {
        let t = bd_table(30);
        let b = orthonormal_basis(&t, 12).unwrap();
        let expect = Float::with_val(p().bits(), t.values[0].sqrt_ref()).recip();
        assert!(abs_diff(&b.xi[0][0], &expect) < p().tol(0.95));
        for j in 1..=12 {
            let ratio = Float::with_val(p().bits(), &b.norms[j - 1] / &b.norms[j]).square();
            let rel = abs_diff(&ratio, &b.gamma_t[j]) / &b.gamma_t[j];
            assert!(rel < p().tol(0.9), "j={j}");
            assert!(!b.xi[j][j].is_zero());
        }
    }

    #[test]
    fn orthonormal_for_bessis_weight() {
        let t = bd_table(30);
        let b = orthonormal_basis(&t, 12).unwrap();
        assert!(orthonormality_residual(&b, &t.values, 12) < p().tol(0.5));
    }

    #[test]
    fn hankel_form_small_orders() {
        let t = bd_table(10);
        assert_eq!(hankel_polys(&t.values, 0).unwrap(), EnergyPolynomial::one(p()));
        let h1 = hankel_polys(&t.values, 1).unwrap();
        let shift = Float::with_val(p().bits(), &t.values[1] / &t.values[0]);
        assert!(abs_diff(&h1.coeff(0), &-shift) < p().tol(0.9));
        assert_eq!(h1.degree(), 1);
        let b = build_monic(&t, 2).unwrap();
        let h2 = hankel_polys(&t.values, 2).unwrap();
        for i in 0..=2 {
            assert!(abs_diff(&h2.coeff(i), &b.monic[2][i]) < p().tol(0.5));
        }
    }

    #[test]
    fn rejects_short_or_invalid_tables() {
        let t = bd_table(5);
        assert!(matches!(build_monic(&t, 3), Err(Error::LengthError { .. })));
        let mut bad = bd_table(10);
        bad.values[2] = -bad.values[2].clone();
        assert!(matches!(build_monic(&bad, 4), Err(Error::PositivityBreak { index: 1, .. })));
    }

    #[test]
    fn csv_layout() {
        let b = orthonormal_basis(&bd_table(8), 2).unwrap();
        let csv = b.to_csv();
        assert!(csv.starts_with("j,i,xi\n0,0,"));
        assert_eq!(csv.lines().count(), 1 + 1 + 2 + 3);
    }
}
