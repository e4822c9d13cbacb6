//! Energy polynomials of quasi-exactly solvable potentials: the moment-side
//! polynomials `Λ^{(ρ)}(E)` with `ν(0) = 1`, the quantizing polynomial
//! `P^{(n*+1)}(E)`, its monic three-term form, and the configuration-space
//! Hill coefficients `c_i(E)`, which are generated by a separate recursion.

use crate::moments::{build_recursion, MomentRecursion, Representation};
use crate::numeric::{real_roots, EnergyPolynomial, RootSet};
use crate::potential::{is_qes_potential, Family, PotentialSpec, QesClass};
use crate::{Error, Result};
use rug::Float;

#[derive(Clone, Debug, PartialEq)]
pub struct BdPolySet {
    /// `Λ^{(ρ)}` for `ρ = 0..=n*` (or up to a row cap for non-QES input).
    pub lambda: Vec<EnergyPolynomial>,
    /// `P^{(n*+1)}`; `None` until [`build_quantizer`] fills it.
    pub quantizer: Option<EnergyPolynomial>,
    /// Monic `P̃^{(ρ)}` for `ρ = 0..=n*+2`.
    pub monic: Vec<EnergyPolynomial>,
    /// `alpha_t[ρ] = α̃_ρ`, entry 0 unused.
    pub alpha_t: Vec<Float>,
    /// `gamma_t[ρ] = γ̃_ρ`, entry 0 unused.
    pub gamma_t: Vec<Float>,
}

/// The potential in its QES parity sector with the three-term recursion.
fn qes_recursion(p: &PotentialSpec) -> Result<(MomentRecursion, usize)> {
    match is_qes_potential(p) {
        QesClass::No => Err(Error::NotQesType),
        QesClass::Yes { n_star, sigma_star } => {
            let (spec, rep) = match p.family {
                Family::SexticAnharmonic => (p.with_sigma(sigma_star.expect("sextic parity")), Representation::PhiNu),
                Family::BenderDunne => (p.clone(), Representation::BdBessis),
            };
            Ok((build_recursion(&spec, rep)?, n_star))
        }
    }
}

fn three_term_recursion(p: &PotentialSpec) -> Result<MomentRecursion> {
    let rep = match p.family {
        Family::SexticAnharmonic => Representation::PhiNu,
        Family::BenderDunne => Representation::BdBessis,
    };
    build_recursion(p, rep)
}

/// `Λ^{(0)} = 1` and `C₁(ρ+1) Λ^{(ρ+1)} = C₀(ρ) Λ^{(ρ)} + C₋₁(ρ-1) Λ^{(ρ-1)}`.
///
/// With `cap = None` the potential must be QES-type and exactly
/// `Λ^{(0..=n*)}` are returned. With `cap = Some(k)` the polynomials are
/// generated in the potential's own parity sector up to `ρ = k`, stopping
/// early at a kink.
pub fn build_lambda(p: &PotentialSpec, cap: Option<usize>) -> Result<Vec<EnergyPolynomial>> {
    let (rec, last) = match cap {
        None => qes_recursion(p)?,
        Some(k) => {
            let rec = three_term_recursion(p)?;
            let last = rec.kink.map_or(k, |n| n.min(k));
            (rec, last)
        }
    };
    let prec = rec.prec();
    let mut lam = vec![EnergyPolynomial::one(prec)];
    for rho in 0..last {
        let mut acc = &rec.c0(rho) * &lam[rho];
        if rho >= 1 {
            acc = &acc + &lam[rho - 1].scale(&rec.c_m1(rho - 1));
        }
        let c1 = rec.c1(rho + 1);
        if c1.is_zero() {
            return Err(Error::ZeroLeadingCoefficient(rho + 1));
        }
        lam.push(acc.scale(&Float::with_val(prec.bits(), c1.recip_ref())));
    }
    Ok(lam)
}

/// `P^{(n*+1)} = C₀(n*) Λ^{(n*)} + C₋₁(n*-1) Λ^{(n*-1)}`, whose roots are the
/// QES energies.
pub fn build_quantizer(p: &PotentialSpec) -> Result<EnergyPolynomial> {
    let (rec, n_star) = qes_recursion(p)?;
    let lam = build_lambda(p, None)?;
    let mut q = &rec.c0(n_star) * &lam[n_star];
    if n_star >= 1 {
        q = &q + &lam[n_star - 1].scale(&rec.c_m1(n_star - 1));
    }
    Ok(q)
}

/// Lambda, quantizer and monic three-term data for a QES-type potential.
///
/// `P̃^{(ρ)} = F_ρ Λ^{(ρ)}` with `F_ρ = Π_{i<=ρ} C₁(i)`, so that
/// `P̃^{(ρ+1)} = (E - α̃_{ρ+1}) P̃^{(ρ)} - γ̃_ρ P̃^{(ρ-1)}` with
/// `α̃_{ρ+1} = -C₀(ρ)(0)` and `γ̃_ρ = -C₋₁(ρ-1) C₁(ρ)`; the kink makes
/// `γ̃_{n*+1} = 0`.
pub fn monic_transform(p: &PotentialSpec) -> Result<BdPolySet> {
    let (rec, n_star) = qes_recursion(p)?;
    let lambda = build_lambda(p, None)?;
    let quantizer = build_quantizer(p)?;
    let prec = rec.prec();
    let bits = prec.bits();
    let mut alpha_t = vec![prec.zero()];
    let mut gamma_t = Vec::new();
    let mut monic = vec![EnergyPolynomial::one(prec)];
    for rho in 0..=n_star + 1 {
        let a = -rec.c0(rho).coeff(0);
        let g = if rho == 0 {
            prec.zero()
        } else {
            -Float::with_val(bits, rec.c_m1(rho - 1) * rec.c1(rho))
        };
        let shifted = &monic[rho].mul_var() - &monic[rho].scale(&a);
        let next = if rho == 0 { shifted } else { &shifted - &monic[rho - 1].scale(&g) };
        alpha_t.push(a);
        gamma_t.push(g);
        monic.push(next);
    }
    Ok(BdPolySet { lambda, quantizer: Some(quantizer), monic, alpha_t, gamma_t })
}

/// Hill recursion coefficients `(A_i, B_i(E), C_i)` in
/// `C_i c_{i+1} = -B_i(E) c_i + A_i c_{i-1}`, written out from the
/// configuration-space series of `Ψ / (x^γ 𝒜)`.
pub fn hill_coefficients(p: &PotentialSpec, i: usize) -> (Float, EnergyPolynomial, Float) {
    let prec = p.prec();
    let bits = prec.bits();
    let ii = i as i64;
    match p.family {
        Family::SexticAnharmonic => {
            let s = i64::from(p.sigma.index());
            let sg = Float::with_val(bits, p.g.sqrt_ref());
            let b2 = Float::with_val(bits, p.b.square_ref()) / Float::with_val(bits, &p.g * 4u32);
            let a = Float::with_val(bits, &p.m - &b2) + prec.float(4 * (ii - 1) + 3 + 2 * s) * &sg;
            let shift = Float::with_val(bits, &p.b / &sg) * prec.float(4 * ii + 1 + 2 * s) / 2u32;
            let b = EnergyPolynomial::linear(-shift, prec.one());
            let c = prec.float(2 * (ii + 1) * (2 * ii + 1 + 2 * s));
            (a, b, c)
        }
        Family::BenderDunne => {
            let two_g = Float::with_val(bits, &p.gamma * 2u32);
            let a = Float::with_val(bits, &two_g + &p.m) + prec.float(4 * ii - 1);
            let c = (Float::with_val(bits, &two_g * 2u32) + prec.float(4 * ii + 2)) * prec.float(ii + 1);
            (a, EnergyPolynomial::var(prec), c)
        }
    }
}

/// Hill coefficients `c_0 = 1, c_1, ..., c_{i_max}` as energy polynomials.
pub fn hill_series(p: &PotentialSpec, i_max: usize) -> Vec<EnergyPolynomial> {
    let prec = p.prec();
    let mut c = vec![EnergyPolynomial::one(prec)];
    for i in 0..i_max {
        let (a, b, d) = hill_coefficients(p, i);
        let mut next = -&(&b * &c[i]);
        if i >= 1 {
            next = &next + &c[i - 1].scale(&a);
        }
        c.push(next.scale(&Float::with_val(prec.bits(), d.recip_ref())));
    }
    c
}

/// Roots of the quantizer on a window.
pub fn quantizer_roots(p: &PotentialSpec, lo: &Float, hi: &Float) -> Result<RootSet> {
    real_roots(&build_quantizer(p)?, lo, hi)
}
