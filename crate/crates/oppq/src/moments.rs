//! Energy-dependent moment recursions and the transfer polynomials that map
//! missing moments onto all moments.
//!
//! A recursion row reads `lead · u(target) = Σ_k c_k(E) · u(index_k)`. For the
//! three-term Φ/Bessis forms the lead is `C₁(ρ+1)`, the middle coefficient
//! `C₀(ρ)` and the back coefficient `C₋₁(ρ-1)`. When the potential is
//! quasi-exactly solvable the lead vanishes at `ρ+1 = n*+1` (the kink) and the
//! transfer system is segmented into an `m_s = 0` prefix and an `m_s = 1` tail
//! with missing moments `{0, n*+1}`.

use crate::numeric::{exact_string, EnergyPolynomial, Precision};
use crate::orthopoly::OrthoBasis;
use crate::potential::{is_qes_potential, Family, PotentialSpec, QesClass};
use crate::{Error, Result};
use rug::Float;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    /// All power moments μ(p) of Ψ, `m_s = 5`.
    PsiMu,
    /// Parity-resolved moments `u_σ(ρ) = μ(2ρ+σ)` of Ψ, `m_s = 2`.
    PsiU,
    /// Parity-resolved moments of the Bessis configuration `Φ = 𝒜Ψ`, `m_s = 0`.
    PhiNu,
    /// Bender–Dunne, moments of Ψ in `x²`, `m_s = 3`.
    BdA,
    /// Bender–Dunne reduced moment form, `m_s = 1`.
    BdTilde,
    /// Bender–Dunne Bessis form, `m_s = 0`.
    BdBessis,
}

impl Representation {
    pub const ALL: [Representation; 6] = [
        Representation::PsiMu,
        Representation::PsiU,
        Representation::PhiNu,
        Representation::BdA,
        Representation::BdTilde,
        Representation::BdBessis,
    ];

    pub fn family(self) -> Family {
        match self {
            Representation::PsiMu | Representation::PsiU | Representation::PhiNu => Family::SexticAnharmonic,
            _ => Family::BenderDunne,
        }
    }

    /// Missing-moment order of the unsegmented recursion.
    pub fn base_order(self) -> usize {
        match self {
            Representation::PsiMu => 5,
            Representation::PsiU => 2,
            Representation::BdA => 3,
            Representation::BdTilde => 1,
            Representation::PhiNu | Representation::BdBessis => 0,
        }
    }

    /// Whether the recursion is of three-term type and can carry a kink.
    pub fn is_three_term(self) -> bool {
        matches!(self, Representation::PhiNu | Representation::BdBessis)
    }

    pub fn name(self) -> &'static str {
        match self {
            Representation::PsiMu => "psi-mu",
            Representation::PsiU => "psi-u",
            Representation::PhiNu => "phi-nu",
            Representation::BdA => "bd-a",
            Representation::BdTilde => "bd-tilde",
            Representation::BdBessis => "bd-bessis",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown representation {s:?}")))
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One recursion row `lead · u(target) = Σ coeff · u(index)`.
#[derive(Clone, Debug)]
pub struct RecurrenceRow {
    pub target: usize,
    pub lead: Float,
    pub terms: Vec<(usize, EnergyPolynomial)>,
}

#[derive(Clone, Debug)]
pub struct MomentRecursion {
    pub representation: Representation,
    pub potential: PotentialSpec,
    /// Missing-moment order; 1 for a segmented three-term recursion.
    pub m_s: usize,
    /// `n*` when the lead coefficient vanishes at `ρ+1 = n*+1`.
    pub kink: Option<usize>,
    sqrt_g: Float,
}

pub fn build_recursion(p: &PotentialSpec, rep: Representation) -> Result<MomentRecursion> {
    if rep.family() != p.family {
        return Err(Error::FamilyMismatch { rep: rep.to_string(), family: p.family.to_string() });
    }
    let kink = if rep.is_three_term() {
        match is_qes_potential(p) {
            QesClass::Yes { n_star, sigma_star } if sigma_star.is_none_or(|s| s == p.sigma) => Some(n_star),
            _ => None,
        }
    } else {
        None
    };
    let m_s = if kink.is_some() { 1 } else { rep.base_order() };
    let sqrt_g = Float::with_val(p.prec().bits(), p.g.sqrt_ref());
    Ok(MomentRecursion { representation: rep, potential: p.clone(), m_s, kink, sqrt_g })
}

impl MomentRecursion {
    pub fn prec(&self) -> Precision {
        self.potential.prec()
    }

    fn f(&self, v: i64) -> Float {
        self.prec().float(v)
    }

    fn sigma(&self) -> i64 {
        i64::from(self.potential.sigma.index())
    }

    fn constant(&self, c: Float) -> EnergyPolynomial {
        EnergyPolynomial::constant(c)
    }

    /// `C₁(k)`: coefficient of `v(k)` in the three-term row that generates it.
    pub fn c1(&self, k: usize) -> Float {
        let p = &self.potential;
        let bits = self.prec().bits();
        let k = k as i64;
        match self.representation {
            Representation::PhiNu => {
                if self.kink == Some((k - 1) as usize) && k >= 1 {
                    return Float::new(bits);
                }
                let b2 = Float::with_val(bits, p.b.square_ref()) / Float::with_val(bits, &p.g * 4u32);
                let lin = self.f(4 * (k - 1) + 3 + 2 * self.sigma());
                Float::with_val(bits, &p.m - &b2) + lin * &self.sqrt_g
            }
            Representation::BdBessis => {
                if self.kink == Some((k - 1) as usize) && k >= 1 {
                    return Float::new(bits);
                }
                Float::with_val(bits, &p.gamma * 2u32) + &p.m + self.f(4 * (k - 1) + 3)
            }
            _ => panic!("C₁ is defined for three-term representations only"),
        }
    }

    /// `C₀(ρ)`: coefficient polynomial of `v(ρ)` in the row generating `v(ρ+1)`.
    pub fn c0(&self, rho: usize) -> EnergyPolynomial {
        let p = &self.potential;
        let bits = self.prec().bits();
        match self.representation {
            Representation::PhiNu => {
                let shift = Float::with_val(bits, &p.b / &self.sqrt_g)
                    * (self.f(4 * rho as i64 + 1 + 2 * self.sigma()) / 2u32);
                EnergyPolynomial::linear(-shift, self.f(1))
            }
            Representation::BdBessis => EnergyPolynomial::var(self.prec()),
            _ => panic!("C₀ is defined for three-term representations only"),
        }
    }

    /// `C₋₁(k)`: coefficient of `v(k)` in the row generating `v(k+2)`.
    pub fn c_m1(&self, k: usize) -> Float {
        let r = k as i64 + 1;
        match self.representation {
            Representation::PhiNu => self.f(2 * r * (2 * r - 1 + 2 * self.sigma())),
            Representation::BdBessis => {
                let bits = self.prec().bits();
                (self.f(4 * r - 2) + Float::with_val(bits, &self.potential.gamma * 4u32)) * r
            }
            _ => panic!("C₋₁ is defined for three-term representations only"),
        }
    }

    /// The recursion row with smallest index `ρ`.
    pub fn row(&self, rho: usize) -> RecurrenceRow {
        let p = &self.potential;
        let prec = self.prec();
        let bits = prec.bits();
        let r = rho as i64;
        let e = EnergyPolynomial::var(prec);
        let mut terms = Vec::new();
        let (target, lead) = match self.representation {
            Representation::PsiMu => {
                terms.push((rho + 4, self.constant(-p.b.clone())));
                terms.push((rho + 2, self.constant(-p.m.clone())));
                terms.push((rho, e));
                if rho >= 2 {
                    terms.push((rho - 2, self.constant(self.f(r * (r - 1)))));
                }
                (rho + 6, p.g.clone())
            }
            Representation::PsiU => {
                terms.push((rho + 2, self.constant(-p.b.clone())));
                terms.push((rho + 1, self.constant(-p.m.clone())));
                terms.push((rho, e));
                if rho >= 1 {
                    terms.push((rho - 1, self.constant(self.f(2 * r * (2 * r + 2 * self.sigma() - 1)))));
                }
                (rho + 3, p.g.clone())
            }
            Representation::BdA => {
                terms.push((rho + 2, self.constant(-p.m.clone())));
                terms.push((rho + 1, e));
                let c = (self.f(r + 1) - &p.gamma) * self.f(2 * (2 * r + 1));
                terms.push((rho, self.constant(c)));
                (rho + 4, self.f(1))
            }
            Representation::BdTilde => {
                terms.push((rho + 1, e));
                let c = (self.f(r + 1) - &p.gamma) * self.f(2 * (2 * r + 1));
                terms.push((rho, self.constant(c)));
                let lead = self.f(4 * r + 7) - Float::with_val(bits, &p.gamma * 2u32) + &p.m;
                (rho + 2, lead)
            }
            Representation::PhiNu | Representation::BdBessis => {
                terms.push((rho, self.c0(rho)));
                if rho >= 1 {
                    terms.push((rho - 1, self.constant(self.c_m1(rho - 1))));
                }
                (rho + 1, self.c1(rho + 1))
            }
        };
        RecurrenceRow { target, lead, terms }
    }

    /// Scale against which a vanishing lead is judged.
    fn lead_scale(&self) -> Float {
        let p = &self.potential;
        let bits = self.prec().bits();
        let mut s = Float::with_val(bits, p.m.abs_ref()) + Float::with_val(bits, p.b.square_ref()) + 1u32;
        s += Float::with_val(bits, p.gamma.abs_ref());
        s
    }
}

/// Transfer polynomials `M(ρ, ℓ)` with `u(ρ) = Σ_ℓ M(ρ,ℓ)(E) u(ℓ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferSystem {
    pub representation: Representation,
    /// Missing-moment indices ℓ.
    pub columns: Vec<usize>,
    /// `entries[ρ][c]` is `M(ρ, columns[c])`.
    pub entries: Vec<Vec<EnergyPolynomial>>,
    /// Segment boundary `n*` of a kinked three-term recursion.
    pub kink: Option<usize>,
}

impl TransferSystem {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn column_position(&self, ell: usize) -> Option<usize> {
        self.columns.iter().position(|&c| c == ell)
    }

    pub fn entry(&self, rho: usize, ell: usize) -> Option<&EnergyPolynomial> {
        let c = self.column_position(ell)?;
        self.entries.get(rho).map(|r| &r[c])
    }

    /// Keeps only the listed missing-moment columns.
    pub fn select_columns(&self, cols: &[usize]) -> Result<TransferSystem> {
        let pos: Vec<usize> = cols
            .iter()
            .map(|&c| self.column_position(c).ok_or(Error::ExtentError { index: c, extent: self.columns.len() }))
            .collect::<Result<_>>()?;
        Ok(TransferSystem {
            representation: self.representation,
            columns: cols.to_vec(),
            entries: self.entries.iter().map(|r| pos.iter().map(|&p| r[p].clone()).collect()).collect(),
            kink: self.kink,
        })
    }

    /// Moments at energy `e` from missing-moment values, one per column.
    pub fn propagate(&self, e: &Float, missing: &[Float]) -> Result<Vec<Float>> {
        if missing.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "{} missing moments given, {} columns",
                missing.len(),
                self.columns.len()
            )));
        }
        let bits = e.prec();
        Ok(self
            .entries
            .iter()
            .map(|row| {
                let mut s = Float::new(bits);
                for (poly, v) in row.iter().zip(missing) {
                    s += poly.eval(e) * v;
                }
                s
            })
            .collect())
    }

    /// `rho,ell,degree,coefficients` CSV; coefficients follow lowest power
    /// first in trailing columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,ell,degree,coefficients\n");
        for (rho, row) in self.entries.iter().enumerate() {
            for (c, poly) in row.iter().enumerate() {
                let _ = write!(out, "{rho},{},{}", self.columns[c], poly.degree());
                for k in poly.coeffs() {
                    let _ = write!(out, ",{}", exact_string(k));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Builds `M(ρ, ℓ)` for `ρ < rows`.
pub fn build_transfer(rec: &MomentRecursion, rows: usize) -> Result<TransferSystem> {
    if rows < rec.m_s + 2 {
        return Err(Error::InvalidArgument(format!("need at least {} rows", rec.m_s + 2)));
    }
    let prec = rec.prec();
    let bits = prec.bits();
    let zero_tol = prec.tol(0.5) * rec.lead_scale();
    let zero = EnergyPolynomial::zero(prec);
    let one = EnergyPolynomial::one(prec);

    let (columns, mut entries, first_row) = match rec.kink {
        None => {
            let k = rec.m_s + 1;
            let entries: Vec<Vec<EnergyPolynomial>> = (0..k.min(rows))
                .map(|r| (0..k).map(|c| if r == c { one.clone() } else { zero.clone() }).collect())
                .collect();
            ((0..k).collect::<Vec<_>>(), entries, 0usize)
        }
        Some(n_star) => {
            let l = n_star + 1;
            // prefix rows 0..=n*: column 0 only
            let mut entries = vec![vec![one.clone(), zero.clone()]];
            for rho in 0..n_star {
                let row = rec.row(rho);
                if Float::with_val(bits, row.lead.abs_ref()) <= zero_tol {
                    return Err(Error::ZeroLeadingCoefficient(row.target));
                }
                let inv = Float::with_val(bits, row.lead.recip_ref());
                let mut acc = zero.clone();
                for (idx, c) in &row.terms {
                    acc = &acc + &(c * &entries[*idx][0]);
                }
                entries.push(vec![acc.scale(&inv), zero.clone()]);
            }
            entries.push(vec![zero.clone(), one.clone()]);
            (vec![0, l], entries, l)
        }
    };

    let mut rho = first_row;
    loop {
        let row = rec.row(rho);
        if row.target >= rows {
            break;
        }
        if row.target < entries.len() {
            rho += 1;
            continue;
        }
        if Float::with_val(bits, row.lead.abs_ref()) <= zero_tol {
            return Err(Error::ZeroLeadingCoefficient(row.target));
        }
        let inv = Float::with_val(bits, row.lead.recip_ref());
        let new_row = (0..columns.len())
            .map(|c| {
                let mut acc = zero.clone();
                for (idx, coeff) in &row.terms {
                    let m = &entries[*idx][c];
                    if !m.is_zero() {
                        acc = &acc + &(coeff * m);
                    }
                }
                acc.scale(&inv)
            })
            .collect();
        entries.push(new_row);
        rho += 1;
    }
    entries.truncate(rows);
    Ok(TransferSystem { representation: rec.representation, columns, entries, kink: rec.kink })
}

/// Higher moments implied by orthogonality beyond the QES degree:
/// `ν(n*+q) = -(1/Ξ_{n*+q}^{(n*+q)}) Σ_{i<n*+q} Ξ_i^{(n*+q)} ν(i)` for
/// `q >= 1`, up to index `up_to`.
pub fn qes_moment_closure(basis: &OrthoBasis, low: &[Float], up_to: usize) -> Result<Vec<Float>> {
    if low.is_empty() {
        return Err(Error::InvalidArgument("at least one low-order moment required".into()));
    }
    if up_to > basis.max_degree() {
        return Err(Error::ExtentError { index: up_to, extent: basis.max_degree() });
    }
    let bits = low[0].prec();
    let mut nu = low.to_vec();
    for k in low.len()..=up_to {
        let xi = &basis.xi[k];
        let mut s = Float::new(bits);
        for (i, v) in nu.iter().enumerate() {
            s += Float::with_val(bits, &xi[i] * v);
        }
        nu.push(-s / &xi[k]);
    }
    Ok(nu)
}
