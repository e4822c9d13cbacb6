//! OPPQ quantization: projection coefficients, determinants and root
//! tracking across truncation orders.
//!
//! For a representation with missing moments `u(ℓ)`, `ℓ ∈ columns`, the
//! projection coefficients are linear in the missing moments,
//! `Ω_j = Σ_ℓ 𝓜_{j,ℓ}(E) u(ℓ)` with `𝓜_{j,ℓ} = Σ_{i<=j} Ξ_i^{(j)} M(i,ℓ)`.
//! Demanding `Ω_N = ... = Ω_{N+k-1} = 0` gives the determinant `D_N(E)`.

use crate::moments::{build_recursion, build_transfer, Representation, TransferSystem};
use crate::numeric::{
    exact_string, null_vector, parse_exact, poly_det, real_roots, EnergyPolynomial, Precision,
};
use crate::orthopoly::{orthonormal_basis_from, OrthoBasis};
use crate::potential::PotentialSpec;
use crate::weights::{
    bd_weight_moments, interleave_full_line, parity_weight_moments, sextic_weight_moments, MomentTable,
    WeightSpec,
};
use crate::{Error, Result};
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// All missing moments, `(m_s+1) x (m_s+1)`.
    Full,
    /// Kinked Φ recursion, columns `{0, n*+1}`.
    PhiSegmented,
    /// Kinked recursion with `ν(0) = 0`: the single column `n*+1`.
    NonQesSameParity,
    /// Kinked Bessis recursion, columns `{0, n*+1}`.
    BdFull,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Full => "full",
            Mode::PhiSegmented => "phi-segmented",
            Mode::NonQesSameParity => "non-qes-same-parity",
            Mode::BdFull => "bd-full",
        }
    }

    pub fn parse(s: &str) -> Result<Mode> {
        [Mode::Full, Mode::PhiSegmented, Mode::NonQesSameParity, Mode::BdFull]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown mode '{s}'")))
    }

    /// The natural mode of a transfer system.
    pub fn default_for(t: &TransferSystem) -> Mode {
        match (t.kink, t.representation) {
            (Some(_), Representation::BdBessis) => Mode::BdFull,
            (Some(_), _) => Mode::PhiSegmented,
            (None, _) => Mode::Full,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reference weight paired with a representation: `𝒜` for Ψ moments, `𝒜²`
/// for Φ moments, `x^{2γ}𝒜²` for the Bessis form.
pub fn reference_weight(p: &PotentialSpec, rep: Representation) -> Result<WeightSpec> {
    if rep.family() != p.family {
        return Err(Error::FamilyMismatch { rep: rep.to_string(), family: p.family.to_string() });
    }
    let prec = p.prec();
    match rep {
        Representation::PsiU | Representation::PsiMu => WeightSpec::sextic(p.g.clone(), p.b.clone(), prec.float(4)),
        Representation::PhiNu => WeightSpec::sextic(p.g.clone(), p.b.clone(), prec.float(2)),
        Representation::BdA => Ok(WeightSpec::sextic(prec.one(), prec.zero(), prec.float(4))?.on_half_line()),
        Representation::BdTilde => Ok(WeightSpec::sextic(prec.one(), prec.zero(), prec.float(2))?.on_half_line()),
        Representation::BdBessis => WeightSpec::bd(p.gamma.clone()),
    }
}

/// Moments in the basis variable: even moments shifted by σ for parity
/// representations, all powers (odd ones zero) for the unified form.
pub fn reference_moments(p: &PotentialSpec, rep: Representation, count: usize) -> Result<Vec<Float>> {
    let w = reference_weight(p, rep)?;
    let sigma = p.sigma.index() as usize;
    let table = |n: usize| -> Result<MomentTable> {
        match rep {
            Representation::BdBessis => bd_weight_moments(&w, n),
            _ => sextic_weight_moments(&w, n.max(2)),
        }
    };
    Ok(match rep {
        Representation::PsiMu => interleave_full_line(&table(count.div_ceil(2))?, count)?,
        Representation::PsiU | Representation::PhiNu => {
            parity_weight_moments(&table(count + sigma)?, sigma, count)?.values
        }
        _ => {
            let mut v = table(count)?.values;
            v.truncate(count);
            v
        }
    })
}

#[derive(Clone, Debug)]
pub struct QuantizationProblem {
    pub basis: OrthoBasis,
    pub transfer: TransferSystem,
    pub mode: Mode,
    pub n_range: Vec<usize>,
    /// Moments the basis was generated from.
    pub reference_moments: Vec<Float>,
    /// Level labels are `offset + stride * index` within each order.
    pub level_offset: usize,
    pub level_stride: usize,
}

impl QuantizationProblem {
    /// Basis and transfer polynomials for `p` in representation `rep`;
    /// `mode = None` picks the natural mode.
    pub fn new(p: &PotentialSpec, rep: Representation, mode: Option<Mode>, n_range: Vec<usize>) -> Result<Self> {
        let rec = build_recursion(p, rep)?;
        let n_max = *n_range.iter().max().ok_or_else(|| Error::InvalidArgument("empty N range".into()))?;
        let k = rec.m_s + 1;
        let j_max = n_max + k;
        let moments = reference_moments(p, rep, 2 * j_max + 2)?;
        let basis = orthonormal_basis_from(&moments, j_max)?;
        let transfer = build_transfer(&rec, j_max + 1)?;
        let mode = mode.unwrap_or_else(|| Mode::default_for(&transfer));
        let (level_offset, level_stride) = match rep {
            Representation::PsiU | Representation::PhiNu => {
                let s = p.sigma.index() as usize;
                match (mode, transfer.kink) {
                    (Mode::NonQesSameParity, Some(n)) => (s + 2 * (n + 1), 2),
                    _ => (s, 2),
                }
            }
            _ => (0, 1),
        };
        Self::from_parts(basis, transfer, mode, n_range, moments, level_offset, level_stride)
    }

    pub fn from_parts(
        basis: OrthoBasis,
        transfer: TransferSystem,
        mode: Mode,
        n_range: Vec<usize>,
        reference_moments: Vec<Float>,
        level_offset: usize,
        level_stride: usize,
    ) -> Result<Self> {
        if !basis.is_normalized() {
            return Err(Error::InvalidArgument("basis must be orthonormalized".into()));
        }
        match (mode, transfer.kink, transfer.representation) {
            (Mode::Full, None, _) => {}
            (Mode::PhiSegmented, Some(_), Representation::PhiNu) => {}
            (Mode::BdFull, Some(_), Representation::BdBessis) => {}
            (Mode::NonQesSameParity, Some(_), _) => {}
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "mode {mode} does not fit a {} transfer system{}",
                    transfer.representation,
                    if transfer.kink.is_some() { " with a kink" } else { "" }
                )))
            }
        }
        let qp = QuantizationProblem { basis, transfer, mode, n_range, reference_moments, level_offset, level_stride };
        for &n in &qp.n_range {
            qp.check_order(n)?;
        }
        Ok(qp)
    }

    /// Transfer columns entering the determinant.
    pub fn columns(&self) -> Vec<usize> {
        let l = self.transfer.kink.map(|n| n + 1);
        match (self.mode, l) {
            (Mode::NonQesSameParity, Some(l)) => vec![l],
            _ => self.transfer.columns.clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.columns().len()
    }

    pub fn min_order(&self) -> usize {
        self.transfer.kink.map_or(0, |n| n + 1)
    }

    fn check_order(&self, n: usize) -> Result<()> {
        if n < self.min_order() {
            return Err(Error::InvalidArgument(format!("order N={n} below the minimum {}", self.min_order())));
        }
        let top = n + self.dimension() - 1;
        let extent = self.basis.max_degree().min(self.transfer.rows().saturating_sub(1));
        if top > extent {
            return Err(Error::ExtentError { index: top, extent });
        }
        Ok(())
    }

    pub fn prec(&self) -> Precision {
        self.basis.prec()
    }
}

/// `𝓜_{j,ℓ}(E)` for every transfer column.
pub fn omega_row(basis: &OrthoBasis, transfer: &TransferSystem, j: usize) -> Result<Vec<EnergyPolynomial>> {
    if j > basis.max_degree() || j >= basis.xi.len() {
        return Err(Error::ExtentError { index: j, extent: basis.xi.len().saturating_sub(1) });
    }
    if j >= transfer.rows() {
        return Err(Error::ExtentError { index: j, extent: transfer.rows().saturating_sub(1) });
    }
    let prec = basis.prec();
    Ok((0..transfer.columns.len())
        .map(|c| {
            let mut acc = EnergyPolynomial::zero(prec);
            for (i, x) in basis.xi[j].iter().enumerate().take(j + 1) {
                let m = &transfer.entries[i][c];
                if !m.is_zero() {
                    acc = &acc + &m.scale(x);
                }
            }
            acc
        })
        .collect())
}

fn matrix_rows(qp: &QuantizationProblem, n: usize) -> Result<Vec<Vec<EnergyPolynomial>>> {
    qp.check_order(n)?;
    let pos: Vec<usize> = qp
        .columns()
        .iter()
        .map(|&l| qp.transfer.column_position(l).expect("column present"))
        .collect();
    (n..n + pos.len())
        .map(|j| {
            let row = omega_row(&qp.basis, &qp.transfer, j)?;
            Ok(pos.iter().map(|&c| row[c].clone()).collect())
        })
        .collect()
}

/// Scale used to discard cancellation residue in assembled determinants.
pub const TRIM_SCALE: u32 = 200;

/// `D_N(E)`, with leading residue from cancellation removed.
pub fn build_determinant(qp: &QuantizationProblem, n: usize) -> Result<EnergyPolynomial> {
    let rows = matrix_rows(qp, n)?;
    let d = poly_det(&rows);
    let prec = qp.prec();
    Ok(d.trim_relative(&prec.float(TRIM_SCALE), &prec.tol(0.85)))
}

/// The numeric matrix `𝓜_{j,ℓ}(E)`, `j = N..N+k-1`.
pub fn determinant_matrix_at(qp: &QuantizationProblem, n: usize, e: &Float) -> Result<Vec<Vec<Float>>> {
    Ok(matrix_rows(qp, n)?
        .iter()
        .map(|r| r.iter().map(|p| p.eval(e)).collect())
        .collect())
}

/// Missing moments at an energy root, normalized so the largest is 1; one
/// value per entry of [`QuantizationProblem::columns`].
pub fn missing_moments(qp: &QuantizationProblem, n: usize, e: &Float) -> Result<Vec<Float>> {
    null_vector(&determinant_matrix_at(qp, n, e)?)
}

/// `Ω_j`, `j = 0..=j_max`, for given missing moments (one per transfer column).
pub fn reconstruct_state(
    e: &Float,
    missing: &[Float],
    basis: &OrthoBasis,
    transfer: &TransferSystem,
    j_max: usize,
) -> Result<Vec<Float>> {
    if missing.len() != transfer.columns.len() {
        return Err(Error::InvalidArgument(format!(
            "{} missing moments for {} columns",
            missing.len(),
            transfer.columns.len()
        )));
    }
    (0..=j_max)
        .map(|j| {
            let row = omega_row(basis, transfer, j)?;
            let mut s = Float::new(e.prec());
            for (p, u) in row.iter().zip(missing) {
                s += p.eval(e) * u;
            }
            Ok(s)
        })
        .collect()
}

/// Expands missing moments over [`QuantizationProblem::columns`] to all
/// transfer columns, filling dropped columns with zero.
pub fn full_missing(qp: &QuantizationProblem, values: &[Float]) -> Vec<Float> {
    let cols = qp.columns();
    let bits = qp.prec().bits();
    qp.transfer
        .columns
        .iter()
        .map(|l| cols.iter().position(|c| c == l).map_or_else(|| Float::new(bits), |i| values[i].clone()))
        .collect()
}

/// `D_N / q`, failing when the remainder exceeds `10^(-digits/2)` of `D_N`
/// (both measured on the energy scale `TRIM_SCALE`).
pub fn factor_out_qes(d: &EnergyPolynomial, q: &EnergyPolynomial) -> Result<EnergyPolynomial> {
    let prec = d.prec();
    let bits = prec.bits();
    let s = prec.float(TRIM_SCALE);
    let ds = d.rescale_argument(&s);
    let qs = q.rescale_argument(&s);
    let (quot, rem) = ds.div_rem(&qs)?;
    let norm = ds.max_abs_coeff();
    let r = rem.max_abs_coeff();
    if r > Float::with_val(bits, &norm * prec.tol(0.5)) {
        let ratio = if norm.is_zero() { f64::INFINITY } else { Float::with_val(bits, &r / &norm).to_f64() };
        return Err(Error::NonFactorizable(ratio));
    }
    Ok(quot.rescale_argument(&Float::with_val(bits, s.recip_ref())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RootClass {
    QesExact,
    Converging { level: usize },
    Spurious,
}

impl RootClass {
    pub fn name(self) -> &'static str {
        match self {
            RootClass::QesExact => "qes-exact",
            RootClass::Converging { .. } => "converging",
            RootClass::Spurious => "spurious",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootEntry {
    pub level: usize,
    pub energy: Float,
    pub class: RootClass,
    /// Distance to the nearest root at the previous order.
    pub delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderRoots {
    pub n: usize,
    pub degree: usize,
    pub roots: Vec<RootEntry>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootReport {
    pub representation: Representation,
    pub mode: Mode,
    pub digits: u32,
    pub window: (f64, f64),
    pub orders: Vec<OrderRoots>,
}

/// Roots of `D_N` on `[lo, hi]` for every order, classified.
pub fn scan_roots(qp: &QuantizationProblem, lo: &Float, hi: &Float) -> Result<RootReport> {
    let found: Vec<(usize, usize, Vec<Float>)> = qp
        .n_range
        .par_iter()
        .map(|&n| {
            let d = build_determinant(qp, n)?;
            let roots = if d.degree() == 0 { Vec::new() } else { real_roots(&d, lo, hi)?.roots };
            Ok((n, d.degree(), roots))
        })
        .collect::<Result<_>>()?;
    if found.iter().all(|(_, _, r)| r.is_empty()) {
        return Err(Error::EmptyWindow { lo: lo.to_f64(), hi: hi.to_f64() });
    }
    let prec = qp.prec();
    let classes = classify(&found.iter().map(|(_, _, r)| r.clone()).collect::<Vec<_>>(), &prec.tol(0.25));
    let orders = found
        .into_iter()
        .zip(classes)
        .map(|((n, degree, roots), cls)| OrderRoots {
            n,
            degree,
            roots: roots
                .into_iter()
                .zip(cls)
                .enumerate()
                .map(|(i, (energy, (class, delta)))| {
                    let level = qp.level_offset + qp.level_stride * i;
                    let class = match class {
                        RootClass::Converging { .. } => RootClass::Converging { level },
                        c => c,
                    };
                    RootEntry { level, energy, class, delta }
                })
                .collect(),
        })
        .collect();
    Ok(RootReport {
        representation: qp.transfer.representation,
        mode: qp.mode,
        digits: prec.digits(),
        window: (lo.to_f64(), hi.to_f64()),
        orders,
    })
}

fn nearest(x: &Float, set: &[Float]) -> Option<(usize, Float)> {
    set.iter()
        .enumerate()
        .map(|(i, y)| (i, Float::with_val(x.prec(), x - y).abs()))
        .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
}

/// Classification over consecutive orders: a root is QES-exact when it is
/// matched within `tol` at every later order and the matched run spans at
/// least three orders (all orders when fewer are given, never just one);
/// converging when its distance to the previous order shrinks.
pub fn classify(orders: &[Vec<Float>], tol: &Float) -> Vec<Vec<(RootClass, Option<f64>)>> {
    let n = orders.len();
    let matched = |x: &Float, t: usize| nearest(x, &orders[t]).is_some_and(|(_, d)| d <= *tol);
    let back: Vec<Vec<Option<(usize, Float)>>> = (0..n)
        .map(|t| {
            orders[t]
                .iter()
                .map(|x| if t == 0 { None } else { nearest(x, &orders[t - 1]) })
                .collect()
        })
        .collect();
    let mut out: Vec<Vec<(RootClass, Option<f64>)>> = orders.iter().map(|o| Vec::with_capacity(o.len())).collect();
    for t in 0..n {
        for (i, x) in orders[t].iter().enumerate() {
            let later = (t + 1..n).all(|u| matched(x, u));
            let earlier = (0..t).rev().take_while(|&u| matched(x, u)).count();
            let run = earlier + 1 + (n - t - 1);
            let delta = back[t][i].as_ref().map(|(_, d)| d.to_f64());
            let qes = n >= 2 && later && run >= n.min(3);
            let class = if qes {
                RootClass::QesExact
            } else {
                let shrinking = match &back[t][i] {
                    Some((j, d)) => match &back[t - 1][*j] {
                        Some((_, dp)) => d < dp,
                        None => forward_step(x, orders, t).is_some_and(|(_, d1)| d1 < *d),
                    },
                    None => forward_shrinks(orders, t, i),
                };
                if shrinking {
                    RootClass::Converging { level: i }
                } else {
                    RootClass::Spurious
                }
            };
            out[t].push((class, delta));
        }
    }
    out
}

/// Nearest root at order `t+1` and its distance.
fn forward_step(x: &Float, orders: &[Vec<Float>], t: usize) -> Option<(usize, Float)> {
    orders.get(t + 1).and_then(|o| nearest(x, o))
}

/// Whether the root nearest to `orders[t][i]` at order `t+1` moves less to
/// the order after it than it moved from `t`.
fn forward_shrinks(orders: &[Vec<Float>], t: usize, i: usize) -> bool {
    let Some((k, d1)) = forward_step(&orders[t][i], orders, t) else { return false };
    let Some((_, d2)) = forward_step(&orders[t + 1][k], orders, t + 1) else { return false };
    d2 < d1
}

#[derive(Serialize, Deserialize)]
struct RootJson {
    level: usize,
    energy: String,
    class: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    delta: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct OrderJson {
    #[serde(rename = "N")]
    n: usize,
    degree: usize,
    roots: Vec<RootJson>,
}

#[derive(Serialize, Deserialize)]
struct ReportJson {
    schema: String,
    representation: String,
    mode: Mode,
    digits: u32,
    window: (f64, f64),
    orders: Vec<OrderJson>,
}

pub const REPORT_SCHEMA: &str = "oppq/1";

impl RootReport {
    /// Roots at order `n`.
    pub fn at(&self, n: usize) -> Option<&OrderRoots> {
        self.orders.iter().find(|o| o.n == n)
    }

    /// Energies at order `n` as doubles.
    pub fn energies_f64(&self, n: usize) -> Vec<f64> {
        self.at(n).map(|o| o.roots.iter().map(|r| r.energy.to_f64()).collect()).unwrap_or_default()
    }

    /// Roots classified QES-exact at every order where they appear.
    pub fn qes_exact(&self) -> Vec<Float> {
        self.orders
            .last()
            .map(|o| o.roots.iter().filter(|r| r.class == RootClass::QesExact).map(|r| r.energy.clone()).collect())
            .unwrap_or_default()
    }

    /// `N,level,energy,class,delta` with energies to `decimals` places.
    pub fn to_csv(&self, decimals: usize) -> String {
        let mut out = String::from("N,level,energy,class,delta\n");
        for o in &self.orders {
            for r in &o.roots {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    o.n,
                    r.level,
                    crate::numeric::fixed(&r.energy, decimals),
                    r.class.name(),
                    r.delta.map(|d| format!("{d:.3e}")).unwrap_or_default()
                );
            }
        }
        out
    }

    /// JSON with exact decimal energies.
    pub fn to_json(&self) -> Result<String> {
        let doc = ReportJson {
            schema: REPORT_SCHEMA.into(),
            representation: self.representation.name().into(),
            mode: self.mode,
            digits: self.digits,
            window: self.window,
            orders: self
                .orders
                .iter()
                .map(|o| OrderJson {
                    n: o.n,
                    degree: o.degree,
                    roots: o
                        .roots
                        .iter()
                        .map(|r| RootJson {
                            level: r.level,
                            energy: exact_string(&r.energy),
                            class: r.class.name().into(),
                            delta: r.delta,
                        })
                        .collect(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<RootReport> {
        let doc: ReportJson = serde_json::from_str(s)?;
        if doc.schema != REPORT_SCHEMA {
            return Err(Error::Parse(format!("unsupported schema '{}'", doc.schema)));
        }
        let prec = Precision::new(doc.digits)?;
        let orders = doc
            .orders
            .into_iter()
            .map(|o| {
                let roots = o
                    .roots
                    .into_iter()
                    .map(|r| {
                        let class = match r.class.as_str() {
                            "qes-exact" => RootClass::QesExact,
                            "converging" => RootClass::Converging { level: r.level },
                            "spurious" => RootClass::Spurious,
                            other => return Err(Error::Parse(format!("unknown class '{other}'"))),
                        };
                        Ok(RootEntry { level: r.level, energy: parse_exact(&r.energy, prec)?, class, delta: r.delta })
                    })
                    .collect::<Result<_>>()?;
                Ok(OrderRoots { n: o.n, degree: o.degree, roots })
            })
            .collect::<Result<_>>()?;
        Ok(RootReport {
            representation: Representation::parse(&doc.representation)?,
            mode: doc.mode,
            digits: doc.digits,
            window: doc.window,
            orders,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bender_dunne::{build_quantizer, hill_series};
    use crate::moments::qes_moment_closure;
    use crate::potential::Parity;

    fn p() -> Precision {
        Precision::default()
    }

    fn sextic(m: i32, s: Parity) -> PotentialSpec {
        PotentialSpec::sextic(p().float(1), p().parse("sqrt(8)").unwrap(), p().float(m), s).unwrap()
    }

    fn bd() -> PotentialSpec {
        PotentialSpec::bender_dunne(p().float(1.5), p().float(-18)).unwrap()
    }

    fn has(v: &[f64], x: f64, tol: f64) -> bool {
        v.iter().any(|y| (y - x).abs() < tol)
    }

    #[test]
    fn omega_row_zero_is_single_term() {
        let qp = QuantizationProblem::new(&sextic(-13, Parity::Even), Representation::PsiU, None, vec![4]).unwrap();
        let row = omega_row(&qp.basis, &qp.transfer, 0).unwrap();
        assert_eq!(row[0], EnergyPolynomial::constant(qp.basis.xi[0][0].clone()));
        assert!(row[1].is_zero() && row[2].is_zero());
        assert!(matches!(omega_row(&qp.basis, &qp.transfer, 999), Err(Error::ExtentError { .. })));
    }

    #[test]
    fn omega_row_matches_scalar_propagation() {
        // u(ρ+3) = -b u(ρ+2) - m u(ρ+1) + E u(ρ) + 2ρ(2ρ-1) u(ρ-1), E = 2
        let spec = sextic(-13, Parity::Even);
        let qp = QuantizationProblem::new(&spec, Representation::PsiU, None, vec![4]).unwrap();
        let e = p().float(2);
        let b = p().parse("sqrt(8)").unwrap();
        for col in 0..3 {
            let mut u: Vec<Float> = (0..3).map(|i| p().float(u32::from(i == col))).collect();
            for r in 0..3usize {
                let mut v = -Float::with_val(p().bits(), &b * &u[r + 2]) + Float::with_val(p().bits(), &u[r + 1] * 13u32);
                v += Float::with_val(p().bits(), &e * &u[r]);
                if r >= 1 {
                    v += Float::with_val(p().bits(), &u[r - 1] * (2 * r * (2 * r - 1)) as u32);
                }
                u.push(v);
            }
            let mut direct = p().zero();
            for i in 0..=4 {
                direct += Float::with_val(p().bits(), &qp.basis.xi[4][i] * &u[i]);
            }
            let row = omega_row(&qp.basis, &qp.transfer, 4).unwrap();
            let got = row[col].eval(&e);
            let d = Float::with_val(p().bits(), &got - &direct).abs();
            assert!(d < p().tol(0.8) * Float::with_val(p().bits(), direct.abs_ref()).max(&p().one()));
        }
    }

    #[test]
    fn psi_u_qes_roots_and_converging_level() {
        let spec = sextic(-13, Parity::Even);
        let qp = QuantizationProblem::new(&spec, Representation::PsiU, None, (4..=12).collect()).unwrap();
        let rep = scan_roots(&qp, &p().float(-10), &p().float(70)).unwrap();
        let five = rep.energies_f64(5);
        for x in [-4.701631, 2.289850, 13.186912, 28.822848, 61.179448] {
            assert!(has(&five, x, 1e-6), "{x} missing from {five:?}");
        }
        let qes = rep.qes_exact();
        assert_eq!(qes.len(), 4);
        let at12 = rep.at(12).unwrap();
        let e8 = at12.roots.iter().find(|r| r.level == 8).unwrap();
        assert!((e8.energy.to_f64() - 47.613209).abs() < 1e-3);
        assert_eq!(e8.class, RootClass::Converging { level: 8 });
        for o in &rep.orders {
            for r in &o.roots {
                if r.level < 8 {
                    assert_eq!(r.class, RootClass::QesExact, "N={} level={}", o.n, r.level);
                }
            }
        }
        let degrees: Vec<usize> = rep.orders.iter().map(|o| o.degree).collect();
        assert!(degrees.windows(2).all(|w| w[1] > w[0]), "{degrees:?}");
    }

    #[test]
    fn phi_segmented_vanishes_at_qes_energies() {
        for (m, s) in [(-13, Parity::Even), (-15, Parity::Odd)] {
            let spec = sextic(m, s);
            let q = build_quantizer(&spec).unwrap();
            let qes = real_roots(&q, &p().float(-60), &p().float(60)).unwrap().roots;
            let qp = QuantizationProblem::new(&spec, Representation::PhiNu, None, (4..=8).collect()).unwrap();
            assert_eq!(qp.mode, Mode::PhiSegmented);
            for n in 4..=8 {
                let d = build_determinant(&qp, n).unwrap();
                for e in &qes {
                    let v = Float::with_val(p().bits(), d.eval(e).abs());
                    assert!(v <= p().tol(0.5) * d.eval_abs(e), "N={n}");
                }
                let quot = factor_out_qes(&d, &q).unwrap();
                assert_eq!(quot.degree() + 4, d.degree());
            }
        }
    }

    #[test]
    fn non_qes_same_parity_is_single_column() {
        let spec = sextic(-13, Parity::Even);
        let qp = QuantizationProblem::new(&spec, Representation::PhiNu, Some(Mode::NonQesSameParity), vec![6]).unwrap();
        assert_eq!(qp.columns(), vec![4]);
        let d = build_determinant(&qp, 6).unwrap();
        let direct = omega_row(&qp.basis, &qp.transfer, 6).unwrap()[1].clone();
        assert_eq!(d, direct.trim_relative(&p().float(TRIM_SCALE), &p().tol(0.85)));
        assert_eq!(qp.level_offset, 8);
    }

    #[test]
    fn qes_state_annihilates_high_omegas() {
        // Φ = 𝒜² Σ_i c_i(E*) x^{2i}: ν(ρ) = Σ_i c_i m(ρ+i)
        let spec = sextic(-13, Parity::Even);
        let qp = QuantizationProblem::new(&spec, Representation::PhiNu, None, vec![10]).unwrap();
        let c = hill_series(&spec, 3);
        let e = real_roots(&build_quantizer(&spec).unwrap(), &p().float(-60), &p().float(60)).unwrap().roots[1].clone();
        let nu = |rho: usize| {
            let mut s = p().zero();
            for (i, ci) in c.iter().enumerate() {
                s += ci.eval(&e) * &qp.reference_moments[rho + i];
            }
            s
        };
        let missing = vec![nu(0), nu(4)];
        let omega = reconstruct_state(&e, &missing, &qp.basis, &qp.transfer, 10).unwrap();
        let scale = Float::with_val(p().bits(), omega[0].abs_ref());
        for (j, w) in omega.iter().enumerate().skip(4) {
            assert!(Float::with_val(p().bits(), w.abs_ref()) < p().tol(0.5) * &scale, "j={j}");
        }
        assert!(omega[3].clone().abs() > p().tol(0.5) * &scale);
        // closure route gives the same higher moments
        let low: Vec<Float> = (0..4).map(nu).collect();
        let closed = qes_moment_closure(&qp.basis, &low, 6).unwrap();
        let d = Float::with_val(p().bits(), &closed[5] - &nu(5)).abs();
        assert!(d < p().tol(0.5) * Float::with_val(p().bits(), nu(5).abs_ref()));
    }

    #[test]
    fn reference_state_has_unit_first_coefficient() {
        let spec = sextic(-14, Parity::Even);
        let qp = QuantizationProblem::new(&spec, Representation::PsiU, None, vec![6]).unwrap();
        // Ψ = P^{(0)} 𝒜 has u(ρ) = m(ρ) / √m(0)
        let m0 = Float::with_val(p().bits(), qp.reference_moments[0].sqrt_ref());
        let u: Vec<Float> = (0..3).map(|i| Float::with_val(p().bits(), &qp.reference_moments[i] / &m0)).collect();
        let omega = reconstruct_state(&p().float(0), &u, &qp.basis, &qp.transfer, 1).unwrap();
        assert!(Float::with_val(p().bits(), &omega[0] - 1u32).abs() < p().tol(0.8));
    }

    #[test]
    fn bd_bessis_qes_roots() {
        let qp = QuantizationProblem::new(&bd(), Representation::BdBessis, None, (4..=6).collect()).unwrap();
        assert_eq!(qp.mode, Mode::BdFull);
        let rep = scan_roots(&qp, &p().float(-60), &p().float(200)).unwrap();
        let four = rep.energies_f64(4);
        for x in [-20.926277, -6.487752, 6.487752, 20.926277] {
            assert!(has(&four, x, 1e-6), "{x} not in {four:?}");
        }
        assert_eq!(rep.qes_exact().len(), 4);
        let q = build_quantizer(&bd()).unwrap();
        let d = build_determinant(&qp, 6).unwrap();
        assert!(factor_out_qes(&d, &q).is_ok());
    }

    #[test]
    fn factorization_rejects_wrong_divisor() {
        let spec = sextic(-13, Parity::Even);
        let qp = QuantizationProblem::new(&spec, Representation::PhiNu, None, vec![6]).unwrap();
        let d = build_determinant(&qp, 6).unwrap();
        let wrong = EnergyPolynomial::from_roots(&[p().float(1), p().float(3)], p());
        assert!(matches!(factor_out_qes(&d, &wrong), Err(Error::NonFactorizable(_))));
    }

    #[test]
    fn mode_checks() {
        let spec = sextic(-13, Parity::Even);
        let err = QuantizationProblem::new(&spec, Representation::PsiU, Some(Mode::PhiSegmented), vec![4]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        let err = QuantizationProblem::new(&spec, Representation::PhiNu, None, vec![2]);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        assert!(matches!(QuantizationProblem::new(&bd(), Representation::PsiU, None, vec![4]), Err(Error::FamilyMismatch { .. })));
        for m in [Mode::Full, Mode::PhiSegmented, Mode::NonQesSameParity, Mode::BdFull] {
            assert_eq!(Mode::parse(m.name()).unwrap(), m);
        }
    }

    #[test]
    fn classification_rules() {
        let f = |v: &[f64]| v.iter().map(|&x| p().float(x)).collect::<Vec<_>>();
        let orders = vec![f(&[1.0, 10.0, 50.0]), f(&[1.0, 10.5, 77.0]), f(&[1.0, 10.6, 20.0]), f(&[1.0, 10.62])];
        let c = classify(&orders, &p().tol(0.25));
        assert!(c.iter().all(|o| o[0].0 == RootClass::QesExact));
        assert_eq!(c[2][1].0, RootClass::Converging { level: 1 });
        assert_eq!(c[3][1].0, RootClass::Converging { level: 1 });
        assert_eq!(c[1][2].0, RootClass::Spurious);
        assert_eq!(c[0][1].1, None);
        assert!((c[1][1].1.unwrap() - 0.5).abs() < 1e-12);
        let single = classify(&[f(&[1.0])], &p().tol(0.25));
        assert_eq!(single[0][0].0, RootClass::Spurious);
    }

    #[test]
    fn report_round_trips_through_json() {
        let spec = sextic(-15, Parity::Odd);
        let qp = QuantizationProblem::new(&spec, Representation::PhiNu, None, (4..=6).collect()).unwrap();
        let rep = scan_roots(&qp, &p().float(-10), &p().float(60)).unwrap();
        let json = rep.to_json().unwrap();
        assert!(json.contains("\"schema\": \"oppq/1\""));
        let back = RootReport::from_json(&json).unwrap();
        assert_eq!(back, rep);
        let csv = rep.to_csv(6);
        assert!(csv.starts_with("N,level,energy,class,delta\n4,1,-6.629227,qes-exact,"));
    }

    #[test]
    fn empty_window() {
        let qp = QuantizationProblem::new(&sextic(-13, Parity::Even), Representation::PsiU, None, vec![4, 5]).unwrap();
        assert!(matches!(scan_roots(&qp, &p().float(1000), &p().float(1001)), Err(Error::EmptyWindow { .. })));
    }

    #[test]
    fn zero_moment_law_at_converging_root() {
        let spec = sextic(-13, Parity::Even);
        let mut ratios = Vec::new();
        for n in [6, 8, 10] {
            let qp = QuantizationProblem::new(&spec, Representation::PhiNu, None, vec![n]).unwrap();
            let d = build_determinant(&qp, n).unwrap();
            let q = build_quantizer(&spec).unwrap();
            let quot = factor_out_qes(&d, &q).unwrap();
            let r = real_roots(&quot, &p().float(40), &p().float(55)).unwrap().roots;
            let mm = missing_moments(&qp, n, &r[0]).unwrap();
            ratios.push(Float::with_val(p().bits(), &mm[0] / &mm[1]).abs().to_f64());
        }
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
    }
}
