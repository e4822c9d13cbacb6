//! Independent eigenvalue solvers used to validate converging OPPQ roots.
//!
//! Three methods are available: a double-precision Numerov shooter with
//! Richardson extrapolation, a harmonic-oscillator basis diagonalization, and
//! an arbitrary-precision Taylor-series shooter that refines the Numerov
//! estimate to many digits and also yields wavefunction moments.

mod basis;
mod numerov;
mod taylor;

use crate::numeric::{exact_string, parse_exact, Precision};
use crate::potential::{Family, Parity, PotentialSpec};
use crate::{Error, Result};
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// `H = -d²/dx² + v₀ + v₂x² + v₄x⁴ + v₆x⁶`, plus `γ(γ-1)/x²` on the half
/// line when `gamma` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    pub v: [Float; 4],
    pub gamma: Option<Float>,
    pub parity: Parity,
}

impl Hamiltonian {
    pub fn from_potential(p: &PotentialSpec) -> Self {
        let prec = p.prec();
        match p.family {
            Family::SexticAnharmonic => Hamiltonian {
                v: [prec.zero(), p.m.clone(), p.b.clone(), p.g.clone()],
                gamma: None,
                parity: p.sigma,
            },
            Family::BenderDunne => Hamiltonian {
                v: [prec.zero(), p.m.clone(), prec.zero(), prec.one()],
                gamma: Some(p.gamma.clone()),
                parity: Parity::Even,
            },
        }
    }

    /// `-d²/dx² + x²`.
    pub fn harmonic(prec: Precision, parity: Parity) -> Self {
        Hamiltonian { v: [prec.zero(), prec.one(), prec.zero(), prec.zero()], gamma: None, parity }
    }

    pub fn prec(&self) -> Precision {
        Precision::of(&self.v[0])
    }

    pub(crate) fn parity_index(&self) -> usize {
        self.parity.index() as usize
    }

    pub(crate) fn gamma_f64(&self) -> Option<f64> {
        self.gamma.as_ref().map(Float::to_f64)
    }

    pub(crate) fn v_f64(&self, x: f64) -> f64 {
        let x2 = x * x;
        let [a, b, c, d] = self.v.clone().map(|v| v.to_f64());
        let mut v = a + x2 * (b + x2 * (c + x2 * d));
        if let Some(g) = self.gamma_f64() {
            v += g * (g - 1.0) / x2;
        }
        v
    }

    /// Full-line level label of the `k`-th state of the sector.
    pub fn label(&self, k: usize) -> usize {
        if self.gamma.is_some() {
            k
        } else {
            2 * k + self.parity_index()
        }
    }

    fn describe(&self) -> String {
        let d = |x: &Float| x.to_string_radix(10, Some(30));
        format!(
            "v=[{},{},{},{}] gamma={} parity={}",
            d(&self.v[0]),
            d(&self.v[1]),
            d(&self.v[2]),
            d(&self.v[3]),
            self.gamma.as_ref().map_or("none".into(), d),
            self.parity_index()
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    GridNumerov,
    HarmonicBasis,
    TaylorShooting,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub method: OracleMethod,
    /// Outer boundary; chosen from the tunnelling action when absent.
    pub extent: Option<f64>,
    /// Grid spacing (Numerov) or maximal series step (Taylor).
    pub step: f64,
    /// Basis functions before parity selection.
    pub basis_size: usize,
    /// Target digits of the Taylor shooter.
    pub digits: u32,
    /// Largest acceptable error estimate.
    pub tol: f64,
}

impl OracleConfig {
    pub fn numerov() -> Self {
        OracleConfig { method: OracleMethod::GridNumerov, extent: None, step: 4e-3, basis_size: 0, digits: 0, tol: 1e-6 }
    }

    pub fn harmonic_basis() -> Self {
        OracleConfig { method: OracleMethod::HarmonicBasis, extent: None, step: 0.0, basis_size: 160, digits: 0, tol: 1e-7 }
    }

    pub fn taylor(digits: u32) -> Self {
        OracleConfig {
            method: OracleMethod::TaylorShooting,
            extent: None,
            step: 0.0625,
            basis_size: 0,
            digits,
            tol: 10f64.powi(-(digits as i32) + 5),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleLevel {
    /// Index within the sector.
    pub index: usize,
    /// Full-line label (`2k + σ` for whole-line potentials).
    pub level: usize,
    pub energy: Float,
    pub error: f64,
}

/// Outer boundary where the tunnelling action past the turning point of `e`
/// reaches `action`.
fn extent(h: &Hamiltonian, e: f64, action: f64) -> f64 {
    let dx = 1e-3;
    let mut x = dx;
    let mut turn = 0.0;
    while x < 50.0 {
        let v = h.v_f64(x);
        if v <= e {
            turn = x;
        } else if x > turn + 1.0 && v > e.abs() * 4.0 + 100.0 {
            break;
        }
        x += dx;
    }
    let mut s = 0.0;
    let mut x = turn;
    while s < action.max(3.0) && x < 50.0 {
        s += (h.v_f64(x) - e).max(0.0).sqrt() * dx;
        x += dx;
    }
    x + 0.1
}

fn min_potential(h: &Hamiltonian) -> f64 {
    let lo = if h.gamma.is_some() { 0.05 } else { 0.0 };
    (0..=1000).map(|i| h.v_f64(lo + 5.0 * i as f64 / 1000.0)).fold(f64::INFINITY, f64::min)
}

/// Energy bracket holding the lowest `levels` states and the grid extent
/// adequate for all of them.
fn bracket(h: &Hamiltonian, levels: usize, step: f64, action: f64, fixed: Option<f64>) -> Result<(f64, f64, f64)> {
    let mut lo = min_potential(h) - 10.0;
    let mut cap = lo.abs() + 10.0;
    for _ in 0..40 {
        let x = fixed.unwrap_or_else(|| extent(h, cap, action));
        if numerov::shoot(h, lo, step, x).1 > 0 {
            lo = 2.0 * lo - 10.0;
            continue;
        }
        if numerov::shoot(h, cap, step, x).1 >= levels {
            return Ok((lo, cap, x));
        }
        cap = 2.0 * cap + 10.0;
    }
    Err(Error::NotConverged(format!("could not bracket {levels} levels")))
}

fn numerov_levels(h: &Hamiltonian, levels: usize, cfg: &OracleConfig) -> Result<Vec<(f64, f64)>> {
    let (lo, cap, x) = bracket(h, levels, cfg.step, 20.0, cfg.extent)?;
    (0..levels)
        .into_par_iter()
        .map(|k| {
            let e1 = numerov::level(h, k, cfg.step, x, (lo, cap))?;
            let e2 = numerov::level(h, k, cfg.step / 2.0, x, (lo, cap))?;
            let e = e2 + (e2 - e1) / 15.0;
            Ok((e, (e2 - e1).abs() / 15.0 + 1e-12 * e.abs()))
        })
        .collect()
}

fn basis_levels(h: &Hamiltonian, levels: usize, cfg: &OracleConfig) -> Result<Vec<(f64, f64)>> {
    let k = cfg.basis_size;
    let a = basis::eigenvalues(h, k, basis::default_omega(h, k))?;
    let b = basis::eigenvalues(h, k + 40, basis::default_omega(h, k + 40))?;
    if a.len() < levels {
        return Err(Error::InvalidArgument(format!("basis of {k} holds fewer than {levels} sector levels")));
    }
    Ok((0..levels).map(|i| (b[i], (b[i] - a[i]).abs() + 1e-12 * b[i].abs())).collect())
}

/// High-precision refinement of one level; returns the energy, an error
/// estimate and the converged trajectory.
/// `full_tail` extends the domain until `ψ` itself, not just `ψ²`, is
/// negligible at the boundary, as needed for moments.
fn taylor_level(
    h: &Hamiltonian,
    k: usize,
    guess: (f64, f64),
    cfg: &OracleConfig,
    full_tail: bool,
) -> Result<(Float, f64, taylor::Trajectory)> {
    let d = cfg.digits.max(20);
    let growth = if full_tail { d + 10 } else { (d + 10) / 2 };
    let work = Precision::new(d + growth + 20)?;
    let bits = work.bits();
    let action = f64::from(2 * growth) * std::f64::consts::LN_10 / 2.0;
    let x_end = cfg.extent.unwrap_or_else(|| extent(h, guess.0 + 10.0, action));
    let target = work.tol(f64::from(d + 2) / f64::from(work.digits()));
    let solve = |x_end: f64, prec: Precision, center: &Float, width: f64| -> Result<(Float, taylor::Trajectory)> {
        let mut w = width;
        let hp = h_at(h, prec);
        let xe = prec.float(x_end);
        let hm = prec.float(cfg.step);
        let tg = prec.float(&target);
        for _ in 0..8 {
            let lo = Float::with_val(prec.bits(), center - w);
            let hi = Float::with_val(prec.bits(), center + w);
            match taylor::refine(&hp, k, &lo, &hi, &xe, &hm, prec, &tg) {
                Ok(r) => return Ok(r),
                Err(Error::NotConverged(_)) => w *= 10.0,
                Err(e) => return Err(e),
            }
        }
        Err(Error::NotConverged(format!("Taylor shooting could not bracket level {k}")))
    };
    let center = work.float(guess.0);
    let (e1, traj) = solve(x_end, work, &center, (guess.1 * 100.0).max(1e-7))?;
    let finer = work.raised(10);
    let (e2, _) = solve(x_end + 0.25, finer, &finer.float(&e1), 1e-12)?;
    let err = Float::with_val(bits, &e2 - &e1).abs().to_f64();
    Ok((e1, err, traj))
}

fn h_at(h: &Hamiltonian, prec: Precision) -> Hamiltonian {
    Hamiltonian {
        v: h.v.clone().map(|v| prec.float(&v)),
        gamma: h.gamma.as_ref().map(|g| prec.float(g)),
        parity: h.parity,
    }
}

/// Lowest `levels` eigenvalues of the sector with error estimates.
pub fn hamiltonian_spectrum(h: &Hamiltonian, levels: usize, cfg: &OracleConfig) -> Result<Vec<OracleLevel>> {
    if levels == 0 {
        return Ok(Vec::new());
    }
    let prec = h.prec();
    let raw: Vec<(Float, f64)> = match cfg.method {
        OracleMethod::GridNumerov => {
            numerov_levels(h, levels, cfg)?.into_iter().map(|(e, r)| (prec.float(e), r)).collect()
        }
        OracleMethod::HarmonicBasis => {
            basis_levels(h, levels, cfg)?.into_iter().map(|(e, r)| (prec.float(e), r)).collect()
        }
        OracleMethod::TaylorShooting => {
            let guesses = numerov_levels(h, levels, &OracleConfig::numerov())?;
            guesses
                .into_par_iter()
                .enumerate()
                .map(|(k, g)| taylor_level(h, k, g, cfg, false).map(|(e, r, _)| (prec.float(&e), r)))
                .collect::<Result<_>>()?
        }
    };
    raw.into_iter()
        .enumerate()
        .map(|(k, (energy, error))| {
            if !(error <= cfg.tol) {
                return Err(Error::NotConverged(format!(
                    "level {} error estimate {error:e} exceeds {:e}",
                    h.label(k),
                    cfg.tol
                )));
            }
            Ok(OracleLevel { index: k, level: h.label(k), energy, error })
        })
        .collect()
}

/// Lowest `levels` eigenvalues of the potential's sector (its parity for
/// whole-line potentials).
pub fn oracle_spectrum(p: &PotentialSpec, levels: usize, cfg: &OracleConfig) -> Result<Vec<OracleLevel>> {
    hamiltonian_spectrum(&Hamiltonian::from_potential(p), levels, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentKind {
    /// `∫ x^k Ψ dx`.
    Psi,
    /// `∫ x^k Φ dx` with `Φ = 𝒜 Ψ` (whole line) or `Φ = x^γ 𝒜 Ψ` (half line),
    /// `𝒜` the asymptotic factor.
    Phi,
}

/// Power moments `k = 0..=p_max` of the normalized (`∫ Ψ² = 1`, positive
/// near the origin) eigenstate with full-line label `level`, from the Taylor
/// shooter at `cfg.digits`.
pub fn oracle_wavefunction_moments(
    p: &PotentialSpec,
    level: usize,
    p_max: usize,
    kind: MomentKind,
    cfg: &OracleConfig,
) -> Result<Vec<Float>> {
    hamiltonian_wavefunction_moments(&Hamiltonian::from_potential(p), level, p_max, kind, cfg)
}

/// [`oracle_wavefunction_moments`] for an explicit Hamiltonian; the parity of
/// a whole-line `level` overrides the Hamiltonian's.
pub fn hamiltonian_wavefunction_moments(
    h: &Hamiltonian,
    level: usize,
    p_max: usize,
    kind: MomentKind,
    cfg: &OracleConfig,
) -> Result<Vec<Float>> {
    let mut h = h.clone();
    if kind == MomentKind::Phi && h.gamma.is_none() && h.v[3] <= 0 {
        return Err(Error::InvalidArgument("the Φ form needs a sextic term".into()));
    }
    let k = if h.gamma.is_some() {
        level
    } else {
        h.parity = Parity::from_index((level % 2) as u32)?;
        level / 2
    };
    let cfg = OracleConfig { method: OracleMethod::TaylorShooting, ..cfg.clone() };
    let guesses = numerov_levels(&h, k + 1, &OracleConfig::numerov())?;
    let (_, err, traj) = taylor_level(&h, k, guesses[k], &cfg, true)?;
    if !(err <= cfg.tol) {
        return Err(Error::NotConverged(format!("level {level} error estimate {err:e}")));
    }
    let bits = traj.end.prec();
    let work = Precision::from_bits(bits);
    let gamma = h.gamma.as_ref().map(|g| work.float(g));
    let g_off = gamma.clone().unwrap_or_else(|| work.zero());
    // ∫ Ψ²
    let norm_alpha = Float::with_val(bits, &g_off * 2u32);
    let mut norm = taylor::integrate_moments(&traj, &[norm_alpha], None, true).remove(0);
    if gamma.is_none() {
        norm *= 2u32;
    }
    let norm = norm.sqrt();
    let s_poly: Option<Vec<Float>> = match kind {
        MomentKind::Psi => None,
        MomentKind::Phi => Some(match &gamma {
            None => {
                let sg = work.float(&h.v[3]).sqrt();
                let c2 = -(Float::with_val(bits, &work.float(&h.v[2]) / &sg) / 4u32);
                let c4 = -(Float::with_val(bits, &sg / 4u32));
                vec![work.zero(), work.zero(), c2, work.zero(), c4]
            }
            Some(_) => vec![work.zero(), work.zero(), work.zero(), work.zero(), work.float(-0.25)],
        }),
    };
    let extra = match (kind, &gamma) {
        (MomentKind::Phi, Some(g)) => Float::with_val(bits, g * 2u32),
        (_, Some(g)) => g.clone(),
        (_, None) => work.zero(),
    };
    let alphas: Vec<Float> = (0..=p_max).map(|q| Float::with_val(bits, &extra + q as u32)).collect();
    let raw = taylor::integrate_moments(&traj, &alphas, s_poly.as_deref(), false);
    let prec = h.prec();
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(q, v)| {
            let v = v / &norm;
            if gamma.is_some() {
                prec.float(v)
            } else if (q + h.parity_index()) % 2 == 1 {
                prec.zero()
            } else {
                prec.float(v * 2u32)
            }
        })
        .collect())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CachedLevel {
    index: usize,
    level: usize,
    energy: String,
    error: f64,
}

/// JSON file of spectra keyed by a hash of the Hamiltonian, level count and
/// configuration.
#[derive(Debug)]
pub struct OracleCache {
    path: PathBuf,
    entries: BTreeMap<String, Vec<CachedLevel>>,
}

impl OracleCache {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let entries = match std::fs::read_to_string(&path) {
            Ok(s) => serde_json::from_str(&s)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(OracleCache { path, entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn save(&self) -> Result<()> {
        if let Some(dir) = self.path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(&self.path, serde_json::to_string_pretty(&self.entries)?)?;
        Ok(())
    }
}

pub fn cache_key(h: &Hamiltonian, levels: usize, cfg: &OracleConfig) -> Result<String> {
    let mut hasher = Sha256::new();
    hasher.update(h.describe().as_bytes());
    hasher.update(levels.to_le_bytes());
    hasher.update(serde_json::to_string(cfg)?.as_bytes());
    hasher.update(h.prec().digits().to_le_bytes());
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// [`oracle_spectrum`] through the cache; new results are saved immediately.
pub fn oracle_spectrum_cached(
    cache: &mut OracleCache,
    p: &PotentialSpec,
    levels: usize,
    cfg: &OracleConfig,
) -> Result<Vec<OracleLevel>> {
    let h = Hamiltonian::from_potential(p);
    let key = cache_key(&h, levels, cfg)?;
    let prec = p.prec();
    if let Some(hit) = cache.entries.get(&key) {
        return hit
            .iter()
            .map(|c| {
                Ok(OracleLevel { index: c.index, level: c.level, energy: parse_exact(&c.energy, prec)?, error: c.error })
            })
            .collect();
    }
    let fresh = hamiltonian_spectrum(&h, levels, cfg)?;
    cache.entries.insert(
        key,
        fresh
            .iter()
            .map(|l| CachedLevel { index: l.index, level: l.level, energy: exact_string(&l.energy), error: l.error })
            .collect(),
    );
    cache.save()?;
    Ok(fresh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bender_dunne::build_quantizer;
    use crate::numeric::real_roots;

    fn p() -> Precision {
        Precision::default()
    }

    fn sextic(m: i32, s: Parity) -> PotentialSpec {
        PotentialSpec::sextic(p().float(1), p().parse("sqrt(8)").unwrap(), p().float(m), s).unwrap()
    }

    #[test]
    fn harmonic_levels_are_odd_integers() {
        for cfg in [OracleConfig::numerov(), OracleConfig::harmonic_basis(), OracleConfig::taylor(30)] {
            for par in [Parity::Even, Parity::Odd] {
                let h = Hamiltonian::harmonic(p(), par);
                let lv = hamiltonian_spectrum(&h, 3, &cfg).unwrap();
                for l in &lv {
                    let want = (2 * l.level + 1) as f64;
                    assert!((l.energy.to_f64() - want).abs() < 1e-7, "{:?} {} {}", cfg.method, l.level, l.energy);
                }
            }
        }
    }

    #[test]
    fn methods_agree_on_sextic_e8() {
        let s = sextic(-13, Parity::Even);
        let a = oracle_spectrum(&s, 5, &OracleConfig::numerov()).unwrap();
        let b = oracle_spectrum(&s, 5, &OracleConfig::harmonic_basis()).unwrap();
        assert_eq!(a[4].level, 8);
        assert!((a[4].energy.to_f64() - 47.613209).abs() < 1e-5);
        assert!((b[4].energy.to_f64() - 47.613209).abs() < 1e-5);
        for (x, y) in a.iter().zip(&b) {
            assert!((x.energy.to_f64() - y.energy.to_f64()).abs() < 1e-6);
        }
    }

    #[test]
    fn taylor_reproduces_qes_energies() {
        let s = sextic(-13, Parity::Even);
        let lv = oracle_spectrum(&s, 4, &OracleConfig::taylor(35)).unwrap();
        let q = real_roots(&build_quantizer(&s).unwrap(), &p().float(-60), &p().float(60)).unwrap().roots;
        for (l, e) in lv.iter().zip(&q) {
            let d = Float::with_val(p().bits(), &l.energy - e).abs();
            assert!(d < 1e-30, "level {} off by {}", l.level, d);
        }
    }

    #[test]
    fn bd_level_four() {
        let s = PotentialSpec::bender_dunne(p().float(1.5), p().float(-18)).unwrap();
        let a = oracle_spectrum(&s, 5, &OracleConfig::numerov()).unwrap();
        assert!((a[4].energy.to_f64() - 38.002392718).abs() < 1e-6, "{}", a[4].energy);
        let t = oracle_spectrum(&s, 5, &OracleConfig::taylor(30)).unwrap();
        assert!((t[4].energy.to_f64() - 38.002392718).abs() < 1e-6);
        assert!((t[1].energy.to_f64() + 6.487752).abs() < 1e-6);
        assert!(matches!(
            oracle_spectrum(&s, 2, &OracleConfig::harmonic_basis()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn grid_refinement_is_consistent() {
        let s = sextic(-15, Parity::Odd);
        let a = oracle_spectrum(&s, 3, &OracleConfig::numerov()).unwrap();
        let fine = OracleConfig { step: 2e-3, ..OracleConfig::numerov() };
        let b = oracle_spectrum(&s, 3, &fine).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let d = (x.energy.to_f64() - y.energy.to_f64()).abs();
            assert!(d <= x.error.max(y.error) + 1e-10, "{d} vs {}", x.error);
        }
    }

    #[test]
    fn harmonic_ground_state_moments() {
        // ψ₀ = π^{-1/4} e^{-x²/2}: μ(0) = μ(2) = √2 π^{1/4}
        let h = Hamiltonian::harmonic(p(), Parity::Even);
        let mu = hamiltonian_wavefunction_moments(&h, 0, 3, MomentKind::Psi, &OracleConfig::taylor(30)).unwrap();
        assert!(mu[1].is_zero() && mu[3].is_zero());
        let want = Float::with_val(p().bits(), rug::float::Constant::Pi).sqrt().sqrt() * p().float(2).sqrt();
        for k in [0, 2] {
            let d = Float::with_val(p().bits(), &mu[k] - &want).abs();
            assert!(d < 1e-25, "μ({k}) = {} off by {d}", mu[k]);
        }
        assert!(hamiltonian_wavefunction_moments(&h, 0, 1, MomentKind::Phi, &OracleConfig::taylor(30)).is_err());
    }

    #[test]
    fn zeroth_phi_moment_of_qes_ground_state_is_nonzero() {
        let s = sextic(-13, Parity::Even);
        let nu = oracle_wavefunction_moments(&s, 0, 0, MomentKind::Phi, &OracleConfig::taylor(30)).unwrap();
        assert!(nu[0].clone().abs() > 0.1);
    }

    #[test]
    fn non_qes_state_has_vanishing_low_phi_moments() {
        let s = sextic(-13, Parity::Even);
        let nu = oracle_wavefunction_moments(&s, 8, 10, MomentKind::Phi, &OracleConfig::taylor(30)).unwrap();
        let top = nu[8].clone().abs();
        for rho in 0..=3 {
            let r = Float::with_val(p().bits(), nu[2 * rho].abs_ref()) / &top;
            assert!(r < 1e-20, "ν({rho}) ratio {r}");
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("oracle.json");
        let s = sextic(-13, Parity::Even);
        let cfg = OracleConfig::harmonic_basis();
        let mut c = OracleCache::open(&path).unwrap();
        let a = oracle_spectrum_cached(&mut c, &s, 3, &cfg).unwrap();
        let mut c2 = OracleCache::open(&path).unwrap();
        assert_eq!(c2.len(), 1);
        let b = oracle_spectrum_cached(&mut c2, &s, 3, &cfg).unwrap();
        assert_eq!(a, b);
        let other = cache_key(&Hamiltonian::from_potential(&sextic(-14, Parity::Even)), 3, &cfg).unwrap();
        assert_ne!(other, cache_key(&Hamiltonian::from_potential(&s), 3, &cfg).unwrap());
    }
}
