use crate::config::{ConfigError, Output, RunConfig};
use crate::table::{render, root_table};
use oppq::bender_dunne::build_quantizer;
use oppq::moments::Representation;
use oppq::numeric::{exact_string, fixed, real_roots};
use oppq::oracle::{oracle_spectrum, oracle_spectrum_cached, OracleCache, OracleConfig, OracleLevel};
use oppq::orthopoly::{orthonormal_basis_from, orthonormality_residual};
use oppq::potential::{is_qes_potential, Family, Parity, PotentialSpec, QesClass};
use oppq::quantizer::{
    build_determinant, factor_out_qes, full_missing, missing_moments, reference_moments, reference_weight, scan_roots,
    Mode, QuantizationProblem, RootClass, RootReport, REPORT_SCHEMA,
};
use oppq::weights::MomentTable;
use oppq::{EnergyPolynomial, Error, Float};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::PathBuf;

#[derive(Debug)]
pub enum Failure {
    Config(ConfigError),
    Lib(Error),
    Verify(usize),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Verify(_) => 1,
            Failure::Lib(e) => match e {
                Error::NotQesType => 4,
                Error::InvalidPrecision(_)
                | Error::InvalidArgument(_)
                | Error::FamilyMismatch { .. }
                | Error::ExtentError { .. }
                | Error::LengthError { .. }
                | Error::Parse(_)
                | Error::Io(_) => 2,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "config error: {e}"),
            Failure::Lib(e) => write!(f, "{e}"),
            Failure::Verify(n) => write!(f, "{n} propert{} failed", if *n == 1 { "y" } else { "ies" }),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Out = Result<String, Failure>;

fn to_json<T: Serialize>(v: &T) -> Out {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Failure::Lib(e.into()))
}

fn problem(cfg: &RunConfig) -> Result<QuantizationProblem, Failure> {
    Ok(QuantizationProblem::new(&cfg.potential, cfg.representation, cfg.mode, cfg.n_range())?)
}

pub fn solve_report(cfg: &RunConfig) -> Result<RootReport, Failure> {
    let qp = problem(cfg)?;
    Ok(scan_roots(&qp, &cfg.window.0, &cfg.window.1)?)
}

/// Oracle energies keyed by level label, covering labels up to `max_level`.
fn oracle_map(p: &PotentialSpec, rep: Representation, max_level: usize) -> Result<BTreeMap<usize, Float>, Error> {
    let cfg = OracleConfig::numerov();
    let levels: Vec<OracleLevel> = match (p.family, rep) {
        (Family::BenderDunne, _) => oracle_spectrum(p, max_level + 1, &cfg)?,
        (_, Representation::PsiMu) => {
            let mut all = oracle_spectrum(&p.with_sigma(Parity::Even), max_level / 2 + 1, &cfg)?;
            all.extend(oracle_spectrum(&p.with_sigma(Parity::Odd), max_level.saturating_sub(1) / 2 + 1, &cfg)?);
            all
        }
        _ => {
            let s = p.sigma.index() as usize;
            oracle_spectrum(p, max_level.saturating_sub(s) / 2 + 1, &cfg)?
        }
    };
    Ok(levels.into_iter().map(|l| (l.level, l.energy)).collect())
}

const MAX_ORACLE_LEVEL: usize = 24;

pub fn solve(cfg: &RunConfig, decimals: usize) -> Out {
    let report = solve_report(cfg)?;
    Ok(match cfg.output {
        Output::Csv => report.to_csv(decimals),
        Output::Json => report.to_json()? + "\n",
        Output::Table => {
            let oracle = if cfg.oracle_or(false) {
                let top = report.orders.iter().flat_map(|o| o.roots.iter().map(|r| r.level)).max().unwrap_or(0);
                Some(oracle_map(&cfg.potential, cfg.representation, top.min(MAX_ORACLE_LEVEL))?)
            } else {
                None
            };
            root_table(&report, decimals, oracle.as_ref())
        }
    })
}

/// Cauchy bound on the moduli of the roots.
fn root_bound(q: &EnergyPolynomial) -> Float {
    let prec = q.prec();
    let lead = Float::with_val(prec.bits(), q.coeff(q.degree()).abs_ref());
    let mut worst = prec.zero();
    for c in &q.coeffs()[..q.degree()] {
        let r = Float::with_val(prec.bits(), c / &lead).abs();
        if r > worst {
            worst = r;
        }
    }
    worst + 1u32
}

#[derive(Serialize)]
struct QesPolyJson {
    schema: &'static str,
    kind: &'static str,
    n_star: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_star: Option<u32>,
    coefficients: Vec<String>,
    roots: Vec<String>,
}

pub fn qes_poly(cfg: &RunConfig, decimals: usize) -> Out {
    let QesClass::Yes { n_star, sigma_star } = is_qes_potential(&cfg.potential) else {
        return Err(Error::NotQesType.into());
    };
    let q = build_quantizer(&cfg.potential)?;
    let bound = root_bound(&q);
    let roots = real_roots(&q, &Float::with_val(bound.prec(), -&bound), &bound)?.roots;
    Ok(match cfg.output {
        Output::Json => to_json(&QesPolyJson {
            schema: REPORT_SCHEMA,
            kind: "qes-poly",
            n_star,
            sigma_star: sigma_star.map(Parity::index),
            coefficients: q.coeffs().iter().map(exact_string).collect(),
            roots: roots.iter().map(exact_string).collect(),
        })?,
        Output::Csv => {
            let mut out = String::from("kind,index,value\n");
            for (k, c) in q.coeffs().iter().enumerate() {
                let _ = writeln!(out, "coefficient,{k},{}", exact_string(c));
            }
            for (i, r) in roots.iter().enumerate() {
                let _ = writeln!(out, "root,{i},{}", fixed(r, decimals));
            }
            out
        }
        Output::Table => {
            let mut out = format!("{}\n", cfg.potential.describe());
            let _ = write!(out, "quantizer of degree {}, n* = {n_star}", q.degree());
            if let Some(s) = sigma_star {
                let _ = write!(out, ", sigma* = {}", s.index());
            }
            out.push('\n');
            let mut rows = vec![vec!["power".to_string(), "coefficient".to_string()]];
            rows.extend(q.coeffs().iter().enumerate().map(|(k, c)| vec![format!("E^{k}"), format!("{c:.15e}")]));
            out.push_str(&render(&rows));
            out.push_str("roots:\n");
            for r in &roots {
                let _ = writeln!(out, "  {}", fixed(r, decimals));
            }
            out
        }
    })
}

#[derive(Serialize)]
struct WeightsJson {
    schema: &'static str,
    kind: &'static str,
    representation: String,
    moments: Vec<String>,
    alpha: Vec<String>,
    gamma: Vec<String>,
    positive: bool,
}

/// Positivity is judged on moments of a positive weight in the basis
/// variable; the unified form keeps only its even moments.
fn positivity_table(cfg: &RunConfig, moments: &[Float]) -> Result<MomentTable, Error> {
    let values = match cfg.representation {
        Representation::PsiMu => moments.iter().step_by(2).cloned().collect(),
        _ => moments.to_vec(),
    };
    Ok(MomentTable { values, weight: reference_weight(&cfg.potential, cfg.representation)?, shift: 0 })
}

fn positivity_note(r: std::result::Result<(), (usize, usize)>) -> String {
    match r {
        Ok(()) => "all Hankel-Hadamard determinants positive".into(),
        Err((usize::MAX, j)) => format!("moment {j} is not positive"),
        Err((k, j)) => format!("Hankel-Hadamard determinant ({k},{j}) is not positive"),
    }
}

pub fn weights(cfg: &RunConfig, count: usize) -> Out {
    if count == 0 {
        return Err(ConfigError::new("count", "at least one polynomial is needed").into());
    }
    let moments = reference_moments(&cfg.potential, cfg.representation, 2 * count + 2)?;
    let basis = orthonormal_basis_from(&moments, count)?;
    let positivity = positivity_table(cfg, &moments)?.check_positivity();
    Ok(match cfg.output {
        Output::Json => to_json(&WeightsJson {
            schema: REPORT_SCHEMA,
            kind: "weights",
            representation: cfg.representation.name().into(),
            moments: moments.iter().map(exact_string).collect(),
            alpha: basis.alpha_t[1..].iter().map(exact_string).collect(),
            gamma: basis.gamma_t[1..].iter().map(exact_string).collect(),
            positive: positivity.is_ok(),
        })?,
        Output::Csv => {
            let mut out = String::from("kind,index,value\n");
            for (i, m) in moments.iter().enumerate() {
                let _ = writeln!(out, "moment,{i},{}", exact_string(m));
            }
            for (k, a) in basis.alpha_t.iter().enumerate().skip(1) {
                let _ = writeln!(out, "alpha,{k},{}", exact_string(a));
            }
            for (k, g) in basis.gamma_t.iter().enumerate().skip(1) {
                let _ = writeln!(out, "gamma,{k},{}", exact_string(g));
            }
            out
        }
        Output::Table => {
            let mut out = format!("{}\nreference weight for {}\n", cfg.potential.describe(), cfg.representation);
            let mut rows = vec![vec!["k".to_string(), "moment".into(), "alpha~".into(), "gamma~".into()]];
            for (k, m) in moments.iter().enumerate() {
                let cell = |v: &[Float]| if k >= 1 && k < v.len() { format!("{:.12e}", v[k]) } else { String::new() };
                rows.push(vec![k.to_string(), format!("{m:.12e}"), cell(&basis.alpha_t), cell(&basis.gamma_t)]);
            }
            out.push_str(&render(&rows));
            let _ = writeln!(out, "{}", positivity_note(positivity));
            out
        }
    })
}

#[derive(Serialize)]
struct OracleJson {
    schema: &'static str,
    kind: &'static str,
    potential: String,
    levels: Vec<OracleRow>,
}

#[derive(Serialize)]
struct OracleRow {
    level: usize,
    energy: String,
    error: f64,
}

pub fn oracle(cfg: &RunConfig, levels: usize, ocfg: &OracleConfig, cache: Option<PathBuf>, decimals: usize) -> Out {
    let spectrum = match cache {
        Some(path) => {
            let mut c = OracleCache::open(path)?;
            oracle_spectrum_cached(&mut c, &cfg.potential, levels, ocfg)?
        }
        None => oracle_spectrum(&cfg.potential, levels, ocfg)?,
    };
    Ok(match cfg.output {
        Output::Json => to_json(&OracleJson {
            schema: REPORT_SCHEMA,
            kind: "oracle",
            potential: cfg.potential.describe(),
            levels: spectrum
                .iter()
                .map(|l| OracleRow { level: l.level, energy: exact_string(&l.energy), error: l.error })
                .collect(),
        })?,
        Output::Csv => {
            let mut out = String::from("level,energy,error\n");
            for l in &spectrum {
                let _ = writeln!(out, "{},{},{:.3e}", l.level, fixed(&l.energy, decimals), l.error);
            }
            out
        }
        Output::Table => {
            let mut rows = vec![vec!["level".to_string(), "energy".into(), "error".into()]];
            rows.extend(
                spectrum
                    .iter()
                    .map(|l| vec![format!("E{}", l.level), fixed(&l.energy, decimals), format!("{:.1e}", l.error)]),
            );
            format!("{}\n{}", cfg.potential.describe(), render(&rows))
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub property: &'static str,
    pub status: Status,
    pub detail: String,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
        }
    }
}

fn check(property: &'static str, ok: bool, detail: impl Into<String>) -> Check {
    Check { property, status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
}

fn skip(property: &'static str, detail: impl Into<String>) -> Check {
    Check { property, status: Status::Skip, detail: detail.into() }
}

/// The QES problem in the three-term representation, restricted to orders
/// at or above the kink.
fn qes_problem(cfg: &RunConfig) -> Result<Option<(QuantizationProblem, EnergyPolynomial, usize)>, Failure> {
    let QesClass::Yes { n_star, sigma_star } = is_qes_potential(&cfg.potential) else {
        return Ok(None);
    };
    let (p, rep) = match cfg.potential.family {
        Family::SexticAnharmonic => (cfg.potential.with_sigma(sigma_star.expect("sextic parity")), Representation::PhiNu),
        Family::BenderDunne => (cfg.potential.clone(), Representation::BdBessis),
    };
    let range: Vec<usize> = cfg.n_range().into_iter().filter(|&n| n > n_star).collect();
    if range.is_empty() {
        return Ok(None);
    }
    let qp = QuantizationProblem::new(&p, rep, None, range)?;
    let q = build_quantizer(&p)?;
    Ok(Some((qp, q, n_star)))
}

pub fn verify_checks(cfg: &RunConfig, corrupt: Option<usize>) -> Result<Vec<Check>, Failure> {
    let prec = cfg.prec;
    let tol = prec.tol(0.5);
    let qp = problem(cfg)?;
    let mut checks = Vec::new();

    let j = qp.basis.max_degree();
    let r = orthonormality_residual(&qp.basis, &qp.reference_moments, j);
    checks.push(check("orthonormality", r <= tol, format!("max residual {:.2e} up to J={j}", r.to_f64())));

    let mut table = positivity_table(cfg, &qp.reference_moments)?;
    if let Some(k) = corrupt {
        let len = table.values.len();
        let v = table
            .values
            .get_mut(k)
            .ok_or_else(|| ConfigError::new("corrupt-moment", format!("index {k} outside the table of {len} moments")))?;
        *v = -Float::with_val(prec.bits(), v.abs_ref());
    }
    let pos = table.check_positivity();
    checks.push(check("hankel-positivity", pos.is_ok(), positivity_note(pos)));

    match qes_problem(cfg)? {
        None => {
            checks.push(skip("factorization", "potential is not QES-type in the order range"));
            checks.push(skip("zero-moment-law", "potential is not QES-type in the order range"));
        }
        Some((qes, q, n_star)) => {
            let mut failed = None;
            let mut quotients = Vec::new();
            for &n in &qes.n_range {
                match factor_out_qes(&build_determinant(&qes, n)?, &q) {
                    Ok(quot) => quotients.push((n, quot)),
                    Err(Error::NonFactorizable(ratio)) => {
                        failed = Some(format!("N={n}: relative remainder {ratio:.2e}"));
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            let range = format!("N={}..{}", qes.n_range[0], qes.n_range[qes.n_range.len() - 1]);
            checks.push(match &failed {
                Some(d) => check("factorization", false, d.clone()),
                None => check("factorization", true, format!("quantizer divides D_N for {range}")),
            });
            checks.push(zero_moment_check(cfg, &qes, &quotients, n_star)?);
        }
    }

    let report = scan_roots(&qp, &cfg.window.0, &cfg.window.1)?;
    checks.push(match RootReport::from_json(&report.to_json()?) {
        Ok(back) => check("report-round-trip", back == report, "JSON re-read reproduces the report"),
        Err(e) => check("report-round-trip", false, e.to_string()),
    });

    if cfg.oracle_or(true) {
        checks.push(oracle_check(cfg, &report)?);
    } else {
        checks.push(skip("oracle-deltas", "oracle off"));
    }
    Ok(checks)
}

/// Largest step of a quotient root between the last two orders for which it
/// counts as a resolved state.
pub const SETTLED_STEP: f64 = 1e-2;

/// At the largest order, every resolved root of the quotient (a state outside
/// the QES multiplet) carries `|ν(ρ)| / |ν(n*+1)| < 1e-4` for `ρ <= n*`.
fn zero_moment_check(
    cfg: &RunConfig,
    qes: &QuantizationProblem,
    quotients: &[(usize, EnergyPolynomial)],
    n_star: usize,
) -> Result<Check, Failure> {
    const BOUND: f64 = 1e-4;
    let [.., (_, prev), (n, quot)] = quotients else {
        return Ok(skip("zero-moment-law", "needs two factorized orders"));
    };
    let (lo, hi) = (&cfg.window.0, &cfg.window.1);
    let before = real_roots(prev, lo, hi)?.roots;
    let roots: Vec<Float> = real_roots(quot, lo, hi)?
        .roots
        .into_iter()
        .filter(|e| before.iter().any(|b| (e.to_f64() - b.to_f64()).abs() < SETTLED_STEP))
        .collect();
    if roots.is_empty() {
        return Ok(skip("zero-moment-law", format!("no settled non-QES root in the window at N={n}")));
    }
    let bits = cfg.prec.bits();
    let l = n_star + 1;
    let mut worst: f64 = 0.0;
    for e in &roots {
        let mm = missing_moments(qes, *n, e)?;
        let moments = qes.transfer.propagate(e, &full_missing(qes, &mm))?;
        let top = Float::with_val(bits, moments[l].abs_ref());
        for v in &moments[..=n_star] {
            worst = worst.max((Float::with_val(bits, v / &top)).abs().to_f64());
        }
    }
    Ok(check(
        "zero-moment-law",
        worst < BOUND,
        format!("max |nu(rho)|/|nu({l})| = {worst:.2e} over {} settled roots at N={n}", roots.len()),
    ))
}

/// QES-exact roots agree with the oracle to its tolerance; converging roots
/// at the largest order lie within ten last steps of it.
fn oracle_check(cfg: &RunConfig, report: &RootReport) -> Result<Check, Failure> {
    const ORACLE_TOL: f64 = 1e-5;
    let Some(last) = report.orders.last() else {
        return Ok(skip("oracle-deltas", "no orders"));
    };
    let top = last.roots.iter().map(|r| r.level).max().unwrap_or(0).min(MAX_ORACLE_LEVEL);
    let map = oracle_map(&cfg.potential, cfg.representation, top)?;
    let mut worst: Option<String> = None;
    let mut compared = 0;
    for r in last.roots.iter().filter(|r| r.level <= top) {
        let Some(o) = map.get(&r.level) else { continue };
        let err = (r.energy.to_f64() - o.to_f64()).abs();
        let allowed = match r.class {
            RootClass::QesExact => ORACLE_TOL,
            RootClass::Converging { .. } => (10.0 * r.delta.unwrap_or(f64::INFINITY)).max(ORACLE_TOL),
            RootClass::Spurious => continue,
        };
        compared += 1;
        if err > allowed && worst.is_none() {
            worst = Some(format!("E{} = {} differs from oracle {} by {err:.2e}", r.level, r.energy.to_f64(), o.to_f64()));
        }
    }
    Ok(match worst {
        Some(d) => check("oracle-deltas", false, d),
        None => check("oracle-deltas", true, format!("{compared} levels at N={} consistent with the oracle", last.n)),
    })
}

#[derive(Serialize)]
struct VerifyJson<'a> {
    schema: &'static str,
    kind: &'static str,
    checks: &'a [Check],
}

pub fn verify(cfg: &RunConfig, corrupt: Option<usize>) -> Result<(String, usize), Failure> {
    let checks = verify_checks(cfg, corrupt)?;
    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    let text = match cfg.output {
        Output::Json => to_json(&VerifyJson { schema: REPORT_SCHEMA, kind: "verify", checks: &checks })?,
        Output::Csv => {
            let mut out = String::from("property,status,detail\n");
            for c in &checks {
                let _ = writeln!(out, "{},{},\"{}\"", c.property, c.status.name(), c.detail.replace('"', "'"));
            }
            out
        }
        Output::Table => {
            let mut out = String::new();
            for c in &checks {
                let _ = writeln!(out, "{}  {:<18} {}", c.status.name().to_uppercase(), c.property, c.detail);
            }
            out
        }
    };
    Ok((text, failed))
}

pub fn mode_names() -> String {
    [Mode::Full, Mode::PhiSegmented, Mode::NonQesSameParity, Mode::BdFull].map(|m| m.name()).join(", ")
}
