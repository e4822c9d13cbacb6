use crate::numeric::Precision;
use crate::{Error, Result};
use rug::Float;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `g x⁶ + b x⁴ + m x²` on the whole line.
    SexticAnharmonic,
    /// `x⁶ + m x² + b/x²` on the half line.
    BenderDunne,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::SexticAnharmonic => "sextic",
            Family::BenderDunne => "bender-dunne",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_index(s: u32) -> Result<Parity> {
        match s {
            0 => Ok(Parity::Even),
            1 => Ok(Parity::Odd),
            _ => Err(Error::InvalidArgument(format!("parity must be 0 or 1, got {s}"))),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QesClass {
    No,
    /// `sigma_star` is `None` for the Bender–Dunne family.
    Yes { n_star: usize, sigma_star: Option<Parity> },
}

/// Potential parameters. For the Bender–Dunne family `g = 1`, `b` is the
/// centrifugal coefficient `γ(γ-1)` and `sigma` is ignored.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialSpec {
    pub family: Family,
    pub g: Float,
    pub b: Float,
    pub m: Float,
    pub gamma: Float,
    pub bd_s: Option<i64>,
    pub bd_j: Option<i64>,
    pub sigma: Parity,
}

impl PotentialSpec {
    pub fn sextic(g: Float, b: Float, m: Float, sigma: Parity) -> Result<Self> {
        if g <= 0 {
            return Err(Error::InvalidArgument("sextic coupling g must be positive".into()));
        }
        let gamma = Float::new(g.prec());
        Ok(PotentialSpec { family: Family::SexticAnharmonic, g, b, m, gamma, bd_s: None, bd_j: None, sigma })
    }

    /// Bender–Dunne potential from `(γ, m)` directly.
    pub fn bender_dunne(gamma: Float, m: Float) -> Result<Self> {
        if gamma <= -0.5 {
            return Err(Error::InvalidArgument("indicial exponent must exceed -1/2".into()));
        }
        let bits = gamma.prec();
        let b = Float::with_val(bits, &gamma - 1u32) * &gamma;
        Ok(PotentialSpec {
            family: Family::BenderDunne,
            g: Float::with_val(bits, 1),
            b,
            m,
            gamma,
            bd_s: None,
            bd_j: None,
            sigma: Parity::Even,
        })
    }

    /// Bender–Dunne potential from `(s, J)`: `γ = 2s - 1/2`, `m = -(4s + 4J - 2)`.
    /// When `gamma`/`m` are also supplied they must agree.
    pub fn bender_dunne_sj(
        s: i64,
        j: i64,
        gamma: Option<&Float>,
        m: Option<&Float>,
        prec: Precision,
    ) -> Result<Self> {
        let g = prec.float(2 * s) - 0.5f64;
        let mm = prec.float(-(4 * s + 4 * j - 2));
        let tol = prec.tol(0.5);
        if let Some(gv) = gamma {
            if Float::with_val(prec.bits(), gv - &g).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "gamma={} inconsistent with s={s} (expected 2s-1/2)",
                    gv.to_f64()
                )));
            }
        }
        if let Some(mv) = m {
            if Float::with_val(prec.bits(), mv - &mm).abs() > tol {
                return Err(Error::InvalidArgument(format!(
                    "m={} inconsistent with s={s}, J={j} (expected -(4s+4J-2))",
                    mv.to_f64()
                )));
            }
        }
        let mut p = Self::bender_dunne(g, mm)?;
        p.bd_s = Some(s);
        p.bd_j = Some(j);
        Ok(p)
    }

    pub fn prec(&self) -> Precision {
        Precision::of(&self.g)
    }

    pub fn with_sigma(&self, sigma: Parity) -> Self {
        PotentialSpec { sigma, ..self.clone() }
    }

    /// `V(x)` in double precision (for the oracle).
    pub fn eval_f64(&self, x: f64) -> f64 {
        let x2 = x * x;
        let (g, b, m) = (self.g.to_f64(), self.b.to_f64(), self.m.to_f64());
        match self.family {
            Family::SexticAnharmonic => ((g * x2 + b) * x2 + m) * x2,
            Family::BenderDunne => x2 * x2 * x2 + m * x2 + b / x2,
        }
    }

    /// Canonical text used for cache keys and reports.
    pub fn describe(&self) -> String {
        let d = |x: &Float| x.to_string_radix(10, Some(30));
        match self.family {
            Family::SexticAnharmonic => format!(
                "sextic g={} b={} m={} sigma={}",
                d(&self.g),
                d(&self.b),
                d(&self.m),
                self.sigma.index()
            ),
            Family::BenderDunne => format!("bender-dunne gamma={} m={}", d(&self.gamma), d(&self.m)),
        }
    }
}

/// Nonnegative integer nearest `x` when `x` is within tolerance of it.
fn as_count(x: &Float, tol: &Float) -> Option<usize> {
    let r = Float::with_val(x.prec(), x.round_ref());
    let err = Float::with_val(x.prec(), x - &r).abs();
    if err <= *tol && r >= 0 {
        Some(r.to_f64() as usize)
    } else {
        None
    }
}

/// QES test. Sextic: `m - b²/(4g) + √g(4n + 3 + 2σ) = 0` for integer
/// `n >= 0`, `σ ∈ {0,1}`. Bender–Dunne: `4n + 2γ + m + 3 = 0`.
pub fn is_qes_potential(p: &PotentialSpec) -> QesClass {
    let prec = p.prec();
    let bits = prec.bits();
    let tol = prec.tol(0.5) * 100u32;
    match p.family {
        Family::SexticAnharmonic => {
            let sg = Float::with_val(bits, p.g.sqrt_ref());
            // 4n + 3 + 2σ = (b²/(4g) - m)/√g
            let b2 = Float::with_val(bits, p.b.square_ref()) / Float::with_val(bits, &p.g * 4u32);
            let k = (b2 - &p.m) / &sg;
            for sigma in [Parity::Even, Parity::Odd] {
                let n = Float::with_val(bits, &k - (3 + 2 * sigma.index())) / 4u32;
                if let Some(n_star) = as_count(&n, &tol) {
                    return QesClass::Yes { n_star, sigma_star: Some(sigma) };
                }
            }
            QesClass::No
        }
        Family::BenderDunne => {
            let n = -(Float::with_val(bits, &p.gamma * 2u32) + &p.m + 3u32) / 4u32;
            match as_count(&n, &tol) {
                Some(n_star) => QesClass::Yes { n_star, sigma_star: None },
                None => QesClass::No,
            }
        }
    }
}
