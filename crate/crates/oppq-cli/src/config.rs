use oppq::moments::Representation;
use oppq::potential::{Family, Parity, PotentialSpec};
use oppq::quantizer::Mode;
use oppq::{Float, Precision};
use serde::Deserialize;
use std::fmt;
use std::path::Path;

/// A configuration problem, tied to the field that caused it.
#[derive(Debug)]
pub struct ConfigError {
    pub field: &'static str,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: &'static str, message: impl Into<String>) -> Self {
        ConfigError { field, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid {}: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// A number given either as a JSON number or as an expression string such
/// as `"sqrt(8)"` or `"-1/3"`.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Number(serde_json::Number),
    Text(String),
}

impl Scalar {
    fn source(&self) -> String {
        match self {
            Scalar::Number(n) => n.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }

    fn value(&self, field: &'static str, prec: Precision) -> Result<Float, ConfigError> {
        prec.parse(&self.source()).map_err(|e| ConfigError::new(field, e.to_string()))
    }
}

impl From<&str> for Scalar {
    fn from(s: &str) -> Self {
        Scalar::Text(s.to_string())
    }
}

/// The JSON document, every key optional.
#[derive(Clone, Debug, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub g: Option<Scalar>,
    pub b: Option<Scalar>,
    pub m: Option<Scalar>,
    pub gamma: Option<Scalar>,
    pub s: Option<i64>,
    #[serde(rename = "J")]
    pub j: Option<i64>,
    pub sigma: Option<u32>,
    pub representation: Option<String>,
    pub mode: Option<String>,
    #[serde(rename = "N_min")]
    pub n_min: Option<usize>,
    #[serde(rename = "N_max")]
    pub n_max: Option<usize>,
    pub digits: Option<u32>,
    pub window: Option<(Scalar, Scalar)>,
    pub output: Option<String>,
    pub oracle: Option<bool>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::new("config", e.to_string()))
    }

    /// Values of `other` replace those of `self` where present.
    pub fn overlay(self, other: FileConfig) -> FileConfig {
        FileConfig {
            family: other.family.or(self.family),
            g: other.g.or(self.g),
            b: other.b.or(self.b),
            m: other.m.or(self.m),
            gamma: other.gamma.or(self.gamma),
            s: other.s.or(self.s),
            j: other.j.or(self.j),
            sigma: other.sigma.or(self.sigma),
            representation: other.representation.or(self.representation),
            mode: other.mode.or(self.mode),
            n_min: other.n_min.or(self.n_min),
            n_max: other.n_max.or(self.n_max),
            digits: other.digits.or(self.digits),
            window: other.window.or(self.window),
            output: other.output.or(self.output),
            oracle: other.oracle.or(self.oracle),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Output {
    Csv,
    Json,
    Table,
}

impl Output {
    fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "csv" => Ok(Output::Csv),
            "json" => Ok(Output::Json),
            "table" | "pretty" | "pretty-table" => Ok(Output::Table),
            _ => Err(ConfigError::new("output", format!("unknown format {s:?} (csv, json, pretty-table)"))),
        }
    }
}

/// A validated run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub potential: PotentialSpec,
    pub representation: Representation,
    pub mode: Option<Mode>,
    pub n_min: usize,
    pub n_max: usize,
    pub prec: Precision,
    pub window: (Float, Float),
    pub output: Output,
    pub oracle: Option<bool>,
}

fn digits_default() -> Result<u32, ConfigError> {
    match std::env::var("OPPQ_DIGITS") {
        Ok(v) => v
            .trim()
            .parse::<u32>()
            .map_err(|_| ConfigError::new("digits", format!("OPPQ_DIGITS={v:?} is not a digit count"))),
        Err(_) => Ok(Precision::DEFAULT_DIGITS),
    }
}

impl RunConfig {
    pub fn resolve(f: &FileConfig) -> Result<RunConfig, ConfigError> {
        let digits = match f.digits {
            Some(d) => d,
            None => digits_default()?,
        };
        let prec = Precision::new(digits).map_err(|_| {
            ConfigError::new("digits", format!("{digits} is below the minimum of {}", Precision::MIN_DIGITS))
        })?;

        let family = match f.family.as_deref().unwrap_or("sextic") {
            "sextic" => Family::SexticAnharmonic,
            "bender-dunne" | "bd" => Family::BenderDunne,
            other => return Err(ConfigError::new("family", format!("unknown family {other:?} (sextic, bender-dunne)"))),
        };

        let sigma = Parity::from_index(f.sigma.unwrap_or(0)).map_err(|e| ConfigError::new("sigma", e.to_string()))?;
        let potential = match family {
            Family::SexticAnharmonic => {
                for (name, set) in [("s", f.s.is_some()), ("J", f.j.is_some()), ("gamma", f.gamma.is_some())] {
                    if set {
                        return Err(ConfigError::new(name, "only applies to the bender-dunne family"));
                    }
                }
                let g = f.g.clone().unwrap_or_else(|| "1".into()).value("g", prec)?;
                let b = f.b.clone().unwrap_or_else(|| "sqrt(8)".into()).value("b", prec)?;
                let m = f.m.clone().unwrap_or_else(|| "-13".into()).value("m", prec)?;
                PotentialSpec::sextic(g, b, m, sigma).map_err(|e| ConfigError::new("g", e.to_string()))?
            }
            Family::BenderDunne => bd_potential(f, prec)?,
        };

        let representation = match &f.representation {
            Some(r) => Representation::parse(r).map_err(|e| ConfigError::new("representation", e.to_string()))?,
            None => match family {
                Family::SexticAnharmonic => Representation::PsiU,
                Family::BenderDunne => Representation::BdBessis,
            },
        };
        if representation.family() != family {
            return Err(ConfigError::new(
                "representation",
                format!("{representation} does not apply to the {family} family"),
            ));
        }
        let mode = f
            .mode
            .as_deref()
            .map(Mode::parse)
            .transpose()
            .map_err(|e| ConfigError::new("mode", e.to_string()))?;

        let n_min = f.n_min.unwrap_or(4);
        let n_max = f.n_max.unwrap_or(12);
        if n_min > n_max {
            return Err(ConfigError::new("N_min", format!("N_min={n_min} exceeds N_max={n_max}")));
        }

        let window = match &f.window {
            Some((lo, hi)) => (lo.value("window", prec)?, hi.value("window", prec)?),
            None => (prec.float(-50), prec.float(100)),
        };
        if window.0 >= window.1 {
            return Err(ConfigError::new("window", "lower end must be below upper end"));
        }
        let output = Output::parse(f.output.as_deref().unwrap_or("pretty-table"))?;

        Ok(RunConfig { potential, representation, mode, n_min, n_max, prec, window, output, oracle: f.oracle })
    }

    pub fn n_range(&self) -> Vec<usize> {
        (self.n_min..=self.n_max).collect()
    }

    pub fn oracle_or(&self, default: bool) -> bool {
        self.oracle.unwrap_or(default)
    }
}

/// `(s, J)` when given; otherwise `γ` directly, or from `b = γ(γ-1)` on the
/// branch `γ > 1/2`.
fn bd_potential(f: &FileConfig, prec: Precision) -> Result<PotentialSpec, ConfigError> {
    if f.g.is_some() {
        return Err(ConfigError::new("g", "the bender-dunne family has unit sextic coupling"));
    }
    if f.sigma.is_some_and(|s| s != 0) {
        return Err(ConfigError::new("sigma", "the bender-dunne family lives on the half line"));
    }
    let m = f.m.as_ref().map(|v| v.value("m", prec)).transpose()?;
    let gamma = match (&f.gamma, &f.b) {
        (Some(g), _) => Some(g.value("gamma", prec)?),
        (None, Some(b)) => {
            let b = b.value("b", prec)?;
            let disc = Float::with_val(prec.bits(), &b * 4u32) + 1u32;
            if disc < 0 {
                return Err(ConfigError::new("b", "b must be at least -1/4"));
            }
            Some((disc.sqrt() + 1u32) / 2u32)
        }
        (None, None) => None,
    };
    match (f.s, f.j) {
        (Some(s), Some(j)) => {
            PotentialSpec::bender_dunne_sj(s, j, gamma.as_ref(), m.as_ref(), prec).map_err(|e| {
                let field = if gamma.is_some() { "gamma" } else { "m" };
                ConfigError::new(field, e.to_string())
            })
        }
        (Some(_), None) => Err(ConfigError::new("J", "required together with s")),
        (None, Some(_)) => Err(ConfigError::new("s", "required together with J")),
        (None, None) => {
            let gamma = gamma.unwrap_or_else(|| prec.float(1.5));
            let m = m.unwrap_or_else(|| prec.float(-18));
            PotentialSpec::bender_dunne(gamma, m).map_err(|e| ConfigError::new("gamma", e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> FileConfig {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn defaults_are_the_even_qes_sextic() {
        let c = RunConfig::resolve(&FileConfig { digits: Some(40), ..Default::default() }).unwrap();
        assert_eq!(c.representation, Representation::PsiU);
        assert_eq!(c.potential.m, -13);
        assert_eq!(c.n_range(), (4..=12).collect::<Vec<_>>());
    }

    #[test]
    fn string_scalars_are_expressions() {
        let c = RunConfig::resolve(&parse(r#"{"b": "sqrt(8)", "m": -15, "sigma": 1, "digits": 40}"#)).unwrap();
        let b2 = Float::with_val(c.prec.bits(), c.potential.b.square_ref());
        assert!((b2 - 8u32).abs() < 1e-35);
    }

    #[test]
    fn low_digits_name_the_field() {
        let e = RunConfig::resolve(&parse(r#"{"digits": 29}"#)).unwrap_err();
        assert_eq!(e.field, "digits");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"digitz": 40}"#).is_err());
    }

    #[test]
    fn overlay_prefers_the_later_source() {
        let base = parse(r#"{"m": -13, "N_max": 9}"#);
        let top = parse(r#"{"m": -15}"#);
        let merged = base.overlay(top);
        assert_eq!(merged.m, Some(Scalar::Number((-15).into())));
        assert_eq!(merged.n_max, Some(9));
    }

    #[test]
    fn bd_from_s_and_j() {
        let c = RunConfig::resolve(&parse(r#"{"family": "bender-dunne", "s": 1, "J": 4, "digits": 40}"#)).unwrap();
        assert_eq!(c.potential.gamma, 1.5);
        assert_eq!(c.potential.m, -18);
        assert_eq!(c.representation, Representation::BdBessis);
    }

    #[test]
    fn bd_gamma_from_centrifugal_coefficient() {
        let c = RunConfig::resolve(&parse(r#"{"family": "bd", "b": "3/4", "m": -18, "digits": 40}"#)).unwrap();
        assert_eq!(c.potential.gamma, 1.5);
    }

    #[test]
    fn representation_must_fit_family() {
        let e = RunConfig::resolve(&parse(r#"{"representation": "bd-a", "digits": 40}"#)).unwrap_err();
        assert_eq!(e.field, "representation");
    }

    #[test]
    fn window_must_be_ordered() {
        let e = RunConfig::resolve(&parse(r#"{"window": [5, "-1"], "digits": 40}"#)).unwrap_err();
        assert_eq!(e.field, "window");
    }
}
