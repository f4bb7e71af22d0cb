use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relhyp::GeodesicMode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Ball,
    StarVerify,
    Calibrate,
    DecompCount,
    RdProfile,
    Opnorm,
    TmapVerify,
    Trace,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 8] = [
        ExperimentKind::Ball,
        ExperimentKind::StarVerify,
        ExperimentKind::Calibrate,
        ExperimentKind::DecompCount,
        ExperimentKind::RdProfile,
        ExperimentKind::Opnorm,
        ExperimentKind::TmapVerify,
        ExperimentKind::Trace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Ball => "ball",
            ExperimentKind::StarVerify => "star-verify",
            ExperimentKind::Calibrate => "calibrate",
            ExperimentKind::DecompCount => "decomp-count",
            ExperimentKind::RdProfile => "rd-profile",
            ExperimentKind::Opnorm => "opnorm",
            ExperimentKind::TmapVerify => "tmap-verify",
            ExperimentKind::Trace => "trace",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapChoice {
    Z2,
    Polygrowth,
    FromStar,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    #[default]
    Chain,
    Reduction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_out_dir")]
    pub dir: PathBuf,
    /// File stem; defaults to the experiment kind.
    #[serde(default)]
    pub stem: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("reports")
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Json, OutputFormat::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_out_dir(),
            stem: None,
            formats: default_formats(),
        }
    }
}

fn default_peripheral() -> String {
    "trivial".into()
}

/// One experiment, as read from a TOML file.
///
/// Which optional fields are required depends on `kind`; [`validate`]
/// reports the first missing or out-of-range field by name.
///
/// [`validate`]: ExperimentConfig::validate
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Family descriptor such as `free-product(free-abelian(1),free-abelian(1))`.
    pub group: String,
    /// Generator letters in rank order, e.g. `"ba"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_order: Option<String>,
    #[serde(default = "default_peripheral")]
    pub peripheral: String,
    #[serde(default)]
    pub seed: u64,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesics: Option<GeodesicMode>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2_max: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,

    /// `sphere(k)` or `ball(k)`, the indicator convolved with in `opnorm`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<usize>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapChoice>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<TraceMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    /// Value of `P` assumed by the reduction check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_value: Option<f64>,

    #[serde(default, skip_serializing)]
    pub output: OutputConfig,
}

pub(crate) fn need<T: Copy>(v: Option<T>, field: &str, kind: ExperimentKind) -> Result<T> {
    v.ok_or_else(|| Error::config(field, format!("required for {}", kind.name())))
}

impl ExperimentConfig {
    /// A config with only the required top-level fields set.
    pub fn new(kind: ExperimentKind, group: &str) -> Self {
        ExperimentConfig {
            kind,
            group: group.to_string(),
            generator_order: None,
            peripheral: default_peripheral(),
            seed: 0,
            radius: None,
            budget: None,
            sigma: None,
            delta: None,
            sigma_max: None,
            delta_max: None,
            geodesics: None,
            p_max: None,
            r1_max: None,
            r2_max: None,
            r_max: None,
            restarts: None,
            tolerance: None,
            function: None,
            radii: None,
            map: None,
            mode: None,
            pairs: None,
            p_value: None,
            output: OutputConfig::default(),
        }
    }

    /// Parses a TOML document. `kind` fills in a missing `kind` key and must
    /// agree with it when both are present.
    pub fn from_toml(text: &str, kind: Option<ExperimentKind>) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| toml_error(&e, None))?;
        if let Some(k) = kind {
            match table.get("kind").and_then(|v| v.as_str()) {
                None if !table.contains_key("kind") => {
                    table.insert("kind".into(), toml::Value::String(k.name().into()));
                }
                Some(s) if s == k.name() => {}
                _ => {
                    return Err(Error::config(
                        "kind",
                        format!("config says {}, command says {}", table["kind"], k.name()),
                    ))
                }
            }
        }
        let cfg: ExperimentConfig = table
            .clone()
            .try_into()
            .map_err(|e: toml::de::Error| toml_error(&e, Some(&table)))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Field-level checks that do not need the group model.
    pub fn validate(&self) -> Result<()> {
        let k = self.kind;
        if self.group.trim().is_empty() {
            return Err(Error::config("group", "empty descriptor"));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::config("tolerance", "must lie in (0, 1)"));
            }
        }
        if self.budget == Some(0) {
            return Err(Error::config("budget", "must be positive"));
        }
        if self.restarts == Some(0) {
            return Err(Error::config("restarts", "must be positive"));
        }
        if let Some(p) = self.p_value {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::config("p_value", "must be positive"));
            }
        }
        match k {
            ExperimentKind::Ball | ExperimentKind::Calibrate => {
                need(self.radius, "radius", k)?;
            }
            ExperimentKind::StarVerify => {
                need(self.radius, "radius", k)?;
                need(self.sigma, "sigma", k)?;
                need(self.delta, "delta", k)?;
            }
            ExperimentKind::DecompCount => {
                need(self.sigma, "sigma", k)?;
                need(self.delta, "delta", k)?;
                need(self.p_max, "p_max", k)?;
                need(self.r1_max, "r1_max", k)?;
            }
            ExperimentKind::RdProfile => {
                need(self.r_max, "r_max", k)?;
            }
            ExperimentKind::Opnorm => {
                let radii = self
                    .radii
                    .as_ref()
                    .ok_or_else(|| Error::config("radii", "required for opnorm"))?;
                if radii.is_empty() {
                    return Err(Error::config("radii", "empty list"));
                }
                if radii.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::config("radii", "must be strictly increasing"));
                }
                if let Some(f) = &self.function {
                    parse_function(f)?;
                }
            }
            ExperimentKind::TmapVerify => {
                need(self.radius, "radius", k)?;
                if need(self.map, "map", k)? == MapChoice::FromStar {
                    need(self.sigma, "sigma", k)?;
                    need(self.delta, "delta", k)?;
                }
            }
            ExperimentKind::Trace => match self.mode.unwrap_or_default() {
                TraceMode::Chain => {
                    need(self.sigma, "sigma", k)?;
                    need(self.delta, "delta", k)?;
                    need(self.r1_max, "r1_max", k)?;
                    need(self.r2_max, "r2_max", k)?;
                }
                TraceMode::Reduction => {
                    need(self.radius, "radius", k)?;
                }
            },
        }
        Ok(())
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.kind.name().to_string())
    }
}

fn toml_error(e: &toml::de::Error, table: Option<&toml::Table>) -> Error {
    let msg = e.message().trim().to_string();
    // toml reports unknown and missing keys in the message; keep its wording.
    let quoted = msg.split('`').nth(1);
    let field = if msg.contains("field") {
        quoted.map(str::to_string)
    } else if msg.contains("unknown variant") {
        // Only the offending value is named; find the key holding it.
        table.and_then(|t| {
            t.iter()
                .find(|(_, v)| v.as_str().is_some() && v.as_str() == quoted)
                .map(|(k, _)| k.clone())
        })
    } else {
        None
    };
    Error::config(field.unwrap_or_else(|| "<document>".into()), msg)
}

/// `sphere(k)` or `ball(k)`.
pub(crate) fn parse_function(spec: &str) -> Result<(bool, usize)> {
    let bad = || Error::config("function", format!("expected sphere(k) or ball(k), got `{spec}`"));
    let spec = spec.trim();
    let (sphere, rest) = if let Some(r) = spec.strip_prefix("sphere(") {
        (true, r)
    } else if let Some(r) = spec.strip_prefix("ball(") {
        (false, r)
    } else {
        return Err(bad());
    };
    let k = rest
        .strip_suffix(')')
        .ok_or_else(bad)?
        .trim()
        .parse()
        .map_err(|_| bad())?;
    Ok((sphere, k))
}
