//! Experiment configuration: a TOML document read as a flat set of dotted key paths.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value as Json};
use toml::Value;

use crate::covariance::ChartFamily;
use crate::geometry::Chart;
use crate::localization::QueryInterval;
use crate::mode_field::{
    build_mode_basis, make_wave_packet, Dispersion, LatticeSpec, ModeBasis, SingleParticleState,
};
use num_complex::Complex64;

/// A configuration problem, tied to the key path that caused it.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = std::result::Result<T, ConfigError>;

const KNOWN_KEYS: &[&str] = &[
    "model.N",
    "model.a",
    "model.L",
    "model.m",
    "model.dispersion",
    "state.packet.center",
    "state.packet.width",
    "state.packet.mean_momentum",
    "state.mode.index",
    "state.amplitudes.re",
    "state.amplitudes.im",
    "state.random.seed",
    "chart.kind",
    "chart.rate",
    "chart.acceleration",
    "chart.custom.forward_t",
    "chart.custom.forward_x",
    "chart.custom.inverse_t",
    "chart.custom.inverse_x",
    "eval.times",
    "eval.intervals",
    "scan.family",
    "scan.parameters",
    "output.format",
    "output.path",
];
const PARAM_PREFIX: &str = "chart.custom.params.";
const STATE_KINDS: [&str; 4] = [
    "state.packet",
    "state.mode",
    "state.amplitudes",
    "state.random",
];

#[derive(Debug, Clone, PartialEq)]
pub enum StateConfig {
    Packet {
        center: f64,
        width: f64,
        mean_momentum: f64,
    },
    /// Mode number `n`, momentum `2πn/L`.
    Mode {
        index: i64,
    },
    /// One entry per mode, in order of increasing mode number; normalized on load.
    Amplitudes {
        re: Vec<f64>,
        im: Vec<f64>,
    },
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChartConfig {
    Identity,
    Dilation {
        rate: f64,
    },
    Rindler {
        acceleration: f64,
    },
    Custom {
        forward: [String; 2],
        inverse: [String; 2],
        params: BTreeMap<String, f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub family: ChartFamily,
    pub parameters: Vec<f64>,
}

/// A parsed and validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    raw: String,
    pub num_sites: usize,
    pub spacing: f64,
    pub mass: f64,
    pub dispersion: Dispersion,
    pub state: StateConfig,
    pub chart: ChartConfig,
    pub times: Vec<f64>,
    pub intervals: Option<Vec<(f64, f64)>>,
    pub scan: Option<ScanConfig>,
    pub format: Option<OutputFormat>,
    pub output_path: Option<String>,
}

struct Keys {
    leaves: BTreeMap<String, Value>,
    tables: BTreeSet<String>,
}

fn flatten(prefix: &str, table: &toml::Table, keys: &mut Keys) {
    for (k, v) in table {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => {
                keys.tables.insert(path.clone());
                flatten(&path, t, keys);
            }
            other => {
                keys.leaves.insert(path, other.clone());
            }
        }
    }
}

impl Keys {
    fn parse(text: &str) -> ConfigResult<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::new("", format!("invalid TOML: {e}")))?;
        let mut keys = Keys {
            leaves: BTreeMap::new(),
            tables: BTreeSet::new(),
        };
        flatten("", &table, &mut keys);
        for key in keys.leaves.keys() {
            if !KNOWN_KEYS.contains(&key.as_str()) && !key.starts_with(PARAM_PREFIX) {
                return Err(ConfigError::new(key, "unknown key"));
            }
        }
        for table in &keys.tables {
            let known = KNOWN_KEYS
                .iter()
                .any(|k| k.starts_with(&format!("{table}.")))
                || table == "chart.custom.params"
                || STATE_KINDS.contains(&table.as_str());
            if !known {
                return Err(ConfigError::new(table, "unknown table"));
            }
        }
        Ok(keys)
    }

    fn has_table(&self, key: &str) -> bool {
        self.tables.contains(key)
    }

    fn f64(&self, key: &str) -> ConfigResult<Option<f64>> {
        self.leaves.get(key).map(|v| to_f64(key, v)).transpose()
    }

    fn require_f64(&self, key: &str) -> ConfigResult<f64> {
        self.f64(key)?
            .ok_or_else(|| ConfigError::new(key, "required"))
    }

    fn int(&self, key: &str) -> ConfigResult<Option<i64>> {
        match self.leaves.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) => Ok(Some(*i)),
            Some(_) => Err(ConfigError::new(key, "expected an integer")),
        }
    }

    fn string(&self, key: &str) -> ConfigResult<Option<&str>> {
        match self.leaves.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(ConfigError::new(key, "expected a string")),
        }
    }

    fn require_string(&self, key: &str) -> ConfigResult<String> {
        Ok(self
            .string(key)?
            .ok_or_else(|| ConfigError::new(key, "required"))?
            .to_string())
    }

    fn f64_array(&self, key: &str) -> ConfigResult<Option<Vec<f64>>> {
        match self.leaves.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| to_f64(key, v))
                .collect::<ConfigResult<_>>()
                .map(Some),
            Some(_) => Err(ConfigError::new(key, "expected an array of numbers")),
        }
    }
}

fn to_f64(key: &str, v: &Value) -> ConfigResult<f64> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return Err(ConfigError::new(key, "expected a number")),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(ConfigError::new(key, format!("{x} is not finite")))
    }
}

fn positive(key: &str, v: f64) -> ConfigResult<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("must be > 0, got {v}")))
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let keys = Keys::parse(text)?;

        let n = keys
            .int("model.N")?
            .ok_or_else(|| ConfigError::new("model.N", "required"))?;
        if n < 1 {
            return Err(ConfigError::new(
                "model.N",
                format!("must be >= 1, got {n}"),
            ));
        }
        let num_sites = n as usize;
        let spacing = match (keys.f64("model.a")?, keys.f64("model.L")?) {
            (Some(a), None) => positive("model.a", a)?,
            (None, Some(l)) => positive("model.L", l)? / num_sites as f64,
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "model.L",
                    "give model.a or model.L, not both",
                ))
            }
            (None, None) => return Err(ConfigError::new("model.a", "required (or model.L)")),
        };
        let mass = keys.require_f64("model.m")?;
        if mass < 0.0 {
            return Err(ConfigError::new(
                "model.m",
                format!("must be >= 0, got {mass}"),
            ));
        }
        let dispersion = match keys.string("model.dispersion")?.unwrap_or("continuum") {
            "continuum" => Dispersion::Continuum,
            "lattice" => Dispersion::Lattice,
            other => {
                return Err(ConfigError::new(
                    "model.dispersion",
                    format!("expected \"continuum\" or \"lattice\", got {other:?}"),
                ))
            }
        };

        let state = parse_state(&keys, num_sites)?;
        let chart = parse_chart(&keys)?;

        let times = keys.f64_array("eval.times")?.unwrap_or_else(|| vec![0.0]);
        if times.is_empty() {
            return Err(ConfigError::new("eval.times", "must not be empty"));
        }
        let intervals = parse_intervals(&keys)?;

        let scan = match (
            keys.string("scan.family")?,
            keys.f64_array("scan.parameters")?,
        ) {
            (None, None) => None,
            (Some(family), Some(parameters)) => {
                let family = match family {
                    "dilation" => ChartFamily::Dilation,
                    "rindler" => ChartFamily::Rindler,
                    other => {
                        return Err(ConfigError::new(
                            "scan.family",
                            format!("expected \"dilation\" or \"rindler\", got {other:?}"),
                        ))
                    }
                };
                if parameters.is_empty() {
                    return Err(ConfigError::new("scan.parameters", "must not be empty"));
                }
                Some(ScanConfig { family, parameters })
            }
            (Some(_), None) => {
                return Err(ConfigError::new(
                    "scan.parameters",
                    "required with scan.family",
                ))
            }
            (None, Some(_)) => {
                return Err(ConfigError::new(
                    "scan.family",
                    "required with scan.parameters",
                ))
            }
        };

        let format = match keys.string("output.format")? {
            None => None,
            Some("csv") => Some(OutputFormat::Csv),
            Some("json") => Some(OutputFormat::Json),
            Some(other) => {
                return Err(ConfigError::new(
                    "output.format",
                    format!("expected \"csv\" or \"json\", got {other:?}"),
                ))
            }
        };
        let output_path = keys.string("output.path")?.map(str::to_string);

        let config = Self {
            raw: text.to_string(),
            num_sites,
            spacing,
            mass,
            dispersion,
            state,
            chart,
            times,
            intervals,
            scan,
            format,
            output_path,
        };
        config.prepare()?;
        Ok(config)
    }

    /// The config text exactly as given.
    pub fn raw(&self) -> &str {
        &self.raw
    }

    pub fn length(&self) -> f64 {
        self.spacing * self.num_sites as f64
    }

    pub fn lattice(&self) -> ConfigResult<LatticeSpec> {
        LatticeSpec::new(self.num_sites, self.spacing, self.mass, self.dispersion)
            .map_err(|e| ConfigError::new("model", e.to_string()))
    }

    /// Builds the basis, state and chart, checking every precondition the commands rely on.
    pub fn prepare(&self) -> ConfigResult<Prepared> {
        let basis = build_mode_basis(self.lattice()?);
        let state = build_state(&self.state, &basis)?;
        let chart = build_chart(&self.chart)?;
        for (lo, hi) in self.intervals.iter().flatten() {
            QueryInterval::new(*lo, *hi)
                .and_then(|i| i.snap(self.spacing, self.num_sites))
                .map_err(|e| ConfigError::new("eval.intervals", e.to_string()))?;
        }
        if let Some(scan) = &self.scan {
            for &p in &scan.parameters {
                scan.family
                    .chart(p)
                    .map_err(|e| ConfigError::new("scan.parameters", e.to_string()))?;
            }
        }
        Ok(Prepared {
            basis,
            state,
            chart,
        })
    }

    /// Every setting after defaults are applied, keyed by path.
    pub fn resolved(&self) -> Json {
        let mut map = serde_json::Map::new();
        map.insert("model.N".into(), json!(self.num_sites));
        map.insert("model.a".into(), json!(self.spacing));
        map.insert("model.L".into(), json!(self.length()));
        map.insert("model.m".into(), json!(self.mass));
        map.insert("model.dispersion".into(), json!(self.dispersion.name()));
        match &self.state {
            StateConfig::Packet {
                center,
                width,
                mean_momentum,
            } => {
                map.insert("state.packet.center".into(), json!(center));
                map.insert("state.packet.width".into(), json!(width));
                map.insert("state.packet.mean_momentum".into(), json!(mean_momentum));
            }
            StateConfig::Mode { index } => {
                map.insert("state.mode.index".into(), json!(index));
            }
            StateConfig::Amplitudes { re, im } => {
                map.insert("state.amplitudes.re".into(), json!(re));
                map.insert("state.amplitudes.im".into(), json!(im));
            }
            StateConfig::Random { seed } => {
                map.insert("state.random.seed".into(), json!(seed));
            }
        }
        match &self.chart {
            ChartConfig::Identity => {
                map.insert("chart.kind".into(), json!("identity"));
            }
            ChartConfig::Dilation { rate } => {
                map.insert("chart.kind".into(), json!("dilation"));
                map.insert("chart.rate".into(), json!(rate));
            }
            ChartConfig::Rindler { acceleration } => {
                map.insert("chart.kind".into(), json!("rindler"));
                map.insert("chart.acceleration".into(), json!(acceleration));
            }
            ChartConfig::Custom {
                forward,
                inverse,
                params,
            } => {
                map.insert("chart.kind".into(), json!("custom"));
                map.insert("chart.custom.forward_t".into(), json!(forward[0]));
                map.insert("chart.custom.forward_x".into(), json!(forward[1]));
                map.insert("chart.custom.inverse_t".into(), json!(inverse[0]));
                map.insert("chart.custom.inverse_x".into(), json!(inverse[1]));
                for (k, v) in params {
                    map.insert(format!("{PARAM_PREFIX}{k}"), json!(v));
                }
            }
        }
        map.insert("eval.times".into(), json!(self.times));
        let intervals: Vec<[f64; 2]> = self
            .effective_intervals()
            .iter()
            .map(|&(lo, hi)| [lo, hi])
            .collect();
        map.insert("eval.intervals".into(), json!(intervals));
        if let Some(scan) = &self.scan {
            map.insert("scan.family".into(), json!(scan.family.name()));
            map.insert("scan.parameters".into(), json!(scan.parameters));
        }
        if let Some(format) = self.format {
            map.insert(
                "output.format".into(),
                json!(if format == OutputFormat::Csv {
                    "csv"
                } else {
                    "json"
                }),
            );
        }
        if let Some(path) = &self.output_path {
            map.insert("output.path".into(), json!(path));
        }
        Json::Object(map)
    }

    /// The configured intervals, or eight equal arcs of the circle.
    pub fn effective_intervals(&self) -> Vec<(f64, f64)> {
        match &self.intervals {
            Some(v) => v.clone(),
            None => {
                let l = self.length();
                (0..8)
                    .map(|k| (l * k as f64 / 8.0, l * (k + 1) as f64 / 8.0))
                    .collect()
            }
        }
    }
}

/// Objects built from a validated config.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub basis: Arc<ModeBasis>,
    pub state: SingleParticleState,
    pub chart: Chart,
}

fn parse_state(keys: &Keys, num_sites: usize) -> ConfigResult<StateConfig> {
    let present: Vec<&str> = STATE_KINDS
        .iter()
        .copied()
        .filter(|k| keys.has_table(k))
        .collect();
    match present.as_slice() {
        [] => Err(ConfigError::new(
            "state",
            format!("one of {} is required", STATE_KINDS.join(", ")),
        )),
        [one] => match *one {
            "state.packet" => {
                let width = keys.require_f64("state.packet.width")?;
                if width <= 0.0 {
                    return Err(ConfigError::new(
                        "state.packet.width",
                        format!("must be > 0, got {width}"),
                    ));
                }
                Ok(StateConfig::Packet {
                    center: keys.require_f64("state.packet.center")?,
                    width,
                    mean_momentum: keys.require_f64("state.packet.mean_momentum")?,
                })
            }
            "state.mode" => Ok(StateConfig::Mode {
                index: keys
                    .int("state.mode.index")?
                    .ok_or_else(|| ConfigError::new("state.mode.index", "required"))?,
            }),
            "state.amplitudes" => {
                let re = keys
                    .f64_array("state.amplitudes.re")?
                    .ok_or_else(|| ConfigError::new("state.amplitudes.re", "required"))?;
                let im = keys
                    .f64_array("state.amplitudes.im")?
                    .unwrap_or_else(|| vec![0.0; re.len()]);
                for (key, v) in [("state.amplitudes.re", &re), ("state.amplitudes.im", &im)] {
                    if v.len() != num_sites {
                        return Err(ConfigError::new(
                            key,
                            format!("expected {num_sites} entries, got {}", v.len()),
                        ));
                    }
                }
                Ok(StateConfig::Amplitudes { re, im })
            }
            _ => {
                let seed = keys.int("state.random.seed")?.unwrap_or(0);
                let seed = u64::try_from(seed).map_err(|_| {
                    ConfigError::new("state.random.seed", format!("must be >= 0, got {seed}"))
                })?;
                Ok(StateConfig::Random { seed })
            }
        },
        _ => Err(ConfigError::new(
            present[1],
            format!("conflicts with {}; give exactly one state", present[0]),
        )),
    }
}

fn build_state(state: &StateConfig, basis: &Arc<ModeBasis>) -> ConfigResult<SingleParticleState> {
    match state {
        StateConfig::Packet {
            center,
            width,
            mean_momentum,
        } => make_wave_packet(basis.clone(), *center, *width, *mean_momentum)
            .map_err(|e| ConfigError::new("state.packet", e.to_string())),
        StateConfig::Mode { index } => {
            let i = basis.index_of(*index).ok_or_else(|| {
                ConfigError::new(
                    "state.mode.index",
                    format!("no mode number {index} on this lattice"),
                )
            })?;
            SingleParticleState::pure_mode(basis.clone(), i)
                .map_err(|e| ConfigError::new("state.mode.index", e.to_string()))
        }
        StateConfig::Amplitudes { re, im } => {
            let amps = re
                .iter()
                .zip(im)
                .map(|(&r, &i)| Complex64::new(r, i))
                .collect();
            SingleParticleState::normalized(basis.clone(), amps)
                .map_err(|e| ConfigError::new("state.amplitudes", e.to_string()))
        }
        StateConfig::Random { seed } => Ok(SingleParticleState::random(basis.clone(), *seed)),
    }
}

fn parse_chart(keys: &Keys) -> ConfigResult<ChartConfig> {
    let kind = keys.string("chart.kind")?.unwrap_or("identity");
    let allowed: &[&str] = match kind {
        "identity" => &["chart.kind"],
        "dilation" => &["chart.kind", "chart.rate"],
        "rindler" => &["chart.kind", "chart.acceleration"],
        "custom" => &[
            "chart.kind",
            "chart.custom.forward_t",
            "chart.custom.forward_x",
            "chart.custom.inverse_t",
            "chart.custom.inverse_x",
        ],
        other => {
            return Err(ConfigError::new(
                "chart.kind",
                format!("expected identity, dilation, rindler or custom, got {other:?}"),
            ))
        }
    };
    for key in keys.leaves.keys().filter(|k| k.starts_with("chart.")) {
        let is_param = kind == "custom" && key.starts_with(PARAM_PREFIX);
        if !allowed.contains(&key.as_str()) && !is_param {
            return Err(ConfigError::new(
                key,
                format!("not used by chart.kind = {kind:?}"),
            ));
        }
    }
    Ok(match kind {
        "identity" => ChartConfig::Identity,
        "dilation" => ChartConfig::Dilation {
            rate: keys.require_f64("chart.rate")?,
        },
        "rindler" => ChartConfig::Rindler {
            acceleration: positive(
                "chart.acceleration",
                keys.require_f64("chart.acceleration")?,
            )?,
        },
        _ => {
            let mut params = BTreeMap::new();
            for key in keys.leaves.keys().filter(|k| k.starts_with(PARAM_PREFIX)) {
                params.insert(
                    key[PARAM_PREFIX.len()..].to_string(),
                    keys.require_f64(key)?,
                );
            }
            ChartConfig::Custom {
                forward: [
                    keys.require_string("chart.custom.forward_t")?,
                    keys.require_string("chart.custom.forward_x")?,
                ],
                inverse: [
                    keys.require_string("chart.custom.inverse_t")?,
                    keys.require_string("chart.custom.inverse_x")?,
                ],
                params,
            }
        }
    })
}

fn build_chart(chart: &ChartConfig) -> ConfigResult<Chart> {
    let built = match chart {
        ChartConfig::Identity => Ok(Chart::identity(2)),
        ChartConfig::Dilation { rate } => Chart::dilation(*rate),
        ChartConfig::Rindler { acceleration } => Chart::rindler(*acceleration),
        ChartConfig::Custom {
            forward,
            inverse,
            params,
        } => Chart::from_expressions(
            [forward[0].as_str(), forward[1].as_str()],
            [inverse[0].as_str(), inverse[1].as_str()],
            params,
        ),
    };
    built.map_err(|e| {
        ConfigError::new(
            if matches!(chart, ChartConfig::Custom { .. }) {
                "chart.custom"
            } else {
                "chart"
            },
            e.to_string(),
        )
    })
}

fn parse_intervals(keys: &Keys) -> ConfigResult<Option<Vec<(f64, f64)>>> {
    const KEY: &str = "eval.intervals";
    let Some(value) = keys.leaves.get(KEY) else {
        return Ok(None);
    };
    let Value::Array(items) = value else {
        return Err(ConfigError::new(KEY, "expected an array of [lo, hi] pairs"));
    };
    if items.is_empty() {
        return Err(ConfigError::new(KEY, "must not be empty"));
    }
    items
        .iter()
        .map(|item| match item {
            Value::Array(pair) if pair.len() == 2 => {
                Ok((to_f64(KEY, &pair[0])?, to_f64(KEY, &pair[1])?))
            }
            _ => Err(ConfigError::new(KEY, "expected an array of [lo, hi] pairs")),
        })
        .collect::<ConfigResult<Vec<_>>>()
        .map(Some)
}
