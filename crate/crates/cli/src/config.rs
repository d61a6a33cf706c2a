//! Flat `key=value` run configuration.

use std::collections::BTreeMap;

use dressed_core::model::SPEED_OF_LIGHT;
use dressed_core::Spec;

use crate::error::CliError;

pub const SPEC_KEYS: [&str; 8] = ["bar_omega", "g", "beta", "cavity_L", "delta", "light_speed", "n_modes", "hbar"];
pub const GRID_KEYS: [&str; 3] = ["t_max", "samples", "k_max"];

pub const DEFAULT_N_MODES: usize = 64;
pub const DEFAULT_SAMPLES: usize = 501;
pub const DEFAULT_K_MAX: usize = 10_000;
/// In units of `1/ω̄`.
pub const DEFAULT_T_MAX: f64 = 50.0;

/// Configuration used when no `--config` is given.
pub const DEFAULT_CONFIG: &str = "\
bar_omega = 1
beta = 0.1
delta = 0.5
light_speed = 1
n_modes = 50
";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: Spec,
    pub t_max: f64,
    pub samples: usize,
    pub k_max: usize,
}

/// Parse `key=value` lines. Blank lines and text after `#` are ignored.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Input(format!("line {}: expected key=value, got `{line}`", i + 1)));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(CliError::Input(format!("line {}: empty key or value", i + 1)));
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(CliError::Input(format!("line {}: key `{k}` given twice", i + 1)));
        }
    }
    Ok(out)
}

fn number(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>, CliError> {
    pairs
        .get(key)
        .map(|v| v.parse::<f64>().map_err(|_| CliError::Input(format!("`{key}`: not a number: `{v}`"))))
        .transpose()
}

fn count(pairs: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>, CliError> {
    pairs
        .get(key)
        .map(|v| v.parse::<usize>().map_err(|_| CliError::Input(format!("`{key}`: not a non-negative integer: `{v}`"))))
        .transpose()
}

fn one_of(pairs: &BTreeMap<String, String>, a: &str, b: &str) -> Result<(Option<f64>, Option<f64>), CliError> {
    match (number(pairs, a)?, number(pairs, b)?) {
        (Some(_), Some(_)) => Err(CliError::Input(format!("give exactly one of `{a}` and `{b}`, not both"))),
        (None, None) => Err(CliError::Input(format!("missing `{a}` (or `{b}`)"))),
        pair => Ok(pair),
    }
}

/// Resolve the system spec from parsed pairs, ignoring keys outside [`SPEC_KEYS`].
pub fn resolve_spec(pairs: &BTreeMap<String, String>) -> Result<Spec, CliError> {
    let bar_omega = number(pairs, "bar_omega")?.ok_or_else(|| CliError::Input("missing `bar_omega`".into()))?;
    let (g, beta) = one_of(pairs, "g", "beta")?;
    let (cavity_l, delta) = one_of(pairs, "cavity_L", "delta")?;
    let light_speed = number(pairs, "light_speed")?.unwrap_or(SPEED_OF_LIGHT);
    let n_modes = count(pairs, "n_modes")?.unwrap_or(DEFAULT_N_MODES);
    let hbar = number(pairs, "hbar")?.unwrap_or(1.0);
    let g = g.unwrap_or_else(|| beta.unwrap_or(f64::NAN) * bar_omega);
    let cavity_l = match (cavity_l, delta) {
        (Some(l), _) => l,
        (None, Some(d)) => 2.0 * light_speed * d / g,
        (None, None) => unreachable!(),
    };
    // Report β or δ by name when they were the given keys.
    if let Some(b) = beta {
        if !(b.is_finite() && b > 0.0) {
            return Err(CliError::Input(format!("invalid parameter `beta`: must be finite and > 0, got {b}")));
        }
    }
    if let Some(d) = delta {
        if !(d.is_finite() && d > 0.0) {
            return Err(CliError::Input(format!("invalid parameter `delta`: must be finite and > 0, got {d}")));
        }
    }
    Ok(Spec::with_all(bar_omega, g, cavity_l, light_speed, n_modes, hbar)?)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let pairs = parse_pairs(text)?;
        if let Some(k) = pairs.keys().find(|k| !SPEC_KEYS.contains(&k.as_str()) && !GRID_KEYS.contains(&k.as_str())) {
            return Err(CliError::Input(format!("unknown key `{k}`")));
        }
        let spec = resolve_spec(&pairs)?;
        let t_max = number(&pairs, "t_max")?.unwrap_or(DEFAULT_T_MAX / spec.bar_omega());
        let samples = count(&pairs, "samples")?.unwrap_or(DEFAULT_SAMPLES);
        let k_max = count(&pairs, "k_max")?.unwrap_or(DEFAULT_K_MAX);
        let cfg = Self { spec, t_max, samples, k_max };
        cfg.check_grid()?;
        Ok(cfg)
    }

    pub fn check_grid(&self) -> Result<(), CliError> {
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(CliError::Input(format!("`t_max` must be finite and > 0, got {}", self.t_max)));
        }
        if self.samples < 2 {
            return Err(CliError::Input(format!("`samples` must be at least 2, got {}", self.samples)));
        }
        if self.k_max < 1 {
            return Err(CliError::Input("`k_max` must be at least 1".into()));
        }
        Ok(())
    }

    /// `samples` evenly spaced times on `[0, t_max]`.
    pub fn times(&self) -> Vec<f64> {
        let step = self.t_max / (self.samples - 1) as f64;
        (0..self.samples).map(|i| step * i as f64).collect()
    }
}

/// Spec echo, one `key=value` per entry, formatted to round-trip exactly.
pub fn spec_pairs(spec: &Spec) -> Vec<(&'static str, String)> {
    vec![
        ("bar_omega", format!("{:.16e}", spec.bar_omega())),
        ("g", format!("{:.16e}", spec.g())),
        ("cavity_L", format!("{:.16e}", spec.cavity_l())),
        ("light_speed", format!("{:.16e}", spec.light_speed())),
        ("n_modes", spec.n_modes().to_string()),
        ("hbar", format!("{:.16e}", spec.hbar())),
    ]
}

/// Rebuild the spec from the `# key=value` header of an emitted file.
pub fn spec_from_header(text: &str) -> Result<Spec, CliError> {
    let header: String = text
        .lines()
        .filter_map(|l| l.strip_prefix('#'))
        .filter(|l| l.split_once('=').is_some_and(|(k, _)| SPEC_KEYS.contains(&k.trim())))
        .map(|l| format!("{l}\n"))
        .collect();
    resolve_spec(&parse_pairs(&header)?)
}
