//! Sweep configuration files.
//!
//! Line-based UTF-8 text. `[section]` headers group `key = value` pairs and
//! `#` starts a comment. Sections:
//!
//! ```text
//! [run]
//! command = qfi-coherence
//! seed = 7
//! shots = 100000
//!
//! [axis T]
//! unit = K
//! scale = log
//! min = 1e-3
//! max = 1e-1
//! points = 60
//!
//! [axis tau]
//! unit = s
//! values = 1e-5, 1e-4, 1e-3
//!
//! [fixed]
//! omega_a = 1e9 Hz
//! alpha = 2
//! ```
//!
//! Frequencies are ordinary frequencies in Hz. Fixed parameters may list
//! several comma-separated values followed by one unit.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

/// Units accepted in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Hz,
    Second,
    Kelvin,
    Dimensionless,
}

impl Unit {
    pub fn parse(s: &str) -> Option<Unit> {
        match s {
            "Hz" => Some(Unit::Hz),
            "s" => Some(Unit::Second),
            "K" => Some(Unit::Kelvin),
            "1" | "" => Some(Unit::Dimensionless),
            _ => None,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Hz => "Hz",
            Unit::Second => "s",
            Unit::Kelvin => "K",
            Unit::Dimensionless => "1",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Configuration problem, with the offending line when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    pub fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AxisSpec {
    Range {
        scale: Scale,
        min: f64,
        max: f64,
        points: usize,
    },
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub unit: Unit,
    pub spec: AxisSpec,
    pub line: usize,
}

pub const MAX_AXIS_POINTS: usize = 1_000_000;

impl Axis {
    /// Grid values; log axes are spaced geometrically, endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        match &self.spec {
            AxisSpec::Values(v) => v.clone(),
            AxisSpec::Range { points: 1, min, .. } => vec![*min],
            AxisSpec::Range {
                scale,
                min,
                max,
                points,
            } => {
                let last = points - 1;
                (0..*points)
                    .map(|i| {
                        if i == 0 {
                            *min
                        } else if i == last {
                            *max
                        } else {
                            let f = i as f64 / last as f64;
                            match scale {
                                Scale::Linear => min + (max - min) * f,
                                Scale::Log => (min.ln() + (max.ln() - min.ln()) * f).exp(),
                            }
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match &self.spec {
            AxisSpec::Values(v) => v.len(),
            AxisSpec::Range { points, .. } => *points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// (min, max) of the grid.
    pub fn bounds(&self) -> (f64, f64) {
        let v = self.values();
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// A fixed parameter: one or more values sharing a unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantity {
    pub values: Vec<f64>,
    pub unit: Unit,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepConfig {
    pub command: Option<String>,
    pub strategy: Option<String>,
    pub seed: Option<u64>,
    pub shots: Option<usize>,
    pub output: Option<String>,
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, Quantity>,
}

/// Shortest representation that parses back to the same f64.
pub fn format_number(x: f64) -> String {
    format!("{x:e}")
}

fn parse_number(s: &str, line: usize) -> Result<f64, ConfigError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| ConfigError::at(line, format!("`{}` is not a number", s.trim())))?;
    if !v.is_finite() {
        return Err(ConfigError::at(line, format!("`{}` is not finite", s.trim())));
    }
    Ok(v)
}

fn parse_list(s: &str, line: usize) -> Result<Vec<f64>, ConfigError> {
    let items: Vec<&str> = s.split(',').map(str::trim).collect();
    if items.iter().any(|i| i.is_empty()) {
        return Err(ConfigError::at(line, "empty entry in value list"));
    }
    items.into_iter().map(|i| parse_number(i, line)).collect()
}

fn parse_integer<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, ConfigError> {
    s.trim().parse().map_err(|_| {
        ConfigError::at(
            line,
            format!("{what} must be a nonnegative integer, got `{}`", s.trim()),
        )
    })
}

/// `1e9 Hz`, `2`, `10e3, 20e3 Hz`
fn parse_quantity(s: &str, line: usize) -> Result<Quantity, ConfigError> {
    let s = s.trim();
    let (numbers, unit) = match s.rsplit_once(char::is_whitespace) {
        // a trailing token not preceded by a list comma is a unit (`1` included)
        Some((head, tail)) if !head.trim_end().ends_with(',') && !tail.ends_with(',') => {
            let unit = Unit::parse(tail)
                .ok_or_else(|| ConfigError::at(line, format!("unknown unit `{tail}` (expected Hz, s, K or 1)")))?;
            (head.trim_end(), unit)
        }
        _ => (s, Unit::Dimensionless),
    };
    Ok(Quantity {
        values: parse_list(numbers, line)?,
        unit,
        line,
    })
}

#[derive(Default)]
struct AxisDraft {
    name: String,
    line: usize,
    unit: Option<Unit>,
    scale: Option<Scale>,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<usize>,
    values: Option<Vec<f64>>,
}

impl AxisDraft {
    fn finish(self) -> Result<Axis, ConfigError> {
        let line = self.line;
        let name = self.name;
        let unit = self.unit.unwrap_or(Unit::Dimensionless);
        let spec = if let Some(values) = self.values {
            if self.min.is_some() || self.max.is_some() || self.points.is_some() || self.scale.is_some() {
                return Err(ConfigError::at(
                    line,
                    format!("axis `{name}`: give either `values` or min/max/points, not both"),
                ));
            }
            if values.is_empty() {
                return Err(ConfigError::at(line, format!("axis `{name}` has no values")));
            }
            AxisSpec::Values(values)
        } else {
            let missing = |k: &str| ConfigError::at(line, format!("axis `{name}` is missing `{k}`"));
            let min = self.min.ok_or_else(|| missing("min"))?;
            let max = self.max.ok_or_else(|| missing("max"))?;
            let points = self.points.ok_or_else(|| missing("points"))?;
            let scale = self.scale.unwrap_or(Scale::Linear);
            if min > max {
                return Err(ConfigError::at(line, format!("axis `{name}`: min exceeds max")));
            }
            if points == 0 || points > MAX_AXIS_POINTS {
                return Err(ConfigError::at(
                    line,
                    format!("axis `{name}`: points must lie in 1..={MAX_AXIS_POINTS}"),
                ));
            }
            if points == 1 && min != max {
                return Err(ConfigError::at(
                    line,
                    format!("axis `{name}`: at least 2 points unless min equals max"),
                ));
            }
            if points >= 2 && min == max {
                return Err(ConfigError::at(line, format!("axis `{name}`: min equals max")));
            }
            if scale == Scale::Log && min <= 0.0 {
                return Err(ConfigError::at(line, format!("axis `{name}`: log scale needs min > 0")));
            }
            AxisSpec::Range {
                scale,
                min,
                max,
                points,
            }
        };
        Ok(Axis { name, unit, spec, line })
    }
}

enum Section {
    None,
    Run,
    Axis(AxisDraft),
    Fixed,
}

impl SweepConfig {
    pub fn parse(text: &str) -> Result<SweepConfig, ConfigError> {
        let mut cfg = SweepConfig::default();
        let mut section = Section::None;
        let mut seen_sections: Vec<String> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(header) = content.strip_prefix('[') {
                let header = header
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(line, "unterminated section header"))?
                    .trim();
                if let Section::Axis(draft) = std::mem::replace(&mut section, Section::None) {
                    cfg.push_axis(draft.finish()?)?;
                }
                if seen_sections.iter().any(|s| s == header) {
                    return Err(ConfigError::at(line, format!("duplicate section [{header}]")));
                }
                seen_sections.push(header.to_string());
                section = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
                    ["run"] => Section::Run,
                    ["fixed"] => Section::Fixed,
                    ["axis", name] => Section::Axis(AxisDraft {
                        name: name.to_string(),
                        line,
                        ..AxisDraft::default()
                    }),
                    _ => return Err(ConfigError::at(line, format!("unknown section [{header}]"))),
                };
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| ConfigError::at(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ConfigError::at(line, "empty key"));
            }
            if value.is_empty() {
                return Err(ConfigError::at(line, format!("`{key}` has no value")));
            }
            match &mut section {
                Section::None => {
                    return Err(ConfigError::at(line, "key outside of any section"));
                }
                Section::Run => {
                    let dup = |present: bool| -> Result<(), ConfigError> {
                        if present {
                            Err(ConfigError::at(line, format!("duplicate key `{key}`")))
                        } else {
                            Ok(())
                        }
                    };
                    match key {
                        "command" => {
                            dup(cfg.command.is_some())?;
                            cfg.command = Some(value.to_string());
                        }
                        "strategy" => {
                            dup(cfg.strategy.is_some())?;
                            cfg.strategy = Some(value.to_string());
                        }
                        "seed" => {
                            dup(cfg.seed.is_some())?;
                            cfg.seed = Some(parse_integer(value, line, "seed")?);
                        }
                        "shots" => {
                            dup(cfg.shots.is_some())?;
                            cfg.shots = Some(parse_integer(value, line, "shots")?);
                        }
                        "output" => {
                            dup(cfg.output.is_some())?;
                            cfg.output = Some(value.to_string());
                        }
                        _ => return Err(ConfigError::at(line, format!("unknown key `{key}` in [run]"))),
                    }
                }
                Section::Axis(draft) => {
                    let dup = |present: bool| -> Result<(), ConfigError> {
                        if present {
                            Err(ConfigError::at(line, format!("duplicate key `{key}`")))
                        } else {
                            Ok(())
                        }
                    };
                    match key {
                        "unit" => {
                            dup(draft.unit.is_some())?;
                            draft.unit = Some(
                                Unit::parse(value)
                                    .ok_or_else(|| ConfigError::at(line, format!("unknown unit `{value}`")))?,
                            );
                        }
                        "scale" => {
                            dup(draft.scale.is_some())?;
                            draft.scale = Some(match value {
                                "linear" => Scale::Linear,
                                "log" => Scale::Log,
                                _ => return Err(ConfigError::at(line, "scale must be `linear` or `log`")),
                            });
                        }
                        "min" => {
                            dup(draft.min.is_some())?;
                            draft.min = Some(parse_number(value, line)?);
                        }
                        "max" => {
                            dup(draft.max.is_some())?;
                            draft.max = Some(parse_number(value, line)?);
                        }
                        "points" => {
                            dup(draft.points.is_some())?;
                            draft.points = Some(parse_integer(value, line, "points")?);
                        }
                        "values" => {
                            dup(draft.values.is_some())?;
                            draft.values = Some(parse_list(value, line)?);
                        }
                        _ => return Err(ConfigError::at(line, format!("unknown axis key `{key}`"))),
                    }
                }
                Section::Fixed => {
                    if cfg.fixed.contains_key(key) {
                        return Err(ConfigError::at(line, format!("duplicate parameter `{key}`")));
                    }
                    cfg.fixed.insert(key.to_string(), parse_quantity(value, line)?);
                }
            }
        }
        if let Section::Axis(draft) = section {
            cfg.push_axis(draft.finish()?)?;
        }
        Ok(cfg)
    }

    fn push_axis(&mut self, axis: Axis) -> Result<(), ConfigError> {
        if self.axes.len() == 2 {
            return Err(ConfigError::at(axis.line, "at most 2 axes per sweep"));
        }
        if self.axes.iter().any(|a| a.name == axis.name) {
            return Err(ConfigError::at(axis.line, format!("duplicate axis `{}`", axis.name)));
        }
        self.axes.push(axis);
        Ok(())
    }

    /// Canonical text form; parsing it yields an equal configuration.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        out.push_str("[run]\n");
        if let Some(c) = &self.command {
            let _ = writeln!(out, "command = {c}");
        }
        if let Some(s) = &self.strategy {
            let _ = writeln!(out, "strategy = {s}");
        }
        if let Some(s) = self.seed {
            let _ = writeln!(out, "seed = {s}");
        }
        if let Some(s) = self.shots {
            let _ = writeln!(out, "shots = {s}");
        }
        if let Some(o) = &self.output {
            let _ = writeln!(out, "output = {o}");
        }
        for axis in &self.axes {
            let _ = writeln!(out, "\n[axis {}]", axis.name);
            let _ = writeln!(out, "unit = {}", axis.unit);
            match &axis.spec {
                AxisSpec::Range {
                    scale,
                    min,
                    max,
                    points,
                } => {
                    let scale = match scale {
                        Scale::Linear => "linear",
                        Scale::Log => "log",
                    };
                    let _ = writeln!(out, "scale = {scale}");
                    let _ = writeln!(out, "min = {}", format_number(*min));
                    let _ = writeln!(out, "max = {}", format_number(*max));
                    let _ = writeln!(out, "points = {points}");
                }
                AxisSpec::Values(v) => {
                    let list: Vec<String> = v.iter().map(|x| format_number(*x)).collect();
                    let _ = writeln!(out, "values = {}", list.join(", "));
                }
            }
        }
        if !self.fixed.is_empty() {
            out.push_str("\n[fixed]\n");
            for (k, q) in &self.fixed {
                let list: Vec<String> = q.values.iter().map(|x| format_number(*x)).collect();
                match q.unit {
                    Unit::Dimensionless => {
                        let _ = writeln!(out, "{k} = {}", list.join(", "));
                    }
                    u => {
                        let _ = writeln!(out, "{k} = {} {u}", list.join(", "));
                    }
                }
            }
        }
        out
    }

    pub fn axis(&self, name: &str) -> Option<&Axis> {
        self.axes.iter().find(|a| a.name == name)
    }

    /// Single value of a fixed parameter in the expected unit.
    pub fn scalar(&self, name: &str, unit: Unit) -> Result<f64, ConfigError> {
        let q = self
            .fixed
            .get(name)
            .ok_or_else(|| ConfigError::general(format!("missing fixed parameter `{name}` [{unit}]")))?;
        if q.values.len() != 1 {
            return Err(ConfigError::at(q.line, format!("`{name}` takes a single value")));
        }
        Ok(self.list(name, unit)?[0])
    }

    pub fn scalar_or(&self, name: &str, unit: Unit, default: f64) -> Result<f64, ConfigError> {
        if self.fixed.contains_key(name) {
            self.scalar(name, unit)
        } else {
            Ok(default)
        }
    }

    /// All values of a fixed parameter in the expected unit.
    pub fn list(&self, name: &str, unit: Unit) -> Result<Vec<f64>, ConfigError> {
        let q = self
            .fixed
            .get(name)
            .ok_or_else(|| ConfigError::general(format!("missing fixed parameter `{name}` [{unit}]")))?;
        if q.unit != unit {
            return Err(ConfigError::at(
                q.line,
                format!("`{name}` must be given in {unit}, found {}", q.unit),
            ));
        }
        Ok(q.values.clone())
    }

    /// Requires exactly the named axes, in order, with the given units.
    pub fn require_axes(&self, expected: &[(&str, Unit)]) -> Result<Vec<Vec<f64>>, ConfigError> {
        if self.axes.len() != expected.len() {
            let names: Vec<String> = expected.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
            return Err(ConfigError::general(format!(
                "expected {} axis section(s): {}",
                expected.len(),
                names.join(", ")
            )));
        }
        let mut out = Vec::new();
        for (axis, (name, unit)) in self.axes.iter().zip(expected) {
            if axis.name != *name {
                return Err(ConfigError::at(
                    axis.line,
                    format!("expected axis `{name}`, found `{}`", axis.name),
                ));
            }
            if axis.unit != *unit {
                return Err(ConfigError::at(
                    axis.line,
                    format!("axis `{name}` must be in {unit}, found {}", axis.unit),
                ));
            }
            out.push(axis.values());
        }
        Ok(out)
    }

    /// Rejects fixed parameters the command does not use.
    pub fn only_fixed(&self, allowed: &[&str]) -> Result<(), ConfigError> {
        for (k, q) in &self.fixed {
            if !allowed.contains(&k.as_str()) {
                return Err(ConfigError::at(
                    q.line,
                    format!("unknown parameter `{k}` (expected one of: {})", allowed.join(", ")),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# coherence heatmap
[run]
command = qfi-coherence
seed = 7

[axis T]
unit = K
scale = log
min = 1e-3
max = 0.1   # 100 mK
points = 5

[axis tau]
unit = s
values = 1e-5, 1e-4, 1e-3

[fixed]
omega_a = 1e9 Hz
alpha = 2
chi_b = 10e3, 20e3, 50e3 Hz
";

    #[test]
    fn parses_sample() {
        let c = SweepConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.command.as_deref(), Some("qfi-coherence"));
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.axes.len(), 2);
        let t = c.axes[0].values();
        assert_eq!(t.len(), 5);
        assert_eq!(t[0], 1e-3);
        assert_eq!(t[4], 0.1);
        assert!((t[2] - 1e-2).abs() < 1e-15);
        assert_eq!(c.axes[1].values(), vec![1e-5, 1e-4, 1e-3]);
        assert_eq!(c.scalar("omega_a", Unit::Hz).unwrap(), 1e9);
        assert_eq!(c.scalar("alpha", Unit::Dimensionless).unwrap(), 2.0);
        assert_eq!(c.list("chi_b", Unit::Hz).unwrap(), vec![10e3, 20e3, 50e3]);
        assert!(c.scalar("omega_a", Unit::Kelvin).is_err());
    }

    #[test]
    fn round_trip_is_idempotent() {
        let c = SweepConfig::parse(SAMPLE).unwrap();
        let once = c.serialize();
        let again = SweepConfig::parse(&once).unwrap().serialize();
        assert_eq!(once, again);
        let reparsed = SweepConfig::parse(&once).unwrap();
        assert_eq!(reparsed.axes[0].values(), c.axes[0].values());
        assert_eq!(reparsed.fixed["chi_b"].values, c.fixed["chi_b"].values);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("[run]\ncommand = x\n[bogus]\n", 3),
            ("[fixed]\nomega_a = 1e9 GHz\n", 2),
            ("[axis T]\nunit = K\nmin = 2\nmax = 1\npoints = 3\n", 1),
            ("[fixed]\nalpha = 2\nalpha = 3\n", 3),
            ("alpha = 2\n", 1),
            ("[axis T]\nunit = K\nscale = log\nmin = 0\nmax = 1\npoints = 3\n", 1),
            ("[fixed]\nalpha = two\n", 2),
            ("[axis a]\nvalues = 1\n[axis b]\nvalues = 1\n[axis c]\nvalues = 1\n", 5),
        ];
        for (text, line) in cases {
            let err = SweepConfig::parse(text).unwrap_err();
            assert_eq!(err.line, Some(line), "{text:?}: {err}");
        }
    }

    #[test]
    fn single_point_axis() {
        let c = SweepConfig::parse("[axis T]\nunit = K\nmin = 0.01\nmax = 0.01\npoints = 1\n").unwrap();
        assert_eq!(c.axes[0].values(), vec![0.01]);
        assert!(SweepConfig::parse("[axis T]\nunit = K\nmin = 0.01\nmax = 0.02\npoints = 1\n").is_err());
    }

    #[test]
    fn number_format_round_trips() {
        for x in [1e9, 5e4, 2.0, 0.1, 1.0 / 3.0, 6.02214076e23, -4.5e-7] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }
}
