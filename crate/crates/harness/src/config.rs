//! Experiment configuration: flat `key = value` text with `[section]`
//! headers.
//!
//! ```text
//! preparation = hybrid-pqs1
//! backend = both
//! cutoff = auto
//! repetition_rate = 6.4e6
//!
//! [fixed]
//! phi = 0
//! t0 = 0.5
//!
//! [axis1]
//! name = delta
//! min = 0.2
//! max = 2.0
//! steps = 25
//!
//! [axis2]
//! name = t
//! min = 0.5
//! max = 0.98
//! steps = 25
//! ```
//!
//! `preparation = omega` additionally reads an `[omega]` section with
//! `n`, `scissors` (comma-separated `pqs1`/`pqs2`, one per truncated mode)
//! and `splits` (comma-separated, n − 2 transmissivities).

use std::fmt;
use std::str::FromStr;

use ini::Ini;
use pqs_core::analytics::Method;
use pqs_core::fock::required_cutoff;
use pqs_core::scissors::Scissors;
use pqs_core::{coherent_tail_weight, MAX_TAIL_WEIGHT};
use serde::Serialize;

use crate::error::{HarnessError, Result};

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .trim()
        .parse()
        .map_err(|_| config_err(format!("{}: expected a number, got {:?}", key, value)))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_f64(key, s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScissorsKind {
    Pqs1,
    Pqs2,
}

impl ScissorsKind {
    pub fn method(self, point: &Point) -> Method {
        match self {
            ScissorsKind::Pqs1 => Method::Pqs1 { t: point.t },
            ScissorsKind::Pqs2 => Method::Pqs2 { gamma_abs: point.gamma_abs },
        }
    }

    pub fn device(self, point: &Point) -> Scissors {
        match self {
            ScissorsKind::Pqs1 => Scissors::Pqs1 { t: point.t },
            ScissorsKind::Pqs2 => Scissors::pqs2(point.gamma_abs),
        }
    }
}

impl FromStr for ScissorsKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pqs1" => Ok(ScissorsKind::Pqs1),
            "pqs2" => Ok(ScissorsKind::Pqs2),
            other => Err(config_err(format!("unknown scissors {:?}", other))),
        }
    }
}

impl fmt::Display for ScissorsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScissorsKind::Pqs1 => "pqs1",
            ScissorsKind::Pqs2 => "pqs2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Preparation {
    /// Truncate the second mode of the two-party entangled coherent state.
    Hybrid(ScissorsKind),
    /// Truncate both modes with the same scissors.
    Bell(ScissorsKind),
    /// n-party state with the first `scissors.len()` modes truncated.
    Omega { n: usize, scissors: Vec<ScissorsKind>, splits: Vec<f64> },
}

impl Preparation {
    fn kinds(&self) -> Vec<ScissorsKind> {
        match self {
            Preparation::Hybrid(k) | Preparation::Bell(k) => vec![*k],
            Preparation::Omega { scissors, .. } => scissors.clone(),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, Preparation::Omega { .. })
    }

    pub fn name(&self) -> String {
        match self {
            Preparation::Hybrid(k) => format!("hybrid-{}", k),
            Preparation::Bell(k) => format!("bell-{}", k),
            Preparation::Omega { .. } => "omega".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisName {
    Delta,
    T,
    GammaAbs,
    Phi,
    T0,
}

impl AxisName {
    pub const ALL: [AxisName; 5] = [AxisName::Delta, AxisName::T, AxisName::GammaAbs, AxisName::Phi, AxisName::T0];

    pub fn as_str(self) -> &'static str {
        match self {
            AxisName::Delta => "delta",
            AxisName::T => "t",
            AxisName::GammaAbs => "gamma_abs",
            AxisName::Phi => "phi",
            AxisName::T0 => "t0",
        }
    }
}

impl FromStr for AxisName {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        AxisName::ALL
            .into_iter()
            .find(|a| a.as_str() == s.trim())
            .ok_or_else(|| config_err(format!("unknown axis {:?}", s)))
    }
}

impl fmt::Display for AxisName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One point of parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub delta: f64,
    pub t: f64,
    pub gamma_abs: f64,
    pub phi: f64,
    pub t0: f64,
}

impl Default for Point {
    fn default() -> Self {
        Point { delta: 1.0, t: 0.5, gamma_abs: 0.05, phi: 0.0, t0: 0.5 }
    }
}

impl Point {
    pub fn get(&self, name: AxisName) -> f64 {
        match name {
            AxisName::Delta => self.delta,
            AxisName::T => self.t,
            AxisName::GammaAbs => self.gamma_abs,
            AxisName::Phi => self.phi,
            AxisName::T0 => self.t0,
        }
    }

    pub fn set(&mut self, name: AxisName, value: f64) {
        match name {
            AxisName::Delta => self.delta = value,
            AxisName::T => self.t = value,
            AxisName::GammaAbs => self.gamma_abs = value,
            AxisName::Phi => self.phi = value,
            AxisName::T0 => self.t0 = value,
        }
    }

    fn check(&self) -> Result<()> {
        let ok = self.delta >= 0.0
            && (0.0..=1.0).contains(&self.t)
            && (0.0..1.0).contains(&self.gamma_abs)
            && self.phi.is_finite()
            && (0.0..=1.0).contains(&self.t0);
        if ok {
            Ok(())
        } else {
            Err(config_err(format!("parameters out of range: {:?}", self)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub name: AxisName,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: AxisName, min: f64, max: f64, steps: usize) -> Self {
        Axis { name, min, max, steps }
    }

    /// `steps` evenly spaced values from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let n = self.steps;
        (0..n)
            .map(|i| {
                if i + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffPolicy {
    /// Smallest cutoff meeting the tail bound for each cell's δ√2.
    Auto,
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Analytic,
    Numeric,
    Both,
}

impl Backend {
    pub fn analytic(self) -> bool {
        matches!(self, Backend::Analytic | Backend::Both)
    }

    pub fn numeric(self) -> bool {
        matches!(self, Backend::Numeric | Backend::Both)
    }
}

impl FromStr for Backend {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(Backend::Analytic),
            "numeric" => Ok(Backend::Numeric),
            "both" => Ok(Backend::Both),
            other => Err(config_err(format!("unknown backend {:?}", other))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Analytic => "analytic",
            Backend::Numeric => "numeric",
            Backend::Both => "both",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub preparation: Preparation,
    pub fixed: Point,
    pub axis1: Axis,
    pub axis2: Axis,
    pub cutoff: CutoffPolicy,
    pub backend: Backend,
    pub repetition_rate: Option<f64>,
}

impl ExperimentConfig {
    pub fn new(preparation: Preparation, axis1: Axis, axis2: Axis) -> Self {
        ExperimentConfig {
            preparation,
            fixed: Point::default(),
            axis1,
            axis2,
            cutoff: CutoffPolicy::Auto,
            backend: Backend::Analytic,
            repetition_rate: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = Ini::load_from_str(text).map_err(|e| config_err(e.to_string()))?;
        let mut preparation = None;
        let mut backend = Backend::Analytic;
        let mut cutoff = CutoffPolicy::Auto;
        let mut repetition_rate = None;
        let mut fixed = Point::default();
        let mut axes: [Option<Axis>; 2] = [None, None];
        let mut omega_n = None;
        let mut omega_scissors = Vec::new();
        let mut omega_splits = Vec::new();

        for (section, props) in ini.iter() {
            match section {
                None => {
                    for (k, v) in props.iter() {
                        match k {
                            "preparation" => preparation = Some(v.trim().to_string()),
                            "backend" => backend = v.parse()?,
                            "cutoff" => {
                                cutoff = match v.trim() {
                                    "auto" => CutoffPolicy::Auto,
                                    c => CutoffPolicy::Fixed(
                                        c.parse().map_err(|_| config_err(format!("bad cutoff {:?}", c)))?,
                                    ),
                                }
                            }
                            "repetition_rate" => repetition_rate = Some(parse_f64(k, v)?),
                            _ => return Err(config_err(format!("unknown key {:?}", k))),
                        }
                    }
                }
                Some("fixed") => {
                    for (k, v) in props.iter() {
                        fixed.set(k.parse()?, parse_f64(k, v)?);
                    }
                }
                Some(s @ ("axis1" | "axis2")) => {
                    let get = |key: &str| {
                        props.get(key).ok_or_else(|| config_err(format!("[{}] is missing {:?}", s, key)))
                    };
                    for (k, _) in props.iter() {
                        if !["name", "min", "max", "steps"].contains(&k) {
                            return Err(config_err(format!("unknown key {:?} in [{}]", k, s)));
                        }
                    }
                    let steps = get("steps")?;
                    let axis = Axis::new(
                        get("name")?.parse()?,
                        parse_f64("min", get("min")?)?,
                        parse_f64("max", get("max")?)?,
                        steps.trim().parse().map_err(|_| config_err(format!("bad steps {:?}", steps)))?,
                    );
                    axes[if s == "axis1" { 0 } else { 1 }] = Some(axis);
                }
                Some("omega") => {
                    for (k, v) in props.iter() {
                        match k {
                            "n" => {
                                omega_n = Some(v.trim().parse().map_err(|_| config_err(format!("bad n {:?}", v)))?)
                            }
                            "scissors" => {
                                omega_scissors = v.split(',').map(str::parse).collect::<Result<Vec<_>>>()?
                            }
                            "splits" => omega_splits = parse_list(k, v)?,
                            _ => return Err(config_err(format!("unknown key {:?} in [omega]", k))),
                        }
                    }
                }
                Some(other) => return Err(config_err(format!("unknown section [{}]", other))),
            }
        }

        let preparation = match preparation.as_deref() {
            Some("omega") => Preparation::Omega {
                n: omega_n.ok_or_else(|| config_err("[omega] needs n"))?,
                scissors: omega_scissors,
                splits: omega_splits,
            },
            Some(name) => {
                let (family, kind) = name
                    .split_once('-')
                    .ok_or_else(|| config_err(format!("unknown preparation {:?}", name)))?;
                let kind = kind.parse()?;
                match family {
                    "hybrid" => Preparation::Hybrid(kind),
                    "bell" => Preparation::Bell(kind),
                    _ => return Err(config_err(format!("unknown preparation {:?}", name))),
                }
            }
            None => return Err(config_err("missing preparation")),
        };
        let [a1, a2] = axes;
        let config = ExperimentConfig {
            preparation,
            fixed,
            axis1: a1.ok_or_else(|| config_err("missing [axis1]"))?,
            axis2: a2.ok_or_else(|| config_err("missing [axis2]"))?,
            cutoff,
            backend,
            repetition_rate,
        };
        config.validate()?;
        Ok(config)
    }

    /// Canonical text form; parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let mut out = format!("preparation = {}\n", self.preparation.name());
        out += &format!("backend = {}\n", self.backend);
        out += &match self.cutoff {
            CutoffPolicy::Auto => "cutoff = auto\n".to_string(),
            CutoffPolicy::Fixed(c) => format!("cutoff = {}\n", c),
        };
        if let Some(r) = self.repetition_rate {
            out += &format!("repetition_rate = {:e}\n", r);
        }
        out += "\n[fixed]\n";
        for a in AxisName::ALL {
            out += &format!("{} = {:?}\n", a, self.fixed.get(a));
        }
        for (label, axis) in [("axis1", &self.axis1), ("axis2", &self.axis2)] {
            out += &format!(
                "\n[{}]\nname = {}\nmin = {:?}\nmax = {:?}\nsteps = {}\n",
                label, axis.name, axis.min, axis.max, axis.steps
            );
        }
        if let Preparation::Omega { n, scissors, splits } = &self.preparation {
            let s: Vec<String> = scissors.iter().map(|k| k.to_string()).collect();
            let t: Vec<String> = splits.iter().map(|x| format!("{:?}", x)).collect();
            out += &format!("\n[omega]\nn = {}\nscissors = {}\nsplits = {}\n", n, s.join(","), t.join(","));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        for axis in [&self.axis1, &self.axis2] {
            if axis.steps < 2 {
                return Err(config_err(format!("axis {} needs at least 2 steps", axis.name)));
            }
            if !(axis.min.is_finite() && axis.max.is_finite()) {
                return Err(config_err(format!("axis {} has non-finite bounds", axis.name)));
            }
            for v in [axis.min, axis.max] {
                let mut p = self.fixed;
                p.set(axis.name, v);
                p.check()?;
            }
        }
        if self.axis1.name == self.axis2.name {
            return Err(config_err("the two axes must differ"));
        }
        self.fixed.check()?;
        let kinds = self.preparation.kinds();
        for axis in [&self.axis1, &self.axis2] {
            let unused = match axis.name {
                AxisName::T => !kinds.contains(&ScissorsKind::Pqs1),
                AxisName::GammaAbs => !kinds.contains(&ScissorsKind::Pqs2),
                _ => false,
            };
            if unused {
                return Err(config_err(format!(
                    "axis {} has no effect on {}",
                    axis.name,
                    self.preparation.name()
                )));
            }
        }
        if let Preparation::Omega { n, scissors, splits } = &self.preparation {
            if *n < 2 || scissors.is_empty() || scissors.len() > *n {
                return Err(config_err(format!("omega needs n ≥ 2 and 1..=n scissors, got n = {}", n)));
            }
            if splits.len() != n - 2 {
                return Err(config_err(format!("omega with n = {} needs {} splits", n, n - 2)));
            }
            if splits.iter().any(|t| !(0.0..=1.0).contains(t)) {
                return Err(config_err("splits must lie in [0, 1]"));
            }
            if self.backend.analytic() {
                return Err(config_err("omega has no closed form; use backend = numeric"));
            }
        }
        if let Some(r) = self.repetition_rate {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(config_err(format!("repetition_rate {} must be non-negative", r)));
            }
        }
        if self.backend.numeric() {
            if let CutoffPolicy::Fixed(cutoff) = self.cutoff {
                let amplitude = self.max_delta() * 2f64.sqrt();
                if coherent_tail_weight(amplitude, cutoff) > MAX_TAIL_WEIGHT {
                    return Err(HarnessError::Infeasible {
                        amplitude,
                        cutoff,
                        required: required_cutoff(amplitude, MAX_TAIL_WEIGHT),
                    });
                }
            }
        }
        Ok(())
    }

    fn max_delta(&self) -> f64 {
        [&self.axis1, &self.axis2]
            .iter()
            .filter(|a| a.name == AxisName::Delta)
            .map(|a| a.min.max(a.max))
            .fold(self.fixed.delta, f64::max)
    }

    /// Grid points in row order: axis1 outer, axis2 inner.
    pub fn points(&self) -> Vec<Point> {
        let v2 = self.axis2.values();
        self.axis1
            .values()
            .into_iter()
            .flat_map(|a| {
                v2.iter().map(move |&b| {
                    let mut p = self.fixed;
                    p.set(self.axis1.name, a);
                    p.set(self.axis2.name, b);
                    p
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
preparation = bell-pqs1
backend = both
repetition_rate = 6.4e6

[fixed]
phi = 0
t0 = 0.5

[axis1]
name = delta
min = 0.2
max = 2.0
steps = 3

[axis2]
name = t
min = 0.5
max = 0.98
steps = 4
";

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.preparation, Preparation::Bell(ScissorsKind::Pqs1));
        assert_eq!(c.backend, Backend::Both);
        assert_eq!(c.repetition_rate, Some(6.4e6));
        assert_eq!(c.points().len(), 12);
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn axis_values_hit_both_ends() {
        let v = Axis::new(AxisName::T, 0.5, 0.98, 25).values();
        assert_eq!(v.len(), 25);
        assert_eq!((v[0], v[24]), (0.5, 0.98));
    }

    #[test]
    fn omega_section() {
        let text = SAMPLE.replace("bell-pqs1", "omega").replace("both", "numeric")
            + "\n[omega]\nn = 3\nscissors = pqs1,pqs1\nsplits = 0.5\n";
        let c = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(
            c.preparation,
            Preparation::Omega { n: 3, scissors: vec![ScissorsKind::Pqs1; 2], splits: vec![0.5] }
        );
        assert_eq!(ExperimentConfig::parse(&c.to_text()).unwrap(), c);
        let analytic = text.replace("numeric", "analytic");
        assert!(matches!(ExperimentConfig::parse(&analytic), Err(HarnessError::Config(_))));
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            SAMPLE.replace("steps = 3", "steps = 1"),
            SAMPLE.replace("name = t", "name = delta"),
            SAMPLE.replace("name = t", "name = gamma_abs"),
            SAMPLE.replace("name = t", "name = theta"),
            SAMPLE.replace("bell-pqs1", "bell-pqs3"),
            SAMPLE.replace("max = 0.98", "max = 1.5"),
            SAMPLE.replace("[fixed]", "[fixed]\nfoo = 1"),
        ] {
            assert!(matches!(ExperimentConfig::parse(&bad), Err(HarnessError::Config(_))), "{}", bad);
        }
    }

    #[test]
    fn fixed_cutoff_must_hold_the_largest_amplitude() {
        let text = SAMPLE.replace("backend = both", "backend = both\ncutoff = 20");
        match ExperimentConfig::parse(&text) {
            Err(e @ HarnessError::Infeasible { required: 35, .. }) => assert_eq!(e.exit_code(), 3),
            other => panic!("{:?}", other),
        }
        let analytic = text.replace("both", "analytic");
        assert!(ExperimentConfig::parse(&analytic).is_ok());
    }
}
