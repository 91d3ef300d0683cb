//! Run configuration: strict JSON parsing, per-problem defaults and validation.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Experiment selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Burgers,
    Diffuse1d,
    Particles2d,
    NavierStokes,
    Stochastic,
    StabilityCheck,
    SplitOrder,
}

impl Problem {
    pub fn name(self) -> &'static str {
        match self {
            Problem::Burgers => "burgers",
            Problem::Diffuse1d => "diffuse1d",
            Problem::Particles2d => "particles2d",
            Problem::NavierStokes => "navier-stokes",
            Problem::Stochastic => "stochastic",
            Problem::StabilityCheck => "stability-check",
            Problem::SplitOrder => "split-order",
        }
    }

    /// Keys this problem reads, besides `problem`, `out` and `seed`.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Problem::Burgers => &["nx", "dt", "steps", "nu", "scheme", "ladder"],
            Problem::Diffuse1d => &[
                "nx",
                "dt",
                "steps",
                "diffusivity",
                "scheme",
                "order",
                "sampling",
                "corrections",
                "tolerance",
                "ladder",
            ],
            Problem::Particles2d => &[
                "nx", "dt", "steps", "d0", "beta", "growth", "noise", "wind_mode", "scheme", "every",
            ],
            Problem::NavierStokes => &[
                "preset",
                "nx",
                "ny",
                "dt",
                "re",
                "max_steps",
                "threshold",
                "psi_iterations",
                "scheme",
            ],
            Problem::Stochastic => &["nx", "dt", "lower", "upper", "samples"],
            Problem::StabilityCheck => &["trials"],
            Problem::SplitOrder => &["nx", "diffusivity", "speed", "t_end", "corrections", "scheme", "ladder"],
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Every key of a run. Unset keys take the problem's default during [`RunConfig::resolve`].
///
/// | key | used by | default |
/// |---|---|---|
/// | `problem` | all | required |
/// | `out` | all | `"dirode-out"` |
/// | `seed` | all (stochastic parts) | `0` |
/// | `nx` | all but stability-check | burgers 51, diffuse1d 101, particles2d 200, navier-stokes 200, stochastic 101, split-order 201 |
/// | `ny` | navier-stokes | 50 |
/// | `dt` | burgers 0.01, diffuse1d 0.01, particles2d 0.01, navier-stokes 0.01, stochastic 1e-4 | |
/// | `steps` | burgers 10, diffuse1d 10, particles2d 100 | |
/// | `scheme` | see [`crate::experiments`] | |
/// | `order`, `sampling`, `corrections`, `tolerance` | diffuse1d | 2, `"uniform"`, 5000, 1e-10 |
/// | `corrections` | split-order | 5000 |
/// | `nu` | burgers | 0.005 |
/// | `diffusivity` | diffuse1d 1.0, split-order 0.05 | |
/// | `d0`, `beta`, `growth`, `noise`, `wind_mode`, `every` | particles2d | 0.001, 10, 0.01, 0, `"per-step"`, `steps` |
/// | `preset`, `re`, `max_steps`, `threshold`, `psi_iterations` | navier-stokes | `"channel"`, preset's Re, 200000, 1e-8, 1 |
/// | `lower`, `upper`, `samples` | stochastic | 0.1, 0.9, `[100, 1000, 10000, 100000]` |
/// | `trials` | stability-check | 100 |
/// | `speed`, `t_end` | split-order | 1.0, 0.5 |
/// | `ladder` | burgers, diffuse1d, split-order | none; split-order `"dt:0.05,0.025,0.0125,0.00625"` |
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<Problem>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sampling: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrections: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diffusivity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wind_mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub every: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConfigError {
    /// Malformed document; position is 1-based.
    Parse { line: usize, column: usize, message: String },
    /// A well-formed document with a bad or missing value.
    Validation { key: String, reason: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse { line, column, message } => {
                write!(f, "config parse error at line {line}, column {column}: {message}")
            }
            ConfigError::Validation { key, reason } => write!(f, "{key} {reason}"),
        }
    }
}

impl std::error::Error for ConfigError {}

pub(crate) fn bad<T>(key: &str, reason: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Validation {
        key: key.to_string(),
        reason: reason.into(),
    })
}

/// Parses a JSON object. An empty (or all-whitespace) document is an empty object.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    if text.trim().is_empty() {
        return Ok(RunConfig::default());
    }
    serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parameter refined by a convergence ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderParam {
    Dt,
    Nx,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    pub param: LadderParam,
    pub rungs: Vec<f64>,
}

/// `dt:0.01,0.005,0.0025` or `nx:51,101,201`; at least three rungs.
pub fn parse_ladder(spec: &str) -> Result<Ladder, ConfigError> {
    let Some((p, rest)) = spec.split_once(':') else {
        return bad("ladder", format!("expected `param:rung,rung,...`, got `{spec}`"));
    };
    let param = match p.trim() {
        "dt" => LadderParam::Dt,
        "nx" => LadderParam::Nx,
        other => return bad("ladder", format!("unknown parameter `{other}` (expected dt or nx)")),
    };
    let rungs = rest
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .or_else(|e| bad("ladder", format!("bad rung value: {e}")))?;
    if rungs.len() < 3 {
        return bad("ladder", format!("need at least 3 rungs, got {}", rungs.len()));
    }
    if rungs.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return bad("ladder", "rungs must be positive");
    }
    if param == LadderParam::Nx && rungs.iter().any(|r| r.fract() != 0.0 || *r < 3.0) {
        return bad("ladder", "nx rungs must be integers >= 3");
    }
    Ok(Ladder { param, rungs })
}

fn positive(key: &str, v: Option<f64>) -> Result<(), ConfigError> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => bad(key, format!("must be positive, got {x}")),
        _ => Ok(()),
    }
}

fn at_least(key: &str, v: Option<usize>, min: usize) -> Result<(), ConfigError> {
    match v {
        Some(x) if x < min => bad(key, format!("must be at least {min}, got {x}")),
        _ => Ok(()),
    }
}

fn one_of(key: &str, v: &Option<String>, allowed: &[&str]) -> Result<(), ConfigError> {
    match v {
        Some(s) if !allowed.contains(&s.as_str()) => bad(key, format!("unknown value `{s}` (expected one of {})", allowed.join(", "))),
        _ => Ok(()),
    }
}

pub const BURGERS_SCHEMES: &[&str] = &[
    "all",
    "classic-implicit",
    "spatial-ode",
    "temporal-p0",
    "temporal-p1",
    "temporal-p1-loop",
];
pub const DIFFUSE_SCHEMES: &[&str] = &["temporal", "explicit", "classic-implicit", "spatial-ode"];
pub const FLOW_SCHEMES: &[&str] = &["both", "directional", "adi", "adi-literal"];
pub const SPLIT_SCHEMES: &[&str] = &["both", "lie", "strang", "strang-dad"];
pub const PRESETS: &[&str] = &["channel", "step-quarter", "step-half", "moving-wall", "reverse-wall"];

impl RunConfig {
    fn set_keys(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! check {
            ($($f:ident),*) => { $( if self.$f.is_some() { v.push(stringify!($f)); } )* };
        }
        check!(
            nx, ny, dt, steps, scheme, order, sampling, corrections, tolerance, nu, diffusivity, d0, beta, growth, noise,
            wind_mode, every, preset, re, max_steps, threshold, psi_iterations, lower, upper, samples, trials, speed, t_end,
            ladder
        );
        v
    }

    /// Fills the problem's defaults and validates every value.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let Some(problem) = self.problem else {
            return bad("problem", "required");
        };
        for key in self.set_keys() {
            if !problem.keys().contains(&key) {
                return bad(key, format!("is not used by problem {problem}"));
            }
        }
        let mut c = self.clone();
        c.out.get_or_insert_with(|| "dirode-out".to_string());
        c.seed.get_or_insert(0);
        match problem {
            Problem::Burgers => {
                c.nx.get_or_insert(51);
                c.dt.get_or_insert(0.01);
                c.steps.get_or_insert(10);
                c.nu.get_or_insert(0.005);
                c.scheme.get_or_insert_with(|| "all".into());
            }
            Problem::Diffuse1d => {
                c.nx.get_or_insert(101);
                c.dt.get_or_insert(0.01);
                c.steps.get_or_insert(10);
                c.diffusivity.get_or_insert(1.0);
                c.scheme.get_or_insert_with(|| "temporal".into());
                if c.scheme.as_deref() == Some("temporal") {
                    c.order.get_or_insert(2);
                    c.sampling.get_or_insert_with(|| "uniform".into());
                    c.corrections.get_or_insert(5000);
                    c.tolerance.get_or_insert(1e-10);
                } else if c.order.is_some() || c.sampling.is_some() || c.corrections.is_some() || c.tolerance.is_some() {
                    return bad("scheme", "order, sampling, corrections and tolerance apply to the temporal scheme only");
                }
            }
            Problem::Particles2d => {
                c.nx.get_or_insert(200);
                c.dt.get_or_insert(0.01);
                let steps = *c.steps.get_or_insert(100);
                c.d0.get_or_insert(0.001);
                c.beta.get_or_insert(10.0);
                c.growth.get_or_insert(0.01);
                c.noise.get_or_insert(0.0);
                c.wind_mode.get_or_insert_with(|| "per-step".into());
                c.scheme.get_or_insert_with(|| "sadm-k3".into());
                c.every.get_or_insert(steps.max(1));
            }
            Problem::NavierStokes => {
                let preset = c.preset.get_or_insert_with(|| "channel".into()).clone();
                one_of("preset", &c.preset, PRESETS)?;
                let base = dirode_core::navier_stokes::BackStepConfig::<f64>::preset(&preset).expect("preset validated");
                c.nx.get_or_insert(200);
                c.ny.get_or_insert(50);
                c.dt.get_or_insert(0.01);
                c.re.get_or_insert(base.re);
                c.max_steps.get_or_insert(200_000);
                c.threshold.get_or_insert(1e-8);
                c.psi_iterations.get_or_insert(1);
                c.scheme.get_or_insert_with(|| "both".into());
            }
            Problem::Stochastic => {
                c.nx.get_or_insert(101);
                c.dt.get_or_insert(1e-4);
                c.lower.get_or_insert(0.1);
                c.upper.get_or_insert(0.9);
                c.samples.get_or_insert_with(|| vec![100, 1000, 10_000, 100_000]);
            }
            Problem::StabilityCheck => {
                c.trials.get_or_insert(100);
            }
            Problem::SplitOrder => {
                c.nx.get_or_insert(201);
                c.diffusivity.get_or_insert(0.05);
                c.speed.get_or_insert(1.0);
                c.t_end.get_or_insert(0.5);
                c.corrections.get_or_insert(5000);
                c.scheme.get_or_insert_with(|| "both".into());
                c.ladder.get_or_insert_with(|| "dt:0.05,0.025,0.0125,0.00625".into());
            }
        }
        c.validate(problem)?;
        Ok(c)
    }

    fn validate(&self, problem: Problem) -> Result<(), ConfigError> {
        if self.out.as_deref() == Some("") {
            return bad("out", "must not be empty");
        }
        at_least("nx", self.nx, 3)?;
        at_least("ny", self.ny, 3)?;
        at_least("steps", self.steps, 1)?;
        at_least("every", self.every, 1)?;
        at_least("max_steps", self.max_steps, 1)?;
        at_least("psi_iterations", self.psi_iterations, 1)?;
        at_least("trials", self.trials, 1)?;
        for (k, v) in [
            ("dt", self.dt),
            ("tolerance", self.tolerance),
            ("nu", self.nu),
            ("diffusivity", self.diffusivity),
            ("d0", self.d0),
            ("re", self.re),
            ("threshold", self.threshold),
            ("lower", self.lower),
            ("upper", self.upper),
            ("t_end", self.t_end),
        ] {
            positive(k, v)?;
        }
        for (k, v) in [("beta", self.beta), ("growth", self.growth), ("noise", self.noise), ("speed", self.speed)] {
            if let Some(x) = v {
                if !x.is_finite() {
                    return bad(k, "must be finite");
                }
            }
        }
        if self.beta.is_some_and(|b| b < 0.0) {
            return bad("beta", "must be non-negative");
        }
        if let (Some(l), Some(u)) = (self.lower, self.upper) {
            if l > u {
                return bad("lower", format!("must not exceed upper ({l} > {u})"));
            }
        }
        if let Some(s) = &self.samples {
            if s.is_empty() || s.iter().any(|&n| n < 2) {
                return bad("samples", "need at least one count, each >= 2");
            }
        }
        if self.order.is_some_and(|p| p > 8) {
            return bad("order", "supported orders are 0..=8");
        }
        one_of("sampling", &self.sampling, &["uniform", "chebyshev"])?;
        one_of("wind_mode", &self.wind_mode, &["per-step", "fixed"])?;
        match problem {
            Problem::Burgers => one_of("scheme", &self.scheme, BURGERS_SCHEMES)?,
            Problem::Diffuse1d => one_of("scheme", &self.scheme, DIFFUSE_SCHEMES)?,
            Problem::NavierStokes => one_of("scheme", &self.scheme, FLOW_SCHEMES)?,
            Problem::SplitOrder => one_of("scheme", &self.scheme, SPLIT_SCHEMES)?,
            Problem::Particles2d => {
                let s = self.scheme.as_deref().unwrap_or_default();
                if dirode_core::problems::ParticleScheme::parse(s).is_none() {
                    return bad(
                        "scheme",
                        format!("unknown value `{s}` (expected sadm-k3, temporal-p0, temporal-p1-loop or temporal-p2-loop-ref[:n])"),
                    );
                }
            }
            _ => {}
        }
        if let Some(l) = &self.ladder {
            let ladder = parse_ladder(l)?;
            if problem == Problem::SplitOrder {
                if ladder.param != LadderParam::Dt {
                    return bad("ladder", "split-order refines dt only");
                }
                let t = self.t_end.unwrap_or(0.5);
                for dt in &ladder.rungs {
                    let n = t / dt;
                    if (n - n.round()).abs() > 1e-9 * n {
                        return bad("ladder", format!("rung dt = {dt} does not divide t_end = {t}"));
                    }
                }
            }
            if problem == Problem::Diffuse1d && ladder.param == LadderParam::Dt {
                let t = self.dt.unwrap_or(0.01) * self.steps.unwrap_or(10) as f64;
                for dt in &ladder.rungs {
                    let n = t / dt;
                    if (n - n.round()).abs() > 1e-9 * n {
                        return bad("ladder", format!("rung dt = {dt} does not divide the run length {t}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// One-line JSON echo; unset keys are omitted.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn problem(&self) -> Option<Problem> {
        self.problem
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_needs_a_problem() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        let e = c.resolve().unwrap_err();
        assert_eq!(e.to_string(), "problem required");
    }

    #[test]
    fn burgers_example_is_valid() {
        let c = parse_config(r#"{"problem":"burgers","nu":0.005,"nx":201,"dt":0.001}"#).unwrap();
        let r = c.resolve().unwrap();
        assert_eq!(r.nx, Some(201));
        assert_eq!(r.steps, Some(10));
        assert_eq!(r.scheme.as_deref(), Some("all"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_position() {
        let e = parse_config("{\"problem\":\"burgers\",\n \"unknown_key\":1}").unwrap_err();
        match e {
            ConfigError::Parse { line, message, .. } => {
                assert_eq!(line, 2);
                assert!(message.contains("unknown_key"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn keys_of_other_problems_are_rejected() {
        let c = parse_config(r#"{"problem":"burgers","beta":1}"#).unwrap();
        match c.resolve().unwrap_err() {
            ConfigError::Validation { key, .. } => assert_eq!(key, "beta"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ladders() {
        assert!(parse_ladder("dt:0.1,0.05").is_err());
        assert!(parse_ladder("dx:1,2,3").is_err());
        assert!(parse_ladder("nx:51,101.5,201").is_err());
        let l = parse_ladder("nx: 51, 101, 201").unwrap();
        assert_eq!(l.param, LadderParam::Nx);
        assert_eq!(l.rungs, vec![51.0, 101.0, 201.0]);
        let c = parse_config(r#"{"problem":"split-order","ladder":"dt:0.3,0.2,0.1"}"#).unwrap();
        assert!(c.resolve().is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        for p in ["burgers", "diffuse1d", "particles2d", "navier-stokes", "stochastic", "stability-check", "split-order"] {
            let c = parse_config(&format!(r#"{{"problem":"{p}"}}"#)).unwrap().resolve().unwrap();
            let back = parse_config(&c.to_json()).unwrap();
            assert_eq!(back, c);
            assert_eq!(back.resolve().unwrap(), c);
        }
    }
}
