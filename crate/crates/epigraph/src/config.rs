//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Later assignments
//! override earlier ones, and `--set key=value` flags are applied after the
//! file. Unknown keys are errors.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use epigraph_core::abc::{AbcConfig, AncestorPolicy, PriorSpec};
use epigraph_core::matching::MatchParams;
use epigraph_core::sim::{subdivision, SimConfig, Theta};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`")]
    Syntax { path: String, line: usize },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Value {
        key: String,
        value: String,
        reason: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

/// Every recognised key with its default.
pub const KEYS: &[(&str, &str)] = &[
    ("population", "5000"),
    ("horizon", "1000"),
    ("start_day", "0"),
    ("tau", "0.5"),
    ("eta1", "720"),
    ("eta2", "180"),
    ("snapshot_intervals", "5"),
    ("snapshot_days", ""),
    ("degree_exponent", "2"),
    ("female_frac", "0.5"),
    ("bisexual_frac", "0.05"),
    ("seed", "0"),
    ("n_initial_infected", "100"),
    ("alpha", "0.9"),
    ("gamma", "0.001"),
    ("beta", "0.001"),
    ("lambda", "0.1"),
    ("sigma", "0.005"),
    ("prior_mean", "100,0.9,0.001,0.001,0.1,0.005"),
    ("prior_sd", "10,0.09,0.0001,0.0001,0.01,0.0005"),
    ("n_particles", "50"),
    ("epsilon_initial", "0.8"),
    ("stop_threshold", "0.3"),
    ("max_sim_attempts", "100"),
    ("attempt_budget", ""),
    ("max_iterations", "30"),
    ("kernel_scale", "0.2"),
    ("sd_floor", "1e-8"),
    ("ancestor_policy", "per_attempt"),
    ("nu", "0.2"),
    ("xi", "0"),
    ("label_pad", "1"),
    ("match_max_iter", "100"),
    ("match_tol", "1e-6"),
    ("refine_passes", "20"),
    ("omega", "0.5"),
    ("seed_from_observed", "false"),
    ("curve_horizon", ""),
    ("curve_points", "50"),
];

/// Raw key/value assignments, defaults filled in.
#[derive(Clone, Debug, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl Default for RawConfig {
    fn default() -> Self {
        Self {
            values: KEYS
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

impl RawConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: origin.to_string(),
                line: i + 1,
            })?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(ConfigError::UnknownKey(key.to_string())),
        }
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Invalid(format!("override `{assignment}` lacks `=`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        let value = self.raw(key);
        value.parse().map_err(|e: T::Err| ConfigError::Value {
            key: key.to_string(),
            value: value.to_string(),
            reason: e.to_string(),
        })
    }

    fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, ConfigError> {
        let value = self.raw(key);
        if value.is_empty() {
            return Ok(Vec::new());
        }
        value
            .split(',')
            .map(|x| {
                x.trim().parse::<f64>().map_err(|e| ConfigError::Value {
                    key: key.to_string(),
                    value: value.to_string(),
                    reason: e.to_string(),
                })
            })
            .collect()
    }

    fn six(&self, key: &str) -> Result<[f64; 6], ConfigError> {
        let v = self.list(key)?;
        v.as_slice().try_into().map_err(|_| ConfigError::Value {
            key: key.to_string(),
            value: self.raw(key).to_string(),
            reason: format!("expected 6 comma-separated numbers, got {}", v.len()),
        })
    }

    pub fn sim(&self) -> Result<SimConfig, ConfigError> {
        let start_day: f64 = self.get("start_day")?;
        let horizon: f64 = self.get("horizon")?;
        let mut snapshot_days = self.list("snapshot_days")?;
        if snapshot_days.is_empty() {
            snapshot_days = subdivision(start_day, horizon, self.get("snapshot_intervals")?);
        }
        let config = SimConfig {
            population: self.get("population")?,
            horizon,
            start_day,
            tau: self.get("tau")?,
            eta1: self.get("eta1")?,
            eta2: self.get("eta2")?,
            snapshot_days,
            degree_exponent: self.get("degree_exponent")?,
            female_frac: self.get("female_frac")?,
            bisexual_frac: self.get("bisexual_frac")?,
            seed: self.get("seed")?,
        };
        config
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        config
            .population_params(0)
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(config)
    }

    pub fn theta(&self) -> Result<Theta, ConfigError> {
        let theta = Theta {
            n_initial_infected: self.get("n_initial_infected")?,
            alpha: self.get("alpha")?,
            gamma: self.get("gamma")?,
            beta: self.get("beta")?,
            lambda: self.get("lambda")?,
            sigma: self.get("sigma")?,
        };
        theta
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(theta)
    }

    pub fn prior(&self) -> Result<PriorSpec, ConfigError> {
        PriorSpec::epidemic(self.six("prior_mean")?, self.six("prior_sd")?)
            .map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    pub fn abc(&self) -> Result<AbcConfig, ConfigError> {
        let ancestor_policy = match self.raw("ancestor_policy") {
            "per_attempt" => AncestorPolicy::PerAttempt,
            "sticky" => AncestorPolicy::Sticky,
            other => {
                return Err(ConfigError::Value {
                    key: "ancestor_policy".into(),
                    value: other.into(),
                    reason: "expected `per_attempt` or `sticky`".into(),
                })
            }
        };
        let config = AbcConfig {
            n_particles: self.get("n_particles")?,
            epsilon_initial: self.get("epsilon_initial")?,
            stop_threshold: self.get("stop_threshold")?,
            ancestor_policy,
            max_sim_attempts: self.get("max_sim_attempts")?,
            attempt_budget: self.optional("attempt_budget")?,
            max_iterations: self.get("max_iterations")?,
            kernel_scale: self.get("kernel_scale")?,
            sd_floor: self.get("sd_floor")?,
        };
        config
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(config)
    }

    pub fn matching(&self) -> Result<MatchParams, ConfigError> {
        let params = MatchParams {
            nu: self.get("nu")?,
            xi: self.get("xi")?,
            label_pad: self.get("label_pad")?,
            max_iter: self.get("match_max_iter")?,
            tol: self.get("match_tol")?,
            refine_passes: self.get("refine_passes")?,
        };
        params
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(params)
    }

    pub fn omega(&self) -> Result<f64, ConfigError> {
        let omega: f64 = self.get("omega")?;
        if !(omega > 0.0 && omega <= 1.0) {
            return Err(ConfigError::Invalid("omega must lie in (0, 1]".into()));
        }
        Ok(omega)
    }

    pub fn seed_from_observed(&self) -> Result<bool, ConfigError> {
        self.get("seed_from_observed")
    }

    /// Last day of the resimulated curves; defaults to the horizon.
    pub fn curve_horizon(&self) -> Result<Option<f64>, ConfigError> {
        self.optional("curve_horizon")
    }

    pub fn curve_points(&self) -> Result<usize, ConfigError> {
        self.get("curve_points")
    }

    /// Renders every key, sorted, in the file format.
    pub fn render(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_toy_setup_with_five_snapshot_intervals() {
        let cfg = RawConfig::default();
        let sim = cfg.sim().unwrap();
        assert_eq!(sim.population, 5000);
        assert_eq!(
            sim.snapshot_days,
            vec![0.0, 200.0, 400.0, 600.0, 800.0, 1000.0]
        );
        assert_eq!(cfg.theta().unwrap(), Theta::toy());
        assert_eq!(cfg.prior().unwrap(), PriorSpec::toy());
        assert_eq!(cfg.abc().unwrap(), AbcConfig::default());
        assert_eq!(cfg.matching().unwrap(), MatchParams::default());
    }

    #[test]
    fn file_then_overrides() {
        let mut cfg = RawConfig::parse(
            "# toy\npopulation = 300\n\nsnapshot_intervals=2\nhorizon = 50\n",
            "t",
        )
        .unwrap();
        cfg.apply_override("population=400").unwrap();
        let sim = cfg.sim().unwrap();
        assert_eq!(sim.population, 400);
        assert_eq!(sim.snapshot_days, vec![0.0, 25.0, 50.0]);
    }

    #[test]
    fn explicit_snapshot_days() {
        let mut cfg = RawConfig::default();
        cfg.set("snapshot_days", "10, 20,30").unwrap();
        assert_eq!(cfg.sim().unwrap().snapshot_days, vec![10.0, 20.0, 30.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            RawConfig::parse("bogus = 1", "t"),
            Err(ConfigError::UnknownKey(_))
        ));
        assert!(matches!(
            RawConfig::parse("population 3", "t"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        let cfg = RawConfig::parse("alpha = high", "t").unwrap();
        assert!(matches!(cfg.theta(), Err(ConfigError::Value { .. })));
        let cfg = RawConfig::parse("alpha = 1.5", "t").unwrap();
        assert!(matches!(cfg.theta(), Err(ConfigError::Invalid(_))));
        let cfg = RawConfig::parse("prior_sd = 1,2", "t").unwrap();
        assert!(cfg.prior().is_err());
        let cfg = RawConfig::parse("eta1 = 10\neta2 = 20", "t").unwrap();
        assert!(cfg.sim().is_err());
    }

    #[test]
    fn render_parses_back() {
        let mut cfg = RawConfig::default();
        cfg.set("nu", "0.3").unwrap();
        assert_eq!(RawConfig::parse(&cfg.render(), "r").unwrap(), cfg);
    }
}
