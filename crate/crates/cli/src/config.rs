//! Run configuration: defaults, flat key=value files, command-line
//! overrides, and the validation front door.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;

/// A configuration problem the user can fix; always maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Everything a run needs, resolved from defaults, then the config file,
/// then command-line overrides, in that order.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub n: usize,
    pub lambda: f64,
    pub k: usize,
    pub q: usize,
    pub t: f64,
    pub k_list: Vec<usize>,
    pub seed: u64,
    pub preset: String,
    pub experiment: String,
    pub out: PathBuf,
    /// Per-check tolerance overrides keyed by check name; checks not listed
    /// use their built-in defaults.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 1,
            lambda: 1.0,
            k: 20,
            q: 64,
            t: 0.5,
            k_list: vec![8, 12, 16, 20],
            seed: 42,
            preset: "rank-one-rotated".into(),
            experiment: "uncertainty".into(),
            out: PathBuf::from("."),
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |what: &str| ConfigError(format!("invalid value {value:?} for {what}"));
        match key {
            "n" => self.n = value.parse().map_err(|_| bad("n"))?,
            "lambda" => self.lambda = value.parse().map_err(|_| bad("lambda"))?,
            "k" => self.k = value.parse().map_err(|_| bad("k"))?,
            "q" => self.q = value.parse().map_err(|_| bad("q"))?,
            "t" => self.t = value.parse().map_err(|_| bad("t"))?,
            "k-list" => {
                let parsed: Result<Vec<usize>, _> =
                    value.split(',').map(|s| s.trim().parse()).collect();
                self.k_list = parsed.map_err(|_| bad("k-list"))?;
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "preset" => self.preset = value.to_string(),
            "experiment" => self.experiment = value.to_string(),
            "out" => self.out = PathBuf::from(value),
            _ => {
                if let Some(name) = key.strip_prefix("tol.") {
                    let v: f64 = value.parse().map_err(|_| bad(key))?;
                    self.tolerances.insert(name.to_string(), v);
                } else {
                    return Err(ConfigError(format!("unknown configuration key {key:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &str) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {path}: {e}")))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("{path}:{}: expected key=value", lineno + 1))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.lambda == 0.0 || !self.lambda.is_finite() {
            return Err(ConfigError(
                "lambda must be nonzero: the phase-space representation and every kernel \
                 in the toolkit degenerate at lambda = 0"
                    .into(),
            ));
        }
        if self.n == 0 {
            return Err(ConfigError("n must be at least 1".into()));
        }
        if self.k_list.is_empty() || self.k_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError(
                "k-list must be nonempty and strictly increasing".into(),
            ));
        }
        if self.t <= 0.0 || !self.t.is_finite() {
            return Err(ConfigError("t must be positive".into()));
        }
        if self.q < 16 {
            return Err(ConfigError("q must be at least 16".into()));
        }
        for (name, v) in &self.tolerances {
            if *v <= 0.0 || !v.is_finite() {
                return Err(ConfigError(format!(
                    "tolerance tol.{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Tolerance for a named check: the override if present, else `default`.
    pub fn tol(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }

    /// One-line echo of the scalar knobs, used in report stamps.
    pub fn summary(&self) -> String {
        format!(
            "n={} lambda={} k={} q={} t={} seed={} preset={} k-list={}",
            self.n,
            self.lambda,
            self.k,
            self.q,
            self.t,
            self.seed,
            self.preset,
            self.k_list
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}
