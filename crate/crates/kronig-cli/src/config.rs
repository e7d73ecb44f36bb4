//! Run configuration: defaults, flat `key = value` config files, and
//! command-line overrides, merged in that order of precedence.

use std::fmt;

use kronig_core::potentials::{DiracCombParams, KronigPenneyParams, Potential};

/// Which potential the run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Kp,
    Comb,
}

/// Edge extraction route for the `edges` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMethod {
    Fdm,
    Analytic,
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub kind: PotentialKind,
    pub v0: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub c: f64,
    /// Lattice points per period.
    pub grid_n: usize,
    /// Periods in the box (`wavefunction`) or in the ring (`spectrum`).
    pub periods: usize,
    /// κ samples for `bands`.
    pub samples: usize,
    /// Number of bands / eigenvalues per solve.
    pub bands: usize,
    /// Band index for `converge`.
    pub band: usize,
    /// Reduced wave vector for `wavefunction` and `converge`.
    pub kappa_frac: f64,
    /// Number of states written by `wavefunction`.
    pub states: usize,
    /// Grid sizes for `converge`.
    pub grid_sizes: Vec<usize>,
    /// Emit `E/E1` columns from `bands`.
    pub normalize: bool,
    /// Route used by `edges`.
    pub method: EdgeMethod,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            kind: PotentialKind::Kp,
            v0: 0.5,
            a: 10.0,
            b: 2.0,
            alpha: 1.0,
            c: 12.0,
            grid_n: 10_000,
            periods: 1,
            samples: 101,
            bands: 7,
            band: 1,
            kappa_frac: 0.0,
            states: 3,
            grid_sizes: vec![1250, 2500, 5000, 10_000],
            normalize: false,
            method: EdgeMethod::Fdm,
        }
    }
}

impl RunConfig {
    /// The potential described by this configuration.
    pub fn potential(&self) -> Result<Potential, ConfigError> {
        match self.kind {
            PotentialKind::Kp => KronigPenneyParams::new(self.v0, self.a, self.b)
                .map(Potential::KronigPenney)
                .map_err(|e| ConfigError::new(format!("potential: {e}"))),
            PotentialKind::Comb => DiracCombParams::new(self.alpha, self.c)
                .map(Potential::DiracComb)
                .map_err(|e| ConfigError::new(format!("potential: {e}"))),
        }
    }

    /// Key/value view of the resolved configuration, sorted by key; this is
    /// what the run manifest echoes.
    pub fn entries(&self) -> Vec<(String, String)> {
        let kind = match self.kind {
            PotentialKind::Kp => "kp",
            PotentialKind::Comb => "comb",
        };
        let method = match self.method {
            EdgeMethod::Fdm => "fdm",
            EdgeMethod::Analytic => "analytic",
        };
        let sizes = self
            .grid_sizes
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let mut entries = vec![
            ("band".to_string(), self.band.to_string()),
            ("bands".to_string(), self.bands.to_string()),
            ("grid.n".to_string(), self.grid_n.to_string()),
            ("grid_sizes".to_string(), sizes),
            ("kappa_frac".to_string(), format!("{}", self.kappa_frac)),
            ("method".to_string(), method.to_string()),
            ("normalize".to_string(), self.normalize.to_string()),
            ("periods".to_string(), self.periods.to_string()),
            ("potential.a".to_string(), format!("{}", self.a)),
            ("potential.alpha".to_string(), format!("{}", self.alpha)),
            ("potential.b".to_string(), format!("{}", self.b)),
            ("potential.c".to_string(), format!("{}", self.c)),
            ("potential.kind".to_string(), kind.to_string()),
            ("potential.v0".to_string(), format!("{}", self.v0)),
            ("states".to_string(), self.states.to_string()),
            ("sweep.samples".to_string(), self.samples.to_string()),
        ];
        entries.sort();
        entries
    }

    /// Semantic validation of the merged configuration; messages name the
    /// offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn finite(key: &str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::new(format!("`{key}` must be finite, got {v}")))
            }
        }
        finite("potential.v0", self.v0)?;
        finite("potential.a", self.a)?;
        finite("potential.b", self.b)?;
        finite("potential.alpha", self.alpha)?;
        finite("potential.c", self.c)?;
        finite("kappa_frac", self.kappa_frac)?;
        if self.v0 < 0.0 {
            return Err(ConfigError::new("`potential.v0` must be >= 0"));
        }
        if self.a <= 0.0 {
            return Err(ConfigError::new("`potential.a` must be > 0"));
        }
        if self.b < 0.0 {
            return Err(ConfigError::new("`potential.b` must be >= 0"));
        }
        if self.alpha < 0.0 {
            return Err(ConfigError::new("`potential.alpha` must be >= 0"));
        }
        if self.c <= 0.0 {
            return Err(ConfigError::new("`potential.c` must be > 0"));
        }
        if self.grid_n < 3 {
            return Err(ConfigError::new("`grid.n` must be at least 3"));
        }
        if self.periods == 0 {
            return Err(ConfigError::new("`periods` must be at least 1"));
        }
        if self.samples < 2 {
            return Err(ConfigError::new("`sweep.samples` must be at least 2"));
        }
        if self.bands == 0 {
            return Err(ConfigError::new("`bands` must be at least 1"));
        }
        if self.band == 0 {
            return Err(ConfigError::new("`band` must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.kappa_frac) {
            return Err(ConfigError::new("`kappa_frac` must lie in [0, 1]"));
        }
        if self.states == 0 {
            return Err(ConfigError::new("`states` must be at least 1"));
        }
        if self.grid_sizes.len() < 3 {
            return Err(ConfigError::new("`grid_sizes` needs at least 3 entries"));
        }
        if self.grid_sizes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::new(
                "`grid_sizes` must be strictly increasing",
            ));
        }
        Ok(())
    }
}

/// Configuration problem: bad file syntax, unknown key, bad value, or a
/// failed semantic check. Exits with status 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        ConfigError(msg.into())
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Unset-by-default overrides collected from command-line flags.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub kind: Option<String>,
    pub v0: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    pub grid_n: Option<usize>,
    pub periods: Option<usize>,
    pub samples: Option<usize>,
    pub bands: Option<usize>,
    pub band: Option<usize>,
    pub kappa_frac: Option<f64>,
    pub states: Option<usize>,
    pub grid_sizes: Option<String>,
    pub normalize: Option<bool>,
    pub method: Option<String>,
}

fn parse_kind(v: &str) -> Result<PotentialKind, ConfigError> {
    match v {
        "kp" => Ok(PotentialKind::Kp),
        "comb" => Ok(PotentialKind::Comb),
        other => Err(ConfigError::new(format!(
            "`potential.kind` must be `kp` or `comb`, got `{other}`"
        ))),
    }
}

fn parse_method(v: &str) -> Result<EdgeMethod, ConfigError> {
    match v {
        "fdm" => Ok(EdgeMethod::Fdm),
        "analytic" => Ok(EdgeMethod::Analytic),
        other => Err(ConfigError::new(format!(
            "`method` must be `fdm` or `analytic`, got `{other}`"
        ))),
    }
}

fn parse_sizes(v: &str) -> Result<Vec<usize>, ConfigError> {
    v.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| ConfigError::new(format!("`grid_sizes` entry `{s}` is not a count")))
        })
        .collect()
}

fn apply_kv(cfg: &mut RunConfig, key: &str, value: &str, at: &str) -> Result<(), ConfigError> {
    let bad = |key: &str| ConfigError::new(format!("{at}: invalid value for `{key}`: `{value}`"));
    match key {
        "potential.kind" => cfg.kind = parse_kind(value)?,
        "potential.v0" => cfg.v0 = value.parse().map_err(|_| bad(key))?,
        "potential.a" => cfg.a = value.parse().map_err(|_| bad(key))?,
        "potential.b" => cfg.b = value.parse().map_err(|_| bad(key))?,
        "potential.alpha" => cfg.alpha = value.parse().map_err(|_| bad(key))?,
        "potential.c" => cfg.c = value.parse().map_err(|_| bad(key))?,
        "grid.n" => cfg.grid_n = value.parse().map_err(|_| bad(key))?,
        "periods" => cfg.periods = value.parse().map_err(|_| bad(key))?,
        "sweep.samples" => cfg.samples = value.parse().map_err(|_| bad(key))?,
        "bands" => cfg.bands = value.parse().map_err(|_| bad(key))?,
        "band" => cfg.band = value.parse().map_err(|_| bad(key))?,
        "kappa_frac" => cfg.kappa_frac = value.parse().map_err(|_| bad(key))?,
        "states" => cfg.states = value.parse().map_err(|_| bad(key))?,
        "grid_sizes" => cfg.grid_sizes = parse_sizes(value)?,
        "normalize" => cfg.normalize = value.parse().map_err(|_| bad(key))?,
        "method" => cfg.method = parse_method(value)?,
        other => {
            return Err(ConfigError::new(format!("{at}: unknown key `{other}`")));
        }
    }
    Ok(())
}

/// Applies a flat `key = value` document on top of `cfg`. Lines may be
/// blank or `#` comments; parse errors carry the 1-based line number.
pub fn apply_file(cfg: &mut RunConfig, text: &str) -> Result<(), ConfigError> {
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = format!("line {}", idx + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("{at}: expected `key = value`, got `{line}`")))?;
        apply_kv(cfg, key.trim(), value.trim(), &at)?;
    }
    Ok(())
}

/// Applies command-line overrides (these win over file values).
pub fn apply_overrides(cfg: &mut RunConfig, ov: &Overrides) -> Result<(), ConfigError> {
    if let Some(v) = &ov.kind {
        cfg.kind = parse_kind(v)?;
    }
    if let Some(v) = ov.v0 {
        cfg.v0 = v;
    }
    if let Some(v) = ov.a {
        cfg.a = v;
    }
    if let Some(v) = ov.b {
        cfg.b = v;
    }
    if let Some(v) = ov.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = ov.c {
        cfg.c = v;
    }
    if let Some(v) = ov.grid_n {
        cfg.grid_n = v;
    }
    if let Some(v) = ov.periods {
        cfg.periods = v;
    }
    if let Some(v) = ov.samples {
        cfg.samples = v;
    }
    if let Some(v) = ov.bands {
        cfg.bands = v;
    }
    if let Some(v) = ov.band {
        cfg.band = v;
    }
    if let Some(v) = ov.kappa_frac {
        cfg.kappa_frac = v;
    }
    if let Some(v) = ov.states {
        cfg.states = v;
    }
    if let Some(v) = &ov.grid_sizes {
        cfg.grid_sizes = parse_sizes(v)?;
    }
    if let Some(v) = ov.normalize {
        cfg.normalize = v;
    }
    if let Some(v) = &ov.method {
        cfg.method = parse_method(v)?;
    }
    Ok(())
}

/// Resolves the final configuration: defaults, then the optional file,
/// then the flag overrides, then semantic validation.
pub fn resolve(file_text: Option<&str>, ov: &Overrides) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    if let Some(text) = file_text {
        apply_file(&mut cfg, text)?;
    }
    apply_overrides(&mut cfg, ov)?;
    cfg.validate()?;
    Ok(cfg)
}
