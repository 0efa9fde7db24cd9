//! Resolved run configuration. Every report embeds one, and feeding it
//! back through `--config` reproduces the report.

use std::collections::BTreeMap;
use std::path::PathBuf;

use phgen_core::catalog::{self, CatalogEntry};
use phgen_core::generator::GeneratorConfig;
use phgen_core::{Error, GeneratorSpec, Grid, ParamEnv, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_TOL_INTERTWINE: f64 = 1e-4;
pub const DEFAULT_TOL_HERMITIAN: f64 = 1e-4;
pub const DEFAULT_TOL_LEVEL: f64 = 1e-3;
pub const DEFAULT_TOL_REAL: f64 = phgen_core::eigen::DEFAULT_TAU_REAL;
pub const DEFAULT_TOL_POTENTIAL: f64 = 1e-8;

/// Grid used for an inline `W` when none is given; odd `N` puts a node at 0.
pub const INLINE_GRID: (f64, f64, usize) = (-5.0, 5.0, 199);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Derive,
    Verify,
    Spectrum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.a, self.b, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub intertwine: f64,
    pub hermitian: f64,
    pub level: f64,
    pub real: f64,
    pub potential: f64,
}

/// Externally supplied matrices for `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixInputs {
    pub h: PathBuf,
    pub eta: PathBuf,
}

/// One parameter scanned over a list of values by `spectrum`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
    /// Continuum threshold for the bound-state filter; `None` keeps the
    /// whole spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_inf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrices: Option<MatrixInputs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    /// `verify` writes `H.csv` and `eta.csv` here.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_matrices: Option<PathBuf>,
}

/// Command-line inputs before defaults are filled in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawInputs {
    pub model: Option<String>,
    pub w: Option<String>,
    pub antideriv: Option<String>,
    pub params: Vec<(String, f64)>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub anchor: Option<f64>,
    pub anchor_value: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub n: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub tol_intertwine: Option<f64>,
    pub tol_hermitian: Option<f64>,
    pub tol_level: Option<f64>,
    pub tol_real: Option<f64>,
    pub v_inf: Option<f64>,
    pub matrices: Option<MatrixInputs>,
    pub sweep: Option<Sweep>,
    pub dump_matrices: Option<PathBuf>,
}

/// Parses `k=v`.
pub fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(format!("empty parameter name in `{s}`"));
    }
    let v: f64 = v.trim().parse().map_err(|_| format!("not a number: `{}`", v.trim()))?;
    Ok((k.to_string(), v))
}

/// Parses `NAME=v1,v2,...`.
pub fn parse_sweep(s: &str) -> std::result::Result<Sweep, String> {
    let (k, vs) = s.split_once('=').ok_or_else(|| format!("expected NAME=V1,V2,..., got `{s}`"))?;
    let values = vs
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("not a number: `{}`", v.trim())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if values.is_empty() || k.trim().is_empty() {
        return Err(format!("empty sweep `{s}`"));
    }
    Ok(Sweep { param: k.trim().to_string(), values })
}

impl RunConfig {
    pub fn resolve(command: Command, raw: RawInputs) -> Result<Self> {
        let env: ParamEnv = raw.params.iter().cloned().collect();
        let mut sweep_env = env.clone();
        if let Some(s) = &raw.sweep {
            if command != Command::Spectrum {
                return Err(Error::InvalidArgument("--sweep applies to `spectrum` only".into()));
            }
            sweep_env.set(&s.param, s.values[0]);
        }
        let external = raw.matrices.is_some();
        if external && (raw.model.is_some() || raw.w.is_some()) {
            return Err(Error::InvalidArgument("matrix CSV input excludes --model and --W".into()));
        }
        let (generator, grid, entry) = match (&raw.model, &raw.w) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidArgument("give either --model or --W, not both".into()))
            }
            (None, None) if external => (None, None, None),
            (None, None) => return Err(Error::InvalidArgument("one of --model or --W is required".into())),
            (Some(name), None) => {
                if raw.antideriv.is_some() {
                    return Err(Error::InvalidArgument("--antideriv needs --W".into()));
                }
                let entry = catalog::get(name, &sweep_env)?;
                let mut gen = entry.spec.to_config();
                gen.params = env.clone();
                if let Some(a) = raw.alpha {
                    gen.alpha = a;
                }
                if let Some(b) = raw.beta {
                    gen.beta = b;
                }
                let g = entry.grid;
                (Some(gen), Some((g.a(), g.b(), g.n())), Some(entry))
            }
            (None, Some(w)) => {
                let gen = GeneratorConfig {
                    w: w.clone(),
                    antiderivative: raw.antideriv.clone(),
                    alpha: raw.alpha.unwrap_or(0.0),
                    beta: raw.beta.unwrap_or(0.0),
                    params: env.clone(),
                    anchor: raw.antideriv.is_none().then(|| raw.anchor.unwrap_or(0.0)),
                    anchor_value: raw.antideriv.is_none().then(|| raw.anchor_value.unwrap_or(0.0)),
                };
                (Some(gen), Some(INLINE_GRID), None)
            }
        };
        let grid = grid.map(|(a, b, n)| GridConfig {
            a: raw.a.unwrap_or(a),
            b: raw.b.unwrap_or(b),
            n: raw.n.unwrap_or(n),
        });
        if let Some(g) = &grid {
            g.grid()?;
        }
        let v_inf = raw.v_inf.or_else(|| entry.as_ref().and_then(|e| e.continuum_threshold));
        let tolerances = Tolerances {
            intertwine: raw.tol_intertwine.unwrap_or(DEFAULT_TOL_INTERTWINE),
            hermitian: raw.tol_hermitian.unwrap_or(DEFAULT_TOL_HERMITIAN),
            level: raw
                .tol_level
                .or_else(|| entry.as_ref().filter(|e| e.level_tolerance > 0.0).map(|e| e.level_tolerance))
                .unwrap_or(DEFAULT_TOL_LEVEL),
            real: raw.tol_real.unwrap_or(DEFAULT_TOL_REAL),
            potential: DEFAULT_TOL_POTENTIAL,
        };
        let cfg = RunConfig {
            command,
            model: raw.model,
            generator,
            grid,
            format: raw.format.unwrap_or_default(),
            out: raw.out,
            tolerances,
            v_inf,
            matrices: raw.matrices,
            sweep: raw.sweep,
            dump_matrices: raw.dump_matrices,
        };
        // surface spec errors before any work starts
        if cfg.sweep.is_none() && !external {
            cfg.context()?;
        }
        Ok(cfg)
    }

    /// Reads a config, a JSON report that embeds one under `config`, or a
    /// CSV report whose first line is `# config: {...}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let text = match text.strip_prefix("# config: ") {
            Some(rest) => rest.lines().next().unwrap_or_default(),
            None => text,
        };
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("config is not JSON: {e}")))?;
        let inner = match value.get("config") {
            Some(c) => c.clone(),
            None => value,
        };
        serde_json::from_value(inner).map_err(|e| Error::InvalidArgument(format!("bad config: {e}")))
    }

    /// Copy of this config with one parameter fixed and the sweep removed.
    pub fn with_param(&self, name: &str, value: f64) -> Self {
        let mut cfg = self.clone();
        cfg.sweep = None;
        if let Some(g) = &mut cfg.generator {
            g.params.set(name, value);
        }
        cfg
    }

    pub fn context(&self) -> Result<Context> {
        let generator = self
            .generator
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("config has no generator".into()))?;
        let spec = GeneratorSpec::from_config(generator)?;
        let entry = match &self.model {
            Some(name) => Some(catalog::get(name, &generator.params)?),
            None => None,
        };
        let grid = self
            .grid
            .ok_or_else(|| Error::InvalidArgument("config has no grid".into()))?
            .grid()?;
        Ok(Context { spec, entry, grid })
    }
}

/// Everything a command needs, rebuilt from a [`RunConfig`].
pub struct Context {
    pub spec: GeneratorSpec,
    pub entry: Option<CatalogEntry>,
    pub grid: Grid,
}

/// Parameter names each catalog model needs.
pub fn required_params() -> BTreeMap<&'static str, Vec<&'static str>> {
    BTreeMap::from([
        ("scarf2", vec!["A"]),
        ("periodic", vec![]),
        ("morse", vec!["xi"]),
        ("constant_w", vec!["W0", "C0"]),
    ])
}
