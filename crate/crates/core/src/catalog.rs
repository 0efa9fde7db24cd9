//! Ready-made generators with their analytic reference data.
//!
//! | name         | W(x)                              | ∫W                     | α | β    |
//! |--------------|-----------------------------------|------------------------|---|------|
//! | `scarf2`     | −A sinh x / cosh² x               | A / cosh x             | 0 | −1/4 |
//! | `periodic`   | 4 sin 2x / (3 (cos² x − 4/3)²)    | 4 / (3 (cos² x − 4/3)) | 0 | 1    |
//! | `morse`      | −ξ e^{−x}                         | ξ e^{−x}               | 0 | −1/4 |
//! | `constant_w` | W₀                                | W₀ x + C₀              | 0 | 0    |

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Expr, ParamEnv};
use crate::generator::{ConstantWModel, GeneratorSpec};
use crate::operators::Grid;

pub const MODEL_NAMES: [&str; 4] = ["scarf2", "periodic", "morse", "constant_w"];

/// Highest `n` in the periodic model's reference levels.
pub const PERIODIC_LEVEL_CUTOFF: u32 = 8;

/// `(s, t) = (|A − 2|/2, |A + 2|/2)` of the complex Scarf II model.
pub fn scarf_parameters(a: f64) -> (f64, f64) {
    (0.5 * (a - 2.0).abs(), 0.5 * (a + 2.0).abs())
}

/// Bound levels of the complex Scarf II model:
/// `−(n + (1 − A)/2)²` for integers `0 ≤ n < (A − 1)/2` when `A ≥ 2`,
/// and the single level `−1/4` when `A < 2`.
pub fn scarf_levels(a: f64) -> Vec<f64> {
    if a < 2.0 {
        return vec![-0.25];
    }
    (0..)
        .map(|n| n as f64)
        .take_while(|&n| n < 0.5 * (a - 1.0))
        .map(|n| -(n + 0.5 * (1.0 - a)).powi(2))
        .collect()
}

/// `n²/4` for `n = 1, 3, 4, …, cutoff`; `n = 2` is absent.
pub fn periodic_levels(cutoff: u32) -> Vec<f64> {
    (1..=cutoff).filter(|&n| n != 2).map(|n| f64::from(n * n) / 4.0).collect()
}

/// Closed-form periodic-model state on `(−π, π)`:
/// `{[(16 − n²) cos x − 2i(n² − 4) sin x] sin(n(π + x)/2) − 6n sin x cos(n(π + x)/2)} / (cos x + 2i sin x)`.
/// Vanishes identically for `n = 2`.
pub fn periodic_eigenfunction(n: u32, x: f64) -> C64 {
    let nf = f64::from(n);
    let n2 = nf * nf;
    let phase = 0.5 * nf * (std::f64::consts::PI + x);
    let (s, c) = x.sin_cos();
    let bracket = C64::new((16.0 - n2) * c, -2.0 * (n2 - 4.0) * s);
    let num = bracket * phase.sin() - 6.0 * nf * s * phase.cos();
    num / C64::new(c, 2.0 * s)
}

/// `−6 / (cos x + 2i sin x)²`, equal to `V + iW` of the periodic model.
pub fn periodic_effective_closed_form(x: f64) -> C64 {
    let (s, c) = x.sin_cos();
    let d = C64::new(c, 2.0 * s);
    -6.0 / (d * d)
}

/// Printed and derived scale of the Morse variable `z = k·iξe^{−x}`.
pub const MORSE_Z_PRINTED: f64 = 2.0;
pub const MORSE_Z_DERIVED: f64 = 1.0;

/// `ψ₀ = z^{1/2} e^{−z/2}` with `z = k·iξe^{−x}` (`L₀¹ ≡ 1`).
pub fn morse_ground_state(xi: f64, z_scale: f64, x: f64) -> C64 {
    let z = C64::new(0.0, z_scale * xi * (-x).exp());
    z.sqrt() * (-0.5 * z).exp()
}

/// Closed-form state attached to a catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eigenfunction {
    Periodic { n: u32 },
    Morse { xi: f64, z_scale: f64 },
}

impl Eigenfunction {
    pub fn eval(&self, x: f64) -> C64 {
        match *self {
            Eigenfunction::Periodic { n } => periodic_eigenfunction(n, x),
            Eigenfunction::Morse { xi, z_scale } => morse_ground_state(xi, z_scale, x),
        }
    }

    pub fn energy(&self) -> f64 {
        match *self {
            Eigenfunction::Periodic { n } => f64::from(n * n) / 4.0,
            Eigenfunction::Morse { .. } => -0.25,
        }
    }

    pub fn formula(&self) -> String {
        match *self {
            Eigenfunction::Periodic { n } => format!(
                "psi_{n}(x) = {{[(16-n^2)cos x - 2i(n^2-4)sin x] sin(n(pi+x)/2) - 6n sin x cos(n(pi+x)/2)}} / (cos x + 2i sin x), n = {n}"
            ),
            Eigenfunction::Morse { z_scale, .. } => {
                format!("psi_0(x) = z^(1/2) exp(-z/2) L_0^1(z), z = {z_scale}*i*xi*exp(-x)")
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(serialize_with = "ser_spec")]
    pub spec: GeneratorSpec,
    pub analytic_v: Expr,
    pub analytic_levels: Vec<f64>,
    pub eigenfunctions: Vec<Eigenfunction>,
    pub grid: Grid,
    /// Bound-state threshold for the spectrum filter; `None` on a finite
    /// interval where every level is discrete.
    pub continuum_threshold: Option<f64>,
    /// Default tolerance when matching computed levels to `analytic_levels`.
    pub level_tolerance: f64,
    pub scarf_s_t: Option<(f64, f64)>,
    /// False for entries with no discrete spectrum to compare against.
    pub solvable: bool,
    pub notes: Vec<String>,
}

fn ser_spec<S: serde::Serializer>(spec: &GeneratorSpec, s: S) -> std::result::Result<S::Ok, S::Error> {
    spec.to_config().serialize(s)
}

fn required(model: &str, env: &ParamEnv, param: &str) -> Result<f64> {
    env.get(param).ok_or_else(|| Error::MissingParameter {
        model: model.to_string(),
        param: param.to_string(),
    })
}

fn parse(src: &str) -> Expr {
    Expr::parse(src).expect("catalog expressions are well-formed")
}

/// Looks up a model by name with its parameters bound from `env`.
pub fn get(name: &str, env: &ParamEnv) -> Result<CatalogEntry> {
    match name {
        "scarf2" => {
            let a = required(name, env, "A")?;
            let env = ParamEnv::new().with("A", a);
            Ok(CatalogEntry {
                name: name.into(),
                spec: GeneratorSpec::closed_form(parse("-A*sinh(x)/cosh(x)^2"), parse("A/cosh(x)"), 0.0, -0.25, env)?,
                analytic_v: parse("-(3+A^2)/(4*cosh(x)^2)"),
                analytic_levels: scarf_levels(a),
                eigenfunctions: Vec::new(),
                grid: Grid::new(-12.0, 12.0, 2000)?,
                continuum_threshold: Some(0.0),
                level_tolerance: 1e-3,
                scarf_s_t: Some(scarf_parameters(a)),
                solvable: true,
                notes: vec![
                    "PT-symmetric: V even, W odd".into(),
                    "levels -(n+(1-A)/2)^2 for 0 <= n < (A-1)/2 when A >= 2, else -1/4".into(),
                    "closed-form eigenfunctions not provided".into(),
                ],
            })
        }
        "periodic" => Ok(CatalogEntry {
            name: name.into(),
            spec: GeneratorSpec::closed_form(
                parse("4*sin(2*x)/(3*(cos(x)^2-4/3)^2)"),
                parse("4/(3*(cos(x)^2-4/3))"),
                0.0,
                1.0,
                ParamEnv::new(),
            )?,
            analytic_v: parse("(-30*cos(x)^2+24)/(9*(cos(x)^2-4/3)^2)"),
            analytic_levels: periodic_levels(PERIODIC_LEVEL_CUTOFF),
            eigenfunctions: [1, 3, 4, 5, 6, 7, 8]
                .into_iter()
                .map(|n| Eigenfunction::Periodic { n })
                .collect(),
            grid: Grid::new(-std::f64::consts::PI, std::f64::consts::PI, 2000)?,
            continuum_threshold: None,
            level_tolerance: 1e-2,
            scarf_s_t: None,
            solvable: true,
            notes: vec![
                "Dirichlet conditions at -pi and pi".into(),
                "n = 2 state vanishes identically (missing level 1.0)".into(),
                "V + iW equals -6/(cos x + 2i sin x)^2".into(),
            ],
        }),
        "morse" => {
            let xi = required(name, env, "xi")?;
            let env = ParamEnv::new().with("xi", xi);
            Ok(CatalogEntry {
                name: name.into(),
                spec: GeneratorSpec::closed_form(parse("-xi*exp(-x)"), parse("xi*exp(-x)"), 0.0, -0.25, env)?,
                analytic_v: parse("-xi^2*exp(-2*x)/4"),
                analytic_levels: vec![-0.25],
                eigenfunctions: vec![Eigenfunction::Morse { xi, z_scale: MORSE_Z_DERIVED }],
                grid: Grid::new(-2.0, 14.0, 2000)?,
                continuum_threshold: Some(0.0),
                level_tolerance: 1e-3,
                scarf_s_t: None,
                solvable: true,
                notes: vec![
                    "not PT-symmetric".into(),
                    "ground state uses z = i*xi*exp(-x); the printed z = 2i*xi*exp(-x) does not solve H psi = -psi/4".into(),
                    "|psi_0| = sqrt(xi) exp(-x/2) grows as x -> -inf".into(),
                ],
            })
        }
        "constant_w" => {
            let w0 = required(name, env, "W0")?;
            let c0 = required(name, env, "C0")?;
            ConstantWModel::new(w0, c0, 0.0, 0.0)?;
            let env = ParamEnv::new().with("W0", w0).with("C0", c0);
            Ok(CatalogEntry {
                name: name.into(),
                spec: GeneratorSpec::closed_form(parse("W0"), parse("W0*x+C0"), 0.0, 0.0, env)?,
                analytic_v: parse("(0-W0^2/4)/(W0*x+C0)^2-(W0*x+C0)^2/4"),
                analytic_levels: Vec::new(),
                eigenfunctions: Vec::new(),
                grid: Grid::new(-20.0, 20.0, 2000)?,
                continuum_threshold: None,
                level_tolerance: 0.0,
                scarf_s_t: None,
                solvable: false,
                notes: vec![
                    "real part of V_eff is unbounded below; no bound states".into(),
                    "pole at x = -C0/W0".into(),
                ],
            })
        }
        other => Err(Error::UnknownModel(other.to_string())),
    }
}
