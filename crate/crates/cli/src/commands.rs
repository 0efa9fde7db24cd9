use std::fs::File;
use std::io::BufReader;

use num_complex::Complex64 as C64;
use phgen_core::catalog::{self, Eigenfunction, MORSE_Z_DERIVED, MORSE_Z_PRINTED};
use phgen_core::eigen::{self, bound_state_filter, eigenfunction_residual, VectorSelection};
use phgen_core::operators::{
    build_eta, build_hamiltonian, hermiticity_residual, intertwining_residual, product, read_matrix_csv,
};
use phgen_core::{derive, DiscreteOperator, EigOptions, Error, Result, SpectrumReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{required_params, Context, RunConfig};

/// One named comparison against a tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    pub pass: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance: Some(tolerance), expected: None, pass: value <= tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    /// Nothing to check against.
    None,
    SolverFailed,
}

impl Status {
    fn of(checks: &[Check]) -> Self {
        if checks.is_empty() {
            Status::None
        } else if checks.iter().all(|c| c.pass) {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass | Status::None => 0,
            Status::Fail => 1,
            Status::SolverFailed => 4,
        }
    }

    fn combine(self, other: Self) -> Self {
        use Status::*;
        match (self, other) {
            (SolverFailed, _) | (_, SolverFailed) => SolverFailed,
            (Fail, _) | (_, Fail) => Fail,
            (Pass, _) | (_, Pass) => Pass,
            _ => None,
        }
    }
}

/// A finished report: JSON body, optional CSV rendering and the status
/// that decides the exit code.
pub struct Output {
    pub json: serde_json::Value,
    pub csv: String,
    pub status: Status,
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("reports serialize")
}

#[derive(Serialize)]
struct DeriveRow {
    x: f64,
    #[serde(rename = "G")]
    g: f64,
    #[serde(rename = "Q")]
    q: f64,
    #[serde(rename = "V")]
    v: f64,
    #[serde(rename = "W")]
    w: f64,
    re_veff: f64,
    im_veff: f64,
}

#[derive(Serialize)]
struct DeriveReport<'a> {
    config: &'a RunConfig,
    samples: Vec<DeriveRow>,
    checks: Vec<Check>,
    status: Status,
}

pub fn run_derive(cfg: &RunConfig) -> Result<Output> {
    let Context { spec, entry, grid } = cfg.context()?;
    let model = derive(&spec)?;
    let mut rows = Vec::with_capacity(grid.n());
    for x in grid.points() {
        let s = model.sample(x)?;
        let veff = model.effective_potential(x)?;
        rows.push(DeriveRow { x, g: s.g, q: s.q, v: s.v, w: s.w, re_veff: veff.re, im_veff: veff.im });
    }
    let mut checks = Vec::new();
    if let Some(entry) = &entry {
        let (mut diff, mut scale) = (0.0f64, 0.0f64);
        for r in &rows {
            let closed = entry.analytic_v.eval(r.x, &spec.env)?;
            diff = diff.max((r.v - closed).abs());
            scale = scale.max(closed.abs());
        }
        let rel = if scale > 0.0 { diff / scale } else { diff };
        checks.push(Check::at_most("analytic_v_residual", rel, cfg.tolerances.potential));
    }
    let status = Status::of(&checks);
    let mut csv = String::from("x,G,Q,V,W,re_Veff,im_Veff\n");
    for r in &rows {
        csv.push_str(&format!("{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n", r.x, r.g, r.q, r.v, r.w, r.re_veff, r.im_veff));
    }
    let json = to_json(&DeriveReport { config: cfg, samples: rows, checks, status });
    Ok(Output { json, csv, status })
}

#[derive(Serialize)]
struct StateResidual {
    state: String,
    energy: f64,
    residual: f64,
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    config: &'a RunConfig,
    intertwining_residual: f64,
    eta_hermiticity_residual: f64,
    #[serde(rename = "etaH_hermiticity_residual")]
    eta_h_hermiticity_residual: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    eigenfunction_residuals: Vec<StateResidual>,
    checks: Vec<Check>,
    status: Status,
}

fn load_matrix(path: &std::path::Path) -> Result<DiscreteOperator> {
    DiscreteOperator::external(read_matrix_csv(BufReader::new(File::open(path)?))?)
}

pub fn run_verify(cfg: &RunConfig) -> Result<Output> {
    let (h, eta, states, with_checks) = match &cfg.matrices {
        Some(m) => (load_matrix(&m.h)?, load_matrix(&m.eta)?, Vec::new(), false),
        None => {
            let Context { spec, entry, grid } = cfg.context()?;
            let model = derive(&spec)?;
            log::info!("building H and eta on N = {}", grid.n());
            let h = build_hamiltonian(&model, &grid)?;
            let eta = build_eta(&model, &grid)?;
            let mut states = Vec::new();
            for f in entry.iter().flat_map(|e| e.eigenfunctions.iter()) {
                let variants: Vec<(String, Eigenfunction)> = match *f {
                    Eigenfunction::Morse { xi, .. } => vec![
                        ("morse psi_0, z = i*xi*exp(-x)".into(), Eigenfunction::Morse { xi, z_scale: MORSE_Z_DERIVED }),
                        ("morse psi_0, z = 2i*xi*exp(-x)".into(), Eigenfunction::Morse { xi, z_scale: MORSE_Z_PRINTED }),
                    ],
                    Eigenfunction::Periodic { n } => vec![(format!("periodic psi_{n}"), *f)],
                };
                for (state, f) in variants {
                    let energy = f.energy();
                    let residual = eigenfunction_residual(&model, &grid, |x| f.eval(x), C64::new(energy, 0.0))?;
                    states.push(StateResidual { state, energy, residual });
                }
            }
            (h, eta, states, true)
        }
    };
    if let Some(dir) = &cfg.dump_matrices {
        std::fs::create_dir_all(dir)?;
        h.write_csv(std::io::BufWriter::new(File::create(dir.join("H.csv"))?))?;
        eta.write_csv(std::io::BufWriter::new(File::create(dir.join("eta.csv"))?))?;
    }
    let inter = intertwining_residual(&h, &eta)?;
    let eta_herm = hermiticity_residual(&eta);
    let prod_herm = hermiticity_residual(&product(&eta, &h)?);
    let checks = if with_checks {
        vec![
            Check::at_most("intertwining_residual", inter, cfg.tolerances.intertwine),
            Check::at_most("eta_hermiticity_residual", eta_herm, cfg.tolerances.hermitian),
            Check::at_most("etaH_hermiticity_residual", prod_herm, cfg.tolerances.hermitian),
        ]
    } else {
        Vec::new()
    };
    let status = Status::of(&checks);
    let mut csv = String::from("quantity,value\n");
    csv.push_str(&format!("intertwining_residual,{inter:?}\n"));
    csv.push_str(&format!("eta_hermiticity_residual,{eta_herm:?}\n"));
    csv.push_str(&format!("etaH_hermiticity_residual,{prod_herm:?}\n"));
    for s in &states {
        csv.push_str(&format!("\"{}\",{:?}\n", s.state, s.residual));
    }
    let json = to_json(&VerifyReport {
        config: cfg,
        intertwining_residual: inter,
        eta_hermiticity_residual: eta_herm,
        eta_h_hermiticity_residual: prod_herm,
        eigenfunction_residuals: states,
        checks,
        status,
    });
    Ok(Output { json, csv, status })
}

#[derive(Serialize)]
struct SpectrumBody {
    total_eigenvalues: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    v_inf: Option<f64>,
    spectrum: SpectrumReport,
    checks: Vec<Check>,
    status: Status,
}

fn spectrum_body(cfg: &RunConfig) -> Result<SpectrumBody> {
    let Context { spec, entry, grid } = cfg.context()?;
    let model = derive(&spec)?;
    let h = build_hamiltonian(&model, &grid)?;
    let vectors = match cfg.v_inf {
        Some(v) => VectorSelection::RealPartBelow(v),
        None if grid.n() <= 400 => VectorSelection::All,
        None => VectorSelection::None,
    };
    let opts = EigOptions { vectors, tau_real: cfg.tolerances.real, ..EigOptions::default() };
    log::info!("solving dense eigenproblem, N = {}", grid.n());
    let (full, solver_failed) = match eigen::eig_with(h.matrix(), &opts) {
        Ok(r) => (r, false),
        Err(Error::NotConverged { partial, size }) => {
            log::error!("QR did not converge for N = {size}; reporting {} eigenvalues", partial.len());
            (*partial, true)
        }
        Err(e) => return Err(e),
    };
    let total = full.len();
    let mut report = match cfg.v_inf {
        Some(v) => bound_state_filter(&full, &grid, v),
        None => full,
    };
    let mut checks = Vec::new();
    if let Some(entry) = entry.filter(|e| e.solvable && !e.analytic_levels.is_empty()) {
        report = report.with_matches(&entry.analytic_levels, cfg.tolerances.level);
        if cfg.v_inf.is_some() {
            let count = report.len() as f64;
            let expected = entry.analytic_levels.len() as f64;
            checks.push(Check {
                name: "bound_state_count".into(),
                value: count,
                tolerance: None,
                expected: Some(expected),
                pass: count == expected,
            });
        }
        for m in &report.matches {
            let real = m.eigenvalue.is_some_and(|l| eigen::is_real(l, cfg.tolerances.real));
            checks.push(Check {
                name: format!("level {}", m.level),
                value: m.distance.unwrap_or(f64::INFINITY),
                tolerance: Some(cfg.tolerances.level),
                expected: Some(m.level),
                pass: m.matched && real,
            });
        }
    }
    let status = if solver_failed { Status::SolverFailed } else { Status::of(&checks) };
    Ok(SpectrumBody { total_eigenvalues: total, v_inf: cfg.v_inf, spectrum: report, checks, status })
}

#[derive(Serialize)]
struct SpectrumReportOut<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    body: SpectrumBody,
}

#[derive(Serialize)]
struct SweepRun {
    value: f64,
    #[serde(flatten)]
    body: SpectrumBody,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    config: &'a RunConfig,
    param: &'a str,
    runs: Vec<SweepRun>,
    status: Status,
}

pub fn run_spectrum(cfg: &RunConfig) -> Result<Output> {
    let Some(sweep) = &cfg.sweep else {
        let body = spectrum_body(cfg)?;
        let status = body.status;
        let csv = body.spectrum.to_csv();
        let json = to_json(&SpectrumReportOut { config: cfg, body });
        return Ok(Output { json, csv, status });
    };
    // solves are independent; collect keeps the input order
    let runs: Vec<SweepRun> = sweep
        .values
        .par_iter()
        .map(|&value| spectrum_body(&cfg.with_param(&sweep.param, value)).map(|body| SweepRun { value, body }))
        .collect::<Result<_>>()?;
    let status = runs.iter().map(|r| r.body.status).fold(Status::None, Status::combine);
    let mut csv = format!("{},re,im,residual,real\n", sweep.param);
    for r in &runs {
        for line in r.body.spectrum.to_csv().lines().skip(1) {
            csv.push_str(&format!("{},{line}\n", r.value));
        }
    }
    let json = to_json(&SweepReport { config: cfg, param: &sweep.param, runs, status });
    Ok(Output { json, csv, status })
}

/// Formulas are parameter-independent text, so any admissible values
/// serve to look them up.
pub fn catalog_list() -> serde_json::Value {
    let required = required_params();
    let probe = phgen_core::ParamEnv::new().with("A", 2.0).with("xi", 1.0).with("W0", 1.0).with("C0", 0.0);
    catalog::MODEL_NAMES
        .iter()
        .map(|name| {
            let entry = catalog::get(name, &probe).expect("catalog names resolve");
            let spec = entry.spec.to_config();
            serde_json::json!({
                "name": name,
                "params": required[name],
                "W": spec.w,
                "antiderivative": spec.antiderivative,
                "V": entry.analytic_v,
                "alpha": spec.alpha,
                "beta": spec.beta,
                "grid": entry.grid,
                "solvable": entry.solvable,
            })
        })
        .collect()
}

pub fn catalog_show(name: &str, env: &phgen_core::ParamEnv) -> Result<serde_json::Value> {
    let entry = catalog::get(name, env)?;
    let mut v = to_json(&entry);
    let formulas: Vec<String> = entry.eigenfunctions.iter().map(|f| f.formula()).collect();
    v["eigenfunction_formulas"] = to_json(&formulas);
    Ok(v)
}
