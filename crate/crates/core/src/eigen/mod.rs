//! Dense non-Hermitian eigensolver and spectrum post-processing.
//!
//! [`eig`] computes every eigenvalue of a dense complex matrix by
//! balancing, Householder reduction to Hessenberg form and shifted QR.
//! Eigenvectors are obtained afterwards by inverse iteration on the
//! Hessenberg matrix, only for the eigenvalues selected in
//! [`EigOptions::vectors`]. Each computed vector carries its relative
//! residual `‖Av − λv‖₂ / (‖A‖_F ‖v‖₂)`.

mod dense;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::DerivedModel;
use crate::matrix::{norm2, CMatrix};
use crate::operators::Grid;

pub const DEFAULT_TAU_SOLVER: f64 = 1e-8;
pub const DEFAULT_TAU_REAL: f64 = 1e-5;

/// Which eigenvalues get an eigenvector (and a residual).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VectorSelection {
    None,
    All,
    /// Eigenvalues with `Re λ` strictly below the bound.
    RealPartBelow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigOptions {
    pub vectors: VectorSelection,
    pub tau_solver: f64,
    pub tau_real: f64,
    pub balance: bool,
}

impl EigOptions {
    /// Vectors for everything on small problems, none on large ones.
    pub fn for_size(n: usize) -> Self {
        Self {
            vectors: if n <= 400 {
                VectorSelection::All
            } else {
                VectorSelection::None
            },
            ..Self::default()
        }
    }

    pub fn with_vectors(mut self, vectors: VectorSelection) -> Self {
        self.vectors = vectors;
        self
    }
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            vectors: VectorSelection::None,
            tau_solver: DEFAULT_TAU_SOLVER,
            tau_real: DEFAULT_TAU_REAL,
            balance: true,
        }
    }
}

/// One analytic level paired with its nearest computed eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMatch {
    pub level: f64,
    pub eigenvalue: Option<C64>,
    pub distance: Option<f64>,
    pub matched: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by real part, then imaginary part. Serialized as `[re, im]`.
    pub eigenvalues: Vec<C64>,
    pub residuals: Vec<Option<f64>>,
    pub reality_flags: Vec<bool>,
    pub tau_real: f64,
    pub matches: Vec<LevelMatch>,
    #[serde(skip)]
    pub vectors: Vec<Option<Vec<C64>>>,
}

impl SpectrumReport {
    fn from_parts(
        eigenvalues: Vec<C64>,
        vectors: Vec<Option<Vec<C64>>>,
        residuals: Vec<Option<f64>>,
        tau_real: f64,
    ) -> Self {
        let mut idx: Vec<usize> = (0..eigenvalues.len()).collect();
        idx.sort_by(|&a, &b| {
            let (x, y) = (eigenvalues[a], eigenvalues[b]);
            x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
        });
        let eigenvalues: Vec<C64> = idx.iter().map(|&i| eigenvalues[i]).collect();
        let reality_flags = eigenvalues.iter().map(|&l| is_real(l, tau_real)).collect();
        Self {
            reality_flags,
            residuals: idx.iter().map(|&i| residuals[i]).collect(),
            vectors: idx.iter().map(|&i| vectors[i].clone()).collect(),
            eigenvalues,
            tau_real,
            matches: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest residual among eigenvalues that have one.
    pub fn max_residual(&self) -> Option<f64> {
        self.residuals.iter().flatten().copied().reduce(f64::max)
    }

    pub fn all_real(&self) -> bool {
        self.reality_flags.iter().all(|&r| r)
    }

    fn select(&self, keep: impl Fn(usize) -> bool) -> Self {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| keep(i)).collect();
        Self {
            eigenvalues: idx.iter().map(|&i| self.eigenvalues[i]).collect(),
            residuals: idx.iter().map(|&i| self.residuals[i]).collect(),
            reality_flags: idx.iter().map(|&i| self.reality_flags[i]).collect(),
            vectors: idx.iter().map(|&i| self.vectors[i].clone()).collect(),
            tau_real: self.tau_real,
            matches: Vec::new(),
        }
    }

    pub fn with_matches(mut self, analytic: &[f64], tol: f64) -> Self {
        self.matches = match_levels(&self, analytic, tol);
        self
    }

    /// Eigenvalues as `(re, im)` rows for CSV output.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,residual,real\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            let res = self.residuals[i].map(|r| format!("{r:?}")).unwrap_or_default();
            out.push_str(&format!("{:?},{:?},{},{}\n", l.re, l.im, res, self.reality_flags[i]));
        }
        out
    }
}

/// `|Im λ| ≤ τ · max(1, |Re λ|)`.
pub fn is_real(lambda: C64, tau_real: f64) -> bool {
    lambda.im.abs() <= tau_real * lambda.re.abs().max(1.0)
}

pub fn eig(matrix: &CMatrix) -> Result<SpectrumReport> {
    eig_with(matrix, &EigOptions::for_size(matrix.rows()))
}

pub fn eig_with(matrix: &CMatrix, opts: &EigOptions) -> Result<SpectrumReport> {
    if !matrix.is_square() {
        return Err(Error::InvalidArgument(format!(
            "eigenproblem needs a square matrix, got {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    if !matrix.is_finite() {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let n = matrix.rows();
    let mut work = matrix.clone();
    let scale = if opts.balance {
        dense::balance(&mut work)
    } else {
        vec![1.0; n]
    };
    let reflectors = dense::hessenberg(&mut work);
    let wants_vectors = opts.vectors != VectorSelection::None;
    let hess = wants_vectors.then(|| work.clone());

    let values = match dense::hessenberg_eigenvalues(&mut work) {
        Ok(v) => v,
        Err(fail) => {
            let k = fail.found.len();
            let partial = SpectrumReport::from_parts(
                fail.found,
                vec![None; k],
                vec![None; k],
                opts.tau_real,
            );
            return Err(Error::NotConverged {
                size: n,
                partial: Box::new(partial),
            });
        }
    };

    let mut vectors = vec![None; n];
    let mut residuals = vec![None; n];
    if let Some(hess) = hess {
        let solver = VectorSolver {
            original: matrix,
            norm: matrix.frobenius_norm(),
            hess: &hess,
            hess_norm: hess.frobenius_norm(),
            reflectors: &reflectors,
            scale: &scale,
        };
        let mut done: Vec<(C64, Vec<C64>)> = Vec::new();
        for (i, &lambda) in values.iter().enumerate() {
            let wanted = match opts.vectors {
                VectorSelection::None => false,
                VectorSelection::All => true,
                VectorSelection::RealPartBelow(b) => lambda.re < b,
            };
            if !wanted {
                continue;
            }
            let (v, r) = solver.vector(lambda, i as u64, &done, opts.tau_solver);
            if r > opts.tau_solver {
                log::warn!("eigenvector residual {r:e} for λ = {lambda} exceeds {:e}", opts.tau_solver);
            }
            done.push((lambda, v.clone()));
            vectors[i] = Some(v);
            residuals[i] = Some(r);
        }
    }
    Ok(SpectrumReport::from_parts(values, vectors, residuals, opts.tau_real))
}

struct VectorSolver<'a> {
    original: &'a CMatrix,
    norm: f64,
    hess: &'a CMatrix,
    hess_norm: f64,
    reflectors: &'a [dense::Reflector],
    scale: &'a [f64],
}

impl VectorSolver<'_> {
    fn residual(&self, lambda: C64, v: &[C64]) -> f64 {
        let av = self.original.matvec(v);
        let r: f64 = av
            .iter()
            .zip(v)
            .map(|(a, x)| (a - lambda * x).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = self.norm * norm2(v);
        if scale == 0.0 {
            r
        } else {
            r / scale
        }
    }

    /// Hessenberg-space vector back to the original basis, unit 2-norm.
    fn back_transform(&self, mut y: Vec<C64>) -> Vec<C64> {
        dense::apply_q(self.reflectors, &mut y);
        for (z, s) in y.iter_mut().zip(self.scale) {
            *z *= *s;
        }
        let nrm = norm2(&y);
        if nrm > 0.0 {
            y.iter_mut().for_each(|z| *z /= nrm);
        }
        y
    }

    fn inverse_iterate(&self, lambda: C64, seed: u64, cluster: &[&Vec<C64>]) -> Vec<C64> {
        let n = self.hess.rows();
        let tiny = f64::EPSILON * self.hess_norm.max(f64::MIN_POSITIVE);
        let lu = dense::HessenbergLu::new(self.hess, lambda, tiny);
        let mut y = dense::start_vector(n, seed);
        for step in 0..3 {
            lu.solve_in_place(&mut y);
            let nrm = norm2(&y);
            if nrm == 0.0 || !nrm.is_finite() {
                y = dense::start_vector(n, seed.wrapping_add(step + 1));
                continue;
            }
            y.iter_mut().for_each(|z| *z /= nrm);
        }
        // one re-orthogonalization pass against vectors already found for
        // numerically coincident eigenvalues, then a final solve
        if !cluster.is_empty() {
            let mut v = self.back_transform(y.clone());
            for u in cluster {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u.iter()) {
                    *vi -= proj * ui;
                }
            }
            // map back to Hessenberg coordinates: y = Qᴴ D⁻¹ v
            for (z, s) in v.iter_mut().zip(self.scale) {
                *z /= *s;
            }
            for r in self.reflectors {
                r.apply(&mut v);
            }
            if norm2(&v) > 0.0 {
                y = v;
                lu.solve_in_place(&mut y);
            }
        }
        self.back_transform(y)
    }

    fn vector(
        &self,
        lambda: C64,
        seed: u64,
        done: &[(C64, Vec<C64>)],
        tau_solver: f64,
    ) -> (Vec<C64>, f64) {
        let cluster_tol = 1e3 * f64::EPSILON * self.hess_norm;
        let cluster: Vec<&Vec<C64>> = done
            .iter()
            .filter(|(mu, _)| (mu - lambda).norm() <= cluster_tol)
            .map(|(_, v)| v)
            .collect();
        let v = self.inverse_iterate(lambda, seed, &cluster);
        let r = self.residual(lambda, &v);
        if r <= tau_solver {
            return (v, r);
        }
        // Rayleigh-quotient refinement, once
        let av = self.original.matvec(&v);
        let rq: C64 = v.iter().zip(&av).map(|(a, b)| a.conj() * b).sum();
        let v2 = self.inverse_iterate(rq, seed ^ 0x5bd1, &cluster);
        let r2 = self.residual(rq, &v2);
        if r2 < r {
            (v2, r2)
        } else {
            (v, r)
        }
    }
}

/// Keeps eigenvalues with `Re λ < v_inf` whose eigenvectors carry at
/// least 99.9 % of their ℓ² mass in the inner 80 % of the grid.
/// Eigenvalues without a computed eigenvector are dropped.
pub fn bound_state_filter(report: &SpectrumReport, grid: &Grid, v_inf: f64) -> SpectrumReport {
    let n = grid.n();
    let edge = n / 10;
    report.select(|i| {
        if report.eigenvalues[i].re >= v_inf {
            return false;
        }
        match &report.vectors[i] {
            Some(v) if v.len() == n => {
                let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                let inner: f64 = v[edge..n - edge].iter().map(|z| z.norm_sqr()).sum();
                total > 0.0 && inner >= 0.999 * total
            }
            _ => false,
        }
    })
}

/// Greedy nearest matching between analytic levels and computed
/// eigenvalues. Pairs are taken in order of increasing distance, each
/// eigenvalue used at most once, so the result does not depend on the
/// order of `analytic`. A level is `matched` when its distance is within
/// `tol`; unmatched levels still report their nearest available candidate.
pub fn match_levels(report: &SpectrumReport, analytic: &[f64], tol: f64) -> Vec<LevelMatch> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (a, &level) in analytic.iter().enumerate() {
        for (e, &lambda) in report.eigenvalues.iter().enumerate() {
            pairs.push(((lambda - level).norm(), a, e));
        }
    }
    pairs.sort_by(|x, y| {
        x.0.total_cmp(&y.0)
            .then(analytic[x.1].total_cmp(&analytic[y.1]))
            .then(x.2.cmp(&y.2))
    });
    let mut out: Vec<LevelMatch> = analytic
        .iter()
        .map(|&level| LevelMatch {
            level,
            eigenvalue: None,
            distance: None,
            matched: false,
        })
        .collect();
    let mut level_done = vec![false; analytic.len()];
    let mut eig_used = vec![false; report.len()];
    for (d, a, e) in pairs {
        if level_done[a] || eig_used[e] {
            continue;
        }
        level_done[a] = true;
        eig_used[e] = true;
        out[a].eigenvalue = Some(report.eigenvalues[e]);
        out[a].distance = Some(d);
        out[a].matched = d <= tol;
    }
    out
}

/// `‖(Hψ) − Eψ‖₂ / ‖ψ‖₂` with the three-point discrete `H` applied to `ψ`
/// sampled on the grid. The end values `ψ(a)`, `ψ(b)` enter the stencil
/// of the first and last interior rows, so closed-form states that do not
/// vanish at the truncation points are not penalized for it.
pub fn eigenfunction_residual(
    model: &DerivedModel,
    grid: &Grid,
    psi: impl Fn(f64) -> C64,
    energy: C64,
) -> Result<f64> {
    let n = grid.n();
    let h = grid.h();
    let samples: Vec<C64> = (0..n + 2).map(|j| psi(grid.a() + j as f64 * h)).collect();
    let interior = &samples[1..=n];
    let norm = norm2(interior);
    // also rejects a NaN norm
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(norm >= 1e-12 * n as f64) {
        return Err(Error::ZeroEigenfunction { norm });
    }
    let inv_h2 = 1.0 / (h * h);
    let mut acc = 0.0;
    for j in 1..=n {
        let x = grid.x(j);
        let lap = (samples[j + 1] - 2.0 * samples[j] + samples[j - 1]) * inv_h2;
        let hpsi = -lap + model.effective_potential(x)? * samples[j];
        acc += (hpsi - energy * samples[j]).norm_sqr();
    }
    Ok(acc.sqrt() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_close(got: &[C64], want: &[C64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() < tol, "{g} vs {w}");
        }
    }

    #[test]
    fn diagonal_spectrum() {
        let m = CMatrix::from_fn(3, 3, |i, j| if i == j { c(3.0 - i as f64, 0.0) } else { c(0.0, 0.0) });
        let r = eig(&m).unwrap();
        sorted_close(&r.eigenvalues, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-14);
        assert!(r.all_real());
        assert!(r.max_residual().unwrap() < 1e-14);
    }

    #[test]
    fn rotation_generator() {
        let m = CMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let r = eig(&m).unwrap();
        sorted_close(&r.eigenvalues, &[c(0.0, -1.0), c(0.0, 1.0)], 1e-14);
        assert_eq!(r.reality_flags, vec![false, false]);
        assert!(r.max_residual().unwrap() < 1e-14);
    }

    #[test]
    fn jordan_block_and_empty() {
        let m = CMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        let r = eig(&m).unwrap();
        sorted_close(&r.eigenvalues, &[c(1.0, 0.0), c(1.0, 0.0)], 1e-7);
        assert!(eig(&CMatrix::zeros(0, 0)).unwrap().is_empty());
        let one = CMatrix::from_row_major(1, 1, vec![c(2.0, -1.0)]).unwrap();
        assert_eq!(eig(&one).unwrap().eigenvalues, vec![c(2.0, -1.0)]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(eig(&CMatrix::zeros(2, 3)).is_err());
        let mut m = CMatrix::identity(2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert!(eig(&m).is_err());
    }

    #[test]
    fn match_levels_greedy_and_reports_unmatched() {
        let m = CMatrix::from_fn(3, 3, |i, j| if i == j { c([0.0, 1.0, 5.0][i], 0.0) } else { c(0.0, 0.0) });
        let r = eig(&m).unwrap();
        let ms = match_levels(&r, &[1.05, 0.9, 3.0], 0.2);
        // 1.0 is closest to 1.05 (0.05) vs 0.9 (0.1): 1.05 wins, 0.9 falls back to 0.0
        assert_eq!(ms[0].eigenvalue, Some(c(1.0, 0.0)));
        assert!(ms[0].matched);
        assert_eq!(ms[1].eigenvalue, Some(c(0.0, 0.0)));
        assert!(!ms[1].matched);
        assert_eq!(ms[2].eigenvalue, Some(c(5.0, 0.0)));
        assert!(!ms[2].matched);
        assert!(match_levels(&r, &[], 1.0).is_empty());
    }

    #[test]
    fn report_serializes_pairs() {
        let m = CMatrix::from_row_major(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let r = eig(&m).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let first = v["eigenvalues"][0].as_array().unwrap();
        assert_eq!(first.len(), 2);
        assert!(first[0].as_f64().unwrap().abs() < 1e-14);
        assert!((first[1].as_f64().unwrap() + 1.0).abs() < 1e-14);
        assert!(v.get("vectors").is_none());
        assert!(r.to_csv().starts_with("re,im,residual,real\n"));
    }
}
