//! Finite-difference `H` and `η` on a truncated interval with Dirichlet
//! ends, and the residuals that measure pseudo-Hermiticity.

use std::fmt;
use std::io::{BufRead, Write};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::DerivedModel;
use crate::matrix::CMatrix;

/// Uniform grid on `[a, b]` with `n` interior nodes `x_j = a + j h`,
/// `j = 1..=n`, `h = (b − a)/(n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidGrid(format!("need finite a < b, got [{a}, {b}]")));
        }
        if n < 3 {
            return Err(Error::InvalidGrid(format!("need at least 3 interior points, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n + 1) as f64
    }

    /// Node `j`; `j = 0` and `j = n + 1` are the Dirichlet ends.
    pub fn x(&self, j: usize) -> f64 {
        self.a + j as f64 * self.h()
    }

    /// Interior nodes.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (1..=self.n).map(|j| self.x(j))
    }

    /// Same interval with `n` doubled.
    pub fn refined(&self) -> Self {
        Self { n: 2 * self.n, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    #[serde(rename = "H")]
    Hamiltonian,
    #[serde(rename = "eta")]
    Eta,
    #[serde(rename = "etaH")]
    EtaH,
    Adjoint(Box<Label>),
    External,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Hamiltonian => f.write_str("H"),
            Label::Eta => f.write_str("eta"),
            Label::EtaH => f.write_str("etaH"),
            Label::Adjoint(l) => write!(f, "{l}^dagger"),
            Label::External => f.write_str("external"),
        }
    }
}

/// Dense matrix of an operator on a grid. Externally supplied matrices
/// carry no grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    matrix: CMatrix,
    grid: Option<Grid>,
    label: Label,
}

impl DiscreteOperator {
    pub fn external(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument(format!(
                "operator matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { matrix, grid: None, label: Label::External })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn grid(&self) -> Option<&Grid> {
        self.grid.as_ref()
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::GridMismatch);
        }
        match (&self.grid, &other.grid) {
            (Some(g1), Some(g2)) if g1 != g2 => Err(Error::GridMismatch),
            _ => Ok(()),
        }
    }

    /// Row-major CSV, one matrix row per line, `re,im` pairs.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.matrix, out)
    }
}

pub fn write_matrix_csv<W: Write>(m: &CMatrix, mut out: W) -> Result<()> {
    let mut line = String::new();
    for i in 0..m.rows() {
        line.clear();
        for (j, z) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format!("{:?},{:?}", z.re, z.im));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Reads the format written by [`write_matrix_csv`]. The matrix must be square.
pub fn read_matrix_csv<R: BufRead>(input: R) -> Result<CMatrix> {
    let mut data = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (ln, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if !fields.len().is_multiple_of(2) {
            return Err(Error::Csv { line: ln + 1, msg: "odd number of fields".into() });
        }
        let c = fields.len() / 2;
        if *cols.get_or_insert(c) != c {
            return Err(Error::Csv { line: ln + 1, msg: format!("expected {} entries, got {c}", cols.unwrap()) });
        }
        for pair in fields.chunks(2) {
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Csv { line: ln + 1, msg: format!("not a number: `{s}`") })
            };
            data.push(C64::new(parse(pair[0])?, parse(pair[1])?));
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows != cols {
        return Err(Error::Csv { line: rows, msg: format!("matrix is {rows}x{cols}, not square") });
    }
    Ok(CMatrix::from_row_major(rows, cols, data).expect("sizes checked"))
}

/// `−D₂ + diag(V + iW)` with the three-point second difference.
pub fn build_hamiltonian(model: &DerivedModel, grid: &Grid) -> Result<DiscreteOperator> {
    let n = grid.n();
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let mut m = CMatrix::zeros(n, n);
    let mut worst: f64 = 0.0;
    for (j, x) in grid.points().enumerate() {
        let veff = model.effective_potential(x)?;
        worst = worst.max(veff.norm());
        m[(j, j)] = C64::new(2.0 * inv_h2, 0.0) + veff;
        if j + 1 < n {
            m[(j, j + 1)] = C64::new(-inv_h2, 0.0);
            m[(j + 1, j)] = C64::new(-inv_h2, 0.0);
        }
    }
    if worst * h * h > 0.1 {
        log::warn!("coarse grid: max |V_eff| h² = {:.3} on [{}, {}]", worst * h * h, grid.a(), grid.b());
    }
    Ok(DiscreteOperator { matrix: m, grid: Some(*grid), label: Label::Hamiltonian })
}

/// `−D₂ − i(Ĝ D₁ + D₁ Ĝ) + diag(Q + G²)`. The symmetrized first-order
/// term reproduces `−2iG∂ − iG′` and keeps the matrix exactly Hermitian.
pub fn build_eta(model: &DerivedModel, grid: &Grid) -> Result<DiscreteOperator> {
    let n = grid.n();
    let h = grid.h();
    let inv_h2 = 1.0 / (h * h);
    let inv_2h = 0.5 / h;
    let mut g = Vec::with_capacity(n);
    let mut m = CMatrix::zeros(n, n);
    for (j, x) in grid.points().enumerate() {
        let gj = model.g(x)?;
        let q = model.q(x)?;
        g.push(gj);
        m[(j, j)] = C64::new(2.0 * inv_h2 + q + gj * gj, 0.0);
    }
    for j in 0..n - 1 {
        let s = (g[j] + g[j + 1]) * inv_2h;
        m[(j, j + 1)] = C64::new(-inv_h2, -s);
        m[(j + 1, j)] = C64::new(-inv_h2, s);
    }
    Ok(DiscreteOperator { matrix: m, grid: Some(*grid), label: Label::Eta })
}

/// Conjugate transpose.
pub fn adjoint(op: &DiscreteOperator) -> DiscreteOperator {
    let label = match &op.label {
        Label::Adjoint(inner) => (**inner).clone(),
        other => Label::Adjoint(Box::new(other.clone())),
    };
    DiscreteOperator { matrix: op.matrix.adjoint(), grid: op.grid, label }
}

/// `η H` as an operator labelled `etaH`.
pub fn product(eta: &DiscreteOperator, h: &DiscreteOperator) -> Result<DiscreteOperator> {
    eta.check_compatible(h)?;
    Ok(DiscreteOperator {
        matrix: eta.matrix.matmul(&h.matrix),
        grid: eta.grid.or(h.grid),
        label: Label::EtaH,
    })
}

/// `‖ηH − H†η‖_F / (‖η‖_F ‖H‖_F)`.
pub fn intertwining_residual(h: &DiscreteOperator, eta: &DiscreteOperator) -> Result<f64> {
    eta.check_compatible(h)?;
    let lhs = eta.matrix.matmul(&h.matrix);
    let rhs = h.matrix.adjoint().matmul(&eta.matrix);
    let scale = eta.matrix.frobenius_norm() * h.matrix.frobenius_norm();
    let diff = lhs.frobenius_distance(&rhs);
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// `‖M − M†‖_F / ‖M‖_F` (0 for the zero matrix).
pub fn hermiticity_residual(op: &DiscreteOperator) -> f64 {
    let m = &op.matrix;
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    let nrm = m.frobenius_norm();
    if nrm == 0.0 {
        0.0
    } else {
        acc.sqrt() / nrm
    }
}
