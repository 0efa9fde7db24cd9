//! From a generator `W(x)` to the real potential `V(x)` and the metric
//! coefficients.
//!
//! With `I(x) = ∫ˣ W` (integration constant zero) the pipeline is
//!
//! ```text
//! G  = −I/2
//! Q  = F² − F′ = W′/(2I) − (W/(2I))² + α/I²
//! V  = Q − (I/2)² + β
//! η  = −∂² − 2iG ∂ + Q + G² − iG′
//! ```
//!
//! `F` itself never enters `η`, only the combination `Q`, so it is
//! available separately through [`riccati_f`].

pub mod quadrature;
pub mod riccati;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, ParamEnv};

pub use riccati::{integrate_riccati, RiccatiOptions, RiccatiSolution};

/// `|∫W|` below this is treated as a zero of `G`.
pub const G_ZERO_THRESHOLD: f64 = 1e-12;
/// Tolerance of the construction-time check `d/dx(∫W) = W`.
pub const ANTIDERIVATIVE_CHECK_TOL: f64 = 1e-8;
pub const QUADRATURE_TOL: f64 = 1e-10;
/// Interval sampled by the construction-time antiderivative check.
pub const DEFAULT_CHECK_INTERVAL: (f64, f64) = (-5.0, 5.0);
const CHECK_POINTS: usize = 100;

/// `I(x) = offset + ∫_{anchor}^x W` by adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericAntiderivative {
    pub anchor: f64,
    pub offset: f64,
}

impl NumericAntiderivative {
    pub fn new(anchor: f64, offset: f64) -> Self {
        Self { anchor, offset }
    }

    /// Chooses the offset so that `I(point) = value`.
    pub fn calibrate(&mut self, w: &Expr, env: &ParamEnv, point: f64, value: f64) -> Result<()> {
        let raw = integrate_expr(w, env, self.anchor, point)?;
        self.offset = value - raw;
        Ok(())
    }

    pub fn eval(&self, w: &Expr, env: &ParamEnv, x: f64) -> Result<f64> {
        Ok(self.offset + integrate_expr(w, env, self.anchor, x)?)
    }
}

fn integrate_expr(w: &Expr, env: &ParamEnv, from: f64, to: f64) -> Result<f64> {
    quadrature::integrate(|z| Ok(w.eval(z, env)?), from, to, QUADRATURE_TOL)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Antiderivative {
    /// Closed-form `∫W` with the integration constant already fixed.
    ClosedForm(Expr),
    Numeric(NumericAntiderivative),
}

/// Generator `W`, its antiderivative and the integration constants α, β.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub w: Expr,
    pub antiderivative: Antiderivative,
    pub alpha: f64,
    pub beta: f64,
    pub env: ParamEnv,
}

impl GeneratorSpec {
    /// Spec with a closed-form antiderivative, checked against `W` on
    /// [`DEFAULT_CHECK_INTERVAL`].
    pub fn closed_form(w: Expr, antiderivative: Expr, alpha: f64, beta: f64, env: ParamEnv) -> Result<Self> {
        Self::closed_form_checked_on(w, antiderivative, alpha, beta, env, DEFAULT_CHECK_INTERVAL)
    }

    pub fn closed_form_checked_on(
        w: Expr,
        antiderivative: Expr,
        alpha: f64,
        beta: f64,
        env: ParamEnv,
        interval: (f64, f64),
    ) -> Result<Self> {
        w.check_bound(&env)?;
        antiderivative.check_bound(&env)?;
        let d = antiderivative.differentiate();
        let (a, b) = interval;
        for k in 0..CHECK_POINTS {
            let x = a + (b - a) * (k as f64 + 0.5) / CHECK_POINTS as f64;
            // points where either side is undefined are not checkable
            let (Ok(dv), Ok(wv)) = (d.eval(x, &env), w.eval(x, &env)) else {
                continue;
            };
            if (dv - wv).abs() > ANTIDERIVATIVE_CHECK_TOL * wv.abs().max(1.0) {
                return Err(Error::AntiderivativeMismatch { x, derivative: dv, w: wv });
            }
        }
        Ok(Self {
            w,
            antiderivative: Antiderivative::ClosedForm(antiderivative),
            alpha,
            beta,
            env,
        })
    }

    pub fn numeric(w: Expr, antiderivative: NumericAntiderivative, alpha: f64, beta: f64, env: ParamEnv) -> Result<Self> {
        w.check_bound(&env)?;
        Ok(Self {
            w,
            antiderivative: Antiderivative::Numeric(antiderivative),
            alpha,
            beta,
            env,
        })
    }

    pub fn from_config(cfg: &GeneratorConfig) -> Result<Self> {
        let w = Expr::parse(&cfg.w)?;
        let env: ParamEnv = cfg.params.clone();
        match &cfg.antiderivative {
            Some(src) => Self::closed_form(w, Expr::parse(src)?, cfg.alpha, cfg.beta, env),
            None => {
                let anchor = cfg.anchor.unwrap_or(0.0);
                let mut num = NumericAntiderivative::new(anchor, 0.0);
                if let Some(value) = cfg.anchor_value {
                    w.check_bound(&env)?;
                    num.calibrate(&w, &env, anchor, value)?;
                }
                Self::numeric(w, num, cfg.alpha, cfg.beta, env)
            }
        }
    }

    pub fn to_config(&self) -> GeneratorConfig {
        let (antiderivative, anchor, anchor_value) = match &self.antiderivative {
            Antiderivative::ClosedForm(e) => (Some(e.to_string()), None, None),
            Antiderivative::Numeric(n) => (None, Some(n.anchor), Some(n.offset)),
        };
        GeneratorConfig {
            w: self.w.to_string(),
            antiderivative,
            alpha: self.alpha,
            beta: self.beta,
            params: self.env.clone(),
            anchor,
            anchor_value,
        }
    }

    /// `∫ˣ W` under the spec's integration-constant convention.
    pub fn antiderivative(&self, x: f64) -> Result<f64> {
        match &self.antiderivative {
            Antiderivative::ClosedForm(e) => Ok(e.eval(x, &self.env)?),
            Antiderivative::Numeric(n) => n.eval(&self.w, &self.env, x),
        }
    }
}

/// Serialized form of a [`GeneratorSpec`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    #[serde(rename = "W")]
    pub w: String,
    pub antiderivative: Option<String>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default)]
    pub params: ParamEnv,
    /// Numeric path only: quadrature anchor (default 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
    /// Numeric path only: prescribed value of `∫W` at the anchor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_value: Option<f64>,
}

/// All pipeline functions of one generator, evaluable pointwise.
#[derive(Debug, Clone)]
pub struct DerivedModel {
    spec: GeneratorSpec,
    w_prime: Expr,
    /// d/dx of the closed-form antiderivative, when there is one.
    antiderivative_prime: Option<Expr>,
}

/// One evaluation of every pipeline quantity at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub x: f64,
    pub g: f64,
    pub g_prime: f64,
    pub q: f64,
    pub v: f64,
    pub w: f64,
}

pub fn derive(spec: &GeneratorSpec) -> Result<DerivedModel> {
    if spec.w.is_zero() {
        return Err(Error::ZeroGenerator);
    }
    let antiderivative_prime = match &spec.antiderivative {
        Antiderivative::ClosedForm(e) => {
            if e.is_zero() {
                return Err(Error::ZeroGenerator);
            }
            Some(e.differentiate())
        }
        Antiderivative::Numeric(_) => None,
    };
    let model = DerivedModel {
        w_prime: spec.w.differentiate(),
        antiderivative_prime,
        spec: spec.clone(),
    };
    // W that vanishes on every probe point is treated as identically zero
    let (a, b) = DEFAULT_CHECK_INTERVAL;
    let vanishes = (0..CHECK_POINTS).all(|k| {
        let x = a + (b - a) * (k as f64 + 0.5) / CHECK_POINTS as f64;
        matches!(model.w(x), Ok(v) if v == 0.0)
    });
    if vanishes {
        return Err(Error::ZeroGenerator);
    }
    Ok(model)
}

impl DerivedModel {
    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    pub fn beta(&self) -> f64 {
        self.spec.beta
    }

    pub fn w(&self, x: f64) -> Result<f64> {
        Ok(self.spec.w.eval(x, &self.spec.env)?)
    }

    pub fn w_prime(&self, x: f64) -> Result<f64> {
        Ok(self.w_prime.eval(x, &self.spec.env)?)
    }

    /// `∫ˣ W`.
    pub fn integral(&self, x: f64) -> Result<f64> {
        self.spec.antiderivative(x)
    }

    /// `∫ˣ W`, rejecting points where it (and hence `G`) vanishes.
    fn nonzero_integral(&self, x: f64) -> Result<f64> {
        let i = self.integral(x)?;
        if i.abs() < G_ZERO_THRESHOLD {
            return Err(Error::GVanishes { x, value: i });
        }
        Ok(i)
    }

    pub fn g(&self, x: f64) -> Result<f64> {
        Ok(-0.5 * self.integral(x)?)
    }

    /// `G′`: from the symbolic derivative of a closed-form antiderivative,
    /// otherwise `−W/2` directly.
    pub fn g_prime(&self, x: f64) -> Result<f64> {
        match &self.antiderivative_prime {
            Some(d) => Ok(-0.5 * d.eval(x, &self.spec.env)?),
            None => Ok(-0.5 * self.w(x)?),
        }
    }

    /// `Q = F² − F′` written in terms of `W` and `∫W`.
    pub fn q(&self, x: f64) -> Result<f64> {
        let i = self.nonzero_integral(x)?;
        let w = self.w(x)?;
        let wp = self.w_prime(x)?;
        let r = w / (2.0 * i);
        Ok(wp / (2.0 * i) - r * r + self.spec.alpha / (i * i))
    }

    /// `Q = (2GG″ − G′² + α) / (4G²)`, the same quantity written in terms
    /// of `G`. Independent of [`q`](Self::q) up to rounding.
    pub fn q_from_g(&self, x: f64) -> Result<f64> {
        self.nonzero_integral(x)?;
        let g = self.g(x)?;
        let gp = self.g_prime(x)?;
        let gpp = -0.5 * self.w_prime(x)?;
        Ok((2.0 * g * gpp - gp * gp + self.spec.alpha) / (4.0 * g * g))
    }

    /// Real part of the effective potential, expanded in `W` and `∫W`.
    pub fn v(&self, x: f64) -> Result<f64> {
        let i = self.nonzero_integral(x)?;
        let w = self.w(x)?;
        let wp = self.w_prime(x)?;
        let two_i = 2.0 * i;
        Ok(wp / two_i - (w / two_i).powi(2) + self.spec.alpha / (i * i) - (0.5 * i).powi(2)
            + self.spec.beta)
    }

    /// `V(x) + i W(x)`.
    pub fn effective_potential(&self, x: f64) -> Result<C64> {
        Ok(C64::new(self.v(x)?, self.w(x)?))
    }

    /// Zeroth-order coefficient of `η`: `Q + G² − iG′`.
    pub fn eta_c0(&self, x: f64) -> Result<C64> {
        let g = self.g(x)?;
        Ok(C64::new(self.q(x)? + g * g, -self.g_prime(x)?))
    }

    /// First-order coefficient of `η`: `−2iG`.
    pub fn eta_c1(&self, x: f64) -> Result<C64> {
        Ok(C64::new(0.0, -2.0 * self.g(x)?))
    }

    pub fn sample(&self, x: f64) -> Result<Sample> {
        Ok(Sample {
            x,
            g: self.g(x)?,
            g_prime: self.g_prime(x)?,
            q: self.q(x)?,
            v: self.v(x)?,
            w: self.w(x)?,
        })
    }
}

/// Solves `F′ = F² − Q` for this model from `(x0, f0)`; see
/// [`integrate_riccati`].
pub fn riccati_f(model: &DerivedModel, x0: f64, f0: f64, xs: &[f64]) -> Result<RiccatiSolution> {
    integrate_riccati(|x| model.q(x), x0, f0, xs, &RiccatiOptions::default())
}

/// Effective potential obtained from a constant generator `W ≡ W₀`, where
/// `∫W = W₀x + C₀`. Its real part is unbounded below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantWModel {
    w0: f64,
    c0: f64,
    alpha: f64,
    beta: f64,
}

impl ConstantWModel {
    pub fn new(w0: f64, c0: f64, alpha: f64, beta: f64) -> Result<Self> {
        if w0 == 0.0 || !w0.is_finite() {
            return Err(Error::InvalidArgument("constant generator W0 must be non-zero".into()));
        }
        Ok(Self { w0, c0, alpha, beta })
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// `(α − W₀²/4)/(W₀x + C₀)² − (W₀x + C₀)²/4 + iW₀ + β`.
    pub fn effective(&self, x: f64) -> Result<C64> {
        let u = self.w0 * x + self.c0;
        if u.abs() < G_ZERO_THRESHOLD {
            return Err(Error::Pole { x });
        }
        let re = (self.alpha - 0.25 * self.w0 * self.w0) / (u * u) - 0.25 * u * u + self.beta;
        Ok(C64::new(re, self.w0))
    }
}

pub fn constant_w_effective(model: &ConstantWModel, x: f64) -> Result<C64> {
    model.effective(x)
}
