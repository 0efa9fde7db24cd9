//! Riccati equation `F′ = F² − Q(x)` by Dormand–Prince 5(4).

use serde::Serialize;

use crate::error::{Error, Result};

pub const BLOW_UP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy)]
pub struct RiccatiOptions {
    pub rtol: f64,
    pub atol: f64,
    pub blow_up: f64,
    pub max_steps: usize,
}

impl Default for RiccatiOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            blow_up: BLOW_UP_THRESHOLD,
            max_steps: 1_000_000,
        }
    }
}

/// Samples of `F` at the requested abscissae. When `blow_up` is set the
/// samples stop before the first point that could not be reached.
#[derive(Debug, Clone, Serialize)]
pub struct RiccatiSolution {
    pub xs: Vec<f64>,
    pub f: Vec<f64>,
    pub blow_up: Option<f64>,
}

impl RiccatiSolution {
    pub fn is_complete(&self) -> bool {
        self.blow_up.is_none()
    }
}

// Dormand–Prince tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `F′ = F² − Q` from `(x0, f0)` through the points `xs`, which
/// must be monotone and all on one side of `x0`.
pub fn integrate_riccati<Q>(
    q: Q,
    x0: f64,
    f0: f64,
    xs: &[f64],
    opts: &RiccatiOptions,
) -> Result<RiccatiSolution>
where
    Q: Fn(f64) -> Result<f64>,
{
    let forward = xs.iter().find(|&&x| x != x0).is_none_or(|&x| x > x0);
    let ordered = xs.windows(2).all(|w| if forward { w[1] >= w[0] } else { w[1] <= w[0] });
    let same_side = xs.iter().all(|&x| if forward { x >= x0 } else { x <= x0 });
    if !ordered || !same_side {
        return Err(Error::InvalidArgument(
            "Riccati output points must be monotone and on one side of x0".into(),
        ));
    }
    let dir = if forward { 1.0 } else { -1.0 };
    let rhs = |x: f64, f: f64| -> Result<f64> { Ok(f * f - q(x)?) };

    let mut out = RiccatiSolution {
        xs: Vec::with_capacity(xs.len()),
        f: Vec::with_capacity(xs.len()),
        blow_up: None,
    };
    let mut x = x0;
    let mut f = f0;
    let mut h = 1e-3 * dir;
    let mut steps = 0;
    let mut k = [0.0; 7];
    k[0] = rhs(x, f)?;

    for &target in xs {
        while (target - x) * dir > 0.0 {
            if steps >= opts.max_steps {
                out.blow_up = Some(x);
                return Ok(out);
            }
            steps += 1;
            let last = (target - x).abs() <= h.abs();
            let step = if last { target - x } else { h };
            for s in 1..7 {
                let fs = f + step * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
                k[s] = rhs(x + C[s] * step, fs)?;
            }
            let f5 = f + step * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
            let f4 = f + step * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
            let sc = opts.atol + opts.rtol * f.abs().max(f5.abs());
            let err = if f5.is_finite() {
                ((f5 - f4) / sc).abs()
            } else {
                f64::INFINITY
            };
            if err <= 1.0 {
                x = if last { target } else { x + step };
                f = f5;
                k[0] = k[6];
                if f.abs() > opts.blow_up {
                    out.blow_up = Some(x);
                    return Ok(out);
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !last || err > 1.0 {
                h = step * factor;
            }
            if h.abs() < 1e-14 * x.abs().max(1.0) {
                out.blow_up = Some(x);
                return Ok(out);
            }
        }
        out.xs.push(target);
        out.f.push(f);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
    }

    #[test]
    fn zero_q_zero_start_stays_zero() {
        let xs = grid(0.0, 5.0, 50);
        let s = integrate_riccati(|_| Ok(0.0), 0.0, 0.0, &xs, &RiccatiOptions::default()).unwrap();
        assert!(s.is_complete());
        assert!(s.f.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn unit_q_gives_minus_tanh() {
        // F = −tanh x: F² − F′ = tanh² x + sech² x = 1
        let xs = grid(0.0, 4.0, 40);
        let s = integrate_riccati(|_| Ok(1.0), 0.0, 0.0, &xs, &RiccatiOptions::default()).unwrap();
        for (x, f) in s.xs.iter().zip(&s.f) {
            assert!((f + x.tanh()).abs() < 1e-10, "x={x}: {f}");
        }
        let back = grid(-4.0, 0.0, 40).into_iter().rev().collect::<Vec<_>>();
        let s = integrate_riccati(|_| Ok(1.0), 0.0, 0.0, &back, &RiccatiOptions::default()).unwrap();
        for (x, f) in s.xs.iter().zip(&s.f) {
            assert!((f + x.tanh()).abs() < 1e-10);
        }
    }

    #[test]
    fn blow_up_is_flagged() {
        // Q = −1, F(0) = 0: F = tan x, singular at π/2
        let xs = grid(0.0, 3.0, 30);
        let s = integrate_riccati(|_| Ok(-1.0), 0.0, 0.0, &xs, &RiccatiOptions::default()).unwrap();
        let at = s.blow_up.expect("tan x must blow up");
        assert!((at - std::f64::consts::FRAC_PI_2).abs() < 1e-3, "{at}");
        assert!(s.xs.iter().all(|&x| x < std::f64::consts::FRAC_PI_2));
        assert!(s.xs.len() < xs.len());
    }

    #[test]
    fn rejects_unordered_points() {
        let r = integrate_riccati(|_| Ok(0.0), 0.0, 0.0, &[1.0, 0.5], &RiccatiOptions::default());
        assert!(r.is_err());
        let r = integrate_riccati(|_| Ok(0.0), 0.0, 0.0, &[-1.0, 1.0], &RiccatiOptions::default());
        assert!(r.is_err());
    }
}
