//! Dense complex eigenvalue kernels: diagonal balancing, Householder
//! reduction to upper Hessenberg form, single-shift complex QR on the
//! Hessenberg matrix, and inverse iteration for selected eigenvectors.

use num_complex::Complex64 as C64;

use crate::matrix::CMatrix;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Parlett–Reinsch scaling by powers of two. Overwrites `a` with
/// `D⁻¹ A D` and returns the diagonal of `D`.
pub(crate) fn balance(a: &mut CMatrix) -> Vec<f64> {
    const RADIX: f64 = 2.0;
    const SQRDX: f64 = RADIX * RADIX;
    let n = a.rows();
    let mut scale = vec![1.0; n];
    loop {
        let mut changed = false;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += cabs1(a[(j, i)]);
                    r += cabs1(a[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= SQRDX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= SQRDX;
            }
            if (c + r) / f < 0.95 * s {
                changed = true;
                scale[i] *= f;
                let inv = 1.0 / f;
                for z in a.row_mut(i) {
                    *z *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if !changed {
            return scale;
        }
    }
}

/// Hermitian reflector `P = I − β u uᴴ` acting on indices `offset..`.
#[derive(Debug, Clone)]
pub(crate) struct Reflector {
    offset: usize,
    u: Vec<C64>,
    beta: f64,
}

impl Reflector {
    pub fn apply(&self, y: &mut [C64]) {
        let tail = &mut y[self.offset..];
        let s: C64 = self.u.iter().zip(tail.iter()).map(|(u, y)| u.conj() * y).sum();
        let s = s * self.beta;
        for (y, u) in tail.iter_mut().zip(&self.u) {
            *y -= u * s;
        }
    }
}

/// Reduces `a` in place to upper Hessenberg form `Qᴴ A Q`. Columns whose
/// entries below the subdiagonal are already zero are left untouched,
/// so a tridiagonal input costs O(n²).
pub(crate) fn hessenberg(a: &mut CMatrix) -> Vec<Reflector> {
    let n = a.rows();
    let mut reflectors = Vec::new();
    let mut s = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let alpha = a[(k + 1, k)];
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        let phase = if alpha.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            alpha / alpha.norm()
        };
        let mut u: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        u[0] += phase * xnorm;
        let beta = 2.0 / u.iter().map(|z| z.norm_sqr()).sum::<f64>();

        // left: rows k+1.., columns k..
        s[k..].iter_mut().for_each(|z| *z = ZERO);
        for (i, ui) in u.iter().enumerate() {
            let cu = ui.conj();
            for (sj, aij) in s[k..].iter_mut().zip(&a.row(k + 1 + i)[k..]) {
                *sj += cu * aij;
            }
        }
        for (i, ui) in u.iter().enumerate() {
            let f = ui * beta;
            for (aij, sj) in a.row_mut(k + 1 + i)[k..].iter_mut().zip(&s[k..]) {
                *aij -= f * sj;
            }
        }
        // right: all rows, columns k+1..
        for r in 0..n {
            let row = &mut a.row_mut(r)[k + 1..];
            let t: C64 = row.iter().zip(&u).map(|(x, u)| x * u).sum::<C64>() * beta;
            for (x, u) in row.iter_mut().zip(&u) {
                *x -= t * u.conj();
            }
        }
        a[(k + 1, k)] = -phase * xnorm;
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
        reflectors.push(Reflector { offset: k + 1, u, beta });
    }
    reflectors
}

/// `y ← Q y` for the `Q` accumulated by [`hessenberg`].
pub(crate) fn apply_q(reflectors: &[Reflector], y: &mut [C64]) {
    for r in reflectors.iter().rev() {
        r.apply(y);
    }
}

/// Complex Givens rotation `G = [[c, s], [−s̄, c]]` with real `c`, such
/// that `G [x; y] = [r; 0]`.
#[inline]
fn givens(x: C64, y: C64) -> (f64, C64, C64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO, x);
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay, C64::new(ay, 0.0));
    }
    let norm = ax.hypot(ay);
    let phase = x / ax;
    (ax / norm, phase * y.conj() / norm, phase * norm)
}

#[derive(Debug)]
pub(crate) struct QrFailure {
    /// Eigenvalues that did converge (rows `unconverged_upto+1..n`).
    pub found: Vec<C64>,
}

/// All eigenvalues of an upper Hessenberg matrix by single-shift complex
/// QR with Wilkinson shifts and Ahues–Tisseur deflation. `h` is destroyed.
/// Returned in deflation order (bottom-up).
pub(crate) fn hessenberg_eigenvalues(h: &mut CMatrix) -> Result<Vec<C64>, QrFailure> {
    let n = h.rows();
    let mut w = vec![ZERO; n];
    if n == 0 {
        return Ok(w);
    }
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let itmax = 30 * n.max(10);
    let cols = n;
    let data = h.as_mut_slice();
    let at = |i: usize, j: usize| i * cols + j;

    let mut i = n - 1;
    loop {
        let mut l = 0;
        let mut converged = false;
        for its in 0..=itmax {
            // look for a single small subdiagonal
            let mut k = i;
            while k > l {
                let sub = cabs1(data[at(k, k - 1)]);
                if sub <= smlnum {
                    break;
                }
                let mut tst = cabs1(data[at(k - 1, k - 1)]) + cabs1(data[at(k, k)]);
                if tst == 0.0 {
                    if k >= l + 2 {
                        tst += cabs1(data[at(k - 1, k - 2)]);
                    }
                    if k < i {
                        tst += cabs1(data[at(k + 1, k)]);
                    }
                }
                if sub <= ulp * tst {
                    let up = cabs1(data[at(k - 1, k)]);
                    let ab = sub.max(up);
                    let ba = sub.min(up);
                    let d1 = cabs1(data[at(k, k)]);
                    let d2 = cabs1(data[at(k - 1, k - 1)] - data[at(k, k)]);
                    let aa = d1.max(d2);
                    let bb = d1.min(d2);
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > 0 {
                data[at(l, l - 1)] = ZERO;
            }
            if l >= i {
                converged = true;
                break;
            }

            let shift = if its > 0 && its % 20 == 10 {
                data[at(l, l)] + 0.75 * data[at(l + 1, l)].re.abs()
            } else if its > 0 && its % 20 == 0 {
                data[at(i, i)] + 0.75 * data[at(i, i - 1)].re.abs()
            } else {
                wilkinson_shift(
                    data[at(i - 1, i - 1)],
                    data[at(i - 1, i)],
                    data[at(i, i - 1)],
                    data[at(i, i)],
                )
            };

            // implicit single-shift sweep over the active window l..=i
            let mut x = data[at(l, l)] - shift;
            let mut y = data[at(l + 1, l)];
            for k in l..i {
                let (c, s, r) = givens(x, y);
                let sc = s.conj();
                if k > l {
                    data[at(k, k - 1)] = r;
                    data[at(k + 1, k - 1)] = ZERO;
                }
                {
                    let (top, bottom) = data.split_at_mut(at(k + 1, 0));
                    let row_k = &mut top[at(k, k)..at(k, i + 1)];
                    let row_k1 = &mut bottom[k..=i];
                    for (a, b) in row_k.iter_mut().zip(row_k1.iter_mut()) {
                        let (av, bv) = (*a, *b);
                        *a = c * av + s * bv;
                        *b = c * bv - sc * av;
                    }
                }
                for r in l..=(k + 2).min(i) {
                    let p = at(r, k);
                    let (av, bv) = (data[p], data[p + 1]);
                    data[p] = c * av + sc * bv;
                    data[p + 1] = c * bv - s * av;
                }
                if k + 1 < i {
                    x = data[at(k + 1, k)];
                    y = data[at(k + 2, k)];
                }
            }
        }
        if !converged {
            let found = w[i + 1..].to_vec();
            return Err(QrFailure { found });
        }
        w[i] = data[at(i, i)];
        if i == 0 {
            return Ok(w);
        }
        i -= 1;
    }
}

/// Eigenvalue of the trailing 2×2 block `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let u = b.sqrt() * c.sqrt();
    let mut s = cabs1(u);
    if s == 0.0 {
        return d;
    }
    let x = 0.5 * (a - d);
    let sx = cabs1(x);
    s = s.max(sx);
    let xs = x / s;
    let us = u / s;
    let mut y = s * (xs * xs + us * us).sqrt();
    if sx > 0.0 {
        let xn = x / sx;
        if xn.re * y.re + xn.im * y.im < 0.0 {
            y = -y;
        }
    }
    d - u * (u / (x + y))
}

/// LU factors of `H − λI` for upper Hessenberg `H`, pivoting only between
/// adjacent rows.
pub(crate) struct HessenbergLu {
    u: CMatrix,
    swapped: Vec<bool>,
    mult: Vec<C64>,
}

impl HessenbergLu {
    pub(crate) fn new(h: &CMatrix, lambda: C64, tiny: f64) -> Self {
        let n = h.rows();
        let mut u = h.clone();
        for k in 0..n {
            u[(k, k)] -= lambda;
        }
        let mut swapped = vec![false; n.saturating_sub(1)];
        let mut mult = vec![ZERO; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(1) {
            if u[(k + 1, k)].norm() > u[(k, k)].norm() {
                let (top, bottom) = u.as_mut_slice().split_at_mut((k + 1) * n);
                top[k * n + k..(k + 1) * n].swap_with_slice(&mut bottom[k..n]);
                swapped[k] = true;
            }
            if u[(k, k)].norm() == 0.0 {
                u[(k, k)] = C64::new(tiny, 0.0);
            }
            let m = u[(k + 1, k)] / u[(k, k)];
            mult[k] = m;
            u[(k + 1, k)] = ZERO;
            if m != ZERO {
                let (top, bottom) = u.as_mut_slice().split_at_mut((k + 1) * n);
                let pivot_row = &top[k * n + k + 1..(k + 1) * n];
                for (b, p) in bottom[k + 1..n].iter_mut().zip(pivot_row) {
                    *b -= m * p;
                }
            }
        }
        if n > 0 && u[(n - 1, n - 1)].norm() == 0.0 {
            u[(n - 1, n - 1)] = C64::new(tiny, 0.0);
        }
        Self { u, swapped, mult }
    }

    pub(crate) fn solve_in_place(&self, b: &mut [C64]) {
        let n = b.len();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                b.swap(k, k + 1);
            }
            let t = b[k];
            b[k + 1] -= self.mult[k] * t;
        }
        for k in (0..n).rev() {
            let row = self.u.row(k);
            let s: C64 = row[k + 1..].iter().zip(&b[k + 1..]).map(|(a, x)| a * x).sum();
            b[k] = (b[k] - s) / row[k];
        }
    }
}

/// Deterministic, non-degenerate start vector for inverse iteration.
pub(crate) fn start_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let re = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let im = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            C64::new(1.0 + re, im)
        })
        .collect()
}
