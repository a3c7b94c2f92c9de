//! Shared floating-point kernels: quadrature, finite-difference stencils,
//! interpolation and cumulative integration on uniform grids.

use std::collections::BinaryHeap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("adaptive quadrature on [{a}, {b}] did not converge (error estimate {err:e})")]
    NoConvergence { a: f64, b: f64, err: f64 },
    #[error("non-finite integrand at x = {0}")]
    NonFinite(f64),
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// 8-point Gauss–Legendre nodes and weights on [-1, 1].
pub const GL8: [(f64, f64); 8] = [
    (-0.9602898564975363, 0.1012285362903763),
    (-0.7966664774136267, 0.2223810344533745),
    (-0.5255324099163290, 0.3137066458778873),
    (-0.1834346424956498, 0.3626837833783620),
    (0.1834346424956498, 0.3626837833783620),
    (0.5255324099163290, 0.3137066458778873),
    (0.7966664774136267, 0.2223810344533745),
    (0.9602898564975363, 0.1012285362903763),
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return Err(QuadError::NonFinite(c));
    }
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        if !f1.is_finite() {
            return Err(QuadError::NonFinite(c - dx));
        }
        if !f2.is_finite() {
            return Err(QuadError::NonFinite(c + dx));
        }
        k += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature.
///
/// Returns `(value, error estimate)`; stops when the estimate falls below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<(f64, f64), QuadError> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(&f, a, b)?;
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, val: v, err: e });
    let (mut total, mut err) = (v, e);
    for _ in 0..2000 {
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, err));
        }
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m)?;
        let (v2, e2) = gk15(&f, m, p.b)?;
        total += v1 + v2 - p.val;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, val: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, val: v2, err: e2 });
    }
    // Re-sum to shed accumulated rounding before the final verdict.
    let total: f64 = heap.iter().map(|p| p.val).sum();
    let err: f64 = heap.iter().map(|p| p.err).sum();
    if err <= abs_tol.max(rel_tol * total.abs()) {
        Ok((total, err))
    } else {
        Err(QuadError::NoConvergence { a, b, err })
    }
}

/// Finite-difference weights (Fornberg) for derivatives `0..=m` at `x0`.
///
/// `out[k][j]` multiplies `f(nodes[j])` in the `k`-th derivative.
pub fn fd_weights(x0: f64, nodes: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Lagrange interpolation weights at `x` for the given nodes.
pub fn lagrange_weights(x: f64, nodes: &[f64]) -> Vec<f64> {
    fd_weights(x, nodes, 0).swap_remove(0)
}

/// Width of the stencils used by [`derivative`] (sixth order).
pub const STENCIL: usize = 7;

fn window(i: usize, n: usize, w: usize) -> usize {
    let half = w / 2;
    i.saturating_sub(half).min(n.saturating_sub(w))
}

/// `order`-th derivative of samples on a uniform grid with spacing `h`.
///
/// Centered seven-point stencils in the interior, shifted ones near the ends.
pub fn derivative(values: &[f64], h: f64, order: usize) -> Vec<f64> {
    let n = values.len();
    let w = STENCIL.min(n);
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; w];
    (0..n)
        .map(|i| {
            let s = window(i, n, w);
            let off = i - s;
            let wts = cache[off].get_or_insert_with(|| {
                let nodes: Vec<f64> = (0..w).map(|j| j as f64).collect();
                fd_weights(off as f64, &nodes, order).swap_remove(order)
            });
            let scale = h.powi(order as i32);
            wts.iter().zip(&values[s..s + w]).map(|(a, b)| a * b).sum::<f64>() / scale
        })
        .collect()
}

/// Value at `x0` of the polynomial through the first `k` samples at
/// `x_j = x_1 + (j-1) h` (samples indexed from 1, the origin excluded).
pub fn extrapolate_to_origin(samples: &[f64], h: f64, k: usize) -> f64 {
    let nodes: Vec<f64> = (1..=k).map(|j| j as f64 * h).collect();
    let w = lagrange_weights(0.0, &nodes);
    w.iter().zip(samples).map(|(a, b)| a * b).sum()
}

const CUM_W: usize = 6;

fn cell_weights() -> Vec<Vec<f64>> {
    let nodes: Vec<f64> = (0..CUM_W).map(|j| j as f64).collect();
    (0..CUM_W - 1)
        .map(|off| {
            let mut acc = vec![0.0; CUM_W];
            for &(t, wt) in &GL8 {
                let x = off as f64 + 0.5 * (t + 1.0);
                for (a, l) in acc.iter_mut().zip(lagrange_weights(x, &nodes)) {
                    *a += 0.5 * wt * l;
                }
            }
            acc
        })
        .collect()
}

/// Running integral `∫_{x_start}^{x_i}` of uniform samples, fifth-degree
/// local interpolation per cell. Entries before `start` integrate backwards
/// (so they carry the sign of `x_i - x_start`).
pub fn cumulative(values: &[f64], h: f64, start: usize) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let w = CUM_W.min(n);
    let cw = if w == CUM_W { cell_weights() } else { Vec::new() };
    let cell = |i: usize| -> f64 {
        if w < CUM_W {
            // Too few points for the high-order rule: trapezoid.
            return 0.5 * h * (values[i] + values[i + 1]);
        }
        let s = i.saturating_sub(2).min(n - CUM_W);
        cw[i - s].iter().zip(&values[s..s + CUM_W]).map(|(a, b)| a * b).sum::<f64>() * h
    };
    for i in start..n - 1 {
        out[i + 1] = out[i] + cell(i);
    }
    for i in (0..start).rev() {
        out[i] = out[i + 1] - cell(i);
    }
    out
}

/// Least-squares polynomial fit; returns coefficients in powers of `x`.
pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Vec<f64> {
    let m = xs.len();
    let scale = xs.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(f64::MIN_POSITIVE);
    let a = nalgebra::DMatrix::from_fn(m, degree + 1, |i, j| (xs[i] / scale).powi(j as i32));
    let b = nalgebra::DVector::from_column_slice(ys);
    let sol = a.svd(true, true).solve(&b, 1e-14).expect("svd solve");
    (0..=degree).map(|j| sol[j] / scale.powi(j as i32)).collect()
}

/// Horner evaluation of `Σ c_k x^k`.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
