//! Brute-force eigenvalues of `−½ d²/dx² + V` by second-order finite
//! differences with Dirichlet walls.
//!
//! The symmetric tridiagonal matrix is diagonalized by bisection on Sturm
//! sequences. Each solve runs on `n` and `2n + 1` interior points (the
//! spacing halves exactly) and Richardson-extrapolates the `O(h²)` error.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigenfunction {index} has edge amplitude {ratio:e} of its maximum; widen the domain")]
    DomainTooSmall { index: usize, ratio: f64 },
}

/// Edge amplitude above this fraction of the maximum means the walls bite.
const EDGE_TOL: f64 = 1e-8;

/// Lowest eigenvalues with a discretization error estimate for each.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenResult {
    /// Richardson-extrapolated values, ascending.
    pub eigenvalues: Vec<f64>,
    /// `|extrapolated − fine-grid|`.
    pub error_estimates: Vec<f64>,
    /// Values on the `n`-point grid.
    pub coarse: Vec<f64>,
    /// Values on the `2n+1`-point grid.
    pub fine: Vec<f64>,
    pub domain: (f64, f64),
    pub points: usize,
}

/// Symmetric tridiagonal matrix: `diag[i]` and `off[i]` between `i`, `i+1`.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiagonal {
    /// `−½ d²/dx² + V` on interior nodes `x_i = a + i h`, `i = 1..=n`.
    pub fn schrodinger(v: impl Fn(f64) -> f64, a: f64, h: f64, n: usize) -> Self {
        let k = 1.0 / (h * h);
        Tridiagonal {
            diag: (1..=n).map(|i| k + v(a + i as f64 * h)).collect(),
            off: vec![-0.5 * k; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues below `x` (negative pivots of `A − x`).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let b2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let r = |i: usize| {
            (if i > 0 { self.off[i - 1].abs() } else { 0.0 }) + (if i + 1 < n { self.off[i].abs() } else { 0.0 })
        };
        let lo = (0..n).map(|i| self.diag[i] - r(i)).fold(f64::INFINITY, f64::min);
        let hi = (0..n).map(|i| self.diag[i] + r(i)).fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// The `j`-th smallest eigenvalue (0-based), bisected until the bracket
    /// is below `1e-12` relative or cannot shrink further.
    pub fn eigenvalue(&self, j: usize) -> f64 {
        let (mut lo, mut hi) = self.bounds();
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-12 * mid.abs().max(1.0) {
                return mid;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    /// Eigenvector for an eigenvalue estimate by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda - 1e-10 * lambda.abs().max(1.0);
        let mut x = vec![1.0; n];
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Thomas algorithm for `(A − s) y = b`.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0] - s;
        for i in 0..n {
            if i > 0 {
                piv = self.diag[i] - s - self.off[i - 1] * c[i - 1];
            }
            if piv == 0.0 {
                piv = f64::EPSILON;
            }
            c[i] = if i + 1 < n { self.off[i] / piv } else { 0.0 };
            d[i] = (b[i] - if i > 0 { self.off[i - 1] * d[i - 1] } else { 0.0 }) / piv;
        }
        let mut y = d;
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }
}

fn edge_check(m: &Tridiagonal, lambda: f64, index: usize, left_wall: bool) -> Result<(), OracleError> {
    let x = m.eigenvector(lambda);
    let max = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut edge = x[x.len() - 1].abs();
    if left_wall {
        edge = edge.max(x[0].abs());
    }
    let ratio = edge / max;
    if ratio > EDGE_TOL {
        return Err(OracleError::DomainTooSmall { index, ratio });
    }
    Ok(())
}

fn richardson(
    v: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    n: usize,
    k: usize,
    left_wall: bool,
) -> Result<EigenResult, OracleError> {
    let coarse_m = Tridiagonal::schrodinger(v, a, (b - a) / (n + 1) as f64, n);
    let fine_m = Tridiagonal::schrodinger(v, a, (b - a) / (2 * n + 2) as f64, 2 * n + 1);
    let coarse: Vec<f64> = (0..k).map(|j| coarse_m.eigenvalue(j)).collect();
    let fine: Vec<f64> = (0..k).map(|j| fine_m.eigenvalue(j)).collect();
    for (j, &l) in fine.iter().enumerate() {
        edge_check(&fine_m, l, j, left_wall)?;
    }
    let eigenvalues: Vec<f64> = fine.iter().zip(&coarse).map(|(f, c)| (4.0 * f - c) / 3.0).collect();
    let error_estimates = eigenvalues.iter().zip(&fine).map(|(e, f)| (e - f).abs().max(f64::MIN_POSITIVE)).collect();
    Ok(EigenResult { eigenvalues, error_estimates, coarse, fine, domain: (a, b), points: n })
}

/// Lowest `k` eigenvalues of `−½ d²/dx² + V(x)` on `[a, b]` with `n`
/// interior points (and `2n + 1` for the extrapolation).
pub fn solve_1d(v: impl Fn(f64) -> f64, domain: (f64, f64), n: usize, k: usize) -> Result<EigenResult, OracleError> {
    let (a, b) = domain;
    if n < 200 || !(b > a) || k == 0 || k > n {
        return Err(OracleError::InvalidInput("need n >= 200, a < b and 1 <= k <= n".into()));
    }
    richardson(&v, a, b, n, k, true)
}

/// Ground state of the radial `l = 0` problem `−½u'' + (−g²/r + εU(r))u`
/// on `(0, r_max]` with `u(0) = 0` imposed at a ghost node.
pub fn solve_radial(g: f64, u: impl Fn(f64) -> f64, eps: f64, r_max: f64, n: usize) -> Result<EigenResult, OracleError> {
    if n < 200 || !(r_max > 0.0) || !(g > 0.0) {
        return Err(OracleError::InvalidInput("need n >= 200, r_max > 0 and g > 0".into()));
    }
    let v = move |r: f64| -g * g / r + eps * u(r);
    richardson(&v, 0.0, r_max, n, 1, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_on_diagonal() {
        let m = Tridiagonal { diag: vec![1.0, 2.0, 3.0], off: vec![0.0, 0.0] };
        assert_eq!(m.count_below(2.5), 2);
        assert!((m.eigenvalue(1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_by_two() {
        let m = Tridiagonal { diag: vec![2.0, 2.0], off: vec![1.0] };
        assert!((m.eigenvalue(0) - 1.0).abs() < 1e-12);
        assert!((m.eigenvalue(1) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_ladder() {
        let r = solve_1d(|x| 0.5 * x * x, (-10.0, 10.0), 1000, 3).unwrap();
        for (j, e) in r.eigenvalues.iter().enumerate() {
            assert!((e - (j as f64 + 0.5)).abs() < 1e-6, "{j}: {e}");
        }
    }

    #[test]
    fn narrow_box_is_rejected() {
        let r = solve_1d(|x| 0.5 * x * x, (-2.0, 2.0), 400, 1);
        assert!(matches!(r, Err(OracleError::DomainTooSmall { .. })));
    }

    #[test]
    fn hydrogen_ground_state() {
        let r = solve_radial(1.0, |_| 0.0, 0.0, 40.0, 4000).unwrap();
        assert!((r.eigenvalues[0] + 0.5).abs() < 1e-6, "{r:?}");
    }
}
