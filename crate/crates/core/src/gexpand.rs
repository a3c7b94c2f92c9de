//! Order-by-order `1/g` expansion of the ground state in one dimension.
//!
//! With `V = g² v` and `Φ = exp(-g S₀ - S₁ - S₂/g - …)`, each order obeys
//!
//! ```text
//! S₀' S'_{k+1} = ½ S_k'' - ½ Σ_{m=1}^{k} S_m' S'_{k+1-m} - E_k
//! ```
//!
//! and `E_k` is the value of the right-hand bracket at the origin, the only
//! choice that keeps `S'_{k+1}` finite where `S₀'` vanishes. Derivatives are
//! taken along the trajectory parameter `t`.

use crate::numeric::{cumulative, derivative, horner, polyfit};
use crate::trajectory::{SeparableBundle, TrajectoryGrid};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExpandError {
    #[error("hierarchy order must be between 1 and {max}, got {got}")]
    InvalidOrder { got: usize, max: usize },
    #[error("grid has only {0} analytic nodes before the first kink")]
    GridTooShort(usize),
    #[error("order {order}: limit at the origin did not settle ({a:e} vs {b:e})")]
    HierarchyBreakdown { order: usize, a: f64, b: f64 },
}

/// Highest supported order of the numeric hierarchy.
pub const MAX_ORDER: usize = 3;

/// How the coefficients `E_k` scale with `g` in the assembled energy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grading {
    /// `E = Σ g^{1-k} E_k`.
    InverseG,
    /// `E = Σ g^{4-2k} E_k`.
    Coulomb,
}

impl Grading {
    pub fn weight(self, g: f64, k: usize) -> f64 {
        match self {
            Grading::InverseG => g.powi(1 - k as i32),
            Grading::Coulomb => g.powi(4 - 2 * k as i32),
        }
    }
}

/// Numeric hierarchy on one trajectory grid.
#[derive(Clone, Debug)]
pub struct SeriesSolution {
    pub grading: Grading,
    /// `E_0 … E_K`.
    pub energies: Vec<f64>,
    /// `s[k-1][i] = S_k(t_i)`.
    pub s: Vec<Vec<f64>>,
    /// `ds[k-1][i] = dS_k/dt (t_i)`.
    pub ds: Vec<Vec<f64>>,
    /// `bracket[k][i]`: right-hand side of the order-`k` equation before
    /// subtracting `E_k`.
    pub bracket: Vec<Vec<f64>>,
    pub s0_prime: Vec<f64>,
    pub h: f64,
}

impl SeriesSolution {
    pub fn order(&self) -> usize {
        self.s.len()
    }

    pub fn len(&self) -> usize {
        self.s0_prime.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s0_prime.is_empty()
    }

    /// `S₀' S_k' - (bracket_{k-1} - E_{k-1})` with `S_k'` differentiated from
    /// the integrated `S_k` samples. Interior nodes only.
    pub fn pde_residual(&self, k: usize) -> Vec<f64> {
        let dk = derivative(&self.s[k - 1], self.h, 1);
        let n = self.len();
        (1..n - 1)
            .map(|i| self.s0_prime[i] * dk[i] - (self.bracket[k - 1][i] - self.energies[k - 1]))
            .collect()
    }
}

/// `E₀ = ½ ∇²S₀(origin) = ½ √v''(origin)`.
pub fn e0(grid: &TrajectoryGrid) -> f64 {
    0.5 * grid.curvature_root()
}

/// Nodes `[FIT_LO, FIT_HI)` feed the polynomial that replaces the samples
/// closest to the origin, where dividing by `S₀'` amplifies rounding.
const FIT_LO: usize = 8;
const FIT_HI: usize = 80;
const FIT_DEG: usize = 6;

/// Replace `f[0..FIT_LO]` by a least-squares polynomial through the nearby
/// samples and return the value at the origin.
fn settle_origin(f: &mut [f64], h: f64, order: usize) -> Result<f64, ExpandError> {
    let hi = FIT_HI.min(f.len());
    let xs: Vec<f64> = (FIT_LO..hi).map(|i| i as f64 * h).collect();
    let c = polyfit(&xs, &f[FIT_LO..hi], FIT_DEG);
    let c2 = polyfit(&xs, &f[FIT_LO..hi], FIT_DEG - 1);
    let (a, b) = (c[0], c2[0]);
    if !a.is_finite() || (a - b).abs() > 1e-6 * (1.0 + a.abs()) {
        return Err(ExpandError::HierarchyBreakdown { order, a, b });
    }
    for (i, v) in f.iter_mut().enumerate().take(FIT_LO) {
        *v = horner(&c, i as f64 * h);
    }
    Ok(a)
}

/// Truncation degree of the power series about the origin.
const SERIES_DEG: usize = 48;

/// Power-series solution of the hierarchy about the origin, built from the
/// Taylor coefficients of `v`. Fixes `E_k` exactly up to rounding.
struct OriginSeries {
    energies: Vec<f64>,
    /// `ds[k-1]`: coefficients of `S_k'` in `t`.
    ds: Vec<Vec<f64>>,
    /// `bracket[k]`: coefficients of the order-`k` bracket.
    bracket: Vec<Vec<f64>>,
}

mod series {
    pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = a.len().min(b.len());
        (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
    }

    pub fn sqrt(q: &[f64]) -> Vec<f64> {
        let mut w = vec![0.0; q.len()];
        w[0] = q[0].sqrt();
        for n in 1..q.len() {
            let cross: f64 = (1..n).map(|j| w[j] * w[n - j]).sum();
            w[n] = (q[n] - cross) / (2.0 * w[0]);
        }
        w
    }

    pub fn div(a: &[f64], w: &[f64]) -> Vec<f64> {
        let n = a.len().min(w.len());
        let mut out = vec![0.0; n];
        for k in 0..n {
            let acc: f64 = (1..=k).map(|j| w[j] * out[k - j]).sum();
            out[k] = (a[k] - acc) / w[0];
        }
        out
    }

    pub fn deriv(a: &[f64]) -> Vec<f64> {
        a.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect()
    }

    /// Largest magnitude of the last few terms at `t`, a proxy for the
    /// truncation error.
    pub fn tail(a: &[f64], t: f64) -> f64 {
        let n = a.len();
        (n.saturating_sub(4)..n).map(|j| (a[j] * t.powi(j as i32)).abs()).fold(0.0, f64::max)
    }
}

fn origin_series(vt: &[f64], order: usize) -> OriginSeries {
    let d = SERIES_DEG;
    // 2v = t² q(t), S₀' = t √q
    let q: Vec<f64> = (0..=d).map(|j| 2.0 * vt.get(j + 2).copied().unwrap_or(0.0)).collect();
    let w = series::sqrt(&q);
    let mut s0p = vec![0.0];
    s0p.extend(&w);
    let lap = series::deriv(&s0p);
    let mut bracket = vec![lap.iter().map(|c| 0.5 * c).collect::<Vec<f64>>()];
    let mut energies = vec![bracket[0][0]];
    let mut ds: Vec<Vec<f64>> = Vec::new();
    for k in 0..order {
        // (b_k - E_k) / (t w)
        let shifted: Vec<f64> = bracket[k][1..].to_vec();
        ds.push(series::div(&shifted, &w));
        let kk = k + 1;
        let mut b: Vec<f64> = series::deriv(&ds[kk - 1]).iter().map(|c| 0.5 * c).collect();
        for m in 1..=kk {
            let p = series::mul(&ds[m - 1], &ds[kk - m]);
            b.truncate(p.len());
            for (bj, pj) in b.iter_mut().zip(&p) {
                *bj -= 0.5 * pj;
            }
        }
        energies.push(b[0]);
        bracket.push(b);
    }
    OriginSeries { energies, ds, bracket }
}

/// Nodes where every series in `os` is converged to rounding.
fn series_reach(os: &OriginSeries, h: f64, n: usize) -> usize {
    let mut i = 0;
    while i + 1 < n / 2 {
        let t = (i + 1) as f64 * h;
        let ok = os.ds.iter().chain(&os.bracket).all(|a| {
            let v = horner(a, t);
            series::tail(a, t) <= 1e-14 * (1.0 + v.abs())
        });
        if !ok {
            break;
        }
        i += 1;
    }
    i + 1
}

/// `S_1 … S_K` and `E_0 … E_K` on the analytic part of the grid.
///
/// With a polynomial potential the hierarchy is solved as a power series
/// near the origin, which fixes `E_k` and replaces the grid values where
/// the series has converged. Otherwise the samples nearest the origin are
/// replaced by a local least-squares fit.
pub fn hierarchy(grid: &TrajectoryGrid, order: usize) -> Result<SeriesSolution, ExpandError> {
    if order < 1 || order > MAX_ORDER {
        return Err(ExpandError::InvalidOrder { got: order, max: MAX_ORDER });
    }
    let n = grid.analytic_len();
    if n < 16 {
        return Err(ExpandError::GridTooShort(n));
    }
    let h = grid.h;
    let s0p: Vec<f64> = grid.ds0()[..n].to_vec();
    let lap: Vec<f64> = grid.lap_s0[..n].to_vec();
    let os = grid.taylor.as_ref().map(|vt| origin_series(vt, order));
    let reach = os.as_ref().map(|os| series_reach(os, h, n)).unwrap_or(0);
    let use_series = reach > FIT_LO;

    let mut energies = vec![e0(grid)];
    let mut bracket = vec![lap.iter().map(|l| 0.5 * l).collect::<Vec<_>>()];
    let mut s: Vec<Vec<f64>> = Vec::new();
    let mut ds: Vec<Vec<f64>> = Vec::new();

    for k in 0..order {
        let ek = energies[k];
        let mut f = vec![0.0; n];
        for i in 1..n {
            f[i] = (bracket[k][i] - ek) / s0p[i];
        }
        match &os {
            Some(os) if use_series => {
                for (i, fi) in f.iter_mut().enumerate().take(reach) {
                    *fi = horner(&os.ds[k], i as f64 * h);
                }
            }
            _ => {
                settle_origin(&mut f, h, k + 1)?;
            }
        }
        s.push(cumulative(&f, h, 0));
        ds.push(f);

        // bracket_{k+1} = ½ S''_{k+1} - ½ Σ_{m=1}^{k+1} S_m' S'_{k+2-m}
        let kk = k + 1;
        let d2 = derivative(&ds[kk - 1], h, 1);
        let mut b = vec![0.0; n];
        for i in 0..n {
            let mut cross = 0.0;
            for m in 1..=kk {
                cross += ds[m - 1][i] * ds[kk - m][i];
            }
            b[i] = 0.5 * d2[i] - 0.5 * cross;
        }
        let e = match &os {
            Some(os) if use_series => {
                for (i, bi) in b.iter_mut().enumerate().take(reach) {
                    *bi = horner(&os.bracket[kk], i as f64 * h);
                }
                os.energies[kk]
            }
            _ => settle_origin(&mut b, h, kk)?,
        };
        bracket.push(b);
        energies.push(e);
    }

    Ok(SeriesSolution { grading: Grading::InverseG, energies, s, ds, bracket, s0_prime: s0p, h })
}

/// Per-axis hierarchies of a separable potential; energies add.
#[derive(Clone, Debug)]
pub struct SeparableSeries {
    pub axes: Vec<SeriesSolution>,
    pub energies: Vec<f64>,
}

pub fn hierarchy_separable(bundle: &SeparableBundle, order: usize) -> Result<SeparableSeries, ExpandError> {
    let axes: Vec<SeriesSolution> = bundle.axes.iter().map(|g| hierarchy(g, order)).collect::<Result<_, _>>()?;
    let energies = (0..=order).map(|k| axes.iter().map(|a| a.energies[k]).sum()).collect();
    Ok(SeparableSeries { axes, energies })
}

/// `Σ_k w_k(g) E_k` with the solution's grading.
pub fn assemble_energy(sol: &SeriesSolution, g: f64) -> f64 {
    assemble(&sol.energies, sol.grading, g)
}

pub fn assemble(energies: &[f64], grading: Grading, g: f64) -> f64 {
    energies.iter().enumerate().map(|(k, e)| grading.weight(g, k) * e).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{build_grid, Direction, Potential1D};

    #[test]
    fn harmonic_hierarchy_vanishes() {
        let v = Potential1D::parse("2 * x^2", 0.0).unwrap();
        let g = build_grid(&v, 2.0, 401, Direction::Plus).unwrap();
        let sol = hierarchy(&g, 3).unwrap();
        assert!((sol.energies[0] - 1.0).abs() < 1e-14);
        for k in 1..=3 {
            assert!(sol.energies[k].abs() < 1e-10);
            assert!(sol.s[k - 1].iter().all(|x| x.abs() < 1e-10));
        }
    }

    #[test]
    fn order_bounds() {
        let v = Potential1D::parse("x^2", 0.0).unwrap();
        let g = build_grid(&v, 1.0, 64, Direction::Plus).unwrap();
        assert!(matches!(hierarchy(&g, 0), Err(ExpandError::InvalidOrder { .. })));
        assert!(matches!(hierarchy(&g, 4), Err(ExpandError::InvalidOrder { .. })));
    }

    #[test]
    fn assembled_weights() {
        assert_eq!(assemble(&[0.5, 0.25, 2.0], Grading::InverseG, 2.0), 0.5 * 2.0 + 0.25 + 1.0);
    }
}
