//! Zero-energy classical trajectory of the inverted potential, sampled on a
//! uniform grid leaving the minimum in one direction.
//!
//! Along the trajectory `(dS₀/dx)² = 2v`, so `S₀` is the running integral of
//! `√(2v)`. Points where `v` touches zero again are kinks: `√(2v)` stops being
//! analytic there and the time to reach them diverges.

use crate::exactalg::{MultiPoly, Var};
use crate::numeric::{self, QuadError};
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrajectoryError {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

type BlackBox = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// A one-dimensional potential with its minimum (value zero) at `origin`.
#[derive(Clone)]
pub struct Potential1D {
    kind: Kind,
    pub origin: f64,
}

#[derive(Clone)]
enum Kind {
    Polynomial { c0: Vec<f64>, c1: Vec<f64>, c2: Vec<f64>, text: String },
    BlackBox(BlackBox),
}

impl fmt::Debug for Potential1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Polynomial { text, .. } => write!(f, "Potential1D({text} @ {})", self.origin),
            Kind::BlackBox(_) => write!(f, "Potential1D(<fn> @ {})", self.origin),
        }
    }
}

fn deriv(c: &[f64]) -> Vec<f64> {
    c.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

impl Potential1D {
    /// Polynomial in `x`.
    pub fn polynomial(p: &MultiPoly, origin: f64) -> Result<Self, TrajectoryError> {
        let c0 = p
            .univariate_coeffs(Var::X)
            .map_err(|e| TrajectoryError::InvalidPotential(format!("expected a polynomial in x: {e}")))?;
        let c1 = deriv(&c0);
        let c2 = deriv(&c1);
        Ok(Potential1D { kind: Kind::Polynomial { c0, c1, c2, text: p.to_string() }, origin })
    }

    /// Parse a polynomial in `x`.
    pub fn parse(text: &str, origin: f64) -> Result<Self, TrajectoryError> {
        let p = MultiPoly::parse_in(text, &[Var::X])
            .map_err(|e| TrajectoryError::InvalidPotential(e.to_string()))?;
        Self::polynomial(&p, origin)
    }

    /// Black box returning `[v, v', v'']`.
    pub fn from_fn(f: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static, origin: f64) -> Self {
        Potential1D { kind: Kind::BlackBox(Arc::new(f)), origin }
    }

    /// `[v, v', v'']` at `x`.
    pub fn eval(&self, x: f64) -> [f64; 3] {
        match &self.kind {
            Kind::Polynomial { c0, c1, c2, .. } => {
                [numeric::horner(c0, x), numeric::horner(c1, x), numeric::horner(c2, x)]
            }
            Kind::BlackBox(f) => f(x),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval(x)[0]
    }

    /// Curvature at the minimum.
    pub fn curvature(&self) -> f64 {
        self.eval(self.origin)[2]
    }

    /// Polynomial text, if any.
    pub fn text(&self) -> Option<&str> {
        match &self.kind {
            Kind::Polynomial { text, .. } => Some(text),
            Kind::BlackBox(_) => None,
        }
    }

    /// Taylor coefficients of `t ↦ v(origin + sign·t)`, polynomial potentials only.
    pub fn taylor(&self, sign: f64) -> Option<Vec<f64>> {
        let Kind::Polynomial { c0, .. } = &self.kind else {
            return None;
        };
        let o = self.origin;
        let n = c0.len();
        let mut out = vec![0.0; n];
        for (j, a) in c0.iter().enumerate() {
            // a (o + s t)^j = a Σ_m C(j, m) o^{j-m} s^m t^m
            let mut binom = 1.0;
            for m in 0..=j {
                out[m] += a * binom * o.powi((j - m) as i32) * sign.powi(m as i32);
                binom = binom * (j - m) as f64 / (m + 1) as f64;
            }
        }
        Some(out)
    }

    /// `v(origin) = 0` and `v''(origin) > 0`.
    pub fn validate(&self) -> Result<(), TrajectoryError> {
        let [v, _, v2] = self.eval(self.origin);
        if !(v2 > 0.0) {
            return Err(TrajectoryError::InvalidPotential(format!("v''(origin) = {v2} is not positive")));
        }
        if v.abs() > 1e-12 * v2.max(1.0) {
            return Err(TrajectoryError::InvalidPotential(format!("v(origin) = {v} is not zero")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }
}

/// Panel rule used for `S₀` between consecutive nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quadrature {
    /// Adaptive Gauss–Kronrod per cell, split at kinks.
    Adaptive { tol: f64 },
    /// One Simpson panel per cell (fourth order, for convergence studies).
    Simpson,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature::Adaptive { tol: 1e-14 }
    }
}

/// Sampled trajectory. Node 0 is the origin; `t = |x - origin|` grows along it.
#[derive(Clone, Debug)]
pub struct TrajectoryGrid {
    pub origin: f64,
    pub direction: Direction,
    /// Uniform spacing in `t`.
    pub h: f64,
    /// Node positions `x_i = origin ± i h`.
    pub nodes: Vec<f64>,
    pub s0: Vec<f64>,
    /// `(∇S₀)² = 2v`.
    pub grad2: Vec<f64>,
    /// `d²S₀/dt²`. At a kink node the average of the one-sided limits (zero).
    pub lap_s0: Vec<f64>,
    /// `∫ dt/√(2v)` from node 1; `-∞` at the origin, `+∞` past a kink.
    pub time: Vec<f64>,
    /// Node indices flagged non-analytic.
    pub kinks: Vec<usize>,
    /// Exact kink positions (in `x`).
    pub kink_points: Vec<f64>,
    /// Taylor coefficients of `v` in `t` about the origin, when known.
    pub taylor: Option<Vec<f64>>,
}

impl TrajectoryGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `t_i = i h`.
    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// `dS₀/dt = √(2v)`.
    pub fn ds0(&self) -> Vec<f64> {
        self.grad2.iter().map(|g| g.max(0.0).sqrt()).collect()
    }

    /// Number of nodes before the first kink.
    pub fn analytic_len(&self) -> usize {
        self.kinks.first().copied().unwrap_or(self.len())
    }

    /// `√v''(origin)`, the limit of `∇²S₀` at the origin.
    pub fn curvature_root(&self) -> f64 {
        self.lap_s0[0]
    }

    /// CSV with header `x,t,s0,grad2,lap_s0,time,kink`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,t,s0,grad2,lap_s0,time,kink\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.nodes[i],
                self.t(i),
                self.s0[i],
                self.grad2[i],
                self.lap_s0[i],
                self.time[i],
                u8::from(self.kinks.contains(&i))
            ));
        }
        out
    }
}

/// Grid with `n` nodes over `t ∈ [0, extent]`, adaptive quadrature.
pub fn build_grid(v: &Potential1D, extent: f64, n: usize, dir: Direction) -> Result<TrajectoryGrid, TrajectoryError> {
    build_grid_with(v, extent, n, dir, Quadrature::default())
}

pub fn build_grid_with(
    v: &Potential1D,
    extent: f64,
    n: usize,
    dir: Direction,
    rule: Quadrature,
) -> Result<TrajectoryGrid, TrajectoryError> {
    if n < 16 {
        return Err(TrajectoryError::InvalidGrid(format!("need at least 16 nodes, got {n}")));
    }
    if !(extent > 0.0) || !extent.is_finite() {
        return Err(TrajectoryError::InvalidGrid(format!("extent must be positive, got {extent}")));
    }
    v.validate()?;
    let sgn = dir.sign();
    let h = extent / (n - 1) as f64;
    let x_of = |t: f64| v.origin + sgn * t;
    let nodes: Vec<f64> = (0..n).map(|i| x_of(i as f64 * h)).collect();
    let evals: Vec<[f64; 3]> = nodes.iter().map(|&x| v.eval(x)).collect();
    let vmax = evals.iter().fold(0.0f64, |a, e| a.max(e[0].abs())).max(1.0);
    let neg_tol = 1e-12 * vmax;
    if let Some((i, e)) = evals.iter().enumerate().find(|(_, e)| e[0] < -neg_tol) {
        return Err(TrajectoryError::InvalidPotential(format!("v({}) = {} < 0", nodes[i], e[0])));
    }

    // Kinks: interior local minima of v that touch zero.
    let dvdt = |t: f64| sgn * v.eval(x_of(t))[1];
    let mut kink_t = Vec::new();
    let mut kinks = Vec::new();
    for i in 1..n - 1 {
        if !(evals[i][0] <= evals[i - 1][0] && evals[i][0] <= evals[i + 1][0]) {
            continue;
        }
        let (mut lo, mut hi) = ((i - 1) as f64 * h, (i + 1) as f64 * h);
        if !(dvdt(lo) <= 0.0 && dvdt(hi) >= 0.0) {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if dvdt(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi.abs() {
                break;
            }
        }
        let ts = 0.5 * (lo + hi);
        let vmin = v.value(x_of(ts));
        if vmin < -neg_tol {
            return Err(TrajectoryError::InvalidPotential(format!("v({}) = {vmin} < 0", x_of(ts))));
        }
        if vmin <= 1e-10 * vmax && kink_t.last().map_or(true, |&k: &f64| (ts - k).abs() > 0.5 * h) {
            kink_t.push(ts);
            kinks.push((ts / h).round() as usize);
        }
    }

    let speed = |t: f64| (2.0 * v.value(x_of(t)).max(0.0)).sqrt();
    let mut s0 = vec![0.0; n];
    for i in 0..n - 1 {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let cell = match rule {
            Quadrature::Simpson => h / 6.0 * (speed(a) + 4.0 * speed(0.5 * (a + b)) + speed(b)),
            Quadrature::Adaptive { tol } => {
                let mut cuts = vec![a];
                cuts.extend(kink_t.iter().copied().filter(|&k| k > a && k < b));
                cuts.push(b);
                let mut acc = 0.0;
                for w in cuts.windows(2) {
                    acc += numeric::integrate(speed, w[0], w[1], tol * h, tol)?.0;
                }
                acc
            }
        };
        s0[i + 1] = s0[i] + cell;
    }

    let grad2: Vec<f64> = evals.iter().map(|e| 2.0 * e[0].max(0.0)).collect();
    let mut lap_s0: Vec<f64> = (0..n)
        .map(|i| {
            if i == 0 {
                evals[0][2].sqrt()
            } else {
                sgn * evals[i][1] / grad2[i].sqrt()
            }
        })
        .collect();
    for &k in &kinks {
        lap_s0[k] = 0.0;
    }

    let mut time = vec![f64::NEG_INFINITY; n];
    if n > 1 {
        time[1] = 0.0;
    }
    let first_kink_t = kink_t.first().copied().unwrap_or(f64::INFINITY);
    for i in 1..n - 1 {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        time[i + 1] = if b >= first_kink_t || !time[i].is_finite() {
            f64::INFINITY
        } else {
            time[i] + numeric::integrate(|t| 1.0 / speed(t), a, b, 1e-13 * h, 1e-12)?.0
        };
    }

    Ok(TrajectoryGrid {
        origin: v.origin,
        direction: dir,
        h,
        nodes,
        s0,
        grad2,
        lap_s0,
        time,
        kinks,
        kink_points: kink_t.into_iter().map(x_of).collect(),
        taylor: v.taylor(sgn).or_else(|| fitted_taylor(v, sgn, (0.25 * extent).min(0.5 / v.curvature().sqrt()))),
    })
}

/// Taylor coefficients of a black-box potential from a least-squares fit
/// at Chebyshev points of `[-τ, τ]`.
fn fitted_taylor(v: &Potential1D, sgn: f64, tau: f64) -> Option<Vec<f64>> {
    const POINTS: usize = 64;
    const DEGREE: usize = 16;
    let ts: Vec<f64> = (0..POINTS)
        .map(|j| tau * (std::f64::consts::PI * (j as f64 + 0.5) / POINTS as f64).cos())
        .collect();
    let ys: Vec<f64> = ts.iter().map(|&t| v.value(v.origin + sgn * t)).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return None;
    }
    let c = numeric::polyfit(&ts, &ys, DEGREE);
    c.iter().all(|x| x.is_finite()).then_some(c)
}

/// Independent axes of a separable potential `Σ_i v_i(q_i)`.
#[derive(Clone, Debug)]
pub struct SeparableBundle {
    pub axes: Vec<TrajectoryGrid>,
}

impl SeparableBundle {
    /// Total `E₀ = Σ_i √v_i''/2`.
    pub fn e0(&self) -> f64 {
        self.axes.iter().map(|a| 0.5 * a.curvature_root()).sum()
    }
}

/// Bundle per-axis grids; the `N`-D quantities are sums over axes.
pub fn separable_compose(axes: Vec<TrajectoryGrid>) -> Result<SeparableBundle, TrajectoryError> {
    if axes.is_empty() {
        return Err(TrajectoryError::InvalidGrid("no axes".into()));
    }
    Ok(SeparableBundle { axes })
}
