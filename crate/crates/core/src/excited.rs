//! Excited states as `Φ = χ e^{-g S}` with `χ = χ₀ + g⁻¹χ₁ + …` and
//! excitation energy `𝓔 = g𝓔₀ + 𝓔₁ + …`. `χ` obeys
//!
//! ```text
//! g ∇S·∇χ − ½∇²χ = 𝓔 χ
//! ```
//!
//! Near the minimum `χ₀ → Π q_i^{n_i}`, which fixes `𝓔₀ = Σ n_i ν_i`.
//! `𝓔₁` is the value that keeps `χ₁` free of `χ₀ ln q`.

use crate::exactalg::{int, to_f64, AlgebraError, Geometry, MultiPoly, Rational, Var};
use crate::numeric::{derivative, polyfit};
use crate::trajectory::TrajectoryGrid;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExcitedError {
    #[error("invalid excited-state spec: {0}")]
    InvalidSpec(String),
    #[error("b0 extraction did not settle under window refinement (last {last:e}, previous {previous:e})")]
    ExtractionFailure { last: f64, previous: f64 },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Oscillator frequencies `ν_i` and occupation numbers `n_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExcitedSpec {
    pub freqs: Vec<Rational>,
    pub occupation: Vec<u32>,
}

impl ExcitedSpec {
    pub fn new(freqs: Vec<Rational>, occupation: Vec<u32>) -> Result<Self, ExcitedError> {
        if freqs.is_empty() || freqs.len() != occupation.len() {
            return Err(ExcitedError::InvalidSpec(format!(
                "{} frequencies for {} occupation numbers",
                freqs.len(),
                occupation.len()
            )));
        }
        if freqs.len() > u16::MAX as usize {
            return Err(ExcitedError::InvalidSpec("too many modes".into()));
        }
        if freqs.iter().any(|f| !f.is_positive()) {
            return Err(ExcitedError::InvalidSpec("frequencies must be positive".into()));
        }
        if occupation.iter().all(|&n| n == 0) {
            return Err(ExcitedError::InvalidSpec("all occupations zero: that is the ground state".into()));
        }
        Ok(ExcitedSpec { freqs, occupation })
    }

    pub fn dim(&self) -> usize {
        self.freqs.len()
    }

    /// `q1 … qN`.
    pub fn vars(&self) -> Vec<Var> {
        (1..=self.dim()).map(|i| Var::Q(i as u16)).collect()
    }

    /// `S₀ = ½ Σ ν_i q_i²` of the harmonic reference.
    pub fn harmonic_s0(&self) -> MultiPoly {
        let vars = self.vars();
        let half = Rational::new(1.into(), 2.into());
        let mut s = MultiPoly::zero(&vars);
        for (i, nu) in self.freqs.iter().enumerate() {
            let term = MultiPoly::monomial(&vars, &[(vars[i], 2)], nu * &half).expect("own variable");
            s = &s + &term;
        }
        s
    }
}

/// `χ₀ = Π q_i^{n_i}` and `𝓔₀ = Σ n_i ν_i`.
pub fn chi0_e0(spec: &ExcitedSpec) -> (MultiPoly, Rational) {
    let vars = spec.vars();
    let powers: Vec<(Var, i32)> = vars.iter().zip(&spec.occupation).map(|(&v, &n)| (v, n as i32)).collect();
    let chi0 = MultiPoly::monomial(&vars, &powers, int(1)).expect("own variables");
    let e0 = spec.freqs.iter().zip(&spec.occupation).map(|(nu, &n)| nu * int(n as i64)).sum();
    (chi0, e0)
}

/// `χ₁ = −(χ₀/4) Σ n_i(n_i−1)/(ν_i q_i²)` for the harmonic potential, where
/// `𝓔₁ = 0`.
pub fn chi1_harmonic(spec: &ExcitedSpec) -> MultiPoly {
    let vars = spec.vars();
    let (chi0, _) = chi0_e0(spec);
    let mut chi1 = MultiPoly::zero(&vars);
    for (i, (nu, &n)) in spec.freqs.iter().zip(&spec.occupation).enumerate() {
        if n < 2 {
            continue;
        }
        let c = int(-(n as i64) * (n as i64 - 1)) / (nu * int(4));
        let term = chi0.mul_var_pow(vars[i], -2).expect("n >= 2 keeps the power non-negative").scale(&c);
        chi1 = &chi1 + &term;
    }
    chi1
}

/// `∇S₀·∇χ₀ − 𝓔₀χ₀` for the harmonic reference; identically zero.
pub fn chi0_residual(spec: &ExcitedSpec) -> Result<MultiPoly, ExcitedError> {
    let (chi0, e0) = chi0_e0(spec);
    let geom = Geometry::Normal(spec.dim() as u16);
    let lhs = MultiPoly::grad_dot(&spec.harmonic_s0(), &chi0, geom)?;
    Ok(lhs.try_sub(&chi0.scale(&e0))?)
}

/// `∇S₀·∇χ₁ − 𝓔₀χ₁ − ½∇²χ₀ − 𝓔₁χ₀` with `𝓔₁ = 0`; identically zero.
pub fn chi1_residual(spec: &ExcitedSpec) -> Result<MultiPoly, ExcitedError> {
    let (chi0, e0) = chi0_e0(spec);
    let chi1 = chi1_harmonic(spec);
    let geom = Geometry::Normal(spec.dim() as u16);
    let drift = MultiPoly::grad_dot(&spec.harmonic_s0(), &chi1, geom)?;
    let half = Rational::new(1.into(), 2.into());
    let lap = chi0.laplacian(geom)?.scale(&half);
    Ok(drift.try_sub(&chi1.scale(&e0))?.try_sub(&lap)?)
}

/// Every occupation vector sharing `𝓔₀` with `spec`, including `spec`'s
/// own, in lexicographic order. Length above one flags a degeneracy.
pub fn multiplet(spec: &ExcitedSpec) -> Vec<Vec<u32>> {
    let (_, e0) = chi0_e0(spec);
    let mut out = Vec::new();
    let mut cur = vec![0u32; spec.dim()];
    fill(&spec.freqs, 0, &e0, &mut cur, &mut out);
    out
}

fn fill(freqs: &[Rational], i: usize, left: &Rational, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if i == freqs.len() {
        if left.is_zero() {
            out.push(cur.clone());
        }
        return;
    }
    let max = (left / &freqs[i]).floor().to_integer().to_u32().unwrap_or(0);
    for n in 0..=max {
        cur[i] = n;
        let rest = left - &freqs[i] * int(n as i64);
        fill(freqs, i + 1, &rest, cur, out);
    }
    cur[i] = 0;
}

/// Exact `H_n(√(gν) q)/(2√(gν))ⁿ` truncated to its top two terms,
/// `qⁿ − n(n−1)/(4gν) q^{n−2}`, as `[qⁿ coefficient, g⁻¹ q^{n−2} coefficient]`.
pub fn hermite_top_two(n: u32, nu: &Rational) -> [Rational; 2] {
    let h = crate::exactalg::hermite(n as usize, Var::X);
    let lead = Rational::from_integer(num_bigint::BigInt::from(2).pow(n));
    let next = if n >= 2 {
        h.coefficient_of(Var::X, n as i32 - 2).ok().and_then(|p| p.as_constant()).unwrap_or_else(Rational::zero)
    } else {
        Rational::zero()
    };
    // H_n(z) = 2ⁿ zⁿ + c z^{n-2} + …, z = √(gν) q: dividing by (2√(gν))ⁿ
    // leaves qⁿ + c/(2ⁿ gν) q^{n-2}.
    let second = next / (lead.clone() * nu);
    [int(1), second]
}

/// Fit window `[x_min, 4 x_min]` and the settle tolerance on `b₀`.
const DEGREE: usize = 4;
const SETTLE: f64 = 1e-6;
const MIN_POINTS: usize = 8;

/// `𝓔₁ = −b₀` for the one-dimensional state with `χ₀ → qⁿ`.
///
/// `s1` holds `S₁` at the grid nodes. With `χ₀'/χ₀ = 𝓔₀/S₀'` the bracket
/// `(1/χ₀)(½ d² − S₁' d)χ₀` becomes
/// `½(𝓔₀² − 𝓔₀S₀'')/S₀'² − 𝓔₀S₁'/S₀'`. It is expanded in the trajectory
/// scale `q ∝ exp(ν·time)`, which is `t` to leading order and turns the
/// quadrature measure `dt/S₀'` into `d ln q / ν`; `q² × bracket` is fitted
/// by a quartic over `[x_min, 4 x_min]` and the `q²` coefficient is `b₀`.
/// `x_min` halves until two fits agree to `1e-6`.
pub fn excited_e1_numeric(grid: &TrajectoryGrid, s1: &[f64], n: u32) -> Result<f64, ExcitedError> {
    let start = 0.05 * grid.h * (grid.analytic_len() - 1) as f64;
    excited_e1_from(grid, s1, n, start)
}

/// As [`excited_e1_numeric`] with an explicit first `x_min`.
pub fn excited_e1_from(grid: &TrajectoryGrid, s1: &[f64], n: u32, x_min: f64) -> Result<f64, ExcitedError> {
    let len = grid.analytic_len().min(s1.len());
    if n == 0 {
        return Err(ExcitedError::InvalidSpec("occupation must be positive".into()));
    }
    if len < 8 * MIN_POINTS {
        return Err(ExcitedError::InvalidSpec(format!("grid has only {len} usable nodes")));
    }
    let h = grid.h;
    let nu = grid.curvature_root();
    let e0 = n as f64 * nu;
    let ds1 = derivative(&s1[..len], h, 1);
    let s0p = grid.ds0();
    let q: Vec<f64> = (0..len).map(|i| if i == 0 { 0.0 } else { h * (nu * grid.time[i]).exp() }).collect();
    let scaled = |i: usize| {
        let (p, pp) = (s0p[i], grid.lap_s0[i]);
        q[i] * q[i] * (0.5 * (e0 * e0 - e0 * pp) / (p * p) - e0 * ds1[i] / p)
    };

    let mut x_min = x_min.min(0.25 * h * (len - 1) as f64);
    let mut prev: Option<f64> = None;
    let mut before = f64::NAN;
    loop {
        let lo = (x_min / h).ceil().max(1.0) as usize;
        let hi = ((4.0 * x_min / h).floor() as usize).min(len - 1);
        if hi < lo || hi + 1 - lo < MIN_POINTS {
            let last = prev.unwrap_or(f64::NAN);
            return Err(ExcitedError::ExtractionFailure { last, previous: before });
        }
        let xs: Vec<f64> = (lo..=hi).map(|i| q[i]).collect();
        let ys: Vec<f64> = (lo..=hi).map(scaled).collect();
        let b0 = polyfit(&xs, &ys, DEGREE)[2];
        if !b0.is_finite() {
            return Err(ExcitedError::ExtractionFailure { last: b0, previous: prev.unwrap_or(f64::NAN) });
        }
        if let Some(p) = prev {
            if (b0 - p).abs() <= SETTLE {
                return Ok(-b0);
            }
        }
        before = prev.unwrap_or(f64::NAN);
        prev = Some(b0);
        x_min *= 0.5;
    }
}

/// `𝓔₀` as a float.
pub fn e0_value(spec: &ExcitedSpec) -> f64 {
    to_f64(&chi0_e0(spec).1)
}
