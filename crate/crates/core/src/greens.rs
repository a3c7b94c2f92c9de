//! One-dimensional single-trajectory Green's operators.
//!
//! A [`WaveProfile`] samples an exponent `S(x)` and a function `f(x)` on a
//! uniform grid over `[-L, L]` with a node at the origin, where `S(0) = 0`.
//!
//! * `C`: `(Cf)(x) = g⁻¹ ∫₀ˣ f / S' dy`, so that `g S' (Cf)' = f`.
//! * `D̄`: `(D̄f)(x) = −2 ∫₀ˣ e^{2gS(y)} dy ∫_{−∞}^y e^{−2gS(z)} f(z) dz`.
//! * `T = −½ d²/dx²`.
//!
//! The inner integral of `D̄` is carried in scaled form, `e^{2gS(y)}` times
//! the integral from the nearer infinity, so that nothing overflows or
//! cancels. When `∫ e^{−2gS} f ≠ 0` the right half picks up the homogeneous
//! growing mode `B(x) = −2∫₀ˣ e^{2gS}`, kept separately in [`DbarParts`].

use crate::numeric::{self, GL8};
use crate::trajectory::{Direction, TrajectoryGrid};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GreensError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("f(0) = {0:e} is nonzero, so Cf diverges at the origin")]
    DivergentAtOrigin(f64),
    #[error("e^(-2gS) does not decay at the {0} end of the grid")]
    TailDivergence(&'static str),
    #[error("degenerate profile: weight integral {0:e}")]
    DegenerateProfile(f64),
    #[error(transparent)]
    Quadrature(#[from] numeric::QuadError),
}

/// Half-width `max(6/√g, 6)` of the default grid.
pub fn default_extent(g: f64) -> f64 {
    (6.0 / g.sqrt()).max(6.0)
}

/// Largest admissible `e^{−2gS}` at either end of the grid.
const END_DECAY: f64 = 1e-12;
/// `|f(0)|` below this fraction of `max|f|` counts as zero in `C`.
const ORIGIN_TOL: f64 = 1e-9;
/// `|∫e^{−2gS}f|` below this fraction of `∫e^{−2gS}|f|` counts as balanced.
const BALANCE_TOL: f64 = 1e-10;
/// Nodes each one-sided part of `D̄f` extends past the origin.
const PAD: usize = 8;
const INTERP: usize = 6;

/// Samples of `S` and of a function `f` on a symmetric uniform grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveProfile {
    pub nodes: Vec<f64>,
    /// `S` itself; operators take `g` separately.
    pub s: Vec<f64>,
    pub ds: Vec<f64>,
    pub d2s: Vec<f64>,
    pub values: Vec<f64>,
}

impl WaveProfile {
    /// `n` (odd) nodes on `[-extent, extent]`; `s` returns `[S, S', S'']`.
    pub fn sample(
        extent: f64,
        n: usize,
        s: impl Fn(f64) -> [f64; 3],
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GreensError> {
        if n < 2 * INTERP + 1 || n % 2 == 0 || !(extent > 0.0) {
            return Err(GreensError::InvalidProfile(format!("need odd n >= {} and extent > 0", 2 * INTERP + 1)));
        }
        let i0 = n / 2;
        let h = extent / i0 as f64;
        let nodes: Vec<f64> = (0..n).map(|i| (i as f64 - i0 as f64) * h).collect();
        let sd: Vec<[f64; 3]> = nodes.iter().map(|&x| s(x)).collect();
        let p = WaveProfile {
            values: nodes.iter().map(|&x| f(x)).collect(),
            s: sd.iter().map(|v| v[0]).collect(),
            ds: sd.iter().map(|v| v[1]).collect(),
            d2s: sd.iter().map(|v| v[2]).collect(),
            nodes,
        };
        p.validate()?;
        Ok(p)
    }

    /// The harmonic exponent `S = x²/2`.
    pub fn harmonic(extent: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self, GreensError> {
        Self::sample(extent, n, |x| [0.5 * x * x, x, 1.0], f)
    }

    /// Profile from sampled `S` only; derivatives by finite differences.
    pub fn from_samples(nodes: Vec<f64>, s: Vec<f64>, values: Vec<f64>) -> Result<Self, GreensError> {
        let n = nodes.len();
        if s.len() != n || values.len() != n || n < 2 * INTERP + 1 || n % 2 == 0 {
            return Err(GreensError::InvalidProfile("length mismatch or even length".into()));
        }
        let h = (nodes[n - 1] - nodes[0]) / (n - 1) as f64;
        if nodes.iter().enumerate().any(|(i, &x)| (x - nodes[0] - i as f64 * h).abs() > 1e-9 * h) {
            return Err(GreensError::InvalidProfile("nodes are not uniform".into()));
        }
        let ds = numeric::derivative(&s, h, 1);
        let d2s = numeric::derivative(&s, h, 2);
        let p = WaveProfile { nodes, s, ds, d2s, values };
        p.validate()?;
        Ok(p)
    }

    /// Full-line profile from the two trajectory halves leaving one minimum;
    /// `S = S₀` and `x` is measured from the origin.
    pub fn from_trajectories(
        left: &TrajectoryGrid,
        right: &TrajectoryGrid,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GreensError> {
        let m = right.len();
        if left.direction != Direction::Minus || right.direction != Direction::Plus {
            return Err(GreensError::InvalidProfile("expected a minus and a plus trajectory".into()));
        }
        if left.len() != m || (left.h - right.h).abs() > 1e-14 * right.h || left.origin != right.origin {
            return Err(GreensError::InvalidProfile("trajectory halves do not match".into()));
        }
        if !left.kinks.is_empty() || !right.kinks.is_empty() {
            return Err(GreensError::InvalidProfile("trajectory crosses a kink".into()));
        }
        let mut p = WaveProfile { nodes: vec![], s: vec![], ds: vec![], d2s: vec![], values: vec![] };
        let slope = |g: &TrajectoryGrid, i: usize| g.grad2[i].max(0.0).sqrt();
        for i in (1..m).rev() {
            p.nodes.push(-right.t(i));
            p.s.push(left.s0[i]);
            p.ds.push(-slope(left, i));
            p.d2s.push(left.lap_s0[i]);
        }
        for i in 0..m {
            p.nodes.push(right.t(i));
            p.s.push(right.s0[i]);
            p.ds.push(slope(right, i));
            p.d2s.push(right.lap_s0[i]);
        }
        p.values = p.nodes.iter().map(|&x| f(right.origin + x)).collect();
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), GreensError> {
        let i0 = self.origin();
        if self.nodes[i0].abs() > 1e-12 * self.h() || self.s[i0].abs() > 1e-12 {
            return Err(GreensError::InvalidProfile("S(0) must vanish at the central node".into()));
        }
        if self.s.iter().chain(&self.ds).chain(&self.d2s).any(|v| !v.is_finite()) {
            return Err(GreensError::InvalidProfile("non-finite S data".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.nodes[1] - self.nodes[0]
    }

    /// Index of `x = 0`.
    pub fn origin(&self) -> usize {
        self.nodes.len() / 2
    }

    /// Same grid and `S`, new samples.
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), self.len(), "sample count");
        WaveProfile { values, ..self.clone() }
    }

    /// Same grid and `S`, `f` sampled at the nodes.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        self.with_values(self.nodes.iter().map(|&x| f(x)).collect())
    }
}

/// Gauss points of one cell `[x_i, x_{i+1}]` as weights on the six
/// neighbouring nodes, for each position of the cell inside the stencil.
struct CellRule {
    weights: Vec<Vec<[f64; INTERP]>>,
}

impl CellRule {
    fn new() -> Self {
        let nodes: Vec<f64> = (0..INTERP).map(|j| j as f64).collect();
        let weights = (0..INTERP - 1)
            .map(|off| {
                GL8.iter()
                    .map(|&(t, _)| {
                        let w = numeric::lagrange_weights(off as f64 + 0.5 * (t + 1.0), &nodes);
                        std::array::from_fn(|j| w[j])
                    })
                    .collect()
            })
            .collect();
        CellRule { weights }
    }

    /// `∫_{x_i}^{x_{i+1}} e^{σ(S(z) − s_ref)} f(z) dz` with `S`, `f`
    /// interpolated by quintics.
    fn integrate(&self, s: &[f64], f: Option<&[f64]>, h: f64, i: usize, sigma: f64, s_ref: f64) -> f64 {
        let st = i.saturating_sub(2).min(s.len() - INTERP);
        let mut acc = 0.0;
        for (w, &(_, wt)) in self.weights[i - st].iter().zip(&GL8) {
            let sq: f64 = (0..INTERP).map(|j| w[j] * s[st + j]).sum();
            let fq: f64 = f.map_or(1.0, |f| (0..INTERP).map(|j| w[j] * f[st + j]).sum());
            acc += wt * (sigma * (sq - s_ref)).exp() * fq;
        }
        0.5 * h * acc
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().filter(|x| x.is_finite()).fold(0.0, |a, x| a.max(x.abs()))
}

/// `g⁻¹ ∫₀ˣ f/S'` with the removable origin value of `f/S'` taken as the
/// mean of the two one-sided extrapolations.
fn c_integral(f: &[f64], ds: &[f64], h: f64, i0: usize, g: f64, tol: f64) -> Result<Vec<f64>, GreensError> {
    if f[i0].abs() > tol {
        return Err(GreensError::DivergentAtOrigin(f[i0]));
    }
    let n = f.len();
    let mut ratio: Vec<f64> = (0..n).map(|i| if i == i0 { 0.0 } else { f[i] / ds[i] }).collect();
    let k = INTERP.min(i0).min(n - 1 - i0);
    let right: Vec<f64> = (1..=k).map(|j| ratio[i0 + j]).collect();
    let left: Vec<f64> = (1..=k).map(|j| ratio[i0 - j]).collect();
    ratio[i0] = 0.5 * (numeric::extrapolate_to_origin(&right, h, k) + numeric::extrapolate_to_origin(&left, h, k));
    Ok(numeric::cumulative(&ratio, h, i0).into_iter().map(|c| c / g).collect())
}

/// `Cf`. Fails when `f(0) ≠ 0`, where `f/S'` has a pole.
pub fn apply_c(f: &WaveProfile, g: f64) -> Result<WaveProfile, GreensError> {
    let tol = ORIGIN_TOL * max_abs(&f.values);
    let out = c_integral(&f.values, &f.ds, f.h(), f.origin(), g, tol)?;
    Ok(f.with_values(out))
}

/// `Tf = −½ f''` by sixth-order finite differences.
pub fn apply_t(f: &WaveProfile) -> WaveProfile {
    let d2 = numeric::derivative(&f.values, f.h(), 2);
    f.with_values(d2.into_iter().map(|d| -0.5 * d).collect())
}

/// `D̄f` split into its regular parts and the growing mode.
#[derive(Clone, Debug)]
pub struct DbarParts {
    pub value: WaveProfile,
    /// `∫ e^{−2gS} f dx`, set to exactly zero when it is below rounding.
    pub total: f64,
    /// `B(x) = −2∫₀ˣ e^{2gS}`, annihilated by `1 + CT`.
    pub growth: Vec<f64>,
    /// `D̄f`, bounded on the left half.
    pub left: Vec<f64>,
    /// `D̄f − total·B`, bounded on the right half.
    pub right: Vec<f64>,
}

/// Lagrange extrapolation of samples beyond one end of the grid through
/// nine nodes spread over the outer half of that side.
struct EndFit {
    xs: Vec<f64>,
    s: Vec<f64>,
    f: Vec<f64>,
}

impl EndFit {
    fn new(p: &WaveProfile, at_left: bool) -> Self {
        let n = p.len();
        let stride = (p.origin() / 16).max(1);
        let idx: Vec<usize> = (0..9).map(|k| if at_left { k * stride } else { n - 1 - k * stride }).collect();
        EndFit {
            xs: idx.iter().map(|&i| p.nodes[i]).collect(),
            s: idx.iter().map(|&i| p.s[i]).collect(),
            f: idx.iter().map(|&i| p.values[i]).collect(),
        }
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let w = numeric::lagrange_weights(x, &self.xs);
        let dot = |v: &[f64]| w.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
        (dot(&self.s), dot(&self.f))
    }
}

/// `e^{2gS(x_e)} ∫` of `e^{−2gS} f` from the end node `x_e` out to infinity.
fn tail(p: &WaveProfile, g: f64, at_left: bool) -> Result<f64, GreensError> {
    let side = if at_left { "left" } else { "right" };
    let end = if at_left { 0 } else { p.len() - 1 };
    let (xe, se) = (p.nodes[end], p.s[end]);
    let outward = if at_left { -1.0 } else { 1.0 };
    if (-2.0 * g * se).exp() > END_DECAY || outward * p.ds[end] <= 0.0 {
        return Err(GreensError::TailDivergence(side));
    }
    let fit = EndFit::new(p, at_left);
    let mut w = p.h();
    while 2.0 * g * (fit.eval(xe + outward * w).0 - se) < 60.0 {
        w *= 2.0;
        if w > 64.0 * xe.abs() {
            return Err(GreensError::TailDivergence(side));
        }
    }
    let scale = max_abs(&fit.f).max(f64::MIN_POSITIVE);
    let (v, _) = numeric::integrate(
        |t| {
            let (s, f) = fit.eval(xe + outward * t);
            (-2.0 * g * (s - se)).exp() * f
        },
        0.0,
        w,
        1e-16 * scale,
        1e-13,
    )?;
    Ok(v)
}

/// All parts of `D̄f`.
pub fn dbar_parts(f: &WaveProfile, g: f64) -> Result<DbarParts, GreensError> {
    let n = f.len();
    let i0 = f.origin();
    let h = f.h();
    let s = &f.s;
    let rule = CellRule::new();
    let sigma = -2.0 * g;

    // Scaled inner integrals: lo[i] = e^{2gS_i} ∫_{−∞}^{x_i}, hi[i] = e^{2gS_i} ∫_{x_i}^{∞}.
    let mut lo = vec![0.0; n];
    let mut hi = vec![0.0; n];
    lo[0] = tail(f, g, true)?;
    for i in 0..i0 {
        lo[i + 1] = (sigma * (s[i] - s[i + 1])).exp() * lo[i] + rule.integrate(s, Some(&f.values), h, i, sigma, s[i + 1]);
    }
    hi[n - 1] = tail(f, g, false)?;
    for i in (i0..n - 1).rev() {
        hi[i] = (sigma * (s[i + 1] - s[i])).exp() * hi[i + 1] + rule.integrate(s, Some(&f.values), h, i, sigma, s[i]);
    }
    let mut total = lo[i0] + hi[i0];
    let weight: f64 = (0..n).map(|i| (sigma * s[i]).exp() * f.values[i].abs()).sum::<f64>() * h;
    if total.abs() <= BALANCE_TOL * weight {
        total = 0.0;
    }
    let pad = PAD.min(i0);
    for i in i0 + 1..=i0 + pad {
        lo[i] = total * (-sigma * s[i]).exp() - hi[i];
    }
    for i in i0 - pad..i0 {
        hi[i] = total * (-sigma * s[i]).exp() - lo[i];
    }

    let left_part: Vec<f64> = numeric::cumulative(&lo[..=i0 + pad], h, i0).into_iter().map(|c| -2.0 * c).collect();
    let right_part: Vec<f64> = numeric::cumulative(&hi[i0 - pad..], h, pad).into_iter().map(|c| 2.0 * c).collect();
    let e2: Vec<f64> = s.iter().map(|&v| (-sigma * v).exp()).collect();
    let growth: Vec<f64> = numeric::cumulative(&e2, h, i0).into_iter().map(|c| -2.0 * c).collect();
    let mode = |i: usize| if total == 0.0 { 0.0 } else { total * growth[i] };

    let value: Vec<f64> = (0..n).map(|i| if i <= i0 { left_part[i] } else { right_part[i - (i0 - pad)] + mode(i) }).collect();
    let left: Vec<f64> = (0..n).map(|i| if i <= i0 + pad { left_part[i] } else { value[i] }).collect();
    let right: Vec<f64> = (0..n).map(|i| if i >= i0 - pad { right_part[i - (i0 - pad)] } else { value[i] - mode(i) }).collect();
    Ok(DbarParts { value: f.with_values(value), total, growth, left, right })
}

/// `D̄f`.
pub fn apply_dbar(f: &WaveProfile, g: f64) -> Result<WaveProfile, GreensError> {
    Ok(dbar_parts(f, g)?.value)
}

/// Irregular solution `F(x) = e^{−gS(x)} ∫₀ˣ e^{2gS(y)} dy` on the whole grid.
///
/// Computed as `e^{gS} M` with `M = e^{−2gS} ∫₀ˣ e^{2gS}` recurred outward,
/// which only ever multiplies by decaying factors.
pub fn irregular_solution(p: &WaveProfile, g: f64) -> WaveProfile {
    let n = p.len();
    let i0 = p.origin();
    let h = p.h();
    let s = &p.s;
    let rule = CellRule::new();
    let sigma = 2.0 * g;
    let mut m = vec![0.0; n];
    for i in i0..n - 1 {
        m[i + 1] = (-sigma * (s[i + 1] - s[i])).exp() * m[i] + rule.integrate(s, None, h, i, sigma, s[i + 1]);
    }
    for i in (0..i0).rev() {
        m[i] = (-sigma * (s[i] - s[i + 1])).exp() * m[i + 1] - rule.integrate(s, None, h, i, sigma, s[i]);
    }
    p.with_values((0..n).map(|i| (g * s[i]).exp() * m[i]).collect())
}

/// `(S|D|S̄)` for nodes `i` (at `S`) and `j` (at `S̄`) in Wronskian form,
/// `2[e^{−gS} F(S̄) − F(S) e^{−gS̄}] h_S(S̄) θ(S − S̄)` with `h_S = 1/S'`.
pub fn d_kernel(p: &WaveProfile, irregular: &WaveProfile, g: f64, i: usize, j: usize) -> f64 {
    if p.s[i] < p.s[j] {
        return 0.0;
    }
    let (f, s) = (&irregular.values, &p.s);
    2.0 * ((-g * s[i]).exp() * f[j] - f[i] * (-g * s[j]).exp()) / p.ds[j]
}

/// Energy shift `Δ = ∫e^{−2gS−τ} U / ∫e^{−2gS−τ}`.
pub fn shift_from_boundary(u: &WaveProfile, tau: &WaveProfile, g: f64) -> Result<f64, GreensError> {
    if u.nodes != tau.nodes || u.s != tau.s {
        return Err(GreensError::InvalidProfile("U and τ live on different profiles".into()));
    }
    let w: Vec<f64> = (0..u.len()).map(|i| (-2.0 * g * u.s[i] - tau.values[i]).exp()).collect();
    // Trapezoid: spectrally accurate for integrands that vanish at both ends.
    let den: f64 = w.iter().sum::<f64>() * u.h();
    let num: f64 = w.iter().zip(&u.values).map(|(a, b)| a * b).sum::<f64>() * u.h();
    if !(den.is_finite() && den > 0.0) || !num.is_finite() {
        return Err(GreensError::DegenerateProfile(den));
    }
    Ok(num / den)
}

/// Outcome of one numerical identity check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub grid_size: usize,
    pub max_residual: f64,
}

impl IdentityReport {
    fn new(identity: impl Into<String>, grid_size: usize, max_residual: f64) -> Self {
        IdentityReport { identity: identity.into(), grid_size, max_residual }
    }
}

fn max_dev(a: impl Iterator<Item = f64>) -> f64 {
    a.fold(0.0, |m, v| if v.is_nan() { f64::INFINITY } else { m.max(v.abs()) })
}

/// `D̄H_l(√g x) = (H_l(√g x) − H_l(0)) / (lg)` on the harmonic profile.
pub fn check_dbar_hermite(l: usize, g: f64, extent: f64, n: usize) -> Result<IdentityReport, GreensError> {
    let c = crate::exactalg::hermite(l, crate::exactalg::Var::X).univariate_coeffs(crate::exactalg::Var::X).expect("univariate");
    let hl = |x: f64| numeric::horner(&c, g.sqrt() * x);
    let p = WaveProfile::harmonic(extent, n, hl)?;
    let d = apply_dbar(&p, g)?;
    let h0 = hl(0.0);
    let res = max_dev(p.nodes.iter().zip(&d.values).map(|(&x, v)| v - (hl(x) - h0) / (l as f64 * g)));
    Ok(IdentityReport::new(format!("Dbar H_{l} = (H_{l} - H_{l}(0))/(lg)"), n, res))
}

/// `(1 + CT) D̄f = Cf`, each half checked on its bounded part.
pub fn check_one_plus_ct(f: &WaveProfile, g: f64) -> Result<IdentityReport, GreensError> {
    let parts = dbar_parts(f, g)?;
    let cf = apply_c(f, g)?.values;
    let (i0, h, n) = (f.origin(), f.h(), f.len());
    let mut res: f64 = 0.0;
    for (a, range) in [(&parts.left, 0..i0 + 1), (&parts.right, i0..n)] {
        let ta: Vec<f64> = numeric::derivative(a, h, 2).into_iter().map(|d| -0.5 * d).collect();
        let local = max_abs(&ta[range.clone()]);
        let cta = c_integral(&ta, &f.ds, h, i0, g, 1e-6 * local.max(1.0))?;
        res = res.max(max_dev(range.map(|i| a[i] + cta[i] - cf[i])));
    }
    Ok(IdentityReport::new("(1 + CT) Dbar f = C f", n, res))
}

/// `(1 + CT) B = 0` for the growing mode, relative to `|B|`.
pub fn check_growth_mode(p: &WaveProfile, g: f64) -> Result<IdentityReport, GreensError> {
    let parts = dbar_parts(&p.map(|_| 0.0), g)?;
    let b = &parts.growth;
    let (i0, h) = (p.origin(), p.h());
    let tb: Vec<f64> = numeric::derivative(b, h, 2).into_iter().map(|d| -0.5 * d).collect();
    let ctb = c_integral(&tb, &p.ds, h, i0, g, 1e-6 * max_abs(&tb[i0 - 1..=i0 + 1]).max(1.0))?;
    let res = max_dev((0..p.len()).map(|i| (b[i] + ctb[i]) / b[i].abs().max(1.0)));
    Ok(IdentityReport::new("(1 + CT) B = 0, relative", p.len(), res))
}

/// `(T + V − E)(e^{−gS} D̄f) = e^{−gS} f` with `V − E = g²S'²/2 − gS''/2`,
/// at interior nodes.
pub fn check_green_residual(f: &WaveProfile, g: f64) -> Result<IdentityReport, GreensError> {
    let parts = dbar_parts(f, g)?;
    let (i0, h, n) = (f.origin(), f.h(), f.len());
    let phi: Vec<f64> = f.s.iter().map(|&s| (-g * s).exp()).collect();
    let edge = numeric::STENCIL / 2;
    let mut res: f64 = 0.0;
    for (a, range) in [(&parts.left, edge..i0 + 1), (&parts.right, i0..n - edge)] {
        let w: Vec<f64> = phi.iter().zip(a).map(|(p, v)| p * v).collect();
        let d2 = numeric::derivative(&w, h, 2);
        res = res.max(max_dev(range.map(|i| {
            let vme = 0.5 * g * g * f.ds[i] * f.ds[i] - 0.5 * g * f.d2s[i];
            -0.5 * d2[i] + vme * w[i] - phi[i] * f.values[i]
        })));
    }
    Ok(IdentityReport::new("(T + V - E) e^{-gS} Dbar f = e^{-gS} f", n, res))
}

/// `g S' (Cf)' = f` at interior nodes, relative to `max|f|`.
pub fn check_c_inverse(f: &WaveProfile, g: f64) -> Result<IdentityReport, GreensError> {
    let cf = apply_c(f, g)?;
    let d = numeric::derivative(&cf.values, f.h(), 1);
    let edge = numeric::STENCIL / 2;
    let scale = max_abs(&f.values).max(f64::MIN_POSITIVE);
    let res = max_dev((edge..f.len() - edge).map(|i| (g * f.ds[i] * d[i] - f.values[i]) / scale));
    Ok(IdentityReport::new("g S' (Cf)' = f, relative", f.len(), res))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_on_even_and_odd_monomials() {
        let g = 1.7;
        let p = WaveProfile::harmonic(4.0, 801, |x| x.powi(4)).unwrap();
        let c = apply_c(&p, g).unwrap();
        for (x, v) in p.nodes.iter().zip(&c.values) {
            assert!((v - x.powi(4) / (4.0 * g)).abs() < 1e-8);
        }
        let c = apply_c(&p.map(|x| x.powi(3)), g).unwrap();
        for (x, v) in p.nodes.iter().zip(&c.values) {
            assert!((v - x.powi(3) / (3.0 * g)).abs() < 1e-8);
        }
    }

    #[test]
    fn c_rejects_constant() {
        let p = WaveProfile::harmonic(4.0, 101, |_| 1.0).unwrap();
        assert!(matches!(apply_c(&p, 1.0), Err(GreensError::DivergentAtOrigin(_))));
    }

    #[test]
    fn zero_maps_to_zero() {
        let p = WaveProfile::harmonic(6.0, 201, |_| 0.0).unwrap();
        assert!(apply_c(&p, 1.0).unwrap().values.iter().all(|&v| v == 0.0));
        assert!(apply_dbar(&p, 1.0).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dbar_h2() {
        let r = check_dbar_hermite(2, 1.0, 8.0, 2001).unwrap();
        assert!(r.max_residual < 1e-7, "{r:?}");
    }

    #[test]
    fn short_grid_is_rejected() {
        let p = WaveProfile::harmonic(2.0, 101, |x| x * x).unwrap();
        assert!(matches!(apply_dbar(&p, 1.0), Err(GreensError::TailDivergence("left"))));
    }

    #[test]
    fn irregular_vanishes_at_origin() {
        let p = WaveProfile::harmonic(6.0, 201, |_| 0.0).unwrap();
        let f = irregular_solution(&p, 1.0);
        assert_eq!(f.values[p.origin()], 0.0);
    }

    #[test]
    fn shift_of_a_constant() {
        let p = WaveProfile::harmonic(6.0, 201, |_| 2.5).unwrap();
        let tau = p.map(|_| 0.0);
        assert!((shift_from_boundary(&p, &tau, 1.0).unwrap() - 2.5).abs() < 1e-14);
    }
}
