//! Perturbed Coulomb ground state, `H = −½∇² − g²/r + εU`, solved order by
//! order along the radial trajectory.
//!
//! `S = g²r + S₁ + g⁻²S₂ + … + g^{−(2n−2)}S_n + …` and
//! `E = −g⁴/2 + g²E₁ + E₂ + … + g^{−(2n−4)}E_n + …`. With `S₀ = r` every
//! order is a first-order equation in `r`:
//!
//! ```text
//! ∂S_n/∂r = K_n − E_n
//! K_n = −½ Σ_{m=1}^{n−1} ∇S_m·∇S_{n−m} + ½∇²S_{n−1} − δ_{n1}/r + δ_{n2} εU
//! ```
//!
//! `E_n` is the angular average of the `r⁰` part of `K_n`, so `∂S_n/∂r`
//! has no isotropic part at the origin. An `r⁻¹` term in `K_n` or a
//! negative power of `r` in `S_n` is reported as a breakdown.

use crate::exactalg::{rat, AlgebraError, Geometry, MultiPoly, Var};
use crate::numeric::{self, QuadError};
use thiserror::Error;

const S_VARS: [Var; 3] = [Var::R, Var::U, Var::Eps];
const E_VARS: [Var; 1] = [Var::Eps];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoulombError {
    #[error("invalid perturbation: {0}")]
    InvalidPotential(String),
    #[error("order must be at least {0}")]
    InvalidOrder(usize),
    #[error("order {n}: {source}")]
    Breakdown { n: usize, source: AlgebraError },
    #[error("S_{n} has a negative power of r: {term}")]
    Singular { n: usize, term: String },
    #[error("order {n} breaks the ε-grading: {detail}")]
    Grading { n: usize, detail: String },
    #[error("radial quadrature did not decay by r = {0}")]
    DomainTooSmall(f64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// `S₀…S_N` and `E₀…E_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoulombSolution {
    /// `U` over `[r, u]`.
    pub potential: MultiPoly,
    /// Over `[r, u, ε]`.
    pub s_terms: Vec<MultiPoly>,
    /// Over `[ε]`.
    pub e_terms: Vec<MultiPoly>,
}

fn check_potential(u: &MultiPoly) -> Result<MultiPoly, CoulombError> {
    let u = u
        .with_vars(&[Var::R, Var::U])
        .map_err(|_| CoulombError::InvalidPotential("U may depend on r and u = cos a only".into()))?;
    if u.degree_range(Var::R).is_some_and(|(lo, _)| lo < 0) {
        return Err(CoulombError::InvalidPotential("U must be regular at r = 0".into()));
    }
    if !u.coefficient_of(Var::R, 0)?.is_zero() {
        return Err(CoulombError::InvalidPotential("U(0) must vanish".into()));
    }
    Ok(u)
}

/// Run the recursion to order `order` for any polynomial `U(r, u)`.
pub fn solve(u: &MultiPoly, order: usize) -> Result<CoulombSolution, CoulombError> {
    let potential = check_potential(u)?;
    let geom = Geometry::RadialPolar;
    let eps_u = potential.with_vars(&S_VARS)?.mul_var_pow(Var::Eps, 1)?;
    let inv_r = MultiPoly::monomial(&S_VARS, &[(Var::R, -1)], rat(1, 1))?;
    let mut s = vec![MultiPoly::var(&S_VARS, Var::R)?];
    let mut e = vec![MultiPoly::constant(&E_VARS, rat(-1, 2))];
    let half = rat(1, 2);
    for n in 1..=order {
        let mut k = s[n - 1].laplacian(geom)?.scale(&half);
        for m in 1..n {
            k = &k - &MultiPoly::grad_dot(&s[m], &s[n - m], geom)?.scale(&half);
        }
        if n == 1 {
            k = &k - &inv_r;
        }
        if n == 2 {
            k = &k + &eps_u;
        }
        let en = k.coefficient_of(Var::R, 0)?.angular_average();
        let sn = (&k - &en).integrate_r().map_err(|source| CoulombError::Breakdown { n, source })?;
        if let Some((lo, _)) = sn.degree_range(Var::R) {
            if lo < 0 {
                return Err(CoulombError::Singular { n, term: sn.coefficient_of(Var::R, lo)?.to_string() });
            }
        }
        e.push(en.with_vars(&E_VARS)?);
        s.push(sn);
    }
    let sol = CoulombSolution { potential, s_terms: s, e_terms: e };
    sol.check_grading()?;
    Ok(sol)
}

/// Isotropic `U(r)` with `U(0) = 0`.
pub fn solve_isotropic(u: &MultiPoly, order: usize) -> Result<CoulombSolution, CoulombError> {
    if u.has_var(Var::U) && u.degree_range(Var::U).is_some_and(|r| r != (0, 0)) {
        return Err(CoulombError::InvalidPotential("isotropic U must not depend on u".into()));
    }
    solve(u, order)
}

/// Stark perturbation `εr cos a`.
pub fn solve_stark(order: usize) -> Result<CoulombSolution, CoulombError> {
    if order < 2 {
        return Err(CoulombError::InvalidOrder(2));
    }
    solve(&MultiPoly::parse_in("r*u", &[Var::R, Var::U])?, order)
}

fn ginv_pow(p: &MultiPoly, vars: &[Var], k: i32) -> Result<MultiPoly, AlgebraError> {
    p.with_vars(vars)?.mul_var_pow(Var::GInv, k)
}

/// Exact numeric value of a polynomial in `ε` alone.
fn eval_eps(p: &MultiPoly, eps: f64) -> f64 {
    p.eval_named(&[(Var::Eps, eps)])
}

impl CoulombSolution {
    pub fn order(&self) -> usize {
        self.s_terms.len() - 1
    }

    pub fn is_isotropic(&self) -> bool {
        !self.s_terms.iter().any(|s| s.degree_range(Var::U).is_some_and(|r| r != (0, 0)))
    }

    /// `r`-degree `l` when every term of `U` has the same power of `r`.
    fn homogeneous_degree(&self) -> Option<i32> {
        match self.potential.degree_range(Var::R)? {
            (lo, hi) if lo == hi => Some(lo),
            _ => None,
        }
    }

    /// For `U` homogeneous of degree `l` in `r`, a term `ε^k r^j` of `S_n`
    /// has `j = (l+2)k + 1 − n`, and `E_n` carries `ε^k` only for
    /// `n = (l+2)k`.
    pub fn check_grading(&self) -> Result<(), CoulombError> {
        let Some(l) = self.homogeneous_degree() else {
            return Ok(());
        };
        for (n, s) in self.s_terms.iter().enumerate() {
            for (e, c) in s.terms() {
                let (j, k) = (e[0], e[2]);
                if j != (l + 2) * k + 1 - n as i32 {
                    return Err(CoulombError::Grading { n, detail: format!("term {c} r^{j} ε^{k} in S_{n}") });
                }
            }
        }
        for (n, en) in self.e_terms.iter().enumerate() {
            for (e, _) in en.terms() {
                if (l + 2) * e[0] != n as i32 {
                    return Err(CoulombError::Grading { n, detail: format!("ε^{} in E_{n}", e[0]) });
                }
            }
        }
        Ok(())
    }

    /// `Σ_{n=2}^{N} ĝ^{2n−4} E_n`, the energy beyond `−g⁴/2`, over `[ε, ĝ]`.
    /// `E₁` always vanishes; a nonzero one is reported as a breakdown.
    pub fn energy_correction(&self, truncation: usize) -> Result<MultiPoly, CoulombError> {
        let vars = [Var::Eps, Var::GInv];
        if self.e_terms.get(1).is_some_and(|e| !e.is_zero()) {
            return Err(CoulombError::Grading { n: 1, detail: "E_1 must vanish".into() });
        }
        let mut acc = MultiPoly::zero(&vars);
        for n in 2..=truncation.min(self.order()) {
            acc = &acc + &ginv_pow(&self.e_terms[n], &vars, 2 * n as i32 - 4)?;
        }
        Ok(acc)
    }

    /// `Σ_{n=1}^{N} ĝ^{2n−2} S_n`, the exponent beyond `g²r`, over `[r, u, ε, ĝ]`.
    pub fn exponent_correction(&self, truncation: usize) -> Result<MultiPoly, CoulombError> {
        let vars = [Var::R, Var::U, Var::Eps, Var::GInv];
        let mut acc = MultiPoly::zero(&vars);
        for n in 1..=truncation.min(self.order()) {
            acc = &acc + &ginv_pow(&self.s_terms[n], &vars, 2 * n as i32 - 2)?;
        }
        Ok(acc)
    }

    /// Rendering `-1/2 * g^4 + …` of the truncated energy.
    pub fn energy_text(&self, truncation: usize) -> Result<String, CoulombError> {
        let c = self.energy_correction(truncation)?;
        Ok(if c.is_zero() { "-1/2 * g^4".into() } else { format!("-1/2 * g^4 + {c}").replace("+ -", "- ") })
    }

    /// `E = Σ_{n≤N} g^{4−2n} E_n(ε)`.
    pub fn energy(&self, g: f64, eps: f64, truncation: usize) -> f64 {
        (0..=truncation.min(self.order())).map(|n| g.powi(4 - 2 * n as i32) * eval_eps(&self.e_terms[n], eps)).sum()
    }

    /// `S(r, u) = Σ_{n≤N} g^{2−2n} S_n(r, u, ε)`.
    pub fn exponent(&self, g: f64, eps: f64, r: f64, u: f64, truncation: usize) -> f64 {
        (0..=truncation.min(self.order()))
            .map(|n| g.powi(2 - 2 * n as i32) * self.s_terms[n].eval(&[r, u, eps]))
            .sum()
    }

    /// Numeric assembly at `(g, ε)`.
    pub fn assemble(&self, g: f64, eps: f64, truncation: usize) -> Assembled<'_> {
        Assembled { sol: self, g, eps, truncation, energy: self.energy(g, eps, truncation) }
    }

    /// Terms of the Schrödinger equation, multiplied by `ĝ⁴` and written
    /// with `T = ĝ²S`, whose `ĝ` power is at most `2N`. Zero for a correct
    /// solution.
    pub fn low_grade_residual(&self) -> Result<MultiPoly, CoulombError> {
        let vars = [Var::R, Var::U, Var::Eps, Var::GInv];
        let geom = Geometry::RadialPolar;
        let nmax = self.order();
        let mut t = MultiPoly::zero(&vars);
        let mut e = MultiPoly::zero(&vars);
        for n in 0..=nmax {
            t = &t + &ginv_pow(&self.s_terms[n], &vars, 2 * n as i32)?;
            e = &e + &ginv_pow(&self.e_terms[n], &vars, 2 * n as i32)?;
        }
        let half = rat(1, 2);
        let grad2 = MultiPoly::grad_dot(&t, &t, geom)?;
        let lap = t.laplacian(geom)?;
        let inv_r = MultiPoly::monomial(&vars, &[(Var::R, -1), (Var::GInv, 2)], rat(1, 1))?;
        let eps_u = ginv_pow(&self.potential, &vars, 4)?.mul_var_pow(Var::Eps, 1)?;
        let res = &(&(&(&lap.mul_var_pow(Var::GInv, 2)?.scale(&half) - &grad2.scale(&half)) - &inv_r) + &eps_u) - &e;
        Ok(res.truncate(Var::GInv, 2 * nmax as i32))
    }

    /// `(n, E_n, S_n)` in canonical text.
    pub fn table(&self) -> Vec<(usize, String, String)> {
        (0..=self.order()).map(|n| (n, self.e_terms[n].to_string(), self.s_terms[n].to_string())).collect()
    }
}

/// Series evaluated at numeric `g` and `ε`.
#[derive(Clone, Debug)]
pub struct Assembled<'a> {
    sol: &'a CoulombSolution,
    pub g: f64,
    pub eps: f64,
    pub truncation: usize,
    pub energy: f64,
}

impl Assembled<'_> {
    /// `S(r, cos a)`.
    pub fn s(&self, r: f64, u: f64) -> f64 {
        self.sol.exponent(self.g, self.eps, r, u, self.truncation)
    }
}

/// Energy from the ratio `∫e^{−g²r−S} εU r² / ∫e^{−g²r−S} r²` with the
/// wave function kept to first order in `ε`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftCheck {
    /// `−g⁴/2` plus the ratio at the given `ε`.
    pub energy: f64,
    /// `ε¹` coefficient of the ratio.
    pub first: f64,
    /// `ε²` coefficient of the ratio.
    pub second: f64,
}

/// `∫₀^∞ f(r) dr`, extending the range until the integrand has decayed.
fn radial_integral(f: impl Fn(f64) -> f64, g: f64) -> Result<f64, CoulombError> {
    let mut r_max = 20.0 / (g * g);
    for _ in 0..12 {
        let (v, _) = numeric::integrate(&f, 0.0, r_max, 1e-300, 1e-14)?;
        let edge = (f(r_max) * r_max).abs();
        if edge <= 1e-17 * v.abs().max(f64::MIN_POSITIVE) {
            return Ok(v);
        }
        r_max *= 2.0;
    }
    Err(CoulombError::DomainTooSmall(r_max))
}

/// Alternative energy for an isotropic solution, with
/// `e^{−S} ≈ e^{−g²r}(1 − εS⁽¹⁾)` where `S⁽¹⁾` collects the `ε¹` parts of
/// `g^{2−2n}S_n`.
pub fn integral_shift_check(sol: &CoulombSolution, g: f64, eps: f64) -> Result<ShiftCheck, CoulombError> {
    if !sol.is_isotropic() {
        return Err(CoulombError::InvalidPotential("integral check needs an isotropic U".into()));
    }
    if !(g > 0.0) {
        return Err(CoulombError::InvalidPotential("g must be positive".into()));
    }
    let radial = |p: &MultiPoly| -> Result<Vec<f64>, CoulombError> {
        let p = p.with_vars(&[Var::R])?;
        Ok(p.univariate_coeffs(Var::R)?)
    };
    let mut s1 = vec![0.0];
    for n in 1..=sol.order() {
        let c = radial(&sol.s_terms[n].coefficient_of(Var::Eps, 1)?)?;
        let w = g.powi(2 - 2 * n as i32);
        if s1.len() < c.len() {
            s1.resize(c.len(), 0.0);
        }
        for (a, b) in s1.iter_mut().zip(c) {
            *a += w * b;
        }
    }
    let u = radial(&sol.potential)?;
    let a = 2.0 * g * g;
    let w = |r: f64| (-a * r).exp() * r * r;
    let d0 = radial_integral(|r| w(r), g)?;
    let d1 = radial_integral(|r| w(r) * numeric::horner(&s1, r), g)?;
    let n0 = radial_integral(|r| w(r) * numeric::horner(&u, r), g)?;
    let n1 = radial_integral(|r| w(r) * numeric::horner(&u, r) * numeric::horner(&s1, r), g)?;
    Ok(ShiftCheck {
        energy: -0.5 * g.powi(4) + eps * (n0 - eps * n1) / (d0 - eps * d1),
        first: n0 / d0,
        second: n0 * d1 / (d0 * d0) - n1 / d0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse_in(s, &S_VARS).unwrap()
    }

    #[test]
    fn harmonic_perturbation_low_orders() {
        let sol = solve_isotropic(&MultiPoly::parse("r^2").unwrap(), 4).unwrap();
        assert!(sol.s_terms[1].is_zero());
        assert_eq!(sol.s_terms[2], p("1/3*ε*r^3"));
        assert_eq!(sol.s_terms[3], p("ε*r^2"));
        assert_eq!(sol.e_terms[4], MultiPoly::parse_in("3*ε", &E_VARS).unwrap());
        assert_eq!(sol.s_terms[4], p("-1/10*ε^2*r^5"));
    }

    #[test]
    fn linear_and_cubic_e3() {
        let lin = solve_isotropic(&MultiPoly::parse("r").unwrap(), 3).unwrap();
        assert_eq!(lin.e_terms[3], MultiPoly::parse_in("3/2*ε", &E_VARS).unwrap());
        let cub = solve_isotropic(&MultiPoly::parse("r^3").unwrap(), 3).unwrap();
        assert!(cub.e_terms[1..].iter().all(|e| e.is_zero()));
    }

    #[test]
    fn rejects_bad_potentials() {
        assert!(solve(&MultiPoly::parse("1 + r").unwrap(), 2).is_err());
        assert!(solve(&MultiPoly::parse("r^-1").unwrap(), 2).is_err());
        assert!(solve_isotropic(&MultiPoly::parse("r*u").unwrap(), 2).is_err());
        assert!(solve_stark(1).is_err());
    }

    #[test]
    fn stark_s4() {
        let sol = solve_stark(6).unwrap();
        assert_eq!(sol.s_terms[4], p("-1/24*ε^2*r^3 - 1/8*ε^2*r^3*u^2"));
        assert_eq!(sol.e_terms[6], MultiPoly::parse_in("-9/4*ε^2", &E_VARS).unwrap());
    }

    #[test]
    fn residual_vanishes() {
        let sol = solve_stark(6).unwrap();
        assert!(sol.low_grade_residual().unwrap().is_zero());
    }

    #[test]
    fn energy_text_renders() {
        let sol = solve_isotropic(&MultiPoly::parse("r^2").unwrap(), 8).unwrap();
        assert_eq!(sol.energy_text(8).unwrap(), "-1/2 * g^4 + 3 * ε * ĝ^4 - 129/4 * ε^2 * ĝ^12");
    }
}
