//! Exact perturbation series for the harmonic oscillator `g²x²/2` perturbed
//! by `ε x^{2p}` (even) or `ε x^{2p+1}` (odd).
//!
//! The wave function is `e^{-g x²/2} e^{-τ}` with `e^{-τ}` a polynomial whose
//! coefficients, like the energy shifts, are exact rationals times powers of
//! `ĝ = 1/g`. The recursions close over the `Γ` (even) and `γ` (odd) tables
//! of the resolvent `(1+CT)^{-1} C` acting on monomials.

use crate::exactalg::{int, rat, MultiPoly, Rational, Var};
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

const G: [Var; 1] = [Var::GInv];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PertError {
    #[error("perturbation order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("even perturbation needs p >= 1, got {0}")]
    InvalidPower(u32),
    #[error("coefficient at index {index} of order {order} is nonzero beyond the support bound")]
    SupportBound { order: usize, index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// `ĝ^k` times a rational.
fn ghat(c: Rational, k: i32) -> MultiPoly {
    MultiPoly::monomial(&G, &[(Var::GInv, k)], c).expect("ĝ power is non-negative")
}

/// `Γ_{mn}`: coefficient of `x^{2m}` in `(1+CT)^{-1}C [x^{2n} - Γ_{1n}]`.
pub fn gamma_even(m: u32, n: u32) -> MultiPoly {
    if m == 0 || m > n {
        return MultiPoly::zero(&G);
    }
    // (2n-1)(2n-3)...(2m+1) / (m 2^{n-m+1})
    let mut num = Rational::one();
    let mut j = 2 * n as i64 - 1;
    while j > 2 * m as i64 {
        num *= int(j);
        j -= 2;
    }
    let den = int(m as i64) * int(2).pow((n - m + 1) as i32);
    ghat(num / den, (n - m + 1) as i32)
}

/// `γ_{mn}`: coefficient of `x^{2m+1}` in `(1+CT)^{-1}C x^{2n+1}`.
pub fn gamma_odd(m: u32, n: u32) -> MultiPoly {
    if m > n {
        return MultiPoly::zero(&G);
    }
    // n(n-1)...(m+1) / (2m+1)
    let mut num = Rational::one();
    for j in (m + 1)..=n {
        num *= int(j as i64);
    }
    ghat(num / int(2 * m as i64 + 1), (n - m + 1) as i32)
}

/// Exact series in `ε`.
#[derive(Clone, Debug)]
pub struct PerturbSeries {
    pub parity: Parity,
    pub p: u32,
    /// `delta[k-1] = Δ(k)`, so that the energy is `g/2 + Σ ε^k Δ(k)`.
    pub delta: Vec<MultiPoly>,
    /// `coeffs[k-1][n]`: order-`k` coefficient of `x^{2n}` (even) or `x^n` (odd).
    pub coeffs: Vec<Vec<MultiPoly>>,
}

impl PerturbSeries {
    pub fn order(&self) -> usize {
        self.delta.len()
    }

    /// `Δ(k)`, 1-based.
    pub fn delta_k(&self, k: usize) -> &MultiPoly {
        &self.delta[k - 1]
    }

    /// Order-`k` coefficient with index `n` (zero outside the stored support).
    pub fn coeff(&self, n: usize, k: usize) -> MultiPoly {
        self.coeffs
            .get(k - 1)
            .and_then(|row| row.get(n))
            .cloned()
            .unwrap_or_else(|| MultiPoly::zero(&G))
    }

    /// Power of `x` multiplying coefficient index `n`.
    pub fn x_power(&self, n: usize) -> usize {
        match self.parity {
            Parity::Even => 2 * n,
            Parity::Odd => n,
        }
    }

    /// `Σ_k ε^k Δ(k)` over `[ε, ĝ]`.
    pub fn energy_shift(&self) -> MultiPoly {
        let vars = [Var::Eps, Var::GInv];
        let mut acc = MultiPoly::zero(&vars);
        for (k, d) in self.delta.iter().enumerate() {
            let e = MultiPoly::monomial(&vars, &[(Var::Eps, k as i32 + 1)], Rational::one()).unwrap();
            acc = &acc + &(&e * &d.with_vars(&vars).unwrap());
        }
        acc
    }

    /// `e^{-τ} = 1 + Σ_k ε^k Σ_n c_n(k) x^{…}` over `[x, ε, ĝ]`.
    pub fn wave_factor(&self) -> MultiPoly {
        let vars = [Var::X, Var::Eps, Var::GInv];
        let mut acc = MultiPoly::one(&vars);
        for (k, row) in self.coeffs.iter().enumerate() {
            for (n, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let m = MultiPoly::monomial(
                    &vars,
                    &[(Var::Eps, k as i32 + 1), (Var::X, self.x_power(n) as i32)],
                    Rational::one(),
                )
                .unwrap();
                acc = &acc + &(&m * &c.with_vars(&vars).unwrap());
            }
        }
        acc
    }

    /// Energy through order `k` at numeric `g`, `ε`.
    pub fn energy(&self, g: f64, eps: f64, k: usize) -> f64 {
        let mut e = 0.5 * g;
        for (j, d) in self.delta.iter().take(k).enumerate() {
            e += eps.powi(j as i32 + 1) * d.eval(&[1.0 / g]);
        }
        e
    }
}

fn table(rows: usize, cols: usize) -> Vec<Vec<MultiPoly>> {
    vec![vec![MultiPoly::zero(&G); cols]; rows]
}

/// Even perturbation `ε x^{2p}` through order `order`.
///
/// Order `k` coefficients live on `1 <= n <= k p`; the next index is
/// evaluated and must vanish.
pub fn solve_even(p: u32, order: usize) -> Result<PerturbSeries, PertError> {
    if order < 1 {
        return Err(PertError::InvalidOrder(order));
    }
    if p < 1 {
        return Err(PertError::InvalidPower(p));
    }
    let p_ = p as usize;
    let width = order * p_ + 2;
    let mut a = table(order + 1, width);
    let mut delta: Vec<MultiPoly> = vec![MultiPoly::zero(&G)];

    for k in 1..=order {
        for n in 1..=(k * p_ + 1) {
            let nn = n as u32;
            let mut v = MultiPoly::zero(&G);
            if k == 1 {
                v = &v - &gamma_even(nn, p);
            } else {
                for l in 1..=((k - 1) * p_) {
                    if !a[k - 1][l].is_zero() {
                        v = &v - &(&a[k - 1][l] * &gamma_even(nn, l as u32 + p));
                    }
                }
            }
            for i in 1..k {
                let j = k - i;
                for l in 1..=(j * p_) {
                    if !a[j][l].is_zero() {
                        v = &v + &(&(&delta[i] * &a[j][l]) * &gamma_even(nn, l as u32));
                    }
                }
            }
            if n == k * p_ + 1 {
                if !v.is_zero() {
                    return Err(PertError::SupportBound { order: k, index: n });
                }
            } else {
                a[k][n] = v;
            }
        }
        delta.push(-&a[k][1]);
    }
    Ok(PerturbSeries {
        parity: Parity::Even,
        p,
        delta: delta.split_off(1),
        coeffs: a.into_iter().skip(1).map(|row| row[..width - 1].to_vec()).collect(),
    })
}

/// Odd perturbation `ε x^{2p+1}` through order `order`.
///
/// Order `k` coefficients live on `1 <= index <= k (2p+1)`.
pub fn solve_odd(p: u32, order: usize) -> Result<PerturbSeries, PertError> {
    if order < 1 {
        return Err(PertError::InvalidOrder(order));
    }
    let span = 2 * p as usize + 1;
    let width = order * span + 2;
    let mut b = table(order + 1, width);
    let mut delta: Vec<MultiPoly> = vec![MultiPoly::zero(&G)];

    for k in 1..=order {
        let top = k * span;
        for idx in 1..=(top + 1) {
            let n = (idx / 2) as u32;
            let mut v = MultiPoly::zero(&G);
            if idx % 2 == 0 {
                // even index 2n
                if k >= 2 {
                    for l in 0.. {
                        let src = 2 * l + 1;
                        if src > (k - 1) * span {
                            break;
                        }
                        if !b[k - 1][src].is_zero() {
                            v = &v - &(&b[k - 1][src] * &gamma_even(n, l as u32 + p + 1));
                        }
                    }
                }
                for i in 1..k {
                    let j = k - i;
                    for src in (2..=(j * span)).step_by(2) {
                        if !b[j][src].is_zero() {
                            v = &v + &(&(&delta[i] * &b[j][src]) * &gamma_even(n, (src / 2) as u32));
                        }
                    }
                }
            } else {
                // odd index 2n+1
                if k == 1 {
                    v = &v - &gamma_odd(n, p);
                } else {
                    for src in (2..=((k - 1) * span)).step_by(2) {
                        if !b[k - 1][src].is_zero() {
                            v = &v - &(&b[k - 1][src] * &gamma_odd(n, (src / 2) as u32 + p));
                        }
                    }
                }
                for i in 1..k {
                    let j = k - i;
                    for src in (1..=(j * span)).step_by(2) {
                        if !b[j][src].is_zero() {
                            v = &v + &(&(&delta[i] * &b[j][src]) * &gamma_odd(n, (src / 2) as u32));
                        }
                    }
                }
            }
            if idx == top + 1 {
                if !v.is_zero() {
                    return Err(PertError::SupportBound { order: k, index: idx });
                }
            } else {
                b[k][idx] = v;
            }
        }
        delta.push(-&b[k][2]);
    }
    Ok(PerturbSeries {
        parity: Parity::Odd,
        p,
        delta: delta.split_off(1),
        coeffs: b.into_iter().skip(1).map(|row| row[..width - 1].to_vec()).collect(),
    })
}

/// Exact `Δ(k)` for `p = 1`, where the perturbed problem is again harmonic:
/// `εΔ = (√(g²+2ε) - g)/2`.
pub fn quadratic_shift(k: usize) -> MultiPoly {
    // binom(1/2, k) 2^{k-1} ĝ^{2k-1}
    let mut b = Rational::one();
    for j in 0..k {
        b *= rat(1, 2) - int(j as i64);
        b /= int(j as i64 + 1);
    }
    ghat(b * int(2).pow(k as i32 - 1), 2 * k as i32 - 1)
}

#[derive(Serialize)]
struct Row {
    k: usize,
    delta: String,
    value: f64,
}

/// Table rows `(k, Δ(k) exact, Δ(k) at g)`.
pub fn table_rows(s: &PerturbSeries, g: f64) -> Vec<(usize, String, f64)> {
    s.delta.iter().enumerate().map(|(k, d)| (k + 1, d.to_string(), d.eval(&[1.0 / g]))).collect()
}

/// JSON rendering of the series: `Δ(k)` and every nonzero coefficient.
pub fn to_json(s: &PerturbSeries, g: f64) -> serde_json::Value {
    let deltas: Vec<Row> =
        table_rows(s, g).into_iter().map(|(k, delta, value)| Row { k, delta, value }).collect();
    let mut coeffs = Vec::new();
    for (k, row) in s.coeffs.iter().enumerate() {
        for (n, c) in row.iter().enumerate() {
            if !c.is_zero() {
                coeffs.push(serde_json::json!({"k": k + 1, "x_power": s.x_power(n), "coeff": c.to_string()}));
            }
        }
    }
    serde_json::json!({"parity": s.parity, "p": s.p, "delta": deltas, "coeffs": coeffs})
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(c: Rational, k: i32) -> MultiPoly {
        ghat(c, k)
    }

    #[test]
    fn gamma_diagonal_and_first_row() {
        assert_eq!(gamma_even(3, 3), g(rat(1, 6), 1));
        assert_eq!(gamma_even(1, 3), g(rat(15, 8), 3));
        assert_eq!(gamma_even(2, 3), g(rat(5, 8), 2));
        assert!(gamma_even(0, 3).is_zero() && gamma_even(4, 3).is_zero());
        assert_eq!(gamma_odd(0, 3), g(rat(6, 1), 4));
        assert_eq!(gamma_odd(2, 2), g(rat(1, 5), 1));
    }

    #[test]
    fn quartic_first_two_orders() {
        let s = solve_even(2, 2).unwrap();
        assert_eq!(s.delta_k(1), &g(rat(3, 4), 2));
        assert_eq!(s.delta_k(2), &g(rat(-21, 8), 5));
    }

    #[test]
    fn linear_shift_is_quadratic_completion() {
        let s = solve_odd(0, 4).unwrap();
        assert_eq!(s.delta_k(2), &g(rat(-1, 2), 2));
        assert!(s.delta_k(1).is_zero() && s.delta_k(3).is_zero() && s.delta_k(4).is_zero());
    }

    #[test]
    fn quadratic_matches_square_root() {
        let s = solve_even(1, 6).unwrap();
        for k in 1..=6 {
            assert_eq!(s.delta_k(k), &quadratic_shift(k), "k = {k}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(solve_even(2, 0).unwrap_err(), PertError::InvalidOrder(0));
        assert_eq!(solve_even(0, 2).unwrap_err(), PertError::InvalidPower(0));
    }
}
