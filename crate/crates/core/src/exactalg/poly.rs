use super::{fmt_rational, int, is_negative, is_unit, is_zero, to_f64, var_list, AlgebraError, Rational, Var};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Coordinate system used by [`MultiPoly::laplacian`] and [`MultiPoly::grad_dot`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    /// One Cartesian coordinate `x`.
    Cartesian1D,
    /// Spherical `r` and `u = cos(polar angle)`, azimuthally symmetric.
    RadialPolar,
    /// Cartesian normal coordinates `q1 … qN`.
    Normal(u16),
}

/// Sparse polynomial with rational coefficients over an ordered variable list.
///
/// Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<Var>,
    terms: BTreeMap<Vec<i32>, Rational>,
}

impl MultiPoly {
    /// The zero polynomial. Variables are sorted and deduplicated.
    pub fn zero(vars: &[Var]) -> Self {
        let mut v = vars.to_vec();
        v.sort();
        v.dedup();
        MultiPoly { vars: v, terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[Var], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        let n = p.vars.len();
        p.insert(vec![0; n], c);
        p
    }

    pub fn one(vars: &[Var]) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The polynomial consisting of a single variable.
    pub fn var(vars: &[Var], v: Var) -> Result<Self, AlgebraError> {
        Self::monomial(vars, &[(v, 1)], Rational::one())
    }

    /// `c * Π v^e` for the listed powers.
    pub fn monomial(vars: &[Var], powers: &[(Var, i32)], c: Rational) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(vars);
        let mut e = vec![0; p.vars.len()];
        for &(v, k) in powers {
            let i = p.index(v)?;
            if k < 0 && !v.is_laurent() {
                return Err(AlgebraError::NegativeExponent(v.name()));
            }
            e[i] += k;
        }
        p.insert(e, c);
        Ok(p)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms as `(exponents, coefficient)`, exponents aligned with [`Self::vars`].
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<i32>, &Rational)> {
        self.terms.iter()
    }

    pub fn has_var(&self, v: Var) -> bool {
        self.vars.contains(&v)
    }

    fn index(&self, v: Var) -> Result<usize, AlgebraError> {
        self.vars.iter().position(|&w| w == v).ok_or_else(|| AlgebraError::MissingVar(v.name()))
    }

    fn insert(&mut self, e: Vec<i32>, c: Rational) {
        self.add_term(&e, &c);
    }

    fn add_term(&mut self, e: &[i32], c: &Rational) {
        if is_zero(c) {
            return;
        }
        match self.terms.get_mut(e) {
            Some(slot) => {
                *slot += c;
                if slot.is_zero() {
                    self.terms.remove(e);
                }
            }
            None => {
                self.terms.insert(e.to_vec(), c.clone());
            }
        }
    }

    fn check_same(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(AlgebraError::VarMismatch { left: var_list(&self.vars), right: var_list(&other.vars) })
        }
    }

    /// Re-express over another variable set. Variables may be dropped only
    /// if no term uses them.
    pub fn with_vars(&self, vars: &[Var]) -> Result<Self, AlgebraError> {
        let mut out = Self::zero(vars);
        let map: Vec<Option<usize>> = self.vars.iter().map(|&v| out.index(v).ok()).collect();
        for (e, c) in &self.terms {
            let mut ne = vec![0; out.vars.len()];
            for (k, slot) in map.iter().enumerate() {
                match slot {
                    Some(i) => ne[*i] = e[k],
                    None if e[k] != 0 => return Err(AlgebraError::MissingVar(self.vars[k].name())),
                    None => {}
                }
            }
            out.add_term(&ne, c);
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e, &-c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.vars);
        let mut e = vec![0; self.vars.len()];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                for k in 0..e.len() {
                    e[k] = ea[k] + eb[k];
                }
                out.add_term(&e, &(ca * cb));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(&self.vars);
        if c.is_zero() {
            return out;
        }
        for (e, k) in &self.terms {
            out.terms.insert(e.clone(), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.vars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            n >>= 1;
        }
        acc
    }

    /// Multiply by `v^k`.
    pub fn mul_var_pow(&self, v: Var, k: i32) -> Result<Self, AlgebraError> {
        let i = self.index(v)?;
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[i] += k;
            if ne[i] < 0 && !v.is_laurent() {
                return Err(AlgebraError::NegativeExponent(v.name()));
            }
            out.terms.insert(ne, c.clone());
        }
        Ok(out)
    }

    /// Partial derivative. Differentiating by an absent variable gives zero.
    pub fn diff(&self, v: Var) -> Self {
        let Ok(i) = self.index(v) else {
            return Self::zero(&self.vars);
        };
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] -= 1;
            out.add_term(&ne, &(c * int(e[i] as i64)));
        }
        out
    }

    /// Laplacian in the given coordinates.
    pub fn laplacian(&self, geom: Geometry) -> Result<Self, AlgebraError> {
        match geom {
            Geometry::Cartesian1D => {
                self.need(Var::X, "cartesian-1d")?;
                Ok(self.diff(Var::X).diff(Var::X))
            }
            Geometry::RadialPolar => {
                self.need(Var::R, "radial-polar")?;
                let fr = self.diff(Var::R);
                let mut out = fr.diff(Var::R).try_add(&fr.mul_var_pow(Var::R, -1)?.scale(&int(2)))?;
                if self.has_var(Var::U) {
                    // r^-2 [ (1-u^2) f_uu - 2u f_u ]
                    let fu = self.diff(Var::U);
                    let fuu = fu.diff(Var::U);
                    let ang = fuu
                        .try_sub(&fuu.mul_var_pow(Var::U, 2)?)?
                        .try_sub(&fu.mul_var_pow(Var::U, 1)?.scale(&int(2)))?;
                    out = out.try_add(&ang.mul_var_pow(Var::R, -2)?)?;
                }
                Ok(out)
            }
            Geometry::Normal(n) => {
                let mut out = Self::zero(&self.vars);
                for i in 1..=n {
                    self.need(Var::Q(i), "normal")?;
                    out = out.try_add(&self.diff(Var::Q(i)).diff(Var::Q(i)))?;
                }
                Ok(out)
            }
        }
    }

    /// Gradient dot product of two polynomials.
    pub fn grad_dot(a: &Self, b: &Self, geom: Geometry) -> Result<Self, AlgebraError> {
        a.check_same(b)?;
        match geom {
            Geometry::Cartesian1D => {
                a.need(Var::X, "cartesian-1d")?;
                a.diff(Var::X).try_mul(&b.diff(Var::X))
            }
            Geometry::RadialPolar => {
                a.need(Var::R, "radial-polar")?;
                let mut out = a.diff(Var::R).try_mul(&b.diff(Var::R))?;
                if a.has_var(Var::U) {
                    let uu = a.diff(Var::U).try_mul(&b.diff(Var::U))?;
                    let ang = uu.try_sub(&uu.mul_var_pow(Var::U, 2)?)?;
                    out = out.try_add(&ang.mul_var_pow(Var::R, -2)?)?;
                }
                Ok(out)
            }
            Geometry::Normal(n) => {
                let mut out = Self::zero(&a.vars);
                for i in 1..=n {
                    a.need(Var::Q(i), "normal")?;
                    out = out.try_add(&a.diff(Var::Q(i)).try_mul(&b.diff(Var::Q(i)))?)?;
                }
                Ok(out)
            }
        }
    }

    fn need(&self, v: Var, geometry: &str) -> Result<(), AlgebraError> {
        if self.has_var(v) {
            Ok(())
        } else {
            Err(AlgebraError::Geometry { geometry: geometry.into(), var: v.name() })
        }
    }

    /// Average over `u ∈ [-1, 1]` with weight 1/2. Identity when `u` is absent.
    pub fn angular_average(&self) -> Self {
        let Ok(i) = self.index(Var::U) else {
            return self.clone();
        };
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let k = e[i];
            if k % 2 != 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[i] = 0;
            out.add_term(&ne, &(c / int(k as i64 + 1)));
        }
        out
    }

    /// Termwise `∫ dr` with zero integration constant.
    ///
    /// An `r^-1` term has no polynomial antiderivative and is reported with
    /// its coefficient (a polynomial in the remaining variables).
    pub fn integrate_r(&self) -> Result<Self, AlgebraError> {
        let i = self.index(Var::R)?;
        let log = self.coefficient_of(Var::R, -1)?;
        if !log.is_zero() {
            return Err(AlgebraError::LogSingularity(log.to_string()));
        }
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[i] += 1;
            out.add_term(&ne, &(c / int(ne[i] as i64)));
        }
        Ok(out)
    }

    /// Terms with `v^k`, with that factor removed (exponent set to zero).
    pub fn coefficient_of(&self, v: Var, k: i32) -> Result<Self, AlgebraError> {
        let i = self.index(v)?;
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == k {
                let mut ne = e.clone();
                ne[i] = 0;
                out.add_term(&ne, c);
            }
        }
        Ok(out)
    }

    /// Keep only terms whose `v` exponent is at most `k`.
    pub fn truncate(&self, v: Var, k: i32) -> Self {
        let Ok(i) = self.index(v) else {
            return self.clone();
        };
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] <= k {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// `(min, max)` exponent of `v`, or `None` for the zero polynomial.
    pub fn degree_range(&self, v: Var) -> Option<(i32, i32)> {
        let i = self.index(v).ok()?;
        let mut it = self.terms.keys().map(|e| e[i]);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), k| (lo.min(k), hi.max(k))))
    }

    /// Substitute an exact value for one variable.
    pub fn substitute(&self, v: Var, value: &Rational) -> Result<Self, AlgebraError> {
        let i = self.index(v)?;
        if value.is_zero() && self.terms.keys().any(|e| e[i] < 0) {
            return Err(AlgebraError::BadDivision);
        }
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[i] = 0;
            out.add_term(&ne, &(c * rational_pow(value, e[i])));
        }
        Ok(out)
    }

    /// The constant term, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&k| k == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Floating-point evaluation; `values` is aligned with [`Self::vars`].
    pub fn eval(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.vars.len(), "one value per variable");
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = to_f64(c);
                for (k, &p) in e.iter().enumerate() {
                    if p != 0 {
                        t *= values[k].powi(p);
                    }
                }
                t
            })
            .sum()
    }

    /// Evaluate with named values; missing variables count as zero.
    pub fn eval_named(&self, values: &[(Var, f64)]) -> f64 {
        let v: Vec<f64> = self
            .vars
            .iter()
            .map(|w| values.iter().find(|(n, _)| n == w).map(|p| p.1).unwrap_or(0.0))
            .collect();
        self.eval(&v)
    }

    /// Dense coefficient vector of a univariate polynomial in `v`
    /// (index = power). Other variables must be absent from every term.
    pub fn univariate_coeffs(&self, v: Var) -> Result<Vec<f64>, AlgebraError> {
        let i = self.index(v)?;
        let mut out = Vec::new();
        for (e, c) in &self.terms {
            if e.iter().enumerate().any(|(k, &p)| k != i && p != 0) || e[i] < 0 {
                return Err(AlgebraError::VarMismatch { left: var_list(&self.vars), right: v.name() });
            }
            let k = e[i] as usize;
            if out.len() <= k {
                out.resize(k + 1, 0.0);
            }
            out[k] += to_f64(c);
        }
        Ok(out)
    }

    /// Terms in canonical order: ascending total degree, then descending
    /// exponents in variable order.
    pub fn sorted_terms(&self) -> Vec<(&Vec<i32>, &Rational)> {
        let mut t: Vec<_> = self.terms.iter().collect();
        t.sort_by(|(a, _), (b, _)| {
            let da: i32 = a.iter().sum();
            let db: i32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        t
    }

    /// Parse canonical text, using exactly the variables that appear.
    pub fn parse(s: &str) -> Result<Self, AlgebraError> {
        super::parse::parse(s, None)
    }

    /// Parse canonical text over a fixed variable set.
    pub fn parse_in(s: &str, vars: &[Var]) -> Result<Self, AlgebraError> {
        super::parse::parse(s, Some(vars))
    }
}

pub(crate) fn rational_pow(q: &Rational, k: i32) -> Rational {
    if k >= 0 {
        num_traits::pow(q.clone(), k as usize)
    } else {
        num_traits::pow(q.recip(), (-k) as usize)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (e, c)) in self.sorted_terms().into_iter().enumerate() {
            let neg = is_negative(c);
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            let has_vars = e.iter().any(|&k| k != 0);
            if !has_vars || !is_unit(&mag) {
                factors.push(fmt_rational(&mag));
            }
            for (k, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(self.vars[k].name()),
                    _ => factors.push(format!("{}^{}", self.vars[k].name(), p)),
                }
            }
            f.write_str(&factors.join(" * "))?;
        }
        Ok(())
    }
}

macro_rules! checked_op {
    ($tr:ident, $m:ident, $inner:ident) => {
        impl $tr for &MultiPoly {
            type Output = MultiPoly;
            /// Panics on a variable-set mismatch; use the `try_` form to recover.
            fn $m(self, rhs: &MultiPoly) -> MultiPoly {
                self.$inner(rhs).expect("variable-set mismatch")
            }
        }
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$m(&rhs)
            }
        }
    };
}

checked_op!(Add, add, try_add);
checked_op!(Sub, sub, try_sub);
checked_op!(Mul, mul, try_mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    const RU: [Var; 2] = [Var::R, Var::U];

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse_in(s, &RU).unwrap()
    }

    #[test]
    fn radial_laplacian_of_power() {
        // ∇² r^k = k(k+1) r^(k-2)
        let l = p("r^3").laplacian(Geometry::RadialPolar).unwrap();
        assert_eq!(l, p("12 * r"));
    }

    #[test]
    fn stark_gradient_square() {
        let s2 = p("1/2 * r^2 * u");
        let g = MultiPoly::grad_dot(&s2, &s2, Geometry::RadialPolar).unwrap();
        assert_eq!(g, p("1/4 * r^2 + 3/4 * r^2 * u^2"));
    }

    #[test]
    fn ru_is_harmonic() {
        assert!(p("r * u").laplacian(Geometry::RadialPolar).unwrap().is_zero());
    }

    #[test]
    fn angular_average_of_u_powers() {
        assert_eq!(p("u^2 + u^3 + 1").angular_average(), p("4/3"));
    }

    #[test]
    fn log_singularity_names_coefficient() {
        let e = p("u * r^-1 + r").integrate_r().unwrap_err();
        assert_eq!(e, AlgebraError::LogSingularity("u".into()));
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = MultiPoly::var(&[Var::X], Var::X).unwrap();
        let b = MultiPoly::var(&[Var::R], Var::R).unwrap();
        assert!(matches!(a.try_add(&b), Err(AlgebraError::VarMismatch { .. })));
    }

    #[test]
    fn negative_exponent_only_on_r() {
        assert!(MultiPoly::monomial(&[Var::X], &[(Var::X, -1)], rat(1, 1)).is_err());
        assert!(MultiPoly::monomial(&[Var::R], &[(Var::R, -1)], rat(1, 1)).is_ok());
    }

    #[test]
    fn renders_canonically() {
        let q = MultiPoly::monomial(&[Var::Eps, Var::GInv], &[(Var::GInv, 5), (Var::Eps, 2)], rat(-21, 8)).unwrap();
        assert_eq!(q.to_string(), "-21/8 * ε^2 * ĝ^5");
        assert_eq!(p("r - 1").to_string(), "-1 + r");
        assert_eq!(MultiPoly::zero(&RU).to_string(), "0");
    }

    #[test]
    fn substitute_exact() {
        let q = p("r^2 * u + 3");
        assert_eq!(q.substitute(Var::U, &rat(1, 2)).unwrap(), p("3 + 1/2 * r^2"));
    }
}
