//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use trajquad::coulomb::{solve_isotropic, solve_stark};
use trajquad::exactalg::{hermite, int, rat, Geometry, MultiPoly, Rational, Var};
use trajquad::excited::{chi0_e0, chi1_harmonic, excited_e1_numeric, hermite_top_two, ExcitedSpec};
use trajquad::gexpand::hierarchy;
use trajquad::greens::{check_dbar_hermite, check_green_residual, check_one_plus_ct, WaveProfile};
use trajquad::oracle::{solve_1d, solve_radial};
use trajquad::oscpert::{gamma_even, gamma_odd, solve_even, solve_odd};
use trajquad::trajectory::{build_grid, build_grid_with, Direction, Potential1D, Quadrature};

/// Sub-check outcomes of one criterion.
#[derive(Default)]
struct Verdict {
    notes: Vec<String>,
    failed: Vec<String>,
}

impl Verdict {
    fn check(&mut self, name: &str, ok: bool, detail: impl std::fmt::Display) {
        let line = format!("{name} ({detail})");
        if ok {
            self.notes.push(line);
        } else {
            self.failed.push(line);
        }
    }

    fn exact(&mut self, name: &str, got: &MultiPoly, want: &MultiPoly) {
        let ok = got == want;
        self.check(name, ok, if ok { format!("{got}") } else { format!("got {got}, want {want}") });
    }

    fn within(&mut self, name: &str, err: f64, tol: f64) {
        self.check(name, err <= tol, format!("{err:.3e} <= {tol:.2e}"));
    }
}

fn poly(text: &str, vars: &[Var]) -> MultiPoly {
    MultiPoly::parse_in(text, vars).unwrap()
}

fn report(id: usize, title: &str, v: Verdict) -> bool {
    let ok = v.failed.is_empty();
    let tag = if ok { "PASS" } else { "FAIL" };
    let detail = if ok { v.notes.join("; ") } else { format!("failed: {}", v.failed.join("; ")) };
    println!("{tag} [{id}] {title}: {detail}");
    ok
}

const G: [Var; 1] = [Var::GInv];

fn criterion_1() -> Verdict {
    let mut v = Verdict::default();
    let s = solve_even(2, 2).unwrap();
    v.exact("Δ(1)", s.delta_k(1), &poly("3/4*ghat^2", &G));
    v.exact("Δ(2)", s.delta_k(2), &poly("-21/8*ghat^5", &G));
    v
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::default();
    let s = solve_odd(0, 6).unwrap();
    v.exact("Δ(2)", s.delta_k(2), &poly("-1/2*ghat^2", &G));
    v.exact("Δ(4)", s.delta_k(4), &MultiPoly::zero(&G));
    v.exact("Δ(6)", s.delta_k(6), &MultiPoly::zero(&G));
    for k in [1, 3, 5] {
        v.exact(&format!("Δ({k})"), s.delta_k(k), &MultiPoly::zero(&G));
    }
    // b_n collects every ε-order of the x^n coefficient; for p = 0 only
    // order n contributes.
    let b = |n: usize| s.coeff(n, n);
    v.exact("b1", &b(1), &poly("-ghat", &G));
    v.exact("b2 as printed", &b(2), &poly("-1/2*ghat^2", &G));
    v.exact("b3", &b(3), &poly("-1/6*ghat^3", &G));
    // e^{-εx/g} through ε⁶, expanded independently.
    let vars = [Var::X, Var::Eps, Var::GInv];
    let step = poly("-x*eps*ghat", &vars);
    let mut want = MultiPoly::one(&vars);
    let mut term = MultiPoly::one(&vars);
    for k in 1..=6 {
        term = (&term * &step).scale(&Rational::new(1.into(), (k as i64).into()));
        want = &want + &term;
    }
    v.exact("e^{-τ} = e^{-εx/g} through ε⁶", &s.wave_factor(), &want);
    v
}

const S_VARS: [Var; 3] = [Var::R, Var::U, Var::Eps];
const E_VARS: [Var; 1] = [Var::Eps];

fn criterion_3() -> Verdict {
    let mut v = Verdict::default();
    let sol = solve_isotropic(&poly("r^2", &[Var::R]), 8).unwrap();
    v.exact("S2", &sol.s_terms[2], &poly("1/3*eps*r^3", &S_VARS));
    v.exact("S3", &sol.s_terms[3], &poly("eps*r^2", &S_VARS));
    v.exact("S4", &sol.s_terms[4], &poly("-1/10*eps^2*r^5", &S_VARS));
    v.exact("E4", &sol.e_terms[4], &poly("3*eps", &E_VARS));
    v.exact("E8", &sol.e_terms[8], &poly("-129/4*eps^2", &E_VARS));
    let vars = [Var::Eps, Var::GInv];
    v.exact("E + g⁴/2", &sol.energy_correction(8).unwrap(), &poly("3*eps*ghat^4 - 129/4*eps^2*ghat^12", &vars));
    v
}

fn criterion_4() -> Verdict {
    let mut v = Verdict::default();
    let sol = solve_stark(12).unwrap();
    let printed = [
        (2, "1/2*eps*r^2*u", None),
        (3, "eps*r*u", None),
        (4, "-1/24*eps^2*r^3*(1 + 3*u^2)", None),
        (5, "-7/16*eps^2*r^2*(1 + u^2)", None),
        (6, "1/16*eps^3*r^4*u*(1 + u^2)", None),
        (7, "13/48*eps^3*r^3*u*(3 + u^2)", None),
        (8, "53/16*eps^3*r^2*u - 1/128*eps^4*r^5*(1 + 10*u^2 + 5*u^4)", None),
        (9, "53/8*eps^3*r*u - 99/512*eps^4*r^4*(1 + 6*u^2 + u^4)", None),
        (10, "-761/384*eps^4*r^3*(1 + 3*u^2)", Some(4)),
        (11, "-3131/256*eps^4*r^2*(1 + u^2)", Some(4)),
    ];
    for (n, text, trunc) in printed {
        let got = match trunc {
            Some(k) => sol.s_terms[n].truncate(Var::Eps, k),
            None => sol.s_terms[n].clone(),
        };
        v.exact(&format!("S{n}"), &got, &poly(text, &S_VARS));
    }
    for n in [1, 2, 3, 4, 5, 7, 8, 9, 10, 11] {
        v.exact(&format!("E{n}"), &sol.e_terms[n], &MultiPoly::zero(&E_VARS));
    }
    v.exact("E6", &sol.e_terms[6], &poly("-9/4*eps^2", &E_VARS));
    v.exact("E12", &sol.e_terms[12], &poly("-3555/64*eps^4", &E_VARS));
    let text = sol.energy_text(12).unwrap();
    let want = "-1/2 * g^4 - 9/4 * ε^2 * ĝ^8 - 3555/64 * ε^4 * ĝ^20";
    v.check("assembled energy", text == want, &text);
    v
}

fn criterion_5() -> Verdict {
    let mut v = Verdict::default();
    let (g, extent, n) = (1.0, 8.0, 4001);
    for l in 1..=4 {
        let r = check_dbar_hermite(l, g, extent, n).unwrap();
        v.within(&format!("D̄H{l}"), r.max_residual, 1e-7);
    }
    for k in [2, 3] {
        let f = WaveProfile::harmonic(extent, n, move |x: f64| x.powi(k)).unwrap();
        v.within(&format!("(1+CT)D̄x^{k} = Cx^{k}"), check_one_plus_ct(&f, g).unwrap().max_residual, 1e-6);
        v.within(&format!("Green residual x^{k}"), check_green_residual(&f, g).unwrap().max_residual, 1e-5);
    }
    v
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::default();
    let harmonic = Potential1D::parse("1/2*x^2", 0.0).unwrap();
    let grid = build_grid(&harmonic, 4.0, 2001, Direction::Plus).unwrap();
    let sol = hierarchy(&grid, 2).unwrap();
    v.within("harmonic S1", max_abs(&sol.s[0]), 1e-8);
    v.within("harmonic S2", max_abs(&sol.s[1]), 1e-8);
    v.within("harmonic E1", sol.energies[1].abs(), 1e-8);
    v.within("harmonic E2", sol.energies[2].abs(), 1e-8);
    let quartic = Potential1D::parse("1/2*x^2 + 1/10*x^4", 0.0).unwrap();
    let grid = build_grid(&quartic, 2.0, 2001, Direction::Plus).unwrap();
    let sol = hierarchy(&grid, 3).unwrap();
    for k in 1..=3 {
        v.within(&format!("PDE residual S{k}"), max_abs(&sol.pde_residual(k)), 1e-7);
    }
    v
}

fn criterion_7() -> Verdict {
    let mut v = Verdict::default();
    // (a) V = g²x²/2 + εx⁴.
    let (g, eps) = (2.0, 0.02);
    let series = solve_even(2, 3).unwrap();
    let e_series = series.energy(g, eps, 2);
    let d3 = series.delta_k(3).eval(&[1.0 / g]);
    let bound = 2.0 * (eps.powi(3) * d3).abs();
    let o = solve_1d(|x| 0.5 * g * g * x * x + eps * x.powi(4), (-6.0, 6.0), 3000, 1).unwrap();
    v.within("(a) |series through Δ(2) − oracle|", (e_series - o.eigenvalues[0]).abs(), bound);
    v.check("(a) oracle discretization below the bound", o.error_estimates[0] < bound, format!("{:.1e}", o.error_estimates[0]));
    // (b) radial Coulomb with U = r². The N = 8 truncation omits the ε³
    // term 5451/4·ε³ ≈ 1.4e-6 at these parameters, so the comparison uses
    // N = 16, which carries it.
    let (g, eps) = (1.0, 1e-3);
    let sol = solve_isotropic(&poly("r^2", &[Var::R]), 16).unwrap();
    let o = solve_radial(g, |r| r * r, eps, 40.0, 8000).unwrap();
    let e16 = sol.energy(g, eps, 16);
    v.within("(b) |N=16 series − radial oracle|", (e16 - o.eigenvalues[0]).abs(), 5e-7);
    v.check("(b) oracle discretization", o.error_estimates[0] < 5e-6, format!("{:.1e}", o.error_estimates[0]));
    v.notes.push(format!("N=8 for reference: {:.2e}", (sol.energy(g, eps, 8) - o.eigenvalues[0]).abs()));
    v
}

fn criterion_8() -> Verdict {
    let mut v = Verdict::default();
    for nu in [int(1), rat(3, 2)] {
        for n in 1..=4u32 {
            let spec = ExcitedSpec::new(vec![nu.clone()], vec![n]).unwrap();
            let (chi0, _) = chi0_e0(&spec);
            let chi1 = chi1_harmonic(&spec);
            // χ₀ + ĝχ₁ against qⁿ + ĝ·c·q^{n−2}.
            let vars = [Var::Q(1), Var::GInv];
            let got = &chi0.with_vars(&vars).unwrap() + &chi1.with_vars(&vars).unwrap().mul_var_pow(Var::GInv, 1).unwrap();
            let [lead, next] = hermite_top_two(n, &nu);
            let mut want = MultiPoly::monomial(&vars, &[(Var::Q(1), n as i32)], lead).unwrap();
            if n >= 2 {
                want = &want + &MultiPoly::monomial(&vars, &[(Var::Q(1), n as i32 - 2), (Var::GInv, 1)], next).unwrap();
            }
            v.check(&format!("ν={nu} n={n}"), got == want, &got);
        }
    }
    // Independent route for ν = 1: the monic top two terms of H_n(√g x).
    for n in 2..=4usize {
        let h = hermite(n, Var::X);
        let c = |k: i32| h.coefficient_of(Var::X, k).unwrap().as_constant().unwrap();
        let ratio = c(n as i32 - 2) / c(n as i32);
        let chi1 = chi1_harmonic(&ExcitedSpec::new(vec![int(1)], vec![n as u32]).unwrap());
        let got = chi1.coefficient_of(Var::Q(1), n as i32 - 2).unwrap().as_constant().unwrap();
        v.check(&format!("H_{n} ratio"), got == ratio, &got);
    }
    let harmonic = Potential1D::parse("1/2*x^2", 0.0).unwrap();
    let grid = build_grid(&harmonic, 2.0, 2001, Direction::Plus).unwrap();
    let s1 = hierarchy(&grid, 1).unwrap().s.remove(0);
    for n in 1..=4 {
        v.within(&format!("harmonic E1, n={n}"), excited_e1_numeric(&grid, &s1, n).unwrap().abs(), 1e-6);
    }
    v
}

// Criterion 9 helpers: independent symbolic C and T on [x, ĝ].
const XG: [Var; 2] = [Var::X, Var::GInv];

/// `C xᵏ = xᵏ/(k g)` on the harmonic profile; panics on a constant.
fn c_op(p: &MultiPoly) -> MultiPoly {
    let mut out = MultiPoly::zero(&XG);
    for (e, c) in p.terms() {
        assert!(e[0] > 0, "C of a constant diverges");
        let m = MultiPoly::monomial(&XG, &[(Var::X, e[0]), (Var::GInv, e[1] + 1)], c / int(e[0] as i64)).unwrap();
        out = &out + &m;
    }
    out
}

fn t_op(p: &MultiPoly) -> MultiPoly {
    p.diff(Var::X).diff(Var::X).scale(&rat(-1, 2))
}

/// `Σ_j (−CT)^j C xᵏ`, stopping before `C` would act on a constant.
fn resolvent_chain(k: i32) -> MultiPoly {
    let mut f = c_op(&MultiPoly::monomial(&XG, &[(Var::X, k)], int(1)).unwrap());
    let mut acc = f.clone();
    loop {
        let tf = t_op(&f);
        if tf.is_zero() || tf.degree_range(Var::X) == Some((0, 0)) {
            return acc;
        }
        f = -&c_op(&tf);
        acc = &acc + &f;
    }
}

fn table_sum(n: u32, even: bool) -> MultiPoly {
    let mut s = MultiPoly::zero(&XG);
    for m in 0..=n {
        let (coef, pow) = if even { (gamma_even(m, n), 2 * m) } else { (gamma_odd(m, n), 2 * m + 1) };
        let x = MultiPoly::monomial(&XG, &[(Var::X, pow as i32)], int(1)).unwrap();
        s = &s + &(&x * &coef.with_vars(&XG).unwrap());
    }
    s
}

fn small_poly(vars: &'static [Var], laurent_r: bool) -> impl Strategy<Value = MultiPoly> {
    let lo = if laurent_r { -2 } else { 0 };
    prop::collection::vec((prop::collection::vec(lo..4i32, vars.len()), -9i64..10, 1i64..5), 0..5).prop_map(
        move |terms| {
            let mut p = MultiPoly::zero(vars);
            for (exps, n, d) in terms {
                let powers: Vec<(Var, i32)> = vars
                    .iter()
                    .zip(&exps)
                    .map(|(&v, &e)| (v, if v.is_laurent() { e } else { e.max(0) }))
                    .collect();
                p = &p + &MultiPoly::monomial(vars, &powers, rat(n, d)).unwrap();
            }
            p
        },
    )
}

static RUV: [Var; 3] = [Var::R, Var::U, Var::Eps];
static X1: [Var; 1] = [Var::X];

fn criterion_9() -> Verdict {
    let mut v = Verdict::default();
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    let ring = runner.run(&(small_poly(&RUV, true), small_poly(&RUV, true), small_poly(&RUV, true)), |(a, b, c)| {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        Ok(())
    });
    v.check("ring axioms, 500 cases", ring.is_ok(), format!("{:?}", ring.err()));
    let mut runner = TestRunner::new(Config { cases: 500, failure_persistence: None, ..Config::default() });
    let calc = runner.run(&(small_poly(&X1, false), small_poly(&X1, false), small_poly(&RUV, false)), |(f, g, p)| {
        let geom = Geometry::Cartesian1D;
        let lhs = (&f * &g).laplacian(geom).unwrap();
        let rhs = &(&(&f * &g.laplacian(geom).unwrap()) + &MultiPoly::grad_dot(&f, &g, geom).unwrap().scale(&int(2)))
            + &(&g * &f.laplacian(geom).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(p.integrate_r().unwrap().diff(Var::R), p.clone());
        Ok(())
    });
    v.check("calculus identities, 500 cases", calc.is_ok(), format!("{:?}", calc.err()));
    let mut lemma_ok = true;
    for n in 1..=6u32 {
        lemma_ok &= resolvent_chain(2 * n as i32) == table_sum(n, true);
        lemma_ok &= resolvent_chain(2 * n as i32 + 1) == table_sum(n, false);
    }
    v.check("resolvent chains match Γ and γ tables, n <= 6", lemma_ok, "exact");
    // Simpson S₀ error falls by >= 4 when the spacing halves.
    let pot = Potential1D::parse("1/2*x^2 + 1/10*x^4", 0.0).unwrap();
    let exact = |x: f64| 5.0 / 3.0 * ((1.0 + x * x / 5.0).powf(1.5) - 1.0);
    let err = |n: usize| {
        let g = build_grid_with(&pot, 2.0, n, Direction::Plus, Quadrature::Simpson).unwrap();
        g.nodes.iter().zip(&g.s0).fold(0.0f64, |m, (&x, &s)| m.max((s - exact(x)).abs()))
    };
    let ratios: Vec<f64> = [33usize, 65, 129].iter().map(|&n| err(n) / err(2 * n - 1)).collect();
    v.check("Simpson convergence ratio >= 4", ratios.iter().all(|&r| r >= 4.0), format!("{ratios:.1?}"));
    v
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("oscillator x^4 series", criterion_1),
        ("oscillator x series", criterion_2),
        ("Coulomb U = r^2", criterion_3),
        ("Stark series", criterion_4),
        ("Green's identities", criterion_5),
        ("g^-1 hierarchy sanity", criterion_6),
        ("oracle cross-checks", criterion_7),
        ("excited states", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (title, f)) in criteria.iter().enumerate() {
        if !report(i + 1, title, f()) {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
