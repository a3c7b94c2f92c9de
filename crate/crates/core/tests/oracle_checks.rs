use nalgebra::{DMatrix, SymmetricEigen};
use trajquad::coulomb::solve_isotropic;
use trajquad::exactalg::{MultiPoly, Var};
use trajquad::excited::excited_e1_numeric;
use trajquad::gexpand::hierarchy;
use trajquad::greens::{check_c_inverse, check_green_residual, check_one_plus_ct, shift_from_boundary, WaveProfile};
use trajquad::oracle::{solve_1d, solve_radial};
use trajquad::oscpert::solve_even;
use trajquad::trajectory::{build_grid, Direction, Potential1D};

/// Lowest eigenvalues of `½p² + ½x² + λx⁴` in a truncated oscillator basis.
fn oscillator_basis(lambda: f64, size: usize) -> Vec<f64> {
    // Build x in a larger basis so x⁴ is exact on the kept block.
    let big = size + 4;
    let mut x = DMatrix::<f64>::zeros(big, big);
    for n in 0..big - 1 {
        let e = ((n + 1) as f64 / 2.0).sqrt();
        x[(n, n + 1)] = e;
        x[(n + 1, n)] = e;
    }
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let h = DMatrix::from_fn(size, size, |i, j| {
        let diag = if i == j { i as f64 + 0.5 } else { 0.0 };
        diag + lambda * x4[(i, j)]
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

#[test]
fn oracle_matches_oscillator_basis() {
    let lambda = 0.05;
    let basis = oscillator_basis(lambda, 120);
    let o = solve_1d(|x| 0.5 * x * x + lambda * x.powi(4), (-8.0, 8.0), 2000, 4).unwrap();
    for k in 0..4 {
        assert!((o.eigenvalues[k] - basis[k]).abs() < 1e-7, "level {k}: {} vs {}", o.eigenvalues[k], basis[k]);
    }
}

#[test]
fn oracle_error_is_second_order() {
    let v = |x: f64| 0.5 * x * x + 0.05 * x.powi(4);
    let exact = oscillator_basis(0.05, 120)[0];
    let fine_err = |n: usize| (solve_1d(v, (-8.0, 8.0), n, 1).unwrap().fine[0] - exact).abs();
    let ratio = fine_err(400) / fine_err(801);
    assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn radial_oracle_matches_coulomb_series() {
    let (g, eps) = (1.2, 0.002);
    let sol = solve_isotropic(&MultiPoly::parse_in("r^2", &[Var::R]).unwrap(), 8).unwrap();
    let o = solve_radial(g, |r| r * r, eps, 40.0, 8000).unwrap();
    let e = sol.energy(g, eps, 8);
    assert!((e - o.eigenvalues[0]).abs() < 1e-6, "{e} vs {}", o.eigenvalues[0]);
}

#[test]
fn excited_gap_matches_oracle() {
    // V = g²(½x² + λx⁴); the gap is g + E₁ + O(1/g), where the next term
    // is −18λ²/g from second-order perturbation theory.
    let lambda = 0.05;
    let v = Potential1D::from_fn(
        move |x| [0.5 * x * x + lambda * x.powi(4), x + 4.0 * lambda * x.powi(3), 1.0 + 12.0 * lambda * x * x],
        0.0,
    );
    let grid = build_grid(&v, 2.0, 4001, Direction::Plus).unwrap();
    let s1 = hierarchy(&grid, 1).unwrap().s.remove(0);
    let e1 = excited_e1_numeric(&grid, &s1, 1).unwrap();
    assert!((e1 - 3.0 * lambda).abs() < 1e-6, "E1 = {e1}");
    let mut residuals = Vec::new();
    for g in [4.0f64, 8.0] {
        let o = solve_1d(|x| g * g * (0.5 * x * x + lambda * x.powi(4)), (-4.0, 4.0), 3000, 2).unwrap();
        let r = o.eigenvalues[1] - o.eigenvalues[0] - (g + e1);
        assert!(r.abs() < 2.0 * 18.0 * lambda * lambda / g, "g={g}: residual {r}");
        residuals.push(r);
    }
    let ratio = residuals[0] / residuals[1];
    assert!((ratio - 2.0).abs() < 0.3, "residual ratio {ratio}");
}

fn h3(x: f64) -> f64 {
    8.0 * x.powi(3) - 12.0 * x
}

#[test]
fn green_identities_on_h3() {
    let f = WaveProfile::harmonic(8.0, 4001, h3).unwrap();
    assert!(check_one_plus_ct(&f, 1.0).unwrap().max_residual < 1e-6);
    assert!(check_green_residual(&f, 1.0).unwrap().max_residual < 1e-5);
    for k in [2, 3] {
        let f = WaveProfile::harmonic(8.0, 4001, move |x: f64| x.powi(k)).unwrap();
        assert!(check_c_inverse(&f, 1.0).unwrap().max_residual < 1e-6, "x^{k}");
    }
}

#[test]
fn boundary_shift_first_order() {
    for g in [1.0f64, 2.0] {
        let u = WaveProfile::harmonic(8.0, 4001, |x: f64| x.powi(4)).unwrap();
        let d = shift_from_boundary(&u, &u.map(|_| 0.0), g).unwrap();
        assert!((d - 0.75 / (g * g)).abs() < 1e-7, "g={g}: {d}");
    }
}

#[test]
fn boundary_shift_with_perturbed_wave() {
    // With e^{−τ} from the series, the boundary formula recovers the
    // shift through order ε up to the neglected ε² terms.
    let (g, eps) = (1.0f64, 1e-3f64);
    let s = solve_even(2, 3).unwrap();
    let factor = s.wave_factor();
    let u = WaveProfile::harmonic(8.0, 4001, |x: f64| x.powi(4)).unwrap();
    let tau = u.map(|x| -factor.eval(&[x, eps, 1.0 / g]).ln());
    let d = shift_from_boundary(&u, &tau, g).unwrap();
    let want = s.delta_k(1).eval(&[1.0 / g]) + eps * s.delta_k(2).eval(&[1.0 / g]);
    let bound = 2.0 * eps * eps * s.delta_k(3).eval(&[1.0 / g]).abs();
    assert!((d - want).abs() < bound, "{d} vs {want}");
}
