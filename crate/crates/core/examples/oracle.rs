//! Finite-difference eigenvalues for a 1-D well and the radial Coulomb problem.
use trajquad::oracle::{solve_1d, solve_radial};

fn main() {
    let o = solve_1d(|x| 0.5 * x * x + 0.05 * x.powi(4), (-8.0, 8.0), 2000, 4).unwrap();
    for (k, (e, err)) in o.eigenvalues.iter().zip(&o.error_estimates).enumerate() {
        println!("quartic level {k}: {e:.10} ± {err:.1e}");
    }
    let r = solve_radial(1.0, |r| r * r, 1e-3, 40.0, 8000).unwrap();
    println!("hydrogen + 1e-3 r^2: {:.10} ± {:.1e}", r.eigenvalues[0], r.error_estimates[0]);
}
