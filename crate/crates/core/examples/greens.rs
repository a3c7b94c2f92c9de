//! Green's-operator identities on the harmonic profile S = x²/2.
use trajquad::greens::{check_dbar_hermite, check_green_residual, check_one_plus_ct, shift_from_boundary, WaveProfile};

fn main() {
    let (g, extent, n) = (1.0, 8.0, 4001);
    for l in 1..=4 {
        let r = check_dbar_hermite(l, g, extent, n).unwrap();
        println!("{:<45} {:.2e}", r.identity, r.max_residual);
    }
    let f = WaveProfile::harmonic(extent, n, |x: f64| x.powi(3)).unwrap();
    for r in [check_one_plus_ct(&f, g).unwrap(), check_green_residual(&f, g).unwrap()] {
        println!("{:<45} {:.2e}", r.identity, r.max_residual);
    }
    let u = WaveProfile::harmonic(extent, n, |x: f64| x.powi(4)).unwrap();
    println!("shift for U = x^4: {:.10} (3/4 expected)", shift_from_boundary(&u, &u.map(|_| 0.0), g).unwrap());
}
