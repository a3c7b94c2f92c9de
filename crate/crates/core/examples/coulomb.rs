//! Hydrogen perturbed by εr² and the Stark effect, order by order.
use trajquad::coulomb::{solve_isotropic, solve_stark};
use trajquad::exactalg::{MultiPoly, Var};

fn main() {
    let u = MultiPoly::parse_in("r^2", &[Var::R]).unwrap();
    let iso = solve_isotropic(&u, 8).unwrap();
    for (n, s) in iso.s_terms.iter().enumerate().skip(2) {
        println!("U = r^2  S{n} = {s}");
    }
    println!("U = r^2  E + g^4/2 = {}", iso.energy_correction(8).unwrap());
    let stark = solve_stark(12).unwrap();
    println!("Stark    E = {}", stark.energy_text(12).unwrap());
}
