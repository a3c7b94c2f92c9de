//! Exact Rayleigh-Schrödinger series for εx⁴ and εx on the oscillator.
use trajquad::oscpert::{solve_even, solve_odd};

fn main() {
    let quartic = solve_even(2, 4).unwrap();
    for k in 1..=4 {
        println!("x^4  Δ({k}) = {}", quartic.delta_k(k));
    }
    println!("x^4  E(g=2, ε=0.02) through ε² = {:.10}", quartic.energy(2.0, 0.02, 2));
    let linear = solve_odd(0, 4).unwrap();
    println!("x    e^(-τ) = {}", linear.wave_factor());
    println!("x    εΔ     = {}", linear.energy_shift());
}
