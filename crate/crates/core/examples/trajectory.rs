//! Classical action S₀ along the zero-energy trajectory of a quartic well.
use trajquad::trajectory::{build_grid, Direction, Potential1D};

fn main() {
    let v = Potential1D::parse("1/2*x^2 + 1/10*x^4", 0.0).unwrap();
    let grid = build_grid(&v, 2.0, 21, Direction::Plus).unwrap();
    println!("{:>6} {:>14} {:>14}", "x", "S0", "(dS0)^2");
    for i in 0..grid.len() {
        println!("{:>6.2} {:>14.10} {:>14.10}", grid.nodes[i], grid.s0[i], grid.grad2[i]);
    }
}
