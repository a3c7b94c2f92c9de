//! Numeric g⁻¹ hierarchy for a quartic well, summed at a few couplings.
use trajquad::gexpand::{assemble_energy, hierarchy};
use trajquad::trajectory::{build_grid, Direction, Potential1D};

fn main() {
    let v = Potential1D::parse("1/2*x^2 + 1/10*x^4", 0.0).unwrap();
    let grid = build_grid(&v, 2.0, 2001, Direction::Plus).unwrap();
    let sol = hierarchy(&grid, 3).unwrap();
    for (k, e) in sol.energies.iter().enumerate() {
        println!("E{k} = {e:.12}");
    }
    for g in [4.0, 8.0, 16.0] {
        println!("g = {g:>4}: E ≈ {:.10}", assemble_energy(&sol, g));
    }
}
