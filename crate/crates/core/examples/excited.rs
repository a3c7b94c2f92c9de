//! Excited-state factors χ₀, χ₁ and the first-order shift of a quartic well.
use trajquad::exactalg::int;
use trajquad::excited::{chi0_e0, chi1_harmonic, excited_e1_numeric, ExcitedSpec};
use trajquad::gexpand::hierarchy;
use trajquad::trajectory::{build_grid, Direction, Potential1D};

fn main() {
    let spec = ExcitedSpec::new(vec![int(1), int(2)], vec![2, 1]).unwrap();
    let (chi0, e0) = chi0_e0(&spec);
    println!("χ0 = {chi0}, E0 = {e0}");
    println!("χ1 = {}", chi1_harmonic(&spec));
    let v = Potential1D::parse("1/2*x^2 + 1/20*x^4", 0.0).unwrap();
    let grid = build_grid(&v, 2.0, 4001, Direction::Plus).unwrap();
    let s1 = hierarchy(&grid, 1).unwrap().s.remove(0);
    for n in 1..=3 {
        let e1 = excited_e1_numeric(&grid, &s1, n).unwrap();
        println!("n = {n}: E1 = {e1:.8} (λ·3/4·(2n²+2n) = {:.8})", 0.05 * 0.75 * (2 * n * n + 2 * n) as f64);
    }
}
