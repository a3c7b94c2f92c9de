//! Exact polynomial algebra: parse, differentiate, average over angles.
use trajquad::exactalg::{hermite, Geometry, MultiPoly, Var};

fn main() {
    let vars = [Var::R, Var::U, Var::Eps];
    let s = MultiPoly::parse_in("1/2*eps*r^2*u + eps*r*u", &vars).unwrap();
    println!("S            = {s}");
    println!("(∇S)²        = {}", MultiPoly::grad_dot(&s, &s, Geometry::RadialPolar).unwrap());
    println!("∇²S          = {}", s.laplacian(Geometry::RadialPolar).unwrap());
    println!("<(∇S)²>_u    = {}", MultiPoly::grad_dot(&s, &s, Geometry::RadialPolar).unwrap().angular_average());
    for n in 0..=4 {
        println!("H_{n}(x)      = {}", hermite(n, Var::X));
    }
}
