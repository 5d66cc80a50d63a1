//! Faber–Krahn ratios for cones of different radii, and the sup-norm bound that
//! only exists for `q > s`.
//!
//! cargo run --release --example faber_krahn

use metsym::functions::Generator;
use metsym::space::Grid;
use metsym::verify::{faber_krahn, faber_krahn_euclidean, faber_krahn_sup, whole_ball, SobolevPair};
use metsym::RISpaceSpec;

fn main() -> metsym::Result<()> {
    let grid = Grid::cube(2, -1.0, 1.0, 256);
    let s = grid.space();
    let b0 = whole_ball(&s)?;
    let z = RISpaceSpec::Lp { p: 1.0 };
    println!("1/(3√π) = {:.5}", 1.0 / (3.0 * std::f64::consts::PI.sqrt()));
    for r in [0.1, 0.2, 0.4] {
        let pair = SobolevPair::euclidean(&grid, Generator::Cone { radius: r }.sample(&grid))?;
        let fk = faber_krahn(&s, &b0, &pair, 1.0, 4.0, 2.0, &z, 0.5)?;
        println!(
            "R = {r}: ‖f‖₁/(‖f‖₀‖∇f‖₂) = {:.5}, part (i) {:.5}, part (ii) {:.5}",
            faber_krahn_euclidean(&pair, s.weights(), 2, 2.0),
            fk.part_i.best_constant,
            fk.part_ii.map_or(f64::NAN, |r| r.best_constant)
        );
    }
    let pair = SobolevPair::euclidean(&grid, Generator::Cone { radius: 0.4 }.sample(&grid))?;
    match faber_krahn_sup(&s, &b0, &pair, 2.0, 2.0, &z, 0.5) {
        Err(e) => println!("q = s = 2: {e}"),
        Ok(r) => println!("q = s = 2 unexpectedly ran: {}", r.best_constant),
    }
    Ok(())
}
