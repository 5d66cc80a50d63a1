//! Empirical Poincaré constant over all balls of a grid, with its witness ball.
//!
//! cargo run --release --example poincare

use metsym::functions::Generator;
use metsym::space::Grid;
use metsym::verify::{poincare_constant, whole_ball, SobolevPair};

fn main() -> metsym::Result<()> {
    for n in [16, 32] {
        let grid = Grid::unit_cube(2, n);
        let s = grid.space();
        let pair = SobolevPair::euclidean(&grid, Generator::SinProd.sample(&grid))?;
        let omega = whole_ball(&s)?;
        for (p, q) in [(1.0, 1.0), (2.0, 2.0)] {
            let r = poincare_constant(&s, &pair, p, q, 1.0, &omega)?;
            println!("N = {n}, p = {p}, q = {q}: c = {:.4}, witness {:?}", r.best_constant, r.witness);
        }
    }
    Ok(())
}
