//! The symmetrization curve `t^{-1/s} osc_p(f*, t)` against `((g^q)**)^{1/q}` and the
//! product of the three constants that bound it.
//!
//! cargo run --release --example bi_pipeline

use metsym::functions::Generator;
use metsym::space::Grid;
use metsym::verify::{bi_curve, factorization, whole_ball, BiOptions, SobolevPair};

fn main() -> metsym::Result<()> {
    for n in [32, 64, 128] {
        let grid = Grid::unit_cube(2, n);
        let s = grid.space();
        let pair = SobolevPair::euclidean(&grid, Generator::SinProd.sample(&grid))?;
        let r = bi_curve(&s, &whole_ball(&s)?, &pair, 1.0, 1.0, 2.0, 0.1)?;
        let i = r.argmax().unwrap();
        println!("N = {n:>3}: best constant {:.5} at t = {:.5}", r.best_constant, r.t_grid[i]);
    }
    let grid = Grid::unit_cube(2, 32);
    let s = grid.space();
    let pair = SobolevPair::euclidean(&grid, Generator::SinProd.sample(&grid))?;
    let f = factorization(&s, &whole_ball(&s)?, &pair, 1.0, 1.0, 2.0, 0.1, &BiOptions::default())?;
    println!("N = 32: {f:?}");
    println!("bound holds: {}", f.holds(1.0));
    Ok(())
}
