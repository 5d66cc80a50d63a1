//! Hardy–Littlewood and sharp maximal functions on a grid, with the empirical
//! constant of `(Mg)* <= c g**`.
//!
//! cargo run --release --example maximal

use metsym::maximal::{hl_maximal, riesz_constant, sharp_maximal};
use metsym::space::Grid;
use metsym::verify::whole_ball;

fn main() -> metsym::Result<()> {
    let grid = Grid::unit_cube(2, 32);
    let s = grid.space();
    let g = grid.sample(|x| if x[0] < 0.3 && x[1] < 0.3 { 1.0 } else { 0.0 });
    let mg = hl_maximal(&s, &g)?;
    let (c, t) = riesz_constant(&mg, &g, s.weights())?;
    println!("max Mg = {:.4}, min Mg = {:.4}", mg.values.iter().cloned().fold(0.0, f64::max), mg.values.iter().cloned().fold(f64::MAX, f64::min));
    println!("(Mg)*/g** peaks at t = {t:.4} with c = {c:.4}");

    let f = grid.sample(|x| (6.0 * x[0]).sin() + x[1]);
    let b0 = whole_ball(&s)?;
    let sharp = sharp_maximal(&s, &f, &b0, 1.0, 1.5)?;
    println!("sharp maximal (p = 1, q = 1.5): max {:.4}", sharp.values.iter().cloned().fold(0.0, f64::max));
    Ok(())
}
