//! Decreasing rearrangement of a sampled function and a few r.i. norms of it.
//!
//! cargo run --release --example rearrangement

use metsym::rearrange::{rearrangement, ri_norm, ypr_norm};
use metsym::space::Grid;
use metsym::RISpaceSpec;

fn main() -> metsym::Result<()> {
    let grid = Grid::cube(2, -1.0, 1.0, 64);
    let f = grid.sample(|x| (1.0 - x[0].hypot(x[1])).max(0.0));
    let star = rearrangement(&f, &vec![grid.cell_volume(); grid.len()])?;
    println!("f* has {} pieces on (0, {}]", star.pieces(), star.domain());
    for t in [0.01, 0.1, 1.0, 3.0] {
        println!(
            "t = {t:<5} f* = {:.4}  f** = {:.4}  osc_1 = {:.4}",
            star.value_at(t),
            star.average_star(t)?,
            star.oscillation(t, 1.0)?
        );
    }
    for y in ["lp:1", "lp:2", "lorentz:2,1", "linf", "hbw:2"] {
        let spec: RISpaceSpec = y.parse()?;
        println!("{y:<12} {:.6}", ri_norm(&star, &spec)?);
    }
    println!("Y^2(inf,2), Y = L2: {:.6}", ypr_norm(&star, &RISpaceSpec::Lp { p: 2.0 }, 2.0, 2.0)?);
    Ok(())
}
