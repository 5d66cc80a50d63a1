//! Poincaré constant of `f = x` against its horizontal gradient on Heisenberg windows at
//! two resolutions, then the same space fed into the `Y = L²` embedding check.
//!
//! cargo run --release --example jerison

use std::time::Instant;

use metsym::carnot::{build_cc_space, jerison_check, CCGrid, GridSpec};
use metsym::verify::{embedding_check, whole_ball};
use metsym::RISpaceSpec;

const WINDOW: [[f64; 2]; 3] = [[-0.3, 0.3], [-0.3, 0.3], [-0.02, 0.02]];

fn main() -> metsym::Result<()> {
    let mut constants = Vec::new();
    for h in [0.1, 0.075] {
        let clock = Instant::now();
        let grid = CCGrid::new(GridSpec::heisenberg(h, [-0.6, 0.6], [-0.08, 0.08], 16))?;
        let cc = build_cc_space(&grid, &WINDOW)?;
        let f: Vec<f64> = (0..grid.len()).map(|i| grid.coords(i)[0]).collect();
        let report = jerison_check(&cc, &grid, &f, 2.0, None)?;
        println!(
            "h = {h}: {} window nodes of {}, c = {:.4} (witness {:?}), {:.1}s",
            cc.len(),
            grid.len(),
            report.best_constant,
            report.witness,
            clock.elapsed().as_secs_f64()
        );
        let pair = cc.horizontal_pair(&grid, &f)?;
        let b0 = whole_ball(&cc.space)?;
        let emb = embedding_check(&cc.space, &b0, &pair, 2.0, 2.0, 4.0, &RISpaceSpec::Lp { p: 2.0 }, false)?;
        println!("  embedding into Y^2(inf,4) with Y = L2: ratio {:.6}", emb.best_constant);
        constants.push(report.best_constant);
    }
    println!("resolution ratio {:.3}", constants[0].max(constants[1]) / constants[0].min(constants[1]));
    Ok(())
}
