//! Sampled doubling constants of grid spaces and of a space loaded from JSON.
//!
//! cargo run --release --example doubling

use metsym::space::{doubling_stats_auto, Grid, MetricMeasureSpace};

fn main() -> metsym::Result<()> {
    for d in 1..=3 {
        let grid = Grid::unit_cube(d, [200, 24, 10][d - 1]);
        let stats = doubling_stats_auto(&grid.space(), None)?;
        println!("[0,1]^{d}: c_d = {:.3}, s = {:.3} from {} samples", stats.c_d, stats.s, stats.samples.len());
    }
    let json = r#"{"weights":[1,1,1,1],"dist":[[0,1,2,3],[1,0,1,2],[2,1,0,1],[3,2,1,0]]}"#;
    let path = MetricMeasureSpace::from_json(json)?;
    let stats = doubling_stats_auto(&path, None)?;
    println!("4-point path: c_d = {}", stats.c_d);
    Ok(())
}
