//! CC geometry of the Heisenberg group on a lattice: horizontal lines, vertical
//! distances against `2√(πτ)`, and volume growth of balls.
//!
//! cargo run --release --example heisenberg [h]

use std::f64::consts::PI;
use std::time::Instant;

use metsym::carnot::{CCGrid, GridSpec};

fn main() -> metsym::Result<()> {
    let h: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let clock = Instant::now();
    let grid = CCGrid::new(GridSpec::heisenberg(h, [-0.6, 0.6], [-0.03, 0.17], 16))?;
    println!("{} nodes, {} directions, h = {h}", grid.len(), grid.direction_count());
    let origin = grid.node(&[0.0, 0.0, 0.0]).unwrap();
    let row = grid.distances(origin)?;
    println!("dijkstra: {:.1}s, {} unreachable", clock.elapsed().as_secs_f64(), row.unreachable);

    for a in [0.1, 0.3, 0.5] {
        let d = row.dist[grid.node(&[a, 0.0, 0.0]).unwrap()];
        println!("d(0, ({a},0,0)) = {d:.6}");
    }

    let taus = [0.01, 0.02, 0.04, 0.08, 0.16];
    let mut pts = Vec::new();
    for tau in taus {
        let d = row.dist[grid.node(&[0.0, 0.0, tau]).unwrap()];
        println!("d(0, (0,0,{tau})) = {d:.5}   2√(πτ) = {:.5}", 2.0 * (PI * tau).sqrt());
        pts.push((tau.ln(), d.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    println!("log-log slope {slope:.4}");

    for r in [0.1, 0.15, 0.2, 0.3] {
        let c1 = row.dist.iter().filter(|d| **d <= r).count();
        let c2 = row.dist.iter().filter(|d| **d <= 2.0 * r).count();
        println!("r = {r}: |B(r)| = {c1} cells, |B(2r)| = {c2}, s = {:.3}", (c2 as f64 / c1 as f64).log2());
    }
    Ok(())
}
