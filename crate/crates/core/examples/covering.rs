//! Covers a small set by balls that are at most half full of it and checks the
//! four covering properties.
//!
//! cargo run --release --example covering

use metsym::maximal::construct_covering;
use metsym::space::Grid;
use metsym::verify::whole_ball;

fn main() -> metsym::Result<()> {
    let grid = Grid::unit_cube(2, 24);
    let s = grid.space();
    let b = whole_ball(&s)?;
    let e: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let x = grid.point(i);
            (x[0] - 0.3).hypot(x[1] - 0.3) < 0.12 || (x[0] - 0.7).hypot(x[1] - 0.6) < 0.08
        })
        .collect();
    let cover = construct_covering(&s, &b, &e, 0.5)?;
    println!("|E| = {} points, {} balls", e.len(), cover.balls.len());
    for ball in cover.balls.iter().take(5) {
        println!("  center {:>4} radius {:.4} mass {:.4}", ball.center, ball.radius, ball.mass);
    }
    println!(
        "properties: {} {} {} {}, overlap constant {:.3}",
        cover.property1.holds, cover.property2.holds, cover.property3.holds, cover.property4.holds, cover.overlap_constant
    );
    Ok(())
}
