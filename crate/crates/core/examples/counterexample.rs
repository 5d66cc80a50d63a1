//! `f_k = min(1, k|x|)` on `[-1,1]²`: the ratio near `t = |Ω|` grows with `k` while it
//! stays put for small `t`.
//!
//! cargo run --release --example counterexample [n]

use metsym::verify::counterexample_run;

fn main() -> metsym::Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(512);
    let table = counterexample_run(&[4.0, 8.0, 16.0], n, &[0.1, 0.5, 0.9, 0.999, 1.0])?;
    print!("{}", table.to_csv());
    for g in &table.gradients {
        println!(
            "k = {:>2}: |∇f|* error {:.4}, |∇f|** error {:.4}, mean of f {:.4}",
            g.k, g.star_error, g.star_star_error, g.mean_value
        );
    }
    Ok(())
}
