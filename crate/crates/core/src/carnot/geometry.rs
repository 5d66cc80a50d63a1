use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::carnot::{CCGrid, GridSpec};
use crate::error::{Error, Result};

/// Multiples of 0.04, so they are nodes at `h = 0.02` and `h = 0.04`.
pub const HORIZONTAL_TARGETS: [f64; 3] = [0.12, 0.24, 0.48];
pub const VERTICAL_TARGETS: [f64; 5] = [0.01, 0.02, 0.04, 0.08, 0.16];
pub const GROWTH_RADII: [f64; 2] = [0.15, 0.3];

/// Distances from the origin of a Heisenberg lattice and the growth of its balls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergGeometry {
    pub h: f64,
    pub directions: usize,
    pub nodes: usize,
    /// `(a, d(0, (a,0,0)))` with `a` the coordinate of the nearest node.
    pub horizontal: Vec<[f64; 2]>,
    /// `(τ, d(0, (0,0,τ)), 2√(πτ))`.
    pub vertical: Vec<[f64; 3]>,
    /// Least-squares slope of `log d` against `log τ`.
    pub slope: f64,
    pub radii: [f64; 2],
    pub counts: [usize; 2],
    /// `log(count₂/count₁) / log(r₂/r₁)`.
    pub dimension: f64,
}

pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// One Dijkstra from the origin of `[-0.6,0.6]² × [-0.03,0.17]` at step `h`.
pub fn heisenberg_geometry(h: f64, directions: usize) -> Result<HeisenbergGeometry> {
    let grid = CCGrid::new(GridSpec::heisenberg(h, [-0.6, 0.6], [-0.03, 0.17], directions))?;
    let at = |x: [f64; 3]| grid.node(&x).ok_or_else(|| Error::Argument(format!("{x:?} is off the lattice")));
    let row = grid.distances(at([0.0; 3])?)?;
    let horizontal = HORIZONTAL_TARGETS
        .iter()
        .map(|&a| {
            let node = at([a, 0.0, 0.0])?;
            Ok([grid.coords(node)[0], row.dist[node]])
        })
        .collect::<Result<Vec<_>>>()?;
    let vertical = VERTICAL_TARGETS
        .iter()
        .map(|&t| Ok([t, row.dist[at([0.0, 0.0, t])?], 2.0 * (PI * t).sqrt()]))
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(&vertical.iter().map(|v| (v[0], v[1])).collect::<Vec<_>>());
    let count = |r: f64| row.dist.iter().filter(|d| **d <= r).count();
    let counts = [count(GROWTH_RADII[0]), count(GROWTH_RADII[1])];
    let dimension = (counts[1] as f64 / counts[0] as f64).ln() / (GROWTH_RADII[1] / GROWTH_RADII[0]).ln();
    Ok(HeisenbergGeometry {
        h,
        directions: grid.direction_count(),
        nodes: grid.len(),
        horizontal,
        vertical,
        slope,
        radii: GROWTH_RADII,
        counts,
        dimension,
    })
}
