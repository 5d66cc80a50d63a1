use rayon::prelude::*;

use crate::carnot::lattice::Workspace;
use crate::carnot::{horizontal_gradient, CCGrid};
use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;
use crate::verify::{poincare_scan, whole_ball, BallScan, GradientSource, InequalityReport, SobolevPair};

/// Largest window for which all pairwise distances are computed.
pub const MAX_WINDOW_NODES: usize = 3000;

/// The lattice nodes inside a box, as a metric measure space with CC distances.
#[derive(Debug, Clone)]
pub struct CCSpace {
    pub space: MetricMeasureSpace,
    /// Lattice index of each point.
    pub nodes: Vec<usize>,
    pub coords: Vec<Vec<f64>>,
    /// Distance from each point to the nearest lattice node outside the window
    /// (`inf` when the window is the whole lattice).
    pub clearance: Vec<f64>,
}

impl CCSpace {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Picks the window entries out of a lattice-sized vector.
    pub fn restrict(&self, lattice_values: &[f64]) -> Vec<f64> {
        self.nodes.iter().map(|&i| lattice_values[i]).collect()
    }

    /// `(f, |Xf|)` on the window, with the gradient taken on the full lattice.
    pub fn horizontal_pair(&self, grid: &CCGrid, f: &[f64]) -> Result<SobolevPair> {
        if f.len() != grid.len() {
            return Err(Error::Argument(format!("{} values for {} lattice nodes", f.len(), grid.len())));
        }
        let g = horizontal_gradient(grid.fields(), &grid.as_grid(), f)?;
        SobolevPair::new(self.restrict(f), self.restrict(&g), GradientSource::HorizontalGradient)
    }

    /// Dense distance table, one row per point.
    pub fn distance_csv(&self) -> String {
        let n = self.len();
        let mut out = String::new();
        for i in 0..n {
            let row = self.space.row(i);
            let line: Vec<String> = row.iter().map(|d| d.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// All-pairs CC distances between the lattice nodes inside `window` (`[lo, hi]` per axis).
pub fn build_cc_space(grid: &CCGrid, window: &[[f64; 2]]) -> Result<CCSpace> {
    let d = grid.spec().resolution.len();
    if window.len() != d {
        return Err(Error::Argument(format!("window needs {d} intervals")));
    }
    let eps = 1e-9;
    let nodes: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let x = grid.coords(i);
            x.iter().zip(window).enumerate().all(|(a, (v, [lo, hi]))| {
                let tol = eps * grid.spacing(a);
                *v >= lo - tol && *v <= hi + tol
            })
        })
        .collect();
    let w = nodes.len();
    if w == 0 {
        return Err(Error::Argument("window contains no lattice node".into()));
    }
    if w > MAX_WINDOW_NODES {
        return Err(Error::Coverage(format!(
            "window holds {w} nodes; pairwise distances are computed for at most {MAX_WINDOW_NODES}"
        )));
    }
    let mut slot = vec![u32::MAX; grid.len()];
    for (k, &i) in nodes.iter().enumerate() {
        slot[i] = k as u32;
    }

    let rows: Vec<(Vec<f64>, f64)> = nodes
        .par_iter()
        .map_init(
            || Workspace::new(grid.len()),
            |ws, &src| {
                let mut row = vec![f64::INFINITY; w];
                let mut left = w;
                let mut clearance = f64::INFINITY;
                ws.run(grid, src, &mut |v, dist| {
                    if slot[v] == u32::MAX {
                        if clearance.is_infinite() {
                            clearance = dist;
                        }
                    } else {
                        row[slot[v] as usize] = dist;
                        left -= 1;
                    }
                    left > 0 || clearance.is_infinite()
                });
                (row, clearance)
            },
        )
        .collect();

    let mut flat = vec![0.0; w * w];
    for i in 0..w {
        for j in 0..w {
            let (a, b) = (rows[i].0[j], rows[j].0[i]);
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::Coverage(format!(
                    "no path between window nodes {} and {}",
                    nodes[i], nodes[j]
                )));
            }
            // both are path lengths; summation order can differ by an ulp
            flat[i * w + j] = a.min(b);
        }
    }
    let weights = vec![grid.cell_volume(); w];
    let space = MetricMeasureSpace::from_flat_distances(weights, flat)?;
    Ok(CCSpace {
        space,
        coords: nodes.iter().map(|&i| grid.coords(i)).collect(),
        clearance: rows.iter().map(|r| r.1).collect(),
        nodes,
    })
}

/// Poincaré constant of `(f, |Xf|)` on the window with `σ = 1`, `q = p`, over balls
/// `B(ξ,r)` whose double `B(ξ,2r)` stays inside the window.
pub fn jerison_check(
    cc: &CCSpace,
    grid: &CCGrid,
    f: &[f64],
    p: f64,
    radii: Option<&[f64]>,
) -> Result<InequalityReport> {
    let pair = cc.horizontal_pair(grid, f)?;
    let mut scan = BallScan::new(p, p, 1.0, whole_ball(&cc.space)?);
    scan.radius_cap = Some(cc.clearance.iter().map(|c| c / 2.0).collect());
    scan.radii = radii.map(<[f64]>::to_vec);
    let mut report = poincare_scan(&cc.space, &pair, &scan)?;
    report.name = "jerison".into();
    report = report
        .param("fields", grid.fields().name())
        .param("h", grid.spec().h)
        .param("directions", grid.direction_count() as f64)
        .param("nodes", cc.len() as f64);
    Ok(report)
}
