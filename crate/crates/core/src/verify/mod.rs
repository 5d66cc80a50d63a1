//! Scanners that evaluate both sides of Poincaré, symmetrization, embedding and
//! Faber–Krahn inequalities and report the worst ratio.

mod bi;
mod counterexample;
mod embed;
mod poincare;
mod report;

pub use bi::{
    bi_curve, bi_curve_with, bi_lhs_curve, bi_lhs_curve_from_field, factorization, four_ball, BiOptions,
    Factorization,
};
pub use counterexample::{counterexample_run, CounterexampleRow, CounterexampleTable, GradientCheck};
pub use embed::{
    embedding_check, faber_krahn, faber_krahn_euclidean, faber_krahn_sup, hardy_safeguard, support_measure,
    FaberKrahnReport, HardySafeguard,
};
pub use poincare::{poincare_constant, poincare_over_balls, poincare_scan, BallScan};
pub use report::{ratio, Curve, InequalityReport, Verdict, Witness};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{BallIndexSet, Grid, MetricMeasureSpace};

/// Where the gradient surrogate of a [`SobolevPair`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientSource {
    Supplied,
    /// Central differences inside the grid, one-sided at the boundary.
    EuclideanGradient,
    HorizontalGradient,
}

/// A function and a nonnegative upper-gradient surrogate on the same points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolevPair {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub provenance: GradientSource,
}

impl SobolevPair {
    pub fn new(f: Vec<f64>, g: Vec<f64>, provenance: GradientSource) -> Result<Self> {
        if f.len() != g.len() {
            return Err(Error::Argument(format!("f has {} values, g has {}", f.len(), g.len())));
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument("f must be finite".into()));
        }
        if g.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Argument("g must be finite and nonnegative".into()));
        }
        Ok(Self { f, g, provenance })
    }

    /// `f` with its discrete Euclidean gradient modulus.
    pub fn euclidean(grid: &Grid, f: Vec<f64>) -> Result<Self> {
        let g = grid.gradient_norm(&f);
        Self::new(f, g, GradientSource::EuclideanGradient)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            f: self.f.iter().map(|v| v * lambda).collect(),
            g: self.g.iter().map(|v| v * lambda.abs()).collect(),
            provenance: self.provenance,
        }
    }

    pub(crate) fn check_space(&self, space: &MetricMeasureSpace) -> Result<()> {
        if self.f.len() != space.len() {
            return Err(Error::Argument(format!(
                "pair has {} values, the space has {} points",
                self.f.len(),
                space.len()
            )));
        }
        Ok(())
    }
}

/// `f χ_{B0}`, optionally with the `B0`-mean removed first.
pub(crate) fn restrict(space: &MetricMeasureSpace, f: &[f64], b0: &BallIndexSet, zero_average: bool) -> Vec<f64> {
    let w = space.weights();
    let mean = if zero_average {
        b0.members.iter().map(|&i| f[i] * w[i]).sum::<f64>() / b0.mass
    } else {
        0.0
    };
    let mut out = vec![0.0; f.len()];
    for &i in &b0.members {
        out[i] = f[i] - mean;
    }
    out
}

/// The ball around the point nearest the centroid of all points that contains the whole space.
pub fn whole_ball(space: &MetricMeasureSpace) -> Result<BallIndexSet> {
    let n = space.len();
    let center = if space.dim() > 0 {
        let d = space.dim();
        let mut c = vec![0.0; d];
        for i in 0..n {
            for (a, x) in space.coords(i).unwrap().iter().enumerate() {
                c[a] += x / n as f64;
            }
        }
        (0..n)
            .min_by(|&a, &b| {
                let da: f64 = space.coords(a).unwrap().iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum();
                let db: f64 = space.coords(b).unwrap().iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum();
                da.total_cmp(&db).then(a.cmp(&b))
            })
            .unwrap()
    } else {
        (0..n)
            .min_by(|&a, &b| space.eccentricity(a).total_cmp(&space.eccentricity(b)).then(a.cmp(&b)))
            .unwrap()
    };
    space.whole(center)
}
