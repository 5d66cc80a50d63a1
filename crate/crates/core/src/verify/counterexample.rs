use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::Generator;
use crate::rearrange::{rearrangement, StepFunction};
use crate::space::Grid;
use crate::verify::report::ratio;

/// Minimum number of cells across the inner disk of `f_k`.
const MIN_CELLS_ACROSS: f64 = 4.0;
/// Width of the band around `π/k²` excluded from the `|∇f_k|*` comparison, in cells.
const RIM_CELLS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRow {
    pub k: f64,
    pub tau: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

/// How close the discrete `|∇f_k|` comes to `k χ_(0, π/k²]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck {
    pub k: f64,
    /// Largest relative gap between `G**` and `k min(t, π/k²)/t` over the breakpoints of `G*`.
    pub star_star_error: f64,
    /// Largest `|G* - k χ|/k` over breakpoints away from the rim band.
    pub star_error: f64,
    /// `(1/T) ∫_0^T (F - F(T))` with `T = 4`.
    pub limiting_lhs: f64,
    /// `‖f_k‖_1 / 4`.
    pub mean_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleTable {
    pub n: usize,
    pub rows: Vec<CounterexampleRow>,
    pub gradients: Vec<GradientCheck>,
}

impl CounterexampleTable {
    pub fn ratio(&self, k: f64, tau: f64) -> Option<f64> {
        self.rows.iter().find(|r| r.k == k && r.tau == tau).map(|r| r.ratio)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,tau,t,lhs,rhs,ratio\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{},{}\n", r.k, r.tau, r.t, r.lhs, r.rhs, r.ratio));
        }
        out
    }
}

fn gradient_check(k: f64, g_star: &StepFunction, f_star: &StepFunction, h: f64) -> Result<GradientCheck> {
    let a = PI / (k * k);
    let (band_lo, band_hi) = (PI * (1.0 / k - RIM_CELLS * h).max(0.0).powi(2), PI * (1.0 / k + RIM_CELLS * h).powi(2));
    let mut star_star_error: f64 = 0.0;
    let mut star_error: f64 = 0.0;
    for (&t, &v) in g_star.breakpoints().iter().zip(g_star.values()) {
        let model = k * t.min(a) / t;
        star_star_error = star_star_error.max((g_star.average_star(t)? - model).abs() / model);
        if t < band_lo || t > band_hi {
            let target = if t <= a { k } else { 0.0 };
            star_error = star_error.max((v - target).abs() / k);
        }
    }
    let big_t = f_star.domain();
    Ok(GradientCheck {
        k,
        star_star_error,
        star_error,
        limiting_lhs: f_star.oscillation(big_t, 1.0)?,
        mean_value: f_star.integral() / big_t,
    })
}

/// Runs `f_k = min(1, k|x|)` on `[-1,1]²` with `n` cells per side, `p = q = 1`, `s = 2`,
/// and reports the bi ratio at `t = τ·4` for every `k` and probe `τ`.
pub fn counterexample_run(k_list: &[f64], n: usize, c2_probe: &[f64]) -> Result<CounterexampleTable> {
    if let Some(&tau) = c2_probe.iter().find(|&&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::Argument(format!("probe fractions must lie in (0, 1], got {tau}")));
    }
    let grid = Grid::cube(2, -1.0, 1.0, n);
    let h = grid.spacing(0);
    let weights = vec![grid.cell_volume(); grid.len()];
    let total: f64 = weights.iter().sum();
    let mut rows = Vec::new();
    let mut gradients = Vec::new();
    for &k in k_list {
        if !(k > 0.0) {
            return Err(Error::Argument(format!("k must be positive, got {k}")));
        }
        let across = (2.0 / k) / h;
        if across < MIN_CELLS_ACROSS {
            return Err(Error::Resolution(format!(
                "n = {n} gives {across:.2} cells across the disk of radius 1/{k}; need at least {MIN_CELLS_ACROSS}"
            )));
        }
        let f = Generator::Fk { k }.sample(&grid);
        let g = grid.gradient_norm(&f);
        let f_star = rearrangement(&f, &weights)?;
        let g_star = rearrangement(&g, &weights)?;
        for &tau in c2_probe {
            let t = tau * total;
            let lhs = t.powf(-0.5) * f_star.oscillation(t, 1.0)?;
            let rhs = g_star.average_star(t)?;
            rows.push(CounterexampleRow { k, tau, t, lhs, rhs, ratio: ratio(lhs, rhs) });
        }
        gradients.push(gradient_check(k, &g_star, &f_star, h)?);
    }
    Ok(CounterexampleTable { n, rows, gradients })
}
