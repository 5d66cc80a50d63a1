//! Maximal operators over the finite family of closed balls of a space.
//!
//! Every distinct ball is `{d(c, ·) <= r}` with `r` one of the distances from `c`,
//! so all suprema below are maxima over an explicit finite list.

mod covering;
pub(crate) mod oscillation;

pub use covering::{construct_covering, CoveringReport, PropertyCheck};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::{rearrangement, StepFunction};
use crate::space::{BallIndexSet, MetricMeasureSpace};
use oscillation::{Oscillator, Ranks};

/// Largest `|B0|` accepted by [`sharp_maximal`] unless overridden.
pub const DEFAULT_SHARP_LIMIT: usize = 4096;

/// Pointwise values of a maximal function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalField {
    pub values: Vec<f64>,
    /// Operator and parameters, e.g. `hl` or `sharp p=1 q=1.5 b0=(12, 0.4)`.
    pub provenance: String,
}

impl MaximalField {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("point_index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v}\n"));
        }
        out
    }

    pub fn rearrangement(&self, weights: &[f64]) -> Result<StepFunction> {
        rearrangement(&self.values, weights)
    }
}

fn check_values(space: &MetricMeasureSpace, g: &[f64]) -> Result<()> {
    if g.len() != space.len() {
        return Err(Error::Argument(format!("{} values for a space of {} points", g.len(), space.len())));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Argument("function values must be finite".into()));
    }
    Ok(())
}

fn max_merge(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = x.max(y);
    }
    a
}

/// Writes `max_{l >= i} best[l]` into the points at positions `[ends[i-1], ends[i])`.
fn propagate(order: &[usize], ends: &[usize], best: &[f64], out: &mut [f64]) {
    let mut running = f64::NEG_INFINITY;
    for i in (0..ends.len()).rev() {
        running = running.max(best[i]);
        let start = if i == 0 { 0 } else { ends[i - 1] };
        for &pt in &order[start..ends[i]] {
            out[pt] = out[pt].max(running);
        }
    }
}

/// Non-centered Hardy–Littlewood maximal function of `|g|`.
///
/// One-point balls report `|g(x)|` itself rather than `|g(x)| μ_x / μ_x`.
pub fn hl_maximal(space: &MetricMeasureSpace, g: &[f64]) -> Result<MaximalField> {
    check_values(space, g)?;
    let n = space.len();
    let w = space.weights();
    let values = (0..n)
        .into_par_iter()
        .fold(
            || vec![0.0; n],
            |mut acc, c| {
                let nb = space.neighbor_order(c);
                let ends: Vec<usize> = nb.ball_ends().collect();
                let mut best = Vec::with_capacity(ends.len());
                let (mut s, mut m, mut k) = (0.0, 0.0, 0);
                for &e in &ends {
                    while k < e {
                        let i = nb.order[k];
                        s += g[i].abs() * w[i];
                        m += w[i];
                        k += 1;
                    }
                    best.push(if e == 1 { g[nb.order[0]].abs() } else { s / m });
                }
                propagate(&nb.order, &ends, &best, &mut acc);
                acc
            },
        )
        .reduce(|| vec![0.0; n], max_merge);
    Ok(MaximalField { values, provenance: "hl".into() })
}

/// Direct enumeration of every (center, radius) ball; sums run in the same
/// (distance, index) order as [`hl_maximal`], so the two agree bit for bit.
pub fn hl_maximal_naive(space: &MetricMeasureSpace, g: &[f64]) -> Result<MaximalField> {
    check_values(space, g)?;
    let n = space.len();
    let w = space.weights();
    let mut out = vec![0.0f64; n];
    for c in 0..n {
        let row = space.row(c);
        let mut radii = row.to_vec();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        for r in radii {
            let mut members: Vec<usize> = (0..n).filter(|&i| row[i] <= r).collect();
            members.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            let (mut s, mut m) = (0.0, 0.0);
            for &i in &members {
                s += g[i].abs() * w[i];
                m += w[i];
            }
            let avg = if members.len() == 1 { g[members[0]].abs() } else { s / m };
            for &i in &members {
                out[i] = out[i].max(avg);
            }
        }
    }
    Ok(MaximalField { values: out, provenance: "hl-naive".into() })
}

/// `f#_{B0,p,q}(x) = max over balls x ∈ B ⊆ B0 of (μ(B)^{-q} Σ_B |f - f_B|^p μ)^{1/p}`.
///
/// Containment is member-set inclusion. Points outside `B0` get 0.
pub fn sharp_maximal(space: &MetricMeasureSpace, f: &[f64], b0: &BallIndexSet, p: f64, q: f64) -> Result<MaximalField> {
    sharp_maximal_limited(space, f, b0, p, q, DEFAULT_SHARP_LIMIT)
}

/// [`sharp_maximal`] with an explicit cap on `|B0|`.
pub fn sharp_maximal_limited(
    space: &MetricMeasureSpace,
    f: &[f64],
    b0: &BallIndexSet,
    p: f64,
    q: f64,
    limit: usize,
) -> Result<MaximalField> {
    check_values(space, f)?;
    if b0.members.is_empty() {
        return Err(Error::Argument("B0 has no members".into()));
    }
    if b0.members.len() > limit {
        return Err(Error::Argument(format!(
            "B0 has {} members, above the limit {limit}",
            b0.members.len()
        )));
    }
    if !(p >= 1.0 && p.is_finite()) || !(q > 0.0 && q.is_finite()) {
        return Err(Error::Argument(format!("need p >= 1 and q > 0, got p = {p}, q = {q}")));
    }
    let n = space.len();
    let w = space.weights();
    let inside = b0.mask(n);
    let ranks = Ranks::new(f);
    let values = b0
        .members
        .par_iter()
        .fold(
            || vec![0.0; n],
            |mut acc, &c| {
                let nb = space.neighbor_order(c);
                let limit = nb.order.iter().position(|&i| !inside[i]).unwrap_or(n);
                let ends: Vec<usize> = nb.ball_ends().take_while(|&e| e <= limit).collect();
                let mut osc = Oscillator::new(p, &ranks);
                let mut best = Vec::with_capacity(ends.len());
                let mut k = 0;
                for &e in &ends {
                    while k < e {
                        let i = nb.order[k];
                        osc.push(i, f[i], w[i]);
                        k += 1;
                    }
                    best.push((osc.deviation() / osc.mass().powf(q)).powf(1.0 / p));
                }
                propagate(&nb.order, &ends, &best, &mut acc);
                acc
            },
        )
        .reduce(|| vec![0.0; n], max_merge);
    Ok(MaximalField {
        values,
        provenance: format!("sharp p={p} q={q} b0=({}, {})", b0.center, b0.radius),
    })
}

/// `max_t (Mg)*(t) / g**(t)`, attained at a breakpoint of `(Mg)*` since `g**` decreases.
/// Returns the constant and the `t` where it is attained.
pub fn riesz_constant(mg: &MaximalField, g: &[f64], weights: &[f64]) -> Result<(f64, f64)> {
    let m_star = mg.rearrangement(weights)?;
    let g_rearr = rearrangement(g, weights)?;
    let mut best = (0.0, m_star.domain());
    for (&t, &v) in m_star.breakpoints().iter().zip(m_star.values()) {
        let gss = g_rearr.average_star(t)?;
        if gss > 0.0 && v / gss > best.0 {
            best = (v / gss, t);
        }
    }
    Ok(best)
}

/// `max_u u μ{Mg > u} / ‖g‖_1` over `u_grid`.
pub fn weak_type_constant(mg: &MaximalField, g: &[f64], weights: &[f64], u_grid: &[f64]) -> Result<f64> {
    let norm: f64 = g.iter().zip(weights).map(|(v, w)| v.abs() * w).sum();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let m_star = mg.rearrangement(weights)?;
    Ok(u_grid
        .iter()
        .filter(|&&u| u > 0.0)
        .map(|&u| u * m_star.distribution(u) / norm)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Grid;
    use rand::{Rng, SeedableRng};

    fn line3() -> MetricMeasureSpace {
        MetricMeasureSpace::from_distances(
            vec![1.0; 3],
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn constant_input_is_fixed() {
        let s = Grid::unit_cube(2, 6).space();
        let m = hl_maximal(&s, &vec![2.5; 36]).unwrap();
        assert!(m.values.iter().all(|&v| (v - 2.5).abs() < 1e-14));
    }

    #[test]
    fn three_point_line() {
        let m = hl_maximal(&line3(), &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.values[0], 1.0);
        assert_eq!(m.values[1], 0.5);
        assert!((m.values[2] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.values, hl_maximal_naive(&line3(), &[1.0, 0.0, 0.0]).unwrap().values);
    }

    #[test]
    fn dominates_the_function_and_matches_naive() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let n = rng.gen_range(1..30);
            let coords: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
            let s = MetricMeasureSpace::euclidean(w, coords).unwrap();
            let g: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = hl_maximal(&s, &g).unwrap();
            assert!(m.values.iter().zip(&g).all(|(a, b)| *a >= b.abs()));
            assert_eq!(m.values, hl_maximal_naive(&s, &g).unwrap().values);
        }
    }

    #[test]
    fn sharp_two_points() {
        let s = MetricMeasureSpace::from_distances(vec![1.0; 2], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let b0 = s.whole(0).unwrap();
        let m = sharp_maximal(&s, &[0.0, 1.0], &b0, 1.0, 1.0).unwrap();
        assert_eq!(m.values, vec![0.5, 0.5]);
    }

    #[test]
    fn sharp_constant_and_scaling() {
        let grid = Grid::unit_cube(2, 8);
        let s = grid.space();
        let b0 = s.ball(grid.index(&[4, 4]), 0.3).unwrap();
        let zero = sharp_maximal(&s, &vec![1.7; 64], &b0, 1.0, 1.0).unwrap();
        assert!(zero.values.iter().all(|&v| v == 0.0));
        let f = grid.sample(|x| (3.0 * x[0]).sin() + x[1] * x[1]);
        let scaled: Vec<f64> = f.iter().map(|v| 2.5 * v).collect();
        for p in [1.0, 2.0, 1.5] {
            let a = sharp_maximal(&s, &f, &b0, p, 1.0 + p / 2.0).unwrap();
            let b = sharp_maximal(&s, &scaled, &b0, p, 1.0 + p / 2.0).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((2.5 * x - y).abs() <= 1e-12 * y.max(1.0));
            }
            for i in 0..64 {
                if !b0.contains(i) {
                    assert_eq!(a.values[i], 0.0);
                }
            }
        }
    }

    #[test]
    fn sharp_agrees_with_enumeration() {
        let grid = Grid::unit_cube(2, 6);
        let s = grid.space();
        let f = grid.sample(|x| x[0] * x[0] - x[1]);
        let b0 = s.ball(grid.index(&[2, 3]), 0.45).unwrap();
        for (p, q) in [(1.0, 1.0), (2.0, 2.0), (1.5, 1.75)] {
            let fast = sharp_maximal(&s, &f, &b0, p, q).unwrap();
            let mut slow = vec![0.0f64; s.len()];
            for &c in &b0.members {
                for &r in s.row(c).iter() {
                    let b = s.ball(c, r).unwrap();
                    if !b0.includes(&b) {
                        continue;
                    }
                    let mean = b.members.iter().map(|&i| f[i] * s.weights()[i]).sum::<f64>() / b.mass;
                    let dev: f64 = b.members.iter().map(|&i| (f[i] - mean).abs().powf(p) * s.weights()[i]).sum();
                    let v = (dev / b.mass.powf(q)).powf(1.0 / p);
                    for &i in &b.members {
                        slow[i] = slow[i].max(v);
                    }
                }
            }
            for (a, b) in fast.values.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-9 * b.max(1e-12), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn riesz_and_weak_constants_are_finite() {
        let grid = Grid::unit_cube(2, 10);
        let s = grid.space();
        let g = grid.sample(|x| if x[0] < 0.3 { 1.0 } else { 0.0 });
        let m = hl_maximal(&s, &g).unwrap();
        let (c, _) = riesz_constant(&m, &g, s.weights()).unwrap();
        assert!(c >= 1.0 && c.is_finite());
        let weak = weak_type_constant(&m, &g, s.weights(), &[0.1, 0.2, 0.5, 0.9]).unwrap();
        assert!(weak > 0.0 && weak.is_finite());
    }
}
