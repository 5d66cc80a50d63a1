use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{BallIndexSet, MetricMeasureSpace};

/// Relative slack for the half-mass comparison after re-summing in a different order.
const HALF_MASS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub holds: bool,
    /// Offending ball index (properties 1, 4) or point index (property 2).
    pub witness: Option<usize>,
}

impl PropertyCheck {
    fn ok() -> Self {
        Self { holds: true, witness: None }
    }

    fn fail(witness: usize) -> Self {
        Self { holds: false, witness: Some(witness) }
    }
}

/// A family of balls covering `E ⊆ B`, with the four covering properties evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringReport {
    pub balls: Vec<BallIndexSet>,
    /// Every ball lies in `4B`.
    pub property1: PropertyCheck,
    /// `E` is covered.
    pub property2: PropertyCheck,
    /// `Σ μ(B_i) <= c μ(E)` with a finite `c`; the achieved `c` is `overlap_constant`.
    pub property3: PropertyCheck,
    /// `μ(B_i ∩ E) <= μ(B_i ∩ B) / 2` for every ball.
    pub property4: PropertyCheck,
    pub overlap_constant: f64,
    pub lambda: f64,
}

impl CoveringReport {
    pub fn all_hold(&self) -> bool {
        self.property1.holds && self.property2.holds && self.property3.holds && self.property4.holds
    }
}

/// Covers `e ⊆ b` by balls that are at most half full of `e`.
///
/// Each point of `e` gets the smallest ball around it with
/// `μ(B_x ∩ E) <= μ(B_x ∩ B) / 2`. Balls are then taken largest first, keeping a ball
/// only when its center is not already covered by a kept ball.
pub fn construct_covering(
    space: &MetricMeasureSpace,
    b: &BallIndexSet,
    e: &[usize],
    lambda: f64,
) -> Result<CoveringReport> {
    let n = space.len();
    let w = space.weights();
    let in_b = b.mask(n);
    let mut in_e = vec![false; n];
    for &x in e {
        space.check_index(x)?;
        if !in_b[x] {
            return Err(Error::Argument(format!("point {x} of E is not in B")));
        }
        in_e[x] = true;
    }
    let e_mass: f64 = (0..n).filter(|&i| in_e[i]).map(|i| w[i]).sum();
    if !(lambda > 0.0) || e_mass > lambda * b.mass {
        return Err(Error::Argument(format!(
            "need μ(E) <= λ μ(B): μ(E) = {e_mass}, λ = {lambda}, μ(B) = {}",
            b.mass
        )));
    }

    let mut candidates = Vec::new();
    let mut uncovered = None;
    for x in (0..n).filter(|&i| in_e[i]) {
        let nb = space.neighbor_order(x);
        let (mut me, mut mb, mut k) = (0.0, 0.0, 0);
        let mut found = None;
        for end in nb.ball_ends() {
            while k < end {
                let i = nb.order[k];
                if in_e[i] {
                    me += w[i];
                }
                if in_b[i] {
                    mb += w[i];
                }
                k += 1;
            }
            if me <= 0.5 * mb {
                found = Some(end);
                break;
            }
        }
        match found {
            Some(end) => {
                let mut members = nb.order[..end].to_vec();
                members.sort_unstable();
                let mass = members.iter().map(|&i| w[i]).sum();
                candidates.push(BallIndexSet { center: x, radius: nb.dist[end - 1], members, mass });
            }
            None => uncovered = uncovered.or(Some(x)),
        }
    }

    candidates.sort_by(|a, c| c.radius.total_cmp(&a.radius).then(a.center.cmp(&c.center)));
    let mut covered = vec![false; n];
    let mut balls = Vec::new();
    for ball in candidates {
        if covered[ball.center] {
            continue;
        }
        for &i in &ball.members {
            covered[i] = true;
        }
        balls.push(ball);
    }

    let four_b = b.dilate(space, 4.0)?;
    let property1 = balls
        .iter()
        .position(|ball| !four_b.includes(ball))
        .map_or_else(PropertyCheck::ok, PropertyCheck::fail);
    let property2 = match uncovered.or_else(|| (0..n).find(|&i| in_e[i] && !covered[i])) {
        Some(x) => PropertyCheck::fail(x),
        None => PropertyCheck::ok(),
    };
    let total: f64 = balls.iter().map(|ball| ball.mass).sum();
    let overlap_constant = if e_mass > 0.0 { total / e_mass } else { 0.0 };
    let property3 = PropertyCheck { holds: overlap_constant.is_finite(), witness: None };
    let property4 = balls
        .iter()
        .position(|ball| {
            let me: f64 = ball.members.iter().filter(|&&i| in_e[i]).map(|&i| w[i]).sum();
            let mb: f64 = ball.members.iter().filter(|&&i| in_b[i]).map(|&i| w[i]).sum();
            me > 0.5 * mb * (1.0 + HALF_MASS_SLACK)
        })
        .map_or_else(PropertyCheck::ok, PropertyCheck::fail);

    Ok(CoveringReport { balls, property1, property2, property3, property4, overlap_constant, lambda })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Grid;

    #[test]
    fn empty_set() {
        let grid = Grid::unit_cube(2, 8);
        let s = grid.space();
        let b = s.ball(grid.index(&[4, 4]), 0.3).unwrap();
        let r = construct_covering(&s, &b, &[], 0.1).unwrap();
        assert!(r.balls.is_empty() && r.all_hold());
        assert_eq!(r.overlap_constant, 0.0);
    }

    #[test]
    fn single_point() {
        let grid = Grid::unit_cube(2, 16);
        let s = grid.space();
        let c = grid.index(&[8, 8]);
        let b = s.ball(c, 0.3).unwrap();
        let r = construct_covering(&s, &b, &[c], 0.1).unwrap();
        assert_eq!(r.balls.len(), 1);
        assert!(r.all_hold());
        // smallest ball around c at least twice the point mass: the 5-point cross
        assert!((r.overlap_constant - r.balls[0].mass / s.weights()[c]).abs() < 1e-12);
        assert_eq!(r.balls[0].members.len(), 5);
    }

    #[test]
    fn rejects_large_sets() {
        let grid = Grid::unit_cube(2, 8);
        let s = grid.space();
        let b = s.ball(grid.index(&[4, 4]), 0.3).unwrap();
        assert!(construct_covering(&s, &b, &b.members, 0.1).is_err());
        assert!(construct_covering(&s, &b, &[0], 0.1).is_err());
    }
}
