//! Finite metric measure spaces: points with positive masses and a distance
//! table, closed balls, and sampled doubling statistics.

mod grid;
mod io;

pub use grid::Grid;
pub use io::SpaceFile;

use std::borrow::Cow;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest point count for which the triangle inequality is checked on every triple.
const FULL_TRIANGLE_CHECK: usize = 200;

#[derive(Debug, Clone)]
enum Distances {
    Dense(Vec<f64>),
    /// Computed on demand from coordinates.
    Euclidean,
}

/// A finite set of weighted points with a metric.
#[derive(Debug, Clone)]
pub struct MetricMeasureSpace {
    weights: Vec<f64>,
    total_mass: f64,
    dim: usize,
    coords: Option<Vec<f64>>,
    distances: Distances,
}

impl MetricMeasureSpace {
    /// Builds a space from an explicit symmetric distance table.
    pub fn from_distances(weights: Vec<f64>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = weights.len();
        if dist.len() != n || dist.iter().any(|row| row.len() != n) {
            return Err(Error::Argument(format!(
                "distance table must be {n}x{n} to match the weights"
            )));
        }
        let flat: Vec<f64> = dist.into_iter().flatten().collect();
        Self::from_flat_distances(weights, flat)
    }

    /// Same as [`from_distances`](Self::from_distances) with a row-major table.
    pub fn from_flat_distances(weights: Vec<f64>, dist: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        if dist.len() != n * n {
            return Err(Error::Argument(format!(
                "distance table has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        let total_mass = check_weights(&weights)?;
        check_metric(n, &dist)?;
        Ok(Self {
            weights,
            total_mass,
            dim: 0,
            coords: None,
            distances: Distances::Dense(dist),
        })
    }

    /// Euclidean space on the given coordinates. Distances are computed per row on demand;
    /// call [`densify`](Self::densify) to cache the full table.
    pub fn euclidean(weights: Vec<f64>, coords: Vec<Vec<f64>>) -> Result<Self> {
        let n = weights.len();
        if coords.len() != n {
            return Err(Error::Argument(format!(
                "{} coordinate rows for {n} weights",
                coords.len()
            )));
        }
        let dim = coords.first().map_or(0, Vec::len);
        if coords.iter().any(|c| c.len() != dim) {
            return Err(Error::Argument("coordinate rows differ in dimension".into()));
        }
        if coords.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Argument("coordinates must be finite".into()));
        }
        let total_mass = check_weights(&weights)?;
        Ok(Self {
            weights,
            total_mass,
            dim,
            coords: Some(coords.into_iter().flatten().collect()),
            distances: Distances::Euclidean,
        })
    }

    /// Materializes the dense distance table (no-op when already dense).
    pub fn densify(mut self) -> Self {
        if let Distances::Euclidean = self.distances {
            let n = self.len();
            let mut table = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    table[i * n + j] = self.dist(i, j);
                }
            }
            self.distances = Distances::Dense(table);
        }
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.distances, Distances::Dense(_))
    }

    /// Coordinate dimension, 0 when the space has no coordinates.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self, i: usize) -> Option<&[f64]> {
        self.coords
            .as_ref()
            .map(|c| &c[i * self.dim..(i + 1) * self.dim])
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.distances {
            Distances::Dense(table) => table[i * self.len() + j],
            Distances::Euclidean => {
                let c = self.coords.as_ref().expect("euclidean space has coordinates");
                let (a, b) = (&c[i * self.dim..(i + 1) * self.dim], &c[j * self.dim..(j + 1) * self.dim]);
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }

    /// Distances from `i` to every point.
    pub fn row(&self, i: usize) -> Cow<'_, [f64]> {
        match &self.distances {
            Distances::Dense(table) => Cow::Borrowed(&table[i * self.len()..(i + 1) * self.len()]),
            Distances::Euclidean => Cow::Owned((0..self.len()).map(|j| self.dist(i, j)).collect()),
        }
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            Err(Error::Index { index: i, len: self.len() })
        } else {
            Ok(())
        }
    }

    /// Closed ball `{i : d(center, i) <= r}`.
    pub fn ball(&self, center: usize, r: f64) -> Result<BallIndexSet> {
        self.check_index(center)?;
        if !(r >= 0.0) {
            return Err(Error::Argument(format!("radius must be nonnegative, got {r}")));
        }
        let row = self.row(center);
        let members: Vec<usize> = (0..self.len()).filter(|&i| row[i] <= r).collect();
        let mass = members.iter().map(|&i| self.weights[i]).sum();
        Ok(BallIndexSet { center, radius: r, members, mass })
    }

    /// The ball containing every point, centered at `center`.
    pub fn whole(&self, center: usize) -> Result<BallIndexSet> {
        self.check_index(center)?;
        let r = self.eccentricity(center);
        self.ball(center, r)
    }

    /// Largest distance from `i`.
    pub fn eccentricity(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(0.0, f64::max)
    }

    /// Points sorted by distance from `center`, ties broken by index.
    pub fn neighbor_order(&self, center: usize) -> NeighborOrder {
        let row = self.row(center);
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
        let dist = order.iter().map(|&i| row[i]).collect();
        NeighborOrder { center, order, dist }
    }

    /// Mass of the closed ball, without materializing its members.
    pub fn ball_mass(&self, center: usize, r: f64) -> f64 {
        let row = self.row(center);
        (0..self.len())
            .filter(|&i| row[i] <= r)
            .map(|i| self.weights[i])
            .sum()
    }
}

fn check_weights(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::Argument("a space needs at least one point".into()));
    }
    if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Argument(format!(
            "weight {i} is {}, weights must be positive and finite",
            weights[i]
        )));
    }
    Ok(weights.iter().sum())
}

fn check_metric(n: usize, d: &[f64]) -> Result<()> {
    let scale = d.iter().copied().fold(0.0, f64::max);
    let slack = 1e-12 * scale.max(1.0);
    for i in 0..n {
        if d[i * n + i] != 0.0 {
            return Err(Error::Metric(format!("d({i},{i}) = {} is not zero", d[i * n + i])));
        }
        for j in 0..n {
            let v = d[i * n + j];
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Metric(format!("d({i},{j}) = {v}")));
            }
            if v != d[j * n + i] {
                return Err(Error::Metric(format!("d({i},{j}) != d({j},{i})")));
            }
        }
    }
    let violates = |i: usize, j: usize, k: usize| d[i * n + k] > d[i * n + j] + d[j * n + k] + slack;
    if n <= FULL_TRIANGLE_CHECK {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if violates(i, j, k) {
                        return Err(Error::Metric(format!("triangle inequality fails at ({i},{j},{k})")));
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..10 * n * n {
            let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
            if violates(i, j, k) {
                return Err(Error::Metric(format!("triangle inequality fails at ({i},{j},{k})")));
            }
        }
    }
    Ok(())
}

/// Points of a space ordered by distance from a fixed center.
#[derive(Debug, Clone)]
pub struct NeighborOrder {
    pub center: usize,
    pub order: Vec<usize>,
    pub dist: Vec<f64>,
}

impl NeighborOrder {
    /// Number of points within the closed ball of radius `r`.
    pub fn count_within(&self, r: f64) -> usize {
        self.dist.partition_point(|&d| d <= r)
    }

    /// Prefix lengths at which a new distinct radius ends; each one is a distinct ball.
    pub fn ball_ends(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.dist.len();
        (1..=n).filter(move |&k| k == n || self.dist[k] != self.dist[k - 1])
    }
}

/// A closed ball realized as a member list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallIndexSet {
    pub center: usize,
    pub radius: f64,
    /// Sorted point indices.
    pub members: Vec<usize>,
    pub mass: f64,
}

impl BallIndexSet {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    /// Member-set inclusion `other ⊆ self`.
    pub fn includes(&self, other: &BallIndexSet) -> bool {
        let mut it = self.members.iter().peekable();
        'outer: for &m in &other.members {
            while let Some(&&x) = it.peek() {
                if x == m {
                    it.next();
                    continue 'outer;
                }
                if x > m {
                    return false;
                }
                it.next();
            }
            return false;
        }
        true
    }

    /// Membership mask over a space of `n` points.
    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &i in &self.members {
            mask[i] = true;
        }
        mask
    }

    /// Concentric ball with radius scaled by `factor`.
    pub fn dilate(&self, space: &MetricMeasureSpace, factor: f64) -> Result<BallIndexSet> {
        space.ball(self.center, self.radius * factor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingSample {
    pub center: usize,
    pub r: f64,
    pub ratio: f64,
}

/// Sampled doubling constant `c_d` and dimension `s = log2 c_d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublingStats {
    pub c_d: f64,
    pub s: f64,
    pub samples: Vec<DoublingSample>,
}

impl DoublingStats {
    fn from_samples(samples: Vec<DoublingSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Argument("no doubling samples".into()));
        }
        let c_d = samples.iter().map(|s| s.ratio).fold(1.0, f64::max);
        Ok(Self { c_d, s: c_d.log2(), samples })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("center,r,ratio\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.center, s.r, s.ratio));
        }
        out
    }
}

/// Ratio `μ(B(x,2r)) / μ(B(x,r))` sampled at every center and radius.
///
/// Every `2r` must stay within the eccentricity of its center: a doubled ball that
/// already holds the whole space would understate the ratio, so it is rejected.
pub fn doubling_stats(space: &MetricMeasureSpace, centers: &[usize], radii: &[f64]) -> Result<DoublingStats> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::Argument("doubling statistics need centers and radii".into()));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::Argument(format!("radius {r} must be positive")));
    }
    let mut samples = Vec::with_capacity(centers.len() * radii.len());
    for &c in centers {
        space.check_index(c)?;
        let order = space.neighbor_order(c);
        let prefix = prefix_masses(space, &order);
        let ecc = *order.dist.last().unwrap();
        for &r in radii {
            if 2.0 * r > ecc {
                return Err(Error::Argument(format!(
                    "B({c}, {}) exceeds the space (eccentricity {ecc})",
                    2.0 * r
                )));
            }
            let small = prefix[order.count_within(r)];
            let big = prefix[order.count_within(2.0 * r)];
            samples.push(DoublingSample { center: c, r, ratio: big / small });
        }
    }
    DoublingStats::from_samples(samples)
}

/// Doubling statistics with per-center radii at the 10%..50% distance quantiles.
/// Radii whose double reaches past the center's eccentricity are skipped.
pub fn doubling_stats_auto(space: &MetricMeasureSpace, centers: Option<&[usize]>) -> Result<DoublingStats> {
    let all: Vec<usize>;
    let centers = match centers {
        Some(c) => c,
        None => {
            all = (0..space.len()).collect();
            &all
        }
    };
    let mut samples = Vec::new();
    for &c in centers {
        space.check_index(c)?;
        let order = space.neighbor_order(c);
        let prefix = prefix_masses(space, &order);
        let n = order.dist.len();
        let ecc = order.dist[n - 1];
        for q in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let r = order.dist[((q * (n - 1) as f64).round() as usize).min(n - 1)];
            if r <= 0.0 || 2.0 * r > ecc {
                continue;
            }
            let ratio = prefix[order.count_within(2.0 * r)] / prefix[order.count_within(r)];
            samples.push(DoublingSample { center: c, r, ratio });
        }
    }
    DoublingStats::from_samples(samples)
}

fn prefix_masses(space: &MetricMeasureSpace, order: &NeighborOrder) -> Vec<f64> {
    let mut prefix = Vec::with_capacity(order.order.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for &i in &order.order {
        acc += space.weights()[i];
        prefix.push(acc);
    }
    prefix
}

/// Empirical lower growth constant `min_B (μ(B)/μ(B̃)) / r(B)^s` over sub-balls of `big`.
pub fn growth_constant(big: &BallIndexSet, sub_balls: &[BallIndexSet], s: f64) -> Result<f64> {
    if sub_balls.is_empty() {
        return Err(Error::Argument("no sub-balls given".into()));
    }
    let mut best = f64::INFINITY;
    for b in sub_balls {
        if !(b.radius > 0.0) {
            return Err(Error::Argument(format!(
                "sub-ball at {} has radius {}, growth needs r > 0",
                b.center, b.radius
            )));
        }
        if !big.includes(b) {
            return Err(Error::Containment { center: b.center });
        }
        best = best.min(b.mass / big.mass / b.radius.powf(s));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line3() -> MetricMeasureSpace {
        MetricMeasureSpace::from_distances(
            vec![1.0; 3],
            vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn ball_on_line() {
        let s = line3();
        let b = s.ball(0, 1.0).unwrap();
        assert_eq!(b.members, vec![0, 1]);
        assert_eq!(b.mass, 2.0);
        let b0 = s.ball(0, 0.0).unwrap();
        assert_eq!(b0.members, vec![0]);
        assert_eq!(b0.mass, 1.0);
        assert!(matches!(s.ball(3, 1.0), Err(Error::Index { .. })));
    }

    #[test]
    fn disk_mass_matches_area() {
        let grid = Grid::unit_cube(2, 64);
        let space = grid.space();
        let mid = grid.index(&[32, 32]);
        let b = space.ball(mid, 0.25).unwrap();
        let area = std::f64::consts::PI * 0.25 * 0.25;
        assert!((b.mass / space.total_mass() - area).abs() / area < 0.05);
    }

    #[test]
    fn rejects_bad_metrics() {
        let asym = MetricMeasureSpace::from_distances(vec![1.0; 2], vec![vec![0.0, 1.0], vec![2.0, 0.0]]);
        assert!(matches!(asym, Err(Error::Metric(_))));
        let tri = MetricMeasureSpace::from_distances(
            vec![1.0; 3],
            vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]],
        );
        assert!(matches!(tri, Err(Error::Metric(_))));
        let w = MetricMeasureSpace::from_distances(vec![1.0, 0.0], vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(w, Err(Error::Argument(_))));
    }

    #[test]
    fn duplicated_points_are_atoms() {
        let s = MetricMeasureSpace::from_distances(
            vec![1.0, 2.0, 1.0],
            vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]],
        )
        .unwrap();
        assert_eq!(s.ball(0, 0.0).unwrap().mass, 3.0);
    }

    #[test]
    fn doubling_on_uniform_grids() {
        let grid = Grid::unit_cube(1, 400);
        let space = grid.space();
        let centers: Vec<usize> = (150..250).collect();
        let stats = doubling_stats(&space, &centers, &[0.0113, 0.0238, 0.0513]).unwrap();
        assert!((stats.s - 1.0).abs() < 0.1, "s = {}", stats.s);

        let grid = Grid::unit_cube(2, 64);
        let space = grid.space();
        let centers: Vec<usize> = (28..36).flat_map(|i| (28..36).map(move |j| (i, j))).map(|(i, j)| grid.index(&[i, j])).collect();
        let stats = doubling_stats(&space, &centers, &[0.1, 0.15]).unwrap();
        assert!((stats.s - 2.0).abs() <= 0.2, "s = {}", stats.s);
        assert!(stats.samples.iter().all(|x| x.ratio <= stats.c_d));
        assert!(stats.samples.iter().any(|x| x.ratio == stats.c_d));
    }

    #[test]
    fn doubling_equality_case() {
        // Two points at distance 10: B(0,1) = B(0,2) = {0}.
        let s = MetricMeasureSpace::from_distances(vec![1.0; 2], vec![vec![0.0, 10.0], vec![10.0, 0.0]]).unwrap();
        let stats = doubling_stats(&s, &[0], &[1.0]).unwrap();
        assert_eq!(stats.c_d, 1.0);
        assert_eq!(stats.s, 0.0);
        assert!(doubling_stats(&s, &[], &[1.0]).is_err());
        assert!(doubling_stats(&s, &[0], &[]).is_err());
        assert!(doubling_stats(&s, &[0], &[6.0]).is_err());
    }

    #[test]
    fn growth_constant_cases() {
        let s = line3();
        let big = s.ball(1, 1.0).unwrap();
        assert_eq!(growth_constant(&big, &[big.clone()], 2.0).unwrap(), 1.0);
        let zero = s.ball(1, 0.0).unwrap();
        assert!(matches!(growth_constant(&big, &[zero], 1.0), Err(Error::Argument(_))));
        let small = s.ball(0, 1.0).unwrap();
        let outside = s.ball(0, 2.0).unwrap();
        assert!(growth_constant(&small, &[outside], 1.0).is_err());
    }

    #[test]
    fn growth_constant_stable_under_refinement() {
        let mut values = Vec::new();
        for n in [32usize, 64] {
            let grid = Grid::unit_cube(2, n);
            let space = grid.space();
            let mid = grid.index(&[n / 2, n / 2]);
            let big = space.ball(mid, 0.5).unwrap();
            let subs: Vec<_> = [0.0625, 0.125, 0.25, 0.5]
                .iter()
                .map(|&r| space.ball(mid, r).unwrap())
                .collect();
            let c = growth_constant(&big, &subs, 2.0).unwrap();
            assert!(c > 0.0);
            values.push(c);
        }
        // analytic: (π r²)/(π/4) / r² = 4 for every sub-disk
        for c in &values {
            assert!((c - 4.0).abs() / 4.0 < 0.15, "c* = {c}");
        }
    }

    #[test]
    fn neighbor_order_ball_ends() {
        let s = line3();
        let o = s.neighbor_order(1);
        assert_eq!(o.order, vec![1, 0, 2]);
        assert_eq!(o.ball_ends().collect::<Vec<_>>(), vec![1, 3]);
    }
}
