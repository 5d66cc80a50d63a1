use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::carnot::{FieldKind, VectorFieldSystem};
use crate::error::{Error, Result};
use crate::space::Grid;

/// Lattice description, also the on-disk JSON format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// `[lo, hi]` per axis; nodes sit on both ends.
    pub extents: Vec<[f64; 2]>,
    /// Node count per axis.
    pub resolution: Vec<usize>,
    pub fields: String,
    /// Step length of one unit control.
    pub h: f64,
    /// Minimum number of control directions.
    pub directions: usize,
}

impl GridSpec {
    /// Heisenberg lattice with horizontal spacing `h` and vertical spacing `h²/2`, so that
    /// integer control steps land exactly on nodes. The box is widened to lattice multiples.
    pub fn heisenberg(h: f64, xy: [f64; 2], t: [f64; 2], directions: usize) -> Self {
        let (xlo, xn) = snap_axis(xy, h);
        let (tlo, tn) = snap_axis(t, h * h / 2.0);
        let xhi = xlo + (xn - 1) as f64 * h;
        let thi = tlo + (tn - 1) as f64 * h * h / 2.0;
        Self {
            extents: vec![[xlo, xhi], [xlo, xhi], [tlo, thi]],
            resolution: vec![xn, xn, tn],
            fields: "heisenberg".into(),
            h,
            directions,
        }
    }

    /// Cube `[a,b]^dim` with spacing `h` for `X_i = ∂_i`.
    pub fn euclidean(dim: usize, h: f64, range: [f64; 2], directions: usize) -> Self {
        let (lo, n) = snap_axis(range, h);
        let hi = lo + (n - 1) as f64 * h;
        Self {
            extents: vec![[lo, hi]; dim],
            resolution: vec![n; dim],
            fields: if dim == 2 { "euclidean".into() } else { format!("euclidean:{dim}") },
            h,
            directions,
        }
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let [lo, hi] = self.extents[axis];
        let n = self.resolution[axis];
        if n > 1 {
            (hi - lo) / (n - 1) as f64
        } else {
            1.0
        }
    }

    fn validate(&self, fields: &VectorFieldSystem) -> Result<()> {
        if self.extents.len() != fields.dim() || self.resolution.len() != fields.dim() {
            return Err(Error::Argument(format!(
                "{}-dimensional fields need {} extents and resolutions",
                fields.dim(),
                fields.dim()
            )));
        }
        if self.resolution.iter().any(|&n| n == 0) {
            return Err(Error::Argument("every axis needs at least one node".into()));
        }
        if self.extents.iter().any(|[a, b]| !(a.is_finite() && b.is_finite() && a <= b)) {
            return Err(Error::Argument("extents must be finite with lo <= hi".into()));
        }
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::Argument(format!("step h must be positive, got {}", self.h)));
        }
        if self.directions == 0 {
            return Err(Error::Argument("need at least one control direction".into()));
        }
        if self.len() > u32::MAX as usize {
            return Err(Error::Argument("lattice too large".into()));
        }
        Ok(())
    }
}

/// Node-aligned `(lo, count)` covering `range` with spacing `d`.
fn snap_axis(range: [f64; 2], d: f64) -> (f64, usize) {
    let a = (range[0] / d).floor();
    let b = (range[1] / d).ceil();
    (a * d, (b - a) as usize + 1)
}

/// Primitive integer vectors with max-norm at most `r`, for the smallest `r` giving
/// at least `want` of them. Sorted for determinism.
fn integer_directions(m: usize, want: usize) -> Vec<Vec<i64>> {
    let mut r = 1i64;
    loop {
        let mut out = Vec::new();
        let side = (2 * r + 1) as usize;
        for code in 0..side.pow(m as u32) {
            let mut c = code;
            let v: Vec<i64> = (0..m)
                .map(|_| {
                    let k = (c % side) as i64 - r;
                    c /= side;
                    k
                })
                .collect();
            if v.iter().fold(0, |g, &x| gcd(g, x.unsigned_abs())) == 1 {
                out.push(v);
            }
        }
        if out.len() >= want {
            return out;
        }
        r += 1;
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone)]
enum Adjacency {
    /// Neighbors recomputed on the fly; valid when every step lands exactly on a node.
    Implicit,
    /// Symmetrized CSR.
    Explicit { offsets: Vec<usize>, targets: Vec<u32>, weights: Vec<f64> },
}

/// Distances from one source to every node; unreachable nodes hold `inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceDistances {
    pub source: usize,
    pub dist: Vec<f64>,
    pub unreachable: usize,
}

/// A vertex lattice whose edges follow the horizontal directions `h Σ v_k X_k(x)`
/// (integer controls `v`, snapped to the nearest node) with weight `h|v|`.
#[derive(Debug, Clone)]
pub struct CCGrid {
    spec: GridSpec,
    fields: VectorFieldSystem,
    lo: Vec<f64>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
    directions: Vec<(Vec<f64>, f64)>,
    adjacency: Adjacency,
    /// Derived distance table from the sources passed to [`CCGrid::solve`].
    pub table: Vec<SourceDistances>,
}

impl CCGrid {
    pub fn new(spec: GridSpec) -> Result<Self> {
        let fields: VectorFieldSystem = spec.fields.parse()?;
        Self::with_fields(spec, fields)
    }

    pub fn with_fields(spec: GridSpec, fields: VectorFieldSystem) -> Result<Self> {
        spec.validate(&fields)?;
        let d = fields.dim();
        let lo: Vec<f64> = spec.extents.iter().map(|e| e[0]).collect();
        let spacing: Vec<f64> = (0..d).map(|a| spec.spacing(a)).collect();
        let mut strides = vec![1; d];
        for a in (0..d.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * spec.resolution[a + 1];
        }
        let directions = integer_directions(fields.len(), spec.directions)
            .into_iter()
            .map(|v| {
                let len = v.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
                (v.into_iter().map(|x| x as f64).collect(), spec.h * len)
            })
            .collect();
        let mut grid = Self { spec, fields, lo, spacing, strides, directions, adjacency: Adjacency::Implicit, table: Vec::new() };
        if !grid.aligned() {
            grid.adjacency = grid.explicit_adjacency()?;
        }
        Ok(grid)
    }

    /// Whether integer steps land exactly on nodes, which makes the edge set symmetric.
    fn aligned(&self) -> bool {
        let integral = |x: f64| x.round() >= 0.0 && (x - x.round()).abs() < 1e-9;
        let h = self.spec.h;
        let unit = |a: usize, step: f64| self.spec.resolution[a] == 1 || (integral(step / self.spacing[a]) && step >= self.spacing[a] * 0.5);
        match self.fields.kind() {
            FieldKind::Euclidean => (0..self.fields.dim()).all(|a| unit(a, h)),
            // t offset of a step is (x v2 - y v1) h / 2 in absolute units
            FieldKind::Heisenberg => {
                (0..2).all(|a| (self.spacing[a] - h).abs() <= 1e-9 * h && integral((self.lo[a] / h).abs()))
                    && unit(2, h * h / 2.0)
            }
            _ => false,
        }
    }

    fn explicit_adjacency(&self) -> Result<Adjacency> {
        let n = self.len();
        let mut edges: Vec<(u32, u32, f64)> = Vec::new();
        let mut buf = Vec::new();
        for u in 0..n {
            self.step_targets(u, &mut buf)?;
            for &(v, w) in &buf {
                edges.push((u as u32, v as u32, w));
                edges.push((v as u32, u as u32, w));
            }
        }
        edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2.total_cmp(&b.2)));
        edges.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);
        let mut offsets = vec![0; n + 1];
        for e in &edges {
            offsets[e.0 as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Ok(Adjacency::Explicit {
            offsets,
            targets: edges.iter().map(|e| e.1).collect(),
            weights: edges.iter().map(|e| e.2).collect(),
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn fields(&self) -> &VectorFieldSystem {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn direction_count(&self) -> usize {
        self.directions.len()
    }

    pub fn is_implicit(&self) -> bool {
        matches!(self.adjacency, Adjacency::Implicit)
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().zip(&self.spec.resolution).map(|(d, &n)| if n > 1 { *d } else { 1.0 }).product()
    }

    pub fn multi_index(&self, mut node: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&s| {
                let k = node / s;
                node %= s;
                k
            })
            .collect()
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.multi_index(node).iter().enumerate().map(|(a, &k)| self.lo[a] + k as f64 * self.spacing[a]).collect()
    }

    /// Nearest node to `x`, or `None` outside the lattice box.
    pub fn node(&self, x: &[f64]) -> Option<usize> {
        if x.len() != self.strides.len() {
            return None;
        }
        let mut idx = 0;
        for (a, &xa) in x.iter().enumerate() {
            let k = ((xa - self.lo[a]) / self.spacing[a]).round();
            if !(k >= 0.0 && k < self.spec.resolution[a] as f64) {
                return None;
            }
            idx += k as usize * self.strides[a];
        }
        Some(idx)
    }

    /// Cell-centered grid whose points coincide with the nodes, for finite differences.
    pub fn as_grid(&self) -> Grid {
        let d = self.strides.len();
        let lo = (0..d).map(|a| self.lo[a] - self.spacing[a] / 2.0).collect();
        let hi = (0..d)
            .map(|a| self.lo[a] + (self.spec.resolution[a] as f64 - 0.5) * self.spacing[a])
            .collect();
        Grid::new(lo, hi, self.spec.resolution.clone())
    }

    /// Snapped control steps out of `u`.
    fn step_targets(&self, u: usize, out: &mut Vec<(usize, f64)>) -> Result<()> {
        out.clear();
        let mi = self.multi_index(u);
        let x: Vec<f64> = mi.iter().enumerate().map(|(a, &k)| self.lo[a] + k as f64 * self.spacing[a]).collect();
        let coeffs: Vec<Vec<f64>> = (0..self.fields.len()).map(|k| self.fields.coefficients(k, &x)).collect();
        if coeffs.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Argument(format!("non-finite field coefficient at node {u}")));
        }
        let h = self.spec.h;
        'dirs: for (v, w) in &self.directions {
            let mut target = 0;
            let mut moved = false;
            for a in 0..mi.len() {
                let disp: f64 = v.iter().zip(&coeffs).map(|(vk, c)| vk * c[a]).sum::<f64>() * h;
                let off = (disp / self.spacing[a]).round();
                let k = mi[a] as f64 + off;
                if !(k >= 0.0 && k < self.spec.resolution[a] as f64) {
                    continue 'dirs;
                }
                moved |= off != 0.0;
                target += k as usize * self.strides[a];
            }
            if moved {
                out.push((target, *w));
            }
        }
        Ok(())
    }

    fn neighbors(&self, u: usize, out: &mut Vec<(usize, f64)>) {
        match &self.adjacency {
            // coefficients were checked finite by `aligned` built-ins
            Adjacency::Implicit => self.step_targets(u, out).expect("built-in fields are finite"),
            Adjacency::Explicit { offsets, targets, weights } => {
                out.clear();
                for e in offsets[u]..offsets[u + 1] {
                    out.push((targets[e] as usize, weights[e]));
                }
            }
        }
    }

    /// Runs Dijkstra from `source`, calling `visit(node, dist)` as nodes settle in
    /// `(dist, node)` order; stops when `visit` returns `false`.
    pub fn dijkstra(&self, source: usize, mut visit: impl FnMut(usize, f64) -> bool) -> Result<()> {
        if source >= self.len() {
            return Err(Error::Index { index: source, len: self.len() });
        }
        let mut ws = Workspace::new(self.len());
        ws.run(self, source, &mut visit);
        Ok(())
    }

    /// Distances from `source` to all nodes.
    pub fn distances(&self, source: usize) -> Result<SourceDistances> {
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut reached = 0;
        self.dijkstra(source, |v, d| {
            dist[v] = d;
            reached += 1;
            true
        })?;
        Ok(SourceDistances { source, dist, unreachable: self.len() - reached })
    }

    /// Distances from `source` to `targets`, stopping once all of them are settled.
    pub fn distances_to(&self, source: usize, targets: &[usize]) -> Result<Vec<f64>> {
        let n = self.len();
        if let Some(&t) = targets.iter().find(|&&t| t >= n) {
            return Err(Error::Index { index: t, len: n });
        }
        let mut slot = vec![usize::MAX; n];
        for (k, &t) in targets.iter().enumerate() {
            slot[t] = k;
        }
        let mut out = vec![f64::INFINITY; targets.len()];
        let mut left = targets.iter().collect::<std::collections::BTreeSet<_>>().len();
        self.dijkstra(source, |v, d| {
            if slot[v] != usize::MAX {
                for (k, &t) in targets.iter().enumerate().skip(slot[v]) {
                    if t == v {
                        out[k] = d;
                    }
                }
                left -= 1;
            }
            left > 0
        })?;
        Ok(out)
    }

    /// Number of nodes at distance at most `r` from `source`.
    pub fn ball_count(&self, source: usize, r: f64) -> Result<usize> {
        let mut count = 0;
        self.dijkstra(source, |_, d| {
            if d <= r {
                count += 1;
                true
            } else {
                false
            }
        })?;
        Ok(count)
    }

    /// `|B(source, r)|` as node count times cell volume.
    pub fn ball_volume(&self, source: usize, r: f64) -> Result<f64> {
        Ok(self.ball_count(source, r)? as f64 * self.cell_volume())
    }

    /// Fills [`CCGrid::table`] with full distance rows from each source.
    pub fn solve(&mut self, sources: &[usize]) -> Result<()> {
        use rayon::prelude::*;
        self.table = sources.par_iter().map(|&s| self.distances(s)).collect::<Result<_>>()?;
        Ok(())
    }

    /// True when some source misses part of the lattice.
    pub fn has_unreachable(&self) -> bool {
        self.table.iter().any(|t| t.unreachable > 0)
    }
}

/// Builds the lattice for `spec` and solves from `sources`.
pub fn cc_distance(spec: GridSpec, sources: &[usize]) -> Result<CCGrid> {
    let mut grid = CCGrid::new(spec)?;
    grid.solve(sources)?;
    if grid.has_unreachable() {
        log::warn!("some lattice nodes are unreachable from the sources");
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    d: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.d.total_cmp(&self.d).then(other.node.cmp(&self.node))
    }
}

/// Reusable Dijkstra buffers; only touched entries are reset between runs.
pub(crate) struct Workspace {
    dist: Vec<f64>,
    settled: Vec<bool>,
    touched: Vec<usize>,
    heap: BinaryHeap<Entry>,
    nbrs: Vec<(usize, f64)>,
}

impl Workspace {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            dist: vec![f64::INFINITY; n],
            settled: vec![false; n],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
            nbrs: Vec::new(),
        }
    }

    pub(crate) fn run(&mut self, grid: &CCGrid, source: usize, visit: &mut impl FnMut(usize, f64) -> bool) {
        for &t in &self.touched {
            self.dist[t] = f64::INFINITY;
            self.settled[t] = false;
        }
        self.touched.clear();
        self.heap.clear();
        self.dist[source] = 0.0;
        self.touched.push(source);
        self.heap.push(Entry { d: 0.0, node: source });
        while let Some(Entry { d, node }) = self.heap.pop() {
            if self.settled[node] {
                continue;
            }
            self.settled[node] = true;
            if !visit(node, d) {
                return;
            }
            grid.neighbors(node, &mut self.nbrs);
            for &(v, w) in &self.nbrs {
                let nd = d + w;
                if !self.settled[v] && nd < self.dist[v] {
                    if self.dist[v].is_infinite() {
                        self.touched.push(v);
                    }
                    self.dist[v] = nd;
                    self.heap.push(Entry { d: nd, node: v });
                }
            }
        }
    }
}
