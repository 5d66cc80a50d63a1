//! Incremental `Σ_B |f - f_B|^p μ` over growing balls.

/// Distinct values of `f` in increasing order and the rank of every point.
pub(crate) struct Ranks {
    sorted: Vec<f64>,
    rank: Vec<usize>,
}

impl Ranks {
    pub(crate) fn new(f: &[f64]) -> Self {
        let mut sorted = f.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        let rank = f
            .iter()
            .map(|v| sorted.partition_point(|x| x < v))
            .collect();
        Self { sorted, rank }
    }
}

struct Fenwick(Vec<f64>);

impl Fenwick {
    fn new(n: usize) -> Self {
        Self(vec![0.0; n + 1])
    }

    fn add(&mut self, i: usize, v: f64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over ranks `< k`.
    fn prefix(&self, mut k: usize) -> f64 {
        let mut s = 0.0;
        while k > 0 {
            s += self.0[k];
            k -= k & k.wrapping_neg();
        }
        s
    }
}

enum Kind<'a> {
    Abs { ranks: &'a Ranks, w: Fenwick, wf: Fenwick },
    /// Weighted running variance (West's update).
    Square { mean: f64, m2: f64 },
    Power { p: f64, items: Vec<(f64, f64)> },
}

pub(crate) struct Oscillator<'a> {
    kind: Kind<'a>,
    mass: f64,
    sum: f64,
    lo: f64,
    hi: f64,
}

impl<'a> Oscillator<'a> {
    /// `ranks` must be built from the same values that are pushed when `p == 1`.
    pub(crate) fn new(p: f64, ranks: &'a Ranks) -> Self {
        let kind = if p == 1.0 {
            Kind::Abs { ranks, w: Fenwick::new(ranks.sorted.len()), wf: Fenwick::new(ranks.sorted.len()) }
        } else if p == 2.0 {
            Kind::Square { mean: 0.0, m2: 0.0 }
        } else {
            Kind::Power { p, items: Vec::new() }
        };
        Self { kind, mass: 0.0, sum: 0.0, lo: f64::INFINITY, hi: f64::NEG_INFINITY }
    }

    pub(crate) fn push(&mut self, point: usize, value: f64, weight: f64) {
        self.mass += weight;
        self.sum += weight * value;
        self.lo = self.lo.min(value);
        self.hi = self.hi.max(value);
        match &mut self.kind {
            Kind::Abs { ranks, w, wf } => {
                let r = ranks.rank[point];
                w.add(r, weight);
                wf.add(r, weight * value);
            }
            Kind::Square { mean, m2 } => {
                let delta = value - *mean;
                *mean += weight * delta / self.mass;
                *m2 += weight * delta * (value - *mean);
            }
            Kind::Power { items, .. } => items.push((value, weight)),
        }
    }

    pub(crate) fn mass(&self) -> f64 {
        self.mass
    }

    pub(crate) fn mean(&self) -> f64 {
        self.sum / self.mass
    }

    /// `Σ |f_i - f_B|^p μ_i` over the pushed points.
    pub(crate) fn deviation(&self) -> f64 {
        if !(self.hi > self.lo) {
            return 0.0;
        }
        match &self.kind {
            Kind::Abs { ranks, w, wf } => {
                let m = self.mean();
                let k = ranks.sorted.partition_point(|&x| x <= m);
                let (w_le, s_le) = (w.prefix(k), wf.prefix(k));
                let below = m * w_le - s_le;
                let above = (self.sum - s_le) - m * (self.mass - w_le);
                (below.max(0.0) + above.max(0.0)).max(0.0)
            }
            Kind::Square { m2, .. } => m2.max(0.0),
            Kind::Power { p, items } => {
                let m = self.mean();
                items.iter().map(|(v, w)| (v - m).abs().powf(*p) * w).sum()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_direct_sums() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f: Vec<f64> = (0..60).map(|_| rng.gen_range(-2.0..3.0)).collect();
        let w: Vec<f64> = (0..60).map(|_| rng.gen_range(0.1..2.0)).collect();
        let ranks = Ranks::new(&f);
        for p in [1.0, 2.0, 1.5] {
            let mut osc = Oscillator::new(p, &ranks);
            for i in 0..f.len() {
                osc.push(i, f[i], w[i]);
                let m: f64 = (0..=i).map(|j| f[j] * w[j]).sum::<f64>() / (0..=i).map(|j| w[j]).sum::<f64>();
                let direct: f64 = (0..=i).map(|j| (f[j] - m).abs().powf(p) * w[j]).sum();
                assert!((osc.deviation() - direct).abs() <= 1e-10 * (1.0 + direct), "p={p} i={i}");
            }
        }
    }

    #[test]
    fn constant_values_give_exact_zero() {
        let f = vec![0.3; 10];
        let ranks = Ranks::new(&f);
        for p in [1.0, 2.0, 3.0] {
            let mut osc = Oscillator::new(p, &ranks);
            for i in 0..10 {
                osc.push(i, 0.3, 0.1 * (i + 1) as f64);
                assert_eq!(osc.deviation(), 0.0);
            }
        }
    }
}
