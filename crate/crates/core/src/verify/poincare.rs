use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::maximal::oscillation::{Oscillator, Ranks};
use crate::space::{BallIndexSet, MetricMeasureSpace};
use crate::verify::report::{ratio, InequalityReport, Witness};
use crate::verify::SobolevPair;

/// Which balls a Poincaré scan visits.
#[derive(Debug, Clone)]
pub struct BallScan {
    pub p: f64,
    pub q: f64,
    pub sigma: f64,
    /// Only balls with `σB ⊆ omega` (as member sets) are scanned.
    pub omega: BallIndexSet,
    /// Per-point strict upper bound on the radius of balls centered there.
    pub radius_cap: Option<Vec<f64>>,
    /// Nominal radii to visit instead of every distinct ball.
    pub radii: Option<Vec<f64>>,
}

impl BallScan {
    pub fn new(p: f64, q: f64, sigma: f64, omega: BallIndexSet) -> Self {
        Self { p, q, sigma, omega, radius_cap: None, radii: None }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite() && self.q >= 1.0 && self.q.is_finite()) {
            return Err(Error::Argument(format!("need 1 <= p, q < inf, got p = {}, q = {}", self.p, self.q)));
        }
        if !(self.sigma >= 1.0 && self.sigma.is_finite()) {
            return Err(Error::Argument(format!("need sigma >= 1, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Worst ball around one center: (ratio, lhs, r·rhs, radius).
type Worst = (f64, f64, f64, f64);

/// Largest `(μ(B)^{-1} Σ_B |f - f_B|^p μ)^{1/p} / (r(B) (μ(σB)^{-1} Σ_{σB} g^q μ)^{1/q})`
/// over the scanned balls. Entries are indexed by center; each keeps its worst ball.
pub fn poincare_constant(
    space: &MetricMeasureSpace,
    pair: &SobolevPair,
    p: f64,
    q: f64,
    sigma: f64,
    omega: &BallIndexSet,
) -> Result<InequalityReport> {
    poincare_scan(space, pair, &BallScan::new(p, q, sigma, omega.clone()))
}

pub fn poincare_scan(space: &MetricMeasureSpace, pair: &SobolevPair, scan: &BallScan) -> Result<InequalityReport> {
    scan.validate()?;
    pair.check_space(space)?;
    let n = space.len();
    let w = space.weights();
    let in_omega = scan.omega.mask(n);
    let gq: Vec<f64> = pair.g.iter().map(|v| v.powf(scan.q)).collect();
    let ranks = Ranks::new(&pair.f);
    let mut radii = scan.radii.clone();
    if let Some(r) = radii.as_mut() {
        r.retain(|x| *x > 0.0);
        r.sort_by(f64::total_cmp);
    }

    let per_center: Vec<(usize, Option<Worst>)> = scan
        .omega
        .members
        .par_iter()
        .map(|&c| {
            let nb = space.neighbor_order(c);
            let first_out = nb.order.iter().position(|&i| !in_omega[i]).unwrap_or(n);
            let cap = scan.radius_cap.as_ref().map_or(f64::INFINITY, |caps| caps[c]);
            let balls: Vec<(usize, f64)> = match &radii {
                Some(rs) => rs.iter().map(|&r| (nb.count_within(r), r)).collect(),
                None => nb.ball_ends().map(|e| (e, nb.dist[e - 1])).filter(|&(_, r)| r > 0.0).collect(),
            };
            // prefix sums of g^q μ and μ in neighbor order
            let mut pg = vec![0.0; n + 1];
            let mut pm = vec![0.0; n + 1];
            for k in 0..n {
                let i = nb.order[k];
                pg[k + 1] = pg[k] + gq[i] * w[i];
                pm[k + 1] = pm[k] + w[i];
            }
            let mut osc = Oscillator::new(scan.p, &ranks);
            let mut k = 0;
            let mut worst: Option<Worst> = None;
            for (e, r) in balls {
                if !(r < cap) {
                    break;
                }
                let big = nb.count_within(scan.sigma * r);
                if big > first_out {
                    break;
                }
                while k < e {
                    let i = nb.order[k];
                    osc.push(i, pair.f[i], w[i]);
                    k += 1;
                }
                let lhs = (osc.deviation() / osc.mass()).powf(1.0 / scan.p);
                let rhs = r * (pg[big] / pm[big]).powf(1.0 / scan.q);
                let v = ratio(lhs, rhs);
                if worst.map_or(true, |(best, ..)| v > best) {
                    worst = Some((v, lhs, rhs, r));
                }
            }
            (c, worst)
        })
        .collect();

    let mut ids = Vec::new();
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    let mut witness: Option<(f64, Witness)> = None;
    for (c, worst) in per_center {
        if let Some((v, l, r, radius)) = worst {
            ids.push(c as f64);
            lhs.push(l);
            rhs.push(r);
            if witness.as_ref().map_or(true, |(best, _)| v > *best) {
                witness = Some((v, Witness { center: c, radius }));
            }
        }
    }
    if ids.is_empty() {
        return Err(Error::Argument("no ball satisfies the containment condition".into()));
    }
    let mut report = InequalityReport::new("poincare", ids, lhs, rhs)
        .param("p", scan.p)
        .param("q", scan.q)
        .param("sigma", scan.sigma)
        .param("omega_center", scan.omega.center)
        .param("omega_radius", scan.omega.radius)
        .param("gradient", serde_json::to_value(pair.provenance).unwrap());
    report.witness = witness.map(|(_, w)| w);
    if report.best_constant.is_infinite() {
        report.notes.push("a ball has zero gradient average but nonzero oscillation".into());
    }
    Ok(report)
}

/// Brute-force [`poincare_constant`]: every ball is materialized and summed directly.
pub fn poincare_over_balls(
    space: &MetricMeasureSpace,
    pair: &SobolevPair,
    p: f64,
    q: f64,
    sigma: f64,
    omega: &BallIndexSet,
) -> Result<f64> {
    pair.check_space(space)?;
    let w = space.weights();
    let mut best: Option<f64> = None;
    for &c in &omega.members {
        for &r in space.row(c).iter() {
            if r == 0.0 {
                continue;
            }
            let b = space.ball(c, r)?;
            let big = space.ball(c, sigma * r)?;
            if !omega.includes(&big) {
                continue;
            }
            let mean = b.members.iter().map(|&i| pair.f[i] * w[i]).sum::<f64>() / b.mass;
            let dev: f64 = b.members.iter().map(|&i| (pair.f[i] - mean).abs().powf(p) * w[i]).sum();
            let lhs = (dev / b.mass).powf(1.0 / p);
            let avg: f64 = big.members.iter().map(|&i| pair.g[i].powf(q) * w[i]).sum::<f64>() / big.mass;
            let v = ratio(lhs, r * avg.powf(1.0 / q));
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best.ok_or_else(|| Error::Argument("no ball satisfies the containment condition".into()))
}
