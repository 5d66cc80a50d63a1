use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::{
    associate_fundamental_function, log_grid, profile_norm, rearrangement, ri_norm, ypr_norm, LinearProfile,
    RISpaceSpec, StepFunction,
};
use crate::space::{BallIndexSet, MetricMeasureSpace};
use crate::verify::report::{check_window, InequalityReport};
use crate::verify::{restrict, SobolevPair};

const HARDY_SAMPLES: usize = 20;
const HARDY_GRID: usize = 256;

/// Empirical `‖P_p F‖_Y / ‖F‖_Y` over random decreasing step functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardySafeguard {
    pub exponent: f64,
    pub constants: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// `max <= 2 min`.
    pub stable: bool,
}

/// `P_p F` sampled on a log grid and interpolated; `P_p F` is constant below the first breakpoint.
fn hardy_profile(f: &StepFunction, p: f64) -> Result<LinearProfile> {
    let big_t = f.domain();
    let mut ts = vec![0.0];
    let mut vs = vec![f.sup()];
    let first = f.breakpoints()[0];
    let mut grid = log_grid(big_t * 1e-6, big_t, HARDY_GRID);
    grid.push(first);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    for t in grid.into_iter().filter(|&t| t >= first.min(big_t * 1e-6)) {
        let v = f.hardy_p(p, t)?.min(*vs.last().unwrap());
        ts.push(t);
        vs.push(v);
    }
    LinearProfile::new(ts, vs)
}

pub fn hardy_safeguard(y: &RISpaceSpec, p: f64, seed: u64) -> Result<HardySafeguard> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = match *y {
        RISpaceSpec::Hbw { domain: Some(d), .. } => d,
        _ => 1.0,
    };
    let mut constants = Vec::with_capacity(HARDY_SAMPLES);
    while constants.len() < HARDY_SAMPLES {
        let pieces = rng.gen_range(1..=10);
        let mut ts: Vec<f64> = (0..pieces - 1).map(|_| rng.gen_range(0.0..domain)).collect();
        ts.push(domain);
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        if ts[0] <= 0.0 {
            continue;
        }
        let mut vs: Vec<f64> = (0..ts.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
        vs.sort_by(|a, b| b.total_cmp(a));
        let f = StepFunction::new(ts, vs)?;
        let base = ri_norm(&f, y)?;
        if base > 0.0 {
            constants.push(profile_norm(&hardy_profile(&f, p)?, y)? / base);
        }
    }
    let min = constants.iter().copied().fold(f64::INFINITY, f64::min);
    let max = constants.iter().copied().fold(0.0, f64::max);
    Ok(HardySafeguard { exponent: p, constants, min, max, stable: max <= 2.0 * min })
}

/// `‖f χ_{B0}‖_{Y^p(∞,s)}` against `‖g‖_Y + ‖f χ_{B0}‖_Y`.
#[allow(clippy::too_many_arguments)]
pub fn embedding_check(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    pair: &SobolevPair,
    p: f64,
    q: f64,
    s: f64,
    y: &RISpaceSpec,
    zero_average: bool,
) -> Result<InequalityReport> {
    pair.check_space(space)?;
    y.validate()?;
    let w = space.weights();
    let f_star = rearrangement(&restrict(space, &pair.f, b0, zero_average), w)?;
    let g_star = rearrangement(&pair.g, w)?;
    let lhs = ypr_norm(&f_star, y, p, s)?;
    let rhs = ri_norm(&g_star, y)? + ri_norm(&f_star, y)?;
    let guard = hardy_safeguard(y, p.max(q), 0)?;
    let mut report = InequalityReport::new("embed", vec![f_star.domain()], vec![lhs], vec![rhs])
        .param("p", p)
        .param("q", q)
        .param("s", s)
        .param("y", y.to_string())
        .param("b0_center", b0.center)
        .param("b0_radius", b0.radius)
        .param("zero_average", zero_average)
        .param("hardy_min", guard.min)
        .param("hardy_max", guard.max);
    if !guard.stable {
        report.notes.push(format!(
            "P_{} looks unbounded on {y}: sampled constants range over [{}, {}]",
            p.max(q),
            guard.min,
            guard.max
        ));
    }
    Ok(report)
}

/// `μ(supp f)` with an exact zero test.
pub fn support_measure(f: &[f64], weights: &[f64]) -> f64 {
    f.iter().zip(weights).filter(|(v, _)| **v != 0.0).map(|(_, w)| w).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaberKrahnReport {
    /// `‖f‖_{L^p}` against `[‖g^q‖_Z φ_{Z'}(‖f‖_0)]^{1/q} ‖f‖_0^{(s+p)/(sp) - 1/q}`.
    pub part_i: InequalityReport,
    /// `‖f‖_∞` against `[‖g^q‖_Z φ_{Z'}(‖f‖_0)]^{1/q} ‖f‖_0^{1/s - 1/q}`, when `p = 1` and `q > s`.
    pub part_ii: Option<InequalityReport>,
    pub notice: Option<String>,
}

struct FkInputs {
    support: f64,
    /// `[‖g^q‖_Z φ_{Z'}(‖f‖_0)]^{1/q}`.
    base: f64,
}

fn fk_inputs(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    pair: &SobolevPair,
    q: f64,
    z: &RISpaceSpec,
    c2: f64,
) -> Result<FkInputs> {
    pair.check_space(space)?;
    check_window(c2)?;
    z.validate()?;
    let w = space.weights();
    let inside = b0.mask(space.len());
    if let Some(i) = (0..space.len()).find(|&i| pair.f[i] != 0.0 && !inside[i]) {
        return Err(Error::Hypothesis(format!("f is nonzero at point {i}, outside B0")));
    }
    let support = support_measure(&pair.f, w);
    if !(support < c2 * b0.mass) {
        return Err(Error::Hypothesis(format!(
            "support measure {support} is not below c2 μ(B0) = {}",
            c2 * b0.mass
        )));
    }
    if support == 0.0 {
        return Ok(FkInputs { support, base: 0.0 });
    }
    let gq: Vec<f64> = pair.g.iter().map(|v| v.powf(q)).collect();
    let gz = ri_norm(&rearrangement(&gq, w)?, z)?;
    let phi = associate_fundamental_function(z, support)?;
    Ok(FkInputs { support, base: (gz * phi).powf(1.0 / q) })
}

fn fk_params(r: InequalityReport, p: f64, q: f64, s: f64, z: &RISpaceSpec, c2: f64, support: f64) -> InequalityReport {
    r.param("p", p)
        .param("q", q)
        .param("s", s)
        .param("z", z.to_string())
        .param("c2", c2)
        .param("support", support)
}

#[allow(clippy::too_many_arguments)]
pub fn faber_krahn(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    pair: &SobolevPair,
    p: f64,
    q: f64,
    s: f64,
    z: &RISpaceSpec,
    c2: f64,
) -> Result<FaberKrahnReport> {
    if !(p >= 1.0 && p.is_finite()) || !(q >= 1.0 && q.is_finite()) || !(s > 0.0) {
        return Err(Error::Argument(format!("need p, q >= 1 and s > 0, got p = {p}, q = {q}, s = {s}")));
    }
    let inp = fk_inputs(space, b0, pair, q, z, c2)?;
    let w = space.weights();
    let lhs = ri_norm(&rearrangement(&pair.f, w)?, &RISpaceSpec::Lp { p })?;
    let rhs = inp.base * inp.support.powf((s + p) / (s * p) - 1.0 / q);
    let part_i = fk_params(
        InequalityReport::new("faber-krahn-i", vec![inp.support], vec![lhs], vec![rhs]),
        p,
        q,
        s,
        z,
        c2,
        inp.support,
    );
    let (part_ii, notice) = if p == 1.0 && q > s {
        (Some(sup_report(pair, &inp, q, s, z, c2)?), None)
    } else {
        (None, Some(format!("part (ii) needs p = 1 and q > s; skipped for p = {p}, q = {q}, s = {s}")))
    };
    Ok(FaberKrahnReport { part_i, part_ii, notice })
}

fn sup_report(
    pair: &SobolevPair,
    inp: &FkInputs,
    q: f64,
    s: f64,
    z: &RISpaceSpec,
    c2: f64,
) -> Result<InequalityReport> {
    let lhs = pair.f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rhs = inp.base * inp.support.powf(1.0 / s - 1.0 / q);
    Ok(fk_params(
        InequalityReport::new("faber-krahn-ii", vec![inp.support], vec![lhs], vec![rhs]),
        1.0,
        q,
        s,
        z,
        c2,
        inp.support,
    ))
}

/// Part (ii) alone; `q <= s` is a hypothesis violation.
#[allow(clippy::too_many_arguments)]
pub fn faber_krahn_sup(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    pair: &SobolevPair,
    q: f64,
    s: f64,
    z: &RISpaceSpec,
    c2: f64,
) -> Result<InequalityReport> {
    if !(q > s) {
        return Err(Error::Hypothesis(format!("the sup-norm bound needs q > s, got q = {q}, s = {s}")));
    }
    let inp = fk_inputs(space, b0, pair, q, z, c2)?;
    sup_report(pair, &inp, q, s, z, c2)
}

/// `‖f‖_1 / (‖f‖_0^{1/n + 1 - 1/p} ‖g‖_p)` on an `n`-dimensional space.
pub fn faber_krahn_euclidean(pair: &SobolevPair, weights: &[f64], n: usize, p: f64) -> f64 {
    let l1: f64 = pair.f.iter().zip(weights).map(|(v, w)| v.abs() * w).sum();
    let support = support_measure(&pair.f, weights);
    let grad: f64 = pair.g.iter().zip(weights).map(|(v, w)| v.powf(p) * w).sum::<f64>().powf(1.0 / p);
    crate::verify::ratio(l1, support.powf(1.0 / n as f64 + 1.0 - 1.0 / p) * grad)
}
