use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximal::{hl_maximal, riesz_constant, sharp_maximal_limited, MaximalField, DEFAULT_SHARP_LIMIT};
use crate::rearrange::{rearrangement, StepFunction};
use crate::space::{BallIndexSet, MetricMeasureSpace};
use crate::verify::report::{check_window, ratio, Curve, InequalityReport};
use crate::verify::{restrict, SobolevPair};

/// Subdivisions of every breakpoint interval in the t-grid.
const REFINE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiOptions {
    /// Replace `f` by `f - f_{B0}` before restricting to `B0`.
    pub zero_average: bool,
    /// Also evaluate both sides at the breakpoints beyond the window.
    pub diagnostics: bool,
    /// Cap on `|4B0|` for the sharp maximal function.
    pub sharp_limit: usize,
}

impl Default for BiOptions {
    fn default() -> Self {
        Self { zero_average: false, diagnostics: false, sharp_limit: DEFAULT_SHARP_LIMIT }
    }
}

/// Breakpoints of `f` and [`REFINE`]-fold subdivisions of every breakpoint interval,
/// restricted to `(0, w)`. Grids for smaller `w` are subsets of grids for larger `w`.
fn window_grid(f: &StepFunction, w: f64, smallest_atom: f64) -> Result<Vec<f64>> {
    if w < smallest_atom {
        return Err(Error::Window(format!(
            "window (0, {w}) is shorter than the smallest point mass {smallest_atom} of B0"
        )));
    }
    let mut grid = Vec::new();
    let mut prev = 0.0;
    for &t in f.breakpoints() {
        for k in 1..=REFINE {
            let x = if k == REFINE { t } else { prev + (t - prev) * k as f64 / REFINE as f64 };
            if x >= w {
                break;
            }
            grid.push(x);
        }
        if t >= w {
            break;
        }
        prev = t;
    }
    if grid.is_empty() {
        // f* is constant on the whole window
        grid.extend((1..REFINE).map(|k| w * k as f64 / REFINE as f64));
    }
    Ok(grid)
}

fn smallest_atom(space: &MetricMeasureSpace, b0: &BallIndexSet) -> f64 {
    let w = space.weights();
    b0.members.iter().map(|&i| w[i]).fold(f64::INFINITY, f64::min)
}

/// `t^{-1/s} ((1/t) ∫_0^t (F(u) - F(t))^p du)^{1/p}`.
fn bi_lhs_value(f: &StepFunction, t: f64, p: f64, s: f64) -> Result<f64> {
    Ok(t.powf(-1.0 / s) * f.oscillation(t, p)?)
}

fn params(report: InequalityReport, b0: &BallIndexSet, p: f64, q: f64, c2: f64, opts: &BiOptions) -> InequalityReport {
    report
        .param("p", p)
        .param("q", q)
        .param("c2", c2)
        .param("b0_center", b0.center)
        .param("b0_radius", b0.radius)
        .param("b0_mass", b0.mass)
        .param("zero_average", opts.zero_average)
}

/// `t^{-1/s} O_p([f χ_{B0}]*, t)` against `[(g^q)**(t)]^{1/q}` on `(0, c2 μ(B0))`.
pub fn bi_curve(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    pair: &SobolevPair,
    p: f64,
    q: f64,
    s: f64,
    c2: f64,
) -> Result<InequalityReport> {
    bi_curve_with(space, b0, pair, p, q, s, c2, &BiOptions::default())
}

#[allow(clippy::too_many_arguments)]
pub fn bi_curve_with(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    pair: &SobolevPair,
    p: f64,
    q: f64,
    s: f64,
    c2: f64,
    opts: &BiOptions,
) -> Result<InequalityReport> {
    pair.check_space(space)?;
    check_window(c2)?;
    if !(s > 0.0) || !(q >= 1.0 && q.is_finite()) {
        return Err(Error::Argument(format!("need s > 0 and 1 <= q < inf, got s = {s}, q = {q}")));
    }
    let w = space.weights();
    let f_star = rearrangement(&restrict(space, &pair.f, b0, opts.zero_average), w)?;
    let gq: Vec<f64> = pair.g.iter().map(|v| v.powf(q)).collect();
    let g_star = rearrangement(&gq, w)?;
    let side = |t: f64| -> Result<(f64, f64)> {
        Ok((bi_lhs_value(&f_star, t, p, s)?, g_star.average_star(t)?.powf(1.0 / q)))
    };

    let hi = c2 * b0.mass;
    let ts = window_grid(&f_star, hi, smallest_atom(space, b0))?;
    let (mut lhs, mut rhs) = (Vec::with_capacity(ts.len()), Vec::with_capacity(ts.len()));
    for &t in &ts {
        let (l, r) = side(t)?;
        lhs.push(l);
        rhs.push(r);
    }
    let mut report = params(InequalityReport::new("bi", ts, lhs, rhs), b0, p, q, c2, opts)
        .param("s", s)
        .with_window(0.0, hi);
    if opts.diagnostics {
        let outside: Vec<f64> = f_star.breakpoints().iter().copied().filter(|&t| t >= hi).collect();
        let mut l = Vec::with_capacity(outside.len());
        let mut r = Vec::with_capacity(outside.len());
        for &t in &outside {
            let (a, b) = side(t)?;
            l.push(a);
            r.push(b);
        }
        report.diagnostics = Some(Curve::new(outside, l, r));
    }
    Ok(report)
}

/// `4B0`, clipped to the space; the flag is set when clipping happened.
pub fn four_ball(space: &MetricMeasureSpace, b0: &BallIndexSet) -> Result<(BallIndexSet, bool)> {
    let four = b0.dilate(space, 4.0)?;
    let clipped = 4.0 * b0.radius > space.eccentricity(b0.center);
    Ok((four, clipped))
}

/// `t^{-q/p} (∫_0^t (F(u) - F(t))^p du)^{1/p}` against `(f#_{4B0,p,q})*(t)` on `(0, c2 μ(B0))`.
#[allow(clippy::too_many_arguments)]
pub fn bi_lhs_curve(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    f: &[f64],
    p: f64,
    q: f64,
    c2: f64,
    opts: &BiOptions,
) -> Result<InequalityReport> {
    let (four, clipped) = four_ball(space, b0)?;
    if clipped {
        log::warn!("4B0 exceeds the space and is clipped to it");
    }
    let sharp = sharp_maximal_limited(space, f, &four, p, q, opts.sharp_limit)?;
    let mut report = bi_lhs_curve_from_field(space, b0, f, &sharp, p, q, c2, opts)?;
    if clipped {
        report.notes.push("4B0 clipped to the space".into());
    }
    Ok(report)
}

/// [`bi_lhs_curve`] with a precomputed `f#_{4B0,p,q}` field.
#[allow(clippy::too_many_arguments)]
pub fn bi_lhs_curve_from_field(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    f: &[f64],
    sharp: &MaximalField,
    p: f64,
    q: f64,
    c2: f64,
    opts: &BiOptions,
) -> Result<InequalityReport> {
    check_window(c2)?;
    if f.len() != space.len() || sharp.values.len() != space.len() {
        return Err(Error::Argument("f and the sharp field must live on the space".into()));
    }
    let w = space.weights();
    let f_star = rearrangement(&restrict(space, f, b0, opts.zero_average), w)?;
    let vals: Vec<f64> = b0.members.iter().map(|&i| sharp.values[i]).collect();
    let ws: Vec<f64> = b0.members.iter().map(|&i| w[i]).collect();
    let sharp_star = rearrangement(&vals, &ws)?;

    let hi = c2 * b0.mass;
    let ts = window_grid(&f_star, hi, smallest_atom(space, b0))?;
    let mut lhs = Vec::with_capacity(ts.len());
    let mut rhs = Vec::with_capacity(ts.len());
    for &t in &ts {
        lhs.push(t.powf((1.0 - q) / p) * f_star.oscillation(t, p)?);
        rhs.push(sharp_star.value_at(t));
    }
    Ok(params(InequalityReport::new("bi-lhs", ts, lhs, rhs), b0, p, q, c2, opts).with_window(0.0, hi))
}

/// The bi constant next to the three factors whose product bounds it:
/// `C_bi <= C_lhs · C_pw · C_R^{1/q}` where
/// `C_lhs` is the bi-lhs constant with `q' = 1 + p/s`,
/// `C_pw = max_{B0} f#_{4B0,p,q'} / (M(g^q))^{1/q}` and
/// `C_R = sup_t (M(g^q))*(t) / (g^q)**(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factorization {
    pub bi: f64,
    pub bi_lhs: f64,
    pub pointwise_poincare: f64,
    pub riesz: f64,
    pub product: f64,
}

impl Factorization {
    pub fn holds(&self, slack: f64) -> bool {
        self.bi <= slack * self.product
    }
}

#[allow(clippy::too_many_arguments)]
pub fn factorization(
    space: &MetricMeasureSpace,
    b0: &BallIndexSet,
    pair: &SobolevPair,
    p: f64,
    q: f64,
    s: f64,
    c2: f64,
    opts: &BiOptions,
) -> Result<Factorization> {
    let bi = bi_curve_with(space, b0, pair, p, q, s, c2, opts)?;
    let q_sharp = 1.0 + p / s;
    let (four, _) = four_ball(space, b0)?;
    let sharp = sharp_maximal_limited(space, &pair.f, &four, p, q_sharp, opts.sharp_limit)?;
    let lhs = bi_lhs_curve_from_field(space, b0, &pair.f, &sharp, p, q_sharp, c2, opts)?;

    let gq: Vec<f64> = pair.g.iter().map(|v| v.powf(q)).collect();
    let mg = hl_maximal(space, &gq)?;
    let pointwise = b0
        .members
        .iter()
        .map(|&i| ratio(sharp.values[i], mg.values[i].powf(1.0 / q)))
        .fold(0.0, f64::max);
    let (riesz, _) = riesz_constant(&mg, &gq, space.weights())?;
    let riesz = riesz.powf(1.0 / q);
    Ok(Factorization {
        bi: bi.best_constant,
        bi_lhs: lhs.best_constant,
        pointwise_poincare: pointwise,
        riesz,
        product: lhs.best_constant * pointwise * riesz,
    })
}
