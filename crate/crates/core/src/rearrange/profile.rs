use crate::error::{Error, Result};
use crate::quad::adaptive_simpson;
use crate::rearrange::{RISpaceSpec, StepFunction};

const QUAD_TOL: f64 = 1e-11;
/// Below `HEAD_CUT * first_knot` a non-constant head is replaced by its supremum.
const HEAD_CUT: f64 = 1e-12;
/// Extra log-decades integrated numerically past the first knot for HBW norms.
const HBW_HEAD_SPAN: f64 = 40.0;

/// A nonnegative nonincreasing function on `(0, T]`, smooth between its knots.
pub trait DecreasingProfile {
    fn domain(&self) -> f64;
    fn value(&self, t: f64) -> f64;
    /// `∫_0^t`.
    fn integral(&self, t: f64) -> f64;
    /// Increasing positive knots ending at `T`.
    fn knots(&self) -> Vec<f64>;
    /// Limit at `0+`.
    fn sup(&self) -> f64;
    /// True when the profile is constant on `(0, first knot]`.
    fn constant_head(&self) -> bool {
        false
    }
}

impl DecreasingProfile for StepFunction {
    fn domain(&self) -> f64 {
        StepFunction::domain(self)
    }

    fn value(&self, t: f64) -> f64 {
        self.value_at(t)
    }

    fn integral(&self, t: f64) -> f64 {
        self.integral_to(t)
    }

    fn knots(&self) -> Vec<f64> {
        self.breakpoints().to_vec()
    }

    fn sup(&self) -> f64 {
        StepFunction::sup(self)
    }

    fn constant_head(&self) -> bool {
        true
    }
}

/// Continuous piecewise-linear nonincreasing function through `(ts[k], hs[k])`, `ts[0] = 0`.
/// Repeated abscissae encode downward jumps.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProfile {
    ts: Vec<f64>,
    hs: Vec<f64>,
    prefix: Vec<f64>,
}

impl LinearProfile {
    pub fn new(ts: Vec<f64>, hs: Vec<f64>) -> Result<Self> {
        if ts.len() < 2 || ts.len() != hs.len() || ts[0] != 0.0 {
            return Err(Error::Argument("a linear profile needs >= 2 nodes starting at t = 0".into()));
        }
        if ts.windows(2).any(|w| w[1] < w[0]) || hs.windows(2).any(|w| w[1] > w[0]) || hs.iter().any(|h| *h < 0.0) {
            return Err(Error::Argument("profile nodes must be nondecreasing in t and nonincreasing in value".into()));
        }
        if !(ts[ts.len() - 1] > 0.0) {
            return Err(Error::Argument("profile domain must be positive".into()));
        }
        let mut prefix = vec![0.0];
        for k in 1..ts.len() {
            prefix.push(prefix[k - 1] + 0.5 * (hs[k] + hs[k - 1]) * (ts[k] - ts[k - 1]));
        }
        Ok(Self { ts, hs, prefix })
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ts.iter().copied().zip(self.hs.iter().copied())
    }

    /// Decreasing rearrangement of the piecewise-linear interpolant of `(xs, ys)` on
    /// `[xs[0], xs[last]]`, extended by zero to the rest of `(0, domain]`.
    pub fn rearrange(xs: &[f64], ys: &[f64], domain: f64) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::Argument("need at least two samples".into()));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs[0] < 0.0 || xs[xs.len() - 1] > domain * (1.0 + 1e-12) {
            return Err(Error::Argument("sample abscissae must increase inside (0, domain]".into()));
        }
        if ys.iter().any(|y| !(y.is_finite() && *y >= 0.0)) {
            return Err(Error::Argument("samples must be finite and nonnegative".into()));
        }
        let segments: Vec<(f64, f64, f64)> = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| (x[1] - x[0], y[0].min(y[1]), y[0].max(y[1])))
            .collect();
        let support: f64 = segments.iter().map(|s| s.0).sum();
        let zero_len = (domain - support).max(0.0);

        let mut levels: Vec<f64> = ys.to_vec();
        if zero_len > 0.0 {
            levels.push(0.0);
        }
        levels.sort_by(|a, b| b.total_cmp(a));
        levels.dedup();

        // |{h > u}| and |{h >= u}|
        let above = |u: f64| -> f64 {
            segments
                .iter()
                .map(|&(len, lo, hi)| {
                    if u < lo {
                        len
                    } else if u < hi {
                        len * (hi - u) / (hi - lo)
                    } else {
                        0.0
                    }
                })
                .sum()
        };
        let at_least = |u: f64| -> f64 {
            let seg: f64 = segments
                .iter()
                .map(|&(len, lo, hi)| {
                    if u <= lo {
                        len
                    } else if u <= hi {
                        len * (hi - u) / (hi - lo)
                    } else {
                        0.0
                    }
                })
                .sum();
            seg + if u <= 0.0 { zero_len } else { 0.0 }
        };

        let mut ts = Vec::with_capacity(2 * levels.len());
        let mut hs = Vec::with_capacity(2 * levels.len());
        let mut last_t: f64 = 0.0;
        for &u in &levels {
            for t in [above(u), at_least(u)] {
                let t = t.max(last_t);
                if ts.is_empty() || t > last_t || hs.last() != Some(&u) {
                    ts.push(t);
                    hs.push(u);
                }
                last_t = t;
            }
        }
        ts[0] = 0.0;
        let n = ts.len();
        ts[n - 1] = domain;
        if n == 1 {
            ts.push(domain);
            hs.push(hs[0]);
        }
        Self::new(ts, hs)
    }

    fn segment(&self, t: f64) -> usize {
        self.ts.partition_point(|&x| x < t).clamp(1, self.ts.len() - 1)
    }
}

impl DecreasingProfile for LinearProfile {
    fn domain(&self) -> f64 {
        self.ts[self.ts.len() - 1]
    }

    fn value(&self, t: f64) -> f64 {
        if t > self.domain() {
            return 0.0;
        }
        let k = self.segment(t);
        let (t0, t1) = (self.ts[k - 1], self.ts[k]);
        if t1 == t0 {
            return self.hs[k];
        }
        let w = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.hs[k - 1] + w * (self.hs[k] - self.hs[k - 1])
    }

    fn integral(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let t = t.min(self.domain());
        let k = self.segment(t);
        let t0 = self.ts[k - 1];
        self.prefix[k - 1] + 0.5 * (self.hs[k - 1] + self.value(t)) * (t - t0)
    }

    fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.ts.iter().copied().filter(|&t| t > 0.0).collect();
        k.dedup();
        k
    }

    fn sup(&self) -> f64 {
        self.hs[0]
    }
}

/// Norm of a decreasing profile by quadrature between knots.
pub fn profile_norm(h: &impl DecreasingProfile, y: &RISpaceSpec) -> Result<f64> {
    y.validate()?;
    let knots = h.knots();
    let segments = || {
        std::iter::once(0.0)
            .chain(knots.iter().copied())
            .zip(knots.iter().copied())
            .filter(|(a, b)| b > a)
    };
    match *y {
        RISpaceSpec::Linf => Ok(h.sup()),
        RISpaceSpec::Lp { p } => {
            let total: f64 = segments()
                .map(|(a, b)| adaptive_simpson(&|t| h.value(t).powf(p), a, b, QUAD_TOL))
                .sum();
            Ok(total.powf(1.0 / p))
        }
        RISpaceSpec::Lorentz { p, q } => {
            let e = q / p;
            let mut total = 0.0;
            for (a, b) in segments() {
                // t = e^u removes the t^{q/p - 1} endpoint weight
                let f = |u: f64| {
                    let t = u.exp();
                    t.powf(e) * h.value(t).powf(q)
                };
                let a = if a == 0.0 {
                    let cut = b * HEAD_CUT;
                    total += h.sup().powf(q) * cut.powf(e) / e;
                    cut
                } else {
                    a
                };
                total += adaptive_simpson(&f, a.ln(), b.ln(), QUAD_TOL);
            }
            Ok(total.powf(1.0 / q))
        }
        RISpaceSpec::Hbw { s, domain } => {
            let big_t = h.domain();
            if let Some(d) = domain {
                if (d - big_t).abs() > 1e-9 * big_t {
                    return Err(Error::Domain(format!(
                        "HBW domain {d} does not match the function's domain {big_t}"
                    )));
                }
            }
            Ok(hbw_integral(h, s, big_t))
        }
    }
}

/// `∫_0^T (f**(t) / (1 + log(T/t)))^s dt/t` with `u = log(T/t)`; the head below the
/// first knot is closed-form when the profile is constant there.
fn hbw_integral(h: &impl DecreasingProfile, s: f64, big_t: f64) -> f64 {
    let integrand = |u: f64| {
        let t = big_t * (-u).exp();
        let fss = if t > 0.0 { h.integral(t) / t } else { h.sup() };
        (fss / (1.0 + u)).powf(s)
    };
    let knots = h.knots();
    let mut us: Vec<f64> = knots.iter().rev().map(|&t| (big_t / t).ln().max(0.0)).collect();
    us.dedup();
    let mut total = 0.0;
    for w in us.windows(2) {
        total += adaptive_simpson(&integrand, w[0], w[1], QUAD_TOL);
    }
    let mut head = *us.last().unwrap();
    if !h.constant_head() {
        total += adaptive_simpson(&integrand, head, head + HBW_HEAD_SPAN, QUAD_TOL);
        head += HBW_HEAD_SPAN;
    }
    // ∫_U^∞ (c/(1+u))^s du = c^s (1+U)^{1-s} / (s-1)
    total + h.sup().powf(s) * (1.0 + head).powf(1.0 - s) / (s - 1.0)
}
