//! Evidence-invariant bounds anchored at `(x0, p0)`.
//!
//! Every sensitivity function through `(x0, p0)` lies between an increasing
//! curve through `(0, 0)` and `(1, 1)` and a decreasing curve through `(0, 1)`
//! and `(1, 0)`. For arbitrary functions these curves are rectangular
//! hyperbolas; for functions known to be linear they are straight lines. All
//! operations here depend only on `(x0, p0)` or `(x0, p1, p2)`, never on a
//! network.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::sensfun::{FunctionKind, HyperbolaForm};

/// Distance from `p0 = x0` (or `p0 + x0 = 1`) under which a hyperbolic branch is
/// replaced by its limiting straight line.
pub const DEGENERATE_EPS: f64 = 1e-12;

/// Number of `p1` samples used by [`evidence_invariant_deviation`].
pub const INVARIANT_GRID_POINTS: usize = 10_001;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// One side of a hyperbolic envelope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Hyperbola(HyperbolaForm),
    Line(Line),
}

/// Shared interface of both envelope kinds.
pub trait Envelope {
    fn anchor(&self) -> (f64, f64);
    fn increasing_at(&self, x: f64) -> f64;
    fn decreasing_at(&self, x: f64) -> f64;

    /// `(min{i(x), d(x)}, max{i(x), d(x)})`.
    fn bounds_at(&self, x: f64) -> (f64, f64) {
        let (i, d) = (self.increasing_at(x), self.decreasing_at(x));
        (i.min(d), i.max(d))
    }
}

pub fn envelope_bounds_at<E: Envelope + ?Sized>(env: &E, x: f64) -> (f64, f64) {
    env.bounds_at(x)
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} = {v} must lie strictly inside (0, 1)"
        )))
    }
}

/// Hyperbolas `i` and `d` through `(x0, p0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicEnvelope {
    pub x0: f64,
    pub p0: f64,
    pub increasing: Branch,
    pub decreasing: Branch,
}

pub fn hyperbolic_envelope(x0: f64, p0: f64) -> Result<HyperbolicEnvelope> {
    check_open_unit("x0", x0)?;
    check_open_unit("p0", p0)?;
    let increasing = if (x0 - p0).abs() < DEGENERATE_EPS {
        Branch::Line(Line {
            slope: 1.0,
            intercept: 0.0,
        })
    } else {
        let s = (x0 - p0 * x0) / (x0 - p0);
        Branch::Hyperbola(HyperbolaForm::new(s * (1.0 - s), s, 1.0 - s))
    };
    let decreasing = if (x0 + p0 - 1.0).abs() < DEGENERATE_EPS {
        Branch::Line(Line {
            slope: -1.0,
            intercept: 1.0,
        })
    } else {
        let s = p0 * x0 / (x0 + p0 - 1.0);
        Branch::Hyperbola(HyperbolaForm::new(s * (s - 1.0), s, s))
    };
    Ok(HyperbolicEnvelope {
        x0,
        p0,
        increasing,
        decreasing,
    })
}

impl HyperbolicEnvelope {
    /// `i'(x)`.
    pub fn increasing_slope(&self, x: f64) -> f64 {
        match self.increasing {
            Branch::Hyperbola(h) => h.derivative(x),
            Branch::Line(l) => l.slope,
        }
    }

    /// `d'(x)`.
    pub fn decreasing_slope(&self, x: f64) -> f64 {
        match self.decreasing {
            Branch::Hyperbola(h) => h.derivative(x),
            Branch::Line(l) => l.slope,
        }
    }
}

impl Envelope for HyperbolicEnvelope {
    fn anchor(&self) -> (f64, f64) {
        (self.x0, self.p0)
    }

    // With r = s(1 − s) and t = 1 − s, r/(x − s) + t factors to (1 − s)·x/(x − s),
    // which stays accurate when |s| is large.
    fn increasing_at(&self, x: f64) -> f64 {
        match self.increasing {
            Branch::Hyperbola(h) => (1.0 - h.s) * x / (x - h.s),
            Branch::Line(l) => l.eval(x),
        }
    }

    // r = s(s − 1), t = s: r/(x − s) + t = s·(x − 1)/(x − s)
    fn decreasing_at(&self, x: f64) -> f64 {
        match self.decreasing {
            Branch::Hyperbola(h) => h.s * (x - 1.0) / (x - h.s),
            Branch::Line(l) => l.eval(x),
        }
    }
}

/// Straight-line bounds through `(x0, p0)` for linear sensitivity functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearEnvelope {
    pub x0: f64,
    pub p0: f64,
    pub increasing: Line,
    pub decreasing: Line,
}

pub fn linear_envelope(x0: f64, p0: f64) -> Result<LinearEnvelope> {
    check_open_unit("x0", x0)?;
    check_open_unit("p0", p0)?;
    let increasing = if x0 >= p0 {
        Line {
            slope: p0 / x0,
            intercept: 0.0,
        }
    } else {
        Line {
            slope: (1.0 - p0) / (1.0 - x0),
            intercept: (p0 - x0) / (1.0 - x0),
        }
    };
    let decreasing = if x0 >= 1.0 - p0 {
        Line {
            slope: (p0 - 1.0) / x0,
            intercept: 1.0,
        }
    } else {
        Line {
            slope: -p0 / (1.0 - x0),
            intercept: p0 / (1.0 - x0),
        }
    };
    Ok(LinearEnvelope {
        x0,
        p0,
        increasing,
        decreasing,
    })
}

impl Envelope for LinearEnvelope {
    fn anchor(&self) -> (f64, f64) {
        (self.x0, self.p0)
    }

    fn increasing_at(&self, x: f64) -> f64 {
        self.increasing.eval(x)
    }

    fn decreasing_at(&self, x: f64) -> f64 {
        self.decreasing.eval(x)
    }
}

/// Bounds on the new probability after moving the parameter from `x0` to `x1`,
/// expressed through the log-odds change `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaBound {
    pub lower: f64,
    pub upper: f64,
    /// `|logit(x1) − logit(x0)|`; infinite at `x1 ∈ {0, 1}`.
    pub delta: f64,
    /// Set when `x1` is 0 or 1 and the bounds are the limiting values 0 and 1.
    pub limit: bool,
}

pub fn delta_bound(x0: f64, p0: f64, x1: f64) -> Result<DeltaBound> {
    check_open_unit("x0", x0)?;
    check_open_unit("p0", p0)?;
    if !(0.0..=1.0).contains(&x1) {
        return Err(Error::InvalidArgument(format!("x1 = {x1} outside [0, 1]")));
    }
    if x1 == 0.0 || x1 == 1.0 {
        return Ok(DeltaBound {
            lower: 0.0,
            upper: 1.0,
            delta: f64::INFINITY,
            limit: true,
        });
    }
    let odds0 = x0 / (1.0 - x0);
    let odds1 = x1 / (1.0 - x1);
    // e^δ as an odds ratio, without a round trip through ln/exp
    let k = (odds1 / odds0).max(odds0 / odds1);
    Ok(DeltaBound {
        lower: p0 / (k - p0 * (k - 1.0)),
        upper: p0 * k / (p0 * (k - 1.0) + 1.0),
        delta: (odds1.ln() - odds0.ln()).abs(),
        limit: false,
    })
}

/// `p0·(1 − p0) / (x0·(1 − x0))`, the largest possible `|f'(x0)|`.
pub fn sensitivity_value_bound(x0: f64, p0: f64) -> Result<f64> {
    check_open_unit("x0", x0)?;
    check_open_unit("p0", p0)?;
    Ok(p0 * (1.0 - p0) / (x0 * (1.0 - x0)))
}

/// Largest possible `|f'(x0)|` for a linear sensitivity function: the steeper
/// of the two linear bounds.
pub fn linear_sensitivity_value_bound(x0: f64, p0: f64) -> Result<f64> {
    let env = linear_envelope(x0, p0)?;
    Ok(env.increasing.slope.abs().max(env.decreasing.slope.abs()))
}

/// Guaranteed shifts of the parameter that cannot reorder `p1` and `p2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationBound {
    pub alpha: f64,
    pub beta: f64,
    pub x_alpha: f64,
    pub x_beta: f64,
    pub clamped_alpha: bool,
    pub clamped_beta: bool,
}

impl DeviationBound {
    fn from_points(x0: f64, x_alpha: f64, x_beta: f64, clamped_alpha: bool, clamped_beta: bool) -> Self {
        let x_alpha = x_alpha.clamp(0.0, x0);
        let x_beta = x_beta.clamp(x0, 1.0);
        Self {
            alpha: x0 - x_alpha,
            beta: x_beta - x0,
            x_alpha,
            x_beta,
            clamped_alpha,
            clamped_beta,
        }
    }

    fn zero(x0: f64) -> Self {
        Self::from_points(x0, x0, x0, false, false)
    }
}

fn check_pair(x0: f64, p1: f64, p2: f64) -> Result<()> {
    check_open_unit("x0", x0)?;
    check_open_unit("p1", p1)?;
    check_open_unit("p2", p2)?;
    if p1 < p2 {
        return Err(Error::InvalidArgument(format!(
            "p1 = {p1} must not be smaller than p2 = {p2}"
        )));
    }
    Ok(())
}

/// Root of `i_a = d_b` nearest the admissible side, from the closed form.
///
/// Returns the two candidate roots of the underlying quadratic.
fn hyperbolic_candidates(x0: f64, pa: f64, pb: f64, q: f64) -> [f64; 2] {
    let r = (1.0 - x0) * q;
    let k = (1.0 - pa) * pb * x0;
    let den = (pa - pb) * x0 * x0 + (1.0 - 2.0 * x0) * pa * (1.0 - pb);
    // The "+" root as printed. The "−" root, −x0·(k − r)/den, cancels badly when
    // den is small; its rationalized form k/(k + r) is used instead.
    let plus = -x0 * (r + k) / den;
    let minus = k / (k + r);
    [plus, minus]
}

fn select_root(candidates: [f64; 2], lo: f64, hi: f64, oracle: impl FnOnce() -> Option<f64>) -> Result<f64> {
    const SLACK: f64 = 1e-12;
    let inside: Vec<f64> = candidates
        .into_iter()
        .filter(|c| c.is_finite() && *c >= lo - SLACK && *c <= hi + SLACK)
        .collect();
    match inside.as_slice() {
        [one] => Ok(one.clamp(lo, hi)),
        [a, b] => {
            let reference = oracle().ok_or_else(|| Error::Internal("envelope crossing not bracketed".into()))?;
            log::warn!(
                "both closed-form roots {a} and {b} fall inside [{lo}, {hi}]; using the one nearest {reference}"
            );
            let pick = if (a - reference).abs() <= (b - reference).abs() {
                *a
            } else {
                *b
            };
            Ok(pick.clamp(lo, hi))
        }
        _ => Err(Error::Internal(format!(
            "no closed-form root in [{lo}, {hi}] (candidates {candidates:?})"
        ))),
    }
}

/// Minimum admissible deviation for hyperbolic sensitivity functions.
pub fn min_admissible_deviation_hyperbolic(x0: f64, p1: f64, p2: f64) -> Result<DeviationBound> {
    check_pair(x0, p1, p2)?;
    if p1 == p2 {
        return Ok(DeviationBound::zero(x0));
    }
    let q = (p1 * (1.0 - p1) * p2 * (1.0 - p2)).sqrt();
    let x_alpha = select_root(hyperbolic_candidates(x0, p1, p2, q), 0.0, x0, || {
        envelope_crossings(x0, p1, p2, FunctionKind::Hyperbolic)
            .ok()
            .map(|c| c.0)
    })?;
    let x_beta = select_root(hyperbolic_candidates(x0, p2, p1, q), x0, 1.0, || {
        envelope_crossings(x0, p1, p2, FunctionKind::Hyperbolic)
            .ok()
            .map(|c| c.1)
    })?;
    Ok(DeviationBound::from_points(x0, x_alpha, x_beta, false, false))
}

/// Crossing of `i_l(pa)` and `d_l(pb)`, unclamped. Case boundaries follow the
/// printed inequalities exactly.
fn linear_crossing(x0: f64, pa: f64, pb: f64) -> f64 {
    let upper_case = x0 >= pa;
    let lower_case = x0 >= 1.0 - pb;
    match (upper_case, lower_case) {
        (true, false) => pb * x0 / (pa - (pa - pb) * x0),
        (true, true) => x0 / (pa - pb + 1.0),
        (false, true) => (1.0 - pa) * x0 / (1.0 - pb - (pa - pb) * x0),
        (false, false) => (pa - pb - x0) / (pa - pb - 1.0),
    }
}

/// Minimum admissible deviation for linear sensitivity functions.
pub fn min_admissible_deviation_linear(x0: f64, p1: f64, p2: f64) -> Result<DeviationBound> {
    check_pair(x0, p1, p2)?;
    if p1 == p2 {
        return Ok(DeviationBound::zero(x0));
    }
    let x_alpha = linear_crossing(x0, p1, p2);
    let x_beta = linear_crossing(x0, p2, p1);
    Ok(DeviationBound::from_points(
        x0,
        x_alpha.max(0.0),
        x_beta.min(1.0),
        x_alpha <= 0.0,
        x_beta >= 1.0,
    ))
}

pub fn min_admissible_deviation(x0: f64, p1: f64, p2: f64, kind: FunctionKind) -> Result<DeviationBound> {
    match kind {
        FunctionKind::Hyperbolic => min_admissible_deviation_hyperbolic(x0, p1, p2),
        FunctionKind::Linear => min_admissible_deviation_linear(x0, p1, p2),
    }
}

/// Bisection oracle for the closed forms: `x_alpha` from the crossing of the
/// increasing bound through `p1` with the decreasing bound through `p2` on
/// `[0, x0]`, and `x_beta` from the decreasing bound through `p1` and the
/// increasing bound through `p2` on `[x0, 1]`. Linear crossings outside the unit
/// interval are reported at the interval edge.
pub fn envelope_crossings(x0: f64, p1: f64, p2: f64, kind: FunctionKind) -> Result<(f64, f64)> {
    check_pair(x0, p1, p2)?;
    if p1 == p2 {
        return Ok((x0, x0));
    }
    let (first, second): (Box<dyn Envelope>, Box<dyn Envelope>) = match kind {
        FunctionKind::Hyperbolic => (
            Box::new(hyperbolic_envelope(x0, p1)?),
            Box::new(hyperbolic_envelope(x0, p2)?),
        ),
        FunctionKind::Linear => (Box::new(linear_envelope(x0, p1)?), Box::new(linear_envelope(x0, p2)?)),
    };
    let below = |x: f64| first.increasing_at(x) - second.decreasing_at(x);
    let above = |x: f64| first.decreasing_at(x) - second.increasing_at(x);
    let x_alpha = if below(0.0) >= 0.0 {
        0.0
    } else {
        bisect(below, 0.0, x0).ok_or_else(|| Error::Internal("lower crossing not bracketed".into()))?
    };
    let x_beta = if above(1.0) >= 0.0 {
        1.0
    } else {
        bisect(above, x0, 1.0).ok_or_else(|| Error::Internal("upper crossing not bracketed".into()))?
    };
    Ok((x_alpha, x_beta))
}

/// Intersection of the pairwise deviations of `p1` against every competitor.
pub fn min_deviation_nary(x0: f64, p1: f64, competitors: &[f64], kind: FunctionKind) -> Result<DeviationBound> {
    if competitors.is_empty() {
        return Err(Error::InvalidArgument("no competing probabilities given".into()));
    }
    let total: f64 = p1 + competitors.iter().sum::<f64>();
    if total > 1.0 + 1e-9 {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total} > 1")));
    }
    let mut best: Option<DeviationBound> = None;
    for &p in competitors {
        let pair = min_admissible_deviation(x0, p1, p, kind)?;
        best = Some(match best {
            None => pair,
            Some(b) => {
                let (alpha, clamped_alpha) = if pair.alpha < b.alpha {
                    (pair.alpha, pair.clamped_alpha)
                } else {
                    (b.alpha, b.clamped_alpha)
                };
                let (beta, clamped_beta) = if pair.beta < b.beta {
                    (pair.beta, pair.clamped_beta)
                } else {
                    (b.beta, b.clamped_beta)
                };
                DeviationBound {
                    alpha,
                    beta,
                    x_alpha: x0 - alpha,
                    x_beta: x0 + beta,
                    clamped_alpha,
                    clamped_beta,
                }
            }
        });
    }
    Ok(best.expect("nonempty"))
}

/// Deviation guaranteed for every binary profile with `p1 ≥ p1_lower`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantDeviation {
    pub bound: DeviationBound,
    /// `p1` at which the smallest `alpha` occurred.
    pub alpha_at: f64,
    /// `p1` at which the smallest `beta` occurred.
    pub beta_at: f64,
}

/// Componentwise minimum of the pairwise deviation over `p1 ∈ [p1_lower, 1)`,
/// `p2 = 1 − p1`, on a uniform grid of [`INVARIANT_GRID_POINTS`] points.
pub fn evidence_invariant_deviation(x0: f64, p1_lower: f64, kind: FunctionKind) -> Result<InvariantDeviation> {
    check_open_unit("x0", x0)?;
    if !(0.5..1.0).contains(&p1_lower) {
        return Err(Error::InvalidArgument(format!(
            "p1_lower = {p1_lower} must lie in [0.5, 1)"
        )));
    }
    let n = INVARIANT_GRID_POINTS;
    let step = (1.0 - p1_lower) / n as f64;
    let mut best: Option<InvariantDeviation> = None;
    for j in 0..n {
        let p1 = p1_lower + step * j as f64;
        let dev = min_admissible_deviation(x0, p1, (1.0 - p1).min(p1), kind)?;
        best = Some(match best {
            None => InvariantDeviation {
                bound: dev,
                alpha_at: p1,
                beta_at: p1,
            },
            Some(mut b) => {
                if dev.alpha < b.bound.alpha {
                    b.bound.alpha = dev.alpha;
                    b.bound.x_alpha = dev.x_alpha;
                    b.bound.clamped_alpha = dev.clamped_alpha;
                    b.alpha_at = p1;
                }
                if dev.beta < b.bound.beta {
                    b.bound.beta = dev.beta;
                    b.bound.x_beta = dev.x_beta;
                    b.bound.clamped_beta = dev.clamped_beta;
                    b.beta_at = p1;
                }
                b
            }
        });
    }
    Ok(best.expect("nonempty grid"))
}

/// Binary deviation curve: `points` values of `p1` spread uniformly over
/// `[0.5, 1)`, `p2 = 1 − p1`.
pub fn binary_deviation_curve(x0: f64, kind: FunctionKind, points: usize) -> Result<Vec<(f64, DeviationBound)>> {
    (0..points)
        .map(|j| {
            let p1 = 0.5 + 0.5 * j as f64 / points as f64;
            min_admissible_deviation(x0, p1, (1.0 - p1).min(p1), kind).map(|d| (p1, d))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub p1: f64,
    pub component: &'static str,
    pub previous: f64,
    pub value: f64,
}

/// Places along a curve from [`binary_deviation_curve`] where `alpha` or `beta`
/// decreases by more than `1e-12` as `p1` grows.
pub fn monotonicity_violations(curve: &[(f64, DeviationBound)]) -> Vec<MonotonicityViolation> {
    let mut out = Vec::new();
    for w in curve.windows(2) {
        let ((_, a), (p1, b)) = (w[0], w[1]);
        if b.alpha < a.alpha - 1e-12 {
            out.push(MonotonicityViolation {
                p1,
                component: "alpha",
                previous: a.alpha,
                value: b.alpha,
            });
        }
        if b.beta < a.beta - 1e-12 {
            out.push(MonotonicityViolation {
                p1,
                component: "beta",
                previous: a.beta,
                value: b.beta,
            });
        }
    }
    out
}
