//! Exact one-way sensitivity functions.
//!
//! Under proportional co-variation of `x = p(b_i | π)`, both `Pr(a, e)` and
//! `Pr(e)` are linear in `x`, so the probability of interest is
//!
//! ```text
//! f(x) = N(x) / D(x) = (c1·x + c2) / (c3·x + c4)
//! ```
//!
//! The coefficients are read off two propagations, at `x = 0` and `x = 1`, and
//! are kept as literal probabilities (no rescaling). Every state `a_k` of the
//! variable of interest shares the denominator, which makes `Σ_k N_k = D` an
//! identity on the coefficients and turns admissible deviations into crossings
//! of straight lines.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inference::{posterior, Posterior};
use crate::network::{DiscreteNetwork, EvidenceProfile, ParameterRef};

/// Relative threshold on `|c3|` below which a function is classified linear.
pub const LINEARITY_EPS: f64 = 1e-9;

/// Relative gap under which two posteriors at `x0` count as tied.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl SensCoefficients {
    /// Coefficients from `N` and `D` evaluated at the endpoints `x = 0` and `x = 1`.
    pub fn from_endpoints(n0: f64, n1: f64, d0: f64, d1: f64) -> Self {
        Self {
            c1: n1 - n0,
            c2: n0,
            c3: d1 - d0,
            c4: d0,
        }
    }

    pub fn numerator(&self, x: f64) -> f64 {
        self.c1 * x + self.c2
    }

    pub fn denominator(&self, x: f64) -> f64 {
        self.c3 * x + self.c4
    }

    pub fn is_linear(&self) -> bool {
        self.c3.abs() <= LINEARITY_EPS * self.c4.abs().max((self.c3 + self.c4).abs())
    }

    /// Where `D` vanishes on `[0, 1]`, if anywhere. `D` is linear and
    /// nonnegative at both endpoints, so it can only vanish at an endpoint or
    /// everywhere.
    pub fn undefined_region(&self) -> Option<UndefinedRegion> {
        let (d0, d1) = (self.c4, self.c3 + self.c4);
        match (d0 <= 0.0, d1 <= 0.0) {
            (true, true) => Some(UndefinedRegion::Whole),
            (true, false) => Some(UndefinedRegion::Point(0.0)),
            (false, true) => Some(UndefinedRegion::Point(1.0)),
            (false, false) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Linear,
    Hyperbolic,
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionKind::Linear => "linear",
            FunctionKind::Hyperbolic => "hyperbolic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UndefinedRegion {
    Point(f64),
    Whole,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityFunction {
    pub coefficients: SensCoefficients,
    pub x0: f64,
    pub p0: f64,
    pub kind: FunctionKind,
    pub undefined: Option<UndefinedRegion>,
}

impl SensitivityFunction {
    /// Builds a function from its coefficients, with `p0 = f(x0)`.
    pub fn from_coefficients(coefficients: SensCoefficients, x0: f64) -> Result<Self> {
        let d = coefficients.denominator(x0);
        if d <= 0.0 {
            return Err(Error::ZeroEvidence);
        }
        Ok(Self {
            coefficients,
            x0,
            p0: coefficients.numerator(x0) / d,
            kind: if coefficients.is_linear() {
                FunctionKind::Linear
            } else {
                FunctionKind::Hyperbolic
            },
            undefined: coefficients.undefined_region(),
        })
    }

    pub fn is_defined_at(&self, x: f64) -> bool {
        self.coefficients.denominator(x) > 0.0
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("x = {x} outside [0, 1]")));
        }
        let d = self.coefficients.denominator(x);
        if d <= 0.0 {
            return Err(Error::Undefined { x });
        }
        Ok(self.coefficients.numerator(x) / d)
    }

    /// `|f'(x0)| = |c1·c4 − c2·c3| / (c3·x0 + c4)²`.
    pub fn sensitivity_value(&self) -> f64 {
        let SensCoefficients { c1, c2, c3, c4 } = self.coefficients;
        let d = c3 * self.x0 + c4;
        (c1 * c4 - c2 * c3).abs() / (d * d)
    }

    pub fn to_hyperbola(&self) -> Result<HyperbolaForm> {
        if self.kind == FunctionKind::Linear {
            return Err(Error::NotHyperbolic);
        }
        let SensCoefficients { c1, c2, c3, c4 } = self.coefficients;
        let s = -c4 / c3;
        if (0.0..=1.0).contains(&s) {
            return Err(Error::Undefined { x: s });
        }
        Ok(HyperbolaForm::new((c2 * c3 - c1 * c4) / (c3 * c3), s, c1 / c3))
    }
}

/// Quadrant of a hyperbola branch relative to its asymptotes `x = s`, `y = t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quadrant {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for Quadrant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quadrant::I => "I",
            Quadrant::II => "II",
            Quadrant::III => "III",
            Quadrant::IV => "IV",
        })
    }
}

/// `f(x) = r / (x − s) + t`, restricted to the branch that covers `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolaForm {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    pub quadrant: Quadrant,
}

impl HyperbolaForm {
    /// The branch over `[0, 1]` lies right of the asymptote when `s < 0` and
    /// left of it when `s > 1`; the sign of `r` then fixes the quadrant.
    pub fn new(r: f64, s: f64, t: f64) -> Self {
        let quadrant = match (s < 0.0, r < 0.0) {
            (true, false) => Quadrant::I,
            (true, true) => Quadrant::IV,
            (false, false) => Quadrant::III,
            (false, true) => Quadrant::II,
        };
        Self { r, s, t, quadrant }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.r / (x - self.s) + self.t
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let dx = x - self.s;
        -self.r / (dx * dx)
    }
}

/// Shifts `(alpha, beta)` below and above `x0` that keep the most likely value
/// unchanged, and the induced interval `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdmissibleDeviation {
    pub alpha: f64,
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
    /// Index of the most likely state at `x0`.
    pub winner: usize,
    /// Set when the most likely state is not unique at `x0`; the deviation is then `(0, 0)`.
    pub tie: bool,
}

/// Sensitivity functions of every state of one variable for one parameter and
/// one evidence profile. All states share the denominator `D(x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityFamily {
    pub x0: f64,
    /// `(c1, c2)` per state.
    pub numerators: Vec<(f64, f64)>,
    /// `(c3, c4)`.
    pub denominator: (f64, f64),
    /// Posterior at `x0` from direct propagation on the unmodified network.
    pub posterior: Vec<f64>,
    pub evidence_probability: f64,
}

impl SensitivityFamily {
    /// Builds the family from joint probabilities `Pr(a_k, e)` computed at
    /// `x = 0`, `x = 1`, and on the original network.
    pub fn from_joints(x0: f64, at_zero: &[f64], at_one: &[f64], original: &[f64]) -> Result<Self> {
        let d0: f64 = at_zero.iter().sum();
        let d1: f64 = at_one.iter().sum();
        let evidence_probability: f64 = original.iter().sum();
        if evidence_probability <= 0.0 {
            return Err(Error::ZeroEvidence);
        }
        let numerators = at_zero.iter().zip(at_one).map(|(&n0, &n1)| (n1 - n0, n0)).collect();
        Ok(Self {
            x0,
            numerators,
            denominator: (d1 - d0, d0),
            posterior: original.iter().map(|p| p / evidence_probability).collect(),
            evidence_probability,
        })
    }

    pub fn coefficients(&self, state: usize) -> SensCoefficients {
        let (c1, c2) = self.numerators[state];
        let (c3, c4) = self.denominator;
        SensCoefficients { c1, c2, c3, c4 }
    }

    /// Sensitivity function of one state. `p0` is the directly propagated
    /// posterior; returns [`Error::Internal`] if the coefficients do not
    /// reproduce it to `1e-9`.
    pub fn function(&self, state: usize) -> Result<SensitivityFunction> {
        let mut f = SensitivityFunction::from_coefficients(self.coefficients(state), self.x0)?;
        let direct = self.posterior[state];
        if (f.p0 - direct).abs() > 1e-9 {
            return Err(Error::Internal(format!(
                "sensitivity function gives {} at x0 but propagation gives {direct}",
                f.p0
            )));
        }
        f.p0 = direct;
        Ok(f)
    }

    pub fn kind(&self) -> FunctionKind {
        if self.coefficients(0).is_linear() {
            FunctionKind::Linear
        } else {
            FunctionKind::Hyperbolic
        }
    }

    /// Most likely state at `x0` and whether it is tied with another state.
    pub fn winner(&self) -> (usize, bool) {
        let n: Vec<f64> = self.numerators.iter().map(|&(a, b)| a * self.x0 + b).collect();
        let (w, &best) = n
            .iter()
            .enumerate()
            .fold((0, &n[0]), |acc, (k, v)| if *v > *acc.1 { (k, v) } else { acc });
        let scale = self.denominator.0 * self.x0 + self.denominator.1;
        let tie = n
            .iter()
            .enumerate()
            .any(|(k, &v)| k != w && best - v <= TIE_EPS * scale);
        (w, tie)
    }

    /// Exact admissible deviation against every other state.
    pub fn admissible_deviation(&self) -> Result<AdmissibleDeviation> {
        let (w, _) = self.winner();
        let others: Vec<usize> = (0..self.numerators.len()).filter(|&k| k != w).collect();
        self.deviation_against(&others)
    }

    /// Admissible deviation of the most likely state against the listed states
    /// only. With a single competitor this is the pairwise deviation.
    pub fn deviation_against(&self, competitors: &[usize]) -> Result<AdmissibleDeviation> {
        let (c3, c4) = self.denominator;
        if c4 <= 0.0 || c3 + c4 <= 0.0 {
            let x = if c4 <= 0.0 { 0.0 } else { 1.0 };
            return Err(Error::Undefined { x });
        }
        let x0 = self.x0;
        let (w, _) = self.winner();
        let (a1, b1) = self.numerators[w];
        let scale = c3 * x0 + c4;
        let mut lower = 0.0f64;
        let mut upper = 1.0f64;
        for &k in competitors.iter().filter(|&&k| k != w) {
            let (ak, bk) = self.numerators[k];
            let slope = a1 - ak;
            let gap = slope * x0 + (b1 - bk);
            if gap <= TIE_EPS * scale {
                return Ok(AdmissibleDeviation {
                    alpha: 0.0,
                    beta: 0.0,
                    lower: x0,
                    upper: x0,
                    winner: w,
                    tie: true,
                });
            }
            // N_w − N_k is a line, positive at x0: one crossing at most
            if slope > 0.0 {
                let cross = x0 - gap / slope;
                lower = lower.max(cross);
            } else if slope < 0.0 {
                let cross = x0 + gap / -slope;
                upper = upper.min(cross);
            }
        }
        let lower = lower.clamp(0.0, x0);
        let upper = upper.clamp(x0, 1.0);
        Ok(AdmissibleDeviation {
            alpha: x0 - lower,
            beta: upper - x0,
            lower,
            upper,
            winner: w,
            tie: false,
        })
    }
}

fn parameter_in_open_unit(net: &DiscreteNetwork, pref: &ParameterRef) -> Result<f64> {
    let x0 = net.parameter_value(pref)?;
    if x0 <= 0.0 || x0 >= 1.0 {
        return Err(Error::BoundaryParameter { x0 });
    }
    Ok(x0)
}

/// Propagates at `x = 0`, `x = 1`, and on the original network.
pub fn derive_family(
    net: &DiscreteNetwork,
    variable: usize,
    evidence: &EvidenceProfile,
    pref: &ParameterRef,
) -> Result<SensitivityFamily> {
    let x0 = parameter_in_open_unit(net, pref)?;
    let original = posterior(net, variable, evidence)?;
    let at = |x: f64| -> Result<Posterior> { posterior(&net.apply_parameter(pref, x)?, variable, evidence) };
    let zero = at(0.0)?;
    let one = at(1.0)?;
    SensitivityFamily::from_joints(x0, &zero.joint, &one.joint, &original.joint)
}

/// Sensitivity function of `Pr(target | evidence)` in the parameter `pref`.
pub fn derive_sensitivity(
    net: &DiscreteNetwork,
    target: (usize, usize),
    evidence: &EvidenceProfile,
    pref: &ParameterRef,
) -> Result<SensitivityFunction> {
    let (variable, state) = target;
    if variable >= net.len() || state >= net.arity(variable) {
        return Err(Error::InvalidArgument(format!(
            "target ({variable}, {state}) out of range"
        )));
    }
    derive_family(net, variable, evidence, pref)?.function(state)
}

/// Exact admissible deviation of the most likely value of `variable`.
pub fn exact_admissible_deviation(
    net: &DiscreteNetwork,
    variable: usize,
    evidence: &EvidenceProfile,
    pref: &ParameterRef,
) -> Result<AdmissibleDeviation> {
    derive_family(net, variable, evidence, pref)?.admissible_deviation()
}
