//! Evidence-profile sweeps and the bound-verification harness.
//!
//! For one parameter, [`sweep`] derives the exact sensitivity functions under
//! every profile of the observable variables and checks each evidence-invariant
//! bound against them. [`verify_network`] repeats that for every eligible
//! parameter, and [`verify_corpus`] for a list of scenarios (hand-built fixtures
//! and seeded random networks).
//!
//! Bound violations are findings recorded in the reports; only infrastructure
//! failures surface as `Err`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::envelope::{
    delta_bound, hyperbolic_envelope, linear_envelope, min_admissible_deviation, min_deviation_nary, DeviationBound,
    Envelope,
};
use crate::error::{Error, Result};
use crate::inference::{evidence_table, EvidenceTable};
use crate::network::{
    enumerate_profiles, load_network, DiscreteNetwork, EvidenceProfile, ParameterRef, Variable, DEFAULT_PROFILE_CAP,
};
use crate::sensfun::{AdmissibleDeviation, FunctionKind, SensCoefficients, SensitivityFamily};

pub const DEFAULT_GRID_STEP: f64 = 1e-3;
/// Largest tolerated excursion of a sensitivity function outside an envelope.
pub const CONTAINMENT_TOL: f64 = 1e-9;
/// Largest tolerated gap between the hyperbolic envelope and the δ-bounds.
pub const EQUIVALENCE_TOL: f64 = 1e-12;
/// Tolerance when comparing bound intervals with exact admissible intervals.
pub const SOUNDNESS_TOL: f64 = 1e-9;
/// Parameters closer than this to 0 or 1 are skipped.
pub const BOUNDARY_MARGIN: f64 = 0.01;
pub const DEFAULT_SEED: u64 = 7;

/// True iff no observed variable is the parameter's node or one of its
/// descendants. Sufficient (not necessary) for a linear sensitivity function.
pub fn structural_linear(net: &DiscreteNetwork, pref: &ParameterRef, evidence_vars: &[usize]) -> bool {
    let below = net.descendants(pref.node);
    !evidence_vars.iter().any(|&v| below.get(v).copied().unwrap_or(false))
}

/// Deliberate corruption of the envelopes, used to show the harness detects
/// broken bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeFault {
    /// Added to the `p0` anchor constant before the envelopes are built.
    pub anchor_shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub grid_step: f64,
    pub profile_cap: u128,
    pub fault: Option<EnvelopeFault>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            grid_step: DEFAULT_GRID_STEP,
            profile_cap: DEFAULT_PROFILE_CAP,
            fault: None,
        }
    }
}

impl SweepOptions {
    fn grid(&self, x0: f64) -> Result<Vec<f64>> {
        if !(self.grid_step > 0.0 && self.grid_step <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "grid step {} outside (0, 0.5]",
                self.grid_step
            )));
        }
        let n = (1.0 / self.grid_step).round() as usize;
        let mut xs: Vec<f64> = (0..=n).map(|j| (j as f64 * self.grid_step).min(1.0)).collect();
        if *xs.last().expect("nonempty") < 1.0 {
            xs.push(1.0);
        }
        xs.push(x0);
        Ok(xs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RecordStatus {
    Analyzed,
    /// `Pr(e) = 0`: no posterior, excluded from aggregates.
    Undefined,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRecord {
    pub index: usize,
    pub profile: String,
    #[serde(skip)]
    pub evidence: EvidenceProfile,
    pub status: RecordStatus,
    pub evidence_probability: f64,
    pub p0: Option<f64>,
    pub coefficients: Option<SensCoefficients>,
    pub kind: Option<FunctionKind>,
    pub sensitivity_value: Option<f64>,
    pub exact_deviation: Option<AdmissibleDeviation>,
    pub bound_deviation: Option<DeviationBound>,
    /// Whether `p0` allowed envelopes to be built.
    pub envelope_checked: bool,
    pub containment_ok: bool,
    pub max_envelope_violation: f64,
    pub max_equivalence_error: f64,
    /// Bound intervals (n-ary and every pairwise one) lie inside the exact intervals.
    pub deviation_sound: Option<bool>,
    pub notes: Vec<String>,
}

impl ProfileRecord {
    fn undefined(index: usize, net: &DiscreteNetwork, evidence: EvidenceProfile) -> Self {
        Self {
            index,
            profile: evidence.label(net),
            evidence,
            status: RecordStatus::Undefined,
            evidence_probability: 0.0,
            p0: None,
            coefficients: None,
            kind: None,
            sensitivity_value: None,
            exact_deviation: None,
            bound_deviation: None,
            envelope_checked: false,
            containment_ok: true,
            max_envelope_violation: 0.0,
            max_equivalence_error: 0.0,
            deviation_sound: None,
            notes: vec!["evidence has probability zero".into()],
        }
    }

    pub fn is_analyzed(&self) -> bool {
        self.status == RecordStatus::Analyzed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extreme {
    pub value: f64,
    pub profile_index: usize,
    pub profile: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinearityTally {
    pub structural: bool,
    pub numeric_linear: usize,
    pub numeric_hyperbolic: usize,
    /// Profiles where the structural condition holds but the function is not numerically linear.
    pub mismatches: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub profile_count: usize,
    pub undefined_count: usize,
    pub worst_sensitivity: Option<Extreme>,
    pub min_alpha: Option<Extreme>,
    pub min_beta: Option<Extreme>,
    pub containment_violations: Vec<usize>,
    pub deviation_violations: Vec<usize>,
    pub equivalence_failures: Vec<usize>,
    pub linearity: LinearityTally,
    pub ties: usize,
}

impl AggregateReport {
    pub fn passed(&self) -> bool {
        self.containment_violations.is_empty()
            && self.deviation_violations.is_empty()
            && self.equivalence_failures.is_empty()
            && self.linearity.mismatches == 0
    }

    fn build(records: &[ProfileRecord], structural: bool) -> Self {
        let mut agg = AggregateReport {
            profile_count: records.len(),
            undefined_count: 0,
            worst_sensitivity: None,
            min_alpha: None,
            min_beta: None,
            containment_violations: Vec::new(),
            deviation_violations: Vec::new(),
            equivalence_failures: Vec::new(),
            linearity: LinearityTally {
                structural,
                numeric_linear: 0,
                numeric_hyperbolic: 0,
                mismatches: 0,
            },
            ties: 0,
        };
        let extreme = |r: &ProfileRecord, value: f64| Extreme {
            value,
            profile_index: r.index,
            profile: r.profile.clone(),
        };
        for r in records {
            if !r.is_analyzed() {
                agg.undefined_count += 1;
                continue;
            }
            if let Some(sv) = r.sensitivity_value {
                if agg.worst_sensitivity.as_ref().is_none_or(|w| sv > w.value) {
                    agg.worst_sensitivity = Some(extreme(r, sv));
                }
            }
            if let Some(dev) = &r.exact_deviation {
                if dev.tie {
                    agg.ties += 1;
                }
                if agg.min_alpha.as_ref().is_none_or(|m| dev.alpha < m.value) {
                    agg.min_alpha = Some(extreme(r, dev.alpha));
                }
                if agg.min_beta.as_ref().is_none_or(|m| dev.beta < m.value) {
                    agg.min_beta = Some(extreme(r, dev.beta));
                }
            }
            if !r.containment_ok {
                agg.containment_violations.push(r.index);
            }
            if r.deviation_sound == Some(false) {
                agg.deviation_violations.push(r.index);
            }
            if r.max_equivalence_error > EQUIVALENCE_TOL {
                agg.equivalence_failures.push(r.index);
            }
            match r.kind {
                Some(FunctionKind::Linear) => agg.linearity.numeric_linear += 1,
                Some(FunctionKind::Hyperbolic) => {
                    agg.linearity.numeric_hyperbolic += 1;
                    if structural {
                        agg.linearity.mismatches += 1;
                    }
                }
                None => {}
            }
        }
        agg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub parameter: String,
    #[serde(skip)]
    pub pref: ParameterRef,
    pub x0: f64,
    pub structural_linear: bool,
    pub records: Vec<ProfileRecord>,
    pub aggregate: AggregateReport,
}

impl SweepResult {
    pub fn passed(&self) -> bool {
        self.aggregate.passed()
    }
}

fn check_target(net: &DiscreteNetwork, target: (usize, usize), observables: &[usize]) -> Result<()> {
    let (v, s) = target;
    if v >= net.len() || s >= net.arity(v) {
        return Err(Error::InvalidArgument(format!("target ({v}, {s}) out of range")));
    }
    if observables.contains(&v) {
        return Err(Error::InvalidArgument(format!(
            "target `{}` is among the observables",
            net.variable(v).name
        )));
    }
    Ok(())
}

/// Analyzes one parameter under every profile of `observables`.
pub fn sweep(
    net: &DiscreteNetwork,
    target: (usize, usize),
    observables: &[usize],
    pref: &ParameterRef,
    options: &SweepOptions,
) -> Result<SweepResult> {
    check_target(net, target, observables)?;
    let profiles = enumerate_profiles(net, observables, options.profile_cap)?;
    let original = evidence_table(net, target.0, observables)?;
    sweep_with(net, target, observables, pref, options, &profiles, &original)
}

fn sweep_with(
    net: &DiscreteNetwork,
    target: (usize, usize),
    observables: &[usize],
    pref: &ParameterRef,
    options: &SweepOptions,
    profiles: &[EvidenceProfile],
    original: &EvidenceTable,
) -> Result<SweepResult> {
    let x0 = net.parameter_value(pref)?;
    if x0 <= 0.0 || x0 >= 1.0 {
        return Err(Error::BoundaryParameter { x0 });
    }
    let at_zero = evidence_table(&net.apply_parameter(pref, 0.0)?, target.0, observables)?;
    let at_one = evidence_table(&net.apply_parameter(pref, 1.0)?, target.0, observables)?;
    let grid = options.grid(x0)?;
    let structural = structural_linear(net, pref, observables);

    let records = profiles
        .par_iter()
        .enumerate()
        .map(|(idx, profile)| {
            let joint = original.row(idx);
            if joint.iter().sum::<f64>() <= 0.0 {
                return Ok(ProfileRecord::undefined(idx, net, profile.clone()));
            }
            let family = SensitivityFamily::from_joints(x0, at_zero.row(idx), at_one.row(idx), joint)?;
            analyze_profile(idx, profile, &family, target.1, &grid, options).map(|mut r| {
                r.profile = profile.label(net);
                r
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let aggregate = AggregateReport::build(&records, structural);
    Ok(SweepResult {
        parameter: net.describe_parameter(pref),
        pref: *pref,
        x0,
        structural_linear: structural,
        records,
        aggregate,
    })
}

fn analyze_profile(
    index: usize,
    profile: &EvidenceProfile,
    family: &SensitivityFamily,
    state: usize,
    grid: &[f64],
    options: &SweepOptions,
) -> Result<ProfileRecord> {
    let f = family.function(state)?;
    let mut notes = Vec::new();
    let mut record = ProfileRecord {
        index,
        profile: String::new(),
        evidence: profile.clone(),
        status: RecordStatus::Analyzed,
        evidence_probability: family.evidence_probability,
        p0: Some(f.p0),
        coefficients: Some(f.coefficients),
        kind: Some(f.kind),
        sensitivity_value: Some(f.sensitivity_value()),
        exact_deviation: None,
        bound_deviation: None,
        envelope_checked: false,
        containment_ok: true,
        max_envelope_violation: 0.0,
        max_equivalence_error: 0.0,
        deviation_sound: None,
        notes: Vec::new(),
    };

    let x0 = f.x0;
    if f.p0 > 0.0 && f.p0 < 1.0 {
        let mut anchor = f.p0;
        if let Some(fault) = options.fault {
            anchor = if anchor + fault.anchor_shift < 1.0 {
                anchor + fault.anchor_shift
            } else {
                anchor - fault.anchor_shift
            };
        }
        let hyp = hyperbolic_envelope(x0, anchor)?;
        let lin = (f.kind == FunctionKind::Linear)
            .then(|| linear_envelope(x0, anchor))
            .transpose()?;
        let reference = hyperbolic_envelope(x0, f.p0)?;
        let mut violation = 0.0f64;
        let mut equivalence = 0.0f64;
        for &x in grid {
            let (lo, hi) = reference.bounds_at(x);
            let delta = delta_bound(x0, f.p0, x)?;
            equivalence = equivalence.max((lo - delta.lower).abs()).max((hi - delta.upper).abs());
            let Ok(value) = f.evaluate(x) else { continue };
            let (lo, hi) = hyp.bounds_at(x);
            violation = violation.max(lo - value).max(value - hi);
            if let Some(lin) = &lin {
                let (lo, hi) = lin.bounds_at(x);
                violation = violation.max(lo - value).max(value - hi);
            }
        }
        record.envelope_checked = true;
        record.max_envelope_violation = violation.max(0.0);
        record.containment_ok = record.max_envelope_violation <= CONTAINMENT_TOL;
        record.max_equivalence_error = equivalence;
    } else {
        notes.push(format!("p0 = {} on the boundary; envelopes not defined", f.p0));
    }

    match family.admissible_deviation() {
        Ok(exact) => {
            record.exact_deviation = Some(exact);
            if exact.tie {
                notes.push("most likely value is tied at x0".into());
            } else {
                match bound_deviations(family, &exact, f.kind) {
                    Ok((bound, sound)) => {
                        record.bound_deviation = Some(bound);
                        record.deviation_sound = Some(sound);
                    }
                    Err(e) => notes.push(format!("bound deviation not computed: {e}")),
                }
            }
        }
        Err(e) => notes.push(format!("exact deviation not computed: {e}")),
    }
    record.notes = notes;
    Ok(record)
}

fn contains(outer: (f64, f64), inner: (f64, f64)) -> bool {
    inner.0 >= outer.0 - SOUNDNESS_TOL && inner.1 <= outer.1 + SOUNDNESS_TOL
}

/// Closed-form deviation for the record, plus whether every bound interval
/// (n-ary and pairwise, hyperbolic and, for linear functions, linear) lies
/// inside the corresponding exact interval.
fn bound_deviations(
    family: &SensitivityFamily,
    exact: &AdmissibleDeviation,
    kind: FunctionKind,
) -> Result<(DeviationBound, bool)> {
    let x0 = family.x0;
    let w = exact.winner;
    let p1 = family.posterior[w];
    let competitors: Vec<usize> = (0..family.posterior.len()).filter(|&k| k != w).collect();
    let probs: Vec<f64> = competitors.iter().map(|&k| family.posterior[k]).collect();
    let kinds: &[FunctionKind] = match kind {
        FunctionKind::Linear => &[FunctionKind::Linear, FunctionKind::Hyperbolic],
        FunctionKind::Hyperbolic => &[FunctionKind::Hyperbolic],
    };
    let mut sound = true;
    for &k in kinds {
        let nary = min_deviation_nary(x0, p1, &probs, k)?;
        sound &= contains((exact.lower, exact.upper), (nary.x_alpha, nary.x_beta));
        for (&state, &p) in competitors.iter().zip(&probs) {
            let pair = min_admissible_deviation(x0, p1, p, k)?;
            let exact_pair = family.deviation_against(&[state])?;
            sound &= contains((exact_pair.lower, exact_pair.upper), (pair.x_alpha, pair.x_beta));
        }
    }
    Ok((min_deviation_nary(x0, p1, &probs, kind)?, sound))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedParameter {
    pub parameter: String,
    pub x0: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkVerification {
    pub name: String,
    pub target: String,
    pub observables: Vec<String>,
    pub parameters: Vec<SweepResult>,
    pub skipped: Vec<SkippedParameter>,
    pub verdict: Verdict,
}

/// Why a parameter is excluded from analysis, if it is.
pub fn skip_reason(net: &DiscreteNetwork, pref: &ParameterRef) -> Option<String> {
    let row = &net.cpt(pref.node)[pref.row];
    if row.iter().all(|&p| p == 0.0 || p == 1.0) {
        return Some("deterministic row".into());
    }
    let x0 = row[pref.state];
    if !(BOUNDARY_MARGIN..=1.0 - BOUNDARY_MARGIN).contains(&x0) {
        return Some(format!("x0 within {BOUNDARY_MARGIN} of 0 or 1"));
    }
    None
}

/// Sweeps every eligible parameter of the network.
pub fn verify_network(
    net: &DiscreteNetwork,
    name: &str,
    target: (usize, usize),
    observables: &[usize],
    options: &SweepOptions,
) -> Result<NetworkVerification> {
    check_target(net, target, observables)?;
    let profiles = enumerate_profiles(net, observables, options.profile_cap)?;
    let original = evidence_table(net, target.0, observables)?;
    let mut eligible = Vec::new();
    let mut skipped = Vec::new();
    for pref in net.parameters() {
        match skip_reason(net, &pref) {
            Some(reason) => skipped.push(SkippedParameter {
                parameter: net.describe_parameter(&pref),
                x0: net.parameter_value(&pref)?,
                reason,
            }),
            None => eligible.push(pref),
        }
    }
    let parameters = eligible
        .par_iter()
        .map(|pref| sweep_with(net, target, observables, pref, options, &profiles, &original))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if parameters.iter().all(SweepResult::passed) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let var = net.variable(target.0);
    Ok(NetworkVerification {
        name: name.to_string(),
        target: format!("{}={}", var.name, var.states[target.1]),
        observables: observables.iter().map(|&v| net.variable(v).name.clone()).collect(),
        parameters,
        skipped,
        verdict,
    })
}

/// A network together with the analysis it is verified under.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub network: DiscreteNetwork,
    pub target: (usize, usize),
    pub observables: Vec<usize>,
}

pub fn verify_scenario(scenario: &Scenario, options: &SweepOptions) -> Result<NetworkVerification> {
    verify_network(
        &scenario.network,
        &scenario.name,
        scenario.target,
        &scenario.observables,
        options,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomNetworkConfig {
    pub min_nodes: usize,
    pub max_nodes: usize,
    pub min_arity: usize,
    pub max_arity: usize,
    pub edge_probability: f64,
    /// Every CPT entry is at least this far from 0 and 1.
    pub margin: f64,
    /// Chance that a non-target node is observable.
    pub observe_probability: f64,
}

impl Default for RandomNetworkConfig {
    fn default() -> Self {
        Self {
            min_nodes: 4,
            max_nodes: 6,
            min_arity: 2,
            max_arity: 3,
            edge_probability: 0.4,
            margin: 0.01,
            observe_probability: 0.5,
        }
    }
}

/// Random DAG over a random topological order; each CPT row is uniform on the
/// simplex, squeezed into `[margin, 1 − margin]`.
pub fn random_network<R: Rng>(rng: &mut R, config: &RandomNetworkConfig) -> DiscreteNetwork {
    let n = rng.gen_range(config.min_nodes..=config.max_nodes);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let variables: Vec<Variable> = (0..n)
        .map(|i| {
            let arity = rng.gen_range(config.min_arity..=config.max_arity);
            Variable {
                name: format!("V{i}"),
                states: (0..arity).map(|s| format!("s{s}")).collect(),
            }
        })
        .collect();
    let mut parents = vec![Vec::new(); n];
    for (pos, &child) in order.iter().enumerate() {
        for &parent in &order[..pos] {
            if rng.gen_bool(config.edge_probability) {
                parents[child].push(parent);
            }
        }
    }
    let cpts = (0..n)
        .map(|v| {
            let rows: usize = parents[v].iter().map(|&p| variables[p].arity()).product();
            (0..rows)
                .map(|_| simplex_row(rng, variables[v].arity(), config.margin))
                .collect()
        })
        .collect();
    DiscreteNetwork::new(variables, parents, cpts).expect("generated network is valid")
}

fn simplex_row<R: Rng>(rng: &mut R, k: usize, margin: f64) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    let free = 1.0 - margin * k as f64;
    let mut row: Vec<f64> = draws.iter().map(|d| margin + free * d / total).collect();
    // put the rounding residue on the largest entry
    let residue = 1.0 - row.iter().sum::<f64>();
    let big = (0..k).max_by(|&a, &b| row[a].total_cmp(&row[b])).expect("k >= 2");
    row[big] += residue;
    row
}

/// Random network plus a random target (state 0 of a random node) and a random
/// subset of the other nodes as observables.
pub fn random_scenario<R: Rng>(rng: &mut R, config: &RandomNetworkConfig, name: String) -> Scenario {
    let network = random_network(rng, config);
    let target = rng.gen_range(0..network.len());
    let observables = (0..network.len())
        .filter(|&v| v != target && rng.gen_bool(config.observe_probability))
        .collect();
    Scenario {
        name,
        network,
        target: (target, 0),
        observables,
    }
}

/// `count` scenarios from one ChaCha8 stream seeded with `seed`.
pub fn random_corpus(count: usize, seed: u64) -> Vec<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = RandomNetworkConfig::default();
    (0..count)
        .map(|i| random_scenario(&mut rng, &config, format!("random-{seed}-{i}")))
        .collect()
}

const CHAIN: &str = include_str!("../fixtures/chain.json");
const SPRINKLER: &str = include_str!("../fixtures/sprinkler.json");
const DIAGNOSIS: &str = include_str!("../fixtures/diagnosis.json");

/// The three hand-built networks shipped with the crate, with their analyses.
pub fn fixture_scenarios() -> Vec<Scenario> {
    let build = |name: &str, text: &str, target: (&str, &str), observables: &[&str]| {
        let network = load_network(text).expect("fixture is valid");
        let target = network.resolve_state(target.0, target.1).expect("fixture target");
        let observables = observables
            .iter()
            .map(|o| network.variable_index(o).expect("fixture observable"))
            .collect();
        Scenario {
            name: name.to_string(),
            network,
            target,
            observables,
        }
    };
    vec![
        build("chain", CHAIN, ("A", "a1"), &["B"]),
        build("sprinkler", SPRINKLER, ("Cloudy", "yes"), &["Sprinkler", "WetGrass"]),
        build("diagnosis", DIAGNOSIS, ("Disease", "none"), &["Test", "Fatigue"]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub networks: Vec<NetworkVerification>,
    pub verdict: Verdict,
}

pub fn verify_corpus(scenarios: &[Scenario], options: &SweepOptions) -> Result<CorpusReport> {
    let networks = scenarios
        .iter()
        .map(|s| verify_scenario(s, options))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if networks.iter().all(|n| n.verdict == Verdict::Pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(CorpusReport { networks, verdict })
}
