//! Exact inference by enumeration of the joint distribution.
//!
//! Full enumeration is the reference path. [`marginal_ve`] is a variable
//! elimination route kept as a cross-check; both produce the same sums to
//! rounding.

use crate::error::{Error, Result};
use crate::network::{DiscreteNetwork, EvidenceProfile};

/// Largest joint state space enumeration will walk.
pub const ENUMERATION_LIMIT: u128 = 1 << 24;

/// Probability of a target value (if any) jointly with the evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub target: Option<(usize, usize)>,
    pub evidence: EvidenceProfile,
}

impl Query {
    pub fn new(target: Option<(usize, usize)>, evidence: EvidenceProfile) -> Self {
        Self { target, evidence }
    }

    fn validate(&self, net: &DiscreteNetwork) -> Result<()> {
        if let Some((v, s)) = self.target {
            check_target(net, v, s)?;
            if self.evidence.contains(v) {
                return Err(Error::InvalidArgument(format!(
                    "target `{}` is observed",
                    net.variable(v).name
                )));
            }
        }
        Ok(())
    }
}

fn check_target(net: &DiscreteNetwork, v: usize, s: usize) -> Result<()> {
    if v >= net.len() || s >= net.arity(v) {
        return Err(Error::InvalidArgument(format!("target ({v}, {s}) out of range")));
    }
    Ok(())
}

/// `Pr(a, e)`, `Pr(e)`, and `Pr(a | e)` (absent when `Pr(e) = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marginal {
    pub joint: f64,
    pub evidence: f64,
    pub conditional: Option<f64>,
}

/// Posterior distribution of one variable. `probabilities` is `None` when the
/// evidence has probability zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Posterior {
    pub variable: usize,
    pub joint: Vec<f64>,
    pub evidence_probability: f64,
    pub probabilities: Option<Vec<f64>>,
}

impl Posterior {
    pub fn is_defined(&self) -> bool {
        self.probabilities.is_some()
    }
}

fn joint_size(net: &DiscreteNetwork) -> u128 {
    (0..net.len())
        .map(|v| net.arity(v) as u128)
        .try_fold(1u128, |acc, a| acc.checked_mul(a))
        .unwrap_or(u128::MAX)
}

fn check_size(net: &DiscreteNetwork) -> Result<()> {
    let size = joint_size(net);
    if size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge {
            size,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn entry(net: &DiscreteNetwork, node: usize, assignment: &[usize]) -> f64 {
    let mut row = 0;
    for &p in net.parents(node) {
        row = row * net.arity(p) + assignment[p];
    }
    net.cpt(node)[row][assignment[node]]
}

/// Chain-rule product of the CPT entries selected by a full assignment.
pub fn joint_probability(net: &DiscreteNetwork, assignment: &[usize]) -> Result<f64> {
    if assignment.len() != net.len() {
        return Err(Error::InvalidArgument(format!(
            "assignment covers {} of {} variables",
            assignment.len(),
            net.len()
        )));
    }
    for (v, &s) in assignment.iter().enumerate() {
        if s >= net.arity(v) {
            return Err(Error::InvalidArgument(format!(
                "state {s} out of range for `{}`",
                net.variable(v).name
            )));
        }
    }
    Ok((0..net.len()).map(|v| entry(net, v, assignment)).product())
}

/// Calls `visit` with every full assignment consistent with `evidence` and a
/// nonzero joint probability.
pub fn for_each_assignment<F>(net: &DiscreteNetwork, evidence: &EvidenceProfile, mut visit: F) -> Result<()>
where
    F: FnMut(&[usize], f64),
{
    check_size(net)?;
    let mut assignment = vec![0usize; net.len()];
    walk(net, evidence, 0, 1.0, &mut assignment, &mut visit);
    Ok(())
}

fn walk<F>(
    net: &DiscreteNetwork,
    evidence: &EvidenceProfile,
    depth: usize,
    prob: f64,
    assignment: &mut [usize],
    visit: &mut F,
) where
    F: FnMut(&[usize], f64),
{
    let order = net.topological_order();
    if depth == order.len() {
        visit(assignment, prob);
        return;
    }
    let v = order[depth];
    let states = match evidence.get(v) {
        Some(s) => s..s + 1,
        None => 0..net.arity(v),
    };
    for s in states {
        assignment[v] = s;
        let p = prob * entry(net, v, assignment);
        if p != 0.0 {
            walk(net, evidence, depth + 1, p, assignment, visit);
        }
    }
}

pub fn marginal(net: &DiscreteNetwork, query: &Query) -> Result<Marginal> {
    query.validate(net)?;
    let mut evidence = 0.0;
    let mut joint = 0.0;
    for_each_assignment(net, &query.evidence, |a, p| {
        evidence += p;
        match query.target {
            Some((v, s)) if a[v] != s => {}
            _ => joint += p,
        }
    })?;
    Ok(Marginal {
        joint,
        evidence,
        conditional: (evidence > 0.0).then(|| joint / evidence),
    })
}

pub fn posterior(net: &DiscreteNetwork, variable: usize, evidence: &EvidenceProfile) -> Result<Posterior> {
    check_target(net, variable, 0)?;
    if evidence.contains(variable) {
        return Err(Error::InvalidArgument(format!(
            "`{}` is observed",
            net.variable(variable).name
        )));
    }
    let mut joint = vec![0.0; net.arity(variable)];
    for_each_assignment(net, evidence, |a, p| joint[a[variable]] += p)?;
    Ok(finish_posterior(variable, joint))
}

fn finish_posterior(variable: usize, joint: Vec<f64>) -> Posterior {
    let evidence_probability: f64 = joint.iter().sum();
    let probabilities = (evidence_probability > 0.0).then(|| joint.iter().map(|j| j / evidence_probability).collect());
    Posterior {
        variable,
        joint,
        evidence_probability,
        probabilities,
    }
}

/// `Pr(target = a_k, e)` for every state `a_k` and every profile `e` over
/// `observables`, in one pass over the joint.
///
/// Profiles are indexed as in [`crate::network::enumerate_profiles`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceTable {
    pub target_arity: usize,
    pub values: Vec<f64>,
}

impl EvidenceTable {
    pub fn profile_count(&self) -> usize {
        self.values.len() / self.target_arity
    }

    /// Joint probabilities `Pr(a_k, e)` for one profile.
    pub fn row(&self, profile: usize) -> &[f64] {
        &self.values[profile * self.target_arity..(profile + 1) * self.target_arity]
    }
}

pub fn evidence_table(net: &DiscreteNetwork, target: usize, observables: &[usize]) -> Result<EvidenceTable> {
    check_target(net, target, 0)?;
    if observables.contains(&target) {
        return Err(Error::InvalidArgument(format!(
            "target `{}` is among the observables",
            net.variable(target).name
        )));
    }
    let profiles: usize = observables.iter().map(|&v| net.arity(v)).product();
    let arity = net.arity(target);
    let mut values = vec![0.0; profiles * arity];
    for_each_assignment(net, &EvidenceProfile::new(), |a, p| {
        let mut idx = 0;
        for &v in observables {
            idx = idx * net.arity(v) + a[v];
        }
        values[idx * arity + a[target]] += p;
    })?;
    Ok(EvidenceTable {
        target_arity: arity,
        values,
    })
}

#[derive(Debug, Clone)]
struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    fn scalar(value: f64) -> Self {
        Self {
            vars: Vec::new(),
            cards: Vec::new(),
            values: vec![value],
        }
    }

    fn from_cpt(net: &DiscreteNetwork, node: usize, evidence: &EvidenceProfile) -> Self {
        let mut scope: Vec<usize> = net.parents(node).to_vec();
        scope.push(node);
        scope.sort_unstable();
        let vars: Vec<usize> = scope.iter().copied().filter(|&v| !evidence.contains(v)).collect();
        let cards: Vec<usize> = vars.iter().map(|&v| net.arity(v)).collect();
        let size = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut full = vec![0usize; net.len()];
        for (v, s) in evidence.iter() {
            full[v] = s;
        }
        let mut states = vec![0usize; vars.len()];
        for _ in 0..size {
            for (&v, &s) in vars.iter().zip(&states) {
                full[v] = s;
            }
            values.push(entry(net, node, &full));
            increment(&mut states, &cards);
        }
        Self { vars, cards, values }
    }

    fn product(&self, other: &Factor) -> Factor {
        let mut vars = self.vars.clone();
        for &v in &other.vars {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars.sort_unstable();
        let cards: Vec<usize> = vars
            .iter()
            .map(|v| {
                let from = |f: &Factor| f.vars.iter().position(|u| u == v).map(|i| f.cards[i]);
                from(self).or_else(|| from(other)).expect("scope")
            })
            .collect();
        let size: usize = cards.iter().product();
        let mut values = Vec::with_capacity(size);
        let mut states = vec![0usize; vars.len()];
        for _ in 0..size {
            values.push(self.at(&vars, &states) * other.at(&vars, &states));
            increment(&mut states, &cards);
        }
        Factor { vars, cards, values }
    }

    fn at(&self, vars: &[usize], states: &[usize]) -> f64 {
        let mut idx = 0;
        for (&v, &c) in self.vars.iter().zip(&self.cards) {
            let pos = vars.iter().position(|&u| u == v).expect("scope");
            idx = idx * c + states[pos];
        }
        self.values[idx]
    }

    fn sum_out(&self, var: usize) -> Factor {
        let pos = self.vars.iter().position(|&v| v == var).expect("scope");
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let size: usize = cards.iter().product();
        let mut values = vec![0.0; size];
        let mut states = vec![0usize; self.vars.len()];
        for &value in &self.values {
            let mut idx = 0;
            for (i, (&s, &c)) in states.iter().zip(&self.cards).enumerate() {
                if i != pos {
                    idx = idx * c + s;
                }
            }
            values[idx] += value;
            increment(&mut states, &self.cards);
        }
        Factor { vars, cards, values }
    }
}

fn increment(states: &mut [usize], cards: &[usize]) {
    for (s, &c) in states.iter_mut().zip(cards).rev() {
        *s += 1;
        if *s < c {
            return;
        }
        *s = 0;
    }
}

/// Variable elimination with a greedy smallest-factor ordering.
pub fn marginal_ve(net: &DiscreteNetwork, query: &Query) -> Result<Marginal> {
    query.validate(net)?;
    let keep = query.target.map(|(v, _)| v);
    let mut factors: Vec<Factor> = (0..net.len())
        .map(|v| Factor::from_cpt(net, v, &query.evidence))
        .collect();
    let mut pending: Vec<usize> = (0..net.len())
        .filter(|&v| !query.evidence.contains(v) && Some(v) != keep)
        .collect();
    while !pending.is_empty() {
        let cost = |var: usize| -> usize {
            let mut scope: Vec<usize> = Vec::new();
            for f in factors.iter().filter(|f| f.vars.contains(&var)) {
                for &v in &f.vars {
                    if !scope.contains(&v) {
                        scope.push(v);
                    }
                }
            }
            scope.iter().map(|&v| net.arity(v)).product()
        };
        let (slot, &var) = pending
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| (cost(v), v))
            .expect("nonempty");
        pending.remove(slot);
        let (touching, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.vars.contains(&var));
        factors = rest;
        let merged = touching.iter().fold(Factor::scalar(1.0), |acc, f| acc.product(f));
        factors.push(merged.sum_out(var));
    }
    let result = factors.iter().fold(Factor::scalar(1.0), |acc, f| acc.product(f));
    let evidence: f64 = result.values.iter().sum();
    let joint = match query.target {
        Some((_, s)) => result.values[s],
        None => evidence,
    };
    Ok(Marginal {
        joint,
        evidence,
        conditional: (evidence > 0.0).then(|| joint / evidence),
    })
}
