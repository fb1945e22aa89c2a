//! Discrete network model, document format, and proportional co-variation.
//!
//! A network document is JSON:
//!
//! ```json
//! {
//!   "variables": [{"name": "A", "states": ["a1", "a2"]},
//!                 {"name": "B", "states": ["b1", "b2"]}],
//!   "parents": {"B": ["A"]},
//!   "cpt": {"A": [[0.4, 0.6]],
//!           "B": [[0.3, 0.7], [0.9, 0.1]]}
//! }
//! ```
//!
//! CPT rows are ordered by parent configuration in row-major order: the first
//! listed parent varies slowest, the last listed parent fastest.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ValidationError};

/// Row-sum tolerance applied when loading a document.
pub const LOAD_ROW_TOLERANCE: f64 = 1e-9;

/// Default limit on the number of materialized evidence profiles.
pub const DEFAULT_PROFILE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn arity(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, state: &str) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }
}

/// Serialized form of a network, before validation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDocument {
    pub variables: Vec<Variable>,
    #[serde(default)]
    pub parents: BTreeMap<String, Vec<String>>,
    pub cpt: BTreeMap<String, Vec<Vec<f64>>>,
}

/// A validated DAG of discrete variables with one CPT per node.
///
/// Immutable once built; [`DiscreteNetwork::apply_parameter`] returns a modified copy.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteNetwork {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    cpts: Vec<Vec<Vec<f64>>>,
    topo: Vec<usize>,
    index: HashMap<String, usize>,
}

/// One CPT entry `p(b_i | π)`: node, state index `i`, and row index of `π`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParameterRef {
    pub node: usize,
    pub state: usize,
    pub row: usize,
}

/// Observed states keyed by variable index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvidenceProfile {
    observations: BTreeMap<usize, usize>,
}

impl EvidenceProfile {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an observation, rejecting a second observation of the same variable.
    pub fn observe(&mut self, net: &DiscreteNetwork, variable: usize, state: usize) -> Result<()> {
        let var = net
            .variables
            .get(variable)
            .ok_or_else(|| Error::InvalidArgument(format!("variable index {variable} out of range")))?;
        if state >= var.arity() {
            return Err(Error::InvalidArgument(format!(
                "state index {state} out of range for `{}`",
                var.name
            )));
        }
        if self.observations.insert(variable, state).is_some() {
            return Err(Error::InvalidArgument(format!("`{}` observed twice", var.name)));
        }
        Ok(())
    }

    /// Builds a profile from `(variable, state)` name pairs.
    pub fn from_names<S: AsRef<str>>(net: &DiscreteNetwork, pairs: &[(S, S)]) -> Result<Self> {
        let mut profile = Self::new();
        for (var, state) in pairs {
            let (v, s) = net.resolve_state(var.as_ref(), state.as_ref())?;
            profile.observe(net, v, s)?;
        }
        Ok(profile)
    }

    /// Parses `VAR=STATE` items.
    pub fn parse<S: AsRef<str>>(net: &DiscreteNetwork, items: &[S]) -> Result<Self> {
        let pairs = items
            .iter()
            .map(|item| split_assignment(item.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_names(net, &pairs)
    }

    pub fn get(&self, variable: usize) -> Option<usize> {
        self.observations.get(&variable).copied()
    }

    pub fn contains(&self, variable: usize) -> bool {
        self.observations.contains_key(&variable)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.observations.iter().map(|(&v, &s)| (v, s))
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.observations.keys().copied()
    }

    /// `VAR=STATE,...` in variable-index order; empty string for no evidence.
    pub fn label(&self, net: &DiscreteNetwork) -> String {
        self.iter()
            .map(|(v, s)| {
                let var = &net.variables[v];
                format!("{}={}", var.name, var.states[s])
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

fn split_assignment(item: &str) -> Result<(&str, &str)> {
    let (var, state) = item
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected VAR=STATE, got `{item}`")))?;
    let (var, state) = (var.trim(), state.trim());
    if var.is_empty() || state.is_empty() {
        return Err(Error::Parse(format!("expected VAR=STATE, got `{item}`")));
    }
    Ok((var, state))
}

/// Parses a network document and validates it.
pub fn load_network(text: &str) -> Result<DiscreteNetwork> {
    let doc: NetworkDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    DiscreteNetwork::from_document(doc)
}

/// Parses a document and returns every validation finding instead of stopping at
/// the first. An empty list means the document is valid.
pub fn validate_document(text: &str) -> Result<Vec<ValidationError>> {
    let doc: NetworkDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(check_document(&doc).1)
}

struct Structure {
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
}

fn check_document(doc: &NetworkDocument) -> (Option<Structure>, Vec<ValidationError>) {
    let mut findings = Vec::new();
    let mut index = HashMap::new();
    for (i, var) in doc.variables.iter().enumerate() {
        if index.insert(var.name.clone(), i).is_some() {
            findings.push(ValidationError::DuplicateVariable(var.name.clone()));
        }
        if var.states.len() < 2 {
            findings.push(ValidationError::TooFewStates(var.name.clone()));
        }
        let mut seen = HashSet::new();
        for s in &var.states {
            if !seen.insert(s) {
                findings.push(ValidationError::DuplicateState {
                    variable: var.name.clone(),
                    state: s.clone(),
                });
            }
        }
    }
    for name in doc.parents.keys().chain(doc.cpt.keys()) {
        if !index.contains_key(name) {
            findings.push(ValidationError::UndeclaredNode(name.clone()));
        }
    }

    let mut parents = vec![Vec::new(); doc.variables.len()];
    for (i, var) in doc.variables.iter().enumerate() {
        let Some(list) = doc.parents.get(&var.name) else {
            continue;
        };
        for p in list {
            match index.get(p) {
                Some(&pi) if parents[i].contains(&pi) => findings.push(ValidationError::DuplicateParent {
                    node: var.name.clone(),
                    parent: p.clone(),
                }),
                Some(&pi) => parents[i].push(pi),
                None => findings.push(ValidationError::UnknownParent {
                    node: var.name.clone(),
                    parent: p.clone(),
                }),
            }
        }
    }

    if let Err(node) = topological_order(&parents) {
        findings.push(ValidationError::Cycle(doc.variables[node].name.clone()));
    }

    for (i, var) in doc.variables.iter().enumerate() {
        let Some(rows) = doc.cpt.get(&var.name) else {
            findings.push(ValidationError::MissingCpt(var.name.clone()));
            continue;
        };
        let expected: usize = parents[i].iter().map(|&p| doc.variables[p].states.len()).product();
        if rows.len() != expected {
            findings.push(ValidationError::RowCount {
                node: var.name.clone(),
                expected,
                found: rows.len(),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != var.states.len() {
                findings.push(ValidationError::RowLength {
                    node: var.name.clone(),
                    row: r,
                    expected: var.states.len(),
                    found: row.len(),
                });
                continue;
            }
            let mut range_ok = true;
            for (s, &value) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) {
                    range_ok = false;
                    findings.push(ValidationError::EntryRange {
                        node: var.name.clone(),
                        row: r,
                        state: s,
                        value,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if range_ok && (sum - 1.0).abs() > LOAD_ROW_TOLERANCE {
                findings.push(ValidationError::RowSum {
                    node: var.name.clone(),
                    row: r,
                    sum,
                });
            }
        }
    }

    let structure = findings.is_empty().then_some(Structure { index, parents });
    (structure, findings)
}

/// Kahn's algorithm. On a cycle, returns a node lying on it.
fn topological_order(parents: &[Vec<usize>]) -> std::result::Result<Vec<usize>, usize> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &c in children[v].iter().rev() {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    // every leftover node has a leftover parent; walking parents must revisit a node
    let mut placed = vec![false; n];
    for &v in &order {
        placed[v] = true;
    }
    let mut v = (0..n).find(|&v| !placed[v]).expect("leftover node");
    let mut visited = vec![false; n];
    while !visited[v] {
        visited[v] = true;
        v = *parents[v].iter().find(|&&p| !placed[p]).expect("leftover parent");
    }
    Err(v)
}

impl DiscreteNetwork {
    pub fn from_document(doc: NetworkDocument) -> Result<Self> {
        let (structure, findings) = check_document(&doc);
        if let Some(first) = findings.into_iter().next() {
            return Err(Error::Validation(first));
        }
        let Structure { index, parents } = structure.expect("valid structure");
        let cpts = doc.variables.iter().map(|v| doc.cpt[&v.name].clone()).collect();
        Ok(Self::assemble(doc.variables, parents, cpts, index))
    }

    /// Builds a network from parts, running the same validation as the loader.
    pub fn new(variables: Vec<Variable>, parents: Vec<Vec<usize>>, cpts: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if parents.len() != variables.len() || cpts.len() != variables.len() {
            return Err(Error::InvalidArgument(
                "parents and cpts must have one entry per variable".into(),
            ));
        }
        let doc = NetworkDocument {
            parents: variables
                .iter()
                .zip(&parents)
                .filter(|(_, ps)| !ps.is_empty())
                .map(|(v, ps)| {
                    let names = ps
                        .iter()
                        .map(|&p| variables.get(p).map_or_else(|| format!("#{p}"), |pv| pv.name.clone()))
                        .collect();
                    (v.name.clone(), names)
                })
                .collect(),
            cpt: variables.iter().map(|v| v.name.clone()).zip(cpts).collect(),
            variables,
        };
        Self::from_document(doc)
    }

    fn assemble(
        variables: Vec<Variable>,
        parents: Vec<Vec<usize>>,
        cpts: Vec<Vec<Vec<f64>>>,
        index: HashMap<String, usize>,
    ) -> Self {
        let topo = topological_order(&parents).expect("acyclic");
        let mut children = vec![Vec::new(); variables.len()];
        for (c, ps) in parents.iter().enumerate() {
            for &p in ps {
                children[p].push(c);
            }
        }
        Self {
            variables,
            parents,
            children,
            cpts,
            topo,
            index,
        }
    }

    pub fn to_document(&self) -> NetworkDocument {
        NetworkDocument {
            variables: self.variables.clone(),
            parents: self
                .variables
                .iter()
                .enumerate()
                .filter(|(i, _)| !self.parents[*i].is_empty())
                .map(|(i, v)| {
                    let names = self.parents[i]
                        .iter()
                        .map(|&p| self.variables[p].name.clone())
                        .collect();
                    (v.name.clone(), names)
                })
                .collect(),
            cpt: self
                .variables
                .iter()
                .zip(&self.cpts)
                .map(|(v, rows)| (v.name.clone(), rows.clone()))
                .collect(),
        }
    }

    /// Serializes to a document with keys in declaration order.
    pub fn to_json(&self) -> String {
        use serde_json::{Map, Value};
        let mut parents = Map::new();
        let mut cpt = Map::new();
        for (i, v) in self.variables.iter().enumerate() {
            if !self.parents[i].is_empty() {
                let names = self.parents[i]
                    .iter()
                    .map(|&p| Value::from(self.variables[p].name.clone()))
                    .collect();
                parents.insert(v.name.clone(), Value::Array(names));
            }
            cpt.insert(v.name.clone(), serde_json::to_value(&self.cpts[i]).expect("finite cpt"));
        }
        let mut root = Map::new();
        root.insert(
            "variables".into(),
            serde_json::to_value(&self.variables).expect("variables"),
        );
        root.insert("parents".into(), Value::Object(parents));
        root.insert("cpt".into(), Value::Object(cpt));
        serde_json::to_string_pretty(&Value::Object(root)).expect("serializable")
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &Variable {
        &self.variables[index]
    }

    pub fn arity(&self, index: usize) -> usize {
        self.variables[index].arity()
    }

    pub fn parents(&self, index: usize) -> &[usize] {
        &self.parents[index]
    }

    pub fn children(&self, index: usize) -> &[usize] {
        &self.children[index]
    }

    pub fn cpt(&self, index: usize) -> &[Vec<f64>] {
        &self.cpts[index]
    }

    /// Nodes ordered so that every parent precedes its children.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn variable_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn resolve_state(&self, variable: &str, state: &str) -> Result<(usize, usize)> {
        let v = self.variable_index(variable)?;
        let s = self.variables[v]
            .state_index(state)
            .ok_or_else(|| Error::UnknownState {
                variable: variable.to_string(),
                state: state.to_string(),
            })?;
        Ok((v, s))
    }

    /// Parses `VAR=STATE`.
    pub fn parse_target(&self, text: &str) -> Result<(usize, usize)> {
        let (var, state) = split_assignment(text)?;
        self.resolve_state(var, state)
    }

    /// Row index of a parent configuration given as one state per parent,
    /// first parent slowest.
    pub fn row_index(&self, node: usize, parent_states: &[usize]) -> Result<usize> {
        let parents = &self.parents[node];
        if parent_states.len() != parents.len() {
            return Err(Error::ParameterOutOfRange(format!(
                "`{}` has {} parents, got {} states",
                self.variables[node].name,
                parents.len(),
                parent_states.len()
            )));
        }
        let mut row = 0;
        for (&p, &s) in parents.iter().zip(parent_states) {
            if s >= self.arity(p) {
                return Err(Error::ParameterOutOfRange(format!(
                    "state {s} out of range for parent `{}`",
                    self.variables[p].name
                )));
            }
            row = row * self.arity(p) + s;
        }
        Ok(row)
    }

    /// Inverse of [`Self::row_index`].
    pub fn parent_states(&self, node: usize, row: usize) -> Vec<usize> {
        let parents = &self.parents[node];
        let mut states = vec![0; parents.len()];
        let mut rest = row;
        for (slot, &p) in states.iter_mut().zip(parents).rev() {
            *slot = rest % self.arity(p);
            rest /= self.arity(p);
        }
        states
    }

    pub fn parameter(&self, node: usize, state: usize, row: usize) -> Result<ParameterRef> {
        let pref = ParameterRef { node, state, row };
        self.check_parameter(&pref)?;
        Ok(pref)
    }

    fn check_parameter(&self, pref: &ParameterRef) -> Result<()> {
        let Some(var) = self.variables.get(pref.node) else {
            return Err(Error::ParameterOutOfRange(format!("node index {}", pref.node)));
        };
        if pref.state >= var.arity() {
            return Err(Error::ParameterOutOfRange(format!(
                "state index {} for `{}` with {} states",
                pref.state,
                var.name,
                var.arity()
            )));
        }
        if pref.row >= self.cpts[pref.node].len() {
            return Err(Error::ParameterOutOfRange(format!(
                "row {} for `{}` with {} rows",
                pref.row,
                var.name,
                self.cpts[pref.node].len()
            )));
        }
        Ok(())
    }

    /// Parses `NODE:STATE|P1=s1,P2=s2`. Root nodes use `NODE:STATE` (the `|` part
    /// may be omitted or empty). Every parent must be assigned exactly once.
    pub fn parse_parameter(&self, text: &str) -> Result<ParameterRef> {
        let (head, given) = match text.split_once('|') {
            Some((h, g)) => (h, g.trim()),
            None => (text, ""),
        };
        let (node, state) = head
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected NODE:STATE|PARENT=STATE,..., got `{text}`")))?;
        let (node, state) = self.resolve_state(node.trim(), state.trim())?;
        let mut assigned: Vec<Option<usize>> = vec![None; self.parents[node].len()];
        if !given.is_empty() {
            for item in given.split(',') {
                let (pv, ps) = split_assignment(item)?;
                let (p, s) = self.resolve_state(pv, ps)?;
                let slot = self.parents[node].iter().position(|&q| q == p).ok_or_else(|| {
                    Error::ParameterOutOfRange(format!("`{pv}` is not a parent of `{}`", self.variables[node].name))
                })?;
                if assigned[slot].replace(s).is_some() {
                    return Err(Error::Parse(format!("parent `{pv}` assigned twice")));
                }
            }
        }
        let states = assigned
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                s.ok_or_else(|| {
                    Error::ParameterOutOfRange(format!(
                        "missing state for parent `{}`",
                        self.variables[self.parents[node][i]].name
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let row = self.row_index(node, &states)?;
        Ok(ParameterRef { node, state, row })
    }

    /// Renders a parameter in the `NODE:STATE|P1=s1,...` syntax.
    pub fn describe_parameter(&self, pref: &ParameterRef) -> String {
        let var = &self.variables[pref.node];
        let head = format!("{}:{}", var.name, var.states[pref.state]);
        let parents = &self.parents[pref.node];
        if parents.is_empty() {
            return head;
        }
        let given = parents
            .iter()
            .zip(self.parent_states(pref.node, pref.row))
            .map(|(&p, s)| format!("{}={}", self.variables[p].name, self.variables[p].states[s]))
            .collect::<Vec<_>>()
            .join(",");
        format!("{head}|{given}")
    }

    /// Every `(node, state, row)` triple, in node, row, state order.
    pub fn parameters(&self) -> Vec<ParameterRef> {
        let mut out = Vec::new();
        for node in 0..self.len() {
            for row in 0..self.cpts[node].len() {
                for state in 0..self.arity(node) {
                    out.push(ParameterRef { node, state, row });
                }
            }
        }
        out
    }

    pub fn parameter_value(&self, pref: &ParameterRef) -> Result<f64> {
        self.check_parameter(pref)?;
        Ok(self.cpts[pref.node][pref.row][pref.state])
    }

    /// Sets `p(b_i | π) = x` and rescales the sibling entries of the row by
    /// `(1 - x) / (1 - x0)`. All other rows are copied unchanged.
    pub fn apply_parameter(&self, pref: &ParameterRef, x: f64) -> Result<DiscreteNetwork> {
        let mut out = self.clone();
        out.set_parameter(pref, x)?;
        Ok(out)
    }

    pub(crate) fn set_parameter(&mut self, pref: &ParameterRef, x: f64) -> Result<()> {
        self.check_parameter(pref)?;
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("parameter value {x} outside [0, 1]")));
        }
        let row = &mut self.cpts[pref.node][pref.row];
        let x0 = row[pref.state];
        if x0 >= 1.0 {
            return Err(Error::DegenerateRow {
                node: self.variables[pref.node].name.clone(),
                row: pref.row,
                state: pref.state,
            });
        }
        let scale = (1.0 - x) / (1.0 - x0);
        for (j, entry) in row.iter_mut().enumerate() {
            if j == pref.state {
                *entry = x;
            } else {
                *entry *= scale;
            }
        }
        Ok(())
    }

    /// Descendants of `node`, including `node` itself.
    pub fn descendants(&self, node: usize) -> Vec<bool> {
        let mut mark = vec![false; self.len()];
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut mark[v], true) {
                continue;
            }
            stack.extend(self.children[v].iter().copied());
        }
        mark
    }
}

impl fmt::Display for DiscreteNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.topo {
            let var = &self.variables[v];
            let parents: Vec<&str> = self.parents[v]
                .iter()
                .map(|&p| self.variables[p].name.as_str())
                .collect();
            writeln!(f, "{} ({} states) <- [{}]", var.name, var.arity(), parents.join(", "))?;
        }
        Ok(())
    }
}

/// Number of joint states of the given variables, saturating at `u128::MAX`.
pub fn profile_count(net: &DiscreteNetwork, observables: &[usize]) -> u128 {
    observables
        .iter()
        .map(|&v| net.arity(v) as u128)
        .try_fold(1u128, |acc, a| acc.checked_mul(a))
        .unwrap_or(u128::MAX)
}

/// Cartesian product of the observables' states, first variable slowest.
///
/// Refuses with [`Error::ProfileCap`] (carrying the count) when the product
/// exceeds `cap`.
pub fn enumerate_profiles(net: &DiscreteNetwork, observables: &[usize], cap: u128) -> Result<Vec<EvidenceProfile>> {
    let mut seen = HashSet::new();
    for &v in observables {
        if v >= net.len() {
            return Err(Error::InvalidArgument(format!("variable index {v} out of range")));
        }
        if !seen.insert(v) {
            return Err(Error::InvalidArgument(format!(
                "observable `{}` listed twice",
                net.variable(v).name
            )));
        }
    }
    let count = profile_count(net, observables);
    if count > cap {
        return Err(Error::ProfileCap { count, cap });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut states = vec![0usize; observables.len()];
    for _ in 0..count {
        out.push(EvidenceProfile {
            observations: observables.iter().copied().zip(states.iter().copied()).collect(),
        });
        for (slot, &v) in states.iter_mut().zip(observables).rev() {
            *slot += 1;
            if *slot < net.arity(v) {
                break;
            }
            *slot = 0;
        }
    }
    Ok(out)
}

/// Resolves a list of variable names to indices.
pub fn resolve_variables<S: AsRef<str>>(net: &DiscreteNetwork, names: &[S]) -> Result<Vec<usize>> {
    names.iter().map(|n| net.variable_index(n.as_ref().trim())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{
        "variables": [{"name": "A", "states": ["a1", "a2"]},
                      {"name": "B", "states": ["b1", "b2"]}],
        "parents": {"B": ["A"]},
        "cpt": {"A": [[0.4, 0.6]], "B": [[0.3, 0.7], [0.9, 0.1]]}
    }"#;

    fn chain() -> DiscreteNetwork {
        load_network(CHAIN).unwrap()
    }

    fn ternary_row() -> DiscreteNetwork {
        DiscreteNetwork::new(
            vec![Variable {
                name: "C".into(),
                states: vec!["c1".into(), "c2".into(), "c3".into()],
            }],
            vec![vec![]],
            vec![vec![vec![0.2, 0.3, 0.5]]],
        )
        .unwrap()
    }

    #[test]
    fn loads_two_node_chain() {
        let net = chain();
        assert_eq!(net.len(), 2);
        assert_eq!(net.parents(1), &[0]);
        assert_eq!(net.topological_order(), &[0, 1]);
    }

    #[test]
    fn row_sum_error_names_row() {
        let text = CHAIN.replace("[0.9, 0.1]", "[0.9, 0.08]");
        match load_network(&text) {
            Err(Error::Validation(ValidationError::RowSum { node, row, .. })) => {
                assert_eq!(node, "B");
                assert_eq!(row, 1);
            }
            other => panic!("expected row-sum error, got {other:?}"),
        }
    }

    #[test]
    fn cycle_is_rejected() {
        let text = r#"{
            "variables": [{"name": "A", "states": ["a1", "a2"]},
                          {"name": "B", "states": ["b1", "b2"]}],
            "parents": {"A": ["B"], "B": ["A"]},
            "cpt": {"A": [[0.5, 0.5], [0.5, 0.5]], "B": [[0.5, 0.5], [0.5, 0.5]]}
        }"#;
        assert!(matches!(
            load_network(text),
            Err(Error::Validation(ValidationError::Cycle(_)))
        ));
    }

    #[test]
    fn malformed_document_is_a_parse_error() {
        assert!(matches!(load_network("{\"variables\": ["), Err(Error::Parse(_))));
        assert!(matches!(
            load_network("{\"variables\": [], \"cpt\": {}, \"extra\": 1}"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn shape_findings_are_all_listed() {
        let text = r#"{
            "variables": [{"name": "A", "states": ["a1", "a2"]},
                          {"name": "B", "states": ["b1", "b2"]}],
            "parents": {"B": ["A"]},
            "cpt": {"A": [[0.4, 0.6, 0.0]], "B": [[0.3, 0.7]]}
        }"#;
        let findings = validate_document(text).unwrap();
        assert_eq!(findings.len(), 2, "{findings:?}");
        assert!(matches!(findings[0], ValidationError::RowLength { row: 0, .. }));
        assert!(matches!(
            findings[1],
            ValidationError::RowCount {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn accepts_seventeen_significant_digits() {
        let text = CHAIN.replace("[0.4, 0.6]", "[0.40000000000000002, 0.59999999999999998]");
        let net = load_network(&text).unwrap();
        assert_eq!(net.cpt(0)[0][0], 0.4);
    }

    #[test]
    fn parameter_lookup() {
        let net = chain();
        let pref = net.parse_parameter("B:b1|A=a1").unwrap();
        assert_eq!(net.parameter_value(&pref).unwrap(), 0.3);
        let root = net.parse_parameter("A:a1").unwrap();
        assert_eq!(net.parameter_value(&root).unwrap(), 0.4);
        let bad = ParameterRef {
            node: 1,
            state: 2,
            row: 0,
        };
        assert!(matches!(net.parameter_value(&bad), Err(Error::ParameterOutOfRange(_))));
        assert!(net.parse_parameter("B:b1").is_err());
        assert_eq!(net.describe_parameter(&pref), "B:b1|A=a1");
    }

    #[test]
    fn row_ordering_first_parent_slowest() {
        let text = r#"{
            "variables": [{"name": "P", "states": ["p0", "p1"]},
                          {"name": "Q", "states": ["q0", "q1", "q2"]},
                          {"name": "C", "states": ["c0", "c1"]}],
            "parents": {"C": ["P", "Q"]},
            "cpt": {"P": [[0.5, 0.5]], "Q": [[0.2, 0.3, 0.5]],
                    "C": [[0.1, 0.9], [0.2, 0.8], [0.3, 0.7], [0.4, 0.6], [0.5, 0.5], [0.6, 0.4]]}
        }"#;
        let net = load_network(text).unwrap();
        assert_eq!(net.row_index(2, &[1, 0]).unwrap(), 3);
        assert_eq!(net.row_index(2, &[0, 2]).unwrap(), 2);
        for row in 0..6 {
            assert_eq!(net.row_index(2, &net.parent_states(2, row)).unwrap(), row);
        }
        let pref = net.parse_parameter("C:c0|Q=q1,P=p1").unwrap();
        assert_eq!(net.parameter_value(&pref).unwrap(), 0.5);
    }

    #[test]
    fn covariation_binary_complement() {
        let net = chain();
        let pref = net.parse_parameter("B:b1|A=a1").unwrap();
        let moved = net.apply_parameter(&pref, 0.6).unwrap();
        assert_eq!(moved.cpt(1)[0][0], 0.6);
        assert!((moved.cpt(1)[0][1] - 0.4).abs() < 1e-15);
        assert_eq!(moved.cpt(1)[1], net.cpt(1)[1]);
        assert_eq!(moved.cpt(0), net.cpt(0));
    }

    #[test]
    fn covariation_ternary_scales_siblings() {
        let net = ternary_row();
        let pref = net.parameter(0, 0, 0).unwrap();
        let row = &net.apply_parameter(&pref, 0.6).unwrap().cpt(0)[0].clone();
        let expected = [0.6, 0.15, 0.25];
        for (a, b) in row.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15, "{row:?}");
        }
        let same = net.apply_parameter(&pref, 0.2).unwrap();
        assert_eq!(same.cpt(0)[0], vec![0.2, 0.3, 0.5]);
    }

    #[test]
    fn covariation_rejects_degenerate_row() {
        let net = DiscreteNetwork::new(
            vec![Variable {
                name: "D".into(),
                states: vec!["d1".into(), "d2".into()],
            }],
            vec![vec![]],
            vec![vec![vec![1.0, 0.0]]],
        )
        .unwrap();
        let pref = net.parameter(0, 0, 0).unwrap();
        assert!(matches!(
            net.apply_parameter(&pref, 0.5),
            Err(Error::DegenerateRow { .. })
        ));
        // the sibling entry can still move
        let other = net.parameter(0, 1, 0).unwrap();
        assert_eq!(net.apply_parameter(&other, 0.25).unwrap().cpt(0)[0], vec![0.75, 0.25]);
    }

    #[test]
    fn profile_enumeration_order() {
        let net = chain();
        let profiles = enumerate_profiles(&net, &[0, 1], DEFAULT_PROFILE_CAP).unwrap();
        let labels: Vec<String> = profiles.iter().map(|p| p.label(&net)).collect();
        assert_eq!(labels, ["A=a1,B=b1", "A=a1,B=b2", "A=a2,B=b1", "A=a2,B=b2"]);
        let empty = enumerate_profiles(&net, &[], DEFAULT_PROFILE_CAP).unwrap();
        assert_eq!(empty.len(), 1);
        assert!(empty[0].is_empty());
    }

    #[test]
    fn profile_cap_reports_count() {
        let variables: Vec<Variable> = (0..25)
            .map(|i| Variable {
                name: format!("O{i}"),
                states: vec!["x".into(), "y".into(), "z".into()],
            })
            .collect();
        let cpts = vec![vec![vec![0.2, 0.3, 0.5]]; 25];
        let net = DiscreteNetwork::new(variables, vec![vec![]; 25], cpts).unwrap();
        let all: Vec<usize> = (0..25).collect();
        match enumerate_profiles(&net, &all, DEFAULT_PROFILE_CAP) {
            Err(Error::ProfileCap { count, .. }) => assert_eq!(count, 3u128.pow(25)),
            other => panic!("expected cap refusal, got {other:?}"),
        }
    }

    #[test]
    fn evidence_rejects_double_observation() {
        let net = chain();
        assert!(EvidenceProfile::parse(&net, &["A=a1", "A=a2"]).is_err());
        assert!(EvidenceProfile::parse(&net, &["Z=a1"]).is_err());
        let e = EvidenceProfile::parse(&net, &["B=b2"]).unwrap();
        assert_eq!(e.get(1), Some(1));
    }

    #[test]
    fn json_round_trip_preserves_network() {
        let net = chain();
        assert_eq!(load_network(&net.to_json()).unwrap(), net);
    }
}
