//! Discrete Bayesian belief networks.
//!
//! A network is a DAG over discrete variables plus one conditional probability
//! table (CPT) per variable. The joint probability of an instantiation is the
//! product of the CPT entries it selects. This module provides validation,
//! seeded random generation, exhaustive enumeration, forward (logic) sampling
//! and exact or truncated marginals.
//!
//! CPT layout: `cpts[v][row][state]`, where `row` is the mixed-radix index of
//! the parent states taken in the order listed in `parents[v]`, last parent
//! varying fastest.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcurve::{ProbSample, WeightMode};
use crate::rng::Xoshiro256PlusPlus;

/// Default upper bound on the number of instantiations an exact routine will
/// enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// Tolerance on CPT row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub cardinality: usize,
}

/// Unvalidated network description, exactly as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub variables: Vec<Variable>,
    pub parents: Vec<Vec<usize>>,
    pub cpts: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    CardinalityTooSmall(usize),
    ListLengthMismatch {
        field: &'static str,
        len: usize,
    },
    ParentOutOfRange(usize),
    SelfParent,
    DuplicateParent(usize),
    CycleDetected,
    RowCountMismatch {
        expected: usize,
        got: usize,
    },
    RowLengthMismatch {
        row: usize,
        expected: usize,
        got: usize,
    },
    EntryOutOfRange {
        row: usize,
        state: usize,
        value: f64,
    },
    RowSumNotOne {
        row: usize,
        sum: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// `None` for whole-network problems.
    pub variable: Option<usize>,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.variable {
            write!(f, "variable {v}: ")?;
        }
        match &self.kind {
            ViolationKind::CardinalityTooSmall(c) => write!(f, "cardinality {c} < 2"),
            ViolationKind::ListLengthMismatch { field, len } => {
                write!(f, "`{field}` has {len} entries, expected one per variable")
            }
            ViolationKind::ParentOutOfRange(p) => write!(f, "parent index {p} out of range"),
            ViolationKind::SelfParent => write!(f, "variable is its own parent"),
            ViolationKind::DuplicateParent(p) => write!(f, "parent {p} listed twice"),
            ViolationKind::CycleDetected => write!(f, "cycle detected"),
            ViolationKind::RowCountMismatch { expected, got } => {
                write!(f, "CPT has {got} rows, expected {expected}")
            }
            ViolationKind::RowLengthMismatch { row, expected, got } => {
                write!(f, "CPT row {row} has {got} entries, expected {expected}")
            }
            ViolationKind::EntryOutOfRange { row, state, value } => {
                write!(f, "CPT entry [{row}][{state}] = {value} not in [0, 1]")
            }
            ViolationKind::RowSumNotOne { row, sum } => {
                write!(f, "row sum ≠ 1 (row {row} sums to {sum})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, variable: Option<usize>, kind: ViolationKind) {
        self.violations.push(Violation { variable, kind });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks every network invariant and lists each violation.
pub fn validate(spec: &NetworkSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = spec.variables.len();
    if spec.parents.len() != n {
        report.push(
            None,
            ViolationKind::ListLengthMismatch {
                field: "parents",
                len: spec.parents.len(),
            },
        );
    }
    if spec.cpts.len() != n {
        report.push(
            None,
            ViolationKind::ListLengthMismatch {
                field: "cpts",
                len: spec.cpts.len(),
            },
        );
    }
    if !report.is_valid() {
        return report;
    }

    let mut structure_ok = true;
    for (v, var) in spec.variables.iter().enumerate() {
        if var.cardinality < 2 {
            report.push(Some(v), ViolationKind::CardinalityTooSmall(var.cardinality));
            structure_ok = false;
        }
        let mut seen = Vec::new();
        for &p in &spec.parents[v] {
            if p >= n {
                report.push(Some(v), ViolationKind::ParentOutOfRange(p));
                structure_ok = false;
            } else if p == v {
                report.push(Some(v), ViolationKind::SelfParent);
                structure_ok = false;
            } else if seen.contains(&p) {
                report.push(Some(v), ViolationKind::DuplicateParent(p));
                structure_ok = false;
            }
            seen.push(p);
        }
    }
    if !structure_ok {
        return report;
    }

    if topological_order(&spec.parents).is_none() {
        let cyclic = cyclic_variables(&spec.parents);
        for v in cyclic {
            report.push(Some(v), ViolationKind::CycleDetected);
        }
    }

    for (v, var) in spec.variables.iter().enumerate() {
        let expected_rows: usize = spec.parents[v]
            .iter()
            .map(|&p| spec.variables[p].cardinality)
            .product();
        let table = &spec.cpts[v];
        if table.len() != expected_rows {
            report.push(
                Some(v),
                ViolationKind::RowCountMismatch {
                    expected: expected_rows,
                    got: table.len(),
                },
            );
        }
        for (r, row) in table.iter().enumerate() {
            if row.len() != var.cardinality {
                report.push(
                    Some(v),
                    ViolationKind::RowLengthMismatch {
                        row: r,
                        expected: var.cardinality,
                        got: row.len(),
                    },
                );
                continue;
            }
            let mut entries_ok = true;
            for (s, &x) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&x) {
                    report.push(
                        Some(v),
                        ViolationKind::EntryOutOfRange {
                            row: r,
                            state: s,
                            value: x,
                        },
                    );
                    entries_ok = false;
                }
            }
            let sum: f64 = row.iter().sum();
            if entries_ok && (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                report.push(Some(v), ViolationKind::RowSumNotOne { row: r, sum });
            }
        }
    }
    report
}

/// Kahn's algorithm, smallest ready index first. `None` when the graph has a cycle.
fn topological_order(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (v, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(v);
        }
    }
    let mut ready: std::collections::BTreeSet<usize> =
        (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop_first() {
        order.push(v);
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.insert(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Variables left unprocessed by Kahn's algorithm (those on or downstream of a cycle).
fn cyclic_variables(parents: &[Vec<usize>]) -> Vec<usize> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (v, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(v);
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
    let mut done = vec![false; n];
    while let Some(v) = stack.pop() {
        done[v] = true;
        for &c in &children[v] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                stack.push(c);
            }
        }
    }
    (0..n).filter(|&v| !done[v]).collect()
}

/// A complete assignment of states, aligned with the network's variable order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instantiation {
    pub states: Vec<usize>,
}

impl Instantiation {
    pub fn new(states: Vec<usize>) -> Self {
        Self { states }
    }
}

/// How raw CPT entries are drawn before each row is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CptRegime {
    /// Uniform on `[0, 1]`.
    UnitUniform,
    /// Uniform on `[0, 0.1] ∪ [0.9, 1]`.
    Extreme,
}

impl CptRegime {
    /// One raw (pre-normalization) entry.
    pub fn draw(self, rng: &mut Xoshiro256PlusPlus) -> f64 {
        match self {
            CptRegime::UnitUniform => rng.next_f64(),
            CptRegime::Extreme => {
                // the union has total length 0.2; map [0, 0.2) onto it
                let x = 0.2 * rng.next_f64();
                if x < 0.1 {
                    x
                } else {
                    0.8 + x
                }
            }
        }
    }
}

/// A validated discrete Bayesian network.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    spec: NetworkSpec,
    order: Vec<usize>,
    strides: Vec<Vec<usize>>,
    cap: u128,
}

impl TryFrom<NetworkSpec> for BayesNet {
    type Error = Error;

    fn try_from(spec: NetworkSpec) -> Result<Self> {
        let report = validate(&spec);
        if !report.is_valid() {
            return Err(Error::InvalidNetwork(report));
        }
        let order = topological_order(&spec.parents).expect("validated acyclic");
        let strides = spec
            .parents
            .iter()
            .map(|ps| {
                let mut strides = vec![0; ps.len()];
                let mut acc = 1;
                for k in (0..ps.len()).rev() {
                    strides[k] = acc;
                    acc *= spec.variables[ps[k]].cardinality;
                }
                strides
            })
            .collect();
        Ok(Self {
            spec,
            order,
            strides,
            cap: DEFAULT_ENUMERATION_CAP,
        })
    }
}

impl BayesNet {
    pub fn new(
        variables: Vec<Variable>,
        parents: Vec<Vec<usize>>,
        cpts: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        Self::try_from(NetworkSpec {
            variables,
            parents,
            cpts,
        })
    }

    /// Replaces the enumeration cap used by the exact routines.
    pub fn with_enumeration_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }

    pub fn enumeration_cap(&self) -> u128 {
        self.cap
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn num_variables(&self) -> usize {
        self.spec.variables.len()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.spec.variables
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.spec.parents[v]
    }

    pub fn cpt(&self, v: usize) -> &[Vec<f64>] {
        &self.spec.cpts[v]
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// Number of distinct instantiations (saturating).
    pub fn instantiation_count(&self) -> u128 {
        self.spec
            .variables
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.cardinality as u128))
    }

    fn row_index(&self, v: usize, states: &[usize]) -> usize {
        self.spec.parents[v]
            .iter()
            .zip(&self.strides[v])
            .map(|(&p, &s)| states[p] * s)
            .sum()
    }

    /// Product of CPT entries in variable-index order. Caller guarantees shape.
    pub(crate) fn joint_unchecked(&self, states: &[usize]) -> f64 {
        (0..states.len())
            .map(|v| self.spec.cpts[v][self.row_index(v, states)][states[v]])
            .product()
    }

    pub fn check_instantiation(&self, inst: &Instantiation) -> Result<()> {
        if inst.states.len() != self.num_variables() {
            return Err(Error::DimensionMismatch {
                expected: self.num_variables(),
                got: inst.states.len(),
            });
        }
        for (v, (&s, var)) in inst.states.iter().zip(&self.spec.variables).enumerate() {
            if s >= var.cardinality {
                return Err(Error::StateOutOfRange {
                    variable: v,
                    state: s,
                    cardinality: var.cardinality,
                });
            }
        }
        Ok(())
    }

    pub fn joint_probability(&self, inst: &Instantiation) -> Result<f64> {
        self.check_instantiation(inst)?;
        Ok(self.joint_unchecked(&inst.states))
    }

    fn check_cap(&self) -> Result<()> {
        let required = self.instantiation_count();
        if required > self.cap {
            return Err(Error::EnumerationCapExceeded {
                required,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Every instantiation exactly once with its joint probability, first
    /// variable varying fastest.
    pub fn enumerate_instantiations(&self) -> Result<Enumeration<'_>> {
        self.check_cap()?;
        Ok(Enumeration {
            net: self,
            states: vec![0; self.num_variables()],
            done: false,
        })
    }

    /// Allocation-free variant of [`Self::enumerate_instantiations`].
    pub fn for_each_instantiation(&self, mut f: impl FnMut(&[usize], f64)) -> Result<()> {
        self.check_cap()?;
        let mut states = vec![0; self.num_variables()];
        loop {
            f(&states, self.joint_unchecked(&states));
            if !self.advance(&mut states) {
                return Ok(());
            }
        }
    }

    /// Odometer step; false once every instantiation has been visited.
    fn advance(&self, states: &mut [usize]) -> bool {
        for (s, var) in states.iter_mut().zip(&self.spec.variables) {
            *s += 1;
            if *s < var.cardinality {
                return true;
            }
            *s = 0;
        }
        false
    }

    /// Draws one instantiation by forward sampling in topological order.
    pub fn forward_sample(&self, rng: &mut Xoshiro256PlusPlus) -> Instantiation {
        let mut states = vec![0; self.num_variables()];
        for &v in &self.order {
            let row = &self.spec.cpts[v][self.row_index(v, &states)];
            states[v] = sample_row(row, rng.next_f64());
        }
        Instantiation { states }
    }

    /// `n` forward samples with their joint probabilities, in draw order.
    pub fn logic_sample_instantiations(
        &self,
        n: usize,
        seed: u64,
    ) -> Result<Vec<(Instantiation, f64)>> {
        if n == 0 {
            return Err(Error::invalid("logic sample size must be at least 1"));
        }
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        Ok((0..n)
            .map(|_| {
                let inst = self.forward_sample(&mut rng);
                let p = self.joint_unchecked(&inst.states);
                (inst, p)
            })
            .collect())
    }

    /// Logic sampling: the joint probabilities of `n` forward samples, sorted
    /// ascending, as a discrete-mode sample.
    pub fn logic_sample(&self, n: usize, seed: u64) -> Result<ProbSample> {
        let values = self
            .logic_sample_instantiations(n, seed)?
            .into_iter()
            .map(|(_, p)| p)
            .collect();
        ProbSample::new(values, WeightMode::Discrete)
    }

    pub fn exact_marginals(&self) -> Result<Vec<Vec<f64>>> {
        Ok(self.truncated_marginals(0.0)?.marginals)
    }

    /// Unnormalized marginals over the instantiations with joint probability
    /// `>= p0`, plus the total mass those instantiations carry.
    pub fn truncated_marginals(&self, p0: f64) -> Result<TruncatedMarginals> {
        if p0.is_nan() || p0 < 0.0 {
            return Err(Error::OutOfDomain {
                what: "p0",
                value: p0,
                domain: "[0, inf)".into(),
            });
        }
        let mut marginals: Vec<Vec<f64>> = self
            .spec
            .variables
            .iter()
            .map(|v| vec![0.0; v.cardinality])
            .collect();
        let mut mass_kept = 0.0;
        self.for_each_instantiation(|states, p| {
            if p >= p0 {
                mass_kept += p;
                for (m, &s) in marginals.iter_mut().zip(states) {
                    m[s] += p;
                }
            }
        })?;
        Ok(TruncatedMarginals {
            marginals,
            mass_kept,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.spec).expect("network serializes")
    }

    /// Parses and validates a network document.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: NetworkSpec = serde_json::from_str(text)?;
        Self::try_from(spec)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json();
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Inverse-cdf choice from a probability row; never returns a zero-probability
/// state.
fn sample_row(row: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (s, &x) in row.iter().enumerate() {
        if x > 0.0 {
            last_positive = s;
            cum += x;
            if u < cum {
                return s;
            }
        }
    }
    last_positive
}

pub struct Enumeration<'a> {
    net: &'a BayesNet,
    states: Vec<usize>,
    done: bool,
}

impl Iterator for Enumeration<'_> {
    type Item = (Instantiation, f64);

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = (
            Instantiation::new(self.states.clone()),
            self.net.joint_unchecked(&self.states),
        );
        self.done = !self.net.advance(&mut self.states);
        Some(item)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedMarginals {
    pub marginals: Vec<Vec<f64>>,
    pub mass_kept: f64,
}

impl TruncatedMarginals {
    /// Largest absolute difference against a reference set of marginals.
    pub fn max_abs_error(&self, exact: &[Vec<f64>]) -> f64 {
        self.marginals
            .iter()
            .zip(exact)
            .flat_map(|(t, e)| t.iter().zip(e).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

/// Random DAG plus CPTs.
///
/// Draw order, which fixes the network for a given seed: for each variable
/// `i` in index order, a parent count uniform in `0..=min(i, max_parents)`,
/// then that many parents by a partial Fisher-Yates shuffle of `0..i`
/// (stored ascending), then the CPT row by row. Each row is drawn entry by
/// entry from `regime`, redrawn whole if its sum is below 1e-9, then divided
/// by its sum.
pub fn random_network(
    n_vars: usize,
    cardinality: usize,
    max_parents: usize,
    regime: CptRegime,
    seed: u64,
) -> Result<BayesNet> {
    if n_vars == 0 {
        return Err(Error::invalid("n_vars must be at least 1"));
    }
    if cardinality < 2 {
        return Err(Error::invalid("cardinality must be at least 2"));
    }
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let mut variables = Vec::with_capacity(n_vars);
    let mut parents = Vec::with_capacity(n_vars);
    let mut cpts = Vec::with_capacity(n_vars);
    for i in 0..n_vars {
        variables.push(Variable {
            name: format!("X{}", i + 1),
            cardinality,
        });
        let k = rng.below(i.min(max_parents) as u64 + 1) as usize;
        let mut pool: Vec<usize> = (0..i).collect();
        for slot in 0..k {
            let pick = slot + rng.below((i - slot) as u64) as usize;
            pool.swap(slot, pick);
        }
        let mut chosen = pool[..k].to_vec();
        chosen.sort_unstable();
        let rows = cardinality.pow(k as u32);
        let table: Vec<Vec<f64>> = (0..rows)
            .map(|_| random_row(cardinality, regime, &mut rng))
            .collect();
        parents.push(chosen);
        cpts.push(table);
    }
    BayesNet::new(variables, parents, cpts)
}

fn random_row(cardinality: usize, regime: CptRegime, rng: &mut Xoshiro256PlusPlus) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..cardinality).map(|_| regime.draw(rng)).collect();
        let sum: f64 = raw.iter().sum();
        if sum >= 1e-9 {
            return raw.into_iter().map(|x| x / sum).collect();
        }
    }
}
