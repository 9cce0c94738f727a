//! Finite-window partition regularity.
//!
//! A family descriptor, a window of integers and a box of free-parameter
//! values determine a finite set of instances. [`find_witness`] scans a given
//! coloring for a monochromatic instance, [`find_avoiding_coloring`] asks the
//! backtracking engine for a coloring with none, and [`minimal_window`] finds
//! the least window size at which every coloring has one.

pub mod coloring;
pub mod engine;

use std::collections::HashMap;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::families::{bigint_to_json, FamilyDescriptor, FamilyError, Instance};
use crate::images::Limit;
pub use coloring::{Coloring, ColoringError};
use engine::{Hypergraph, SolveOutcome, SolverConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error("invalid parameter box: {0}")]
    Box(String),
    #[error("color count must be between 1 and 36, got {0}")]
    Colors(usize),
    #[error("window size must be at least 1")]
    WindowSize,
    #[error("avoiding coloring failed verification: {0}")]
    VerificationFailed(String),
}

/// Ground set of the search: `[1, N]` or `[−N, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Nat,
    Int,
}

impl Domain {
    pub fn window(self, n: i64) -> Window {
        match self {
            Domain::Nat => Window { lo: 1, hi: n },
            Domain::Int => Window { lo: -n, hi: n },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        Window { lo, hi }
    }

    pub fn len(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        v.to_i64().is_some_and(|v| self.lo <= v && v <= self.hi)
    }

    fn magnitude(&self) -> BigInt {
        BigInt::from(self.lo.unsigned_abs().max(self.hi.unsigned_abs()))
    }

    /// Window points in branching order: increasing absolute value,
    /// negative before positive.
    pub fn branching_order(&self) -> Vec<i64> {
        let mut points: Vec<i64> = (self.lo..=self.hi).collect();
        points.sort_by_key(|&v| (v.unsigned_abs(), v >= 0));
        points
    }
}

/// Inclusive range for each free parameter, in descriptor order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamBox {
    ranges: Vec<(BigInt, BigInt)>,
}

impl ParamBox {
    pub fn new(ranges: Vec<(BigInt, BigInt)>) -> Self {
        ParamBox { ranges }
    }

    pub fn from_i64(ranges: &[(i64, i64)]) -> Self {
        Self::new(ranges.iter().map(|&(a, b)| (BigInt::from(a), BigInt::from(b))).collect())
    }

    pub fn ranges(&self) -> &[(BigInt, BigInt)] {
        &self.ranges
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.iter().any(|(lo, hi)| lo > hi)
    }

    /// `[1, N]` per parameter in ℕ mode and `[−N, N]` in ℤ mode; exponent
    /// parameters always start at 1.
    pub fn default_for(desc: &FamilyDescriptor, domain: Domain, n: i64) -> Self {
        BoxOverrides::default().resolve(desc, domain, n).expect("default box always resolves")
    }
}

/// User restrictions of the default box: one range for every parameter,
/// named ranges, or both (named ranges win).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoxOverrides {
    uniform: Option<(BigInt, BigInt)>,
    named: Vec<(String, (BigInt, BigInt))>,
}

fn parse_range(text: &str) -> Result<(BigInt, BigInt), SearchError> {
    let bad = || SearchError::Box(format!("range {text:?} must look like lo:hi"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: BigInt = lo.trim().parse().map_err(|_| bad())?;
    let hi: BigInt = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

impl BoxOverrides {
    /// `"lo:hi"` for every parameter or `"a=1:5,d=1:2"` by name.
    pub fn parse(text: &str) -> Result<Self, SearchError> {
        let mut out = BoxOverrides::default();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once('=') {
                Some((name, range)) => out.named.push((name.trim().to_string(), parse_range(range)?)),
                None => out.uniform = Some(parse_range(part)?),
            }
        }
        Ok(out)
    }

    pub fn uniform(lo: i64, hi: i64) -> Self {
        BoxOverrides { uniform: Some((lo.into(), hi.into())), named: Vec::new() }
    }

    pub fn resolve(&self, desc: &FamilyDescriptor, domain: Domain, n: i64) -> Result<ParamBox, SearchError> {
        let names = desc.free_names();
        for (name, _) in &self.named {
            if !names.contains(name) {
                return Err(SearchError::Box(format!("unknown parameter {name:?}; expected one of {names:?}")));
            }
        }
        let base = match domain {
            Domain::Nat => (BigInt::one(), BigInt::from(n)),
            Domain::Int => (BigInt::from(-n), BigInt::from(n)),
        };
        let natural = desc.natural_params();
        let ranges = names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let named = self.named.iter().rev().find(|(n, _)| n == name).map(|(_, r)| r.clone());
                let (mut lo, hi) = named.or_else(|| self.uniform.clone()).unwrap_or_else(|| base.clone());
                if natural.contains(&i) && lo < BigInt::one() {
                    lo = BigInt::one();
                }
                (lo, hi)
            })
            .collect();
        Ok(ParamBox::new(ranges))
    }
}

#[derive(Debug, Clone)]
pub struct SearchBudget {
    /// Backtracking nodes per decision (or instances scanned by `find_witness`).
    pub max_nodes: u64,
    pub time_limit: Option<Duration>,
    pub workers: usize,
    pub split_depth: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: 200_000_000, time_limit: None, workers: 1, split_depth: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Keep instances whose generated values coincide.
    pub allow_degenerate: bool,
    /// Canonical color order in the backtracking search.
    pub symmetry: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { allow_degenerate: false, symmetry: true }
    }
}

/// What happened to each parameter tuple of the box.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub tuples: u64,
    pub instances: u64,
    pub non_integral: u64,
    pub invalid: u64,
    pub too_large: u64,
    pub outside_window: u64,
}

impl EnumerationStats {
    fn to_json(self) -> Value {
        json!({
            "tuples": self.tuples,
            "instances": self.instances,
            "non_integral": self.non_integral,
            "invalid": self.invalid,
            "too_large": self.too_large,
            "outside_window": self.outside_window,
        })
    }

    fn add(&mut self, other: &EnumerationStats) {
        self.tuples += other.tuples;
        self.instances += other.instances;
        self.non_integral += other.non_integral;
        self.invalid += other.invalid;
        self.too_large += other.too_large;
        self.outside_window += other.outside_window;
    }
}

/// Instances of a family inside a window, in lexicographic parameter order
/// (first parameter slowest).
pub struct InstanceIter<'a> {
    desc: &'a FamilyDescriptor,
    names: Vec<String>,
    ranges: Vec<(BigInt, BigInt)>,
    current: Option<Vec<BigInt>>,
    window: Window,
    limit: Limit,
    stats: EnumerationStats,
}

impl<'a> InstanceIter<'a> {
    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    fn advance(&mut self) {
        let Some(cur) = self.current.as_mut() else { return };
        for i in (0..cur.len()).rev() {
            if cur[i] < self.ranges[i].1 {
                cur[i] += 1;
                for (c, r) in cur[i + 1..].iter_mut().zip(&self.ranges[i + 1..]) {
                    *c = r.0.clone();
                }
                return;
            }
        }
        self.current = None;
    }

    fn instance_for(&mut self, tuple: &[BigInt]) -> Option<Instance> {
        self.stats.tuples += 1;
        let elements = match self.desc.evaluate(tuple, &self.limit) {
            Ok(elements) => elements,
            Err(FamilyError::NonIntegralElement(_)) => {
                self.stats.non_integral += 1;
                return None;
            }
            Err(FamilyError::TooLarge) => {
                self.stats.too_large += 1;
                return None;
            }
            Err(_) => {
                self.stats.invalid += 1;
                return None;
            }
        };
        let mut raw = Vec::with_capacity(elements.len());
        for e in elements {
            match e {
                crate::families::Element::Value(v) if self.window.contains(&v) => raw.push(v),
                _ => {
                    self.stats.outside_window += 1;
                    return None;
                }
            }
        }
        self.stats.instances += 1;
        let provenance = self.names.iter().cloned().zip(tuple.iter().cloned()).collect();
        Some(Instance::from_raw(raw, provenance))
    }
}

impl Iterator for InstanceIter<'_> {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        loop {
            let tuple = self.current.clone()?;
            self.advance();
            if let Some(instance) = self.instance_for(&tuple) {
                return Some(instance);
            }
        }
    }
}

pub fn enumerate_instances<'a>(
    desc: &'a FamilyDescriptor,
    window: Window,
    param_box: &ParamBox,
) -> Result<InstanceIter<'a>, SearchError> {
    desc.validate()?;
    let names = desc.free_names();
    if param_box.ranges.len() != names.len() {
        return Err(SearchError::Box(format!(
            "box has {} ranges, family has {} free parameters",
            param_box.ranges.len(),
            names.len()
        )));
    }
    let current =
        (!param_box.is_empty() && !window.is_empty()).then(|| param_box.ranges.iter().map(|r| r.0.clone()).collect());
    Ok(InstanceIter {
        desc,
        names,
        ranges: param_box.ranges.clone(),
        current,
        window,
        limit: Limit::Magnitude(window.magnitude()),
        stats: EnumerationStats::default(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Regular,
    AvoidingColoringFound,
    WitnessFound,
    NoWitness,
    BudgetExhausted,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Regular => "regular",
            Outcome::AvoidingColoringFound => "avoiding_coloring_found",
            Outcome::WitnessFound => "witness_found",
            Outcome::NoWitness => "no_witness",
            Outcome::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub params: Vec<(String, BigInt)>,
    pub elements: Vec<BigInt>,
    pub color: u8,
    pub degenerate: bool,
}

impl Witness {
    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(n, v)| (n.clone(), bigint_to_json(v))).collect();
        json!({
            "params": Value::Object(params),
            "elements": self.elements.iter().map(bigint_to_json).collect::<Vec<_>>(),
            "color": self.color,
            "degenerate": self.degenerate,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    /// Distinct constraint sets handed to the backtracking engine.
    pub edges: u64,
    pub subtrees: u64,
    pub degenerate_skipped: u64,
    pub enumeration: EnumerationStats,
    pub wall: Duration,
}

impl SearchStats {
    pub fn to_json(&self, timing: bool) -> Value {
        let mut out = json!({
            "nodes": self.nodes,
            "instances": self.enumeration.instances,
            "edges": self.edges,
            "subtrees": self.subtrees,
            "degenerate_skipped": self.degenerate_skipped,
            "enumeration": self.enumeration.to_json(),
        });
        if timing {
            out["wall_ms"] = json!(self.wall.as_millis() as u64);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub outcome: Outcome,
    pub witness: Option<Witness>,
    pub avoiding: Option<Coloring>,
    pub stats: SearchStats,
}

impl SearchReport {
    /// Wall time is only included with `timing`, so reports of identical
    /// searches are byte-identical by default.
    pub fn to_json(&self, timing: bool) -> Value {
        json!({
            "outcome": self.outcome.name(),
            "witness": self.witness.as_ref().map(Witness::to_json),
            "avoiding": self.avoiding.as_ref().map(Coloring::to_text),
            "stats": self.stats.to_json(timing),
        })
    }
}

fn monochromatic_color(coloring: &Coloring, elements: &[BigInt]) -> Option<u8> {
    let mut colors = elements.iter().map(|e| e.to_i64().and_then(|v| coloring.get(v)));
    let first = colors.next()??;
    colors.all(|c| c == Some(first)).then_some(first)
}

/// First instance (by parameter tuple) that is monochromatic under `coloring`.
pub fn find_witness(
    coloring: &Coloring,
    desc: &FamilyDescriptor,
    param_box: &ParamBox,
    budget: &SearchBudget,
    options: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    let start = Instant::now();
    let window = Window::new(coloring.lo(), coloring.hi());
    let mut iter = enumerate_instances(desc, window, param_box)?;
    let mut stats = SearchStats::default();
    let mut witness = None;
    let mut outcome = Outcome::NoWitness;
    for instance in iter.by_ref() {
        if instance.degenerate && !options.allow_degenerate {
            stats.degenerate_skipped += 1;
            continue;
        }
        stats.nodes += 1;
        if stats.nodes > budget.max_nodes {
            outcome = Outcome::BudgetExhausted;
            break;
        }
        if let Some(color) = monochromatic_color(coloring, &instance.elements) {
            outcome = Outcome::WitnessFound;
            witness = Some(Witness {
                params: instance.provenance,
                elements: instance.elements,
                color,
                degenerate: instance.degenerate,
            });
            break;
        }
    }
    stats.enumeration = iter.stats();
    stats.wall = start.elapsed();
    Ok(SearchReport { outcome, witness, avoiding: None, stats })
}

/// The window as a hypergraph: one vertex per point in branching order, one
/// edge per kept instance.
pub fn build_hypergraph(
    desc: &FamilyDescriptor,
    window: Window,
    param_box: &ParamBox,
    options: &SearchOptions,
) -> Result<(Hypergraph, Vec<i64>, SearchStats), SearchError> {
    let order = window.branching_order();
    let index: HashMap<i64, u32> = order.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let mut stats = SearchStats::default();
    let mut iter = enumerate_instances(desc, window, param_box)?;
    let mut edges = Vec::new();
    for instance in iter.by_ref() {
        if instance.degenerate && !options.allow_degenerate {
            stats.degenerate_skipped += 1;
            continue;
        }
        let edge = instance
            .elements
            .iter()
            .map(|e| index[&e.to_i64().expect("window points fit in i64")])
            .collect::<Vec<u32>>();
        edges.push(edge);
    }
    stats.enumeration = iter.stats();
    let graph = Hypergraph::new(order.len(), edges);
    stats.edges = graph.edges().len() as u64;
    Ok((graph, order, stats))
}

fn check_colors(r: usize) -> Result<(), SearchError> {
    if (1..=36).contains(&r) {
        Ok(())
    } else {
        Err(SearchError::Colors(r))
    }
}

fn avoid_until(
    desc: &FamilyDescriptor,
    r: usize,
    window: Window,
    param_box: &ParamBox,
    budget: &SearchBudget,
    deadline: Option<Instant>,
    options: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    check_colors(r)?;
    if window.is_empty() {
        return Err(SearchError::WindowSize);
    }
    let start = Instant::now();
    let (graph, order, mut stats) = build_hypergraph(desc, window, param_box, options)?;
    let config = SolverConfig {
        colors: r,
        symmetry: options.symmetry,
        max_nodes: budget.max_nodes,
        deadline,
        workers: budget.workers.max(1),
        split_depth: budget.split_depth,
    };
    let (result, solve_stats) = engine::solve(&graph, &config);
    stats.nodes = solve_stats.nodes;
    stats.subtrees = solve_stats.subtrees as u64;
    let mut report = SearchReport { outcome: Outcome::Regular, witness: None, avoiding: None, stats };
    match result {
        SolveOutcome::Uncolorable => {}
        SolveOutcome::NodeLimit | SolveOutcome::TimeLimit => report.outcome = Outcome::BudgetExhausted,
        SolveOutcome::Colorable(by_vertex) => {
            let mut colors = vec![0u8; window.len()];
            for (vertex, &point) in order.iter().enumerate() {
                colors[(point - window.lo) as usize] = by_vertex[vertex];
            }
            let coloring = Coloring::new(window.lo, window.hi, r as u32, colors)?;
            verify_avoiding(&coloring, desc, param_box, options)?;
            report.outcome = Outcome::AvoidingColoringFound;
            report.avoiding = Some(coloring);
        }
    }
    report.stats.wall = start.elapsed();
    Ok(report)
}

/// Re-scan every instance against `coloring`, independently of the engine.
pub fn verify_avoiding(
    coloring: &Coloring,
    desc: &FamilyDescriptor,
    param_box: &ParamBox,
    options: &SearchOptions,
) -> Result<(), SearchError> {
    let budget = SearchBudget { max_nodes: u64::MAX, ..SearchBudget::default() };
    let scan = find_witness(coloring, desc, param_box, &budget, options)?;
    match scan.witness {
        None => Ok(()),
        Some(w) => Err(SearchError::VerificationFailed(format!("monochromatic instance {:?}", w.elements))),
    }
}

/// An r-coloring of `window` with no monochromatic instance, verified by a
/// full re-scan, or `Regular` if none exists.
pub fn find_avoiding_coloring(
    desc: &FamilyDescriptor,
    r: usize,
    window: Window,
    param_box: &ParamBox,
    budget: &SearchBudget,
    options: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    let deadline = budget.time_limit.map(|t| Instant::now() + t);
    avoid_until(desc, r, window, param_box, budget, deadline, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimalOutcome {
    Found,
    Unknown,
    BudgetExhausted,
}

impl MinimalOutcome {
    pub fn name(self) -> &'static str {
        match self {
            MinimalOutcome::Found => "found",
            MinimalOutcome::Unknown => "unknown",
            MinimalOutcome::BudgetExhausted => "budget_exhausted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowStep {
    pub n: i64,
    pub outcome: Outcome,
    pub nodes: u64,
    pub edges: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalReport {
    pub outcome: MinimalOutcome,
    pub minimal_n: Option<i64>,
    pub n_max: i64,
    pub colors: usize,
    /// Avoider for the largest window that has one.
    pub avoiding: Option<Coloring>,
    pub steps: Vec<WindowStep>,
    pub stats: SearchStats,
}

impl MinimalReport {
    pub fn to_json(&self, timing: bool) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| json!({"n": s.n, "outcome": s.outcome.name(), "nodes": s.nodes, "edges": s.edges}))
            .collect();
        json!({
            "outcome": self.outcome.name(),
            "minimal_n": self.minimal_n,
            "n_max": self.n_max,
            "colors": self.colors,
            "avoiding": self.avoiding.as_ref().map(Coloring::to_text),
            "steps": steps,
            "stats": self.stats.to_json(timing),
        })
    }
}

/// Scan `N = 1, 2, …, n_max` for the first window on which the family is
/// regular. The node budget applies to each window; the time limit to the
/// whole scan.
pub fn minimal_window(
    desc: &FamilyDescriptor,
    r: usize,
    n_max: i64,
    domain: Domain,
    overrides: &BoxOverrides,
    budget: &SearchBudget,
    options: &SearchOptions,
) -> Result<MinimalReport, SearchError> {
    if n_max < 1 {
        return Err(SearchError::WindowSize);
    }
    check_colors(r)?;
    let start = Instant::now();
    let deadline = budget.time_limit.map(|t| start + t);
    let mut report = MinimalReport {
        outcome: MinimalOutcome::Unknown,
        minimal_n: None,
        n_max,
        colors: r,
        avoiding: None,
        steps: Vec::new(),
        stats: SearchStats::default(),
    };
    for n in 1..=n_max {
        let param_box = overrides.resolve(desc, domain, n)?;
        let step = avoid_until(desc, r, domain.window(n), &param_box, budget, deadline, options)?;
        report.steps.push(WindowStep { n, outcome: step.outcome, nodes: step.stats.nodes, edges: step.stats.edges });
        report.stats.nodes += step.stats.nodes;
        report.stats.edges += step.stats.edges;
        report.stats.subtrees += step.stats.subtrees;
        report.stats.degenerate_skipped += step.stats.degenerate_skipped;
        report.stats.enumeration.add(&step.stats.enumeration);
        match step.outcome {
            Outcome::Regular => {
                report.outcome = MinimalOutcome::Found;
                report.minimal_n = Some(n);
                break;
            }
            Outcome::AvoidingColoringFound => report.avoiding = step.avoiding,
            _ => {
                report.outcome = MinimalOutcome::BudgetExhausted;
                break;
            }
        }
    }
    report.stats.wall = start.elapsed();
    Ok(report)
}
