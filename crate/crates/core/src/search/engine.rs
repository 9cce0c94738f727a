//! Backtracking r-coloring solver for hypergraphs: find a coloring of the
//! vertices with no monochromatic edge, or prove none exists.
//!
//! Vertices are branched in index order, colors in ascending order, so the
//! first coloring found is the lexicographically least one (among colorings
//! in canonical color order when symmetry reduction is on). After every
//! assignment, each edge whose assigned members all share color `c` and that
//! has exactly one unassigned member removes `c` from that member's domain;
//! singleton domains are forced, empty ones are conflicts.
//!
//! Parallel runs split the tree into prefixes at a fixed decision depth and
//! solve the subtrees independently. Subtree results are merged in tree
//! order and every node counter is charged in that order, so results do not
//! depend on the worker count. Only the wall-clock limit is schedule
//! dependent.

use std::time::Instant;

use rayon::prelude::*;

/// Upper bound on the number of colors (one bit per color in a `u64`).
pub const MAX_COLORS: usize = 64;

/// Edges over vertices `0..vertices`; each edge is a set of distinct vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    vertices: usize,
    edges: Vec<Vec<u32>>,
    incidence: Vec<Vec<u32>>,
}

impl Hypergraph {
    /// Members of each edge are sorted and deduplicated, then duplicate edges
    /// are dropped.
    pub fn new(vertices: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Self {
        let mut edges: Vec<Vec<u32>> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e.dedup();
                assert!(e.iter().all(|&v| (v as usize) < vertices), "edge member out of range");
                e
            })
            .filter(|e| !e.is_empty())
            .collect();
        edges.sort();
        edges.dedup();
        let mut incidence = vec![Vec::new(); vertices];
        for (i, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v as usize].push(i as u32);
            }
        }
        Hypergraph { vertices, edges, incidence }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// True if some edge is monochromatic under `colors`.
    pub fn has_monochromatic_edge(&self, colors: &[u8]) -> bool {
        self.edges.iter().any(|e| e.iter().all(|&v| colors[v as usize] == colors[e[0] as usize]))
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub colors: usize,
    /// Try only already-used colors plus the least unused one at each decision.
    pub symmetry: bool,
    pub max_nodes: u64,
    pub deadline: Option<Instant>,
    pub workers: usize,
    /// Decision depth at which the tree is split into parallel subtrees.
    pub split_depth: usize,
}

impl SolverConfig {
    pub fn new(colors: usize) -> Self {
        SolverConfig { colors, symmetry: true, max_nodes: u64::MAX, deadline: None, workers: 1, split_depth: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A coloring with no monochromatic edge, indexed by vertex.
    Colorable(Vec<u8>),
    Uncolorable,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub nodes: u64,
    pub subtrees: usize,
}

const UNASSIGNED: u8 = u8::MAX;

#[derive(Debug, Clone, Copy)]
enum Change {
    Domain(u32, u64),
    Assign(u32),
    Used(u64),
}

#[derive(Debug)]
enum Stop {
    Nodes,
    Time,
}

#[derive(Clone)]
struct State<'g> {
    graph: &'g Hypergraph,
    r: usize,
    domain: Vec<u64>,
    color: Vec<u8>,
    counts: Vec<u32>,
    assigned: Vec<u32>,
    distinct: Vec<u32>,
    used: u64,
    trail: Vec<Change>,
    queue: Vec<u32>,
    nodes: u64,
}

impl<'g> State<'g> {
    fn new(graph: &'g Hypergraph, r: usize) -> Self {
        let full = if r == MAX_COLORS { u64::MAX } else { (1u64 << r) - 1 };
        let edges = graph.edges.len();
        State {
            graph,
            r,
            domain: vec![full; graph.vertices],
            color: vec![UNASSIGNED; graph.vertices],
            counts: vec![0; edges * r],
            assigned: vec![0; edges],
            distinct: vec![0; edges],
            used: 0,
            trail: Vec::new(),
            queue: Vec::new(),
            nodes: 0,
        }
    }

    /// Apply the constraints that hold before any decision. False if the
    /// instance is already contradictory.
    fn initialise(&mut self) -> bool {
        for e in &self.graph.edges {
            if e.len() == 1 {
                return false;
            }
        }
        let singles: Vec<u32> =
            (0..self.graph.vertices as u32).filter(|&v| self.domain[v as usize].count_ones() == 1).collect();
        self.queue.extend(singles);
        self.propagate()
    }

    fn restrict(&mut self, v: u32, mask: u64) -> bool {
        let old = self.domain[v as usize];
        let new = old & mask;
        if new == old {
            return true;
        }
        self.trail.push(Change::Domain(v, old));
        self.domain[v as usize] = new;
        match new.count_ones() {
            0 => false,
            1 => {
                self.queue.push(v);
                true
            }
            _ => true,
        }
    }

    fn assign(&mut self, v: u32, c: u8) -> bool {
        let vi = v as usize;
        if self.color[vi] != UNASSIGNED {
            return self.color[vi] == c;
        }
        if !self.restrict(v, 1 << c) {
            return false;
        }
        self.color[vi] = c;
        self.trail.push(Change::Assign(v));
        if self.used & (1 << c) == 0 {
            self.trail.push(Change::Used(self.used));
            self.used |= 1 << c;
        }
        let graph = self.graph;
        // Counts are updated for every incident edge before any check, so
        // undo can reverse them uniformly even after a conflict.
        for &e in &graph.incidence[vi] {
            let ei = e as usize;
            let slot = ei * self.r + c as usize;
            self.counts[slot] += 1;
            if self.counts[slot] == 1 {
                self.distinct[ei] += 1;
            }
            self.assigned[ei] += 1;
        }
        for &e in &graph.incidence[vi] {
            let ei = e as usize;
            if self.distinct[ei] != 1 {
                continue;
            }
            let len = graph.edges[ei].len() as u32;
            if self.assigned[ei] == len {
                return false;
            }
            if self.assigned[ei] + 1 == len {
                let free = graph.edges[ei].iter().copied().find(|&u| self.color[u as usize] == UNASSIGNED);
                if let Some(u) = free {
                    if !self.restrict(u, !(1u64 << c)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn propagate(&mut self) -> bool {
        while let Some(v) = self.queue.pop() {
            let vi = v as usize;
            if self.color[vi] != UNASSIGNED {
                continue;
            }
            let c = self.domain[vi].trailing_zeros() as u8;
            if !self.assign(v, c) {
                self.queue.clear();
                return false;
            }
        }
        true
    }

    fn decide(&mut self, v: u32, c: u8) -> bool {
        self.assign(v, c) && self.propagate()
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail longer than mark") {
                Change::Domain(v, old) => self.domain[v as usize] = old,
                Change::Used(old) => self.used = old,
                Change::Assign(v) => {
                    let vi = v as usize;
                    let c = self.color[vi] as usize;
                    self.color[vi] = UNASSIGNED;
                    for &e in &self.graph.incidence[vi] {
                        let ei = e as usize;
                        let slot = ei * self.r + c;
                        self.counts[slot] -= 1;
                        if self.counts[slot] == 0 {
                            self.distinct[ei] -= 1;
                        }
                        self.assigned[ei] -= 1;
                    }
                }
            }
        }
    }

    fn candidates(&self, v: usize, symmetry: bool) -> u64 {
        let mut allowed = self.domain[v];
        if symmetry {
            let unused = !self.used & allowed;
            let lowest = unused & unused.wrapping_neg();
            allowed &= self.used | lowest;
        }
        allowed
    }

    fn charge(&mut self, config: &SolverConfig) -> Result<(), Stop> {
        self.nodes += 1;
        if self.nodes > config.max_nodes {
            return Err(Stop::Nodes);
        }
        if self.nodes.is_multiple_of(4096) {
            if let Some(deadline) = config.deadline {
                if Instant::now() >= deadline {
                    return Err(Stop::Time);
                }
            }
        }
        Ok(())
    }

    fn next_unassigned(&self, from: usize) -> Option<usize> {
        (from..self.graph.vertices).find(|&v| self.color[v] == UNASSIGNED)
    }

    fn dfs(&mut self, from: usize, config: &SolverConfig) -> Result<bool, Stop> {
        let Some(v) = self.next_unassigned(from) else { return Ok(true) };
        let mut options = self.candidates(v, config.symmetry);
        while options != 0 {
            let c = options.trailing_zeros() as u8;
            options &= options - 1;
            self.charge(config)?;
            let mark = self.trail.len();
            if self.decide(v as u32, c) && self.dfs(v + 1, config)? {
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }

    /// Collect decision paths of length `depth` (or shorter if they already
    /// complete a coloring) in tree order.
    fn prefixes(
        &mut self,
        from: usize,
        depth: usize,
        path: &mut Vec<(u32, u8)>,
        out: &mut Vec<Vec<(u32, u8)>>,
        config: &SolverConfig,
    ) -> Result<(), Stop> {
        let Some(v) = (if path.len() == depth { None } else { self.next_unassigned(from) }) else {
            out.push(path.clone());
            return Ok(());
        };
        let mut options = self.candidates(v, config.symmetry);
        while options != 0 {
            let c = options.trailing_zeros() as u8;
            options &= options - 1;
            self.charge(config)?;
            let mark = self.trail.len();
            if self.decide(v as u32, c) {
                path.push((v as u32, c));
                self.prefixes(v + 1, depth, path, out, config)?;
                path.pop();
            }
            self.undo(mark);
        }
        Ok(())
    }

    fn coloring(&self) -> Vec<u8> {
        self.color.clone()
    }
}

enum Subtree {
    Found(Vec<u8>),
    Empty,
    Stopped(Stop),
}

fn solve_subtree(root: &State<'_>, path: &[(u32, u8)], config: &SolverConfig) -> (Subtree, u64) {
    let mut state = root.clone();
    state.nodes = 0;
    for &(v, c) in path {
        let ok = state.decide(v, c);
        debug_assert!(ok, "replayed prefix must stay consistent");
    }
    let from = path.last().map_or(0, |&(v, _)| v as usize + 1);
    let result = match state.dfs(from, config) {
        Ok(true) => Subtree::Found(state.coloring()),
        Ok(false) => Subtree::Empty,
        Err(stop) => Subtree::Stopped(stop),
    };
    (result, state.nodes)
}

fn stopped(stop: Stop) -> SolveOutcome {
    match stop {
        Stop::Nodes => SolveOutcome::NodeLimit,
        Stop::Time => SolveOutcome::TimeLimit,
    }
}

/// Decide whether `graph` has a coloring with `config.colors` colors and no
/// monochromatic edge.
pub fn solve(graph: &Hypergraph, config: &SolverConfig) -> (SolveOutcome, SolveStats) {
    assert!((1..=MAX_COLORS).contains(&config.colors), "color count must be in 1..=64");
    let mut stats = SolveStats::default();
    let mut root = State::new(graph, config.colors);
    if !root.initialise() {
        return (SolveOutcome::Uncolorable, stats);
    }
    let mut paths = Vec::new();
    // The split does not depend on the worker count, so node totals agree
    // across thread counts.
    let mut probe = root.clone();
    if let Err(stop) = probe.prefixes(0, config.split_depth, &mut Vec::new(), &mut paths, config) {
        stats.nodes = probe.nodes.min(config.max_nodes);
        return (stopped(stop), stats);
    }
    stats.nodes = probe.nodes;
    stats.subtrees = paths.len();

    let pool = rayon::ThreadPoolBuilder::new().num_threads(config.workers.max(1)).build();
    let chunk = config.workers.max(1) * 4;
    for batch in paths.chunks(chunk) {
        let results: Vec<(Subtree, u64)> = match (&pool, config.workers > 1) {
            (Ok(pool), true) => pool.install(|| batch.par_iter().map(|p| solve_subtree(&root, p, config)).collect()),
            _ => batch.iter().map(|p| solve_subtree(&root, p, config)).collect(),
        };
        for (result, nodes) in results {
            stats.nodes = stats.nodes.saturating_add(nodes);
            if stats.nodes > config.max_nodes {
                stats.nodes = config.max_nodes;
                return (SolveOutcome::NodeLimit, stats);
            }
            match result {
                Subtree::Found(colors) => return (SolveOutcome::Colorable(colors), stats),
                Subtree::Empty => {}
                Subtree::Stopped(stop) => return (stopped(stop), stats),
            }
        }
    }
    (SolveOutcome::Uncolorable, stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap3(n: u32) -> Hypergraph {
        let mut edges = Vec::new();
        for a in 0..n {
            for d in 1..n {
                if a + 2 * d < n {
                    edges.push(vec![a, a + d, a + 2 * d]);
                }
            }
        }
        Hypergraph::new(n as usize, edges)
    }

    #[test]
    fn van_der_waerden_three() {
        let config = SolverConfig::new(2);
        let (outcome, _) = solve(&ap3(8), &config);
        let SolveOutcome::Colorable(colors) = outcome else { panic!("8 points should be colorable") };
        assert!(!ap3(8).has_monochromatic_edge(&colors));
        assert_eq!(solve(&ap3(9), &config).0, SolveOutcome::Uncolorable);
    }

    #[test]
    fn parallel_matches_sequential() {
        for n in [8, 9, 12] {
            for r in [2, 3] {
                let mut config = SolverConfig::new(r);
                let seq = solve(&ap3(n), &config);
                for workers in [2, 4] {
                    config.workers = workers;
                    config.split_depth = 3;
                    let par = solve(&ap3(n), &config);
                    assert_eq!(seq.0, par.0, "n={n} r={r} workers={workers}");
                    let again = solve(&ap3(n), &config);
                    assert_eq!(par, again);
                }
            }
        }
    }

    #[test]
    fn single_color_and_trivial_edges() {
        let g = Hypergraph::new(3, vec![vec![0, 2]]);
        assert_eq!(solve(&g, &SolverConfig::new(1)).0, SolveOutcome::Uncolorable);
        assert_eq!(solve(&g, &SolverConfig::new(2)).0, SolveOutcome::Colorable(vec![0, 0, 1]));
        let g = Hypergraph::new(2, vec![vec![1]]);
        assert_eq!(solve(&g, &SolverConfig::new(5)).0, SolveOutcome::Uncolorable);
        let g = Hypergraph::new(2, Vec::<Vec<u32>>::new());
        assert_eq!(solve(&g, &SolverConfig::new(1)).0, SolveOutcome::Colorable(vec![0, 0]));
    }

    #[test]
    fn node_limit_reported() {
        let mut config = SolverConfig::new(2);
        config.max_nodes = 5;
        assert_eq!(solve(&ap3(9), &config).0, SolveOutcome::NodeLimit);
    }

    #[test]
    fn symmetry_off_agrees() {
        for n in 3..11 {
            let on = solve(&ap3(n), &SolverConfig::new(2)).0;
            let mut config = SolverConfig::new(2);
            config.symmetry = false;
            let off = solve(&ap3(n), &config).0;
            assert_eq!(matches!(on, SolveOutcome::Colorable(_)), matches!(off, SolveOutcome::Colorable(_)));
        }
    }
}
