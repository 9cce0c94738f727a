//! Word spaces `[t]^N`, combinatorial lines, located words, polynomial
//! Hales-Jewett grids and the search for Hales-Jewett numbers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use thiserror::Error;

use crate::search::engine::{self, Hypergraph, SolveOutcome, SolverConfig};
use crate::search::SearchBudget;
use crate::symmetric::{SymmetricContext, SymmetricError};

/// Largest word space searched by [`hj_number`].
pub const MAX_WORDS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HjError {
    #[error("variable word has no variable")]
    NoVariable,
    #[error("letter {letter} is outside the alphabet 1..={t}")]
    LetterOutOfRange { letter: u8, t: u8 },
    #[error("alphabet size must be between 1 and 35, got {0}")]
    AlphabetSize(usize),
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("position {0} appears in more than one of Dom(alpha), gamma, F")]
    DomainOverlap(u64),
    #[error("invalid polynomial pattern: {0}")]
    Pattern(String),
    #[error("word space with {0} words exceeds the search limit")]
    TooLarge(String),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
}

fn check_alphabet(t: usize) -> Result<u8, HjError> {
    if (1..=35).contains(&t) {
        Ok(t as u8)
    } else {
        Err(HjError::AlphabetSize(t))
    }
}

fn letter_char(letter: u8) -> char {
    char::from_digit(u32::from(letter), 36).expect("letters are below 36")
}

/// A word over `{1..t}`; displayed as its letters (base 36 above 9).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<u8>);

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|&l| write!(f, "{}", letter_char(l)))
    }
}

impl Word {
    /// Position of the word in lexicographic order of `[t]^N`.
    pub fn index(&self, t: u8) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * t as usize + (l as usize - 1))
    }
}

/// A word over `{1..t} ∪ {v}` with at least one `v` (`None`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VariableWord(Vec<Option<u8>>);

impl VariableWord {
    pub fn new(letters: Vec<Option<u8>>) -> Result<Self, HjError> {
        if letters.iter().all(Option::is_some) {
            return Err(HjError::NoVariable);
        }
        Ok(VariableWord(letters))
    }

    /// Parse `"1v2"`-style text: `v` is the variable, other characters base-36 letters.
    pub fn parse(text: &str) -> Result<Self, HjError> {
        let letters = text
            .chars()
            .map(|c| match c {
                'v' | 'V' => Ok(None),
                _ => c
                    .to_digit(36)
                    .filter(|&d| d >= 1)
                    .map(|d| Some(d as u8))
                    .ok_or_else(|| HjError::Parse(text.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }

    pub fn letters(&self) -> &[Option<u8>] {
        &self.0
    }

    /// `w(a)`: every `v` replaced by `a`.
    pub fn substitute(&self, a: u8) -> Word {
        Word(self.0.iter().map(|l| l.unwrap_or(a)).collect())
    }
}

impl fmt::Display for VariableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|l| write!(f, "{}", l.map_or('v', letter_char)))
    }
}

/// `[w(1), …, w(t)]`.
pub fn line_points(w: &VariableWord, t: usize) -> Result<Vec<Word>, HjError> {
    let t = check_alphabet(t)?;
    if let Some(&letter) = w.0.iter().flatten().find(|&&l| l > t) {
        return Err(HjError::LetterOutOfRange { letter, t });
    }
    Ok((1..=t).map(|a| w.substitute(a)).collect())
}

/// Every variable word of length `n` over `[t]`, in lexicographic order with
/// the variable sorting after every letter.
pub fn variable_words(t: usize, n: usize) -> Result<Vec<VariableWord>, HjError> {
    let t = check_alphabet(t)?;
    let mut out = Vec::new();
    let mut current = vec![1u8; n];
    // odometer over {1..=t+1}^n where t+1 encodes v
    loop {
        if current.contains(&(t + 1)) {
            let letters = current.iter().map(|&l| (l <= t).then_some(l)).collect();
            out.push(VariableWord(letters));
        }
        let Some(pos) = current.iter().rposition(|&l| l <= t) else { break };
        current[pos] += 1;
        current[pos + 1..].iter_mut().for_each(|l| *l = 1);
    }
    Ok(out)
}

/// Lines of `[t]^n` as lists of lexicographic word indices.
pub fn enumerate_lines(t: usize, n: usize) -> Result<Vec<Vec<usize>>, HjError> {
    let tt = check_alphabet(t)?;
    variable_words(t, n)?
        .iter()
        .map(|w| Ok(line_points(w, t)?.iter().map(|p| p.index(tt)).collect()))
        .collect()
}

/// `(t+1)^N − t^N`.
pub fn count_lines(t: u64, n: u32) -> BigInt {
    BigInt::from(t + 1).pow(n) - BigInt::from(t).pow(n)
}

/// A finite partial map from positions to letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LocatedWord<L: Ord> {
    pub letters: BTreeMap<u64, L>,
}

impl<L: Ord + Clone> LocatedWord<L> {
    pub fn new() -> Self {
        LocatedWord { letters: BTreeMap::new() }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, L)>) -> Self {
        LocatedWord { letters: pairs.into_iter().collect() }
    }

    pub fn domain(&self) -> BTreeSet<u64> {
        self.letters.keys().copied().collect()
    }

    /// `α ∪ β` for disjoint domains.
    pub fn union(&self, other: &Self) -> Result<Self, HjError> {
        let mut out = self.clone();
        for (&p, l) in &other.letters {
            if out.letters.insert(p, l.clone()).is_some() {
                return Err(HjError::DomainOverlap(p));
            }
        }
        Ok(out)
    }
}

/// All located words with domain inside `{1..dom_bound}`: each position is
/// either absent or carries one of the letters.
pub fn located_words<L: Ord + Clone>(alphabet: &[L], dom_bound: u64) -> Vec<LocatedWord<L>> {
    let mut out = vec![LocatedWord::new()];
    for p in 1..=dom_bound {
        let mut next = Vec::with_capacity(out.len() * (alphabet.len() + 1));
        for w in &out {
            next.push(w.clone());
            for l in alphabet {
                let mut x = w.clone();
                x.letters.insert(p, l.clone());
                next.push(x);
            }
        }
        out = next;
    }
    out
}

/// `{α ∪ (γ ∪ {t}) × {s} : t ∈ F, s ∈ 𝔸}`, with `t` in the outer loop.
pub fn beiglboeck_pattern<L: Ord + Clone>(
    alpha: &LocatedWord<L>,
    gamma: &BTreeSet<u64>,
    f: &BTreeSet<u64>,
    alphabet: &[L],
) -> Result<Vec<LocatedWord<L>>, HjError> {
    let dom = alpha.domain();
    if let Some(&p) = dom.intersection(gamma).chain(dom.intersection(f)).chain(gamma.intersection(f)).next() {
        return Err(HjError::DomainOverlap(p));
    }
    let mut out = Vec::with_capacity(f.len() * alphabet.len());
    for &t in f {
        for s in alphabet {
            let mut w = alpha.clone();
            for &p in gamma.iter().chain(std::iter::once(&t)) {
                w.letters.insert(p, s.clone());
            }
            out.push(w);
        }
    }
    Ok(out)
}

/// `⊛` over positions `t` repeated `α(t)` times. Letter 0 contributes the
/// identity, so it needs a unital context.
pub fn eval_word_star(ctx: &SymmetricContext, alpha: &LocatedWord<u64>) -> Result<BigInt, HjError> {
    if !ctx.is_unital() && (alpha.letters.is_empty() || alpha.letters.values().any(|&l| l == 0)) {
        return Err(SymmetricError::NonUnitalIdentity { l: ctx.l(), k: ctx.k() }.into());
    }
    let mut image = BigInt::one();
    for (&t, &letter) in &alpha.letters {
        let exp = u32::try_from(letter).map_err(|_| SymmetricError::ExponentTooLarge(letter.to_string()))?;
        image *= ctx.image(&BigInt::from(t)).pow(exp);
    }
    Ok(ctx.preimage(&image).expect("products of images stay in lℤ + k"))
}

/// A point of `Q(N) = [q]^N × [q]^{N×N} × ⋯ × [q]^{N^d}`; component `i`
/// (0-based) has `N^{i+1}` coordinates in lexicographic tuple order.
pub type GridPoint = Vec<Vec<u8>>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhjPattern {
    pub q: u8,
    pub n: usize,
    pub d: usize,
    /// Positions in `{1..N}`.
    pub gamma: BTreeSet<usize>,
    pub base: GridPoint,
}

impl PhjPattern {
    /// Pattern with every base coordinate set to 1.
    pub fn with_constant_base(q: u8, n: usize, d: usize, gamma: BTreeSet<usize>) -> Result<Self, HjError> {
        let base = (1..=d as u32).map(|i| vec![1u8; n.pow(i)]).collect();
        let p = PhjPattern { q, n, d, gamma, base };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), HjError> {
        let bad = |m: &str| Err(HjError::Pattern(m.to_string()));
        if self.d == 0 || self.q == 0 || self.n == 0 {
            return bad("q, N and d must be at least 1");
        }
        if self.gamma.is_empty() || self.gamma.iter().any(|&g| g == 0 || g > self.n) {
            return bad("gamma must be a nonempty subset of 1..=N");
        }
        if self.base.len() != self.d {
            return bad("base point needs one component per dimension");
        }
        for (i, component) in self.base.iter().enumerate() {
            if component.len() != self.n.pow(i as u32 + 1) {
                return bad("component i must have N^i coordinates");
            }
            if component.iter().any(|&x| x == 0 || x > self.q) {
                return bad("coordinates must lie in 1..=q");
            }
        }
        Ok(())
    }
}

/// Lexicographic indices of the tuples in `γ^i` inside `[N]^i`.
fn block_indices(gamma: &BTreeSet<usize>, n: usize, i: usize) -> Vec<usize> {
    let mut out = vec![0usize];
    for _ in 0..i {
        out = out.iter().flat_map(|&acc| gamma.iter().map(move |&g| acc * n + (g - 1))).collect();
    }
    out
}

/// `a ⊕ x₁γ ⊕ x₂(γ×γ) ⊕ ⋯ ⊕ x_d γ^d` for `x ∈ [q]^d` in lexicographic order,
/// where `⊕ x_i γ^i` overwrites the `γ^i` block of component `i` with `x_i`.
pub fn phj_points(p: &PhjPattern) -> Result<Vec<GridPoint>, HjError> {
    p.validate()?;
    let blocks: Vec<Vec<usize>> = (1..=p.d).map(|i| block_indices(&p.gamma, p.n, i)).collect();
    let mut out = Vec::new();
    let mut x = vec![1u8; p.d];
    loop {
        let mut point = p.base.clone();
        for (i, block) in blocks.iter().enumerate() {
            for &idx in block {
                point[i][idx] = x[i];
            }
        }
        out.push(point);
        let Some(pos) = x.iter().rposition(|&v| v < p.q) else { break };
        x[pos] += 1;
        x[pos + 1..].iter_mut().for_each(|v| *v = 1);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HjOutcome {
    Found(usize),
    Unknown(usize),
    BudgetExhausted(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HjStep {
    pub n: usize,
    pub regular: Option<bool>,
    pub nodes: u64,
    /// Avoiding coloring of `[t]^n`, indexed lexicographically.
    pub avoider: Option<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HjReport {
    pub outcome: HjOutcome,
    pub steps: Vec<HjStep>,
}

/// Least `N ≤ n_max` such that every r-coloring of `[t]^N` has a
/// monochromatic combinatorial line.
pub fn hj_number(t: usize, r: usize, n_max: usize, budget: &SearchBudget) -> Result<HjReport, HjError> {
    check_alphabet(t)?;
    let deadline = budget.time_limit.map(|d| Instant::now() + d);
    let mut steps = Vec::new();
    for n in 1..=n_max {
        let words = (t as u128).checked_pow(n as u32).filter(|&w| w <= MAX_WORDS as u128);
        let Some(words) = words else { return Err(HjError::TooLarge(format!("{t}^{n}"))) };
        let graph = Hypergraph::new(
            words as usize,
            enumerate_lines(t, n)?.into_iter().map(|l| l.into_iter().map(|i| i as u32).collect()),
        );
        let config = SolverConfig {
            colors: r,
            symmetry: true,
            max_nodes: budget.max_nodes,
            deadline,
            workers: budget.workers.max(1),
            split_depth: budget.split_depth,
        };
        let (outcome, stats) = engine::solve(&graph, &config);
        let (regular, avoider) = match outcome {
            SolveOutcome::Uncolorable => (Some(true), None),
            SolveOutcome::Colorable(c) => (Some(false), Some(c)),
            SolveOutcome::NodeLimit | SolveOutcome::TimeLimit => (None, None),
        };
        steps.push(HjStep { n, regular, nodes: stats.nodes, avoider });
        match regular {
            Some(true) => return Ok(HjReport { outcome: HjOutcome::Found(n), steps }),
            Some(false) => {}
            None => return Ok(HjReport { outcome: HjOutcome::BudgetExhausted(n), steps }),
        }
    }
    Ok(HjReport { outcome: HjOutcome::Unknown(n_max), steps })
}
