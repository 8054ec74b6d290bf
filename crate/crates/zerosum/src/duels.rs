//! Dueling games: two players commit to combinatorial structures, nature
//! draws an element, and whoever serves that element better wins it.
//!
//! Three variants share one skeleton. In the ranking duel each player
//! permutes m pages and the lower position wins the searched page. In the
//! binary search tree duel each player arranges keys 1..m into a BST and
//! the smaller depth wins the searched key. In the matching duel each
//! player picks a perfect matching of a weighted graph and the
//! higher-weight matched edge wins the drawn node. All payoffs are
//! win-minus-loss probabilities, so every variant is skew-symmetric and
//! has value zero; the interest is in the maximin mixtures themselves.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::ratlp::{rat, Rational, Sense};
use crate::solver::{
    solve_bilinear, EquilibriumResult, MarginalVector, PayoffForm, PureVertex, SolveError,
    VertexOracle,
};

/// Exact perfect-matching search is exponential in nodes; keep it desk-sized.
pub const MAX_MATCHING_NODES: usize = 20;

#[derive(Debug, Error)]
pub enum DuelError {
    #[error("element probabilities must be nonempty, nonnegative, and sum to 1")]
    BadDistribution,
    #[error("expected {expected} element probabilities, got {got}")]
    WrongElementCount { expected: usize, got: usize },
    #[error("cost table must be square and nonempty: got {rows} rows, row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("graph edge ({a}, {b}) is invalid: {reason}")]
    BadEdge { a: usize, b: usize, reason: &'static str },
    #[error("expected {expected} edge costs, got {got}")]
    WrongEdgeCount { expected: usize, got: usize },
    #[error("the graph has no perfect matching")]
    NoPerfectMatching,
    #[error("{nodes} nodes exceed the exact-matching cap of {MAX_MATCHING_NODES}")]
    TooManyNodes { nodes: usize },
    #[error("invalid vertex: {0}")]
    BadVertex(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

fn validate_distribution(p: &[Rational]) -> Result<(), DuelError> {
    if p.is_empty() || p.iter().any(|x| x.is_negative()) {
        return Err(DuelError::BadDistribution);
    }
    if p.iter().cloned().sum::<Rational>() != rat(1) {
        return Err(DuelError::BadDistribution);
    }
    Ok(())
}

fn validate_square(table: &[Vec<Rational>]) -> Result<usize, DuelError> {
    let rows = table.len();
    if rows == 0 {
        return Err(DuelError::NotSquare { rows: 0, row: 0, cols: 0 });
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != rows {
            return Err(DuelError::NotSquare { rows, row, cols: r.len() });
        }
    }
    Ok(rows)
}

/// A simple undirected graph with rational edge weights, nodes 0..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingGraph {
    nodes: usize,
    edges: Vec<(usize, usize)>,
    weights: Vec<Rational>,
}

impl MatchingGraph {
    /// Validates simplicity: endpoints in range, no loops, no parallel
    /// edges. Edge endpoints are normalized to (min, max).
    pub fn new(
        nodes: usize,
        edges: Vec<((usize, usize), Rational)>,
    ) -> Result<Self, DuelError> {
        let mut seen = std::collections::HashSet::new();
        let mut pairs = Vec::with_capacity(edges.len());
        let mut weights = Vec::with_capacity(edges.len());
        for ((a, b), w) in edges {
            if a >= nodes || b >= nodes {
                return Err(DuelError::BadEdge { a, b, reason: "endpoint out of range" });
            }
            if a == b {
                return Err(DuelError::BadEdge { a, b, reason: "self-loop" });
            }
            let e = (a.min(b), a.max(b));
            if !seen.insert(e) {
                return Err(DuelError::BadEdge { a, b, reason: "duplicate edge" });
            }
            pairs.push(e);
            weights.push(w);
        }
        Ok(Self { nodes, edges: pairs, weights })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Edges as (min, max) pairs, in input order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.nodes];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        adj
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DuelKind {
    Ranking,
    Bst,
    Matching,
}

/// A validated duel instance: a variant, the element distribution, and for
/// the matching variant the graph being matched.
#[derive(Debug, Clone)]
pub struct DuelSpec {
    kind: DuelKind,
    p: Vec<Rational>,
    graph: Option<MatchingGraph>,
}

impl DuelSpec {
    /// Ranking duel over m = p.len() pages.
    pub fn ranking(p: Vec<Rational>) -> Result<Self, DuelError> {
        validate_distribution(&p)?;
        Ok(Self { kind: DuelKind::Ranking, p, graph: None })
    }

    /// Binary search tree duel over m = p.len() keys.
    pub fn bst(p: Vec<Rational>) -> Result<Self, DuelError> {
        validate_distribution(&p)?;
        Ok(Self { kind: DuelKind::Bst, p, graph: None })
    }

    /// Matching duel: p is per node, and the graph must admit a perfect
    /// matching within the exact-search size cap.
    pub fn matching(graph: MatchingGraph, p: Vec<Rational>) -> Result<Self, DuelError> {
        validate_distribution(&p)?;
        if p.len() != graph.nodes {
            return Err(DuelError::WrongElementCount { expected: graph.nodes, got: p.len() });
        }
        // The oracle construction proves a perfect matching exists.
        MatchingOracle::new(&graph)?;
        Ok(Self { kind: DuelKind::Matching, p, graph: Some(graph) })
    }

    pub fn kind(&self) -> DuelKind {
        self.kind
    }

    /// Element probabilities: per page, key, or node.
    pub fn probabilities(&self) -> &[Rational] {
        &self.p
    }

    pub fn graph(&self) -> Option<&MatchingGraph> {
        self.graph.as_ref()
    }
}

/// A permutation of m pages; `positions()[i]` is where page i is ranked,
/// with position 0 ranked first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankingVertex {
    positions: Vec<usize>,
}

impl RankingVertex {
    pub fn new(positions: Vec<usize>) -> Result<Self, DuelError> {
        let m = positions.len();
        let mut hit = vec![false; m];
        for &j in &positions {
            if j >= m || hit[j] {
                return Err(DuelError::BadVertex("positions must be a permutation".into()));
            }
            hit[j] = true;
        }
        if m == 0 {
            return Err(DuelError::BadVertex("empty permutation".into()));
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// One-hot page-by-position marginal, row-major with m positions.
    pub fn marginal(&self) -> MarginalVector {
        let m = self.positions.len();
        let mut entries = vec![Rational::zero(); m * m];
        for (i, &j) in self.positions.iter().enumerate() {
            entries[i * m + j] = rat(1);
        }
        MarginalVector::new(entries)
    }
}

/// A binary search tree over keys 0..m, stored as its depth vector:
/// `depths()[i]` is the depth of key i, the root having depth 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BstVertex {
    depths: Vec<usize>,
}

impl BstVertex {
    /// Accepts exactly the depth vectors realized by binary search trees in
    /// key order: each key interval has a unique shallowest element and its
    /// sides nest underneath recursively.
    pub fn new(depths: Vec<usize>) -> Result<Self, DuelError> {
        let m = depths.len();
        if m == 0 {
            return Err(DuelError::BadVertex("empty depth vector".into()));
        }
        fn check(depths: &[usize], lo: usize, hi: usize, k: usize) -> bool {
            if lo > hi {
                return true;
            }
            let Some(root) = (lo..=hi).find(|&i| depths[i] == k) else {
                return false;
            };
            if (root + 1..=hi).any(|i| depths[i] == k) {
                return false;
            }
            (root == lo || check(depths, lo, root - 1, k + 1))
                && (root == hi || check(depths, root + 1, hi, k + 1))
        }
        if depths.iter().any(|&d| d < 1 || d > m) || !check(&depths, 0, m - 1, 1) {
            return Err(DuelError::BadVertex("depths do not describe a search tree".into()));
        }
        Ok(Self { depths })
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    /// One-hot key-by-depth marginal, row-major with depths 1..m mapped to
    /// columns 0..m-1.
    pub fn marginal(&self) -> MarginalVector {
        let m = self.depths.len();
        let mut entries = vec![Rational::zero(); m * m];
        for (i, &d) in self.depths.iter().enumerate() {
            entries[i * m + (d - 1)] = rat(1);
        }
        MarginalVector::new(entries)
    }
}

/// A perfect matching, stored as sorted indices into the graph's edge list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingVertex {
    edges: Vec<usize>,
    edge_count: usize,
}

impl MatchingVertex {
    pub fn new(graph: &MatchingGraph, mut edges: Vec<usize>) -> Result<Self, DuelError> {
        edges.sort_unstable();
        edges.dedup();
        let mut covered = vec![false; graph.nodes];
        for &e in &edges {
            let Some(&(a, b)) = graph.edges.get(e) else {
                return Err(DuelError::BadVertex(format!("edge index {e} out of range")));
            };
            if covered[a] || covered[b] {
                return Err(DuelError::BadVertex(format!("node covered twice by edge {e}")));
            }
            covered[a] = true;
            covered[b] = true;
        }
        if covered.iter().any(|c| !c) {
            return Err(DuelError::BadVertex("not a perfect matching".into()));
        }
        Ok(Self { edges, edge_count: graph.edges.len() })
    }

    /// Sorted indices into the graph's edge list.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// One-hot edge-indicator marginal over the graph's edge list.
    pub fn marginal(&self) -> MarginalVector {
        let mut entries = vec![Rational::zero(); self.edge_count];
        for &e in &self.edges {
            entries[e] = rat(1);
        }
        MarginalVector::new(entries)
    }
}

/// Minimum-cost assignment of m rows to m columns by shortest augmenting
/// paths with exact rational potentials. Returns the column chosen for each
/// row.
fn assignment_min(cost: &[Vec<Rational>]) -> Vec<usize> {
    let n = cost.len();
    // 1-based working arrays; index 0 is the virtual unmatched column.
    let mut u = vec![Rational::zero(); n + 1];
    let mut v = vec![Rational::zero(); n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut minv: Vec<Option<Rational>> = vec![None; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta: Option<(Rational, usize)> = None;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = &cost[i0 - 1][j - 1] - &u[i0] - &v[j];
                if minv[j].as_ref().is_none_or(|m| &cur < m) {
                    minv[j] = Some(cur);
                    way[j] = j0;
                }
                let reach = minv[j].as_ref().expect("set above or on an earlier pass");
                if delta.as_ref().is_none_or(|(d, _)| reach < d) {
                    delta = Some((reach.clone(), j));
                }
            }
            let (d, j1) = delta.expect("an unmatched column is always reachable");
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += &d;
                    v[j] -= &d;
                } else if let Some(m) = minv[j].as_mut() {
                    *m -= &d;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        // Augment along the recorded alternating path.
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut positions = vec![0usize; n];
    for j in 1..=n {
        positions[matched_row[j] - 1] = j - 1;
    }
    positions
}

/// The permutation optimizing sum of alpha[i][position(i)], exactly.
pub fn ranking_oracle(
    alpha: &[Vec<Rational>],
    sense: Sense,
) -> Result<RankingVertex, DuelError> {
    validate_square(alpha)?;
    let positions = match sense {
        Sense::Minimize => assignment_min(alpha),
        Sense::Maximize => {
            let negated: Vec<Vec<Rational>> =
                alpha.iter().map(|r| r.iter().map(|e| -e).collect()).collect();
            assignment_min(&negated)
        }
    };
    Ok(RankingVertex { positions })
}

/// The search tree optimizing sum of alpha[i][depth(i) - 1] by interval
/// dynamic programming; ties go to the smallest root key at every level.
pub fn bst_oracle(alpha: &[Vec<Rational>], sense: Sense) -> Result<BstVertex, DuelError> {
    let m = validate_square(alpha)?;
    // dp[(a, b, k)]: best total for keys a..=b as a subtree rooted at
    // depth k, with the chosen root. k stays within 1..=m-(b-a).
    let idx = |a: usize, b: usize, k: usize| (a * m + b) * m + (k - 1);
    let mut dp: Vec<Option<(Rational, usize)>> = vec![None; m * m * m];
    for len in 1..=m {
        for a in 0..=(m - len) {
            let b = a + len - 1;
            for k in 1..=(m - len + 1) {
                let mut best: Option<(Rational, usize)> = None;
                for c in a..=b {
                    let mut val = alpha[c][k - 1].clone();
                    if c > a {
                        val += &dp[idx(a, c - 1, k + 1)].as_ref().expect("shorter interval").0;
                    }
                    if c < b {
                        val += &dp[idx(c + 1, b, k + 1)].as_ref().expect("shorter interval").0;
                    }
                    let better = match &best {
                        None => true,
                        Some((cur, _)) => match sense {
                            Sense::Minimize => val < *cur,
                            Sense::Maximize => val > *cur,
                        },
                    };
                    if better {
                        best = Some((val, c));
                    }
                }
                dp[idx(a, b, k)] = best;
            }
        }
    }
    let mut depths = vec![0usize; m];
    let mut intervals = vec![(0usize, m - 1, 1usize)];
    while let Some((a, b, k)) = intervals.pop() {
        let &(_, c) = dp[idx(a, b, k)].as_ref().expect("filled for every interval");
        depths[c] = k;
        if c > a {
            intervals.push((a, c - 1, k + 1));
        }
        if c < b {
            intervals.push((c + 1, b, k + 1));
        }
    }
    Ok(BstVertex { depths })
}

/// Memoized search over node subsets: the best score for perfectly matching
/// the nodes outside `mask`, always extending from the lowest unmatched
/// node. Sound for arbitrary masks, so it also powers reconstruction.
struct MatchSearch<'a> {
    adj: &'a [Vec<(usize, usize)>],
    score: &'a [Rational],
    full: u32,
    memo: HashMap<u32, Option<Rational>>,
}

impl MatchSearch<'_> {
    fn best(&mut self, mask: u32) -> Option<Rational> {
        if mask == self.full {
            return Some(Rational::zero());
        }
        if let Some(hit) = self.memo.get(&mask) {
            return hit.clone();
        }
        let low = (!mask).trailing_zeros() as usize;
        let mut best: Option<Rational> = None;
        for t in 0..self.adj[low].len() {
            let (other, e) = self.adj[low][t];
            if mask & (1 << other) != 0 {
                continue;
            }
            if let Some(rest) = self.best(mask | (1 << low) | (1 << other)) {
                let val = &self.score[e] + rest;
                if best.as_ref().is_none_or(|b| &val > b) {
                    best = Some(val);
                }
            }
        }
        self.memo.insert(mask, best.clone());
        best
    }
}

fn lex_min_optimal_matching(
    graph: &MatchingGraph,
    score: &[Rational],
) -> Result<Vec<usize>, DuelError> {
    let n = graph.nodes;
    if n > MAX_MATCHING_NODES {
        return Err(DuelError::TooManyNodes { nodes: n });
    }
    let adj = graph.adjacency();
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut search = MatchSearch { adj: &adj, score, full, memo: HashMap::new() };
    let Some(total) = search.best(0) else {
        return Err(DuelError::NoPerfectMatching);
    };

    // Greedy reconstruction: repeatedly commit the smallest-indexed edge
    // that still permits the optimal score. Chosen indices come out
    // increasing, which makes the result the lexicographically smallest
    // optimal edge set.
    let mut mask = 0u32;
    let mut target = total;
    let mut chosen = Vec::with_capacity(n / 2);
    while mask != full {
        let pick = (0..graph.edges.len())
            .find(|&e| {
                let (a, b) = graph.edges[e];
                if mask & (1 << a) != 0 || mask & (1 << b) != 0 {
                    return false;
                }
                search
                    .best(mask | (1 << a) | (1 << b))
                    .is_some_and(|rest| &score[e] + rest == target)
            })
            .expect("an optimal matching extends every prefix of itself");
        let (a, b) = graph.edges[pick];
        target -= &score[pick];
        mask |= (1 << a) | (1 << b);
        chosen.push(pick);
    }
    Ok(chosen)
}

/// The perfect matching optimizing total edge cost; exact subset search,
/// ties broken toward the lexicographically smallest edge-index set.
pub fn matching_oracle(
    graph: &MatchingGraph,
    alpha: &[Rational],
    sense: Sense,
) -> Result<MatchingVertex, DuelError> {
    if alpha.len() != graph.edges.len() {
        return Err(DuelError::WrongEdgeCount { expected: graph.edges.len(), got: alpha.len() });
    }
    let negated: Vec<Rational>;
    let score: &[Rational] = match sense {
        Sense::Maximize => alpha,
        Sense::Minimize => {
            negated = alpha.iter().map(|e| -e).collect();
            &negated
        }
    };
    let edges = lex_min_optimal_matching(graph, score)?;
    Ok(MatchingVertex { edges, edge_count: graph.edges.len() })
}

/// Shared payoff form for the ranking and BST duels: marginals are m x m
/// element-by-level tables and the lower level wins each element.
#[derive(Debug, Clone)]
pub struct PositionalDuelPayoff<'a> {
    p: &'a [Rational],
    m: usize,
}

pub fn positional_duel_payoff_form(p: &[Rational]) -> Result<PositionalDuelPayoff<'_>, DuelError> {
    validate_distribution(p)?;
    Ok(PositionalDuelPayoff { p, m: p.len() })
}

impl PositionalDuelPayoff<'_> {
    /// Per-element cost against the opponent's aggregated level profile:
    /// mass strictly below beats us, mass strictly above loses to us. The
    /// `flip` picks whose perspective the costs are priced in.
    fn level_costs(&self, other: &MarginalVector, flip: bool) -> Vec<Rational> {
        let m = self.m;
        let mut out = vec![Rational::zero(); m * m];
        for (i, pi) in self.p.iter().enumerate() {
            if pi.is_zero() {
                continue;
            }
            let row = &other.entries[i * m..(i + 1) * m];
            let total: Rational = row.iter().cloned().sum();
            let mut below = Rational::zero();
            for (level, weight) in row.iter().enumerate() {
                let above = &total - &below - weight;
                let margin = &below - &above;
                out[i * m + level] = if flip { pi * -margin } else { pi * margin };
                below += weight;
            }
        }
        out
    }
}

impl PayoffForm for PositionalDuelPayoff<'_> {
    fn dim_a(&self) -> usize {
        self.m * self.m
    }

    fn dim_b(&self) -> usize {
        self.m * self.m
    }

    fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational> {
        self.level_costs(x, false)
    }

    fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational> {
        self.level_costs(y, true)
    }

    fn abs_sum(&self) -> Rational {
        // Each element contributes p_i for every ordered pair of distinct
        // levels, and the p_i sum to 1.
        rat((self.m * (self.m - 1)) as i64)
    }
}

/// Payoff form for the matching duel: marginals are edge indicators and a
/// node is won by whichever matching covers it with the heavier edge.
#[derive(Debug, Clone)]
pub struct MatchingDuelPayoff<'a> {
    graph: &'a MatchingGraph,
    p: &'a [Rational],
    abs: Rational,
}

/// Marginal-space payoff entry: the probability mass on nodes shared by
/// the two edges, signed by which edge is heavier.
fn matching_entry(graph: &MatchingGraph, p: &[Rational], e1: usize, e2: usize) -> Rational {
    let sign = match graph.weights[e1].cmp(&graph.weights[e2]) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => return Rational::zero(),
    };
    let (a1, b1) = graph.edges[e1];
    let (a2, b2) = graph.edges[e2];
    let mut shared = Rational::zero();
    for node in [a1, b1] {
        if node == a2 || node == b2 {
            shared += &p[node];
        }
    }
    shared * rat(sign)
}

pub fn matching_duel_payoff_form<'a>(
    graph: &'a MatchingGraph,
    p: &'a [Rational],
) -> Result<MatchingDuelPayoff<'a>, DuelError> {
    validate_distribution(p)?;
    if p.len() != graph.nodes {
        return Err(DuelError::WrongElementCount { expected: graph.nodes, got: p.len() });
    }
    let mut abs = Rational::zero();
    for e1 in 0..graph.edges.len() {
        for e2 in 0..graph.edges.len() {
            abs += matching_entry(graph, p, e1, e2).abs();
        }
    }
    Ok(MatchingDuelPayoff { graph, p, abs })
}

impl PayoffForm for MatchingDuelPayoff<'_> {
    fn dim_a(&self) -> usize {
        self.graph.edges.len()
    }

    fn dim_b(&self) -> usize {
        self.graph.edges.len()
    }

    fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational> {
        (0..self.graph.edges.len())
            .map(|e2| {
                x.entries
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(e1, w)| w * matching_entry(self.graph, self.p, e1, e2))
                    .sum()
            })
            .collect()
    }

    fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational> {
        (0..self.graph.edges.len())
            .map(|e1| {
                y.entries
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(e2, w)| w * matching_entry(self.graph, self.p, e1, e2))
                    .sum()
            })
            .collect()
    }

    fn abs_sum(&self) -> Rational {
        self.abs.clone()
    }
}

/// The payoff form for any duel variant, over that variant's marginal
/// space.
#[derive(Debug, Clone)]
pub enum DuelPayoff<'a> {
    Positional(PositionalDuelPayoff<'a>),
    Matching(MatchingDuelPayoff<'a>),
}

pub fn duel_payoff_form(spec: &DuelSpec) -> DuelPayoff<'_> {
    match spec.kind {
        DuelKind::Ranking | DuelKind::Bst => DuelPayoff::Positional(
            positional_duel_payoff_form(&spec.p).expect("spec was validated"),
        ),
        DuelKind::Matching => {
            let graph = spec.graph.as_ref().expect("matching specs carry a graph");
            DuelPayoff::Matching(
                matching_duel_payoff_form(graph, &spec.p).expect("spec was validated"),
            )
        }
    }
}

impl PayoffForm for DuelPayoff<'_> {
    fn dim_a(&self) -> usize {
        match self {
            DuelPayoff::Positional(f) => f.dim_a(),
            DuelPayoff::Matching(f) => f.dim_a(),
        }
    }

    fn dim_b(&self) -> usize {
        match self {
            DuelPayoff::Positional(f) => f.dim_b(),
            DuelPayoff::Matching(f) => f.dim_b(),
        }
    }

    fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational> {
        match self {
            DuelPayoff::Positional(f) => f.costs_for_b(x),
            DuelPayoff::Matching(f) => f.costs_for_b(x),
        }
    }

    fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational> {
        match self {
            DuelPayoff::Positional(f) => f.costs_for_a(y),
            DuelPayoff::Matching(f) => f.costs_for_a(y),
        }
    }

    fn abs_sum(&self) -> Rational {
        match self {
            DuelPayoff::Positional(f) => f.abs_sum(),
            DuelPayoff::Matching(f) => f.abs_sum(),
        }
    }
}

/// Best-response oracle for the ranking duel: costs are read as an m x m
/// page-by-position table and optimized by exact assignment.
#[derive(Debug, Clone, Copy)]
pub struct RankingOracle {
    m: usize,
}

impl RankingOracle {
    pub fn new(m: usize) -> Self {
        Self { m }
    }
}

fn costs_as_table(costs: &[Rational], m: usize) -> Vec<Vec<Rational>> {
    costs.chunks(m).map(|row| row.to_vec()).collect()
}

impl VertexOracle for RankingOracle {
    type Strategy = RankingVertex;

    fn dimension(&self) -> usize {
        self.m * self.m
    }

    fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<RankingVertex> {
        let table = costs_as_table(costs, self.m);
        let vertex = ranking_oracle(&table, sense).expect("table is square by construction");
        let marginal = vertex.marginal();
        PureVertex { strategy: vertex, marginal }
    }
}

/// Best-response oracle for the BST duel: costs are read as an m x m
/// key-by-depth table and optimized by interval dynamic programming.
#[derive(Debug, Clone, Copy)]
pub struct BstOracle {
    m: usize,
}

impl BstOracle {
    pub fn new(m: usize) -> Self {
        Self { m }
    }
}

impl VertexOracle for BstOracle {
    type Strategy = BstVertex;

    fn dimension(&self) -> usize {
        self.m * self.m
    }

    fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<BstVertex> {
        let table = costs_as_table(costs, self.m);
        let vertex = bst_oracle(&table, sense).expect("table is square by construction");
        let marginal = vertex.marginal();
        PureVertex { strategy: vertex, marginal }
    }
}

/// Best-response oracle for the matching duel over a fixed graph.
#[derive(Debug, Clone)]
pub struct MatchingOracle {
    graph: MatchingGraph,
}

impl MatchingOracle {
    /// Fails if the graph is over the size cap or has no perfect matching.
    pub fn new(graph: &MatchingGraph) -> Result<Self, DuelError> {
        let probe = vec![Rational::zero(); graph.edges.len()];
        lex_min_optimal_matching(graph, &probe)?;
        Ok(Self { graph: graph.clone() })
    }
}

impl VertexOracle for MatchingOracle {
    type Strategy = MatchingVertex;

    fn dimension(&self) -> usize {
        self.graph.edges.len()
    }

    fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<MatchingVertex> {
        let vertex = matching_oracle(&self.graph, costs, sense)
            .expect("matchability was checked at construction");
        let marginal = vertex.marginal();
        PureVertex { strategy: vertex, marginal }
    }
}

/// Equilibrium of a duel, carrying the variant's vertex type.
#[derive(Debug, Clone)]
pub enum DuelEquilibrium {
    Ranking(EquilibriumResult<RankingVertex, RankingVertex>),
    Bst(EquilibriumResult<BstVertex, BstVertex>),
    Matching(EquilibriumResult<MatchingVertex, MatchingVertex>),
}

impl DuelEquilibrium {
    pub fn value(&self) -> &Rational {
        match self {
            DuelEquilibrium::Ranking(eq) => &eq.value,
            DuelEquilibrium::Bst(eq) => &eq.value,
            DuelEquilibrium::Matching(eq) => &eq.value,
        }
    }

    pub fn gaps(&self) -> (&Rational, &Rational) {
        match self {
            DuelEquilibrium::Ranking(eq) => (&eq.gap_a, &eq.gap_b),
            DuelEquilibrium::Bst(eq) => (&eq.gap_a, &eq.gap_b),
            DuelEquilibrium::Matching(eq) => (&eq.gap_a, &eq.gap_b),
        }
    }
}

/// Exact equilibrium of a duel. Both players share one strategy set and the
/// payoff is skew-symmetric, so the value is always exactly zero; the
/// returned mixtures are certified maximin strategies.
pub fn solve_duel(spec: &DuelSpec) -> Result<DuelEquilibrium, DuelError> {
    let payoff = duel_payoff_form(spec);
    let eq = match spec.kind {
        DuelKind::Ranking => {
            let oracle = RankingOracle::new(spec.p.len());
            DuelEquilibrium::Ranking(solve_bilinear(&oracle, &oracle, &payoff, rat(0))?)
        }
        DuelKind::Bst => {
            let oracle = BstOracle::new(spec.p.len());
            DuelEquilibrium::Bst(solve_bilinear(&oracle, &oracle, &payoff, rat(0))?)
        }
        DuelKind::Matching => {
            let graph = spec.graph.as_ref().expect("matching specs carry a graph");
            let oracle = MatchingOracle::new(graph)?;
            DuelEquilibrium::Matching(solve_bilinear(&oracle, &oracle, &payoff, rat(0))?)
        }
    };
    debug_assert!(eq.value().is_zero(), "skew-symmetric duels have value zero");
    Ok(eq)
}
