//! Colonel Blotto and Colonel Lotto games.
//!
//! In Colonel Blotto, each player splits an army across k ordered
//! battlefields; battlefield i pays A `u_i(x_i, y_i)` and the totals are
//! zero-sum. A pure strategy is a partition of the army, so the strategy
//! space is exponential in k, but its marginal image (one probability per
//! battlefield and troop count) has dimension k(m+1) and best responses
//! reduce to a knapsack-style DP over battlefields. Colonel Lotto is the
//! symmetric variant where one corps from each side meets at random; only
//! the multiset of corps sizes matters, so it is solved in the smaller
//! aggregated marginal space with one probability per corps size.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::ratlp::{rat, Rational, Sense};
use crate::solver::{
    solve_bilinear, EquilibriumResult, MarginalVector, PayoffForm, PureVertex, SolveError,
    VertexOracle,
};

/// A Colonel Blotto instance: army sizes, battlefield count, and one payoff
/// matrix per battlefield.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlottoSpec {
    a: usize,
    b: usize,
    k: usize,
    payoffs: Vec<Vec<Vec<Rational>>>,
}

/// A Colonel Lotto instance: like Blotto but battlefields are exchangeable,
/// so a single payoff matrix is shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LottoSpec {
    a: usize,
    b: usize,
    k: usize,
    payoff: Vec<Vec<Rational>>,
}

#[derive(Debug, Error)]
pub enum BlottoError {
    #[error("need at least one battlefield")]
    NoBattlefields,
    #[error("expected {expected} payoff matrices, got {got}")]
    MatrixCount { got: usize, expected: usize },
    #[error("payoff matrix {index} must be {rows} rows of {cols} entries")]
    MatrixShape { index: usize, rows: usize, cols: usize },
}

fn check_matrix(
    m: &[Vec<Rational>],
    index: usize,
    rows: usize,
    cols: usize,
) -> Result<(), BlottoError> {
    if m.len() != rows || m.iter().any(|r| r.len() != cols) {
        return Err(BlottoError::MatrixShape { index, rows, cols });
    }
    Ok(())
}

fn sign_matrix(a: usize, b: usize) -> Vec<Vec<Rational>> {
    (0..=a)
        .map(|ta| (0..=b).map(|tb| rat((ta > tb) as i64 - (ta < tb) as i64)).collect())
        .collect()
}

impl BlottoSpec {
    /// Validates that there are k payoff matrices of shape (a+1) x (b+1).
    pub fn new(
        a: usize,
        b: usize,
        k: usize,
        payoffs: Vec<Vec<Vec<Rational>>>,
    ) -> Result<Self, BlottoError> {
        if k == 0 {
            return Err(BlottoError::NoBattlefields);
        }
        if payoffs.len() != k {
            return Err(BlottoError::MatrixCount { got: payoffs.len(), expected: k });
        }
        for (i, m) in payoffs.iter().enumerate() {
            check_matrix(m, i, a + 1, b + 1)?;
        }
        Ok(Self { a, b, k, payoffs })
    }

    /// The classic majority rule: battlefield i pays sign(x_i - y_i).
    pub fn sign(a: usize, b: usize, k: usize) -> Result<Self, BlottoError> {
        Self::new(a, b, k, vec![sign_matrix(a, b); k.max(1)])
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Payoff matrices indexed [battlefield][troops_a][troops_b].
    pub fn payoffs(&self) -> &[Vec<Vec<Rational>>] {
        &self.payoffs
    }
}

impl LottoSpec {
    pub fn new(
        a: usize,
        b: usize,
        k: usize,
        payoff: Vec<Vec<Rational>>,
    ) -> Result<Self, BlottoError> {
        if k == 0 {
            return Err(BlottoError::NoBattlefields);
        }
        check_matrix(&payoff, 0, a + 1, b + 1)?;
        Ok(Self { a, b, k, payoff })
    }

    pub fn sign(a: usize, b: usize, k: usize) -> Result<Self, BlottoError> {
        Self::new(a, b, k, sign_matrix(a, b))
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Payoff matrix indexed [troops_a][troops_b].
    pub fn payoff(&self) -> &[Vec<Rational>] {
        &self.payoff
    }
}

/// An ordered split of an army over battlefields.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TroopPartition {
    pub allocations: Vec<usize>,
}

impl TroopPartition {
    pub fn new(allocations: Vec<usize>) -> Self {
        Self { allocations }
    }

    pub fn total(&self) -> usize {
        self.allocations.iter().sum()
    }
}

/// Position of (battlefield i, troop count j) in the marginal layout:
/// battlefield blocks of m+1 slots each.
///
/// Panics if `j > m`; a battlefield index beyond the layout's k shows up as
/// an out-of-bounds slice access at the use site.
pub fn marginal_index(i: usize, j: usize, m: usize) -> usize {
    assert!(j <= m, "troop count {j} exceeds army size {m}");
    i * (m + 1) + j
}

/// The exact best pure partition of m troops over k battlefields for
/// additive per-(battlefield, count) costs.
///
/// Runs the suffix DP best[t] = opt over t' of costs[i, t'] + best over the
/// remaining battlefields of t - t'. Ties break toward the smallest troop
/// count in the lowest-indexed battlefield, i.e. the lexicographically
/// smallest optimal partition, which keeps oracles deterministic.
///
/// Panics if k is zero or `costs` does not have exactly k(m+1) entries.
pub fn find_best_pure(m: usize, k: usize, costs: &[Rational], sense: Sense) -> TroopPartition {
    assert!(k >= 1, "need at least one battlefield");
    assert_eq!(costs.len(), k * (m + 1), "costs must have k*(m+1) entries");

    // dp[t] = best objective over battlefields i..k given t troops remain;
    // the last battlefield is forced to take the whole remainder.
    let mut dp: Vec<Rational> =
        (0..=m).map(|t| costs[marginal_index(k - 1, t, m)].clone()).collect();
    let mut choice = vec![vec![0usize; m + 1]; k - 1];
    for i in (0..k - 1).rev() {
        let mut next = Vec::with_capacity(m + 1);
        for t in 0..=m {
            let mut best_split = 0;
            let mut best = &costs[marginal_index(i, 0, m)] + &dp[t];
            for split in 1..=t {
                let cand = &costs[marginal_index(i, split, m)] + &dp[t - split];
                let improves = match sense {
                    Sense::Minimize => cand < best,
                    Sense::Maximize => cand > best,
                };
                if improves {
                    best = cand;
                    best_split = split;
                }
            }
            choice[i][t] = best_split;
            next.push(best);
        }
        dp = next;
    }

    let mut allocations = Vec::with_capacity(k);
    let mut remaining = m;
    for row in &choice {
        let x = row[remaining];
        allocations.push(x);
        remaining -= x;
    }
    allocations.push(remaining);
    TroopPartition::new(allocations)
}

/// All partitions of m into k ordered nonnegative parts, lexicographically.
pub fn enumerate_partitions(m: usize, k: usize) -> Vec<TroopPartition> {
    assert!(k >= 1, "need at least one battlefield");
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(k);
    fn recurse(m: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<TroopPartition>) {
        if prefix.len() == k - 1 {
            prefix.push(m);
            out.push(TroopPartition::new(prefix.clone()));
            prefix.pop();
            return;
        }
        for x in 0..=m {
            prefix.push(x);
            recurse(m - x, k, prefix, out);
            prefix.pop();
        }
    }
    recurse(m, k, &mut prefix, &mut out);
    out
}

/// One-hot marginal image of a pure partition: entry (i, j) is 1 exactly
/// when battlefield i receives j troops.
///
/// Panics unless the partition is nonempty and sums to m.
pub fn pure_to_marginal(x: &TroopPartition, m: usize) -> MarginalVector {
    assert!(!x.allocations.is_empty(), "partition must not be empty");
    assert_eq!(x.total(), m, "partition must sum to the army size");
    let k = x.allocations.len();
    let mut entries = vec![Rational::zero(); k * (m + 1)];
    for (i, &xi) in x.allocations.iter().enumerate() {
        entries[marginal_index(i, xi, m)] = rat(1);
    }
    MarginalVector::new(entries)
}

/// Payoff to A when pure partitions meet: the sum of per-battlefield
/// entries.
///
/// Panics unless both partitions have k parts summing to the respective
/// army sizes.
pub fn blotto_payoff_pure(spec: &BlottoSpec, x: &TroopPartition, y: &TroopPartition) -> Rational {
    assert_eq!(x.allocations.len(), spec.k, "A partition must cover every battlefield");
    assert_eq!(y.allocations.len(), spec.k, "B partition must cover every battlefield");
    assert_eq!(x.total(), spec.a, "A partition must spend the whole army");
    assert_eq!(y.total(), spec.b, "B partition must spend the whole army");
    x.allocations
        .iter()
        .zip(&y.allocations)
        .zip(&spec.payoffs)
        .map(|((&xi, &yi), u)| u[xi][yi].clone())
        .sum()
}

/// Bilinear Blotto payoff over the k(a+1)- and k(b+1)-dimensional marginal
/// spaces; the implicit matrix is block-diagonal with the battlefield
/// payoff matrices as blocks.
#[derive(Debug, Clone)]
pub struct BlottoPayoff<'a> {
    spec: &'a BlottoSpec,
    abs: Rational,
}

pub fn blotto_payoff_form(spec: &BlottoSpec) -> BlottoPayoff<'_> {
    let abs = spec
        .payoffs
        .iter()
        .flat_map(|m| m.iter())
        .flat_map(|r| r.iter())
        .map(|e| e.abs())
        .sum();
    BlottoPayoff { spec, abs }
}

impl PayoffForm for BlottoPayoff<'_> {
    fn dim_a(&self) -> usize {
        self.spec.k * (self.spec.a + 1)
    }

    fn dim_b(&self) -> usize {
        self.spec.k * (self.spec.b + 1)
    }

    fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational> {
        let (a, b) = (self.spec.a, self.spec.b);
        let mut out = vec![Rational::zero(); self.dim_b()];
        for (i, u) in self.spec.payoffs.iter().enumerate() {
            for (ta, row) in u.iter().enumerate() {
                let w = &x.entries[marginal_index(i, ta, a)];
                if w.is_zero() {
                    continue;
                }
                for (tb, e) in row.iter().enumerate() {
                    if !e.is_zero() {
                        out[marginal_index(i, tb, b)] += w * e;
                    }
                }
            }
        }
        out
    }

    fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational> {
        let (a, b) = (self.spec.a, self.spec.b);
        let mut out = vec![Rational::zero(); self.dim_a()];
        for (i, u) in self.spec.payoffs.iter().enumerate() {
            for (ta, row) in u.iter().enumerate() {
                for (tb, e) in row.iter().enumerate() {
                    if e.is_zero() {
                        continue;
                    }
                    let w = &y.entries[marginal_index(i, tb, b)];
                    if !w.is_zero() {
                        out[marginal_index(i, ta, a)] += w * e;
                    }
                }
            }
        }
        out
    }

    fn abs_sum(&self) -> Rational {
        self.abs.clone()
    }
}

/// Best-response oracle over partitions of m across k battlefields.
#[derive(Debug, Clone, Copy)]
pub struct BlottoOracle {
    m: usize,
    k: usize,
}

impl BlottoOracle {
    pub fn new(m: usize, k: usize) -> Self {
        assert!(k >= 1, "need at least one battlefield");
        Self { m, k }
    }
}

impl VertexOracle for BlottoOracle {
    type Strategy = TroopPartition;

    fn dimension(&self) -> usize {
        self.k * (self.m + 1)
    }

    fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<TroopPartition> {
        let partition = find_best_pure(self.m, self.k, costs, sense);
        let marginal = pure_to_marginal(&partition, self.m);
        PureVertex { strategy: partition, marginal }
    }
}

/// Exact equilibrium of a Colonel Blotto game.
pub fn solve_blotto(
    spec: &BlottoSpec,
) -> Result<EquilibriumResult<TroopPartition, TroopPartition>, SolveError> {
    let oracle_a = BlottoOracle::new(spec.a, spec.k);
    let oracle_b = BlottoOracle::new(spec.b, spec.k);
    let payoff = blotto_payoff_form(spec);
    solve_bilinear(&oracle_a, &oracle_b, &payoff, rat(0))
}

/// Aggregated marginal of a partition for Colonel Lotto: entry v is the
/// fraction of corps with exactly v troops.
///
/// Panics unless the partition is nonempty and sums to m.
pub fn corps_marginal(x: &TroopPartition, m: usize) -> MarginalVector {
    assert!(!x.allocations.is_empty(), "partition must not be empty");
    assert_eq!(x.total(), m, "partition must sum to the army size");
    let k = x.allocations.len();
    let share = Rational::new(1.into(), (k as i64).into());
    let mut entries = vec![Rational::zero(); m + 1];
    for &xi in &x.allocations {
        entries[xi] += &share;
    }
    MarginalVector::new(entries)
}

/// Bilinear Colonel Lotto payoff over aggregated corps-size marginals;
/// the implicit matrix is the shared payoff matrix itself.
#[derive(Debug, Clone)]
pub struct ColonelLottoPayoff<'a> {
    spec: &'a LottoSpec,
    abs: Rational,
}

pub fn colonel_lotto_payoff_form(spec: &LottoSpec) -> ColonelLottoPayoff<'_> {
    let abs = spec.payoff.iter().flat_map(|r| r.iter()).map(|e| e.abs()).sum();
    ColonelLottoPayoff { spec, abs }
}

impl PayoffForm for ColonelLottoPayoff<'_> {
    fn dim_a(&self) -> usize {
        self.spec.a + 1
    }

    fn dim_b(&self) -> usize {
        self.spec.b + 1
    }

    fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational> {
        (0..=self.spec.b)
            .map(|w| {
                x.entries
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(v, p)| p * &self.spec.payoff[v][w])
                    .sum()
            })
            .collect()
    }

    fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational> {
        (0..=self.spec.a)
            .map(|v| {
                y.entries
                    .iter()
                    .enumerate()
                    .filter(|(_, q)| !q.is_zero())
                    .map(|(w, q)| &self.spec.payoff[v][w] * q)
                    .sum()
            })
            .collect()
    }

    fn abs_sum(&self) -> Rational {
        self.abs.clone()
    }
}

/// Best-response oracle in the aggregated corps-size space. Costs live on
/// corps sizes; replicating them across battlefields turns the problem into
/// the same partition DP used for Blotto.
#[derive(Debug, Clone, Copy)]
pub struct ColonelLottoOracle {
    m: usize,
    k: usize,
}

impl ColonelLottoOracle {
    pub fn new(m: usize, k: usize) -> Self {
        assert!(k >= 1, "need at least one battlefield");
        Self { m, k }
    }
}

impl VertexOracle for ColonelLottoOracle {
    type Strategy = TroopPartition;

    fn dimension(&self) -> usize {
        self.m + 1
    }

    fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<TroopPartition> {
        assert_eq!(costs.len(), self.m + 1, "costs must have m+1 entries");
        let mut replicated = Vec::with_capacity(self.k * (self.m + 1));
        for _ in 0..self.k {
            replicated.extend_from_slice(costs);
        }
        // The aggregated objective is (1/k) * sum of costs over corps, so
        // the replicated-cost partition optimum is the marginal optimum.
        let partition = find_best_pure(self.m, self.k, &replicated, sense);
        let marginal = corps_marginal(&partition, self.m);
        PureVertex { strategy: partition, marginal }
    }
}

/// Exact equilibrium of a Colonel Lotto game in aggregated marginal space.
pub fn solve_colonel_lotto(
    spec: &LottoSpec,
) -> Result<EquilibriumResult<TroopPartition, TroopPartition>, SolveError> {
    let oracle_a = ColonelLottoOracle::new(spec.a, spec.k);
    let oracle_b = ColonelLottoOracle::new(spec.b, spec.k);
    let payoff = colonel_lotto_payoff_form(spec);
    solve_bilinear(&oracle_a, &oracle_b, &payoff, rat(0))
}
