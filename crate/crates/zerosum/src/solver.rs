//! Equilibrium computation for zero-sum games with bilinear payoffs.
//!
//! A game is described by two [`VertexOracle`]s, one per player, exposing the
//! extreme points of each player's strategy polytope through linear
//! optimization, and a [`PayoffForm`] evaluating the bilinear payoff between
//! polytope points. [`solve_bilinear`] runs a double-oracle loop: solve the
//! matrix game restricted to the vertices discovered so far, ask each oracle
//! for a best response against the opponent's aggregate marginal, and stop
//! once neither response improves on the restricted value. Every quantity is
//! an exact rational, so the returned best-response gaps certify the
//! equilibrium with no tolerance fudge.

use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::ratlp::{
    lp_solve, matrix_game_solve, rat, Bounds, Constraint, LinearProgram, LpError, LpOutcome,
    Rational, Relation, Sense,
};

/// Which player a strategy or oracle belongs to. Player A maximizes the
/// payoff, player B minimizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::A => f.write_str("A"),
            Side::B => f.write_str("B"),
        }
    }
}

/// A point in a player's marginal space. The meaning of each coordinate is
/// fixed by the game module that produced it (for example, Blotto uses one
/// entry per battlefield and troop count).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalVector {
    pub entries: Vec<Rational>,
}

impl MarginalVector {
    pub fn new(entries: Vec<Rational>) -> Self {
        Self { entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { entries: vec![Rational::zero(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// Exact inner product with a cost vector of the same dimension.
    pub fn dot(&self, costs: &[Rational]) -> Rational {
        dot(costs, &self.entries)
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

/// A pure strategy together with its image in marginal space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureVertex<S> {
    pub strategy: S,
    pub marginal: MarginalVector,
}

/// A finitely supported probability distribution over pure strategies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy<S> {
    support: Vec<(PureVertex<S>, Rational)>,
}

impl<S> MixedStrategy<S> {
    /// Point mass on a single pure strategy.
    pub fn pure(vertex: PureVertex<S>) -> Self {
        Self { support: vec![(vertex, rat(1))] }
    }

    /// Builds a mixed strategy, checking that the weights are strictly
    /// positive and sum to exactly one and that the support marginals are
    /// pairwise distinct.
    pub fn new(support: Vec<(PureVertex<S>, Rational)>) -> Result<Self, SolveError> {
        if support.is_empty() {
            return Err(SolveError::InvalidMixture("empty support".into()));
        }
        let mut total = Rational::zero();
        for (i, (vertex, weight)) in support.iter().enumerate() {
            if !weight.is_positive() {
                return Err(SolveError::InvalidMixture(format!(
                    "weight {weight} of support entry {i} is not positive"
                )));
            }
            if vertex.marginal.dim() != support[0].0.marginal.dim() {
                return Err(SolveError::InvalidMixture(format!(
                    "support entry {i} has marginal dimension {} instead of {}",
                    vertex.marginal.dim(),
                    support[0].0.marginal.dim()
                )));
            }
            for (earlier, _) in &support[..i] {
                if earlier.marginal == vertex.marginal {
                    return Err(SolveError::InvalidMixture(format!(
                        "support entry {i} duplicates an earlier marginal"
                    )));
                }
            }
            total += weight;
        }
        if total != rat(1) {
            return Err(SolveError::InvalidMixture(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { support })
    }

    pub fn support(&self) -> &[(PureVertex<S>, Rational)] {
        &self.support
    }

    pub fn into_support(self) -> Vec<(PureVertex<S>, Rational)> {
        self.support
    }

    /// The aggregate marginal of the mixture.
    pub fn marginal(&self) -> MarginalVector {
        let dim = self.support[0].0.marginal.dim();
        let pairs: Vec<(&MarginalVector, &Rational)> =
            self.support.iter().map(|(v, w)| (&v.marginal, w)).collect();
        aggregate(dim, &pairs)
    }
}

fn aggregate(dim: usize, weighted: &[(&MarginalVector, &Rational)]) -> MarginalVector {
    let mut out = MarginalVector::zeros(dim);
    for (marginal, weight) in weighted {
        if weight.is_zero() {
            continue;
        }
        for (slot, entry) in out.entries.iter_mut().zip(&marginal.entries) {
            if !entry.is_zero() {
                *slot += *weight * entry;
            }
        }
    }
    out
}

/// Linear-optimization access to one player's strategy polytope.
///
/// Implementations must be exact and deterministic: `optimize(c, Minimize)`
/// returns a vertex achieving the true minimum of `c . m` over every vertex
/// marginal `m`, the same one for the same input every time, and must not
/// mutate shared state. The solver's termination and certificates rely on
/// this contract.
pub trait VertexOracle {
    type Strategy: Clone;

    /// Dimension of the marginal space.
    fn dimension(&self) -> usize;

    /// An optimal vertex for the given costs. `costs` has `dimension()`
    /// entries.
    fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<Self::Strategy>;
}

/// Bilinear payoff between the two marginal spaces: an implicit matrix M
/// with `eval(x, y) = x^T M y`, never materialized.
pub trait PayoffForm {
    fn dim_a(&self) -> usize;
    fn dim_b(&self) -> usize;

    /// The vector `x^T M`, so that `eval(x, y) = costs_for_b(x) . y`.
    fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational>;

    /// The vector `M y`, so that `eval(x, y) = costs_for_a(y) . x`.
    fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational>;

    /// Sum of |M_ij| over the implicit matrix; clamps oracle tolerances.
    fn abs_sum(&self) -> Rational;

    /// Payoff to player A when the players' marginals are x and y.
    fn eval(&self, x: &MarginalVector, y: &MarginalVector) -> Rational {
        dot(&self.costs_for_b(x), &y.entries)
    }
}

/// Iteration counts reported by [`solve_bilinear`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveStats {
    /// Restricted matrix games solved.
    pub iterations: usize,
    /// Final number of discovered vertices per player.
    pub vertices_a: usize,
    pub vertices_b: usize,
}

/// An equilibrium with its certificate.
#[derive(Debug, Clone)]
pub struct EquilibriumResult<SA, SB> {
    /// Game value: the payoff to player A under the returned strategies.
    pub value: Rational,
    pub strategy_a: MixedStrategy<SA>,
    pub strategy_b: MixedStrategy<SB>,
    /// How much player A could still gain by deviating; 0 in exact mode.
    pub gap_a: Rational,
    /// How much player B could still gain by deviating; 0 in exact mode.
    pub gap_b: Rational,
    pub stats: SolveStats,
}

/// Outcome of a membership test.
#[derive(Debug, Clone)]
pub enum Membership<S> {
    /// The point is in the polytope; carries an exact convex decomposition.
    Inside(MixedStrategy<S>),
    /// A hyperplane with `alpha0 + alpha . point < 0` and
    /// `alpha0 + alpha . v >= 0` for every vertex marginal v.
    Separator { alpha0: Rational, alpha: Vec<Rational> },
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("{context}: expected dimension {expected}, got {got}")]
    DimensionMismatch { context: &'static str, expected: usize, got: usize },
    #[error("tolerance must be nonnegative, got {0}")]
    NegativeTolerance(Rational),
    #[error("epsilon must be positive, got {0}")]
    NonpositiveEpsilon(Rational),
    #[error("invalid mixed strategy: {0}")]
    InvalidMixture(String),
    #[error("oracle contract violated: {0}")]
    BrokenOracle(String),
    #[error("membership test did not certify within {0} rounds")]
    RoundLimit(usize),
    #[error("point lies outside the strategy polytope")]
    OutsidePolytope { alpha0: Rational, alpha: Vec<Rational> },
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Computes an exact equilibrium of the bilinear game by double oracle.
///
/// Starting from one seed vertex per player, each round solves the matrix
/// game restricted to the discovered vertices, then asks each oracle to best
/// respond to the opponent's aggregate marginal. A response that beats the
/// restricted value by more than its share of `tol` is a new vertex (exact
/// arithmetic guarantees it cannot already be present) and is added;
/// otherwise the restricted equilibrium is exact and is returned together
/// with both best-response gaps. Terminates because each round either stops
/// or grows a finite vertex set.
pub fn solve_bilinear<OA, OB, P>(
    oracle_a: &OA,
    oracle_b: &OB,
    payoff: &P,
    tol: Rational,
) -> Result<EquilibriumResult<OA::Strategy, OB::Strategy>, SolveError>
where
    OA: VertexOracle,
    OB: VertexOracle,
    P: PayoffForm,
{
    if oracle_a.dimension() != payoff.dim_a() {
        return Err(SolveError::DimensionMismatch {
            context: "player A oracle vs payoff",
            expected: payoff.dim_a(),
            got: oracle_a.dimension(),
        });
    }
    if oracle_b.dimension() != payoff.dim_b() {
        return Err(SolveError::DimensionMismatch {
            context: "player B oracle vs payoff",
            expected: payoff.dim_b(),
            got: oracle_b.dimension(),
        });
    }
    if tol.is_negative() {
        return Err(SolveError::NegativeTolerance(tol));
    }

    let zero_a = vec![Rational::zero(); payoff.dim_a()];
    let zero_b = vec![Rational::zero(); payoff.dim_b()];
    let mut va = vec![oracle_a.optimize(&zero_a, Sense::Minimize)];
    let mut vb = vec![oracle_b.optimize(&zero_b, Sense::Minimize)];

    // Payoff matrix over va x vb, grown incrementally. b_costs[i] caches
    // costs_for_b of va[i] so a new column only needs one dot per row.
    let mut b_costs = vec![payoff.costs_for_b(&va[0].marginal)];
    let mut matrix = vec![vec![dot(&b_costs[0], &vb[0].marginal.entries)]];

    let mut iterations = 0;
    loop {
        iterations += 1;
        let restricted = matrix_game_solve(&matrix)?;
        let value = restricted.value;

        let x_pairs: Vec<(&MarginalVector, &Rational)> = va
            .iter()
            .zip(&restricted.row_strategy)
            .map(|(v, w)| (&v.marginal, w))
            .collect();
        let x_hat = aggregate(payoff.dim_a(), &x_pairs);
        let y_pairs: Vec<(&MarginalVector, &Rational)> = vb
            .iter()
            .zip(&restricted.col_strategy)
            .map(|(v, w)| (&v.marginal, w))
            .collect();
        let y_hat = aggregate(payoff.dim_b(), &y_pairs);

        let reply_costs_b = payoff.costs_for_b(&x_hat);
        let best_b = oracle_b.optimize(&reply_costs_b, Sense::Minimize);
        let reply_value_b = best_b.marginal.dot(&reply_costs_b);
        let gap_b = &value - &reply_value_b;

        let reply_costs_a = payoff.costs_for_a(&y_hat);
        let best_a = oracle_a.optimize(&reply_costs_a, Sense::Maximize);
        let reply_value_a = best_a.marginal.dot(&reply_costs_a);
        let gap_a = &reply_value_a - &value;

        if gap_a.is_negative() {
            return Err(SolveError::BrokenOracle(format!(
                "player A best response {reply_value_a} fell below the \
                 restricted value {value} it must dominate"
            )));
        }
        if gap_b.is_negative() {
            return Err(SolveError::BrokenOracle(format!(
                "player B best response {reply_value_b} exceeded the \
                 restricted value {value} it must undercut"
            )));
        }

        if &gap_a + &gap_b <= tol {
            let support_a = va
                .iter()
                .zip(&restricted.row_strategy)
                .filter(|(_, w)| w.is_positive())
                .map(|(v, w)| (v.clone(), w.clone()))
                .collect();
            let support_b = vb
                .iter()
                .zip(&restricted.col_strategy)
                .filter(|(_, w)| w.is_positive())
                .map(|(v, w)| (v.clone(), w.clone()))
                .collect();
            return Ok(EquilibriumResult {
                value,
                strategy_a: MixedStrategy::new(support_a)?,
                strategy_b: MixedStrategy::new(support_b)?,
                gap_a,
                gap_b,
                stats: SolveStats { iterations, vertices_a: va.len(), vertices_b: vb.len() },
            });
        }

        if gap_a.is_positive() {
            if va.iter().any(|v| v.marginal == best_a.marginal) {
                return Err(SolveError::BrokenOracle(
                    "player A oracle repeated a known vertex while claiming improvement".into(),
                ));
            }
            let costs = payoff.costs_for_b(&best_a.marginal);
            let row = vb.iter().map(|v| dot(&costs, &v.marginal.entries)).collect();
            matrix.push(row);
            b_costs.push(costs);
            va.push(best_a);
        }
        if gap_b.is_positive() {
            if vb.iter().any(|v| v.marginal == best_b.marginal) {
                return Err(SolveError::BrokenOracle(
                    "player B oracle repeated a known vertex while claiming improvement".into(),
                ));
            }
            for (row, costs) in matrix.iter_mut().zip(&b_costs) {
                row.push(dot(costs, &best_b.marginal.entries));
            }
            vb.push(best_b);
        }
    }
}

/// One player's exact best response to a fixed opponent marginal.
///
/// With `side == Side::B` the responder minimizes against the A-marginal
/// `opponent_marginal`; with `Side::A` it maximizes against a B-marginal.
/// Returns the responding vertex and the resulting payoff to player A.
pub fn best_response<O, P>(
    payoff: &P,
    oracle: &O,
    opponent_marginal: &MarginalVector,
    side: Side,
) -> Result<(PureVertex<O::Strategy>, Rational), SolveError>
where
    O: VertexOracle,
    P: PayoffForm,
{
    let (opponent_dim, responder_dim, sense) = match side {
        Side::B => (payoff.dim_a(), payoff.dim_b(), Sense::Minimize),
        Side::A => (payoff.dim_b(), payoff.dim_a(), Sense::Maximize),
    };
    if opponent_marginal.dim() != opponent_dim {
        return Err(SolveError::DimensionMismatch {
            context: "opponent marginal vs payoff",
            expected: opponent_dim,
            got: opponent_marginal.dim(),
        });
    }
    if oracle.dimension() != responder_dim {
        return Err(SolveError::DimensionMismatch {
            context: "responder oracle vs payoff",
            expected: responder_dim,
            got: oracle.dimension(),
        });
    }
    let costs = match side {
        Side::B => payoff.costs_for_b(opponent_marginal),
        Side::A => payoff.costs_for_a(opponent_marginal),
    };
    let vertex = oracle.optimize(&costs, sense);
    let payoff_against = vertex.marginal.dot(&costs);
    Ok((vertex, payoff_against))
}

/// Tests whether a point lies in the convex hull of the oracle's vertices.
///
/// Column generation: against the vertices discovered so far, look for a
/// box-normalized hyperplane below the point and above all of them. If none
/// exists the point is inside and a convex decomposition is extracted; if one
/// exists, a single oracle call either confirms it clears the whole polytope
/// (a certified separator) or produces a violating vertex to add. Each round
/// adds a vertex absent from the working set, so the loop is finite; the
/// `max_rounds` cap turns an overrun into an error rather than an answer.
pub fn check_membership<O>(
    point: &MarginalVector,
    oracle: &O,
    max_rounds: usize,
) -> Result<Membership<O::Strategy>, SolveError>
where
    O: VertexOracle,
{
    let n = oracle.dimension();
    if point.dim() != n {
        return Err(SolveError::DimensionMismatch {
            context: "membership point vs oracle",
            expected: n,
            got: point.dim(),
        });
    }

    let zero = vec![Rational::zero(); n];
    let mut vertices = vec![oracle.optimize(&zero, Sense::Minimize)];

    for _ in 0..max_rounds {
        // Variables (alpha0, alpha); the box keeps the program bounded and
        // costs nothing by scale invariance of the separation condition.
        let mut objective = Vec::with_capacity(n + 1);
        objective.push(rat(-1));
        objective.extend(point.entries.iter().map(|e| -e));
        let constraints = vertices
            .iter()
            .map(|v| {
                let mut coeffs = Vec::with_capacity(n + 1);
                coeffs.push(rat(1));
                coeffs.extend(v.marginal.entries.iter().cloned());
                Constraint::new(coeffs, Relation::Ge, Rational::zero())
            })
            .collect();
        let lp = LinearProgram {
            sense: Sense::Maximize,
            objective,
            constraints,
            bounds: vec![Bounds::interval(rat(-1), rat(1)); n + 1],
        };
        let LpOutcome::Optimal { solution, value } = lp_solve(&lp)? else {
            unreachable!("separator program is feasible at zero and box-bounded");
        };

        if !value.is_positive() {
            // No hyperplane separates the point from conv(vertices), so the
            // point is inside it; extract an exact convex witness.
            return Ok(Membership::Inside(decompose_over(point, &vertices)?));
        }

        let alpha0 = solution[0].clone();
        let alpha = solution[1..].to_vec();
        let candidate = oracle.optimize(&alpha, Sense::Minimize);
        if &alpha0 + candidate.marginal.dot(&alpha) >= Rational::zero() {
            return Ok(Membership::Separator { alpha0, alpha });
        }
        debug_assert!(
            vertices.iter().all(|v| v.marginal != candidate.marginal),
            "violating vertex must be new"
        );
        vertices.push(candidate);
    }
    Err(SolveError::RoundLimit(max_rounds))
}

/// Writes `point` as an exact convex combination of the given vertices.
/// The weights are a basic solution of the feasibility program, so the
/// support has at most dimension + 1 entries.
fn decompose_over<S: Clone>(
    point: &MarginalVector,
    vertices: &[PureVertex<S>],
) -> Result<MixedStrategy<S>, SolveError> {
    let n = point.dim();
    let k = vertices.len();
    let mut constraints = Vec::with_capacity(n + 1);
    for j in 0..n {
        let coeffs = vertices.iter().map(|v| v.marginal.entries[j].clone()).collect();
        constraints.push(Constraint::new(coeffs, Relation::Eq, point.entries[j].clone()));
    }
    constraints.push(Constraint::new(vec![rat(1); k], Relation::Eq, rat(1)));
    let lp = LinearProgram {
        sense: Sense::Minimize,
        objective: vec![Rational::zero(); k],
        constraints,
        bounds: vec![Bounds::nonnegative(); k],
    };
    let LpOutcome::Optimal { solution, .. } = lp_solve(&lp)? else {
        unreachable!("separation said the point is in the hull, so weights exist");
    };
    let support = vertices
        .iter()
        .zip(&solution)
        .filter(|(_, w)| w.is_positive())
        .map(|(v, w)| (v.clone(), w.clone()))
        .collect();
    MixedStrategy::new(support)
}

/// Expresses a polytope point as a mixed strategy over at most
/// dimension + 1 pure vertices, or reports the separating hyperplane
/// proving it is not one.
pub fn decompose_marginal<O>(
    point: &MarginalVector,
    oracle: &O,
) -> Result<MixedStrategy<O::Strategy>, SolveError>
where
    O: VertexOracle,
{
    match check_membership(point, oracle, usize::MAX)? {
        Membership::Inside(mix) => Ok(mix),
        Membership::Separator { alpha0, alpha } => {
            Err(SolveError::OutsidePolytope { alpha0, alpha })
        }
    }
}

/// Accuracy an approximate oracle must deliver so the equilibrium is within
/// `epsilon`: epsilon divided by max(1, sum of |M_ij|).
pub fn oracle_tolerance<P: PayoffForm>(epsilon: Rational, payoff: &P) -> Result<Rational, SolveError> {
    if !epsilon.is_positive() {
        return Err(SolveError::NonpositiveEpsilon(epsilon));
    }
    let beta = payoff.abs_sum().max(rat(1));
    Ok(epsilon / beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlp::ratio;
    use std::cell::Cell;

    /// Test oracle over an explicit list of vertex marginals; strategies are
    /// the vertex indices. Ties go to the smallest index.
    struct ListOracle {
        vertices: Vec<MarginalVector>,
    }

    impl ListOracle {
        fn one_hot(dim: usize) -> Self {
            let vertices = (0..dim)
                .map(|i| {
                    let mut entries = vec![Rational::zero(); dim];
                    entries[i] = rat(1);
                    MarginalVector::new(entries)
                })
                .collect();
            Self { vertices }
        }
    }

    impl VertexOracle for ListOracle {
        type Strategy = usize;

        fn dimension(&self) -> usize {
            self.vertices[0].dim()
        }

        fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<usize> {
            let mut best = 0;
            for i in 1..self.vertices.len() {
                let v = self.vertices[i].dot(costs);
                let b = self.vertices[best].dot(costs);
                let better = match sense {
                    Sense::Minimize => v < b,
                    Sense::Maximize => v > b,
                };
                if better {
                    best = i;
                }
            }
            PureVertex { strategy: best, marginal: self.vertices[best].clone() }
        }
    }

    /// Explicit-matrix payoff form.
    struct MatrixPayoff {
        m: Vec<Vec<Rational>>,
    }

    impl MatrixPayoff {
        fn new(rows: &[&[i64]]) -> Self {
            Self {
                m: rows.iter().map(|r| r.iter().map(|&e| rat(e)).collect()).collect(),
            }
        }
    }

    impl PayoffForm for MatrixPayoff {
        fn dim_a(&self) -> usize {
            self.m.len()
        }

        fn dim_b(&self) -> usize {
            self.m[0].len()
        }

        fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational> {
            (0..self.dim_b())
                .map(|j| (0..self.dim_a()).map(|i| &x.entries[i] * &self.m[i][j]).sum())
                .collect()
        }

        fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational> {
            (0..self.dim_a()).map(|i| dot(&self.m[i], &y.entries)).collect()
        }

        fn abs_sum(&self) -> Rational {
            self.m.iter().flat_map(|r| r.iter()).map(|e| e.abs()).sum()
        }
    }

    #[test]
    fn matching_pennies_equilibrium() {
        let oracle = ListOracle::one_hot(2);
        let payoff = MatrixPayoff::new(&[&[1, -1], &[-1, 1]]);
        let eq = solve_bilinear(&oracle, &oracle, &payoff, rat(0)).unwrap();
        assert_eq!(eq.value, rat(0));
        assert_eq!(eq.gap_a, rat(0));
        assert_eq!(eq.gap_b, rat(0));
        let x = eq.strategy_a.marginal();
        let y = eq.strategy_b.marginal();
        assert_eq!(x.entries, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(y.entries, vec![ratio(1, 2), ratio(1, 2)]);
    }

    #[test]
    fn dominant_strategy_game() {
        // Row 1 dominates; column 0 is B's best counter.
        let oracle = ListOracle::one_hot(2);
        let payoff = MatrixPayoff::new(&[&[0, 0], &[2, 5]]);
        let eq = solve_bilinear(&oracle, &oracle, &payoff, rat(0)).unwrap();
        assert_eq!(eq.value, rat(2));
        assert_eq!(eq.strategy_a.support().len(), 1);
        assert_eq!(eq.strategy_a.support()[0].0.strategy, 1);
        assert_eq!(eq.strategy_b.support()[0].0.strategy, 0);
        assert!(eq.stats.iterations <= 4);
        assert!(eq.stats.vertices_a <= 2 && eq.stats.vertices_b <= 2);
    }

    #[test]
    fn value_is_bracketed_by_oracle_replies() {
        let oracle = ListOracle::one_hot(3);
        let payoff = MatrixPayoff::new(&[&[3, -2, 1], &[0, 4, -1], &[-3, 1, 2]]);
        let eq = solve_bilinear(&oracle, &oracle, &payoff, rat(0)).unwrap();
        let x = eq.strategy_a.marginal();
        let y = eq.strategy_b.marginal();
        assert_eq!(payoff.eval(&x, &y), eq.value);
        // Exact certificates: neither player can improve by any vertex.
        for v in &oracle.vertices {
            assert!(payoff.eval(v, &y) <= eq.value);
            assert!(payoff.eval(&x, v) >= eq.value);
        }
    }

    #[test]
    fn skew_symmetric_games_have_value_zero() {
        let oracle = ListOracle::one_hot(3);
        let payoff = MatrixPayoff::new(&[&[0, 2, -3], &[-2, 0, 5], &[3, -5, 0]]);
        let eq = solve_bilinear(&oracle, &oracle, &payoff, rat(0)).unwrap();
        assert_eq!(eq.value, rat(0));
    }

    #[test]
    fn nonzero_tolerance_is_honored() {
        let oracle = ListOracle::one_hot(2);
        let payoff = MatrixPayoff::new(&[&[1, -1], &[-1, 1]]);
        let eq = solve_bilinear(&oracle, &oracle, &payoff, rat(3)).unwrap();
        assert!(&eq.gap_a + &eq.gap_b <= rat(3));
        let negative = solve_bilinear(&oracle, &oracle, &payoff, rat(-1));
        assert!(matches!(negative, Err(SolveError::NegativeTolerance(_))));
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let payoff = MatrixPayoff::new(&[&[1, -1], &[-1, 1]]);
        let wrong = ListOracle::one_hot(3);
        let right = ListOracle::one_hot(2);
        let err = solve_bilinear(&wrong, &right, &payoff, rat(0)).unwrap_err();
        assert!(matches!(err, SolveError::DimensionMismatch { .. }));
    }

    /// An impure oracle that cycles through vertices regardless of costs.
    struct CyclingOracle {
        inner: ListOracle,
        calls: Cell<usize>,
    }

    impl VertexOracle for CyclingOracle {
        type Strategy = usize;

        fn dimension(&self) -> usize {
            self.inner.dimension()
        }

        fn optimize(&self, _costs: &[Rational], _sense: Sense) -> PureVertex<usize> {
            let i = self.calls.get() % self.inner.vertices.len();
            self.calls.set(self.calls.get() + 1);
            PureVertex { strategy: i, marginal: self.inner.vertices[i].clone() }
        }
    }

    #[test]
    fn broken_oracle_is_detected() {
        // The cycling oracle first reveals the dominant row 1, then answers
        // the next best-response query with row 0, which scores below the
        // restricted value and betrays the exactness contract.
        let broken = CyclingOracle { inner: ListOracle::one_hot(2), calls: Cell::new(0) };
        let honest = ListOracle::one_hot(2);
        let payoff = MatrixPayoff::new(&[&[0, 0], &[5, 5]]);
        let err = solve_bilinear(&broken, &honest, &payoff, rat(0)).unwrap_err();
        assert!(matches!(err, SolveError::BrokenOracle(_)), "got {err:?}");
    }

    #[test]
    fn best_response_minimizes_and_maximizes() {
        let oracle = ListOracle::one_hot(2);
        let payoff = MatrixPayoff::new(&[&[1, -1], &[-1, 1]]);
        // Uniform opponent: every reply is worth exactly zero.
        let uniform = MarginalVector::new(vec![ratio(1, 2), ratio(1, 2)]);
        let (_, against) = best_response(&payoff, &oracle, &uniform, Side::B).unwrap();
        assert_eq!(against, rat(0));
        // Point mass on row 0: B picks column 1 for payoff -1.
        let row0 = MarginalVector::new(vec![rat(1), rat(0)]);
        let (vertex, against) = best_response(&payoff, &oracle, &row0, Side::B).unwrap();
        assert_eq!(vertex.strategy, 1);
        assert_eq!(against, rat(-1));
        // And A maximizes against a fixed column.
        let col1 = MarginalVector::new(vec![rat(0), rat(1)]);
        let (vertex, against) = best_response(&payoff, &oracle, &col1, Side::A).unwrap();
        assert_eq!(vertex.strategy, 1);
        assert_eq!(against, rat(1));
        // Minimizer property across all vertices.
        let (reply, against) = best_response(&payoff, &oracle, &uniform, Side::B).unwrap();
        for v in &oracle.vertices {
            assert!(payoff.eval(&uniform, v) >= against);
        }
        assert_eq!(payoff.eval(&uniform, &reply.marginal), against);

        let short = MarginalVector::new(vec![rat(1)]);
        let err = best_response(&payoff, &oracle, &short, Side::B).unwrap_err();
        assert!(matches!(err, SolveError::DimensionMismatch { .. }));
    }

    #[test]
    fn membership_accepts_a_vertex() {
        let oracle = ListOracle::one_hot(3);
        let point = oracle.vertices[1].clone();
        match check_membership(&point, &oracle, 64).unwrap() {
            Membership::Inside(mix) => {
                assert_eq!(mix.support().len(), 1);
                assert_eq!(mix.support()[0].1, rat(1));
                assert_eq!(mix.marginal(), point);
            }
            other => panic!("expected Inside, got {other:?}"),
        }
    }

    #[test]
    fn membership_decomposes_a_midpoint() {
        let oracle = ListOracle::one_hot(2);
        let point = MarginalVector::new(vec![ratio(1, 2), ratio(1, 2)]);
        match check_membership(&point, &oracle, 64).unwrap() {
            Membership::Inside(mix) => {
                assert_eq!(mix.marginal(), point);
                assert_eq!(mix.support().len(), 2);
                for (_, w) in mix.support() {
                    assert_eq!(*w, ratio(1, 2));
                }
            }
            other => panic!("expected Inside, got {other:?}"),
        }
    }

    #[test]
    fn membership_separates_an_outside_point() {
        // One vertex (0, 1): the point (1, 0) is outside its hull.
        let oracle = ListOracle {
            vertices: vec![MarginalVector::new(vec![rat(0), rat(1)])],
        };
        let point = MarginalVector::new(vec![rat(1), rat(0)]);
        match check_membership(&point, &oracle, 64).unwrap() {
            Membership::Separator { alpha0, alpha } => {
                assert!(&alpha0 + point.dot(&alpha) < rat(0));
                for v in &oracle.vertices {
                    assert!(&alpha0 + v.dot(&alpha) >= rat(0));
                }
            }
            other => panic!("expected Separator, got {other:?}"),
        }
    }

    #[test]
    fn membership_round_limit_is_an_error() {
        let oracle = ListOracle::one_hot(2);
        let point = MarginalVector::new(vec![rat(1), rat(0)]);
        let err = check_membership(&point, &oracle, 0).unwrap_err();
        assert!(matches!(err, SolveError::RoundLimit(0)));
    }

    #[test]
    fn decompose_marginal_handles_inside_and_outside() {
        let oracle = ListOracle::one_hot(3);
        let vertex_point = oracle.vertices[2].clone();
        let mix = decompose_marginal(&vertex_point, &oracle).unwrap();
        assert_eq!(mix.support().len(), 1);
        assert_eq!(mix.support()[0].0.strategy, 2);

        let inside = MarginalVector::new(vec![ratio(1, 6), ratio(1, 3), ratio(1, 2)]);
        let mix = decompose_marginal(&inside, &oracle).unwrap();
        assert_eq!(mix.marginal(), inside);
        assert!(mix.support().len() <= 4);

        let outside = MarginalVector::new(vec![rat(1), rat(1), rat(0)]);
        let err = decompose_marginal(&outside, &oracle).unwrap_err();
        assert!(matches!(err, SolveError::OutsidePolytope { .. }));
    }

    #[test]
    fn payoff_form_bilinearity_is_exact() {
        let payoff = MatrixPayoff::new(&[&[3, -2, 1], &[0, 4, -1]]);
        let xs = [
            MarginalVector::new(vec![rat(1), rat(0)]),
            MarginalVector::new(vec![ratio(1, 3), ratio(2, 3)]),
            MarginalVector::new(vec![ratio(5, 7), ratio(2, 7)]),
        ];
        let ys = [
            MarginalVector::new(vec![rat(0), rat(1), rat(0)]),
            MarginalVector::new(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]),
        ];
        for x in &xs {
            for y in &ys {
                let direct = payoff.eval(x, y);
                assert_eq!(direct, dot(&payoff.costs_for_b(x), &y.entries));
                assert_eq!(direct, dot(&payoff.costs_for_a(y), &x.entries));
            }
        }
    }

    #[test]
    fn oracle_tolerance_clamps_at_one() {
        let big = MatrixPayoff::new(&[&[1, -1], &[-1, 1]]);
        assert_eq!(big.abs_sum(), rat(4));
        assert_eq!(oracle_tolerance(ratio(1, 10), &big).unwrap(), ratio(1, 40));

        let small = MatrixPayoff::new(&[&[0, 0], &[0, 0]]);
        // abs_sum 0 clamps to 1.
        assert_eq!(oracle_tolerance(ratio(1, 10), &small).unwrap(), ratio(1, 10));

        let unit = MatrixPayoff::new(&[&[1]]);
        assert_eq!(oracle_tolerance(rat(1), &unit).unwrap(), rat(1));

        assert!(matches!(
            oracle_tolerance(rat(0), &big),
            Err(SolveError::NonpositiveEpsilon(_))
        ));
        assert!(matches!(
            oracle_tolerance(rat(-1), &big),
            Err(SolveError::NonpositiveEpsilon(_))
        ));
    }

    #[test]
    fn mixed_strategy_validation() {
        let v0 = PureVertex { strategy: 0usize, marginal: MarginalVector::new(vec![rat(1), rat(0)]) };
        let v1 = PureVertex { strategy: 1usize, marginal: MarginalVector::new(vec![rat(0), rat(1)]) };

        let ok = MixedStrategy::new(vec![(v0.clone(), ratio(1, 3)), (v1.clone(), ratio(2, 3))]);
        assert!(ok.is_ok());

        assert!(MixedStrategy::new(Vec::<(PureVertex<usize>, Rational)>::new()).is_err());
        assert!(MixedStrategy::new(vec![(v0.clone(), ratio(1, 2))]).is_err());
        assert!(MixedStrategy::new(vec![(v0.clone(), rat(1)), (v0.clone(), rat(0))]).is_err());
        assert!(
            MixedStrategy::new(vec![(v0.clone(), ratio(1, 2)), (v0.clone(), ratio(1, 2))]).is_err()
        );
        let pure = MixedStrategy::pure(v1);
        assert_eq!(pure.marginal().entries, vec![rat(0), rat(1)]);
    }

    #[test]
    fn fractional_payoffs_stay_exact() {
        let oracle = ListOracle::one_hot(2);
        let m = vec![
            vec![ratio(1, 3), ratio(-1, 7)],
            vec![ratio(-2, 5), ratio(3, 11)],
        ];
        let payoff = MatrixPayoff { m };
        let eq = solve_bilinear(&oracle, &oracle, &payoff, rat(0)).unwrap();
        // Cross-check against the direct matrix-game solution.
        let direct = crate::ratlp::matrix_game_solve(&payoff.m).unwrap();
        assert_eq!(eq.value, direct.value);
        assert_eq!(eq.gap_a, rat(0));
        assert_eq!(eq.gap_b, rat(0));
    }
}
