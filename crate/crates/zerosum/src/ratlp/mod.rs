//! Exact rational linear programming.
//!
//! A dense two-phase simplex with Bland's rule, plus a zero-sum matrix-game
//! solver layered on it. Everything is arbitrary-precision rational: an
//! `Optimal` outcome satisfies each constraint exactly, and identical inputs
//! produce bit-identical outputs. Intended for the small restricted problems
//! generated during column generation, not for large-scale LP work.

use num_traits::Zero;
use thiserror::Error;

mod simplex;

/// Arbitrary-precision rational number. Stored in lowest terms with a
/// positive denominator; every operation is exact.
pub type Rational = num_rational::BigRational;

/// `n` as a rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// `num/den` as a rational, reduced. Panics if `den` is zero.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Optimization direction, shared by linear programs and vertex oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Relation of one linear constraint row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

/// Per-variable bounds. `None` means unbounded on that side; there is no
/// implicit nonnegativity anywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl Bounds {
    pub fn free() -> Self {
        Bounds { lower: None, upper: None }
    }

    pub fn nonnegative() -> Self {
        Bounds { lower: Some(Rational::zero()), upper: None }
    }

    pub fn at_least(lower: Rational) -> Self {
        Bounds { lower: Some(lower), upper: None }
    }

    pub fn interval(lower: Rational, upper: Rational) -> Self {
        Bounds { lower: Some(lower), upper: Some(upper) }
    }
}

/// One constraint row: `coeffs . x  (relation)  rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, relation: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

/// A linear program in inequality form with explicit per-variable bounds.
///
/// Every constraint row must have exactly as many coefficients as the
/// objective, and `bounds` must list every variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<Bounds>,
}

/// Result of solving a linear program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// An optimal vertex of the feasible region and its objective value.
    Optimal { solution: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// Shape errors raised before any solving starts.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LpError {
    #[error("linear program has no variables")]
    EmptyProblem,
    #[error("constraint {row} has {got} coefficients, expected {expected}")]
    RowWidth { row: usize, got: usize, expected: usize },
    #[error("bounds list has length {got}, expected {expected}")]
    BoundsWidth { got: usize, expected: usize },
    #[error("payoff matrix is empty")]
    EmptyMatrix,
    #[error("payoff matrix row {row} has {got} entries, expected {expected}")]
    RaggedMatrix { row: usize, got: usize, expected: usize },
}

/// Solves `lp` exactly.
///
/// An `Optimal` outcome is a vertex of the feasible region (a basic feasible
/// solution); Bland's rule makes the pivot sequence, and therefore the
/// returned vertex, deterministic. Degenerate and redundant rows are handled
/// by the pivot rule itself; there is no preprocessing.
pub fn lp_solve(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    validate(lp)?;
    Ok(simplex::solve(lp))
}

fn validate(lp: &LinearProgram) -> Result<(), LpError> {
    let n = lp.objective.len();
    if n == 0 {
        return Err(LpError::EmptyProblem);
    }
    for (row, c) in lp.constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(LpError::RowWidth { row, got: c.coeffs.len(), expected: n });
        }
    }
    if lp.bounds.len() != n {
        return Err(LpError::BoundsWidth { got: lp.bounds.len(), expected: n });
    }
    Ok(())
}

/// Exact solution of a zero-sum matrix game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGameSolution {
    /// Game value for the row player.
    pub value: Rational,
    /// Maximin mixed strategy over rows; entries sum to one.
    pub row_strategy: Vec<Rational>,
    /// Minimax mixed strategy over columns; entries sum to one.
    pub col_strategy: Vec<Rational>,
}

/// Solves the zero-sum game whose rows are the maximizing player's pure
/// strategies and whose entries are the row player's payoffs.
///
/// The returned strategies are exact: every column guarantees the row player
/// at least `value` against `row_strategy`, and every row yields at most
/// `value` against `col_strategy`. Identical inputs give bit-identical
/// outputs.
pub fn matrix_game_solve(payoff: &[Vec<Rational>]) -> Result<MatrixGameSolution, LpError> {
    if payoff.is_empty() || payoff[0].is_empty() {
        return Err(LpError::EmptyMatrix);
    }
    let width = payoff[0].len();
    for (row, r) in payoff.iter().enumerate() {
        if r.len() != width {
            return Err(LpError::RaggedMatrix { row, got: r.len(), expected: width });
        }
    }
    Ok(simplex::solve_matrix_game(payoff))
}
