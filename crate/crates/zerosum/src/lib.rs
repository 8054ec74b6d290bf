//! Exact equilibrium computation for two-player zero-sum games whose pure
//! strategy sets are too large to enumerate.
//!
//! The core idea: map each pure strategy to a low-dimensional marginal vector,
//! express the payoff as a bilinear form over the two marginal polytopes, and
//! hand each polytope's linear-optimization oracle to a column-generation
//! solver that terminates with an exact equilibrium and a machine-checkable
//! best-response certificate. All arithmetic is arbitrary-precision rational;
//! no tolerance ever enters unless explicitly requested.
//!
//! Module map:
//!
//! * [`ratlp`]: exact rational linear programming (dense simplex, Bland's
//!   rule) and a zero-sum matrix-game solver built on it.
//! * [`solver`]: the game-independent engine: vertex oracles, bilinear payoff
//!   forms, equilibrium solving, membership testing, convex decomposition.
//! * [`blotto`]: Colonel Blotto and Colonel Lotto (troop partitions over
//!   battlefields, partition DP oracle).
//! * [`lotto`]: General Lotto (distributions over nonnegative integers with a
//!   fixed mean, paired-strategy machinery, support bounds).
//! * [`duels`]: ranking, binary-search-tree, and matching duels (assignment,
//!   interval-DP, and perfect-matching oracles).

pub mod blotto;
pub mod duels;
pub mod lotto;
pub mod ratlp;
pub mod solver;
