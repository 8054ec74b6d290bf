//! General Lotto games.
//!
//! Each player commits to a probability distribution over nonnegative
//! integer bids subject to an exact mean budget. The strategy polytope over
//! a finite support set S is cut out by two equalities (total probability
//! and mean), so its vertices are "paired strategies": either a point mass
//! at the mean or a two-point distribution straddling it. Best responses
//! enumerate those vertices directly. For utilities that depend only on the
//! bid difference and saturate beyond a threshold, a support bound reduces
//! the unbounded game to a finite one.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::ratlp::{rat, Rational, Sense};
use crate::solver::{
    solve_bilinear, EquilibriumResult, MarginalVector, PayoffForm, PureVertex, SolveError,
    VertexOracle,
};

fn rat_u(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

#[derive(Debug, Error)]
pub enum LottoError {
    #[error("support must be nonempty and strictly increasing")]
    BadSupport,
    #[error("probabilities must align with the support, be nonnegative, and sum to 1")]
    BadProbabilities,
    #[error("mean {mean} is outside the pair {lo}, {hi}")]
    MeanOutsideHull { lo: u64, hi: u64, mean: Rational },
    #[error("no strategy over the support has mean {mean}: values span [{lo}, {hi}]")]
    InfeasibleMean { lo: u64, hi: u64, mean: Rational },
    #[error("utility is undefined for value pair ({i}, {j})")]
    UtilityUndefined { i: u64, j: u64 },
    #[error("distance threshold must be at least 1")]
    ThresholdTooSmall,
    #[error("not a bounded distance function: {0}")]
    InvalidDistanceFn(String),
    #[error("support bound overflows 64 bits for b={b}, threshold={threshold}")]
    BoundOverflow { b: u64, threshold: u32 },
    #[error("this solver needs a distance utility; tabulated payoffs go through the finite solver")]
    DistanceFnRequired,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// A finitely supported distribution over integer bids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteLottoStrategy {
    support: Vec<u64>,
    probs: Vec<Rational>,
}

impl FiniteLottoStrategy {
    /// Validates that the support is strictly increasing and the
    /// probabilities are nonnegative and sum to exactly 1.
    pub fn new(support: Vec<u64>, probs: Vec<Rational>) -> Result<Self, LottoError> {
        validate_support(&support)?;
        if probs.len() != support.len() || probs.iter().any(|p| p.is_negative()) {
            return Err(LottoError::BadProbabilities);
        }
        let total: Rational = probs.iter().cloned().sum();
        if total != rat(1) {
            return Err(LottoError::BadProbabilities);
        }
        Ok(Self { support, probs })
    }

    /// Point mass at a single value.
    pub fn delta(value: u64) -> Self {
        Self { support: vec![value], probs: vec![rat(1)] }
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// Exact expectation.
    pub fn mean(&self) -> Rational {
        self.support.iter().zip(&self.probs).map(|(&v, p)| rat_u(v) * p).sum()
    }
}

fn validate_support(support: &[u64]) -> Result<(), LottoError> {
    if support.is_empty() || support.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LottoError::BadSupport);
    }
    Ok(())
}

/// A vertex of the mean-constrained strategy polytope: a point mass at the
/// mean or a two-point distribution straddling it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairedStrategy {
    lo: u64,
    hi: u64,
    mean: Rational,
    p_lo: Rational,
    p_hi: Rational,
}

impl PairedStrategy {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn mean(&self) -> &Rational {
        &self.mean
    }

    pub fn p_lo(&self) -> &Rational {
        &self.p_lo
    }

    pub fn p_hi(&self) -> &Rational {
        &self.p_hi
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    /// The paired strategy as an explicit distribution, dropping a
    /// zero-probability endpoint.
    pub fn strategy(&self) -> FiniteLottoStrategy {
        if self.lo == self.hi || self.p_hi.is_zero() {
            FiniteLottoStrategy::delta(self.lo)
        } else if self.p_lo.is_zero() {
            FiniteLottoStrategy::delta(self.hi)
        } else {
            FiniteLottoStrategy {
                support: vec![self.lo, self.hi],
                probs: vec![self.p_lo.clone(), self.p_hi.clone()],
            }
        }
    }
}

fn singleton_strategy(value: u64, mean: Rational) -> PairedStrategy {
    debug_assert_eq!(rat_u(value), mean);
    PairedStrategy { lo: value, hi: value, mean, p_lo: rat(1), p_hi: rat(0) }
}

/// The unique distribution on {lo, hi} with the given mean:
/// Pr(lo) = (mean - hi) / (lo - hi).
///
/// The endpoints may come in either order; the mean must lie between them.
pub fn paired_strategy(lo: u64, hi: u64, mean: Rational) -> Result<PairedStrategy, LottoError> {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    if mean < rat_u(lo) || mean > rat_u(hi) {
        return Err(LottoError::MeanOutsideHull { lo, hi, mean });
    }
    if lo == hi {
        return Ok(singleton_strategy(lo, mean));
    }
    let p_lo = (&mean - rat_u(hi)) / (rat_u(lo) - rat_u(hi));
    let p_hi = rat(1) - &p_lo;
    Ok(PairedStrategy { lo, hi, mean, p_lo, p_hi })
}

/// Writes a mean-c strategy as an exact convex combination of paired
/// strategies with the same mean, peeling the outermost pair off until the
/// remainder collapses to a point mass. At most one pair per support value.
pub fn decompose_paired(t: &FiniteLottoStrategy) -> Vec<(Rational, PairedStrategy)> {
    let mean = t.mean();
    let mut remaining: BTreeMap<u64, Rational> = t
        .support
        .iter()
        .zip(&t.probs)
        .filter(|(_, p)| p.is_positive())
        .map(|(&v, p)| (v, p.clone()))
        .collect();
    let mut mass = rat(1);
    let mut parts = Vec::new();
    while !remaining.is_empty() {
        let lo = *remaining.keys().next().expect("nonempty");
        let hi = *remaining.keys().next_back().expect("nonempty");
        if lo == hi {
            // The mean invariant forces the last point to sit at the mean.
            debug_assert_eq!(rat_u(lo) * &mass, &mean * &mass);
            parts.push((mass, singleton_strategy(lo, mean)));
            break;
        }
        let pair = paired_strategy(lo, hi, mean.clone()).expect("mean is between lo and hi");
        let beta_lo = &remaining[&lo] / &pair.p_lo;
        let beta_hi = &remaining[&hi] / &pair.p_hi;
        let beta = beta_lo.min(beta_hi);
        debug_assert!(beta.is_positive() && beta <= mass);
        for (value, share) in [(lo, &pair.p_lo), (hi, &pair.p_hi)] {
            let left = remaining.get_mut(&value).expect("endpoint present");
            *left -= &beta * share;
            debug_assert!(!left.is_negative());
            if left.is_zero() {
                remaining.remove(&value);
            }
        }
        mass -= &beta;
        parts.push((beta, pair));
    }
    parts
}

/// One candidate vertex of the polytope over an indexed support.
struct Candidate {
    lo: usize,
    hi: Option<usize>,
    p_lo: Rational,
    p_hi: Rational,
    objective: Rational,
}

/// The cost-optimal polytope vertex by direct enumeration of singletons and
/// straddling pairs, in lexicographic (lo, hi) order so ties are stable.
fn best_candidate(
    support: &[u64],
    mean: &Rational,
    costs: &[Rational],
    sense: Sense,
) -> Option<Candidate> {
    debug_assert_eq!(costs.len(), support.len());
    let mut best: Option<Candidate> = None;
    let mut consider = |cand: Candidate| {
        let improves = match &best {
            None => true,
            Some(cur) => match sense {
                Sense::Minimize => cand.objective < cur.objective,
                Sense::Maximize => cand.objective > cur.objective,
            },
        };
        if improves {
            best = Some(cand);
        }
    };
    for (i, &lo) in support.iter().enumerate() {
        let lo_rat = rat_u(lo);
        if &lo_rat > mean {
            break;
        }
        if &lo_rat == mean {
            consider(Candidate {
                lo: i,
                hi: None,
                p_lo: rat(1),
                p_hi: rat(0),
                objective: costs[i].clone(),
            });
            break;
        }
        for (j, &hi) in support.iter().enumerate().skip(i + 1) {
            if &rat_u(hi) <= mean {
                continue;
            }
            let p_lo = (mean - rat_u(hi)) / (lo_rat.clone() - rat_u(hi));
            let p_hi = rat(1) - &p_lo;
            let objective = &p_lo * &costs[i] + &p_hi * &costs[j];
            consider(Candidate { lo: i, hi: Some(j), p_lo, p_hi, objective });
        }
    }
    best
}

/// Best-response oracle over the mean-constrained polytope on a fixed
/// support; marginals are probability vectors indexed like the support.
#[derive(Debug, Clone)]
pub struct FiniteLottoOracle {
    support: Vec<u64>,
    mean: Rational,
}

impl FiniteLottoOracle {
    /// Fails if no distribution over the support can have the given mean.
    pub fn new(support: &[u64], mean: Rational) -> Result<Self, LottoError> {
        validate_support(support)?;
        let lo = support[0];
        let hi = *support.last().expect("nonempty");
        if mean < rat_u(lo) || mean > rat_u(hi) {
            return Err(LottoError::InfeasibleMean { lo, hi, mean });
        }
        Ok(Self { support: support.to_vec(), mean })
    }

    fn vertex(&self, cand: &Candidate) -> PureVertex<FiniteLottoStrategy> {
        let mut entries = vec![Rational::zero(); self.support.len()];
        entries[cand.lo] = cand.p_lo.clone();
        let strategy = match cand.hi {
            None => FiniteLottoStrategy::delta(self.support[cand.lo]),
            Some(j) => {
                entries[j] = cand.p_hi.clone();
                FiniteLottoStrategy {
                    support: vec![self.support[cand.lo], self.support[j]],
                    probs: vec![cand.p_lo.clone(), cand.p_hi.clone()],
                }
            }
        };
        PureVertex { strategy, marginal: MarginalVector::new(entries) }
    }
}

impl VertexOracle for FiniteLottoOracle {
    type Strategy = FiniteLottoStrategy;

    fn dimension(&self) -> usize {
        self.support.len()
    }

    fn optimize(&self, costs: &[Rational], sense: Sense) -> PureVertex<FiniteLottoStrategy> {
        let cand = best_candidate(&self.support, &self.mean, costs, sense)
            .expect("feasibility was checked at construction");
        self.vertex(&cand)
    }
}

/// One-shot vertex optimization over a support set: validates, enumerates,
/// and returns the optimal singleton or straddling pair as a strategy.
pub fn finite_lotto_oracle(
    support: &[u64],
    mean: &Rational,
    costs: &[Rational],
    sense: Sense,
) -> Result<PureVertex<FiniteLottoStrategy>, LottoError> {
    let oracle = FiniteLottoOracle::new(support, mean.clone())?;
    if costs.len() != support.len() {
        return Err(SolveError::DimensionMismatch {
            context: "costs vs support",
            expected: support.len(),
            got: costs.len(),
        }
        .into());
    }
    Ok(oracle.optimize(costs, sense))
}

/// Utility of player A as a function of both bids.
#[derive(Debug, Clone)]
pub enum LottoUtility {
    /// Explicit table indexed by the raw bid values: `values[i][j]`.
    Table(Vec<Vec<Rational>>),
    /// Difference utility u(i, j) = f(i - j).
    Distance(BoundedDistanceFn),
}

impl LottoUtility {
    /// The all-or-nothing utility sign(i - j).
    pub fn sign() -> Self {
        LottoUtility::Distance(BoundedDistanceFn::sign())
    }

    /// Utility for the bid pair, or an error where the table has no entry.
    pub fn eval(&self, i: u64, j: u64) -> Result<Rational, LottoError> {
        match self {
            LottoUtility::Table(values) => values
                .get(i as usize)
                .and_then(|row| row.get(j as usize))
                .cloned()
                .ok_or(LottoError::UtilityUndefined { i, j }),
            LottoUtility::Distance(f) => Ok(f.eval(i as i128 - j as i128)),
        }
    }
}

/// A monotone difference utility that saturates at +/- its maximum beyond a
/// threshold and agrees in sign with the difference.
///
/// Construction samples the function on the window [-threshold-2,
/// threshold+2] and rejects anything that is not monotone nondecreasing,
/// does not sit at the extremes past the threshold, or disagrees in sign
/// with its argument. Evaluation outside the window uses saturation, so the
/// samples determine the function everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedDistanceFn {
    threshold: u32,
    maximum: Rational,
    window: Vec<Rational>,
}

impl BoundedDistanceFn {
    pub fn new(
        threshold: u32,
        maximum: Rational,
        f: impl Fn(i64) -> Rational,
    ) -> Result<Self, LottoError> {
        if threshold < 1 {
            return Err(LottoError::ThresholdTooSmall);
        }
        if !maximum.is_positive() {
            return Err(LottoError::InvalidDistanceFn("maximum must be positive".into()));
        }
        let t = i64::from(threshold);
        let window: Vec<Rational> = (-t - 2..=t + 2).map(f).collect();
        for (w, pair) in window.windows(2).enumerate() {
            if pair[0] > pair[1] {
                let d = w as i64 - t - 2;
                return Err(LottoError::InvalidDistanceFn(format!(
                    "not monotone between {d} and {}",
                    d + 1
                )));
            }
        }
        for (idx, value) in window.iter().enumerate() {
            let d = idx as i64 - t - 2;
            if d >= t && value != &maximum {
                return Err(LottoError::InvalidDistanceFn(format!(
                    "must equal the maximum at {d}, got {value}"
                )));
            }
            if d <= -t && *value != -&maximum {
                return Err(LottoError::InvalidDistanceFn(format!(
                    "must equal the negated maximum at {d}, got {value}"
                )));
            }
            let sign_ok = match d.cmp(&0) {
                std::cmp::Ordering::Less => value.is_negative(),
                std::cmp::Ordering::Equal => value.is_zero(),
                std::cmp::Ordering::Greater => value.is_positive(),
            };
            if !sign_ok {
                return Err(LottoError::InvalidDistanceFn(format!(
                    "sign mismatch at {d}: got {value}"
                )));
            }
        }
        Ok(Self { threshold, maximum, window })
    }

    /// sign(d) with threshold 1 and maximum 1.
    pub fn sign() -> Self {
        Self::new(1, rat(1), |d| rat(d.signum())).expect("sign is a bounded distance function")
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    pub fn maximum(&self) -> &Rational {
        &self.maximum
    }

    pub fn eval(&self, d: i128) -> Rational {
        let t = i128::from(self.threshold);
        if d >= t {
            self.maximum.clone()
        } else if d <= -t {
            -&self.maximum
        } else {
            self.window[(d + t + 2) as usize].clone()
        }
    }

    /// The utility seen after swapping the players: d -> -f(-d).
    pub fn mirror(&self) -> Self {
        Self::new(self.threshold, self.maximum.clone(), |d| -self.eval(-i128::from(d)))
            .expect("mirror of a bounded distance function is one")
    }
}

/// Payoff to A when two finite strategies meet: the expectation of
/// u(bid_A, bid_B) under independent play.
pub fn lotto_payoff(
    x: &FiniteLottoStrategy,
    y: &FiniteLottoStrategy,
    u: &LottoUtility,
) -> Result<Rational, LottoError> {
    let mut total = Rational::zero();
    for (&i, p) in x.support.iter().zip(&x.probs) {
        if p.is_zero() {
            continue;
        }
        for (&j, q) in y.support.iter().zip(&y.probs) {
            if q.is_zero() {
                continue;
            }
            total += p * q * u.eval(i, j)?;
        }
    }
    Ok(total)
}

/// Player B's exact best response to a fixed strategy of A, restricted to
/// polytope vertices (which is without loss of optimality). Returns the
/// responding vertex and B's payoff, the negated payoff to A.
pub fn paired_best_response(
    x: &FiniteLottoStrategy,
    support: &[u64],
    mean_b: &Rational,
    u: &LottoUtility,
) -> Result<(PairedStrategy, Rational), LottoError> {
    FiniteLottoOracle::new(support, mean_b.clone())?;
    let mut costs = Vec::with_capacity(support.len());
    for &j in support {
        let mut c = Rational::zero();
        for (&i, p) in x.support.iter().zip(&x.probs) {
            if !p.is_zero() {
                c += p * u.eval(i, j)?;
            }
        }
        costs.push(c);
    }
    let cand = best_candidate(support, mean_b, &costs, Sense::Minimize)
        .expect("feasibility was checked at construction");
    let paired = match cand.hi {
        None => singleton_strategy(support[cand.lo], mean_b.clone()),
        Some(j) => PairedStrategy {
            lo: support[cand.lo],
            hi: support[j],
            mean: mean_b.clone(),
            p_lo: cand.p_lo,
            p_hi: cand.p_hi,
        },
    };
    Ok((paired, -cand.objective))
}

/// Bilinear payoff between probability vectors over the two supports; the
/// implicit matrix is u restricted to S_A x S_B.
#[derive(Debug, Clone)]
pub struct FiniteLottoPayoff<'a> {
    s_a: &'a [u64],
    s_b: &'a [u64],
    utility: &'a LottoUtility,
    abs: Rational,
}

/// Builds the payoff form, verifying the utility covers S_A x S_B.
pub fn finite_lotto_payoff_form<'a>(
    s_a: &'a [u64],
    s_b: &'a [u64],
    utility: &'a LottoUtility,
) -> Result<FiniteLottoPayoff<'a>, LottoError> {
    validate_support(s_a)?;
    validate_support(s_b)?;
    let mut abs = Rational::zero();
    for &i in s_a {
        for &j in s_b {
            abs += utility.eval(i, j)?.abs();
        }
    }
    Ok(FiniteLottoPayoff { s_a, s_b, utility, abs })
}

impl FiniteLottoPayoff<'_> {
    fn u(&self, i: u64, j: u64) -> Rational {
        self.utility.eval(i, j).expect("coverage was checked at construction")
    }
}

impl PayoffForm for FiniteLottoPayoff<'_> {
    fn dim_a(&self) -> usize {
        self.s_a.len()
    }

    fn dim_b(&self) -> usize {
        self.s_b.len()
    }

    fn costs_for_b(&self, x: &MarginalVector) -> Vec<Rational> {
        self.s_b
            .iter()
            .map(|&j| {
                x.entries
                    .iter()
                    .zip(self.s_a)
                    .filter(|(p, _)| !p.is_zero())
                    .map(|(p, &i)| p * self.u(i, j))
                    .sum()
            })
            .collect()
    }

    fn costs_for_a(&self, y: &MarginalVector) -> Vec<Rational> {
        self.s_a
            .iter()
            .map(|&i| {
                y.entries
                    .iter()
                    .zip(self.s_b)
                    .filter(|(q, _)| !q.is_zero())
                    .map(|(q, &j)| q * self.u(i, j))
                    .sum()
            })
            .collect()
    }

    fn abs_sum(&self) -> Rational {
        self.abs.clone()
    }
}

/// Exact equilibrium of a finite General Lotto game with means a and b over
/// explicit bid supports.
pub fn solve_finite_general_lotto(
    a: u64,
    b: u64,
    utility: &LottoUtility,
    s_a: &[u64],
    s_b: &[u64],
) -> Result<EquilibriumResult<FiniteLottoStrategy, FiniteLottoStrategy>, LottoError> {
    let oracle_a = FiniteLottoOracle::new(s_a, rat_u(a))?;
    let oracle_b = FiniteLottoOracle::new(s_b, rat_u(b))?;
    let payoff = finite_lotto_payoff_form(s_a, s_b, utility)?;
    Ok(solve_bilinear(&oracle_a, &oracle_b, &payoff, rat(0))?)
}

/// Bounds on equilibrium supports for a distance utility: no equilibrium
/// bid of A exceeds u_hat and none of B exceeds u_bar = u_hat + threshold,
/// with u_hat = (4b t + 4b + t)(2t + 2) for the larger mean b.
pub fn support_bound(b: u64, threshold: u32) -> Result<(u64, u64), LottoError> {
    if threshold < 1 {
        return Err(LottoError::ThresholdTooSmall);
    }
    let b128 = u128::from(b);
    let t128 = u128::from(threshold);
    (4 * b128)
        .checked_mul(t128)
        .map(|four_bt| (four_bt + 4 * b128 + t128, 2 * t128 + 2))
        .and_then(|(left, right)| left.checked_mul(right))
        .and_then(|u_hat| Some((u64::try_from(u_hat).ok()?, u64::try_from(u_hat + t128).ok()?)))
        .ok_or(LottoError::BoundOverflow { b, threshold })
}

/// A General Lotto instance over all nonnegative integer bids.
#[derive(Debug, Clone)]
pub struct GeneralLottoSpec {
    pub a: u64,
    pub b: u64,
    pub utility: LottoUtility,
}

/// Equilibrium of a General Lotto game plus the finite reduction used.
#[derive(Debug, Clone)]
pub struct GeneralLottoSolution {
    pub result: EquilibriumResult<FiniteLottoStrategy, FiniteLottoStrategy>,
    /// Largest bid the finite reduction allows for the smaller-mean player.
    pub u_hat: u64,
    /// Largest bid it allows for the larger-mean player.
    pub u_bar: u64,
    /// Whether the players were swapped to normalize the means.
    pub swapped: bool,
}

/// Exact equilibrium of General Lotto with a bounded distance utility.
///
/// The players are normalized so the first mean is the smaller one (swapping
/// and negating if needed), the support bound truncates the bid space to
/// {0, ..., u_bar}, and the finite solver does the rest.
pub fn solve_general_lotto(spec: &GeneralLottoSpec) -> Result<GeneralLottoSolution, LottoError> {
    let LottoUtility::Distance(f) = &spec.utility else {
        return Err(LottoError::DistanceFnRequired);
    };
    let swapped = spec.a > spec.b;
    let (a, b) = if swapped { (spec.b, spec.a) } else { (spec.a, spec.b) };
    let utility =
        if swapped { LottoUtility::Distance(f.mirror()) } else { spec.utility.clone() };

    let (u_hat, u_bar) = support_bound(b, f.threshold())?;
    let support: Vec<u64> = (0..=u_bar).collect();
    let result = solve_finite_general_lotto(a, b, &utility, &support, &support)?;

    let result = if swapped {
        EquilibriumResult {
            value: -result.value,
            strategy_a: result.strategy_b,
            strategy_b: result.strategy_a,
            gap_a: result.gap_b,
            gap_b: result.gap_a,
            stats: result.stats,
        }
    } else {
        result
    };
    Ok(GeneralLottoSolution { result, u_hat, u_bar, swapped })
}
