//! The verify command: re-derives a report's certificate from scratch.
//!
//! Verification trusts nothing but the spec: every reported pure strategy is
//! checked for membership in the game's strategy set, the value is recomputed
//! from the reported mixtures, and both best-response gaps are recomputed
//! with fresh oracle calls. A report that references strategies outside the
//! game is a spec/report mismatch (input error); a report whose numbers do
//! not hold up is a verification failure.

use std::path::Path;

use num_traits::Zero;
use zerosum::blotto::{
    blotto_payoff_form, colonel_lotto_payoff_form, corps_marginal, pure_to_marginal,
    BlottoOracle, ColonelLottoOracle, TroopPartition,
};
use zerosum::duels::{
    duel_payoff_form, BstOracle, BstVertex, MatchingOracle, MatchingVertex, RankingOracle,
    RankingVertex,
};
use zerosum::lotto::{
    finite_lotto_payoff_form, support_bound, FiniteLottoOracle, FiniteLottoStrategy,
    LottoUtility,
};
use zerosum::ratlp::Rational;
use zerosum::solver::{
    best_response, MarginalVector, MixedStrategy, PayoffForm, PureVertex, Side, VertexOracle,
};

use crate::error::CliError;
use crate::rational::format_rational;
use crate::report::{read_report, Report, SupportEntry, VertexRepr};
use crate::spec::{parse_spec, GameSpec};

pub fn cmd_verify(spec_path: &Path, report_path: &Path) -> Result<(), CliError> {
    let spec = parse_spec(spec_path)?;
    let report = read_report(report_path)?;
    verify_report(&spec, &report)?;
    println!("verification: pass");
    Ok(())
}

pub fn verify_report(spec: &GameSpec, report: &Report) -> Result<(), CliError> {
    if report.game != spec.type_name() {
        return Err(CliError::Input(format!(
            "report is for {:?} but the spec describes {:?}",
            report.game,
            spec.type_name()
        )));
    }
    match spec {
        GameSpec::Blotto(b) => {
            expect_bounds(report, None)?;
            let support_a =
                build_support(&report.support_a, |r| partition_vertex(r, b.k(), b.a(), false))?;
            let support_b =
                build_support(&report.support_b, |r| partition_vertex(r, b.k(), b.b(), false))?;
            check_equilibrium(
                &blotto_payoff_form(b),
                &BlottoOracle::new(b.a(), b.k()),
                &BlottoOracle::new(b.b(), b.k()),
                support_a,
                support_b,
                report,
            )
        }
        GameSpec::ColonelLotto(l) => {
            expect_bounds(report, None)?;
            let support_a =
                build_support(&report.support_a, |r| partition_vertex(r, l.k(), l.a(), true))?;
            let support_b =
                build_support(&report.support_b, |r| partition_vertex(r, l.k(), l.b(), true))?;
            check_equilibrium(
                &colonel_lotto_payoff_form(l),
                &ColonelLottoOracle::new(l.a(), l.k()),
                &ColonelLottoOracle::new(l.b(), l.k()),
                support_a,
                support_b,
                report,
            )
        }
        GameSpec::FiniteGeneralLotto(f) => {
            expect_bounds(report, None)?;
            let mean_a = Rational::from_integer(f.a.into());
            let mean_b = Rational::from_integer(f.b.into());
            let support_a =
                build_support(&report.support_a, |r| lotto_vertex(r, &f.support_a, &mean_a))?;
            let support_b =
                build_support(&report.support_b, |r| lotto_vertex(r, &f.support_b, &mean_b))?;
            let payoff = finite_lotto_payoff_form(&f.support_a, &f.support_b, &f.utility)
                .map_err(|e| CliError::Input(e.to_string()))?;
            check_equilibrium(
                &payoff,
                &lotto_oracle(&f.support_a, mean_a)?,
                &lotto_oracle(&f.support_b, mean_b)?,
                support_a,
                support_b,
                report,
            )
        }
        GameSpec::GeneralLotto(g) => {
            let LottoUtility::Distance(d) = &g.utility else {
                return Err(CliError::Input(
                    "general_lotto always carries a distance payoff".into(),
                ));
            };
            let (u_hat, u_bar) = support_bound(g.a.max(g.b), d.threshold())
                .map_err(|e| CliError::ResourceLimit(e.to_string()))?;
            expect_bounds(report, Some((u_hat, u_bar)))?;
            let support: Vec<u64> = (0..=u_bar).collect();
            let mean_a = Rational::from_integer(g.a.into());
            let mean_b = Rational::from_integer(g.b.into());
            let support_a =
                build_support(&report.support_a, |r| lotto_vertex(r, &support, &mean_a))?;
            let support_b =
                build_support(&report.support_b, |r| lotto_vertex(r, &support, &mean_b))?;
            let payoff = finite_lotto_payoff_form(&support, &support, &g.utility)
                .map_err(|e| CliError::Input(e.to_string()))?;
            check_equilibrium(
                &payoff,
                &lotto_oracle(&support, mean_a)?,
                &lotto_oracle(&support, mean_b)?,
                support_a,
                support_b,
                report,
            )
        }
        GameSpec::RankingDuel(d) => {
            expect_bounds(report, None)?;
            let m = d.probabilities().len();
            let support_a = build_support(&report.support_a, |r| ranking_vertex(r, m))?;
            let support_b = build_support(&report.support_b, |r| ranking_vertex(r, m))?;
            let oracle = RankingOracle::new(m);
            check_equilibrium(&duel_payoff_form(d), &oracle, &oracle, support_a, support_b, report)
        }
        GameSpec::BstDuel(d) => {
            expect_bounds(report, None)?;
            let m = d.probabilities().len();
            let support_a = build_support(&report.support_a, |r| bst_vertex(r, m))?;
            let support_b = build_support(&report.support_b, |r| bst_vertex(r, m))?;
            let oracle = BstOracle::new(m);
            check_equilibrium(&duel_payoff_form(d), &oracle, &oracle, support_a, support_b, report)
        }
        GameSpec::MatchingDuel(d) => {
            expect_bounds(report, None)?;
            let graph = d.graph().expect("matching duels carry a graph");
            let support_a = build_support(&report.support_a, |r| matching_vertex(r, graph))?;
            let support_b = build_support(&report.support_b, |r| matching_vertex(r, graph))?;
            let oracle =
                MatchingOracle::new(graph).map_err(|e| CliError::Input(e.to_string()))?;
            check_equilibrium(&duel_payoff_form(d), &oracle, &oracle, support_a, support_b, report)
        }
    }
}

fn expect_bounds(report: &Report, expected: Option<(u64, u64)>) -> Result<(), CliError> {
    if report.bounds != expected {
        return Err(CliError::Input(
            "report bid bounds do not match what the spec implies".into(),
        ));
    }
    Ok(())
}

fn build_support<S>(
    entries: &[SupportEntry],
    vertex: impl Fn(&VertexRepr) -> Result<PureVertex<S>, CliError>,
) -> Result<Vec<(PureVertex<S>, Rational)>, CliError> {
    entries.iter().map(|e| Ok((vertex(&e.vertex)?, e.probability.clone()))).collect()
}

fn encoding_mismatch(expected: &str) -> CliError {
    CliError::Input(format!("support entry does not carry a {expected} strategy"))
}

fn membership(err: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("reported strategy is not in the game: {err}"))
}

fn partition_vertex(
    repr: &VertexRepr,
    k: usize,
    budget: usize,
    corps: bool,
) -> Result<PureVertex<TroopPartition>, CliError> {
    let VertexRepr::Partition(alloc) = repr else {
        return Err(encoding_mismatch("partition"));
    };
    if alloc.len() != k {
        return Err(membership(format!("partition has {} parts, the game has {k}", alloc.len())));
    }
    let total = alloc
        .iter()
        .try_fold(0usize, |acc, &v| acc.checked_add(v))
        .filter(|&t| t == budget)
        .ok_or_else(|| membership(format!("partition does not sum to the budget {budget}")))?;
    debug_assert_eq!(total, budget);
    let strategy = TroopPartition { allocations: alloc.clone() };
    let marginal =
        if corps { corps_marginal(&strategy, budget) } else { pure_to_marginal(&strategy, budget) };
    Ok(PureVertex { strategy, marginal })
}

fn lotto_oracle(support: &[u64], mean: Rational) -> Result<FiniteLottoOracle, CliError> {
    FiniteLottoOracle::new(support, mean).map_err(|e| CliError::Input(e.to_string()))
}

fn lotto_vertex(
    repr: &VertexRepr,
    support: &[u64],
    mean: &Rational,
) -> Result<PureVertex<FiniteLottoStrategy>, CliError> {
    let VertexRepr::Lotto { values, weights } = repr else {
        return Err(encoding_mismatch("bid-distribution"));
    };
    let strategy =
        FiniteLottoStrategy::new(values.clone(), weights.clone()).map_err(membership)?;
    if &strategy.mean() != mean {
        return Err(membership(format!(
            "distribution mean {} differs from the player's mean {}",
            format_rational(&strategy.mean()),
            format_rational(mean)
        )));
    }
    let mut entries = vec![Rational::zero(); support.len()];
    for (&v, p) in strategy.support().iter().zip(strategy.probs()) {
        let pos = support
            .iter()
            .position(|&s| s == v)
            .ok_or_else(|| membership(format!("bid {v} is outside the support")))?;
        entries[pos] = p.clone();
    }
    Ok(PureVertex { strategy, marginal: MarginalVector::new(entries) })
}

fn ranking_vertex(repr: &VertexRepr, m: usize) -> Result<PureVertex<RankingVertex>, CliError> {
    let VertexRepr::Positions(p) = repr else {
        return Err(encoding_mismatch("ranking"));
    };
    if p.len() != m {
        return Err(membership(format!("{} positions for {m} pages", p.len())));
    }
    let strategy = RankingVertex::new(p.clone()).map_err(membership)?;
    let marginal = strategy.marginal();
    Ok(PureVertex { strategy, marginal })
}

fn bst_vertex(repr: &VertexRepr, m: usize) -> Result<PureVertex<BstVertex>, CliError> {
    let VertexRepr::Depths(d) = repr else {
        return Err(encoding_mismatch("search-tree"));
    };
    if d.len() != m {
        return Err(membership(format!("{} depths for {m} keys", d.len())));
    }
    let strategy = BstVertex::new(d.clone()).map_err(membership)?;
    let marginal = strategy.marginal();
    Ok(PureVertex { strategy, marginal })
}

fn matching_vertex(
    repr: &VertexRepr,
    graph: &zerosum::duels::MatchingGraph,
) -> Result<PureVertex<MatchingVertex>, CliError> {
    let VertexRepr::Edges(e) = repr else {
        return Err(encoding_mismatch("matching"));
    };
    let strategy = MatchingVertex::new(graph, e.clone()).map_err(membership)?;
    let marginal = strategy.marginal();
    Ok(PureVertex { strategy, marginal })
}

fn check_equilibrium<P, OA, OB>(
    payoff: &P,
    oracle_a: &OA,
    oracle_b: &OB,
    support_a: Vec<(PureVertex<OA::Strategy>, Rational)>,
    support_b: Vec<(PureVertex<OB::Strategy>, Rational)>,
    report: &Report,
) -> Result<(), CliError>
where
    P: PayoffForm,
    OA: VertexOracle,
    OB: VertexOracle,
{
    let mix_a = MixedStrategy::new(support_a)
        .map_err(|e| CliError::Verification(format!("player A mixture: {e}")))?;
    let mix_b = MixedStrategy::new(support_b)
        .map_err(|e| CliError::Verification(format!("player B mixture: {e}")))?;
    let (x, y) = (mix_a.marginal(), mix_b.marginal());
    let value = payoff.eval(&x, &y);
    let (_, reply_a) = best_response(payoff, oracle_a, &y, Side::A)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let (_, reply_b) = best_response(payoff, oracle_b, &x, Side::B)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    let gap_a = reply_a - &value;
    let gap_b = &value - reply_b;
    if value != report.value {
        return Err(CliError::Verification(format!(
            "recomputed value {} differs from reported {}",
            format_rational(&value),
            format_rational(&report.value)
        )));
    }
    if gap_a > report.gap_a {
        return Err(CliError::Verification(format!(
            "player A could still gain {}; the report claims at most {}",
            format_rational(&gap_a),
            format_rational(&report.gap_a)
        )));
    }
    if gap_b > report.gap_b {
        return Err(CliError::Verification(format!(
            "player B could still gain {}; the report claims at most {}",
            format_rational(&gap_b),
            format_rational(&report.gap_b)
        )));
    }
    Ok(())
}
