//! The solve command: spec in, certified equilibrium report out.

use std::fs;
use std::path::Path;
use std::time::Instant;

use zerosum::blotto::{solve_blotto, solve_colonel_lotto};
use zerosum::duels::{solve_duel, DuelEquilibrium, DuelError};
use zerosum::lotto::{solve_finite_general_lotto, solve_general_lotto, LottoError};
use zerosum::solver::EquilibriumResult;

use crate::error::CliError;
use crate::report::{render, Report, SupportEntry, VertexRepr};
use crate::spec::{parse_spec, GameSpec};

pub fn cmd_solve(spec_path: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let spec = parse_spec(spec_path)?;
    let started = Instant::now();
    let report = solve_to_report(&spec)?;
    let text = render(&report);
    match out {
        Some(path) => fs::write(path, &text)
            .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    // Timing goes to stderr so the report bytes depend only on the spec.
    eprintln!("wall time: {} ms", started.elapsed().as_millis());
    Ok(())
}

/// Solves a parsed game and packages the equilibrium as a report.
pub fn solve_to_report(spec: &GameSpec) -> Result<Report, CliError> {
    let game = spec.type_name();
    match spec {
        GameSpec::Blotto(b) => {
            let eq = solve_blotto(b).map_err(|e| CliError::Solver(e.to_string()))?;
            Ok(report_from(game, &eq, None, VertexRepr::partition, VertexRepr::partition))
        }
        GameSpec::ColonelLotto(l) => {
            let eq = solve_colonel_lotto(l).map_err(|e| CliError::Solver(e.to_string()))?;
            Ok(report_from(game, &eq, None, VertexRepr::partition, VertexRepr::partition))
        }
        GameSpec::FiniteGeneralLotto(f) => {
            let eq =
                solve_finite_general_lotto(f.a, f.b, &f.utility, &f.support_a, &f.support_b)
                    .map_err(lotto_error)?;
            Ok(report_from(game, &eq, None, VertexRepr::lotto, VertexRepr::lotto))
        }
        GameSpec::GeneralLotto(g) => {
            let solution = solve_general_lotto(g).map_err(lotto_error)?;
            Ok(report_from(
                game,
                &solution.result,
                Some((solution.u_hat, solution.u_bar)),
                VertexRepr::lotto,
                VertexRepr::lotto,
            ))
        }
        GameSpec::RankingDuel(d) | GameSpec::BstDuel(d) | GameSpec::MatchingDuel(d) => {
            let eq = solve_duel(d).map_err(duel_error)?;
            Ok(match eq {
                DuelEquilibrium::Ranking(eq) => {
                    report_from(game, &eq, None, VertexRepr::ranking, VertexRepr::ranking)
                }
                DuelEquilibrium::Bst(eq) => {
                    report_from(game, &eq, None, VertexRepr::bst, VertexRepr::bst)
                }
                DuelEquilibrium::Matching(eq) => {
                    report_from(game, &eq, None, VertexRepr::matching, VertexRepr::matching)
                }
            })
        }
    }
}

fn lotto_error(err: LottoError) -> CliError {
    match err {
        LottoError::Solve(e) => CliError::Solver(e.to_string()),
        LottoError::BoundOverflow { .. } => CliError::ResourceLimit(err.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn duel_error(err: DuelError) -> CliError {
    match err {
        DuelError::Solve(e) => CliError::Solver(e.to_string()),
        other => CliError::Input(other.to_string()),
    }
}

fn report_from<SA, SB>(
    game: &str,
    eq: &EquilibriumResult<SA, SB>,
    bounds: Option<(u64, u64)>,
    repr_a: impl Fn(&SA) -> VertexRepr,
    repr_b: impl Fn(&SB) -> VertexRepr,
) -> Report {
    Report {
        game: game.to_string(),
        value: eq.value.clone(),
        gap_a: eq.gap_a.clone(),
        gap_b: eq.gap_b.clone(),
        iterations: eq.stats.iterations,
        vertices_a: eq.stats.vertices_a,
        vertices_b: eq.stats.vertices_b,
        bounds,
        support_a: entries(eq.strategy_a.support(), repr_a),
        support_b: entries(eq.strategy_b.support(), repr_b),
    }
}

fn entries<S>(
    support: &[(zerosum::solver::PureVertex<S>, zerosum::ratlp::Rational)],
    repr: impl Fn(&S) -> VertexRepr,
) -> Vec<SupportEntry> {
    support
        .iter()
        .map(|(vertex, probability)| SupportEntry {
            probability: probability.clone(),
            vertex: repr(&vertex.strategy),
        })
        .collect()
}
