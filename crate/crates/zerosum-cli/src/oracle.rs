//! The oracle command: a direct linear-optimization probe for debugging.
//!
//! Feeds a cost vector straight to one player's vertex oracle and prints the
//! optimizing pure strategy with its objective. The side is inferred from
//! the cost vector's length; if both players share that dimension, player A
//! is probed and a note goes to stderr.

use std::fs;
use std::path::Path;

use zerosum::blotto::{BlottoOracle, ColonelLottoOracle};
use zerosum::duels::{BstOracle, MatchingOracle, RankingOracle};
use zerosum::lotto::{support_bound, FiniteLottoOracle, LottoUtility};
use zerosum::ratlp::{Rational, Sense};
use zerosum::solver::VertexOracle;

use crate::error::CliError;
use crate::rational::{format_rational, parse_rational};
use crate::report::{vertex_fields, VertexRepr};
use crate::spec::{parse_spec, GameSpec};

pub fn cmd_oracle(
    spec_path: &Path,
    costs_path: &Path,
    sense: Sense,
) -> Result<(), CliError> {
    let spec = parse_spec(spec_path)?;
    let costs = read_costs(costs_path)?;
    print!("{}", probe_text(&spec, &costs, sense)?);
    Ok(())
}

pub fn probe_text(spec: &GameSpec, costs: &[Rational], sense: Sense) -> Result<String, CliError> {
    match spec {
        GameSpec::Blotto(b) => probe(
            spec.type_name(),
            costs,
            sense,
            &BlottoOracle::new(b.a(), b.k()),
            &BlottoOracle::new(b.b(), b.k()),
            VertexRepr::partition,
        ),
        GameSpec::ColonelLotto(l) => probe(
            spec.type_name(),
            costs,
            sense,
            &ColonelLottoOracle::new(l.a(), l.k()),
            &ColonelLottoOracle::new(l.b(), l.k()),
            VertexRepr::partition,
        ),
        GameSpec::FiniteGeneralLotto(f) => {
            let oracle_a =
                FiniteLottoOracle::new(&f.support_a, Rational::from_integer(f.a.into()))
                    .map_err(|e| CliError::Input(e.to_string()))?;
            let oracle_b =
                FiniteLottoOracle::new(&f.support_b, Rational::from_integer(f.b.into()))
                    .map_err(|e| CliError::Input(e.to_string()))?;
            probe(spec.type_name(), costs, sense, &oracle_a, &oracle_b, VertexRepr::lotto)
        }
        GameSpec::GeneralLotto(g) => {
            let LottoUtility::Distance(d) = &g.utility else {
                return Err(CliError::Input(
                    "general_lotto always carries a distance payoff".into(),
                ));
            };
            let (_, u_bar) = support_bound(g.a.max(g.b), d.threshold())
                .map_err(|e| CliError::ResourceLimit(e.to_string()))?;
            let support: Vec<u64> = (0..=u_bar).collect();
            let oracle_a = FiniteLottoOracle::new(&support, Rational::from_integer(g.a.into()))
                .map_err(|e| CliError::Input(e.to_string()))?;
            let oracle_b = FiniteLottoOracle::new(&support, Rational::from_integer(g.b.into()))
                .map_err(|e| CliError::Input(e.to_string()))?;
            probe(spec.type_name(), costs, sense, &oracle_a, &oracle_b, VertexRepr::lotto)
        }
        GameSpec::RankingDuel(d) => {
            let oracle = RankingOracle::new(d.probabilities().len());
            probe(spec.type_name(), costs, sense, &oracle, &oracle, VertexRepr::ranking)
        }
        GameSpec::BstDuel(d) => {
            let oracle = BstOracle::new(d.probabilities().len());
            probe(spec.type_name(), costs, sense, &oracle, &oracle, VertexRepr::bst)
        }
        GameSpec::MatchingDuel(d) => {
            let graph = d.graph().expect("matching duels carry a graph");
            let oracle =
                MatchingOracle::new(graph).map_err(|e| CliError::Input(e.to_string()))?;
            probe(spec.type_name(), costs, sense, &oracle, &oracle, VertexRepr::matching)
        }
    }
}

fn probe<O: VertexOracle>(
    game: &str,
    costs: &[Rational],
    sense: Sense,
    oracle_a: &O,
    oracle_b: &O,
    repr: impl Fn(&O::Strategy) -> VertexRepr,
) -> Result<String, CliError> {
    let (side, oracle) = match (
        costs.len() == oracle_a.dimension(),
        costs.len() == oracle_b.dimension(),
    ) {
        (true, true) => {
            eprintln!("note: both players have dimension {}; probing side a", costs.len());
            ("a", oracle_a)
        }
        (true, false) => ("a", oracle_a),
        (false, true) => ("b", oracle_b),
        (false, false) => {
            return Err(CliError::Input(format!(
                "cost vector has {} entries; player a needs {}, player b needs {}",
                costs.len(),
                oracle_a.dimension(),
                oracle_b.dimension()
            )))
        }
    };
    let vertex = oracle.optimize(costs, sense);
    let objective: Rational =
        costs.iter().zip(&vertex.marginal.entries).map(|(c, m)| c * m).sum();
    let sense_name = match sense {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    };
    Ok(format!(
        "game = \"{game}\"\nside = \"{side}\"\nsense = \"{sense_name}\"\nobjective = \"{}\"\n{}",
        format_rational(&objective),
        vertex_fields(&repr(&vertex.strategy))
    ))
}

fn read_costs(path: &Path) -> Result<Vec<Rational>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in text.lines() {
        let data = line.split('#').next().unwrap_or("");
        for token in data.split_whitespace() {
            out.push(parse_rational(token)?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Input("the costs file contains no numbers".into()));
    }
    Ok(out)
}
