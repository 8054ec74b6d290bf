//! Game spec files: one TOML document per game, selected by a `type` key.
//!
//! Every game fails fast here: schema problems (unknown fields, wrong
//! shapes) and invariant violations (infeasible means, bad distributions)
//! are all input errors with the offending field in the message.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use zerosum::blotto::{BlottoSpec, LottoSpec};
use zerosum::duels::{DuelSpec, MatchingGraph};
use zerosum::lotto::{
    finite_lotto_payoff_form, BoundedDistanceFn, FiniteLottoOracle, GeneralLottoSpec,
    LottoUtility,
};
use zerosum::ratlp::Rational;

use crate::error::CliError;
use crate::rational::{to_matrix, to_rational, to_rationals, RawRational};

/// A parsed and validated game, ready to solve.
#[derive(Debug)]
pub enum GameSpec {
    Blotto(BlottoSpec),
    ColonelLotto(LottoSpec),
    FiniteGeneralLotto(FiniteGeneralLottoSpec),
    GeneralLotto(GeneralLottoSpec),
    RankingDuel(DuelSpec),
    BstDuel(DuelSpec),
    MatchingDuel(DuelSpec),
}

/// Finite General Lotto: explicit bid supports and integer means.
#[derive(Debug)]
pub struct FiniteGeneralLottoSpec {
    pub a: u64,
    pub b: u64,
    pub support_a: Vec<u64>,
    pub support_b: Vec<u64>,
    pub utility: LottoUtility,
}

impl GameSpec {
    pub fn type_name(&self) -> &'static str {
        match self {
            GameSpec::Blotto(_) => "blotto",
            GameSpec::ColonelLotto(_) => "colonel_lotto",
            GameSpec::FiniteGeneralLotto(_) => "finite_general_lotto",
            GameSpec::GeneralLotto(_) => "general_lotto",
            GameSpec::RankingDuel(_) => "ranking_duel",
            GameSpec::BstDuel(_) => "bst_duel",
            GameSpec::MatchingDuel(_) => "matching_duel",
        }
    }
}

pub fn parse_spec(path: &Path) -> Result<GameSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_spec_text(&text)
}

pub fn parse_spec_text(text: &str) -> Result<GameSpec, CliError> {
    #[derive(Deserialize)]
    struct Probe {
        #[serde(rename = "type")]
        kind: String,
    }
    let probe: Probe = toml::from_str(text).map_err(bad_toml)?;
    match probe.kind.as_str() {
        "blotto" => build_blotto(parse_as(text)?).map(GameSpec::Blotto),
        "colonel_lotto" => build_colonel_lotto(parse_as(text)?).map(GameSpec::ColonelLotto),
        "finite_general_lotto" => {
            build_finite_general_lotto(parse_as(text)?).map(GameSpec::FiniteGeneralLotto)
        }
        "general_lotto" => build_general_lotto(parse_as(text)?).map(GameSpec::GeneralLotto),
        "ranking_duel" => {
            let raw: RawPositionalDuel = parse_as(text)?;
            DuelSpec::ranking(to_rationals(&raw.p)?).map(GameSpec::RankingDuel).map_err(invariant)
        }
        "bst_duel" => {
            let raw: RawPositionalDuel = parse_as(text)?;
            DuelSpec::bst(to_rationals(&raw.p)?).map(GameSpec::BstDuel).map_err(invariant)
        }
        "matching_duel" => build_matching_duel(parse_as(text)?).map(GameSpec::MatchingDuel),
        other => Err(CliError::Input(format!(
            "unknown game type {other:?}; expected one of blotto, colonel_lotto, \
             finite_general_lotto, general_lotto, ranking_duel, bst_duel, matching_duel"
        ))),
    }
}

fn parse_as<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    toml::from_str(text).map_err(bad_toml)
}

fn bad_toml(err: toml::de::Error) -> CliError {
    CliError::Input(err.message().to_string())
}

fn invariant(err: impl std::fmt::Display) -> CliError {
    CliError::Input(err.to_string())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBlotto {
    #[serde(rename = "type")]
    _kind: String,
    a: usize,
    b: usize,
    k: usize,
    payoff: RawBlottoPayoff,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawBlottoPayoff {
    Shorthand(String),
    PerBattlefield(Vec<Vec<Vec<RawRational>>>),
}

fn build_blotto(raw: RawBlotto) -> Result<BlottoSpec, CliError> {
    match raw.payoff {
        RawBlottoPayoff::Shorthand(s) => {
            expect_sign(&s)?;
            BlottoSpec::sign(raw.a, raw.b, raw.k)
        }
        RawBlottoPayoff::PerBattlefield(tables) => {
            let payoffs =
                tables.iter().map(|t| to_matrix(t)).collect::<Result<Vec<_>, _>>()?;
            BlottoSpec::new(raw.a, raw.b, raw.k, payoffs)
        }
    }
    .map_err(invariant)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawColonelLotto {
    #[serde(rename = "type")]
    _kind: String,
    a: usize,
    b: usize,
    k: usize,
    payoff: RawColonelPayoff,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawColonelPayoff {
    Shorthand(String),
    Table(Vec<Vec<RawRational>>),
}

fn build_colonel_lotto(raw: RawColonelLotto) -> Result<LottoSpec, CliError> {
    match raw.payoff {
        RawColonelPayoff::Shorthand(s) => {
            expect_sign(&s)?;
            LottoSpec::sign(raw.a, raw.b, raw.k)
        }
        RawColonelPayoff::Table(t) => LottoSpec::new(raw.a, raw.b, raw.k, to_matrix(&t)?),
    }
    .map_err(invariant)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiniteGeneralLotto {
    #[serde(rename = "type")]
    _kind: String,
    a: u64,
    b: u64,
    support_a: Vec<u64>,
    support_b: Vec<u64>,
    payoff: RawLottoPayoff,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawLottoPayoff {
    Shorthand(String),
    Table(Vec<Vec<RawRational>>),
    Distance(RawDistance),
}

/// A bounded distance utility as samples over the window the library
/// validates: offsets -(threshold + 2) through threshold + 2 in order.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDistance {
    threshold: u32,
    maximum: RawRational,
    values: Vec<RawRational>,
}

fn build_distance(raw: &RawDistance) -> Result<BoundedDistanceFn, CliError> {
    let maximum = to_rational(&raw.maximum)?;
    let expected = 2 * raw.threshold as usize + 5;
    if raw.values.len() != expected {
        return Err(CliError::Input(format!(
            "distance payoff with threshold {} needs {} values, one per offset in -{}..={}; got {}",
            raw.threshold,
            expected,
            raw.threshold + 2,
            raw.threshold + 2,
            raw.values.len()
        )));
    }
    let values = to_rationals(&raw.values)?;
    let t = i64::from(raw.threshold);
    BoundedDistanceFn::new(raw.threshold, maximum, move |d| {
        let slot = usize::try_from(d + t + 2).expect("sampling stays inside the window");
        values[slot].clone()
    })
    .map_err(invariant)
}

fn build_lotto_utility(payoff: &RawLottoPayoff) -> Result<LottoUtility, CliError> {
    match payoff {
        RawLottoPayoff::Shorthand(s) => {
            expect_sign(s)?;
            Ok(LottoUtility::sign())
        }
        RawLottoPayoff::Table(t) => Ok(LottoUtility::Table(to_matrix(t)?)),
        RawLottoPayoff::Distance(d) => Ok(LottoUtility::Distance(build_distance(d)?)),
    }
}

fn build_finite_general_lotto(
    raw: RawFiniteGeneralLotto,
) -> Result<FiniteGeneralLottoSpec, CliError> {
    let utility = build_lotto_utility(&raw.payoff)?;
    // Feasible means over valid supports, and the utility covers the
    // support product: the same checks the solver would hit, surfaced as
    // input errors now.
    FiniteLottoOracle::new(&raw.support_a, Rational::from_integer(raw.a.into()))
        .map_err(invariant)?;
    FiniteLottoOracle::new(&raw.support_b, Rational::from_integer(raw.b.into()))
        .map_err(invariant)?;
    finite_lotto_payoff_form(&raw.support_a, &raw.support_b, &utility).map_err(invariant)?;
    Ok(FiniteGeneralLottoSpec {
        a: raw.a,
        b: raw.b,
        support_a: raw.support_a,
        support_b: raw.support_b,
        utility,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeneralLotto {
    #[serde(rename = "type")]
    _kind: String,
    a: u64,
    b: u64,
    payoff: RawLottoPayoff,
}

fn build_general_lotto(raw: RawGeneralLotto) -> Result<GeneralLottoSpec, CliError> {
    let utility = build_lotto_utility(&raw.payoff)?;
    if matches!(utility, LottoUtility::Table(_)) {
        return Err(CliError::Input(
            "general_lotto needs a distance payoff (\"sign\" or a distance table); \
             use finite_general_lotto for explicit payoff tables"
                .into(),
        ));
    }
    Ok(GeneralLottoSpec { a: raw.a, b: raw.b, utility })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPositionalDuel {
    #[serde(rename = "type")]
    _kind: String,
    p: Vec<RawRational>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatchingDuel {
    #[serde(rename = "type")]
    _kind: String,
    nodes: usize,
    p: Vec<RawRational>,
    edges: Vec<RawEdge>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    u: usize,
    v: usize,
    weight: RawRational,
}

fn build_matching_duel(raw: RawMatchingDuel) -> Result<DuelSpec, CliError> {
    let edges = raw
        .edges
        .iter()
        .map(|e| Ok(((e.u, e.v), to_rational(&e.weight)?)))
        .collect::<Result<Vec<_>, CliError>>()?;
    let graph = MatchingGraph::new(raw.nodes, edges).map_err(invariant)?;
    DuelSpec::matching(graph, to_rationals(&raw.p)?).map_err(invariant)
}

fn expect_sign(s: &str) -> Result<(), CliError> {
    if s == "sign" {
        Ok(())
    } else {
        Err(CliError::Input(format!(
            "unknown payoff shorthand {s:?}; the only shorthand is \"sign\""
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_sign_blotto_spec() {
        let spec = parse_spec_text(
            "type = \"blotto\"\na = 2\nb = 1\nk = 2\npayoff = \"sign\"\n",
        )
        .unwrap();
        let GameSpec::Blotto(b) = spec else { panic!("expected blotto") };
        assert_eq!((b.a(), b.b(), b.k()), (2, 1, 2));
    }

    #[test]
    fn parses_explicit_blotto_matrices() {
        let text = r#"
type = "blotto"
a = 1
b = 1
k = 2
payoff = [
  [[0, "1/2"], ["-1/2", 0]],
  [[0, -1], [1, 0]],
]
"#;
        let GameSpec::Blotto(b) = parse_spec_text(text).unwrap() else {
            panic!("expected blotto")
        };
        assert_eq!(b.payoffs().len(), 2);
    }

    #[test]
    fn rejects_schema_and_invariant_violations() {
        // Wrong matrix shape: three rows for a = 1.
        let bad_shape = r#"
type = "blotto"
a = 1
b = 1
k = 1
payoff = [[[0, 0], [0, 0], [0, 0]]]
"#;
        assert!(matches!(parse_spec_text(bad_shape), Err(CliError::Input(_))));

        let unknown_field = "type = \"blotto\"\na = 1\nb = 1\nk = 1\nx = 3\npayoff = \"sign\"\n";
        assert!(matches!(parse_spec_text(unknown_field), Err(CliError::Input(_))));

        let unknown_type = "type = \"chess\"\n";
        assert!(matches!(parse_spec_text(unknown_type), Err(CliError::Input(_))));

        // Threshold 0 is below the distance-utility minimum.
        let zero_threshold = r#"
type = "general_lotto"
a = 1
b = 1
payoff = { threshold = 0, maximum = 1, values = [-1, -1, 0, 1, 1] }
"#;
        assert!(matches!(parse_spec_text(zero_threshold), Err(CliError::Input(_))));

        // Mean outside the support hull.
        let bad_mean = r#"
type = "finite_general_lotto"
a = 9
b = 1
support_a = [0, 1, 2]
support_b = [0, 1, 2]
payoff = "sign"
"#;
        assert!(matches!(parse_spec_text(bad_mean), Err(CliError::Input(_))));
    }

    #[test]
    fn parses_duel_specs() {
        let ranking = "type = \"ranking_duel\"\np = [\"1/2\", \"1/2\"]\n";
        assert!(matches!(parse_spec_text(ranking), Ok(GameSpec::RankingDuel(_))));

        let matching = r#"
type = "matching_duel"
nodes = 4
p = ["1/4", "1/4", "1/4", "1/4"]
edges = [
  { u = 0, v = 1, weight = 2 },
  { u = 2, v = 3, weight = 1 },
]
"#;
        assert!(matches!(parse_spec_text(matching), Ok(GameSpec::MatchingDuel(_))));

        let odd = r#"
type = "matching_duel"
nodes = 3
p = ["1/3", "1/3", "1/3"]
edges = [{ u = 0, v = 1, weight = 1 }, { u = 1, v = 2, weight = 1 }]
"#;
        assert!(matches!(parse_spec_text(odd), Err(CliError::Input(_))));
    }

    #[test]
    fn parses_distance_payoffs() {
        let text = r#"
type = "general_lotto"
a = 2
b = 3
payoff = { threshold = 2, maximum = 2, values = [-2, -2, -2, -1, 0, 1, 2, 2, 2] }
"#;
        let GameSpec::GeneralLotto(g) = parse_spec_text(text).unwrap() else {
            panic!("expected general lotto")
        };
        assert_eq!((g.a, g.b), (2, 3));

        // A non-monotone sample list fails the library validation.
        let wiggle = r#"
type = "general_lotto"
a = 1
b = 1
payoff = { threshold = 1, maximum = 1, values = [-1, -1, 0, 1, 1, 0, 1] }
"#;
        assert!(matches!(parse_spec_text(wiggle), Err(CliError::Input(_))));
    }
}
