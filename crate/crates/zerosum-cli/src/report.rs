//! Equilibrium reports: byte-stable TOML out, validated TOML back in.
//!
//! Every number is an exact rational string; nothing in a report depends on
//! timing or environment, so a fixed spec always reproduces the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use zerosum::blotto::TroopPartition;
use zerosum::duels::{BstVertex, MatchingVertex, RankingVertex};
use zerosum::lotto::FiniteLottoStrategy;
use zerosum::ratlp::Rational;

use crate::error::CliError;
use crate::rational::{format_rational, to_rational, RawRational};

/// One pure strategy in a player's support, in the game's native encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexRepr {
    /// Troops per battlefield (Blotto) or corps sizes (Colonel Lotto).
    Partition(Vec<usize>),
    /// A bid distribution: support values with matching probabilities.
    Lotto { values: Vec<u64>, weights: Vec<Rational> },
    /// Position of each page under a ranking.
    Positions(Vec<usize>),
    /// Depth of each key in a search tree, root depth 1.
    Depths(Vec<usize>),
    /// Edge indices of a perfect matching.
    Edges(Vec<usize>),
}

impl VertexRepr {
    pub fn partition(t: &TroopPartition) -> Self {
        VertexRepr::Partition(t.allocations.clone())
    }

    pub fn lotto(s: &FiniteLottoStrategy) -> Self {
        VertexRepr::Lotto { values: s.support().to_vec(), weights: s.probs().to_vec() }
    }

    pub fn ranking(v: &RankingVertex) -> Self {
        VertexRepr::Positions(v.positions().to_vec())
    }

    pub fn bst(v: &BstVertex) -> Self {
        VertexRepr::Depths(v.depths().to_vec())
    }

    pub fn matching(v: &MatchingVertex) -> Self {
        VertexRepr::Edges(v.edges().to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEntry {
    pub probability: Rational,
    pub vertex: VertexRepr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub game: String,
    pub value: Rational,
    pub gap_a: Rational,
    pub gap_b: Rational,
    pub iterations: usize,
    pub vertices_a: usize,
    pub vertices_b: usize,
    /// Bid bounds of the finite reduction; general_lotto only.
    pub bounds: Option<(u64, u64)>,
    pub support_a: Vec<SupportEntry>,
    pub support_b: Vec<SupportEntry>,
}

fn usize_list(values: &[usize]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn u64_list(values: &[u64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn rational_list(values: &[Rational]) -> String {
    let parts: Vec<String> =
        values.iter().map(|v| format!("\"{}\"", format_rational(v))).collect();
    format!("[{}]", parts.join(", "))
}

/// The vertex's own lines of a support entry, shared with the oracle
/// command's output.
pub fn vertex_fields(vertex: &VertexRepr) -> String {
    match vertex {
        VertexRepr::Partition(parts) => format!("partition = {}\n", usize_list(parts)),
        VertexRepr::Lotto { values, weights } => format!(
            "values = {}\nweights = {}\n",
            u64_list(values),
            rational_list(weights)
        ),
        VertexRepr::Positions(p) => format!("positions = {}\n", usize_list(p)),
        VertexRepr::Depths(d) => format!("depths = {}\n", usize_list(d)),
        VertexRepr::Edges(e) => format!("edges = {}\n", usize_list(e)),
    }
}

pub fn render(report: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "game = \"{}\"", report.game);
    let _ = writeln!(out, "value = \"{}\"", format_rational(&report.value));
    let _ = writeln!(out, "gap_a = \"{}\"", format_rational(&report.gap_a));
    let _ = writeln!(out, "gap_b = \"{}\"", format_rational(&report.gap_b));
    let _ = writeln!(out, "iterations = {}", report.iterations);
    let _ = writeln!(out, "vertices_a = {}", report.vertices_a);
    let _ = writeln!(out, "vertices_b = {}", report.vertices_b);
    if let Some((u_hat, u_bar)) = report.bounds {
        let _ = writeln!(out, "u_hat = {u_hat}");
        let _ = writeln!(out, "u_bar = {u_bar}");
    }
    for (section, entries) in [("support_a", &report.support_a), ("support_b", &report.support_b)]
    {
        for entry in entries {
            let _ = writeln!(out, "\n[[{section}]]");
            let _ =
                writeln!(out, "probability = \"{}\"", format_rational(&entry.probability));
            out.push_str(&vertex_fields(&entry.vertex));
        }
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReport {
    game: String,
    value: RawRational,
    gap_a: RawRational,
    gap_b: RawRational,
    iterations: usize,
    vertices_a: usize,
    vertices_b: usize,
    u_hat: Option<u64>,
    u_bar: Option<u64>,
    #[serde(default)]
    support_a: Vec<RawSupportEntry>,
    #[serde(default)]
    support_b: Vec<RawSupportEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSupportEntry {
    probability: RawRational,
    partition: Option<Vec<usize>>,
    values: Option<Vec<u64>>,
    weights: Option<Vec<RawRational>>,
    positions: Option<Vec<usize>>,
    depths: Option<Vec<usize>>,
    edges: Option<Vec<usize>>,
}

fn convert_entry(raw: &RawSupportEntry) -> Result<SupportEntry, CliError> {
    let probability = to_rational(&raw.probability)?;
    let mut vertices = Vec::new();
    if let Some(p) = &raw.partition {
        vertices.push(VertexRepr::Partition(p.clone()));
    }
    match (&raw.values, &raw.weights) {
        (Some(values), Some(weights)) => {
            let weights =
                weights.iter().map(to_rational).collect::<Result<Vec<_>, _>>()?;
            vertices.push(VertexRepr::Lotto { values: values.clone(), weights });
        }
        (None, None) => {}
        _ => {
            return Err(CliError::Input(
                "a bid-distribution entry needs both values and weights".into(),
            ))
        }
    }
    if let Some(p) = &raw.positions {
        vertices.push(VertexRepr::Positions(p.clone()));
    }
    if let Some(d) = &raw.depths {
        vertices.push(VertexRepr::Depths(d.clone()));
    }
    if let Some(e) = &raw.edges {
        vertices.push(VertexRepr::Edges(e.clone()));
    }
    if vertices.len() != 1 {
        return Err(CliError::Input(format!(
            "each support entry must carry exactly one strategy encoding, got {}",
            vertices.len()
        )));
    }
    Ok(SupportEntry { probability, vertex: vertices.pop().expect("length checked") })
}

pub fn read_report(path: &Path) -> Result<Report, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_report_text(&text)
}

pub fn parse_report_text(text: &str) -> Result<Report, CliError> {
    let raw: RawReport =
        toml::from_str(text).map_err(|e| CliError::Input(e.message().to_string()))?;
    let bounds = match (raw.u_hat, raw.u_bar) {
        (Some(h), Some(b)) => Some((h, b)),
        (None, None) => None,
        _ => {
            return Err(CliError::Input(
                "u_hat and u_bar must appear together".into(),
            ))
        }
    };
    Ok(Report {
        game: raw.game,
        value: to_rational(&raw.value)?,
        gap_a: to_rational(&raw.gap_a)?,
        gap_b: to_rational(&raw.gap_b)?,
        iterations: raw.iterations,
        vertices_a: raw.vertices_a,
        vertices_b: raw.vertices_b,
        bounds,
        support_a: raw.support_a.iter().map(convert_entry).collect::<Result<_, _>>()?,
        support_b: raw.support_b.iter().map(convert_entry).collect::<Result<_, _>>()?,
    })
}
