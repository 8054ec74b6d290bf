//! The bruteforce command: enumerate every pure strategy, build the full
//! payoff matrix, and solve it as one linear program.
//!
//! This is the reference the oracle-driven solver is checked against, so it
//! shares no code with the oracles: payoffs are computed directly from the
//! game definition. Strategy counts are estimated before enumerating, so a
//! too-large instance exits with a resource-limit error instead of thrashing.

use std::collections::HashMap;
use std::path::Path;

use num_traits::Zero;
use zerosum::blotto::{blotto_payoff_pure, TroopPartition};
use zerosum::duels::{DuelSpec, MatchingGraph};
use zerosum::lotto::{lotto_payoff, paired_strategy, FiniteLottoStrategy, LottoUtility};
use zerosum::ratlp::{matrix_game_solve, ratio, Rational};

use crate::error::CliError;
use crate::report::{render, Report, SupportEntry, VertexRepr};
use crate::spec::{parse_spec, FiniteGeneralLottoSpec, GameSpec};

pub fn cmd_bruteforce(spec_path: &Path, cap: u64) -> Result<(), CliError> {
    let spec = parse_spec(spec_path)?;
    let report = bruteforce_report(&spec, cap)?;
    print!("{}", render(&report));
    Ok(())
}

/// Solves a parsed game by full enumeration, refusing instances whose
/// pure-strategy matrix would exceed `cap` entries.
pub fn bruteforce_report(spec: &GameSpec, cap: u64) -> Result<Report, CliError> {
    match spec {
        GameSpec::Blotto(b) => {
            let (xs, ys) = enumerate_sides(
                cap,
                || count_compositions(b.a(), b.k()),
                || count_compositions(b.b(), b.k()),
                || compositions(b.a(), b.k()),
                || compositions(b.b(), b.k()),
            )?;
            let payoff = |x: &TroopPartition, y: &TroopPartition| blotto_payoff_pure(b, x, y);
            solve_full_matrix(spec.type_name(), &xs, &ys, payoff, VertexRepr::partition, None)
        }
        GameSpec::ColonelLotto(l) => {
            let (xs, ys) = enumerate_sides(
                cap,
                || count_corps_splits(l.a(), l.k()),
                || count_corps_splits(l.b(), l.k()),
                || corps_splits(l.a(), l.k()),
                || corps_splits(l.b(), l.k()),
            )?;
            let scale = ratio(1, (l.k() * l.k()) as i64);
            let table = l.payoff();
            let payoff = |x: &TroopPartition, y: &TroopPartition| {
                let mut total = Rational::zero();
                for &xi in &x.allocations {
                    for &yj in &y.allocations {
                        total += &table[xi][yj];
                    }
                }
                total * &scale
            };
            solve_full_matrix(spec.type_name(), &xs, &ys, payoff, VertexRepr::partition, None)
        }
        GameSpec::FiniteGeneralLotto(f) => {
            bruteforce_lotto(spec.type_name(), f, cap, None)
        }
        GameSpec::GeneralLotto(g) => {
            let LottoUtility::Distance(d) = &g.utility else {
                return Err(CliError::Input(
                    "general_lotto always carries a distance payoff".into(),
                ));
            };
            let (u_hat, u_bar) = zerosum::lotto::support_bound(g.a.max(g.b), d.threshold())
                .map_err(|e| CliError::ResourceLimit(e.to_string()))?;
            let support: Vec<u64> = (0..=u_bar).collect();
            let finite = FiniteGeneralLottoSpec {
                a: g.a,
                b: g.b,
                support_a: support.clone(),
                support_b: support,
                utility: g.utility.clone(),
            };
            bruteforce_lotto(spec.type_name(), &finite, cap, Some((u_hat, u_bar)))
        }
        GameSpec::RankingDuel(d) => {
            let m = d.probabilities().len();
            let (xs, ys) =
                enumerate_sides(cap, || factorial(m), || factorial(m), || permutations(m), || {
                    permutations(m)
                })?;
            let payoff = |x: &Vec<usize>, y: &Vec<usize>| level_duel_payoff(d, x, y);
            solve_full_matrix(
                spec.type_name(),
                &xs,
                &ys,
                payoff,
                |v| VertexRepr::Positions(v.clone()),
                None,
            )
        }
        GameSpec::BstDuel(d) => {
            let m = d.probabilities().len();
            let (xs, ys) =
                enumerate_sides(cap, || catalan(m), || catalan(m), || bst_layouts(m), || {
                    bst_layouts(m)
                })?;
            let payoff = |x: &Vec<usize>, y: &Vec<usize>| level_duel_payoff(d, x, y);
            solve_full_matrix(
                spec.type_name(),
                &xs,
                &ys,
                payoff,
                |v| VertexRepr::Depths(v.clone()),
                None,
            )
        }
        GameSpec::MatchingDuel(d) => {
            let graph = d.graph().expect("matching duels carry a graph");
            let (xs, ys) = enumerate_sides(
                cap,
                || count_matchings(graph),
                || count_matchings(graph),
                || matchings(graph),
                || matchings(graph),
            )?;
            let payoff =
                |x: &Vec<usize>, y: &Vec<usize>| matching_duel_payoff(graph, d.probabilities(), x, y);
            solve_full_matrix(
                spec.type_name(),
                &xs,
                &ys,
                payoff,
                |v| VertexRepr::Edges(v.clone()),
                None,
            )
        }
    }
}

fn bruteforce_lotto(
    game: &str,
    f: &FiniteGeneralLottoSpec,
    cap: u64,
    bounds: Option<(u64, u64)>,
) -> Result<Report, CliError> {
    let mean_a = Rational::from_integer(f.a.into());
    let mean_b = Rational::from_integer(f.b.into());
    let (xs, ys) = enumerate_sides(
        cap,
        || count_lotto_vertices(&f.support_a, &mean_a),
        || count_lotto_vertices(&f.support_b, &mean_b),
        || lotto_vertices(&f.support_a, &mean_a),
        || lotto_vertices(&f.support_b, &mean_b),
    )?;
    let payoff = |x: &FiniteLottoStrategy, y: &FiniteLottoStrategy| {
        lotto_payoff(x, y, &f.utility).expect("spec validation covered the supports")
    };
    solve_full_matrix(game, &xs, &ys, payoff, VertexRepr::lotto, bounds)
}

/// Checks the matrix size against the cap before building anything big.
/// Counts saturate at u128::MAX, which always exceeds any cap.
fn enumerate_sides<P>(
    cap: u64,
    count_a: impl Fn() -> u128,
    count_b: impl Fn() -> u128,
    build_a: impl Fn() -> Vec<P>,
    build_b: impl Fn() -> Vec<P>,
) -> Result<(Vec<P>, Vec<P>), CliError> {
    let (na, nb) = (count_a(), count_b());
    let product = na.saturating_mul(nb);
    if product > u128::from(cap) {
        return Err(CliError::ResourceLimit(format!(
            "{na} x {nb} pure-strategy pairs exceed the cap of {cap}"
        )));
    }
    Ok((build_a(), build_b()))
}

fn solve_full_matrix<P>(
    game: &str,
    pures_a: &[P],
    pures_b: &[P],
    payoff: impl Fn(&P, &P) -> Rational,
    repr: impl Fn(&P) -> VertexRepr,
    bounds: Option<(u64, u64)>,
) -> Result<Report, CliError> {
    let matrix: Vec<Vec<Rational>> = pures_a
        .iter()
        .map(|x| pures_b.iter().map(|y| payoff(x, y)).collect())
        .collect();
    let solution = matrix_game_solve(&matrix).map_err(|e| CliError::Solver(e.to_string()))?;

    // An optimal matrix-game solution has zero gap on both sides; recompute
    // them anyway so the certificate in the report is measured, not assumed.
    let value = &solution.value;
    let mut best_row: Option<Rational> = None;
    for row in &matrix {
        let attained: Rational =
            row.iter().zip(&solution.col_strategy).map(|(m, q)| m * q).sum();
        best_row = Some(best_row.map_or(attained.clone(), |b| b.max(attained)));
    }
    let mut best_col: Option<Rational> = None;
    for j in 0..pures_b.len() {
        let attained: Rational =
            matrix.iter().zip(&solution.row_strategy).map(|(row, p)| &row[j] * p).sum();
        best_col = Some(best_col.map_or(attained.clone(), |b| b.min(attained)));
    }
    let gap_a = best_row.map_or_else(Rational::zero, |b| b - value);
    let gap_b = best_col.map_or_else(Rational::zero, |b| value - b);

    let support = |pures: &[P], weights: &[Rational]| {
        pures
            .iter()
            .zip(weights)
            .filter(|(_, w)| !w.is_zero())
            .map(|(p, w)| SupportEntry { probability: w.clone(), vertex: repr(p) })
            .collect::<Vec<_>>()
    };
    Ok(Report {
        game: game.to_string(),
        value: solution.value.clone(),
        gap_a,
        gap_b,
        iterations: 0,
        vertices_a: pures_a.len(),
        vertices_b: pures_b.len(),
        bounds,
        support_a: support(pures_a, &solution.row_strategy),
        support_b: support(pures_b, &solution.col_strategy),
    })
}

/// Both players serve every situation at some level; lower level wins it.
fn level_duel_payoff(spec: &DuelSpec, x: &[usize], y: &[usize]) -> Rational {
    let mut total = Rational::zero();
    for (p, (xi, yi)) in spec.probabilities().iter().zip(x.iter().zip(y)) {
        match xi.cmp(yi) {
            std::cmp::Ordering::Less => total += p,
            std::cmp::Ordering::Greater => total -= p,
            std::cmp::Ordering::Equal => {}
        }
    }
    total
}

/// Each node is served by the edge covering it; higher weight wins it.
fn matching_duel_payoff(
    graph: &MatchingGraph,
    p: &[Rational],
    x: &[usize],
    y: &[usize],
) -> Rational {
    let serve = |matching: &[usize]| {
        let mut weight = vec![None; graph.nodes()];
        for &e in matching {
            let (a, b) = graph.edges()[e];
            weight[a] = Some(&graph.weights()[e]);
            weight[b] = Some(&graph.weights()[e]);
        }
        weight
    };
    let (wx, wy) = (serve(x), serve(y));
    let mut total = Rational::zero();
    for (node, pi) in p.iter().enumerate() {
        let (a, b) = (wx[node].expect("perfect matching"), wy[node].expect("perfect matching"));
        match a.cmp(b) {
            std::cmp::Ordering::Greater => total += pi,
            std::cmp::Ordering::Less => total -= pi,
            std::cmp::Ordering::Equal => {}
        }
    }
    total
}

// Saturating counting helpers; u128::MAX stands in for "too many".

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 1..=k {
        let Some(next) = acc.checked_mul(u128::from(n - k + i)) else {
            return u128::MAX;
        };
        acc = next / u128::from(i);
    }
    acc
}

fn count_compositions(total: usize, parts: usize) -> u128 {
    binomial((total + parts - 1) as u64, (parts - 1) as u64)
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).try_fold(1u128, |acc, i| acc.checked_mul(i)).unwrap_or(u128::MAX)
}

fn catalan(m: usize) -> u128 {
    let b = binomial(2 * m as u64, m as u64);
    if b == u128::MAX {
        u128::MAX
    } else {
        b / (m as u128 + 1)
    }
}

fn count_corps_splits(total: usize, parts: usize) -> u128 {
    fn rec(
        total: usize,
        parts: usize,
        max: usize,
        memo: &mut HashMap<(usize, usize, usize), u128>,
    ) -> u128 {
        if parts == 0 {
            return u128::from(total == 0);
        }
        if let Some(&c) = memo.get(&(total, parts, max)) {
            return c;
        }
        let mut acc: u128 = 0;
        for first in 0..=total.min(max) {
            acc = acc.saturating_add(rec(total - first, parts - 1, first, memo));
        }
        memo.insert((total, parts, max), acc);
        acc
    }
    rec(total, parts, total, &mut HashMap::new())
}

fn count_lotto_vertices(support: &[u64], mean: &Rational) -> u128 {
    let singles = support.iter().filter(|&&v| &Rational::from_integer(v.into()) == mean).count();
    let lows = support.iter().filter(|&&v| &Rational::from_integer(v.into()) < mean).count();
    let highs = support.iter().filter(|&&v| &Rational::from_integer(v.into()) > mean).count();
    singles as u128 + (lows as u128) * (highs as u128)
}

fn count_matchings(graph: &MatchingGraph) -> u128 {
    fn rec(graph: &MatchingGraph, covered: u32, memo: &mut HashMap<u32, u128>) -> u128 {
        let Some(low) = (0..graph.nodes()).find(|&n| covered & (1 << n) == 0) else {
            return 1;
        };
        if let Some(&c) = memo.get(&covered) {
            return c;
        }
        let mut acc: u128 = 0;
        for &(a, b) in graph.edges() {
            let other = match (a == low, b == low) {
                (true, _) => b,
                (_, true) => a,
                _ => continue,
            };
            if covered & (1 << other) == 0 {
                acc = acc.saturating_add(rec(graph, covered | 1 << a | 1 << b, memo));
            }
        }
        memo.insert(covered, acc);
        acc
    }
    rec(graph, 0, &mut HashMap::new())
}

// Enumerators, called only after the count cleared the cap. Orders are
// fixed so reports stay byte-stable.

fn compositions(total: usize, parts: usize) -> Vec<TroopPartition> {
    fn rec(total: usize, parts: usize, prefix: &mut Vec<usize>, out: &mut Vec<TroopPartition>) {
        if parts == 1 {
            prefix.push(total);
            out.push(TroopPartition { allocations: prefix.clone() });
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Splits of `total` into exactly `parts` nonincreasing summands.
fn corps_splits(total: usize, parts: usize) -> Vec<TroopPartition> {
    fn rec(
        total: usize,
        parts: usize,
        max: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<TroopPartition>,
    ) {
        if parts == 0 {
            if total == 0 {
                out.push(TroopPartition { allocations: prefix.clone() });
            }
            return;
        }
        for first in (0..=total.min(max)).rev() {
            prefix.push(first);
            rec(total - first, parts - 1, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, parts, total, &mut Vec::new(), &mut out);
    out
}

/// Vertices of the fixed-mean polytope: point masses at the mean and
/// two-point distributions straddling it.
fn lotto_vertices(support: &[u64], mean: &Rational) -> Vec<FiniteLottoStrategy> {
    let mut out = Vec::new();
    for &v in support {
        if &Rational::from_integer(v.into()) == mean {
            out.push(FiniteLottoStrategy::delta(v));
        }
    }
    for &lo in support.iter().filter(|&&v| &Rational::from_integer(v.into()) < mean) {
        for &hi in support.iter().filter(|&&v| &Rational::from_integer(v.into()) > mean) {
            let paired = paired_strategy(lo, hi, mean.clone())
                .expect("mean lies strictly between lo and hi");
            out.push(paired.strategy());
        }
    }
    out
}

fn permutations(m: usize) -> Vec<Vec<usize>> {
    fn rec(remaining: &mut Vec<usize>, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            prefix.push(v);
            rec(remaining, prefix, out);
            prefix.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut (0..m).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    out
}

/// All valid depth vectors of search trees over keys 0..m.
fn bst_layouts(m: usize) -> Vec<Vec<usize>> {
    fn rec(lo: usize, hi: usize, depth: usize, out: &mut Vec<Vec<usize>>) {
        if lo > hi {
            out.push(Vec::new());
            return;
        }
        for root in lo..=hi {
            let mut lefts = Vec::new();
            if root > lo {
                rec(lo, root - 1, depth + 1, &mut lefts);
            } else {
                lefts.push(Vec::new());
            }
            let mut rights = Vec::new();
            rec(root + 1, hi, depth + 1, &mut rights);
            for left in &lefts {
                for right in &rights {
                    let mut depths = left.clone();
                    depths.push(depth);
                    depths.extend_from_slice(right);
                    out.push(depths);
                }
            }
        }
    }
    let mut out = Vec::new();
    if m > 0 {
        rec(0, m - 1, 1, &mut out);
    }
    out
}

fn matchings(graph: &MatchingGraph) -> Vec<Vec<usize>> {
    fn rec(
        graph: &MatchingGraph,
        covered: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let Some(low) = covered.iter().position(|c| !c) else {
            let mut m = chosen.clone();
            m.sort_unstable();
            out.push(m);
            return;
        };
        for (e, &(a, b)) in graph.edges().iter().enumerate() {
            let other = match (a == low, b == low) {
                (true, _) => b,
                (_, true) => a,
                _ => continue,
            };
            if covered[other] {
                continue;
            }
            covered[low] = true;
            covered[other] = true;
            chosen.push(e);
            rec(graph, covered, chosen, out);
            chosen.pop();
            covered[low] = false;
            covered[other] = false;
        }
    }
    let mut out = Vec::new();
    rec(graph, &mut vec![false; graph.nodes()], &mut Vec::new(), &mut out);
    out
}
