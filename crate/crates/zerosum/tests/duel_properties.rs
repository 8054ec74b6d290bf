//! Cross-checks for the dueling games: every specialized oracle is compared
//! against exhaustive enumeration of its strategy set, marginal-space
//! payoffs are compared against direct win-minus-loss probabilities on pure
//! strategies, and solved equilibria are re-certified with fresh oracle
//! calls.

use itertools::Itertools;
use num_traits::{Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use zerosum::duels::{
    bst_oracle, duel_payoff_form, matching_duel_payoff_form, matching_oracle,
    positional_duel_payoff_form, ranking_oracle, solve_duel, BstOracle, BstVertex, DuelEquilibrium,
    DuelSpec, MatchingGraph, MatchingOracle, MatchingVertex, RankingOracle, RankingVertex,
};
use zerosum::ratlp::{rat, ratio, Rational, Sense};
use zerosum::solver::{best_response, MarginalVector, PayoffForm, Side, VertexOracle};

fn random_rational(rng: &mut StdRng) -> Rational {
    ratio(rng.gen_range(-12..=12), rng.gen_range(1..=4))
}

fn random_table(rng: &mut StdRng, m: usize) -> Vec<Vec<Rational>> {
    (0..m).map(|_| (0..m).map(|_| random_rational(rng)).collect()).collect()
}

fn random_distribution(rng: &mut StdRng, m: usize) -> Vec<Rational> {
    let weights: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=6)).collect();
    let total: i64 = weights.iter().sum();
    if total == 0 {
        return vec![ratio(1, m as i64); m];
    }
    weights.iter().map(|&w| ratio(w, total)).collect()
}

fn table_score(table: &[Vec<Rational>], positions: &[usize]) -> Rational {
    positions.iter().enumerate().map(|(i, &j)| table[i][j].clone()).sum()
}

#[test]
fn ranking_oracle_matches_permutation_enumeration() {
    let mut rng = StdRng::seed_from_u64(41);
    for case in 0..120 {
        let m = rng.gen_range(1..=5);
        let table = random_table(&mut rng, m);
        for sense in [Sense::Minimize, Sense::Maximize] {
            let got = ranking_oracle(&table, sense).unwrap();
            let got_score = table_score(&table, got.positions());
            let best = (0..m)
                .permutations(m)
                .map(|p| table_score(&table, &p))
                .reduce(|a, b| match sense {
                    Sense::Minimize => a.min(b),
                    Sense::Maximize => a.max(b),
                })
                .unwrap();
            assert_eq!(got_score, best, "case {case}, m {m}, {sense:?}");
        }
    }
}

/// All BST depth vectors over keys lo..=hi with the subtree root at depth
/// k, roots tried in ascending key order.
fn enumerate_bsts(lo: usize, hi: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    if lo > hi {
        out.push(Vec::new());
        return;
    }
    let mut all = Vec::new();
    for root in lo..=hi {
        let mut lefts = Vec::new();
        if root > lo {
            enumerate_bsts(lo, root - 1, k + 1, &mut lefts);
        } else {
            lefts.push(Vec::new());
        }
        // An empty right interval contributes the single empty layout via
        // the base case, so the product below is never vacuous.
        let mut rights = Vec::new();
        enumerate_bsts(root + 1, hi, k + 1, &mut rights);
        for left in &lefts {
            for right in &rights {
                let mut depths = left.clone();
                depths.push(k);
                depths.extend_from_slice(right);
                all.push(depths);
            }
        }
    }
    out.extend(all);
}

fn depth_score(table: &[Vec<Rational>], depths: &[usize]) -> Rational {
    depths.iter().enumerate().map(|(i, &d)| table[i][d - 1].clone()).sum()
}

#[test]
fn bst_oracle_matches_tree_enumeration() {
    let mut rng = StdRng::seed_from_u64(42);
    for case in 0..120 {
        let m = rng.gen_range(1..=6);
        let table = random_table(&mut rng, m);
        let mut trees = Vec::new();
        enumerate_bsts(0, m - 1, 1, &mut trees);
        for depths in &trees {
            // Every enumerated vector really is a tree.
            BstVertex::new(depths.clone()).unwrap();
        }
        for sense in [Sense::Minimize, Sense::Maximize] {
            let got = bst_oracle(&table, sense).unwrap();
            let got_score = depth_score(&table, got.depths());

            // First optimum in enumeration order equals the oracle's
            // smallest-root tie-break, so the whole depth vector must agree.
            let best = trees
                .iter()
                .min_by_key(|d| {
                    let s = depth_score(&table, d);
                    match sense {
                        Sense::Minimize => s,
                        Sense::Maximize => -s,
                    }
                })
                .unwrap();
            assert_eq!(got_score, depth_score(&table, best), "case {case}, m {m}, {sense:?}");
            assert_eq!(got.depths(), best.as_slice(), "case {case}, m {m}, {sense:?}");
        }
    }
}

fn random_matchable_graph(rng: &mut StdRng, nodes: usize) -> MatchingGraph {
    loop {
        let mut edges = Vec::new();
        for a in 0..nodes {
            for b in (a + 1)..nodes {
                if rng.gen_bool(0.55) {
                    edges.push(((a, b), ratio(rng.gen_range(-20..=20), rng.gen_range(1..=3))));
                }
            }
        }
        let Ok(graph) = MatchingGraph::new(nodes, edges) else {
            continue;
        };
        if MatchingOracle::new(&graph).is_ok() {
            return graph;
        }
    }
}

/// All perfect matchings as sorted edge-index sets, matching the lowest
/// uncovered node first.
fn enumerate_matchings(graph: &MatchingGraph) -> Vec<Vec<usize>> {
    fn extend(
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
            let other = if a == low {
                b
            } else if b == low {
                a
            } else {
                continue;
            };
            if covered[other] {
                continue;
            }
            covered[low] = true;
            covered[other] = true;
            chosen.push(e);
            extend(graph, covered, chosen, out);
            chosen.pop();
            covered[low] = false;
            covered[other] = false;
        }
    }
    let mut out = Vec::new();
    extend(graph, &mut vec![false; graph.nodes()], &mut Vec::new(), &mut out);
    out
}

#[test]
fn matching_oracle_matches_matching_enumeration() {
    let mut rng = StdRng::seed_from_u64(43);
    for case in 0..120 {
        let nodes = 2 * rng.gen_range(1..=4);
        let graph = random_matchable_graph(&mut rng, nodes);
        let alpha: Vec<Rational> =
            (0..graph.edges().len()).map(|_| random_rational(&mut rng)).collect();
        let matchings = enumerate_matchings(&graph);
        assert!(!matchings.is_empty());
        for sense in [Sense::Minimize, Sense::Maximize] {
            let got = matching_oracle(&graph, &alpha, sense).unwrap();
            let score =
                |m: &[usize]| -> Rational { m.iter().map(|&e| alpha[e].clone()).sum() };
            let best_score = matchings
                .iter()
                .map(|m| score(m))
                .reduce(|a, b| match sense {
                    Sense::Minimize => a.min(b),
                    Sense::Maximize => a.max(b),
                })
                .unwrap();
            assert_eq!(score(got.edges()), best_score, "case {case}, {sense:?}");

            // Among the optima, the oracle returns the lexicographically
            // smallest edge-index set.
            let lex_best = matchings
                .iter()
                .filter(|m| score(m) == best_score)
                .min()
                .unwrap();
            assert_eq!(got.edges(), lex_best.as_slice(), "case {case}, {sense:?}");
        }
    }
}

/// Win-minus-loss probability computed straight from the element
/// distribution and each player's cost per element.
fn direct_payoff(p: &[Rational], cost_a: &[usize], cost_b: &[usize]) -> Rational {
    let mut total = Rational::zero();
    for (i, pi) in p.iter().enumerate() {
        match cost_a[i].cmp(&cost_b[i]) {
            std::cmp::Ordering::Less => total += pi,
            std::cmp::Ordering::Greater => total -= pi,
            std::cmp::Ordering::Equal => {}
        }
    }
    total
}

#[test]
fn positional_payoff_matches_direct_probability() {
    let mut rng = StdRng::seed_from_u64(44);
    for _ in 0..150 {
        let m = rng.gen_range(1..=5);
        let p = random_distribution(&mut rng, m);
        let form = positional_duel_payoff_form(&p).unwrap();

        // A random pure pair, drawn from either duel's vertex set.
        let (xm, x_costs, ym, y_costs): (MarginalVector, Vec<usize>, MarginalVector, Vec<usize>);
        if rng.gen_bool(0.5) {
            let mut perm: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let x = RankingVertex::new(perm.clone()).unwrap();
            let mut perm2: Vec<usize> = (0..m).collect();
            for i in (1..m).rev() {
                perm2.swap(i, rng.gen_range(0..=i));
            }
            let y = RankingVertex::new(perm2.clone()).unwrap();
            // Ranked position j means j + 1 probes to reach the page.
            (xm, x_costs) = (x.marginal(), perm.iter().map(|&j| j + 1).collect());
            (ym, y_costs) = (y.marginal(), perm2.iter().map(|&j| j + 1).collect());
        } else {
            let mut trees = Vec::new();
            enumerate_bsts(0, m - 1, 1, &mut trees);
            let dx = trees[rng.gen_range(0..trees.len())].clone();
            let dy = trees[rng.gen_range(0..trees.len())].clone();
            let x = BstVertex::new(dx.clone()).unwrap();
            let y = BstVertex::new(dy.clone()).unwrap();
            (xm, x_costs) = (x.marginal(), dx);
            (ym, y_costs) = (y.marginal(), dy);
        }

        assert_eq!(form.eval(&xm, &ym), direct_payoff(&p, &x_costs, &y_costs));
        // Skew symmetry of the underlying game.
        assert_eq!(form.eval(&ym, &xm), -form.eval(&xm, &ym));
        assert_eq!(form.eval(&xm, &xm), rat(0));
    }
}

#[test]
fn matching_payoff_matches_direct_probability() {
    let mut rng = StdRng::seed_from_u64(45);
    for _ in 0..150 {
        let nodes = 2 * rng.gen_range(1..=4);
        let graph = random_matchable_graph(&mut rng, nodes);
        let p = random_distribution(&mut rng, nodes);
        let form = matching_duel_payoff_form(&graph, &p).unwrap();

        let matchings = enumerate_matchings(&graph);
        let mx = matchings[rng.gen_range(0..matchings.len())].clone();
        let my = matchings[rng.gen_range(0..matchings.len())].clone();
        let x = MatchingVertex::new(&graph, mx.clone()).unwrap();
        let y = MatchingVertex::new(&graph, my.clone()).unwrap();

        // A node is served at the weight of its matched edge; the heavier
        // edge wins the node.
        let serve = |matching: &[usize]| -> Vec<&Rational> {
            let mut at: Vec<Option<&Rational>> = vec![None; nodes];
            for &e in matching {
                let (a, b) = graph.edges()[e];
                at[a] = Some(&graph.weights()[e]);
                at[b] = Some(&graph.weights()[e]);
            }
            at.into_iter().map(|w| w.expect("perfect matching covers all")).collect()
        };
        let wx = serve(&mx);
        let wy = serve(&my);
        let mut expected = Rational::zero();
        for (i, pi) in p.iter().enumerate() {
            match wx[i].cmp(wy[i]) {
                std::cmp::Ordering::Greater => expected += pi,
                std::cmp::Ordering::Less => expected -= pi,
                std::cmp::Ordering::Equal => {}
            }
        }

        assert_eq!(form.eval(&x.marginal(), &y.marginal()), expected);
        assert_eq!(form.eval(&y.marginal(), &x.marginal()), -expected);
    }
}

#[test]
fn solved_duels_are_certified_exactly() {
    let mut rng = StdRng::seed_from_u64(46);

    for case in 0..12 {
        let m = rng.gen_range(2..=4);
        let p = random_distribution(&mut rng, m);
        let spec = if case % 2 == 0 {
            DuelSpec::ranking(p.clone()).unwrap()
        } else {
            DuelSpec::bst(p.clone()).unwrap()
        };
        let eq = solve_duel(&spec).unwrap();
        assert_eq!(*eq.value(), rat(0), "case {case}");
        let payoff = duel_payoff_form(&spec);
        match eq {
            DuelEquilibrium::Ranking(eq) => {
                let oracle = RankingOracle::new(m);
                let (_, fb) =
                    best_response(&payoff, &oracle, &eq.strategy_a.marginal(), Side::B).unwrap();
                let (_, fa) =
                    best_response(&payoff, &oracle, &eq.strategy_b.marginal(), Side::A).unwrap();
                assert!(fb.is_zero() && fa.is_zero(), "case {case}");
            }
            DuelEquilibrium::Bst(eq) => {
                let oracle = BstOracle::new(m);
                let (_, fb) =
                    best_response(&payoff, &oracle, &eq.strategy_a.marginal(), Side::B).unwrap();
                let (_, fa) =
                    best_response(&payoff, &oracle, &eq.strategy_b.marginal(), Side::A).unwrap();
                assert!(fb.is_zero() && fa.is_zero(), "case {case}");
            }
            DuelEquilibrium::Matching(_) => unreachable!("no matching specs in this loop"),
        }
    }

    for case in 0..6 {
        let nodes = 2 * rng.gen_range(2..=3);
        let graph = random_matchable_graph(&mut rng, nodes);
        let p = random_distribution(&mut rng, nodes);
        let spec = DuelSpec::matching(graph.clone(), p).unwrap();
        let DuelEquilibrium::Matching(eq) = solve_duel(&spec).unwrap() else {
            panic!("matching spec solves to a matching equilibrium");
        };
        assert_eq!(eq.value, rat(0), "matching case {case}");
        let payoff = duel_payoff_form(&spec);
        let oracle = MatchingOracle::new(&graph).unwrap();
        let (_, fb) =
            best_response(&payoff, &oracle, &eq.strategy_a.marginal(), Side::B).unwrap();
        let (_, fa) =
            best_response(&payoff, &oracle, &eq.strategy_b.marginal(), Side::A).unwrap();
        assert!(fb.is_zero() && fa.is_zero(), "matching case {case}");

        // The mixture really mixes perfect matchings of this graph.
        for (vertex, weight) in eq.strategy_a.support() {
            assert!(weight.is_positive());
            MatchingVertex::new(&graph, vertex.strategy.edges().to_vec()).unwrap();
        }
    }
}

#[test]
fn equilibrium_marginals_stay_doubly_stochastic() {
    // Both duel families produce one unit of mass per element row; the
    // ranking duel also fills every position exactly once.
    let spec = DuelSpec::ranking(vec![ratio(5, 12), ratio(4, 12), ratio(2, 12), ratio(1, 12)])
        .unwrap();
    let DuelEquilibrium::Ranking(eq) = solve_duel(&spec).unwrap() else {
        panic!("ranking spec solves to a ranking equilibrium");
    };
    let m = 4;
    for mix in [&eq.strategy_a, &eq.strategy_b] {
        let marginal = mix.marginal();
        for i in 0..m {
            let row: Rational = marginal.entries[i * m..(i + 1) * m].iter().cloned().sum();
            assert_eq!(row, rat(1));
        }
        for j in 0..m {
            let col: Rational = (0..m).map(|i| marginal.entries[i * m + j].clone()).sum();
            assert_eq!(col, rat(1));
        }
    }

    let spec = DuelSpec::bst(vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
    let DuelEquilibrium::Bst(eq) = solve_duel(&spec).unwrap() else {
        panic!("bst spec solves to a bst equilibrium");
    };
    let m = 3;
    for mix in [&eq.strategy_a, &eq.strategy_b] {
        let marginal = mix.marginal();
        for i in 0..m {
            let row: Rational = marginal.entries[i * m..(i + 1) * m].iter().cloned().sum();
            assert_eq!(row, rat(1));
        }
    }
}

#[test]
fn oracle_adapters_agree_with_their_free_functions() {
    let mut rng = StdRng::seed_from_u64(47);
    let m = 4;
    let costs: Vec<Rational> = (0..m * m).map(|_| random_rational(&mut rng)).collect();
    let table: Vec<Vec<Rational>> = costs.chunks(m).map(|c| c.to_vec()).collect();

    let ranking = RankingOracle::new(m).optimize(&costs, Sense::Minimize);
    assert_eq!(
        ranking.strategy.positions(),
        ranking_oracle(&table, Sense::Minimize).unwrap().positions()
    );
    assert_eq!(ranking.marginal, ranking.strategy.marginal());

    let bst = BstOracle::new(m).optimize(&costs, Sense::Maximize);
    assert_eq!(bst.strategy.depths(), bst_oracle(&table, Sense::Maximize).unwrap().depths());

    let graph = random_matchable_graph(&mut rng, 6);
    let alpha: Vec<Rational> =
        (0..graph.edges().len()).map(|_| random_rational(&mut rng)).collect();
    let adapter = MatchingOracle::new(&graph).unwrap().optimize(&alpha, Sense::Minimize);
    assert_eq!(
        adapter.strategy.edges(),
        matching_oracle(&graph, &alpha, Sense::Minimize).unwrap().edges()
    );
}
