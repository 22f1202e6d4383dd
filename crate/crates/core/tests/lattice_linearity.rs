//! Exhaustive checks on enumerable instances: in every reachable state that
//! is not the fixed point, some index is forbidden; at the fixed point, none is.

use std::collections::HashSet;

use llp_core::baselines::{dijkstra, gale_shapley};
use llp_core::instances::{CsrGraph, MarriageTable, Prng};
use llp_core::problems::{Sssp, StableMarriage};
use llp_core::worklist::NullWorklist;
use llp_core::{GlobalState, LatticeLinearProblem, INFINITY};

/// Every state reachable from the initial one by advancing forbidden indices.
fn reachable<P: LatticeLinearProblem<State = ()>>(problem: &P) -> HashSet<Vec<u64>> {
    let start = problem.init_global_state().snapshot();
    let mut seen = HashSet::from([start.clone()]);
    let mut stack = vec![start];
    while let Some(values) = stack.pop() {
        let state = GlobalState::new(values.iter().copied(), ());
        for i in 0..problem.size() {
            if !problem.is_forbidden(&state, i) {
                continue;
            }
            let next = GlobalState::new(values.iter().copied(), ());
            problem.advance(&next, i, &NullWorklist).unwrap();
            let next = next.snapshot();
            for (before, after) in values.iter().zip(&next) {
                assert!(
                    problem.order().is_monotone(*before, *after),
                    "{values:?} -> {next:?}"
                );
            }
            if seen.insert(next.clone()) {
                stack.push(next);
            }
        }
    }
    seen
}

fn assert_lattice_linear<P: LatticeLinearProblem<State = ()>>(
    problem: &P,
    fixed_point: &[u64],
    label: &str,
) {
    let states = reachable(problem);
    assert!(
        states.contains(fixed_point),
        "{label}: fixed point unreachable"
    );
    for values in states {
        let state = GlobalState::new(values.iter().copied(), ());
        let any_forbidden = (0..problem.size()).any(|i| problem.is_forbidden(&state, i));
        if values == fixed_point {
            assert!(
                !any_forbidden,
                "{label}: fixed point {values:?} has a forbidden index"
            );
        } else {
            assert!(
                any_forbidden,
                "{label}: {values:?} violates B but nothing is forbidden"
            );
        }
    }
}

#[test]
fn sssp_all_three_vertex_graphs() {
    // Each of the 6 arcs is absent, weight 1, or weight 3.
    for code in 0..3usize.pow(6) {
        let arcs = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];
        let mut c = code;
        let mut edges = Vec::new();
        for &(u, v) in &arcs {
            match c % 3 {
                1 => edges.push((u, v, 1)),
                2 => edges.push((u, v, 3)),
                _ => {}
            }
            c /= 3;
        }
        let g = CsrGraph::from_edges(3, &edges);
        let sssp = Sssp::new(&g, 0).unwrap();
        assert_lattice_linear(&sssp, &dijkstra(&g, 0), &format!("graph {edges:?}"));
    }
}

#[test]
fn sssp_random_four_vertex_graphs() {
    let mut rng = Prng::new(4);
    for _ in 0..500 {
        let mut edges = Vec::new();
        for u in 0..4 {
            for v in 0..4 {
                if u != v && rng.below(2) == 0 {
                    edges.push((u, v, rng.between(1, 4)));
                }
            }
        }
        let g = CsrGraph::from_edges(4, &edges);
        let sssp = Sssp::new(&g, 0).unwrap();
        assert_lattice_linear(&sssp, &dijkstra(&g, 0), &format!("graph {edges:?}"));
    }
}

/// Stronger than reachability: every state componentwise at or above the
/// shortest distances (a small box of them) either is the fixed point or
/// has a forbidden vertex.
#[test]
fn sssp_box_above_fixed_point() {
    let g = CsrGraph::from_edges(4, &[(0, 1, 2), (1, 2, 1), (0, 2, 4), (2, 3, 1), (3, 1, 1)]);
    let sssp = Sssp::new(&g, 0).unwrap();
    let opt = dijkstra(&g, 0);
    let choices: Vec<Vec<u64>> = opt
        .iter()
        .enumerate()
        .map(|(v, &d)| {
            if v == 0 {
                vec![0]
            } else {
                (d..d + 4).chain([INFINITY]).collect()
            }
        })
        .collect();
    let mut checked = 0;
    for a in &choices[1] {
        for b in &choices[2] {
            for c in &choices[3] {
                let values = vec![0, *a, *b, *c];
                let state = GlobalState::new(values.iter().copied(), ());
                let any = (0..4).any(|i| sssp.is_forbidden(&state, i));
                assert_eq!(any, values != opt, "{values:?}");
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 125);
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn all_profiles(n: usize, visit: &mut impl FnMut(&MarriageTable)) {
    let perms = permutations(n);
    let lists = 2 * n;
    let total = perms.len().pow(lists as u32);
    for code in 0..total {
        let mut c = code;
        let mut chosen = Vec::with_capacity(lists);
        for _ in 0..lists {
            chosen.push(perms[c % perms.len()].clone());
            c /= perms.len();
        }
        let women = chosen.split_off(n);
        visit(&MarriageTable { men: chosen, women });
    }
}

#[test]
fn stable_marriage_every_profile_up_to_three() {
    for n in 1..=3 {
        let mut profiles = 0;
        all_profiles(n, &mut |table| {
            let sm = StableMarriage::new(table).unwrap();
            assert_lattice_linear(&sm, &gale_shapley(table), &format!("{table:?}"));
            profiles += 1;
        });
        assert_eq!(profiles, permutations(n).len().pow(2 * n as u32));
    }
}
