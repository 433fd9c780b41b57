use cnp_core::cnf::{Assignment, Clause, Formula, Lit};
use cnp_core::graph::{build_named, NamedGraph};
use cnp_core::trim::{mus_destructive, shrink_graph, trim_interact, trim_plain, vertex_critical_reduce, ShrinkConfig, TrimConfig};
use proptest::prelude::*;

const VARS: i32 = 6;

fn satisfiable(f: &Formula) -> bool {
    let n = f.num_vars() as u32;
    (0u32..1 << n).any(|mask| {
        let a = Assignment::from_lits((1..=n).map(|v| if mask >> (v - 1) & 1 == 1 { Lit::positive(v) } else { Lit::negative(v) }));
        f.is_satisfied_by(&a)
    })
}

fn clause() -> impl Strategy<Value = Clause> {
    prop::collection::vec((1..=VARS, any::<bool>()), 1..=3)
        .prop_map(|ls| Clause::from_dimacs(&ls.into_iter().map(|(v, s)| if s { v } else { -v }).collect::<Vec<_>>()))
}

fn unsat_formula() -> impl Strategy<Value = Formula> {
    prop::collection::vec(clause(), 25..45)
        .prop_map(|cs| Formula::from_clauses(VARS as usize, cs))
        .prop_filter("unsatisfiable", |f| !satisfiable(f))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mus_is_minimal(f in unsat_formula(), seed in 0u64..100) {
        let mus = mus_destructive(&f, seed, None).unwrap();
        prop_assert!(mus.minimal);
        let ids = mus.formula.active_ids();
        prop_assert!(!satisfiable(&mus.formula));
        for drop in &ids {
            let rest: Vec<usize> = ids.iter().copied().filter(|i| i != drop).collect();
            prop_assert!(satisfiable(&f.restrict(&rest)), "clause {} is redundant", drop);
        }
    }

    #[test]
    fn trimmed_cores_stay_unsat(f in unsat_formula(), seed in 0u64..100) {
        let config = TrimConfig { seed, seeds_per_iteration: 2, max_iterations: 4, ..TrimConfig::default() };
        for (core, report) in [trim_plain(&f, &config).unwrap(), trim_interact(&f, &config).unwrap()] {
            prop_assert!(!satisfiable(&core));
            prop_assert!(core.iter().all(|(id, c)| f.clause(id) == c));
            prop_assert_eq!(report.final_core.len(), core.active_count());
            let sizes: Vec<usize> = report.iterations.iter().map(|i| i.core_clauses).collect();
            prop_assert_eq!(core.active_count(), *sizes.iter().min().unwrap());
        }
    }
}

#[test]
fn interact_can_bring_clauses_back() {
    let clauses: [&[i32]; 10] = [
        &[4],
        &[-4, 1, -3],
        &[-3, 1],
        &[1, 3],
        &[5, -3],
        &[-1, 4, 5],
        &[-4, -2, 3],
        &[2, -1],
        &[5],
        &[-2, -3],
    ];
    let f = Formula::from_clauses(5, clauses.iter().map(|c| Clause::from_dimacs(c)));
    let config = TrimConfig { seeds_per_iteration: 2, max_iterations: 6, patience: 6, ..TrimConfig::default() };
    let (_, interact) = trim_interact(&f, &config).unwrap();
    assert!(interact.iterations.iter().skip(1).any(|i| i.reintroduced > 0));
    let (_, plain) = trim_plain(&f, &config).unwrap();
    assert!(plain.iterations.iter().all(|i| i.reintroduced == 0));
}

#[test]
fn moser_shrinks_to_itself() {
    let g = build_named(NamedGraph::Moser);
    let (out, report) = shrink_graph(&g, 3, &ShrinkConfig::default()).unwrap();
    assert_eq!((out.vertex_count(), out.edge_count()), (7, 11));
    assert_eq!(report.kept, (0..7).collect::<Vec<_>>());
}

#[test]
fn grid_rot_one_critical_subgraph_is_critical() {
    let g = build_named(NamedGraph::GridRotated(1));
    let Ok((critical, kept)) = vertex_critical_reduce(&g, 3, 5) else {
        panic!("grid-rot-1 should not be 3-colourable");
    };
    assert_eq!(critical.vertex_count(), kept.len());
    for v in 0..critical.vertex_count() {
        let smaller = critical.without_vertex(v);
        assert!(vertex_critical_reduce(&smaller, 3, 0).is_err(), "vertex {v} is removable");
    }
}
