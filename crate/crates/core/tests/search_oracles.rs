use num_bigint::BigInt;
use num_traits::ToPrimitive;
use symmcfg::families::poly::IntPolynomial;
use symmcfg::search::{
    build_hypergraph, enumerate_instances, find_avoiding_coloring, find_witness, minimal_window, BoxOverrides,
    MinimalOutcome, Outcome, ParamBox,
};
use symmcfg::{Coloring, Domain, FamilyDescriptor, SearchBudget, SearchOptions, Shape, SymmetricContext, Window};

fn ctx(l: i64, k: i64) -> Option<SymmetricContext> {
    Some(SymmetricContext::new(l, k).unwrap())
}

fn families() -> Vec<FamilyDescriptor> {
    vec![
        FamilyDescriptor::new(Shape::APlain { len: 3 }, None).unwrap(),
        FamilyDescriptor::new(Shape::APlain { len: 4 }, None).unwrap(),
        FamilyDescriptor::new(Shape::StarSchur, ctx(1, 1)).unwrap(),
        FamilyDescriptor::new(Shape::StarSchur, ctx(2, 1)).unwrap(),
        FamilyDescriptor::new(Shape::StarSchur, ctx(1, 0)).unwrap(),
        FamilyDescriptor::new(Shape::GeoArithAdd { m: 1 }, ctx(1, 0)).unwrap(),
        FamilyDescriptor::new(Shape::Gap { order: 2, len: 1 }, None).unwrap(),
        FamilyDescriptor::new(Shape::MpcSet { m: 1, p: 1, c: 1 }, None).unwrap(),
        FamilyDescriptor::new(
            Shape::PolyProgression { polys: vec![IntPolynomial::from_i64(&[0, 1]), IntPolynomial::from_i64(&[0, 0, 1])] },
            None,
        )
        .unwrap(),
    ]
}

/// Every element set of the family in the window, read off the generator
/// without the engine.
fn instance_sets(desc: &FamilyDescriptor, window: Window, b: &ParamBox, degenerate: bool) -> Vec<Vec<i64>> {
    enumerate_instances(desc, window, b)
        .unwrap()
        .filter(|i| degenerate || !i.degenerate)
        .map(|i| i.elements.iter().map(|e| e.to_i64().unwrap()).collect())
        .collect()
}

/// True if some r-coloring of the window avoids every set, by listing all r^|window| colorings.
fn literal_avoidable(window: Window, r: usize, sets: &[Vec<i64>]) -> bool {
    let n = window.len() as u32;
    let total = (r as u64).pow(n);
    (0..total).any(|code| {
        let color = |v: i64| (code / (r as u64).pow((v - window.lo) as u32)) % r as u64;
        sets.iter().all(|s| s.iter().any(|&v| color(v) != color(s[0])))
    })
}

#[test]
fn engine_agrees_with_literal_enumeration() {
    let budget = SearchBudget::default();
    for desc in families() {
        for (domain, sizes, r) in [(Domain::Nat, 1..=12i64, 2usize), (Domain::Int, 1..=5, 2), (Domain::Nat, 1..=8, 3)] {
            for n in sizes {
                let window = domain.window(n);
                let b = ParamBox::default_for(&desc, domain, n);
                for allow_degenerate in [false, true] {
                    let sets = instance_sets(&desc, window, &b, allow_degenerate);
                    let expected = literal_avoidable(window, r, &sets);
                    for symmetry in [true, false] {
                        let opts = SearchOptions { allow_degenerate, symmetry };
                        let rep = find_avoiding_coloring(&desc, r, window, &b, &budget, &opts).unwrap();
                        let got = match rep.outcome {
                            Outcome::AvoidingColoringFound => true,
                            Outcome::Regular => false,
                            other => panic!("unexpected {other:?}"),
                        };
                        assert_eq!(got, expected, "{:?} {domain:?} n={n} r={r} sym={symmetry}", desc.kind());
                    }
                }
            }
        }
    }
}

#[test]
fn avoiders_have_no_monochromatic_instance() {
    let budget = SearchBudget::default();
    let opts = SearchOptions::default();
    for desc in families() {
        for n in [10i64, 20, 40] {
            let window = Domain::Nat.window(n);
            let b = ParamBox::default_for(&desc, Domain::Nat, n);
            let rep = find_avoiding_coloring(&desc, 2, window, &b, &budget, &opts).unwrap();
            if let Some(c) = rep.avoiding {
                for s in instance_sets(&desc, window, &b, false) {
                    let first = c.get(s[0]).unwrap();
                    assert!(s.iter().any(|&v| c.get(v).unwrap() != first), "{:?} monochromatic {s:?}", desc.kind());
                }
            }
        }
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let opts = SearchOptions::default();
    // GeoArithAdd has five free parameters, so its box grows as N^5; skip it here.
    for desc in families().into_iter().filter(|d| !matches!(d.shape, Shape::GeoArithAdd { .. })) {
        let reference = {
            let budget = SearchBudget { split_depth: 4, ..SearchBudget::default() };
            minimal_window(&desc, 2, 36, Domain::Nat, &BoxOverrides::default(), &budget, &opts).unwrap()
        };
        for workers in [2, 4] {
            let budget = SearchBudget { workers, split_depth: 4, ..SearchBudget::default() };
            let rep = minimal_window(&desc, 2, 36, Domain::Nat, &BoxOverrides::default(), &budget, &opts).unwrap();
            assert_eq!(rep.to_json(false), reference.to_json(false), "{:?} workers={workers}", desc.kind());
        }
    }
}

#[test]
fn node_budget_is_deterministic() {
    let desc = FamilyDescriptor::new(Shape::StarSchur, ctx(1, 1)).unwrap();
    let opts = SearchOptions::default();
    let run = |workers| {
        let budget = SearchBudget { workers, max_nodes: 8, split_depth: 6, ..SearchBudget::default() };
        minimal_window(&desc, 2, 120, Domain::Nat, &BoxOverrides::default(), &budget, &opts).unwrap()
    };
    let one = run(1);
    assert_eq!(one.outcome, MinimalOutcome::BudgetExhausted);
    assert_eq!(run(4).to_json(false), one.to_json(false));
}

#[test]
fn witness_is_lexicographically_least() {
    let budget = SearchBudget::default();
    let opts = SearchOptions::default();
    for desc in families() {
        for seed in 0..5u64 {
            let coloring = Coloring::from_fn(1, 25, 2, |v| ((v as u64 * 2654435761 + seed * 97) >> 7 & 1) as u8).unwrap();
            let b = ParamBox::default_for(&desc, Domain::Nat, 25);
            let rep = find_witness(&coloring, &desc, &b, &budget, &opts).unwrap();
            // brute force: walk the box in order and take the first monochromatic instance
            let first = enumerate_instances(&desc, Window::new(1, 25), &b).unwrap().find(|i| {
                !i.degenerate && i.elements.iter().all(|e| coloring.get(e.to_i64().unwrap()) == coloring.get(i.elements[0].to_i64().unwrap()))
            });
            match (rep.witness, first) {
                (Some(w), Some(i)) => {
                    assert_eq!(w.params, i.provenance);
                    assert_eq!(w.elements, i.elements);
                }
                (None, None) => assert_eq!(rep.outcome, Outcome::NoWitness),
                (w, i) => panic!("{:?}: witness {w:?} vs brute force {i:?}", desc.kind()),
            }
        }
    }
}

#[test]
fn enumeration_matches_direct_formulas() {
    let ap = FamilyDescriptor::new(Shape::APlain { len: 3 }, None).unwrap();
    let window = Window::new(-6, 6);
    let b = ParamBox::default_for(&ap, Domain::Int, 6);
    let mut expected = Vec::new();
    for a in -6i64..=6 {
        for d in -6i64..=6 {
            let s = [a, a + d, a + 2 * d];
            if s.iter().all(|v| (-6..=6).contains(v)) {
                let mut s = s.to_vec();
                s.sort();
                s.dedup();
                expected.push(s);
            }
        }
    }
    assert_eq!(instance_sets(&ap, window, &b, true), expected);

    let schur = FamilyDescriptor::new(Shape::StarSchur, ctx(1, 1)).unwrap();
    let b = ParamBox::default_for(&schur, Domain::Nat, 30);
    let mut expected = Vec::new();
    for x in 1i64..=30 {
        for y in 1i64..=30 {
            let z = x * y + x + y;
            if z <= 30 {
                let mut s = vec![x, y, z];
                s.sort();
                s.dedup();
                expected.push(s);
            }
        }
    }
    assert_eq!(instance_sets(&schur, Window::new(1, 30), &b, true), expected);
}

#[test]
fn huge_exponents_are_skipped_not_evaluated() {
    // (lx+k)(ly+k)^j(lz+k)^{ij} with a box reaching 10^6 never fits a small window.
    let desc = FamilyDescriptor::new(Shape::PolyVdW { coeffs: vec![vec![BigInt::from(5)]] }, ctx(1, 1)).unwrap();
    let b = ParamBox::from_i64(&[(1, 3), (1_000_000, 1_000_002)]);
    let mut iter = enumerate_instances(&desc, Window::new(1, 100), &b).unwrap();
    assert_eq!(iter.by_ref().count(), 0);
    assert_eq!(iter.stats().outside_window, 9);
}

#[test]
fn build_hypergraph_deduplicates() {
    let schur = FamilyDescriptor::new(Shape::StarSchur, ctx(1, 1)).unwrap();
    let b = ParamBox::default_for(&schur, Domain::Nat, 11);
    let (graph, order, stats) = build_hypergraph(&schur, Window::new(1, 11), &b, &SearchOptions::default()).unwrap();
    assert_eq!(order, (1..=11).collect::<Vec<_>>());
    // (1,2,5), (1,3,7), (1,4,9), (1,5,11), (2,3,11): each found as (x,y) and (y,x)
    assert_eq!(graph.edges().len(), 5);
    assert_eq!(stats.enumeration.instances, 12);
}
