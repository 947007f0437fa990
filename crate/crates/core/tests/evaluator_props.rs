//! Randomized invariants of the relational evaluator.

use crucible_core::schema::parse_formula_with_locals;
use crucible_core::{eval_formula, load_model, Env, Instance, ModelSchema, TupleSet};
use proptest::prelude::*;

fn schema() -> ModelSchema {
    load_model("sig A { r : set A }").unwrap()
}

fn instance(n: u32, edges: &[(u32, u32)]) -> Instance {
    let mut inst = Instance::new((0..n).map(|i| format!("A{i}")).collect());
    inst.sigs.insert("A".into(), TupleSet::unary(0..n));
    inst.fields
        .insert("r".into(), edges.iter().map(|&(a, b)| vec![a % n, b % n]).collect());
    inst
}

fn holds(text: &str, schema: &ModelSchema, inst: &Instance) -> bool {
    let f = parse_formula_with_locals(text, schema, &[]).unwrap_or_else(|e| panic!("{text}: {e}"));
    eval_formula(&f, &mut Env::new(inst, schema))
}

/// Binary expressions over `r`, fully parenthesised.
fn rel_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("r".to_string()), Just("iden".to_string()), Just("(A -> A)".to_string())];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| format!("~({e})")),
            inner.clone().prop_map(|e| format!("^({e})")),
            inner.clone().prop_map(|e| format!("*({e})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("(({a}).({b}))")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("(({a}) + ({b}))")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("(({a}) & ({b}))")),
            (inner.clone(), inner).prop_map(|(a, b)| format!("(({a}) - ({b}))")),
        ]
    })
}

/// A body mentioning the quantified variable `x` and a free relation.
fn body() -> impl Strategy<Value = String> {
    (rel_expr(), 0..4usize).prop_map(|(e, k)| match k {
        0 => format!("some x.({e})"),
        1 => format!("x in x.({e})"),
        2 => format!("no ({e}).x"),
        _ => format!("lone x.({e})"),
    })
}

fn graph() -> impl Strategy<Value = (u32, Vec<(u32, u32)>)> {
    (1u32..6).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..12)))
}

fn warshall(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(a, b) in edges {
        m[a as usize % n][b as usize % n] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if m[i][k] && m[k][j] {
                    m[i][j] = true;
                }
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn quantifier_duality((n, edges) in graph(), b in body()) {
        let s = schema();
        let inst = instance(n, &edges);
        let all = holds(&format!("all x: A | {b}"), &s, &inst);
        let some = holds(&format!("some x: A | {b}"), &s, &inst);
        prop_assert_eq!(all, !holds(&format!("some x: A | !({b})"), &s, &inst));
        prop_assert_eq!(some, !holds(&format!("all x: A | !({b})"), &s, &inst));
        prop_assert_eq!(holds(&format!("no x: A | {b}"), &s, &inst), !some);
        let one = holds(&format!("one x: A | {b}"), &s, &inst);
        let lone = holds(&format!("lone x: A | {b}"), &s, &inst);
        prop_assert_eq!(one, some && lone);
    }

    #[test]
    fn closure_matches_warshall((n, edges) in graph()) {
        let s = schema();
        let inst = instance(n, &edges);
        let r = inst.field("r");
        let closure = r.closure();
        let m = warshall(n as usize, &edges);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(closure.contains(&[i, j]), m[i as usize][j as usize]);
            }
        }
        // Least fixpoint: closed under composition and contains r.
        prop_assert!(r.is_subset(&closure));
        prop_assert_eq!(closure.union(&closure.join(&r)), closure.clone());
        prop_assert!(holds("^r = r + r.^r", &s, &inst));
        prop_assert!(holds("*r = ^r + iden", &s, &inst));
        prop_assert!(holds("^r.^r in ^r", &s, &inst));
    }

    #[test]
    fn reflexive_and_strict_closure_diverge_on_acyclic_chains(
        n in 1u32..7,
        raw in prop::collection::vec((0u32..7, 0u32..7), 0..15),
    ) {
        // Edges only go forward, so the relation is acyclic.
        let edges: Vec<(u32, u32)> = raw
            .into_iter()
            .map(|(a, b)| (a % n, b % n))
            .filter(|(a, b)| a < b)
            .collect();
        let s = schema();
        let inst = instance(n, &edges);
        prop_assert!(holds("all x: A | x in x.*r", &s, &inst));
        prop_assert!(holds("all x: A | x !in x.^r", &s, &inst));
        prop_assert!(holds("no ^r & iden", &s, &inst));
    }

    #[test]
    fn algebraic_identities((n, edges) in graph(), e in rel_expr()) {
        let s = schema();
        let inst = instance(n, &edges);
        for law in [
            format!("~~({e}) = {e}"),
            format!("({e}) - ({e}) = none -> none"),
            format!("({e}).iden = {e}"),
            format!("~(r.({e})) = ~({e}).~r"),
        ] {
            prop_assert!(holds(&law, &s, &inst), "{}", law);
        }
    }
}
