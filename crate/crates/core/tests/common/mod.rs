//! Random canvases built only through edits that guidance allows.
#![allow(dead_code)]

use std::collections::BTreeSet;

use crucible_core::guidance::valid_connection_targets;
use crucible_core::{ModelSchema, PredState, TestCase};
use rand::seq::IndexedRandom;
use rand::Rng;

pub struct Limits {
    /// Most atoms of any one concrete sig.
    pub per_sig: usize,
    pub steps: usize,
    /// Randomly enable predicates with random arguments.
    pub predicates: bool,
}

pub fn random_canvas(schema: &ModelSchema, rng: &mut impl Rng, limits: &Limits) -> TestCase {
    let mut t = TestCase::new("random", schema);
    let concrete = schema.concrete_sigs();
    for _ in 0..limits.steps {
        match rng.random_range(0..10) {
            0..=3 => {
                let Some(sig) = concrete.choose(rng) else { continue };
                if t.atoms.iter().filter(|a| a.sig == *sig).count() < limits.per_sig {
                    let _ = t.add_atom(schema, sig, rng.random_range(0.0..800.0), rng.random_range(0.0..600.0));
                }
            }
            4..=7 => {
                let Some(field) = schema.fields.choose(rng) else { continue };
                let mut tuple = Vec::new();
                while tuple.len() < field.arity() {
                    let targets = valid_connection_targets(&t, schema, &field.name, &tuple).unwrap();
                    let Some(next) = targets.choose(rng) else { break };
                    tuple.push(next.clone());
                }
                if tuple.len() == field.arity() {
                    let _ = t.add_connection(schema, &field.name, &tuple);
                }
            }
            8 => {
                let subsets: Vec<&str> = schema.sigs.iter().filter(|s| s.is_subset()).map(|s| s.name.as_str()).collect();
                if subsets.is_empty() || t.atoms.is_empty() {
                    continue;
                }
                let id = t.atoms.choose(rng).unwrap().id.clone();
                let marks: BTreeSet<String> =
                    subsets.iter().filter(|_| rng.random_bool(0.5)).map(|s| s.to_string()).collect();
                let _ = t.set_subsets(schema, &id, marks);
            }
            _ => {
                if rng.random_bool(0.5) && !t.atoms.is_empty() {
                    let id = t.atoms.choose(rng).unwrap().id.clone();
                    t.remove_atom(&id).unwrap();
                } else if !t.connections.is_empty() {
                    let i = rng.random_range(0..t.connections.len());
                    t.remove_connection(&crucible_core::ConnectionRef::Index(i)).unwrap();
                }
            }
        }
    }
    if limits.predicates {
        for pred in &schema.preds {
            let state = *[PredState::DontTest, PredState::Valid, PredState::Invalid].choose(rng).unwrap();
            let mut args = Vec::new();
            if state != PredState::DontTest {
                for p in &pred.params {
                    let fits: Vec<&str> = t
                        .atoms
                        .iter()
                        .filter(|a| t.atom_types(schema, a).contains(p.sig.as_str()))
                        .map(|a| a.id.as_str())
                        .collect();
                    if let Some(id) = fits.choose(rng) {
                        args.push(id.to_string());
                    }
                }
            }
            let _ = t.set_predicate_state(schema, &pred.name, state, args);
        }
    }
    t
}
