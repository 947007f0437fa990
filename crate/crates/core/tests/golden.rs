//! Command strings for the case-study canvases, compared byte for byte
//! against files in `tests/golden`. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::PathBuf;

use crucible_core::fixtures::{self, Builder};
use crucible_core::{aunit_file, generate_command_string, load_model, ModelSchema, TestCase};

fn cases() -> Vec<(&'static str, &'static str, Builder)> {
    vec![
        ("lists_two_node", fixtures::LIST_FAULTY, fixtures::list_two_node as Builder),
        ("lts_nondeterministic", fixtures::LTS_FAULTY, fixtures::lts_nondeterministic),
        ("lts_maximal", fixtures::LTS_FAULTY, fixtures::lts_maximal),
        ("cv_first", fixtures::CV_FAULTY, fixtures::cv_first),
        ("cv_maximal", fixtures::CV_FAULTY, fixtures::cv_maximal),
    ]
}

fn check(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, actual).unwrap();
        return;
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from its golden file");
}

#[test]
fn command_strings_match_golden_files() {
    for (name, model, build) in cases() {
        let schema = load_model(model).unwrap();
        let text = generate_command_string(&build(&schema), &schema).text;
        check(&format!("{name}.txt"), &text);
        for _ in 0..3 {
            assert_eq!(generate_command_string(&build(&schema), &schema).text, text);
        }
    }
}

#[test]
fn aunit_files_match_golden_files() {
    for (name, model, build) in cases() {
        let schema = load_model(model).unwrap();
        check(&format!("{name}.als"), &aunit_file(&build(&schema), &schema));
    }
}

#[test]
fn fixed_models_translate_identically() {
    // The translation depends only on declarations, which the fixes leave alone.
    for (fixed, faulty) in [
        (fixtures::LIST_FIXED, fixtures::LIST_FAULTY),
        (fixtures::LTS_FIXED, fixtures::LTS_FAULTY),
        (fixtures::CV_FIXED, fixtures::CV_FAULTY),
    ] {
        let a = load_model(fixed).unwrap();
        let b = load_model(faulty).unwrap();
        for (model, _, build) in cases().into_iter().map(|(n, m, b)| (m, n, b)) {
            if model == faulty {
                assert_eq!(
                    generate_command_string(&build(&a), &a),
                    generate_command_string(&build(&b), &b)
                );
            }
        }
    }
}

/// Add a throwaway atom of every concrete sig, then delete them all.
fn with_scratch_atoms(schema: &ModelSchema, mut t: TestCase) -> TestCase {
    let mut ids = Vec::new();
    for sig in schema.concrete_sigs() {
        if let Ok(a) = t.add_atom(schema, sig, 0.0, 0.0) {
            ids.push(a.id);
        }
    }
    for id in ids {
        t.remove_atom(&id).unwrap();
    }
    t
}

#[test]
fn insertion_then_deletion_leaves_the_string_unchanged() {
    for (name, model, build) in cases() {
        let schema = load_model(model).unwrap();
        let t = build(&schema);
        let before = generate_command_string(&t, &schema).text;
        let after = generate_command_string(&with_scratch_atoms(&schema, t), &schema).text;
        assert_eq!(before, after, "{name}");
    }
}

#[test]
fn replaying_an_edit_sequence_is_deterministic() {
    let schema = load_model(fixtures::LTS_FAULTY).unwrap();
    let replay = || {
        let mut t = TestCase::new("replay", &schema);
        let s0 = t.add_atom(&schema, "State", 0.0, 0.0).unwrap().id;
        let s1 = t.add_atom(&schema, "State", 0.0, 0.0).unwrap().id;
        let e0 = t.add_atom(&schema, "Event", 0.0, 0.0).unwrap().id;
        t.remove_atom(&s0).unwrap();
        let s2 = t.add_atom(&schema, "State", 0.0, 0.0).unwrap().id;
        t.add_connection(&schema, "trans", &[s1.clone(), e0.clone(), s2.clone()]).unwrap();
        t.add_connection(&schema, "trans", &[s2, e0, s1]).unwrap();
        generate_command_string(&t, &schema).text
    };
    let first = replay();
    assert!(first.contains("State = State1 + State2"), "{first}");
    for _ in 0..5 {
        assert_eq!(replay(), first);
    }
}

#[test]
fn shipped_model_files_match_fixtures() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models");
    for (label, text) in crucible_core::fixtures::MODELS {
        let on_disk = std::fs::read_to_string(dir.join(format!("{label}.als"))).unwrap();
        assert_eq!(on_disk, text, "{label}");
    }
}
