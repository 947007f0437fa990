//! Canvases reached through allowed edits only fail on lower bounds.

mod common;

use common::{random_canvas, Limits};
use crucible_core::fixtures::MODELS;
use crucible_core::guidance::pre_run_check;
use crucible_core::{load_model, run_test, RunOptions, ViolationKind};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn allowed_edits_never_break_upper_bounds_typing_or_hierarchy() {
    let mut clean = 0;
    for (m, (label, text)) in MODELS.iter().enumerate() {
        let schema = load_model(text).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7 + m as u64);
        for i in 0..320 {
            let limits = Limits {
                per_sig: 4,
                steps: 5 + i % 40,
                predicates: false,
            };
            let t = random_canvas(&schema, &mut rng, &limits);
            let report = pre_run_check(&t, &schema);
            for v in &report.violations {
                assert!(
                    matches!(v.kind, ViolationKind::LowerBound),
                    "{label} trial {i}: {v:?}"
                );
            }
            if report.is_empty() {
                clean += 1;
                let result = run_test(&schema, &t, RunOptions::default()).unwrap();
                assert!(result.passed(), "{label} trial {i}: {:?}", result.failures().collect::<Vec<_>>());
            }
        }
    }
    // Trials counted toward the property are those with an empty report.
    assert!(clean >= 1000, "only {clean} clean canvases");
}
