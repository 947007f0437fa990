//! Canvas sets for the translation benchmarks.

use crucible_core::bench::{CV_SIZES, LTS_SIZES};
use crucible_core::fixtures::{generate_canvas, CV_FAULTY, LTS_FAULTY};
use crucible_core::{load_model, ModelSchema, TestCase};

/// A model and one generated canvas per benchmark size.
pub struct SizeSet {
    pub label: &'static str,
    pub schema: ModelSchema,
    pub canvases: Vec<TestCase>,
}

fn build(label: &'static str, model: &str, sizes: &[(usize, usize)]) -> SizeSet {
    let schema = load_model(model).expect("reference model parses");
    let canvases = sizes
        .iter()
        .map(|&(a, c)| generate_canvas(&schema, &format!("{label}_{a}x{c}"), a, c).expect("size is reachable"))
        .collect();
    SizeSet { label, schema, canvases }
}

pub fn lts() -> SizeSet {
    build("lts", LTS_FAULTY, &LTS_SIZES)
}

pub fn cv() -> SizeSet {
    build("cv", CV_FAULTY, &CV_SIZES)
}
