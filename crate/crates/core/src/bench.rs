//! Timing of command-string generation.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;

use crate::schema::ModelSchema;
use crate::testcase::TestCase;
use crate::translate::generate_command_string;

/// Canvas sizes (atoms, connections) timed for the LTS model.
pub const LTS_SIZES: [(usize, usize); 5] = [(3, 3), (6, 6), (12, 12), (24, 24), (48, 48)];
/// Canvas sizes (atoms, connections) timed for the CV model.
pub const CV_SIZES: [(usize, usize); 5] = [(9, 20), (21, 35), (36, 60), (48, 80), (60, 100)];

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TranslateTiming {
    pub atoms: usize,
    pub connections: usize,
    pub iterations: usize,
    pub mean_ms: f64,
    pub max_ms: f64,
}

/// Generate the command string `iterations` times and report the mean.
pub fn time_translation(test: &TestCase, schema: &ModelSchema, iterations: usize) -> TranslateTiming {
    let iterations = iterations.max(1);
    let mut total = 0.0;
    let mut max: f64 = 0.0;
    for _ in 0..iterations {
        let start = Instant::now();
        black_box(generate_command_string(black_box(test), schema));
        let ms = start.elapsed().as_secs_f64() * 1000.0;
        total += ms;
        max = max.max(ms);
    }
    TranslateTiming {
        atoms: test.atoms.len(),
        connections: test.connections.len(),
        iterations,
        mean_ms: total / iterations as f64,
        max_ms: max,
    }
}
