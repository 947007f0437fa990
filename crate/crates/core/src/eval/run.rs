//! Executing a test case against its model.

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use super::{check_structural_instance, eval_formula, Diagnostic, DiagnosticKind, Env, Instance, TupleSet};
use crate::guidance::{pre_run_check, PreRunReport};
use crate::schema::ModelSchema;
use crate::testcase::{PredState, TestCase};
use crate::translate::{generate_command_string, CommandString};

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Run even when the pre-run check reports structural violations.
    pub allow_structural_failure: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum RunStatus {
    Pass,
    Fail,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunResult {
    pub test: String,
    pub status: RunStatus,
    pub command_string: CommandString,
    pub diagnostics: Vec<Diagnostic>,
    pub pre_run: PreRunReport,
    pub elapsed_ms: f64,
}

impl RunResult {
    pub fn passed(&self) -> bool {
        self.status == RunStatus::Pass
    }

    pub fn failures(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| !d.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("test `{test}` is blocked by {} structural violation(s)", report.violations.len())]
    StructuralBlock { test: String, report: PreRunReport },
}

/// Evaluate structure, facts and enabled predicate literals on the
/// canvas valuation. The test passes when every one of them holds.
pub fn run_test(schema: &ModelSchema, test: &TestCase, options: RunOptions) -> Result<RunResult, RunError> {
    let start = Instant::now();
    let report = pre_run_check(test, schema);
    if !report.is_empty() && !options.allow_structural_failure {
        return Err(RunError::StructuralBlock {
            test: test.name.clone(),
            report,
        });
    }
    let command_string = generate_command_string(test, schema);
    let inst = Instance::from_valuation(&test.derive_valuation(schema));

    let mut diagnostics = check_structural_instance(&inst, schema);
    for (i, fact) in schema.facts.iter().enumerate() {
        let holds = eval_formula(fact, &mut Env::new(&inst, schema));
        diagnostics.push(Diagnostic {
            kind: DiagnosticKind::Fact,
            subject: format!("fact {}", i + 1),
            holds,
            detail: fact.to_string(),
            rule: None,
        });
    }
    for (pred, literal) in schema
        .preds
        .iter()
        .filter(|p| test.expectation(&p.name).state != PredState::DontTest)
        .zip(&command_string.predicate_suffixes)
    {
        let exp = test.expectation(&pred.name);
        let mut env = Env::new(&inst, schema);
        for (param, arg) in pred.params.iter().zip(&exp.args) {
            let label = test.nickname(arg).unwrap_or(arg);
            let value = inst.atom(label).map(TupleSet::singleton).unwrap_or_default();
            env.bind(param.name.clone(), value);
        }
        let value = eval_formula(&pred.body, &mut env);
        let expected = exp.state == PredState::Valid;
        diagnostics.push(Diagnostic {
            kind: DiagnosticKind::Predicate,
            subject: literal.clone(),
            holds: value == expected,
            detail: format!(
                "{} expected {}, evaluated {value}",
                pred.name,
                exp.state.as_str()
            ),
            rule: None,
        });
    }
    let status = if diagnostics.iter().all(|d| d.holds) {
        RunStatus::Pass
    } else {
        RunStatus::Fail
    };
    Ok(RunResult {
        test: test.name.clone(),
        status,
        command_string,
        diagnostics,
        pre_run: report,
        elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
    })
}
