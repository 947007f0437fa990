//! Rendering a test case as an executable command string.

use serde::Serialize;

use crate::schema::ModelSchema;
use crate::testcase::{Connection, PredState, TestCase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CommandString {
    pub text: String,
    /// Rendered predicate literals, in schema order.
    pub predicate_suffixes: Vec<String>,
}

/// Nicknames of a connection's atoms joined by `->`.
pub fn render_tuple(connection: &Connection, test: &TestCase) -> String {
    connection
        .atom_ids
        .iter()
        .map(|id| test.nickname(id).unwrap_or(id))
        .collect::<Vec<_>>()
        .join("->")
}

fn quantifier_lines(test: &TestCase, schema: &ModelSchema) -> Vec<String> {
    let mut lines = Vec::new();
    for sig in schema.concrete_sigs() {
        let nicks: Vec<&str> = test
            .atoms
            .iter()
            .filter(|a| a.sig == sig)
            .map(|a| a.nickname.as_str())
            .collect();
        if !nicks.is_empty() {
            lines.push(format!("some disj {} : {sig} {{", nicks.join(", ")));
        }
    }
    lines
}

fn equality_lines(test: &TestCase, schema: &ModelSchema) -> Vec<String> {
    let mut lines = Vec::new();
    let members = |sig: &str| -> Vec<&str> {
        test.atoms
            .iter()
            .filter(|a| test.atom_types(schema, a).contains(sig))
            .map(|a| a.nickname.as_str())
            .collect()
    };
    for sig in &schema.sigs {
        if schema.is_abstract_parent(&sig.name) {
            continue;
        }
        let nicks = members(&sig.name);
        lines.push(if nicks.is_empty() {
            format!("no {}", sig.name)
        } else {
            format!("{} = {}", sig.name, nicks.join(" + "))
        });
    }
    for field in &schema.fields {
        let tuples: Vec<String> = test
            .connections
            .iter()
            .filter(|c| c.relation == field.name)
            .map(|c| render_tuple(c, test))
            .collect();
        lines.push(if tuples.is_empty() {
            format!("no {}", field.name)
        } else {
            format!("{} = {}", field.name, tuples.join(" + "))
        });
    }
    lines
}

fn predicate_literals(test: &TestCase, schema: &ModelSchema) -> Vec<String> {
    let mut out = Vec::new();
    for pred in &schema.preds {
        let exp = test.expectation(&pred.name);
        let prefix = match exp.state {
            PredState::DontTest => continue,
            PredState::Valid => "",
            PredState::Invalid => "!",
        };
        let call = if exp.args.is_empty() {
            pred.name.clone()
        } else {
            let args: Vec<&str> = exp
                .args
                .iter()
                .map(|id| test.nickname(id).unwrap_or(id))
                .collect();
            format!("{}[{}]", pred.name, args.join(", "))
        };
        out.push(format!("{prefix}{call}"));
    }
    out
}

fn assemble(quantifiers: &[String], body: &[String]) -> String {
    let indent = if quantifiers.is_empty() { "" } else { "  " };
    let mut lines: Vec<String> = quantifiers.to_vec();
    lines.extend(body.iter().map(|l| format!("{indent}{l}")));
    if !quantifiers.is_empty() {
        lines.push("}".repeat(quantifiers.len()));
    }
    lines.join("\n")
}

pub fn generate_command_string(test: &TestCase, schema: &ModelSchema) -> CommandString {
    let quantifiers = quantifier_lines(test, schema);
    let suffixes = predicate_literals(test, schema);
    let mut body = equality_lines(test, schema);
    body.extend(suffixes.iter().cloned());
    CommandString {
        text: assemble(&quantifiers, &body),
        predicate_suffixes: suffixes,
    }
}

/// A `val` block holding the valuation plus an `@Test` command that runs
/// the selected predicate literals against it.
pub fn aunit_file(test: &TestCase, schema: &ModelSchema) -> String {
    let quantifiers = quantifier_lines(test, schema);
    let valuation = assemble(&quantifiers, &equality_lines(test, schema));
    let mut conjuncts = predicate_literals(test, schema);
    conjuncts.push(test.name.clone());
    let indented: Vec<String> = valuation.lines().map(|l| format!("  {l}")).collect();
    format!(
        "val {name} {{\n{body}\n}}\n\n@Test {name}_cmd: run {{ {run} }}\n",
        name = test.name,
        body = indented.join("\n"),
        run = conjuncts.join(" and ")
    )
}
