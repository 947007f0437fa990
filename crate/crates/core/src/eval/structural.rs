//! Constraints implied by sig and field declarations.

use serde::Serialize;

use super::{Diagnostic, DiagnosticKind, Instance, Tuple, TupleSet};
use crate::schema::{FieldDecl, FieldMultiplicity, ModelSchema, SigKind};
use crate::syntax::{Mult, SigMultiplicity};
use crate::valuation::Valuation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum StructuralRule {
    SigLowerBound,
    SigUpperBound,
    Disjoint,
    Containment,
    Typing,
    FieldLowerBound,
    FieldUpperBound,
    ArrowMult,
}

pub fn check_structural(valuation: &Valuation, schema: &ModelSchema) -> Vec<Diagnostic> {
    check_structural_instance(&Instance::from_valuation(valuation), schema)
}

fn diag(rule: StructuralRule, subject: &str, holds: bool, detail: String) -> Diagnostic {
    Diagnostic {
        kind: DiagnosticKind::Structural,
        subject: subject.to_string(),
        holds,
        detail,
        rule: Some(rule),
    }
}

fn labels(inst: &Instance, atoms: &[u32]) -> String {
    atoms
        .iter()
        .map(|a| inst.label(*a))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One diagnostic per implicit constraint, in schema order.
pub fn check_structural_instance(inst: &Instance, schema: &ModelSchema) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    sig_bounds(inst, schema, &mut out);
    hierarchy(inst, schema, &mut out);
    for field in &schema.fields {
        field_constraints(inst, schema, field, &mut out);
    }
    out
}

fn sig_bounds(inst: &Instance, schema: &ModelSchema, out: &mut Vec<Diagnostic>) {
    for sig in &schema.sigs {
        let n = inst.sig(&sig.name).len();
        let word = match sig.multiplicity {
            SigMultiplicity::One => "one",
            SigMultiplicity::Lone => "lone",
            SigMultiplicity::Some => "some",
            SigMultiplicity::Any => continue,
        };
        if matches!(sig.multiplicity, SigMultiplicity::One | SigMultiplicity::Some) {
            out.push(diag(
                StructuralRule::SigLowerBound,
                &sig.name,
                n >= 1,
                format!("`{word} sig {}` needs at least 1 atom, found {n}", sig.name),
            ));
        }
        if matches!(sig.multiplicity, SigMultiplicity::One | SigMultiplicity::Lone) {
            out.push(diag(
                StructuralRule::SigUpperBound,
                &sig.name,
                n <= 1,
                format!("`{word} sig {}` allows at most 1 atom, found {n}", sig.name),
            ));
        }
    }
}

fn pairwise_disjoint(inst: &Instance, names: &[&str]) -> Option<(String, String, u32)> {
    for (i, a) in names.iter().enumerate() {
        for b in &names[i + 1..] {
            if let Some(t) = inst.sig(a).intersection(&inst.sig(b)).iter().next() {
                return Some((a.to_string(), b.to_string(), t[0]));
            }
        }
    }
    None
}

fn hierarchy(inst: &Instance, schema: &ModelSchema, out: &mut Vec<Diagnostic>) {
    let tops: Vec<&str> = schema
        .sigs
        .iter()
        .filter(|s| s.kind == SigKind::Top)
        .map(|s| s.name.as_str())
        .collect();
    if tops.len() > 1 {
        let clash = pairwise_disjoint(inst, &tops);
        out.push(diag(
            StructuralRule::Disjoint,
            "univ",
            clash.is_none(),
            match clash {
                None => "top-level sigs are disjoint".to_string(),
                Some((a, b, x)) => format!("{} is in both {a} and {b}", inst.label(x)),
            },
        ));
    }
    for sig in &schema.sigs {
        let set = inst.sig(&sig.name);
        match &sig.kind {
            SigKind::Top => {}
            SigKind::Extends(parent) => {
                containment(inst, &sig.name, &set, parent, out);
            }
            SigKind::SubsetOf(parents) => {
                for parent in parents {
                    containment(inst, &sig.name, &set, parent, out);
                }
            }
        }
        let children: Vec<&str> = schema.children(&sig.name).map(|c| c.name.as_str()).collect();
        if children.len() > 1 {
            let clash = pairwise_disjoint(inst, &children);
            out.push(diag(
                StructuralRule::Disjoint,
                &sig.name,
                clash.is_none(),
                match clash {
                    None => format!("sigs extending {} are disjoint", sig.name),
                    Some((a, b, x)) => format!("{} is in both {a} and {b}", inst.label(x)),
                },
            ));
        }
        if sig.is_abstract && !children.is_empty() {
            let covered = children
                .iter()
                .fold(TupleSet::new(), |acc, c| acc.union(&inst.sig(c)));
            let direct: Vec<u32> = set.difference(&covered).atoms().collect();
            out.push(diag(
                StructuralRule::Containment,
                &sig.name,
                direct.is_empty(),
                if direct.is_empty() {
                    format!("abstract sig {} has no direct atoms", sig.name)
                } else {
                    format!("abstract sig {} has direct atoms {}", sig.name, labels(inst, &direct))
                },
            ));
        }
    }
}

fn containment(inst: &Instance, name: &str, set: &TupleSet, parent: &str, out: &mut Vec<Diagnostic>) {
    let stray: Vec<u32> = set.difference(&inst.sig(parent)).atoms().collect();
    out.push(diag(
        StructuralRule::Containment,
        name,
        stray.is_empty(),
        if stray.is_empty() {
            format!("{name} is contained in {parent}")
        } else {
            format!("{} in {name} but not in {parent}", labels(inst, &stray))
        },
    ));
}

/// Every tuple over the given column sets.
fn product(inst: &Instance, columns: &[&str]) -> Vec<Tuple> {
    columns.iter().fold(vec![Vec::new()], |acc, col| {
        let atoms: Vec<u32> = inst.sig(col).atoms().collect();
        acc.into_iter()
            .flat_map(|prefix| {
                atoms.iter().map(move |a| {
                    let mut t = prefix.clone();
                    t.push(*a);
                    t
                })
            })
            .collect()
    })
}

fn field_constraints(inst: &Instance, _schema: &ModelSchema, field: &FieldDecl, out: &mut Vec<Diagnostic>) {
    let rel = inst.field(&field.name);
    let ill_typed: Vec<&Tuple> = rel
        .iter()
        .filter(|t| {
            t.len() != field.arity()
                || t.iter()
                    .zip(field.column_types())
                    .any(|(a, col)| !inst.sig(col).contains(&[*a]))
        })
        .collect();
    let ty: Vec<&str> = field.column_types().collect();
    out.push(diag(
        StructuralRule::Typing,
        &field.name,
        ill_typed.is_empty(),
        match ill_typed.first() {
            None => format!("{} in {}", field.name, ty.join("->")),
            Some(t) => format!("{} is not in {}", inst.render(t), ty.join("->")),
        },
    ));

    let owners: Vec<u32> = inst.sig(&field.owner).atoms().collect();
    match &field.multiplicity {
        FieldMultiplicity::Binary(m) => {
            let count = |a: u32| rel.iter().filter(|t| t[0] == a).count();
            let decl = format!("{}: {} {}", field.name, m.as_str(), field.columns[0]);
            if m.has_lower_bound() {
                let short: Vec<u32> = owners.iter().copied().filter(|a| count(*a) == 0).collect();
                out.push(diag(
                    StructuralRule::FieldLowerBound,
                    &field.name,
                    short.is_empty(),
                    if short.is_empty() {
                        format!("`{decl}`: every {} has a tuple", field.owner)
                    } else {
                        format!("`{decl}`: {} has no {} tuple", labels(inst, &short), field.name)
                    },
                ));
            }
            if m.has_upper_bound() {
                let over: Vec<u32> = owners.iter().copied().filter(|a| count(*a) > 1).collect();
                out.push(diag(
                    StructuralRule::FieldUpperBound,
                    &field.name,
                    over.is_empty(),
                    if over.is_empty() {
                        format!("`{decl}`: no {} has more than one tuple", field.owner)
                    } else {
                        format!("`{decl}`: {} has more than one {} tuple", labels(inst, &over), field.name)
                    },
                ));
            }
        }
        FieldMultiplicity::Arrows(arrows) => {
            let columns: Vec<&str> = field.columns.iter().map(String::as_str).collect();
            for (i, arrow) in arrows.iter().enumerate() {
                let (left_cols, right_cols) = columns.split_at(i + 1);
                for (mult, side) in [(arrow.right, "right"), (arrow.left, "left")] {
                    if mult == Mult::Set {
                        continue;
                    }
                    let failure = arrow_failure(inst, &rel, &owners, left_cols, right_cols, mult, side == "right");
                    let arrow_text = format!(
                        "{} {}->{} {}",
                        left_cols.join("->"),
                        if arrow.left == Mult::Set { "" } else { arrow.left.as_str() },
                        if arrow.right == Mult::Set { "" } else { arrow.right.as_str() },
                        right_cols.join("->")
                    );
                    out.push(diag(
                        StructuralRule::ArrowMult,
                        &field.name,
                        failure.is_none(),
                        match failure {
                            None => format!("`{}: {arrow_text}` holds ({side} side)", field.name),
                            Some(detail) => format!("`{}: {arrow_text}`: {detail}", field.name),
                        },
                    ));
                }
            }
        }
    }
}

/// For each owner atom, check that every tuple over the fixed side is
/// related to an admissible number of tuples on the other side.
fn arrow_failure(
    inst: &Instance,
    rel: &TupleSet,
    owners: &[u32],
    left_cols: &[&str],
    right_cols: &[&str],
    mult: Mult,
    fix_left: bool,
) -> Option<String> {
    let split = left_cols.len();
    let fixed_side = if fix_left { left_cols } else { right_cols };
    for &owner in owners {
        for key in product(inst, fixed_side) {
            let count = rel
                .iter()
                .filter(|t| t.len() == split + right_cols.len() + 1 && t[0] == owner)
                .filter(|t| {
                    let part = if fix_left { &t[1..=split] } else { &t[split + 1..] };
                    part == key.as_slice()
                })
                .count();
            if !mult.admits(count) {
                return Some(format!(
                    "{} relates {} to {count} tuple(s), expected {}",
                    inst.label(owner),
                    inst.render(&key),
                    mult.as_str()
                ));
            }
        }
    }
    None
}
