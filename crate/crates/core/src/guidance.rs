//! Edit-time guidance: which canvas changes the model's structure allows,
//! which atoms a connection may end on, and what is still missing before a
//! run.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::eval::{check_structural, StructuralRule};
use crate::schema::{FieldMultiplicity, ModelSchema};
use crate::syntax::SigMultiplicity;
use crate::testcase::{Atom, CanvasError, TestCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Rule {
    SigUpperBound,
    RelUpperBound,
    Abstract,
    SubsetSig,
    TypeMismatch,
    Duplicate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "camelCase")]
pub enum GuidanceVerdict {
    Allowed,
    Blocked {
        rule: Rule,
        message: String,
        /// The sig or field whose declaration forbids the edit.
        culprit: String,
    },
}

impl GuidanceVerdict {
    fn blocked(rule: Rule, culprit: &str, message: String) -> Self {
        GuidanceVerdict::Blocked {
            rule,
            message,
            culprit: culprit.to_string(),
        }
    }

    pub fn is_allowed(&self) -> bool {
        matches!(self, GuidanceVerdict::Allowed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ViolationKind {
    LowerBound,
    UpperBound,
    HigherArityMult,
    Typing,
    Hierarchy,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::LowerBound => "lowerBound",
            ViolationKind::UpperBound => "upperBound",
            ViolationKind::HigherArityMult => "higherArityMult",
            ViolationKind::Typing => "typing",
            ViolationKind::Hierarchy => "hierarchy",
        }
    }
}

impl From<StructuralRule> for ViolationKind {
    fn from(rule: StructuralRule) -> Self {
        match rule {
            StructuralRule::SigLowerBound | StructuralRule::FieldLowerBound => ViolationKind::LowerBound,
            StructuralRule::SigUpperBound | StructuralRule::FieldUpperBound => ViolationKind::UpperBound,
            StructuralRule::ArrowMult => ViolationKind::HigherArityMult,
            StructuralRule::Typing => ViolationKind::Typing,
            StructuralRule::Disjoint | StructuralRule::Containment => ViolationKind::Hierarchy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub subject: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PreRunReport {
    pub violations: Vec<Violation>,
}

impl PreRunReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

fn count_in(test: &TestCase, schema: &ModelSchema, sig: &str, skip: Option<&str>) -> usize {
    test.atoms
        .iter()
        .filter(|a| Some(a.id.as_str()) != skip)
        .filter(|a| test.atom_types(schema, a).contains(sig))
        .count()
}

fn upper_bound_word(m: SigMultiplicity) -> Option<&'static str> {
    match m {
        SigMultiplicity::One => Some("one"),
        SigMultiplicity::Lone => Some("lone"),
        _ => None,
    }
}

pub fn validate_atom_addition(
    test: &TestCase,
    schema: &ModelSchema,
    sig: &str,
) -> Result<GuidanceVerdict, CanvasError> {
    let decl = schema
        .sig(sig)
        .ok_or_else(|| CanvasError::UnknownSig(sig.to_string()))?;
    if schema.is_abstract_parent(sig) {
        let children: Vec<_> = schema.children(sig).map(|c| c.name.as_str()).collect();
        return Ok(GuidanceVerdict::blocked(
            Rule::Abstract,
            sig,
            format!(
                "`abstract sig {sig}` holds no atoms of its own; add a {} atom instead",
                children.join(" or ")
            ),
        ));
    }
    if decl.is_subset() {
        let parents = schema.parents(sig).join(", ");
        return Ok(GuidanceVerdict::blocked(
            Rule::SubsetSig,
            sig,
            format!("`sig {sig} in {parents}` is a subset; mark an existing atom as {sig} instead"),
        ));
    }
    for ancestor in schema.extends_chain(sig) {
        let m = schema.sig(ancestor).expect("chain of declared sigs").multiplicity;
        if let Some(word) = upper_bound_word(m) {
            if count_in(test, schema, ancestor, None) >= 1 {
                return Ok(GuidanceVerdict::blocked(
                    Rule::SigUpperBound,
                    ancestor,
                    format!("`{word} sig {ancestor}` allows at most one {ancestor} atom, and the canvas already has one"),
                ));
            }
        }
    }
    Ok(GuidanceVerdict::Allowed)
}

fn lookup_atoms<'t>(test: &'t TestCase, ids: &[String]) -> Result<Vec<&'t Atom>, CanvasError> {
    ids.iter()
        .map(|id| test.atom(id).ok_or_else(|| CanvasError::UnknownAtom(id.clone())))
        .collect()
}

pub fn validate_connection_addition(
    test: &TestCase,
    schema: &ModelSchema,
    relation: &str,
    atom_ids: &[String],
) -> Result<GuidanceVerdict, CanvasError> {
    let field = schema
        .field(relation)
        .ok_or_else(|| CanvasError::UnknownRelation(relation.to_string()))?;
    if atom_ids.len() != field.arity() {
        return Err(CanvasError::ArityMismatch {
            relation: relation.to_string(),
            expected: field.arity(),
            found: atom_ids.len(),
        });
    }
    let atoms = lookup_atoms(test, atom_ids)?;
    for (i, atom) in atoms.iter().enumerate() {
        let column = field.column(i);
        if !test.atom_types(schema, atom).contains(column) {
            return Ok(GuidanceVerdict::blocked(
                Rule::TypeMismatch,
                relation,
                format!(
                    "column {i} of `{relation}` takes a {column} atom, but {} is a {}",
                    atom.nickname, atom.sig
                ),
            ));
        }
    }
    let rendered = || {
        atoms
            .iter()
            .map(|a| a.nickname.as_str())
            .collect::<Vec<_>>()
            .join("->")
    };
    if test
        .connections
        .iter()
        .any(|c| c.relation == relation && c.atom_ids == atom_ids)
    {
        return Ok(GuidanceVerdict::blocked(
            Rule::Duplicate,
            relation,
            format!("`{relation}` already contains {}", rendered()),
        ));
    }
    if let FieldMultiplicity::Binary(m) = field.multiplicity {
        if m.has_upper_bound() {
            let existing = test
                .connections
                .iter()
                .find(|c| c.relation == relation && c.atom_ids[0] == atom_ids[0]);
            if let Some(existing) = existing {
                let target = test.nickname(&existing.atom_ids[1]).unwrap_or("?");
                return Ok(GuidanceVerdict::blocked(
                    Rule::RelUpperBound,
                    relation,
                    format!(
                        "`{relation}: {} {}` allows at most one {} per {}; {} already maps to {target}",
                        m.as_str(),
                        field.columns[0],
                        field.columns[0],
                        field.owner,
                        atoms[0].nickname
                    ),
                ));
            }
        }
    }
    Ok(GuidanceVerdict::Allowed)
}

/// Atoms that may fill the next column of `relation` after `prefix`, in
/// creation order. For binary relations with a source picked, only targets
/// that keep the declared multiplicity are returned.
pub fn valid_connection_targets(
    test: &TestCase,
    schema: &ModelSchema,
    relation: &str,
    prefix: &[String],
) -> Result<Vec<String>, CanvasError> {
    let field = schema
        .field(relation)
        .ok_or_else(|| CanvasError::UnknownRelation(relation.to_string()))?;
    if prefix.len() >= field.arity() {
        return Err(CanvasError::BadPrefix(format!(
            "`{relation}` has arity {}, prefix already has {} atoms",
            field.arity(),
            prefix.len()
        )));
    }
    for (i, id) in prefix.iter().enumerate() {
        let atom = test
            .atom(id)
            .ok_or_else(|| CanvasError::BadPrefix(format!("unknown atom `{id}`")))?;
        if !test.atom_types(schema, atom).contains(field.column(i)) {
            return Err(CanvasError::BadPrefix(format!(
                "{} is not a {} (column {i} of `{relation}`)",
                atom.nickname,
                field.column(i)
            )));
        }
    }
    let column = field.column(prefix.len());
    let mut out = Vec::new();
    for atom in &test.atoms {
        if !test.atom_types(schema, atom).contains(column) {
            continue;
        }
        if field.arity() == 2 && prefix.len() == 1 {
            let tuple = [prefix[0].clone(), atom.id.clone()];
            if !validate_connection_addition(test, schema, relation, &tuple)?.is_allowed() {
                continue;
            }
        }
        out.push(atom.id.clone());
    }
    Ok(out)
}

/// Check a replacement set of subset markers for one atom.
pub fn validate_subset_marking(
    test: &TestCase,
    schema: &ModelSchema,
    atom_id: &str,
    subsets: &BTreeSet<String>,
) -> Result<GuidanceVerdict, CanvasError> {
    let atom = test
        .atom(atom_id)
        .ok_or_else(|| CanvasError::UnknownAtom(atom_id.to_string()))?;
    for m in subsets {
        let decl = schema
            .sig(m)
            .ok_or_else(|| CanvasError::UnknownSig(m.clone()))?;
        if !decl.is_subset() {
            return Ok(GuidanceVerdict::blocked(
                Rule::SubsetSig,
                m,
                format!("{m} is not a subset signature and cannot be used as a marker"),
            ));
        }
    }
    let mut types = schema.supertypes(&atom.sig);
    for m in subsets {
        types.extend(schema.supertypes(m));
    }
    for m in subsets {
        for parent in schema.parents(m) {
            let others_cover = schema.supertypes(&atom.sig).contains(parent)
                || subsets
                    .iter()
                    .filter(|o| *o != m)
                    .any(|o| schema.supertypes(o).contains(parent));
            if !others_cover {
                return Ok(GuidanceVerdict::blocked(
                    Rule::TypeMismatch,
                    m,
                    format!("{m} is a subset of {parent}, but {} is not a {parent}", atom.nickname),
                ));
            }
        }
    }
    for ty in &types {
        let decl = schema.sig(ty).expect("declared");
        if !decl.is_subset() || atom.subsets.iter().any(|o| schema.supertypes(o).contains(ty)) {
            continue;
        }
        if let Some(word) = upper_bound_word(decl.multiplicity) {
            if count_in(test, schema, ty, Some(atom_id)) >= 1 {
                return Ok(GuidanceVerdict::blocked(
                    Rule::SigUpperBound,
                    ty,
                    format!("`{word} sig {ty}` allows at most one {ty} atom, and another atom is already marked"),
                ));
            }
        }
    }
    for conn in &test.connections {
        let field = schema.field(&conn.relation).expect("connections use declared fields");
        for (i, id) in conn.atom_ids.iter().enumerate() {
            if id == atom_id && !types.contains(field.column(i)) {
                return Ok(GuidanceVerdict::blocked(
                    Rule::TypeMismatch,
                    &conn.relation,
                    format!(
                        "{} must stay a {} while it is used by `{}`",
                        atom.nickname,
                        field.column(i),
                        conn.relation
                    ),
                ));
            }
        }
    }
    for (name, exp) in &test.predicate_states {
        let Some(pred) = schema.pred(name) else { continue };
        for (arg, param) in exp.args.iter().zip(&pred.params) {
            if arg == atom_id && !types.contains(param.sig.as_str()) {
                return Ok(GuidanceVerdict::blocked(
                    Rule::TypeMismatch,
                    name,
                    format!("{} must stay a {} while it is an argument of `{name}`", atom.nickname, param.sig),
                ));
            }
        }
    }
    Ok(GuidanceVerdict::Allowed)
}

/// Structural constraints the canvas does not satisfy yet. Empty exactly
/// when every structural check holds on the canvas valuation.
pub fn pre_run_check(test: &TestCase, schema: &ModelSchema) -> PreRunReport {
    let valuation = test.derive_valuation(schema);
    let violations = check_structural(&valuation, schema)
        .into_iter()
        .filter(|d| !d.holds)
        .map(|d| Violation {
            kind: d.rule.map(ViolationKind::from).unwrap_or(ViolationKind::Typing),
            subject: d.subject,
            detail: d.detail,
        })
        .collect();
    PreRunReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schema::load_model;

    fn blocked_rule(v: &GuidanceVerdict) -> Option<Rule> {
        match v {
            GuidanceVerdict::Blocked { rule, .. } => Some(*rule),
            GuidanceVerdict::Allowed => None,
        }
    }

    #[test]
    fn atom_upper_bound() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let mut t = TestCase::new("t", &schema);
        assert!(validate_atom_addition(&t, &schema, "List").unwrap().is_allowed());
        t.add_atom(&schema, "List", 0.0, 0.0).unwrap();
        let v = validate_atom_addition(&t, &schema, "List").unwrap();
        assert_eq!(blocked_rule(&v), Some(Rule::SigUpperBound));
        let GuidanceVerdict::Blocked { culprit, message, .. } = v else { unreachable!() };
        assert_eq!(culprit, "List");
        assert!(message.contains("one sig List"), "{message}");
        assert!(validate_atom_addition(&t, &schema, "Node").unwrap().is_allowed());
    }

    #[test]
    fn upper_bound_follows_extends() {
        let schema = load_model("lone sig A {}\nsig B extends A {}\nsig C extends A {}").unwrap();
        let mut t = TestCase::new("t", &schema);
        t.add_atom(&schema, "B", 0.0, 0.0).unwrap();
        let v = validate_atom_addition(&t, &schema, "C").unwrap();
        assert_eq!(blocked_rule(&v), Some(Rule::SigUpperBound));
    }

    #[test]
    fn abstract_and_subset_sigs_are_blocked() {
        let cv = load_model(fixtures::CV_FAULTY).unwrap();
        let t = TestCase::new("t", &cv);
        assert_eq!(blocked_rule(&validate_atom_addition(&t, &cv, "Source").unwrap()), Some(Rule::Abstract));
        let lts = load_model(fixtures::LTS_FAULTY).unwrap();
        let t = TestCase::new("t", &lts);
        assert_eq!(blocked_rule(&validate_atom_addition(&t, &lts, "Init").unwrap()), Some(Rule::SubsetSig));
        assert!(matches!(validate_atom_addition(&t, &lts, "Nope"), Err(CanvasError::UnknownSig(_))));
    }

    fn list_canvas() -> (ModelSchema, TestCase, [String; 3]) {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let mut t = TestCase::new("t", &schema);
        let l = t.add_atom(&schema, "List", 0.0, 0.0).unwrap().id;
        let n0 = t.add_atom(&schema, "Node", 0.0, 0.0).unwrap().id;
        let n1 = t.add_atom(&schema, "Node", 0.0, 0.0).unwrap().id;
        (schema, t, [l, n0, n1])
    }

    #[test]
    fn connection_rules() {
        let (schema, mut t, [l, n0, n1]) = list_canvas();
        let v = validate_connection_addition(&t, &schema, "header", &[n0.clone(), l.clone()]).unwrap();
        assert_eq!(blocked_rule(&v), Some(Rule::TypeMismatch));
        t.add_connection(&schema, "header", &[l.clone(), n0.clone()]).unwrap();
        let v = validate_connection_addition(&t, &schema, "header", &[l.clone(), n0.clone()]).unwrap();
        assert_eq!(blocked_rule(&v), Some(Rule::Duplicate));
        let v = validate_connection_addition(&t, &schema, "header", &[l.clone(), n1.clone()]).unwrap();
        assert_eq!(blocked_rule(&v), Some(Rule::RelUpperBound));
        assert!(validate_connection_addition(&t, &schema, "link", &[n0.clone(), n0.clone()]).unwrap().is_allowed());
        assert!(matches!(
            validate_connection_addition(&t, &schema, "link", &[n0.clone()]),
            Err(CanvasError::ArityMismatch { expected: 2, found: 1, .. })
        ));
        assert!(matches!(
            validate_connection_addition(&t, &schema, "next", &[n0.clone(), n1.clone()]),
            Err(CanvasError::UnknownRelation(_))
        ));
    }

    #[test]
    fn higher_arity_only_checks_types_and_duplicates() {
        let schema = load_model(fixtures::LTS_FAULTY).unwrap();
        let t = fixtures::lts_nondeterministic(&schema);
        let dup = t.connections[0].atom_ids.clone();
        assert_eq!(blocked_rule(&validate_connection_addition(&t, &schema, "trans", &dup).unwrap()), Some(Rule::Duplicate));
        let mut other = dup.clone();
        other[2] = t.atom_by_nickname("State0").unwrap().id.clone();
        other[1] = t.atom_by_nickname("Event1").unwrap().id.clone();
        assert!(validate_connection_addition(&t, &schema, "trans", &other).unwrap().is_allowed());
    }

    #[test]
    fn targets_follow_types_and_bounds() {
        let (schema, mut t, [l, n0, n1]) = list_canvas();
        assert_eq!(valid_connection_targets(&t, &schema, "header", &[]).unwrap(), [l.clone()]);
        assert_eq!(
            valid_connection_targets(&t, &schema, "header", &[l.clone()]).unwrap(),
            [n0.clone(), n1.clone()]
        );
        t.add_connection(&schema, "header", &[l.clone(), n0.clone()]).unwrap();
        assert!(valid_connection_targets(&t, &schema, "header", &[l.clone()]).unwrap().is_empty());
        assert!(matches!(
            valid_connection_targets(&t, &schema, "header", &[n0.clone()]),
            Err(CanvasError::BadPrefix(_))
        ));
        assert!(matches!(
            valid_connection_targets(&t, &schema, "header", &[l.clone(), n0.clone()]),
            Err(CanvasError::BadPrefix(_))
        ));
    }

    #[test]
    fn ternary_targets_are_type_filtered_only() {
        let schema = load_model(fixtures::LTS_FAULTY).unwrap();
        let t = fixtures::lts_nondeterministic(&schema);
        let s1 = t.atom_by_nickname("State1").unwrap().id.clone();
        let e0 = t.atom_by_nickname("Event0").unwrap().id.clone();
        let events = valid_connection_targets(&t, &schema, "trans", &[s1.clone()]).unwrap();
        assert_eq!(events.len(), 3);
        let states = valid_connection_targets(&t, &schema, "trans", &[s1, e0]).unwrap();
        assert_eq!(states.len(), 2);
    }

    #[test]
    fn subset_markers() {
        let schema = load_model("sig S {}\nsig E {}\none sig I in S {}").unwrap();
        let mut t = TestCase::new("t", &schema);
        let s0 = t.add_atom(&schema, "S", 0.0, 0.0).unwrap().id;
        let s1 = t.add_atom(&schema, "S", 0.0, 0.0).unwrap().id;
        let e0 = t.add_atom(&schema, "E", 0.0, 0.0).unwrap().id;
        let marks: BTreeSet<String> = ["I".to_string()].into();
        assert_eq!(
            blocked_rule(&validate_subset_marking(&t, &schema, &e0, &marks).unwrap()),
            Some(Rule::TypeMismatch)
        );
        t.set_subsets(&schema, &s0, marks.clone()).unwrap();
        assert!(validate_subset_marking(&t, &schema, &s0, &marks).unwrap().is_allowed());
        assert_eq!(
            blocked_rule(&validate_subset_marking(&t, &schema, &s1, &marks).unwrap()),
            Some(Rule::SigUpperBound)
        );
        let not_subset: BTreeSet<String> = ["E".to_string()].into();
        assert_eq!(
            blocked_rule(&validate_subset_marking(&t, &schema, &s1, &not_subset).unwrap()),
            Some(Rule::SubsetSig)
        );
    }

    #[test]
    fn marker_removal_is_blocked_while_in_use() {
        let schema = load_model("sig S { f : set I }\nsig I in S {}").unwrap();
        let mut t = TestCase::new("t", &schema);
        let s0 = t.add_atom(&schema, "S", 0.0, 0.0).unwrap().id;
        t.set_subsets(&schema, &s0, ["I".to_string()].into()).unwrap();
        t.add_connection(&schema, "f", &[s0.clone(), s0.clone()]).unwrap();
        let v = validate_subset_marking(&t, &schema, &s0, &BTreeSet::new()).unwrap();
        assert_eq!(blocked_rule(&v), Some(Rule::TypeMismatch));
    }

    #[test]
    fn pre_run_reports_lower_bounds() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let t = TestCase::new("t", &schema);
        let report = pre_run_check(&t, &schema);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::LowerBound);
        assert_eq!(report.violations[0].subject, "List");
        assert!(pre_run_check(&fixtures::list_two_node(&schema), &schema).is_empty());

        let cv = load_model(fixtures::CV_FAULTY).unwrap();
        let mut t = TestCase::new("t", &cv);
        let w = t.add_atom(&cv, "Work", 0.0, 0.0).unwrap().id;
        let u = t.add_atom(&cv, "User", 0.0, 0.0).unwrap().id;
        t.add_connection(&cv, "source", &[w, u]).unwrap();
        let report = pre_run_check(&t, &cv);
        let subjects: Vec<_> = report.violations.iter().map(|v| (v.kind, v.subject.as_str())).collect();
        assert_eq!(subjects, [(ViolationKind::LowerBound, "ids")]);
    }

    #[test]
    fn pre_run_reports_arrow_multiplicities() {
        let schema = load_model("sig A { r : B -> lone C }\nsig B {}\nsig C {}").unwrap();
        let mut t = TestCase::new("t", &schema);
        let a = t.add_atom(&schema, "A", 0.0, 0.0).unwrap().id;
        let b = t.add_atom(&schema, "B", 0.0, 0.0).unwrap().id;
        let c0 = t.add_atom(&schema, "C", 0.0, 0.0).unwrap().id;
        let c1 = t.add_atom(&schema, "C", 0.0, 0.0).unwrap().id;
        t.add_connection(&schema, "r", &[a.clone(), b.clone(), c0]).unwrap();
        assert!(pre_run_check(&t, &schema).is_empty());
        t.add_connection(&schema, "r", &[a, b, c1]).unwrap();
        let report = pre_run_check(&t, &schema);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].kind, ViolationKind::HigherArityMult);
        assert_eq!(report.violations[0].subject, "r");
    }

    #[test]
    fn verdict_json() {
        let v = GuidanceVerdict::blocked(Rule::SigUpperBound, "List", "m".into());
        assert_eq!(
            serde_json::to_value(&v).unwrap(),
            serde_json::json!({"verdict": "blocked", "rule": "sigUpperBound", "message": "m", "culprit": "List"})
        );
        assert_eq!(serde_json::to_value(GuidanceVerdict::Allowed).unwrap(), serde_json::json!({"verdict": "allowed"}));
    }
}
