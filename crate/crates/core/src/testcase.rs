//! Test cases: a canvas of atoms and connections plus predicate expectations.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::guidance::{self, GuidanceVerdict};
use crate::schema::ModelSchema;
use crate::valuation::Valuation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub id: String,
    pub sig: String,
    pub nickname: String,
    /// Subset (`in`) sigs this atom is marked as belonging to.
    #[serde(default)]
    pub subsets: BTreeSet<String>,
    #[serde(default)]
    pub x: f64,
    #[serde(default)]
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Connection {
    pub relation: String,
    pub atom_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PredState {
    #[default]
    DontTest,
    Valid,
    Invalid,
}

impl PredState {
    pub fn as_str(self) -> &'static str {
        match self {
            PredState::DontTest => "dontTest",
            PredState::Valid => "valid",
            PredState::Invalid => "invalid",
        }
    }
}

impl std::str::FromStr for PredState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dontTest" => Ok(PredState::DontTest),
            "valid" => Ok(PredState::Valid),
            "invalid" => Ok(PredState::Invalid),
            other => Err(format!("unknown predicate state `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateExpectation {
    pub state: PredState,
    /// Atom ids bound to the predicate's parameters, in order.
    #[serde(default)]
    pub args: Vec<String>,
}

/// How to pick a connection for removal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", untagged)]
pub enum ConnectionRef {
    Index(usize),
    /// One drawn segment of a higher-arity tuple; segment `k` joins column
    /// `k` to column `k + 1`.
    Segment { index: usize, segment: usize },
    Tuple {
        relation: String,
        #[serde(rename = "atomIds")]
        atom_ids: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CanvasError {
    #[error("blocked: {}", verdict_message(.0))]
    Guidance(GuidanceVerdict),
    #[error("unknown sig `{0}`")]
    UnknownSig(String),
    #[error("sig `{0}` is abstract and cannot hold atoms directly")]
    AbstractSig(String),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}` has arity {expected}, got {found} atoms")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("no such connection: {0}")]
    UnknownConnection(String),
    #[error("unknown predicate `{0}`")]
    UnknownPred(String),
    #[error("bad predicate arguments: {0}")]
    BadArgs(String),
    #[error("bad prefix: {0}")]
    BadPrefix(String),
}

fn verdict_message(v: &GuidanceVerdict) -> &str {
    match v {
        GuidanceVerdict::Allowed => "allowed",
        GuidanceVerdict::Blocked { message, .. } => message,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TestCase {
    #[serde(skip)]
    pub name: String,
    pub atoms: Vec<Atom>,
    pub connections: Vec<Connection>,
    pub predicate_states: BTreeMap<String, PredicateExpectation>,
    pub nickname_counters: BTreeMap<String, u32>,
}

/// What `remove_atom` took off the canvas.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RemovedAtom {
    pub atom: Atom,
    pub connections: Vec<Connection>,
    pub reset_predicates: Vec<String>,
}

impl TestCase {
    /// An empty canvas with every predicate set to don't-test.
    pub fn new(name: impl Into<String>, schema: &ModelSchema) -> Self {
        TestCase {
            name: name.into(),
            predicate_states: schema
                .preds
                .iter()
                .map(|p| (p.name.clone(), PredicateExpectation::default()))
                .collect(),
            ..TestCase::default()
        }
    }

    pub fn atom(&self, id: &str) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.id == id)
    }

    pub fn atom_by_nickname(&self, nickname: &str) -> Option<&Atom> {
        self.atoms.iter().find(|a| a.nickname == nickname)
    }

    fn atom_mut(&mut self, id: &str) -> Result<&mut Atom, CanvasError> {
        self.atoms
            .iter_mut()
            .find(|a| a.id == id)
            .ok_or_else(|| CanvasError::UnknownAtom(id.to_string()))
    }

    pub fn nickname(&self, id: &str) -> Option<&str> {
        self.atom(id).map(|a| a.nickname.as_str())
    }

    /// Every sig the atom belongs to: its own sig, its subset markers, and
    /// their ancestors.
    pub fn atom_types<'s>(&self, schema: &'s ModelSchema, atom: &Atom) -> BTreeSet<&'s str> {
        let mut types = schema.supertypes(&atom.sig);
        for m in &atom.subsets {
            types.extend(schema.supertypes(m));
        }
        types
    }

    fn next_nickname(&self, schema: &ModelSchema, sig: &str) -> (String, u32) {
        let mut n = self.nickname_counters.get(sig).copied().unwrap_or(0);
        loop {
            let candidate = format!("{sig}{n}");
            if !schema.declares(&candidate) && self.atom_by_nickname(&candidate).is_none() {
                return (candidate, n + 1);
            }
            n += 1;
        }
    }

    pub fn add_atom(
        &mut self,
        schema: &ModelSchema,
        sig: &str,
        x: f64,
        y: f64,
    ) -> Result<Atom, CanvasError> {
        let decl = schema
            .sig(sig)
            .ok_or_else(|| CanvasError::UnknownSig(sig.to_string()))?;
        if schema.is_abstract_parent(sig) {
            return Err(CanvasError::AbstractSig(decl.name.clone()));
        }
        match guidance::validate_atom_addition(self, schema, sig)? {
            GuidanceVerdict::Allowed => {}
            blocked => return Err(CanvasError::Guidance(blocked)),
        }
        let serial: u32 = self.nickname_counters.values().sum();
        let (nickname, next) = self.next_nickname(schema, sig);
        self.nickname_counters.insert(sig.to_string(), next);
        let atom = Atom {
            id: format!("a{serial}"),
            sig: sig.to_string(),
            nickname,
            subsets: BTreeSet::new(),
            x,
            y,
        };
        self.atoms.push(atom.clone());
        Ok(atom)
    }

    /// Remove an atom, its incident connections, and any predicate
    /// expectation that used it as an argument.
    pub fn remove_atom(&mut self, id: &str) -> Result<RemovedAtom, CanvasError> {
        let pos = self
            .atoms
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| CanvasError::UnknownAtom(id.to_string()))?;
        let atom = self.atoms.remove(pos);
        let (gone, kept) = std::mem::take(&mut self.connections)
            .into_iter()
            .partition(|c: &Connection| c.atom_ids.iter().any(|a| a == id));
        self.connections = kept;
        let mut reset = Vec::new();
        for (name, exp) in &mut self.predicate_states {
            if exp.args.iter().any(|a| a == id) {
                *exp = PredicateExpectation::default();
                reset.push(name.clone());
            }
        }
        Ok(RemovedAtom {
            atom,
            connections: gone,
            reset_predicates: reset,
        })
    }

    pub fn move_atom(&mut self, id: &str, x: f64, y: f64) -> Result<(), CanvasError> {
        let atom = self.atom_mut(id)?;
        atom.x = x;
        atom.y = y;
        Ok(())
    }

    /// Replace the subset markers of an atom.
    pub fn set_subsets(
        &mut self,
        schema: &ModelSchema,
        id: &str,
        subsets: BTreeSet<String>,
    ) -> Result<(), CanvasError> {
        match guidance::validate_subset_marking(self, schema, id, &subsets)? {
            GuidanceVerdict::Allowed => {}
            blocked => return Err(CanvasError::Guidance(blocked)),
        }
        self.atom_mut(id)?.subsets = subsets;
        Ok(())
    }

    pub fn add_connection(
        &mut self,
        schema: &ModelSchema,
        relation: &str,
        atom_ids: &[String],
    ) -> Result<Connection, CanvasError> {
        match guidance::validate_connection_addition(self, schema, relation, atom_ids)? {
            GuidanceVerdict::Allowed => {}
            blocked => return Err(CanvasError::Guidance(blocked)),
        }
        let conn = Connection {
            relation: relation.to_string(),
            atom_ids: atom_ids.to_vec(),
        };
        self.connections.push(conn.clone());
        Ok(conn)
    }

    /// Remove a connection. Deleting any segment of a higher-arity tuple
    /// removes the whole tuple.
    pub fn remove_connection(&mut self, target: &ConnectionRef) -> Result<Vec<Connection>, CanvasError> {
        let index = match target {
            ConnectionRef::Index(i) => *i,
            ConnectionRef::Segment { index, segment } => {
                let conn = self
                    .connections
                    .get(*index)
                    .ok_or_else(|| CanvasError::UnknownConnection(format!("index {index}")))?;
                if segment + 1 >= conn.atom_ids.len() {
                    return Err(CanvasError::UnknownConnection(format!(
                        "segment {segment} of connection {index}"
                    )));
                }
                *index
            }
            ConnectionRef::Tuple { relation, atom_ids } => self
                .connections
                .iter()
                .position(|c| c.relation == *relation && c.atom_ids == *atom_ids)
                .ok_or_else(|| {
                    CanvasError::UnknownConnection(format!("{relation} {}", atom_ids.join("->")))
                })?,
        };
        if index >= self.connections.len() {
            return Err(CanvasError::UnknownConnection(format!("index {index}")));
        }
        Ok(vec![self.connections.remove(index)])
    }

    pub fn set_predicate_state(
        &mut self,
        schema: &ModelSchema,
        pred: &str,
        state: PredState,
        args: Vec<String>,
    ) -> Result<(), CanvasError> {
        let decl = schema
            .pred(pred)
            .ok_or_else(|| CanvasError::UnknownPred(pred.to_string()))?;
        if state == PredState::DontTest {
            self.predicate_states
                .insert(pred.to_string(), PredicateExpectation::default());
            return Ok(());
        }
        if args.len() != decl.params.len() {
            return Err(CanvasError::BadArgs(format!(
                "`{pred}` takes {} argument(s), got {}",
                decl.params.len(),
                args.len()
            )));
        }
        for (arg, param) in args.iter().zip(&decl.params) {
            let atom = self
                .atom(arg)
                .ok_or_else(|| CanvasError::BadArgs(format!("unknown atom `{arg}`")))?;
            if !self.atom_types(schema, atom).contains(param.sig.as_str()) {
                return Err(CanvasError::BadArgs(format!(
                    "{} is not a {} (parameter `{}`)",
                    atom.nickname, param.sig, param.name
                )));
            }
        }
        self.predicate_states
            .insert(pred.to_string(), PredicateExpectation { state, args });
        Ok(())
    }

    pub fn expectation(&self, pred: &str) -> PredicateExpectation {
        self.predicate_states.get(pred).cloned().unwrap_or_default()
    }

    /// The valuation drawn on the canvas, with atoms labelled by nickname.
    pub fn derive_valuation(&self, schema: &ModelSchema) -> Valuation {
        let mut val = Valuation::empty(schema);
        for atom in &self.atoms {
            for ty in self.atom_types(schema, atom) {
                val.sig_sets
                    .entry(ty.to_string())
                    .or_default()
                    .insert(atom.nickname.clone());
            }
        }
        for conn in &self.connections {
            let tuple = conn
                .atom_ids
                .iter()
                .map(|id| self.nickname(id).unwrap_or(id).to_string())
                .collect();
            val.rel_tuples
                .entry(conn.relation.clone())
                .or_default()
                .insert(tuple);
        }
        val
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schema::load_model;

    fn ids(ids: &[&str]) -> Vec<String> {
        ids.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn nicknames_count_per_sig() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let mut t = TestCase::new("t", &schema);
        let n0 = t.add_atom(&schema, "Node", 0.0, 0.0).unwrap();
        let l0 = t.add_atom(&schema, "List", 0.0, 0.0).unwrap();
        let n1 = t.add_atom(&schema, "Node", 0.0, 0.0).unwrap();
        assert_eq!((n0.nickname.as_str(), l0.nickname.as_str(), n1.nickname.as_str()), ("Node0", "List0", "Node1"));
        assert_eq!((n0.id.as_str(), l0.id.as_str(), n1.id.as_str()), ("a0", "a1", "a2"));
    }

    #[test]
    fn nicknames_are_not_reused() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let mut t = TestCase::new("t", &schema);
        let n0 = t.add_atom(&schema, "Node", 0.0, 0.0).unwrap();
        t.remove_atom(&n0.id).unwrap();
        let n1 = t.add_atom(&schema, "Node", 0.0, 0.0).unwrap();
        assert_eq!(n1.nickname, "Node1");
        assert_ne!(n1.id, n0.id);
    }

    #[test]
    fn nicknames_skip_declared_names() {
        let schema = load_model("sig A {}\nsig A0 {}").unwrap();
        let mut t = TestCase::new("t", &schema);
        assert_eq!(t.add_atom(&schema, "A", 0.0, 0.0).unwrap().nickname, "A1");
        assert_eq!(t.add_atom(&schema, "A0", 0.0, 0.0).unwrap().nickname, "A00");
    }

    #[test]
    fn second_list_is_blocked() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let mut t = TestCase::new("t", &schema);
        t.add_atom(&schema, "List", 0.0, 0.0).unwrap();
        let err = t.add_atom(&schema, "List", 0.0, 0.0).unwrap_err();
        assert!(matches!(err, CanvasError::Guidance(GuidanceVerdict::Blocked { .. })), "{err}");
        assert_eq!(t.atoms.len(), 1);
    }

    #[test]
    fn abstract_and_unknown_sigs() {
        let schema = load_model(fixtures::CV_FAULTY).unwrap();
        let mut t = TestCase::new("t", &schema);
        assert_eq!(t.add_atom(&schema, "Source", 0.0, 0.0), Err(CanvasError::AbstractSig("Source".into())));
        assert_eq!(t.add_atom(&schema, "Nope", 0.0, 0.0), Err(CanvasError::UnknownSig("Nope".into())));
    }

    #[test]
    fn removing_an_atom_cascades() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let mut t = fixtures::list_two_node(&schema);
        let node0 = t.atom_by_nickname("Node0").unwrap().id.clone();
        let removed = t.remove_atom(&node0).unwrap();
        assert_eq!(removed.connections.len(), 2);
        assert!(t.connections.is_empty());
        let val = t.derive_valuation(&schema);
        assert_eq!(val.sig("Node").collect::<Vec<_>>(), ["Node1"]);
    }

    #[test]
    fn removing_an_argument_atom_resets_the_predicate() {
        let schema = load_model("sig A {}\npred p[x : A] { some x }").unwrap();
        let mut t = TestCase::new("t", &schema);
        let a = t.add_atom(&schema, "A", 0.0, 0.0).unwrap();
        t.set_predicate_state(&schema, "p", PredState::Valid, vec![a.id.clone()]).unwrap();
        let removed = t.remove_atom(&a.id).unwrap();
        assert_eq!(removed.reset_predicates, ["p"]);
        assert_eq!(t.expectation("p"), PredicateExpectation::default());
    }

    #[test]
    fn segment_removal_takes_the_whole_tuple() {
        let schema = load_model(fixtures::LTS_FAULTY).unwrap();
        let mut t = fixtures::lts_nondeterministic(&schema);
        assert_eq!(t.connections.len(), 2);
        let removed = t.remove_connection(&ConnectionRef::Segment { index: 0, segment: 0 }).unwrap();
        assert_eq!(removed.len(), 1);
        assert_eq!(removed[0].atom_ids.len(), 3);
        assert_eq!(t.connections.len(), 1);
        let val = t.derive_valuation(&schema);
        assert_eq!(
            val.tuples("trans").cloned().collect::<Vec<_>>(),
            [ids(&["State1", "Event0", "State1"])]
        );
        assert!(t.remove_connection(&ConnectionRef::Segment { index: 0, segment: 2 }).is_err());
    }

    #[test]
    fn remove_binary_connection_by_tuple() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let mut t = fixtures::list_two_node(&schema);
        let link = t.connections[1].clone();
        let removed = t
            .remove_connection(&ConnectionRef::Tuple {
                relation: link.relation.clone(),
                atom_ids: link.atom_ids.clone(),
            })
            .unwrap();
        assert_eq!(removed, [link]);
        assert_eq!(t.connections.len(), 1);
        assert!(t.remove_connection(&ConnectionRef::Index(5)).is_err());
    }

    #[test]
    fn predicate_arguments_are_checked() {
        let schema = load_model("sig A {}\nsig B {}\npred p[x : A] { some x }").unwrap();
        let mut t = TestCase::new("t", &schema);
        let a = t.add_atom(&schema, "A", 0.0, 0.0).unwrap();
        let b = t.add_atom(&schema, "B", 0.0, 0.0).unwrap();
        assert!(matches!(t.set_predicate_state(&schema, "p", PredState::Valid, vec![]), Err(CanvasError::BadArgs(_))));
        assert!(matches!(t.set_predicate_state(&schema, "p", PredState::Valid, vec![b.id]), Err(CanvasError::BadArgs(_))));
        assert!(matches!(t.set_predicate_state(&schema, "q", PredState::Valid, vec![]), Err(CanvasError::UnknownPred(_))));
        t.set_predicate_state(&schema, "p", PredState::Invalid, vec![a.id.clone()]).unwrap();
        assert_eq!(t.expectation("p"), PredicateExpectation { state: PredState::Invalid, args: vec![a.id] });
    }

    #[test]
    fn fig1_valuation() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let val = fixtures::list_two_node(&schema).derive_valuation(&schema);
        assert_eq!(val.sig("List").collect::<Vec<_>>(), ["List0"]);
        assert_eq!(val.sig("Node").collect::<Vec<_>>(), ["Node0", "Node1"]);
        assert_eq!(val.tuples("header").cloned().collect::<Vec<_>>(), [ids(&["List0", "Node0"])]);
        assert_eq!(val.tuples("link").cloned().collect::<Vec<_>>(), [ids(&["Node0", "Node1"])]);
    }

    #[test]
    fn empty_canvas_valuation() {
        let schema = load_model(fixtures::CV_FAULTY).unwrap();
        let val = TestCase::new("t", &schema).derive_valuation(&schema);
        assert!(val.sig_sets.values().all(BTreeSet::is_empty));
        assert!(val.rel_tuples.values().all(BTreeSet::is_empty));
        assert_eq!(val.sig_sets.len(), 5);
        assert_eq!(val.rel_tuples.len(), 4);
    }

    #[test]
    fn lts_init_marker() {
        let schema = load_model(fixtures::LTS_FAULTY).unwrap();
        let val = fixtures::lts_nondeterministic(&schema).derive_valuation(&schema);
        assert_eq!(val.sig("Init").collect::<Vec<_>>(), ["State1"]);
        assert_eq!(val.sig("State").collect::<Vec<_>>(), ["State0", "State1"]);
    }

    #[test]
    fn extends_membership_propagates() {
        let schema = load_model(fixtures::CV_FAULTY).unwrap();
        let val = fixtures::cv_first(&schema).derive_valuation(&schema);
        assert_eq!(val.sig("Source").collect::<Vec<_>>(), ["User0", "User1"]);
        assert_eq!(val.sig("Institution").count(), 0);
    }

    #[test]
    fn test_case_json_shape() {
        let schema = load_model(fixtures::LIST_FAULTY).unwrap();
        let t = fixtures::list_two_node(&schema);
        let json = serde_json::to_value(&t).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["atoms", "connections", "predicateStates", "nicknameCounters"]);
        assert_eq!(json["atoms"][0]["nickname"], "List0");
        assert_eq!(json["connections"][0]["atomIds"][1], t.atoms[1].id);
        assert_eq!(json["predicateStates"]["acyclic"]["state"], "valid");
        let back: TestCase = serde_json::from_value(json).unwrap();
        assert_eq!(TestCase { name: t.name.clone(), ..back }, t);
    }
}
