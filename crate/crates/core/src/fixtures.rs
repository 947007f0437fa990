//! Reference models and canvases: a singly-linked list, a labelled
//! transition system and a CV policy, each in a faulty and a fixed version.

use crate::schema::ModelSchema;
use crate::testcase::{PredState, TestCase};

pub const LIST_FAULTY: &str = "\
one sig List {header: lone Node}
sig Node {link: lone Node}
pred acyclic {
  all n : List.header.*link {
    n !in n.*link }
}
run acyclic for 3
";

pub const LIST_FIXED: &str = "\
one sig List {header: lone Node}
sig Node {link: lone Node}
pred acyclic {
  all n : List.header.*link {
    n !in n.^link }
}
run acyclic for 3
";

pub const LTS_FAULTY: &str = "\
sig State { trans : Event -> State }
sig Init in State {}
sig Event {}

//The LTS is deterministic.
pred inv3 {
  all s : State, e : Event | lone s.(e.trans)
}
";

pub const LTS_FIXED: &str = "\
sig State { trans : Event -> State }
sig Init in State {}
sig Event {}

//The LTS is deterministic.
pred inv3 {
  all s : State, e : Event | lone e.(s.trans)
}
";

pub const CV_FAULTY: &str = "\
abstract sig Source {}
sig User extends Source {
  profile : set Work,
  visible : set Work
}
sig Institution extends Source {}

sig Id {}
sig Work {
    ids : some Id,
    source : one Source
}

// The works publicly visible in a curriculum
// must be part of its profile
pred inv1 {
   User.visible in User.profile
}
";

pub const CV_FIXED: &str = "\
abstract sig Source {}
sig User extends Source {
  profile : set Work,
  visible : set Work
}
sig Institution extends Source {}

sig Id {}
sig Work {
    ids : some Id,
    source : one Source
}

// The works publicly visible in a curriculum
// must be part of its profile
pred inv1 {
   all u:User | u.visible in u.profile
}
";

/// All six model texts, labelled.
pub const MODELS: [(&str, &str); 6] = [
    ("lists-faulty", LIST_FAULTY),
    ("lists-fixed", LIST_FIXED),
    ("lts-faulty", LTS_FAULTY),
    ("lts-fixed", LTS_FIXED),
    ("cv-faulty", CV_FAULTY),
    ("cv-fixed", CV_FIXED),
];

pub type Builder = fn(&ModelSchema) -> TestCase;

struct Canvas<'s> {
    schema: &'s ModelSchema,
    test: TestCase,
}

impl<'s> Canvas<'s> {
    fn new(name: &str, schema: &'s ModelSchema) -> Self {
        Canvas {
            schema,
            test: TestCase::new(name, schema),
        }
    }

    fn atoms(mut self, sig: &str, n: usize) -> Self {
        let row = self.schema.sigs.iter().position(|s| s.name == sig).unwrap_or(0);
        for i in 0..n {
            self.test
                .add_atom(self.schema, sig, 40.0 + 120.0 * i as f64, 40.0 + 120.0 * row as f64)
                .unwrap_or_else(|e| panic!("fixture atom {sig}: {e}"));
        }
        self
    }

    fn id(&self, nick: &str) -> String {
        self.test
            .atom_by_nickname(nick)
            .unwrap_or_else(|| panic!("fixture atom {nick} missing"))
            .id
            .clone()
    }

    /// Connections written as `"a->b->c"` nickname chains.
    fn connect(mut self, relation: &str, tuples: &[&str]) -> Self {
        for tuple in tuples {
            let ids: Vec<String> = tuple.split("->").map(|n| self.id(n)).collect();
            self.test
                .add_connection(self.schema, relation, &ids)
                .unwrap_or_else(|e| panic!("fixture connection {relation} {tuple}: {e}"));
        }
        self
    }

    fn mark(mut self, nick: &str, subset: &str) -> Self {
        let id = self.id(nick);
        let mut marks = self.test.atom(&id).unwrap().subsets.clone();
        marks.insert(subset.to_string());
        self.test
            .set_subsets(self.schema, &id, marks)
            .unwrap_or_else(|e| panic!("fixture marker {subset} on {nick}: {e}"));
        self
    }

    fn expect(mut self, pred: &str, state: PredState) -> TestCase {
        self.test
            .set_predicate_state(self.schema, pred, state, Vec::new())
            .unwrap_or_else(|e| panic!("fixture predicate {pred}: {e}"));
        self.test
    }
}

/// A list with two nodes and no cycle, expecting `acyclic` to hold.
pub fn list_two_node(schema: &ModelSchema) -> TestCase {
    Canvas::new("twoNode", schema)
        .atoms("List", 1)
        .atoms("Node", 2)
        .connect("header", &["List0->Node0"])
        .connect("link", &["Node0->Node1"])
        .expect("acyclic", PredState::Valid)
}

/// Event0 takes State1 to two different states; `inv3` should reject it.
pub fn lts_nondeterministic(schema: &ModelSchema) -> TestCase {
    Canvas::new("nondeterministic", schema)
        .atoms("State", 2)
        .atoms("Event", 3)
        .connect("trans", &["State1->Event0->State0", "State1->Event0->State1"])
        .mark("State1", "Init")
        .expect("inv3", PredState::Invalid)
}

/// Three states and three events with every possible transition.
pub fn lts_maximal(schema: &ModelSchema) -> TestCase {
    let mut tuples = Vec::new();
    for s in 0..3 {
        for e in 0..3 {
            for t in 0..3 {
                tuples.push(format!("State{s}->Event{e}->State{t}"));
            }
        }
    }
    let tuples: Vec<&str> = tuples.iter().map(String::as_str).collect();
    Canvas::new("maximal", schema)
        .atoms("State", 3)
        .atoms("Event", 3)
        .connect("trans", &tuples)
        .mark("State1", "Init")
        .expect("inv3", PredState::Invalid)
}

/// User0 shows works that only User1 has in their profile.
pub fn cv_first(schema: &ModelSchema) -> TestCase {
    Canvas::new("firstReveal", schema)
        .atoms("User", 2)
        .atoms("Work", 3)
        .atoms("Id", 1)
        .connect("profile", &["User1->Work0", "User1->Work1", "User1->Work2"])
        .connect("visible", &["User0->Work0", "User0->Work1", "User0->Work2"])
        .connect("ids", &["Work0->Id0", "Work1->Id0", "Work2->Id0"])
        .connect("source", &["Work0->User1", "Work1->User1", "Work2->User0"])
        .expect("inv1", PredState::Invalid)
}

/// Three users who all see every work; User0 lacks Work0 in their profile.
pub fn cv_maximal(schema: &ModelSchema) -> TestCase {
    let mut visible = Vec::new();
    let mut ids = Vec::new();
    for a in 0..3 {
        for b in 0..3 {
            visible.push(format!("User{a}->Work{b}"));
            ids.push(format!("Work{a}->Id{b}"));
        }
    }
    let visible: Vec<&str> = visible.iter().map(String::as_str).collect();
    let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
    Canvas::new("maximal", schema)
        .atoms("User", 3)
        .atoms("Work", 3)
        .atoms("Id", 3)
        .connect(
            "profile",
            &[
                "User0->Work1", "User0->Work2", "User1->Work0", "User1->Work1",
                "User1->Work2", "User2->Work0", "User2->Work1", "User2->Work2",
            ],
        )
        .connect("visible", &visible)
        .connect("ids", &ids)
        .connect("source", &["Work0->User2", "Work1->User2", "Work2->User1"])
        .expect("inv1", PredState::Invalid)
}

/// Faulty model text paired with each case-study canvas builder.
pub fn case_studies() -> Vec<(&'static str, Builder)> {
    vec![
        (LIST_FAULTY, list_two_node as Builder),
        (LTS_FAULTY, lts_nondeterministic),
        (LTS_FAULTY, lts_maximal),
        (CV_FAULTY, cv_first),
        (CV_FAULTY, cv_maximal),
    ]
}

/// Build a canvas with `atoms` atoms and `connections` connections for any
/// model, going only through allowed edits. Atoms are spread over concrete
/// sigs in proportion to how many field columns each sig can fill;
/// connections cycle through the fields, taking candidate tuples in
/// lexicographic order.
pub fn generate_canvas(
    schema: &ModelSchema,
    name: &str,
    atoms: usize,
    connections: usize,
) -> Result<TestCase, String> {
    let mut test = TestCase::new(name, schema);
    let sigs: Vec<&str> = schema
        .concrete_sigs()
        .into_iter()
        .filter(|s| {
            schema
                .extends_chain(s)
                .iter()
                .all(|a| schema.sig(a).is_some_and(|d| !matches!(d.multiplicity, crate::syntax::SigMultiplicity::One | crate::syntax::SigMultiplicity::Lone)))
        })
        .collect();
    if sigs.is_empty() && atoms > 0 {
        return Err("model has no sig that can hold many atoms".into());
    }
    let weights: Vec<usize> = sigs
        .iter()
        .map(|s| {
            let types = schema.supertypes(s);
            1 + schema
                .fields
                .iter()
                .flat_map(|f| f.column_types())
                .filter(|c| types.contains(c))
                .count()
        })
        .collect();
    let total: usize = weights.iter().sum();
    let mut counts: Vec<usize> = weights.iter().map(|w| atoms * w / total.max(1)).collect();
    let mut order: Vec<usize> = (0..sigs.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse((atoms * weights[i]) % total.max(1)));
    let mut missing = atoms - counts.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if missing == 0 {
            break;
        }
        counts[i] += 1;
        missing -= 1;
    }
    for (sig, n) in sigs.iter().zip(&counts) {
        for i in 0..*n {
            let row = schema.sigs.iter().position(|s| s.name == *sig).unwrap_or(0);
            test.add_atom(schema, sig, 40.0 + 90.0 * i as f64, 40.0 + 120.0 * row as f64)
                .map_err(|e| e.to_string())?;
        }
    }

    let columns: Vec<Vec<Vec<String>>> = schema
        .fields
        .iter()
        .map(|f| {
            f.column_types()
                .map(|c| {
                    test.atoms
                        .iter()
                        .filter(|a| test.atom_types(schema, a).contains(c))
                        .map(|a| a.id.clone())
                        .collect()
                })
                .collect()
        })
        .collect();
    let sizes: Vec<usize> = columns
        .iter()
        .map(|cols| cols.iter().map(Vec::len).product())
        .collect();
    let mut cursors = vec![0usize; schema.fields.len()];
    let mut added = 0;
    while added < connections {
        let mut progressed = false;
        for (fi, field) in schema.fields.iter().enumerate() {
            if added == connections {
                break;
            }
            while cursors[fi] < sizes[fi] {
                let mut k = cursors[fi];
                cursors[fi] += 1;
                let mut tuple = vec![String::new(); columns[fi].len()];
                for (ci, col) in columns[fi].iter().enumerate().rev() {
                    tuple[ci] = col[k % col.len()].clone();
                    k /= col.len();
                }
                if test.add_connection(schema, &field.name, &tuple).is_ok() {
                    added += 1;
                    progressed = true;
                    break;
                }
            }
        }
        if !progressed {
            return Err(format!(
                "only {added} of {connections} connections fit on a canvas with {atoms} atoms"
            ));
        }
    }
    Ok(test)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::load_model;

    #[test]
    fn models_load() {
        for (name, text) in MODELS {
            load_model(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn maximal_canvases_have_listed_sizes() {
        let lts = load_model(LTS_FAULTY).unwrap();
        assert_eq!(lts_maximal(&lts).connections.len(), 27);
        let cv = load_model(CV_FAULTY).unwrap();
        let t = cv_maximal(&cv);
        assert_eq!((t.atoms.len(), t.connections.len()), (9, 29));
    }

    #[test]
    fn generated_canvases_hit_requested_sizes() {
        let lts = load_model(LTS_FAULTY).unwrap();
        for n in [3, 6, 12, 24, 48] {
            let t = generate_canvas(&lts, "big", n, n).unwrap();
            assert_eq!((t.atoms.len(), t.connections.len()), (n, n));
        }
        let cv = load_model(CV_FAULTY).unwrap();
        for (a, c) in [(9, 20), (21, 35), (36, 60), (48, 80), (60, 100)] {
            let t = generate_canvas(&cv, "big", a, c).unwrap();
            assert_eq!((t.atoms.len(), t.connections.len()), (a, c));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let cv = load_model(CV_FAULTY).unwrap();
        assert_eq!(generate_canvas(&cv, "g", 21, 35), generate_canvas(&cv, "g", 21, 35));
    }

    #[test]
    fn impossible_requests_are_reported() {
        let lists = load_model(LIST_FAULTY).unwrap();
        assert!(generate_canvas(&lists, "g", 1, 5).is_err());
    }
}
