use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::schema::ModelSchema;

/// A concrete assignment of atoms to every sig and tuples to every field.
/// Atoms are identified by label (canvas nicknames, or `Sig$i` for
/// enumerated instances).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Valuation {
    pub sig_sets: BTreeMap<String, BTreeSet<String>>,
    pub rel_tuples: BTreeMap<String, BTreeSet<Vec<String>>>,
}

impl Valuation {
    /// A valuation with an empty entry for every sig and field of `schema`.
    pub fn empty(schema: &ModelSchema) -> Self {
        Valuation {
            sig_sets: schema
                .sigs
                .iter()
                .map(|s| (s.name.clone(), BTreeSet::new()))
                .collect(),
            rel_tuples: schema
                .fields
                .iter()
                .map(|f| (f.name.clone(), BTreeSet::new()))
                .collect(),
        }
    }

    pub fn sig(&self, name: &str) -> impl Iterator<Item = &str> {
        self.sig_sets
            .get(name)
            .into_iter()
            .flat_map(|s| s.iter().map(String::as_str))
    }

    pub fn tuples(&self, field: &str) -> impl Iterator<Item = &Vec<String>> {
        self.rel_tuples.get(field).into_iter().flatten()
    }

    /// Union of the sets of top-level sigs: every atom in the valuation.
    pub fn universe(&self, schema: &ModelSchema) -> BTreeSet<String> {
        schema
            .sigs
            .iter()
            .filter(|s| schema.parents(&s.name).is_empty())
            .flat_map(|s| self.sig(&s.name).map(str::to_string))
            .collect()
    }
}
