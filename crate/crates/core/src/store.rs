//! File-backed project store: one JSON document per project.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schema::{load_model, ModelError, ModelSchema};
use crate::testcase::{CanvasError, TestCase};

pub const FORMAT_VERSION: u64 = 1;

const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
];

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no project `{0}`")]
    NotFound(String),
    #[error("a project named `{0}` already exists")]
    DuplicateProjectName(String),
    #[error("no test `{0}` in this project")]
    UnknownTest(String),
    #[error("a test named `{0}` already exists")]
    DuplicateTestName(String),
    #[error("corrupt project file{}: {detail}", version.map(|v| format!(" (formatVersion {v})")).unwrap_or_default())]
    CorruptProject { version: Option<u64>, detail: String },
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error(transparent)]
    Canvas(#[from] CanvasError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Project {
    pub id: String,
    pub name: String,
    pub model_source: String,
    pub schema: ModelSchema,
    pub color_assignments: BTreeMap<String, String>,
    pub tests: BTreeMap<String, TestCase>,
}

impl Project {
    pub fn test(&self, name: &str) -> Result<&TestCase, StoreError> {
        self.tests.get(name).ok_or_else(|| StoreError::UnknownTest(name.to_string()))
    }

    pub fn test_mut(&mut self, name: &str) -> Result<&mut TestCase, StoreError> {
        self.tests.get_mut(name).ok_or_else(|| StoreError::UnknownTest(name.to_string()))
    }

    /// Split borrow: the cached schema alongside one mutable test.
    pub fn schema_and_test(&mut self, name: &str) -> Result<(&ModelSchema, &mut TestCase), StoreError> {
        let test = self
            .tests
            .get_mut(name)
            .ok_or_else(|| StoreError::UnknownTest(name.to_string()))?;
        Ok((&self.schema, test))
    }

    fn to_document(&self) -> Document {
        Document {
            format_version: FORMAT_VERSION,
            name: self.name.clone(),
            model_source: self.model_source.clone(),
            color_assignments: self.color_assignments.clone(),
            tests: self.tests.clone(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct Document {
    format_version: u64,
    name: String,
    model_source: String,
    color_assignments: BTreeMap<String, String>,
    tests: BTreeMap<String, TestCase>,
}

pub fn default_colors(schema: &ModelSchema) -> BTreeMap<String, String> {
    schema
        .sigs
        .iter()
        .enumerate()
        .map(|(i, s)| (s.name.clone(), PALETTE[i % PALETTE.len()].to_string()))
        .collect()
}

fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') && !out.is_empty() {
            out.push('-');
        }
    }
    while out.ends_with('-') {
        out.pop();
    }
    if out.is_empty() {
        "project".into()
    } else {
        out
    }
}

/// Parse a project document. Unknown future format versions are refused.
pub fn decode_project(id: &str, bytes: &[u8]) -> Result<Project, StoreError> {
    let corrupt = |version, detail: String| StoreError::CorruptProject { version, detail };
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| corrupt(None, e.to_string()))?;
    let version = value.get("formatVersion").and_then(|v| v.as_u64());
    match version {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(corrupt(Some(v), format!("unsupported format version {v}"))),
        None => return Err(corrupt(None, "missing formatVersion".into())),
    }
    let doc: Document = serde_json::from_value(value).map_err(|e| corrupt(version, e.to_string()))?;
    let schema = load_model(&doc.model_source).map_err(|e| corrupt(version, format!("stored model: {e}")))?;
    let mut tests = doc.tests;
    for (name, test) in tests.iter_mut() {
        test.name = name.clone();
    }
    Ok(Project {
        id: id.to_string(),
        name: doc.name,
        model_source: doc.model_source,
        schema,
        color_assignments: doc.color_assignments,
        tests,
    })
}

pub fn encode_project(project: &Project) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(&project.to_document()).expect("documents serialize");
    bytes.push(b'\n');
    bytes
}

/// Mutations to one project are serialized through a per-project lock.
/// Reads go straight to disk; writes replace the file by rename, so a
/// reader sees either the old or the new document.
#[derive(Debug)]
pub struct ProjectStore {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
    create_lock: Mutex<()>,
}

impl ProjectStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(ProjectStore {
            dir,
            locks: Mutex::new(HashMap::new()),
            create_lock: Mutex::new(()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn lock_for(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(id.to_string()).or_default().clone()
    }

    fn ids(&self) -> Result<Vec<String>, StoreError> {
        let mut ids = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().is_some_and(|e| e == "json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                    ids.push(stem.to_string());
                }
            }
        }
        ids.sort();
        Ok(ids)
    }

    pub fn create_project(&self, name: &str, model_source: &str) -> Result<Project, StoreError> {
        let schema = load_model(model_source)?;
        let _guard = self.create_lock.lock().unwrap_or_else(|e| e.into_inner());
        if self.list_projects()?.iter().any(|p| p.name == name) {
            return Err(StoreError::DuplicateProjectName(name.to_string()));
        }
        let base = slug(name);
        let mut id = base.clone();
        let mut n = 2;
        while self.path(&id).exists() {
            id = format!("{base}-{n}");
            n += 1;
        }
        let project = Project {
            id,
            name: name.to_string(),
            model_source: model_source.to_string(),
            color_assignments: default_colors(&schema),
            schema,
            tests: BTreeMap::new(),
        };
        self.save_project(&project)?;
        Ok(project)
    }

    pub fn list_projects(&self) -> Result<Vec<Project>, StoreError> {
        self.ids()?.iter().map(|id| self.read(id)).collect()
    }

    fn read(&self, id: &str) -> Result<Project, StoreError> {
        match fs::read(self.path(id)) {
            Ok(bytes) => decode_project(id, &bytes),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::NotFound(id.to_string())),
            Err(e) => Err(e.into()),
        }
    }

    /// Look a project up by id, falling back to its display name.
    pub fn load_project(&self, key: &str) -> Result<Project, StoreError> {
        let id_like = !key.is_empty() && !key.contains(['/', '\\', '.']);
        if id_like {
            match self.read(key) {
                Err(StoreError::NotFound(_)) => {}
                other => return other,
            }
        }
        for id in self.ids()? {
            match self.read(&id) {
                Ok(project) if project.name == key => return Ok(project),
                Ok(_) | Err(StoreError::CorruptProject { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Err(StoreError::NotFound(key.to_string()))
    }

    pub fn save_project(&self, project: &Project) -> Result<(), StoreError> {
        let path = self.path(&project.id);
        let tmp = self.dir.join(format!(".{}.{}.tmp", project.id, std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&encode_project(project))?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn delete_project(&self, key: &str) -> Result<(), StoreError> {
        let id = self.load_project(key)?.id;
        let lock = self.lock_for(&id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        fs::remove_file(self.path(&id))?;
        Ok(())
    }

    /// Load, mutate and persist a project under its lock. Nothing is
    /// written when `f` fails.
    pub fn update<T>(
        &self,
        key: &str,
        f: impl FnOnce(&mut Project) -> Result<T, StoreError>,
    ) -> Result<(T, Project), StoreError> {
        let id = self.load_project(key)?.id;
        let lock = self.lock_for(&id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut project = self.read(&id)?;
        let out = f(&mut project)?;
        self.save_project(&project)?;
        Ok((out, project))
    }

    pub fn create_test(&self, key: &str, name: &str) -> Result<TestCase, StoreError> {
        let (test, _) = self.update(key, |p| {
            if p.tests.contains_key(name) {
                return Err(StoreError::DuplicateTestName(name.to_string()));
            }
            let test = TestCase::new(name, &p.schema);
            p.tests.insert(name.to_string(), test.clone());
            Ok(test)
        })?;
        Ok(test)
    }

    pub fn delete_test(&self, key: &str, name: &str) -> Result<TestCase, StoreError> {
        let (test, _) = self.update(key, |p| {
            p.tests.remove(name).ok_or_else(|| StoreError::UnknownTest(name.to_string()))
        })?;
        Ok(test)
    }

    /// Apply a canvas edit to one test and persist it.
    pub fn edit_test<T>(
        &self,
        key: &str,
        test: &str,
        f: impl FnOnce(&ModelSchema, &mut TestCase) -> Result<T, CanvasError>,
    ) -> Result<(T, TestCase), StoreError> {
        let (out, project) = self.update(key, |p| {
            let (schema, t) = p.schema_and_test(test)?;
            Ok(f(schema, t)?)
        })?;
        Ok((out, project.tests[test].clone()))
    }

    pub fn set_colors(&self, key: &str, colors: BTreeMap<String, String>) -> Result<Project, StoreError> {
        let ((), project) = self.update(key, |p| {
            p.color_assignments.extend(colors);
            Ok(())
        })?;
        Ok(project)
    }
}
