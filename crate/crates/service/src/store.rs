//! File-backed persistence: `scenarios/<id>.json` holds the current version
//! of each scenario, `runs/<id>.json` one immutable record per run.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use tokio::sync::Mutex as AsyncMutex;

use priosel_core::domain::Scenario;
use priosel_core::fixtures::naples;
use priosel_core::io::{parse_scenario, save_scenario};

use crate::problem::ApiError;
use crate::runs::RunRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct StoredScenario {
    pub id: String,
    pub version: u64,
    pub updated_at: String,
    pub scenario: Scenario,
}

/// On-disk and wire form: the scenario travels as its versioned document.
#[derive(Serialize, Deserialize)]
pub struct ScenarioEnvelope {
    pub id: String,
    pub version: u64,
    pub updated_at: String,
    pub scenario: serde_json::Value,
}

impl StoredScenario {
    pub fn envelope(&self) -> ScenarioEnvelope {
        ScenarioEnvelope {
            id: self.id.clone(),
            version: self.version,
            updated_at: self.updated_at.clone(),
            scenario: document_value(&self.scenario),
        }
    }
}

pub fn document_value(s: &Scenario) -> serde_json::Value {
    serde_json::from_str(&save_scenario(s)).expect("canonical documents are JSON")
}

pub fn scenario_from_value(v: &serde_json::Value) -> Result<Scenario, ApiError> {
    Ok(parse_scenario(&v.to_string())?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub id: String,
    pub name: String,
    pub version: u64,
    pub updated_at: String,
}

pub struct Store {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<AsyncMutex<()>>>>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::Internal(e.to_string())
}

/// Ids name files, so only a conservative alphabet is accepted.
fn checked_id(id: &str) -> Option<&str> {
    let ok = !id.is_empty() && id.len() <= 128 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    ok.then_some(id)
}

async fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ApiError> {
    let tmp = path.with_extension(format!("tmp-{}", uuid::Uuid::new_v4().simple()));
    tokio::fs::write(&tmp, bytes).await.map_err(internal)?;
    tokio::fs::rename(&tmp, path).await.map_err(internal)
}

impl Store {
    /// Opens `root`, creating its layout, and seeds the Naples scenario when
    /// no scenario exists yet.
    pub async fn open(root: impl Into<PathBuf>) -> Result<Self, ApiError> {
        let root = root.into();
        for dir in ["scenarios", "runs"] {
            tokio::fs::create_dir_all(root.join(dir)).await.map_err(internal)?;
        }
        let store = Self {
            root,
            locks: Mutex::new(HashMap::new()),
        };
        if store.list().await?.is_empty() {
            store.insert("naples", naples()).await?;
        }
        Ok(store)
    }

    fn scenario_path(&self, id: &str) -> PathBuf {
        self.root.join("scenarios").join(format!("{id}.json"))
    }

    fn run_path(&self, id: &str) -> PathBuf {
        self.root.join("runs").join(format!("{id}.json"))
    }

    fn lock(&self, id: &str) -> Arc<AsyncMutex<()>> {
        let mut locks = self.locks.lock().expect("lock table is never poisoned");
        locks.entry(id.to_string()).or_default().clone()
    }

    pub async fn list(&self) -> Result<Vec<ScenarioSummary>, ApiError> {
        let mut dir = tokio::fs::read_dir(self.root.join("scenarios"))
            .await
            .map_err(internal)?;
        let mut out = Vec::new();
        while let Some(entry) = dir.next_entry().await.map_err(internal)? {
            let name = entry.file_name().to_string_lossy().into_owned();
            let Some(id) = name.strip_suffix(".json") else { continue };
            let s = self.get(id).await?;
            out.push(ScenarioSummary {
                id: s.id,
                name: s.scenario.name,
                version: s.version,
                updated_at: s.updated_at,
            });
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }

    pub async fn get(&self, id: &str) -> Result<StoredScenario, ApiError> {
        let not_found = || ApiError::NotFound(format!("scenario {id:?}"));
        let id = checked_id(id).ok_or_else(not_found)?;
        let bytes = match tokio::fs::read(self.scenario_path(id)).await {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(not_found()),
            Err(e) => return Err(internal(e)),
        };
        let env: ScenarioEnvelope = serde_json::from_slice(&bytes).map_err(internal)?;
        let scenario =
            scenario_from_value(&env.scenario).map_err(|e| internal(format!("stored scenario {id}: {e:?}")))?;
        Ok(StoredScenario {
            id: env.id,
            version: env.version,
            updated_at: env.updated_at,
            scenario,
        })
    }

    async fn write(&self, s: &StoredScenario) -> Result<(), ApiError> {
        let bytes = serde_json::to_vec_pretty(&s.envelope()).map_err(internal)?;
        write_atomic(&self.scenario_path(&s.id), &bytes).await
    }

    async fn insert(&self, id: &str, scenario: Scenario) -> Result<StoredScenario, ApiError> {
        let stored = StoredScenario {
            id: id.into(),
            version: 1,
            updated_at: now(),
            scenario,
        };
        self.write(&stored).await?;
        Ok(stored)
    }

    pub async fn create(&self, scenario: Scenario) -> Result<StoredScenario, ApiError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let lock = self.lock(&id);
        let _guard = lock.lock().await;
        self.insert(&id, scenario).await
    }

    /// Applies `edit` to the current version when it is still `expected`
    /// (or unconditionally when `expected` is `None`), then bumps the
    /// version. Writes to one scenario are serialized.
    pub async fn update<F>(&self, id: &str, expected: Option<u64>, edit: F) -> Result<StoredScenario, ApiError>
    where
        F: FnOnce(&mut Scenario) -> Result<(), ApiError>,
    {
        let lock = self.lock(id);
        let _guard = lock.lock().await;
        let mut current = self.get(id).await?;
        if let Some(v) = expected {
            if v != current.version {
                return Err(ApiError::Conflict {
                    expected: v,
                    current: current.version,
                });
            }
        }
        edit(&mut current.scenario)?;
        let report = priosel_core::domain::validate_scenario(&current.scenario);
        if !report.is_ok() {
            return Err(ApiError::report(&report));
        }
        current.version += 1;
        current.updated_at = now();
        self.write(&current).await?;
        Ok(current)
    }

    /// Records are never overwritten.
    pub async fn put_run(&self, record: &RunRecord) -> Result<(), ApiError> {
        use tokio::io::AsyncWriteExt;
        let bytes = serde_json::to_vec_pretty(record).map_err(internal)?;
        let mut f = tokio::fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(self.run_path(&record.id))
            .await
            .map_err(internal)?;
        f.write_all(&bytes).await.map_err(internal)?;
        f.flush().await.map_err(internal)
    }

    pub async fn get_run(&self, id: &str) -> Result<RunRecord, ApiError> {
        let not_found = || ApiError::NotFound(format!("run {id:?}"));
        let id = checked_id(id).ok_or_else(not_found)?;
        match tokio::fs::read(self.run_path(id)).await {
            Ok(b) => serde_json::from_slice(&b).map_err(internal),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(not_found()),
            Err(e) => Err(internal(e)),
        }
    }
}
