use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RunSpec;
use crate::error::{Error, Result};
use crate::model::{ModelClass, ModelConfigJson};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const PARTIAL_MANIFEST_FILE: &str = "manifest.partial.json";
pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub network_id: String,
    pub class: ModelClass,
    pub class_code: u8,
    pub config_index: u64,
    pub config: ModelConfigJson,
    pub seed: u64,
    pub attempts_used: u32,
    /// Record directory relative to the dataset root.
    pub path: String,
    pub files: Vec<String>,
}

/// A configuration whose every attempt went extinct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroppedConfig {
    pub class: ModelClass,
    pub config_index: u64,
    pub config: ModelConfigJson,
    pub attempts: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub toolkit_version: String,
    /// Seconds since the Unix epoch; the only field that differs between
    /// repeated runs.
    pub created_unix: u64,
    pub run: RunSpec,
    pub entries: Vec<ManifestEntry>,
    pub dropped: Vec<DroppedConfig>,
}

impl DatasetManifest {
    pub fn read(dataset_dir: &Path) -> Result<Self> {
        let path = dataset_dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let m: DatasetManifest = serde_json::from_str(&text)?;
        if m.format_version != MANIFEST_FORMAT_VERSION {
            return Err(Error::data(format!("unsupported manifest version {}", m.format_version)));
        }
        m.check_ids()?;
        Ok(m)
    }

    fn check_ids(&self) -> Result<()> {
        let mut ids: Vec<&str> = self.entries.iter().map(|e| e.network_id.as_str()).collect();
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::data(format!("duplicate network id {}", w[0])));
        }
        Ok(())
    }

    /// Writes to a temporary file and renames it into place.
    pub fn write_atomic(&self, dataset_dir: &Path, file_name: &str) -> Result<()> {
        let tmp = dataset_dir.join(format!(".{file_name}.tmp"));
        let path = dataset_dir.join(file_name);
        std::fs::write(&tmp, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    /// Per-class entry counts, indexed by class code.
    pub fn class_counts(&self) -> [usize; ModelClass::COUNT] {
        let mut c = [0; ModelClass::COUNT];
        self.entries.iter().for_each(|e| c[e.class_code as usize] += 1);
        c
    }
}
