//! Model files.
//!
//! A model file is one JSON document:
//!
//! ```json
//! { "format": "uq-model", "version": 1, "model": { "kind": "mlp", ... } }
//! ```
//!
//! `kind` is one of `mlp`, `logistic`, `mlp-ensemble`, `logistic-ensemble`,
//! `vae`. Matrices are stored as `{ "rows", "cols", "data" }` with `data` in
//! row-major order. Floats are written in shortest round-trip form and parsed
//! exactly, so saving and loading reproduces every parameter bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Ensemble, LogisticModel, MlpModel, ModelError, VaeModel};

pub const MODEL_FORMAT: &str = "uq-model";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SavedModel {
    Mlp(MlpModel),
    Logistic(LogisticModel),
    MlpEnsemble(Ensemble<MlpModel>),
    LogisticEnsemble(Ensemble<LogisticModel>),
    Vae(VaeModel),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub model: SavedModel,
}

impl ModelFile {
    pub fn new(model: SavedModel) -> Self {
        Self {
            format: MODEL_FORMAT.to_owned(),
            version: MODEL_FORMAT_VERSION,
            model,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model types always serialise")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: ModelFile =
            serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(ModelError::Format(format!(
                "expected format `{MODEL_FORMAT}`, found `{}`",
                file.format
            )));
        }
        if file.version != MODEL_FORMAT_VERSION {
            return Err(ModelError::Format(format!(
                "unsupported version {}",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        fs::write(path, self.to_json()).map_err(|e| ModelError::Format(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let text = fs::read_to_string(path).map_err(|e| ModelError::Format(e.to_string()))?;
        Self::from_json(&text)
    }
}
