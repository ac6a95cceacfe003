//! Saved model documents.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::gbm::BoostedEnsemble;
use crate::lime::Blackbox;
use crate::linear_models::GlmModel;
use crate::{Error, Result, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    Glm(GlmModel),
    Gbm(BoostedEnsemble),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelDocument {
    schema_version: u32,
    #[serde(flatten)]
    model: Model,
}

impl Model {
    pub fn kind(&self) -> &'static str {
        match self {
            Model::Glm(_) => "glm",
            Model::Gbm(_) => "gbm",
        }
    }

    pub fn feature_names(&self) -> &[String] {
        match self {
            Model::Glm(m) => &m.feature_names,
            Model::Gbm(m) => &m.feature_names,
        }
    }

    pub fn predict_pd(&self, x: &[f64]) -> Result<f64> {
        match self {
            Model::Glm(m) => m.predict_pd(x),
            Model::Gbm(m) => m.predict_pd(x),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument { schema_version: SCHEMA_VERSION, model: self.clone() };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Document(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        check_schema(doc.schema_version)?;
        Ok(doc.model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        out.write_all(self.to_json()?.as_bytes())
            .and_then(|_| out.write_all(b"\n"))
            .and_then(|_| out.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let doc: ModelDocument =
            serde_json::from_reader(BufReader::new(file)).map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
        check_schema(doc.schema_version)?;
        Ok(doc.model)
    }
}

fn check_schema(version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::Document(format!(
            "unsupported schema_version {version}, expected {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

impl Blackbox for Model {
    fn predict(&self, x: &[f64]) -> f64 {
        self.predict_pd(x).unwrap_or(f64::NAN)
    }

    fn n_features(&self) -> Option<usize> {
        Some(self.feature_names().len())
    }
}
