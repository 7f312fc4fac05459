//! JSON input documents. Their schemas live in `data/schemas/`.

use std::path::Path;

use contact_core::approx::{RadialPotential, Shape};
use contact_core::assembly::ContactGraph;
use contact_core::fourbody::TestFunction4;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::bad_args(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::bad_args(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourbodyManifest {
    pub version: u32,
    pub members: Vec<TestFunction4>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedPotential {
    pub name: String,
    pub shape: Shape,
    pub coupling: f64,
    pub support_radius: f64,
}

impl NamedPotential {
    pub fn potential(&self) -> Result<RadialPotential, CliError> {
        RadialPotential::new(self.shape, self.coupling, self.support_radius)
            .map_err(|e| CliError::bad_args(format!("potential {}: {e}", self.name)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialCorpus {
    pub version: u32,
    pub potentials: Vec<NamedPotential>,
}

/// A potential file holds either a corpus or a single potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialFile {
    Corpus(PotentialCorpus),
    Single(NamedPotential),
}

impl PotentialFile {
    pub fn into_list(self) -> Vec<NamedPotential> {
        match self {
            PotentialFile::Corpus(c) => c.potentials,
            PotentialFile::Single(p) => vec![p],
        }
    }
}

pub fn load_potentials(path: &Path) -> Result<Vec<NamedPotential>, CliError> {
    let list = load_json::<PotentialFile>(path)?.into_list();
    if list.is_empty() {
        return Err(CliError::bad_args(format!("{}: no potentials", path.display())));
    }
    Ok(list)
}

pub fn load_graph(path: &Path) -> Result<ContactGraph, CliError> {
    load_json(path)
}

pub fn load_manifest(path: &Path) -> Result<FourbodyManifest, CliError> {
    load_json(path)
}
