//! JSON network description: the file format consumed by the CLI and the
//! bundled fixtures. Node indices are 1-based.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::{FailureScenario, FailureSet, NetworkModel, WeightSpec};
use crate::sysmodel::SubsystemDynamics;

/// One edge of the description; `weight` is a number or the string `"free"`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct EdgeDesc {
    pub from: usize,
    pub to: usize,
    pub weight: WeightDesc,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum WeightDesc {
    Fixed(f64),
    Keyword(String),
}

impl WeightDesc {
    fn to_spec(&self) -> Result<WeightSpec> {
        match self {
            WeightDesc::Fixed(v) => Ok(WeightSpec::Fixed(*v)),
            WeightDesc::Keyword(s) if s == "free" => Ok(WeightSpec::Free),
            WeightDesc::Keyword(s) => Err(Error::InvalidDescription(format!(
                "weight must be a number or \"free\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DynamicsDesc {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "Gamma")]
    pub gamma: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ScenarioDesc {
    pub name: String,
    pub edges: Vec<[usize; 2]>,
}

/// Serialized form of a networked-system instance.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NetworkDescription {
    pub nodes: usize,
    pub edges: Vec<EdgeDesc>,
    pub dynamics: DynamicsDesc,
    pub sensors: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<ScenarioDesc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failure_set: Vec<String>,
}

fn rows_to_matrix(rows: &[Vec<f64>], name: &str) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::InvalidDescription(format!("{name} must be non-empty")));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidDescription(format!("{name} has ragged rows")));
    }
    let data: Vec<f64> = rows.iter().flatten().copied().collect();
    Ok(DMatrix::from_row_slice(rows.len(), ncols, &data))
}

impl NetworkDescription {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidDescription(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("description serializes")
    }

    pub fn model(&self) -> Result<NetworkModel> {
        let mut edges = Vec::new();
        let mut pattern = Vec::new();
        for e in &self.edges {
            edges.push((e.from, e.to));
            pattern.push(((e.from, e.to), e.weight.to_spec()?));
        }
        NetworkModel::new(self.nodes, edges, pattern, self.sensors.iter().copied())
    }

    pub fn subsystem_dynamics(&self) -> Result<SubsystemDynamics> {
        SubsystemDynamics::new(
            rows_to_matrix(&self.dynamics.a, "A")?,
            rows_to_matrix(&self.dynamics.b, "B")?,
            rows_to_matrix(&self.dynamics.gamma, "Gamma")?,
            rows_to_matrix(&self.dynamics.c, "C")?,
        )
    }

    /// Named failure scenarios, validated against the model's edge set.
    pub fn scenarios(&self) -> Result<BTreeMap<String, FailureScenario>> {
        let model = self.model()?;
        let mut out = BTreeMap::new();
        for s in &self.failures {
            let scenario = FailureScenario::new(s.edges.iter().map(|&[f, t]| (f, t)))?;
            let missing: Vec<_> = scenario
                .removed_edges()
                .iter()
                .filter(|e| !model.edges().contains(e))
                .copied()
                .collect();
            if !missing.is_empty() {
                return Err(Error::FailureEdgesMissing(missing));
            }
            out.insert(s.name.clone(), scenario);
        }
        Ok(out)
    }

    pub fn scenario(&self, name: &str) -> Result<FailureScenario> {
        self.scenarios()?
            .remove(name)
            .ok_or_else(|| Error::UnknownScenario(name.to_string()))
    }

    /// The failure set named by `names`, or by the description's own
    /// `failure_set` field when `names` is empty.
    pub fn failure_set(&self, names: &[String]) -> Result<FailureSet> {
        let scenarios = self.scenarios()?;
        let selected: &[String] = if names.is_empty() {
            &self.failure_set
        } else {
            names
        };
        let mut list = Vec::new();
        for name in selected {
            let s = scenarios
                .get(name)
                .ok_or_else(|| Error::UnknownScenario(name.clone()))?;
            list.push(s.clone());
        }
        FailureSet::new(list)
    }
}
