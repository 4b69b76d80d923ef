use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::approx::{de_extended_f64, ser_extended_f64};
use crate::geometry::DomainDescriptor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Whitney,
    Dimension,
    Porosity,
    Chains,
    HardySweep,
    Extension,
    Multiplier,
    Homogeneity,
}

impl Task {
    pub const ALL: [Task; 8] = [
        Task::Whitney,
        Task::Dimension,
        Task::Porosity,
        Task::Chains,
        Task::HardySweep,
        Task::Extension,
        Task::Multiplier,
        Task::Homogeneity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Whitney => "whitney",
            Task::Dimension => "dimension",
            Task::Porosity => "porosity",
            Task::Chains => "chains",
            Task::HardySweep => "hardy-sweep",
            Task::Extension => "extension",
            Task::Multiplier => "multiplier",
            Task::Homogeneity => "homogeneity",
        }
    }

    /// File stem of the task's CSV.
    pub fn stem(self) -> String {
        self.name().replace('-', "_")
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Task::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Task::ALL.iter().map(|t| t.name()).collect();
            format!("unknown task {s:?} (expected one of {})", names.join(", "))
        })
    }
}

fn default_p() -> Vec<f64> {
    vec![2.0]
}

fn default_seed() -> u64 {
    7
}

fn de_extended_list<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    struct Wrap(#[serde(deserialize_with = "de_extended_f64")] f64);
    Ok(Vec::<Wrap>::deserialize(d)?.into_iter().map(|w| w.0).collect())
}

fn ser_extended_list<S: serde::Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Wrap(#[serde(serialize_with = "ser_extended_f64")] f64);
    s.collect_seq(v.iter().map(|&x| Wrap(x)))
}

/// A JSON experiment description. Unset grids fall back to per-task defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the task given on the command line when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<Task>,
    pub domain: DomainDescriptor,
    #[serde(default)]
    pub s: Vec<f64>,
    #[serde(default = "default_p")]
    pub p: Vec<f64>,
    /// Fine indices; defaults to q = p. `"inf"` is accepted.
    #[serde(default, deserialize_with = "de_extended_list", serialize_with = "ser_extended_list")]
    pub q: Vec<f64>,
    #[serde(default)]
    pub j_max: Vec<u32>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Number of corpus functions where the task draws random ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corpus_size: Option<usize>,
    /// Ball radii (dimension) or dilation radii (homogeneity).
    #[serde(default)]
    pub radii: Vec<f64>,
    /// Boundary probes for the dimension estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    /// Cube scales for porosity and box counting.
    #[serde(default)]
    pub scales: Vec<f64>,
    /// Porosity samples per scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Known porosity constant of ∂G, quoted in multiplier reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub porosity: Option<f64>,
    /// Ignored by the runner; the command line decides the output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

impl ExperimentConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn q_or_p(&self) -> Vec<f64> {
        if self.q.is_empty() {
            self.p.clone()
        } else {
            self.q.clone()
        }
    }
}
