use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const ARTIFACT: &str = concat!("bunkbed ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub artifact: String,
    pub rng: String,
}

impl Default for Versions {
    fn default() -> Self {
        Versions { artifact: ARTIFACT.into(), rng: bunkbed::montecarlo::RNG_NAME.into() }
    }
}

/// One command invocation and its result. Keys are emitted in field
/// order; `inputs` is sorted by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub result: Value,
    pub versions: Versions,
    pub wall_time: f64,
}

impl RunRecord {
    pub fn new(command: &str, inputs: BTreeMap<String, String>, result: Value, wall_time: f64) -> Self {
        RunRecord { command: command.into(), inputs, result, versions: Versions::default(), wall_time }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}
