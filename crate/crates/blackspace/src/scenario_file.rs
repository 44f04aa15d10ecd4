//! JSON scenario files: either a whole suite or a single scenario.
//!
//! Field names and units follow the core types: times in ms (holding time
//! `E_B` in s), distances in m, `distance_x` in miles. `M` and `N` are the
//! registered receiver and secondary-link counts.

use std::path::Path;

use blackspace_core::model::ScenarioParams;
use blackspace_core::scenarios::{OutputOptions, ScenarioSuite};
use serde::Deserialize;

use crate::{Error, Result};

#[derive(Deserialize)]
#[serde(untagged)]
enum ScenarioFile {
    Suite(ScenarioSuite),
    Single(Box<ScenarioParams>),
}

/// Parses and validates a suite; a lone scenario becomes a one-entry suite
/// using its own protection requirement.
pub fn parse_suite(text: &str, origin: &Path) -> Result<ScenarioSuite> {
    let parsed: ScenarioFile = serde_json::from_str(text).map_err(|source| Error::Json {
        path: origin.to_path_buf(),
        source,
    })?;
    let suite = match parsed {
        ScenarioFile::Suite(s) => s,
        ScenarioFile::Single(s) => ScenarioSuite {
            protection: s.protection,
            scenarios: vec![*s],
            output: OutputOptions::default(),
        },
    };
    suite.validate()?;
    Ok(suite)
}

pub fn load_suite(path: &Path) -> Result<ScenarioSuite> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_suite(&text, path)
}

pub fn suite_to_json(suite: &ScenarioSuite) -> String {
    let mut text = serde_json::to_string_pretty(suite).expect("scenario types serialize");
    text.push('\n');
    text
}

pub fn save_suite(path: &Path, suite: &ScenarioSuite) -> Result<()> {
    std::fs::write(path, suite_to_json(suite)).map_err(|e| Error::io(path, e))
}
