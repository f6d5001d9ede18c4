//! Helpers shared by the integration and acceptance suites.

use std::path::PathBuf;

use bracketforge::dsl::{compile, parse, Compiled};
use bracketforge::types::StrengthModel;

/// Directory holding the cookbook `.fmt` corpus.
pub fn formats_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("..")
        .join("..")
        .join("formats")
}

/// Loads and compiles every cookbook format, sorted by file name.
pub fn load_cookbook() -> Vec<(String, String, Compiled)> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(formats_dir())
        .expect("cookbook directory exists")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "fmt"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let file = path.file_name().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&path).unwrap();
            let ast = parse(&text).unwrap_or_else(|e| panic!("{file}: {e}"));
            let compiled = compile(&ast).unwrap_or_else(|e| panic!("{file}: {e}"));
            (file, text, compiled)
        })
        .collect()
}

/// Mildly graded strengths: seed i has strength `1/sqrt(i)`, so favorites
/// are favored without starving any outcome path of probability.
pub fn graded_model(team_count: u32) -> StrengthModel {
    let strengths = (1..=team_count).map(|i| 1.0 / (i as f64).sqrt()).collect();
    StrengthModel::bradley_terry(strengths).unwrap()
}

/// Deterministic model where the lower seed always wins.
#[allow(dead_code)] // each test target links its own subset of helpers
pub fn favorites_matrix(team_count: u32) -> StrengthModel {
    let n = team_count as usize;
    let p = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else if i < j {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    StrengthModel::matrix(p).unwrap()
}
