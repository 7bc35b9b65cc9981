//! Line-delimited JSON datasets of (label, prediction) statement pairs.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: no valid records ({malformed} malformed lines)")]
    Empty { path: PathBuf, malformed: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    pub id: String,
    #[serde(default)]
    pub nl: Option<String>,
    pub label_fl: String,
    pub pred_fl: String,
    /// Human verdict: is the prediction a correct formalization?
    #[serde(default)]
    pub human: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MalformedLine {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub path: PathBuf,
    pub records: Vec<EvalRecord>,
    pub malformed: Vec<MalformedLine>,
}

fn check(record: &EvalRecord, seen: &HashSet<String>) -> Result<(), String> {
    if record.id.trim().is_empty() {
        return Err("empty id".into());
    }
    if seen.contains(&record.id) {
        return Err(format!("duplicate id `{}`", record.id));
    }
    if record.label_fl.trim().is_empty() {
        return Err("empty label_fl".into());
    }
    if record.pred_fl.trim().is_empty() {
        return Err("empty pred_fl".into());
    }
    Ok(())
}

/// Parses dataset text. Blank lines are ignored; bad lines are collected
/// with their 1-based line numbers.
pub fn parse_dataset(text: &str) -> (Vec<EvalRecord>, Vec<MalformedLine>) {
    let mut records = Vec::new();
    let mut malformed = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<EvalRecord>(line)
            .map_err(|e| e.to_string())
            .and_then(|r| check(&r, &seen).map(|()| r));
        match parsed {
            Ok(r) => {
                seen.insert(r.id.clone());
                records.push(r);
            }
            Err(reason) => malformed.push(MalformedLine {
                line: i + 1,
                reason,
            }),
        }
    }
    (records, malformed)
}

pub fn load_dataset(path: &Path) -> Result<Dataset, DatasetError> {
    let text = fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let (records, malformed) = parse_dataset(&text);
    if records.is_empty() {
        return Err(DatasetError::Empty {
            path: path.to_path_buf(),
            malformed: malformed.len(),
        });
    }
    Ok(Dataset {
        path: path.to_path_buf(),
        records,
        malformed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"id":"a","nl":"x","label_fl":"theorem t : 1 = 1","pred_fl":"theorem t : 1 = 1","human":true}"#;

    #[test]
    fn good_and_bad_lines() {
        let text = format!(
            "{GOOD}\nnot json\n\n{GOOD}\n{{\"id\":\"\",\"label_fl\":\"a\",\"pred_fl\":\"b\"}}\n"
        );
        let (records, malformed) = parse_dataset(&text);
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].human, Some(true));
        let lines: Vec<usize> = malformed.iter().map(|m| m.line).collect();
        assert_eq!(lines, vec![2, 4, 5]);
        assert!(malformed[1].reason.contains("duplicate"));
    }

    #[test]
    fn optional_fields() {
        let (records, _) = parse_dataset(
            r#"{"id":"b","label_fl":"theorem t : True","pred_fl":"theorem t : True"}"#,
        );
        assert_eq!(records[0].nl, None);
        assert_eq!(records[0].human, None);
    }

    #[test]
    fn empty_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.jsonl");
        fs::write(&path, "").unwrap();
        assert!(matches!(
            load_dataset(&path),
            Err(DatasetError::Empty { malformed: 0, .. })
        ));
        assert!(matches!(
            load_dataset(&dir.path().join("missing.jsonl")),
            Err(DatasetError::Io { .. })
        ));
    }
}
