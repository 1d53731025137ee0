//! JSON-lines archive manifest: one object per line with fields `id`,
//! `class`, `image`, `labels` and `features`. Relative paths resolve against
//! the manifest's directory.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRecord {
    pub image_id: String,
    pub class_label: String,
    pub image_path: PathBuf,
    pub label_path: PathBuf,
    pub feature_path: PathBuf,
}

/// Wire form of a manifest line. Field order here fixes the serialized order.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ManifestLine {
    pub id: String,
    pub class: String,
    pub image: String,
    pub labels: String,
    pub features: String,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_manifest(&text, base)
}

/// Parses manifest text, resolving relative paths against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestRecord>> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut records = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let line: ManifestLine = serde_json::from_str(raw).map_err(|e| Error::Manifest {
            line: line_no,
            message: e.to_string(),
        })?;
        if let Some(first) = seen.insert(line.id.clone(), line_no) {
            return Err(Error::Manifest {
                line: line_no,
                message: format!("duplicate id {:?}, first defined on line {first}", line.id),
            });
        }
        let resolve = |p: &str| -> Result<PathBuf> {
            let full = base.join(p);
            if !full.is_file() {
                return Err(Error::Manifest {
                    line: line_no,
                    message: format!("referenced file {} does not exist", full.display()),
                });
            }
            Ok(full)
        };
        records.push(ManifestRecord {
            image_path: resolve(&line.image)?,
            label_path: resolve(&line.labels)?,
            feature_path: resolve(&line.features)?,
            image_id: line.id,
            class_label: line.class,
        });
    }
    records.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch_all(dir: &Path, names: &[&str]) {
        for n in names {
            fs::write(dir.join(n), b"x").unwrap();
        }
    }

    fn line(id: &str) -> String {
        format!(
            r#"{{"id":"{id}","class":"c","image":"a.ppm","labels":"a.pgm","features":"a.fmap"}}"#
        )
    }

    #[test]
    fn records_sorted_by_id() {
        let dir = tempfile::tempdir().unwrap();
        touch_all(dir.path(), &["a.ppm", "a.pgm", "a.fmap"]);
        let text = [line("img2"), line("img0"), line("img1")].join("\n");
        let recs = parse_manifest(&text, dir.path()).unwrap();
        let ids: Vec<_> = recs.iter().map(|r| r.image_id.as_str()).collect();
        assert_eq!(ids, ["img0", "img1", "img2"]);
        assert_eq!(recs[0].image_path, dir.path().join("a.ppm"));
    }

    #[test]
    fn duplicate_cites_both_lines() {
        let dir = tempfile::tempdir().unwrap();
        touch_all(dir.path(), &["a.ppm", "a.pgm", "a.fmap"]);
        let text = [
            line("img1"),
            line("img7"),
            line("img2"),
            line("img3"),
            line("img7"),
        ]
        .join("\n");
        match parse_manifest(&text, dir.path()).unwrap_err() {
            Error::Manifest { line, message } => {
                assert_eq!(line, 5);
                assert!(message.contains("line 2"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn empty_manifest_is_valid() {
        assert!(parse_manifest("", Path::new(".")).unwrap().is_empty());
    }

    #[test]
    fn missing_field_and_missing_file() {
        let err =
            parse_manifest(r#"{"id":"a","class":"c","image":"x"}"#, Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Manifest { line: 1, .. }));

        let dir = tempfile::tempdir().unwrap();
        let err = parse_manifest(&format!("\n{}", line("a")), dir.path()).unwrap_err();
        assert!(matches!(err, Error::Manifest { line: 2, .. }));
    }
}
