//! Report emission: canonical JSON with sorted keys, atomic file writes, and
//! CSV rendering for the benchmark table. Identical inputs always serialize
//! to byte-identical files.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::Error;

/// Canonical JSON: object keys sorted at every level, two-space indentation,
/// trailing newline.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String, Error> {
    // serde_json's Value already keeps object keys in a sorted map, so a
    // round-trip through Value canonicalizes field order
    let value: Value = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

/// Write bytes atomically: a temp file in the destination directory followed
/// by a rename, so a crash or error never leaves partial output.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    if let Some(dir) = dir {
        fs::create_dir_all(dir)?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::BadConfig(format!("not a file path: {}", path.display())))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Serialize canonically and write atomically.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Error> {
    write_atomic(path, &canonical_json(value)?)
}

/// Render rows as CSV with a header line. Fields containing commas or quotes
/// are quoted.
pub fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let escape = |field: &str| {
        if field.contains(',') || field.contains('"') || field.contains('\n') {
            format!("\"{}\"", field.replace('"', "\"\""))
        } else {
            field.to_string()
        }
    };
    let mut out = String::new();
    out.push_str(&header.iter().map(|f| escape(f)).collect::<Vec<_>>().join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.iter().map(|f| escape(f)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_json_sorts_keys() {
        let text = canonical_json(&json!({"zebra": 1, "alpha": {"y": 2, "x": 3}})).unwrap();
        let alpha = text.find("\"alpha\"").unwrap();
        let zebra = text.find("\"zebra\"").unwrap();
        let x = text.find("\"x\"").unwrap();
        let y = text.find("\"y\"").unwrap();
        assert!(alpha < zebra && x < y);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn canonical_json_is_deterministic() {
        let report = crate::attacks::AttackReport {
            attack_name: "t".into(),
            params: crate::group::SecurityParams::desk(),
            trials: 10,
            successes: 10,
            rate: 1.0,
            analytic_bound: Some(0.5),
            seed: 7,
            details: Default::default(),
        };
        assert_eq!(canonical_json(&report).unwrap(), canonical_json(&report).unwrap());
        // exact top-level key set, in sorted order
        let value: serde_json::Value = serde_json::from_str(&canonical_json(&report).unwrap()).unwrap();
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            ["analytic_bound", "attack_name", "details", "params", "rate", "seed", "successes", "trials"]
                .iter()
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn atomic_write_roundtrip() {
        let dir = std::env::temp_dir().join("mixlab-report-test");
        let path = dir.join("out.json");
        write_json(&path, &json!({"b": 2, "a": 1})).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        // no stray temp file left behind
        assert!(!dir.join(".out.json.tmp").exists());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn csv_rendering() {
        let csv = render_csv(
            &["name", "value"],
            &[
                vec!["plain".into(), "1".into()],
                vec!["needs,quote".into(), "2".into()],
            ],
        );
        assert_eq!(csv, "name,value\nplain,1\n\"needs,quote\",2\n");
    }
}
