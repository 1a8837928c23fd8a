//! Reading subjects, tolerances from a corpus manifest, seed lists and the
//! on-disk layout of runs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use srgen_core::chromosome::Representation;
use srgen_core::subject::{parse_subject, SubjectUnit};

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_EVAL_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

/// An error carrying the exit status it should end the process with.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn input(error: anyhow::Error) -> Self {
        Failure { status: EXIT_INPUT, error }
    }

    pub fn config(error: anyhow::Error) -> Self {
        Failure { status: EXIT_CONFIG, error }
    }
}

pub struct Subject {
    pub path: PathBuf,
    /// File stem; names the output directory and test file.
    pub stem: String,
    pub source: String,
    pub unit: SubjectUnit,
}

pub fn load_subject(path: &Path) -> Result<Subject> {
    let source = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let unit = parse_subject(&source).map_err(|e| anyhow::anyhow!("{}:{e}", path.display()))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .with_context(|| format!("{} has no usable file name", path.display()))?
        .to_owned();
    Ok(Subject { path: path.to_owned(), stem, source, unit })
}

#[derive(Debug, Deserialize)]
struct CorpusManifest {
    subjects: Vec<CorpusEntry>,
}

#[derive(Debug, Deserialize)]
struct CorpusEntry {
    file: String,
    #[serde(default)]
    tolerance: Option<f64>,
}

/// Tolerance for a subject from a `manifest.json` next to it, if that
/// manifest lists the file.
pub fn manifest_tolerance(subject: &Path) -> Result<Option<f64>> {
    let Some(dir) = subject.parent() else { return Ok(None) };
    let path = dir.join("manifest.json");
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
    let m: CorpusManifest = serde_json::from_str(&text).with_context(|| format!("malformed {}", path.display()))?;
    let name = subject.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    Ok(m.subjects.into_iter().find(|e| e.file == name).and_then(|e| e.tolerance))
}

/// `7`, `1..10` (inclusive) or a comma list of either.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.trim().parse().with_context(|| format!("bad seed range `{part}`"))?;
            let b: u64 = b.trim().parse().with_context(|| format!("bad seed range `{part}`"))?;
            if a > b {
                bail!("empty seed range `{part}`");
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().with_context(|| format!("bad seed `{part}`"))?);
        }
    }
    if out.is_empty() {
        bail!("no seeds given");
    }
    Ok(out)
}

/// The `.sub` files of a directory, sorted by path.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("cannot list {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "sub"))
        .collect();
    out.sort();
    if out.is_empty() {
        bail!("no .sub files in {}", dir.display());
    }
    Ok(out)
}

pub fn run_dir(out: &Path, stem: &str, repr: Representation, seed: u64) -> PathBuf {
    out.join(stem).join(repr.name()).join(format!("seed-{seed}"))
}

pub fn tests_file_name(stem: &str, repr: Representation) -> String {
    format!("{stem}.{repr}.tests")
}
