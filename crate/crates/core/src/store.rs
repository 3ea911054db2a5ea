//! On-disk feature spaces, vector sets and case bases.
//!
//! A store directory holds three files:
//!
//! * `space.json`: vocabulary, document frequencies, idf, selected features,
//!   normalization, stopword-list hash and the preprocessing configuration;
//! * `vectors.csv`: sparse triples `doc_id,feature_index,weight`, weights
//!   written with 17 significant digits;
//! * `labels.csv`: `case_id,label` for every case in case-base order. Cases
//!   with zero vectors appear here but contribute no rows to `vectors.csv`.

use std::collections::HashMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cbr::{Case, CaseBase, CbrError};
use crate::features::{FeatureError, FeatureSpace, FeatureVector, NormMode, Vocabulary};
use crate::preprocess::PreprocessConfig;

pub const SPACE_FORMAT: &str = "docsim-space/1";
pub const SPACE_FILE: &str = "space.json";
pub const VECTORS_FILE: &str = "vectors.csv";
pub const LABELS_FILE: &str = "labels.csv";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad space header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("unsupported store format {0:?}")]
    Format(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Feature(#[from] FeatureError),
    #[error("{0}")]
    Cases(#[from] CbrError),
    #[error("vectors.csv row for unknown document {0:?}")]
    UnknownDocument(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpaceHeader {
    format: String,
    n_docs: usize,
    terms: Vec<String>,
    df: Vec<usize>,
    idf: Vec<f64>,
    selected: Vec<usize>,
    norm: NormMode,
    stopword_hash: String,
    preprocess: PreprocessConfig,
}

/// A feature space plus everything needed to vectorize new text into it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceFile {
    pub space: FeatureSpace,
    pub norm: NormMode,
    pub preprocess: PreprocessConfig,
}

impl SpaceFile {
    pub fn to_json(&self) -> String {
        let v = self.space.vocabulary();
        let header = SpaceHeader {
            format: SPACE_FORMAT.into(),
            n_docs: v.n_docs(),
            terms: v.terms().to_vec(),
            df: v.df().to_vec(),
            idf: self.space.idf().to_vec(),
            selected: self.space.selected().to_vec(),
            norm: self.norm,
            stopword_hash: self.preprocess.stopword_hash(),
            preprocess: self.preprocess.clone(),
        };
        let mut s = serde_json::to_string_pretty(&header).expect("header serializes");
        s.push('\n');
        s
    }

    pub fn from_json(json: &str) -> Result<Self, StoreError> {
        let h: SpaceHeader = serde_json::from_str(json)?;
        if h.format != SPACE_FORMAT {
            return Err(StoreError::Format(h.format));
        }
        if h.stopword_hash != h.preprocess.stopword_hash() {
            return Err(StoreError::Feature(FeatureError::InvalidSpace(
                "stopword hash does not match the stored stopword list".into(),
            )));
        }
        let vocab = Vocabulary::from_parts(h.terms, h.df, h.n_docs)?;
        let space = FeatureSpace::new(vocab, h.idf, h.selected)?;
        Ok(SpaceFile {
            space,
            norm: h.norm,
            preprocess: h.preprocess,
        })
    }
}

/// Writes sparse triples for each `(doc_id, vector)` pair, in the given order.
pub fn write_vectors<'a, W, I>(out: W, vectors: I) -> Result<(), StoreError>
where
    W: Write,
    I: IntoIterator<Item = (&'a str, &'a FeatureVector)>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["doc_id", "feature_index", "weight"])?;
    for (id, v) in vectors {
        for &(i, weight) in v.entries() {
            w.write_record([id, &i.to_string(), &format!("{weight:.16e}")])?;
        }
    }
    w.flush().map_err(|source| StoreError::Io {
        path: PathBuf::from(VECTORS_FILE),
        source,
    })?;
    Ok(())
}

/// Reads sparse triples back, grouped by document in order of first
/// appearance. Every vector gets dimension `dim` and records `norm`.
pub fn read_vectors<R: Read>(
    input: R,
    dim: usize,
    norm: NormMode,
) -> Result<Vec<(String, FeatureVector)>, StoreError> {
    let mut r = csv::Reader::from_reader(input);
    let mut order: Vec<String> = Vec::new();
    let mut entries: HashMap<String, Vec<(usize, f64)>> = HashMap::new();
    for record in r.records() {
        let rec = record?;
        let bad = |what: &str| {
            StoreError::Feature(FeatureError::InvalidSpace(format!(
                "vectors.csv line {}: {what}",
                rec.position().map_or(0, |p| p.line())
            )))
        };
        let id = rec.get(0).ok_or_else(|| bad("missing doc_id"))?;
        let index: usize = rec
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad feature_index"))?;
        let weight: f64 = rec
            .get(2)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad weight"))?;
        if !entries.contains_key(id) {
            order.push(id.to_owned());
        }
        entries.entry(id.to_owned()).or_default().push((index, weight));
    }
    order
        .into_iter()
        .map(|id| {
            let e = entries.remove(&id).expect("every ordered id has entries");
            let v = FeatureVector::from_sparse(dim, e)?.with_norm_mode(norm);
            Ok((id, v))
        })
        .collect()
}

/// A persisted case base together with the space its vectors live in.
#[derive(Debug, Clone)]
pub struct CaseStore {
    pub space: SpaceFile,
    pub base: CaseBase,
}

impl CaseStore {
    pub fn save(&self, dir: &Path) -> Result<(), StoreError> {
        fs::create_dir_all(dir).map_err(|source| StoreError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        write_file(&dir.join(SPACE_FILE), self.space.to_json().as_bytes())?;

        let mut vectors = Vec::new();
        write_vectors(
            &mut vectors,
            self.base.cases().iter().map(|c| (c.id.as_str(), &c.vector)),
        )?;
        write_file(&dir.join(VECTORS_FILE), &vectors)?;

        let mut labels = csv::Writer::from_writer(Vec::new());
        labels.write_record(["case_id", "label"])?;
        for c in self.base.cases() {
            labels.write_record([&c.id, &c.label])?;
        }
        let labels = labels.into_inner().map_err(|e| StoreError::Io {
            path: dir.join(LABELS_FILE),
            source: e.into_error(),
        })?;
        write_file(&dir.join(LABELS_FILE), &labels)
    }

    pub fn load(dir: &Path) -> Result<Self, StoreError> {
        let space = SpaceFile::from_json(&read_file(&dir.join(SPACE_FILE))?)?;
        let dim = space.space.dim();
        let vectors = read_vectors(
            read_file(&dir.join(VECTORS_FILE))?.as_bytes(),
            dim,
            space.norm,
        )?;
        let mut by_id: HashMap<String, FeatureVector> = vectors.into_iter().collect();

        let labels_text = read_file(&dir.join(LABELS_FILE))?;
        let mut r = csv::Reader::from_reader(labels_text.as_bytes());
        let mut cases = Vec::new();
        for record in r.records() {
            let rec = record?;
            let (id, label) = (rec.get(0).unwrap_or(""), rec.get(1).unwrap_or(""));
            let vector = by_id
                .remove(id)
                .unwrap_or_else(|| FeatureVector::zeros(dim).with_norm_mode(space.norm));
            cases.push(Case {
                id: id.to_owned(),
                vector,
                label: label.to_owned(),
            });
        }
        if let Some(orphan) = by_id.into_keys().min() {
            return Err(StoreError::UnknownDocument(orphan));
        }
        let base = CaseBase::from_cases(dim, cases)?;
        Ok(CaseStore { space, base })
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    fs::write(path, bytes).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_file(path: &Path) -> Result<String, StoreError> {
    fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })
}
