//! Labeled document collections: loading from disk and seeded train/test splits.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use walkdir::WalkDir;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("corpus path does not exist: {0}")]
    MissingPath(PathBuf),
    #[error("{path}:{line}: {reason}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("document {id:?}: {reason}")]
    InvalidDocument { id: String, reason: String },
    #[error("corpus too small to split: {0} document(s), need at least 2")]
    TooSmall(usize),
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// One labeled text unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub id: String,
    pub label: String,
    pub text: String,
}

/// How a corpus is laid out on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// One JSON object per line with exactly the keys `id`, `label`, `text`.
    Jsonl,
    /// Immediate subdirectories are labels; every file below one is a document,
    /// identified by its path relative to the root.
    LabeledDirs,
}

impl CorpusFormat {
    /// Files are jsonl, directories are labeled-dirs.
    pub fn infer(path: &Path) -> Self {
        if path.is_dir() {
            CorpusFormat::LabeledDirs
        } else {
            CorpusFormat::Jsonl
        }
    }
}

/// An ordered, immutable collection of documents with unique ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<RawDocument>,
    labels: BTreeSet<String>,
}

impl Corpus {
    /// Validates ids and labels and keeps the given order.
    pub fn from_documents(documents: Vec<RawDocument>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        let mut labels = BTreeSet::new();
        for doc in &documents {
            if doc.id.is_empty() {
                return Err(CorpusError::InvalidDocument {
                    id: doc.id.clone(),
                    reason: "empty id".into(),
                });
            }
            if doc.label.is_empty() {
                return Err(CorpusError::InvalidDocument {
                    id: doc.id.clone(),
                    reason: "empty label".into(),
                });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateId(doc.id.clone()));
            }
            labels.insert(doc.label.clone());
        }
        Ok(Corpus { documents, labels })
    }

    pub fn documents(&self) -> &[RawDocument] {
        &self.documents
    }

    pub fn labels(&self) -> &BTreeSet<String> {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().map(|d| d.id.as_str())
    }

    /// Writes the corpus as jsonl, one document per line in corpus order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            out.push_str(&serde_json::to_string(doc).expect("documents serialize"));
            out.push('\n');
        }
        out
    }
}

pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    if !path.exists() {
        return Err(CorpusError::MissingPath(path.to_path_buf()));
    }
    match format {
        CorpusFormat::Jsonl => load_jsonl(path),
        CorpusFormat::LabeledDirs => load_labeled_dirs(path),
    }
}

fn load_jsonl(path: &Path) -> Result<Corpus, CorpusError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let reader = BufReader::new(file);
    let mut documents = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| CorpusError::MalformedLine {
            path: path.to_path_buf(),
            line: line_no,
            reason: e.to_string(),
        })?;
        if line_no == 1 && line.starts_with('\u{feff}') {
            return Err(CorpusError::MalformedLine {
                path: path.to_path_buf(),
                line: 1,
                reason: "byte order mark is not allowed".into(),
            });
        }
        let doc: RawDocument =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
                path: path.to_path_buf(),
                line: line_no,
                reason: e.to_string(),
            })?;
        documents.push(doc);
    }
    Corpus::from_documents(documents)
}

fn load_labeled_dirs(root: &Path) -> Result<Corpus, CorpusError> {
    let mut label_dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(io_err(root))? {
        let entry = entry.map_err(io_err(root))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        if name.starts_with('.') {
            continue;
        }
        if entry.file_type().map_err(io_err(root))?.is_dir() {
            label_dirs.push((name, entry.path()));
        }
    }

    let mut found = Vec::new();
    for (label, dir) in label_dirs {
        for entry in WalkDir::new(&dir).follow_links(true) {
            let entry = entry.map_err(|e| CorpusError::Io {
                path: dir.clone(),
                source: e.into(),
            })?;
            if !entry.file_type().is_file() || entry.file_name().to_string_lossy().starts_with('.')
            {
                continue;
            }
            let rel = entry
                .path()
                .strip_prefix(root)
                .expect("walk stays under root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect::<Vec<_>>()
                .join("/");
            found.push((rel, label.clone(), entry.into_path()));
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));

    let mut documents = Vec::with_capacity(found.len());
    for (id, label, path) in found {
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        let text = String::from_utf8(bytes).map_err(|_| CorpusError::InvalidDocument {
            id: id.clone(),
            reason: "file is not valid UTF-8".into(),
        })?;
        documents.push(RawDocument { id, label, text });
    }
    Corpus::from_documents(documents)
}

/// Number of test documents for a corpus of `n`: `round(fraction * n)` clamped
/// to `[1, n - 1]`.
pub fn test_size(n: usize, test_fraction: f64) -> usize {
    let raw = (test_fraction * n as f64).round() as usize;
    raw.clamp(1, n.saturating_sub(1).max(1))
}

/// Seeded split into `(train, test)`.
///
/// Document positions are shuffled with rand's Fisher-Yates `shuffle` driven by
/// `ChaCha8Rng::seed_from_u64(seed)`; the first `test_size` shuffled positions
/// form the test set. Both halves keep the original ingestion order.
pub fn split_corpus(
    corpus: &Corpus,
    test_fraction: f64,
    seed: u64,
) -> Result<(Corpus, Corpus), CorpusError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(CorpusError::InvalidFraction(test_fraction));
    }
    let n = corpus.len();
    if n < 2 {
        return Err(CorpusError::TooSmall(n));
    }
    let k = test_size(n, test_fraction);

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let mut in_test = vec![false; n];
    for &i in &order[..k] {
        in_test[i] = true;
    }

    let (mut train, mut test) = (Vec::with_capacity(n - k), Vec::with_capacity(k));
    for (doc, is_test) in corpus.documents.iter().zip(in_test) {
        if is_test {
            test.push(doc.clone());
        } else {
            train.push(doc.clone());
        }
    }
    Ok((
        Corpus::from_documents(train)?,
        Corpus::from_documents(test)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn doc(id: &str, label: &str) -> RawDocument {
        RawDocument {
            id: id.into(),
            label: label.into(),
            text: format!("text of {id}"),
        }
    }

    fn write_jsonl(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn empty_jsonl() {
        let f = write_jsonl("");
        let c = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert!(c.is_empty());
        assert!(c.labels().is_empty());
    }

    #[test]
    fn two_line_jsonl() {
        let f = write_jsonl(
            "{\"id\":\"a\",\"label\":\"x\",\"text\":\"t1\"}\n{\"id\":\"b\",\"label\":\"y\",\"text\":\"t2\"}\n",
        );
        let c = load_corpus(f.path(), CorpusFormat::Jsonl).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.ids().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(
            c.labels().iter().map(String::as_str).collect::<Vec<_>>(),
            ["x", "y"]
        );
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let f = write_jsonl("{\"id\":\"a\",\"label\":\"x\",\"text\":\"\"}\nnot json\n");
        match load_corpus(f.path(), CorpusFormat::Jsonl) {
            Err(CorpusError::MalformedLine { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_key_and_extra_key_rejected() {
        let f = write_jsonl("{\"id\":\"a\",\"text\":\"t\"}\n");
        assert!(matches!(
            load_corpus(f.path(), CorpusFormat::Jsonl),
            Err(CorpusError::MalformedLine { line: 1, .. })
        ));
        let f = write_jsonl("{\"id\":\"a\",\"label\":\"x\",\"text\":\"t\",\"extra\":1}\n");
        assert!(matches!(
            load_corpus(f.path(), CorpusFormat::Jsonl),
            Err(CorpusError::MalformedLine { line: 1, .. })
        ));
    }

    #[test]
    fn duplicate_id_rejected() {
        let f = write_jsonl(
            "{\"id\":\"a\",\"label\":\"x\",\"text\":\"\"}\n{\"id\":\"a\",\"label\":\"y\",\"text\":\"\"}\n",
        );
        assert!(matches!(
            load_corpus(f.path(), CorpusFormat::Jsonl),
            Err(CorpusError::DuplicateId(id)) if id == "a"
        ));
    }

    #[test]
    fn missing_path() {
        assert!(matches!(
            load_corpus(Path::new("/definitely/not/here.jsonl"), CorpusFormat::Jsonl),
            Err(CorpusError::MissingPath(_))
        ));
    }

    #[test]
    fn labeled_dirs_fixture() {
        let root = tempfile::tempdir().unwrap();
        fs::create_dir(root.path().join("pos")).unwrap();
        fs::create_dir(root.path().join("neg")).unwrap();
        fs::write(root.path().join("pos/b.txt"), "good film").unwrap();
        fs::write(root.path().join("pos/a.txt"), "great film").unwrap();
        fs::write(root.path().join("neg/c.txt"), "").unwrap();

        let c = load_corpus(root.path(), CorpusFormat::LabeledDirs).unwrap();
        assert_eq!(
            c.ids().collect::<Vec<_>>(),
            ["neg/c.txt", "pos/a.txt", "pos/b.txt"]
        );
        assert_eq!(c.documents()[0].label, "neg");
        assert_eq!(c.documents()[1].text, "great film");
        assert_eq!(c.labels().len(), 2);

        let again = load_corpus(root.path(), CorpusFormat::LabeledDirs).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn split_cardinality_and_determinism() {
        let docs = (0..10).map(|i| doc(&format!("d{i}"), "x")).collect();
        let c = Corpus::from_documents(docs).unwrap();
        let (train, test) = split_corpus(&c, 0.2, 7).unwrap();
        assert_eq!((train.len(), test.len()), (8, 2));
        let mut all: Vec<_> = train.ids().chain(test.ids()).map(String::from).collect();
        all.sort();
        let mut expected: Vec<_> = c.ids().map(String::from).collect();
        expected.sort();
        assert_eq!(all, expected);

        let (train2, test2) = split_corpus(&c, 0.2, 7).unwrap();
        assert_eq!(train.to_jsonl(), train2.to_jsonl());
        assert_eq!(test.to_jsonl(), test2.to_jsonl());
    }

    #[test]
    fn split_clamps() {
        let c = Corpus::from_documents(vec![doc("a", "x"), doc("b", "y")]).unwrap();
        let (train, test) = split_corpus(&c, 0.01, 1).unwrap();
        assert_eq!((train.len(), test.len()), (1, 1));
        let (train, test) = split_corpus(&c, 0.99, 1).unwrap();
        assert_eq!((train.len(), test.len()), (1, 1));
    }

    #[test]
    fn split_errors() {
        let c = Corpus::from_documents(vec![doc("a", "x")]).unwrap();
        assert!(matches!(
            split_corpus(&c, 0.5, 0),
            Err(CorpusError::TooSmall(1))
        ));
        let c = Corpus::from_documents(vec![doc("a", "x"), doc("b", "x")]).unwrap();
        assert!(matches!(
            split_corpus(&c, 1.0, 0),
            Err(CorpusError::InvalidFraction(_))
        ));
    }
}
