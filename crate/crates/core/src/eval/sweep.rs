use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::EvalError;
use crate::cbr::{retrieve_nearest, Case, CaseBase};
use crate::corpus::Corpus;
use crate::features::{
    vectorize, FeatureError, FeatureRanking, FeatureSpace, FeatureVector, NormMode, Vocabulary,
};
use crate::metrics::MetricKind;
use crate::preprocess::{PreprocessConfig, TokenList};

/// Dimensionality grid used when none is given.
pub const DEFAULT_DIMS: [usize; 14] = [10, 25, 50, 75, 100, 150, 200, 250, 300, 400, 500, 600, 700, 800];

pub const REPORT_HEADER: &str = "metric,dimension,normalization,accuracy,n_queries,n_zero_vectors";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub preprocess: PreprocessConfig,
    pub min_df: f64,
    pub max_df: f64,
    pub dims: Vec<usize>,
    pub norm: NormMode,
    pub metrics: Vec<MetricKind>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            preprocess: PreprocessConfig::default(),
            min_df: 0.01,
            max_df: 0.5,
            dims: DEFAULT_DIMS.to_vec(),
            norm: NormMode::None,
            metrics: MetricKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub metric: MetricKind,
    pub dimension: usize,
    pub normalization: NormMode,
    /// `None` when the row could not be evaluated (empty vocabulary).
    pub accuracy: Option<f64>,
    pub correct: usize,
    pub n_queries: usize,
    pub n_zero_vectors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub source: Option<String>,
    pub n_documents: usize,
    /// SHA-256 of the document ids joined by newlines, in corpus order.
    pub ids_sha256: String,
}

impl CorpusSummary {
    fn of(corpus: &Corpus) -> Self {
        let mut h = Sha256::new();
        for id in corpus.ids() {
            h.update(id.as_bytes());
            h.update(b"\n");
        }
        CorpusSummary {
            source: None,
            n_documents: corpus.len(),
            ids_sha256: hex::encode(h.finalize()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpaceRecord {
    pub dimension: usize,
    pub fingerprint: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub stopword_hash: String,
    /// Echo of the configuration that produced the report.
    pub config: String,
    pub train: CorpusSummary,
    pub test: CorpusSummary,
    pub vocabulary_size: usize,
    pub requested_dims: Vec<usize>,
    /// Feature spaces built from the training corpus, fingerprinted before any
    /// test document was vectorized.
    pub feature_spaces: Vec<SpaceRecord>,
    pub flagged: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    /// For each row, the training-corpus position retrieved for every test
    /// query, in test order. Empty for flagged rows.
    pub nearest: Vec<Vec<usize>>,
    pub provenance: Provenance,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let acc = r.accuracy.map(|a| a.to_string()).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.metric, r.dimension, r.normalization, acc, r.n_queries, r.n_zero_vectors
            )
            .expect("writing to a String");
        }
        out
    }

    pub fn provenance_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.provenance).expect("provenance serializes");
        s.push('\n');
        s
    }

    pub fn row(&self, metric: MetricKind, dimension: usize) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.dimension == dimension)
    }

    pub fn nearest_for(&self, metric: MetricKind, dimension: usize) -> Option<&[usize]> {
        self.rows
            .iter()
            .position(|r| r.metric == metric && r.dimension == dimension)
            .map(|i| self.nearest[i].as_slice())
    }
}

fn spec_echo(spec: &SweepSpec) -> String {
    let dims: Vec<String> = spec.dims.iter().map(usize::to_string).collect();
    let metrics: Vec<&str> = spec.metrics.iter().map(|m| m.as_str()).collect();
    format!(
        "min_df = {}\nmax_df = {}\ndims = {}\nnorm = {}\nmetrics = {}\n",
        spec.min_df,
        spec.max_df,
        dims.join(","),
        spec.norm,
        metrics.join(",")
    )
}

/// Requested dimensions clipped to the vocabulary size, deduplicated, ascending.
fn effective_dims(requested: &[usize], vocab_len: usize) -> Vec<usize> {
    let mut dims: Vec<usize> = requested.iter().map(|&m| m.min(vocab_len)).collect();
    dims.sort_unstable();
    dims.dedup();
    dims
}

/// Runs the metric × dimension grid for one normalization mode.
///
/// Vocabulary, idf and feature ranking come from `train` alone. Each dimension
/// keeps the top-M features of that single ranking, so smaller selections are
/// nested in larger ones. Every test document is classified by its nearest
/// training case; zero-vector queries are classified too and counted.
///
/// Parallel work (rayon) is combined in input order, so reports do not depend
/// on the number of worker threads.
pub fn run_sweep(train: &Corpus, test: &Corpus, spec: &SweepSpec) -> Result<SweepReport, EvalError> {
    if spec.dims.is_empty() || spec.dims.contains(&0) {
        return Err(EvalError::InvalidSweep("dimensions must be a nonempty list of positive integers".into()));
    }
    if spec.metrics.is_empty() {
        return Err(EvalError::InvalidSweep("no metrics given".into()));
    }
    if train.is_empty() {
        return Err(EvalError::InvalidSweep("training corpus is empty".into()));
    }
    if test.is_empty() {
        return Err(EvalError::InvalidSweep("test corpus is empty".into()));
    }
    let train_ids: HashSet<&str> = train.ids().collect();
    if let Some(shared) = test.ids().find(|id| train_ids.contains(id)) {
        return Err(EvalError::InvalidSweep(format!(
            "document id {shared:?} appears in both train and test"
        )));
    }
    spec.preprocess
        .validate()
        .map_err(|e| EvalError::InvalidSweep(e.to_string()))?;

    let pipeline = spec.preprocess.pipeline();
    let tokenize = |c: &Corpus| -> Vec<TokenList> {
        c.documents().par_iter().map(|d| pipeline.run(&d.text)).collect()
    };
    let train_tokens = tokenize(train);

    let mut provenance = Provenance {
        stopword_hash: spec.preprocess.stopword_hash(),
        config: spec_echo(spec),
        train: CorpusSummary::of(train),
        test: CorpusSummary::of(test),
        vocabulary_size: 0,
        requested_dims: spec.dims.clone(),
        feature_spaces: Vec::new(),
        flagged: Vec::new(),
    };

    let vocab = match Vocabulary::build(&train_tokens, spec.min_df, spec.max_df) {
        Ok(v) => v,
        Err(FeatureError::EmptyVocabulary) => {
            return Ok(flagged_report(test, spec, provenance));
        }
        Err(e) => return Err(e.into()),
    };
    provenance.vocabulary_size = vocab.len();

    let full = FeatureSpace::full(vocab);
    let train_full: Vec<FeatureVector> = train_tokens
        .par_iter()
        .map(|t| vectorize(t, &full, NormMode::None))
        .collect();
    let ranking = FeatureRanking::from_vectors(&train_full, full.dim())?;

    let dims = effective_dims(&spec.dims, full.dim());
    let spaces: Vec<FeatureSpace> = dims
        .iter()
        .map(|&m| full.with_selection(ranking.top(m)))
        .collect::<Result<_, _>>()?;
    provenance.feature_spaces = spaces
        .iter()
        .map(|s| SpaceRecord {
            dimension: s.dim(),
            fingerprint: s.fingerprint(),
        })
        .collect();

    let test_tokens = tokenize(test);
    let test_full: Vec<FeatureVector> = test_tokens
        .par_iter()
        .map(|t| vectorize(t, &full, NormMode::None))
        .collect();
    let truths: Vec<&str> = test.documents().iter().map(|d| d.label.as_str()).collect();

    let mut cells: Vec<(usize, SweepRow, Vec<usize>)> = Vec::new();
    for space in &spaces {
        let project = |v: &FeatureVector| space.project(v, spec.norm);
        let cases = train
            .documents()
            .iter()
            .zip(&train_full)
            .map(|(doc, v)| {
                Ok(Case {
                    id: doc.id.clone(),
                    vector: project(v)?,
                    label: doc.label.clone(),
                })
            })
            .collect::<Result<Vec<_>, FeatureError>>()?;
        let base = CaseBase::from_cases(space.dim(), cases)
            .expect("training ids are unique and share one dimension");
        let queries: Vec<FeatureVector> =
            test_full.iter().map(project).collect::<Result<_, _>>()?;
        let n_zero = queries.iter().filter(|q| q.is_zero()).count();

        for (metric_order, &metric) in spec.metrics.iter().enumerate() {
            let nearest: Vec<usize> = queries
                .par_iter()
                .map(|q| {
                    retrieve_nearest(q, &base, metric)
                        .expect("nonempty base with matching dimension")
                        .position
                })
                .collect();
            let correct = nearest
                .iter()
                .zip(&truths)
                .filter(|(&p, &t)| base.cases()[p].label == t)
                .count();
            let row = SweepRow {
                metric,
                dimension: space.dim(),
                normalization: spec.norm,
                accuracy: Some(correct as f64 / queries.len() as f64),
                correct,
                n_queries: queries.len(),
                n_zero_vectors: n_zero,
            };
            cells.push((metric_order, row, nearest));
        }
    }
    cells.sort_by_key(|(order, row, _)| (*order, row.dimension));

    let (rows, nearest) = cells.into_iter().map(|(_, r, n)| (r, n)).unzip();
    Ok(SweepReport {
        rows,
        nearest,
        provenance,
    })
}

fn flagged_report(test: &Corpus, spec: &SweepSpec, mut provenance: Provenance) -> SweepReport {
    let mut dims = spec.dims.clone();
    dims.sort_unstable();
    dims.dedup();
    let mut rows = Vec::new();
    for &metric in &spec.metrics {
        for &dimension in &dims {
            rows.push(SweepRow {
                metric,
                dimension,
                normalization: spec.norm,
                accuracy: None,
                correct: 0,
                n_queries: test.len(),
                n_zero_vectors: test.len(),
            });
            provenance
                .flagged
                .push(format!("{metric},{dimension}: empty vocabulary"));
        }
    }
    let nearest = vec![Vec::new(); rows.len()];
    SweepReport {
        rows,
        nearest,
        provenance,
    }
}
