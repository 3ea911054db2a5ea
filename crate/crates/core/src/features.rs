//! Vocabulary construction, tf-idf weighting, fixed-dimension truncation and
//! l1/l2 normalization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("vocabulary is empty after document-frequency filtering")]
    EmptyVocabulary,
    #[error("cannot build a vocabulary from zero documents")]
    NoDocuments,
    #[error("document-frequency bounds must satisfy 0 <= min < max <= 1, got [{0}, {1}]")]
    InvalidBounds(f64, f64),
    #[error("target dimensionality must be at least 1")]
    ZeroDimension,
    #[error("vector has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid sparse entry ({index}, {weight}) for dimension {dim}")]
    InvalidEntry { index: usize, weight: f64, dim: usize },
    #[error("invalid feature space: {0}")]
    InvalidSpace(String),
}

/// Normalization applied to a vector after projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    #[default]
    None,
    L1,
    L2,
}

impl NormMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NormMode::None => "none",
            NormMode::L1 => "l1",
            NormMode::L2 => "l2",
        }
    }
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(NormMode::None),
            "l1" => Ok(NormMode::L1),
            "l2" => Ok(NormMode::L2),
            other => Err(format!("unknown normalization {other:?} (expected none, l1 or l2)")),
        }
    }
}

/// A sparse vector of fixed dimension.
///
/// Entries are kept sorted by index and zero weights are never stored. The
/// pipeline only produces non-negative weights; signed weights are accepted so
/// that the similarity kernels can be exercised on arbitrary inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    dim: usize,
    entries: Vec<(usize, f64)>,
    norm_mode: NormMode,
    magnitude: f64,
}

impl FeatureVector {
    pub fn zeros(dim: usize) -> Self {
        FeatureVector {
            dim,
            entries: Vec::new(),
            norm_mode: NormMode::None,
            magnitude: 0.0,
        }
    }

    /// Builds a vector from `(index, weight)` pairs in any order. Zero weights
    /// are dropped; duplicate indices, out-of-range indices and non-finite
    /// weights are rejected.
    pub fn from_sparse(
        dim: usize,
        mut entries: Vec<(usize, f64)>,
    ) -> Result<Self, FeatureError> {
        entries.retain(|&(_, w)| w != 0.0);
        entries.sort_by_key(|&(i, _)| i);
        for (k, &(index, weight)) in entries.iter().enumerate() {
            let duplicate = k > 0 && entries[k - 1].0 == index;
            if index >= dim || !weight.is_finite() || duplicate {
                return Err(FeatureError::InvalidEntry { index, weight, dim });
            }
        }
        Ok(Self::from_sorted(dim, entries, NormMode::None))
    }

    pub fn from_dense(values: &[f64]) -> Result<Self, FeatureError> {
        let entries = values.iter().copied().enumerate().collect();
        Self::from_sparse(values.len(), entries)
    }

    fn from_sorted(dim: usize, entries: Vec<(usize, f64)>, norm_mode: NormMode) -> Self {
        let magnitude = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        FeatureVector {
            dim,
            entries,
            norm_mode,
            magnitude,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Nonzero `(index, weight)` pairs in ascending index order.
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn norm_mode(&self) -> NormMode {
        self.norm_mode
    }

    /// Euclidean length, summed in index order.
    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, w) in &self.entries {
            out[i] = w;
        }
        out
    }

    /// Records a normalization mode without rescaling; used when reading
    /// vectors that were normalized before they were stored.
    pub(crate) fn with_norm_mode(mut self, mode: NormMode) -> Self {
        self.norm_mode = mode;
        self
    }

    pub fn scaled(&self, factor: f64) -> FeatureVector {
        let entries = self
            .entries
            .iter()
            .map(|&(i, w)| (i, w * factor))
            .filter(|&(_, w)| w != 0.0)
            .collect();
        Self::from_sorted(self.dim, entries, NormMode::None)
    }
}

/// Scales `v` so that its l1 or l2 norm is one. Zero vectors come back
/// unchanged apart from the recorded mode.
pub fn normalize(v: &FeatureVector, mode: NormMode) -> FeatureVector {
    let divisor = match mode {
        NormMode::None => 1.0,
        NormMode::L1 => v.entries.iter().map(|&(_, w)| w.abs()).sum(),
        NormMode::L2 => v.magnitude,
    };
    if v.is_zero() || mode == NormMode::None {
        let mut out = v.clone();
        out.norm_mode = mode;
        return out;
    }
    let entries = v.entries.iter().map(|&(i, w)| (i, w / divisor)).collect();
    FeatureVector::from_sorted(v.dim, entries, mode)
}

/// Terms and their document frequencies, ordered lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    df: Vec<usize>,
    n_docs: usize,
}

impl Vocabulary {
    /// Keeps every term whose document fraction `df / n_docs` lies within
    /// `[min_df_frac, max_df_frac]`.
    pub fn build<D: AsRef<[String]>>(
        docs: &[D],
        min_df_frac: f64,
        max_df_frac: f64,
    ) -> Result<Self, FeatureError> {
        if !(0.0 <= min_df_frac && min_df_frac < max_df_frac && max_df_frac <= 1.0) {
            return Err(FeatureError::InvalidBounds(min_df_frac, max_df_frac));
        }
        if docs.is_empty() {
            return Err(FeatureError::NoDocuments);
        }
        let n_docs = docs.len();
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            let unique: HashSet<&str> = doc.as_ref().iter().map(String::as_str).collect();
            for term in unique {
                *counts.entry(term).or_default() += 1;
            }
        }
        let kept = counts.into_iter().filter(|&(_, df)| {
            let frac = df as f64 / n_docs as f64;
            min_df_frac <= frac && frac <= max_df_frac
        });
        let (terms, df): (Vec<String>, Vec<usize>) =
            kept.map(|(t, df)| (t.to_owned(), df)).unzip();
        if terms.is_empty() {
            return Err(FeatureError::EmptyVocabulary);
        }
        Self::from_parts(terms, df, n_docs)
    }

    /// Reassembles a vocabulary, checking ordering and frequency invariants.
    pub fn from_parts(
        terms: Vec<String>,
        df: Vec<usize>,
        n_docs: usize,
    ) -> Result<Self, FeatureError> {
        if terms.len() != df.len() {
            return Err(FeatureError::InvalidSpace(
                "terms and df have different lengths".into(),
            ));
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FeatureError::InvalidSpace(
                "terms must be strictly increasing".into(),
            ));
        }
        if df.iter().any(|&d| d == 0 || d > n_docs) {
            return Err(FeatureError::InvalidSpace(
                "document frequencies must lie in 1..=n_docs".into(),
            ));
        }
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            terms,
            index,
            df,
            n_docs,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn df(&self) -> &[usize] {
        &self.df
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn position(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

/// Smoothed inverse document frequency `ln((1 + n) / (1 + df)) + 1` per term.
pub fn compute_idf(vocab: &Vocabulary) -> Vec<f64> {
    let n = vocab.n_docs as f64;
    vocab
        .df
        .iter()
        .map(|&df| ((1.0 + n) / (1.0 + df as f64)).ln() + 1.0)
        .collect()
}

/// A vocabulary with idf weights and the subset of terms kept as dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSpace {
    vocabulary: Vocabulary,
    idf: Vec<f64>,
    selected: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl FeatureSpace {
    /// `selected` holds vocabulary positions; it is sorted on construction so
    /// that output dimensions follow vocabulary order.
    pub fn new(
        vocabulary: Vocabulary,
        idf: Vec<f64>,
        mut selected: Vec<usize>,
    ) -> Result<Self, FeatureError> {
        if idf.len() != vocabulary.len() {
            return Err(FeatureError::InvalidSpace(
                "idf length differs from vocabulary size".into(),
            ));
        }
        selected.sort_unstable();
        if selected.windows(2).any(|w| w[0] == w[1]) {
            return Err(FeatureError::InvalidSpace("duplicate selected feature".into()));
        }
        if selected.last().is_some_and(|&i| i >= vocabulary.len()) {
            return Err(FeatureError::InvalidSpace(
                "selected feature outside vocabulary".into(),
            ));
        }
        let mut slot = vec![None; vocabulary.len()];
        for (out, &term) in selected.iter().enumerate() {
            slot[term] = Some(out);
        }
        Ok(FeatureSpace {
            vocabulary,
            idf,
            selected,
            slot,
        })
    }

    /// Every vocabulary term kept, identity projection.
    pub fn full(vocabulary: Vocabulary) -> Self {
        let idf = compute_idf(&vocabulary);
        let selected = (0..vocabulary.len()).collect();
        Self::new(vocabulary, idf, selected).expect("identity selection is valid")
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    /// Output dimensionality M.
    pub fn dim(&self) -> usize {
        self.selected.len()
    }

    /// Same vocabulary and idf with a different selection.
    pub fn with_selection(&self, selected: Vec<usize>) -> Result<Self, FeatureError> {
        Self::new(self.vocabulary.clone(), self.idf.clone(), selected)
    }

    /// Restricts a full-vocabulary, unnormalized tf-idf vector to this space's
    /// selection and normalizes it.
    pub fn project(
        &self,
        full: &FeatureVector,
        mode: NormMode,
    ) -> Result<FeatureVector, FeatureError> {
        if full.dim != self.vocabulary.len() {
            return Err(FeatureError::DimensionMismatch {
                expected: self.vocabulary.len(),
                found: full.dim,
            });
        }
        let entries = full
            .entries
            .iter()
            .filter_map(|&(term, w)| self.slot[term].map(|out| (out, w)))
            .collect();
        let raw = FeatureVector::from_sorted(self.dim(), entries, NormMode::None);
        Ok(normalize(&raw, mode))
    }

    /// SHA-256 over the vocabulary, df, idf bit patterns and selection.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.vocabulary.n_docs as u64).to_le_bytes());
        for ((term, &df), &idf) in self
            .vocabulary
            .terms
            .iter()
            .zip(&self.vocabulary.df)
            .zip(&self.idf)
        {
            h.update(term.as_bytes());
            h.update([0]);
            h.update((df as u64).to_le_bytes());
            h.update(idf.to_bits().to_le_bytes());
        }
        h.update([0xff]);
        for &s in &self.selected {
            h.update((s as u64).to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

/// tf-idf vector of `doc` in `space`: raw term count times idf for every
/// selected term, re-indexed to `0..M`, then normalized. Tokens outside the
/// space are ignored.
pub fn vectorize<S: AsRef<str>>(doc: &[S], space: &FeatureSpace, mode: NormMode) -> FeatureVector {
    let mut counts: HashMap<usize, u32> = HashMap::new();
    for token in doc {
        if let Some(out) = space
            .vocabulary
            .position(token.as_ref())
            .and_then(|term| space.slot[term])
        {
            *counts.entry(out).or_default() += 1;
        }
    }
    let mut entries: Vec<(usize, f64)> = counts
        .into_iter()
        .map(|(out, c)| (out, c as f64 * space.idf[space.selected[out]]))
        .collect();
    entries.sort_unstable_by_key(|&(i, _)| i);
    normalize(
        &FeatureVector::from_sorted(space.dim(), entries, NormMode::None),
        mode,
    )
}

/// Vocabulary positions ordered by descending total tf-idf weight over a set
/// of training vectors, ties resolved by vocabulary (lexicographic) order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    order: Vec<usize>,
    totals: Vec<f64>,
}

impl FeatureRanking {
    pub fn from_vectors(
        train_vectors: &[FeatureVector],
        n_features: usize,
    ) -> Result<Self, FeatureError> {
        let mut totals = vec![0.0; n_features];
        for v in train_vectors {
            if v.dim != n_features {
                return Err(FeatureError::DimensionMismatch {
                    expected: n_features,
                    found: v.dim,
                });
            }
            for &(i, w) in &v.entries {
                totals[i] += w;
            }
        }
        let mut order: Vec<usize> = (0..n_features).collect();
        order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(a.cmp(&b)));
        Ok(FeatureRanking { order, totals })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    /// The best `min(m, n_features)` positions in ascending position order.
    pub fn top(&self, m: usize) -> Vec<usize> {
        let mut kept = self.order[..m.min(self.order.len())].to_vec();
        kept.sort_unstable();
        kept
    }
}

/// Keeps the `m` features with the largest summed tf-idf weight over
/// `train_vectors`, which must be full-vocabulary and unnormalized.
pub fn select_top_features(
    train_vectors: &[FeatureVector],
    vocab: Vocabulary,
    m: usize,
) -> Result<FeatureSpace, FeatureError> {
    if m == 0 {
        return Err(FeatureError::ZeroDimension);
    }
    let ranking = FeatureRanking::from_vectors(train_vectors, vocab.len())?;
    let idf = compute_idf(&vocab);
    FeatureSpace::new(vocab, idf, ranking.top(m))
}
