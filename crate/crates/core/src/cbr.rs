//! Case base and nearest-case retrieval.
//!
//! Retrieval is an exhaustive scan: every case is scored exactly once and the
//! best score wins, with exact ties going to the earliest inserted case.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::features::FeatureVector;
use crate::metrics::{Direction, MetricKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CbrError {
    #[error("case base is empty")]
    EmptyBase,
    #[error("vector has dimension {found}, case base has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("case id {0:?} already present")]
    DuplicateId(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub id: String,
    pub vector: FeatureVector,
    pub label: String,
}

/// An ordered pool of labeled vectors sharing one dimensionality.
///
/// Cloning is cheap: the cases are shared, and [`CaseBase::add_case`] returns a
/// new base instead of modifying this one.
#[derive(Debug, Clone)]
pub struct CaseBase {
    dim: usize,
    cases: Arc<Vec<Case>>,
    ids: Arc<HashSet<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    pub case_id: String,
    pub label: String,
    pub score: f64,
    pub metric: MetricKind,
    /// Insertion position of the retrieved case.
    pub position: usize,
}

impl CaseBase {
    pub fn new(dim: usize) -> Self {
        CaseBase {
            dim,
            cases: Arc::new(Vec::new()),
            ids: Arc::new(HashSet::new()),
        }
    }

    pub fn from_cases(dim: usize, cases: Vec<Case>) -> Result<Self, CbrError> {
        let mut ids = HashSet::with_capacity(cases.len());
        for case in &cases {
            check_dim(dim, &case.vector)?;
            if !ids.insert(case.id.clone()) {
                return Err(CbrError::DuplicateId(case.id.clone()));
            }
        }
        Ok(CaseBase {
            dim,
            cases: Arc::new(cases),
            ids: Arc::new(ids),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn cases(&self) -> &[Case] {
        &self.cases
    }

    pub fn contains(&self, id: &str) -> bool {
        self.ids.contains(id)
    }

    /// A new base with the case appended last.
    pub fn add_case(
        &self,
        id: impl Into<String>,
        vector: FeatureVector,
        label: impl Into<String>,
    ) -> Result<CaseBase, CbrError> {
        let id = id.into();
        check_dim(self.dim, &vector)?;
        if self.ids.contains(&id) {
            return Err(CbrError::DuplicateId(id));
        }
        let mut cases = Vec::with_capacity(self.cases.len() + 1);
        cases.extend(self.cases.iter().cloned());
        let mut ids = (*self.ids).clone();
        ids.insert(id.clone());
        cases.push(Case {
            id,
            vector,
            label: label.into(),
        });
        Ok(CaseBase {
            dim: self.dim,
            cases: Arc::new(cases),
            ids: Arc::new(ids),
        })
    }
}

fn check_dim(expected: usize, v: &FeatureVector) -> Result<(), CbrError> {
    if v.dim() == expected {
        Ok(())
    } else {
        Err(CbrError::DimensionMismatch {
            expected,
            found: v.dim(),
        })
    }
}

/// Position and score of the best case under an arbitrary scoring function,
/// calling `score` once per case in insertion order.
pub fn scan<F>(cases: &[Case], direction: Direction, mut score: F) -> Option<(usize, f64)>
where
    F: FnMut(&Case) -> f64,
{
    let mut best: Option<(usize, f64)> = None;
    for (pos, case) in cases.iter().enumerate() {
        let s = score(case);
        match best {
            Some((_, incumbent)) if !direction.improves(s, incumbent) => {}
            _ => best = Some((pos, s)),
        }
    }
    best
}

pub fn retrieve_nearest(
    query: &FeatureVector,
    base: &CaseBase,
    metric: MetricKind,
) -> Result<RetrievalResult, CbrError> {
    check_dim(base.dim, query)?;
    let (position, score) = scan(&base.cases, metric.direction(), |case| {
        metric.score_unchecked(query, &case.vector)
    })
    .ok_or(CbrError::EmptyBase)?;
    let case = &base.cases[position];
    Ok(RetrievalResult {
        case_id: case.id.clone(),
        label: case.label.clone(),
        score,
        metric,
        position,
    })
}

pub fn classify(
    query: &FeatureVector,
    base: &CaseBase,
    metric: MetricKind,
) -> Result<String, CbrError> {
    retrieve_nearest(query, base, metric).map(|r| r.label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(values: &[f64]) -> FeatureVector {
        FeatureVector::from_dense(values).unwrap()
    }

    fn base(vectors: &[&[f64]]) -> CaseBase {
        let cases = vectors
            .iter()
            .enumerate()
            .map(|(i, x)| Case {
                id: format!("c{i}"),
                vector: v(x),
                label: if i % 2 == 0 { "even" } else { "odd" }.into(),
            })
            .collect();
        CaseBase::from_cases(vectors[0].len(), cases).unwrap()
    }

    #[test]
    fn singleton() {
        let b = CaseBase::new(2).add_case("only", v(&[1.0, 0.0]), "pos").unwrap();
        for m in MetricKind::ALL {
            let r = retrieve_nearest(&v(&[0.0, 3.0]), &b, m).unwrap();
            assert_eq!(r.case_id, "only");
            assert_eq!(classify(&v(&[0.0, 3.0]), &b, m).unwrap(), "pos");
        }
    }

    #[test]
    fn exact_match_under_tsss() {
        let b = base(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0], &[3.0, 0.0, 1.0]]);
        let r = retrieve_nearest(&v(&[0.0, 1.0, 1.0]), &b, MetricKind::TsSs).unwrap();
        assert_eq!((r.case_id.as_str(), r.score), ("c1", 0.0));
        assert_eq!(r.label, "odd");
    }

    #[test]
    fn ties_go_to_first_inserted() {
        let b = base(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]]);
        for m in MetricKind::ALL {
            let r = retrieve_nearest(&v(&[1.0, 0.0]), &b, m).unwrap();
            assert_eq!(r.case_id, "c0", "{m}");
        }
        // Co-located cases: a later add never displaces an exact tie.
        let b2 = b.add_case("late", v(&[1.0, 0.0]), "x").unwrap();
        assert_eq!(
            retrieve_nearest(&v(&[1.0, 0.0]), &b2, MetricKind::Euclidean)
                .unwrap()
                .case_id,
            "c0"
        );
    }

    #[test]
    fn add_case_is_persistent() {
        let b = base(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let b2 = b.add_case("new", v(&[5.0, 5.0]), "fresh").unwrap();
        assert_eq!((b.len(), b2.len()), (2, 3));
        assert!(!b.contains("new") && b2.contains("new"));
        let r = retrieve_nearest(&v(&[5.0, 5.0]), &b2, MetricKind::TsSs).unwrap();
        assert_eq!(r.case_id, "new");
        assert_eq!(r.position, 2);

        assert_eq!(
            b2.add_case("new", v(&[1.0, 1.0]), "dup").unwrap_err(),
            CbrError::DuplicateId("new".into())
        );
        assert_eq!(
            b2.add_case("wide", v(&[1.0, 1.0, 1.0]), "x").unwrap_err(),
            CbrError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn errors() {
        let empty = CaseBase::new(2);
        assert_eq!(
            retrieve_nearest(&v(&[1.0, 0.0]), &empty, MetricKind::Cosine),
            Err(CbrError::EmptyBase)
        );
        let b = base(&[&[1.0, 0.0]]);
        assert!(matches!(
            retrieve_nearest(&v(&[1.0]), &b, MetricKind::Cosine),
            Err(CbrError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn scan_scores_each_case_once() {
        let b = base(&[&[1.0, 0.0], &[0.0, 1.0], &[2.0, 2.0], &[0.5, 0.5]]);
        let q = v(&[0.4, 0.6]);
        let mut calls = 0;
        let out = scan(b.cases(), Direction::LowerIsCloser, |c| {
            calls += 1;
            MetricKind::Euclidean.score(&q, &c.vector).unwrap()
        });
        assert_eq!(calls, b.len());
        assert_eq!(out.unwrap().0, 3);
    }

    #[test]
    fn permutation_of_untied_cases_does_not_change_result() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vectors: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..8).map(|_| rng.random_range(0.0..1.0)).collect())
            .collect();
        let make = |order: &[usize]| {
            let cases = order
                .iter()
                .map(|&i| Case {
                    id: format!("c{i}"),
                    vector: v(&vectors[i]),
                    label: format!("l{}", i % 3),
                })
                .collect();
            CaseBase::from_cases(8, cases).unwrap()
        };
        let forward: Vec<usize> = (0..30).collect();
        let reversed: Vec<usize> = (0..30).rev().collect();
        let (a, b) = (make(&forward), make(&reversed));
        for _ in 0..20 {
            let q = v(&(0..8).map(|_| rng.random_range(0.0..1.0)).collect::<Vec<_>>());
            for m in MetricKind::ALL {
                assert_eq!(
                    retrieve_nearest(&q, &a, m).unwrap().case_id,
                    retrieve_nearest(&q, &b, m).unwrap().case_id
                );
            }
        }
    }
}
