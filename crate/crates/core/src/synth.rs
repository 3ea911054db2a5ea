//! Seeded synthetic corpora for experiments and tests.
//!
//! Each label owns a topic vocabulary; documents mix topic words (drawn with a
//! Zipf-like skew) with words from a shared noise pool, and document lengths
//! are log-uniform so vector magnitudes vary widely. Generated words never
//! collide across labels after stemming and are never stopwords.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, RawDocument};
use crate::preprocess::english_stopwords;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub labels: Vec<String>,
    pub docs_per_label: usize,
    pub topic_words: Vec<Vec<String>>,
    pub noise_words: Vec<String>,
    /// Probability that a token is drawn from the document's topic.
    pub topic_share: f64,
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Exponent of the 1/rank^s weighting within a topic.
    pub zipf: f64,
    pub seed: u64,
}

const FILLERS: [&str; 8] = ["the", "and", "with", "of", "a", "to", "in", "is"];

/// Documents are emitted label by label, `{label}-{nnn}` ids, with occasional
/// stopwords and punctuation mixed into the text.
pub fn generate(spec: &SynthSpec) -> Corpus {
    assert_eq!(spec.labels.len(), spec.topic_words.len());
    assert!(spec.min_tokens >= 1 && spec.min_tokens <= spec.max_tokens);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = ((spec.min_tokens as f64).ln(), (spec.max_tokens as f64 + 1.0).ln());

    let mut docs = Vec::with_capacity(spec.labels.len() * spec.docs_per_label);
    for (label, topic) in spec.labels.iter().zip(&spec.topic_words) {
        let weights: Vec<f64> = (0..topic.len())
            .map(|r| 1.0 / ((r + 1) as f64).powf(spec.zipf))
            .collect();
        let topic_dist = WeightedIndex::new(&weights).expect("positive weights");
        for n in 0..spec.docs_per_label {
            let len = (rng.random_range(lo..hi).exp() as usize).clamp(spec.min_tokens, spec.max_tokens);
            let mut text = String::new();
            for k in 0..len {
                let word = if spec.noise_words.is_empty() || rng.random_bool(spec.topic_share) {
                    &topic[topic_dist.sample(&mut rng)]
                } else {
                    &spec.noise_words[rng.random_range(0..spec.noise_words.len())]
                };
                if k > 0 {
                    text.push(' ');
                }
                if rng.random_bool(0.15) {
                    text.push_str(FILLERS[rng.random_range(0..FILLERS.len())]);
                    text.push(' ');
                }
                text.push_str(word);
                if rng.random_bool(0.1) {
                    text.push(if rng.random_bool(0.5) { ',' } else { '.' });
                }
            }
            docs.push(RawDocument {
                id: format!("{label}-{n:03}"),
                label: label.clone(),
                text,
            });
        }
    }
    Corpus::from_documents(docs).expect("generated ids are unique")
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

/// `count` distinct pseudo-words, each a fixed two-letter prefix followed by
/// `syllables` random consonant-vowel pairs. Distinct prefixes keep word
/// families disjoint after suffix stripping.
pub fn pseudo_words(prefix: &str, count: usize, syllables: usize, rng: &mut impl Rng) -> Vec<String> {
    let stop: BTreeSet<String> = english_stopwords().into_iter().collect();
    let mut out = BTreeSet::new();
    while out.len() < count {
        let mut w = String::from(prefix);
        for _ in 0..syllables {
            w.push(CONSONANTS[rng.random_range(0..CONSONANTS.len())] as char);
            w.push(VOWELS[rng.random_range(0..VOWELS.len())] as char);
        }
        if !stop.contains(&w) {
            out.insert(w);
        }
    }
    // Shuffle out of lexicographic order so Zipf rank is unrelated to spelling.
    let mut words: Vec<String> = out.into_iter().collect();
    for i in (1..words.len()).rev() {
        words.swap(i, rng.random_range(0..=i));
    }
    words
}

fn prefixes(n: usize) -> Vec<String> {
    CONSONANTS
        .iter()
        .flat_map(|&c| VOWELS.iter().map(move |&v| format!("{}{}", c as char, v as char)))
        .take(n)
        .collect()
}

/// Pseudo-word corpus: `labels` topics of `topic_size` words plus a shared
/// noise pool of `noise_size` words.
pub fn pseudo_spec(
    labels: usize,
    docs_per_label: usize,
    topic_size: usize,
    noise_size: usize,
    topic_share: f64,
    seed: u64,
) -> SynthSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut pfx = prefixes(labels + 1);
    let noise_prefix = pfx.pop().expect("at least one prefix");
    let topic_words = pfx
        .iter()
        .map(|p| pseudo_words(p, topic_size, 2, &mut rng))
        .collect();
    let noise_words = if noise_size == 0 {
        Vec::new()
    } else {
        pseudo_words(&noise_prefix, noise_size, 2, &mut rng)
    };
    SynthSpec {
        labels: (0..labels).map(|i| format!("class{i}")).collect(),
        docs_per_label,
        topic_words,
        noise_words,
        topic_share,
        min_tokens: 3,
        max_tokens: 150,
        zipf: 1.0,
        seed,
    }
}

/// 500 documents, 4 labels, no shared vocabulary between labels.
pub fn disjoint_corpus(seed: u64) -> Corpus {
    generate(&pseudo_spec(4, 125, 60, 0, 1.0, seed))
}

/// 500 documents, 4 labels, 60% of tokens drawn from a shared pool.
pub fn noisy_overlap_corpus(seed: u64) -> Corpus {
    generate(&pseudo_spec(4, 125, 60, 300, 0.4, seed))
}

fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

pub const MINI_SEED: u64 = 20_190_701;
pub const MINI_TEST_FRACTION: f64 = 0.2;

/// The 60-document, 3-label English mini corpus.
pub fn mini_spec() -> SynthSpec {
    SynthSpec {
        labels: words("astronomy cooking sailing"),
        docs_per_label: 20,
        topic_words: vec![
            words("planet comet galaxy nebula telescope orbit asteroid meteor eclipse quasar stellar gravity cosmos supernova lunar solar"),
            words("recipe flour butter garlic oven simmer sauce pepper onion bake kitchen skillet noodle basil roast dough"),
            words("anchor harbor sail mast rudder hull tide vessel keel deck buoy regatta knot starboard voyage mooring"),
        ],
        noise_words: words("people today city music school weather market friend family money report travel color garden office paper window story morning river road letter phone coffee minute answer question health energy member student street country record history picture problem season service evening"),
        topic_share: 0.7,
        min_tokens: 15,
        max_tokens: 40,
        zipf: 0.8,
        seed: MINI_SEED,
    }
}

pub fn mini_corpus() -> Corpus {
    generate(&mini_spec())
}
