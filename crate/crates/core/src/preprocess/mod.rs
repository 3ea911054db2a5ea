//! Text normalization: address stripping, letter-only tokenization, length and
//! stopword filtering, Porter stemming.

mod porter;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use porter::porter_stem;

/// The bundled English stopword list, one lowercase word per line.
pub const ENGLISH_STOPWORDS: &str = include_str!("../../resources/stopwords_en.txt");

/// Words from the bundled English list, in file order.
pub fn english_stopwords() -> Vec<String> {
    ENGLISH_STOPWORDS.lines().map(str::to_owned).collect()
}

/// SHA-256 (hex) of a stopword list rendered one word per line with a trailing
/// newline. For the bundled list this is the hash of the resource file.
pub fn stopword_hash(words: &[String]) -> String {
    let mut hasher = Sha256::new();
    for w in words {
        hasher.update(w.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub min_word_length: usize,
    pub lowercase: bool,
    pub stopwords: Vec<String>,
    pub strip_emails: bool,
    pub strip_urls: bool,
    pub letters_only: bool,
    pub stem: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            min_word_length: 3,
            lowercase: true,
            stopwords: english_stopwords(),
            strip_emails: true,
            strip_urls: true,
            letters_only: true,
            stem: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("min_word_length must be at least 1")]
    MinWordLength,
    #[error("stopword {0:?} is not lowercase")]
    StopwordCase(String),
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_word_length < 1 {
            return Err(ConfigError::MinWordLength);
        }
        if let Some(w) = self.stopwords.iter().find(|w| w.to_lowercase() != **w) {
            return Err(ConfigError::StopwordCase(w.clone()));
        }
        Ok(())
    }

    pub fn stopword_hash(&self) -> String {
        stopword_hash(&self.stopwords)
    }

    /// A reusable pipeline with the stopword set prepared for lookup.
    pub fn pipeline(&self) -> Preprocessor<'_> {
        Preprocessor {
            config: self,
            stopwords: self.stopwords.iter().map(String::as_str).collect(),
        }
    }
}

/// Tokens surviving the pipeline, in input order.
pub type TokenList = Vec<String>;

pub struct Preprocessor<'a> {
    config: &'a PreprocessConfig,
    stopwords: HashSet<&'a str>,
}

impl Preprocessor<'_> {
    /// Runs every stage up to, but not including, stemming.
    pub fn filter(&self, text: &str) -> TokenList {
        let cfg = self.config;

        let mut kept = String::with_capacity(text.len());
        for chunk in text.split_whitespace() {
            if (cfg.strip_emails && is_email(chunk)) || (cfg.strip_urls && is_url(chunk)) {
                continue;
            }
            kept.push_str(chunk);
            kept.push(' ');
        }

        let mut normalized = if cfg.lowercase {
            kept.to_lowercase()
        } else {
            kept
        };
        if cfg.letters_only {
            normalized = normalized
                .chars()
                .map(|c| if c.is_ascii_alphabetic() { c } else { ' ' })
                .collect();
        }

        normalized
            .split_whitespace()
            .filter(|t| t.chars().count() >= cfg.min_word_length)
            .filter(|t| !self.is_stopword(t))
            .map(str::to_owned)
            .collect()
    }

    fn is_stopword(&self, token: &str) -> bool {
        if self.stopwords.contains(token) {
            return true;
        }
        !self.config.lowercase && self.stopwords.contains(token.to_lowercase().as_str())
    }

    pub fn run(&self, text: &str) -> TokenList {
        let mut tokens = self.filter(text);
        if self.config.stem {
            for t in &mut tokens {
                *t = porter_stem(t);
            }
        }
        tokens
    }
}

pub fn preprocess_document(text: &str, config: &PreprocessConfig) -> TokenList {
    config.pipeline().run(text)
}

/// A whitespace-free run containing `@` followed somewhere later by `.`.
fn is_email(chunk: &str) -> bool {
    chunk
        .find('@')
        .is_some_and(|at| chunk[at + 1..].contains('.'))
}

/// A whitespace-free run starting with `http://`, `https://` or `www.`
/// (ASCII case-insensitive).
fn is_url(chunk: &str) -> bool {
    ["http://", "https://", "www."].iter().any(|p| {
        chunk
            .get(..p.len())
            .is_some_and(|head| head.eq_ignore_ascii_case(p))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bundled_list() {
        let words = english_stopwords();
        assert_eq!(words.len(), 318);
        assert!(words.iter().all(|w| w.bytes().all(|b| b.is_ascii_lowercase())));
        let mut sorted = words.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, words);
        let file_hash = hex::encode(Sha256::digest(ENGLISH_STOPWORDS.as_bytes()));
        assert_eq!(stopword_hash(&words), file_hash);
    }

    #[test]
    fn empty_input() {
        assert!(preprocess_document("", &PreprocessConfig::default()).is_empty());
    }

    #[test]
    fn strips_addresses_short_words_and_stopwords() {
        // "now" is on the bundled list, so only "contact" survives.
        let out = preprocess_document(
            "Contact me at bob@site.com or http://x.io now!!",
            &PreprocessConfig::default(),
        );
        assert_eq!(out, ["contact"]);

        let mut cfg = PreprocessConfig::default();
        cfg.stopwords.retain(|w| w != "now");
        let out = preprocess_document("Contact me at bob@site.com or http://x.io now!!", &cfg);
        assert_eq!(out, ["contact", "now"]);
    }

    #[test]
    fn address_removal_can_be_disabled() {
        let cfg = PreprocessConfig {
            strip_emails: false,
            strip_urls: false,
            stem: false,
            ..Default::default()
        };
        let out = preprocess_document("bob@site.com https://www.rust-lang.org", &cfg);
        assert_eq!(out, ["bob", "site", "com", "https", "www", "rust", "lang", "org"]);
    }

    #[test]
    fn plays_is_stemmed_to_plai() {
        let out = preprocess_document("Plays plays PLAYS", &PreprocessConfig::default());
        assert_eq!(out, ["plai", "plai", "plai"]);
    }

    #[test]
    fn patterns() {
        assert!(is_email("bob@site.com"));
        assert!(is_email("<bob@mail.site.org>,"));
        assert!(!is_email("a.b@c"));
        assert!(!is_email("@"));
        assert!(is_url("http://x.io"));
        assert!(is_url("HTTPS://X.IO"));
        assert!(is_url("www.example.com"));
        assert!(!is_url("xhttp://a"));
        assert!(!is_url("ww"));
    }

    #[test]
    fn non_ascii_letters_split_tokens() {
        let cfg = PreprocessConfig {
            stem: false,
            ..Default::default()
        };
        assert_eq!(preprocess_document("café naïveté", &cfg), ["caf", "vet"]);
    }

    #[test]
    fn stemming_may_shorten_below_min_length() {
        // Length filtering happens before stemming.
        let out = preprocess_document("ties", &PreprocessConfig::default());
        assert_eq!(out, ["ti"]);
    }

    #[test]
    fn validation() {
        let mut cfg = PreprocessConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.min_word_length = 0;
        assert_eq!(cfg.validate(), Err(ConfigError::MinWordLength));
        cfg.min_word_length = 3;
        cfg.stopwords.push("The".into());
        assert!(matches!(cfg.validate(), Err(ConfigError::StopwordCase(_))));
    }

    proptest! {
        #[test]
        fn filter_stages_are_a_fixed_point(text in "[ -~\\n\\t]{0,200}") {
            let cfg = PreprocessConfig::default();
            let pipeline = cfg.pipeline();
            let once = pipeline.filter(&text);
            let twice = pipeline.filter(&once.join(" "));
            prop_assert_eq!(&once, &twice);
            for t in &once {
                prop_assert!(t.len() >= cfg.min_word_length);
                prop_assert!(t.bytes().all(|b| b.is_ascii_lowercase()));
                prop_assert!(!cfg.stopwords.contains(t));
            }
        }

        #[test]
        fn output_tokens_are_letters_only(text in "\\PC{0,120}") {
            let out = preprocess_document(&text, &PreprocessConfig::default());
            for t in &out {
                prop_assert!(!t.is_empty());
                prop_assert!(t.bytes().all(|b| b.is_ascii_lowercase()));
            }
            prop_assert_eq!(&out, &preprocess_document(&text, &PreprocessConfig::default()));
        }
    }
}
