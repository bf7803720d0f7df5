//! Real-text ingestion and model-vs-corpus comparison.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::length::{token_length_hist, LengthTable};
use crate::zipf::{
    fit_zipf_exponent, rank_frequency, RankFrequencyTable, ZipfFit, DEFAULT_FIT_MAX_RANK,
};

/// Which characters count as letters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LetterClass {
    /// `[A-Za-z]` only.
    #[default]
    Ascii,
    /// Any Unicode alphabetic character.
    Unicode,
}

impl LetterClass {
    #[inline]
    fn is_letter(self, c: char) -> bool {
        match self {
            LetterClass::Ascii => c.is_ascii_alphabetic(),
            LetterClass::Unicode => c.is_alphabetic(),
        }
    }
}

/// Lowercase alphabetic tokens in reading order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenStream {
    pub source: String,
    pub tokens: Vec<String>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }
}

/// Maximal runs of letters, lowercased; everything else separates tokens.
pub fn tokenize_alpha(text: &str, letters: LetterClass, source: &str) -> TokenStream {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if letters.is_letter(c) {
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    TokenStream {
        source: source.to_string(),
        tokens,
    }
}

/// Decodes UTF-8, reporting the byte offset of the first invalid sequence.
pub fn decode_utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::Decode {
        offset: e.valid_up_to(),
    })
}

/// Text between the `*** START` and `*** END` marker lines, exclusive.
/// Missing markers leave that side untouched.
pub fn strip_gutenberg(text: &str) -> &str {
    let mut start = 0;
    let mut end = text.len();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        if trimmed.starts_with("*** START") && start == 0 {
            start = offset + line.len();
        } else if trimmed.starts_with("*** END") && offset >= start {
            end = offset;
            break;
        }
        offset += line.len();
    }
    &text[start..end.max(start)]
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadOptions {
    pub letters: LetterClass,
    pub strip_gutenberg: bool,
}

pub fn read_corpus(path: impl AsRef<Path>, opts: ReadOptions) -> Result<TokenStream> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = decode_utf8(&bytes)?;
    let body = if opts.strip_gutenberg {
        strip_gutenberg(text)
    } else {
        text
    };
    Ok(tokenize_alpha(
        body,
        opts.letters,
        &path.display().to_string(),
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusStats {
    pub lengths: LengthTable,
    pub ranks: RankFrequencyTable,
    pub tokens: u64,
    pub types: usize,
}

pub fn corpus_stats(stream: &TokenStream) -> CorpusStats {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for t in stream.iter() {
        *counts.entry(t).or_insert(0) += 1;
    }
    let tokens = stream.len() as u64;
    CorpusStats {
        lengths: token_length_hist(stream.iter()),
        types: counts.len(),
        ranks: rank_frequency(counts, tokens),
        tokens,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub tv_distance: f64,
    pub model_mode: Option<usize>,
    pub corpus_mode: Option<usize>,
    pub model_fit: Option<ZipfFit>,
    pub corpus_fit: Option<ZipfFit>,
    /// Shared rank window, when both tables have at least three ranks.
    pub window: Option<(usize, usize)>,
}

impl ComparisonReport {
    pub fn alpha_difference(&self) -> Option<f64> {
        Some(self.model_fit?.alpha - self.corpus_fit?.alpha)
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<usize>| v.map_or_else(|| "none".to_string(), |v| v.to_string());
        writeln!(f, "tv_distance={:.9}", self.tv_distance)?;
        writeln!(f, "model_mode={}", opt(self.model_mode))?;
        writeln!(f, "corpus_mode={}", opt(self.corpus_mode))?;
        match self.window {
            Some((lo, hi)) => writeln!(f, "window={lo}..{hi}")?,
            None => writeln!(f, "window=none")?,
        }
        let alpha = |fit: Option<ZipfFit>| {
            fit.map_or_else(|| "none".to_string(), |z| format!("{:.9}", z.alpha))
        };
        writeln!(f, "model_alpha={}", alpha(self.model_fit))?;
        writeln!(f, "corpus_alpha={}", alpha(self.corpus_fit))?;
        match self.alpha_difference() {
            Some(d) => writeln!(f, "alpha_difference={d:.9}"),
            None => writeln!(f, "alpha_difference=none"),
        }
    }
}

/// Length-distribution distance, both modes, and both exponents fitted over
/// ranks `1..=min(100, K_model, K_corpus)`.
pub fn compare_distributions(
    model_lengths: &LengthTable,
    model_ranks: &RankFrequencyTable,
    corpus_lengths: &LengthTable,
    corpus_ranks: &RankFrequencyTable,
) -> Result<ComparisonReport> {
    if model_lengths.is_empty() || corpus_lengths.is_empty() {
        return Err(Error::InvalidArgument(
            "comparison needs two non-empty length tables".into(),
        ));
    }
    let tv_distance = model_lengths
        .to_pmf()
        .total_variation(&corpus_lengths.to_pmf());
    let hi = model_ranks
        .len()
        .min(corpus_ranks.len())
        .min(DEFAULT_FIT_MAX_RANK);
    let (window, model_fit, corpus_fit) = if hi >= 3 {
        (
            Some((1, hi)),
            fit_zipf_exponent(model_ranks, 1, hi).ok(),
            fit_zipf_exponent(corpus_ranks, 1, hi).ok(),
        )
    } else {
        (None, None, None)
    };
    Ok(ComparisonReport {
        tv_distance,
        model_mode: model_lengths.mode(),
        corpus_mode: corpus_lengths.mode(),
        model_fit,
        corpus_fit,
        window,
    })
}
