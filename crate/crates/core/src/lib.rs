//! Morphemic combinatorial word model.
//!
//! Words are assembled from four morpheme classes (prefix, root, derivational
//! suffix, inflection). Optional slots switch on by independent Bernoulli
//! activations, morphemes are drawn from per-class categorical weights, and an
//! admissibility constraint can veto combinations. On top of the generator the
//! crate provides exact word and length laws, a stochastic survival filter,
//! rank–frequency tabulation with log-log exponent fits, and tokenization of
//! real text for comparison.
//!
//! ```
//! use mcwm::prelude::*;
//!
//! let mut rng = mcwm::rng::lexicon_rng(1);
//! let lexicon = synth_lexicon(&SyntheticLexiconConfig::paper(), &mut rng).unwrap();
//! let counts = generate_corpus(
//!     &lexicon,
//!     &SlotActivations::paper(),
//!     &Free,
//!     &SurvivalSpec::always(),
//!     CorpusOptions { n_tokens: 10_000, seed: 1, threads: 1 },
//! )
//! .unwrap();
//! let table = rank_frequency(counts.sorted(), counts.surviving);
//! let fit = fit_zipf_default(&table).unwrap();
//! assert!(fit.alpha > 0.0);
//! ```

pub mod alias;
pub mod constraint;
pub mod corpus;
pub mod error;
pub mod filter;
pub mod generator;
pub mod length;
pub mod lexicon;
pub mod rng;
pub mod zipf;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::constraint::{Constraint, FnConstraint, Free, RootRules};
    pub use crate::corpus::{
        compare_distributions, corpus_stats, read_corpus, tokenize_alpha, ComparisonReport,
        CorpusStats, LetterClass, ReadOptions, TokenStream,
    };
    pub use crate::error::{Error, Result};
    pub use crate::filter::{
        survival_probability, survives, Direction, FilterMode, SurvivalFn, SurvivalSpec,
    };
    pub use crate::generator::{
        exact_word_distribution, generate_corpus, generate_word, sample_template, word_probability,
        Analysis, CorpusCounts, CorpusOptions, SlotActivations, Template, WordDistribution,
        WordForm, WordSampler,
    };
    pub use crate::length::{
        class_length_pmf, empirical_length_hist, exact_length_pmf, geometric_length_pmf,
        length_moments, n_morpheme_distribution, LengthMoments, LengthPmf, LengthTable,
    };
    pub use crate::lexicon::{
        build_zipf_weights, load_lexicon, save_lexicon, synth_lexicon, ClassConfig, Lexicon,
        LoadOptions, Morpheme, MorphemeClass, MorphemeInventory, SyntheticLexiconConfig,
    };
    pub use crate::zipf::{
        fit_zipf_default, fit_zipf_exponent, rank_frequency, synthetic_zipf, RankFrequencyTable,
        ZipfFit,
    };
}
