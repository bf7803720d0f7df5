//! Word sampling, exact word probabilities, and corpus generation.
//!
//! A word is an [`Analysis`]: an optional prefix, a mandatory root, an
//! optional derivational suffix and an optional inflection, each an index into
//! the matching inventory. Its surface is the concatenation in that order.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::constraint::Constraint;
use crate::error::{Error, Result};
use crate::filter::{FilterMode, SurvivalSpec};
use crate::lexicon::{neumaier_sum, Lexicon, MorphemeClass, MorphemeInventory};
use crate::rng::{filter_rng, generation_rng};

/// Attempts per word before a constraint is declared infeasible.
pub const DEFAULT_REJECTION_BUDGET: u64 = 1_000_000;

/// Largest number of analyses `exact_word_distribution` will enumerate by default.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

/// Tokens per corpus shard. Fixed so the shard layout does not depend on the thread count.
pub const SHARD_TOKENS: u64 = 1 << 16;

/// Activation probabilities of the optional slots. The root is always present.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlotActivations {
    prefix: f64,
    deriv: f64,
    infl: f64,
}

impl SlotActivations {
    pub fn new(prefix: f64, deriv: f64, infl: f64) -> Result<SlotActivations> {
        for (name, a) in [("a_P", prefix), ("a_S", deriv), ("a_E", infl)] {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {a}"
                )));
            }
        }
        Ok(SlotActivations {
            prefix,
            deriv,
            infl,
        })
    }

    /// a_P = 0.4, a_S = 0.6, a_E = 0.7.
    pub fn paper() -> SlotActivations {
        SlotActivations {
            prefix: 0.4,
            deriv: 0.6,
            infl: 0.7,
        }
    }

    pub fn prefix(&self) -> f64 {
        self.prefix
    }

    pub fn deriv(&self) -> f64 {
        self.deriv
    }

    pub fn infl(&self) -> f64 {
        self.infl
    }

    /// Activation of `class`; 1 for the root.
    pub fn of(&self, class: MorphemeClass) -> f64 {
        match class {
            MorphemeClass::Prefix => self.prefix,
            MorphemeClass::Root => 1.0,
            MorphemeClass::DerivSuffix => self.deriv,
            MorphemeClass::Inflection => self.infl,
        }
    }

    /// Rejects activations that would need a class the lexicon lacks.
    pub fn check_against(&self, lexicon: &Lexicon) -> Result<()> {
        for class in [
            MorphemeClass::Prefix,
            MorphemeClass::DerivSuffix,
            MorphemeClass::Inflection,
        ] {
            if self.of(class) > 0.0 && lexicon.inventory(class).is_none() {
                return Err(Error::InvalidArgument(format!(
                    "{class} activation is {} but the lexicon has no {class} entries",
                    self.of(class)
                )));
            }
        }
        Ok(())
    }
}

/// Presence pattern of the optional slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Template {
    pub has_prefix: bool,
    pub has_deriv: bool,
    pub has_infl: bool,
}

impl Template {
    /// Number of morphemes, root included.
    pub fn morpheme_count(&self) -> usize {
        1 + self.has_prefix as usize + self.has_deriv as usize + self.has_infl as usize
    }

    /// All eight patterns.
    pub fn all() -> impl Iterator<Item = Template> {
        (0..8u8).map(|bits| Template {
            has_prefix: bits & 1 != 0,
            has_deriv: bits & 2 != 0,
            has_infl: bits & 4 != 0,
        })
    }

    /// Probability of this pattern under independent activations.
    pub fn probability(&self, acts: &SlotActivations) -> f64 {
        let f = |on: bool, a: f64| if on { a } else { 1.0 - a };
        f(self.has_prefix, acts.prefix)
            * f(self.has_deriv, acts.deriv)
            * f(self.has_infl, acts.infl)
    }
}

/// Morpheme choice per slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Analysis {
    pub prefix: Option<usize>,
    pub root: usize,
    pub deriv: Option<usize>,
    pub infl: Option<usize>,
}

impl Analysis {
    pub fn template(&self) -> Template {
        Template {
            has_prefix: self.prefix.is_some(),
            has_deriv: self.deriv.is_some(),
            has_infl: self.infl.is_some(),
        }
    }

    fn slots(&self) -> [(MorphemeClass, Option<usize>); 4] {
        [
            (MorphemeClass::Prefix, self.prefix),
            (MorphemeClass::Root, Some(self.root)),
            (MorphemeClass::DerivSuffix, self.deriv),
            (MorphemeClass::Inflection, self.infl),
        ]
    }

    /// Checks every index against the lexicon.
    pub fn validate(&self, lexicon: &Lexicon) -> Result<()> {
        for (class, idx) in self.slots() {
            if let Some(i) = idx {
                let len = lexicon.inventory(class).map_or(0, MorphemeInventory::len);
                if i >= len {
                    return Err(Error::InvalidArgument(format!(
                        "{class} index {i} out of range for inventory of {len}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Word length in characters. Indices must be valid.
    pub fn length(&self, lexicon: &Lexicon) -> usize {
        self.slots()
            .iter()
            .filter_map(|&(class, idx)| {
                let i = idx?;
                Some(lexicon.inventory(class)?.items()[i].length())
            })
            .sum()
    }

    /// Concatenated surface. Indices must be valid.
    pub fn surface(&self, lexicon: &Lexicon) -> String {
        let mut out = String::new();
        for (class, idx) in self.slots() {
            if let (Some(i), Some(inv)) = (idx, lexicon.inventory(class)) {
                out.push_str(inv.items()[i].surface());
            }
        }
        out
    }

    pub fn to_word(&self, lexicon: &Lexicon) -> WordForm {
        WordForm::from_parts(*self, self.surface(lexicon))
    }

    /// Morphemes joined with `+`, for reports.
    pub fn gloss(&self, lexicon: &Lexicon) -> String {
        let mut out = String::new();
        for (class, idx) in self.slots() {
            if let (Some(i), Some(inv)) = (idx, lexicon.inventory(class)) {
                if !out.is_empty() {
                    out.push('+');
                }
                out.push_str(inv.items()[i].surface());
            }
        }
        out
    }
}

/// A generated word: its analysis, surface and character length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WordForm {
    analysis: Analysis,
    surface: String,
    length: usize,
}

impl WordForm {
    pub fn from_parts(analysis: Analysis, surface: String) -> WordForm {
        let length = surface.chars().count();
        WordForm {
            analysis,
            surface,
            length,
        }
    }

    pub fn analysis(&self) -> &Analysis {
        &self.analysis
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn length(&self) -> usize {
        self.length
    }
}

/// Independent Bernoulli draws for the three optional slots.
pub fn sample_template<R: Rng + ?Sized>(acts: &SlotActivations, rng: &mut R) -> Template {
    Template {
        has_prefix: rng.random::<f64>() < acts.prefix,
        has_deriv: rng.random::<f64>() < acts.deriv,
        has_infl: rng.random::<f64>() < acts.infl,
    }
}

/// Bound sampler over a lexicon, activations and constraint.
pub struct WordSampler<'a> {
    lexicon: &'a Lexicon,
    acts: SlotActivations,
    constraint: &'a dyn Constraint,
    free: bool,
    budget: u64,
}

impl<'a> WordSampler<'a> {
    pub fn new(
        lexicon: &'a Lexicon,
        acts: SlotActivations,
        constraint: &'a dyn Constraint,
    ) -> Result<WordSampler<'a>> {
        acts.check_against(lexicon)?;
        Ok(WordSampler {
            lexicon,
            acts,
            constraint,
            free: constraint.is_free(),
            budget: DEFAULT_REJECTION_BUDGET,
        })
    }

    pub fn with_rejection_budget(mut self, budget: u64) -> Self {
        self.budget = budget.max(1);
        self
    }

    #[inline]
    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Analysis {
        let t = sample_template(&self.acts, rng);
        let pick = |on: bool, inv: Option<&MorphemeInventory>, rng: &mut R| {
            if on {
                inv.map(|inv| inv.sample(rng))
            } else {
                None
            }
        };
        let prefix = pick(t.has_prefix, self.lexicon.prefixes(), rng);
        let root = self.lexicon.roots().sample(rng);
        let deriv = pick(t.has_deriv, self.lexicon.derivs(), rng);
        let infl = pick(t.has_infl, self.lexicon.infls(), rng);
        Analysis {
            prefix,
            root,
            deriv,
            infl,
        }
    }

    /// Draws template and morphemes, redrawing both until the constraint admits.
    pub fn sample_analysis<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Analysis> {
        if self.free {
            return Ok(self.draw(rng));
        }
        for _ in 0..self.budget {
            let a = self.draw(rng);
            if self.constraint.admits(&a) {
                return Ok(a);
            }
        }
        Err(Error::InfeasibleConstraint {
            attempts: self.budget,
        })
    }

    pub fn sample_word<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<WordForm> {
        Ok(self.sample_analysis(rng)?.to_word(self.lexicon))
    }
}

/// Samples one admissible word.
pub fn generate_word<R: Rng + ?Sized>(
    lexicon: &Lexicon,
    acts: &SlotActivations,
    constraint: &dyn Constraint,
    rng: &mut R,
) -> Result<WordForm> {
    WordSampler::new(lexicon, *acts, constraint)?.sample_word(rng)
}

fn slot_factor(present: Option<usize>, activation: f64, inv: Option<&MorphemeInventory>) -> f64 {
    match (present, inv) {
        (None, _) => 1.0 - activation,
        (Some(i), Some(inv)) => activation * inv.weights()[i],
        (Some(_), None) => 0.0,
    }
}

/// Unnormalized probability: the product of the three slot factors, the root
/// weight and the 0/1 constraint.
pub fn word_probability(
    lexicon: &Lexicon,
    acts: &SlotActivations,
    analysis: &Analysis,
    constraint: &dyn Constraint,
) -> Result<f64> {
    analysis.validate(lexicon)?;
    Ok(unnormalized(lexicon, acts, analysis, constraint))
}

fn unnormalized(
    lexicon: &Lexicon,
    acts: &SlotActivations,
    a: &Analysis,
    constraint: &dyn Constraint,
) -> f64 {
    if !constraint.admits(a) {
        return 0.0;
    }
    slot_factor(a.prefix, acts.prefix, lexicon.prefixes())
        * lexicon.roots().weights()[a.root]
        * slot_factor(a.deriv, acts.deriv, lexicon.derivs())
        * slot_factor(a.infl, acts.infl, lexicon.infls())
}

/// `(1+n_P)·n_R·(1+n_S)·(1+n_E)`: every presence pattern times every morpheme choice.
pub fn analysis_count(lexicon: &Lexicon) -> u128 {
    let [p, r, s, e] = lexicon.sizes().map(|n| n as u128);
    (1 + p) * r * (1 + s) * (1 + e)
}

fn each_analysis(lexicon: &Lexicon, mut f: impl FnMut(Analysis)) {
    let opt = |n: usize| std::iter::once(None).chain((0..n).map(Some));
    let [np, nr, ns, ne] = lexicon.sizes();
    for prefix in opt(np) {
        for root in 0..nr {
            for deriv in opt(ns) {
                for infl in opt(ne) {
                    f(Analysis {
                        prefix,
                        root,
                        deriv,
                        infl,
                    });
                }
            }
        }
    }
}

fn check_budget(lexicon: &Lexicon, budget: u64) -> Result<()> {
    let count = analysis_count(lexicon);
    if count > budget as u128 {
        return Err(Error::TooLarge { count, budget });
    }
    Ok(())
}

/// Σ P̃(W) over all combinations.
pub fn normalization_constant(
    lexicon: &Lexicon,
    acts: &SlotActivations,
    constraint: &dyn Constraint,
    budget: u64,
) -> Result<f64> {
    check_budget(lexicon, budget)?;
    let mut terms = Vec::new();
    each_analysis(lexicon, |a| {
        terms.push(unnormalized(lexicon, acts, &a, constraint))
    });
    Ok(neumaier_sum(terms))
}

/// Normalized word law, one entry per analysis with positive probability.
#[derive(Clone, Debug)]
pub struct WordDistribution {
    pub analyses: Vec<(WordForm, f64)>,
    /// The normalizing sum Σ P̃.
    pub normalizer: f64,
    /// Number of combinations visited, including inadmissible ones.
    pub enumerated: u128,
}

impl WordDistribution {
    /// Probabilities summed over analyses sharing a surface, keyed by surface.
    pub fn merged_by_surface(&self) -> BTreeMap<String, f64> {
        let mut out: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (w, p) in &self.analyses {
            out.entry(w.surface.clone()).or_default().push(*p);
        }
        out.into_iter()
            .map(|(s, ps)| (s, neumaier_sum(ps)))
            .collect()
    }

    pub fn total(&self) -> f64 {
        neumaier_sum(self.analyses.iter().map(|(_, p)| *p))
    }
}

/// Enumerates every combination, drops those with zero unnormalized mass, and
/// normalizes the rest.
pub fn exact_word_distribution(
    lexicon: &Lexicon,
    acts: &SlotActivations,
    constraint: &dyn Constraint,
    budget: u64,
) -> Result<WordDistribution> {
    acts.check_against(lexicon)?;
    check_budget(lexicon, budget)?;
    let mut weighted = Vec::new();
    each_analysis(lexicon, |a| {
        let p = unnormalized(lexicon, acts, &a, constraint);
        if p > 0.0 {
            weighted.push((a, p));
        }
    });
    let normalizer = neumaier_sum(weighted.iter().map(|(_, p)| *p));
    if normalizer <= 0.0 {
        return Err(Error::InfeasibleConstraint {
            attempts: analysis_count(lexicon) as u64,
        });
    }
    let analyses = weighted
        .into_iter()
        .map(|(a, p)| (a.to_word(lexicon), p / normalizer))
        .collect();
    Ok(WordDistribution {
        analyses,
        normalizer,
        enumerated: analysis_count(lexicon),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusOptions {
    pub n_tokens: u64,
    pub seed: u64,
    /// Worker threads; the result does not depend on this.
    pub threads: usize,
}

/// Surviving token counts by surface.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusCounts {
    pub counts: HashMap<String, u64>,
    /// Candidate words generated.
    pub generated: u64,
    /// Tokens that passed the filter.
    pub surviving: u64,
}

impl CorpusCounts {
    pub fn types(&self) -> usize {
        self.counts.len()
    }

    /// Counts ordered by count descending, then surface ascending.
    pub fn sorted(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(s, &c)| (s.as_str(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// `surface<TAB>count` table with a header line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("surface\tcount\n");
        for (s, c) in self.sorted() {
            let _ = writeln!(out, "{s}\t{c}");
        }
        out
    }
}

fn generate_shard(
    sampler: &WordSampler<'_>,
    filter: &SurvivalSpec,
    seed: u64,
    shard: u64,
    tokens: u64,
) -> Result<HashMap<Analysis, u64>> {
    let mut rng = generation_rng(seed, shard);
    let mut frng = filter_rng(seed, shard);
    let per_token = filter.mode == FilterMode::PerToken && !filter.is_identity();
    let mut counts: HashMap<Analysis, u64> = HashMap::new();
    for _ in 0..tokens {
        let a = sampler.sample_analysis(&mut rng)?;
        if per_token && !filter.survives_token(a.length(sampler.lexicon), &mut frng) {
            continue;
        }
        *counts.entry(a).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Generates `n_tokens` candidate words, applies the filter, and counts
/// survivors by surface.
///
/// Tokens are split into fixed-size shards; shard `i` draws from the stream
/// seeded with `seed ^ i`, so the counts are identical for every thread count.
pub fn generate_corpus(
    lexicon: &Lexicon,
    acts: &SlotActivations,
    constraint: &dyn Constraint,
    filter: &SurvivalSpec,
    opts: CorpusOptions,
) -> Result<CorpusCounts> {
    if opts.n_tokens == 0 {
        return Err(Error::InvalidArgument("n_tokens must be at least 1".into()));
    }
    let sampler = WordSampler::new(lexicon, *acts, constraint)?;
    let shards = opts.n_tokens.div_ceil(SHARD_TOKENS);
    let shard_len = |i: u64| SHARD_TOKENS.min(opts.n_tokens - i * SHARD_TOKENS);
    let run = |i: u64| generate_shard(&sampler, filter, opts.seed, i, shard_len(i));

    let per_shard: Vec<Result<HashMap<Analysis, u64>>> = if opts.threads <= 1 || shards == 1 {
        (0..shards).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| (0..shards).into_par_iter().map(run).collect())
    };

    let mut by_analysis: HashMap<Analysis, u64> = HashMap::new();
    for shard in per_shard {
        for (a, c) in shard? {
            *by_analysis.entry(a).or_insert(0) += c;
        }
    }

    let per_type = filter.mode == FilterMode::PerType && !filter.is_identity();
    let mut counts: HashMap<String, u64> = HashMap::with_capacity(by_analysis.len());
    let mut surviving = 0;
    for (a, c) in by_analysis {
        let surface = a.surface(lexicon);
        if per_type && !filter.survives_type(opts.seed, &surface, a.length(lexicon)) {
            continue;
        }
        surviving += c;
        *counts.entry(surface).or_insert(0) += c;
    }
    Ok(CorpusCounts {
        counts,
        generated: opts.n_tokens,
        surviving,
    })
}
