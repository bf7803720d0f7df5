//! Word-length distributions: the morpheme-count law, compound length pmf and
//! moments, the geometric letter-typing baseline, and empirical histograms.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::generator::{SlotActivations, Template, WordDistribution};
use crate::lexicon::{neumaier_sum, Lexicon, MorphemeClass, MorphemeInventory};

/// Probability mass function over the contiguous support `[min, min + probs.len())`.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthPmf {
    min: usize,
    probs: Vec<f64>,
}

impl LengthPmf {
    /// Builds a pmf from `(length, probability)` pairs; gaps inside the range get zero mass.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, f64)>) -> LengthPmf {
        let map: BTreeMap<usize, f64> = pairs.into_iter().fold(BTreeMap::new(), |mut m, (k, p)| {
            *m.entry(k).or_insert(0.0) += p;
            m
        });
        let (Some(&min), Some(&max)) = (map.keys().next(), map.keys().next_back()) else {
            return LengthPmf {
                min: 0,
                probs: Vec::new(),
            };
        };
        let mut probs = vec![0.0; max - min + 1];
        for (k, p) in map {
            probs[k - min] = p;
        }
        LengthPmf { min, probs }.trimmed()
    }

    fn point(k: usize) -> LengthPmf {
        LengthPmf {
            min: k,
            probs: vec![1.0],
        }
    }

    /// Drops zero-mass lengths at either end.
    fn trimmed(mut self) -> LengthPmf {
        while self.probs.last() == Some(&0.0) {
            self.probs.pop();
        }
        let lead = self.probs.iter().take_while(|&&p| p == 0.0).count();
        if lead > 0 {
            self.probs.drain(..lead);
            self.min += lead;
        }
        self
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Smallest length with positive mass.
    pub fn min(&self) -> usize {
        self.min
    }

    /// Largest length with positive mass.
    pub fn max(&self) -> usize {
        self.min + self.probs.len().saturating_sub(1)
    }

    pub fn prob(&self, k: usize) -> f64 {
        k.checked_sub(self.min)
            .and_then(|i| self.probs.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.min + i, p))
    }

    pub fn total(&self) -> f64 {
        neumaier_sum(self.probs.iter().copied())
    }

    pub fn mean(&self) -> f64 {
        neumaier_sum(self.iter().map(|(k, p)| k as f64 * p))
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        neumaier_sum(self.iter().map(|(k, p)| (k as f64 - m).powi(2) * p))
    }

    /// Most probable length; the smallest one on ties.
    pub fn mode(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (k, p) in self.iter() {
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((k, p));
            }
        }
        best.map(|(k, _)| k)
    }

    /// True when the mass rises weakly to a single peak and then falls weakly.
    pub fn is_unimodal(&self) -> bool {
        let mut falling = false;
        for w in self.probs.windows(2) {
            if w[1] > w[0] {
                if falling {
                    return false;
                }
            } else if w[1] < w[0] {
                falling = true;
            }
        }
        true
    }

    /// Probability of `length >= k`.
    pub fn tail(&self, k: usize) -> f64 {
        neumaier_sum(self.iter().filter(|&(l, _)| l >= k).map(|(_, p)| p))
    }

    /// Distribution of the sum of independent lengths.
    pub fn convolve(&self, other: &LengthPmf) -> LengthPmf {
        if self.is_empty() || other.is_empty() {
            return LengthPmf {
                min: 0,
                probs: Vec::new(),
            };
        }
        let mut probs = vec![0.0; self.probs.len() + other.probs.len() - 1];
        for (i, &a) in self.probs.iter().enumerate() {
            for (j, &b) in other.probs.iter().enumerate() {
                probs[i + j] += a * b;
            }
        }
        LengthPmf {
            min: self.min + other.min,
            probs,
        }
    }

    /// `weight·self + (1 − weight)·δ₀`, the length added by an optional slot.
    fn with_absence(&self, weight: f64) -> LengthPmf {
        let mut pairs: Vec<(usize, f64)> = self.iter().map(|(k, p)| (k, weight * p)).collect();
        pairs.push((0, 1.0 - weight));
        LengthPmf::from_pairs(pairs)
    }

    /// Half the L1 distance, over the union of both supports.
    pub fn total_variation(&self, other: &LengthPmf) -> f64 {
        if self.is_empty() && other.is_empty() {
            return 0.0;
        }
        let lo = self.min.min(other.min);
        let hi = self.max().max(other.max());
        0.5 * neumaier_sum((lo..=hi).map(|k| (self.prob(k) - other.prob(k)).abs()))
    }

    /// `length<TAB>probability` table.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("length\tprobability\n");
        for (k, p) in self.iter() {
            let _ = writeln!(out, "{k}\t{p:.12}");
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Law of N = 1 + I_P + I_S + I_E, indexed so that `result[n - 1] = P(N = n)`.
pub fn n_morpheme_distribution(acts: &SlotActivations) -> [f64; 4] {
    let (p, s, e) = (acts.prefix(), acts.deriv(), acts.infl());
    let (np, ns, ne) = (1.0 - p, 1.0 - s, 1.0 - e);
    [
        np * ns * ne,
        p * ns * ne + np * s * ne + np * ns * e,
        p * s * ne + p * ns * e + np * s * e,
        p * s * e,
    ]
}

/// E[N] = 1 + a_P + a_S + a_E and Var(N) = Σ a(1 − a).
pub fn n_morpheme_moments(acts: &SlotActivations) -> LengthMoments {
    let a = [acts.prefix(), acts.deriv(), acts.infl()];
    LengthMoments {
        mean: 1.0 + a.iter().sum::<f64>(),
        variance: a.iter().map(|x| x * (1.0 - x)).sum(),
    }
}

/// Length law of one class: mass of length k is the weight of items with length k.
pub fn class_length_pmf(inventory: &MorphemeInventory) -> LengthPmf {
    LengthPmf::from_pairs(
        inventory
            .items()
            .iter()
            .zip(inventory.weights())
            .map(|(m, &w)| (m.length(), w)),
    )
}

fn optional_class_pmf(lexicon: &Lexicon, class: MorphemeClass) -> LengthPmf {
    lexicon
        .inventory(class)
        .map(class_length_pmf)
        .unwrap_or_else(|| LengthPmf::point(0))
}

/// Exact pmf of L for the free generator (C ≡ 1), mixing the eight presence
/// patterns and convolving the active classes' length laws.
pub fn exact_length_pmf(lexicon: &Lexicon, acts: &SlotActivations) -> Result<LengthPmf> {
    acts.check_against(lexicon)?;
    let root = class_length_pmf(lexicon.roots());
    let prefix = optional_class_pmf(lexicon, MorphemeClass::Prefix);
    let deriv = optional_class_pmf(lexicon, MorphemeClass::DerivSuffix);
    let infl = optional_class_pmf(lexicon, MorphemeClass::Inflection);

    let mut mixture: Vec<(usize, f64)> = Vec::new();
    for t in Template::all() {
        let w = t.probability(acts);
        if w == 0.0 {
            continue;
        }
        let mut pmf = root.clone();
        for (on, class_pmf) in [
            (t.has_prefix, &prefix),
            (t.has_deriv, &deriv),
            (t.has_infl, &infl),
        ] {
            if on {
                pmf = pmf.convolve(class_pmf);
            }
        }
        mixture.extend(pmf.iter().map(|(k, p)| (k, w * p)));
    }
    Ok(LengthPmf::from_pairs(mixture))
}

/// Same law built by folding each optional slot as `a·pmf + (1 − a)·δ₀`.
/// Used as an independent route in tests and the CLI self-check.
pub fn exact_length_pmf_by_slots(lexicon: &Lexicon, acts: &SlotActivations) -> Result<LengthPmf> {
    acts.check_against(lexicon)?;
    let mut pmf = class_length_pmf(lexicon.roots());
    for class in [
        MorphemeClass::Prefix,
        MorphemeClass::DerivSuffix,
        MorphemeClass::Inflection,
    ] {
        let slot = optional_class_pmf(lexicon, class).with_absence(acts.of(class));
        pmf = pmf.convolve(&slot);
    }
    Ok(pmf.trimmed())
}

/// Length law under an arbitrary constraint, read off an enumerated word distribution.
pub fn length_pmf_from_distribution(dist: &WordDistribution) -> LengthPmf {
    LengthPmf::from_pairs(dist.analyses.iter().map(|(w, p)| (w.length(), *p)))
}

fn class_moments(lexicon: &Lexicon, class: MorphemeClass) -> (f64, f64) {
    match lexicon.inventory(class) {
        Some(inv) => {
            let pmf = class_length_pmf(inv);
            (pmf.mean(), pmf.variance())
        }
        None => (0.0, 0.0),
    }
}

/// Closed-form E[L] and Var(L) for the free generator.
pub fn length_moments(lexicon: &Lexicon, acts: &SlotActivations) -> Result<LengthMoments> {
    acts.check_against(lexicon)?;
    let (mu_r, var_r) = class_moments(lexicon, MorphemeClass::Root);
    let mut mean = mu_r;
    let mut variance = var_r;
    for class in [
        MorphemeClass::Prefix,
        MorphemeClass::DerivSuffix,
        MorphemeClass::Inflection,
    ] {
        let a = acts.of(class);
        let (mu, var) = class_moments(lexicon, class);
        mean += a * mu;
        variance += a * (1.0 - a) * mu * mu + a * var;
    }
    Ok(LengthMoments { mean, variance })
}

/// Letter-typing baseline `P(L = k) ∝ (1 − q)^k q` on `k = 1..=max_len`, renormalized.
pub fn geometric_length_pmf(q: f64, max_len: usize) -> Result<LengthPmf> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "q must lie in (0, 1], got {q}"
        )));
    }
    if max_len == 0 {
        return Err(Error::InvalidArgument("max_len must be at least 1".into()));
    }
    if q == 1.0 {
        return Ok(LengthPmf::point(1));
    }
    let raw: Vec<f64> = (1..=max_len)
        .map(|k| (1.0 - q).powi(k as i32) * q)
        .collect();
    let total = neumaier_sum(raw.iter().copied());
    Ok(LengthPmf {
        min: 1,
        probs: raw.into_iter().map(|p| p / total).collect(),
    }
    .trimmed())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthRow {
    pub length: usize,
    pub count: u64,
    pub share_percent: f64,
}

/// Token counts per word length.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LengthTable {
    pub rows: Vec<LengthRow>,
    pub total: u64,
}

impl LengthTable {
    fn from_length_counts(counts: BTreeMap<usize, u64>) -> LengthTable {
        let total: u64 = counts.values().sum();
        let rows = counts
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(length, count)| LengthRow {
                length,
                count,
                share_percent: 100.0 * count as f64 / total as f64,
            })
            .collect();
        LengthTable { rows, total }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn count(&self, length: usize) -> u64 {
        self.rows
            .iter()
            .find(|r| r.length == length)
            .map_or(0, |r| r.count)
    }

    pub fn share(&self, length: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(length) as f64 / self.total as f64
        }
    }

    /// Normalized counts as a pmf.
    pub fn to_pmf(&self) -> LengthPmf {
        LengthPmf::from_pairs(
            self.rows
                .iter()
                .map(|r| (r.length, r.count as f64 / self.total as f64)),
        )
    }

    pub fn mode(&self) -> Option<usize> {
        self.to_pmf().mode()
    }

    /// `length<TAB>count<TAB>share_percent`, shares to two decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("length\tcount\tshare_percent\n");
        for r in &self.rows {
            let _ = writeln!(out, "{}\t{}\t{:.2}", r.length, r.count, r.share_percent);
        }
        out
    }

    /// Reads the table written by [`LengthTable::to_tsv`]; shares are recomputed.
    pub fn parse_tsv(text: &str, source: &str) -> Result<LengthTable> {
        let mut counts = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 || line.trim().is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: source.to_string(),
                line: i + 1,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            }
            let length: usize = fields[0]
                .parse()
                .map_err(|_| err(format!("bad length {:?}", fields[0])))?;
            let count: u64 = fields[1]
                .parse()
                .map_err(|_| err(format!("bad count {:?}", fields[1])))?;
            *counts.entry(length).or_insert(0) += count;
        }
        Ok(LengthTable::from_length_counts(counts))
    }
}

/// Histogram of token lengths from `(surface, count)` pairs.
pub fn empirical_length_hist<'a>(types: impl IntoIterator<Item = (&'a str, u64)>) -> LengthTable {
    let mut counts = BTreeMap::new();
    for (surface, c) in types {
        *counts.entry(surface.chars().count()).or_insert(0) += c;
    }
    LengthTable::from_length_counts(counts)
}

/// Histogram of a token stream.
pub fn token_length_hist<'a>(tokens: impl IntoIterator<Item = &'a str>) -> LengthTable {
    empirical_length_hist(tokens.into_iter().map(|t| (t, 1)))
}
