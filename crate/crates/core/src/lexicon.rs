//! Morpheme inventories: construction, synthesis, and the tab-separated
//! lexicon file format.
//!
//! A lexicon holds one inventory per morphological class. The root class is
//! mandatory; the three optional classes may be absent when loaded from a file,
//! in which case their slot activation must be zero.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::alias::AliasTable;
use crate::error::{Error, Result};

/// Tolerance on Σπ = 1 for in-memory inventories.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Tolerance on the raw per-class weight sum read from a lexicon file in strict mode.
pub const FILE_WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MorphemeClass {
    Prefix,
    Root,
    DerivSuffix,
    Inflection,
}

impl MorphemeClass {
    /// Canonical slot order within a word.
    pub const ALL: [MorphemeClass; 4] = [
        MorphemeClass::Prefix,
        MorphemeClass::Root,
        MorphemeClass::DerivSuffix,
        MorphemeClass::Inflection,
    ];

    /// One-letter code used in lexicon files.
    pub fn code(self) -> char {
        match self {
            MorphemeClass::Prefix => 'P',
            MorphemeClass::Root => 'R',
            MorphemeClass::DerivSuffix => 'S',
            MorphemeClass::Inflection => 'E',
        }
    }

    pub fn from_code(code: &str) -> Option<MorphemeClass> {
        match code {
            "P" => Some(MorphemeClass::Prefix),
            "R" => Some(MorphemeClass::Root),
            "S" => Some(MorphemeClass::DerivSuffix),
            "E" => Some(MorphemeClass::Inflection),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MorphemeClass::Prefix => "prefix",
            MorphemeClass::Root => "root",
            MorphemeClass::DerivSuffix => "deriv",
            MorphemeClass::Inflection => "infl",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MorphemeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morpheme {
    surface: String,
    length: usize,
    class: MorphemeClass,
}

impl Morpheme {
    pub fn new(class: MorphemeClass, surface: impl Into<String>) -> Result<Morpheme> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(Error::InvalidInventory(format!("empty {class} surface")));
        }
        let length = surface.chars().count();
        Ok(Morpheme {
            surface,
            length,
            class,
        })
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    /// Length in characters.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn class(&self) -> MorphemeClass {
        self.class
    }
}

/// Inclusive character-length range declared for a class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LengthBounds {
    pub min: usize,
    pub max: usize,
}

/// One morphological class with its categorical selection weights.
#[derive(Clone, Debug)]
pub struct MorphemeInventory {
    class: MorphemeClass,
    items: Vec<Morpheme>,
    weights: Vec<f64>,
    sampler: AliasTable,
}

impl PartialEq for MorphemeInventory {
    fn eq(&self, other: &Self) -> bool {
        self.class == other.class && self.items == other.items && self.weights == other.weights
    }
}

impl MorphemeInventory {
    /// Validates and builds an inventory. Weights must already be normalized.
    pub fn new(
        class: MorphemeClass,
        surfaces: Vec<String>,
        weights: Vec<f64>,
    ) -> Result<MorphemeInventory> {
        if surfaces.is_empty() {
            return Err(Error::InvalidInventory(format!(
                "{class} inventory is empty"
            )));
        }
        if surfaces.len() != weights.len() {
            return Err(Error::InvalidInventory(format!(
                "{class} inventory has {} surfaces but {} weights",
                surfaces.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInventory(format!(
                "{class} weight {w} is not strictly positive"
            )));
        }
        let sum = neumaier_sum(weights.iter().copied());
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::WeightSum {
                class: class.name(),
                sum,
            });
        }
        let mut seen = HashSet::with_capacity(surfaces.len());
        let mut items = Vec::with_capacity(surfaces.len());
        for surface in surfaces {
            if !seen.insert(surface.clone()) {
                return Err(Error::DuplicateSurface {
                    class: class.name(),
                    surface,
                });
            }
            items.push(Morpheme::new(class, surface)?);
        }
        let sampler = AliasTable::new(&weights);
        Ok(MorphemeInventory {
            class,
            items,
            weights,
            sampler,
        })
    }

    /// Checks every item length against `bounds`.
    pub fn check_bounds(&self, bounds: LengthBounds) -> Result<()> {
        match self
            .items
            .iter()
            .find(|m| m.length < bounds.min || m.length > bounds.max)
        {
            Some(m) => Err(Error::InvalidInventory(format!(
                "{} {:?} has length {} outside [{}, {}]",
                self.class, m.surface, m.length, bounds.min, bounds.max
            ))),
            None => Ok(()),
        }
    }

    pub fn class(&self) -> MorphemeClass {
        self.class
    }

    pub fn items(&self) -> &[Morpheme] {
        &self.items
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&Morpheme> {
        self.items.get(index)
    }

    /// Smallest and largest item length.
    pub fn length_range(&self) -> LengthBounds {
        let min = self.items.iter().map(Morpheme::length).min().unwrap_or(0);
        let max = self.items.iter().map(Morpheme::length).max().unwrap_or(0);
        LengthBounds { min, max }
    }

    /// Draws an item index from the categorical weights.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng)
    }
}

/// The four class inventories. Only the root class is required.
#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    inventories: [Option<MorphemeInventory>; 4],
}

impl Lexicon {
    pub fn new(
        prefixes: Option<MorphemeInventory>,
        roots: MorphemeInventory,
        derivs: Option<MorphemeInventory>,
        infls: Option<MorphemeInventory>,
    ) -> Result<Lexicon> {
        let inventories = [prefixes, Some(roots), derivs, infls];
        for (class, inv) in MorphemeClass::ALL.iter().zip(&inventories) {
            if let Some(inv) = inv {
                if inv.class() != *class {
                    return Err(Error::InvalidInventory(format!(
                        "{} inventory placed in the {class} slot",
                        inv.class()
                    )));
                }
            }
        }
        Ok(Lexicon { inventories })
    }

    pub fn inventory(&self, class: MorphemeClass) -> Option<&MorphemeInventory> {
        self.inventories[class.index()].as_ref()
    }

    pub fn prefixes(&self) -> Option<&MorphemeInventory> {
        self.inventory(MorphemeClass::Prefix)
    }

    pub fn roots(&self) -> &MorphemeInventory {
        self.inventories[MorphemeClass::Root.index()]
            .as_ref()
            .expect("root inventory is mandatory")
    }

    pub fn derivs(&self) -> Option<&MorphemeInventory> {
        self.inventory(MorphemeClass::DerivSuffix)
    }

    pub fn infls(&self) -> Option<&MorphemeInventory> {
        self.inventory(MorphemeClass::Inflection)
    }

    /// Item count per class in slot order, zero for absent classes.
    pub fn sizes(&self) -> [usize; 4] {
        let mut out = [0; 4];
        for (slot, inv) in out.iter_mut().zip(&self.inventories) {
            *slot = inv.as_ref().map_or(0, MorphemeInventory::len);
        }
        out
    }

    pub fn total_morphemes(&self) -> usize {
        self.sizes().iter().sum()
    }

    /// Renders the lexicon in the tab-separated file format.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("# class\tsurface\tweight\n");
        for inv in self.inventories.iter().flatten() {
            for (m, w) in inv.items().iter().zip(inv.weights()) {
                // `{}` on f64 prints the shortest representation that round-trips.
                let _ = writeln!(out, "{}\t{}\t{}", inv.class().code(), m.surface(), w);
            }
        }
        out
    }
}

/// Per-class synthesis parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassConfig {
    pub count: usize,
    /// Within-class Zipf exponent for the selection weights.
    pub skew: f64,
    pub length_min: usize,
    pub length_max: usize,
}

impl ClassConfig {
    pub fn bounds(&self) -> LengthBounds {
        LengthBounds {
            min: self.length_min,
            max: self.length_max,
        }
    }

    fn validate(&self, class: MorphemeClass) -> Result<()> {
        if self.count == 0 {
            return Err(Error::InvalidArgument(format!(
                "{class}.count must be at least 1"
            )));
        }
        if !(self.skew.is_finite() && self.skew >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{class}.skew must be a nonnegative number, got {}",
                self.skew
            )));
        }
        if self.length_min == 0 {
            return Err(Error::InvalidArgument(format!(
                "{class}.length_min must be at least 1"
            )));
        }
        if self.length_min > self.length_max {
            return Err(Error::InvalidArgument(format!(
                "{class}.length_min ({}) exceeds {class}.length_max ({})",
                self.length_min, self.length_max
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticLexiconConfig {
    pub prefix: ClassConfig,
    pub root: ClassConfig,
    pub deriv: ClassConfig,
    pub infl: ClassConfig,
}

impl SyntheticLexiconConfig {
    /// 20 prefixes (2–4 letters), 500 roots (3–8), 80 derivational suffixes
    /// (2–5) and 15 inflections (1–3). Roots and suffixes use skew 1.2, the
    /// other classes 1.0.
    pub fn paper() -> SyntheticLexiconConfig {
        SyntheticLexiconConfig {
            prefix: ClassConfig {
                count: 20,
                skew: 1.0,
                length_min: 2,
                length_max: 4,
            },
            root: ClassConfig {
                count: 500,
                skew: 1.2,
                length_min: 3,
                length_max: 8,
            },
            deriv: ClassConfig {
                count: 80,
                skew: 1.2,
                length_min: 2,
                length_max: 5,
            },
            infl: ClassConfig {
                count: 15,
                skew: 1.0,
                length_min: 1,
                length_max: 3,
            },
        }
    }

    pub fn class(&self, class: MorphemeClass) -> &ClassConfig {
        match class {
            MorphemeClass::Prefix => &self.prefix,
            MorphemeClass::Root => &self.root,
            MorphemeClass::DerivSuffix => &self.deriv,
            MorphemeClass::Inflection => &self.infl,
        }
    }

    pub fn class_mut(&mut self, class: MorphemeClass) -> &mut ClassConfig {
        match class {
            MorphemeClass::Prefix => &mut self.prefix,
            MorphemeClass::Root => &mut self.root,
            MorphemeClass::DerivSuffix => &mut self.deriv,
            MorphemeClass::Inflection => &mut self.infl,
        }
    }

    pub fn validate(&self) -> Result<()> {
        MorphemeClass::ALL
            .iter()
            .try_for_each(|&c| self.class(c).validate(c))
    }
}

impl Default for SyntheticLexiconConfig {
    fn default() -> Self {
        SyntheticLexiconConfig::paper()
    }
}

/// Normalized Zipf weights `w_i = i^{-s} / Σ_j j^{-s}` for `i = 1..=n`.
pub fn build_zipf_weights(n: usize, s: f64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("zipf weights need n >= 1".into()));
    }
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "zipf exponent must be nonnegative, got {s}"
        )));
    }
    let raw: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-s)).collect();
    let total = neumaier_sum(raw.iter().copied());
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Number of distinct lowercase strings with length in `bounds`, saturating.
fn surface_capacity(bounds: LengthBounds) -> u128 {
    (bounds.min..=bounds.max)
        .map(|len| 26u128.checked_pow(len as u32).unwrap_or(u128::MAX))
        .fold(0u128, u128::saturating_add)
}

/// Discretized truncated normal over `[min, max]`: the continuous normal with
/// mean `(min+max)/2` and sd `max((max-min)/4, 0.5)` is truncated to
/// `[min, max+1)` and floored.
pub fn sample_length<R: Rng + ?Sized>(bounds: LengthBounds, rng: &mut R) -> usize {
    let mean = (bounds.min + bounds.max) as f64 / 2.0;
    let sd = ((bounds.max - bounds.min) as f64 / 4.0).max(0.5);
    let normal = Normal::new(mean, sd).expect("finite positive sd");
    let lo = bounds.min as f64;
    let hi = (bounds.max + 1) as f64;
    loop {
        let x = normal.sample(rng);
        if x >= lo && x < hi {
            return (x.floor() as usize).clamp(bounds.min, bounds.max);
        }
    }
}

fn random_surface<R: Rng + ?Sized>(len: usize, rng: &mut R) -> String {
    (0..len)
        .map(|_| char::from(b'a' + rng.random_range(0..26u8)))
        .collect()
}

fn synth_inventory<R: Rng + ?Sized>(
    class: MorphemeClass,
    cfg: &ClassConfig,
    rng: &mut R,
) -> Result<MorphemeInventory> {
    let bounds = cfg.bounds();
    let capacity = surface_capacity(bounds);
    if (cfg.count as u128) > capacity {
        return Err(Error::Construction(format!(
            "{class}: {} distinct surfaces requested but only {capacity} exist at lengths {}..={}",
            cfg.count, bounds.min, bounds.max
        )));
    }
    let max_attempts = 1_000_000u64.saturating_add(1000 * cfg.count as u64);
    let mut seen = HashSet::with_capacity(cfg.count);
    let mut surfaces = Vec::with_capacity(cfg.count);
    let mut attempts = 0u64;
    while surfaces.len() < cfg.count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Construction(format!(
                "{class}: alphabet exhausted after {max_attempts} draws with {} of {} surfaces",
                surfaces.len(),
                cfg.count
            )));
        }
        let len = sample_length(bounds, rng);
        let surface = random_surface(len, rng);
        if seen.insert(surface.clone()) {
            surfaces.push(surface);
        }
    }
    let weights = build_zipf_weights(cfg.count, cfg.skew)?;
    let inv = MorphemeInventory::new(class, surfaces, weights)?;
    inv.check_bounds(bounds)?;
    Ok(inv)
}

/// Builds a random lexicon. Deterministic in the state of `rng`.
pub fn synth_lexicon<R: Rng + ?Sized>(
    config: &SyntheticLexiconConfig,
    rng: &mut R,
) -> Result<Lexicon> {
    config.validate()?;
    let prefixes = synth_inventory(MorphemeClass::Prefix, &config.prefix, rng)?;
    let roots = synth_inventory(MorphemeClass::Root, &config.root, rng)?;
    let derivs = synth_inventory(MorphemeClass::DerivSuffix, &config.deriv, rng)?;
    let infls = synth_inventory(MorphemeClass::Inflection, &config.infl, rng)?;
    Lexicon::new(Some(prefixes), roots, Some(derivs), Some(infls))
}

/// What happened to each class's weights while loading.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadReport {
    /// `(class, item count, raw weight sum, renormalized)` per present class.
    pub classes: Vec<(MorphemeClass, usize, f64, bool)>,
}

impl fmt::Display for LoadReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (class, n, sum, renorm) in &self.classes {
            writeln!(
                f,
                "{class}: {n} items, raw weight sum {sum}{}",
                if *renorm { " (renormalized)" } else { "" }
            )?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LoadOptions {
    /// Accept any positive per-class weight sum and rescale it to one.
    /// When false, sums must already be within [`FILE_WEIGHT_SUM_TOLERANCE`] of one.
    pub normalize: bool,
}

/// Parses lexicon text. `source` labels parse errors.
pub fn parse_lexicon(text: &str, source: &str, opts: LoadOptions) -> Result<(Lexicon, LoadReport)> {
    let mut surfaces: [Vec<String>; 4] = Default::default();
    let mut weights: [Vec<f64>; 4] = Default::default();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: source.to_string(),
        line,
        message,
    };

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(
                lineno,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let class = MorphemeClass::from_code(fields[0]).ok_or_else(|| {
            parse_err(
                lineno,
                format!("unknown class {:?} (expected P, R, S or E)", fields[0]),
            )
        })?;
        let surface = fields[1];
        if surface.is_empty() {
            return Err(parse_err(lineno, "empty surface".into()));
        }
        let weight: f64 = fields[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno, format!("weight {:?} is not a number", fields[2])))?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(parse_err(
                lineno,
                format!("weight {weight} is not strictly positive"),
            ));
        }
        if surfaces[class.index()].iter().any(|s| s == surface) {
            return Err(Error::DuplicateSurface {
                class: class.name(),
                surface: surface.to_string(),
            });
        }
        surfaces[class.index()].push(surface.to_string());
        weights[class.index()].push(weight);
    }

    let mut report = LoadReport::default();
    let mut inventories: [Option<MorphemeInventory>; 4] = Default::default();
    for class in MorphemeClass::ALL {
        let idx = class.index();
        if surfaces[idx].is_empty() {
            continue;
        }
        let sum = neumaier_sum(weights[idx].iter().copied());
        if !opts.normalize && (sum - 1.0).abs() > FILE_WEIGHT_SUM_TOLERANCE {
            return Err(Error::WeightSum {
                class: class.name(),
                sum,
            });
        }
        let renormalize = (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE;
        let w: Vec<f64> = if renormalize {
            weights[idx].iter().map(|w| w / sum).collect()
        } else {
            std::mem::take(&mut weights[idx])
        };
        report
            .classes
            .push((class, surfaces[idx].len(), sum, renormalize));
        inventories[idx] = Some(MorphemeInventory::new(
            class,
            std::mem::take(&mut surfaces[idx]),
            w,
        )?);
    }

    let [p, r, s, e] = inventories;
    let roots = r.ok_or_else(|| {
        Error::InvalidInventory(format!("{source}: lexicon has no root (R) entries"))
    })?;
    Ok((Lexicon::new(p, roots, s, e)?, report))
}

pub fn load_lexicon(path: impl AsRef<Path>, opts: LoadOptions) -> Result<(Lexicon, LoadReport)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&text, &path.display().to_string(), opts)
}

pub fn save_lexicon(lexicon: &Lexicon, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, lexicon.to_tsv()).map_err(|e| Error::io(path, e))
}

/// Compensated (Neumaier) summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::lexicon_rng;
    use proptest::prelude::*;

    fn singleton_config(len: usize) -> ClassConfig {
        ClassConfig {
            count: 1,
            skew: 1.0,
            length_min: len,
            length_max: len,
        }
    }

    #[test]
    fn zipf_weights_examples() {
        assert_eq!(build_zipf_weights(1, 1.2).unwrap(), vec![1.0]);
        let uniform = build_zipf_weights(3, 0.0).unwrap();
        assert!(uniform.iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-15));
        let two = build_zipf_weights(2, 1.0).unwrap();
        assert!((two[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((two[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn zipf_weights_reject_empty() {
        assert!(matches!(
            build_zipf_weights(0, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #[test]
        fn zipf_weights_normalized_and_monotone(n in 1usize..3000, s in 0.0f64..4.0) {
            let w = build_zipf_weights(n, s).unwrap();
            prop_assert!((neumaier_sum(w.iter().copied()) - 1.0).abs() < 1e-12);
            prop_assert!(w.iter().all(|&x| x > 0.0));
            prop_assert!(w.windows(2).all(|p| p[1] <= p[0]));
        }

        #[test]
        fn sampled_lengths_stay_in_bounds(min in 1usize..10, span in 0usize..10, seed in any::<u64>()) {
            let bounds = LengthBounds { min, max: min + span };
            let mut rng = lexicon_rng(seed);
            for _ in 0..200 {
                let l = sample_length(bounds, &mut rng);
                prop_assert!(l >= bounds.min && l <= bounds.max);
            }
        }
    }

    #[test]
    fn singleton_synthesis() {
        let cfg = SyntheticLexiconConfig {
            prefix: singleton_config(3),
            root: singleton_config(3),
            deriv: singleton_config(3),
            infl: singleton_config(3),
        };
        let lex = synth_lexicon(&cfg, &mut lexicon_rng(5)).unwrap();
        assert_eq!(lex.roots().len(), 1);
        assert_eq!(lex.roots().items()[0].length(), 3);
        assert_eq!(lex.roots().weights(), &[1.0]);
    }

    #[test]
    fn paper_synthesis_sizes_and_bounds() {
        let cfg = SyntheticLexiconConfig::paper();
        let lex = synth_lexicon(&cfg, &mut lexicon_rng(1)).unwrap();
        assert_eq!(lex.sizes(), [20, 500, 80, 15]);
        assert_eq!(lex.total_morphemes(), 615);
        for class in MorphemeClass::ALL {
            let inv = lex.inventory(class).unwrap();
            inv.check_bounds(cfg.class(class).bounds()).unwrap();
            let distinct: HashSet<_> = inv.items().iter().map(Morpheme::surface).collect();
            assert_eq!(distinct.len(), inv.len());
        }
        let roots = lex.roots().length_range();
        assert!(roots.min >= 3 && roots.max <= 8);
    }

    #[test]
    fn synthesis_is_deterministic() {
        let cfg = SyntheticLexiconConfig::paper();
        let a = synth_lexicon(&cfg, &mut lexicon_rng(99)).unwrap();
        let b = synth_lexicon(&cfg, &mut lexicon_rng(99)).unwrap();
        assert_eq!(a.to_tsv(), b.to_tsv());
        let c = synth_lexicon(&cfg, &mut lexicon_rng(100)).unwrap();
        assert_ne!(a.to_tsv(), c.to_tsv());
    }

    #[test]
    fn alphabet_exhaustion_is_reported() {
        let mut cfg = SyntheticLexiconConfig::paper();
        cfg.infl = ClassConfig {
            count: 27,
            skew: 1.0,
            length_min: 1,
            length_max: 1,
        };
        let err = synth_lexicon(&cfg, &mut lexicon_rng(0)).unwrap_err();
        assert!(matches!(err, Error::Construction(_)), "{err}");
    }

    #[test]
    fn exactly_full_alphabet_is_reachable() {
        let mut cfg = SyntheticLexiconConfig::paper();
        cfg.infl = ClassConfig {
            count: 26,
            skew: 1.0,
            length_min: 1,
            length_max: 1,
        };
        let lex = synth_lexicon(&cfg, &mut lexicon_rng(0)).unwrap();
        assert_eq!(lex.infls().unwrap().len(), 26);
    }

    #[test]
    fn zero_count_is_invalid() {
        let mut cfg = SyntheticLexiconConfig::paper();
        cfg.deriv.count = 0;
        assert!(matches!(cfg.validate(), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn parse_singleton_root() {
        let (lex, report) = parse_lexicon("R\tact\t1.0\n", "t", LoadOptions::default()).unwrap();
        assert_eq!(lex.sizes(), [0, 1, 0, 0]);
        assert_eq!(lex.roots().items()[0].surface(), "act");
        assert_eq!(report.classes.len(), 1);
    }

    #[test]
    fn parse_rejects_bad_weight_sum() {
        let text = "R\tact\t0.5\nR\tion\t0.4\n";
        let err = parse_lexicon(text, "t", LoadOptions::default()).unwrap_err();
        assert!(
            matches!(err, Error::WeightSum { class: "root", .. }),
            "{err}"
        );
        let (lex, report) = parse_lexicon(text, "t", LoadOptions { normalize: true }).unwrap();
        assert!((lex.roots().weights()[0] - 5.0 / 9.0).abs() < 1e-15);
        assert!(report.classes[0].3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "# header\nR\tact\t1.0\nX\tfoo\t1.0\n";
        match parse_lexicon(text, "lex.tsv", LoadOptions::default()).unwrap_err() {
            Error::Parse { line, path, .. } => {
                assert_eq!(line, 3);
                assert_eq!(path, "lex.tsv");
            }
            other => panic!("unexpected {other}"),
        }
        let err = parse_lexicon("R\tact\n", "t", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_lexicon("R\tact\tzero\n", "t", LoadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn parse_rejects_duplicates_and_missing_roots() {
        let dup = "R\tact\t0.5\nR\tact\t0.5\n";
        assert!(matches!(
            parse_lexicon(dup, "t", LoadOptions::default()),
            Err(Error::DuplicateSurface { .. })
        ));
        let no_root = "P\tre\t1\n";
        assert!(matches!(
            parse_lexicon(no_root, "t", LoadOptions::default()),
            Err(Error::InvalidInventory(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let lex = synth_lexicon(&SyntheticLexiconConfig::paper(), &mut lexicon_rng(3)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.tsv");
        save_lexicon(&lex, &path).unwrap();
        let (back, report) = load_lexicon(&path, LoadOptions::default()).unwrap();
        assert_eq!(back, lex);
        assert!(report.classes.iter().all(|c| !c.3));
    }

    #[test]
    fn inventory_sampling_matches_weights() {
        // Multinomial check at 4 standard errors over 10^6 draws.
        let lex = synth_lexicon(&SyntheticLexiconConfig::paper(), &mut lexicon_rng(8)).unwrap();
        let inv = lex.derivs().unwrap();
        let n = 1_000_000;
        let mut counts = vec![0u64; inv.len()];
        let mut rng = crate::rng::generation_rng(8, 0);
        for _ in 0..n {
            counts[inv.sample(&mut rng)] += 1;
        }
        for (c, &p) in counts.iter().zip(inv.weights()) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!(
                (*c as f64 / n as f64 - p).abs() < 4.0 * se,
                "count {c} vs p {p}"
            );
        }
    }
}
