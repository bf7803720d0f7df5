//! Experiment configuration: flat `dotted.key = value` files plus overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mcwm::constraint::{Constraint, Free, RootRules};
use mcwm::filter::{Direction, FilterMode, SurvivalFn, SurvivalSpec};
use mcwm::generator::{SlotActivations, DEFAULT_ENUMERATION_BUDGET};
use mcwm::lexicon::{
    load_lexicon, synth_lexicon, Lexicon, LoadOptions, MorphemeClass, SyntheticLexiconConfig,
};
use mcwm::rng::lexicon_rng;

use crate::CliError;

/// Default cap on the number of sweep points.
pub const DEFAULT_SWEEP_MAX_POINTS: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct FilterSettings {
    pub kind: String,
    pub constant: f64,
    pub midpoint: f64,
    pub steepness: f64,
    pub direction: Direction,
    pub table: BTreeMap<usize, f64>,
    pub mode: FilterMode,
}

impl Default for FilterSettings {
    fn default() -> Self {
        FilterSettings {
            kind: "constant".into(),
            constant: 1.0,
            midpoint: 10.0,
            steepness: 1.0,
            direction: Direction::FavorShort,
            table: BTreeMap::new(),
            mode: FilterMode::PerType,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub synthetic: SyntheticLexiconConfig,
    pub lexicon_file: Option<PathBuf>,
    pub lexicon_normalize: bool,
    pub a_p: f64,
    pub a_s: f64,
    pub a_e: f64,
    /// `None` is the free generator.
    pub constraint_file: Option<PathBuf>,
    pub filter: FilterSettings,
    pub n_tokens: u64,
    pub seed: u64,
    /// Seed for lexicon synthesis when it should differ from `seed`.
    pub lexicon_seed: Option<u64>,
    pub fit_window: (Option<usize>, Option<usize>),
    pub out: PathBuf,
    pub threads: usize,
    pub svg: bool,
    pub enumeration_budget: u64,
    /// Parameter lists for `sweep`, in declaration order.
    pub sweep: Vec<(String, Vec<String>)>,
    pub sweep_max_points: usize,
}

impl Default for ExperimentConfig {
    /// The published synthetic setup: 20/500/80/15 morphemes, activations
    /// (0.4, 0.6, 0.7), 80 000 tokens, no filter.
    fn default() -> Self {
        let acts = SlotActivations::paper();
        ExperimentConfig {
            synthetic: SyntheticLexiconConfig::paper(),
            lexicon_file: None,
            lexicon_normalize: false,
            a_p: acts.prefix(),
            a_s: acts.deriv(),
            a_e: acts.infl(),
            constraint_file: None,
            filter: FilterSettings::default(),
            n_tokens: 80_000,
            seed: 1,
            lexicon_seed: None,
            fit_window: (None, None),
            out: PathBuf::from("out"),
            threads: 1,
            svg: false,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            sweep: Vec::new(),
            sweep_max_points: DEFAULT_SWEEP_MAX_POINTS,
        }
    }
}

fn bad(key: &str, value: &str, expected: &str) -> CliError {
    CliError::Validation(format!("{key}: expected {expected}, got {value:?}"))
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, expected: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| bad(key, value, expected))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, CliError> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, value, "true or false")),
    }
}

fn class_from_name(name: &str) -> Option<MorphemeClass> {
    MorphemeClass::ALL.into_iter().find(|c| c.name() == name)
}

impl ExperimentConfig {
    /// Reads a config file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<ExperimentConfig, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text, &path.display().to_string())?;
        Ok(cfg)
    }

    /// Applies `key = value` lines; `#` starts a comment line.
    pub fn apply_text(&mut self, text: &str, source: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("{source}:{}: expected `key = value`", i + 1))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| {
                CliError::Validation(format!("{source}:{}: {}", i + 1, e.message()))
            })?;
        }
        Ok(())
    }

    /// Applies `key=value` overrides.
    pub fn apply_overrides<'a>(
        &mut self,
        pairs: impl IntoIterator<Item = &'a str>,
    ) -> Result<(), CliError> {
        for pair in pairs {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                CliError::Validation(format!("--set expects key=value, got {pair:?}"))
            })?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if let Some(param) = key.strip_prefix("sweep.") {
            if param == "max_points" {
                self.sweep_max_points = parse(key, value, "a positive integer")?;
                return Ok(());
            }
            let values: Vec<String> = value
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            if values.is_empty() {
                return Err(bad(key, value, "a comma-separated list"));
            }
            // Validate each value against a scratch config now, not mid-sweep.
            let mut scratch = self.clone();
            for v in &values {
                scratch.set(param, v)?;
            }
            self.sweep.retain(|(k, _)| k != param);
            self.sweep.push((param.to_string(), values));
            return Ok(());
        }

        if let Some(rest) = key.strip_prefix("lexicon.") {
            match rest {
                "file" => {
                    self.lexicon_file = Some(PathBuf::from(value));
                    return Ok(());
                }
                "normalize" => {
                    self.lexicon_normalize = parse_bool(key, value)?;
                    return Ok(());
                }
                _ => {}
            }
            let (class, field) = rest
                .split_once('.')
                .ok_or_else(|| CliError::Validation(format!("unknown key {key:?}")))?;
            let class = class_from_name(class).ok_or_else(|| {
                CliError::Validation(format!(
                    "{key}: unknown class {class:?} (expected prefix, root, deriv or infl)"
                ))
            })?;
            let cfg = self.synthetic.class_mut(class);
            match field {
                "count" => cfg.count = parse(key, value, "a positive integer")?,
                "skew" => cfg.skew = parse(key, value, "a nonnegative number")?,
                "length_min" => cfg.length_min = parse(key, value, "a positive integer")?,
                "length_max" => cfg.length_max = parse(key, value, "a positive integer")?,
                _ => return Err(CliError::Validation(format!("unknown key {key:?}"))),
            }
            return Ok(());
        }

        match key {
            "activations.a_P" => self.a_p = parse(key, value, "a probability")?,
            "activations.a_S" => self.a_s = parse(key, value, "a probability")?,
            "activations.a_E" => self.a_e = parse(key, value, "a probability")?,
            "constraint" => {
                self.constraint_file = match value {
                    "free" => None,
                    path => Some(PathBuf::from(path)),
                }
            }
            "filter.kind" => match value {
                "constant" | "logistic" | "table" => self.filter.kind = value.to_string(),
                _ => return Err(bad(key, value, "constant, logistic or table")),
            },
            "filter.c" => self.filter.constant = parse(key, value, "a probability")?,
            "filter.midpoint" => self.filter.midpoint = parse(key, value, "a number")?,
            "filter.steepness" => {
                self.filter.steepness = match value {
                    "inf" | "infinity" => f64::INFINITY,
                    v => parse(key, v, "a nonnegative number")?,
                }
            }
            "filter.direction" => {
                self.filter.direction = match value {
                    "favor_short" | "short" => Direction::FavorShort,
                    "favor_long" | "long" => Direction::FavorLong,
                    _ => return Err(bad(key, value, "favor_short or favor_long")),
                }
            }
            "filter.table" => {
                let mut table = BTreeMap::new();
                for entry in value.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                    let (len, p) = entry
                        .split_once(':')
                        .ok_or_else(|| bad(key, value, "length:probability pairs"))?;
                    table.insert(
                        parse(key, len.trim(), "an integer length")?,
                        parse(key, p.trim(), "a probability")?,
                    );
                }
                self.filter.table = table;
            }
            "filter.mode" => {
                self.filter.mode = match value {
                    "per_type" => FilterMode::PerType,
                    "per_token" => FilterMode::PerToken,
                    _ => return Err(bad(key, value, "per_type or per_token")),
                }
            }
            "n_tokens" => self.n_tokens = parse(key, value, "a positive integer")?,
            "seed" => self.seed = parse(key, value, "an unsigned 64-bit integer")?,
            "fit.r_min" => self.fit_window.0 = Some(parse(key, value, "a positive integer")?),
            "fit.r_max" => self.fit_window.1 = Some(parse(key, value, "a positive integer")?),
            "out" => self.out = PathBuf::from(value),
            "threads" => self.threads = parse(key, value, "a positive integer")?,
            "svg" => self.svg = parse_bool(key, value)?,
            "exact.budget" => self.enumeration_budget = parse(key, value, "a positive integer")?,
            _ => return Err(CliError::Validation(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Checks everything that does not need the file system.
    pub fn validate(&self) -> Result<(), CliError> {
        self.activations()?;
        self.survival_spec()?;
        if self.lexicon_file.is_none() {
            self.synthetic.validate().map_err(CliError::from)?;
        }
        if self.n_tokens == 0 {
            return Err(CliError::Validation("n_tokens must be at least 1".into()));
        }
        if self.threads == 0 {
            return Err(CliError::Validation("threads must be at least 1".into()));
        }
        if let (Some(lo), Some(hi)) = self.fit_window {
            if lo == 0 || lo > hi || hi - lo < 2 {
                return Err(CliError::Validation(format!(
                    "fit window {lo}..{hi} must satisfy 1 <= r_min and contain at least 3 ranks"
                )));
            }
        }
        if self.fit_window.0 == Some(0) {
            return Err(CliError::Validation("fit.r_min must be at least 1".into()));
        }
        Ok(())
    }

    pub fn activations(&self) -> Result<SlotActivations, CliError> {
        SlotActivations::new(self.a_p, self.a_s, self.a_e)
            .map_err(|e| CliError::Validation(format!("activations: {e}")))
    }

    pub fn survival_spec(&self) -> Result<SurvivalSpec, CliError> {
        let f = &self.filter;
        let function = match f.kind.as_str() {
            "constant" => SurvivalFn::Constant(f.constant),
            "logistic" => SurvivalFn::LengthLogistic {
                midpoint: f.midpoint,
                steepness: f.steepness,
                direction: f.direction,
            },
            _ => SurvivalFn::Table(f.table.clone()),
        };
        SurvivalSpec::new(function, f.mode)
            .map_err(|e| CliError::Validation(format!("filter: {e}")))
    }

    /// Loads the lexicon file, or synthesizes one from `lexicon_seed` (default `seed`).
    pub fn lexicon(&self) -> Result<Lexicon, CliError> {
        match &self.lexicon_file {
            Some(path) => {
                if !path.exists() {
                    return Err(CliError::Validation(format!(
                        "lexicon.file {} does not exist",
                        path.display()
                    )));
                }
                let opts = LoadOptions {
                    normalize: self.lexicon_normalize,
                };
                Ok(load_lexicon(path, opts)?.0)
            }
            None => Ok(synth_lexicon(
                &self.synthetic,
                &mut lexicon_rng(self.lexicon_seed.unwrap_or(self.seed)),
            )?),
        }
    }

    pub fn constraint(&self, lexicon: &Lexicon) -> Result<Box<dyn Constraint>, CliError> {
        match &self.constraint_file {
            None => Ok(Box::new(Free)),
            Some(path) => {
                if !path.exists() {
                    return Err(CliError::Validation(format!(
                        "constraint file {} does not exist",
                        path.display()
                    )));
                }
                Ok(Box::new(RootRules::load(path, lexicon)?))
            }
        }
    }

    /// Fit window clamped to a table of `k` ranks; `None` below three ranks.
    pub fn window_for(&self, k: usize) -> Option<(usize, usize)> {
        let lo = self.fit_window.0.unwrap_or(1);
        let hi = self
            .fit_window
            .1
            .unwrap_or(mcwm::zipf::DEFAULT_FIT_MAX_RANK)
            .min(k);
        (hi >= lo + 2).then_some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_published_setup() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.synthetic, SyntheticLexiconConfig::paper());
        assert_eq!((cfg.a_p, cfg.a_s, cfg.a_e), (0.4, 0.6, 0.7));
        assert_eq!(cfg.n_tokens, 80_000);
        cfg.validate().unwrap();
    }

    #[test]
    fn parses_dotted_keys() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(
            "# comment\nactivations.a_P = 0.25\nlexicon.root.count = 40\nfilter.kind = table\n\
             filter.table = 5:0.25, 6:0.5\nfilter.mode = per_token\nseed = 12\nsweep.activations.a_E = 0, 1\n",
            "cfg",
        )
        .unwrap();
        assert_eq!(cfg.a_p, 0.25);
        assert_eq!(cfg.synthetic.root.count, 40);
        assert_eq!(cfg.filter.table, [(5, 0.25), (6, 0.5)].into());
        assert_eq!(cfg.filter.mode, FilterMode::PerToken);
        assert_eq!(cfg.seed, 12);
        assert_eq!(
            cfg.sweep,
            vec![(
                "activations.a_E".to_string(),
                vec!["0".to_string(), "1".to_string()]
            )]
        );
    }

    #[test]
    fn errors_name_the_field() {
        let mut cfg = ExperimentConfig::default();
        let err = cfg
            .apply_text("lexicon.root.count = many\n", "cfg")
            .unwrap_err();
        assert!(
            err.message().contains("lexicon.root.count"),
            "{}",
            err.message()
        );
        assert!(err.message().contains("cfg:1"));
        assert!(cfg.set("bogus.key", "1").is_err());
        assert!(cfg.set("sweep.activations.a_P", "0.1, x").is_err());

        cfg.set("lexicon.deriv.count", "0").unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.message().contains("deriv.count"), "{}", err.message());

        let mut cfg = ExperimentConfig::default();
        cfg.set("activations.a_S", "1.5").unwrap();
        assert!(cfg.validate().unwrap_err().message().contains("a_S"));
    }

    #[test]
    fn window_clamps_to_table() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.window_for(5000), Some((1, 100)));
        assert_eq!(cfg.window_for(40), Some((1, 40)));
        assert_eq!(cfg.window_for(2), None);
    }
}
