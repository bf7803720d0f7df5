//! Stochastic lexical filter: a survival probability φ(w) ∈ [0, 1] and the
//! Bernoulli survival decision, drawn either once per word type or per token.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::generator::WordForm;
use crate::rng::type_uniform;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    FavorShort,
    FavorLong,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurvivalFn {
    Constant(f64),
    /// `1 / (1 + exp(±steepness·(L − midpoint)))`, `+` when favoring short words.
    LengthLogistic {
        midpoint: f64,
        steepness: f64,
        direction: Direction,
    },
    /// Explicit length → probability map; unlisted lengths survive with probability 1.
    Table(BTreeMap<usize, f64>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FilterMode {
    /// One draw per surface, fixed by `(seed, surface)`.
    #[default]
    PerType,
    /// An independent draw for every token.
    PerToken,
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterMode::PerType => "per_type",
            FilterMode::PerToken => "per_token",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurvivalSpec {
    pub function: SurvivalFn,
    pub mode: FilterMode,
}

impl Default for SurvivalSpec {
    fn default() -> Self {
        SurvivalSpec::always()
    }
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} must lie in [0, 1], got {p}"
        )))
    }
}

impl SurvivalSpec {
    pub fn new(function: SurvivalFn, mode: FilterMode) -> Result<SurvivalSpec> {
        match &function {
            SurvivalFn::Constant(c) => check_probability(*c, "constant survival")?,
            SurvivalFn::LengthLogistic {
                midpoint,
                steepness,
                ..
            } => {
                if !midpoint.is_finite() {
                    return Err(Error::InvalidArgument(format!(
                        "logistic midpoint must be finite, got {midpoint}"
                    )));
                }
                if steepness.is_nan() || *steepness < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "logistic steepness must be nonnegative, got {steepness}"
                    )));
                }
            }
            SurvivalFn::Table(map) => {
                for (len, p) in map {
                    check_probability(*p, &format!("table entry for length {len}"))?;
                }
            }
        }
        Ok(SurvivalSpec { function, mode })
    }

    /// constant(1), per type: every word survives.
    pub fn always() -> SurvivalSpec {
        SurvivalSpec {
            function: SurvivalFn::Constant(1.0),
            mode: FilterMode::PerType,
        }
    }

    /// True when every survival probability is exactly one.
    pub fn is_identity(&self) -> bool {
        matches!(self.function, SurvivalFn::Constant(c) if c == 1.0)
    }

    /// φ for a word of the given character length.
    pub fn probability_for_length(&self, length: usize) -> f64 {
        match &self.function {
            SurvivalFn::Constant(c) => *c,
            SurvivalFn::LengthLogistic {
                midpoint,
                steepness,
                direction,
            } => {
                let sign = match direction {
                    Direction::FavorShort => 1.0,
                    Direction::FavorLong => -1.0,
                };
                let z = sign * steepness * (length as f64 - midpoint);
                if z.is_nan() {
                    // infinite steepness exactly at the midpoint
                    0.5
                } else {
                    1.0 / (1.0 + z.exp())
                }
            }
            SurvivalFn::Table(map) => map.get(&length).copied().unwrap_or(1.0),
        }
    }

    /// Per-type survival: a pure function of `(seed, surface)`.
    pub fn survives_type(&self, seed: u64, surface: &str, length: usize) -> bool {
        type_uniform(seed, surface) < self.probability_for_length(length)
    }

    /// Per-token survival: one fresh draw from `rng`.
    pub fn survives_token<R: Rng + ?Sized>(&self, length: usize, rng: &mut R) -> bool {
        rng.random::<f64>() < self.probability_for_length(length)
    }
}

/// φ(w).
pub fn survival_probability(spec: &SurvivalSpec, word: &WordForm) -> f64 {
    spec.probability_for_length(word.length())
}

/// Survival decision for one occurrence of `word`, honoring the spec's mode.
pub fn survives<R: Rng + ?Sized>(
    spec: &SurvivalSpec,
    word: &WordForm,
    seed: u64,
    rng: &mut R,
) -> bool {
    match spec.mode {
        FilterMode::PerType => spec.survives_type(seed, word.surface(), word.length()),
        FilterMode::PerToken => spec.survives_token(word.length(), rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::Analysis;
    use crate::rng::filter_rng;

    fn word(surface: &str) -> WordForm {
        WordForm::from_parts(
            Analysis {
                prefix: None,
                root: 0,
                deriv: None,
                infl: None,
            },
            surface.to_string(),
        )
    }

    fn spec(function: SurvivalFn, mode: FilterMode) -> SurvivalSpec {
        SurvivalSpec::new(function, mode).unwrap()
    }

    #[test]
    fn constant_probability() {
        let s = spec(SurvivalFn::Constant(1.0), FilterMode::PerType);
        assert_eq!(survival_probability(&s, &word("anything")), 1.0);
        assert!(s.is_identity());
    }

    #[test]
    fn logistic_step_limit() {
        let s = spec(
            SurvivalFn::LengthLogistic {
                midpoint: 8.0,
                steepness: f64::INFINITY,
                direction: Direction::FavorShort,
            },
            FilterMode::PerType,
        );
        assert_eq!(survival_probability(&s, &word("abc")), 1.0);
        assert_eq!(survival_probability(&s, &word(&"x".repeat(20))), 0.0);
        assert_eq!(survival_probability(&s, &word(&"x".repeat(8))), 0.5);
    }

    #[test]
    fn logistic_directions_are_complementary() {
        let mk = |direction| {
            spec(
                SurvivalFn::LengthLogistic {
                    midpoint: 6.5,
                    steepness: 0.8,
                    direction,
                },
                FilterMode::PerType,
            )
        };
        let short = mk(Direction::FavorShort);
        let long = mk(Direction::FavorLong);
        for len in 1..20 {
            let sum = short.probability_for_length(len) + long.probability_for_length(len);
            assert!((sum - 1.0).abs() < 1e-12);
        }
        assert!(short.probability_for_length(3) > short.probability_for_length(10));
    }

    #[test]
    fn table_lookup_with_default() {
        let s = spec(SurvivalFn::Table([(5, 0.25)].into()), FilterMode::PerType);
        assert_eq!(survival_probability(&s, &word("abcde")), 0.25);
        assert_eq!(survival_probability(&s, &word("ab")), 1.0);
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(SurvivalSpec::new(SurvivalFn::Constant(1.5), FilterMode::PerType).is_err());
        assert!(
            SurvivalSpec::new(SurvivalFn::Table([(2, -0.1)].into()), FilterMode::PerType).is_err()
        );
        assert!(SurvivalSpec::new(
            SurvivalFn::LengthLogistic {
                midpoint: 1.0,
                steepness: -1.0,
                direction: Direction::FavorLong
            },
            FilterMode::PerType
        )
        .is_err());
    }

    #[test]
    fn constant_zero_never_survives() {
        let mut rng = filter_rng(0, 0);
        for mode in [FilterMode::PerType, FilterMode::PerToken] {
            let s = spec(SurvivalFn::Constant(0.0), mode);
            assert!((0..1000).all(|i| !survives(&s, &word(&format!("w{i}")), 3, &mut rng)));
        }
    }

    #[test]
    fn per_type_is_consistent() {
        let s = spec(SurvivalFn::Constant(0.5), FilterMode::PerType);
        let mut rng = filter_rng(0, 0);
        for i in 0..500 {
            let w = word(&format!("type{i}"));
            let first = survives(&s, &w, 77, &mut rng);
            assert!((0..5).all(|_| survives(&s, &w, 77, &mut rng) == first));
        }
    }

    #[test]
    fn per_token_thinning_rate() {
        // 0.5 ± 0.002 is 4 binomial standard errors at 10^6 tokens.
        let s = spec(SurvivalFn::Constant(0.5), FilterMode::PerToken);
        let w = word("same");
        let mut rng = filter_rng(2024, 0);
        let n = 1_000_000;
        let kept = (0..n).filter(|_| survives(&s, &w, 0, &mut rng)).count();
        assert!((kept as f64 / n as f64 - 0.5).abs() < 0.002);
    }
}
