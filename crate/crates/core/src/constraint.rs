//! Admissibility predicates over morpheme combinations.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};
use crate::generator::Analysis;
use crate::lexicon::{Lexicon, MorphemeClass, MorphemeInventory};

/// A total, deterministic 0/1 predicate over `(prefix?, root, deriv?, infl?)`.
pub trait Constraint: Sync {
    fn admits(&self, analysis: &Analysis) -> bool;

    /// True when the predicate accepts every combination.
    fn is_free(&self) -> bool {
        false
    }
}

/// The unconstrained generator, C ≡ 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct Free;

impl Constraint for Free {
    fn admits(&self, _: &Analysis) -> bool {
        true
    }

    fn is_free(&self) -> bool {
        true
    }
}

/// Wraps a closure as a constraint.
pub struct FnConstraint<F>(pub F);

impl<F> Constraint for FnConstraint<F>
where
    F: Fn(&Analysis) -> bool + Sync,
{
    fn admits(&self, analysis: &Analysis) -> bool {
        (self.0)(analysis)
    }
}

/// Per-root allow-sets for derivational suffixes and inflections.
///
/// A root with no entry for a class accepts every morpheme of that class.
/// An empty slot is always admissible.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RootRules {
    derivs: HashMap<usize, HashSet<usize>>,
    infls: HashMap<usize, HashSet<usize>>,
}

impl RootRules {
    pub fn new() -> RootRules {
        RootRules::default()
    }

    /// Restricts `root` to the listed derivational suffix indices.
    pub fn allow_derivs(
        &mut self,
        root: usize,
        derivs: impl IntoIterator<Item = usize>,
    ) -> &mut Self {
        self.derivs.entry(root).or_default().extend(derivs);
        self
    }

    /// Restricts `root` to the listed inflection indices.
    pub fn allow_infls(
        &mut self,
        root: usize,
        infls: impl IntoIterator<Item = usize>,
    ) -> &mut Self {
        self.infls.entry(root).or_default().extend(infls);
        self
    }

    /// Parses `root<TAB>S|E<TAB>surface,surface,...` lines against `lexicon`.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str, lexicon: &Lexicon, source: &str) -> Result<RootRules> {
        let err = |line: usize, message: String| Error::Parse {
            path: source.to_string(),
            line,
            message,
        };
        let index_of = |inv: &MorphemeInventory, surface: &str| {
            inv.items().iter().position(|m| m.surface() == surface)
        };

        let mut rules = RootRules::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(
                    lineno,
                    format!("expected 3 tab-separated fields, found {}", fields.len()),
                ));
            }
            let root = index_of(lexicon.roots(), fields[0])
                .ok_or_else(|| err(lineno, format!("unknown root {:?}", fields[0])))?;
            let class = match MorphemeClass::from_code(fields[1]) {
                Some(c @ (MorphemeClass::DerivSuffix | MorphemeClass::Inflection)) => c,
                _ => {
                    return Err(err(
                        lineno,
                        format!("rule class must be S or E, got {:?}", fields[1]),
                    ))
                }
            };
            let inv = lexicon
                .inventory(class)
                .ok_or_else(|| err(lineno, format!("lexicon has no {class} inventory")))?;
            let mut allowed = Vec::new();
            for surface in fields[2]
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
            {
                let idx = index_of(inv, surface)
                    .ok_or_else(|| err(lineno, format!("unknown {class} {surface:?}")))?;
                allowed.push(idx);
            }
            match class {
                MorphemeClass::DerivSuffix => rules.allow_derivs(root, allowed),
                _ => rules.allow_infls(root, allowed),
            };
        }
        Ok(rules)
    }

    pub fn load(path: impl AsRef<Path>, lexicon: &Lexicon) -> Result<RootRules> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RootRules::parse(&text, lexicon, &path.display().to_string())
    }
}

impl Constraint for RootRules {
    fn admits(&self, a: &Analysis) -> bool {
        let deriv_ok = match (a.deriv, self.derivs.get(&a.root)) {
            (Some(d), Some(allowed)) => allowed.contains(&d),
            _ => true,
        };
        let infl_ok = match (a.infl, self.infls.get(&a.root)) {
            (Some(e), Some(allowed)) => allowed.contains(&e),
            _ => true,
        };
        deriv_ok && infl_ok
    }

    fn is_free(&self) -> bool {
        self.derivs.is_empty() && self.infls.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{parse_lexicon, LoadOptions};

    fn lexicon() -> Lexicon {
        let text = "R\tact\t0.5\nR\tform\t0.5\nS\tion\t0.5\nS\tive\t0.5\nE\ts\t1\n";
        parse_lexicon(text, "t", LoadOptions::default()).unwrap().0
    }

    fn analysis(root: usize, deriv: Option<usize>, infl: Option<usize>) -> Analysis {
        Analysis {
            prefix: None,
            root,
            deriv,
            infl,
        }
    }

    #[test]
    fn parses_rules_by_surface() {
        let lex = lexicon();
        let rules = RootRules::parse("# rules\nact\tS\tion\nform\tE\t\n", &lex, "r").unwrap();
        assert!(rules.admits(&analysis(0, Some(0), None)));
        assert!(!rules.admits(&analysis(0, Some(1), None)));
        assert!(rules.admits(&analysis(0, None, Some(0))));
        // Empty allow-set forbids every inflection on "form".
        assert!(!rules.admits(&analysis(1, None, Some(0))));
        assert!(rules.admits(&analysis(1, Some(1), None)));
        assert!(!rules.is_free());
    }

    #[test]
    fn parse_errors_name_the_line() {
        let lex = lexicon();
        for bad in [
            "nope\tS\tion\n",
            "act\tP\tre\n",
            "act\tS\tment\n",
            "act\tS\n",
        ] {
            match RootRules::parse(bad, &lex, "r") {
                Err(Error::Parse { line: 1, .. }) => {}
                other => panic!("{bad:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn empty_rules_are_free() {
        assert!(RootRules::new().is_free());
        assert!(Free.is_free());
        assert!(!FnConstraint(|_: &Analysis| true).is_free());
    }
}
