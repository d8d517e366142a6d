//! Inflection: a lexicon of paradigm tables and the built-in functions
//! grammars call through `(:FUN ...)`.

mod lexicon;

use std::collections::BTreeMap;
use std::sync::Arc;

pub use lexicon::{parse_lexicon, Lexicon, LexiconEntry, LexiconError, ParadigmKey};

use crate::gil::{Atom, Symbol};
use crate::registry::{EffectFn, InflectFn, Registry};

/// A deferred call to an inflection function, with the agreement features
/// bound at realization time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflectionRequest {
    pub function: Symbol,
    pub args: Vec<Atom>,
    /// Only bound features; keys compare case-insensitively.
    pub features: BTreeMap<Symbol, Atom>,
}

impl InflectionRequest {
    pub fn new(function: &str, args: Vec<Atom>) -> Self {
        InflectionRequest {
            function: Symbol::new(function),
            args,
            features: BTreeMap::new(),
        }
    }

    pub fn with(mut self, feature: &str, value: Atom) -> Self {
        self.features.insert(Symbol::new(feature), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphoError {
    #[error("unknown inflection function `{0}`")]
    UnknownFunction(String),
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
    #[error("no form of `{lemma}` for features {features}")]
    NoForm { lemma: String, features: String },
    #[error("ambiguous paradigm cells for `{lemma}` with features {features}")]
    Ambiguous { lemma: String, features: String },
    #[error("`{function}` expects {expected}")]
    BadArguments { function: String, expected: String },
}

const WEEKDAYS: [&str; 7] = ["Montag", "Dienstag", "Mittwoch", "Donnerstag", "Freitag", "Samstag", "Sonntag"];

/// Day name for 1 (Monday) through 7 (Sunday).
pub fn weekday_name(day: i64) -> Option<&'static str> {
    usize::try_from(day)
        .ok()
        .and_then(|d| d.checked_sub(1))
        .and_then(|d| WEEKDAYS.get(d).copied())
}

/// Runs the registered function named by the request.
pub fn inflect(req: &InflectionRequest, reg: &Registry) -> Result<String, MorphoError> {
    let f = reg
        .inflect_fn(&req.function)
        .ok_or_else(|| MorphoError::UnknownFunction(req.function.to_string()))?;
    f(req, &reg.lexicon)
}

fn lexical(req: &InflectionRequest, lex: &Lexicon) -> Result<String, MorphoError> {
    match req.args.as_slice() {
        [lemma] => lex.lookup(&lemma.key_text(), &req.features),
        _ => Err(MorphoError::BadArguments {
            function: req.function.to_string(),
            expected: "exactly one lemma".into(),
        }),
    }
}

fn weekday_pp(req: &InflectionRequest, _: &Lexicon) -> Result<String, MorphoError> {
    match req.args.as_slice() {
        [Atom::Int(d)] => weekday_name(*d)
            .map(|n| format!("am {n}"))
            .ok_or_else(|| MorphoError::BadArguments {
                function: "weekday-pp".into(),
                expected: "a weekday number 1..7".into(),
            }),
        _ => Err(MorphoError::BadArguments {
            function: "weekday-pp".into(),
            expected: "one integer".into(),
        }),
    }
}

fn pass_through(req: &InflectionRequest, _: &Lexicon) -> Result<String, MorphoError> {
    Ok(req.args.iter().map(Atom::text).collect::<Vec<_>>().join(" "))
}

pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.lex");

/// Registry with the built-in functions and the bundled toy lexicon.
///
/// Template functions: `verb`, `noun`, `pronoun`, `det`, `adj`, `lex`
/// (lexicon lookups of their single lemma argument), `weekday-pp`, and
/// `name` (joins its arguments verbatim). Side effect: `mention`, which
/// counts mentions of a discourse referent in memory.
pub fn default_registry() -> Registry {
    let lexicon = parse_lexicon(DEFAULT_LEXICON).expect("bundled lexicon parses");
    let mut reg = Registry::new(lexicon);
    install_builtins(&mut reg);
    reg
}

pub fn install_builtins(reg: &mut Registry) {
    let lex: InflectFn = Arc::new(lexical);
    for name in ["verb", "noun", "pronoun", "det", "adj", "lex"] {
        reg.register_function(name, lex.clone()).expect("fresh registry");
    }
    reg.register_function("weekday-pp", Arc::new(weekday_pp)).expect("fresh registry");
    reg.register_function("name", Arc::new(pass_through)).expect("fresh registry");
    let apply: EffectFn = Arc::new(|mem, args| {
        let key = mention_key(args);
        let n = mem.get(&key).and_then(Atom::as_int).unwrap_or(0);
        mem.insert(key, Atom::Int(n + 1));
    });
    let undo: EffectFn = Arc::new(|mem, args| {
        let key = mention_key(args);
        match mem.get(&key).and_then(Atom::as_int) {
            Some(n) if n > 1 => {
                mem.insert(key, Atom::Int(n - 1));
            }
            _ => {
                mem.remove(&key);
            }
        }
    });
    reg.register_side_effect("mention", apply, Some(undo)).expect("fresh registry");
}

fn mention_key(args: &[Atom]) -> String {
    let parts: Vec<String> = args.iter().map(Atom::key_text).collect();
    format!("mentioned:{}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinitive_and_weekday() {
        let reg = default_registry();
        let req = InflectionRequest::new("verb", vec![Atom::sym("treffen")]).with("TENSE", Atom::sym("inf"));
        assert_eq!(inflect(&req, &reg).unwrap(), "treffen");
        let req = InflectionRequest::new("weekday-pp", vec![Atom::Int(5)]);
        assert_eq!(inflect(&req, &reg).unwrap(), "am Freitag");
    }

    #[test]
    fn weekday_mapping() {
        let names: Vec<_> = (1..=7).map(|d| weekday_name(d).unwrap()).collect();
        assert_eq!(names, WEEKDAYS);
        assert_eq!(weekday_name(5), Some("Freitag"));
        assert_eq!(weekday_name(0), None);
        assert_eq!(weekday_name(8), None);
    }

    #[test]
    fn unknown_lemma_and_function() {
        let reg = default_registry();
        let req = InflectionRequest::new("verb", vec![Atom::sym("xyzzy")]).with("TENSE", Atom::sym("inf"));
        assert_eq!(inflect(&req, &reg), Err(MorphoError::UnknownLemma("xyzzy".into())));
        let req = InflectionRequest::new("conjugate", vec![]);
        assert!(matches!(inflect(&req, &reg), Err(MorphoError::UnknownFunction(_))));
    }

    #[test]
    fn features_select_cells() {
        let reg = default_registry();
        let base = InflectionRequest::new("verb", vec![Atom::sym("wollen")])
            .with("TENSE", Atom::sym("pres"))
            .with("PERSON", Atom::Int(3));
        let sg = inflect(&base.clone().with("NUM", Atom::sym("sg")), &reg).unwrap();
        let pl = inflect(&base.with("NUM", Atom::sym("pl")), &reg).unwrap();
        assert_eq!((sg.as_str(), pl.as_str()), ("will", "wollen"));
        // deterministic
        let req = InflectionRequest::new("pronoun", vec![Atom::sym("sie-polite")]).with("CASE", Atom::sym("dat"));
        assert_eq!(inflect(&req, &reg).unwrap(), inflect(&req, &reg).unwrap());
        assert_eq!(inflect(&req, &reg).unwrap(), "Ihnen");
    }

    #[test]
    fn names_pass_through() {
        let reg = default_registry();
        let req = InflectionRequest::new("name", vec![Atom::Str("Prof.".into()), Atom::Str("Zweig".into())]);
        assert_eq!(inflect(&req, &reg).unwrap(), "Prof. Zweig");
    }

    #[test]
    fn mention_side_effect_undoes() {
        let reg = default_registry();
        let Some(crate::registry::Function::SideEffect { apply, undo }) = reg.function(&"mention".into()) else {
            panic!("mention is registered");
        };
        let mut mem = crate::registry::Memory::new();
        let args = [Atom::sym("refo365")];
        apply(&mut mem, &args);
        apply(&mut mem, &args);
        undo(&mut mem, &args);
        assert_eq!(mem.values().next(), Some(&Atom::Int(1)));
        undo(&mut mem, &args);
        assert!(mem.is_empty());
    }
}
