use std::collections::{BTreeMap, HashMap};

use crate::gil::{Atom, Symbol};

use super::MorphoError;

/// Sorted `feature=value` pairs, lower-cased.
pub type ParadigmKey = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LexiconEntry {
    pub lemma: String,
    pub paradigm: BTreeMap<ParadigmKey, String>,
    pub fallback: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: HashMap<String, LexiconEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lexicon line {line}: {msg}")]
pub struct LexiconError {
    pub line: usize,
    pub msg: String,
}

fn features_text(features: &BTreeMap<Symbol, Atom>) -> String {
    let parts: Vec<String> = features.iter().map(|(k, v)| format!("{k}={}", v.text())).collect();
    format!("{{{}}}", parts.join(","))
}

impl Lexicon {
    pub fn insert(&mut self, entry: LexiconEntry) {
        self.entries.insert(entry.lemma.to_lowercase(), entry);
    }

    pub fn entry(&self, lemma: &str) -> Option<&LexiconEntry> {
        self.entries.get(&lemma.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Most specific paradigm cell whose pairs are all present in
    /// `features`; the fallback form if none matches.
    pub fn lookup(&self, lemma: &str, features: &BTreeMap<Symbol, Atom>) -> Result<String, MorphoError> {
        let entry = self
            .entry(lemma)
            .ok_or_else(|| MorphoError::UnknownLemma(lemma.to_string()))?;
        let have: BTreeMap<String, String> = features.iter().map(|(k, v)| (k.canonical(), v.key_text())).collect();
        let mut best: Option<(usize, &String)> = None;
        let mut tie = false;
        for (key, form) in &entry.paradigm {
            if !key.iter().all(|(f, v)| have.get(f) == Some(v)) {
                continue;
            }
            match best {
                Some((n, _)) if n > key.len() => {}
                Some((n, prev)) if n == key.len() => tie |= prev != form,
                _ => {
                    best = Some((key.len(), form));
                    tie = false;
                }
            }
        }
        match best {
            Some(_) if tie => Err(MorphoError::Ambiguous {
                lemma: lemma.to_string(),
                features: features_text(features),
            }),
            Some((_, form)) => Ok(form.clone()),
            None => entry.fallback.clone().ok_or_else(|| MorphoError::NoForm {
                lemma: lemma.to_string(),
                features: features_text(features),
            }),
        }
    }
}

/// Parses the line format `lemma | key=val,... -> form | -> fallback`.
/// `#` starts a comment; a cell with no keys is the fallback form.
pub fn parse_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    let mut lex = Lexicon::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: &str| LexiconError { line, msg: msg.into() };
        let mut cells = content.split('|').map(str::trim);
        let lemma = cells.next().filter(|l| !l.is_empty()).ok_or_else(|| err("missing lemma"))?;
        if lex.entry(lemma).is_some() {
            return Err(err("duplicate lemma"));
        }
        let mut entry = LexiconEntry {
            lemma: lemma.to_string(),
            ..Default::default()
        };
        for cell in cells {
            let (keys, form) = cell.split_once("->").ok_or_else(|| err("cell lacks `->`"))?;
            let form = form.trim().to_string();
            if form.is_empty() {
                return Err(err("empty form"));
            }
            let keys = keys.trim();
            if keys.is_empty() {
                if entry.fallback.replace(form).is_some() {
                    return Err(err("two fallback forms"));
                }
                continue;
            }
            let mut key: ParadigmKey = Vec::new();
            for pair in keys.split(',') {
                let (f, v) = pair.split_once('=').ok_or_else(|| err("feature pair lacks `=`"))?;
                let (f, v) = (f.trim().to_lowercase(), v.trim().to_lowercase());
                if f.is_empty() || v.is_empty() {
                    return Err(err("empty feature or value"));
                }
                key.push((f, v));
            }
            key.sort();
            key.dedup_by(|a, b| a.0 == b.0);
            if entry.paradigm.insert(key, form).is_some() {
                return Err(err("duplicate paradigm cell"));
            }
        }
        lex.insert(entry);
    }
    Ok(lex)
}
