//! Named extension points referenced from grammars: test predicates,
//! selectors, inflection functions and undoable side effects.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::gil::{Atom, FeatureStructure, Symbol, Value};
use crate::morpho::{InflectionRequest, Lexicon, MorphoError};

/// Argument values handed to registered callables. Path arguments that do
/// not resolve are `None`.
pub type ArgValues = [Option<Value>];

pub type PredicateFn = Arc<dyn Fn(&FeatureStructure, &ArgValues) -> bool + Send + Sync>;
pub type SelectorFn = Arc<dyn Fn(&FeatureStructure, &ArgValues) -> Option<FeatureStructure> + Send + Sync>;
pub type InflectFn = Arc<dyn Fn(&InflectionRequest, &Lexicon) -> Result<String, MorphoError> + Send + Sync>;
pub type EffectFn = Arc<dyn Fn(&mut Memory, &[Atom]) + Send + Sync>;

/// Opaque store owned by side-effect functions (e.g. a discourse memory).
pub type Memory = BTreeMap<String, Atom>;

#[derive(Clone)]
pub enum Function {
    Inflect(InflectFn),
    SideEffect { apply: EffectFn, undo: EffectFn },
}

impl fmt::Debug for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Function::Inflect(_) => f.write_str("Inflect(..)"),
            Function::SideEffect { .. } => f.write_str("SideEffect(..)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RegistryError {
    #[error("`{0}` is already registered")]
    Duplicate(String),
    #[error("side effect `{0}` has no undo callback")]
    MissingUndo(String),
}

#[derive(Clone, Default)]
pub struct Registry {
    predicates: HashMap<Symbol, PredicateFn>,
    selectors: HashMap<Symbol, SelectorFn>,
    functions: HashMap<Symbol, Function>,
    pub lexicon: Lexicon,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("predicates", &self.predicates.keys().collect::<Vec<_>>())
            .field("selectors", &self.selectors.keys().collect::<Vec<_>>())
            .field("functions", &self.functions.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Registry {
    pub fn new(lexicon: Lexicon) -> Self {
        Registry {
            lexicon,
            ..Default::default()
        }
    }

    pub fn register_predicate(&mut self, name: &str, f: PredicateFn) -> Result<(), RegistryError> {
        let key = Symbol::new(name);
        if self.predicates.contains_key(&key) {
            return Err(RegistryError::Duplicate(name.into()));
        }
        self.predicates.insert(key, f);
        Ok(())
    }

    pub fn register_selector(&mut self, name: &str, f: SelectorFn) -> Result<(), RegistryError> {
        let key = Symbol::new(name);
        if self.selectors.contains_key(&key) {
            return Err(RegistryError::Duplicate(name.into()));
        }
        self.selectors.insert(key, f);
        Ok(())
    }

    /// Registers an inflection function callable from `(:FUN ...)`.
    pub fn register_function(&mut self, name: &str, f: InflectFn) -> Result<(), RegistryError> {
        self.insert_function(name, Function::Inflect(f))
    }

    /// Registers a side effect. An undo callback is mandatory so that
    /// backtracking can retract the effect.
    pub fn register_side_effect(
        &mut self,
        name: &str,
        apply: EffectFn,
        undo: Option<EffectFn>,
    ) -> Result<(), RegistryError> {
        let undo = undo.ok_or_else(|| RegistryError::MissingUndo(name.into()))?;
        self.insert_function(name, Function::SideEffect { apply, undo })
    }

    fn insert_function(&mut self, name: &str, f: Function) -> Result<(), RegistryError> {
        let key = Symbol::new(name);
        if self.functions.contains_key(&key) {
            return Err(RegistryError::Duplicate(name.into()));
        }
        self.functions.insert(key, f);
        Ok(())
    }

    pub fn predicate(&self, name: &Symbol) -> Option<&PredicateFn> {
        self.predicates.get(name)
    }

    pub fn selector(&self, name: &Symbol) -> Option<&SelectorFn> {
        self.selectors.get(name)
    }

    pub fn function(&self, name: &Symbol) -> Option<&Function> {
        self.functions.get(name)
    }

    pub fn inflect_fn(&self, name: &Symbol) -> Option<&InflectFn> {
        match self.functions.get(name) {
            Some(Function::Inflect(f)) => Some(f),
            _ => None,
        }
    }
}
