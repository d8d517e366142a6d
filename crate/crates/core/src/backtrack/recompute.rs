use std::collections::{BTreeMap, HashMap};

use crate::engine::{FeatureGraph, Preterminal, PreterminalId};
use crate::gil::{Atom, Symbol};
use crate::morpho::{inflect, InflectionRequest, MorphoError};
use crate::registry::Registry;

/// Remembers the last realization of every inflection call so that a new
/// solution only re-runs calls whose agreement features changed.
#[derive(Debug, Clone, Default)]
pub struct RealizationCache {
    last: HashMap<PreterminalId, (BTreeMap<Symbol, Atom>, String)>,
    pub realizations: usize,
    pub re_realizations: usize,
}

impl RealizationCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Surface strings for `tokens` under the current feature bindings.
    /// Literals are returned verbatim; cached inflections are reused unless
    /// their features differ from the cached call.
    pub fn recompute_affected(
        &mut self,
        tokens: &[PreterminalId],
        preterminals: &[Preterminal],
        features: &FeatureGraph,
        reg: &Registry,
    ) -> Result<Vec<String>, MorphoError> {
        tokens
            .iter()
            .map(|&t| match &preterminals[t] {
                Preterminal::Literal(s) => Ok(s.clone()),
                Preterminal::Inflect { function, args, hook } => {
                    let feats = features.features_of(*hook);
                    if let Some((prev, s)) = self.last.get(&t) {
                        if *prev == feats {
                            return Ok(s.clone());
                        }
                    }
                    let req = InflectionRequest {
                        function: function.clone(),
                        args: args.clone(),
                        features: feats.clone(),
                    };
                    let s = inflect(&req, reg)?;
                    if self.last.insert(t, (feats, s.clone())).is_some() {
                        self.re_realizations += 1;
                    } else {
                        self.realizations += 1;
                    }
                    Ok(s)
                }
            })
            .collect()
    }
}
