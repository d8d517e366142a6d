use std::collections::BTreeMap;

use crate::engine::{DerivationTree, TreeChild};
use crate::scalar::Weight;

use super::criteria::CriteriaSpec;

/// For every applied rule, the c-rules applied below it, accumulated over
/// one or more derivations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DerivationHistory {
    pub derivations: usize,
    /// rule name → c-rule name → number of applications in its subtrees.
    pub below: BTreeMap<String, BTreeMap<String, usize>>,
    /// c-rule name → (applications within one derivation → derivations).
    pub per_derivation: BTreeMap<String, BTreeMap<usize, usize>>,
}

impl DerivationHistory {
    /// Adds `other` into `self`; all counts are summed.
    pub fn merge(&mut self, other: &DerivationHistory) {
        self.derivations += other.derivations;
        for (rule, cs) in &other.below {
            let entry = self.below.entry(rule.clone()).or_default();
            for (c, n) in cs {
                *entry.entry(c.clone()).or_default() += n;
            }
        }
        for (c, hist) in &other.per_derivation {
            let entry = self.per_derivation.entry(c.clone()).or_default();
            for (k, n) in hist {
                *entry.entry(*k).or_default() += n;
            }
        }
    }

    /// How many recorded derivations applied `c_rule` at least once.
    pub fn derivations_applying(&self, c_rule: &str) -> usize {
        self.per_derivation.get(c_rule).map_or(0, |h| h.values().sum())
    }

    /// Mean number of applications of `c_rule` over derivations that
    /// applied it.
    pub fn mean_applications(&self, c_rule: &str) -> Option<f64> {
        let h = self.per_derivation.get(c_rule)?;
        let (num, den) = h.iter().fold((0usize, 0usize), |(s, d), (k, n)| (s + k * n, d + n));
        (den > 0).then(|| num as f64 / den as f64)
    }
}

pub fn record_history<W: Weight>(tree: &DerivationTree, spec: &CriteriaSpec<W>) -> DerivationHistory {
    let mut h = DerivationHistory {
        derivations: 1,
        ..Default::default()
    };
    let total = walk(tree, spec, &mut h);
    for (c, n) in total {
        *h.per_derivation.entry(c).or_default().entry(n).or_default() += 1;
    }
    h
}

/// Records `t`'s entry and returns the c-rules applied in `t` including
/// its root.
fn walk<W: Weight>(t: &DerivationTree, spec: &CriteriaSpec<W>, h: &mut DerivationHistory) -> BTreeMap<String, usize> {
    let mut below: BTreeMap<String, usize> = BTreeMap::new();
    for c in &t.children {
        if let TreeChild::Node(n) = c {
            for (k, v) in walk(n, spec, h) {
                *below.entry(k).or_default() += v;
            }
        }
    }
    let entry = h.below.entry(t.rule.clone()).or_default();
    for (k, v) in &below {
        *entry.entry(k.clone()).or_default() += v;
    }
    if spec.is_c_rule(&t.rule) {
        *below.entry(t.rule.clone()).or_default() += 1;
    }
    below
}
