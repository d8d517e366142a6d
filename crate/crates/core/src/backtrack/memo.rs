use std::collections::HashMap;

use crate::engine::ChoiceId;
use crate::gil::FeatureStructure;
use crate::tgl::Category;

/// Successful partial results keyed by category and input structure. A hit
/// requires the same category and a structurally equal input.
#[derive(Debug, Clone, Default)]
pub struct MemoCache {
    entries: HashMap<(String, String), ChoiceId>,
}

impl MemoCache {
    fn key(cat: &Category, fs: &FeatureStructure) -> (String, String) {
        (cat.canonical(), fs.canonical_key())
    }

    pub fn lookup(&self, cat: &Category, fs: &FeatureStructure) -> Option<ChoiceId> {
        self.entries.get(&Self::key(cat, fs)).copied()
    }

    pub fn store(&mut self, cat: &Category, fs: &FeatureStructure, choice: ChoiceId) {
        self.entries.entry(Self::key(cat, fs)).or_insert(choice);
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gil::parse_gil;

    #[test]
    fn hits_need_equal_category_and_input() {
        let mut m = MemoCache::default();
        let a = parse_gil("[(X 1) (Y 2)]").unwrap();
        assert_eq!(m.lookup(&"NP".into(), &a), None);
        m.store(&"NP".into(), &a, 7);
        assert_eq!(m.lookup(&"np".into(), &parse_gil("[(Y 2) (X 1)]").unwrap()), Some(7));
        assert_eq!(m.lookup(&"NP".into(), &parse_gil("[(X 1)]").unwrap()), None);
        assert_eq!(m.lookup(&"VP".into(), &a), None);
        m.clear();
        assert!(m.is_empty());
    }
}
