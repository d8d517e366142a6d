use std::collections::BTreeMap;

use crate::engine::{BtId, ChoiceId, DNodeId, Forest, Frontier, PreterminalId};
use crate::tgl::RuleId;

/// A conflict set with more than one element, recorded so later solutions
/// can be produced by firing its remaining rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacktrackPoint {
    pub id: BtId,
    pub choice: ChoiceId,
    /// Preterminals generated left of the point when it was recorded.
    pub pre_context: Vec<PreterminalId>,
    /// Preterminals right of the point in the first solution through it;
    /// `None` until such a solution has been read off.
    pub post_context: Option<Vec<PreterminalId>>,
    /// Enclosing point and the variant of its ego this point lies in.
    pub parent: Option<(BtId, usize)>,
    /// Rules fired from the remainder that produced no variant.
    pub failed: Vec<RuleId>,
    pub expansions: usize,
}

impl BacktrackPoint {
    pub fn remainder<'f>(&self, forest: &'f Forest) -> &'f [RuleId] {
        forest.choice(self.choice).remainder()
    }

    pub fn ego_variants<'f>(&self, forest: &'f Forest) -> &'f [DNodeId] {
        &forest.choice(self.choice).variants
    }

    pub fn is_exhausted(&self, forest: &Forest) -> bool {
        self.remainder(forest).is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BtTable {
    points: BTreeMap<BtId, BacktrackPoint>,
    next: BtId,
}

impl BtTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a point for `choice`. Ids increase monotonically, so a higher
    /// id means a more recently created point.
    pub fn record(&mut self, choice: ChoiceId, pre_context: Vec<PreterminalId>, parent: Option<(BtId, usize)>) -> BtId {
        self.next += 1;
        let id = self.next;
        self.points.insert(
            id,
            BacktrackPoint {
                id,
                choice,
                pre_context,
                post_context: None,
                parent,
                failed: Vec::new(),
                expansions: 0,
            },
        );
        id
    }

    pub fn remove(&mut self, id: BtId) -> Option<BacktrackPoint> {
        self.points.remove(&id)
    }

    pub fn get(&self, id: BtId) -> Option<&BacktrackPoint> {
        self.points.get(&id)
    }

    pub fn get_mut(&mut self, id: BtId) -> Option<&mut BacktrackPoint> {
        self.points.get_mut(&id)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BacktrackPoint> {
        self.points.values()
    }

    /// Points that still have unfired rules, oldest first.
    pub fn open_points<'a>(&'a self, forest: &'a Forest) -> impl Iterator<Item = &'a BacktrackPoint> + 'a {
        self.points.values().filter(move |p| !p.is_exhausted(forest))
    }

    /// Enters post-contexts for every pending point that the frontier
    /// passes through.
    pub fn fill_post_contexts(&mut self, frontier: &Frontier) {
        for p in self.points.values_mut() {
            if p.post_context.is_none() {
                if let Some(&(_, end)) = frontier.spans.get(&p.choice) {
                    p.post_context = Some(frontier.tokens[end..].to_vec());
                }
            }
        }
    }
}
