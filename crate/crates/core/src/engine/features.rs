//! Agreement features: one variable per (constituent node, feature), grouped
//! into equivalence classes by equations. Every mutation is logged so the
//! graph can be rolled back to any earlier mark.

use std::collections::{BTreeMap, HashMap};

use crate::gil::{Atom, Symbol};

/// Identifies the feature node of one constituent.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot overwrite {feature}={existing} with {attempted}")]
pub struct ConstraintError {
    pub feature: Symbol,
    pub existing: Atom,
    pub attempted: Atom,
}

/// A constraint equation with constituent references resolved to nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Obligation {
    Assign { node: NodeId, feature: Symbol, value: Atom },
    Equate { feature: Symbol, nodes: Vec<NodeId> },
}

impl Obligation {
    pub fn remap(&self, f: impl Fn(NodeId) -> NodeId) -> Obligation {
        match self {
            Obligation::Assign { node, feature, value } => Obligation::Assign {
                node: f(*node),
                feature: feature.clone(),
                value: value.clone(),
            },
            Obligation::Equate { feature, nodes } => Obligation::Equate {
                feature: feature.clone(),
                nodes: nodes.iter().map(|n| f(*n)).collect(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Var {
    parent: usize,
    size: usize,
    value: Option<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Event {
    Created(NodeId, Symbol),
    Bound(usize),
    Linked { child: usize, root: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FeatureMark(usize);

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureGraph {
    vars: Vec<Var>,
    index: HashMap<(NodeId, Symbol), usize>,
    by_node: HashMap<NodeId, Vec<(Symbol, usize)>>,
    log: Vec<Event>,
}

impl FeatureGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn var(&mut self, node: NodeId, feature: &Symbol) -> usize {
        if let Some(&v) = self.index.get(&(node, feature.clone())) {
            return v;
        }
        let v = self.vars.len();
        self.vars.push(Var {
            parent: v,
            size: 1,
            value: None,
        });
        self.index.insert((node, feature.clone()), v);
        self.by_node.entry(node).or_default().push((feature.clone(), v));
        self.log.push(Event::Created(node, feature.clone()));
        v
    }

    fn find(&self, mut v: usize) -> usize {
        while self.vars[v].parent != v {
            v = self.vars[v].parent;
        }
        v
    }

    pub fn value(&self, node: NodeId, feature: &Symbol) -> Option<&Atom> {
        let v = *self.index.get(&(node, feature.clone()))?;
        self.vars[self.find(v)].value.as_ref()
    }

    /// Bound features visible at `node`.
    pub fn features_of(&self, node: NodeId) -> BTreeMap<Symbol, Atom> {
        self.by_node
            .get(&node)
            .into_iter()
            .flatten()
            .filter_map(|(f, v)| Some((f.clone(), self.vars[self.find(*v)].value.clone()?)))
            .collect()
    }

    pub fn same_class(&self, a: (NodeId, &Symbol), b: (NodeId, &Symbol)) -> bool {
        match (self.index.get(&(a.0, a.1.clone())), self.index.get(&(b.0, b.1.clone()))) {
            (Some(&x), Some(&y)) => self.find(x) == self.find(y),
            _ => false,
        }
    }

    /// Binds the class of `node.feature`. Rebinding the same atom is a
    /// no-op; a different atom is an overwrite error.
    pub fn bind(&mut self, node: NodeId, feature: &Symbol, value: Atom) -> Result<(), ConstraintError> {
        let v = self.var(node, feature);
        let r = self.find(v);
        match &self.vars[r].value {
            Some(existing) if *existing == value => Ok(()),
            Some(existing) => Err(ConstraintError {
                feature: feature.clone(),
                existing: existing.clone(),
                attempted: value,
            }),
            None => {
                self.vars[r].value = Some(value);
                self.log.push(Event::Bound(r));
                Ok(())
            }
        }
    }

    /// Merges the classes of `feature` at `a` and `b`.
    pub fn equate(&mut self, feature: &Symbol, a: NodeId, b: NodeId) -> Result<(), ConstraintError> {
        let (va, vb) = (self.var(a, feature), self.var(b, feature));
        let (ra, rb) = (self.find(va), self.find(vb));
        if ra == rb {
            return Ok(());
        }
        if let (Some(x), Some(y)) = (&self.vars[ra].value, &self.vars[rb].value) {
            if x != y {
                return Err(ConstraintError {
                    feature: feature.clone(),
                    existing: x.clone(),
                    attempted: y.clone(),
                });
            }
        }
        let (child, root) = if self.vars[ra].size < self.vars[rb].size {
            (ra, rb)
        } else {
            (rb, ra)
        };
        if self.vars[root].value.is_none() {
            if let Some(v) = self.vars[child].value.clone() {
                self.vars[root].value = Some(v);
                self.log.push(Event::Bound(root));
            }
        }
        self.vars[child].parent = root;
        self.vars[root].size += self.vars[child].size;
        self.log.push(Event::Linked { child, root });
        Ok(())
    }

    pub fn apply(&mut self, ob: &Obligation) -> Result<(), ConstraintError> {
        match ob {
            Obligation::Assign { node, feature, value } => self.bind(*node, feature, value.clone()),
            Obligation::Equate { feature, nodes } => {
                for pair in nodes.windows(2) {
                    self.equate(feature, pair[0], pair[1])?;
                }
                Ok(())
            }
        }
    }

    pub fn mark(&self) -> FeatureMark {
        FeatureMark(self.log.len())
    }

    pub fn undo_to(&mut self, mark: FeatureMark) {
        while self.log.len() > mark.0 {
            match self.log.pop().expect("log longer than mark") {
                Event::Created(node, feature) => {
                    self.index.remove(&(node, feature));
                    let list = self.by_node.get_mut(&node).expect("node has vars");
                    list.pop();
                    if list.is_empty() {
                        self.by_node.remove(&node);
                    }
                    self.vars.pop();
                }
                Event::Bound(r) => self.vars[r].value = None,
                Event::Linked { child, root } => {
                    self.vars[child].parent = child;
                    self.vars[root].size -= self.vars[child].size;
                }
            }
        }
    }

    pub fn log_len(&self) -> usize {
        self.log.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty() && self.log.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Symbol {
        Symbol::new(x)
    }

    #[test]
    fn overwrite_is_an_error() {
        let mut g = FeatureGraph::new();
        g.bind(1, &s("CASE"), Atom::sym("akk")).unwrap();
        g.bind(1, &s("CASE"), Atom::sym("AKK")).unwrap();
        let e = g.bind(1, &s("CASE"), Atom::sym("nom")).unwrap_err();
        assert_eq!(e.existing, Atom::sym("akk"));
    }

    #[test]
    fn percolation_by_equality() {
        let mut g = FeatureGraph::new();
        g.equate(&s("NUM"), 0, 1).unwrap();
        g.bind(0, &s("NUM"), Atom::sym("sg")).unwrap();
        assert_eq!(g.value(1, &s("NUM")), Some(&Atom::sym("sg")));
        assert_eq!(g.features_of(1).len(), 1);
        g.bind(2, &s("NUM"), Atom::sym("pl")).unwrap();
        assert!(g.equate(&s("NUM"), 2, 1).is_err());
    }

    #[test]
    fn undo_restores_bindings() {
        let mut g = FeatureGraph::new();
        g.bind(1, &s("CASE"), Atom::sym("akk")).unwrap();
        let m2 = g.mark();
        g.bind(1, &s("NUM"), Atom::sym("sg")).unwrap();
        g.undo_to(m2);
        assert_eq!(g.value(1, &s("CASE")), Some(&Atom::sym("akk")));
        assert_eq!(g.value(1, &s("NUM")), None);
    }

    #[test]
    fn undo_separates_merged_classes() {
        let mut g = FeatureGraph::new();
        let fresh = g.clone();
        let m = g.mark();
        g.bind(3, &s("NUM"), Atom::sym("pl")).unwrap();
        let before_merge = g.clone();
        let m2 = g.mark();
        g.equate(&s("NUM"), 1, 3).unwrap();
        assert!(g.same_class((1, &s("NUM")), (3, &s("NUM"))));
        assert_eq!(g.value(1, &s("NUM")), Some(&Atom::sym("pl")));
        g.undo_to(m2);
        assert!(!g.same_class((1, &s("NUM")), (3, &s("NUM"))));
        assert_eq!(g, before_merge);
        g.undo_to(m);
        assert_eq!(g, fresh);
    }
}
