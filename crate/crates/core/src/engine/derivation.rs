//! The shared derivation forest. A [`Choice`] is one call of a category on a
//! substructure; each of its variants is a [`DerivationNode`] produced by a
//! different rule of the conflict set. A solution picks one variant for
//! every choice reachable from the root.

use std::collections::HashMap;
use std::fmt;

use crate::gil::{Atom, FeatureStructure, Symbol};
use crate::tgl::{Category, RuleId};

use super::features::{NodeId, Obligation};

pub type PreterminalId = usize;
pub type ChoiceId = usize;
pub type DNodeId = usize;
pub type BtId = usize;

/// Frontier element. Inflection calls stay symbolic until a solution is
/// read off, so agreement changes can be re-realized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Preterminal {
    Literal(String),
    Inflect {
        function: Symbol,
        args: Vec<Atom>,
        /// Feature node whose bound features are passed to the function.
        hook: NodeId,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    Token(PreterminalId),
    Child(ChoiceId),
    /// An optional call that contributed nothing.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct DerivationNode {
    pub rule: RuleId,
    pub choice: ChoiceId,
    pub feature_node: NodeId,
    /// In template order.
    pub items: Vec<Item>,
    pub obligations: Vec<Obligation>,
}

#[derive(Debug, Clone)]
pub struct Choice {
    pub category: Category,
    pub input: FeatureStructure,
    pub feature_node: NodeId,
    pub parent: Option<DNodeId>,
    pub conflict_set: Vec<RuleId>,
    /// Number of conflict-set rules fired so far, successful or not.
    pub tried: usize,
    pub variants: Vec<DNodeId>,
    pub bt: Option<BtId>,
}

impl Choice {
    pub fn remainder(&self) -> &[RuleId] {
        &self.conflict_set[self.tried..]
    }
}

#[derive(Debug, Clone, Default)]
pub struct Forest {
    pub preterminals: Vec<Preterminal>,
    pub nodes: Vec<DerivationNode>,
    pub choices: Vec<Choice>,
}

/// A concrete selection: variant index per reachable choice.
pub type Selection = HashMap<ChoiceId, usize>;

/// Frontier of one selection, with the token span each choice covers.
#[derive(Debug, Clone, Default)]
pub struct Frontier {
    pub tokens: Vec<PreterminalId>,
    pub spans: HashMap<ChoiceId, (usize, usize)>,
    /// Selected derivation nodes in preorder.
    pub nodes: Vec<DNodeId>,
}

impl Forest {
    pub fn choice(&self, id: ChoiceId) -> &Choice {
        &self.choices[id]
    }

    pub fn node(&self, id: DNodeId) -> &DerivationNode {
        &self.nodes[id]
    }

    /// Choice enclosing `c`, with the variant index that contains it.
    pub fn parent_of(&self, c: ChoiceId) -> Option<(ChoiceId, usize)> {
        let node = self.choices[c].parent?;
        let pc = self.nodes[node].choice;
        let idx = self.choices[pc].variants.iter().position(|&v| v == node)?;
        Some((pc, idx))
    }

    pub fn is_descendant(&self, c: ChoiceId, ancestor: ChoiceId) -> bool {
        let mut cur = Some(c);
        while let Some(x) = cur {
            if x == ancestor {
                return true;
            }
            cur = self.parent_of(x).map(|(p, _)| p);
        }
        false
    }

    /// Forces every choice on the path from the root to `c` to the variant
    /// containing it, and `c` itself to `variant`.
    pub fn path_selection(&self, c: ChoiceId, variant: usize) -> Selection {
        let mut sel = Selection::new();
        sel.insert(c, variant);
        let mut cur = c;
        while let Some((p, idx)) = self.parent_of(cur) {
            sel.insert(p, idx);
            cur = p;
        }
        sel
    }

    /// All complete selections below `root` that agree with `forced`.
    pub fn selections(&self, root: ChoiceId, forced: &Selection) -> Vec<Selection> {
        let choice = &self.choices[root];
        let range: Vec<usize> = match forced.get(&root) {
            Some(&v) => vec![v],
            None => (0..choice.variants.len()).collect(),
        };
        let mut out = Vec::new();
        for v in range {
            let node = &self.nodes[choice.variants[v]];
            let mut partial = vec![{
                let mut s = Selection::new();
                s.insert(root, v);
                s
            }];
            for item in &node.items {
                if let Item::Child(c) = item {
                    let subs = self.selections(*c, forced);
                    let mut next = Vec::with_capacity(partial.len() * subs.len());
                    for p in &partial {
                        for s in &subs {
                            let mut m = p.clone();
                            m.extend(s.iter().map(|(k, v)| (*k, *v)));
                            next.push(m);
                        }
                    }
                    partial = next;
                }
            }
            out.extend(partial);
        }
        out
    }

    pub fn frontier(&self, root: ChoiceId, sel: &Selection) -> Frontier {
        let mut f = Frontier::default();
        self.frontier_into(root, sel, &mut f);
        f
    }

    fn frontier_into(&self, c: ChoiceId, sel: &Selection, f: &mut Frontier) {
        let start = f.tokens.len();
        let v = sel.get(&c).copied().unwrap_or(0);
        let nid = self.choices[c].variants[v];
        f.nodes.push(nid);
        for item in &self.nodes[nid].items {
            match item {
                Item::Token(t) => f.tokens.push(*t),
                Item::Child(ch) => self.frontier_into(*ch, sel, f),
                Item::Skipped => {}
            }
        }
        f.spans.insert(c, (start, f.tokens.len()));
    }

    pub fn tree(&self, root: ChoiceId, sel: &Selection, rules: &[crate::tgl::Rule], words: &[String]) -> DerivationTree {
        let mut it = words.iter();
        self.tree_into(root, sel, rules, &mut it)
    }

    fn tree_into<'w>(
        &self,
        c: ChoiceId,
        sel: &Selection,
        rules: &[crate::tgl::Rule],
        words: &mut impl Iterator<Item = &'w String>,
    ) -> DerivationTree {
        let v = sel.get(&c).copied().unwrap_or(0);
        let node = &self.nodes[self.choices[c].variants[v]];
        let children = node
            .items
            .iter()
            .map(|item| match item {
                Item::Token(_) => TreeChild::Token(words.next().cloned().unwrap_or_default()),
                Item::Child(ch) => TreeChild::Node(self.tree_into(*ch, sel, rules, words)),
                Item::Skipped => TreeChild::Skipped,
            })
            .collect();
        DerivationTree {
            category: self.choices[c].category.clone(),
            rule: rules[node.rule].name.clone(),
            children,
        }
    }
}

/// A materialized solution tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTree {
    pub category: Category,
    pub rule: String,
    pub children: Vec<TreeChild>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeChild {
    Token(String),
    Node(DerivationTree),
    Skipped,
}

impl DerivationTree {
    /// Rule names in preorder.
    pub fn rules(&self) -> Vec<&str> {
        let mut out = vec![self.rule.as_str()];
        for c in &self.children {
            if let TreeChild::Node(n) = c {
                out.extend(n.rules());
            }
        }
        out
    }

    /// The category skeleton, as (category, child categories) pairs.
    pub fn skeleton(&self) -> Vec<(Category, Vec<Category>)> {
        let kids: Vec<&DerivationTree> = self
            .children
            .iter()
            .filter_map(|c| match c {
                TreeChild::Node(n) => Some(n),
                _ => None,
            })
            .collect();
        let mut out = vec![(self.category.clone(), kids.iter().map(|k| k.category.clone()).collect())];
        for k in kids {
            out.extend(k.skeleton());
        }
        out
    }
}

impl fmt::Display for DerivationTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} \"{}\"", self.category, self.rule)?;
        for c in &self.children {
            match c {
                TreeChild::Token(t) => write!(f, " {t:?}")?,
                TreeChild::Node(n) => write!(f, " {n}")?,
                TreeChild::Skipped => f.write_str(" -")?,
            }
        }
        f.write_str(")")
    }
}

/// Joins realized tokens with single spaces; no space is added next to a
/// token that ends or starts with a tab or newline. Empty tokens vanish.
pub fn join_tokens<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for t in tokens.iter().map(AsRef::as_ref).filter(|t| !t.is_empty()) {
        let glue = !out.is_empty() && !out.ends_with(['\t', '\n']) && !t.starts_with(['\t', '\n']);
        if glue {
            out.push(' ');
        }
        out.push_str(t);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joining() {
        assert_eq!(join_tokens::<&str>(&[]), "");
        assert_eq!(join_tokens(&["Sie", "am Freitag", "treffen"]), "Sie am Freitag treffen");
        assert_eq!(join_tokens(&["a\t", "b", "\n", "c", ""]), "a\tb\nc");
        assert_eq!(join_tokens(&["", "x"]), "x");
    }
}
