//! The interpreter: matching, conflict resolution and firing, top-down and
//! depth-first, with a table of backtrack points from which further
//! solutions are read off on demand.
//!
//! Generation builds a shared forest. Each rule call becomes a [`Choice`]
//! whose first succeeding rule is fired immediately; the rest of its
//! conflict set stays in the backtrack table. A solution is one selection
//! of variants. Constraint equations are checked per rule when it fires
//! and again over the whole selection when the solution is assembled, so
//! agreement across constituents filters combinations rather than
//! structure.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_rational::Ratio;

use crate::backtrack::{BtTable, MemoCache, RealizationCache};
use crate::gil::{Atom, FeatureStructure, Symbol, Value};
use crate::morpho::MorphoError;
use crate::prefs::{choose_backtrack_point, order_conflict_set, solution_weight, CriteriaSpec};
use crate::registry::{Function, Memory, Registry};
use crate::scalar::Weight;
use crate::tgl::{
    eval_selector, eval_test, resolve_args, Action, Category, ConstituentRef, ConstraintEquation, EvalError, Grammar,
    Rule, RuleId,
};

use super::derivation::{
    join_tokens, BtId, Choice, ChoiceId, DNodeId, DerivationNode, DerivationTree, Forest, Item, Preterminal,
    PreterminalId, Selection,
};
use super::features::{ConstraintError, FeatureGraph, FeatureMark, NodeId, Obligation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    pub memo: bool,
    /// Nesting limit for rule calls; exceeding it is an error.
    pub max_depth: usize,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions {
            memo: true,
            max_depth: 64,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stats {
    pub rules_fired: usize,
    pub rules_failed: usize,
    pub memo_hits: usize,
    pub realizations: usize,
    pub re_realizations: usize,
    pub bt_created: usize,
    pub bt_expanded: usize,
    pub combinations_rejected: usize,
    pub solutions: usize,
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "solutions: {}", self.solutions)?;
        writeln!(f, "rules fired: {}", self.rules_fired)?;
        writeln!(f, "rules failed: {}", self.rules_failed)?;
        writeln!(f, "memo hits: {}", self.memo_hits)?;
        writeln!(f, "realizations: {}", self.realizations)?;
        writeln!(f, "re-realizations: {}", self.re_realizations)?;
        writeln!(f, "backtrack points created: {}", self.bt_created)?;
        writeln!(f, "backtrack points expanded: {}", self.bt_expanded)?;
        write!(f, "combinations rejected: {}", self.combinations_rejected)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    RuleFired { rule: String, category: Category, depth: usize },
    RuleFailed { rule: String, reason: String },
    BtCreated { id: BtId, category: Category, size: usize },
    BtExpanded { id: BtId, rule: String },
    MemoHit { category: Category },
    Rejected { reason: String },
    Solution { index: usize, text: String },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::RuleFired { rule, category, depth } => {
                write!(f, "{:indent$}fire {category} \"{rule}\"", "", indent = depth * 2)
            }
            TraceEvent::RuleFailed { rule, reason } => write!(f, "fail \"{rule}\": {reason}"),
            TraceEvent::BtCreated { id, category, size } => write!(f, "bt B{id} {category} ({size} rules)"),
            TraceEvent::BtExpanded { id, rule } => write!(f, "expand B{id} with \"{rule}\""),
            TraceEvent::MemoHit { category } => write!(f, "memo {category}"),
            TraceEvent::Rejected { reason } => write!(f, "reject: {reason}"),
            TraceEvent::Solution { index, text } => write!(f, "solution {index}: {text}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Morpho(#[from] MorphoError),
    #[error("rule calls nested deeper than {depth} at category {category}")]
    DepthExceeded { category: Category, depth: usize },
    #[error("unknown trail mark")]
    UnknownMark,
    #[error("generation has already started")]
    AlreadyStarted,
}

/// One realized solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<W> {
    pub text: String,
    pub tokens: Vec<String>,
    pub tree: DerivationTree,
    /// Applied rule names in preorder.
    pub rules: Vec<String>,
    /// Global weight, when criteria are active.
    pub weight: Option<W>,
}

/// A position in the generator's undo history.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark {
    trail: usize,
    features: FeatureMark,
    frontier: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum TrailEvent {
    SideEffect { name: Symbol, args: Vec<Atom> },
    BtCreated { id: BtId, choice: ChoiceId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Running,
    Done,
}

type TraceFn<'a> = Box<dyn FnMut(&TraceEvent) + 'a>;

pub struct Generator<'a, W: Weight = Ratio<i64>> {
    grammar: &'a Grammar,
    reg: &'a Registry,
    criteria: Option<&'a CriteriaSpec<W>>,
    opts: GenOptions,
    input: FeatureStructure,
    start: Category,
    forest: Forest,
    table: BtTable,
    memo: MemoCache,
    features: FeatureGraph,
    memory: Memory,
    trail: Vec<TrailEvent>,
    realized: RealizationCache,
    stats: Stats,
    trace: Option<TraceFn<'a>>,
    next_node: NodeId,
    frontier: Vec<PreterminalId>,
    ego_stack: Vec<(BtId, usize)>,
    effects_run: usize,
    root: Option<ChoiceId>,
    pending: VecDeque<Selection>,
    phase: Phase,
    start_mark: Option<Mark>,
    fire_log: Vec<(RuleId, ChoiceId)>,
}

impl<'a, W: Weight> Generator<'a, W> {
    pub fn new(grammar: &'a Grammar, reg: &'a Registry, input: FeatureStructure, opts: GenOptions) -> Self {
        Generator {
            grammar,
            reg,
            criteria: None,
            opts,
            input,
            start: grammar.start.clone(),
            forest: Forest::default(),
            table: BtTable::new(),
            memo: MemoCache::default(),
            features: FeatureGraph::new(),
            memory: Memory::new(),
            trail: Vec::new(),
            realized: RealizationCache::new(),
            stats: Stats::default(),
            trace: None,
            next_node: 0,
            frontier: Vec::new(),
            ego_stack: Vec::new(),
            effects_run: 0,
            root: None,
            pending: VecDeque::new(),
            phase: Phase::Fresh,
            start_mark: None,
            fire_log: Vec::new(),
        }
    }

    pub fn with_criteria(mut self, spec: Option<&'a CriteriaSpec<W>>) -> Self {
        self.criteria = spec;
        self
    }

    pub fn with_start(mut self, start: Category) -> Self {
        self.start = start;
        self
    }

    pub fn with_trace(mut self, f: impl FnMut(&TraceEvent) + 'a) -> Self {
        self.trace = Some(Box::new(f));
        self
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    pub fn table(&self) -> &BtTable {
        &self.table
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn features(&self) -> &FeatureGraph {
        &self.features
    }

    pub fn memory(&self) -> &Memory {
        &self.memory
    }

    pub fn trail_len(&self) -> usize {
        self.trail.len()
    }

    pub fn root(&self) -> Option<ChoiceId> {
        self.root
    }

    /// Every rule firing so far with the choice it fired for.
    pub fn fire_log(&self) -> &[(RuleId, ChoiceId)] {
        &self.fire_log
    }

    fn emit(&mut self, ev: impl FnOnce() -> TraceEvent) {
        if let Some(t) = self.trace.as_mut() {
            t(&ev());
        }
    }

    fn fresh_node(&mut self) -> NodeId {
        let n = self.next_node;
        self.next_node += 1;
        n
    }

    pub fn mark(&self) -> Mark {
        Mark {
            trail: self.trail.len(),
            features: self.features.mark(),
            frontier: self.frontier.len(),
        }
    }

    /// Rolls back side effects, backtrack-point creation and feature
    /// bindings made since `m`.
    pub fn undo_to(&mut self, m: Mark) -> Result<(), GenError> {
        if m.trail > self.trail.len() || m.features > self.features.mark() {
            return Err(GenError::UnknownMark);
        }
        self.rollback(m);
        Ok(())
    }

    fn rollback(&mut self, m: Mark) {
        while self.trail.len() > m.trail {
            match self.trail.pop().expect("trail longer than mark") {
                TrailEvent::SideEffect { name, args } => {
                    let reg = self.reg;
                    if let Some(Function::SideEffect { undo, .. }) = reg.function(&name) {
                        undo(&mut self.memory, &args);
                    }
                }
                TrailEvent::BtCreated { id, choice } => {
                    self.table.remove(id);
                    self.forest.choices[choice].bt = None;
                }
            }
        }
        self.features.undo_to(m.features);
        self.frontier.truncate(m.frontier);
    }

    /// Rules of `cat` whose test holds on `fs`, in preference order.
    pub fn match_rules(&self, cat: &Category, fs: &FeatureStructure) -> Result<Vec<RuleId>, EvalError> {
        let cs = match_rules(self.grammar, self.reg, cat, fs)?;
        Ok(match self.criteria {
            Some(spec) => order_conflict_set(&cs, self.grammar, spec),
            None => cs,
        })
    }

    fn record_bt(&mut self, c: ChoiceId) {
        let parent = self.ego_stack.last().copied();
        let id = self.table.record(c, self.frontier.clone(), parent);
        self.forest.choices[c].bt = Some(id);
        self.trail.push(TrailEvent::BtCreated { id, choice: c });
        self.stats.bt_created += 1;
        let (category, size) = (self.forest.choices[c].category.clone(), self.forest.choices[c].conflict_set.len());
        self.emit(|| TraceEvent::BtCreated { id, category, size });
    }

    fn call(
        &mut self,
        cat: &Category,
        fs: FeatureStructure,
        fnode: NodeId,
        parent: Option<DNodeId>,
        depth: usize,
    ) -> Result<ChoiceId, GenError> {
        if depth > self.opts.max_depth {
            return Err(GenError::DepthExceeded {
                category: cat.clone(),
                depth: self.opts.max_depth,
            });
        }
        if self.opts.memo {
            if let Some(src) = self.memo.lookup(cat, &fs) {
                self.stats.memo_hits += 1;
                self.emit(|| TraceEvent::MemoHit { category: cat.clone() });
                let mut map = HashMap::from([(self.forest.choices[src].feature_node, fnode)]);
                return Ok(self.copy_choice(src, parent, &mut map));
            }
        }
        let cs = self.match_rules(cat, &fs)?;
        let c = self.forest.choices.len();
        self.forest.choices.push(Choice {
            category: cat.clone(),
            input: fs.clone(),
            feature_node: fnode,
            parent,
            conflict_set: cs,
            tried: 0,
            variants: Vec::new(),
            bt: None,
        });
        if self.forest.choices[c].conflict_set.len() >= 2 {
            self.record_bt(c);
        }
        let effects = self.effects_run;
        while !self.forest.choices[c].remainder().is_empty() {
            let r = self.forest.choices[c].remainder()[0];
            self.forest.choices[c].tried += 1;
            if self.fire(c, r, depth)? {
                break;
            }
            if let Some(bt) = self.forest.choices[c].bt {
                if let Some(p) = self.table.get_mut(bt) {
                    p.failed.push(r);
                }
            }
        }
        if self.opts.memo && effects == self.effects_run && !self.forest.choices[c].variants.is_empty() {
            self.memo.store(cat, &fs, c);
        }
        Ok(c)
    }

    /// Splices a copy of the subderivation under `src`, with fresh feature
    /// nodes and its own backtrack points.
    fn copy_choice(&mut self, src: ChoiceId, parent: Option<DNodeId>, map: &mut HashMap<NodeId, NodeId>) -> ChoiceId {
        let s = self.forest.choices[src].clone();
        let fnode = self.remap(map, s.feature_node);
        let c = self.forest.choices.len();
        self.forest.choices.push(Choice {
            parent,
            feature_node: fnode,
            variants: Vec::new(),
            bt: None,
            ..s.clone()
        });
        if s.conflict_set.len() >= 2 {
            self.record_bt(c);
        }
        let base = self.frontier.len();
        for (vi, &v) in s.variants.iter().enumerate() {
            let saved = (vi > 0).then(|| self.frontier.split_off(base));
            if let Some(bt) = self.forest.choices[c].bt {
                self.ego_stack.push((bt, vi));
            }
            let orig = self.forest.nodes[v].clone();
            for ob in &orig.obligations {
                let ids: Vec<NodeId> = match ob {
                    Obligation::Assign { node, .. } => vec![*node],
                    Obligation::Equate { nodes, .. } => nodes.clone(),
                };
                for id in ids {
                    self.remap(map, id);
                }
            }
            let obligations = orig.obligations.iter().map(|o| o.remap(|n| map[&n])).collect();
            let nid = self.forest.nodes.len();
            self.forest.nodes.push(DerivationNode {
                rule: orig.rule,
                choice: c,
                feature_node: fnode,
                items: Vec::new(),
                obligations,
            });
            let mut items = Vec::with_capacity(orig.items.len());
            for item in &orig.items {
                items.push(match *item {
                    Item::Token(t) => {
                        let pt = match &self.forest.preterminals[t] {
                            Preterminal::Inflect { function, args, hook } => Preterminal::Inflect {
                                function: function.clone(),
                                args: args.clone(),
                                hook: map.get(hook).copied().unwrap_or(fnode),
                            },
                            lit => lit.clone(),
                        };
                        Item::Token(self.push_token(pt))
                    }
                    Item::Child(ch) => Item::Child(self.copy_choice(ch, Some(nid), map)),
                    Item::Skipped => Item::Skipped,
                });
            }
            self.forest.nodes[nid].items = items;
            self.forest.choices[c].variants.push(nid);
            if self.forest.choices[c].bt.is_some() {
                self.ego_stack.pop();
            }
            if let Some(saved) = saved {
                self.frontier.truncate(base);
                self.frontier.extend(saved);
            }
        }
        c
    }

    fn remap(&mut self, map: &mut HashMap<NodeId, NodeId>, old: NodeId) -> NodeId {
        if let Some(&n) = map.get(&old) {
            return n;
        }
        let n = self.fresh_node();
        map.insert(old, n);
        n
    }

    fn push_token(&mut self, pt: Preterminal) -> PreterminalId {
        let id = self.forest.preterminals.len();
        self.forest.preterminals.push(pt);
        self.frontier.push(id);
        id
    }

    fn depth_of(&self, mut c: ChoiceId) -> usize {
        let mut d = 0;
        while let Some(n) = self.forest.choices[c].parent {
            c = self.forest.nodes[n].choice;
            d += 1;
        }
        d
    }

    /// Fires rule `r` for choice `c`. On failure all effects are undone and
    /// `false` is returned; on success a new variant is added to `c`.
    fn fire(&mut self, c: ChoiceId, r: RuleId, depth: usize) -> Result<bool, GenError> {
        let g = self.grammar;
        let rule = g.rule(r);
        let mark = self.mark();
        self.stats.rules_fired += 1;
        self.fire_log.push((r, c));
        let category = rule.category.clone();
        self.emit(|| TraceEvent::RuleFired {
            rule: rule.name.clone(),
            category,
            depth,
        });
        let ego = self.forest.choices[c].bt.map(|b| (b, self.forest.choices[c].variants.len()));
        if let Some(e) = ego {
            self.ego_stack.push(e);
        }
        let outcome = self.fire_body(c, r, rule, depth);
        if ego.is_some() {
            self.ego_stack.pop();
        }
        match outcome? {
            Ok(nid) => {
                self.forest.choices[c].variants.push(nid);
                Ok(true)
            }
            Err(reason) => {
                self.rollback(mark);
                self.stats.rules_failed += 1;
                self.emit(|| TraceEvent::RuleFailed {
                    rule: rule.name.clone(),
                    reason,
                });
                Ok(false)
            }
        }
    }

    fn fire_body(&mut self, c: ChoiceId, r: RuleId, rule: &Rule, depth: usize) -> Result<Result<DNodeId, String>, GenError> {
        let fs = self.forest.choices[c].input.clone();
        let lhs = self.forest.choices[c].feature_node;

        let reg = self.reg;
        for se in &rule.side_effects {
            let Some(Function::SideEffect { apply, .. }) = reg.function(&se.name) else {
                return Ok(Err(format!("`{}` is not a side effect", se.name)));
            };
            let Some(args) = atom_args(&resolve_args(&se.args, &fs)) else {
                return Ok(Err(format!("arguments of `{}` do not resolve to atoms", se.name)));
            };
            apply(&mut self.memory, &args);
            self.trail.push(TrailEvent::SideEffect {
                name: se.name.clone(),
                args,
            });
            self.effects_run += 1;
            self.memo.clear();
        }

        let child_nodes: Vec<Option<NodeId>> = rule
            .template
            .iter()
            .map(|a| a.called_category().map(|_| self.fresh_node()))
            .collect();
        let obligations = match resolve_obligations(rule, lhs, &child_nodes) {
            Ok(obs) => obs,
            Err(r) => return Ok(Err(format!("constituent {r} does not resolve"))),
        };
        if let Err(e) = check_consistent(&mut self.features, &obligations) {
            return Ok(Err(e.to_string()));
        }

        let nid = self.forest.nodes.len();
        self.forest.nodes.push(DerivationNode {
            rule: r,
            choice: c,
            feature_node: lhs,
            items: Vec::new(),
            obligations,
        });
        let mut items = Vec::with_capacity(rule.template.len());
        for (i, action) in rule.template.iter().enumerate() {
            match action {
                Action::Literal(s) => items.push(Item::Token(self.push_token(Preterminal::Literal(s.clone())))),
                Action::FunCall(call) => {
                    if self.reg.inflect_fn(&call.name).is_none() {
                        return Ok(Err(format!("`{}` is not an inflection function", call.name)));
                    }
                    let Some(args) = atom_args(&resolve_args(&call.args, &fs)) else {
                        return Ok(Err(format!("arguments of `{}` do not resolve to atoms", call.name)));
                    };
                    let pt = Preterminal::Inflect {
                        function: call.name.clone(),
                        args,
                        hook: lhs,
                    };
                    items.push(Item::Token(self.push_token(pt)));
                }
                Action::RuleCall(cat, sel) | Action::OptRuleCall(cat, sel) => {
                    let optional = matches!(action, Action::OptRuleCall(..));
                    let node = child_nodes[i].expect("rule calls have child nodes");
                    let Some(sub) = eval_selector(sel, &fs, self.reg)? else {
                        if optional {
                            items.push(Item::Skipped);
                            continue;
                        }
                        return Ok(Err(format!("no substructure for {cat}")));
                    };
                    let child = self.call(cat, sub, node, Some(nid), depth + 1)?;
                    if !self.forest.choices[child].variants.is_empty() {
                        items.push(Item::Child(child));
                    } else if optional {
                        items.push(Item::Skipped);
                    } else {
                        return Ok(Err(format!("no derivation for {cat}")));
                    }
                }
            }
        }
        self.forest.nodes[nid].items = items;
        Ok(Ok(nid))
    }

    fn start(&mut self, single_rule: Option<RuleId>) -> Result<(), GenError> {
        if self.phase != Phase::Fresh {
            return Err(GenError::AlreadyStarted);
        }
        self.phase = Phase::Running;
        self.start_mark = Some(self.mark());
        let node = self.fresh_node();
        let root = match single_rule {
            None => {
                let start = self.start.clone();
                self.call(&start, self.input.clone(), node, None, 0)?
            }
            Some(r) => {
                let c = self.forest.choices.len();
                self.forest.choices.push(Choice {
                    category: self.grammar.rule(r).category.clone(),
                    input: self.input.clone(),
                    feature_node: node,
                    parent: None,
                    conflict_set: vec![r],
                    tried: 1,
                    variants: Vec::new(),
                    bt: None,
                });
                self.fire(c, r, 0)?;
                c
            }
        };
        self.root = Some(root);
        self.pending.extend(self.forest.selections(root, &Selection::new()));
        Ok(())
    }

    /// Fires one rule directly on the input, bypassing matching, and
    /// returns the first solution through it. Later calls to
    /// [`Generator::next_solution`] enumerate the remaining ones.
    pub fn fire_rule(&mut self, rule: RuleId) -> Result<Option<Solution<W>>, GenError> {
        self.start(Some(rule))?;
        self.next_solution()
    }

    fn expand(&mut self, bt: BtId) -> Result<(), GenError> {
        let p = self.table.get_mut(bt).expect("chosen point exists");
        p.expansions += 1;
        let c = p.choice;
        self.frontier = p.pre_context.clone();
        self.stats.bt_expanded += 1;
        let r = self.forest.choices[c].remainder()[0];
        let name = self.grammar.rule(r).name.clone();
        self.emit(|| TraceEvent::BtExpanded { id: bt, rule: name });
        let idx = self.forest.choices[c].variants.len();
        self.forest.choices[c].tried += 1;
        let depth = self.depth_of(c);
        if self.fire(c, r, depth)? {
            let root = self.root.expect("expansion after start");
            let forced = self.forest.path_selection(c, idx);
            self.pending.extend(self.forest.selections(root, &forced));
        } else if let Some(p) = self.table.get_mut(bt) {
            p.failed.push(r);
        }
        self.frontier.clear();
        Ok(())
    }

    fn assemble(&mut self, sel: &Selection) -> Result<Option<Solution<W>>, GenError> {
        let root = self.root.expect("assembly after start");
        let fr = self.forest.frontier(root, sel);
        let fm = self.features.mark();
        for &n in &fr.nodes {
            for ob in &self.forest.nodes[n].obligations {
                if let Err(e) = self.features.apply(ob) {
                    self.features.undo_to(fm);
                    self.stats.combinations_rejected += 1;
                    self.emit(|| TraceEvent::Rejected { reason: e.to_string() });
                    return Ok(None);
                }
            }
        }
        let words = self
            .realized
            .recompute_affected(&fr.tokens, &self.forest.preterminals, &self.features, self.reg);
        self.features.undo_to(fm);
        let words = words?;
        self.stats.realizations = self.realized.realizations;
        self.stats.re_realizations = self.realized.re_realizations;
        self.table.fill_post_contexts(&fr);
        let rules: Vec<String> = fr
            .nodes
            .iter()
            .map(|&n| self.grammar.rule(self.forest.nodes[n].rule).name.clone())
            .collect();
        let tree = self.forest.tree(root, sel, &self.grammar.rules, &words);
        let text = join_tokens(&words);
        let weight = self.criteria.map(|s| solution_weight(&rules, s));
        self.stats.solutions += 1;
        let index = self.stats.solutions;
        let shown = text.clone();
        self.emit(|| TraceEvent::Solution { index, text: shown });
        Ok(Some(Solution {
            text,
            tokens: words,
            tree,
            rules,
            weight,
        }))
    }

    /// Undoes everything back to the session start.
    fn finish(&mut self) {
        if let Some(m) = self.start_mark.take() {
            self.rollback(m);
        }
        self.pending.clear();
        self.memo.clear();
        self.phase = Phase::Done;
    }

    /// Produces the next solution on demand, or `None` once the table is
    /// exhausted. At that point the trail is empty again.
    pub fn next_solution(&mut self) -> Result<Option<Solution<W>>, GenError> {
        if self.phase == Phase::Fresh {
            self.start(None)?;
        }
        loop {
            if self.phase == Phase::Done {
                return Ok(None);
            }
            if let Some(sel) = self.pending.pop_front() {
                if let Some(sol) = self.assemble(&sel)? {
                    return Ok(Some(sol));
                }
                continue;
            }
            match choose_backtrack_point(&self.table, &self.forest, self.grammar, self.criteria) {
                Some(bt) => self.expand(bt)?,
                None => self.finish(),
            }
        }
    }
}

impl<W: Weight> Iterator for Generator<'_, W> {
    type Item = Result<Solution<W>, GenError>;

    fn next(&mut self) -> Option<Self::Item> {
        let out = self.next_solution().transpose();
        if matches!(out, Some(Err(_))) {
            self.finish();
        }
        out
    }
}

fn atom_args(vals: &[Option<Value>]) -> Option<Vec<Atom>> {
    vals.iter()
        .map(|v| v.as_ref().and_then(Value::as_atom).cloned())
        .collect()
}

/// Rules of `cat` in source order whose test holds on `fs`.
pub fn match_rules(g: &Grammar, reg: &Registry, cat: &Category, fs: &FeatureStructure) -> Result<Vec<RuleId>, EvalError> {
    let mut out = Vec::new();
    for &r in g.rules_for(cat) {
        if eval_test(&g.rule(r).test, fs, reg)? {
            out.push(r);
        }
    }
    Ok(out)
}

/// Translates a rule's equations into obligations over concrete feature
/// nodes: `lhs` for the rule itself and `children[i]` for template
/// position `i`.
pub fn resolve_obligations(
    rule: &Rule,
    lhs: NodeId,
    children: &[Option<NodeId>],
) -> Result<Vec<Obligation>, ConstituentRef> {
    let node = |r: &ConstituentRef| -> Result<NodeId, ConstituentRef> {
        match rule.resolve_ref(r) {
            Ok(None) => Ok(lhs),
            Ok(Some(i)) => children.get(i).copied().flatten().ok_or_else(|| r.clone()),
            Err(r) => Err(r.clone()),
        }
    };
    rule.constraints
        .iter()
        .map(|eq| match eq {
            ConstraintEquation::Assign { feature, at, value } => Ok(Obligation::Assign {
                node: node(at)?,
                feature: feature.clone(),
                value: value.clone(),
            }),
            ConstraintEquation::Equate { feature, at } => Ok(Obligation::Equate {
                feature: feature.clone(),
                nodes: at.iter().map(node).collect::<Result<_, _>>()?,
            }),
        })
        .collect()
}

/// Asserts `obligations` on `graph`. On error the graph may be partially
/// updated; callers roll back to a mark.
pub fn apply_constraints(graph: &mut FeatureGraph, obligations: &[Obligation]) -> Result<(), ConstraintError> {
    obligations.iter().try_for_each(|o| graph.apply(o))
}

/// Checks that `obligations` are satisfiable on `graph` without keeping
/// their effect.
fn check_consistent(graph: &mut FeatureGraph, obligations: &[Obligation]) -> Result<(), ConstraintError> {
    let m = graph.mark();
    let out = apply_constraints(graph, obligations);
    graph.undo_to(m);
    out
}

/// Realizes a preterminal sequence under the current bindings.
pub fn realize(
    tokens: &[PreterminalId],
    preterminals: &[Preterminal],
    graph: &FeatureGraph,
    reg: &Registry,
) -> Result<String, MorphoError> {
    let words = RealizationCache::new().recompute_affected(tokens, preterminals, graph, reg)?;
    Ok(join_tokens(&words))
}
