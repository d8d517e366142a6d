#![allow(dead_code)]

use std::collections::HashMap;
use std::fmt::Write as _;
use std::rc::Rc;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tgl_core::morpho::{Lexicon, MorphoError};
use tgl_core::registry::Function;
use tgl_core::tgl::{eval_selector, eval_test, resolve_args, Action, ConstituentRef, ConstraintEquation, RuleId};
use tgl_core::{
    default_registry, inflect, parse_gil, parse_grammar, Atom, FeatureStructure, GenOptions, Generator, Grammar,
    InflectionRequest, Rational, Registry, Symbol, Value,
};

pub fn data(name: &str) -> String {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn grammar(name: &str) -> Grammar {
    parse_grammar(&data(name)).unwrap()
}

pub fn input(name: &str) -> FeatureStructure {
    parse_gil(&data(name)).unwrap()
}

/// Default registry plus `echo`, which prints its argument and every
/// feature it receives, so agreement is visible in the output.
pub fn test_registry() -> Registry {
    let mut reg = default_registry();
    reg.register_function(
        "echo",
        Arc::new(|req: &InflectionRequest, _: &Lexicon| -> Result<String, MorphoError> {
            let mut s = String::from("e");
            for a in &req.args {
                s.push_str(&a.key_text());
            }
            if !req.features.is_empty() {
                let fs: Vec<String> = req
                    .features
                    .iter()
                    .map(|(k, v)| format!("{}={}", k.canonical(), v.key_text()))
                    .collect();
                write!(s, "[{}]", fs.join(",")).unwrap();
            }
            Ok(s)
        }),
    )
    .unwrap();
    reg
}

/// All solutions as (applied rules in preorder, text), in stream order.
pub fn engine_solutions(g: &Grammar, reg: &Registry, fs: &FeatureStructure, opts: GenOptions) -> Vec<(Vec<String>, String)> {
    Generator::<Rational>::new(g, reg, fs.clone(), opts)
        .map(|s| {
            let s = s.unwrap();
            (s.rules, s.text)
        })
        .collect()
}

// ---------------------------------------------------------------------
// Naive oracle: enumerate every derivation tree from scratch, then solve
// the equations of each whole tree independently.

#[derive(Debug)]
enum OItem {
    Lit(String),
    Fun(Symbol, Vec<Atom>),
    Child(Rc<OTree>),
    Skip,
}

#[derive(Debug)]
struct OTree {
    rule: RuleId,
    items: Vec<OItem>,
}

#[derive(Default)]
struct Solver {
    vars: HashMap<(usize, String), usize>,
    parent: Vec<usize>,
    assigned: Vec<(usize, Atom)>,
}

impl Solver {
    fn var(&mut self, node: usize, f: &Symbol) -> usize {
        let n = self.parent.len();
        let v = *self.vars.entry((node, f.canonical())).or_insert(n);
        if v == n {
            self.parent.push(n);
        }
        v
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    /// Class values, or `None` if some class received two different atoms.
    fn solve(&self) -> Option<HashMap<usize, Atom>> {
        let mut vals: HashMap<usize, Atom> = HashMap::new();
        for (v, a) in &self.assigned {
            let r = self.find(*v);
            match vals.get(&r) {
                Some(b) if b != a => return None,
                _ => {
                    vals.insert(r, a.clone());
                }
            }
        }
        Some(vals)
    }

    fn add(&mut self, eq: &ConstraintEquation, node: &dyn Fn(&ConstituentRef) -> usize) {
        match eq {
            ConstraintEquation::Assign { feature, at, value } => {
                let v = self.var(node(at), feature);
                self.assigned.push((v, value.clone()));
            }
            ConstraintEquation::Equate { feature, at } => {
                let vs: Vec<usize> = at.iter().map(|r| self.var(node(r), feature)).collect();
                for w in vs.windows(2) {
                    self.union(w[0], w[1]);
                }
            }
        }
    }
}

fn ref_position(rule: &tgl_core::tgl::Rule, r: &ConstituentRef) -> Option<usize> {
    match r {
        ConstituentRef::Lhs => None,
        ConstituentRef::Rhs { category, occurrence } => rule
            .template
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, Action::RuleCall(c, _) | Action::OptRuleCall(c, _) if c == category))
            .nth(occurrence - 1)
            .map(|(i, _)| i),
    }
}

fn atoms(vals: Vec<Option<Value>>) -> Option<Vec<Atom>> {
    vals.into_iter()
        .map(|v| match v {
            Some(Value::Atom(a)) => Some(a),
            _ => None,
        })
        .collect()
}

fn enumerate(g: &Grammar, reg: &Registry, cat: &Symbol, fs: &FeatureStructure) -> Vec<Rc<OTree>> {
    let mut out = Vec::new();
    for r in 0..g.rules.len() {
        let rule = &g.rules[r];
        if rule.category != *cat || !eval_test(&rule.test, fs, reg).unwrap() {
            continue;
        }
        let effects_ok = rule.side_effects.iter().all(|se| {
            matches!(reg.function(&se.name), Some(Function::SideEffect { .. }))
                && atoms(resolve_args(&se.args, fs)).is_some()
        });
        if !effects_ok {
            continue;
        }
        let mut local = Solver::default();
        for eq in &rule.constraints {
            local.add(eq, &|c| ref_position(rule, c).map_or(0, |i| i + 1));
        }
        if local.solve().is_none() {
            continue;
        }
        // options per template position
        let mut options: Vec<Vec<Rc<OItemShared>>> = Vec::new();
        let mut dead = false;
        for a in &rule.template {
            let opts: Vec<Rc<OItemShared>> = match a {
                Action::Literal(s) => vec![Rc::new(OItemShared::Lit(s.clone()))],
                Action::FunCall(call) => match atoms(resolve_args(&call.args, fs)) {
                    Some(args) if reg.inflect_fn(&call.name).is_some() => {
                        vec![Rc::new(OItemShared::Fun(call.name.clone(), args))]
                    }
                    _ => vec![],
                },
                Action::RuleCall(c, sel) | Action::OptRuleCall(c, sel) => {
                    let optional = matches!(a, Action::OptRuleCall(..));
                    let trees = match eval_selector(sel, fs, reg).unwrap() {
                        Some(sub) => enumerate(g, reg, c, &sub),
                        None => vec![],
                    };
                    if trees.is_empty() && optional {
                        vec![Rc::new(OItemShared::Skip)]
                    } else {
                        trees.into_iter().map(|t| Rc::new(OItemShared::Child(t))).collect()
                    }
                }
            };
            if opts.is_empty() {
                dead = true;
                break;
            }
            options.push(opts);
        }
        if dead {
            continue;
        }
        let mut combos: Vec<Vec<Rc<OItemShared>>> = vec![vec![]];
        for opts in &options {
            combos = combos
                .iter()
                .flat_map(|c| {
                    opts.iter().map(move |o| {
                        let mut c = c.clone();
                        c.push(o.clone());
                        c
                    })
                })
                .collect();
        }
        for c in combos {
            let items = c
                .into_iter()
                .map(|o| match &*o {
                    OItemShared::Lit(s) => OItem::Lit(s.clone()),
                    OItemShared::Fun(n, a) => OItem::Fun(n.clone(), a.clone()),
                    OItemShared::Child(t) => OItem::Child(t.clone()),
                    OItemShared::Skip => OItem::Skip,
                })
                .collect();
            out.push(Rc::new(OTree { rule: r, items }));
        }
    }
    out
}

enum OItemShared {
    Lit(String),
    Fun(Symbol, Vec<Atom>),
    Child(Rc<OTree>),
    Skip,
}

type Token = Result<String, (Symbol, Vec<Atom>)>;

struct Flat {
    rules: Vec<String>,
    /// (literal or call, hook node)
    tokens: Vec<(Token, usize)>,
    solver: Solver,
    next: usize,
}

fn flatten(g: &Grammar, t: &OTree, lhs: usize, f: &mut Flat) {
    let rule = &g.rules[t.rule];
    f.rules.push(rule.name.clone());
    let mut nodes = Vec::with_capacity(t.items.len());
    for a in &rule.template {
        nodes.push(if matches!(a, Action::RuleCall(..) | Action::OptRuleCall(..)) {
            f.next += 1;
            Some(f.next)
        } else {
            None
        });
    }
    for eq in &rule.constraints {
        let nodes = nodes.clone();
        f.solver
            .add(eq, &move |c| ref_position(rule, c).map_or(lhs, |i| nodes[i].unwrap()));
    }
    for (i, item) in t.items.iter().enumerate() {
        match item {
            OItem::Lit(s) => f.tokens.push((Ok(s.clone()), lhs)),
            OItem::Fun(n, a) => f.tokens.push((Err((n.clone(), a.clone())), lhs)),
            OItem::Child(c) => flatten(g, c, nodes[i].unwrap(), f),
            OItem::Skip => {}
        }
    }
}

/// Every solution the grammar admits, as (applied rules, text).
pub fn oracle_solutions(g: &Grammar, reg: &Registry, fs: &FeatureStructure) -> Vec<(Vec<String>, String)> {
    let mut out = Vec::new();
    for t in enumerate(g, reg, &g.start, fs) {
        let mut f = Flat {
            rules: vec![],
            tokens: vec![],
            solver: Solver::default(),
            next: 0,
        };
        flatten(g, &t, 0, &mut f);
        let Some(vals) = f.solver.solve() else {
            continue;
        };
        let words: Vec<String> = f
            .tokens
            .iter()
            .map(|(tok, hook)| match tok {
                Ok(s) => s.clone(),
                Err((name, args)) => {
                    let mut req = InflectionRequest::new(name.as_str(), args.clone());
                    for ((node, feat), v) in &f.solver.vars {
                        if node == hook {
                            if let Some(a) = vals.get(&f.solver.find(*v)) {
                                req = req.with(feat, a.clone());
                            }
                        }
                    }
                    inflect(&req, reg).unwrap()
                }
            })
            .filter(|w| !w.is_empty())
            .collect();
        out.push((f.rules, words.join(" ")));
    }
    out
}

/// Number of trees before the agreement filter, to skip explosive cases.
pub fn oracle_tree_count(g: &Grammar, reg: &Registry, fs: &FeatureStructure) -> usize {
    count(g, reg, &g.start, fs)
}

fn count(g: &Grammar, reg: &Registry, cat: &Symbol, fs: &FeatureStructure) -> usize {
    let mut total = 0usize;
    for rule in g.rules.iter().filter(|r| r.category == *cat) {
        if !eval_test(&rule.test, fs, reg).unwrap() {
            continue;
        }
        let mut n = 1usize;
        for a in &rule.template {
            if let Action::RuleCall(c, sel) | Action::OptRuleCall(c, sel) = a {
                let k = eval_selector(sel, fs, reg).unwrap().map_or(0, |sub| count(g, reg, c, &sub));
                n = n.saturating_mul(if k == 0 && matches!(a, Action::OptRuleCall(..)) { 1 } else { k });
            }
        }
        total = total.saturating_add(n);
    }
    total
}

// ---------------------------------------------------------------------
// Random layered grammars: categories of level k only call level > k, so
// derivations are at most `LEVELS` deep.

const LEVELS: usize = 5;

pub struct RandomCase {
    pub text: String,
    pub grammar: Grammar,
    pub input: FeatureStructure,
}

pub fn random_input(rng: &mut ChaCha8Rng) -> FeatureStructure {
    let depth = rng.gen_range(1..=4);
    let mut s = String::new();
    for _ in 0..depth {
        write!(s, "[(K {}) (SUB ", rng.gen_range(0..2)).unwrap();
    }
    write!(s, "[(K {})]", rng.gen_range(0..2)).unwrap();
    for _ in 0..depth {
        s.push_str(")]");
    }
    parse_gil(&s).unwrap()
}

pub fn random_case(rng: &mut ChaCha8Rng) -> RandomCase {
    let mut cats: Vec<Vec<String>> = vec![vec!["TXT".into()]];
    for k in 1..=LEVELS {
        let n = rng.gen_range(1..=2);
        cats.push((0..n).map(|i| format!("C{k}{}", (b'a' + i) as char)).collect());
    }
    let budget = rng.gen_range(6..=25);
    let mut text = String::new();
    let mut rule_no = 0;
    'outer: for (level, names) in cats.iter().enumerate() {
        for cat in names {
            let n = if rng.gen_bool(0.1) && level > 0 { 0 } else { rng.gen_range(1..=4) };
            for _ in 0..n {
                if rule_no >= budget {
                    break 'outer;
                }
                text.push_str(&random_rule(rng, rule_no, cat, level, &cats));
                rule_no += 1;
            }
        }
    }
    let grammar = parse_grammar(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
    RandomCase {
        text,
        grammar,
        input: random_input(rng),
    }
}

fn random_rule(rng: &mut ChaCha8Rng, no: usize, cat: &str, level: usize, cats: &[Vec<String>]) -> String {
    let test = match rng.gen_range(0..20) {
        0..=11 => "(TRUE)".to_string(),
        12..=16 => format!("(EQ K {})", rng.gen_range(0..2)),
        17..=18 => format!("(NOT (EQ K {}))", rng.gen_range(0..2)),
        _ => "(NOT (TRUE))".to_string(),
    };
    let mut actions = Vec::new();
    let mut calls: Vec<(String, usize)> = Vec::new();
    let len = rng.gen_range(1..=4);
    for i in 0..len {
        let roll = rng.gen_range(0..20);
        let can_call = level < LEVELS;
        if can_call && roll >= 11 {
            let lvl = rng.gen_range(level + 1..=LEVELS.min(level + 2));
            let c = cats[lvl].choose(rng).unwrap().clone();
            let sel = if rng.gen_bool(0.7) { "(SELF)" } else { "(PATH SUB)" };
            let kw = if roll >= 17 { ":OPTRULE" } else { ":RULE" };
            let occ = calls.iter().filter(|(n, _)| *n == c).count() + 1;
            calls.push((c.clone(), occ));
            actions.push(format!("({kw} {c} {sel})"));
        } else if roll >= 8 {
            actions.push(format!("(:FUN echo {no})"));
        } else {
            actions.push(format!("\"w{no}x{i}\""));
        }
    }
    let mut refs = vec!["LHS".to_string()];
    refs.extend(calls.iter().map(|(c, k)| if *k == 1 { format!("({c})") } else { format!("({c} {k})") }));
    let mut eqs = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let f = ["F", "G"].choose(rng).unwrap();
        if refs.len() >= 2 && rng.gen_bool(0.5) {
            let mut pick = refs.clone();
            pick.shuffle(rng);
            eqs.push(format!("({f} {} {})", pick[0], pick[1]));
        } else {
            let r = refs.choose(rng).unwrap();
            eqs.push(format!("({f} {r} :VAL {})", ["a", "b"].choose(rng).unwrap()));
        }
    }
    let effects = if rng.gen_bool(0.1) {
        format!(" :SIDE-EFFECTS ((mention r{no}))")
    } else {
        String::new()
    };
    let cons = if eqs.is_empty() {
        String::new()
    } else {
        format!(" :CONSTRAINTS {}", eqs.join(" "))
    };
    format!(
        "(DEFPRODUCTION \"r{no}\" (:PRECOND (:CAT {cat} :TEST {test}) :ACTIONS (:TEMPLATE {}{effects}{cons})))\n",
        actions.join(" ")
    )
}

pub fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Whether a rule's own equations are solvable in isolation.
pub fn locally_consistent(rule: &tgl_core::tgl::Rule) -> bool {
    let mut s = Solver::default();
    for eq in &rule.constraints {
        s.add(eq, &|c| ref_position(rule, c).map_or(0, |i| i + 1));
    }
    s.solve().is_some()
}

/// Whether a list of obligations over concrete nodes is solvable.
pub fn obligations_consistent(obs: &[tgl_core::engine::Obligation]) -> bool {
    use tgl_core::engine::Obligation;
    let mut s = Solver::default();
    for o in obs {
        match o {
            Obligation::Assign { node, feature, value } => {
                let v = s.var(*node, feature);
                s.assigned.push((v, value.clone()));
            }
            Obligation::Equate { feature, nodes } => {
                let vs: Vec<usize> = nodes.iter().map(|n| s.var(*n, feature)).collect();
                for w in vs.windows(2) {
                    s.union(w[0], w[1]);
                }
            }
        }
    }
    s.solve().is_some()
}
