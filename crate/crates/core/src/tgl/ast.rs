use std::collections::BTreeMap;
use std::fmt;

use crate::gil::{Atom, Path, Symbol};

/// A grammar category such as `TXT`, `VP` or `PPdur`.
pub type Category = Symbol;

pub const START_CATEGORY: &str = "TXT";

#[derive(Debug, Clone, PartialEq)]
pub enum TestExpr {
    True,
    Exists(Path),
    AtomEq(Path, Atom),
    RoleFillerP(Symbol),
    HasAdjunct(Symbol),
    And(Vec<TestExpr>),
    Or(Vec<TestExpr>),
    Not(Box<TestExpr>),
    CallPred(Symbol, Vec<Arg>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectorExpr {
    PathSel(Path),
    RoleFiller(Symbol),
    Theme,
    TempAdjunct,
    TempDuration,
    LocAdjunct,
    SelfSel,
    CallSel(Symbol, Vec<Arg>),
}

/// Argument of a registered predicate, selector or function: a constant or
/// a path into the current structure.
#[derive(Debug, Clone, PartialEq)]
pub enum Arg {
    Atom(Atom),
    Path(Path),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunCall {
    pub name: Symbol,
    pub args: Vec<Arg>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    RuleCall(Category, SelectorExpr),
    OptRuleCall(Category, SelectorExpr),
    FunCall(FunCall),
    Literal(String),
}

impl Action {
    pub fn called_category(&self) -> Option<&Category> {
        match self {
            Action::RuleCall(c, _) | Action::OptRuleCall(c, _) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConstituentRef {
    Lhs,
    /// The `occurrence`-th (1-based) rule call of `category` in the template.
    Rhs { category: Category, occurrence: usize },
}

impl fmt::Display for ConstituentRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstituentRef::Lhs => f.write_str("LHS"),
            ConstituentRef::Rhs { category, occurrence: 1 } => write!(f, "({category})"),
            ConstituentRef::Rhs { category, occurrence } => write!(f, "({category} {occurrence})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintEquation {
    Assign { feature: Symbol, at: ConstituentRef, value: Atom },
    Equate { feature: Symbol, at: Vec<ConstituentRef> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SourcePos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub category: Category,
    pub test: TestExpr,
    pub template: Vec<Action>,
    pub side_effects: Vec<FunCall>,
    pub constraints: Vec<ConstraintEquation>,
    pub pos: SourcePos,
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.category == other.category
            && self.test == other.test
            && self.template == other.template
            && self.side_effects == other.side_effects
            && self.constraints == other.constraints
    }
}

impl Rule {
    /// Template index of the constituent a reference names, or `None` for
    /// the left-hand side. Unresolved references are returned as the error.
    pub fn resolve_ref<'r>(&self, r: &'r ConstituentRef) -> Result<Option<usize>, &'r ConstituentRef> {
        match r {
            ConstituentRef::Lhs => Ok(None),
            ConstituentRef::Rhs { category, occurrence } => self
                .template
                .iter()
                .enumerate()
                .filter(|(_, a)| a.called_category() == Some(category))
                .nth(occurrence.saturating_sub(1))
                .filter(|_| *occurrence >= 1)
                .map(|(i, _)| Some(i))
                .ok_or(r),
        }
    }
}

/// Index of a rule in [`Grammar::rules`].
pub type RuleId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Grammar {
    pub rules: Vec<Rule>,
    pub start: Category,
    index: BTreeMap<Category, Vec<RuleId>>,
}

impl Grammar {
    pub fn new(rules: Vec<Rule>) -> Self {
        let mut index: BTreeMap<Category, Vec<RuleId>> = BTreeMap::new();
        for (i, r) in rules.iter().enumerate() {
            index.entry(r.category.clone()).or_default().push(i);
        }
        Grammar {
            rules,
            start: Category::new(START_CATEGORY),
            index,
        }
    }

    pub fn with_start(mut self, start: Category) -> Self {
        self.start = start;
        self
    }

    /// Rules of `cat` in source order.
    pub fn rules_for(&self, cat: &Category) -> &[RuleId] {
        self.index.get(cat).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id]
    }

    pub fn rule_by_name(&self, name: &str) -> Option<RuleId> {
        self.rules.iter().position(|r| r.name == name)
    }

    /// Categories with rules, plus `TXT` and every called category.
    pub fn categories(&self) -> Vec<Category> {
        let mut cats: Vec<Category> = self.index.keys().cloned().collect();
        cats.push(Category::new(START_CATEGORY));
        for r in &self.rules {
            cats.extend(r.template.iter().filter_map(Action::called_category).cloned());
        }
        cats.sort();
        cats.dedup();
        cats
    }
}
