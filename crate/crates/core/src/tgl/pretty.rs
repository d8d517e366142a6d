use std::fmt::Write;

use crate::gil::Atom;

use super::ast::*;

fn atom(a: &Atom) -> String {
    a.to_string()
}

fn arg(a: &Arg) -> String {
    match a {
        Arg::Atom(a) => atom(a),
        Arg::Path(p) => format!("(PATH {p})"),
    }
}

fn args(xs: &[Arg]) -> String {
    xs.iter().map(|a| format!(" {}", arg(a))).collect()
}

pub fn test_to_string(t: &TestExpr) -> String {
    let many = |op: &str, xs: &[TestExpr]| {
        let inner: Vec<String> = xs.iter().map(test_to_string).collect();
        format!("({op} {})", inner.join(" "))
    };
    match t {
        TestExpr::True => "(TRUE)".into(),
        TestExpr::Exists(p) => format!("(EXISTS {p})"),
        TestExpr::AtomEq(p, a) => format!("(EQ {p} {})", atom(a)),
        TestExpr::RoleFillerP(r) => format!("(ROLE-FILLER-P {r})"),
        TestExpr::HasAdjunct(k) => format!("(HAS-ADJUNCT {k})"),
        TestExpr::And(xs) => many("AND", xs),
        TestExpr::Or(xs) => many("OR", xs),
        TestExpr::Not(x) => format!("(NOT {})", test_to_string(x)),
        TestExpr::CallPred(n, a) => format!("(PRED {n}{})", args(a)),
    }
}

pub fn selector_to_string(s: &SelectorExpr) -> String {
    match s {
        SelectorExpr::PathSel(p) => format!("(PATH {p})"),
        SelectorExpr::RoleFiller(r) => format!("(ROLE-FILLER {r})"),
        SelectorExpr::Theme => "(THEME)".into(),
        SelectorExpr::TempAdjunct => "(TEMP-ADJUNCT)".into(),
        SelectorExpr::TempDuration => "(TEMP-DURATION)".into(),
        SelectorExpr::LocAdjunct => "(LOC-ADJUNCT)".into(),
        SelectorExpr::SelfSel => "(SELF)".into(),
        SelectorExpr::CallSel(n, a) => format!("(SEL {n}{})", args(a)),
    }
}

fn call(f: &FunCall) -> String {
    format!("({}{})", f.name, args(&f.args))
}

fn action(a: &Action) -> String {
    match a {
        Action::RuleCall(c, s) => format!("(:RULE {c} {})", selector_to_string(s)),
        Action::OptRuleCall(c, s) => format!("(:OPTRULE {c} {})", selector_to_string(s)),
        Action::FunCall(f) => format!("(:FUN {}{})", f.name, args(&f.args)),
        Action::Literal(s) => atom(&Atom::Str(s.clone())),
    }
}

fn equation(e: &ConstraintEquation) -> String {
    match e {
        ConstraintEquation::Assign { feature, at, value } => format!("({feature} {at} :VAL {})", atom(value)),
        ConstraintEquation::Equate { feature, at } => {
            let refs: Vec<String> = at.iter().map(ToString::to_string).collect();
            format!("({feature} {})", refs.join(" "))
        }
    }
}

pub fn rule_to_string(r: &Rule) -> String {
    let mut out = String::new();
    let name = atom(&Atom::Str(r.name.clone()));
    let _ = writeln!(out, "(DEFPRODUCTION {name}");
    let _ = writeln!(out, "  (:PRECOND (:CAT {} :TEST {})", r.category, test_to_string(&r.test));
    let _ = write!(out, "   :ACTIONS (:TEMPLATE");
    for a in &r.template {
        let _ = write!(out, "\n               {}", action(a));
    }
    if !r.side_effects.is_empty() {
        let calls: Vec<String> = r.side_effects.iter().map(call).collect();
        let _ = write!(out, "\n             :SIDE-EFFECTS ({})", calls.join(" "));
    }
    if !r.constraints.is_empty() {
        let _ = write!(out, "\n             :CONSTRAINTS");
        for e in &r.constraints {
            let _ = write!(out, " {}", equation(e));
        }
    }
    out.push_str(")))\n");
    out
}

/// Renders a grammar in the concrete syntax accepted by `parse_grammar`.
pub fn grammar_to_string(g: &Grammar) -> String {
    g.rules.iter().map(rule_to_string).collect::<Vec<_>>().join("\n")
}
