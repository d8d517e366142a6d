use std::collections::HashSet;
use std::fmt;

use crate::registry::{Function, Registry};

use super::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiagnosticKind {
    NoRulesForCategory(String),
    NoStartRule(String),
    UnknownPredicate(String),
    UnknownSelector(String),
    UnknownFunction(String),
    NotASideEffect(String),
    NotAnInflectionFunction(String),
    UnresolvedConstituent(String),
    RepeatedConstituent(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: Option<String>,
    pub pos: SourcePos,
    pub kind: DiagnosticKind,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{}:{}: {sev}: ", self.pos.line, self.pos.col)?;
        if let Some(r) = &self.rule {
            write!(f, "rule \"{r}\": ")?;
        }
        match &self.kind {
            DiagnosticKind::NoRulesForCategory(c) => write!(f, "no rules for called category {c}"),
            DiagnosticKind::NoStartRule(c) => write!(f, "start category {c} has no rules"),
            DiagnosticKind::UnknownPredicate(n) => write!(f, "unknown predicate `{n}`"),
            DiagnosticKind::UnknownSelector(n) => write!(f, "unknown selector `{n}`"),
            DiagnosticKind::UnknownFunction(n) => write!(f, "unknown function `{n}`"),
            DiagnosticKind::NotASideEffect(n) => write!(f, "`{n}` is not a side-effect function"),
            DiagnosticKind::NotAnInflectionFunction(n) => write!(f, "`{n}` is a side effect, not a template function"),
            DiagnosticKind::UnresolvedConstituent(c) => write!(f, "constituent {c} does not occur in the template"),
            DiagnosticKind::RepeatedConstituent(c) => write!(f, "constituent {c} listed twice in one equation"),
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

fn check_test(t: &TestExpr, reg: &Registry, out: &mut Vec<DiagnosticKind>) {
    match t {
        TestExpr::And(xs) | TestExpr::Or(xs) => xs.iter().for_each(|x| check_test(x, reg, out)),
        TestExpr::Not(x) => check_test(x, reg, out),
        TestExpr::CallPred(n, _) if reg.predicate(n).is_none() => {
            out.push(DiagnosticKind::UnknownPredicate(n.to_string()))
        }
        _ => {}
    }
}

/// Static checks against the registries. Warnings do not make a grammar
/// unusable; errors do.
pub fn validate_grammar(g: &Grammar, reg: &Registry) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let defined: HashSet<&Category> = g.rules.iter().map(|r| &r.category).collect();
    if !defined.contains(&g.start) {
        diags.push(Diagnostic {
            severity: Severity::Error,
            rule: None,
            pos: SourcePos { line: 1, col: 1 },
            kind: DiagnosticKind::NoStartRule(g.start.to_string()),
        });
    }
    for rule in &g.rules {
        let mut errs = Vec::new();
        let mut warns = Vec::new();
        check_test(&rule.test, reg, &mut errs);
        for a in &rule.template {
            match a {
                Action::RuleCall(c, s) | Action::OptRuleCall(c, s) => {
                    if !defined.contains(c) {
                        warns.push(DiagnosticKind::NoRulesForCategory(c.to_string()));
                    }
                    if let SelectorExpr::CallSel(n, _) = s {
                        if reg.selector(n).is_none() {
                            errs.push(DiagnosticKind::UnknownSelector(n.to_string()));
                        }
                    }
                }
                Action::FunCall(f) => match reg.function(&f.name) {
                    None => errs.push(DiagnosticKind::UnknownFunction(f.name.to_string())),
                    Some(Function::SideEffect { .. }) => {
                        errs.push(DiagnosticKind::NotAnInflectionFunction(f.name.to_string()))
                    }
                    Some(Function::Inflect(_)) => {}
                },
                Action::Literal(_) => {}
            }
        }
        for f in &rule.side_effects {
            match reg.function(&f.name) {
                None => errs.push(DiagnosticKind::UnknownFunction(f.name.to_string())),
                Some(Function::Inflect(_)) => errs.push(DiagnosticKind::NotASideEffect(f.name.to_string())),
                Some(Function::SideEffect { .. }) => {}
            }
        }
        for eq in &rule.constraints {
            let refs: Vec<&ConstituentRef> = match eq {
                ConstraintEquation::Assign { at, .. } => vec![at],
                ConstraintEquation::Equate { at, .. } => at.iter().collect(),
            };
            for (i, r) in refs.iter().enumerate() {
                if rule.resolve_ref(r).is_err() {
                    errs.push(DiagnosticKind::UnresolvedConstituent(r.to_string()));
                }
                if refs[..i].contains(r) {
                    errs.push(DiagnosticKind::RepeatedConstituent(r.to_string()));
                }
            }
        }
        let mk = |severity, kind| Diagnostic {
            severity,
            rule: Some(rule.name.clone()),
            pos: rule.pos,
            kind,
        };
        diags.extend(errs.into_iter().map(|k| mk(Severity::Error, k)));
        diags.extend(warns.into_iter().map(|k| mk(Severity::Warning, k)));
    }
    diags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tgl::parse_grammar;

    fn rule(body: &str) -> String {
        format!(r#"(DEFPRODUCTION "r" (:PRECOND (:CAT TXT :TEST ((TRUE))) :ACTIONS (:TEMPLATE {body})))"#)
    }

    #[test]
    fn unresolved_constituent() {
        let g = parse_grammar(&rule(r#"(:RULE NP (SELF)) :CONSTRAINTS (CASE (NP 2) :VAL akk)"#)).unwrap();
        let d = validate_grammar(&g, &Registry::default());
        assert!(d
            .iter()
            .any(|d| d.kind == DiagnosticKind::UnresolvedConstituent("(NP 2)".into())));
        assert!(has_errors(&d));
    }

    #[test]
    fn unknown_function() {
        let g = parse_grammar(&rule("(:FUN frobnicate 1)")).unwrap();
        let d = validate_grammar(&g, &Registry::default());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].kind, DiagnosticKind::UnknownFunction("frobnicate".into()));
        assert!(d[0].to_string().contains("unknown function `frobnicate`"));
    }

    #[test]
    fn missing_category_is_a_warning_and_missing_start_an_error() {
        let g = parse_grammar(&rule("(:OPTRULE PP (SELF))")).unwrap();
        let d = validate_grammar(&g, &Registry::default());
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
        assert!(!has_errors(&d));
        let g = g.with_start("S".into());
        assert!(has_errors(&validate_grammar(&g, &Registry::default())));
    }

    #[test]
    fn canned_text_is_clean() {
        let g = parse_grammar(&rule(r#""hello""#)).unwrap();
        assert!(validate_grammar(&g, &Registry::default()).is_empty());
    }
}
