//! Evaluation of test and selector expressions over input structures.
//!
//! Built-in role and adjunct lookups look at the current structure first
//! and fall back to its `THEME` when the current structure is a speech-act
//! wrapper, so the same rule works whether it is handed the whole input or
//! the theme proper.

use crate::gil::{get_path, Atom, FeatureStructure, Symbol, Value};
use crate::registry::Registry;

use super::ast::{Arg, SelectorExpr, TestExpr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown selector `{0}`")]
    UnknownSelector(String),
}

pub fn resolve_args(args: &[Arg], fs: &FeatureStructure) -> Vec<Option<Value>> {
    args.iter()
        .map(|a| match a {
            Arg::Atom(a) => Some(Value::Atom(a.clone())),
            Arg::Path(p) => get_path(fs, p).cloned(),
        })
        .collect()
}

/// Looks up `attr` on `fs`, or on `fs.THEME` if `fs` lacks it.
fn local_or_theme<'a>(fs: &'a FeatureStructure, attr: &str) -> Option<&'a Value> {
    fs.get(attr)
        .or_else(|| fs.get("THEME").and_then(Value::as_fs).and_then(|t| t.get(attr)))
}

fn role_filler(fs: &FeatureStructure, role: &Symbol) -> Option<FeatureStructure> {
    local_or_theme(fs, "ARGS")?
        .as_list()?
        .iter()
        .filter_map(Value::as_fs)
        .find(|arg| {
            arg.get("ROLE")
                .and_then(Value::as_atom)
                .is_some_and(|a| *a == Atom::Symbol(role.clone()))
        })
        .cloned()
}

fn adjunct(fs: &FeatureStructure, attr: &str) -> Option<FeatureStructure> {
    local_or_theme(fs, attr)?.as_fs().cloned()
}

pub fn eval_test(t: &TestExpr, fs: &FeatureStructure, reg: &Registry) -> Result<bool, EvalError> {
    Ok(match t {
        TestExpr::True => true,
        TestExpr::Exists(p) => get_path(fs, p).is_some(),
        TestExpr::AtomEq(p, a) => get_path(fs, p).and_then(Value::as_atom) == Some(a),
        TestExpr::RoleFillerP(r) => role_filler(fs, r).is_some(),
        TestExpr::HasAdjunct(k) => local_or_theme(fs, &format!("{k}-ADJ")).is_some(),
        TestExpr::And(xs) => {
            for x in xs {
                if !eval_test(x, fs, reg)? {
                    return Ok(false);
                }
            }
            true
        }
        TestExpr::Or(xs) => {
            for x in xs {
                if eval_test(x, fs, reg)? {
                    return Ok(true);
                }
            }
            false
        }
        TestExpr::Not(x) => !eval_test(x, fs, reg)?,
        TestExpr::CallPred(name, args) => {
            let f = reg
                .predicate(name)
                .ok_or_else(|| EvalError::UnknownPredicate(name.to_string()))?;
            f(fs, &resolve_args(args, fs))
        }
    })
}

pub fn eval_selector(
    s: &SelectorExpr,
    fs: &FeatureStructure,
    reg: &Registry,
) -> Result<Option<FeatureStructure>, EvalError> {
    Ok(match s {
        SelectorExpr::PathSel(p) => get_path(fs, p).and_then(Value::as_fs).cloned(),
        SelectorExpr::RoleFiller(r) => role_filler(fs, r),
        SelectorExpr::Theme => match fs.get("THEME") {
            Some(v) => v.as_fs().cloned(),
            None => Some(fs.clone()),
        },
        SelectorExpr::TempAdjunct => adjunct(fs, "TIME-ADJ"),
        SelectorExpr::TempDuration => adjunct(fs, "DUR-ADJ"),
        SelectorExpr::LocAdjunct => adjunct(fs, "LOC-ADJ"),
        SelectorExpr::SelfSel => Some(fs.clone()),
        SelectorExpr::CallSel(name, args) => {
            let f = reg
                .selector(name)
                .ok_or_else(|| EvalError::UnknownSelector(name.to_string()))?;
            f(fs, &resolve_args(args, fs))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gil::{fs_equal, parse_gil};
    use std::sync::Arc;

    fn theme() -> FeatureStructure {
        let fs = parse_gil(include_str!("../../data/meeting.gil")).unwrap();
        fs.get("THEME").and_then(Value::as_fs).cloned().unwrap()
    }

    fn reg() -> Registry {
        Registry::default()
    }

    #[test]
    fn role_filler_tests() {
        let t = theme();
        assert!(eval_test(&TestExpr::RoleFillerP("patient".into()), &t, &reg()).unwrap());
        assert!(!eval_test(&TestExpr::RoleFillerP("beneficiary".into()), &t, &reg()).unwrap());
        assert!(eval_test(&TestExpr::Exists("TIME-ADJ".parse().unwrap()), &t, &reg()).unwrap());
        assert!(eval_test(&TestExpr::HasAdjunct("TIME".into()), &t, &reg()).unwrap());
    }

    #[test]
    fn empty_structure_tests() {
        let e = FeatureStructure::empty();
        let ex = TestExpr::Exists("A".parse().unwrap());
        assert!(!eval_test(&ex, &e, &reg()).unwrap());
        assert!(eval_test(&TestExpr::Not(Box::new(ex)), &e, &reg()).unwrap());
        assert!(!eval_test(&TestExpr::Or(vec![]), &e, &reg()).unwrap());
        assert!(eval_test(&TestExpr::And(vec![]), &e, &reg()).unwrap());
    }

    #[test]
    fn selectors_on_theme() {
        let t = theme();
        let patient = eval_selector(&SelectorExpr::RoleFiller("patient".into()), &t, &reg())
            .unwrap()
            .unwrap();
        assert_eq!(
            patient.get_path(&"CONTENT.QFORCE".parse().unwrap()).and_then(Value::as_atom),
            Some(&Atom::sym("iota"))
        );
        let adj = eval_selector(&SelectorExpr::TempAdjunct, &t, &reg()).unwrap().unwrap();
        assert_eq!(adj.get("ROLE").and_then(Value::as_atom), Some(&Atom::sym("on")));
        assert!(eval_selector(&SelectorExpr::TempDuration, &t, &reg()).unwrap().is_none());
        assert!(eval_selector(&SelectorExpr::LocAdjunct, &t, &reg()).unwrap().is_none());
        let me = eval_selector(&SelectorExpr::SelfSel, &t, &reg()).unwrap().unwrap();
        assert!(me.same_node(&t));
        assert!(eval_selector(&SelectorExpr::Theme, &t, &reg()).unwrap().unwrap().same_node(&t));
    }

    #[test]
    fn builtins_descend_into_theme_from_the_root() {
        let root = parse_gil(include_str!("../../data/meeting.gil")).unwrap();
        assert!(eval_test(&TestExpr::RoleFillerP("agent".into()), &root, &reg()).unwrap());
        let th = eval_selector(&SelectorExpr::Theme, &root, &reg()).unwrap().unwrap();
        assert!(fs_equal(&th, &theme()));
    }

    #[test]
    fn registered_and_unknown_callables() {
        let mut r = reg();
        r.register_predicate("has-card", Arc::new(|_fs, args| matches!(args, [Some(_)])))
            .unwrap();
        let t = theme();
        let call = TestExpr::CallPred("has-card".into(), vec![Arg::Path("PRED".parse().unwrap())]);
        assert!(eval_test(&call, &t, &r).unwrap());
        let missing = TestExpr::CallPred("nope".into(), vec![]);
        assert_eq!(eval_test(&missing, &t, &r), Err(EvalError::UnknownPredicate("nope".into())));
        let sel = SelectorExpr::CallSel("nope".into(), vec![]);
        assert_eq!(eval_selector(&sel, &t, &r), Err(EvalError::UnknownSelector("nope".into())));
    }

    #[test]
    fn evaluation_is_pure() {
        let t = theme();
        let before = t.canonical_key();
        let _ = eval_selector(&SelectorExpr::RoleFiller("patient".into()), &t, &reg());
        let _ = eval_test(&TestExpr::RoleFillerP("patient".into()), &t, &reg());
        assert_eq!(t.canonical_key(), before);
    }
}
