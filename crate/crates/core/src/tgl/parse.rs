use crate::gil::{Atom, Path, Symbol};

use super::ast::*;
use super::sexpr::{read_all, SExpr};
use super::TglError;

/// Parses grammar text. Source order is preserved; no validation beyond
/// syntax and rule-name uniqueness is performed.
pub fn parse_grammar(text: &str) -> Result<Grammar, TglError> {
    let forms = read_all(text)?;
    let mut rules: Vec<Rule> = Vec::new();
    for form in &forms {
        let rule = parse_rule(form)?;
        if rules.iter().any(|r| r.name == rule.name) {
            return Err(TglError::DuplicateRule {
                name: rule.name,
                line: rule.pos.line,
                col: rule.pos.col,
            });
        }
        rules.push(rule);
    }
    Ok(Grammar::new(rules))
}

fn err<T>(at: &SExpr, msg: impl Into<String>) -> Result<T, TglError> {
    Err(TglError::syntax(at.pos(), msg))
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], TglError> {
    e.list().ok_or_else(|| TglError::syntax(e.pos(), format!("expected {what}")))
}

fn is_keyword(e: &SExpr) -> bool {
    e.sym().is_some_and(|s| s.starts_with(':'))
}

/// Splits `(:K1 a b :K2 c ...)` into keyword sections.
fn sections(items: &[SExpr]) -> Result<Vec<(&SExpr, &[SExpr])>, TglError> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let key = &items[i];
        if !is_keyword(key) {
            return err(key, "expected a keyword such as :CAT or :TEMPLATE");
        }
        let start = i + 1;
        let mut end = start;
        while end < items.len() && !is_keyword(&items[end]) {
            end += 1;
        }
        out.push((key, &items[start..end]));
        i = end;
    }
    Ok(out)
}

fn parse_rule(form: &SExpr) -> Result<Rule, TglError> {
    let items = list(form, "(DEFPRODUCTION ...)")?;
    match items {
        [head, SExpr::Str(name, _), body] if head.is_sym("DEFPRODUCTION") => {
            let mut category = None;
            let mut test = TestExpr::True;
            let mut template = Vec::new();
            let mut side_effects = Vec::new();
            let mut constraints = Vec::new();
            for (key, vals) in sections(list(body, "(:PRECOND ... :ACTIONS ...)")?)? {
                let [val] = vals else {
                    return err(key, "expected exactly one list after the keyword");
                };
                if key.is_sym(":PRECOND") {
                    for (k, v) in sections(list(val, "precondition list")?)? {
                        if k.is_sym(":CAT") {
                            match v {
                                [SExpr::Sym(c, _)] => category = Some(Category::new(c.as_str())),
                                _ => return err(k, ":CAT takes one category symbol"),
                            }
                        } else if k.is_sym(":TEST") {
                            let [t] = v else {
                                return err(k, ":TEST takes one list");
                            };
                            test = parse_test_slot(t)?;
                        } else {
                            return err(k, format!("unknown precondition keyword {}", k.sym().unwrap_or("")));
                        }
                    }
                } else if key.is_sym(":ACTIONS") {
                    for (k, v) in sections(list(val, "action list")?)? {
                        if k.is_sym(":TEMPLATE") {
                            for a in v {
                                template.push(parse_action(a)?);
                            }
                        } else if k.is_sym(":SIDE-EFFECTS") {
                            let [calls] = v else {
                                return err(k, ":SIDE-EFFECTS takes one list");
                            };
                            let calls = list(calls, "side-effect calls")?;
                            if calls.first().is_some_and(|c| c.sym().is_some()) {
                                side_effects.push(parse_call(&v[0], calls)?);
                            } else {
                                for c in calls {
                                    side_effects.push(parse_call(c, list(c, "(function arg*)")?)?);
                                }
                            }
                        } else if k.is_sym(":CONSTRAINTS") || k.is_sym(":CONSTRAINT") {
                            for e in v {
                                constraints.push(parse_equation(e)?);
                            }
                        } else {
                            return err(k, format!("unknown action keyword {}", k.sym().unwrap_or("")));
                        }
                    }
                } else {
                    return err(key, "expected :PRECOND or :ACTIONS");
                }
            }
            let Some(category) = category else {
                return err(body, "rule has no :CAT");
            };
            if template.is_empty() {
                return err(body, "rule has an empty :TEMPLATE");
            }
            let pos = form.pos();
            Ok(Rule {
                name: name.clone(),
                category,
                test,
                template,
                side_effects,
                constraints,
                pos,
            })
        }
        _ => err(form, "expected (DEFPRODUCTION \"name\" (...))"),
    }
}

/// `:TEST ((a) (b))` is a conjunction; `:TEST (a ...)` is a single test.
fn parse_test_slot(t: &SExpr) -> Result<TestExpr, TglError> {
    let items = list(t, "test list")?;
    if items.first().is_some_and(|i| i.sym().is_some()) {
        return parse_test(t);
    }
    let mut tests: Vec<TestExpr> = items.iter().map(parse_test).collect::<Result<_, _>>()?;
    Ok(match tests.len() {
        0 => TestExpr::True,
        1 => tests.pop().unwrap(),
        _ => TestExpr::And(tests),
    })
}

fn parse_path(e: &SExpr) -> Result<Path, TglError> {
    match e {
        SExpr::Sym(s, _) => s
            .parse()
            .map_err(|_| TglError::syntax(e.pos(), format!("invalid path `{s}`"))),
        _ => err(e, "expected a path"),
    }
}

fn parse_atom(e: &SExpr) -> Result<Atom, TglError> {
    match e {
        SExpr::Sym(s, _) => Ok(Atom::Symbol(Symbol::new(s.as_str()))),
        SExpr::Str(s, _) => Ok(Atom::Str(s.clone())),
        SExpr::Int(i, _) => Ok(Atom::Int(*i)),
        SExpr::List(..) => err(e, "expected an atom"),
    }
}

fn parse_symbol(e: &SExpr) -> Result<Symbol, TglError> {
    match e {
        SExpr::Sym(s, _) => Ok(Symbol::new(s.as_str())),
        _ => err(e, "expected a symbol"),
    }
}

fn parse_arg(e: &SExpr) -> Result<Arg, TglError> {
    match e.list() {
        Some([head, p]) if head.is_sym("PATH") => Ok(Arg::Path(parse_path(p)?)),
        Some(_) => err(e, "arguments are atoms or (PATH <path>)"),
        None => Ok(Arg::Atom(parse_atom(e)?)),
    }
}

fn parse_call(at: &SExpr, items: &[SExpr]) -> Result<FunCall, TglError> {
    let Some((name, args)) = items.split_first() else {
        return err(at, "empty call");
    };
    Ok(FunCall {
        name: parse_symbol(name)?,
        args: args.iter().map(parse_arg).collect::<Result<_, _>>()?,
    })
}

pub(crate) fn parse_test(e: &SExpr) -> Result<TestExpr, TglError> {
    let items = list(e, "a test expression")?;
    let Some((head, rest)) = items.split_first() else {
        return err(e, "empty test expression");
    };
    let Some(op) = head.sym() else {
        return err(head, "expected a test operator");
    };
    let op = op.to_ascii_uppercase();
    Ok(match (op.as_str(), rest) {
        ("TRUE", []) => TestExpr::True,
        ("AND", r) if !r.is_empty() => TestExpr::And(r.iter().map(parse_test).collect::<Result<_, _>>()?),
        ("OR", r) if !r.is_empty() => TestExpr::Or(r.iter().map(parse_test).collect::<Result<_, _>>()?),
        ("NOT", [x]) => TestExpr::Not(Box::new(parse_test(x)?)),
        ("EXISTS", [p]) => TestExpr::Exists(parse_path(p)?),
        ("EQ", [p, a]) => TestExpr::AtomEq(parse_path(p)?, parse_atom(a)?),
        ("ROLE-FILLER-P", [r]) => TestExpr::RoleFillerP(parse_symbol(r)?),
        ("HAS-ADJUNCT", [k]) => TestExpr::HasAdjunct(parse_symbol(k)?),
        ("PRED", [name, args @ ..]) => TestExpr::CallPred(
            parse_symbol(name)?,
            args.iter().map(parse_arg).collect::<Result<_, _>>()?,
        ),
        _ => return err(e, format!("malformed test expression `{op}`")),
    })
}

pub(crate) fn parse_selector(e: &SExpr) -> Result<SelectorExpr, TglError> {
    let items = list(e, "a selector expression")?;
    let Some((head, rest)) = items.split_first() else {
        return err(e, "empty selector");
    };
    let Some(op) = head.sym() else {
        return err(head, "expected a selector name");
    };
    let op = op.to_ascii_uppercase();
    Ok(match (op.as_str(), rest) {
        ("PATH", [p]) => SelectorExpr::PathSel(parse_path(p)?),
        ("ROLE-FILLER", [r]) => SelectorExpr::RoleFiller(parse_symbol(r)?),
        ("THEME", []) => SelectorExpr::Theme,
        ("TEMP-ADJUNCT", []) => SelectorExpr::TempAdjunct,
        ("TEMP-DURATION", []) => SelectorExpr::TempDuration,
        ("LOC-ADJUNCT", []) => SelectorExpr::LocAdjunct,
        ("SELF", []) => SelectorExpr::SelfSel,
        ("SEL", [name, args @ ..]) => SelectorExpr::CallSel(
            parse_symbol(name)?,
            args.iter().map(parse_arg).collect::<Result<_, _>>()?,
        ),
        _ => return err(e, format!("malformed selector `{op}`")),
    })
}

fn parse_action(e: &SExpr) -> Result<Action, TglError> {
    match e {
        SExpr::Str(s, _) => Ok(Action::Literal(s.clone())),
        SExpr::List(items, _) => {
            let Some((head, rest)) = items.split_first() else {
                return err(e, "empty action");
            };
            if head.is_sym(":RULE") || head.is_sym(":OPTRULE") {
                let [cat, sel] = rest else {
                    return err(e, "expected (:RULE <category> <selector>)");
                };
                let cat = parse_symbol(cat)?;
                let sel = parse_selector(sel)?;
                Ok(if head.is_sym(":RULE") {
                    Action::RuleCall(cat, sel)
                } else {
                    Action::OptRuleCall(cat, sel)
                })
            } else if head.is_sym(":FUN") {
                match rest {
                    [SExpr::List(inner, _)] => Ok(Action::FunCall(parse_call(e, inner)?)),
                    _ => Ok(Action::FunCall(parse_call(e, rest)?)),
                }
            } else {
                err(head, "expected :RULE, :OPTRULE or :FUN")
            }
        }
        _ => err(e, "expected a template action"),
    }
}

fn parse_ref(e: &SExpr) -> Result<ConstituentRef, TglError> {
    if e.is_sym("LHS") {
        return Ok(ConstituentRef::Lhs);
    }
    match e.list() {
        Some([x]) if x.is_sym("LHS") => Ok(ConstituentRef::Lhs),
        Some([c]) => Ok(ConstituentRef::Rhs {
            category: parse_symbol(c)?,
            occurrence: 1,
        }),
        Some([c, SExpr::Int(k, _)]) if *k >= 1 => Ok(ConstituentRef::Rhs {
            category: parse_symbol(c)?,
            occurrence: *k as usize,
        }),
        _ => err(e, "expected a constituent: LHS, (CAT) or (CAT k)"),
    }
}

fn parse_equation(e: &SExpr) -> Result<ConstraintEquation, TglError> {
    let items = list(e, "a feature equation")?;
    match items {
        [feat, r, kw, v] if kw.is_sym(":VAL") => Ok(ConstraintEquation::Assign {
            feature: parse_symbol(feat)?,
            at: parse_ref(r)?,
            value: parse_atom(v)?,
        }),
        [feat, refs @ ..] if refs.len() >= 2 => Ok(ConstraintEquation::Equate {
            feature: parse_symbol(feat)?,
            at: refs.iter().map(parse_ref).collect::<Result<_, _>>()?,
        }),
        _ => err(e, "expected (<feature> <ref> :VAL <atom>) or (<feature> <ref> <ref>+)"),
    }
}
