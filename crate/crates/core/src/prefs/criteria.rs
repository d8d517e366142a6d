use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::backtrack::BtTable;
use crate::engine::{BtId, Forest};
use crate::scalar::Weight;
use crate::tgl::{Grammar, RuleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreferenceMode {
    /// C-rules first in every conflict set; points with c-rules in their
    /// remainder are expanded first.
    #[default]
    FirstSolutionBias,
    /// As above, but points are ranked by the heaviest c-rule left in
    /// their remainder.
    WeightRanked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightFormula {
    /// Each of the n applications of a c-rule contributes w/n, so a
    /// fulfilled criterion counts w once.
    #[default]
    PerOccurrence,
    /// Each distinct applied c-rule contributes w/n.
    PerDistinctRule,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion<W> {
    pub rule_name: String,
    pub weight: W,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CriteriaError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("criterion `{0}` given twice")]
    Duplicate(String),
    #[error("criterion `{0}` has a negative weight")]
    Negative(String),
}

/// Weighted c-rules plus the strategy knobs that consume them.
#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaSpec<W> {
    criteria: Vec<Criterion<W>>,
    pub mode: PreferenceMode,
    pub formula: WeightFormula,
}

impl<W: Weight> Default for CriteriaSpec<W> {
    fn default() -> Self {
        CriteriaSpec {
            criteria: Vec::new(),
            mode: PreferenceMode::default(),
            formula: WeightFormula::default(),
        }
    }
}

impl<W: Weight> CriteriaSpec<W> {
    pub fn new(criteria: Vec<Criterion<W>>) -> Result<Self, CriteriaError> {
        for (i, c) in criteria.iter().enumerate() {
            if c.weight < W::zero() {
                return Err(CriteriaError::Negative(c.rule_name.clone()));
            }
            if criteria[..i].iter().any(|d| d.rule_name == c.rule_name) {
                return Err(CriteriaError::Duplicate(c.rule_name.clone()));
            }
        }
        Ok(CriteriaSpec {
            criteria,
            ..Default::default()
        })
    }

    /// Builds a spec from `(name, weight)` pairs.
    pub fn from_weights<'n>(pairs: impl IntoIterator<Item = (&'n str, W)>) -> Result<Self, CriteriaError> {
        Self::new(
            pairs
                .into_iter()
                .map(|(n, w)| Criterion {
                    rule_name: n.to_string(),
                    weight: w,
                })
                .collect(),
        )
    }

    pub fn with_mode(mut self, mode: PreferenceMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_formula(mut self, formula: WeightFormula) -> Self {
        self.formula = formula;
        self
    }

    pub fn criteria(&self) -> &[Criterion<W>] {
        &self.criteria
    }

    pub fn is_empty(&self) -> bool {
        self.criteria.is_empty()
    }

    pub fn weight_of(&self, rule_name: &str) -> Option<&W> {
        self.criteria.iter().find(|c| c.rule_name == rule_name).map(|c| &c.weight)
    }

    pub fn is_c_rule(&self, rule_name: &str) -> bool {
        self.weight_of(rule_name).is_some()
    }

    /// Multiplies every weight by `k`.
    pub fn scale(&self, k: &W) -> Self {
        let mut out = self.clone();
        for c in &mut out.criteria {
            c.weight = c.weight.clone() * k.clone();
        }
        out
    }

    /// Criteria naming no rule of `g`.
    pub fn unknown_rules(&self, g: &Grammar) -> Vec<&str> {
        self.criteria
            .iter()
            .filter(|c| g.rule_by_name(&c.rule_name).is_none())
            .map(|c| c.rule_name.as_str())
            .collect()
    }
}

/// Reads a criteria file: one `<rule-name> [<weight>]` per line, `#`
/// comments. Names may contain spaces or be double-quoted; a missing
/// weight means 1.
pub fn parse_criteria<W: Weight>(text: &str) -> Result<CriteriaSpec<W>, CriteriaError> {
    let mut criteria = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (name, weight) = if let Some(rest) = body.strip_prefix('"') {
            let end = rest.find('"').ok_or_else(|| CriteriaError::Syntax {
                line,
                msg: "unterminated rule name".into(),
            })?;
            let tail = strip_comment(&rest[end + 1..]).trim();
            let w = if tail.is_empty() {
                W::one()
            } else {
                W::parse_weight(tail).ok_or_else(|| CriteriaError::Syntax {
                    line,
                    msg: format!("bad weight `{tail}`"),
                })?
            };
            (rest[..end].to_string(), w)
        } else {
            let body = strip_comment(body).trim();
            match body.rsplit_once(char::is_whitespace) {
                Some((n, w)) => match W::parse_weight(w) {
                    Some(w) => (n.trim().to_string(), w),
                    None => (body.to_string(), W::one()),
                },
                None => (body.to_string(), W::one()),
            }
        };
        if name.is_empty() {
            return Err(CriteriaError::Syntax {
                line,
                msg: "empty rule name".into(),
            });
        }
        criteria.push(Criterion { rule_name: name, weight });
    }
    CriteriaSpec::new(criteria)
}

fn strip_comment(s: &str) -> &str {
    s.split_once('#').map_or(s, |(a, _)| a)
}

/// Stable partition: c-rules first by descending weight, then the rest;
/// source order is kept within equal keys.
pub fn order_conflict_set<W: Weight>(cs: &[RuleId], g: &Grammar, spec: &CriteriaSpec<W>) -> Vec<RuleId> {
    let mut crules: Vec<(RuleId, &W)> = cs
        .iter()
        .filter_map(|&r| spec.weight_of(&g.rule(r).name).map(|w| (r, w)))
        .collect();
    crules.sort_by(|a, b| b.1.partial_cmp(a.1).unwrap_or(Ordering::Equal));
    let mut out: Vec<RuleId> = crules.into_iter().map(|(r, _)| r).collect();
    out.extend(cs.iter().filter(|&&r| !spec.is_c_rule(&g.rule(r).name)));
    out
}

/// Next point to expand, or `None` when every point is exhausted. Without
/// criteria the most recently created open point wins; with criteria,
/// points whose remainder holds a c-rule come first.
pub fn choose_backtrack_point<W: Weight>(
    table: &BtTable,
    forest: &Forest,
    g: &Grammar,
    spec: Option<&CriteriaSpec<W>>,
) -> Option<BtId> {
    let open = table.open_points(forest);
    let Some(spec) = spec.filter(|s| !s.is_empty()) else {
        return open.map(|p| p.id).max();
    };
    let best_weight = |rem: &[RuleId]| -> Option<W> {
        rem.iter()
            .filter_map(|&r| spec.weight_of(&g.rule(r).name))
            .fold(None, |acc: Option<W>, w| match acc {
                Some(a) if a >= *w => Some(a),
                _ => Some(w.clone()),
            })
    };
    let mut best: Option<(bool, Option<W>, BtId)> = None;
    for p in open {
        let w = best_weight(p.remainder(forest));
        let has = w.is_some();
        let rank = match spec.mode {
            PreferenceMode::FirstSolutionBias => None,
            PreferenceMode::WeightRanked => w,
        };
        let better = match &best {
            None => true,
            Some((bh, bw, bid)) => match has.cmp(bh) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => match rank.partial_cmp(bw) {
                    Some(Ordering::Greater) => true,
                    Some(Ordering::Less) => false,
                    _ => p.id > *bid,
                },
            },
        };
        if better {
            best = Some((has, rank, p.id));
        }
    }
    best.map(|(_, _, id)| id)
}

/// Global weight of a solution given the names of its applied rules (one
/// entry per application).
pub fn solution_weight<W: Weight, S: AsRef<str>>(applied: &[S], spec: &CriteriaSpec<W>) -> W {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in applied {
        if spec.is_c_rule(r.as_ref()) {
            *counts.entry(r.as_ref()).or_default() += 1;
        }
    }
    let mut total = W::zero();
    for (name, n) in counts {
        let w = spec.weight_of(name).cloned().unwrap_or_else(W::zero);
        let share = w / W::from_usize(n).expect("count fits the scalar");
        match spec.formula {
            WeightFormula::PerOccurrence => {
                for _ in 0..n {
                    total = total + share.clone();
                }
            }
            WeightFormula::PerDistinctRule => total = total + share,
        }
    }
    total
}
