//! Criteria-driven preferences: c-rule ordering of conflict sets and
//! backtrack points, solution weights, and derivation histories.

mod criteria;
mod history;

pub use criteria::{
    choose_backtrack_point, order_conflict_set, parse_criteria, solution_weight, CriteriaError, CriteriaSpec,
    Criterion, PreferenceMode, WeightFormula,
};
pub use history::{record_history, DerivationHistory};

use crate::engine::{GenError, GenOptions, Generator, Solution};
use crate::gil::FeatureStructure;
use crate::registry::Registry;
use crate::scalar::Weight;
use crate::tgl::Grammar;

/// Lazy stream of solutions in preference order. The stream is complete:
/// its strings are the criteria-free solution set.
pub fn best_first_stream<'a, W: Weight>(
    g: &'a Grammar,
    reg: &'a Registry,
    input: FeatureStructure,
    spec: Option<&'a CriteriaSpec<W>>,
    opts: GenOptions,
) -> Generator<'a, W> {
    Generator::new(g, reg, input, opts).with_criteria(spec)
}

/// Drains `stream` and sorts by descending weight, keeping stream order
/// among equal weights.
pub fn rank_exhaustive<W: Weight>(
    stream: impl Iterator<Item = Result<Solution<W>, GenError>>,
) -> Result<Vec<Solution<W>>, GenError> {
    let mut all = stream.collect::<Result<Vec<_>, _>>()?;
    all.sort_by(|a, b| {
        b.weight
            .partial_cmp(&a.weight)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{DerivationTree, TreeChild};
    use crate::tgl::parse_grammar;
    use num_rational::Ratio;

    type R = Ratio<i64>;

    fn grammar() -> Grammar {
        parse_grammar(
            r#"
            (DEFPRODUCTION "r1" (:PRECOND (:CAT TXT :TEST (TRUE)) :ACTIONS (:TEMPLATE "a")))
            (DEFPRODUCTION "r2" (:PRECOND (:CAT TXT :TEST (TRUE)) :ACTIONS (:TEMPLATE "b")))
            (DEFPRODUCTION "r3" (:PRECOND (:CAT TXT :TEST (TRUE)) :ACTIONS (:TEMPLATE "c")))
            "#,
        )
        .unwrap()
    }

    fn r(n: i64) -> R {
        R::from_integer(n)
    }

    #[test]
    fn partition_puts_c_rules_first() {
        let g = grammar();
        let spec = CriteriaSpec::from_weights([("r2", r(1))]).unwrap();
        assert_eq!(order_conflict_set(&[0, 1, 2], &g, &spec), vec![1, 0, 2]);
        assert_eq!(order_conflict_set(&[0, 1, 2], &g, &CriteriaSpec::<R>::default()), vec![0, 1, 2]);
        let spec = CriteriaSpec::from_weights([("r1", r(1)), ("r3", r(3))]).unwrap();
        assert_eq!(order_conflict_set(&[0, 1, 2], &g, &spec), vec![2, 0, 1]);
    }

    #[test]
    fn weights_by_formula() {
        let spec = CriteriaSpec::from_weights([("a", r(1))]).unwrap();
        assert_eq!(solution_weight(&["a"], &spec), r(1));
        let spec = CriteriaSpec::from_weights([("a", r(2))]).unwrap();
        assert_eq!(solution_weight(&["a", "x", "a"], &spec), r(2));
        let spec = CriteriaSpec::from_weights([("a", r(2)), ("b", r(3))]).unwrap();
        let applied = ["a", "b", "b", "b"];
        assert_eq!(solution_weight(&applied, &spec), r(5));
        let alt = spec.clone().with_formula(WeightFormula::PerDistinctRule);
        assert_eq!(solution_weight(&applied, &alt), r(3));
        assert_eq!(solution_weight::<R, &str>(&[], &spec), r(0));
        assert_eq!(solution_weight(&applied, &spec.scale(&R::new(3, 2))), R::new(15, 2));
    }

    #[test]
    fn criteria_file() {
        let spec: CriteriaSpec<R> = parse_criteria(
            "# preferences\nVPinf with temp/loc adjuncts 2\n\"S passive\" 1.5\nplain\n\"q 2\"  # quoted\n",
        )
        .unwrap();
        assert_eq!(spec.weight_of("VPinf with temp/loc adjuncts"), Some(&r(2)));
        assert_eq!(spec.weight_of("S passive"), Some(&R::new(3, 2)));
        assert_eq!(spec.weight_of("plain"), Some(&r(1)));
        assert_eq!(spec.weight_of("q 2"), Some(&r(1)));
        assert_eq!(
            parse_criteria::<R>("a 1\na 2"),
            Err(CriteriaError::Duplicate("a".into()))
        );
        assert_eq!(parse_criteria::<f64>("a -1"), Err(CriteriaError::Negative("a".into())));
        assert!(matches!(parse_criteria::<f64>("\"a 1"), Err(CriteriaError::Syntax { line: 1, .. })));
    }

    fn node(rule: &str, kids: Vec<DerivationTree>) -> DerivationTree {
        DerivationTree {
            category: "X".into(),
            rule: rule.into(),
            children: kids.into_iter().map(TreeChild::Node).collect(),
        }
    }

    #[test]
    fn history_counts_descendant_c_rules() {
        let spec = CriteriaSpec::from_weights([("leaf", r(1))]).unwrap();
        let t = node("top", vec![node("mid", vec![node("leaf", vec![])]), node("other", vec![])]);
        let h = record_history(&t, &spec);
        assert_eq!(h.below["top"]["leaf"], 1);
        assert_eq!(h.below["mid"]["leaf"], 1);
        assert!(h.below["leaf"].is_empty());
        assert!(h.below["other"].is_empty());
        assert_eq!(h.derivations_applying("leaf"), 1);

        let none = record_history(&t, &CriteriaSpec::<R>::default());
        assert!(none.below.values().all(BTreeMap::is_empty));

        let mut merged = h.clone();
        merged.merge(&h);
        assert_eq!(merged.below["top"]["leaf"], 2);
        assert_eq!(merged.derivations, 2);
        assert_eq!(merged.mean_applications("leaf"), Some(1.0));
    }

    use std::collections::BTreeMap;
}
