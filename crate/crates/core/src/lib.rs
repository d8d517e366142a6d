//! A production-rule surface realizer. Inputs are feature structures in
//! the GIL notation; rules in the TGL notation mix canned text, templates
//! and context-free calls. Solutions are enumerated on demand from a table
//! of backtrack points, optionally steered by weighted rule criteria.
//!
//! ```
//! use tgl_core::{default_registry, parse_gil, parse_grammar, GenOptions, Generator};
//!
//! let g = parse_grammar(r#"(DEFPRODUCTION "hi" (:PRECOND (:CAT TXT :TEST (TRUE)) :ACTIONS (:TEMPLATE "hello")))"#).unwrap();
//! let reg = default_registry();
//! let mut gen: Generator = Generator::new(&g, &reg, parse_gil("[]").unwrap(), GenOptions::default());
//! assert_eq!(gen.next_solution().unwrap().unwrap().text, "hello");
//! ```

pub mod backtrack;
pub mod engine;
pub mod gil;
pub mod morpho;
pub mod prefs;
pub mod registry;
pub mod scalar;
pub mod tgl;

use num_rational::Ratio;

pub use engine::{GenError, GenOptions, Generator, Solution, Stats, TraceEvent};
pub use gil::{fs_equal, get_path, parse_gil, serialize_gil, Atom, FeatureStructure, Path, Symbol, Value};
pub use morpho::{default_registry, inflect, InflectionRequest};
pub use prefs::{parse_criteria, CriteriaSpec, PreferenceMode, WeightFormula};
pub use registry::Registry;
pub use scalar::Weight;
pub use tgl::{parse_grammar, validate_grammar, Grammar};

/// Exact weights.
pub type Rational = Ratio<i64>;
pub type Criteria = CriteriaSpec<Rational>;
pub type CriteriaF64 = CriteriaSpec<f64>;
pub type RationalSolution = Solution<Rational>;
pub type SolutionF64 = Solution<f64>;
