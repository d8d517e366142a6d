//! The production-system interpreter and its data: the derivation forest,
//! the agreement-feature graph and the generator driving them.

mod derivation;
mod features;
mod generator;

pub use derivation::{
    join_tokens, BtId, Choice, ChoiceId, DNodeId, DerivationNode, DerivationTree, Forest, Frontier, Item,
    Preterminal, PreterminalId, Selection, TreeChild,
};
pub use features::{ConstraintError, FeatureGraph, FeatureMark, NodeId, Obligation};
pub use generator::{
    apply_constraints, match_rules, realize, resolve_obligations, GenError, GenOptions, Generator, Mark, Solution,
    Stats, TraceEvent,
};
