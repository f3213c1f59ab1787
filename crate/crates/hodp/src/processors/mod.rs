//! DP processors and the name registry used by `--strategy`.

pub mod formative;
pub mod graph;
pub mod nonterm;
pub mod subterm;
pub mod unify;
pub mod usable;

use crate::framework::Processor;
use crate::ordering::{ReductionTripleProcessor, TripleMode, UsableTripleProcessor};

pub use formative::{formative_rules, FormativeRulesProcessor};
pub use graph::{graph_approx, DependencyGraphApprox, GraphProcessor};
pub use nonterm::{loop_search, ChainStep, FiniteChain, NonterminationProcessor};
pub use subterm::{
    comp_greater, find_computable_projection, find_subterm_projection, ComputableSubtermCriterion,
    Projection, SubtermCriterion,
};
pub use usable::{usable_rules, UsableRulesProcessor};

/// Names accepted by [`processor_by_name`].
pub const PROCESSOR_NAMES: &[&str] = &[
    "graph",
    "subterm",
    "comp-subterm",
    "formative",
    "usable",
    "triple-basic",
    "triple-base",
    "usable-triple",
    "nonterm",
];

pub fn processor_by_name(name: &str) -> Option<Box<dyn Processor>> {
    let p: Box<dyn Processor> = match name {
        "graph" => Box::new(GraphProcessor),
        "subterm" => Box::new(SubtermCriterion),
        "comp-subterm" => Box::new(ComputableSubtermCriterion),
        "formative" => Box::new(FormativeRulesProcessor),
        "usable" => Box::new(UsableRulesProcessor),
        "triple-basic" => Box::new(ReductionTripleProcessor {
            mode: TripleMode::Basic,
        }),
        "triple-base" => Box::new(ReductionTripleProcessor {
            mode: TripleMode::BaseType,
        }),
        "usable-triple" => Box::new(UsableTripleProcessor),
        "nonterm" => Box::new(NonterminationProcessor),
        _ => return None,
    };
    Some(p)
}

pub const DEFAULT_STRATEGY: &[&str] = &[
    "graph",
    "subterm",
    "comp-subterm",
    "formative",
    "triple-base",
    "usable-triple",
    "nonterm",
];

/// Resolves every name, failing on the first unknown one.
pub fn strategy_from_names<S: AsRef<str>>(names: &[S]) -> Result<Vec<Box<dyn Processor>>, String> {
    names
        .iter()
        .map(|n| processor_by_name(n.as_ref()).ok_or_else(|| n.as_ref().to_string()))
        .collect()
}

pub fn default_strategy() -> Vec<Box<dyn Processor>> {
    strategy_from_names(DEFAULT_STRATEGY).expect("known names")
}
