//! Query planning and execution over a [`Graph`].
//!
//! Semantics worth knowing:
//!
//! * bag semantics, no implicit DISTINCT: parallel edges give one row each;
//! * relationship bindings are pairwise distinct within one path pattern only;
//! * two-valued logic: a comparison on a missing property is false;
//! * `CONTAINS` is a case-sensitive substring test on text values.

mod eval;
mod exec;
mod plan;
mod result;

use thiserror::Error;

use crate::cypher::{self, ParseError};
use crate::graph::Graph;

pub use eval::{evaluate_predicate, Diagnostics};
pub use exec::{execute, execute_with, ExecOptions};
pub use plan::{plan, LogicalPlan, PlanStep, PropConstraints, VarId, VarKind, Variable};
pub use result::{Cell, Elem, ExecStats, ResultTable, Subgraph};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("variable `{0}` is not bound by a preceding pattern")]
    UnboundVariable(String),
    #[error("variable `{0}` is used both as a node and as a relationship")]
    VariableKindConflict(String),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QueryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Parse, plan and execute in one go.
pub fn run_query(text: &str, graph: &Graph) -> Result<ResultTable, QueryError> {
    run_query_with(text, graph, ExecOptions::default())
}

pub fn run_query_with(text: &str, graph: &Graph, options: ExecOptions) -> Result<ResultTable, QueryError> {
    let ast = cypher::parse(text)?;
    let plan = plan(&ast)?;
    Ok(execute_with(&plan, graph, options))
}
