//! Embeddable property-graph engine for climate-literature knowledge graphs.
//!
//! The crate bundles an in-memory multigraph with label and property indexes,
//! a binary snapshot format, a schema registry, a parser and executor for a
//! small Cypher subset, an NDJSON ingest pipeline and a template-based
//! natural-language front end.

pub mod cypher;
pub mod engine;
pub mod graph;
pub mod ingest;
pub mod nlq;
pub mod schema;
pub mod snapshot;
pub mod value;

pub use cypher::{parse, pretty_print, ParseError, QueryAst};
pub use engine::{run_query, Cell, QueryError, ResultTable};
pub use graph::{Direction, Graph, GraphError, Node, NodeId, Properties, RelId, Relationship};
pub use schema::{builtin_climate_schema, SchemaDef};
pub use value::PropertyValue;
