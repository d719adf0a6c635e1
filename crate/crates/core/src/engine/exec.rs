use std::collections::HashMap;

use crate::cypher::{RelDirection, ReturnExpr};
use crate::graph::{Graph, Node, NodeId, Properties, RelId, Relationship};

use super::eval::{evaluate_predicate, Diagnostics};
use super::plan::{LogicalPlan, PlanStep, PropConstraints, VarId};
use super::result::{Cell, Elem, ExecStats, ResultTable, Subgraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    /// Serve label + property scans from the property index when possible.
    pub use_prop_index: bool,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions {
            use_prop_index: true,
        }
    }
}

type Row = Vec<Option<Elem>>;

fn props_match(props: &Properties, wanted: &PropConstraints) -> bool {
    wanted.iter().all(|(k, v)| props.get(k) == Some(v))
}

fn node_matches(node: &Node, labels: &[String], props: &PropConstraints) -> bool {
    (labels.is_empty() || labels.iter().any(|l| node.has_label(l)))
        && props_match(&node.properties, props)
}

/// Candidate ids for a scan, ascending and duplicate free.
fn scan_candidates(
    graph: &Graph,
    labels: &[String],
    props: &PropConstraints,
    options: ExecOptions,
) -> Vec<NodeId> {
    if labels.is_empty() {
        return graph.node_ids().collect();
    }
    let indexed = options
        .use_prop_index
        .then(|| {
            props.iter().find_map(|(key, value)| {
                let per_label: Option<Vec<Vec<NodeId>>> = labels
                    .iter()
                    .map(|label| graph.indexed_lookup(label, key, value))
                    .collect();
                per_label
            })
        })
        .flatten();
    let mut ids: Vec<NodeId> = match indexed {
        Some(lists) => lists.into_iter().flatten().collect(),
        None => labels
            .iter()
            .flat_map(|l| graph.nodes_by_label(l).iter().copied())
            .collect(),
    };
    if labels.len() > 1 {
        ids.sort_unstable();
        ids.dedup();
    }
    ids
}

fn node_of(row: &Row, var: VarId) -> NodeId {
    match row[var.0] {
        Some(Elem::Node(id)) => id,
        other => unreachable!("variable {} bound to {other:?}, expected a node", var.0),
    }
}

/// Incident edges of `from` in pattern direction, paired with the far end.
/// Undirected traversal lists a self-loop once.
fn incident<'g>(
    graph: &'g Graph,
    from: NodeId,
    direction: RelDirection,
) -> impl Iterator<Item = (&'g Relationship, NodeId)> + 'g {
    let rel = move |id: &RelId| graph.relationship(*id).expect("adjacency is consistent");
    let out = graph.outgoing(from).unwrap_or(&[]);
    let inc = graph.incoming(from).unwrap_or(&[]);
    let (out, inc): (&[RelId], &[RelId]) = match direction {
        RelDirection::LeftToRight => (out, &[]),
        RelDirection::RightToLeft => (&[], inc),
        RelDirection::Undirected => (out, inc),
    };
    let undirected = direction == RelDirection::Undirected;
    out.iter()
        .map(rel)
        .map(|r| (r, r.dst))
        .chain(
            inc.iter()
                .map(rel)
                .filter(move |r| !(undirected && r.src == r.dst))
                .map(|r| (r, r.src)),
        )
}

/// Runs `plan` against `graph`. Rows follow ascending id order for scans and
/// insertion order for expansions, so results are deterministic.
pub fn execute(plan: &LogicalPlan, graph: &Graph) -> ResultTable {
    execute_with(plan, graph, ExecOptions::default())
}

pub fn execute_with(plan: &LogicalPlan, graph: &Graph, options: ExecOptions) -> ResultTable {
    let names: HashMap<&str, VarId> = plan
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.anonymous)
        .map(|(i, v)| (v.name.as_str(), VarId(i)))
        .collect();
    let mut stats = ExecStats::default();
    let mut rows: Vec<Row> = vec![vec![None; plan.vars.len()]];
    let mut projected: Vec<Vec<Cell>> = Vec::new();

    for step in &plan.steps {
        match step {
            PlanStep::NodeScan { var, labels, props } => {
                let candidates = scan_candidates(graph, labels, props, options);
                stats.nodes_touched += candidates.len() as u64;
                let matching: Vec<NodeId> = candidates
                    .into_iter()
                    .filter(|id| node_matches(graph.node(*id).unwrap(), labels, props))
                    .collect();
                let mut next = Vec::with_capacity(rows.len() * matching.len());
                for row in &rows {
                    for id in &matching {
                        let mut row = row.clone();
                        row[var.0] = Some(Elem::Node(*id));
                        next.push(row);
                    }
                }
                rows = next;
            }
            PlanStep::NodeCheck { var, labels, props } => {
                rows.retain(|row| node_matches(graph.node(node_of(row, *var)).unwrap(), labels, props));
            }
            PlanStep::Expand {
                from,
                rel,
                rel_bound,
                rel_type,
                direction,
                rel_props,
                to,
                to_bound,
                to_labels,
                to_props,
                distinct_from,
            } => {
                let mut next = Vec::new();
                for row in &rows {
                    let start = node_of(row, *from);
                    for (edge, other) in incident(graph, start, *direction) {
                        if edge.rel_type != *rel_type || !props_match(&edge.properties, rel_props) {
                            continue;
                        }
                        let this = Some(Elem::Rel(edge.id));
                        if *rel_bound && row[rel.0] != this {
                            continue;
                        }
                        if distinct_from.iter().any(|r| row[r.0] == this) {
                            continue;
                        }
                        if *to_bound && node_of(row, *to) != other {
                            continue;
                        }
                        if !node_matches(graph.node(other).unwrap(), to_labels, to_props) {
                            continue;
                        }
                        let mut row = row.clone();
                        row[rel.0] = this;
                        row[to.0] = Some(Elem::Node(other));
                        next.push(row);
                    }
                }
                rows = next;
            }
            PlanStep::Filter { expr } => {
                let mut diag = Diagnostics::default();
                rows.retain(|row| {
                    let lookup = |name: &str| names.get(name).and_then(|id| row[id.0]);
                    evaluate_predicate(expr, &lookup, graph, &mut diag)
                });
                stats.absorb(diag);
            }
            PlanStep::Project { items } => {
                projected = rows
                    .iter()
                    .map(|row| {
                        items
                            .iter()
                            .map(|item| {
                                let bound = names.get(item.expr.var()).and_then(|id| row[id.0]);
                                match (&item.expr, bound) {
                                    (_, None) => Cell::Null,
                                    (ReturnExpr::Variable(_), Some(Elem::Node(id))) => Cell::Node(id),
                                    (ReturnExpr::Variable(_), Some(Elem::Rel(id))) => Cell::Rel(id),
                                    (ReturnExpr::Property(a), Some(elem)) => {
                                        let value = match elem {
                                            Elem::Node(id) => graph.node(id).and_then(|n| n.property(&a.key)),
                                            Elem::Rel(id) => {
                                                graph.relationship(id).and_then(|r| r.property(&a.key))
                                            }
                                        };
                                        value.cloned().map_or(Cell::Null, Cell::Value)
                                    }
                                }
                            })
                            .collect()
                    })
                    .collect();
            }
        }
    }

    let row_elements: Vec<Vec<Elem>> = rows
        .into_iter()
        .map(|row| row.into_iter().flatten().collect())
        .collect();
    ResultTable {
        columns: plan.columns.clone(),
        rows: projected,
        subgraph: Subgraph::from_rows(&row_elements),
        stats,
        row_elements,
    }
}
