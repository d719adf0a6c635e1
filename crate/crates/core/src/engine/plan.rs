use std::collections::HashMap;
use std::fmt::Write as _;

use crate::cypher::{Expr, Literal, NodePattern, QueryAst, RelDirection, RelPattern, ReturnItem};
use crate::value::PropertyValue;

use super::PlanError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Node,
    Rel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    /// Introduced for an unnamed pattern element; never visible to WHERE/RETURN.
    pub anonymous: bool,
}

/// Property constraints from an inline `{k: v}` map.
pub type PropConstraints = Vec<(String, PropertyValue)>;

#[derive(Debug, Clone, PartialEq)]
pub enum PlanStep {
    /// Binds `var` to each node carrying any of `labels` (any node when empty)
    /// and matching `props`.
    NodeScan {
        var: VarId,
        labels: Vec<String>,
        props: PropConstraints,
    },
    /// Re-checks label and property constraints on an already bound node.
    NodeCheck {
        var: VarId,
        labels: Vec<String>,
        props: PropConstraints,
    },
    /// Extends each row along incident edges of `from`.
    Expand {
        from: VarId,
        rel: VarId,
        /// `rel` was bound earlier; the edge must be that one.
        rel_bound: bool,
        rel_type: String,
        direction: RelDirection,
        rel_props: PropConstraints,
        to: VarId,
        /// `to` was bound earlier; the step acts as a join on identity.
        to_bound: bool,
        to_labels: Vec<String>,
        to_props: PropConstraints,
        /// Relationship variables of the same path pattern bound earlier;
        /// the new edge must differ from all of them.
        distinct_from: Vec<VarId>,
    },
    Filter {
        expr: Expr,
    },
    Project {
        items: Vec<ReturnItem>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogicalPlan {
    pub vars: Vec<Variable>,
    pub steps: Vec<PlanStep>,
    pub columns: Vec<String>,
}

impl LogicalPlan {
    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars
            .iter()
            .position(|v| !v.anonymous && v.name == name)
            .map(VarId)
    }

    /// One human-readable line per step.
    pub fn describe(&self) -> Vec<String> {
        let name = |id: VarId| {
            let v = self.var(id);
            if v.anonymous {
                String::new()
            } else {
                v.name.clone()
            }
        };
        let node = |id: VarId, labels: &[String], props: &PropConstraints| {
            let mut s = name(id);
            if s.is_empty() {
                s.push('_');
            }
            if !labels.is_empty() {
                write!(s, ":{}", labels.join("|")).unwrap();
            }
            if !props.is_empty() {
                s.push_str(&describe_props(props));
            }
            s
        };
        self.steps
            .iter()
            .map(|step| match step {
                PlanStep::NodeScan { var, labels, props } => {
                    format!("NodeScan {}", node(*var, labels, props))
                }
                PlanStep::NodeCheck { var, labels, props } => {
                    format!("NodeCheck {}", node(*var, labels, props))
                }
                PlanStep::Expand {
                    from,
                    rel,
                    rel_type,
                    direction,
                    rel_props,
                    to,
                    to_bound,
                    to_labels,
                    to_props,
                    ..
                } => {
                    let mut r = format!("[{}:{rel_type}", name(*rel));
                    if !rel_props.is_empty() {
                        r.push_str(&describe_props(rel_props));
                    }
                    r.push(']');
                    let (left, right) = match direction {
                        RelDirection::LeftToRight => ("-", "->"),
                        RelDirection::RightToLeft => ("<-", "-"),
                        RelDirection::Undirected => ("-", "-"),
                    };
                    format!(
                        "Expand {}{left}{r}{right}{}{}",
                        name(*from),
                        node(*to, to_labels, to_props),
                        if *to_bound { " (join)" } else { "" }
                    )
                }
                PlanStep::Filter { expr } => format!("Filter {expr}"),
                PlanStep::Project { items } => format!(
                    "Project {}",
                    items
                        .iter()
                        .map(ToString::to_string)
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
            })
            .collect()
    }
}

fn describe_props(props: &PropConstraints) -> String {
    let entries: Vec<String> = props
        .iter()
        .map(|(k, v)| match v {
            PropertyValue::Text(s) => format!("{k}: {s:?}"),
            other => format!("{k}: {other}"),
        })
        .collect();
    format!(" {{{}}}", entries.join(", "))
}

fn literal_value(lit: &Literal) -> PropertyValue {
    match lit {
        Literal::Str(s) => PropertyValue::Text(s.clone()),
        Literal::Int(i) => PropertyValue::Int(*i),
        Literal::Float(f) => PropertyValue::Real(*f),
        Literal::List(items) => PropertyValue::TextList(
            items
                .iter()
                .map(|i| match i {
                    Literal::Str(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect(),
        ),
    }
}

fn constraints(props: &[(String, Literal)]) -> PropConstraints {
    props
        .iter()
        .map(|(k, v)| (k.clone(), literal_value(v)))
        .collect()
}

struct Planner {
    vars: Vec<Variable>,
    by_name: HashMap<String, VarId>,
    bound: Vec<bool>,
    steps: Vec<PlanStep>,
}

impl Planner {
    fn declare(&mut self, name: Option<&String>, kind: VarKind) -> Result<(VarId, bool), PlanError> {
        if let Some(name) = name {
            if let Some(&id) = self.by_name.get(name) {
                if self.vars[id.0].kind != kind {
                    return Err(PlanError::VariableKindConflict(name.clone()));
                }
                return Ok((id, self.bound[id.0]));
            }
        }
        let id = VarId(self.vars.len());
        self.vars.push(Variable {
            name: name.cloned().unwrap_or_else(|| format!("_anon{}", id.0)),
            kind,
            anonymous: name.is_none(),
        });
        self.bound.push(false);
        if let Some(name) = name {
            self.by_name.insert(name.clone(), id);
        }
        Ok((id, false))
    }

    fn check_bound(&self, name: &str) -> Result<(), PlanError> {
        match self.by_name.get(name) {
            Some(id) if self.bound[id.0] => Ok(()),
            _ => Err(PlanError::UnboundVariable(name.to_owned())),
        }
    }

    fn start_node(&mut self, pat: &NodePattern) -> Result<VarId, PlanError> {
        let (id, bound) = self.declare(pat.var.as_ref(), VarKind::Node)?;
        let labels = pat.labels.clone();
        let props = constraints(&pat.props);
        if bound {
            if !labels.is_empty() || !props.is_empty() {
                self.steps.push(PlanStep::NodeCheck { var: id, labels, props });
            }
        } else {
            self.steps.push(PlanStep::NodeScan { var: id, labels, props });
            self.bound[id.0] = true;
        }
        Ok(id)
    }

    fn expand(
        &mut self,
        from: VarId,
        rel: &RelPattern,
        node: &NodePattern,
        path_rels: &mut Vec<VarId>,
    ) -> Result<VarId, PlanError> {
        let (rel_id, rel_bound) = self.declare(rel.var.as_ref(), VarKind::Rel)?;
        let (to, to_bound) = self.declare(node.var.as_ref(), VarKind::Node)?;
        // a node variable repeated inside one step, e.g. (a)-[:R]->(a)
        let to_bound = to_bound || to == from;
        self.steps.push(PlanStep::Expand {
            from,
            rel: rel_id,
            rel_bound,
            rel_type: rel.rel_type.clone(),
            direction: rel.direction,
            rel_props: constraints(&rel.props),
            to,
            to_bound,
            to_labels: node.labels.clone(),
            to_props: constraints(&node.props),
            distinct_from: path_rels.clone(),
        });
        self.bound[rel_id.0] = true;
        self.bound[to.0] = true;
        path_rels.push(rel_id);
        Ok(to)
    }
}

/// Clause-ordered plan: scans for first occurrences, expansions along each
/// path pattern, and a filter right after the clause that owns each WHERE.
pub fn plan(ast: &QueryAst) -> Result<LogicalPlan, PlanError> {
    let mut planner = Planner {
        vars: Vec::new(),
        by_name: HashMap::new(),
        bound: Vec::new(),
        steps: Vec::new(),
    };
    for clause in &ast.clauses {
        for pattern in &clause.patterns {
            let mut current = planner.start_node(&pattern.start)?;
            let mut path_rels = Vec::new();
            for (rel, node) in &pattern.steps {
                current = planner.expand(current, rel, node, &mut path_rels)?;
            }
        }
        if let Some(expr) = &clause.where_clause {
            for access in expr.property_accesses() {
                planner.check_bound(&access.var)?;
            }
            planner.steps.push(PlanStep::Filter { expr: expr.clone() });
        }
    }
    for item in &ast.return_clause.items {
        planner.check_bound(item.expr.var())?;
    }
    planner.steps.push(PlanStep::Project {
        items: ast.return_clause.items.clone(),
    });
    Ok(LogicalPlan {
        vars: planner.vars,
        steps: planner.steps,
        columns: ast
            .return_clause
            .items
            .iter()
            .map(ReturnItem::column_name)
            .collect(),
    })
}
