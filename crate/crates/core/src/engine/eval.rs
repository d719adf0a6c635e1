//! WHERE-clause evaluation with two-valued logic: a comparison touching a
//! missing property is simply false.

use crate::cypher::{CompareOp, Expr, Literal, Operand};
use crate::graph::Graph;
use crate::value::PropertyValue;

use super::result::Elem;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct Diagnostics {
    /// CONTAINS/IN applied to values of the wrong type.
    pub type_mismatches: u64,
}

#[derive(Debug, Clone, PartialEq)]
enum Value<'a> {
    Scalar(std::borrow::Cow<'a, PropertyValue>),
    List(Vec<PropertyValue>),
}

fn literal(lit: &Literal) -> Value<'static> {
    let scalar = |l: &Literal| match l {
        Literal::Str(s) => PropertyValue::Text(s.clone()),
        Literal::Int(i) => PropertyValue::Int(*i),
        Literal::Float(f) => PropertyValue::Real(*f),
        Literal::List(_) => unreachable!("nested list literal"),
    };
    match lit {
        Literal::List(items) => Value::List(items.iter().map(scalar).collect()),
        other => Value::Scalar(std::borrow::Cow::Owned(scalar(other))),
    }
}

fn operand<'g, F>(op: &Operand, bindings: &F, graph: &'g Graph) -> Option<Value<'g>>
where
    F: Fn(&str) -> Option<Elem>,
{
    match op {
        Operand::Literal(lit) => Some(literal(lit)),
        Operand::Property(access) => {
            let value = match bindings(&access.var)? {
                Elem::Node(id) => graph.node(id)?.property(&access.key),
                Elem::Rel(id) => graph.relationship(id)?.property(&access.key),
            }?;
            Some(match value {
                PropertyValue::TextList(items) => {
                    Value::List(items.iter().cloned().map(PropertyValue::Text).collect())
                }
                other => Value::Scalar(std::borrow::Cow::Borrowed(other)),
            })
        }
    }
}

/// Evaluates `expr` for one row. `bindings` resolves variable names to bound
/// elements; OR and AND short-circuit left to right.
pub fn evaluate_predicate<F>(expr: &Expr, bindings: &F, graph: &Graph, diag: &mut Diagnostics) -> bool
where
    F: Fn(&str) -> Option<Elem>,
{
    match expr {
        Expr::Or(items) => items
            .iter()
            .any(|e| evaluate_predicate(e, bindings, graph, diag)),
        Expr::And(items) => items
            .iter()
            .all(|e| evaluate_predicate(e, bindings, graph, diag)),
        Expr::Paren(inner) => evaluate_predicate(inner, bindings, graph, diag),
        Expr::Compare { lhs, op, rhs } => {
            let (Some(lhs), Some(rhs)) = (operand(lhs, bindings, graph), operand(rhs, bindings, graph))
            else {
                return false;
            };
            compare(&lhs, *op, &rhs, diag)
        }
    }
}

fn compare(lhs: &Value<'_>, op: CompareOp, rhs: &Value<'_>, diag: &mut Diagnostics) -> bool {
    match op {
        CompareOp::Eq => lhs == rhs,
        CompareOp::Contains => match (lhs, rhs) {
            (Value::Scalar(l), Value::Scalar(r)) => match (l.as_ref(), r.as_ref()) {
                (PropertyValue::Text(haystack), PropertyValue::Text(needle)) => {
                    haystack.contains(needle.as_str())
                }
                _ => {
                    diag.type_mismatches += 1;
                    false
                }
            },
            _ => {
                diag.type_mismatches += 1;
                false
            }
        },
        CompareOp::In => match (lhs, rhs) {
            (Value::Scalar(item), Value::List(list)) => list.iter().any(|v| v == item.as_ref()),
            _ => {
                diag.type_mismatches += 1;
                false
            }
        },
    }
}
