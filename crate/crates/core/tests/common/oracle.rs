//! Brute-force reference matcher. Enumerates every assignment of pattern
//! variables to graph elements and keeps those satisfying every constraint.
//! Shares nothing with the engine except the AST and graph types.

use std::collections::HashMap;

use climakg_core::cypher::{
    CompareOp, Expr, Literal, Operand, QueryAst, RelDirection, ReturnExpr,
};
use climakg_core::engine::Cell;
use climakg_core::{Graph, PropertyValue};

#[derive(Debug, Clone, PartialEq)]
pub enum OValue {
    Text(String),
    Int(i64),
    Real(f64),
    Bool(bool),
    List(Vec<OValue>),
}

/// A result cell in a form both sides can be compared in.
#[derive(Debug, Clone, PartialEq)]
pub enum OCell {
    Null,
    Value(OValue),
    Node(u64),
    Rel(u64),
}

fn from_prop(v: &PropertyValue) -> OValue {
    match v {
        PropertyValue::Text(s) => OValue::Text(s.clone()),
        PropertyValue::Int(i) => OValue::Int(*i),
        PropertyValue::Real(f) => OValue::Real(*f),
        PropertyValue::Bool(b) => OValue::Bool(*b),
        PropertyValue::TextList(items) => OValue::List(items.iter().cloned().map(OValue::Text).collect()),
    }
}

fn from_literal(l: &Literal) -> OValue {
    match l {
        Literal::Str(s) => OValue::Text(s.clone()),
        Literal::Int(i) => OValue::Int(*i),
        Literal::Float(f) => OValue::Real(*f),
        Literal::List(items) => OValue::List(items.iter().map(from_literal).collect()),
    }
}

pub fn engine_cell(c: &Cell) -> OCell {
    match c {
        Cell::Null => OCell::Null,
        Cell::Value(v) => OCell::Value(from_prop(v)),
        Cell::Node(id) => OCell::Node(id.0),
        Cell::Rel(id) => OCell::Rel(id.0),
    }
}

/// Bag of rows in a canonical order, for equality checks.
pub fn bag(rows: impl IntoIterator<Item = Vec<OCell>>) -> Vec<String> {
    let mut out: Vec<String> = rows.into_iter().map(|r| format!("{r:?}")).collect();
    out.sort();
    out
}

pub fn engine_bag(table: &climakg_core::ResultTable) -> Vec<String> {
    bag(table.rows.iter().map(|r| r.iter().map(engine_cell).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Node,
    Rel,
}

enum Constraint {
    Node { var: usize, labels: Vec<String>, props: Vec<(String, OValue)> },
    Rel { var: usize, rel_type: String, props: Vec<(String, OValue)> },
    /// rel touches `from` on the side the direction requires
    RelFrom { rel: usize, from: usize, dir: RelDirection },
    RelEnds { rel: usize, from: usize, to: usize, dir: RelDirection },
    Distinct(usize, usize),
}

impl Constraint {
    fn vars(&self) -> Vec<usize> {
        match self {
            Constraint::Node { var, .. } | Constraint::Rel { var, .. } => vec![*var],
            Constraint::RelFrom { rel, from, .. } => vec![*rel, *from],
            Constraint::RelEnds { rel, from, to, .. } => vec![*rel, *from, *to],
            Constraint::Distinct(a, b) => vec![*a, *b],
        }
    }
}

struct Compiled {
    kinds: Vec<Kind>,
    names: HashMap<String, usize>,
    /// constraints to check once slot `i` is bound
    at: Vec<Vec<Constraint>>,
    filters: Vec<Expr>,
}

fn compile(ast: &QueryAst) -> Compiled {
    let mut kinds = Vec::new();
    let mut names = HashMap::new();
    let mut constraints = Vec::new();
    let mut slot = |name: &Option<String>, kind: Kind, kinds: &mut Vec<Kind>| -> usize {
        if let Some(n) = name {
            if let Some(&i) = names.get(n) {
                return i;
            }
        }
        kinds.push(kind);
        let i = kinds.len() - 1;
        if let Some(n) = name {
            names.insert(n.clone(), i);
        }
        i
    };
    let props = |p: &[(String, Literal)]| -> Vec<(String, OValue)> {
        p.iter().map(|(k, v)| (k.clone(), from_literal(v))).collect()
    };
    let mut filters = Vec::new();
    for clause in &ast.clauses {
        for path in &clause.patterns {
            let mut from = slot(&path.start.var, Kind::Node, &mut kinds);
            constraints.push(Constraint::Node {
                var: from,
                labels: path.start.labels.clone(),
                props: props(&path.start.props),
            });
            let mut rels_in_path: Vec<usize> = Vec::new();
            for (rel, node) in &path.steps {
                let r = slot(&rel.var, Kind::Rel, &mut kinds);
                constraints.push(Constraint::Rel {
                    var: r,
                    rel_type: rel.rel_type.clone(),
                    props: props(&rel.props),
                });
                constraints.push(Constraint::RelFrom { rel: r, from, dir: rel.direction });
                for earlier in &rels_in_path {
                    constraints.push(Constraint::Distinct(*earlier, r));
                }
                rels_in_path.push(r);
                let to = slot(&node.var, Kind::Node, &mut kinds);
                constraints.push(Constraint::Node {
                    var: to,
                    labels: node.labels.clone(),
                    props: props(&node.props),
                });
                constraints.push(Constraint::RelEnds { rel: r, from, to, dir: rel.direction });
                from = to;
            }
        }
        if let Some(w) = &clause.where_clause {
            filters.push(w.clone());
        }
    }
    let mut at: Vec<Vec<Constraint>> = (0..kinds.len()).map(|_| Vec::new()).collect();
    for c in constraints {
        let last = c.vars().into_iter().max().unwrap();
        at[last].push(c);
    }
    Compiled { kinds, names, at, filters }
}

fn props_ok(have: &climakg_core::Properties, want: &[(String, OValue)]) -> bool {
    want.iter().all(|(k, v)| have.get(k).map(from_prop).as_ref() == Some(v))
}

fn check(c: &Constraint, b: &[u64], g: &Graph) -> bool {
    use climakg_core::{NodeId, RelId};
    match c {
        Constraint::Node { var, labels, props } => {
            let n = g.node(NodeId(b[*var])).unwrap();
            (labels.is_empty() || labels.iter().any(|l| n.labels.contains(l))) && props_ok(&n.properties, props)
        }
        Constraint::Rel { var, rel_type, props } => {
            let r = g.relationship(RelId(b[*var])).unwrap();
            r.rel_type == *rel_type && props_ok(&r.properties, props)
        }
        Constraint::RelFrom { rel, from, dir } => {
            let r = g.relationship(RelId(b[*rel])).unwrap();
            let f = b[*from];
            match dir {
                RelDirection::LeftToRight => r.src.0 == f,
                RelDirection::RightToLeft => r.dst.0 == f,
                RelDirection::Undirected => r.src.0 == f || r.dst.0 == f,
            }
        }
        Constraint::RelEnds { rel, from, to, dir } => {
            let r = g.relationship(RelId(b[*rel])).unwrap();
            let (f, t) = (b[*from], b[*to]);
            let fwd = r.src.0 == f && r.dst.0 == t;
            let back = r.dst.0 == f && r.src.0 == t;
            match dir {
                RelDirection::LeftToRight => fwd,
                RelDirection::RightToLeft => back,
                RelDirection::Undirected => fwd || back,
            }
        }
        Constraint::Distinct(a, b2) => b[*a] != b[*b2],
    }
}

struct Env<'a> {
    c: &'a Compiled,
    b: &'a [u64],
    g: &'a Graph,
}

impl Env<'_> {
    fn prop(&self, var: &str, key: &str) -> Option<OValue> {
        use climakg_core::{NodeId, RelId};
        let i = *self.c.names.get(var)?;
        let v = match self.c.kinds[i] {
            Kind::Node => self.g.node(NodeId(self.b[i]))?.properties.get(key),
            Kind::Rel => self.g.relationship(RelId(self.b[i]))?.properties.get(key),
        }?;
        Some(from_prop(v))
    }

    fn operand(&self, o: &Operand) -> Option<OValue> {
        match o {
            Operand::Literal(l) => Some(from_literal(l)),
            Operand::Property(a) => self.prop(&a.var, &a.key),
        }
    }

    fn eval(&self, e: &Expr) -> bool {
        match e {
            Expr::Or(items) => items.iter().any(|x| self.eval(x)),
            Expr::And(items) => items.iter().all(|x| self.eval(x)),
            Expr::Paren(inner) => self.eval(inner),
            Expr::Compare { lhs, op, rhs } => {
                let (Some(l), Some(r)) = (self.operand(lhs), self.operand(rhs)) else {
                    return false;
                };
                match op {
                    CompareOp::Eq => l == r,
                    CompareOp::Contains => match (l, r) {
                        (OValue::Text(h), OValue::Text(n)) => h.contains(&n),
                        _ => false,
                    },
                    CompareOp::In => match (l, r) {
                        (OValue::List(_), _) => false,
                        (item, OValue::List(list)) => list.contains(&item),
                        _ => false,
                    },
                }
            }
        }
    }

    fn project(&self, ast: &QueryAst) -> Vec<OCell> {
        ast.return_clause
            .items
            .iter()
            .map(|item| match &item.expr {
                ReturnExpr::Variable(v) => {
                    let i = self.c.names[v];
                    match self.c.kinds[i] {
                        Kind::Node => OCell::Node(self.b[i]),
                        Kind::Rel => OCell::Rel(self.b[i]),
                    }
                }
                ReturnExpr::Property(a) => self.prop(&a.var, &a.key).map_or(OCell::Null, OCell::Value),
            })
            .collect()
    }
}

fn search(c: &Compiled, ast: &QueryAst, g: &Graph, b: &mut Vec<u64>, out: &mut Vec<Vec<OCell>>) {
    let i = b.len();
    if i == c.kinds.len() {
        let env = Env { c, b, g };
        if c.filters.iter().all(|f| env.eval(f)) {
            out.push(env.project(ast));
        }
        return;
    }
    let domain = match c.kinds[i] {
        Kind::Node => g.node_count() as u64,
        Kind::Rel => g.rel_count() as u64,
    };
    for candidate in 0..domain {
        b.push(candidate);
        if c.at[i].iter().all(|con| check(con, b, g)) {
            search(c, ast, g, b, out);
        }
        b.pop();
    }
}

/// All result rows of `ast` over `graph`, in no particular order.
pub fn run(ast: &QueryAst, graph: &Graph) -> Vec<Vec<OCell>> {
    let compiled = compile(ast);
    let mut out = Vec::new();
    search(&compiled, ast, graph, &mut Vec::new(), &mut out);
    out
}
