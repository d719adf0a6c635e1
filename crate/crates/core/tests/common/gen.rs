//! Seeded random graphs and queries.

use climakg_core::cypher::{
    is_reserved_word, CompareOp, Expr, Literal, MatchClause, NodePattern, Operand, PathPattern,
    PropertyAccess, QueryAst, RelDirection, RelPattern, ReturnClause, ReturnExpr, ReturnItem,
};
use climakg_core::{Graph, NodeId, Properties, PropertyValue};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const LABELS: [&str; 3] = ["A", "B", "C"];
pub const REL_TYPES: [&str; 2] = ["R", "S"];
pub const NAMES: [&str; 4] = ["x", "y", "z", "xy"];
const NODE_VARS: [&str; 4] = ["a", "b", "c", "d"];
const REL_VARS: [&str; 3] = ["r", "s", "t"];
const KEYS: [&str; 5] = ["Name", "k", "tags", "w", "note"];

fn pick<'a, R: Rng>(rng: &mut R, items: &'a [&'a str]) -> &'a str {
    items.choose(rng).unwrap()
}

/// Up to `max_nodes` nodes and `max_edges` edges over a tiny vocabulary so
/// that random patterns actually match something.
pub fn small_graph<R: Rng>(rng: &mut R, max_nodes: usize, max_edges: usize) -> Graph {
    let mut g = Graph::new();
    let n = rng.random_range(1.max(max_nodes / 3)..=max_nodes);
    for _ in 0..n {
        let mut labels = vec![pick(rng, &LABELS)];
        if rng.random_bool(0.2) {
            labels.push(pick(rng, &LABELS));
        }
        let mut props = Properties::new();
        if rng.random_bool(0.7) {
            props.insert("Name".into(), pick(rng, &NAMES).into());
        }
        if rng.random_bool(0.4) {
            props.insert("k".into(), PropertyValue::Int(rng.random_range(0..3)));
        }
        if rng.random_bool(0.2) {
            let tags = NAMES.iter().filter(|_| rng.random_bool(0.5)).map(|s| s.to_string()).collect();
            props.insert("tags".into(), PropertyValue::TextList(tags));
        }
        if rng.random_bool(0.1) {
            props.insert("k".into(), PropertyValue::Real(rng.random_range(0..3) as f64));
        }
        g.add_node(labels, props).unwrap();
    }
    // skewed dense: sparse graphs make most multi-hop patterns empty
    let m = rng.random_range(max_edges.min(n)..=max_edges);
    for _ in 0..m {
        let src = NodeId(rng.random_range(0..n as u64));
        let dst = NodeId(rng.random_range(0..n as u64));
        let mut props = Properties::new();
        if rng.random_bool(0.4) {
            props.insert("w".into(), PropertyValue::Int(rng.random_range(0..2)));
        }
        if rng.random_bool(0.3) {
            props.insert("note".into(), pick(rng, &NAMES).into());
        }
        g.add_relationship(src, dst, pick(rng, &REL_TYPES), props).unwrap();
    }
    g
}

fn small_literal<R: Rng>(rng: &mut R, key: &str) -> Literal {
    match key {
        "k" | "w" => {
            if rng.random_bool(0.85) {
                Literal::Int(rng.random_range(0..3))
            } else {
                Literal::Float(rng.random_range(0..3) as f64)
            }
        }
        "tags" => Literal::List(NAMES.iter().filter(|_| rng.random_bool(0.5)).map(|s| Literal::str(s)).collect()),
        _ => Literal::str(pick(rng, &NAMES)),
    }
}

fn small_compare<R: Rng>(rng: &mut R, bound: &[String]) -> Expr {
    let var = bound.choose(rng).unwrap().clone();
    if rng.random_bool(0.1) {
        return wild_compare(rng, &var);
    }
    // operators that suit the key's type, so filters keep some rows
    if REL_VARS.contains(&var.as_str()) {
        let key = pick(rng, &["w", "note"]);
        let lhs = Operand::Property(PropertyAccess::new(&var, key));
        return match (key, rng.random_range(0..2)) {
            ("w", 0) => Expr::compare(lhs, CompareOp::Eq, Operand::Literal(Literal::Int(rng.random_range(0..2)))),
            ("w", _) => Expr::compare(lhs, CompareOp::In, Operand::Literal(Literal::List(vec![Literal::Int(0), Literal::Int(1)]))),
            (_, 0) => Expr::compare(lhs, CompareOp::Contains, Operand::Literal(Literal::str(pick(rng, &["x", "y", ""])))),
            _ => Expr::compare(lhs, CompareOp::Eq, Operand::Literal(Literal::str(pick(rng, &NAMES)))),
        };
    }
    let key = pick(rng, &["Name", "Name", "k", "tags"]);
    let lhs = Operand::Property(PropertyAccess::new(&var, key));
    match key {
        "tags" => Expr::compare(Operand::Literal(Literal::str(pick(rng, &NAMES))), CompareOp::In, lhs),
        "k" => match rng.random_range(0..2) {
            0 => Expr::compare(lhs, CompareOp::Eq, Operand::Literal(small_literal(rng, "k"))),
            _ => Expr::compare(lhs, CompareOp::In, Operand::Literal(Literal::List(vec![Literal::Int(0), Literal::Int(rng.random_range(1..3))]))),
        },
        _ => match rng.random_range(0..3) {
            0 => Expr::compare(lhs, CompareOp::Contains, Operand::Literal(Literal::str(pick(rng, &["x", "y", "z", ""])))),
            1 => Expr::compare(lhs, CompareOp::Eq, Operand::Literal(Literal::str(pick(rng, &NAMES)))),
            _ => Expr::compare(
                lhs,
                CompareOp::In,
                Operand::Literal(Literal::List(NAMES.iter().filter(|_| rng.random_bool(0.6)).map(|s| Literal::str(s)).collect())),
            ),
        },
    }
}

/// Any key with any operator: mostly type mismatches and missing keys.
fn wild_compare<R: Rng>(rng: &mut R, var: &str) -> Expr {
    let key = pick(rng, &KEYS);
    let lhs = Operand::Property(PropertyAccess::new(var, key));
    match rng.random_range(0..3) {
        0 => {
            let needle = if rng.random_bool(0.2) { "X" } else { pick(rng, &NAMES) };
            Expr::compare(lhs, CompareOp::Contains, Operand::Literal(Literal::str(needle)))
        }
        1 => Expr::compare(lhs, CompareOp::Eq, Operand::Literal(small_literal(rng, key))),
        _ => {
            let list = if key == "k" || key == "w" {
                Literal::List((0..rng.random_range(1..3)).map(|_| Literal::Int(rng.random_range(0..3))).collect())
            } else {
                Literal::List(NAMES.iter().filter(|_| rng.random_bool(0.5)).map(|s| Literal::str(s)).collect())
            };
            if key == "tags" && rng.random_bool(0.5) {
                // membership of a literal in a list-valued property
                Expr::compare(Operand::Literal(Literal::str(pick(rng, &NAMES))), CompareOp::In, lhs)
            } else {
                Expr::compare(lhs, CompareOp::In, Operand::Literal(list))
            }
        }
    }
}

fn small_expr<R: Rng>(rng: &mut R, bound: &[String], depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.5) {
        return small_compare(rng, bound);
    }
    let n = rng.random_range(2..=3);
    let items: Vec<Expr> = (0..n)
        .map(|_| {
            let e = small_expr(rng, bound, depth - 1);
            match e {
                Expr::Or(_) | Expr::And(_) => Expr::paren(e),
                other => other,
            }
        })
        .collect();
    // conjunctions of independent comparisons are nearly always empty
    if rng.random_bool(0.65) {
        Expr::Or(items)
    } else {
        Expr::And(items)
    }
}

fn small_node<R: Rng>(rng: &mut R, force_var: Option<&str>, named: &mut Vec<String>) -> NodePattern {
    let var = force_var
        .map(str::to_owned)
        .or_else(|| rng.random_bool(0.7).then(|| pick(rng, &NODE_VARS).to_owned()));
    if let Some(v) = &var {
        if !named.contains(v) {
            named.push(v.clone());
        }
    }
    let mut labels = Vec::new();
    if rng.random_bool(0.35) {
        labels.push(pick(rng, &LABELS).to_owned());
        if rng.random_bool(0.15) {
            labels.push(pick(rng, &LABELS).to_owned());
        }
    }
    let mut props = Vec::new();
    if rng.random_bool(0.2) {
        let key = pick(rng, &["Name", "Name", "k"]);
        props.push((key.to_owned(), small_literal(rng, key)));
    }
    NodePattern { var, labels, props }
}

fn small_rel<R: Rng>(rng: &mut R, named: &mut Vec<String>) -> RelPattern {
    let var = rng.random_bool(0.4).then(|| pick(rng, &REL_VARS).to_owned());
    if let Some(v) = &var {
        if !named.contains(v) {
            named.push(v.clone());
        }
    }
    let mut props = Vec::new();
    if rng.random_bool(0.15) {
        props.push(("w".to_owned(), Literal::Int(rng.random_range(0..2))));
    }
    let direction = *[RelDirection::LeftToRight, RelDirection::RightToLeft, RelDirection::Undirected]
        .choose(rng)
        .unwrap();
    RelPattern {
        var,
        rel_type: pick(rng, &REL_TYPES).to_owned(),
        props,
        direction,
    }
}

/// A query the planner accepts: WHERE and RETURN only use variables bound
/// by the clauses so far; node and relationship variable names never clash.
pub fn small_query<R: Rng>(rng: &mut R) -> QueryAst {
    let mut named: Vec<String> = Vec::new();
    let mut clauses = Vec::new();
    let n_clauses = rng.random_range(1..=3);
    for ci in 0..n_clauses {
        let n_patterns = if rng.random_bool(0.25) { 2 } else { 1 };
        let mut patterns = Vec::new();
        for pi in 0..n_patterns {
            let force = (ci == 0 && pi == 0).then_some("a");
            let mut path = PathPattern::node(small_node(rng, force, &mut named));
            for _ in 0..rng.random_range(0..=2) {
                let rel = small_rel(rng, &mut named);
                let node = small_node(rng, None, &mut named);
                path = path.then(rel, node);
            }
            patterns.push(path);
        }
        let where_clause = rng.random_bool(0.35).then(|| small_expr(rng, &named, 2));
        clauses.push(MatchClause { patterns, where_clause });
    }
    let items = (0..rng.random_range(1..=3))
        .map(|i| {
            let var = named.choose(rng).unwrap().clone();
            let expr = if rng.random_bool(0.4) {
                ReturnExpr::Variable(var)
            } else {
                ReturnExpr::Property(PropertyAccess::new(&var, pick(rng, &KEYS)))
            };
            ReturnItem { expr, alias: Some(format!("c{i}")) }
        })
        .collect();
    QueryAst {
        clauses,
        return_clause: ReturnClause { items },
    }
}

/// Moves every pattern property map into an equality conjunction in the
/// clause's WHERE, naming anonymous elements that carry properties.
pub fn desugar_prop_maps(ast: &QueryAst) -> QueryAst {
    let mut out = ast.clone();
    let mut fresh = 0;
    let mut name = |var: &mut Option<String>| -> String {
        if var.is_none() {
            *var = Some(format!("_d{fresh}"));
            fresh += 1;
        }
        var.clone().unwrap()
    };
    for clause in &mut out.clauses {
        let mut eqs = Vec::new();
        for path in &mut clause.patterns {
            let mut nodes: Vec<&mut NodePattern> = vec![&mut path.start];
            let mut rels = Vec::new();
            for (r, n) in &mut path.steps {
                rels.push(r);
                nodes.push(n);
            }
            for n in nodes {
                if !n.props.is_empty() {
                    let v = name(&mut n.var);
                    for (k, lit) in n.props.drain(..) {
                        eqs.push(Expr::prop_cmp(&v, &k, CompareOp::Eq, lit));
                    }
                }
            }
            for r in rels {
                if !r.props.is_empty() {
                    let v = name(&mut r.var);
                    for (k, lit) in r.props.drain(..) {
                        eqs.push(Expr::prop_cmp(&v, &k, CompareOp::Eq, lit));
                    }
                }
            }
        }
        if eqs.is_empty() {
            continue;
        }
        let mut conj = Vec::new();
        if let Some(w) = clause.where_clause.take() {
            conj.push(Expr::paren(w));
        }
        conj.extend(eqs);
        clause.where_clause = Some(if conj.len() == 1 { conj.remove(0) } else { Expr::And(conj) });
    }
    out
}

// ---- wide generators for round-trip fuzzing ----

pub fn ident<R: Rng>(rng: &mut R) -> String {
    const FIRST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    const REST: &[u8] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_0123456789";
    loop {
        let len = rng.random_range(1..=8);
        let mut s = String::new();
        s.push(*FIRST.choose(rng).unwrap() as char);
        for _ in 1..len {
            s.push(*REST.choose(rng).unwrap() as char);
        }
        if !is_reserved_word(&s) {
            return s;
        }
    }
}

pub fn text<R: Rng>(rng: &mut R) -> String {
    const POOL: &[char] = &[
        'a', 'Z', '0', ' ', '\'', '"', '\\', '\n', '\t', '\r', 'é', 'ß', '°', '𝄞', '{', '}', '(', ')', '-', '>', '<',
        ':', ',', '.', '|', '*', '=', '\u{1}',
    ];
    let len = rng.random_range(0..12);
    (0..len).map(|_| *POOL.choose(rng).unwrap()).collect()
}

fn finite_f64<R: Rng>(rng: &mut R) -> f64 {
    match rng.random_range(0..4) {
        0 => rng.random_range(-1000.0..1000.0),
        1 => rng.random_range(-3..3) as f64,
        _ => loop {
            let f = f64::from_bits(rng.random());
            if f.is_finite() {
                return f;
            }
        },
    }
}

fn scalar<R: Rng>(rng: &mut R) -> Literal {
    match rng.random_range(0..3) {
        0 => Literal::Str(text(rng)),
        1 => Literal::Int(if rng.random_bool(0.5) { rng.random() } else { rng.random_range(-10..10) }),
        _ => Literal::Float(finite_f64(rng)),
    }
}

fn literal<R: Rng>(rng: &mut R) -> Literal {
    if rng.random_bool(0.2) {
        Literal::List((0..rng.random_range(0..4)).map(|_| scalar(rng)).collect())
    } else {
        scalar(rng)
    }
}

fn prop_map<R: Rng>(rng: &mut R) -> Vec<(String, Literal)> {
    if rng.random_bool(0.6) {
        return Vec::new();
    }
    // property maps take scalar literals only
    (0..rng.random_range(1..=3)).map(|_| (ident(rng), scalar(rng))).collect()
}

fn operand<R: Rng>(rng: &mut R) -> Operand {
    if rng.random_bool(0.7) {
        Operand::Property(PropertyAccess::new(&ident(rng), &ident(rng)))
    } else {
        Operand::Literal(literal(rng))
    }
}

fn compare<R: Rng>(rng: &mut R) -> Expr {
    let op = *[CompareOp::Contains, CompareOp::Eq, CompareOp::In].choose(rng).unwrap();
    Expr::compare(operand(rng), op, operand(rng))
}

/// `Or`/`And` children are never themselves bare `Or`/`And` of the same
/// or looser binding, which the grammar could not express.
fn expr<R: Rng>(rng: &mut R, depth: u32) -> Expr {
    if depth == 0 {
        return compare(rng);
    }
    match rng.random_range(0..4) {
        0 => compare(rng),
        1 => Expr::paren(expr(rng, depth - 1)),
        2 => Expr::And(
            (0..rng.random_range(2..=3))
                .map(|_| match expr(rng, depth - 1) {
                    e @ (Expr::Or(_) | Expr::And(_)) => Expr::paren(e),
                    e => e,
                })
                .collect(),
        ),
        _ => Expr::Or(
            (0..rng.random_range(2..=3))
                .map(|_| match expr(rng, depth - 1) {
                    e @ Expr::Or(_) => Expr::paren(e),
                    e => e,
                })
                .collect(),
        ),
    }
}

fn node<R: Rng>(rng: &mut R) -> NodePattern {
    NodePattern {
        var: rng.random_bool(0.7).then(|| ident(rng)),
        labels: (0..rng.random_range(0..3)).map(|_| ident(rng)).collect(),
        props: prop_map(rng),
    }
}

fn rel<R: Rng>(rng: &mut R) -> RelPattern {
    RelPattern {
        var: rng.random_bool(0.5).then(|| ident(rng)),
        rel_type: ident(rng),
        props: prop_map(rng),
        direction: *[RelDirection::LeftToRight, RelDirection::RightToLeft, RelDirection::Undirected]
            .choose(rng)
            .unwrap(),
    }
}

/// Arbitrary syntactically valid AST; variables need not be bound.
pub fn arbitrary_ast<R: Rng>(rng: &mut R) -> QueryAst {
    let clauses = (0..rng.random_range(1..=3))
        .map(|_| MatchClause {
            patterns: (0..rng.random_range(1..=2))
                .map(|_| {
                    let mut p = PathPattern::node(node(rng));
                    for _ in 0..rng.random_range(0..=3) {
                        p = p.then(rel(rng), node(rng));
                    }
                    p
                })
                .collect(),
            where_clause: rng.random_bool(0.5).then(|| expr(rng, 3)),
        })
        .collect();
    let items = (0..rng.random_range(1..=4))
        .map(|_| ReturnItem {
            expr: if rng.random_bool(0.5) {
                ReturnExpr::Variable(ident(rng))
            } else {
                ReturnExpr::Property(PropertyAccess::new(&ident(rng), &ident(rng)))
            },
            alias: rng.random_bool(0.5).then(|| ident(rng)),
        })
        .collect();
    QueryAst {
        clauses,
        return_clause: ReturnClause { items },
    }
}

fn property_value<R: Rng>(rng: &mut R) -> PropertyValue {
    match rng.random_range(0..5) {
        0 => PropertyValue::Text(text(rng)),
        1 => PropertyValue::Int(rng.random()),
        2 => PropertyValue::Real(finite_f64(rng)),
        3 => PropertyValue::Bool(rng.random()),
        _ => PropertyValue::TextList((0..rng.random_range(0..4)).map(|_| text(rng)).collect()),
    }
}

/// Graph with every value type, odd strings and a random indexed-key set.
pub fn wide_graph<R: Rng>(rng: &mut R, max_nodes: usize) -> Graph {
    let n = rng.random_range(0..=max_nodes);
    wide_graph_of(rng, n)
}

/// Exactly `n` nodes over a random vocabulary.
pub fn wide_graph_of<R: Rng>(rng: &mut R, n: usize) -> Graph {
    let mut keys = vec!["Name".to_owned()];
    if rng.random_bool(0.5) {
        keys.push(ident(rng));
    }
    let mut g = Graph::with_indexed_keys(keys.clone());
    let label_pool: Vec<String> = (0..6).map(|_| ident(rng)).collect();
    let mut key_pool: Vec<String> = (0..6).map(|_| ident(rng)).collect();
    key_pool.extend(keys);
    for _ in 0..n {
        let labels: Vec<String> = (0..rng.random_range(1..=3)).map(|_| label_pool.choose(rng).unwrap().clone()).collect();
        let props: Properties = (0..rng.random_range(0..=4))
            .map(|_| (key_pool.choose(rng).unwrap().clone(), property_value(rng)))
            .collect();
        g.add_node(labels, props).unwrap();
    }
    if n > 0 {
        for _ in 0..rng.random_range(0..=2 * n) {
            let src = NodeId(rng.random_range(0..n as u64));
            let dst = NodeId(rng.random_range(0..n as u64));
            let props: Properties = (0..rng.random_range(0..=2))
                .map(|_| (key_pool.choose(rng).unwrap().clone(), property_value(rng)))
                .collect();
            g.add_relationship(src, dst, label_pool.choose(rng).unwrap().clone(), props).unwrap();
        }
    }
    g
}
