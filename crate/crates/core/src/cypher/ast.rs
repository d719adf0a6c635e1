/// A parsed query: one or more `MATCH` clauses followed by `RETURN`.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryAst {
    pub clauses: Vec<MatchClause>,
    pub return_clause: ReturnClause,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchClause {
    pub patterns: Vec<PathPattern>,
    pub where_clause: Option<Expr>,
}

/// `node (rel node)*`
#[derive(Debug, Clone, PartialEq)]
pub struct PathPattern {
    pub start: NodePattern,
    pub steps: Vec<(RelPattern, NodePattern)>,
}

impl PathPattern {
    pub fn node(start: NodePattern) -> Self {
        PathPattern {
            start,
            steps: Vec::new(),
        }
    }

    pub fn then(mut self, rel: RelPattern, node: NodePattern) -> Self {
        self.steps.push((rel, node));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodePattern {
    pub var: Option<String>,
    /// Label disjunction; empty matches any node.
    pub labels: Vec<String>,
    pub props: Vec<(String, Literal)>,
}

impl NodePattern {
    pub fn var(name: &str) -> Self {
        NodePattern {
            var: Some(name.to_owned()),
            ..Default::default()
        }
    }

    pub fn labeled(name: &str, labels: &[&str]) -> Self {
        NodePattern {
            var: Some(name.to_owned()),
            labels: labels.iter().map(|l| l.to_string()).collect(),
            props: Vec::new(),
        }
    }

    pub fn with_prop(mut self, key: &str, value: Literal) -> Self {
        self.props.push((key.to_owned(), value));
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDirection {
    /// `-[..]->`
    LeftToRight,
    /// `<-[..]-`
    RightToLeft,
    /// `-[..]-`
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub var: Option<String>,
    pub rel_type: String,
    pub props: Vec<(String, Literal)>,
    pub direction: RelDirection,
}

impl RelPattern {
    pub fn out(var: Option<&str>, rel_type: &str) -> Self {
        RelPattern {
            var: var.map(str::to_owned),
            rel_type: rel_type.to_owned(),
            props: Vec::new(),
            direction: RelDirection::LeftToRight,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Str(String),
    Int(i64),
    Float(f64),
    List(Vec<Literal>),
}

impl Literal {
    pub fn str(s: &str) -> Self {
        Literal::Str(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropertyAccess {
    pub var: String,
    pub key: String,
}

impl PropertyAccess {
    pub fn new(var: &str, key: &str) -> Self {
        PropertyAccess {
            var: var.to_owned(),
            key: key.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Property(PropertyAccess),
    Literal(Literal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Contains,
    In,
    Eq,
}

/// `Or` and `And` always hold at least two operands; parentheses written in
/// the query are kept as `Paren` so printing reproduces them.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Or(Vec<Expr>),
    And(Vec<Expr>),
    Compare {
        lhs: Operand,
        op: CompareOp,
        rhs: Operand,
    },
    Paren(Box<Expr>),
}

impl Expr {
    pub fn compare(lhs: Operand, op: CompareOp, rhs: Operand) -> Self {
        Expr::Compare { lhs, op, rhs }
    }

    /// `var.key <op> literal`
    pub fn prop_cmp(var: &str, key: &str, op: CompareOp, rhs: Literal) -> Self {
        Expr::Compare {
            lhs: Operand::Property(PropertyAccess::new(var, key)),
            op,
            rhs: Operand::Literal(rhs),
        }
    }

    pub fn paren(inner: Expr) -> Self {
        Expr::Paren(Box::new(inner))
    }

    /// Every property access in the expression, left to right.
    pub fn property_accesses(&self) -> Vec<&PropertyAccess> {
        let mut out = Vec::new();
        self.collect_accesses(&mut out);
        out
    }

    fn collect_accesses<'a>(&'a self, out: &mut Vec<&'a PropertyAccess>) {
        match self {
            Expr::Or(items) | Expr::And(items) => {
                for item in items {
                    item.collect_accesses(out);
                }
            }
            Expr::Paren(inner) => inner.collect_accesses(out),
            Expr::Compare { lhs, rhs, .. } => {
                for side in [lhs, rhs] {
                    if let Operand::Property(access) = side {
                        out.push(access);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnClause {
    pub items: Vec<ReturnItem>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReturnExpr {
    Property(PropertyAccess),
    Variable(String),
}

impl ReturnExpr {
    pub fn var(&self) -> &str {
        match self {
            ReturnExpr::Property(access) => &access.var,
            ReturnExpr::Variable(name) => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnItem {
    pub expr: ReturnExpr,
    pub alias: Option<String>,
}

impl ReturnItem {
    pub fn prop(var: &str, key: &str, alias: Option<&str>) -> Self {
        ReturnItem {
            expr: ReturnExpr::Property(PropertyAccess::new(var, key)),
            alias: alias.map(str::to_owned),
        }
    }

    /// Output column name: the alias, else the expression as written.
    pub fn column_name(&self) -> String {
        if let Some(alias) = &self.alias {
            return alias.clone();
        }
        match &self.expr {
            ReturnExpr::Property(a) => format!("{}.{}", a.var, a.key),
            ReturnExpr::Variable(v) => v.clone(),
        }
    }
}
