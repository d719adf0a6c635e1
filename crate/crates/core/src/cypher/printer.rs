use std::fmt::{self, Write};

use super::ast::*;

/// Canonical text: uppercase keywords, double-quoted strings, one clause
/// (MATCH, WHERE, RETURN) per line.
pub fn pretty_print(ast: &QueryAst) -> String {
    ast.to_string()
}

fn write_string(f: &mut impl Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for c in s.chars() {
        match c {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            '\r' => f.write_str("\\r")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Str(s) => write_string(f, s),
            Literal::Int(i) => write!(f, "{i}"),
            // Debug keeps a `.0` or exponent, so the value re-lexes as a float
            Literal::Float(x) => write!(f, "{x:?}"),
            Literal::List(items) => {
                f.write_char('[')?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_char(']')
            }
        }
    }
}

fn write_props(f: &mut fmt::Formatter<'_>, props: &[(String, Literal)]) -> fmt::Result {
    f.write_char('{')?;
    for (i, (key, value)) in props.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{key}: {value}")?;
    }
    f.write_char('}')
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('(')?;
        if let Some(var) = &self.var {
            f.write_str(var)?;
        }
        if !self.labels.is_empty() {
            write!(f, ":{}", self.labels.join("|"))?;
        }
        if !self.props.is_empty() {
            if self.var.is_some() || !self.labels.is_empty() {
                f.write_char(' ')?;
            }
            write_props(f, &self.props)?;
        }
        f.write_char(')')
    }
}

impl fmt::Display for RelPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.direction {
            RelDirection::RightToLeft => "<-[",
            _ => "-[",
        })?;
        if let Some(var) = &self.var {
            f.write_str(var)?;
        }
        write!(f, ":{}", self.rel_type)?;
        if !self.props.is_empty() {
            f.write_char(' ')?;
            write_props(f, &self.props)?;
        }
        f.write_str(match self.direction {
            RelDirection::LeftToRight => "]->",
            _ => "]-",
        })
    }
}

impl fmt::Display for PathPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.start)?;
        for (rel, node) in &self.steps {
            write!(f, "{rel}{node}")?;
        }
        Ok(())
    }
}

impl fmt::Display for PropertyAccess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.var, self.key)
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Property(a) => write!(f, "{a}"),
            Operand::Literal(l) => write!(f, "{l}"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, items: &[Expr], sep: &str| {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{item}")?;
            }
            Ok(())
        };
        match self {
            Expr::Or(items) => join(f, items, " OR "),
            Expr::And(items) => join(f, items, " AND "),
            Expr::Paren(inner) => write!(f, "({inner})"),
            Expr::Compare { lhs, op, rhs } => {
                let op = match op {
                    CompareOp::Contains => "CONTAINS",
                    CompareOp::In => "IN",
                    CompareOp::Eq => "=",
                };
                write!(f, "{lhs} {op} {rhs}")
            }
        }
    }
}

impl fmt::Display for ReturnItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.expr {
            ReturnExpr::Property(a) => write!(f, "{a}")?,
            ReturnExpr::Variable(v) => f.write_str(v)?,
        }
        if let Some(alias) = &self.alias {
            write!(f, " AS {alias}")?;
        }
        Ok(())
    }
}

impl fmt::Display for QueryAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for clause in &self.clauses {
            f.write_str("MATCH ")?;
            for (i, pattern) in clause.patterns.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{pattern}")?;
            }
            f.write_char('\n')?;
            if let Some(expr) = &clause.where_clause {
                writeln!(f, "WHERE {expr}")?;
            }
        }
        f.write_str("RETURN ")?;
        for (i, item) in self.return_clause.items.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}
