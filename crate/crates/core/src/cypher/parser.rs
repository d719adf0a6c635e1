//! Recursive-descent parser for the supported subset:
//!
//! ```text
//! query        := match_clause+ return_clause
//! match_clause := MATCH path_pattern ("," path_pattern)* [WHERE expr]
//! path_pattern := node_pat (rel_pat node_pat)*
//! node_pat     := "(" [ident] [":" label ("|" label)*] [prop_map] ")"
//! rel_pat      := "-[" [ident] ":" ident [prop_map] "]->"
//!               | "<-[" [ident] ":" ident [prop_map] "]-"
//!               | "-[" [ident] ":" ident [prop_map] "]-"
//! prop_map     := "{" ident ":" literal ("," ident ":" literal)* "}"
//! expr         := and_expr (OR and_expr)*
//! and_expr     := term (AND term)*
//! term         := "(" expr ")" | operand (CONTAINS | "=" | IN) operand
//! operand      := ident "." ident | literal | list_literal
//! return_clause:= RETURN ret_item ("," ret_item)*
//! ret_item     := (ident "." ident | ident) [AS ident]
//! ```

use super::ast::*;
use super::error::ParseError;
use super::lexer::{tokenize, Keyword, Punct, Token, TokenKind};

/// Words that name openCypher features outside the subset. They are rejected
/// with an "unsupported feature" error wherever a clause may start.
const UNSUPPORTED: &[(&str, &str)] = &[
    ("OPTIONAL", "OPTIONAL MATCH"),
    ("WITH", "WITH"),
    ("ORDER", "ORDER BY"),
    ("SKIP", "SKIP"),
    ("LIMIT", "LIMIT"),
    ("UNWIND", "UNWIND"),
    ("UNION", "UNION"),
    ("CALL", "CALL"),
    ("CREATE", "CREATE (write clauses)"),
    ("MERGE", "MERGE (write clauses)"),
    ("DELETE", "DELETE (write clauses)"),
    ("DETACH", "DETACH DELETE (write clauses)"),
    ("SET", "SET (write clauses)"),
    ("REMOVE", "REMOVE (write clauses)"),
    ("DROP", "DROP (write clauses)"),
    ("DISTINCT", "DISTINCT"),
    ("NOT", "NOT"),
    ("XOR", "XOR"),
];

fn unsupported_feature(word: &str) -> Option<&'static str> {
    UNSUPPORTED
        .iter()
        .find(|(w, _)| w.eq_ignore_ascii_case(word))
        .map(|(_, feature)| *feature)
}

/// Whether `word` can be used as an identifier and survive printing.
pub fn is_reserved_word(word: &str) -> bool {
    Keyword::from_word(word).is_some() || unsupported_feature(word).is_some()
}

pub fn parse(text: &str) -> Result<QueryAst, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        source: text,
        tokens,
        pos: 0,
    };
    let ast = parser.query()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("end of query"));
    }
    Ok(ast)
}

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map_or(self.source.len(), |t| t.span.start)
    }

    fn found(&self) -> String {
        self.tokens
            .get(self.pos)
            .map_or_else(|| "end of input".to_owned(), |t| format!("{:?}", t.text(self.source)))
    }

    fn error(&self, expected: &str) -> ParseError {
        if let Some(TokenKind::Ident(word)) = self.peek() {
            if let Some(feature) = unsupported_feature(word) {
                return ParseError::unsupported(self.offset(), self.found(), feature);
            }
        }
        if let Some(TokenKind::Punct(Punct::Star)) = self.peek() {
            return ParseError::unsupported(
                self.offset(),
                self.found(),
                "variable-length relationship",
            );
        }
        ParseError::syntax(self.offset(), self.found(), expected)
    }

    fn at_keyword(&self, kw: Keyword) -> bool {
        self.peek() == Some(&TokenKind::Keyword(kw))
    }

    fn at_punct(&self, p: Punct) -> bool {
        self.peek() == Some(&TokenKind::Punct(p))
    }

    fn eat_keyword(&mut self, kw: Keyword) -> bool {
        let hit = self.at_keyword(kw);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        let hit = self.at_punct(p);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_punct(&mut self, p: Punct) -> Result<(), ParseError> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&format!("{:?}", p.as_str())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(name)) if unsupported_feature(name).is_none() => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error(what)),
        }
    }

    fn query(&mut self) -> Result<QueryAst, ParseError> {
        let mut clauses = Vec::new();
        while self.at_keyword(Keyword::Match) {
            clauses.push(self.match_clause()?);
        }
        if clauses.is_empty() {
            return Err(self.error("MATCH"));
        }
        if !self.eat_keyword(Keyword::Return) {
            return Err(self.error("MATCH, WHERE or RETURN"));
        }
        let return_clause = self.return_clause()?;
        Ok(QueryAst {
            clauses,
            return_clause,
        })
    }

    fn match_clause(&mut self) -> Result<MatchClause, ParseError> {
        self.pos += 1; // MATCH
        let mut patterns = vec![self.path_pattern()?];
        while self.eat_punct(Punct::Comma) {
            patterns.push(self.path_pattern()?);
        }
        let where_clause = if self.eat_keyword(Keyword::Where) {
            Some(self.expr()?)
        } else {
            None
        };
        Ok(MatchClause {
            patterns,
            where_clause,
        })
    }

    fn path_pattern(&mut self) -> Result<PathPattern, ParseError> {
        let start = self.node_pattern()?;
        let mut steps = Vec::new();
        while self.at_punct(Punct::Dash) || self.at_punct(Punct::LeftArrow) {
            let rel = self.rel_pattern()?;
            let node = self.node_pattern()?;
            steps.push((rel, node));
        }
        Ok(PathPattern { start, steps })
    }

    fn node_pattern(&mut self) -> Result<NodePattern, ParseError> {
        self.expect_punct(Punct::LParen)?;
        let var = match self.peek() {
            Some(TokenKind::Ident(_)) => Some(self.ident("a variable")?),
            _ => None,
        };
        let mut labels = Vec::new();
        if self.eat_punct(Punct::Colon) {
            labels.push(self.ident("a label")?);
            while self.eat_punct(Punct::Pipe) {
                labels.push(self.ident("a label")?);
            }
        }
        let props = if self.at_punct(Punct::LBrace) {
            self.prop_map()?
        } else {
            Vec::new()
        };
        if !self.eat_punct(Punct::RParen) {
            let expected = match (var.is_some(), labels.is_empty(), props.is_empty()) {
                (_, true, true) => "\":\", \"{\" or \")\"",
                (_, false, true) => "\"|\", \"{\" or \")\"",
                _ => "\")\"",
            };
            return Err(self.error(expected));
        }
        Ok(NodePattern { var, labels, props })
    }

    fn rel_pattern(&mut self) -> Result<RelPattern, ParseError> {
        let leftward = self.eat_punct(Punct::LeftArrow);
        if !leftward {
            self.expect_punct(Punct::Dash)?;
        }
        self.expect_punct(Punct::LBracket)?;
        let var = match self.peek() {
            Some(TokenKind::Ident(_)) => Some(self.ident("a variable")?),
            _ => None,
        };
        if !self.eat_punct(Punct::Colon) {
            return Err(self.error("\":\" followed by a relationship type"));
        }
        let rel_type = self.ident("a relationship type")?;
        if self.at_punct(Punct::Pipe) {
            return Err(ParseError::unsupported(
                self.offset(),
                self.found(),
                "relationship type disjunction",
            ));
        }
        let props = if self.at_punct(Punct::LBrace) {
            self.prop_map()?
        } else {
            Vec::new()
        };
        self.expect_punct(Punct::RBracket)?;
        let direction = if leftward {
            self.expect_punct(Punct::Dash)?;
            RelDirection::RightToLeft
        } else if self.eat_punct(Punct::Arrow) {
            RelDirection::LeftToRight
        } else if self.eat_punct(Punct::Dash) {
            RelDirection::Undirected
        } else {
            return Err(self.error("\"->\" or \"-\""));
        };
        Ok(RelPattern {
            var,
            rel_type,
            props,
            direction,
        })
    }

    fn prop_map(&mut self) -> Result<Vec<(String, Literal)>, ParseError> {
        self.expect_punct(Punct::LBrace)?;
        let mut entries = Vec::new();
        loop {
            let key = self.ident("a property key")?;
            self.expect_punct(Punct::Colon)?;
            let value = self.scalar_literal()?;
            entries.push((key, value));
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::RBrace)?;
        Ok(entries)
    }

    fn scalar_literal(&mut self) -> Result<Literal, ParseError> {
        let lit = match self.peek() {
            Some(TokenKind::Str(s)) => Literal::Str(s.clone()),
            Some(TokenKind::Int(i)) => Literal::Int(*i),
            Some(TokenKind::Float(f)) => Literal::Float(*f),
            _ => return Err(self.error("a string or number literal")),
        };
        self.pos += 1;
        Ok(lit)
    }

    fn list_literal(&mut self) -> Result<Literal, ParseError> {
        self.expect_punct(Punct::LBracket)?;
        let mut items = Vec::new();
        if !self.eat_punct(Punct::RBracket) {
            loop {
                items.push(self.scalar_literal()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
            self.expect_punct(Punct::RBracket)?;
        }
        Ok(Literal::List(items))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut items = vec![self.and_expr()?];
        while self.eat_keyword(Keyword::Or) {
            items.push(self.and_expr()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::Or(items)
        })
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut items = vec![self.term()?];
        while self.eat_keyword(Keyword::And) {
            items.push(self.term()?);
        }
        Ok(if items.len() == 1 {
            items.pop().unwrap()
        } else {
            Expr::And(items)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        if self.eat_punct(Punct::LParen) {
            let inner = self.expr()?;
            if !self.eat_punct(Punct::RParen) {
                return Err(self.error("AND, OR or \")\""));
            }
            return Ok(Expr::paren(inner));
        }
        let lhs = self.operand()?;
        let op = if self.eat_keyword(Keyword::Contains) {
            CompareOp::Contains
        } else if self.eat_keyword(Keyword::In) {
            CompareOp::In
        } else if self.eat_punct(Punct::Eq) {
            CompareOp::Eq
        } else {
            return Err(self.error("CONTAINS, IN or \"=\""));
        };
        let rhs = self.operand()?;
        Ok(Expr::Compare { lhs, op, rhs })
    }

    fn operand(&mut self) -> Result<Operand, ParseError> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => Ok(Operand::Property(self.property_access()?)),
            Some(TokenKind::Punct(Punct::LBracket)) => Ok(Operand::Literal(self.list_literal()?)),
            Some(TokenKind::Str(_) | TokenKind::Int(_) | TokenKind::Float(_)) => {
                Ok(Operand::Literal(self.scalar_literal()?))
            }
            _ => Err(self.error("a property access, literal or list")),
        }
    }

    fn property_access(&mut self) -> Result<PropertyAccess, ParseError> {
        let var = self.ident("a variable")?;
        self.expect_punct(Punct::Dot)?;
        let key = self.ident("a property key")?;
        Ok(PropertyAccess { var, key })
    }

    fn return_clause(&mut self) -> Result<ReturnClause, ParseError> {
        let mut items = vec![self.return_item()?];
        while self.eat_punct(Punct::Comma) {
            items.push(self.return_item()?);
        }
        Ok(ReturnClause { items })
    }

    fn return_item(&mut self) -> Result<ReturnItem, ParseError> {
        let var = self.ident("a variable or property access")?;
        let expr = if self.at_punct(Punct::Dot) {
            self.pos += 1;
            let key = self.ident("a property key")?;
            ReturnExpr::Property(PropertyAccess { var, key })
        } else if self.at_punct(Punct::LParen) {
            return Err(ParseError::unsupported(
                self.offset(),
                self.found(),
                "function call / aggregation",
            ));
        } else {
            ReturnExpr::Variable(var)
        };
        let alias = if self.eat_keyword(Keyword::As) {
            Some(self.ident("an alias")?)
        } else {
            None
        };
        Ok(ReturnItem { expr, alias })
    }
}
