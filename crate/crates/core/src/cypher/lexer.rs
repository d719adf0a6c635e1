use std::ops::Range;

use super::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Match,
    Where,
    Return,
    And,
    Or,
    Contains,
    In,
    As,
}

impl Keyword {
    pub fn from_word(word: &str) -> Option<Keyword> {
        Some(match word.to_ascii_uppercase().as_str() {
            "MATCH" => Keyword::Match,
            "WHERE" => Keyword::Where,
            "RETURN" => Keyword::Return,
            "AND" => Keyword::And,
            "OR" => Keyword::Or,
            "CONTAINS" => Keyword::Contains,
            "IN" => Keyword::In,
            "AS" => Keyword::As,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Match => "MATCH",
            Keyword::Where => "WHERE",
            Keyword::Return => "RETURN",
            Keyword::And => "AND",
            Keyword::Or => "OR",
            Keyword::Contains => "CONTAINS",
            Keyword::In => "IN",
            Keyword::As => "AS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Punct {
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Pipe,
    Dash,
    /// `->`
    Arrow,
    /// `<-`
    LeftArrow,
    Eq,
    /// Only lexed so the parser can reject variable-length patterns by name.
    Star,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        match self {
            Punct::LParen => "(",
            Punct::RParen => ")",
            Punct::LBracket => "[",
            Punct::RBracket => "]",
            Punct::LBrace => "{",
            Punct::RBrace => "}",
            Punct::Colon => ":",
            Punct::Comma => ",",
            Punct::Dot => ".",
            Punct::Pipe => "|",
            Punct::Dash => "-",
            Punct::Arrow => "->",
            Punct::LeftArrow => "<-",
            Punct::Eq => "=",
            Punct::Star => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    /// Unescaped string value.
    Str(String),
    Int(i64),
    Float(f64),
    Punct(Punct),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Byte range in the source text.
    pub span: Range<usize>,
}

impl Token {
    pub fn text<'a>(&self, source: &'a str) -> &'a str {
        &source[self.span.clone()]
    }
}

pub fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut pos = 0;

    while pos < bytes.len() {
        let c = text[pos..].chars().next().unwrap();
        let start = pos;
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        let kind = if is_ident_start(c) {
            while pos < bytes.len() && is_ident_char(bytes[pos] as char) {
                pos += 1;
            }
            let word = &text[start..pos];
            match Keyword::from_word(word) {
                Some(kw) => TokenKind::Keyword(kw),
                None => TokenKind::Ident(word.to_owned()),
            }
        } else if c.is_ascii_digit()
            || (c == '-' && bytes.get(pos + 1).is_some_and(u8::is_ascii_digit))
        {
            let (kind, end) = lex_number(text, start)?;
            pos = end;
            kind
        } else if c == '\'' || c == '"' {
            let (value, end) = lex_string(text, start)?;
            pos = end;
            TokenKind::Str(value)
        } else {
            let two = bytes.get(pos..pos + 2);
            let punct = match (c, two) {
                ('-', Some(b"->")) => Punct::Arrow,
                ('<', Some(b"<-")) => Punct::LeftArrow,
                ('(', _) => Punct::LParen,
                (')', _) => Punct::RParen,
                ('[', _) => Punct::LBracket,
                (']', _) => Punct::RBracket,
                ('{', _) => Punct::LBrace,
                ('}', _) => Punct::RBrace,
                (':', _) => Punct::Colon,
                (',', _) => Punct::Comma,
                ('.', _) => Punct::Dot,
                ('|', _) => Punct::Pipe,
                ('-', _) => Punct::Dash,
                ('=', _) => Punct::Eq,
                ('*', _) => Punct::Star,
                _ => {
                    return Err(ParseError::syntax(
                        start,
                        c.to_string(),
                        "a valid character",
                    ))
                }
            };
            pos += punct.as_str().len();
            TokenKind::Punct(punct)
        };
        tokens.push(Token {
            kind,
            span: start..pos,
        });
    }
    Ok(tokens)
}

fn lex_number(text: &str, start: usize) -> Result<(TokenKind, usize), ParseError> {
    let bytes = text.as_bytes();
    let digits = |mut p: usize| {
        while p < bytes.len() && bytes[p].is_ascii_digit() {
            p += 1;
        }
        p
    };
    let mut pos = start;
    if bytes[pos] == b'-' {
        pos += 1;
    }
    pos = digits(pos);
    let mut is_float = false;
    if bytes.get(pos) == Some(&b'.') && bytes.get(pos + 1).is_some_and(u8::is_ascii_digit) {
        is_float = true;
        pos = digits(pos + 1);
    }
    if matches!(bytes.get(pos), Some(b'e' | b'E')) {
        let mut exp = pos + 1;
        if matches!(bytes.get(exp), Some(b'+' | b'-')) {
            exp += 1;
        }
        if bytes.get(exp).is_some_and(u8::is_ascii_digit) {
            is_float = true;
            pos = digits(exp);
        }
    }
    let raw = &text[start..pos];
    let kind = if is_float {
        TokenKind::Float(raw.parse().map_err(|_| {
            ParseError::syntax(start, raw.to_owned(), "a floating point number")
        })?)
    } else {
        TokenKind::Int(raw.parse().map_err(|_| {
            ParseError::syntax(start, raw.to_owned(), "an integer within 64-bit range")
        })?)
    };
    Ok((kind, pos))
}

fn lex_string(text: &str, start: usize) -> Result<(String, usize), ParseError> {
    let quote = text.as_bytes()[start] as char;
    let mut value = String::new();
    let mut chars = text[start + 1..].char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => {
                let Some((_, esc)) = chars.next() else { break };
                value.push(match esc {
                    'n' => '\n',
                    't' => '\t',
                    'r' => '\r',
                    '\\' | '\'' | '"' => esc,
                    other => {
                        return Err(ParseError::syntax(
                            start + 1 + i,
                            format!("\\{other}"),
                            "a valid escape (\\\\, \\', \\\", \\n, \\t, \\r)",
                        ))
                    }
                });
            }
            c if c == quote => return Ok((value, start + 1 + i + 1)),
            c => value.push(c),
        }
    }
    Err(ParseError::syntax(
        start,
        text[start..].chars().take(20).collect::<String>(),
        "a terminated string literal",
    ))
}
