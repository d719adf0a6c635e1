use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    /// Valid openCypher outside the supported subset (WITH, ORDER BY, CREATE, ...).
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset of the offending token; equals the input length at end of input.
    pub offset: usize,
    pub found: String,
    pub expected: String,
}

impl ParseError {
    pub fn syntax(offset: usize, found: impl Into<String>, expected: impl Into<String>) -> Self {
        ParseError {
            kind: ParseErrorKind::Syntax,
            offset,
            found: found.into(),
            expected: expected.into(),
        }
    }

    pub fn unsupported(offset: usize, found: impl Into<String>, feature: &str) -> Self {
        ParseError {
            kind: ParseErrorKind::Unsupported,
            offset,
            found: found.into(),
            expected: format!("a supported clause; {feature} is an unsupported feature"),
        }
    }

    /// The offending source line with a caret under the error column.
    pub fn annotate(&self, source: &str) -> String {
        let offset = self.offset.min(source.len());
        let line_start = source[..offset].rfind('\n').map_or(0, |i| i + 1);
        let line_end = source[offset..].find('\n').map_or(source.len(), |i| offset + i);
        let line_no = source[..line_start].matches('\n').count() + 1;
        let column = source[line_start..offset].chars().count();
        format!(
            "{self}\n{line_no:>4} | {}\n     | {}^",
            &source[line_start..line_end],
            " ".repeat(column)
        )
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.offset, self.expected, self.found
        )
    }
}

impl std::error::Error for ParseError {}
