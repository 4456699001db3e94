//! A minimal s-expression reader with byte spans and `;` line comments.

use rtr_core::Span;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExpr {
    Atom { text: String, span: Span },
    List { items: Vec<SExpr>, span: Span },
}

impl SExpr {
    pub fn span(&self) -> Span {
        match self {
            SExpr::Atom { span, .. } | SExpr::List { span, .. } => *span,
        }
    }

    pub fn atom_text(&self) -> Option<&str> {
        match self {
            SExpr::Atom { text, .. } => Some(text),
            SExpr::List { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> ParseError {
        ParseError {
            span,
            message: message.into(),
        }
    }
}

pub fn parse_all(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut reader = Reader {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    loop {
        reader.skip_trivia();
        if reader.at_end() {
            return Ok(out);
        }
        out.push(reader.read()?);
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn at_end(&self) -> bool {
        self.pos >= self.bytes.len()
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b';' {
                while let Some(b) = self.peek() {
                    self.pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<SExpr, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        match self.peek() {
            None => Err(ParseError::new(
                Span::new(start, start),
                "unexpected end of input",
            )),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => {
                            return Err(ParseError::new(
                                Span::new(self.pos, self.pos),
                                "unexpected end of input: unclosed `(`",
                            ))
                        }
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(SExpr::List {
                                items,
                                span: Span::new(start, self.pos),
                            });
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => Err(ParseError::new(
                Span::new(start, start + 1),
                "unexpected `)`",
            )),
            Some(_) => {
                while let Some(b) = self.peek() {
                    if b.is_ascii_whitespace() || b == b'(' || b == b')' || b == b';' {
                        break;
                    }
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.bytes[start..self.pos])
                    .map_err(|_| {
                        ParseError::new(Span::new(start, self.pos), "invalid utf-8 in atom")
                    })?
                    .to_string();
                Ok(SExpr::Atom {
                    text,
                    span: Span::new(start, self.pos),
                })
            }
        }
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source.as_bytes()[..offset];
    let line = 1 + before.iter().filter(|b| **b == b'\n').count();
    let col = 1 + before
        .iter()
        .rev()
        .take_while(|b| **b != b'\n')
        .count();
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists() {
        let forms = parse_all("(a (b c) 1) x").unwrap();
        assert_eq!(forms.len(), 2);
        match &forms[0] {
            SExpr::List { items, .. } => assert_eq!(items.len(), 3),
            _ => panic!("expected list"),
        }
    }

    #[test]
    fn comments_are_skipped() {
        let forms = parse_all("; header\n(a) ; trailing\n").unwrap();
        assert_eq!(forms.len(), 1);
    }

    #[test]
    fn unclosed_list_errors() {
        assert!(parse_all("(if x").is_err());
    }

    #[test]
    fn line_col_computation() {
        let src = "ab\ncde";
        assert_eq!(line_col(src, 0), (1, 1));
        assert_eq!(line_col(src, 3), (2, 1));
        assert_eq!(line_col(src, 5), (2, 3));
    }
}
