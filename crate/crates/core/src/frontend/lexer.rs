//! Tokens of the surface syntax.

use std::fmt;

/// A byte range in the source.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span { start: self.start, end: other.end.max(self.end) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u32),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Bar,
    At,
    Underscore,
    Arrow,
    FatArrow,
    ColonEq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::At => f.write_str("`@`"),
            Tok::Underscore => f.write_str("`_`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::FatArrow => f.write_str("`=>`"),
            Tok::ColonEq => f.write_str("`:=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub span: Span,
    pub message: String,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Span)>, LexError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if src[i..].starts_with("(*") {
            let mut depth = 0usize;
            let mut j = i;
            loop {
                if src[j..].starts_with("(*") {
                    depth += 1;
                    j += 2;
                } else if src[j..].starts_with("*)") {
                    depth -= 1;
                    j += 2;
                    if depth == 0 {
                        break;
                    }
                } else if let Some(ch) = src[j..].chars().next() {
                    j += ch.len_utf8();
                } else {
                    return Err(LexError { span: Span::new(i, src.len()), message: "unterminated comment".into() });
                }
            }
            while chars.peek().is_some_and(|&(k, _)| k < j) {
                chars.next();
            }
            continue;
        }
        let two = &src[i..src.len().min(i + 2)];
        let (tok, len) = match two {
            "->" => (Tok::Arrow, 2),
            "=>" => (Tok::FatArrow, 2),
            ":=" => (Tok::ColonEq, 2),
            _ => match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '{' => (Tok::LBrace, 1),
                '}' => (Tok::RBrace, 1),
                ':' => (Tok::Colon, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Dot, 1),
                '|' => (Tok::Bar, 1),
                '@' => (Tok::At, 1),
                '"' => {
                    let rest = &src[i + 1..];
                    let Some(end) = rest.find('"') else {
                        return Err(LexError { span: Span::new(i, src.len()), message: "unterminated string".into() });
                    };
                    (Tok::Str(rest[..end].to_string()), end + 2)
                }
                c if c.is_ascii_digit() => {
                    let end = src[i..].find(|d: char| !d.is_ascii_digit()).map_or(src.len(), |e| i + e);
                    let n = src[i..end].parse().map_err(|_| LexError {
                        span: Span::new(i, end),
                        message: "number too large".into(),
                    })?;
                    (Tok::Num(n), end - i)
                }
                c if is_ident_start(c) => {
                    let end = src[i..].find(|d: char| !is_ident_continue(d)).map_or(src.len(), |e| i + e);
                    let word = &src[i..end];
                    if word == "_" {
                        (Tok::Underscore, 1)
                    } else {
                        (Tok::Ident(word.to_string()), end - i)
                    }
                }
                _ => {
                    return Err(LexError {
                        span: Span::new(i, i + c.len_utf8()),
                        message: format!("unexpected character `{c}`"),
                    })
                }
            },
        };
        out.push((tok, Span::new(i, i + len)));
        while chars.peek().is_some_and(|&(k, _)| k < i + len) {
            chars.next();
        }
    }
    out.push((Tok::Eof, Span::new(src.len(), src.len())));
    Ok(out)
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |nl| before[nl + 1..].chars().count()) + 1;
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|(t, _)| t).collect()
    }

    #[test]
    fn symbols_and_words() {
        assert_eq!(
            toks("fun (x' : Set@0) => x'"),
            vec![
                Tok::Ident("fun".into()),
                Tok::LParen,
                Tok::Ident("x'".into()),
                Tok::Colon,
                Tok::Ident("Set".into()),
                Tok::At,
                Tok::Num(0),
                Tok::RParen,
                Tok::FatArrow,
                Tok::Ident("x'".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn nested_comments_are_skipped() {
        assert_eq!(toks("a (* b (* c *) d *) e"), vec![Tok::Ident("a".into()), Tok::Ident("e".into()), Tok::Eof]);
    }

    #[test]
    fn positions() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
