use super::diagnostic::{Diagnostic, Span, SYNTAX};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    DotDot,
    Minus,
    Eq,
    Ne,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Assign,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Minus => "-",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Bang => "!",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Arrow => "->",
            Tok::Assign => ":=",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        // `//` and `#` start line comments
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = (line, col);
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let value = text.parse().map_err(|_| {
                Diagnostic::error(SYNTAX, span_of(start, j - i), format!("integer `{text}` is too large"))
            })?;
            (Tok::Int(value), j - i)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                ('.', Some('.')) => (Tok::DotDot, 2),
                ('!', Some('=')) => (Tok::Ne, 2),
                ('&', Some('&')) => (Tok::AndAnd, 2),
                ('|', Some('|')) => (Tok::OrOr, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                (':', Some('=')) => (Tok::Assign, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                (',', _) => (Tok::Comma, 1),
                (';', _) => (Tok::Semi, 1),
                (':', _) => (Tok::Colon, 1),
                ('.', _) => (Tok::Dot, 1),
                ('-', _) => (Tok::Minus, 1),
                ('=', _) => (Tok::Eq, 1),
                ('!', _) => (Tok::Bang, 1),
                _ => {
                    return Err(Diagnostic::error(
                        SYNTAX,
                        span_of(start, 1),
                        format!("unexpected character `{c}`"),
                    ))
                }
            }
        };
        out.push(Token {
            tok,
            span: span_of(start, len),
        });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: span_of((line, col), 0),
    });
    Ok(out)
}

fn span_of((line, col): (usize, usize), len: usize) -> Span {
    Span {
        line,
        col,
        end_line: line,
        end_col: col + len,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_positions() {
        let toks = lex("a := !b.c != d -> 1..N-1; // tail\n||").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Assign,
                Tok::Bang,
                Tok::Ident("b".into()),
                Tok::Dot,
                Tok::Ident("c".into()),
                Tok::Ne,
                Tok::Ident("d".into()),
                Tok::Arrow,
                Tok::Int(1),
                Tok::DotDot,
                Tok::Ident("N".into()),
                Tok::Minus,
                Tok::Int(1),
                Tok::Semi,
                Tok::OrOr,
                Tok::Eof,
            ]
        );
        assert_eq!(toks[15].span.line, 2);
        assert_eq!(toks[15].span.col, 1);
    }

    #[test]
    fn rejects_stray_characters() {
        let d = lex("a @ b").unwrap_err();
        assert_eq!(d.code, SYNTAX);
        assert_eq!(d.span.col, 3);
    }
}
