use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Bare or quoted identifier; `quoted` keeps keywords from matching.
    Ident { text: String, quoted: bool },
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Eq,
    Minus,
    Arrow,
    FatArrow,
    /// End of an entry: a newline or `;`.
    Break,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident { text, .. } => format!("`{text}`"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::Break => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

pub fn is_bare_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Splits `text` into tokens; unknown characters become diagnostics and are skipped.
pub fn lex(text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let single = |tok: Tok| Token { tok, span: Span::new(start, (line, col + 1)) };
        match c {
            '\n' => {
                tokens.push(single(Tok::Break));
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            ';' => tokens.push(single(Tok::Break)),
            '{' => tokens.push(single(Tok::LBrace)),
            '}' => tokens.push(single(Tok::RBrace)),
            ':' => tokens.push(single(Tok::Colon)),
            ',' => tokens.push(single(Tok::Comma)),
            '.' => tokens.push(single(Tok::Dot)),
            '-' | '=' if chars.get(i + 1) == Some(&'>') => {
                let tok = if c == '-' { Tok::Arrow } else { Tok::FatArrow };
                tokens.push(Token { tok, span: Span::new(start, (line, col + 2)) });
                i += 2;
                col += 2;
                continue;
            }
            '-' => tokens.push(single(Tok::Minus)),
            '=' => tokens.push(single(Tok::Eq)),
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                let mut closed = false;
                while j < chars.len() && chars[j] != '\n' {
                    match chars[j] {
                        '"' => {
                            closed = true;
                            break;
                        }
                        '\\' if j + 1 < chars.len() && matches!(chars[j + 1], '"' | '\\') => {
                            s.push(chars[j + 1]);
                            j += 2;
                        }
                        ch => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                let width = j - i + usize::from(closed);
                let span = Span::new(start, (line, col + width));
                if closed {
                    tokens.push(Token { tok: Tok::Ident { text: s, quoted: true }, span });
                } else {
                    diags.push(Diagnostic::syntax(span, "unterminated quoted identifier"));
                }
                i += width;
                col += width;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let span = Span::new(start, (line, col + (j - i)));
                tokens.push(Token { tok: Tok::Ident { text, quoted: false }, span });
                col += j - i;
                i = j;
                continue;
            }
            other => diags.push(Diagnostic::syntax(
                Span::new(start, (line, col + 1)),
                format!("unexpected character `{other}`; quote names that are not plain identifiers"),
            )),
        }
        i += 1;
        col += 1;
    }
    tokens.push(Token { tok: Tok::Eof, span: Span::new((line, col), (line, col)) });
    (tokens, diags)
}
