use crate::span::SourceSpan;

use super::diagnostic::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Word(String),
    Int(i64),
    Str(String),
    LBrace,
    RBrace,
    Semi,
    Colon,
    Comma,
    Dot,
    Arrow,
    Assign,
    Plus,
    Minus,
    Lt,
    Le,
    EqEq,
    Ge,
    Gt,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("'{w}'"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::Str(_) => "string literal".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Semi => "';'".into(),
            Tok::Colon => "':'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Arrow => "'->'".into(),
            Tok::Assign => "'='".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::EqEq => "'=='".into(),
            Tok::Ge => "'>='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Lexeme {
    pub tok: Tok,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Lexeme>, Diagnostic> {
    let mut cur = Cursor {
        chars: src.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();

    loop {
        while let Some(c) = cur.peek() {
            if c.is_whitespace() {
                cur.bump();
            } else if c == '#' {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            } else {
                break;
            }
        }

        let (line, col) = (cur.line, cur.col);
        let Some(c) = cur.bump() else {
            out.push(Lexeme {
                tok: Tok::Eof,
                span: SourceSpan::new(line, col, 0),
            });
            return Ok(out);
        };

        let tok = match c {
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            ':' => Tok::Colon,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '+' => Tok::Plus,
            '-' if cur.peek() == Some('>') => {
                cur.bump();
                Tok::Arrow
            }
            '-' => Tok::Minus,
            '=' if cur.peek() == Some('=') => {
                cur.bump();
                Tok::EqEq
            }
            '=' => Tok::Assign,
            '<' if cur.peek() == Some('=') => {
                cur.bump();
                Tok::Le
            }
            '<' => Tok::Lt,
            '>' if cur.peek() == Some('=') => {
                cur.bump();
                Tok::Ge
            }
            '>' => Tok::Gt,
            '"' => lex_string(&mut cur, line, col)?,
            c if c.is_ascii_digit() => {
                let mut digits = String::from(c);
                while let Some(d) = cur.peek().filter(char::is_ascii_digit) {
                    digits.push(d);
                    cur.bump();
                }
                match digits.parse() {
                    Ok(v) => Tok::Int(v),
                    Err(_) => {
                        return Err(Diagnostic::error(
                            "LexError",
                            format!("integer literal `{digits}` is out of range"),
                            SourceSpan::new(line, col, digits.chars().count()),
                        ))
                    }
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::from(c);
                while let Some(d) = cur
                    .peek()
                    .filter(|d| d.is_ascii_alphanumeric() || *d == '_')
                {
                    word.push(d);
                    cur.bump();
                }
                Tok::Word(word)
            }
            other => {
                return Err(Diagnostic::error(
                    "LexError",
                    format!("unexpected character {other:?}"),
                    SourceSpan::new(line, col, 1),
                ))
            }
        };
        let length = if cur.line == line { cur.col - col } else { 1 };
        out.push(Lexeme {
            tok,
            span: SourceSpan::new(line, col, length),
        });
    }
}

fn lex_string(cur: &mut Cursor<'_>, line: usize, col: usize) -> Result<Tok, Diagnostic> {
    let mut s = String::new();
    loop {
        match cur.bump() {
            Some('"') => return Ok(Tok::Str(s)),
            Some('\\') => match cur.bump() {
                Some('"') => s.push('"'),
                Some('\\') => s.push('\\'),
                Some('n') => s.push('\n'),
                Some('t') => s.push('\t'),
                _ => {
                    return Err(Diagnostic::error(
                        "LexError",
                        "invalid escape in string literal",
                        SourceSpan::new(line, col, 1),
                    ))
                }
            },
            Some(c) => s.push(c),
            None => {
                return Err(Diagnostic::error(
                    "LexError",
                    "unterminated string literal",
                    SourceSpan::new(line, col, 1),
                ))
            }
        }
    }
}
