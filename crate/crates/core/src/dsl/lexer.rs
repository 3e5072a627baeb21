use crate::diag::{Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Number(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Dot,
    Arrow,
    Eq,
    Minus,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Number(s) => format!("number `{s}`"),
            TokenKind::Str(_) => "string".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Minus => "`-`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    /// 1-based (line, column) of the first character.
    pub start: (u32, u32),
    /// 1-based (line, column) just past the last character.
    pub end: (u32, u32),
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next()
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

    fn pos(&self) -> (u32, u32) {
        (self.line, self.col)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '′' || c == '\''
}

/// Tokenizes `.dom` source. Lexical errors are reported and the offending
/// character skipped, so lexing always completes.
pub fn lex(file: &str, text: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut toks = Vec::new();
    let mut diags = Vec::new();
    while let Some(c) = cur.peek() {
        let start = cur.pos();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '-' && cur.peek2() == Some('-') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let kind = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if is_ident_continue(c) {
                    s.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            TokenKind::Ident(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_digit() || c == '.' {
                    s.push(c);
                    cur.bump();
                } else if (c == 'e' || c == 'E') && matches!(cur.peek2(), Some('0'..='9' | '-' | '+')) {
                    s.push(c);
                    cur.bump();
                    if let Some(sign @ ('-' | '+')) = cur.peek() {
                        s.push(sign);
                        cur.bump();
                    }
                } else {
                    break;
                }
            }
            TokenKind::Number(s)
        } else if c == '"' {
            cur.bump();
            let mut s = String::new();
            let mut closed = false;
            while let Some(c) = cur.bump() {
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match cur.bump() {
                        Some('n') => s.push('\n'),
                        Some(other) => s.push(other),
                        None => break,
                    },
                    '\n' => break,
                    other => s.push(other),
                }
            }
            if !closed {
                diags.push(Diagnostic::error("E001", "unterminated string literal", SourceSpan::new(file, start, cur.pos())));
            }
            TokenKind::Str(s)
        } else {
            cur.bump();
            match c {
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                ';' => TokenKind::Semi,
                ':' => TokenKind::Colon,
                ',' => TokenKind::Comma,
                '.' => TokenKind::Dot,
                '=' => TokenKind::Eq,
                '-' if cur.peek() == Some('>') => {
                    cur.bump();
                    TokenKind::Arrow
                }
                '→' => TokenKind::Arrow,
                '-' => TokenKind::Minus,
                other => {
                    diags.push(Diagnostic::error(
                        "E001",
                        format!("unexpected character `{other}`"),
                        SourceSpan::new(file, start, cur.pos()),
                    ));
                    continue;
                }
            }
        };
        toks.push(Token { kind, start, end: cur.pos() });
    }
    (toks, diags)
}
