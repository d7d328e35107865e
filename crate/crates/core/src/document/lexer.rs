use logos::Logos;

use crate::error::Error;

#[derive(Logos, Clone, Debug, PartialEq, Eq)]
#[logos(skip r"[ \t\r\n\f]+")]
#[logos(skip r"#[^\n]*")]
pub enum Tok {
    #[regex(r"[A-Za-z_][A-Za-z0-9_]*", |l| l.slice().to_string())]
    Ident(String),
    #[regex(r"[0-9]+", |l| l.slice().to_string())]
    Int(String),
    #[regex(r#""[^"\n]*""#, |l| { let s = l.slice(); s[1..s.len() - 1].to_string() })]
    Str(String),
    #[token("{")]
    LBrace,
    #[token("}")]
    RBrace,
    #[token("(")]
    LParen,
    #[token(")")]
    RParen,
    #[token(",")]
    Comma,
    #[token(";")]
    Semi,
    #[token("=")]
    Eq,
    #[token("+")]
    Plus,
    #[token("-")]
    Minus,
    #[token("*")]
    Star,
    #[token("/")]
    Slash,
    #[token("^")]
    Caret,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(s) => format!("number `{s}`"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
        }
    }
}

/// A token with its byte span.
#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

/// Maps byte offsets to 1-based line and column (columns count characters).
pub struct LineMap<'a> {
    text: &'a str,
    starts: Vec<usize>,
}

impl<'a> LineMap<'a> {
    pub fn new(text: &'a str) -> Self {
        let starts = std::iter::once(0).chain(text.match_indices('\n').map(|(i, _)| i + 1)).collect();
        LineMap { text, starts }
    }

    pub fn locate(&self, offset: usize) -> (usize, usize) {
        let line = self.starts.partition_point(|&s| s <= offset).max(1);
        let start = self.starts[line - 1];
        let col = self.text[start..offset.min(self.text.len())].chars().count() + 1;
        (line, col)
    }

    pub fn error(&self, offset: usize, msg: impl Into<String>) -> Error {
        let (line, col) = self.locate(offset);
        Error::Parse { line, col, msg: msg.into() }
    }
}

pub fn tokenize(text: &str) -> Result<Vec<Spanned>, Error> {
    let map = LineMap::new(text);
    let mut out = Vec::new();
    let mut lex = Tok::lexer(text);
    while let Some(t) = lex.next() {
        let span = lex.span();
        match t {
            Ok(tok) => out.push(Spanned { tok, start: span.start, end: span.end }),
            Err(()) => return Err(map.error(span.start, format!("unexpected character `{}`", &text[span.clone()]))),
        }
    }
    Ok(out)
}
