use std::collections::{HashMap, HashSet};

use super::{Atom, FeatureStructure, Symbol, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GilError {
    #[error("{line}:{col}: {msg}")]
    Lex { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: duplicate attribute `{attr}`")]
    DuplicateAttribute { line: usize, col: usize, attr: String },
    #[error("{line}:{col}: coreference #{tag} is never defined")]
    UndefinedCoref { line: usize, col: usize, tag: u32 },
    #[error("{line}:{col}: coreference #{tag} is defined more than once")]
    MultiplyDefinedCoref { line: usize, col: usize, tag: u32 },
    #[error("coreference cycle through #{tag}")]
    CorefCycle { tag: u32 },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LBrack,
    RBrack,
    LParen,
    RParen,
    LAngle,
    RAngle,
    Comma,
    Def(u32),
    Ref(u32),
    Str(String),
    Sym(String),
    Int(i64),
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            col: 1,
        }
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

    fn err(&self, pos: Pos, msg: impl Into<String>) -> GilError {
        GilError::Lex {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, GilError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c.is_whitespace() {
                    self.bump();
                } else if c == ';' {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                } else {
                    break;
                }
            }
            let pos = Pos {
                line: self.line,
                col: self.col,
            };
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, pos));
                return Ok(out);
            };
            let tok = match c {
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '<' => Tok::LAngle,
                '>' => Tok::RAngle,
                ',' => Tok::Comma,
                '"' => Tok::Str(self.string(pos, false)?),
                // Documents copied from LaTeX sources write `\"Prof.\"`.
                '\\' if self.chars.peek() == Some(&'"') => {
                    self.bump();
                    Tok::Str(self.string(pos, true)?)
                }
                '#' => {
                    let mut digits = String::new();
                    while let Some(&d) = self.chars.peek() {
                        if d.is_ascii_digit() {
                            digits.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let tag: u32 = digits
                        .parse()
                        .ok()
                        .filter(|&n| n > 0)
                        .ok_or_else(|| self.err(pos, "expected a positive tag number after `#`"))?;
                    if self.chars.peek() == Some(&'=') {
                        self.bump();
                        Tok::Def(tag)
                    } else {
                        Tok::Ref(tag)
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut s = String::from(c);
                    while let Some(&d) = self.chars.peek() {
                        if d.is_ascii_digit() {
                            s.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    if self.chars.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                        return Err(self.err(pos, "malformed number"));
                    }
                    Tok::Int(s.parse().map_err(|_| self.err(pos, "integer out of range"))?)
                }
                c if c.is_ascii_alphabetic() => {
                    let mut s = String::from(c);
                    while let Some(&d) = self.chars.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' || d == '-' {
                            s.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Sym(s)
                }
                other => return Err(self.err(pos, format!("unexpected character `{other}`"))),
            };
            out.push((tok, pos));
        }
    }

    fn string(&mut self, start: Pos, latex: bool) -> Result<String, GilError> {
        let mut s = String::new();
        loop {
            match self.bump() {
                None => return Err(self.err(start, "unterminated string")),
                Some('\\') => match self.bump() {
                    Some('"') if latex => return Ok(s),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    Some(c @ ('"' | '\\')) => s.push(c),
                    _ => return Err(self.err(start, "invalid escape in string")),
                },
                Some('"') if !latex => return Ok(s),
                Some(c) => s.push(c),
            }
        }
    }
}

enum Raw {
    Atom(Atom),
    List(Vec<Raw>),
    Fs {
        pairs: Vec<(Symbol, Raw, Pos)>,
        tag: Option<u32>,
    },
    Ref(u32, Pos),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Pos) {
        &self.toks[self.at]
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax(pos: Pos, msg: impl Into<String>) -> GilError {
        GilError::Syntax {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<Pos, GilError> {
        let (tok, pos) = self.next();
        if tok == want {
            Ok(pos)
        } else if tok == Tok::Eof {
            Err(Self::syntax(pos, format!("unbalanced brackets: expected {what} before end of input")))
        } else {
            Err(Self::syntax(pos, format!("expected {what}, found {tok:?}")))
        }
    }

    fn structure(&mut self, tag: Option<u32>) -> Result<Raw, GilError> {
        self.expect(Tok::LBrack, "`[`")?;
        let mut pairs: Vec<(Symbol, Raw, Pos)> = Vec::new();
        loop {
            match self.peek().0 {
                Tok::RBrack => {
                    self.next();
                    return Ok(Raw::Fs { pairs, tag });
                }
                Tok::LParen => {
                    self.next();
                    let (tok, pos) = self.next();
                    let Tok::Sym(name) = tok else {
                        return Err(Self::syntax(pos, "expected attribute name"));
                    };
                    let attr = Symbol::new(name);
                    if pairs.iter().any(|(k, _, _)| *k == attr) {
                        return Err(GilError::DuplicateAttribute {
                            line: pos.line,
                            col: pos.col,
                            attr: attr.to_string(),
                        });
                    }
                    let value = self.value()?;
                    self.expect(Tok::RParen, "`)`")?;
                    pairs.push((attr, value, pos));
                }
                _ => {
                    let (tok, pos) = self.next();
                    if tok == Tok::Eof {
                        return Err(Self::syntax(pos, "unbalanced brackets: missing `]`"));
                    }
                    return Err(Self::syntax(pos, format!("expected `(` or `]`, found {tok:?}")));
                }
            }
        }
    }

    fn value(&mut self) -> Result<Raw, GilError> {
        let (tok, pos) = self.peek().clone();
        match tok {
            Tok::LBrack => self.structure(None),
            Tok::Def(n) => {
                self.next();
                if self.peek().0 != Tok::LBrack {
                    return Err(Self::syntax(self.peek().1, "a `#n=` definition must precede a structure"));
                }
                self.structure(Some(n))
            }
            Tok::Ref(n) => {
                self.next();
                Ok(Raw::Ref(n, pos))
            }
            Tok::LAngle => {
                self.next();
                let mut items = Vec::new();
                if self.peek().0 == Tok::RAngle {
                    self.next();
                    return Ok(Raw::List(items));
                }
                loop {
                    items.push(self.value()?);
                    let (tok, pos) = self.next();
                    match tok {
                        Tok::Comma => continue,
                        Tok::RAngle => return Ok(Raw::List(items)),
                        Tok::Eof => return Err(Self::syntax(pos, "unbalanced brackets: missing `>`")),
                        t => return Err(Self::syntax(pos, format!("expected `,` or `>`, found {t:?}"))),
                    }
                }
            }
            Tok::Sym(s) => {
                self.next();
                Ok(Raw::Atom(Atom::Symbol(Symbol::new(s))))
            }
            Tok::Str(s) => {
                self.next();
                Ok(Raw::Atom(Atom::Str(s)))
            }
            Tok::Int(i) => {
                self.next();
                Ok(Raw::Atom(Atom::Int(i)))
            }
            Tok::Eof => Err(Self::syntax(pos, "unexpected end of input")),
            t => Err(Self::syntax(pos, format!("expected a value, found {t:?}"))),
        }
    }
}

struct Resolver<'r> {
    defs: HashMap<u32, &'r Raw>,
    built: HashMap<u32, FeatureStructure>,
    active: HashSet<u32>,
}

impl<'r> Resolver<'r> {
    fn collect(raw: &'r Raw, defs: &mut HashMap<u32, &'r Raw>, def_pos: Pos) -> Result<(), GilError> {
        match raw {
            Raw::Fs { pairs, tag } => {
                if let Some(t) = tag {
                    if defs.insert(*t, raw).is_some() {
                        return Err(GilError::MultiplyDefinedCoref {
                            line: def_pos.line,
                            col: def_pos.col,
                            tag: *t,
                        });
                    }
                }
                for (_, v, pos) in pairs {
                    Self::collect(v, defs, *pos)?;
                }
            }
            Raw::List(items) => {
                for it in items {
                    Self::collect(it, defs, def_pos)?;
                }
            }
            Raw::Atom(_) | Raw::Ref(..) => {}
        }
        Ok(())
    }

    fn build(&mut self, raw: &'r Raw) -> Result<Value, GilError> {
        match raw {
            Raw::Atom(a) => Ok(Value::Atom(a.clone())),
            Raw::List(items) => Ok(Value::List(
                items.iter().map(|i| self.build(i)).collect::<Result<_, _>>()?,
            )),
            Raw::Ref(n, pos) => {
                if !self.defs.contains_key(n) {
                    return Err(GilError::UndefinedCoref {
                        line: pos.line,
                        col: pos.col,
                        tag: *n,
                    });
                }
                Ok(Value::Fs(self.shared(*n)?))
            }
            Raw::Fs { tag: Some(n), .. } => Ok(Value::Fs(self.shared(*n)?)),
            Raw::Fs { pairs, tag: None } => Ok(Value::Fs(self.node(pairs, None)?)),
        }
    }

    fn shared(&mut self, n: u32) -> Result<FeatureStructure, GilError> {
        if let Some(fs) = self.built.get(&n) {
            return Ok(fs.clone());
        }
        if !self.active.insert(n) {
            return Err(GilError::CorefCycle { tag: n });
        }
        let Raw::Fs { pairs, .. } = self.defs[&n] else {
            unreachable!("definitions are always structures")
        };
        let fs = self.node(pairs, Some(n))?;
        self.active.remove(&n);
        self.built.insert(n, fs.clone());
        Ok(fs)
    }

    fn node(&mut self, pairs: &'r [(Symbol, Raw, Pos)], tag: Option<u32>) -> Result<FeatureStructure, GilError> {
        let mut out = Vec::with_capacity(pairs.len());
        for (k, v, _) in pairs {
            out.push((k.clone(), self.build(v)?));
        }
        // duplicates were rejected while parsing
        Ok(FeatureStructure::with_tag(out, tag).expect("unique attributes"))
    }
}

/// Parses a complete GIL document into its root structure.
pub fn parse_gil(text: &str) -> Result<FeatureStructure, GilError> {
    let toks = Lexer::new(text).tokens()?;
    let mut parser = Parser { toks, at: 0 };
    let root = match parser.peek().0 {
        Tok::Def(n) => {
            parser.next();
            parser.structure(Some(n))?
        }
        _ => parser.structure(None)?,
    };
    let (tok, pos) = parser.next();
    if tok != Tok::Eof {
        return Err(Parser::syntax(pos, format!("unexpected trailing input {tok:?}")));
    }
    let mut defs = HashMap::new();
    Resolver::collect(&root, &mut defs, Pos { line: 1, col: 1 })?;
    let mut resolver = Resolver {
        defs,
        built: HashMap::new(),
        active: HashSet::new(),
    };
    match resolver.build(&root)? {
        Value::Fs(fs) => Ok(fs),
        _ => unreachable!("root is a structure"),
    }
}
