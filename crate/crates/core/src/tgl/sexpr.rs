//! Minimal s-expression reader for grammar files.

use super::ast::SourcePos;
use super::TglError;

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    List(Vec<SExpr>, SourcePos),
    Sym(String, SourcePos),
    Str(String, SourcePos),
    Int(i64, SourcePos),
}

impl SExpr {
    pub fn pos(&self) -> SourcePos {
        match self {
            SExpr::List(_, p) | SExpr::Sym(_, p) | SExpr::Str(_, p) | SExpr::Int(_, p) => *p,
        }
    }

    pub fn sym(&self) -> Option<&str> {
        match self {
            SExpr::Sym(s, _) => Some(s),
            _ => None,
        }
    }

    pub fn is_sym(&self, name: &str) -> bool {
        self.sym().is_some_and(|s| s.eq_ignore_ascii_case(name))
    }

    pub fn list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            _ => None,
        }
    }
}

fn is_sym_char(c: char) -> bool {
    c.is_alphanumeric() || "-_.:*+/?!<>=&%$@^~'".contains(c)
}

pub fn read_all(text: &str) -> Result<Vec<SExpr>, TglError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    let mut stack: Vec<(Vec<SExpr>, SourcePos)> = Vec::new();
    let mut top = Vec::new();

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let pos = SourcePos { line, col };
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == ';' {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        let atom = match c {
            '(' => {
                advance!();
                stack.push((Vec::new(), pos));
                continue;
            }
            ')' => {
                advance!();
                let Some((items, start)) = stack.pop() else {
                    return Err(TglError::syntax(pos, "unbalanced `)`"));
                };
                SExpr::List(items, start)
            }
            '"' => {
                advance!();
                let mut s = String::new();
                loop {
                    if i >= chars.len() {
                        return Err(TglError::syntax(pos, "unterminated string"));
                    }
                    let c = chars[i];
                    advance!();
                    match c {
                        '"' => break,
                        '\\' => {
                            if i >= chars.len() {
                                return Err(TglError::syntax(pos, "unterminated string"));
                            }
                            let e = chars[i];
                            advance!();
                            match e {
                                'n' => s.push('\n'),
                                't' => s.push('\t'),
                                '"' | '\\' => s.push(e),
                                _ => return Err(TglError::syntax(pos, format!("invalid escape `\\{e}`"))),
                            }
                        }
                        c => s.push(c),
                    }
                }
                SExpr::Str(s, pos)
            }
            c if is_sym_char(c) => {
                let mut s = String::new();
                while i < chars.len() && is_sym_char(chars[i]) {
                    s.push(chars[i]);
                    advance!();
                }
                // Lisp-style quoting ('akk) carries no meaning here.
                let s = s.trim_start_matches('\'').to_string();
                if s.is_empty() {
                    return Err(TglError::syntax(pos, "empty symbol"));
                }
                match s.parse::<i64>() {
                    Ok(n) if s.chars().all(|c| c.is_ascii_digit() || c == '-') => SExpr::Int(n, pos),
                    _ => SExpr::Sym(s, pos),
                }
            }
            other => return Err(TglError::syntax(pos, format!("unexpected character `{other}`"))),
        };
        match stack.last_mut() {
            Some((items, _)) => items.push(atom),
            None => top.push(atom),
        }
    }
    if let Some((_, start)) = stack.pop() {
        return Err(TglError::syntax(start, "unbalanced `(`: list is never closed"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let v = read_all("(a (b \"c\\n\") 'akk 12)\n; note\n(x)").unwrap();
        assert_eq!(v.len(), 2);
        let items = v[0].list().unwrap();
        assert!(items[0].is_sym("A"));
        assert_eq!(items[1].list().unwrap()[1], SExpr::Str("c\n".into(), SourcePos { line: 1, col: 7 }));
        assert!(items[2].is_sym("akk"));
        assert!(matches!(items[3], SExpr::Int(12, _)));
        assert_eq!(v[1].pos(), SourcePos { line: 3, col: 1 });
    }

    #[test]
    fn unbalanced_reports_line() {
        let err = read_all("(a\n (b)").unwrap_err();
        assert_eq!(err.line(), Some(1));
        let err = read_all("(a)\n\n )").unwrap_err();
        assert_eq!(err.line(), Some(3));
    }
}
