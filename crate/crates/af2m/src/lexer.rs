//! Tokens of the `.af2` surface language.

use std::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Identifiers, numerals and hyphenated rule names such as `imp-i`.
    Ident(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

// Longest first.
const SYMBOLS: [&str; 25] = [
    "->*", ":=", "=>", "->", "\\/", "/\\", "|>", "(", ")", "[", "]", "{", "}", ",", ";", ".", ":", "=",
    "\\", "<", ">", "/", "*", "-", "|",
];

fn ident_start(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        let pos = Pos { line, col };
        if ident_start(c) {
            let mut j = i;
            while j < chars.len() {
                if ident_char(chars[j]) {
                    j += 1;
                } else if chars[j] == '-' && chars.get(j + 1).is_some_and(|c| c.is_alphabetic()) {
                    // `imp-i`, `and-el`; never `x->y` or `x--`.
                    j += 1;
                } else {
                    break;
                }
            }
            let s: String = chars[i..j].iter().collect();
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Token { tok: Tok::Ident(s), pos });
            continue;
        }
        let rest: String = chars[i..(i + 3).min(chars.len())].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(*s)) {
            Some(s) => {
                advance(&mut i, &mut line, &mut col, s.chars().count());
                out.push(Token { tok: Tok::Sym(s), pos });
            }
            None => return Err(LexError { pos, message: format!("unexpected character `{c}`") }),
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn symbols_and_idents() {
        let id = |s: &str| Tok::Ident(s.into());
        assert_eq!(
            toks("3. imp-i 2 [h] : A->B \\/ C -- note\nx'"),
            vec![
                id("3"),
                Tok::Sym("."),
                id("imp-i"),
                id("2"),
                Tok::Sym("["),
                id("h"),
                Tok::Sym("]"),
                Tok::Sym(":"),
                id("A"),
                Tok::Sym("->"),
                id("B"),
                Tok::Sym("\\/"),
                id("C"),
                id("x'"),
                Tok::Eof
            ]
        );
        assert_eq!(toks("\\x. t ->* u"), vec![
            Tok::Sym("\\"),
            id("x"),
            Tok::Sym("."),
            id("t"),
            Tok::Sym("->*"),
            id("u"),
            Tok::Eof
        ]);
    }

    #[test]
    fn positions_count_lines_and_columns() {
        let ts = lex("a\n  b").unwrap();
        assert_eq!(ts[1].pos, Pos { line: 2, col: 3 });
        let e = lex("a\n @").unwrap_err();
        assert_eq!(e.pos, Pos { line: 2, col: 2 });
    }
}
