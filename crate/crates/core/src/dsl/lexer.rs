use super::SourceDiagnostic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// `#j`
    Elem(u32),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Int(i) => i.to_string(),
            Tok::Elem(j) => format!("#{j}"),
            Tok::Sym(s) => s.to_string(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

// Longest first.
const SYMBOLS: &[&str] = &[
    "|..|", "->?", "->", "..", "/=", "<=", ">=", "(", ")", "[", "]", ",", ":", ";", ".", "=", "<",
    ">", "+", "-",
];

/// Splits `text` into tokens with 1-based positions. `--` starts a comment
/// running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Token>, SourceDiagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
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
        let (start_line, start_col) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Token {
                tok: Tok::Ident(word),
                line: start_line,
                column: start_col,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '#' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let skip = usize::from(c == '#');
            let mut j = i + skip;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i + skip..j].iter().collect();
            let tok = if skip == 1 {
                digits.parse().ok().map(Tok::Elem)
            } else {
                digits.parse().ok().map(Tok::Int)
            };
            let Some(tok) = tok else {
                return Err(SourceDiagnostic::error(
                    start_line,
                    start_col,
                    "number out of range",
                    &digits,
                ));
            };
            let n = j - i;
            advance(&mut i, &mut line, &mut col, n);
            out.push(Token {
                tok,
                line: start_line,
                column: start_col,
            });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 4)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                advance(&mut i, &mut line, &mut col, sym.chars().count());
                out.push(Token {
                    tok: Tok::Sym(sym),
                    line: start_line,
                    column: start_col,
                });
            }
            None => {
                return Err(SourceDiagnostic::error(
                    start_line,
                    start_col,
                    &format!("unexpected character `{c}`"),
                    &c.to_string(),
                ));
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

/// Cursor over a token list; the last token is always `Eof`.
pub struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

pub type PResult<T> = Result<T, SourceDiagnostic>;

impl Cursor {
    pub fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    pub fn peek_at(&self, n: usize) -> &Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    pub fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    pub fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == w)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn error_here(&self, message: &str) -> SourceDiagnostic {
        let t = self.peek();
        SourceDiagnostic::error(t.line, t.column, message, &t.tok.text())
    }

    pub fn expect_sym(&mut self, s: &str) -> PResult<Token> {
        if self.is_sym(s) {
            Ok(self.next())
        } else {
            Err(self.error_here(&format!(
                "expected `{s}`, found `{}`",
                self.peek().tok.text()
            )))
        }
    }

    pub fn expect_word(&mut self, w: &str, what: &str) -> PResult<Token> {
        if self.is_word(w) {
            Ok(self.next())
        } else {
            Err(self.error_here(&format!(
                "expected {what}, found `{}`",
                self.peek().tok.text()
            )))
        }
    }

    /// An identifier that is not one of `reserved`.
    pub fn expect_ident(&mut self, what: &str, reserved: &[&str]) -> PResult<(String, Token)> {
        match &self.peek().tok {
            Tok::Ident(name) if !reserved.contains(&name.as_str()) => {
                let name = name.clone();
                Ok((name, self.next()))
            }
            Tok::Ident(name) => {
                Err(self.error_here(&format!("expected {what}, found keyword `{name}`")))
            }
            other => Err(self.error_here(&format!("expected {what}, found `{}`", other.text()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        tokenize(text).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn symbols_and_comments() {
        assert_eq!(
            kinds("remove: STACK[G] ->? STACK[G] -- partial\n1 |..| n"),
            vec![
                Tok::Ident("remove".into()),
                Tok::Sym(":"),
                Tok::Ident("STACK".into()),
                Tok::Sym("["),
                Tok::Ident("G".into()),
                Tok::Sym("]"),
                Tok::Sym("->?"),
                Tok::Ident("STACK".into()),
                Tok::Sym("["),
                Tok::Ident("G".into()),
                Tok::Sym("]"),
                Tok::Int(1),
                Tok::Sym("|..|"),
                Tok::Ident("n".into()),
                Tok::Eof,
            ]
        );
        assert_eq!(
            kinds("1..n #2 a-b"),
            vec![
                Tok::Int(1),
                Tok::Sym(".."),
                Tok::Ident("n".into()),
                Tok::Elem(2),
                Tok::Ident("a".into()),
                Tok::Sym("-"),
                Tok::Ident("b".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("adt\n  STACK").unwrap();
        assert_eq!((toks[0].line, toks[0].column), (1, 1));
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
    }

    #[test]
    fn bad_character_is_located() {
        let err = tokenize("a\n b $").unwrap_err();
        assert_eq!((err.line, err.column), (2, 4));
        assert_eq!(err.token, "$");
    }
}
