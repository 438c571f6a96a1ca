use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::lexer::{tokenize, Cursor, PResult, Tok, Token};
use super::SourceDiagnostic;
use crate::adt::{
    validate_adt, AdtSpec, Axiom, FunctionSig, Precondition, Sort, Term, ValidatedAdtSpec,
};

const RESERVED: &[&str] = &[
    "adt",
    "functions",
    "preconditions",
    "axioms",
    "requires",
    "not",
];

/// Parses and validates an ADT specification.
pub fn parse_adt(text: &str) -> Result<ValidatedAdtSpec, Vec<SourceDiagnostic>> {
    let toks = tokenize(text).map_err(|d| vec![d])?;
    let mut p = AdtParser {
        cur: Cursor::new(toks),
        spans: BTreeMap::new(),
    };
    let raw = p.spec().map_err(|d| vec![d])?;
    validate_adt(&raw).map_err(|diags| {
        diags
            .into_iter()
            .map(|d| {
                let (line, column, token) =
                    p.spans
                        .get(&d.item)
                        .cloned()
                        .unwrap_or((1, 1, String::new()));
                SourceDiagnostic::error(
                    line,
                    column,
                    &format!("{}: {}: {} ({})", d.kind, d.item, d.message, d.position),
                    &token,
                )
            })
            .collect()
    })
}

struct AdtParser {
    cur: Cursor,
    /// Validation item name -> position of its head token.
    spans: BTreeMap<String, (usize, usize, String)>,
}

impl AdtParser {
    fn mark(&mut self, item: String, tok: &Token) {
        self.spans
            .entry(item)
            .or_insert((tok.line, tok.column, tok.tok.text()));
    }

    fn spec(&mut self) -> PResult<AdtSpec> {
        self.cur.expect_word("adt", "`adt` header")?;
        let (name, _) = self.cur.expect_ident("a type name", RESERVED)?;
        self.cur.expect_sym("[")?;
        let (parameter, _) = self.cur.expect_ident("a generic parameter", RESERVED)?;
        self.cur.expect_sym("]")?;
        let mut spec = AdtSpec {
            name,
            parameter,
            functions: vec![],
            preconditions: vec![],
            axioms: vec![],
        };
        if self.cur.eat_word("functions") {
            while self.starts_item() {
                let f = self.signature(&spec)?;
                spec.functions.push(f);
            }
        }
        if self.cur.eat_word("preconditions") {
            while self.starts_item() {
                let p = self.precondition(&spec)?;
                spec.preconditions.push(p);
            }
        }
        if self.cur.eat_word("axioms") {
            while self.starts_item() {
                let a = self.axiom()?;
                spec.axioms.push(a);
            }
        }
        if !self.cur.at_eof() {
            return Err(self.cur.error_here(&format!(
                "expected a block keyword (`functions`, `preconditions`, `axioms`) or end of input, found `{}`",
                self.cur.peek().tok.text()
            )));
        }
        Ok(spec)
    }

    fn starts_item(&self) -> bool {
        matches!(&self.cur.peek().tok, Tok::Ident(w) if !RESERVED.contains(&w.as_str()))
    }

    fn sort(&mut self, spec: &AdtSpec) -> PResult<Sort> {
        let start = self.cur.peek().clone();
        let (mut name, _) = self.cur.expect_ident("a sort", RESERVED)?;
        if self.cur.eat_sym("[") {
            let (p, _) = self.cur.expect_ident("a sort parameter", RESERVED)?;
            self.cur.expect_sym("]")?;
            name = format!("{name}[{p}]");
        }
        spec.sort_named(&name).ok_or_else(|| {
            SourceDiagnostic::error(
                start.line,
                start.column,
                &format!("unknown-symbol: unknown sort `{name}`"),
                &name,
            )
        })
    }

    fn arrow(&mut self) -> Option<bool> {
        if self.cur.eat_sym("->?") {
            Some(true)
        } else if self.cur.eat_sym("->") {
            Some(false)
        } else {
            None
        }
    }

    fn signature(&mut self, spec: &AdtSpec) -> PResult<FunctionSig> {
        let (name, tok) = self.cur.expect_ident("a function name", RESERVED)?;
        self.mark(format!("function {name}"), &tok);
        self.cur.expect_sym(":")?;
        let mut args = Vec::new();
        let partial;
        let result_sort;
        if let Some(p) = self.arrow() {
            partial = p;
            result_sort = self.sort(spec)?;
        } else {
            args.push(self.sort(spec)?);
            // `x` separates argument sorts unless it starts the next
            // signature (`x: ...`).
            while self.cur.is_word("x") && !matches!(self.cur.peek_at(1).tok, Tok::Sym(":")) {
                self.cur.next();
                args.push(self.sort(spec)?);
            }
            match self.arrow() {
                Some(p) => {
                    partial = p;
                    result_sort = self.sort(spec)?;
                }
                None if args.len() == 1 => {
                    partial = false;
                    result_sort = args.pop().expect("one sort");
                }
                None => {
                    return Err(self
                        .cur
                        .error_here("expected `->` or `->?` after argument sorts"))
                }
            }
        }
        Ok(FunctionSig {
            name,
            arg_sorts: args,
            result_sort,
            partial,
            kind: None,
        })
    }

    fn precondition(&mut self, spec: &AdtSpec) -> PResult<Precondition> {
        let (function, tok) = self.cur.expect_ident("a function name", RESERVED)?;
        self.mark(format!("precondition of {function}"), &tok);
        let mut formals = Vec::new();
        if self.cur.eat_sym("(") {
            loop {
                let (v, _) = self.cur.expect_ident("a formal variable", RESERVED)?;
                if self.cur.eat_sym(":") {
                    // Written sorts must agree with the signature; validation
                    // reports arity problems, so only check what lines up.
                    let at = self.cur.peek().clone();
                    let sort = self.sort(spec)?;
                    let expected = spec
                        .function(&function)
                        .and_then(|f| f.arg_sorts.get(formals.len()))
                        .cloned();
                    if let Some(e) = expected {
                        if e != sort {
                            return Err(SourceDiagnostic::error(
                                at.line,
                                at.column,
                                &format!("sort-mismatch: formal `{v}` of {function} has sort {e}, not {sort}"),
                                &at.tok.text(),
                            ));
                        }
                    }
                }
                formals.push(v);
                if !self.cur.eat_sym(",") {
                    break;
                }
            }
            self.cur.expect_sym(")")?;
        }
        self.cur.expect_word("requires", "`requires`")?;
        let condition = self.term()?;
        Ok(Precondition {
            function,
            formals,
            condition,
        })
    }

    fn axiom(&mut self) -> PResult<Axiom> {
        let (label, tok) = self.cur.expect_ident("an axiom label", RESERVED)?;
        self.mark(format!("axiom {label}"), &tok);
        self.cur.expect_sym(":")?;
        let body = self.term()?;
        Ok(Axiom {
            label,
            universals: vec![],
            body,
        })
    }

    fn term(&mut self) -> PResult<Term> {
        if self.cur.eat_word("not") {
            return Ok(Term::Not(Box::new(self.term()?)));
        }
        let lhs = self.primary()?;
        if self.cur.eat_sym("=") {
            let rhs = self.primary()?;
            return Ok(Term::Eq(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn primary(&mut self) -> PResult<Term> {
        if self.cur.eat_sym("(") {
            let t = self.term()?;
            self.cur.expect_sym(")")?;
            return Ok(t);
        }
        let (name, _) = self.cur.expect_ident("a term", RESERVED)?;
        if self.cur.eat_sym("(") {
            let mut args = vec![self.term()?];
            while self.cur.eat_sym(",") {
                args.push(self.term()?);
            }
            self.cur.expect_sym(")")?;
            return Ok(Term::App(name, args));
        }
        Ok(Term::Var(name))
    }
}

/// Renders a specification in the `.adt` format.
pub fn print_adt(spec: &AdtSpec) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "adt {}[{}]", spec.name, spec.parameter);
    out.push_str("\nfunctions\n");
    for f in &spec.functions {
        let _ = write!(out, "    {}: ", f.name);
        let arrow = if f.partial { "->?" } else { "->" };
        if f.arg_sorts.is_empty() {
            if f.partial {
                let _ = writeln!(out, "{arrow} {}", f.result_sort);
            } else {
                let _ = writeln!(out, "{}", f.result_sort);
            }
        } else {
            let args: Vec<String> = f.arg_sorts.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "{} {arrow} {}", args.join(" x "), f.result_sort);
        }
    }
    out.push_str("\npreconditions\n");
    for p in &spec.preconditions {
        let _ = writeln!(
            out,
            "    {}({}) requires {}",
            p.function,
            p.formals.join(", "),
            p.condition
        );
    }
    out.push_str("\naxioms\n");
    for a in &spec.axioms {
        let _ = writeln!(out, "    {}: {}", a.label, a.body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adt::FunctionKind;

    const STACK: &str = "adt STACK[G]
functions
    extend: STACK[G] x G -> STACK[G]
    remove: STACK[G] ->? STACK[G]
    item: STACK[G] ->? G
    is_empty: STACK[G] -> BOOLEAN
    new: STACK[G]
preconditions
    remove(s: STACK[G]) requires not is_empty(s)
    item(s) requires not is_empty(s)
axioms
    A1: item(extend(s, x)) = x
    A2: remove(extend(s, x)) = s
    A3: is_empty(new)
    A4: not is_empty(extend(s, x))
";

    #[test]
    fn parses_the_stack_specification() {
        let spec = parse_adt(STACK).unwrap();
        assert_eq!(spec.functions.len(), 5);
        assert_eq!(spec.preconditions.len(), 2);
        assert_eq!(spec.axioms.len(), 4);
        assert_eq!(spec.function("new").unwrap().kind(), FunctionKind::Creator);
        let a2 = &spec.axioms[1].body;
        assert_eq!(
            *a2,
            Term::Eq(
                Box::new(Term::app(
                    "remove",
                    vec![Term::app("extend", vec![Term::var("s"), Term::var("x")])]
                )),
                Box::new(Term::var("s"))
            )
        );
    }

    #[test]
    fn round_trips() {
        let spec = parse_adt(STACK).unwrap();
        let again = parse_adt(&print_adt(&spec)).unwrap();
        assert_eq!(spec, again);
    }

    #[test]
    fn newlines_do_not_matter() {
        let flat = STACK.replace('\n', " ");
        assert_eq!(parse_adt(&flat).unwrap(), parse_adt(STACK).unwrap());
    }

    #[test]
    fn empty_input_needs_a_header() {
        let d = parse_adt("").unwrap_err();
        assert!(d[0].message.contains("expected `adt` header"), "{}", d[0]);
        assert_eq!((d[0].line, d[0].column), (1, 1));
    }

    #[test]
    fn validation_errors_are_located() {
        let text =
            "adt S[G]\nfunctions\n  new: S[G]\n  f: S[G] ->? G\naxioms\n  A1: f(new) = f(new)\n";
        let d = parse_adt(text).unwrap_err();
        assert_eq!(d.len(), 1);
        assert!(
            d[0].message
                .starts_with("partial-function-without-precondition"),
            "{}",
            d[0]
        );
        assert_eq!((d[0].line, d[0].column), (4, 3));
    }

    #[test]
    fn empty_axiom_spec_prints_empty_blocks() {
        let spec = parse_adt("adt S[G] functions new: S[G]").unwrap();
        assert_eq!(
            print_adt(&spec),
            "adt S[G]\n\nfunctions\n    new: S[G]\n\npreconditions\n\naxioms\n"
        );
    }
}
