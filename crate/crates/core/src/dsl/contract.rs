use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::expr::{ExprParser, SExpr, Scope, EXPR_KEYWORDS};
use super::lexer::{tokenize, Cursor, PResult, Tok, Token};
use super::SourceDiagnostic;
use crate::contract::{Clause, ContractClass, Feature, FeatureKind, ModelField, Param, ValueSort};

const KEYWORDS: &[&str] = &[
    "class", "model", "create", "command", "query", "require", "ensure", "equality", "map", "to",
];

/// Names no feature, model field or parameter may take.
const RESERVED_NAMES: &[&str] = &["is_equal", "Current", "Result", "other", "BOOLEAN", "SEQ"];

struct RawClause {
    label: Option<(String, Token)>,
    expr: SExpr,
}

struct RawFeature {
    at: Token,
    feature: Feature,
    pre: Vec<RawClause>,
    post: Vec<RawClause>,
}

fn at(t: &Token, message: &str) -> SourceDiagnostic {
    SourceDiagnostic::error(t.line, t.column, message, &t.tok.text())
}

/// Parses a contract file and type-checks every assertion in it.
pub fn parse_contract(text: &str) -> Result<ContractClass, Vec<SourceDiagnostic>> {
    let toks = tokenize(text).map_err(|d| vec![d])?;
    let mut cur = Cursor::new(toks);
    parse(&mut cur).map_err(|d| vec![d])
}

fn reserved() -> Vec<&'static str> {
    [KEYWORDS, EXPR_KEYWORDS].concat()
}

fn parse(cur: &mut Cursor) -> PResult<ContractClass> {
    let reserved = reserved();
    cur.expect_word("class", "`class` header")?;
    let (name, _) = cur.expect_ident("a class name", &reserved)?;
    cur.expect_sym("[")?;
    let (element_sort, _) = cur.expect_ident("a generic parameter", &reserved)?;
    cur.expect_sym("]")?;

    let mut models: Vec<(String, Token)> = Vec::new();
    let mut creation: Option<(String, Token)> = None;
    let mut features: Vec<RawFeature> = Vec::new();
    let mut equality: Option<(SExpr, Token)> = None;
    let mut mapping: Vec<(String, String, Token)> = Vec::new();

    let expr_parser = ExprParser { reserved: KEYWORDS };
    while !cur.at_eof() {
        let head = cur.peek().clone();
        let word = match &head.tok {
            Tok::Ident(w) => w.clone(),
            other => {
                return Err(
                    cur.error_here(&format!("expected a declaration, found `{}`", other.text()))
                )
            }
        };
        cur.next();
        match word.as_str() {
            "model" => {
                let (field, tok) = cur.expect_ident("a model field name", &reserved)?;
                cur.expect_sym(":")?;
                cur.expect_word("SEQ", "`SEQ`")?;
                cur.expect_sym("[")?;
                let (p, ptok) = cur.expect_ident("the generic parameter", &reserved)?;
                if p != element_sort {
                    return Err(at(&ptok, &format!("model sequences range over `{element_sort}`")));
                }
                cur.expect_sym("]")?;
                models.push((field, tok));
            }
            "create" => {
                let (f, tok) = cur.expect_ident("a creation feature name", &reserved)?;
                if creation.is_some() {
                    return Err(at(&head, "more than one `create` declaration"));
                }
                creation = Some((f, tok));
            }
            "command" | "query" => {
                let (fname, tok) = cur.expect_ident("a feature name", &reserved)?;
                let mut params = Vec::new();
                if cur.eat_sym("(") {
                    if word == "query" {
                        return Err(at(&tok, "query parameters are not supported"));
                    }
                    loop {
                        let mut names = vec![cur.expect_ident("a parameter name", &reserved)?];
                        while cur.eat_sym(",") {
                            names.push(cur.expect_ident("a parameter name", &reserved)?);
                        }
                        cur.expect_sym(":")?;
                        let sort = value_sort(cur, &element_sort)?;
                        params.extend(names.into_iter().map(|(n, t)| (Param { name: n, sort }, t)));
                        if !cur.eat_sym(";") {
                            break;
                        }
                    }
                    cur.expect_sym(")")?;
                }
                let kind = if word == "query" {
                    cur.expect_sym(":")?;
                    FeatureKind::Query(value_sort(cur, &element_sort)?)
                } else {
                    FeatureKind::Command
                };
                let mut seen = BTreeSet::new();
                for (p, t) in &params {
                    if !seen.insert(p.name.clone()) {
                        return Err(at(t, &format!("duplicate parameter `{}`", p.name)));
                    }
                }
                let mut raw = RawFeature {
                    at: tok,
                    feature: Feature {
                        name: fname,
                        kind,
                        params: params.into_iter().map(|(p, _)| p).collect(),
                        precondition: vec![],
                        postcondition: vec![],
                    },
                    pre: vec![],
                    post: vec![],
                };
                loop {
                    if cur.eat_word("require") {
                        clauses(cur, &expr_parser, &mut raw.pre)?;
                    } else if cur.eat_word("ensure") {
                        clauses(cur, &expr_parser, &mut raw.post)?;
                    } else {
                        break;
                    }
                }
                features.push(raw);
            }
            "equality" => {
                if equality.is_some() {
                    return Err(at(&head, "more than one equality definition"));
                }
                cur.eat_sym(":");
                equality = Some((expr_parser.expr(cur)?, head));
            }
            "map" => {
                let (from, _) = cur.expect_ident("an ADT function name", &reserved)?;
                cur.expect_word("to", "`to`")?;
                let (to, tok) = cur.expect_ident("a feature name", &reserved)?;
                mapping.push((from, to, tok));
            }
            _ => {
                return Err(at(
                    &head,
                    &format!("expected `model`, `create`, `command`, `query`, `equality` or `map`, found `{word}`"),
                ))
            }
        }
    }

    // Declarations.
    let mut names: BTreeSet<String> = BTreeSet::new();
    for (m, tok) in &models {
        if RESERVED_NAMES.contains(&m.as_str()) || !names.insert(m.clone()) {
            return Err(at(tok, &format!("duplicate or reserved name `{m}`")));
        }
    }
    for f in &features {
        let n = &f.feature.name;
        if RESERVED_NAMES.contains(&n.as_str()) || !names.insert(n.clone()) {
            return Err(at(&f.at, &format!("duplicate or reserved name `{n}`")));
        }
    }
    for f in &features {
        if let Some(p) = f
            .feature
            .params
            .iter()
            .find(|p| names.contains(&p.name) || RESERVED_NAMES.contains(&p.name.as_str()))
        {
            return Err(at(
                &f.at,
                &format!(
                    "parameter `{}` of `{}` clashes with a component name",
                    p.name, f.feature.name
                ),
            ));
        }
    }
    let Some((creation_feature, ctok)) = creation else {
        return Err(cur.error_here("missing `create` declaration"));
    };
    match features.iter().find(|f| f.feature.name == creation_feature) {
        Some(f) if f.feature.is_command() => {}
        Some(_) => {
            return Err(at(
                &ctok,
                &format!("creation feature `{creation_feature}` must be a command"),
            ))
        }
        None => {
            return Err(at(
                &ctok,
                &format!("creation feature `{creation_feature}` is not declared"),
            ))
        }
    }
    let mut mapped = BTreeSet::new();
    for (from, to, tok) in &mapping {
        if !mapped.insert(from.clone()) {
            return Err(at(tok, &format!("`{from}` is mapped twice")));
        }
        if !features.iter().any(|f| &f.feature.name == to) {
            return Err(at(tok, &format!("unknown feature `{to}` in mapping")));
        }
    }

    let mut class = ContractClass {
        name,
        element_sort,
        model_fields: models
            .into_iter()
            .map(|(name, _)| ModelField { name })
            .collect(),
        creation_feature,
        features: features.iter().map(|f| f.feature.clone()).collect(),
        equality: None,
        mapping: mapping.into_iter().map(|(a, b, _)| (a, b)).collect(),
    };

    // Assertions, resolved against the complete declaration list.
    let mut resolved = Vec::new();
    for f in &features {
        let params: Vec<(String, ValueSort)> = f
            .feature
            .params
            .iter()
            .map(|p| (p.name.clone(), p.sort))
            .collect();
        let mut labels = BTreeSet::new();
        for c in f.pre.iter().chain(&f.post) {
            if let Some((l, t)) = &c.label {
                if !labels.insert(l.clone()) {
                    return Err(at(
                        t,
                        &format!("duplicate label `{l}` in `{}`", f.feature.name),
                    ));
                }
            }
        }
        let scope = |old: bool, result| Scope {
            class: &class,
            current: true,
            other: false,
            objects: &[],
            params: &params,
            old,
            result,
        };
        let pre_scope = scope(false, None);
        let post_scope = match f.feature.kind {
            FeatureKind::Command => scope(true, None),
            FeatureKind::Query(s) => scope(false, Some(s)),
        };
        let resolve_all = |raw: &[RawClause], scope: &Scope| -> PResult<Vec<Clause>> {
            raw.iter()
                .map(|c| {
                    Ok(Clause {
                        label: c.label.as_ref().map(|(l, _)| l.clone()),
                        expr: scope.assertion(&c.expr)?,
                    })
                })
                .collect()
        };
        resolved.push((
            resolve_all(&f.pre, &pre_scope)?,
            resolve_all(&f.post, &post_scope)?,
        ));
    }
    let equality = match &equality {
        Some((e, _)) => Some(
            Scope {
                class: &class,
                current: true,
                other: true,
                objects: &[],
                params: &[],
                old: false,
                result: None,
            }
            .assertion(e)?,
        ),
        None => None,
    };
    for (f, (pre, post)) in class.features.iter_mut().zip(resolved) {
        f.precondition = pre;
        f.postcondition = post;
    }
    class.equality = equality;
    Ok(class)
}

fn value_sort(cur: &mut Cursor, element_sort: &str) -> PResult<ValueSort> {
    let t = cur.peek().clone();
    match &t.tok {
        Tok::Ident(w) if w == element_sort => {
            cur.next();
            Ok(ValueSort::Element)
        }
        Tok::Ident(w) if w == "BOOLEAN" => {
            cur.next();
            Ok(ValueSort::Boolean)
        }
        other => Err(cur.error_here(&format!(
            "expected `{element_sort}` or `BOOLEAN`, found `{}`",
            other.text()
        ))),
    }
}

fn clauses(cur: &mut Cursor, p: &ExprParser<'_>, out: &mut Vec<RawClause>) -> PResult<()> {
    let starts_clause = |cur: &Cursor| match &cur.peek().tok {
        Tok::Eof => false,
        Tok::Ident(w) => !KEYWORDS.contains(&w.as_str()),
        _ => true,
    };
    if !starts_clause(cur) {
        return Err(cur.error_here("expected an assertion"));
    }
    while starts_clause(cur) {
        let label = match (&cur.peek().tok, &cur.peek_at(1).tok) {
            (Tok::Ident(l), Tok::Sym(":")) => {
                let l = l.clone();
                let t = cur.next();
                cur.next();
                Some((l, t))
            }
            _ => None,
        };
        out.push(RawClause {
            label,
            expr: p.expr(cur)?,
        });
    }
    Ok(())
}

fn sort_name(class: &ContractClass, s: ValueSort) -> &str {
    match s {
        ValueSort::Element => &class.element_sort,
        ValueSort::Boolean => "BOOLEAN",
    }
}

/// Renders a class in the `.ct` format.
pub fn print_contract(class: &ContractClass) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "class {}[{}]", class.name, class.element_sort);
    for m in &class.model_fields {
        let _ = writeln!(out, "model {}: SEQ[{}]", m.name, class.element_sort);
    }
    let _ = writeln!(out, "create {}", class.creation_feature);
    for f in &class.features {
        out.push('\n');
        match f.kind {
            FeatureKind::Command => {
                let _ = write!(out, "command {}", f.name);
                if !f.params.is_empty() {
                    let ps: Vec<String> = f
                        .params
                        .iter()
                        .map(|p| format!("{}: {}", p.name, sort_name(class, p.sort)))
                        .collect();
                    let _ = write!(out, "({})", ps.join("; "));
                }
                out.push('\n');
            }
            FeatureKind::Query(s) => {
                let _ = writeln!(out, "query {}: {}", f.name, sort_name(class, s));
            }
        }
        for (kw, clauses) in [("require", &f.precondition), ("ensure", &f.postcondition)] {
            if clauses.is_empty() {
                continue;
            }
            let _ = writeln!(out, "    {kw}");
            for c in clauses {
                let _ = writeln!(out, "        {c}");
            }
        }
    }
    if let Some(eq) = &class.equality {
        let _ = write!(out, "\nequality: {eq}\n");
    }
    if !class.mapping.is_empty() {
        out.push('\n');
        for (from, to) in &class.mapping {
            let _ = writeln!(out, "map {from} to {to}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contract::{BinOp, Expr, ObjRef, SeqOp};

    pub const MODEL: &str = "class STACK_SEQUENCE[G]
model sequence: SEQ[G]
create new

command extend(x: G)
    ensure
        a1: item = x
        a4: not is_empty
        definition: sequence = old sequence.extended(x)

command remove
    require not is_empty
    ensure definition: sequence = old sequence.but_last

query item: G
    require not is_empty
    ensure definition: Result = sequence.last

query is_empty: BOOLEAN
    ensure definition: Result = sequence.is_empty

command new
    ensure
        a3: is_empty
        definition: sequence.is_empty

equality: sequence.count = other.sequence.count and then
    (across 1 |..| sequence.count as i all sequence[i.item] = other.sequence[i.item] end)
";

    #[test]
    fn parses_the_model_contract() {
        let c = parse_contract(MODEL).unwrap();
        assert_eq!(c.features.len(), 5);
        assert_eq!(c.model_fields[0].name, "sequence");
        assert!(c.equality.is_some());
        let ext = c.feature("extend").unwrap();
        let seq = Expr::read(ObjRef::Current, "sequence");
        assert_eq!(
            ext.postcondition[2].expr,
            Expr::bin(
                BinOp::Eq,
                seq.clone(),
                Expr::Old(Box::new(Expr::Seq(
                    SeqOp::Extended,
                    Box::new(seq),
                    Some(Box::new(Expr::var("x")))
                )))
            )
        );
        assert_eq!(ext.postcondition[2].label.as_deref(), Some("definition"));
    }

    #[test]
    fn round_trips() {
        let c = parse_contract(MODEL).unwrap();
        let printed = print_contract(&c);
        assert_eq!(parse_contract(&printed).unwrap(), c, "{printed}");
    }

    #[test]
    fn unknown_component_is_reported() {
        let text = "class S[G] create new command new ensure size = 0";
        let d = parse_contract(text).unwrap_err();
        assert!(
            d[0].message.contains("unknown component `size`"),
            "{}",
            d[0]
        );
        assert_eq!(d[0].token, "size");
    }

    #[test]
    fn old_and_result_are_scoped() {
        let d = parse_contract("class S[G] create new command new query q: BOOLEAN ensure old q")
            .unwrap_err();
        assert!(d[0].message.contains("`old`"), "{}", d[0]);
        let d = parse_contract("class S[G] create new command new ensure Result").unwrap_err();
        assert!(d[0].message.contains("`Result`"), "{}", d[0]);
    }

    #[test]
    fn declaration_errors() {
        let d = parse_contract("class S[G] create make command new").unwrap_err();
        assert!(d[0].message.contains("not declared"), "{}", d[0]);
        let d = parse_contract("class S[G] create new command new query q(x: G): G").unwrap_err();
        assert!(d[0].message.contains("query parameters"), "{}", d[0]);
        let d =
            parse_contract("class S[G] create new command new ensure a: true a: true").unwrap_err();
        assert!(d[0].message.contains("duplicate label"), "{}", d[0]);
    }
}
