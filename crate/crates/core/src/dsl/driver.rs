use std::fmt::Write as _;

use super::expr::{ExprParser, SExpr, Scope, EXPR_KEYWORDS};
use super::lexer::{tokenize, Cursor, PResult, Tok, Token};
use super::SourceDiagnostic;
use crate::contract::{ContractClass, Expr, Param, ValueSort};
use crate::drivers::{Call, DriverOrigin, SpecDriver};

const KEYWORDS: &[&str] = &["local", "require", "do", "ensure", "end", "create"];

fn at(t: &Token, message: &str) -> SourceDiagnostic {
    SourceDiagnostic::error(t.line, t.column, message, &t.tok.text())
}

/// Parses exactly one driver, resolving its assertions against `class`.
pub fn parse_driver(
    text: &str,
    class: &ContractClass,
) -> Result<SpecDriver, Vec<SourceDiagnostic>> {
    let mut drivers = parse_drivers(text, class)?;
    match drivers.len() {
        1 => Ok(drivers.remove(0)),
        n => Err(vec![SourceDiagnostic::error(
            1,
            1,
            &format!("expected one driver, found {n}"),
            "",
        )]),
    }
}

/// Parses a listing of drivers.
pub fn parse_drivers(
    text: &str,
    class: &ContractClass,
) -> Result<Vec<SpecDriver>, Vec<SourceDiagnostic>> {
    let toks = tokenize(text).map_err(|d| vec![d])?;
    let mut cur = Cursor::new(toks);
    let mut out = Vec::new();
    while !cur.at_eof() {
        out.push(driver(&mut cur, class).map_err(|d| vec![d])?);
    }
    Ok(out)
}

enum Written {
    Object(String),
    Value(ValueSort, String),
}

fn sort(cur: &mut Cursor) -> PResult<Written> {
    let reserved = [KEYWORDS, EXPR_KEYWORDS].concat();
    let (name, _) = cur.expect_ident("a sort", &reserved)?;
    if cur.eat_sym("[") {
        let (p, _) = cur.expect_ident("a sort parameter", &reserved)?;
        cur.expect_sym("]")?;
        return Ok(Written::Object(format!("{name}[{p}]")));
    }
    Ok(if name == "BOOLEAN" {
        Written::Value(ValueSort::Boolean, name)
    } else {
        Written::Value(ValueSort::Element, name)
    })
}

fn groups(cur: &mut Cursor, out: &mut Vec<(String, Token, Written)>) -> PResult<()> {
    let reserved = [KEYWORDS, EXPR_KEYWORDS].concat();
    loop {
        let mut names = vec![cur.expect_ident("a name", &reserved)?];
        while cur.eat_sym(",") {
            names.push(cur.expect_ident("a name", &reserved)?);
        }
        cur.expect_sym(":")?;
        let s = sort(cur)?;
        for (n, t) in names {
            let w = match &s {
                Written::Object(o) => Written::Object(o.clone()),
                Written::Value(v, n) => Written::Value(*v, n.clone()),
            };
            out.push((n, t, w));
        }
        if !cur.eat_sym(";") {
            return Ok(());
        }
        // `local` groups are not parenthesized; a following keyword ends them.
        if matches!(&cur.peek().tok, Tok::Ident(w) if KEYWORDS.contains(&w.as_str())) {
            return Ok(());
        }
    }
}

fn driver(cur: &mut Cursor, class: &ContractClass) -> PResult<SpecDriver> {
    let reserved = [KEYWORDS, EXPR_KEYWORDS].concat();
    let (name, name_tok) = cur.expect_ident("a driver name", &reserved)?;
    let Some(origin) = DriverOrigin::from_name(&name) else {
        return Err(at(
            &name_tok,
            &format!("driver name `{name}` does not follow `axiom_<label>`, `equivalence_<property>` or `<feature>_is_well_defined`"),
        ));
    };
    let mut header = Vec::new();
    if cur.eat_sym("(") {
        groups(cur, &mut header)?;
        cur.expect_sym(")")?;
    }
    let mut local_decls = Vec::new();
    if cur.eat_word("local") {
        groups(cur, &mut local_decls)?;
    }

    let mut object_sort: Option<String> = None;
    let mut element_sort: Option<String> = None;
    let mut objects = Vec::new();
    let mut locals = Vec::new();
    let mut params = Vec::new();
    let mut all_names: Vec<String> = Vec::new();
    for (is_local, (n, t, w)) in header
        .into_iter()
        .map(|g| (false, g))
        .chain(local_decls.into_iter().map(|g| (true, g)))
    {
        if all_names.contains(&n) {
            return Err(at(&t, &format!("`{n}` is declared twice")));
        }
        all_names.push(n.clone());
        match w {
            Written::Object(o) => {
                if object_sort.get_or_insert_with(|| o.clone()) != &o {
                    return Err(at(
                        &t,
                        &format!("all objects must have the same sort, not `{o}`"),
                    ));
                }
                if is_local {
                    locals.push(n);
                } else {
                    objects.push(n);
                }
            }
            Written::Value(_, _) if is_local => return Err(at(&t, "locals must be objects")),
            Written::Value(v, s) => {
                if v == ValueSort::Element && element_sort.get_or_insert_with(|| s.clone()) != &s {
                    return Err(at(
                        &t,
                        &format!("all elements must have the same sort, not `{s}`"),
                    ));
                }
                params.push(Param { name: n, sort: v });
            }
        }
    }
    let declared: Vec<String> = objects.iter().chain(&locals).cloned().collect();
    let param_sorts: Vec<(String, ValueSort)> =
        params.iter().map(|p| (p.name.clone(), p.sort)).collect();
    let scope = Scope {
        class,
        current: false,
        other: false,
        objects: &declared,
        params: &param_sorts,
        old: false,
        result: None,
    };
    let ep = ExprParser { reserved: KEYWORDS };

    let mut precondition = Vec::new();
    if cur.eat_word("require") {
        for e in assertions(cur, &ep)? {
            precondition.push(scope.assertion(&e)?);
        }
    }
    cur.expect_word("do", "`do`")?;
    let mut body = Vec::new();
    let mut created: Vec<String> = Vec::new();
    while !matches!(&cur.peek().tok, Tok::Ident(w) if w == "ensure" || w == "end") && !cur.at_eof()
    {
        let creation = cur.eat_word("create");
        let (target, ttok) = cur.expect_ident("a call target", &reserved)?;
        cur.expect_sym(".")?;
        let (feature_name, ftok) = cur.expect_ident("a feature name", &reserved)?;
        let mut raw_args: Vec<SExpr> = Vec::new();
        if cur.eat_sym("(") {
            raw_args.push(ep.expr(cur)?);
            while cur.eat_sym(",") {
                raw_args.push(ep.expr(cur)?);
            }
            cur.expect_sym(")")?;
        }
        if !declared.contains(&target) {
            return Err(at(&ttok, &format!("undeclared object `{target}`")));
        }
        let is_local = locals.contains(&target);
        if creation {
            if !is_local {
                return Err(at(
                    &ttok,
                    &format!("only locals can be created, `{target}` is an argument"),
                ));
            }
            if created.contains(&target) {
                return Err(at(&ttok, &format!("`{target}` is created twice")));
            }
            if feature_name != class.creation_feature {
                return Err(at(
                    &ftok,
                    &format!("`{feature_name}` is not the creation feature"),
                ));
            }
            created.push(target.clone());
        } else if is_local && !created.contains(&target) {
            return Err(at(
                &ttok,
                &format!("`{target}` is used before it is created"),
            ));
        }
        let Some(feature) = class.feature(&feature_name) else {
            return Err(at(&ftok, &format!("unknown feature `{feature_name}`")));
        };
        if !feature.is_command() {
            return Err(at(
                &ftok,
                &format!("`{feature_name}` is a query; only commands can be called"),
            ));
        }
        if feature.params.len() != raw_args.len() {
            return Err(at(
                &ftok,
                &format!(
                    "`{feature_name}` takes {} argument(s), given {}",
                    feature.params.len(),
                    raw_args.len()
                ),
            ));
        }
        let mut args: Vec<Expr> = Vec::new();
        for (a, p) in raw_args.iter().zip(&feature.params) {
            let x = match p.sort {
                ValueSort::Element => scope.element(a)?,
                ValueSort::Boolean => scope.assertion(a)?,
            };
            args.push(x);
        }
        body.push(Call {
            target,
            feature: feature_name,
            args,
            creation,
        });
    }
    let mut postcondition = Vec::new();
    if cur.eat_word("ensure") {
        for e in assertions(cur, &ep)? {
            postcondition.push(scope.assertion(&e)?);
        }
    }
    let end = cur.peek().clone();
    cur.expect_word("end", "`end`")?;
    for l in &locals {
        if !created.contains(l) {
            return Err(at(&end, &format!("local `{l}` is never created")));
        }
    }
    for e in precondition.iter() {
        let mentions_local = e.objects().iter().any(|o| locals.contains(o));
        if mentions_local {
            return Err(at(&name_tok, "preconditions cannot mention locals"));
        }
    }
    Ok(SpecDriver {
        name,
        origin,
        object_sort: object_sort
            .unwrap_or_else(|| format!("{}[{}]", class.name, class.element_sort)),
        element_sort: element_sort.unwrap_or_else(|| class.element_sort.clone()),
        objects,
        locals,
        params,
        precondition,
        body,
        postcondition,
    })
}

fn assertions(cur: &mut Cursor, ep: &ExprParser<'_>) -> PResult<Vec<SExpr>> {
    let mut out = Vec::new();
    while !matches!(&cur.peek().tok, Tok::Ident(w) if KEYWORDS.contains(&w.as_str()))
        && !cur.at_eof()
    {
        out.push(ep.expr(cur)?);
    }
    Ok(out)
}

fn grouped<'a>(items: impl Iterator<Item = (&'a str, String)>) -> String {
    let mut groups: Vec<(Vec<&str>, String)> = Vec::new();
    for (name, sort) in items {
        match groups.last_mut() {
            Some((names, s)) if *s == sort => names.push(name),
            _ => groups.push((vec![name], sort)),
        }
    }
    groups
        .iter()
        .map(|(names, sort)| format!("{}: {sort}", names.join(", ")))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Renders a driver in require/do/ensure block form.
pub fn print_driver(d: &SpecDriver) -> String {
    let mut out = String::new();
    out.push_str(&d.name);
    let header = grouped(
        d.objects
            .iter()
            .map(|o| (o.as_str(), d.object_sort.clone()))
            .chain(d.params.iter().map(|p| {
                let sort = match p.sort {
                    ValueSort::Element => d.element_sort.clone(),
                    ValueSort::Boolean => "BOOLEAN".to_string(),
                };
                (p.name.as_str(), sort)
            })),
    );
    if !header.is_empty() {
        let _ = write!(out, " ({header})");
    }
    out.push('\n');
    if !d.locals.is_empty() {
        let _ = writeln!(out, "    local");
        let _ = writeln!(
            out,
            "        {}",
            grouped(d.locals.iter().map(|o| (o.as_str(), d.object_sort.clone())))
        );
    }
    if !d.precondition.is_empty() {
        out.push_str("    require\n");
        for e in &d.precondition {
            let _ = writeln!(out, "        {e}");
        }
    }
    out.push_str("    do\n");
    for c in &d.body {
        let _ = writeln!(out, "        {c}");
    }
    out.push_str("    ensure\n");
    for e in &d.postcondition {
        let _ = writeln!(out, "        {e}");
    }
    out.push_str("    end\n");
    out
}

/// Renders drivers separated by blank lines.
pub fn print_drivers<'a>(drivers: impl IntoIterator<Item = &'a SpecDriver>) -> String {
    drivers
        .into_iter()
        .map(print_driver)
        .collect::<Vec<_>>()
        .join("\n")
}
