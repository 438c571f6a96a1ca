//! Abstract data type specifications: sorts, function signatures, partial
//! function preconditions and equational axioms.
//!
//! A raw [`AdtSpec`] is plain data. [`validate_adt`] classifies every
//! function, sort-checks every term and infers the sorts of the universally
//! quantified variables of each axiom, producing a [`ValidatedAdtSpec`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SortKind {
    /// The sort the ADT defines, e.g. `STACK[G]`.
    Principal,
    /// The opaque generic parameter, e.g. `G`.
    Parameter,
    Boolean,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sort {
    pub name: String,
    pub kind: SortKind,
}

impl Sort {
    pub fn boolean() -> Self {
        Sort {
            name: "BOOLEAN".into(),
            kind: SortKind::Boolean,
        }
    }

    pub fn is_principal(&self) -> bool {
        self.kind == SortKind::Principal
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    /// No principal argument, principal result.
    Creator,
    /// Principal first argument, principal result.
    Transformer,
    /// Principal first argument, non-principal result.
    Observer,
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionKind::Creator => "creator",
            FunctionKind::Transformer => "transformer",
            FunctionKind::Observer => "observer",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionSig {
    pub name: String,
    pub arg_sorts: Vec<Sort>,
    pub result_sort: Sort,
    pub partial: bool,
    /// Filled in by validation.
    pub kind: Option<FunctionKind>,
}

impl FunctionSig {
    pub fn kind(&self) -> FunctionKind {
        self.kind
            .expect("function signature has not been validated")
    }

    /// The non-principal arguments, i.e. everything after the target.
    pub fn extra_args(&self) -> &[Sort] {
        match self.arg_sorts.first() {
            Some(s) if s.is_principal() => &self.arg_sorts[1..],
            _ => &self.arg_sorts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
    Not(Box<Term>),
    Eq(Box<Term>, Box<Term>),
}

impl Term {
    pub fn app(name: &str, args: Vec<Term>) -> Self {
        Term::App(name.to_string(), args)
    }

    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<String> {
        fn walk(t: &Term, out: &mut Vec<String>) {
            match t {
                Term::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone())
                    }
                }
                Term::App(_, args) => args.iter().for_each(|a| walk(a, out)),
                Term::Not(t) => walk(t, out),
                Term::Eq(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    /// Number of occurrences of variable `name`.
    pub fn occurrences(&self, name: &str) -> usize {
        match self {
            Term::Var(v) => usize::from(v == name),
            Term::App(_, args) => args.iter().map(|a| a.occurrences(name)).sum(),
            Term::Not(t) => t.occurrences(name),
            Term::Eq(a, b) => a.occurrences(name) + b.occurrences(name),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) if args.is_empty() => f.write_str(name),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Not(t) => match **t {
                Term::Eq(..) => write!(f, "not ({t})"),
                _ => write!(f, "not {t}"),
            },
            Term::Eq(a, b) => write!(f, "{a} = {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedVar {
    pub name: String,
    pub sort: Sort,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precondition {
    pub function: String,
    /// Formal variable names; their sorts come from the function signature.
    pub formals: Vec<String>,
    pub condition: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub label: String,
    /// Inferred by validation, in order of first occurrence in the body.
    pub universals: Vec<TypedVar>,
    pub body: Term,
}

impl Axiom {
    pub fn sort_of_var(&self, name: &str) -> Option<&Sort> {
        self.universals
            .iter()
            .find(|v| v.name == name)
            .map(|v| &v.sort)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdtSpec {
    /// Principal type name without its parameter, e.g. `STACK`.
    pub name: String,
    /// Generic parameter name, e.g. `G`.
    pub parameter: String,
    pub functions: Vec<FunctionSig>,
    pub preconditions: Vec<Precondition>,
    pub axioms: Vec<Axiom>,
}

impl AdtSpec {
    pub fn principal_sort(&self) -> Sort {
        Sort {
            name: format!("{}[{}]", self.name, self.parameter),
            kind: SortKind::Principal,
        }
    }

    pub fn parameter_sort(&self) -> Sort {
        Sort {
            name: self.parameter.clone(),
            kind: SortKind::Parameter,
        }
    }

    pub fn sorts(&self) -> Vec<Sort> {
        vec![
            self.principal_sort(),
            self.parameter_sort(),
            Sort::boolean(),
        ]
    }

    /// Resolves a written sort name (`STACK[G]`, `STACK`, `G`, `BOOLEAN`).
    pub fn sort_named(&self, name: &str) -> Option<Sort> {
        let principal = self.principal_sort();
        if name == principal.name || name == self.name {
            Some(principal)
        } else if name == self.parameter {
            Some(self.parameter_sort())
        } else if name == "BOOLEAN" {
            Some(Sort::boolean())
        } else {
            None
        }
    }

    pub fn function(&self, name: &str) -> Option<&FunctionSig> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn precondition(&self, function: &str) -> Option<&Precondition> {
        self.preconditions.iter().find(|p| p.function == function)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdtErrorKind {
    UnknownSymbol,
    SortMismatch,
    PartialWithoutPrecondition,
    DuplicateName,
    IllFormedSignature,
    IllFormedPrecondition,
}

impl fmt::Display for AdtErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdtErrorKind::UnknownSymbol => "unknown-symbol",
            AdtErrorKind::SortMismatch => "sort-mismatch",
            AdtErrorKind::PartialWithoutPrecondition => "partial-function-without-precondition",
            AdtErrorKind::DuplicateName => "duplicate-name",
            AdtErrorKind::IllFormedSignature => "ill-formed-signature",
            AdtErrorKind::IllFormedPrecondition => "ill-formed-precondition",
        })
    }
}

/// A validation problem, naming the offending item and where in it the
/// problem sits (`argument 2 of extend`, `left side`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {item}: {message}")]
pub struct AdtDiagnostic {
    pub kind: AdtErrorKind,
    /// `axiom A1`, `function remove`, `precondition of item`.
    pub item: String,
    pub position: String,
    pub message: String,
}

/// An [`AdtSpec`] whose functions are classified and whose terms sort-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidatedAdtSpec(AdtSpec);

impl Deref for ValidatedAdtSpec {
    type Target = AdtSpec;
    fn deref(&self) -> &AdtSpec {
        &self.0
    }
}

impl ValidatedAdtSpec {
    pub fn spec(&self) -> &AdtSpec {
        &self.0
    }

    pub fn into_inner(self) -> AdtSpec {
        self.0
    }

    pub fn creators(&self) -> impl Iterator<Item = &FunctionSig> {
        self.functions
            .iter()
            .filter(|f| f.kind() == FunctionKind::Creator)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SortError {
    #[error("unsorted term: unknown symbol `{0}`")]
    Unsorted(String),
    #[error("sort mismatch in `{0}`")]
    Mismatch(String),
}

/// Sort of `t`. Variables are looked up in `vars`.
pub fn term_sort(
    t: &Term,
    spec: &AdtSpec,
    vars: &BTreeMap<String, Sort>,
) -> Result<Sort, SortError> {
    match t {
        Term::Var(v) => match vars.get(v) {
            Some(s) => Ok(s.clone()),
            None => match spec.function(v) {
                Some(f) if f.arg_sorts.is_empty() => Ok(f.result_sort.clone()),
                _ => Err(SortError::Unsorted(v.clone())),
            },
        },
        Term::App(name, args) => {
            let f = spec
                .function(name)
                .ok_or_else(|| SortError::Unsorted(name.clone()))?;
            if f.arg_sorts.len() != args.len() {
                return Err(SortError::Mismatch(t.to_string()));
            }
            for (a, expected) in args.iter().zip(&f.arg_sorts) {
                if &term_sort(a, spec, vars)? != expected {
                    return Err(SortError::Mismatch(t.to_string()));
                }
            }
            Ok(f.result_sort.clone())
        }
        Term::Not(inner) => {
            if term_sort(inner, spec, vars)?.kind != SortKind::Boolean {
                return Err(SortError::Mismatch(t.to_string()));
            }
            Ok(Sort::boolean())
        }
        Term::Eq(a, b) => {
            if term_sort(a, spec, vars)? != term_sort(b, spec, vars)? {
                return Err(SortError::Mismatch(t.to_string()));
            }
            Ok(Sort::boolean())
        }
    }
}

/// Sort of a closed-over axiom term, using the axiom's universals.
pub fn axiom_term_sort(t: &Term, spec: &AdtSpec, axiom: &Axiom) -> Result<Sort, SortError> {
    let vars = axiom
        .universals
        .iter()
        .map(|v| (v.name.clone(), v.sort.clone()))
        .collect();
    term_sort(t, spec, &vars)
}

fn classify(f: &FunctionSig) -> Result<FunctionKind, String> {
    let principal_positions: Vec<usize> = f
        .arg_sorts
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_principal())
        .map(|(i, _)| i)
        .collect();
    match (principal_positions.as_slice(), f.result_sort.is_principal()) {
        ([], true) => Ok(FunctionKind::Creator),
        ([0], true) => Ok(FunctionKind::Transformer),
        ([0], false) => Ok(FunctionKind::Observer),
        ([], false) => Err("takes no principal argument and does not produce one".into()),
        _ => Err("the principal sort may only appear as the first argument".into()),
    }
}

/// Replaces variables named like nullary functions by applications.
fn normalize(t: &Term, spec: &AdtSpec) -> Term {
    match t {
        Term::Var(v) => match spec.function(v) {
            Some(f) if f.arg_sorts.is_empty() => Term::App(v.clone(), vec![]),
            _ => t.clone(),
        },
        Term::App(n, args) => {
            Term::App(n.clone(), args.iter().map(|a| normalize(a, spec)).collect())
        }
        Term::Not(a) => Term::Not(Box::new(normalize(a, spec))),
        Term::Eq(a, b) => Term::Eq(Box::new(normalize(a, spec)), Box::new(normalize(b, spec))),
    }
}

struct Inference<'a> {
    spec: &'a AdtSpec,
    item: String,
    sorts: BTreeMap<String, Sort>,
    fixed: bool,
    diags: Vec<AdtDiagnostic>,
}

impl Inference<'_> {
    fn diag(&mut self, kind: AdtErrorKind, position: &str, message: String) {
        self.diags.push(AdtDiagnostic {
            kind,
            item: self.item.clone(),
            position: position.to_string(),
            message,
        });
    }

    /// Infers the sort of `t`; `expected` is the sort demanded by context.
    fn infer(&mut self, t: &Term, expected: Option<&Sort>, position: &str) -> Option<Sort> {
        match t {
            Term::Var(v) => match (self.sorts.get(v).cloned(), expected) {
                (Some(s), Some(e)) if &s != e => {
                    self.diag(
                        AdtErrorKind::SortMismatch,
                        position,
                        format!("`{v}` has sort {s} but {e} is expected"),
                    );
                    None
                }
                (Some(s), _) => Some(s),
                (None, _) if self.fixed => {
                    self.diag(
                        AdtErrorKind::UnknownSymbol,
                        position,
                        format!("unknown variable `{v}`"),
                    );
                    None
                }
                (None, Some(e)) => {
                    self.sorts.insert(v.clone(), e.clone());
                    Some(e.clone())
                }
                (None, None) => None,
            },
            Term::App(name, args) => {
                let Some(f) = self.spec.function(name).cloned() else {
                    self.diag(
                        AdtErrorKind::UnknownSymbol,
                        position,
                        format!("unknown function `{name}`"),
                    );
                    return None;
                };
                if f.arg_sorts.len() != args.len() {
                    self.diag(
                        AdtErrorKind::SortMismatch,
                        position,
                        format!(
                            "`{name}` takes {} argument(s), {} given",
                            f.arg_sorts.len(),
                            args.len()
                        ),
                    );
                    return None;
                }
                let mut ok = true;
                for (i, (a, s)) in args.iter().zip(&f.arg_sorts).enumerate() {
                    let pos = format!("argument {} of {name}", i + 1);
                    ok &= self.infer(a, Some(s), &pos).is_some();
                }
                if let Some(e) = expected {
                    if e != &f.result_sort {
                        self.diag(
                            AdtErrorKind::SortMismatch,
                            position,
                            format!("`{name}` produces {} but {e} is expected", f.result_sort),
                        );
                        return None;
                    }
                }
                ok.then_some(f.result_sort)
            }
            Term::Not(inner) => {
                self.infer(inner, Some(&Sort::boolean()), "operand of not")?;
                self.check_expected(&Sort::boolean(), expected, position)
            }
            Term::Eq(a, b) => {
                let before = self.diags.len();
                let left = self.infer(a, None, "left side");
                let left_failed = self.diags.len() > before;
                let right = self.infer(b, left.as_ref(), "right side");
                if left_failed {
                    return None;
                }
                if left.is_none() && right.is_some() {
                    self.infer(a, right.as_ref(), "left side")?;
                } else if left.is_none() && right.is_none() && self.diags.len() == before {
                    self.diag(
                        AdtErrorKind::SortMismatch,
                        position,
                        "cannot infer the sort of either side of the equation".into(),
                    );
                }
                right?;
                self.check_expected(&Sort::boolean(), expected, position)
            }
        }
    }

    fn check_expected(
        &mut self,
        actual: &Sort,
        expected: Option<&Sort>,
        position: &str,
    ) -> Option<Sort> {
        match expected {
            Some(e) if e != actual => {
                self.diag(
                    AdtErrorKind::SortMismatch,
                    position,
                    format!("{actual} used where {e} is expected"),
                );
                None
            }
            _ => Some(actual.clone()),
        }
    }
}

/// Validates and classifies a raw specification.
pub fn validate_adt(raw: &AdtSpec) -> Result<ValidatedAdtSpec, Vec<AdtDiagnostic>> {
    let mut spec = raw.clone();
    let mut diags: Vec<AdtDiagnostic> = Vec::new();
    fn push(
        diags: &mut Vec<AdtDiagnostic>,
        kind: AdtErrorKind,
        item: String,
        position: &str,
        message: String,
    ) {
        diags.push(AdtDiagnostic {
            kind,
            item,
            position: position.to_string(),
            message,
        })
    }
    macro_rules! diag {
        ($($arg:expr),* $(,)?) => { push(&mut diags, $($arg),*) };
    }

    let mut seen = BTreeSet::new();
    for f in &mut spec.functions {
        if !seen.insert(f.name.clone()) {
            diag!(
                AdtErrorKind::DuplicateName,
                format!("function {}", f.name),
                "signature",
                "declared twice".into()
            );
        }
        match classify(f) {
            Ok(kind) => {
                if kind == FunctionKind::Creator && f.partial {
                    diag!(
                        AdtErrorKind::IllFormedSignature,
                        format!("function {}", f.name),
                        "signature",
                        "creators cannot be partial".into(),
                    );
                }
                f.kind = Some(kind);
            }
            Err(msg) => {
                f.kind = None;
                diag!(
                    AdtErrorKind::IllFormedSignature,
                    format!("function {}", f.name),
                    "signature",
                    msg
                );
            }
        }
    }
    let mut labels = BTreeSet::new();
    for a in &spec.axioms {
        if !labels.insert(a.label.clone()) {
            diag!(
                AdtErrorKind::DuplicateName,
                format!("axiom {}", a.label),
                "label",
                "declared twice".into()
            );
        }
        if spec.function(&a.label).is_some() {
            diag!(
                AdtErrorKind::DuplicateName,
                format!("axiom {}", a.label),
                "label",
                "label clashes with a function name".into(),
            );
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }

    for f in &spec.functions {
        let count = spec
            .preconditions
            .iter()
            .filter(|p| p.function == f.name)
            .count();
        if f.partial && count == 0 {
            diag!(
                AdtErrorKind::PartialWithoutPrecondition,
                format!("function {}", f.name),
                "signature",
                "partial function has no precondition".into(),
            );
        }
        if count > 1 {
            diag!(
                AdtErrorKind::DuplicateName,
                format!("precondition of {}", f.name),
                "precondition",
                "more than one precondition".into(),
            );
        }
    }

    let snapshot = spec.clone();
    for p in &mut spec.preconditions {
        let item = format!("precondition of {}", p.function);
        let Some(f) = snapshot.function(&p.function) else {
            diag!(
                AdtErrorKind::UnknownSymbol,
                item,
                "head",
                format!("unknown function `{}`", p.function)
            );
            continue;
        };
        if f.arg_sorts.len() != p.formals.len() {
            diag!(
                AdtErrorKind::IllFormedPrecondition,
                item,
                "head",
                format!("`{}` takes {} argument(s)", f.name, f.arg_sorts.len()),
            );
            continue;
        }
        let unique: BTreeSet<_> = p.formals.iter().collect();
        if unique.len() != p.formals.len() {
            diag!(
                AdtErrorKind::DuplicateName,
                item,
                "head",
                "formal variables must be distinct".into()
            );
            continue;
        }
        p.condition = normalize(&p.condition, &snapshot);
        let mut inf = Inference {
            spec: &snapshot,
            item: item.clone(),
            sorts: p
                .formals
                .iter()
                .cloned()
                .zip(f.arg_sorts.iter().cloned())
                .collect(),
            fixed: true,
            diags: vec![],
        };
        inf.infer(&p.condition, Some(&Sort::boolean()), "condition");
        diags.extend(inf.diags);
    }

    for a in &mut spec.axioms {
        a.body = normalize(&a.body, &snapshot);
        let mut inf = Inference {
            spec: &snapshot,
            item: format!("axiom {}", a.label),
            sorts: BTreeMap::new(),
            fixed: false,
            diags: vec![],
        };
        let ok = inf.infer(&a.body, Some(&Sort::boolean()), "body").is_some();
        let found = inf.diags.len();
        diags.extend(inf.diags);
        if !ok && found == 0 {
            diags.push(AdtDiagnostic {
                kind: AdtErrorKind::SortMismatch,
                item: format!("axiom {}", a.label),
                position: "body".into(),
                message: "axiom body is not boolean".into(),
            });
        }
        a.universals = a
            .body
            .variables()
            .into_iter()
            .filter_map(|v| {
                inf.sorts.get(&v).map(|s| TypedVar {
                    name: v.clone(),
                    sort: s.clone(),
                })
            })
            .collect();
    }

    if diags.is_empty() {
        Ok(ValidatedAdtSpec(spec))
    } else {
        Err(diags)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(spec: &AdtSpec, name: &str, args: &[&str], result: &str, partial: bool) -> FunctionSig {
        FunctionSig {
            name: name.into(),
            arg_sorts: args.iter().map(|a| spec.sort_named(a).unwrap()).collect(),
            result_sort: spec.sort_named(result).unwrap(),
            partial,
            kind: None,
        }
    }

    fn stack() -> AdtSpec {
        let mut spec = AdtSpec {
            name: "STACK".into(),
            parameter: "G".into(),
            functions: vec![],
            preconditions: vec![],
            axioms: vec![],
        };
        spec.functions = vec![
            sig(&spec, "extend", &["STACK", "G"], "STACK", false),
            sig(&spec, "remove", &["STACK"], "STACK", true),
            sig(&spec, "item", &["STACK"], "G", true),
            sig(&spec, "is_empty", &["STACK"], "BOOLEAN", false),
            sig(&spec, "new", &[], "STACK", false),
        ];
        let not_empty = Term::Not(Box::new(Term::app("is_empty", vec![Term::var("s")])));
        spec.preconditions = vec![
            Precondition {
                function: "remove".into(),
                formals: vec!["s".into()],
                condition: not_empty.clone(),
            },
            Precondition {
                function: "item".into(),
                formals: vec!["s".into()],
                condition: not_empty,
            },
        ];
        let ext = Term::app("extend", vec![Term::var("s"), Term::var("x")]);
        let axiom = |label: &str, body| Axiom {
            label: label.into(),
            universals: vec![],
            body,
        };
        spec.axioms = vec![
            axiom(
                "A1",
                Term::Eq(
                    Box::new(Term::app("item", vec![ext.clone()])),
                    Box::new(Term::var("x")),
                ),
            ),
            axiom(
                "A2",
                Term::Eq(
                    Box::new(Term::app("remove", vec![ext.clone()])),
                    Box::new(Term::var("s")),
                ),
            ),
            axiom("A3", Term::app("is_empty", vec![Term::var("new")])),
            axiom("A4", Term::Not(Box::new(Term::app("is_empty", vec![ext])))),
        ];
        spec
    }

    #[test]
    fn classifies_stack_functions() {
        let v = validate_adt(&stack()).unwrap();
        let kind = |n: &str| v.function(n).unwrap().kind();
        assert_eq!(kind("new"), FunctionKind::Creator);
        assert_eq!(kind("extend"), FunctionKind::Transformer);
        assert_eq!(kind("remove"), FunctionKind::Transformer);
        assert_eq!(kind("item"), FunctionKind::Observer);
        assert_eq!(kind("is_empty"), FunctionKind::Observer);
        // `new` written bare is normalized to an application
        assert_eq!(
            v.axioms[2].body,
            Term::app("is_empty", vec![Term::app("new", vec![])])
        );
        let a1 = &v.axioms[0];
        assert_eq!(a1.universals.len(), 2);
        assert_eq!(a1.sort_of_var("s").unwrap().kind, SortKind::Principal);
        assert_eq!(a1.sort_of_var("x").unwrap().kind, SortKind::Parameter);
    }

    #[test]
    fn validation_is_idempotent() {
        let v = validate_adt(&stack()).unwrap();
        let again = validate_adt(v.spec()).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn empty_axiom_set_is_valid() {
        let mut spec = stack();
        spec.axioms.clear();
        spec.functions
            .retain(|f| f.name == "new" || f.name == "is_empty");
        spec.preconditions.clear();
        assert!(validate_adt(&spec).is_ok());
    }

    #[test]
    fn sort_mismatch_at_inner_argument() {
        let mut spec = stack();
        let bad = Term::app("extend", vec![Term::var("s"), Term::var("s")]);
        spec.axioms = vec![Axiom {
            label: "B".into(),
            universals: vec![],
            body: Term::Eq(
                Box::new(Term::app("item", vec![bad])),
                Box::new(Term::var("s")),
            ),
        }];
        let diags = validate_adt(&spec).unwrap_err();
        assert_eq!(diags[0].kind, AdtErrorKind::SortMismatch);
        assert_eq!(diags[0].item, "axiom B");
        assert_eq!(diags[0].position, "argument 2 of extend");
    }

    #[test]
    fn partial_function_needs_precondition() {
        let mut spec = stack();
        spec.preconditions.remove(0);
        let diags = validate_adt(&spec).unwrap_err();
        assert_eq!(diags[0].kind, AdtErrorKind::PartialWithoutPrecondition);
        assert_eq!(diags[0].item, "function remove");
    }

    #[test]
    fn duplicate_and_unknown_names() {
        let mut spec = stack();
        let dup = spec.functions[0].clone();
        spec.functions.push(dup);
        assert_eq!(
            validate_adt(&spec).unwrap_err()[0].kind,
            AdtErrorKind::DuplicateName
        );

        let mut spec = stack();
        spec.axioms[0].body = Term::app("top", vec![Term::var("s")]);
        assert_eq!(
            validate_adt(&spec).unwrap_err()[0].kind,
            AdtErrorKind::UnknownSymbol
        );
    }

    #[test]
    fn principal_only_as_first_argument() {
        let mut spec = stack();
        let g = spec.parameter_sort();
        let p = spec.principal_sort();
        spec.functions.push(FunctionSig {
            name: "push_onto".into(),
            arg_sorts: vec![g, p.clone()],
            result_sort: p,
            partial: false,
            kind: None,
        });
        assert_eq!(
            validate_adt(&spec).unwrap_err()[0].kind,
            AdtErrorKind::IllFormedSignature
        );
    }

    #[test]
    fn term_sorts() {
        let v = validate_adt(&stack()).unwrap();
        let vars: BTreeMap<_, _> = [
            ("s".to_string(), v.principal_sort()),
            ("x".to_string(), v.parameter_sort()),
        ]
        .into_iter()
        .collect();
        let ext = Term::app("extend", vec![Term::var("s"), Term::var("x")]);
        assert_eq!(term_sort(&ext, &v, &vars).unwrap(), v.principal_sort());
        assert_eq!(
            term_sort(&Term::app("item", vec![ext]), &v, &vars).unwrap(),
            v.parameter_sort()
        );
        let empty_new = Term::app("is_empty", vec![Term::app("new", vec![])]);
        assert_eq!(term_sort(&empty_new, &v, &vars).unwrap(), Sort::boolean());
        assert!(matches!(
            term_sort(&Term::app("top", vec![]), &v, &vars),
            Err(SortError::Unsorted(_))
        ));
        for a in &v.axioms {
            assert_eq!(axiom_term_sort(&a.body, &v, a).unwrap(), Sort::boolean());
        }
    }
}
