//! Specification drivers: proof obligations made of a precondition, a call
//! sequence and a postcondition, generated from ADT axioms, from the laws of
//! equivalence and from the well-definedness of every ADT function.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adt::{
    AdtSpec, Axiom, FunctionKind, FunctionSig, Sort, SortKind, Term, ValidatedAdtSpec,
};
use crate::contract::{BinOp, ContractClass, Expr, FeatureKind, ObjRef, Param, ValueSort};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivalenceProperty {
    Reflexivity,
    Symmetry,
    Transitivity,
}

impl EquivalenceProperty {
    pub const ALL: [EquivalenceProperty; 3] = [
        EquivalenceProperty::Reflexivity,
        EquivalenceProperty::Symmetry,
        EquivalenceProperty::Transitivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquivalenceProperty::Reflexivity => "reflexivity",
            EquivalenceProperty::Symmetry => "symmetry",
            EquivalenceProperty::Transitivity => "transitivity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriverFamily {
    Axiom,
    Equivalence,
    WellDefinedness,
}

impl DriverFamily {
    pub const ALL: [DriverFamily; 3] = [
        DriverFamily::Axiom,
        DriverFamily::Equivalence,
        DriverFamily::WellDefinedness,
    ];
}

impl fmt::Display for DriverFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DriverFamily::Axiom => "axiom",
            DriverFamily::Equivalence => "equivalence",
            DriverFamily::WellDefinedness => "well_definedness",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DriverOrigin {
    Axiom(String),
    Equivalence(EquivalenceProperty),
    /// Named after the ADT function.
    WellDefinedness(String),
}

impl DriverOrigin {
    /// The origin encoded by the driver naming scheme.
    pub fn from_name(name: &str) -> Option<DriverOrigin> {
        if let Some(label) = name.strip_prefix("axiom_") {
            return (!label.is_empty()).then(|| DriverOrigin::Axiom(label.to_string()));
        }
        if let Some(p) = name.strip_prefix("equivalence_") {
            return EquivalenceProperty::ALL
                .into_iter()
                .find(|e| e.name() == p)
                .map(DriverOrigin::Equivalence);
        }
        name.strip_suffix("_is_well_defined")
            .filter(|f| !f.is_empty())
            .map(|f| DriverOrigin::WellDefinedness(f.to_string()))
    }

    pub fn driver_name(&self) -> String {
        match self {
            DriverOrigin::Axiom(l) => format!("axiom_{l}"),
            DriverOrigin::Equivalence(p) => format!("equivalence_{}", p.name()),
            DriverOrigin::WellDefinedness(f) => format!("{f}_is_well_defined"),
        }
    }

    pub fn family(&self) -> DriverFamily {
        match self {
            DriverOrigin::Axiom(_) => DriverFamily::Axiom,
            DriverOrigin::Equivalence(_) => DriverFamily::Equivalence,
            DriverOrigin::WellDefinedness(_) => DriverFamily::WellDefinedness,
        }
    }
}

/// One call of a driver body: `target.feature(args)`, or
/// `create target.feature(args)` for a creation call.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Call {
    pub target: String,
    pub feature: String,
    pub args: Vec<Expr>,
    pub creation: bool,
}

impl fmt::Display for Call {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.creation {
            f.write_str("create ")?;
        }
        write!(f, "{}.{}", self.target, self.feature)?;
        if !self.args.is_empty() {
            let args: Vec<String> = self.args.iter().map(ToString::to_string).collect();
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpecDriver {
    pub name: String,
    pub origin: DriverOrigin,
    /// Written sort of driver objects, e.g. `STACK[G]`.
    pub object_sort: String,
    /// Written element sort, e.g. `G`.
    pub element_sort: String,
    /// Objects that exist when the driver starts.
    pub objects: Vec<String>,
    /// Objects created by the body.
    pub locals: Vec<String>,
    pub params: Vec<Param>,
    pub precondition: Vec<Expr>,
    pub body: Vec<Call>,
    pub postcondition: Vec<Expr>,
}

impl SpecDriver {
    pub fn family(&self) -> DriverFamily {
        self.origin.family()
    }

    /// Pairs of objects asserted distinct by a top-level `a /= b`.
    pub fn distinct_pairs(&self) -> Vec<(String, String)> {
        self.precondition
            .iter()
            .filter_map(|e| match e {
                Expr::Binary(BinOp::Ne, a, b) => match (&**a, &**b) {
                    (Expr::Object(ObjRef::Named(a)), Expr::Object(ObjRef::Named(b))) => {
                        Some((a.clone(), b.clone()))
                    }
                    _ => None,
                },
                _ => None,
            })
            .collect()
    }

    pub fn uses_is_equal(&self) -> bool {
        self.precondition
            .iter()
            .chain(&self.postcondition)
            .chain(self.body.iter().flat_map(|c| &c.args))
            .any(Expr::uses_is_equal)
    }

    pub fn max_element_literal(&self) -> Option<u32> {
        self.precondition
            .iter()
            .chain(&self.postcondition)
            .chain(self.body.iter().flat_map(|c| &c.args))
            .filter_map(Expr::max_element_literal)
            .max()
    }

    /// Whether the precondition of the first call on every object appears,
    /// instantiated on that object, among the driver preconditions.
    pub fn first_call_preconditions_entailed(&self, class: &ContractClass) -> bool {
        let mut seen = Vec::new();
        for call in &self.body {
            if seen.contains(&call.target) {
                continue;
            }
            seen.push(call.target.clone());
            if call.creation {
                continue;
            }
            let Some(feature) = class.feature(&call.feature) else {
                return false;
            };
            let args: BTreeMap<String, Expr> = feature
                .params
                .iter()
                .map(|p| p.name.clone())
                .zip(call.args.iter().cloned())
                .collect();
            let target = ObjRef::Named(call.target.clone());
            for clause in &feature.precondition {
                let inst = substitute(&clause.expr, &target, &args);
                if !self.precondition.contains(&inst) {
                    return false;
                }
            }
        }
        true
    }
}

/// Rewrites a feature assertion for a call: `Current` becomes `target` and
/// formal parameters become the actual arguments.
pub fn substitute(e: &Expr, target: &ObjRef, args: &BTreeMap<String, Expr>) -> Expr {
    let obj = |r: &ObjRef| {
        if *r == ObjRef::Current {
            target.clone()
        } else {
            r.clone()
        }
    };
    let sub = |x: &Expr| Box::new(substitute(x, target, args));
    match e {
        Expr::Var(v) => args.get(v).cloned().unwrap_or_else(|| e.clone()),
        Expr::Object(r) => Expr::Object(obj(r)),
        Expr::Read { target: r, name } => Expr::Read {
            target: obj(r),
            name: name.clone(),
        },
        Expr::IsEqual(a, b) => Expr::IsEqual(obj(a), obj(b)),
        Expr::Old(x) => Expr::Old(sub(x)),
        Expr::Not(x) => Expr::Not(sub(x)),
        Expr::Binary(op, a, b) => Expr::Binary(*op, sub(a), sub(b)),
        Expr::Seq(op, s, a) => Expr::Seq(*op, sub(s), a.as_deref().map(sub)),
        Expr::Index(s, i) => Expr::Index(sub(s), sub(i)),
        Expr::Across { var, lo, hi, body } => {
            let mut inner = args.clone();
            inner.remove(var);
            Expr::Across {
                var: var.clone(),
                lo: sub(lo),
                hi: sub(hi),
                body: Box::new(substitute(body, target, &inner)),
            }
        }
        Expr::Bool(_) | Expr::Int(_) | Expr::Elem(_) | Expr::Result => e.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("unsupported-axiom-shape: axiom {axiom}: {reason}")]
    UnsupportedAxiomShape { axiom: String, reason: String },
    #[error("unmapped-function: `{function}`: {reason}")]
    UnmappedFunction { function: String, reason: String },
}

pub type DriverSet = Vec<SpecDriver>;

/// The three driver families for one ADT and class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedDrivers {
    pub axiom: DriverSet,
    pub equivalence: DriverSet,
    pub well_definedness: DriverSet,
    /// Some axiom driver compares objects with `is_equal`.
    pub equivalence_required: bool,
}

impl GeneratedDrivers {
    pub fn family(&self, family: DriverFamily) -> &DriverSet {
        match family {
            DriverFamily::Axiom => &self.axiom,
            DriverFamily::Equivalence => &self.equivalence,
            DriverFamily::WellDefinedness => &self.well_definedness,
        }
    }

    /// Drivers to list: equivalence drivers only when required or forced.
    pub fn listed(&self, force_equivalence: bool) -> Vec<&SpecDriver> {
        let eq: &[SpecDriver] = if self.equivalence_required || force_equivalence {
            &self.equivalence
        } else {
            &[]
        };
        self.axiom
            .iter()
            .chain(eq)
            .chain(&self.well_definedness)
            .collect()
    }
}

/// Generates every driver family. Equivalence drivers are always built;
/// [`GeneratedDrivers::equivalence_required`] records whether correctness
/// depends on them.
pub fn generate_drivers(
    adt: &ValidatedAdtSpec,
    class: &ContractClass,
) -> Result<GeneratedDrivers, GenError> {
    let axiom = gen_axiom_drivers(adt, class)?;
    let equivalence_required = axiom.iter().any(SpecDriver::uses_is_equal);
    Ok(GeneratedDrivers {
        axiom,
        equivalence: gen_equivalence_drivers(adt),
        well_definedness: gen_well_definedness_drivers(adt, class)?,
        equivalence_required,
    })
}

pub fn gen_axiom_drivers(
    adt: &ValidatedAdtSpec,
    class: &ContractClass,
) -> Result<DriverSet, GenError> {
    adt.axioms
        .iter()
        .map(|a| translate_axiom(a, adt, class))
        .collect()
}

struct Ctx<'a> {
    adt: &'a AdtSpec,
    class: &'a ContractClass,
}

impl Ctx<'_> {
    fn feature_for(&self, f: &FunctionSig) -> Result<String, GenError> {
        let name = self.class.mapped_feature_name(&f.name).to_string();
        let err = |reason: String| GenError::UnmappedFunction {
            function: f.name.clone(),
            reason,
        };
        let Some(feature) = self.class.feature(&name) else {
            return Err(err(format!(
                "class `{}` has no feature `{name}`",
                self.class.name
            )));
        };
        let value_sort = |s: &Sort| match s.kind {
            SortKind::Boolean => Some(ValueSort::Boolean),
            SortKind::Parameter => Some(ValueSort::Element),
            SortKind::Principal => None,
        };
        match f.kind() {
            FunctionKind::Observer => {
                if feature.kind
                    != FeatureKind::Query(value_sort(&f.result_sort).expect("observer result"))
                {
                    return Err(err(format!(
                        "`{name}` must be a query of sort {}",
                        f.result_sort
                    )));
                }
                if !f.extra_args().is_empty() {
                    return Err(err("observers with arguments are not supported".into()));
                }
            }
            FunctionKind::Transformer | FunctionKind::Creator => {
                if f.kind() == FunctionKind::Creator && name != self.class.creation_feature {
                    return Err(err(format!("`{name}` is not the creation feature")));
                }
                if !feature.is_command() {
                    return Err(err(format!("`{name}` must be a command")));
                }
                let want: Vec<Option<ValueSort>> = f.extra_args().iter().map(value_sort).collect();
                let have: Vec<Option<ValueSort>> =
                    feature.params.iter().map(|p| Some(p.sort)).collect();
                if want != have {
                    return Err(err(format!(
                        "`{name}` takes arguments that do not match the signature"
                    )));
                }
            }
        }
        Ok(name)
    }
}

/// A principal-sorted term: a leaf with transformers applied innermost-first.
struct Unit {
    leaf: Leaf,
    chain: Vec<(String, Vec<String>)>,
}

enum Leaf {
    Var(String),
    Creator(String, Vec<String>),
}

fn shape_err(axiom: &Axiom, reason: &str) -> GenError {
    GenError::UnsupportedAxiomShape {
        axiom: axiom.label.clone(),
        reason: reason.to_string(),
    }
}

fn value_args(axiom: &Axiom, args: &[Term]) -> Result<Vec<String>, GenError> {
    args.iter()
        .map(|a| match a {
            Term::Var(v) => Ok(v.clone()),
            _ => Err(shape_err(
                axiom,
                "non-principal arguments must be variables",
            )),
        })
        .collect()
}

fn unit(adt: &AdtSpec, axiom: &Axiom, t: &Term) -> Result<Unit, GenError> {
    match t {
        Term::Var(v) => Ok(Unit {
            leaf: Leaf::Var(v.clone()),
            chain: vec![],
        }),
        Term::App(f, args) => {
            let sig = adt.function(f).expect("validated");
            match sig.kind() {
                FunctionKind::Creator => Ok(Unit {
                    leaf: Leaf::Creator(f.clone(), value_args(axiom, args)?),
                    chain: vec![],
                }),
                FunctionKind::Transformer => {
                    let mut u = unit(adt, axiom, &args[0])?;
                    u.chain.push((f.clone(), value_args(axiom, &args[1..])?));
                    Ok(u)
                }
                FunctionKind::Observer => Err(shape_err(
                    axiom,
                    "observer applied where a stack is expected",
                )),
            }
        }
        _ => Err(shape_err(axiom, "expected a term")),
    }
}

/// One side of an axiom body.
enum Side {
    Principal(Unit),
    Observe(String, Unit),
    Value(String),
}

fn side(adt: &AdtSpec, axiom: &Axiom, t: &Term) -> Result<Side, GenError> {
    let sort =
        crate::adt::axiom_term_sort(t, adt, axiom).map_err(|e| shape_err(axiom, &e.to_string()))?;
    if sort.is_principal() {
        return Ok(Side::Principal(unit(adt, axiom, t)?));
    }
    match t {
        Term::Var(v) => Ok(Side::Value(v.clone())),
        Term::App(q, args) => {
            let sig = adt.function(q).expect("validated");
            if sig.kind() != FunctionKind::Observer || args.len() != 1 {
                return Err(shape_err(
                    axiom,
                    "values must be variables or observer applications",
                ));
            }
            Ok(Side::Observe(q.clone(), unit(adt, axiom, &args[0])?))
        }
        _ => Err(shape_err(
            axiom,
            "nested negations or equations are not supported",
        )),
    }
}

fn side_unit(s: &Side) -> Option<&Unit> {
    match s {
        Side::Principal(u) | Side::Observe(_, u) => Some(u),
        Side::Value(_) => None,
    }
}

fn check_linear(axiom: &Axiom, t: &Term) -> Result<(), GenError> {
    for v in t.variables() {
        if t.occurrences(&v) > 1 {
            return Err(shape_err(
                axiom,
                &format!("variable `{v}` occurs more than once on one side"),
            ));
        }
    }
    Ok(())
}

fn value_sort_of(s: &Sort) -> ValueSort {
    match s.kind {
        SortKind::Boolean => ValueSort::Boolean,
        _ => ValueSort::Element,
    }
}

/// Translates an ADT precondition of `f` into a driver assertion about
/// `obj`, with the extra formals bound to `args`.
fn instantiate_precondition(
    ctx: &Ctx<'_>,
    f: &FunctionSig,
    obj: &str,
    args: &[String],
) -> Result<Option<Expr>, GenError> {
    let Some(pre) = ctx.adt.precondition(&f.name) else {
        return Ok(None);
    };
    let mut binding: BTreeMap<&str, Bound> = BTreeMap::new();
    let mut extra = args.iter();
    for (formal, sort) in pre.formals.iter().zip(&f.arg_sorts) {
        if sort.is_principal() {
            binding.insert(formal, Bound::Object(obj.to_string()));
        } else {
            let a = extra.next().cloned().unwrap_or_else(|| formal.clone());
            binding.insert(formal, Bound::Value(a));
        }
    }
    let unsupported = || GenError::UnmappedFunction {
        function: f.name.clone(),
        reason: format!(
            "precondition `{}` cannot be stated on driver objects",
            pre.condition
        ),
    };
    to_assertion(ctx, &pre.condition, &binding)?
        .map(Some)
        .ok_or_else(unsupported)
}

enum Bound {
    Object(String),
    Value(String),
}

/// ADT boolean term -> assertion, or `None` if it is not expressible
/// without calling transformers.
fn to_assertion(
    ctx: &Ctx<'_>,
    t: &Term,
    b: &BTreeMap<&str, Bound>,
) -> Result<Option<Expr>, GenError> {
    let object = |t: &Term| match t {
        Term::Var(v) => match b.get(v.as_str()) {
            Some(Bound::Object(o)) => Some(o.clone()),
            _ => None,
        },
        _ => None,
    };
    Ok(match t {
        Term::Not(inner) => to_assertion(ctx, inner, b)?.map(Expr::negate),
        Term::Eq(l, r) => {
            if let (Some(a), Some(c)) = (object(l), object(r)) {
                Some(Expr::is_equal(&a, &c))
            } else {
                match (to_value(ctx, l, b)?, to_value(ctx, r, b)?) {
                    (Some(x), Some(y)) => Some(Expr::bin(BinOp::Eq, x, y)),
                    _ => None,
                }
            }
        }
        _ => to_value(ctx, t, b)?,
    })
}

fn to_value(ctx: &Ctx<'_>, t: &Term, b: &BTreeMap<&str, Bound>) -> Result<Option<Expr>, GenError> {
    Ok(match t {
        Term::Var(v) => match b.get(v.as_str()) {
            Some(Bound::Value(a)) => Some(Expr::var(a)),
            _ => None,
        },
        Term::App(q, args) if args.len() == 1 => {
            let sig = ctx.adt.function(q).expect("validated");
            match (&args[0], sig.kind()) {
                (Term::Var(v), FunctionKind::Observer) => match b.get(v.as_str()) {
                    Some(Bound::Object(o)) => Some(Expr::named(o, &ctx.feature_for(sig)?)),
                    _ => None,
                },
                _ => None,
            }
        }
        _ => None,
    })
}

fn push_unique(v: &mut Vec<Expr>, e: Expr) {
    if !v.contains(&e) {
        v.push(e);
    }
}

/// Translates one axiom into its driver.
pub fn translate_axiom(
    axiom: &Axiom,
    adt: &ValidatedAdtSpec,
    class: &ContractClass,
) -> Result<SpecDriver, GenError> {
    let ctx = Ctx { adt, class };
    let (sides, post_kind): (Vec<Side>, PostKind) = match &axiom.body {
        Term::Eq(l, r) => {
            check_linear(axiom, l)?;
            check_linear(axiom, r)?;
            let (l, r) = (side(adt, axiom, l)?, side(adt, axiom, r)?);
            let kind = match (&l, &r) {
                (Side::Principal(_), Side::Principal(_)) => PostKind::IsEqual,
                (Side::Principal(_), _) | (_, Side::Principal(_)) => {
                    return Err(shape_err(axiom, "equation between a stack and a value"))
                }
                _ => PostKind::ValueEq,
            };
            (vec![l, r], kind)
        }
        Term::Not(inner) => match &**inner {
            t @ Term::App(..) => {
                check_linear(axiom, t)?;
                (vec![side(adt, axiom, t)?], PostKind::Negated)
            }
            _ => {
                return Err(shape_err(
                    axiom,
                    "only observer applications may be negated",
                ))
            }
        },
        t @ Term::App(..) => {
            check_linear(axiom, t)?;
            (vec![side(adt, axiom, t)?], PostKind::Holds)
        }
        Term::Var(_) => return Err(shape_err(axiom, "a bare variable is not an axiom")),
    };
    if matches!(post_kind, PostKind::Holds | PostKind::Negated)
        && !matches!(sides[0], Side::Observe(..))
    {
        return Err(shape_err(axiom, "expected a boolean observer application"));
    }

    // Objects for units.
    let units: Vec<&Unit> = sides.iter().filter_map(side_unit).collect();
    let mut leaf_uses: BTreeMap<String, usize> = BTreeMap::new();
    for u in &units {
        if let Leaf::Var(v) = &u.leaf {
            *leaf_uses.entry(v.clone()).or_default() += 1;
        }
    }
    let creators = units
        .iter()
        .filter(|u| matches!(u.leaf, Leaf::Creator(..)))
        .count();
    let mut objects: Vec<String> = Vec::new();
    let mut locals: Vec<String> = Vec::new();
    let mut pre: Vec<Expr> = Vec::new();
    let mut equal_facts: Vec<Expr> = Vec::new();
    let mut body: Vec<Call> = Vec::new();
    let mut unit_objects: Vec<String> = Vec::new();
    let mut split_seen: BTreeMap<String, usize> = BTreeMap::new();
    let mut creator_seen = 0;
    let any_chain = units.iter().any(|u| !u.chain.is_empty());
    for u in &units {
        let obj = match &u.leaf {
            Leaf::Var(v) if leaf_uses[v] > 1 && any_chain => {
                let n = split_seen.entry(v.clone()).or_default();
                *n += 1;
                let name = format!("{v}{n}");
                if *n == 2 {
                    equal_facts.push(Expr::is_equal(&format!("{v}1"), &name));
                }
                objects.push(name.clone());
                name
            }
            Leaf::Var(v) => {
                if !objects.contains(v) {
                    objects.push(v.clone());
                }
                v.clone()
            }
            Leaf::Creator(c, args) => {
                creator_seen += 1;
                let name = if creators > 1 {
                    format!("r{creator_seen}")
                } else {
                    "r".to_string()
                };
                locals.push(name.clone());
                let sig = adt.function(c).expect("validated");
                body.push(Call {
                    target: name.clone(),
                    feature: ctx.feature_for(sig)?,
                    args: args.iter().map(|a| Expr::var(a)).collect(),
                    creation: true,
                });
                name
            }
        };
        for (i, (f, args)) in u.chain.iter().enumerate() {
            let sig = adt.function(f).expect("validated");
            if i == 0 && matches!(u.leaf, Leaf::Var(_)) {
                if let Some(p) = instantiate_precondition(&ctx, sig, &obj, args)? {
                    push_unique(&mut pre, p);
                }
            }
            body.push(Call {
                target: obj.clone(),
                feature: ctx.feature_for(sig)?,
                args: args.iter().map(|a| Expr::var(a)).collect(),
                creation: false,
            });
        }
        unit_objects.push(obj);
    }
    // Postcondition.
    let mut unit_iter = unit_objects.iter();
    let mut value = |s: &Side, pre: &mut Vec<Expr>| -> Result<Expr, GenError> {
        Ok(match s {
            Side::Value(v) => Expr::var(v),
            Side::Observe(q, u) => {
                let obj = unit_iter.next().expect("unit object").clone();
                let sig = adt.function(q).expect("validated");
                if u.chain.is_empty() && matches!(u.leaf, Leaf::Var(_)) {
                    if let Some(p) = instantiate_precondition(&ctx, sig, &obj, &[])? {
                        push_unique(pre, p);
                    }
                }
                Expr::named(&obj, &ctx.feature_for(sig)?)
            }
            Side::Principal(_) => Expr::Object(ObjRef::Named(
                unit_iter.next().expect("unit object").clone(),
            )),
        })
    };
    let post = match post_kind {
        PostKind::IsEqual => {
            let a = value(&sides[0], &mut pre)?;
            let b = value(&sides[1], &mut pre)?;
            match (a, b) {
                (Expr::Object(ObjRef::Named(a)), Expr::Object(ObjRef::Named(b))) => {
                    Expr::is_equal(&a, &b)
                }
                _ => unreachable!("principal sides are objects"),
            }
        }
        PostKind::ValueEq => {
            let a = value(&sides[0], &mut pre)?;
            let b = value(&sides[1], &mut pre)?;
            Expr::bin(BinOp::Eq, a, b)
        }
        PostKind::Holds => value(&sides[0], &mut pre)?,
        PostKind::Negated => Expr::negate(value(&sides[0], &mut pre)?),
    };
    // Copied preconditions come before the equality facts.
    pre.extend(equal_facts);

    let params = axiom
        .universals
        .iter()
        .filter(|v| !v.sort.is_principal())
        .map(|v| Param {
            name: v.name.clone(),
            sort: value_sort_of(&v.sort),
        })
        .collect();
    let origin = DriverOrigin::Axiom(axiom.label.clone());
    Ok(SpecDriver {
        name: origin.driver_name(),
        origin,
        object_sort: adt.principal_sort().name,
        element_sort: adt.parameter.clone(),
        objects,
        locals,
        params,
        precondition: pre,
        body,
        postcondition: vec![post],
    })
}

enum PostKind {
    IsEqual,
    ValueEq,
    Holds,
    Negated,
}

fn skeleton(adt: &AdtSpec, origin: DriverOrigin, objects: &[&str]) -> SpecDriver {
    SpecDriver {
        name: origin.driver_name(),
        origin,
        object_sort: adt.principal_sort().name,
        element_sort: adt.parameter.clone(),
        objects: objects.iter().map(|s| s.to_string()).collect(),
        locals: vec![],
        params: vec![],
        precondition: vec![],
        body: vec![],
        postcondition: vec![],
    }
}

/// Reflexivity, symmetry and transitivity of `is_equal`.
pub fn gen_equivalence_drivers(adt: &AdtSpec) -> DriverSet {
    EquivalenceProperty::ALL
        .into_iter()
        .map(|p| {
            let origin = DriverOrigin::Equivalence(p);
            match p {
                EquivalenceProperty::Reflexivity => {
                    let mut d = skeleton(adt, origin, &["s"]);
                    d.postcondition = vec![Expr::is_equal("s", "s")];
                    d
                }
                EquivalenceProperty::Symmetry => {
                    let mut d = skeleton(adt, origin, &["s1", "s2"]);
                    d.precondition = vec![Expr::is_equal("s1", "s2")];
                    d.postcondition = vec![Expr::is_equal("s2", "s1")];
                    d
                }
                EquivalenceProperty::Transitivity => {
                    let mut d = skeleton(adt, origin, &["s1", "s2", "s3"]);
                    d.precondition = vec![Expr::is_equal("s1", "s2"), Expr::is_equal("s2", "s3")];
                    d.postcondition = vec![Expr::is_equal("s1", "s3")];
                    d
                }
            }
        })
        .collect()
}

fn param_names(n: usize) -> Vec<String> {
    match n {
        1 => vec!["x".to_string()],
        n => (1..=n).map(|i| format!("x{i}")).collect(),
    }
}

/// One driver per ADT function: equal inputs give equal outputs.
pub fn gen_well_definedness_drivers(
    adt: &ValidatedAdtSpec,
    class: &ContractClass,
) -> Result<DriverSet, GenError> {
    let ctx = Ctx { adt, class };
    let mut out = Vec::new();
    for f in &adt.functions {
        let origin = DriverOrigin::WellDefinedness(f.name.clone());
        let feature = ctx.feature_for(f)?;
        let names = param_names(f.extra_args().len());
        let params: Vec<Param> = names
            .iter()
            .zip(f.extra_args())
            .map(|(n, s)| Param {
                name: n.clone(),
                sort: value_sort_of(s),
            })
            .collect();
        let args: Vec<Expr> = names.iter().map(|n| Expr::var(n)).collect();
        let mut d = skeleton(adt, origin, &["s1", "s2"]);
        d.params = params;
        match f.kind() {
            FunctionKind::Observer | FunctionKind::Transformer => {
                for obj in ["s1", "s2"] {
                    if let Some(p) = instantiate_precondition(&ctx, f, obj, &names)? {
                        push_unique(&mut d.precondition, p);
                    }
                }
                d.precondition.push(Expr::is_equal("s1", "s2"));
                d.precondition.push(Expr::distinct("s1", "s2"));
                if f.kind() == FunctionKind::Observer {
                    d.postcondition = vec![Expr::bin(
                        BinOp::Eq,
                        Expr::named("s1", &feature),
                        Expr::named("s2", &feature),
                    )];
                } else {
                    for obj in ["s1", "s2"] {
                        d.body.push(Call {
                            target: obj.into(),
                            feature: feature.clone(),
                            args: args.clone(),
                            creation: false,
                        });
                    }
                    d.postcondition = vec![Expr::is_equal("s1", "s2")];
                }
            }
            FunctionKind::Creator => {
                let facts = creator_facts(&ctx, f)?;
                if f.extra_args().is_empty() && !facts.is_empty() {
                    for obj in ["s1", "s2"] {
                        for (q, negated) in &facts {
                            let read = Expr::named(obj, q);
                            push_unique(
                                &mut d.precondition,
                                if *negated { Expr::negate(read) } else { read },
                            );
                        }
                    }
                    d.precondition.push(Expr::distinct("s1", "s2"));
                } else {
                    d.objects.clear();
                    d.locals = vec!["s1".into(), "s2".into()];
                    for obj in ["s1", "s2"] {
                        d.body.push(Call {
                            target: obj.into(),
                            feature: feature.clone(),
                            args: args.clone(),
                            creation: true,
                        });
                    }
                }
                d.postcondition = vec![Expr::is_equal("s1", "s2")];
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// Boolean observers that closed axioms pin on the bare creator, e.g.
/// `is_empty(new)`; `true` marks a negated fact.
fn creator_facts(ctx: &Ctx<'_>, c: &FunctionSig) -> Result<Vec<(String, bool)>, GenError> {
    let mut out = Vec::new();
    for a in &ctx.adt.axioms {
        let (t, negated) = match &a.body {
            Term::Not(t) => (&**t, true),
            t => (t, false),
        };
        if let Term::App(q, args) = t {
            if let [Term::App(inner, inner_args)] = args.as_slice() {
                let sig = ctx.adt.function(q).expect("validated");
                if inner == &c.name && inner_args.is_empty() && sig.kind() == FunctionKind::Observer
                {
                    out.push((ctx.feature_for(sig)?, negated));
                }
            }
        }
    }
    Ok(out)
}
