//! Contracted classes: features with pre- and postconditions, optional
//! sequence-valued model fields and an equality definition, together with
//! the finite abstract-state semantics the checker enumerates.

mod eval;
mod expr;
mod state;

pub use eval::{
    eval_expr, eval_expr_noted, Environment, EvalError, EvalNotes, Evaluator, MaskedRead, Value,
};
pub use expr::{BinOp, Expr, ObjRef, SeqOp};
pub use state::{
    equality_holds, is_admissible, slot_is_masked, state_space, Bounds, ObjectState, SlotView,
    StateSpace, StateSpaceError,
};

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueSort {
    Element,
    Boolean,
}

impl ValueSort {
    /// Number of values of this sort with `k` elements.
    pub fn domain_size(self, k: usize) -> usize {
        match self {
            ValueSort::Element => k,
            ValueSort::Boolean => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub name: String,
    pub sort: ValueSort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Command,
    Query(ValueSort),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub label: Option<String>,
    pub expr: Expr,
}

impl Clause {
    pub fn new(label: Option<&str>, expr: Expr) -> Self {
        Clause {
            label: label.map(str::to_string),
            expr,
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l}: {}", self.expr),
            None => write!(f, "{}", self.expr),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Feature {
    pub name: String,
    pub kind: FeatureKind,
    pub params: Vec<Param>,
    /// Conjunction; empty means `true`.
    pub precondition: Vec<Clause>,
    pub postcondition: Vec<Clause>,
}

impl Feature {
    pub fn is_command(&self) -> bool {
        self.kind == FeatureKind::Command
    }

    pub fn result_sort(&self) -> Option<ValueSort> {
        match self.kind {
            FeatureKind::Query(s) => Some(s),
            FeatureKind::Command => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelField {
    /// Always a sequence over the element sort.
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractClass {
    pub name: String,
    /// Generic parameter, the element sort marker (`G`).
    pub element_sort: String,
    pub model_fields: Vec<ModelField>,
    pub creation_feature: String,
    pub features: Vec<Feature>,
    /// Definition of `is_equal` over `Current` and `other`; `None` means
    /// component-wise comparison of abstract states.
    pub equality: Option<Expr>,
    /// Explicit ADT function to feature renamings.
    pub mapping: Vec<(String, String)>,
}

impl ContractClass {
    pub fn feature(&self, name: &str) -> Option<&Feature> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn queries(&self) -> impl Iterator<Item = &Feature> {
        self.features.iter().filter(|f| !f.is_command())
    }

    pub fn query_index(&self, name: &str) -> Option<usize> {
        self.queries().position(|q| q.name == name)
    }

    pub fn model_index(&self, name: &str) -> Option<usize> {
        self.model_fields.iter().position(|m| m.name == name)
    }

    pub fn has_model(&self) -> bool {
        !self.model_fields.is_empty()
    }

    /// Feature implementing ADT function `adt_name`.
    pub fn mapped_feature_name<'a>(&'a self, adt_name: &'a str) -> &'a str {
        self.mapping
            .iter()
            .find(|(from, _)| from == adt_name)
            .map(|(_, to)| to.as_str())
            .unwrap_or(adt_name)
    }

    /// Largest element literal mentioned anywhere in the class.
    pub fn max_element_literal(&self) -> Option<u32> {
        self.features
            .iter()
            .flat_map(|f| f.precondition.iter().chain(&f.postcondition))
            .map(|c| &c.expr)
            .chain(self.equality.as_ref())
            .filter_map(Expr::max_element_literal)
            .max()
    }
}
