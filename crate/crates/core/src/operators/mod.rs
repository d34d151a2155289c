//! Mutation operators and the points they enumerate.
//!
//! Every operator is a pure function of the parsed tree and the original
//! source text. A [`MutationPoint`] describes one contiguous edit; nothing is
//! applied here.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::frontend::ast::*;
use crate::frontend::span::Span;
use crate::frontend::visit::{walk, NodeRef, Visit};

pub mod esc;
pub mod general;
pub mod tables;

pub use esc::*;
pub use general::*;
pub use tables::{GlobalTable, UnitTable, GLOBALS, UNITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Operator {
    Aorb,
    Aors,
    Aoi,
    Ror,
    Cor,
    Lor,
    Asr,
    Sdl,
    Rvr,
    Csc,
    Fsc,
    Fvc,
    Dlr,
    Vtr,
    Pkd,
    Dkd,
    Gvc,
    Mfr,
    Avr,
    Eur,
    Tur,
    Rsd,
    Rsc,
    Asd,
    Asc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorGroup {
    General,
    Esc,
}

impl Operator {
    /// Report order: general operators first, then Solidity-specific ones.
    pub const ALL: [Operator; 25] = [
        Operator::Aorb,
        Operator::Aors,
        Operator::Aoi,
        Operator::Ror,
        Operator::Cor,
        Operator::Lor,
        Operator::Asr,
        Operator::Sdl,
        Operator::Rvr,
        Operator::Csc,
        Operator::Fsc,
        Operator::Fvc,
        Operator::Dlr,
        Operator::Vtr,
        Operator::Pkd,
        Operator::Dkd,
        Operator::Gvc,
        Operator::Mfr,
        Operator::Avr,
        Operator::Eur,
        Operator::Tur,
        Operator::Rsd,
        Operator::Rsc,
        Operator::Asd,
        Operator::Asc,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Operator::Aorb => "AORB",
            Operator::Aors => "AORS",
            Operator::Aoi => "AOI",
            Operator::Ror => "ROR",
            Operator::Cor => "COR",
            Operator::Lor => "LOR",
            Operator::Asr => "ASR",
            Operator::Sdl => "SDL",
            Operator::Rvr => "RVR",
            Operator::Csc => "CSC",
            Operator::Fsc => "FSC",
            Operator::Fvc => "FVC",
            Operator::Dlr => "DLR",
            Operator::Vtr => "VTR",
            Operator::Pkd => "PKD",
            Operator::Dkd => "DKD",
            Operator::Gvc => "GVC",
            Operator::Mfr => "MFR",
            Operator::Avr => "AVR",
            Operator::Eur => "EUR",
            Operator::Tur => "TUR",
            Operator::Rsd => "RSD",
            Operator::Rsc => "RSC",
            Operator::Asd => "ASD",
            Operator::Asc => "ASC",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Operator::Aorb => "Arithmetic Operator Replacement (binary)",
            Operator::Aors => "Arithmetic Operator Replacement (short-cut)",
            Operator::Aoi => "Arithmetic Operator Insertion",
            Operator::Ror => "Relational Operator Replacement",
            Operator::Cor => "Conditional Operator Replacement",
            Operator::Lor => "Logical Operator Replacement",
            Operator::Asr => "Assignment Operator Replacement",
            Operator::Sdl => "Statement Deletion",
            Operator::Rvr => "Return Value Replacement",
            Operator::Csc => "Condition Statement Change",
            Operator::Fsc => "Function State Keyword Change",
            Operator::Fvc => "Function Visibility Keyword Change",
            Operator::Dlr => "Data Location Keyword Replacement",
            Operator::Vtr => "Variable Type Keyword Replacement",
            Operator::Pkd => "Payable Keyword Deletion",
            Operator::Dkd => "Delete Keyword Deletion",
            Operator::Gvc => "Global Variable Change",
            Operator::Mfr => "Mathematical Functions Replacement",
            Operator::Avr => "Address Variable Replacement",
            Operator::Eur => "Ether Unit Replacement",
            Operator::Tur => "Time Unit Replacement",
            Operator::Rsd => "Require Statement Deletion",
            Operator::Rsc => "Require Statement Change",
            Operator::Asd => "Assert Statement Deletion",
            Operator::Asc => "Assert Statement Change",
        }
    }

    pub fn group(self) -> OperatorGroup {
        if self < Operator::Fsc {
            OperatorGroup::General
        } else {
            OperatorGroup::Esc
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown operator code `{0}`")]
pub struct UnknownOperator(pub String);

impl FromStr for Operator {
    type Err = UnknownOperator;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        Operator::ALL
            .into_iter()
            .find(|op| op.code() == upper)
            .ok_or_else(|| UnknownOperator(s.to_string()))
    }
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a comma-separated list of operator codes, keeping report order.
pub fn parse_operator_list(list: &str) -> Result<Vec<Operator>, UnknownOperator> {
    let mut ops = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let op: Operator = part.parse()?;
        if !ops.contains(&op) {
            ops.push(op);
        }
    }
    ops.sort();
    Ok(ops)
}

/// One candidate first-order edit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationPoint {
    pub operator: Operator,
    pub target_span: Span,
    pub original_text: String,
    pub replacement_text: String,
    pub node_path: Vec<usize>,
    pub description: String,
}

/// Inputs shared by every enumerator.
#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub unit: &'a SourceUnit,
    pub source: &'a str,
    /// Seed for the optional random GVC value; 0 disables it.
    pub seed: u64,
}

impl<'a> Context<'a> {
    pub fn new(unit: &'a SourceUnit, source: &'a str) -> Self {
        Self {
            unit,
            source,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Run one operator.
pub fn enumerate(op: Operator, cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut points = match op {
        Operator::Aorb => general::aorb(cx),
        Operator::Aors => general::aors(cx),
        Operator::Aoi => general::enumerate_aoi(cx),
        Operator::Ror => general::enumerate_ror(cx),
        Operator::Cor => general::enumerate_cor(cx),
        Operator::Lor => general::enumerate_lor(cx),
        Operator::Asr => general::enumerate_asr(cx),
        Operator::Sdl => general::enumerate_sdl(cx),
        Operator::Rvr => general::enumerate_rvr(cx),
        Operator::Csc => general::enumerate_csc(cx),
        Operator::Fsc => esc::enumerate_fsc(cx),
        Operator::Fvc => esc::enumerate_fvc(cx),
        Operator::Dlr => esc::enumerate_dlr(cx),
        Operator::Vtr => esc::enumerate_vtr(cx),
        Operator::Pkd => esc::enumerate_pkd(cx),
        Operator::Dkd => esc::enumerate_dkd(cx),
        Operator::Gvc => esc::enumerate_gvc(cx),
        Operator::Mfr => esc::enumerate_mfr(cx),
        Operator::Avr => esc::enumerate_avr(cx),
        Operator::Eur => esc::enumerate_eur(cx),
        Operator::Tur => esc::enumerate_tur(cx),
        Operator::Rsd => esc::rsd(cx),
        Operator::Rsc => esc::rsc(cx),
        Operator::Asd => esc::asd(cx),
        Operator::Asc => esc::asc(cx),
    };
    sort_points(&mut points);
    points
}

/// Run several operators; output is grouped by operator in report order.
pub fn enumerate_all(ops: &[Operator], cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut ops = ops.to_vec();
    ops.sort();
    ops.dedup();
    ops.into_iter().flat_map(|op| enumerate(op, cx)).collect()
}

pub(crate) fn sort_points(points: &mut [MutationPoint]) {
    points.sort_by(|a, b| {
        (a.target_span.start_byte, &a.replacement_text, a.target_span.end_byte).cmp(&(
            b.target_span.start_byte,
            &b.replacement_text,
            b.target_span.end_byte,
        ))
    });
}

/// Collects points for one operator, dropping no-op edits.
pub(crate) struct Emitter<'a> {
    source: &'a str,
    op: Operator,
    pub points: Vec<MutationPoint>,
}

impl<'a> Emitter<'a> {
    pub fn new(cx: &Context<'a>, op: Operator) -> Self {
        Self {
            source: cx.source,
            op,
            points: Vec::new(),
        }
    }

    pub fn replace(&mut self, span: Span, replacement: &str, path: &[usize]) {
        let original = span.text(self.source);
        if original == replacement {
            return;
        }
        let description = format!("{}: replace `{}` with `{}`", self.op, original, replacement);
        self.push(span, replacement.to_string(), path, description);
    }

    /// Comment out `span` with block-comment markers.
    pub fn comment_out(&mut self, span: Span, path: &[usize]) {
        let original = span.text(self.source);
        let description = format!("{}: comment out `{}`", self.op, first_line(original));
        self.push(span, format!("/*{original}*/"), path, description);
    }

    pub fn delete(&mut self, span: Span, path: &[usize]) {
        let original = span.text(self.source);
        let description = format!("{}: delete `{}`", self.op, original.trim());
        self.push(span, String::new(), path, description);
    }

    fn push(&mut self, span: Span, replacement: String, path: &[usize], description: String) {
        self.points.push(MutationPoint {
            operator: self.op,
            target_span: span,
            original_text: span.text(self.source).to_string(),
            replacement_text: replacement,
            node_path: path.to_vec(),
            description,
        });
    }

    pub fn finish(self) -> Vec<MutationPoint> {
        self.points
    }
}

fn first_line(text: &str) -> String {
    match text.lines().next() {
        Some(line) if line.len() < text.len() => format!("{line} ..."),
        Some(line) => line.to_string(),
        None => String::new(),
    }
}

/// Walk every expression node.
pub(crate) fn for_each_expression<'a>(
    unit: &'a SourceUnit,
    mut f: impl FnMut(&'a Expression, &Visit<'a, '_>),
) {
    walk(unit, |v| {
        if let NodeRef::Expression(e) = v.node {
            f(e, v)
        }
    });
}

/// Walk every statement node.
pub(crate) fn for_each_statement<'a>(
    unit: &'a SourceUnit,
    mut f: impl FnMut(&'a Statement, &Visit<'a, '_>),
) {
    walk(unit, |v| {
        if let NodeRef::Statement(s) = v.node {
            f(s, v)
        }
    });
}

/// Walk every function definition.
pub(crate) fn for_each_function<'a>(
    unit: &'a SourceUnit,
    mut f: impl FnMut(&'a FunctionDefinition, &Visit<'a, '_>),
) {
    walk(unit, |v| {
        if let NodeRef::Function(func) = v.node {
            f(func, v)
        }
    });
}

/// Innermost enclosing contract of a visit.
pub(crate) fn enclosing_contract<'a>(v: &Visit<'a, '_>) -> Option<&'a ContractDefinition> {
    v.ancestors.iter().rev().find_map(|n| match n {
        NodeRef::Contract(c) => Some(*c),
        _ => None,
    })
}

/// Coarse classification of declared types used by type-aware operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum TypeClass {
    Integer,
    Bool,
    Address,
    Other,
}

pub(crate) fn classify(ty: &TypeName) -> TypeClass {
    match ty.elementary_name() {
        Some(name) if is_integer_keyword(name) => TypeClass::Integer,
        Some("bool") => TypeClass::Bool,
        Some("address") => TypeClass::Address,
        _ => TypeClass::Other,
    }
}

pub(crate) fn is_integer_keyword(name: &str) -> bool {
    name.starts_with("uint") || name.starts_with("int")
}

/// Declared names visible inside a function: locals and parameters shadow
/// state variables. Block scoping is ignored.
#[derive(Debug, Default)]
pub(crate) struct Scope<'a> {
    names: HashMap<&'a str, TypeClass>,
}

impl<'a> Scope<'a> {
    pub fn build(contract: Option<&'a ContractDefinition>, func: Option<&'a FunctionDefinition>) -> Self {
        let mut names = HashMap::new();
        if let Some(c) = contract {
            for var in &c.state_variables {
                if let Some(name) = &var.name {
                    names.insert(name.as_str(), classify(&var.type_name));
                }
            }
        }
        if let Some(f) = func {
            for var in f.params.iter().chain(&f.returns) {
                if let Some(name) = &var.name {
                    names.insert(name.as_str(), classify(&var.type_name));
                }
            }
            if let Some(body) = &f.body {
                collect_locals(body, &mut names);
            }
        }
        Scope { names }
    }

    pub fn lookup(&self, name: &str) -> Option<TypeClass> {
        self.names.get(name).copied()
    }
}

fn collect_locals<'a>(stmt: &'a Statement, names: &mut HashMap<&'a str, TypeClass>) {
    match &stmt.kind {
        StatementKind::VariableDeclaration { declarations, .. } => {
            for decl in declarations.iter().flatten() {
                if let Some(name) = &decl.name {
                    names.insert(name.as_str(), classify(&decl.type_name));
                }
            }
        }
        StatementKind::Block { statements } => {
            for s in statements {
                collect_locals(s, names);
            }
        }
        StatementKind::If {
            then_branch,
            else_branch,
            ..
        } => {
            collect_locals(then_branch, names);
            if let Some(e) = else_branch {
                collect_locals(e, names);
            }
        }
        StatementKind::For { init, body, .. } => {
            if let Some(i) = init {
                collect_locals(i, names);
            }
            collect_locals(body, names);
        }
        StatementKind::While { body, .. } => collect_locals(body, names),
        _ => {}
    }
}

/// Caches one [`Scope`] per function, keyed by the function's span.
#[derive(Default)]
pub(crate) struct ScopeCache<'a> {
    scopes: HashMap<(usize, usize), Scope<'a>>,
}

impl<'a> ScopeCache<'a> {
    pub fn get(&mut self, v: &Visit<'a, '_>) -> &Scope<'a> {
        let func = v.enclosing_function();
        let contract = enclosing_contract(v);
        let key = func
            .map(|f| (f.span.start_byte, f.span.end_byte))
            .or_else(|| contract.map(|c| (c.span.start_byte, usize::MAX)))
            .unwrap_or((usize::MAX, usize::MAX));
        self.scopes
            .entry(key)
            .or_insert_with(|| Scope::build(contract, func))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for op in Operator::ALL {
            assert_eq!(op.code().parse::<Operator>().unwrap(), op);
        }
        assert!("XYZ".parse::<Operator>().is_err());
        assert_eq!("fsc".parse::<Operator>().unwrap(), Operator::Fsc);
    }

    #[test]
    fn groups_split_ten_fifteen() {
        let general = Operator::ALL
            .iter()
            .filter(|o| o.group() == OperatorGroup::General)
            .count();
        assert_eq!(general, 10);
    }

    #[test]
    fn operator_list_parsing() {
        let ops = parse_operator_list("ROR, aorb,ROR").unwrap();
        assert_eq!(ops, vec![Operator::Aorb, Operator::Ror]);
        assert!(parse_operator_list("ROR,NOPE").is_err());
    }

    #[test]
    fn serializes_as_code() {
        assert_eq!(serde_json::to_string(&Operator::Gvc).unwrap(), "\"GVC\"");
    }
}
