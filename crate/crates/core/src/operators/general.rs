//! Language-agnostic operators: AOR, AOI, ROR, COR, LOR, ASR, SDL, RVR, CSC.

use super::*;
use crate::frontend::ast::{BinaryOp, ExpressionKind, StatementKind, UnaryOp};

const AOR_BINARY: [BinaryOp; 5] = [
    BinaryOp::Add,
    BinaryOp::Sub,
    BinaryOp::Mul,
    BinaryOp::Div,
    BinaryOp::Mod,
];

const RELATIONAL: [BinaryOp; 6] = [
    BinaryOp::Gt,
    BinaryOp::Ge,
    BinaryOp::Lt,
    BinaryOp::Le,
    BinaryOp::Eq,
    BinaryOp::Ne,
];

const BITWISE: [BinaryOp; 3] = [BinaryOp::BitAnd, BinaryOp::BitOr, BinaryOp::BitXor];

const ASSIGN_ARITHMETIC: [&str; 5] = ["+=", "-=", "*=", "/=", "%="];
const ASSIGN_BITWISE: [&str; 3] = ["&=", "|=", "^="];

fn binary_sites(cx: &Context<'_>, op_code: Operator, set: &[BinaryOp]) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, op_code);
    for_each_expression(cx.unit, |e, v| {
        if let (ExpressionKind::Binary { op, .. }, Some(op_span)) = (&e.kind, e.operator_span) {
            if set.contains(op) {
                for alt in set.iter().filter(|alt| *alt != op) {
                    em.replace(op_span, alt.as_str(), v.path);
                }
            }
        }
    });
    em.finish()
}

pub(crate) fn aorb(cx: &Context<'_>) -> Vec<MutationPoint> {
    binary_sites(cx, Operator::Aorb, &AOR_BINARY)
}

pub(crate) fn aors(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Aors);
    for_each_expression(cx.unit, |e, v| {
        if let (ExpressionKind::Unary { op, .. }, Some(op_span)) = (&e.kind, e.operator_span) {
            match op {
                UnaryOp::Increment => em.replace(op_span, "--", v.path),
                UnaryOp::Decrement => em.replace(op_span, "++", v.path),
                _ => {}
            }
        }
    });
    em.finish()
}

/// AORB and AORS points together.
pub fn enumerate_aor(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut points = aorb(cx);
    points.extend(aors(cx));
    sort_points(&mut points);
    points
}

/// Identifier reads of integer type inside arithmetic or relational
/// operands, assignment right-hand sides, return values and local
/// initializers.
pub fn enumerate_aoi(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Aoi);
    let mut scopes = ScopeCache::default();
    for_each_expression(cx.unit, |e, v| {
        let Some(name) = e.identifier() else { return };
        if v.enclosing_function().is_none() || !in_aoi_context(e, v) {
            return;
        }
        if scopes.get(v).lookup(name) != Some(TypeClass::Integer) {
            return;
        }
        for replacement in [format!("++{name}"), format!("--{name}"), format!("(-{name})")] {
            em.replace(e.span, &replacement, v.path);
        }
    });
    em.finish()
}

fn in_aoi_context(e: &Expression, v: &Visit<'_, '_>) -> bool {
    match v.parent() {
        Some(NodeRef::Expression(parent)) => match &parent.kind {
            ExpressionKind::Binary { op, .. } => op.is_arithmetic() || op.is_relational(),
            ExpressionKind::Assignment { right, .. } => std::ptr::eq(right.as_ref(), e),
            _ => false,
        },
        Some(NodeRef::Statement(s)) => matches!(
            s.kind,
            StatementKind::Return { .. } | StatementKind::VariableDeclaration { .. }
        ),
        _ => false,
    }
}

pub fn enumerate_ror(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Ror);
    for_each_expression(cx.unit, |e, v| {
        if let (ExpressionKind::Binary { op, .. }, Some(op_span)) = (&e.kind, e.operator_span) {
            if RELATIONAL.contains(op) {
                for alt in RELATIONAL.iter().filter(|alt| *alt != op) {
                    em.replace(op_span, alt.as_str(), v.path);
                }
                em.replace(e.span, "true", v.path);
                em.replace(e.span, "false", v.path);
            }
        }
    });
    em.finish()
}

pub fn enumerate_cor(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Cor);
    for_each_expression(cx.unit, |e, v| {
        if let (ExpressionKind::Binary { op, .. }, Some(op_span)) = (&e.kind, e.operator_span) {
            match op {
                BinaryOp::And => em.replace(op_span, "||", v.path),
                BinaryOp::Or => em.replace(op_span, "&&", v.path),
                _ => {}
            }
        }
    });
    em.finish()
}

pub fn enumerate_lor(cx: &Context<'_>) -> Vec<MutationPoint> {
    binary_sites(cx, Operator::Lor, &BITWISE)
}

pub fn enumerate_asr(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Asr);
    for_each_expression(cx.unit, |e, v| {
        if let (ExpressionKind::Assignment { op, .. }, Some(op_span)) = (&e.kind, e.operator_span) {
            let group: &[&str] = if ASSIGN_ARITHMETIC.contains(&op.as_str()) {
                &ASSIGN_ARITHMETIC
            } else if ASSIGN_BITWISE.contains(&op.as_str()) {
                &ASSIGN_BITWISE
            } else {
                return;
            };
            for alt in group.iter().filter(|alt| **alt != op) {
                em.replace(op_span, alt, v.path);
            }
        }
    });
    em.finish()
}

/// Statements directly inside a block that can be removed without breaking
/// the surrounding syntax.
pub fn enumerate_sdl(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Sdl);
    for_each_statement(cx.unit, |s, v| {
        let in_block = matches!(
            v.parent(),
            Some(NodeRef::Statement(Statement {
                kind: StatementKind::Block { .. },
                ..
            }))
        );
        if !in_block {
            return;
        }
        let deletable = match &s.kind {
            StatementKind::Expression { .. }
            | StatementKind::Emit { .. }
            | StatementKind::Delete { .. }
            | StatementKind::Break
            | StatementKind::Continue => true,
            StatementKind::Return { .. } => v.enclosing_function().is_some_and(|f| f.returns.is_empty()),
            _ => false,
        };
        if deletable {
            em.comment_out(s.span, v.path);
        }
    });
    em.finish()
}

pub fn enumerate_rvr(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Rvr);
    let mut scopes = ScopeCache::default();
    for_each_statement(cx.unit, |s, v| {
        let StatementKind::Return {
            expression: Some(expr),
        } = &s.kind
        else {
            return;
        };
        let declared = v
            .enclosing_function()
            .and_then(|f| match f.returns.as_slice() {
                [single] => Some(classify(&single.type_name)),
                _ => None,
            });
        let class = return_class(expr, declared, scopes.get(v));
        let replacements: &[&str] = match class {
            TypeClass::Integer => &["0", "1"],
            TypeClass::Bool => &["true", "false"],
            TypeClass::Address => &["address(0)"],
            TypeClass::Other => &["0"],
        };
        for r in replacements {
            em.replace(expr.span, r, v.path);
        }
    });
    em.finish()
}

fn return_class(expr: &Expression, declared: Option<TypeClass>, scope: &Scope<'_>) -> TypeClass {
    if let Some(class @ (TypeClass::Integer | TypeClass::Bool | TypeClass::Address)) = declared {
        return class;
    }
    match &expr.kind {
        ExpressionKind::NumberLiteral { .. } => TypeClass::Integer,
        ExpressionKind::BoolLiteral { .. } => TypeClass::Bool,
        ExpressionKind::Identifier { name } if name == "now" => TypeClass::Integer,
        ExpressionKind::Identifier { name } => scope.lookup(name).unwrap_or(TypeClass::Other),
        ExpressionKind::MemberAccess { path: Some(p), .. } => {
            if GLOBALS.address_globals.contains(&p.as_str()) {
                TypeClass::Address
            } else if GLOBALS.value_globals.contains(&p.as_str()) {
                TypeClass::Integer
            } else {
                TypeClass::Other
            }
        }
        _ => TypeClass::Other,
    }
}

pub fn enumerate_csc(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Csc);
    for_each_statement(cx.unit, |s, v| {
        if let Some(condition) = s.condition() {
            em.replace(condition.span, "true", v.path);
            em.replace(condition.span, "false", v.path);
        }
    });
    em.finish()
}
