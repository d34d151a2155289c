//! Solidity-specific operators: keywords, globals, units and error handling.

use super::*;
use crate::frontend::ast::{DataLocation, ExpressionKind, StateMutability, StatementKind, Visibility};
use crate::rng::SplitMix64;

pub fn enumerate_fsc(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Fsc);
    for_each_function(cx.unit, |f, v| {
        if let Some(kw) = f.state_mutability {
            if kw.value == StateMutability::View {
                em.replace(kw.span, "pure", v.path);
            }
        }
    });
    em.finish()
}

pub fn enumerate_fvc(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Fvc);
    for_each_function(cx.unit, |f, v| {
        if let Some(kw) = f.visibility {
            for alt in Visibility::ALL.iter().filter(|alt| **alt != kw.value) {
                em.replace(kw.span, alt.as_str(), v.path);
            }
        }
    });
    em.finish()
}

pub fn enumerate_dlr(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Dlr);
    walk(cx.unit, |v| {
        if let NodeRef::Variable(var) = v.node {
            if let Some(kw) = var.data_location {
                let alt = match kw.value {
                    DataLocation::Storage => DataLocation::Memory,
                    DataLocation::Memory => DataLocation::Storage,
                    DataLocation::Calldata => DataLocation::Memory,
                };
                em.replace(kw.span, alt.as_str(), v.path);
            }
        }
    });
    em.finish()
}

/// Replacement keywords for one elementary type keyword.
pub fn vtr_replacements(keyword: &str) -> Vec<String> {
    let mut out = Vec::new();
    if let Some(width) = keyword.strip_prefix("uint") {
        out.push(format!("int{width}"));
        let shrinkable = width.is_empty() || width.parse::<u32>().is_ok_and(|n| n > 8);
        if shrinkable {
            out.push("uint8".to_string());
        }
    } else if let Some(width) = keyword.strip_prefix("int") {
        out.push(format!("uint{width}"));
    } else if let Some(width) = keyword.strip_prefix("bytes") {
        if width.parse::<u32>().is_ok_and(|n| n > 8) {
            out.push("bytes8".to_string());
        }
    }
    out
}

pub fn enumerate_vtr(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Vtr);
    walk(cx.unit, |v| {
        if let NodeRef::Variable(var) = v.node {
            for (keyword, span) in var.type_name.elementary_keywords() {
                for alt in vtr_replacements(keyword) {
                    em.replace(span, &alt, v.path);
                }
            }
        }
    });
    em.finish()
}

/// Deletes `payable` together with one adjacent whitespace run, preferring
/// the run before the keyword.
pub fn enumerate_pkd(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Pkd);
    let src = cx.source;
    let lines = crate::frontend::LineIndex::new(src);
    for_each_function(cx.unit, |f, v| {
        let Some(kw) = f.state_mutability else { return };
        if kw.value != StateMutability::Payable {
            return;
        }
        let before = src[..kw.span.start_byte].trim_end_matches(|c: char| c.is_whitespace());
        let (start, end) = if before.len() < kw.span.start_byte {
            (before.len(), kw.span.end_byte)
        } else {
            let after = &src[kw.span.end_byte..];
            let ws = after.len() - after.trim_start_matches(|c: char| c.is_whitespace()).len();
            (kw.span.start_byte, kw.span.end_byte + ws)
        };
        em.delete(lines.span(src, start, end), v.path);
    });
    em.finish()
}

pub fn enumerate_dkd(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Dkd);
    for_each_statement(cx.unit, |s, v| {
        if matches!(s.kind, StatementKind::Delete { .. }) {
            em.comment_out(s.span, v.path);
        }
    });
    em.finish()
}

/// Name of a value global read by `e`, if any.
pub fn value_global(e: &Expression) -> Option<&str> {
    let name = match &e.kind {
        ExpressionKind::Identifier { name } => name.as_str(),
        ExpressionKind::MemberAccess { path: Some(p), .. } => p.as_str(),
        _ => return None,
    };
    GLOBALS.value_globals.iter().find(|g| **g == name).copied()
}

/// The seeded replacement value for a GVC site.
pub fn gvc_random_value(seed: u64, span: Span) -> u64 {
    let site = (span.start_byte as u64) << 32 | span.end_byte as u64;
    SplitMix64::new(crate::rng::derive_seed(seed, site)).next_u64()
}

pub fn enumerate_gvc(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Gvc);
    for_each_expression(cx.unit, |e, v| {
        if value_global(e).is_none() || is_assignment_target(e, v) {
            return;
        }
        em.replace(e.span, "0", v.path);
        em.replace(e.span, "1", v.path);
        if cx.seed != 0 {
            em.replace(e.span, &gvc_random_value(cx.seed, e.span).to_string(), v.path);
        }
    });
    em.finish()
}

fn is_assignment_target(e: &Expression, v: &Visit<'_, '_>) -> bool {
    matches!(
        v.parent(),
        Some(NodeRef::Expression(Expression {
            kind: ExpressionKind::Assignment { left, .. },
            ..
        })) if std::ptr::eq(left.as_ref(), e)
    )
}

pub fn enumerate_mfr(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Mfr);
    for_each_expression(cx.unit, |e, v| {
        if let ExpressionKind::FunctionCall { callee, .. } = &e.kind {
            let alt = match callee.identifier() {
                Some("addmod") => "mulmod",
                Some("mulmod") => "addmod",
                _ => return,
            };
            em.replace(callee.span, alt, v.path);
        }
    });
    em.finish()
}

pub fn enumerate_avr(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, Operator::Avr);
    for_each_expression(cx.unit, |e, v| {
        let Some(path) = e.member_path() else { return };
        if GLOBALS.address_globals.contains(&path) {
            for alt in GLOBALS.address_globals.iter().filter(|g| **g != path) {
                em.replace(e.span, alt, v.path);
            }
        }
    });
    em.finish()
}

fn unit_swaps(cx: &Context<'_>, op: Operator, units: &[&str]) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, op);
    for_each_expression(cx.unit, |e, v| {
        if let ExpressionKind::NumberLiteral { unit: Some(u), .. } = &e.kind {
            if units.contains(&u.unit.as_str()) {
                for alt in units.iter().filter(|alt| **alt != u.unit) {
                    em.replace(u.span, alt, v.path);
                }
            }
        }
    });
    em.finish()
}

pub fn enumerate_eur(cx: &Context<'_>) -> Vec<MutationPoint> {
    unit_swaps(cx, Operator::Eur, UNITS.ether_units)
}

pub fn enumerate_tur(cx: &Context<'_>) -> Vec<MutationPoint> {
    unit_swaps(cx, Operator::Tur, UNITS.time_units)
}

/// `require(...)`/`assert(...)` used as an expression statement.
fn check_statements<'a>(
    cx: &Context<'a>,
    callee: &str,
    mut f: impl FnMut(&'a Statement, &'a Expression, &Visit<'a, '_>),
) {
    for_each_statement(cx.unit, |s, v| {
        if let StatementKind::Expression { expression } = &s.kind {
            if expression.callee_name() == Some(callee) {
                f(s, expression, v);
            }
        }
    });
}

fn deletion(cx: &Context<'_>, op: Operator, callee: &str) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, op);
    check_statements(cx, callee, |s, _, v| em.comment_out(s.span, v.path));
    em.finish()
}

fn falsify(cx: &Context<'_>, op: Operator, callee: &str) -> Vec<MutationPoint> {
    let mut em = Emitter::new(cx, op);
    check_statements(cx, callee, |_, call, v| {
        if let Some(condition) = call.call_arguments().first() {
            em.replace(condition.span, "false", v.path);
        }
    });
    em.finish()
}

pub(crate) fn rsd(cx: &Context<'_>) -> Vec<MutationPoint> {
    deletion(cx, Operator::Rsd, "require")
}

pub(crate) fn rsc(cx: &Context<'_>) -> Vec<MutationPoint> {
    falsify(cx, Operator::Rsc, "require")
}

pub(crate) fn asd(cx: &Context<'_>) -> Vec<MutationPoint> {
    deletion(cx, Operator::Asd, "assert")
}

pub(crate) fn asc(cx: &Context<'_>) -> Vec<MutationPoint> {
    falsify(cx, Operator::Asc, "assert")
}

/// RSD and RSC points.
pub fn enumerate_require_ops(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut points = rsd(cx);
    points.extend(rsc(cx));
    sort_points(&mut points);
    points
}

/// ASD and ASC points.
pub fn enumerate_assert_ops(cx: &Context<'_>) -> Vec<MutationPoint> {
    let mut points = asd(cx);
    points.extend(asc(cx));
    sort_points(&mut points);
    points
}
