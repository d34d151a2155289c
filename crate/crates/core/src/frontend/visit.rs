//! Uniform node view over the typed tree and a deterministic preorder walk.

use super::ast::*;
use super::span::Span;

#[derive(Debug, Clone, Copy)]
pub enum NodeRef<'a> {
    SourceUnit(&'a SourceUnit),
    Pragma(&'a PragmaDirective),
    Import(&'a ImportDirective),
    Contract(&'a ContractDefinition),
    Inheritance(&'a InheritanceSpecifier),
    UsingFor(&'a UsingForDirective),
    Struct(&'a StructDefinition),
    Enum(&'a EnumDefinition),
    Event(&'a EventDefinition),
    Modifier(&'a ModifierDefinition),
    Function(&'a FunctionDefinition),
    ModifierInvocation(&'a ModifierInvocation),
    Variable(&'a VariableDeclaration),
    Statement(&'a Statement),
    Expression(&'a Expression),
}

impl<'a> NodeRef<'a> {
    pub fn span(&self) -> Span {
        match self {
            NodeRef::SourceUnit(n) => n.span,
            NodeRef::Pragma(n) => n.span,
            NodeRef::Import(n) => n.span,
            NodeRef::Contract(n) => n.span,
            NodeRef::Inheritance(n) => n.span,
            NodeRef::UsingFor(n) => n.span,
            NodeRef::Struct(n) => n.span,
            NodeRef::Enum(n) => n.span,
            NodeRef::Event(n) => n.span,
            NodeRef::Modifier(n) => n.span,
            NodeRef::Function(n) => n.span,
            NodeRef::ModifierInvocation(n) => n.span,
            NodeRef::Variable(n) => n.span,
            NodeRef::Statement(n) => n.span,
            NodeRef::Expression(n) => n.span,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            NodeRef::SourceUnit(_) => "SourceUnit",
            NodeRef::Pragma(_) => "PragmaDirective",
            NodeRef::Import(_) => "ImportDirective",
            NodeRef::Contract(_) => "ContractDefinition",
            NodeRef::Inheritance(_) => "InheritanceSpecifier",
            NodeRef::UsingFor(_) => "UsingForDirective",
            NodeRef::Struct(_) => "StructDefinition",
            NodeRef::Enum(_) => "EnumDefinition",
            NodeRef::Event(_) => "EventDefinition",
            NodeRef::Modifier(_) => "ModifierDefinition",
            NodeRef::Function(_) => "FunctionDefinition",
            NodeRef::ModifierInvocation(_) => "ModifierInvocation",
            NodeRef::Variable(_) => "VariableDeclaration",
            NodeRef::Statement(s) => match s.kind {
                StatementKind::Expression { .. } => "ExpressionStatement",
                StatementKind::VariableDeclaration { .. } => "VariableDeclarationStatement",
                StatementKind::If { .. } => "IfStatement",
                StatementKind::For { .. } => "ForStatement",
                StatementKind::While { .. } => "WhileStatement",
                StatementKind::Return { .. } => "Return",
                StatementKind::Delete { .. } => "DeleteStatement",
                StatementKind::Block { .. } => "Block",
                StatementKind::Emit { .. } => "EmitStatement",
                StatementKind::Break => "Break",
                StatementKind::Continue => "Continue",
            },
            NodeRef::Expression(e) => match e.kind {
                ExpressionKind::Binary { .. } => "BinaryOperation",
                ExpressionKind::Unary { .. } => "UnaryOperation",
                ExpressionKind::Assignment { .. } => "Assignment",
                ExpressionKind::Conditional { .. } => "Conditional",
                ExpressionKind::NumberLiteral { .. } => "NumberLiteral",
                ExpressionKind::BoolLiteral { .. } => "BoolLiteral",
                ExpressionKind::StringLiteral { .. } => "StringLiteral",
                ExpressionKind::Identifier { .. } => "Identifier",
                ExpressionKind::MemberAccess { .. } => "MemberAccess",
                ExpressionKind::IndexAccess { .. } => "IndexAccess",
                ExpressionKind::FunctionCall { .. } => "FunctionCall",
                ExpressionKind::ElementaryTypeName { .. } => "ElementaryTypeName",
                ExpressionKind::Parenthesized { .. } => "Parenthesized",
                ExpressionKind::Tuple { .. } => "TupleExpression",
                ExpressionKind::New { .. } => "NewExpression",
            },
        }
    }

    /// Direct children ordered by span start.
    pub fn children(&self) -> Vec<NodeRef<'a>> {
        let mut out: Vec<NodeRef<'a>> = Vec::new();
        match *self {
            NodeRef::SourceUnit(u) => {
                out.extend(u.pragmas.iter().map(NodeRef::Pragma));
                out.extend(u.imports.iter().map(NodeRef::Import));
                out.extend(u.contracts.iter().map(NodeRef::Contract));
            }
            NodeRef::Pragma(_) | NodeRef::Import(_) | NodeRef::Enum(_) | NodeRef::UsingFor(_) => {}
            NodeRef::Contract(c) => {
                out.extend(c.bases.iter().map(NodeRef::Inheritance));
                out.extend(c.using_for.iter().map(NodeRef::UsingFor));
                out.extend(c.structs.iter().map(NodeRef::Struct));
                out.extend(c.enums.iter().map(NodeRef::Enum));
                out.extend(c.events.iter().map(NodeRef::Event));
                out.extend(c.state_variables.iter().map(NodeRef::Variable));
                out.extend(c.modifiers.iter().map(NodeRef::Modifier));
                out.extend(c.functions.iter().map(NodeRef::Function));
            }
            NodeRef::Inheritance(i) => out.extend(i.arguments.iter().map(NodeRef::Expression)),
            NodeRef::Struct(s) => out.extend(s.members.iter().map(NodeRef::Variable)),
            NodeRef::Event(e) => out.extend(e.params.iter().map(NodeRef::Variable)),
            NodeRef::Modifier(m) => out.extend(m.params.iter().map(NodeRef::Variable)),
            NodeRef::Function(f) => {
                out.extend(f.params.iter().map(NodeRef::Variable));
                out.extend(f.modifiers.iter().map(NodeRef::ModifierInvocation));
                out.extend(f.returns.iter().map(NodeRef::Variable));
                out.extend(f.body.iter().map(NodeRef::Statement));
            }
            NodeRef::ModifierInvocation(m) => out.extend(m.arguments.iter().map(NodeRef::Expression)),
            NodeRef::Variable(v) => out.extend(v.initial_value.iter().map(NodeRef::Expression)),
            NodeRef::Statement(s) => statement_children(s, &mut out),
            NodeRef::Expression(e) => expression_children(e, &mut out),
        }
        out.sort_by_key(|n| n.span().start_byte);
        out
    }
}

fn statement_children<'a>(s: &'a Statement, out: &mut Vec<NodeRef<'a>>) {
    match &s.kind {
        StatementKind::Expression { expression } => out.push(NodeRef::Expression(expression)),
        StatementKind::VariableDeclaration {
            declarations,
            initial_value,
        } => {
            out.extend(declarations.iter().flatten().map(NodeRef::Variable));
            out.extend(initial_value.iter().map(NodeRef::Expression));
        }
        StatementKind::If {
            condition,
            then_branch,
            else_branch,
        } => {
            out.push(NodeRef::Expression(condition));
            out.push(NodeRef::Statement(then_branch));
            out.extend(else_branch.iter().map(|b| NodeRef::Statement(b)));
        }
        StatementKind::For {
            init,
            condition,
            update,
            body,
        } => {
            out.extend(init.iter().map(|b| NodeRef::Statement(b)));
            out.extend(condition.iter().map(NodeRef::Expression));
            out.extend(update.iter().map(NodeRef::Expression));
            out.push(NodeRef::Statement(body));
        }
        StatementKind::While { condition, body } => {
            out.push(NodeRef::Expression(condition));
            out.push(NodeRef::Statement(body));
        }
        StatementKind::Return { expression } => out.extend(expression.iter().map(NodeRef::Expression)),
        StatementKind::Delete { target } => out.push(NodeRef::Expression(target)),
        StatementKind::Block { statements } => out.extend(statements.iter().map(NodeRef::Statement)),
        StatementKind::Emit { call } => out.push(NodeRef::Expression(call)),
        StatementKind::Break | StatementKind::Continue => {}
    }
}

fn expression_children<'a>(e: &'a Expression, out: &mut Vec<NodeRef<'a>>) {
    match &e.kind {
        ExpressionKind::Binary { left, right, .. } | ExpressionKind::Assignment { left, right, .. } => {
            out.push(NodeRef::Expression(left));
            out.push(NodeRef::Expression(right));
        }
        ExpressionKind::Unary { operand, .. } => out.push(NodeRef::Expression(operand)),
        ExpressionKind::Conditional {
            condition,
            if_true,
            if_false,
        } => {
            out.push(NodeRef::Expression(condition));
            out.push(NodeRef::Expression(if_true));
            out.push(NodeRef::Expression(if_false));
        }
        ExpressionKind::MemberAccess { object, .. } => out.push(NodeRef::Expression(object)),
        ExpressionKind::IndexAccess { base, index } => {
            out.push(NodeRef::Expression(base));
            out.extend(index.iter().map(|i| NodeRef::Expression(i)));
        }
        ExpressionKind::FunctionCall { callee, arguments, .. } => {
            out.push(NodeRef::Expression(callee));
            out.extend(arguments.iter().map(NodeRef::Expression));
        }
        ExpressionKind::Parenthesized { inner } => out.push(NodeRef::Expression(inner)),
        ExpressionKind::Tuple { elements, .. } => {
            out.extend(elements.iter().flatten().map(NodeRef::Expression))
        }
        ExpressionKind::NumberLiteral { .. }
        | ExpressionKind::BoolLiteral { .. }
        | ExpressionKind::StringLiteral { .. }
        | ExpressionKind::Identifier { .. }
        | ExpressionKind::ElementaryTypeName { .. }
        | ExpressionKind::New { .. } => {}
    }
}

/// Position of a node during a walk.
#[derive(Debug)]
pub struct Visit<'a, 'v> {
    pub node: NodeRef<'a>,
    /// Child indices from the root.
    pub path: &'v [usize],
    /// Enclosing nodes, root first; excludes `node` itself.
    pub ancestors: &'v [NodeRef<'a>],
}

impl<'a> Visit<'a, '_> {
    pub fn parent(&self) -> Option<NodeRef<'a>> {
        self.ancestors.last().copied()
    }

    /// Innermost enclosing function definition.
    pub fn enclosing_function(&self) -> Option<&'a FunctionDefinition> {
        self.ancestors.iter().rev().find_map(|n| match n {
            NodeRef::Function(f) => Some(*f),
            _ => None,
        })
    }
}

/// Preorder walk; siblings are visited in span order.
pub fn walk<'a>(unit: &'a SourceUnit, mut visitor: impl FnMut(&Visit<'a, '_>)) {
    fn go<'a>(
        node: NodeRef<'a>,
        path: &mut Vec<usize>,
        ancestors: &mut Vec<NodeRef<'a>>,
        visitor: &mut impl FnMut(&Visit<'a, '_>),
    ) {
        visitor(&Visit {
            node,
            path,
            ancestors,
        });
        ancestors.push(node);
        for (i, child) in node.children().into_iter().enumerate() {
            path.push(i);
            go(child, path, ancestors, visitor);
            path.pop();
        }
        ancestors.pop();
    }
    go(NodeRef::SourceUnit(unit), &mut Vec::new(), &mut Vec::new(), &mut visitor);
}

/// One entry per visited node, in visit order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub kind: &'static str,
    pub span: Span,
    pub path: Vec<usize>,
}

pub fn traverse(unit: &SourceUnit) -> Vec<TraceEntry> {
    let mut trace = Vec::new();
    walk(unit, |v| {
        trace.push(TraceEntry {
            kind: v.node.kind_name(),
            span: v.node.span(),
            path: v.path.to_vec(),
        })
    });
    trace
}

pub fn node_count(unit: &SourceUnit) -> usize {
    let mut n = 0;
    walk(unit, |_| n += 1);
    n
}
