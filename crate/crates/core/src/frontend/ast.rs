//! Span-annotated syntax tree for the supported Solidity subset.
//!
//! The tree is never printed back to source. Every node keeps the byte span it
//! was parsed from, and mutants are produced by splicing replacement text into
//! the original file at those spans.

use serde::{Deserialize, Serialize};

use super::span::Span;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceUnit {
    pub pragmas: Vec<PragmaDirective>,
    pub imports: Vec<ImportDirective>,
    pub contracts: Vec<ContractDefinition>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PragmaDirective {
    pub name: String,
    pub value: String,
    pub span: Span,
}

/// Imports are recorded, never resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportDirective {
    pub path: String,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContractKind {
    Contract,
    Interface,
    Library,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractDefinition {
    pub kind: ContractKind,
    pub name: String,
    pub bases: Vec<InheritanceSpecifier>,
    pub state_variables: Vec<VariableDeclaration>,
    pub functions: Vec<FunctionDefinition>,
    pub modifiers: Vec<ModifierDefinition>,
    pub events: Vec<EventDefinition>,
    pub structs: Vec<StructDefinition>,
    pub enums: Vec<EnumDefinition>,
    pub using_for: Vec<UsingForDirective>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InheritanceSpecifier {
    pub name: String,
    pub arguments: Vec<Expression>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UsingForDirective {
    pub library: String,
    /// `None` for `using L for *;`
    pub target: Option<TypeName>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructDefinition {
    pub name: String,
    pub members: Vec<VariableDeclaration>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumDefinition {
    pub name: String,
    pub values: Vec<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventDefinition {
    pub name: String,
    pub params: Vec<VariableDeclaration>,
    pub anonymous: bool,
    pub span: Span,
}

/// Modifier bodies are kept opaque: only their span is recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifierDefinition {
    pub name: String,
    pub params: Vec<VariableDeclaration>,
    pub body_span: Option<Span>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Public,
    External,
    Internal,
    Private,
}

impl Visibility {
    pub const ALL: [Visibility; 4] = [
        Visibility::Public,
        Visibility::External,
        Visibility::Internal,
        Visibility::Private,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::External => "external",
            Visibility::Internal => "internal",
            Visibility::Private => "private",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == word)
    }
}

/// `constant` is recorded separately from `view` even though older
/// compilers treat them as aliases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateMutability {
    Pure,
    View,
    Payable,
    Constant,
}

impl StateMutability {
    pub fn as_str(self) -> &'static str {
        match self {
            StateMutability::Pure => "pure",
            StateMutability::View => "view",
            StateMutability::Payable => "payable",
            StateMutability::Constant => "constant",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "pure" => Some(StateMutability::Pure),
            "view" => Some(StateMutability::View),
            "payable" => Some(StateMutability::Payable),
            "constant" => Some(StateMutability::Constant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataLocation {
    Memory,
    Storage,
    Calldata,
}

impl DataLocation {
    pub fn as_str(self) -> &'static str {
        match self {
            DataLocation::Memory => "memory",
            DataLocation::Storage => "storage",
            DataLocation::Calldata => "calldata",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        match word {
            "memory" => Some(DataLocation::Memory),
            "storage" => Some(DataLocation::Storage),
            "calldata" => Some(DataLocation::Calldata),
            _ => None,
        }
    }
}

/// A keyword value together with the span of the keyword itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Keyword<T> {
    pub value: T,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionKind {
    Function,
    Constructor,
    Fallback,
    Receive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionDefinition {
    pub kind: FunctionKind,
    /// Absent for constructors and fallbacks.
    pub name: Option<String>,
    pub params: Vec<VariableDeclaration>,
    pub returns: Vec<VariableDeclaration>,
    pub visibility: Option<Keyword<Visibility>>,
    pub state_mutability: Option<Keyword<StateMutability>>,
    pub modifiers: Vec<ModifierInvocation>,
    /// Always a `StatementKind::Block` when present.
    pub body: Option<Statement>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModifierInvocation {
    pub name: String,
    pub arguments: Vec<Expression>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TypeName {
    /// Keyword recorded verbatim, e.g. `uint` vs `uint256`.
    Elementary {
        name: String,
        payable: bool,
        span: Span,
    },
    UserDefined {
        path: String,
        span: Span,
    },
    Array {
        base: Box<TypeName>,
        length: Option<String>,
        span: Span,
    },
    Mapping {
        key: Box<TypeName>,
        value: Box<TypeName>,
        span: Span,
    },
}

impl TypeName {
    pub fn span(&self) -> Span {
        match self {
            TypeName::Elementary { span, .. }
            | TypeName::UserDefined { span, .. }
            | TypeName::Array { span, .. }
            | TypeName::Mapping { span, .. } => *span,
        }
    }

    /// The elementary keyword name if this is a plain elementary type.
    pub fn elementary_name(&self) -> Option<&str> {
        match self {
            TypeName::Elementary { name, .. } => Some(name),
            _ => None,
        }
    }

    /// Every elementary keyword occurring in this type, outermost first.
    pub fn elementary_keywords(&self) -> Vec<(&str, Span)> {
        let mut out = Vec::new();
        self.collect_elementary(&mut out);
        out
    }

    fn collect_elementary<'a>(&'a self, out: &mut Vec<(&'a str, Span)>) {
        match self {
            TypeName::Elementary { name, span, .. } => out.push((name, *span)),
            TypeName::UserDefined { .. } => {}
            TypeName::Array { base, .. } => base.collect_elementary(out),
            TypeName::Mapping { key, value, .. } => {
                key.collect_elementary(out);
                value.collect_elementary(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableDeclaration {
    pub type_name: TypeName,
    pub data_location: Option<Keyword<DataLocation>>,
    /// Absent for unnamed parameters and return values.
    pub name: Option<String>,
    /// State variables only.
    pub visibility: Option<Keyword<Visibility>>,
    pub constant: bool,
    pub indexed: bool,
    /// State variable initializer.
    pub initial_value: Option<Expression>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement {
    pub kind: StatementKind,
    pub span: Span,
}

impl Statement {
    /// The condition of an `if`, `for` or `while` statement.
    pub fn condition(&self) -> Option<&Expression> {
        match &self.kind {
            StatementKind::If { condition, .. } | StatementKind::While { condition, .. } => {
                Some(condition)
            }
            StatementKind::For { condition, .. } => condition.as_ref(),
            _ => None,
        }
    }

    pub fn condition_span(&self) -> Option<Span> {
        self.condition().map(|c| c.span)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum StatementKind {
    Expression {
        expression: Expression,
    },
    VariableDeclaration {
        /// `None` entries are skipped tuple slots, as in `(, uint b) = f();`
        declarations: Vec<Option<VariableDeclaration>>,
        initial_value: Option<Expression>,
    },
    If {
        condition: Expression,
        then_branch: Box<Statement>,
        else_branch: Option<Box<Statement>>,
    },
    For {
        init: Option<Box<Statement>>,
        condition: Option<Expression>,
        update: Option<Expression>,
        body: Box<Statement>,
    },
    While {
        condition: Expression,
        body: Box<Statement>,
    },
    Return {
        expression: Option<Expression>,
    },
    /// `delete <target>;` with the span covering the trailing semicolon.
    Delete {
        target: Expression,
    },
    Block {
        statements: Vec<Statement>,
    },
    Emit {
        call: Expression,
    },
    Break,
    Continue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expression {
    pub kind: ExpressionKind,
    /// Operator lexeme span for binary, unary and assignment expressions.
    pub operator_span: Option<Span>,
    pub span: Span,
}

impl Expression {
    /// Name of the callee when this is a call to a plain identifier.
    pub fn callee_name(&self) -> Option<&str> {
        match &self.kind {
            ExpressionKind::FunctionCall { callee, .. } => match &callee.kind {
                ExpressionKind::Identifier { name } => Some(name),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn call_arguments(&self) -> &[Expression] {
        match &self.kind {
            ExpressionKind::FunctionCall { arguments, .. } => arguments,
            _ => &[],
        }
    }

    pub fn identifier(&self) -> Option<&str> {
        match &self.kind {
            ExpressionKind::Identifier { name } => Some(name),
            _ => None,
        }
    }

    pub fn member_path(&self) -> Option<&str> {
        match &self.kind {
            ExpressionKind::MemberAccess { path, .. } => path.as_deref(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Shl,
    Shr,
    BitAnd,
    BitXor,
    BitOr,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        use BinaryOp::*;
        match self {
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Mod => "%",
            Pow => "**",
            Shl => "<<",
            Shr => ">>",
            BitAnd => "&",
            BitXor => "^",
            BitOr => "|",
            Lt => "<",
            Gt => ">",
            Le => "<=",
            Ge => ">=",
            Eq => "==",
            Ne => "!=",
            And => "&&",
            Or => "||",
        }
    }

    pub fn from_lexeme(s: &str) -> Option<Self> {
        use BinaryOp::*;
        Some(match s {
            "+" => Add,
            "-" => Sub,
            "*" => Mul,
            "/" => Div,
            "%" => Mod,
            "**" => Pow,
            "<<" => Shl,
            ">>" => Shr,
            "&" => BitAnd,
            "^" => BitXor,
            "|" => BitOr,
            "<" => Lt,
            ">" => Gt,
            "<=" => Le,
            ">=" => Ge,
            "==" => Eq,
            "!=" => Ne,
            "&&" => And,
            "||" => Or,
            _ => return None,
        })
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        use BinaryOp::*;
        match self {
            Or => 1,
            And => 2,
            Eq | Ne => 3,
            Lt | Gt | Le | Ge => 4,
            BitOr => 5,
            BitXor => 6,
            BitAnd => 7,
            Shl | Shr => 8,
            Add | Sub => 9,
            Mul | Div | Mod => 10,
            Pow => 11,
        }
    }

    pub fn is_arithmetic(self) -> bool {
        use BinaryOp::*;
        matches!(self, Add | Sub | Mul | Div | Mod | Pow)
    }

    pub fn is_relational(self) -> bool {
        use BinaryOp::*;
        matches!(self, Lt | Gt | Le | Ge | Eq | Ne)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryOp {
    Increment,
    Decrement,
    Negate,
    Plus,
    Not,
    BitNot,
    Delete,
}

impl UnaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Increment => "++",
            UnaryOp::Decrement => "--",
            UnaryOp::Negate => "-",
            UnaryOp::Plus => "+",
            UnaryOp::Not => "!",
            UnaryOp::BitNot => "~",
            UnaryOp::Delete => "delete",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitSuffix {
    pub unit: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ExpressionKind {
    Binary {
        op: BinaryOp,
        left: Box<Expression>,
        right: Box<Expression>,
    },
    Unary {
        op: UnaryOp,
        prefix: bool,
        operand: Box<Expression>,
    },
    Assignment {
        /// Operator text verbatim, e.g. `+=`.
        op: String,
        left: Box<Expression>,
        right: Box<Expression>,
    },
    Conditional {
        condition: Box<Expression>,
        if_true: Box<Expression>,
        if_false: Box<Expression>,
    },
    NumberLiteral {
        value: String,
        unit: Option<UnitSuffix>,
    },
    BoolLiteral {
        value: bool,
    },
    StringLiteral {
        value: String,
    },
    Identifier {
        name: String,
    },
    /// `path` is the dotted spelling (`msg.sender`) when the object is a
    /// chain of plain identifiers.
    MemberAccess {
        object: Box<Expression>,
        member: String,
        path: Option<String>,
    },
    IndexAccess {
        base: Box<Expression>,
        index: Option<Box<Expression>>,
    },
    FunctionCall {
        callee: Box<Expression>,
        arguments: Vec<Expression>,
        /// Argument names for `f({a: 1})` calls.
        names: Vec<String>,
    },
    ElementaryTypeName {
        name: String,
    },
    Parenthesized {
        inner: Box<Expression>,
    },
    /// Tuple `(a, , b)` or inline array `[a, b]`.
    Tuple {
        elements: Vec<Option<Expression>>,
        is_array: bool,
    },
    New {
        type_name: TypeName,
    },
}
