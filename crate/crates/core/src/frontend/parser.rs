//! Recursive-descent parser with precedence climbing for expressions.

use std::fmt;

use thiserror::Error;

use super::ast::*;
use super::lexer::{is_sized_elementary, tokenize, LexError, Token, TokenKind};
use super::span::{LineIndex, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: expected ", self.line, self.col)?;
        match self.expected.as_slice() {
            [one] => write!(f, "{one}")?,
            many => write!(f, "one of {}", many.join(", "))?,
        }
        write!(f, ", found {}", self.found)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl SyntaxError {
    pub fn line(&self) -> usize {
        match self {
            SyntaxError::Lex(e) => e.line,
            SyntaxError::Parse(e) => e.line,
        }
    }

    pub fn col(&self) -> usize {
        match self {
            SyntaxError::Lex(e) => e.col,
            SyntaxError::Parse(e) => e.col,
        }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parse `source` into a [`SourceUnit`].
pub fn parse(source: &str) -> Result<SourceUnit, SyntaxError> {
    let tokens = tokenize(source)?
        .into_iter()
        .filter(|t| !t.is_trivia())
        .collect();
    let mut parser = Parser {
        src: source,
        lines: LineIndex::new(source),
        toks: tokens,
        pos: 0,
    };
    Ok(parser.source_unit()?)
}

const ASSIGNMENT_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=",
];

struct Parser<'s> {
    src: &'s str,
    lines: LineIndex,
    toks: Vec<Token>,
    pos: usize,
}

impl<'s> Parser<'s> {
    // ---- cursor helpers ----

    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_nth(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn at(&self, lexeme: &str) -> bool {
        self.peek().is_some_and(|t| {
            t.lexeme == lexeme && !matches!(t.kind, TokenKind::StringLiteral | TokenKind::Identifier)
        })
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek().is_some_and(|t| t.kind == kind)
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, lexeme: &str) -> Option<Token> {
        if self.at(lexeme) {
            Some(self.bump())
        } else {
            None
        }
    }

    fn error_here(&self, expected: &[&str]) -> ParseError {
        let (line, col, found) = match self.peek() {
            Some(t) => (t.span.start_line, t.span.start_col, format!("{:?}", t.lexeme)),
            None => {
                let (l, c) = self.lines.line_col(self.src, self.src.len());
                (l, c, "end of file".to_string())
            }
        };
        ParseError {
            line,
            col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found,
        }
    }

    fn unsupported(&self, what: &str) -> ParseError {
        let mut e = self.error_here(&[]);
        e.expected = vec![format!("supported syntax ({what} is not supported)")];
        e
    }

    fn expect(&mut self, lexeme: &str) -> PResult<Token> {
        self.eat(lexeme).ok_or_else(|| self.error_here(&[lexeme]))
    }

    fn expect_ident(&mut self) -> PResult<(String, Span)> {
        if self.at_kind(TokenKind::Identifier) {
            let t = self.bump();
            Ok((t.lexeme, t.span))
        } else {
            Err(self.error_here(&["identifier"]))
        }
    }

    fn start(&self) -> usize {
        self.peek().map_or(self.src.len(), |t| t.span.start_byte)
    }

    /// Span from byte `start` to the end of the last consumed token.
    fn span_from(&self, start: usize) -> Span {
        let end = self.toks[..self.pos]
            .last()
            .map_or(start, |t| t.span.end_byte)
            .max(start);
        self.lines.span(self.src, start, end)
    }

    // ---- top level ----

    fn source_unit(&mut self) -> PResult<SourceUnit> {
        let mut unit = SourceUnit {
            pragmas: Vec::new(),
            imports: Vec::new(),
            contracts: Vec::new(),
            span: self.lines.span(self.src, 0, self.src.len()),
        };
        while let Some(tok) = self.peek() {
            match tok.lexeme.as_str() {
                "pragma" if tok.kind == TokenKind::Keyword => unit.pragmas.push(self.pragma()?),
                "import" if tok.kind == TokenKind::Keyword => unit.imports.push(self.import()?),
                "contract" | "interface" | "library" if tok.kind == TokenKind::Keyword => {
                    unit.contracts.push(self.contract()?)
                }
                _ => return Err(self.error_here(&["pragma", "import", "contract", "interface", "library"])),
            }
        }
        Ok(unit)
    }

    fn pragma(&mut self) -> PResult<PragmaDirective> {
        let start = self.start();
        self.expect("pragma")?;
        let (name, _) = self.expect_ident()?;
        let value_start = self.start();
        while !self.at(";") {
            if self.peek().is_none() {
                return Err(self.error_here(&[";"]));
            }
            self.bump();
        }
        let value = self.src[value_start..self.start()].trim().to_string();
        if name == "abicoder" || (name == "experimental" && value.contains("ABIEncoder")) {
            return Err(ParseError {
                line: self.toks[self.pos - 1].span.start_line,
                col: self.toks[self.pos - 1].span.start_col,
                expected: vec!["supported pragma (ABI encoder pragmas are not supported)".into()],
                found: format!("{value:?}"),
            });
        }
        self.expect(";")?;
        Ok(PragmaDirective {
            name,
            value,
            span: self.span_from(start),
        })
    }

    fn import(&mut self) -> PResult<ImportDirective> {
        let start = self.start();
        self.expect("import")?;
        let mut path = None;
        while !self.at(";") {
            match self.peek() {
                None => return Err(self.error_here(&[";"])),
                Some(t) if t.kind == TokenKind::StringLiteral => {
                    let lit = self.bump().lexeme;
                    path = Some(lit[1..lit.len() - 1].to_string());
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.expect(";")?;
        let path = path.ok_or_else(|| self.error_here(&["import path"]))?;
        Ok(ImportDirective {
            path,
            span: self.span_from(start),
        })
    }

    fn contract(&mut self) -> PResult<ContractDefinition> {
        let start = self.start();
        let kind = match self.bump().lexeme.as_str() {
            "contract" => ContractKind::Contract,
            "interface" => ContractKind::Interface,
            _ => ContractKind::Library,
        };
        let (name, _) = self.expect_ident()?;
        let mut contract = ContractDefinition {
            kind,
            name,
            bases: Vec::new(),
            state_variables: Vec::new(),
            functions: Vec::new(),
            modifiers: Vec::new(),
            events: Vec::new(),
            structs: Vec::new(),
            enums: Vec::new(),
            using_for: Vec::new(),
            span: self.span_from(start),
        };
        if self.eat("is").is_some() {
            loop {
                let base_start = self.start();
                let name = self.dotted_path()?;
                let arguments = if self.at("(") {
                    self.call_arguments()?.0
                } else {
                    Vec::new()
                };
                contract.bases.push(InheritanceSpecifier {
                    name,
                    arguments,
                    span: self.span_from(base_start),
                });
                if self.eat(",").is_none() {
                    break;
                }
            }
        }
        self.expect("{")?;
        while self.eat("}").is_none() {
            let tok = match self.peek() {
                Some(t) => t.clone(),
                None => return Err(self.error_here(&["}"])),
            };
            match (tok.kind, tok.lexeme.as_str()) {
                (TokenKind::Keyword, "function" | "constructor") => {
                    contract.functions.push(self.function()?)
                }
                (TokenKind::Identifier, "fallback" | "receive")
                    if self.peek_nth(1).is_some_and(|t| t.lexeme == "(") =>
                {
                    contract.functions.push(self.function()?)
                }
                (TokenKind::Keyword, "modifier") => contract.modifiers.push(self.modifier()?),
                (TokenKind::Keyword, "event") => contract.events.push(self.event()?),
                (TokenKind::Keyword, "struct") => contract.structs.push(self.struct_def()?),
                (TokenKind::Keyword, "enum") => contract.enums.push(self.enum_def()?),
                (TokenKind::Keyword, "using") => contract.using_for.push(self.using_for()?),
                _ => contract.state_variables.push(self.state_variable()?),
            }
        }
        contract.span = self.span_from(start);
        Ok(contract)
    }

    fn dotted_path(&mut self) -> PResult<String> {
        let (mut path, _) = self.expect_ident()?;
        while self.at(".") && self.peek_nth(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
            self.bump();
            path.push('.');
            path.push_str(&self.bump().lexeme);
        }
        Ok(path)
    }

    fn function(&mut self) -> PResult<FunctionDefinition> {
        let start = self.start();
        let head = self.bump();
        let (kind, name) = match head.lexeme.as_str() {
            "constructor" => (FunctionKind::Constructor, None),
            "fallback" => (FunctionKind::Fallback, None),
            "receive" => (FunctionKind::Receive, None),
            _ => {
                if self.at_kind(TokenKind::Identifier) {
                    (FunctionKind::Function, Some(self.bump().lexeme))
                } else if self.at("(") {
                    (FunctionKind::Fallback, None)
                } else {
                    return Err(self.error_here(&["function name", "("]));
                }
            }
        };
        let params = self.parameter_list(false)?;
        let mut func = FunctionDefinition {
            kind,
            name,
            params,
            returns: Vec::new(),
            visibility: None,
            state_mutability: None,
            modifiers: Vec::new(),
            body: None,
            span: self.span_from(start),
        };
        loop {
            let Some(tok) = self.peek().cloned() else {
                return Err(self.error_here(&["{", ";"]));
            };
            if tok.kind == TokenKind::Keyword {
                if let Some(v) = Visibility::from_keyword(&tok.lexeme) {
                    self.bump();
                    func.visibility = Some(Keyword {
                        value: v,
                        span: tok.span,
                    });
                    continue;
                }
                if let Some(m) = StateMutability::from_keyword(&tok.lexeme) {
                    self.bump();
                    func.state_mutability = Some(Keyword {
                        value: m,
                        span: tok.span,
                    });
                    continue;
                }
                match tok.lexeme.as_str() {
                    "returns" => {
                        self.bump();
                        func.returns = self.parameter_list(false)?;
                        continue;
                    }
                    "virtual" => {
                        self.bump();
                        continue;
                    }
                    "override" => {
                        self.bump();
                        if self.at("(") {
                            self.skip_balanced("(", ")")?;
                        }
                        continue;
                    }
                    _ => {}
                }
            }
            if tok.kind == TokenKind::Identifier {
                let inv_start = self.start();
                let name = self.dotted_path()?;
                let arguments = if self.at("(") {
                    self.call_arguments()?.0
                } else {
                    Vec::new()
                };
                func.modifiers.push(ModifierInvocation {
                    name,
                    arguments,
                    span: self.span_from(inv_start),
                });
                continue;
            }
            break;
        }
        if self.eat(";").is_none() {
            if !self.at("{") {
                return Err(self.error_here(&["{", ";", "function attribute"]));
            }
            func.body = Some(self.block()?);
        }
        func.span = self.span_from(start);
        Ok(func)
    }

    fn modifier(&mut self) -> PResult<ModifierDefinition> {
        let start = self.start();
        self.expect("modifier")?;
        let (name, _) = self.expect_ident()?;
        let params = if self.at("(") {
            self.parameter_list(false)?
        } else {
            Vec::new()
        };
        while self.eat("virtual").is_some() || self.eat("override").is_some() {}
        let body_span = if self.eat(";").is_some() {
            None
        } else {
            let body_start = self.start();
            self.skip_balanced("{", "}")?;
            Some(self.span_from(body_start))
        };
        Ok(ModifierDefinition {
            name,
            params,
            body_span,
            span: self.span_from(start),
        })
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect(open)?;
        let mut depth = 1usize;
        while depth > 0 {
            match self.peek() {
                None => return Err(self.error_here(&[close])),
                Some(t) if t.kind == TokenKind::Punctuation && t.lexeme == open => depth += 1,
                Some(t) if t.kind == TokenKind::Punctuation && t.lexeme == close => depth -= 1,
                _ => {}
            }
            self.bump();
        }
        Ok(())
    }

    fn event(&mut self) -> PResult<EventDefinition> {
        let start = self.start();
        self.expect("event")?;
        let (name, _) = self.expect_ident()?;
        let params = self.parameter_list(true)?;
        let anonymous = self.eat("anonymous").is_some();
        self.expect(";")?;
        Ok(EventDefinition {
            name,
            params,
            anonymous,
            span: self.span_from(start),
        })
    }

    fn struct_def(&mut self) -> PResult<StructDefinition> {
        let start = self.start();
        self.expect("struct")?;
        let (name, _) = self.expect_ident()?;
        self.expect("{")?;
        let mut members = Vec::new();
        while self.eat("}").is_none() {
            let m_start = self.start();
            let type_name = self.type_name()?;
            let (member, _) = self.expect_ident()?;
            self.expect(";")?;
            members.push(VariableDeclaration {
                type_name,
                data_location: None,
                name: Some(member),
                visibility: None,
                constant: false,
                indexed: false,
                initial_value: None,
                span: self.span_from(m_start),
            });
        }
        Ok(StructDefinition {
            name,
            members,
            span: self.span_from(start),
        })
    }

    fn enum_def(&mut self) -> PResult<EnumDefinition> {
        let start = self.start();
        self.expect("enum")?;
        let (name, _) = self.expect_ident()?;
        self.expect("{")?;
        let mut values = Vec::new();
        while self.eat("}").is_none() {
            values.push(self.expect_ident()?.0);
            if self.eat(",").is_none() {
                self.expect("}")?;
                break;
            }
        }
        Ok(EnumDefinition {
            name,
            values,
            span: self.span_from(start),
        })
    }

    fn using_for(&mut self) -> PResult<UsingForDirective> {
        let start = self.start();
        self.expect("using")?;
        let library = self.dotted_path()?;
        self.expect("for")?;
        let target = if self.eat("*").is_some() {
            None
        } else {
            Some(self.type_name()?)
        };
        self.expect(";")?;
        Ok(UsingForDirective {
            library,
            target,
            span: self.span_from(start),
        })
    }

    fn state_variable(&mut self) -> PResult<VariableDeclaration> {
        let start = self.start();
        let type_name = self.type_name()?;
        let mut decl = VariableDeclaration {
            type_name,
            data_location: None,
            name: None,
            visibility: None,
            constant: false,
            indexed: false,
            initial_value: None,
            span: self.span_from(start),
        };
        loop {
            let Some(tok) = self.peek().cloned() else { break };
            if tok.kind != TokenKind::Keyword {
                break;
            }
            if let Some(v) = Visibility::from_keyword(&tok.lexeme) {
                self.bump();
                decl.visibility = Some(Keyword {
                    value: v,
                    span: tok.span,
                });
            } else if tok.lexeme == "constant" || tok.lexeme == "immutable" {
                self.bump();
                decl.constant = true;
            } else if tok.lexeme == "override" {
                self.bump();
            } else {
                break;
            }
        }
        decl.name = Some(self.expect_ident()?.0);
        if self.eat("=").is_some() {
            decl.initial_value = Some(self.expression()?);
        }
        self.expect(";")?;
        decl.span = self.span_from(start);
        Ok(decl)
    }

    /// `(T [location] [indexed] [name], ...)`
    fn parameter_list(&mut self, allow_indexed: bool) -> PResult<Vec<VariableDeclaration>> {
        self.expect("(")?;
        let mut params = Vec::new();
        if self.eat(")").is_some() {
            return Ok(params);
        }
        loop {
            let start = self.start();
            let type_name = self.type_name()?;
            let data_location = self.data_location();
            let indexed = allow_indexed && self.eat("indexed").is_some();
            let name = if self.at_kind(TokenKind::Identifier) {
                Some(self.bump().lexeme)
            } else {
                None
            };
            params.push(VariableDeclaration {
                type_name,
                data_location,
                name,
                visibility: None,
                constant: false,
                indexed,
                initial_value: None,
                span: self.span_from(start),
            });
            if self.eat(",").is_none() {
                break;
            }
        }
        self.expect(")")?;
        Ok(params)
    }

    fn data_location(&mut self) -> Option<Keyword<DataLocation>> {
        let tok = self.peek()?;
        if tok.kind != TokenKind::Keyword {
            return None;
        }
        let value = DataLocation::from_keyword(&tok.lexeme)?;
        let span = self.bump().span;
        Some(Keyword { value, span })
    }

    fn at_elementary_type(&self) -> bool {
        self.peek().is_some_and(|t| {
            t.kind == TokenKind::Keyword
                && (matches!(
                    t.lexeme.as_str(),
                    "address" | "bool" | "string" | "bytes" | "byte" | "int" | "uint" | "fixed" | "ufixed"
                ) || is_sized_elementary(&t.lexeme))
        })
    }

    fn type_name(&mut self) -> PResult<TypeName> {
        let start = self.start();
        let mut ty = if self.at("mapping") {
            self.bump();
            self.expect("(")?;
            let key = self.type_name()?;
            self.expect("=>")?;
            let value = self.type_name()?;
            self.expect(")")?;
            TypeName::Mapping {
                key: Box::new(key),
                value: Box::new(value),
                span: self.span_from(start),
            }
        } else if self.at_elementary_type() {
            let tok = self.bump();
            let payable = tok.lexeme == "address" && self.eat("payable").is_some();
            TypeName::Elementary {
                name: tok.lexeme,
                payable,
                span: tok.span,
            }
        } else if self.at_kind(TokenKind::Identifier) {
            let path = self.dotted_path()?;
            TypeName::UserDefined {
                path,
                span: self.span_from(start),
            }
        } else if self.at("function") {
            return Err(self.unsupported("function type"));
        } else if self.at("var") {
            return Err(self.unsupported("`var` declaration"));
        } else {
            return Err(self.error_here(&["type name"]));
        };
        while self.at("[") {
            // A fixed length is a literal or constant name; anything else is
            // an index expression and the caller backtracks.
            let length = match (self.peek_nth(1), self.peek_nth(2)) {
                (Some(t), _) if t.lexeme == "]" => None,
                (Some(t), Some(close))
                    if close.lexeme == "]"
                        && matches!(t.kind, TokenKind::NumberLiteral | TokenKind::Identifier) =>
                {
                    Some(t.lexeme.clone())
                }
                _ => return Err(self.error_here(&["array length"])),
            };
            self.bump();
            if length.is_some() {
                self.bump();
            }
            self.expect("]")?;
            ty = TypeName::Array {
                base: Box::new(ty),
                length,
                span: self.span_from(start),
            };
        }
        Ok(ty)
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<Statement> {
        let start = self.start();
        self.expect("{")?;
        let mut statements = Vec::new();
        while self.eat("}").is_none() {
            if self.peek().is_none() {
                return Err(self.error_here(&["}"]));
            }
            statements.push(self.statement()?);
        }
        Ok(Statement {
            kind: StatementKind::Block { statements },
            span: self.span_from(start),
        })
    }

    fn statement(&mut self) -> PResult<Statement> {
        let start = self.start();
        let tok = self.peek().cloned().ok_or_else(|| self.error_here(&["statement"]))?;
        let kind = match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Punctuation, "{") => return self.block(),
            (TokenKind::Keyword, "if") => {
                self.bump();
                self.expect("(")?;
                let condition = self.expression()?;
                self.expect(")")?;
                let then_branch = Box::new(self.statement()?);
                let else_branch = if self.eat("else").is_some() {
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                StatementKind::If {
                    condition,
                    then_branch,
                    else_branch,
                }
            }
            (TokenKind::Keyword, "for") => {
                self.bump();
                self.expect("(")?;
                let init = if self.eat(";").is_some() {
                    None
                } else {
                    Some(Box::new(self.simple_statement()?))
                };
                let condition = if self.at(";") { None } else { Some(self.expression()?) };
                self.expect(";")?;
                let update = if self.at(")") { None } else { Some(self.expression()?) };
                self.expect(")")?;
                let body = Box::new(self.statement()?);
                StatementKind::For {
                    init,
                    condition,
                    update,
                    body,
                }
            }
            (TokenKind::Keyword, "while") => {
                self.bump();
                self.expect("(")?;
                let condition = self.expression()?;
                self.expect(")")?;
                let body = Box::new(self.statement()?);
                StatementKind::While { condition, body }
            }
            (TokenKind::Keyword, "return") => {
                self.bump();
                let expression = if self.at(";") { None } else { Some(self.expression()?) };
                self.expect(";")?;
                StatementKind::Return { expression }
            }
            (TokenKind::Keyword, "emit") => {
                self.bump();
                let call = self.expression()?;
                if !matches!(call.kind, ExpressionKind::FunctionCall { .. }) {
                    return Err(ParseError {
                        line: call.span.start_line,
                        col: call.span.start_col,
                        expected: vec!["event invocation".into()],
                        found: format!("{:?}", call.span.text(self.src)),
                    });
                }
                self.expect(";")?;
                StatementKind::Emit { call }
            }
            (TokenKind::Keyword, "break") => {
                self.bump();
                self.expect(";")?;
                StatementKind::Break
            }
            (TokenKind::Keyword, "continue") => {
                self.bump();
                self.expect(";")?;
                StatementKind::Continue
            }
            (TokenKind::Keyword, "delete") => {
                self.bump();
                let target = self.expression()?;
                self.expect(";")?;
                StatementKind::Delete { target }
            }
            (TokenKind::Keyword, "assembly") => return Err(self.unsupported("inline assembly")),
            (TokenKind::Keyword, "do") => return Err(self.unsupported("do-while")),
            (TokenKind::Keyword, "throw") => return Err(self.unsupported("`throw`")),
            (TokenKind::Keyword, "try") => return Err(self.unsupported("try/catch")),
            _ => return self.simple_statement(),
        };
        Ok(Statement {
            kind,
            span: self.span_from(start),
        })
    }

    /// Variable declaration or expression statement, including the `;`.
    fn simple_statement(&mut self) -> PResult<Statement> {
        let start = self.start();
        let saved = self.pos;
        if let Some(kind) = self.try_declaration()? {
            return Ok(Statement {
                kind,
                span: self.span_from(start),
            });
        }
        self.pos = saved;
        let expression = self.expression()?;
        self.expect(";")?;
        Ok(Statement {
            kind: StatementKind::Expression { expression },
            span: self.span_from(start),
        })
    }

    /// Speculatively parse a declaration head; `Ok(None)` means "not a
    /// declaration" and the caller rewinds.
    fn try_declaration(&mut self) -> PResult<Option<StatementKind>> {
        let saved = self.pos;
        let declarations = if self.at("(") {
            match self.tuple_declaration_head() {
                Some(decls) => decls,
                None => {
                    self.pos = saved;
                    return Ok(None);
                }
            }
        } else {
            match self.single_declaration_head() {
                Some(decl) => vec![Some(decl)],
                None => {
                    self.pos = saved;
                    return Ok(None);
                }
            }
        };
        let initial_value = if self.eat("=").is_some() {
            Some(self.expression()?)
        } else {
            None
        };
        self.expect(";")?;
        Ok(Some(StatementKind::VariableDeclaration {
            declarations,
            initial_value,
        }))
    }

    fn single_declaration_head(&mut self) -> Option<VariableDeclaration> {
        let start = self.start();
        let type_name = self.type_name().ok()?;
        let data_location = self.data_location();
        if !self.at_kind(TokenKind::Identifier) {
            return None;
        }
        let name = self.bump().lexeme;
        if !(self.at("=") || self.at(";")) {
            return None;
        }
        Some(VariableDeclaration {
            type_name,
            data_location,
            name: Some(name),
            visibility: None,
            constant: false,
            indexed: false,
            initial_value: None,
            span: self.span_from(start),
        })
    }

    fn tuple_declaration_head(&mut self) -> Option<Vec<Option<VariableDeclaration>>> {
        self.eat("(")?;
        let mut decls = Vec::new();
        loop {
            if self.at(",") || self.at(")") {
                decls.push(None);
            } else {
                let start = self.start();
                let type_name = self.type_name().ok()?;
                let data_location = self.data_location();
                if !self.at_kind(TokenKind::Identifier) {
                    return None;
                }
                let name = self.bump().lexeme;
                decls.push(Some(VariableDeclaration {
                    type_name,
                    data_location,
                    name: Some(name),
                    visibility: None,
                    constant: false,
                    indexed: false,
                    initial_value: None,
                    span: self.span_from(start),
                }));
            }
            if self.eat(",").is_none() {
                break;
            }
        }
        self.eat(")")?;
        if decls.iter().all(Option::is_none) || !self.at("=") {
            return None;
        }
        Some(decls)
    }

    // ---- expressions ----

    fn expression(&mut self) -> PResult<Expression> {
        let start = self.start();
        let left = self.conditional()?;
        if let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Operator && ASSIGNMENT_OPS.contains(&tok.lexeme.as_str()) {
                let op_tok = self.bump();
                let right = self.expression()?;
                return Ok(Expression {
                    kind: ExpressionKind::Assignment {
                        op: op_tok.lexeme,
                        left: Box::new(left),
                        right: Box::new(right),
                    },
                    operator_span: Some(op_tok.span),
                    span: self.span_from(start),
                });
            }
        }
        Ok(left)
    }

    fn conditional(&mut self) -> PResult<Expression> {
        let start = self.start();
        let condition = self.binary(1)?;
        if self.eat("?").is_none() {
            return Ok(condition);
        }
        let if_true = self.expression()?;
        self.expect(":")?;
        let if_false = self.expression()?;
        Ok(Expression {
            kind: ExpressionKind::Conditional {
                condition: Box::new(condition),
                if_true: Box::new(if_true),
                if_false: Box::new(if_false),
            },
            operator_span: None,
            span: self.span_from(start),
        })
    }

    fn peek_binary_op(&self) -> Option<BinaryOp> {
        let tok = self.peek()?;
        if tok.kind != TokenKind::Operator {
            return None;
        }
        BinaryOp::from_lexeme(&tok.lexeme)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expression> {
        let start = self.start();
        let mut left = self.unary()?;
        while let Some(op) = self.peek_binary_op() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            let op_tok = self.bump();
            // `**` is right-associative.
            let next_min = if op == BinaryOp::Pow { prec } else { prec + 1 };
            let right = self.binary(next_min)?;
            left = Expression {
                kind: ExpressionKind::Binary {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                },
                operator_span: Some(op_tok.span),
                span: self.span_from(start),
            };
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expression> {
        let start = self.start();
        let op = match self.peek() {
            Some(t) if t.kind == TokenKind::Operator => match t.lexeme.as_str() {
                "++" => Some(UnaryOp::Increment),
                "--" => Some(UnaryOp::Decrement),
                "-" => Some(UnaryOp::Negate),
                "+" => Some(UnaryOp::Plus),
                "!" => Some(UnaryOp::Not),
                "~" => Some(UnaryOp::BitNot),
                _ => None,
            },
            Some(t) if t.is(TokenKind::Keyword, "delete") => Some(UnaryOp::Delete),
            _ => None,
        };
        if let Some(op) = op {
            let op_tok = self.bump();
            let operand = self.unary()?;
            return Ok(Expression {
                kind: ExpressionKind::Unary {
                    op,
                    prefix: true,
                    operand: Box::new(operand),
                },
                operator_span: Some(op_tok.span),
                span: self.span_from(start),
            });
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expression> {
        let start = self.start();
        let mut expr = self.primary()?;
        loop {
            if self.at(".") {
                self.bump();
                let tok = self.peek().cloned().ok_or_else(|| self.error_here(&["member name"]))?;
                if !matches!(tok.kind, TokenKind::Identifier | TokenKind::Keyword | TokenKind::UnitSuffix) {
                    return Err(self.error_here(&["member name"]));
                }
                self.bump();
                let path = match &expr.kind {
                    ExpressionKind::Identifier { name } => Some(format!("{name}.{}", tok.lexeme)),
                    ExpressionKind::MemberAccess { path: Some(p), .. } => Some(format!("{p}.{}", tok.lexeme)),
                    _ => None,
                };
                expr = Expression {
                    kind: ExpressionKind::MemberAccess {
                        object: Box::new(expr),
                        member: tok.lexeme,
                        path,
                    },
                    operator_span: None,
                    span: self.span_from(start),
                };
            } else if self.at("[") {
                self.bump();
                let index = if self.at("]") {
                    None
                } else {
                    Some(Box::new(self.expression()?))
                };
                self.expect("]")?;
                expr = Expression {
                    kind: ExpressionKind::IndexAccess {
                        base: Box::new(expr),
                        index,
                    },
                    operator_span: None,
                    span: self.span_from(start),
                };
            } else if self.at("(") {
                let (arguments, names) = self.call_arguments()?;
                expr = Expression {
                    kind: ExpressionKind::FunctionCall {
                        callee: Box::new(expr),
                        arguments,
                        names,
                    },
                    operator_span: None,
                    span: self.span_from(start),
                };
            } else if self.at("++") || self.at("--") {
                let op_tok = self.bump();
                let op = if op_tok.lexeme == "++" {
                    UnaryOp::Increment
                } else {
                    UnaryOp::Decrement
                };
                expr = Expression {
                    kind: ExpressionKind::Unary {
                        op,
                        prefix: false,
                        operand: Box::new(expr),
                    },
                    operator_span: Some(op_tok.span),
                    span: self.span_from(start),
                };
            } else {
                break;
            }
        }
        Ok(expr)
    }

    /// `(a, b)` or `({x: a, y: b})`
    fn call_arguments(&mut self) -> PResult<(Vec<Expression>, Vec<String>)> {
        self.expect("(")?;
        let mut args = Vec::new();
        let mut names = Vec::new();
        if self.eat(")").is_some() {
            return Ok((args, names));
        }
        if self.eat("{").is_some() {
            while self.eat("}").is_none() {
                names.push(self.expect_ident()?.0);
                self.expect(":")?;
                args.push(self.expression()?);
                if self.eat(",").is_none() {
                    self.expect("}")?;
                    break;
                }
            }
            self.expect(")")?;
            return Ok((args, names));
        }
        loop {
            args.push(self.expression()?);
            if self.eat(",").is_none() {
                break;
            }
        }
        self.expect(")")?;
        Ok((args, names))
    }

    fn primary(&mut self) -> PResult<Expression> {
        let start = self.start();
        let tok = self.peek().cloned().ok_or_else(|| self.error_here(&["expression"]))?;
        let kind = match tok.kind {
            TokenKind::NumberLiteral => {
                self.bump();
                let unit = if self.at_kind(TokenKind::UnitSuffix) {
                    let u = self.bump();
                    Some(UnitSuffix {
                        unit: u.lexeme,
                        span: u.span,
                    })
                } else {
                    None
                };
                ExpressionKind::NumberLiteral {
                    value: tok.lexeme,
                    unit,
                }
            }
            TokenKind::StringLiteral => {
                let mut value = String::new();
                while self.at_kind(TokenKind::StringLiteral) {
                    value.push_str(&self.bump().lexeme);
                }
                ExpressionKind::StringLiteral { value }
            }
            TokenKind::Identifier => {
                self.bump();
                ExpressionKind::Identifier { name: tok.lexeme }
            }
            TokenKind::Keyword => match tok.lexeme.as_str() {
                "true" | "false" => {
                    self.bump();
                    ExpressionKind::BoolLiteral {
                        value: tok.lexeme == "true",
                    }
                }
                "new" => {
                    self.bump();
                    let type_name = self.type_name()?;
                    ExpressionKind::New { type_name }
                }
                "payable" if self.peek_nth(1).is_some_and(|t| t.lexeme == "(") => {
                    self.bump();
                    ExpressionKind::ElementaryTypeName { name: tok.lexeme }
                }
                _ if self.at_elementary_type() => {
                    self.bump();
                    ExpressionKind::ElementaryTypeName { name: tok.lexeme }
                }
                _ => return Err(self.error_here(&["expression"])),
            },
            TokenKind::Punctuation if tok.lexeme == "(" || tok.lexeme == "[" => {
                let is_array = tok.lexeme == "[";
                let close = if is_array { "]" } else { ")" };
                self.bump();
                let mut elements = Vec::new();
                loop {
                    if self.at(",") || self.at(close) {
                        elements.push(None);
                    } else {
                        elements.push(Some(self.expression()?));
                    }
                    if self.eat(",").is_none() {
                        break;
                    }
                }
                self.expect(close)?;
                match (is_array, elements.len()) {
                    (false, 1) if elements[0].is_some() => ExpressionKind::Parenthesized {
                        inner: Box::new(elements.pop().flatten().expect("checked")),
                    },
                    _ => ExpressionKind::Tuple { elements, is_array },
                }
            }
            _ => return Err(self.error_here(&["expression"])),
        };
        Ok(Expression {
            kind,
            operator_span: None,
            span: self.span_from(start),
        })
    }
}
