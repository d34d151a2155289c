//! Brute-force point counters, written without reference to the operator
//! implementations. Token-scan oracles run on a standalone scanner; AST-walk
//! oracles use only the public preorder trace and source text.

#![allow(dead_code)]

use solmut::frontend::{parse, traverse, TraceEntry};
use solmut::operators::Operator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Ident,
    Number,
    Str,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tok {
    pub kind: Kind,
    pub text: String,
    pub start: usize,
    pub end: usize,
}

const PUNCT: [&str; 47] = [
    ">>>=", ">>>", "<<=", ">>=", "**", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "<<", ">>", "=>", "->", "(", ")", "[", "]", "{", "}", ";", ",", ".", "?", ":", "=",
    "+", "-", "*", "/", "%", "!", "~", "&", "|", "^",
];
const LT_GT: [&str; 2] = ["<", ">"];

/// Comments and whitespace are dropped; everything else becomes a token.
pub fn scan(src: &str) -> Vec<Tok> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            i = src[i..].find('\n').map_or(b.len(), |n| i + n);
            continue;
        }
        if src[i..].starts_with("/*") {
            i = src[i + 2..].find("*/").map_or(b.len(), |n| i + 2 + n + 2);
            continue;
        }
        let kind = if c == b'"' || c == b'\'' {
            i += 1;
            while i < b.len() && b[i] != c {
                i += if b[i] == b'\\' { 2 } else { 1 };
            }
            i += 1;
            Kind::Str
        } else if c.is_ascii_digit() || (c == b'.' && b.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'.') {
                // a second dot ends the number
                if b[i] == b'.' && src[start..i].contains('.') {
                    break;
                }
                i += 1;
            }
            Kind::Number
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$') {
                i += 1;
            }
            Kind::Ident
        } else {
            let p = PUNCT
                .iter()
                .chain(LT_GT.iter())
                .find(|p| src[i..].starts_with(**p))
                .unwrap_or_else(|| panic!("unexpected character at byte {i}"));
            i += p.len();
            Kind::Punct
        };
        out.push(Tok {
            kind,
            text: src[start..i].to_string(),
            start,
            end: i,
        });
    }
    out
}

/// Tokens the operators can reach: pragma and import directives and
/// modifier bodies are removed.
pub fn reachable(src: &str) -> Vec<Tok> {
    let toks = scan(src);
    let mut out = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        match toks[i].text.as_str() {
            "pragma" | "import" => {
                while i < toks.len() && toks[i].text != ";" {
                    i += 1;
                }
                i += 1;
            }
            "modifier" => {
                while i < toks.len() && toks[i].text != "{" {
                    out.push(toks[i].clone());
                    i += 1;
                }
                let mut depth = 0;
                while i < toks.len() {
                    match toks[i].text.as_str() {
                        "{" => depth += 1,
                        "}" => depth -= 1,
                        _ => {}
                    }
                    i += 1;
                    if depth == 0 {
                        break;
                    }
                }
            }
            _ => {
                out.push(toks[i].clone());
                i += 1;
            }
        }
    }
    out
}

fn t(toks: &[Tok], i: usize) -> &str {
    toks.get(i).map_or("", |t| t.text.as_str())
}

const NOT_OPERAND: [&str; 6] = ["return", "else", "delete", "new", "emit", "do"];

fn ends_operand(tok: &Tok) -> bool {
    match tok.kind {
        Kind::Ident => !NOT_OPERAND.contains(&tok.text.as_str()),
        Kind::Number | Kind::Str => true,
        Kind::Punct => tok.text == ")" || tok.text == "]",
    }
}

fn is_binary(toks: &[Tok], i: usize) -> bool {
    i > 0 && ends_operand(&toks[i - 1])
}

fn punct_in(toks: &[Tok], i: usize, set: &[&str]) -> bool {
    toks[i].kind == Kind::Punct && set.contains(&t(toks, i))
}

fn count_where(toks: &[Tok], f: impl Fn(&[Tok], usize) -> bool) -> usize {
    (0..toks.len()).filter(|&i| f(toks, i)).count()
}

/// Index ranges `[start, end)` of function and constructor headers.
fn function_headers(toks: &[Tok]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, tok) in toks.iter().enumerate() {
        if tok.text == "function" || tok.text == "constructor" {
            let end = (i..toks.len()).find(|&j| toks[j].text == "{" || toks[j].text == ";").unwrap_or(toks.len());
            out.push((i, end));
        }
    }
    out
}

fn in_header(headers: &[(usize, usize)], i: usize) -> bool {
    headers.iter().any(|(s, e)| (*s..*e).contains(&i))
}

fn is_type_keyword(s: &str) -> bool {
    let digits_ok = |rest: &str| rest.is_empty() || rest.chars().all(|c| c.is_ascii_digit());
    s.strip_prefix("uint").is_some_and(digits_ok)
        || s.strip_prefix("int").is_some_and(digits_ok)
        || s.strip_prefix("bytes").is_some_and(|r| !r.is_empty() && digits_ok(r))
}

/// Independent restatement of the type-replacement rules.
fn vtr_alternatives(kw: &str) -> usize {
    if let Some(w) = kw.strip_prefix("uint") {
        1 + usize::from(w.is_empty() || w.parse::<u32>().unwrap() > 8)
    } else if kw.starts_with("int") {
        1
    } else {
        let w: u32 = kw["bytes".len()..].parse().unwrap();
        usize::from(w > 8)
    }
}

const ASSIGN_OPS: [&str; 9] = ["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^="];
const VALUE_MEMBERS: [(&str, &str); 5] = [
    ("block", "timestamp"),
    ("block", "number"),
    ("block", "difficulty"),
    ("block", "gaslimit"),
    ("msg", "value"),
];
const ADDRESS_MEMBERS: [(&str, &str); 3] = [("msg", "sender"), ("tx", "origin"), ("block", "coinbase")];
const ETHER: [&str; 4] = ["wei", "szabo", "finney", "ether"];
const TIME: [&str; 5] = ["seconds", "minutes", "hours", "days", "weeks"];

fn member_at(toks: &[Tok], i: usize, table: &[(&str, &str)]) -> bool {
    (i == 0 || t(toks, i - 1) != ".")
        && t(toks, i + 1) == "."
        && table.iter().any(|(o, m)| t(toks, i) == *o && t(toks, i + 2) == *m)
}

fn statement_call(toks: &[Tok], i: usize, name: &str) -> bool {
    t(toks, i) == name && t(toks, i + 1) == "(" && (i == 0 || matches!(t(toks, i - 1), ";" | "{" | "}"))
}

/// Does the `for` at `i` have a condition clause?
fn for_has_condition(toks: &[Tok], i: usize) -> bool {
    let mut depth = 0;
    let mut semis = Vec::new();
    for j in i + 1..toks.len() {
        match t(toks, j) {
            "(" => depth += 1,
            ")" => {
                depth -= 1;
                if depth == 0 {
                    break;
                }
            }
            ";" if depth == 1 => semis.push(j),
            _ => {}
        }
    }
    semis.len() == 2 && semis[1] > semis[0] + 1
}

/// Point count for `op` on `src` (GVC with the seed disabled).
pub fn count(op: Operator, src: &str) -> usize {
    use Operator::*;
    let toks = reachable(src);
    let headers = function_headers(&toks);
    match op {
        Aorb => 4 * count_where(&toks, |tk, i| punct_in(tk, i, &["+", "-", "*", "/", "%"]) && is_binary(tk, i)),
        Aors => count_where(&toks, |tk, i| punct_in(tk, i, &["++", "--"])),
        Ror => 7 * count_where(&toks, |tk, i| punct_in(tk, i, &[">", ">=", "<", "<=", "==", "!="])),
        Cor => count_where(&toks, |tk, i| punct_in(tk, i, &["&&", "||"])),
        Lor => 2 * count_where(&toks, |tk, i| punct_in(tk, i, &["&", "|", "^"]) && is_binary(tk, i)),
        Asr => {
            4 * count_where(&toks, |tk, i| punct_in(tk, i, &["+=", "-=", "*=", "/=", "%="])) + 2 * count_where(&toks, |tk, i| punct_in(tk, i, &["&=", "|=", "^="]))
        }
        Csc => {
            2 * count_where(&toks, |tk, i| {
                matches!(t(tk, i), "if" | "while") || (t(tk, i) == "for" && for_has_condition(tk, i))
            })
        }
        Fsc => count_where(&toks, |tk, i| t(tk, i) == "view"),
        Fvc => {
            3 * count_where(&toks, |tk, i| {
                matches!(t(tk, i), "public" | "external" | "internal" | "private") && in_header(&headers, i)
            })
        }
        Dlr => count_where(&toks, |tk, i| matches!(t(tk, i), "storage" | "memory" | "calldata")),
        Vtr => (0..toks.len())
            .filter(|&i| is_type_keyword(t(&toks, i)) && t(&toks, i + 1) != "(" && (i == 0 || t(&toks, i - 1) != "new"))
            .map(|i| vtr_alternatives(t(&toks, i)))
            .sum(),
        Pkd => count_where(&toks, |tk, i| {
            t(tk, i) == "payable" && in_header(&headers, i) && t(tk, i.wrapping_sub(1)) != "address"
        }),
        Dkd => count_where(&toks, |tk, i| t(tk, i) == "delete"),
        Gvc => {
            2 * count_where(&toks, |tk, i| {
                let (hit, next) = if t(tk, i) == "now" && (i == 0 || t(tk, i - 1) != ".") {
                    (true, i + 1)
                } else if member_at(tk, i, &VALUE_MEMBERS) {
                    (true, i + 3)
                } else {
                    (false, 0)
                };
                hit && !ASSIGN_OPS.contains(&t(tk, next))
            })
        }
        Mfr => count_where(&toks, |tk, i| matches!(t(tk, i), "addmod" | "mulmod") && t(tk, i + 1) == "("),
        Avr => 2 * count_where(&toks, |tk, i| member_at(tk, i, &ADDRESS_MEMBERS)),
        Eur => 3 * count_where(&toks, |tk, i| tk[i].kind == Kind::Number && ETHER.contains(&t(tk, i + 1))),
        Tur => 4 * count_where(&toks, |tk, i| tk[i].kind == Kind::Number && TIME.contains(&t(tk, i + 1))),
        Rsd | Rsc => count_where(&toks, |tk, i| statement_call(tk, i, "require")),
        Asd | Asc => count_where(&toks, |tk, i| statement_call(tk, i, "assert")),
        Sdl => sdl_count(src),
        Rvr => rvr_count(src),
        Aoi => aoi_count(src),
    }
}

struct Tree<'s> {
    src: &'s str,
    trace: Vec<TraceEntry>,
}

impl<'s> Tree<'s> {
    fn new(src: &'s str) -> Self {
        let unit = parse(src).expect("fixture parses");
        Tree {
            src,
            trace: traverse(&unit),
        }
    }

    fn text(&self, e: &TraceEntry) -> &'s str {
        &self.src[e.span.start_byte..e.span.end_byte]
    }

    fn find(&self, path: &[usize]) -> Option<&TraceEntry> {
        self.trace.iter().find(|e| e.path == path)
    }

    fn parent(&self, e: &TraceEntry) -> Option<&TraceEntry> {
        e.path.split_last().and_then(|(_, p)| self.find(p))
    }

    fn children(&self, e: &TraceEntry) -> Vec<&TraceEntry> {
        self.trace
            .iter()
            .filter(|c| c.path.len() == e.path.len() + 1 && c.path.starts_with(&e.path))
            .collect()
    }

    fn function_of(&self, e: &TraceEntry) -> Option<&TraceEntry> {
        (0..e.path.len())
            .rev()
            .filter_map(|n| self.find(&e.path[..n]))
            .find(|a| a.kind == "FunctionDefinition")
    }

    fn contract_of(&self, e: &TraceEntry) -> Option<&TraceEntry> {
        (0..e.path.len())
            .rev()
            .filter_map(|n| self.find(&e.path[..n]))
            .find(|a| a.kind == "ContractDefinition")
    }

    /// Header tokens of a function: up to its body.
    fn header(&self, f: &TraceEntry) -> Vec<Tok> {
        let toks = scan(self.text(f));
        let end = toks.iter().position(|t| t.text == "{").unwrap_or(toks.len());
        toks[..end].to_vec()
    }

    fn within(&self, outer: &TraceEntry, e: &TraceEntry) -> bool {
        e.path.len() > outer.path.len() && e.path.starts_with(&outer.path)
    }
}

fn sdl_count(src: &str) -> usize {
    let tree = Tree::new(src);
    tree.trace
        .iter()
        .filter(|e| tree.parent(e).is_some_and(|p| p.kind == "Block"))
        .filter(|e| match e.kind {
            "ExpressionStatement" | "EmitStatement" | "DeleteStatement" | "Break" | "Continue" => true,
            "Return" => tree
                .function_of(e)
                .is_some_and(|f| !tree.header(f).iter().any(|t| t.text == "returns")),
            _ => false,
        })
        .count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Integer,
    Bool,
    Address,
    Other,
}

fn class_of_type(first: &str, is_array: bool) -> Class {
    if is_array {
        Class::Other
    } else if first.starts_with("uint") || first.starts_with("int") {
        Class::Integer
    } else if first == "bool" {
        Class::Bool
    } else if first == "address" {
        Class::Address
    } else {
        Class::Other
    }
}

/// Name and class of one variable declaration's source text.
fn declared(text: &str) -> Option<(String, Class)> {
    let toks = scan(text);
    let end = toks.iter().position(|t| t.text == "=").unwrap_or(toks.len());
    let toks = &toks[..end];
    let name = toks.last().filter(|t| t.kind == Kind::Ident)?;
    if toks.len() < 2 {
        return None;
    }
    let is_array = toks.iter().any(|t| t.text == "[");
    Some((name.text.clone(), class_of_type(&toks[0].text, is_array)))
}

/// Classes of names visible in the function containing `e`; function-level
/// declarations shadow state variables.
fn lookup(tree: &Tree<'_>, e: &TraceEntry, name: &str) -> Option<Class> {
    let func = tree.function_of(e)?;
    let local = tree
        .trace
        .iter()
        .filter(|d| d.kind == "VariableDeclaration" && tree.within(func, d))
        .filter_map(|d| declared(tree.text(d)))
        .find(|(n, _)| n == name);
    if let Some((_, c)) = local {
        return Some(c);
    }
    let contract = tree.contract_of(e)?;
    tree.trace
        .iter()
        .filter(|d| d.kind == "VariableDeclaration" && tree.parent(d).map(|p| &p.path) == Some(&contract.path))
        .filter_map(|d| declared(tree.text(d)))
        .find(|(n, _)| n == name)
        .map(|(_, c)| c)
}

fn binary_operator<'s>(tree: &Tree<'s>, e: &TraceEntry) -> &'s str {
    let kids = tree.children(e);
    tree.src[kids[0].span.end_byte..kids[1].span.start_byte].trim()
}

fn aoi_count(src: &str) -> usize {
    let tree = Tree::new(src);
    let arithmetic_or_relational = ["+", "-", "*", "/", "%", "**", "<", "<=", ">", ">=", "==", "!="];
    let sites = tree
        .trace
        .iter()
        .filter(|e| e.kind == "Identifier" && tree.function_of(e).is_some())
        .filter(|e| match tree.parent(e) {
            Some(p) if p.kind == "BinaryOperation" => arithmetic_or_relational.contains(&binary_operator(&tree, p)),
            Some(p) if p.kind == "Assignment" => e.path.last() == Some(&1),
            Some(p) => p.kind == "Return" || p.kind == "VariableDeclarationStatement",
            None => false,
        })
        .filter(|e| lookup(&tree, e, tree.text(e)) == Some(Class::Integer))
        .count();
    3 * sites
}

fn rvr_count(src: &str) -> usize {
    let tree = Tree::new(src);
    let mut total = 0;
    for ret in tree.trace.iter().filter(|e| e.kind == "Return") {
        let Some(expr) = tree.children(ret).into_iter().next() else {
            continue;
        };
        let text = tree.text(expr);
        let func = tree.function_of(ret).expect("return inside a function");
        let header = tree.header(func);
        let declared_class = header.iter().position(|t| t.text == "returns").and_then(|r| {
            let list = &header[r + 2..header.len() - 1];
            let single = !list.iter().any(|t| t.text == ",");
            single.then(|| class_of_type(&list[0].text, list.iter().any(|t| t.text == "[")))
        });
        let class = match declared_class {
            Some(c @ (Class::Integer | Class::Bool | Class::Address)) => c,
            _ => match expr.kind {
                "NumberLiteral" => Class::Integer,
                "BoolLiteral" => Class::Bool,
                "Identifier" if text == "now" => Class::Integer,
                "Identifier" => lookup(&tree, expr, text).unwrap_or(Class::Other),
                "MemberAccess" if ["msg.sender", "tx.origin", "block.coinbase"].contains(&text) => Class::Address,
                "MemberAccess" if VALUE_MEMBERS.iter().any(|(o, m)| text == format!("{o}.{m}")) => Class::Integer,
                _ => Class::Other,
            },
        };
        let alternatives: &[&str] = match class {
            Class::Integer => &["0", "1"],
            Class::Bool => &["true", "false"],
            Class::Address => &["address(0)"],
            Class::Other => &["0"],
        };
        total += alternatives.iter().filter(|a| **a != text).count();
    }
    total
}
