//! Lexer and parser behaviour on the fixture corpus and generated inputs.

mod common;

use proptest::prelude::*;
use solmut::frontend::{node_count, parse, tokenize, traverse, SyntaxError, TraceEntry};

#[test]
fn lexer_is_lossless_on_corpus() {
    for (path, src) in common::corpus() {
        let toks = tokenize(&src).unwrap();
        let joined: String = toks.iter().map(|t| t.lexeme.as_str()).collect();
        assert_eq!(joined, src, "{path}");
        for t in &toks {
            assert_eq!(t.span.text(&src), t.lexeme, "{path}");
        }
    }
}

#[test]
fn lexer_token_count_matches_scanner_oracle() {
    let src = common::fixture("airswap_like.sol");
    let significant = tokenize(&src).unwrap().iter().filter(|t| !t.is_trivia()).count();
    assert_eq!(significant, 526);
    for (path, src) in common::corpus() {
        let significant = tokenize(&src).unwrap().iter().filter(|t| !t.is_trivia()).count();
        assert_eq!(significant, common::oracle::scan(&src).len(), "{path}");
    }
}

/// Preorder node counts. The twelve single-example files were enumerated by
/// hand node by node; the larger ones are frozen regression values.
const NODE_COUNTS: [(&str, usize); 16] = [
    ("airswap_like.sol", 273),
    ("bitwise.sol", 26),
    ("empty.sol", 1),
    ("loop_counter.sol", 75),
    ("worked/avr.sol", 20),
    ("worked/dkd.sol", 13),
    ("worked/dlr.sol", 20),
    ("worked/eur.sol", 15),
    ("worked/fsc.sol", 15),
    ("worked/fvc.sol", 15),
    ("worked/gvc.sol", 8),
    ("worked/mfr.sol", 15),
    ("worked/pkd.sol", 14),
    ("worked/rsd.sol", 45),
    ("worked/tur.sol", 17),
    ("worked/vtr.sol", 25),
];

#[test]
fn corpus_parses_with_recorded_node_counts() {
    let corpus = common::corpus();
    assert_eq!(corpus.len(), NODE_COUNTS.len());
    for ((path, src), (want_path, want)) in corpus.iter().zip(NODE_COUNTS) {
        assert_eq!(path, want_path);
        let unit = parse(src).unwrap_or_else(|e| panic!("{path}: {e}"));
        assert_eq!(node_count(&unit), want, "{path}");
        assert_eq!(traverse(&unit).len(), want, "{path}");
    }
}

#[test]
fn view_function_fixture_has_one_function() {
    let unit = parse(&common::fixture("worked/fsc.sol")).unwrap();
    let trace = traverse(&unit);
    assert_eq!(trace.iter().filter(|e| e.kind == "FunctionDefinition").count(), 1);
}

#[test]
fn empty_source_has_no_contracts() {
    let unit = parse("").unwrap();
    assert!(unit.contracts.is_empty());
    assert_eq!(node_count(&unit), 1);
}

fn assert_spans_nest(src: &str, trace: &[TraceEntry]) {
    for e in trace {
        assert!(e.span.start_byte <= e.span.end_byte && e.span.end_byte <= src.len());
        if let Some((_, parent_path)) = e.path.split_last() {
            let parent = trace.iter().find(|p| p.path == parent_path).unwrap();
            assert!(parent.span.contains(&e.span), "{} not inside {}", e.kind, parent.kind);
        }
    }
}

#[test]
fn spans_nest_on_corpus() {
    for (_, src) in common::corpus() {
        let unit = parse(&src).unwrap();
        assert_spans_nest(&src, &traverse(&unit));
    }
}

#[test]
fn errors_carry_positions() {
    let err = parse("contract C {\n  function f() {\n    x = ;\n  }\n}").unwrap_err();
    assert!(matches!(err, SyntaxError::Parse(_)));
    assert_eq!((err.line(), err.col()), (3, 9));

    let err = parse("contract C { string s = \"open; }").unwrap_err();
    assert!(matches!(err, SyntaxError::Lex(_)));
    assert_eq!(err.line(), 1);
}

#[test]
fn unsupported_constructs_are_rejected() {
    for body in [
        "function f() { assembly { } }",
        "function f() { do { } while (true); }",
        "function f() { throw; }",
    ] {
        let src = format!("contract C {{ {body} }}");
        assert!(parse(&src).is_err(), "{body}");
    }
}

/// Fully parenthesized rendering of an expression subtree.
fn render(src: &str, trace: &[TraceEntry], e: &TraceEntry) -> String {
    let kids: Vec<&TraceEntry> = trace
        .iter()
        .filter(|c| c.path.len() == e.path.len() + 1 && c.path.starts_with(&e.path))
        .collect();
    match e.kind {
        "BinaryOperation" => {
            let op = src[kids[0].span.end_byte..kids[1].span.start_byte].trim();
            format!("({} {op} {})", render(src, trace, kids[0]), render(src, trace, kids[1]))
        }
        "UnaryOperation" => {
            let op = src[e.span.start_byte..kids[0].span.start_byte].trim();
            format!("({op}{})", render(src, trace, kids[0]))
        }
        "Parenthesized" => render(src, trace, kids[0]),
        _ => e.span.text(src).to_string(),
    }
}

/// Binding strength for generated expressions, highest binds tightest.
fn strength(op: &str) -> u8 {
    match op {
        "||" => 1,
        "&&" => 2,
        "==" | "!=" => 3,
        "<" | ">" | "<=" | ">=" => 4,
        "|" => 5,
        "^" => 6,
        "&" => 7,
        "<<" | ">>" => 8,
        "+" | "-" => 9,
        "*" | "/" | "%" => 10,
        "**" => 11,
        _ => unreachable!(),
    }
}

#[derive(Debug, Clone)]
enum Gen {
    Leaf(String),
    Neg(Box<Gen>),
    Bin(&'static str, Box<Gen>, Box<Gen>),
}

const OPS: [&str; 19] = [
    "||", "&&", "==", "!=", "<", ">", "<=", ">=", "|", "^", "&", "<<", ">>", "+", "-", "*", "/", "%", "**",
];

fn gen_expr() -> impl Strategy<Value = Gen> {
    let leaf = prop_oneof![
        "[a-e]".prop_map(Gen::Leaf),
        (0u32..100).prop_map(|n| Gen::Leaf(n.to_string())),
    ];
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|g| Gen::Neg(Box::new(g))),
            (0..OPS.len(), inner.clone(), inner).prop_map(|(i, l, r)| Gen::Bin(OPS[i], Box::new(l), Box::new(r))),
        ]
    })
}

impl Gen {
    fn expected(&self) -> String {
        match self {
            Gen::Leaf(s) => s.clone(),
            Gen::Neg(g) => format!("(-{})", g.expected()),
            Gen::Bin(op, l, r) => format!("({} {op} {})", l.expected(), r.expected()),
        }
    }

    /// Source text with only the parentheses precedence requires.
    fn minimal(&self) -> String {
        match self {
            Gen::Leaf(s) => s.clone(),
            Gen::Neg(g) => match **g {
                // `--` would lex as a decrement
                Gen::Bin(..) | Gen::Neg(_) => format!("-({})", g.minimal()),
                _ => format!("-{}", g.minimal()),
            },
            Gen::Bin(op, l, r) => {
                let p = strength(op);
                let right_assoc = *op == "**";
                let wrap = |g: &Gen, is_left: bool| match g {
                    Gen::Bin(inner, ..) => {
                        let q = strength(inner);
                        let needs = if is_left {
                            q < p || (q == p && right_assoc)
                        } else {
                            q < p || (q == p && !right_assoc)
                        };
                        if needs {
                            format!("({})", g.minimal())
                        } else {
                            g.minimal()
                        }
                    }
                    // a negated base of `**` must stay parenthesized to keep
                    // the generated shape unambiguous
                    Gen::Neg(_) if right_assoc && is_left => format!("({})", g.minimal()),
                    _ => g.minimal(),
                };
                format!("{} {op} {}", wrap(l, true), wrap(r, false))
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn precedence_and_associativity(g in gen_expr()) {
        let src = format!("contract C {{ function f() {{ x = {}; }} }}", g.minimal());
        let unit = parse(&src).map_err(|e| TestCaseError::fail(format!("{e}: {src}")))?;
        let trace = traverse(&unit);
        assert_spans_nest(&src, &trace);
        let assign = trace.iter().find(|e| e.kind == "Assignment").unwrap();
        let rhs = trace
            .iter()
            .find(|c| c.path.len() == assign.path.len() + 1 && c.path.starts_with(&assign.path) && *c.path.last().unwrap() == 1)
            .unwrap();
        prop_assert_eq!(render(&src, &trace, rhs), g.expected(), "{}", src);
    }

    #[test]
    fn trivia_does_not_change_structure(g in gen_expr(), pad in "[ \t\n]{0,3}(/\\*c\\*/)?[ \n]{0,2}") {
        let plain = format!("contract C {{ function f() {{ x = {}; }} }}", g.minimal());
        let padded = plain.replace(' ', &format!(" {pad} "));
        let a = traverse(&parse(&plain).unwrap());
        let b = traverse(&parse(&padded).unwrap());
        prop_assert_eq!(
            a.iter().map(|e| (e.kind, e.path.clone())).collect::<Vec<_>>(),
            b.iter().map(|e| (e.kind, e.path.clone())).collect::<Vec<_>>()
        );
    }
}
