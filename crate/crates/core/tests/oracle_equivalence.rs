//! Every operator's point count on the fixture corpus equals an independent
//! brute-force count.

mod common;

use solmut::frontend::parse;
use solmut::operators::{enumerate, Context, Operator};

#[test]
fn operator_counts_match_oracles() {
    let mut diffs = Vec::new();
    for (path, src) in common::corpus() {
        let unit = parse(&src).unwrap();
        let cx = Context::new(&unit, &src);
        for op in Operator::ALL {
            let got = enumerate(op, &cx).len();
            let want = common::oracle::count(op, &src);
            if got != want {
                diffs.push(format!("{path} {op}: operator {got}, oracle {want}"));
            }
        }
    }
    assert!(diffs.is_empty(), "count mismatches:\n{}", diffs.join("\n"));
}

#[test]
fn corpus_exercises_every_operator() {
    for op in Operator::ALL {
        let total: usize = common::corpus().iter().map(|(_, src)| common::oracle::count(op, src)).sum();
        assert!(total > 0, "{op} has no sites in the fixture corpus");
    }
}

#[test]
fn bitwise_sites_only_in_bitwise_fixture() {
    for (path, src) in common::corpus() {
        let want = if path == "bitwise.sol" { 6 } else { 0 };
        assert_eq!(common::oracle::count(Operator::Lor, &src), want, "{path}");
    }
}

#[test]
fn check_operators_agree_pairwise() {
    for (path, src) in common::corpus() {
        let unit = parse(&src).unwrap();
        let cx = Context::new(&unit, &src);
        assert_eq!(enumerate(Operator::Rsd, &cx).len(), enumerate(Operator::Rsc, &cx).len(), "{path}");
        assert_eq!(enumerate(Operator::Asd, &cx).len(), enumerate(Operator::Asc, &cx).len(), "{path}");
    }
}

#[test]
fn scanner_token_counts_are_frozen() {
    // Non-comment tokens, counted once with a separate regex tokenizer.
    let expected = [
        ("airswap_like.sol", 526),
        ("bitwise.sol", 57),
        ("empty.sol", 0),
        ("loop_counter.sol", 144),
        ("worked/avr.sol", 41),
        ("worked/dkd.sol", 31),
        ("worked/dlr.sol", 49),
        ("worked/eur.sol", 35),
        ("worked/fsc.sol", 35),
        ("worked/fvc.sol", 42),
        ("worked/gvc.sol", 25),
        ("worked/mfr.sol", 40),
        ("worked/pkd.sol", 36),
        ("worked/rsd.sol", 78),
        ("worked/tur.sol", 36),
        ("worked/vtr.sol", 55),
    ];
    let corpus = common::corpus();
    assert_eq!(corpus.len(), expected.len());
    for ((path, src), (want_path, want)) in corpus.iter().zip(expected) {
        assert_eq!(path, want_path);
        assert_eq!(common::oracle::scan(src).len(), want, "{path}");
    }
}
