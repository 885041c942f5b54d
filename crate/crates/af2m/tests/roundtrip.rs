//! Printing and re-parsing.

mod common;

use af2m::parser::parse_proof_term;
use af2m::{check_source, corpus, parse, printer};
use af2m_core::kernel::equivalent;
use common::{random_term, random_theorems, RANDOM_HEADER};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn reprint(src: &str) -> String {
    let p = parse(src);
    assert!(p.diagnostics.is_empty(), "{:?}", p.diagnostics);
    printer::file(&p.file)
}

#[test]
fn printing_is_a_fixed_point_on_the_corpus() {
    for (n, src) in corpus::FILES {
        let once = reprint(src);
        let twice = reprint(&once);
        assert_eq!(once, twice, "{n}");
    }
}

#[test]
fn reprinted_corpus_proves_the_same_things() {
    for (n, src) in corpus::FILES {
        let a = check_source(src, None);
        let b = check_source(&reprint(src), None);
        assert!(b.all_passed(), "{n}");
        let ja: Vec<_> = a.judgments().collect();
        let jb: Vec<_> = b.judgments().collect();
        assert_eq!(ja.len(), jb.len(), "{n}");
        for ((ka, x), (kb, y)) in ja.iter().zip(&jb) {
            assert_eq!(ka, kb);
            assert!(x.term().alpha_eq(y.term()), "{n}: {ka}");
            assert!(equivalent(x.formula(), y.formula()), "{n}: {ka}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn proof_terms_round_trip(seed in any::<u64>(), depth in 1usize..6) {
        let file = parse(RANDOM_HEADER).file;
        let t = random_term(&mut ChaCha8Rng::seed_from_u64(seed), depth);
        let back = parse_proof_term(&t.to_string(), &file).map_err(|d| TestCaseError::fail(d.message))?;
        prop_assert!(t.alpha_eq(&back), "{} vs {}", t, back);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_theorems_check_and_round_trip(seed in any::<u64>()) {
        let src = random_theorems(seed, 6, 6);
        let f = check_source(&src, None);
        for t in &f.theorems {
            if let Err(e) = &t.result {
                return Err(TestCaseError::fail(format!("{}: {}\n{src}", t.name, e.message)));
            }
        }
        let again = check_source(&reprint(&src), None);
        prop_assert!(again.all_passed());
        prop_assert_eq!(f.judgments().count(), again.judgments().count());
    }
}
