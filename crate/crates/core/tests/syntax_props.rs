mod common;

use privcalc::syntax::{
    parse_env, parse_policy, parse_process, parse_system, render_process, render_system,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn process_round_trip(seed in any::<u64>()) {
        let p = common::gen_process(seed, 5);
        let text = render_process(&p);
        let back = parse_process(&text).map_err(|d| TestCaseError::fail(format!("{text}\n{d}")))?;
        prop_assert_eq!(&back, &p, "{}", text);
        prop_assert_eq!(render_process(&back), text);
    }

    #[test]
    fn system_round_trip(seed in any::<u64>()) {
        let s = common::gen_system(seed, 4);
        let text = render_system(&s);
        let back = parse_system(&text).map_err(|d| TestCaseError::fail(format!("{text}\n{d}")))?;
        prop_assert_eq!(render_system(&back), text);
    }

    #[test]
    fn parsers_never_panic(seed in any::<u64>()) {
        let src = common::fuzz_input(seed);
        for r in [
            parse_system(&src).err(),
            parse_process(&src).err(),
            parse_policy(&src).err(),
            parse_env(&src).err(),
        ].into_iter().flatten() {
            let lines = src.split('\n').count();
            prop_assert!(r.span.start.line >= 1 && r.span.end.line <= lines, "{:?} in {:?}", r.span, src);
        }
    }

    #[test]
    fn arbitrary_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let src = String::from_utf8_lossy(&bytes);
        let _ = parse_system(&src);
        let _ = parse_policy(&src);
    }
}

#[test]
fn corpus_round_trips() {
    for f in [
        "hospital.pc",
        "etp_central.pc",
        "etp_decentral.pc",
        "speedlimit.pc",
        "lab.pc",
    ] {
        let s = parse_system(&common::read_corpus(f)).unwrap();
        let back = parse_system(&render_system(&s)).unwrap();
        assert_eq!(back, s, "{f}");
    }
}
