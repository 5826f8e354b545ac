mod common;

use common::suites::*;
use common::*;
use ideograph::check::check;
use ideograph::encodings::{
    decode_bintree, decode_lambda, decode_multigraph, encode_bintree, encode_lambda, encode_multigraph,
};
use ideograph::textio::{parse, parse_bundle, print_bundle, print_term};
use proptest::prelude::*;

#[test]
fn corpus_survives_print_then_parse() {
    let t = corpus_text_round_trips();
    assert!(t.ok(), "{}", t.summary());
}

#[test]
fn seeded_codec_round_trips() {
    for t in [tree_round_trips(105, 100), multigraph_round_trips(106, 100), lambda_round_trips(107, 60)] {
        assert!(t.ok(), "{}", t.summary());
    }
}

#[test]
fn malformed_records_are_located() {
    let e = parse("idg 1 term\nB: z\nR_R: (z,a\n").unwrap_err();
    assert_eq!(e.line, 3);
    assert!(e.section.as_deref() == Some("R_R"), "{e:?}");
    assert!(parse("idg 1 term\nQQ: a\n").is_err());
    assert!(parse("idg 9 term\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn encodings_check_and_decode(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tree = random_tree(&mut r, 6);
        let b = encode_bintree(&tree).unwrap();
        prop_assert!(check(&b).is_ok());
        prop_assert_eq!(decode_bintree(&b).unwrap(), tree);

        let m = random_multigraph(&mut r, 4, 5);
        let b = encode_multigraph(&m).unwrap();
        prop_assert!(check(&b).is_ok());
        prop_assert!(same_up_to_renumbering(&m, &decode_multigraph(&b).unwrap()));

        let l = random_lambda(&mut r, 5);
        let b = encode_lambda(&l).unwrap();
        prop_assert!(check(&b).is_ok());
        prop_assert_eq!(decode_lambda(&b).unwrap(), l);
    }

    #[test]
    fn encodings_survive_print_then_parse(seed in any::<u64>()) {
        let mut r = rng(seed);
        let b = shuffle_names(&encode_lambda(&random_lambda(&mut r, 5)).unwrap(), &mut r);
        let text = print_bundle(&b);
        prop_assert_eq!(&parse_bundle(&text).unwrap(), &b);
        let term_text = print_term(&b.term);
        prop_assert_eq!(parse(&term_text).unwrap().term, b.term);
    }
}
