use capa_bench::extraction::{
    classify_span, default_tagsets, extract, parse_spans, RejectReason, DEFAULT_MAX_LEN,
};

const SPANS: &str = include_str!("fixtures/tagged_spans.txt");

#[test]
fn documented_examples_resolve() {
    let spans = parse_spans(SPANS).unwrap();
    let out = extract(&spans, &default_tagsets(), DEFAULT_MAX_LEN);
    assert_eq!(
        out.accepted,
        vec!["listlessness", "recurrence of ocular migraines", "bad pain in my right arm"]
    );
    let reasons: Vec<(&str, RejectReason)> =
        out.rejected.iter().map(|r| (r.surface.as_str(), r.reason)).collect();
    assert_eq!(
        reasons,
        vec![
            ("gained 18 pound", RejectReason::NotNp),
            ("heartburn", RejectReason::NotNp),
            ("stomach cramping the first couple of days", RejectReason::TooLong),
            ("increase in alcohol abuse / dependence", RejectReason::PunctSym),
        ]
    );
}

#[test]
fn symbol_check_precedes_length_check() {
    let s = parse_spans("a_NOUN b_NOUN c_NOUN d_NOUN e_NOUN f_NOUN g_NOUN h_NOUN /_SYM").unwrap();
    assert_eq!(classify_span(&s[0], &default_tagsets(), 7), Some(RejectReason::PunctSym));
}
