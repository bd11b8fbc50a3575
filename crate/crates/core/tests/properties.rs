mod common;

const CASES: u32 = 10_000;

#[test]
fn ring_laws() {
    common::prop_ring_laws(CASES).unwrap();
}

#[test]
fn parse_round_trip() {
    common::prop_parse_round_trip(CASES).unwrap();
}

#[test]
fn weierstrass_reduction() {
    common::prop_reduce_weierstrass(CASES).unwrap();
}

#[test]
fn multidegree_functoriality() {
    common::prop_multidegree_functoriality(CASES).unwrap();
}

#[test]
fn directed_rounding() {
    common::prop_directed_rounding(CASES).unwrap();
}
