use std::collections::BTreeMap;

use proptest::prelude::*;

use ptvertex_core::boxconfig::{enumerate_partitions, Partition};
use ptvertex_core::exactalg::parse::parse_rational_function;
use ptvertex_core::exactalg::RationalFunction;
use ptvertex_core::tqft::{self, GluingBlock, RationalQ, MAX_EXPONENT};
use ptvertex_core::vertexcore::QSeries;

const COEFFS: [&str; 6] = ["0", "1", "-2", "(s1 + s2)/(s1*s2)", "s1/s2", "3/s1"];

fn coeff() -> impl Strategy<Value = RationalFunction> {
    prop::sample::select(COEFFS.to_vec()).prop_map(|s| parse_rational_function(s).unwrap())
}

fn rational_q() -> impl Strategy<Value = (RationalQ, u32)> {
    (1u32..=3)
        .prop_flat_map(|d| {
            (
                Just(d),
                prop::collection::vec(coeff(), 1..5),
                0i64..=2,
                prop::collection::vec(0..=MAX_EXPONENT, d as usize),
            )
        })
        .prop_filter("nonzero numerator", |(_, num, _, _)| num.iter().any(|c| !c.is_zero()))
        .prop_map(|(d, num, q_pow, m)| {
            let cyclo: BTreeMap<u32, u32> = m.iter().enumerate().map(|(r, &e)| (r as u32 + 1, e)).collect();
            (RationalQ::new(num, q_pow, cyclo), d)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn fit_inverts_expand((f, d) in rational_q()) {
        // enough orders that no other candidate denominator can agree
        let deg = f.num.len() as i64 - 1;
        let widest = i64::from(MAX_EXPONENT) * i64::from(d * (d + 1) / 2);
        let qmax = deg + widest + 3;
        let fitted = tqft::fit_rational(&f.expand(qmax), d, Some(deg)).unwrap();
        prop_assert!(fitted.same_function(&f), "{} vs {}", fitted, f);
    }
}

fn series() -> impl Strategy<Value = QSeries> {
    prop::collection::vec((0i64..4, coeff()), 0..3).prop_map(QSeries::exact)
}

fn block(d: u32, arity: usize) -> impl Strategy<Value = GluingBlock> {
    let parts = enumerate_partitions(d);
    let keys: Vec<Vec<Partition>> = (0..arity)
        .map(|_| parts.clone())
        .fold(vec![vec![]], |acc, ps| {
            acc.into_iter()
                .flat_map(|k| ps.iter().map(move |p| [k.clone(), vec![p.clone()]].concat()))
                .collect()
        });
    let n = keys.len();
    prop::collection::vec(series(), n).prop_map(move |ss| {
        let entries = keys.iter().cloned().zip(ss).filter(|(_, s)| s.terms().next().is_some()).collect();
        GluingBlock::new(d, entries).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (GluingBlock, GluingBlock, GluingBlock)> {
    (1u32..=2).prop_flat_map(|d| (block(d, 2), block(d, 2), block(d, 2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gluing_is_associative((a, b, c) in triple()) {
        let left = tqft::glue_series(&tqft::glue_series(&a, &b).unwrap(), &c).unwrap();
        let right = tqft::glue_series(&a, &tqft::glue_series(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(normalized(&left), normalized(&right));
    }

    #[test]
    fn identity_block_is_a_unit(a in (1u32..=2).prop_flat_map(|d| block(d, 2))) {
        let id = GluingBlock::identity(a.d);
        prop_assert_eq!(normalized(&tqft::glue_series(&a, &id).unwrap()), normalized(&a));
        prop_assert_eq!(normalized(&tqft::glue_series(&id, &a).unwrap()), normalized(&a));
    }
}

/// Drops zero entries and zero coefficients so structurally different but
/// equal blocks compare equal.
fn normalized(b: &GluingBlock) -> BTreeMap<Vec<Partition>, Vec<(i64, RationalFunction)>> {
    b.entries
        .iter()
        .map(|(k, s)| (k.clone(), s.terms().filter(|(_, c)| !c.is_zero()).map(|(n, c)| (n, c.clone())).collect::<Vec<_>>()))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

#[test]
fn stationary_series_satisfy_the_functional_equation() {
    for d in 1..=4u32 {
        let f = tqft::stationary_reference_series(d);
        let di = d as i64;
        assert!(tqft::functional_equation_check(&f, 2 * di, di, 1, di), "d={d}");
    }
}
