use std::collections::BTreeSet;

use ptvertex_core::boxconfig::{enumerate_box_configs, enumerate_partitions, f_profile};
use ptvertex_core::cancellation::*;
use ptvertex_core::vertexcore::{group_sum_by_profile, Insertions};

#[test]
fn class_sums_match_permutation_sums() {
    let ins: Insertions = "0".parse().unwrap();
    for d in 1..=3 {
        for mu in enumerate_partitions(d) {
            for a in [1, 2] {
                for len in 0..=4 {
                    for class in group_sum_by_profile(&mu, &ins, a, len).unwrap() {
                        let (sum, hit) = permutation_class_sum(&class.profile, &ins).unwrap();
                        assert_eq!(sum, class.sum, "{mu} a={a} {}", class.profile);
                        let direct: BTreeSet<_> = class.configs.iter().cloned().collect();
                        assert_eq!(hit, direct);
                    }
                }
            }
        }
    }
}

#[test]
fn non_contributing_classes_vanish() {
    let ins = Insertions::none();
    for d in 1..=3 {
        for mu in enumerate_partitions(d) {
            for a in [1, 2, 3] {
                for len in 0..=5 {
                    for class in group_sum_by_profile(&mu, &ins, a, len).unwrap() {
                        let case = classify_f(&class.profile);
                        assert!(!case.is_empty_class(), "{mu} {}", class.profile);
                        match case {
                            FCase::Contributing(cert) => {
                                assert!(cert.holds);
                                assert!(len <= cert.max_length);
                            }
                            _ => assert!(class.value.is_zero(), "{mu} a={a} {} {}", class.profile, case.label()),
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn realized_profiles_have_bounded_length() {
    for mu in enumerate_partitions(3) {
        let bound = contributing_length_bound(&mu, 1);
        for len in 0..=bound + 2 {
            for c in enumerate_box_configs(&mu, len) {
                if let FCase::Contributing(cert) = classify_f(&f_profile(&c, 1)) {
                    assert!(cert.holds && len <= cert.max_length);
                }
            }
        }
    }
}
