use std::collections::BTreeMap;

use ptvertex_core::boxconfig::{enumerate_box_configs, enumerate_partitions, f_profile, BoxConfig, FProfile, Partition};
use ptvertex_core::cancellation::{self, FCase};
use ptvertex_core::exactalg::LaurentPoly;
use ptvertex_core::hilbert;
use ptvertex_core::tqft;
use ptvertex_core::vertexcore::{self, Insertions};

fn up_to(n: u32) -> Vec<Partition> {
    (1..=n).flat_map(enumerate_partitions).collect()
}

fn single_box() -> Partition {
    Partition::new(vec![1]).unwrap()
}

#[test]
fn single_box_has_one_config_per_length() {
    for len in 0..=12 {
        assert_eq!(enumerate_box_configs(&single_box(), len).len(), 1);
    }
}

/// `(1 - t3) F_U` at `t3 = (t1 t2)^{1/a}`, built term by term.
fn specialized_character(c: &BoxConfig, a: i64) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    for (&(i, j), &h) in c.mu().cells().iter().zip(c.depths()) {
        let h = h as i64;
        out = &out + &LaurentPoly::monomial_frac([a * i - h, a * j - h, 0], a, 1);
    }
    out
}

#[test]
fn profile_is_a_function_of_the_specialized_character() {
    for mu in up_to(4) {
        for a in 1..=3 {
            let mut seen: BTreeMap<String, FProfile> = BTreeMap::new();
            let mut by_profile: BTreeMap<FProfile, String> = BTreeMap::new();
            for len in 0..=5 {
                for c in enumerate_box_configs(&mu, len) {
                    let key = specialized_character(&c, a).to_string();
                    let f = f_profile(&c, a);
                    if let Some(prev) = seen.insert(key.clone(), f.clone()) {
                        assert_eq!(prev, f, "{mu} a={a}");
                    }
                    if let Some(prev) = by_profile.insert(f, key.clone()) {
                        assert_eq!(prev, key, "{mu} a={a}");
                    }
                }
            }
        }
    }
}

#[test]
fn minimal_configs_have_trivial_vertex_character() {
    for mu in up_to(5) {
        let v = vertexcore::vertex_character(&BoxConfig::minimal(mu.clone())).unwrap();
        assert!(v.is_zero(), "{mu}: {v}");
    }
}

#[test]
fn vertex_characters_are_laurent_polynomials() {
    for mu in up_to(3) {
        for len in 0..=5 {
            for c in enumerate_box_configs(&mu, len) {
                assert!(vertexcore::vertex_character(&c).is_ok(), "{c}");
            }
        }
    }
}

#[test]
fn leading_vertex_coefficient_is_one() {
    for mu in up_to(5) {
        let d = mu.size() as i64;
        let s = vertexcore::vertex_series(&mu, &Insertions::none(), d).unwrap();
        assert!(s.coeff(d).unwrap().is_one(), "{mu}");
    }
}

#[test]
fn grouped_specialization_matches_naive_when_regular() {
    let mu = single_box();
    let mut compared = 0;
    for a in 1..=3 {
        for ins in [Insertions::none(), Insertions(vec![0]), Insertions(vec![1])] {
            let Ok(naive) = vertexcore::specialize_naive(&mu, &ins, a, 6) else {
                continue;
            };
            let (grouped, _) = vertexcore::specialize_and_check(&mu, &ins, a, 6).unwrap();
            for n in 1..=6 {
                assert_eq!(naive.coeff(n), grouped.coeff(n), "a={a} {ins} q^{n}");
            }
            compared += 1;
        }
    }
    assert!(compared > 0);
}

#[test]
fn edge_weight_inverts_tangent_euler_class() {
    for mu in up_to(6) {
        let e = vertexcore::edge_weight(&mu).unwrap();
        assert!((&e * &hilbert::tangent_euler(&mu)).is_one(), "{mu}");
    }
}

#[test]
fn correspondence_matrix_is_length_triangular() {
    for d in 1..=3 {
        let m = hilbert::correspondence_matrix(d).unwrap();
        let rep = m.check().unwrap();
        assert!(rep.zero_when_row_longer && rep.diagonal_nonzero, "d={d}");
        assert_eq!(rep.rank, m.partitions.len());
    }
}

#[test]
fn cap_leading_matches_hilbert_pairing() {
    for d in 1..=2u32 {
        for eta in enumerate_partitions(d) {
            for ins in [Insertions(vec![d]), Insertions(vec![d - 1]), Insertions(vec![0; d as usize])] {
                let cap = vertexcore::assemble_cap_leading(d, &eta, &ins).unwrap().at_s3_zero().unwrap();
                let hilb = hilbert::hilb_descendent_pairing(&ins, &eta).unwrap();
                assert_eq!(cap, hilb, "d={d} eta={eta} {ins}");
            }
        }
    }
}

#[test]
fn stationary_reference_leading_term_is_the_cap() {
    for d in 1..=2u32 {
        let lead = tqft::stationary_reference_series(d).expand(d as i64).coeff(d as i64).unwrap();
        let cap = vertexcore::assemble_cap_leading(d, &Partition::new(vec![d]).unwrap(), &Insertions(vec![d]))
            .unwrap()
            .at_s3_zero()
            .unwrap();
        assert_eq!(lead, cap, "d={d}");
    }
}

#[test]
fn psi_degree_is_bounded() {
    for mu in up_to(4) {
        let half: i64 = mu.diagonals().values().map(|v| (v.len() * (v.len() - 1) / 2) as i64).sum();
        for a in [1, 2] {
            for len in 0..=4 {
                for c in enumerate_box_configs(&mu, len) {
                    let f = f_profile(&c, a);
                    let psi = cancellation::psi_construct(&f).unwrap();
                    let bound = -cancellation::kappa0(&f) + half;
                    assert!(psi.total_degree().is_none_or(|x| i64::from(x) <= bound), "{mu} {f}");
                }
            }
        }
    }
}

#[test]
fn contributing_profiles_are_finite() {
    for mu in up_to(3) {
        for a in [1, 2] {
            let bound = cancellation::contributing_length_bound(&mu, a);
            for len in bound + 1..=bound + 3 {
                for c in enumerate_box_configs(&mu, len) {
                    let case = cancellation::classify_f(&f_profile(&c, a));
                    assert!(!matches!(case, FCase::Contributing(_)), "{mu} a={a} length {len}");
                }
            }
        }
    }
}
