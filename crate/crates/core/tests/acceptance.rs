//! Exit gate: ten exact checks, each printed as one pass/fail line.
//! Runs without the libtest harness so the lines always reach stdout.

use std::collections::BTreeSet;
use std::time::Instant;

use itertools::Itertools;
use rand::SeedableRng;
use rayon::prelude::*;

use ptvertex_core::boxconfig::{enumerate_box_configs, enumerate_partitions, validate_config_oracle, BoxConfig, Partition};
use ptvertex_core::cancellation;
use ptvertex_core::exactalg::parse::parse_rational_function as rf;
use ptvertex_core::exactalg::scalar::factorial;
use ptvertex_core::exactalg::{RationalFunction, Scalar};
use ptvertex_core::hilbert::{self, fixed_point_tangent_weights, nakajima_pairing_closed_form};
use ptvertex_core::tqft::{self, MAX_EXPONENT};
use ptvertex_core::vertexcore::{self, group_sum_by_profile, Insertions, QSeries};

type Outcome = Result<String, String>;

fn p(parts: &[u32]) -> Partition {
    Partition::new(parts.to_vec()).unwrap()
}

fn ins(v: &[u32]) -> Insertions {
    Insertions(v.to_vec())
}

fn partitions_up_to(n: u32) -> Vec<Partition> {
    (1..=n).flat_map(enumerate_partitions).collect()
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn cap_leading() -> Outcome {
    for d in 1..=2u32 {
        let got = vertexcore::assemble_cap_leading(d, &p(&[d]), &ins(&[d]))
            .map_err(|e| e.to_string())?
            .at_s3_zero()
            .map_err(|e| e.to_string())?;
        let want = rf("(s1 + s2)/(s1*s2)").unwrap().scale(&Scalar::new(1.into(), factorial(d - 1) * 2));
        ensure(got == want, || format!("d={d}: got {got}, want {want}"))?;
    }
    Ok("d = 1, 2".into())
}

fn nakajima_pairing() -> Outcome {
    let mut pairs = 0;
    for d in 1..=4 {
        let t = hilbert::nakajima_transition(d).map_err(|e| e.to_string())?;
        for a in &t.partitions {
            for b in &t.partitions {
                let got = t.pairing(a, b);
                let want = nakajima_pairing_closed_form(a, b);
                ensure(got == want, || format!("<{a},{b}> = {got}, want {want}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs, d <= 4"))
}

fn point_pairings() -> Outcome {
    let s1s2 = rf("s1*s2").unwrap();
    for c in 1..=4u32 {
        let v = hilbert::hilb_descendent_pairing(&ins(&[c - 1]), &p(&[c])).map_err(|e| e.to_string())?;
        let got = &v * &s1s2;
        let want = RationalFunction::from_scalar(Scalar::new(1.into(), factorial(c)));
        ensure(got == want, || format!("c={c}: got {got}"))?;
    }
    Ok("c <= 4".into())
}

fn exact_series(terms: &[(i64, i64)]) -> Vec<(i64, RationalFunction)> {
    terms.iter().map(|&(n, c)| (n, RationalFunction::from_int(c))).collect()
}

fn nonzero_terms(s: &QSeries) -> Vec<(i64, RationalFunction)> {
    s.terms().filter(|(_, c)| !c.is_zero()).map(|(n, c)| (n, c.clone())).collect()
}

fn pole_cancellation() -> Outcome {
    let insertion_sets: [&[u32]; 5] = [&[], &[0], &[1], &[2], &[0, 1]];
    let mut jobs: Vec<(Partition, i64, Insertions)> = Vec::new();
    for mu in partitions_up_to(3) {
        for a in 1..=3 {
            for i in insertion_sets {
                jobs.push((mu.clone(), a, ins(i)));
            }
        }
    }
    let results: Vec<Result<(), String>> = jobs
        .par_iter()
        .map(|(mu, a, i)| {
            let d = mu.size() as i64;
            let bound = d + cancellation::contributing_length_bound(mu, *a) as i64;
            let (s, rep) = vertexcore::specialize_and_check(mu, i, *a, d + 8).map_err(|e| format!("{mu} a={a} {i}: {e}"))?;
            ensure(s.terms().all(|(_, c)| !c.involves_var(2)), || {
                format!("{mu} a={a} {i}: coefficient with a surviving pole")
            })?;
            ensure(rep.tail_vanishes_after(bound), || {
                format!("{mu} a={a} {i}: q^{} nonzero beyond bound q^{bound}", rep.top_nonzero.unwrap())
            })
        })
        .collect();
    for r in results {
        r?;
    }
    let cases = [(1, exact_series(&[(1, 1), (2, 1)])), (2, exact_series(&[(1, 1), (2, 2), (3, 1)]))];
    for (a, want) in cases {
        let (s, _) = vertexcore::specialize_and_check(&p(&[1]), &Insertions::none(), a, 9).map_err(|e| e.to_string())?;
        ensure(nonzero_terms(&s) == want, || format!("mu=(1) a={a}: got {}", s.render()))?;
    }
    Ok(format!("{} series through q^(|mu|+8), closed forms at a = 1, 2", jobs.len()))
}

fn spec_sequences(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for i in 0..n {
        out = out
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                let lo = s.last().copied().unwrap_or(0);
                (lo..=i).map(move |x| [s.clone(), vec![x]].concat())
            })
            .collect();
    }
    out
}

fn permutation_ranks() -> Outcome {
    let mut count = 0;
    for n in 1..=6 {
        for a in spec_sequences(n) {
            let c = cancellation::count_nonvanishing_permutations(&a).map_err(|e| e.to_string())?;
            ensure(c.agrees() && c.brute.is_some(), || format!("a={a:?}: formula {} brute {:?}", c.formula, c.brute))?;
            count += 1;
        }
    }
    Ok(format!("{count} sequences, n <= 6"))
}

fn division() -> Outcome {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    let instances: Vec<_> = (0..50).map(|_| cancellation::random_division_instance(&mut rng, 6)).collect();
    let bad: Vec<String> = instances
        .par_iter()
        .filter(|(a, g, m)| !cancellation::division_holds(a, g, *m))
        .map(|(a, _, m)| format!("a={a:?} m={m}"))
        .collect();
    ensure(bad.is_empty(), || format!("failed: {}", bad.join("; ")))?;
    let nontrivial = instances.iter().filter(|(a, _, _)| a.iter().any(|&x| x > 0)).count();
    Ok(format!("50 instances, {nontrivial} with nonconstant F"))
}

fn correspondence_one(mu: &Partition, a: i64, i: &Insertions) -> Result<usize, String> {
    let tag = |s: &str| format!("{mu} a={a} {i}: {s}");
    let mut profiles = 0;
    for len in 0..=5 {
        for class in group_sum_by_profile(mu, i, a, len).map_err(|e| tag(&e.to_string()))? {
            let f = &class.profile;
            let (sum, hit) = cancellation::permutation_class_sum(f, i).map_err(|e| tag(&e.to_string()))?;
            ensure(sum == class.sum, || tag(&format!("class sum differs at {f}")))?;
            let direct: BTreeSet<BoxConfig> = class.configs.iter().cloned().collect();
            ensure(hit == direct, || tag(&format!("admissible set differs at {f}")))?;
            let psi = cancellation::psi_construct(f).map_err(|e| tag(&e.to_string()))?;
            for s in cancellation::enumerate_sym(mu) {
                let v = psi.eval(&s.point(mu));
                match cancellation::admissible_h(&s, f) {
                    Some(_) => {
                        let (phi, _) = cancellation::phi(&s, f).map_err(|e| tag(&e.to_string()))?;
                        ensure(phi == v * Scalar::from_integer(s.sign().into()), || tag(&format!("phi != sgn psi at {f}")))?;
                    }
                    None => ensure(v == Scalar::from_integer(0.into()), || tag(&format!("psi nonzero off the admissible set at {f}")))?,
                }
            }
            profiles += 1;
        }
    }
    Ok(profiles)
}

fn correspondence() -> Outcome {
    let mut jobs: Vec<(Partition, i64, Insertions)> = Vec::new();
    for mu in partitions_up_to(4) {
        for a in [1, 2] {
            for i in [ins(&[]), ins(&[1])] {
                jobs.push((mu.clone(), a, i));
            }
        }
    }
    let counts: Vec<Result<usize, String>> = jobs.par_iter().map(|(mu, a, i)| correspondence_one(mu, *a, i)).collect();
    let mut total = 0;
    for c in counts {
        total += c?;
    }
    Ok(format!("{total} profile classes, |mu| <= 4, lengths <= 5"))
}

fn fit_and_functional_equation() -> Outcome {
    for d in 1..=3u32 {
        let reference = tqft::stationary_reference_series(d);
        let series = reference.expand(d as i64 + 11);
        ensure(series.terms().count() <= 12, || format!("d={d}: more than 12 coefficients supplied"))?;
        let f = tqft::fit_rational(&series, d, None).map_err(|e| format!("d={d}: {e}"))?;
        ensure(f.same_function(&reference), || format!("d={d}: fitted {f}"))?;
        ensure(f.cyclo.iter().all(|(&r, &m)| r >= 1 && r <= d && m <= MAX_EXPONENT), || {
            format!("d={d}: denominator outside the ansatz: {f}")
        })?;
        let di = d as i64;
        ensure(tqft::functional_equation_check(&f, 2 * di, di, 1, di), || format!("d={d}: functional equation fails"))?;
    }
    Ok("d <= 3".into())
}

fn edge_identity() -> Outcome {
    let all = partitions_up_to(6);
    for mu in &all {
        let e = vertexcore::edge_weight(mu).map_err(|x| x.to_string())?;
        let t: RationalFunction = fixed_point_tangent_weights(mu).into_iter().map(RationalFunction::weight).product();
        ensure((&e * &t).is_one(), || format!("{mu}: product {}", &e * &t))?;
    }
    Ok(format!("{} partitions, |mu| <= 6", all.len()))
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0;
    for mu in partitions_up_to(4) {
        let n = mu.size() as usize;
        for len in 0..=6u32 {
            let listed = enumerate_box_configs(&mu, len);
            let set: BTreeSet<BoxConfig> = listed.iter().cloned().collect();
            ensure(set.len() == listed.len(), || format!("{mu} length {len}: duplicates"))?;
            let oracle: BTreeSet<BoxConfig> = (0..n)
                .map(|_| 0..=len)
                .multi_cartesian_product()
                .filter(|h| h.iter().sum::<u32>() == len)
                .map(|h| BoxConfig::new(mu.clone(), h))
                .filter(validate_config_oracle)
                .collect();
            ensure(set == oracle, || format!("{mu} length {len}: {} listed, {} accepted", set.len(), oracle.len()))?;
            checked += set.len();
        }
    }
    Ok(format!("{checked} configurations, |mu| <= 4, lengths <= 6"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("stationary leading coefficient", cap_leading),
        ("Nakajima pairing", nakajima_pairing),
        ("point pairings 1/c!", point_pairings),
        ("pole cancellation", pole_cancellation),
        ("permutation ranks", permutation_ranks),
        ("division on permutation points", division),
        ("class sums and phi/psi", correspondence),
        ("rational fit and functional equation", fit_and_functional_equation),
        ("edge identity", edge_identity),
        ("oracle equivalence", oracle_equivalence),
    ];
    let results: Vec<(Outcome, f64)> = criteria
        .par_iter()
        .map(|(_, run)| {
            let t = Instant::now();
            let r = run();
            (r, t.elapsed().as_secs_f64())
        })
        .collect();
    let mut failed = 0;
    for (k, ((name, _), (r, secs))) in criteria.iter().zip(&results).enumerate() {
        match r {
            Ok(msg) => println!("criterion {:>2} PASS  {name} ({msg}; {secs:.1}s)", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({msg}; {secs:.1}s)", k + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
