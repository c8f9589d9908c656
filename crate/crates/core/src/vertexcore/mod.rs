//! Vertex characters, descendent weights, the 1-leg descendent vertex series,
//! its specialization `s3 = (s1 + s2)/a`, and leading-order cap assembly.

pub mod series;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::boxconfig::{enumerate_box_configs, enumerate_partitions, f_profile, BoxConfig, FProfile, Partition};
use crate::exactalg::{chern_character_eval, euler_class, AlgebraError, LaurentPoly, RationalFunction, TCharacter};
use crate::hilbert::{self, HilbertError};

pub use series::QSeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VertexError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error("pole survives at s3 = (s1 + s2)/{a} for profile {profile} at length {length}")]
    PoleSurvived { profile: String, a: i64, length: u32 },
    #[error("qmax {qmax} is below the leading order {min}")]
    OrderTooLow { qmax: i64, min: i64 },
}

/// Descendent insertions `tau_{i_1}([0]) ... tau_{i_k}([0])`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Insertions(pub Vec<u32>);

impl Insertions {
    pub fn none() -> Self {
        Insertions(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl FromStr for Insertions {
    type Err = std::num::ParseIntError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if t.is_empty() {
            return Ok(Insertions::none());
        }
        t.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>().map(Insertions)
    }
}

impl fmt::Display for Insertions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", v.join(","))
    }
}

fn t(e: [i64; 3]) -> LaurentPoly {
    LaurentPoly::monomial(e, 1)
}

fn one_minus(e: [i64; 3]) -> LaurentPoly {
    &LaurentPoly::one() - &t(e)
}

/// `(F_mu, G_mu)` with `G = -F - Fbar/(t1 t2) + F Fbar (1-t1)(1-t2)/(t1 t2)`.
pub fn cylinder_and_edge_characters(mu: &Partition) -> (LaurentPoly, LaurentPoly) {
    let f = mu.character();
    let fb = f.bar();
    let inv12 = t([-1, -1, 0]);
    let cross = &(&(&f * &fb) * &(&one_minus([1, 0, 0]) * &one_minus([0, 1, 0]))) * &inv12;
    let g = &(&cross - &f) - &(&fb * &inv12);
    (f, g)
}

/// `e(G_mu)`; the `q^{-d}` edge normalization is applied at assembly time.
pub fn edge_weight(mu: &Partition) -> Result<RationalFunction, AlgebraError> {
    euler_class(&cylinder_and_edge_characters(mu).1)
}

/// `V_U = F - Fbar/(t1t2t3) + F Fbar (1-t1)(1-t2)(1-t3)/(t1t2t3) + G/(1-t3)`
/// for `F = F_U`, reduced to a Laurent polynomial.
pub fn vertex_character(config: &BoxConfig) -> Result<LaurentPoly, AlgebraError> {
    let (_, g) = cylinder_and_edge_characters(config.mu());
    let f = config.character();
    let fb = f.bar();
    let inv123 = TCharacter::from(t([-1, -1, -1]));
    let koszul = TCharacter::from(&(&one_minus([1, 0, 0]) * &one_minus([0, 1, 0])) * &one_minus([0, 0, 1]));
    let g_term = TCharacter::fraction(g, [([0, 0, 1], 1)]);
    let v = &(&(&f - &(&fb * &inv123)) + &(&(&(&f * &fb) * &koszul) * &inv123)) + &g_term;
    v.into_polynomial()
}

/// Laurent polynomial `F'_U (1 - t1)(1 - t2)` feeding the Chern characters.
pub fn descendent_argument(config: &BoxConfig) -> LaurentPoly {
    &config.f_prime() * &(&one_minus([1, 0, 0]) * &one_minus([0, 1, 0]))
}

/// `e(-V_U) * prod_j ch_{2+i_j}(F'_U (1-t1)(1-t2))`
pub fn descendent_weight(config: &BoxConfig, ins: &Insertions) -> Result<RationalFunction, AlgebraError> {
    let v = vertex_character(config)?;
    let mut w = euler_class(&v.scale(-1))?;
    if !ins.is_empty() {
        let arg = descendent_argument(config);
        for &i in &ins.0 {
            w = &w * &chern_character_eval(&arg, 2 + i);
        }
    }
    Ok(w)
}

fn insertion_prefactor(ins: &Insertions) -> RationalFunction {
    let inv = RationalFunction::weight_pow([1, 0, 0], -1).unwrap() * RationalFunction::weight_pow([0, 1, 0], -1).unwrap();
    inv.pow(ins.len() as i64).unwrap()
}

fn weights_at_length(mu: &Partition, ins: &Insertions, length: u32) -> Result<Vec<(BoxConfig, RationalFunction)>, AlgebraError> {
    enumerate_box_configs(mu, length)
        .into_par_iter()
        .map(|c| descendent_weight(&c, ins).map(|w| (c, w)))
        .collect()
}

/// `(1/(s1 s2))^k sum_U w_U q^{l(U) + |mu|}` through `q^qmax`.
pub fn vertex_series(mu: &Partition, ins: &Insertions, qmax: i64) -> Result<QSeries, VertexError> {
    let d = mu.size() as i64;
    if qmax < d {
        return Err(VertexError::OrderTooLow { qmax, min: d });
    }
    let pre = insertion_prefactor(ins);
    let mut s = QSeries::truncated(d, qmax);
    for n in d..=qmax {
        let total: RationalFunction = weights_at_length(mu, ins, (n - d) as u32)?
            .into_iter()
            .map(|(_, w)| w)
            .sum();
        s.add_at(n, &(&total * &pre));
    }
    Ok(s)
}

/// Weights of the configurations sharing one profile, summed exactly and then
/// specialized.
#[derive(Clone, Debug)]
pub struct ClassSum {
    pub profile: FProfile,
    pub configs: Vec<BoxConfig>,
    pub sum: RationalFunction,
    pub value: RationalFunction,
}

fn pole_error(e: AlgebraError, profile: &FProfile, a: i64, length: u32) -> VertexError {
    match e {
        AlgebraError::PoleSurvived(_) => VertexError::PoleSurvived {
            profile: profile.to_string(),
            a,
            length,
        },
        other => VertexError::Algebra(other),
    }
}

/// Groups configurations of the given length by profile; class sums are
/// evaluated at `s3 = (s1 + s2)/a` (without the insertion prefactor).
pub fn group_sum_by_profile(mu: &Partition, ins: &Insertions, a: i64, length: u32) -> Result<Vec<ClassSum>, VertexError> {
    let mut groups: BTreeMap<FProfile, (Vec<BoxConfig>, Vec<RationalFunction>)> = BTreeMap::new();
    for (c, w) in weights_at_length(mu, ins, length)? {
        let g = groups.entry(f_profile(&c, a)).or_default();
        g.0.push(c);
        g.1.push(w);
    }
    groups
        .into_par_iter()
        .map(|(profile, (configs, ws))| {
            let sum: RationalFunction = ws.into_iter().sum();
            let value = sum.specialize_s3(a).map_err(|e| pole_error(e, &profile, a, length))?;
            Ok(ClassSum {
                profile,
                configs,
                sum,
                value,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecializationReport {
    pub a: i64,
    pub qmax: i64,
    pub classes: usize,
    /// Largest order with a nonzero specialized coefficient.
    pub top_nonzero: Option<i64>,
}

impl SpecializationReport {
    /// Every computed order above `bound` vanishes.
    pub fn tail_vanishes_after(&self, bound: i64) -> bool {
        self.top_nonzero.is_none_or(|t| t <= bound)
    }
}

/// The vertex series at `s3 = (s1 + s2)/a`, computed with grouped class sums.
pub fn specialize_and_check(
    mu: &Partition,
    ins: &Insertions,
    a: i64,
    qmax: i64,
) -> Result<(QSeries, SpecializationReport), VertexError> {
    assert!(a >= 1);
    let d = mu.size() as i64;
    if qmax < d {
        return Err(VertexError::OrderTooLow { qmax, min: d });
    }
    let pre = insertion_prefactor(ins);
    let mut s = QSeries::truncated(d, qmax);
    let mut classes = 0usize;
    for n in d..=qmax {
        let groups = group_sum_by_profile(mu, ins, a, (n - d) as u32)?;
        classes += groups.len();
        let total: RationalFunction = groups.into_iter().map(|g| g.value).sum();
        s.add_at(n, &(&total * &pre));
    }
    let report = SpecializationReport {
        a,
        qmax,
        classes,
        top_nonzero: s.top_nonzero(),
    };
    Ok((s, report))
}

/// Termwise specialization without grouping; fails on any singular term.
pub fn specialize_naive(mu: &Partition, ins: &Insertions, a: i64, qmax: i64) -> Result<QSeries, VertexError> {
    let d = mu.size() as i64;
    let pre = insertion_prefactor(ins);
    let mut s = QSeries::truncated(d, qmax);
    for n in d..=qmax {
        let mut total = RationalFunction::zero();
        for (_, w) in weights_at_length(mu, ins, (n - d) as u32)? {
            total = &total + &w.specialize_s3(a)?;
        }
        s.add_at(n, &(&total * &pre));
    }
    Ok(s)
}

/// Localization assembly of the capped descendent vertex through `q^qmax`:
/// `sum_mu V_mu(ins) * e(G_mu) q^{-d} * rubber(mu)`.
pub fn assemble_cap_series(
    d: u32,
    ins: &Insertions,
    qmax: i64,
    rubber: impl Fn(&Partition) -> Result<QSeries, VertexError>,
) -> Result<QSeries, VertexError> {
    let mut total: Option<QSeries> = None;
    for mu in enumerate_partitions(d) {
        let v = vertex_series(&mu, ins, qmax)?;
        let edge = edge_weight(&mu)?;
        let term = (&v.scale(&edge).shift(-(d as i64))) * &rubber(&mu)?;
        total = Some(match total {
            None => term,
            Some(t) => &t + &term,
        });
    }
    Ok(total.unwrap_or_else(QSeries::zero_exact).truncate(qmax))
}

/// Leading rubber term `q^d <P_mu, C_eta>`.
pub fn leading_rubber(eta: &Partition) -> impl Fn(&Partition) -> Result<QSeries, VertexError> + '_ {
    move |mu: &Partition| {
        let c = hilbert::nakajima_restriction(eta, mu)?;
        Ok(QSeries::monomial(mu.size() as i64, c))
    }
}

/// The `q^d` coefficient of the cap series with the leading rubber term.
pub fn assemble_cap_leading(d: u32, eta: &Partition, ins: &Insertions) -> Result<RationalFunction, VertexError> {
    let s = assemble_cap_series(d, ins, d as i64, leading_rubber(eta))?;
    Ok(s.coeff(d as i64).expect("leading order is known"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::parse::parse_rational_function as rf;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn edge_characters() {
        let (f, g) = cylinder_and_edge_characters(&p(&[1]));
        assert_eq!(f, LaurentPoly::one());
        assert_eq!(g, (&t([-1, 0, 0]) + &t([0, -1, 0])).scale(-1));
        let (f, g) = cylinder_and_edge_characters(&p(&[2]));
        assert_eq!(f, &LaurentPoly::one() + &t([1, 0, 0]));
        assert_eq!(g.len(), 4);
        assert_eq!(g.rank(), -4);
        let (f, g) = cylinder_and_edge_characters(&Partition::empty());
        assert!(f.is_zero() && g.is_zero());
        assert_eq!(edge_weight(&p(&[1])).unwrap(), rf("1/(s1*s2)").unwrap());
        assert!(edge_weight(&Partition::empty()).unwrap().is_one());
    }

    #[test]
    fn vertex_character_examples() {
        assert!(vertex_character(&BoxConfig::new(p(&[1]), vec![0])).unwrap().is_zero());
        let v = vertex_character(&BoxConfig::new(p(&[1]), vec![1])).unwrap();
        assert_eq!(v, &t([0, 0, -1]) - &t([-1, -1, 0]));
        assert!(vertex_character(&BoxConfig::minimal(p(&[3, 1]))).unwrap().is_zero());
    }

    #[test]
    fn descendent_weight_examples() {
        let c0 = BoxConfig::new(p(&[1]), vec![0]);
        let c1 = BoxConfig::new(p(&[1]), vec![1]);
        assert!(descendent_weight(&c0, &Insertions::none()).unwrap().is_one());
        assert_eq!(descendent_weight(&c1, &Insertions::none()).unwrap(), rf("(s1+s2)/s3").unwrap());
        assert_eq!(descendent_weight(&c0, &Insertions(vec![0])).unwrap(), rf("s1*s2").unwrap());
    }

    #[test]
    fn vertex_series_examples() {
        let s = vertex_series(&p(&[1]), &Insertions::none(), 2).unwrap();
        assert_eq!(s.coeff(1).unwrap(), rf("1").unwrap());
        assert_eq!(s.coeff(2).unwrap(), rf("(s1+s2)/s3").unwrap());
        let s = vertex_series(&p(&[1]), &Insertions(vec![0]), 1).unwrap();
        assert!(s.coeff(1).unwrap().is_one());
    }

    #[test]
    fn specialization_regressions() {
        let mu = p(&[1]);
        let (s, r) = specialize_and_check(&mu, &Insertions::none(), 1, 6).unwrap();
        assert_eq!(s.terms().map(|(n, c)| (n, c.to_string())).collect::<Vec<_>>(), vec![(1, "1".into()), (2, "1".into())]);
        assert_eq!(r.top_nonzero, Some(2));
        let (s, _) = specialize_and_check(&mu, &Insertions::none(), 2, 6).unwrap();
        let c: Vec<String> = s.terms().map(|(_, c)| c.to_string()).collect();
        assert_eq!(c, vec!["1", "2", "1"]);
        let (s, _) = specialize_and_check(&mu, &Insertions::none(), 3, 2).unwrap();
        assert_eq!(s.coeff(2).unwrap(), RationalFunction::from_int(3));
        assert_eq!(specialize_naive(&mu, &Insertions::none(), 2, 6).unwrap(), s_of(&mu, 2, 6));
    }

    fn s_of(mu: &Partition, a: i64, qmax: i64) -> QSeries {
        specialize_and_check(mu, &Insertions::none(), a, qmax).unwrap().0
    }
}
