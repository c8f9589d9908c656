//! Gluing of relative series along a boundary partition, reconstruction of
//! rational functions in `q` with denominators `q^k prod (1 - (-q)^r)^{m_r}`,
//! the functional equation `q -> 1/q`, and the stationary reference series.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::boxconfig::{enumerate_partitions, Partition};
use crate::exactalg::parse::parse_rational_function;
use crate::exactalg::scalar::{factorial, int};
use crate::exactalg::{AlgebraError, RationalFunction, Scalar};
use crate::hilbert::{nakajima_pairing_closed_form, nakajima_pairing_inverse};
use crate::vertexcore::QSeries;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TqftError {
    #[error("no fit within the denominator ansatz")]
    NoFit,
    #[error("need at least {needed} verification orders, have {available}")]
    Underdetermined { needed: i64, available: i64 },
    #[error("incompatible blocks: {0}")]
    Incompatible(String),
    #[error("malformed rational function data: {0}")]
    Json(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Orders that must be reproduced beyond the numerator degree.
pub const VERIFICATION_ORDERS: i64 = 3;
/// Largest exponent tried for each `1 - (-q)^r`.
pub const MAX_EXPONENT: u32 = 3;

/// Laurent polynomial in `q` with rational-function coefficients.
type QLaurent = BTreeMap<i64, RationalFunction>;

fn ql_mul(a: &QLaurent, b: &QLaurent) -> QLaurent {
    let mut out = QLaurent::new();
    for (i, x) in a {
        for (j, y) in b {
            let e = out.entry(i + j).or_insert_with(RationalFunction::zero);
            *e = &*e + &(x * y);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn ql_int(terms: &[(i64, i64)]) -> QLaurent {
    let mut out = QLaurent::new();
    for &(n, c) in terms {
        let e = out.entry(n).or_insert_with(RationalFunction::zero);
        *e = &*e + &RationalFunction::from_int(c);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Integer coefficients of `prod_r (1 - (-q)^r)^{m_r}`, ascending.
fn denominator_coeffs(cyclo: &BTreeMap<u32, u32>) -> Vec<i64> {
    let mut p = vec![1i64];
    for (&r, &m) in cyclo {
        let c = if r % 2 == 0 { -1 } else { 1 };
        for _ in 0..m {
            let mut next = vec![0i64; p.len() + r as usize];
            for (i, &x) in p.iter().enumerate() {
                next[i] += x;
                next[i + r as usize] += c * x;
            }
            p = next;
        }
    }
    p
}

/// `num(q) / (q^{q_pow} prod_r (1 - (-q)^r)^{cyclo[r]})`
#[derive(Clone, Debug, PartialEq)]
pub struct RationalQ {
    /// Coefficients of `q^0, q^1, ...`.
    pub num: Vec<RationalFunction>,
    pub q_pow: i64,
    pub cyclo: BTreeMap<u32, u32>,
}

impl RationalQ {
    pub fn new(num: Vec<RationalFunction>, q_pow: i64, cyclo: BTreeMap<u32, u32>) -> Self {
        let mut r = RationalQ { num, q_pow, cyclo };
        r.cyclo.retain(|_, m| *m > 0);
        while r.num.last().is_some_and(RationalFunction::is_zero) {
            r.num.pop();
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn numerator(&self) -> QLaurent {
        self.num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64, c.clone()))
            .collect()
    }

    fn denominator(&self) -> QLaurent {
        let d = denominator_coeffs(&self.cyclo);
        let terms: Vec<(i64, i64)> = d.iter().enumerate().map(|(i, &c)| (i as i64 + self.q_pow, c)).collect();
        ql_int(&terms)
    }

    /// Equality as rational functions of `q`.
    pub fn same_function(&self, other: &RationalQ) -> bool {
        ql_mul(&self.numerator(), &other.denominator()) == ql_mul(&other.numerator(), &self.denominator())
    }

    /// Expansion through `q^qmax`, from order `-q_pow`.
    pub fn expand(&self, qmax: i64) -> QSeries {
        let lo = -self.q_pow;
        let mut s = QSeries::truncated(lo, qmax.max(lo - 1));
        if qmax < lo {
            return s;
        }
        let len = (qmax - lo + 1) as usize;
        // 1/den as a power series; den has constant term 1
        let den = denominator_coeffs(&self.cyclo);
        let mut inv = vec![0i64; len];
        inv[0] = 1;
        for n in 1..len {
            inv[n] = -(1..=n.min(den.len() - 1)).map(|j| den[j] * inv[n - j]).sum::<i64>();
        }
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (n, &v) in inv.iter().enumerate().take(len.saturating_sub(i)) {
                if v != 0 {
                    s.add_at(lo + (i + n) as i64, &c.scale(&int(v)));
                }
            }
        }
        s
    }

    /// `F(1/q)` as a numerator and denominator pair of Laurent polynomials.
    fn inverted(&self) -> (QLaurent, QLaurent) {
        let num = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.q_pow - i as i64, c.clone()))
            .collect();
        // 1 - (-1/q)^r
        let mut den = ql_int(&[(0, 1)]);
        for (&r, &m) in &self.cyclo {
            let c = if r % 2 == 0 { -1 } else { 1 };
            let f = ql_int(&[(0, 1), (-(r as i64), c)]);
            for _ in 0..m {
                den = ql_mul(&den, &f);
            }
        }
        (num, den)
    }

    pub fn to_json(&self) -> Value {
        let num: Vec<String> = self.num.iter().map(|c| c.to_string()).collect();
        let cyclo: serde_json::Map<String, Value> = self.cyclo.iter().map(|(r, m)| (r.to_string(), json!(m))).collect();
        json!({"num": num, "q_pow": self.q_pow, "cyclo": cyclo})
    }

    pub fn from_json(v: &Value) -> Result<RationalQ, TqftError> {
        let bad = |m: &str| TqftError::Json(m.to_string());
        let num = v["num"]
            .as_array()
            .ok_or_else(|| bad("num must be an array"))?
            .iter()
            .map(|c| {
                let s = c.as_str().ok_or_else(|| bad("coefficients must be strings"))?;
                Ok(parse_rational_function(s)?)
            })
            .collect::<Result<Vec<_>, TqftError>>()?;
        let q_pow = v["q_pow"].as_i64().ok_or_else(|| bad("q_pow must be an integer"))?;
        let mut cyclo = BTreeMap::new();
        if let Some(map) = v["cyclo"].as_object() {
            for (r, m) in map {
                let r: u32 = r.parse().map_err(|_| bad("cyclo keys must be positive integers"))?;
                let m = m.as_u64().ok_or_else(|| bad("cyclo exponents must be integers"))? as u32;
                cyclo.insert(r, m);
            }
        }
        Ok(RationalQ::new(num, q_pow, cyclo))
    }
}

impl fmt::Display for RationalQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*q"),
                _ => format!("({c})*q^{i}"),
            })
            .collect();
        let num = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let mut den: Vec<String> = Vec::new();
        if self.q_pow != 0 {
            den.push(format!("q^{}", self.q_pow));
        }
        for (r, m) in &self.cyclo {
            let base = if *r == 1 { "(1 + q)".to_string() } else if r % 2 == 0 { format!("(1 - q^{r})") } else { format!("(1 + q^{r})") };
            den.push(if *m == 1 { base } else { format!("{base}^{m}") });
        }
        if den.is_empty() {
            f.write_str(&num)
        } else {
            write!(f, "[{num}] / [{}]", den.join("*"))
        }
    }
}

/// Denominator exponent vectors in `[0, MAX_EXPONENT]^d`, by total then lexicographically.
fn exponent_vectors(d: u32) -> Vec<Vec<u32>> {
    let mut all: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..d {
        all = all
            .into_iter()
            .flat_map(|v| (0..=MAX_EXPONENT).map(move |m| [v.clone(), vec![m]].concat()))
            .collect();
    }
    all.sort_by_key(|v| (v.iter().sum::<u32>(), v.clone()));
    all
}

/// Reconstructs `F` from its known coefficients. The numerator of each
/// candidate is read off from `q^k S(q) den(q)`, which is exact up to
/// `q^{k + max_order}`; the orders past `num_degree` must vanish.
pub fn fit_rational(series: &QSeries, d: u32, num_degree: Option<i64>) -> Result<RationalQ, TqftError> {
    let lo = series.min_order();
    let k = (-lo).max(0);
    let Some(hi) = series.max_order() else {
        let top = series.top_nonzero().unwrap_or(lo);
        let num = (0..=top + k).map(|n| series.coeff(n - k).unwrap_or_else(RationalFunction::zero)).collect();
        return Ok(RationalQ::new(num, k, BTreeMap::new()));
    };
    let top = k + hi;
    let deg = num_degree.unwrap_or(top - VERIFICATION_ORDERS);
    if top - deg < VERIFICATION_ORDERS {
        return Err(TqftError::Underdetermined {
            needed: VERIFICATION_ORDERS,
            available: top - deg,
        });
    }
    let coeffs: Vec<RationalFunction> = (0..=top).map(|n| series.coeff(n - k).unwrap_or_else(RationalFunction::zero)).collect();
    for m in exponent_vectors(d) {
        let cyclo: BTreeMap<u32, u32> = m.iter().enumerate().map(|(r, &e)| (r as u32 + 1, e)).collect();
        let den = denominator_coeffs(&cyclo);
        let num_at = |n: usize| -> RationalFunction {
            (0..=n.min(den.len() - 1))
                .filter(|&j| den[j] != 0)
                .map(|j| coeffs[n - j].scale(&int(den[j])))
                .sum()
        };
        if ((deg + 1).max(0)..=top).all(|n| num_at(n as usize).is_zero()) {
            let num = (0..=deg.max(-1)).map(|n| num_at(n as usize)).collect();
            return Ok(RationalQ::new(num, k, cyclo));
        }
    }
    Err(TqftError::NoFit)
}

/// Outcome of the `q -> 1/q` check under both readings of the coefficient
/// arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalEquationReport {
    pub sign: i64,
    /// `F(1/q, s1, s2) = sign q^{-Delta} F(q, s1, s2)`
    pub holds: bool,
    /// `F(1/q, s2, s2) = sign q^{-Delta} F(q, s1, s2)`; `None` when the
    /// substitution `s1 = s2` is singular.
    pub literal_holds: Option<bool>,
}

pub fn functional_equation_report(f: &RationalQ, delta: i64, eta_size: i64, eta_len: i64, ins_sum: i64) -> FunctionalEquationReport {
    let sign = if (delta + eta_size - eta_len + ins_sum).rem_euclid(2) == 0 { 1 } else { -1 };
    let (inv_num, inv_den) = f.inverted();
    let rhs_num: QLaurent = f
        .numerator()
        .into_iter()
        .map(|(n, c)| (n - delta, c.scale(&int(sign))))
        .collect();
    let rhs_den = f.denominator();
    let right = ql_mul(&rhs_num, &inv_den);
    let holds = ql_mul(&inv_num, &rhs_den) == right;
    let s2 = [Scalar::zero(), Scalar::one(), Scalar::zero()];
    let literal: Result<QLaurent, AlgebraError> = inv_num
        .iter()
        .map(|(&n, c)| c.substitute_linear(0, s2.clone()).map(|x| (n, x)))
        .collect();
    let literal_holds = literal.ok().map(|mut l| {
        l.retain(|_, c| !c.is_zero());
        ql_mul(&l, &rhs_den) == right
    });
    FunctionalEquationReport {
        sign,
        holds,
        literal_holds,
    }
}

/// `F(1/q) = (-1)^{Delta + |eta| - l(eta) + sum i} q^{-Delta} F(q)`
pub fn functional_equation_check(f: &RationalQ, delta: i64, eta_size: i64, eta_len: i64, ins_sum: i64) -> bool {
    functional_equation_report(f, delta, eta_size, eta_len, ins_sum).holds
}

/// `(q^d/d!) ((s1 + s2)/(s1 s2)) (1/2) sum_{i=1}^{d} (1 + (-q)^i)/(1 - (-q)^i)`
/// over the common denominator `prod_{i <= d} (1 - (-q)^i)`.
pub fn stationary_reference_series(d: u32) -> RationalQ {
    assert!(d >= 1);
    let all: BTreeMap<u32, u32> = (1..=d).map(|r| (r, 1)).collect();
    let mut total = vec![0i64];
    for i in 1..=d {
        let others: BTreeMap<u32, u32> = (1..=d).filter(|&r| r != i).map(|r| (r, 1)).collect();
        let rest = denominator_coeffs(&others);
        // 1 + (-q)^i
        let c = if i % 2 == 0 { 1 } else { -1 };
        let mut term = vec![0i64; rest.len() + i as usize];
        for (n, &x) in rest.iter().enumerate() {
            term[n] += x;
            term[n + i as usize] += c * x;
        }
        if term.len() > total.len() {
            total.resize(term.len(), 0);
        }
        for (n, x) in term.into_iter().enumerate() {
            total[n] += x;
        }
    }
    let s1 = RationalFunction::var(0);
    let s2 = RationalFunction::var(1);
    let pref = (&(&s1 + &s2) * &(&s1 * &s2).recip().expect("monomial")).scale(&Scalar::new(1.into(), factorial(d) * 2));
    let mut num = vec![RationalFunction::zero(); d as usize];
    num.extend(total.into_iter().map(|x| pref.scale(&int(x))));
    RationalQ::new(num, 0, all)
}

/// Series indexed by tuples of boundary partitions of size `d`.
#[derive(Clone, Debug, PartialEq)]
pub struct GluingBlock {
    pub d: u32,
    pub entries: BTreeMap<Vec<Partition>, QSeries>,
}

impl GluingBlock {
    pub fn new(d: u32, entries: BTreeMap<Vec<Partition>, QSeries>) -> Result<Self, TqftError> {
        for key in entries.keys() {
            if let Some(p) = key.iter().find(|p| p.size() != d) {
                return Err(TqftError::Incompatible(format!("boundary {p} does not have size {d}")));
            }
        }
        Ok(GluingBlock { d, entries })
    }

    /// `I_{mu nu} = q^d g_{mu nu}`, the unit for gluing.
    pub fn identity(d: u32) -> Self {
        let entries = enumerate_partitions(d)
            .into_iter()
            .map(|mu| {
                let g = nakajima_pairing_closed_form(&mu, &mu);
                (vec![mu.clone(), mu], QSeries::monomial(d as i64, g))
            })
            .collect();
        GluingBlock { d, entries }
    }
}

/// `sum_mu left(.., mu) (g^{mu mu}/q^d) right(mu, ..)`
pub fn glue_series(left: &GluingBlock, right: &GluingBlock) -> Result<GluingBlock, TqftError> {
    if left.d != right.d {
        return Err(TqftError::Incompatible(format!("degrees {} and {}", left.d, right.d)));
    }
    let d = left.d;
    let mut out: BTreeMap<Vec<Partition>, QSeries> = BTreeMap::new();
    for (lk, ls) in &left.entries {
        let Some((mu, prefix)) = lk.split_last() else {
            return Err(TqftError::Incompatible("left block has an empty boundary".into()));
        };
        let weighted = ls.scale(&nakajima_pairing_inverse(mu)).shift(-(d as i64));
        for (rk, rs) in &right.entries {
            if rk.first() != Some(mu) {
                continue;
            }
            let key: Vec<Partition> = prefix.iter().chain(&rk[1..]).cloned().collect();
            let term = &weighted * rs;
            let acc = match out.remove(&key) {
                Some(prev) => &prev + &term,
                None => term,
            };
            out.insert(key, acc);
        }
    }
    Ok(GluingBlock { d, entries: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vertexcore::series::rf;

    fn c() -> RationalFunction {
        let s1 = RationalFunction::var(0);
        let s2 = RationalFunction::var(1);
        (&s1 + &s2) * (&s1 * &s2).recip().unwrap()
    }

    #[test]
    fn stationary_d1_closed_form() {
        let f = stationary_reference_series(1);
        let half = c().scale(&Scalar::new(1.into(), 2.into()));
        let expect = RationalQ::new(vec![rf(0), half.clone(), -&half], 0, [(1, 1)].into());
        assert!(f.same_function(&expect));
        let s = f.expand(4);
        let m = |k: i64| half.scale(&int(k));
        assert_eq!(s.coeff(1), Some(m(1)));
        assert_eq!(s.coeff(2), Some(m(-2)));
        assert_eq!(s.coeff(3), Some(m(2)));
        assert_eq!(s.coeff(4), Some(m(-2)));
    }

    #[test]
    fn stationary_leading_coefficient() {
        for d in 1..=4u32 {
            let s = stationary_reference_series(d).expand(d as i64);
            let want = c().scale(&Scalar::new(1.into(), factorial(d - 1) * 2));
            assert_eq!(s.coeff(d as i64), Some(want));
            assert_eq!(s.top_nonzero(), Some(d as i64));
        }
    }

    #[test]
    fn fit_examples() {
        let s = QSeries::exact([(1, rf(1)), (2, rf(1))]).truncate(8);
        let f = fit_rational(&s, 1, None).unwrap();
        assert!(f.cyclo.is_empty());
        assert_eq!(f.num, vec![rf(0), rf(1), rf(1)]);

        let reference = stationary_reference_series(1);
        let f = fit_rational(&reference.expand(12), 1, None).unwrap();
        assert!(f.same_function(&reference));
        assert_eq!(f.cyclo, [(1, 1)].into());

        // 1/(1 - q^2) lies outside the ansatz for d = 1
        let pole = RationalQ::new(vec![rf(1)], 0, [(2, 1)].into());
        assert_eq!(fit_rational(&pole.expand(12), 1, None), Err(TqftError::NoFit));
        assert!(matches!(fit_rational(&pole.expand(3), 1, Some(2)), Err(TqftError::Underdetermined { .. })));
    }

    #[test]
    fn functional_equation_examples() {
        let f = stationary_reference_series(1);
        assert!(functional_equation_check(&f, 2, 1, 1, 1));
        assert!(!functional_equation_check(&f, 2, 1, 1, 2));
        let k = RationalQ::new(vec![rf(5)], 0, BTreeMap::new());
        assert!(functional_equation_check(&k, 0, 0, 0, 0));
        for d in 1..=4 {
            let d = d as i64;
            assert!(functional_equation_check(&stationary_reference_series(d as u32), 2 * d, d, 1, d));
        }
    }

    #[test]
    fn json_round_trip() {
        let f = stationary_reference_series(2);
        assert_eq!(RationalQ::from_json(&f.to_json()).unwrap(), f);
    }

    #[test]
    fn gluing_identities() {
        for d in 1..=2 {
            let id = GluingBlock::identity(d);
            assert_eq!(glue_series(&id, &id).unwrap(), id);
        }
        let p1 = Partition::new(vec![1]).unwrap();
        let a = QSeries::exact([(1, rf(2)), (2, rf(3))]);
        let b = QSeries::exact([(0, rf(5))]);
        let l = GluingBlock::new(1, [(vec![p1.clone()], a.clone())].into()).unwrap();
        let r = GluingBlock::new(1, [(vec![p1.clone()], b.clone())].into()).unwrap();
        let g = glue_series(&l, &r).unwrap();
        let s1s2 = RationalFunction::var(0) * RationalFunction::var(1);
        let want = (&a * &b).scale(&s1s2).shift(-1);
        assert_eq!(g.entries[&Vec::new()], want);
        let z = GluingBlock::new(1, [(vec![p1.clone(), p1.clone()], a)].into()).unwrap();
        assert_eq!(glue_series(&z, &GluingBlock::identity(1)).unwrap(), z);
    }
}
