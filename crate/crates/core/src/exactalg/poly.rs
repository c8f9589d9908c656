//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by graded-lexicographic monomials
//! (variable 0 is the largest), so iteration order and printing are
//! deterministic.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::scalar::{self, Scalar};

pub type Exponents = SmallVec<[u32; 6]>;

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Exponents);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(smallvec::smallvec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e: Exponents = smallvec::smallvec![0; nvars];
        e[index] = 1;
        Poly::from_terms(nvars, [(e, Scalar::one())])
    }

    /// Linear polynomial `c_0 x_0 + ... + c_{n-1} x_{n-1} + constant`.
    pub fn linear(coeffs: &[Scalar], constant: Scalar) -> Self {
        let n = coeffs.len();
        let mut p = Poly::constant(n, constant);
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                p.add_term(unit_exponents(n, i), c.clone());
            }
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Scalar)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, e: Exponents, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = Monomial(e);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut exp: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.nvars);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        assert_eq!(point.len(), self.nvars);
        let powers = power_table(point, |v| self.degree_in(v), Scalar::one(), |a, b| a * b);
        let mut total = Scalar::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t *= &powers[v][e as usize];
                }
            }
            total += t;
        }
        total
    }

    /// Value modulo the prime `p < 2^63` at a point of residues; `None` when a
    /// coefficient denominator is divisible by `p`.
    pub fn eval_mod(&self, point: &[u64], p: u64) -> Option<u64> {
        assert_eq!(point.len(), self.nvars);
        let mulm = |a: u64, b: u64| ((a as u128 * b as u128) % p as u128) as u64;
        let powers = power_table(point, |v| self.degree_in(v), 1u64, |a, b| mulm(*a, *b));
        let big_p = BigInt::from(p);
        let residue = |x: &BigInt| -> u64 {
            let r = x % &big_p;
            let r = if r.is_negative() { r + &big_p } else { r };
            u64::try_from(r).expect("reduced below p")
        };
        let mut total = 0u64;
        for (m, c) in &self.terms {
            let den = residue(c.denom());
            if den == 0 {
                return None;
            }
            let mut t = mulm(residue(c.numer()), mod_pow(den, p - 2, p));
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = mulm(t, powers[v][e as usize]);
                }
            }
            total = (total + t) % p;
        }
        Some(total)
    }

    /// Values at many integer points, sharing one common denominator and
    /// integer power tables.
    pub fn eval_integer_points(&self, points: &[Vec<i64>]) -> Vec<Scalar> {
        let lcm = scalar::denominator_lcm(self.terms.values());
        let terms: Vec<(&Exponents, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| (&m.0, (c * Scalar::from_integer(lcm.clone())).to_integer()))
            .collect();
        let maxdeg: Vec<u32> = (0..self.nvars).map(|v| self.degree_in(v)).collect();
        points
            .iter()
            .map(|p| {
                assert_eq!(p.len(), self.nvars);
                let powers: Vec<Vec<BigInt>> = p
                    .iter()
                    .zip(&maxdeg)
                    .map(|(&x, &d)| {
                        let x = BigInt::from(x);
                        let mut row = vec![BigInt::one()];
                        for k in 0..d as usize {
                            let next = &row[k] * &x;
                            row.push(next);
                        }
                        row
                    })
                    .collect();
                let mut total = BigInt::zero();
                for (e, c) in &terms {
                    let mut t = c.clone();
                    for (v, &k) in e.iter().enumerate() {
                        if k > 0 {
                            t *= &powers[v][k as usize];
                        }
                    }
                    total += t;
                }
                Scalar::new(total, lcm.clone())
            })
            .collect()
    }

    pub fn substitute(&self, var: usize, value: &Poly) -> Poly {
        assert_eq!(value.nvars, self.nvars);
        // group by the exponent of `var`, then Horner in descending powers
        let mut by_power: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = std::mem::replace(&mut e[var], 0);
            by_power
                .entry(k)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(e, c.clone());
        }
        let top = match by_power.keys().next_back() {
            Some(&k) => k,
            None => return Poly::zero(self.nvars),
        };
        let mut acc = Poly::zero(self.nvars);
        for k in (0..=top).rev() {
            acc = &acc * value;
            if let Some(p) = by_power.get(&k) {
                acc = &acc + p;
            }
        }
        acc
    }

    /// Re-embeds into `nvars` variables, sending variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(nvars);
        for (m, c) in &self.terms {
            let mut e: Exponents = smallvec::smallvec![0; nvars];
            for (i, &k) in m.0.iter().enumerate() {
                e[map[i]] += k;
            }
            out.add_term(e, c.clone());
        }
        out
    }

    /// Exact division by `c_0 x_0 + ... + c_{n-1} x_{n-1}` (homogeneous linear,
    /// not all zero). Returns `None` when the division leaves a remainder.
    pub fn div_exact_linear(&self, coeffs: &[Scalar]) -> Option<Poly> {
        assert_eq!(coeffs.len(), self.nvars);
        let lead = coeffs.iter().position(|c| !c.is_zero())?;
        let lead_inv = coeffs[lead].recip();
        // rest = sum of the other terms of the divisor
        let rest: Vec<(usize, Scalar)> = coeffs
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != lead && !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect();
        // coefficient polynomials A_k of x_lead^k
        let mut by_power: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = std::mem::replace(&mut e[lead], 0);
            by_power
                .entry(k)
                .or_insert_with(|| Poly::zero(self.nvars))
                .add_term(e, c.clone());
        }
        let top = match by_power.keys().next_back() {
            Some(&k) => k,
            None => return Some(Poly::zero(self.nvars)),
        };
        if top == 0 {
            return None;
        }
        // synthetic division: Q_{k-1} = (A_k - rest * Q_k) / c_lead
        let mut quotient = Poly::zero(self.nvars);
        let mut carry = Poly::zero(self.nvars);
        for k in (1..=top).rev() {
            let a_k = by_power.remove(&k).unwrap_or_else(|| Poly::zero(self.nvars));
            let q = (&a_k - &carry).scale(&lead_inv);
            carry = q.mul_linear_rest(&rest);
            for (m, c) in q.terms {
                let mut e = m.0;
                e[lead] += k - 1;
                quotient.add_term(e, c);
            }
        }
        let a_0 = by_power.remove(&0).unwrap_or_else(|| Poly::zero(self.nvars));
        if (&a_0 - &carry).is_zero() {
            Some(quotient)
        } else {
            None
        }
    }

    fn mul_linear_rest(&self, rest: &[(usize, Scalar)]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (i, c) in rest {
            for (m, v) in &self.terms {
                let mut e = m.0.clone();
                e[*i] += 1;
                out.add_term(e, v * c);
            }
        }
        out
    }

    /// Writes `self = factor * primitive` where `primitive` has coprime integer
    /// coefficients and a positive leading (grlex-largest) coefficient.
    pub fn primitive_part(&self) -> (Scalar, Poly) {
        if self.is_zero() {
            return (Scalar::zero(), self.clone());
        }
        let lcm = scalar::denominator_lcm(self.terms.values());
        let scaled: Vec<Scalar> = self
            .terms
            .values()
            .map(|c| c * Scalar::from_integer(lcm.clone()))
            .collect();
        let g = scalar::numerator_gcd(scaled.iter());
        let mut factor = Scalar::new(g, lcm);
        if self.terms.values().next_back().unwrap().is_negative() {
            factor = -factor;
        }
        let inv = factor.recip();
        (factor, self.scale(&inv))
    }

    pub fn render(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = render_monomial(m, names);
            if mono.is_empty() {
                out.push_str(&scalar::render(&abs));
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                let _ = write!(out, "{}*{}", scalar::render(&abs), mono);
            }
        }
        out
    }
}

fn unit_exponents(n: usize, i: usize) -> Exponents {
    let mut e: Exponents = smallvec::smallvec![0; n];
    e[i] = 1;
    e
}

fn render_monomial(m: &Monomial, names: &[&str]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].to_string()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.0.clone(), c.clone());
        }
        big
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.0.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Poly {
            nvars: self.nvars,
            terms: acc,
        }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

fn power_table<T: Clone>(point: &[T], degree: impl Fn(usize) -> u32, one: T, mul: impl Fn(&T, &T) -> T) -> Vec<Vec<T>> {
    point
        .iter()
        .enumerate()
        .map(|(v, x)| {
            let mut row = vec![one.clone()];
            for k in 0..degree(v) as usize {
                let next = mul(&row[k], x);
                row.push(next);
            }
            row
        })
        .collect()
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::int;

    fn s(i: usize) -> Poly {
        Poly::var(3, i)
    }

    #[test]
    fn render_is_graded_lex_descending() {
        let p = &(&s(0) + &s(1)).pow(2) + &Poly::constant(3, int(-3));
        assert_eq!(p.render(&["s1", "s2", "s3"]), "s1^2 + 2*s1*s2 + s2^2 - 3");
    }

    #[test]
    fn exact_linear_division() {
        let l = &s(0) - &s(1);
        let p = &(&l * &l) * &s(2);
        let q = p.div_exact_linear(&[int(1), int(-1), int(0)]).unwrap();
        assert_eq!(q, &l * &s(2));
        assert!(p.div_exact_linear(&[int(1), int(1), int(0)]).is_none());
        assert!(Poly::one(3).div_exact_linear(&[int(0), int(0), int(2)]).is_none());
    }

    #[test]
    fn substitution_composes() {
        // (s1 + s3)^2 with s3 := s1 + s2
        let p = (&s(0) + &s(2)).pow(2);
        let r = p.substitute(2, &(&s(0) + &s(1)));
        assert_eq!(r, (&s(0).scale(&int(2)) + &s(1)).pow(2));
    }

    #[test]
    fn primitive_part_normalizes_sign_and_content() {
        let p = (&s(0).scale(&int(-4)) + &s(1).scale(&int(6))).scale(&crate::exactalg::scalar::frac(1, 3));
        let (c, q) = p.primitive_part();
        assert_eq!(&q.scale(&c), &p);
        assert_eq!(q.render(&["s1", "s2", "s3"]), "2*s1 - 3*s2");
    }
}

