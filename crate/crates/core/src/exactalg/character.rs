//! Torus characters: Laurent polynomials in t1, t2, t3 and fractions with
//! denominators made of factors `(1 - t^m)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use super::linear::LinearForm;
use super::ratfunc::RationalFunction;
use super::scalar::{self, int, Scalar};
use super::AlgebraError;

/// Exponent vector; the actual exponent is `e / den` of the owning polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TExp(pub [i64; 3]);

impl Ord for TExp {
    fn cmp(&self, other: &Self) -> Ordering {
        let a: i64 = self.0.iter().sum();
        let b: i64 = other.0.iter().sum();
        a.cmp(&b).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for TExp {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Integer-coefficient Laurent polynomial with exponents in `(1/den) Z^3`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    den: i64,
    terms: BTreeMap<TExp, i64>,
}

impl Default for LaurentPoly {
    fn default() -> Self {
        LaurentPoly::zero()
    }
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            den: 1,
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        LaurentPoly::monomial([0, 0, 0], 1)
    }

    pub fn monomial(e: [i64; 3], c: i64) -> Self {
        let mut p = LaurentPoly::zero();
        p.add_term(e, c);
        p
    }

    /// Monomial with exponent `e / den`.
    pub fn monomial_frac(e: [i64; 3], den: i64, c: i64) -> Self {
        assert!(den > 0);
        let mut p = LaurentPoly {
            den,
            terms: BTreeMap::new(),
        };
        p.add_term(e, c);
        p.normalize_den()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ([i64; 3], i64)>) -> Self {
        let mut p = LaurentPoly::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// Terms as `(raw exponent, coefficient)`; divide exponents by `den()`.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = ([i64; 3], i64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.0, c))
    }

    /// Terms with exact rational exponents.
    pub fn rational_terms(&self) -> Vec<([Scalar; 3], i64)> {
        self.terms
            .iter()
            .map(|(e, &c)| (e.0.map(|x| scalar::frac(x, self.den)), c))
            .collect()
    }

    pub fn add_term(&mut self, e: [i64; 3], c: i64) {
        if c == 0 {
            return;
        }
        let key = TExp(e);
        let entry = self.terms.entry(key).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, e: [i64; 3]) -> i64 {
        self.terms.get(&TExp(e)).copied().unwrap_or(0)
    }

    /// Sum of coefficients (the rank of the virtual representation).
    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Rewrites with lattice denominator `den`, which must be a multiple of the current one.
    pub fn with_den(&self, den: i64) -> Self {
        assert!(den % self.den == 0, "lattice refinement must be a multiple");
        let k = den / self.den;
        LaurentPoly {
            den,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (TExp(e.0.map(|x| x * k)), c))
                .collect(),
        }
    }

    fn normalize_den(self) -> Self {
        let g = self
            .terms
            .keys()
            .flat_map(|e| e.0)
            .fold(self.den, |acc, x| acc.gcd(&x));
        if g <= 1 {
            return self;
        }
        LaurentPoly {
            den: self.den / g,
            terms: self
                .terms
                .into_iter()
                .map(|(e, c)| (TExp(e.0.map(|x| x / g)), c))
                .collect(),
        }
    }

    fn align(&self, other: &Self) -> (Self, Self) {
        let l = self.den.lcm(&other.den);
        (self.with_den(l), other.with_den(l))
    }

    /// The involution `t_i -> t_i^{-1}`.
    pub fn bar(&self) -> Self {
        LaurentPoly {
            den: self.den,
            terms: self.terms.iter().map(|(e, &c)| (TExp(e.0.map(|x| -x)), c)).collect(),
        }
    }

    /// Multiplies by the monomial `t^(e / den)`.
    pub fn shift(&self, e: [i64; 3], den: i64) -> Self {
        self * &LaurentPoly::monomial_frac(e, den, 1)
    }

    pub fn scale(&self, c: i64) -> Self {
        if c == 0 {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            den: self.den,
            terms: self.terms.iter().map(|(e, &v)| (*e, v * c)).collect(),
        }
    }

    /// Applies an integer linear change of exponents `e -> M e` and a new lattice denominator.
    pub fn map_exponents(&self, den: i64, f: impl Fn([i64; 3]) -> [i64; 3]) -> Self {
        let mut out = LaurentPoly {
            den,
            terms: BTreeMap::new(),
        };
        for (e, &c) in &self.terms {
            out.add_term(f(e.0), c);
        }
        out.normalize_den()
    }

    /// Exact division by `(1 - t^m)`, `None` if not divisible.
    pub fn div_one_minus(&self, m: [i64; 3]) -> Option<Self> {
        if m == [0, 0, 0] {
            return None;
        }
        let p = m.iter().position(|&x| x != 0)?;
        if m[p] < 0 {
            // 1 - t^m = -t^m (1 - t^-m)
            let q = self.div_one_minus(m.map(|x| -x))?;
            return Some(q.shift(m.map(|x| -x), self.den).scale(-1));
        }
        // bucket terms into chains base + k m
        let mut chains: BTreeMap<TExp, BTreeMap<i64, i64>> = BTreeMap::new();
        for (e, &c) in &self.terms {
            let k = Integer::div_floor(&e.0[p], &m[p]);
            let base = [e.0[0] - k * m[0], e.0[1] - k * m[1], e.0[2] - k * m[2]];
            chains.entry(TExp(base)).or_default().insert(k, c);
        }
        let mut out = LaurentPoly {
            den: self.den,
            terms: BTreeMap::new(),
        };
        for (base, chain) in chains {
            let lo = *chain.keys().next().unwrap();
            let hi = *chain.keys().next_back().unwrap();
            let mut acc = 0i64;
            for k in lo..=hi {
                acc += chain.get(&k).copied().unwrap_or(0);
                if k < hi {
                    out.add_term(
                        [base.0[0] + k * m[0], base.0[1] + k * m[1], base.0[2] + k * m[2]],
                        acc,
                    );
                }
            }
            if acc != 0 {
                return None;
            }
        }
        Some(out)
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let names = ["t1", "t2", "t3"];
        let mut out = String::new();
        for (idx, (e, &c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = e
                .0
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| {
                    let exp = scalar::render(&scalar::frac(x, self.den));
                    if exp == "1" {
                        names[i].to_string()
                    } else if exp.contains('/') || exp.starts_with('-') {
                        format!("{}^({})", names[i], exp)
                    } else {
                        format!("{}^{}", names[i], exp)
                    }
                })
                .collect();
            let mono = mono.join("*");
            if idx == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            let a = c.abs();
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else if a == 1 {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let (mut a, b) = self.align(rhs);
        for (e, &c) in &b.terms {
            a.add_term(e.0, c);
        }
        a.normalize_den()
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &rhs.scale(-1)
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1)
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let (a, b) = self.align(rhs);
        let mut out = LaurentPoly {
            den: a.den,
            terms: BTreeMap::new(),
        };
        for (ea, &ca) in &a.terms {
            for (eb, &cb) in &b.terms {
                out.add_term([ea.0[0] + eb.0[0], ea.0[1] + eb.0[1], ea.0[2] + eb.0[2]], ca * cb);
            }
        }
        out.normalize_den()
    }
}

/// `num / prod (1 - t^m)` over the denominator factors `m` (exponents on the
/// numerator's lattice, stored as rational vectors `m / den`).
#[derive(Clone, Debug)]
pub struct TCharacter {
    num: LaurentPoly,
    den: Vec<([i64; 3], i64)>,
}

impl PartialEq for TCharacter {
    fn eq(&self, other: &Self) -> bool {
        (&self.num * &other.den_poly()) == (&other.num * &self.den_poly())
    }
}

impl Eq for TCharacter {}

impl From<LaurentPoly> for TCharacter {
    fn from(num: LaurentPoly) -> Self {
        TCharacter { num, den: Vec::new() }
    }
}

impl TCharacter {
    /// `num / prod_m (1 - t^(m/den))`.
    pub fn fraction(num: LaurentPoly, factors: impl IntoIterator<Item = ([i64; 3], i64)>) -> Self {
        let den = factors
            .into_iter()
            .map(|(m, d)| {
                assert!(m != [0, 0, 0], "denominator factor 1 - 1 vanishes");
                reduce_exp(m, d)
            })
            .collect();
        TCharacter { num, den }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[([i64; 3], i64)] {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    fn den_poly(&self) -> LaurentPoly {
        self.den.iter().fold(LaurentPoly::one(), |acc, &(m, d)| {
            &acc * &(&LaurentPoly::one() - &LaurentPoly::monomial_frac(m, d, 1))
        })
    }

    /// Cancels every denominator factor that divides the numerator.
    pub fn simplify(&self) -> TCharacter {
        let mut num = self.num.clone();
        let mut rest = Vec::new();
        if num.is_zero() {
            return TCharacter::from(num);
        }
        for &(m, d) in &self.den {
            let l = num.den().lcm(&d);
            let lifted = num.with_den(l);
            let mm = m.map(|x| x * (l / d));
            match lifted.div_one_minus(mm) {
                Some(q) => num = q.normalize_den(),
                None => rest.push((m, d)),
            }
        }
        rest.sort();
        TCharacter { num, den: rest }
    }

    /// Simplifies and demands a Laurent polynomial.
    pub fn into_polynomial(&self) -> Result<LaurentPoly, AlgebraError> {
        let s = self.simplify();
        if s.den.is_empty() {
            Ok(s.num)
        } else {
            Err(AlgebraError::NotPolynomial(self.to_string()))
        }
    }

    pub fn bar(&self) -> TCharacter {
        TCharacter {
            num: self.num.bar(),
            den: self.den.iter().map(|&(m, d)| (m.map(|x| -x), d)).collect(),
        }
    }

    /// Exact truncation of the Laurent expansion: all terms `t^e` with
    /// `grading . e <= order`. Each factor is expanded in the direction where
    /// `grading` increases.
    pub fn expand_ascending(&self, grading: [i64; 3], order: i64) -> Result<LaurentPoly, AlgebraError> {
        let mut lattice = self.num.den();
        for &(_, d) in &self.den {
            lattice = lattice.lcm(&d);
        }
        let mut num = self.num.with_den(lattice);
        let mut steps = Vec::new();
        for &(m, d) in &self.den {
            let m = m.map(|x| x * (lattice / d));
            let g: i64 = (0..3).map(|i| grading[i] * m[i]).sum();
            if g == 0 {
                return Err(AlgebraError::NotExpandable);
            }
            if g > 0 {
                steps.push(m);
            } else {
                // 1/(1 - t^m) = -t^-m / (1 - t^-m)
                num = (&num * &LaurentPoly::monomial_frac(m.map(|x| -x), lattice, 1)).scale(-1).with_den(lattice);
                steps.push(m.map(|x| -x));
            }
        }
        let bound = order * lattice;
        let graded = |e: &[i64; 3]| -> i64 { (0..3).map(|i| grading[i] * e[i]).sum() };
        let mut acc = num.with_den(lattice);
        for &m in &steps {
            let mut next = LaurentPoly {
                den: lattice,
                terms: BTreeMap::new(),
            };
            for (e, c) in acc.terms() {
                let mut e = e;
                while graded(&e) <= bound {
                    next.add_term(e, c);
                    e = [e[0] + m[0], e[1] + m[1], e[2] + m[2]];
                }
            }
            acc = next;
        }
        let mut out = LaurentPoly {
            den: lattice,
            terms: BTreeMap::new(),
        };
        for (e, c) in acc.terms() {
            if graded(&e) <= bound {
                out.add_term(e, c);
            }
        }
        Ok(out.normalize_den())
    }
}

fn reduce_exp(m: [i64; 3], d: i64) -> ([i64; 3], i64) {
    let g = m.iter().fold(d, |acc, &x| acc.gcd(&x));
    (m.map(|x| x / g), d / g)
}

impl fmt::Display for TCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({})", self.num)?;
        for &(m, d) in &self.den {
            let t = &LaurentPoly::one() - &LaurentPoly::monomial_frac(m, d, 1);
            write!(f, "/({t})")?;
        }
        Ok(())
    }
}

impl Add<&TCharacter> for &TCharacter {
    type Output = TCharacter;
    fn add(self, rhs: &TCharacter) -> TCharacter {
        if self.den == rhs.den {
            return TCharacter {
                num: &self.num + &rhs.num,
                den: self.den.clone(),
            };
        }
        let mut den = self.den.clone();
        den.extend(rhs.den.iter().copied());
        let num = &(&self.num * &rhs.den_poly()) + &(&rhs.num * &self.den_poly());
        TCharacter { num, den }.simplify()
    }
}

impl Sub<&TCharacter> for &TCharacter {
    type Output = TCharacter;
    fn sub(self, rhs: &TCharacter) -> TCharacter {
        self + &(-rhs)
    }
}

impl Mul<&TCharacter> for &TCharacter {
    type Output = TCharacter;
    fn mul(self, rhs: &TCharacter) -> TCharacter {
        let mut den = self.den.clone();
        den.extend(rhs.den.iter().copied());
        TCharacter {
            num: &self.num * &rhs.num,
            den,
        }
        .simplify()
    }
}

impl Neg for &TCharacter {
    type Output = TCharacter;
    fn neg(self) -> TCharacter {
        TCharacter {
            num: self.num.scale(-1),
            den: self.den.clone(),
        }
    }
}

/// `prod_w (w . s)^{n_w}` for a Laurent polynomial `sum n_w t^w`.
pub fn euler_class(ch: &LaurentPoly) -> Result<RationalFunction, AlgebraError> {
    // Cancel at the level of normalized forms before expanding anything.
    let mut net: BTreeMap<LinearForm, i64> = BTreeMap::new();
    let mut constant = int(1);
    let den = int(ch.den());
    for (e, n) in ch.terms() {
        let (k, form) = LinearForm::normalize(e).ok_or(AlgebraError::ZeroWeight)?;
        constant *= scalar::pow(&(int(k) / &den), n);
        *net.entry(form).or_insert(0) += n;
    }
    let mut num = super::poly::Poly::one(super::linear::NVARS);
    let mut forms = BTreeMap::new();
    for (form, n) in net {
        if n > 0 {
            num = &num * &form.to_poly().pow(n as u32);
        } else if n < 0 {
            forms.insert(form, (-n) as u32);
        }
    }
    RationalFunction::from_parts(num.scale(&constant), int(1), forms)
}

/// `sum_w n_w (w . s)^k / k!`
pub fn chern_character_eval(ch: &LaurentPoly, k: u32) -> RationalFunction {
    use super::poly::Poly;
    let mut total = Poly::zero(3);
    let d = int(ch.den());
    for (e, n) in ch.terms() {
        let w = Poly::linear(&e.map(|x| int(x) / &d), int(0));
        total = &total + &w.pow(k).scale(&int(n));
    }
    let kf = Scalar::from_integer(scalar::factorial(k));
    RationalFunction::from_poly(total.scale(&kf.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(e: [i64; 3]) -> LaurentPoly {
        LaurentPoly::monomial(e, 1)
    }

    #[test]
    fn geometric_expansion() {
        let c = TCharacter::fraction(LaurentPoly::one(), [([0, 0, 1], 1)]);
        let e = c.expand_ascending([0, 0, 1], 2).unwrap();
        assert_eq!(e, LaurentPoly::from_terms([([0, 0, 0], 1), ([0, 0, 1], 1), ([0, 0, 2], 1)]));
    }

    #[test]
    fn exact_division_by_one_minus() {
        let num = &LaurentPoly::one() - &t([0, 0, 2]);
        let c = TCharacter::fraction(num, [([0, 0, 1], 1)]).simplify();
        assert!(c.is_polynomial());
        assert_eq!(c.numerator(), &(&LaurentPoly::one() + &t([0, 0, 1])));
        // negative exponents and reversed orientation
        let num = &t([0, 0, -3]) - &LaurentPoly::one();
        let c = TCharacter::fraction(num.clone(), [([0, 0, -1], 1)]);
        let p = c.into_polynomial().unwrap();
        assert_eq!(&p * &(&LaurentPoly::one() - &t([0, 0, -1])), num);
        let bad = TCharacter::fraction(t([1, 0, 0]), [([0, 0, 1], 1)]);
        assert!(matches!(bad.into_polynomial(), Err(AlgebraError::NotPolynomial(_))));
    }

    #[test]
    fn euler_and_chern_examples() {
        assert_eq!(euler_class(&t([1, 0, 0])).unwrap(), RationalFunction::var(0));
        let g1 = (&t([-1, 0, 0]) + &t([0, -1, 0])).scale(-1);
        let expect = &RationalFunction::weight_pow([1, 0, 0], -1).unwrap() * &RationalFunction::weight_pow([0, 1, 0], -1).unwrap();
        assert_eq!(euler_class(&g1).unwrap(), expect);
        let sq = RationalFunction::weight([1, -1, 0]).pow(2).unwrap();
        assert_eq!(euler_class(&LaurentPoly::monomial([1, -1, 0], 2)).unwrap(), sq);
        assert!(matches!(euler_class(&LaurentPoly::one()), Err(AlgebraError::ZeroWeight)));

        let c = chern_character_eval(&t([1, 1, 0]), 2);
        assert_eq!(c, RationalFunction::weight([1, 1, 0]).pow(2).unwrap().scale(&scalar::frac(1, 2)));
        let x = &(&LaurentPoly::one() - &t([1, 0, 0])) * &(&LaurentPoly::one() - &t([0, 1, 0]));
        assert_eq!(chern_character_eval(&x, 2), &RationalFunction::var(0) * &RationalFunction::var(1));
        assert_eq!(chern_character_eval(&x, 0), RationalFunction::zero());
    }

    #[test]
    fn fractional_exponents_weight() {
        // t3^(1/2) has weight s3/2
        let p = LaurentPoly::monomial_frac([0, 0, 1], 2, 1);
        assert_eq!(euler_class(&p).unwrap(), RationalFunction::var(2).scale(&scalar::frac(1, 2)));
        assert_eq!(p.render(), "t3^(1/2)");
    }
}
