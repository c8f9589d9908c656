//! Rational functions in s1, s2, s3 whose denominators are products of linear
//! forms.
//!
//! Every denominator arising from equivariant localization here is a product
//! of weights, so the denominator is kept factored. A value is canonical when
//! no denominator form divides the numerator; since `Q[s1,s2,s3]` is a UFD and
//! the forms are normalized, two canonical values are equal iff their fields
//! are equal.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::linear::{LinearForm, NAMES, NVARS};
use super::poly::{mod_pow, Poly};
use super::scalar::{self, int, Scalar};
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: BTreeMap<LinearForm, u32>,
}

/// Sample coordinates used to build points on hyperplanes for cheap
/// non-divisibility screening.
const PROBE: [i64; NVARS] = [7919, 104_729, 1_299_709];

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            num: Poly::zero(NVARS),
            den: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::from_scalar(Scalar::one())
    }

    pub fn from_scalar(c: Scalar) -> Self {
        RationalFunction {
            num: Poly::constant(NVARS, c),
            den: BTreeMap::new(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_scalar(int(n))
    }

    pub fn from_poly(p: Poly) -> Self {
        assert_eq!(p.nvars(), NVARS);
        RationalFunction {
            num: p,
            den: BTreeMap::new(),
        }
    }

    /// The variable `s_{index+1}`.
    pub fn var(index: usize) -> Self {
        Self::from_poly(Poly::var(NVARS, index))
    }

    /// `w1 s1 + w2 s2 + w3 s3`
    pub fn weight(w: [i64; NVARS]) -> Self {
        Self::from_poly(Poly::linear(&w.map(int), int(0)))
    }

    /// `(w . s)^exp`, possibly with negative `exp`.
    pub fn weight_pow(w: [i64; NVARS], exp: i64) -> Result<Self, AlgebraError> {
        let (scale, form) = LinearForm::normalize(w).ok_or(AlgebraError::ZeroWeight)?;
        if exp == 0 {
            return Ok(Self::one());
        }
        let c = scalar::pow(&int(scale), exp);
        if exp > 0 {
            Ok(Self::from_poly(form.to_poly().pow(exp as u32).scale(&c)))
        } else {
            let mut den = BTreeMap::new();
            den.insert(form, (-exp) as u32);
            Ok(RationalFunction {
                num: Poly::constant(NVARS, c),
                den,
            })
        }
    }

    /// Builds `num / (c * prod forms^e)` and reduces it.
    pub fn from_parts(num: Poly, constant: Scalar, forms: BTreeMap<LinearForm, u32>) -> Result<Self, AlgebraError> {
        if constant.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let num = num.scale(&constant.recip());
        Ok(Self::reduced(num, forms))
    }

    fn reduced(mut num: Poly, mut den: BTreeMap<LinearForm, u32>) -> Self {
        den.retain(|_, e| *e > 0);
        if num.is_zero() {
            return Self::zero();
        }
        for (form, e) in den.iter_mut() {
            while *e > 0 && vanishes_on(&num, form) {
                match num.div_exact_linear(&form.coeffs()) {
                    Some(q) => {
                        num = q;
                        *e -= 1;
                    }
                    None => break,
                }
            }
        }
        den.retain(|_, e| *e > 0);
        RationalFunction { num, den }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_empty() && self.num == Poly::one(NVARS)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    pub fn denominator_forms(&self) -> &BTreeMap<LinearForm, u32> {
        &self.den
    }

    pub fn as_scalar(&self) -> Option<Scalar> {
        if self.den.is_empty() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Degree of numerator minus degree of denominator (for homogeneous values).
    pub fn degree(&self) -> Option<i64> {
        let n = self.num.total_degree()? as i64;
        Some(n - self.den.values().map(|&e| e as i64).sum::<i64>())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, exp: i64) -> Result<Self, AlgebraError> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = &acc * &base;
        }
        Ok(acc)
    }

    /// Reciprocal; supported when the numerator is a single term or a
    /// homogeneous linear polynomial.
    pub fn recip(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let den_poly = self.denominator_poly();
        if let Some(c) = self.num.constant_value() {
            return Ok(Self::from_poly(den_poly.scale(&c.recip())));
        }
        if self.num.len() == 1 {
            let (m, c) = self.num.terms().next().unwrap();
            let mut den = BTreeMap::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let mut w = [0i64; NVARS];
                    w[i] = 1;
                    den.insert(LinearForm(w), e);
                }
            }
            return Ok(Self::reduced(den_poly.scale(&c.recip()), den));
        }
        if let Some((c, form)) = homogeneous_linear(&self.num) {
            let mut den = BTreeMap::new();
            den.insert(form, 1);
            return Ok(Self::reduced(den_poly.scale(&c.recip()), den));
        }
        Err(AlgebraError::NotInvertible(self.to_string()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &other.recip()?)
    }

    pub fn denominator_poly(&self) -> Poly {
        let mut p = Poly::one(NVARS);
        for (form, &e) in &self.den {
            p = &p * &form.to_poly().pow(e);
        }
        p
    }

    /// Value at a rational point, `None` where the denominator vanishes.
    pub fn eval(&self, point: &[Scalar]) -> Option<Scalar> {
        let mut d = Scalar::one();
        for (form, &e) in &self.den {
            let v = form.eval(point);
            if v.is_zero() {
                return None;
            }
            d *= num_traits::pow(v, e as usize);
        }
        Some(self.num.eval(point) / d)
    }

    /// Substitutes `s_var := sum_i image[i] s_i` (with `image[var] == 0`).
    /// Fails with `PoleSurvived` when a denominator form maps to zero.
    pub fn substitute_linear(&self, var: usize, image: [Scalar; NVARS]) -> Result<Self, AlgebraError> {
        assert!(image[var].is_zero(), "substitution must eliminate the variable");
        let value = Poly::linear(&image, int(0));
        let num = self.num.substitute(var, &value);
        let mut constant = Scalar::one();
        let mut den = BTreeMap::new();
        for (form, &e) in &self.den {
            let mut w: Vec<Scalar> = form.coeffs().to_vec();
            let lv = std::mem::replace(&mut w[var], Scalar::zero());
            for i in 0..NVARS {
                w[i] += &lv * &image[i];
            }
            let lcm = scalar::denominator_lcm(w.iter());
            let scaled = w.map_to_i64(&lcm)?;
            match LinearForm::normalize(scaled) {
                None => return Err(AlgebraError::PoleSurvived(form.to_string())),
                Some((k, f)) => {
                    let c = Scalar::new(BigInt::from(k), lcm);
                    constant *= num_traits::pow(c, e as usize);
                    *den.entry(f).or_insert(0) += e;
                }
            }
        }
        Ok(Self::reduced(num.scale(&constant.recip()), den))
    }

    /// Specializes `s3 = (s1 + s2) / a`.
    pub fn specialize_s3(&self, a: i64) -> Result<Self, AlgebraError> {
        let c = scalar::frac(1, a);
        self.substitute_linear(2, [c.clone(), c, Scalar::zero()])
    }

    /// Sets `s3 = 0`.
    pub fn at_s3_zero(&self) -> Result<Self, AlgebraError> {
        self.substitute_linear(2, [Scalar::zero(), Scalar::zero(), Scalar::zero()])
    }

    pub fn involves_var(&self, var: usize) -> bool {
        self.num.degree_in(var) > 0 || self.den.keys().any(|f| f.0[var] != 0)
    }

    /// Numerator with coprime integer coefficients together with the positive
    /// integer constant of the denominator.
    fn integer_parts(&self) -> (Poly, BigInt) {
        let lcm = scalar::denominator_lcm(self.num.terms().map(|(_, c)| c));
        (self.num.scale(&Scalar::from_integer(lcm.clone())), lcm)
    }

    pub fn render_num(&self) -> String {
        self.integer_parts().0.render(&NAMES)
    }

    pub fn render_den(&self) -> String {
        let (_, c) = self.integer_parts();
        let mut parts = Vec::new();
        if !c.is_one() || self.den.is_empty() {
            parts.push(c.to_string());
        }
        for (form, &e) in &self.den {
            let base = render_form_factor(form);
            if e == 1 {
                parts.push(base);
            } else {
                parts.push(format!("{base}^{e}"));
            }
        }
        parts.join("*")
    }
}

fn render_form_factor(form: &LinearForm) -> String {
    let nonzero = form.0.iter().filter(|&&c| c != 0).count();
    if nonzero == 1 && form.0.contains(&1) {
        form.to_string()
    } else {
        format!("({form})")
    }
}

trait ToI64Vec {
    fn map_to_i64(&self, lcm: &BigInt) -> Result<[i64; NVARS], AlgebraError>;
}

impl ToI64Vec for Vec<Scalar> {
    fn map_to_i64(&self, lcm: &BigInt) -> Result<[i64; NVARS], AlgebraError> {
        let mut out = [0i64; NVARS];
        for (o, v) in out.iter_mut().zip(self) {
            let x = (v * Scalar::from_integer(lcm.clone())).to_integer();
            *o = i64::try_from(x).map_err(|_| AlgebraError::Overflow)?;
        }
        Ok(out)
    }
}

const SCREEN_PRIME: u64 = (1 << 61) - 1;

/// Necessary condition for `form | p`: `p` vanishes at a point of the
/// hyperplane. Screened modulo a prime first; a nonzero residue settles it.
fn vanishes_on(p: &Poly, form: &LinearForm) -> bool {
    let lead = form.0.iter().position(|&c| c != 0).unwrap();
    let m = SCREEN_PRIME as i128;
    let red = |x: i128| x.rem_euclid(m) as u64;
    let rest: i128 = form.0.iter().zip(PROBE).enumerate().filter(|(i, _)| *i != lead).map(|(_, (&c, x))| c as i128 * x as i128).sum();
    let lead_c = red(form.0[lead] as i128);
    if lead_c != 0 {
        let inv = mod_pow(lead_c, SCREEN_PRIME - 2, SCREEN_PRIME);
        let mut point: Vec<u64> = PROBE.iter().map(|&x| red(x as i128)).collect();
        point[lead] = ((red(-rest) as u128 * inv as u128) % SCREEN_PRIME as u128) as u64;
        if let Some(v) = p.eval_mod(&point, SCREEN_PRIME) {
            if v != 0 {
                return false;
            }
        }
    }
    let mut point: Vec<Scalar> = PROBE.iter().map(|&x| int(x)).collect();
    point[lead] = Scalar::zero();
    let rest = form.eval(&point);
    point[lead] = -rest / int(form.0[lead]);
    p.eval(&point).is_zero()
}

fn homogeneous_linear(p: &Poly) -> Option<(Scalar, LinearForm)> {
    let mut w = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
    for (m, c) in p.terms() {
        if m.degree() != 1 {
            return None;
        }
        let i = m.0.iter().position(|&e| e == 1).unwrap();
        w[i] = c.clone();
    }
    let lcm = scalar::denominator_lcm(w.iter());
    let ints = w.to_vec().map_to_i64(&lcm).ok()?;
    let (k, form) = LinearForm::normalize(ints)?;
    Some((Scalar::new(BigInt::from(k), lcm), form))
}

impl Add<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return RationalFunction::reduced(&self.num + &rhs.num, self.den.clone());
        }
        let mut den = self.den.clone();
        for (f, &e) in &rhs.den {
            let slot = den.entry(*f).or_insert(0);
            *slot = (*slot).max(e);
        }
        let lift = |x: &RationalFunction| {
            let mut p = x.num.clone();
            for (f, &e) in &den {
                let have = x.den.get(f).copied().unwrap_or(0);
                if e > have {
                    p = &p * &f.to_poly().pow(e - have);
                }
            }
            p
        };
        let num = &lift(self) + &lift(rhs);
        RationalFunction::reduced(num, den)
    }
}

impl Sub<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Mul<&RationalFunction> for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        let mut den = self.den.clone();
        for (f, &e) in &rhs.den {
            *den.entry(*f).or_insert(0) += e;
        }
        RationalFunction::reduced(&self.num * &rhs.num, den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl std::iter::Sum for RationalFunction {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(RationalFunction::zero(), |a, b| &a + &b)
    }
}

impl std::iter::Product for RationalFunction {
    fn product<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(RationalFunction::one(), |a, b| &a * &b)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = self.render_num();
        let den = self.render_den();
        if den == "1" {
            return write!(f, "{num}");
        }
        let num = if self.num.len() > 1 { format!("({num})") } else { num };
        if den.contains('*') || den.contains(' ') {
            write!(f, "{num}/({den})")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::frac;

    fn s(i: usize) -> RationalFunction {
        RationalFunction::var(i)
    }

    fn inv(w: [i64; 3]) -> RationalFunction {
        RationalFunction::weight_pow(w, -1).unwrap()
    }

    #[test]
    fn partial_fractions_recombine() {
        // 1/s1 - 1/s2 = (s2 - s1)/(s1 s2)
        let lhs = &inv([1, 0, 0]) - &inv([0, 1, 0]);
        let rhs = &(&s(1) - &s(0)) * &(&inv([1, 0, 0]) * &inv([0, 1, 0]));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.render_num(), "-s1 + s2");
        assert_eq!(lhs.render_den(), "s1*s2");
    }

    #[test]
    fn common_factors_cancel() {
        let l = RationalFunction::weight([1, -1, 0]);
        let x = &(&l * &l) * &inv([1, -1, 0]);
        assert_eq!(x, l);
        assert!(x.is_polynomial());
        let y = &l * &inv([-2, 2, 0]);
        assert_eq!(y, RationalFunction::from_scalar(frac(-1, 2)));
    }

    #[test]
    fn render_integer_denominator_constant() {
        let x = &s(0).scale(&frac(1, 2)) * &inv([1, 1, 0]).pow(2).unwrap();
        assert_eq!(x.render_num(), "s1");
        assert_eq!(x.render_den(), "2*(s1 + s2)^2");
        assert_eq!(x.to_string(), "s1/(2*(s1 + s2)^2)");
    }

    #[test]
    fn specialization_cancels_or_reports_pole() {
        // (s1 + s2 - s3)/s3 at s3 = s1 + s2 is 0
        let u = RationalFunction::weight([1, 1, -1]);
        let x = &u * &inv([0, 0, 1]);
        assert!(x.specialize_s3(1).unwrap().is_zero());
        let y = &s(0) * &inv([1, 1, -1]);
        assert!(matches!(y.specialize_s3(1), Err(AlgebraError::PoleSurvived(_))));
        // (s1+s2)/s3 at a = 3 is 3
        let z = &RationalFunction::weight([1, 1, 0]) * &inv([0, 0, 1]);
        assert_eq!(z.specialize_s3(3).unwrap(), RationalFunction::from_int(3));
    }

    #[test]
    fn reciprocal_of_linear_numerator() {
        let x = &(&s(0) + &s(1)) * &inv([0, 0, 1]);
        let r = x.recip().unwrap();
        assert!((&x * &r).is_one());
    }
}
