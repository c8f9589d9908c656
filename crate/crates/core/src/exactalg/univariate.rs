//! Univariate polynomials and rational functions over Q, used for symmetric
//! function computations in the Jack parameter.

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::Scalar;

/// Dense coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UniPoly(Vec<Scalar>);

impl UniPoly {
    pub fn zero() -> Self {
        UniPoly(Vec::new())
    }

    pub fn constant(c: Scalar) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn one() -> Self {
        UniPoly::constant(Scalar::one())
    }

    /// The indeterminate.
    pub fn x() -> Self {
        UniPoly::new(vec![Scalar::zero(), Scalar::one()])
    }

    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly(coeffs)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&Scalar> {
        self.0.last()
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        UniPoly::new(self.0.iter().map(|x| x * c).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.0
            .iter()
            .rev()
            .fold(Scalar::zero(), |acc, c| acc * x + c)
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lead().unwrap().recip();
        let mut rem = self.0.clone();
        let mut q = vec![Scalar::zero(); self.0.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let k = rem.len() - 1 - dd;
            let c = rem.last().unwrap() * &inv;
            for (i, dc) in d.0.iter().enumerate() {
                rem[k + i] -= &c * dc;
            }
            q[k] = c;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        (UniPoly::new(q), UniPoly::new(rem))
    }

    pub fn monic(&self) -> UniPoly {
        match self.lead() {
            Some(l) => self.scale(&l.recip()),
            None => self.clone(),
        }
    }

    pub fn gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl Add<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.0.len().max(rhs.0.len());
        let zero = Scalar::zero();
        UniPoly::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero) + rhs.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        self + &(-rhs)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&UniPoly> for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Scalar::zero(); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

/// Reduced fraction with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniRational {
    num: UniPoly,
    den: UniPoly,
}

impl UniRational {
    pub fn new(num: UniPoly, den: UniPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return UniRational::zero();
        }
        let g = UniPoly::gcd(&num, &den);
        let (mut num, _) = num.div_rem(&g);
        let (mut den, _) = den.div_rem(&g);
        let l = den.lead().unwrap().recip();
        num = num.scale(&l);
        den = den.scale(&l);
        UniRational { num, den }
    }

    pub fn zero() -> Self {
        UniRational {
            num: UniPoly::zero(),
            den: UniPoly::one(),
        }
    }

    pub fn one() -> Self {
        UniRational::from_poly(UniPoly::one())
    }

    pub fn from_poly(p: UniPoly) -> Self {
        UniRational {
            num: p,
            den: UniPoly::one(),
        }
    }

    pub fn constant(c: Scalar) -> Self {
        UniRational::from_poly(UniPoly::constant(c))
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &UniPoly {
        &self.num
    }

    pub fn as_poly(&self) -> Option<&UniPoly> {
        (self.den == UniPoly::one()).then_some(&self.num)
    }

    pub fn recip(&self) -> UniRational {
        UniRational::new(self.den.clone(), self.num.clone())
    }
}

impl Add<&UniRational> for &UniRational {
    type Output = UniRational;
    fn add(self, rhs: &UniRational) -> UniRational {
        if self.den == rhs.den {
            return UniRational::new(&self.num + &rhs.num, self.den.clone());
        }
        UniRational::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub<&UniRational> for &UniRational {
    type Output = UniRational;
    fn sub(self, rhs: &UniRational) -> UniRational {
        self + &UniRational {
            num: -&rhs.num,
            den: rhs.den.clone(),
        }
    }
}

impl Mul<&UniRational> for &UniRational {
    type Output = UniRational;
    fn mul(self, rhs: &UniRational) -> UniRational {
        UniRational::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::scalar::int;

    fn p(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn gcd_and_reduction() {
        // (x-1)(x+2) and (x-1)(x+3)
        let a = &p(&[-1, 1]) * &p(&[2, 1]);
        let b = &p(&[-1, 1]) * &p(&[3, 1]);
        assert_eq!(UniPoly::gcd(&a, &b), p(&[-1, 1]));
        let r = UniRational::new(a, b.scale(&int(2)));
        assert_eq!(r.numerator(), &p(&[2, 1]).scale(&crate::exactalg::scalar::frac(1, 2)));
        let s = &r + &UniRational::from_poly(p(&[1]));
        assert_eq!(s, UniRational::new(p(&[8, 3]), p(&[6, 2])));
    }

    #[test]
    fn division_with_remainder() {
        let (q, r) = p(&[1, 0, 1]).div_rem(&p(&[1, 1]));
        assert_eq!(q, p(&[-1, 1]));
        assert_eq!(r, p(&[2]));
    }
}
