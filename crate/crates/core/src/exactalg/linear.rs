//! Homogeneous integer linear forms in s1, s2, s3.

use std::fmt;

use num_integer::Integer;

use super::poly::Poly;
use super::scalar::{int, Scalar};

pub const NVARS: usize = 3;
pub const NAMES: [&str; NVARS] = ["s1", "s2", "s3"];

/// Primitive form `c1 s1 + c2 s2 + c3 s3`: coprime integer coefficients and the
/// first nonzero coefficient positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm(pub [i64; NVARS]);

/// Descending coefficient order, so `s1` sorts (and prints) before `s2`.
impl Ord for LinearForm {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for LinearForm {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl LinearForm {
    /// Splits `w1 s1 + w2 s2 + w3 s3` into `scale * form`. Returns `None` for the zero form.
    pub fn normalize(w: [i64; NVARS]) -> Option<(i64, LinearForm)> {
        let g = w.iter().fold(0i64, |acc, &c| acc.gcd(&c));
        if g == 0 {
            return None;
        }
        let lead = *w.iter().find(|&&c| c != 0).unwrap();
        let scale = if lead < 0 { -g } else { g };
        Some((scale, LinearForm(w.map(|c| c / scale))))
    }

    pub fn coeffs(&self) -> [Scalar; NVARS] {
        self.0.map(int)
    }

    pub fn to_poly(&self) -> Poly {
        Poly::linear(&self.coeffs(), int(0))
    }

    pub fn eval(&self, point: &[Scalar]) -> Scalar {
        self.0
            .iter()
            .zip(point)
            .map(|(&c, x)| int(c) * x)
            .fold(int(0), |a, b| a + b)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let name = NAMES[i];
            let abs = c.abs();
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c < 0 { " - " } else { " + " })?;
            }
            if abs == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{abs}*{name}")?;
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_is_primitive_with_positive_lead() {
        assert_eq!(
            LinearForm::normalize([-2, 4, 0]),
            Some((-2, LinearForm([1, -2, 0])))
        );
        assert_eq!(LinearForm::normalize([0, 0, 3]), Some((3, LinearForm([0, 0, 1]))));
        assert_eq!(LinearForm::normalize([0, 0, 0]), None);
        assert_eq!(LinearForm([1, -1, 0]).to_string(), "s1 - s2");
        assert_eq!(LinearForm([0, 2, -3]).to_string(), "2*s2 - 3*s3");
    }
}
