//! Truncated Laurent series in q with rational-function coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde_json::{json, Value};

use crate::exactalg::parse::parse_fraction;
use crate::exactalg::{AlgebraError, RationalFunction, Scalar};

/// Coefficients below `min_order` are zero. Coefficients above `max_order`
/// are unknown; `max_order == None` marks a series known at every order
/// (zero beyond the stored terms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    min_order: i64,
    max_order: Option<i64>,
    coeffs: BTreeMap<i64, RationalFunction>,
}

impl QSeries {
    pub fn zero_exact() -> Self {
        QSeries {
            min_order: 0,
            max_order: None,
            coeffs: BTreeMap::new(),
        }
    }

    /// Series with known window `[min_order, max_order]`.
    pub fn truncated(min_order: i64, max_order: i64) -> Self {
        QSeries {
            min_order,
            max_order: Some(max_order),
            coeffs: BTreeMap::new(),
        }
    }

    /// Finite Laurent polynomial, known to all orders.
    pub fn exact(terms: impl IntoIterator<Item = (i64, RationalFunction)>) -> Self {
        let mut s = QSeries::zero_exact();
        let mut lo = i64::MAX;
        for (n, c) in terms {
            lo = lo.min(n);
            s.add_at(n, &c);
        }
        s.min_order = if lo == i64::MAX { 0 } else { lo };
        s
    }

    pub fn monomial(n: i64, c: RationalFunction) -> Self {
        QSeries::exact([(n, c)])
    }

    pub fn min_order(&self) -> i64 {
        self.min_order
    }

    pub fn max_order(&self) -> Option<i64> {
        self.max_order
    }

    pub fn is_exact(&self) -> bool {
        self.max_order.is_none()
    }

    pub fn is_known(&self, n: i64) -> bool {
        self.max_order.is_none_or(|m| n <= m)
    }

    /// Coefficient of `q^n`, `None` when unknown.
    pub fn coeff(&self, n: i64) -> Option<RationalFunction> {
        if !self.is_known(n) {
            return None;
        }
        Some(self.coeffs.get(&n).cloned().unwrap_or_else(RationalFunction::zero))
    }

    /// Nonzero coefficients in ascending order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &RationalFunction)> {
        self.coeffs.iter().map(|(&n, c)| (n, c))
    }

    pub fn add_at(&mut self, n: i64, c: &RationalFunction) {
        if n < self.min_order {
            self.min_order = n;
        }
        if let Some(m) = self.max_order {
            if n > m {
                return;
            }
        }
        let slot = self.coeffs.entry(n).or_insert_with(RationalFunction::zero);
        *slot = &*slot + c;
        if slot.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn set_coeff(&mut self, n: i64, c: RationalFunction) {
        if c.is_zero() {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    /// Largest order with a nonzero coefficient.
    pub fn top_nonzero(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Restricts the known window to orders `<= n`.
    pub fn truncate(&self, n: i64) -> QSeries {
        let max = self.max_order.map_or(n, |m| m.min(n));
        QSeries {
            min_order: self.min_order,
            max_order: Some(max),
            coeffs: self.coeffs.range(..=max).map(|(&k, c)| (k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &RationalFunction) -> QSeries {
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(&n, x)| (n, x * c))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        out
    }

    /// Multiplies by `q^k`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            min_order: self.min_order + k,
            max_order: self.max_order.map(|m| m + k),
            coeffs: self.coeffs.iter().map(|(&n, c)| (n + k, c.clone())).collect(),
        }
    }

    pub fn map_coeffs(
        &self,
        f: impl Fn(&RationalFunction) -> Result<RationalFunction, AlgebraError>,
    ) -> Result<QSeries, AlgebraError> {
        let mut out = self.clone();
        out.coeffs.clear();
        for (&n, c) in &self.coeffs {
            out.set_coeff(n, f(c)?);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        let orders: Vec<Value> = self
            .coeffs
            .iter()
            .map(|(n, c)| json!({"n": n, "coeff": {"num": c.render_num(), "den": c.render_den()}}))
            .collect();
        json!({
            "var": "q",
            "min_order": self.min_order,
            "max_order": self.max_order,
            "orders": orders,
        })
    }

    pub fn from_json(v: &Value) -> Result<QSeries, AlgebraError> {
        let bad = |m: &str| AlgebraError::Parse(m.to_string());
        if v.get("var").and_then(Value::as_str) != Some("q") {
            return Err(bad("series must have var \"q\""));
        }
        let orders = v.get("orders").and_then(Value::as_array).ok_or_else(|| bad("missing orders"))?;
        let mut terms = Vec::new();
        for o in orders {
            let n = o.get("n").and_then(Value::as_i64).ok_or_else(|| bad("order without n"))?;
            let c = o.get("coeff").ok_or_else(|| bad("order without coeff"))?;
            let num = c.get("num").and_then(Value::as_str).ok_or_else(|| bad("coeff without num"))?;
            let den = c.get("den").and_then(Value::as_str).unwrap_or("1");
            terms.push((n, parse_fraction(num, den)?));
        }
        let lo = terms.iter().map(|t| t.0).min().unwrap_or(0);
        let min_order = v.get("min_order").and_then(Value::as_i64).unwrap_or(lo).min(lo);
        let max_order = match v.get("max_order") {
            None => terms.iter().map(|t| t.0).max().or(Some(min_order)),
            Some(Value::Null) => None,
            Some(x) => Some(x.as_i64().ok_or_else(|| bad("max_order must be an integer"))?),
        };
        let mut s = QSeries {
            min_order,
            max_order,
            coeffs: BTreeMap::new(),
        };
        for (n, c) in terms {
            s.add_at(n, &c);
        }
        Ok(s)
    }

    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(n, c)| {
                let q = match n {
                    0 => String::new(),
                    1 => "q".into(),
                    _ => format!("q^{n}"),
                };
                let cs = c.to_string();
                let atomic = !cs[1..].contains(['+', '-', '/', '*']);
                match (q.is_empty(), cs.as_str()) {
                    (true, _) if atomic => cs,
                    (true, _) => format!("({cs})"),
                    (false, "1") => q,
                    (false, "-1") => format!("-{q}"),
                    _ if atomic => format!("{cs}*{q}"),
                    _ => format!("({cs})*{q}"),
                }
            })
            .collect();
        if parts.is_empty() {
            parts.push("0".into());
        }
        match self.max_order {
            Some(m) => format!("{} + O(q^{})", parts.join(" + "), m + 1),
            None => parts.join(" + "),
        }
    }
}

fn combine_window(a: &QSeries, b: &QSeries) -> Option<i64> {
    match (a.max_order, b.max_order) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x),
        (Some(x), Some(y)) => Some(x.min(y)),
    }
}

impl Add<&QSeries> for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        let mut out = QSeries {
            min_order: self.min_order.min(rhs.min_order),
            max_order: combine_window(self, rhs),
            coeffs: BTreeMap::new(),
        };
        for (n, c) in self.terms().chain(rhs.terms()) {
            out.add_at(n, c);
        }
        out
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        self.scale(&RationalFunction::from_int(-1))
    }
}

impl Sub<&QSeries> for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        self + &(-rhs)
    }
}

impl Mul<&QSeries> for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        // a coefficient of the product at n needs a up to n - rhs.min and b up to n - self.min
        let max_order = match (self.max_order, rhs.max_order) {
            (None, None) => None,
            (Some(x), None) => Some(x + rhs.min_order),
            (None, Some(y)) => Some(y + self.min_order),
            (Some(x), Some(y)) => Some((x + rhs.min_order).min(y + self.min_order)),
        };
        let mut out = QSeries {
            min_order: self.min_order + rhs.min_order,
            max_order,
            coeffs: BTreeMap::new(),
        };
        for (na, ca) in self.terms() {
            for (nb, cb) in rhs.terms() {
                if max_order.is_none_or(|m| na + nb <= m) {
                    out.add_at(na + nb, &(ca * cb));
                }
            }
        }
        out
    }
}

/// Scalar helper used by generators of known series.
pub fn rf(c: i64) -> RationalFunction {
    RationalFunction::from_scalar(Scalar::from_integer(c.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_propagate() {
        let a = {
            let mut s = QSeries::truncated(1, 4);
            s.add_at(1, &rf(1));
            s.add_at(2, &rf(1));
            s
        };
        let b = QSeries::exact([(0, rf(1)), (1, rf(-1))]);
        let p = &a * &b;
        assert_eq!(p.max_order(), Some(4));
        assert_eq!(p.coeff(2), Some(rf(0)));
        assert_eq!(p.coeff(3), Some(rf(-1)));
        assert_eq!(p.coeff(5), None);
        let c = &a * &a;
        assert_eq!(c.min_order(), 2);
        assert_eq!(c.max_order(), Some(5));
        assert_eq!(c.coeff(3), Some(rf(2)));
    }

    #[test]
    fn json_round_trip() {
        let x = crate::exactalg::parse::parse_rational_function("(s1+s2)/(2*s1*s2)").unwrap();
        let mut s = QSeries::truncated(1, 3);
        s.add_at(1, &x);
        s.add_at(3, &rf(-2));
        let back = QSeries::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}
