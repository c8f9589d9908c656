//! Equivariant cohomology of `Hilb(C^2, d)` by localization: tangent weights,
//! Nakajima classes, descendent classes, pairings, and the matrix of leading
//! descendent/relative pairings.

pub mod jack;

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde_json::{json, Value};

use crate::boxconfig::{enumerate_partitions, Partition};
use crate::exactalg::parse::parse_fraction;
use crate::exactalg::scalar::{self, int, Scalar};
use crate::exactalg::{chern_character_eval, linalg, AlgebraError, LaurentPoly, Poly, RationalFunction};
use crate::vertexcore::Insertions;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HilbertError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("Nakajima calibration failed: {0}")]
    CalibrationFailed(String),
    #[error("correspondence matrix for d={d} has rank {rank} < {size}")]
    RankDeficient { d: u32, rank: usize, size: usize },
    #[error("transition cache: {0}")]
    Cache(String),
    #[error("partition {eta} has size {got}, expected {want}")]
    SizeMismatch { eta: String, got: u32, want: u32 },
}

/// Arm/leg tangent weights at the monomial ideal `mu`: per cell,
/// `-(a+1) s1 + l s2` and `a s1 - (l+1) s2`.
pub fn fixed_point_tangent_weights(mu: &Partition) -> Vec<[i64; 3]> {
    let conj = mu.conjugate();
    let mut out = Vec::with_capacity(2 * mu.size() as usize);
    for (i, j) in mu.cells() {
        let a = mu.parts()[j as usize] as i64 - 1 - i;
        let l = conj.parts()[i as usize] as i64 - 1 - j;
        out.push([-(a + 1), l, 0]);
        out.push([a, -(l + 1), 0]);
    }
    out
}

/// Euler class of the tangent space at `mu`.
pub fn tangent_euler(mu: &Partition) -> RationalFunction {
    fixed_point_tangent_weights(mu)
        .into_iter()
        .map(RationalFunction::weight)
        .product()
}

/// `1 / e(T_mu)`, kept factored.
pub fn inverse_tangent_euler(mu: &Partition) -> RationalFunction {
    fixed_point_tangent_weights(mu)
        .into_iter()
        .map(|w| RationalFunction::weight_pow(w, -1).expect("tangent weights are nonzero"))
        .product()
}

/// `ch_{2+k}(F_mu (1-t1)(1-t2))`
pub fn descendent_class_at_fixed_point(k: u32, mu: &Partition) -> RationalFunction {
    let f = mu.character();
    let koszul = &(&LaurentPoly::one() - &LaurentPoly::monomial([1, 0, 0], 1))
        * &(&LaurentPoly::one() - &LaurentPoly::monomial([0, 1, 0], 1));
    chern_character_eval(&(&f * &koszul), 2 + k)
}

/// Closed form `g_{eta eta} = (-1)^{d - l} / (z(eta) (s1 s2)^l)`.
pub fn nakajima_pairing_closed_form(eta: &Partition, nu: &Partition) -> RationalFunction {
    if eta != nu {
        return RationalFunction::zero();
    }
    let l = eta.len() as i64;
    let sign = if (eta.size() as i64 - l) % 2 == 0 { 1 } else { -1 };
    let c = Scalar::new(BigInt::from(sign), eta.z());
    s1s2().pow(-l).unwrap().scale(&c)
}

/// `g^{eta eta} = (s1 s2)^l (-1)^{d-l} z(eta)`
pub fn nakajima_pairing_inverse(eta: &Partition) -> RationalFunction {
    let l = eta.len() as i64;
    let sign = if (eta.size() as i64 - l) % 2 == 0 { 1 } else { -1 };
    s1s2().pow(l).unwrap().scale(&(Scalar::from_integer(eta.z()) * int(sign)))
}

fn s1s2() -> RationalFunction {
    RationalFunction::var(0) * RationalFunction::var(1)
}

/// Restrictions `C_eta|_mu` for all `eta, mu |- d`.
#[derive(Clone, Debug)]
pub struct NakajimaTransition {
    pub d: u32,
    /// Canonical order.
    pub partitions: Vec<Partition>,
    entries: HashMap<(Partition, Partition), RationalFunction>,
    /// Squared scale found on each diagonal before normalization (canonical order).
    pub diagonal_ratios: Vec<Scalar>,
    pub sign: i64,
}

impl NakajimaTransition {
    pub fn restriction(&self, eta: &Partition, mu: &Partition) -> &RationalFunction {
        &self.entries[&(eta.clone(), mu.clone())]
    }

    /// Localization pairing `sum_mu C_eta|_mu C_nu|_mu / e(T_mu)`.
    pub fn pairing(&self, eta: &Partition, nu: &Partition) -> RationalFunction {
        self.partitions
            .iter()
            .map(|mu| {
                &(self.restriction(eta, mu) * self.restriction(nu, mu)) * &inverse_tangent_euler(mu)
            })
            .sum()
    }

    pub fn to_json(&self) -> Value {
        let mut rows = Vec::new();
        for eta in &self.partitions {
            for mu in &self.partitions {
                let c = self.restriction(eta, mu);
                rows.push(json!({"eta": eta.to_string(), "mu": mu.to_string(), "num": c.render_num(), "den": c.render_den()}));
            }
        }
        let ratios: Vec<String> = self.diagonal_ratios.iter().map(scalar::render).collect();
        json!({"d": self.d, "sign": self.sign, "diagonal_ratios": ratios, "entries": rows})
    }

    fn from_json(v: &Value) -> Result<Self, HilbertError> {
        let bad = |m: &str| HilbertError::Cache(m.to_string());
        let d = v.get("d").and_then(Value::as_u64).ok_or_else(|| bad("missing d"))? as u32;
        let sign = v.get("sign").and_then(Value::as_i64).ok_or_else(|| bad("missing sign"))?;
        let mut entries = HashMap::new();
        for e in v.get("entries").and_then(Value::as_array).ok_or_else(|| bad("missing entries"))? {
            let get = |k: &str| e.get(k).and_then(Value::as_str).ok_or_else(|| bad("malformed entry"));
            let eta: Partition = get("eta")?.parse().map_err(|_| bad("bad partition"))?;
            let mu: Partition = get("mu")?.parse().map_err(|_| bad("bad partition"))?;
            entries.insert((eta, mu), parse_fraction(get("num")?, get("den")?)?);
        }
        let diagonal_ratios = v
            .get("diagonal_ratios")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing ratios"))?
            .iter()
            .map(|x| {
                let s = x.as_str().ok_or_else(|| bad("bad ratio"))?;
                crate::exactalg::parse::parse_rational_function(s)?
                    .as_scalar()
                    .ok_or_else(|| bad("bad ratio"))
            })
            .collect::<Result<Vec<_>, HilbertError>>()?;
        let partitions = enumerate_partitions(d);
        if entries.len() != partitions.len() * partitions.len() {
            return Err(bad("incomplete entry table"));
        }
        Ok(NakajimaTransition {
            d,
            partitions,
            entries,
            diagonal_ratios,
            sign,
        })
    }
}

/// `s2^{n - l(eta)} theta^lambda_eta(-s1/s2)`, before normalization.
fn raw_restrictions(d: u32) -> HashMap<(Partition, Partition), RationalFunction> {
    let table = jack::jack_table(d);
    let mut out = HashMap::new();
    for lambda in &table.partitions {
        for eta in &table.partitions {
            let theta = table.coeff(lambda, eta);
            let top = (d as usize) - eta.len();
            let mut p = Poly::zero(3);
            for (k, c) in theta.coeffs().iter().enumerate() {
                assert!(k <= top, "Jack coefficient degree exceeds n - l(eta)");
                let sign = if k % 2 == 0 { int(1) } else { int(-1) };
                let mut e: crate::exactalg::poly::Exponents = smallvec::smallvec![0; 3];
                e[0] = k as u32;
                e[1] = (top - k) as u32;
                p.add_term(e, c * sign);
            }
            out.insert((eta.clone(), lambda.clone()), RationalFunction::from_poly(p));
        }
    }
    out
}

fn exact_sqrt(x: &Scalar) -> Option<Scalar> {
    if !x.is_positive() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Scalar::new(n, d))
}

/// Normalizes the raw classes so their localization pairing is `g`, without
/// the sign convention.
fn normalized(d: u32) -> Result<(Vec<Partition>, HashMap<(Partition, Partition), RationalFunction>, Vec<Scalar>), HilbertError> {
    let partitions = enumerate_partitions(d);
    let mut raw = raw_restrictions(d);
    let eulers: Vec<RationalFunction> = partitions.iter().map(inverse_tangent_euler).collect();
    let pair = |raw: &HashMap<(Partition, Partition), RationalFunction>, a: &Partition, b: &Partition| -> RationalFunction {
        partitions
            .iter()
            .zip(&eulers)
            .map(|(mu, e)| &(&raw[&(a.clone(), mu.clone())] * &raw[&(b.clone(), mu.clone())]) * e)
            .sum()
    };
    for (x, a) in partitions.iter().enumerate() {
        for b in &partitions[x + 1..] {
            let v = pair(&raw, a, b);
            if !v.is_zero() {
                return Err(HilbertError::CalibrationFailed(format!("<C{a}, C{b}> = {v}, expected 0")));
            }
        }
    }
    let mut ratios = Vec::new();
    for eta in &partitions {
        let r = &pair(&raw, eta, eta) * &nakajima_pairing_inverse(eta);
        let r = r
            .as_scalar()
            .ok_or_else(|| HilbertError::CalibrationFailed(format!("diagonal ratio for {eta} is not constant: {r}")))?;
        let root = exact_sqrt(&r)
            .ok_or_else(|| HilbertError::CalibrationFailed(format!("diagonal ratio {r} for {eta} is not a positive square")))?;
        let inv = root.recip();
        for mu in &partitions {
            let slot = raw.get_mut(&(eta.clone(), mu.clone())).unwrap();
            *slot = slot.scale(&inv);
        }
        ratios.push(r);
    }
    Ok((partitions, raw, ratios))
}

/// `s1 s2 <tau_{c-1} | (c)>` for normalized (unsigned) classes.
fn appp_value(c: u32, restr: &HashMap<(Partition, Partition), RationalFunction>) -> RationalFunction {
    let eta = Partition::new(vec![c]).unwrap();
    let total: RationalFunction = enumerate_partitions(c)
        .iter()
        .map(|mu| {
            let desc = descendent_class_at_fixed_point(c - 1, mu);
            &(&desc * &restr[&(eta.clone(), mu.clone())]) * &inverse_tangent_euler(mu)
        })
        .sum();
    total
}

/// Global sign making `s1 s2 <tau_{c-1} | (c)> = 1/c!` hold at `c = 1, 2`.
fn calibrated_sign() -> Result<i64, HilbertError> {
    let mut signs = Vec::new();
    for c in 1..=2u32 {
        let (_, restr, _) = normalized(c)?;
        let v = appp_value(c, &restr)
            .as_scalar()
            .ok_or_else(|| HilbertError::CalibrationFailed(format!("pairing at c={c} is not a constant")))?;
        let want = Scalar::new(BigInt::one(), scalar::factorial(c));
        if v == want {
            signs.push(1);
        } else if v == -want {
            signs.push(-1);
        } else {
            return Err(HilbertError::CalibrationFailed(format!("|s1 s2 <tau_{}|({c})>| = {v}, expected 1/{c}!", c - 1)));
        }
    }
    if signs[0] != signs[1] {
        return Err(HilbertError::CalibrationFailed("c=1 and c=2 demand opposite signs".into()));
    }
    Ok(signs[0])
}

fn compute_transition(d: u32) -> Result<NakajimaTransition, HilbertError> {
    let sign = calibrated_sign()?;
    let (partitions, mut entries, diagonal_ratios) = normalized(d)?;
    if sign < 0 {
        for v in entries.values_mut() {
            *v = -&*v;
        }
    }
    Ok(NakajimaTransition {
        d,
        partitions,
        entries,
        diagonal_ratios,
        sign,
    })
}

fn memory_cache() -> &'static Mutex<HashMap<u32, Arc<NakajimaTransition>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<NakajimaTransition>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cache_file(dir: &Path, d: u32) -> PathBuf {
    dir.join(format!("nakajima_d{d}.json"))
}

/// Calibrated Nakajima classes for `d`, memoized per process and optionally
/// persisted in `$PTVERTEX_CACHE`.
pub fn nakajima_transition(d: u32) -> Result<Arc<NakajimaTransition>, HilbertError> {
    let dir = std::env::var_os("PTVERTEX_CACHE").map(PathBuf::from);
    nakajima_transition_with_cache(d, dir.as_deref())
}

pub fn nakajima_transition_with_cache(d: u32, dir: Option<&Path>) -> Result<Arc<NakajimaTransition>, HilbertError> {
    assert!(d >= 1);
    if let Some(t) = memory_cache().lock().unwrap().get(&d) {
        return Ok(Arc::clone(t));
    }
    let mut loaded = None;
    if let Some(dir) = dir {
        let path = cache_file(dir, d);
        if let Ok(text) = std::fs::read_to_string(&path) {
            let v: Value = serde_json::from_str(&text).map_err(|e| HilbertError::Cache(e.to_string()))?;
            loaded = Some(NakajimaTransition::from_json(&v)?);
        }
    }
    let t = match loaded {
        Some(t) => t,
        None => {
            let t = compute_transition(d)?;
            if let Some(dir) = dir {
                std::fs::create_dir_all(dir).map_err(|e| HilbertError::Cache(e.to_string()))?;
                std::fs::write(cache_file(dir, d), t.to_json().to_string()).map_err(|e| HilbertError::Cache(e.to_string()))?;
            }
            t
        }
    };
    let t = Arc::new(t);
    memory_cache().lock().unwrap().insert(d, Arc::clone(&t));
    Ok(t)
}

/// `C_eta|_mu`, which is also the pairing of the fixed-point class `P_mu` with `C_eta`.
pub fn nakajima_restriction(eta: &Partition, mu: &Partition) -> Result<RationalFunction, HilbertError> {
    if eta.size() != mu.size() {
        return Err(HilbertError::SizeMismatch {
            eta: eta.to_string(),
            got: eta.size(),
            want: mu.size(),
        });
    }
    if mu.is_empty() {
        return Ok(RationalFunction::one());
    }
    Ok(nakajima_transition(mu.size())?.restriction(eta, mu).clone())
}

/// `<prod_j tau_{i_j} | eta>` with `tau_k|_mu = ch_{2+k}(F_mu (1-t1)(1-t2)) / (s1 s2)`.
pub fn hilb_descendent_pairing(ins: &Insertions, eta: &Partition) -> Result<RationalFunction, HilbertError> {
    let d = eta.size();
    let t = nakajima_transition(d)?;
    let inv = s1s2().pow(-1).unwrap();
    let mut total = RationalFunction::zero();
    for mu in &t.partitions {
        let mut term = t.restriction(eta, mu) * &inverse_tangent_euler(mu);
        for &k in &ins.0 {
            term = &term * &(&descendent_class_at_fixed_point(k, mu) * &inv);
        }
        total = &total + &term;
    }
    Ok(total)
}

/// Leading pairings of monomials `prod_i tau_{lambda_i - 1}` (rows) against
/// Nakajima classes (columns), both in canonical partition order.
#[derive(Clone, Debug)]
pub struct CorrespondenceMatrix {
    pub d: u32,
    pub partitions: Vec<Partition>,
    pub entries: Vec<Vec<RationalFunction>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrespondenceReport {
    /// Entries with `l(row) > l(col)` vanish.
    pub zero_when_row_longer: bool,
    /// Entries with `l(row) < l(col)` vanish.
    pub zero_when_row_shorter: bool,
    pub diagonal_nonzero: bool,
    pub rank: usize,
}

pub fn row_insertions(lambda: &Partition) -> Insertions {
    Insertions(lambda.parts().iter().map(|&p| p - 1).collect())
}

pub fn correspondence_matrix(d: u32) -> Result<CorrespondenceMatrix, HilbertError> {
    let partitions = enumerate_partitions(d);
    let mut entries = Vec::new();
    for lambda in &partitions {
        let ins = row_insertions(lambda);
        entries.push(
            partitions
                .iter()
                .map(|eta| hilb_descendent_pairing(&ins, eta))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok(CorrespondenceMatrix { d, partitions, entries })
}

impl CorrespondenceMatrix {
    /// Structural checks; fails with `RankDeficient` when the rank over
    /// `Q(s1, s2)` is not full (rank at sample points bounds it from below).
    pub fn check(&self) -> Result<CorrespondenceReport, HilbertError> {
        let n = self.partitions.len();
        let mut longer = true;
        let mut shorter = true;
        for (r, row) in self.partitions.iter().enumerate() {
            for (c, col) in self.partitions.iter().enumerate() {
                let z = self.entries[r][c].is_zero();
                if row.len() > col.len() && !z {
                    longer = false;
                }
                if row.len() < col.len() && !z {
                    shorter = false;
                }
            }
        }
        let diagonal_nonzero = (0..n).all(|i| !self.entries[i][i].is_zero());
        let points = [[3, 7, 0], [5, -2, 0], [11, 13, 0]];
        let mut rank = 0;
        for pt in points {
            let p: Vec<Scalar> = pt.iter().map(|&x| int(x)).collect();
            let m: Option<linalg::Matrix> = self
                .entries
                .iter()
                .map(|row| row.iter().map(|x| x.eval(&p)).collect())
                .collect();
            if let Some(m) = m {
                rank = rank.max(linalg::rank(&m));
            }
        }
        if rank < n {
            return Err(HilbertError::RankDeficient { d: self.d, rank, size: n });
        }
        Ok(CorrespondenceReport {
            zero_when_row_longer: longer,
            zero_when_row_shorter: shorter,
            diagonal_nonzero,
            rank,
        })
    }
}
