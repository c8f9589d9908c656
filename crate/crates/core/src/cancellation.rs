//! Permutation model of the fixed loci sharing one profile, the factor
//! product `phi` and its polynomial replacement `psi`, minimal-degree division
//! on permutation point sets, and the case analysis that bounds the
//! contributing profiles.
//!
//! Polynomials in the symbols `sigma_delta(j)` use one variable per cell of
//! `mu`, indexed in the row-major cell order of [`Partition::cells`].

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::boxconfig::{BoxConfig, FProfile, Partition};
use crate::exactalg::poly::Exponents;
use crate::exactalg::scalar::{factorial, int};
use crate::exactalg::{linalg, AlgebraError, Poly, RationalFunction, Scalar};
use crate::vertexcore::{descendent_weight, vertex_character, Insertions};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CancellationError {
    #[error("G does not vanish at {0:?}, where F does")]
    HypothesisFailed(Vec<i64>),
    #[error("invalid division data: {0}")]
    InvalidSpec(String),
    #[error("no interpolant of degree at most {0}")]
    DegreeBound(i64),
    #[error("a denominator factor vanishes")]
    DivisionByZero,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// The partition whose diagonals carry the profile.
pub fn partition_of(f: &FProfile) -> Partition {
    let mut rows: BTreeMap<i64, u32> = BTreeMap::new();
    for (_, js, _) in f.diagonals() {
        for &j in js {
            *rows.entry(j).or_default() += 1;
        }
    }
    Partition::new(rows.into_values().collect()).expect("profile diagonals come from a partition")
}

fn cell_index(mu: &Partition, delta: i64, j: i64) -> usize {
    let before: u32 = mu.parts()[..j as usize].iter().sum();
    before as usize + (delta + j) as usize
}

fn inversions(v: &[i64]) -> usize {
    (0..v.len()).map(|i| (i + 1..v.len()).filter(|&k| v[i] > v[k]).count()).sum()
}

/// One permutation `sigma_delta` of each diagonal `mu_delta = {A, ..., B}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DiagonalPermutation {
    /// `delta -> (A, [sigma(A), ..., sigma(B)])`
    maps: BTreeMap<i64, (i64, Vec<i64>)>,
}

impl DiagonalPermutation {
    pub fn identity(mu: &Partition) -> Self {
        let maps = mu.diagonals().into_iter().map(|(d, js)| (d, (js[0], js))).collect();
        DiagonalPermutation { maps }
    }

    /// Builds from images listed over each `mu_delta` in ascending order.
    pub fn from_images(mu: &Partition, images: BTreeMap<i64, Vec<i64>>) -> Option<Self> {
        let diags = mu.diagonals();
        if diags.len() != images.len() {
            return None;
        }
        let mut maps = BTreeMap::new();
        for (d, js) in diags {
            let im = images.get(&d)?;
            let mut sorted = im.clone();
            sorted.sort_unstable();
            if sorted != js {
                return None;
            }
            maps.insert(d, (js[0], im.clone()));
        }
        Some(DiagonalPermutation { maps })
    }

    /// `sigma_delta(j)`
    pub fn image(&self, delta: i64, j: i64) -> i64 {
        let (a, v) = &self.maps[&delta];
        v[(j - a) as usize]
    }

    /// `sigma_delta^{-1}(j)`
    pub fn preimage(&self, delta: i64, j: i64) -> i64 {
        let (a, v) = &self.maps[&delta];
        a + v.iter().position(|&x| x == j).expect("value lies on the diagonal") as i64
    }

    pub fn sign(&self) -> i64 {
        let n: usize = self.maps.values().map(|(_, v)| inversions(v)).sum();
        if n.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn is_identity(&self) -> bool {
        self.maps.values().all(|(a, v)| v.iter().enumerate().all(|(k, &x)| x == a + k as i64))
    }

    pub fn images(&self) -> impl Iterator<Item = (i64, &[i64])> {
        self.maps.iter().map(|(&d, (_, v))| (d, v.as_slice()))
    }

    /// Values of all symbols `sigma_delta(j)`, in cell order.
    pub fn point(&self, mu: &Partition) -> Vec<Scalar> {
        let mut p = vec![Scalar::zero(); mu.size() as usize];
        for (&d, (a, v)) in &self.maps {
            for (k, &x) in v.iter().enumerate() {
                p[cell_index(mu, d, a + k as i64)] = int(x);
            }
        }
        p
    }
}

/// All of `Sym_mu`, diagonals varied lexicographically in ascending `delta`.
pub fn enumerate_sym(mu: &Partition) -> Vec<DiagonalPermutation> {
    let diags = mu.diagonals();
    if diags.is_empty() {
        return vec![DiagonalPermutation::identity(mu)];
    }
    let per: Vec<Vec<Vec<i64>>> = diags
        .values()
        .map(|js| js.iter().copied().permutations(js.len()).collect())
        .collect();
    per.into_iter()
        .multi_cartesian_product()
        .map(|choice| {
            let maps = diags.iter().zip(choice).map(|((&d, js), v)| (d, (js[0], v))).collect();
            DiagonalPermutation { maps }
        })
        .collect()
}

/// `|Sym^0_mu|`: permutations preserving every `e_delta`.
pub fn sym0_order(f: &FProfile) -> BigInt {
    let mut n = BigInt::one();
    for (_, _, es) in f.diagonals() {
        for (_, block) in &es.iter().chunk_by(|&&e| e) {
            n *= factorial(block.count() as u32);
        }
    }
    n
}

/// `h_sigma(delta; j) = a (j - e_delta(sigma_delta^{-1}(j)))` when it is a
/// valid configuration.
pub fn admissible_h(sigma: &DiagonalPermutation, f: &FProfile) -> Option<BoxConfig> {
    let mu = partition_of(f);
    let a = Ratio::from_integer(f.a());
    let mut h = Vec::with_capacity(mu.size() as usize);
    for (i, j) in mu.cells() {
        let d = i - j;
        let e = f.e(d, sigma.preimage(d, j))?;
        let v = a * (Ratio::from_integer(j) - e);
        if !v.is_integer() || v.is_negative() {
            return None;
        }
        h.push(*v.numer() as u32);
    }
    let c = BoxConfig::new(mu, h);
    c.is_valid().then_some(c)
}

/// The three elementary conditions on `sigma`, plus integrality of `a e`.
pub fn admissible_by_conditions(sigma: &DiagonalPermutation, f: &FProfile) -> bool {
    let a = Ratio::from_integer(f.a());
    let one = Ratio::one();
    let diags: BTreeMap<i64, (Vec<i64>, Vec<Ratio<i64>>)> =
        f.diagonals().map(|(d, js, es)| (d, (js.to_vec(), es.to_vec()))).collect();
    if diags.values().flat_map(|(_, es)| es).any(|&e| !(a * e).is_integer()) {
        return false;
    }
    if let Some((js, es)) = diags.get(&0) {
        if js.iter().zip(es).any(|(&j, &e)| e > Ratio::zero() && sigma.image(0, j) == 0) {
            return false;
        }
    }
    for (&d, (js, es)) in &diags {
        let Some((js1, es1)) = diags.get(&(d + 1)) else {
            continue;
        };
        for (&j, &e1) in js1.iter().zip(es1) {
            for (&k, &e) in js.iter().zip(es) {
                if e1 > e && sigma.image(d + 1, j) == sigma.image(d, k) {
                    return false;
                }
            }
        }
        for (&j, &e) in js.iter().zip(es) {
            for (&k, &e1) in js1.iter().zip(es1) {
                if e > e1 + one && sigma.image(d, j) == sigma.image(d + 1, k) + 1 {
                    return false;
                }
            }
        }
    }
    true
}

/// Admissible permutations with their configurations.
pub fn admissible_configs(f: &FProfile) -> Vec<(DiagonalPermutation, BoxConfig)> {
    enumerate_sym(&partition_of(f))
        .into_iter()
        .filter_map(|s| admissible_h(&s, f).map(|c| (s, c)))
        .collect()
}

/// `(1/|Sym^0|) sum_{admissible sigma} w(Q_sigma)`, and the distinct
/// configurations reached.
pub fn permutation_class_sum(f: &FProfile, ins: &Insertions) -> Result<(RationalFunction, BTreeSet<BoxConfig>), CancellationError> {
    let mut total = RationalFunction::zero();
    let mut hit = BTreeSet::new();
    for (_, c) in admissible_configs(f) {
        total = &total + &descendent_weight(&c, ins)?;
        hit.insert(c);
    }
    let k = sym0_order(f);
    Ok((total.scale(&Scalar::new(BigInt::one(), k)), hit))
}

/// A quotient of polynomials in the symbols `sigma_delta(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaFraction {
    pub num: Poly,
    pub den: Poly,
}

impl SigmaFraction {
    pub fn degree(&self) -> i64 {
        self.num.total_degree().map_or(0, i64::from) - self.den.total_degree().map_or(0, i64::from)
    }

    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, CancellationError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(CancellationError::DivisionByZero);
        }
        Ok(self.num.eval(point) / d)
    }
}

/// Linear factor families of `phi` for one profile.
struct Arena {
    mu: Partition,
    nvars: usize,
    diags: BTreeMap<i64, (Vec<i64>, Vec<Ratio<i64>>)>,
}

impl Arena {
    fn new(f: &FProfile) -> Self {
        let mu = partition_of(f);
        let nvars = mu.size() as usize;
        let diags = f.diagonals().map(|(d, js, es)| (d, (js.to_vec(), es.to_vec()))).collect();
        Arena { mu, nvars, diags }
    }

    fn sigma(&self, d: i64, j: i64) -> Poly {
        Poly::var(self.nvars, cell_index(&self.mu, d, j))
    }

    fn konst(&self, c: i64) -> Poly {
        Poly::constant(self.nvars, int(c))
    }

    fn pairs(&self, d1: i64, d2: i64) -> Vec<(i64, Ratio<i64>, i64, Ratio<i64>)> {
        let (Some((js1, es1)), Some((js2, es2))) = (self.diags.get(&d1), self.diags.get(&d2)) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for (&j1, &e1) in js1.iter().zip(es1) {
            for (&j2, &e2) in js2.iter().zip(es2) {
                if d1 != d2 || j1 != j2 {
                    out.push((j1, e1, j2, e2));
                }
            }
        }
        out
    }

    fn delta_range(&self) -> (i64, i64) {
        (*self.diags.keys().next().unwrap(), *self.diags.keys().next_back().unwrap())
    }

    /// `Q`: `sigma_0(j)` for `e_0(j) > 0`.
    fn q(&self) -> Vec<Poly> {
        let (js, es) = &self.diags[&0];
        js.iter().zip(es).filter(|(_, &e)| e > Ratio::zero()).map(|(&j, _)| self.sigma(0, j)).collect()
    }

    /// `P`: `-sigma_0(j) - 1` for `e_0(j) < -1`.
    fn p(&self) -> Vec<Poly> {
        let (js, es) = &self.diags[&0];
        js.iter()
            .zip(es)
            .filter(|(_, &e)| e < Ratio::from_integer(-1))
            .map(|(&j, _)| &(-&self.sigma(0, j)) - &self.konst(1))
            .collect()
    }

    /// `sigma_d(j1) - sigma_d(j2)` for `e(j1) > e(j2)`.
    fn same_diag_gap(&self, d: i64) -> Vec<Poly> {
        self.pairs(d, d)
            .into_iter()
            .filter(|(_, e1, _, e2)| e1 > e2)
            .map(|(j1, _, j2, _)| &self.sigma(d, j1) - &self.sigma(d, j2))
            .collect()
    }

    /// `S_d`: `sigma_d(j1) - sigma_d(j2) - 1` for `e(j1) > e(j2) + 1`.
    fn s(&self, d: i64) -> Vec<Poly> {
        self.pairs(d, d)
            .into_iter()
            .filter(|(_, e1, _, e2)| *e1 > e2 + 1)
            .map(|(j1, _, j2, _)| &(&self.sigma(d, j1) - &self.sigma(d, j2)) - &self.konst(1))
            .collect()
    }

    /// `R_d`: the factors linking diagonals `d` and `d + 1`.
    fn r(&self, d: i64) -> Vec<Poly> {
        let mut out: Vec<Poly> = self
            .pairs(d + 1, d)
            .into_iter()
            .filter(|(_, e1, _, e2)| e1 > e2)
            .map(|(j1, _, j2, _)| &self.sigma(d + 1, j1) - &self.sigma(d, j2))
            .collect();
        out.extend(
            self.pairs(d, d + 1)
                .into_iter()
                .filter(|(_, e1, _, e2)| *e1 > e2 + 1)
                .map(|(j1, _, j2, _)| &(&self.sigma(d, j1) - &self.sigma(d + 1, j2)) - &self.konst(1)),
        );
        out
    }

    /// The constant factors `(f2, f5, f7, f9, f11)` of `phi`.
    fn constants(&self) -> [Scalar; 5] {
        let prod = |it: &mut dyn Iterator<Item = i64>| it.fold(Scalar::one(), |acc, x| acc * int(x));
        let (js0, _) = &self.diags[&0];
        let f2 = prod(&mut js0.iter().copied().filter(|&j| j > 0));
        let same: Vec<(i64, i64)> = self
            .diags
            .keys()
            .flat_map(|&d| self.pairs(d, d).into_iter().map(|(j1, _, j2, _)| (j1, j2)))
            .collect();
        let f5 = prod(&mut same.iter().filter(|(j1, j2)| j1 > j2).map(|(j1, j2)| j1 - j2));
        let f7 = prod(&mut same.iter().filter(|(j1, j2)| *j1 > j2 + 1).map(|(j1, j2)| j1 - j2 - 1));
        let up: Vec<(i64, i64)> = self
            .diags
            .keys()
            .flat_map(|&d| self.pairs(d + 1, d).into_iter().map(|(j1, _, j2, _)| (j1, j2)))
            .collect();
        let f9 = prod(&mut up.iter().filter(|(j1, j2)| j1 > j2).map(|(j1, j2)| j1 - j2));
        let down: Vec<(i64, i64)> = self
            .diags
            .keys()
            .flat_map(|&d| self.pairs(d, d + 1).into_iter().map(|(j1, _, j2, _)| (j1, j2)))
            .collect();
        let f11 = prod(&mut down.iter().filter(|(j1, j2)| *j1 > j2 + 1).map(|(j1, j2)| j1 - j2 - 1));
        [f2, f5, f7, f9, f11]
    }

    fn product(&self, fs: &[Poly]) -> Poly {
        fs.iter().fold(Poly::one(self.nvars), |acc, x| &acc * x)
    }

    fn phi_factors(&self) -> (Vec<Poly>, Vec<Poly>, Scalar) {
        let mut num = self.q();
        num.extend(self.p());
        let mut den = Vec::new();
        for &d in self.diags.keys() {
            num.extend(self.r(d));
            den.extend(self.same_diag_gap(d));
            den.extend(self.s(d));
        }
        let [f2, f5, f7, f9, f11] = self.constants();
        (num, den, f5 * f7 / (f2 * f9 * f11))
    }

    /// `X = (-1)^{N} c E` with `E` the Vandermonde over equal-`e` pairs.
    fn x(&self) -> Poly {
        let [f2, _, f7, f9, f11] = self.constants();
        let mut c = f7 / (f2 * f9 * f11);
        let mut e = Poly::one(self.nvars);
        for &d in self.diags.keys() {
            for (j1, e1, j2, e2) in self.pairs(d, d) {
                if j1 > j2 && e1 == e2 {
                    e = &e * &(&self.sigma(d, j1) - &self.sigma(d, j2));
                }
            }
            if self.same_diag_gap(d).len() % 2 == 1 {
                c = -c;
            }
        }
        e.scale(&c)
    }
}

/// `phi` as a symbolic fraction.
pub fn phi_form(f: &FProfile) -> SigmaFraction {
    let ar = Arena::new(f);
    let (num, den, c) = ar.phi_factors();
    SigmaFraction {
        num: ar.product(&num).scale(&c),
        den: ar.product(&den),
    }
}

/// `phi(sigma)`, evaluated factor by factor, with its symbolic form.
pub fn phi(sigma: &DiagonalPermutation, f: &FProfile) -> Result<(Scalar, SigmaFraction), CancellationError> {
    let ar = Arena::new(f);
    let point = sigma.point(&ar.mu);
    let (num, den, c) = ar.phi_factors();
    let mut v = c.clone();
    for x in &num {
        v *= x.eval(&point);
    }
    for x in &den {
        let y = x.eval(&point);
        if y.is_zero() {
            return Err(CancellationError::DivisionByZero);
        }
        v /= y;
    }
    Ok((v, SigmaFraction {
        num: ar.product(&num).scale(&c),
        den: ar.product(&den),
    }))
}

/// `kappa_0 = -deg(phi)`
pub fn kappa0(f: &FProfile) -> i64 {
    let ar = Arena::new(f);
    let (num, den, _) = ar.phi_factors();
    den.len() as i64 - num.len() as i64
}

/// `sum_delta |mu_delta| (|mu_delta| - 1) / 2`
pub fn alternating_degree(mu: &Partition) -> i64 {
    mu.diagonals().values().map(|js| (js.len() * (js.len() - 1) / 2) as i64).sum()
}

/// Pure-`v3` part of `-V` for a configuration: `e` of it is `value * u3^exponent`.
pub fn pure_v3_weight(config: &BoxConfig, a: i64) -> Result<(Scalar, i64), CancellationError> {
    let v = vertex_character(config)?;
    let mut value = Scalar::one();
    let mut exponent = 0i64;
    let an = int(a);
    for (w, c) in v.rational_terms() {
        if w[0] != w[1] || w[2] != -(&an * &w[0]) {
            continue;
        }
        if w[0].is_zero() {
            return Err(AlgebraError::ZeroWeight.into());
        }
        value *= crate::exactalg::scalar::pow(&w[0], -c);
        exponent -= c;
    }
    Ok((value, exponent))
}

fn compose(p: &Poly, images: &[Poly], nvars: usize) -> Poly {
    let mut out = Poly::zero(nvars);
    for (m, c) in p.terms() {
        let mut t = Poly::constant(nvars, c.clone());
        for (v, &e) in m.0.iter().enumerate() {
            if e > 0 {
                t = &t * &images[v].pow(e);
            }
        }
        out = &out + &t;
    }
    out
}

/// `F = prod_{1 <= j <= a_i} (x_j - x_i + 1)` over `x_1..x_n, y_1..y_m`.
pub fn division_factor(a: &[usize], m: usize) -> Result<Poly, CancellationError> {
    validate_spec(a)?;
    let n = a.len();
    let nv = n + m;
    let mut f = Poly::one(nv);
    for (i, &ai) in a.iter().enumerate() {
        for j in 0..ai {
            let l = &(&Poly::var(nv, j) - &Poly::var(nv, i)) + &Poly::one(nv);
            f = &f * &l;
        }
    }
    Ok(f)
}

fn validate_spec(a: &[usize]) -> Result<(), CancellationError> {
    for (i, &ai) in a.iter().enumerate() {
        if ai > i {
            return Err(CancellationError::InvalidSpec(format!("a_{} = {ai} is not below {}", i + 1, i + 1)));
        }
        if i > 0 && a[i - 1] > ai {
            return Err(CancellationError::InvalidSpec("sequence is not weakly increasing".into()));
        }
    }
    Ok(())
}

/// The `n! m!` points: `x` a permutation of `1..n`, `y` of `1..m`.
pub fn permutation_points(n: usize, m: usize) -> Vec<Vec<i64>> {
    let xs: Vec<Vec<i64>> = (1..=n as i64).permutations(n).collect();
    let ys: Vec<Vec<i64>> = (1..=m as i64).permutations(m).collect();
    xs.iter()
        .cartesian_product(&ys)
        .map(|(x, y)| x.iter().chain(y).copied().collect())
        .collect()
}

/// Exponent vectors `alpha_i <= i - 1` on each block, total degree `<= k`,
/// ascending by degree.
/// `F` at an integer point, from its linear factors.
fn division_factor_value(a: &[usize], p: &[i64]) -> i64 {
    let mut v = 1i64;
    for (i, &ai) in a.iter().enumerate() {
        for j in 0..ai {
            v *= p[j] - p[i] + 1;
        }
    }
    v
}

fn artin_monomials(n: usize, m: usize, k: i64) -> Vec<Exponents> {
    fn rec(caps: &[u32], left: i64, cur: &mut Exponents, out: &mut Vec<Exponents>) {
        let Some((&c, rest)) = caps.split_first() else {
            out.push(cur.clone());
            return;
        };
        for e in 0..=c.min(left.max(0) as u32) {
            cur.push(e);
            rec(rest, left - e as i64, cur, out);
            cur.pop();
        }
    }
    if k < 0 {
        return Vec::new();
    }
    let caps: Vec<u32> = (0..n as u32).chain(0..m as u32).collect();
    let mut out = Vec::new();
    rec(&caps, k, &mut Exponents::new(), &mut out);
    out.sort_by_key(|e| e.iter().sum::<u32>());
    out
}

/// Minimal-degree `H` with `G = F H` on every permutation point.
pub fn poly_division_on_points(a: &[usize], g: &Poly, m: usize) -> Result<Poly, CancellationError> {
    let f = division_factor(a, m)?;
    let n = a.len();
    let nv = n + m;
    if g.nvars() != nv {
        return Err(CancellationError::InvalidSpec(format!("G has {} variables, expected {nv}", g.nvars())));
    }
    let points = permutation_points(n, m);
    let gvals = g.eval_integer_points(&points);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (p, gv) in points.into_iter().zip(gvals) {
        let fv = division_factor_value(a, &p);
        if fv == 0 {
            if !gv.is_zero() {
                return Err(CancellationError::HypothesisFailed(p));
            }
            continue;
        }
        rows.push(p);
        rhs.push(gv / int(fv));
    }
    if rhs.iter().all(Zero::is_zero) {
        return Ok(Poly::zero(nv));
    }
    let bound = g.total_degree().map_or(-1, i64::from) - f.total_degree().map_or(0, i64::from);
    let basis = artin_monomials(n, m, bound);
    if basis.is_empty() {
        return Err(CancellationError::DegreeBound(bound));
    }
    let monos: Vec<Poly> = basis
        .iter()
        .map(|e| Poly::from_terms(nv, [(e.clone(), Scalar::one())]))
        .collect();
    // Greedy pivots over degree-ascending columns give a minimal-degree solution.
    let mut aug: linalg::Matrix = rows
        .iter()
        .zip(&rhs)
        .map(|(pt, v)| {
            let mut r: Vec<Scalar> = basis
                .iter()
                .map(|e| Scalar::from_integer(e.iter().zip(pt).map(|(&k, &x)| BigInt::from(x).pow(k)).product()))
                .collect();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = linalg::rref(&mut aug);
    if pivots.last() == Some(&basis.len()) {
        return Err(CancellationError::DegreeBound(bound));
    }
    let mut h = Poly::zero(nv);
    for (r, &c) in pivots.iter().enumerate() {
        h = &h + &monos[c].scale(&aug[r][basis.len()]);
    }
    Ok(h)
}

/// A random division instance `(a, G, m)` with `n + m <= max_vars` whose `G`
/// vanishes wherever `F` does on the permutation points. Candidates are
/// products of simple linear forms; `F` times such a product is the fallback.
pub fn random_division_instance<R: rand::Rng>(rng: &mut R, max_vars: usize) -> (Vec<usize>, Poly, usize) {
    let n = rng.gen_range(1..=max_vars.max(1));
    let m = rng.gen_range(0..=max_vars.saturating_sub(n));
    let mut a = Vec::with_capacity(n);
    for i in 0..n {
        let lo = a.last().copied().unwrap_or(0);
        a.push(rng.gen_range(lo..=i.max(lo)));
    }
    let nv = n + m;
    let f = division_factor(&a, m).expect("valid by construction");
    let small = |rng: &mut R| int(rng.gen_range(-3..=3));
    let linear = |rng: &mut R| -> Poly {
        let mut l = Poly::constant(nv, small(rng));
        for v in 0..nv {
            l = &l + &Poly::var(nv, v).scale(&small(rng));
        }
        l
    };
    // G = F H0 + L Z with Z vanishing on every point, so G is generally not
    // a polynomial multiple of F yet satisfies the hypothesis.
    let mut h0 = Poly::constant(nv, int(rng.gen_range(1..=3)));
    for _ in 0..rng.gen_range(0..=2) {
        h0 = &h0 * &linear(rng);
    }
    let total = n as i64 * (n as i64 + 1) / 2;
    let z = &(0..n).fold(Poly::zero(nv), |acc, v| &acc + &Poly::var(nv, v)) - &Poly::constant(nv, int(total));
    let mut lz = linear(rng);
    for _ in 0..rng.gen_range(0..=f.total_degree().unwrap_or(0).min(3)) {
        lz = &lz * &linear(rng);
    }
    let g = &(&f * &h0) + &(&lz * &z);
    (a, g, m)
}

/// Runs the division and confirms `G = F H` on every point of `P` together
/// with `deg H <= deg G - deg F`.
pub fn division_holds(a: &[usize], g: &Poly, m: usize) -> bool {
    let (Ok(f), Ok(h)) = (division_factor(a, m), poly_division_on_points(a, g, m)) else {
        return false;
    };
    let bound = g.total_degree().map_or(-1, i64::from) - f.total_degree().map_or(0, i64::from);
    if h.total_degree().is_some_and(|x| i64::from(x) > bound) {
        return false;
    }
    let points = permutation_points(a.len(), m);
    let (gv, fv, hv) = (g.eval_integer_points(&points), f.eval_integer_points(&points), h.eval_integer_points(&points));
    gv.iter().zip(fv.iter().zip(&hv)).all(|(g, (f, h))| *g == f * h)
}

/// `psi = X P Q R_a prod T_delta`, with each `T_delta = R_delta / S_delta`
/// realized by division on the permutations of `mu_delta x mu_{delta+1}`.
pub fn psi_construct(f: &FProfile) -> Result<Poly, CancellationError> {
    let ar = Arena::new(f);
    let (lo, hi) = ar.delta_range();
    let mut psi = &(&ar.x() * &ar.product(&ar.p())) * &ar.product(&ar.q());
    if lo < hi {
        psi = &psi * &ar.product(&ar.r(lo));
    }
    for d in lo + 1..hi {
        psi = &psi * &t_delta(&ar, d)?;
    }
    Ok(psi)
}

fn t_delta(ar: &Arena, d: i64) -> Result<Poly, CancellationError> {
    let (js, es) = &ar.diags[&d];
    let (js1, _) = &ar.diags[&(d + 1)];
    let (lo, hi, lo1) = (js[0], *js.last().unwrap(), js1[0]);
    let n = js.len();
    let m = js1.len();
    let nv = n + m;
    // x_i = sigma_d(hi - i + 1) - lo + 1, so e is weakly increasing in i
    let et: Vec<Ratio<i64>> = (1..=n).map(|i| es[n - i]).collect();
    let spec: Vec<usize> = (0..n).map(|i| (0..i).filter(|&k| et[k] < et[i] - 1).count()).collect();
    let mut to_local = vec![Poly::zero(nv); ar.nvars];
    let mut to_global = vec![Poly::zero(ar.nvars); nv];
    for i in 1..=n {
        let j = hi - i as i64 + 1;
        to_local[cell_index(&ar.mu, d, j)] = &Poly::var(nv, i - 1) + &Poly::constant(nv, int(lo - 1));
        to_global[i - 1] = &ar.sigma(d, j) - &ar.konst(lo - 1);
    }
    for k in 1..=m {
        let j = lo1 + k as i64 - 1;
        to_local[cell_index(&ar.mu, d + 1, j)] = &Poly::var(nv, n + k - 1) + &Poly::constant(nv, int(lo1 - 1));
        to_global[n + k - 1] = &ar.sigma(d + 1, j) - &ar.konst(lo1 - 1);
    }
    let g = compose(&ar.product(&ar.r(d)), &to_local, nv);
    let h = poly_division_on_points(&spec, &g, m)?;
    // S_d = (-1)^{deg F} F
    let sign = if spec.iter().sum::<usize>() % 2 == 0 { 1 } else { -1 };
    Ok(compose(&h, &to_global, ar.nvars).scale(&int(sign)))
}

/// `sum_{sigma in Sym_mu} sgn(sigma) psi(sigma) Z(sigma)`
pub fn alternating_sum(f: &FProfile, psi: &Poly, z: &Poly) -> Scalar {
    let mu = partition_of(f);
    enumerate_sym(&mu)
        .iter()
        .map(|s| {
            let p = s.point(&mu);
            psi.eval(&p) * z.eval(&p) * int(s.sign())
        })
        .fold(Scalar::zero(), |acc, x| acc + x)
}

/// Whether the alternating sum of `psi Z` vanishes exactly.
pub fn vanishing_sum_check(f: &FProfile, z: &Poly) -> Result<bool, CancellationError> {
    let psi = psi_construct(f)?;
    Ok(alternating_sum(f, &psi, z).is_zero())
}

/// Bounds satisfied by every profile that escapes all four cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCertificate {
    /// `e_delta(j) <= upper` everywhere.
    pub upper: i64,
    /// `e_delta(m_delta) >= lower[delta]`.
    pub lower: BTreeMap<i64, i64>,
    pub holds: bool,
    /// Largest length a configuration with such a profile can have.
    pub max_length: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FCase {
    I { delta: i64, j: i64 },
    II { i: i64 },
    IIIi { delta: i64 },
    IIIii { delta: i64 },
    IV { delta: i64 },
    Contributing(BoundCertificate),
}

impl FCase {
    pub fn label(&self) -> &'static str {
        match self {
            FCase::I { .. } => "I",
            FCase::II { .. } => "II",
            FCase::IIIi { .. } => "III(i)",
            FCase::IIIii { .. } => "III(ii)",
            FCase::IV { .. } => "IV",
            FCase::Contributing(_) => "contributing",
        }
    }

    /// Cases where no configuration has the profile.
    pub fn is_empty_class(&self) -> bool {
        matches!(self, FCase::I { .. } | FCase::IIIi { .. })
    }
}

fn lower_bounds(mu: &Partition) -> BTreeMap<i64, i64> {
    let diags = mu.diagonals();
    let m0 = *diags[&0].last().unwrap();
    diags.keys().map(|&d| (d, -m0 - 1 - d.max(0))).collect()
}

/// Upper bound on the length of configurations with a contributing profile.
pub fn contributing_length_bound(mu: &Partition, a: i64) -> u32 {
    let lower = lower_bounds(mu);
    let total: i64 = mu.cells().into_iter().map(|(i, j)| j - lower[&(i - j)]).sum();
    (a * total) as u32
}

/// First of Cases I-IV that applies, or the bound certificate.
pub fn classify_f(f: &FProfile) -> FCase {
    let mu = partition_of(f);
    let diags: BTreeMap<i64, (Vec<i64>, Vec<Ratio<i64>>)> =
        f.diagonals().map(|(d, js, es)| (d, (js.to_vec(), es.to_vec()))).collect();
    let big_j = mu.len() as i64 - 1;
    for (&d, (js, es)) in &diags {
        for (&j, &e) in js.iter().zip(es) {
            if e > Ratio::from_integer(big_j) {
                return FCase::I { delta: d, j };
            }
        }
    }
    let (_, e0) = &diags[&0];
    let minus1 = Ratio::from_integer(-1);
    for i in 0..e0.len() {
        if e0[i] < minus1 && (i == 0 || e0[i] < e0[i - 1] - 1) {
            return FCase::II { i: i as i64 };
        }
    }
    let last = |d: i64| diags.get(&d).map(|(js, es)| (*js.last().unwrap(), *es.last().unwrap()));
    for &d in diags.keys().filter(|&&d| d >= 0) {
        let (Some((m, e)), Some((m1, e1))) = (last(d), last(d + 1)) else {
            continue;
        };
        if e1 + 1 < e {
            return if m1 == m - 1 { FCase::IIIi { delta: d } } else { FCase::IIIii { delta: d } };
        }
    }
    for &d in diags.keys().filter(|&&d| d < 0) {
        let (Some((_, e)), Some((_, e1))) = (last(d), last(d + 1)) else {
            continue;
        };
        if e < e1 {
            return FCase::IV { delta: d };
        }
    }
    let lower = lower_bounds(&mu);
    let holds = diags.iter().all(|(d, (_, es))| {
        es.iter().all(|&e| e <= Ratio::from_integer(big_j)) && *es.last().unwrap() >= Ratio::from_integer(lower[d])
    });
    FCase::Contributing(BoundCertificate {
        upper: big_j,
        lower,
        holds,
        max_length: contributing_length_bound(&mu, f.a()),
    })
}

/// `prod (i - a_i)` and, for `n <= 8`, the number of permutations with
/// `sigma(i) - 1 != sigma(j)` whenever `1 <= j <= a_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermCount {
    pub formula: u64,
    pub brute: Option<u64>,
}

impl PermCount {
    pub fn agrees(&self) -> bool {
        self.brute.is_none_or(|b| b == self.formula)
    }
}

pub fn count_nonvanishing_permutations(a: &[usize]) -> Result<PermCount, CancellationError> {
    validate_spec(a)?;
    let n = a.len();
    let formula = a.iter().enumerate().map(|(i, &ai)| (i + 1 - ai) as u64).product();
    let brute = (n <= 8).then(|| {
        (1..=n as i64)
            .permutations(n)
            .filter(|s| (0..n).all(|i| (0..a[i]).all(|j| s[i] - 1 != s[j])))
            .count() as u64
    });
    Ok(PermCount { formula, brute })
}
