//! Partitions, diagonal coordinates, and T-fixed box configurations of the
//! 1-leg vertex.
//!
//! Cell `(i, j)` of a partition `mu` is present when `i < mu[j]`; part `mu[j]`
//! extends along `t1` in row `j`. The diagonal of `(i, j)` is `delta = i - j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;

use crate::exactalg::{LaurentPoly, TCharacter};

#[derive(Clone, Debug, PartialEq, Eq, Hash, thiserror::Error)]
pub enum PartitionError {
    #[error("partition parts must be positive and weakly decreasing: {0}")]
    NotPartition(String),
    #[error("cannot parse partition {0:?}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, PartitionError> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::NotPartition(format!("{parts:?}")));
        }
        Ok(Partition { parts })
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        i >= 0 && j >= 0 && (j as usize) < self.parts.len() && i < self.parts[j as usize] as i64
    }

    /// Cells in row-major order: rows `j` ascending, then `i` ascending.
    pub fn cells(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::with_capacity(self.size() as usize);
        for (j, &p) in self.parts.iter().enumerate() {
            for i in 0..p as i64 {
                out.push((i, j as i64));
            }
        }
        out
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.parts.first().copied().unwrap_or(0);
        let parts = (0..first)
            .map(|i| self.parts.iter().filter(|&&p| p > i).count() as u32)
            .collect();
        Partition { parts }
    }

    /// `mu_delta`: the `j` with `(delta + j, j)` a cell, ascending.
    pub fn diagonal(&self, delta: i64) -> Vec<i64> {
        (0..self.parts.len() as i64)
            .filter(|&j| self.contains(delta + j, j))
            .collect()
    }

    /// Nonempty diagonals with their members, `delta` ascending.
    pub fn diagonals(&self) -> BTreeMap<i64, Vec<i64>> {
        let mut out: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
        for (i, j) in self.cells() {
            out.entry(i - j).or_default().push(j);
        }
        out
    }

    /// Automorphism count `z(mu) = prod_i i^{m_i} m_i!`.
    pub fn z(&self) -> num_bigint::BigInt {
        let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
        for &p in &self.parts {
            *counts.entry(p).or_insert(0) += 1;
        }
        counts.iter().fold(num_bigint::BigInt::from(1), |acc, (&p, &m)| {
            acc * num_bigint::BigInt::from(p).pow(m) * crate::exactalg::scalar::factorial(m)
        })
    }

    /// `F_mu = sum_{(i,j) in mu} t1^i t2^j`
    pub fn character(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.cells().into_iter().map(|(i, j)| ([i, j, 0], 1)))
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Partition {
    type Err = PartitionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        if t.trim().is_empty() {
            return Ok(Partition::empty());
        }
        let parts = t
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| PartitionError::Parse(s.to_string()))?;
        Partition::new(parts)
    }
}

/// Canonical order: length ascending, then parts lexicographically descending.
pub fn canonical_cmp(a: &Partition, b: &Partition) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| b.parts.cmp(&a.parts))
}

pub fn enumerate_partitions(d: u32) -> Vec<Partition> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out.sort_by(canonical_cmp);
    out
}

/// Depth function on the cells of `mu`, stored in row-major cell order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoxConfig {
    mu: Partition,
    h: Vec<u32>,
}

impl BoxConfig {
    /// Builds a configuration with no validity check (see [`BoxConfig::is_valid`]).
    pub fn new(mu: Partition, h: Vec<u32>) -> Self {
        assert_eq!(h.len(), mu.size() as usize, "one depth per cell");
        BoxConfig { mu, h }
    }

    pub fn minimal(mu: Partition) -> Self {
        let n = mu.size() as usize;
        BoxConfig { mu, h: vec![0; n] }
    }

    pub fn mu(&self) -> &Partition {
        &self.mu
    }

    pub fn depths(&self) -> &[u32] {
        &self.h
    }

    pub fn length(&self) -> u32 {
        self.h.iter().sum()
    }

    fn index(&self, i: i64, j: i64) -> Option<usize> {
        if !self.mu.contains(i, j) {
            return None;
        }
        let before: u32 = self.mu.parts[..j as usize].iter().sum();
        Some(before as usize + i as usize)
    }

    pub fn depth(&self, i: i64, j: i64) -> Option<u32> {
        self.index(i, j).map(|k| self.h[k])
    }

    /// Depth weakly increasing along both axes.
    pub fn is_valid(&self) -> bool {
        self.mu.cells().into_iter().all(|(i, j)| {
            let h = self.depth(i, j).unwrap();
            self.depth(i + 1, j).is_none_or(|x| x >= h) && self.depth(i, j + 1).is_none_or(|x| x >= h)
        })
    }

    /// `F'_U = (1 - t3) F_U = sum t1^i t2^j t3^{-h(i,j)}`
    pub fn f_prime(&self) -> LaurentPoly {
        LaurentPoly::from_terms(
            self.mu
                .cells()
                .into_iter()
                .zip(&self.h)
                .map(|((i, j), &h)| ([i, j, -(h as i64)], 1)),
        )
    }

    /// `F_U = F'_U / (1 - t3)`
    pub fn character(&self) -> TCharacter {
        TCharacter::fraction(self.f_prime(), [([0, 0, 1], 1)])
    }

    pub fn render_table(&self) -> String {
        self.mu
            .cells()
            .into_iter()
            .zip(&self.h)
            .map(|((i, j), h)| format!("({i},{j}): {h}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Display for BoxConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h: Vec<String> = self.h.iter().map(u32::to_string).collect();
        write!(f, "{} h=[{}]", self.mu, h.join(","))
    }
}

/// All monotone depth functions on `mu` with total depth `length`, in
/// lexicographic order of the row-major depth vector.
pub fn enumerate_box_configs(mu: &Partition, length: u32) -> Vec<BoxConfig> {
    let cells = mu.cells();
    let n = cells.len();
    if n == 0 {
        return if length == 0 { vec![BoxConfig::minimal(mu.clone())] } else { Vec::new() };
    }
    let proto = BoxConfig::minimal(mu.clone());
    // number of cells weakly up-right of each cell; each has depth >= this one
    let dominated: Vec<u32> = cells
        .iter()
        .map(|&(i, j)| cells.iter().filter(|&&(a, b)| a >= i && b >= j).count() as u32)
        .collect();
    let mut out = Vec::new();
    let mut h = vec![0u32; n];
    fn rec(
        k: usize,
        rest: u32,
        cells: &[(i64, i64)],
        dominated: &[u32],
        proto: &BoxConfig,
        h: &mut Vec<u32>,
        out: &mut Vec<BoxConfig>,
    ) {
        if k == cells.len() {
            if rest == 0 {
                out.push(BoxConfig {
                    mu: proto.mu.clone(),
                    h: h.clone(),
                });
            }
            return;
        }
        let (i, j) = cells[k];
        let left = proto.index(i - 1, j).map_or(0, |x| h[x]);
        let below = proto.index(i, j - 1).map_or(0, |x| h[x]);
        let lo = left.max(below);
        let mut v = lo;
        while v * dominated[k] <= rest {
            h[k] = v;
            rec(k + 1, rest - v, cells, dominated, proto, h, out);
            v += 1;
        }
        h[k] = 0;
    }
    rec(0, length, &cells, &dominated, &proto, &mut h, &mut out);
    out
}

/// Independent check: the span of `x1^i x2^j x3^k`, `(i,j)` in `mu`,
/// `k >= -h(i,j)`, is a submodule of `C[x1,x2,x3^{+-1}] / I_mu` containing 1.
/// Closure is tested on a window of `x3`-degrees wide enough to see every
/// boundary.
pub fn validate_config_oracle(config: &BoxConfig) -> bool {
    let mu = config.mu();
    if mu.is_empty() {
        return true;
    }
    let cells = mu.cells();
    let hmax = config.depths().iter().copied().max().unwrap_or(0) as i64;
    let (klo, khi) = (-hmax - 2, 2);
    let mut members: BTreeSet<(i64, i64, i64)> = BTreeSet::new();
    for (&(i, j), &h) in cells.iter().zip(config.depths()) {
        for k in -(h as i64)..=khi {
            members.insert((i, j, k));
        }
    }
    if !members.contains(&(0, 0, 0)) {
        return false;
    }
    for &(i, j, k) in &members {
        let images = [(i + 1, j, k), (i, j + 1, k), (i, j, k + 1)];
        for (a, b, c) in images {
            if !mu.contains(a, b) || c > khi || c < klo {
                continue;
            }
            if !members.contains(&(a, b, c)) {
                return false;
            }
        }
    }
    true
}

/// `f = sum_delta sum_j v1^delta v2^{e_delta(j)}`, with `e_delta` weakly
/// decreasing in `j` over `mu_delta`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FProfile {
    a: i64,
    /// `delta -> (mu_delta ascending, e_delta values aligned with it)`
    diagonals: BTreeMap<i64, (Vec<i64>, Vec<Ratio<i64>>)>,
}

impl FProfile {
    pub fn new(mu: &Partition, a: i64, e: BTreeMap<i64, Vec<Ratio<i64>>>) -> Option<FProfile> {
        let diags = mu.diagonals();
        if diags.len() != e.len() {
            return None;
        }
        let mut diagonals = BTreeMap::new();
        for (delta, js) in diags {
            let vals = e.get(&delta)?.clone();
            if vals.len() != js.len() || vals.windows(2).any(|w| w[0] < w[1]) {
                return None;
            }
            diagonals.insert(delta, (js, vals));
        }
        Some(FProfile { a, diagonals })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (i64, &[i64], &[Ratio<i64>])> {
        self.diagonals.iter().map(|(&d, (js, es))| (d, js.as_slice(), es.as_slice()))
    }

    /// `e_delta(j)`
    pub fn e(&self, delta: i64, j: i64) -> Option<Ratio<i64>> {
        let (js, es) = self.diagonals.get(&delta)?;
        js.iter().position(|&x| x == j).map(|k| es[k])
    }

    pub fn render(&self) -> String {
        self.diagonals
            .iter()
            .map(|(d, (_, es))| {
                let v: Vec<String> = es.iter().map(|x| x.to_string()).collect();
                format!("e{d}=[{}]", v.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for FProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Substitutes `t3 = (t1 t2)^{1/a}` into `(1 - t3) F_U`: cell `(i,j)` gives
/// `v1^{i-j} v2^{j - h/a}`.
pub fn f_profile(config: &BoxConfig, a: i64) -> FProfile {
    assert!(a >= 1);
    let mut groups: BTreeMap<i64, Vec<Ratio<i64>>> = BTreeMap::new();
    for (&(i, j), &h) in config.mu.cells().iter().zip(&config.h) {
        groups
            .entry(i - j)
            .or_default()
            .push(Ratio::from_integer(j) - Ratio::new(h as i64, a));
    }
    for v in groups.values_mut() {
        v.sort_by(|x, y| y.cmp(x));
    }
    FProfile::new(&config.mu, a, groups).expect("profile matches its partition")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn partitions_in_canonical_order() {
        assert_eq!(enumerate_partitions(1), vec![p(&[1])]);
        assert_eq!(enumerate_partitions(2), vec![p(&[2]), p(&[1, 1])]);
        assert_eq!(enumerate_partitions(4).len(), 5);
        assert_eq!(
            enumerate_partitions(3),
            vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]
        );
    }

    #[test]
    fn cells_and_diagonals() {
        assert_eq!(p(&[2]).cells(), vec![(0, 0), (1, 0)]);
        assert_eq!(p(&[2, 2]).diagonal(0), vec![0, 1]);
        assert_eq!(p(&[3, 2, 1]).diagonal(0), vec![0, 1]);
        assert_eq!(p(&[3, 1]).conjugate(), p(&[2, 1, 1]));
        assert_eq!(p(&[2, 1, 1]).z(), num_bigint::BigInt::from(4));
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(enumerate_box_configs(&p(&[1]), 5).len(), 1);
        let c = enumerate_box_configs(&p(&[2]), 1);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].depths(), &[0, 1]);
        let c = enumerate_box_configs(&p(&[2]), 2);
        let hs: Vec<&[u32]> = c.iter().map(|x| x.depths()).collect();
        assert_eq!(hs, vec![&[0, 2][..], &[1, 1][..]]);
    }

    #[test]
    fn oracle_examples() {
        assert!(validate_config_oracle(&BoxConfig::new(p(&[2]), vec![0, 1])));
        assert!(!validate_config_oracle(&BoxConfig::new(p(&[2]), vec![1, 0])));
        assert!(validate_config_oracle(&BoxConfig::minimal(p(&[3, 2, 2]))));
    }

    #[test]
    fn profile_examples() {
        let f = f_profile(&BoxConfig::new(p(&[1]), vec![2]), 1);
        assert_eq!(f.e(0, 0), Some(Ratio::from_integer(-2)));
        let f = f_profile(&BoxConfig::new(p(&[1]), vec![0]), 3);
        assert_eq!(f.e(0, 0), Some(Ratio::from_integer(0)));
        // values j on diagonal 0 are {0, 1}, sorted decreasing
        let f = f_profile(&BoxConfig::minimal(p(&[2, 2])), 2);
        assert_eq!(f.e(0, 0), Some(Ratio::from_integer(1)));
        assert_eq!(f.e(0, 1), Some(Ratio::from_integer(0)));
        assert_eq!(f.e(1, 0), Some(Ratio::from_integer(0)));
        assert_eq!(f.e(-1, 1), Some(Ratio::from_integer(1)));
    }
}
