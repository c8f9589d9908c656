//! Integral Jack polynomials `J_lambda` in the power-sum basis, with
//! coefficients in `Q[alpha]`.

use std::collections::HashMap;

use crate::boxconfig::Partition;
use crate::exactalg::linalg;
use crate::exactalg::scalar::{int, Scalar};
use crate::exactalg::univariate::{UniPoly, UniRational};

/// Partitions of `n` in lexicographically increasing order (dominance-compatible).
pub fn lex_ascending(n: u32) -> Vec<Partition> {
    let mut v = crate::boxconfig::enumerate_partitions(n);
    v.sort_by(|a, b| a.parts().cmp(b.parts()));
    v
}

/// Coefficient of `m_lambda` in `p_rho`: assignments of the parts of `rho`
/// to rows of `lambda` with matching row sums.
fn power_sum_in_monomials(rho: &Partition, lambda: &Partition) -> Scalar {
    fn rec(rest: &[u32], target: &mut Vec<i64>) -> u64 {
        match rest.split_first() {
            None => u64::from(target.iter().all(|&x| x == 0)),
            Some((&p, tail)) => {
                let mut total = 0;
                for k in 0..target.len() {
                    if target[k] >= p as i64 {
                        target[k] -= p as i64;
                        total += rec(tail, target);
                        target[k] += p as i64;
                    }
                }
                total
            }
        }
    }
    let mut target: Vec<i64> = lambda.parts().iter().map(|&x| x as i64).collect();
    int(rec(rho.parts(), &mut target) as i64)
}

/// `J_lambda = sum_eta theta[lambda][eta](alpha) p_eta` for all `lambda, eta |- n`.
pub struct JackTable {
    pub partitions: Vec<Partition>,
    pub theta: HashMap<(Partition, Partition), UniPoly>,
}

fn arm_leg(lambda: &Partition) -> Vec<(i64, i64)> {
    let conj = lambda.conjugate();
    lambda
        .cells()
        .into_iter()
        .map(|(i, j)| {
            let arm = lambda.parts()[j as usize] as i64 - 1 - i;
            let leg = conj.parts()[i as usize] as i64 - 1 - j;
            (arm, leg)
        })
        .collect()
}

pub fn jack_table(n: u32) -> JackTable {
    let parts = lex_ascending(n);
    let k = parts.len();
    // L[rho][lambda] = coefficient of m_lambda in p_rho, so p = L m and m = L^{-1} p
    let l: linalg::Matrix = parts
        .iter()
        .map(|rho| parts.iter().map(|lam| power_sum_in_monomials(rho, lam)).collect())
        .collect();
    let linv = linalg::inverse(&l).expect("power sums form a basis");
    // m_lambda = sum_rho Linv[lambda][rho] p_rho
    let m_in_p: Vec<Vec<UniRational>> = (0..k)
        .map(|lam| (0..k).map(|rho| UniRational::constant(linv[lam][rho].clone())).collect())
        .collect();
    let alpha = UniPoly::x();
    // <p_rho, p_rho> = z_rho alpha^{l(rho)}
    let norms: Vec<UniRational> = parts
        .iter()
        .map(|rho| {
            let mut a = UniPoly::constant(Scalar::from_integer(rho.z()));
            for _ in 0..rho.len() {
                a = &a * &alpha;
            }
            UniRational::from_poly(a)
        })
        .collect();
    let inner = |u: &[UniRational], v: &[UniRational]| -> UniRational {
        let mut acc = UniRational::zero();
        for r in 0..k {
            if !u[r].is_zero() && !v[r].is_zero() {
                acc = &acc + &(&(&u[r] * &v[r]) * &norms[r]);
            }
        }
        acc
    };
    let mut p_basis: Vec<Vec<UniRational>> = Vec::with_capacity(k);
    let mut p_norms: Vec<UniRational> = Vec::with_capacity(k);
    for lam in 0..k {
        let mut v = m_in_p[lam].clone();
        for mu in 0..lam {
            let c = &inner(&m_in_p[lam], &p_basis[mu]) * &p_norms[mu].recip();
            if c.is_zero() {
                continue;
            }
            for r in 0..k {
                v[r] = &v[r] - &(&c * &p_basis[mu][r]);
            }
        }
        p_norms.push(inner(&v, &v));
        p_basis.push(v);
    }
    let mut theta = HashMap::new();
    for (lam, lambda) in parts.iter().enumerate() {
        let mut c = UniPoly::one();
        for (arm, leg) in arm_leg(lambda) {
            c = &c * &UniPoly::new(vec![int(leg + 1), int(arm)]);
        }
        let c = UniRational::from_poly(c);
        for (r, rho) in parts.iter().enumerate() {
            let coeff = &p_basis[lam][r] * &c;
            let poly = coeff
                .as_poly()
                .cloned()
                .expect("integral Jack coefficients are polynomial in alpha");
            theta.insert((lambda.clone(), rho.clone()), poly);
        }
    }
    JackTable { partitions: parts, theta }
}

impl JackTable {
    pub fn coeff(&self, lambda: &Partition, eta: &Partition) -> &UniPoly {
        &self.theta[&(lambda.clone(), eta.clone())]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn small_integral_jacks() {
        // J_(1,1) = p1^2 - p2 ; J_(2) = p1^2 + alpha p2
        let t = jack_table(2);
        assert_eq!(t.coeff(&p(&[1, 1]), &p(&[1, 1])), &UniPoly::one());
        assert_eq!(t.coeff(&p(&[1, 1]), &p(&[2])), &UniPoly::constant(int(-1)));
        assert_eq!(t.coeff(&p(&[2]), &p(&[1, 1])), &UniPoly::one());
        assert_eq!(t.coeff(&p(&[2]), &p(&[2])), &UniPoly::x());
    }

    #[test]
    fn coefficient_of_p1_power_is_one() {
        let n = 4;
        let t = jack_table(n);
        let ones = p(&[1, 1, 1, 1]);
        for lam in &t.partitions {
            assert_eq!(t.coeff(lam, &ones), &UniPoly::one());
        }
    }
}
