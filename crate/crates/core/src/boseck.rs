//! Valuations of the `w_k`, the integers `nu_{mu,k}`, the exponents
//! `alpha_lambda` and the Boseck invariants `Gamma_{k,lambda}`.

use crate::exactmath::{frac, p_adic_digits, MathError, Rational};
use crate::ramdata::{RamError, TowerData, WildData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoseckError {
    #[error(transparent)]
    Invalid(#[from] RamError),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("branch point {0} has no wild data")]
    NotWild(String),
    #[error("no branch point with id {0}")]
    UnknownPoint(String),
    #[error("k = {k} out of range [0, {bound}]")]
    KOutOfRange { k: u64, bound: u64 },
    #[error("lambda = {lambda} out of range [0, {n})")]
    LambdaOutOfRange { lambda: u64, n: u64 },
    #[error("inconsistent wild data at {point}: delta + v(w_{k}) = {value} is negative")]
    NegativeNu { point: String, k: u64, value: i64 },
    #[error("Gamma_({k},{lambda}) = {value} is not a nonnegative integer")]
    NonIntegral { k: u64, lambda: u64, value: String },
}

/// `v(w_k) = -sum_j a_j Phi_j p^{ell-j}` where `k = sum_j a_j p^{j-1}`.
pub fn w_valuation(p: u64, jumps: &[u64], k: u64) -> Result<i64, MathError> {
    let ell = jumps.len() as u32;
    let digits = p_adic_digits(k, p, ell)?;
    let v: u64 = digits
        .iter()
        .zip(jumps)
        .enumerate()
        .map(|(j, (&a, &phi))| a * phi * p.pow(ell - 1 - j as u32))
        .sum();
    Ok(-(v as i64))
}

/// `floor((delta + v) / e)`, or `None` when negative.
pub fn nu_value(delta: u64, v: i64, e: u64) -> Option<u64> {
    let num = delta as i64 + v;
    (num >= 0).then(|| num as u64 / e)
}

/// The unique `alpha` in `[0, n)` with `r_act * alpha = lambda (mod n)`.
pub fn alpha_for(r_act: u64, lambda: u64, n: u64) -> u64 {
    (0..n).find(|&a| (r_act * a) % n == lambda % n).expect("r_act is invertible mod n")
}

#[derive(Clone, Debug)]
pub struct BoseckContext {
    tower: TowerData,
    alpha: Vec<u64>,
    /// `nu[i][k]` for branch point `i`; empty for points without wild data.
    nu: Vec<Vec<u64>>,
}

impl BoseckContext {
    pub fn new(tower: &TowerData) -> Result<Self, BoseckError> {
        tower.validate()?;
        let g = &tower.group;
        let pl = g.p_ell();
        let alpha = (0..g.n).map(|l| alpha_for(g.kummer_exponent, l, g.n)).collect();
        let mut nu = Vec::with_capacity(tower.branch_points.len());
        for b in &tower.branch_points {
            let Some(w) = &b.wild else {
                nu.push(Vec::new());
                continue;
            };
            let mut row = Vec::with_capacity(pl as usize);
            for k in 0..pl {
                let v = w_valuation(g.p, &w.jumps, k)?;
                let value = nu_value(w.delta, v, w.e(g.p)).ok_or_else(|| BoseckError::NegativeNu {
                    point: b.id.clone(),
                    k,
                    value: w.delta as i64 + v,
                })?;
                row.push(value);
            }
            nu.push(row);
        }
        Ok(BoseckContext { tower: tower.clone(), alpha, nu })
    }

    pub fn tower(&self) -> &TowerData {
        &self.tower
    }

    /// Index of the branch point with the given id.
    pub fn point_index(&self, id: &str) -> Result<usize, BoseckError> {
        self.tower
            .branch_points
            .iter()
            .position(|b| b.id == id)
            .ok_or_else(|| BoseckError::UnknownPoint(id.to_string()))
    }

    fn wild(&self, point: usize) -> Result<&WildData, BoseckError> {
        let b = &self.tower.branch_points[point];
        b.wild.as_ref().ok_or_else(|| BoseckError::NotWild(b.id.clone()))
    }

    fn check_k(&self, k: u64, bound: u64) -> Result<(), BoseckError> {
        if k > bound {
            return Err(BoseckError::KOutOfRange { k, bound });
        }
        Ok(())
    }

    pub fn alpha(&self, lambda: u64) -> u64 {
        self.alpha[(lambda % self.tower.group.n) as usize]
    }

    pub fn w_valuation(&self, point: usize, k: u64) -> Result<i64, BoseckError> {
        let w = self.wild(point)?;
        self.check_k(k, self.tower.group.p_ell() - 1)?;
        Ok(w_valuation(self.tower.group.p, &w.jumps, k)?)
    }

    pub fn nu(&self, point: usize, k: u64) -> Result<u64, BoseckError> {
        self.wild(point)?;
        self.check_k(k, self.tower.group.p_ell() - 1)?;
        Ok(self.nu[point][k as usize])
    }

    /// `p^ell - p^r`: the first `k` outside the range where the `nu`
    /// terms enter.
    pub fn case_one_end(&self) -> u64 {
        let g = &self.tower.group;
        g.p_ell() - g.p.pow(self.tower.wild_defect())
    }

    /// `nu_{mu,k}`, or zero outside the first case.
    fn nu_term(&self, point: usize, k: u64) -> u64 {
        if k >= self.case_one_end() {
            0
        } else {
            self.nu[point][k as usize]
        }
    }

    /// `Gamma_{k,lambda}` for `0 <= k <= p^ell`.
    pub fn gamma(&self, k: u64, lambda: u64) -> Result<u64, BoseckError> {
        let n = self.tower.group.n;
        self.check_k(k, self.tower.group.p_ell())?;
        if lambda >= n {
            return Err(BoseckError::LambdaOutOfRange { lambda, n });
        }
        let a = self.alpha(lambda) as i64;
        let mut total = Rational::zero();
        for (i, b) in self.tower.branch_points.iter().enumerate() {
            let e = b.e_prime(n) as i64;
            let phi = b.big_phi(n) as i64;
            match (b.is_tame(), b.wild.is_some()) {
                (true, wild) => {
                    total = total + frac(&Rational::new(-a * phi, e));
                    if wild {
                        let inner = frac(&Rational::new(a * phi - 1, e)) + Rational::new(self.nu_term(i, k) as i64, e);
                        total = total + Rational::from_int(inner.floor_i64());
                    }
                }
                (false, true) => total = total + Rational::from_int(self.nu_term(i, k) as i64),
                (false, false) => {}
            }
        }
        match total.to_i64() {
            Some(v) if v >= 0 => Ok(v as u64),
            _ => Err(BoseckError::NonIntegral { k, lambda, value: total.to_string() }),
        }
    }

    /// `Gamma_lambda = sum_i <-alpha Phi_i / e'_i>`, the value of `Gamma` once
    /// all `nu` terms vanish.
    pub fn gamma_tame(&self, lambda: u64) -> Result<u64, BoseckError> {
        self.gamma(self.tower.group.p_ell(), lambda)
    }

    /// `S_k`: sum of `nu_{mu,k}` over all places of `F^P` above wild points.
    pub fn nu_total(&self, k: u64) -> Result<u64, BoseckError> {
        self.check_k(k, self.tower.group.p_ell() - 1)?;
        let n = self.tower.group.n;
        Ok(self
            .tower
            .branch_points
            .iter()
            .enumerate()
            .filter(|(_, b)| b.wild.is_some())
            .map(|(i, b)| {
                let places = if b.is_tame() { b.fp_places(n) } else { n };
                places * self.nu[i][k as usize]
            })
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramdata::{BranchPoint, GroupSpec};

    fn as53() -> TowerData {
        TowerData::new(GroupSpec::new(5, 1, 1), 0, vec![BranchPoint::wild("0", WildData::artin_schreier(5, 3))])
    }

    fn z6() -> TowerData {
        TowerData::new(
            GroupSpec::new(3, 1, 2),
            0,
            vec![
                BranchPoint::tame_and_wild("0", 1, WildData::artin_schreier(3, 2)),
                BranchPoint::tame("inf", 1),
            ],
        )
    }

    #[test]
    fn w_valuation_examples() {
        assert_eq!(w_valuation(5, &[3], 2).unwrap(), -6);
        assert_eq!(w_valuation(5, &[3], 0).unwrap(), 0);
        assert_eq!(w_valuation(3, &[1, 5], 4).unwrap(), -8);
        assert!(w_valuation(5, &[3], 5).is_err());
    }

    #[test]
    fn nu_examples() {
        assert_eq!(nu_value(16, -9, 5), Some(1));
        assert_eq!(nu_value(16, 0, 5), Some(3));
        assert_eq!(nu_value(6, -4, 3), Some(0));
        assert_eq!(nu_value(2, -4, 3), None);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_for(1, 2, 3), 2);
        assert_eq!(alpha_for(2, 1, 5), 3);
        assert_eq!(alpha_for(3, 0, 4), 0);
    }

    #[test]
    fn gamma_artin_schreier_column() {
        let ctx = BoseckContext::new(&as53()).unwrap();
        let col: Vec<u64> = (0..=5).map(|k| ctx.gamma(k, 0).unwrap()).collect();
        assert_eq!(col, vec![3, 2, 2, 1, 0, 0]);
        assert!(ctx.gamma(6, 0).is_err());
    }

    #[test]
    fn gamma_z6_columns() {
        let ctx = BoseckContext::new(&z6()).unwrap();
        let col = |l| (0..3).map(|k| ctx.gamma(k, l).unwrap()).collect::<Vec<_>>();
        assert_eq!(col(0), vec![1, 1, 0]);
        assert_eq!(col(1), vec![2, 1, 1]);
        assert_eq!(ctx.nu_total(0).unwrap(), 2);
    }

    #[test]
    fn gamma_tame_only() {
        let t = TowerData::new(GroupSpec::new(2, 0, 3), 0, (0..3).map(|i| BranchPoint::tame(i.to_string(), 1)).collect());
        let ctx = BoseckContext::new(&t).unwrap();
        assert_eq!(ctx.gamma(0, 0).unwrap(), 0);
        assert_eq!(ctx.gamma_tame(1).unwrap(), 2);
        assert_eq!(ctx.gamma_tame(2).unwrap(), 1);
    }

    #[test]
    fn negative_nu_is_rejected() {
        let mut t = as53();
        // A delta that gives a valid genus but is too small for the jump.
        t.branch_points[0].wild.as_mut().unwrap().delta = 8;
        assert!(matches!(BoseckContext::new(&t), Err(BoseckError::NegativeNu { .. })));
    }
}
