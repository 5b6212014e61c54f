//! Ramification data for a cyclic tower `F / F^P / F^G` and its genera.

use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;

use crate::exactmath::field::is_prime;

/// The cyclic group `Z/(p^ell n)` with wild part of order `p^ell` and tame
/// part of order `n`. The tame generator acts on the Kummer generator by
/// `y -> zeta_n^kummer_exponent y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    pub p: u64,
    pub ell: u32,
    pub n: u64,
    pub kummer_exponent: u64,
}

impl GroupSpec {
    pub fn new(p: u64, ell: u32, n: u64) -> Self {
        GroupSpec { p, ell, n, kummer_exponent: 1 }
    }

    pub fn with_kummer_exponent(mut self, r: u64) -> Self {
        self.kummer_exponent = r;
        self
    }

    /// `p^ell`.
    pub fn p_ell(&self) -> u64 {
        self.p.pow(self.ell)
    }

    pub fn order(&self) -> u64 {
        self.n * self.p_ell()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WildData {
    /// `(Phi_1, ..., Phi_ell)`; the first `ell - epsilon` entries belong to
    /// steps unramified above this point and are zero.
    pub jumps: Vec<u64>,
    pub epsilon: u32,
    pub delta: u64,
}

impl WildData {
    /// Single Artin-Schreier step `z^p - z = f` with a pole of order `m`
    /// (prime to `p`): jump `m`, different exponent `(m+1)(p-1)`.
    pub fn artin_schreier(p: u64, m: u64) -> Self {
        WildData { jumps: vec![m], epsilon: 1, delta: (m + 1) * (p - 1) }
    }

    /// Wild data with `delta` taken from [`delta_from_jumps`].
    pub fn from_jumps(p: u64, jumps: Vec<u64>, epsilon: u32) -> Self {
        let delta = delta_from_jumps(p, &jumps);
        WildData { jumps, epsilon, delta }
    }

    /// Ramification index `p^epsilon` of a place of `F` over `F^P`.
    pub fn e(&self, p: u64) -> u64 {
        p.pow(self.epsilon)
    }
}

/// Different exponent of a point in an Artin-Schreier tower whose ramified
/// steps have jumps `Phi_j`: `(p-1) sum_j p^{ell-j} (Phi_j + 1)` over the
/// nonzero entries.
pub fn delta_from_jumps(p: u64, jumps: &[u64]) -> u64 {
    let ell = jumps.len() as u32;
    jumps
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(j, &m)| (p - 1) * p.pow(ell - 1 - j as u32) * (m + 1))
        .sum()
}

/// True when each jump dominates the weighted sum of the earlier ones, the
/// condition under which `v(w_k)` is decreasing in `k`.
pub fn jumps_dominant(p: u64, jumps: &[u64]) -> bool {
    (0..jumps.len()).all(|j| {
        let lower: u64 = (0..j).map(|i| jumps[i] * p.pow((j - i) as u32)).sum();
        jumps[j] == 0 || jumps[j] > (p - 1) * lower
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BranchPoint {
    pub id: String,
    /// Kummer exponent `phi` in `[0, n)`; zero means unramified in `F^P/F^G`.
    pub tame_phi: u64,
    pub wild: Option<WildData>,
}

impl BranchPoint {
    pub fn tame(id: impl Into<String>, phi: u64) -> Self {
        BranchPoint { id: id.into(), tame_phi: phi, wild: None }
    }

    pub fn wild(id: impl Into<String>, wild: WildData) -> Self {
        BranchPoint { id: id.into(), tame_phi: 0, wild: Some(wild) }
    }

    pub fn tame_and_wild(id: impl Into<String>, phi: u64, wild: WildData) -> Self {
        BranchPoint { id: id.into(), tame_phi: phi, wild: Some(wild) }
    }

    pub fn is_tame(&self) -> bool {
        self.tame_phi > 0
    }

    /// `e' = n / gcd(n, phi)`, 1 when unramified.
    pub fn e_prime(&self, n: u64) -> u64 {
        if self.tame_phi == 0 {
            1
        } else {
            n / n.gcd(&self.tame_phi)
        }
    }

    /// `Phi = phi / gcd(n, phi)`.
    pub fn big_phi(&self, n: u64) -> u64 {
        if self.tame_phi == 0 {
            0
        } else {
            self.tame_phi / n.gcd(&self.tame_phi)
        }
    }

    /// Number of places of `F^P` above this point.
    pub fn fp_places(&self, n: u64) -> u64 {
        n / self.e_prime(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerData {
    pub group: GroupSpec,
    pub base_genus: u64,
    pub branch_points: Vec<BranchPoint>,
    pub genus_ert: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub field: String,
    pub constraint: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.constraint)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RamError {
    #[error("invalid tower: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Genera {
    pub g_base: u64,
    pub g_fp: u64,
    pub g_f: u64,
    pub g_ert: u64,
}

/// Genus from `2g - 2 = twice_minus_two`.
fn genus_from(twice_minus_two: i64, what: &str) -> Result<u64, RamError> {
    if twice_minus_two < -2 || twice_minus_two % 2 != 0 {
        return Err(RamError::Inconsistent(format!("{what}: 2g-2 = {twice_minus_two} is not a valid genus")));
    }
    Ok((twice_minus_two / 2 + 1) as u64)
}

impl TowerData {
    pub fn new(group: GroupSpec, base_genus: u64, branch_points: Vec<BranchPoint>) -> Self {
        TowerData { group, base_genus, branch_points, genus_ert: None }
    }

    pub fn tame_points(&self) -> impl Iterator<Item = &BranchPoint> {
        self.branch_points.iter().filter(|b| b.is_tame())
    }

    pub fn wild_points(&self) -> impl Iterator<Item = (&BranchPoint, &WildData)> {
        self.branch_points.iter().filter_map(|b| b.wild.as_ref().map(|w| (b, w)))
    }

    /// Number of tame-ramified points.
    pub fn t(&self) -> usize {
        self.tame_points().count()
    }

    /// Tame-ramified points without wild data.
    pub fn t0(&self) -> usize {
        self.tame_points().filter(|b| b.wild.is_none()).count()
    }

    /// Wild branch orbits.
    pub fn s(&self) -> usize {
        self.wild_points().count()
    }

    /// Places of `F^P` above tame-and-wild points.
    pub fn s0(&self) -> u64 {
        let n = self.group.n;
        self.tame_points().filter(|b| b.wild.is_some()).map(|b| b.fp_places(n)).sum()
    }

    /// `deg A = -sum phi_i / n`.
    pub fn deg_a(&self) -> i64 {
        let total: u64 = self.branch_points.iter().map(|b| b.tame_phi).sum();
        -((total / self.group.n) as i64)
    }

    /// `r = ell - max epsilon`, or `ell` without wild data.
    pub fn wild_defect(&self) -> u32 {
        let max_eps = self.wild_points().map(|(_, w)| w.epsilon).max().unwrap_or(0);
        self.group.ell.saturating_sub(max_eps)
    }

    /// Genus of the fixed field of the subgroup of order `p^{ell - r}`
    /// extended by the tame part; the base genus when `r = 0`.
    pub fn genus_ert_effective(&self) -> Option<u64> {
        if self.wild_defect() == 0 {
            Some(self.base_genus)
        } else {
            self.genus_ert
        }
    }

    pub fn genus_fp(&self) -> Result<u64, RamError> {
        let n = self.group.n as i64;
        let ram: i64 = self.tame_points().map(|b| n - n / b.e_prime(self.group.n) as i64).sum();
        genus_from(n * (2 * self.base_genus as i64 - 2) + ram, "genus of F^P")
    }

    pub fn genus_f(&self) -> Result<u64, RamError> {
        let g_fp = self.genus_fp()? as i64;
        let p = self.group.p;
        let pl = self.group.p_ell();
        let n = self.group.n;
        let diff: u64 = self
            .wild_points()
            .map(|(b, w)| {
                let places = if b.is_tame() { b.fp_places(n) } else { n };
                places * (pl / w.e(p)) * w.delta
            })
            .sum();
        genus_from(pl as i64 * (2 * g_fp - 2) + diff as i64, "genus of F")
    }

    pub fn genera(&self) -> Result<Genera, RamError> {
        Ok(Genera {
            g_base: self.base_genus,
            g_fp: self.genus_fp()?,
            g_f: self.genus_f()?,
            g_ert: self
                .genus_ert_effective()
                .ok_or_else(|| RamError::Inconsistent("genus_ErT is required".into()))?,
        })
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |field: &str, constraint: String| {
            out.push(Violation { field: field.to_string(), constraint });
        };
        let GroupSpec { p, ell, n, kummer_exponent: r_act } = self.group;

        if !is_prime(p) {
            bad("group.p", format!("{p} is not prime"));
        }
        if n == 0 {
            bad("group.n", "n must be positive".into());
            return out;
        }
        if n.gcd(&p) != 1 {
            bad("group.n", format!("gcd(n, p) = {} must be 1", n.gcd(&p)));
        }
        let r_ok = if n == 1 { r_act == 1 } else { (1..n).contains(&r_act) && r_act.gcd(&n) == 1 };
        if !r_ok {
            bad("group.kummer_exponent", format!("{r_act} must lie in [1, n) and be prime to n = {n}"));
        }
        if p.checked_pow(ell).and_then(|pl| pl.checked_mul(n)).is_none_or(|o| o > 1 << 40) {
            bad("group.ell", "group order is too large".into());
            return out;
        }

        let mut ids = HashSet::new();
        for (idx, b) in self.branch_points.iter().enumerate() {
            let field = |k: &str| format!("branch[{idx}]({}).{k}", b.id);
            if !ids.insert(b.id.as_str()) {
                bad(&field("id"), "duplicate branch point id".into());
            }
            if b.tame_phi >= n {
                bad(&field("tame_phi"), format!("{} must lie in [0, n = {n})", b.tame_phi));
            }
            if b.tame_phi == 0 && b.wild.is_none() {
                bad(&field("tame_phi"), "point is neither tame- nor wild-ramified".into());
            }
            if n == 1 && b.wild.is_none() {
                bad(&field("wild"), "n = 1 requires wild data at every branch point".into());
            }
            if let Some(w) = &b.wild {
                if ell == 0 {
                    bad(&field("jumps"), "wild data requires ell >= 1".into());
                    continue;
                }
                if !(1..=ell).contains(&w.epsilon) {
                    bad(&field("epsilon"), format!("{} must lie in [1, ell = {ell}]", w.epsilon));
                    continue;
                }
                if w.jumps.len() != ell as usize {
                    bad(&field("jumps"), format!("expected {ell} jumps, got {}", w.jumps.len()));
                    continue;
                }
                let split = (ell - w.epsilon) as usize;
                if w.jumps[..split].iter().any(|&m| m != 0) {
                    bad(&field("jumps"), format!("the first {split} jumps (unramified steps) must be 0"));
                }
                if let Some(m) = w.jumps[split..].iter().find(|&&m| m == 0 || m % p == 0) {
                    bad(&field("jumps"), format!("jump {m} must be positive and prime to p"));
                }
                let e = w.e(p);
                if w.delta + 1 < e {
                    bad(&field("delta"), format!("{} must be at least e - 1 = {}", w.delta, e - 1));
                }
            }
        }

        let total: u64 = self.branch_points.iter().map(|b| b.tame_phi).sum();
        if total % n != 0 {
            bad("branch.tame_phi", format!("sum of phi_i = {total} not = 0 mod n = {n}"));
        }
        if self.base_genus == 0 && n > 1 {
            let g = self.branch_points.iter().fold(n, |g, b| g.gcd(&b.tame_phi));
            if g != 1 {
                bad("branch.tame_phi", format!("gcd(n, phi_i) = {g}: the Kummer layer of a rational base is reducible"));
            }
        }

        let r = self.wild_defect();
        if r != 0 && self.group.order() > 1 {
            let expected = p.pow(r) as i64 * (self.base_genus as i64 - 1) + 1;
            match self.genus_ert {
                None => bad("base.genus_ErT", format!("required when the wild defect r = {r} is nonzero")),
                Some(g) if g as i64 != expected => bad(
                    "base.genus_ErT",
                    format!("{g} differs from p^r (g - 1) + 1 = {expected} forced by the unramified layer"),
                ),
                _ => {}
            }
        }

        if let Err(e) = self.genus_f() {
            bad("genus", e.to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<(), RamError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(RamError::Invalid(v))
        }
    }

    /// Non-fatal observations about the data.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let eps: HashSet<u32> = self.wild_points().map(|(_, w)| w.epsilon).collect();
        if eps.len() > 1 && self.wild_defect() != 0 {
            out.push("wild points have different epsilon and the wild defect is nonzero".to_string());
        }
        for (b, w) in self.wild_points() {
            if !jumps_dominant(self.group.p, &w.jumps) {
                out.push(format!("branch {}: jumps are not dominant; c(lambda, k) may fail to be monotone", b.id));
            }
            let e = b.e_prime(self.group.n);
            if w.jumps.iter().any(|j| j % e != 0) {
                out.push(format!("branch {}: jumps are not multiples of e' = {e}, so no cyclic cover has this data", b.id));
            }
        }
        out
    }

    /// Stable one-line rendering, used for fingerprints.
    pub fn canonical(&self) -> String {
        let g = &self.group;
        let mut s = format!("p={};ell={};n={};r={};g={};gErT={:?}", g.p, g.ell, g.n, g.kummer_exponent, self.base_genus, self.genus_ert);
        for b in &self.branch_points {
            s.push_str(&format!("|{}:{}", b.id, b.tame_phi));
            if let Some(w) = &b.wild {
                s.push_str(&format!(":{:?}:{}:{}", w.jumps, w.epsilon, w.delta));
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z6() -> TowerData {
        TowerData::new(
            GroupSpec::new(3, 1, 2),
            0,
            vec![
                BranchPoint::tame_and_wild("0", 1, WildData { jumps: vec![2], epsilon: 1, delta: 6 }),
                BranchPoint::tame("inf", 1),
            ],
        )
    }

    #[test]
    fn validate_examples() {
        let t = TowerData::new(GroupSpec::new(5, 0, 3), 0, (0..3).map(|i| BranchPoint::tame(i.to_string(), 1)).collect());
        assert!(t.validate().is_ok());
        let t = TowerData::new(GroupSpec::new(5, 0, 3), 0, (0..2).map(|i| BranchPoint::tame(i.to_string(), 1)).collect());
        let v = t.violations();
        assert!(v.iter().any(|v| v.constraint.contains("not = 0 mod n")), "{v:?}");
        assert!(z6().validate().is_ok());
    }

    #[test]
    fn genus_examples() {
        let t = TowerData::new(GroupSpec::new(5, 0, 3), 0, (0..3).map(|i| BranchPoint::tame(i.to_string(), 1)).collect());
        assert_eq!(t.genus_fp().unwrap(), 1);
        let t = TowerData::new(GroupSpec::new(5, 0, 2), 0, (0..2).map(|i| BranchPoint::tame(i.to_string(), 1)).collect());
        assert_eq!(t.genus_fp().unwrap(), 0);
        let as53 = TowerData::new(GroupSpec::new(5, 1, 1), 0, vec![BranchPoint::wild("0", WildData::artin_schreier(5, 3))]);
        assert_eq!(as53.branch_points[0].wild.as_ref().unwrap().delta, 16);
        assert_eq!(as53.genus_fp().unwrap(), 0);
        assert_eq!(as53.genus_f().unwrap(), 4);
        assert_eq!(z6().genus_f().unwrap(), 1);
        assert_eq!(z6().deg_a(), -1);
        assert_eq!(z6().wild_defect(), 0);
        assert_eq!((z6().t(), z6().t0(), z6().s(), z6().s0()), (2, 1, 1, 1));
    }

    #[test]
    fn genus_without_wild_part() {
        // Unramified p-part over an elliptic base.
        let mut t = TowerData::new(GroupSpec::new(3, 1, 2), 1, vec![BranchPoint::tame("a", 1), BranchPoint::tame("b", 1)]);
        t.genus_ert = Some(1);
        assert_eq!(t.genus_fp().unwrap(), 2);
        assert_eq!(t.genus_f().unwrap(), 3 * (2 * 2 - 2) / 2 + 1);
        assert!(t.validate().is_ok());
        t.genus_ert = Some(5);
        assert!(t.validate().is_err());
        t.genus_ert = None;
        assert!(t.violations().iter().any(|v| v.field == "base.genus_ErT"));
    }

    #[test]
    fn rejects_bad_wild_data() {
        let mut t = z6();
        t.branch_points[0].wild.as_mut().unwrap().jumps = vec![3];
        assert!(t.validate().is_err());
        let t = TowerData::new(GroupSpec::new(3, 1, 1), 0, vec![BranchPoint::tame("x", 0)]);
        assert!(t.validate().is_err());
        // Rational base with an unramified p-layer is impossible.
        let t = TowerData::new(GroupSpec::new(3, 2, 1), 0, vec![BranchPoint::wild("x", WildData::from_jumps(3, vec![0, 1], 1))]);
        assert!(t.violations().iter().any(|v| v.field == "base.genus_ErT"));
    }

    #[test]
    fn warns_on_jumps_prime_to_e() {
        assert!(z6().warnings().is_empty());
        let mut t = z6();
        let w = t.branch_points[0].wild.as_mut().unwrap();
        w.jumps = vec![1];
        w.delta = delta_from_jumps(3, &w.jumps);
        assert!(t.warnings().iter().any(|w| w.contains("e' = 2")), "{:?}", t.warnings());
    }

    #[test]
    fn delta_helpers() {
        assert_eq!(delta_from_jumps(5, &[3]), 16);
        assert_eq!(delta_from_jumps(3, &[1, 5]), 2 * (3 * 2 + 6));
        assert_eq!(delta_from_jumps(3, &[0, 2]), 6);
        assert!(jumps_dominant(3, &[1, 7]));
        assert!(!jumps_dominant(3, &[1, 5]));
        assert!(!jumps_dominant(3, &[2, 5]));
    }

    #[test]
    fn wild_defect_is_zero_iff_fully_ramified() {
        let t = TowerData::new(
            GroupSpec::new(2, 2, 1),
            1,
            vec![BranchPoint::wild("a", WildData::from_jumps(2, vec![0, 1], 1))],
        );
        assert_eq!(t.wild_defect(), 1);
        let t = TowerData::new(GroupSpec::new(2, 2, 1), 1, vec![BranchPoint::wild("a", WildData::from_jumps(2, vec![1, 3], 2))]);
        assert_eq!(t.wild_defect(), 0);
    }
}
