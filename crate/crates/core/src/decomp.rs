//! Filtration dimensions `c(lambda,k)`, multiplicities `d(lambda,k)` and the
//! decomposition of the space of holomorphic differentials.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::boseck::{BoseckContext, BoseckError};
use crate::exactmath::Rational;
use crate::ramdata::{Genera, RamError, TowerData};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecompError {
    #[error(transparent)]
    Boseck(#[from] BoseckError),
    #[error(transparent)]
    Ram(#[from] RamError),
    #[error("k = {k} outside the range [0, {end}) where deg E is defined")]
    OutOfDomain { k: u64, end: u64 },
    #[error("inconsistent genus_ErT: {0}")]
    Case2NotIntegral(String),
    #[error("assertion failed at (lambda={lambda}, k={k}): {what}")]
    Assertion { lambda: u64, k: u64, what: String },
    #[error("{0}")]
    Unsupported(String),
}

/// `V(lambda, k)`: one Jordan block of size `k` with eigenvalue `zeta^lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModuleLabel {
    pub lambda: u64,
    pub k: u64,
}

impl ModuleLabel {
    pub fn new(lambda: u64, k: u64, n: u64, p_ell: u64) -> Option<Self> {
        (lambda < n && (1..=p_ell).contains(&k)).then_some(ModuleLabel { lambda, k })
    }
}

impl fmt::Display for ModuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V({},{})", self.lambda, self.k)
    }
}

/// FNV-1a, 64 bit.
pub fn fingerprint(s: &str) -> u64 {
    s.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionTable {
    pub n: u64,
    pub p_ell: u64,
    /// Every label, including zero multiplicities.
    pub entries: BTreeMap<ModuleLabel, u64>,
    pub tower_hash: u64,
    pub genera: Genera,
}

impl DecompositionTable {
    pub fn empty(n: u64, p_ell: u64, tower_hash: u64, genera: Genera) -> Self {
        let entries = (0..n)
            .flat_map(|lambda| (1..=p_ell).map(move |k| (ModuleLabel { lambda, k }, 0)))
            .collect();
        DecompositionTable { n, p_ell, entries, tower_hash, genera }
    }

    pub fn d(&self, lambda: u64, k: u64) -> u64 {
        self.entries.get(&ModuleLabel { lambda, k }).copied().unwrap_or(0)
    }

    /// `c(lambda, i) = sum_{k > i} d(lambda, k)`.
    pub fn c(&self, lambda: u64, i: u64) -> u64 {
        (i + 1..=self.p_ell).map(|k| self.d(lambda, k)).sum()
    }

    /// `sum k d(lambda, k)`.
    pub fn dimension(&self) -> u64 {
        self.entries.iter().map(|(l, d)| l.k * d).sum()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (ModuleLabel, u64)> + '_ {
        self.entries.iter().filter(|(_, &d)| d > 0).map(|(&l, &d)| (l, d))
    }

    /// `lambda,k,d` rows, lambda then k ascending.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,k,d\n");
        for (l, d) in &self.entries {
            let _ = writeln!(s, "{},{},{}", l.lambda, l.k, d);
        }
        s
    }

    pub fn from_csv(text: &str, n: u64, p_ell: u64) -> Result<BTreeMap<ModuleLabel, u64>, String> {
        let mut lines = text.lines();
        if lines.next() != Some("lambda,k,d") {
            return Err("missing header lambda,k,d".into());
        }
        let mut out = BTreeMap::new();
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            let [l, k, d] = fields[..] else { return Err(format!("row {}: expected 3 fields", i + 2)) };
            let parse = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("row {}: {e}", i + 2));
            let label = ModuleLabel::new(parse(l)?, parse(k)?, n, p_ell).ok_or(format!("row {}: label out of range", i + 2))?;
            out.insert(label, parse(d)?);
        }
        Ok(out)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tower {:016x}", self.tower_hash);
        for (l, d) in self.nonzero() {
            let _ = writeln!(s, "{l}^{d}");
        }
        let _ = writeln!(s, "sum k*d = {} = g_F = {}", self.dimension(), self.genera.g_f);
        s
    }
}

/// One summand of the divisor `E_{k,lambda}` before and after rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SketchEntry {
    pub label: String,
    pub coefficient: Rational,
    pub reduced: i64,
    /// Degree of the underlying divisor (1 for a place of `F^G`).
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorSketch {
    pub entries: Vec<SketchEntry>,
}

impl DivisorSketch {
    pub fn degree(&self) -> i64 {
        self.entries.iter().map(|e| e.reduced * e.weight).sum()
    }
}

/// Closed-form engine over one tower.
#[derive(Clone, Debug)]
pub struct Decomposer {
    ctx: BoseckContext,
    genera: Genera,
}

impl Decomposer {
    pub fn new(tower: &TowerData) -> Result<Self, DecompError> {
        let ctx = BoseckContext::new(tower)?;
        let genera = tower.genera()?;
        Ok(Decomposer { ctx, genera })
    }

    pub fn context(&self) -> &BoseckContext {
        &self.ctx
    }

    pub fn genera(&self) -> Genera {
        self.genera
    }

    fn tower(&self) -> &TowerData {
        self.ctx.tower()
    }

    fn p_r(&self) -> u64 {
        self.tower().group.p.pow(self.tower().wild_defect())
    }

    /// The rational divisor `E_{k,lambda}` and its rounding, assembled point
    /// by point from the Kummer exponents and the `nu` values.
    pub fn divisor_sketch(&self, k: u64, lambda: u64) -> Result<DivisorSketch, DecompError> {
        let end = self.ctx.case_one_end();
        if k >= end {
            return Err(DecompError::OutOfDomain { k, end });
        }
        let t = self.tower();
        let n = t.group.n as i64;
        let a = self.ctx.alpha(lambda) as i64;
        let mut entries = Vec::new();
        for (i, b) in t.branch_points.iter().enumerate() {
            let e = b.e_prime(t.group.n) as i64;
            let phi = b.tame_phi as i64;
            let coefficient = match (b.is_tame(), b.wild.is_some()) {
                (true, false) => Rational::new(a * phi, n) + Rational::new(e - 1, e),
                (true, true) => {
                    // Norm of nu P over the n/e' places above the point.
                    let nu = self.ctx.nu(i, k)? as i64;
                    Rational::new(a * phi + (n / e) * nu, n) + Rational::new(e - 1, e)
                }
                (false, true) => Rational::from_int(self.ctx.nu(i, k)? as i64),
                (false, false) => continue,
            };
            let reduced = coefficient.floor_i64();
            entries.push(SketchEntry { label: format!("Q[{}]", b.id), coefficient, reduced, weight: 1 });
        }
        entries.push(SketchEntry {
            label: "A".into(),
            coefficient: Rational::from_int(a),
            reduced: a,
            weight: t.deg_a(),
        });
        Ok(DivisorSketch { entries })
    }

    /// `deg E_{k,lambda}`, for `k` in the first case.
    pub fn deg_e(&self, k: u64, lambda: u64) -> Result<i64, DecompError> {
        Ok(self.divisor_sketch(k, lambda)?.degree())
    }

    pub fn gamma(&self, k: u64, lambda: u64) -> Result<u64, DecompError> {
        Ok(self.ctx.gamma(k, lambda)?)
    }

    /// `Lambda_{k,lambda} = 1` iff `Gamma_{k,lambda} = 0`.
    pub fn lambda_indicator(&self, k: u64, lambda: u64) -> Result<u64, DecompError> {
        Ok((self.gamma(k, lambda)? == 0) as u64)
    }

    pub fn c_value(&self, lambda: u64, k: u64) -> Result<u64, DecompError> {
        let t = self.tower();
        let pl = t.group.p_ell();
        if k >= pl {
            return Err(DecompError::Assertion { lambda, k, what: "k must be below p^ell".into() });
        }
        let g = t.base_genus as i64;
        let end = self.ctx.case_one_end();
        if k < end {
            let gamma = self.gamma(k, lambda)? as i64;
            let lam = self.lambda_indicator(k, lambda)? as i64;
            return non_negative(g - 1 + gamma + lam, lambda, k);
        }
        if k == end && lambda == 0 {
            return Ok(t.base_genus);
        }
        let p_r = self.p_r() as i64;
        let g_ert = self.genera.g_ert as i64;
        let num = g_ert - 1 + p_r * self.ctx.gamma_tame(lambda)? as i64;
        if num % p_r != 0 {
            return Err(DecompError::Case2NotIntegral(format!(
                "c({lambda},{k}) = ({num})/{p_r} is not an integer"
            )));
        }
        non_negative(num / p_r, lambda, k)
    }

    /// `d(lambda,k) = c(lambda,k-1) - c(lambda,k)`, `d(lambda,p^ell) = c(lambda,p^ell-1)`.
    pub fn d_value(&self, lambda: u64, k: u64) -> Result<u64, DecompError> {
        let pl = self.tower().group.p_ell();
        let prev = self.c_value(lambda, k - 1)?;
        if k == pl {
            return Ok(prev);
        }
        let cur = self.c_value(lambda, k)?;
        prev.checked_sub(cur).ok_or_else(|| DecompError::Assertion {
            lambda,
            k,
            what: format!("negative multiplicity c(k-1) - c(k) = {prev} - {cur}"),
        })
    }

    /// Closed-form multiplicity, branch by branch, used as a
    /// cross-check of [`Self::d_value`].
    pub fn d_closed_form(&self, lambda: u64, k: u64) -> Result<i64, DecompError> {
        let t = self.tower();
        let pl = t.group.p_ell();
        let g = t.base_genus as i64;
        let end = self.ctx.case_one_end();
        let r = t.wild_defect();
        let gamma = |k| self.gamma(k, lambda).map(|v| v as i64);
        let big_lambda = |k| self.lambda_indicator(k, lambda).map(|v| v as i64);
        let gamma_tame = self.ctx.gamma_tame(lambda)? as i64;
        if r == 0 && k == pl {
            return Ok(g - 1 + gamma_tame + if lambda == 0 { 1 } else { 0 });
        }
        if k < end {
            return Ok(gamma(k - 1)? - gamma(k)? + big_lambda(k - 1)? - big_lambda(k)?);
        }
        if k == end {
            return Ok(if lambda == 0 {
                gamma(k - 1)? + big_lambda(k - 1)? - 1
            } else {
                gamma(k - 1)? - gamma_tame + big_lambda(k - 1)?
            });
        }
        // r != 0 from here on.
        if k == end + 1 && lambda == 0 {
            return Ok(1);
        }
        if k == pl {
            let p_r = self.p_r() as i64;
            return Ok((self.genera.g_ert as i64 - 1 + p_r * gamma_tame) / p_r);
        }
        Ok(0)
    }

    /// Multiplicities from the c-differences alone, skipping the identity
    /// checks; for diagnostics on inconsistent input.
    pub fn raw_table(&self) -> Result<DecompositionTable, DecompError> {
        let t = self.tower();
        let pl = t.group.p_ell();
        let mut table = DecompositionTable::empty(t.group.n, pl, fingerprint(&t.canonical()), self.genera);
        for lambda in 0..t.group.n {
            let c: Vec<i64> = (0..pl).map(|k| self.c_value(lambda, k).map(|v| v as i64)).collect::<Result<_, _>>()?;
            for k in 1..=pl {
                let d = if k == pl { c[k as usize - 1] } else { c[k as usize - 1] - c[k as usize] };
                table.entries.insert(ModuleLabel { lambda, k }, d.max(0) as u64);
            }
        }
        Ok(table)
    }

    /// Full table, with every identity checked along the way.
    pub fn decompose(&self) -> Result<DecompositionTable, DecompError> {
        let t = self.tower();
        let n = t.group.n;
        let pl = t.group.p_ell();
        let end = self.ctx.case_one_end();
        let mut table = DecompositionTable::empty(n, pl, fingerprint(&t.canonical()), self.genera);
        for lambda in 0..n {
            for k in 0..end {
                let deg = self.deg_e(k, lambda)?;
                let gamma = self.gamma(k, lambda)? as i64;
                if deg != gamma {
                    return Err(DecompError::Assertion {
                        lambda,
                        k,
                        what: format!("deg E = {deg} differs from Gamma = {gamma}"),
                    });
                }
            }
            let c: Vec<u64> = (0..pl).map(|k| self.c_value(lambda, k)).collect::<Result<_, _>>()?;
            for k in 1..pl {
                if c[k as usize] > c[k as usize - 1] {
                    return Err(DecompError::Assertion {
                        lambda,
                        k,
                        what: format!("c increases: c(k-1) = {} < c(k) = {}", c[k as usize - 1], c[k as usize]),
                    });
                }
            }
            for k in 1..=pl {
                let d = self.d_value(lambda, k)?;
                let closed = self.d_closed_form(lambda, k)?;
                if closed != d as i64 {
                    return Err(DecompError::Assertion {
                        lambda,
                        k,
                        what: format!("closed form gives {closed}, c-differences give {d}"),
                    });
                }
                table.entries.insert(ModuleLabel { lambda, k }, d);
            }
        }
        if table.dimension() != self.genera.g_f {
            return Err(DecompError::Assertion {
                lambda: 0,
                k: 0,
                what: format!("sum k d = {} differs from g_F = {}", table.dimension(), self.genera.g_f),
            });
        }
        Ok(table)
    }
}

fn non_negative(v: i64, lambda: u64, k: u64) -> Result<u64, DecompError> {
    u64::try_from(v).map_err(|_| DecompError::Assertion { lambda, k, what: format!("negative c = {v}") })
}

pub fn decompose(tower: &TowerData) -> Result<DecompositionTable, DecompError> {
    Decomposer::new(tower)?.decompose()
}

/// Decomposition of a tower with no wild ramification, from the
/// Chevalley-Weil style count: `d*(lambda,p^ell) = g - 1 + Gamma_lambda`
/// and one extra trivial character.
pub fn d_star_table(tower: &TowerData) -> Result<DecompositionTable, DecompError> {
    if tower.wild_points().next().is_some() {
        return Err(DecompError::Unsupported("d_star requires a tower without wild data".into()));
    }
    let ctx = BoseckContext::new(tower)?;
    let genera = tower.genera()?;
    let n = tower.group.n;
    let pl = tower.group.p_ell();
    let mut table = DecompositionTable::empty(n, pl, fingerprint(&tower.canonical()), genera);
    let g_ft = genera.g_ert as i64;
    for lambda in 0..n {
        // The Kummer layer over F^T has p^ell copies of each branch point.
        let num = g_ft - 1 + pl as i64 * ctx.gamma_tame(lambda)? as i64;
        if num % pl as i64 != 0 {
            return Err(DecompError::Case2NotIntegral(format!("d*({lambda},{pl}) = {num}/{pl}")));
        }
        let mut d = num / pl as i64;
        if lambda == 0 && pl == 1 {
            d += 1;
        }
        let d = non_negative(d, lambda, pl)?;
        table.entries.insert(ModuleLabel { lambda, k: pl }, d);
    }
    if pl > 1 {
        *table.entries.get_mut(&ModuleLabel { lambda: 0, k: 1 }).unwrap() += 1;
    }
    Ok(table)
}

pub fn d_star(tower: &TowerData, lambda: u64, k: u64) -> Result<u64, DecompError> {
    Ok(d_star_table(tower)?.d(lambda, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramdata::{BranchPoint, GroupSpec, WildData};

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

    fn tame3() -> TowerData {
        TowerData::new(GroupSpec::new(2, 0, 3), 0, (0..3).map(|i| BranchPoint::tame(i.to_string(), 1)).collect())
    }

    #[test]
    fn artin_schreier_tables() {
        let dec = Decomposer::new(&as53()).unwrap();
        let c: Vec<u64> = (0..5).map(|k| dec.c_value(0, k).unwrap()).collect();
        assert_eq!(c, vec![2, 1, 1, 0, 0]);
        assert_eq!(dec.deg_e(1, 0).unwrap(), 2);
        let t = dec.decompose().unwrap();
        let nz: Vec<_> = t.nonzero().map(|(l, d)| (l.lambda, l.k, d)).collect();
        assert_eq!(nz, vec![(0, 1, 1), (0, 3, 1)]);
    }

    #[test]
    fn z6_tables() {
        let dec = Decomposer::new(&z6()).unwrap();
        assert_eq!(dec.deg_e(0, 1).unwrap(), 2);
        assert_eq!(dec.c_value(1, 0).unwrap(), 1);
        assert_eq!(dec.c_value(0, 0).unwrap(), 0);
        let t = dec.decompose().unwrap();
        let nz: Vec<_> = t.nonzero().map(|(l, d)| (l.lambda, l.k, d)).collect();
        assert_eq!(nz, vec![(1, 1, 1)]);
    }

    #[test]
    fn lambda_indicator_follows_gamma() {
        let dec = Decomposer::new(&z6()).unwrap();
        // Gamma_{1,0} = 1; Gamma at the Case-1 boundary is outside the domain.
        assert_eq!(dec.lambda_indicator(1, 0).unwrap(), 0);
        assert!(dec.deg_e(2, 0).is_err());
        let t = TowerData::new(GroupSpec::new(5, 1, 1), 0, vec![BranchPoint::wild("0", WildData::artin_schreier(5, 2))]);
        let dec = Decomposer::new(&t).unwrap();
        // Gamma_k = floor((12 - 2k)/5) = 2, 2, 1, 1; genus 2.
        assert_eq!(dec.lambda_indicator(0, 0).unwrap(), 0);
        assert_eq!(dec.lambda_indicator(3, 0).unwrap(), 0);
        let t = dec.decompose().unwrap();
        assert_eq!(t.nonzero().collect::<Vec<_>>(), vec![(ModuleLabel { lambda: 0, k: 2 }, 1)]);
    }

    #[test]
    fn trivial_group_and_empty_table() {
        let t = TowerData::new(GroupSpec::new(3, 0, 1), 2, vec![]);
        let table = decompose(&t).unwrap();
        assert_eq!(table.nonzero().collect::<Vec<_>>(), vec![(ModuleLabel { lambda: 0, k: 1 }, 2)]);
        let t = TowerData::new(GroupSpec::new(3, 0, 1), 0, vec![]);
        assert_eq!(decompose(&t).unwrap().nonzero().count(), 0);
    }

    #[test]
    fn d_star_examples() {
        let t = d_star_table(&tame3()).unwrap();
        assert_eq!((t.d(0, 1), t.d(1, 1), t.d(2, 1)), (0, 1, 0));
        assert_eq!(t, decompose(&tame3()).unwrap());
        // Unramified everywhere: g(F^G) = 2, p^ell = 3, n = 1.
        let mut u = TowerData::new(GroupSpec::new(3, 1, 1), 2, vec![]);
        u.genus_ert = Some(4);
        let t = d_star_table(&u).unwrap();
        assert_eq!((t.d(0, 1), t.d(0, 3)), (1, 1));
        assert!(d_star_table(&z6()).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let t = decompose(&z6()).unwrap();
        let csv = t.to_csv();
        assert!(csv.contains("\n1,1,1\n"));
        assert_eq!(DecompositionTable::from_csv(&csv, 2, 3).unwrap(), t.entries);
    }

    #[test]
    fn free_module_labels() {
        // K[G] = sum_lambda V(lambda, p^ell): dimension n p^ell.
        let (n, pl) = (3, 5);
        let mut t = DecompositionTable::empty(n, pl, 0, Genera { g_base: 0, g_fp: 0, g_f: 0, g_ert: 0 });
        for lambda in 0..n {
            t.entries.insert(ModuleLabel::new(lambda, pl, n, pl).unwrap(), 1);
        }
        assert_eq!(t.dimension(), n * pl);
        assert_eq!(t.c(0, 0), 1);
        assert!(ModuleLabel::new(3, 1, n, pl).is_none());
        assert!(ModuleLabel::new(0, 0, n, pl).is_none());
    }
}
