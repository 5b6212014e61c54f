//! Weierstrass gaps at a totally ramified point and numerical semigroups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_integer::Integer;

use crate::boseck::{BoseckContext, BoseckError};
use crate::decomp::DecompositionTable;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeierError {
    #[error(transparent)]
    Boseck(#[from] BoseckError),
    #[error("place {place} is not totally ramified (e = {e}, need {required})")]
    NotTotallyRamified { place: String, e: u64, required: u64 },
    #[error("full enumeration unavailable (genus of F^P is {0}); use gap_classes")]
    FullUnavailable(u64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("two labels map to class ({i0},{i1}) with counts {a} and {b}")]
    ClassCollision { i0: u64, i1: u64, a: u64, b: u64 },
    #[error("produced {got} gaps, expected g_F = {expected}")]
    Count { got: usize, expected: u64 },
    #[error("generators have gcd {0}; the gap set is infinite")]
    InfiniteGaps(u64),
    #[error("bound {bound} is below the safe bound {needed}")]
    BoundTooSmall { bound: u64, needed: u64 },
    #[error("{0} is not an element of the semigroup")]
    NotAnElement(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapProfile {
    pub place: String,
    /// `n p^ell`.
    pub d: u64,
    pub n: u64,
    pub p_ell: u64,
    /// `(i0, i1) -> number of gaps congruent to i0 mod n and i1 mod p^ell`.
    pub classes: BTreeMap<(u64, u64), u64>,
    pub small_gaps: Option<BTreeSet<u64>>,
    pub full_gaps: Option<Vec<u64>>,
}

impl GapProfile {
    pub fn total(&self) -> u64 {
        self.classes.values().sum()
    }

    /// `mu_i`: gaps congruent to `i` mod `n`.
    pub fn tame_counts(&self) -> Vec<u64> {
        let mut mu = vec![0; self.n as usize];
        for (&(i0, _), &c) in &self.classes {
            mu[i0 as usize] += c;
        }
        mu
    }

    /// Class counts of an explicit gap list, in the same layout.
    pub fn classes_of(gaps: &[u64], n: u64, p_ell: u64) -> BTreeMap<(u64, u64), u64> {
        let mut out: BTreeMap<(u64, u64), u64> =
            (0..n).flat_map(|a| (0..p_ell).map(move |b| ((a, b), 0))).collect();
        for &g in gaps {
            *out.get_mut(&(g % n, g % p_ell)).unwrap() += 1;
        }
        out
    }

    /// Rows `i0`, columns `i1`.
    pub fn grid(&self) -> String {
        let mut s = String::from("i0\\i1");
        for b in 0..self.p_ell {
            let _ = write!(s, " {b:>3}");
        }
        s.push('\n');
        for a in 0..self.n {
            let _ = write!(s, "{a:>5}");
            for b in 0..self.p_ell {
                let _ = write!(s, " {:>3}", self.classes.get(&(a, b)).copied().unwrap_or(0));
            }
            s.push('\n');
        }
        s
    }
}

fn point(ctx: &BoseckContext, id: &str) -> Result<usize, WeierError> {
    Ok(ctx.point_index(id)?)
}

fn require_wild_total(ctx: &BoseckContext, idx: usize) -> Result<(), WeierError> {
    let t = ctx.tower();
    let b = &t.branch_points[idx];
    let pl = t.group.p_ell();
    let e = b.wild.as_ref().map(|w| w.e(t.group.p)).unwrap_or(1);
    if e != pl || pl == 1 {
        return Err(WeierError::NotTotallyRamified { place: b.id.clone(), e, required: pl });
    }
    Ok(())
}

/// Totally ramified for the whole group; without wild ramification only
/// the tame index matters.
fn require_total(ctx: &BoseckContext, idx: usize) -> Result<(), WeierError> {
    let t = ctx.tower();
    if t.group.p_ell() > 1 {
        require_wild_total(ctx, idx)?;
    } else if t.group.n == 1 {
        return Err(WeierError::NotTotallyRamified { place: t.branch_points[idx].id.clone(), e: 1, required: 1 });
    }
    let b = &t.branch_points[idx];
    let n = t.group.n;
    if b.e_prime(n) != n {
        return Err(WeierError::NotTotallyRamified {
            place: b.id.clone(),
            e: b.e_prime(n) * t.group.p_ell(),
            required: n * t.group.p_ell(),
        });
    }
    Ok(())
}

/// `(delta + v(w_k)) mod p^ell`.
pub fn r_remainder(ctx: &BoseckContext, place: &str, k: u64) -> Result<u64, WeierError> {
    let idx = point(ctx, place)?;
    require_wild_total(ctx, idx)?;
    r_at(ctx, idx, k)
}

fn r_at(ctx: &BoseckContext, idx: usize, k: u64) -> Result<u64, WeierError> {
    let t = ctx.tower();
    let delta = t.branch_points[idx].wild.as_ref().unwrap().delta as i64;
    let v = ctx.w_valuation(idx, k)?;
    Ok((delta + v).mod_floor(&(t.group.p_ell() as i64)) as u64)
}

pub fn r_table(ctx: &BoseckContext, place: &str) -> Result<Vec<u64>, WeierError> {
    let idx = point(ctx, place)?;
    require_wild_total(ctx, idx)?;
    (0..ctx.tower().group.p_ell()).map(|k| r_at(ctx, idx, k)).collect()
}

/// The `k` with `r_{mu,k} = a`.
pub fn psi(ctx: &BoseckContext, place: &str, a: u64) -> Result<u64, WeierError> {
    let r = r_table(ctx, place)?;
    r.iter()
        .position(|&x| x == a)
        .map(|k| k as u64)
        .ok_or_else(|| WeierError::Precondition(format!("{a} is not a remainder in [0, {})", r.len())))
}

/// Gap counts by residue class, read off the filtration dimensions.
pub fn gap_classes(ctx: &BoseckContext, table: &DecompositionTable, place: &str) -> Result<GapProfile, WeierError> {
    let idx = point(ctx, place)?;
    require_total(ctx, idx)?;
    let t = ctx.tower();
    let (n, pl) = (t.group.n, t.group.p_ell());
    let phi = t.branch_points[idx].big_phi(n);
    let mut classes: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for lambda in 0..n {
        let i0 = (ctx.alpha(lambda) * pl % n * phi) % n;
        for k in 0..pl {
            let i1 = if pl == 1 { 0 } else { (r_at(ctx, idx, k)? + 1) % pl };
            let c = table.c(lambda, k);
            if let Some(&old) = classes.get(&(i0, i1)) {
                return Err(WeierError::ClassCollision { i0, i1, a: old, b: c });
            }
            classes.insert((i0, i1), c);
        }
    }
    let profile = GapProfile {
        place: place.to_string(),
        d: n * pl,
        n,
        p_ell: pl,
        classes,
        small_gaps: small_gaps(ctx, place).ok(),
        full_gaps: full_gaps(ctx, place).ok(),
    };
    if profile.total() != table.genera.g_f {
        return Err(WeierError::Count { got: profile.total() as usize, expected: table.genera.g_f });
    }
    Ok(profile)
}

/// All gaps, when the tame quotient `F^P` is rational.
pub fn full_gaps(ctx: &BoseckContext, place: &str) -> Result<Vec<u64>, WeierError> {
    let idx = point(ctx, place)?;
    require_total(ctx, idx)?;
    let t = ctx.tower();
    let g_fp = t.genus_fp().map_err(BoseckError::from)?;
    if g_fp != 0 {
        return Err(WeierError::FullUnavailable(g_fp));
    }
    let pl = t.group.p_ell();
    let mut gaps = Vec::new();
    for k in 0..pl {
        let s = ctx.nu_total(k)?;
        if s < 2 {
            continue;
        }
        let r = r_at(ctx, idx, k)?;
        gaps.extend((0..s.saturating_sub(1)).map(|xi| r + 1 + pl * xi));
    }
    gaps.sort_unstable();
    let g_f = t.genus_f().map_err(BoseckError::from)?;
    if gaps.len() as u64 != g_f {
        return Err(WeierError::Count { got: gaps.len(), expected: g_f });
    }
    Ok(gaps)
}

/// Gaps below `p^ell` for `n = 1` over a rational base.
pub fn small_gaps(ctx: &BoseckContext, place: &str) -> Result<BTreeSet<u64>, WeierError> {
    let idx = point(ctx, place)?;
    require_wild_total(ctx, idx)?;
    let t = ctx.tower();
    if t.group.n != 1 || t.base_genus != 0 {
        return Err(WeierError::Precondition("small gaps need n = 1 and a rational base".into()));
    }
    let pl = t.group.p_ell();
    let mut out = BTreeSet::new();
    for k in 0..pl.saturating_sub(1) {
        if ctx.gamma(k, 0)? >= 2 {
            let g = r_at(ctx, idx, k)? + 1;
            if g < pl {
                out.insert(g);
            }
        }
    }
    Ok(out)
}

/// Gaps of the numerical semigroup generated by `generators`, by sieve up to
/// `bound`.
pub fn semigroup_gaps(generators: &[u64], bound: u64) -> Result<Vec<u64>, WeierError> {
    let gens: Vec<u64> = generators.iter().copied().filter(|&g| g > 0).collect();
    let g = gens.iter().fold(0u64, |a, &b| a.gcd(&b));
    if g != 1 {
        return Err(WeierError::InfiniteGaps(g));
    }
    let mut sorted = gens.clone();
    sorted.sort_unstable();
    let needed = if sorted.len() == 1 { 1 } else { sorted[0] * sorted[1] };
    if bound < needed {
        return Err(WeierError::BoundTooSmall { bound, needed });
    }
    let mut reach = vec![false; bound as usize + 1];
    reach[0] = true;
    for x in 1..=bound as usize {
        reach[x] = gens.iter().any(|&g| g as usize <= x && reach[x - g as usize]);
    }
    Ok((1..=bound).filter(|&x| !reach[x as usize]).collect())
}

/// Largest gap; `None` when there are no gaps.
pub fn frobenius(gaps: &[u64]) -> Option<u64> {
    gaps.iter().copied().max()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descriptor {
    pub i: u64,
    pub b: u64,
    pub nu: u64,
}

/// `(i, b_i, nu_i)` for `1 <= i < d`, where `d` is an element of the
/// semigroup whose gap set is `gaps`.
pub fn descriptors(gaps: &[u64], d: u64) -> Result<Vec<Descriptor>, WeierError> {
    let gap_set: BTreeSet<u64> = gaps.iter().copied().collect();
    if d == 0 || gap_set.contains(&d) {
        return Err(WeierError::NotAnElement(d));
    }
    let mut out = Vec::new();
    for i in 1..d {
        let b = (0..).map(|j| i + j * d).find(|x| !gap_set.contains(x)).unwrap();
        let nu = (b - i) / d;
        let counted = gap_set.iter().filter(|&&g| g % d == i).count() as u64;
        if counted != nu {
            return Err(WeierError::Precondition(format!("nu_{i} = {nu} but {counted} gaps are {i} mod {d}")));
        }
        out.push(Descriptor { i, b, nu });
    }
    Ok(out)
}

pub fn gaps_csv(gaps: &[u64]) -> String {
    let mut s = String::from("gap\n");
    for g in gaps {
        let _ = writeln!(s, "{g}");
    }
    s
}

pub fn descriptors_csv(ds: &[Descriptor]) -> String {
    let mut s = String::from("i,b_i,nu_i\n");
    for d in ds {
        let _ = writeln!(s, "{},{},{}", d.i, d.b, d.nu);
    }
    s
}
