//! Explicit cyclic covers of the projective line over a finite field:
//! holomorphic differentials from raw valuations, the generator's matrix,
//! its Jordan data and the gap sequence at a totally ramified place.

mod sweep;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use num_integer::Integer;

use crate::boseck::BoseckContext;
use crate::decomp::{d_star_table, decompose, fingerprint, Decomposer, ModuleLabel};
use crate::exactmath::field::prime_power;
use crate::exactmath::jordan::restrict;
use crate::exactmath::poly::{laurent, Point};
use crate::exactmath::{unipotent_block_sizes, Fe, FiniteField, MathError, Matrix, Poly};
use crate::ramdata::{BranchPoint, GroupSpec, RamError, TowerData, WildData};
use crate::weier::{full_gaps, gap_classes, small_gaps, GapProfile, WeierError};

pub use sweep::{random_curve, run_sweep, Lcg, SweepOutcome, SweepParams};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid curve: {0}")]
    Invalid(String),
    #[error(transparent)]
    Ram(#[from] RamError),
    #[error(transparent)]
    Math(#[from] MathError),
    #[error("basis construction failed: {got} differentials for genus {expected}")]
    BasisCount { got: usize, expected: u64 },
    #[error("basis element {0} is not holomorphic")]
    NotHolomorphic(usize),
    #[error("image of basis element {0} is not in the span")]
    NotInvariant(usize),
    #[error("eigenvalues outside the n-th roots of unity ({found} of {dim} dimensions accounted for)")]
    Eigen { found: usize, dim: usize },
    #[error("Jordan block of size {0} exceeds p^ell")]
    BlockTooLarge(usize),
    #[error("place {0} is not totally ramified")]
    NotTotallyRamified(String),
    #[error("elimination stalled: {0}")]
    Stall(String),
}

/// `c (x - alpha)^{-m}`, field elements by code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FTerm {
    pub alpha: u64,
    pub m: u64,
    pub c: u64,
}

/// `y^n = prod (x - beta)^phi`, `z^p - z = sum c (x - alpha)^{-m}` over `F_q`.
/// The exponent at infinity is whatever makes the divisor of `b` vanish mod n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub group: GroupSpec,
    pub q: u64,
    pub b_roots: Vec<(u64, u64)>,
    pub f_terms: Vec<FTerm>,
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = &self.group;
        write!(out, "p={} ell={} n={} r={} q={} b=[", g.p, g.ell, g.n, g.kummer_exponent, self.q)?;
        for (i, (b, phi)) in self.b_roots.iter().enumerate() {
            write!(out, "{}{b}:{phi}", if i > 0 { "," } else { "" })?;
        }
        write!(out, "] f=[")?;
        for (i, t) in self.f_terms.iter().enumerate() {
            write!(out, "{}{}:{}:{}", if i > 0 { "," } else { "" }, t.alpha, t.m, t.c)?;
        }
        write!(out, "]")
    }
}

pub const INFINITY_LABEL: &str = "inf";

impl CurveSpec {
    /// With `q` chosen by [`CurveSpec::default_q`].
    pub fn new(group: GroupSpec, b_roots: Vec<(u64, u64)>, f_terms: Vec<FTerm>) -> Self {
        let mut spec = CurveSpec { group, q: 0, b_roots, f_terms };
        spec.q = Self::default_q(&spec.group, spec.finite_values().len());
        spec
    }

    /// Smallest power of `p` with `n | q - 1` and `q > values + 2`.
    pub fn default_q(group: &GroupSpec, values: usize) -> u64 {
        let mut q = group.p;
        while (q - 1) % group.n != 0 || q <= values as u64 + 2 {
            q *= group.p;
        }
        q
    }

    /// Finite x-values that are roots of `b` or poles of `f`, ascending.
    pub fn finite_values(&self) -> Vec<u64> {
        let set: BTreeSet<u64> = self.b_roots.iter().map(|b| b.0).chain(self.f_terms.iter().map(|t| t.alpha)).collect();
        set.into_iter().collect()
    }

    pub fn phi_at(&self, code: u64) -> u64 {
        self.b_roots.iter().find(|b| b.0 == code).map(|b| b.1).unwrap_or(0)
    }

    pub fn pole_at(&self, code: u64) -> u64 {
        self.f_terms.iter().find(|t| t.alpha == code).map(|t| t.m).unwrap_or(0)
    }

    pub fn phi_infinity(&self) -> u64 {
        let n = self.group.n;
        let total: u64 = self.b_roots.iter().map(|b| b.1).sum();
        (n - total % n) % n
    }

    pub fn field(&self) -> Result<FiniteField, OracleError> {
        Ok(FiniteField::with_order(self.q)?)
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        let bad = |s: String| Err(OracleError::Invalid(s));
        let g = &self.group;
        if g.ell > 1 {
            return bad(format!("ell = {} is not supported by explicit curves", g.ell));
        }
        match prime_power(self.q) {
            Some((p, _)) if p == g.p => {}
            _ => return bad(format!("q = {} is not a power of p = {}", self.q, g.p)),
        }
        if g.n == 0 || (self.q - 1) % g.n != 0 {
            return bad(format!("n = {} does not divide q - 1 = {}", g.n, self.q - 1));
        }
        let mut seen = BTreeSet::new();
        for &(beta, phi) in &self.b_roots {
            if beta >= self.q || !seen.insert(beta) {
                return bad(format!("root {beta} is repeated or not in F_{}", self.q));
            }
            if phi == 0 || phi >= g.n {
                return bad(format!("exponent {phi} at {beta} is outside [1, n)"));
            }
        }
        if g.ell == 0 && !self.f_terms.is_empty() {
            return bad("f is given but ell = 0".into());
        }
        if g.ell == 1 && self.f_terms.is_empty() {
            return bad("ell = 1 needs at least one pole of f".into());
        }
        let mut seen = BTreeSet::new();
        for t in &self.f_terms {
            if t.alpha >= self.q || !seen.insert(t.alpha) {
                return bad(format!("pole {} is repeated or not in F_{}", t.alpha, self.q));
            }
            if t.c == 0 || t.c >= self.q {
                return bad(format!("coefficient {} at {} must be a nonzero element", t.c, t.alpha));
            }
            let e = tame_index(g.n, self.phi_at(t.alpha));
            if t.m == 0 || (e * t.m) % g.p == 0 {
                return bad(format!(
                    "pole order {} at {} (measured {} in F^P) is not in Artin-Schreier standard form",
                    t.m,
                    t.alpha,
                    e * t.m
                ));
            }
        }
        Ok(())
    }

    /// The ramification data read off the equations.
    pub fn tower(&self) -> Result<TowerData, OracleError> {
        self.validate()?;
        let n = self.group.n;
        let mut points = Vec::new();
        let labelled = self
            .finite_values()
            .into_iter()
            .map(|c| (c.to_string(), self.phi_at(c), self.pole_at(c)))
            .chain(std::iter::once((INFINITY_LABEL.to_string(), self.phi_infinity(), 0)));
        for (id, phi, m) in labelled {
            let wild = (m > 0).then(|| WildData::artin_schreier(self.group.p, tame_index(n, phi) * m));
            match (phi > 0, wild) {
                (true, Some(w)) => points.push(BranchPoint::tame_and_wild(id, phi, w)),
                (true, None) => points.push(BranchPoint::tame(id, phi)),
                (false, Some(w)) => points.push(BranchPoint::wild(id, w)),
                (false, None) => {}
            }
        }
        let tower = TowerData::new(self.group.clone(), 0, points);
        tower.validate()?;
        Ok(tower)
    }
}

fn tame_index(n: u64, phi: u64) -> u64 {
    n / n.gcd(&phi)
}

/// Valuation data at the places of the curve above one x-value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceModel {
    pub label: String,
    pub at: Point,
    pub phi: u64,
    pub pole: u64,
    pub e_tame: u64,
    pub e_wild: u64,
    /// Exponent of the different of the curve over the x-line.
    pub different: i64,
    /// Number of places above the x-value.
    pub places: u64,
    pub v_y: i64,
    pub v_z: i64,
    pub v_dx: i64,
}

impl PlaceModel {
    pub fn e_total(&self) -> u64 {
        self.e_tame * self.e_wild
    }
}

pub fn model_places(spec: &CurveSpec) -> Result<Vec<PlaceModel>, OracleError> {
    spec.validate()?;
    let f = spec.field()?;
    let (p, n) = (spec.group.p, spec.group.n);
    let pl = spec.group.p_ell();
    let deg_b: u64 = spec.b_roots.iter().map(|b| b.1).sum();
    let mut out = Vec::new();
    for code in spec.finite_values().into_iter().map(Some).chain(std::iter::once(None)) {
        let (label, at, phi, pole) = match code {
            Some(c) => (c.to_string(), Point::Finite(f.elem(c)?), spec.phi_at(c), spec.pole_at(c)),
            None => (INFINITY_LABEL.to_string(), Point::Infinity, spec.phi_infinity(), 0),
        };
        let e_tame = tame_index(n, phi);
        let e_wild = if pole > 0 { p } else { 1 };
        let e_total = (e_tame * e_wild) as i64;
        let wild_diff = if pole > 0 { (e_tame * pole + 1) * (p - 1) } else { 0 };
        let different = (e_wild * (e_tame - 1) + wild_diff) as i64;
        // Valuation of b at the x-value, times e_total / n.
        let v_b = if code.is_some() { phi as i64 } else { -(deg_b as i64) };
        let base_dx = if code.is_some() { 0 } else { -2 };
        out.push(PlaceModel {
            label,
            at,
            phi,
            pole,
            e_tame,
            e_wild,
            different,
            places: n * pl / (e_tame * e_wild),
            v_y: e_total * v_b / n as i64,
            v_z: -((e_tame * pole) as i64),
            v_dx: different + e_total * base_dx,
        });
    }
    Ok(out)
}

/// Genus from `sum_Q v_Q(dx) = 2g - 2`.
pub fn genus_from_places(places: &[PlaceModel]) -> Result<u64, OracleError> {
    let total: i64 = places.iter().map(|m| m.places as i64 * m.v_dx).sum();
    if total < -2 || total % 2 != 0 {
        return Err(OracleError::Invalid(format!("sum of v(dx) is {total}")));
    }
    Ok((total / 2 + 1) as u64)
}

/// The differentials `x^i * num0/den * y^{-a} z^k dx`, `0 <= i < dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisGroup {
    pub a: u64,
    pub k: u64,
    /// Coefficient of the divisor `D` at each modeled place.
    pub divisor: Vec<i64>,
    pub num0: Poly,
    pub den: Poly,
    pub dim: usize,
    pub offset: usize,
}

impl BasisGroup {
    /// Valuation of `y^{-a} z^k dx` at a place above `m`.
    pub fn shift(&self, m: &PlaceModel) -> i64 {
        -(self.a as i64) * m.v_y + self.k as i64 * m.v_z + m.v_dx
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffBasis {
    pub places: Vec<PlaceModel>,
    pub groups: Vec<BasisGroup>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub group: usize,
    pub a: u64,
    pub k: u64,
    pub i: usize,
}

impl DiffBasis {
    pub fn dim(&self) -> usize {
        self.groups.iter().map(|g| g.dim).sum()
    }

    pub fn element(&self, idx: usize) -> BasisElement {
        let gi = self.groups.iter().position(|g| idx < g.offset + g.dim).expect("index in range");
        let g = &self.groups[gi];
        BasisElement { group: gi, a: g.a, k: g.k, i: idx - g.offset }
    }

    /// The rational function `h = num/den` of an element.
    pub fn function(&self, idx: usize) -> (Poly, Poly) {
        let e = self.element(idx);
        let g = &self.groups[e.group];
        (g.num0.shift(e.i), g.den.clone())
    }

    /// Valuations at one place above each modeled x-value.
    pub fn valuations(&self, f: &FiniteField, idx: usize) -> Vec<i64> {
        let e = self.element(idx);
        let g = &self.groups[e.group];
        let (num, den) = self.function(idx);
        self.places
            .iter()
            .map(|m| m.e_total() as i64 * rational_order(f, &num, &den, m.at) + g.shift(m))
            .collect()
    }

    pub fn describe(&self, idx: usize) -> String {
        let e = self.element(idx);
        let (num, den) = self.function(idx);
        format!("({num})/({den}) * y^-{} * z^{} dx", e.a, e.k)
    }
}

fn rational_order(f: &FiniteField, num: &Poly, den: &Poly, at: Point) -> i64 {
    match at {
        Point::Finite(a) => num.split_root(f, a).0 as i64 - den.split_root(f, a).0 as i64,
        Point::Infinity => den.degree().unwrap_or(0) as i64 - num.degree().unwrap_or(0) as i64,
    }
}

pub fn build_basis(spec: &CurveSpec) -> Result<DiffBasis, OracleError> {
    let f = spec.field()?;
    let places = model_places(spec)?;
    let genus = genus_from_places(&places)?;
    let (n, pl) = (spec.group.n, spec.group.p_ell());
    let mut groups = Vec::new();
    let mut offset = 0;
    for a in 0..n {
        for k in 0..pl {
            let mut g = BasisGroup { a, k, divisor: Vec::new(), num0: Poly::one(), den: Poly::one(), dim: 0, offset };
            for m in &places {
                let d = g.shift(m).div_euclid(m.e_total() as i64);
                g.divisor.push(d);
                if let Point::Finite(c) = m.at {
                    let lin = Poly::linear(&f, c);
                    if d > 0 {
                        g.den = g.den.mul(&f, &lin.pow(&f, d as u32));
                    } else if d < 0 {
                        g.num0 = g.num0.mul(&f, &lin.pow(&f, (-d) as u32));
                    }
                }
            }
            let deg: i64 = g.divisor.iter().sum();
            g.dim = (deg + 1).max(0) as usize;
            offset += g.dim;
            groups.push(g);
        }
    }
    let basis = DiffBasis { places, groups };
    if basis.dim() as u64 != genus {
        return Err(OracleError::BasisCount { got: basis.dim(), expected: genus });
    }
    for idx in 0..basis.dim() {
        if basis.valuations(&f, idx).iter().any(|&v| v < 0) {
            return Err(OracleError::NotHolomorphic(idx));
        }
    }
    Ok(basis)
}

fn binomial(k: u64, j: u64) -> u64 {
    (0..j).fold(1, |acc, i| acc * (k - i) / (i + 1))
}

pub fn zeta(f: &FiniteField, n: u64) -> Result<Fe, OracleError> {
    Ok(f.root_of_unity(n)?)
}

/// Matrix of `g = sigma tau`, with `sigma z = z + 1` and
/// `tau y = zeta^r y`; column `j` holds the image of basis element `j`.
pub fn action_matrix(spec: &CurveSpec, basis: &DiffBasis) -> Result<Matrix, OracleError> {
    let f = spec.field()?;
    let g = &spec.group;
    let z = zeta(&f, g.n)?;
    let dim = basis.dim();
    let mut m = Matrix::zeros(dim, dim);
    let pl = g.p_ell() as usize;
    for col in 0..dim {
        let e = basis.element(col);
        let src = &basis.groups[e.group];
        let tau = f.pow(z, (g.n - (g.kummer_exponent * e.a) % g.n) % g.n);
        let h_num = src.num0.shift(e.i);
        for j in 0..=e.k {
            let coef = f.from_int((binomial(e.k, j) % g.p) as i64);
            if coef.is_zero() {
                continue;
            }
            let dst = &basis.groups[e.group - (e.k - j) as usize];
            debug_assert!(dst.a == e.a && dst.k == j && e.group % pl == e.k as usize);
            let u = h_num
                .mul(&f, &dst.den)
                .div_exact(&f, &src.den.mul(&f, &dst.num0))
                .map_err(|_| OracleError::NotInvariant(col))?;
            if u.degree().is_some_and(|d| d >= dst.dim) {
                return Err(OracleError::NotInvariant(col));
            }
            let s = f.mul(tau, coef);
            for (i, &c) in u.coeffs().iter().enumerate() {
                let row = dst.offset + i;
                m.set(row, col, f.add(m.get(row, col), f.mul(s, c)));
            }
        }
    }
    Ok(m)
}

/// Multiplicities of `V(lambda, k)` from the Jordan form of `m`.
pub fn jordan_table(f: &FiniteField, m: &Matrix, group: &GroupSpec) -> Result<BTreeMap<ModuleLabel, u64>, OracleError> {
    let z = zeta(f, group.n)?;
    let pl = group.p_ell();
    let mut out: BTreeMap<ModuleLabel, u64> = (0..group.n)
        .flat_map(|lambda| (1..=pl).map(move |k| (ModuleLabel { lambda, k }, 0)))
        .collect();
    let mut found = 0;
    for lambda in 0..group.n {
        for size in unipotent_block_sizes(f, m, f.pow(z, lambda))? {
            if size as u64 > pl {
                return Err(OracleError::BlockTooLarge(size));
            }
            *out.get_mut(&ModuleLabel { lambda, k: size as u64 }).unwrap() += 1;
            found += size;
        }
    }
    if found != m.rows() {
        return Err(OracleError::Eigen { found, dim: m.rows() });
    }
    Ok(out)
}

/// Order of the matrix predicted by a Jordan table.
fn predicted_order(table: &BTreeMap<ModuleLabel, u64>, group: &GroupSpec) -> u64 {
    let n = group.n;
    table.iter().filter(|(_, &d)| d > 0).fold(1, |acc, (l, _)| {
        let tame = n / n.gcd(&l.lambda);
        let mut wild = 1;
        while wild < l.k {
            wild *= group.p;
        }
        acc.lcm(&(tame * wild))
    })
}

fn prime_factors(mut x: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            out.push(d);
            while x % d == 0 {
                x /= d;
            }
        }
        d += 1;
    }
    if x > 1 {
        out.push(x);
    }
    out
}

/// `M^{|G|} = I`, and `M^{|G|/l} = I` exactly for the primes `l` allowed
/// by the Jordan table. Returns whether the action is faithful.
pub fn order_check(
    f: &FiniteField,
    m: &Matrix,
    group: &GroupSpec,
    table: &BTreeMap<ModuleLabel, u64>,
) -> Result<(bool, bool), OracleError> {
    let order = group.order();
    if !m.pow(f, order)?.is_identity() {
        return Ok((false, false));
    }
    let predicted = predicted_order(table, group);
    let mut consistent = true;
    for l in prime_factors(order) {
        let is_id = m.pow(f, order / l)?.is_identity();
        consistent &= is_id == ((order / l) % predicted == 0);
    }
    Ok((consistent, predicted == order))
}

/// On each generalized eigenspace `W`, `M^{p^ell}` is the scalar
/// `zeta^{lambda p^ell}` and `M^n` has the same block partition as `M`.
pub fn restriction_check(f: &FiniteField, m: &Matrix, group: &GroupSpec) -> Result<Result<(), String>, OracleError> {
    let z = zeta(f, group.n)?;
    let pl = group.p_ell();
    for lambda in 0..group.n {
        let c = f.pow(z, lambda);
        let space = m.sub_scalar(f, c)?.pow(f, pl)?.nullspace(f);
        if space.is_empty() {
            continue;
        }
        let r = restrict(f, m, &space)?;
        let scalar = Matrix::scalar(space.len(), f.pow(c, pl));
        if r.pow(f, pl)? != scalar {
            return Ok(Err(format!("M^p^ell is not scalar on the lambda={lambda} eigenspace")));
        }
        let rn = r.pow(f, group.n)?;
        let a = unipotent_block_sizes(f, &r, c)?;
        let b = unipotent_block_sizes(f, &rn, Fe::ONE)?;
        if a != b {
            return Ok(Err(format!("lambda={lambda}: blocks of M are {a:?}, of M^n {b:?}")));
        }
    }
    Ok(Ok(()))
}

/// Gaps at the place above `basis.places[place]`, which must be totally
/// ramified: `v + 1` over the valuations realized after elimination.
pub fn gaps_oracle(spec: &CurveSpec, basis: &DiffBasis, place: usize) -> Result<Vec<u64>, OracleError> {
    let f = spec.field()?;
    let m = &basis.places[place];
    if m.e_total() != spec.group.order() {
        return Err(OracleError::NotTotallyRamified(m.label.clone()));
    }
    let e = m.e_total() as i64;
    let mut gaps = Vec::new();
    for g in basis.groups.iter().filter(|g| g.dim > 0) {
        let lo = -g.divisor[place];
        let hi = lo + g.dim as i64 - 1;
        let mut rows = Vec::with_capacity(g.dim);
        for i in 0..g.dim {
            let s = laurent(&f, &g.num0.shift(i), &g.den, m.at, hi + 1)?;
            if s.order().is_some_and(|o| o < lo) {
                return Err(OracleError::Stall(format!("order below {lo} at {}", m.label)));
            }
            rows.push((lo..=hi).map(|x| s.coeff(x)).collect());
        }
        let (_, pivots) = Matrix::from_rows(rows)?.rref(&f);
        if pivots.len() != g.dim {
            return Err(OracleError::Stall(format!("group (a={}, k={}) is dependent", g.a, g.k)));
        }
        for col in pivots {
            let v = e * (lo + col as i64) + g.shift(m);
            gaps.push(u64::try_from(v + 1).map_err(|_| OracleError::NotHolomorphic(g.offset))?);
        }
    }
    gaps.sort_unstable();
    if gaps.windows(2).any(|w| w[0] == w[1]) {
        return Err(OracleError::Stall("repeated valuation".into()));
    }
    Ok(gaps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub spec: String,
    pub spec_hash: u64,
    pub genus: Option<u64>,
    pub d_oracle: Option<BTreeMap<ModuleLabel, u64>>,
    pub gap_place: Option<String>,
    pub gaps: Option<Vec<u64>>,
    pub faithful: Option<bool>,
    pub checks: Vec<Check>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    fn push(&mut self, name: &'static str, status: Status, detail: impl Into<String>) {
        self.checks.push(Check { name, status, detail: detail.into() });
    }

    fn compare(&mut self, name: &'static str, ok: bool, detail: impl Into<String>) {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, detail);
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "curve {} [{:016x}]", self.spec, self.spec_hash);
        if let Some(g) = self.genus {
            let _ = writeln!(s, "genus {g}");
        }
        if let Some(d) = &self.d_oracle {
            let blocks: Vec<String> = d.iter().filter(|(_, &c)| c > 0).map(|(l, c)| format!("{l}^{c}")).collect();
            let _ = writeln!(s, "oracle {}", if blocks.is_empty() { "0".into() } else { blocks.join(" + ") });
        }
        if let (Some(place), Some(gaps)) = (&self.gap_place, &self.gaps) {
            let list: Vec<String> = gaps.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "gaps at {place}: {}", list.join(","));
        }
        for c in &self.checks {
            let _ = writeln!(s, "{} {}: {}", c.status, c.name, c.detail);
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("spec_hash,check,status,detail\n");
        for c in &self.checks {
            let _ = writeln!(s, "{:016x},{},{},\"{}\"", self.spec_hash, c.name, c.status, c.detail.replace('"', "'"));
        }
        s
    }
}

fn table_diff(oracle: &BTreeMap<ModuleLabel, u64>, formula: &BTreeMap<ModuleLabel, u64>) -> Vec<String> {
    let labels: BTreeSet<&ModuleLabel> = oracle.keys().chain(formula.keys()).collect();
    labels
        .into_iter()
        .filter_map(|l| {
            let (a, b) = (oracle.get(l).copied().unwrap_or(0), formula.get(l).copied().unwrap_or(0));
            (a != b).then(|| format!("d({},{}): oracle {a}, formula {b}", l.lambda, l.k))
        })
        .collect()
}

pub fn verify(spec: &CurveSpec) -> OracleReport {
    verify_with(spec, None)
}

/// Compares the curve against the closed-form engines run on `formula`, or
/// on the tower read off the curve when `formula` is `None`.
pub fn verify_with(spec: &CurveSpec, formula: Option<&TowerData>) -> OracleReport {
    let text = spec.to_string();
    let mut rep = OracleReport {
        spec_hash: fingerprint(&text),
        spec: text,
        genus: None,
        d_oracle: None,
        gap_place: None,
        gaps: None,
        faithful: None,
        checks: Vec::new(),
    };
    let derived = match spec.tower() {
        Ok(t) => t,
        Err(e) => {
            rep.push("curve", Status::Fail, e.to_string());
            return rep;
        }
    };
    let tower = formula.cloned().unwrap_or_else(|| derived.clone());
    if formula.is_some() {
        let same = tower.canonical() == derived.canonical();
        rep.compare("tower", same, if same { "input matches the curve".into() } else { format!("curve gives {}", derived.canonical()) });
    }
    let f = match spec.field() {
        Ok(f) => f,
        Err(e) => {
            rep.push("curve", Status::Fail, e.to_string());
            return rep;
        }
    };
    let g_rh = tower.genus_f();
    let places = model_places(spec).and_then(|p| genus_from_places(&p).map(|g| (p, g)));
    match (&g_rh, &places) {
        (Ok(a), Ok((_, b))) => rep.compare("genus", a == b, format!("Riemann-Hurwitz {a}, sum of v(dx) gives {b}")),
        (Err(e), _) => rep.push("genus", Status::Fail, e.to_string()),
        (_, Err(e)) => rep.push("genus", Status::Fail, e.to_string()),
    }
    let basis = match build_basis(spec) {
        Ok(b) => b,
        Err(e) => {
            rep.push("basis", Status::Fail, e.to_string());
            return rep;
        }
    };
    rep.genus = Some(basis.dim() as u64);
    match &g_rh {
        Ok(g) => rep.compare("basis", *g == basis.dim() as u64, format!("{} holomorphic differentials, g_F = {g}", basis.dim())),
        Err(e) => rep.push("basis", Status::Fail, e.to_string()),
    }
    let m = match action_matrix(spec, &basis) {
        Ok(m) => m,
        Err(e) => {
            rep.push("action", Status::Fail, e.to_string());
            return rep;
        }
    };
    let d_oracle = match jordan_table(&f, &m, &spec.group) {
        Ok(d) => d,
        Err(e) => {
            rep.push("jordan", Status::Fail, e.to_string());
            return rep;
        }
    };
    match order_check(&f, &m, &spec.group, &d_oracle) {
        Ok((ok, faithful)) => {
            rep.faithful = Some(faithful);
            rep.compare("order", ok, format!("M^{} = I, faithful: {faithful}", spec.group.order()));
        }
        Err(e) => rep.push("order", Status::Fail, e.to_string()),
    }
    match restriction_check(&f, &m, &spec.group) {
        Ok(Ok(())) => rep.push("restriction", Status::Pass, "scalar p^ell-th power and matching M^n blocks"),
        Ok(Err(why)) => rep.push("restriction", Status::Fail, why),
        Err(e) => rep.push("restriction", Status::Fail, e.to_string()),
    }
    let table = decompose(&tower);
    match &table {
        Ok(t) => {
            let diff = table_diff(&d_oracle, &t.entries);
            let detail = if diff.is_empty() { "all (lambda,k) agree".to_string() } else { diff.join("; ") };
            rep.compare("decomposition", diff.is_empty(), detail);
        }
        Err(e) => {
            let mut detail = e.to_string();
            if let Ok(raw) = Decomposer::new(&tower).and_then(|d| d.raw_table()) {
                let diff = table_diff(&d_oracle, &raw.entries);
                if !diff.is_empty() {
                    detail = format!("{detail}; {}", diff.join("; "));
                }
            }
            rep.push("decomposition", Status::Fail, detail);
        }
    }
    if tower.wild_points().next().is_none() {
        match d_star_table(&tower) {
            Ok(t) => {
                let diff = table_diff(&d_oracle, &t.entries);
                rep.compare("d_star", diff.is_empty(), if diff.is_empty() { "all (lambda,k) agree".into() } else { diff.join("; ") });
            }
            Err(e) => rep.push("d_star", Status::Fail, e.to_string()),
        }
    }
    rep.d_oracle = Some(d_oracle);

    let Some(place) = basis.places.iter().position(|p| p.e_total() == spec.group.order() && spec.group.order() > 1)
    else {
        rep.push("gap_classes", Status::Skip, "no totally ramified place");
        return rep;
    };
    let label = basis.places[place].label.clone();
    rep.gap_place = Some(label.clone());
    let gaps = match gaps_oracle(spec, &basis, place) {
        Ok(g) => g,
        Err(e) => {
            rep.push("gaps", Status::Fail, e.to_string());
            return rep;
        }
    };
    rep.compare("gaps", gaps.len() == basis.dim(), format!("{} gaps at {label}", gaps.len()));
    let (n, pl) = (spec.group.n, spec.group.p_ell());
    let ctx = match BoseckContext::new(&tower) {
        Ok(c) => c,
        Err(e) => {
            rep.push("gap_classes", Status::Fail, e.to_string());
            rep.gaps = Some(gaps);
            return rep;
        }
    };
    match table.as_ref().map_err(|e| e.to_string()).and_then(|t| gap_classes(&ctx, t, &label).map_err(|e| e.to_string())) {
        Ok(profile) => {
            let seen = GapProfile::classes_of(&gaps, n, pl);
            let bad: Vec<String> = seen
                .iter()
                .filter(|(k, &v)| profile.classes.get(k).copied().unwrap_or(0) != v)
                .map(|(k, v)| format!("class {k:?}: oracle {v}, formula {}", profile.classes.get(k).copied().unwrap_or(0)))
                .collect();
            rep.compare("gap_classes", bad.is_empty(), if bad.is_empty() { "all classes agree".into() } else { bad.join("; ") });
        }
        Err(e) => rep.push("gap_classes", Status::Fail, e),
    }
    match full_gaps(&ctx, &label) {
        Ok(list) => rep.compare("full_gaps", list == gaps, format!("formula {list:?}")),
        Err(e @ (WeierError::FullUnavailable(_) | WeierError::NotTotallyRamified { .. })) => {
            rep.push("full_gaps", Status::Skip, e.to_string())
        }
        Err(e) => rep.push("full_gaps", Status::Fail, e.to_string()),
    }
    if let Ok(small) = small_gaps(&ctx, &label) {
        let below: BTreeSet<u64> = gaps.iter().copied().filter(|&g| g < pl).collect();
        rep.compare("small_gaps", below == small, format!("formula {small:?}"));
    }
    rep.gaps = Some(gaps);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn as53() -> CurveSpec {
        CurveSpec::new(GroupSpec::new(5, 1, 1), vec![], vec![FTerm { alpha: 0, m: 3, c: 1 }])
    }

    fn z6() -> CurveSpec {
        CurveSpec::new(GroupSpec::new(3, 1, 2), vec![(0, 1)], vec![FTerm { alpha: 0, m: 1, c: 1 }])
    }

    fn tame3() -> CurveSpec {
        CurveSpec::new(GroupSpec::new(2, 0, 3), vec![(0, 1), (1, 1)], vec![])
    }

    #[test]
    fn default_field_sizes() {
        assert_eq!(as53().q, 5);
        assert_eq!(z6().q, 9);
        assert_eq!(tame3().q, 16);
    }

    #[test]
    fn place_models() {
        let p = model_places(&as53()).unwrap();
        assert_eq!((p[0].e_total(), p[0].different, p[0].v_z, p[0].v_dx), (5, 16, -3, 16));
        assert_eq!((p[1].e_total(), p[1].v_dx), (1, -2));
        assert_eq!(genus_from_places(&p).unwrap(), 4);
        let p = model_places(&z6()).unwrap();
        assert_eq!((p[0].e_total(), p[0].v_y, p[0].v_z, p[0].v_dx), (6, 3, -2, 9));
        let p = model_places(&CurveSpec::new(GroupSpec::new(3, 0, 2), vec![(0, 1)], vec![])).unwrap();
        assert_eq!((p[0].e_tame, p[0].v_y, p[1].e_tame, p[1].label.as_str()), (2, 1, 2, "inf"));
    }

    #[test]
    fn artin_schreier_basis_and_matrix() {
        let spec = as53();
        let f = spec.field().unwrap();
        let basis = build_basis(&spec).unwrap();
        let dims: Vec<usize> = basis.groups.iter().map(|g| g.dim).collect();
        assert_eq!(dims, vec![2, 1, 1, 0, 0]);
        let m = action_matrix(&spec, &basis).unwrap();
        assert_eq!(m.sub_scalar(&f, Fe::ONE).unwrap().rank(&f), 2);
        assert_eq!(unipotent_block_sizes(&f, &m, Fe::ONE).unwrap(), vec![1, 3]);
        assert_eq!(gaps_oracle(&spec, &basis, 0).unwrap(), vec![1, 2, 4, 7]);
    }

    #[test]
    fn z6_basis() {
        let spec = z6();
        let f = spec.field().unwrap();
        let basis = build_basis(&spec).unwrap();
        assert_eq!(basis.dim(), 1);
        let (num, den) = basis.function(0);
        assert_eq!(basis.element(0).a, 1);
        assert_eq!(num.degree(), Some(0));
        assert_eq!(den, Poly::linear(&f, Fe::ZERO));
        let m = action_matrix(&spec, &basis).unwrap();
        assert_eq!(m.get(0, 0), f.from_int(-1));
    }

    #[test]
    fn reports_pass() {
        for spec in [as53(), z6(), tame3()] {
            let rep = verify(&spec);
            assert!(rep.passed(), "{}", rep.to_text());
        }
        let rep = verify(&tame3());
        assert!(rep.checks.iter().any(|c| c.name == "d_star" && c.status == Status::Pass));
    }

    #[test]
    fn corrupted_delta_fails() {
        let spec = as53();
        let mut t = spec.tower().unwrap();
        t.branch_points[0].wild.as_mut().unwrap().delta = 20;
        let rep = verify_with(&spec, Some(&t));
        assert!(!rep.passed());
        assert!(rep.failures().any(|c| c.name == "tower"));
        let dec = rep.failures().find(|c| c.name == "decomposition").unwrap();
        assert!(dec.detail.contains("d(0,"), "{}", dec.detail);
    }

    #[test]
    fn invalid_curves() {
        let bad = |s: CurveSpec| assert!(matches!(s.validate(), Err(OracleError::Invalid(_))), "{s}");
        bad(CurveSpec::new(GroupSpec::new(5, 1, 1), vec![], vec![FTerm { alpha: 0, m: 5, c: 1 }]));
        bad(CurveSpec::new(GroupSpec::new(5, 1, 1), vec![], vec![]));
        bad(CurveSpec::new(GroupSpec::new(3, 1, 2), vec![(0, 2)], vec![FTerm { alpha: 0, m: 1, c: 1 }]));
        let mut s = as53();
        s.q = 7;
        bad(s);
        bad(CurveSpec::new(GroupSpec::new(3, 1, 2), vec![(0, 1)], vec![FTerm { alpha: 0, m: 3, c: 1 }]));
    }
}
