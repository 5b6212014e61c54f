//! Reproducible random curves.

use num_integer::Integer;

use super::{verify, CurveSpec, FTerm, OracleReport};
use crate::ramdata::GroupSpec;

/// 64-bit linear congruential generator, `s <- a s + c`, output the high
/// 31 bits.
#[derive(Clone, Debug)]
pub struct Lcg(u64);

impl Lcg {
    pub const A: u64 = 6364136223846793005;
    pub const C: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(Self::A).wrapping_add(Self::C);
        self.0 >> 33
    }

    /// Uniform-ish in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn pick<T: Copy>(&mut self, xs: &[T]) -> T {
        xs[self.below(xs.len() as u64) as usize]
    }
}

#[derive(Clone, Debug)]
pub struct SweepParams {
    pub primes: Vec<u64>,
    pub ns: Vec<u64>,
    pub max_values: u64,
    pub max_pole: u64,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams { primes: vec![2, 3, 5], ns: vec![1, 2, 3, 4], max_values: 3, max_pole: 7 }
    }
}

/// A curve whose first x-value is totally ramified. The trivial group is
/// never produced.
pub fn random_curve(rng: &mut Lcg, params: &SweepParams) -> CurveSpec {
    let (p, n) = loop {
        let p = rng.pick(&params.primes);
        let n = rng.pick(&params.ns);
        if n.gcd(&p) == 1 {
            break (p, n);
        }
    };
    let ell = if n == 1 { 1 } else { rng.below(2) as u32 };
    let units: Vec<u64> = (1..n.max(2)).filter(|u| u.gcd(&n) == 1).collect();
    let r = if n == 1 { 1 } else { rng.pick(&units) };
    let group = GroupSpec::new(p, ell, n).with_kummer_exponent(r);
    let values = 1 + rng.below(params.max_values);
    let q = CurveSpec::default_q(&group, values as usize);
    let mut codes: Vec<u64> = Vec::new();
    while codes.len() < values as usize {
        let c = rng.below(q);
        if !codes.contains(&c) {
            codes.push(c);
        }
    }
    let pole = |rng: &mut Lcg| loop {
        let m = 1 + rng.below(params.max_pole);
        if m % p != 0 {
            break m;
        }
    };
    let mut b_roots = Vec::new();
    let mut f_terms = Vec::new();
    for (j, &code) in codes.iter().enumerate() {
        let phi = match (n, j) {
            (1, _) => 0,
            (_, 0) => rng.pick(&units),
            _ => rng.below(n),
        };
        if phi > 0 {
            b_roots.push((code, phi));
        }
        if ell == 1 && (j == 0 || rng.below(2) == 1) {
            f_terms.push(FTerm { alpha: code, m: pole(rng), c: 1 + rng.below(q - 1) });
        }
    }
    CurveSpec { group, q, b_roots, f_terms }
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub spec: CurveSpec,
    pub report: OracleReport,
}

pub fn run_sweep(seed: u64, count: usize, params: &SweepParams) -> Vec<SweepOutcome> {
    let mut rng = Lcg::new(seed);
    (0..count)
        .map(|_| {
            let spec = random_curve(&mut rng, params);
            let report = verify(&spec);
            SweepOutcome { spec, report }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_is_reproducible() {
        let mut a = Lcg::new(42);
        let mut b = Lcg::new(42);
        let xs: Vec<u64> = (0..5).map(|_| a.next_u64()).collect();
        assert_eq!(xs, (0..5).map(|_| b.next_u64()).collect::<Vec<_>>());
        assert_eq!(Lcg::new(0).next_u64(), Lcg::C >> 33);
    }

    #[test]
    fn random_curves_are_valid() {
        let mut rng = Lcg::new(7);
        for _ in 0..200 {
            let spec = random_curve(&mut rng, &SweepParams::default());
            spec.tower().unwrap();
            assert!(spec.group.order() > 1);
        }
    }
}
