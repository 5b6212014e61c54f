#![allow(dead_code)]

use holodiff::oracle::Lcg;
use holodiff::ramdata::{delta_from_jumps, BranchPoint, GroupSpec, TowerData, WildData};
use num_integer::Integer;

/// Jumps for `ell` steps, the first `ell - eps` unramified, each ramified
/// jump a multiple of `e` prime to `p` dominating the earlier ones.
pub fn dominant_jumps(rng: &mut Lcg, p: u64, ell: u32, eps: u32, e: u64) -> Vec<u64> {
    let mut jumps = vec![0; (ell - eps) as usize];
    for j in jumps.len()..ell as usize {
        let floor: u64 = (0..j).map(|i| jumps[i] * p.pow((j - i) as u32)).sum::<u64>() * (p - 1);
        let mut phi = (floor / e + 1 + rng.below(5)) * e;
        while phi % p == 0 {
            phi += e;
        }
        jumps.push(phi);
    }
    jumps
}

/// A validated tower with nontrivial group; `ell` up to `max_ell`.
pub fn random_tower(rng: &mut Lcg, max_ell: u32) -> TowerData {
    loop {
        let p = rng.pick(&[2u64, 3, 5]);
        let n = 1 + rng.below(6);
        if n.gcd(&p) != 1 {
            continue;
        }
        let ell = rng.below(max_ell as u64 + 1) as u32;
        let units: Vec<u64> = (1..n.max(2)).filter(|u| u.gcd(&n) == 1).collect();
        let r = if n == 1 { 1 } else { rng.pick(&units) };
        let group = GroupSpec::new(p, ell, n).with_kummer_exponent(r);
        if group.order() == 1 {
            continue;
        }
        let g = rng.below(3);
        let mut points = Vec::new();
        let mut phi_sum = 0;
        for i in 0..rng.below(5) {
            let phi = if n == 1 { 0 } else { rng.below(n) };
            let wild = (ell > 0 && (n == 1 || rng.below(2) == 1)).then(|| {
                let eps = 1 + rng.below(ell as u64) as u32;
                let jumps = dominant_jumps(rng, p, ell, eps, n / phi.gcd(&n));
                let delta = delta_from_jumps(p, &jumps);
                WildData { jumps, epsilon: eps, delta }
            });
            if phi == 0 && wild.is_none() {
                continue;
            }
            phi_sum += phi;
            points.push(BranchPoint { id: format!("P{i}"), tame_phi: phi, wild });
        }
        if phi_sum % n != 0 {
            points.push(BranchPoint::tame("Q", n - phi_sum % n));
        }
        let mut t = TowerData::new(group, g, points);
        let defect = t.wild_defect();
        if defect > 0 && g > 0 {
            t.genus_ert = Some(p.pow(defect) * (g - 1) + 1);
        }
        if t.validate().is_ok() {
            return t;
        }
    }
}
