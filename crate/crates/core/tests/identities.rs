mod common;

use holodiff::boseck::BoseckContext;
use holodiff::decomp::Decomposer;
use holodiff::oracle::{build_basis, gaps_oracle, random_curve, Lcg, SweepParams};
use holodiff::ramdata::TowerData;
use holodiff::weier::{full_gaps, gap_classes, r_table, small_gaps, GapProfile, WeierError};
use proptest::prelude::*;

fn tower(seed: u64) -> TowerData {
    common::random_tower(&mut Lcg::new(seed), 3)
}

fn tower_where(seed: u64, keep: impl Fn(&TowerData) -> bool) -> TowerData {
    let mut rng = Lcg::new(seed);
    loop {
        let t = common::random_tower(&mut rng, 3);
        if keep(&t) {
            return t;
        }
    }
}

fn total_places(ctx: &BoseckContext) -> Vec<String> {
    let t = ctx.tower();
    t.branch_points
        .iter()
        .filter(|b| b.e_prime(t.group.n) * b.wild.as_ref().map_or(1, |w| w.e(t.group.p)) == t.group.order())
        .map(|b| b.id.clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dimension_and_monotone_c(seed in any::<u64>()) {
        let t = tower(seed);
        prop_assert!(!t.warnings().iter().any(|w| w.contains("jumps")), "{:?}", t.warnings());
        let dec = Decomposer::new(&t).unwrap();
        let table = dec.decompose().unwrap();
        prop_assert_eq!(table.dimension(), t.genus_f().unwrap());
        for lambda in 0..t.group.n {
            for k in 1..=t.group.p_ell() {
                prop_assert!(table.c(lambda, k) <= table.c(lambda, k - 1));
            }
        }
    }

    #[test]
    fn closed_form_matches_differences(seed in any::<u64>()) {
        let t = tower(seed);
        let dec = Decomposer::new(&t).unwrap();
        for lambda in 0..t.group.n {
            for k in 1..=t.group.p_ell() {
                let next = if k == t.group.p_ell() { 0 } else { dec.c_value(lambda, k).unwrap() };
                let diff = dec.c_value(lambda, k - 1).unwrap() as i64 - next as i64;
                prop_assert_eq!(dec.d_closed_form(lambda, k).unwrap(), diff, "({}, {}) in {}", lambda, k, t.canonical());
            }
        }
    }

    #[test]
    fn gamma_is_nu_sum_for_p_groups(seed in any::<u64>()) {
        let t = tower_where(seed, |t| t.group.n == 1);
        let ctx = BoseckContext::new(&t).unwrap();
        for k in 0..ctx.case_one_end() {
            let sum: u64 = (0..t.branch_points.len()).map(|i| ctx.nu(i, k).unwrap()).sum();
            prop_assert_eq!(ctx.gamma(k, 0).unwrap(), sum);
        }
    }

    #[test]
    fn remainders_distinct_at_total_points(seed in any::<u64>()) {
        let t = tower_where(seed, |t| t.group.ell > 0);
        let ctx = BoseckContext::new(&t).unwrap();
        for b in &t.branch_points {
            match b.wild.as_ref() {
                Some(w) if w.epsilon == t.group.ell => {
                    let mut r = r_table(&ctx, &b.id).unwrap();
                    r.sort_unstable();
                    r.dedup();
                    prop_assert_eq!(r.len() as u64, t.group.p_ell());
                }
                _ => {}
            }
        }
    }

    #[test]
    fn wild_defect_zero_iff_some_point_total(seed in any::<u64>()) {
        let t = tower_where(seed, |t| t.group.ell > 0);
        let total = t.wild_points().any(|(_, w)| w.epsilon == t.group.ell);
        prop_assert_eq!(t.wild_defect() == 0, total);
        let genera = t.genera().unwrap();
        prop_assert_eq!(genera.g_f, t.genus_f().unwrap());
    }

    #[test]
    fn gap_counts(seed in any::<u64>()) {
        let t = tower(seed);
        let dec = Decomposer::new(&t).unwrap();
        let table = dec.decompose().unwrap();
        let ctx = dec.context();
        let g_f = t.genus_f().unwrap();
        for place in total_places(ctx) {
            let profile = gap_classes(ctx, &table, &place).unwrap();
            prop_assert_eq!(profile.total(), g_f);
            match full_gaps(ctx, &place) {
                Ok(gaps) => {
                    prop_assert_eq!(gaps.len() as u64, g_f);
                    prop_assert_eq!(&GapProfile::classes_of(&gaps, t.group.n, t.group.p_ell()), &profile.classes);
                    if let Ok(small) = small_gaps(ctx, &place) {
                        let below: Vec<u64> = gaps.iter().copied().filter(|&g| g < t.group.p_ell()).collect();
                        prop_assert_eq!(small.into_iter().collect::<Vec<_>>(), below);
                    }
                }
                Err(WeierError::FullUnavailable(g)) => prop_assert!(g > 0),
                Err(err) => prop_assert!(false, "{}", err),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn oracle_gap_classes(seed in any::<u64>()) {
        let spec = random_curve(&mut Lcg::new(seed), &SweepParams::default());
        let t = spec.tower().unwrap();
        let dec = Decomposer::new(&t).unwrap();
        let table = dec.decompose().unwrap();
        let basis = build_basis(&spec).unwrap();
        let idx = basis.places.iter().position(|p| p.e_total() == t.group.order()).unwrap();
        let gaps = gaps_oracle(&spec, &basis, idx).unwrap();
        let profile = gap_classes(dec.context(), &table, &basis.places[idx].label).unwrap();
        let oracle = GapProfile::classes_of(&gaps, t.group.n, t.group.p_ell());
        prop_assert_eq!(&oracle, &profile.classes, "{}", spec);
        let tame: Vec<u64> = (0..t.group.n).map(|i| gaps.iter().filter(|&&g| g % t.group.n == i).count() as u64).collect();
        prop_assert_eq!(tame, profile.tame_counts());
    }
}
