mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use holodiff::boseck::BoseckContext;
use holodiff::decomp::{d_star, decompose, Decomposer, ModuleLabel};
use holodiff::exactmath::{unipotent_block_sizes, Fe};
use holodiff::oracle::{action_matrix, build_basis, jordan_table, order_check, run_sweep, CurveSpec, FTerm, Lcg, Status, SweepParams};
use holodiff::ramdata::{BranchPoint, GroupSpec, TowerData, WildData};
use holodiff::weier::{descriptors, full_gaps, semigroup_gaps};
use num_integer::Integer;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn artin_schreier(p: u64, m: u64) -> TowerData {
    TowerData::new(GroupSpec::new(p, 1, 1), 0, vec![BranchPoint::wild("P", WildData::artin_schreier(p, m))])
}

/// Gaps of a numerical semigroup by brute force over sums.
fn sieve_gaps(gens: &[u64]) -> Vec<u64> {
    let limit = gens.iter().product::<u64>() + 1;
    let mut reach = vec![false; limit as usize];
    reach[0] = true;
    for v in 1..limit as usize {
        reach[v] = gens.iter().any(|&g| v >= g as usize && reach[v - g as usize]);
    }
    (1..limit).filter(|&v| !reach[v as usize]).collect()
}

fn c1() -> Outcome {
    let start = Instant::now();
    let (p, m) = (5, 3);
    let t = artin_schreier(p, m);
    let ctx = BoseckContext::new(&t).map_err(e)?;
    let column: Vec<u64> = (0..p).map(|k| ctx.gamma(k, 0)).collect::<Result<_, _>>().map_err(e)?;
    let expected: Vec<u64> = (0..p).map(|k| ((m + 1) * (p - 1)).saturating_sub(k * m) / p).collect();
    ensure!(column == expected && column[..4] == [3, 2, 2, 1], "gamma column {column:?}, expected {expected:?}");
    let gaps = full_gaps(&ctx, "P").map_err(e)?;
    let reference = semigroup_gaps(&[3, 5], 15).map_err(e)?;
    ensure!(gaps == reference && gaps == [1, 2, 4, 7], "gaps {gaps:?} vs {reference:?}");
    let ms = start.elapsed().as_millis();
    ensure!(ms < 1000, "took {ms} ms");
    Ok(format!("gamma {column:?}, gaps {gaps:?}, {ms} ms"))
}

fn c2() -> Outcome {
    let spec = CurveSpec::new(GroupSpec::new(5, 1, 1), vec![], vec![FTerm { alpha: 0, m: 3, c: 1 }]);
    let f = spec.field().map_err(e)?;
    let basis = build_basis(&spec).map_err(e)?;
    ensure!(basis.dim() == 4, "basis dimension {}", basis.dim());
    let m = action_matrix(&spec, &basis).map_err(e)?;
    let blocks = unipotent_block_sizes(&f, &m, Fe::ONE).map_err(e)?;
    ensure!(blocks == [1, 3], "blocks {blocks:?}");
    let mut oracle = jordan_table(&f, &m, &spec.group).map_err(e)?;
    oracle.retain(|_, d| *d > 0);
    let table = decompose(&spec.tower().map_err(e)?).map_err(e)?;
    let formula: BTreeMap<ModuleLabel, u64> = table.nonzero().collect();
    ensure!(oracle == formula, "oracle {oracle:?}, formula {formula:?}");
    let fixed = m.sub_scalar(&f, Fe::ONE).map_err(e)?.nullity(&f);
    ensure!(fixed == 2 && table.c(0, 0) == 2, "invariants {fixed}, c(0,0) = {}", table.c(0, 0));
    let g = &basis.groups[0];
    ensure!((g.a, g.k, g.dim) == (0, 0, 2), "first group {:?}", (g.a, g.k, g.dim));
    let x = holodiff::exactmath::Poly::linear(&f, Fe::ZERO);
    for i in 0..2 {
        let (num, den) = basis.function(g.offset + i);
        ensure!(num == x.pow(&f, i as u32) && den == x.pow(&f, 3), "element {i}: {}", basis.describe(g.offset + i));
        let col = m.column(g.offset + i);
        ensure!(col.iter().enumerate().all(|(j, &v)| v == if j == g.offset + i { Fe::ONE } else { Fe::ZERO }), "sigma moves element {i}");
    }
    Ok(format!("dim 4, blocks {blocks:?}, fixed space dx/x^3, dx/x^2"))
}

fn c3() -> Outcome {
    let spec = CurveSpec::new(GroupSpec::new(3, 1, 2), vec![(0, 1)], vec![FTerm { alpha: 0, m: 1, c: 1 }]);
    let t = spec.tower().map_err(e)?;
    ensure!(t.genus_f().map_err(e)? == 1, "genus {:?}", t.genus_f());
    let table = decompose(&t).map_err(e)?;
    let formula: Vec<(ModuleLabel, u64)> = table.nonzero().collect();
    let v11 = ModuleLabel::new(1, 1, 2, 3).unwrap();
    ensure!(formula == [(v11, 1)], "formula {formula:?}");
    let f = spec.field().map_err(e)?;
    let basis = build_basis(&spec).map_err(e)?;
    ensure!(basis.dim() == 1 && basis.element(0).a == 1, "basis {}", basis.describe(0));
    let (num, den) = basis.function(0);
    let hx = num.mul(&f, &holodiff::exactmath::Poly::linear(&f, Fe::ZERO));
    ensure!(hx.degree() == Some(1) && den.degree() == Some(1) && hx.div_exact(&f, &den).is_ok(), "h*x not constant");
    let m = action_matrix(&spec, &basis).map_err(e)?;
    // g = sigma tau with n = 2, P = 3: tau = g^3, sigma = g^4
    let tau = m.pow(&f, 3).map_err(e)?;
    let sigma = m.pow(&f, 4).map_err(e)?;
    ensure!(tau.get(0, 0) == f.from_int(-1) && sigma.get(0, 0) == Fe::ONE, "tau {:?} sigma {:?}", tau.get(0, 0), sigma.get(0, 0));
    let oracle = jordan_table(&f, &m, &spec.group).map_err(e)?;
    let (consistent, faithful) = order_check(&f, &m, &spec.group, &oracle).map_err(e)?;
    ensure!(consistent, "order check");
    Ok(format!("g = 1, V(1,1), tau = -1, sigma = 1, faithful = {faithful}"))
}

fn c4() -> Outcome {
    let spec = CurveSpec::new(GroupSpec::new(2, 0, 3), vec![(0, 1), (1, 1)], vec![]);
    let t = spec.tower().map_err(e)?;
    let ds: Vec<u64> = (0..3).map(|l| d_star(&t, l, 1)).collect::<Result<_, _>>().map_err(e)?;
    ensure!(ds == [0, 1, 0], "d* {ds:?}");
    let table = decompose(&t).map_err(e)?;
    ensure!((0..3).all(|l| table.d(l, 1) == ds[l as usize]), "table disagrees with d*");
    let f = spec.field().map_err(e)?;
    let basis = build_basis(&spec).map_err(e)?;
    let m = action_matrix(&spec, &basis).map_err(e)?;
    ensure!(m.rows() == 1, "matrix size {}", m.rows());
    let zeta = holodiff::oracle::zeta(&f, 3).map_err(e)?;
    ensure!(m.get(0, 0) == zeta, "eigenvalue is not zeta");
    Ok(format!("d* = {ds:?}, oracle matrix [zeta]"))
}

fn c5() -> Outcome {
    let start = Instant::now();
    let outcomes = run_sweep(42, 100, &SweepParams::default());
    let mut bad = Vec::new();
    for o in &outcomes {
        for name in ["genus", "decomposition", "gap_classes"] {
            let ok = o.report.checks.iter().any(|c| c.name == name && c.status == Status::Pass);
            if !ok {
                bad.push(format!("{} [{name}]", o.spec));
            }
        }
        if !o.report.passed() {
            bad.push(format!("{} [overall]", o.spec));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(bad.is_empty(), "{} failures, first {}", bad.len(), bad[0]);
    ensure!(outcomes.len() == 100 && secs < 60.0, "{} instances in {secs:.1} s", outcomes.len());
    Ok(format!("100/100 in {secs:.1} s"))
}

fn c6() -> Outcome {
    let mut rng = Lcg::new(6);
    let mut deep = 0;
    for i in 0..500 {
        let t = common::random_tower(&mut rng, 3);
        deep += (t.group.ell >= 2) as u32;
        let dec = Decomposer::new(&t).map_err(|x| format!("{}: {x}", t.canonical()))?;
        let table = dec.decompose().map_err(|x| format!("tower {i} {}: {x}", t.canonical()))?;
        let g_f = t.genus_f().map_err(e)?;
        ensure!(table.dimension() == g_f, "tower {i}: sum k d = {} but g_F = {g_f}", table.dimension());
        let end = dec.context().case_one_end();
        for lambda in 0..t.group.n {
            for k in 1..t.group.p_ell() {
                ensure!(table.c(lambda, k) <= table.c(lambda, k - 1), "tower {i}: c not monotone");
            }
            for k in 0..end {
                let (deg, gamma) = (dec.deg_e(k, lambda).map_err(e)?, dec.gamma(k, lambda).map_err(e)?);
                ensure!(deg == gamma as i64, "tower {i}: deg E {deg} vs gamma {gamma} at ({lambda},{k})");
            }
        }
    }
    ensure!(deep > 50, "only {deep} towers with ell >= 2");
    Ok(format!("500 towers ({deep} with ell >= 2)"))
}

fn c7() -> Outcome {
    let gaps = semigroup_gaps(&[3, 5], 15).map_err(e)?;
    let ds = descriptors(&gaps, 5).map_err(e)?;
    let sg: Vec<u64> = (0..40).filter(|v| !gaps.contains(v)).collect();
    for d in &ds {
        let b = *sg.iter().find(|&&v| v % 5 == d.i).unwrap();
        let nu = gaps.iter().filter(|&&g| g % 5 == d.i).count() as u64;
        ensure!(d.b == b && d.nu == nu && d.nu == (b - d.i) / 5, "descriptor {d:?}, sieve b = {b}, nu = {nu}");
    }
    let mut checked = 0;
    for p in [3u64, 5, 7] {
        for m in (1..=12).filter(|m| m.gcd(&p) == 1) {
            let t = artin_schreier(p, m);
            let ctx = BoseckContext::new(&t).map_err(e)?;
            let ours = full_gaps(&ctx, "P").map_err(e)?;
            let reference = sieve_gaps(&[m, p]);
            ensure!(ours == reference, "p={p} m={m}: {ours:?} vs {reference:?}");
            checked += 1;
        }
    }
    Ok(format!("descriptors of <3,5> match, {checked} Artin-Schreier curves"))
}

fn c8() -> Outcome {
    let mut rng = Lcg::new(8);
    let (mut wild, mut unram) = (0, 0);
    while wild < 200 {
        let t = common::random_tower(&mut rng, 3);
        if t.group.n != 1 {
            continue;
        }
        let g = t.base_genus;
        let table = decompose(&t).map_err(e)?;
        let want = if t.wild_defect() > 0 { g - 1 } else { g };
        let got = table.d(0, t.group.p_ell());
        ensure!(got == want, "{}: d(0,P) = {got}, expected {want}", t.canonical());
        wild += 1;
    }
    for p in [2u64, 3, 5, 7] {
        for n in (2..=8).filter(|n| n.gcd(&p) == 1) {
            for g in 1..=3 {
                let t = TowerData::new(GroupSpec::new(p, 0, n), g, vec![]);
                for lambda in 0..n {
                    let want = if lambda == 0 { g } else { g - 1 };
                    let got = d_star(&t, lambda, 1).map_err(e)?;
                    ensure!(got == want, "unramified p={p} n={n} g={g}: d*({lambda},1) = {got}");
                }
                unram += 1;
            }
        }
    }
    Ok(format!("{wild} p-group towers, {unram} unramified tame towers"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Artin-Schreier gamma column and gaps", c1),
        ("oracle basis and blocks for the Artin-Schreier curve", c2),
        ("Z/6 curve of genus one", c3),
        ("tame decomposition against the oracle", c4),
        ("random oracle sweep", c5),
        ("identities on random towers", c6),
        ("gap descriptors and Artin-Schreier gaps", c7),
        ("p-group and unramified reductions", c8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
