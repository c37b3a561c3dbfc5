//! Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use iwasawa::graded::{
    check_nonvanishing_partials, cross_check_lowest, decompose_wd, poly_divides, Poly,
};
use iwasawa::groupalg::{
    max_pbw_degree, verify_bracket_identity_alg, verify_lowest_table, AlgElem, Basis,
};
use iwasawa::identities::{Status, NUM_ITEMS};
use iwasawa::matgroup::{compose, factorize, verify_matrix_identity, ExpTuple};
use iwasawa::normality::{
    central_non_unit, scan_candidate_list, scan_candidates, Mode, NormalityChecker, ScanConfig,
    Verdict, DEFAULT_DIM_CAP,
};
use iwasawa::padic::{beta_digits, compare_beta_digits};
use iwasawa::Ctx;

const SWEEP_LIMIT: Duration = Duration::from_secs(60);
const LOWEST_LIMIT: Duration = Duration::from_secs(120);
const CROSS_CHECK_LIMIT: Duration = Duration::from_secs(600);
const NORMALITY_LIMIT: Duration = Duration::from_secs(300);
const SEED: u64 = 20240501;

struct Gate {
    failures: usize,
}

impl Gate {
    fn record(&mut self, id: &str, name: &str, ok: bool, detail: String) {
        println!(
            "{} criterion {id} ({name}): {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures += 1;
        }
    }
}

fn ctx(p: u64, k: u32) -> Ctx {
    Ctx::new(p, k).unwrap()
}

fn sweep_grid(k: u32) -> Vec<(u32, u32)> {
    (0..k)
        .flat_map(|r| (0..k).map(move |s| (r, s)))
        .filter(|(r, s)| r + s + 2 <= k - 1)
        .collect()
}

fn criterion_1(gate: &mut Gate) {
    let start = Instant::now();
    let (mut checks, mut bad, mut flagged) = (0, Vec::new(), 0);
    for p in [3, 5, 7] {
        for k in [3, 4] {
            let c = ctx(p, k);
            for (r, s) in sweep_grid(k) {
                for id in 1..=NUM_ITEMS {
                    let m = verify_matrix_identity(id, r, s, &c).unwrap();
                    let a = verify_bracket_identity_alg(id, r, s, &c).unwrap();
                    checks += 2;
                    let proof_ok = m.parts.iter().all(|x| x.proof_matches)
                        && a.parts.iter().all(|x| x.proof_matches);
                    if !proof_ok || m.status == Status::Fail || a.status == Status::Fail {
                        bad.push(format!("p={p} k={k} r={r} s={s} item {id}"));
                    }
                    flagged += usize::from(m.status.max(a.status) == Status::Flagged);
                }
            }
        }
    }
    let elapsed = start.elapsed();
    gate.record(
        "1",
        "commutator identities, matrix and algebra level",
        bad.is_empty() && elapsed < SWEEP_LIMIT,
        format!(
            "{checks} exact checks, {} mismatches {:?}, {flagged} item instances FLAGGED for printed variants, {:.1}s (limit {}s)",
            bad.len(),
            bad,
            elapsed.as_secs_f64(),
            SWEEP_LIMIT.as_secs()
        ),
    );
}

fn criterion_2(gate: &mut Gate) {
    let start = Instant::now();
    let mut bad = Vec::new();
    for (p, k, r, s) in [(3, 4, 0, 0), (3, 4, 1, 0), (3, 4, 0, 1), (5, 3, 0, 0)] {
        let rep = verify_lowest_table(&ctx(p, k), r, s).unwrap();
        for pair in rep.pairs.iter().filter(|x| x.status != Status::Pass) {
            bad.push(format!(
                "(p,k,r,s)=({p},{k},{r},{s}) [y{},y{}]",
                pair.i, pair.j
            ));
        }
    }
    let elapsed = start.elapsed();
    gate.record(
        "2",
        "lowest-degree bracket table",
        bad.is_empty() && elapsed < LOWEST_LIMIT,
        format!(
            "4 x 64 pairs, mismatches {:?}, {:.1}s (limit {}s)",
            bad,
            elapsed.as_secs_f64(),
            LOWEST_LIMIT.as_secs()
        ),
    );
}

fn criterion_3(gate: &mut Gate) {
    let mut bad = Vec::new();
    for p in [5u64, 7, 11] {
        for m in [2u32, 3] {
            let digits = beta_digits(m, m as usize + 1, p).unwrap();
            let d = digits.digits();
            let formula = ((p.pow(m - 1) - 1) / 2 + p - 1) % p;
            let ok = d[..m as usize - 1].iter().all(|&x| x == 0)
                && d[m as usize - 1] as u64 == p - 1
                && d[m as usize] as u64 == formula
                && !compare_beta_digits(m, m as usize + 1, p).unwrap().flagged();
            if !ok {
                bad.push(format!("p={p} m={m} digits {d:?}"));
            }
        }
    }
    let cmp = compare_beta_digits(2, 3, 3).unwrap();
    let p3_ok = cmp.computed.digits() == [0, 2, 1] && cmp.flagged() && cmp.discrepancies == vec![2];
    gate.record(
        "3",
        "beta digits",
        bad.is_empty() && p3_ok,
        format!(
            "p in {{5,7,11}}, m in {{2,3}} mismatches {bad:?}; p=3 m=2 computed {:?}, discrepancy FLAGGED at digit(s) {:?}",
            cmp.computed.digits(),
            cmp.discrepancies
        ),
    );
}

fn criterion_4(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = 0;
    for (p, k) in [(3, 2), (5, 2)] {
        let c = ctx(p, k);
        for _ in 0..100 {
            let support = rng.gen_range(1..=4);
            let a = AlgElem::random_sparse(&c, Basis::Group, support, &mut rng);
            if a.to_pbw_truncated(max_pbw_degree(&c)).from_pbw() != a {
                bad += 1;
            }
        }
    }
    gate.record(
        "4",
        "PBW round trip",
        bad == 0,
        format!("200 random elements, {bad} round-trip failures"),
    );
}

fn criterion_5(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut bad = 0;
    for (p, k) in [(3, 3), (5, 2), (7, 2)] {
        let c = ctx(p, k);
        for _ in 0..1000 {
            let t = ExpTuple(std::array::from_fn(|_| rng.gen_range(0..c.gen_order())));
            if factorize(&compose(&t, &c), &c).ok() != Some(t) {
                bad += 1;
            }
        }
    }
    let c = ctx(3, 2);
    let mut seen = HashSet::new();
    let mut exhaustive_ok = true;
    for code in 0..3u64.pow(8) {
        let t = ExpTuple(std::array::from_fn(|i| code / 3u64.pow(i as u32) % 3));
        let m = compose(&t, &c);
        exhaustive_ok &= factorize(&m, &c).ok() == Some(t);
        seen.insert(m);
    }
    exhaustive_ok &= seen.len() == 6561;
    gate.record(
        "5",
        "compose/factorize",
        bad == 0 && exhaustive_ok,
        format!("3000 random round trips, {bad} failures; (3,2) bijection on {} matrices: {exhaustive_ok}", seen.len()),
    );
}

fn criterion_6(gate: &mut Gate) {
    let start = Instant::now();
    let c = ctx(3, 4);
    let mut bad = Vec::new();
    for r in [0, 1] {
        for i in 1..=8 {
            for j in 1..=8 {
                let rep = cross_check_lowest(i, r, 0, &Poly::var(3, j, 1), &c, 20).unwrap();
                if rep.status != Status::Pass {
                    bad.push(format!("r={r} [y{i}, Y{j}]"));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut random_checked = 0;
    while random_checked < 50 {
        let degree = rng.gen_range(1..=3);
        let w = Poly::random_homogeneous(3, degree, rng.gen_range(1..=3), &mut rng);
        if w.is_zero() {
            continue;
        }
        let (cgen, r) = (rng.gen_range(1..=8), random_checked % 2);
        let rep = cross_check_lowest(cgen, r as u32, 0, &w, &c, 20).unwrap();
        if rep.status != Status::Pass {
            bad.push(format!("c={cgen} r={r} w={w}"));
        }
        random_checked += 1;
    }
    let elapsed = start.elapsed();
    gate.record(
        "6",
        "graded formulas vs group-algebra brackets",
        bad.is_empty() && elapsed < CROSS_CHECK_LIMIT,
        format!(
            "2 x 64 generator pairs + 50 random homogeneous w at (3,4), mismatches {bad:?}, {:.1}s (limit {}s)",
            elapsed.as_secs_f64(),
            CROSS_CHECK_LIMIT.as_secs()
        ),
    );
}

/// A random polynomial in `Y^(p^s)` with at least one exponent not divisible by `p^(s+1)`.
fn claim_input(p: u64, s: u32, rng: &mut ChaCha8Rng) -> Poly {
    let q = p.pow(s);
    loop {
        let base = Poly::random_homogeneous(p, rng.gen_range(1..=4), rng.gen_range(1..=4), rng);
        let w = Poly::from_terms(
            p,
            base.terms()
                .iter()
                .map(|(e, c)| (e.map(|x| x * q), *c as i64)),
        );
        if !w.is_zero() && !w.p_power_membership(s + 1) {
            return w;
        }
    }
}

fn criterion_7(gate: &mut Gate) {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    let (mut claim_failures, mut decompose_failures, mut divide_failures) = (0, 0, 0);
    for n in 0..200 {
        let (p, s) = ([3u64, 5][n % 2], (n % 3) as u32);
        if !check_nonvanishing_partials(&claim_input(p, s, &mut rng), s).unwrap() {
            claim_failures += 1;
        }
    }
    for n in 0..200 {
        let (p, s) = ([3u64, 5][n % 2], (n % 2) as u32);
        let lift = |w: &Poly, e: u64| {
            Poly::from_terms(
                p,
                w.terms().iter().map(|(x, c)| (x.map(|v| v * e), *c as i64)),
            )
        };
        let w_m = lift(&claim_input(p, 0, &mut rng), p.pow(s + 1));
        let u = lift(&claim_input(p, 0, &mut rng), p.pow(s));
        let v = lift(&claim_input(p, 0, &mut rng), p.pow(s + 1));
        let w_d = w_m.mul(&u).add(&v);
        match decompose_wd(&w_d, &w_m, s) {
            Ok((u2, v2)) if w_m.mul(&u2).add(&v2) == w_d && v2.p_power_membership(s + 1) => {}
            _ => decompose_failures += 1,
        }
    }
    for n in 0..200 {
        let p = [3u64, 5, 7][n % 3];
        let a = claim_input(p, 0, &mut rng);
        let q = claim_input(p, 0, &mut rng);
        let b = a.mul(&q);
        match poly_divides(&a, &b).unwrap() {
            Some(got) if a.mul(&got) == b => {}
            _ => divide_failures += 1,
        }
    }
    gate.record(
        "7",
        "nonvanishing partials, decomposition, division",
        claim_failures + decompose_failures + divide_failures == 0,
        format!(
            "200 inputs each: {claim_failures} vanishing-partial counterexamples, {decompose_failures} decomposition failures, {divide_failures} division failures"
        ),
    );
}

fn criterion_8(gate: &mut Gate) {
    let start = Instant::now();
    let c = ctx(3, 2);
    let cfg = ScanConfig {
        mode: Mode::Truncated(4),
        degree_cap: 2,
        support_cap: 3,
        sample_count: 200,
        seed: SEED,
    };
    let summary = scan_candidates(&c, &cfg, DEFAULT_DIM_CAP).unwrap();

    let checker = NormalityChecker::new(&c, Mode::Truncated(4), DEFAULT_DIM_CAP).unwrap();
    let central_clean = (1..=8).all(|i| {
        let z = central_non_unit(&ExpTuple::unit(i, 1, &c), &c);
        checker
            .check(&z)
            .unwrap()
            .outcomes
            .iter()
            .all(|o| !o.is_witness())
    });

    let exact = NormalityChecker::new(&c, Mode::Exact, DEFAULT_DIM_CAP).unwrap();
    let candidates = scan_candidate_list(&c, &cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let exact_witnessed = (0..10)
        .filter(|_| {
            let w = &candidates[rng.gen_range(0..candidates.len())];
            exact.check(w).unwrap().verdict == Verdict::NonNormalWitnessed
        })
        .count();
    let elapsed = start.elapsed();
    gate.record(
        "8",
        "normality scan at p=3, k=2",
        summary.inconclusive == 0 && central_clean && exact_witnessed == 10 && elapsed < NORMALITY_LIMIT,
        format!(
            "truncated D=4: scanned {} witnessed {} inconclusive {}; central elements witness-free: {central_clean}; exact mode witnessed {exact_witnessed}/10; {:.1}s (limit {}s)",
            summary.scanned,
            summary.witnessed,
            summary.inconclusive,
            elapsed.as_secs_f64(),
            NORMALITY_LIMIT.as_secs()
        ),
    );
    if summary.inconclusive > 0 {
        println!(
            "     note: G_2 is abelian ((I+pA)(I+pB) = I+p(A+B) mod p^2), so every [y_c, W] vanishes in F_3[G_2] and no witness can exist at this level"
        );
    }

    // Same scan one level up, where the group is no longer abelian.
    let start = Instant::now();
    let c3 = ctx(3, 3);
    let summary = scan_candidates(&c3, &cfg, DEFAULT_DIM_CAP).unwrap();
    let checker = NormalityChecker::new(&c3, Mode::Truncated(4), DEFAULT_DIM_CAP).unwrap();
    let central_clean = [1, 4, 6].into_iter().all(|i| {
        let z = central_non_unit(&ExpTuple::unit(i, 1, &c3), &c3);
        checker
            .check(&z)
            .unwrap()
            .outcomes
            .iter()
            .all(|o| !o.is_witness())
    });
    println!(
        "INFO same scan at p=3, k=3: scanned {} witnessed {} inconclusive {}; central elements witness-free: {central_clean}; {:.1}s",
        summary.scanned,
        summary.witnessed,
        summary.inconclusive,
        start.elapsed().as_secs_f64()
    );
}

fn main() {
    let mut gate = Gate { failures: 0 };
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    criterion_3(&mut gate);
    criterion_4(&mut gate);
    criterion_5(&mut gate);
    criterion_6(&mut gate);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    println!("{} of 8 criteria failed", gate.failures);
    if gate.failures > 0 {
        std::process::exit(1);
    }
}
