//! Acceptance suite. One test per criterion; each prints a summary line
//! and asserts its stated tolerance exactly. The corpus is seeded and
//! therefore identical on every run:
//!
//!   1. golden one-resident example end to end (both objectives);
//!   2. max-popular outputs respect every quota on the feasible corpus;
//!   3. max-popular outputs survive adversarial popularity certification
//!      against the entire feasible universe;
//!   4. any strictly larger feasible matching loses the election strictly;
//!   5. popular-max outputs have maximum cardinality and survive
//!      certification among the maximum-cardinality universe;
//!   6. structural clauses hold for the stable matchings of every
//!      constructed reduction;
//!   7. both proposal directions project to the same fill profile;
//!   8. the independent oracles agree with the production paths;
//!   9. performance smoke test at 2000 and 4000 residents.

use std::path::PathBuf;
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hrlq_core::bruteforce;
use hrlq_core::format::parse_hrlq;
use hrlq_core::generate::{generate, GenerateParams};
use hrlq_core::hr::{check_stable_feasible, gale_shapley, same_fill_profile, ProposingSide};
use hrlq_core::popularity::{
    certify_popular, corr_pairings, enumerate_feasible, max_card_feasible, position_votes, vote,
    CertifyOutcome, CorrPolicy, UniverseKind, DEFAULT_ENUM_LIMIT,
};
use hrlq_core::reduction::{
    build_g_double_prime, build_g_prime, check_reduced_invariants, map_back, solve_max_popular,
    solve_popular_max,
};
use hrlq_core::{HrlqInstance, Matching};

fn corpus_instance(i: u64) -> HrlqInstance {
    let residents = 1 + (i % 6) as usize;
    let hospitals = 1 + ((i / 6) % 3) as usize;
    let max_upper = 1 + ((i / 18) % 3) as usize;
    let max_lower = (((i / 54) % 3) as usize).min(max_upper);
    let density = [0.35, 0.6, 1.0][((i / 162) % 3) as usize];
    generate(&GenerateParams {
        residents,
        hospitals,
        max_upper,
        max_lower,
        density,
        seed: i,
    })
    .unwrap()
}

/// Sparse tail of the corpus where maximum-cardinality matchings
/// regularly exceed the max-popular output, so criterion 4 bites.
fn sparse_instance(seed: u64) -> HrlqInstance {
    generate(&GenerateParams {
        residents: 2 + (seed % 5) as usize,
        hospitals: 2 + ((seed / 5) % 2) as usize,
        max_upper: 2,
        max_lower: 1,
        density: [0.35, 0.5, 0.65][(seed / 10 % 3) as usize],
        seed,
    })
    .unwrap()
}

/// Seeds of the sparse family whose instances admit feasible matchings
/// strictly larger than the max-popular output, found by scanning the
/// first 30000 seeds. They keep criterion 4 exercised for real.
const GAP_SEEDS: &[u64] = &[
    118, 438, 577, 1398, 1658, 2987, 3027, 3248, 3787, 3829, 3848, 3858, 4317, 5047, 5977, 8147,
    8467, 8478, 8489, 8619, 8777, 9158, 10537, 10878, 10927, 10989, 11208, 11348, 11967, 12018,
    12118, 12158, 12687, 12838, 12847, 14249, 14447, 15037, 15328, 15498,
];

struct Case {
    inst: HrlqInstance,
    universe: Vec<Matching>,
}

fn corpus() -> &'static [Case] {
    static CORPUS: OnceLock<Vec<Case>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut cases: Vec<Case> = Vec::with_capacity(1740);
        let instances = (0..1100)
            .map(corpus_instance)
            .chain((0..600).map(sparse_instance))
            .chain(GAP_SEEDS.iter().map(|&s| sparse_instance(s)));
        for inst in instances {
            let universe = enumerate_feasible(&inst, DEFAULT_ENUM_LIMIT)
                .collect::<Result<Vec<_>, _>>()
                .expect("desk-scale universes fit the enumeration limit");
            cases.push(Case { inst, universe });
        }
        cases
    })
}

fn feasible_cases() -> impl Iterator<Item = &'static Case> {
    corpus().iter().filter(|c| !c.universe.is_empty())
}

const EXAMPLE1: &str = "\
HRLQ
resident r
hospital h1 0 1
hospital h2 1 1
pref r : h1 h2
pref h1 : r
pref h2 : r
";

#[test]
fn criterion_1_golden_example() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/example1.hrlq");
    for objective in ["max-popular", "popular-max"] {
        let out = Command::new(env!("CARGO_BIN_EXE_hrlq"))
            .args(["solve", "--objective", objective, data.to_str().unwrap()])
            .output()
            .expect("binary runs");
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(
            String::from_utf8(out.stdout).unwrap(),
            "match r h2\n# summary matched=1 deficient=0\n",
            "objective {objective}"
        );
    }

    let inst = parse_hrlq(EXAMPLE1).unwrap();
    assert!(check_stable_feasible(&inst).is_none());

    let clock = Instant::now();
    let a = solve_max_popular(&inst).unwrap();
    let b = solve_popular_max(&inst).unwrap();
    let elapsed = clock.elapsed();
    let expected = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
    assert_eq!(a, expected);
    assert_eq!(b, expected);
    assert!(
        elapsed < Duration::from_millis(10),
        "solving the one-resident example took {elapsed:?}"
    );
    println!("criterion 1: PASS — both objectives output {{(r,h2)}} in {elapsed:?}");
}

#[test]
fn criterion_2_max_popular_outputs_are_feasible() {
    let mut feasible = 0usize;
    for case in feasible_cases() {
        let m = solve_max_popular(&case.inst).unwrap();
        assert!(
            case.inst.is_feasible(&m),
            "quota violated on a feasible instance"
        );
        feasible += 1;
    }
    let total = corpus().len();
    assert!(
        feasible >= 1000,
        "corpus has only {feasible} feasible instances"
    );
    println!(
        "criterion 2: PASS — {feasible}/{total} instances feasible ({:.1}%), all solver outputs within quotas",
        100.0 * feasible as f64 / total as f64
    );
}

#[test]
fn criterion_3_max_popular_outputs_are_popular() {
    let mut certified = 0usize;
    for case in feasible_cases() {
        let m = solve_max_popular(&case.inst).unwrap();
        match certify_popular(&case.inst, &m, UniverseKind::AllFeasible, DEFAULT_ENUM_LIMIT)
            .unwrap()
        {
            CertifyOutcome::Popular { .. } => certified += 1,
            other => panic!("counterexample to popularity: {}", other.render(&case.inst)),
        }
    }
    println!("criterion 3: PASS — {certified} adversarial certificates, zero counterexamples");
}

#[test]
fn criterion_4_larger_matchings_lose_strictly() {
    let mut exercised = 0usize;
    for case in feasible_cases() {
        let m = solve_max_popular(&case.inst).unwrap();
        let policy = CorrPolicy::adversarial_against(&m);
        for n in &case.universe {
            if n.size() > m.size() {
                let outcome = vote(&case.inst, n, &m, &policy).unwrap();
                assert!(
                    outcome.delta_for < outcome.delta_against,
                    "larger matching ties or wins: {} vs {}",
                    outcome.delta_for,
                    outcome.delta_against
                );
                exercised += 1;
            }
        }
    }
    assert!(exercised > 0, "no strictly larger matchings in the corpus");
    println!("criterion 4: PASS — {exercised} larger challengers, all beaten strictly");
}

#[test]
fn criterion_5_popular_max_outputs() {
    let mut certified = 0usize;
    for case in feasible_cases() {
        let m = solve_popular_max(&case.inst).unwrap();
        let max_card = max_card_feasible(&case.inst).unwrap();
        assert_eq!(m.size(), max_card, "not a maximum-cardinality matching");
        match certify_popular(
            &case.inst,
            &m,
            UniverseKind::MaxCardinality,
            DEFAULT_ENUM_LIMIT,
        )
        .unwrap()
        {
            CertifyOutcome::Popular { .. } => certified += 1,
            other => panic!(
                "counterexample among maximum matchings: {}",
                other.render(&case.inst)
            ),
        }
    }
    println!(
        "criterion 5: PASS — {certified} outputs at maximum cardinality, zero counterexamples"
    );
}

#[test]
fn criterion_6_reduction_invariants() {
    let mut checked = 0usize;
    for case in corpus() {
        for red in [build_g_prime(&case.inst), build_g_double_prime(&case.inst)] {
            let m = gale_shapley(&red.hr, ProposingSide::Residents);
            let report = check_reduced_invariants(&red, &m).unwrap();
            assert!(
                report.all_passed(),
                "clause failed ({:?}):\n{}",
                red.kind,
                report.render()
            );
            checked += 1;
        }
    }
    println!("criterion 6: PASS — all clauses hold on {checked} reductions");
}

#[test]
fn criterion_7_rural_hospitals_consistency() {
    let mut checked = 0usize;
    for case in corpus() {
        for red in [build_g_prime(&case.inst), build_g_double_prime(&case.inst)] {
            let mr = map_back(&red, &gale_shapley(&red.hr, ProposingSide::Residents)).unwrap();
            let mh = map_back(&red, &gale_shapley(&red.hr, ProposingSide::Hospitals)).unwrap();
            assert!(
                same_fill_profile(&mr, &mh),
                "proposal sides disagree on {:?}",
                red.kind
            );
            checked += 1;
        }
    }
    println!("criterion 7: PASS — fill profiles agree on {checked} reductions");
}

#[test]
fn criterion_8_oracle_self_consistency() {
    let mut pairing_checks = 0usize;
    for (idx, case) in corpus().iter().enumerate() {
        // Flow feasibility vs. enumeration.
        assert_eq!(
            hrlq_core::instance::feasibility_exists(&case.inst),
            !case.universe.is_empty(),
            "instance {idx}"
        );
        // Flow maximum vs. enumerated maximum.
        if !case.universe.is_empty() {
            let enumerated = case.universe.iter().map(Matching::size).max().unwrap();
            assert_eq!(
                max_card_feasible(&case.inst).unwrap(),
                enumerated,
                "instance {idx}"
            );
        }
        // Adversarial pairing vs. permutation brute force.
        let k = case.universe.len().min(5);
        for a in 0..k {
            for b in (a + 1)..k {
                let (m, n) = (&case.universe[a], &case.universe[b]);
                let pairings =
                    corr_pairings(&case.inst, m, n, &CorrPolicy::adversarial_against(m)).unwrap();
                for h in 0..case.inst.n_hospitals() {
                    let gained: Vec<usize> = m
                        .residents_of(h)
                        .iter()
                        .copied()
                        .filter(|&r| n.assignment(r) != Some(h))
                        .collect();
                    let lost: Vec<usize> = n
                        .residents_of(h)
                        .iter()
                        .copied()
                        .filter(|&r| m.assignment(r) != Some(h))
                        .collect();
                    let (wins, _) = position_votes(&case.inst, h, &pairings[h]);
                    let best =
                        bruteforce::min_first_wins_by_enumeration(&case.inst, h, &gained, &lost);
                    assert_eq!(wins, best, "instance {idx} hospital {h}");
                    pairing_checks += 1;
                }
            }
        }
    }
    println!(
        "criterion 8: PASS — flow oracles exact on {} instances, {pairing_checks} pairings match brute force",
        corpus().len()
    );
}

fn perf_instance(n_residents: usize, seed: u64) -> HrlqInstance {
    let n_hospitals = 50;
    let per_resident = 20;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = n_residents / 40;
    let hospitals: Vec<(String, usize, usize)> = (0..n_hospitals)
        .map(|h| {
            let lower = if h < 10 { 2 } else { 0 };
            (format!("h{h}"), lower, upper)
        })
        .collect();
    let mut resident_prefs = Vec::with_capacity(n_residents);
    let mut hospital_lists: Vec<Vec<usize>> = vec![Vec::new(); n_hospitals];
    for r in 0..n_residents {
        let mut pool: Vec<usize> = (0..n_hospitals).collect();
        for k in 0..per_resident {
            let j = rng.gen_range(k..n_hospitals);
            pool.swap(k, j);
        }
        let list = pool[..per_resident].to_vec();
        for &h in &list {
            hospital_lists[h].push(r);
        }
        resident_prefs.push(list);
    }
    for list in &mut hospital_lists {
        list.shuffle(&mut rng);
    }
    let residents = (0..n_residents).map(|r| format!("r{r}")).collect();
    HrlqInstance::from_parts(residents, hospitals, resident_prefs, hospital_lists).unwrap()
}

fn median_solve_time(n_residents: usize) -> Duration {
    let inst = perf_instance(n_residents, 42);
    let mut times = Vec::new();
    for _ in 0..3 {
        let clock = Instant::now();
        let m = solve_max_popular(&inst).expect("perf instance is feasible");
        times.push(clock.elapsed());
        assert!(inst.is_feasible(&m));
    }
    times.sort();
    times[1]
}

#[test]
fn criterion_9_performance_smoke() {
    let base = median_solve_time(2000);
    assert!(
        base < Duration::from_secs(5),
        "2000-resident solve took {base:?}"
    );
    let doubled = median_solve_time(4000);
    assert!(
        doubled < base * 4,
        "doubling residents scaled {base:?} to {doubled:?}"
    );
    println!("criterion 9: PASS — medians {base:?} at 2000 residents, {doubled:?} at 4000");
}
