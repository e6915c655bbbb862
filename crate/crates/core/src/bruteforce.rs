//! Exhaustive reference implementations used by the test suites to
//! cross-check the production code paths. Everything here is exponential
//! and meant for desk-scale instances only; none of it shares logic with
//! the modules it checks.

use crate::instance::{HrInstance, HrlqInstance, Matching};

/// Every assignment respecting capacities, by a plain odometer over
/// (hospital-or-nothing) choices per resident. No pruning beyond the
/// capacity filter at the end of each full assignment.
pub fn all_hr_matchings(inst: &HrInstance) -> Vec<Matching> {
    odometer(
        inst.n_residents(),
        inst.n_hospitals(),
        |r| inst.resident_prefs(r),
        |loads| (0..inst.n_hospitals()).all(|h| loads[h] <= inst.capacity(h)),
    )
}

/// Every feasible matching: upper-quota-valid assignments that also meet
/// every lower quota.
pub fn all_feasible_matchings(inst: &HrlqInstance) -> Vec<Matching> {
    odometer(
        inst.n_residents(),
        inst.n_hospitals(),
        |r| inst.resident_prefs(r),
        |loads| {
            (0..inst.n_hospitals())
                .all(|h| loads[h] <= inst.upper(h) && loads[h] >= inst.lower(h))
        },
    )
}

fn odometer<'a>(
    nr: usize,
    nh: usize,
    prefs: impl Fn(usize) -> &'a [usize],
    accept: impl Fn(&[usize]) -> bool,
) -> Vec<Matching> {
    let mut out = Vec::new();
    let mut digits = vec![0usize; nr];
    loop {
        let mut loads = vec![0usize; nh];
        let mut assigned = vec![None; nr];
        for r in 0..nr {
            if digits[r] > 0 {
                let h = prefs(r)[digits[r] - 1];
                assigned[r] = Some(h);
                loads[h] += 1;
            }
        }
        if accept(&loads) {
            out.push(Matching::from_assignment(assigned, nh));
        }
        // Increment the mixed-radix counter.
        let mut pos = 0;
        loop {
            if pos == nr {
                return out;
            }
            digits[pos] += 1;
            if digits[pos] <= prefs(pos).len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

/// Direct double-loop blocking-pair scan, one comparison at a time.
pub fn blocking_pairs_naive(inst: &HrInstance, m: &Matching) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..inst.n_residents() {
        for (pos, &h) in inst.resident_prefs(r).iter().enumerate() {
            if m.assignment(r) == Some(h) {
                continue;
            }
            let resident_wants = match m.assignment(r) {
                None => true,
                Some(cur) => {
                    let cur_pos = inst
                        .resident_prefs(r)
                        .iter()
                        .position(|&x| x == cur)
                        .unwrap();
                    pos < cur_pos
                }
            };
            if !resident_wants {
                continue;
            }
            let mut hospital_wants = m.load(h) < inst.capacity(h);
            if !hospital_wants {
                let my_pos = inst
                    .hospital_prefs(h)
                    .iter()
                    .position(|&x| x == r)
                    .unwrap();
                for &other in m.residents_of(h) {
                    let other_pos = inst
                        .hospital_prefs(h)
                        .iter()
                        .position(|&x| x == other)
                        .unwrap();
                    if my_pos < other_pos {
                        hospital_wants = true;
                        break;
                    }
                }
            }
            if hospital_wants {
                out.push((r, h));
            }
        }
    }
    out
}

/// All stable matchings of a plain instance, by filtering the full
/// assignment space.
pub fn all_stable_matchings(inst: &HrInstance) -> Vec<Matching> {
    all_hr_matchings(inst)
        .into_iter()
        .filter(|m| blocking_pairs_naive(inst, m).is_empty())
        .collect()
}

/// Fewest positions the `first` side can win at hospital `h` over all
/// pairings between the two difference sets, by enumerating every
/// injection of the smaller side into the larger.
pub fn min_first_wins_by_enumeration(
    inst: &HrlqInstance,
    h: usize,
    first: &[usize],
    second: &[usize],
) -> usize {
    let rank = |r: usize| inst.hospital_rank(h, r).expect("edge");
    let (small, large, first_is_small) = if first.len() <= second.len() {
        (first, second, true)
    } else {
        (second, first, false)
    };

    let mut best = usize::MAX;
    let mut chosen = Vec::with_capacity(small.len());
    let mut used = vec![false; large.len()];
    fn recurse(
        small_len: usize,
        used: &mut Vec<bool>,
        chosen: &mut Vec<usize>,
        wins: &mut dyn FnMut(&[usize]) -> usize,
        best: &mut usize,
    ) {
        if chosen.len() == small_len {
            let w = wins(chosen);
            if w < *best {
                *best = w;
            }
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                chosen.push(j);
                recurse(small_len, used, chosen, wins, best);
                chosen.pop();
                used[j] = false;
            }
        }
    }
    let mut wins = |assignment: &[usize]| -> usize {
        // assignment[i] = index into `large` paired with small[i]
        let mut first_wins = 0;
        for (i, &j) in assignment.iter().enumerate() {
            let (a, b) = if first_is_small {
                (small[i], large[j])
            } else {
                (large[j], small[i])
            };
            if rank(a) < rank(b) {
                first_wins += 1;
            }
        }
        // Unpaired members of the larger side face empty seats.
        if !first_is_small {
            first_wins += large.len() - small.len();
        }
        first_wins
    };
    recurse(small.len(), &mut used, &mut chosen, &mut wins, &mut best);
    best
}

/// Independent recount of a preference-order comparison: walks every
/// voter once and tallies from scratch.
pub fn recount_preference_order(
    inst: &HrlqInstance,
    m: &Matching,
    n: &Matching,
) -> (usize, usize) {
    let mut for_m = 0;
    let mut for_n = 0;
    for r in 0..inst.n_residents() {
        let x = m.assignment(r);
        let y = n.assignment(r);
        if x == y {
            continue;
        }
        let rank = |h: Option<usize>| h.map(|h| inst.resident_rank(r, h).unwrap());
        match (rank(x), rank(y)) {
            (Some(a), Some(b)) if a < b => for_m += 1,
            (Some(_), None) => for_m += 1,
            _ => for_n += 1,
        }
    }
    for h in 0..inst.n_hospitals() {
        let rank = |r: usize| inst.hospital_rank(h, r).unwrap();
        let mut gained: Vec<usize> = m
            .residents_of(h)
            .iter()
            .copied()
            .filter(|&r| n.assignment(r) != Some(h))
            .collect();
        let mut lost: Vec<usize> = n
            .residents_of(h)
            .iter()
            .copied()
            .filter(|&r| m.assignment(r) != Some(h))
            .collect();
        gained.sort_by_key(|&r| rank(r));
        lost.sort_by_key(|&r| rank(r));
        for i in 0..gained.len().max(lost.len()) {
            match (gained.get(i), lost.get(i)) {
                (Some(&a), Some(&b)) => {
                    if rank(a) < rank(b) {
                        for_m += 1;
                    } else {
                        for_n += 1;
                    }
                }
                (Some(_), None) => for_m += 1,
                (None, Some(_)) => for_n += 1,
                (None, None) => {}
            }
        }
    }
    (for_m, for_n)
}
