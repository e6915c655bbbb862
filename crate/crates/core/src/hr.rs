//! Deferred acceptance on plain instances, blocking-pair verification, and
//! the classical stable-feasibility test for instances with lower quotas.

use std::collections::{BinaryHeap, VecDeque};

use crate::instance::{HrInstance, HrlqInstance, Matching, MatchingError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposingSide {
    Residents,
    Hospitals,
}

/// Computes a stable matching by deferred acceptance. Free agents are
/// processed from a FIFO queue seeded in declaration order, so the run is
/// reproducible; the outcome is the side-optimal stable matching either way.
pub fn gale_shapley(inst: &HrInstance, side: ProposingSide) -> Matching {
    match side {
        ProposingSide::Residents => resident_proposing(inst),
        ProposingSide::Hospitals => hospital_proposing(inst),
    }
}

fn resident_proposing(inst: &HrInstance) -> Matching {
    let nr = inst.n_residents();
    let nh = inst.n_hospitals();
    let mut assigned: Vec<Option<usize>> = vec![None; nr];
    let mut next_choice = vec![0usize; nr];
    // Per hospital: current assignees keyed by preference rank, worst on top.
    let mut held: Vec<BinaryHeap<(usize, usize)>> = vec![BinaryHeap::new(); nh];
    let mut queue: VecDeque<usize> = (0..nr).collect();

    while let Some(r) = queue.pop_front() {
        loop {
            let Some(&h) = inst.resident_prefs(r).get(next_choice[r]) else {
                break; // list exhausted, r stays unmatched
            };
            let cap = inst.capacity(h);
            let rank = inst
                .hospital_rank(h, r)
                .expect("preference lists are mutually consistent");
            if held[h].len() < cap {
                held[h].push((rank, r));
                assigned[r] = Some(h);
                break;
            }
            if cap > 0 {
                let &(worst_rank, worst) = held[h].peek().unwrap();
                if rank < worst_rank {
                    held[h].pop();
                    held[h].push((rank, r));
                    assigned[r] = Some(h);
                    assigned[worst] = None;
                    next_choice[worst] += 1;
                    queue.push_back(worst);
                    break;
                }
            }
            next_choice[r] += 1;
        }
    }
    Matching::from_assignment(assigned, nh)
}

fn hospital_proposing(inst: &HrInstance) -> Matching {
    let nr = inst.n_residents();
    let nh = inst.n_hospitals();
    // Per resident: best proposal held so far, as (rank in r's list, hospital).
    let mut held: Vec<Option<(usize, usize)>> = vec![None; nr];
    let mut next_choice = vec![0usize; nh];
    let mut free = (0..nh).map(|h| inst.capacity(h)).collect::<Vec<_>>();
    let mut queue: VecDeque<usize> = (0..nh).collect();

    while let Some(h) = queue.pop_front() {
        while free[h] > 0 && next_choice[h] < inst.hospital_prefs(h).len() {
            let r = inst.hospital_prefs(h)[next_choice[h]];
            next_choice[h] += 1;
            let rank = inst
                .resident_rank(r, h)
                .expect("preference lists are mutually consistent");
            match held[r] {
                None => {
                    held[r] = Some((rank, h));
                    free[h] -= 1;
                }
                Some((current_rank, current)) => {
                    if rank < current_rank {
                        held[r] = Some((rank, h));
                        free[h] -= 1;
                        free[current] += 1;
                        queue.push_back(current);
                    }
                }
            }
        }
    }

    let assigned = held.into_iter().map(|slot| slot.map(|(_, h)| h)).collect();
    Matching::from_assignment(assigned, nh)
}

/// Lists every pair (r, h) in E \ M that blocks `m`: r is unmatched or
/// prefers h to its assignment, and h is undersubscribed or prefers r to
/// one of its assignees. Pairs come in resident order, then by r's
/// preference order.
pub fn find_blocking_pairs(
    inst: &HrInstance,
    m: &Matching,
) -> Result<Vec<(usize, usize)>, MatchingError> {
    inst.validate_matching(m)?;
    // Worst held rank per hospital; None when empty.
    let worst: Vec<Option<usize>> = (0..inst.n_hospitals())
        .map(|h| {
            m.residents_of(h)
                .iter()
                .map(|&r| inst.hospital_rank(h, r).expect("matching uses edges"))
                .max()
        })
        .collect();

    let mut blocking = Vec::new();
    for r in 0..inst.n_residents() {
        let current_rank = m.assignment(r).map(|h| {
            inst.resident_rank(r, h)
                .expect("matching uses edges of the instance")
        });
        for (pos, &h) in inst.resident_prefs(r).iter().enumerate() {
            if m.assignment(r) == Some(h) {
                continue;
            }
            let resident_wants = match current_rank {
                None => true,
                Some(cur) => pos < cur,
            };
            if !resident_wants {
                continue;
            }
            let undersubscribed = m.load(h) < inst.capacity(h);
            let prefers_r = worst[h]
                .map(|w| inst.hospital_rank(h, r).expect("edge") < w)
                .unwrap_or(false);
            if undersubscribed || prefers_r {
                blocking.push((r, h));
            }
        }
    }
    Ok(blocking)
}

/// Decides whether the instance admits a feasible stable matching, by the
/// rural-hospitals argument: drop lower quotas, compute one stable matching,
/// and test it against the quotas. Returns the matching when it is feasible.
pub fn check_stable_feasible(inst: &HrlqInstance) -> Option<Matching> {
    let relaxed = inst.relax();
    let m = gale_shapley(&relaxed, ProposingSide::Residents);
    if inst.deficient_hospitals(&m).is_empty() {
        Some(m)
    } else {
        None
    }
}

/// Convenience used by tests: matchings agree on the matched-resident set
/// and per-hospital fill counts (the rural-hospitals invariant).
pub fn same_fill_profile(a: &Matching, b: &Matching) -> bool {
    if a.n_residents() != b.n_residents() || a.n_hospitals() != b.n_hospitals() {
        return false;
    }
    let matched = |m: &Matching| {
        (0..m.n_residents())
            .filter(|&r| m.assignment(r).is_some())
            .collect::<Vec<_>>()
    };
    if matched(a) != matched(b) {
        return false;
    }
    (0..a.n_hospitals()).all(|h| a.load(h) == b.load(h))
}
