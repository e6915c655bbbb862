//! Reductions from instances with lower quotas to plain instances whose
//! stable matchings project back to popular feasible matchings.
//!
//! Both reductions clone every hospital into `ell` level copies and pad
//! the copies with dummy residents so that a stable matching in the
//! reduced instance encodes how far each resident was pushed up the
//! levels. They differ only in where the capacity profile switches from
//! the upper to the lower quota:
//!
//! * max-popular kind: `ell = 2 + sum of lower quotas`, copies at levels
//!   0 and 1 carry the upper quota, higher copies the lower quota. The
//!   projected matching has maximum cardinality among matchings popular
//!   within the feasible set.
//! * popular-max kind: `ell = |R| + sum of lower quotas`, copies at
//!   levels `0..|R|` carry the upper quota. The projected matching is
//!   popular among the maximum-cardinality feasible matchings.
//!
//! Copies are named `<h>#<s>` and dummies `<h>!<s>!<i>`; parsing rejects
//! source ids containing the reserved characters, so the names never
//! collide.

use thiserror::Error;

use crate::hr::{gale_shapley, ProposingSide};
use crate::instance::{
    check_feasibility, FeasibilityEvidence, HrInstance, HrlqInstance, Matching, MatchingError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionKind {
    /// Maximum-cardinality matching popular among all feasible matchings.
    MaxPopular,
    /// Matching popular among maximum-cardinality feasible matchings.
    PopularMax,
}

/// Where a reduced resident comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidentOrigin {
    Source(usize),
    /// `index` is 1-based within the hospital's level-`level` dummy set.
    Dummy {
        hospital: usize,
        level: usize,
        index: usize,
    },
}

/// A constructed reduction: the plain instance plus the bookkeeping that
/// relates its vertices back to the source instance.
#[derive(Debug, Clone)]
pub struct ReducedInstance {
    pub hr: HrInstance,
    pub ell: usize,
    pub kind: ReductionKind,
    n_source_residents: usize,
    n_source_hospitals: usize,
    origins: Vec<ResidentOrigin>,
}

impl ReducedInstance {
    pub fn n_source_residents(&self) -> usize {
        self.n_source_residents
    }

    pub fn n_source_hospitals(&self) -> usize {
        self.n_source_hospitals
    }

    /// Reduced index of the level-`s` copy of source hospital `h`.
    pub fn copy_index(&self, h: usize, s: usize) -> usize {
        h * self.ell + s
    }

    /// Source hospital and level of a reduced hospital.
    pub fn copy_source(&self, reduced_h: usize) -> (usize, usize) {
        (reduced_h / self.ell, reduced_h % self.ell)
    }

    pub fn origin(&self, reduced_r: usize) -> ResidentOrigin {
        self.origins[reduced_r]
    }

    pub fn is_dummy(&self, reduced_r: usize) -> bool {
        matches!(self.origins[reduced_r], ResidentOrigin::Dummy { .. })
    }

    /// First level whose copies carry the lower quota.
    pub fn level_threshold(&self) -> usize {
        match self.kind {
            ReductionKind::MaxPopular => 2,
            ReductionKind::PopularMax => self.n_source_residents,
        }
    }
}

/// Builds the reduction for the max-popular objective.
pub fn build_g_prime(inst: &HrlqInstance) -> ReducedInstance {
    build(inst, ReductionKind::MaxPopular)
}

/// Builds the reduction for the popular-max objective.
pub fn build_g_double_prime(inst: &HrlqInstance) -> ReducedInstance {
    build(inst, ReductionKind::PopularMax)
}

fn build(inst: &HrlqInstance, kind: ReductionKind) -> ReducedInstance {
    let nr = inst.n_residents();
    let nh = inst.n_hospitals();
    let threshold = match kind {
        ReductionKind::MaxPopular => 2,
        ReductionKind::PopularMax => nr,
    };
    let ell = threshold + inst.total_lower();
    let cap_at = |h: usize, s: usize| {
        if s < threshold {
            inst.upper(h)
        } else {
            inst.lower(h)
        }
    };
    // Dummy sets exist at levels 0..=ell-2, one per capacity unit of the
    // same level's copy.
    let dummy_levels = ell.saturating_sub(1);

    let mut residents: Vec<String> = (0..nr).map(|r| inst.resident_name(r).to_string()).collect();
    let mut origins: Vec<ResidentOrigin> = (0..nr).map(ResidentOrigin::Source).collect();
    let mut dummy_base = vec![Vec::with_capacity(dummy_levels); nh];
    for h in 0..nh {
        for s in 0..dummy_levels {
            dummy_base[h].push(residents.len());
            for i in 1..=cap_at(h, s) {
                residents.push(format!("{}!{}!{}", inst.hospital_name(h), s, i));
                origins.push(ResidentOrigin::Dummy {
                    hospital: h,
                    level: s,
                    index: i,
                });
            }
        }
    }
    let dummy_id = |h: usize, s: usize, i: usize| dummy_base[h][s] + i - 1;

    let mut hospitals = Vec::with_capacity(nh * ell);
    for h in 0..nh {
        for s in 0..ell {
            hospitals.push((format!("{}#{}", inst.hospital_name(h), s), cap_at(h, s)));
        }
    }

    let mut resident_prefs: Vec<Vec<usize>> = Vec::with_capacity(residents.len());
    for r in 0..nr {
        let mut list = Vec::with_capacity(inst.resident_prefs(r).len() * ell);
        for s in (0..ell).rev() {
            for &h in inst.resident_prefs(r) {
                list.push(h * ell + s);
            }
        }
        resident_prefs.push(list);
    }
    for h in 0..nh {
        for s in 0..dummy_levels {
            let size = cap_at(h, s);
            // Only the last cap(h, s+1) dummies of a level continue to the
            // next copy; at the capacity switch this leaves upper-minus-lower
            // dummies with a single-entry list, which is exactly the slack
            // that caps the number of true residents a hospital can absorb.
            let keep = cap_at(h, s + 1);
            for i in 1..=size {
                let mut list = vec![h * ell + s];
                if i + keep > size {
                    list.push(h * ell + s + 1);
                }
                resident_prefs.push(list);
            }
        }
    }

    let mut hospital_prefs: Vec<Vec<usize>> = Vec::with_capacity(nh * ell);
    for h in 0..nh {
        for s in 0..ell {
            let cap = cap_at(h, s);
            let mut list = Vec::new();
            if s >= 1 {
                // Head: the last cap(h, s) dummies of the previous level,
                // mirroring the dummies' own continuation rule.
                let prev_size = cap_at(h, s - 1);
                for i in (prev_size - cap + 1)..=prev_size {
                    list.push(dummy_id(h, s - 1, i));
                }
            }
            for &r in inst.hospital_prefs(h) {
                list.push(r);
            }
            if s + 2 <= ell {
                for i in 1..=cap {
                    list.push(dummy_id(h, s, i));
                }
            }
            hospital_prefs.push(list);
        }
    }

    if kind == ReductionKind::MaxPopular {
        // Closed forms for the per-hospital copy capacity and dummy totals;
        // the dummy total only telescopes once level 1 is a dummy level.
        for h in 0..nh {
            let cap_total: usize = (0..ell).map(|s| cap_at(h, s)).sum();
            assert_eq!(
                cap_total,
                2 * inst.upper(h) + (ell - 2) * inst.lower(h),
                "copy capacity total diverges from its closed form"
            );
            if ell >= 3 {
                let dummy_total: usize = (0..dummy_levels).map(|s| cap_at(h, s)).sum();
                assert_eq!(
                    dummy_total,
                    2 * inst.upper(h) + (ell - 3) * inst.lower(h),
                    "dummy total diverges from its closed form"
                );
            }
        }
    }

    let hr = HrInstance::from_parts(residents, hospitals, resident_prefs, hospital_prefs)
        .expect("reductions construct valid instances");
    ReducedInstance {
        hr,
        ell,
        kind,
        n_source_residents: nr,
        n_source_hospitals: nh,
        origins,
    }
}

/// Projects a reduced matching back to the source instance: dummies are
/// dropped and every true resident keeps the source hospital of its
/// matched copy. The projection respects upper quotas whenever the input
/// is stable in the reduced instance.
pub fn map_back(red: &ReducedInstance, m_reduced: &Matching) -> Result<Matching, MatchingError> {
    red.hr.validate_matching(m_reduced)?;
    let mut pairs = Vec::new();
    for rr in 0..red.n_source_residents {
        if let Some(copy) = m_reduced.assignment(rr) {
            pairs.push((rr, red.copy_source(copy).0));
        }
    }
    Matching::from_pairs(red.n_source_residents, red.n_source_hospitals, &pairs)
}

/// Level assignment induced by a reduced matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelStructure {
    /// Per source resident; unmatched residents sit at level 0.
    pub resident_level: Vec<usize>,
    /// Per source hospital: the sorted levels of copies holding a true
    /// resident, or the conventional level when no copy holds one
    /// (lower-quota hospitals default to the top level, others to the
    /// last upper-quota level).
    pub hospital_levels: Vec<Vec<usize>>,
}

pub fn classify_levels(red: &ReducedInstance, m_reduced: &Matching) -> LevelStructure {
    let mut resident_level = vec![0usize; red.n_source_residents];
    let mut hospital_levels: Vec<Vec<usize>> = vec![Vec::new(); red.n_source_hospitals];
    for rr in 0..red.n_source_residents {
        if let Some(copy) = m_reduced.assignment(rr) {
            let (h, s) = red.copy_source(copy);
            resident_level[rr] = s;
            if !hospital_levels[h].contains(&s) {
                hospital_levels[h].push(s);
            }
        }
    }
    let inactive_default = |h: usize| -> usize {
        let lower_quota_positive = {
            // Copies at or above the threshold carry the lower quota.
            let t = red.level_threshold();
            t < red.ell && red.hr.capacity(red.copy_index(h, t)) > 0
        };
        if lower_quota_positive {
            red.ell - 1
        } else {
            match red.kind {
                ReductionKind::MaxPopular => 1,
                ReductionKind::PopularMax => red.n_source_residents.saturating_sub(1),
            }
        }
    };
    for (h, levels) in hospital_levels.iter_mut().enumerate() {
        if levels.is_empty() {
            levels.push(inactive_default(h));
        } else {
            levels.sort_unstable();
        }
    }
    LevelStructure {
        resident_level,
        hospital_levels,
    }
}

/// Outcome of one structural clause check.
#[derive(Debug, Clone)]
pub struct ClauseCheck {
    pub clause: &'static str,
    pub description: &'static str,
    pub passed: bool,
    /// First violation found, if any.
    pub witness: Option<String>,
}

#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub clauses: Vec<ClauseCheck>,
}

impl InvariantReport {
    pub fn all_passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.clauses {
            out.push_str(&format!(
                "{} {} — {}{}\n",
                if c.passed { "pass" } else { "FAIL" },
                c.clause,
                c.description,
                c.witness
                    .as_deref()
                    .map(|w| format!(" ({w})"))
                    .unwrap_or_default()
            ));
        }
        out
    }
}

/// Checks the structural properties every stable matching of a reduced
/// instance satisfies. Each clause reports independently, with a witness
/// on failure, so corrupted matchings are diagnosable.
pub fn check_reduced_invariants(
    red: &ReducedInstance,
    m_reduced: &Matching,
) -> Result<InvariantReport, MatchingError> {
    red.hr.validate_matching(m_reduced)?;
    let nh = red.n_source_hospitals;
    let ell = red.ell;
    let hr = &red.hr;

    // Per source hospital and level: occupants split into true residents
    // and own dummies (other hospitals' dummies cannot appear: no edges).
    let mut true_count = vec![vec![0usize; ell]; nh];
    let mut dummy_levels_held: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); ell]; nh];
    for copy in 0..hr.n_hospitals() {
        let (h, s) = red.copy_source(copy);
        for &rr in m_reduced.residents_of(copy) {
            match red.origin(rr) {
                ResidentOrigin::Source(_) => true_count[h][s] += 1,
                ResidentOrigin::Dummy { level, .. } => dummy_levels_held[h][s].push(level),
            }
        }
    }
    let active = |h: usize, s: usize| true_count[h][s] > 0;
    let name = |h: usize, s: usize| hr.hospital_name(red.copy_index(h, s)).to_string();

    let mut clauses = Vec::new();
    let mut push = |clause: &'static str, description: &'static str, witness: Option<String>| {
        clauses.push(ClauseCheck {
            clause,
            description,
            passed: witness.is_none(),
            witness,
        });
    };

    // Clause 1: across all copies, a hospital holds at most its upper
    // quota in true residents.
    let mut witness = None;
    for h in 0..nh {
        let total: usize = true_count[h].iter().sum();
        let cap0 = hr.capacity(red.copy_index(h, 0));
        if total > cap0 {
            witness = Some(format!(
                "{} holds {} true residents across copies, above {}",
                name(h, 0),
                total,
                cap0
            ));
            break;
        }
    }
    push("1", "true residents per hospital within upper quota", witness);

    // Clause 2: every copy below the top level is filled to capacity.
    let mut witness = None;
    'outer2: for h in 0..nh {
        for s in 0..ell.saturating_sub(1) {
            let copy = red.copy_index(h, s);
            if m_reduced.load(copy) != hr.capacity(copy) {
                witness = Some(format!(
                    "{} holds {}/{}",
                    name(h, s),
                    m_reduced.load(copy),
                    hr.capacity(copy)
                ));
                break 'outer2;
            }
        }
    }
    push("2", "only top-level copies undersubscribed", witness);

    // Clause 3a: below an active copy, the previous copy holds one of its
    // own-level dummies.
    let mut witness = None;
    'outer3a: for h in 0..nh {
        for s in 1..ell {
            if active(h, s) && !dummy_levels_held[h][s - 1].contains(&(s - 1)) {
                witness = Some(format!(
                    "{} active but {} holds no level-{} dummy",
                    name(h, s),
                    name(h, s - 1),
                    s - 1
                ));
                break 'outer3a;
            }
        }
    }
    push("3a", "copy below an active copy holds an own-level dummy", witness);

    // Clause 3b: copies two or more below an active copy are inactive and
    // fully packed with their own level's dummies.
    let mut witness = None;
    'outer3b: for h in 0..nh {
        for s in 0..ell {
            if !active(h, s) {
                continue;
            }
            for j in 0..s.saturating_sub(1) {
                let copy = red.copy_index(h, j);
                let ok = !active(h, j)
                    && m_reduced.load(copy) == hr.capacity(copy)
                    && dummy_levels_held[h][j].iter().all(|&l| l == j);
                if !ok {
                    witness = Some(format!(
                        "{} active but {} is not packed with level-{} dummies",
                        name(h, s),
                        name(h, j),
                        j
                    ));
                    break 'outer3b;
                }
            }
        }
    }
    push("3b", "copies far below an active copy packed with own dummies", witness);

    // Clause 3c: copies two or more above an active copy are inactive and
    // hold only previous-level dummies (the top copy may be short).
    let mut witness = None;
    'outer3c: for h in 0..nh {
        for s in 0..ell {
            if !active(h, s) {
                continue;
            }
            for j in (s + 2)..ell {
                let ok = !active(h, j) && dummy_levels_held[h][j].iter().all(|&l| l + 1 == j);
                if !ok {
                    witness = Some(format!(
                        "{} active but {} holds residents other than level-{} dummies",
                        name(h, s),
                        name(h, j),
                        j - 1
                    ));
                    break 'outer3c;
                }
            }
        }
    }
    push("3c", "copies far above an active copy hold only spill-over dummies", witness);

    // Clause 4: at most two active copies per hospital, at consecutive levels.
    let mut witness = None;
    for h in 0..nh {
        let levels: Vec<usize> = (0..ell).filter(|&s| active(h, s)).collect();
        let ok = match levels.as_slice() {
            [] | [_] => true,
            [a, b] => a + 1 == *b,
            _ => false,
        };
        if !ok {
            witness = Some(format!(
                "{} active at levels {:?}",
                hr.hospital_name(red.copy_index(h, 0)),
                levels
            ));
            break;
        }
    }
    push("4", "at most two consecutive active levels per hospital", witness);

    // Clause 5: a resident matched at level s sees no hospital in its
    // source list active at level s+2 or higher.
    let mut witness = None;
    'outer5: for rr in 0..red.n_source_residents {
        let Some(copy) = m_reduced.assignment(rr) else {
            continue;
        };
        let s = red.copy_source(copy).1;
        // Source preference list: recover from the reduced list's last
        // block (level 0), which is the source list in order.
        for &copy_h in red.hr.resident_prefs(rr) {
            let (h, level) = red.copy_source(copy_h);
            if level >= s + 2 && active(h, level) {
                witness = Some(format!(
                    "{} matched at level {} but {} is active",
                    hr.resident_name(rr),
                    s,
                    name(h, level)
                ));
                break 'outer5;
            }
        }
    }
    push("5", "no resident sees a hospital active two levels above", witness);

    Ok(InvariantReport { clauses })
}

/// Raised by the solvers when no feasible matching exists.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error(
    "no feasible matching: lower-quota demand {} but at most {} assignable",
    evidence.required,
    evidence.achievable
)]
pub struct InfeasibleError {
    pub evidence: FeasibilityEvidence,
}

/// Maximum-cardinality matching popular among all feasible matchings:
/// build the max-popular reduction, take its stable matching, project.
pub fn solve_max_popular(inst: &HrlqInstance) -> Result<Matching, InfeasibleError> {
    solve(inst, ReductionKind::MaxPopular)
}

/// Matching popular among all maximum-cardinality feasible matchings.
pub fn solve_popular_max(inst: &HrlqInstance) -> Result<Matching, InfeasibleError> {
    solve(inst, ReductionKind::PopularMax)
}

fn solve(inst: &HrlqInstance, kind: ReductionKind) -> Result<Matching, InfeasibleError> {
    let evidence = check_feasibility(inst);
    if !evidence.feasible() {
        return Err(InfeasibleError { evidence });
    }
    let red = build(inst, kind);
    let m_reduced = gale_shapley(&red.hr, ProposingSide::Residents);
    Ok(map_back(&red, &m_reduced).expect("stable reduced matchings project cleanly"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_hrlq;
    use crate::hr::{check_stable_feasible, gale_shapley, ProposingSide};

    const SECTION_ONE: &str = "\
HRLQ
resident r
hospital h1 0 1
hospital h2 1 1
pref r : h1 h2
pref h1 : r
pref h2 : r
";

    fn named_prefs_r(hr: &HrInstance, r: &str) -> Vec<String> {
        let idx = hr.resident_index(r).unwrap();
        hr.resident_prefs(idx)
            .iter()
            .map(|&h| hr.hospital_name(h).to_string())
            .collect()
    }

    fn named_prefs_h(hr: &HrInstance, h: &str) -> Vec<String> {
        let idx = hr.hospital_index(h).unwrap();
        hr.hospital_prefs(idx)
            .iter()
            .map(|&r| hr.resident_name(r).to_string())
            .collect()
    }

    #[test]
    fn g_prime_of_section_one_matches_hand_construction() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let red = build_g_prime(&inst);
        assert_eq!(red.ell, 3);
        let hr = &red.hr;
        assert_eq!(hr.n_hospitals(), 6);
        // Four dummies: one per hospital per level in {0, 1}.
        assert_eq!(hr.n_residents(), 1 + 4);

        let cap = |name: &str| hr.capacity(hr.hospital_index(name).unwrap());
        assert_eq!(cap("h1#0"), 1);
        assert_eq!(cap("h1#1"), 1);
        assert_eq!(cap("h1#2"), 0);
        assert_eq!(cap("h2#0"), 1);
        assert_eq!(cap("h2#1"), 1);
        assert_eq!(cap("h2#2"), 1);

        assert_eq!(
            named_prefs_r(hr, "r"),
            ["h1#2", "h2#2", "h1#1", "h2#1", "h1#0", "h2#0"]
        );
        assert_eq!(named_prefs_h(hr, "h1#0"), ["r", "h1!0!1"]);
        assert_eq!(named_prefs_h(hr, "h1#1"), ["h1!0!1", "r", "h1!1!1"]);
        assert_eq!(named_prefs_h(hr, "h1#2"), ["r"]);
        assert_eq!(named_prefs_h(hr, "h2#2"), ["h2!1!1", "r"]);
        assert_eq!(named_prefs_r(hr, "h1!0!1"), ["h1#0", "h1#1"]);
        // The upper-minus-lower slack dummy stops at level 1.
        assert_eq!(named_prefs_r(hr, "h1!1!1"), ["h1#1"]);
        assert_eq!(named_prefs_r(hr, "h2!1!1"), ["h2#1", "h2#2"]);
    }

    #[test]
    fn g_double_prime_of_section_one_has_two_levels() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let red = build_g_double_prime(&inst);
        assert_eq!(red.ell, 2);
        let hr = &red.hr;
        let cap = |name: &str| hr.capacity(hr.hospital_index(name).unwrap());
        assert_eq!(cap("h1#0"), 1);
        assert_eq!(cap("h1#1"), 0);
        assert_eq!(cap("h2#0"), 1);
        assert_eq!(cap("h2#1"), 1);
        assert_eq!(named_prefs_r(hr, "r"), ["h1#1", "h2#1", "h1#0", "h2#0"]);
        assert_eq!(named_prefs_h(hr, "h2#1"), ["h2!0!1", "r"]);
        assert_eq!(named_prefs_r(hr, "h1!0!1"), ["h1#0"]);
        assert_eq!(named_prefs_r(hr, "h2!0!1"), ["h2#0", "h2#1"]);
    }

    #[test]
    fn dummy_counts_follow_the_constructed_sets() {
        // Three residents, two hospitals with quotas (1, 2): the popular-max
        // reduction has ell = 5 and 3*2 + 1*1 = 7 dummies per hospital.
        let inst = parse_hrlq(
            "HRLQ\nresident a\nresident b\nresident c\n\
             hospital h1 1 2\nhospital h2 1 2\n\
             pref a : h1 h2\npref b : h1 h2\npref c : h2 h1\n\
             pref h1 : a b c\npref h2 : c a b\n",
        )
        .unwrap();
        let red = build_g_double_prime(&inst);
        assert_eq!(red.ell, 5);
        for h in 0..2 {
            let dummies = (0..red.hr.n_residents())
                .filter(|&rr| matches!(red.origin(rr), ResidentOrigin::Dummy { hospital, .. } if hospital == h))
                .count();
            assert_eq!(dummies, 7);
        }
    }

    #[test]
    fn zero_lower_quota_reduction_is_two_levels() {
        let inst = parse_hrlq(
            "HRLQ\nresident a\nhospital h 0 2\npref a : h\npref h : a\n",
        )
        .unwrap();
        let red = build_g_prime(&inst);
        assert_eq!(red.ell, 2);
        let hr = &red.hr;
        assert_eq!(named_prefs_h(hr, "h#0"), ["a", "h!0!1", "h!0!2"]);
        assert_eq!(named_prefs_h(hr, "h#1"), ["h!0!1", "h!0!2", "a"]);
        assert_eq!(named_prefs_r(hr, "h!0!1"), ["h#0", "h#1"]);
    }

    #[test]
    fn single_resident_popular_max_degenerates_to_relaxation() {
        let inst = parse_hrlq(
            "HRLQ\nresident a\nhospital h 0 2\npref a : h\npref h : a\n",
        )
        .unwrap();
        let red = build_g_double_prime(&inst);
        assert_eq!(red.ell, 1);
        assert_eq!(red.hr.n_residents(), 1);
        assert_eq!(named_prefs_h(&red.hr, "h#0"), ["a"]);
    }

    #[test]
    fn both_solvers_recover_the_unique_feasible_matching() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let expected = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        assert_eq!(solve_max_popular(&inst).unwrap(), expected);
        assert_eq!(solve_popular_max(&inst).unwrap(), expected);
    }

    #[test]
    fn copy_capacity_totals_match_the_closed_form() {
        let inst = parse_hrlq(
            "HRLQ\nresident a\nresident b\nhospital h1 1 3\nhospital h2 2 2\n\
             pref a : h1 h2\npref b : h2 h1\npref h1 : a b\npref h2 : b a\n",
        )
        .unwrap();
        let red = build_g_prime(&inst);
        assert_eq!(red.ell, 5);
        for (h, upper, lower) in [(0usize, 3usize, 1usize), (1, 2, 2)] {
            let total: usize = (0..red.ell)
                .map(|s| red.hr.capacity(red.copy_index(h, s)))
                .sum();
            assert_eq!(total, 2 * upper + (red.ell - 2) * lower);
        }
    }

    #[test]
    fn without_lower_quotas_a_perfect_stable_matching_is_returned() {
        // Aligned preferences: the unique stable matching matches everyone,
        // so it is also the maximum-cardinality popular matching.
        let inst = parse_hrlq(
            "HRLQ\nresident a\nresident b\nhospital h1 0 1\nhospital h2 0 1\n\
             pref a : h1 h2\npref b : h2 h1\npref h1 : a b\npref h2 : b a\n",
        )
        .unwrap();
        let stable = check_stable_feasible(&inst).unwrap();
        assert_eq!(stable.size(), 2);
        assert_eq!(solve_max_popular(&inst).unwrap(), stable);
    }

    #[test]
    fn equal_size_universe_makes_both_objectives_agree() {
        // Every feasible matching assigns both residents, so popularity
        // among maximum matchings coincides with popularity overall.
        let inst = parse_hrlq(
            "HRLQ\nresident a\nresident b\nhospital h 2 2\n\
             pref a : h\npref b : h\npref h : a b\n",
        )
        .unwrap();
        let b = solve_popular_max(&inst).unwrap();
        let cert = crate::popularity::certify_popular(
            &inst,
            &b,
            crate::popularity::UniverseKind::AllFeasible,
            crate::popularity::DEFAULT_ENUM_LIMIT,
        )
        .unwrap();
        assert!(matches!(
            cert,
            crate::popularity::CertifyOutcome::Popular { .. }
        ));
    }

    #[test]
    fn infeasible_instances_report_evidence() {
        let inst = parse_hrlq(
            "HRLQ\nresident a\nhospital h1 1 1\nhospital h2 1 1\n\
             pref a : h1 h2\npref h1 : a\npref h2 : a\n",
        )
        .unwrap();
        let err = solve_max_popular(&inst).unwrap_err();
        assert_eq!(err.evidence.required, 2);
        assert_eq!(err.evidence.achievable, 1);
    }

    #[test]
    fn map_back_of_empty_matching_is_empty() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let red = build_g_prime(&inst);
        let empty = Matching::empty(red.hr.n_residents(), red.hr.n_hospitals());
        assert_eq!(map_back(&red, &empty).unwrap().size(), 0);
    }

    #[test]
    fn classify_levels_on_section_one() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let red = build_g_prime(&inst);
        let m = gale_shapley(&red.hr, ProposingSide::Residents);
        let levels = classify_levels(&red, &m);
        // r lands on the top copy of h2; h1 is inactive with zero lower
        // quota, so it sits at the conventional level 1.
        assert_eq!(levels.resident_level, vec![2]);
        assert_eq!(levels.hospital_levels, vec![vec![1], vec![2]]);
    }

    #[test]
    fn invariants_pass_on_stable_matchings_of_section_one() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        for red in [build_g_prime(&inst), build_g_double_prime(&inst)] {
            let m = gale_shapley(&red.hr, ProposingSide::Residents);
            let report = check_reduced_invariants(&red, &m).unwrap();
            assert!(report.all_passed(), "{}", report.render());
        }
    }

    #[test]
    fn corrupted_matching_fails_with_witness() {
        // Two residents competing for one seat with a lower quota of one.
        let inst = parse_hrlq(
            "HRLQ\nresident r1\nresident r2\nhospital h1 1 1\n\
             pref r1 : h1\npref r2 : h1\npref h1 : r1 r2\n",
        )
        .unwrap();
        let red = build_g_prime(&inst);
        let hr = &red.hr;
        let stable = gale_shapley(hr, ProposingSide::Residents);
        assert!(check_reduced_invariants(&red, &stable)
            .unwrap()
            .all_passed());

        // Swap the spill-over dummy on the top copy for the losing true
        // resident: h1 becomes active at levels 0 and 2 at once.
        let id = |name: &str| hr.resident_index(name).unwrap();
        let copy = |name: &str| hr.hospital_index(name).unwrap();
        let corrupted = Matching::from_pairs(
            hr.n_residents(),
            hr.n_hospitals(),
            &[
                (id("r1"), copy("h1#0")),
                (id("h1!0!1"), copy("h1#1")),
                (id("r2"), copy("h1#2")),
            ],
        )
        .unwrap();
        let report = check_reduced_invariants(&red, &corrupted).unwrap();
        assert!(!report.all_passed());
        let failed: Vec<&str> = report
            .clauses
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.clause)
            .collect();
        assert!(failed.contains(&"4"), "failed clauses: {failed:?}");
        assert!(report
            .clauses
            .iter()
            .filter(|c| !c.passed)
            .all(|c| c.witness.is_some()));
    }
}
