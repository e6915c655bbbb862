//! Voting machinery for comparing two matchings, the symmetric-difference
//! decomposition, and brute-force certification of popularity claims on
//! small instances.
//!
//! A resident votes by comparing its two partners (being unmatched loses
//! to any neighbor). A hospital casts one vote per position: positions
//! holding the same resident in both matchings abstain, and the remainder
//! are compared through a pairing (the corr function) between the
//! residents the hospital gains and loses. Policies fix that pairing:
//! by preference order, adversarially against a chosen matching, or via
//! an explicit table.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::flow::FlowNetwork;
use crate::format::render_matching_compact;
use crate::instance::{check_feasibility, HrlqInstance, Matching, MatchingError};
use crate::reduction::InfeasibleError;

/// Default cap on enumeration-backed operations.
pub const DEFAULT_ENUM_LIMIT: usize = 1_000_000;

/// A pairing entry at one hospital position: the resident held in the
/// first compared matching and in the second, `None` for an empty seat.
pub type CorrPair = (Option<usize>, Option<usize>);

#[derive(Debug, Clone)]
pub enum CorrPolicy {
    /// Pair both difference sets in the hospital's preference order,
    /// padding the shorter side with empty seats.
    PreferenceOrder,
    /// Pair so that the given matching receives as few position votes as
    /// possible; the strictest reading for certifying that matching.
    Adversarial { against: Matching },
    /// Caller-supplied pairings, validated per hospital.
    Explicit {
        table: BTreeMap<usize, Vec<CorrPair>>,
    },
}

impl CorrPolicy {
    pub fn adversarial_against(m: &Matching) -> Self {
        CorrPolicy::Adversarial { against: m.clone() }
    }
}

#[derive(Debug, Error)]
pub enum VoteError {
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("adversarial target equals neither compared matching")]
    AdversarialTarget,
    #[error("pairing for hospital {hospital}: {reason}")]
    BadPairing { hospital: usize, reason: String },
}

/// Tallies of a pairwise comparison, plus the labels induced on the
/// second matching's own edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoteOutcome {
    /// Votes strictly preferring the first matching.
    pub delta_for: usize,
    /// Votes strictly preferring the second matching.
    pub delta_against: usize,
    /// Label (a, b) per edge (r, h) of the second matching outside the
    /// first, oriented toward the edge itself: a = +1 when r prefers h
    /// over its first-matching partner, b = +1 when the hospital prefers
    /// r over the corr partner it holds in the first matching. A
    /// (-1, -1) edge is one both voters would abandon for the first
    /// matching; a (1, 1) edge is one both voted to keep.
    pub edge_labels: BTreeMap<(usize, usize), (i8, i8)>,
}

fn resident_vote(
    inst: &HrlqInstance,
    r: usize,
    x: Option<usize>,
    y: Option<usize>,
) -> i8 {
    match (x, y) {
        (None, None) => 0,
        (Some(_), None) => 1,
        (None, Some(_)) => -1,
        (Some(a), Some(b)) => {
            if a == b {
                0
            } else {
                let ra = inst.resident_rank(r, a).expect("matching edge");
                let rb = inst.resident_rank(r, b).expect("matching edge");
                if ra < rb {
                    1
                } else {
                    -1
                }
            }
        }
    }
}

/// Residents a hospital holds in `m` but not in `n`, sorted by the
/// hospital's preference.
fn difference(inst: &HrlqInstance, h: usize, m: &Matching, n: &Matching) -> Vec<usize> {
    let mut out: Vec<usize> = m
        .residents_of(h)
        .iter()
        .copied()
        .filter(|&r| n.assignment(r) != Some(h))
        .collect();
    out.sort_by_key(|&r| inst.hospital_rank(h, r).expect("matching edge"));
    out
}

/// Maximum bipartite matching by augmenting paths; `adj` is indexed by
/// left vertex. Returns the right partner of each left vertex.
fn kuhn(adj: &[Vec<usize>], n_right: usize) -> Vec<Option<usize>> {
    fn try_augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        right_to_left: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if right_to_left[v].is_none()
                || try_augment(right_to_left[v].unwrap(), adj, seen, right_to_left)
            {
                right_to_left[v] = Some(u);
                return true;
            }
        }
        false
    }

    let mut right_to_left = vec![None; n_right];
    for u in 0..adj.len() {
        let mut seen = vec![false; n_right];
        try_augment(u, adj, &mut seen, &mut right_to_left);
    }
    let mut left_to_right = vec![None; adj.len()];
    for (v, u) in right_to_left.iter().enumerate() {
        if let Some(u) = *u {
            left_to_right[u] = Some(v);
        }
    }
    left_to_right
}

/// Pairs `first` against `second` minimizing the positions won by
/// `first`: a maximum matching on the pairs the other side wins, filled
/// up deterministically.
fn min_wins_pairing(
    inst: &HrlqInstance,
    h: usize,
    first: &[usize],
    second: &[usize],
) -> Vec<(Option<usize>, Option<usize>)> {
    let rank = |r: usize| inst.hospital_rank(h, r).expect("matching edge");
    let adj: Vec<Vec<usize>> = first
        .iter()
        .map(|&a| {
            second
                .iter()
                .enumerate()
                .filter(|&(_, &b)| rank(b) < rank(a))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let partner = kuhn(&adj, second.len());

    let mut used_second = vec![false; second.len()];
    let mut pairs = Vec::new();
    let mut leftover_first = Vec::new();
    for (i, &a) in first.iter().enumerate() {
        match partner[i] {
            Some(j) => {
                used_second[j] = true;
                pairs.push((Some(a), Some(second[j])));
            }
            None => leftover_first.push(a),
        }
    }
    let mut leftover_second: Vec<usize> = second
        .iter()
        .enumerate()
        .filter(|&(j, _)| !used_second[j])
        .map(|(_, &b)| b)
        .collect();
    // Remaining elements pair positionally; every such pair is a win for
    // `first`, which is unavoidable once the matching above is maximum.
    leftover_second.reverse();
    for a in leftover_first {
        pairs.push((Some(a), leftover_second.pop()));
    }
    for b in leftover_second.into_iter().rev() {
        pairs.push((None, Some(b)));
    }
    pairs
}

fn preference_order_pairing(
    a: &[usize],
    b: &[usize],
) -> Vec<(Option<usize>, Option<usize>)> {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| (a.get(i).copied(), b.get(i).copied()))
        .collect()
}

/// The pairing each hospital uses to compare `m` against `n` under
/// `policy`, indexed by hospital. Hospitals with no gained or lost
/// residents get an empty list.
pub fn corr_pairings(
    inst: &HrlqInstance,
    m: &Matching,
    n: &Matching,
    policy: &CorrPolicy,
) -> Result<Vec<Vec<CorrPair>>, VoteError> {
    inst.validate_matching(m)?;
    inst.validate_matching(n)?;
    let mut all = Vec::with_capacity(inst.n_hospitals());
    for h in 0..inst.n_hospitals() {
        let a = difference(inst, h, m, n);
        let b = difference(inst, h, n, m);
        let pairs = match policy {
            CorrPolicy::PreferenceOrder => preference_order_pairing(&a, &b),
            CorrPolicy::Adversarial { against } => {
                if against == m {
                    min_wins_pairing(inst, h, &a, &b)
                } else if against == n {
                    min_wins_pairing(inst, h, &b, &a)
                        .into_iter()
                        .map(|(x, y)| (y, x))
                        .collect()
                } else {
                    return Err(VoteError::AdversarialTarget);
                }
            }
            CorrPolicy::Explicit { table } => {
                let entry = table.get(&h).cloned().unwrap_or_default();
                validate_explicit(h, &a, &b, &entry)?;
                entry
            }
        };
        all.push(pairs);
    }
    Ok(all)
}

fn validate_explicit(
    h: usize,
    a: &[usize],
    b: &[usize],
    pairs: &[CorrPair],
) -> Result<(), VoteError> {
    let err = |reason: String| VoteError::BadPairing {
        hospital: h,
        reason,
    };
    let mut seen_a = Vec::new();
    let mut seen_b = Vec::new();
    let mut complete = 0usize;
    for &(x, y) in pairs {
        match (x, y) {
            (None, None) => return Err(err("empty pair".into())),
            (Some(_), Some(_)) => complete += 1,
            _ => {}
        }
        if let Some(x) = x {
            if !a.contains(&x) || seen_a.contains(&x) {
                return Err(err(format!("resident {x} is not a fresh gain")));
            }
            seen_a.push(x);
        }
        if let Some(y) = y {
            if !b.contains(&y) || seen_b.contains(&y) {
                return Err(err(format!("resident {y} is not a fresh loss")));
            }
            seen_b.push(y);
        }
    }
    if seen_a.len() != a.len() || seen_b.len() != b.len() {
        return Err(err("pairing does not cover both difference sets".into()));
    }
    if complete != a.len().min(b.len()) {
        return Err(err(
            "pairing is not a bijection onto the smaller side".into(),
        ));
    }
    Ok(())
}

/// Position votes cast at hospital `h` for the given pairing:
/// `(for the first matching, for the second)`.
pub fn position_votes(
    inst: &HrlqInstance,
    h: usize,
    pairs: &[CorrPair],
) -> (usize, usize) {
    let rank = |r: usize| inst.hospital_rank(h, r).expect("matching edge");
    let mut for_first = 0;
    let mut for_second = 0;
    for &(x, y) in pairs {
        match (x, y) {
            (Some(_), None) => for_first += 1,
            (None, Some(_)) => for_second += 1,
            (Some(a), Some(b)) => {
                if rank(a) < rank(b) {
                    for_first += 1;
                } else {
                    for_second += 1;
                }
            }
            (None, None) => {}
        }
    }
    (for_first, for_second)
}

/// Compares `m` against `n` under `policy`. `delta_for` counts voters
/// strictly preferring `m`, `delta_against` those preferring `n`.
pub fn vote(
    inst: &HrlqInstance,
    m: &Matching,
    n: &Matching,
    policy: &CorrPolicy,
) -> Result<VoteOutcome, VoteError> {
    let pairings = corr_pairings(inst, m, n, policy)?;
    let mut delta_for = 0;
    let mut delta_against = 0;
    for r in 0..inst.n_residents() {
        match resident_vote(inst, r, m.assignment(r), n.assignment(r)) {
            1 => delta_for += 1,
            -1 => delta_against += 1,
            _ => {}
        }
    }
    let mut edge_labels = BTreeMap::new();
    for (h, pairs) in pairings.iter().enumerate() {
        let (f, s) = position_votes(inst, h, pairs);
        delta_for += f;
        delta_against += s;
        let rank = |r: usize| inst.hospital_rank(h, r).expect("matching edge");
        for &(x, y) in pairs {
            if let Some(b) = y {
                let a_label = resident_vote(inst, b, Some(h), m.assignment(b));
                let b_label = match x {
                    Some(a) if rank(a) < rank(b) => -1,
                    _ => 1,
                };
                edge_labels.insert((b, h), (a_label, b_label));
            }
        }
    }
    Ok(VoteOutcome {
        delta_for,
        delta_against,
        edge_labels,
    })
}

/// Labels on the edges of `n` outside `m`, per the comparison of `m`
/// against `n` under `policy`.
pub fn label_edges(
    inst: &HrlqInstance,
    m: &Matching,
    n: &Matching,
    policy: &CorrPolicy,
) -> Result<BTreeMap<(usize, usize), (i8, i8)>, VoteError> {
    Ok(vote(inst, m, n, policy)?.edge_labels)
}

/// Which of the two compared matchings an edge belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    InM,
    InN,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::InM => Side::InN,
            Side::InN => Side::InM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AltEdge {
    pub resident: usize,
    pub hospital: usize,
    pub side: Side,
}

/// One alternating path or cycle of the symmetric difference. Edges are
/// listed in trail order; consecutive edges share either their resident
/// or a corr pair at their hospital.
#[derive(Debug, Clone)]
pub struct Component {
    pub edges: Vec<AltEdge>,
    pub is_cycle: bool,
}

/// Decomposes the symmetric difference of `m` and `n` into alternating
/// paths and cycles. Extension through a hospital follows the policy's
/// pairing, so a hospital may occur several times in one component; a
/// component closes into a cycle only when the two residents adjacent at
/// a hospital are paired with each other. Every edge of the symmetric
/// difference appears in exactly one component.
pub fn decompose(
    inst: &HrlqInstance,
    m: &Matching,
    n: &Matching,
    policy: &CorrPolicy,
) -> Result<Vec<Component>, VoteError> {
    let pairings = corr_pairings(inst, m, n, policy)?;
    let nr = inst.n_residents();

    // Partner of each resident through its corr pair, per side.
    let mut pair_partner_m: Vec<Option<Option<usize>>> = vec![None; nr];
    let mut pair_partner_n: Vec<Option<Option<usize>>> = vec![None; nr];
    for pairs in &pairings {
        for &(x, y) in pairs {
            if let Some(a) = x {
                pair_partner_m[a] = Some(y);
            }
            if let Some(b) = y {
                pair_partner_n[b] = Some(x);
            }
        }
    }

    let assignment = |r: usize, side: Side| match side {
        Side::InM => m.assignment(r),
        Side::InN => n.assignment(r),
    };
    let in_difference = |r: usize| m.assignment(r) != n.assignment(r);

    // Crossing the hospital end: move to the pair partner's edge on the
    // other side. Crossing the resident end: move to the resident's edge
    // in the other matching.
    let via_pair = |r: usize, side: Side| -> Option<(usize, Side)> {
        let partner = match side {
            Side::InM => pair_partner_m[r],
            Side::InN => pair_partner_n[r],
        };
        partner.expect("edge residents always have a pair").map(|p| (p, side.flip()))
    };
    let via_resident = |r: usize, side: Side| -> Option<(usize, Side)> {
        assignment(r, side.flip()).map(|_| (r, side.flip()))
    };

    let mut used_m = vec![false; nr];
    let mut used_n = vec![false; nr];
    let mut components = Vec::new();

    for r0 in 0..nr {
        if !in_difference(r0) {
            continue;
        }
        for side0 in [Side::InM, Side::InN] {
            if assignment(r0, side0).is_none() {
                continue;
            }
            let used = match side0 {
                Side::InM => used_m[r0],
                Side::InN => used_n[r0],
            };
            if used {
                continue;
            }

            let seed = (r0, side0);
            let mut is_cycle = false;
            // Walk “up”, crossing the hospital end of the seed first.
            let mut up = Vec::new();
            let mut cur = seed;
            let mut cross_pair = true;
            loop {
                let next = if cross_pair {
                    via_pair(cur.0, cur.1)
                } else {
                    via_resident(cur.0, cur.1)
                };
                match next {
                    Some(e) if e == seed => {
                        is_cycle = true;
                        break;
                    }
                    Some(e) => {
                        up.push(e);
                        cur = e;
                        cross_pair = !cross_pair;
                    }
                    None => break,
                }
            }
            let mut trail = Vec::new();
            if !is_cycle {
                // Walk “down”, crossing the resident end of the seed first.
                let mut down = Vec::new();
                cur = seed;
                cross_pair = false;
                loop {
                    let next = if cross_pair {
                        via_pair(cur.0, cur.1)
                    } else {
                        via_resident(cur.0, cur.1)
                    };
                    match next {
                        Some(e) => {
                            down.push(e);
                            cur = e;
                            cross_pair = !cross_pair;
                        }
                        None => break,
                    }
                }
                down.reverse();
                trail.extend(down);
            }
            trail.push(seed);
            trail.extend(up);

            for &(r, side) in &trail {
                match side {
                    Side::InM => used_m[r] = true,
                    Side::InN => used_n[r] = true,
                }
            }
            components.push(Component {
                edges: trail
                    .into_iter()
                    .map(|(r, side)| AltEdge {
                        resident: r,
                        hospital: assignment(r, side).expect("edge exists"),
                        side,
                    })
                    .collect(),
                is_cycle,
            });
        }
    }
    Ok(components)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("enumeration exceeded the limit of {limit} matchings")]
pub struct EnumerationLimit {
    pub limit: usize,
}

/// Streams every feasible matching exactly once, in the canonical order:
/// residents considered in declaration order, each assigned nothing
/// first and then hospitals in preference order; branches violating an
/// upper quota are pruned and leaves violating a lower quota dropped.
/// Finding more than `limit` feasible matchings yields a final error
/// item instead of truncating silently.
pub fn enumerate_feasible(inst: &HrlqInstance, limit: usize) -> FeasibleIter<'_> {
    FeasibleIter {
        inst,
        assigned: vec![None; inst.n_residents()],
        loads: vec![0; inst.n_hospitals()],
        stack: Vec::with_capacity(inst.n_residents()),
        probe: 0,
        limit,
        yielded: 0,
        finished: false,
    }
}

pub struct FeasibleIter<'a> {
    inst: &'a HrlqInstance,
    assigned: Vec<Option<usize>>,
    loads: Vec<usize>,
    /// Option index applied at each decided depth; 0 means unmatched,
    /// k > 0 means the k-th entry of the resident's preference list.
    stack: Vec<usize>,
    /// Next option index to try at the current depth.
    probe: usize,
    limit: usize,
    yielded: usize,
    finished: bool,
}

impl<'a> FeasibleIter<'a> {
    fn undo_last(&mut self) -> bool {
        match self.stack.pop() {
            None => false,
            Some(applied) => {
                let depth = self.stack.len();
                if let Some(h) = self.assigned[depth].take() {
                    self.loads[h] -= 1;
                }
                self.probe = applied + 1;
                true
            }
        }
    }
}

impl<'a> Iterator for FeasibleIter<'a> {
    type Item = Result<Matching, EnumerationLimit>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        let nr = self.inst.n_residents();
        let nh = self.inst.n_hospitals();
        loop {
            let depth = self.stack.len();
            if depth == nr {
                let feasible = (0..nh).all(|h| self.loads[h] >= self.inst.lower(h));
                let snapshot = if feasible {
                    Some(Matching::from_assignment(self.assigned.clone(), nh))
                } else {
                    None
                };
                if !self.undo_last() {
                    self.finished = true;
                }
                if let Some(m) = snapshot {
                    if self.yielded == self.limit {
                        self.finished = true;
                        return Some(Err(EnumerationLimit { limit: self.limit }));
                    }
                    self.yielded += 1;
                    return Some(Ok(m));
                }
                if self.finished {
                    return None;
                }
                continue;
            }

            let prefs = self.inst.resident_prefs(depth);
            let mut placed = false;
            while self.probe <= prefs.len() {
                if self.probe == 0 {
                    placed = true;
                    break;
                }
                let h = prefs[self.probe - 1];
                if self.loads[h] < self.inst.upper(h) {
                    self.assigned[depth] = Some(h);
                    self.loads[h] += 1;
                    placed = true;
                    break;
                }
                self.probe += 1;
            }
            if placed {
                self.stack.push(self.probe);
                self.probe = 0;
            } else if !self.undo_last() {
                self.finished = true;
                return None;
            }
        }
    }
}

/// Maximum size of a feasible matching, by a two-phase flow: saturate
/// every lower quota, then keep augmenting within the upper quotas.
pub fn max_card_feasible(inst: &HrlqInstance) -> Result<usize, InfeasibleError> {
    let nr = inst.n_residents();
    let nh = inst.n_hospitals();
    let source = nr + nh;
    let sink = nr + nh + 1;
    let mut net = FlowNetwork::new(nr + nh + 2);
    for r in 0..nr {
        net.add_edge(source, r, 1);
        for &h in inst.resident_prefs(r) {
            net.add_edge(r, nr + h, 1);
        }
    }
    let sink_edges: Vec<usize> = (0..nh)
        .map(|h| net.add_edge(nr + h, sink, inst.lower(h) as i64))
        .collect();
    let saturated = net.max_flow(source, sink) as usize;
    if saturated < inst.total_lower() {
        return Err(InfeasibleError {
            evidence: check_feasibility(inst),
        });
    }
    for h in 0..nh {
        net.widen(sink_edges[h], (inst.upper(h) - inst.lower(h)) as i64);
    }
    Ok(saturated + net.max_flow(source, sink) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UniverseKind {
    AllFeasible,
    MaxCardinality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertifyOutcome {
    /// No matching in the universe beats the candidate, even with
    /// pairings chosen adversarially against it.
    Popular { universe: usize },
    /// First matching in canonical order that out-votes the candidate;
    /// `delta_for` are the votes for the challenger.
    Beaten {
        by: Matching,
        delta_for: usize,
        delta_against: usize,
    },
    /// Enumeration hit the limit before the universe was exhausted.
    Inconclusive { scanned: usize },
}

impl CertifyOutcome {
    pub fn render(&self, inst: &HrlqInstance) -> String {
        match self {
            CertifyOutcome::Popular { universe } => {
                format!("POPULAR universe={universe} policy=adversarial")
            }
            CertifyOutcome::Beaten {
                by,
                delta_for,
                delta_against,
            } => format!(
                "BEATEN by={} delta_for={delta_for} delta_against={delta_against}",
                render_matching_compact(inst, by)
            ),
            CertifyOutcome::Inconclusive { scanned } => {
                format!("INCONCLUSIVE scanned={scanned}")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error("candidate matching violates a lower quota")]
    CandidateInfeasible,
    #[error(transparent)]
    Infeasible(#[from] InfeasibleError),
}

/// Checks the candidate against every matching of the chosen universe,
/// with hospital pairings picked adversarially against the candidate.
/// Returns the first counterexample in canonical enumeration order, a
/// certificate with the universe size, or an inconclusive marker when
/// the enumeration limit is hit.
pub fn certify_popular(
    inst: &HrlqInstance,
    candidate: &Matching,
    universe: UniverseKind,
    limit: usize,
) -> Result<CertifyOutcome, CertifyError> {
    inst.validate_matching(candidate)?;
    if !inst.deficient_hospitals(candidate).is_empty() {
        return Err(CertifyError::CandidateInfeasible);
    }
    let target = match universe {
        UniverseKind::AllFeasible => None,
        UniverseKind::MaxCardinality => Some(max_card_feasible(inst)?),
    };
    let policy = CorrPolicy::adversarial_against(candidate);
    let mut universe_size = 0usize;
    let mut scanned = 0usize;
    for item in enumerate_feasible(inst, limit) {
        let n = match item {
            Ok(n) => n,
            Err(_) => return Ok(CertifyOutcome::Inconclusive { scanned }),
        };
        scanned += 1;
        if let Some(size) = target {
            if n.size() != size {
                continue;
            }
        }
        universe_size += 1;
        if &n == candidate {
            continue;
        }
        let outcome = vote(inst, &n, candidate, &policy)
            .expect("enumerated matchings are valid and the target is the candidate");
        if outcome.delta_for > outcome.delta_against {
            return Ok(CertifyOutcome::Beaten {
                by: n,
                delta_for: outcome.delta_for,
                delta_against: outcome.delta_against,
            });
        }
    }
    Ok(CertifyOutcome::Popular {
        universe: universe_size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_hrlq;

    const SECTION_ONE: &str = "\
HRLQ
resident r
hospital h1 0 1
hospital h2 1 1
pref r : h1 h2
pref h1 : r
pref h2 : r
";

    fn feasible(inst: &HrlqInstance) -> Vec<Matching> {
        enumerate_feasible(inst, DEFAULT_ENUM_LIMIT)
            .collect::<Result<Vec<_>, _>>()
            .unwrap()
    }

    #[test]
    fn section_one_vote_counts() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        let n = Matching::from_pairs(1, 2, &[(0, 0)]).unwrap();
        // r prefers h1; each hospital's single position votes for being
        // filled. The infeasible matching wins the raw election 2 to 1.
        let outcome = vote(&inst, &n, &m, &CorrPolicy::PreferenceOrder).unwrap();
        assert_eq!(outcome.delta_for, 2);
        assert_eq!(outcome.delta_against, 1);
        let swapped = vote(&inst, &m, &n, &CorrPolicy::PreferenceOrder).unwrap();
        assert_eq!(swapped.delta_for, 1);
        assert_eq!(swapped.delta_against, 2);
    }

    #[test]
    fn self_comparison_is_silent() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        let outcome = vote(&inst, &m, &m, &CorrPolicy::PreferenceOrder).unwrap();
        assert_eq!((outcome.delta_for, outcome.delta_against), (0, 0));
        assert!(outcome.edge_labels.is_empty());
        assert!(decompose(&inst, &m, &m, &CorrPolicy::PreferenceOrder)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn section_one_decomposition_is_one_path() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        let n = Matching::from_pairs(1, 2, &[(0, 0)]).unwrap();
        let comps = decompose(&inst, &m, &n, &CorrPolicy::PreferenceOrder).unwrap();
        assert_eq!(comps.len(), 1);
        let comp = &comps[0];
        assert!(!comp.is_cycle);
        assert_eq!(comp.edges.len(), 2);
        assert!(comp.edges.iter().any(|e| e.hospital == 1 && e.side == Side::InM));
        assert!(comp.edges.iter().any(|e| e.hospital == 0 && e.side == Side::InN));
    }

    #[test]
    fn labels_on_the_challenger_edges() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        let n = Matching::from_pairs(1, 2, &[(0, 0)]).unwrap();
        let labels = label_edges(&inst, &m, &n, &CorrPolicy::PreferenceOrder).unwrap();
        // r prefers its n-assignment h1, and h1's seat is empty under m:
        // both voters keep the edge.
        assert_eq!(labels.get(&(0, 0)), Some(&(1, 1)));
    }

    #[test]
    fn enumeration_matches_the_unique_feasible_matching() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let all = feasible(&inst);
        assert_eq!(all.len(), 1);
        assert_eq!(all[0], Matching::from_pairs(1, 2, &[(0, 1)]).unwrap());
    }

    #[test]
    fn enumeration_of_infeasible_instance_is_empty() {
        let inst = parse_hrlq(
            "HRLQ\nresident a\nhospital h1 1 1\nhospital h2 1 1\n\
             pref a : h1 h2\npref h1 : a\npref h2 : a\n",
        )
        .unwrap();
        assert!(feasible(&inst).is_empty());
    }

    #[test]
    fn enumeration_limit_is_loud() {
        let inst = parse_hrlq(
            "HRLQ\nresident a\nresident b\nhospital h 0 2\n\
             pref a : h\npref b : h\npref h : a b\n",
        )
        .unwrap();
        // Four feasible matchings; a limit of two must end in an error item.
        let items: Vec<_> = enumerate_feasible(&inst, 2).collect();
        assert_eq!(items.len(), 3);
        assert!(items[0].is_ok() && items[1].is_ok());
        assert_eq!(items[2], Err(EnumerationLimit { limit: 2 }));
    }

    #[test]
    fn max_cardinality_oracle() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        assert_eq!(max_card_feasible(&inst).unwrap(), 1);

        let complete = parse_hrlq(
            "HRLQ\nresident a\nresident b\nhospital h1 0 1\nhospital h2 0 1\n\
             pref a : h1 h2\npref b : h2 h1\npref h1 : a b\npref h2 : b a\n",
        )
        .unwrap();
        assert_eq!(max_card_feasible(&complete).unwrap(), 2);
    }

    #[test]
    fn certify_section_one() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        let outcome =
            certify_popular(&inst, &m, UniverseKind::AllFeasible, DEFAULT_ENUM_LIMIT).unwrap();
        assert_eq!(outcome, CertifyOutcome::Popular { universe: 1 });
        assert_eq!(outcome.render(&inst), "POPULAR universe=1 policy=adversarial");
    }

    #[test]
    fn certify_rejects_an_unpopular_matching() {
        let inst = parse_hrlq(
            "HRLQ\nresident a\nresident b\nhospital h 0 2\n\
             pref a : h\npref b : h\npref h : a b\n",
        )
        .unwrap();
        let empty = Matching::empty(2, 1);
        match certify_popular(&inst, &empty, UniverseKind::AllFeasible, DEFAULT_ENUM_LIMIT)
            .unwrap()
        {
            CertifyOutcome::Beaten {
                delta_for,
                delta_against,
                ..
            } => {
                assert!(delta_for > delta_against);
            }
            other => panic!("expected a counterexample, got {other:?}"),
        }
    }

    #[test]
    fn explicit_pairings_are_validated() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        let n = Matching::from_pairs(1, 2, &[(0, 0)]).unwrap();
        // h1 loses nothing and gains r under n-vs-m; pairing r with an
        // empty seat is the only valid entry.
        let mut table = BTreeMap::new();
        table.insert(0usize, vec![(None, Some(0usize))]);
        table.insert(1usize, vec![(Some(0usize), None)]);
        assert!(vote(&inst, &m, &n, &CorrPolicy::Explicit { table }).is_ok());

        let mut bad = BTreeMap::new();
        bad.insert(0usize, vec![(Some(0usize), Some(0usize))]);
        assert!(matches!(
            vote(&inst, &m, &n, &CorrPolicy::Explicit { table: bad }),
            Err(VoteError::BadPairing { .. })
        ));
    }

    #[test]
    fn adversarial_target_must_be_an_argument() {
        let inst = parse_hrlq(SECTION_ONE).unwrap();
        let m = Matching::from_pairs(1, 2, &[(0, 1)]).unwrap();
        let n = Matching::from_pairs(1, 2, &[(0, 0)]).unwrap();
        let other = Matching::empty(1, 2);
        assert!(matches!(
            vote(&inst, &m, &n, &CorrPolicy::adversarial_against(&other)),
            Err(VoteError::AdversarialTarget)
        ));
    }
}
