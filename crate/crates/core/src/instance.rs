//! Instance model: hospital/residents instances with and without lower
//! quotas, matchings over them, and the flow-based feasibility oracle.
//!
//! Vertices are identified by opaque string ids. Internally every vertex
//! gets a dense index in declaration order, and all other modules work on
//! indices; declaration order is the tie-breaker everywhere downstream.

use std::collections::HashMap;

use thiserror::Error;

use crate::flow::FlowNetwork;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ValidationError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("hospital `{0}`: lower quota {1} exceeds upper quota {2}")]
    LowerExceedsUpper(String, usize, usize),
    #[error("hospital `{0}` has zero upper quota")]
    ZeroUpperQuota(String),
    #[error("`{0}` has an empty preference list")]
    EmptyPreferenceList(String),
    #[error("preference list of `{0}` mentions `{1}` more than once")]
    DuplicatePreferenceEntry(String, String),
    #[error("asymmetric edge: `{0}` lists `{1}` but not vice versa")]
    AsymmetricEdge(String, String),
    #[error("expected {expected} preference lists for {side}, got {got}")]
    PrefListCount {
        side: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("preference entry index {0} out of range")]
    IndexOutOfRange(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("resident {0} is matched more than once")]
    ResidentMatchedTwice(usize),
    #[error("vertex index out of range")]
    OutOfRange,
    #[error("matching shape does not fit the instance")]
    ShapeMismatch,
    #[error("pair ({r}, {h}) is not an edge of the instance")]
    NotAnEdge { r: usize, h: usize },
    #[error("hospital {h} holds {load} residents, above its capacity {cap}")]
    OverCapacity { h: usize, load: usize, cap: usize },
}

/// Shared preference structure of a bipartite instance.
#[derive(Debug, Clone)]
pub(crate) struct PrefGraph {
    pub residents: Vec<String>,
    pub hospitals: Vec<String>,
    pub resident_prefs: Vec<Vec<usize>>,
    pub hospital_prefs: Vec<Vec<usize>>,
    pub resident_rank: Vec<HashMap<usize, usize>>,
    pub hospital_rank: Vec<HashMap<usize, usize>>,
    pub resident_index: HashMap<String, usize>,
    pub hospital_index: HashMap<String, usize>,
}

impl PrefGraph {
    fn new(
        residents: Vec<String>,
        hospitals: Vec<String>,
        resident_prefs: Vec<Vec<usize>>,
        hospital_prefs: Vec<Vec<usize>>,
    ) -> Result<Self, ValidationError> {
        if resident_prefs.len() != residents.len() {
            return Err(ValidationError::PrefListCount {
                side: "residents",
                expected: residents.len(),
                got: resident_prefs.len(),
            });
        }
        if hospital_prefs.len() != hospitals.len() {
            return Err(ValidationError::PrefListCount {
                side: "hospitals",
                expected: hospitals.len(),
                got: hospital_prefs.len(),
            });
        }

        let mut resident_index = HashMap::new();
        let mut hospital_index = HashMap::new();
        for (i, name) in residents.iter().enumerate() {
            if resident_index.insert(name.clone(), i).is_some() {
                return Err(ValidationError::DuplicateId(name.clone()));
            }
        }
        for (i, name) in hospitals.iter().enumerate() {
            // Ids must be unique across both sides: preference lines in the
            // file format name vertices without a side marker.
            if resident_index.contains_key(name) {
                return Err(ValidationError::DuplicateId(name.clone()));
            }
            if hospital_index.insert(name.clone(), i).is_some() {
                return Err(ValidationError::DuplicateId(name.clone()));
            }
        }

        let resident_rank = build_ranks(&residents, &resident_prefs, hospitals.len())?;
        let hospital_rank = build_ranks(&hospitals, &hospital_prefs, residents.len())?;

        for (r, prefs) in resident_prefs.iter().enumerate() {
            if prefs.is_empty() {
                return Err(ValidationError::EmptyPreferenceList(residents[r].clone()));
            }
            for &h in prefs {
                if !hospital_rank[h].contains_key(&r) {
                    return Err(ValidationError::AsymmetricEdge(
                        residents[r].clone(),
                        hospitals[h].clone(),
                    ));
                }
            }
        }
        for (h, prefs) in hospital_prefs.iter().enumerate() {
            if prefs.is_empty() {
                return Err(ValidationError::EmptyPreferenceList(hospitals[h].clone()));
            }
            for &r in prefs {
                if !resident_rank[r].contains_key(&h) {
                    return Err(ValidationError::AsymmetricEdge(
                        hospitals[h].clone(),
                        residents[r].clone(),
                    ));
                }
            }
        }

        Ok(PrefGraph {
            residents,
            hospitals,
            resident_prefs,
            hospital_prefs,
            resident_rank,
            hospital_rank,
            resident_index,
            hospital_index,
        })
    }
}

fn build_ranks(
    names: &[String],
    prefs: &[Vec<usize>],
    other_side_count: usize,
) -> Result<Vec<HashMap<usize, usize>>, ValidationError> {
    let mut ranks = Vec::with_capacity(prefs.len());
    for (v, list) in prefs.iter().enumerate() {
        let mut rank = HashMap::with_capacity(list.len());
        for (pos, &other) in list.iter().enumerate() {
            if other >= other_side_count {
                return Err(ValidationError::IndexOutOfRange(other));
            }
            if rank.insert(other, pos).is_some() {
                return Err(ValidationError::DuplicatePreferenceEntry(
                    names[v].clone(),
                    other.to_string(),
                ));
            }
        }
        ranks.push(rank);
    }
    Ok(ranks)
}

/// A hospital/residents instance with per-hospital lower and upper quotas.
#[derive(Debug, Clone)]
pub struct HrlqInstance {
    pub(crate) graph: PrefGraph,
    lower: Vec<usize>,
    upper: Vec<usize>,
}

/// A plain hospital/residents instance: capacities only, no lower quotas.
/// Zero-capacity hospitals are allowed; the reductions create them.
#[derive(Debug, Clone)]
pub struct HrInstance {
    pub(crate) graph: PrefGraph,
    capacity: Vec<usize>,
}

macro_rules! graph_accessors {
    () => {
        pub fn n_residents(&self) -> usize {
            self.graph.residents.len()
        }

        pub fn n_hospitals(&self) -> usize {
            self.graph.hospitals.len()
        }

        pub fn resident_name(&self, r: usize) -> &str {
            &self.graph.residents[r]
        }

        pub fn hospital_name(&self, h: usize) -> &str {
            &self.graph.hospitals[h]
        }

        pub fn resident_index(&self, name: &str) -> Option<usize> {
            self.graph.resident_index.get(name).copied()
        }

        pub fn hospital_index(&self, name: &str) -> Option<usize> {
            self.graph.hospital_index.get(name).copied()
        }

        /// Preference list of resident `r`, most preferred first.
        pub fn resident_prefs(&self, r: usize) -> &[usize] {
            &self.graph.resident_prefs[r]
        }

        /// Preference list of hospital `h`, most preferred first.
        pub fn hospital_prefs(&self, h: usize) -> &[usize] {
            &self.graph.hospital_prefs[h]
        }

        /// Rank of hospital `h` in `r`'s list (0 = most preferred).
        pub fn resident_rank(&self, r: usize, h: usize) -> Option<usize> {
            self.graph.resident_rank[r].get(&h).copied()
        }

        /// Rank of resident `r` in `h`'s list (0 = most preferred).
        pub fn hospital_rank(&self, h: usize, r: usize) -> Option<usize> {
            self.graph.hospital_rank[h].get(&r).copied()
        }

        pub fn has_edge(&self, r: usize, h: usize) -> bool {
            self.graph.resident_rank[r].contains_key(&h)
        }

        pub fn n_edges(&self) -> usize {
            self.graph.resident_prefs.iter().map(Vec::len).sum()
        }
    };
}

impl HrlqInstance {
    /// Builds a validated instance from index-based parts. Hospitals are
    /// given as `(name, lower_quota, upper_quota)`.
    pub fn from_parts(
        residents: Vec<String>,
        hospitals: Vec<(String, usize, usize)>,
        resident_prefs: Vec<Vec<usize>>,
        hospital_prefs: Vec<Vec<usize>>,
    ) -> Result<Self, ValidationError> {
        let mut names = Vec::with_capacity(hospitals.len());
        let mut lower = Vec::with_capacity(hospitals.len());
        let mut upper = Vec::with_capacity(hospitals.len());
        for (name, lq, uq) in hospitals {
            if uq == 0 {
                return Err(ValidationError::ZeroUpperQuota(name));
            }
            if lq > uq {
                return Err(ValidationError::LowerExceedsUpper(name, lq, uq));
            }
            names.push(name);
            lower.push(lq);
            upper.push(uq);
        }
        let graph = PrefGraph::new(residents, names, resident_prefs, hospital_prefs)?;
        Ok(HrlqInstance { graph, lower, upper })
    }

    graph_accessors!();

    pub fn lower(&self, h: usize) -> usize {
        self.lower[h]
    }

    pub fn upper(&self, h: usize) -> usize {
        self.upper[h]
    }

    pub fn total_lower(&self) -> usize {
        self.lower.iter().sum()
    }

    /// The instance obtained by disregarding all lower quotas.
    pub fn relax(&self) -> HrInstance {
        HrInstance {
            graph: self.graph.clone(),
            capacity: self.upper.clone(),
        }
    }

    /// Checks that `m` is a matching of this instance: edges only, each
    /// resident at most once, loads within upper quotas.
    pub fn validate_matching(&self, m: &Matching) -> Result<(), MatchingError> {
        validate_common(&self.graph, m)?;
        for h in 0..self.n_hospitals() {
            let load = m.load(h);
            if load > self.upper[h] {
                return Err(MatchingError::OverCapacity {
                    h,
                    load,
                    cap: self.upper[h],
                });
            }
        }
        Ok(())
    }

    /// Hospitals whose load in `m` is below their lower quota.
    pub fn deficient_hospitals(&self, m: &Matching) -> Vec<usize> {
        (0..self.n_hospitals())
            .filter(|&h| m.load(h) < self.lower[h])
            .collect()
    }

    /// True iff `m` is a valid matching meeting every lower and upper quota.
    pub fn is_feasible(&self, m: &Matching) -> bool {
        self.validate_matching(m).is_ok() && self.deficient_hospitals(m).is_empty()
    }
}

impl HrInstance {
    /// Builds a validated instance from index-based parts. Hospitals are
    /// given as `(name, capacity)`; capacity zero is permitted.
    pub fn from_parts(
        residents: Vec<String>,
        hospitals: Vec<(String, usize)>,
        resident_prefs: Vec<Vec<usize>>,
        hospital_prefs: Vec<Vec<usize>>,
    ) -> Result<Self, ValidationError> {
        let (names, capacity): (Vec<_>, Vec<_>) = hospitals.into_iter().unzip();
        let graph = PrefGraph::new(residents, names, resident_prefs, hospital_prefs)?;
        Ok(HrInstance { graph, capacity })
    }

    graph_accessors!();

    pub fn capacity(&self, h: usize) -> usize {
        self.capacity[h]
    }

    pub fn validate_matching(&self, m: &Matching) -> Result<(), MatchingError> {
        validate_common(&self.graph, m)?;
        for h in 0..self.n_hospitals() {
            let load = m.load(h);
            if load > self.capacity[h] {
                return Err(MatchingError::OverCapacity {
                    h,
                    load,
                    cap: self.capacity[h],
                });
            }
        }
        Ok(())
    }
}

fn validate_common(graph: &PrefGraph, m: &Matching) -> Result<(), MatchingError> {
    if m.n_residents() != graph.residents.len() || m.n_hospitals() != graph.hospitals.len() {
        return Err(MatchingError::ShapeMismatch);
    }
    for (r, assignment) in m.assigned.iter().enumerate() {
        if let Some(h) = *assignment {
            if !graph.resident_rank[r].contains_key(&h) {
                return Err(MatchingError::NotAnEdge { r, h });
            }
        }
    }
    Ok(())
}

/// An assignment of residents to hospitals. Residents are matched at most
/// once; hospitals may hold several residents. Works for both instance
/// kinds; quota checks live on the instances.
#[derive(Debug, Clone)]
pub struct Matching {
    assigned: Vec<Option<usize>>,
    loads: Vec<Vec<usize>>,
}

impl Matching {
    pub fn empty(n_residents: usize, n_hospitals: usize) -> Self {
        Matching {
            assigned: vec![None; n_residents],
            loads: vec![Vec::new(); n_hospitals],
        }
    }

    pub fn from_pairs(
        n_residents: usize,
        n_hospitals: usize,
        pairs: &[(usize, usize)],
    ) -> Result<Self, MatchingError> {
        let mut m = Matching::empty(n_residents, n_hospitals);
        for &(r, h) in pairs {
            if r >= n_residents || h >= n_hospitals {
                return Err(MatchingError::OutOfRange);
            }
            if m.assigned[r].is_some() {
                return Err(MatchingError::ResidentMatchedTwice(r));
            }
            m.assigned[r] = Some(h);
        }
        m.rebuild_loads();
        Ok(m)
    }

    pub(crate) fn from_assignment(assigned: Vec<Option<usize>>, n_hospitals: usize) -> Self {
        let mut m = Matching {
            assigned,
            loads: vec![Vec::new(); n_hospitals],
        };
        m.rebuild_loads();
        m
    }

    fn rebuild_loads(&mut self) {
        for list in &mut self.loads {
            list.clear();
        }
        for (r, assignment) in self.assigned.iter().enumerate() {
            if let Some(h) = *assignment {
                self.loads[h].push(r);
            }
        }
    }

    pub fn n_residents(&self) -> usize {
        self.assigned.len()
    }

    pub fn n_hospitals(&self) -> usize {
        self.loads.len()
    }

    /// The hospital matched to `r`, if any.
    pub fn assignment(&self, r: usize) -> Option<usize> {
        self.assigned[r]
    }

    /// Residents matched to `h`, in resident-index order.
    pub fn residents_of(&self, h: usize) -> &[usize] {
        &self.loads[h]
    }

    pub fn load(&self, h: usize) -> usize {
        self.loads[h].len()
    }

    /// Number of matched residents.
    pub fn size(&self) -> usize {
        self.assigned.iter().filter(|a| a.is_some()).count()
    }

    /// All pairs in resident-index order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assigned
            .iter()
            .enumerate()
            .filter_map(|(r, h)| h.map(|h| (r, h)))
    }
}

impl PartialEq for Matching {
    fn eq(&self, other: &Self) -> bool {
        self.assigned == other.assigned
    }
}

impl Eq for Matching {}

impl std::hash::Hash for Matching {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.assigned.hash(state);
    }
}

/// Result of the lower-quota feasibility flow check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityEvidence {
    /// Total lower-quota demand over all hospitals.
    pub required: usize,
    /// Maximum number of residents routable into lower-quota seats.
    pub achievable: usize,
    /// Hospitals whose lower quota cannot be met by any matching.
    pub deficient_hospitals: Vec<usize>,
}

impl FeasibilityEvidence {
    pub fn feasible(&self) -> bool {
        self.achievable == self.required
    }
}

/// Runs the feasibility flow: source -> resident (1), resident -> hospital
/// (1 per edge), hospital -> sink (lower quota). Some feasible matching
/// exists iff the maximum flow saturates every sink edge.
pub fn check_feasibility(inst: &HrlqInstance) -> FeasibilityEvidence {
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
    let mut sink_edges = Vec::with_capacity(nh);
    for h in 0..nh {
        sink_edges.push(net.add_edge(nr + h, sink, inst.lower(h) as i64));
    }
    let achievable = net.max_flow(source, sink) as usize;
    let required = inst.total_lower();
    let deficient_hospitals = (0..nh)
        .filter(|&h| net.residual(sink_edges[h]) > 0)
        .collect();
    FeasibilityEvidence {
        required,
        achievable,
        deficient_hospitals,
    }
}

/// True iff the instance admits any feasible matching.
pub fn feasibility_exists(inst: &HrlqInstance) -> bool {
    check_feasibility(inst).feasible()
}
