//! Seeded random instance generation. A fixed seed gives a byte-identical
//! instance; all randomness flows through the caller-provided seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::HrlqInstance;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenerateError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerateParams {
    pub residents: usize,
    pub hospitals: usize,
    pub max_upper: usize,
    pub max_lower: usize,
    /// Probability of each resident-hospital edge, in (0, 1].
    pub density: f64,
    pub seed: u64,
}

/// Generates a random instance. Quotas are drawn first (upper in
/// `1..=max_upper`, lower in `0..=min(max_lower, upper)`), then the edge
/// set, then preference orders. Any vertex that would end up with an empty
/// preference list has its incident edges re-drawn.
pub fn generate(params: &GenerateParams) -> Result<HrlqInstance, GenerateError> {
    if params.residents == 0 {
        return Err(GenerateError::InvalidParameter("residents must be positive"));
    }
    if params.hospitals == 0 {
        return Err(GenerateError::InvalidParameter("hospitals must be positive"));
    }
    if params.max_upper == 0 {
        return Err(GenerateError::InvalidParameter("max-uq must be positive"));
    }
    if params.max_lower > params.max_upper {
        return Err(GenerateError::InvalidParameter("max-lq must not exceed max-uq"));
    }
    if !(params.density > 0.0 && params.density <= 1.0) {
        return Err(GenerateError::InvalidParameter("density must lie in (0, 1]"));
    }

    let nr = params.residents;
    let nh = params.hospitals;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut hospitals = Vec::with_capacity(nh);
    for h in 0..nh {
        let upper = rng.gen_range(1..=params.max_upper);
        let lower = rng.gen_range(0..=params.max_lower.min(upper));
        hospitals.push((format!("h{}", h + 1), lower, upper));
    }

    // adjacency[r][h]
    let mut adjacency = vec![vec![false; nh]; nr];
    for row in adjacency.iter_mut() {
        for cell in row.iter_mut() {
            *cell = rng.gen_bool(params.density);
        }
    }

    // Re-sample rows/columns of empty vertices until every vertex has at
    // least one edge. Density is positive, so this terminates with
    // probability one; the attempt cap only guards against a broken RNG.
    let mut attempts = 0;
    loop {
        let mut all_ok = true;
        for r in 0..nr {
            if adjacency[r].iter().all(|&e| !e) {
                all_ok = false;
                for h in 0..nh {
                    adjacency[r][h] = rng.gen_bool(params.density);
                }
            }
        }
        for h in 0..nh {
            if (0..nr).all(|r| !adjacency[r][h]) {
                all_ok = false;
                for r in 0..nr {
                    adjacency[r][h] = rng.gen_bool(params.density);
                }
            }
        }
        if all_ok {
            break;
        }
        attempts += 1;
        if attempts > 10_000 {
            for r in 0..nr {
                if adjacency[r].iter().all(|&e| !e) {
                    adjacency[r][0] = true;
                }
            }
            for h in 0..nh {
                if (0..nr).all(|r| !adjacency[r][h]) {
                    adjacency[0][h] = true;
                }
            }
            break;
        }
    }

    let mut resident_prefs = Vec::with_capacity(nr);
    for r in 0..nr {
        let mut list: Vec<usize> = (0..nh).filter(|&h| adjacency[r][h]).collect();
        list.shuffle(&mut rng);
        resident_prefs.push(list);
    }
    let mut hospital_prefs = Vec::with_capacity(nh);
    for h in 0..nh {
        let mut list: Vec<usize> = (0..nr).filter(|&r| adjacency[r][h]).collect();
        list.shuffle(&mut rng);
        hospital_prefs.push(list);
    }

    let residents = (0..nr).map(|r| format!("r{}", r + 1)).collect();
    Ok(
        HrlqInstance::from_parts(residents, hospitals, resident_prefs, hospital_prefs)
            .expect("generated instances are valid by construction"),
    )
}
