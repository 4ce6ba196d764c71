//! Ring construction, validation and ID-placement strategies.
//!
//! A ring is a sequence of distinct process IDs indexed by position;
//! position `i`'s successor is `(i + 1) mod n`. Generated placements use
//! the IDs `0..n-1`, which makes the extremal arrangements canonical;
//! explicit placements admit arbitrary distinct IDs.
//!
//! Random placements are a ChaCha8-driven Fisher-Yates shuffle with an
//! unbiased bounded draw, both implemented here so a given seed yields the
//! same ring on every platform and toolchain.

use std::collections::HashSet;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocol::ProcessId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("ring size must be at least 1")]
    ZeroNodes,
    #[error("duplicate process id {id} in placement")]
    DuplicateId { id: u64 },
    #[error("explicit placement has {actual} ids, ring size is {expected}")]
    WrongLength { expected: usize, actual: usize },
    #[error("position {position} out of range for a ring of {n}")]
    PositionOutOfRange { position: usize, n: usize },
    #[error("franklin requires all nodes to initiate simultaneously")]
    FranklinNeedsAllInitiators,
    #[error("staggered initiation is only supported on the sim transport")]
    StaggeredNotSupported,
}

/// How IDs are assigned to ring positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlacementStrategy {
    /// Uniformly random permutation of `0..n-1`, derived from the seed.
    Random,
    /// IDs strictly decreasing along the successor direction: the
    /// Chang-Roberts worst case.
    CrWorst,
    /// IDs strictly increasing along the successor direction: the
    /// Chang-Roberts best case.
    CrBest,
    /// Caller-supplied IDs, one per position.
    Explicit(Vec<u64>),
}

impl PlacementStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            PlacementStrategy::Random => "random",
            PlacementStrategy::CrWorst => "cr-worst",
            PlacementStrategy::CrBest => "cr-best",
            PlacementStrategy::Explicit(_) => "explicit",
        }
    }
}

/// A validated ring: size, ID placement and the seed it was built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingConfig {
    placement: Vec<ProcessId>,
    strategy: String,
    seed: u64,
}

impl RingConfig {
    pub fn n(&self) -> usize {
        self.placement.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn strategy(&self) -> &str {
        &self.strategy
    }

    /// ID at a ring position.
    pub fn id_at(&self, position: usize) -> ProcessId {
        self.placement[position]
    }

    pub fn placement(&self) -> &[ProcessId] {
        &self.placement
    }

    pub fn max_id(&self) -> ProcessId {
        *self.placement.iter().max().expect("ring is non-empty")
    }

    /// `(predecessor, successor)` positions of `position`.
    pub fn neighbors(&self, position: usize) -> Result<(usize, usize), ConfigError> {
        let n = self.n();
        if position >= n {
            return Err(ConfigError::PositionOutOfRange { position, n });
        }
        Ok(((position + n - 1) % n, (position + 1) % n))
    }

    pub fn successor(&self, position: usize) -> usize {
        (position + 1) % self.n()
    }

    pub fn predecessor(&self, position: usize) -> usize {
        (position + self.n() - 1) % self.n()
    }
}

/// Build and validate a ring of `n` processes.
pub fn build_ring(
    n: usize,
    strategy: &PlacementStrategy,
    seed: u64,
) -> Result<RingConfig, ConfigError> {
    if n == 0 {
        return Err(ConfigError::ZeroNodes);
    }
    let ids: Vec<u64> = match strategy {
        PlacementStrategy::Random => {
            let mut ids: Vec<u64> = (0..n as u64).collect();
            shuffle(&mut ids, &mut seeded_rng(seed));
            ids
        }
        PlacementStrategy::CrWorst => (0..n as u64).rev().collect(),
        PlacementStrategy::CrBest => (0..n as u64).collect(),
        PlacementStrategy::Explicit(ids) => {
            if ids.len() != n {
                return Err(ConfigError::WrongLength {
                    expected: n,
                    actual: ids.len(),
                });
            }
            ids.clone()
        }
    };

    let mut seen = HashSet::with_capacity(n);
    for &id in &ids {
        if !seen.insert(id) {
            return Err(ConfigError::DuplicateId { id });
        }
    }

    Ok(RingConfig {
        placement: ids.into_iter().map(ProcessId::new).collect(),
        strategy: strategy.label().to_string(),
        seed,
    })
}

pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unbiased draw from `[0, bound)` via rejection sampling.
pub(crate) fn uniform_below(rng: &mut ChaCha8Rng, bound: u64) -> u64 {
    assert!(bound > 0);
    // 2^64 mod bound, computed without overflow.
    let rem = (u64::MAX % bound + 1) % bound;
    loop {
        let x = rng.next_u64();
        if rem == 0 || x <= u64::MAX - rem {
            return x % bound;
        }
    }
}

/// Fisher-Yates over the ChaCha8 stream.
fn shuffle(values: &mut [u64], rng: &mut ChaCha8Rng) {
    for i in (1..values.len()).rev() {
        let j = uniform_below(rng, i as u64 + 1) as usize;
        values.swap(i, j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ids(cfg: &RingConfig) -> Vec<u64> {
        cfg.placement().iter().map(|id| id.value()).collect()
    }

    #[test]
    fn cr_worst_is_decreasing_along_successors() {
        let cfg = build_ring(4, &PlacementStrategy::CrWorst, 0).unwrap();
        assert_eq!(ids(&cfg), vec![3, 2, 1, 0]);
    }

    #[test]
    fn cr_best_is_increasing_along_successors() {
        let cfg = build_ring(4, &PlacementStrategy::CrBest, 0).unwrap();
        assert_eq!(ids(&cfg), vec![0, 1, 2, 3]);
    }

    #[test]
    fn equal_seeds_give_identical_random_placements() {
        let a = build_ring(16, &PlacementStrategy::Random, 77).unwrap();
        let b = build_ring(16, &PlacementStrategy::Random, 77).unwrap();
        assert_eq!(a, b);
        let c = build_ring(16, &PlacementStrategy::Random, 78).unwrap();
        assert_ne!(ids(&a), ids(&c));
    }

    #[test]
    fn explicit_placement_keeps_caller_ids() {
        let cfg = build_ring(3, &PlacementStrategy::Explicit(vec![10, 4, 7]), 0).unwrap();
        assert_eq!(ids(&cfg), vec![10, 4, 7]);
        assert_eq!(cfg.max_id(), ProcessId::new(10));
    }

    #[test]
    fn explicit_duplicates_are_rejected() {
        let err = build_ring(3, &PlacementStrategy::Explicit(vec![1, 2, 1]), 0).unwrap_err();
        assert_eq!(err, ConfigError::DuplicateId { id: 1 });
    }

    #[test]
    fn explicit_wrong_length_is_rejected() {
        let err = build_ring(4, &PlacementStrategy::Explicit(vec![1, 2, 3]), 0).unwrap_err();
        assert_eq!(
            err,
            ConfigError::WrongLength {
                expected: 4,
                actual: 3
            }
        );
    }

    #[test]
    fn empty_rings_are_rejected() {
        assert_eq!(
            build_ring(0, &PlacementStrategy::Random, 0).unwrap_err(),
            ConfigError::ZeroNodes
        );
    }

    #[test]
    fn neighbors_wrap_around() {
        let cfg = build_ring(4, &PlacementStrategy::CrBest, 0).unwrap();
        assert_eq!(cfg.neighbors(0).unwrap(), (3, 1));
        assert_eq!(cfg.neighbors(3).unwrap(), (2, 0));
    }

    #[test]
    fn degenerate_ring_is_its_own_neighbor() {
        let cfg = build_ring(1, &PlacementStrategy::CrBest, 0).unwrap();
        assert_eq!(cfg.neighbors(0).unwrap(), (0, 0));
    }

    #[test]
    fn out_of_range_position_is_rejected() {
        let cfg = build_ring(4, &PlacementStrategy::CrBest, 0).unwrap();
        assert_eq!(
            cfg.neighbors(4).unwrap_err(),
            ConfigError::PositionOutOfRange { position: 4, n: 4 }
        );
    }

    #[test]
    fn uniform_below_stays_in_range_and_is_deterministic() {
        let mut a = seeded_rng(1);
        let mut b = seeded_rng(1);
        for bound in [1, 2, 3, 7, 1 << 40] {
            for _ in 0..100 {
                let x = uniform_below(&mut a, bound);
                assert!(x < bound);
                assert_eq!(x, uniform_below(&mut b, bound));
            }
        }
    }

    proptest! {
        #[test]
        fn every_strategy_yields_a_permutation(
            n in 1usize..64,
            seed in any::<u64>(),
            pick in 0usize..3,
        ) {
            let strategy = match pick {
                0 => PlacementStrategy::Random,
                1 => PlacementStrategy::CrWorst,
                _ => PlacementStrategy::CrBest,
            };
            let cfg = build_ring(n, &strategy, seed).unwrap();
            let mut got = ids(&cfg);
            got.sort_unstable();
            prop_assert_eq!(got, (0..n as u64).collect::<Vec<_>>());
        }

        #[test]
        fn successor_and_predecessor_are_inverse(n in 1usize..64, pos in 0usize..64) {
            let pos = pos % n;
            let cfg = build_ring(n, &PlacementStrategy::CrBest, 0).unwrap();
            let (pred, succ) = cfg.neighbors(pos).unwrap();
            prop_assert_eq!(cfg.predecessor(succ), pos);
            prop_assert_eq!(cfg.successor(pred), pos);
        }
    }
}
