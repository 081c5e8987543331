//! Fixture builders shared by the benchmarks.

use phaselab::state::seeded_random_state;
use phaselab::FockVector;

/// Seed used for every benchmark fixture.
pub const FIXTURE_SEED: u64 = 2024;

pub fn random_states(n_trunc: usize, count: usize) -> Vec<FockVector> {
    (0..count as u64).map(|i| seeded_random_state(n_trunc, FIXTURE_SEED, i)).collect()
}
