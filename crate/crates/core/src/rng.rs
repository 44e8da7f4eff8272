//! Deterministic random streams.
//!
//! All randomness is drawn from ChaCha8 seeded with a `u64`; independent
//! trials use separate stream ids of the same seed, so results do not depend
//! on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{GridDomain, GridFunction};

pub type Stream = ChaCha8Rng;

/// Stream `id` of `seed`.
pub fn stream(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Independent uniform values in `[lo, hi)` per cell.
pub fn uniform(domain: GridDomain, rng: &mut Stream, lo: f64, hi: f64) -> GridFunction {
    let values = (0..domain.cell_count()).map(|_| rng.random_range(lo..hi)).collect();
    GridFunction::new(domain, values).expect("length matches")
}

/// Uniform values with a random sign.
pub fn signed(domain: GridDomain, rng: &mut Stream) -> GridFunction {
    uniform(domain, rng, -1.0, 1.0)
}
