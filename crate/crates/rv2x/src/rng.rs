//! Named random substreams.
//!
//! Every random draw in a run comes from a stream identified by
//! `(seed, trial, link, purpose)`, so a trial produces the same numbers no
//! matter which worker runs it or in which order trials complete.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream type used throughout the simulator.
pub type RandomStream = ChaCha8Rng;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u16)]
pub enum Purpose {
    Topology = 1,
    Shadowing = 2,
    SmallScale = 3,
    V2vError = 4,
    InterferenceError = 5,
    Oracle = 6,
}

/// Open the substream for one `(trial, link, purpose)` triple.
pub fn stream(seed: u64, trial: u32, link: u16, purpose: Purpose) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = (u64::from(trial) << 32) | (u64::from(link) << 16) | purpose as u64;
    rng.set_stream(id);
    rng
}
