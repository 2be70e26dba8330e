//! Deterministic per-replicate random streams.
//!
//! Replicate `i` of a run with master seed `m` draws from a ChaCha stream keyed by
//! SHA-256 over a fixed domain tag, `m` and `i`. Streams never overlap and do not
//! depend on how replicates are scheduled across threads.

use rand::SeedableRng;
use sha2::{Digest, Sha256};

pub type SimRng = rand_chacha::ChaCha8Rng;

const DOMAIN: &[u8] = b"critgraph:replicate:v1";

fn digest(master: u64, index: u64) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(DOMAIN);
    h.update(master.to_le_bytes());
    h.update(index.to_le_bytes());
    h.finalize().into()
}

/// 128-bit identifier of the stream used by replicate `index`.
pub fn replicate_seed(master: u64, index: u64) -> u128 {
    let d = digest(master, index);
    u128::from_le_bytes(d[..16].try_into().expect("16 bytes"))
}

pub fn replicate_rng(master: u64, index: u64) -> SimRng {
    SimRng::from_seed(digest(master, index))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Maps `f` over replicate indices `0..count`, in parallel when the `parallel` feature is on.
/// Output order is the index order either way.
pub fn par_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}
