//! Counter-addressed unit normal draws.
//!
//! Draw `k` of stream `s` under seed `seed` is a pure function of
//! `(seed, s, k)`: the ChaCha8 keystream for `seed` is positioned on stream
//! `s` at word `2k`, and the 64-bit word there is mapped through the normal
//! quantile. Any chunking of the index range produces the same values.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::normal::standard_normal_quantile;

/// Maps 64 random bits to the open interval (0, 1).
#[inline]
fn open_unit(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Fills `out` with unit normal draws `start .. start + out.len()` of `stream`.
pub(crate) fn fill_unit_normals(seed: u64, stream: u64, start: u64, out: &mut [f64]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.set_word_pos(u128::from(start) * 2);
    for z in out.iter_mut() {
        *z = standard_normal_quantile(open_unit(rng.next_u64()));
    }
}
