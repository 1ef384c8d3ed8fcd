//! Seed derivation.
//!
//! Every random quantity is drawn from a ChaCha8 stream keyed by
//! `(master seed, purpose, index)`. Disorder fields use one stream per
//! lattice site keyed by the site's coordinates, so `η(x)` is the same in
//! every box containing `x`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a stream is used for. Streams with different purposes never overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Disorder = 0x6469_736f,
    Field = 0x6669_656c,
    Replicate = 0x7265_706c,
    Walk = 0x7761_6c6b,
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for replicate `index` of `master` under `purpose`.
pub fn derive_seed(master: u64, purpose: Purpose, index: u64) -> u64 {
    splitmix(splitmix(splitmix(master) ^ purpose as u64) ^ index)
}

pub fn stream(master: u64, purpose: Purpose, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, purpose, index))
}

/// Stream for the single site `site` of an infinite-volume disorder realisation.
pub fn site_stream(seed: u64, site: &[i64]) -> ChaCha8Rng {
    let mut h = splitmix(seed ^ Purpose::Disorder as u64) ^ site.len() as u64;
    for &c in site {
        h = splitmix(h ^ c as u64);
    }
    ChaCha8Rng::seed_from_u64(h)
}
