//! Reproducible, order-independent random streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent randomness consumers within one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamTag {
    Messages = 1,
    LargeScale = 2,
    SmallScale = 3,
    Noise = 4,
    Decoder = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// ChaCha8 keyed by `(master_seed, trial_index)`, stream selected by `tag`.
pub fn stream_rng(master_seed: u64, trial_index: u64, tag: StreamTag) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(master_seed) ^ trial_index.rotate_left(32));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(tag as u64);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a = stream_rng(7, 3, StreamTag::Noise).next_u64();
        assert_eq!(a, stream_rng(7, 3, StreamTag::Noise).next_u64());
        assert_ne!(a, stream_rng(7, 4, StreamTag::Noise).next_u64());
        assert_ne!(a, stream_rng(7, 3, StreamTag::Messages).next_u64());
        assert_ne!(a, stream_rng(8, 3, StreamTag::Noise).next_u64());
    }
}
