//! Seed derivation for experiment cells.
//!
//! A cell seed is computed from the master seed and a list of string labels
//! (for example `["Asthma", "tfidf_svm", "fold", "3"]`): the labels are
//! hashed with 64-bit FNV-1a, each label followed by a `0x00` separator byte,
//! and the hash is combined with the master seed through one SplitMix64
//! finalization round:
//!
//! ```text
//! seed = splitmix64(master ^ fnv1a64(label_0 0x00 label_1 0x00 ...))
//! ```
//!
//! Seeds never depend on execution order, so adding a representation or
//! running cells in parallel leaves every other cell untouched.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, labels: &[&str]) -> u64 {
    let mut bytes = Vec::new();
    for label in labels {
        bytes.extend_from_slice(label.as_bytes());
        bytes.push(0);
    }
    splitmix64(master ^ fnv1a64(&bytes))
}
