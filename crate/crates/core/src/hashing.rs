//! SHA-256 digests and seed derivation.
//!
//! Every digest in the crate (hash commitments, commitment digests, sender
//! tags, hash-to-group, leader election) goes through [`sha256`], so
//! transcripts stay bit-stable across backends.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest as _, Sha256};

/// A 32-byte SHA-256 digest.
pub type Digest = [u8; 32];

pub fn sha256(bytes: &[u8]) -> Digest {
    Sha256::digest(bytes).into()
}

/// Digest over several length-prefixed parts, so `("ab", "c")` and
/// `("a", "bc")` never collide.
pub fn sha256_parts(parts: &[&[u8]]) -> Digest {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_be_bytes());
        hasher.update(part);
    }
    hasher.finalize().into()
}

/// Deterministic generator for `(seed, label, index)`.
///
/// Independent streams for the same seed are obtained by varying `label`
/// (e.g. polynomial sampling vs. encryption randomness).
pub fn derive_rng(seed: u64, label: &str, index: u64) -> ChaCha20Rng {
    let key = sha256_parts(&[
        b"escrowdkg/rng",
        label.as_bytes(),
        &seed.to_be_bytes(),
        &index.to_be_bytes(),
    ]);
    ChaCha20Rng::from_seed(key)
}

pub fn to_hex(digest: &Digest) -> String {
    hex::encode(digest)
}

/// Serde adapter for [`Digest`] as a hex string.
pub mod hex_digest {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &super::Digest, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(d))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<super::Digest, D::Error> {
        let bytes = hex::decode(String::deserialize(d)?).map_err(serde::de::Error::custom)?;
        bytes.try_into().map_err(|_| serde::de::Error::custom("digest must be 32 bytes"))
    }
}

/// Serde adapter for byte strings as hex.
pub mod hex_bytes {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(b))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        hex::decode(String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
