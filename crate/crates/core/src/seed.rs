//! Deterministic derivation of child seeds from a root seed.

use sha2::{Digest, Sha256};

/// Child seed for `label` under `root` within the namespace `tag`.
pub fn derive_seed(tag: &str, root: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update((tag.len() as u64).to_le_bytes());
    hasher.update(tag.as_bytes());
    hasher.update(root.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest is 32 bytes"))
}
