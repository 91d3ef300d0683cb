//! Per-component seeds derived from one master seed.

use sha2::{Digest, Sha256};

/// First eight bytes (little endian) of `SHA-256(label || 0x00 || master_le)`.
///
/// Each consumer hashes its own label, so adding a new consumer leaves the streams of
/// the existing ones untouched.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(label.as_bytes());
    h.update([0u8]);
    h.update(master.to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_separate_streams() {
        assert_eq!(derive_seed(7, "wind"), derive_seed(7, "wind"));
        assert_ne!(derive_seed(7, "wind"), derive_seed(7, "monte-carlo"));
        assert_ne!(derive_seed(7, "wind"), derive_seed(8, "wind"));
        // label/seed boundary is unambiguous
        assert_ne!(derive_seed(0, "a"), derive_seed(0, "a\0"));
    }
}
