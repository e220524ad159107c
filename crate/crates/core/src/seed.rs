//! Hierarchical seed derivation.
//!
//! A [`SeedPath`] names a random substream by a master seed plus a list of
//! `(label, index)` steps. The stream itself is a ChaCha8 generator keyed by
//! the SHA-256 digest of the path, so any worker can rebuild any substream
//! without shared state.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedPath {
    pub master: u64,
    pub path: Vec<(String, u64)>,
}

impl SeedPath {
    pub fn new(master: u64) -> Self {
        Self {
            master,
            path: Vec::new(),
        }
    }

    /// Extends the path by one step. The result depends only on
    /// `(self, label, index)`.
    pub fn derive(&self, label: &str, index: u64) -> SeedPath {
        let mut path = self.path.clone();
        path.push((label.to_owned(), index));
        SeedPath {
            master: self.master,
            path,
        }
    }

    pub fn key(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"coxnet/seed/v1");
        h.update(self.master.to_le_bytes());
        for (label, index) in &self.path {
            h.update((label.len() as u64).to_le_bytes());
            h.update(label.as_bytes());
            h.update(index.to_le_bytes());
        }
        let digest = h.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        key
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key())
    }
}

impl std::fmt::Display for SeedPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.master)?;
        for (label, index) in &self.path {
            write!(f, "/{label}:{index}")?;
        }
        Ok(())
    }
}

/// Free-function form of [`SeedPath::derive`].
pub fn derive_seed(master: &SeedPath, label: &str, index: u64) -> SeedPath {
    master.derive(label, index)
}
