//! Salted, iterated password digests (PBKDF2-HMAC-SHA256).

use pbkdf2::pbkdf2_hmac;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::Sha256;
use subtle::ConstantTimeEq;

pub const ALGORITHM: &str = "pbkdf2-hmac-sha256";
pub const MIN_ITERATIONS: u32 = 100_000;
pub const SALT_LEN: usize = 16;
pub const DIGEST_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KdfError {
    #[error("at least {MIN_ITERATIONS} iterations required, got {0}")]
    TooFewIterations(u32),
    #[error("unsupported algorithm `{0}`")]
    UnknownAlgorithm(String),
    #[error("malformed credential: {0}")]
    Malformed(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KdfParams {
    iterations: u32,
}

impl KdfParams {
    pub fn new(iterations: u32) -> Result<Self, KdfError> {
        if iterations < MIN_ITERATIONS {
            return Err(KdfError::TooFewIterations(iterations));
        }
        Ok(Self { iterations })
    }

    pub fn iterations(&self) -> u32 {
        self.iterations
    }
}

impl Default for KdfParams {
    fn default() -> Self {
        Self { iterations: MIN_ITERATIONS }
    }
}

/// A stored password digest together with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Credential {
    pub algorithm: String,
    pub iterations: u32,
    /// Hex.
    pub salt: String,
    /// Hex.
    pub digest: String,
}

fn derive(password: &str, salt: &[u8], iterations: u32) -> [u8; DIGEST_LEN] {
    let mut out = [0u8; DIGEST_LEN];
    pbkdf2_hmac::<Sha256>(password.as_bytes(), salt, iterations, &mut out);
    out
}

impl Credential {
    /// Digests `password` under a fresh random salt.
    pub fn create(password: &str, params: KdfParams) -> Self {
        let mut salt = [0u8; SALT_LEN];
        rand::rng().fill_bytes(&mut salt);
        Self::with_salt(password, &salt, params)
    }

    pub fn with_salt(password: &str, salt: &[u8], params: KdfParams) -> Self {
        Self {
            algorithm: ALGORITHM.to_string(),
            iterations: params.iterations,
            salt: hex::encode(salt),
            digest: hex::encode(derive(password, salt, params.iterations)),
        }
    }

    /// Checks `password` in constant time with respect to the digest.
    pub fn verify(&self, password: &str) -> Result<bool, KdfError> {
        if self.algorithm != ALGORITHM {
            return Err(KdfError::UnknownAlgorithm(self.algorithm.clone()));
        }
        if self.iterations < MIN_ITERATIONS {
            return Err(KdfError::TooFewIterations(self.iterations));
        }
        let salt = hex::decode(&self.salt).map_err(|_| KdfError::Malformed("salt"))?;
        let expected = hex::decode(&self.digest).map_err(|_| KdfError::Malformed("digest"))?;
        if expected.len() != DIGEST_LEN {
            return Err(KdfError::Malformed("digest length"));
        }
        let actual = derive(password, &salt, self.iterations);
        Ok(bool::from(actual.ct_eq(expected.as_slice())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_vector() {
        // RFC 7914 section 11, first PBKDF2-HMAC-SHA256 vector, at one
        // iteration through the raw function.
        let mut out = [0u8; 64];
        pbkdf2_hmac::<Sha256>(b"passwd", b"salt", 1, &mut out);
        assert_eq!(
            hex::encode(out),
            "55ac046e56e3089fec1691c22544b605f94185216dde0465e68b9d57c20dacbc\
             49ca9cccf179b645991664b39d77ef317c71b845b1e30bd509112041d3a19783"
        );
    }

    #[test]
    fn verify_roundtrip() {
        let c = Credential::create("correct horse", KdfParams::default());
        assert_eq!(c.iterations, MIN_ITERATIONS);
        assert!(c.verify("correct horse").unwrap());
        assert!(!c.verify("correct hors").unwrap());
    }

    #[test]
    fn same_password_different_salt() {
        let a = Credential::create("hunter2hunter2", KdfParams::default());
        let b = Credential::create("hunter2hunter2", KdfParams::default());
        assert_ne!(a.salt, b.salt);
        assert_ne!(a.digest, b.digest);
    }

    #[test]
    fn weak_parameters_rejected() {
        assert_eq!(KdfParams::new(1000), Err(KdfError::TooFewIterations(1000)));
        let mut c = Credential::with_salt("password1", b"0123456789abcdef", KdfParams::default());
        c.iterations = 10;
        assert!(c.verify("password1").is_err());
        c.iterations = MIN_ITERATIONS;
        c.algorithm = "md5".into();
        assert!(matches!(c.verify("password1"), Err(KdfError::UnknownAlgorithm(_))));
    }
}
