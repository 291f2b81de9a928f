//! Resource caps shared by the oracle-backed modules.

/// Largest `n` for which partitions are enumerated.
pub const DEFAULT_ENUMERATION_CAP: usize = 60;
/// Largest `n` for which character tables and Kronecker coefficients are computed.
pub const DEFAULT_ORACLE_CAP: usize = 20;
/// Largest `n` for which full support products are iterated.
pub const DEFAULT_PRODUCT_CAP: usize = 14;
/// Largest `n` accepted by the uniform sampler.
pub const DEFAULT_UNIFORM_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub enumeration: usize,
    pub oracle: usize,
    pub product: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            enumeration: DEFAULT_ENUMERATION_CAP,
            oracle: DEFAULT_ORACLE_CAP,
            product: DEFAULT_PRODUCT_CAP,
        }
    }
}

impl Caps {
    /// Caps with a single oracle limit; products share it.
    pub fn with_oracle(oracle: usize) -> Self {
        Caps {
            oracle,
            product: oracle,
            ..Caps::default()
        }
    }
}
