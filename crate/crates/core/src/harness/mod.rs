//! Instance generation, isomorphism-free enumeration and brute-force oracles.

pub mod canon;
pub mod generate;
pub mod oracle;

pub use generate::{
    generate, subdivide, write_corpus, GenerateError, Generator, GeneratorSpec, Mode,
};
pub use oracle::{oracle_collapsible, oracle_shelling, oracle_wsat, OracleRefused};
