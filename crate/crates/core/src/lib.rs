//! Zero-knowledge toolkit for verifiable V2X perception exchange.
//!
//! The pipeline runs bottom-up: [`field`] arithmetic, the [`pairing`] groups,
//! constraint systems in [`r1cs`], the [`qap`] reduction, [`groth16`]
//! setup/prove/verify, arithmetic-friendly [`commitment`]s, the signed
//! [`protocol`] packages, and the two case-study circuits [`rss`] and
//! [`audit`].

pub mod audit;
pub mod codec;
pub mod commitment;
pub mod field;
pub mod groth16;
pub mod pairing;
pub mod protocol;
pub mod qap;
pub mod r1cs;
pub mod rss;
