//! A candidate one-way function over GF(p)\[x\].
//!
//! Split the roots of `x^(p-1) - 1 = ∏ (x - j)` into two halves `P` and `Q`;
//! the public key is `A = P^-1 mod Q`, found by the extended Euclidean
//! algorithm. This crate provides the field and polynomial arithmetic
//! ([`gf`]), key generation and verification ([`owf`]), an exhaustive
//! inversion and uniqueness laboratory ([`lab`]), Lamport-style one-time
//! signatures ([`otsig`]), and the text and CSV formats that carry all of it
//! ([`codec`]).

pub mod codec;
pub mod gf;
pub mod lab;
pub mod otsig;
pub mod owf;
pub mod rng;

pub use gf::{mod_inverse, Fp, GfError, Polynomial, Prime, RootSet};
pub use lab::{
    brute_force_invert, count_search_space, uniqueness_survey, verify_report, AttackOptions,
    AttackResult, LabError, Pairing, SearchMode, SurveyOptions, SurveyReport,
};
pub use otsig::{
    lamport_keygen, sign, verify_signature, BitString, LamportKeySet, LamportPublicKey, Signature,
};
pub use owf::{
    derive_bezout, derive_public_key, keygen, sample_balanced_factorization, verify_proof,
    BalancedFactorPair, FactorPair, KeyPair, OwfError, Proof, PublicKey, Rejection, Verdict,
};
pub use rng::SplitMix64;
