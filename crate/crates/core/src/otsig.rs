//! Lamport-style one-time signatures on top of the one-way function.
//!
//! A key set for `k`-bit messages holds `2k` independent key pairs, one per
//! (position, bit value). Signing reveals the private factor `P` selected by
//! each message bit; verifying checks each revealed factor against the
//! matching public key. Revealing both factors at any position would let
//! anyone sign the flipped bit, so a key set signs at most once.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf::{Polynomial, Prime};
use crate::owf::{keygen, verify_proof, KeyPair, OwfError, PublicKey, Rejection};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SigError {
    #[error(transparent)]
    Owf(#[from] OwfError),
    #[error("message length must be at least 1 bit")]
    InvalidBitLength,
    #[error("length mismatch: key set signs {expected}-bit messages, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("this one-time key set has already signed a message")]
    KeyAlreadyUsed,
    #[error("invalid bit string: {0}")]
    InvalidBitString(String),
    #[error("malformed key set: {0}")]
    Malformed(String),
}

/// A fixed-length message. Bit `i` is the `i`-th character of the written
/// form, so `"10"` has bit 0 set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn flipped(&self, i: usize) -> BitString {
        let mut bits = self.0.clone();
        bits[i] = !bits[i];
        BitString(bits)
    }
}

impl FromStr for BitString {
    type Err = SigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(SigError::InvalidBitString(format!(
                    "unexpected character {c:?}"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Seed for the key committing bit value `bit` at position `index`: output
/// number `2*index + bit` of SplitMix64 seeded with the master seed.
pub fn derived_seed(master: u64, index: usize, bit: usize) -> u64 {
    SplitMix64::nth_output(master, (2 * index + bit) as u64)
}

/// The `k x 2` grid of public keys; entry `[i][b]` commits bit value `b` at position `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LamportPublicKey {
    p: Prime,
    keys: Vec<[PublicKey; 2]>,
}

impl LamportPublicKey {
    pub fn new(p: Prime, keys: Vec<[PublicKey; 2]>) -> Result<Self, SigError> {
        if keys.is_empty() {
            return Err(SigError::InvalidBitLength);
        }
        if keys.iter().flatten().any(|k| k.modulus() != p) {
            return Err(SigError::Malformed("public keys disagree on p".into()));
        }
        Ok(LamportPublicKey { p, keys })
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn bits(&self) -> usize {
        self.keys.len()
    }

    pub fn key(&self, index: usize, bit: usize) -> &PublicKey {
        &self.keys[index][bit]
    }

    pub fn keys(&self) -> &[[PublicKey; 2]] {
        &self.keys
    }
}

/// The private side: `2k` key pairs plus the one-time `used` flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LamportKeySet {
    p: Prime,
    seed: u64,
    pairs: Vec<[KeyPair; 2]>,
    used: bool,
}

impl LamportKeySet {
    /// Reassembles a key set; every pair must share `p` and carry the seed the
    /// schedule assigns to its slot.
    pub fn from_parts(
        p: Prime,
        seed: u64,
        pairs: Vec<[KeyPair; 2]>,
        used: bool,
    ) -> Result<Self, SigError> {
        if pairs.is_empty() {
            return Err(SigError::InvalidBitLength);
        }
        for (i, slot) in pairs.iter().enumerate() {
            for (b, kp) in slot.iter().enumerate() {
                if kp.modulus() != p {
                    return Err(SigError::Malformed(format!(
                        "key [{i}][{b}] has a different p"
                    )));
                }
                if kp.seed() != derived_seed(seed, i, b) {
                    return Err(SigError::Malformed(format!(
                        "key [{i}][{b}] does not follow the seed schedule"
                    )));
                }
            }
        }
        Ok(LamportKeySet {
            p,
            seed,
            pairs,
            used,
        })
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bits(&self) -> usize {
        self.pairs.len()
    }

    pub fn pair(&self, index: usize, bit: usize) -> &KeyPair {
        &self.pairs[index][bit]
    }

    pub fn pairs(&self) -> &[[KeyPair; 2]] {
        &self.pairs
    }

    pub fn is_used(&self) -> bool {
        self.used
    }

    pub fn public(&self) -> LamportPublicKey {
        LamportPublicKey {
            p: self.p,
            keys: self
                .pairs
                .iter()
                .map(|[zero, one]| [zero.public().clone(), one.public().clone()])
                .collect(),
        }
    }
}

/// The revealed private factors, one per message bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    p: Prime,
    message: BitString,
    revealed: Vec<Polynomial>,
}

impl Signature {
    /// Each revealed factor must be monic of degree `(p-1)/2`.
    pub fn new(p: Prime, message: BitString, revealed: Vec<Polynomial>) -> Result<Self, SigError> {
        if message.len() != revealed.len() {
            return Err(SigError::LengthMismatch {
                expected: message.len(),
                found: revealed.len(),
            });
        }
        if message.is_empty() {
            return Err(SigError::InvalidBitLength);
        }
        for (i, f) in revealed.iter().enumerate() {
            if f.modulus() != p || !f.is_monic() || f.degree() != Some(p.half()) {
                return Err(SigError::Malformed(format!(
                    "revealed[{i}] is not monic of degree {}",
                    p.half()
                )));
            }
        }
        Ok(Signature {
            p,
            message,
            revealed,
        })
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn message(&self) -> &BitString {
        &self.message
    }

    pub fn revealed(&self) -> &[Polynomial] {
        &self.revealed
    }

    /// Replaces one revealed factor, bypassing the shape checks. Test support
    /// for substitution experiments.
    pub fn with_revealed(&self, index: usize, factor: Polynomial) -> Signature {
        let mut sig = self.clone();
        sig.revealed[index] = factor;
        sig
    }
}

/// Generates `2k` key pairs from seeds derived by [`derived_seed`].
pub fn lamport_keygen(
    p: Prime,
    bits: usize,
    seed: u64,
) -> Result<(LamportPublicKey, LamportKeySet), SigError> {
    if bits < 1 {
        return Err(SigError::InvalidBitLength);
    }
    let pairs = (0..bits)
        .map(|i| -> Result<[KeyPair; 2], OwfError> {
            Ok([
                keygen(p, derived_seed(seed, i, 0))?,
                keygen(p, derived_seed(seed, i, 1))?,
            ])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let private = LamportKeySet {
        p,
        seed,
        pairs,
        used: false,
    };
    Ok((private.public(), private))
}

/// Reveals `pairs[i][message[i]].P` for every `i` and marks the key set used.
///
/// Callers that persist the key set must write the used flag back before
/// releasing the signature.
pub fn sign(keys: &mut LamportKeySet, message: &BitString) -> Result<Signature, SigError> {
    if keys.used {
        return Err(SigError::KeyAlreadyUsed);
    }
    if message.len() != keys.bits() {
        return Err(SigError::LengthMismatch {
            expected: keys.bits(),
            found: message.len(),
        });
    }
    let revealed = message
        .bits()
        .iter()
        .zip(&keys.pairs)
        .map(|(&b, slot)| slot[usize::from(b)].p().clone())
        .collect();
    keys.used = true;
    Ok(Signature {
        p: keys.p,
        message: message.clone(),
        revealed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigVerdict {
    Accept,
    /// The signature is over a different message than the one presented.
    MessageMismatch,
    /// Position `index` failed verification.
    Reject {
        index: usize,
        rejection: Rejection,
    },
}

impl SigVerdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, SigVerdict::Accept)
    }
}

impl fmt::Display for SigVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SigVerdict::Accept => f.write_str("accept"),
            SigVerdict::MessageMismatch => {
                f.write_str("signature was made over a different message")
            }
            SigVerdict::Reject { index, rejection } => write!(f, "bit {index}: {rejection}"),
        }
    }
}

/// Accepts iff every revealed factor verifies against the public key selected
/// by the corresponding message bit.
pub fn verify_signature(
    public: &LamportPublicKey,
    message: &BitString,
    sig: &Signature,
) -> Result<SigVerdict, SigError> {
    if message.len() != public.bits() {
        return Err(SigError::LengthMismatch {
            expected: public.bits(),
            found: message.len(),
        });
    }
    if sig.revealed.len() != public.bits() {
        return Err(SigError::LengthMismatch {
            expected: public.bits(),
            found: sig.revealed.len(),
        });
    }
    if &sig.message != message {
        return Ok(SigVerdict::MessageMismatch);
    }
    for (i, (&b, factor)) in message.bits().iter().zip(&sig.revealed).enumerate() {
        let key = public.key(i, usize::from(b));
        if let Some(rejection) = verify_proof(key, factor)?.rejection() {
            return Ok(SigVerdict::Reject {
                index: i,
                rejection: rejection.clone(),
            });
        }
    }
    Ok(SigVerdict::Accept)
}
