//! The one-way function itself.
//!
//! A private key is a balanced split of the roots `{1, ..., p-1}` into two
//! halves, giving `x^(p-1) - 1 = P * Q` with `deg P = deg Q = (p-1)/2`. The
//! public key is the inverse of `P` modulo `Q`: the unique `A` with
//! `deg A < deg Q` and `A*P + B*Q = 1`. Computing `A` from `(P, Q)` is one run
//! of the extended Euclidean algorithm; recovering `P` from `A` is, as far as
//! anyone knows, a search over all balanced splits.

use std::fmt;

use thiserror::Error;

use crate::gf::{GfError, Polynomial, Prime, RootSet};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OwfError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error("factors are not coprime")]
    NotCoprime,
    #[error("factor pair is not balanced: deg P = {deg_p}, deg Q = {deg_q}")]
    Unbalanced { deg_p: usize, deg_q: usize },
    #[error("malformed key: {0}")]
    MalformedKey(String),
}

impl OwfError {
    fn malformed(msg: impl Into<String>) -> Self {
        OwfError::MalformedKey(msg.into())
    }
}

/// An ordered factorization `x^(p-1) - 1 = P * Q` by complementary root sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorPair {
    roots_p: RootSet,
    roots_q: RootSet,
    p_poly: Polynomial,
    q_poly: Polynomial,
}

impl FactorPair {
    /// Builds `P` from `roots_p` and `Q` from the complementary roots.
    pub fn from_roots(roots_p: RootSet) -> Result<Self, OwfError> {
        let roots_q = roots_p.complement();
        let p_poly = Polynomial::from_roots(&roots_p);
        let q_poly = Polynomial::from_roots(&roots_q);
        let pair = FactorPair {
            roots_p,
            roots_q,
            p_poly,
            q_poly,
        };
        debug_assert_eq!(
            pair.p_poly.mul(&pair.q_poly).ok(),
            Some(Polynomial::fermat(pair.modulus()))
        );
        Ok(pair)
    }

    pub fn modulus(&self) -> Prime {
        self.roots_p.modulus()
    }

    pub fn roots_p(&self) -> &RootSet {
        &self.roots_p
    }

    pub fn roots_q(&self) -> &RootSet {
        &self.roots_q
    }

    pub fn p(&self) -> &Polynomial {
        &self.p_poly
    }

    pub fn q(&self) -> &Polynomial {
        &self.q_poly
    }

    /// The same factorization with the roles of `P` and `Q` exchanged.
    pub fn swapped(&self) -> FactorPair {
        FactorPair {
            roots_p: self.roots_q.clone(),
            roots_q: self.roots_p.clone(),
            p_poly: self.q_poly.clone(),
            q_poly: self.p_poly.clone(),
        }
    }

    pub fn is_balanced(&self) -> bool {
        self.roots_p.len() == self.roots_q.len()
    }
}

/// A [`FactorPair`] with `deg P = deg Q = (p-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancedFactorPair(FactorPair);

impl BalancedFactorPair {
    pub fn new(pair: FactorPair) -> Result<Self, OwfError> {
        if !pair.is_balanced() {
            return Err(OwfError::Unbalanced {
                deg_p: pair.roots_p.len(),
                deg_q: pair.roots_q.len(),
            });
        }
        Ok(BalancedFactorPair(pair))
    }

    pub fn from_roots(roots_p: RootSet) -> Result<Self, OwfError> {
        Self::new(FactorPair::from_roots(roots_p)?)
    }

    pub fn into_inner(self) -> FactorPair {
        self.0
    }
}

impl std::ops::Deref for BalancedFactorPair {
    type Target = FactorPair;

    fn deref(&self) -> &FactorPair {
        &self.0
    }
}

/// Draws a uniformly random balanced split.
///
/// Runs a partial Fisher-Yates shuffle over `[1, ..., p-1]`, drawing each swap
/// index with [`SplitMix64::below`], and keeps the first `(p-1)/2` entries.
pub fn sample_balanced_factorization(p: Prime, rng: &mut SplitMix64) -> BalancedFactorPair {
    let mut pool: Vec<u32> = (1..p.get() as u32).collect();
    let n = pool.len();
    let m = p.half();
    for i in 0..m {
        let j = i + rng.below((n - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(m);
    let roots = RootSet::from_unsorted(p, pool).expect("distinct residues in range");
    BalancedFactorPair::from_roots(roots).expect("balanced by construction")
}

/// The canonical Bézout coefficients `(A, B)` of a factor pair:
/// `A*P + B*Q = 1` with `deg A < deg Q` and `deg B < deg P`.
///
/// Works for unbalanced pairs too; exchanging the roles of `P` and `Q`
/// exchanges `A` and `B`.
pub fn derive_bezout(pair: &FactorPair) -> Result<(Polynomial, Polynomial), OwfError> {
    let (d, a, b) = Polynomial::ext_gcd(&pair.p_poly, &pair.q_poly)?;
    if !d.is_one() {
        return Err(OwfError::NotCoprime);
    }
    Ok((a, b))
}

/// Publishes `A`, the inverse of `P` modulo `Q`, along with the witness `B`.
pub fn derive_public_key(pair: &BalancedFactorPair) -> Result<(PublicKey, Polynomial), OwfError> {
    let (a, b) = derive_bezout(pair)?;
    Ok((PublicKey::new(pair.modulus(), a)?, b))
}

/// The public half: a prime and the canonical inverse `A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PublicKey {
    p: Prime,
    a: Polynomial,
}

impl PublicKey {
    /// Checks that `A` is nonzero, reduced mod `p`, and of degree below `(p-1)/2`.
    pub fn new(p: Prime, a: Polynomial) -> Result<Self, OwfError> {
        if a.modulus() != p {
            return Err(GfError::ModulusMismatch {
                left: p.get(),
                right: a.modulus().get(),
            }
            .into());
        }
        match a.degree() {
            None => Err(OwfError::malformed("A is the zero polynomial")),
            Some(d) if d >= p.half() => Err(OwfError::malformed(format!(
                "deg A = {d} is not below (p-1)/2 = {}",
                p.half()
            ))),
            Some(_) => Ok(PublicKey { p, a }),
        }
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn a(&self) -> &Polynomial {
        &self.a
    }
}

/// A revealed private factor, as presented to a verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    p: Prime,
    factor: Polynomial,
}

impl Proof {
    pub fn new(p: Prime, factor: Polynomial) -> Result<Self, OwfError> {
        if factor.modulus() != p {
            return Err(GfError::ModulusMismatch {
                left: p.get(),
                right: factor.modulus().get(),
            }
            .into());
        }
        Ok(Proof { p, factor })
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn factor(&self) -> &Polynomial {
        &self.factor
    }
}

/// The first verification check a candidate factor failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    /// (a) `P` must be monic of degree `(p-1)/2`.
    Shape {
        expected: usize,
        degree: Option<usize>,
        monic: bool,
    },
    /// (b) `P` must divide `x^(p-1) - 1`.
    NotAFactor,
    /// (c) `A*P mod Q` must equal 1; carries the residue actually obtained.
    Congruence { residue: Polynomial },
    /// (d) `deg A` must be below `deg Q`.
    NonCanonicalKey,
}

impl Rejection {
    /// The letter of the failed check, `'a'` through `'d'`.
    pub fn check(&self) -> char {
        match self {
            Rejection::Shape { .. } => 'a',
            Rejection::NotAFactor => 'b',
            Rejection::Congruence { .. } => 'c',
            Rejection::NonCanonicalKey => 'd',
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "check ({}): ", self.check())?;
        match self {
            Rejection::Shape {
                expected,
                degree,
                monic,
            } => {
                let degree = degree.map_or_else(|| "-inf".to_string(), |d| d.to_string());
                if !monic {
                    write!(f, "P is not monic (degree {degree}, expected {expected})")
                } else {
                    write!(f, "P has degree {degree}, expected {expected}")
                }
            }
            Rejection::NotAFactor => f.write_str("P does not divide x^(p-1) - 1"),
            Rejection::Congruence { residue } => {
                write!(f, "A*P mod Q = {residue}, expected 1")
            }
            Rejection::NonCanonicalKey => f.write_str("deg A is not below deg Q"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }

    pub fn rejection(&self) -> Option<&Rejection> {
        match self {
            Verdict::Accept => None,
            Verdict::Reject(r) => Some(r),
        }
    }
}

/// Decides whether `factor` is a valid private factor for `key`.
///
/// `Q` is recomputed as `(x^(p-1) - 1) / P`; nothing but `P` is trusted. Since
/// `x^(p-1) - 1` is squarefree mod `p`, passing the divisibility check also
/// means `P` splits into distinct linear factors.
pub fn verify_proof(key: &PublicKey, factor: &Polynomial) -> Result<Verdict, OwfError> {
    let p = key.p;
    if factor.modulus() != p {
        return Err(GfError::ModulusMismatch {
            left: p.get(),
            right: factor.modulus().get(),
        }
        .into());
    }
    let half = p.half();
    if factor.degree() != Some(half) || !factor.is_monic() {
        return Ok(Verdict::Reject(Rejection::Shape {
            expected: half,
            degree: factor.degree(),
            monic: factor.is_monic(),
        }));
    }
    let (q, r) = Polynomial::fermat(p).div_rem(factor)?;
    if !r.is_zero() {
        return Ok(Verdict::Reject(Rejection::NotAFactor));
    }
    let residue = key.a.mul(factor)?.rem(&q)?;
    if !residue.is_one() {
        return Ok(Verdict::Reject(Rejection::Congruence { residue }));
    }
    if key.a.degree() >= q.degree() {
        return Ok(Verdict::Reject(Rejection::NonCanonicalKey));
    }
    Ok(Verdict::Accept)
}

/// Everything produced by [`keygen`]. `B` and `P` are secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyPair {
    public: PublicKey,
    roots_p: RootSet,
    p_poly: Polynomial,
    b: Polynomial,
    seed: u64,
}

impl KeyPair {
    /// Reassembles a key pair, re-checking every invariant.
    pub fn from_parts(
        public: PublicKey,
        roots_p: RootSet,
        p_poly: Polynomial,
        b: Polynomial,
        seed: u64,
    ) -> Result<Self, OwfError> {
        let p = public.p;
        if roots_p.modulus() != p || p_poly.modulus() != p || b.modulus() != p {
            return Err(OwfError::malformed("components disagree on p"));
        }
        let pair = BalancedFactorPair::from_roots(roots_p)?;
        if pair.p() != &p_poly {
            return Err(OwfError::malformed(
                "P is not the product of (x - j) over rootsP",
            ));
        }
        if b.degree() >= p_poly.degree() {
            return Err(OwfError::malformed("deg B is not below deg P"));
        }
        let identity = public.a.mul(pair.p())?.add(&b.mul(pair.q())?)?;
        if !identity.is_one() {
            return Err(OwfError::malformed("A*P + B*Q != 1"));
        }
        Ok(KeyPair {
            public,
            roots_p: pair.0.roots_p,
            p_poly,
            b,
            seed,
        })
    }

    pub fn public(&self) -> &PublicKey {
        &self.public
    }

    pub fn modulus(&self) -> Prime {
        self.public.p
    }

    pub fn roots_p(&self) -> &RootSet {
        &self.roots_p
    }

    /// The private factor `P`.
    pub fn p(&self) -> &Polynomial {
        &self.p_poly
    }

    /// The cofactor `Q = (x^(p-1) - 1) / P`.
    pub fn q(&self) -> Polynomial {
        Polynomial::from_roots(&self.roots_p.complement())
    }

    /// The Bézout witness `B` with `A*P + B*Q = 1`.
    pub fn b(&self) -> &Polynomial {
        &self.b
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn proof(&self) -> Proof {
        Proof {
            p: self.public.p,
            factor: self.p_poly.clone(),
        }
    }
}

/// Samples a balanced split from `seed` and derives its public key.
pub fn keygen(p: Prime, seed: u64) -> Result<KeyPair, OwfError> {
    let mut rng = SplitMix64::new(seed);
    let pair = sample_balanced_factorization(p, &mut rng);
    let (public, b) = derive_public_key(&pair)?;
    let pair = pair.into_inner();
    Ok(KeyPair {
        public,
        roots_p: pair.roots_p,
        p_poly: pair.p_poly,
        b,
        seed,
    })
}

/// Primes below this bound get a warning from [`experimental_warning`].
pub const EXPERIMENTAL_BELOW: u64 = 64;

/// A human-readable warning when `p` is small enough to invert by exhaustive search.
pub fn experimental_warning(p: Prime) -> Option<String> {
    (p.get() < EXPERIMENTAL_BELOW).then(|| {
        format!(
            "warning: p = {p} is an experimental parameter; keys at this size can be inverted by exhaustive search"
        )
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn poly(p: u64, c: &[u64]) -> Polynomial {
        Polynomial::new(prime(p), c.to_vec())
    }

    fn roots(p: u64, r: &[u32]) -> RootSet {
        RootSet::new(prime(p), r.to_vec()).unwrap()
    }

    #[test]
    fn factor_pair_invariants() {
        let pair = FactorPair::from_roots(roots(5, &[1, 2])).unwrap();
        assert_eq!(pair.p(), &poly(5, &[2, 2, 1]));
        assert_eq!(pair.q(), &poly(5, &[2, 3, 1]));
        assert_eq!(pair.roots_q().as_slice(), &[3, 4]);
        assert_eq!(
            pair.p().mul(pair.q()).unwrap(),
            Polynomial::fermat(prime(5))
        );
        assert!(BalancedFactorPair::new(pair).is_ok());

        let lopsided = FactorPair::from_roots(roots(7, &[1])).unwrap();
        assert_eq!(
            BalancedFactorPair::new(lopsided),
            Err(OwfError::Unbalanced { deg_p: 1, deg_q: 5 })
        );
    }

    #[test]
    fn p3_has_two_pairs() {
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..64 {
            let pair = sample_balanced_factorization(prime(3), &mut SplitMix64::new(seed));
            seen.insert((pair.p().coeffs().to_vec(), pair.q().coeffs().to_vec()));
        }
        let expected: std::collections::BTreeSet<_> =
            [(vec![2, 1], vec![1, 1]), (vec![1, 1], vec![2, 1])]
                .into_iter()
                .collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn p5_sampler_hits_all_six_splits() {
        let mut counts = std::collections::BTreeMap::new();
        let mut rng = SplitMix64::new(99);
        for _ in 0..6000 {
            let pair = sample_balanced_factorization(prime(5), &mut rng);
            *counts
                .entry(pair.roots_p().as_slice().to_vec())
                .or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 6);
        assert!(
            counts.values().all(|&c| (850..1150).contains(&c)),
            "{counts:?}"
        );
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_balanced_factorization(prime(23), &mut SplitMix64::new(5));
        let b = sample_balanced_factorization(prime(23), &mut SplitMix64::new(5));
        assert_eq!(a, b);
    }

    #[test]
    fn worked_public_keys() {
        let pair = BalancedFactorPair::from_roots(roots(3, &[1])).unwrap();
        assert_eq!(pair.p(), &poly(3, &[2, 1]));
        let (pk, b) = derive_public_key(&pair).unwrap();
        assert_eq!(pk.a(), &poly(3, &[1]));
        assert_eq!(b, poly(3, &[2]));

        let pair = BalancedFactorPair::from_roots(roots(5, &[1, 2])).unwrap();
        let (pk, b) = derive_public_key(&pair).unwrap();
        assert_eq!(pk.a(), &poly(5, &[4, 3]));
        assert_eq!(b, poly(5, &[4, 2]));

        let swapped = BalancedFactorPair::new(pair.swapped()).unwrap();
        let (pk, b) = derive_public_key(&swapped).unwrap();
        assert_eq!(pk.a(), &poly(5, &[4, 2]));
        assert_eq!(b, poly(5, &[4, 3]));
    }

    #[test]
    fn bezout_works_for_unbalanced_pairs() {
        let pair = FactorPair::from_roots(roots(7, &[2, 5])).unwrap();
        let (a, b) = derive_bezout(&pair).unwrap();
        assert!(a.degree() < pair.q().degree());
        assert!(b.degree() < pair.p().degree());
        let lhs = a
            .mul(pair.p())
            .unwrap()
            .add(&b.mul(pair.q()).unwrap())
            .unwrap();
        assert!(lhs.is_one());
    }

    #[test]
    fn public_key_validation() {
        assert!(PublicKey::new(prime(5), poly(5, &[4, 3])).is_ok());
        assert!(matches!(
            PublicKey::new(prime(5), poly(5, &[])),
            Err(OwfError::MalformedKey(_))
        ));
        assert!(matches!(
            PublicKey::new(prime(5), poly(5, &[1, 0, 1])),
            Err(OwfError::MalformedKey(_))
        ));
        assert!(matches!(
            PublicKey::new(prime(5), poly(7, &[1])),
            Err(OwfError::Field(GfError::ModulusMismatch { .. }))
        ));
    }

    #[test]
    fn verify_examples() {
        let pk = PublicKey::new(prime(5), poly(5, &[4, 3])).unwrap();
        assert_eq!(
            verify_proof(&pk, &poly(5, &[2, 2, 1])).unwrap(),
            Verdict::Accept
        );

        let v = verify_proof(&pk, &poly(5, &[2, 3, 1])).unwrap();
        assert_eq!(
            v,
            Verdict::Reject(Rejection::Congruence {
                residue: poly(5, &[4, 3])
            })
        );
        assert_eq!(v.rejection().unwrap().check(), 'c');

        let v = verify_proof(&pk, &poly(5, &[4, 1])).unwrap();
        assert_eq!(v.rejection().unwrap().check(), 'a');
        assert!(v.rejection().unwrap().to_string().starts_with("check (a)"));

        // right degree, not monic
        let v = verify_proof(&pk, &poly(5, &[1, 1, 2])).unwrap();
        assert_eq!(v.rejection().unwrap().check(), 'a');

        // x^2 + 2 is irreducible mod 5
        let v = verify_proof(&pk, &poly(5, &[2, 0, 1])).unwrap();
        assert_eq!(v, Verdict::Reject(Rejection::NotAFactor));

        assert!(verify_proof(&pk, &poly(7, &[1, 1])).is_err());
    }

    #[test]
    fn keygen_at_p3_publishes_a_constant() {
        // Q = x - j forces A = P(j)^-1 = -j, so {1} -> A = 1 and {2} -> A = 2
        for seed in 0..50 {
            let kp = keygen(prime(3), seed).unwrap();
            let expected = if kp.roots_p().as_slice() == [1] { 1 } else { 2 };
            assert_eq!(kp.public().a(), &poly(3, &[expected]), "seed={seed}");
            let identity = kp
                .public()
                .a()
                .mul(kp.p())
                .unwrap()
                .add(&kp.b().mul(&kp.q()).unwrap());
            assert!(identity.unwrap().is_one());
        }
        assert_eq!(Prime::new(2), Err(GfError::InvalidPrime(2)));
    }

    #[test]
    fn keygen_round_trips() {
        for p in [3, 5, 7, 11, 13, 17, 19, 23] {
            for seed in 0..100 {
                let kp = keygen(prime(p), seed).unwrap();
                let q = kp.q();
                let lhs = kp
                    .public()
                    .a()
                    .mul(kp.p())
                    .unwrap()
                    .add(&kp.b().mul(&q).unwrap())
                    .unwrap()
                    .sub(&Polynomial::one(prime(p)))
                    .unwrap();
                assert!(lhs.is_zero(), "p={p} seed={seed}");
                assert!(kp.b().degree() < kp.p().degree());
                assert!(kp.public().a().degree() < q.degree());
                // A mod Q is a fixed point
                assert_eq!(&kp.public().a().rem(&q).unwrap(), kp.public().a());
                assert!(verify_proof(kp.public(), kp.p()).unwrap().is_accept());
            }
        }
    }

    #[test]
    fn keygen_is_deterministic() {
        assert_eq!(
            keygen(prime(31), 17).unwrap(),
            keygen(prime(31), 17).unwrap()
        );
        assert_ne!(
            keygen(prime(31), 17).unwrap().roots_p(),
            keygen(prime(31), 18).unwrap().roots_p()
        );
    }

    #[test]
    fn from_parts_rejects_tampering() {
        let kp = keygen(prime(11), 3).unwrap();
        let ok = KeyPair::from_parts(
            kp.public().clone(),
            kp.roots_p().clone(),
            kp.p().clone(),
            kp.b().clone(),
            kp.seed(),
        );
        assert_eq!(ok.as_ref(), Ok(&kp));

        let bad_b = kp.b().add(&Polynomial::one(prime(11))).unwrap();
        assert!(KeyPair::from_parts(
            kp.public().clone(),
            kp.roots_p().clone(),
            kp.p().clone(),
            bad_b,
            kp.seed()
        )
        .is_err());
    }

    #[test]
    fn warning_threshold() {
        assert!(experimental_warning(prime(61)).is_some());
        assert!(experimental_warning(prime(67)).is_none());
    }
}
