//! Arithmetic in GF(p) and on dense polynomials over GF(p).
//!
//! Polynomials store their coefficients low-to-high: `coeffs[i]` is the
//! coefficient of `x^i`. The zero polynomial is the empty coefficient vector,
//! so "no trailing zeros" is the single canonical-form invariant. Its degree is
//! `None`, never `-1`.
//!
//! Everything here is immutable and pure; values can be shared freely across
//! threads.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GfError {
    #[error("invalid modulus {0}: expected an odd prime below 2^32")]
    InvalidPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("invalid root set: {0}")]
    InvalidRootSet(String),
}

/// An odd prime modulus `p` with `3 <= p < 2^32`.
///
/// The upper bound keeps every product of two reduced residues inside a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, GfError> {
        if p < 3 || p > u64::from(u32::MAX) || !is_prime(p) {
            return Err(GfError::InvalidPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    /// `(p - 1) / 2`, the degree of each factor in a balanced split.
    #[inline]
    pub fn half(self) -> usize {
        ((self.0 - 1) / 2) as usize
    }

    /// `p - 1`, the number of nonzero residues.
    #[inline]
    pub fn units(self) -> usize {
        (self.0 - 1) as usize
    }

    #[inline]
    fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }

    #[inline]
    fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    fn inv(self, a: u64) -> Result<u64, GfError> {
        let a = a % self.0;
        if a == 0 {
            return Err(GfError::ZeroInverse);
        }
        // integer extended Euclid on (a, p)
        let (mut r0, mut r1) = (self.0 as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Ok(t0.rem_euclid(self.0 as i64) as u64)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Deterministic trial division up to `sqrt(n)`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn check_same(a: Prime, b: Prime) -> Result<(), GfError> {
    if a == b {
        Ok(())
    } else {
        Err(GfError::ModulusMismatch {
            left: a.0,
            right: b.0,
        })
    }
}

/// An element of GF(p), always held in canonical form `0 <= value < p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    p: Prime,
}

impl Fp {
    pub fn new(value: u64, p: Prime) -> Self {
        Fp {
            value: value % p.0,
            p,
        }
    }

    pub fn from_i64(value: i64, p: Prime) -> Self {
        Fp {
            value: value.rem_euclid(p.0 as i64) as u64,
            p,
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.value
    }

    #[inline]
    pub fn modulus(self) -> Prime {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inverse(self) -> Result<Fp, GfError> {
        mod_inverse(self)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Returns `b` in `[1, p)` with `a * b = 1 (mod p)`.
pub fn mod_inverse(a: Fp) -> Result<Fp, GfError> {
    let value = a.p.inv(a.value)?;
    Ok(Fp { value, p: a.p })
}

/// A strictly increasing set of nonzero residues `{j_1 < ... < j_k} ⊆ [1, p-1]`.
///
/// A root set is the combinatorial identity of a factor of `x^(p-1) - 1`:
/// every such monic factor is `∏ (x - j)` over exactly one root set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootSet {
    p: Prime,
    roots: Vec<u32>,
}

impl RootSet {
    pub fn new(p: Prime, roots: Vec<u32>) -> Result<Self, GfError> {
        for w in roots.windows(2) {
            if w[0] >= w[1] {
                return Err(GfError::InvalidRootSet(format!(
                    "roots must be strictly increasing, found {} before {}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&r) = roots.iter().find(|&&r| r == 0 || u64::from(r) >= p.0) {
            return Err(GfError::InvalidRootSet(format!(
                "root {r} outside [1, {}]",
                p.0 - 1
            )));
        }
        Ok(RootSet { p, roots })
    }

    /// Sorts and deduplicates before validating the range.
    pub fn from_unsorted(p: Prime, mut roots: Vec<u32>) -> Result<Self, GfError> {
        roots.sort_unstable();
        roots.dedup();
        Self::new(p, roots)
    }

    /// `{1, ..., p-1}`.
    pub fn all(p: Prime) -> Self {
        RootSet {
            p,
            roots: (1..p.0 as u32).collect(),
        }
    }

    pub fn modulus(&self) -> Prime {
        self.p
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn contains(&self, j: u32) -> bool {
        self.roots.binary_search(&j).is_ok()
    }

    /// The roots of `[1, p-1]` not in this set.
    pub fn complement(&self) -> RootSet {
        let mut out = Vec::with_capacity(self.p.units() - self.roots.len());
        let mut mine = self.roots.iter().peekable();
        for j in 1..self.p.0 as u32 {
            if mine.peek() == Some(&&j) {
                mine.next();
            } else {
                out.push(j);
            }
        }
        RootSet {
            p: self.p,
            roots: out,
        }
    }

    pub fn is_disjoint(&self, other: &RootSet) -> bool {
        self.roots.iter().all(|&r| !other.contains(r))
    }

    pub fn union(&self, other: &RootSet) -> Result<RootSet, GfError> {
        check_same(self.p, other.p)?;
        let mut all = self.roots.clone();
        all.extend_from_slice(&other.roots);
        RootSet::from_unsorted(self.p, all)
    }
}

/// A dense polynomial over GF(p), low-to-high, canonically trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    p: Prime,
    coeffs: Vec<u64>,
}

impl Polynomial {
    /// Reduces every coefficient mod `p` and trims trailing zeros.
    pub fn new(p: Prime, coeffs: Vec<u64>) -> Self {
        let mut coeffs = coeffs;
        for c in coeffs.iter_mut() {
            *c %= p.0;
        }
        Self::trimmed(p, coeffs)
    }

    pub fn from_signed(p: Prime, coeffs: &[i64]) -> Self {
        let coeffs = coeffs
            .iter()
            .map(|&c| c.rem_euclid(p.0 as i64) as u64)
            .collect();
        Self::trimmed(p, coeffs)
    }

    fn trimmed(p: Prime, mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Polynomial { p, coeffs }
    }

    pub fn zero(p: Prime) -> Self {
        Polynomial {
            p,
            coeffs: Vec::new(),
        }
    }

    pub fn one(p: Prime) -> Self {
        Polynomial { p, coeffs: vec![1] }
    }

    pub fn constant(c: Fp) -> Self {
        Self::trimmed(c.p, vec![c.value])
    }

    /// `c * x^n`.
    pub fn monomial(c: Fp, n: usize) -> Self {
        if c.is_zero() {
            return Self::zero(c.p);
        }
        let mut coeffs = vec![0; n + 1];
        coeffs[n] = c.value;
        Polynomial { p: c.p, coeffs }
    }

    /// `x^(p-1) - 1`, the product of `(x - j)` over all nonzero `j`.
    pub fn fermat(p: Prime) -> Self {
        let mut coeffs = vec![0; p.units() + 1];
        coeffs[0] = p.0 - 1;
        coeffs[p.units()] = 1;
        Polynomial { p, coeffs }
    }

    #[inline]
    pub fn modulus(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    /// `None` for the zero polynomial.
    #[inline]
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading(&self) -> Fp {
        Fp {
            value: self.coeffs.last().copied().unwrap_or(0),
            p: self.p,
        }
    }

    pub fn coeff(&self, i: usize) -> Fp {
        Fp {
            value: self.coeffs.get(i).copied().unwrap_or(0),
            p: self.p,
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial, GfError> {
        check_same(self.p, other.p)?;
        let p = self.p;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                p.add(a, b)
            })
            .collect();
        Ok(Self::trimmed(p, coeffs))
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial, GfError> {
        check_same(self.p, other.p)?;
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        let p = self.p;
        Polynomial {
            p,
            coeffs: self.coeffs.iter().map(|&c| p.neg(c)).collect(),
        }
    }

    pub fn scale(&self, c: Fp) -> Result<Polynomial, GfError> {
        check_same(self.p, c.p)?;
        if c.is_zero() {
            return Ok(Self::zero(self.p));
        }
        let p = self.p;
        Ok(Polynomial {
            p,
            coeffs: self.coeffs.iter().map(|&a| p.mul(a, c.value)).collect(),
        })
    }

    /// Schoolbook product.
    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial, GfError> {
        check_same(self.p, other.p)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.p));
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = p.add(out[i + j], p.mul(a, b));
            }
        }
        // product of nonzero leading coefficients in a field is nonzero
        Ok(Polynomial { p, coeffs: out })
    }

    /// Long division: returns `(q, r)` with `self = q * den + r` and
    /// `deg r < deg den`.
    pub fn div_rem(&self, den: &Polynomial) -> Result<(Polynomial, Polynomial), GfError> {
        check_same(self.p, den.p)?;
        let p = self.p;
        let dd = den.degree().ok_or(GfError::DivisionByZeroPolynomial)?;
        let Some(nd) = self.degree().filter(|&nd| nd >= dd) else {
            return Ok((Self::zero(p), self.clone()));
        };
        let lead_inv = p.inv(den.coeffs[dd])?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; nd - dd + 1];
        for k in (0..=nd - dd).rev() {
            let c = p.mul(rem[k + dd], lead_inv);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in den.coeffs.iter().enumerate() {
                rem[k + j] = p.sub(rem[k + j], p.mul(c, d));
            }
        }
        rem.truncate(dd);
        Ok((Polynomial { p, coeffs: quot }, Self::trimmed(p, rem)))
    }

    pub fn rem(&self, den: &Polynomial) -> Result<Polynomial, GfError> {
        Ok(self.div_rem(den)?.1)
    }

    /// Scales to leading coefficient one; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Polynomial {
        match self.coeffs.last() {
            None | Some(1) => self.clone(),
            Some(&lc) => {
                let inv = self.p.inv(lc).expect("leading coefficient is nonzero");
                let p = self.p;
                Polynomial {
                    p,
                    coeffs: self.coeffs.iter().map(|&c| p.mul(c, inv)).collect(),
                }
            }
        }
    }

    /// Extended Euclidean algorithm.
    ///
    /// Returns `(d, u, v)` with `u*f + v*g = d` and `d = gcd(f, g)` monic. When
    /// the inputs are coprime and both have degree at least one, the Bézout
    /// pair is reduced to its minimal-degree form: `deg u < deg g` and
    /// `deg v < deg f`. That pair is unique, which is what makes the derived
    /// public key a function of the factor pair.
    pub fn ext_gcd(
        f: &Polynomial,
        g: &Polynomial,
    ) -> Result<(Polynomial, Polynomial, Polynomial), GfError> {
        check_same(f.p, g.p)?;
        if f.is_zero() && g.is_zero() {
            return Err(GfError::BothZero);
        }
        let p = f.p;
        let (mut r0, mut r1) = (f.clone(), g.clone());
        let (mut s0, mut s1) = (Self::one(p), Self::zero(p));
        let (mut t0, mut t1) = (Self::zero(p), Self::one(p));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1)?;
            let s = s0.sub(&q.mul(&s1)?)?;
            let t = t0.sub(&q.mul(&t1)?)?;
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        let lc_inv = Fp::new(p.inv(r0.leading().value)?, p);
        let d = r0.scale(lc_inv)?;
        let mut u = s0.scale(lc_inv)?;
        let mut v = t0.scale(lc_inv)?;

        if d.is_one() && f.degree() >= Some(1) && g.degree() >= Some(1) {
            // u*f + v*g = 1; write u = q*g + u', then u'*f + (v + q*f)*g = 1
            let (q, u_red) = u.div_rem(g)?;
            v = v.add(&q.mul(f)?)?;
            u = u_red;
        }
        Ok((d, u, v))
    }

    /// Horner evaluation.
    pub fn eval(&self, x: Fp) -> Result<Fp, GfError> {
        check_same(self.p, x.p)?;
        Ok(Fp {
            value: self.eval_raw(x.value),
            p: self.p,
        })
    }

    /// Horner evaluation at an already-reduced residue.
    pub(crate) fn eval_raw(&self, x: u64) -> u64 {
        let p = self.p;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| p.add(p.mul(acc, x), c))
    }

    /// The monic polynomial `∏ (x - j)` over the roots; `1` for the empty set.
    pub fn from_roots(roots: &RootSet) -> Polynomial {
        let p = roots.p;
        let mut coeffs = Vec::with_capacity(roots.len() + 1);
        coeffs.push(1u64);
        for &j in &roots.roots {
            let neg_j = p.neg(u64::from(j));
            // multiply in place by (x - j)
            coeffs.push(0);
            for i in (0..coeffs.len()).rev() {
                let shifted = if i == 0 { 0 } else { coeffs[i - 1] };
                coeffs[i] = p.add(shifted, p.mul(coeffs[i], neg_j));
            }
        }
        Polynomial { p, coeffs }
    }
}

impl fmt::Display for Polynomial {
    /// Human-readable, high-to-low: `x^2 + 2x + 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("x")?,
                (1, c) => write!(f, "{c}x")?,
                (i, 1) => write!(f, "x^{i}")?,
                (i, c) => write!(f, "{c}x^{i}")?,
            }
        }
        Ok(())
    }
}
