use std::time::{Duration, Instant};

use crate::gf::{Polynomial, RootSet};
use crate::owf::{verify_proof, PublicKey};

use super::combinations::{advance, unrank};
use super::{count_search_space, parallel, within_limit, LabError, SearchMode, DEFAULT_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackOptions {
    /// Refuse to run when the balanced search space exceeds this.
    pub limit: u64,
    pub workers: usize,
    /// Apply the root and value-consistency filters before the full check.
    pub prune: bool,
}

impl Default for AttackOptions {
    fn default() -> Self {
        AttackOptions {
            limit: DEFAULT_LIMIT,
            workers: 1,
            prune: true,
        }
    }
}

/// A balanced factor that verifies against the target key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preimage {
    pub roots: RootSet,
    pub factor: Polynomial,
}

impl Preimage {
    pub fn from_roots(roots: RootSet) -> Self {
        let factor = Polynomial::from_roots(&roots);
        Preimage { roots, factor }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackResult {
    target: PublicKey,
    preimages: Vec<Preimage>,
    candidates_tested: u64,
    pruned: u64,
    wall_time: Duration,
}

impl AttackResult {
    /// Reassembles a result; every preimage must verify against `target` and
    /// preimages must be in strictly increasing root order. The wall time is
    /// truncated to whole milliseconds.
    pub fn from_parts(
        target: PublicKey,
        preimages: Vec<Preimage>,
        candidates_tested: u64,
        pruned: u64,
        wall_time: Duration,
    ) -> Result<Self, String> {
        if !preimages.windows(2).all(|w| w[0].roots < w[1].roots) {
            return Err("preimages are not in increasing rootsP order".into());
        }
        for pre in &preimages {
            if pre.factor != Polynomial::from_roots(&pre.roots) {
                return Err(format!(
                    "P does not match rootsP {:?}",
                    pre.roots.as_slice()
                ));
            }
            let accepted = verify_proof(&target, &pre.factor)
                .map_err(|e| e.to_string())?
                .is_accept();
            if !accepted {
                return Err(format!(
                    "rootsP {:?} does not verify against the target",
                    pre.roots.as_slice()
                ));
            }
        }
        Ok(AttackResult {
            target,
            preimages,
            candidates_tested,
            pruned,
            wall_time: Duration::from_millis(wall_time.as_millis() as u64),
        })
    }

    pub fn target(&self) -> &PublicKey {
        &self.target
    }

    pub fn preimages(&self) -> &[Preimage] {
        &self.preimages
    }

    /// Candidates that reached the full congruence check.
    pub fn candidates_tested(&self) -> u64 {
        self.candidates_tested
    }

    /// Candidates discarded by the cheap filters.
    pub fn pruned(&self) -> u64 {
        self.pruned
    }

    pub fn wall_time(&self) -> Duration {
        self.wall_time
    }

    pub fn contains(&self, roots: &RootSet) -> bool {
        self.preimages.iter().any(|pre| &pre.roots == roots)
    }
}

/// Number of points outside the candidate root set sampled by the
/// value-consistency filter.
const CONSISTENCY_PROBES: usize = 3;

/// Finds every balanced `P` with `verify_proof(target, P)` accepting.
///
/// Candidates are balanced root sets in lexicographic order. With pruning on,
/// a candidate is discarded early when
///
/// 1. some `j` with `A(j) = 0` is missing from it: at a root `j` of `Q` the
///    congruence `A*P = 1 (mod Q)` gives `A(j) P(j) = 1`, so `A` cannot vanish
///    there, and every zero of `A` must be a root of `P`;
/// 2. `P(j) A(j) != 1` at one of the first three `j` outside it: those `j` are
///    roots of `Q`, where the congruence must evaluate to 1.
///
/// Both filters only reject non-preimages, so pruned and unpruned runs find the
/// same set. `candidates_tested + pruned` always equals the search space size.
pub fn brute_force_invert(
    target: &PublicKey,
    opts: &AttackOptions,
) -> Result<AttackResult, LabError> {
    let started = Instant::now();
    let p = target.modulus();
    let total = within_limit(p, count_search_space(p, SearchMode::Balanced), opts.limit)?;
    let n = p.units() as u32;
    let k = p.half() as u32;
    let modulus = p.get();

    // A(j) for j in 0..=n; index 0 unused
    let a_vals: Vec<u64> = (0..=u64::from(n)).map(|j| target.a().eval_raw(j)).collect();
    let required: u128 = (1..=n)
        .filter(|&j| a_vals[j as usize] == 0)
        .fold(0, |m, j| m | 1u128 << j);

    let chunks = parallel::map_chunks(total, opts.workers, |range| {
        let mut found = Vec::new();
        let (mut tested, mut pruned) = (0u64, 0u64);
        if range.is_empty() {
            return (found, tested, pruned);
        }
        let mut comb = unrank(n, k, range.start);
        for rank in range.clone() {
            if rank > range.start {
                advance(&mut comb, n);
            }
            if opts.prune {
                let mask = comb.iter().fold(0u128, |m, &j| m | 1u128 << j);
                if mask & required != required {
                    pruned += 1;
                    continue;
                }
                let inconsistent = (1..=n)
                    .filter(|&j| mask >> j & 1 == 0)
                    .take(CONSISTENCY_PROBES)
                    .any(|j| {
                        let j = u64::from(j);
                        let pj = comb.iter().fold(1u64, |acc, &r| {
                            acc * ((j + modulus - u64::from(r)) % modulus) % modulus
                        });
                        pj * a_vals[j as usize] % modulus != 1
                    });
                if inconsistent {
                    pruned += 1;
                    continue;
                }
            }
            tested += 1;
            let roots = RootSet::new(p, comb.clone()).expect("enumerated subsets are valid");
            let candidate = Preimage::from_roots(roots);
            let verdict = verify_proof(target, &candidate.factor).expect("moduli agree");
            if verdict.is_accept() {
                found.push(candidate);
            }
        }
        (found, tested, pruned)
    });

    let mut preimages = Vec::new();
    let (mut tested, mut pruned) = (0, 0);
    for (found, t, s) in chunks {
        preimages.extend(found);
        tested += t;
        pruned += s;
    }
    debug_assert_eq!(tested + pruned, total);
    Ok(AttackResult {
        target: target.clone(),
        preimages,
        candidates_tested: tested,
        pruned,
        wall_time: Duration::from_millis(started.elapsed().as_millis() as u64),
    })
}
