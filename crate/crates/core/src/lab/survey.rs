use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use crate::gf::{Polynomial, Prime, RootSet};
use crate::owf::{derive_bezout, FactorPair};

use super::combinations::{advance, binomial, unrank};
use super::{
    count_search_space, parallel, within_limit, LabError, Pairing, SearchMode, DEFAULT_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyOptions {
    pub limit: u64,
    pub workers: usize,
}

impl Default for SurveyOptions {
    fn default() -> Self {
        SurveyOptions {
            limit: DEFAULT_LIMIT,
            workers: 1,
        }
    }
}

/// One factorization and the public key it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyRow {
    pub roots: RootSet,
    /// Canonical `A` with `P = ∏ (x - j)` over `roots` in the private role.
    pub a: Polynomial,
    /// In unordered surveys, the key obtained with the roles exchanged (the
    /// Bézout coefficient of `Q`). `None` in ordered surveys.
    pub swapped_a: Option<Polynomial>,
    /// Group of rows whose keys include `a`.
    pub group_id: usize,
    pub group_size: usize,
}

impl SurveyRow {
    pub fn deg_p(&self) -> usize {
        self.roots.len()
    }

    /// Distinct public keys this row can be observed under.
    pub fn keys(&self) -> impl Iterator<Item = &Polynomial> {
        let swapped = self.swapped_a.as_ref().filter(|s| *s != &self.a);
        std::iter::once(&self.a).chain(swapped)
    }
}

/// Rows sharing one bit-identical public key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollisionGroup {
    pub id: usize,
    pub a: Polynomial,
    /// Row indices, increasing.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyReport {
    pub p: Prime,
    pub mode: SearchMode,
    pub pairing: Pairing,
    /// Lexicographic in `roots`.
    pub rows: Vec<SurveyRow>,
    /// Groups with at least two rows.
    pub collision_groups: Vec<CollisionGroup>,
}

impl SurveyReport {
    pub fn collision_count(&self) -> usize {
        self.collision_groups.len()
    }

    /// Rows that share their key with at least one other row.
    pub fn colliding_rows(&self) -> usize {
        let mut hit = vec![false; self.rows.len()];
        for g in &self.collision_groups {
            for &m in &g.members {
                hit[m] = true;
            }
        }
        hit.into_iter().filter(|&h| h).count()
    }
}

/// Why [`verify_report`] refused a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDefect {
    /// Offending row index, when the defect is local to a row.
    pub row: Option<usize>,
    pub reason: String,
}

impl fmt::Display for ReportDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.row {
            Some(r) => write!(f, "row {r}: {}", self.reason),
            None => f.write_str(&self.reason),
        }
    }
}

/// Row count of a complete survey.
///
/// Ordered surveys have one row per split. Unordered surveys keep only the
/// lexicographically smaller side of each `{P, Q}`, which is always the side
/// containing the root 1, so they have exactly half as many rows.
pub fn expected_rows(p: Prime, mode: SearchMode, pairing: Pairing) -> BigUint {
    let ordered = count_search_space(p, mode);
    match pairing {
        Pairing::Ordered => ordered,
        Pairing::Unordered => ordered / 2u8,
    }
}

fn keeps(pairing: Pairing, roots: &[u32]) -> bool {
    pairing == Pairing::Ordered || roots.first() == Some(&1)
}

/// Maps every factorization in `mode` to its canonical public key and groups
/// rows by bit-identical key.
///
/// In unordered surveys each row also carries the key for the exchanged
/// roles, and a row joins the group of each key it can appear under.
pub fn uniqueness_survey(
    p: Prime,
    mode: SearchMode,
    pairing: Pairing,
    opts: &SurveyOptions,
) -> Result<SurveyReport, LabError> {
    within_limit(p, count_search_space(p, mode), opts.limit)?;
    let n = p.units() as u32;

    let mut rows = Vec::new();
    for k in mode.degrees(p) {
        let k = k as u32;
        let total = binomial(n.into(), k.into()).expect("bounded by the limit");
        let chunks = parallel::map_chunks(total, opts.workers, |range| -> Result<_, LabError> {
            let mut out = Vec::new();
            if range.is_empty() {
                return Ok(out);
            }
            let mut comb = unrank(n, k, range.start);
            for rank in range.clone() {
                if rank > range.start {
                    advance(&mut comb, n);
                }
                if !keeps(pairing, &comb) {
                    continue;
                }
                let roots = RootSet::new(p, comb.clone()).expect("enumerated subsets are valid");
                let pair = FactorPair::from_roots(roots)?;
                let (a, b) = derive_bezout(&pair)?;
                out.push(SurveyRow {
                    roots: pair.roots_p().clone(),
                    a,
                    swapped_a: (pairing == Pairing::Unordered).then_some(b),
                    group_id: 0,
                    group_size: 0,
                });
            }
            Ok(out)
        });
        for chunk in chunks {
            rows.extend(chunk?);
        }
    }
    // sizes were enumerated one at a time; restore global lexicographic order
    if mode == SearchMode::All {
        rows.sort_by(|x, y| x.roots.cmp(&y.roots));
    }
    let collision_groups = assign_groups(&mut rows);
    Ok(SurveyReport {
        p,
        mode,
        pairing,
        rows,
        collision_groups,
    })
}

/// Numbers distinct keys in order of first appearance (scanning each row's
/// primary key, then its swapped key), fills in `group_id`/`group_size`, and
/// returns the groups with two or more rows.
pub(crate) fn assign_groups(rows: &mut [SurveyRow]) -> Vec<CollisionGroup> {
    let mut ids: HashMap<&Polynomial, usize> = HashMap::new();
    let mut groups: Vec<(Polynomial, Vec<usize>)> = Vec::new();
    let mut primary = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        for (slot, key) in row.keys().enumerate() {
            let next = groups.len();
            let id = *ids.entry(key).or_insert(next);
            if id == next {
                groups.push((key.clone(), Vec::new()));
            }
            groups[id].1.push(i);
            if slot == 0 {
                primary.push(id);
            }
        }
    }
    for (row, id) in rows.iter_mut().zip(primary) {
        row.group_id = id;
        row.group_size = groups[id].1.len();
    }
    groups
        .into_iter()
        .enumerate()
        .filter(|(_, (_, members))| members.len() >= 2)
        .map(|(id, (a, members))| CollisionGroup { id, a, members })
        .collect()
}

/// Audits a survey: the row count matches the mode, rows are in strictly
/// increasing order and belong to the mode, every key re-derives from its
/// roots, and every group and collision group is exactly what the keys imply.
pub fn verify_report(report: &SurveyReport) -> Result<(), ReportDefect> {
    let expected = expected_rows(report.p, report.mode, report.pairing);
    if BigUint::from(report.rows.len()) != expected {
        return Err(ReportDefect {
            row: None,
            reason: format!("row count {} != {expected}", report.rows.len()),
        });
    }
    let degrees = report.mode.degrees(report.p);
    let fail = |row: usize, reason: String| ReportDefect {
        row: Some(row),
        reason,
    };
    for (i, row) in report.rows.iter().enumerate() {
        if row.roots.modulus() != report.p {
            return Err(fail(i, "rootsP modulus differs from the report".into()));
        }
        if !degrees.contains(&row.deg_p()) {
            return Err(fail(
                i,
                format!("degP = {} outside mode {}", row.deg_p(), report.mode),
            ));
        }
        if !keeps(report.pairing, row.roots.as_slice()) {
            return Err(fail(
                i,
                "unordered row is not the smaller side of its pair".into(),
            ));
        }
        if i > 0 && report.rows[i - 1].roots >= row.roots {
            return Err(fail(i, "rows are not in increasing rootsP order".into()));
        }
        let pair = FactorPair::from_roots(row.roots.clone()).map_err(|e| fail(i, e.to_string()))?;
        let (a, b) = derive_bezout(&pair).map_err(|e| fail(i, e.to_string()))?;
        if row.a != a {
            return Err(fail(
                i,
                format!("A = {} does not re-derive (expected {a})", row.a),
            ));
        }
        let swapped = (report.pairing == Pairing::Unordered).then_some(b);
        if row.swapped_a != swapped {
            return Err(fail(i, "swapped-role key does not re-derive".into()));
        }
    }

    let mut fresh = report.rows.clone();
    let groups = assign_groups(&mut fresh);
    for (i, (got, want)) in report.rows.iter().zip(&fresh).enumerate() {
        if (got.group_id, got.group_size) != (want.group_id, want.group_size) {
            return Err(fail(
                i,
                format!(
                    "group {}/{} but keys imply {}/{}",
                    got.group_id, got.group_size, want.group_id, want.group_size
                ),
            ));
        }
    }
    for g in &report.collision_groups {
        if g.members.len() < 2 {
            return Err(ReportDefect {
                row: g.members.first().copied(),
                reason: format!("collision group {} has fewer than two members", g.id),
            });
        }
        for &m in &g.members {
            let Some(row) = report.rows.get(m) else {
                return Err(ReportDefect {
                    row: None,
                    reason: format!("collision group {} names missing row {m}", g.id),
                });
            };
            if !row.keys().any(|k| k == &g.a) {
                return Err(fail(
                    m,
                    format!("member of group {} with a different A", g.id),
                ));
            }
        }
    }
    if report.collision_groups != groups {
        return Err(ReportDefect {
            row: None,
            reason: "collision groups differ from those implied by the keys".into(),
        });
    }
    Ok(())
}
