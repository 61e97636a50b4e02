//! CSV reports. Cells never contain commas: polynomials and root sets inside
//! a cell are `;`-separated.

use std::fmt::Write as _;
use std::time::Duration;

use crate::gf::Prime;
use crate::lab::{
    expected_rows, survey::assign_groups, AttackResult, Pairing, Preimage, SearchMode,
    SurveyReport, SurveyRow,
};
use crate::owf::{derive_bezout, FactorPair, PublicKey};

use super::text::{fmt_poly, fmt_roots, parse_poly, parse_prime, parse_roots, parse_uint};
use super::{Artifact, FormatError};

pub const SURVEY_HEADER: &str = "p,mode,pairing,degP,rootsP,A,groupId,groupSize";
pub const ATTACK_HEADER: &str = "p,A,rootsP,candidates_tested,pruned,wall_ms";

/// Splits into `(line number, cells)` after checking the header.
fn records<'a>(
    text: &'a str,
    header: &str,
    width: usize,
) -> Result<Vec<(usize, Vec<&'a str>)>, FormatError> {
    if !text.is_ascii() {
        return Err(FormatError::malformed(1, "non-ASCII content"));
    }
    let Some(body) = text.strip_suffix('\n') else {
        return Err(FormatError::malformed(
            text.lines().count().max(1),
            "missing final newline",
        ));
    };
    let mut lines = body.split('\n').enumerate();
    match lines.next() {
        Some((_, h)) if h == header => {}
        _ => {
            return Err(FormatError::malformed(
                1,
                format!("expected header `{header}`"),
            ))
        }
    }
    lines
        .map(|(i, l)| {
            let cells: Vec<&str> = l.split(',').collect();
            if cells.len() != width {
                return Err(FormatError::malformed(
                    i + 1,
                    format!("expected {width} cells, found {}", cells.len()),
                ));
            }
            Ok((i + 1, cells))
        })
        .collect()
}

fn same<T: PartialEq>(
    first: &mut Option<T>,
    value: T,
    line: usize,
    what: &str,
) -> Result<(), FormatError> {
    match first {
        Some(v) if *v != value => Err(FormatError::malformed(
            line,
            format!("{what} differs from the first row"),
        )),
        Some(_) => Ok(()),
        None => {
            *first = Some(value);
            Ok(())
        }
    }
}

impl Artifact for SurveyReport {
    fn to_text(&self) -> String {
        let mut out = String::from(SURVEY_HEADER);
        out.push('\n');
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.p,
                self.mode,
                self.pairing,
                row.deg_p(),
                fmt_roots(&row.roots, ';'),
                fmt_poly(&row.a, ';'),
                row.group_id,
                row.group_size
            )
            .unwrap();
        }
        out
    }

    /// Group columns are read as written; the collision groups are rebuilt from
    /// the keys. [`crate::lab::verify_report`] reconciles the two.
    fn from_text(text: &str) -> Result<Self, FormatError> {
        let recs = records(text, SURVEY_HEADER, 8)?;
        if recs.is_empty() {
            return Err(FormatError::malformed(1, "survey has no rows"));
        }
        let mut head: Option<(Prime, SearchMode, Pairing)> = None;
        let mut rows = Vec::with_capacity(recs.len());
        for (line, c) in &recs {
            let line = *line;
            let p = parse_prime(c[0], line)?;
            let mode: SearchMode = c[1]
                .parse()
                .map_err(|e: String| FormatError::malformed(line, e))?;
            let pairing: Pairing = c[2]
                .parse()
                .map_err(|e: String| FormatError::malformed(line, e))?;
            same(&mut head, (p, mode, pairing), line, "p/mode/pairing")?;
            let deg_p: usize = parse_uint(c[3], line, "degP")?;
            let roots = parse_roots(c[4], ';', p, line)?;
            if roots.len() != deg_p {
                return Err(FormatError::invariant(
                    line,
                    format!("degP = {deg_p} but rootsP has {} roots", roots.len()),
                ));
            }
            let a = parse_poly(c[5], ';', p, line, "A")?;
            let swapped_a = match pairing {
                Pairing::Ordered => None,
                Pairing::Unordered => {
                    let pair = FactorPair::from_roots(roots.clone())
                        .map_err(|e| FormatError::invariant(line, e))?;
                    Some(
                        derive_bezout(&pair)
                            .map_err(|e| FormatError::invariant(line, e))?
                            .1,
                    )
                }
            };
            rows.push(SurveyRow {
                roots,
                a,
                swapped_a,
                group_id: parse_uint(c[6], line, "groupId")?,
                group_size: parse_uint(c[7], line, "groupSize")?,
            });
        }
        let (p, mode, pairing) = head.expect("at least one row");
        let expected = expected_rows(p, mode, pairing);
        if num_bigint::BigUint::from(rows.len()) != expected {
            let line = recs.last().map_or(1, |r| r.0);
            return Err(FormatError::invariant(
                line,
                format!("{} rows, expected {expected}", rows.len()),
            ));
        }
        let collision_groups = assign_groups(&mut rows.clone());
        Ok(SurveyReport {
            p,
            mode,
            pairing,
            rows,
            collision_groups,
        })
    }
}

impl Artifact for AttackResult {
    /// One row per preimage; a search that found nothing writes a single row
    /// with an empty `rootsP` cell.
    fn to_text(&self) -> String {
        let mut out = String::from(ATTACK_HEADER);
        out.push('\n');
        let prefix = format!(
            "{},{}",
            self.target().modulus(),
            fmt_poly(self.target().a(), ';')
        );
        let suffix = format!(
            "{},{},{}",
            self.candidates_tested(),
            self.pruned(),
            self.wall_time().as_millis()
        );
        if self.preimages().is_empty() {
            writeln!(out, "{prefix},,{suffix}").unwrap();
        }
        for pre in self.preimages() {
            writeln!(out, "{prefix},{},{suffix}", fmt_roots(&pre.roots, ';')).unwrap();
        }
        out
    }

    fn from_text(text: &str) -> Result<Self, FormatError> {
        let recs = records(text, ATTACK_HEADER, 6)?;
        if recs.is_empty() {
            return Err(FormatError::malformed(1, "attack report has no rows"));
        }
        let mut shared: Option<(&str, &str, &str, &str, &str)> = None;
        let mut target = None;
        let mut preimages = Vec::new();
        let mut empty_row = false;
        for (line, c) in &recs {
            let line = *line;
            same(
                &mut shared,
                (c[0], c[1], c[3], c[4], c[5]),
                line,
                "target/counters",
            )?;
            if target.is_none() {
                let p = parse_prime(c[0], line)?;
                let a = parse_poly(c[1], ';', p, line, "A")?;
                target = Some(PublicKey::new(p, a).map_err(|e| FormatError::invariant(line, e))?);
            }
            let p = target.as_ref().unwrap().modulus();
            if c[2].is_empty() {
                if recs.len() != 1 {
                    return Err(FormatError::malformed(
                        line,
                        "empty rootsP alongside preimages",
                    ));
                }
                empty_row = true;
            } else {
                preimages.push(Preimage::from_roots(parse_roots(c[2], ';', p, line)?));
            }
        }
        debug_assert!(empty_row || !preimages.is_empty());
        let (line, c) = &recs[0];
        let tested = parse_uint(c[3], *line, "candidates_tested")?;
        let pruned = parse_uint(c[4], *line, "pruned")?;
        let wall = Duration::from_millis(parse_uint(c[5], *line, "wall_ms")?);
        let last = recs.last().unwrap().0;
        AttackResult::from_parts(target.unwrap(), preimages, tested, pruned, wall)
            .map_err(|e| FormatError::invariant(last, e))
    }
}
