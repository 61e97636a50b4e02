use std::fmt::Write as _;
use std::str::FromStr;

use crate::gf::{Polynomial, Prime, RootSet};
use crate::otsig::{BitString, LamportKeySet, LamportPublicKey, Signature};
use crate::owf::{KeyPair, Proof, PublicKey};

use super::{Artifact, FormatError, VERSION};

pub const HEADER: &str = "# bezout-owf";

/// Strict decimal: no sign, no leading zeros.
pub(crate) fn parse_uint<T: FromStr>(s: &str, line: usize, what: &str) -> Result<T, FormatError> {
    let canonical =
        !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'));
    if !canonical {
        return Err(FormatError::malformed(
            line,
            format!("{what}: `{s}` is not a canonical decimal"),
        ));
    }
    s.parse()
        .map_err(|_| FormatError::malformed(line, format!("{what}: `{s}` is out of range")))
}

pub(crate) fn parse_prime(s: &str, line: usize) -> Result<Prime, FormatError> {
    Prime::new(parse_uint(s, line, "p")?).map_err(|e| FormatError::invariant(line, e))
}

pub(crate) fn fmt_poly(f: &Polynomial, sep: char) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in f.coeffs().iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        write!(out, "{c}").unwrap();
    }
    out
}

pub(crate) fn parse_poly(
    s: &str,
    sep: char,
    p: Prime,
    line: usize,
    what: &str,
) -> Result<Polynomial, FormatError> {
    if s == "0" {
        return Ok(Polynomial::zero(p));
    }
    let coeffs = s
        .split(sep)
        .map(|c| parse_uint::<u64>(c, line, what))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(&c) = coeffs.iter().find(|&&c| c >= p.get()) {
        return Err(FormatError::malformed(
            line,
            format!("{what}: coefficient {c} not reduced mod {p}"),
        ));
    }
    if coeffs.last() == Some(&0) {
        return Err(FormatError::malformed(
            line,
            format!("{what}: trailing zero coefficient"),
        ));
    }
    Ok(Polynomial::new(p, coeffs))
}

pub(crate) fn fmt_roots(r: &RootSet, sep: char) -> String {
    let mut out = String::new();
    for (i, j) in r.as_slice().iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        write!(out, "{j}").unwrap();
    }
    out
}

pub(crate) fn parse_roots(
    s: &str,
    sep: char,
    p: Prime,
    line: usize,
) -> Result<RootSet, FormatError> {
    let roots = if s.is_empty() {
        Vec::new()
    } else {
        s.split(sep)
            .map(|c| parse_uint::<u32>(c, line, "rootsP"))
            .collect::<Result<Vec<_>, _>>()?
    };
    RootSet::new(p, roots).map_err(|e| FormatError::malformed(line, e.to_string()))
}

struct Writer(String);

impl Writer {
    fn new(role: &str) -> Self {
        let mut w = Writer(String::new());
        w.0.push_str(HEADER);
        w.0.push('\n');
        w.field("version", VERSION);
        w.field("role", role);
        w
    }

    fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        writeln!(self.0, "{key}={value}").unwrap();
    }
}

/// Line cursor over a key-style file; line numbers are 1-based.
struct Reader<'a> {
    lines: Vec<&'a str>,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str, role: &str) -> Result<Self, FormatError> {
        if let Some(at) = text.find(|c: char| !c.is_ascii()) {
            let line = text[..at].matches('\n').count() + 1;
            return Err(FormatError::malformed(line, "non-ASCII content"));
        }
        let Some(body) = text.strip_suffix('\n') else {
            let line = text.matches('\n').count() + 1;
            return Err(FormatError::malformed(line, "missing final newline"));
        };
        let lines: Vec<&str> = body.split('\n').collect();
        for (i, l) in lines.iter().enumerate() {
            if l.contains('\r') {
                return Err(FormatError::malformed(i + 1, "CR line ending"));
            }
            if l.ends_with([' ', '\t']) {
                return Err(FormatError::malformed(i + 1, "trailing whitespace"));
            }
        }
        if lines[0] != HEADER {
            return Err(FormatError::malformed(
                1,
                format!("expected header `{HEADER}`"),
            ));
        }
        let mut r = Reader { lines, pos: 1 };
        let (line, version) = r.field("version")?;
        if version != VERSION.to_string() {
            return Err(FormatError::UnsupportedVersion {
                line,
                found: version.to_string(),
            });
        }
        let (line, found) = r.field("role")?;
        if found != role {
            return Err(FormatError::malformed(
                line,
                format!("expected role {role}, found {found}"),
            ));
        }
        Ok(r)
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str), FormatError> {
        let line = self.pos + 1;
        let Some(raw) = self.lines.get(self.pos) else {
            return Err(FormatError::malformed(line, format!("missing `{key}`")));
        };
        let value = raw
            .split_once('=')
            .filter(|(k, _)| *k == key)
            .map(|(_, v)| v)
            .ok_or_else(|| FormatError::malformed(line, format!("expected `{key}=...`")))?;
        self.pos += 1;
        Ok((line, value))
    }

    fn prime(&mut self) -> Result<Prime, FormatError> {
        let (line, v) = self.field("p")?;
        parse_prime(v, line)
    }

    fn uint<T: FromStr>(&mut self, key: &str) -> Result<T, FormatError> {
        let (line, v) = self.field(key)?;
        parse_uint(v, line, key)
    }

    fn poly(&mut self, key: &str, p: Prime) -> Result<(usize, Polynomial), FormatError> {
        let (line, v) = self.field(key)?;
        Ok((line, parse_poly(v, ',', p, line, key)?))
    }

    fn roots(&mut self, key: &str, p: Prime) -> Result<RootSet, FormatError> {
        let (line, v) = self.field(key)?;
        parse_roots(v, ',', p, line)
    }

    fn bool(&mut self, key: &str) -> Result<bool, FormatError> {
        let (line, v) = self.field(key)?;
        match v {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(FormatError::malformed(
                line,
                format!("{key}: expected true or false"),
            )),
        }
    }

    fn finish(self) -> Result<(), FormatError> {
        if self.pos < self.lines.len() {
            return Err(FormatError::malformed(
                self.pos + 1,
                "unexpected trailing content",
            ));
        }
        Ok(())
    }
}

fn public_key(r: &mut Reader, key: &str, p: Prime) -> Result<PublicKey, FormatError> {
    let (line, a) = r.poly(key, p)?;
    PublicKey::new(p, a).map_err(|e| FormatError::invariant(line, e))
}

fn key_pair(r: &mut Reader, suffix: &str, p: Prime) -> Result<KeyPair, FormatError> {
    let seed = r.uint(&format!("seed{suffix}"))?;
    let roots = r.roots(&format!("rootsP{suffix}"), p)?;
    let (_, factor) = r.poly(&format!("P{suffix}"), p)?;
    let public = public_key(r, &format!("A{suffix}"), p)?;
    let (line, b) = r.poly(&format!("B{suffix}"), p)?;
    KeyPair::from_parts(public, roots, factor, b, seed).map_err(|e| FormatError::invariant(line, e))
}

fn write_key_pair(w: &mut Writer, suffix: &str, kp: &KeyPair) {
    w.field(&format!("seed{suffix}"), kp.seed());
    w.field(&format!("rootsP{suffix}"), fmt_roots(kp.roots_p(), ','));
    w.field(&format!("P{suffix}"), fmt_poly(kp.p(), ','));
    w.field(&format!("A{suffix}"), fmt_poly(kp.public().a(), ','));
    w.field(&format!("B{suffix}"), fmt_poly(kp.b(), ','));
}

impl Artifact for PublicKey {
    fn to_text(&self) -> String {
        let mut w = Writer::new("public");
        w.field("p", self.modulus());
        w.field("A", fmt_poly(self.a(), ','));
        w.0
    }

    fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut r = Reader::new(text, "public")?;
        let p = r.prime()?;
        let key = public_key(&mut r, "A", p)?;
        r.finish()?;
        Ok(key)
    }
}

impl Artifact for KeyPair {
    fn to_text(&self) -> String {
        let mut w = Writer::new("private");
        w.field("p", self.modulus());
        write_key_pair(&mut w, "", self);
        w.0
    }

    fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut r = Reader::new(text, "private")?;
        let p = r.prime()?;
        let kp = key_pair(&mut r, "", p)?;
        r.finish()?;
        Ok(kp)
    }
}

impl Artifact for Proof {
    fn to_text(&self) -> String {
        let mut w = Writer::new("proof");
        w.field("p", self.modulus());
        w.field("P", fmt_poly(self.factor(), ','));
        w.0
    }

    fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut r = Reader::new(text, "proof")?;
        let p = r.prime()?;
        let (line, factor) = r.poly("P", p)?;
        r.finish()?;
        Proof::new(p, factor).map_err(|e| FormatError::invariant(line, e))
    }
}

fn bit_count(r: &mut Reader) -> Result<usize, FormatError> {
    let (line, v) = r.field("bits")?;
    let bits: usize = parse_uint(v, line, "bits")?;
    if bits == 0 {
        return Err(FormatError::invariant(line, "bits must be at least 1"));
    }
    // every bit needs at least one more line
    if bits > r.lines.len() {
        return Err(FormatError::malformed(
            line,
            format!("bits = {bits} exceeds the file length"),
        ));
    }
    Ok(bits)
}

impl Artifact for LamportPublicKey {
    fn to_text(&self) -> String {
        let mut w = Writer::new("lamport-public");
        w.field("p", self.modulus());
        w.field("bits", self.bits());
        for (i, slot) in self.keys().iter().enumerate() {
            for (b, key) in slot.iter().enumerate() {
                w.field(&format!("A.{i}.{b}"), fmt_poly(key.a(), ','));
            }
        }
        w.0
    }

    fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut r = Reader::new(text, "lamport-public")?;
        let p = r.prime()?;
        let bits = bit_count(&mut r)?;
        let mut keys = Vec::with_capacity(bits);
        for i in 0..bits {
            let zero = public_key(&mut r, &format!("A.{i}.0"), p)?;
            let one = public_key(&mut r, &format!("A.{i}.1"), p)?;
            keys.push([zero, one]);
        }
        let line = r.pos;
        r.finish()?;
        LamportPublicKey::new(p, keys).map_err(|e| FormatError::invariant(line, e))
    }
}

impl Artifact for LamportKeySet {
    fn to_text(&self) -> String {
        let mut w = Writer::new("lamport-private");
        w.field("p", self.modulus());
        w.field("bits", self.bits());
        w.field("seed", self.seed());
        w.field("used", self.is_used());
        for (i, slot) in self.pairs().iter().enumerate() {
            for (b, kp) in slot.iter().enumerate() {
                write_key_pair(&mut w, &format!(".{i}.{b}"), kp);
            }
        }
        w.0
    }

    fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut r = Reader::new(text, "lamport-private")?;
        let p = r.prime()?;
        let bits = bit_count(&mut r)?;
        let seed = r.uint("seed")?;
        let used = r.bool("used")?;
        let mut pairs = Vec::with_capacity(bits);
        for i in 0..bits {
            let zero = key_pair(&mut r, &format!(".{i}.0"), p)?;
            let one = key_pair(&mut r, &format!(".{i}.1"), p)?;
            pairs.push([zero, one]);
        }
        let line = r.pos;
        r.finish()?;
        LamportKeySet::from_parts(p, seed, pairs, used).map_err(|e| FormatError::invariant(line, e))
    }
}

impl Artifact for Signature {
    fn to_text(&self) -> String {
        let mut w = Writer::new("signature");
        w.field("p", self.modulus());
        w.field("bits", self.message().len());
        w.field("msg", self.message());
        for (i, f) in self.revealed().iter().enumerate() {
            w.field(&format!("P.{i}"), fmt_poly(f, ','));
        }
        w.0
    }

    fn from_text(text: &str) -> Result<Self, FormatError> {
        let mut r = Reader::new(text, "signature")?;
        let p = r.prime()?;
        let bits = bit_count(&mut r)?;
        let (line, m) = r.field("msg")?;
        let message: BitString = m
            .parse()
            .map_err(|e: crate::otsig::SigError| FormatError::malformed(line, e.to_string()))?;
        if message.len() != bits {
            return Err(FormatError::invariant(
                line,
                format!("message has {} bits, header says {bits}", message.len()),
            ));
        }
        let revealed = (0..bits)
            .map(|i| r.poly(&format!("P.{i}"), p).map(|(_, f)| f))
            .collect::<Result<Vec<_>, _>>()?;
        let line = r.pos;
        r.finish()?;
        Signature::new(p, message, revealed).map_err(|e| FormatError::invariant(line, e))
    }
}
