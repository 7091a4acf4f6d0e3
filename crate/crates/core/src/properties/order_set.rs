use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

/// A finitely described set of naturals: finitely many exceptions plus an
/// optional periodic tail `{n >= threshold : n mod modulus ∈ residues}`.
///
/// Text form: `{3,5}`, `2Z+0`, `{3,5}+2Z+0`, `3Z+{0,2}>=6`; aliases `all`,
/// `evens`, `odds`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderSet {
    exceptions: BTreeSet<usize>,
    tail: Option<Tail>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Tail {
    modulus: usize,
    residues: BTreeSet<usize>,
    threshold: usize,
}

impl OrderSet {
    pub fn finite(elements: impl IntoIterator<Item = usize>) -> Self {
        Self {
            exceptions: elements.into_iter().collect(),
            tail: None,
        }
    }

    /// `{n : n mod modulus ∈ residues}` plus the given exceptions.
    pub fn periodic(
        exceptions: impl IntoIterator<Item = usize>,
        modulus: usize,
        residues: impl IntoIterator<Item = usize>,
        threshold: usize,
    ) -> Result<Self, String> {
        if modulus == 0 {
            return Err("modulus must be positive".into());
        }
        let residues: BTreeSet<usize> = residues.into_iter().collect();
        if let Some(&r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(format!("residue {r} not below modulus {modulus}"));
        }
        Ok(Self {
            exceptions: exceptions.into_iter().collect(),
            tail: (!residues.is_empty()).then_some(Tail {
                modulus,
                residues,
                threshold,
            }),
        })
    }

    pub fn all() -> Self {
        Self::periodic([], 1, [0], 0).expect("valid")
    }

    pub fn evens() -> Self {
        Self::periodic([], 2, [0], 0).expect("valid")
    }

    pub fn odds() -> Self {
        Self::periodic([], 2, [1], 0).expect("valid")
    }

    pub fn contains(&self, n: usize) -> bool {
        self.exceptions.contains(&n)
            || self
                .tail
                .as_ref()
                .is_some_and(|t| n >= t.threshold && t.residues.contains(&(n % t.modulus)))
    }
}

fn parse_set(s: &str) -> Result<BTreeSet<usize>, String> {
    let inner = s
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| format!("expected `{{...}}`, found `{s}`"))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| format!("bad number `{p}`")))
        .collect()
}

impl FromStr for OrderSet {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let err = |m: String| ParseError::new(1, 1, format!("order set `{s}`: {m}"));
        let s = s.trim();
        match s {
            "all" | "N" => return Ok(Self::all()),
            "evens" => return Ok(Self::evens()),
            "odds" => return Ok(Self::odds()),
            _ => {}
        }
        let (exceptions, rest) = if s.starts_with('{') {
            let end = s.find('}').ok_or_else(|| err("unclosed `{`".into()))?;
            (parse_set(&s[..=end]).map_err(err)?, &s[end + 1..])
        } else {
            (BTreeSet::new(), s)
        };
        let rest = rest.strip_prefix('+').unwrap_or(rest);
        if rest.is_empty() {
            return Ok(Self {
                exceptions,
                tail: None,
            });
        }
        let (m, rest) = rest
            .split_once("Z+")
            .ok_or_else(|| err(format!("expected `<m>Z+<residues>`, found `{rest}`")))?;
        let modulus: usize = m.parse().map_err(|_| err(format!("bad modulus `{m}`")))?;
        let (res, threshold) = match rest.split_once(">=") {
            Some((r, t)) => (r, t.parse().map_err(|_| err(format!("bad threshold `{t}`")))?),
            None => (rest, 0),
        };
        let residues = if res.starts_with('{') {
            parse_set(res).map_err(err)?
        } else {
            BTreeSet::from([res.parse().map_err(|_| err(format!("bad residue `{res}`")))?])
        };
        Self::periodic(exceptions, modulus, residues, threshold).map_err(err)
    }
}

fn write_set(f: &mut fmt::Formatter<'_>, set: &BTreeSet<usize>) -> fmt::Result {
    f.write_str("{")?;
    for (i, x) in set.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{x}")?;
    }
    f.write_str("}")
}

impl fmt::Display for OrderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.exceptions.is_empty() || self.tail.is_none() {
            write_set(f, &self.exceptions)?;
        }
        if let Some(t) = &self.tail {
            if !self.exceptions.is_empty() {
                f.write_str("+")?;
            }
            write!(f, "{}Z+", t.modulus)?;
            if t.residues.len() == 1 {
                write!(f, "{}", t.residues.first().expect("nonempty"))?;
            } else {
                write_set(f, &t.residues)?;
            }
            if t.threshold > 0 {
                write!(f, ">={}", t.threshold)?;
            }
        }
        Ok(())
    }
}
