use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Randomized-benchmarking protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RbKind {
    /// Single-qubit Clifford RB.
    Clifford1q,
    /// Interleaved two-qubit RB of CZ on static atoms.
    Irb2qStatic,
    /// Echoed two-qubit RB, with or without moves into the interaction zone.
    Echoed2q { moves: bool },
}

impl RbKind {
    fn name(self) -> &'static str {
        match self {
            RbKind::Clifford1q => "clifford-1q",
            RbKind::Irb2qStatic => "irb-2q-static",
            RbKind::Echoed2q { .. } => "echoed-2q",
        }
    }

    pub fn default_depths(self) -> Vec<usize> {
        match self {
            RbKind::Clifford1q => vec![1, 10, 25, 50, 100, 150],
            RbKind::Irb2qStatic => vec![1, 4, 8, 16, 32],
            RbKind::Echoed2q { .. } => vec![1, 10, 20, 40, 60],
        }
    }
}

/// A fully parameterized experiment. The canonical text form is
/// `name:key=value,...` with keys in a fixed order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExperimentSpec {
    /// Unencoded antiferromagnetic cat state on `n` atoms.
    Cat { n: usize },
    /// Cat state of `k` logical qubits in `k/2` [[4,2,2]] blocks.
    CatEncoded { k: usize },
    /// Bernstein–Vazirani with hidden string `s` (`s.len() == n`).
    Bv { encoded: bool, s: Vec<bool> },
    /// `j + 1` logical CZ gates with `j` detection rounds.
    RepeatedCz { j: usize, encoded: bool },
    /// One of the four random logical sequences.
    RandomSequence { id: usize, encoded: bool },
    /// 16-qubit tesseract blocks from paired [[8,3,2]] copies.
    Tesseract { ft: bool },
    Rb { kind: RbKind, depths: Vec<usize> },
}

pub const BV_SIZES: [usize; 6] = [7, 11, 15, 19, 23, 27];
pub const MAX_CAT: usize = 40;

impl ExperimentSpec {
    pub fn bv(n: usize, encoded: bool) -> Self {
        ExperimentSpec::Bv { encoded, s: vec![true; n] }
    }

    pub fn rb(kind: RbKind) -> Self {
        ExperimentSpec::Rb { kind, depths: kind.default_depths() }
    }

    /// The family name, as used on the command line.
    pub fn family(&self) -> &'static str {
        match self {
            ExperimentSpec::Cat { .. } => "cat",
            ExperimentSpec::CatEncoded { .. } => "cat-encoded",
            ExperimentSpec::Bv { .. } => "bv",
            ExperimentSpec::RepeatedCz { .. } => "repeated-cz",
            ExperimentSpec::RandomSequence { .. } => "random-sequence",
            ExperimentSpec::Tesseract { .. } => "tesseract",
            ExperimentSpec::Rb { .. } => "rb",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Usage(m));
        match self {
            ExperimentSpec::Cat { n } if !(2..=MAX_CAT).contains(n) => bad(format!("cat size {n} outside 2..={MAX_CAT}")),
            ExperimentSpec::CatEncoded { k } if *k < 4 || k % 2 == 1 => bad(format!("encoded cat needs an even k >= 4, got {k}")),
            ExperimentSpec::Bv { s, .. } if s.is_empty() || s.len() > 63 => bad(format!("BV size {} outside 1..=63", s.len())),
            ExperimentSpec::RandomSequence { id, .. } if *id > 3 => bad(format!("unknown random sequence {id} (0..=3)")),
            ExperimentSpec::Rb { depths, .. } if depths.len() < 3 => bad("RB needs at least 3 depths".into()),
            ExperimentSpec::Rb { depths, .. } if depths.contains(&0) => bad("RB depths must be positive".into()),
            _ => Ok(()),
        }
    }
}

fn bits(s: &[bool]) -> String {
    s.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExperimentSpec::Cat { n } => write!(f, "cat:n={n}"),
            ExperimentSpec::CatEncoded { k } => write!(f, "cat-encoded:k={k}"),
            ExperimentSpec::Bv { encoded, s } => write!(f, "bv:n={},encoded={encoded},s={}", s.len(), bits(s)),
            ExperimentSpec::RepeatedCz { j, encoded } => write!(f, "repeated-cz:j={j},encoded={encoded}"),
            ExperimentSpec::RandomSequence { id, encoded } => write!(f, "random-sequence:id={id},encoded={encoded}"),
            ExperimentSpec::Tesseract { ft } => write!(f, "tesseract:ft={ft}"),
            ExperimentSpec::Rb { kind, depths } => {
                write!(f, "rb:kind={}", kind.name())?;
                if let RbKind::Echoed2q { moves } = kind {
                    write!(f, ",moves={moves}")?;
                }
                let d: Vec<String> = depths.iter().map(|d| d.to_string()).collect();
                write!(f, ",depths={}", d.join("/"))
            }
        }
    }
}

struct Params<'a> {
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Params<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        let i = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(i).1)
    }

    fn num(&mut self, key: &str, default: Option<usize>) -> Result<usize> {
        match self.take(key) {
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("{key}: bad number {v:?}"))),
            None => default.ok_or_else(|| Error::Parse(format!("missing parameter {key}"))),
        }
    }

    fn flag(&mut self, key: &str, default: bool) -> Result<bool> {
        match self.take(key) {
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("{key}: expected true or false, got {v:?}"))),
            None => Ok(default),
        }
    }

    fn finish(self) -> Result<()> {
        match self.pairs.first() {
            Some((k, _)) => Err(Error::Parse(format!("unknown parameter {k:?}"))),
            None => Ok(()),
        }
    }
}

impl FromStr for ExperimentSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (name, rest) = text.trim().split_once(':').unwrap_or((text.trim(), ""));
        let pairs = rest
            .split(',')
            .filter(|p| !p.is_empty())
            .map(|p| p.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut p = Params { pairs };
        let spec = match name {
            "cat" => ExperimentSpec::Cat { n: p.num("n", None)? },
            "cat-encoded" => ExperimentSpec::CatEncoded { k: p.num("k", Some(24))? },
            "cat-encoded-24" => ExperimentSpec::CatEncoded { k: 24 },
            "bv" => {
                let encoded = p.flag("encoded", false)?;
                let n = p.num("n", None).ok();
                let s = match p.take("s") {
                    Some(s) => s
                        .chars()
                        .map(|c| match c {
                            '0' => Ok(false),
                            '1' => Ok(true),
                            _ => Err(Error::Parse(format!("s: bad bit {c:?}"))),
                        })
                        .collect::<Result<Vec<_>>>()?,
                    None => vec![true; n.ok_or_else(|| Error::Parse("bv needs n or s".into()))?],
                };
                if n.is_some_and(|n| n != s.len()) {
                    return Err(Error::Parse(format!("s has {} bits but n = {}", s.len(), n.unwrap())));
                }
                ExperimentSpec::Bv { encoded, s }
            }
            "repeated-cz" => ExperimentSpec::RepeatedCz {
                j: p.num("j", None)?,
                encoded: p.flag("encoded", true)?,
            },
            "random-sequence" => ExperimentSpec::RandomSequence {
                id: p.num("id", None)?,
                encoded: p.flag("encoded", true)?,
            },
            "tesseract" => ExperimentSpec::Tesseract { ft: p.flag("ft", true)? },
            "rb" => {
                let kind = match p.take("kind").unwrap_or("clifford-1q") {
                    "clifford-1q" => RbKind::Clifford1q,
                    "irb-2q-static" => RbKind::Irb2qStatic,
                    "echoed-2q" => RbKind::Echoed2q { moves: p.flag("moves", true)? },
                    k => return Err(Error::Parse(format!("unknown RB kind {k:?}"))),
                };
                let depths = match p.take("depths") {
                    Some(d) => d
                        .split('/')
                        .map(|x| x.parse().map_err(|_| Error::Parse(format!("depths: bad number {x:?}"))))
                        .collect::<Result<Vec<usize>>>()?,
                    None => kind.default_depths(),
                };
                ExperimentSpec::Rb { kind, depths }
            }
            _ => return Err(Error::Parse(format!("unknown experiment {name:?}"))),
        };
        p.finish()?;
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings_round_trip() {
        let specs = [
            ExperimentSpec::Cat { n: 8 },
            ExperimentSpec::CatEncoded { k: 24 },
            ExperimentSpec::Bv { encoded: true, s: vec![true, false, true] },
            ExperimentSpec::RepeatedCz { j: 3, encoded: false },
            ExperimentSpec::RandomSequence { id: 2, encoded: true },
            ExperimentSpec::Tesseract { ft: false },
            ExperimentSpec::rb(RbKind::Echoed2q { moves: true }),
            ExperimentSpec::rb(RbKind::Clifford1q),
        ];
        for s in specs {
            let text = s.to_string();
            assert_eq!(text.parse::<ExperimentSpec>().unwrap(), s, "{text}");
        }
    }

    #[test]
    fn defaults_and_aliases() {
        assert_eq!("bv:n=7".parse::<ExperimentSpec>().unwrap(), ExperimentSpec::bv(7, false));
        assert_eq!("cat-encoded-24".parse::<ExperimentSpec>().unwrap(), ExperimentSpec::CatEncoded { k: 24 });
        assert_eq!(
            "bv:encoded=true,n=7".parse::<ExperimentSpec>().unwrap().to_string(),
            "bv:n=7,encoded=true,s=1111111"
        );
    }

    #[test]
    fn bad_specs_are_rejected() {
        for t in ["cat:n=41", "cat", "bv:n=3,s=11", "random-sequence:id=4", "tesseract:ft=maybe", "cat:n=4,m=2", "warp:n=1"] {
            assert!(t.parse::<ExperimentSpec>().is_err(), "{t}");
        }
    }
}
