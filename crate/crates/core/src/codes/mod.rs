//! Stabilizer codes, loss-aware decoding and logical gate mappings.
//!
//! The registry format is documented at the top of `data/codes.txt`.

mod decode;
mod logical;
mod tesseract;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub use decode::{decode_block, verify_code_distance, DecodeOutcome};
pub use logical::{check_logical_action, logical_gate_mapping, LogicalGate};
pub use tesseract::{tesseract_decode, TesseractOutcome, TESSERACT_CHECKED_SUPPORTS};

/// Decoding basis: which transversal measurement produced the bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CodeBasis {
    X,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodeDefinition {
    pub name: String,
    pub n: usize,
    pub stabilizers: Vec<PauliString>,
    pub logical_x: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
    pub gauge: Vec<(PauliString, PauliString)>,
}

impl CodeDefinition {
    pub fn k(&self) -> usize {
        self.logical_x.len()
    }

    /// Checks commutation relations; returns a description of the first
    /// violation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parse(format!("code {}: {msg}", self.name)));
        let all = self
            .stabilizers
            .iter()
            .chain(&self.logical_x)
            .chain(&self.logical_z)
            .chain(self.gauge.iter().flat_map(|(a, b)| [a, b]));
        for p in all {
            if p.n_qubits() != self.n {
                return bad(format!("{p} has the wrong length"));
            }
        }
        for (i, a) in self.stabilizers.iter().enumerate() {
            for b in &self.stabilizers[i + 1..] {
                if !a.commutes_with(b) {
                    return bad(format!("stabilizers {a} and {b} anticommute"));
                }
            }
        }
        let pairs: Vec<(&PauliString, &PauliString)> = self
            .logical_x
            .iter()
            .zip(&self.logical_z)
            .chain(self.gauge.iter().map(|(a, b)| (a, b)))
            .collect();
        for (i, (xi, zi)) in pairs.iter().enumerate() {
            for s in &self.stabilizers {
                if !s.commutes_with(xi) || !s.commutes_with(zi) {
                    return bad(format!("logical pair {i} does not commute with {s}"));
                }
            }
            for (j, (xj, zj)) in pairs.iter().enumerate() {
                if xi.commutes_with(zj) == (i == j) || (i != j && (!xi.commutes_with(xj) || !zi.commutes_with(zj))) {
                    return bad(format!("logical pairs {i} and {j} have the wrong commutation"));
                }
            }
        }
        if self.stabilizers.len() + pairs.len() != self.n {
            return bad("generators and logical pairs do not span the qubits".into());
        }
        Ok(())
    }

    pub fn is_css(&self) -> bool {
        self.stabilizers.iter().all(|s| s.is_x_type() || s.is_z_type())
    }

    /// Stabilizer generators containing only the given Pauli type.
    pub fn basis_generators(&self, basis: CodeBasis) -> Vec<&PauliString> {
        self.stabilizers
            .iter()
            .filter(|s| match basis {
                CodeBasis::X => s.is_x_type(),
                CodeBasis::Z => s.is_z_type(),
            })
            .collect()
    }

    /// Logical operators readable in the given basis.
    pub fn basis_logicals(&self, basis: CodeBasis) -> &[PauliString] {
        match basis {
            CodeBasis::X => &self.logical_x,
            CodeBasis::Z => &self.logical_z,
        }
    }
}

/// A set of named codes.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    codes: BTreeMap<String, CodeDefinition>,
}

const BUILTIN: &str = include_str!("../../data/codes.txt");

impl Registry {
    pub fn builtin() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| Registry::parse(BUILTIN).expect("built-in code registry is valid"))
    }

    pub fn parse(text: &str) -> Result<Registry> {
        let err = |line: usize, msg: &str| Error::Parse(format!("registry line {}: {msg}", line + 1));
        let mut reg = Registry::default();
        let mut cur: Option<CodeDefinition> = None;
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let words: Vec<&str> = line.split_whitespace().collect();
            match (words[0], cur.as_mut()) {
                ("code", None) if words.len() == 2 => {
                    cur = Some(CodeDefinition {
                        name: words[1].to_string(),
                        n: 0,
                        stabilizers: vec![],
                        logical_x: vec![],
                        logical_z: vec![],
                        gauge: vec![],
                    })
                }
                ("n", Some(c)) if words.len() == 2 => {
                    c.n = words[1].parse().map_err(|_| err(ln, "bad qubit count"))?;
                }
                ("stabilizer", Some(c)) if words.len() == 2 => c.stabilizers.push(words[1].parse()?),
                ("logical", Some(c)) if words.len() == 3 => {
                    c.logical_x.push(words[1].parse()?);
                    c.logical_z.push(words[2].parse()?);
                }
                ("gauge", Some(c)) if words.len() == 3 => c.gauge.push((words[1].parse()?, words[2].parse()?)),
                ("end", Some(_)) if words.len() == 1 => {
                    let c = cur.take().unwrap();
                    c.validate()?;
                    if reg.codes.insert(c.name.clone(), c).is_some() {
                        return Err(err(ln, "duplicate code name"));
                    }
                }
                _ => return Err(err(ln, &format!("unexpected {line:?}"))),
            }
        }
        if cur.is_some() {
            return Err(Error::Parse("registry ends inside a code block".into()));
        }
        Ok(reg)
    }

    pub fn get(&self, name: &str) -> Result<&CodeDefinition> {
        self.codes
            .get(name)
            .ok_or_else(|| Error::Usage(format!("unknown code {name:?}")))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.codes.keys().map(|s| s.as_str())
    }
}

/// Shorthand for a code from the built-in registry.
pub fn builtin(name: &str) -> &'static CodeDefinition {
    Registry::builtin().get(name).expect("code is in the built-in registry")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_registry_loads_all_codes() {
        let names: Vec<&str> = Registry::builtin().names().collect();
        assert_eq!(names, ["16-6-4", "4-1-2", "4-2-2", "8-3-2"]);
        assert_eq!(builtin("4-2-2").k(), 2);
        assert_eq!(builtin("4-1-2").k(), 1);
        assert_eq!(builtin("8-3-2").k(), 3);
        assert_eq!(builtin("16-6-4").k(), 6);
        assert!(Registry::builtin().names().all(|n| builtin(n).is_css()));
    }

    #[test]
    fn corrupted_generator_is_rejected() {
        let text = BUILTIN.replacen("stabilizer ZZZZ\n", "stabilizer ZZZI\n", 1);
        assert!(Registry::parse(&text).is_err());
    }

    #[test]
    fn malformed_lines_are_parse_errors() {
        assert!(Registry::parse("code a\nn 1\nbogus\nend\n").is_err());
        assert!(Registry::parse("code a\nn 2\nstabilizer ZZ\nlogical XX IZ\n").is_err());
    }
}
