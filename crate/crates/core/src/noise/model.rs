use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-operation error and loss rates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Uniform non-identity two-qubit Pauli after each CZ.
    pub p_2q_pauli: f64,
    /// Leakage of one (uniformly chosen) endpoint per CZ.
    pub p_2q_loss: f64,
    /// Uniform non-identity Pauli after each non-virtual one-qubit gate.
    pub p_1q: f64,
    /// Combined preparation-and-readout error of `|0⟩`.
    pub p_prep0: f64,
    /// Combined preparation-and-readout error of `|1⟩`.
    pub p_meas1: f64,
    pub p_move_loss: f64,
    pub p_load_loss: f64,
    /// Fraction of leakage events that end as a detectable loss; the rest
    /// stay in the trap as silently leaked atoms.
    pub leak_to_loss_clock: f64,
    /// Conversion fraction for leakage through the Rydberg state. Unused by
    /// the sampler, which routes all CZ leakage through the clock path.
    pub leak_to_loss_rydberg: f64,
    /// Z error probability per atom per millisecond of schedule time.
    pub idle_z_per_ms: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::paper()
    }
}

const KEYS: [&str; 10] = [
    "p_2q_pauli",
    "p_2q_loss",
    "p_1q",
    "p_prep0",
    "p_meas1",
    "p_move_loss",
    "p_load_loss",
    "leak_to_loss_clock",
    "leak_to_loss_rydberg",
    "idle_z_per_ms",
];

impl NoiseModel {
    /// Calibrated to the benchmarked hardware rates.
    pub fn paper() -> Self {
        Self {
            p_2q_pauli: 0.0039,
            p_2q_loss: 0.0075,
            p_1q: 6.7e-4,
            p_prep0: 1.1e-3,
            p_meas1: 1.6e-3,
            p_move_loss: 5e-4,
            p_load_loss: 0.0104,
            leak_to_loss_clock: 0.99,
            leak_to_loss_rydberg: 0.70,
            idle_z_per_ms: 0.0,
        }
    }

    /// Every rate zero.
    pub fn zero() -> Self {
        Self {
            p_2q_pauli: 0.0,
            p_2q_loss: 0.0,
            p_1q: 0.0,
            p_prep0: 0.0,
            p_meas1: 0.0,
            p_move_loss: 0.0,
            p_load_loss: 0.0,
            leak_to_loss_clock: 0.99,
            leak_to_loss_rydberg: 0.70,
            idle_z_per_ms: 0.0,
        }
    }

    /// Two-qubit rates of gates on static atoms.
    pub fn static_atoms() -> Self {
        Self {
            p_2q_pauli: 0.0035,
            p_2q_loss: 0.0024,
            ..Self::paper()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "zero" => Ok(Self::zero()),
            "static" => Ok(Self::static_atoms()),
            _ => Err(Error::Usage(format!("unknown noise preset {name:?} (paper, zero, static)"))),
        }
    }

    fn field(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "p_2q_pauli" => &mut self.p_2q_pauli,
            "p_2q_loss" => &mut self.p_2q_loss,
            "p_1q" => &mut self.p_1q,
            "p_prep0" => &mut self.p_prep0,
            "p_meas1" => &mut self.p_meas1,
            "p_move_loss" => &mut self.p_move_loss,
            "p_load_loss" => &mut self.p_load_loss,
            "leak_to_loss_clock" => &mut self.leak_to_loss_clock,
            "leak_to_loss_rydberg" => &mut self.leak_to_loss_rydberg,
            "idle_z_per_ms" => &mut self.idle_z_per_ms,
            _ => return None,
        })
    }

    fn values(&self) -> [f64; 10] {
        [
            self.p_2q_pauli,
            self.p_2q_loss,
            self.p_1q,
            self.p_prep0,
            self.p_meas1,
            self.p_move_loss,
            self.p_load_loss,
            self.leak_to_loss_clock,
            self.leak_to_loss_rydberg,
            self.idle_z_per_ms,
        ]
    }

    /// Sets one rate by name.
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = self.field(key).ok_or_else(|| Error::Usage(format!("unknown noise key {key:?}")))?;
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Usage(format!("{key} = {value} is outside [0, 1]")));
        }
        *slot = value;
        Ok(())
    }

    /// Applies `key = value` lines (`#` comments, blank lines ignored) on
    /// top of `self`.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", ln + 1)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad number {:?}", ln + 1, v.trim())))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (k, v) in KEYS.iter().zip(self.values()) {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Usage(format!("{k} = {v} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Readout flip probabilities `(true 0, true 1)`. Half of each combined
    /// SPAM rate is charged to preparation, the rest to readout, so a
    /// prepared-and-read `|0⟩` (`|1⟩`) is wrong with the full `p_prep0`
    /// (`p_meas1`) to first order.
    pub fn readout_flip(&self) -> (f64, f64) {
        (self.p_prep0 / 2.0, (self.p_meas1 - self.p_prep0 / 2.0).max(0.0))
    }

    pub fn prep_flip(&self) -> f64 {
        self.p_prep0 / 2.0
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in KEYS.iter().zip(self.values()) {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    /// Parses a full config; unspecified keys keep the `paper` values.
    fn from_str(s: &str) -> Result<Self> {
        let mut m = Self::paper();
        m.apply_config(s)?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let m = NoiseModel::static_atoms();
        let back: NoiseModel = m.to_string().parse().unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn unknown_and_out_of_range_keys_are_rejected() {
        assert!("p_bogus = 0.1".parse::<NoiseModel>().is_err());
        assert!("p_1q = 1.5".parse::<NoiseModel>().is_err());
        assert!("p_1q 0.5".parse::<NoiseModel>().is_err());
        assert!(NoiseModel::preset("loud").is_err());
    }

    #[test]
    fn spam_split_keeps_combined_rates() {
        let m = NoiseModel::paper();
        let (r0, r1) = m.readout_flip();
        assert!((m.prep_flip() + r0 - m.p_prep0).abs() < 1e-15);
        assert!((m.prep_flip() + r1 - m.p_meas1).abs() < 1e-15);
    }
}
