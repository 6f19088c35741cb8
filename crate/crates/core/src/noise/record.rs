use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const RECORD_SCHEMA: u32 = 1;

/// Identifies which run and which measurement setting a trial belongs to.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialMeta {
    /// Canonical experiment spec, e.g. `bv:n=7,encoded=true,s=1111111`.
    pub experiment: String,
    /// Measurement setting within the experiment, e.g. `z` or `coh3`.
    pub setting: String,
    pub seed: u64,
    pub trial: u64,
}

/// The three images of one circuit instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialRecord {
    pub preselect: Vec<bool>,
    pub survival: Vec<bool>,
    /// `None` for atoms missing from the final image.
    pub readout: Vec<Option<bool>>,
    pub meta: TrialMeta,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    schema: u32,
    experiment: String,
    setting: String,
    seed: u64,
    trial: u64,
    preselect: String,
    survival: String,
    readout: String,
}

fn bits_to_string(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

fn string_to_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse(format!("bad mask character {c:?}"))),
        })
        .collect()
}

impl TrialRecord {
    pub fn n_atoms(&self) -> usize {
        self.readout.len()
    }

    pub fn lost_count(&self) -> usize {
        self.survival.iter().filter(|&&s| !s).count()
    }

    pub fn full_preselect(&self) -> bool {
        self.preselect.iter().all(|&p| p)
    }

    pub fn check(&self) -> Result<()> {
        let n = self.readout.len();
        if self.preselect.len() != n || self.survival.len() != n {
            return Err(Error::Parse("mask lengths differ".into()));
        }
        for i in 0..n {
            if self.readout[i].is_none() == self.survival[i] {
                return Err(Error::Parse(format!("atom {i}: readout and survival disagree")));
            }
            if !self.preselect[i] && self.survival[i] {
                return Err(Error::Parse(format!("atom {i} survived without being loaded")));
            }
        }
        Ok(())
    }

    /// One JSON Lines entry.
    pub fn to_json_line(&self) -> String {
        let w = Wire {
            schema: RECORD_SCHEMA,
            experiment: self.meta.experiment.clone(),
            setting: self.meta.setting.clone(),
            seed: self.meta.seed,
            trial: self.meta.trial,
            preselect: bits_to_string(&self.preselect),
            survival: bits_to_string(&self.survival),
            readout: self
                .readout
                .iter()
                .map(|b| match b {
                    None => 'L',
                    Some(true) => '1',
                    Some(false) => '0',
                })
                .collect(),
        };
        serde_json::to_string(&w).expect("record serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let w: Wire = serde_json::from_str(line).map_err(|e| Error::Parse(format!("record: {e}")))?;
        if w.schema != RECORD_SCHEMA {
            return Err(Error::Parse(format!("record schema {} (expected {RECORD_SCHEMA})", w.schema)));
        }
        let readout = w
            .readout
            .chars()
            .map(|c| match c {
                'L' => Ok(None),
                '0' => Ok(Some(false)),
                '1' => Ok(Some(true)),
                _ => Err(Error::Parse(format!("bad readout character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let r = TrialRecord {
            preselect: string_to_bits(&w.preselect)?,
            survival: string_to_bits(&w.survival)?,
            readout,
            meta: TrialMeta {
                experiment: w.experiment,
                setting: w.setting,
                seed: w.seed,
                trial: w.trial,
            },
        };
        r.check()?;
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_line_round_trip() {
        let r = TrialRecord {
            preselect: vec![true, true, false],
            survival: vec![true, false, false],
            readout: vec![Some(true), None, None],
            meta: TrialMeta {
                experiment: "cat:n=3".into(),
                setting: "z".into(),
                seed: 9,
                trial: 4,
            },
        };
        let line = r.to_json_line();
        assert!(line.contains("\"readout\":\"1LL\""));
        assert_eq!(TrialRecord::from_json_line(&line).unwrap(), r);
    }

    #[test]
    fn inconsistent_records_are_rejected() {
        let bad = r#"{"schema":1,"experiment":"x","setting":"z","seed":0,"trial":0,"preselect":"0","survival":"1","readout":"0"}"#;
        assert!(TrialRecord::from_json_line(bad).is_err());
        let old = r#"{"schema":0,"experiment":"x","setting":"z","seed":0,"trial":0,"preselect":"1","survival":"1","readout":"0"}"#;
        assert!(TrialRecord::from_json_line(old).is_err());
    }
}
