//! JSON state and protocol files. Complex numbers are `[re, im]` pairs and matrices are
//! nine row-major entries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::pauli::PauliIndex;
use crate::protocol::{Construction, Outcome, Protocol, Stage};
use crate::scalar::C;
use crate::seed::SeedParams;
use crate::state::GenericState;

pub const SCHEMA_VERSION: &str = "1";

pub type ComplexJson = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedJson {
    pub a: ComplexJson,
    pub b: ComplexJson,
    pub c: ComplexJson,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema_version: String,
    pub seed: SeedJson,
    pub g: Vec<Vec<ComplexJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

fn cj(z: C<f64>) -> ComplexJson {
    [z.re, z.im]
}

fn jc(z: ComplexJson) -> C<f64> {
    C::new(z[0], z[1])
}

pub fn mat_to_json(m: &Mat3<f64>) -> Vec<ComplexJson> {
    m.to_flat().iter().map(|z| cj(*z)).collect()
}

pub fn mat_from_json(v: &[ComplexJson], field: &str) -> Result<Mat3<f64>> {
    if v.len() != 9 {
        return Err(Error::Input(format!("{field}: expected 9 entries, found {}", v.len())));
    }
    if let Some(i) = v.iter().position(|z| !z[0].is_finite() || !z[1].is_finite()) {
        return Err(Error::Input(format!("{field}[{i}]: non-finite entry")));
    }
    let flat: [C<f64>; 9] = std::array::from_fn(|i| jc(v[i]));
    Ok(Mat3::from_flat(&flat))
}

impl StateFile {
    pub fn from_state(s: &GenericState<f64>, metadata: Option<Metadata>) -> Self {
        StateFile {
            schema_version: SCHEMA_VERSION.into(),
            seed: SeedJson { a: cj(s.seed.a), b: cj(s.seed.b), c: cj(s.seed.c) },
            g: s.g.iter().map(mat_to_json).collect(),
            metadata,
        }
    }

    /// Validates the schema and every invariant of [`GenericState`].
    pub fn to_state(&self) -> Result<GenericState<f64>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Input(format!("schema_version: expected \"{SCHEMA_VERSION}\", found \"{}\"", self.schema_version)));
        }
        if self.g.len() != 3 {
            return Err(Error::Input(format!("g: expected 3 factors, found {}", self.g.len())));
        }
        for (name, z) in [("seed.a", self.seed.a), ("seed.b", self.seed.b), ("seed.c", self.seed.c)] {
            if !z[0].is_finite() || !z[1].is_finite() {
                return Err(Error::Input(format!("{name}: non-finite entry")));
            }
        }
        let seed = SeedParams::new(jc(self.seed.a), jc(self.seed.b), jc(self.seed.c));
        let g = [
            mat_from_json(&self.g[0], "g[0]")?,
            mat_from_json(&self.g[1], "g[1]")?,
            mat_from_json(&self.g[2], "g[2]")?,
        ];
        GenericState::new(seed, g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("state files always serialize")
    }

    /// Parses and validates; syntax errors carry line and column.
    pub fn parse(text: &str) -> Result<(Self, GenericState<f64>)> {
        let file: StateFile = serde_json::from_str(text)?;
        let state = file.to_state()?;
        Ok((file, state))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeJson {
    pub label: [u8; 2],
    pub factors: Vec<Vec<ComplexJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageJson {
    /// Zero-based party index, absent for a SEP map.
    #[serde(default)]
    pub measuring_party: Option<usize>,
    pub outcomes: Vec<OutcomeJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub schema_version: String,
    pub construction: String,
    pub stages: Vec<StageJson>,
    pub initial: StateFile,
    pub target: StateFile,
    #[serde(default)]
    pub trivial: bool,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ProtocolFile {
    pub fn from_protocol(p: &Protocol<f64>) -> Self {
        ProtocolFile {
            schema_version: SCHEMA_VERSION.into(),
            construction: p.construction.name().into(),
            stages: p
                .stages
                .iter()
                .map(|s| StageJson {
                    measuring_party: s.measuring_party,
                    outcomes: s
                        .outcomes
                        .iter()
                        .map(|o| OutcomeJson { label: [o.label.k1, o.label.k2], factors: o.factors.iter().map(mat_to_json).collect() })
                        .collect(),
                })
                .collect(),
            initial: StateFile::from_state(&p.initial, None),
            target: StateFile::from_state(&p.target, None),
            trivial: p.trivial,
            epsilon: p.epsilon,
            notes: p.notes.clone(),
        }
    }

    pub fn to_protocol(&self) -> Result<Protocol<f64>> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Input(format!("schema_version: expected \"{SCHEMA_VERSION}\", found \"{}\"", self.schema_version)));
        }
        let construction = Construction::from_name(&self.construction)
            .ok_or_else(|| Error::Input(format!("construction: unknown value \"{}\"", self.construction)))?;
        let mut stages = Vec::with_capacity(self.stages.len());
        for (si, s) in self.stages.iter().enumerate() {
            if let Some(m) = s.measuring_party {
                if m > 2 {
                    return Err(Error::Input(format!("stages[{si}].measuring_party: {m} out of range")));
                }
            }
            let mut outcomes = Vec::with_capacity(s.outcomes.len());
            for (oi, o) in s.outcomes.iter().enumerate() {
                let field = format!("stages[{si}].outcomes[{oi}]");
                if o.label.iter().any(|x| *x > 2) || o.factors.len() != 3 {
                    return Err(Error::Input(format!("{field}: label entries must be 0..=2 and exactly 3 factors are required")));
                }
                let factors = [
                    mat_from_json(&o.factors[0], &format!("{field}.factors[0]"))?,
                    mat_from_json(&o.factors[1], &format!("{field}.factors[1]"))?,
                    mat_from_json(&o.factors[2], &format!("{field}.factors[2]"))?,
                ];
                outcomes.push(Outcome { label: PauliIndex::new(o.label[0] as i64, o.label[1] as i64), factors });
            }
            stages.push(Stage { measuring_party: s.measuring_party, outcomes });
        }
        Ok(Protocol {
            construction,
            stages,
            initial: self.initial.to_state()?,
            target: self.target.to_state()?,
            trivial: self.trivial,
            epsilon: self.epsilon,
            notes: self.notes.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("protocol files always serialize")
    }

    pub fn parse(text: &str) -> Result<(Self, Protocol<f64>)> {
        let file: ProtocolFile = serde_json::from_str(text)?;
        let p = file.to_protocol()?;
        Ok((file, p))
    }
}
