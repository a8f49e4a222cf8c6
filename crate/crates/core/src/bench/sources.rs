use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ilp::IlpInstance;
use crate::instances::{preset, ProblemSpec};
use crate::io::load_instance;
use crate::tempering::stream_rng;
use rand::RngCore;

fn one() -> u64 {
    1
}

/// Where benchmark instances come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    /// `count` instances of a named generator preset, seeds
    /// `first_seed, first_seed + 1, …`.
    Preset {
        preset: String,
        #[serde(default = "one")]
        count: u64,
        #[serde(default)]
        first_seed: u64,
    },
    Generator {
        generator: ProblemSpec,
        #[serde(default = "one")]
        count: u64,
        #[serde(default)]
        first_seed: u64,
    },
    /// MPS or canonical JSON files; relative paths resolve against the
    /// directory of the spec file.
    Files { files: Vec<PathBuf> },
}

impl InstanceSource {
    pub fn resolve(&self, base: &Path) -> Result<Vec<IlpInstance>> {
        let out: Vec<IlpInstance> = match self {
            InstanceSource::Preset {
                preset: name,
                count,
                first_seed,
            } => {
                let spec = preset(name)?;
                (*first_seed..first_seed + count)
                    .map(|s| {
                        let mut inst = spec.generate(s)?;
                        inst.set_name(format!("{name}-s{s}"));
                        Ok(inst)
                    })
                    .collect::<Result<_>>()?
            }
            InstanceSource::Generator {
                generator,
                count,
                first_seed,
            } => (*first_seed..first_seed + count)
                .map(|s| generator.generate(s))
                .collect::<Result<_>>()?,
            InstanceSource::Files { files } => files
                .iter()
                .map(|f| load_instance(&base.join(f)))
                .collect::<Result<_>>()?,
        };
        if out.is_empty() {
            return Err(Error::ConfigInvalid("instance source is empty".into()));
        }
        Ok(out)
    }
}

/// Seed number `index` split off `master`; distinct indices give
/// independent streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    stream_rng(master, index).next_u64()
}

/// Stable 64-bit FNV-1a fingerprint of an instance's identity, used to key
/// per-instance seeds independently of list order.
pub(crate) fn instance_key(inst: &IlpInstance) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(inst.name().as_bytes());
    for v in [inst.n(), inst.m(), inst.nnz()] {
        eat(&(v as u64).to_le_bytes());
    }
    h
}
