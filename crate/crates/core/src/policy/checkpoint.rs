//! Versioned JSON dump of a trained policy.
//!
//! Fields, in order:
//!
//! | field             | meaning                                                   |
//! |-------------------|-----------------------------------------------------------|
//! | `format`          | always `"qchain-policy"`                                  |
//! | `version`         | schema version, currently 1                               |
//! | `actor.spec`      | input/hidden/output widths and output activation          |
//! | `actor.params`    | flat parameters: per layer `out×in` row-major weights, then `out` biases |
//! | `critic.*`        | same layout for the value network                         |
//! | `actor_opt`, `critic_opt` | Adam `lr`, `beta1`, `beta2`, `eps`, moments `m`, `v`, step count `t` |
//! | `rng.seed`        | master training seed                                      |
//! | `rng.rounds_completed` | number of finished rounds; every stream of round `k` is derived from `(seed, k)` |

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::PolicyParameters;
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "qchain-policy";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub rounds_completed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    #[serde(flatten)]
    pub params: PolicyParameters,
    pub rng: RngState,
}

impl Checkpoint {
    pub fn new(params: PolicyParameters, seed: u64, rounds_completed: usize) -> Self {
        Checkpoint {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            params,
            rng: RngState { seed, rounds_completed },
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ck: Checkpoint = serde_json::from_str(&text)?;
        if ck.format != CHECKPOINT_FORMAT || ck.version != CHECKPOINT_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported checkpoint {} v{}",
                ck.format, ck.version
            )));
        }
        Ok(ck)
    }
}
