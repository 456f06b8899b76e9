//! Versioned flat binary model checkpoints.
//!
//! Layout, all integers and floats little-endian:
//!
//! | bytes   | field                                               |
//! |---------|-----------------------------------------------------|
//! | 8       | magic `CIXMODEL`                                    |
//! | 4       | format version (`u32`, currently 1)                 |
//! | 4       | model kind (`u32`: 0 tabular, 1 linear, 2 mlp)      |
//! | 4       | number of dimensions `n` (`u32`)                    |
//! | 8·n     | dimensions (`u64` each, see [`Architecture`])       |
//! | 8       | parameter count `d` (`u64`)                         |
//! | 8·d     | parameters (`f64`)                                  |

use std::io::{Read, Write};

use super::{ActorCriticMlp, LinearModel, MlpArchitecture, PreferenceModel, TabularModel};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"CIXMODEL";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    /// Dimensions `[num_states, num_actions]`.
    Tabular { num_states: usize, num_actions: usize },
    /// Dimensions `[input_width, num_actions]`.
    Linear { input_width: usize, num_actions: usize },
    /// Dimensions `[input_width, hidden1, hidden2, num_actions]`.
    Mlp(MlpArchitecture),
}

impl Architecture {
    fn kind(&self) -> u32 {
        match self {
            Architecture::Tabular { .. } => 0,
            Architecture::Linear { .. } => 1,
            Architecture::Mlp(_) => 2,
        }
    }

    fn dims(&self) -> Vec<usize> {
        match *self {
            Architecture::Tabular { num_states, num_actions } => vec![num_states, num_actions],
            Architecture::Linear { input_width, num_actions } => vec![input_width, num_actions],
            Architecture::Mlp(a) => vec![a.input_width, a.hidden1, a.hidden2, a.num_actions],
        }
    }

    fn from_parts(kind: u32, dims: &[usize]) -> Result<Self> {
        match (kind, dims) {
            (0, &[num_states, num_actions]) => Ok(Architecture::Tabular { num_states, num_actions }),
            (1, &[input_width, num_actions]) => Ok(Architecture::Linear { input_width, num_actions }),
            (2, &[input_width, hidden1, hidden2, num_actions]) => Ok(Architecture::Mlp(MlpArchitecture {
                input_width,
                hidden1,
                hidden2,
                num_actions,
            })),
            _ => Err(Error::Checkpoint(format!("unknown model kind {kind} with {} dims", dims.len()))),
        }
    }

    pub fn num_params(&self) -> usize {
        match *self {
            Architecture::Tabular { num_states, num_actions } => num_states * num_actions,
            Architecture::Linear { input_width, num_actions } => input_width * num_actions,
            Architecture::Mlp(a) => a.num_params(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub architecture: Architecture,
    pub params: Vec<f64>,
}

impl Checkpoint {
    pub fn tabular(model: &TabularModel) -> Self {
        Self {
            architecture: Architecture::Tabular {
                num_states: model.num_states(),
                num_actions: model.num_actions(),
            },
            params: model.params().to_vec(),
        }
    }

    pub fn linear(model: &LinearModel) -> Self {
        Self {
            architecture: Architecture::Linear {
                input_width: model.input_width(),
                num_actions: model.num_actions(),
            },
            params: model.params().to_vec(),
        }
    }

    pub fn mlp(model: &ActorCriticMlp) -> Self {
        Self {
            architecture: Architecture::Mlp(model.architecture()),
            params: PreferenceModel::params(model).to_vec(),
        }
    }

    pub fn into_mlp(self) -> Result<ActorCriticMlp> {
        match self.architecture {
            Architecture::Mlp(a) => ActorCriticMlp::from_params(a, self.params),
            other => Err(Error::Checkpoint(format!("expected an mlp checkpoint, found {other:?}"))),
        }
    }
}

pub fn write_checkpoint<W: Write>(mut w: W, checkpoint: &Checkpoint) -> Result<()> {
    let dims = checkpoint.architecture.dims();
    if checkpoint.params.len() != checkpoint.architecture.num_params() {
        return Err(Error::Checkpoint("parameter count does not match architecture".into()));
    }
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&CHECKPOINT_VERSION.to_le_bytes())?;
    w.write_all(&checkpoint.architecture.kind().to_le_bytes())?;
    w.write_all(&(dims.len() as u32).to_le_bytes())?;
    for d in dims {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    w.write_all(&(checkpoint.params.len() as u64).to_le_bytes())?;
    for p in &checkpoint.params {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Checkpoint(format!("truncated checkpoint: {e}")))?;
    Ok(buf)
}

pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Checkpoint> {
    let magic: [u8; 8] = read_array(&mut r)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let kind = u32::from_le_bytes(read_array(&mut r)?);
    let ndims = u32::from_le_bytes(read_array(&mut r)?);
    if ndims > 16 {
        return Err(Error::Checkpoint(format!("implausible dimension count {ndims}")));
    }
    let dims = (0..ndims)
        .map(|_| Ok(u64::from_le_bytes(read_array(&mut r)?) as usize))
        .collect::<Result<Vec<_>>>()?;
    let architecture = Architecture::from_parts(kind, &dims)?;
    let count = u64::from_le_bytes(read_array(&mut r)?) as usize;
    if count != architecture.num_params() {
        return Err(Error::Checkpoint(format!(
            "header declares {count} parameters, architecture needs {}",
            architecture.num_params()
        )));
    }
    let params = (0..count)
        .map(|_| Ok(f64::from_le_bytes(read_array(&mut r)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Checkpoint { architecture, params })
}
