//! Binary checkpoint format, all integers and floats little-endian:
//!
//! ```text
//! magic      8 bytes  "RESDTA\0\x01"
//! version    u32      FORMAT_VERSION
//! config_len u64      length of the JSON-encoded ModelConfig
//! config     bytes
//! epoch      u64      training epoch the weights come from
//! count      u32      number of tensors
//! per tensor:
//!   name_len u32, name (utf-8), ndim u32, dims u64 * ndim, data f64 * prod(dims)
//! ```
//!
//! Tensors appear in [`ModelParams::tensors`] order.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use super::config::ModelConfig;
use super::params::ModelParams;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"RESDTA\0\x01";

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub epoch: u64,
}

pub fn save_checkpoint(params: &ModelParams, epoch: u64, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::with_capacity(params.num_parameters() * 8 + 4096);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    let cfg = serde_json::to_vec(&params.config)?;
    buf.extend_from_slice(&(cfg.len() as u64).to_le_bytes());
    buf.extend_from_slice(&cfg);
    buf.extend_from_slice(&epoch.to_le_bytes());
    let tensors = params.tensors();
    buf.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in &tensors {
        buf.extend_from_slice(&(t.name.len() as u32).to_le_bytes());
        buf.extend_from_slice(t.name.as_bytes());
        buf.extend_from_slice(&(t.shape.len() as u32).to_le_bytes());
        for &d in &t.shape {
            buf.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for &x in t.data {
            buf.extend_from_slice(&x.to_le_bytes());
        }
    }
    let mut file = fs::File::create(path).map_err(|e| Error::file(path, e))?;
    file.write_all(&buf).map_err(|e| Error::file(path, e))?;
    Ok(())
}

fn read_u32(r: &mut impl Read) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_bytes(r: &mut impl Read, len: u64) -> io::Result<Vec<u8>> {
    let mut v = Vec::new();
    r.take(len).read_to_end(&mut v)?;
    if (v.len() as u64) < len {
        return Err(io::ErrorKind::UnexpectedEof.into());
    }
    Ok(v)
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<Checkpoint> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
    decode(&bytes).map_err(|e| match e {
        Error::Io(io) => Error::file(path, io),
        other => other,
    })
}

/// Loads a checkpoint and requires its embedded config to equal `expected`.
pub fn load_checkpoint_expecting(path: impl AsRef<Path>, expected: &ModelConfig) -> Result<Checkpoint> {
    let ckpt = load_checkpoint(path)?;
    if &ckpt.params.config != expected {
        return Err(Error::ConfigMismatch(format!(
            "checkpoint was trained with {:?}, expected {:?}",
            ckpt.params.config, expected
        )));
    }
    Ok(ckpt)
}

fn decode(bytes: &[u8]) -> Result<Checkpoint> {
    let mut r = bytes;
    let magic = read_bytes(&mut r, 8)?;
    if magic != MAGIC {
        return Err(Error::InvalidCheckpoint("bad magic".into()));
    }
    let version = read_u32(&mut r)?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let cfg_len = read_u64(&mut r)?;
    let cfg_bytes = read_bytes(&mut r, cfg_len)?;
    let config: ModelConfig = serde_json::from_slice(&cfg_bytes)
        .map_err(|e| Error::InvalidCheckpoint(format!("config: {e}")))?;
    let epoch = read_u64(&mut r)?;
    let count = read_u32(&mut r)? as usize;

    let mut params = ModelParams::init(&config, 0)
        .map_err(|e| Error::InvalidCheckpoint(format!("config: {e}")))?;
    let mut slots = params.tensors_mut();
    if slots.len() != count {
        return Err(Error::InvalidCheckpoint(format!(
            "{count} tensors, config implies {}",
            slots.len()
        )));
    }
    for slot in slots.iter_mut() {
        let name_len = read_u32(&mut r)? as u64;
        let name = String::from_utf8(read_bytes(&mut r, name_len)?)
            .map_err(|_| Error::InvalidCheckpoint("tensor name is not utf-8".into()))?;
        let ndim = read_u32(&mut r)? as usize;
        let shape = (0..ndim)
            .map(|_| read_u64(&mut r).map(|d| d as usize))
            .collect::<io::Result<Vec<usize>>>()?;
        if name != slot.name || shape != slot.shape {
            return Err(Error::InvalidCheckpoint(format!(
                "tensor {name} {shape:?} where {} {:?} was expected",
                slot.name, slot.shape
            )));
        }
        for x in slot.data.iter_mut() {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            *x = f64::from_le_bytes(b);
        }
    }
    drop(slots);
    if !r.is_empty() {
        return Err(Error::InvalidCheckpoint(format!("{} trailing bytes", r.len())));
    }
    Ok(Checkpoint { params, epoch })
}
