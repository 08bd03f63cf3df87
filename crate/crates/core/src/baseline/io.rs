//! `NGLM` binary model file, all integers and floats little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "NGLM"
//! 4       2     version (u16) = 1
//! 6       4     n_min (u32)
//! 10      4     n_max (u32)
//! 14      8     hash_dim (u64)
//! 22      8     seed (u64)
//! 30      8     bias (f64)
//! 38      8*D   weights (f64 × hash_dim)
//! ```

use std::io::{Read, Write};
use std::path::Path;

use super::NgramLinearModel;
use crate::data_model::io::{create, open};
use crate::error::{Error, Result};

pub const NGLM_MAGIC: &[u8; 4] = b"NGLM";
pub const NGLM_VERSION: u16 = 1;

pub fn write_model_to<W: Write>(model: &NgramLinearModel, mut w: W, path: &Path) -> Result<()> {
    let io = |e| Error::io(path, e);
    w.write_all(NGLM_MAGIC).map_err(io)?;
    w.write_all(&NGLM_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(model.n_min as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&(model.n_max as u32).to_le_bytes()).map_err(io)?;
    w.write_all(&(model.hash_dim as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&model.seed.to_le_bytes()).map_err(io)?;
    w.write_all(&model.bias.to_le_bytes()).map_err(io)?;
    let mut buf = Vec::with_capacity(model.weights.len() * 8);
    for x in &model.weights {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf).map_err(io)?;
    w.flush().map_err(io)
}

pub fn save_model(model: &NgramLinearModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_model_to(model, create(path)?, path)
}

pub fn read_model_from<R: Read>(mut r: R, path: &Path) -> Result<NgramLinearModel> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    let bad = |m: &str| Error::schema(path, m.to_string());
    if bytes.len() < 38 || &bytes[..4] != NGLM_MAGIC {
        return Err(bad("not an NGLM model file"));
    }
    let u16_at = |o: usize| u16::from_le_bytes(bytes[o..o + 2].try_into().unwrap());
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u16_at(4);
    if version != NGLM_VERSION {
        return Err(bad(&format!("unsupported NGLM version {version}")));
    }
    let n_min = u32_at(6) as usize;
    let n_max = u32_at(10) as usize;
    let hash_dim = u64_at(14);
    let seed = u64_at(22);
    let bias = f64::from_bits(u64_at(30));
    let expected = (hash_dim as u128) * 8 + 38;
    if bytes.len() as u128 != expected {
        return Err(bad(&format!("expected {expected} bytes for hash_dim {hash_dim}, found {}", bytes.len())));
    }
    let mut model = NgramLinearModel::zeros(n_min, n_max, hash_dim as usize, seed)
        .map_err(|e| bad(&e.to_string()))?;
    model.bias = bias;
    for (w, chunk) in model.weights.iter_mut().zip(bytes[38..].chunks_exact(8)) {
        *w = f64::from_le_bytes(chunk.try_into().unwrap());
    }
    if !bias.is_finite() || model.weights.iter().any(|w| !w.is_finite()) {
        return Err(bad("non-finite weight"));
    }
    Ok(model)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<NgramLinearModel> {
    let path = path.as_ref();
    read_model_from(open(path)?, path)
}
