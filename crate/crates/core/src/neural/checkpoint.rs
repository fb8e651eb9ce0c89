use crate::scalar::Scalar;

use super::{NeuralError, Params};

const MAGIC: &[u8; 8] = b"ACTSEQCK";
const VERSION: u32 = 1;

/// Parsed checkpoint: JSON metadata plus named `f32` tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub meta: serde_json::Value,
    pub tensors: Vec<(String, Vec<usize>, Vec<f32>)>,
}

/// Layout: magic, version, metadata length and JSON, tensor count, then per
/// tensor its name, rank, dims and little-endian `f32` values.
pub fn write_checkpoint<S: Scalar>(params: &Params<S>, meta: &serde_json::Value) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let meta = meta.to_string();
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(meta.as_bytes());
    out.extend_from_slice(&(params.len() as u32).to_le_bytes());
    for (name, t) in params.iter() {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(t.shape().len() as u32).to_le_bytes());
        for &d in t.shape() {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for &v in t.data() {
            out.extend_from_slice(&v.to_f32_bits());
        }
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NeuralError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| NeuralError::Checkpoint("truncated file".into()))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, NeuralError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, NeuralError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

pub fn read_checkpoint(bytes: &[u8]) -> Result<Checkpoint, NeuralError> {
    let bad = |m: &str| NeuralError::Checkpoint(m.to_owned());
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(NeuralError::Checkpoint(format!("unsupported version {version}")));
    }
    let n = r.u32()? as usize;
    let meta = serde_json::from_slice(r.take(n)?).map_err(|e| bad(&e.to_string()))?;
    let count = r.u32()? as usize;
    let mut tensors = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let n = r.u32()? as usize;
        let name = String::from_utf8(r.take(n)?.to_vec()).map_err(|_| bad("bad tensor name"))?;
        let rank = r.u32()? as usize;
        let mut shape = Vec::with_capacity(rank.min(8));
        for _ in 0..rank {
            shape.push(r.u64()? as usize);
        }
        let len = shape
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .ok_or_else(|| bad("shape overflow"))?;
        let raw = r.take(len.checked_mul(4).ok_or_else(|| bad("shape overflow"))?)?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_f32_bits(c.try_into().expect("4 bytes")))
            .collect();
        tensors.push((name, shape, data));
    }
    if r.pos != bytes.len() {
        return Err(bad("trailing bytes"));
    }
    Ok(Checkpoint { meta, tensors })
}

impl Checkpoint {
    /// Copies values into `params`; names, order and shapes must match exactly.
    pub fn load_into<S: Scalar>(&self, params: &mut Params<S>) -> Result<(), NeuralError> {
        if self.tensors.len() != params.len() {
            return Err(NeuralError::Checkpoint(format!(
                "expected {} tensors, found {}",
                params.len(),
                self.tensors.len()
            )));
        }
        for ((name, shape, _), (pname, t)) in self.tensors.iter().zip(params.iter()) {
            if name != pname || shape.as_slice() != t.shape() {
                return Err(NeuralError::Checkpoint(format!(
                    "tensor {name} {shape:?} does not match {pname} {:?}",
                    t.shape()
                )));
            }
        }
        for ((_, _, data), t) in self.tensors.iter().zip(params.tensors_mut()) {
            for (dst, &v) in t.data_mut().iter_mut().zip(data) {
                *dst = S::of(v as f64);
            }
        }
        Ok(())
    }
}
