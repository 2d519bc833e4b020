//! Flat binary parameter container.
//!
//! All integers and floats are little-endian:
//!
//! ```text
//! magic    8 bytes  "HPGCNCKP"
//! version  u32      1
//! count    u32      number of records
//! record × count:
//!   name_len u32, name (UTF-8, name_len bytes)
//!   rows u64, cols u64
//!   data     rows·cols × f64, row-major
//! ```

use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::DenseMatrix;

pub const CHECKPOINT_MAGIC: &[u8; 8] = b"HPGCNCKP";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn encode_checkpoint(records: &[(String, DenseMatrix)]) -> Vec<u8> {
    let payload: usize = records
        .iter()
        .map(|(n, m)| 4 + n.len() + 16 + 8 * m.as_slice().len())
        .sum();
    let mut out = Vec::with_capacity(16 + payload);
    out.extend_from_slice(CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(records.len() as u32).to_le_bytes());
    for (name, m) in records {
        out.extend_from_slice(&(name.len() as u32).to_le_bytes());
        out.extend_from_slice(name.as_bytes());
        out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
        out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
        for v in m.as_slice() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_checkpoint(bytes: &[u8]) -> Result<Vec<(String, DenseMatrix)>> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = r.u32()?;
    if version != CHECKPOINT_VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let count = r.u32()? as usize;
    let mut records = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let name_len = r.u32()? as usize;
        let name = std::str::from_utf8(r.take(name_len)?)
            .map_err(|_| Error::Checkpoint("tensor name is not UTF-8".into()))?
            .to_string();
        let rows = r.u64()? as usize;
        let cols = r.u64()? as usize;
        let len = rows
            .checked_mul(cols)
            .and_then(|l| l.checked_mul(8))
            .ok_or_else(|| Error::Checkpoint(format!("tensor '{name}' shape overflows")))?;
        let data = r
            .take(len)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        records.push((name, DenseMatrix::from_vec(rows, cols, data)?));
    }
    if r.pos != bytes.len() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok(records)
}

pub fn save_checkpoint(path: &Path, records: &[(String, DenseMatrix)]) -> Result<()> {
    std::fs::write(path, encode_checkpoint(records)).map_err(|e| Error::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<Vec<(String, DenseMatrix)>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_checkpoint(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let bytes = encode_checkpoint(&[("w".into(), DenseMatrix::from_rows(&[[1.5]]))]);
        assert_eq!(&bytes[..8], b"HPGCNCKP");
        assert_eq!(&bytes[8..12], &1u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &1u32.to_le_bytes());
        assert_eq!(&bytes[16..20], &1u32.to_le_bytes());
        assert_eq!(bytes[20], b'w');
        assert_eq!(&bytes[37..45], &1.5f64.to_le_bytes());
        assert_eq!(bytes.len(), 45);
    }

    #[test]
    fn rejects_corruption() {
        let mut bytes = encode_checkpoint(&[("w".into(), DenseMatrix::zeros(2, 2))]);
        assert!(decode_checkpoint(&bytes[..bytes.len() - 1]).is_err());
        bytes.push(0);
        assert!(decode_checkpoint(&bytes).is_err());
        bytes[0] = b'X';
        assert!(decode_checkpoint(&bytes).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(shapes in proptest::collection::vec((0usize..5, 0usize..5), 0..4), fill in -1e6f64..1e6) {
            let records: Vec<(String, DenseMatrix)> = shapes
                .iter()
                .enumerate()
                .map(|(i, &(r, c))| {
                    let data = (0..r * c).map(|k| fill + k as f64 * 0.125).collect();
                    (format!("p{i}.weight"), DenseMatrix::from_vec(r, c, data).unwrap())
                })
                .collect();
            let back = decode_checkpoint(&encode_checkpoint(&records)).unwrap();
            prop_assert_eq!(back, records);
        }
    }
}
