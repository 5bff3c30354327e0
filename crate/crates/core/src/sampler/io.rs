//! Field serialization: `theta,phi,value` CSV and a flat binary layout of a
//! 24-byte header (`b"SGRF1\0\0\0"`, `n_theta` and `n_phi` as little-endian
//! u64) followed by row-major little-endian f64 values.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::FieldSample;
use crate::error::{Error, Result};

const MAGIC: [u8; 8] = *b"SGRF1\0\0\0";

/// Values read back from the binary format; the grid kind is not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct RawField {
    pub n_theta: usize,
    pub n_phi: usize,
    pub values: Vec<f64>,
}

impl FieldSample {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Parse(e.to_string());
        w.write_record(["theta", "phi", "value"]).map_err(csv_err)?;
        let n_phi = self.grid.n_phi();
        for (k, v) in self.values.iter().enumerate() {
            let (i, j) = (k / n_phi, k % n_phi);
            w.write_record([
                self.grid.thetas[i].to_string(),
                self.grid.phis[j].to_string(),
                v.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(&MAGIC)?;
        writer.write_all(&(self.grid.n_theta() as u64).to_le_bytes())?;
        writer.write_all(&(self.grid.n_phi() as u64).to_le_bytes())?;
        for v in &self.values {
            writer.write_all(&v.to_le_bytes())?;
        }
        writer.flush()
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(BufWriter::new(file))
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_binary(BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

impl RawField {
    pub fn read_binary<R: Read>(mut reader: R) -> Result<Self> {
        let mut header = [0u8; 24];
        reader
            .read_exact(&mut header)
            .map_err(|e| Error::Parse(format!("field header: {e}")))?;
        if header[..8] != MAGIC {
            return Err(Error::Parse("not an SGRF1 field file".into()));
        }
        let word = |k: usize| u64::from_le_bytes(header[k..k + 8].try_into().unwrap()) as usize;
        let (n_theta, n_phi) = (word(8), word(16));
        let mut body = Vec::new();
        reader
            .read_to_end(&mut body)
            .map_err(|e| Error::Parse(format!("field body: {e}")))?;
        let expected = n_theta
            .checked_mul(n_phi)
            .and_then(|n| n.checked_mul(8))
            .ok_or_else(|| Error::Parse("field dimensions overflow".into()))?;
        if body.len() != expected {
            return Err(Error::Parse(format!(
                "{n_theta}x{n_phi} field needs {expected} bytes, found {}",
                body.len()
            )));
        }
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            n_theta,
            n_phi,
            values,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_binary(std::io::BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grid::{GridSpec, SphereGrid};

    fn sample() -> FieldSample {
        let g = Arc::new(SphereGrid::new(GridSpec::equiangular(3, 4)).unwrap());
        FieldSample::from_fn(g, |t, p| t * 10.0 + p)
    }

    #[test]
    fn binary_layout() {
        let f = sample();
        let mut buf = Vec::new();
        f.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 24 + 8 * 12);
        assert_eq!(&buf[..5], b"SGRF1");
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 3);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 4);
        let raw = RawField::read_binary(&buf[..]).unwrap();
        assert_eq!(raw.values, f.values);
    }

    #[test]
    fn binary_rejects_garbage() {
        assert!(RawField::read_binary(&b"SGRF2\0\0\0"[..]).is_err());
        let mut buf = Vec::new();
        sample().write_binary(&mut buf).unwrap();
        buf.pop();
        assert!(RawField::read_binary(&buf[..]).is_err());
    }

    #[test]
    fn csv_rows() {
        let mut buf = Vec::new();
        sample().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[0], "theta,phi,value");
        let first: Vec<f64> = lines[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(first[2], first[0] * 10.0 + first[1]);
    }
}
