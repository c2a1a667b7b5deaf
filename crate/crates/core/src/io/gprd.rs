//! The `.gprd` binary radargram format.
//!
//! A fixed 32-byte little-endian header followed by trace-major IEEE-754
//! samples:
//!
//! ```text
//! offset  size  field
//!      0     4  magic "GPRD"
//!      4     2  format version (u16)
//!      6     2  reserved, zero
//!      8     4  trace count (u32)
//!     12     4  samples per trace (u32)
//!     16     8  sampling interval dt in ns (f64)
//!     24     8  trace spacing dx in m (f64)
//!     32     -  trace count * samples * 8 bytes of f64 samples
//! ```
//!
//! Time axes are implicit from zero; a trace's `t0` is not persisted.

use std::path::Path;

use super::{atomic_write, IoError};
use crate::signal::{Radargram, Trace};

pub const MAGIC: &[u8; 4] = b"GPRD";
pub const FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 32;

/// Serialize a radargram. Round trips are bit-exact.
pub fn write_radargram(r: &Radargram, path: &Path) -> Result<(), IoError> {
    let traces = r.traces.len();
    let samples = r.traces.first().map_or(0, |t| t.len());
    let dt = r.traces.first().map_or(0.0, |t| t.dt);

    let mut bytes = Vec::with_capacity(HEADER_LEN + traces * samples * 8);
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    bytes.extend_from_slice(&[0u8; 2]);
    bytes.extend_from_slice(&(traces as u32).to_le_bytes());
    bytes.extend_from_slice(&(samples as u32).to_le_bytes());
    bytes.extend_from_slice(&dt.to_le_bytes());
    bytes.extend_from_slice(&r.dx.to_le_bytes());
    for t in &r.traces {
        for s in &t.samples {
            bytes.extend_from_slice(&s.to_le_bytes());
        }
    }
    atomic_write(path, &bytes)
}

pub fn read_radargram(path: &Path) -> Result<Radargram, IoError> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < HEADER_LEN {
        return Err(IoError::CorruptFile(format!(
            "{} bytes is shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(IoError::CorruptFile("bad magic".into()));
    }
    let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(IoError::UnsupportedVersion(version));
    }
    let traces = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let samples = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let dt = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let dx = f64::from_le_bytes(bytes[24..32].try_into().unwrap());

    let expected = HEADER_LEN + traces * samples * 8;
    if bytes.len() != expected {
        return Err(IoError::CorruptFile(format!(
            "payload is {} bytes, header implies {}",
            bytes.len() - HEADER_LEN,
            expected - HEADER_LEN
        )));
    }

    let mut out = Vec::with_capacity(traces);
    for t in 0..traces {
        let start = HEADER_LEN + t * samples * 8;
        let samples: Vec<f64> = (0..samples)
            .map(|s| {
                let o = start + s * 8;
                f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap())
            })
            .collect();
        out.push(Trace {
            samples,
            dt,
            t0: 0.0,
        });
    }
    // a header-only file is the valid degenerate empty radargram
    Ok(Radargram { traces: out, dx })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use tempfile::tempdir;

    fn sample_radargram(traces: usize, samples: usize) -> Radargram {
        let mut r = rng::seeded(1);
        let ts = (0..traces)
            .map(|_| Trace {
                samples: rng::normal_vec(&mut r, samples),
                dt: 2.5,
                t0: 0.0,
            })
            .collect();
        Radargram { traces: ts, dx: 0.5 }
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("section.gprd");
        let r = sample_radargram(256, 400);
        write_radargram(&r, &path).unwrap();
        let back = read_radargram(&path).unwrap();
        assert_eq!(r, back);
        // and the bytes themselves are stable
        let bytes1 = std::fs::read(&path).unwrap();
        write_radargram(&back, &path).unwrap();
        assert_eq!(bytes1, std::fs::read(&path).unwrap());
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("cut.gprd");
        let r = sample_radargram(4, 64);
        write_radargram(&r, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 9);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_radargram(&path), Err(IoError::CorruptFile(_))));
    }

    #[test]
    fn bad_magic_is_corrupt() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("alien.gprd");
        std::fs::write(&path, [0u8; 64]).unwrap();
        assert!(matches!(read_radargram(&path), Err(IoError::CorruptFile(_))));
    }

    #[test]
    fn unknown_version_is_reported() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("future.gprd");
        let r = sample_radargram(2, 16);
        write_radargram(&r, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[4] = 9;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            read_radargram(&path),
            Err(IoError::UnsupportedVersion(9))
        ));
    }

    #[test]
    fn header_only_file_is_a_valid_empty_radargram() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("empty.gprd");
        let empty = Radargram {
            traces: vec![],
            dx: 1.0,
        };
        write_radargram(&empty, &path).unwrap();
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 32);
        let back = read_radargram(&path).unwrap();
        assert_eq!(back.traces.len(), 0);
        assert_eq!(back.dx, 1.0);
    }
}
