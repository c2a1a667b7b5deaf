//! Grayscale B-scan rendering to binary PGM.

use std::path::Path;

use super::{atomic_write, IoError};
use crate::signal::Radargram;

/// Render a radargram as a binary PGM image: x is the trace index, y the
/// time sample (time increasing downward). Amplitudes are clipped
/// symmetrically at the given percentile of |amplitude| and mapped
/// linearly onto black..white, zero landing mid-gray.
///
/// If the percentile lands on zero (sparse data) the maximum |amplitude|
/// is used instead; an all-zero radargram renders uniform mid-gray.
pub fn render_bscan(r: &Radargram, path: &Path, clip_percentile: f64) -> Result<(), IoError> {
    if r.traces.is_empty() {
        return Err(IoError::InvalidInput("cannot render an empty radargram".into()));
    }
    if !(clip_percentile > 0.0 && clip_percentile <= 100.0) {
        return Err(IoError::InvalidInput(format!(
            "clip percentile must lie in (0, 100], got {clip_percentile}"
        )));
    }
    let width = r.trace_count();
    let height = r.samples_per_trace();

    let mut magnitudes: Vec<f64> = r
        .traces
        .iter()
        .flat_map(|t| t.samples.iter().map(|s| s.abs()))
        .collect();
    magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = ((clip_percentile / 100.0) * magnitudes.len() as f64).ceil() as usize;
    let mut clip = magnitudes[rank.clamp(1, magnitudes.len()) - 1];
    if clip == 0.0 {
        clip = *magnitudes.last().unwrap();
    }

    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.reserve(width * height);
    for y in 0..height {
        for trace in &r.traces {
            let v = if clip == 0.0 {
                128
            } else {
                let a = trace.samples[y].clamp(-clip, clip);
                ((a + clip) / (2.0 * clip) * 255.0).round() as u8
            };
            bytes.push(v);
        }
    }
    atomic_write(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Trace;
    use tempfile::tempdir;

    fn gram(columns: Vec<Vec<f64>>) -> Radargram {
        let traces = columns
            .into_iter()
            .map(|samples| Trace {
                samples,
                dt: 1.0,
                t0: 0.0,
            })
            .collect();
        Radargram { traces, dx: 1.0 }
    }

    fn read_pgm(path: &Path) -> (usize, usize, Vec<u8>) {
        let bytes = std::fs::read(path).unwrap();
        let header_end = bytes
            .windows(1)
            .enumerate()
            .filter(|(_, w)| w[0] == b'\n')
            .map(|(i, _)| i)
            .nth(2)
            .unwrap()
            + 1;
        let header = std::str::from_utf8(&bytes[..header_end]).unwrap();
        let mut lines = header.lines();
        assert_eq!(lines.next().unwrap(), "P5");
        let dims: Vec<usize> = lines
            .next()
            .unwrap()
            .split_whitespace()
            .map(|v| v.parse().unwrap())
            .collect();
        (dims[0], dims[1], bytes[header_end..].to_vec())
    }

    #[test]
    fn all_zero_renders_uniform_mid_gray() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("zero.pgm");
        render_bscan(&gram(vec![vec![0.0; 8]; 3]), &path, 99.0).unwrap();
        let (w, h, pixels) = read_pgm(&path);
        assert_eq!((w, h), (3, 8));
        assert!(pixels.iter().all(|&p| p == 128));
    }

    #[test]
    fn single_spike_is_one_white_pixel() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("spike.pgm");
        let mut cols = vec![vec![0.0; 40]; 5];
        cols[2][7] = 3.5;
        render_bscan(&gram(cols), &path, 99.0).unwrap();
        let (w, _h, pixels) = read_pgm(&path);
        for (idx, &p) in pixels.iter().enumerate() {
            let (x, y) = (idx % w, idx / w);
            if (x, y) == (2, 7) {
                assert_eq!(p, 255, "spike pixel should be white");
            } else {
                assert_eq!(p, 128, "background pixel ({x},{y})");
            }
        }
    }

    #[test]
    fn dimensions_are_traces_by_samples() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("dims.pgm");
        render_bscan(&gram(vec![vec![1.0; 17]; 9]), &path, 99.0).unwrap();
        let (w, h, pixels) = read_pgm(&path);
        assert_eq!((w, h), (9, 17));
        assert_eq!(pixels.len(), 9 * 17);
    }

    #[test]
    fn rendering_is_byte_deterministic() {
        let dir = tempdir().unwrap();
        let a = dir.path().join("a.pgm");
        let b = dir.path().join("b.pgm");
        let mut r = crate::rng::seeded(3);
        let g = gram((0..6).map(|_| crate::rng::normal_vec(&mut r, 32)).collect());
        render_bscan(&g, &a, 99.0).unwrap();
        render_bscan(&g, &b, 99.0).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn empty_radargram_is_rejected() {
        let dir = tempdir().unwrap();
        let r = Radargram {
            traces: vec![],
            dx: 1.0,
        };
        assert!(render_bscan(&r, &dir.path().join("x.pgm"), 99.0).is_err());
    }
}
