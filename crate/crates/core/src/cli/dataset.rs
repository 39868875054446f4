//! Text format for recorded (or synthetic) raw two-antenna acquisitions.
//!
//! ```text
//! # qbr dataset
//! f0=2.4e10
//! B=2.5e8
//! M=512
//! N=256
//! d=6.2e-3
//! c=299792458
//! sweep=256
//! frames=106
//! source=anechoic-2target
//! frame=0
//! m,re_a1,im_a1,re_a2,im_a2
//! 0,1.0000000000000000e0,...
//! ```
//!
//! Header keys come first as `key=value` lines; `c`, `sweep` and `source` are
//! optional. Each frame starts with `frame=<index>` and a column header,
//! followed by exactly M rows. Values are written with 17 significant digits
//! so a write/read cycle is lossless.

use ndarray::Array2;
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::radar_model::{RadarConfig, SPEED_OF_LIGHT};

const COLUMNS: &str = "m,re_a1,im_a1,re_a2,im_a2";

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetHeader {
    pub radar: RadarConfig,
    pub frames: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordedDataset {
    pub header: DatasetHeader,
    /// Raw Γ per acquisition, M×2 each.
    pub frames: Vec<Array2<Complex64>>,
}

impl RecordedDataset {
    pub fn new(radar: RadarConfig, source: impl Into<String>, frames: Vec<Array2<Complex64>>) -> Result<Self> {
        let ds = RecordedDataset {
            header: DatasetHeader {
                radar,
                frames: frames.len(),
                source: source.into(),
            },
            frames,
        };
        ds.check_shapes()?;
        Ok(ds)
    }

    fn check_shapes(&self) -> Result<()> {
        let m = self.header.radar.num_freqs;
        if self.frames.len() != self.header.frames {
            return Err(Error::DimensionMismatch(format!(
                "header announces {} frames, found {}",
                self.header.frames,
                self.frames.len()
            )));
        }
        for (i, f) in self.frames.iter().enumerate() {
            if f.dim() != (m, 2) {
                return Err(Error::DimensionMismatch(format!(
                    "frame {i} is {}x{}, header says {m}x2",
                    f.nrows(),
                    f.ncols()
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let r = &self.header.radar;
        let mut s = String::from("# qbr dataset\n");
        let _ = writeln!(s, "f0={:.16e}", r.f0);
        let _ = writeln!(s, "B={:.16e}", r.bandwidth);
        let _ = writeln!(s, "M={}", r.num_freqs);
        let _ = writeln!(s, "N={}", r.num_ranges);
        let _ = writeln!(s, "d={:.16e}", r.antenna_spacing);
        let _ = writeln!(s, "c={:.16e}", r.speed_of_light);
        let _ = writeln!(s, "sweep={}", r.sweep_samples);
        let _ = writeln!(s, "frames={}", self.frames.len());
        let _ = writeln!(s, "source={}", self.header.source);
        for (i, f) in self.frames.iter().enumerate() {
            let _ = writeln!(s, "frame={i}\n{COLUMNS}");
            for (m, row) in f.rows().into_iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{m},{:.16e},{:.16e},{:.16e},{:.16e}",
                    row[0].re, row[0].im, row[1].re, row[1].im
                );
            }
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    /// Mean and largest per-part magnitude over all samples.
    pub fn amplitude_stats(&self) -> (f64, f64) {
        let (mut sum, mut max, mut n) = (0.0, 0.0f64, 0usize);
        for z in self.frames.iter().flat_map(|f| f.iter()) {
            sum += z.norm();
            max = max.max(z.re.abs()).max(z.im.abs());
            n += 1;
        }
        (sum / n.max(1) as f64, max)
    }
}

fn format_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("line {line}: {msg}"))
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| format_err(line, format!("invalid value {v:?} for {key}")))
}

/// Parses dataset text. Either the whole dataset is returned or an error.
pub fn parse_dataset(src: &str) -> Result<RecordedDataset> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .peekable();

    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    while let Some(&(no, l)) = lines.peek() {
        if l.starts_with("frame=") {
            break;
        }
        let (k, v) = l
            .split_once('=')
            .ok_or_else(|| format_err(no, "expected key=value header line"))?;
        header.insert(k.trim().to_string(), (no, v.trim().to_string()));
        lines.next();
    }
    let get = |key: &str| header.get(key).ok_or_else(|| Error::Format(format!("missing header key {key}")));
    let num = |key: &str| -> Result<f64> {
        let (no, v) = get(key)?;
        parse_num(*no, key, v)
    };
    let count = |key: &str| -> Result<usize> {
        let (no, v) = get(key)?;
        parse_num(*no, key, v)
    };
    let m = count("M")?;
    let radar = RadarConfig {
        f0: num("f0")?,
        bandwidth: num("B")?,
        num_freqs: m,
        num_ranges: count("N")?,
        antenna_spacing: num("d")?,
        speed_of_light: if header.contains_key("c") { num("c")? } else { SPEED_OF_LIGHT },
        sweep_samples: if header.contains_key("sweep") { count("sweep")? } else { m },
    };
    let n_frames = count("frames")?;
    let source = header.get("source").map(|(_, v)| v.clone()).unwrap_or_default();
    radar.validate().map_err(|e| Error::Format(format!("invalid header: {e}")))?;

    let mut frames = Vec::with_capacity(n_frames);
    while let Some((no, l)) = lines.next() {
        let idx: usize = match l.strip_prefix("frame=") {
            Some(v) => parse_num(no, "frame", v)?,
            None => return Err(format_err(no, "expected frame=<index>")),
        };
        if idx != frames.len() {
            return Err(format_err(no, format!("frame {idx} out of order")));
        }
        match lines.next() {
            Some((_, c)) if c.replace(' ', "") == COLUMNS => {}
            Some((no, _)) => return Err(format_err(no, format!("expected column header {COLUMNS}"))),
            None => return Err(Error::Format(format!("frame {idx} truncated before its column header"))),
        }
        let mut frame = Array2::zeros((m, 2));
        for row in 0..m {
            let (no, l) = lines
                .next()
                .ok_or_else(|| Error::Format(format!("frame {idx} truncated after {row} of {m} rows")))?;
            if l.starts_with("frame=") {
                return Err(format_err(no, format!("frame {idx} has {row} rows, expected {m}")));
            }
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::DimensionMismatch(format!("line {no}: expected 5 columns, found {}", fields.len())));
            }
            let mi: usize = parse_num(no, "m", fields[0])?;
            if mi != row {
                return Err(format_err(no, format!("sample index {mi}, expected {row}")));
            }
            let v: Vec<f64> = fields[1..]
                .iter()
                .map(|f| parse_num(no, "sample", f))
                .collect::<Result<_>>()?;
            frame[[row, 0]] = Complex64::new(v[0], v[1]);
            frame[[row, 1]] = Complex64::new(v[2], v[3]);
        }
        frames.push(frame);
    }
    if frames.len() != n_frames {
        return Err(Error::Format(format!("header announces {n_frames} frames, file holds {}", frames.len())));
    }
    let ds = RecordedDataset {
        header: DatasetHeader {
            radar,
            frames: n_frames,
            source,
        },
        frames,
    };
    let (mean, max) = ds.amplitude_stats();
    log::info!(
        "ingested {} frames of {}x2 ({}), mean |sample| {mean:.4e}, max part {max:.4e}",
        ds.frames.len(),
        m,
        if ds.header.source.is_empty() { "no source tag" } else { &ds.header.source }
    );
    Ok(ds)
}

pub fn ingest_recorded(path: &Path) -> Result<RecordedDataset> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RecordedDataset {
        let radar = RadarConfig { num_freqs: 4, num_ranges: 4, sweep_samples: 4, ..RadarConfig::default() };
        let frames = (0..3)
            .map(|f| {
                Array2::from_shape_fn((4, 2), |(m, a)| {
                    Complex64::new((f * 8 + m * 2 + a) as f64 / 7.0, -1.0 / (m as f64 + 3.0))
                })
            })
            .collect();
        RecordedDataset::new(radar, "unit", frames).unwrap()
    }

    #[test]
    fn text_round_trip_is_lossless() {
        let ds = small();
        assert_eq!(parse_dataset(&ds.to_text()).unwrap(), ds);
    }

    #[test]
    fn truncation_is_a_format_error() {
        let text = small().to_text();
        let lines: Vec<&str> = text.lines().collect();
        for cut in [5, 12, lines.len() - 1] {
            let partial = lines[..cut].join("\n");
            assert!(matches!(parse_dataset(&partial), Err(Error::Format(_))), "cut at {cut}");
        }
    }

    #[test]
    fn wrong_column_count_is_a_dimension_mismatch() {
        let text = small().to_text().replacen("0,", "0,1.0,", 1);
        // The first data row is the first line starting with "0,".
        assert!(matches!(parse_dataset(&text), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn constructor_rejects_bad_frames() {
        let radar = RadarConfig { num_freqs: 4, num_ranges: 4, sweep_samples: 4, ..RadarConfig::default() };
        let err = RecordedDataset::new(radar, "", vec![Array2::zeros((3, 2))]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
    }
}
