//! On-disk formats: binary field snapshots, radial-spectrum CSV, and small
//! helpers shared by the experiment exports.
//!
//! Snapshot layout: 16-byte header (magic `TSPD`, u32 dimension, u32 N,
//! u32 reserved, all little endian) followed by `N^d` little-endian f64
//! values in row-major signed order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, SpdeError};
use crate::grid::{GridSpec, RealField};
use crate::spectrum::{RadialBin, RadialSpectrum};

const MAGIC: &[u8; 4] = b"TSPD";

pub fn write_field_snapshot(path: &Path, field: &RealField) -> Result<()> {
    let file = File::create(path).map_err(|e| SpdeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| SpdeError::io(path, e);
    w.write_all(MAGIC).map_err(io_err)?;
    w.write_all(&(field.grid().dim() as u32).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&(field.grid().points_per_axis() as u32).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&0u32.to_le_bytes()).map_err(io_err)?;
    for v in field.values() {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_field_snapshot(path: &Path) -> Result<RealField> {
    let file = File::open(path).map_err(|e| SpdeError::io(path, e))?;
    let mut r = BufReader::new(file);
    let io_err = |e| SpdeError::io(path, e);
    let mut header = [0u8; 16];
    r.read_exact(&mut header).map_err(io_err)?;
    if &header[0..4] != MAGIC {
        return Err(SpdeError::Config(format!(
            "{}: not a field snapshot (bad magic)",
            path.display()
        )));
    }
    let d = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let grid = GridSpec::new(d, n)?;
    let mut values = Vec::with_capacity(grid.num_points());
    let mut buf = [0u8; 8];
    for _ in 0..grid.num_points() {
        r.read_exact(&mut buf).map_err(io_err)?;
        values.push(f64::from_le_bytes(buf));
    }
    RealField::new(grid, values)
}

/// Format a float so that parsing the text recovers the exact bits
/// (Rust's shortest round-trip representation).
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| fmt_f64(x)).unwrap_or_default()
}

pub fn write_radial_spectrum_csv(path: &Path, spectrum: &RadialSpectrum) -> Result<()> {
    let file = File::create(path).map_err(|e| SpdeError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| SpdeError::io(path, e);
    writeln!(w, "kappa,energy,cardinality,stderr").map_err(io_err)?;
    for b in spectrum.bins() {
        writeln!(
            w,
            "{},{},{},{}",
            b.kappa,
            fmt_f64(b.energy),
            b.cardinality,
            fmt_opt(b.stderr)
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_radial_spectrum_csv(path: &Path, grid: GridSpec) -> Result<RadialSpectrum> {
    let text = std::fs::read_to_string(path).map_err(|e| SpdeError::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("kappa,energy,cardinality,stderr") => {}
        other => {
            return Err(SpdeError::Config(format!(
                "{}: unexpected spectrum header {other:?}",
                path.display()
            )))
        }
    }
    let mut bins = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(SpdeError::Config(format!(
                "{}:{}: expected 4 columns",
                path.display(),
                lineno + 2
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| {
                SpdeError::Config(format!("{}: bad number {s:?}", path.display()))
            })
        };
        bins.push(RadialBin {
            kappa: fields[0].parse().map_err(|_| {
                SpdeError::Config(format!("{}: bad kappa {:?}", path.display(), fields[0]))
            })?,
            energy: parse(fields[1])?,
            cardinality: fields[2].parse().map_err(|_| {
                SpdeError::Config(format!(
                    "{}: bad cardinality {:?}",
                    path.display(),
                    fields[2]
                ))
            })?,
            stderr: if fields[3].is_empty() {
                None
            } else {
                Some(parse(fields[3])?)
            },
        });
    }
    Ok(RadialSpectrum::new(grid, bins))
}

/// Hex SHA-256 digest of a file, recorded in run manifests.
pub fn sha256_file(path: &Path) -> Result<String> {
    use sha2::{Digest, Sha256};
    let mut file = File::open(path).map_err(|e| SpdeError::io(path, e))?;
    let mut hasher = Sha256::new();
    std::io::copy(&mut file, &mut hasher).map_err(|e| SpdeError::io(path, e))?;
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft::forward_dft;
    use crate::spectrum::radial_energy_density;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn snapshot_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.tspd");
        let g = GridSpec::new(2, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = RealField::from_fn(g, |_, _| rng.random_range(-5.0..5.0));
        write_field_snapshot(&path, &f).unwrap();
        let back = read_field_snapshot(&path).unwrap();
        assert_eq!(back.grid(), g);
        for (a, b) in f.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // header is exactly 16 bytes + payload
        let len = std::fs::metadata(&path).unwrap().len();
        assert_eq!(len, 16 + 8 * g.num_points() as u64);
    }

    #[test]
    fn snapshot_rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.tspd");
        std::fs::write(&path, b"NOPE0000000000000000").unwrap();
        assert!(read_field_snapshot(&path).is_err());
    }

    #[test]
    fn spectrum_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spectrum.csv");
        let g = GridSpec::new(2, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let f = RealField::from_fn(g, |_, _| rng.random_range(-1.0..1.0));
        let spec = radial_energy_density(&forward_dft(&f)).unwrap();
        write_radial_spectrum_csv(&path, &spec).unwrap();
        let back = read_radial_spectrum_csv(&path, g).unwrap();
        assert_eq!(back.bins().len(), spec.bins().len());
        for (a, b) in spec.bins().iter().zip(back.bins()) {
            assert_eq!(a.kappa, b.kappa);
            assert_eq!(a.cardinality, b.cardinality);
            assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        }
    }

    #[test]
    fn missing_file_error_carries_path() {
        let err = read_field_snapshot(Path::new("/no/such/file.tspd")).unwrap_err();
        assert!(err.to_string().contains("file.tspd"));
    }
}
