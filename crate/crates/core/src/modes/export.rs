//! Text and image formats for mode profiles.
//!
//! CSV: header `x,y,re,im`, one row per cell in storage (row-major) order.
//! A multi-mode CSV prepends a `mode` column; rows of each mode are contiguous.
//! PGM: binary 8-bit greymap of `|amp|^2`, linearly scaled so the peak is 255.
//! Rows are written from the first stored row (`y` minimum) onwards.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use super::grid::Grid;
use super::mode::SampledMode;
use crate::error::{Error, Result};

pub fn write_mode_csv<W: Write>(mode: &SampledMode, mut out: W) -> Result<()> {
    let g = mode.grid();
    writeln!(out, "x,y,re,im")?;
    for iy in 0..g.ny() {
        for ix in 0..g.nx() {
            let a = mode.amplitude()[g.index(ix, iy)];
            writeln!(out, "{},{},{},{}", g.x(ix), g.y(iy), a.re, a.im)?;
        }
    }
    Ok(())
}

/// Reads one or more modes written by [`write_mode_csv`] (optionally with a
/// leading `mode` column). Coordinates must match the cell centres of `grid`.
pub fn read_modes_csv<R: BufRead>(grid: Grid, input: R) -> Result<Vec<SampledMode>> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty mode CSV".into()))??;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let with_index = match columns.as_slice() {
        ["x", "y", "re", "im"] => false,
        ["mode", "x", "y", "re", "im"] => true,
        _ => return Err(Error::Parse(format!("unexpected CSV header `{header}`"))),
    };

    let mut modes: Vec<Vec<Complex64>> = Vec::new();
    let coord_tol = 1e-9 * (grid.dx().min(grid.dy()));
    for (row, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", row + 2)))?;
        let (mode_idx, rest) = if with_index {
            if fields.len() != 5 {
                return Err(Error::Parse(format!("row {}: expected 5 fields", row + 2)));
            }
            (fields[0] as usize, &fields[1..])
        } else {
            if fields.len() != 4 {
                return Err(Error::Parse(format!("row {}: expected 4 fields", row + 2)));
            }
            (0, &fields[..])
        };
        if mode_idx > modes.len() {
            return Err(Error::Parse(format!("row {}: mode index skips ahead", row + 2)));
        }
        if mode_idx == modes.len() {
            modes.push(Vec::with_capacity(grid.len()));
        }
        let samples = &mut modes[mode_idx];
        let cell = samples.len();
        if cell >= grid.len() {
            return Err(Error::Parse(format!("row {}: too many rows for mode {mode_idx}", row + 2)));
        }
        let (ix, iy) = (cell % grid.nx(), cell / grid.nx());
        if (rest[0] - grid.x(ix)).abs() > coord_tol || (rest[1] - grid.y(iy)).abs() > coord_tol {
            return Err(Error::Parse(format!(
                "row {}: coordinate ({}, {}) does not match grid cell ({ix}, {iy})",
                row + 2,
                rest[0],
                rest[1]
            )));
        }
        samples.push(Complex64::new(rest[2], rest[3]));
    }
    modes
        .into_iter()
        .map(|s| SampledMode::from_samples(grid, s))
        .collect()
}

pub fn write_intensity_pgm<W: Write>(mode: &SampledMode, mut out: W) -> Result<()> {
    let g = mode.grid();
    let peak = mode
        .amplitude()
        .iter()
        .map(|a| a.norm_sqr())
        .fold(0.0_f64, f64::max);
    write!(out, "P5\n{} {}\n255\n", g.nx(), g.ny())?;
    let bytes: Vec<u8> = mode
        .amplitude()
        .iter()
        .map(|a| {
            if peak > 0.0 {
                (255.0 * a.norm_sqr() / peak).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect();
    out.write_all(&bytes)?;
    Ok(())
}

/// Greymap contents: width, height, and row-major sample values.
#[derive(Debug, Clone, PartialEq)]
pub struct Greymap {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub values: Vec<u16>,
}

/// Parses a plain (`P2`) or binary (`P5`) PGM image.
pub fn read_pgm(bytes: &[u8]) -> Result<Greymap> {
    let mut pos = 0;
    let token = |pos: &mut usize| -> Result<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if start == *pos {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let num = |s: String| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::Parse(format!("bad PGM header field `{s}`")))
    };

    let magic = token(&mut pos)?;
    let width = num(token(&mut pos)?)?;
    let height = num(token(&mut pos)?)?;
    let maxval = num(token(&mut pos)?)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("PGM maxval {maxval} out of range")));
    }
    let count = width * height;
    let values = match magic.as_str() {
        "P2" => {
            let mut v = Vec::with_capacity(count);
            for _ in 0..count {
                v.push(num(token(&mut pos)?)? as u16);
            }
            v
        }
        "P5" => {
            // exactly one whitespace byte separates the header from the raster
            pos += 1;
            let wide = maxval > 255;
            let need = if wide { 2 * count } else { count };
            let raster = bytes
                .get(pos..pos + need)
                .ok_or_else(|| Error::Parse("truncated PGM raster".into()))?;
            if wide {
                raster
                    .chunks_exact(2)
                    .map(|c| u16::from_be_bytes([c[0], c[1]]))
                    .collect()
            } else {
                raster.iter().map(|&b| b as u16).collect()
            }
        }
        other => return Err(Error::Parse(format!("unsupported PGM magic `{other}`"))),
    };
    if values.iter().any(|&v| v as usize > maxval) {
        return Err(Error::Parse("PGM sample exceeds maxval".into()));
    }
    Ok(Greymap {
        width,
        height,
        maxval: maxval as u16,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_mode() -> SampledMode {
        let g = Grid::new(5, 3, 2.0, 1.5).unwrap();
        SampledMode::from_fn(g, |x, y| Complex64::new(x + 0.1, y * x - 0.3)).unwrap()
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let m = sample_mode();
        let mut buf = Vec::new();
        write_mode_csv(&m, &mut buf).unwrap();
        let back = read_modes_csv(*m.grid(), buf.as_slice()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0], m);
    }

    #[test]
    fn csv_rejects_wrong_grid() {
        let m = sample_mode();
        let mut buf = Vec::new();
        write_mode_csv(&m, &mut buf).unwrap();
        let other = Grid::new(5, 3, 2.0, 1.0).unwrap();
        assert!(read_modes_csv(other, buf.as_slice()).is_err());
    }

    #[test]
    fn pgm_header_and_scaling() {
        let m = sample_mode();
        let mut buf = Vec::new();
        write_intensity_pgm(&m, &mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n5 3\n255\n"));
        let img = read_pgm(&buf).unwrap();
        assert_eq!((img.width, img.height), (5, 3));
        assert_eq!(img.values.iter().copied().max(), Some(255));
    }

    #[test]
    fn plain_pgm_with_comments() {
        let text = b"P2\n# labels\n3 2\n3\n0 1 2\n3 3 0\n";
        let img = read_pgm(text).unwrap();
        assert_eq!(img.values, vec![0, 1, 2, 3, 3, 0]);
    }
}
