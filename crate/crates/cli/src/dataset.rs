//! CSV datasets.
//!
//! * sector CSV: `j_1,…,j_n,target` with every cell an index in `0..k`.
//! * complex CSV: `re_1,im_1,…,re_n,im_n,target`; each pair must have unit
//!   modulus within 1e-6 and is rescaled onto the unit circle.
//!
//! Networks with several outputs put one target column per output at the
//! end of the row.

use std::path::Path;
use std::str::FromStr;

use mvqn_core::mvqn::{Dataset, Sample};
use mvqn_core::network::{NetDataset, NetSample};
use mvqn_core::{ComplexAmplitude, Sector};
use num_complex::Complex64;

use crate::error::{CliError, Result};

pub const COMPLEX_MODULUS_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DatasetFormat {
    /// Sector indices.
    Sector,
    /// Real/imaginary pairs.
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub format: DatasetFormat,
    pub k: u32,
    /// Number of trailing target columns.
    pub outputs: usize,
    pub header: bool,
}

impl CsvOptions {
    pub fn new(format: DatasetFormat, k: u32) -> Self {
        CsvOptions {
            format,
            k,
            outputs: 1,
            header: false,
        }
    }
}

/// Parsed rows before they become a [`Dataset`] or [`NetDataset`].
#[derive(Debug, Clone, PartialEq)]
pub struct Rows {
    pub inputs: Vec<Vec<ComplexAmplitude>>,
    pub targets: Vec<Vec<Sector>>,
}

fn cell<T: FromStr>(text: &str, line: usize) -> Result<T> {
    text.trim().parse().map_err(|_| CliError::Parse {
        line,
        message: format!("cannot parse {:?}", text.trim()),
    })
}

fn sector_cell(text: &str, k: u32, line: usize) -> Result<Sector> {
    let j: i64 = cell(text, line)?;
    if j < 0 || j >= k as i64 {
        return Err(CliError::Range {
            line,
            message: format!("sector {j} outside 0..{k}"),
        });
    }
    Sector::new(k as i64, j).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn parse_rows(text: &str, opts: &CsvOptions) -> Result<Rows> {
    if opts.k < 2 {
        return Err(CliError::Usage(format!(
            "k = {} must be at least 2",
            opts.k
        )));
    }
    if opts.outputs == 0 {
        return Err(CliError::Usage(
            "at least one target column is needed".into(),
        ));
    }
    let mut rows = Rows {
        inputs: Vec::new(),
        targets: Vec::new(),
    };
    let mut width = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if (opts.header && idx == 0) || raw.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = raw.split(',').collect();
        if *width.get_or_insert(cells.len()) != cells.len() {
            return Err(CliError::Parse {
                line,
                message: format!(
                    "expected {} columns, found {}",
                    width.unwrap_or(0),
                    cells.len()
                ),
            });
        }
        if cells.len() <= opts.outputs {
            return Err(CliError::Parse {
                line,
                message: "row has no input columns".into(),
            });
        }
        let (input_cells, target_cells) = cells.split_at(cells.len() - opts.outputs);
        let inputs = match opts.format {
            DatasetFormat::Sector => input_cells
                .iter()
                .map(|c| sector_cell(c, opts.k, line).map(|s| s.value()))
                .collect::<Result<Vec<_>>>()?,
            DatasetFormat::Complex => {
                if input_cells.len() % 2 != 0 {
                    return Err(CliError::Parse {
                        line,
                        message: "complex inputs need re,im pairs".into(),
                    });
                }
                input_cells
                    .chunks(2)
                    .map(|pair| {
                        let z = Complex64::new(cell(pair[0], line)?, cell(pair[1], line)?);
                        let m = z.norm();
                        if !m.is_finite() || (m - 1.0).abs() > COMPLEX_MODULUS_TOL {
                            return Err(CliError::Range {
                                line,
                                message: format!("input modulus {m} is not 1"),
                            });
                        }
                        Ok(z / m)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        let targets = target_cells
            .iter()
            .map(|c| sector_cell(c, opts.k, line))
            .collect::<Result<Vec<_>>>()?;
        rows.inputs.push(inputs);
        rows.targets.push(targets);
    }
    if rows.inputs.is_empty() {
        return Err(CliError::Shape("dataset is empty".into()));
    }
    Ok(rows)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn parse_dataset(text: &str, opts: &CsvOptions) -> Result<Dataset> {
    let rows = parse_rows(
        text,
        &CsvOptions {
            outputs: 1,
            ..*opts
        },
    )?;
    let samples = rows
        .inputs
        .into_iter()
        .zip(rows.targets)
        .map(|(x, t)| Sample::new(x, t[0]))
        .collect::<mvqn_core::Result<Vec<_>>>()?;
    Ok(Dataset::new(samples)?)
}

pub fn parse_net_dataset(text: &str, opts: &CsvOptions) -> Result<NetDataset> {
    let rows = parse_rows(text, opts)?;
    let samples = rows
        .inputs
        .into_iter()
        .zip(rows.targets)
        .map(|(x, t)| NetSample::new(x, t))
        .collect::<mvqn_core::Result<Vec<_>>>()?;
    Ok(NetDataset::new(samples)?)
}

pub fn load_dataset(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    parse_dataset(&read(path)?, opts)
}

pub fn load_net_dataset(path: &Path, opts: &CsvOptions) -> Result<NetDataset> {
    parse_net_dataset(&read(path)?, opts)
}
