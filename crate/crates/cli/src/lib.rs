//! Experiment driver for the `splitstep` command-line tool.

pub mod config;
pub mod experiments;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};

pub use config::{Experiment, ExperimentConfig, Format, ModelConfig, Output, Spacing, ZGrid};
pub use experiments::{derive_seed, run};
pub use table::{Cell, ResultTable};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] splitstep::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl AppError {
    /// 1 for configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Numerical(_) => 2,
            AppError::Config(_) | AppError::Io(_) => 1,
        }
    }
}

/// Writes `table` to the configured path, or to stdout when none is set.
pub fn write_output(table: &ResultTable, output: &Output) -> Result<(), AppError> {
    match &output.path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            write_table(table, output.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_table(table, output.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

pub fn write_table<W: Write>(table: &ResultTable, format: Format, out: W) -> Result<(), AppError> {
    match format {
        Format::Csv => table.write_csv(out),
        Format::Json => table.write_json(out),
    }
}
