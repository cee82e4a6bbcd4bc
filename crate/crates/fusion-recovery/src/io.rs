//! File formats: structured text (JSON) containers for frames, matrices,
//! coefficient blocks and solve reports. Writers emit floats with 17
//! significant digits so values round-trip exactly.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{FusionFrame, SubspaceBasis};
use crate::measurement::MeasurementMatrix;
use crate::signal::{BlockCoefficients, SupportSet};
use crate::solver::{SolveReport, SolveStatus};

/// JSON formatter that writes every float with 17 significant digits.
struct SigDigits;

impl serde_json::ser::Formatter for SigDigits {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no non-finite numbers.
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serialize any value to the crate's JSON convention.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits utf-8"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = to_json_string(value)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Serialize, Deserialize)]
struct SubspaceFile {
    dim: usize,
    /// Row-major `ambient_dim x dim` entries.
    basis: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FrameFile {
    ambient_dim: usize,
    subspaces: Vec<SubspaceFile>,
    weights: Vec<f64>,
}

pub fn write_frame(path: &Path, frame: &FusionFrame) -> Result<()> {
    let file = FrameFile {
        ambient_dim: frame.ambient_dim(),
        subspaces: frame
            .subspaces()
            .iter()
            .map(|s| SubspaceFile {
                dim: s.dim(),
                basis: row_major(s.basis()),
            })
            .collect(),
        weights: frame.weights().to_vec(),
    };
    write_json(path, &file)
}

pub fn read_frame(path: &Path) -> Result<FusionFrame> {
    let file: FrameFile = read_json(path)?;
    let mut subspaces = Vec::with_capacity(file.subspaces.len());
    for (j, s) in file.subspaces.iter().enumerate() {
        if s.basis.len() != file.ambient_dim * s.dim {
            return Err(Error::Shape(format!(
                "subspace {j}: basis has {} entries, expected {}",
                s.basis.len(),
                file.ambient_dim * s.dim
            )));
        }
        let basis = DMatrix::from_row_slice(file.ambient_dim, s.dim, &s.basis);
        subspaces.push(SubspaceBasis::new(basis)?);
    }
    FusionFrame::with_weights(subspaces, file.weights)
}

#[derive(Serialize, Deserialize)]
struct DenseMatrixFile {
    rows: usize,
    cols: usize,
    /// Row-major entries.
    entries: Vec<f64>,
}

fn dense_from_file(file: &DenseMatrixFile) -> Result<DMatrix<f64>> {
    if file.entries.len() != file.rows * file.cols {
        return Err(Error::Shape(format!(
            "matrix file has {} entries for a {}x{} shape",
            file.entries.len(),
            file.rows,
            file.cols
        )));
    }
    Ok(DMatrix::from_row_slice(file.rows, file.cols, &file.entries))
}

/// Write a plain dense matrix (used for measurements `Y` and raw data).
pub fn write_dense_matrix(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let file = DenseMatrixFile {
        rows: matrix.nrows(),
        cols: matrix.ncols(),
        entries: row_major(matrix),
    };
    write_json(path, &file)
}

pub fn read_dense_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let file: DenseMatrixFile = read_json(path)?;
    dense_from_file(&file)
}

pub fn write_matrix(path: &Path, matrix: &MeasurementMatrix) -> Result<()> {
    write_dense_matrix(path, matrix.entries())
}

/// Load a measurement matrix. With `renormalize` set, columns with non-unit
/// norm are rescaled and the flag on the result records that this happened;
/// otherwise such a file is rejected.
pub fn read_matrix(path: &Path, renormalize: bool) -> Result<MeasurementMatrix> {
    let entries = read_dense_matrix(path)?;
    if renormalize {
        MeasurementMatrix::new_renormalized(entries)
    } else {
        MeasurementMatrix::new(entries)
    }
}

#[derive(Serialize, Deserialize)]
struct CoefficientsFile {
    blocks: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Vec<usize>>,
}

pub fn write_coefficients(path: &Path, c: &BlockCoefficients) -> Result<()> {
    let support = c.support();
    let file = CoefficientsFile {
        blocks: c.blocks().iter().map(|b| b.as_slice().to_vec()).collect(),
        support: if support.is_empty() {
            None
        } else {
            Some(support.indices().to_vec())
        },
    };
    write_json(path, &file)
}

pub fn read_coefficients(path: &Path) -> Result<BlockCoefficients> {
    let file: CoefficientsFile = read_json(path)?;
    let blocks = file
        .blocks
        .into_iter()
        .map(nalgebra::DVector::from_vec)
        .collect();
    let c = BlockCoefficients::new(blocks);
    if let Some(indices) = file.support {
        let declared = SupportSet::new(indices)?;
        declared.validate(c.num_blocks())?;
    }
    Ok(c)
}

#[derive(Serialize, Deserialize)]
struct SolveReportFile {
    status: String,
    iterations: usize,
    final_feasibility_residual: f64,
    final_objective: f64,
    support: Vec<usize>,
}

/// Write the scalar part of a solve report; coefficients go to their own file.
pub fn write_solve_report(path: &Path, report: &SolveReport) -> Result<()> {
    let file = SolveReportFile {
        status: report.status.to_string(),
        iterations: report.iterations,
        final_feasibility_residual: report.final_feasibility_residual,
        final_objective: report.final_objective,
        support: report.coefficients.support().indices().to_vec(),
    };
    write_json(path, &file)
}

pub fn status_exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => 0,
        SolveStatus::MaxIters => 2,
        SolveStatus::Infeasible => 3,
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}
