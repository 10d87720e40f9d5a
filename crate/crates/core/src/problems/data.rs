//! Synthetic data generation and CSV dataset loading.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::element::Element;

/// Synthetic regression data `y = X' phi_true + noise`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyLinearData<T: Element> {
    /// `d x n`, one sample per column.
    pub predictors: Array2<T>,
    pub responses: Array1<T>,
    /// `d x 1`.
    pub true_parameters: Array2<T>,
}

/// Draws `phi_true ~ U(-1, 1)^d`, `X ~ U(-1, 1)^{d x n}` and
/// `y = X' phi_true + noise_scale * N(0, 1)`.
///
/// Draw order is the parameters, then `X` sample by sample, then the noise,
/// all from one ChaCha8 stream seeded with `seed`.
///
/// # Panics
/// If `d` or `n` is zero or `noise_scale` is negative.
pub fn generate_noisy_linear<T: Element>(
    d: usize,
    n: usize,
    noise_scale: f64,
    seed: u64,
) -> NoisyLinearData<T> {
    assert!(d >= 1 && n >= 1, "d and n must be at least 1");
    assert!(noise_scale >= 0.0, "noise_scale must be non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut predictors = Array2::<f64>::zeros((d, n));
    for i in 0..n {
        for j in 0..d {
            predictors[[j, i]] = rng.random_range(-1.0..1.0);
        }
    }
    let responses = Array1::from_shape_fn(n, |i| {
        let signal: f64 = (0..d).map(|j| predictors[[j, i]] * phi[j]).sum();
        let noise: f64 = rng.sample(StandardNormal);
        signal + noise_scale * noise
    });
    NoisyLinearData {
        predictors: predictors.mapv(T::of),
        responses: responses.mapv(T::of),
        true_parameters: Array2::from_shape_fn((d, 1), |(j, _)| T::of(phi[j])),
    }
}

/// Binary-label variant of [`generate_noisy_linear`]: `y_i = 1` where the
/// noisy linear response is positive, else `0`.
pub fn generate_noisy_binary<T: Element>(
    d: usize,
    n: usize,
    noise_scale: f64,
    seed: u64,
) -> NoisyLinearData<T> {
    let mut data = generate_noisy_linear::<T>(d, n, noise_scale, seed);
    data.responses
        .mapv_inplace(|r| if r > T::zero() { T::one() } else { T::zero() });
    data
}

/// A dataset read from CSV, in the `d x n` predictor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T: Element> {
    pub predictors: Array2<T>,
    pub responses: Array1<T>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}, column {column}: `{value}` is not a number")]
    NotNumeric {
        line: u64,
        column: usize,
        value: String,
    },
    #[error("line {line}: expected {expected} fields, found {found}")]
    Ragged {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("dataset rows need at least one predictor and a label, found {0} column(s)")]
    TooFewColumns(usize),
    #[error("dataset has no samples")]
    Empty,
}

/// Parses one numeric CSV field.
pub fn parse_number(field: &str) -> Option<f64> {
    field.trim().parse::<f64>().ok()
}

/// Reads a CSV file with one sample per row and the label in the last column.
pub fn load_csv<T: Element>(path: impl AsRef<Path>) -> Result<Dataset<T>, DatasetError> {
    parse_csv(File::open(path)?)
}

/// Parses CSV text; a first line that is not entirely numeric is skipped as
/// a header. Every later line must be numeric.
pub fn parse_csv<T: Element, R: Read>(reader: R) -> Result<Dataset<T>, DatasetError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(None)
        .from_reader(reader);
    let mut values: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    for (index, record) in rdr.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, usize> = record
            .iter()
            .enumerate()
            .map(|(c, field)| parse_number(field).ok_or(c))
            .collect();
        let parsed = match parsed {
            Ok(v) => v,
            Err(_) if index == 0 => continue,
            Err(column) => {
                return Err(DatasetError::NotNumeric {
                    line,
                    column: column + 1,
                    value: record[column].to_string(),
                })
            }
        };
        match width {
            None => {
                if parsed.len() < 2 {
                    return Err(DatasetError::TooFewColumns(parsed.len()));
                }
                width = Some(parsed.len());
            }
            Some(w) if w != parsed.len() => {
                return Err(DatasetError::Ragged {
                    line,
                    expected: w,
                    found: parsed.len(),
                })
            }
            Some(_) => {}
        }
        values.extend(parsed);
        rows += 1;
    }
    let width = width.ok_or(DatasetError::Empty)?;
    let d = width - 1;
    let predictors = Array2::from_shape_fn((d, rows), |(j, i)| T::of(values[i * width + j]));
    let responses = Array1::from_shape_fn(rows, |i| T::of(values[i * width + d]));
    Ok(Dataset {
        predictors,
        responses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn generator_is_seeded() {
        let a = generate_noisy_linear::<f64>(3, 20, 1.0, 7);
        let b = generate_noisy_linear::<f64>(3, 20, 1.0, 7);
        let c = generate_noisy_linear::<f64>(3, 20, 1.0, 8);
        assert_eq!(a, b);
        assert_ne!(a.predictors, c.predictors);
    }

    #[test]
    fn table_one_smallest_shape() {
        let data = generate_noisy_linear::<f64>(100, 1000, 10.0, 0);
        assert_eq!(data.predictors.dim(), (100, 1000));
        assert_eq!(data.responses.len(), 1000);
        assert_eq!(data.true_parameters.dim(), (100, 1));
        assert!(data.predictors.iter().all(|v| (-1.0..1.0).contains(v)));
    }

    #[test]
    fn noiseless_responses_are_linear() {
        let data = generate_noisy_linear::<f64>(2, 5, 0.0, 3);
        let fitted = data.predictors.t().dot(&data.true_parameters);
        for i in 0..5 {
            assert!((fitted[[i, 0]] - data.responses[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn binary_labels() {
        let data = generate_noisy_binary::<f32>(4, 50, 1.0, 1);
        assert!(data.responses.iter().all(|&y| y == 0.0 || y == 1.0));
    }

    #[test]
    fn csv_with_header() {
        let text = "a,b,label\n1,2,0\n3,4,1\n";
        let ds = parse_csv::<f64, _>(text.as_bytes()).unwrap();
        assert_eq!(ds.predictors, array![[1.0, 3.0], [2.0, 4.0]]);
        assert_eq!(ds.responses, array![0.0, 1.0]);
    }

    #[test]
    fn csv_without_header() {
        let text = "0.5, -1e-3, 7\n";
        let ds = parse_csv::<f64, _>(text.as_bytes()).unwrap();
        assert_eq!(ds.predictors, array![[0.5], [-1e-3]]);
        assert_eq!(ds.responses, array![7.0]);
    }

    #[test]
    fn csv_errors() {
        assert!(matches!(
            parse_csv::<f64, _>("1,2\nx,3\n".as_bytes()),
            Err(DatasetError::NotNumeric {
                line: 2,
                column: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_csv::<f64, _>("1,2\n1,2,3\n".as_bytes()),
            Err(DatasetError::Ragged { line: 2, .. })
        ));
        assert!(matches!(
            parse_csv::<f64, _>("h1,h2\n".as_bytes()),
            Err(DatasetError::Empty)
        ));
        assert!(matches!(
            parse_csv::<f64, _>("1\n2\n".as_bytes()),
            Err(DatasetError::TooFewColumns(1))
        ));
    }
}
