// Copyright 2026 the wheelbks developers
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QalgError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("dense representation capped at N = {cap}, got N = {n}")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("spin state not normalized (|a|^2 + |b|^2 = {norm2})")]
    NotNormalized { norm2: f64 },
    #[error("product state must contain at least one spin")]
    EmptyProductState,
    #[error("invalid Pauli character '{0}' (expected I, X, Y or Z)")]
    BadPauliChar(char),
}

#[derive(Debug, Error)]
pub enum WheelError {
    #[error("wheel size must be an odd integer >= 3, got {0}")]
    BadSize(usize),
    #[error("exhaustive search capped at N = {cap} (2^(3N) assignments), got N = {n}; use the GF(2) prover")]
    ExhaustiveCapExceeded { n: usize, cap: usize },
    #[error("malformed wheel set: {0}")]
    MalformedSet(String),
    #[error("wheel set json: {0}")]
    Json(String),
    #[error(transparent)]
    Algebra(#[from] QalgError),
}

#[derive(Debug, Error)]
pub enum WeakValueError {
    #[error("postselection overlap magnitude {overlap} below threshold {threshold}; weak values diverge")]
    SingularOverlap { overlap: f64, threshold: f64 },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("projector weak values must sum to 1 (completeness), got {sum_re}+{sum_im}i")]
    IncompleteBasis { sum_re: f64, sum_im: f64 },
    #[error("basis index j = {j} out of range for N = {n} (0..2^(N-1))")]
    IndexOutOfRange { n: usize, j: u64 },
    #[error("N must be an odd integer >= 1, got {0}")]
    BadSpinCount(usize),
    #[error(transparent)]
    Algebra(#[from] QalgError),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("rotation angle must be in (0, 90] degrees, got {0}")]
    BadAlpha(f64),
    #[error("mean counts must be positive, got {0}")]
    BadMeanCounts(f64),
    #[error("chi grid must be nonempty for fringe modes")]
    EmptyChiGrid,
    #[error("sine fit needs at least {need} chi points spanning one period, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("chi grid spans {span} rad, need a full period (2 pi)")]
    BadChiSpan { span: f64 },
    #[error("sine fit did not converge within {iterations} iterations; residual trace: {trace:?}")]
    FitDidNotConverge { iterations: usize, trace: Vec<f64> },
    #[error("extraction is singular: {0}")]
    SingularExtraction(String),
    #[error(transparent)]
    Algebra(#[from] QalgError),
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("data table must contain exactly {expect} rows, found {found}")]
    WrongRowCount { expect: usize, found: usize },
    #[error("bad data row {line}: {reason}")]
    BadRow { line: usize, reason: String },
    #[error("all sigmas must be positive (row {row})")]
    NonPositiveSigma { row: usize },
    #[error("monte carlo needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    WeakValue(#[from] WeakValueError),
}
