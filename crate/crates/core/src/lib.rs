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

//! Wheel Bell-Kochen-Specker sets, weak values, and a simulated
//! neutron-interferometric weak measurement.
//!
//! The crate is organized as a pipeline:
//!
//! * [`qalg`]: phase-tracked Pauli strings, product spin states, and a small
//!   dense-matrix fallback used as a cross-check oracle.
//! * [`wheel`]: construction and verification of the N-spin Wheel sets,
//!   plus exhaustive and GF(2) proofs that no noncontextual value
//!   assignment exists.
//! * [`weakval`]: ABL probabilities, product weak values, forbidden-projector
//!   weak values, and the contextuality witness built from them.
//! * [`interfsim`]: a stochastic interferometer model with sine fitting and
//!   the inversion that recovers a spin weak value from fringe data.
//! * [`analysis`]: measured-data tables, uncertainty propagation, and the
//!   one-shot report generator (CSV, JSON, SVG).
//! * [`cli`]: the `wheelbks` command-line interface.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod interfsim;
pub mod qalg;
pub mod weakval;
pub mod wheel;

pub use error::{AnalysisError, QalgError, SimError, WeakValueError, WheelError};
