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

//! ABL probabilities, product weak values, forbidden-projector weak values,
//! and the contextuality witness built from them.
//!
//! Everything here is phrased for product pre/postselections |psi> = (x) psi_n,
//! <phi| = (x) <phi_n|, for which N-spin weak values factorize into single-spin
//! ones. With the standard boundary |+X>^N -> <+Y|^N each single-spin weak
//! value is Z_w = i exactly, every pairwise (ZZ)_w = -1, and the forbidden
//! projectors of the ZZ ring context acquire the anomalous weak values
//! +/- 2^-(N-1)/2 that any noncontextual assignment forbids.

use num_complex::Complex64;

use crate::error::WeakValueError;
use crate::qalg::{product_inner, DenseOperator, PauliOp, PauliString, ProductState, SpinState};

/// Weak values are plain complex numbers, kept as `Complex64` so arithmetic
/// composes.
pub type WeakValue = Complex64;

/// Postselection overlaps below this magnitude are rejected; weak values
/// diverge at orthogonality.
pub const OVERLAP_THRESHOLD: f64 = 1e-12;

/// Completeness tolerance for projector bases feeding the ABL rule.
pub const COMPLETENESS_TOL: f64 = 1e-9;

/// The boundary used throughout: preselect |+X> on every spin, postselect
/// <+Y| on every spin.
pub fn standard_boundary(n: usize) -> (ProductState, ProductState) {
    let pre = ProductState::uniform(SpinState::plus_x(), n).expect("n >= 1");
    let post = ProductState::uniform(SpinState::plus_y(), n).expect("n >= 1");
    (pre, post)
}

/// Weak value of a Pauli string between product states:
/// phase * prod_n <phi_n|P_n|psi_n> / prod_n <phi_n|psi_n>.
pub fn weak_value_pauli(
    pre: &ProductState,
    post: &ProductState,
    s: &PauliString,
) -> Result<WeakValue, WeakValueError> {
    if pre.len() != post.len() || pre.len() != s.len() {
        return Err(WeakValueError::LengthMismatch {
            left: post.len(),
            right: s.len().max(pre.len()),
        });
    }
    let den = product_inner(post, pre)?;
    if den.norm() < OVERLAP_THRESHOLD {
        return Err(WeakValueError::SingularOverlap {
            overlap: den.norm(),
            threshold: OVERLAP_THRESHOLD,
        });
    }
    let mut num = s.phase.as_complex();
    for (n, &op) in s.ops.iter().enumerate() {
        num *= post.spin(n).matrix_element(op, pre.spin(n));
    }
    Ok(num / den)
}

/// Weak value of an arbitrary dense operator between product states. Used as
/// the cross-check oracle for the factorized formulas.
pub fn dense_weak_value(
    pre: &ProductState,
    post: &ProductState,
    op: &DenseOperator,
) -> Result<WeakValue, WeakValueError> {
    let den = product_inner(post, pre)?;
    if den.norm() < OVERLAP_THRESHOLD {
        return Err(WeakValueError::SingularOverlap {
            overlap: den.norm(),
            threshold: OVERLAP_THRESHOLD,
        });
    }
    let phi = post.dense_vector().map_err(WeakValueError::Algebra)?;
    let psi = pre.dense_vector().map_err(WeakValueError::Algebra)?;
    Ok(op.sandwich(&phi, &psi) / den)
}

/// ABL probabilities for a strong intermediate measurement of a complete
/// projector basis, computed from the projector weak values:
/// P(j) = |(Pi_j)_w|^2 / sum_k |(Pi_k)_w|^2.
///
/// The supplied weak values must all come from the same pre/postselection;
/// completeness (sum = 1) is what certifies that.
pub fn abl_probability(basis_wv: &[WeakValue]) -> Result<Vec<f64>, WeakValueError> {
    let sum: Complex64 = basis_wv.iter().sum();
    if (sum - 1.0).norm() > COMPLETENESS_TOL {
        return Err(WeakValueError::IncompleteBasis {
            sum_re: sum.re,
            sum_im: sum.im,
        });
    }
    let norms: Vec<f64> = basis_wv.iter().map(|w| w.norm_sqr()).collect();
    let total: f64 = norms.iter().sum();
    Ok(norms.into_iter().map(|n| n / total).collect())
}

/// Index j of a forbidden-projector pair {x, xbar}: the N-digit binary
/// sequence x^(N)_j with leading digit fixed to 0, so j runs over
/// 0 .. 2^(N-1) - 1. Bit n (big-endian) addresses spin n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisIndex {
    n: usize,
    j: u64,
    bits: Vec<u8>,
}

impl BasisIndex {
    pub fn new(n: usize, j: u64) -> Result<BasisIndex, WeakValueError> {
        if n == 0 || n.is_multiple_of(2) {
            return Err(WeakValueError::BadSpinCount(n));
        }
        if n > 63 || j >= 1u64 << (n - 1) {
            return Err(WeakValueError::IndexOutOfRange { n, j });
        }
        let bits = (0..n).map(|k| ((j >> (n - 1 - k)) & 1) as u8).collect();
        Ok(BasisIndex { n, j, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> u64 {
        self.j
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn popcount(&self) -> u32 {
        self.j.count_ones()
    }
}

/// Factorized weak value of the forbidden projector Pi^(N)_j given the N
/// single-spin weak values z_n:
///
///   (Pi_j)_w = prod_n (1 + (-1)^{x_n} z_n)/2  +  prod_n (1 - (-1)^{x_n} z_n)/2.
pub fn forbidden_projector_wv(
    idx: &BasisIndex,
    zw: &[WeakValue],
) -> Result<WeakValue, WeakValueError> {
    if zw.len() != idx.n() {
        return Err(WeakValueError::LengthMismatch {
            left: idx.n(),
            right: zw.len(),
        });
    }
    let mut aligned = Complex64::new(1.0, 0.0);
    let mut flipped = Complex64::new(1.0, 0.0);
    for (&bit, &z) in idx.bits().iter().zip(zw) {
        let signed = if bit == 0 { z } else { -z };
        aligned *= (1.0 + signed) * 0.5;
        flipped *= (1.0 - signed) * 0.5;
    }
    Ok(aligned + flipped)
}

/// Dense-matrix build of the same projector, as a Kronecker sum of
/// (I +/- Z)/2 factors. Capped by the dense dimension limit.
pub fn forbidden_projector_dense(idx: &BasisIndex) -> Result<DenseOperator, WeakValueError> {
    if idx.n() > crate::qalg::DENSE_CAP {
        return Err(WeakValueError::Algebra(
            crate::error::QalgError::DenseCapExceeded {
                n: idx.n(),
                cap: crate::qalg::DENSE_CAP,
            },
        ));
    }
    let plus = projector_factor(1.0);
    let minus = projector_factor(-1.0);
    let mut aligned = DenseOperator::identity(1);
    let mut flipped = DenseOperator::identity(1);
    for &bit in idx.bits() {
        let (a, f) = if bit == 0 {
            (&plus, &minus)
        } else {
            (&minus, &plus)
        };
        aligned = aligned.kron(a);
        flipped = flipped.kron(f);
    }
    Ok(aligned.add(&flipped))
}

fn projector_factor(sign: f64) -> DenseOperator {
    let z = PauliOp::Z.matrix();
    let mut m = DenseOperator::zeros(2);
    for (r, zrow) in z.iter().enumerate() {
        for (c, &v) in zrow.iter().enumerate() {
            let eye = if r == c { 1.0 } else { 0.0 };
            m.set(r, c, (Complex64::new(eye, 0.0) + sign * v) * 0.5);
        }
    }
    m
}

/// Sign of Re (Pi^(N)_j)_w at the ideal point z_n = i for every n.
///
/// There the projector evaluates to 2^-(N-1)/2 * (cos(pi m / 4) + i sin(..))
/// terms with m = N - 2 popcount(x_j), so the sign is that of cos(pi m / 4):
/// +1 when m mod 8 is 1 or 7, -1 when it is 3 or 5 (m is odd since N is odd).
pub fn sign_pattern(n: usize, j: u64) -> Result<i8, WeakValueError> {
    let idx = BasisIndex::new(n, j)?;
    let m = n as i64 - 2 * i64::from(idx.popcount());
    Ok(match m.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => unreachable!("m is odd for odd n"),
    })
}

/// Contextuality witness from precomputed projector weak values:
/// C = 1 - sum_j s_j (Pi_j)_w.
pub fn witness_from_projectors(
    n: usize,
    proj: &[WeakValue],
) -> Result<WeakValue, WeakValueError> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(WeakValueError::BadSpinCount(n));
    }
    let count = 1usize << (n - 1);
    if proj.len() != count {
        return Err(WeakValueError::LengthMismatch {
            left: count,
            right: proj.len(),
        });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &p) in proj.iter().enumerate() {
        let s = f64::from(sign_pattern(n, j as u64)?);
        acc += s * p;
    }
    Ok(1.0 - acc)
}

/// All 2^(N-1) forbidden-projector weak values for the given single-spin
/// weak values.
pub fn all_projector_wv(n: usize, zw: &[WeakValue]) -> Result<Vec<WeakValue>, WeakValueError> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(WeakValueError::BadSpinCount(n));
    }
    if zw.len() != n {
        return Err(WeakValueError::LengthMismatch {
            left: n,
            right: zw.len(),
        });
    }
    (0..1u64 << (n - 1))
        .map(|j| forbidden_projector_wv(&BasisIndex::new(n, j)?, zw))
        .collect()
}

/// The unbiased contextuality witness C^(N) = 1 - sum_j s_j (Pi^(N)_j)_w,
/// summed directly over all 2^(N-1) indices.
///
/// Any noncontextual assignment values every forbidden projector 0, so
/// classically Re C >= 0 whenever each Re (Pi_j)_w stays in [0, 1]; the
/// ideal boundary drives it to 1 - 2^(N-1)/2 < 0.
pub fn witness_c(n: usize, zw: &[WeakValue]) -> Result<WeakValue, WeakValueError> {
    let proj = all_projector_wv(n, zw)?;
    witness_from_projectors(n, &proj)
}

/// Complex product of two single-spin weak values: the pairwise (ZZ)_w for
/// a product pre/postselection.
pub fn pairwise_zz_wv(a: WeakValue, b: WeakValue) -> WeakValue {
    a * b
}

/// Anomaly flags for a weak value: a negative real part is what the witness
/// uses, a real part above 1 is equally impossible classically for a
/// projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnomalyFlags {
    pub below_zero: bool,
    pub above_one: bool,
}

pub fn anomaly_flags(v: WeakValue) -> AnomalyFlags {
    AnomalyFlags {
        below_zero: v.re < 0.0,
        above_one: v.re > 1.0,
    }
}

/// One pair entry of a pigeonhole table.
#[derive(Debug, Clone, Copy)]
pub struct PairEntry {
    pub pair: (usize, usize),
    pub value: WeakValue,
    pub anticorrelated: bool,
}

#[derive(Debug, Clone)]
pub struct PigeonholeReport {
    pub pairs: Vec<PairEntry>,
    pub anticorrelated_count: usize,
}

impl PigeonholeReport {
    pub fn all_anticorrelated(&self) -> bool {
        self.anticorrelated_count == self.pairs.len()
    }
}

/// Pairwise (ZZ)_w for the requested index pairs of a single-spin weak-value
/// list, with anticorrelation (Re < 0) flags. No two of N > 2 spins can
/// share a Z eigenvalue when every pair anticorrelates.
pub fn pigeonhole_report(
    zw: &[WeakValue],
    pairing: &[(usize, usize)],
) -> Result<PigeonholeReport, WeakValueError> {
    let mut pairs = Vec::with_capacity(pairing.len());
    for &(a, b) in pairing {
        if a >= zw.len() || b >= zw.len() {
            return Err(WeakValueError::LengthMismatch {
                left: a.max(b),
                right: zw.len(),
            });
        }
        let value = pairwise_zz_wv(zw[a], zw[b]);
        pairs.push(PairEntry {
            pair: (a, b),
            value,
            anticorrelated: value.re < 0.0,
        });
    }
    let anticorrelated_count = pairs.iter().filter(|p| p.anticorrelated).count();
    Ok(PigeonholeReport {
        pairs,
        anticorrelated_count,
    })
}

/// A weak value with propagated uncertainties and its distance below the
/// noncontextual bound Re >= 0, in units of sigma_re.
#[derive(Debug, Clone, Copy)]
pub struct WitnessResult {
    pub value: WeakValue,
    pub sigma_re: f64,
    pub sigma_im: f64,
    pub violation_sigmas: f64,
}

impl WitnessResult {
    pub fn new(value: WeakValue, sigma_re: f64, sigma_im: f64) -> WitnessResult {
        assert!(sigma_re >= 0.0 && sigma_im >= 0.0);
        let violation_sigmas = if value.re < 0.0 {
            -value.re / sigma_re
        } else {
            0.0
        };
        WitnessResult {
            value,
            sigma_re,
            sigma_im,
            violation_sigmas,
        }
    }
}

/// Given a target single-spin weak value z, a postselection state phi with
/// <phi|Z|+X> / <phi|+X> = z. Lets tests dial in arbitrary weak values with
/// honest states behind them.
pub fn post_state_for_z(z: Complex64) -> SpinState {
    let up = (1.0 + z).conj();
    let down = (1.0 - z).conj();
    SpinState::normalized(up, down).expect("1+z and 1-z cannot both vanish")
}
