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

//! Exact small-dimension complex linear algebra and symbolic phase-tracked
//! Pauli-string algebra.
//!
//! Pauli strings carry their phase as an integer power of `i`, so context
//! products over rings and spokes come out with exact signs instead of
//! accumulated floating-point phases. A dense `2^N x 2^N` representation is
//! provided as an oracle for small `N`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QalgError;

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Largest `N` for which the dense `2^N x 2^N` oracle may be constructed.
pub const DENSE_CAP: usize = 12;

const NORM_TOL: f64 = 1e-12;

/// Fourth root of unity stored as the exponent of `i`, so products of Pauli
/// strings keep exact signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    /// Phase from an exponent of `i` (taken mod 4).
    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn as_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// `+1` or `-1` for real phases; `None` for `+-i`.
    pub fn as_sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{s}")
    }
}

/// Single-spin Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn as_char(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<PauliOp> {
        match c {
            'I' => Some(PauliOp::I),
            'X' => Some(PauliOp::X),
            'Y' => Some(PauliOp::Y),
            'Z' => Some(PauliOp::Z),
            _ => None,
        }
    }

    /// Single-spin product `self * other` as (phase, op).
    ///
    /// XY = iZ, YZ = iX, ZX = iY, and reversals pick up -i.
    fn mul(self, other: PauliOp) -> (Phase, PauliOp) {
        use PauliOp::*;
        match (self, other) {
            (I, b) => (Phase::PLUS_ONE, b),
            (a, I) => (Phase::PLUS_ONE, a),
            (a, b) if a == b => (Phase::PLUS_ONE, I),
            (X, Y) => (Phase::PLUS_I, Z),
            (Y, X) => (Phase::MINUS_I, Z),
            (Y, Z) => (Phase::PLUS_I, X),
            (Z, Y) => (Phase::MINUS_I, X),
            (Z, X) => (Phase::PLUS_I, Y),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }

    /// 2x2 matrix in the Z basis, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliOp::I => [[l, o], [o, l]],
            PauliOp::X => [[o, l], [l, o]],
            PauliOp::Y => [[o, -i], [i, o]],
            PauliOp::Z => [[l, o], [o, -l]],
        }
    }
}

/// Phase-tracked tensor product of single-spin Pauli operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub phase: Phase,
    pub ops: Vec<PauliOp>,
}

impl PauliString {
    pub fn new(phase: Phase, ops: Vec<PauliOp>) -> PauliString {
        PauliString { phase, ops }
    }

    /// Identity string of length `n`.
    pub fn identity(n: usize) -> PauliString {
        PauliString::new(Phase::PLUS_ONE, vec![PauliOp::I; n])
    }

    /// String acting as `a` on spin `i` and `b` on spin `j`, identity elsewhere.
    pub fn two_site(n: usize, i: usize, a: PauliOp, j: usize, b: PauliOp) -> PauliString {
        assert!(i < n && j < n && i != j);
        let mut ops = vec![PauliOp::I; n];
        ops[i] = a;
        ops[j] = b;
        PauliString::new(Phase::PLUS_ONE, ops)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// True when the operator part is all identities.
    pub fn is_identity_body(&self) -> bool {
        self.ops.iter().all(|&p| p == PauliOp::I)
    }

    /// Two strings commute iff they anticommute on an even number of slots.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.len(), other.len());
        let anti = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(&a, &b)| a != PauliOp::I && b != PauliOp::I && a != b)
            .count();
        anti % 2 == 0
    }
}

impl fmt::Display for PauliString {
    /// Phase-prefixed letter string, e.g. `+ZZIII` or `-iXYZ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        for op in &self.ops {
            write!(f, "{}", op.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QalgError;

    fn from_str(s: &str) -> Result<PauliString, QalgError> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (Phase::PLUS_I, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::PLUS_ONE, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else {
            (Phase::PLUS_ONE, s)
        };
        let ops = rest
            .chars()
            .map(|c| PauliOp::from_char(c).ok_or(QalgError::BadPauliChar(c)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliString::new(phase, ops))
    }
}

/// Exact operator product of two Pauli strings with accumulated phase.
pub fn pauli_mul(a: &PauliString, b: &PauliString) -> Result<PauliString, QalgError> {
    if a.len() != b.len() {
        return Err(QalgError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let mut phase = a.phase * b.phase;
    let mut ops = Vec::with_capacity(a.len());
    for (&pa, &pb) in a.ops.iter().zip(&b.ops) {
        let (ph, op) = pa.mul(pb);
        phase = phase * ph;
        ops.push(op);
    }
    Ok(PauliString::new(phase, ops))
}

/// Normalized single-spin state in the Z basis.
///
/// `|+X> = (|0> + |1>)/sqrt(2)`, `|+Y> = (|0> + i|1>)/sqrt(2)`; with this
/// convention the boundary weak value `Z_w` comes out exactly `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    amps: [Amplitude; 2],
}

impl SpinState {
    pub fn new(up: Amplitude, down: Amplitude) -> Result<SpinState, QalgError> {
        let norm2 = up.norm_sqr() + down.norm_sqr();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOL {
            return Err(QalgError::NotNormalized { norm2 });
        }
        Ok(SpinState { amps: [up, down] })
    }

    /// Normalizes the given components; errors only on a zero vector.
    pub fn normalized(up: Amplitude, down: Amplitude) -> Result<SpinState, QalgError> {
        let norm = (up.norm_sqr() + down.norm_sqr()).sqrt();
        if !norm.is_finite() || norm < NORM_TOL {
            return Err(QalgError::NotNormalized { norm2: norm * norm });
        }
        Ok(SpinState {
            amps: [up / norm, down / norm],
        })
    }

    pub fn plus_z() -> SpinState {
        SpinState {
            amps: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        }
    }

    pub fn minus_z() -> SpinState {
        SpinState {
            amps: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    pub fn plus_x() -> SpinState {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        SpinState { amps: [h, h] }
    }

    pub fn minus_x() -> SpinState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SpinState {
            amps: [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        }
    }

    pub fn plus_y() -> SpinState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SpinState {
            amps: [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
        }
    }

    pub fn minus_y() -> SpinState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        SpinState {
            amps: [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        }
    }

    pub fn up(&self) -> Amplitude {
        self.amps[0]
    }

    pub fn down(&self) -> Amplitude {
        self.amps[1]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SpinState) -> Amplitude {
        self.amps[0].conj() * other.amps[0] + self.amps[1].conj() * other.amps[1]
    }

    /// `<self| P |other>` for a single-spin Pauli operator.
    pub fn matrix_element(&self, op: PauliOp, other: &SpinState) -> Amplitude {
        let m = op.matrix();
        let t0 = m[0][0] * other.amps[0] + m[0][1] * other.amps[1];
        let t1 = m[1][0] * other.amps[0] + m[1][1] * other.amps[1];
        self.amps[0].conj() * t0 + self.amps[1].conj() * t1
    }

    /// A state orthogonal to this one (up to global phase).
    pub fn orthogonal(&self) -> SpinState {
        SpinState {
            amps: [-self.amps[1].conj(), self.amps[0].conj()],
        }
    }

    /// Applies a rotation about z by `angle` radians: `exp(-i angle Z / 2)`.
    pub fn rotated_z(&self, angle: f64) -> SpinState {
        let half = angle / 2.0;
        let e_minus = Complex64::from_polar(1.0, -half);
        let e_plus = Complex64::from_polar(1.0, half);
        SpinState {
            amps: [self.amps[0] * e_minus, self.amps[1] * e_plus],
        }
    }
}

/// Separable N-spin state as a list of normalized single-spin states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    spins: Vec<SpinState>,
}

impl ProductState {
    pub fn new(spins: Vec<SpinState>) -> Result<ProductState, QalgError> {
        if spins.is_empty() {
            return Err(QalgError::EmptyProductState);
        }
        Ok(ProductState { spins })
    }

    /// `|s>^(x)n`: the same single-spin state on every slot.
    pub fn uniform(s: SpinState, n: usize) -> Result<ProductState, QalgError> {
        ProductState::new(vec![s; n])
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[SpinState] {
        &self.spins
    }

    pub fn spin(&self, n: usize) -> &SpinState {
        &self.spins[n]
    }

    /// Full `2^N` coefficient vector (Kronecker expansion), slot 0 most
    /// significant.
    pub fn dense_vector(&self) -> Result<Vec<Amplitude>, QalgError> {
        if self.len() > DENSE_CAP {
            return Err(QalgError::DenseCapExceeded {
                n: self.len(),
                cap: DENSE_CAP,
            });
        }
        let mut v = vec![Complex64::new(1.0, 0.0)];
        for s in &self.spins {
            let mut next = Vec::with_capacity(v.len() * 2);
            for a in &v {
                next.push(a * s.up());
                next.push(a * s.down());
            }
            v = next;
        }
        Ok(v)
    }
}

/// Factorized `<phi|psi>` for product states.
pub fn product_inner(phi: &ProductState, psi: &ProductState) -> Result<Amplitude, QalgError> {
    if phi.len() != psi.len() {
        return Err(QalgError::LengthMismatch {
            left: phi.len(),
            right: psi.len(),
        });
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (f, s) in phi.spins.iter().zip(&psi.spins) {
        acc *= f.inner(s);
    }
    Ok(acc)
}

/// Dense `2^N x 2^N` complex matrix, row-major. Oracle representation for
/// small-N equivalence tests.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<Amplitude>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> DenseOperator {
        DenseOperator {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> DenseOperator {
        let mut m = DenseOperator::zeros(dim);
        for k in 0..dim {
            m.data[k * dim + k] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Amplitude {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: Amplitude) {
        self.data[row * self.dim + col] = v;
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = DenseOperator::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (o, v) in out.data.iter_mut().zip(&other.data) {
            *o += v;
        }
        out
    }

    pub fn scale(&self, c: Amplitude) -> DenseOperator {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            *v *= c;
        }
        out
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        let n = self.dim * other.dim;
        let mut out = DenseOperator::zeros(n);
        for i1 in 0..self.dim {
            for j1 in 0..self.dim {
                let a = self.data[i1 * self.dim + j1];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for i2 in 0..other.dim {
                    for j2 in 0..other.dim {
                        let row = i1 * other.dim + i2;
                        let col = j1 * other.dim + j2;
                        out.data[row * n + col] = a * other.data[i2 * other.dim + j2];
                    }
                }
            }
        }
        out
    }

    /// `<phi| M |psi>` over dense coefficient vectors.
    pub fn sandwich(&self, phi: &[Amplitude], psi: &[Amplitude]) -> Amplitude {
        assert_eq!(phi.len(), self.dim);
        assert_eq!(psi.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (row, f) in phi.iter().enumerate() {
            let mut t = Complex64::new(0.0, 0.0);
            for (col, s) in psi.iter().enumerate() {
                t += self.data[row * self.dim + col] * s;
            }
            acc += f.conj() * t;
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Kronecker expansion of a Pauli string, phase included.
pub fn to_dense(s: &PauliString, n: usize) -> Result<DenseOperator, QalgError> {
    if n > DENSE_CAP {
        return Err(QalgError::DenseCapExceeded { n, cap: DENSE_CAP });
    }
    if s.len() != n {
        return Err(QalgError::LengthMismatch {
            left: s.len(),
            right: n,
        });
    }
    let mut m = DenseOperator::identity(1);
    for &op in &s.ops {
        let p = op.matrix();
        let mut p2 = DenseOperator::zeros(2);
        for (r, prow) in p.iter().enumerate() {
            for (c, &v) in prow.iter().enumerate() {
                p2.set(r, c, v);
            }
        }
        m = m.kron(&p2);
    }
    Ok(m.scale(s.phase.as_complex()))
}
