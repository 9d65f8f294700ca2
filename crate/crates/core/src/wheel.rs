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

//! N-spin Wheel sets: construction, product verification, and proofs that no
//! noncontextual value assignment exists.
//!
//! A Wheel on N spins (N odd, >= 3) couples neighboring pairs k = (k, k+1 mod N)
//! with the three pairwise observables ZZ, XX, YY. The 3N observables organize
//! into N+3 measurement contexts: three rings (all ZZ, all XX, all YY) whose
//! operator product is +I, and N spokes {ZZ_k, XX_k, YY_k} whose product is -I.
//! Every observable sits in exactly one ring and one spoke, so squaring all
//! product predictions forces the impossible identity (+1)^3 * (-1)^N = +1 for
//! odd N. The GF(2) prover below turns that parity argument into an explicit
//! elimination certificate; the exhaustive prover checks it by brute force for
//! small N.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::WheelError;
use crate::qalg::{pauli_mul, PauliOp, PauliString};

/// Largest N accepted by the exhaustive prover (2^(3N) assignments).
pub const EXHAUSTIVE_CAP: usize = 5;

/// The Wheel set on N spins: three rings of N pair observables and N spokes
/// of three.
///
/// Rings are indexed ZZ, XX, YY; pair k couples spins k and (k+1) mod N, with
/// spins labeled 0..N-1. Structural invariants (shape, pairwise commutation
/// inside each context, each observable body in exactly one ring and one
/// spoke) are enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WheelSet {
    n: usize,
    rings: Vec<Vec<PauliString>>,
    spokes: Vec<Vec<PauliString>>,
}

/// Ring or spoke tag for a context index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextKind {
    Ring,
    Spoke,
}

const RING_NAMES: [&str; 3] = ["ZZ", "XX", "YY"];

impl WheelSet {
    /// Validating constructor for externally supplied sets (JSON input,
    /// sign-perturbed variants). Checks shape, string lengths, Hermitian
    /// phases, commutation within contexts, and the one-ring-one-spoke
    /// incidence of every observable body.
    pub fn from_parts(
        n: usize,
        rings: Vec<Vec<PauliString>>,
        spokes: Vec<Vec<PauliString>>,
    ) -> Result<WheelSet, WheelError> {
        if n < 3 || n.is_multiple_of(2) {
            return Err(WheelError::BadSize(n));
        }
        if rings.len() != 3 {
            return Err(WheelError::MalformedSet(format!(
                "expected 3 rings, got {}",
                rings.len()
            )));
        }
        if spokes.len() != n {
            return Err(WheelError::MalformedSet(format!(
                "expected {} spokes, got {}",
                n,
                spokes.len()
            )));
        }
        if rings.iter().any(|r| r.len() != n) {
            return Err(WheelError::MalformedSet(format!(
                "every ring must hold {} observables",
                n
            )));
        }
        if spokes.iter().any(|s| s.len() != 3) {
            return Err(WheelError::MalformedSet(
                "every spoke must hold 3 observables".into(),
            ));
        }
        let set = WheelSet { n, rings, spokes };
        for (i, obs) in set.iter_observables() {
            if obs.len() != n {
                return Err(WheelError::MalformedSet(format!(
                    "observable {} in {} has length {}, expected {}",
                    obs,
                    set.context_label(i),
                    obs.len(),
                    n
                )));
            }
            if obs.phase.as_sign().is_none() {
                return Err(WheelError::MalformedSet(format!(
                    "observable {} is not Hermitian (imaginary phase)",
                    obs
                )));
            }
        }
        for i in 0..set.context_count() {
            let ctx = set.context_observables(i);
            for a in 0..ctx.len() {
                for b in a + 1..ctx.len() {
                    if !ctx[a].commutes_with(&ctx[b]) {
                        return Err(WheelError::MalformedSet(format!(
                            "{} and {} do not commute inside {}",
                            ctx[a],
                            ctx[b],
                            set.context_label(i)
                        )));
                    }
                }
            }
        }
        // Ignoring phases, each body must show up exactly once among the rings
        // and exactly once among the spokes.
        let mut ring_count: HashMap<Vec<PauliOp>, usize> = HashMap::new();
        let mut spoke_count: HashMap<Vec<PauliOp>, usize> = HashMap::new();
        for ring in &set.rings {
            for obs in ring {
                *ring_count.entry(obs.ops.clone()).or_insert(0) += 1;
            }
        }
        for spoke in &set.spokes {
            for obs in spoke {
                *spoke_count.entry(obs.ops.clone()).or_insert(0) += 1;
            }
        }
        if ring_count.len() != 3 * n
            || spoke_count.len() != 3 * n
            || ring_count.keys().any(|k| !spoke_count.contains_key(k))
        {
            return Err(WheelError::MalformedSet(
                "each observable must appear in exactly one ring and one spoke".into(),
            ));
        }
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rings(&self) -> &[Vec<PauliString>] {
        &self.rings
    }

    pub fn spokes(&self) -> &[Vec<PauliString>] {
        &self.spokes
    }

    pub fn observable_count(&self) -> usize {
        3 * self.n
    }

    /// Contexts are indexed 0..N+3: the ZZ, XX, YY rings first, then spoke k
    /// at index 3+k.
    pub fn context_count(&self) -> usize {
        3 + self.spokes.len()
    }

    pub fn context_kind(&self, i: usize) -> ContextKind {
        if i < 3 {
            ContextKind::Ring
        } else {
            ContextKind::Spoke
        }
    }

    /// Quantum product prediction for context `i` in the canonical Wheel:
    /// +1 for rings, -1 for spokes.
    pub fn expected_sign(&self, i: usize) -> i8 {
        match self.context_kind(i) {
            ContextKind::Ring => 1,
            ContextKind::Spoke => -1,
        }
    }

    pub fn context_observables(&self, i: usize) -> &[PauliString] {
        if i < 3 {
            &self.rings[i]
        } else {
            &self.spokes[i - 3]
        }
    }

    pub fn context_label(&self, i: usize) -> String {
        if i < 3 {
            format!("ring {}", RING_NAMES[i])
        } else {
            format!("spoke {}", i - 3)
        }
    }

    fn iter_observables(&self) -> impl Iterator<Item = (usize, &PauliString)> {
        (0..self.context_count())
            .flat_map(move |i| self.context_observables(i).iter().map(move |o| (i, o)))
    }

    pub fn to_json(&self) -> String {
        let repr = WheelSetRepr {
            n: self.n,
            rings: self
                .rings
                .iter()
                .map(|r| r.iter().map(|o| o.to_string()).collect())
                .collect(),
            spokes: self
                .spokes
                .iter()
                .map(|s| s.iter().map(|o| o.to_string()).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&repr).expect("wheel repr serializes")
    }

    pub fn from_json(text: &str) -> Result<WheelSet, WheelError> {
        let repr: WheelSetRepr =
            serde_json::from_str(text).map_err(|e| WheelError::Json(e.to_string()))?;
        let parse = |groups: Vec<Vec<String>>| -> Result<Vec<Vec<PauliString>>, WheelError> {
            groups
                .into_iter()
                .map(|g| {
                    g.into_iter()
                        .map(|s| PauliString::from_str(&s).map_err(WheelError::Algebra))
                        .collect()
                })
                .collect()
        };
        WheelSet::from_parts(repr.n, parse(repr.rings)?, parse(repr.spokes)?)
    }
}

#[derive(Serialize, Deserialize)]
struct WheelSetRepr {
    n: usize,
    rings: Vec<Vec<String>>,
    spokes: Vec<Vec<String>>,
}

/// Build the canonical Wheel on `n` spins.
pub fn build_wheel(n: usize) -> Result<WheelSet, WheelError> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(WheelError::BadSize(n));
    }
    let pair = |op: PauliOp, k: usize| PauliString::two_site(n, k, op, (k + 1) % n, op);
    let ring = |op: PauliOp| (0..n).map(|k| pair(op, k)).collect::<Vec<_>>();
    let rings = vec![ring(PauliOp::Z), ring(PauliOp::X), ring(PauliOp::Y)];
    let spokes = (0..n)
        .map(|k| {
            vec![
                pair(PauliOp::Z, k),
                pair(PauliOp::X, k),
                pair(PauliOp::Y, k),
            ]
        })
        .collect();
    WheelSet::from_parts(n, rings, spokes)
}

/// Symbolic product of one context with its pass/fail judgement.
#[derive(Debug, Clone)]
pub struct ContextProduct {
    pub context: usize,
    pub label: String,
    pub product: PauliString,
    pub expected_sign: i8,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub contexts: Vec<ContextProduct>,
    pub all_ok: bool,
}

/// Multiply out every context and compare against the ring/spoke predictions
/// (+I and -I). Failures are reported, not thrown.
pub fn verify_context_products(w: &WheelSet) -> Result<VerifyReport, WheelError> {
    let mut contexts = Vec::with_capacity(w.context_count());
    for i in 0..w.context_count() {
        let obs = w.context_observables(i);
        let mut product = PauliString::identity(w.n());
        for o in obs {
            product = pauli_mul(&product, o)?;
        }
        let ok = product.is_identity_body()
            && product.phase.as_sign() == Some(w.expected_sign(i));
        contexts.push(ContextProduct {
            context: i,
            label: w.context_label(i),
            product,
            expected_sign: w.expected_sign(i),
            ok,
        });
    }
    let all_ok = contexts.iter().all(|c| c.ok);
    Ok(VerifyReport { contexts, all_ok })
}

/// A complete noncontextual value assignment: one eigenvalue prediction, +1 or
/// -1, per observable body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NchvAssignment {
    pub values: Vec<i8>,
}

impl NchvAssignment {
    pub fn new(values: Vec<i8>) -> NchvAssignment {
        assert!(values.iter().all(|&v| v == 1 || v == -1));
        NchvAssignment { values }
    }
}

/// The product constraints of a Wheel as linear equations over GF(2).
///
/// One column per observable body, one row per context. An eigenvalue -1 maps
/// to bit 1, so "product of eigenvalues equals s" becomes "sum of bits mod 2
/// equals [s = -1]". Observable sign prefixes fold into the right-hand side,
/// which is computed from the symbolic context product.
#[derive(Debug, Clone)]
pub struct Gf2System {
    rows: Vec<Vec<bool>>,
    rhs: Vec<bool>,
    column_labels: Vec<String>,
    context_labels: Vec<String>,
}

/// Result of solving a [`Gf2System`].
#[derive(Debug, Clone)]
pub enum Gf2Outcome {
    /// No assignment exists; the listed contexts XOR to the row 0 = 1.
    Inconsistent { certificate: Vec<usize> },
    /// A satisfying assignment exists (one is returned, free values fixed
    /// to +1).
    Satisfiable { assignment: NchvAssignment },
}

impl Gf2System {
    pub fn from_wheel(w: &WheelSet) -> Result<Gf2System, WheelError> {
        let mut column_of: HashMap<Vec<PauliOp>, usize> = HashMap::new();
        let mut column_labels = Vec::new();
        for (_, obs) in w.iter_observables() {
            if !column_of.contains_key(&obs.ops) {
                let body = PauliString::new(crate::qalg::Phase::PLUS_ONE, obs.ops.clone());
                column_of.insert(obs.ops.clone(), column_labels.len());
                column_labels.push(body.to_string());
            }
        }
        let cols = column_labels.len();
        let mut rows = Vec::with_capacity(w.context_count());
        let mut rhs = Vec::with_capacity(w.context_count());
        let mut context_labels = Vec::with_capacity(w.context_count());
        for i in 0..w.context_count() {
            let obs = w.context_observables(i);
            let mut product = PauliString::identity(w.n());
            let mut row = vec![false; cols];
            for o in obs {
                product = pauli_mul(&product, o)?;
                row[column_of[&o.ops]] ^= true;
            }
            if !product.is_identity_body() {
                return Err(WheelError::MalformedSet(format!(
                    "{} does not multiply to a signed identity",
                    w.context_label(i)
                )));
            }
            let sign = product.phase.as_sign().ok_or_else(|| {
                WheelError::MalformedSet(format!(
                    "{} multiplies to an anti-Hermitian phase",
                    w.context_label(i)
                ))
            })?;
            rows.push(row);
            rhs.push(sign == -1);
            context_labels.push(w.context_label(i));
        }
        Ok(Gf2System {
            rows,
            rhs,
            column_labels,
            context_labels,
        })
    }

    pub fn num_contexts(&self) -> usize {
        self.rows.len()
    }

    pub fn num_observables(&self) -> usize {
        self.column_labels.len()
    }

    pub fn rhs(&self) -> &[bool] {
        &self.rhs
    }

    pub fn column_labels(&self) -> &[String] {
        &self.column_labels
    }

    pub fn context_labels(&self) -> &[String] {
        &self.context_labels
    }

    /// Flip the product prediction of one context (used to probe how tight
    /// the inconsistency is).
    pub fn flip_rhs(&mut self, context: usize) {
        self.rhs[context] = !self.rhs[context];
    }

    /// Per-context satisfaction of an assignment.
    pub fn check(&self, assignment: &NchvAssignment) -> Vec<bool> {
        assert_eq!(assignment.values.len(), self.num_observables());
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, &want)| {
                let parity = row
                    .iter()
                    .zip(&assignment.values)
                    .filter(|(&on, &v)| on && v == -1)
                    .count()
                    % 2
                    == 1;
                parity == want
            })
            .collect()
    }

    /// Gaussian elimination over GF(2) with row provenance.
    ///
    /// Each working row drags along the set of original contexts XORed into
    /// it, so an inconsistent row 0 = 1 identifies exactly which product
    /// predictions contradict. For the Wheel that certificate is all N+3
    /// contexts.
    pub fn solve(&self) -> Gf2Outcome {
        let rows_n = self.rows.len();
        let cols = self.num_observables();
        let mut m = self.rows.clone();
        let mut b = self.rhs.clone();
        // provenance[r][k] records whether original row k is folded into
        // working row r
        let mut provenance: Vec<Vec<bool>> = (0..rows_n)
            .map(|r| (0..rows_n).map(|k| k == r).collect())
            .collect();
        let mut pivot_row = 0usize;
        let mut pivot_cols = Vec::new();
        for col in 0..cols {
            let Some(src) = (pivot_row..rows_n).find(|&r| m[r][col]) else {
                continue;
            };
            m.swap(pivot_row, src);
            b.swap(pivot_row, src);
            provenance.swap(pivot_row, src);
            for r in 0..rows_n {
                if r != pivot_row && m[r][col] {
                    let (pr, tr) = if r < pivot_row {
                        let (lo, hi) = m.split_at_mut(pivot_row);
                        (&hi[0], &mut lo[r])
                    } else {
                        let (lo, hi) = m.split_at_mut(r);
                        (&lo[pivot_row], &mut hi[0])
                    };
                    for c in 0..cols {
                        tr[c] ^= pr[c];
                    }
                    b[r] ^= b[pivot_row];
                    let src_prov = provenance[pivot_row].clone();
                    for (dst, s) in provenance[r].iter_mut().zip(&src_prov) {
                        *dst ^= s;
                    }
                }
            }
            pivot_cols.push((pivot_row, col));
            pivot_row += 1;
            if pivot_row == rows_n {
                break;
            }
        }
        for r in 0..rows_n {
            if b[r] && m[r].iter().all(|&x| !x) {
                let certificate = (0..rows_n).filter(|&k| provenance[r][k]).collect();
                return Gf2Outcome::Inconsistent { certificate };
            }
        }
        // Consistent: particular solution with free variables set to bit 0
        // (+1 eigenvalue).
        let mut bits = vec![false; cols];
        for &(r, c) in pivot_cols.iter().rev() {
            let mut acc = b[r];
            for k in c + 1..cols {
                if m[r][k] && bits[k] {
                    acc = !acc;
                }
            }
            bits[c] = acc;
        }
        let values = bits.iter().map(|&bit| if bit { -1 } else { 1 }).collect();
        Gf2Outcome::Satisfiable {
            assignment: NchvAssignment::new(values),
        }
    }
}

impl fmt::Display for Gf2Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gf2Outcome::Inconsistent { certificate } => {
                write!(f, "INCONSISTENT (certificate: {} contexts)", certificate.len())
            }
            Gf2Outcome::Satisfiable { .. } => write!(f, "SATISFIABLE"),
        }
    }
}

/// Prove (or refute) the existence of a noncontextual assignment by GF(2)
/// elimination. Inconsistency comes with a context certificate; a consistent
/// system signals a malformed or perturbed input set and returns a solution.
pub fn prove_no_nchv_gf2(w: &WheelSet) -> Result<Gf2Outcome, WheelError> {
    Ok(Gf2System::from_wheel(w)?.solve())
}

/// Outcome of the brute-force scan over all 2^(3N) assignments.
#[derive(Debug, Clone, Copy)]
pub struct ExhaustiveReport {
    pub assignments_checked: u64,
    pub satisfying: u64,
    pub max_contexts_satisfied: usize,
    pub context_count: usize,
}

/// Scan every assignment of a small system, counting those that satisfy all
/// contexts and the best number of contexts satisfiable at once.
pub fn exhaustive_scan(sys: &Gf2System) -> Result<ExhaustiveReport, WheelError> {
    let cols = sys.num_observables();
    if cols > 3 * EXHAUSTIVE_CAP {
        return Err(WheelError::ExhaustiveCapExceeded {
            n: cols / 3,
            cap: EXHAUSTIVE_CAP,
        });
    }
    let masks: Vec<u64> = sys
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .fold(0u64, |acc, (i, &on)| acc | ((on as u64) << i))
        })
        .collect();
    let total = 1u64 << cols;
    let mut satisfying = 0u64;
    let mut best = 0usize;
    for assignment in 0..total {
        let mut hits = 0usize;
        for (mask, &want) in masks.iter().zip(&sys.rhs) {
            let parity = (assignment & mask).count_ones() % 2 == 1;
            if parity == want {
                hits += 1;
            }
        }
        if hits == masks.len() {
            satisfying += 1;
        }
        if hits > best {
            best = hits;
        }
    }
    Ok(ExhaustiveReport {
        assignments_checked: total,
        satisfying,
        max_contexts_satisfied: best,
        context_count: masks.len(),
    })
}

/// Brute-force prover for N <= [`EXHAUSTIVE_CAP`].
pub fn prove_no_nchv_exhaustive(w: &WheelSet) -> Result<ExhaustiveReport, WheelError> {
    if w.n() > EXHAUSTIVE_CAP {
        return Err(WheelError::ExhaustiveCapExceeded {
            n: w.n(),
            cap: EXHAUSTIVE_CAP,
        });
    }
    exhaustive_scan(&Gf2System::from_wheel(w)?)
}

/// The value assignment forced by pre/postselection on |+X>^N / <+Y|^N, and
/// the contexts it breaks.
#[derive(Debug, Clone)]
pub struct BoundaryReport {
    pub assignment: NchvAssignment,
    pub observable_labels: Vec<String>,
    pub satisfied_contexts: Vec<usize>,
    pub violated_contexts: Vec<usize>,
    pub context_labels: Vec<String>,
}

/// Fix every XX and YY observable to +1 (the boundary states are the joint
/// +1 eigenstates up front and behind) and every ZZ observable to -1 (the
/// ABL rule assigns the -1 outcome with certainty; the weakval module
/// computes (ZZ)_w = -1). For odd N the ZZ ring then multiplies to -1
/// against its +I prediction: the contradiction survives, confined to that
/// single ring.
pub fn apply_boundary_conditions(w: &WheelSet) -> Result<BoundaryReport, WheelError> {
    let sys = Gf2System::from_wheel(w)?;
    let values: Vec<i8> = sys
        .column_labels()
        .iter()
        .map(|label| if label.contains('Z') { -1 } else { 1 })
        .collect();
    let assignment = NchvAssignment::new(values);
    let per_context = sys.check(&assignment);
    let satisfied = per_context
        .iter()
        .enumerate()
        .filter_map(|(i, &ok)| ok.then_some(i))
        .collect();
    let violated = per_context
        .iter()
        .enumerate()
        .filter_map(|(i, &ok)| (!ok).then_some(i))
        .collect();
    Ok(BoundaryReport {
        assignment,
        observable_labels: sys.column_labels().to_vec(),
        satisfied_contexts: satisfied,
        violated_contexts: violated,
        context_labels: sys.context_labels().to_vec(),
    })
}
