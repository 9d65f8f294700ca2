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

//! Stochastic simulation of an interferometric weak measurement of neutron
//! spin, and the inversion pipeline that recovers the spin weak value Z_w
//! from fringe data.
//!
//! # Coupling model
//!
//! A beam is split equally into paths P1 and P2. Inside P1 the spin is
//! rotated by +alpha about z (exp(-i alpha Z/2)), inside P2 by -alpha; P2
//! additionally carries the phase-shifter phase e^{i chi}. Recombination
//! sends (P1 + e^{i chi} P2)/sqrt(2) to the O detector, and the spin is
//! postselected on |phi>. Writing c = cos(alpha/2), s = sin(alpha/2), and
//! W = <phi|Z|psi>/<phi|psi> for the spin boundary, the path amplitudes are
//! u = c - i s W and v = c + i s W (times <phi|psi>), so the O intensity is
//!
//! ```text
//!   I_in(chi) = k [ |u|^2 + |v|^2 + 2 Re(u* v e^{i chi}) ]
//!             = 2k [ D + (c^2 - s^2 |W|^2) cos chi - sin(alpha) Re(W) sin chi ],
//!   D = c^2 + s^2 |W|^2,    k = |<phi|psi>|^2 / 4.
//! ```
//!
//! The OUT fringe (coupling off) is 2k(1 + cos chi); blocking one path gives
//! the chi-independent rates k|u|^2 (P2 blocked) and k|v|^2 (P1 blocked),
//! whose difference reads out Im W. The two spin-conditioned pointer states
//! overlap by cos(alpha), so the infidelity (measurement strength) is
//! sin^2(alpha).
//!
//! # Inversion, exact in alpha
//!
//! Evaluating the IN fit where the OUT sine crosses its offset (fit argument
//! pi and 2 pi, i.e. chi = pi - phi_out and 2 pi - phi_out) isolates the
//! sin-chi quadrature, giving t_r = sin(alpha) Re W / D; the blocked-beam
//! asymmetry gives t_i = sin(alpha) Im W / D with the same denominator. With
//! r^2 = t_r^2 + t_i^2 the denominator solves the quadratic
//! (r^2/4c^2) D^2 - D + c^2 = 0, whose |W| < cot(alpha/2) branch is
//!
//! ```text
//!   D = (2 c^2 / r^2) (1 - sqrt(1 - r^2)),    W = t D / sin(alpha).
//! ```
//!
//! When an orthogonal-postselection background (rate lambda relative to the
//! OUT offset) has been subtracted from the fringes and blocked beams, both
//! quadratures become t = sin(alpha) W / (D - lambda) and the same solve
//! applies with c^2 replaced by c^2 - lambda in the constant term:
//! D - lambda = (2c^2/r^2)(1 - sqrt(1 - r^2 (c^2 - lambda)/c^2)). The
//! small-alpha linearization W = t / alpha is available behind a flag.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::qalg::SpinState;

/// Which detector of the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Port {
    O,
    H,
}

/// Fringe acquisition modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CouplingMode {
    /// Coupling on, both paths open.
    In,
    /// Coupling off, both paths open.
    Out,
    /// Coupling on, path P1 absorbed (measures k|v|^2).
    BlockP1,
    /// Coupling on, path P2 absorbed (measures k|u|^2).
    BlockP2,
    /// Coupling on, analyzer set to the state orthogonal to the prepared
    /// spin. With the coupling off this channel is dark; with it on it
    /// records the spin-flip leakage fringe used as a background estimate.
    OrthogonalBg,
}

impl CouplingMode {
    pub fn is_fringe(self) -> bool {
        matches!(
            self,
            CouplingMode::In | CouplingMode::Out | CouplingMode::OrthogonalBg
        )
    }
}

/// One simulated acquisition: rotation angle, phase-shifter grid, count
/// statistics, RNG seed, and mode.
#[derive(Debug, Clone)]
pub struct CouplingConfig {
    pub alpha_deg: f64,
    pub chi_grid: Vec<f64>,
    pub mean_counts: f64,
    pub background_rate: f64,
    pub seed: u64,
    pub mode: CouplingMode,
}

/// Counts per phase-shifter setting for one acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interferogram {
    pub mode: CouplingMode,
    pub alpha_deg: f64,
    pub seed: u64,
    pub chi: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Interferogram {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("interferogram serializes")
    }

    pub fn from_json(text: &str) -> Result<Interferogram, SimError> {
        let g: Interferogram = serde_json::from_str(text)
            .map_err(|e| SimError::SingularExtraction(format!("bad interferogram json: {}", e)))?;
        if g.chi.len() != g.counts.len() {
            return Err(SimError::SingularExtraction(
                "chi and counts lengths differ".into(),
            ));
        }
        Ok(g)
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// A fitted sinusoid offset + amplitude * sin(chi + phase) with its
/// Gauss-Newton covariance.
#[derive(Debug, Clone, Serialize)]
pub struct SineFit {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
    /// Covariance of (offset, amplitude, phase) from the weighted normal
    /// equations.
    pub covariance: [[f64; 3]; 3],
    pub ssr: f64,
    pub dof: usize,
    /// False when the amplitude is consistent with zero and the phase is
    /// meaningless (constant data).
    pub phase_identifiable: bool,
    pub iterations: usize,
}

impl SineFit {
    pub fn eval(&self, chi: f64) -> f64 {
        self.offset + self.amplitude * (chi + self.phase).sin()
    }

    pub fn sigma_offset(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }

    pub fn sigma_amplitude(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }

    pub fn sigma_phase(&self) -> f64 {
        self.covariance[2][2].max(0.0).sqrt()
    }
}

/// An extracted weak value with statistical uncertainties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredZ {
    pub re: f64,
    pub re_sigma: f64,
    pub im: f64,
    pub im_sigma: f64,
}

impl MeasuredZ {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Background inputs for the extraction: the orthogonal-postselection fringe
/// fit offset and the blocked-beam background counts, each with a variance.
/// When supplied, `extract_weak_value` expects its in/out fits to be fits of
/// background-subtracted fringes.
#[derive(Debug, Clone, Copy)]
pub struct BackgroundSet {
    pub fringe_offset: f64,
    pub fringe_offset_var: f64,
    pub block_p1: f64,
    pub block_p1_var: f64,
    pub block_p2: f64,
    pub block_p2_var: f64,
}

fn validate_alpha(alpha_deg: f64) -> Result<f64, SimError> {
    if !(alpha_deg > 0.0 && alpha_deg <= 90.0) {
        return Err(SimError::BadAlpha(alpha_deg));
    }
    Ok(alpha_deg.to_radians())
}

/// O- or H-port detection probability of the coupling model, per input
/// neutron.
pub fn port_intensity(
    alpha_deg: f64,
    chi: f64,
    mode: CouplingMode,
    port: Port,
    pre: &SpinState,
    post: &SpinState,
) -> Result<f64, SimError> {
    let alpha = validate_alpha(alpha_deg)?;
    let effective_post;
    let (coupling, post) = match mode {
        CouplingMode::Out => (0.0, post),
        CouplingMode::OrthogonalBg => {
            effective_post = pre.orthogonal();
            (alpha, &effective_post)
        }
        _ => (alpha, post),
    };
    let a = post.inner(&pre.rotated_z(coupling));
    let b = post.inner(&pre.rotated_z(-coupling));
    let phase = Complex64::from_polar(1.0, chi);
    let amp = match (mode, port) {
        (CouplingMode::BlockP1, Port::O) => b * phase,
        (CouplingMode::BlockP1, Port::H) => -b * phase,
        (CouplingMode::BlockP2, Port::O) => a,
        (CouplingMode::BlockP2, Port::H) => a,
        (_, Port::O) => a + b * phase,
        (_, Port::H) => a - b * phase,
    };
    Ok(amp.norm_sqr() / 4.0)
}

/// O-port detection probability (the detector used by the pipeline).
pub fn ideal_intensity(
    alpha_deg: f64,
    chi: f64,
    mode: CouplingMode,
    pre: &SpinState,
    post: &SpinState,
) -> Result<f64, SimError> {
    port_intensity(alpha_deg, chi, mode, Port::O, pre, post)
}

/// Infidelity 1 - |<p_+|p_->|^2 between the path pointer states conditioned
/// on the two spin-z outcomes; equals sin^2(alpha).
pub fn infidelity(alpha_deg: f64) -> Result<f64, SimError> {
    let alpha = validate_alpha(alpha_deg)?;
    let half = alpha / 2.0;
    // Pointer state for spin z = +/-1: (e^{-i z alpha/2} |P1> + e^{+i z alpha/2} |P2>)/sqrt(2)
    let p_plus = [
        Complex64::from_polar(1.0, -half),
        Complex64::from_polar(1.0, half),
    ];
    let p_minus = [
        Complex64::from_polar(1.0, half),
        Complex64::from_polar(1.0, -half),
    ];
    let overlap =
        (p_plus[0].conj() * p_minus[0] + p_plus[1].conj() * p_minus[1]) / 2.0;
    Ok(1.0 - overlap.norm_sqr())
}

/// Draw one interferogram from the seeded Poisson law
/// counts ~ Poisson(mean_counts * intensity + background_rate).
pub fn simulate(
    config: &CouplingConfig,
    pre: &SpinState,
    post: &SpinState,
) -> Result<Interferogram, SimError> {
    validate_alpha(config.alpha_deg)?;
    if config.mean_counts <= 0.0 {
        return Err(SimError::BadMeanCounts(config.mean_counts));
    }
    if config.background_rate < 0.0 {
        return Err(SimError::BadMeanCounts(config.background_rate));
    }
    if config.mode.is_fringe() && config.chi_grid.is_empty() {
        return Err(SimError::EmptyChiGrid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut counts = Vec::with_capacity(config.chi_grid.len());
    for &chi in &config.chi_grid {
        let rate = config.mean_counts
            * ideal_intensity(config.alpha_deg, chi, config.mode, pre, post)?
            + config.background_rate;
        let count = if rate > 0.0 {
            let poisson = Poisson::new(rate)
                .map_err(|e| SimError::SingularExtraction(format!("poisson: {}", e)))?;
            poisson.sample(&mut rng) as u64
        } else {
            0
        };
        counts.push(count);
    }
    Ok(Interferogram {
        mode: config.mode,
        alpha_deg: config.alpha_deg,
        seed: config.seed,
        chi: config.chi_grid.clone(),
        counts,
    })
}

const FIT_MAX_ITERATIONS: usize = 200;
const FIT_TOLERANCE: f64 = 1e-12;
const FIT_PHASE_STARTS: usize = 8;

/// Weighted sine fit of an interferogram with Poisson weights
/// (variance = max(count, 1)).
pub fn fit_sine(g: &Interferogram) -> Result<SineFit, SimError> {
    let y: Vec<f64> = g.counts.iter().map(|&c| c as f64).collect();
    let var: Vec<f64> = g.counts.iter().map(|&c| (c as f64).max(1.0)).collect();
    fit_sine_weighted(&g.chi, &y, &var)
}

/// Damped Gauss-Newton fit of offset + amplitude sin(chi + phase) with
/// per-point variances. Multi-start over 8 initial phases; amplitude is
/// normalized to >= 0 and phase to [0, 2 pi).
pub fn fit_sine_weighted(chi: &[f64], y: &[f64], var: &[f64]) -> Result<SineFit, SimError> {
    let m = chi.len();
    if m < 6 {
        return Err(SimError::TooFewPoints { need: 6, got: m });
    }
    assert_eq!(y.len(), m);
    assert_eq!(var.len(), m);
    let (lo, hi) = chi
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let span = hi - lo;
    // Endpoint-exclusive full-period grids span 2 pi (m-1)/m; accept those.
    let step = span / (m as f64 - 1.0);
    if span + step < 2.0 * std::f64::consts::PI - 1e-9 {
        return Err(SimError::BadChiSpan { span });
    }
    let w: Vec<f64> = var.iter().map(|&v| 1.0 / v.max(1e-300)).collect();

    let mean = y.iter().sum::<f64>() / m as f64;
    let (ymin, ymax) = y
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let amp0 = ((ymax - ymin) / 2.0).max(1e-12);

    let ssr_of = |p: &[f64; 3]| -> f64 {
        chi.iter()
            .zip(y)
            .zip(&w)
            .map(|((&x, &yi), &wi)| {
                let r = yi - (p[0] + p[1] * (x + p[2]).sin());
                wi * r * r
            })
            .sum()
    };

    let mut best: Option<([f64; 3], f64, usize, Vec<f64>)> = None;
    let mut any_converged = false;
    let mut worst_trace: Vec<f64> = Vec::new();
    for start in 0..FIT_PHASE_STARTS {
        let mut p = [
            mean,
            amp0,
            start as f64 * std::f64::consts::PI / 4.0,
        ];
        let mut ssr = ssr_of(&p);
        let mut trace = vec![ssr];
        let mut converged = false;
        let mut iterations = 0;
        while iterations < FIT_MAX_ITERATIONS {
            iterations += 1;
            // Normal equations J^T W J delta = J^T W r.
            let mut a = [[0.0f64; 3]; 3];
            let mut g = [0.0f64; 3];
            for ((&x, &yi), &wi) in chi.iter().zip(y).zip(&w) {
                let arg = x + p[2];
                let (sn, cs) = arg.sin_cos();
                let j = [1.0, sn, p[1] * cs];
                let r = yi - (p[0] + p[1] * sn);
                for u in 0..3 {
                    g[u] += wi * j[u] * r;
                    for v in 0..3 {
                        a[u][v] += wi * j[u] * j[v];
                    }
                }
            }
            // Degenerate geometry (amplitude ~ 0) makes the normal matrix
            // singular; a small ridge keeps the step defined.
            let solved = solve3(&a, &g).or_else(|| {
                let ridge = 1e-9 * (a[0][0] + a[1][1] + a[2][2]).max(1e-300);
                let mut ar = a;
                for (u, row) in ar.iter_mut().enumerate() {
                    row[u] += ridge;
                }
                solve3(&ar, &g)
            });
            let Some(delta) = solved else { break };
            // Step halving until the objective improves.
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let trial = [
                    p[0] + scale * delta[0],
                    p[1] + scale * delta[1],
                    p[2] + scale * delta[2],
                ];
                let trial_ssr = ssr_of(&trial);
                if trial_ssr <= ssr {
                    let rel = (0..3)
                        .map(|u| (scale * delta[u]).abs() / p[u].abs().max(1.0))
                        .fold(0.0, f64::max);
                    p = trial;
                    ssr = trial_ssr;
                    accepted = true;
                    if rel < FIT_TOLERANCE {
                        converged = true;
                    }
                    break;
                }
                scale *= 0.5;
            }
            trace.push(ssr);
            if !accepted {
                // No downhill step: already at a (local) optimum.
                converged = true;
            }
            if converged {
                break;
            }
        }
        if converged {
            any_converged = true;
            if best.as_ref().is_none_or(|(_, s, _, _)| ssr < *s) {
                best = Some((p, ssr, iterations, trace.clone()));
            }
        }
        if trace.len() > worst_trace.len() {
            worst_trace = trace;
        }
    }
    if !any_converged {
        let tail = worst_trace.len().saturating_sub(8);
        return Err(SimError::FitDidNotConverge {
            iterations: FIT_MAX_ITERATIONS,
            trace: worst_trace.split_off(tail),
        });
    }
    let (mut p, ssr, iterations, _) = best.expect("a start converged");

    if p[1] < 0.0 {
        p[1] = -p[1];
        p[2] += std::f64::consts::PI;
    }
    p[2] = p[2].rem_euclid(2.0 * std::f64::consts::PI);

    // Covariance from the normal equations at the solution.
    let mut a = [[0.0f64; 3]; 3];
    for (&x, &wi) in chi.iter().zip(&w) {
        let arg = x + p[2];
        let (sn, cs) = arg.sin_cos();
        let j = [1.0, sn, p[1] * cs];
        for u in 0..3 {
            for v in 0..3 {
                a[u][v] += wi * j[u] * j[v];
            }
        }
    }
    let sigma_amp_floor = invert3(&a).map(|c| c[1][1].max(0.0).sqrt());
    let phase_identifiable = match sigma_amp_floor {
        Some(sig) => p[1] > 3.0 * sig,
        None => false,
    };
    let covariance = match invert3(&a) {
        Some(c) => c,
        None => {
            // Amplitude pinned at zero: report a ridged covariance so the
            // offset uncertainty stays meaningful.
            let ridge = 1e-9 * (a[0][0] + a[1][1] + a[2][2]).max(1e-300);
            let mut ar = a;
            for (u, row) in ar.iter_mut().enumerate() {
                row[u] += ridge;
            }
            invert3(&ar).unwrap_or([[f64::INFINITY; 3]; 3])
        }
    };
    Ok(SineFit {
        offset: p[0],
        amplitude: p[1],
        phase: p[2],
        covariance,
        ssr,
        dof: m.saturating_sub(3),
        phase_identifiable,
        iterations,
    })
}

fn solve3(a: &[[f64; 3]; 3], b: &[f64; 3]) -> Option<[f64; 3]> {
    let inv = invert3(a)?;
    let mut x = [0.0; 3];
    for u in 0..3 {
        for v in 0..3 {
            x[u] += inv[u][v] * b[v];
        }
    }
    Some(x)
}

fn invert3(a: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &x| acc.max(x.abs()));
    if det.abs() <= 1e-14 * scale.powi(3).max(1e-300) {
        return None;
    }
    let c = |r1: usize, c1: usize, r2: usize, c2: usize| a[r1][c1] * a[r2][c2] - a[r1][c2] * a[r2][c1];
    let adj = [
        [c(1, 1, 2, 2), -c(0, 1, 2, 2), c(0, 1, 1, 2)],
        [-c(1, 0, 2, 2), c(0, 0, 2, 2), -c(0, 0, 1, 2)],
        [c(1, 0, 2, 1), -c(0, 0, 2, 1), c(0, 0, 1, 1)],
    ];
    let mut inv = [[0.0; 3]; 3];
    for u in 0..3 {
        for v in 0..3 {
            inv[u][v] = adj[u][v] / det;
        }
    }
    Some(inv)
}

/// Everything `extract_weak_value` needs besides the fits and counts.
#[derive(Debug, Clone, Copy)]
pub struct ExtractOptions {
    pub alpha_deg: f64,
    /// Use the small-alpha linearization W = t/alpha instead of the exact
    /// inversion.
    pub linearized: bool,
}

struct ExtractInputs {
    off_in: f64,
    amp_in: f64,
    ph_in: f64,
    ph_out: f64,
    block_p1: f64,
    block_p2: f64,
    bg_fringe: f64,
    bg_p1: f64,
    bg_p2: f64,
    out_offset: f64,
}

fn extract_core(
    p: &ExtractInputs,
    alpha: f64,
    linearized: bool,
    with_bg: bool,
) -> Result<(f64, f64), SimError> {
    let chi_desc = std::f64::consts::PI - p.ph_out;
    let chi_asc = 2.0 * std::f64::consts::PI - p.ph_out;
    let i_desc = p.off_in + p.amp_in * (chi_desc + p.ph_in).sin();
    let i_asc = p.off_in + p.amp_in * (chi_asc + p.ph_in).sin();
    let fringe_sum = i_asc + i_desc;
    if fringe_sum <= 0.0 {
        return Err(SimError::SingularExtraction(
            "IN fringe quadrature sum is not positive".into(),
        ));
    }
    let t_r = (i_asc - i_desc) / fringe_sum;

    let (gp, gm) = if with_bg {
        (
            (p.block_p2 - p.bg_p2).max(0.0),
            (p.block_p1 - p.bg_p1).max(0.0),
        )
    } else {
        (p.block_p2, p.block_p1)
    };
    let block_sum = gp + gm;
    if block_sum <= 0.0 {
        return Err(SimError::SingularExtraction(
            "blocked-beam intensity sum is not positive".into(),
        ));
    }
    let t_i = (gp - gm) / block_sum;

    if linearized {
        return Ok((t_r / alpha, t_i / alpha));
    }

    let c2 = (alpha / 2.0).cos().powi(2);
    let lambda = if with_bg {
        let out_total = p.out_offset + p.bg_fringe;
        if out_total <= 0.0 {
            return Err(SimError::SingularExtraction(
                "OUT fringe offset is not positive".into(),
            ));
        }
        (p.bg_fringe / out_total).max(0.0)
    } else {
        0.0
    };
    let ceff = c2 - lambda;
    if ceff <= 0.0 {
        return Err(SimError::SingularExtraction(format!(
            "background level {} exceeds the coupling constant {}",
            lambda, c2
        )));
    }
    let r2 = t_r * t_r + t_i * t_i;
    let sin_alpha = alpha.sin();
    let denom = if r2 < 1e-300 {
        ceff
    } else {
        let disc = (1.0 - r2 * ceff / c2).max(0.0);
        2.0 * c2 * (1.0 - disc.sqrt()) / r2
    };
    Ok((t_r * denom / sin_alpha, t_i * denom / sin_alpha))
}

/// Recover Z_w from the fitted IN and OUT fringes and the two blocked-beam
/// counts.
///
/// The real part comes from the IN fit evaluated at the OUT sine's offset
/// crossings (fit argument pi and 2 pi, so chi = pi/2 and 3 pi/2 when the
/// empty interferometer sits at phase pi/2); the imaginary part from the
/// blocked-beam asymmetry. When `backgrounds` is given, the fits must be of
/// background-subtracted fringes and the blocked counts are corrected and
/// clamped to zero here. Sigmas are first-order propagations through the
/// full inversion: the IN fit covariance block, the OUT phase variance, and
/// Poisson variances of the blocked counts (plus background variances).
pub fn extract_weak_value(
    in_fit: &SineFit,
    out_fit: &SineFit,
    i_block_p1: f64,
    i_block_p2: f64,
    backgrounds: Option<&BackgroundSet>,
    opts: &ExtractOptions,
) -> Result<MeasuredZ, SimError> {
    let alpha = validate_alpha(opts.alpha_deg)?;
    let with_bg = backgrounds.is_some();
    let bg = backgrounds.copied().unwrap_or(BackgroundSet {
        fringe_offset: 0.0,
        fringe_offset_var: 0.0,
        block_p1: 0.0,
        block_p1_var: 0.0,
        block_p2: 0.0,
        block_p2_var: 0.0,
    });
    let center = ExtractInputs {
        off_in: in_fit.offset,
        amp_in: in_fit.amplitude,
        ph_in: in_fit.phase,
        ph_out: out_fit.phase,
        block_p1: i_block_p1,
        block_p2: i_block_p2,
        bg_fringe: bg.fringe_offset,
        bg_p1: bg.block_p1,
        bg_p2: bg.block_p2,
        out_offset: out_fit.offset,
    };
    let (w_r, w_i) = extract_core(&center, alpha, opts.linearized, with_bg)?;

    // Delta method over the nine scalar inputs; the three in-fit parameters
    // carry their full covariance block, everything else is independent.
    let params = [
        center.off_in,
        center.amp_in,
        center.ph_in,
        center.ph_out,
        center.block_p1,
        center.block_p2,
        center.bg_fringe,
        center.bg_p1,
        center.bg_p2,
    ];
    let rebuild = |q: &[f64; 9]| ExtractInputs {
        off_in: q[0],
        amp_in: q[1],
        ph_in: q[2],
        ph_out: q[3],
        block_p1: q[4],
        block_p2: q[5],
        bg_fringe: q[6],
        bg_p1: q[7],
        bg_p2: q[8],
        out_offset: center.out_offset,
    };
    let mut jac = [[0.0f64; 9]; 2];
    for k in 0..9 {
        if !with_bg && k >= 6 {
            continue;
        }
        let h = 1e-6 * params[k].abs().max(1.0);
        let mut plus = params;
        plus[k] += h;
        let mut minus = params;
        minus[k] -= h;
        let fp = extract_core(&rebuild(&plus), alpha, opts.linearized, with_bg)?;
        let fm = extract_core(&rebuild(&minus), alpha, opts.linearized, with_bg)?;
        jac[0][k] = (fp.0 - fm.0) / (2.0 * h);
        jac[1][k] = (fp.1 - fm.1) / (2.0 * h);
    }
    let var_of = |row: &[f64; 9]| -> f64 {
        let mut acc = 0.0;
        // in-fit covariance block
        for u in 0..3 {
            for v in 0..3 {
                acc += row[u] * in_fit.covariance[u][v] * row[v];
            }
        }
        acc += row[3] * row[3] * out_fit.covariance[2][2];
        acc += row[4] * row[4] * i_block_p1.abs().max(1.0);
        acc += row[5] * row[5] * i_block_p2.abs().max(1.0);
        acc += row[6] * row[6] * bg.fringe_offset_var;
        acc += row[7] * row[7] * bg.block_p1_var;
        acc += row[8] * row[8] * bg.block_p2_var;
        acc.max(0.0)
    };
    Ok(MeasuredZ {
        re: w_r,
        re_sigma: var_of(&jac[0]).sqrt(),
        im: w_i,
        im_sigma: var_of(&jac[1]).sqrt(),
    })
}

/// One full simulated acquisition and extraction.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub alpha_deg: f64,
    pub chi_points: usize,
    pub mean_counts: f64,
    pub background_rate: f64,
    pub seed: u64,
    pub subtract_orthogonal_bg: bool,
    pub linearized: bool,
}

/// Count statistics comparable to the bundled measured data sets: a 16-point
/// phase-shifter scan at alpha = 15 degrees with ~4000 expected counts per
/// setting.
pub fn reference_config(seed: u64) -> PipelineConfig {
    PipelineConfig {
        alpha_deg: 15.0,
        chi_points: 16,
        mean_counts: 4000.0,
        background_rate: 0.0,
        seed,
        subtract_orthogonal_bg: false,
        linearized: false,
    }
}

/// The complete raw output of one acquisition: everything `extract` needs,
/// serializable so simulation and extraction can run as separate steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimBundle {
    pub alpha_deg: f64,
    pub seed: u64,
    #[serde(rename = "out")]
    pub out_fringe: Interferogram,
    #[serde(rename = "in")]
    pub in_fringe: Interferogram,
    pub block_p1: Interferogram,
    pub block_p2: Interferogram,
    /// Orthogonal-analyzer runs; present when the acquisition recorded
    /// backgrounds.
    #[serde(default)]
    pub bg_fringe: Option<Interferogram>,
    #[serde(default)]
    pub bg_block_p1: Option<Interferogram>,
    #[serde(default)]
    pub bg_block_p2: Option<Interferogram>,
}

impl SimBundle {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn from_json(text: &str) -> Result<SimBundle, SimError> {
        let b: SimBundle = serde_json::from_str(text)
            .map_err(|e| SimError::SingularExtraction(format!("bad bundle json: {}", e)))?;
        if b.bg_fringe.is_some() != b.bg_block_p1.is_some()
            || b.bg_fringe.is_some() != b.bg_block_p2.is_some()
        {
            return Err(SimError::SingularExtraction(
                "background records must be all present or all absent".into(),
            ));
        }
        Ok(b)
    }

    pub fn has_background(&self) -> bool {
        self.bg_fringe.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub measured: MeasuredZ,
    pub in_fit: SineFit,
    pub out_fit: SineFit,
    pub bundle: SimBundle,
}

pub fn chi_grid(points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / points as f64)
        .collect()
}

/// Simulate the full acquisition: OUT, IN, two blocked beams, plus the
/// orthogonal-analyzer backgrounds when enabled.
pub fn simulate_bundle(
    cfg: &PipelineConfig,
    pre: &SpinState,
    post: &SpinState,
) -> Result<SimBundle, SimError> {
    let grid = chi_grid(cfg.chi_points);
    // Blocked rates are chi-independent, so those modes get one exposure at
    // chi = 0 rather than a phase scan.
    let single = vec![0.0];
    let sim = |mode: CouplingMode, seed_offset: u64, post: &SpinState| {
        let grid = if mode.is_fringe() { &grid } else { &single };
        simulate(
            &CouplingConfig {
                alpha_deg: cfg.alpha_deg,
                chi_grid: grid.clone(),
                mean_counts: cfg.mean_counts,
                background_rate: cfg.background_rate,
                seed: cfg.seed.wrapping_add(seed_offset),
                mode,
            },
            pre,
            post,
        )
    };
    let out_fringe = sim(CouplingMode::Out, 0, post)?;
    let in_fringe = sim(CouplingMode::In, 1, post)?;
    let block_p1 = sim(CouplingMode::BlockP1, 2, post)?;
    let block_p2 = sim(CouplingMode::BlockP2, 3, post)?;
    let (bg_fringe, bg_block_p1, bg_block_p2) = if cfg.subtract_orthogonal_bg {
        let ortho = pre.orthogonal();
        (
            Some(sim(CouplingMode::OrthogonalBg, 4, post)?),
            Some(sim(CouplingMode::BlockP1, 5, &ortho)?),
            Some(sim(CouplingMode::BlockP2, 6, &ortho)?),
        )
    } else {
        (None, None, None)
    };
    Ok(SimBundle {
        alpha_deg: cfg.alpha_deg,
        seed: cfg.seed,
        out_fringe,
        in_fringe,
        block_p1,
        block_p2,
        bg_fringe,
        bg_block_p1,
        bg_block_p2,
    })
}

/// Fit the fringes of a recorded bundle (pointwise background subtraction
/// with clamping when the bundle carries backgrounds) and extract Z_w.
pub fn analyze_bundle(bundle: &SimBundle, linearized: bool) -> Result<PipelineResult, SimError> {
    let grid = &bundle.in_fringe.chi;
    if bundle.out_fringe.chi != *grid {
        return Err(SimError::SingularExtraction(
            "IN and OUT fringes use different chi grids".into(),
        ));
    }
    let to_f = |g: &Interferogram| -> Vec<f64> { g.counts.iter().map(|&c| c as f64).collect() };
    let blocks = (
        bundle.block_p1.total_counts() as f64,
        bundle.block_p2.total_counts() as f64,
    );

    let (in_fit, out_fit, bg_set) = match (&bundle.bg_fringe, &bundle.bg_block_p1, &bundle.bg_block_p2)
    {
        (Some(bg_fringe), Some(bg_p1), Some(bg_p2)) => {
            if bg_fringe.chi != *grid {
                return Err(SimError::SingularExtraction(
                    "background fringe uses a different chi grid".into(),
                ));
            }
            let bg_y = to_f(bg_fringe);
            let subtract = |g: &Interferogram| -> (Vec<f64>, Vec<f64>) {
                let y: Vec<f64> = g
                    .counts
                    .iter()
                    .zip(&bg_y)
                    .map(|(&c, &b)| (c as f64 - b).max(0.0))
                    .collect();
                let var: Vec<f64> = g
                    .counts
                    .iter()
                    .zip(&bg_y)
                    .map(|(&c, &b)| (c as f64 + b).max(1.0))
                    .collect();
                (y, var)
            };
            let (in_y, in_var) = subtract(&bundle.in_fringe);
            let (out_y, out_var) = subtract(&bundle.out_fringe);
            let in_fit = fit_sine_weighted(grid, &in_y, &in_var)?;
            let out_fit = fit_sine_weighted(grid, &out_y, &out_var)?;
            let bg_fit = fit_sine(bg_fringe)?;
            let bg_set = BackgroundSet {
                fringe_offset: bg_fit.offset,
                fringe_offset_var: bg_fit.covariance[0][0],
                block_p1: bg_p1.total_counts() as f64,
                block_p1_var: bg_p1.total_counts() as f64,
                block_p2: bg_p2.total_counts() as f64,
                block_p2_var: bg_p2.total_counts() as f64,
            };
            (in_fit, out_fit, Some(bg_set))
        }
        (None, None, None) => {
            let in_fit = fit_sine(&bundle.in_fringe)?;
            let out_fit = fit_sine(&bundle.out_fringe)?;
            (in_fit, out_fit, None)
        }
        _ => {
            return Err(SimError::SingularExtraction(
                "background records must be all present or all absent".into(),
            ))
        }
    };

    let opts = ExtractOptions {
        alpha_deg: bundle.alpha_deg,
        linearized,
    };
    let measured = extract_weak_value(
        &in_fit,
        &out_fit,
        blocks.0,
        blocks.1,
        bg_set.as_ref(),
        &opts,
    )?;
    Ok(PipelineResult {
        measured,
        in_fit,
        out_fit,
        bundle: bundle.clone(),
    })
}

/// Simulate the full acquisition, fit, and extract Z_w in one step.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    pre: &SpinState,
    post: &SpinState,
) -> Result<PipelineResult, SimError> {
    let bundle = simulate_bundle(cfg, pre, post)?;
    analyze_bundle(&bundle, cfg.linearized)
}

/// Noiseless variant of [`run_pipeline`]: expected intensities instead of
/// Poisson draws, unit fit weights. Exercises the inversion round trip.
pub fn run_pipeline_noiseless(
    cfg: &PipelineConfig,
    pre: &SpinState,
    post: &SpinState,
) -> Result<MeasuredZ, SimError> {
    let grid = chi_grid(cfg.chi_points);
    let expected = |mode: CouplingMode, post: &SpinState| -> Result<Vec<f64>, SimError> {
        grid.iter()
            .map(|&chi| {
                Ok(cfg.mean_counts * ideal_intensity(cfg.alpha_deg, chi, mode, pre, post)?
                    + cfg.background_rate)
            })
            .collect()
    };
    let ones = vec![1.0; grid.len()];
    let single = |mode: CouplingMode, post: &SpinState| -> Result<f64, SimError> {
        Ok(cfg.mean_counts * ideal_intensity(cfg.alpha_deg, 0.0, mode, pre, post)?
            + cfg.background_rate)
    };

    let out_y = expected(CouplingMode::Out, post)?;
    let in_y = expected(CouplingMode::In, post)?;
    let block_p1 = single(CouplingMode::BlockP1, post)?;
    let block_p2 = single(CouplingMode::BlockP2, post)?;

    let (in_fit, out_fit, blocks, bg_set) = if cfg.subtract_orthogonal_bg {
        let bg_y = expected(CouplingMode::OrthogonalBg, post)?;
        let ortho = pre.orthogonal();
        let bg_p1 = single(CouplingMode::BlockP1, &ortho)?;
        let bg_p2 = single(CouplingMode::BlockP2, &ortho)?;
        let sub = |y: &[f64]| -> Vec<f64> {
            y.iter().zip(&bg_y).map(|(&a, &b)| (a - b).max(0.0)).collect()
        };
        let in_fit = fit_sine_weighted(&grid, &sub(&in_y), &ones)?;
        let out_fit = fit_sine_weighted(&grid, &sub(&out_y), &ones)?;
        let bg_fit = fit_sine_weighted(&grid, &bg_y, &ones)?;
        let bg_set = BackgroundSet {
            fringe_offset: bg_fit.offset,
            fringe_offset_var: 0.0,
            block_p1: bg_p1,
            block_p1_var: 0.0,
            block_p2: bg_p2,
            block_p2_var: 0.0,
        };
        (in_fit, out_fit, (block_p1, block_p2), Some(bg_set))
    } else {
        let in_fit = fit_sine_weighted(&grid, &in_y, &ones)?;
        let out_fit = fit_sine_weighted(&grid, &out_y, &ones)?;
        (in_fit, out_fit, (block_p1, block_p2), None)
    };

    let opts = ExtractOptions {
        alpha_deg: cfg.alpha_deg,
        linearized: cfg.linearized,
    };
    extract_weak_value(
        &in_fit,
        &out_fit,
        blocks.0,
        blocks.1,
        bg_set.as_ref(),
        &opts,
    )
}
