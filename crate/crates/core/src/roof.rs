//! Numerical convex-roof search.
//!
//! Every `m`-member decomposition of `ρ = Σ_j ν_j |e_j⟩⟨e_j|` has the form
//! `|w_i⟩ = Σ_j V_ij √ν_j |e_j⟩` for an isometry `V` (`m × r`, `r = rank ρ`).
//! The search keeps the unnormalized members `w_i` explicitly and moves
//! through the isometries by mixing two members at a time with the unitary
//!
//! ```text
//! w_p ← cos θ · w_p + sin θ · e^{iδ} · w_q
//! w_q ← −sin θ · e^{−iδ} · w_p + cos θ · w_q
//! ```
//!
//! which keeps `Σ_i |w_i⟩⟨w_i| = ρ` exact. Member phases do not change any
//! pure-state measure, so `(θ, δ)` covers every distinct two-member move.
//! Each move is chosen by a coarse grid over `(θ, δ)` followed by alternating
//! golden-section refinement of `θ` and `δ`, and accepted only when it lowers
//! the objective. Sweeps over all member pairs repeat until a sweep gains
//! less than `value_tol`.
//!
//! Concurrence and CREN are not differentiable at product members, where
//! two-member moves stall. For those measures the search first runs on the
//! smoothed objective `√((p·M)² + 4ε²p²)` for a decreasing sequence of `ε`,
//! finishing on the exact objective. The best exact ensemble seen is kept.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::measures::{weighted_pure_measure_flat, MeasureKind};
use crate::qstate::{self, permute_factors_vec, DensityMatrix, QubitPartition};
use crate::rng;

/// Eigenvalues below this are outside the support.
pub const RANK_CUTOFF: f64 = 1e-12;
pub const MAX_RANK: usize = 8;
pub const MAX_SIDE: usize = 64;

const THETA_GRID: usize = 12;
const DELTA_GRID: usize = 4;
const REFINE_ROUNDS: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofConfig {
    /// Number of ensemble members; `None` means twice the rank.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    /// Maximum number of sweeps per restart.
    pub max_iters: usize,
    pub step_tol: f64,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        RoofConfig {
            ensemble_size: None,
            restarts: 8,
            max_iters: 500,
            step_tol: 1e-10,
            value_tol: 1e-9,
            seed: 0,
        }
    }
}

impl RoofConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Config("roof restarts must be >= 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("roof max_iters must be >= 1".into()));
        }
        if !(self.step_tol > 0.0 && self.value_tol > 0.0) {
            return Err(Error::Config("roof tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// A weighted pure-state ensemble over the full space of `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub dims: Vec<usize>,
    pub weights: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ w_i |φ_i⟩⟨φ_i|`
    pub fn reconstruct(&self) -> CMat {
        let side: usize = self.dims.iter().product();
        let mut out = CMat::zeros(side, side);
        for (w, s) in self.weights.iter().zip(&self.states) {
            out = &out + &CMat::outer(s, *w);
        }
        out
    }

    fn from_members(dims: Vec<usize>, members: &[Vec<Complex64>]) -> Self {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for w in members {
            let p = linalg::vec_norm_sqr(w);
            if p > 1e-15 {
                let norm = p.sqrt();
                weights.push(p);
                states.push(w.iter().map(|z| z / norm).collect());
            }
        }
        Decomposition { dims, weights, states }
    }

    /// `Σ w_i M(φ_i)` across `cut`.
    pub fn average_measure(&self, kind: MeasureKind, cut: &QubitPartition) -> Result<f64> {
        if cut.n() != self.dims.len() {
            return Err(Error::ShapeMismatch(format!(
                "partition over {} factors, decomposition over {}",
                cut.n(),
                self.dims.len()
            )));
        }
        let (perm, da, db) = cut_layout(&self.dims, cut);
        Ok(self
            .weights
            .iter()
            .zip(&self.states)
            .map(|(w, s)| w * weighted_pure_measure_flat(kind, &permute_factors_vec(s, &self.dims, &perm), da, db))
            .sum())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoofResult {
    pub value: f64,
    pub decomposition: Decomposition,
    pub converged: bool,
    pub iterations_used: usize,
    /// Lowest exact objective reached after each sweep of the winning restart.
    pub history: Vec<f64>,
}

/// Factor order with side A first, plus the two side dimensions.
fn cut_layout(dims: &[usize], cut: &QubitPartition) -> (Vec<usize>, usize, usize) {
    let perm: Vec<usize> = cut.side_a().iter().chain(cut.side_b()).copied().collect();
    let da = cut.side_a().iter().map(|&k| dims[k]).product();
    let db = cut.side_b().iter().map(|&k| dims[k]).product();
    (perm, da, db)
}

struct Spectrum {
    values: Vec<f64>,
    vectors: Vec<Vec<Complex64>>,
}

fn support(rho: &DensityMatrix) -> Spectrum {
    let e = linalg::eigh(rho.matrix());
    let rank = e.values.iter().filter(|&&v| v > RANK_CUTOFF).count();
    Spectrum {
        values: e.values[..rank].to_vec(),
        vectors: (0..rank).map(|j| e.vectors.column(j)).collect(),
    }
}

/// Builds the decomposition `w_i = Σ_j V_ij √ν_j |e_j⟩` from an isometry.
pub fn ensemble_from_isometry(rho: &DensityMatrix, isometry: &CMat) -> Result<Decomposition> {
    let spec = support(rho);
    let r = spec.values.len();
    if isometry.cols() != r {
        return Err(Error::RankMismatch { rank: r, got: isometry.cols() });
    }
    let dev = linalg::isometry_deviation(isometry);
    if dev > 1e-10 {
        return Err(Error::NotAnIsometry(dev));
    }
    let side = rho.side();
    let members: Vec<Vec<Complex64>> = (0..isometry.rows())
        .map(|i| {
            let mut w = vec![Complex64::new(0.0, 0.0); side];
            for j in 0..r {
                let coef = isometry[(i, j)] * spec.values[j].sqrt();
                for (x, e) in w.iter_mut().zip(&spec.vectors[j]) {
                    *x += coef * e;
                }
            }
            w
        })
        .collect();
    Ok(Decomposition::from_members(rho.dims().to_vec(), &members))
}

/// Frobenius norm of `ρ − Σ w_i |φ_i⟩⟨φ_i|`.
pub fn validate_decomposition(rho: &DensityMatrix, d: &Decomposition) -> Result<f64> {
    if d.dims != rho.dims() || d.states.iter().any(|s| s.len() != rho.side()) {
        return Err(Error::ShapeMismatch(format!(
            "decomposition over {:?} vs state over {:?}",
            d.dims,
            rho.dims()
        )));
    }
    Ok((rho.matrix() - &d.reconstruct()).frobenius_norm())
}

/// Smoothing widths for concurrence and CREN, ending with the exact objective.
const SMOOTHING: [f64; 4] = [1e-1, 1e-2, 1e-3, 0.0];

#[derive(Clone, Copy)]
struct Objective {
    kind: MeasureKind,
    da: usize,
    db: usize,
    /// `p·M` is replaced by `√((p·M)² + 4ε²p²)`; 0 is exact.
    eps: f64,
}

impl Objective {
    fn exact(&self, w: &[Complex64]) -> f64 {
        weighted_pure_measure_flat(self.kind, w, self.da, self.db)
    }

    fn eval(&self, w: &[Complex64]) -> f64 {
        let v = self.exact(w);
        if self.eps == 0.0 {
            return v;
        }
        let p = linalg::vec_norm_sqr(w);
        (v * v + 4.0 * self.eps * self.eps * p * p).sqrt()
    }

    /// Concurrence and CREN have a cusp wherever a member is a product state.
    fn stages(&self) -> &'static [f64] {
        match self.kind {
            MeasureKind::Eof => &SMOOTHING[3..],
            _ => &SMOOTHING,
        }
    }
}

struct RestartOutcome {
    value: f64,
    members: Vec<Vec<Complex64>>,
    sweeps: usize,
    converged: bool,
    history: Vec<f64>,
}

fn mix(wp: &[Complex64], wq: &[Complex64], theta: f64, delta: f64, out_p: &mut [Complex64], out_q: &mut [Complex64]) {
    let (s, c) = theta.sin_cos();
    let ph = Complex64::from_polar(s, delta);
    let ph_conj = ph.conj();
    for k in 0..wp.len() {
        out_p[k] = wp[k] * c + ph * wq[k];
        out_q[k] = -ph_conj * wp[k] + wq[k] * c;
    }
}

fn golden_section(mut lo: f64, mut hi: f64, tol: f64, f: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Best two-member move for the pair; returns the new pair value if it improves.
fn optimize_pair(
    obj: &Objective,
    wp: &mut [Complex64],
    wq: &mut [Complex64],
    current: f64,
    step_tol: f64,
    scratch: &mut (Vec<Complex64>, Vec<Complex64>),
) -> Option<f64> {
    let mut eval = |theta: f64, delta: f64| {
        let (a, b) = (&mut scratch.0, &mut scratch.1);
        mix(wp, wq, theta, delta, a, b);
        obj.eval(a) + obj.eval(b)
    };

    let mut best = (0.0, 0.0, current);
    for i in 0..THETA_GRID {
        let theta = -FRAC_PI_2 + PI * (i as f64) / THETA_GRID as f64;
        if i == THETA_GRID / 2 {
            continue; // θ = 0 is the current point
        }
        for l in 0..DELTA_GRID {
            let delta = TAU * (l as f64) / DELTA_GRID as f64;
            let v = eval(theta, delta);
            if v < best.2 {
                best = (theta, delta, v);
            }
        }
    }
    let (mut theta, mut delta, mut value) = best;
    let mut theta_half = PI / THETA_GRID as f64;
    let mut delta_half = PI / DELTA_GRID as f64;
    for _ in 0..REFINE_ROUNDS {
        let (t, v) = golden_section(theta - theta_half, theta + theta_half, step_tol, &mut |t| eval(t, delta));
        if v < value {
            theta = t;
            value = v;
        }
        let (d, v) = golden_section(delta - delta_half, delta + delta_half, step_tol, &mut |d| eval(theta, d));
        if v < value {
            delta = d;
            value = v;
        }
        theta_half *= 0.25;
        delta_half *= 0.25;
    }
    if value < current {
        let (a, b) = (&mut scratch.0, &mut scratch.1);
        mix(wp, wq, theta, delta, a, b);
        wp.copy_from_slice(a);
        wq.copy_from_slice(b);
        Some(obj.eval(wp) + obj.eval(wq))
    } else {
        None
    }
}

fn run_restart(obj: &Objective, mut members: Vec<Vec<Complex64>>, config: &RoofConfig) -> RestartOutcome {
    let m = members.len();
    let side = members[0].len();
    let exact_total = |ms: &[Vec<Complex64>]| ms.iter().map(|w| obj.exact(w)).sum::<f64>();
    let mut best = (exact_total(&members), members.clone());
    let mut history = Vec::new();
    let mut scratch = (vec![Complex64::default(); side], vec![Complex64::default(); side]);
    let mut converged = false;
    let mut sweeps = 0;
    for &eps in obj.stages() {
        let stage = Objective { eps, ..*obj };
        let mut vals: Vec<f64> = members.iter().map(|w| stage.eval(w)).collect();
        let mut total: f64 = vals.iter().sum();
        converged = false;
        while sweeps < config.max_iters {
            sweeps += 1;
            let before = total;
            for p in 0..m {
                for q in (p + 1)..m {
                    let (left, right) = members.split_at_mut(q);
                    let current = vals[p] + vals[q];
                    if optimize_pair(&stage, &mut left[p], &mut right[0], current, config.step_tol, &mut scratch).is_some() {
                        vals[p] = stage.eval(&left[p]);
                        vals[q] = stage.eval(&right[0]);
                    }
                }
            }
            total = vals.iter().sum::<f64>().min(before);
            let value = exact_total(&members);
            if value < best.0 {
                best = (value, members.clone());
            }
            history.push(best.0);
            if before - total < config.value_tol {
                converged = true;
                break;
            }
        }
    }
    RestartOutcome {
        value: best.0,
        members: best.1,
        sweeps,
        converged,
        history,
    }
}

/// Upper estimate of the convex roof of `kind` for `rho` across `cut`.
///
/// Restart 0 starts from the eigen-ensemble (padded with empty members), so
/// the result never exceeds the eigen-ensemble average. Restarts run in
/// parallel; each owns the random stream `(seed, restart)` and the lowest
/// value wins, ties going to the lowest restart index.
pub fn roof_minimize(
    rho: &DensityMatrix,
    kind: MeasureKind,
    cut: &QubitPartition,
    config: &RoofConfig,
) -> Result<RoofResult> {
    config.validate()?;
    if cut.n() != rho.dims().len() {
        return Err(Error::InvalidPartition(format!(
            "partition over {} factors applied to a state with {} factors",
            cut.n(),
            rho.dims().len()
        )));
    }
    if rho.side() > MAX_SIDE {
        return Err(Error::RoofUnsupported(format!("side {} exceeds {MAX_SIDE}", rho.side())));
    }
    let (perm, da, db) = cut_layout(rho.dims(), cut);
    let mut inverse = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inverse[p] = k;
    }
    let permuted = rho.permute_factors(&perm)?;
    let spec = support(&permuted);
    let r = spec.values.len();
    if r > MAX_RANK {
        return Err(Error::RoofUnsupported(format!("rank {r} exceeds {MAX_RANK}")));
    }
    let obj = Objective { kind, da, db, eps: 0.0 };
    let back = |v: &[Complex64]| permute_factors_vec(v, permuted.dims(), &inverse);

    if r <= 1 {
        let e = &spec.vectors[0];
        let value = obj.exact(e);
        return Ok(RoofResult {
            value,
            decomposition: Decomposition {
                dims: rho.dims().to_vec(),
                weights: vec![1.0],
                states: vec![back(e)],
            },
            converged: true,
            iterations_used: 1,
            history: vec![value],
        });
    }

    let m = config.ensemble_size.unwrap_or(2 * r);
    if m < r {
        return Err(Error::Config(format!("ensemble size {m} below rank {r}")));
    }
    let side = permuted.side();
    let mut base = vec![vec![Complex64::default(); side]; m];
    for j in 0..r {
        let s = spec.values[j].sqrt();
        for (x, e) in base[j].iter_mut().zip(&spec.vectors[j]) {
            *x = e * s;
        }
    }

    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                base.clone()
            } else {
                let mut rng = rng::stream(config.seed, k as u64);
                let u = qstate::haar_unitary(m, &mut rng);
                (0..m)
                    .map(|i| {
                        let mut w = vec![Complex64::default(); side];
                        for (j, bj) in base.iter().enumerate().take(r) {
                            let coef = u[(i, j)];
                            for (x, b) in w.iter_mut().zip(bj) {
                                *x += coef * b;
                            }
                        }
                        w
                    })
                    .collect()
            };
            run_restart(&obj, start, config)
        })
        .collect();

    let mut best = 0;
    for (k, o) in outcomes.iter().enumerate() {
        if o.value < outcomes[best].value {
            best = k;
        }
    }
    let win = &outcomes[best];
    let members: Vec<Vec<Complex64>> = win.members.iter().map(|w| back(w)).collect();
    Ok(RoofResult {
        value: win.value,
        decomposition: Decomposition::from_members(rho.dims().to_vec(), &members),
        converged: win.converged,
        iterations_used: win.sweeps,
        history: win.history.clone(),
    })
}
