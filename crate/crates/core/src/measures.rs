//! Entanglement measures: concurrence, entanglement of formation and
//! (convex-roof extended) negativity, plus the scalar functions `H` and `g`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C0};
use crate::qstate::{self, DensityMatrix, PureState, QubitPartition};
use crate::roof::{self, RoofConfig};

/// Slack accepted on scalar domains such as `[0, 1]`.
pub const DOMAIN_SLACK: f64 = 1e-12;
/// Normalized eigenvalues below this contribute nothing to an entropy.
pub const ENTROPY_CUTOFF: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Concurrence,
    Eof,
    Cren,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 3] = [MeasureKind::Concurrence, MeasureKind::Eof, MeasureKind::Cren];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::Eof => "eof",
            MeasureKind::Cren => "cren",
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "concurrence" | "c" => Ok(MeasureKind::Concurrence),
            "eof" | "e" => Ok(MeasureKind::Eof),
            "cren" | "negativity" | "n" => Ok(MeasureKind::Cren),
            other => Err(Error::Config(format!("unknown measure '{other}'"))),
        }
    }
}

/// A measure value together with whether it came from a closed form (`exact`)
/// or from a numerical convex-roof search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
    pub exact: bool,
}

fn check_unit_interval(x: f64) -> Result<f64> {
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        return Err(Error::Domain { value: x, domain: "[0, 1]" });
    }
    Ok(x.clamp(0.0, 1.0))
}

/// `H(x) = −x log₂x − (1−x) log₂(1−x)` with `0·log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    let x = check_unit_interval(x)?;
    Ok(xlog2x(x) + xlog2x(1.0 - x))
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `g(x) = H((1 + √(1−x))/2)`; converts squared concurrence into EoF.
pub fn g_func(x: f64) -> Result<f64> {
    let x = check_unit_interval(x)?;
    binary_entropy(0.5 * (1.0 + (1.0 - x).max(0.0).sqrt()))
}

/// `g^√2(x²+y²) − g^√2(x²) − g^√2(y²)`, nonnegative on the admissible region.
pub fn g_superadditivity_gap(x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::Domain { value: x.min(y), domain: "x, y >= 0" });
    }
    let s = x * x + y * y;
    if s > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain { value: s, domain: "x² + y² <= 1" });
    }
    let r2 = std::f64::consts::SQRT_2;
    Ok(g_func(s)?.powf(r2) - g_func(x * x)?.powf(r2) - g_func(y * y)?.powf(r2))
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues(), 1.0)
}

/// `−Σ (μ/p) log₂(μ/p)` for a spectrum `μ` of total weight `p`.
fn entropy_of_spectrum(mu: &[f64], p: f64) -> f64 {
    mu.iter()
        .map(|&m| m / p)
        .filter(|&x| x >= ENTROPY_CUTOFF)
        .map(xlog2x)
        .sum()
}

/// Spectrum of the smaller reduced operator of a `d_A × d_B` coefficient matrix.
fn reduced_spectrum(coeff: &CMat) -> Vec<f64> {
    let small = if coeff.rows() <= coeff.cols() {
        coeff * &coeff.adjoint()
    } else {
        &coeff.adjoint() * coeff
    };
    linalg::eigvalsh(&small).into_iter().map(|x| x.max(0.0)).collect()
}

/// Ensemble weight times the pure-state measure of an unnormalized vector
/// whose coefficient matrix (side A as rows) is `coeff`. With `p = ‖w‖²`:
/// concurrence `√(2(p² − Tr σ²))`, EoF `p·S(σ/p)`, negativity `(Σ√μ)² − p`.
pub(crate) fn weighted_pure_measure(kind: MeasureKind, coeff: &CMat) -> f64 {
    measure_of_spectrum(kind, &reduced_spectrum(coeff))
}

/// As [`weighted_pure_measure`] for a row-major `d_a × d_b` coefficient slice.
pub(crate) fn weighted_pure_measure_flat(kind: MeasureKind, w: &[Complex64], da: usize, db: usize) -> f64 {
    if da == 2 || db == 2 {
        // 2×2 reduced operator on the qubit side
        let (mut s00, mut s11, mut s01) = (0.0, 0.0, C0);
        if da == 2 {
            for b in 0..db {
                let (x, y) = (w[b], w[db + b]);
                s00 += x.norm_sqr();
                s11 += y.norm_sqr();
                s01 += x * y.conj();
            }
        } else {
            for a in 0..da {
                let (x, y) = (w[a * 2], w[a * 2 + 1]);
                s00 += x.norm_sqr();
                s11 += y.norm_sqr();
                s01 += x.conj() * y;
            }
        }
        let det = (s00 * s11 - s01.norm_sqr()).max(0.0);
        if kind == MeasureKind::Concurrence {
            return 2.0 * det.sqrt();
        }
        let (l1, _) = linalg::eig2(s00, s11, s01);
        let l2 = if l1 > 0.0 { det / l1 } else { 0.0 };
        return measure_of_spectrum(kind, &[l1.max(0.0), l2]);
    }
    let coeff = CMat::from_rows(da, db, w.to_vec()).expect("coefficient slice has d_a·d_b entries");
    weighted_pure_measure(kind, &coeff)
}

fn measure_of_spectrum(kind: MeasureKind, mu: &[f64]) -> f64 {
    let p: f64 = mu.iter().sum();
    if p <= 0.0 {
        return 0.0;
    }
    match kind {
        MeasureKind::Concurrence => {
            let tr_sq: f64 = mu.iter().map(|m| m * m).sum();
            (2.0 * (p * p - tr_sq)).max(0.0).sqrt()
        }
        MeasureKind::Eof => p * entropy_of_spectrum(mu, p),
        MeasureKind::Cren => {
            let s: f64 = mu.iter().map(|m| m.sqrt()).sum();
            (s * s - p).max(0.0)
        }
    }
}

/// Pure-state value of `kind` across `cut`.
pub fn pure_measure(kind: MeasureKind, psi: &PureState, cut: &QubitPartition) -> Result<f64> {
    Ok(weighted_pure_measure(kind, &psi.coefficient_matrix(cut)?))
}

/// `C(|ψ⟩) = √(2(1 − Tr ρ_A²))`
pub fn concurrence_pure(psi: &PureState, cut: &QubitPartition) -> Result<f64> {
    pure_measure(MeasureKind::Concurrence, psi, cut)
}

/// `E(|ψ⟩) = S(ρ_A)`
pub fn eof_pure(psi: &PureState, cut: &QubitPartition) -> Result<f64> {
    let lambda = qstate::schmidt_coefficients(psi, cut)?;
    Ok(entropy_of_spectrum(&lambda, 1.0))
}

/// `N(|ψ⟩) = 2 Σ_{i<j} √(λ_i λ_j)` over the squared Schmidt coefficients.
pub fn negativity_pure_schmidt(psi: &PureState, cut: &QubitPartition) -> Result<f64> {
    let lambda = qstate::schmidt_coefficients(psi, cut)?;
    let mut s = 0.0;
    for i in 0..lambda.len() {
        for j in (i + 1)..lambda.len() {
            s += (lambda[i] * lambda[j]).sqrt();
        }
    }
    Ok(2.0 * s)
}

/// `σ_y ⊗ σ_y` is real: `|00⟩ ↔ −|11⟩`, `|01⟩ ↔ |10⟩`.
fn spin_flip_apply(v: &[Complex64]) -> [Complex64; 4] {
    [-v[3], v[2], v[1], -v[0]]
}

/// Wootters concurrence from any factorization `ρ = W W†`, `W` a 4×k matrix.
///
/// The decreasing square roots of the eigenvalues of `ρρ̃` are the singular
/// values of the symmetric matrix `τ = Wᵀ(σ_y⊗σ_y)W`, which are read off as
/// the positive eigenvalues of the Hermitian dilation `[[0, τ], [τ†, 0]]`.
pub fn concurrence_from_factor(w: &CMat) -> Result<f64> {
    if w.rows() != 4 {
        return Err(Error::WrongDimensions {
            expected: "4 x k factor of a two-qubit state",
            got: vec![w.rows(), w.cols()],
        });
    }
    let k = w.cols();
    let cols: Vec<Vec<Complex64>> = (0..k).map(|j| w.column(j)).collect();
    let flipped: Vec<[Complex64; 4]> = cols.iter().map(|c| spin_flip_apply(c)).collect();
    let tau = CMat::from_fn(k, k, |i, j| {
        cols[i].iter().zip(&flipped[j]).map(|(a, b)| a * b).sum()
    });
    let mu = singular_values(&tau);
    let mut mu4 = [0.0; 4];
    for (slot, m) in mu4.iter_mut().zip(mu) {
        *slot = m;
    }
    Ok((mu4[0] - mu4[1] - mu4[2] - mu4[3]).max(0.0))
}

fn singular_values(m: &CMat) -> Vec<f64> {
    let (r, c) = (m.rows(), m.cols());
    let dil = CMat::from_fn(r + c, r + c, |i, j| {
        if i < r && j >= r {
            m[(i, j - r)]
        } else if i >= r && j < r {
            m[(j, i - r)].conj()
        } else {
            C0
        }
    });
    let vals = linalg::eigvalsh(&dil);
    vals.into_iter().take(r.min(c)).map(|x| x.max(0.0)).collect()
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::WrongDimensions {
            expected: "(2, 2)",
            got: rho.dims().to_vec(),
        });
    }
    Ok(())
}

/// `W` with `ρ = W W†` from the clamped eigen-decomposition.
fn eigen_factor(rho: &DensityMatrix) -> CMat {
    let e = linalg::eigh(rho.matrix());
    let n = rho.side();
    CMat::from_fn(n, n, |i, j| e.vectors[(i, j)] * e.values[j].max(0.0).sqrt())
}

/// Two-qubit mixed-state concurrence, `max(0, μ₁ − μ₂ − μ₃ − μ₄)`.
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    concurrence_from_factor(&eigen_factor(rho))
}

/// `E(ρ) = g(C²(ρ))` for two qubits.
pub fn eof_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    let c = concurrence_two_qubit(rho)?;
    g_func((c * c).min(1.0))
}

/// `‖ρ^{T_X}‖ − 1` (no factor ½), clamped at zero.
pub fn negativity(rho: &DensityMatrix, transposed_factor: usize) -> Result<f64> {
    let pt = rho.partial_transpose(transposed_factor)?;
    Ok((linalg::trace_norm(&pt)? - 1.0).max(0.0))
}

/// CREN of a `2 ⊗ d` state, which coincides with its concurrence.
///
/// Two-qubit inputs use the Wootters closed form; rank-one inputs use the
/// pure-state value. Anything else goes through the convex-roof search and
/// is marked inexact.
pub fn cren_two_by_d(rho: &DensityMatrix, config: &RoofConfig) -> Result<MeasureValue> {
    if rho.dims().first() != Some(&2) {
        return Err(Error::WrongDimensions {
            expected: "(2, d)",
            got: rho.dims().to_vec(),
        });
    }
    let view = rho.as_first_vs_rest();
    if view.dims() == [2, 2] {
        return Ok(MeasureValue {
            kind: MeasureKind::Cren,
            value: concurrence_two_qubit(&view)?,
            exact: true,
        });
    }
    let cut = QubitPartition::first_vs_rest(2)?;
    let res = roof::roof_minimize(&view, MeasureKind::Concurrence, &cut, config)?;
    Ok(MeasureValue {
        kind: MeasureKind::Cren,
        value: res.value,
        exact: res.decomposition.len() == 1,
    })
}

/// Concurrence of the two-qubit marginal on qubits `(i, j)` of a pure state.
///
/// The marginal is factored exactly as `Σ_c |ψ_c⟩⟨ψ_c|` over basis states of
/// the traced qubits when there are at most four of them, which avoids the
/// eigen-decomposition.
pub fn pairwise_concurrence(psi: &PureState, i: usize, j: usize) -> Result<f64> {
    let n = psi.n_qubits();
    let cut = QubitPartition::new(n, &[i, j])?;
    let coeff = psi.coefficient_matrix(&cut)?;
    if coeff.cols() <= 4 {
        concurrence_from_factor(&coeff)
    } else {
        let rho = qstate::density_of(psi).partial_trace(&cut)?;
        concurrence_two_qubit(&rho)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{density_of, haar_random_pure, make_gsd_state, GsdParams};

    fn werner(p: f64) -> DensityMatrix {
        let bell = density_of(&PureState::bell_phi_plus());
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        bell.mix(&mixed, p).unwrap()
    }

    /// The `R = √(√ρ ρ̃ √ρ)` route, kept here as an independent check.
    fn wootters_via_sqrt(rho: &DensityMatrix) -> f64 {
        let y = CMat::from_fn(4, 4, |i, j| match (i, j) {
            (0, 3) | (3, 0) => (-1.0).into(),
            (1, 2) | (2, 1) => 1.0.into(),
            _ => C0,
        });
        let tilde = &(&y * &rho.matrix().conj()) * &y;
        let s = rho.matrix().psd_sqrt();
        let x = &(&s * &tilde) * &s;
        let mu: Vec<f64> = linalg::eigvalsh(&x).iter().map(|v| v.max(0.0).sqrt()).collect();
        (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0)
    }

    fn ex1() -> PureState {
        let r = |x: f64| x.sqrt() / 3.0;
        make_gsd_state(&GsdParams::new([r(2.0), 0.0, r(5.0), r(2.0), 0.0], 0.0).unwrap()).unwrap()
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        let want = 3f64.log2() - 2.0 / 3.0;
        assert!((binary_entropy(2.0 / 3.0).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.91830).abs() < 5e-6);
        assert!(matches!(binary_entropy(1.1), Err(Error::Domain { .. })));
        assert!(binary_entropy(1.0 + 1e-13).is_ok());
    }

    #[test]
    fn g_values() {
        assert_eq!(g_func(0.0).unwrap(), 0.0);
        assert!((g_func(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((g_func(8.0 / 9.0).unwrap() - 0.91829).abs() < 5e-5);
        assert!((g_func(48.0 / 81.0).unwrap() - 0.68193).abs() < 5e-5);
        assert!(g_func(1.0 + 5e-13).is_ok());
        assert!(g_func(-0.1).is_err());
    }

    #[test]
    fn superadditivity_gap_examples() {
        assert!(g_superadditivity_gap(0.6, 0.0).unwrap().abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = 1.0 - 2.0 * g_func(0.5).unwrap().powf(std::f64::consts::SQRT_2);
        let got = g_superadditivity_gap(h, h).unwrap();
        assert!((got - want).abs() < 1e-14 && got >= 0.0);
        assert!(g_superadditivity_gap(0.9, 0.9).is_err());
    }

    #[test]
    fn pure_concurrence_examples() {
        let cut = QubitPartition::first_vs_rest(3).unwrap();
        let c = concurrence_pure(&ex1(), &cut).unwrap();
        assert!((c - 2.0 * 14f64.sqrt() / 9.0).abs() < 1e-12);
        let prod = PureState::basis(3, 5).unwrap();
        assert!(concurrence_pure(&prod, &cut).unwrap().abs() < 1e-15);
        let w = PureState::w(3).unwrap();
        assert!((concurrence_pure(&w, &cut).unwrap() - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-14);
    }

    #[test]
    fn wootters_examples() {
        let bell = density_of(&PureState::bell_phi_plus());
        assert!((concurrence_two_qubit(&bell).unwrap() - 1.0).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert!(concurrence_two_qubit(&mixed).unwrap().abs() < 1e-15);
        assert!((concurrence_two_qubit(&werner(0.8)).unwrap() - 0.7).abs() < 1e-13);
        let wrong = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        assert!(matches!(concurrence_two_qubit(&wrong), Err(Error::WrongDimensions { .. })));
    }

    #[test]
    fn wootters_matches_sqrt_route() {
        for seed in 0..20 {
            let rho = density_of(&haar_random_pure(3, seed).unwrap())
                .partial_trace_factors(&[0, 1])
                .unwrap();
            let a = concurrence_two_qubit(&rho).unwrap();
            // the square-root route loses about half the digits near zero eigenvalues
            assert!((a - wootters_via_sqrt(&rho)).abs() < 1e-6, "seed {seed}");
        }
    }

    #[test]
    fn pairwise_concurrence_matches_gsd_closed_forms() {
        let psi = ex1();
        let ab = pairwise_concurrence(&psi, 0, 1).unwrap();
        let ac = pairwise_concurrence(&psi, 0, 2).unwrap();
        assert!((ab - 2.0 * 10f64.sqrt() / 9.0).abs() < 1e-14);
        assert!((ac - 4.0 / 9.0).abs() < 1e-14);
        let rho_ab = density_of(&psi).partial_trace_factors(&[0, 1]).unwrap();
        assert!((concurrence_two_qubit(&rho_ab).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn eof_examples() {
        let cut2 = QubitPartition::first_vs_rest(2).unwrap();
        assert!((eof_pure(&PureState::bell_phi_plus(), &cut2).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(eof_pure(&PureState::basis(2, 3).unwrap(), &cut2).unwrap(), 0.0);
        let r = |x: f64| x.sqrt() / 3.0;
        let ex2 = make_gsd_state(
            &GsdParams::new([r(6.0), 0.0, r(2.0), 1.0 / 3.0, 0.0], 0.0).unwrap(),
        )
        .unwrap();
        let cut3 = QubitPartition::first_vs_rest(3).unwrap();
        assert!((eof_pure(&ex2, &cut3).unwrap() - 0.91829).abs() < 5e-5);
        let rho = density_of(&ex2);
        let ab = eof_two_qubit(&rho.partial_trace_factors(&[0, 1]).unwrap()).unwrap();
        let ac = eof_two_qubit(&rho.partial_trace_factors(&[0, 2]).unwrap()).unwrap();
        assert!((ab - 0.68193).abs() < 5e-5);
        assert!((ac - 0.40416).abs() < 5e-5);
        let sep = DensityMatrix::maximally_mixed(vec![2, 2]).unwrap();
        assert_eq!(eof_two_qubit(&sep).unwrap(), 0.0);
    }

    #[test]
    fn negativity_examples() {
        let bell = density_of(&PureState::bell_phi_plus());
        assert!((negativity(&bell, 0).unwrap() - 1.0).abs() < 1e-14);
        let prod = density_of(&PureState::basis(2, 2).unwrap());
        assert!(negativity(&prod, 0).unwrap().abs() < 1e-14);
        let rho = density_of(&ex1()).regroup(vec![2, 4]).unwrap();
        assert!((negativity(&rho, 0).unwrap() - 2.0 * 14f64.sqrt() / 9.0).abs() < 1e-12);
        assert!(matches!(negativity(&rho, 2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn schmidt_negativity_examples() {
        let cut = QubitPartition::first_vs_rest(2).unwrap();
        assert!((negativity_pure_schmidt(&PureState::bell_phi_plus(), &cut).unwrap() - 1.0).abs() < 1e-14);
        let cut3 = QubitPartition::first_vs_rest(3).unwrap();
        let psi = haar_random_pure(3, 17).unwrap();
        // single-qubit side A always has Schmidt rank <= 2
        let n = negativity_pure_schmidt(&psi, &cut3).unwrap();
        let c = concurrence_pure(&psi, &cut3).unwrap();
        assert!((n - c).abs() < 1e-12);
    }

    #[test]
    fn cren_examples() {
        let cfg = RoofConfig::default();
        let rho = werner(0.6);
        let v = cren_two_by_d(&rho, &cfg).unwrap();
        assert!(v.exact);
        assert_eq!(v.value, concurrence_two_qubit(&rho).unwrap());

        let psi = haar_random_pure(3, 5).unwrap();
        let pure = density_of(&psi).regroup(vec![2, 4]).unwrap();
        let v = cren_two_by_d(&pure, &cfg).unwrap();
        let c = concurrence_pure(&psi, &QubitPartition::first_vs_rest(3).unwrap()).unwrap();
        assert!((v.value - c).abs() < 1e-12);

        let ac = density_of(&ex1()).partial_trace_factors(&[0, 2]).unwrap();
        assert!((cren_two_by_d(&ac, &cfg).unwrap().value - 4.0 / 9.0).abs() < 1e-12);

        let bad = DensityMatrix::maximally_mixed(vec![4, 2]).unwrap();
        assert!(matches!(cren_two_by_d(&bad, &cfg), Err(Error::WrongDimensions { .. })));
    }

    #[test]
    fn measure_kind_parsing() {
        assert_eq!("EoF".parse::<MeasureKind>().unwrap(), MeasureKind::Eof);
        assert!("tsallis".parse::<MeasureKind>().is_err());
    }
}
