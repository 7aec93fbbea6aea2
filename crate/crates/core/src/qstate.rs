//! Pure and mixed states on small qubit registers.
//!
//! Qubit 0 is the leftmost tensor factor and the most significant bit of a
//! basis index, so `|q0 q1 … q(n-1)⟩` has index `q0·2^(n-1) + … + q(n-1)`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C0, PSD_SLACK};
use crate::rng;

pub const MAX_QUBITS: usize = 12;
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_register(n_qubits)?;
        let expected = 1usize << n_qubits;
        if amplitudes.len() != expected {
            return Err(Error::BadLength {
                expected,
                got: amplitudes.len(),
            });
        }
        let norm = linalg::vec_norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(PureState {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm. Fails on the zero vector.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = linalg::vec_norm_sqr(&amplitudes).sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized(norm * norm));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(n_qubits, amplitudes)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![C0; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self::new(n_qubits, amps)
    }

    pub fn ghz(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps = vec![C0; dim];
        amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[dim - 1] = amps[0];
        Self::new(n_qubits, amps)
    }

    /// `(|10…0⟩ + |01…0⟩ + … + |0…01⟩)/√n`
    pub fn w(n_qubits: usize) -> Result<Self> {
        check_register(n_qubits)?;
        let dim = 1usize << n_qubits;
        let mut amps = vec![C0; dim];
        let a = Complex64::new(1.0 / (n_qubits as f64).sqrt(), 0.0);
        for q in 0..n_qubits {
            amps[1 << (n_qubits - 1 - q)] = a;
        }
        Self::new(n_qubits, amps)
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn bell_phi_plus() -> Self {
        Self::ghz(2).expect("two qubits is a valid register")
    }

    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let n = self.n_qubits + other.n_qubits;
        check_register(n)?;
        let amps = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::normalized(n, amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Applies a unitary acting on a single qubit.
    pub fn apply_single_qubit(&self, qubit: usize, u: &CMat) -> Result<Self> {
        if qubit >= self.n_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                len: self.n_qubits,
            });
        }
        let bit = 1usize << (self.n_qubits - 1 - qubit);
        let mut out = self.amplitudes.clone();
        for i in 0..self.dim() {
            if i & bit == 0 {
                let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | bit]);
                out[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                out[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
        Self::normalized(self.n_qubits, out)
    }

    /// Reshapes the amplitudes into a `d_A × d_B` coefficient matrix with the
    /// `side_a` qubits as the row index (in increasing qubit order).
    pub fn coefficient_matrix(&self, cut: &QubitPartition) -> Result<CMat> {
        cut.check_register(self.n_qubits)?;
        let perm: Vec<usize> = cut.side_a().iter().chain(cut.side_b()).copied().collect();
        let permuted = permute_qubit_amplitudes(&self.amplitudes, self.n_qubits, &perm);
        let da = 1usize << cut.side_a().len();
        let db = 1usize << cut.side_b().len();
        CMat::from_rows(da, db, permuted)
    }
}

fn check_register(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(Error::InvalidParameter("register needs at least one qubit".into()));
    }
    if n_qubits > MAX_QUBITS {
        return Err(Error::DimensionTooLarge(n_qubits));
    }
    Ok(())
}

/// Reorders qubits so that new qubit `k` is old qubit `perm[k]`.
pub(crate) fn permute_qubit_amplitudes(
    amps: &[Complex64],
    n: usize,
    perm: &[usize],
) -> Vec<Complex64> {
    let dims = vec![2; n];
    permute_factors_vec(amps, &dims, perm)
}

/// Reorders tensor factors of a vector: new factor `k` is old factor `perm[k]`.
pub(crate) fn permute_factors_vec(v: &[Complex64], dims: &[usize], perm: &[usize]) -> Vec<Complex64> {
    let new_dims: Vec<usize> = perm.iter().map(|&k| dims[k]).collect();
    let mut out = vec![C0; v.len()];
    let mut old_digits = vec![0usize; dims.len()];
    for (new_index, slot) in out.iter_mut().enumerate() {
        let new_digits = to_digits(new_index, &new_dims);
        for (k, &p) in perm.iter().enumerate() {
            old_digits[p] = new_digits[k];
        }
        *slot = v[from_digits(&old_digits, dims)];
    }
    out
}

fn to_digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
    digits
}

fn from_digits(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// A bipartition of factor indices `0..n` into two nonempty sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitPartition {
    n: usize,
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl QubitPartition {
    pub fn new(n: usize, side_a: &[usize]) -> Result<Self> {
        let set: BTreeSet<usize> = side_a.iter().copied().collect();
        if set.len() != side_a.len() {
            return Err(Error::InvalidPartition(format!("duplicate indices in {side_a:?}")));
        }
        if let Some(&bad) = set.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        if set.is_empty() || set.len() == n {
            return Err(Error::InvalidPartition(format!(
                "side A {side_a:?} must be a nonempty proper subset of 0..{n}"
            )));
        }
        let side_b = (0..n).filter(|i| !set.contains(i)).collect();
        Ok(QubitPartition {
            n,
            side_a: set.into_iter().collect(),
            side_b,
        })
    }

    /// `{0} | {1, …, n−1}`: party A against everyone else.
    pub fn first_vs_rest(n: usize) -> Result<Self> {
        Self::new(n, &[0])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    fn check_register(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::InvalidPartition(format!(
                "partition over {} factors applied to {n}",
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: CMat,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within 1e-10).
    pub fn new(dims: Vec<usize>, matrix: CMat) -> Result<Self> {
        check_dims(&dims, &matrix)?;
        let dev = matrix.hermitian_deviation();
        if dev > NORM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = linalg::eigvalsh(&matrix).last().copied().unwrap_or(0.0);
        if min < -PSD_SLACK {
            return Err(Error::NotPsd(min));
        }
        Ok(DensityMatrix { dims, matrix })
    }

    pub(crate) fn from_parts_unchecked(dims: Vec<usize>, matrix: CMat) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.rows());
        DensityMatrix { dims, matrix }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let side: usize = dims.iter().product();
        let m = CMat::from_real_diag(&vec![1.0 / side as f64; side]);
        Self::new(dims, m)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn side(&self) -> usize {
        self.matrix.rows()
    }

    /// Reinterprets the factor structure, e.g. three qubits as `2 ⊗ 4`.
    pub fn regroup(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, &self.matrix)?;
        Ok(DensityMatrix {
            dims,
            matrix: self.matrix.clone(),
        })
    }

    /// Merges every factor after the first into one, giving a `d_0 ⊗ rest` view.
    pub fn as_first_vs_rest(&self) -> Self {
        let rest: usize = self.dims[1..].iter().product();
        DensityMatrix {
            dims: vec![self.dims[0], rest],
            matrix: self.matrix.clone(),
        }
    }

    /// Convex mixture `p·self + (1−p)·other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.dims, other.dims)));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain { value: p, domain: "[0, 1]" });
        }
        let m = &self.matrix.scale(p.into()) + &other.matrix.scale((1.0 - p).into());
        Ok(DensityMatrix::from_parts_unchecked(self.dims.clone(), m))
    }

    /// Conjugation `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMat) -> Result<Self> {
        if u.rows() != self.side() || !u.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} unitary on side {}",
                u.rows(),
                u.cols(),
                self.side()
            )));
        }
        let m = &(u * &self.matrix) * &u.adjoint();
        Ok(DensityMatrix::from_parts_unchecked(self.dims.clone(), m))
    }

    /// Reduced state on the factors listed in `keep`, in increasing order.
    pub fn partial_trace_factors(&self, keep: &[usize]) -> Result<Self> {
        let nf = self.dims.len();
        let keep: BTreeSet<usize> = keep.iter().copied().collect();
        if let Some(&bad) = keep.iter().find(|&&k| k >= nf) {
            return Err(Error::IndexOutOfRange { index: bad, len: nf });
        }
        if keep.is_empty() {
            return Err(Error::InvalidPartition("nothing to keep".into()));
        }
        let kept: Vec<usize> = keep.iter().copied().collect();
        let traced: Vec<usize> = (0..nf).filter(|k| !keep.contains(k)).collect();
        let kept_dims: Vec<usize> = kept.iter().map(|&k| self.dims[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        let mut digits = vec![0usize; nf];
        let mut index_of = |kd: &[usize], td: &[usize]| {
            for (slot, &k) in kept.iter().enumerate() {
                digits[k] = kd[slot];
            }
            for (slot, &k) in traced.iter().enumerate() {
                digits[k] = td[slot];
            }
            from_digits(&digits, &self.dims)
        };
        // full index for every (kept, traced) pair
        let mut table = vec![0usize; dk * dt];
        for i in 0..dk {
            let kd = to_digits(i, &kept_dims);
            for t in 0..dt {
                let td = to_digits(t, &traced_dims);
                table[i * dt + t] = index_of(&kd, &td);
            }
        }
        let out = CMat::from_fn(dk, dk, |i, j| {
            (0..dt)
                .map(|t| self.matrix[(table[i * dt + t], table[j * dt + t])])
                .sum()
        });
        Ok(DensityMatrix::from_parts_unchecked(kept_dims, out))
    }

    /// Reduced state on side A of `keep`.
    pub fn partial_trace(&self, keep: &QubitPartition) -> Result<Self> {
        keep.check_register(self.dims.len())?;
        self.partial_trace_factors(keep.side_a())
    }

    /// Transposes the indices of one tensor factor.
    pub fn partial_transpose(&self, factor: usize) -> Result<CMat> {
        let nf = self.dims.len();
        if factor >= nf {
            return Err(Error::IndexOutOfRange { index: factor, len: nf });
        }
        let n = self.side();
        let mut out = CMat::zeros(n, n);
        for i in 0..n {
            let di = to_digits(i, &self.dims);
            for j in 0..n {
                let dj = to_digits(j, &self.dims);
                let (mut si, mut sj) = (di.clone(), dj.clone());
                si[factor] = dj[factor];
                sj[factor] = di[factor];
                out[(from_digits(&si, &self.dims), from_digits(&sj, &self.dims))] =
                    self.matrix[(i, j)];
            }
        }
        Ok(out)
    }

    /// Reorders tensor factors: new factor `k` is old factor `perm[k]`.
    pub fn permute_factors(&self, perm: &[usize]) -> Result<Self> {
        let nf = self.dims.len();
        let mut seen = vec![false; nf];
        if perm.len() != nf || perm.iter().any(|&p| p >= nf || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidPartition(format!("{perm:?} is not a permutation of 0..{nf}")));
        }
        let new_dims: Vec<usize> = perm.iter().map(|&k| self.dims[k]).collect();
        let n = self.side();
        let map: Vec<usize> = {
            let mut old = vec![0usize; nf];
            (0..n)
                .map(|new_index| {
                    let nd = to_digits(new_index, &new_dims);
                    for (k, &p) in perm.iter().enumerate() {
                        old[p] = nd[k];
                    }
                    from_digits(&old, &self.dims)
                })
                .collect()
        };
        let m = CMat::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        Ok(DensityMatrix::from_parts_unchecked(new_dims, m))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvalsh(&self.matrix)
    }
}

fn check_dims(dims: &[usize], m: &CMat) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.rows(), m.cols()));
    }
    if dims.is_empty() || dims.iter().any(|&d| d < 2) || dims.iter().product::<usize>() != m.rows() {
        return Err(Error::DimsMismatch {
            dims: dims.to_vec(),
            side: m.rows(),
        });
    }
    Ok(())
}

/// Schmidt weights λ₀…λ₄ and phase φ of the three-qubit generalized Schmidt
/// state built by [`make_gsd_state`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsdParams {
    pub lambda: [f64; 5],
    pub phi: f64,
}

/// Normalization slack accepted when building a GSD state.
pub const GSD_NORM_TOL: f64 = 1e-8;

impl GsdParams {
    pub fn new(lambda: [f64; 5], phi: f64) -> Result<Self> {
        if let Some(bad) = lambda.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(Error::InvalidParameter(format!("lambda {bad}")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phi {phi}")));
        }
        let s: f64 = lambda.iter().map(|l| l * l).sum();
        if (s - 1.0).abs() > GSD_NORM_TOL {
            return Err(Error::InvalidNormalization(s));
        }
        Ok(GsdParams {
            lambda,
            phi: phi.rem_euclid(TAU),
        })
    }

    /// `C_{A|BC} = 2λ₀√(λ₂²+λ₃²+λ₄²)`
    pub fn closed_form_c_a_bc(&self) -> f64 {
        let l = &self.lambda;
        2.0 * l[0] * (l[2] * l[2] + l[3] * l[3] + l[4] * l[4]).sqrt()
    }

    /// `C_AB = 2λ₀λ₂`
    pub fn closed_form_c_ab(&self) -> f64 {
        2.0 * self.lambda[0] * self.lambda[2]
    }

    /// `C_AC = 2λ₀λ₃`
    pub fn closed_form_c_ac(&self) -> f64 {
        2.0 * self.lambda[0] * self.lambda[3]
    }
}

/// Builds the three-qubit generalized Schmidt state.
///
/// λ₂ weights the component where A and B are excited (`|110⟩`) and λ₃ the
/// one where A and C are (`|101⟩`), so that the AB pair carries `2λ₀λ₂` and
/// the AC pair `2λ₀λ₃` with B = qubit 1 and C = qubit 2.
pub fn make_gsd_state(params: &GsdParams) -> Result<PureState> {
    let p = GsdParams::new(params.lambda, params.phi)?;
    let l = p.lambda;
    let mut amps = vec![C0; 8];
    amps[0b000] = l[0].into();
    amps[0b100] = Complex64::from_polar(l[1], p.phi);
    amps[0b110] = l[2].into();
    amps[0b101] = l[3].into();
    amps[0b111] = l[4].into();
    PureState::normalized(3, amps)
}

/// Haar-random pure state: `2^n` i.i.d. standard complex Gaussians, normalized.
pub fn haar_random_pure(n_qubits: usize, seed: u64) -> Result<PureState> {
    let mut rng = rng::stream(seed, 0);
    haar_random_pure_with(n_qubits, &mut rng)
}

pub fn haar_random_pure_with(n_qubits: usize, rng: &mut ChaCha20Rng) -> Result<PureState> {
    check_register(n_qubits)?;
    let amps = gaussian_vector(1usize << n_qubits, rng);
    PureState::normalized(n_qubits, amps)
}

pub(crate) fn gaussian_vector(len: usize, rng: &mut ChaCha20Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        })
        .collect()
}

/// Haar-random `n × n` unitary via Gram–Schmidt on a Ginibre matrix.
pub fn haar_unitary(n: usize, rng: &mut ChaCha20Rng) -> CMat {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = gaussian_vector(n, rng);
        for c in &cols {
            let overlap: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= overlap * y;
            }
        }
        let norm = linalg::vec_norm_sqr(&v).sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
    }
    CMat::from_fn(n, n, |i, j| cols[j][i])
}

pub fn density_of(psi: &PureState) -> DensityMatrix {
    DensityMatrix::from_parts_unchecked(
        vec![2; psi.n_qubits],
        CMat::outer(&psi.amplitudes, 1.0),
    )
}

pub fn partial_trace(rho: &DensityMatrix, keep: &QubitPartition) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn partial_transpose(rho: &DensityMatrix, transposed_factor: usize) -> Result<CMat> {
    rho.partial_transpose(transposed_factor)
}

pub fn trace_norm(m: &CMat) -> Result<f64> {
    linalg::trace_norm(m)
}

/// Reduced state of a pure state on side A, computed directly from the
/// coefficient matrix.
pub fn reduced_state(psi: &PureState, cut: &QubitPartition) -> Result<DensityMatrix> {
    let m = psi.coefficient_matrix(cut)?;
    let rho = &m * &m.adjoint();
    Ok(DensityMatrix::from_parts_unchecked(vec![2; cut.side_a().len()], rho))
}

/// Squared Schmidt coefficients across `cut`, decreasing, clamped at 0.
/// The sequence has `min(d_A, d_B)` entries.
pub fn schmidt_coefficients(psi: &PureState, cut: &QubitPartition) -> Result<Vec<f64>> {
    let m = psi.coefficient_matrix(cut)?;
    let small = if m.rows() <= m.cols() {
        &m * &m.adjoint()
    } else {
        &m.adjoint() * &m
    };
    Ok(linalg::eigvalsh(&small).into_iter().map(|x| x.max(0.0)).collect())
}

/// `Tr ρ²`
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().as_slice().iter().map(|z| z.norm_sqr()).sum()
}
