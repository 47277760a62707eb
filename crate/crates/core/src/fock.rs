//! Truncated number-basis backend.
//!
//! Dense complex tensors over per-mode photon-number cutoffs. This backend
//! carries the non-Gaussian operations (squeezing, Kerr evolution, photon
//! subtraction) and doubles as an independent oracle for the coherent-label
//! algebra: every operation the two backends share is cross-checked in the
//! test suite.

use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayD, Dimension, IxDyn};
use num_complex::Complex64 as C64;

use crate::coherent::{fock_amplitude, BsConvention, Parity, SuperposedState};
use crate::error::{Error, Result};
use crate::linalg;

/// Tail probability allowance and cutoff for a truncated representation.
#[derive(Debug, Clone, Copy)]
pub struct TruncationBudget {
    pub epsilon: f64,
    pub n_max: usize,
}

impl TruncationBudget {
    pub fn new(epsilon: f64, n_max: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) || epsilon == 0.0 || n_max == 0 {
            return Err(Error::CutoffOverflow {
                tail: epsilon,
                epsilon,
            });
        }
        Ok(TruncationBudget { epsilon, n_max })
    }

    /// Budget for coherent amplitudes up to `max_amp` (optionally squeezed by
    /// up to `s_max`) at the default ε = 1e-12.
    pub fn for_amplitude(max_amp: f64, s_max: f64) -> Self {
        let eps = 1e-12;
        TruncationBudget {
            epsilon: eps,
            n_max: choose_cutoff(max_amp, s_max, eps),
        }
    }
}

/// Smallest cutoff n_max such that a coherent state of amplitude
/// `max_amp·e^{s_max}` has Poisson tail mass beyond n_max below `epsilon`.
pub fn choose_cutoff(max_amp: f64, s_max: f64, epsilon: f64) -> usize {
    let amp = max_amp.abs() * s_max.exp();
    let lambda = amp * amp;
    if lambda == 0.0 {
        return 1;
    }
    // Start from the closed-form envelope, then walk down by exact tail sums.
    let guess = (lambda + 10.0 * (lambda + 1.0).sqrt() + 10.0).ceil() as usize;
    let mut n = guess;
    while n > 1 && linalg::poisson_tail(lambda, n - 1) < epsilon {
        n -= 1;
    }
    while linalg::poisson_tail(lambda, n) >= epsilon {
        n += 1;
    }
    n.max(1)
}

/// Dense truncated number-basis amplitude tensor over one or more modes.
#[derive(Debug, Clone)]
pub struct FockVector {
    cutoffs: Vec<usize>,
    amps: ArrayD<C64>,
}

impl FockVector {
    pub fn zeros(cutoffs: &[usize]) -> Self {
        let shape: Vec<usize> = cutoffs.iter().map(|&c| c + 1).collect();
        FockVector {
            cutoffs: cutoffs.to_vec(),
            amps: ArrayD::zeros(IxDyn(&shape)),
        }
    }

    pub fn vacuum(cutoffs: &[usize]) -> Self {
        let mut f = Self::zeros(cutoffs);
        f.amps[IxDyn(&vec![0; cutoffs.len()])] = C64::from(1.0);
        f
    }

    /// Single-mode number state |n⟩.
    pub fn number_state(n: usize, cutoff: usize) -> Self {
        assert!(n <= cutoff);
        let mut f = Self::zeros(&[cutoff]);
        f.amps[IxDyn(&[n])] = C64::from(1.0);
        f
    }

    pub fn mode_count(&self) -> usize {
        self.cutoffs.len()
    }

    pub fn cutoffs(&self) -> &[usize] {
        &self.cutoffs
    }

    pub fn amps(&self) -> &ArrayD<C64> {
        &self.amps
    }

    pub fn amp(&self, idx: &[usize]) -> C64 {
        self.amps[IxDyn(idx)]
    }

    pub fn set_amp(&mut self, idx: &[usize], v: C64) {
        self.amps[IxDyn(idx)] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<FockVector> {
        let n = self.norm();
        if n < 1e-150 {
            return Err(Error::ZeroNorm);
        }
        let mut out = self.clone();
        out.amps.mapv_inplace(|z| z / n);
        Ok(out)
    }

    pub fn scaled(mut self, factor: C64) -> FockVector {
        self.amps.mapv_inplace(|z| z * factor);
        self
    }

    pub fn inner(&self, other: &FockVector) -> Result<C64> {
        if self.cutoffs != other.cutoffs {
            return Err(Error::ModeCountMismatch {
                left: self.mode_count(),
                right: other.mode_count(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn add(&self, other: &FockVector) -> Result<FockVector> {
        if self.cutoffs != other.cutoffs {
            return Err(Error::ModeCountMismatch {
                left: self.mode_count(),
                right: other.mode_count(),
            });
        }
        let mut out = self.clone();
        out.amps += &other.amps;
        Ok(out)
    }

    pub fn tensor(&self, other: &FockVector) -> FockVector {
        let mut cutoffs = self.cutoffs.clone();
        cutoffs.extend_from_slice(&other.cutoffs);
        let mut out = FockVector::zeros(&cutoffs);
        let d_other: usize = other.amps.len();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in other.amps.iter().enumerate() {
                out.amps.as_slice_mut().unwrap()[i * d_other + j] = a * b;
            }
        }
        out
    }

    /// Probability mass with photon number above `cutoff - band` on `mode`.
    pub fn top_band_mass(&self, mode: usize, band: usize) -> f64 {
        let cutoff = self.cutoffs[mode];
        let lo = cutoff.saturating_sub(band) + 1;
        let mut mass = 0.0;
        for (idx, z) in self.amps.indexed_iter() {
            if idx[mode] >= lo {
                mass += z.norm_sqr();
            }
        }
        mass
    }

    /// Apply a per-photon-number complex factor on one mode.
    pub fn apply_diagonal(&self, mode: usize, f: impl Fn(usize) -> C64) -> Result<FockVector> {
        self.check_mode(mode)?;
        let mut out = self.clone();
        for (idx, z) in out.amps.indexed_iter_mut() {
            *z *= f(idx[mode]);
        }
        Ok(out)
    }

    /// Apply a (cutoff+1)² single-mode matrix to `mode`.
    pub fn apply_single_mode_matrix(&self, mode: usize, m: &DMatrix<C64>) -> Result<FockVector> {
        self.check_mode(mode)?;
        let d = self.cutoffs[mode] + 1;
        assert_eq!(m.nrows(), d);
        let mut out = FockVector::zeros(&self.cutoffs);
        // Iterate over all indices of the other modes; contract along `mode`.
        let mut idx = vec![0usize; self.mode_count()];
        loop {
            for row in 0..d {
                let mut acc = C64::from(0.0);
                for col in 0..d {
                    idx[mode] = col;
                    let a = self.amps[IxDyn(&idx)];
                    if a.norm_sqr() > 0.0 {
                        acc += m[(row, col)] * a;
                    }
                }
                idx[mode] = row;
                out.amps[IxDyn(&idx)] = acc;
            }
            idx[mode] = 0;
            if !advance_index(&mut idx, &self.cutoffs, mode) {
                break;
            }
        }
        Ok(out)
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count() {
            return Err(Error::InvalidMode {
                mode,
                mode_count: self.mode_count(),
            });
        }
        Ok(())
    }

    /// Contract one mode with a bra vector of length cutoff+1; the mode is removed.
    pub fn contract_mode(&self, mode: usize, bra: &[C64]) -> Result<FockVector> {
        self.check_mode(mode)?;
        let d = self.cutoffs[mode] + 1;
        assert_eq!(bra.len(), d);
        let mut rest: Vec<usize> = self.cutoffs.clone();
        rest.remove(mode);
        let mut out = FockVector::zeros(&rest);
        for (idx, z) in self.amps.indexed_iter() {
            if z.norm_sqr() == 0.0 {
                continue;
            }
            let n = idx[mode];
            let mut ridx: Vec<usize> = idx.slice().to_vec();
            ridx.remove(mode);
            out.amps[IxDyn(&ridx)] += bra[n].conj() * z;
        }
        Ok(out)
    }

    /// Zero out all amplitudes whose photon number on `mode` has the wrong parity.
    pub fn project_parity_unnormalized(&self, mode: usize, parity: Parity) -> Result<FockVector> {
        self.apply_diagonal(mode, |n| {
            if Parity::of(n) == parity {
                C64::from(1.0)
            } else {
                C64::from(0.0)
            }
        })
    }

    /// Zero out the vacuum slice of `mode` (the projector I - |0⟩⟨0|).
    pub fn project_click_unnormalized(&self, mode: usize) -> Result<FockVector> {
        self.apply_diagonal(mode, |n| {
            if n == 0 {
                C64::from(0.0)
            } else {
                C64::from(1.0)
            }
        })
    }
}

fn advance_index(idx: &mut [usize], cutoffs: &[usize], skip: usize) -> bool {
    for m in (0..idx.len()).rev() {
        if m == skip {
            continue;
        }
        if idx[m] < cutoffs[m] {
            idx[m] += 1;
            return true;
        }
        idx[m] = 0;
    }
    false
}

/// Column of ⟨n|β⟩ values for n = 0..=cutoff.
pub fn coherent_column(beta: C64, cutoff: usize) -> Vec<C64> {
    (0..=cutoff).map(|n| fock_amplitude(beta, n)).collect()
}

/// Expand a coherent-label superposition into the truncated number basis.
///
/// Errors if any label's Poisson tail beyond the budget cutoff exceeds ε.
pub fn to_fock(state: &SuperposedState, budget: TruncationBudget) -> Result<FockVector> {
    let cutoffs = vec![budget.n_max; state.mode_count()];
    let mut out = FockVector::zeros(&cutoffs);
    for (c, label) in state.terms() {
        for amp in &label.0 {
            let tail = linalg::poisson_tail(amp.norm_sqr(), budget.n_max);
            if tail > budget.epsilon {
                return Err(Error::BudgetExceeded {
                    amplitude: format!("{amp}"),
                    tail,
                    epsilon: budget.epsilon,
                });
            }
        }
        let columns: Vec<Vec<C64>> = label
            .0
            .iter()
            .map(|&a| coherent_column(a, budget.n_max))
            .collect();
        for (idx, z) in out.amps.indexed_iter_mut() {
            let mut product = *c;
            for (m, col) in columns.iter().enumerate() {
                product *= col[idx[m]];
            }
            *z += product;
        }
    }
    Ok(out)
}

/// |⟨f1|f2⟩|² / (‖f1‖²‖f2‖²).
pub fn fock_fidelity(f1: &FockVector, f2: &FockVector) -> Result<f64> {
    let n1 = f1.norm_sqr();
    let n2 = f2.norm_sqr();
    if n1 < 1e-300 || n2 < 1e-300 {
        return Err(Error::ZeroNorm);
    }
    Ok(f1.inner(f2)?.norm_sqr() / (n1 * n2))
}

/// Matrix of the single-mode squeezing unitary S(s) = exp[(s/2)(a†² - a²)]
/// on the truncated space.
///
/// With this sign, S(s)|0⟩ has Fock coefficients ∝ (+tanh s)^n, the
/// convention under which a squeezed single photon approximates an odd cat.
pub fn squeeze_matrix(cutoff: usize, s: f64) -> DMatrix<C64> {
    let d = cutoff + 1;
    let mut gen = DMatrix::<C64>::zeros(d, d);
    for n in 0..d.saturating_sub(2) {
        let elem = 0.5 * s * (((n + 1) * (n + 2)) as f64).sqrt();
        gen[(n + 2, n)] = C64::from(elem); // a†² side
        gen[(n, n + 2)] = C64::from(-elem); // -a² side
    }
    linalg::expm(&gen)
}

/// Matrix of the displacement unitary D(δ) = exp(δa† - δ̄a) on the truncated space.
pub fn displacement_matrix(cutoff: usize, delta: C64) -> DMatrix<C64> {
    let d = cutoff + 1;
    let mut gen = DMatrix::<C64>::zeros(d, d);
    for n in 0..d - 1 {
        let root = ((n + 1) as f64).sqrt();
        gen[(n + 1, n)] = delta * root;
        gen[(n, n + 1)] = -delta.conj() * root;
    }
    linalg::expm(&gen)
}

/// Apply S(s) to one mode. Errors if more than ε of probability lands in the
/// top two levels of the cutoff afterwards.
pub fn apply_squeeze(f: &FockVector, mode: usize, s: f64) -> Result<FockVector> {
    let out = f.apply_single_mode_matrix(mode, &squeeze_matrix(f.cutoffs()[mode], s))?;
    let tail = out.top_band_mass(mode, 2);
    let epsilon = 1e-9;
    if tail > epsilon * out.norm_sqr().max(1e-300) {
        return Err(Error::CutoffOverflow { tail, epsilon });
    }
    Ok(out)
}

/// Apply D(δ) to one mode with the same top-band overflow check as squeezing.
pub fn apply_fock_displacement(f: &FockVector, mode: usize, delta: C64) -> Result<FockVector> {
    let out = f.apply_single_mode_matrix(mode, &displacement_matrix(f.cutoffs()[mode], delta))?;
    let tail = out.top_band_mass(mode, 2);
    let epsilon = 1e-9;
    if tail > epsilon * out.norm_sqr().max(1e-300) {
        return Err(Error::CutoffOverflow { tail, epsilon });
    }
    Ok(out)
}

/// Phase shifter on one mode: amp(n) multiplied by e^{iφn}.
pub fn apply_fock_phase_shift(f: &FockVector, mode: usize, phi: f64) -> Result<FockVector> {
    f.apply_diagonal(mode, |n| C64::new(0.0, phi * n as f64).exp())
}

/// Unnormalized lowering operator: amp(n-1) += √n · amp(n).
pub fn apply_annihilate(f: &FockVector, mode: usize) -> Result<FockVector> {
    let cutoff = f.cutoffs()[mode];
    let mut gen = DMatrix::<C64>::zeros(cutoff + 1, cutoff + 1);
    for n in 1..=cutoff {
        gen[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    f.apply_single_mode_matrix(mode, &gen)
}

/// Kerr-type diagonal evolution: amp(n) multiplied by exp[i(ω_τ·n + λ_τ·n²)].
///
/// The phase sign is fixed so that evolving |α⟩ for λτ = π/N reproduces the
/// N-component circular superposition with coefficients
/// C_{n,N} = (1/N) Σ_k (-1)^k exp[-(iπk/N)(2n-k)].
pub fn kerr_evolve(f: &FockVector, mode: usize, lambda_tau: f64, omega_tau: f64) -> Result<FockVector> {
    f.apply_diagonal(mode, |n| {
        let n = n as f64;
        C64::new(0.0, omega_tau * n + lambda_tau * n * n).exp()
    })
}

/// Two-mode beam splitter applied blockwise on total-photon-number subspaces,
/// so photon number is conserved exactly.
pub fn fock_beam_splitter(
    f: &FockVector,
    modes: (usize, usize),
    theta: f64,
    convention: BsConvention,
) -> Result<FockVector> {
    let (i, j) = modes;
    if i >= f.mode_count() || j >= f.mode_count() || i == j {
        return Err(Error::InvalidMode {
            mode: j,
            mode_count: f.mode_count(),
        });
    }
    let (di, dj) = (f.cutoffs()[i] + 1, f.cutoffs()[j] + 1);

    // Per-block unitaries e^{G_N} for N = n_i + n_j, basis k = n_i within block.
    let mut blocks: Vec<DMatrix<C64>> = Vec::with_capacity(di + dj - 1);
    for total in 0..(di + dj - 1) {
        let k_lo = total.saturating_sub(dj - 1);
        let k_hi = total.min(di - 1);
        let size = k_hi + 1 - k_lo;
        let mut gen = DMatrix::<C64>::zeros(size, size);
        for (row, k) in (k_lo..k_hi).enumerate() {
            // ⟨k+1, N-k-1| a†b |k, N-k⟩ = sqrt((k+1)(N-k))
            let elem = 0.5 * theta * (((k + 1) * (total - k)) as f64).sqrt();
            match convention {
                // exp[(θ/2)(a†b - ab†)]
                BsConvention::Real => {
                    gen[(row + 1, row)] = C64::from(elem);
                    gen[(row, row + 1)] = C64::from(-elem);
                }
                // exp[i(θ/2)(ab† + a†b)]
                BsConvention::Phase => {
                    gen[(row + 1, row)] = C64::new(0.0, elem);
                    gen[(row, row + 1)] = C64::new(0.0, elem);
                }
            }
        }
        blocks.push(linalg::expm(&gen));
    }

    let mut out = FockVector::zeros(f.cutoffs());
    let mut idx = vec![0usize; f.mode_count()];
    // Walk every configuration of the spectator modes.
    loop {
        for total in 0..(di + dj - 1) {
            let k_lo = total.saturating_sub(dj - 1);
            let k_hi = total.min(di - 1);
            let block = &blocks[total];
            let size = k_hi + 1 - k_lo;
            let mut vin = DVector::<C64>::zeros(size);
            for (row, k) in (k_lo..=k_hi).enumerate() {
                idx[i] = k;
                idx[j] = total - k;
                vin[row] = f.amps[IxDyn(&idx)];
            }
            let vout = block * vin;
            for (row, k) in (k_lo..=k_hi).enumerate() {
                idx[i] = k;
                idx[j] = total - k;
                out.amps[IxDyn(&idx)] = vout[row];
            }
        }
        idx[i] = 0;
        idx[j] = 0;
        if !advance_two_skip(&mut idx, f.cutoffs(), i, j) {
            break;
        }
    }
    Ok(out)
}

fn advance_two_skip(idx: &mut [usize], cutoffs: &[usize], skip_a: usize, skip_b: usize) -> bool {
    for m in (0..idx.len()).rev() {
        if m == skip_a || m == skip_b {
            continue;
        }
        if idx[m] < cutoffs[m] {
            idx[m] += 1;
            return true;
        }
        idx[m] = 0;
    }
    false
}

/// Fock-side ⟨n| projection; returns reduced state and outcome probability.
pub fn fock_project_number(f: &FockVector, mode: usize, n: usize) -> Result<(FockVector, f64)> {
    let mut bra = vec![C64::from(0.0); f.cutoffs()[mode] + 1];
    bra[n] = C64::from(1.0);
    let reduced = f.contract_mode(mode, &bra)?;
    let prob = reduced.norm_sqr() / f.norm_sqr();
    Ok((reduced.normalized()?, prob))
}

/// Fock-side homodyne conditioning at X = x; returns reduced state and density.
pub fn fock_project_homodyne(f: &FockVector, mode: usize, x: f64) -> Result<(FockVector, f64)> {
    let bra: Vec<C64> = (0..=f.cutoffs()[mode])
        .map(|n| C64::from(linalg::hermite_function(n, x)))
        .collect();
    let reduced = f.contract_mode(mode, &bra)?;
    let density = reduced.norm_sqr() / f.norm_sqr();
    Ok((reduced.normalized()?, density))
}

/// Single-mode density matrix of `kept`, conditioned on every mode in
/// `clicked` seeing at least one photon and every mode in `vacuum` seeing
/// none; all modes but `kept` are traced out. Returns the unnormalized
/// density and the event probability (assuming `f` is normalized).
pub fn click_conditioned_density(
    f: &FockVector,
    kept: usize,
    clicked: &[usize],
    vacuum: &[usize],
) -> Result<(DMatrix<C64>, f64)> {
    let d = f.cutoffs()[kept] + 1;
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for (idx, z) in f.amps.indexed_iter() {
        if z.norm_sqr() == 0.0 {
            continue;
        }
        if clicked.iter().any(|&m| idx[m] == 0) || vacuum.iter().any(|&m| idx[m] != 0) {
            continue;
        }
        // Accumulate |ψ⟩⟨ψ| over the conditioned configurations: group by
        // every index except `kept`.
        let a = idx[kept];
        for b in 0..d {
            let mut jdx: Vec<usize> = idx.slice().to_vec();
            jdx[kept] = b;
            let w = f.amps[IxDyn(&jdx)];
            if w.norm_sqr() > 0.0 {
                rho[(a, b)] += z * w.conj();
            }
        }
    }
    let prob = rho.trace().re;
    Ok((rho, prob))
}

/// Weighted pure branches of a Hermitian single-mode density matrix,
/// discarding eigenvalues at or below `tol`.
pub fn density_branches(rho: &DMatrix<C64>, tol: f64) -> Vec<(f64, FockVector)> {
    let cutoff = rho.nrows() - 1;
    linalg::dominant_branches(rho, tol)
        .into_iter()
        .map(|(w, v)| {
            let mut f = FockVector::zeros(&[cutoff]);
            for n in 0..=cutoff {
                f.set_amp(&[n], v[n]);
            }
            (w, f)
        })
        .collect()
}

/// ⟨ψ|ρ|ψ⟩ / tr(ρ) for a normalized single-mode |ψ⟩.
pub fn density_fidelity(rho: &DMatrix<C64>, psi: &FockVector) -> f64 {
    let d = rho.nrows();
    let v = DVector::<C64>::from_fn(d, |n, _| psi.amp(&[n]));
    let num = (v.adjoint() * rho * &v)[(0, 0)].re;
    num / rho.trace().re
}

/// Amplitude-damping Kraus operators for loss parameter λ = 1 - e^{-γτ},
/// applied to a dense multimode density matrix (modes all share `cutoff`).
///
/// K_j has elements ⟨n-j|K_j|n⟩ = sqrt(C(n,j)) t^{n-j} λ^{j/2} with t² = 1-λ.
pub fn amplitude_damp_density(
    rho: &DMatrix<C64>,
    mode_count: usize,
    cutoff: usize,
    gamma_tau: f64,
) -> DMatrix<C64> {
    let d = cutoff + 1;
    let lambda = 1.0 - (-gamma_tau).exp();
    let t = (1.0 - lambda).sqrt();
    // Single-mode Kraus set.
    let mut kraus: Vec<DMatrix<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut k = DMatrix::<C64>::zeros(d, d);
        for n in j..d {
            let ln_binom = linalg::ln_factorial(n)
                - linalg::ln_factorial(j)
                - linalg::ln_factorial(n - j);
            let mag = (0.5 * ln_binom).exp()
                * t.powi((n - j) as i32)
                * lambda.powf(j as f64 / 2.0);
            k[(n - j, n)] = C64::from(mag);
        }
        kraus.push(k);
    }
    let mut out = rho.clone();
    for mode in 0..mode_count {
        let mut acc = DMatrix::<C64>::zeros(out.nrows(), out.ncols());
        for k in &kraus {
            let full = embed_single_mode(k, mode, mode_count, d);
            acc += &full * &out * full.adjoint();
        }
        out = acc;
    }
    out
}

fn embed_single_mode(k: &DMatrix<C64>, mode: usize, mode_count: usize, d: usize) -> DMatrix<C64> {
    let total = d.pow(mode_count as u32);
    let stride = d.pow((mode_count - 1 - mode) as u32);
    let mut out = DMatrix::<C64>::zeros(total, total);
    for row in 0..total {
        let r_mode = (row / stride) % d;
        let base = row - r_mode * stride;
        for c_mode in 0..d {
            let v = k[(r_mode, c_mode)];
            if v.norm_sqr() > 0.0 {
                out[(row, base + c_mode * stride)] = v;
            }
        }
    }
    out
}

/// Dense density matrix of a multimode Fock vector (all modes share a cutoff).
pub fn pure_density(f: &FockVector) -> DMatrix<C64> {
    let total = f.amps.len();
    let flat: Vec<C64> = f.amps.iter().cloned().collect();
    DMatrix::from_fn(total, total, |r, c| flat[r] * flat[c].conj())
}
