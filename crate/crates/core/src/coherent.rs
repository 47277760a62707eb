//! Exact algebra on finite superpositions of multimode coherent states.
//!
//! A state is stored as Σᵢ cᵢ |Lᵢ⟩ where each label Lᵢ is a vector of
//! per-mode complex amplitudes. Inner products reduce to Gram sums of
//! coherent-state overlaps, so every Gaussian-linear operation and every
//! measurement conditioning used by the protocols stays closed over this
//! representation with no truncation anywhere.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Per-mode complex amplitudes of one multimode coherent state |α₁,…,α_M⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentLabel(pub Vec<C64>);

impl CoherentLabel {
    pub fn single(amp: C64) -> Self {
        CoherentLabel(vec![amp])
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn amp(&self, mode: usize) -> C64 {
        self.0[mode]
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &CoherentLabel) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Overlap ⟨a|b⟩ = exp(-|a|²/2 - |b|²/2 + ā·b) of two single-mode coherent states.
pub fn coherent_overlap(a: C64, b: C64) -> C64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

/// Overlap of two multimode labels: the product of the per-mode overlaps.
pub fn label_overlap(a: &CoherentLabel, b: &CoherentLabel) -> C64 {
    debug_assert_eq!(a.mode_count(), b.mode_count());
    a.0.iter()
        .zip(&b.0)
        .map(|(&x, &y)| coherent_overlap(x, y))
        .product()
}

/// Beam-splitter amplitude conventions.
///
/// `Real` maps (γ, β) → (cos(θ/2)γ + sin(θ/2)β, -sin(θ/2)γ + cos(θ/2)β);
/// at θ = π/2 it sends |α⟩|α⟩ → |√2α⟩|0⟩. `Phase` is the i-phase form
/// (γ, β) → (cos(θ/2)γ + i·sin(θ/2)β, cos(θ/2)β + i·sin(θ/2)γ). The two are
/// related by fixed single-mode phase shifts on the second port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsConvention {
    Real,
    Phase,
}

/// Photon-number parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Pure state as a weighted sum of multimode coherent labels.
#[derive(Debug, Clone)]
pub struct SuperposedState {
    mode_count: usize,
    terms: Vec<(C64, CoherentLabel)>,
}

/// Default label-merge tolerance (amplitude distance). Far below any
/// physical separation in use (α ≥ 0.1) yet far above double-precision noise.
pub const MERGE_TOL: f64 = 1e-10;

const NORM_IMAG_TOL: f64 = 1e-12;
const NORM_NEG_TOL: f64 = -1e-9;

impl SuperposedState {
    pub fn new(mode_count: usize, terms: Vec<(C64, CoherentLabel)>) -> Result<Self> {
        for (_, label) in &terms {
            if label.mode_count() != mode_count {
                return Err(Error::ModeCountMismatch {
                    left: mode_count,
                    right: label.mode_count(),
                });
            }
            if label.0.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                return Err(Error::GramInconsistency {
                    value: "non-finite label amplitude".into(),
                });
            }
        }
        Ok(SuperposedState { mode_count, terms })
    }

    /// |0,…,0⟩ on `mode_count` modes.
    pub fn vacuum(mode_count: usize) -> Self {
        SuperposedState {
            mode_count,
            terms: vec![(C64::from(1.0), CoherentLabel(vec![C64::from(0.0); mode_count]))],
        }
    }

    /// Single coherent state |amps⟩ with unit coefficient.
    pub fn coherent(amps: &[C64]) -> Self {
        SuperposedState {
            mode_count: amps.len(),
            terms: vec![(C64::from(1.0), CoherentLabel(amps.to_vec()))],
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn terms(&self) -> &[(C64, CoherentLabel)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            return Err(Error::InvalidMode {
                mode,
                mode_count: self.mode_count,
            });
        }
        Ok(())
    }

    /// ⟨self|other⟩ including all label overlaps.
    pub fn inner(&self, other: &SuperposedState) -> Result<C64> {
        if self.mode_count != other.mode_count {
            return Err(Error::ModeCountMismatch {
                left: self.mode_count,
                right: other.mode_count,
            });
        }
        let mut acc = C64::from(0.0);
        for (c, l) in &self.terms {
            for (d, m) in &other.terms {
                acc += c.conj() * d * label_overlap(l, m);
            }
        }
        Ok(acc)
    }

    /// Squared norm via the Gram matrix, checked to be real non-negative.
    pub fn norm_sqr(&self) -> Result<f64> {
        if self.terms.is_empty() {
            return Err(Error::EmptyState);
        }
        let raw = self.inner(self).expect("same mode count");
        let scale = self
            .terms
            .iter()
            .map(|(c, _)| c.norm_sqr())
            .sum::<f64>()
            .max(1.0);
        if raw.im.abs() > NORM_IMAG_TOL * scale {
            return Err(Error::GramInconsistency {
                value: format!("{raw}"),
            });
        }
        if raw.re < NORM_NEG_TOL * scale {
            return Err(Error::GramInconsistency {
                value: format!("{raw}"),
            });
        }
        Ok(raw.re.max(0.0))
    }

    /// √(Σᵢⱼ c̄ᵢcⱼ ⟨Lᵢ|Lⱼ⟩).
    pub fn norm(&self) -> Result<f64> {
        Ok(self.norm_sqr()?.sqrt())
    }

    pub fn scaled(mut self, factor: C64) -> Self {
        for (c, _) in &mut self.terms {
            *c *= factor;
        }
        self
    }

    /// Term-wise sum of two states on the same modes.
    pub fn add(&self, other: &SuperposedState) -> Result<SuperposedState> {
        if self.mode_count != other.mode_count {
            return Err(Error::ModeCountMismatch {
                left: self.mode_count,
                right: other.mode_count,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    pub fn normalized(&self) -> Result<SuperposedState> {
        let n = self.norm()?;
        if n < 1e-12 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.clone().scaled(C64::from(1.0 / n)))
    }

    /// Tensor product; `other`'s modes are appended after `self`'s.
    pub fn tensor(&self, other: &SuperposedState) -> SuperposedState {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c, l) in &self.terms {
            for (d, m) in &other.terms {
                let mut amps = l.0.clone();
                amps.extend_from_slice(&m.0);
                terms.push((c * d, CoherentLabel(amps)));
            }
        }
        SuperposedState {
            mode_count: self.mode_count + other.mode_count,
            terms,
        }
    }

    /// Reorder modes by `perm`, where the new mode `i` is the old mode `perm[i]`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<SuperposedState> {
        if perm.len() != self.mode_count {
            return Err(Error::ModeCountMismatch {
                left: perm.len(),
                right: self.mode_count,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                (*c, CoherentLabel(perm.iter().map(|&p| l.0[p]).collect()))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Beam splitter on the mode pair `(i, j)` in the given convention.
    pub fn apply_beam_splitter(
        &self,
        modes: (usize, usize),
        theta: f64,
        convention: BsConvention,
    ) -> Result<SuperposedState> {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match convention {
            BsConvention::Real => self.apply_mode_pair_map(modes, |g, b| (c * g + s * b, -s * g + c * b)),
            BsConvention::Phase => self.apply_mode_pair_map(modes, |g, b| {
                (c * g + C64::i() * s * b, c * b + C64::i() * s * g)
            }),
        }
    }

    /// Real-convention beam splitter parametrized by reflectivity/transmissivity:
    /// (γ, β) → (tγ + rβ, -rγ + tβ) with r² + t² = 1.
    pub fn apply_beam_splitter_rt(
        &self,
        modes: (usize, usize),
        r: f64,
        t: f64,
    ) -> Result<SuperposedState> {
        debug_assert!((r * r + t * t - 1.0).abs() < 1e-9, "r² + t² must be 1");
        self.apply_mode_pair_map(modes, |g, b| (t * g + r * b, -r * g + t * b))
    }

    fn apply_mode_pair_map(
        &self,
        (i, j): (usize, usize),
        map: impl Fn(C64, C64) -> (C64, C64),
    ) -> Result<SuperposedState> {
        self.check_mode(i)?;
        self.check_mode(j)?;
        if i == j {
            return Err(Error::InvalidMode {
                mode: j,
                mode_count: self.mode_count,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                let mut amps = l.0.clone();
                let (gi, gj) = map(amps[i], amps[j]);
                amps[i] = gi;
                amps[j] = gj;
                (*c, CoherentLabel(amps))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Phase shifter P(φ) = e^{iφ a†a}: label amplitude α → e^{iφ}α.
    pub fn apply_phase_shift(&self, mode: usize, phi: f64) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let rot = C64::new(0.0, phi).exp();
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                let mut amps = l.0.clone();
                amps[mode] *= rot;
                (*c, CoherentLabel(amps))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Displacement D(δ): α → α + δ with the unitary Weyl phase on the
    /// coefficient, exp((δᾱ - δ̄α)/2).
    pub fn apply_displacement(&self, mode: usize, delta: C64) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                let alpha = l.0[mode];
                let phase = ((delta * alpha.conj() - delta.conj() * alpha) * 0.5).exp();
                let mut amps = l.0.clone();
                amps[mode] = alpha + delta;
                (c * phase, CoherentLabel(amps))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Apply the parity projector Π_even (resp. Π_odd) on one mode without
    /// renormalizing. Π_even|α⟩ = (|α⟩ + |-α⟩)/2, Π_odd|α⟩ = (|α⟩ - |-α⟩)/2.
    pub fn apply_parity_projection(&self, mode: usize, parity: Parity) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let sign = match parity {
            Parity::Even => C64::from(1.0),
            Parity::Odd => C64::from(-1.0),
        };
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for (c, l) in &self.terms {
            let mut flipped = l.0.clone();
            flipped[mode] = -flipped[mode];
            terms.push((c * 0.5, l.clone()));
            terms.push((c * 0.5 * sign, CoherentLabel(flipped)));
        }
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Apply (I - |0⟩⟨0|) on one mode without renormalizing.
    pub fn apply_click_projection(&self, mode: usize) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let mut terms = Vec::with_capacity(self.terms.len() * 2);
        for (c, l) in &self.terms {
            let beta = l.0[mode];
            terms.push((*c, l.clone()));
            let mut vac = l.0.clone();
            vac[mode] = C64::from(0.0);
            terms.push((
                -c * (-0.5 * beta.norm_sqr()).exp(),
                CoherentLabel(vac),
            ));
        }
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Apply the vacuum projector |0⟩⟨0| on one mode without renormalizing;
    /// the mode is kept and left in |0⟩.
    pub fn apply_vacuum_projection(&self, mode: usize) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                let beta = l.0[mode];
                let mut amps = l.0.clone();
                amps[mode] = C64::from(0.0);
                (c * (-0.5 * beta.norm_sqr()).exp(), CoherentLabel(amps))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Contract ⟨n| on one mode using ⟨n|α⟩ = e^{-|α|²/2} αⁿ/√n!. The mode is
    /// removed; no renormalization.
    pub fn contract_fock(&self, mode: usize, n: usize) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                let factor = fock_amplitude(l.0[mode], n);
                let mut amps = l.0.clone();
                amps.remove(mode);
                (c * factor, CoherentLabel(amps))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count - 1,
            terms,
        })
    }

    /// Contract the homodyne kernel ⟨x| on one mode (X = (a + a†)/√2,
    /// ⟨x|β⟩ = π^{-1/4} exp(-x²/2 + √2βx - β²/2 - |β|²/2)). The mode is
    /// removed; no renormalization.
    pub fn contract_homodyne(&self, mode: usize, x: f64) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let prefactor = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                let beta = l.0[mode];
                let kernel = prefactor
                    * (std::f64::consts::SQRT_2 * beta * x
                        - 0.5 * beta * beta
                        - 0.5 * beta.norm_sqr())
                    .exp();
                let mut amps = l.0.clone();
                amps.remove(mode);
                (c * kernel, CoherentLabel(amps))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count - 1,
            terms,
        })
    }

    /// Contract ⟨w| on one mode, where w = Σₖ dₖ|λₖ⟩ is given in coherent
    /// components. The mode is removed; no renormalization.
    pub fn contract_with(&self, mode: usize, w: &[(C64, C64)]) -> Result<SuperposedState> {
        self.check_mode(mode)?;
        let terms = self
            .terms
            .iter()
            .map(|(c, l)| {
                let beta = l.0[mode];
                let factor: C64 = w
                    .iter()
                    .map(|&(d, lam)| d.conj() * coherent_overlap(lam, beta))
                    .sum();
                let mut amps = l.0.clone();
                amps.remove(mode);
                (c * factor, CoherentLabel(amps))
            })
            .collect();
        Ok(SuperposedState {
            mode_count: self.mode_count - 1,
            terms,
        })
    }

    /// Merge labels within `tol` amplitude distance and drop terms whose
    /// coefficient magnitude falls at or below `tol`.
    pub fn prune(&self, tol: f64) -> SuperposedState {
        let mut merged: Vec<(C64, CoherentLabel)> = Vec::new();
        for (c, l) in &self.terms {
            match merged.iter_mut().find(|(_, m)| m.distance(l) <= tol) {
                Some((d, _)) => *d += c,
                None => merged.push((*c, l.clone())),
            }
        }
        merged.retain(|(c, _)| c.norm() > tol);
        SuperposedState {
            mode_count: self.mode_count,
            terms: merged,
        }
    }

    /// Gram matrix of the term labels.
    pub fn gram_matrix(&self) -> Vec<Vec<C64>> {
        let k = self.terms.len();
        let mut g = vec![vec![C64::from(0.0); k]; k];
        for i in 0..k {
            for j in 0..k {
                g[i][j] = label_overlap(&self.terms[i].1, &self.terms[j].1);
            }
        }
        g
    }
}

/// ⟨n|α⟩ evaluated in log space so large n and |α| stay stable.
pub fn fock_amplitude(alpha: C64, n: usize) -> C64 {
    let r = alpha.norm();
    if r == 0.0 {
        return if n == 0 { C64::from(1.0) } else { C64::from(0.0) };
    }
    let ln_mag = -0.5 * r * r + n as f64 * r.ln() - 0.5 * crate::linalg::ln_factorial(n);
    let phase = n as f64 * alpha.arg();
    C64::from_polar(ln_mag.exp(), phase)
}

/// Normalized cat state ∝ |α⟩ + e^{iφ}|-α⟩.
///
/// φ = 0 is the even cat |e⟩, φ = π the odd cat |d⟩.
pub fn make_cat(alpha: C64, rel_phase: f64) -> Result<SuperposedState> {
    let raw = SuperposedState {
        mode_count: 1,
        terms: vec![
            (C64::from(1.0), CoherentLabel::single(alpha)),
            (C64::new(0.0, rel_phase).exp(), CoherentLabel::single(-alpha)),
        ],
    };
    let n2 = raw.norm_sqr()?;
    if n2 < 1e-12 {
        return Err(Error::DegenerateCat {
            alpha: format!("{alpha}"),
            phase: rel_phase,
        });
    }
    raw.normalized()
}

/// |⟨s1|s2⟩|² / (‖s1‖²‖s2‖²).
pub fn fidelity(s1: &SuperposedState, s2: &SuperposedState) -> Result<f64> {
    let n1 = s1.norm_sqr()?;
    let n2 = s2.norm_sqr()?;
    if n1 < 1e-24 || n2 < 1e-24 {
        return Err(Error::ZeroNorm);
    }
    Ok(s1.inner(s2)?.norm_sqr() / (n1 * n2))
}

/// Projective parity measurement on one mode. Returns the renormalized
/// conditioned state (mode kept) and the outcome probability.
pub fn project_parity(
    state: &SuperposedState,
    mode: usize,
    parity: Parity,
) -> Result<(SuperposedState, f64)> {
    let total = state.norm_sqr()?;
    let projected = state.apply_parity_projection(mode, parity)?.prune(MERGE_TOL);
    let weight = if projected.is_empty() {
        0.0
    } else {
        projected.norm_sqr()?
    };
    let prob = weight / total;
    if prob < 1e-14 {
        return Err(Error::ImpossibleOutcome {
            context: format!("parity {parity:?} on mode {mode}"),
            probability: prob,
        });
    }
    Ok((projected.normalized()?, prob))
}

/// Condition on ⟨n| for one mode. Returns the renormalized reduced state on
/// the remaining modes and the outcome probability.
pub fn project_fock(
    state: &SuperposedState,
    mode: usize,
    n: usize,
) -> Result<(SuperposedState, f64)> {
    let total = state.norm_sqr()?;
    let contracted = state.contract_fock(mode, n)?;
    let weight = if contracted.terms.is_empty() {
        0.0
    } else {
        contracted.norm_sqr()?
    };
    let prob = weight / total;
    if prob < 1e-300 {
        return Err(Error::ImpossibleOutcome {
            context: format!("⟨{n}| on mode {mode}"),
            probability: prob,
        });
    }
    Ok((contracted.normalized()?, prob))
}

/// Outcome of an on/off photodetector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClickOutcome {
    Click,
    NoClick,
}

/// Condition on an ideal on/off detector for one mode. The mode is kept: in
/// the `NoClick` branch it is left in exact vacuum, in the `Click` branch the
/// projector (I - |0⟩⟨0|) is applied. Returns the renormalized conditioned
/// state and the outcome probability.
pub fn project_click(
    state: &SuperposedState,
    mode: usize,
    outcome: ClickOutcome,
) -> Result<(SuperposedState, f64)> {
    let total = state.norm_sqr()?;
    let projected = match outcome {
        ClickOutcome::NoClick => state.apply_vacuum_projection(mode)?,
        ClickOutcome::Click => state.apply_click_projection(mode)?.prune(MERGE_TOL),
    };
    let weight = if projected.is_empty() {
        0.0
    } else {
        projected.norm_sqr()?
    };
    let prob = weight / total;
    if prob < 1e-14 {
        return Err(Error::ImpossibleOutcome {
            context: format!("{outcome:?} on mode {mode}"),
            probability: prob,
        });
    }
    Ok((projected.normalized()?, prob))
}

/// Condition on the homodyne result X = x for one mode. Returns the
/// renormalized reduced state and the probability density p(x) ≥ 0.
pub fn project_homodyne_x(
    state: &SuperposedState,
    mode: usize,
    x: f64,
) -> Result<(SuperposedState, f64)> {
    let total = state.norm_sqr()?;
    let contracted = state.contract_homodyne(mode, x)?;
    let density = contracted.norm_sqr()? / total;
    Ok((contracted.normalized()?, density))
}

/// What a detector or conditioning event measured, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    Parity,
    Fock,
    VacuumClick,
    HomodyneX,
    PhaseBasis,
}

/// Outcome value attached to a [`MeasurementRecord`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OutcomeValue {
    Parity(Parity),
    PhotonCount(usize),
    Click(bool),
    Quadrature(f64),
    /// Phase-superposition basis outcome: true = "+" branch.
    Sign(bool),
}

/// Named measurement event with its probability (discrete kinds) or
/// probability density (homodyne).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    pub kind: MeasurementKind,
    pub outcome: OutcomeValue,
    pub probability_or_density: f64,
}

impl MeasurementRecord {
    pub fn new(kind: MeasurementKind, outcome: OutcomeValue, p: f64) -> Result<Self> {
        let ok = match kind {
            MeasurementKind::HomodyneX => p >= 0.0,
            _ => (-1e-12..=1.0 + 1e-12).contains(&p),
        };
        if !ok {
            return Err(Error::ImpossibleOutcome {
                context: format!("measurement record {kind:?}"),
                probability: p,
            });
        }
        Ok(MeasurementRecord {
            kind,
            outcome,
            probability_or_density: p,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn overlap_identical_states_is_one() {
        for &a in &[c(0.3, -1.2), c(2.0, 0.0), c(0.0, 0.0)] {
            assert!((coherent_overlap(a, a) - C64::from(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn overlap_opposite_amplitudes_matches_exponential() {
        // |⟨α|-α⟩|² = e^{-4|α|²}; at α = 2 this is e^{-16} ≈ 1.1e-7.
        let ov = coherent_overlap(c(2.0, 0.0), c(-2.0, 0.0));
        assert_relative_eq!(ov.norm_sqr(), (-16.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn overlap_with_vacuum() {
        let beta = c(0.7, 0.4);
        let ov = coherent_overlap(c(0.0, 0.0), beta);
        assert_relative_eq!(ov.norm(), (-0.5 * beta.norm_sqr()).exp(), max_relative = 1e-13);
    }

    #[test]
    fn cat_norm_factor_at_alpha_one() {
        let cat = make_cat(c(1.0, 0.0), 0.0).unwrap();
        assert_relative_eq!(cat.norm().unwrap(), 1.0, epsilon = 1e-13);
        let n_plus = 1.0 / (2.0 * (1.0 + (-2.0f64).exp())).sqrt();
        assert_relative_eq!(cat.terms()[0].0.norm(), n_plus, epsilon = 1e-13);
    }

    #[test]
    fn small_even_cat_approaches_vacuum() {
        let cat = make_cat(c(1e-4, 0.0), 0.0).unwrap();
        let f = fidelity(&cat, &SuperposedState::vacuum(1)).unwrap();
        assert!(f > 1.0 - 1e-7);
    }

    #[test]
    fn degenerate_cat_rejected() {
        assert!(matches!(
            make_cat(c(0.0, 0.0), std::f64::consts::PI),
            Err(Error::DegenerateCat { .. })
        ));
    }

    #[test]
    fn unnormalized_cat_norm_value() {
        // ‖|α⟩ + |-α⟩‖ = sqrt(2(1 + e^{-2|α|²})) at α = 1.
        let raw = SuperposedState::new(
            1,
            vec![
                (c(1.0, 0.0), CoherentLabel::single(c(1.0, 0.0))),
                (c(1.0, 0.0), CoherentLabel::single(c(-1.0, 0.0))),
            ],
        )
        .unwrap();
        assert_relative_eq!(
            raw.norm().unwrap(),
            (2.0 * (1.0 + (-2.0f64).exp())).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn cancelled_state_has_zero_norm_and_fails_normalize() {
        let raw = SuperposedState::new(
            1,
            vec![
                (c(1.0, 0.0), CoherentLabel::single(c(0.8, 0.0))),
                (c(-1.0, 0.0), CoherentLabel::single(c(0.8, 0.0))),
            ],
        )
        .unwrap();
        assert!(raw.norm().unwrap() < 1e-12);
        assert!(matches!(raw.normalized(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn real_bs_merges_equal_coherent_states() {
        // |α⟩|α⟩ → |√2 α⟩|0⟩ on the real-convention 50:50 splitter.
        let alpha = c(1.3, 0.2);
        let state = SuperposedState::coherent(&[alpha, alpha]);
        let out = state
            .apply_beam_splitter((0, 1), std::f64::consts::FRAC_PI_2, BsConvention::Real)
            .unwrap();
        let expected = SuperposedState::coherent(&[alpha * std::f64::consts::SQRT_2, c(0.0, 0.0)]);
        assert_relative_eq!(fidelity(&out, &expected).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_bs_label_arithmetic() {
        let (g, b) = (c(0.9, -0.1), c(-0.4, 0.6));
        let theta = 0.83;
        let out = SuperposedState::coherent(&[g, b])
            .apply_beam_splitter((0, 1), theta, BsConvention::Phase)
            .unwrap();
        let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let l = &out.terms()[0].1;
        assert!((l.amp(0) - (co * g + C64::i() * si * b)).norm() < 1e-14);
        assert!((l.amp(1) - (co * b + C64::i() * si * g)).norm() < 1e-14);
    }

    #[test]
    fn vacuum_is_bs_fixed_point() {
        let v = SuperposedState::vacuum(2);
        for conv in [BsConvention::Real, BsConvention::Phase] {
            let out = v.apply_beam_splitter((0, 1), 1.1, conv).unwrap();
            assert_relative_eq!(fidelity(&out, &v).unwrap(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn phase_shift_pi_is_bit_flip() {
        let alpha = c(1.7, 0.0);
        let out = SuperposedState::coherent(&[alpha])
            .apply_phase_shift(0, std::f64::consts::PI)
            .unwrap();
        let expected = SuperposedState::coherent(&[-alpha]);
        assert_relative_eq!(fidelity(&out, &expected).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn phase_shift_quarter_turn() {
        let out = SuperposedState::coherent(&[c(1.0, 0.0)])
            .apply_phase_shift(0, std::f64::consts::FRAC_PI_2)
            .unwrap();
        assert!((out.terms()[0].1.amp(0) - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn displacement_identity_and_vacuum() {
        let s = SuperposedState::coherent(&[c(0.4, -0.3)]);
        let same = s.apply_displacement(0, c(0.0, 0.0)).unwrap();
        assert_relative_eq!(fidelity(&s, &same).unwrap(), 1.0, epsilon = 1e-14);

        let delta = c(0.6, 1.1);
        let displaced = SuperposedState::vacuum(1).apply_displacement(0, delta).unwrap();
        assert!((displaced.terms()[0].0 - C64::from(1.0)).norm() < 1e-14);
        assert!((displaced.terms()[0].1.amp(0) - delta).norm() < 1e-14);
    }

    #[test]
    fn displacement_preserves_norm() {
        let s = make_cat(c(1.2, 0.4), 1.0).unwrap();
        let d = s.apply_displacement(0, c(-0.7, 0.2)).unwrap();
        assert_relative_eq!(d.norm().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn parity_projection_on_cats() {
        let even = make_cat(c(1.1, 0.0), 0.0).unwrap();
        let (state, prob) = project_parity(&even, 0, Parity::Even).unwrap();
        assert_relative_eq!(prob, 1.0, epsilon = 1e-12);
        assert_relative_eq!(fidelity(&state, &even).unwrap(), 1.0, epsilon = 1e-12);

        let odd = make_cat(c(1.1, 0.0), std::f64::consts::PI).unwrap();
        assert!(project_parity(&odd, 0, Parity::Even).is_err());
    }

    #[test]
    fn parity_probability_matches_poisson_sum() {
        // Brute-force oracle: Σ_{n even} e^{-|α|²}|α|^{2n}/n! for a coherent state.
        let alpha = c(1.4, 0.7);
        let lambda = alpha.norm_sqr();
        let mut brute = 0.0;
        let mut ln_term = -lambda;
        for n in 0..200 {
            if n > 0 {
                ln_term += lambda.ln() - (n as f64).ln();
            }
            if n % 2 == 0 {
                brute += ln_term.exp();
            }
        }
        let s = SuperposedState::coherent(&[alpha]);
        let (_, prob) = project_parity(&s, 0, Parity::Even).unwrap();
        assert_relative_eq!(prob, brute, epsilon = 1e-12);
        assert_relative_eq!(prob, (1.0 + (-2.0 * lambda).exp()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn parity_outcomes_complete() {
        let s = make_cat(c(0.9, 0.3), 0.7).unwrap();
        let (_, pe) = project_parity(&s, 0, Parity::Even).unwrap();
        let (_, po) = project_parity(&s, 0, Parity::Odd).unwrap();
        assert_relative_eq!(pe + po, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn fock_projection_examples() {
        let (_, p) = project_fock(&SuperposedState::vacuum(1), 0, 0).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-14);

        // Poisson statistics oracle for a coherent state.
        let alpha = c(1.3, -0.5);
        let s = SuperposedState::coherent(&[alpha]);
        let (_, p0) = project_fock(&s, 0, 0).unwrap();
        assert_relative_eq!(p0, (-alpha.norm_sqr()).exp(), epsilon = 1e-13);

        // |E⟩ ∝ |√2α⟩ + |-√2α⟩ has vacuum weight 2e^{-2α²}/(1 + e^{-4α²}).
        let a = 1.2f64;
        let e_cat = make_cat(c(a * std::f64::consts::SQRT_2, 0.0), 0.0).unwrap();
        let (_, pvac) = project_fock(&e_cat, 0, 0).unwrap();
        let expected = 2.0 * (-2.0 * a * a).exp() / (1.0 + (-4.0 * a * a).exp());
        assert_relative_eq!(pvac, expected, max_relative = 1e-12);
    }

    #[test]
    fn fock_outcomes_sum_to_one() {
        let s = make_cat(c(1.5, 0.4), 2.1).unwrap();
        let mut total = 0.0;
        for n in 0..60 {
            match project_fock(&s, 0, n) {
                Ok((_, p)) => total += p,
                Err(_) => {} // zero-probability outcome, contributes nothing
            }
        }
        assert_relative_eq!(total, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn click_projection_examples() {
        let (state, p) = project_click(&SuperposedState::vacuum(1), 0, ClickOutcome::NoClick).unwrap();
        assert_relative_eq!(p, 1.0, epsilon = 1e-14);
        assert_relative_eq!(
            fidelity(&state, &SuperposedState::vacuum(1)).unwrap(),
            1.0,
            epsilon = 1e-13
        );

        let amp = 2.0 * std::f64::consts::SQRT_2; // |√2 α⟩ at α = 2
        let s = SuperposedState::coherent(&[c(amp, 0.0)]);
        let (_, p_no) = project_click(&s, 0, ClickOutcome::NoClick).unwrap();
        assert_relative_eq!(p_no, (-8.0f64).exp(), max_relative = 1e-12);
        let (_, p_click) = project_click(&s, 0, ClickOutcome::Click).unwrap();
        assert_relative_eq!(p_click + p_no, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn homodyne_vacuum_density_at_origin() {
        let (reduced, density) = project_homodyne_x(&SuperposedState::vacuum(1), 0, 0.0).unwrap();
        assert_relative_eq!(density, std::f64::consts::PI.powf(-0.5), epsilon = 1e-13);
        assert_eq!(reduced.mode_count(), 0);
    }

    #[test]
    fn homodyne_kernel_magnitude_real_beta() {
        let beta = 0.9f64;
        let s = SuperposedState::coherent(&[c(beta, 0.0)]);
        let (_, density) = project_homodyne_x(&s, 0, 0.0).unwrap();
        let kernel = std::f64::consts::PI.powf(-0.25) * (-beta * beta).exp();
        assert_relative_eq!(density, kernel * kernel, max_relative = 1e-12);
    }

    #[test]
    fn homodyne_density_normalizes() {
        // ∫ p(x) dx = 1 by Simpson quadrature.
        let s = make_cat(c(1.1, 0.6), 0.9).unwrap();
        let (lo, hi, steps) = (-9.0, 9.0, 3600);
        let h = (hi - lo) / steps as f64;
        let mut integral = 0.0;
        for k in 0..=steps {
            let x = lo + k as f64 * h;
            let w = if k == 0 || k == steps {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let density = s.contract_homodyne(0, x).unwrap().norm_sqr().unwrap();
            integral += w * density;
        }
        integral *= h / 3.0;
        assert_relative_eq!(integral, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn fidelity_examples() {
        let s = make_cat(c(0.8, 0.1), 0.3).unwrap();
        assert_relative_eq!(fidelity(&s, &s).unwrap(), 1.0, epsilon = 1e-13);

        let a = SuperposedState::coherent(&[c(2.0, 0.0)]);
        let b = SuperposedState::coherent(&[c(-2.0, 0.0)]);
        assert_relative_eq!(fidelity(&a, &b).unwrap(), (-16.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn prune_merges_and_flags_cancellation() {
        let l = CoherentLabel::single(c(0.5, 0.5));
        let s = SuperposedState::new(1, vec![(c(0.3, 0.0), l.clone()), (c(0.25, 0.1), l.clone())])
            .unwrap();
        let p = s.prune(1e-12);
        assert_eq!(p.terms().len(), 1);
        assert!((p.terms()[0].0 - c(0.55, 0.1)).norm() < 1e-14);

        let cancel =
            SuperposedState::new(1, vec![(c(0.3, 0.0), l.clone()), (c(-0.3, 0.0), l)]).unwrap();
        assert!(cancel.prune(1e-12).is_empty());
    }

    #[test]
    fn measurement_record_validates_probability() {
        assert!(MeasurementRecord::new(
            MeasurementKind::Parity,
            OutcomeValue::Parity(Parity::Even),
            0.5
        )
        .is_ok());
        assert!(MeasurementRecord::new(
            MeasurementKind::Fock,
            OutcomeValue::PhotonCount(1),
            1.5
        )
        .is_err());
        // Homodyne densities may exceed 1.
        assert!(MeasurementRecord::new(
            MeasurementKind::HomodyneX,
            OutcomeValue::Quadrature(0.0),
            3.2
        )
        .is_ok());
    }

    #[test]
    fn fock_amplitude_log_space_stability() {
        let alpha = c(2.5, 0.0);
        // Direct small-n evaluation agrees with the log-space path.
        let direct = (-0.5 * alpha.norm_sqr()).exp() * alpha.powu(3) / 6.0f64.sqrt();
        assert!((fock_amplitude(alpha, 3) - direct).norm() < 1e-14);
        // Far tail underflows gracefully instead of producing NaN.
        assert!(fock_amplitude(alpha, 400).norm() < 1e-200);
        assert!(fock_amplitude(alpha, 400).norm() >= 0.0);
    }
}
