//! Coherence-preserving Hamiltonian `H = f K0 + g K+ + g* K-`, its tilting
//! diagonalization and time evolution (hbar = 1).

use crate::algebra::{inner_product, BargmannIndex, StateVector, TruncatedRep};
use crate::displacement::{pncs_series, pncs_series_unchecked, DisplacementParams, PncsResult};
use crate::error::{finite, Error, Result};
use crate::linalg::{expm, CMatrix};
use num_complex::Complex64;

/// `H = f K0 + gamma (e^{-i phase} K+ + e^{i phase} K-)`.
///
/// Stored through the complex coupling `g = gamma e^{-i phase}`; the matrix
/// uses `g` on `K+` and `conj(g)` on `K-`, so it is Hermitian by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Hamiltonian {
    pub f: f64,
    pub coupling: Complex64,
}

impl Su11Hamiltonian {
    pub fn new(f: f64, gamma: f64, phase: f64) -> Result<Self> {
        finite("f", f)?;
        finite("gamma", gamma)?;
        finite("phase", phase)?;
        if gamma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coupling gamma must be >= 0, got {gamma}"
            )));
        }
        Ok(Self {
            f,
            coupling: Complex64::from_polar(gamma, -phase),
        })
    }

    /// General complex coupling `g`.
    pub fn with_coupling(f: f64, g: Complex64) -> Result<Self> {
        finite("f", f)?;
        finite("g", g.re)?;
        finite("g", g.im)?;
        Ok(Self { f, coupling: g })
    }

    pub fn gamma(&self) -> f64 {
        self.coupling.norm()
    }

    /// `phi` in `g = gamma e^{-i phi}`.
    pub fn phase(&self) -> f64 {
        -self.coupling.arg()
    }
}

pub fn hamiltonian_matrix(rep: &TruncatedRep, h: &Su11Hamiltonian) -> CMatrix {
    let g = h.coupling;
    rep.kzero() * Complex64::new(h.f, 0.0) + rep.kplus() * g + rep.kminus() * g.conj()
}

/// Displacement that turns `H` into `omega_eff K0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltResult {
    pub params: DisplacementParams,
    /// `sqrt(f^2 - 4 gamma^2)`
    pub omega_eff: f64,
}

/// `tau = artanh(2 gamma / f)`, `phi = phase`; only below threshold.
pub fn tilt_parameters(h: &Su11Hamiltonian) -> Result<TiltResult> {
    let gamma = h.gamma();
    if h.f.is_nan() || h.f <= 2.0 * gamma {
        return Err(Error::AboveThreshold {
            f: h.f,
            two_gamma: 2.0 * gamma,
        });
    }
    let tau = (2.0 * gamma / h.f).atanh();
    let phi = if gamma == 0.0 { 0.0 } else { h.phase() };
    Ok(TiltResult {
        params: DisplacementParams::new(tau, phi)?,
        omega_eff: (h.f * h.f - 4.0 * gamma * gamma).sqrt(),
    })
}

/// `E_n = (n + k) omega_eff`.
pub fn eigen_energy(k: BargmannIndex, n: usize, tilt: &TiltResult) -> f64 {
    (n as f64 + k.value()) * tilt.omega_eff
}

#[derive(Debug, Clone)]
pub struct EigenResidual {
    /// `|| H|z,k,n> - E|z,k,n> ||`
    pub residual: f64,
    pub energy: f64,
    pub tail_mass: f64,
    pub warning: Option<String>,
}

/// Residual of the eigenvalue equation for the number coherent state built
/// with the tilt parameters of `h`.
pub fn eigen_residual(
    h: &Su11Hamiltonian,
    k: BargmannIndex,
    n: usize,
    dim: usize,
    tol: f64,
) -> Result<EigenResidual> {
    let tilt = tilt_parameters(h)?;
    let rep = TruncatedRep::new(k, dim)?;
    // a leaky state is still evaluated; the leak is reported
    let state = pncs_series_unchecked(k, n, &tilt.params, dim, tol)?.state;
    let energy = eigen_energy(k, n, &tilt);
    let hpsi = state.apply_matrix(&hamiltonian_matrix(&rep, h))?;
    let residual = hpsi.distance(&state.scaled(energy.into()))?;
    let tail_mass = state.tail_mass();
    let warning =
        (tail_mass > tol).then(|| format!("tail mass {tail_mass:e} exceeds {tol:e}; increase dim"));
    Ok(EigenResidual {
        residual,
        energy,
        tail_mass,
        warning,
    })
}

/// Analytic phase `-omega_eff (k + n) t` accumulated by an eigenstate.
pub fn evolution_phase(k: BargmannIndex, n: usize, tilt: &TiltResult, t: f64) -> f64 {
    -eigen_energy(k, n, tilt) * t
}

/// `e^{-i omega_eff (k+n) t} |z,k,n>`.
///
/// Valid only for states displaced with the tilt parameters, where the state
/// is an eigenstate of `H`.
pub fn time_evolve(state: &PncsResult, t: f64, tilt: &TiltResult) -> Result<StateVector> {
    finite("t", t)?;
    let mismatch = state.params.distance(&tilt.params);
    if mismatch > 1e-12 {
        return Err(Error::ParameterMismatch(mismatch));
    }
    let phase = evolution_phase(state.state.k(), state.source_n, tilt, t);
    Ok(state.state.scaled(Complex64::from_polar(1.0, phase)))
}

/// `exp(-i H t)` on the truncated window.
pub fn dense_propagator(rep: &TruncatedRep, h: &Su11Hamiltonian, t: f64) -> CMatrix {
    expm(&(hamiltonian_matrix(rep, h) * Complex64::new(0.0, -t)))
}

/// One time sample comparing the analytic phase with dense evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionSample {
    pub t: f64,
    /// `-omega_eff (k + n) t` wrapped into `(-pi, pi]`.
    pub phase: f64,
    /// `arg <psi| exp(-iHt) |psi>`.
    pub oracle_phase: f64,
    /// Wrapped difference of the two phases.
    pub difference: f64,
    /// `|<psi| exp(-iHt) |psi>| / <psi|psi>`.
    pub overlap_modulus: f64,
    /// Largest amplitude difference between analytic and dense evolution.
    pub state_difference: f64,
}

/// Evolves the eigenstate `|z,k,n>` of `h` both analytically and with the
/// dense propagator on `dim` levels.
pub fn evolution_trace(
    h: &Su11Hamiltonian,
    k: BargmannIndex,
    n: usize,
    dim: usize,
    tol: f64,
    times: &[f64],
) -> Result<Vec<EvolutionSample>> {
    let tilt = tilt_parameters(h)?;
    let rep = TruncatedRep::new(k, dim)?;
    let state = pncs_series(k, n, &tilt.params, dim, tol)?;
    let norm = state.state.norm_sqr();
    times
        .iter()
        .map(|&t| {
            let analytic = time_evolve(&state, t, &tilt)?;
            let dense = state.state.apply_matrix(&dense_propagator(&rep, h, t))?;
            let overlap = inner_product(&state.state, &dense)? / norm;
            let phase = wrap_phase(evolution_phase(k, n, &tilt, t));
            let oracle_phase = if t == 0.0 { 0.0 } else { overlap.arg() };
            Ok(EvolutionSample {
                t,
                phase,
                oracle_phase,
                difference: wrap_phase(phase - oracle_phase),
                overlap_modulus: overlap.norm(),
                state_difference: analytic.max_abs_diff(&dense)?,
            })
        })
        .collect()
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_phase(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let y = x.rem_euclid(TAU);
    if y > PI {
        y - TAU
    } else {
        y
    }
}
