//! Non-degenerate parametric amplifier through the two-mode realization
//! `K0 = (a'a + b'b + 1)/2`, `K+ = a'b'`, `K- = ab`.
//!
//! Wavefunctions live on the plane in polar coordinates `(r, angle)`. The
//! coordinate angle is called `angle` throughout to keep it apart from the
//! displacement phase `phi`. Every state here has a fixed angular momentum
//! `m`, so wavefunctions factor as `R(r) e^{i m angle}` and angular
//! integrals are done analytically.
//!
//! The series route (number coherent state amplitudes times oscillator
//! eigenfunctions) is authoritative. The closed form as printed in the
//! literature is kept verbatim and audited against it; see
//! [`audit_closed_form`] and [`pncs_wavefunction_corrected`].

use crate::algebra::{lowering_factor, raising_factor, BargmannIndex};
use crate::displacement::{pncs_series, DisplacementParams, PncsResult};
use crate::dynamics::{eigen_energy, tilt_parameters, Su11Hamiltonian, TiltResult};
use crate::error::{finite, Error, Result};
use crate::special::{gauss_legendre_on, laguerre, laguerre_all, laguerre_complex, ln_factorial};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Pump frequency `omega`, coupling `chi`, pump phase `phase`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplifierSpec {
    pub omega: f64,
    pub chi: f64,
    pub phase: f64,
}

impl AmplifierSpec {
    pub fn new(omega: f64, chi: f64, phase: f64) -> Result<Self> {
        finite("omega", omega)?;
        finite("chi", chi)?;
        finite("Phi", phase)?;
        if omega <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "omega must be > 0, got {omega}"
            )));
        }
        if chi < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "chi must be >= 0, got {chi}"
            )));
        }
        Ok(Self { omega, chi, phase })
    }

    /// `H + omega = 2 omega K0 + chi (e^{-i Phi} K+ + e^{i Phi} K-)`.
    pub fn hamiltonian(&self) -> Su11Hamiltonian {
        Su11Hamiltonian::new(2.0 * self.omega, self.chi, self.phase).expect("validated spec")
    }

    /// Tilt of the mapped Hamiltonian; `tau = artanh(chi / omega)`.
    pub fn tilt(&self) -> Result<TiltResult> {
        tilt_parameters(&self.hamiltonian())
    }
}

/// Quantum numbers of a two-dimensional oscillator level with `0 <= m <= N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeQuantumNumbers {
    /// Total quantum number `N`.
    pub total: usize,
    /// Angular momentum.
    pub m: usize,
    /// Radial number `(N - m)/2`, equal to the group label `n`.
    pub n_r: usize,
    /// `m + 1/2`
    pub l: f64,
    /// `(m + 1)/2`
    pub k: BargmannIndex,
}

impl TwoModeQuantumNumbers {
    pub fn new(total: usize, m: usize) -> Result<Self> {
        if m > total {
            return Err(Error::InvalidQuantumNumbers {
                total: total as i64,
                m: m as i64,
                reason: "requires m <= N",
            });
        }
        if !(total - m).is_multiple_of(2) {
            return Err(Error::InvalidQuantumNumbers {
                total: total as i64,
                m: m as i64,
                reason: "N - m must be even",
            });
        }
        Ok(Self::from_radial((total - m) / 2, m))
    }

    pub fn from_radial(n_r: usize, m: usize) -> Self {
        Self {
            total: 2 * n_r + m,
            m,
            n_r,
            l: m as f64 + 0.5,
            k: BargmannIndex::new(0.5 * (m as f64 + 1.0)).expect("positive"),
        }
    }

    /// `(N + 1)/2`, the K0 eigenvalue.
    pub fn kzero_eigenvalue(&self) -> f64 {
        0.5 * (self.total as f64 + 1.0)
    }

    /// `(m^2 - 1)/4 = k(k - 1)`.
    pub fn casimir_eigenvalue(&self) -> f64 {
        let m = self.m as f64;
        0.25 * (m * m - 1.0)
    }
}

/// Two-mode Fock ket `|N, m>` with `|m| <= N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoModeKet {
    pub total: i64,
    pub m: i64,
}

impl TwoModeKet {
    pub fn new(total: i64, m: i64) -> Result<Self> {
        if total < 0 || m.abs() > total || (total - m) % 2 != 0 {
            return Err(Error::InvalidQuantumNumbers {
                total,
                m,
                reason: "requires |m| <= N and N - m even",
            });
        }
        Ok(Self { total, m })
    }

    fn half(x: i64) -> f64 {
        x as f64 / 2.0
    }

    /// `a|N,m> = sqrt((N+m)/2) |N-1,m-1>`
    pub fn a(self) -> Option<(f64, Self)> {
        let c = Self::half(self.total + self.m).sqrt();
        (c > 0.0).then_some((
            c,
            Self {
                total: self.total - 1,
                m: self.m - 1,
            },
        ))
    }

    /// `a'|N,m> = sqrt((N+m)/2 + 1) |N+1,m+1>`
    pub fn a_dag(self) -> (f64, Self) {
        (
            (Self::half(self.total + self.m) + 1.0).sqrt(),
            Self {
                total: self.total + 1,
                m: self.m + 1,
            },
        )
    }

    /// `b|N,m> = sqrt((N-m)/2) |N-1,m+1>`
    pub fn b(self) -> Option<(f64, Self)> {
        let c = Self::half(self.total - self.m).sqrt();
        (c > 0.0).then_some((
            c,
            Self {
                total: self.total - 1,
                m: self.m + 1,
            },
        ))
    }

    /// `b'|N,m> = sqrt((N-m)/2 + 1) |N+1,m-1>`
    pub fn b_dag(self) -> (f64, Self) {
        (
            (Self::half(self.total - self.m) + 1.0).sqrt(),
            Self {
                total: self.total + 1,
                m: self.m - 1,
            },
        )
    }
}

/// Largest deviation between the two-mode ladder bookkeeping and the
/// su(1,1) matrix elements at `k = (m+1)/2`, `n = n_r`:
/// `a'b'` vs `K+`, `ab` vs `K-`, `(a'a + b'b + 1)/2` vs `K0`.
pub fn two_mode_ladder_residual(q: &TwoModeQuantumNumbers) -> f64 {
    let ket = TwoModeKet::new(q.total as i64, q.m as i64).expect("valid quantum numbers");
    let k = q.k.value();
    let mut worst = 0.0f64;

    let (c1, mid) = ket.b_dag();
    let (c2, up) = mid.a_dag();
    worst = worst.max((c1 * c2 - raising_factor(k, q.n_r)).abs());
    worst = worst.max(((up.total - ket.total - 2).abs() + (up.m - ket.m).abs()) as f64);

    let down = ket
        .b()
        .and_then(|(c1, mid)| mid.a().map(|(c2, out)| (c1 * c2, out)));
    match down {
        Some((c, out)) => {
            worst = worst.max((c - lowering_factor(k, q.n_r)).abs());
            worst = worst.max(((out.total - ket.total + 2).abs() + (out.m - ket.m).abs()) as f64);
        }
        None => worst = worst.max(lowering_factor(k, q.n_r)),
    }

    let number_a = ket.a().map_or(0.0, |(c, mid)| c * mid.a_dag().0);
    let number_b = ket.b().map_or(0.0, |(c, mid)| c * mid.b_dag().0);
    let k0 = 0.5 * (number_a + number_b + 1.0);
    worst
        .max((k0 - q.kzero_eigenvalue()).abs())
        .max((k0 - (k + q.n_r as f64)).abs())
}

/// Radial factor of the oscillator eigenfunction including the angular
/// normalization `1/sqrt(2 pi)`:
/// `(-1)^n_r sqrt(n_r!/(n_r+m)!) r^m L_{n_r}^m(r^2) e^{-r^2/2} / sqrt(pi)`.
///
/// The form in the literature carries `sqrt(2 n_r!/(n_r+m)!)/sqrt(pi)`,
/// which integrates to 2 against `r dr d(angle)` over a full turn.
pub fn ho_radial(n_r: usize, m: usize, r: f64) -> f64 {
    ho_radial_with(n_r, m, r, laguerre(n_r, m as f64, r * r))
}

fn ho_radial_with(n_r: usize, m: usize, r: f64, lag: f64) -> f64 {
    let sign = if n_r.is_multiple_of(2) { 1.0 } else { -1.0 };
    let norm = (0.5 * (ln_factorial(n_r) - ln_factorial(n_r + m))).exp() / PI.sqrt();
    sign * norm * r.powi(m as i32) * lag * (-0.5 * r * r).exp()
}

/// Two-dimensional oscillator eigenfunction `psi'_{n_r, m}(r, angle)`,
/// unit norm against `r dr d(angle)`.
pub fn ho_eigenfunction(q: &TwoModeQuantumNumbers, r: f64, angle: f64) -> Complex64 {
    Complex64::from_polar(ho_radial(q.n_r, q.m, r), q.m as f64 * angle)
}

/// Amplitudes of `|zeta, k=(m+1)/2, n>` on a window grown until the tail
/// mass is below `tol`.
pub fn pncs_amplitudes(n: usize, m: usize, p: &DisplacementParams, tol: f64) -> Result<PncsResult> {
    let k = BargmannIndex::new(0.5 * (m as f64 + 1.0))?;
    let mut dim = (2 * n + 32).max(48);
    loop {
        match pncs_series(k, n, p, dim, tol) {
            Err(Error::TruncationLeak { .. }) if dim < 4096 => dim *= 2,
            other => return other,
        }
    }
}

/// Number coherent state wavefunction by the series route, with its
/// amplitudes computed once for repeated evaluation.
#[derive(Debug, Clone)]
pub struct SeriesWavefunction {
    pub m: usize,
    pub amplitudes: Vec<Complex64>,
    pub series: PncsResult,
}

impl SeriesWavefunction {
    pub fn new(q: &TwoModeQuantumNumbers, p: &DisplacementParams, tol: f64) -> Result<Self> {
        let series = pncs_amplitudes(q.n_r, q.m, p, tol)?;
        let mut amplitudes = series.state.amplitudes().to_vec();
        // drop negligible trailing levels
        while amplitudes.len() > q.n_r + 1 && amplitudes.last().is_some_and(|a| a.norm() < 1e-300) {
            amplitudes.pop();
        }
        Ok(Self {
            m: q.m,
            amplitudes,
            series,
        })
    }

    /// Radial factor `R(r)` with `psi = R(r) e^{i m angle}`.
    pub fn radial(&self, r: f64) -> Complex64 {
        let top = self.amplitudes.len() - 1;
        let lag = laguerre_all(top, self.m as f64, r * r);
        self.amplitudes
            .iter()
            .zip(lag)
            .enumerate()
            .map(|(n, (a, l))| a * ho_radial_with(n, self.m, r, l))
            .sum()
    }

    pub fn eval(&self, r: f64, angle: f64) -> Complex64 {
        self.radial(r) * Complex64::from_polar(1.0, self.m as f64 * angle)
    }
}

/// `<r, angle | zeta, k, n>` by the series route.
pub fn pncs_wavefunction_series(
    q: &TwoModeQuantumNumbers,
    p: &DisplacementParams,
    r: f64,
    angle: f64,
    tol: f64,
) -> Result<Complex64> {
    Ok(SeriesWavefunction::new(q, p, tol)?.eval(r, angle))
}

/// `sigma = (1 - |zeta|^2) / ((1 - zeta)(-zeta*))`; undefined at `zeta = 0`.
pub fn sigma(zeta: Complex64) -> Option<Complex64> {
    if zeta.norm() == 0.0 {
        return None;
    }
    Some((1.0 - zeta.norm_sqr()) / ((Complex64::new(1.0, 0.0) - zeta) * (-zeta.conj())))
}

/// Printed closed form, with the Laguerre argument's `(1 -/+ sigma)` factor
/// selectable so the audit can isolate that factor.
fn closed_form_raw(
    n: usize,
    m: usize,
    zeta: Complex64,
    r: f64,
    angle: f64,
    plus_sigma: bool,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let sig = sigma(zeta).ok_or(Error::InvalidArgument("closed form needs zeta != 0".into()))?;
    let denom_sigma = if plus_sigma { one + sig } else { one - sig };
    if denom_sigma.norm() < 1e-12 {
        return Err(Error::SingularClosedForm);
    }
    let mf = m as f64;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let norm = (0.5 * (2f64.ln() + ln_factorial(n) - ln_factorial(n + m))).exp() * sign / PI.sqrt();
    let one_minus = one - zeta;
    let pre = (-zeta.conj()).powu(n as u32)
        * (1.0 - zeta.norm_sqr()).powf(0.5 * mf + 0.5)
        * (one + sig).powu(n as u32)
        / one_minus.powu(m as u32 + 1);
    let gauss = (-(r * r) * (zeta + one) / (one_minus * 2.0)).exp();
    let arg = sig * (r * r) / (one_minus * denom_sigma);
    Ok(Complex64::from_polar(norm, mf * angle)
        * pre
        * gauss
        * r.powi(m as i32)
        * laguerre_complex(n, mf, arg))
}

/// The closed-form amplifier eigenfunction exactly as printed:
///
/// ```text
/// psi_{n,m} = sqrt(2 n!/(n+m)!) (-1)^n / sqrt(pi) e^{i m angle}
///   (-zeta*)^n (1-|zeta|^2)^{m/2+1/2} (1+sigma)^n / (1-zeta)^{m+1}
///   exp(-r^2 (zeta+1) / (2(1-zeta))) r^m L_n^m(r^2 sigma / ((1-zeta)(1-sigma)))
/// ```
///
/// Delegates to [`ho_eigenfunction`] at `zeta = 0`; fails with
/// [`Error::SingularClosedForm`] where `sigma = 1`. This form does not agree
/// with the series route (see [`audit_closed_form`]).
pub fn pncs_wavefunction_closed(
    q: &TwoModeQuantumNumbers,
    p: &DisplacementParams,
    r: f64,
    angle: f64,
) -> Result<Complex64> {
    if p.zeta.norm() == 0.0 {
        return Ok(ho_eigenfunction(q, r, angle));
    }
    closed_form_raw(q.n_r, q.m, p.zeta, r, angle, false)
}

/// Printed ground state `psi_0` (the `n = 0` case of the printed form):
/// `sqrt(2/(pi m!)) (1-|zeta|^2)^{(m+1)/2} / (1-zeta)^{m+1}
///  exp(-r^2 (zeta+1)/(2(1-zeta))) e^{i m angle} r^m`.
pub fn ground_state_printed(m: usize, p: &DisplacementParams, r: f64, angle: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let z = p.zeta;
    let mf = m as f64;
    let norm = (0.5 * (2f64.ln() - PI.ln() - ln_factorial(m))).exp();
    (1.0 - z.norm_sqr()).powf(0.5 * mf + 0.5) / (one - z).powu(m as u32 + 1)
        * (-(r * r) * (z + one) / ((one - z) * 2.0)).exp()
        * Complex64::from_polar(norm * r.powi(m as i32), mf * angle)
}

/// Closed form that agrees with the series route:
///
/// ```text
/// psi_{n,m} = (-1)^n sqrt(n!/(n+m)!) / sqrt(pi) e^{i m angle}
///   ((1+zeta*)/(1+zeta))^n (1-|zeta|^2)^{(m+1)/2} / (1+zeta)^{m+1}
///   exp(-r^2 (1-zeta) / (2(1+zeta))) r^m L_n^m(r^2 (1-|zeta|^2)/|1+zeta|^2)
/// ```
///
/// Obtained by summing the series with the Laguerre generating function in
/// `s` and the multiplication theorem in `j`. It differs from the printed
/// form by the sign of `zeta`, by `(1 - sigma) -> (1 + sigma)` in the
/// Laguerre argument and by an overall `1/sqrt(2)`. Regular for every
/// `|zeta| < 1`.
pub fn pncs_wavefunction_corrected(
    q: &TwoModeQuantumNumbers,
    p: &DisplacementParams,
    r: f64,
    angle: f64,
) -> Complex64 {
    let (n, m) = (q.n_r, q.m);
    let mf = m as f64;
    let one = Complex64::new(1.0, 0.0);
    let z = p.zeta;
    let one_plus = one + z;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let norm = (0.5 * (ln_factorial(n) - ln_factorial(n + m))).exp() * sign / PI.sqrt();
    let squeeze = 1.0 - z.norm_sqr();
    let phase = ((one + z.conj()) / one_plus).powu(n as u32);
    let x = r * r * squeeze / one_plus.norm_sqr();
    Complex64::from_polar(norm, mf * angle) * phase * squeeze.powf(0.5 * (mf + 1.0))
        / one_plus.powu(m as u32 + 1)
        * (-(r * r) * (one - z) / (one_plus * 2.0)).exp()
        * (r.powi(m as i32) * laguerre(n, mf, x))
}

/// Energy `2 sqrt(omega^2 - chi^2)(n_r + m/2 + 1/2) - omega`.
pub fn amplifier_energy(q: &TwoModeQuantumNumbers, a: &AmplifierSpec) -> Result<f64> {
    if a.omega <= a.chi {
        return Err(Error::AboveThreshold {
            f: 2.0 * a.omega,
            two_gamma: 2.0 * a.chi,
        });
    }
    let tilt = a.tilt()?;
    Ok(eigen_energy(q.k, q.n_r, &tilt) - a.omega)
}

/// Gauss-Legendre rule in `x = r^2` on `[0, x_max]`.
#[derive(Debug, Clone)]
pub struct RadialQuadrature {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

pub const DEFAULT_RADIAL_NODES: usize = 128;

/// Cutoff in `x = r^2` for levels up to `n` at angular momentum `m`: the
/// smallest `X` with `e^{-X} X^{m+2n} < 1e-16`, widened by
/// `(1+|zeta|)/(1-|zeta|)` for squeezed states.
pub fn radial_cutoff(n: usize, m: usize, zeta_abs: f64) -> f64 {
    let power = (m + 2 * n) as f64;
    let mut x = power.max(1.0);
    while -x + power * x.ln() >= -16.0 * 10f64.ln() {
        x += 0.5;
    }
    x * (1.0 + zeta_abs) / (1.0 - zeta_abs)
}

impl RadialQuadrature {
    pub fn new(nodes: usize, x_max: f64) -> Self {
        let (x, w) = gauss_legendre_on(nodes, 0.0, x_max);
        Self { x, w }
    }

    /// Rule on `[0, X]` with `X` from [`radial_cutoff`].
    pub fn for_state(nodes: usize, n: usize, m: usize, zeta_abs: f64) -> Self {
        Self::new(nodes, radial_cutoff(n, m, zeta_abs))
    }

    /// `int conj(f) g r dr d(angle)` for `f = F(r) e^{i m angle}`,
    /// `g = G(r) e^{i m angle}`: `pi int conj(F) G dx`.
    pub fn overlap(&self, f: impl Fn(f64) -> Complex64, g: impl Fn(f64) -> Complex64) -> Complex64 {
        self.x
            .iter()
            .zip(&self.w)
            .map(|(&x, &w)| {
                let r = x.sqrt();
                f(r).conj() * g(r) * w
            })
            .sum::<Complex64>()
            * PI
    }

    pub fn norm_sqr(&self, f: impl Fn(f64) -> Complex64) -> f64 {
        self.x
            .iter()
            .zip(&self.w)
            .map(|(&x, &w)| f(x.sqrt()).norm_sqr() * w)
            .sum::<f64>()
            * PI
    }
}

type Field<'a> = Box<dyn Fn(f64, f64) -> Complex64 + 'a>;

/// Sign of the `(1/r^2) d^2/d angle^2` term in the polar K0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KzeroForm {
    /// `K0 = (r^2 - d_rr - d_r/r - d_aa/r^2)/4`, i.e. `(r^2 - Laplacian)/4`.
    Consistent,
    /// The form in the literature, with `+ d_aa/r^2`.
    Printed,
}

/// Second-order central-difference versions of the polar generators.
#[derive(Debug, Clone, Copy)]
pub struct PolarOperators {
    pub h: f64,
    pub kzero_form: KzeroForm,
}

struct Derivs {
    f: Complex64,
    dr: Complex64,
    drr: Complex64,
    daa: Complex64,
}

impl PolarOperators {
    pub fn new(h: f64) -> Self {
        Self {
            h,
            kzero_form: KzeroForm::Consistent,
        }
    }

    fn derivs(&self, f: &dyn Fn(f64, f64) -> Complex64, r: f64, a: f64) -> Derivs {
        let h = self.h;
        let c = f(r, a);
        let (rp, rm) = (f(r + h, a), f(r - h, a));
        let (ap, am) = (f(r, a + h), f(r, a - h));
        Derivs {
            f: c,
            dr: (rp - rm) / (2.0 * h),
            drr: (rp - c * 2.0 + rm) / (h * h),
            daa: (ap - c * 2.0 + am) / (h * h),
        }
    }

    pub fn kzero<'a>(&'a self, f: Field<'a>) -> Field<'a> {
        let sign = match self.kzero_form {
            KzeroForm::Consistent => -1.0,
            KzeroForm::Printed => 1.0,
        };
        Box::new(move |r, a| {
            let d = self.derivs(&f, r, a);
            (d.f * (r * r) - d.drr - d.dr / r + d.daa * (sign / (r * r))) * 0.25
        })
    }

    /// `(r^2 - 2r d_r - 2 + d_rr + d_r/r + d_aa/r^2)/4`
    pub fn kplus<'a>(&'a self, f: Field<'a>) -> Field<'a> {
        Box::new(move |r, a| {
            let d = self.derivs(&f, r, a);
            (d.f * (r * r - 2.0) - d.dr * (2.0 * r) + d.drr + d.dr / r + d.daa / (r * r)) * 0.25
        })
    }

    /// `(r^2 + 2r d_r + 2 + d_rr + d_r/r + d_aa/r^2)/4`
    pub fn kminus<'a>(&'a self, f: Field<'a>) -> Field<'a> {
        Box::new(move |r, a| {
            let d = self.derivs(&f, r, a);
            (d.f * (r * r + 2.0) + d.dr * (2.0 * r) + d.drr + d.dr / r + d.daa / (r * r)) * 0.25
        })
    }

    /// `K0^2 - (K+K- + K-K+)/2`, composed from the difference operators.
    pub fn casimir<'a, F>(&'a self, f: &'a F) -> Field<'a>
    where
        F: Fn(f64, f64) -> Complex64 + 'a,
    {
        let k0k0 = self.kzero(self.kzero(Box::new(f)));
        let kpkm = self.kplus(self.kminus(Box::new(f)));
        let kmkp = self.kminus(self.kplus(Box::new(f)));
        Box::new(move |r, a| k0k0(r, a) - (kpkm(r, a) + kmkp(r, a)) * 0.5)
    }
}

/// Default sample radii for realization checks.
pub const REALIZATION_RADII: [f64; 5] = [0.6, 1.0, 1.4, 1.8, 2.2];
pub const REALIZATION_ANGLE: f64 = 0.4;

#[derive(Debug, Clone, Serialize)]
pub struct RealizationReport {
    pub total: usize,
    pub m: usize,
    pub h: f64,
    pub kzero_expected: f64,
    pub casimir_expected: f64,
    /// Max `|K0 psi - (N+1)/2 psi|` at step `h` and `h/2`.
    pub kzero_residual: [f64; 2],
    /// Max `|K^2 psi - (m^2-1)/4 psi|` at step `h` and `h/2`.
    pub casimir_residual: [f64; 2],
    pub kzero_ratio: f64,
    pub casimir_ratio: f64,
    /// K0 residual at step `h` with the printed `+d_aa/r^2` sign.
    pub printed_kzero_residual: f64,
    pub ladder_residual: f64,
    /// Set when the residual at `h` is not small relative to the eigenvalue.
    pub coarse_grid: Option<String>,
}

/// Applies the polar K0 and Casimir to `psi'_{N,m}` at steps `h` and
/// `h/2`, and checks the two-mode ladder bookkeeping.
pub fn realization_checks(q: &TwoModeQuantumNumbers, h: f64) -> Result<RealizationReport> {
    if !(h > 0.0 && h < REALIZATION_RADII[0]) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step must be in (0, {}), got {h}",
            REALIZATION_RADII[0]
        )));
    }
    let psi = |r: f64, a: f64| ho_eigenfunction(q, r, a);
    let residuals = |step: f64, form: KzeroForm| {
        let ops = PolarOperators {
            h: step,
            kzero_form: form,
        };
        let k0 = ops.kzero(Box::new(psi));
        let cas = ops.casimir(&psi);
        let mut rk = 0.0f64;
        let mut rc = 0.0f64;
        for &r in &REALIZATION_RADII {
            let v = psi(r, REALIZATION_ANGLE);
            rk = rk.max((k0(r, REALIZATION_ANGLE) - v * q.kzero_eigenvalue()).norm());
            rc = rc.max((cas(r, REALIZATION_ANGLE) - v * q.casimir_eigenvalue()).norm());
        }
        (rk, rc)
    };
    let (k1, c1) = residuals(h, KzeroForm::Consistent);
    let (k2, c2) = residuals(0.5 * h, KzeroForm::Consistent);
    let (printed, _) = residuals(h, KzeroForm::Printed);
    let scale = q.kzero_eigenvalue().max(1.0);
    let coarse_grid = (k1 > 1e-2 * scale || c1 > 1e-2 * scale)
        .then(|| format!("step {h} leaves residuals {k1:e} / {c1:e}; refine the grid"));
    Ok(RealizationReport {
        total: q.total,
        m: q.m,
        h,
        kzero_expected: q.kzero_eigenvalue(),
        casimir_expected: q.casimir_eigenvalue(),
        kzero_residual: [k1, k2],
        casimir_residual: [c1, c2],
        kzero_ratio: k1 / k2,
        casimir_ratio: c1 / c2,
        printed_kzero_residual: printed,
        ladder_residual: two_mode_ladder_residual(q),
        coarse_grid,
    })
}

/// One parameter point of the closed-form audit.
#[derive(Debug, Clone, Serialize)]
pub struct AuditEntry {
    pub m: usize,
    pub n: usize,
    pub tau: f64,
    pub phi: f64,
    pub sigma_re: f64,
    pub sigma_im: f64,
    /// Largest |series| on the grid, for scale.
    pub series_max: f64,
    /// Printed form vs series; `None` where the printed form is singular.
    pub printed_diff: Option<f64>,
    /// Printed form at `-zeta` with `(1 - sigma) -> (1 + sigma)`, divided by
    /// `sqrt(2)`, vs series.
    pub printed_repaired_diff: Option<f64>,
    pub corrected_diff: f64,
}

/// Machine-readable comparison of the printed closed form against the
/// series route.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormAudit {
    pub tolerance: f64,
    pub radial_points: usize,
    pub angles: Vec<f64>,
    pub entries: Vec<AuditEntry>,
    pub printed_max_diff: f64,
    pub printed_repaired_max_diff: f64,
    pub corrected_max_diff: f64,
    pub printed_matches: bool,
    pub diagnosis: String,
}

pub struct AuditGrid {
    pub m: Vec<usize>,
    pub n: Vec<usize>,
    pub tau: Vec<f64>,
    pub phi: Vec<f64>,
    pub radial_points: usize,
    pub r_max: f64,
    pub angles: Vec<f64>,
}

impl Default for AuditGrid {
    fn default() -> Self {
        Self {
            m: vec![0, 1, 2],
            n: vec![0, 1, 2, 3],
            tau: vec![0.3, 0.6, 0.9],
            phi: vec![0.0, 1.0],
            radial_points: 20,
            r_max: 4.0,
            angles: (0..4).map(|j| 0.25 + 0.5 * PI * j as f64).collect(),
        }
    }
}

pub fn audit_closed_form(grid: &AuditGrid, tol: f64) -> Result<ClosedFormAudit> {
    let (radii, _) = gauss_legendre_on(grid.radial_points, 0.0, grid.r_max);
    let mut entries = Vec::new();
    for &m in &grid.m {
        for &n in &grid.n {
            for &tau in &grid.tau {
                for &phi in &grid.phi {
                    let p = DisplacementParams::new(tau, phi)?;
                    let q = TwoModeQuantumNumbers::from_radial(n, m);
                    let series = SeriesWavefunction::new(&q, &p, 1e-15)?;
                    let mut series_max = 0.0f64;
                    let mut printed: Option<f64> = Some(0.0);
                    let mut repaired: Option<f64> = Some(0.0);
                    let mut corrected = 0.0f64;
                    for &r in &radii {
                        for &a in &grid.angles {
                            let s = series.eval(r, a);
                            series_max = series_max.max(s.norm());
                            let track = |acc: Option<f64>, v: Result<Complex64>| match (acc, v) {
                                (Some(x), Ok(v)) => Some(x.max((v - s).norm())),
                                _ => None,
                            };
                            printed = track(printed, pncs_wavefunction_closed(&q, &p, r, a));
                            repaired = track(
                                repaired,
                                closed_form_raw(n, m, -p.zeta, r, a, true)
                                    .map(|v| v * FRAC_1_SQRT_2),
                            );
                            corrected = corrected
                                .max((pncs_wavefunction_corrected(&q, &p, r, a) - s).norm());
                        }
                    }
                    let sig = sigma(p.zeta).unwrap_or_default();
                    entries.push(AuditEntry {
                        m,
                        n,
                        tau,
                        phi,
                        sigma_re: sig.re,
                        sigma_im: sig.im,
                        series_max,
                        printed_diff: printed,
                        printed_repaired_diff: repaired,
                        corrected_diff: corrected,
                    });
                }
            }
        }
    }
    let worst = |f: &dyn Fn(&AuditEntry) -> Option<f64>| {
        entries
            .iter()
            .map(|e| f(e).unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    };
    let printed_max_diff = worst(&|e| e.printed_diff);
    let printed_repaired_max_diff = worst(&|e| e.printed_repaired_diff);
    let corrected_max_diff = worst(&|e| Some(e.corrected_diff));
    let printed_matches = printed_max_diff <= tol;
    let diagnosis = if printed_matches {
        "printed closed form agrees with the series route".to_string()
    } else {
        format!(
            "printed closed form disagrees with the series route (max |diff| {printed_max_diff:.3e}). \
             Evaluated at -zeta with the Laguerre argument r^2 sigma/((1-zeta)(1+sigma)) and divided by \
             sqrt(2) it agrees to {printed_repaired_max_diff:.3e}: the printed form uses the opposite sign \
             of zeta relative to the (-1)^n_r oscillator basis, (1-sigma) must read (1+sigma), and the \
             prefactor sqrt(2/pi) gives norm 2 against r dr d(angle). The corrected closed form \
             agrees to {corrected_max_diff:.3e}."
        )
    };
    Ok(ClosedFormAudit {
        tolerance: tol,
        radial_points: grid.radial_points,
        angles: grid.angles.clone(),
        entries,
        printed_max_diff,
        printed_repaired_max_diff,
        corrected_max_diff,
        printed_matches,
        diagnosis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(tau: f64, phi: f64) -> DisplacementParams {
        DisplacementParams::new(tau, phi).unwrap()
    }

    #[test]
    fn quantum_numbers() {
        let q = TwoModeQuantumNumbers::new(4, 2).unwrap();
        assert_eq!((q.n_r, q.l, q.k.value()), (1, 2.5, 1.5));
        assert_eq!(q.kzero_eigenvalue(), q.k.value() + q.n_r as f64);
        assert!(TwoModeQuantumNumbers::new(3, 2).is_err());
        assert!(TwoModeQuantumNumbers::new(1, 3).is_err());
        let g = TwoModeQuantumNumbers::new(0, 0).unwrap();
        assert_eq!((g.kzero_eigenvalue(), g.casimir_eigenvalue()), (0.5, -0.25));
    }

    #[test]
    fn two_mode_ladders() {
        let ket = TwoModeKet::new(2, 0).unwrap();
        let (c, out) = ket.a().unwrap();
        assert_eq!((c, out), (1.0, TwoModeKet { total: 1, m: -1 }));
        assert!(TwoModeKet::new(0, 0).unwrap().a().is_none());
        for total in 0..8 {
            for m in (0..=total).filter(|m| (total - m) % 2 == 0) {
                let q = TwoModeQuantumNumbers::new(total, m).unwrap();
                assert!(two_mode_ladder_residual(&q) < 1e-14, "N={total} m={m}");
            }
        }
    }

    #[test]
    fn ho_ground_value_at_origin() {
        let q = TwoModeQuantumNumbers::from_radial(0, 0);
        assert!((ho_eigenfunction(&q, 0.0, 1.3).re - 1.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ho_eigenfunctions_are_orthonormal() {
        let quad = RadialQuadrature::for_state(DEFAULT_RADIAL_NODES, 6, 2, 0.0);
        for m in 0..3 {
            for a in 0..4 {
                for b in 0..4 {
                    let ov =
                        quad.overlap(|r| ho_radial(a, m, r).into(), |r| ho_radial(b, m, r).into());
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (ov.re - want).abs() < 1e-8 && ov.im == 0.0,
                        "m={m} {a},{b}: {ov}"
                    );
                }
            }
        }
    }

    #[test]
    fn series_reduces_to_oscillator_at_zero() {
        let p = params(0.0, 0.0);
        for &(n, m) in &[(0, 0), (2, 1), (3, 2)] {
            let q = TwoModeQuantumNumbers::from_radial(n, m);
            let w = SeriesWavefunction::new(&q, &p, 1e-14).unwrap();
            for &r in &[0.2, 1.1, 2.5] {
                let d = (w.eval(r, 0.7) - ho_eigenfunction(&q, r, 0.7)).norm();
                assert!(d < 1e-14, "{d}");
                assert_eq!(
                    pncs_wavefunction_closed(&q, &p, r, 0.7).unwrap(),
                    ho_eigenfunction(&q, r, 0.7)
                );
            }
        }
    }

    #[test]
    fn printed_ground_state_is_series_at_negative_zeta() {
        let p = params(0.8, 0.4);
        let flipped = params(-0.8, 0.4);
        let q = TwoModeQuantumNumbers::from_radial(0, 1);
        let w = SeriesWavefunction::new(&q, &flipped, 1e-15).unwrap();
        let mut diff_literal = 0.0f64;
        let ws = SeriesWavefunction::new(&q, &p, 1e-15).unwrap();
        for &r in &[0.3, 0.9, 1.5, 2.2] {
            assert!(
                (w.eval(r, 0.3) - ground_state_printed(1, &p, r, 0.3) * FRAC_1_SQRT_2).norm()
                    < 1e-12
            );
            diff_literal =
                diff_literal.max((ws.eval(r, 0.3) - ground_state_printed(1, &p, r, 0.3)).norm());
        }
        assert!(diff_literal > 1e-2);
    }

    #[test]
    fn corrected_form_matches_series() {
        for &(n, m, tau, phi) in &[
            (0, 0, 0.3, 0.0),
            (2, 1, 0.8, 0.4),
            (3, 2, 0.9, 1.0),
            (1, 0, -0.5, 2.0),
        ] {
            let q = TwoModeQuantumNumbers::from_radial(n, m);
            let p = params(tau, phi);
            let w = SeriesWavefunction::new(&q, &p, 1e-15).unwrap();
            for &r in &[0.1, 0.7, 1.6, 2.9] {
                let d = (w.eval(r, 0.2) - pncs_wavefunction_corrected(&q, &p, r, 0.2)).norm();
                assert!(d < 1e-10, "{n} {m} {tau}: {d}");
            }
        }
    }

    #[test]
    fn printed_form_singular_at_sigma_one() {
        // zeta = -0.5 real: tau = 2 artanh(1/2), phi = 0
        let p = params(2.0 * 0.5f64.atanh(), 0.0);
        assert!((p.zeta.re + 0.5).abs() < 1e-15);
        assert!((sigma(p.zeta).unwrap() - 1.0).norm() < 1e-12);
        let q = TwoModeQuantumNumbers::from_radial(2, 1);
        assert_eq!(
            pncs_wavefunction_closed(&q, &p, 1.0, 0.0),
            Err(Error::SingularClosedForm)
        );
        assert!(pncs_wavefunction_corrected(&q, &p, 1.0, 0.0).is_finite());
    }

    #[test]
    fn series_wavefunction_is_normalized() {
        for &(n, m, tau) in &[(0, 0, 0.9), (2, 1, 0.6), (3, 2, 0.9)] {
            let q = TwoModeQuantumNumbers::from_radial(n, m);
            let p = params(tau, 0.7);
            let w = SeriesWavefunction::new(&q, &p, 1e-15).unwrap();
            let quad = RadialQuadrature::for_state(DEFAULT_RADIAL_NODES, n, m, p.zeta.norm());
            let norm = quad.norm_sqr(|r| w.radial(r));
            assert!((norm - 1.0).abs() < 1e-7, "{n} {m}: {norm}");
        }
    }

    #[test]
    fn energies() {
        let q = TwoModeQuantumNumbers::from_radial(0, 0);
        assert!(
            amplifier_energy(&q, &AmplifierSpec::new(1.0, 0.0, 0.0).unwrap())
                .unwrap()
                .abs()
                < 1e-15
        );
        let q = TwoModeQuantumNumbers::from_radial(1, 2);
        let e = amplifier_energy(&q, &AmplifierSpec::new(1.0, 0.6, 0.0).unwrap()).unwrap();
        assert!((e - 3.0).abs() < 1e-14);
        let err = amplifier_energy(&q, &AmplifierSpec::new(1.0, 1.0, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::AboveThreshold { .. }));
    }

    #[test]
    fn tilt_uses_chi_over_omega() {
        let a = AmplifierSpec::new(1.0, 0.6, 0.3).unwrap();
        let t = a.tilt().unwrap();
        assert!((t.params.tau - 0.6f64.atanh()).abs() < 1e-15);
        assert!((t.omega_eff - 1.6).abs() < 1e-15);
    }

    #[test]
    fn realization_ground_state() {
        let r = realization_checks(&TwoModeQuantumNumbers::new(0, 0).unwrap(), 0.02).unwrap();
        assert_eq!((r.kzero_expected, r.casimir_expected), (0.5, -0.25));
        assert!(r.kzero_residual[0] < 1e-3 && r.casimir_residual[0] < 1e-3);
        assert!((r.kzero_ratio - 4.0).abs() < 0.3 && (r.casimir_ratio - 4.0).abs() < 0.3);
        assert!(r.coarse_grid.is_none());
    }

    #[test]
    fn realization_excited_state() {
        let r = realization_checks(&TwoModeQuantumNumbers::new(4, 2).unwrap(), 0.01).unwrap();
        assert!(r.kzero_residual[0] < 1e-3, "{r:?}");
        assert!(r.printed_kzero_residual > 0.1);
        assert!(r.ladder_residual < 1e-14);
    }

    #[test]
    fn audit_reports_discrepancy() {
        let grid = AuditGrid {
            m: vec![1],
            n: vec![0, 2],
            tau: vec![0.8],
            phi: vec![0.4],
            ..AuditGrid::default()
        };
        let a = audit_closed_form(&grid, 1e-8).unwrap();
        assert!(!a.printed_matches);
        assert!(a.printed_repaired_max_diff < 1e-10);
        assert!(a.corrected_max_diff < 1e-10);
        assert!(a.diagnosis.contains("(1+sigma)"));
    }
}
