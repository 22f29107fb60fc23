//! Displacement operator, number coherent states and the similarity-
//! transformed generators.
//!
//! Two routes are kept side by side for each object: the normal-ordered
//! product `exp(zeta K+) exp(eta K0) exp(-zeta* K-)` against the direct
//! exponential of `xi K+ - xi* K-`, the double series for `D|k,n>` against
//! matrix columns, and closed-form `L` operators against `D K D^dagger`.

use crate::algebra::{guard_band, inner_product, BargmannIndex, StateVector, TruncatedRep};
use crate::error::{finite, Error, Result};
use crate::linalg::{expm, expm_nilpotent, max_abs_window, mul, mul_sparse, CMatrix};
use crate::special::{ln_factorial, ln_gamma};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Coherent-state parameter bundle derived from `(tau, phi)`.
///
/// `xi = -tau/2 e^{-i phi}`, `zeta = -tanh(tau/2) e^{-i phi}`,
/// `eta = ln(1 - |zeta|^2)`, `alpha = sinh(2|xi|)`,
/// `beta = (cosh(2|xi|) - 1)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementParams {
    pub tau: f64,
    /// Reduced to `[0, 2pi)`.
    pub phi: f64,
    pub xi: Complex64,
    pub zeta: Complex64,
    pub eta: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl DisplacementParams {
    pub fn new(tau: f64, phi: f64) -> Result<Self> {
        finite("tau", tau)?;
        finite("phi", phi)?;
        let phi = phi.rem_euclid(TAU);
        let phase = Complex64::from_polar(1.0, -phi);
        let xi = phase * (-0.5 * tau);
        let zeta = phase * (-(0.5 * tau).tanh());
        let abs_xi = xi.norm();
        // ln(1 - tanh^2 x) = -2 ln cosh x, evaluated without cancellation
        let eta = -2.0 * abs_xi.cosh().ln();
        Ok(Self {
            tau,
            phi,
            xi,
            zeta,
            eta,
            alpha: (2.0 * abs_xi).sinh(),
            beta: 0.5 * ((2.0 * abs_xi).cosh() - 1.0),
        })
    }

    /// Parameters of `D(-xi) = D(xi)^dagger`.
    pub fn inverse(&self) -> Self {
        Self::new(-self.tau, self.phi).expect("finite parameters stay finite")
    }

    pub fn is_identity(&self) -> bool {
        self.xi == Complex64::new(0.0, 0.0)
    }

    /// `xi / |xi|`, undefined at `xi = 0`.
    pub fn xi_phase(&self) -> Option<Complex64> {
        if self.is_identity() {
            None
        } else {
            Some(self.xi / self.xi.norm())
        }
    }

    /// Largest componentwise difference between two parameter bundles.
    pub fn distance(&self, other: &Self) -> f64 {
        (self.xi - other.xi)
            .norm()
            .max((self.zeta - other.zeta).norm())
    }
}

/// Normal-ordered displacement `exp(zeta K+) exp(eta K0) exp(-zeta* K-)`.
///
/// The two ladder exponentials are nilpotent on the window and summed
/// exactly; the leading block of the product is free of truncation error.
pub fn displacement_normal_form(rep: &TruncatedRep, p: &DisplacementParams) -> CMatrix {
    let upper = expm_nilpotent(&rep.kplus().map(|z| z * p.zeta));
    let lower = expm_nilpotent(&rep.kminus().map(|z| -z * p.zeta.conj()));
    let diag = rep.kzero().map(|z| {
        if z.re != 0.0 {
            Complex64::new((p.eta * z.re).exp(), 0.0)
        } else {
            z
        }
    });
    mul(&mul_sparse(&upper, &diag), &lower)
}

/// `exp(xi K+ - xi* K-)` by scaling and squaring.
pub fn displacement_exponential(rep: &TruncatedRep, p: &DisplacementParams) -> CMatrix {
    let gen = rep.kplus().map(|z| z * p.xi) - rep.kminus().map(|z| z * p.xi.conj());
    expm(&gen)
}

/// Amplitudes `(1-|zeta|^2)^k sqrt(Gamma(s+2k)/(s! Gamma(2k))) zeta^s` of the
/// standard coherent state `D|k,0>`, by the running product
/// `prod_{i=1..s} sqrt((2k+i-1)/i)`.
pub fn standard_coherent_state(
    k: BargmannIndex,
    p: &DisplacementParams,
    dim: usize,
) -> Result<StateVector> {
    let kv = k.value();
    let mut amps = Vec::with_capacity(dim);
    let mut coeff = Complex64::new((1.0 - p.zeta.norm_sqr()).powf(kv), 0.0);
    for s in 0..dim {
        if s > 0 {
            let sf = s as f64;
            coeff *= p.zeta * ((2.0 * kv + sf - 1.0) / sf).sqrt();
        }
        amps.push(coeff);
    }
    StateVector::new(k, amps)
}

/// A number coherent state `D(xi)|k,n>` from the double series.
#[derive(Debug, Clone)]
pub struct PncsResult {
    pub state: StateVector,
    pub params: DisplacementParams,
    pub source_n: usize,
    pub series_terms_used: usize,
    /// Geometric bound on the magnitude of all omitted terms.
    pub truncation_residual: f64,
}

const MAX_SERIES_TERMS: usize = 200_000;

/// Evaluates `D(xi)|k,n>` by the double sum over `j = 0..=n` and `s >= 0`
///
/// ```text
/// sum_s sum_j zeta^s/s! (-zeta*)^j/j! e^{eta(k+n-j)}
///     sqrt(G(2k+n) G(2k+n-j+s)) / G(2k+n-j)
///   * sqrt(G(n+1) G(n-j+s+1)) / G(n-j+1)  |k, n-j+s>
/// ```
///
/// with all gamma ratios taken through log-gamma. For each `j` the `s` sum
/// stops once the terms decrease and drop below `tol (1 - |zeta|)`.
/// Weight landing past `dim` is counted as leakage; the call fails if the
/// tail mass (guard band plus leakage) exceeds `tol`.
pub fn pncs_series(
    k: BargmannIndex,
    n: usize,
    p: &DisplacementParams,
    dim: usize,
    tol: f64,
) -> Result<PncsResult> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { got: dim, min: 2 });
    }
    if n >= dim {
        return Err(Error::LevelOutOfRange { n, limit: dim });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let result = pncs_series_unchecked(k, n, p, dim, tol)?;
    let tail = result.state.tail_mass();
    if tail > tol {
        return Err(Error::TruncationLeak {
            tail_mass: tail,
            tol,
        });
    }
    Ok(result)
}

pub(crate) fn pncs_series_unchecked(
    k: BargmannIndex,
    n: usize,
    p: &DisplacementParams,
    dim: usize,
    tol: f64,
) -> Result<PncsResult> {
    let r = p.zeta.norm();
    if r >= 1.0 {
        return Err(Error::NotConvergent(r));
    }
    if p.is_identity() {
        return Ok(PncsResult {
            state: StateVector::basis(k, dim, n)?,
            params: *p,
            source_n: n,
            series_terms_used: 1,
            truncation_residual: 0.0,
        });
    }
    let kv = k.value();
    let two_k = 2.0 * kv;
    let nf = n as f64;
    let stop = tol * (1.0 - r);
    let minus_zeta_conj = -p.zeta.conj();

    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let mut overflow: Vec<Complex64> = Vec::new();
    let mut terms = 0usize;
    let mut residual = 0.0f64;

    for j in 0..=n {
        let jf = j as f64;
        let base = n - j;
        let ln_common = 0.5 * ln_gamma(two_k + nf) - ln_gamma(two_k + nf - jf)
            + 0.5 * ln_factorial(n)
            - ln_factorial(base)
            - ln_factorial(j)
            + p.eta * (kv + nf - jf);
        let phase_j = minus_zeta_conj.powu(j as u32);
        let mut prev_mag = f64::INFINITY;
        let mut s = 0usize;
        loop {
            let sf = s as f64;
            let level = base + s;
            let ln_mag =
                ln_common + 0.5 * ln_gamma(two_k + nf - jf + sf) + 0.5 * ln_factorial(level)
                    - ln_factorial(s);
            let term = phase_j * p.zeta.powu(s as u32) * ln_mag.exp();
            let mag = term.norm();
            terms += 1;
            if level < dim {
                amps[level] += term;
            } else {
                let idx = level - dim;
                if overflow.len() <= idx {
                    overflow.resize(idx + 1, Complex64::new(0.0, 0.0));
                }
                overflow[idx] += term;
            }
            if s > 0 && mag <= prev_mag && mag < stop {
                // remaining terms bounded by a geometric tail with ratio -> |zeta|
                residual = residual.max(mag * r / (1.0 - r));
                break;
            }
            prev_mag = mag;
            s += 1;
            if terms > MAX_SERIES_TERMS {
                return Err(Error::NotConvergent(r));
            }
        }
    }

    let leaked = overflow.iter().map(|a| a.norm_sqr()).sum();
    let state = StateVector::with_leak(k, amps, leaked)?;
    Ok(PncsResult {
        state,
        params: *p,
        source_n: n,
        series_terms_used: terms,
        truncation_residual: residual,
    })
}

/// Column `n` of a dense displacement matrix as a state.
pub fn column_state(k: BargmannIndex, d: &CMatrix, n: usize) -> Result<StateVector> {
    if n >= d.ncols() {
        return Err(Error::LevelOutOfRange {
            n,
            limit: d.ncols(),
        });
    }
    StateVector::new(k, d.column(n).iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    Plus,
    Minus,
    Zero,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Plus, Generator::Minus, Generator::Zero];

    pub fn of(self, rep: &TruncatedRep) -> &CMatrix {
        match self {
            Generator::Plus => rep.kplus(),
            Generator::Minus => rep.kminus(),
            Generator::Zero => rep.kzero(),
        }
    }
}

/// `L = D K D^dagger` as a combination of K0, K+, K-:
///
/// ```text
/// L+ = -(xi*/|xi|) alpha K0 + beta (K+ + (xi*/xi) K-) + K+
/// L- = -(xi/|xi|) alpha K0 + beta (K- + (xi/xi*) K+) + K-
/// L0 = (2 beta + 1) K0 - (alpha xi / 2|xi|) K+ - (alpha xi* / 2|xi|) K-
/// ```
///
/// At `xi = 0` the displacement is the identity and `L = K`.
pub fn l_operator_closed(rep: &TruncatedRep, p: &DisplacementParams, which: Generator) -> CMatrix {
    let Some(u) = p.xi_phase() else {
        return which.of(rep).clone();
    };
    let (kp, km, k0) = (rep.kplus(), rep.kminus(), rep.kzero());
    let c = |z: Complex64| move |m: Complex64| m * z;
    let one = Complex64::new(1.0, 0.0);
    let (alpha, beta) = (p.alpha, p.beta);
    match which {
        Generator::Plus => {
            k0.map(c(-u.conj() * alpha))
                + kp.map(c(one * (beta + 1.0)))
                + km.map(c(u.conj() / u * beta))
        }
        Generator::Minus => {
            k0.map(c(-u * alpha)) + km.map(c(one * (beta + 1.0))) + kp.map(c(u / u.conj() * beta))
        }
        Generator::Zero => {
            k0.map(c(one * (2.0 * beta + 1.0)))
                - kp.map(c(u * (0.5 * alpha)))
                - km.map(c(u.conj() * (0.5 * alpha)))
        }
    }
}

/// `D K D^dagger` by explicit conjugation with the exponential route.
pub fn l_operator_conjugated(
    rep: &TruncatedRep,
    p: &DisplacementParams,
    which: Generator,
) -> CMatrix {
    let d = displacement_exponential(rep, p);
    mul(&mul_sparse(&d, which.of(rep)), &d.adjoint())
}

/// Max residuals of the three ladder relations on number coherent states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderResiduals {
    /// `|L+ |z,n> - sqrt((n+1)(2k+n)) |z,n+1>|`
    pub plus: f64,
    /// `|L- |z,n> - sqrt(n(2k+n-1)) |z,n-1>|`
    pub minus: f64,
    /// `|L0 |z,n> - (k+n) |z,n>|`
    pub zero: f64,
    /// Eigenvalue read off as `<z,n|L0|z,n>`.
    pub l0_expectation: f64,
}

impl LadderResiduals {
    pub fn max(&self) -> f64 {
        self.plus.max(self.minus).max(self.zero)
    }
}

/// Checks `L+-`, `L0` acting on `|zeta,k,n>` built by [`pncs_series`], with
/// the closed-form `L` matrices.
pub fn pncs_ladder_check(
    k: BargmannIndex,
    n: usize,
    p: &DisplacementParams,
    dim: usize,
    tol: f64,
) -> Result<LadderResiduals> {
    let limit = dim.saturating_sub(guard_band(dim));
    if n + 1 >= limit {
        return Err(Error::LevelOutOfRange { n: n + 1, limit });
    }
    let rep = TruncatedRep::new(k, dim)?;
    let kv = k.value();
    let state = |m: usize| pncs_series(k, m, p, dim, tol).map(|r| r.state);
    let here = state(n)?;
    let up = state(n + 1)?;

    let apply = |g: Generator| here.apply_matrix(&l_operator_closed(&rep, p, g));
    let plus = apply(Generator::Plus)?
        .max_abs_diff(&up.scaled(crate::algebra::raising_factor(kv, n).into()))?;
    let minus = if n == 0 {
        apply(Generator::Minus)?
            .amplitudes()
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max)
    } else {
        let down = state(n - 1)?;
        apply(Generator::Minus)?
            .max_abs_diff(&down.scaled(crate::algebra::lowering_factor(kv, n).into()))?
    };
    let l0_here = apply(Generator::Zero)?;
    let zero = l0_here.max_abs_diff(&here.scaled((kv + n as f64).into()))?;
    let l0_expectation = inner_product(&here, &l0_here)?.re;
    Ok(LadderResiduals {
        plus,
        minus,
        zero,
        l0_expectation,
    })
}

/// Overlaps `<zeta,k,n'|zeta,k,n>` for `n, n' <= n_max`.
#[derive(Debug, Clone)]
pub struct GramReport {
    pub matrix: CMatrix,
    /// Largest tail mass among the constituent states.
    pub max_tail_mass: f64,
    /// Set when a constituent state leaks more than the tolerance.
    pub warning: Option<String>,
}

impl GramReport {
    pub fn deviation_from_identity(&self) -> f64 {
        let n = self.matrix.nrows();
        max_abs_window(&(&self.matrix - CMatrix::identity(n, n)), n)
    }
}

pub fn gram_matrix(
    k: BargmannIndex,
    p: &DisplacementParams,
    n_max: usize,
    dim: usize,
    tol: f64,
) -> Result<GramReport> {
    let limit = dim.saturating_sub(guard_band(dim));
    if n_max >= limit {
        return Err(Error::LevelOutOfRange { n: n_max, limit });
    }
    // leaky states are reported through `warning` rather than rejected
    let states: Vec<PncsResult> = (0..=n_max)
        .map(|n| pncs_series_unchecked(k, n, p, dim, tol))
        .collect::<Result<_>>()?;
    let max_tail_mass = states
        .iter()
        .map(|s| s.state.tail_mass())
        .fold(0.0, f64::max);
    let size = n_max + 1;
    let mut matrix = CMatrix::zeros(size, size);
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            matrix[(i, j)] = inner_product(&a.state, &b.state)?;
        }
    }
    let warning = (max_tail_mass > tol)
        .then(|| format!("tail mass {max_tail_mass:e} exceeds tolerance {tol:e}; increase dim"));
    Ok(GramReport {
        matrix,
        max_tail_mass,
        warning,
    })
}

/// Partial resolution of the identity `sum_{n <= n_max} |z,n><z,n|`.
///
/// Uses columns of the exponential route: the double series loses digits
/// to cancellation above n ~ 20.
pub fn partial_completeness(
    rep: &TruncatedRep,
    p: &DisplacementParams,
    n_max: usize,
) -> Result<CMatrix> {
    if n_max >= rep.dim() {
        return Err(Error::LevelOutOfRange {
            n: n_max,
            limit: rep.dim(),
        });
    }
    let d = displacement_exponential(rep, p);
    let cols = d.columns(0, n_max + 1);
    Ok(mul(&cols.into_owned(), &cols.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_diff_window};

    fn idx(k: f64) -> BargmannIndex {
        BargmannIndex::new(k).unwrap()
    }

    #[test]
    fn zero_displacement() {
        let p = DisplacementParams::new(0.0, 0.0).unwrap();
        assert_eq!(p.xi, Complex64::new(-0.0, 0.0));
        assert_eq!(
            (p.zeta.norm(), p.eta, p.alpha, p.beta),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert!(p.is_identity() && p.xi_phase().is_none());
    }

    #[test]
    fn params_values() {
        // -tanh(0.5), -2 ln cosh(0.5)
        let p = DisplacementParams::new(1.0, 0.0).unwrap();
        assert!((p.zeta.re + 0.46211715726000974).abs() < 1e-15);
        assert!(p.zeta.im.abs() < 1e-15);
        assert!((p.eta + 0.2402290139165549).abs() < 1e-15);
        let q = DisplacementParams::new(1.0, std::f64::consts::PI).unwrap();
        assert!((q.zeta.re - 0.46211715726000974).abs() < 1e-15);
    }

    #[test]
    fn params_reject_non_finite() {
        assert!(matches!(
            DisplacementParams::new(f64::NAN, 0.0),
            Err(Error::NonFinite { name: "tau", .. })
        ));
        assert!(DisplacementParams::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn params_identities() {
        for &(tau, phi) in &[(0.2, 0.0), (1.3, 2.0), (-0.7, 9.0), (3.0, 0.4)] {
            let p = DisplacementParams::new(tau, phi).unwrap();
            assert!(p.zeta.norm() < 1.0);
            assert!((p.eta - (1.0 - p.zeta.norm_sqr()).ln()).abs() < 1e-14);
            let lhs = p.alpha * p.alpha;
            let rhs = (2.0 * p.beta + 1.0).powi(2) - 1.0;
            assert!((lhs - rhs).abs() < 1e-14 * lhs.max(1.0));
            assert!((0.0..TAU).contains(&p.phi));
        }
    }

    #[test]
    fn both_routes_are_identity_at_zero() {
        let rep = TruncatedRep::with_index(1.0, 16).unwrap();
        let p = DisplacementParams::new(0.0, 0.3).unwrap();
        assert_eq!(
            max_diff_window(&displacement_normal_form(&rep, &p), &identity(16), 16),
            0.0
        );
        assert_eq!(
            max_diff_window(&displacement_exponential(&rep, &p), &identity(16), 16),
            0.0
        );
    }

    #[test]
    fn routes_agree() {
        let rep = TruncatedRep::with_index(1.0, 96).unwrap();
        let p = DisplacementParams::new(0.8, 0.3).unwrap();
        let a = displacement_normal_form(&rep, &p);
        let b = displacement_exponential(&rep, &p);
        assert!(max_diff_window(&a, &b, 16) < 1e-10);
        let dd = b.adjoint() * &b;
        assert!(max_diff_window(&dd, &identity(96), 16) < 1e-10);
        let inv = displacement_exponential(&rep, &p.inverse());
        assert!(max_diff_window(&inv, &b.adjoint(), 16) < 1e-12);
    }

    #[test]
    fn normal_form_column_zero_is_standard_state() {
        let k = idx(1.0);
        let rep = TruncatedRep::new(k, 64).unwrap();
        let p = DisplacementParams::new(1.1, 0.5).unwrap();
        let d = displacement_normal_form(&rep, &p);
        let cs = standard_coherent_state(k, &p, 64).unwrap();
        for s in 0..64 {
            assert!((d[(s, 0)] - cs.amplitudes()[s]).norm() < 1e-10);
        }
    }

    #[test]
    fn series_reduces_to_basis_at_zero() {
        let p = DisplacementParams::new(0.0, 0.0).unwrap();
        let r = pncs_series(idx(1.5), 3, &p, 16, 1e-12).unwrap();
        let b = StateVector::basis(idx(1.5), 16, 3).unwrap();
        assert_eq!(r.state.max_abs_diff(&b).unwrap(), 0.0);
    }

    #[test]
    fn series_ground_state_matches_product_form() {
        for &k in &[0.5, 1.0, 2.3] {
            let p = DisplacementParams::new(0.9, 1.1).unwrap();
            let r = pncs_series(idx(k), 0, &p, 96, 1e-14).unwrap();
            let cs = standard_coherent_state(idx(k), &p, 96).unwrap();
            assert!(r.state.max_abs_diff(&cs).unwrap() < 1e-12);
        }
    }

    #[test]
    fn series_matches_matrix_column() {
        let k = idx(1.0);
        let p = DisplacementParams::new(0.9, 1.1).unwrap();
        let rep = TruncatedRep::new(k, 96).unwrap();
        let d = displacement_exponential(&rep, &p);
        let r = pncs_series(k, 2, &p, 96, 1e-14).unwrap();
        let col = column_state(k, &d, 2).unwrap();
        assert!(r.state.max_abs_diff(&col).unwrap() < 1e-10);
        assert!(r.series_terms_used > 3);
        assert!(r.truncation_residual < 1e-14);
    }

    #[test]
    fn series_errors() {
        let p = DisplacementParams::new(0.5, 0.0).unwrap();
        assert!(matches!(
            pncs_series(idx(1.0), 8, &p, 8, 1e-10),
            Err(Error::LevelOutOfRange { .. })
        ));
        // a state at the top of a small window leaks
        assert!(matches!(
            pncs_series(idx(1.0), 10, &p, 12, 1e-10),
            Err(Error::TruncationLeak { .. })
        ));
    }

    #[test]
    fn l_operators_at_identity() {
        let rep = TruncatedRep::with_index(1.0, 12).unwrap();
        let p = DisplacementParams::new(0.0, 0.0).unwrap();
        for g in Generator::ALL {
            assert_eq!(&l_operator_closed(&rep, &p, g), g.of(&rep));
        }
    }

    #[test]
    fn l_operators_match_conjugation() {
        let rep = TruncatedRep::with_index(1.0, 128).unwrap();
        let p = DisplacementParams::new(0.7, 0.2).unwrap();
        for g in Generator::ALL {
            let a = l_operator_closed(&rep, &p, g);
            let b = l_operator_conjugated(&rep, &p, g);
            assert!(max_diff_window(&a, &b, 16) < 1e-10, "{g:?}");
        }
    }

    #[test]
    fn ladder_relations_on_pncs() {
        let p = DisplacementParams::new(0.6, 0.0).unwrap();
        let r = pncs_ladder_check(idx(1.5), 1, &p, 96, 1e-14).unwrap();
        assert!(r.max() < 1e-9, "{r:?}");
        assert!((r.l0_expectation - 2.5).abs() < 1e-9);
        let z = DisplacementParams::new(0.0, 0.0).unwrap();
        assert!(pncs_ladder_check(idx(1.5), 0, &z, 32, 1e-14).unwrap().max() < 1e-13);
    }

    #[test]
    fn gram_is_identity() {
        let p = DisplacementParams::new(0.8, 0.0).unwrap();
        let g = gram_matrix(idx(1.0), &p, 10, 128, 1e-12).unwrap();
        assert!(g.deviation_from_identity() < 1e-10);
        assert!(g.warning.is_none());
        let z = DisplacementParams::new(0.0, 0.0).unwrap();
        assert_eq!(
            gram_matrix(idx(1.0), &z, 5, 32, 1e-12)
                .unwrap()
                .deviation_from_identity(),
            0.0
        );
    }

    #[test]
    fn gram_warns_on_small_window() {
        let p = DisplacementParams::new(1.2, 0.0).unwrap();
        let g = gram_matrix(idx(1.0), &p, 10, 24, 1e-12).unwrap();
        assert!(g.warning.is_some());
    }

    #[test]
    fn completeness_converges() {
        let rep = TruncatedRep::with_index(1.0, 160).unwrap();
        let p = DisplacementParams::new(0.3, 0.0).unwrap();
        let c = partial_completeness(&rep, &p, 40).unwrap();
        assert!(max_diff_window(&c, &identity(160), 21) < 1e-8);
    }
}
