//! Truncated discrete-series representation of su(1,1).
//!
//! Levels `n = 0..dim` carry the Fock states `|k,n>`. The top
//! [`guard_band`] levels are excluded from identity checks: truncation
//! necessarily breaks `[K-,K+] = 2K0` at the upper edge of the window.

use crate::error::{finite, Error, Result};
use crate::linalg::{commutator, max_abs_window, CMatrix};
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BargmannIndex(f64);

impl BargmannIndex {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k > 0.0 {
            Ok(Self(k))
        } else {
            Err(Error::InvalidBargmannIndex(k))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Casimir eigenvalue k(k-1).
    pub fn casimir_value(self) -> f64 {
        self.0 * (self.0 - 1.0)
    }
}

/// Number of top levels excluded from algebra checks.
pub fn guard_band(dim: usize) -> usize {
    (dim / 8).max(4)
}

/// Levels below the guard band.
pub fn interior_dim(dim: usize) -> usize {
    dim.saturating_sub(guard_band(dim))
}

/// K+ matrix element <k,n+1|K+|k,n>.
pub fn raising_factor(k: f64, n: usize) -> f64 {
    let n = n as f64;
    ((n + 1.0) * (2.0 * k + n)).sqrt()
}

/// K- matrix element <k,n-1|K-|k,n>; zero at n = 0.
pub fn lowering_factor(k: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    (n * (2.0 * k + n - 1.0)).sqrt()
}

#[derive(Debug, Clone)]
pub struct TruncatedRep {
    k: BargmannIndex,
    kplus: CMatrix,
    kminus: CMatrix,
    kzero: CMatrix,
}

/// Max-entry residuals of the three commutation relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorResiduals {
    /// `[K0,K+] - K+`
    pub raising: f64,
    /// `[K0,K-] + K-`
    pub lowering: f64,
    /// `[K-,K+] - 2K0`
    pub closure: f64,
}

impl CommutatorResiduals {
    pub fn max(&self) -> f64 {
        self.raising.max(self.lowering).max(self.closure)
    }
}

impl TruncatedRep {
    /// Builds K+, K-, K0 on levels `0..dim` from the closed matrix elements.
    pub fn new(k: BargmannIndex, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall { got: dim, min: 2 });
        }
        let kv = k.value();
        let mut kplus = CMatrix::zeros(dim, dim);
        for n in 0..dim - 1 {
            kplus[(n + 1, n)] = Complex64::new(raising_factor(kv, n), 0.0);
        }
        let kminus = kplus.adjoint();
        let kzero = CMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                Complex64::new(kv + i as f64, 0.0)
            } else {
                ZERO
            }
        });
        Ok(Self {
            k,
            kplus,
            kminus,
            kzero,
        })
    }

    pub fn with_index(k: f64, dim: usize) -> Result<Self> {
        Self::new(BargmannIndex::new(k)?, dim)
    }

    pub fn k(&self) -> BargmannIndex {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.kzero.nrows()
    }

    pub fn interior_dim(&self) -> usize {
        interior_dim(self.dim())
    }

    pub fn kplus(&self) -> &CMatrix {
        &self.kplus
    }

    pub fn kminus(&self) -> &CMatrix {
        &self.kminus
    }

    pub fn kzero(&self) -> &CMatrix {
        &self.kzero
    }

    /// K0^2 - (K+K- + K-K+)/2.
    pub fn casimir(&self) -> CMatrix {
        let kk = &self.kzero * &self.kzero;
        let sym = &self.kplus * &self.kminus + &self.kminus * &self.kplus;
        kk - sym.scale(0.5)
    }

    pub fn commutator_residuals(&self, window: usize) -> CommutatorResiduals {
        let (kp, km, k0) = (&self.kplus, &self.kminus, &self.kzero);
        CommutatorResiduals {
            raising: max_abs_window(&(commutator(k0, kp) - kp), window),
            lowering: max_abs_window(&(commutator(k0, km) + km), window),
            closure: max_abs_window(&(commutator(km, kp) - k0.scale(2.0)), window),
        }
    }

    /// Max deviation of the Casimir block from k(k-1) times the identity.
    pub fn casimir_residual(&self, window: usize) -> f64 {
        let c = self.casimir();
        let target = CMatrix::identity(self.dim(), self.dim()).scale(self.k.casimir_value());
        max_abs_window(&(c - target), window)
    }
}

/// Complex amplitudes over `|k,0>, ..., |k,dim-1>`.
///
/// `leaked` accumulates weight pushed past the top of the window by ladder
/// actions or dropped by a truncated series; it is counted in
/// [`StateVector::tail_mass`] and never silently discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    k: BargmannIndex,
    amplitudes: Vec<Complex64>,
    leaked: f64,
}

impl StateVector {
    pub fn new(k: BargmannIndex, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_leak(k, amplitudes, 0.0)
    }

    pub fn with_leak(k: BargmannIndex, amplitudes: Vec<Complex64>, leaked: f64) -> Result<Self> {
        if amplitudes.len() < 2 {
            return Err(Error::DimensionTooSmall {
                got: amplitudes.len(),
                min: 2,
            });
        }
        for a in &amplitudes {
            finite("amplitude", a.re)?;
            finite("amplitude", a.im)?;
        }
        Ok(Self {
            k,
            amplitudes,
            leaked,
        })
    }

    /// The basis state `|k,n>`.
    pub fn basis(k: BargmannIndex, dim: usize, n: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::LevelOutOfRange { n, limit: dim });
        }
        let mut a = vec![ZERO; dim];
        a[n] = Complex64::new(1.0, 0.0);
        Self::new(k, a)
    }

    pub fn k(&self) -> BargmannIndex {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn leaked(&self) -> f64 {
        self.leaked
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Weight in the guard band plus weight lost past the window.
    pub fn tail_mass(&self) -> f64 {
        let start = interior_dim(self.dim());
        self.amplitudes[start..]
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            + self.leaked
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            k: self.k,
            amplitudes: self.amplitudes.iter().map(|a| a * c).collect(),
            leaked: self.leaked * c.norm_sqr(),
        }
    }

    /// K+ applied by shifting amplitudes up one level.
    pub fn apply_raising(&self) -> Self {
        let k = self.k.value();
        let dim = self.dim();
        let mut out = vec![ZERO; dim];
        for n in 0..dim - 1 {
            out[n + 1] = self.amplitudes[n] * raising_factor(k, n);
        }
        let escaped = (self.amplitudes[dim - 1] * raising_factor(k, dim - 1)).norm_sqr();
        Self {
            k: self.k,
            amplitudes: out,
            leaked: self.leaked + escaped,
        }
    }

    /// K- applied by shifting amplitudes down one level.
    pub fn apply_lowering(&self) -> Self {
        let k = self.k.value();
        let dim = self.dim();
        let mut out = vec![ZERO; dim];
        for n in 1..dim {
            out[n - 1] = self.amplitudes[n] * lowering_factor(k, n);
        }
        Self {
            k: self.k,
            amplitudes: out,
            leaked: self.leaked,
        }
    }

    pub fn apply_kzero(&self) -> Self {
        let k = self.k.value();
        Self {
            k: self.k,
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(n, a)| a * (k + n as f64))
                .collect(),
            leaked: self.leaked,
        }
    }

    /// Dense matrix applied to the amplitudes.
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<Self> {
        if m.ncols() != self.dim() || m.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: m.ncols(),
                right: self.dim(),
            });
        }
        Ok(Self {
            k: self.k,
            amplitudes: crate::linalg::matvec(m, &self.amplitudes),
            leaked: self.leaked,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_compatible(self, other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Euclidean norm of `self - other`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_compatible(self, other)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }
}

fn check_compatible(a: &StateVector, b: &StateVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    if a.k != b.k {
        return Err(Error::IndexMismatch {
            left: a.k.value(),
            right: b.k.value(),
        });
    }
    Ok(())
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    check_compatible(a, b)?;
    Ok(a.amplitudes
        .iter()
        .zip(&b.amplitudes)
        .map(|(x, y)| x.conj() * y)
        .sum())
}
