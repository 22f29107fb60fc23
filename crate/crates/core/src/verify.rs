//! Runnable verification suite: every invariant of the library checked
//! against its pinned tolerance, grouped by acceptance criterion.

use crate::algebra::{interior_dim, BargmannIndex, TruncatedRep};
use crate::amplifier::{
    amplifier_energy, audit_closed_form, ground_state_printed, ho_radial,
    pncs_wavefunction_corrected, realization_checks, AmplifierSpec, AuditGrid, ClosedFormAudit,
    RadialQuadrature, SeriesWavefunction, TwoModeQuantumNumbers, DEFAULT_RADIAL_NODES,
};
use crate::displacement::{
    column_state, displacement_exponential, displacement_normal_form, gram_matrix,
    l_operator_closed, l_operator_conjugated, partial_completeness, pncs_ladder_check, pncs_series,
    standard_coherent_state, DisplacementParams, Generator,
};
use crate::dynamics::{
    eigen_energy, eigen_residual, evolution_trace, hamiltonian_matrix, tilt_parameters,
    Su11Hamiltonian,
};
use crate::error::Result;
use crate::linalg::{
    commutator, hermitian_eigenvalues, identity, max_abs_window, max_diff_window,
    max_offdiag_window, mul, mul_sparse, CMatrix,
};
use crate::output::format_float;
use crate::special::gauss_legendre_on;
use num_complex::Complex64;
use serde::{Serialize, Serializer};
use std::f64::consts::PI;
use std::io::Write;

/// Levels compared for identities that involve the displacement operator.
pub const DISPLACEMENT_WINDOW: usize = 16;
pub const DEFAULT_DIM: usize = 128;

const BARGMANN_GRID: [f64; 4] = [0.5, 1.0, 1.5, 2.3];
const TAU_GRID: [f64; 4] = [0.2, 0.5, 0.9, 1.2];
/// `|zeta|` between 0.6 and 0.8.
const TAU_WIDE: [f64; 2] = [1.6, 2.0];
const PHI_GRID: [f64; 3] = [0.0, 0.7, PI];
const TILT_GRID: [(f64, f64); 3] = [(2.0, 0.5), (2.0, 0.8), (3.0, 1.0)];

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyConfig {
    /// Replaces every pinned tolerance.
    pub tol: Option<f64>,
    /// Replaces the truncation of dim-sensitive checks; their failures
    /// become warnings.
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
        }
    }
}

fn f17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        serde_json::value::RawValue::from_string(format_float(*x))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    } else {
        s.serialize_none()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub criterion: u8,
    pub name: String,
    #[serde(serialize_with = "f17")]
    pub max_residual: f64,
    #[serde(serialize_with = "f17")]
    pub tolerance: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_audit: Option<ClosedFormAudit>,
}

impl VerifyReport {
    pub fn criterion_status(&self, criterion: u8) -> Status {
        self.checks
            .iter()
            .filter(|c| c.criterion == criterion)
            .map(|c| c.status)
            .max_by_key(|s| *s as u8)
            .unwrap_or(Status::Pass)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::output::to_json(self)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record([
            "criterion",
            "name",
            "max_residual",
            "tolerance",
            "status",
            "detail",
        ])?;
        for c in &self.checks {
            csv.write_record([
                c.criterion.to_string(),
                c.name.clone(),
                format_float(c.max_residual),
                format_float(c.tolerance),
                c.status.as_str().to_string(),
                c.detail.clone().unwrap_or_default(),
            ])?;
        }
        csv.flush()
    }
}

struct Suite {
    cfg: VerifyConfig,
    checks: Vec<CheckResult>,
    audit: Option<ClosedFormAudit>,
}

impl Suite {
    fn dim(&self, default: usize) -> usize {
        self.cfg.dim.unwrap_or(default)
    }

    fn window(&self, dim: usize) -> usize {
        DISPLACEMENT_WINDOW.min(interior_dim(dim))
    }

    /// Records one check. `sensitive` marks results that depend on the
    /// truncation; with a `--dim` override their failures are warnings.
    fn record(
        &mut self,
        criterion: u8,
        name: &str,
        pinned: f64,
        sensitive: bool,
        value: Result<(f64, Option<String>)>,
    ) {
        let tolerance = self.cfg.tol.unwrap_or(pinned);
        let soften = sensitive && self.cfg.dim.is_some();
        let (max_residual, detail, ok) = match value {
            Ok((r, detail)) => (r, detail, r <= tolerance),
            Err(e) => (f64::INFINITY, Some(e.to_string()), false),
        };
        let status = match (ok, soften) {
            (true, _) => Status::Pass,
            (false, true) => Status::Warn,
            (false, false) => Status::Fail,
        };
        self.checks.push(CheckResult {
            criterion,
            name: name.to_string(),
            max_residual,
            tolerance,
            status,
            detail,
        });
    }

    fn check(
        &mut self,
        criterion: u8,
        name: &str,
        pinned: f64,
        sensitive: bool,
        value: Result<f64>,
    ) {
        self.record(criterion, name, pinned, sensitive, value.map(|v| (v, None)));
    }
}

fn params(tau: f64, phi: f64) -> DisplacementParams {
    DisplacementParams::new(tau, phi).expect("finite grid values")
}

fn idx(k: f64) -> BargmannIndex {
    BargmannIndex::new(k).expect("positive grid values")
}

fn fold_max(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut worst = 0.0f64;
    for v in it {
        let v = v?;
        worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
    }
    Ok(worst)
}

fn displacement_grid(taus: &[f64]) -> Vec<(f64, DisplacementParams)> {
    let mut out = Vec::new();
    for &k in &BARGMANN_GRID {
        for &tau in taus {
            for &phi in &PHI_GRID {
                out.push((k, params(tau, phi)));
            }
        }
    }
    out
}

fn criterion_1(s: &mut Suite) {
    let dims: Vec<usize> = s.cfg.dim.map_or(vec![32, 64, 128], |d| vec![d]);
    // (residual, k, dim, residual relative to the largest K0 entry)
    let mut comm: Vec<(f64, f64, usize, f64)> = Vec::new();
    let mut cas: Vec<(f64, f64, usize, f64)> = Vec::new();
    let mut err = None;
    for &k in &BARGMANN_GRID {
        for &dim in &dims {
            match TruncatedRep::new(idx(k), dim) {
                Ok(rep) => {
                    let w = rep.interior_dim();
                    let scale = k + (w - 1) as f64;
                    let c = rep.commutator_residuals(w).max();
                    let z = rep.casimir_residual(w);
                    comm.push((c, k, dim, c / scale));
                    cas.push((z, k, dim, z / (scale * scale)));
                }
                Err(e) => err = Some(e),
            }
        }
    }
    for (name, rows) in [
        ("commutator closure on interior block", comm),
        ("Casimir equals k(k-1) on interior block", cas),
    ] {
        let value = match (&err, rows.iter().max_by(|a, b| a.0.total_cmp(&b.0))) {
            (Some(e), _) => Err(e.clone()),
            (None, Some(&(r, k, dim, rel))) => Ok((
                r,
                Some(format!(
                    "largest at k = {k}, dim = {dim}; relative to the operator scale {rel:.2e}"
                )),
            )),
            (None, None) => Ok((0.0, None)),
        };
        s.record(1, name, 1e-12, false, value);
    }
}

fn criterion_2(s: &mut Suite) {
    let dim = s.dim(DEFAULT_DIM);
    let w = s.window(dim);
    for (label, taus, tol) in [
        ("|zeta| <= 0.6", &TAU_GRID[..], 1e-10),
        ("|zeta| <= 0.8", &TAU_WIDE[..], 1e-8),
    ] {
        let mut routes = Vec::new();
        let mut unitary = Vec::new();
        let mut inverse = Vec::new();
        for (k, p) in displacement_grid(taus) {
            match TruncatedRep::new(idx(k), dim) {
                Ok(rep) => {
                    let d = displacement_exponential(&rep, &p);
                    routes.push(Ok(max_diff_window(
                        &displacement_normal_form(&rep, &p),
                        &d,
                        w,
                    )));
                    unitary.push(Ok(max_diff_window(
                        &mul(&d.adjoint(), &d),
                        &identity(dim),
                        w,
                    )));
                    inverse.push(Ok(max_diff_window(
                        &displacement_exponential(&rep, &p.inverse()),
                        &d.adjoint(),
                        w,
                    )));
                }
                Err(e) => routes.push(Err(e)),
            }
        }
        s.check(
            2,
            &format!("normal form equals matrix exponential, {label}"),
            tol,
            true,
            fold_max(routes),
        );
        s.check(
            2,
            &format!("D'D = I, {label}"),
            tol,
            true,
            fold_max(unitary),
        );
        s.check(
            2,
            &format!("D(-xi) = D'(xi), {label}"),
            tol,
            true,
            fold_max(inverse),
        );
    }
}

fn criterion_3(s: &mut Suite) {
    let dim = s.dim(DEFAULT_DIM);
    let mut columns = Vec::new();
    let mut ground = Vec::new();
    for (k, p) in displacement_grid(&TAU_GRID) {
        let k = idx(k);
        let rep = match TruncatedRep::new(k, dim) {
            Ok(r) => r,
            Err(e) => {
                columns.push(Err(e));
                continue;
            }
        };
        let d = displacement_exponential(&rep, &p);
        for n in 0..=6 {
            columns.push(
                pncs_series(k, n, &p, dim, 1e-14)
                    .and_then(|r| column_state(k, &d, n).and_then(|c| r.state.max_abs_diff(&c))),
            );
        }
        ground.push(pncs_series(k, 0, &p, dim, 1e-14).and_then(|r| {
            standard_coherent_state(k, &p, dim).and_then(|c| r.state.max_abs_diff(&c))
        }));
    }
    s.check(
        3,
        "series amplitudes equal matrix columns, n <= 6",
        1e-10,
        true,
        fold_max(columns),
    );
    s.check(
        3,
        "n = 0 series equals the standard coherent state",
        1e-12,
        true,
        fold_max(ground),
    );
}

fn criterion_4(s: &mut Suite) {
    let dim = s.dim(DEFAULT_DIM);
    let w = s.window(dim);
    let mut conj = Vec::new();
    let mut closure = Vec::new();
    let mut ladder = Vec::new();
    for (k, p) in displacement_grid(&TAU_GRID) {
        let rep = match TruncatedRep::new(idx(k), dim) {
            Ok(r) => r,
            Err(e) => {
                conj.push(Err(e));
                continue;
            }
        };
        let l: Vec<CMatrix> = Generator::ALL
            .iter()
            .map(|&g| l_operator_closed(&rep, &p, g))
            .collect();
        for (i, &g) in Generator::ALL.iter().enumerate() {
            conj.push(Ok(max_diff_window(
                &l[i],
                &l_operator_conjugated(&rep, &p, g),
                w,
            )));
        }
        let (lp, lm, l0) = (&l[0], &l[1], &l[2]);
        closure.push(Ok(max_abs_window(&(commutator(l0, lp) - lp), w)
            .max(max_abs_window(&(commutator(l0, lm) + lm), w))
            .max(max_abs_window(
                &(commutator(lm, lp) - l0 * Complex64::new(2.0, 0.0)),
                w,
            ))));
        for n in 0..=3 {
            ladder.push(pncs_ladder_check(idx(k), n, &p, dim, 1e-14).map(|r| r.max()));
        }
    }
    s.check(
        4,
        "L closed forms equal D K D'",
        1e-10,
        true,
        fold_max(conj),
    );
    s.check(4, "L commutators close", 1e-11, true, fold_max(closure));
    s.check(
        4,
        "L ladder relations on number coherent states",
        1e-9,
        true,
        fold_max(ladder),
    );
}

fn criterion_5(s: &mut Suite) {
    let dim = s.dim(DEFAULT_DIM);
    let gram = BARGMANN_GRID.iter().map(|&k| {
        let g = gram_matrix(idx(k), &params(0.8, 0.3), 10, dim, 1e-13)?;
        Ok(g.deviation_from_identity())
    });
    let gram = fold_max(gram.collect::<Vec<_>>());
    s.check(
        5,
        "Gram matrix of number coherent states, n <= 10",
        1e-10,
        true,
        gram,
    );
    let cdim = s.dim(160);
    let complete = TruncatedRep::new(idx(1.0), cdim).and_then(|rep| {
        let c = partial_completeness(&rep, &params(0.3, 0.0), 40.min(cdim - 1))?;
        Ok(max_diff_window(&c, &identity(cdim), 21.min(cdim)))
    });
    s.check(
        5,
        "partial completeness, n <= 40, block 0..20",
        1e-8,
        true,
        complete,
    );
}

fn criterion_6(s: &mut Suite) {
    let dim = s.dim(DEFAULT_DIM);
    let w = s.window(dim);
    let sdim = s.dim(192);
    let mut offdiag = Vec::new();
    let mut spectrum = Vec::new();
    let mut residual = Vec::new();
    for &(f, gamma) in &TILT_GRID {
        for &k in &BARGMANN_GRID {
            let h = Su11Hamiltonian::new(f, gamma, 0.4).expect("valid grid");
            let r: Result<()> = (|| {
                let tilt = tilt_parameters(&h)?;
                let rep = TruncatedRep::new(idx(k), dim)?;
                let d = displacement_exponential(&rep, &tilt.params);
                let hd = mul_sparse(&d.adjoint(), &hamiltonian_matrix(&rep, &h));
                offdiag.push(Ok(max_offdiag_window(&mul(&hd, &d), w)));
                let srep = TruncatedRep::new(idx(k), sdim)?;
                let ev = hermitian_eigenvalues(&hamiltonian_matrix(&srep, &h));
                let levels = 6.min(ev.len());
                spectrum.push(Ok((0..levels)
                    .map(|n| (ev[n] - eigen_energy(idx(k), n, &tilt)).abs())
                    .fold(0.0, f64::max)));
                for n in 0..3 {
                    residual.push(eigen_residual(&h, idx(k), n, sdim, 1e-13).map(|r| r.residual));
                }
                Ok(())
            })();
            if let Err(e) = r {
                offdiag.push(Err(e));
            }
        }
    }
    s.check(
        6,
        "tilted Hamiltonian is diagonal",
        1e-9,
        true,
        fold_max(offdiag),
    );
    s.check(
        6,
        "lowest eigenvalues equal (n+k) omega_eff",
        1e-7,
        true,
        fold_max(spectrum),
    );
    s.check(
        6,
        "number coherent states are eigenvectors",
        1e-7,
        true,
        fold_max(residual),
    );
}

fn criterion_7(s: &mut Suite) {
    let dim = s.dim(DEFAULT_DIM);
    let mut phase = Vec::new();
    let mut modulus = Vec::new();
    for &(f, gamma) in &TILT_GRID[..2] {
        for &k in &[0.5, 1.0] {
            for n in 0..2 {
                let h = Su11Hamiltonian::new(f, gamma, 0.7).expect("valid grid");
                match evolution_trace(&h, idx(k), n, dim, 1e-14, &[0.1, 1.0, 5.0]) {
                    Ok(trace) => {
                        for t in trace {
                            phase.push(Ok(t.difference.abs().max(t.state_difference)));
                            modulus.push(Ok((t.overlap_modulus - 1.0).abs()));
                        }
                    }
                    Err(e) => phase.push(Err(e)),
                }
            }
        }
    }
    s.check(
        7,
        "analytic phase equals dense evolution",
        1e-8,
        true,
        fold_max(phase),
    );
    s.check(7, "overlap modulus is one", 1e-12, true, fold_max(modulus));
}

fn criterion_8(s: &mut Suite) {
    let dim = s.dim(192);
    let mut eig = Vec::new();
    let mut mapping = Vec::new();
    let mut uncoupled = Vec::new();
    for &chi in &[0.0, 0.3, 0.6, 0.8] {
        for m in 0..3 {
            let a = AmplifierSpec::new(1.0, chi, 0.5).expect("valid grid");
            let r: Result<()> = (|| {
                let k = idx(0.5 * (m as f64 + 1.0));
                let rep = TruncatedRep::new(k, dim)?;
                let shifted = hamiltonian_matrix(&rep, &a.hamiltonian())
                    - identity(dim) * Complex64::from(a.omega);
                let ev = hermitian_eigenvalues(&shifted);
                let tilt = a.tilt()?;
                for (n, &level) in ev.iter().take(6).enumerate() {
                    let q = TwoModeQuantumNumbers::from_radial(n, m);
                    let e = amplifier_energy(&q, &a)?;
                    eig.push(Ok((level - e).abs()));
                    let closed = 2.0
                        * (a.omega * a.omega - chi * chi).sqrt()
                        * (n as f64 + 0.5 * m as f64 + 0.5)
                        - a.omega;
                    mapping.push(Ok((e - closed)
                        .abs()
                        .max((e - (eigen_energy(k, n, &tilt) - a.omega)).abs())));
                    if chi == 0.0 {
                        uncoupled.push(Ok((e - a.omega * q.total as f64).abs()));
                    }
                }
                Ok(())
            })();
            if let Err(e) = r {
                eig.push(Err(e));
            }
        }
    }
    s.check(
        8,
        "amplifier energies equal mapped eigensolve",
        1e-7,
        true,
        fold_max(eig),
    );
    s.check(
        8,
        "energy formula equals su(1,1) spectrum shifted by -omega",
        1e-12,
        false,
        fold_max(mapping),
    );
    s.check(
        8,
        "chi = 0 gives omega N",
        1e-12,
        false,
        fold_max(uncoupled),
    );
}

fn criterion_9(s: &mut Suite) {
    let mut ho = Vec::new();
    for m in 0..3 {
        let quad = RadialQuadrature::for_state(DEFAULT_RADIAL_NODES, 5, m, 0.0);
        for a in 0..=5 {
            for b in 0..=a {
                let ov = quad.overlap(|r| ho_radial(a, m, r).into(), |r| ho_radial(b, m, r).into());
                let want = if a == b { 1.0 } else { 0.0 };
                ho.push(Ok((ov - want).norm()));
            }
        }
    }
    s.check(
        9,
        "oscillator eigenfunctions orthonormal by quadrature",
        1e-8,
        false,
        fold_max(ho),
    );

    let grid = AuditGrid::default();
    let (radii, _) = gauss_legendre_on(grid.radial_points, 0.0, grid.r_max);
    let mut norms = Vec::new();
    let mut printed = Vec::new();
    let mut corrected = Vec::new();
    for &m in &grid.m {
        for &tau in &grid.tau {
            for &phi in &grid.phi {
                let p = params(tau, phi);
                for &n in &grid.n {
                    let q = TwoModeQuantumNumbers::from_radial(n, m);
                    match SeriesWavefunction::new(&q, &p, 1e-15) {
                        Ok(w) => {
                            let quad = RadialQuadrature::for_state(
                                DEFAULT_RADIAL_NODES,
                                n + 8,
                                m,
                                p.zeta.norm(),
                            );
                            norms.push(Ok((quad.norm_sqr(|r| w.radial(r)) - 1.0).abs()));
                            if n == 0 {
                                let mut lit = 0.0f64;
                                let mut fixed = 0.0f64;
                                for &r in &radii {
                                    for &a in &grid.angles {
                                        let sv = w.eval(r, a);
                                        lit = lit
                                            .max((ground_state_printed(m, &p, r, a) - sv).norm());
                                        let c = pncs_wavefunction_corrected(&q, &p, r, a);
                                        fixed = fixed.max((c - sv).norm());
                                    }
                                }
                                printed.push(Ok(lit));
                                corrected.push(Ok(fixed));
                            }
                        }
                        Err(e) => norms.push(Err(e)),
                    }
                }
            }
        }
    }
    s.check(
        9,
        "series wavefunction normalized",
        1e-7,
        false,
        fold_max(norms),
    );
    let detail = Some(
        "the printed ground state equals the series at -zeta and carries an extra sqrt(2); see the closed-form audit"
            .to_string(),
    );
    let lit = fold_max(printed);
    s.record(
        9,
        "n = 0 series equals the printed ground state",
        1e-10,
        false,
        lit.map(|v| (v, detail)),
    );
    s.check(
        9,
        "n = 0 series equals the corrected ground state",
        1e-10,
        false,
        fold_max(corrected),
    );

    match audit_closed_form(&grid, 1e-8) {
        Ok(audit) => {
            // either agreement or the discrepancy report satisfies the audit
            let tolerance = s.cfg.tol.unwrap_or(1e-8);
            let residual = audit.printed_max_diff;
            let (status, detail) = if residual <= tolerance {
                (Status::Pass, None)
            } else {
                (
                    Status::Warn,
                    Some(format!("discrepancy report produced: {}", audit.diagnosis)),
                )
            };
            s.checks.push(CheckResult {
                criterion: 9,
                name: "printed closed form audited against series".to_string(),
                max_residual: residual,
                tolerance,
                status,
                detail,
            });
            s.check(
                9,
                "corrected closed form equals series",
                1e-8,
                false,
                Ok(audit.corrected_max_diff),
            );
            s.audit = Some(audit);
        }
        Err(e) => s.check(
            9,
            "printed closed form audited against series",
            1e-8,
            false,
            Err(e),
        ),
    }
}

fn criterion_10(s: &mut Suite) {
    let levels = [(0, 0), (1, 1), (2, 0), (2, 2), (3, 1), (4, 2)];
    let mut ratio = Vec::new();
    let mut fine = Vec::new();
    let mut ladder = Vec::new();
    for &(total, m) in &levels {
        match TwoModeQuantumNumbers::new(total, m).and_then(|q| realization_checks(&q, 0.02)) {
            Ok(r) => {
                ratio.push(Ok((r.kzero_ratio - 4.0)
                    .abs()
                    .max((r.casimir_ratio - 4.0).abs())));
                fine.push(Ok(r.kzero_residual[1].max(r.casimir_residual[1])));
                ladder.push(Ok(r.ladder_residual));
            }
            Err(e) => ratio.push(Err(e)),
        }
    }
    s.check(
        10,
        "second-order convergence, |ratio - 4|",
        0.25,
        false,
        fold_max(ratio),
    );
    s.check(
        10,
        "K0 and Casimir eigenvalues at h = 0.01",
        1e-3,
        false,
        fold_max(fine),
    );
    s.check(
        10,
        "two-mode ladder bookkeeping",
        1e-12,
        false,
        fold_max(ladder),
    );
}

/// Criteria in the order they are run.
pub const CRITERIA: [u8; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Runs the checks of a single criterion.
pub fn run_criterion(criterion: u8, cfg: VerifyConfig) -> VerifyReport {
    run_selected(&[criterion], cfg)
}

pub fn run_all(cfg: VerifyConfig) -> VerifyReport {
    run_selected(&CRITERIA, cfg)
}

fn run_selected(criteria: &[u8], cfg: VerifyConfig) -> VerifyReport {
    let mut s = Suite {
        cfg,
        checks: Vec::new(),
        audit: None,
    };
    for &c in criteria {
        match c {
            1 => criterion_1(&mut s),
            2 => criterion_2(&mut s),
            3 => criterion_3(&mut s),
            4 => criterion_4(&mut s),
            5 => criterion_5(&mut s),
            6 => criterion_6(&mut s),
            7 => criterion_7(&mut s),
            8 => criterion_8(&mut s),
            9 => criterion_9(&mut s),
            10 => criterion_10(&mut s),
            _ => {}
        }
    }
    let passed = s.checks.iter().all(|c| c.status != Status::Fail);
    VerifyReport {
        passed,
        checks: s.checks,
        closed_form_audit: s.audit,
    }
}
