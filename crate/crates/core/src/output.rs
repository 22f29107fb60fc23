//! Serialized records for the command-line tool.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so every value
//! round-trips bit-exactly. JSON floats go through `RawValue` to keep that
//! formatting; CSV uses fixed headers.

use crate::amplifier::{
    amplifier_energy, pncs_wavefunction_closed, pncs_wavefunction_corrected, AmplifierSpec,
    SeriesWavefunction, TwoModeQuantumNumbers,
};
use crate::displacement::{DisplacementParams, PncsResult};
use crate::dynamics::EvolutionSample;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use std::f64::consts::TAU;
use std::io::Write;

/// `x` with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn f17<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    RawValue::from_string(format_float(*x))
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

fn f17_opt<S: Serializer>(x: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(v) => f17(v, s),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateMeta {
    #[serde(serialize_with = "f17")]
    pub k: f64,
    pub n_source: usize,
    #[serde(serialize_with = "f17")]
    pub zeta_re: f64,
    #[serde(serialize_with = "f17")]
    pub zeta_im: f64,
    #[serde(serialize_with = "f17")]
    pub eta: f64,
    #[serde(serialize_with = "f17")]
    pub tail_mass: f64,
    pub series_terms: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRow {
    pub n: usize,
    #[serde(serialize_with = "f17")]
    pub re: f64,
    #[serde(serialize_with = "f17")]
    pub im: f64,
    #[serde(serialize_with = "f17")]
    pub abs2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub meta: StateMeta,
    pub amplitudes: Vec<AmplitudeRow>,
}

impl StateRecord {
    /// Amplitudes up to the last nonzero level.
    pub fn from_pncs(r: &PncsResult) -> Self {
        let amps = r.state.amplitudes();
        let last = amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0);
        Self {
            meta: StateMeta {
                k: r.state.k().value(),
                n_source: r.source_n,
                zeta_re: r.params.zeta.re,
                zeta_im: r.params.zeta.im,
                eta: r.params.eta,
                tail_mass: r.state.tail_mass(),
                series_terms: r.series_terms_used,
            },
            amplitudes: amps[..=last]
                .iter()
                .enumerate()
                .map(|(n, a)| AmplitudeRow {
                    n,
                    re: a.re,
                    im: a.im,
                    abs2: a.norm_sqr(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))
    }

    /// Metadata as leading `# key=value` lines, then `n,re,im,abs2` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let m = &self.meta;
        writeln!(w, "# k={}", format_float(m.k))?;
        writeln!(w, "# n_source={}", m.n_source)?;
        writeln!(w, "# zeta_re={}", format_float(m.zeta_re))?;
        writeln!(w, "# zeta_im={}", format_float(m.zeta_im))?;
        writeln!(w, "# eta={}", format_float(m.eta))?;
        writeln!(w, "# tail_mass={}", format_float(m.tail_mass))?;
        writeln!(w, "# series_terms={}", m.series_terms)?;
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["n", "re", "im", "abs2"])?;
        for a in &self.amplitudes {
            csv.write_record([
                a.n.to_string(),
                format_float(a.re),
                format_float(a.im),
                format_float(a.abs2),
            ])?;
        }
        csv.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "f17")]
    pub omega: f64,
    #[serde(serialize_with = "f17")]
    pub chi: f64,
    #[serde(serialize_with = "f17")]
    pub energy: f64,
}

pub const SPECTRUM_HEADER: [&str; 5] = ["n", "m", "omega", "chi", "energy"];

/// Energies for `n_r = 0..=n_max` at the given coupling, followed by the
/// uncoupled reference block (`chi = 0`) unless the coupling is already zero.
pub fn spectrum_rows(a: &AmplifierSpec, m: usize, n_max: usize) -> Result<Vec<SpectrumRow>> {
    let mut specs = vec![*a];
    if a.chi != 0.0 {
        specs.push(AmplifierSpec::new(a.omega, 0.0, a.phase)?);
    }
    let mut rows = Vec::new();
    for spec in &specs {
        for n in 0..=n_max {
            let energy = amplifier_energy(&TwoModeQuantumNumbers::from_radial(n, m), spec)?;
            rows.push(SpectrumRow {
                n,
                m,
                omega: spec.omega,
                chi: spec.chi,
                energy,
            });
        }
    }
    Ok(rows)
}

pub fn write_spectrum_csv<W: Write>(rows: &[SpectrumRow], w: W) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(SPECTRUM_HEADER)?;
    for r in rows {
        csv.write_record([
            r.n.to_string(),
            r.m.to_string(),
            format_float(r.omega),
            format_float(r.chi),
            format_float(r.energy),
        ])?;
    }
    csv.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SampleFlag {
    Ok,
    /// The closed form and the series differ by more than the tolerance.
    Mismatch,
    /// The printed closed form is singular here; series only.
    Singular,
}

impl SampleFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleFlag::Ok => "ok",
            SampleFlag::Mismatch => "mismatch",
            SampleFlag::Singular => "singular",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionRow {
    #[serde(serialize_with = "f17")]
    pub r: f64,
    #[serde(serialize_with = "f17")]
    pub angle: f64,
    #[serde(serialize_with = "f17")]
    pub series_re: f64,
    #[serde(serialize_with = "f17")]
    pub series_im: f64,
    #[serde(serialize_with = "f17")]
    pub series_abs2: f64,
    #[serde(serialize_with = "f17_opt")]
    pub closed_re: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    pub closed_im: Option<f64>,
    #[serde(serialize_with = "f17_opt")]
    pub closed_abs2: Option<f64>,
    /// `|closed - series|` for the printed closed form.
    #[serde(serialize_with = "f17_opt")]
    pub difference: Option<f64>,
    /// `|corrected - series|`.
    #[serde(serialize_with = "f17")]
    pub corrected_difference: f64,
    pub flag: SampleFlag,
}

pub const WAVEFUNCTION_HEADER: [&str; 11] = [
    "r",
    "angle",
    "series_re",
    "series_im",
    "series_abs2",
    "closed_re",
    "closed_im",
    "closed_abs2",
    "difference",
    "corrected_difference",
    "flag",
];

/// Samples on `radial_points` equally spaced radii in `[0, r_max]` times
/// `angular_points` equally spaced angles in `[0, 2 pi)`.
pub fn wavefunction_rows(
    q: &TwoModeQuantumNumbers,
    p: &DisplacementParams,
    radial_points: usize,
    angular_points: usize,
    r_max: f64,
    tol: f64,
) -> Result<Vec<WavefunctionRow>> {
    if radial_points < 2 || angular_points < 1 {
        return Err(Error::InvalidArgument(
            "need at least 2 radial and 1 angular points".into(),
        ));
    }
    let series = SeriesWavefunction::new(q, p, tol.min(1e-14))?;
    let mut rows = Vec::with_capacity(radial_points * angular_points);
    for i in 0..radial_points {
        let r = r_max * i as f64 / (radial_points - 1) as f64;
        for j in 0..angular_points {
            let angle = TAU * j as f64 / angular_points as f64;
            let s = series.eval(r, angle);
            let corrected = pncs_wavefunction_corrected(q, p, r, angle);
            let (closed, flag) = match pncs_wavefunction_closed(q, p, r, angle) {
                Ok(c) => {
                    let flag = if (c - s).norm() <= tol {
                        SampleFlag::Ok
                    } else {
                        SampleFlag::Mismatch
                    };
                    (Some(c), flag)
                }
                Err(Error::SingularClosedForm) => (None, SampleFlag::Singular),
                Err(e) => return Err(e),
            };
            rows.push(WavefunctionRow {
                r,
                angle,
                series_re: s.re,
                series_im: s.im,
                series_abs2: s.norm_sqr(),
                closed_re: closed.map(|c| c.re),
                closed_im: closed.map(|c| c.im),
                closed_abs2: closed.map(|c| c.norm_sqr()),
                difference: closed.map(|c| (c - s).norm()),
                corrected_difference: (corrected - s).norm(),
                flag,
            });
        }
    }
    Ok(rows)
}

fn opt(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

pub fn write_wavefunction_csv<W: Write>(rows: &[WavefunctionRow], w: W) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(WAVEFUNCTION_HEADER)?;
    for r in rows {
        csv.write_record([
            format_float(r.r),
            format_float(r.angle),
            format_float(r.series_re),
            format_float(r.series_im),
            format_float(r.series_abs2),
            opt(r.closed_re),
            opt(r.closed_im),
            opt(r.closed_abs2),
            opt(r.difference),
            format_float(r.corrected_difference),
            r.flag.as_str().to_string(),
        ])?;
    }
    csv.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveRow {
    #[serde(serialize_with = "f17")]
    pub t: f64,
    #[serde(serialize_with = "f17")]
    pub phase: f64,
    #[serde(serialize_with = "f17")]
    pub oracle_phase: f64,
    #[serde(serialize_with = "f17")]
    pub difference: f64,
    #[serde(serialize_with = "f17")]
    pub overlap_modulus: f64,
}

impl From<&EvolutionSample> for EvolveRow {
    fn from(s: &EvolutionSample) -> Self {
        Self {
            t: s.t,
            phase: s.phase,
            oracle_phase: s.oracle_phase,
            difference: s.difference,
            overlap_modulus: s.overlap_modulus,
        }
    }
}

pub const EVOLVE_HEADER: [&str; 5] = [
    "t",
    "phase",
    "oracle_phase",
    "difference",
    "overlap_modulus",
];

pub fn write_evolve_csv<W: Write>(rows: &[EvolveRow], w: W) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(EVOLVE_HEADER)?;
    for r in rows {
        csv.write_record(
            [
                r.t,
                r.phase,
                r.oracle_phase,
                r.difference,
                r.overlap_modulus,
            ]
            .map(format_float),
        )?;
    }
    csv.flush()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefunctionMeta {
    pub n_r: usize,
    pub m: usize,
    #[serde(serialize_with = "f17")]
    pub tau: f64,
    #[serde(serialize_with = "f17")]
    pub phi: f64,
    #[serde(serialize_with = "f17")]
    pub zeta_re: f64,
    #[serde(serialize_with = "f17")]
    pub zeta_im: f64,
    #[serde(serialize_with = "f17")]
    pub tolerance: f64,
    /// Largest printed-form difference over non-singular samples.
    #[serde(serialize_with = "f17_opt")]
    pub max_difference: Option<f64>,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefunctionRecord {
    pub meta: WavefunctionMeta,
    pub rows: Vec<WavefunctionRow>,
}

impl WavefunctionRecord {
    pub fn new(
        q: &TwoModeQuantumNumbers,
        p: &DisplacementParams,
        tol: f64,
        rows: Vec<WavefunctionRow>,
    ) -> Self {
        let max_difference = rows.iter().filter_map(|r| r.difference).reduce(f64::max);
        Self {
            meta: WavefunctionMeta {
                n_r: q.n_r,
                m: q.m,
                tau: p.tau,
                phi: p.phi,
                zeta_re: p.zeta.re,
                zeta_im: p.zeta.im,
                tolerance: tol,
                max_difference,
                flagged: rows.iter().filter(|r| r.flag != SampleFlag::Ok).count(),
            },
            rows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveMeta {
    #[serde(serialize_with = "f17")]
    pub k: f64,
    pub n: usize,
    #[serde(serialize_with = "f17")]
    pub omega_eff: f64,
    #[serde(serialize_with = "f17")]
    pub tau: f64,
    #[serde(serialize_with = "f17")]
    pub phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolveRecord {
    pub meta: EvolveMeta,
    pub rows: Vec<EvolveRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRecord {
    pub rows: Vec<SpectrumRow>,
}

/// Pretty JSON for any record, with the 17-digit float formatting.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BargmannIndex;
    use crate::displacement::pncs_series;
    use proptest::prelude::*;

    fn state(k: f64, n: usize, tau: f64, phi: f64) -> StateRecord {
        let p = DisplacementParams::new(tau, phi).unwrap();
        StateRecord::from_pncs(
            &pncs_series(BargmannIndex::new(k).unwrap(), n, &p, 128, 1e-12).unwrap(),
        )
    }

    #[test]
    fn undisplaced_state_has_one_amplitude() {
        let s = state(1.0, 0, 0.0, 0.0);
        assert_eq!(
            s.amplitudes,
            vec![AmplitudeRow {
                n: 0,
                re: 1.0,
                im: 0.0,
                abs2: 1.0
            }]
        );
    }

    #[test]
    fn coherent_state_amplitudes() {
        // (1-|z|^2)^k sqrt(Gamma(s+2k)/(s! Gamma(2k))) z^s with k = 1
        let s = state(1.0, 0, 1.0, 0.0);
        let z = -(0.5f64).tanh();
        for a in s.amplitudes.iter().take(10) {
            let want = (1.0 - z * z) * ((a.n + 1) as f64).sqrt() * z.powi(a.n as i32);
            assert!((a.re - want).abs() < 1e-13 && a.im.abs() < 1e-15, "{a:?}");
        }
    }

    #[test]
    fn json_layout() {
        let s = state(1.0, 0, 0.0, 0.0);
        let v: serde_json::Value = serde_json::from_str(&s.to_json().unwrap()).unwrap();
        let keys: Vec<_> = v["meta"].as_object().unwrap().keys().cloned().collect();
        for k in [
            "k",
            "n_source",
            "zeta_re",
            "zeta_im",
            "eta",
            "tail_mass",
            "series_terms",
        ] {
            assert!(keys.iter().any(|x| x == k), "{k}");
        }
        assert_eq!(v["amplitudes"][0]["n"], 0);
        assert!(s
            .to_json()
            .unwrap()
            .contains("\"re\": 1.0000000000000000e0"));
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        let a = AmplifierSpec::new(1.0, 0.0, 0.0).unwrap();
        write_spectrum_csv(&spectrum_rows(&a, 0, 3).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,m,omega,chi,energy\n"));
        let energies: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(energies, vec![0.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn spectrum_includes_reference_block() {
        let a = AmplifierSpec::new(1.0, 0.6, 0.0).unwrap();
        let rows = spectrum_rows(&a, 2, 2).unwrap();
        assert_eq!(rows.len(), 6);
        assert!((rows[1].energy - 3.0).abs() < 1e-14);
        assert!(rows[3..].iter().all(|r| r.chi == 0.0));
    }

    #[test]
    fn wavefunction_grid() {
        let q = TwoModeQuantumNumbers::from_radial(2, 1);
        let zero = DisplacementParams::new(0.0, 0.0).unwrap();
        let rows = wavefunction_rows(&q, &zero, 7, 5, 3.0, 1e-10).unwrap();
        assert_eq!(rows.len(), 35);
        assert!(rows
            .iter()
            .all(|r| r.difference == Some(0.0) && r.flag == SampleFlag::Ok));

        let p = DisplacementParams::new(0.8, 0.4).unwrap();
        let rows = wavefunction_rows(&q, &p, 10, 5, 3.0, 1e-8).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.difference.unwrap() < 1e-8 || r.flag == SampleFlag::Mismatch));
        assert!(rows.iter().all(|r| r.corrected_difference < 1e-10));

        let singular = DisplacementParams::new(2.0 * 0.5f64.atanh(), 0.0).unwrap();
        let rows = wavefunction_rows(&q, &singular, 3, 2, 3.0, 1e-8).unwrap();
        assert!(rows
            .iter()
            .all(|r| r.flag == SampleFlag::Singular && r.closed_re.is_none()));
        let mut buf = Vec::new();
        write_wavefunction_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(first.len(), WAVEFUNCTION_HEADER.len());
        assert_eq!(&first[5..9], &["", "", "", ""]);
        assert_eq!(first[10], "singular");
    }

    proptest! {
        #[test]
        fn state_json_round_trips(k in 0.3f64..3.0, n in 0usize..5, tau in -1.5f64..1.5, phi in 0.0f64..6.3) {
            let s = state(k, n, tau, phi);
            let back = StateRecord::from_json(&s.to_json().unwrap()).unwrap();
            prop_assert_eq!(back, s);
        }

        #[test]
        fn floats_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
            prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
