//! Scenario files: a Hamiltonian, source and target regions, search settings and a bound recipe.

use std::path::Path;

use lchpm_core::bounds::{chord_bound_autonomous, chord_bound_timedep, BoundReport, TaggedLMin, TimeDepInput};
use lchpm_core::constructions::two_fiber_spec;
use lchpm_core::filtered_lch::lch_barcode;
use lchpm_core::persistence::l_min_s;
use lchpm_core::rational::{format_rational, from_f64, parse_rational, Action, Extended, Rational};
use lchpm_dynamics::chord::{check_time, find_chord, recheck_chord, ChordResult, ShootingGrid};
use lchpm_dynamics::conformal::{conformal_factor_track, ConformalTrack};
use lchpm_dynamics::hamiltonian::{ContactHamiltonian, Hamiltonian, HamiltonianDef};
use lchpm_dynamics::maupertuis::{maupertuis_chord, MaupertuisOptions};
use lchpm_dynamics::phase::PhasePoint;
use lchpm_dynamics::regions::{delta_separation, RegionDef, Separation, SourceSampling};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::generators::load_spec_file;

/// Allowed relative drift of a chord's time-length under a halved step.
pub const RECHECK_DRIFT: f64 = 1e-4;

/// How far a stated exact separation may sit above the sampled one.
pub const DELTA_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioFile {
    Chord(ChordScenario),
    Conformal(ConformalScenario),
}

impl ScenarioFile {
    pub fn name(&self) -> &str {
        match self {
            ScenarioFile::Chord(s) => &s.name,
            ScenarioFile::Conformal(s) => &s.name,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChordScenario {
    pub name: String,
    #[serde(default)]
    pub note: Option<String>,
    pub hamiltonian: HamiltonianDef,
    pub source: RegionDef,
    pub target: RegionDef,
    pub horizon: f64,
    pub grid: ShootingGrid,
    pub tolerance: f64,
    #[serde(default)]
    pub slack: f64,
    pub separation: SeparationSpec,
    pub bound: BoundRecipe,
    #[serde(default)]
    pub maupertuis: Option<MaupertuisCheck>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparationSpec {
    pub y0: RegionDef,
    pub y1: RegionDef,
    pub sampling: SourceSampling,
    #[serde(default = "one")]
    pub time_samples: usize,
}

fn one() -> usize {
    1
}

/// Where `l_min,s` comes from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LSource {
    /// A rational or `inf`.
    Value(String),
    /// Barcode of the two-fiber pair at this distance.
    TwoFiber { distance: String },
    /// Barcode of a spec file (relative to the scenario) truncated at `rmax`.
    Spec { path: String, rmax: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundRecipe {
    Autonomous {
        s_minus: String,
        s_plus: String,
        l_min: LSource,
        /// Exact separation; the sampled value is used (rounded down) when absent.
        #[serde(default)]
        delta: Option<String>,
    },
    Timedep {
        s_minus: String,
        s_plus: String,
        l_min: LSource,
        e: String,
        c_min: String,
        c_max: String,
        #[serde(default)]
        delta: Option<String>,
        /// Defaults to the Hamiltonian's closed-form bound, rounded up.
        #[serde(default)]
        sup_dhdt: Option<String>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaupertuisCheck {
    pub energy: f64,
    #[serde(default)]
    pub options: MaupertuisOptions,
    /// Allowed relative difference between the two time-lengths.
    pub agreement: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalScenario {
    pub name: String,
    #[serde(default)]
    pub note: Option<String>,
    pub h: ContactHamiltonian,
    pub starts: Vec<PhasePoint>,
    pub horizon: f64,
    pub step: f64,
    pub expect: ConformalExpectation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConformalExpectation {
    /// Max ratio above `threshold`; `reference_*` record the finer run the threshold was frozen from.
    Exceeds {
        threshold: f64,
        reference_step: f64,
        reference_max: f64,
    },
    /// Ratio within `1 +- tolerance` at all times.
    Within { tolerance: f64 },
}

pub fn parse_scenario(text: &str, label: &str) -> CliResult<ScenarioFile> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Parse(format!("{label}: {e}")))
}

pub fn load_scenario(path: &Path) -> CliResult<(ScenarioFile, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let sc = parse_scenario(&String::from_utf8_lossy(&bytes), &path.display().to_string())?;
    Ok((sc, bytes))
}

fn rational(field: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| CliError::Parse(format!("{field}: {e}")))
}

fn dimension(sc: &ChordScenario) -> usize {
    for r in [&sc.source, &sc.target, &sc.separation.y0, &sc.separation.y1] {
        if let RegionDef::FiberSegment { x, .. } = r {
            return x.len();
        }
    }
    sc.separation.sampling.q_center.as_ref().map_or(2, Vec::len)
}

fn round_up(x: f64) -> Option<Rational> {
    if x == 0.0 {
        Some(Rational::from_integer(0.into()))
    } else {
        from_f64(x.next_up())
    }
}

fn round_down(x: f64) -> Option<Rational> {
    from_f64(x.next_down())
}

fn l_min(source: &LSource, ratio: &Rational, base: &Path) -> CliResult<Extended<Action>> {
    let s = Extended::Finite(ratio.clone());
    let from_barcode = |spec: &lchpm_core::DgaSpec, rmax: &Action| -> CliResult<Extended<Action>> {
        let res = lch_barcode(spec, rmax).map_err(|e| CliError::Failed(e.to_string()))?;
        let l = l_min_s(&res.barcode, &s).map_err(|e| CliError::Failed(e.to_string()))?;
        if l.uncertain {
            return Err(CliError::Failed(format!(
                "l_min,s is uncertain at rmax = {rmax}; raise the truncation"
            )));
        }
        Ok(l.value)
    };
    match source {
        LSource::Value(v) if v.trim() == "inf" => Ok(Extended::Infinite),
        LSource::Value(v) => Ok(Extended::Finite(
            Action::new(rational("l_min", v)?).map_err(|e| CliError::Parse(e.to_string()))?,
        )),
        LSource::TwoFiber { distance } => {
            let d = Action::new(rational("distance", distance)?).map_err(|e| CliError::Parse(e.to_string()))?;
            let rmax = &d + &d;
            from_barcode(&two_fiber_spec(&d), &rmax)
        }
        LSource::Spec { path, rmax } => {
            let loaded = load_spec_file(&base.join(path))?;
            let rmax = Action::new(rational("rmax", rmax)?).map_err(|e| CliError::Parse(e.to_string()))?;
            from_barcode(&loaded.spec, &rmax)
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundOutcome {
    pub report: BoundReport,
    pub separation: Separation,
    pub delta_used: Rational,
    pub l_min: Extended<Action>,
}

/// Evaluates the scenario's bound recipe. A non-positive separation stops here.
pub fn scenario_bound(sc: &ChordScenario, base: &Path) -> CliResult<BoundOutcome> {
    let n = dimension(sc);
    let sep = &sc.separation;
    let separation = delta_separation(&sc.hamiltonian, &sep.y0, &sep.y1, n, &sep.sampling, sep.time_samples)
        .map_err(|e| CliError::Failed(e.to_string()))?;
    let (s_minus, s_plus, l_src, delta) = match &sc.bound {
        BoundRecipe::Autonomous {
            s_minus,
            s_plus,
            l_min,
            delta,
        }
        | BoundRecipe::Timedep {
            s_minus,
            s_plus,
            l_min,
            delta,
            ..
        } => (rational("s_minus", s_minus)?, rational("s_plus", s_plus)?, l_min, delta),
    };
    let delta_used = match delta {
        Some(d) => rational("delta", d)?,
        None => round_down(separation.delta)
            .ok_or_else(|| CliError::Failed(format!("separation {} is not finite", separation.delta)))?,
    };
    if delta.is_some() && lchpm_core::rational::to_f64(&delta_used) > separation.delta + DELTA_AGREEMENT {
        return Err(CliError::Validation(format!(
            "stated delta {} exceeds the sampled separation {:.9}",
            format_rational(&delta_used),
            separation.delta
        )));
    }
    if delta_used <= Rational::from_integer(0.into()) || separation.delta <= 0.0 {
        return Err(CliError::Validation(format!(
            "NotSeparating: delta = {} (sampled {:.9}); no search run",
            format_rational(&delta_used),
            separation.delta
        )));
    }
    if s_minus <= Rational::from_integer(0.into()) || s_plus <= s_minus {
        return Err(CliError::Validation(format!(
            "need 0 < s_minus < s_plus, got {} and {}",
            format_rational(&s_minus),
            format_rational(&s_plus)
        )));
    }
    let ratio = &s_plus / &s_minus;
    let l = l_min(l_src, &ratio, base)?;
    let tagged = TaggedLMin::at_window(l.clone(), &s_minus, &s_plus);
    let report = match &sc.bound {
        BoundRecipe::Autonomous { .. } => chord_bound_autonomous(&tagged, &s_minus, &s_plus, &delta_used),
        BoundRecipe::Timedep {
            e,
            c_min,
            c_max,
            sup_dhdt,
            ..
        } => {
            let sup = match sup_dhdt {
                Some(v) => rational("sup_dhdt", v)?,
                None => sc
                    .hamiltonian
                    .sup_time_derivative()
                    .and_then(round_up)
                    .ok_or_else(|| CliError::Failed("no closed-form bound for |dH/dt|; give sup_dhdt".into()))?,
            };
            chord_bound_timedep(&TimeDepInput {
                l_hat: tagged,
                s_minus: s_minus.clone(),
                s_plus: s_plus.clone(),
                delta: delta_used.clone(),
                e: rational("e", e)?,
                sup_dhdt: sup,
                c_min: rational("c_min", c_min)?,
                c_max: rational("c_max", c_max)?,
            })
        }
    }
    .map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(BoundOutcome {
        report,
        separation,
        delta_used,
        l_min: l,
    })
}

pub fn scenario_chord(sc: &ChordScenario) -> CliResult<ChordResult> {
    find_chord(&sc.hamiltonian, &sc.source, &sc.target, sc.horizon, &sc.grid, sc.tolerance)
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn fmt_point(x: &PhasePoint) -> String {
    let v = |a: &[f64]| a.iter().map(|c| format!("{c:.9}")).collect::<Vec<_>>().join(", ");
    format!("p=({}) q=({})", v(&x.p), v(&x.q))
}

/// Key/value rows describing a chord search.
pub fn chord_rows(res: &ChordResult) -> Vec<(String, String)> {
    vec![
        ("found".into(), if res.found { "yes" } else { "no" }.into()),
        ("time_length".into(), format!("{:.9}", res.time_length)),
        ("end_residual".into(), format!("{:.3e}", res.end_residual)),
        ("start".into(), fmt_point(&res.start)),
        ("t0".into(), format!("{:.6}", res.t0)),
        ("shots".into(), res.shots.to_string()),
        ("step".into(), format!("{}", res.step)),
        ("horizon".into(), format!("{}", res.horizon)),
        ("tolerance".into(), format!("{}", res.tolerance)),
    ]
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub rows: Vec<(String, String)>,
    pub pass: bool,
    pub summary: String,
}

fn bound_rows(b: &BoundOutcome) -> Vec<(String, String)> {
    let mut rows = vec![
        ("formula".into(), b.report.formula_id.to_string()),
        ("l_min".into(), b.l_min.to_string()),
        ("delta".into(), format_rational(&b.delta_used)),
        (
            "delta_sampled".into(),
            format!(
                "{:.9} ({} x {} samples, {} time slices)",
                b.separation.delta, b.separation.y0_samples, b.separation.y1_samples, b.separation.time_samples
            ),
        ),
        ("bound".into(), b.report.value.to_string()),
        ("applicable".into(), if b.report.applicable { "yes" } else { "no" }.into()),
    ];
    for c in &b.report.violated_conditions {
        rows.push(("violated".into(), c.clone()));
    }
    for (k, v) in &b.report.extras {
        rows.push((format!("extra {k}"), format_rational(v)));
    }
    rows
}

pub fn verify_chord_scenario(sc: &ChordScenario, base: &Path) -> CliResult<Verdict> {
    let bound = scenario_bound(sc, base)?;
    let mut rows = vec![("scenario".to_string(), sc.name.clone())];
    rows.extend(bound_rows(&bound));
    let Extended::Finite(value) = bound.report.value.clone() else {
        return Ok(Verdict {
            rows,
            pass: false,
            summary: "bound is infinite or not applicable; no comparison made".into(),
        });
    };
    if !bound.report.applicable {
        return Ok(Verdict {
            rows,
            pass: false,
            summary: "bound conditions fail; no comparison made".into(),
        });
    }
    let res = scenario_chord(sc)?;
    rows.extend(chord_rows(&res));
    if !res.found {
        return Ok(Verdict {
            rows,
            pass: false,
            summary: format!(
                "search exhausted without a chord (best residual {:.3e}); this does not contradict the bound",
                res.end_residual
            ),
        });
    }
    let check = check_time(res.time_length, &value, sc.slack);
    rows.push(("allowed".into(), format!("{:.9}", check.allowed)));
    let mut pass = check.pass;
    let mut notes = vec![format!(
        "chord time {:.6} {} bound {} (slack {})",
        res.time_length,
        if check.pass { "within" } else { "exceeds" },
        format_rational(&value),
        sc.slack
    )];
    match recheck_chord(&sc.hamiltonian, &sc.target, &res, res.step / 2.0) {
        Some(t) => {
            let drift = (t - res.time_length).abs() / res.time_length;
            rows.push(("recheck_drift".into(), format!("{drift:.3e}")));
            if drift >= RECHECK_DRIFT {
                pass = false;
                notes.push(format!("half-step recheck drifted by {drift:.3e}"));
            }
        }
        None => {
            rows.push(("recheck_drift".into(), "lost".into()));
            pass = false;
            notes.push("half-step recheck lost the chord".into());
        }
    }
    if let Some(m) = &sc.maupertuis {
        let HamiltonianDef::Mechanical { potential } = &sc.hamiltonian else {
            return Err(CliError::Validation("maupertuis check needs a mechanical Hamiltonian".into()));
        };
        let (RegionDef::FiberSegment { x: x0, .. }, RegionDef::FiberSegment { x: x1, .. }) = (&sc.source, &sc.target) else {
            return Err(CliError::Validation("maupertuis check needs fiber regions".into()));
        };
        let mres = maupertuis_chord(potential, m.energy, x0, x1, &m.options).map_err(|e| CliError::Failed(e.to_string()))?;
        let mcheck = check_time(mres.time_length, &value, sc.slack);
        let gap = (mres.time_length - res.time_length).abs() / mres.time_length;
        rows.push(("maupertuis_found".into(), if mres.found { "yes" } else { "no" }.into()));
        rows.push(("maupertuis_time".into(), format!("{:.9}", mres.time_length)));
        rows.push(("maupertuis_residual".into(), format!("{:.3e}", mres.end_residual)));
        rows.push(("relative_gap".into(), format!("{gap:.3e}")));
        let ok = mres.found && mcheck.pass && gap <= m.agreement;
        notes.push(format!(
            "Maupertuis chord time {:.6}, gap {:.2e} (allowed {})",
            mres.time_length, gap, m.agreement
        ));
        pass &= ok;
    }
    rows.push(("verdict".into(), if pass { "pass" } else { "fail" }.into()));
    Ok(Verdict {
        rows,
        pass,
        summary: notes.join("; "),
    })
}

pub fn run_conformal(sc: &ConformalScenario) -> CliResult<ConformalTrack> {
    conformal_factor_track(&sc.h, &sc.starts, sc.horizon, sc.step).map_err(|e| CliError::Failed(e.to_string()))
}

pub fn verify_conformal_scenario(sc: &ConformalScenario) -> CliResult<Verdict> {
    let track = run_conformal(sc)?;
    let mut rows = vec![
        ("scenario".to_string(), sc.name.clone()),
        ("starts".into(), sc.starts.len().to_string()),
        ("horizon".into(), format!("{}", sc.horizon)),
        ("step".into(), format!("{}", sc.step)),
        ("max_ratio".into(), format!("{:.9}", track.max_ratio)),
        ("min_ratio".into(), format!("{:.12}", track.min_ratio)),
        ("argmax".into(), format!("start {} at t = {:.3}", track.argmax.0, track.argmax.1)),
    ];
    let (pass, summary) = match &sc.expect {
        ConformalExpectation::Exceeds {
            threshold,
            reference_step,
            reference_max,
        } => {
            rows.push(("threshold".into(), format!("{threshold}")));
            rows.push((
                "reference".into(),
                format!("max {reference_max} at step {reference_step}"),
            ));
            (
                track.max_ratio > *threshold,
                format!(
                    "max conformal ratio {:.3} against frozen threshold {threshold} within horizon {}",
                    track.max_ratio, sc.horizon
                ),
            )
        }
        ConformalExpectation::Within { tolerance } => {
            let dev = (track.max_ratio - 1.0).abs().max((track.min_ratio - 1.0).abs());
            rows.push(("deviation".into(), format!("{dev:.3e}")));
            (
                dev <= *tolerance,
                format!("ratio stays within 1 +- {dev:.2e} (allowed {tolerance})"),
            )
        }
    };
    rows.push(("verdict".into(), if pass { "pass" } else { "fail" }.into()));
    Ok(Verdict { rows, pass, summary })
}

pub fn verify_scenario(sc: &ScenarioFile, base: &Path) -> CliResult<Verdict> {
    match sc {
        ScenarioFile::Chord(c) => verify_chord_scenario(c, base),
        ScenarioFile::Conformal(c) => verify_conformal_scenario(c),
    }
}
