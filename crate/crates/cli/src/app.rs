//! Argument parsing and the subcommands.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lchpm_core::bounds::{
    chord_bound_autonomous, chord_bound_timedep, cooperative_bound, pb_plus_lower_bound, two_chords_bound, BoundReport,
    TaggedLMin, TimeDepInput,
};
use lchpm_core::ce_dga::{spec_to_json, validate, SpecFile};
use lchpm_core::constructions::stabilize_zero_diff;
use lchpm_core::filtered_lch::{lch_barcode_with_cap, LchError, LchResult, DEFAULT_BASIS_CAP};
use lchpm_core::persistence::{is_homologically_bonded, l_min_s, parse_ratio, Barcode};
use lchpm_core::rational::{Action, Extended, Rational};

use crate::error::{CliError, CliResult};
use crate::generators::{generate, resolve_spec, LoadedSpec, Params, GENERATORS};
use crate::manifest::RunManifest;
use crate::scenario::{chord_rows, load_scenario, run_conformal, scenario_chord, verify_scenario, ScenarioFile};
use crate::svg::render_svg;

#[derive(Debug, Parser)]
#[command(name = "lchpm", version, about = "Filtered Legendrian contact homology barcodes and chord-time bounds")]
pub struct Cli {
    /// Seed for randomized generators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Cap on the number of basis words of a truncated complex.
    #[arg(long, global = true, default_value_t = DEFAULT_BASIS_CAP)]
    pub budget: usize,
    /// Write the output here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Svg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a spec (file or generator) for structural violations.
    Validate {
        spec: String,
        params: Vec<String>,
    },
    /// Barcode of the 01-subspace truncated at rmax.
    Barcode {
        spec: String,
        /// Generator parameters and `rmax=<action>`.
        params: Vec<String>,
        #[arg(long)]
        rmax: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// l_min,s: the smallest birth among bars of multiplicative length > s.
    Lmin {
        spec: String,
        params: Vec<String>,
        #[arg(long)]
        rmax: Option<String>,
        /// A rational > 1 or `inf`.
        #[arg(long)]
        s: String,
    },
    /// Whether the barcode has an infinite bar.
    Bonded {
        spec: String,
        params: Vec<String>,
        #[arg(long)]
        rmax: Option<String>,
        /// Ask about the doubled pair instead.
        #[arg(long)]
        stable: bool,
        /// Action offset of the second copy when doubling.
        #[arg(long)]
        delta: Option<String>,
    },
    /// Evaluate a closed-form bound: pb_plus, autonomous, timedep, two_chords or cooperative.
    Bounds {
        formula: String,
        params: Vec<String>,
    },
    /// Print a generated spec as JSON.
    Generate {
        name: Option<String>,
        params: Vec<String>,
        /// List the generators.
        #[arg(long)]
        list: bool,
    },
    /// Run the chord search of a scenario file.
    ChordSearch { scenario: PathBuf },
    /// Compute a scenario's bound, search for a chord and compare.
    Verify { scenario: PathBuf },
    /// Render a barcode text file as SVG.
    Render {
        barcode: PathBuf,
        #[arg(long)]
        title: Option<String>,
    },
}

/// What a run produced. `stdout` is the artifact; `stderr` holds diagnostics and timing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (without the program name) and runs the command.
pub fn run<S: AsRef<str>>(args: &[S]) -> Outcome {
    let argv = std::iter::once("lchpm".to_string()).chain(args.iter().map(|a| a.as_ref().to_string()));
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let started = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(cli)),
        Err(e) => Err(CliError::Failed(format!("thread pool: {e}"))),
    };
    let elapsed = format!("elapsed {:.3}s\n", started.elapsed().as_secs_f64());
    match result {
        Ok((text, code)) => {
            if let Some(path) = &cli.output {
                if let Err(source) = std::fs::write(path, &text) {
                    let e = CliError::Io {
                        path: path.display().to_string(),
                        source,
                    };
                    return Outcome {
                        code: e.exit_code(),
                        stdout: String::new(),
                        stderr: format!("error: {e}\n"),
                    };
                }
                return Outcome {
                    code,
                    stdout: String::new(),
                    stderr: format!("wrote {}\n{elapsed}", path.display()),
                };
            }
            Outcome {
                code,
                stdout: text,
                stderr: elapsed,
            }
        }
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn lch_error(e: LchError) -> CliError {
    if e.is_budget() {
        CliError::Budget(e.to_string())
    } else if matches!(e, LchError::ValidationFailed(_)) {
        CliError::Validation(e.to_string())
    } else {
        CliError::Failed(e.to_string())
    }
}

fn parse_action(field: &str, s: &str) -> CliResult<Action> {
    s.parse::<Action>().map_err(|e| CliError::Parse(format!("{field}: {e}")))
}

/// Loads the spec file or generator and takes `rmax` from `--rmax` or the parameters.
fn spec_and_rmax(cli: &Cli, spec: &str, params: &[String], rmax: &Option<String>) -> CliResult<(LoadedSpec, Action)> {
    let mut p = Params::parse(params)?;
    let from_params = p.take("rmax");
    let rmax = match (rmax.clone(), from_params) {
        (Some(_), Some(_)) => return Err(CliError::Parse("rmax given twice".into())),
        (Some(r), None) | (None, Some(r)) => parse_action("rmax", &r)?,
        (None, None) => return Err(CliError::Parse("missing rmax".into())),
    };
    let loaded = resolve_spec(spec, &mut p, cli.seed)?;
    p.finish()?;
    Ok((loaded, rmax))
}

fn barcode_of(cli: &Cli, loaded: &LoadedSpec, rmax: &Action) -> CliResult<LchResult> {
    lch_barcode_with_cap(&loaded.spec, rmax, cli.budget).map_err(lch_error)
}

fn manifest(cli: &Cli, command: &str, loaded: Option<&LoadedSpec>) -> RunManifest {
    let mut m = RunManifest::new(command);
    if let Some(l) = loaded {
        m = m.input(&l.label, &l.bytes);
    }
    m.param("budget", cli.budget).param("seed", cli.seed)
}

fn table(rows: &[(String, String)]) -> String {
    rows.iter().map(|(k, v)| format!("{k:<18} {v}\n")).collect()
}

fn dispatch(cli: &Cli) -> CliResult<(String, i32)> {
    match &cli.command {
        Command::Validate { spec, params } => {
            let mut p = Params::parse(params)?;
            let loaded = resolve_spec(spec, &mut p, cli.seed)?;
            p.finish()?;
            let report = validate(&loaded.spec);
            let m = manifest(cli, "validate", Some(&loaded));
            let text = format!("{}{report}", m.comment_block());
            Ok((text, if report.is_valid() { 0 } else { 2 }))
        }
        Command::Barcode {
            spec,
            params,
            rmax,
            format,
        } => {
            let (loaded, rmax) = spec_and_rmax(cli, spec, params, rmax)?;
            let res = barcode_of(cli, &loaded, &rmax)?;
            let m = manifest(cli, "barcode", Some(&loaded))
                .param("rmax", &rmax)
                .param("format", format!("{format:?}").to_lowercase());
            let info = [
                format!("certification {}", res.certification),
                format!("basis_size {}", res.basis_size),
            ];
            let text = match format {
                Format::Text => {
                    let mut s = m.comment_block();
                    for line in &info {
                        s.push_str(&format!("# {line}\n"));
                    }
                    s.push_str(&res.barcode.to_text());
                    s
                }
                Format::Svg => {
                    let mut header = m.lines();
                    header.extend(info);
                    render_svg(&res.barcode, &format!("{} (r < {rmax})", loaded.spec.name()), &header)
                }
            };
            Ok((text, 0))
        }
        Command::Lmin { spec, params, rmax, s } => {
            let (loaded, rmax) = spec_and_rmax(cli, spec, params, rmax)?;
            let ratio = parse_ratio(s).map_err(|e| CliError::Parse(format!("s: {e}")))?;
            let res = barcode_of(cli, &loaded, &rmax)?;
            let l = l_min_s(&res.barcode, &ratio).map_err(|e| CliError::Parse(e.to_string()))?;
            let m = manifest(cli, "lmin", Some(&loaded)).param("rmax", &rmax).param("s", s);
            Ok((format!("{}{l}\n", m.comment_block()), 0))
        }
        Command::Bonded {
            spec,
            params,
            rmax,
            stable,
            delta,
        } => {
            let (mut loaded, rmax) = spec_and_rmax(cli, spec, params, rmax)?;
            let mut m = manifest(cli, "bonded", Some(&loaded)).param("rmax", &rmax);
            if *stable {
                let delta = match delta {
                    Some(d) => parse_action("delta", d)?,
                    None => Action::zero(),
                };
                let doubled =
                    stabilize_zero_diff(&loaded.spec, &delta).map_err(|e| CliError::Validation(e.to_string()))?;
                loaded = LoadedSpec {
                    bytes: spec_to_json(&doubled).into_bytes(),
                    label: format!("stabilized {}", loaded.label),
                    spec: doubled,
                };
                m = m.param("stable", "yes").param("delta", &delta);
            }
            let res = barcode_of(cli, &loaded, &rmax)?;
            let verdict = is_homologically_bonded(&res.barcode);
            Ok((format!("{}{verdict}\n", m.comment_block()), 0))
        }
        Command::Bounds { formula, params } => {
            let mut p = Params::parse(params)?;
            let mut m = manifest(cli, "bounds", None).param("formula", formula);
            for (k, v) in p.pairs() {
                m = m.param(k, v);
            }
            let report = bounds_command(formula, &mut p)?;
            p.finish()?;
            Ok((format!("{}{report}", m.comment_block()), 0))
        }
        Command::Generate { name, params, list } => {
            if *list {
                let text: String = GENERATORS.iter().map(|(n, u)| format!("{n:<22} {u}\n")).collect();
                return Ok((text, 0));
            }
            let Some(name) = name else {
                return Err(CliError::Parse("generate needs a generator name (see --list)".into()));
            };
            let mut p = Params::parse(params)?;
            let pairs = p.pairs();
            let spec = generate(name, &mut p, cli.seed)?;
            p.finish()?;
            let mut m = RunManifest::new("generate").param("generator", name).param("seed", cli.seed);
            for (k, v) in pairs {
                m = m.param(k, v);
            }
            let mut file = SpecFile::from_spec(&spec);
            file.manifest = Some(m.to_map());
            let mut text = serde_json::to_string_pretty(&file).map_err(|e| CliError::Failed(e.to_string()))?;
            text.push('\n');
            Ok((text, 0))
        }
        Command::ChordSearch { scenario } => {
            let (sc, bytes) = load_scenario(scenario)?;
            let m = manifest(cli, "chord-search", None).input(scenario.display().to_string(), &bytes);
            let mut text = m.comment_block();
            match &sc {
                ScenarioFile::Chord(c) => {
                    let res = scenario_chord(c)?;
                    text.push_str(&table(&chord_rows(&res)));
                    text.push_str(&format!(
                        "summary: {}\n",
                        if res.found {
                            format!("chord of time-length {:.6} found after {} shots", res.time_length, res.shots)
                        } else {
                            format!(
                                "search exhausted after {} shots (grid of {} directions, horizon {})",
                                res.shots, c.grid.sampling.directions, c.horizon
                            )
                        }
                    ));
                }
                ScenarioFile::Conformal(c) => {
                    let t = run_conformal(c)?;
                    text.push_str(&table(&[
                        ("max_ratio".into(), format!("{:.9}", t.max_ratio)),
                        ("min_ratio".into(), format!("{:.12}", t.min_ratio)),
                    ]));
                }
            }
            Ok((text, 0))
        }
        Command::Verify { scenario } => {
            let (sc, bytes) = load_scenario(scenario)?;
            let base = scenario.parent().unwrap_or(Path::new("."));
            let verdict = verify_scenario(&sc, base)?;
            let m = manifest(cli, "verify", None).input(scenario.display().to_string(), &bytes);
            let text = format!(
                "{}{}summary: {}\n",
                m.comment_block(),
                table(&verdict.rows),
                verdict.summary
            );
            Ok((text, if verdict.pass { 0 } else { 1 }))
        }
        Command::Render { barcode, title } => {
            let bytes = std::fs::read(barcode).map_err(|source| CliError::Io {
                path: barcode.display().to_string(),
                source,
            })?;
            let b = Barcode::from_text(&String::from_utf8_lossy(&bytes))
                .map_err(|e| CliError::Parse(format!("{}: {e}", barcode.display())))?;
            let m = manifest(cli, "render", None).input(barcode.display().to_string(), &bytes);
            let title = title.clone().unwrap_or_else(|| barcode.display().to_string());
            Ok((render_svg(&b, &title, &m.lines()), 0))
        }
    }
}

fn window(p: &mut Params) -> CliResult<(Rational, Rational)> {
    Ok((p.require_rational("s_minus")?, p.require_rational("s_plus")?))
}

/// `l=<action or inf>`, or `barcode=<text file>` to read `l_min,s` at `s = s_plus / s_minus`.
fn tagged_l(p: &mut Params, s_minus: &Rational, s_plus: &Rational) -> CliResult<TaggedLMin> {
    let value = match (p.take("l"), p.take("barcode")) {
        (Some(l), None) => match l.trim() {
            "inf" => Extended::Infinite,
            v => Extended::Finite(parse_action("l", v)?),
        },
        (None, Some(path)) => {
            let b = read_barcode(Path::new(&path))?;
            let l = l_min_s(&b, &Extended::Finite(s_plus / s_minus)).map_err(|e| CliError::Parse(e.to_string()))?;
            if l.uncertain {
                return Err(CliError::Failed(format!("l_min,s from {path} is uncertain (censored bars)")));
            }
            l.value
        }
        _ => return Err(CliError::Parse("give exactly one of l=<action> or barcode=<file>".into())),
    };
    Ok(TaggedLMin::at_window(value, s_minus, s_plus))
}

fn read_barcode(path: &Path) -> CliResult<Barcode> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Barcode::from_text(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn bounds_command(formula: &str, p: &mut Params) -> CliResult<BoundReport> {
    let bounds_err = |e: lchpm_core::bounds::BoundsError| CliError::Validation(e.to_string());
    match formula {
        "pb_plus" => {
            let (sm, sp) = window(p)?;
            let l = tagged_l(p, &sm, &sp)?;
            pb_plus_lower_bound(&l, &sm, &sp).map_err(bounds_err)
        }
        "autonomous" => {
            let (sm, sp) = window(p)?;
            let l = tagged_l(p, &sm, &sp)?;
            let delta = p.require_rational("delta")?;
            chord_bound_autonomous(&l, &sm, &sp, &delta).map_err(bounds_err)
        }
        "timedep" => {
            let (sm, sp) = window(p)?;
            let l = tagged_l(p, &sm, &sp)?;
            chord_bound_timedep(&TimeDepInput {
                l_hat: l,
                s_minus: sm,
                s_plus: sp,
                delta: p.require_rational("delta")?,
                e: p.require_rational("e")?,
                sup_dhdt: p.require_rational("sup_dhdt")?,
                c_min: p.require_rational("c_min")?,
                c_max: p.require_rational("c_max")?,
            })
            .map_err(bounds_err)
        }
        "two_chords" => two_chords_bound(
            &p.require_action("a")?,
            &p.require_action("A")?,
            &p.require_rational("c")?,
            &p.require_rational("C")?,
        )
        .map_err(bounds_err),
        "cooperative" => {
            let b = read_barcode(Path::new(&p.require("barcode")?))?;
            let grid = p
                .require("grid")?
                .split(',')
                .map(|s| lchpm_core::rational::parse_rational(s.trim()).map_err(|e| CliError::Parse(format!("grid: {e}"))))
                .collect::<CliResult<Vec<_>>>()?;
            let inf_h = p.require_rational("inf_h")?;
            let c_up = p.require_rational("C")?;
            let l_inf = l_min_s(&b, &Extended::Infinite).map_err(|e| CliError::Parse(e.to_string()))?;
            cooperative_bound(
                |s| l_min_s(&b, &Extended::Finite(s.clone())).map_or(Extended::Infinite, |l| l.value),
                &grid,
                &inf_h,
                &c_up,
                &l_inf.value,
            )
            .map_err(bounds_err)
        }
        other => Err(CliError::Parse(format!(
            "unknown formula `{other}` (pb_plus, autonomous, timedep, two_chords, cooperative)"
        ))),
    }
}
