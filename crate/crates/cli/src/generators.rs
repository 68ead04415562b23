//! `key=value` parameters and the named spec generators.

use std::collections::BTreeMap;
use std::path::Path;

use lchpm_core::ce_dga::{parse_spec_json, spec_to_json};
use lchpm_core::constructions::{
    morse_circle_spec_shifted, random_valid_spec, stabilize_zero_diff, stabilized_two_fiber_spec, two_chord_spec,
    two_fiber_spec, CircleMorseData, CriticalKind, RandomSpecParams, TwoChordCase,
};
use lchpm_core::rational::{parse_rational, Action, Rational};
use lchpm_core::DgaSpec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

/// `(name, parameter synopsis)` of every generator.
pub const GENERATORS: &[(&str, &str)] = &[
    ("two_fiber", "L=<action>"),
    ("stabilized_two_fiber", "L=<action>"),
    ("two_chord", "a=<action> A=<action> case=1|2"),
    ("stabilize", "of=<generator or spec file> [delta=<action>] [parameters of the base]"),
    ("morse_circle", "values=<min,max,min,max,...> | points=<max count> (uses --seed); [shift=<rational>]"),
    ("random", "[max_generators=12] [max_action=6] [back_chord_probability=0.2] [twists=4] (uses --seed)"),
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    map: BTreeMap<String, String>,
    /// Insertion order, for manifests.
    order: Vec<String>,
}

impl Params {
    pub fn parse<S: AsRef<str>>(args: &[S]) -> CliResult<Params> {
        let mut p = Params::default();
        for a in args {
            let a = a.as_ref();
            let Some((k, v)) = a.split_once('=') else {
                return Err(CliError::Parse(format!("expected key=value, got `{a}`")));
            };
            if p.map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(CliError::Parse(format!("parameter `{k}` given twice")));
            }
            p.order.push(k.to_string());
        }
        Ok(p)
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        self.order
            .iter()
            .filter_map(|k| self.map.get(k).map(|v| (k.clone(), v.clone())))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    pub fn require(&mut self, key: &str) -> CliResult<String> {
        self.take(key)
            .ok_or_else(|| CliError::Parse(format!("missing parameter `{key}`")))
    }

    pub fn rational(&mut self, key: &str) -> CliResult<Option<Rational>> {
        self.take(key)
            .map(|v| parse_rational(&v).map_err(|e| CliError::Parse(format!("{key}: {e}"))))
            .transpose()
    }

    pub fn require_rational(&mut self, key: &str) -> CliResult<Rational> {
        self.rational(key)?
            .ok_or_else(|| CliError::Parse(format!("missing parameter `{key}`")))
    }

    pub fn action(&mut self, key: &str) -> CliResult<Option<Action>> {
        self.rational(key)?
            .map(|r| Action::new(r).map_err(|e| CliError::Parse(format!("{key}: {e}"))))
            .transpose()
    }

    pub fn require_action(&mut self, key: &str) -> CliResult<Action> {
        self.action(key)?
            .ok_or_else(|| CliError::Parse(format!("missing parameter `{key}`")))
    }

    pub fn number<T: std::str::FromStr>(&mut self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.take(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Parse(format!("{key}: {e}"))))
            .transpose()
    }

    /// Fails on parameters nobody asked for.
    pub fn finish(self) -> CliResult<()> {
        match self.map.keys().next() {
            None => Ok(()),
            Some(k) => Err(CliError::Parse(format!("unknown parameter `{k}`"))),
        }
    }
}

/// A spec together with the bytes its manifest digest is taken from.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub spec: DgaSpec,
    pub label: String,
    pub bytes: Vec<u8>,
}

/// Reads a JSON spec file. Parse errors carry line and column (serde_json puts them in the message).
pub fn load_spec_file(path: &Path) -> CliResult<LoadedSpec> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = String::from_utf8_lossy(&bytes);
    let file = parse_spec_json(&text).map_err(|e| {
        CliError::Parse(format!("{}: {e}", path.display()))
    })?;
    let spec = file
        .into_spec()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(LoadedSpec {
        spec,
        label: path.display().to_string(),
        bytes,
    })
}

/// `source` is a spec file path or a generator name; generators consume their parameters.
pub fn resolve_spec(source: &str, params: &mut Params, seed: u64) -> CliResult<LoadedSpec> {
    let path = Path::new(source);
    if path.is_file() {
        return load_spec_file(path);
    }
    if !GENERATORS.iter().any(|(n, _)| *n == source) {
        return Err(CliError::Parse(format!(
            "`{source}` is neither a file nor a generator (known: {})",
            GENERATORS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        )));
    }
    let before = params.clone();
    let spec = generate(source, params, seed)?;
    let used: Vec<String> = before
        .pairs()
        .into_iter()
        .filter(|(k, _)| !params.map.contains_key(k))
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let mut label = source.to_string();
    for u in used {
        label.push(' ');
        label.push_str(&u);
    }
    let bytes = spec_to_json(&spec).into_bytes();
    Ok(LoadedSpec { spec, label, bytes })
}

fn morse_data(params: &mut Params, seed: u64) -> CliResult<CircleMorseData> {
    if let Some(values) = params.take("values") {
        let points = values
            .split(',')
            .enumerate()
            .map(|(i, v)| {
                let a = parse_rational(v.trim())
                    .and_then(Action::new)
                    .map_err(|e| CliError::Parse(format!("values: {e}")))?;
                let kind = if i % 2 == 0 { CriticalKind::Min } else { CriticalKind::Max };
                Ok((kind, a))
            })
            .collect::<CliResult<Vec<_>>>()?;
        return CircleMorseData::new(points).map_err(|e| CliError::Validation(e.to_string()));
    }
    let max = params.number::<usize>("points")?.unwrap_or(10);
    if max < 2 {
        return Err(CliError::Parse("points must be at least 2".into()));
    }
    Ok(CircleMorseData::random(&mut ChaCha8Rng::seed_from_u64(seed), max))
}

/// Runs generator `name`, consuming the parameters it understands.
pub fn generate(name: &str, params: &mut Params, seed: u64) -> CliResult<DgaSpec> {
    let invalid = |e: lchpm_core::constructions::ConstructionError| CliError::Validation(e.to_string());
    match name {
        "two_fiber" => Ok(two_fiber_spec(&params.require_action("L")?)),
        "stabilized_two_fiber" => Ok(stabilized_two_fiber_spec(&params.require_action("L")?)),
        "two_chord" => {
            let a = params.require_action("a")?;
            let big = params.require_action("A")?;
            let case: TwoChordCase = params.require("case")?.parse().map_err(CliError::Parse)?;
            two_chord_spec(&a, &big, case).map_err(invalid)
        }
        "stabilize" => {
            let of = params.require("of")?;
            let delta = params.action("delta")?.unwrap_or_else(Action::zero);
            let base = resolve_spec(&of, params, seed)?;
            stabilize_zero_diff(&base.spec, &delta).map_err(invalid)
        }
        "morse_circle" => {
            let shift = params.rational("shift")?.unwrap_or_else(|| Rational::from_integer(0.into()));
            let data = morse_data(params, seed)?;
            morse_circle_spec_shifted(&data, &shift).map_err(invalid)
        }
        "random" => {
            let d = RandomSpecParams::default();
            let p = RandomSpecParams {
                max_generators: params.number("max_generators")?.unwrap_or(d.max_generators),
                max_action: params.number("max_action")?.unwrap_or(d.max_action),
                back_chord_probability: params
                    .number("back_chord_probability")?
                    .unwrap_or(d.back_chord_probability),
                twists: params.number("twists")?.unwrap_or(d.twists),
            };
            if p.max_generators < 2 || p.max_action < 1 || !(0.0..=1.0).contains(&p.back_chord_probability) {
                return Err(CliError::Parse(
                    "random needs max_generators >= 2, max_action >= 1, back_chord_probability in [0, 1]".into(),
                ));
            }
            Ok(random_valid_spec(&mut ChaCha8Rng::seed_from_u64(seed), &p))
        }
        other => Err(CliError::Parse(format!("unknown generator `{other}`"))),
    }
}
