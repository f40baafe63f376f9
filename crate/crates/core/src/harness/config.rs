//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! name = fig2
//! model.d1 = 5
//! domain.kind = rectangle
//! init.u.kx = 2pi
//! init.v.base = vbar
//! ```
//!
//! Numbers accept a trailing `pi` (`2pi`, `0.5pi`, `pi`). Initial-data base
//! levels accept a trailing `ubar` or `vbar` and then scale with the model.
//! Unknown keys, keys that do not apply to the chosen families and
//! duplicates are rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::eigenbasis::{Domain, DomainKind};
use crate::grid::{Grid, GridError, MIN_CELLS};
use crate::model::{Kinetics, ModelParams, Sensitivity};
use crate::solver::RunControls;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`{context}")]
    UnknownKey { line: usize, key: String, context: String },
    #[error("line {line}: duplicate key `{key}` (first set on line {first})")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("line {line}: malformed number `{text}` for `{key}`")]
    BadNumber { line: usize, key: String, text: String },
    #[error("line {line}: unknown {family} `{tag}`")]
    UnknownTag { line: usize, family: &'static str, tag: String },
    #[error("line {line}: {reason}")]
    Invalid { line: usize, reason: String },
    #[error("missing required key `{0}`")]
    Missing(String),
}

/// What a base level is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Absolute,
    Ubar,
    Vbar,
}

/// `coef * reference`, e.g. `2ubar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub coef: f64,
    pub reference: Reference,
}

impl Level {
    pub fn ubar() -> Self {
        Level { coef: 1.0, reference: Reference::Ubar }
    }
    pub fn vbar() -> Self {
        Level { coef: 1.0, reference: Reference::Vbar }
    }

    pub fn resolve(&self, p: &ModelParams) -> f64 {
        let (ub, vb) = p.homogeneous_state();
        match self.reference {
            Reference::Absolute => self.coef,
            Reference::Ubar => self.coef * ub,
            Reference::Vbar => self.coef * vb,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.reference {
            Reference::Absolute => write!(f, "{}", self.coef),
            Reference::Ubar => write!(f, "{}ubar", self.coef),
            Reference::Vbar => write!(f, "{}vbar", self.coef),
        }
    }
}

/// Perturbation added to a base level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    None,
    /// `amp cos(kx x + px) cos(ky y + py)`
    Cosine { amp: f64, kx: f64, px: f64, ky: f64, py: f64 },
    /// `amp exp(-((x - x0)^2 + (y - y0)^2) / width)`
    Gaussian { amp: f64, x0: f64, y0: f64, width: f64 },
}

impl Shape {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            Shape::None => 0.0,
            Shape::Cosine { amp, kx, px, ky, py } => amp * (kx * x + px).cos() * (ky * y + py).cos(),
            Shape::Gaussian { amp, x0, y0, width } => {
                amp * (-((x - x0).powi(2) + (y - y0).powi(2)) / width).exp()
            }
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Shape::None => "none",
            Shape::Cosine { .. } => "cosine",
            Shape::Gaussian { .. } => "gaussian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub base: Level,
    pub shape: Shape,
}

impl Profile {
    pub fn eval(&self, p: &ModelParams, x: f64, y: f64) -> f64 {
        self.base.resolve(p) + self.shape.eval(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitSpec {
    Expression { u: Profile, v: Profile },
    /// First-order branch approximation; `mode = None` selects the
    /// threshold mode.
    BranchSeed { mode: Option<(usize, usize)>, s: f64 },
    /// Homogeneous state plus independent uniform noise in `[-amp, amp]`.
    WhiteNoise { amp: f64, seed: u64 },
}

impl InitSpec {
    pub fn tag(&self) -> &'static str {
        match self {
            InitSpec::Expression { .. } => "expression",
            InitSpec::BranchSeed { .. } => "branch_seed",
            InitSpec::WhiteNoise { .. } => "white_noise",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSettings {
    pub t_max: f64,
    pub dt_max: f64,
    pub tol_ss: f64,
    pub blow_up_cap: f64,
    pub sample_every: f64,
    pub max_change: f64,
}

impl RunSettings {
    /// Defaults for `p`: horizon 200, `tol_ss = 1e-8`, cap `1e6 ubar`.
    pub fn defaults(p: &ModelParams) -> Self {
        let c = RunControls::new(p, DEFAULT_T_MAX);
        RunSettings {
            t_max: c.t_max,
            dt_max: c.dt_max,
            tol_ss: c.tol_ss,
            blow_up_cap: c.blow_up_cap,
            sample_every: c.sample_every,
            max_change: c.max_change,
        }
    }

    pub fn controls(&self) -> RunControls {
        RunControls {
            dt_max: self.dt_max,
            t_max: self.t_max,
            tol_ss: self.tol_ss,
            blow_up_cap: self.blow_up_cap,
            sample_every: self.sample_every,
            max_change: self.max_change,
            energy_modes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldName {
    U,
    V,
}

impl FieldName {
    pub fn tag(self) -> &'static str {
        match self {
            FieldName::U => "u",
            FieldName::V => "v",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    /// Times at which fields are written, besides the final state.
    pub times: Vec<f64>,
    pub fields: Vec<FieldName>,
    pub heatmaps: bool,
    pub csv: bool,
    /// Modes whose energy share is reported.
    pub modes: Vec<(usize, usize)>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            times: Vec::new(),
            fields: vec![FieldName::U, FieldName::V],
            heatmaps: true,
            csv: true,
            modes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: ModelParams,
    pub domain: Domain,
    pub nx: usize,
    pub ny: usize,
    pub init: InitSpec,
    pub run: RunSettings,
    pub output: OutputSpec,
}

pub const DEFAULT_T_MAX: f64 = 200.0;
/// Cells per axis when `grid.nx` is absent.
pub const DEFAULT_CELLS: usize = 128;

impl ScenarioConfig {
    pub fn grid(&self) -> Result<Grid, GridError> {
        Grid::new(self.domain, self.nx, self.ny)
    }
}

/// A parsed value with the line it came from.
struct Entry {
    line: usize,
    value: String,
}

struct Entries {
    map: BTreeMap<String, Entry>,
}

impl Entries {
    fn take(&mut self, key: &str) -> Option<Entry> {
        self.map.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<Entry, ConfigError> {
        self.take(key).ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    fn number(&mut self, key: &str) -> Result<Option<(usize, f64)>, ConfigError> {
        self.take(key)
            .map(|e| parse_number(key, &e).map(|x| (e.line, x)))
            .transpose()
    }

    fn number_or(&mut self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.number(key)?.map_or(default, |(_, x)| x))
    }

    fn required_number(&mut self, key: &str) -> Result<(usize, f64), ConfigError> {
        let e = self.required(key)?;
        Ok((e.line, parse_number(key, &e)?))
    }

    fn positive(&mut self, key: &str, default: Option<f64>) -> Result<f64, ConfigError> {
        let (line, x) = match (self.number(key)?, default) {
            (Some(v), _) => v,
            (None, Some(d)) => return Ok(d),
            (None, None) => return Err(ConfigError::Missing(key.to_string())),
        };
        if x <= 0.0 {
            return Err(ConfigError::Invalid {
                line,
                reason: format!("{} must be positive (got {x})", short(key)),
            });
        }
        Ok(x)
    }

    fn cells(&mut self, key: &str, default: usize) -> Result<usize, ConfigError> {
        let Some(e) = self.take(key) else { return Ok(default) };
        let n: usize = e.value.parse().map_err(|_| bad_number(key, &e))?;
        if n < MIN_CELLS {
            return Err(ConfigError::Invalid {
                line: e.line,
                reason: format!("{} needs at least {MIN_CELLS} cells (got {n})", short(key)),
            });
        }
        Ok(n)
    }

    fn boolean(&mut self, key: &str, default: bool) -> Result<bool, ConfigError> {
        let Some(e) = self.take(key) else { return Ok(default) };
        match e.value.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(ConfigError::Invalid {
                line: e.line,
                reason: format!("{key} must be true or false"),
            }),
        }
    }

    fn tag(&mut self, key: &str) -> Option<(usize, String)> {
        self.take(key).map(|e| (e.line, e.value))
    }

    /// Fails on the first remaining key.
    fn finish(self, context: impl Fn(&str) -> String) -> Result<(), ConfigError> {
        match self.map.into_iter().min_by_key(|(_, e)| e.line) {
            None => Ok(()),
            Some((key, e)) => Err(ConfigError::UnknownKey {
                line: e.line,
                context: context(&key),
                key,
            }),
        }
    }
}

fn short(key: &str) -> &str {
    key.rsplit('.').next().unwrap_or(key)
}

fn bad_number(key: &str, e: &Entry) -> ConfigError {
    ConfigError::BadNumber {
        line: e.line,
        key: key.to_string(),
        text: e.value.clone(),
    }
}

/// Splits a trailing unit word off a number: `2.5pi` -> (2.5, "pi").
fn split_suffix<'a>(text: &'a str, units: &[&'a str]) -> (&'a str, Option<&'a str>) {
    for u in units {
        if let Some(head) = text.strip_suffix(u) {
            return (head.trim_end(), Some(u));
        }
    }
    (text, None)
}

fn parse_coef(head: &str) -> Option<f64> {
    match head {
        "" => Some(1.0),
        "-" => Some(-1.0),
        _ => head.parse().ok(),
    }
}

fn parse_number(key: &str, e: &Entry) -> Result<f64, ConfigError> {
    let (head, unit) = split_suffix(&e.value, &["pi"]);
    let x = match unit {
        Some(_) => parse_coef(head).map(|c| c * PI),
        None => e.value.parse::<f64>().ok(),
    };
    match x {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(bad_number(key, e)),
    }
}

fn parse_level(key: &str, e: &Entry) -> Result<Level, ConfigError> {
    let (head, unit) = split_suffix(&e.value, &["ubar", "vbar"]);
    let reference = match unit {
        Some("ubar") => Reference::Ubar,
        Some("vbar") => Reference::Vbar,
        _ => return parse_number(key, e).map(|coef| Level { coef, reference: Reference::Absolute }),
    };
    match parse_coef(head) {
        Some(coef) if coef.is_finite() => Ok(Level { coef, reference }),
        _ => Err(bad_number(key, e)),
    }
}

fn parse_mode(key: &str, line: usize, text: &str) -> Result<(usize, usize), ConfigError> {
    let bad = || ConfigError::Invalid {
        line,
        reason: format!("{key} entries must look like `m:n` (got `{text}`)"),
    };
    let (m, n) = text.split_once(':').ok_or_else(bad)?;
    Ok((m.trim().parse().map_err(|_| bad())?, n.trim().parse().map_err(|_| bad())?))
}

fn list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn lex(text: &str) -> Result<Entries, ConfigError> {
    let mut map: BTreeMap<String, Entry> = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Syntax { line });
        }
        if let Some(first) = map.get(key) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
                first: first.line,
            });
        }
        map.insert(key.to_string(), Entry { line, value: value.to_string() });
    }
    Ok(Entries { map })
}

fn parse_model(e: &mut Entries) -> Result<ModelParams, ConfigError> {
    let d1 = e.positive("model.d1", None)?;
    let d2 = e.positive("model.d2", None)?;
    let (_, chi) = e.required_number("model.chi")?;
    let mu = e.positive("model.mu", None)?;
    let ubar = e.positive("model.ubar", None)?;
    let alpha = e.positive("model.alpha", Some(1.0))?;
    let phi = match e.tag("model.phi") {
        None => Sensitivity::Linear,
        Some((line, tag)) => Sensitivity::from_tag(&tag).map_err(|_| ConfigError::UnknownTag {
            line,
            family: "sensitivity",
            tag,
        })?,
    };
    let f = match e.tag("model.f") {
        None => Kinetics::Linear,
        Some((_, t)) if t == "linear" => Kinetics::Linear,
        Some((line, t)) if t == "affine_linear" => {
            let beta = e.positive("model.beta", None).map_err(|err| match err {
                ConfigError::Missing(_) => ConfigError::Invalid {
                    line,
                    reason: "affine_linear kinetics needs model.beta".into(),
                },
                other => other,
            })?;
            Kinetics::AffineLinear { beta }
        }
        Some((line, tag)) => return Err(ConfigError::UnknownTag { line, family: "kinetics", tag }),
    };
    // validated field by field above
    Ok(ModelParams::new(d1, d2, chi, mu, ubar, alpha, phi, f).expect("model fields validated"))
}

fn parse_domain(e: &mut Entries) -> Result<Domain, ConfigError> {
    let (line, kind) = e.tag("domain.kind").ok_or_else(|| ConfigError::Missing("domain.kind".into()))?;
    let lx = e.positive("domain.lx", None)?;
    match kind.as_str() {
        "interval" => Ok(Domain::interval(lx).expect("positive length")),
        "rectangle" => {
            let ly = e.positive("domain.ly", None)?;
            Ok(Domain::rectangle(lx, ly).expect("positive lengths"))
        }
        _ => Err(ConfigError::UnknownTag { line, family: "domain kind", tag: kind }),
    }
}

fn parse_profile(e: &mut Entries, field: &str) -> Result<Profile, ConfigError> {
    let key = |k: &str| format!("init.{field}.{k}");
    let base_key = key("base");
    let base = parse_level(&base_key, &e.required(&base_key)?)?;
    let shape = match e.tag(&key("shape")) {
        None => Shape::None,
        Some((_, t)) if t == "none" => Shape::None,
        Some((_, t)) if t == "cosine" => Shape::Cosine {
            amp: e.required_number(&key("amp"))?.1,
            kx: e.number_or(&key("kx"), 0.0)?,
            px: e.number_or(&key("px"), 0.0)?,
            ky: e.number_or(&key("ky"), 0.0)?,
            py: e.number_or(&key("py"), 0.0)?,
        },
        Some((_, t)) if t == "gaussian" => Shape::Gaussian {
            amp: e.required_number(&key("amp"))?.1,
            x0: e.number_or(&key("x0"), 0.0)?,
            y0: e.number_or(&key("y0"), 0.0)?,
            width: e.positive(&key("width"), None)?,
        },
        Some((line, tag)) => return Err(ConfigError::UnknownTag { line, family: "shape", tag }),
    };
    Ok(Profile { base, shape })
}

fn parse_init(e: &mut Entries) -> Result<InitSpec, ConfigError> {
    let (line, kind) = e.tag("init.kind").ok_or_else(|| ConfigError::Missing("init.kind".into()))?;
    match kind.as_str() {
        "expression" => Ok(InitSpec::Expression {
            u: parse_profile(e, "u")?,
            v: parse_profile(e, "v")?,
        }),
        "branch_seed" => {
            let mode = e
                .tag("init.mode")
                .map(|(l, t)| parse_mode("init.mode", l, &t))
                .transpose()?;
            let (_, s) = e.required_number("init.s")?;
            Ok(InitSpec::BranchSeed { mode, s })
        }
        "white_noise" => {
            let amp = e.positive("init.amp", None)?;
            let seed_entry = e.required("init.seed")?;
            let seed = seed_entry.value.parse().map_err(|_| ConfigError::Invalid {
                line: seed_entry.line,
                reason: format!("init.seed must be a non-negative integer (got `{}`)", seed_entry.value),
            })?;
            Ok(InitSpec::WhiteNoise { amp, seed })
        }
        _ => Err(ConfigError::UnknownTag { line, family: "init kind", tag: kind }),
    }
}

fn parse_run(e: &mut Entries, p: &ModelParams) -> Result<RunSettings, ConfigError> {
    let d = RunSettings::defaults(p);
    Ok(RunSettings {
        t_max: e.positive("run.t_max", Some(d.t_max))?,
        dt_max: e.positive("run.dt_max", Some(d.dt_max))?,
        tol_ss: e.positive("run.tol_ss", Some(d.tol_ss))?,
        blow_up_cap: e.positive("run.blow_up_cap", Some(d.blow_up_cap))?,
        sample_every: e.positive("run.sample_every", Some(d.sample_every))?,
        max_change: e.positive("run.max_change", Some(d.max_change))?,
    })
}

fn parse_output(e: &mut Entries) -> Result<OutputSpec, ConfigError> {
    let mut out = OutputSpec::default();
    if let Some(entry) = e.take("output.times") {
        out.times = list(&entry.value)
            .map(|t| {
                let item = Entry { line: entry.line, value: t.to_string() };
                match parse_number("output.times", &item)? {
                    x if x >= 0.0 => Ok(x),
                    x => Err(ConfigError::Invalid {
                        line: entry.line,
                        reason: format!("output times must be non-negative (got {x})"),
                    }),
                }
            })
            .collect::<Result<_, _>>()?;
        out.times.sort_by(f64::total_cmp);
        out.times.dedup();
    }
    if let Some(entry) = e.take("output.fields") {
        out.fields = list(&entry.value)
            .map(|t| match t {
                "u" => Ok(FieldName::U),
                "v" => Ok(FieldName::V),
                _ => Err(ConfigError::UnknownTag { line: entry.line, family: "field", tag: t.to_string() }),
            })
            .collect::<Result<_, _>>()?;
        out.fields.sort();
        out.fields.dedup();
    }
    out.heatmaps = e.boolean("output.heatmaps", true)?;
    out.csv = e.boolean("output.csv", true)?;
    if let Some(entry) = e.take("output.modes") {
        out.modes = list(&entry.value)
            .map(|t| parse_mode("output.modes", entry.line, t))
            .collect::<Result<_, _>>()?;
    }
    Ok(out)
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

/// Parses and validates a scenario file, filling documented defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut e = lex(text)?;
    let name = match e.take("name") {
        None => "scenario".to_string(),
        Some(entry) if valid_name(&entry.value) => entry.value,
        Some(entry) => {
            return Err(ConfigError::Invalid {
                line: entry.line,
                reason: format!("name `{}` may only use letters, digits, `_`, `-` and `.`", entry.value),
            })
        }
    };
    let model = parse_model(&mut e)?;
    let domain = parse_domain(&mut e)?;
    let nx = e.cells("grid.nx", DEFAULT_CELLS)?;
    let ny = match domain.kind() {
        DomainKind::Interval => 1,
        DomainKind::Rectangle => e.cells("grid.ny", nx)?,
    };
    let init = parse_init(&mut e)?;
    let run = parse_run(&mut e, &model)?;
    let output = parse_output(&mut e)?;
    let init_kind = init.tag();
    let is_interval = domain.kind() == DomainKind::Interval;
    e.finish(|key| {
        if key.starts_with("init.") {
            format!(" for init.kind = {init_kind} or its shapes")
        } else if is_interval && (key == "grid.ny" || key == "domain.ly") {
            " on an interval".to_string()
        } else {
            String::new()
        }
    })?;
    Ok(ScenarioConfig { name, model, domain, nx, ny, init, run, output })
}

fn emit_profile(out: &mut String, field: &str, prof: &Profile) {
    let _ = writeln!(out, "init.{field}.base = {}", prof.base);
    let _ = writeln!(out, "init.{field}.shape = {}", prof.shape.tag());
    match prof.shape {
        Shape::None => {}
        Shape::Cosine { amp, kx, px, ky, py } => {
            for (k, x) in [("amp", amp), ("kx", kx), ("px", px), ("ky", ky), ("py", py)] {
                let _ = writeln!(out, "init.{field}.{k} = {x}");
            }
        }
        Shape::Gaussian { amp, x0, y0, width } => {
            for (k, x) in [("amp", amp), ("x0", x0), ("y0", y0), ("width", width)] {
                let _ = writeln!(out, "init.{field}.{k} = {x}");
            }
        }
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

/// Canonical text of `cfg`; every key is written and [`parse_config`]
/// reads it back to an equal value.
pub fn emit(cfg: &ScenarioConfig) -> String {
    let mut s = String::new();
    let p = &cfg.model;
    let _ = writeln!(s, "name = {}", cfg.name);
    let _ = writeln!(s, "\nmodel.d1 = {}", p.d1());
    let _ = writeln!(s, "model.d2 = {}", p.d2());
    let _ = writeln!(s, "model.chi = {}", p.chi());
    let _ = writeln!(s, "model.mu = {}", p.mu());
    let _ = writeln!(s, "model.ubar = {}", p.ubar());
    let _ = writeln!(s, "model.alpha = {}", p.alpha());
    let _ = writeln!(s, "model.phi = {}", p.sensitivity().tag());
    let _ = writeln!(s, "model.f = {}", p.kinetics().tag());
    if let Kinetics::AffineLinear { beta } = p.kinetics() {
        let _ = writeln!(s, "model.beta = {beta}");
    }
    match cfg.domain.ly() {
        None => {
            let _ = writeln!(s, "\ndomain.kind = interval\ndomain.lx = {}", cfg.domain.lx());
            let _ = writeln!(s, "\ngrid.nx = {}", cfg.nx);
        }
        Some(ly) => {
            let _ = writeln!(s, "\ndomain.kind = rectangle\ndomain.lx = {}\ndomain.ly = {ly}", cfg.domain.lx());
            let _ = writeln!(s, "\ngrid.nx = {}\ngrid.ny = {}", cfg.nx, cfg.ny);
        }
    }
    let _ = writeln!(s, "\ninit.kind = {}", cfg.init.tag());
    match &cfg.init {
        InitSpec::Expression { u, v } => {
            emit_profile(&mut s, "u", u);
            emit_profile(&mut s, "v", v);
        }
        InitSpec::BranchSeed { mode, s: amp } => {
            if let Some((m, n)) = mode {
                let _ = writeln!(s, "init.mode = {m}:{n}");
            }
            let _ = writeln!(s, "init.s = {amp}");
        }
        InitSpec::WhiteNoise { amp, seed } => {
            let _ = writeln!(s, "init.amp = {amp}\ninit.seed = {seed}");
        }
    }
    let r = &cfg.run;
    let _ = writeln!(s, "\nrun.t_max = {}", r.t_max);
    let _ = writeln!(s, "run.dt_max = {}", r.dt_max);
    let _ = writeln!(s, "run.tol_ss = {}", r.tol_ss);
    let _ = writeln!(s, "run.blow_up_cap = {}", r.blow_up_cap);
    let _ = writeln!(s, "run.sample_every = {}", r.sample_every);
    let _ = writeln!(s, "run.max_change = {}", r.max_change);
    let o = &cfg.output;
    let _ = writeln!(s, "\noutput.times = {}", join(&o.times, |t| t.to_string()));
    let _ = writeln!(s, "output.fields = {}", join(&o.fields, |f| f.tag().to_string()));
    let _ = writeln!(s, "output.heatmaps = {}", o.heatmaps);
    let _ = writeln!(s, "output.csv = {}", o.csv);
    let _ = writeln!(s, "output.modes = {}", join(&o.modes, |(m, n)| format!("{m}:{n}")));
    s
}
