//! TOML experiment configuration.
//!
//! Parsing is two-pass: the document is first walked against [`SCHEMA`] so
//! that every unknown key is reported, then each field is read and range
//! checked. All violations are collected before anything runs.

use std::fmt;
use std::path::PathBuf;

use active_scalar::analysis::RegimeQuery;
use active_scalar::constitutive::{classify_mode, ModeTag, Preset, Regularity, VelocityLaw};
use active_scalar::init::FilteredRandom;
use active_scalar::integrator::{Monitor, SolverConfig, StoppingLadder};
use active_scalar::noise::{CovarianceSpec, DiffusionSpec};
use active_scalar::spectral::{TorusGrid, Wavenumber};
use toml::{Table, Value};

/// Allowed keys per section. `init.modes` entries are checked separately.
pub const SCHEMA: &[(&str, &[&str])] = &[
    ("grid", &["d", "n"]),
    ("equation", &["law", "gamma", "regularity", "family", "matrix", "sigma", "nu", "alpha", "drift"]),
    ("noise", &["enabled", "covariance", "a", "r", "kmax", "diffusion", "c"]),
    ("time", &["dt", "t_end"]),
    ("stopping", &["s", "q", "thresholds"]),
    ("init", &["kind", "modes", "kmax", "slope", "target_norm", "s", "q", "path"]),
    ("ensemble", &["m", "master_seed"]),
    ("monitor", &["q", "beta"]),
    ("output", &["directory", "diagnostics_stride", "snapshot_stride", "snapshot_space"]),
    ("regime", &["mode", "q", "q0", "p", "delta"]),
];

const MODE_KEYS: &[&str] = &["k", "cos", "sin"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub violations: Vec<String>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration ({} problem{}):", self.violations.len(), if self.violations.len() == 1 { "" } else { "s" })?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Physical,
    Spectral,
}

impl Space {
    pub fn as_str(self) -> &'static str {
        match self {
            Space::Physical => "physical",
            Space::Spectral => "spectral",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    /// `Σ (cos_k cos k·x + sin_k sin k·x)`.
    Modes(Vec<(Wavenumber, f64, f64)>),
    FilteredRandom(FilteredRandom),
    /// A snapshot file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSpec {
    pub directory: PathBuf,
    pub snapshot_space: Space,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub solver: SolverConfig,
    pub init: InitSpec,
    pub m: usize,
    pub master_seed: u64,
    pub output: OutputSpec,
    pub regime: Option<RegimeQuery>,
    /// The document as parsed, echoed into manifests.
    pub source: Table,
}

struct Ctx {
    errors: Vec<String>,
}

impl Ctx {
    fn err(&mut self, msg: impl Into<String>) {
        self.errors.push(msg.into());
    }

    fn section<'a>(&mut self, root: &'a Table, name: &str) -> Option<&'a Table> {
        root.get(name).and_then(Value::as_table)
    }

    fn raw<'a>(&mut self, t: Option<&'a Table>, sec: &str, key: &str, required: bool) -> Option<&'a Value> {
        let v = t.and_then(|t| t.get(key));
        if v.is_none() && required {
            self.err(format!("missing required key {sec}.{key}"));
        }
        v
    }

    fn float(&mut self, t: Option<&Table>, sec: &str, key: &str, required: bool) -> Option<f64> {
        let v = self.raw(t, sec, key, required)?;
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            Value::String(s) if matches!(s.as_str(), "inf" | "infinity" | "∞") => Some(f64::INFINITY),
            _ => {
                self.err(format!("{sec}.{key} must be a number"));
                None
            }
        }
    }

    fn uint(&mut self, t: Option<&Table>, sec: &str, key: &str, required: bool) -> Option<u64> {
        let v = self.raw(t, sec, key, required)?;
        match v.as_integer() {
            Some(i) if i >= 0 => Some(i as u64),
            Some(_) => {
                self.err(format!("{sec}.{key} must be non-negative"));
                None
            }
            None => {
                self.err(format!("{sec}.{key} must be an integer"));
                None
            }
        }
    }

    fn string<'a>(&mut self, t: Option<&'a Table>, sec: &str, key: &str, required: bool) -> Option<&'a str> {
        let v = self.raw(t, sec, key, required)?;
        match v.as_str() {
            Some(s) => Some(s),
            None => {
                self.err(format!("{sec}.{key} must be a string"));
                None
            }
        }
    }

    fn boolean(&mut self, t: Option<&Table>, sec: &str, key: &str) -> Option<bool> {
        let v = self.raw(t, sec, key, false)?;
        match v.as_bool() {
            Some(b) => Some(b),
            None => {
                self.err(format!("{sec}.{key} must be true or false"));
                None
            }
        }
    }

    fn floats(&mut self, t: Option<&Table>, sec: &str, key: &str, required: bool) -> Option<Vec<f64>> {
        let v = self.raw(t, sec, key, required)?;
        let arr = v.as_array().and_then(|a| {
            a.iter()
                .map(|x| x.as_float().or_else(|| x.as_integer().map(|i| i as f64)))
                .collect::<Option<Vec<_>>>()
        });
        if arr.is_none() {
            self.err(format!("{sec}.{key} must be an array of numbers"));
        }
        arr
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) -> bool {
        if !ok {
            self.err(msg());
        }
        ok
    }
}

/// Lists every key the schema does not know, as dotted paths.
pub fn unknown_keys(root: &Table) -> Vec<String> {
    let mut out = Vec::new();
    for (name, value) in root {
        let Some((_, keys)) = SCHEMA.iter().find(|(s, _)| s == name) else {
            out.push(format!("unknown section or key '{name}'"));
            continue;
        };
        let Some(table) = value.as_table() else {
            out.push(format!("'{name}' must be a table"));
            continue;
        };
        for (key, v) in table {
            if !keys.contains(&key.as_str()) {
                out.push(format!("unknown key '{name}.{key}'"));
            } else if name == "init" && key == "modes" {
                for (i, entry) in v.as_array().into_iter().flatten().enumerate() {
                    for k in entry.as_table().into_iter().flat_map(|t| t.keys()) {
                        if !MODE_KEYS.contains(&k.as_str()) {
                            out.push(format!("unknown key 'init.modes[{i}].{k}'"));
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| ConfigError { violations: vec![format!("malformed TOML: {e}")] })?;
    from_table(root)
}

/// Sets a dotted key (`section.key`) to a TOML-literal value, e.g. for
/// command-line overrides and sweeps.
pub fn set_key(root: &mut Table, dotted: &str, literal: &str) -> Result<(), ConfigError> {
    let bad = |m: String| ConfigError { violations: vec![m] };
    let (sec, key) = dotted.split_once('.').ok_or_else(|| bad(format!("'{dotted}' is not of the form section.key")))?;
    let value: Value = format!("v = {literal}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(literal.to_string()));
    let entry = root.entry(sec.to_string()).or_insert_with(|| Value::Table(Table::new()));
    let table = entry.as_table_mut().ok_or_else(|| bad(format!("'{sec}' is not a table")))?;
    table.insert(key.to_string(), value);
    Ok(())
}

pub fn from_table(root: Table) -> Result<ExperimentConfig, ConfigError> {
    let mut cx = Ctx { errors: unknown_keys(&root) };

    // grid
    let g = cx.section(&root, "grid");
    if g.is_none() {
        cx.err("missing section [grid]");
    }
    let d = cx.uint(g, "grid", "d", true);
    let n = cx.uint(g, "grid", "n", true);
    let mut grid = None;
    if let (Some(d), Some(n)) = (d, n) {
        let d_ok = cx.check((1..=3).contains(&d), || format!("grid.d = {d} must be 1, 2 or 3"));
        let n_ok = cx.check(n >= 8 && n % 2 == 0, || format!("grid.n = {n} must be even and at least 8 (dealiased band nonempty)"));
        if d_ok && n_ok {
            match TorusGrid::new(d as usize, n as usize) {
                Ok(gr) => grid = Some(gr),
                Err(e) => cx.err(format!("grid: {e}")),
            }
        }
    }

    // equation
    let e = cx.section(&root, "equation");
    if e.is_none() {
        cx.err("missing section [equation]");
    }
    let nu = cx.float(e, "equation", "nu", true);
    let alpha = cx.float(e, "equation", "alpha", true);
    if let Some(nu) = nu {
        cx.check(nu > 0.0 && nu.is_finite(), || format!("equation.nu = {nu} must be positive"));
    }
    if let Some(a) = alpha {
        cx.check(a > 0.0 && a <= 2.0, || format!("equation.alpha = {a} must lie in (0, 2]"));
    }
    let drift = cx.boolean(e, "equation", "drift").unwrap_or(true);
    let law = parse_law(&mut cx, e);
    if let (Some(law), Some(grid)) = (&law, grid) {
        cx.check(law.dim() == grid.dim(), || {
            format!("equation.law '{}' is {}-dimensional but grid.d = {}", law.name(), law.dim(), grid.dim())
        });
    }

    // noise
    let nz = cx.section(&root, "noise");
    let noise_on = nz.is_some() && cx.boolean(nz, "noise", "enabled").unwrap_or(true);
    let mut cov = CovarianceSpec::identity(1);
    let mut diff = DiffusionSpec::Additive;
    if nz.is_some() {
        let kmax = cx.uint(nz, "noise", "kmax", noise_on);
        if let (Some(k), Some(n)) = (kmax, n) {
            cx.check(k <= n / 2, || format!("noise.kmax = {k} exceeds n/2 = {} (constraint kmax ≤ n/2)", n / 2));
        }
        let kmax = kmax.unwrap_or(1) as usize;
        match cx.string(nz, "noise", "covariance", false).unwrap_or("power_law") {
            "power_law" => {
                let a = cx.float(nz, "noise", "a", false).unwrap_or(1.0);
                let r = cx.float(nz, "noise", "r", false).unwrap_or(1.0);
                match CovarianceSpec::power_law(a, r, kmax) {
                    Ok(c) => cov = c,
                    Err(e) => cx.err(format!("noise: {e}")),
                }
            }
            "identity" => cov = CovarianceSpec::identity(kmax),
            other => cx.err(format!("noise.covariance '{other}' must be power_law or identity")),
        }
        let kind = cx.string(nz, "noise", "diffusion", false).unwrap_or("additive");
        let c = cx.float(nz, "noise", "c", kind != "additive");
        if let Some(c) = c {
            cx.check(c.is_finite(), || "noise.c must be finite".into());
        }
        match (kind, c) {
            ("additive", _) => diff = DiffusionSpec::Additive,
            ("linear", Some(c)) => diff = DiffusionSpec::Linear { c },
            ("saturated", Some(c)) => diff = DiffusionSpec::Saturated { c },
            ("linear" | "saturated", None) => {}
            (other, _) => cx.err(format!("noise.diffusion '{other}' must be additive, linear or saturated")),
        }
    }

    // time
    let tm = cx.section(&root, "time");
    if tm.is_none() {
        cx.err("missing section [time]");
    }
    let dt = cx.float(tm, "time", "dt", true);
    let t_end = cx.float(tm, "time", "t_end", true);
    if let Some(dt) = dt {
        cx.check(dt > 0.0 && dt.is_finite(), || format!("time.dt = {dt} must be positive"));
    }
    if let Some(t) = t_end {
        cx.check(t > 0.0 && t.is_finite(), || format!("time.t_end = {t} must be positive"));
    }

    // stopping
    let st = cx.section(&root, "stopping");
    let mut ladder = None;
    if st.is_some() {
        let s = cx.float(st, "stopping", "s", false).unwrap_or(0.0);
        let q = cx.float(st, "stopping", "q", false).unwrap_or(2.0);
        if let Some(th) = cx.floats(st, "stopping", "thresholds", true) {
            let increasing = th.windows(2).all(|w| w[0] < w[1]);
            cx.check(increasing, || "stopping.thresholds: ladder not increasing".into());
            cx.check(!th.is_empty(), || "stopping.thresholds must not be empty".into());
            if increasing && !th.is_empty() {
                match StoppingLadder::new(s, q, th) {
                    Ok(l) => ladder = Some(l),
                    Err(e) => cx.err(format!("stopping: {e}")),
                }
            }
        }
    }

    // monitor and output cadence
    let mo = cx.section(&root, "monitor");
    let mq = cx.float(mo, "monitor", "q", false).unwrap_or(2.0);
    cx.check(mq >= 2.0, || format!("monitor.q = {mq} must be at least 2"));
    let beta = cx.float(mo, "monitor", "beta", false).or(alpha.map(|a| a / 2.0)).unwrap_or(0.0);
    let out = cx.section(&root, "output");
    let directory = PathBuf::from(cx.string(out, "output", "directory", false).unwrap_or("out"));
    let record_stride = cx.uint(out, "output", "diagnostics_stride", false).unwrap_or(1);
    cx.check(record_stride >= 1, || "output.diagnostics_stride must be at least 1".into());
    let snapshot_stride = cx.uint(out, "output", "snapshot_stride", false).unwrap_or(0);
    let snapshot_space = match cx.string(out, "output", "snapshot_space", false).unwrap_or("spectral") {
        "spectral" => Space::Spectral,
        "physical" => Space::Physical,
        other => {
            cx.err(format!("output.snapshot_space '{other}' must be spectral or physical"));
            Space::Spectral
        }
    };

    // init
    let it = cx.section(&root, "init");
    if it.is_none() {
        cx.err("missing section [init]");
    }
    let init = parse_init(&mut cx, it, grid);

    // ensemble
    let en = cx.section(&root, "ensemble");
    let m = cx.uint(en, "ensemble", "m", false).unwrap_or(1);
    cx.check(m >= 1, || "ensemble.m must be at least 1".into());
    let master_seed = cx.uint(en, "ensemble", "master_seed", false).unwrap_or(0);

    // regime query echo
    let rg = cx.section(&root, "regime");
    let mut regime = None;
    if rg.is_some() {
        let mode = match cx.string(rg, "regime", "mode", false) {
            Some(s) => match s.parse::<ModeTag>() {
                Ok(t) => Some(t),
                Err(e) => {
                    cx.err(format!("regime.mode: {e}"));
                    None
                }
            },
            None => law.as_ref().map(|l| classify_mode(l).tag),
        };
        let q = cx.float(rg, "regime", "q", false).unwrap_or(mq);
        let q0 = cx.float(rg, "regime", "q0", false).unwrap_or(f64::INFINITY);
        let p = cx.float(rg, "regime", "p", false).unwrap_or(2.0);
        let delta = cx.float(rg, "regime", "delta", false).unwrap_or(0.0);
        if let (Some(mode), Some(d), Some(a)) = (mode, d, alpha) {
            let qr = RegimeQuery { d: d as usize, alpha: a, mode, q, q0, p, delta };
            if let Err(e) = qr.validate() {
                cx.err(format!("regime: {e}"));
            }
            regime = Some(qr);
        }
    }

    if cx.errors.is_empty() {
        let (Some(grid), Some(law), Some(nu), Some(alpha), Some(dt), Some(t_end), Some(init)) =
            (grid, law, nu, alpha, dt, t_end, init)
        else {
            unreachable!("every missing field records an error");
        };
        let mut solver = SolverConfig::new(grid, law, nu, alpha, dt, t_end).with_monitor(Monitor {
            q: mq,
            beta,
            record_stride: record_stride as usize,
            snapshot_stride: snapshot_stride as usize,
        });
        if noise_on {
            solver = solver.with_noise(cov, diff);
        } else {
            solver.cov = cov;
            solver.diff = diff;
        }
        if !drift {
            solver = solver.without_drift();
        }
        if let Some(l) = ladder {
            solver = solver.with_ladder(l);
        }
        if let Err(e) = solver.validate() {
            cx.err(e.to_string());
        } else {
            return Ok(ExperimentConfig {
                solver,
                init,
                m: m as usize,
                master_seed,
                output: OutputSpec { directory, snapshot_space },
                regime,
                source: root,
            });
        }
    }
    Err(ConfigError { violations: cx.errors })
}

fn parse_law(cx: &mut Ctx, e: Option<&Table>) -> Option<VelocityLaw> {
    let name = cx.string(e, "equation", "law", true)?;
    let gamma = cx.float(e, "equation", "gamma", false);
    let regularity = match cx.string(e, "equation", "regularity", false).unwrap_or("standard") {
        "standard" => Regularity::Standard,
        "smooth" => Regularity::Smooth,
        other => {
            cx.err(format!("equation.regularity '{other}' must be standard or smooth"));
            Regularity::Standard
        }
    };
    let law = if name == "custom" {
        let gamma = gamma.or_else(|| {
            cx.err("equation.gamma is required for a custom law");
            None
        })?;
        match cx.string(e, "equation", "family", true)? {
            "rotational" => {
                let matrix = cx.floats(e, "equation", "matrix", true)?;
                let dim = (matrix.len() as f64).sqrt().round() as usize;
                VelocityLaw::rotational("custom", dim, matrix, gamma)
            }
            "local" => {
                let sigma = cx.floats(e, "equation", "sigma", true)?;
                VelocityLaw::local("custom", sigma, gamma)
            }
            other => {
                cx.err(format!("equation.family '{other}' must be rotational or local"));
                return None;
            }
        }
    } else {
        let preset = match gamma {
            Some(g) => Preset::from_name(name, Some(g)),
            None => name.parse::<Preset>(),
        };
        preset.and_then(VelocityLaw::preset)
    };
    match law {
        Ok(l) => Some(l.with_regularity(regularity)),
        Err(err) => {
            cx.err(format!("equation.law: {err}"));
            None
        }
    }
}

fn parse_init(cx: &mut Ctx, it: Option<&Table>, grid: Option<TorusGrid>) -> Option<InitSpec> {
    match cx.string(it, "init", "kind", true)? {
        "modes" => {
            let Some(arr) = cx.raw(it, "init", "modes", true).map(|v| v.as_array()) else {
                return None;
            };
            let Some(arr) = arr else {
                cx.err("init.modes must be an array of {k, cos, sin} tables");
                return None;
            };
            let mut modes = Vec::new();
            for (i, entry) in arr.iter().enumerate() {
                let sec = format!("init.modes[{i}]");
                let Some(t) = entry.as_table() else {
                    cx.err(format!("{sec} must be a table"));
                    continue;
                };
                let k = cx.floats(Some(t), &sec, "k", true);
                let a = cx.float(Some(t), &sec, "cos", false).unwrap_or(0.0);
                let b = cx.float(Some(t), &sec, "sin", false).unwrap_or(0.0);
                let Some(k) = k else { continue };
                if k.iter().any(|c| c.fract() != 0.0) {
                    cx.err(format!("{sec}.k must hold integers"));
                    continue;
                }
                let comps: Vec<i64> = k.iter().map(|c| *c as i64).collect();
                if let Some(g) = grid {
                    if comps.len() != g.dim() {
                        cx.err(format!("{sec}.k has {} components but grid.d = {}", comps.len(), g.dim()));
                        continue;
                    }
                    let w = Wavenumber::new(&comps);
                    if !g.in_dealias_band(w) || g.index_of(w).is_none() {
                        cx.err(format!("{sec}.k = {w} lies outside the dealiased band of n = {}", g.n()));
                        continue;
                    }
                    modes.push((w, a, b));
                }
            }
            cx.check(!arr.is_empty(), || "init.modes must not be empty".into());
            Some(InitSpec::Modes(modes))
        }
        "filtered_random" => {
            let spec = FilteredRandom {
                kmax: cx.uint(it, "init", "kmax", true)? as usize,
                slope: cx.float(it, "init", "slope", false).unwrap_or(2.0),
                target_norm: cx.float(it, "init", "target_norm", true)?,
                s: cx.float(it, "init", "s", false).unwrap_or(0.0),
                q: cx.float(it, "init", "q", false).unwrap_or(2.0),
            };
            if let Err(e) = spec.validate() {
                cx.err(format!("init: {e}"));
            }
            Some(InitSpec::FilteredRandom(spec))
        }
        "file" => Some(InitSpec::File(PathBuf::from(cx.string(it, "init", "path", true)?))),
        other => {
            cx.err(format!("init.kind '{other}' must be modes, filtered_random or file"));
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const MINIMAL: &str = r#"
[grid]
d = 2
n = 64

[equation]
law = "sqg"
nu = 0.1
alpha = 1.5

[noise]
covariance = "power_law"
a = 0.1
r = 1.5
kmax = 4

[time]
dt = 0.01
t_end = 0.1

[init]
kind = "modes"
modes = [{ k = [1, 0], cos = 1.0 }, { k = [0, 1], sin = 0.5 }]
"#;

    #[test]
    fn minimal_config_is_accepted() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.solver.grid.n(), 64);
        assert!(!cfg.solver.deterministic);
        assert_eq!(cfg.m, 1);
        assert_eq!(cfg.solver.monitor.beta, 0.75);
    }

    #[test]
    fn kmax_equal_to_n_is_rejected_by_name() {
        let text = MINIMAL.replace("kmax = 4", "kmax = 64");
        let err = parse_config(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("kmax ≤ n/2")), "{err}");
    }

    #[test]
    fn decreasing_ladder_is_rejected() {
        let text = format!("{MINIMAL}\n[stopping]\nthresholds = [2, 1]\n");
        let err = parse_config(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("ladder not increasing")), "{err}");
    }

    #[test]
    fn all_violations_are_listed() {
        let text = MINIMAL
            .replace("alpha = 1.5", "alpha = 3.0\nviscosity = 1")
            .replace("dt = 0.01", "dt = -1.0")
            .replace("kmax = 4", "kmax = 40");
        let err = parse_config(&text).unwrap_err();
        let all = err.violations.join("\n");
        for needle in ["equation.viscosity", "equation.alpha", "time.dt", "noise.kmax"] {
            assert!(all.contains(needle), "missing {needle} in\n{all}");
        }
    }

    #[test]
    fn unknown_mode_key_is_reported() {
        let text = MINIMAL.replace("cos = 1.0 }", "cos = 1.0, phase = 2 }");
        let err = parse_config(&text).unwrap_err();
        assert!(err.violations.iter().any(|v| v.contains("init.modes[0].phase")));
    }

    #[test]
    fn overrides_use_toml_literals() {
        let mut t: Table = MINIMAL.parse().unwrap();
        set_key(&mut t, "equation.alpha", "1.75").unwrap();
        set_key(&mut t, "output.directory", "runs/a").unwrap();
        let cfg = from_table(t).unwrap();
        assert_eq!(cfg.solver.alpha, 1.75);
        assert_eq!(cfg.output.directory, PathBuf::from("runs/a"));
    }
}
