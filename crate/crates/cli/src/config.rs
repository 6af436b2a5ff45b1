//! Line-oriented run configuration.
//!
//! ```text
//! # comment
//! [grid]
//! N = 256
//! L = 64
//! [params]
//! b = 2
//! ```
//!
//! Every key belongs to one section and has a unique name, so command-line
//! flags use the bare name (`--N 512`). Flags override file values, which
//! override defaults. Validation reports every problem at once.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chslab_core::holder::DirectionKind;
use chslab_core::solver::{ProfileKind, SystemParams};
use chslab_core::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Holder,
    Ineq,
    T0Probe,
    Kernel,
}

impl Command {
    pub const ALL: [Command; 5] = [Self::Solve, Self::Holder, Self::Ineq, Self::T0Probe, Self::Kernel];

    pub fn name(self) -> &'static str {
        match self {
            Self::Solve => "solve",
            Self::Holder => "holder",
            Self::Ineq => "ineq",
            Self::T0Probe => "t0probe",
            Self::Kernel => "kernel",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command '{s}' (expected solve, holder, ineq, t0probe or kernel)"))
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub struct KeySpec {
    pub section: &'static str,
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(section: &'static str, name: &'static str, default: &'static str, help: &'static str) -> KeySpec {
    KeySpec {
        section,
        name,
        default,
        help,
    }
}

/// Every recognised key, in echo order.
pub const SCHEMA: &[KeySpec] = &[
    key("grid", "N", "256", "grid points (power of two, at least 8)"),
    key("grid", "L", "64", "domain length"),
    key("params", "b", "2", "nonlinearity parameter, any real except 1"),
    key("params", "kappa", "1", "density coupling κ"),
    key("params", "alpha", "0", "linear dispersion α"),
    key("params", "c_s", "1", "existence-time constant"),
    key("initial", "kind", "gaussian", "zero | gaussian | sech2 | random-decay"),
    key("initial", "amplitude", "1", "peak of u₀"),
    key("initial", "width", "4", "profile width"),
    key("initial", "rho_amplitude", "0.5", "peak of ρ₀"),
    key("initial", "norm", "none", "rescale data to this value of ‖u₀‖_{H^s} + ‖ρ₀‖_{H^{s-2}}"),
    key("indices", "s", "4", "data regularity"),
    key("indices", "r", "2", "distance regularity / lemma index"),
    key("indices", "j", "1", "product-lemma index j"),
    key("indices", "k", "2", "product-lemma index k"),
    key("indices", "sigma", "0.5", "commutator index σ"),
    key("run", "t_end", "1", "final time for solve"),
    key("run", "stride", "1", "keep every stride-th state"),
    key("run", "snapshot", "false", "write the final state as a binary snapshot"),
    key("run", "max_horizon", "4", "longest horizon for t0probe"),
    key("run", "seed", "0", "seed for every random draw"),
    key("run", "threads", "0", "worker threads (0 = all cores)"),
    key("holder", "cases", "4:1, 4:2, 4:3.5, 3.75:1", "comma-separated s:r pairs"),
    key("holder", "h", "2", "ball radius"),
    key("holder", "base", "gaussian", "base profile"),
    key("holder", "direction", "high-mode", "high-mode | random-decay | zero"),
    key("holder", "base_amplitude", "0.4", "peak of the base u₀"),
    key("holder", "base_width", "4", "width of base and direction"),
    key("holder", "deltas", "1e-6, 1e-7, 1e-8, 1e-9", "decreasing amplitude ladder"),
    key("holder", "horizon", "auto", "final time, or auto for the fitted existence time"),
    key("holder", "rho_trivial", "false", "use vanishing density"),
    key("ineq", "lemma", "all", "all | algebra | kato-ponce | mollifier | calderon | product-low | product-negative | sweep | interpolation"),
    key("ineq", "ensemble", "200", "samples per probe"),
    key("ineq", "gamma", "0.6", "spectral decay beyond the target smoothness (> 1/2)"),
    key("ineq", "field_amplitude", "1", "sample amplitude"),
    key("ineq", "ladder_steps", "6", "mollifier scales 1 … 2^-steps"),
    key("ineq", "mollifier_N", "1024", "grid points for the mollifier probe"),
    key("ineq", "mollifier_L", "12.566370614359172", "domain length for the mollifier probe"),
    key("ineq", "s1", "-1", "lower interpolation index"),
    key("ineq", "s2", "3", "upper interpolation index"),
    key("ineq", "thetas", "0, 0.25, 0.5, 0.75, 1", "interpolation weights"),
    key("ineq", "sweep_modes", "8", "modes in the frequency sweep"),
    key("ineq", "samples_csv", "false", "write per-sample ratios"),
    key("kernel", "per_decade", "10", "η points per decade"),
];

pub fn lookup(name: &str) -> Option<&'static KeySpec> {
    SCHEMA.iter().find(|k| k.name == name)
}

/// Raw `key -> value` text after layering defaults, file and flags.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    values: BTreeMap<&'static str, String>,
}

impl RawConfig {
    pub fn defaults() -> Self {
        Self {
            values: SCHEMA.iter().map(|k| (k.name, k.default.to_string())).collect(),
        }
    }

    /// Parses file text on top of the current values.
    pub fn merge_text(&mut self, text: &str, errors: &mut Vec<String>) {
        let mut section: Option<String> = None;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            let at = no + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) if SCHEMA.iter().any(|k| k.section == name.trim()) => {
                        section = Some(name.trim().to_string())
                    }
                    Some(name) => errors.push(format!("line {at}: unknown section [{}]", name.trim())),
                    None => errors.push(format!("line {at}: malformed section header '{line}'")),
                }
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errors.push(format!("line {at}: expected 'key = value', got '{line}'"));
                continue;
            };
            let (k, v) = (k.trim(), v.trim());
            match lookup(k) {
                None => errors.push(format!("line {at}: unknown key '{k}'")),
                Some(spec) => match &section {
                    Some(s) if s != spec.section => errors.push(format!(
                        "line {at}: key '{k}' belongs to section [{}], not [{s}]",
                        spec.section
                    )),
                    _ => {
                        self.values.insert(spec.name, v.to_string());
                    }
                },
            }
        }
    }

    pub fn set(&mut self, name: &str, value: &str, errors: &mut Vec<String>) {
        match lookup(name) {
            Some(spec) => {
                self.values.insert(spec.name, value.trim().to_string());
            }
            None => errors.push(format!("unknown key '{name}'")),
        }
    }

    pub fn get(&self, name: &str) -> &str {
        self.values.get(name).map(String::as_str).unwrap_or("")
    }
}

/// Validated settings for one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub out: PathBuf,
    pub grid: Grid,
    pub params: SystemParams,
    pub initial: InitialSpec,
    pub s: f64,
    pub r: f64,
    pub j: f64,
    pub k: f64,
    pub sigma: f64,
    pub t_end: f64,
    pub stride: usize,
    pub snapshot: bool,
    pub max_horizon: f64,
    pub seed: u64,
    pub threads: usize,
    pub holder: HolderSpec,
    pub ineq: IneqSpec,
    pub per_decade: usize,
    raw: RawConfig,
}

#[derive(Clone, Debug)]
pub struct InitialSpec {
    pub kind: ProfileKind,
    pub amplitude: f64,
    pub width: f64,
    pub rho_amplitude: f64,
    pub norm: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct HolderSpec {
    pub cases: Vec<(f64, f64)>,
    pub h: f64,
    pub base: ProfileKind,
    pub direction: DirectionKind,
    pub amplitude: f64,
    pub width: f64,
    pub deltas: Vec<f64>,
    pub horizon: Option<f64>,
    pub rho_trivial: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    All,
    Algebra,
    KatoPonce,
    Mollifier,
    Calderon,
    ProductLow,
    ProductNegative,
    Sweep,
    Interpolation,
}

impl FromStr for Lemma {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "all" => Self::All,
            "algebra" => Self::Algebra,
            "kato-ponce" => Self::KatoPonce,
            "mollifier" => Self::Mollifier,
            "calderon" => Self::Calderon,
            "product-low" => Self::ProductLow,
            "product-negative" => Self::ProductNegative,
            "sweep" => Self::Sweep,
            "interpolation" => Self::Interpolation,
            other => return Err(format!("unknown lemma '{other}'")),
        })
    }
}

#[derive(Clone, Debug)]
pub struct IneqSpec {
    pub lemma: Lemma,
    pub ensemble: usize,
    pub gamma: f64,
    pub amplitude: f64,
    pub ladder_steps: u32,
    pub mollifier_grid: Option<Grid>,
    pub s1: f64,
    pub s2: f64,
    pub thetas: Vec<f64>,
    pub sweep_modes: usize,
    pub samples_csv: bool,
}

impl RunConfig {
    /// `section.key = value` lines for every effective setting.
    pub fn echo(&self) -> String {
        let mut out = format!("command = {}\n", self.command);
        for k in SCHEMA {
            out.push_str(&format!("{}.{} = {}\n", k.section, k.name, self.raw.get(k.name)));
        }
        out
    }

    pub fn raw(&self) -> &RawConfig {
        &self.raw
    }
}

/// Typed field extraction that records failures instead of stopping.
struct Reader<'a> {
    raw: &'a RawConfig,
    errors: Vec<String>,
}

impl Reader<'_> {
    fn parse<T: FromStr>(&mut self, name: &str, what: &str) -> Option<T> {
        let text = self.raw.get(name);
        match text.parse::<T>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.errors.push(format!("{name}: expected {what}, got '{text}'"));
                None
            }
        }
    }

    fn real(&mut self, name: &str) -> f64 {
        match self.parse::<f64>(name, "a real number") {
            Some(v) if v.is_finite() => v,
            Some(v) => {
                self.errors.push(format!("{name}: must be finite, got {v}"));
                f64::NAN
            }
            None => f64::NAN,
        }
    }

    fn positive(&mut self, name: &str) -> f64 {
        let v = self.real(name);
        if v.is_finite() && v <= 0.0 {
            self.errors.push(format!("{name}: must be positive, got {v}"));
        }
        v
    }

    fn count(&mut self, name: &str) -> usize {
        self.parse::<usize>(name, "a non-negative integer").unwrap_or(0)
    }

    fn flag(&mut self, name: &str) -> bool {
        self.parse::<bool>(name, "true or false").unwrap_or(false)
    }

    fn optional_real(&mut self, name: &str, sentinel: &str) -> Option<f64> {
        if self.raw.get(name) == sentinel {
            None
        } else {
            Some(self.positive(name))
        }
    }

    fn reals(&mut self, name: &str) -> Vec<f64> {
        let text = self.raw.get(name).to_string();
        let mut out = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item.parse::<f64>() {
                Ok(v) if v.is_finite() => out.push(v),
                _ => self.errors.push(format!("{name}: '{item}' is not a real number")),
            }
        }
        out
    }

    fn cases(&mut self, name: &str) -> Vec<(f64, f64)> {
        let text = self.raw.get(name).to_string();
        let mut out = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let parsed = item
                .split_once(':')
                .and_then(|(s, r)| Some((s.trim().parse::<f64>().ok()?, r.trim().parse::<f64>().ok()?)));
            match parsed {
                Some(c) => out.push(c),
                None => self.errors.push(format!("{name}: '{item}' is not an s:r pair")),
            }
        }
        out
    }

    fn choice<T: FromStr>(&mut self, name: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        match self.raw.get(name).parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.errors.push(format!("{name}: {e}"));
                None
            }
        }
    }
}

/// Validates layered settings for `command`; returns every problem found.
pub fn build(command: Command, raw: RawConfig, out: PathBuf) -> Result<RunConfig, Vec<String>> {
    let mut rd = Reader {
        raw: &raw,
        errors: Vec::new(),
    };

    let n = rd.count("N");
    let l = rd.positive("L");
    let grid = match Grid::new(l, n) {
        Ok(g) => Some(g),
        Err(e) if l.is_finite() && n > 0 => {
            rd.errors.push(format!("N, L: {e}"));
            None
        }
        Err(_) => None,
    };

    let b = rd.real("b");
    if b == 1.0 {
        rd.errors
            .push("b: b = 1 is excluded; the system requires b ∈ ℝ∖{1}".to_string());
    }
    let kappa = rd.real("kappa");
    let alpha = rd.real("alpha");
    let c_s = rd.positive("c_s");
    let params = SystemParams {
        b,
        kappa,
        alpha,
        c_s,
    };

    let initial = InitialSpec {
        kind: rd.choice("kind").unwrap_or(ProfileKind::Zero),
        amplitude: rd.real("amplitude"),
        width: rd.positive("width"),
        rho_amplitude: rd.real("rho_amplitude"),
        norm: rd.optional_real("norm", "none"),
    };

    let s = rd.real("s");
    let r = rd.real("r");
    let j = rd.real("j");
    let k = rd.real("k");
    let sigma = rd.real("sigma");
    let t_end = rd.positive("t_end");
    let stride = rd.count("stride");
    if stride == 0 {
        rd.errors.push("stride: must be at least 1".into());
    }
    let snapshot = rd.flag("snapshot");
    let max_horizon = rd.positive("max_horizon");
    let seed = rd.parse::<u64>("seed", "a non-negative integer").unwrap_or(0);
    let threads = rd.count("threads");

    let holder = HolderSpec {
        cases: rd.cases("cases"),
        h: rd.positive("h"),
        base: rd.choice("base").unwrap_or(ProfileKind::Gaussian),
        direction: rd.choice("direction").unwrap_or(DirectionKind::HighMode),
        amplitude: rd.real("base_amplitude"),
        width: rd.positive("base_width"),
        deltas: rd.reals("deltas"),
        horizon: rd.optional_real("horizon", "auto"),
        rho_trivial: rd.flag("rho_trivial"),
    };

    let gamma = rd.real("gamma");
    if gamma.is_finite() && gamma <= 0.5 {
        rd.errors.push(format!("gamma: decay exponent must exceed 1/2, got {gamma}"));
    }
    let mollifier_n = rd.count("mollifier_N");
    let mollifier_l = rd.positive("mollifier_L");
    let ineq = IneqSpec {
        lemma: rd.choice("lemma").unwrap_or(Lemma::All),
        ensemble: rd.count("ensemble"),
        gamma,
        amplitude: rd.positive("field_amplitude"),
        ladder_steps: rd.parse::<u32>("ladder_steps", "a non-negative integer").unwrap_or(0),
        mollifier_grid: Grid::new(mollifier_l, mollifier_n).ok(),
        s1: rd.real("s1"),
        s2: rd.real("s2"),
        thetas: rd.reals("thetas"),
        sweep_modes: rd.count("sweep_modes"),
        samples_csv: rd.flag("samples_csv"),
    };
    let per_decade = rd.count("per_decade");

    match command {
        Command::Holder => {
            if holder.cases.is_empty() && rd.raw.get("cases").trim().is_empty() {
                // An empty table is allowed.
            }
            for &(cs, cr) in &holder.cases {
                if cs <= 3.5 {
                    rd.errors.push(format!("cases: s must exceed 7/2, got s = {cs} (r = {cr})"));
                }
            }
        }
        Command::Ineq => {
            if ineq.ensemble == 0 {
                rd.errors.push("ensemble: must be positive".into());
            }
            if matches!(ineq.lemma, Lemma::All | Lemma::Mollifier) && ineq.mollifier_grid.is_none() {
                rd.errors.push("mollifier_N, mollifier_L: not a valid grid".into());
            }
            if matches!(ineq.lemma, Lemma::All | Lemma::Interpolation) && ineq.s1 >= ineq.s2 {
                rd.errors.push(format!("s1, s2: need s1 < s2, got {} and {}", ineq.s1, ineq.s2));
            }
            if matches!(ineq.lemma, Lemma::All | Lemma::Sweep) && ineq.sweep_modes < 2 {
                rd.errors.push("sweep_modes: need at least 2".into());
            }
        }
        Command::Kernel => {
            if per_decade == 0 {
                rd.errors.push("per_decade: must be positive".into());
            }
        }
        Command::Solve | Command::T0Probe => {}
    }

    let errors = rd.errors;
    match grid {
        Some(grid) if errors.is_empty() => Ok(RunConfig {
            command,
            out,
            grid,
            params,
            initial,
            s,
            r,
            j,
            k,
            sigma,
            t_end,
            stride,
            snapshot,
            max_horizon,
            seed,
            threads,
            holder,
            ineq,
            per_decade,
            raw,
        }),
        _ => Err(errors),
    }
}

/// Parses file text for `command` with no flag overrides.
pub fn parse_config(command: Command, text: &str, out: PathBuf) -> Result<RunConfig, Vec<String>> {
    let mut raw = RawConfig::defaults();
    let mut errors = Vec::new();
    raw.merge_text(text, &mut errors);
    match build(command, raw, out) {
        Ok(cfg) if errors.is_empty() => Ok(cfg),
        Ok(_) => Err(errors),
        Err(more) => {
            errors.extend(more);
            Err(errors)
        }
    }
}
