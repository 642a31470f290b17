//! Run configuration, the combined quantum/chain run, and its file outputs.
//!
//! Config files are flat `key = value` text. Blank lines and lines starting
//! with `#` are ignored. Complex values are written `a+bi`, e.g. `1+0.5i`,
//! `-i`, `0.25`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::analysis::{self, Distribution, RunReport};
use crate::bridge::{canonical_embed, lift, quantum_distribution, quantum_distribution_from_rw};
use crate::error::{Error, Result};
use crate::walk::dense::check_capacity;
use crate::walk::{DenseOperator, LatticeConfig, OperatorRole, QuantumState, RwState};

/// Agreement required between the matrix-free and dense engines.
pub const ENGINE_AGREEMENT_TOL: f64 = 1e-12;

/// Parse a complex literal such as `1+0.5i`, `-i`, `2e-3`, `0.5i`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("invalid complex literal {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix(['i', 'j']) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let re = if re.is_empty() {
        0.0
    } else {
        re.parse::<f64>().map_err(|_| bad())?
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Format a complex value in the literal syntax accepted by [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Initial condition, either a coin pair for the quantum walk or the four
/// chain rows, placed at the start site.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InitMode {
    QuantumCoin([Complex64; 2]),
    RwRows([Complex64; 4]),
}

impl InitMode {
    /// The chain initial condition used by the reference program: rows
    /// `(1 + i/2, 0, 0, 1 - i/2)`, which lift to the coin pair `(i, 0)`.
    pub fn reference() -> Self {
        let z = Complex64::new(0.0, 0.0);
        InitMode::RwRows([Complex64::new(1.0, 0.5), z, z, Complex64::new(1.0, -0.5)])
    }
}

impl FromStr for InitMode {
    type Err = Error;

    /// `qw:a,b` or `rw:r1,r2,r3,r4`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, values) = s
            .split_once(':')
            .ok_or_else(|| Error::config(format!("init {s:?} must look like qw:a,b or rw:r1,r2,r3,r4")))?;
        let values = values
            .split(',')
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::config(e.to_string()))?;
        match (kind.trim(), values.as_slice()) {
            ("qw", &[a, b]) => Ok(InitMode::QuantumCoin([a, b])),
            ("rw", &[a, b, c, d]) => Ok(InitMode::RwRows([a, b, c, d])),
            ("qw", _) => Err(Error::config("qw init needs exactly 2 values")),
            ("rw", _) => Err(Error::config("rw init needs exactly 4 values")),
            (other, _) => Err(Error::config(format!("unknown init kind {other:?}, expected qw or rw"))),
        }
    }
}

impl fmt::Display for InitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, values): (&str, Vec<String>) = match self {
            InitMode::QuantumCoin(c) => ("qw", c.iter().map(|z| format_complex(*z)).collect()),
            InitMode::RwRows(r) => ("rw", r.iter().map(|z| format_complex(*z)).collect()),
        };
        write!(f, "{kind}:{}", values.join(","))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Engine {
    #[default]
    MatrixFree,
    Dense,
    Both,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "matrix-free" => Ok(Engine::MatrixFree),
            "dense" => Ok(Engine::Dense),
            "both" => Ok(Engine::Both),
            other => Err(Error::config(format!(
                "unknown engine {other:?}, expected matrix-free, dense or both"
            ))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::MatrixFree => "matrix-free",
            Engine::Dense => "dense",
            Engine::Both => "both",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n: usize,
    /// 1-based start site; `None` means the center site `floor(d/2)`.
    pub start: Option<usize>,
    pub init: InitMode,
    pub engine: Engine,
    pub out_csv: Option<PathBuf>,
    pub out_json: Option<PathBuf>,
    pub out_svg: Option<PathBuf>,
    /// Append `row1..row4` (real parts of the chain rows) to the CSV.
    pub rows: bool,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            d: 80,
            n: 20,
            start: None,
            init: InitMode::reference(),
            engine: Engine::MatrixFree,
            out_csv: None,
            out_json: None,
            out_svg: None,
            rows: false,
            seed: 0,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid value {value:?} for {key}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::config(format!("invalid boolean {value:?} for {key}"))),
    }
}

impl ExperimentConfig {
    /// Set one `key = value` pair.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let path = || Some(PathBuf::from(value.trim()));
        match key.as_str() {
            "d" => self.d = parse_value(&key, value)?,
            "n" => self.n = parse_value(&key, value)?,
            "start" => self.start = Some(parse_value(&key, value)?),
            "init" => self.init = value.trim().parse()?,
            "engine" => self.engine = value.parse()?,
            "out_csv" => self.out_csv = path(),
            "out_json" => self.out_json = path(),
            "out_svg" => self.out_svg = path(),
            "rows" => self.rows = parse_bool(&key, value)?,
            "seed" => self.seed = parse_value(&key, value)?,
            other => return Err(Error::config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Apply every `key = value` line of a config file's text on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected key = value", lineno + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.merge_text(text)?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::from_text(&text)
    }

    pub fn start_site(&self) -> usize {
        self.start.unwrap_or(self.d / 2)
    }

    /// Validated lattice for this config.
    pub fn lattice(&self) -> Result<LatticeConfig> {
        LatticeConfig::new(self.d, self.start_site(), self.n)
    }

    /// Key/value echo of the simulation-relevant settings.
    pub fn echo(&self) -> BTreeMap<String, String> {
        BTreeMap::from([
            ("d".to_string(), self.d.to_string()),
            ("n".to_string(), self.n.to_string()),
            ("start".to_string(), self.start_site().to_string()),
            ("init".to_string(), self.init.to_string()),
            ("engine".to_string(), self.engine.to_string()),
            ("seed".to_string(), self.seed.to_string()),
        ])
    }
}

/// Everything a combined run produces.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub lattice: LatticeConfig,
    pub p0_qw: Distribution,
    pub p1_qw: Distribution,
    pub p0_rw: Distribution,
    pub p1_rw: Distribution,
    pub quantum: QuantumState,
    pub chain: RwState,
    pub report: RunReport,
}

/// Initial quantum and chain states for a run. A chain initial condition
/// is lifted to get the quantum one; a coin pair is embedded with `B^T / 2`.
pub fn initial_states(lattice: &LatticeConfig, init: &InitMode) -> (QuantumState, RwState) {
    match init {
        InitMode::RwRows(rows) => {
            let chain = crate::walk::init_rw(lattice, *rows);
            (lift(&chain).to_quantum(), chain)
        }
        InitMode::QuantumCoin(coin) => {
            let quantum = crate::walk::init_quantum(lattice, *coin);
            let chain = canonical_embed(&quantum);
            (quantum, chain)
        }
    }
}

fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn max_dist_diff(a: &Distribution, b: &Distribution) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Evolve both models `n` steps with the dense operators, one matrix-vector
/// product per step.
pub fn evolve_dense(quantum: &QuantumState, chain: &RwState, n: usize) -> Result<(QuantumState, RwState)> {
    let d = quantum.d();
    check_capacity(d)?;
    let u = DenseOperator::build(d, OperatorRole::QuantumStep)?;
    let big_u = DenseOperator::build(d, OperatorRole::ChainStep)?;
    let mut q = quantum.amplitudes().to_vec();
    let mut p = chain.populations().to_vec();
    for _ in 0..n {
        q = u.apply(&q);
        p = big_u.apply(&p);
    }
    Ok((QuantumState::from_amplitudes(q)?, RwState::from_populations(p, 0)?))
}

/// Simulate both models and assemble the report.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let lattice = cfg.lattice()?;
    if cfg.engine != Engine::MatrixFree {
        check_capacity(lattice.d())?;
    }
    let (q0, p0) = initial_states(&lattice, &cfg.init);
    let mut residuals = BTreeMap::new();

    let mut quantum = q0.clone();
    let mut chain = p0.clone();
    let mut leak = 0.0;
    let mut leak_population = Complex64::new(0.0, 0.0);
    if cfg.engine != Engine::Dense {
        for _ in 0..lattice.n() {
            leak += quantum.advance();
            leak_population += chain.advance(false);
        }
    }
    if cfg.engine != Engine::MatrixFree {
        let (dq, dp) = evolve_dense(&q0, &p0, lattice.n())?;
        if cfg.engine == Engine::Both {
            let dq_diff = max_abs_diff(dq.amplitudes(), quantum.amplitudes());
            let dp_diff = max_abs_diff(dp.populations(), chain.populations());
            residuals.insert("engine_quantum_max_abs_diff".to_string(), dq_diff);
            residuals.insert("engine_chain_max_abs_diff".to_string(), dp_diff);
            if dq_diff.max(dp_diff) > ENGINE_AGREEMENT_TOL {
                return Err(Error::Verification(format!(
                    "matrix-free and dense engines differ by {:.3e}",
                    dq_diff.max(dp_diff)
                )));
            }
        } else {
            leak = analysis::leakage(&[q0.clone(), dq.clone()]).max(0.0);
            leak_population = p0.population() - dp.population();
            quantum = dq;
            chain = dp;
        }
    }

    let (p0_qw, p1_qw) = quantum_distribution(&quantum);
    let (p0_rw, p1_rw) = quantum_distribution_from_rw(&chain, lattice.n())?;
    residuals.insert(
        "qw_rw_max_abs_diff".to_string(),
        max_dist_diff(&p0_qw, &p0_rw).max(max_dist_diff(&p1_qw, &p1_rw)),
    );

    let energy = analysis::energy(&p0_rw, &p1_rw);
    let population = chain.population();
    let mut moments = BTreeMap::new();
    for (name, dist) in [
        ("p0_qw", &p0_qw),
        ("p1_qw", &p1_qw),
        ("p0_rw", &p0_rw),
        ("p1_rw", &p1_rw),
    ] {
        moments.insert(name.to_string(), analysis::moments(dist).ok());
    }
    moments.insert(
        "qw_total".to_string(),
        analysis::moments(&Distribution::sum_of([&p0_qw, &p1_qw])).ok(),
    );
    let row_sum = Distribution::new(
        chain
            .populations()
            .chunks_exact(4)
            .map(|r| r.iter().map(|z| z.re).sum())
            .collect(),
    );
    moments.insert("rw_row_sum".to_string(), analysis::moments(&row_sum).ok());

    let report = RunReport {
        energy,
        population_re: population.re,
        population_im: population.im,
        leak,
        leak_population: leak_population.re,
        moments,
        residuals,
        config_echo: cfg.echo(),
    };

    Ok(RunOutput {
        lattice,
        p0_qw,
        p1_qw,
        p0_rw,
        p1_rw,
        quantum,
        chain,
        report,
    })
}

/// Format a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const CSV_HEADER: &str = "site,p0_qw,p1_qw,p0_rw,p1_rw";

/// Per-site CSV table, LF line endings.
pub fn to_csv(out: &RunOutput, with_rows: bool) -> String {
    let mut s = String::from(CSV_HEADER);
    if with_rows {
        s.push_str(",row1,row2,row3,row4");
    }
    s.push('\n');
    for site in 1..=out.lattice.d() {
        let i = site - 1;
        let _ = write!(
            s,
            "{site},{},{},{},{}",
            fmt_f64(out.p0_qw.values()[i]),
            fmt_f64(out.p1_qw.values()[i]),
            fmt_f64(out.p0_rw.values()[i]),
            fmt_f64(out.p1_rw.values()[i]),
        );
        if with_rows {
            for z in out.chain.rows_at(site) {
                let _ = write!(s, ",{}", fmt_f64(z.re));
            }
        }
        s.push('\n');
    }
    s
}

pub fn to_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
