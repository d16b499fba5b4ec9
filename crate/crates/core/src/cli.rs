//! `noma` command-line front end.
//!
//! Every command produces a table. CSV output starts with `#`-prefixed
//! metadata lines (tool version, command, seed, parameters) followed by a
//! header row; JSON output is `{"meta": …, "data": …}`. Floats are printed in
//! their shortest round-trip form, so identical inputs give byte-identical
//! files.

use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::beamforming::{db_to_linear, fig3_experiment, Fig3Config, ZfNulling};
use crate::channel::FadingSpec;
use crate::downlink_rates::DownlinkScenario;
use crate::power_allocation::{
    max_sum_rate_allocation, min_power_allocation, min_power_allocation_capped,
    rate_region_boundary, RateTargets,
};
use crate::random_access::{
    aloha_throughput, default_grid, noma_aloha_throughput_2level, simulate_both_models,
    throughput_curve, uniform_grid, DecodingModel, RaConfig,
};
use crate::uplink_sic::UplinkScenario;
use crate::Error;

/// Exit status for malformed invocations and invalid inputs.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for infeasible problem instances.
pub const EXIT_DOMAIN: i32 = 3;
/// Exit status for I/O failures and failed self-checks.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "noma", version, about = "NOMA rate, power, beamforming and random-access toolkit")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file; `-` writes to standard output.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Two-user rate-region boundary and the minimum-power point.
    Fig1(Fig1Args),
    /// Mean NOMA and OMA total power versus antenna count.
    Fig3(Fig3Args),
    /// Analytic ALOHA and two-level NOMA-ALOHA throughput.
    Fig4(Fig4Args),
    /// Simulated multichannel NOMA-ALOHA throughput.
    Fig6(Fig6Args),
    /// SIC rates for an uplink scenario read from JSON.
    Uplink(UplinkArgs),
    /// Minimum-power allocation for rate targets.
    Alloc(AllocArgs),
    /// Re-run the reference values and report pass/fail.
    Selfcheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fig1(_) => "fig1",
            Command::Fig3(_) => "fig3",
            Command::Fig4(_) => "fig4",
            Command::Fig6(_) => "fig6",
            Command::Uplink(_) => "uplink",
            Command::Alloc(_) => "alloc",
            Command::Selfcheck => "selfcheck",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Fig1Args {
    #[arg(long, value_delimiter = ',', default_value = "1,0.25")]
    pub gains: Vec<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub total_power: f64,
    /// Number of uniformly spaced values of P1 on [0, total power].
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Rate targets of the marked minimum-power point.
    #[arg(long, value_delimiter = ',', default_value = "2,1")]
    pub targets: Vec<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct Fig3Args {
    #[arg(long, value_delimiter = ',', default_value = "4,6,8")]
    pub antennas: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 10.0)]
    pub g1_db: f64,
    #[arg(long, default_value_t = 6.0)]
    pub g2_db: f64,
    #[arg(long, default_value_t = 3)]
    pub clusters: usize,
    #[arg(long, default_value_t = 1.0)]
    pub strong_distance: f64,
    #[arg(long, default_value_t = 2.0)]
    pub weak_distance: f64,
    #[arg(long, default_value_t = 3.0)]
    pub path_loss: f64,
    #[arg(long, value_enum, default_value_t = NullingArg::WeakUsers)]
    pub nulling: NullingArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NullingArg {
    WeakUsers,
    AllUsers,
}

impl From<NullingArg> for ZfNulling {
    fn from(n: NullingArg) -> Self {
        match n {
            NullingArg::WeakUsers => ZfNulling::WeakUsers,
            NullingArg::AllUsers => ZfNulling::AllUsers,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Fig4Args {
    #[arg(long, default_value_t = 10)]
    pub users: usize,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct Fig6Args {
    #[arg(long, default_value_t = 200)]
    pub users: usize,
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, default_value_t = 6)]
    pub subcarriers: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Both)]
    pub model: ModelArg,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    IndependentSubchannel,
    SicBlocking,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct UplinkArgs {
    /// JSON scenario `{"gains":[…],"powers":[…],"order":[…]}`; `-` reads stdin.
    #[arg(long)]
    pub input: String,
    /// Optional rate tuple to test for feasibility.
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct AllocArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub gains: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub targets: Vec<f64>,
    /// Optional cap on the total power.
    #[arg(long)]
    pub cap: Option<f64>,
}

/// Where a run writes its artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputTarget {
    Stdout,
    File(PathBuf),
}

/// A fully parsed invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub output: OutputTarget,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        let output = if cli.output == "-" {
            OutputTarget::Stdout
        } else {
            OutputTarget::File(PathBuf::from(cli.output))
        };
        Self {
            command: cli.command,
            seed: cli.seed,
            output,
            format: cli.format,
        }
    }

    pub fn try_parse_from<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Cli::try_parse_from(args).map(Self::from_cli)
    }

    /// Checks command-specific requirements before anything runs.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: &str| Err(CliError::Usage(m.to_string()));
        match &self.command {
            Command::Fig1(a) => {
                if a.gains.len() != 2 || a.targets.len() != 2 {
                    return usage("fig1 needs exactly two gains and two targets");
                }
                if a.grid < 2 {
                    return usage("fig1 needs --grid of at least 2");
                }
            }
            Command::Fig3(a) => {
                if a.antennas.is_empty() || a.trials == 0 || a.clusters == 0 {
                    return usage("fig3 needs antenna counts, trials and clusters");
                }
            }
            Command::Fig4(a) => {
                if a.users < 2 || a.grid == 0 {
                    return usage("fig4 needs --users of at least 2 and a nonempty grid");
                }
            }
            Command::Fig6(a) => {
                if a.users == 0 || a.levels == 0 || a.subcarriers == 0 || a.trials == 0 || a.grid == 0 {
                    return usage("fig6 parameters must be positive");
                }
            }
            Command::Alloc(a) => {
                if a.gains.is_empty() || a.gains.len() != a.targets.len() {
                    return usage("alloc needs as many targets as gains");
                }
            }
            Command::Uplink(a) => {
                if a.input.is_empty() {
                    return usage("uplink needs --input");
                }
            }
            Command::Selfcheck => {}
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Io(io::Error),
    CheckFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io(_) | CliError::CheckFailed(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::CheckFailed(n) => write!(f, "{n} self-check(s) failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) => CliError::Domain(e.to_string()),
            Error::InvalidArgument(_) | Error::IndexOutOfRange { .. } => {
                CliError::Usage(e.to_string())
            }
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => x.to_string(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => num(*x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Result of a command before serialization.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub params: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Replaces the row records as the JSON payload when set.
    pub json_data: Option<Value>,
}

impl Report {
    fn new(command: &'static str, seed: u64, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            seed,
            params: Vec::new(),
            columns,
            rows: Vec::new(),
            json_data: None,
        }
    }

    fn param(&mut self, key: &str, value: impl fmt::Display) {
        self.params.push((key.to_string(), value.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# noma {}\n# command: {}\n# seed: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            self.seed
        );
        for (k, v) in &self.params {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.clone(), json!(v)))
            .collect();
        let data = self.json_data.clone().unwrap_or_else(|| {
            Value::Array(
                self.rows
                    .iter()
                    .map(|row| {
                        Value::Object(
                            self.columns
                                .iter()
                                .zip(row)
                                .map(|(c, v)| (c.to_string(), v.to_json()))
                                .collect(),
                        )
                    })
                    .collect(),
            )
        });
        let doc = json!({
            "meta": {
                "tool": "noma",
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "seed": self.seed,
                "params": params,
            },
            "data": data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("report is valid JSON");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }
}

fn list<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Executes the command and returns its report without writing it.
pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let seed = config.seed;
    match &config.command {
        Command::Fig1(a) => fig1(a, seed),
        Command::Fig3(a) => fig3(a, seed),
        Command::Fig4(a) => fig4(a, seed),
        Command::Fig6(a) => fig6(a, seed),
        Command::Uplink(a) => uplink(a, seed),
        Command::Alloc(a) => alloc(a, seed),
        Command::Selfcheck => {
            let report = selfcheck(seed);
            Ok(report)
        }
    }
}

/// Executes the command and writes the rendered artifact.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let report = execute(config)?;
    let text = report.render(config.format);
    match &config.output {
        OutputTarget::Stdout => io::stdout().lock().write_all(text.as_bytes())?,
        OutputTarget::File(path) => fs::write(path, text)?,
    }
    if report.command == "selfcheck" {
        let failed = report
            .rows
            .iter()
            .filter(|r| r.get(1) == Some(&Cell::Bool(false)))
            .count();
        if failed > 0 {
            return Err(CliError::CheckFailed(failed));
        }
    }
    Ok(report)
}

fn fig1(a: &Fig1Args, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::new("fig1", seed, vec!["kind", "P1", "P2", "R1", "R2"]);
    r.param("gains", list(&a.gains));
    r.param("total_power", a.total_power);
    r.param("grid", a.grid);
    r.param("targets", list(&a.targets));
    for pt in rate_region_boundary(&a.gains, a.total_power, a.grid)? {
        r.rows.push(vec![
            Cell::Text("boundary".into()),
            Cell::Num(pt.p1),
            Cell::Num(pt.p2),
            Cell::Num(pt.r1),
            Cell::Num(pt.r2),
        ]);
    }
    let sol = min_power_allocation(&a.gains, &RateTargets::new(a.targets.clone())?)?;
    let rates = sol.own_rates(&a.gains)?;
    r.rows.push(vec![
        Cell::Text("solution".into()),
        Cell::Num(sol.powers[0]),
        Cell::Num(sol.powers[1]),
        Cell::Num(rates[0]),
        Cell::Num(rates[1]),
    ]);
    Ok(r)
}

fn fig3(a: &Fig3Args, seed: u64) -> Result<Report, CliError> {
    let distances = (0..a.clusters)
        .flat_map(|_| [a.strong_distance, a.weak_distance])
        .collect();
    let spec = FadingSpec::new(1, distances, a.path_loss, seed)?;
    let mut cfg = Fig3Config::new(
        a.antennas.clone(),
        a.trials,
        spec,
        db_to_linear(a.g1_db),
        db_to_linear(a.g2_db),
    );
    cfg.nulling = a.nulling.into();
    let mut r = Report::new(
        "fig3",
        seed,
        vec!["L", "noma_mean_power", "oma_mean_power", "infeasible_rate"],
    );
    r.param("antennas", list(&a.antennas));
    r.param("trials", a.trials);
    r.param("g1_db", a.g1_db);
    r.param("g2_db", a.g2_db);
    r.param("clusters", a.clusters);
    r.param("strong_distance", a.strong_distance);
    r.param("weak_distance", a.weak_distance);
    r.param("path_loss", a.path_loss);
    r.param(
        "nulling",
        match a.nulling {
            NullingArg::WeakUsers => "weak_users",
            NullingArg::AllUsers => "all_users",
        },
    );
    for row in fig3_experiment(&cfg)? {
        r.rows.push(vec![
            Cell::Int(row.antennas as u64),
            Cell::Num(row.noma_mean_power),
            Cell::Num(row.oma_mean_power),
            Cell::Num(row.infeasible_rate),
        ]);
    }
    Ok(r)
}

fn fig4(a: &Fig4Args, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::new("fig4", seed, vec!["p_a", "aloha_T", "noma_T"]);
    r.param("users", a.users);
    r.param("grid", a.grid);
    for p in uniform_grid(a.grid) {
        r.rows.push(vec![
            Cell::Num(p),
            Cell::Num(aloha_throughput(a.users, p)?),
            Cell::Num(noma_aloha_throughput_2level(a.users, p)?),
        ]);
    }
    Ok(r)
}

fn fig6(a: &Fig6Args, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::new("fig6", seed, vec!["p_a", "mean_T", "stderr", "model"]);
    r.param("users", a.users);
    r.param("levels", a.levels);
    r.param("subcarriers", a.subcarriers);
    r.param("trials", a.trials);
    r.param("grid", a.grid);
    let models: &[DecodingModel] = match a.model {
        ModelArg::IndependentSubchannel => &[DecodingModel::IndependentSubchannel],
        ModelArg::SicBlocking => &[DecodingModel::SicBlocking],
        ModelArg::Both => &[DecodingModel::IndependentSubchannel, DecodingModel::SicBlocking],
    };
    r.param("model", list(&models.iter().map(|m| m.name()).collect::<Vec<_>>()));
    let base = RaConfig {
        users: a.users,
        access_prob: 0.0,
        power_levels: a.levels,
        subcarriers: a.subcarriers,
        decoding_model: DecodingModel::IndependentSubchannel,
        trials: a.trials,
        seed,
    };
    for p in uniform_grid(a.grid) {
        let (ind, blk) = simulate_both_models(&base.with_access_prob(p))?;
        for &m in models {
            let est = match m {
                DecodingModel::IndependentSubchannel => ind,
                DecodingModel::SicBlocking => blk,
            };
            r.rows.push(vec![
                Cell::Num(p),
                Cell::Num(est.mean),
                Cell::Num(est.stderr),
                Cell::Text(m.name().into()),
            ]);
        }
    }
    Ok(r)
}

fn uplink(a: &UplinkArgs, seed: u64) -> Result<Report, CliError> {
    let text = if a.input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(&a.input)?
    };
    let scenario: UplinkScenario = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid uplink scenario: {e}")))?;
    let rates = scenario.sic_rates();
    let total = scenario.total_mutual_information();
    let mut r = Report::new(
        "uplink",
        seed,
        vec!["user", "gain", "power", "decode_position", "sic_rate"],
    );
    r.param("input", &a.input);
    r.param("order", list(scenario.order()));
    r.param("total_mutual_information", total);
    let feasible = match &a.rates {
        Some(tuple) => {
            r.param("rates", list(tuple));
            let ok = scenario.feasible_rate_tuple(tuple)?;
            r.param("feasible", ok);
            Some(ok)
        }
        None => None,
    };
    for user in 1..=scenario.users() {
        let position = scenario.order().iter().position(|&u| u == user).unwrap_or(0) + 1;
        r.rows.push(vec![
            Cell::Int(user as u64),
            Cell::Num(scenario.gains()[user - 1]),
            Cell::Num(scenario.powers()[user - 1]),
            Cell::Int(position as u64),
            Cell::Num(rates[user - 1]),
        ]);
    }
    let mut data = json!({
        "order": scenario.order(),
        "sic_rates": rates.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "sum_rate": num(rates.iter().sum()),
        "total_mutual_information": num(total),
    });
    if let Some(ok) = feasible {
        data["feasible"] = json!(ok);
    }
    r.json_data = Some(data);
    Ok(r)
}

fn alloc(a: &AllocArgs, seed: u64) -> Result<Report, CliError> {
    let targets = RateTargets::new(a.targets.clone())?;
    let sol = match a.cap {
        Some(cap) => min_power_allocation_capped(&a.gains, &targets, cap)?,
        None => min_power_allocation(&a.gains, &targets)?,
    };
    let mut r = Report::new("alloc", seed, vec!["user", "gain", "target", "power"]);
    r.param("gains", list(&a.gains));
    r.param("targets", list(&a.targets));
    if let Some(cap) = a.cap {
        r.param("cap", cap);
    }
    r.param("total", sol.total);
    for (i, ((&g, &t), &p)) in a.gains.iter().zip(&a.targets).zip(&sol.powers).enumerate() {
        r.rows.push(vec![
            Cell::Int(i as u64 + 1),
            Cell::Num(g),
            Cell::Num(t),
            Cell::Num(p),
        ]);
    }
    r.json_data = Some(json!({
        "powers": sol.powers.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "total": num(sol.total),
    }));
    Ok(r)
}

struct Check {
    name: &'static str,
    value: f64,
    expected: f64,
    tol: f64,
}

impl Check {
    fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tol
    }
}

fn check(name: &'static str, value: Result<f64, Error>, expected: f64, tol: f64) -> Check {
    Check {
        name,
        value: value.unwrap_or(f64::NAN),
        expected,
        tol,
    }
}

fn flag(ok: bool) -> f64 {
    if ok {
        1.0
    } else {
        0.0
    }
}

/// Reference values of the downlink, beamforming and random-access models.
pub fn selfcheck_values(seed: u64) -> Vec<(&'static str, bool, f64, f64)> {
    let example = DownlinkScenario::new(vec![1.0, 0.25], vec![3.0, 7.0], None);
    let rate = |l, k| example.clone().and_then(|s| s.achievable_rate(l, k));
    let alloc = RateTargets::new(vec![2.0, 1.0])
        .and_then(|t| min_power_allocation(&[1.0, 0.25], &t));
    let sum_rate = max_sum_rate_allocation(&[1.0, 0.25], 10.0).and_then(|s| s.sum_rate(&[1.0, 0.25]));
    let on_boundary = rate_region_boundary(&[1.0, 0.25], 10.0, 11).map(|pts| {
        flag(pts.iter().any(|p| (p.r1 - 2.0).abs() < 1e-9 && (p.r2 - 1.0).abs() < 1e-9))
    });
    let aloha_peak = throughput_curve(
        &RaConfig {
            users: 10,
            access_prob: 0.0,
            power_levels: 1,
            subcarriers: 1,
            decoding_model: DecodingModel::IndependentSubchannel,
            trials: 1,
            seed,
        },
        &default_grid(),
    )
    .map(|c| c.peak.0);
    let noma_dominates = default_grid()
        .iter()
        .map(|&p| Ok(noma_aloha_throughput_2level(10, p)? >= aloha_throughput(10, p)?))
        .collect::<Result<Vec<bool>, Error>>()
        .map(|v| flag(v.into_iter().all(|b| b)));

    let spec = FadingSpec::new(1, vec![1.0, 2.0, 1.0, 2.0, 1.0, 2.0], 3.0, seed);
    let noma_below_oma = spec.and_then(|spec| {
        let cfg = Fig3Config::new(vec![4, 6, 8], 60, spec, db_to_linear(10.0), db_to_linear(6.0));
        fig3_experiment(&cfg).map(|rows| {
            flag(rows
                .iter()
                .all(|r| r.noma_mean_power <= r.oma_mean_power))
        })
    });
    let multichannel_peak = [0.10, 0.12, 0.14]
        .iter()
        .map(|&p| {
            simulate_both_models(&RaConfig {
                users: 200,
                access_prob: p,
                power_levels: 4,
                subcarriers: 6,
                decoding_model: DecodingModel::IndependentSubchannel,
                trials: 2000,
                seed,
            })
            .map(|(ind, _)| ind.mean)
        })
        .collect::<Result<Vec<f64>, Error>>()
        .map(|v| flag(v.into_iter().fold(f64::MIN, f64::max) > 4.5));

    let checks = vec![
        check("downlink C_1;1 = 2", rate(1, 1), 2.0, 1e-12),
        check("downlink C_2;2 = 1", rate(2, 2), 1.0, 1e-12),
        check("min power P1 = 3", alloc.clone().map(|s| s.powers[0]), 3.0, 1e-12),
        check("min power P2 = 7", alloc.clone().map(|s| s.powers[1]), 7.0, 1e-12),
        check("min power total = 10", alloc.map(|s| s.total), 10.0, 1e-12),
        check("max sum rate = log2(11) ~ 3.459", sum_rate, 3.459, 5e-4),
        check("(2,1) on the P_T = 10 boundary", on_boundary, 1.0, 0.0),
        check("G1 = 10 dB is 10", Ok(db_to_linear(10.0)), 10.0, 1e-12),
        check("G2 = 6 dB is ~3.981", Ok(db_to_linear(6.0)), 3.981, 5e-4),
        check("NOMA power <= OMA power for L = 4,6,8", noma_below_oma, 1.0, 0.0),
        check("ALOHA peak at p_a = 1/K (K = 10)", aloha_peak, 0.1, 0.0),
        check("ALOHA K = 1000 at 1/K ~ 1/e", aloha_throughput(1000, 0.001), (-1f64).exp(), 1e-3),
        check("1/e ~ 0.3679", Ok((-1f64).exp()), 0.3679, 5e-5),
        check("NOMA-ALOHA >= ALOHA (K = 10)", noma_dominates, 1.0, 0.0),
        check("K=200, B=6, L=4 peak exceeds 4.5", multichannel_peak, 1.0, 0.0),
    ];
    checks
        .into_iter()
        .map(|c| (c.name, c.passed(), c.value, c.expected))
        .collect()
}

fn selfcheck(seed: u64) -> Report {
    let mut r = Report::new("selfcheck", seed, vec!["check", "passed", "value", "expected"]);
    for (name, passed, value, expected) in selfcheck_values(seed) {
        r.rows.push(vec![
            Cell::Text(name.into()),
            Cell::Bool(passed),
            Cell::Num(value),
            Cell::Num(expected),
        ]);
    }
    r
}
