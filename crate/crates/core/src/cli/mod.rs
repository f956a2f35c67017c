//! The `nilmix` command line: one subcommand per experiment, each writing
//! CSV/JSON/SVG artifacts and a run manifest into `--out-dir`.

mod config;

pub use config::{load as load_config, merge, RunManifest};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::collect::{goodness_trial, k_size, CollectTrial};
use crate::ensemble::{
    cutoff_svg, minimal_set_survey, run_ensemble_on, trial_rng, ExperimentConfig, Filter, Mode,
    SurveyRow, DEFAULT_EPS, DEFAULT_MULTIPLIERS,
};
use crate::entropic::{cutoff_time, entropic_time, gaussian_approximation, EntropicParams};
use crate::error::{Error, Result};
use crate::geometry::{DiameterRow, GeneratorSet};
use crate::group::{write_table, GroupSpec, GroupSummary, GroupTable, DEFAULT_CAP};
use crate::mixing::{mixing_curve, MixingCurve};
use crate::report::{fmt_float, write_csv_file};

fn parse_enum<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    T::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(s))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "nilmix", version, about = "Random walks on finite nilpotent groups", arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// TOML config, or a manifest JSON to replay. Flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a group and summarise its lower central series.
    Group(GroupCmd),
    /// Diameters of the series layers and the layered bound.
    Diam(DiamCmd),
    /// Exact distance curves, mixing and relaxation times.
    Mix(MixCmd),
    /// Entropic time of the walk on Z^k and the cutoff parameters.
    Entropic(EntropicCmd),
    /// Goodness of the commutator pair-count matrix over word pairs.
    Collect(CollectCmd),
    /// Random-generator ensemble around t_*.
    Ensemble(EnsembleCmd),
    /// Minimal generating sets: spread of t_mix and t_rel.
    Survey(SurveyCmd),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Group(_) => "group",
            Command::Diam(_) => "diam",
            Command::Mix(_) => "mix",
            Command::Entropic(_) => "entropic",
            Command::Collect(_) => "collect",
            Command::Ensemble(_) => "ensemble",
            Command::Survey(_) => "survey",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Unitriangular,
    Heisenberg,
    Abelian,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupArgs {
    #[arg(long, value_parser = parse_enum::<Family>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u32>,
    /// Comma-separated moduli of an abelian group.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<u32>>,
    /// Enumeration cap on |G|.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Full spec, config file only; overrides the family flags.
    #[arg(skip)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spec: Option<GroupSpec>,
}

impl GroupArgs {
    fn to_spec(&self) -> Result<GroupSpec> {
        if let Some(s) = &self.spec {
            return Ok(s.clone());
        }
        let need = |x: Option<u32>, name: &str| {
            x.ok_or_else(|| Error::InvalidArgument(format!("--{name} is required for this family")))
        };
        match self.family {
            Some(Family::Unitriangular) => Ok(GroupSpec::unitriangular(need(self.m, "m")?, need(self.d, "d")?)),
            Some(Family::Heisenberg) => Ok(GroupSpec::heisenberg(need(self.m, "m")?, self.d.unwrap_or(1))),
            Some(Family::Abelian) => Ok(GroupSpec::abelian(
                self.moduli
                    .clone()
                    .ok_or_else(|| Error::InvalidArgument("--moduli is required for abelian".into()))?,
            )),
            None => Err(Error::InvalidArgument("--family is required".into())),
        }
    }

    fn build(&mut self) -> Result<GroupTable> {
        let spec = self.to_spec()?;
        let cap = *self.cap.get_or_insert(DEFAULT_CAP);
        let g = GroupTable::build(&spec, cap)?;
        self.spec = Some(spec);
        Ok(g)
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupCmd {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Also write the enumerated table in binary form.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub write_table: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiamCmd {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Random generating sets of this size; canonical generators only if absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sets: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MixCmd {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Random generating set of this size; canonical generators if absent.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EntropicCmd {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// log|G_ab|.
    #[arg(long = "logN", alias = "log-n")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_n: Option<f64>,
    /// log|G|; defaults to log|G_ab|.
    #[arg(long = "logG", alias = "log-g")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_g: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CollectCmd {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Time as a multiple of t_*.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult: Option<f64>,
    /// Keep only pairs with V = 0.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_zero: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleCmd {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_enum::<Mode>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Compute t_mix(eps) per trial in exact mode.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_mix: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<usize>,
    #[arg(long, value_parser = parse_enum::<Filter>)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<Filter>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub svg: Option<bool>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurveyCmd {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the exit code: 0 on success, 2 on bad input, 1 on failure.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli, &mut std::io::stdout()) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

struct Ctx {
    seed: u64,
    out_dir: PathBuf,
    outputs: Vec<PathBuf>,
}

impl Ctx {
    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.out_dir.join(name);
        self.outputs.push(p.clone());
        p
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        let mut f = std::fs::File::create(p)?;
        serde_json::to_writer_pretty(&mut f, value)?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// Runs a parsed command line, printing a JSON summary to `out`. Returns
/// the manifest.
pub fn execute<W: Write>(cli: Cli, out: &mut W) -> Result<RunManifest> {
    let file = match &cli.global.config {
        Some(p) => load_config(p)?,
        None => toml::Table::new(),
    };
    let int = |key: &str| -> Result<Option<u64>> {
        match file.get(key) {
            None => Ok(None),
            Some(toml::Value::Integer(i)) if *i >= 0 => Ok(Some(*i as u64)),
            Some(v) => Err(Error::Config(format!("{key} must be a nonnegative integer, got {v}"))),
        }
    };
    let seed = match cli.global.seed {
        Some(s) => s,
        None => int("seed")?.unwrap_or(0),
    };
    let threads = match cli.global.threads {
        Some(t) => Some(t),
        None => int("threads")?.map(|t| t as usize),
    };
    if threads == Some(0) {
        return Err(Error::InvalidArgument("--threads must be positive".into()));
    }
    let out_dir = match (&cli.global.out_dir, file.get("out_dir")) {
        (Some(p), _) => p.clone(),
        (None, Some(toml::Value::String(s))) => PathBuf::from(s),
        (None, Some(v)) => return Err(Error::Config(format!("out_dir must be a string, got {v}"))),
        (None, None) => PathBuf::from("out"),
    };
    std::fs::create_dir_all(&out_dir)?;
    let name = cli.command.name();
    let section = file.get(name);
    let started_at = chrono::Utc::now().to_rfc3339();
    let mut ctx = Ctx {
        seed,
        out_dir,
        outputs: Vec::new(),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let (config, summary) = pool.install(|| -> Result<(serde_json::Value, serde_json::Value)> {
        match &cli.command {
            Command::Group(a) => cmd_group(merge(a, section)?, &mut ctx),
            Command::Diam(a) => cmd_diam(merge(a, section)?, &mut ctx),
            Command::Mix(a) => cmd_mix(merge(a, section)?, &mut ctx),
            Command::Entropic(a) => cmd_entropic(merge(a, section)?, &mut ctx),
            Command::Collect(a) => cmd_collect(merge(a, section)?, &mut ctx),
            Command::Ensemble(a) => cmd_ensemble(merge(a, section)?, &mut ctx),
            Command::Survey(a) => cmd_survey(merge(a, section)?, &mut ctx),
        }
    })?;
    let manifest_path = ctx.out_dir.join("manifest.json");
    let mut outputs: Vec<String> = ctx.outputs.iter().map(|p| display(p)).collect();
    outputs.push(display(&manifest_path));
    let manifest = RunManifest {
        subcommand: name.into(),
        config,
        seed,
        threads,
        version: env!("CARGO_PKG_VERSION").into(),
        started_at,
        finished_at: chrono::Utc::now().to_rfc3339(),
        outputs,
    };
    let mut f = std::fs::File::create(&manifest_path)?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    f.write_all(b"\n")?;
    serde_json::to_writer_pretty(&mut *out, &summary)?;
    writeln!(out)?;
    Ok(manifest)
}

fn display(p: &Path) -> String {
    p.display().to_string()
}

type Outcome = Result<(serde_json::Value, serde_json::Value)>;

fn done<C: Serialize, S: Serialize>(config: &C, summary: &S) -> Outcome {
    Ok((serde_json::to_value(config)?, serde_json::to_value(summary)?))
}

fn generator_set(g: &GroupTable, k: Option<usize>, rng: &mut ChaCha8Rng) -> Result<GeneratorSet> {
    match k {
        Some(k) => GeneratorSet::random_generating(g, k, rng, 100_000),
        None => Ok(GeneratorSet::canonical(g)),
    }
}

fn cmd_group(mut a: GroupCmd, ctx: &mut Ctx) -> Outcome {
    let g = a.group.build()?;
    let summary = GroupSummary::of(&g);
    ctx.json("group.json", &summary)?;
    if *a.write_table.get_or_insert(false) {
        let p = ctx.path("group.nmx");
        write_table(&g, std::io::BufWriter::new(std::fs::File::create(p)?))?;
    }
    done(&a, &summary)
}

fn cmd_diam(mut a: DiamCmd, ctx: &mut Ctx) -> Outcome {
    let g = a.group.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let sets = match a.k {
        Some(_) => *a.sets.get_or_insert(10),
        None => 1,
    };
    let rows = (0..sets)
        .map(|_| DiameterRow::compute(&g, &generator_set(&g, a.k, &mut rng)?))
        .collect::<Result<Vec<_>>>()?;
    write_csv_file(&ctx.path("diam.csv"), &DiameterRow::HEADER, rows.iter().map(|r| r.record()))?;
    done(&a, &rows)
}

fn curve_rows(c: &MixingCurve) -> Vec<[String; 5]> {
    c.rows
        .iter()
        .map(|r| [r.t, r.d_g, r.d_gab, r.gap, r.bound].map(fmt_float))
        .collect()
}

fn cmd_mix(mut a: MixCmd, ctx: &mut Ctx) -> Outcome {
    let g = a.group.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let s = generator_set(&g, a.k, &mut rng)?;
    let times = a
        .times
        .get_or_insert_with(|| vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0])
        .clone();
    let eps = a.eps.get_or_insert_with(|| vec![DEFAULT_EPS]).clone();
    let curve = mixing_curve(&g, &s, &times, &eps)?;
    write_csv_file(&ctx.path("mix.csv"), &MixingCurve::HEADER, curve_rows(&curve))?;
    ctx.json("mix.json", &curve)?;
    done(&a, &curve)
}

#[derive(Serialize)]
struct EntropicOut {
    k: usize,
    log_n: f64,
    t0: f64,
    residual: f64,
    iterations: usize,
    gaussian_approximation: f64,
    params: Option<EntropicParams>,
}

fn cmd_entropic(mut a: EntropicCmd, ctx: &mut Ctx) -> Outcome {
    let k = a.k.ok_or_else(|| Error::InvalidArgument("--k is required".into()))?;
    let log_n = a.log_n.ok_or_else(|| Error::InvalidArgument("--logN is required".into()))?;
    let n = log_n.exp();
    let sol = entropic_time(k, n)?;
    let params = if k >= 2 && log_n > 0.0 {
        let log_g = *a.log_g.get_or_insert(log_n);
        Some(EntropicParams::new(k, log_n, log_g, a.omega)?)
    } else {
        None
    };
    let rec = EntropicOut {
        k,
        log_n,
        t0: sol.t0,
        residual: sol.residual,
        iterations: sol.iterations,
        gaussian_approximation: gaussian_approximation(k, n),
        params,
    };
    write_csv_file(
        &ctx.path("entropic.csv"),
        &["k", "logN", "t0", "residual", "iterations", "gaussian"],
        [[
            k.to_string(),
            fmt_float(log_n),
            fmt_float(rec.t0),
            fmt_float(rec.residual),
            rec.iterations.to_string(),
            fmt_float(rec.gaussian_approximation),
        ]],
    )?;
    ctx.json("entropic.json", &rec)?;
    done(&a, &rec)
}

#[derive(Serialize)]
struct CollectOut {
    t: f64,
    k_size: usize,
    trials: usize,
    draws: usize,
    good_fraction: f64,
}

const V_ZERO_ATTEMPTS: usize = 1_000_000;

fn cmd_collect(mut a: CollectCmd, ctx: &mut Ctx) -> Outcome {
    let g = a.group.build()?;
    let k = *a.k.get_or_insert(8);
    let trials = *a.trials.get_or_insert(1000);
    let mult = *a.mult.get_or_insert(1.2);
    let v_zero = *a.v_zero.get_or_insert(false);
    let t = mult * cutoff_time(k, &g, None)?.t_star;
    let kk = k_size(&g);
    let ab = g.ab_order() as u64;
    let mut rows: Vec<CollectTrial> = Vec::with_capacity(trials);
    let mut draws = 0;
    for i in 0..trials {
        let mut rng = trial_rng(ctx.seed, i);
        let mut attempts = 0;
        loop {
            draws += 1;
            attempts += 1;
            let tr = goodness_trial(ctx.seed, t, k, kk, ab, &mut rng)?;
            if !v_zero || tr.v_zero {
                rows.push(tr);
                break;
            }
            if attempts >= V_ZERO_ATTEMPTS {
                return Err(Error::InvalidArgument(format!(
                    "no V = 0 pair in {V_ZERO_ATTEMPTS} draws at t = {t}"
                )));
            }
        }
    }
    write_csv_file(&ctx.path("collect.csv"), &CollectTrial::HEADER, rows.iter().map(|r| r.record()))?;
    let good = rows.iter().filter(|r| r.good).count();
    done(
        &a,
        &CollectOut {
            t,
            k_size: kk,
            trials,
            draws,
            good_fraction: good as f64 / trials.max(1) as f64,
        },
    )
}

fn cmd_ensemble(mut a: EnsembleCmd, ctx: &mut Ctx) -> Outcome {
    let g = a.group.build()?;
    let cfg = ExperimentConfig {
        group: a.group.spec.clone().expect("set by build"),
        k: *a.k.get_or_insert(4),
        trials: *a.trials.get_or_insert(30),
        multipliers: a.multipliers.get_or_insert_with(|| DEFAULT_MULTIPLIERS.to_vec()).clone(),
        seed: ctx.seed,
        mode: *a.mode.get_or_insert(Mode::Exact),
        eps: *a.eps.get_or_insert(DEFAULT_EPS),
        t_mix: *a.t_mix.get_or_insert(true),
        pairs: *a.pairs.get_or_insert(10_000),
        filter: *a.filter.get_or_insert(Filter::Typical),
        omega: a.omega,
    };
    let e = run_ensemble_on(&g, &cfg)?;
    e.write_csv(std::fs::File::create(ctx.path("ensemble.csv"))?)?;
    e.write_summary_csv(std::fs::File::create(ctx.path("ensemble_summary.csv"))?)?;
    if *a.svg.get_or_insert(true) {
        let title = format!("{} k={} ({} trials)", g.spec().label(), cfg.k, cfg.trials);
        std::fs::write(ctx.path("cutoff.svg"), cutoff_svg(&e.summary, &title))?;
    }
    #[derive(Serialize)]
    struct Out<'a> {
        order: usize,
        t_star: f64,
        generated_fraction: f64,
        summary: &'a [crate::ensemble::QuantileRow],
        note: &'a str,
    }
    let out = Out {
        order: e.order,
        t_star: e.params.t_star,
        generated_fraction: e.generated_fraction,
        summary: &e.summary,
        note: e.note,
    };
    ctx.json("ensemble.json", &out)?;
    done(&a, &out)
}

fn cmd_survey(mut a: SurveyCmd, ctx: &mut Ctx) -> Outcome {
    let g = a.group.build()?;
    let count = *a.count.get_or_insert(20);
    let eps = *a.eps.get_or_insert(DEFAULT_EPS);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let s = minimal_set_survey(&g, count, eps, &mut rng)?;
    write_csv_file(&ctx.path("survey.csv"), &SurveyRow::HEADER, s.rows.iter().map(|r| r.record()))?;
    ctx.json("survey.json", &s)?;
    done(&a, &s)
}
