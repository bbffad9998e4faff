mod commands;
mod config;
mod funcs;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use oplab::Error;
use serde_json::json;

use commands::*;
use report::{error_json, exit_code, write_atomic, Data, Inputs, Report};

#[derive(Debug, Parser)]
#[command(name = "oplab", version, about = "Seeded experiments on commutator and Schur-multiplier estimates")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Args)]
struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Report path; the report goes to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Plot-data path; defaults to the report path with a `.csv` extension.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Exit with status 4 when the run produced warnings.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Variance of `a` in a state, with the rank-one identity and perturbation gap.
    Variance(VarianceArgs),
    /// Decide variance domination of a 2x2 pair.
    #[command(name = "decide2x2")]
    Decide2x2(Decide2x2Args),
    /// Recover `b = alpha a + beta` or `alpha a* + beta` from equal variances.
    #[command(name = "recover-th1")]
    RecoverTh1(RecoverTh1Args),
    /// Extract `f` with `b = f(a)` on the spectrum and test its Lipschitz bound.
    #[command(name = "extract-f")]
    ExtractF(ExtractFArgs),
    /// Bracket the Schur-multiplier norm with witness and certificate.
    #[command(name = "schur-norm")]
    SchurNorm(SchurNormArgs),
    /// Lower bound for `sup ||[b,x]|| / ||[a,x]||` with its witness.
    Kappa(KappaArgs),
    /// Bracket kappa for commuting normal matrices.
    #[command(name = "kappa-exact")]
    KappaExact(KappaExactArgs),
    /// Recover the structure behind equal commutator norms.
    #[command(name = "recover-th42")]
    RecoverTh42(RecoverTh42Args),
    /// Compare amplified commutator ratios with kappa.
    Amplify(AmplifyArgs),
    /// Sample the quasi-analytic extension and its dbar.
    Extend(ExtendArgs),
    /// Kappa integral of the extension and its Hölder envelope.
    #[command(name = "kappa-integral")]
    KappaIntegral(KappaIntegralArgs),
    /// Cauchy-Green functional calculus against the spectral oracle.
    #[command(name = "cg-calc")]
    CgCalc(CgCalcArgs),
    /// Intertwining residuals of the Cauchy-Green map.
    #[command(name = "tfa-verify")]
    TfaVerify(TfaVerifyArgs),
    /// Intertwining map from a circle contour for power series.
    #[command(name = "contour-tfa")]
    ContourTfa(ContourTfaArgs),
    /// Besov-type criterion for `f'` and optional Hölder class scan.
    Besov(BesovArgs),
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Replay a report from its embedded inputs and re-check its witnesses.
    Verify {
        #[arg(long)]
        report: PathBuf,
    },
}

fn fail(e: &Error) -> i32 {
    eprintln!("{}", error_json(e));
    exit_code(e)
}

fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Input(e.to_string())
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn execute<C: Command>(args: C, common: &Common) -> i32 {
    match try_execute(args, common) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}

fn try_execute<C: Command>(args: C, common: &Common) -> oplab::Result<i32> {
    let mut data = Data::default();
    args.load(&mut data)?;
    let out = args.run(&data, common.seed)?;

    let csv_path = out.table.as_ref().and_then(|_| {
        common.csv.clone().or_else(|| common.out.as_ref().map(|p| p.with_extension("csv")))
    });
    let report = Report {
        tool: "oplab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: C::NAME.into(),
        timestamp: timestamp(),
        seed: common.seed,
        inputs: Inputs { args: serde_json::to_value(&args).map_err(io_error)?, data },
        results: out.results.clone(),
        residuals: out.residuals.clone(),
        warnings: out.warnings.clone(),
        plot_data: csv_path.as_ref().map(|p| p.display().to_string()),
    };
    let mut text = serde_json::to_vec_pretty(&report).map_err(io_error)?;
    text.push(b'\n');
    if let (Some(t), Some(p)) = (&out.table, &csv_path) {
        write_atomic(p, &t.to_csv().map_err(io_error)?).map_err(io_error)?;
    }
    for (p, bytes) in args.side_files(&out) {
        write_atomic(&p, &bytes).map_err(io_error)?;
    }
    match &common.out {
        Some(p) => write_atomic(p, &text).map_err(io_error)?,
        None => print!("{}", String::from_utf8_lossy(&text)),
    }
    for w in &out.warnings {
        eprintln!("{}", json!({ "warning": w }));
    }
    Ok(if common.strict && !out.warnings.is_empty() { report::EXIT_CONVERGENCE } else { report::EXIT_OK })
}

fn replay<C: Command>(r: &Report) -> oplab::Result<serde_json::Value> {
    let args: C = serde_json::from_value(r.inputs.args.clone()).map_err(io_error)?;
    let data = &r.inputs.data;
    let checks = args.checks(data, &r.results)?;
    let out = args.run(data, r.seed)?;
    let identical = out.results == r.results && out.residuals == r.residuals && out.warnings == r.warnings;
    let ok = identical && checks.iter().all(|c| c.ok);
    Ok(json!({ "command": r.command, "ok": ok, "replay_identical": identical, "checks": checks }))
}

fn verify(path: &Path) -> oplab::Result<i32> {
    let r: Report = report::read_json(path)?;
    let v = match r.command.as_str() {
        "variance" => replay::<VarianceArgs>(&r),
        "decide2x2" => replay::<Decide2x2Args>(&r),
        "recover-th1" => replay::<RecoverTh1Args>(&r),
        "extract-f" => replay::<ExtractFArgs>(&r),
        "schur-norm" => replay::<SchurNormArgs>(&r),
        "kappa" => replay::<KappaArgs>(&r),
        "kappa-exact" => replay::<KappaExactArgs>(&r),
        "recover-th42" => replay::<RecoverTh42Args>(&r),
        "amplify" => replay::<AmplifyArgs>(&r),
        "extend" => replay::<ExtendArgs>(&r),
        "kappa-integral" => replay::<KappaIntegralArgs>(&r),
        "cg-calc" => replay::<CgCalcArgs>(&r),
        "tfa-verify" => replay::<TfaVerifyArgs>(&r),
        "contour-tfa" => replay::<ContourTfaArgs>(&r),
        "besov" => replay::<BesovArgs>(&r),
        other => Err(Error::Input(format!("unknown report command {other:?}"))),
    }?;
    println!("{}", serde_json::to_string_pretty(&v).map_err(io_error)?);
    Ok(if v["ok"] == true { report::EXIT_OK } else { report::EXIT_VERIFY })
}

fn dispatch(cli: Cli) -> i32 {
    let c = &cli.common;
    match cli.cmd {
        Cmd::Variance(a) => execute(a, c),
        Cmd::Decide2x2(a) => execute(a, c),
        Cmd::RecoverTh1(a) => execute(a, c),
        Cmd::ExtractF(a) => execute(a, c),
        Cmd::SchurNorm(a) => execute(a, c),
        Cmd::Kappa(a) => execute(a, c),
        Cmd::KappaExact(a) => execute(a, c),
        Cmd::RecoverTh42(a) => execute(a, c),
        Cmd::Amplify(a) => execute(a, c),
        Cmd::Extend(a) => execute(a, c),
        Cmd::KappaIntegral(a) => execute(a, c),
        Cmd::CgCalc(a) => execute(a, c),
        Cmd::TfaVerify(a) => execute(a, c),
        Cmd::ContourTfa(a) => execute(a, c),
        Cmd::Besov(a) => execute(a, c),
        Cmd::Verify { report } => verify(&report).unwrap_or_else(|e| fail(&e)),
        Cmd::Run { config } => {
            let argv = config::ExperimentConfig::load(&config).and_then(|cfg| {
                let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
                cfg.argv(&base)
            });
            match argv.and_then(|v| Cli::try_parse_from(v).map_err(|e| Error::Input(e.to_string()))) {
                Ok(inner) => dispatch(inner),
                Err(e) => fail(&e),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            eprintln!("{}", error_json(&Error::Input(e.to_string())));
            return ExitCode::from(report::EXIT_INPUT as u8);
        }
        Err(e) => {
            e.exit();
        }
    };
    ExitCode::from(dispatch(cli) as u8)
}
