mod manifest;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pplcap::bounds::{
    integrand_argmax, integrand_profile, log_volume_lower_bound, predicted_sample_budget, sampled_only_upper_bound,
    truncated_gamma_curve,
};
use pplcap::export::{fmt_f64, write_json, CsvTable};
use pplcap::extreme::{calibrate_alpha, conditional_moment_table, default_alpha, simulate_max_distribution, ExtremeValueModel};
use pplcap::mc::{estimate_volume_mc_with_workers, gamma_vs_n_sweep, McConfig, Sampler, BUDGET_REL_DROP};
use pplcap::verify::{run_suite, Budget, Suite, VerifyOptions};
use pplcap::Domain;
use serde_json::json;

use manifest::ManifestBuilder;
use svg::{line_chart, Series};

/// Seventeen significant digits.
fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

const DEFAULT_SEED: u64 = 20_240_101;

#[derive(Parser, Debug)]
#[command(name = "pplcap", version, about = "Capacity bounds for peak-power-limited band-limited AWGN channels")]
struct Cli {
    /// Directory for data files and manifests.
    #[arg(long, global = true, default_value = "pplcap-out")]
    out: PathBuf,
    /// Upper limit on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Semianalytic lower bound on gamma, integrand and truncation profiles.
    Analytic(AnalyticArgs),
    /// Monte Carlo volume estimate for one configuration.
    Mc(McArgs),
    /// Monte Carlo gamma for several signal lengths.
    Sweep(SweepArgs),
    /// Simulated waveform maxima against the extreme-value law.
    Maxima(MaximaArgs),
    /// Conditional second moments of non-maximal samples against the truncated law.
    Moments(MomentsArgs),
    /// Summary table of prior and computed bounds.
    Table1(Table1Args),
    /// Runs a self-check suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DomainArg {
    Real,
    Complex,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Real => Domain::Real,
            DomainArg::Complex => Domain::Complex,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum CaseArg {
    Discrete,
    Continuous,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SamplerArg {
    #[value(alias = "importance-uniform")]
    Importance,
    #[value(alias = "gaussian-direction")]
    Gaussian,
}

impl From<SamplerArg> for Sampler {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Importance => Sampler::ImportanceUniform,
            SamplerArg::Gaussian => Sampler::GaussianDirection,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BudgetArg {
    Desk,
    Full,
}

impl From<BudgetArg> for Budget {
    fn from(b: BudgetArg) -> Self {
        match b {
            BudgetArg::Desk => Budget::Desk,
            BudgetArg::Full => Budget::Full,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Anchors,
    Stats,
    Invariants,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Anchors => Suite::Anchors,
            SuiteArg::Stats => Suite::Stats,
            SuiteArg::Invariants => Suite::Invariants,
        }
    }
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    #[arg(long, value_enum, default_value = "real")]
    domain: DomainArg,
    #[arg(long = "case", value_enum, default_value = "continuous")]
    case: CaseArg,
    /// Signal length in Nyquist intervals (required unless --figure is given).
    #[arg(long)]
    n: Option<usize>,
    /// Oversampling-equivalence factor; defaults to the tabulated value for N.
    #[arg(long)]
    alpha: Option<f64>,
    /// Also write the normalized integrand.
    #[arg(long)]
    profile: bool,
    /// Also write gamma against the discarded low-peak probability.
    #[arg(long)]
    truncation: bool,
    /// Reproduce a figure's data set: 5, 6, 8, 9, 16, 17 or 18.
    #[arg(long, value_parser = ["5", "6", "8", "9", "16", "17", "18"])]
    figure: Option<String>,
    /// Also render SVG line charts.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long, value_enum, default_value = "real")]
    domain: DomainArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 30)]
    oversample: usize,
    #[arg(long)]
    nsim: usize,
    #[arg(long, value_enum, default_value = "importance")]
    sampler: SamplerArg,
    #[arg(long, env = "PPLCAP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    top_k: usize,
    /// Stop after about this many seconds and keep the partial result.
    #[arg(long)]
    budget_seconds: Option<f64>,
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "real")]
    domain: DomainArg,
    /// Comma-separated signal lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    n_values: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    oversample: usize,
    #[arg(long)]
    nsim: usize,
    #[arg(long, value_enum, default_value = "importance")]
    sampler: SamplerArg,
    #[arg(long, env = "PPLCAP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct MaximaArgs {
    #[arg(long, value_enum, default_value = "real")]
    domain: DomainArg,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 30)]
    oversample: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, env = "PPLCAP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also fit the oversampling-equivalence factor.
    #[arg(long)]
    fit: bool,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[arg(long, value_enum, default_value = "real")]
    domain: DomainArg,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    tuples: usize,
    #[arg(long, env = "PPLCAP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    bins: usize,
}

#[derive(Args, Debug)]
struct Table1Args {
    #[arg(long, value_enum, default_value = "desk")]
    budget: BudgetArg,
    #[arg(long, env = "PPLCAP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: SuiteArg,
    #[arg(long, value_enum, default_value = "desk")]
    budget: BudgetArg,
    #[arg(long, env = "PPLCAP_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

/// Failure classes with stable exit codes.
enum Failure {
    Verification,
    Usage(String),
    Numeric(String),
}

impl From<pplcap::Error> for Failure {
    fn from(e: pplcap::Error) -> Self {
        match e {
            pplcap::Error::Domain(_) | pplcap::Error::ResourceLimit(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = std::fs::create_dir_all(&cli.out) {
        eprintln!("error: cannot create {}: {e}", cli.out.display());
        return ExitCode::from(3);
    }
    let out = cli.out.as_path();
    let result = match cli.command {
        Command::Analytic(a) => analytic(out, a),
        Command::Mc(a) => mc(out, cli.workers, a),
        Command::Sweep(a) => sweep(out, cli.workers, a),
        Command::Maxima(a) => pplcap::with_workers(cli.workers, || maxima(out, a)),
        Command::Moments(a) => pplcap::with_workers(cli.workers, || moments(out, a)),
        Command::Table1(a) => table1(out, cli.workers, a),
        Command::Verify(a) => pplcap::with_workers(cli.workers, || verify(out, a)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(3)
        }
    }
}

fn write_table(t: &CsvTable, path: &Path, m: &mut ManifestBuilder) -> CmdResult {
    t.write(path)?;
    m.add(path);
    Ok(())
}

fn write_svg(text: String, path: &Path, m: &mut ManifestBuilder) -> CmdResult {
    std::fs::write(path, text).map_err(pplcap::Error::from)?;
    m.add(path);
    Ok(())
}

fn model_for(domain: Domain, case: CaseArg, n: usize, alpha: Option<f64>) -> pplcap::Result<ExtremeValueModel> {
    match case {
        CaseArg::Discrete => ExtremeValueModel::discrete(domain, n),
        CaseArg::Continuous => ExtremeValueModel::continuous(domain, n, alpha.unwrap_or_else(|| default_alpha(n))),
    }
}

fn method_name(case: CaseArg) -> &'static str {
    match case {
        CaseArg::Discrete => "analytic-discrete",
        CaseArg::Continuous => "analytic-continuous",
    }
}

/// Log-spaced signal lengths from 2 to 10^5.
const FIGURE_N: [usize; 16] = [
    2, 3, 5, 10, 20, 51, 101, 201, 501, 1001, 2001, 5001, 10_001, 20_001, 50_001, 100_001,
];
const PROFILE_N: [usize; 5] = [11, 51, 101, 1001, 10_001];
const TRUNCATION_N: [usize; 4] = [51, 101, 201, 1001];

fn discard_grid() -> Vec<f64> {
    (4..=160).rev().map(|k| 10f64.powf(-(k as f64) / 4.0)).collect()
}

fn profile_grid(domain: Domain) -> Vec<f64> {
    match domain {
        Domain::Real => (1..=1200).map(|i| i as f64 * 0.005).collect(),
        Domain::Complex => (1..=2000).map(|i| i as f64 * 0.02).collect(),
    }
}

fn analytic(out: &Path, a: AnalyticArgs) -> CmdResult {
    let domain: Domain = a.domain.into();
    let mut m = ManifestBuilder::new(
        "analytic",
        json!({
            "domain": domain, "case": format!("{:?}", a.case).to_lowercase(), "n": a.n, "alpha": a.alpha,
            "alpha_table": pplcap::extreme::ALPHA_TABLE, "profile": a.profile, "truncation": a.truncation,
            "figure": a.figure, "svg": a.svg,
        }),
    );
    if let Some(fig) = a.figure.as_deref() {
        analytic_figure(out, fig, a.alpha, a.svg, &mut m)?;
        m.finish(out, "completed")?;
        return Ok(());
    }
    let n = a.n.ok_or_else(|| Failure::Usage("--n is required without --figure".into()))?;
    if a.case == CaseArg::Discrete && a.alpha.is_some_and(|x| x != 1.0) {
        return Err(Failure::Usage("--alpha applies to the continuous case only".into()));
    }
    let model = model_for(domain, a.case, n, a.alpha)?;
    let est = log_volume_lower_bound(&model)?;
    let mut t = CsvTable::new(&["n_symbols", "alpha", "gamma_lower", "gamma_upper", "method"]);
    t.push_row(vec![
        n.to_string(),
        fmt_f64(model.alpha),
        sig17(est.gamma),
        sig17(sampled_only_upper_bound(domain)),
        method_name(a.case).into(),
    ]);
    write_table(&t, &out.join("analytic.csv"), &mut m)?;
    println!("gamma_lower={}", fmt_f64(est.gamma));
    println!("log_volume_per_dim={}", fmt_f64(est.log_volume_per_dim()));
    if a.profile {
        let grid = profile_grid(domain);
        let prof = integrand_profile(&model, &grid)?;
        let mut t = CsvTable::new(&["v", "profile"]);
        for (v, p) in grid.iter().zip(&prof) {
            t.push_numbers(&[*v, *p]);
        }
        write_table(&t, &out.join("analytic_profile.csv"), &mut m)?;
        println!("integrand_argmax={}", fmt_f64(integrand_argmax(&model)));
        if a.svg {
            let s = Series {
                label: format!("N={n}"),
                points: grid.iter().copied().zip(prof).collect(),
            };
            write_svg(line_chart("Normalized volume integrand", "peak", "integrand", false, &[s]), &out.join("analytic_profile.svg"), &mut m)?;
        }
    }
    if a.truncation {
        let grid = discard_grid();
        let curve = truncated_gamma_curve(&model, &grid)?;
        let mut t = CsvTable::new(&["p_discard", "v_min", "gamma"]);
        for (q, g) in grid.iter().zip(&curve) {
            t.push_numbers(&[*q, model.quantile_ln(q.ln()), *g]);
        }
        write_table(&t, &out.join("analytic_truncation.csv"), &mut m)?;
        let budget = predicted_sample_budget(&model, BUDGET_REL_DROP)?;
        println!("predicted_budget={}", fmt_f64(budget));
        if a.svg {
            let s = Series {
                label: format!("N={n}"),
                points: grid.iter().copied().zip(curve).collect(),
            };
            write_svg(line_chart("Gamma with low-peak vectors discarded", "p_discard", "gamma", true, &[s]), &out.join("analytic_truncation.svg"), &mut m)?;
        }
    }
    m.finish(out, "completed")?;
    Ok(())
}

fn analytic_figure(out: &Path, fig: &str, alpha: Option<f64>, svg: bool, m: &mut ManifestBuilder) -> CmdResult {
    let (domain, case) = match fig {
        "5" | "6" | "9" => (Domain::Real, CaseArg::Discrete),
        "8" => (Domain::Real, CaseArg::Continuous),
        "16" => (Domain::Complex, CaseArg::Discrete),
        "17" | "18" => (Domain::Complex, CaseArg::Continuous),
        _ => return Err(Failure::Usage(format!("unknown figure {fig}"))),
    };
    let case = if fig == "9" { CaseArg::Continuous } else { case };
    let path = out.join(format!("fig{fig}.csv"));
    match fig {
        "5" => {
            let grid = profile_grid(domain);
            let mut t = CsvTable::new(&["n_symbols", "v", "profile"]);
            let mut series = Vec::new();
            for n in PROFILE_N {
                let model = model_for(domain, case, n, None)?;
                let prof = integrand_profile(&model, &grid)?;
                for (v, p) in grid.iter().zip(&prof) {
                    t.push_row(vec![n.to_string(), fmt_f64(*v), fmt_f64(*p)]);
                }
                series.push(Series {
                    label: format!("N={n}"),
                    points: grid.iter().copied().zip(prof).collect(),
                });
            }
            write_table(&t, &path, m)?;
            if svg {
                write_svg(line_chart("Normalized volume integrand", "z", "integrand", false, &series), &out.join("fig5.svg"), m)?;
            }
        }
        "9" | "18" => {
            let grid = discard_grid();
            let mut t = CsvTable::new(&["p_discard", "n_symbols", "alpha", "gamma_lower", "gamma_upper", "method"]);
            let mut series = Vec::new();
            for n in TRUNCATION_N {
                let model = model_for(domain, case, n, alpha)?;
                let curve = truncated_gamma_curve(&model, &grid)?;
                for (q, g) in grid.iter().zip(&curve) {
                    t.push_row(vec![
                        fmt_f64(*q),
                        n.to_string(),
                        fmt_f64(model.alpha),
                        sig17(*g),
                        sig17(sampled_only_upper_bound(domain)),
                        "analytic-truncated".into(),
                    ]);
                }
                series.push(Series {
                    label: format!("N={n}"),
                    points: grid.iter().copied().zip(curve).collect(),
                });
            }
            write_table(&t, &path, m)?;
            if svg {
                write_svg(line_chart("Gamma with low-peak vectors discarded", "p_discard", "gamma", true, &series), &out.join(format!("fig{fig}.svg")), m)?;
            }
        }
        _ => {
            let mut t = CsvTable::new(&["n_symbols", "alpha", "gamma_lower", "gamma_upper", "method"]);
            let mut pts = Vec::new();
            for n in FIGURE_N {
                let model = model_for(domain, case, n, alpha)?;
                let g = log_volume_lower_bound(&model)?.gamma;
                t.push_row(vec![
                    n.to_string(),
                    fmt_f64(model.alpha),
                    sig17(g),
                    sig17(sampled_only_upper_bound(domain)),
                    method_name(case).into(),
                ]);
                pts.push((n as f64, g));
            }
            write_table(&t, &path, m)?;
            if svg {
                let s = Series {
                    label: format!("{domain} {}", method_name(case)),
                    points: pts,
                };
                write_svg(line_chart("Lower bound on gamma", "N", "gamma", true, &[s]), &out.join(format!("fig{fig}.svg")), m)?;
            }
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn mc_config(domain: Domain, n: usize, oversample: usize, nsim: usize, sampler: Sampler, seed: u64, top_k: usize) -> pplcap::Result<McConfig> {
    let mut cfg = McConfig::new(domain, n, oversample, nsim, sampler, seed);
    cfg.top_k_tracked = top_k.min(nsim);
    cfg.validate()?;
    Ok(cfg)
}

fn mc(out: &Path, workers: Option<usize>, a: McArgs) -> CmdResult {
    let mut cfg = mc_config(a.domain.into(), a.n, a.oversample, a.nsim, a.sampler.into(), a.seed, a.top_k)?;
    cfg.wall_clock_budget = a.budget_seconds;
    let mut m = ManifestBuilder::new("mc", json!({ "config": cfg, "workers": workers, "svg": a.svg }));
    let r = estimate_volume_mc_with_workers(&cfg, workers)?;
    let json_path = out.join("mc.json");
    write_json(&r.report(), &json_path)?;
    m.add(&json_path);
    write_table(&r.convergence_csv(), &out.join("mc_convergence.csv"), &mut m)?;
    let mut t = CsvTable::new(&["k_discarded", "gamma"]);
    for &(k, g) in &r.discard_curve {
        t.push_row(vec![k.to_string(), sig17(g)]);
    }
    write_table(&t, &out.join("mc_discard.csv"), &mut m)?;
    if a.svg {
        let s = Series {
            label: format!("{} N={} M={}", cfg.domain, cfg.n_symbols, cfg.oversample),
            points: r.convergence_trace.iter().map(|&(n, g)| (n as f64, g)).collect(),
        };
        write_svg(line_chart("Monte Carlo gamma", "vectors", "gamma", true, &[s]), &out.join("mc_convergence.svg"), &mut m)?;
    }
    println!("gamma={}", fmt_f64(r.gamma()));
    println!("gamma_stderr={}", fmt_f64(r.gamma_stderr()));
    println!("completed_sims={}", r.completed_sims);
    println!("zero_variance={}", r.zero_variance);
    println!("likely_underestimate={}", r.likely_underestimate);
    m.finish(out, if r.partial { "partial" } else { "completed" })?;
    Ok(())
}

fn sweep(out: &Path, workers: Option<usize>, a: SweepArgs) -> CmdResult {
    let n0 = *a.n_values.first().ok_or_else(|| Failure::Usage("empty --n-values".into()))?;
    let base = mc_config(a.domain.into(), n0, a.oversample, a.nsim, a.sampler.into(), a.seed, 1000)?;
    for &n in &a.n_values {
        let mut c = base.clone();
        c.n_symbols = n;
        c.validate()?;
    }
    let mut m = ManifestBuilder::new("sweep", json!({ "base": base, "n_values": a.n_values, "workers": workers }));
    let pts = gamma_vs_n_sweep(&base, &a.n_values, workers)?;
    let mut t = CsvTable::new(&["n_symbols", "gamma", "stderr", "likely_underestimate"]);
    for p in &pts {
        t.push_row(vec![
            p.n_symbols.to_string(),
            sig17(p.gamma),
            sig17(p.stderr),
            p.likely_underestimate.to_string(),
        ]);
        println!("N={} gamma={} stderr={}", p.n_symbols, fmt_f64(p.gamma), fmt_f64(p.stderr));
    }
    write_table(&t, &out.join("sweep.csv"), &mut m)?;
    if a.svg {
        let s = Series {
            label: format!("{} M={}", base.domain, base.oversample),
            points: pts.iter().map(|p| (p.n_symbols as f64, p.gamma)).collect(),
        };
        write_svg(line_chart("Monte Carlo gamma against N", "N", "gamma", true, &[s]), &out.join("sweep.svg"), &mut m)?;
    }
    m.finish(out, "completed")?;
    Ok(())
}

fn maxima(out: &Path, a: MaximaArgs) -> CmdResult {
    let domain: Domain = a.domain.into();
    let mut m = ManifestBuilder::new(
        "maxima",
        json!({ "domain": domain, "n": a.n, "oversample": a.oversample, "trials": a.trials, "seed": a.seed, "fit": a.fit }),
    );
    let h = simulate_max_distribution(a.n, a.oversample, domain, a.trials, a.seed)?;
    let path = out.join("maxima_hist.csv");
    let file = std::fs::File::create(&path).map_err(pplcap::Error::from)?;
    h.write_csv(std::io::BufWriter::new(file))?;
    m.add(&path);
    println!("mode={}", fmt_f64(h.mode()));
    if a.fit {
        let fit = calibrate_alpha(a.n, a.oversample, domain, a.trials, a.seed)?;
        let p = out.join("maxima_fit.json");
        write_json(&fit, &p)?;
        m.add(&p);
        println!("alpha={} sup_distance={}", fmt_f64(fit.alpha), fmt_f64(fit.sup_distance));
    }
    m.finish(out, "completed")?;
    Ok(())
}

fn moments(out: &Path, a: MomentsArgs) -> CmdResult {
    let domain: Domain = a.domain.into();
    let range = match domain {
        Domain::Real => (1.5, 4.0),
        Domain::Complex => (2.0, 12.0),
    };
    let mut m = ManifestBuilder::new(
        "moments",
        json!({ "domain": domain, "n": a.n, "tuples": a.tuples, "seed": a.seed, "bins": a.bins, "range": range }),
    );
    let table = conditional_moment_table(domain, a.n, a.tuples, a.seed, range, a.bins)?;
    let mut t = CsvTable::new(&["lo", "hi", "tuples", "empirical", "predicted", "rel_error"]);
    for b in &table {
        t.push_row(vec![
            fmt_f64(b.lo),
            fmt_f64(b.hi),
            b.tuples.to_string(),
            fmt_f64(b.empirical),
            fmt_f64(b.predicted),
            fmt_f64(b.rel_error()),
        ]);
    }
    write_table(&t, &out.join("moments.csv"), &mut m)?;
    m.finish(out, "completed")?;
    Ok(())
}

fn table1(out: &Path, workers: Option<usize>, a: Table1Args) -> CmdResult {
    use std::f64::consts::{E, PI};
    let nsim = match a.budget {
        BudgetArg::Desk => 1_000_000,
        BudgetArg::Full => 100_000_000,
    };
    let mut m = ManifestBuilder::new(
        "table1",
        json!({ "budget": format!("{:?}", a.budget).to_lowercase(), "nsim": nsim, "oversample": 30, "seed": a.seed,
                "conjecture_n": 10_000, "conjecture_alpha": 2.9, "workers": workers }),
    );
    let conj = |d| -> pplcap::Result<f64> {
        Ok(log_volume_lower_bound(&ExtremeValueModel::continuous(d, 10_000, 2.9)?)?.gamma)
    };
    let run = |d, n| -> pplcap::Result<(f64, f64)> {
        let cfg = McConfig::new(d, n, 30, nsim, Sampler::ImportanceUniform, a.seed);
        let r = estimate_volume_mc_with_workers(&cfg, workers)?;
        Ok((r.gamma(), r.gamma_stderr()))
    };
    let (mc_real, se_real) = run(Domain::Real, 101)?;
    let (mc_cplx, se_cplx) = run(Domain::Complex, 101)?;
    let rows: Vec<(&str, &str, f64, &str, String)> = vec![
        ("low-pass lower bound", "prior i.i.d. pulses", PI / (32.0 * E), "reference", "pi/32e".into()),
        ("low-pass lower bound", "prior optimized pulses", 0.04470, "reference", "".into()),
        ("low-pass lower bound", "analytic conjecture", conj(Domain::Real)?, "computed", "N=10000 alpha=2.9".into()),
        ("low-pass lower bound", "monte carlo cp-fde", mc_real, "computed", format!("N=101 M=30 nsim={nsim} stderr={}", fmt_f64(se_real))),
        ("low-pass upper bound", "sampled only", sampled_only_upper_bound(Domain::Real), "computed", "2/(pi e)".into()),
        ("band-pass lower bound", "prior i.i.d. pulses", PI * PI / (128.0 * E), "reference", "pi^2/128e".into()),
        ("band-pass lower bound", "analytic conjecture", conj(Domain::Complex)?, "computed", "N=10000 alpha=2.9".into()),
        ("band-pass lower bound", "monte carlo cp-fde", mc_cplx, "computed", format!("N=101 M=30 nsim={nsim} stderr={}", fmt_f64(se_cplx))),
        ("band-pass upper bound", "sampled only", sampled_only_upper_bound(Domain::Complex), "computed", "1/e".into()),
    ];
    let mut t = CsvTable::new(&["bound", "source", "gamma", "status", "note"]);
    for (bound, source, g, status, note) in rows {
        println!("{bound:<22} {source:<24} {g:.4} {status}");
        t.push_row(vec![bound.into(), source.into(), sig17(g), status.into(), note]);
    }
    write_table(&t, &out.join("table1.csv"), &mut m)?;
    m.finish(out, "completed")?;
    Ok(())
}

fn verify(out: &Path, a: VerifyArgs) -> CmdResult {
    let suite: Suite = a.suite.into();
    let opts = VerifyOptions {
        budget: a.budget.into(),
        seed: a.seed,
    };
    let mut m = ManifestBuilder::new(
        &format!("verify_{suite}"),
        json!({ "suite": suite, "budget": opts.budget, "seed": opts.seed }),
    );
    let report = run_suite(suite, &opts);
    let text = report.to_text();
    print!("{text}");
    let txt = out.join(format!("verify_{suite}.txt"));
    std::fs::write(&txt, &text).map_err(pplcap::Error::from)?;
    m.add(&txt);
    let js = out.join(format!("verify_{suite}.json"));
    write_json(&report, &js)?;
    m.add(&js);
    m.finish(out, if report.passed() { "passed" } else { "failed" })?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}
