use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use warpforce::manifold::{
    pullback, pullback_radial, radial_chart, CenteredManifold, Center, ManifoldSpec, RadialFamily,
};
use warpforce::model::{hyperbolic_model, ChartModel, GridSpec};
use warpforce::verify::{
    campaign_failed, default_radii, remark_reports, remark_table, run_campaign, run_theorem_config,
    write_center_csv, write_remark_csv, write_sweep_csv, BoundReport, CampaignConfig, CenterSet,
    CheckName, CheckSpec, TheoremConfig,
};
use warpforce::warpcore::{make_bump_with, warp_force, BumpParams};
use warpforce::{Error, Execution};

mod output;

const DEFAULT_THEOREM: &str = include_str!("../configs/theorem.json");

#[derive(Parser, Debug)]
#[command(name = "warpforce", version, about = "Bound checks for warp forcing of nearly hyperbolic metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON config for the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for report files.
    #[arg(long, global = true, value_name = "DIR", default_value = "reports")]
    out: PathBuf,
    /// Seed for random instances; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Grid points per axis; overrides the config.
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,
    /// Print the reports as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    serial: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one named check, or `all`, and write reports.json and summary.csv.
    Verify(VerifyArgs),
    /// Run the end-to-end closeness estimate over sample centers.
    Theorem(TheoremArgs),
    /// Closeness of punctured hyperbolic space against the center radius.
    DemoRemark(RemarkArgs),
    /// Write a sampled metric field as CSV.
    DumpGrid(DumpArgs),
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct VerifyArgs {
    /// Check name (lemma2.1, lemma2.2, lemma2.3, lemma3.1, lemma3.2,
    /// lemma1.1, bump, fixed-point, plateau, identity) or `all`.
    check: String,
    /// Center radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    t0: Option<Vec<f64>>,
    /// Collar half-widths beyond 1.
    #[arg(long, value_delimiter = ',')]
    xi: Option<Vec<f64>>,
    /// Warp shifts.
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
    /// Forcing radii.
    #[arg(long, value_delimiter = ',')]
    r0: Option<Vec<f64>>,
    /// Bump plateau offsets.
    #[arg(long, value_delimiter = ',')]
    delta: Option<Vec<f64>>,
    /// Manifold dimension (2 or 3).
    #[arg(long)]
    n: Option<usize>,
    /// Seeded random instances per parameter combination.
    #[arg(long)]
    instances: Option<usize>,
}

#[derive(Args, Debug)]
struct TheoremArgs {
    /// Forcing radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    r0: Option<Vec<f64>>,
    #[arg(long)]
    xi: Option<f64>,
    /// Centers per case zone; replaces the config's center set.
    #[arg(long)]
    per_zone: Option<usize>,
}

#[derive(Args, Debug)]
struct RemarkArgs {
    /// Center radii for the table; defaults to 2.2 and 2.5 to 9 in steps of 0.5.
    #[arg(long, value_delimiter = ',')]
    t0: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2.2)]
    near: f64,
    #[arg(long, default_value_t = 8.0)]
    far: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sampled {
    /// The exponential model on the chart.
    Model,
    /// The manifold metric pulled back by the chart.
    Pullback,
    /// The warp-forced metric pulled back by the chart.
    Forced,
}

#[derive(Args, Debug)]
#[command(allow_negative_numbers = true)]
struct DumpArgs {
    #[arg(long, value_enum, default_value_t = Sampled::Pullback)]
    what: Sampled,
    /// Center radius.
    #[arg(long, default_value_t = 6.0)]
    t0: f64,
    /// Sphere coordinates of the center.
    #[arg(long, value_delimiter = ',')]
    sphere: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    xi: f64,
    /// Forcing radius for `--what forced`.
    #[arg(long, default_value_t = 5.0)]
    r0: f64,
    /// Dimension when no manifold config is given.
    #[arg(long, default_value_t = 2)]
    n: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let result = match &cli.command {
        Command::Verify(a) => verify(&cli, a, exec),
        Command::Theorem(a) => theorem(&cli, a, exec),
        Command::DemoRemark(a) => demo_remark(&cli, a, exec),
        Command::DumpGrid(a) => dump_grid(&cli, a),
    };
    match result {
        Ok(reports) if campaign_failed(&reports) => ExitCode::from(1),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

fn parse_config<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Usage(format!("{origin}: {e}")))
}

fn override_grid(grid: &mut GridSpec, points: Option<usize>) -> Result<(), Error> {
    if let Some(p) = points {
        *grid = grid.with_points(p);
        grid.validate()?;
    }
    Ok(())
}

fn verify(cli: &Cli, args: &VerifyArgs, exec: Execution) -> Result<Vec<BoundReport>, Error> {
    let mut config: CampaignConfig = match &cli.config {
        Some(p) => read_config(p)?,
        None => CampaignConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    override_grid(&mut config.grid, cli.grid)?;
    if args.check != "all" {
        let name: CheckName = args.check.parse()?;
        config.checks.retain(|c| c.check == name);
        if config.checks.is_empty() {
            config.checks.push(CheckSpec::new(name));
        }
    }
    for spec in &mut config.checks {
        let set = |slot: &mut Option<Vec<f64>>, v: &Option<Vec<f64>>| {
            if v.is_some() {
                *slot = v.clone();
            }
        };
        set(&mut spec.t0, &args.t0);
        set(&mut spec.xi, &args.xi);
        set(&mut spec.s, &args.s);
        set(&mut spec.r0, &args.r0);
        set(&mut spec.delta, &args.delta);
        if let Some(n) = args.n {
            spec.n = n;
        }
        if args.instances.is_some() {
            spec.instances = args.instances;
        }
    }
    let reports = run_campaign(&config, exec)?;
    output::write_reports(&cli.out, &reports)?;
    output::print_reports(&reports, cli.json)?;
    Ok(reports)
}

fn theorem(cli: &Cli, args: &TheoremArgs, exec: Execution) -> Result<Vec<BoundReport>, Error> {
    let mut config: TheoremConfig = match &cli.config {
        Some(p) => read_config(p)?,
        None => parse_config(DEFAULT_THEOREM, "built-in theorem config")?,
    };
    if let Some(r0) = &args.r0 {
        config.r0 = r0.clone();
    }
    if let Some(xi) = args.xi {
        config.xi = xi;
    }
    if let Some(per_zone) = args.per_zone {
        config.centers = CenterSet::Zones { per_zone };
    }
    override_grid(&mut config.grid, cli.grid)?;
    let instances = run_theorem_config(&config, exec)?;
    let reports: Vec<BoundReport> = instances.iter().flat_map(|i| i.reports.clone()).collect();
    output::write_reports(&cli.out, &reports)?;
    output::write_json(&cli.out.join("theorem.json"), &instances)?;
    output::write_with(&cli.out.join("centers.csv"), |w| write_center_csv(&instances, w))?;
    output::write_with(&cli.out.join("sweep.csv"), |w| write_sweep_csv(&instances, w))?;
    if cli.json {
        output::print_json(&instances)?;
    } else {
        write_sweep_csv(&instances, std::io::stdout().lock())?;
    }
    Ok(reports)
}

fn demo_remark(cli: &Cli, args: &RemarkArgs, exec: Execution) -> Result<Vec<BoundReport>, Error> {
    let mut grid = GridSpec::default();
    override_grid(&mut grid, cli.grid)?;
    let mut radii = args.t0.clone().unwrap_or_else(default_radii);
    for t in [args.near, args.far] {
        if !radii.iter().any(|r| (r - t).abs() < 1e-12) {
            radii.push(t);
        }
    }
    radii.sort_by(f64::total_cmp);
    let rows = remark_table(args.n, args.xi, &radii, grid, exec)?;
    let reports = remark_reports(&rows, args.near, args.far, grid)?;
    output::write_reports(&cli.out, &reports)?;
    output::write_with(&cli.out.join("remark.csv"), |w| write_remark_csv(&rows, w))?;
    if cli.json {
        output::print_json(&rows)?;
    } else {
        write_remark_csv(&rows, std::io::stdout().lock())?;
    }
    Ok(reports)
}

fn dump_grid(cli: &Cli, args: &DumpArgs) -> Result<Vec<BoundReport>, Error> {
    let spec: ManifoldSpec = match &cli.config {
        Some(p) => read_config(p)?,
        None => ManifoldSpec {
            n: args.n,
            r_range: [0.05, 60.0],
            warp: Default::default(),
            modes: Vec::new(),
        },
    };
    let mut grid = GridSpec::default();
    override_grid(&mut grid, cli.grid)?;
    let manifold = CenteredManifold::new(spec)?;
    let sphere = args.sphere.clone().unwrap_or_else(|| vec![0.0; manifold.n() - 1]);
    let center = Center::new(sphere, args.t0);
    let field = match args.what {
        Sampled::Model => hyperbolic_model(&ChartModel::new(manifold.n(), args.xi, grid)?),
        Sampled::Pullback => pullback(&radial_chart(&manifold, &center, args.xi)?, &manifold, grid)?,
        Sampled::Forced => {
            let chart = radial_chart(&manifold, &center, args.xi)?;
            let rho = Arc::new(make_bump_with(BumpParams::default())?);
            let g = manifold.in_chart(&chart)?;
            pullback_radial(&chart, &warp_force(&g, args.r0, &rho)?, grid)?
        }
    };
    let path = cli.out.join("grid.csv");
    output::write_with(&path, |w| field.write_grid_csv(w))?;
    if !cli.json {
        println!("wrote {}", path.display());
    }
    Ok(Vec::new())
}
