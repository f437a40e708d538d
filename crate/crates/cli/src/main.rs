use std::f64::consts::FRAC_PI_2;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use chiral_ladder::bdg::{band_structure, critical_coupling, CriticalCoupling, GapBranch};
use chiral_ladder::freefermion::{
    chirality_ff, covariance_for, entanglement_ff, spin_correlator, Chain, Filling, SpinAxis,
};
use chiral_ladder::scaling::{
    data_collapse, fit_central_charge, fit_correlation_length, fit_gap_scaling, fit_power_law,
    second_derivative_fit, CollapseInit, EntropyPrefactor, SeriesTable,
};
use chiral_ladder::sweep::{run_and_emit, Format, Range, SweepSpec};
use chiral_ladder::topology::{z2_invariant, Ldos, DEFAULT_BROADENING};
use chiral_ladder::{ed, lswt, Boundary, ModelParams, MomentumGrid};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "chiral",
    version,
    about = "Chirally coupled spin-1/2 ladder toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Flat `key = value` config file (omega0, Omega0, J, g, phi, N, boundary).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    /// Sites per chain.
    #[arg(long = "N", short = 'n', alias = "n")]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    omega0: Option<f64>,
    #[arg(long = "Omega0", allow_negative_numbers = true)]
    big_omega0: Option<f64>,
    #[arg(long)]
    boundary: Option<Boundary>,
}

impl ModelArgs {
    /// Config file first, then explicit flags.
    fn params(&self) -> Result<ModelParams> {
        let mut p = match &self.config {
            Some(path) => ModelParams::from_config_file(path)
                .with_context(|| format!("reading {}", path.display()))?,
            None => ModelParams::default(),
        };
        if let Some(v) = self.g {
            p.g = v;
        }
        if let Some(v) = self.phi {
            p.phi = v;
        }
        if let Some(v) = self.j {
            p.j = v;
        }
        if let Some(v) = self.n {
            p.n = v;
        }
        if let Some(v) = self.omega0 {
            p.omega_a = v;
        }
        if let Some(v) = self.big_omega0 {
            p.omega_b = v;
        }
        if let Some(v) = self.boundary {
            p.boundary = v;
        }
        Ok(p.validate()?.into_inner())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Bloch bands on a uniform momentum grid.
    Bands {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 128)]
        kpoints: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form critical coupling against phi in [0, pi/2].
    Critline {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 65)]
        phi_grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Z2 invariant on a (phi, g) grid.
    Invariant {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 64)]
        g_grid: usize,
        #[arg(long, default_value_t = 64)]
        phi_grid: usize,
        /// Largest coupling in units of J.
        #[arg(long, default_value_t = 3.0)]
        g_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Local density of states of the open chain at one site.
    Ldos {
        #[command(flatten)]
        model: ModelArgs,
        /// lo:hi:steps
        #[arg(long, allow_hyphen_values = true)]
        omega_range: Range,
        #[arg(long, default_value_t = 0)]
        site: usize,
        #[arg(long, default_value_t = DEFAULT_BROADENING)]
        eta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced-density-matrix spectrum of the free-fermion ground state.
    Entanglement {
        #[command(flatten)]
        model: ModelArgs,
        /// Cells in the subsystem; defaults to N/2.
        #[arg(long)]
        cut: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Same-chain spin correlator against distance.
    Correlate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "xB")]
        axis: SpinAxis,
        #[arg(long)]
        r_max: Option<usize>,
        /// First site; defaults to N/4.
        #[arg(long)]
        from: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-bond vector chirality of both chains.
    Chirality {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Engine::Ff)]
        engine: Engine,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact diagonalization: sector spectra, gaps and observables.
    Ed {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 4)]
        states: usize,
        #[arg(long, value_enum, default_value_t = Observables::All)]
        observables: Observables,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spin-wave bands, magnetization and energy against g.
    Lswt {
        #[command(flatten)]
        model: ModelArgs,
        /// lo:hi:steps
        #[arg(long, allow_hyphen_values = true)]
        g_range: Range,
        #[arg(long, default_value_t = 64)]
        kpoints: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scaling fits of an (N, x, y[, y_err]) table.
    Fit {
        #[arg(long, value_enum)]
        kind: FitKind,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Critical point for gap fits; initial guess for collapses.
        #[arg(long, allow_negative_numbers = true)]
        x_c: Option<f64>,
        #[arg(long, default_value_t = 0.125)]
        beta: f64,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long, value_enum, default_value_t = Prefactor::Open)]
        prefactor: Prefactor,
    },
    /// Parameter sweep from a TOML spec.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Output directory; overrides the spec.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<SweepFormat>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Engine {
    Ff,
    Ed,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Observables {
    None,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FitKind {
    Xi,
    Eta,
    Collapse,
    Gap,
    Cc,
    Chi,
}

#[derive(Clone, Copy, ValueEnum)]
enum Prefactor {
    Open,
    Periodic,
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
    Both,
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("creating {}", path.display()))?,
            ))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn uniform(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    Range {
        lo,
        hi,
        steps: count.max(1),
    }
    .values()
}

fn branch_name(b: GapBranch) -> &'static str {
    match b {
        GapBranch::KZero => "k0",
        GapBranch::KPi => "kpi",
    }
}

fn bands(p: &ModelParams, kpoints: usize, w: &mut dyn Write) -> Result<()> {
    let bs = band_structure(p, &MomentumGrid::uniform(kpoints)?);
    writeln!(w, "k,E1,E2,E3,E4")?;
    for (k, e) in bs.grid.points.iter().zip(&bs.bands) {
        writeln!(w, "{k},{},{},{},{}", e[0], e[1], e[2], e[3])?;
    }
    Ok(())
}

fn critline(p: &ModelParams, points: usize, w: &mut dyn Write) -> Result<()> {
    writeln!(w, "phi,g_c,branch")?;
    for phi in uniform(0.0, FRAC_PI_2, points) {
        match critical_coupling(p.omega_a, p.omega_b, p.j, phi) {
            CriticalCoupling::Finite { g, branch } => {
                writeln!(w, "{phi},{g},{}", branch_name(branch))?
            }
            CriticalCoupling::NoTransition => writeln!(w, "{phi},NaN,none")?,
        }
    }
    Ok(())
}

fn invariant(
    p: &ModelParams,
    g_grid: usize,
    phi_grid: usize,
    g_max: f64,
    w: &mut dyn Write,
) -> Result<()> {
    writeln!(w, "phi,g,Q")?;
    for phi in uniform(0.0, FRAC_PI_2, phi_grid) {
        for g in uniform(0.0, g_max, g_grid) {
            let q = z2_invariant(&p.with_g(g).with_phi(phi))?;
            writeln!(w, "{phi},{g},{}", q.sign())?;
        }
    }
    Ok(())
}

fn ldos(p: &ModelParams, range: Range, site: usize, eta: f64, w: &mut dyn Write) -> Result<()> {
    let omegas = range.values();
    let values = Ldos::new(p)?.scan(&omegas, site, eta)?;
    writeln!(w, "omega,ldos")?;
    for (o, v) in omegas.iter().zip(values) {
        writeln!(w, "{o},{v}")?;
    }
    Ok(())
}

fn entanglement(p: &ModelParams, cut: Option<usize>, w: &mut dyn Write) -> Result<()> {
    let cov = covariance_for(&p.with_boundary(Boundary::Open), Filling::EvenParity)?;
    let es = entanglement_ff(&cov, cut.unwrap_or(p.n / 2))?;
    log::info!("entropy {} schmidt gap {}", es.entropy, es.schmidt_gap);
    writeln!(w, "rank,lambda")?;
    for (i, l) in es.rdm_spectrum.iter().enumerate() {
        writeln!(w, "{},{l}", i + 1)?;
    }
    Ok(())
}

fn correlate(
    p: &ModelParams,
    axis: SpinAxis,
    r_max: Option<usize>,
    from: Option<usize>,
    w: &mut dyn Write,
) -> Result<()> {
    let start = from.unwrap_or(p.n / 4);
    if start + 1 >= p.n {
        bail!(
            "start site {start} leaves no partner on a chain of {} sites",
            p.n
        );
    }
    let r_max = r_max.unwrap_or(p.n - 1 - start).min(p.n - 1 - start);
    let cov = covariance_for(&p.with_boundary(Boundary::Open), Filling::EvenParity)?;
    writeln!(w, "r,value")?;
    for r in 1..=r_max {
        writeln!(w, "{r},{}", spin_correlator(&cov, axis, start, start + r)?)?;
    }
    Ok(())
}

fn chirality(p: &ModelParams, engine: Engine, w: &mut dyn Write) -> Result<()> {
    let p = p.with_boundary(Boundary::Open);
    let (a, b): (Vec<f64>, Vec<f64>) = match engine {
        Engine::Ff => {
            let cov = covariance_for(&p, Filling::EvenParity)?;
            let per = |c| {
                (0..p.n - 1)
                    .map(|bond| chirality_ff(&cov, c, bond))
                    .collect::<Result<Vec<_>, _>>()
            };
            (per(Chain::A)?, per(Chain::B)?)
        }
        Engine::Ed => {
            let gs = ed::ground_state(&p)?;
            let obs = ed::observables(&gs.state, p.n, p.phi)?;
            (obs.chirality_a, obs.chirality_b)
        }
    };
    writeln!(w, "phi,g,chain,bond,kappa_z")?;
    for (name, values) in [("A", a), ("B", b)] {
        for (bond, k) in values.iter().enumerate() {
            writeln!(w, "{},{},{name},{bond},{k}", p.phi, p.g)?;
        }
    }
    Ok(())
}

fn ed_report(
    p: &ModelParams,
    states: usize,
    observables: Observables,
) -> Result<serde_json::Value> {
    let (even, odd) = ed::sector_spectra(p, states.max(1), observables == Observables::All)?;
    let gaps = ed::gaps_from(&even, &odd);
    let mut report = json!({
        "params": p,
        "sectors": [even, odd],
        "gaps": gaps,
    });
    if observables == Observables::All {
        let ground = if odd.energies[0] < even.energies[0] {
            &odd
        } else {
            &even
        };
        let state = ground
            .states
            .as_ref()
            .and_then(|s| s.first())
            .context("ground state vector missing")?;
        report["ground"] = json!({ "energy": ground.energies[0], "parity": ground.sector });
        report["observables"] = serde_json::to_value(ed::observables(state, p.n, p.phi)?)?;
        let cut = (p.n / 2).max(1);
        if cut < p.n {
            let es = ed::entanglement_ed(state, p.n, cut)?;
            report["entanglement"] =
                json!({ "cut": cut, "entropy": es.entropy, "schmidt_gap": es.schmidt_gap });
        }
    }
    Ok(report)
}

fn lswt_scan(p: &ModelParams, range: Range, kpoints: usize, w: &mut dyn Write) -> Result<()> {
    let grid = MomentumGrid::uniform(kpoints)?;
    let threshold = lswt::instability_threshold(p)?;
    log::info!(
        "instability at g = {} (k = {})",
        threshold.g_c,
        threshold.k_c
    );
    writeln!(w, "g,k,E1,E2,stable,magnetization,energy")?;
    for g in range.values() {
        let q = p.with_g(g);
        let (m, e) = match lswt::lswt_point(&q, &grid) {
            Ok(pt) => (pt.magnetization, pt.energy),
            Err(chiral_ladder::Error::BeyondInstability { .. }) => (f64::NAN, f64::NAN),
            Err(err) => return Err(err.into()),
        };
        for &k in &grid.points {
            let modes = lswt::modes(&q, k)?;
            let [e1, e2] = modes.bands().unwrap_or([f64::NAN, f64::NAN]);
            writeln!(w, "{g},{k},{e1},{e2},{},{m},{e}", modes.stable)?;
        }
    }
    Ok(())
}

fn fit(
    kind: FitKind,
    table: &SeriesTable,
    x_c: Option<f64>,
    beta: f64,
    nu: f64,
    prefactor: Prefactor,
) -> Result<serde_json::Value> {
    let need_xc = || x_c.context("--x-c is required for this fit");
    let result = match kind {
        FitKind::Xi => fit_correlation_length(table)?,
        FitKind::Eta => fit_power_law(table)?,
        FitKind::Collapse => data_collapse(
            table,
            CollapseInit {
                g_c: need_xc()?,
                beta,
                nu,
            },
        )?,
        FitKind::Gap => fit_gap_scaling(table, need_xc()?)?,
        FitKind::Cc => fit_central_charge(
            table,
            match prefactor {
                Prefactor::Open => EntropyPrefactor::Open,
                Prefactor::Periodic => EntropyPrefactor::Periodic,
            },
        )?,
        FitKind::Chi => second_derivative_fit(table)?,
    };
    Ok(serde_json::to_value(result)?)
}

fn write_json(value: &serde_json::Value, out: &Option<PathBuf>) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn sweep(spec_path: &Path, out: Option<PathBuf>, format: Option<SweepFormat>) -> Result<()> {
    let spec = SweepSpec::from_path(spec_path)
        .with_context(|| format!("reading {}", spec_path.display()))?;
    let dir = out
        .or_else(|| spec.output.as_ref().map(|o| o.path.clone()))
        .context("no output directory: pass --out or set [output] path")?;
    let format = match format {
        Some(SweepFormat::Csv) => Format::Csv,
        Some(SweepFormat::Json) => Format::Json,
        Some(SweepFormat::Both) => Format::Both,
        None => spec
            .output
            .as_ref()
            .map(|o| o.format)
            .unwrap_or(Format::Csv),
    };
    let (grid, files) = run_and_emit(&spec, &dir, format)?;
    for (status, count) in grid.status_counts() {
        log::info!("{count} cells {status}");
    }
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bands {
            model,
            kpoints,
            out,
        } => {
            let mut w = sink(&out)?;
            bands(&model.params()?, kpoints, &mut w)?;
            w.flush()?;
        }
        Command::Critline {
            model,
            phi_grid,
            out,
        } => {
            let mut w = sink(&out)?;
            critline(&model.params()?, phi_grid, &mut w)?;
            w.flush()?;
        }
        Command::Invariant {
            model,
            g_grid,
            phi_grid,
            g_max,
            out,
        } => {
            let mut w = sink(&out)?;
            invariant(&model.params()?, g_grid, phi_grid, g_max, &mut w)?;
            w.flush()?;
        }
        Command::Ldos {
            model,
            omega_range,
            site,
            eta,
            out,
        } => {
            let mut w = sink(&out)?;
            ldos(&model.params()?, omega_range, site, eta, &mut w)?;
            w.flush()?;
        }
        Command::Entanglement { model, cut, out } => {
            let mut w = sink(&out)?;
            entanglement(&model.params()?, cut, &mut w)?;
            w.flush()?;
        }
        Command::Correlate {
            model,
            axis,
            r_max,
            from,
            out,
        } => {
            let mut w = sink(&out)?;
            correlate(&model.params()?, axis, r_max, from, &mut w)?;
            w.flush()?;
        }
        Command::Chirality { model, engine, out } => {
            let mut w = sink(&out)?;
            chirality(&model.params()?, engine, &mut w)?;
            w.flush()?;
        }
        Command::Ed {
            model,
            states,
            observables,
            out,
        } => {
            write_json(&ed_report(&model.params()?, states, observables)?, &out)?;
        }
        Command::Lswt {
            model,
            g_range,
            kpoints,
            out,
        } => {
            let mut w = sink(&out)?;
            lswt_scan(&model.params()?, g_range, kpoints, &mut w)?;
            w.flush()?;
        }
        Command::Fit {
            kind,
            input,
            out,
            x_c,
            beta,
            nu,
            prefactor,
        } => {
            let table = SeriesTable::from_csv_path(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            write_json(&fit(kind, &table, x_c, beta, nu, prefactor)?, &out)?;
        }
        Command::Sweep { spec, out, format } => sweep(&spec, out, format)?,
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
