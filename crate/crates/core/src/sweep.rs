//! Parameter sweeps over (g, phi, N) grids with a registry of per-point
//! computations, deterministic ordering and CSV/JSON output.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::bdg::{critical_coupling, gap_scan};
use crate::error::{Error, Result};
use crate::freefermion::{
    covariance_for, entanglement_ff, mean_chirality_ff, order_parameter_ff, Chain, CovarianceData,
    Filling,
};
use crate::params::{Boundary, ModelParams, MomentumGrid};
use crate::topology::{z2_invariant, zero_modes};
use crate::{ed, lswt};

/// Environment variable holding the number of sweep workers.
pub const WORKERS_ENV: &str = "CHIRAL_WORKERS";
/// Momentum points used by the bulk-gap and spin-wave tasks.
pub const SWEEP_MOMENTA: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Range {
    pub fn validate(&self, name: &'static str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo > self.hi {
            return Err(Error::invalid(
                name,
                format!("range {}..{} is not ordered", self.lo, self.hi),
            ));
        }
        if self.steps == 0 {
            return Err(Error::invalid(name, "range needs at least one step"));
        }
        Ok(())
    }

    /// `steps` evenly spaced values including both ends (just `lo` for one step).
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let d = (self.hi - self.lo) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.hi
                } else {
                    self.lo + d * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for Range {
    type Err = Error;

    /// Parses `lo:hi:steps`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::invalid("range", format!("`{s}` is not lo:hi:steps"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let r = Range {
            lo: parts[0].trim().parse().map_err(|_| bad())?,
            hi: parts[1].trim().parse().map_err(|_| bad())?,
            steps: parts[2].trim().parse().map_err(|_| bad())?,
        };
        r.validate("range")?;
        Ok(r)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axes {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Range>,
    #[serde(default, rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Csv
}

/// Sweep description as read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default)]
    pub base: ModelParams,
    #[serde(default)]
    pub axes: Axes,
    #[serde(default)]
    pub tasks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
}

impl SweepSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: SweepSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let mut count = 0;
        if let Some(r) = &self.axes.phi {
            r.validate("phi")?;
            count += 1;
        }
        if let Some(r) = &self.axes.g {
            r.validate("g")?;
            count += 1;
        }
        if let Some(ns) = &self.axes.n {
            if ns.is_empty() {
                return Err(Error::invalid("N", "size list is empty"));
            }
            count += 1;
        }
        if count > 2 {
            return Err(Error::invalid("axes", "at most two sweep axes are allowed"));
        }
        self.parsed_tasks().map(|_| ())
    }

    pub fn parsed_tasks(&self) -> Result<Vec<Task>> {
        self.tasks.iter().map(|t| t.parse()).collect()
    }

    /// Axes in output order (phi, g, N), each with its values.
    pub fn axis_values(&self) -> Vec<AxisValues> {
        let mut out = Vec::new();
        if let Some(r) = &self.axes.phi {
            out.push(AxisValues {
                name: "phi".into(),
                values: r.values(),
            });
        }
        if let Some(r) = &self.axes.g {
            out.push(AxisValues {
                name: "g".into(),
                values: r.values(),
            });
        }
        if let Some(ns) = &self.axes.n {
            out.push(AxisValues {
                name: "N".into(),
                values: ns.iter().map(|&n| n as f64).collect(),
            });
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisValues {
    pub name: String,
    pub values: Vec<f64>,
}

/// Registered per-point computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    /// Bulk Z2 invariant, +1 trivial and -1 topological.
    Z2Invariant,
    /// Closed-form critical coupling at the cell's phi, NaN without transition.
    CriticalCoupling,
    /// Bulk single-particle gap minimized over momentum.
    Gap,
    /// [E_min, edge weight] of the open chain.
    ZeroMode,
    /// Half-chain Schmidt gap of the free-fermion ground state.
    SchmidtGap,
    /// Half-chain entanglement entropy of the free-fermion ground state.
    Entropy,
    /// Largest half-chain reduced-density-matrix eigenvalues.
    EntanglementSpectrum,
    /// [chain A, chain B] bulk chirality of the free-fermion ground state.
    ChiralityFf,
    /// [chain B, chain A] in-plane order parameter.
    OrderParameter,
    /// [Delta_0, Delta_1] from exact diagonalization.
    EdGaps,
    /// [chain A, chain B] bulk chirality of the exact ground state.
    EdChirality,
    /// Spin-wave instability coupling.
    LswtThreshold,
    /// [magnetization, energy per spin] from spin-wave theory.
    Lswt,
}

impl Task {
    pub const ALL: [Task; 13] = [
        Task::Z2Invariant,
        Task::CriticalCoupling,
        Task::Gap,
        Task::ZeroMode,
        Task::SchmidtGap,
        Task::Entropy,
        Task::EntanglementSpectrum,
        Task::ChiralityFf,
        Task::OrderParameter,
        Task::EdGaps,
        Task::EdChirality,
        Task::LswtThreshold,
        Task::Lswt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Z2Invariant => "z2_invariant",
            Task::CriticalCoupling => "critical_coupling",
            Task::Gap => "gap",
            Task::ZeroMode => "zero_mode",
            Task::SchmidtGap => "schmidt_gap",
            Task::Entropy => "entropy",
            Task::EntanglementSpectrum => "entanglement_spectrum",
            Task::ChiralityFf => "chirality_ff",
            Task::OrderParameter => "order_parameter",
            Task::EdGaps => "ed_gaps",
            Task::EdChirality => "ed_chirality",
            Task::LswtThreshold => "lswt_threshold",
            Task::Lswt => "lswt",
        }
    }

    pub fn is_vector(self) -> bool {
        matches!(
            self,
            Task::ZeroMode
                | Task::EntanglementSpectrum
                | Task::ChiralityFf
                | Task::OrderParameter
                | Task::EdGaps
                | Task::EdChirality
                | Task::Lswt
        )
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s.trim())
            .ok_or_else(|| Error::UnknownTask(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Failed => "failed",
            Status::Skipped => "skipped",
        })
    }
}

impl FromStr for Status {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ok" => Ok(Status::Ok),
            "failed" => Ok(Status::Failed),
            "skipped" => Ok(Status::Skipped),
            other => Err(Error::Table(format!("unknown status `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Axis values in the order of `ResultGrid::axes`.
    pub coords: Vec<f64>,
    pub status: Status,
    /// One entry per task; `None` when the task failed or was skipped.
    pub results: Vec<Option<Value>>,
    /// Reasons for failed or skipped tasks.
    pub messages: Vec<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultGrid {
    pub axes: Vec<AxisValues>,
    pub tasks: Vec<Task>,
    /// Row-major over `axes`.
    pub cells: Vec<Cell>,
}

enum Outcome {
    Done(Value),
    Skipped(String),
    Failed(String),
}

/// Lazily shared per-cell state.
struct CellContext {
    params: ModelParams,
    covariance: OnceCell<std::result::Result<CovarianceData, String>>,
}

impl CellContext {
    fn covariance(&self) -> Result<&CovarianceData> {
        self.covariance
            .get_or_init(|| {
                covariance_for(
                    &self.params.with_boundary(Boundary::Open),
                    Filling::EvenParity,
                )
                .map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::Precondition(e.clone()))
    }
}

fn momenta() -> Result<MomentumGrid> {
    MomentumGrid::uniform(SWEEP_MOMENTA)
}

fn evaluate(task: Task, ctx: &CellContext) -> Result<Value> {
    let p = &ctx.params;
    Ok(match task {
        Task::Z2Invariant => Value::Scalar(f64::from(z2_invariant(p)?.sign())),
        Task::CriticalCoupling => Value::Scalar(
            critical_coupling(p.omega_a, p.omega_b, p.j, p.phi)
                .value()
                .unwrap_or(f64::NAN),
        ),
        Task::Gap => Value::Scalar(gap_scan(p, &momenta()?).min_gap),
        Task::ZeroMode => {
            let z = zero_modes(p)?;
            Value::Vector(vec![z.e_min, z.edge_weight])
        }
        Task::SchmidtGap => Value::Scalar(entanglement_ff(ctx.covariance()?, p.n / 2)?.schmidt_gap),
        Task::Entropy => Value::Scalar(entanglement_ff(ctx.covariance()?, p.n / 2)?.entropy),
        Task::EntanglementSpectrum => {
            Value::Vector(entanglement_ff(ctx.covariance()?, p.n / 2)?.rdm_spectrum)
        }
        Task::ChiralityFf => {
            let cov = ctx.covariance()?;
            Value::Vector(vec![
                mean_chirality_ff(cov, Chain::A)?,
                mean_chirality_ff(cov, Chain::B)?,
            ])
        }
        Task::OrderParameter => {
            let op = order_parameter_ff(p)?;
            Value::Vector(vec![op.chain_b, op.chain_a])
        }
        Task::EdGaps => {
            let g = ed::gaps(p)?;
            Value::Vector(vec![g.delta0, g.delta1])
        }
        Task::EdChirality => {
            let gs = ed::ground_state(p)?;
            let obs = ed::observables(&gs.state, p.n, p.phi)?;
            Value::Vector(vec![obs.mean_chirality_a, obs.mean_chirality_b])
        }
        Task::LswtThreshold => Value::Scalar(lswt::instability_threshold(p)?.g_c),
        Task::Lswt => {
            let pt = lswt::lswt_point(p, &momenta()?)?;
            Value::Vector(vec![pt.magnetization, pt.energy])
        }
    })
}

fn run_task(task: Task, ctx: &CellContext) -> Outcome {
    match evaluate(task, ctx) {
        Ok(v) => Outcome::Done(v),
        Err(e @ (Error::SizeCap { .. } | Error::BeyondInstability { .. })) => {
            Outcome::Skipped(format!("{task}: {e}"))
        }
        Err(e) => Outcome::Failed(format!("{task}: {e}")),
    }
}

fn cell_params(base: &ModelParams, axes: &[AxisValues], coords: &[f64]) -> ModelParams {
    let mut p = *base;
    for (axis, &v) in axes.iter().zip(coords) {
        match axis.name.as_str() {
            "phi" => p.phi = v,
            "g" => p.g = v,
            _ => p.n = v as usize,
        }
    }
    p
}

fn run_cell(base: &ModelParams, axes: &[AxisValues], coords: Vec<f64>, tasks: &[Task]) -> Cell {
    let start = Instant::now();
    let raw = cell_params(base, axes, &coords);
    let mut messages = Vec::new();
    let mut results = vec![None; tasks.len()];
    let status = match raw.validate() {
        Err(e) => {
            messages.push(e.to_string());
            Status::Failed
        }
        Ok(valid) => {
            let ctx = CellContext {
                params: valid.into_inner(),
                covariance: OnceCell::new(),
            };
            let mut status = Status::Ok;
            for (slot, &task) in results.iter_mut().zip(tasks) {
                match run_task(task, &ctx) {
                    Outcome::Done(v) => *slot = Some(v),
                    Outcome::Skipped(m) => {
                        if status == Status::Ok {
                            status = Status::Skipped;
                        }
                        messages.push(m);
                    }
                    Outcome::Failed(m) => {
                        status = Status::Failed;
                        messages.push(m);
                    }
                }
            }
            status
        }
    };
    if status == Status::Failed {
        log::warn!("cell {coords:?}: {}", messages.join("; "));
    }
    Cell {
        coords,
        status,
        results,
        messages,
        wall_time_s: start.elapsed().as_secs_f64(),
    }
}

/// Worker count from the environment, defaulting to the logical cores.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// All coordinate tuples in row-major order.
fn coordinates(axes: &[AxisValues]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut c = prefix.clone();
                    c.push(v);
                    c
                })
            })
            .collect();
    }
    out
}

/// Evaluates every cell once. Cells are split into contiguous blocks, one per
/// worker, and reassembled in grid order. An empty task list yields no cells.
pub fn run_sweep(spec: &SweepSpec) -> Result<ResultGrid> {
    run_sweep_with_workers(spec, worker_count())
}

pub fn run_sweep_with_workers(spec: &SweepSpec, workers: usize) -> Result<ResultGrid> {
    spec.validate()?;
    let tasks = spec.parsed_tasks()?;
    let axes = spec.axis_values();
    if tasks.is_empty() {
        return Ok(ResultGrid {
            axes,
            tasks,
            cells: Vec::new(),
        });
    }
    let coords = coordinates(&axes);
    let block = coords.len().div_ceil(workers.max(1)).max(1);
    let blocks: Vec<Vec<Vec<f64>>> = coords.chunks(block).map(|c| c.to_vec()).collect();
    let cells = std::thread::scope(|scope| {
        let handles: Vec<_> = blocks
            .into_iter()
            .map(|chunk| {
                let (axes, tasks, base) = (&axes, &tasks, &spec.base);
                scope.spawn(move || {
                    chunk
                        .into_iter()
                        .map(|c| run_cell(base, axes, c, tasks))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .map_err(|_| Error::Precondition("sweep worker panicked".into()))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(ResultGrid {
        axes,
        tasks,
        cells: cells.into_iter().flatten().collect(),
    })
}

fn format_value(v: &Option<Value>) -> String {
    match v {
        None => String::new(),
        Some(Value::Scalar(x)) => x.to_string(),
        Some(Value::Vector(xs)) => xs
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(";"),
    }
}

fn parse_float(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Table(format!("`{s}` is not a number")))
}

impl ResultGrid {
    pub fn csv_header(&self) -> Vec<String> {
        let mut h: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        h.push("status".into());
        h.extend(self.tasks.iter().map(|t| t.name().to_string()));
        h.push("message".into());
        h
    }

    /// One row per cell; vectors are semicolon-joined. Wall times are left out
    /// so that repeated runs produce identical files.
    pub fn write_csv(&self, writer: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(self.csv_header())?;
        for cell in &self.cells {
            let mut row: Vec<String> = cell.coords.iter().map(|c| c.to_string()).collect();
            row.push(cell.status.to_string());
            row.extend(cell.results.iter().map(format_value));
            row.push(cell.messages.join(" | "));
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Table(e.to_string()))
    }

    /// Inverse of `write_csv`; wall times come back as zero and axis values
    /// are recovered from the distinct coordinates.
    pub fn from_csv_reader(reader: impl std::io::Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(reader);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let status_col = header
            .iter()
            .position(|h| h == "status")
            .ok_or_else(|| Error::Table("missing status column".into()))?;
        if header.last().map(String::as_str) != Some("message") {
            return Err(Error::Table("missing message column".into()));
        }
        let axis_names = &header[..status_col];
        let tasks: Vec<Task> = header[status_col + 1..header.len() - 1]
            .iter()
            .map(|t| t.parse())
            .collect::<Result<_>>()?;
        let mut cells = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let coords = (0..status_col)
                .map(|i| parse_float(&rec[i]))
                .collect::<Result<Vec<_>>>()?;
            let status: Status = rec[status_col].parse()?;
            let mut results = Vec::with_capacity(tasks.len());
            for (i, task) in tasks.iter().enumerate() {
                let field = &rec[status_col + 1 + i];
                results.push(if field.is_empty() {
                    None
                } else if task.is_vector() {
                    Some(Value::Vector(
                        field.split(';').map(parse_float).collect::<Result<_>>()?,
                    ))
                } else {
                    Some(Value::Scalar(parse_float(field)?))
                });
            }
            let msg = &rec[header.len() - 1];
            let messages = if msg.is_empty() {
                Vec::new()
            } else {
                msg.split(" | ").map(str::to_string).collect()
            };
            cells.push(Cell {
                coords,
                status,
                results,
                messages,
                wall_time_s: 0.0,
            });
        }
        let axes = axis_names
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let mut values: Vec<f64> = Vec::new();
                for c in &cells {
                    if !values.iter().any(|v| v.to_bits() == c.coords[i].to_bits()) {
                        values.push(c.coords[i]);
                    }
                }
                AxisValues {
                    name: name.clone(),
                    values,
                }
            })
            .collect();
        Ok(ResultGrid { axes, tasks, cells })
    }

    pub fn to_json(&self, spec: &SweepSpec, started: f64, finished: f64) -> Result<String> {
        let doc = JsonDocument {
            metadata: Metadata {
                version: env!("CARGO_PKG_VERSION").to_string(),
                params: spec.base,
                grid: spec.axes.clone(),
                tasks: self.tasks.iter().map(|t| t.name().to_string()).collect(),
                started_unix_s: started,
                finished_unix_s: finished,
            },
            grid: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: JsonDocument = serde_json::from_str(text)?;
        Ok(doc.grid)
    }

    pub fn status_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for c in &self.cells {
            *out.entry(c.status.to_string()).or_insert(0) += 1;
        }
        out
    }

    pub fn task_index(&self, task: Task) -> Option<usize> {
        self.tasks.iter().position(|&t| t == task)
    }

    pub fn scalar(&self, cell: usize, task: Task) -> Option<f64> {
        match self.cells.get(cell)?.results.get(self.task_index(task)?)? {
            Some(Value::Scalar(x)) => Some(*x),
            _ => None,
        }
    }

    pub fn vector(&self, cell: usize, task: Task) -> Option<&[f64]> {
        match self.cells.get(cell)?.results.get(self.task_index(task)?)? {
            Some(Value::Vector(x)) => Some(x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Metadata {
    version: String,
    params: ModelParams,
    grid: Axes,
    tasks: Vec<String>,
    started_unix_s: f64,
    finished_unix_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonDocument {
    metadata: Metadata,
    #[serde(flatten)]
    grid: ResultGrid,
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Runs the sweep and writes `sweep.csv` and/or `sweep.json` into `dir`.
pub fn run_and_emit(
    spec: &SweepSpec,
    dir: &Path,
    format: Format,
) -> Result<(ResultGrid, Vec<PathBuf>)> {
    let started = unix_now();
    let grid = run_sweep(spec)?;
    let finished = unix_now();
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if matches!(format, Format::Csv | Format::Both) {
        let path = dir.join("sweep.csv");
        grid.write_csv(std::fs::File::create(&path)?)?;
        written.push(path);
    }
    if matches!(format, Format::Json | Format::Both) {
        let path = dir.join("sweep.json");
        std::fs::write(&path, grid.to_json(spec, started, finished)?)?;
        written.push(path);
    }
    Ok((grid, written))
}
