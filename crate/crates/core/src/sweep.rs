//! Configuration-driven point reports and `(a, b)` sweeps with CSV and JSON output.
//!
//! A config is a TOML file:
//!
//! ```toml
//! [model]
//! kind = "interpolated"     # or "corner" with corner = "11"
//! n_sites = 3
//! boundary = "periodic"
//! # a = 1.0                 # pins a; the grid then only runs over b
//!
//! [grid]
//! a = [0.0, 1.0]
//! b = [0.0, 1.0]
//! a_steps = 11
//! b_steps = 11
//!
//! [solver]
//! method = "auto"           # dense | iterative | auto
//! k = 4
//! seed = 7
//!
//! [observables]
//! labels = ["strong_indicator_K", "weak_indicator_U", "string_order", "entanglement", "xi"]
//!
//! [output]
//! directory = "out"
//! stem = "sweep"
//! formats = ["csv", "json"]
//! ```

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::krylov::KrylovOptions;
use crate::liouville::{build_imag_superop, vectorize, LiouvilleError};
use crate::models::{build_interpolated, strong_symmetry, weak_symmetry, Boundary, Corner, InterpolationParams, LatticeSpec, ModelError};
use crate::observables::{
    correlation_series, fit_corr_length, string_order, strong_symmetry_indicator, supervector_entanglement,
    weak_symmetry_indicator, CorrelationKind, LocalObservable, ObservableError, Xi,
};
use crate::spectral::{degeneracy, extremal_spectrum, full_spectrum, steady_state_from, SpectralError, SteadyState, AUTO_DENSE_LIMIT};

pub const CSV_HEADER: &str = "a,b,N,boundary,gap,ground_real,K_abs,UU,string_order,EE,ES_degeneracy,GSD,xi1,xi2,wall_ms";

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("config parse error: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Liouville(#[from] LiouvilleError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Interpolated,
    Corner,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    #[serde(default)]
    pub kind: ModelKind,
    pub n_sites: usize,
    #[serde(default = "default_boundary")]
    pub boundary: Boundary,
    #[serde(default)]
    pub corner: Option<Corner>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub b: Option<f64>,
}

fn default_boundary() -> Boundary {
    Boundary::Periodic
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub a_steps: usize,
    pub b_steps: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock { a: [0.0, 1.0], b: [0.0, 1.0], a_steps: 11, b_steps: 11 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SolverMethod {
    Dense,
    Iterative,
    #[default]
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub method: SolverMethod,
    /// Eigenpairs requested from the iterative solver.
    pub k: usize,
    pub seed: u64,
    pub tol: f64,
    pub krylov_dim: usize,
    pub degeneracy_tol: f64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        let k = KrylovOptions::default();
        SolverBlock {
            method: SolverMethod::Auto,
            k: 4,
            seed: k.seed,
            tol: k.tol,
            krylov_dim: k.krylov_dim,
            degeneracy_tol: crate::spectral::DEFAULT_DEGENERACY_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObservableLabel {
    #[serde(rename = "strong_indicator_K")]
    StrongIndicator,
    #[serde(rename = "weak_indicator_U")]
    WeakIndicator,
    #[serde(rename = "string_order")]
    StringOrder,
    #[serde(rename = "entanglement")]
    Entanglement,
    #[serde(rename = "gsd")]
    Gsd,
    #[serde(rename = "xi")]
    Xi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ObservablesBlock {
    pub labels: Vec<ObservableLabel>,
}

impl Default for ObservablesBlock {
    fn default() -> Self {
        use ObservableLabel::*;
        ObservablesBlock { labels: vec![StrongIndicator, WeakIndicator, StringOrder, Entanglement, Gsd, Xi] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub directory: PathBuf,
    pub stem: String,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock { directory: PathBuf::from("out"), stem: "sweep".into(), formats: vec![OutputFormat::Csv, OutputFormat::Json] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub grid: GridBlock,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub observables: ObservablesBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

fn linspace(range: [f64; 2], steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![range[0]];
    }
    (0..steps).map(|i| range[0] + (range[1] - range[0]) * i as f64 / (steps - 1) as f64).collect()
}

impl SweepConfig {
    pub fn from_toml_str(s: &str) -> Result<SweepConfig, SweepError> {
        let c: SweepConfig = toml::from_str(s)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<SweepConfig, SweepError> {
        let text = std::fs::read_to_string(path).map_err(|source| SweepError::Io { path: path.to_path_buf(), source })?;
        SweepConfig::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::Config(m));
        let m = &self.model;
        if m.n_sites == 0 {
            return bad("model.n_sites must be at least 1".into());
        }
        if m.kind == ModelKind::Corner && m.corner.is_none() {
            return bad("model.kind = \"corner\" needs model.corner".into());
        }
        for (name, v) in [("model.a", m.a), ("model.b", m.b)] {
            if let Some(v) = v {
                if !(0.0..=1.0).contains(&v) {
                    return bad(format!("{name} = {v} is outside [0, 1]"));
                }
            }
        }
        let g = &self.grid;
        for (name, r) in [("grid.a", g.a), ("grid.b", g.b)] {
            if !(0.0..=1.0).contains(&r[0]) || !(0.0..=1.0).contains(&r[1]) || r[0] > r[1] {
                return bad(format!("{name} = {r:?} must be an ordered range inside [0, 1]"));
            }
        }
        if g.a_steps == 0 || g.b_steps == 0 {
            return bad("grid step counts must be at least 1".into());
        }
        let qubits = 4 * m.n_sites;
        if qubits > crate::pauli::SPARSE_QUBIT_LIMIT {
            return bad(format!("{} sites need a {qubits}-qubit superoperator, beyond the sparse limit", m.n_sites));
        }
        if self.solver.method == SolverMethod::Dense && (1usize << qubits) > crate::spectral::DENSE_DIM_LIMIT {
            return bad(format!("dense solver cannot handle {} sites", m.n_sites));
        }
        if self.solver.k < 2 {
            return bad("solver.k must be at least 2 to resolve a gap".into());
        }
        Ok(())
    }

    pub fn lattice(&self) -> Result<LatticeSpec, SweepError> {
        Ok(LatticeSpec::new(self.model.n_sites, self.model.boundary)?)
    }

    /// Grid points in row-major order, `a` outer.
    pub fn points(&self) -> Vec<(f64, f64)> {
        if self.model.kind == ModelKind::Corner {
            return self.model.corner.map(|c| vec![c.coordinates()]).unwrap_or_default();
        }
        let a_vals = self.model.a.map_or_else(|| linspace(self.grid.a, self.grid.a_steps), |a| vec![a]);
        let b_vals = self.model.b.map_or_else(|| linspace(self.grid.b, self.grid.b_steps), |b| vec![b]);
        a_vals.iter().flat_map(|&a| b_vals.iter().map(move |&b| (a, b))).collect()
    }

    fn wants(&self, label: ObservableLabel) -> bool {
        self.observables.labels.contains(&label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiEstimate {
    pub xi: Xi,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub a: f64,
    pub b: f64,
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub boundary: Boundary,
    pub gap: Option<f64>,
    pub ground_real: Option<bool>,
    #[serde(rename = "K_abs")]
    pub k_abs: Option<f64>,
    #[serde(rename = "UU")]
    pub uu: Option<f64>,
    pub string_order: Option<f64>,
    #[serde(rename = "EE")]
    pub ee: Option<f64>,
    /// Leading Schmidt level multiplicity per entanglement cut.
    #[serde(rename = "ES_degeneracy")]
    pub es_degeneracy: Option<usize>,
    #[serde(rename = "GSD")]
    pub gsd: Option<usize>,
    pub xi1: Option<XiEstimate>,
    pub xi2: Option<XiEstimate>,
    pub wall_ms: u64,
    /// Set when the point failed; the numeric fields are then empty.
    pub error: Option<String>,
}

impl PointReport {
    fn empty(a: f64, b: f64, lattice: &LatticeSpec) -> PointReport {
        PointReport {
            a,
            b,
            n_sites: lattice.n_sites,
            boundary: lattice.boundary,
            gap: None,
            ground_real: None,
            k_abs: None,
            uu: None,
            string_order: None,
            ee: None,
            es_degeneracy: None,
            gsd: None,
            xi1: None,
            xi2: None,
            wall_ms: 0,
            error: None,
        }
    }

    pub fn is_fatal(&self) -> bool {
        self.error.is_some()
    }
}

fn fit(
    rho: &crate::liouville::DensityMatrix,
    lattice: &LatticeSpec,
    kind: CorrelationKind,
) -> Result<Option<XiEstimate>, SweepError> {
    let series = correlation_series(rho, lattice, LocalObservable::SigmaZ, kind)?;
    match fit_corr_length(&series) {
        Ok(f) => Ok(Some(XiEstimate { xi: f.xi, r_squared: f.r_squared, points: f.points })),
        Err(ObservableError::NoSignal { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Build the model at `(a, b)`, solve it and evaluate the requested observables.
pub fn run_point(config: &SweepConfig, a: f64, b: f64) -> Result<PointReport, SweepError> {
    let start = Instant::now();
    let lattice = config.lattice()?;
    let generator = build_interpolated(InterpolationParams::new(a, b)?, &lattice);
    let sup = build_imag_superop(&generator)?;
    let dense = match config.solver.method {
        SolverMethod::Dense => true,
        SolverMethod::Iterative => false,
        SolverMethod::Auto => sup.dim() <= AUTO_DENSE_LIMIT,
    };
    let spec = if dense {
        full_spectrum(&sup)?
    } else {
        let opts = KrylovOptions {
            seed: config.solver.seed,
            tol: config.solver.tol,
            krylov_dim: config.solver.krylov_dim,
            ..KrylovOptions::default()
        };
        extremal_spectrum(&sup, config.solver.k.min(sup.dim()), &opts)?
    };
    let mut r = PointReport::empty(a, b, &lattice);
    r.gap = Some(spec.gap);
    r.ground_real = Some(spec.ground_is_real);
    if config.wants(ObservableLabel::Gsd) && lattice.boundary == Boundary::Open && spec.complete {
        r.gsd = Some(degeneracy(&spec, config.solver.degeneracy_tol));
    }
    let n = lattice.n_sites;
    if let SteadyState::Unique(rho) = steady_state_from(&spec, config.solver.degeneracy_tol)? {
        if config.wants(ObservableLabel::StrongIndicator) {
            r.k_abs = Some(strong_symmetry_indicator(&rho, &strong_symmetry(&lattice).into())?);
        }
        if config.wants(ObservableLabel::WeakIndicator) {
            r.uu = Some(weak_symmetry_indicator(&rho, &weak_symmetry(&lattice).into())?);
        }
        if config.wants(ObservableLabel::StringOrder) && n >= 2 {
            let span = match lattice.boundary {
                Boundary::Periodic => n / 2,
                Boundary::Open => n - 1,
            };
            r.string_order = Some(string_order(&rho, &lattice, 0, span)?);
        }
        if config.wants(ObservableLabel::Entanglement) && n >= 2 {
            let es = supervector_entanglement(&vectorize(&rho), &lattice, n / 2)?;
            r.ee = Some(es.entropy);
            r.es_degeneracy = Some(es.per_boundary_degeneracy.unwrap_or(es.leading_multiplicity));
        }
        if config.wants(ObservableLabel::Xi) {
            r.xi1 = fit(&rho, &lattice, CorrelationKind::Linear)?;
            r.xi2 = fit(&rho, &lattice, CorrelationKind::Renyi2)?;
        }
    }
    r.wall_ms = start.elapsed().as_millis() as u64;
    Ok(r)
}

/// Every grid point on a pool of `workers` threads; failed points become error rows.
pub fn run_sweep(config: &SweepConfig, workers: usize) -> Result<Vec<PointReport>, SweepError> {
    config.validate()?;
    let lattice = config.lattice()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SweepError::Config(format!("worker pool: {e}")))?;
    let points = config.points();
    Ok(pool.install(|| {
        points
            .par_iter()
            .map(|&(a, b)| {
                let start = Instant::now();
                run_point(config, a, b).unwrap_or_else(|e| {
                    let mut r = PointReport::empty(a, b, &lattice);
                    r.error = Some(e.to_string());
                    r.wall_ms = start.elapsed().as_millis() as u64;
                    r
                })
            })
            .collect()
    }))
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

/// Shortest representation that parses back to the same double.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn xi_cell(v: &Option<XiEstimate>) -> String {
    match v {
        Some(XiEstimate { xi: Xi::Finite(x), .. }) => num(*x),
        Some(XiEstimate { xi: Xi::Infinite, .. }) => "inf".into(),
        None => String::new(),
    }
}

pub fn write_csv<W: Write>(rows: &[PointReport], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let mut line = String::new();
        write!(
            line,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            num(r.a),
            num(r.b),
            r.n_sites,
            r.boundary,
            opt_num(r.gap),
            opt(&r.ground_real),
            opt_num(r.k_abs),
            opt_num(r.uu),
            opt_num(r.string_order),
            opt_num(r.ee),
            opt(&r.es_degeneracy),
            opt(&r.gsd),
            xi_cell(&r.xi1),
            xi_cell(&r.xi2),
            r.wall_ms
        )
        .expect("writing to a String");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[PointReport], w: W) -> Result<(), SweepError> {
    serde_json::to_writer_pretty(w, rows)?;
    Ok(())
}

pub fn read_json(text: &str) -> Result<Vec<PointReport>, SweepError> {
    Ok(serde_json::from_str(text)?)
}

/// Write the table in every configured format; returns the files written.
pub fn emit(rows: &[PointReport], output: &OutputBlock) -> Result<Vec<PathBuf>, SweepError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SweepError::Io { path, source }
    };
    std::fs::create_dir_all(&output.directory).map_err(io(&output.directory))?;
    let mut written = Vec::new();
    for fmt in &output.formats {
        let (ext, path) = match fmt {
            OutputFormat::Csv => ("csv", output.directory.join(format!("{}.csv", output.stem))),
            OutputFormat::Json => ("json", output.directory.join(format!("{}.json", output.stem))),
        };
        let file = std::fs::File::create(&path).map_err(io(&path))?;
        let mut buf = std::io::BufWriter::new(file);
        if ext == "csv" {
            write_csv(rows, &mut buf).map_err(io(&path))?;
        } else {
            write_json(rows, &mut buf)?;
        }
        buf.flush().map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
