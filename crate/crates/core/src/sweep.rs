//! Probe-grid sweeps: JSON configuration, parallel evaluation, CSV output,
//! difference maps and spot re-verification of emitted rows.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    linear_quadratic_from_parts, linear_radial_from_parts, linear_radial_rhs,
    radial_quadratic_from_parts, radial_quadratic_rhs, BoundReport, SkewSpectrum,
};
use crate::clifford::{build_rep, CliffordRep};
use crate::error::{Error, Result};
use crate::gaps::{gap_record, GapRecord};
use crate::io::read_matrix_market_file;
use crate::kernels::{
    departure_of, frobenius_norm, min_abs_real, schur, set_blas_threads, sigma_min, C64,
};
use crate::localizer::{commutator_sum_norm, f_term_norm, nh_localizer, MatrixTuple, ProbeSite};
use crate::models::{
    build_haldane_heterostructure, build_tls, scaled_tuple, HaldaneParams, LatticeModel,
    RegionParams, TwoLevelParams,
};
use crate::quadratic::quadratic_gaps;

/// Environment variable overriding the configured thread count.
pub const THREADS_ENV: &str = "NHPSEUDO_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModelConfig {
    Tls {
        #[serde(default)]
        delta_e: f64,
        #[serde(default = "default_delta_gamma")]
        delta_gamma: f64,
        #[serde(default = "default_c")]
        c: f64,
    },
    Haldane {
        #[serde(default = "default_r_topo")]
        r_topo: u32,
        #[serde(default = "default_r_trivial")]
        r_trivial: u32,
        #[serde(default = "default_r_lossy")]
        r_lossy: u32,
        #[serde(default = "RegionParams::topological")]
        topological: RegionParams,
        #[serde(default = "RegionParams::trivial")]
        trivial: RegionParams,
        #[serde(default = "RegionParams::lossy")]
        lossy: RegionParams,
    },
    /// MatrixMarket files: one non-Hermitian matrix and one or two
    /// Hermitian position matrices. Relative paths resolve against the
    /// configuration file's directory.
    File { h: PathBuf, positions: Vec<PathBuf> },
}

impl ModelConfig {
    /// The two-level model with its standard parameters.
    pub fn tls() -> Self {
        ModelConfig::Tls {
            delta_e: 0.0,
            delta_gamma: default_delta_gamma(),
            c: default_c(),
        }
    }

    /// The heterostructure with default radii and region parameters.
    pub fn haldane() -> Self {
        ModelConfig::Haldane {
            r_topo: default_r_topo(),
            r_trivial: default_r_trivial(),
            r_lossy: default_r_lossy(),
            topological: RegionParams::topological(),
            trivial: RegionParams::trivial(),
            lossy: RegionParams::lossy(),
        }
    }

    pub fn default_kappa(&self) -> f64 {
        match self {
            ModelConfig::Haldane { .. } => HaldaneParams::default().kappa,
            _ => 1.0,
        }
    }

    /// Number of position coordinates the model carries.
    pub fn position_count(&self) -> usize {
        match self {
            ModelConfig::Tls { .. } => 1,
            ModelConfig::Haldane { .. } => 2,
            ModelConfig::File { positions, .. } => positions.len(),
        }
    }

    /// Probe coordinates in output order.
    pub fn coords(&self) -> Vec<Coord> {
        let mut c = [Coord::X, Coord::Y][..self.position_count().min(2)].to_vec();
        c.extend([Coord::ReE, Coord::ImE]);
        c
    }
}

fn default_delta_gamma() -> f64 {
    2.0
}
fn default_c() -> f64 {
    1.0
}
fn default_r_topo() -> u32 {
    HaldaneParams::default().r_topo
}
fn default_r_trivial() -> u32 {
    HaldaneParams::default().r_trivial
}
fn default_r_lossy() -> u32 {
    HaldaneParams::default().r_lossy
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Coord {
    #[serde(rename = "x")]
    X,
    #[serde(rename = "y")]
    Y,
    #[serde(rename = "reE")]
    ReE,
    #[serde(rename = "imE")]
    ImE,
}

impl Coord {
    pub const ALL: [Coord; 4] = [Coord::X, Coord::Y, Coord::ReE, Coord::ImE];

    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
            Coord::ReE => "reE",
            Coord::ImE => "imE",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: Coord,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if self.steps == 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub axes: Vec<Axis>,
    #[serde(default)]
    pub fixed: BTreeMap<Coord, f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GapKind {
    Linear,
    Radial,
    Rq,
    Lq,
    Q,
}

impl GapKind {
    pub const ALL: [GapKind; 5] = [
        GapKind::Linear,
        GapKind::Radial,
        GapKind::Rq,
        GapKind::Lq,
        GapKind::Q,
    ];

    pub fn column(self) -> &'static str {
        match self {
            GapKind::Linear => "gap_linear",
            GapKind::Radial => "gap_radial",
            GapKind::Rq => "gap_rq",
            GapKind::Lq => "gap_lq",
            GapKind::Q => "gap_q",
        }
    }

    pub fn of(self, r: &GapRecord) -> f64 {
        match self {
            GapKind::Linear => r.gap_linear,
            GapKind::Radial => r.gap_radial,
            GapKind::Rq => r.gap_rq,
            GapKind::Lq => r.gap_lq,
            GapKind::Q => r.gap_q,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundColumn {
    LinearRadial,
    RadialQuadratic,
    LinearQuadratic,
}

impl BoundColumn {
    pub const ALL: [BoundColumn; 3] = [
        BoundColumn::LinearRadial,
        BoundColumn::RadialQuadratic,
        BoundColumn::LinearQuadratic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundColumn::LinearRadial => "linear_radial",
            BoundColumn::RadialQuadratic => "radial_quadratic",
            BoundColumn::LinearQuadratic => "linear_quadratic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: ModelConfig,
    /// Position scaling; defaults to 0.5 for the Haldane model and 1
    /// otherwise.
    #[serde(default)]
    pub kappa: Option<f64>,
    pub grid: GridConfig,
    pub gaps: Vec<GapKind>,
    #[serde(default)]
    pub bounds: Vec<BoundColumn>,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(s);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })
    }

    pub fn from_reader<R: Read>(mut r: R) -> Result<Self> {
        let mut s = String::new();
        r.read_to_string(&mut s)?;
        Self::from_json_str(&s)
    }

    /// Read a configuration file; relative model paths are resolved against
    /// its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_json_str(&text)?;
        if let ModelConfig::File { h, positions } = &mut cfg.model {
            let base = path.parent().unwrap_or(Path::new("."));
            let fix = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            fix(h);
            positions.iter_mut().for_each(fix);
        }
        Ok(cfg)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa.unwrap_or_else(|| self.model.default_kappa())
    }

    pub fn position_count(&self) -> usize {
        self.model.position_count()
    }

    pub fn coords(&self) -> Vec<Coord> {
        self.model.coords()
    }

    /// Requested gaps, deduplicated, in canonical column order.
    pub fn gap_columns(&self) -> Vec<GapKind> {
        GapKind::ALL
            .into_iter()
            .filter(|g| self.gaps.contains(g))
            .collect()
    }

    pub fn bound_columns(&self) -> Vec<BoundColumn> {
        BoundColumn::ALL
            .into_iter()
            .filter(|b| self.bounds.contains(b))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.kappa {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::config("kappa", "must be positive and finite"));
            }
        }
        match &self.model {
            ModelConfig::Haldane {
                r_topo,
                r_trivial,
                r_lossy,
                ..
            } => {
                if !(r_topo < r_trivial && r_trivial < r_lossy) {
                    return Err(Error::config(
                        "model",
                        "radii must satisfy r_topo < r_trivial < r_lossy",
                    ));
                }
            }
            ModelConfig::File { positions, .. } => {
                if positions.is_empty() || positions.len() > 2 {
                    return Err(Error::config(
                        "model.positions",
                        "expected one or two position matrices",
                    ));
                }
            }
            ModelConfig::Tls { .. } => {}
        }
        let axes = &self.grid.axes;
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::config("grid.axes", "expected one or two swept axes"));
        }
        let coords = self.coords();
        for (i, a) in axes.iter().enumerate() {
            let path = format!("grid.axes[{i}]");
            if !coords.contains(&a.name) {
                return Err(Error::config(
                    format!("{path}.name"),
                    format!("coordinate `{}` does not exist for this model", a.name.name()),
                ));
            }
            if axes[..i].iter().any(|b| b.name == a.name) {
                return Err(Error::config(format!("{path}.name"), "axis swept twice"));
            }
            if !(a.min.is_finite() && a.max.is_finite()) {
                return Err(Error::config(path, "bounds must be finite"));
            }
            if a.steps == 0 {
                return Err(Error::config(format!("{path}.steps"), "must be at least 1"));
            }
            if a.steps == 1 && a.min != a.max {
                return Err(Error::config(
                    format!("{path}.steps"),
                    "a single step needs min == max",
                ));
            }
            if a.steps >= 2 && a.min >= a.max {
                return Err(Error::config(format!("{path}.max"), "must exceed min"));
            }
        }
        for (c, v) in &self.grid.fixed {
            let path = format!("grid.fixed.{}", c.name());
            if !coords.contains(c) {
                return Err(Error::config(path, "coordinate does not exist for this model"));
            }
            if axes.iter().any(|a| a.name == *c) {
                return Err(Error::config(path, "coordinate is also swept"));
            }
            if !v.is_finite() {
                return Err(Error::config(path, "must be finite"));
            }
        }
        for c in coords {
            if !axes.iter().any(|a| a.name == c) && !self.grid.fixed.contains_key(&c) {
                return Err(Error::config(
                    format!("grid.fixed.{}", c.name()),
                    "coordinate is neither swept nor fixed",
                ));
            }
        }
        if self.gaps.is_empty() {
            return Err(Error::config("gaps", "request at least one gap"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads", "must be at least 1"));
        }
        Ok(())
    }

    /// Worker count after applying the environment override.
    pub fn effective_threads(&self) -> Result<usize> {
        match std::env::var(THREADS_ENV) {
            Ok(v) => match v.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(Error::input(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
            },
            Err(_) => Ok(self.threads.unwrap_or_else(rayon::current_num_threads)),
        }
    }
}

/// Build the tuple a model describes, with positions scaled by `kappa`.
pub fn build_model(model: &ModelConfig, kappa: f64) -> Result<(MatrixTuple, Option<LatticeModel>)> {
    match model {
        ModelConfig::Tls {
            delta_e,
            delta_gamma,
            c,
        } => {
            let t = build_tls(&TwoLevelParams {
                delta_e: *delta_e,
                delta_gamma: *delta_gamma,
                c: *c,
            })?;
            let k = C64::new(kappa, 0.0);
            let herm = t.herm.iter().map(|a| a.mapv(|z| z * k)).collect();
            Ok((MatrixTuple::new(herm, t.nonherm)?, None))
        }
        ModelConfig::Haldane {
            r_topo,
            r_trivial,
            r_lossy,
            topological,
            trivial,
            lossy,
        } => {
            let p = HaldaneParams {
                topological: *topological,
                trivial: *trivial,
                lossy: *lossy,
                r_topo: *r_topo,
                r_trivial: *r_trivial,
                r_lossy: *r_lossy,
                kappa,
            };
            let model = build_haldane_heterostructure(&p)?;
            Ok((scaled_tuple(&model, kappa)?, Some(model)))
        }
        ModelConfig::File { h, positions } => {
            let h = read_matrix_market_file(h)?;
            let k = C64::new(kappa, 0.0);
            let herm = positions
                .iter()
                .map(|p| Ok(read_matrix_market_file(p)?.mapv(|z| z * k)))
                .collect::<Result<Vec<_>>>()?;
            Ok((MatrixTuple::new(herm, vec![h])?, None))
        }
    }
}

/// Probe site at the given coordinate values, with `lambda = kappa * (x, y)`.
pub fn probe_site(values: &BTreeMap<Coord, f64>, d1: usize, kappa: f64) -> ProbeSite {
    let pos = [Coord::X, Coord::Y];
    ProbeSite::new(
        pos[..d1].iter().map(|c| kappa * values[c]).collect(),
        vec![C64::new(values[&Coord::ReE], values[&Coord::ImE])],
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub idx: Vec<usize>,
    pub values: Vec<f64>,
}

/// A table of grid indices and floating-point columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub idx_columns: Vec<String>,
    pub value_columns: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.value_columns.iter().position(|c| c == name)
    }

    pub fn values(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let header: Vec<&str> = self
            .idx_columns
            .iter()
            .chain(&self.value_columns)
            .map(String::as_str)
            .collect();
        wr.write_record(&header)?;
        for r in &self.rows {
            let rec: Vec<String> = r
                .idx
                .iter()
                .map(|i| i.to_string())
                .chain(r.values.iter().map(|v| format!("{v:.16e}")))
                .collect();
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::input(e.to_string()))
    }

    /// Parse a CSV written by [`SweepResult::write_csv`]: columns named
    /// `idx_*` are grid indices, everything else is a float.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let header = rd.headers()?.clone();
        let n_idx = header.iter().take_while(|h| h.starts_with("idx_")).count();
        if header.iter().skip(n_idx).any(|h| h.starts_with("idx_")) {
            return Err(Error::input("index columns must come first"));
        }
        let mut rows = Vec::new();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec?;
            let bad = |col: &str, e: &dyn std::fmt::Display| {
                Error::input(format!("row {}, column `{col}`: {e}", line + 1))
            };
            let mut idx = Vec::with_capacity(n_idx);
            let mut values = Vec::with_capacity(rec.len() - n_idx);
            for (k, field) in rec.iter().enumerate() {
                if k < n_idx {
                    idx.push(field.parse::<usize>().map_err(|e| bad(&header[k], &e))?);
                } else {
                    values.push(field.parse::<f64>().map_err(|e| bad(&header[k], &e))?);
                }
            }
            rows.push(SweepRow { idx, values });
        }
        Ok(SweepResult {
            idx_columns: header.iter().take(n_idx).map(String::from).collect(),
            value_columns: header.iter().skip(n_idx).map(String::from).collect(),
            rows,
        })
    }

    pub fn read_csv_file(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)
            .map_err(|e| Error::input(format!("cannot open {}: {e}", path.display())))?;
        Self::read_csv(f)
    }
}

/// Per-tuple quantities that do not depend on the probe site: the
/// commutator sum, `|F|` (the cross term reduces to commutators of the
/// matrices, so shifting the probe cancels out) and the spectrum of the
/// skew part of `B`.
struct SiteFree {
    commutator_sum: f64,
    f_norm: f64,
    skew: SkewSpectrum,
}

struct Evaluator<'a> {
    t: &'a MatrixTuple,
    rep: CliffordRep,
    gaps: Vec<GapKind>,
    bounds: Vec<BoundColumn>,
    site_free: Option<SiteFree>,
}

struct PointValues {
    gaps: Vec<f64>,
    bounds: Vec<BoundReport>,
}

impl<'a> Evaluator<'a> {
    fn new(t: &'a MatrixTuple, cfg: &SweepConfig, any_site: &ProbeSite) -> Result<Self> {
        let rep = build_rep(t.d1())?;
        let bounds = cfg.bound_columns();
        let site_free = if bounds.is_empty() {
            None
        } else {
            Some(SiteFree {
                commutator_sum: commutator_sum_norm(t)?,
                f_norm: f_term_norm(t, any_site, &rep)?,
                skew: SkewSpectrum::new(&t.nonherm[0])?,
            })
        };
        Ok(Evaluator {
            t,
            rep,
            gaps: cfg.gap_columns(),
            bounds,
            site_free,
        })
    }

    fn eval(&self, site: &ProbeSite) -> Result<PointValues> {
        let wants = |g: GapKind| self.gaps.contains(&g);
        let needs_bound = |b: BoundColumn| self.bounds.contains(&b);
        let need_schur = wants(GapKind::Linear)
            || needs_bound(BoundColumn::LinearRadial)
            || needs_bound(BoundColumn::LinearQuadratic);
        let need_radial = wants(GapKind::Radial)
            || needs_bound(BoundColumn::LinearRadial)
            || needs_bound(BoundColumn::RadialQuadratic);
        let need_quadratic = wants(GapKind::Rq)
            || wants(GapKind::Lq)
            || wants(GapKind::Q)
            || needs_bound(BoundColumn::RadialQuadratic)
            || needs_bound(BoundColumn::LinearQuadratic);
        let need_departure =
            needs_bound(BoundColumn::LinearRadial) || needs_bound(BoundColumn::LinearQuadratic);

        let l = if need_schur || need_radial {
            Some(nh_localizer(self.t, site, &self.rep)?)
        } else {
            None
        };
        let sf = match (&l, need_schur) {
            (Some(l), true) => Some(schur(l, false)?),
            _ => None,
        };
        let linear = sf.as_ref().map(|s| min_abs_real(&s.eigenvalues()));
        let radial = match (&l, need_radial) {
            (Some(l), true) => Some(sigma_min(l)?),
            _ => None,
        };
        let quad = if need_quadratic {
            Some(quadratic_gaps(self.t, site)?)
        } else {
            None
        };
        let gaps = self
            .gaps
            .iter()
            .map(|g| match g {
                GapKind::Linear => linear.unwrap_or(f64::NAN),
                GapKind::Radial => radial.unwrap_or(f64::NAN),
                GapKind::Rq => quad.map_or(f64::NAN, |q| q.rq),
                GapKind::Lq => quad.map_or(f64::NAN, |q| q.lq),
                GapKind::Q => quad.map_or(f64::NAN, |q| q.q),
            })
            .collect();

        let mut bounds = Vec::new();
        if let Some(free) = &self.site_free {
            let l = l.as_ref().expect("localizer assembled for bounds");
            let scale = frobenius_norm(l);
            let departure = match (&sf, need_departure) {
                (Some(s), true) => departure_of(s)?.schur,
                _ => f64::NAN,
            };
            let rhs_lr = linear_radial_rhs(l.nrows(), free.skew.norm_at(site.nu[0]), departure);
            let rhs_rq = radial_quadratic_rhs(free.commutator_sum, free.f_norm);
            for b in &self.bounds {
                bounds.push(match b {
                    BoundColumn::LinearRadial => linear_radial_from_parts(
                        linear.unwrap(),
                        radial.unwrap(),
                        rhs_lr,
                        scale,
                    ),
                    BoundColumn::RadialQuadratic => radial_quadratic_from_parts(
                        radial.unwrap(),
                        quad.unwrap().q,
                        rhs_rq,
                        scale,
                    ),
                    BoundColumn::LinearQuadratic => linear_quadratic_from_parts(
                        linear.unwrap(),
                        quad.unwrap().q,
                        rhs_lr,
                        rhs_rq,
                        scale,
                    ),
                });
            }
        }
        Ok(PointValues { gaps, bounds })
    }
}

/// Grid points in lexicographic index order (first axis slowest).
pub fn grid_indices(axes: &[Axis]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for a in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..a.steps).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

fn coordinate_values(cfg: &SweepConfig, idx: &[usize]) -> BTreeMap<Coord, f64> {
    let mut v = cfg.grid.fixed.clone();
    for (a, &i) in cfg.grid.axes.iter().zip(idx) {
        v.insert(a.name, a.value(i));
    }
    v
}

/// Evaluate every requested gap (and bound) at every grid point. Rows come
/// out in grid order whatever the thread count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let (t, _) = build_model(&cfg.model, cfg.kappa())?;
    run_sweep_on(cfg, &t)
}

/// [`run_sweep`] with an already built tuple.
pub fn run_sweep_on(cfg: &SweepConfig, t: &MatrixTuple) -> Result<SweepResult> {
    cfg.validate()?;
    if t.d2() != 1 || t.d1() != cfg.position_count() {
        return Err(Error::input("tuple shape does not match the configured model"));
    }
    let kappa = cfg.kappa();
    let coords = cfg.coords();
    let points = grid_indices(&cfg.grid.axes);
    let first = probe_site(&coordinate_values(cfg, &points[0]), t.d1(), kappa);
    let ev = Evaluator::new(t, cfg, &first)?;

    let threads = cfg.effective_threads()?;
    set_blas_threads(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::input(format!("cannot start thread pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| {
        points
            .par_iter()
            .map(|idx| {
                let vals = coordinate_values(cfg, idx);
                let site = probe_site(&vals, t.d1(), kappa);
                let pv = ev.eval(&site)?;
                let mut values: Vec<f64> = coords.iter().map(|c| vals[c]).collect();
                values.extend(pv.gaps);
                for b in pv.bounds {
                    values.extend([b.lhs, b.rhs, b.slack]);
                }
                Ok(SweepRow {
                    idx: idx.clone(),
                    values,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut value_columns: Vec<String> = coords.iter().map(|c| c.name().to_string()).collect();
    value_columns.extend(cfg.gap_columns().iter().map(|g| g.column().to_string()));
    for b in cfg.bound_columns() {
        for suffix in ["lhs", "rhs", "slack"] {
            value_columns.push(format!("{}_{suffix}", b.name()));
        }
    }
    Ok(SweepResult {
        idx_columns: cfg
            .grid
            .axes
            .iter()
            .map(|a| format!("idx_{}", a.name.name()))
            .collect(),
        value_columns,
        rows,
    })
}

/// The gap record at one probe point given by coordinate values; `kappa`
/// defaults to the model's own.
pub fn gap_at(
    model: &ModelConfig,
    kappa: Option<f64>,
    values: &BTreeMap<Coord, f64>,
) -> Result<GapRecord> {
    let kappa = kappa.unwrap_or_else(|| model.default_kappa());
    let (t, _) = build_model(model, kappa)?;
    for c in model.coords() {
        if !values.contains_key(&c) {
            return Err(Error::input(format!("probe coordinate `{}` missing", c.name())));
        }
    }
    let site = probe_site(values, t.d1(), kappa);
    gap_record(&t, &site, &build_rep(t.d1())?)
}

/// Append `|a[col_a] - b[col_b]|` to a copy of `a`. The grids (index and
/// probe-coordinate columns) must agree exactly.
pub fn diff_maps(a: &SweepResult, b: &SweepResult, col_a: &str, col_b: &str) -> Result<SweepResult> {
    let ka = a
        .column(col_a)
        .ok_or_else(|| Error::input(format!("first table has no column `{col_a}`")))?;
    let kb = b
        .column(col_b)
        .ok_or_else(|| Error::input(format!("second table has no column `{col_b}`")))?;
    if a.idx_columns != b.idx_columns || a.rows.len() != b.rows.len() {
        return Err(Error::input("grids differ: index columns or row counts do not match"));
    }
    let coord_cols: Vec<(usize, usize)> = Coord::ALL
        .iter()
        .filter_map(|c| Some((a.column(c.name())?, b.column(c.name())?)))
        .collect();
    let mut out = a.clone();
    let name = format!("absdiff_{col_a}_{col_b}");
    out.value_columns.push(name);
    for (k, (ra, rb)) in a.rows.iter().zip(&b.rows).enumerate() {
        let same_coords = coord_cols
            .iter()
            .all(|&(ia, ib)| ra.values[ia] == rb.values[ib]);
        if ra.idx != rb.idx || !same_coords {
            return Err(Error::input(format!("grids differ at row {}", k + 1)));
        }
        out.rows[k].values.push((ra.values[ka] - rb.values[kb]).abs());
    }
    Ok(out)
}

/// Recompute `samples` randomly chosen rows with direct gap calls and
/// return the largest relative discrepancy over all gap columns.
pub fn verify_rows(cfg: &SweepConfig, result: &SweepResult, samples: usize, seed: u64) -> Result<f64> {
    let (t, _) = build_model(&cfg.model, cfg.kappa())?;
    let rep = build_rep(t.d1())?;
    let coords = cfg.coords();
    let mut r = crate::random::rng(seed);
    let picks = sample(&mut r, result.rows.len(), samples.min(result.rows.len()));
    let mut worst = 0.0_f64;
    for k in picks.iter() {
        let row = &result.rows[k];
        let vals: BTreeMap<Coord, f64> = coords
            .iter()
            .map(|c| (*c, row.values[result.column(c.name()).unwrap()]))
            .collect();
        let rec = gap_record(&t, &probe_site(&vals, t.d1(), cfg.kappa()), &rep)?;
        for g in cfg.gap_columns() {
            let got = row.values[result.column(g.column()).unwrap()];
            let want = g.of(&rec);
            worst = worst.max((got - want).abs() / want.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Default configuration for the two-level sweep over the energy plane at
/// `x = 0`.
pub fn tls_default_config() -> SweepConfig {
    SweepConfig {
        model: ModelConfig::tls(),
        kappa: None,
        grid: GridConfig {
            axes: vec![
                Axis {
                    name: Coord::ReE,
                    min: -3.0,
                    max: 3.0,
                    steps: 61,
                },
                Axis {
                    name: Coord::ImE,
                    min: -1.0,
                    max: 3.0,
                    steps: 41,
                },
            ],
            fixed: BTreeMap::from([(Coord::X, 0.0)]),
        },
        gaps: GapKind::ALL.to_vec(),
        bounds: BoundColumn::ALL.to_vec(),
        threads: None,
        output: None,
    }
}
