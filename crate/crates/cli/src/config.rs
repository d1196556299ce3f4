//! Run configuration. The file is sectioned `key = value` text (TOML syntax)
//! with units carried in key names, e.g. `f0_hz = 1.5e9`.

use std::fs;
use std::path::{Path, PathBuf};

use dsrfilter::dsrcell::{cm_params_from_dm, CmCellParams, DsrCellParams, Topology};
use dsrfilter::io::{CsvColumn, DataFormat, FreqUnit};
use dsrfilter::netcore::FrequencyGrid;
use dsrfilter::synth::{Convention, FilterSpec, SynthReport};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec: Option<SpecSection>,
    pub cell: Option<CellSection>,
    pub sweep: Option<SweepSection>,
    pub fit: Option<FitSection>,
    #[serde(default)]
    pub output: OutputSection,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecSection {
    pub n: usize,
    pub f0_hz: f64,
    pub fbw: f64,
    #[serde(default = "default_z0")]
    pub z0_ohm: f64,
    pub g: f64,
    pub convention: Option<String>,
    /// Optional explicit shunt-branch frequencies; both or neither.
    pub f1_hz: Option<f64>,
    pub f2_hz: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSection {
    pub topology: Option<String>,
    #[serde(default = "default_cells")]
    pub n: usize,
    #[serde(default = "default_z0")]
    pub z_ref_ohm: f64,
    pub synth_report: Option<PathBuf>,
    pub dm_l_h: Option<f64>,
    pub dm_cg_f: Option<f64>,
    pub dm_c_f: Option<f64>,
    pub dm_lc_h: Option<f64>,
    pub dm_cc_f: Option<f64>,
    pub cm_l_h: Option<f64>,
    pub cm_cg_f: Option<f64>,
    pub cm_c1_f: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSection {
    /// `dm` or `cm`.
    pub model: String,
    pub target: PathBuf,
    /// Column prefix when the target is CSV; defaults to `sdd`/`scc`.
    pub csv_prefix: Option<String>,
    pub lower: Option<Vec<f64>>,
    pub upper: Option<Vec<f64>>,
    #[serde(default = "default_bounds_factor")]
    pub bounds_factor: f64,
    pub initial: Option<Vec<f64>>,
    #[serde(default = "default_mag_weight")]
    pub mag_weight: f64,
    #[serde(default = "default_phase_weight")]
    pub phase_weight: f64,
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    #[serde(default = "default_max_restarts")]
    pub max_restarts: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
    #[serde(default = "default_unit")]
    pub unit: String,
    #[serde(default = "default_data_format")]
    pub data_format: String,
    #[serde(default = "default_columns")]
    pub csv_columns: Vec<String>,
    #[serde(default = "default_threshold")]
    pub threshold_db: f64,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            formats: default_formats(),
            unit: default_unit(),
            data_format: default_data_format(),
            csv_columns: default_columns(),
            threshold_db: default_threshold(),
        }
    }
}

fn default_z0() -> f64 {
    50.0
}
fn default_cells() -> usize {
    1
}
fn default_bounds_factor() -> f64 {
    10.0
}
fn default_mag_weight() -> f64 {
    1.0
}
fn default_phase_weight() -> f64 {
    0.1
}
fn default_max_evals() -> usize {
    5000
}
fn default_max_restarts() -> usize {
    5
}
fn default_formats() -> Vec<String> {
    ["csv", "s2p", "svg"].map(String::from).to_vec()
}
fn default_unit() -> String {
    "ghz".into()
}
fn default_data_format() -> String {
    "ma".into()
}
fn default_columns() -> Vec<String> {
    [
        "sdd21_db",
        "sdd21_deg",
        "sdd11_db",
        "scc21_db",
        "scc21_deg",
        "scc11_db",
    ]
    .map(String::from)
    .to_vec()
}
fn default_threshold() -> f64 {
    30.0
}

pub const FORMATS: [&str; 4] = ["csv", "s2p", "s4p", "svg"];

fn positive(name: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = toml::from_str(text)
            .map_err(|e| CliError::config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        if let Some(s) = &self.spec {
            positive("spec.f0_hz", s.f0_hz)?;
            positive("spec.fbw", s.fbw)?;
            positive("spec.z0_ohm", s.z0_ohm)?;
            positive("spec.g", s.g)?;
            if let Some(c) = &s.convention {
                c.parse::<Convention>()?;
            }
            match (s.f1_hz, s.f2_hz) {
                (Some(f1), Some(f2)) => {
                    positive("spec.f1_hz", f1)?;
                    positive("spec.f2_hz", f2)?;
                }
                (None, None) => {}
                _ => {
                    return Err(CliError::config(
                        "spec.f1_hz and spec.f2_hz must be given together",
                    ))
                }
            }
        }
        if let Some(c) = &self.cell {
            positive("cell.z_ref_ohm", c.z_ref_ohm)?;
            if c.n == 0 {
                return Err(CliError::config("cell.n must be >= 1"));
            }
            if let Some(t) = &c.topology {
                t.parse::<Topology>()?;
            }
            let values = [
                ("cell.dm_l_h", c.dm_l_h),
                ("cell.dm_cg_f", c.dm_cg_f),
                ("cell.dm_c_f", c.dm_c_f),
                ("cell.dm_lc_h", c.dm_lc_h),
                ("cell.dm_cc_f", c.dm_cc_f),
                ("cell.cm_l_h", c.cm_l_h),
                ("cell.cm_cg_f", c.cm_cg_f),
                ("cell.cm_c1_f", c.cm_c1_f),
            ];
            for (name, v) in values {
                if let Some(v) = v {
                    positive(name, v)?;
                }
            }
        }
        if let Some(s) = &self.sweep {
            positive("sweep.f_start_hz", s.f_start_hz)?;
            positive("sweep.f_stop_hz", s.f_stop_hz)?;
            if s.f_stop_hz <= s.f_start_hz {
                return Err(CliError::config(
                    "sweep.f_stop_hz must exceed sweep.f_start_hz",
                ));
            }
            if s.points < 2 {
                return Err(CliError::config("sweep.points must be >= 2"));
            }
        }
        if let Some(f) = &self.fit {
            if !matches!(f.model.as_str(), "dm" | "cm") {
                return Err(CliError::config(format!(
                    "fit.model must be dm or cm, got {:?}",
                    f.model
                )));
            }
            positive("fit.bounds_factor", f.bounds_factor)?;
            if f.bounds_factor <= 1.0 {
                return Err(CliError::config("fit.bounds_factor must exceed 1"));
            }
        }
        let o = &self.output;
        for fmt in &o.formats {
            if !FORMATS.contains(&fmt.as_str()) {
                return Err(CliError::config(format!(
                    "unknown output format {fmt:?} (expected one of {})",
                    FORMATS.join(", ")
                )));
            }
        }
        o.unit.parse::<FreqUnit>()?;
        o.data_format.parse::<DataFormat>()?;
        self.csv_columns()?;
        if !o.threshold_db.is_finite() {
            return Err(CliError::config("output.threshold_db must be finite"));
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn filter_spec(&self) -> CliResult<FilterSpec> {
        let s = self
            .spec
            .as_ref()
            .ok_or_else(|| CliError::config("missing [spec] section"))?;
        let spec = FilterSpec {
            order_n: s.n,
            f0: s.f0_hz,
            fbw: s.fbw,
            z0: s.z0_ohm,
            g_value: s.g,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn explicit_edges(&self) -> Option<(f64, f64)> {
        let s = self.spec.as_ref()?;
        Some((s.f1_hz?, s.f2_hz?))
    }

    pub fn convention(&self, flag: Option<Convention>) -> CliResult<Convention> {
        if let Some(c) = flag {
            return Ok(c);
        }
        match self.spec.as_ref().and_then(|s| s.convention.as_deref()) {
            Some(c) => Ok(c.parse()?),
            None => Ok(Convention::default()),
        }
    }

    pub fn cell(&self) -> CliResult<&CellSection> {
        self.cell
            .as_ref()
            .ok_or_else(|| CliError::config("missing [cell] section"))
    }

    pub fn topology(&self, flag: Option<Topology>) -> CliResult<Topology> {
        if let Some(t) = flag {
            return Ok(t);
        }
        match self.cell.as_ref().and_then(|c| c.topology.as_deref()) {
            Some(t) => Ok(t.parse()?),
            None => Ok(Topology::default()),
        }
    }

    /// Differential-mode values, either explicit or from a synthesis report.
    pub fn dm_params(&self) -> CliResult<DsrCellParams> {
        let c = self.cell()?;
        let explicit = [c.dm_l_h, c.dm_cg_f, c.dm_c_f, c.dm_lc_h, c.dm_cc_f];
        let given = explicit.iter().filter(|v| v.is_some()).count();
        match (&c.synth_report, given) {
            (Some(_), n) if n > 0 => Err(CliError::config(
                "cell.synth_report and explicit dm_* values are mutually exclusive",
            )),
            (Some(path), _) => {
                let path = self.resolve(path);
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
                let report: SynthReport = serde_json::from_str(&text)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                report.cell_params().ok_or_else(|| {
                    CliError::Infeasible(format!("{} holds an infeasible design", path.display()))
                })
            }
            (None, 5) => {
                let v: Vec<f64> = explicit.iter().map(|v| v.unwrap_or_default()).collect();
                Ok(DsrCellParams::from_slice(&v)?)
            }
            (None, 0) => Err(CliError::config(
                "no differential-mode cell values: set dm_l_h, dm_cg_f, dm_c_f, dm_lc_h, dm_cc_f or synth_report",
            )),
            (None, _) => Err(CliError::config(
                "incomplete differential-mode cell: dm_l_h, dm_cg_f, dm_c_f, dm_lc_h and dm_cc_f are all required",
            )),
        }
    }

    /// Common-mode values. Missing entries fall back to the differential
    /// cell: same line and gap, `C_1` as the series of `C` and `C_C`.
    pub fn cm_params(&self) -> CliResult<CmCellParams> {
        let c = self.cell()?;
        if let (Some(l), Some(cg), Some(c1)) = (c.cm_l_h, c.cm_cg_f, c.cm_c1_f) {
            return Ok(CmCellParams::new(l, cg, c1)?);
        }
        let dm = self.dm_params().map_err(|e| match e {
            CliError::Config(m) => CliError::config(format!(
                "common-mode cell needs cm_l_h, cm_cg_f, cm_c1_f or a differential cell to derive from ({m})"
            )),
            other => other,
        })?;
        let derived = cm_params_from_dm(
            &dm,
            c.cm_l_h.unwrap_or(dm.l_line),
            c.cm_cg_f.unwrap_or(dm.c_gap),
        )?;
        match c.cm_c1_f {
            Some(c1) => Ok(CmCellParams::new(derived.l_line, derived.c_gap, c1)?),
            None => Ok(derived),
        }
    }

    pub fn grid(&self) -> CliResult<FrequencyGrid> {
        if let Some(s) = &self.sweep {
            return Ok(FrequencyGrid::linear(s.f_start_hz, s.f_stop_hz, s.points)?);
        }
        match &self.spec {
            Some(s) => Ok(dsrfilter::filterlab::default_grid(s.f0_hz)?),
            None => Err(CliError::config(
                "missing [sweep] section (or spec.f0_hz for the default grid)",
            )),
        }
    }

    pub fn csv_columns(&self) -> CliResult<Vec<CsvColumn>> {
        self.output
            .csv_columns
            .iter()
            .map(|c| c.parse::<CsvColumn>().map_err(CliError::from))
            .collect()
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }

    pub fn freq_unit(&self) -> FreqUnit {
        self.output.unit.parse().unwrap_or(FreqUnit::GHz)
    }

    pub fn data_format(&self) -> DataFormat {
        self.output.data_format.parse().unwrap_or(DataFormat::Ma)
    }

    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        match (flag, &self.output.dir) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(d)) => self.resolve(d),
            (None, None) => PathBuf::from("."),
        }
    }
}
