use std::fs;
use std::path::{Path, PathBuf};

use dsrfilter::dsrcell::{CmBandpassCell, DmBandpassCell, Topology};
use dsrfilter::filterlab::{build_filter, metrics, sweep, FilterMetrics, SweepResult};
use dsrfilter::fitting::{fit, FitModel, FitOptions, FitProblem};
use dsrfilter::io::{
    parse_touchstone, read_csv, sparams_from_csv, write_csv, write_touchstone, CsvColumn,
    DataFormat, FreqUnit, TouchstoneDocument,
};
use dsrfilter::mixedmode::{from_half_circuits, mixed_to_std4, parse_port_map, std4_to_mixed};
use dsrfilter::netcore::{abcd_to_s, mag_db, FrequencyGrid, SParams2};
use dsrfilter::synth::{synthesize, synthesize_with_edges, Convention, ShuntSolution};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::svg::{magnitude_plot, Series};

/// Options shared by every subcommand.
#[derive(Debug, Default)]
pub struct Flags {
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub topology: Option<Topology>,
    pub convention: Option<Convention>,
    pub port_map: Option<String>,
    pub threshold_db: Option<f64>,
}

impl Flags {
    fn load_config(&self) -> CliResult<RunConfig> {
        match &self.config {
            Some(p) => RunConfig::load(p),
            None => Err(CliError::config(
                "--config PATH is required for this command",
            )),
        }
    }

    fn optional_config(&self) -> CliResult<RunConfig> {
        match &self.config {
            Some(p) => RunConfig::load(p),
            None => Ok(RunConfig::default()),
        }
    }

    fn threshold(&self, cfg: &RunConfig) -> CliResult<f64> {
        let t = self.threshold_db.unwrap_or(cfg.output.threshold_db);
        if t.is_finite() {
            Ok(t)
        } else {
            Err(CliError::config("--threshold-db must be finite"))
        }
    }
}

/// Formats a value with an SI prefix, e.g. `1.0610 pF`.
pub fn si(v: f64, unit: &str) -> String {
    const PREFIXES: [(f64, &str); 9] = [
        (1e9, "G"),
        (1e6, "M"),
        (1e3, "k"),
        (1.0, ""),
        (1e-3, "m"),
        (1e-6, "u"),
        (1e-9, "n"),
        (1e-12, "p"),
        (1e-15, "f"),
    ];
    let a = v.abs();
    let (scale, p) = PREFIXES
        .iter()
        .copied()
        .find(|(s, _)| a >= *s)
        .unwrap_or((1e-15, "f"));
    format!("{:.4} {p}{unit}", v / scale)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(dsrfilter::Error) -> CliError + '_ {
    move |e| match e {
        dsrfilter::Error::Metrics(m) => CliError::Metrics(m),
        other => CliError::config(format!("{}: {other}", path.display())),
    }
}

pub fn cmd_synth(flags: &Flags) -> CliResult<()> {
    let cfg = flags.load_config()?;
    let spec = cfg.filter_spec()?;
    let conv = cfg.convention(flags.convention)?;
    let report = match cfg.explicit_edges() {
        Some((f1, f2)) => synthesize_with_edges(&spec, f1, f2, conv)?,
        None => synthesize(&spec, conv)?,
    };

    println!("synthesis ({conv} convention)");
    println!("  order n        {}", spec.order_n);
    println!("  f0             {}", si(spec.f0, "Hz"));
    println!("  FBW            {:.4} %", spec.fbw * 100.0);
    println!("  g              {}", spec.g_value);
    println!("  Z0             {} ohm", spec.z0);
    println!("  delta          {:.4} %", report.delta * 100.0);
    println!(
        "  f1, f2         {}, {}",
        si(report.f1, "Hz"),
        si(report.f2, "Hz")
    );
    println!("  C_g            {}", si(report.c_gap, "F"));
    println!("  L              {}", si(report.l_line, "H"));

    let json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    let dir = cfg.out_dir(flags.out.as_deref());
    match &report.shunt {
        ShuntSolution::Feasible { branch, residuals } => {
            println!("  C              {}", si(branch.c_coup, "F"));
            println!("  L_C            {}", si(branch.l_strip_half, "H"));
            println!("  C_C            {}", si(branch.c_patch, "F"));
            println!("  max residual   {:.3e}", residuals.max());
            write_file(&dir, "synth_report.json", &json)?;
            Ok(())
        }
        ShuntSolution::Infeasible(d) => {
            println!("  shunt branch   INFEASIBLE");
            println!("  C              {}", si(d.c_coup, "F"));
            println!("  L_C            {}", si(d.l_strip_half, "H"));
            println!("  C_C            {}", si(d.c_patch, "F"));
            write_file(&dir, "synth_report.json", &json)?;
            Err(CliError::Infeasible(format!(
                "non-positive element(s) {} ({})",
                d.non_positive.join(", "),
                d.sign_pattern
            )))
        }
    }
}

fn simulate(cfg: &RunConfig, flags: &Flags) -> CliResult<SweepResult> {
    let topology = cfg.topology(flags.topology)?;
    let cell = cfg.cell()?;
    let dm = DmBandpassCell {
        params: cfg.dm_params()?,
        topology,
    };
    let cm = CmBandpassCell {
        params: cfg.cm_params()?,
        topology,
    };
    let filter = build_filter(dm, cm, cell.n, cell.z_ref_ohm)?;
    Ok(sweep(&filter, &cfg.grid()?)?)
}

fn peak(freqs: &[f64], vals: &[f64]) -> (f64, f64) {
    freqs
        .iter()
        .zip(vals)
        .fold((f64::NAN, f64::NEG_INFINITY), |best, (&f, &v)| {
            if v > best.1 {
                (f, v)
            } else {
                best
            }
        })
}

fn two_port_doc(freqs: &[f64], s: &[SParams2], comment: &str) -> CliResult<TouchstoneDocument> {
    Ok(TouchstoneDocument::from_two_ports(
        freqs,
        s,
        vec![comment.to_string()],
    )?)
}

pub fn cmd_sim(flags: &Flags) -> CliResult<()> {
    let cfg = flags.load_config()?;
    let sr = simulate(&cfg, flags)?;
    let topology = cfg.topology(flags.topology)?;
    let cell = cfg.cell()?;
    let freqs = sr.freqs().to_vec();
    let dd = sr.sdd21_db();
    let cc = sr.scc21_db();
    let dir = cfg.out_dir(flags.out.as_deref());
    let (fmt, unit) = (cfg.data_format(), cfg.freq_unit());

    println!(
        "simulated {} cell(s), topology {topology}, {} points from {} to {}",
        cell.n,
        freqs.len(),
        si(freqs[0], "Hz"),
        si(freqs[freqs.len() - 1], "Hz")
    );
    let (fp, vp) = peak(&freqs, &dd);
    println!("  peak |Sdd21|   {vp:.4} dB at {}", si(fp, "Hz"));
    if let Some(spec) = &cfg.spec {
        let cm = CmBandpassCell {
            params: cfg.cm_params()?,
            topology,
        };
        let net = dsrfilter::Cell::abcd(&cm, spec.f0_hz)?.pow(cell.n);
        let s = abcd_to_s(&net, cell.z_ref_ohm)?;
        println!("  |Scc21| at f0  {:.4} dB", mag_db(s.s21));
    }

    if cfg.wants("csv") {
        write_file(&dir, "sweep.csv", &write_csv(&sr, &cfg.csv_columns()?)?)?;
    }
    if cfg.wants("s2p") {
        let dm = two_port_doc(&freqs, &sr.dm, "differential-mode response")?;
        let cm = two_port_doc(&freqs, &sr.cm, "common-mode response")?;
        write_file(&dir, "dm.s2p", &write_touchstone(&dm, fmt, unit))?;
        write_file(&dir, "cm.s2p", &write_touchstone(&cm, fmt, unit))?;
    }
    if cfg.wants("s4p") {
        let s4 = sr
            .dm
            .iter()
            .zip(&sr.cm)
            .map(|(d, c)| Ok(mixed_to_std4(&from_half_circuits(d, c)?)))
            .collect::<CliResult<Vec<_>>>()?;
        let doc = TouchstoneDocument::from_four_ports(
            &freqs,
            &s4,
            vec!["four-port response, ports 1/2 input pair, 3/4 output pair".into()],
        )?;
        write_file(&dir, "filter.s4p", &write_touchstone(&doc, fmt, unit))?;
    }
    if cfg.wants("svg") {
        let series = [
            Series {
                label: "|Sdd21| (dB)",
                color: "#1f4e9c",
                values: &dd,
            },
            Series {
                label: "|Scc21| (dB)",
                color: "#c0392b",
                values: &cc,
            },
        ];
        let title = format!("{}-cell response, topology {topology}", cell.n);
        write_file(
            &dir,
            "response.svg",
            &magnitude_plot(&title, &freqs, &series),
        )?;
    }

    let threshold = flags.threshold(&cfg)?;
    match metrics(&sr, threshold) {
        Ok(m) => {
            print_metrics(&m, cfg.spec.as_ref().map(|s| s.fbw));
            write_file(&dir, "metrics.csv", &metrics_csv(&m))?;
        }
        Err(e) => println!("metrics unavailable: {e}"),
    }
    Ok(())
}

fn print_metrics(m: &FilterMetrics, target_fbw: Option<f64>) {
    println!("metrics");
    println!("  f0d            {}", si(m.f0d, "Hz"));
    println!(
        "  3-dB band      {} .. {}",
        si(m.band3db.0, "Hz"),
        si(m.band3db.1, "Hz")
    );
    match target_fbw {
        Some(t) => println!(
            "  FBW            {:.3} % (target {:.3} %, diff {:+.3} %)",
            m.fbw * 100.0,
            t * 100.0,
            (m.fbw - t) * 100.0
        ),
        None => println!("  FBW            {:.3} %", m.fbw * 100.0),
    }
    println!("  IL             {:.4} dB", m.il_db);
    println!("  CM rejection   {:.2} dB", m.cm_rejection_db);
    println!("  CMRR (min)     {:.2} dB", m.cmrr_db);
    println!("  CMRR at f0d    {:.2} dB", m.cmrr_at_f0d_db);
    match m.cm_supp_band_rel() {
        Some((lo, hi)) => println!(
            "  |Scc21| <= -{:.0} dB from {lo:.3} f0d to {hi:.3} f0d",
            m.cm_threshold_db
        ),
        None => println!(
            "  |Scc21| never reaches -{:.0} dB around f0d",
            m.cm_threshold_db
        ),
    }
}

fn metrics_csv(m: &FilterMetrics) -> String {
    let (slo, shi) = m
        .cm_supp_band_rel()
        .map_or((String::new(), String::new()), |(a, b)| {
            (a.to_string(), b.to_string())
        });
    let rows = [
        ("f0d_hz", m.f0d.to_string()),
        ("f_lo_3db_hz", m.band3db.0.to_string()),
        ("f_hi_3db_hz", m.band3db.1.to_string()),
        ("fbw", m.fbw.to_string()),
        ("il_db", m.il_db.to_string()),
        ("cm_rejection_db", m.cm_rejection_db.to_string()),
        ("cmrr_db", m.cmrr_db.to_string()),
        ("cmrr_at_f0d_db", m.cmrr_at_f0d_db.to_string()),
        ("cm_threshold_db", m.cm_threshold_db.to_string()),
        ("cm_supp_lo_f0d", slo),
        ("cm_supp_hi_f0d", shi),
    ];
    let mut out = String::from("metric,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    out
}

fn read_two_port(path: &Path) -> CliResult<(Vec<f64>, Vec<SParams2>)> {
    let text = read_file(path)?;
    let doc = parse_touchstone(&text, 2).map_err(with_path(path))?;
    let s = doc.to_two_ports().map_err(with_path(path))?;
    Ok((doc.freqs, s))
}

pub fn cmd_metrics(flags: &Flags, dm: Option<&Path>, cm: Option<&Path>) -> CliResult<()> {
    let cfg = flags.optional_config()?;
    let sr = match (dm, cm) {
        (Some(d), Some(c)) => {
            let (fd, sd) = read_two_port(d)?;
            let (fc, sc) = read_two_port(c)?;
            if fd != fc {
                return Err(CliError::config(
                    "differential and common-mode files have different frequency points",
                ));
            }
            SweepResult::new(FrequencyGrid::new(fd)?, sd, sc)?
        }
        (None, None) => {
            if flags.config.is_none() {
                return Err(CliError::config(
                    "metrics needs --config or both --dm and --cm",
                ));
            }
            simulate(&cfg, flags)?
        }
        _ => return Err(CliError::config("--dm and --cm must be given together")),
    };
    let m = metrics(&sr, flags.threshold(&cfg)?)?;
    print_metrics(&m, cfg.spec.as_ref().map(|s| s.fbw));
    write_file(
        &cfg.out_dir(flags.out.as_deref()),
        "metrics.csv",
        &metrics_csv(&m),
    )?;
    Ok(())
}

#[derive(Serialize)]
struct FittedParam<'a> {
    name: &'a str,
    value: f64,
    initial: f64,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct FitReport<'a> {
    model: &'a str,
    topology: String,
    target: String,
    parameters: Vec<FittedParam<'a>>,
    initial_cost: f64,
    cost: f64,
    iterations: usize,
    evaluations: usize,
    restarts: usize,
    converged: bool,
}

fn read_target(cfg: &RunConfig, path: &Path, prefix: &str) -> CliResult<(Vec<f64>, Vec<SParams2>)> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("s2p") => read_two_port(path),
        Some("csv") => {
            let z_ref = cfg.cell.as_ref().map_or(50.0, |c| c.z_ref_ohm);
            let table = read_csv(&read_file(path)?).map_err(with_path(path))?;
            sparams_from_csv(&table, prefix, z_ref).map_err(with_path(path))
        }
        _ => Err(CliError::config(format!(
            "fit target {} must be .s2p or .csv",
            path.display()
        ))),
    }
}

pub fn cmd_fit(flags: &Flags) -> CliResult<()> {
    let cfg = flags.load_config()?;
    let fit_cfg = cfg
        .fit
        .as_ref()
        .ok_or_else(|| CliError::config("missing [fit] section"))?;
    let topology = cfg.topology(flags.topology)?;
    let (model, initial) = match fit_cfg.model.as_str() {
        "dm" => (
            FitModel::DmBandpass(topology),
            match &fit_cfg.initial {
                Some(v) => v.clone(),
                None => cfg.dm_params()?.to_array().to_vec(),
            },
        ),
        _ => (
            FitModel::CmBandpass(topology),
            match &fit_cfg.initial {
                Some(v) => v.clone(),
                None => cfg.cm_params()?.to_array().to_vec(),
            },
        ),
    };
    let n = model.n_params();
    if initial.len() != n {
        return Err(CliError::config(format!(
            "fit.initial needs {n} values, got {}",
            initial.len()
        )));
    }
    let lower = fit_cfg
        .lower
        .clone()
        .unwrap_or_else(|| initial.iter().map(|v| v / fit_cfg.bounds_factor).collect());
    let upper = fit_cfg
        .upper
        .clone()
        .unwrap_or_else(|| initial.iter().map(|v| v * fit_cfg.bounds_factor).collect());

    let target_path = cfg.resolve(&fit_cfg.target);
    let prefix = fit_cfg
        .csv_prefix
        .clone()
        .unwrap_or_else(|| if fit_cfg.model == "dm" { "sdd" } else { "scc" }.to_string());
    let (freqs, target) = read_target(&cfg, &target_path, &prefix)?;

    let problem = FitProblem::new(model, lower.clone(), upper.clone(), freqs, target)?
        .with_objective_mix(fit_cfg.mag_weight, fit_cfg.phase_weight)?;
    if !problem.within_bounds(&initial) {
        return Err(CliError::config(
            "initial parameters lie outside the fit bounds",
        ));
    }
    let opts = FitOptions {
        max_evals: fit_cfg.max_evals,
        max_restarts: fit_cfg.max_restarts,
        ..FitOptions::default()
    };
    let r = fit(&problem, &initial, &opts)?;

    println!("fit ({} model, topology {topology})", fit_cfg.model);
    println!("  initial cost   {:.6e}", r.initial_cost);
    println!("  final cost     {:.6e}", r.cost);
    println!(
        "  evaluations    {} ({} iterations, {} restarts)",
        r.evaluations, r.iterations, r.restarts
    );
    let names = model.param_names();
    for (i, name) in names.iter().enumerate() {
        let unit = if name.starts_with('L') { "H" } else { "F" };
        println!(
            "  {name:<5} {:>14}  (start {})",
            si(r.params[i], unit),
            si(initial[i], unit)
        );
    }

    let report = FitReport {
        model: &fit_cfg.model,
        topology: topology.to_string(),
        target: fit_cfg.target.display().to_string(),
        parameters: names
            .iter()
            .enumerate()
            .map(|(i, name)| FittedParam {
                name,
                value: r.params[i],
                initial: initial[i],
                lower: lower[i],
                upper: upper[i],
            })
            .collect(),
        initial_cost: r.initial_cost,
        cost: r.cost,
        iterations: r.iterations,
        evaluations: r.evaluations,
        restarts: r.restarts,
        converged: r.converged,
    };
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    write_file(&cfg.out_dir(flags.out.as_deref()), "fit_result.json", &json)?;
    if r.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "budget of {} evaluations exhausted, cost {:.3e}",
            opts.max_evals, r.cost
        )))
    }
}

pub fn cmd_mm(flags: &Flags, input: &Path) -> CliResult<()> {
    let cfg = flags.optional_config()?;
    let map = parse_port_map(flags.port_map.as_deref().unwrap_or("1,2,3,4"))?;
    let text = read_file(input)?;
    let doc = parse_touchstone(&text, 4).map_err(with_path(input))?;
    let mut sdd = Vec::with_capacity(doc.freqs.len());
    let mut scc = Vec::with_capacity(doc.freqs.len());
    let mut cross = 0.0_f64;
    for s4 in doc.to_four_ports()? {
        let mm = std4_to_mixed(&s4.permuted(map)?);
        cross = cross.max(mm.max_cross_mode());
        sdd.push(mm.sdd);
        scc.push(mm.scc);
    }
    let freqs = doc.freqs.clone();
    let (fmt, unit) = if flags.config.is_some() {
        (cfg.data_format(), cfg.freq_unit())
    } else {
        (DataFormat::Ma, FreqUnit::GHz)
    };
    let dir = cfg.out_dir(flags.out.as_deref());
    let map_text: Vec<String> = map.iter().map(|p| (p + 1).to_string()).collect();
    println!(
        "mixed-mode conversion of {} ({} points, port map {})",
        input.display(),
        freqs.len(),
        map_text.join(",")
    );
    println!("  max cross-mode |Sdc|,|Scd|  {cross:.3e}");

    let dd = two_port_doc(&freqs, &sdd, "differential-mode block")?;
    let cd = two_port_doc(&freqs, &scc, "common-mode block")?;
    write_file(&dir, "sdd.s2p", &write_touchstone(&dd, fmt, unit))?;
    write_file(&dir, "scc.s2p", &write_touchstone(&cd, fmt, unit))?;
    let sr = SweepResult::new(FrequencyGrid::new(freqs)?, sdd, scc)?;
    let cols: Vec<CsvColumn> = if flags.config.is_some() {
        cfg.csv_columns()?
    } else {
        [
            "sdd11_db",
            "sdd21_db",
            "sdd21_deg",
            "scc11_db",
            "scc21_db",
            "scc21_deg",
        ]
        .iter()
        .map(|c| c.parse())
        .collect::<Result<_, _>>()?
    };
    write_file(&dir, "mixed.csv", &write_csv(&sr, &cols)?)?;
    Ok(())
}
