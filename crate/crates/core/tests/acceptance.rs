//! Acceptance criteria for the circuit models, synthesis, network algebra,
//! fitting and file formats. Run with `--nocapture` to see one line per
//! criterion.

mod common;

use std::time::{Duration, Instant};

use common::*;
use dsrfilter::dsrcell::{
    cm_bandpass_cell, cm_params_from_dm, CmBandpassCell, CmCellParams, DsrCellParams, Topology,
};
use dsrfilter::filterlab::{build_filter, cm_rejection_scaling, sweep, SweepResult};
use dsrfilter::fitting::{fit, FitModel, FitOptions, FitProblem};
use dsrfilter::io::{
    parse_touchstone, read_csv, write_csv, write_touchstone, CsvColumn, DataFormat, FreqUnit,
    TouchstoneDocument,
};
use dsrfilter::mixedmode::{from_half_circuits, mixed_to_std4, std4_to_mixed, SParams4};
use dsrfilter::netcore::{abcd_to_s, mag_db, phase_deg, s_to_abcd, FrequencyGrid, SParams2};
use dsrfilter::synth::{
    delta_from_fbw, gap_capacitance, line_inductance, solve_shunt_branch, synthesize, Convention,
    FilterSpec, ShuntSolution,
};
use dsrfilter::{DmBandpassCell, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn ref_dm() -> DsrCellParams {
    DsrCellParams::from_slice(&REF_DM).unwrap()
}

fn ref_cm() -> CmCellParams {
    CmCellParams::from_slice(&REF_CM).unwrap()
}

fn c1_dm_peak() -> Outcome {
    let start = Instant::now();
    let grid = FrequencyGrid::linear(0.5e9, 2.5e9, 1001).unwrap();
    let filter = build_filter(
        DmBandpassCell {
            params: ref_dm(),
            topology: Topology::T,
        },
        CmBandpassCell {
            params: ref_cm(),
            topology: Topology::T,
        },
        1,
        50.0,
    )
    .unwrap();
    let sr = sweep(&filter, &grid).unwrap();
    let dd = sr.sdd21_db();
    let (ipk, peak) =
        dd.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |a, (i, &v)| if v > a.1 { (i, v) } else { a },
        );
    let f_peak = grid.points()[ipk];
    let elapsed = start.elapsed();
    check(
        (f_peak - 1.5e9).abs() <= 0.1e9 && elapsed < Duration::from_millis(100),
        format!(
            "peak |Sdd21| = {peak:.4} dB at {:.4} GHz (1.5 ± 0.1), {:.1} ms",
            f_peak / 1e9,
            elapsed.as_secs_f64() * 1e3
        ),
    )
}

fn c2_cm_rejection() -> Outcome {
    let s = abcd_to_s(
        &cm_bandpass_cell(&ref_cm(), Topology::T, 1.5e9).unwrap(),
        50.0,
    )
    .unwrap();
    let db = mag_db(s.s21);
    let alt: Vec<String> = [Topology::TFull, Topology::Gamma]
        .iter()
        .map(|&t| {
            let s = abcd_to_s(&cm_bandpass_cell(&ref_cm(), t, 1.5e9).unwrap(), 50.0).unwrap();
            format!("{t}: {:.2} dB", mag_db(s.s21))
        })
        .collect();
    check(
        db <= -20.0,
        format!(
            "|Scc21| at 1.5 GHz = {db:.3} dB (<= -20); other topologies {}",
            alt.join(", ")
        ),
    )
}

fn c3_c1_identity() -> Outcome {
    let c1 = cm_params_from_dm(&ref_dm(), REF_CM[0], REF_CM[1]).unwrap().c1;
    let rel = (c1 / 12e-12 - 1.0).abs();
    check(
        (c1 - 12.27e-12).abs() < 0.005e-12 && rel <= 0.03,
        format!("C1 = {:.4} pF, {:.2}% from 12 pF", c1 * 1e12, rel * 100.0),
    )
}

fn c4_cascade_scaling() -> Outcome {
    let cell = CmBandpassCell {
        params: ref_cm(),
        topology: Topology::T,
    };
    let table = cm_rejection_scaling(&cell, &[1, 2, 3, 4], 1.5e9, 50.0).unwrap();
    let monotone = table.windows(2).all(|w| w[1].1 > w[0].1);
    let at3 = table[2].1;
    let text: Vec<String> = table
        .iter()
        .map(|(n, r)| format!("n={n}: {r:.2} dB"))
        .collect();
    check(monotone && at3 >= 50.0, text.join(", "))
}

fn c5_synthesis_numbers() -> Outcome {
    let delta = delta_from_fbw(0.06, 1.521).unwrap();
    let cg = gap_capacitance(1.5e9, 50.0).unwrap();
    let l = line_inductance(1.5e9, cg, 50.0).unwrap();
    let w0 = 2.0 * std::f64::consts::PI * 1.5e9;
    let l_closed = 6.0 * 50.0 / w0;
    let ok = (delta - 0.0789).abs() <= 0.0005
        && (cg / 1.0610e-12 - 1.0).abs() <= 1e-3
        && (l / 31.831e-9 - 1.0).abs() <= 1e-3
        && (l - l_closed).abs() <= 4.0 * f64::EPSILON * l_closed;
    check(
        ok,
        format!(
            "delta = {:.4}%, C_g = {:.5} pF, L = {:.4} nH, |L - 6 Z0/w0| = {:.2e} H",
            delta * 100.0,
            cg * 1e12,
            l * 1e9,
            (l - l_closed).abs()
        ),
    )
}

fn c6_shunt_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_rel = 0.0_f64;
    let mut worst_res = 0.0_f64;
    for _ in 0..100 {
        let c = log_uniform(&mut rng, 1e-12, 500e-12);
        let lc = log_uniform(&mut rng, 0.1e-9, 10e-9);
        let cc = log_uniform(&mut rng, 0.5e-12, 50e-12);
        let (f0, f1, f2) = forward_conditions(c, lc, cc, 50.0);
        match solve_shunt_branch(f0, f1, f2, 50.0, Convention::PlusJ).unwrap() {
            ShuntSolution::Feasible { branch, residuals } => {
                for (a, b) in [
                    (branch.c_coup, c),
                    (branch.l_strip_half, lc),
                    (branch.c_patch, cc),
                ] {
                    worst_rel = worst_rel.max((a / b - 1.0).abs());
                }
                worst_res = worst_res.max(residuals.max());
            }
            ShuntSolution::Infeasible(d) => return Err(format!("random case infeasible: {d}")),
        }
    }

    // reference-value round trip
    let (f0, f1, f2) = forward_conditions(REF_DM[2], REF_DM[3], REF_DM[4], 50.0);
    let ref_ok = match solve_shunt_branch(f0, f1, f2, 50.0, Convention::PlusJ).unwrap() {
        ShuntSolution::Feasible { branch, .. } => {
            (branch.c_coup / REF_DM[2] - 1.0).abs() < 1e-6
                && (branch.l_strip_half / REF_DM[3] - 1.0).abs() < 1e-6
                && (branch.c_patch / REF_DM[4] - 1.0).abs() < 1e-6
        }
        ShuntSolution::Infeasible(_) => false,
    };

    let spec = FilterSpec {
        order_n: 3,
        f0: 1.5e9,
        fbw: 0.06,
        z0: 50.0,
        g_value: 1.521,
    };
    let report = synthesize(&spec, Convention::PlusJ).unwrap();
    let pinned = match &report.shunt {
        ShuntSolution::Infeasible(d) => {
            d.non_positive == ["C"] && (d.c_coup / -114.129e-12 - 1.0).abs() < 1e-4
        }
        ShuntSolution::Feasible { .. } => false,
    };
    check(
        worst_rel < 1e-6 && worst_res < 1e-9 && ref_ok && pinned,
        format!(
            "worst recovery {worst_rel:.2e}, worst residual {worst_res:.2e}, reference round trip {ref_ok}, reference design +jZ0 pinned infeasible (C < 0): {pinned}"
        ),
    )
}

fn c7_network_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut det_err, mut loss_err, mut rt_err) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let f = log_uniform(&mut rng, 1e8, 1e10);
        let net = random_reactive_cascade(&mut rng, f);
        let scale = (net.a * net.d).norm().max((net.b * net.c).norm()).max(1.0);
        det_err = det_err.max((net.determinant() - 1.0).norm() / scale);
        let s = abcd_to_s(&net, 50.0).unwrap();
        loss_err = loss_err.max((s.power_sum_port1() - 1.0).abs());
        let back = s_to_abcd(&s).unwrap();
        let mag = [
            net.a.norm(),
            net.b.norm() / 50.0,
            net.c.norm() * 50.0,
            net.d.norm(),
        ]
        .into_iter()
        .fold(1.0, f64::max);
        let diff = [
            (back.a - net.a).norm(),
            (back.b - net.b).norm() / 50.0,
            (back.c - net.c).norm() * 50.0,
            (back.d - net.d).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max);
        rt_err = rt_err.max(diff / mag);
    }
    check(
        det_err <= 1e-10 && loss_err <= 1e-9 && rt_err <= 1e-10,
        format!("max |AD-BC-1| {det_err:.2e}, max ||S11|²+|S21|²-1| {loss_err:.2e}, max round trip {rt_err:.2e}"),
    )
}

fn c8_mixed_mode() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut rt, mut cross, mut half) = (0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..500 {
        let s4 = SParams4::new(random_matrix4(&mut rng), 50.0);
        rt = rt.max(mixed_to_std4(&std4_to_mixed(&s4)).max_abs_diff(&s4));
        let sym = SParams4::new(mirror_symmetrize(&random_matrix4(&mut rng)), 50.0);
        cross = cross.max(std4_to_mixed(&sym).max_cross_mode());
        let mk = |rng: &mut ChaCha8Rng| SParams2 {
            s11: random_complex(rng),
            s12: random_complex(rng),
            s21: random_complex(rng),
            s22: random_complex(rng),
            z_ref: 50.0,
        };
        let (dm, cm) = (mk(&mut rng), mk(&mut rng));
        let back = std4_to_mixed(&mixed_to_std4(&from_half_circuits(&dm, &cm).unwrap()));
        half = half
            .max(back.sdd.max_abs_diff(&dm))
            .max(back.scc.max_abs_diff(&cm));
    }
    check(
        rt < 1e-12 && cross < 1e-10 && half < 1e-12,
        format!(
            "round trip {rt:.2e}, symmetric cross-mode {cross:.2e}, half-circuit blocks {half:.2e}"
        ),
    )
}

fn c9_fitting() -> Outcome {
    let model = FitModel::DmBandpass(Topology::T);
    let freqs: Vec<f64> = (0..201).map(|i| 0.5e9 + 1e7 * i as f64).collect();
    let target = freqs
        .iter()
        .map(|&f| model.response(&REF_DM, f, 50.0).unwrap())
        .collect();
    let problem = FitProblem::new(
        model,
        REF_DM.iter().map(|v| v / 10.0).collect(),
        REF_DM.iter().map(|v| v * 10.0).collect(),
        freqs,
        target,
    )
    .unwrap();
    let init: Vec<f64> = REF_DM.iter().map(|v| v * 1.2).collect();
    let opts = FitOptions {
        max_evals: 5000,
        ..FitOptions::default()
    };
    let r = fit(&problem, &init, &opts).unwrap();
    let worst = r
        .params
        .iter()
        .zip(REF_DM)
        .map(|(a, b)| (a / b - 1.0).abs())
        .fold(0.0, f64::max);
    let monotone = r.trace.windows(2).all(|w| w[1] <= w[0]);
    check(
        worst <= 0.01 && r.evaluations <= 5000 && monotone,
        format!(
            "worst parameter error {:.2e}, {} evaluations, cost {:.2e}, monotone trace {monotone}",
            worst, r.evaluations, r.cost
        ),
    )
}

fn c10_io_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let freqs: Vec<f64> = (0..7).map(|i| 0.37e9 * (i as f64 + 1.0) + 1234.5).collect();
    let two: Vec<SParams2> = (0..7)
        .map(|_| SParams2 {
            s11: random_complex(&mut rng),
            s12: random_complex(&mut rng),
            s21: random_complex(&mut rng),
            s22: random_complex(&mut rng),
            z_ref: 50.0,
        })
        .collect();
    let four: Vec<SParams4> = (0..7)
        .map(|_| SParams4::new(random_matrix4(&mut rng), 50.0))
        .collect();
    let docs = [
        TouchstoneDocument::from_two_ports(&freqs, &two, vec!["two".into()]).unwrap(),
        TouchstoneDocument::from_four_ports(&freqs, &four, vec!["four".into()]).unwrap(),
    ];
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for doc in &docs {
        for fmt in [DataFormat::Ri, DataFormat::Ma, DataFormat::Db] {
            for unit in [FreqUnit::Hz, FreqUnit::KHz, FreqUnit::MHz, FreqUnit::GHz] {
                let back = parse_touchstone(&write_touchstone(doc, fmt, unit), doc.ports)
                    .map_err(|e| format!("re-parse failed: {e}"))?;
                for (a, b) in back.freqs.iter().zip(&doc.freqs) {
                    worst = worst.max((a / b - 1.0).abs());
                }
                for (ma, mb) in back.data.iter().zip(&doc.data) {
                    for (a, b) in ma.iter().zip(mb) {
                        worst = worst.max((a - b).norm() / b.norm());
                    }
                }
                cases += 1;
            }
        }
    }

    // CSV
    let grid = FrequencyGrid::new(freqs.clone()).unwrap();
    let sr = SweepResult::new(grid, two.clone(), two.iter().rev().copied().collect()).unwrap();
    let cols: Vec<CsvColumn> = ["sdd21_db", "sdd21_deg", "scc11_re", "scc11_im"]
        .iter()
        .map(|c| c.parse().unwrap())
        .collect();
    let table = read_csv(&write_csv(&sr, &cols).unwrap()).map_err(|e| e.to_string())?;
    let mut csv_worst = 0.0_f64;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
    for (i, row) in table.rows.iter().enumerate() {
        csv_worst = csv_worst
            .max(rel(row[0], freqs[i]))
            .max(rel(row[1], mag_db(sr.dm[i].s21)))
            .max(rel(row[2], phase_deg(sr.dm[i].s21)))
            .max(rel(row[3], sr.cm[i].s11.re))
            .max(rel(row[4], sr.cm[i].s11.im));
    }

    let malformed = [
        ("# GHz S MA R 50\n1 0 0 1 0\n", 2, 2),
        ("# GHz S QQ R 50\n", 2, 1),
        (
            "# GHz S RI R 50\n1 0 0 1 0 1 0 0 0\n1 0 0 1 0 1 0 0 0\n",
            2,
            3,
        ),
        (
            "# GHz S RI R 50\n1 0 0 1 0 0 0 0 0\n0 0 0 0 0 0 0 0\n",
            4,
            2,
        ),
    ];
    let line_numbered = malformed.iter().all(|(text, ports, line)| {
        matches!(parse_touchstone(text, *ports), Err(Error::Parse { line: l, .. }) if l == *line)
    }) && matches!(read_csv("freq_hz,x\n1,oops\n"), Err(Error::Parse { line: 2, .. }));

    check(
        worst <= 1e-8 && csv_worst <= 1e-8 && line_numbered,
        format!(
            "{cases} Touchstone cases, worst rel err {worst:.2e}; CSV worst rel err {csv_worst:.2e}; line-numbered errors {line_numbered}"
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("1 DM unit-cell passband near 1.5 GHz", c1_dm_peak),
        ("2 CM unit-cell rejection at 1.5 GHz", c2_cm_rejection),
        ("3 C1 series-capacitance identity", c3_c1_identity),
        (
            "4 CM rejection grows with cascade length",
            c4_cascade_scaling,
        ),
        ("5 synthesis numbers", c5_synthesis_numbers),
        ("6 shunt-branch solver oracle", c6_shunt_solver),
        ("7 network algebra properties", c7_network_algebra),
        ("8 mixed-mode properties", c8_mixed_mode),
        ("9 fitting recovery", c9_fitting),
        ("10 I/O round trips", c10_io_round_trips),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("[PASS] {name}: {detail}"),
            Err(detail) => {
                println!("[FAIL] {name}: {detail}");
                failed.push(name);
            }
        }
    }
    println!("acceptance total: {:.2} s", start.elapsed().as_secs_f64());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn three_cell_fixture_metrics() {
    // documentation fixture for the three-cell filter; the lossless model
    // has no ohmic loss so only IL ≈ 0 is meaningful
    let filter = build_filter(
        DmBandpassCell {
            params: ref_dm(),
            topology: Topology::T,
        },
        CmBandpassCell {
            params: ref_cm(),
            topology: Topology::T,
        },
        3,
        50.0,
    )
    .unwrap();
    let grid = dsrfilter::filterlab::default_grid(1.5e9).unwrap();
    let m = dsrfilter::filterlab::metrics(&sweep(&filter, &grid).unwrap(), 30.0).unwrap();
    println!(
        "three-cell: f0d {:.4} GHz, FBW {:.2}%, IL {:.4} dB, CM rejection {:.1} dB, CMRR {:.1} dB, |Scc21| <= -30 dB over {:?} f0d",
        m.f0d / 1e9,
        m.fbw * 100.0,
        m.il_db,
        m.cm_rejection_db,
        m.cmrr_db,
        m.cm_supp_band_rel()
    );
    assert!(m.il_db.abs() < 0.01);
    assert!(m.cm_rejection_db > 57.0);
    assert!((m.f0d - 1.5e9).abs() < 0.1e9);
}
