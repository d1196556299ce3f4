//! Extraction of cell element values from S-parameter data.
//!
//! The cost compares dB magnitudes of S11 and S21 and, optionally, their
//! phases in degrees. Minimization uses a Nelder–Mead simplex in
//! log-parameter space: positivity is structural and the box bounds
//! become simple clipping.

use serde::{Deserialize, Serialize};

use crate::dsrcell::{cm_bandpass_cell, dm_bandpass_cell, CmCellParams, DsrCellParams, Topology};
use crate::error::{Error, Result};
use crate::netcore::{abcd_to_s, mag_db, phase_deg, SParams2};

/// dB values below this are clamped before differencing.
pub const DB_CLAMP: f64 = -100.0;

/// Circuit whose elements are being fitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "cell", content = "topology", rename_all = "snake_case")]
pub enum FitModel {
    /// `[L, C_g, C, L_C, C_C]`
    DmBandpass(Topology),
    /// `[L, C_g, C_1]`
    CmBandpass(Topology),
}

impl FitModel {
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            FitModel::DmBandpass(_) => &DsrCellParams::NAMES,
            FitModel::CmBandpass(_) => &CmCellParams::NAMES,
        }
    }

    pub fn n_params(&self) -> usize {
        self.param_names().len()
    }

    pub fn response(&self, params: &[f64], f: f64, z_ref: f64) -> Result<SParams2> {
        let net = match *self {
            FitModel::DmBandpass(topo) => {
                dm_bandpass_cell(&DsrCellParams::from_slice(params)?, topo, f)?
            }
            FitModel::CmBandpass(topo) => {
                cm_bandpass_cell(&CmCellParams::from_slice(params)?, topo, f)?
            }
        };
        abcd_to_s(&net, z_ref)
    }
}

fn wrap_deg(d: f64) -> f64 {
    let r = d.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

fn clamped_db(s: num_complex::Complex64) -> f64 {
    mag_db(s).max(DB_CLAMP)
}

/// Unweighted cost of one frequency point.
pub fn point_cost(model: &SParams2, target: &SParams2, mag_weight: f64, phase_weight: f64) -> f64 {
    let d21 = clamped_db(model.s21) - clamped_db(target.s21);
    let d11 = clamped_db(model.s11) - clamped_db(target.s11);
    let mut cost = mag_weight * (d21 * d21 + d11 * d11);
    if phase_weight != 0.0 {
        let p21 = wrap_deg(phase_deg(model.s21) - phase_deg(target.s21));
        let p11 = wrap_deg(phase_deg(model.s11) - phase_deg(target.s11));
        cost += phase_weight * (p21 * p21 + p11 * p11);
    }
    cost
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitProblem {
    pub model: FitModel,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub freqs: Vec<f64>,
    pub target: Vec<SParams2>,
    pub weights: Vec<f64>,
    pub mag_weight: f64,
    pub phase_weight: f64,
}

impl FitProblem {
    /// Unit weights, magnitude weight 1 and phase weight 0.1.
    pub fn new(
        model: FitModel,
        lower: Vec<f64>,
        upper: Vec<f64>,
        freqs: Vec<f64>,
        target: Vec<SParams2>,
    ) -> Result<Self> {
        let weights = vec![1.0; freqs.len()];
        let p = FitProblem {
            model,
            lower,
            upper,
            freqs,
            target,
            weights,
            mag_weight: 1.0,
            phase_weight: 0.1,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        self.weights = weights;
        self.validate()?;
        Ok(self)
    }

    pub fn with_objective_mix(mut self, mag_weight: f64, phase_weight: f64) -> Result<Self> {
        self.mag_weight = mag_weight;
        self.phase_weight = phase_weight;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.model.n_params();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::usage(format!(
                "model has {n} parameters but bounds have {} / {} entries",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (i, (lo, hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && lo < hi) {
                return Err(Error::usage(format!(
                    "bounds for {} must satisfy 0 < lower < upper, got [{lo}, {hi}]",
                    self.model.param_names()[i]
                )));
            }
        }
        if self.target.len() != self.freqs.len() || self.weights.len() != self.freqs.len() {
            return Err(Error::usage("target, frequency and weight lengths differ"));
        }
        if self.freqs.len() < 2 * n {
            return Err(Error::usage(format!(
                "need at least {} target points for {n} parameters, got {}",
                2 * n,
                self.freqs.len()
            )));
        }
        if self.freqs.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
            return Err(Error::usage("target frequencies must be > 0"));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::usage("weights must be finite and >= 0"));
        }
        if !(self.mag_weight >= 0.0 && self.phase_weight >= 0.0) {
            return Err(Error::usage("objective weights must be >= 0"));
        }
        Ok(())
    }

    pub fn within_bounds(&self, params: &[f64]) -> bool {
        params.len() == self.lower.len()
            && params
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(p, (lo, hi))| p >= lo && p <= hi)
    }
}

/// Weighted sum of [`point_cost`] over all target points.
pub fn objective(params: &[f64], problem: &FitProblem) -> Result<f64> {
    if !problem.within_bounds(params) {
        return Err(Error::usage("parameters outside bounds"));
    }
    let mut total = 0.0;
    for ((&f, target), &w) in problem
        .freqs
        .iter()
        .zip(&problem.target)
        .zip(&problem.weights)
    {
        if w == 0.0 {
            continue;
        }
        let model = problem.model.response(params, f, target.z_ref)?;
        total += w * point_cost(&model, target, problem.mag_weight, problem.phase_weight);
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Objective evaluation budget over all restarts.
    pub max_evals: usize,
    pub max_restarts: usize,
    /// Initial simplex edge in natural-log units.
    pub initial_step: f64,
    /// Simplex diameter (log units) at which a run stops.
    pub xtol: f64,
    /// Relative cost spread at which a run stops.
    pub ftol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_evals: 5000,
            max_restarts: 5,
            initial_step: 0.1,
            xtol: 1e-9,
            ftol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Vec<f64>,
    pub cost: f64,
    pub initial_cost: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub restarts: usize,
    pub converged: bool,
    /// Best cost after each simplex iteration.
    pub trace: Vec<f64>,
}

struct Evaluator<'a> {
    problem: &'a FitProblem,
    lo: Vec<f64>,
    hi: Vec<f64>,
    evals: usize,
    max_evals: usize,
    /// Best point seen so far, as (log point, natural params, cost).
    best: (Vec<f64>, Vec<f64>, f64),
}

impl Evaluator<'_> {
    fn clip(&self, u: &mut [f64]) {
        for ((x, lo), hi) in u.iter_mut().zip(&self.lo).zip(&self.hi) {
            *x = x.clamp(*lo, *hi);
        }
    }

    fn exhausted(&self) -> bool {
        self.evals >= self.max_evals
    }

    fn cost(&mut self, u: &[f64]) -> f64 {
        self.evals += 1;
        // exp(ln x) may land one ulp outside the box
        let p: Vec<f64> = u
            .iter()
            .zip(self.problem.lower.iter().zip(&self.problem.upper))
            .map(|(x, (lo, hi))| x.exp().clamp(*lo, *hi))
            .collect();
        let c = objective(&p, self.problem).unwrap_or(f64::INFINITY);
        let c = if c.is_nan() { f64::INFINITY } else { c };
        if c < self.best.2 {
            self.best = (u.to_vec(), p, c);
        }
        c
    }
}

enum RunEnd {
    Converged,
    Budget,
}

fn nelder_mead(
    ev: &mut Evaluator,
    start: &[f64],
    opts: &FitOptions,
    trace: &mut Vec<f64>,
    iters: &mut usize,
) -> RunEnd {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let c0 = ev.cost(start);
    simplex.push((start.to_vec(), c0));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += if v[i] + opts.initial_step <= ev.hi[i] {
            opts.initial_step
        } else {
            -opts.initial_step
        };
        ev.clip(&mut v);
        let c = ev.cost(&v);
        simplex.push((v, c));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        *iters += 1;
        trace.push(ev.best.2);

        let best = &simplex[0];
        let worst_cost = simplex[n].1;
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let spread = worst_cost - best.1;
        if diameter <= opts.xtol || (spread.is_finite() && spread <= opts.ftol * best.1.abs()) {
            return RunEnd::Converged;
        }
        if ev.exhausted() {
            return RunEnd::Budget;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(v, _)| v[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64, ev: &Evaluator, worst: &[f64]| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (c - w))
                .collect();
            ev.clip(&mut p);
            p
        };

        let worst = simplex[n].0.clone();
        let xr = along(1.0, ev, &worst);
        let fr = ev.cost(&xr);
        if fr < simplex[0].1 {
            let xe = along(2.0, ev, &worst);
            let fe = ev.cost(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(0.5, ev, &worst);
            let fc = ev.cost(&xc);
            (xc, fc.min(f64::INFINITY))
        } else {
            let xc = along(-0.5, ev, &worst);
            let fc = ev.cost(&xc);
            (xc, fc)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut v: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, x)| a + 0.5 * (x - a))
                .collect();
            ev.clip(&mut v);
            let c = ev.cost(&v);
            *vertex = (v, c);
        }
    }
}

/// Fits the model to the target starting from `initial`.
pub fn fit(problem: &FitProblem, initial: &[f64], options: &FitOptions) -> Result<FitResult> {
    problem.validate()?;
    if !problem.within_bounds(initial) {
        return Err(Error::usage("initial parameters outside bounds"));
    }
    if options.max_evals == 0 || options.initial_step.is_nan() || options.initial_step <= 0.0 {
        return Err(Error::usage("fit options need a positive budget and step"));
    }
    let u0: Vec<f64> = initial.iter().map(|p| p.ln()).collect();
    let initial_cost = objective(initial, problem)?;
    let mut ev = Evaluator {
        problem,
        lo: problem.lower.iter().map(|v| v.ln()).collect(),
        hi: problem.upper.iter().map(|v| v.ln()).collect(),
        evals: 0,
        max_evals: options.max_evals,
        best: (u0.clone(), initial.to_vec(), initial_cost),
    };
    let mut start = u0;
    ev.clip(&mut start);

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut restarts = 0;
    let converged = loop {
        let before = ev.best.2;
        match nelder_mead(&mut ev, &start, options, &mut trace, &mut iterations) {
            RunEnd::Budget => break false,
            RunEnd::Converged => {
                let improved =
                    before.is_infinite() || ev.best.2 < before * (1.0 - options.ftol.max(1e-12));
                if !improved && restarts > 0 {
                    break true;
                }
                if restarts >= options.max_restarts {
                    break true;
                }
                if ev.best.2 == 0.0 {
                    break true;
                }
                restarts += 1;
                start = ev.best.0.clone();
            }
        }
    };

    let (_, params, cost) = ev.best.clone();
    Ok(FitResult {
        params,
        cost,
        initial_cost,
        iterations,
        evaluations: ev.evals,
        restarts,
        converged,
        trace,
    })
}
