use std::f64::consts::PI;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{RunConfig, Scenario, SweepAxis, TimeBound, TimeGrid};
use super::output::{Summary, Table};
use crate::analytic::{k1_approx, AnalyticKraus};
use crate::error::{CpsError, Result};
use crate::fock::AtomLevel;
use crate::gates::{
    ccnot_compose, cps_interaction_time, epr_candidates, epr_protocol,
    fast_period, gate_report, probability_deficit_estimate, toffoli, CpsSimulation, EprScanPoint,
    FieldDensity,
};
use crate::model::PhysParams;
use crate::propagator::Evolution;
use crate::{max_abs, C64};

pub(super) fn execute(cfg: &RunConfig) -> Result<(Table, Summary)> {
    let params = cfg.params.resolve()?;
    match cfg.scenario {
        Scenario::Cps => cps(cfg, &params),
        Scenario::Epr => epr(cfg, &params),
        Scenario::Sweep => sweep(cfg, &params),
        Scenario::Xcheck => xcheck(cfg, &params),
    }
}

fn grid_or(cfg: &RunConfig, default: TimeGrid, t_int: f64) -> Result<Vec<f64>> {
    cfg.time_grid.unwrap_or(default).times(t_int)
}

/// Gate figures of merit at `t_int` for one parameter set.
struct GatePoint {
    t_int: f64,
    one_minus_p: f64,
    period_mean: f64,
    estimate: f64,
    fidelity: f64,
    deviation_diag: f64,
    deviation_offdiag: f64,
    ccnot_deviation: f64,
}

fn gate_point(params: &PhysParams, rho0: &FieldDensity, samples: usize) -> Result<(CpsSimulation, GatePoint)> {
    let t_int = cps_interaction_time(params, 0)?;
    let sim = CpsSimulation::new(params)?;
    let k1 = sim.k1(t_int)?;
    let report = gate_report(&k1, rho0, t_int)?;
    let ccnot = ccnot_compose(&k1)? - toffoli();
    let point = GatePoint {
        t_int,
        one_minus_p: 1.0 - report.probability,
        period_mean: sim.mean_deficit(rho0, t_int, fast_period(params)?, samples)?,
        estimate: probability_deficit_estimate(params, rho0)?,
        fidelity: report.fidelity.unwrap_or(f64::NAN),
        deviation_diag: report.deviation_diag,
        deviation_offdiag: report.deviation_offdiag,
        ccnot_deviation: max_abs(&ccnot),
    };
    Ok((sim, point))
}

fn cps(cfg: &RunConfig, params: &PhysParams) -> Result<(Table, Summary)> {
    params.gate_regime()?;
    let rho0 = cfg.initial_state.resolve()?;
    let (sim, point) = gate_point(params, &rho0, cfg.period_samples)?;
    let default = TimeGrid {
        start: TimeBound::Absolute(0.0),
        stop: TimeBound::Relative { t_int: 1.1 },
        steps: 220,
    };
    let times = grid_or(cfg, default, point.t_int)?;

    let rows: Vec<(Vec<f64>, f64)> = times
        .par_iter()
        .map(|&t| {
            let k1 = sim.k1(t)?;
            let report = gate_report(&k1, &rho0, point.t_int)?;
            let approx = max_abs(&(&k1 - k1_approx(params, t)?));
            let row = vec![
                t,
                1.0 - report.probability,
                point.estimate,
                report.fidelity.unwrap_or(f64::NAN),
                report.deviation_diag,
            ];
            Ok((row, approx))
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["t", "one_minus_p", "one_minus_p_estimate", "fidelity", "deviation_diag"]);
    let mut approx_max: f64 = 0.0;
    for ((row, approx), &t) in rows.into_iter().zip(&times) {
        if t <= point.t_int {
            approx_max = approx_max.max(approx);
        }
        table.push(row);
    }

    let mut s = Summary::default();
    s.insert("t_int", point.t_int);
    s.insert("fast_period", fast_period(params)?);
    s.insert("probability", 1.0 - point.one_minus_p);
    s.insert("one_minus_p", point.one_minus_p);
    s.insert("one_minus_p_period_mean", point.period_mean);
    s.insert("one_minus_p_estimate", point.estimate);
    s.insert("fidelity", point.fidelity);
    s.insert("deviation_diag", point.deviation_diag);
    s.insert("deviation_offdiag", point.deviation_offdiag);
    s.insert("ccnot_deviation", point.ccnot_deviation);
    s.insert("approx_max_deviation", approx_max);
    Ok((table, s))
}

fn epr(cfg: &RunConfig, params: &PhysParams) -> Result<(Table, Summary)> {
    let g = params.all_equal_regime()?;
    let outcome = epr_protocol(params)?;
    let default = TimeGrid {
        start: TimeBound::Absolute(0.0),
        stop: TimeBound::Absolute(10.0 * PI / g),
        steps: cfg.epr.scan_steps.unwrap_or(400),
    };
    let times = grid_or(cfg, default, outcome.t_int)?;
    let sim = CpsSimulation::new(params)?;
    let scan: Vec<EprScanPoint> = times
        .par_iter()
        .map(|&t| match sim.epr_at(t) {
            Ok(o) => Ok(EprScanPoint { t, probability: o.probability, fidelity: o.fidelity }),
            Err(CpsError::ZeroProbability) => Ok(EprScanPoint { t, probability: 0.0, fidelity: 0.0 }),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&["t", "P", "F"]);
    for p in &scan {
        table.push(vec![p.t, p.probability, p.fidelity]);
    }

    let mut s = Summary::default();
    s.insert("t_int", outcome.t_int);
    s.insert("probability", outcome.probability);
    s.insert("fidelity", outcome.fidelity);
    s.insert("concurrence", outcome.concurrence);
    if cfg.epr.scan {
        let candidates = epr_candidates(&scan);
        s.insert("candidates", candidates.len() as f64);
        for (i, c) in candidates.iter().take(3).enumerate() {
            s.insert(format!("candidate_{}_t", i + 1), c.t);
            s.insert(format!("candidate_{}_probability", i + 1), c.probability);
            s.insert(format!("candidate_{}_fidelity", i + 1), c.fidelity);
        }
    }
    Ok((table, s))
}

fn with_magnitude(z: C64, magnitude: f64) -> C64 {
    if z.norm() == 0.0 {
        C64::new(magnitude, 0.0)
    } else {
        z / z.norm() * magnitude
    }
}

fn sweep(cfg: &RunConfig, params: &PhysParams) -> Result<(Table, Summary)> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CpsError::Config("scenario `sweep` needs a `sweep` section".into()))?;
    params.gate_regime()?;
    let values = sweep.points()?;
    if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(CpsError::Config("sweep: values must be positive and finite".into()));
    }
    let rho0 = cfg.initial_state.resolve()?;

    let points: Vec<GatePoint> = values
        .par_iter()
        .map(|&v| {
            let mut p = *params;
            match sweep.axis {
                SweepAxis::Omega => {
                    p.omega_1 = with_magnitude(p.omega_1, v);
                    p.omega_2 = with_magnitude(p.omega_2, v);
                }
                SweepAxis::G => {
                    p.g_a = with_magnitude(p.g_a, v);
                    p.g_b = with_magnitude(p.g_b, v);
                    p.g_c = with_magnitude(p.g_c, v);
                }
            }
            gate_point(&p, &rho0, cfg.period_samples).map(|(_, point)| point)
        })
        .collect::<Result<_>>()?;

    let axis = match sweep.axis {
        SweepAxis::Omega => "omega",
        SweepAxis::G => "g",
    };
    let mut table = Table::new(&[
        axis,
        "t_int",
        "one_minus_p",
        "one_minus_p_period_mean",
        "one_minus_p_estimate",
        "fidelity",
        "deviation_diag",
        "ccnot_deviation",
    ]);
    for (&v, p) in values.iter().zip(&points) {
        table.push(vec![
            v,
            p.t_int,
            p.one_minus_p,
            p.period_mean,
            p.estimate,
            p.fidelity,
            p.deviation_diag,
            p.ccnot_deviation,
        ]);
    }

    let mut s = Summary::default();
    s.insert("points", points.len() as f64);
    s.insert("max_one_minus_p", points.iter().map(|p| p.one_minus_p).fold(0.0, f64::max));
    s.insert("min_fidelity", points.iter().map(|p| p.fidelity).fold(f64::INFINITY, f64::min));
    s.insert("max_deviation_diag", points.iter().map(|p| p.deviation_diag).fold(0.0, f64::max));
    s.insert("max_ccnot_deviation", points.iter().map(|p| p.ccnot_deviation).fold(0.0, f64::max));
    let means: Vec<f64> = points.iter().map(|p| p.period_mean).collect();
    if let Some(slope) = log_log_slope(&values, &means) {
        s.insert("deficit_scaling_exponent", slope);
    }
    Ok((table, s))
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || y.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

struct Draw {
    params: PhysParams,
    times: Vec<f64>,
}

fn draw_params(cfg: &RunConfig, base: &PhysParams) -> Vec<Draw> {
    let xc = &cfg.xcheck;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let random_times = |rng: &mut ChaCha8Rng, scale: f64| -> Vec<f64> {
        (0..xc.times).map(|_| rng.random_range(0.0..=xc.t_max) / scale).collect()
    };
    if !xc.random {
        let scale = match largest_coupling(base) {
            m if m > 0.0 => m,
            _ => 1.0,
        };
        return vec![Draw { params: *base, times: random_times(&mut rng, scale) }];
    }
    (0..xc.draws)
        .map(|_| {
            let mut c = || {
                let magnitude = 10f64.powf(rng.random_range(-1.0..=1.0));
                let phase = rng.random_range(0.0..2.0 * PI);
                C64::from_polar(magnitude, phase)
            };
            let params = PhysParams::resonant([c(), c(), c()], [c(), c()], base.n_max);
            let times = random_times(&mut rng, largest_coupling(&params));
            Draw { params, times }
        })
        .collect()
}

fn largest_coupling(p: &PhysParams) -> f64 {
    [p.g_a, p.g_b, p.g_c, p.omega_1, p.omega_2]
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn xcheck(cfg: &RunConfig, params: &PhysParams) -> Result<(Table, Summary)> {
    params.require_resonant()?;
    let draws = draw_params(cfg, params);
    let per_draw: Vec<Vec<[f64; 6]>> = draws
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let space = d.params.space()?;
            let evolution = Evolution::for_params(&d.params, cfg.tol)?;
            let analytic = AnalyticKraus::new(&d.params)?;
            let empty_a: Vec<usize> = space
                .labels()
                .enumerate()
                .filter(|(_, l)| l.n_a() == 0)
                .map(|(s, _)| s)
                .collect();
            d.times
                .iter()
                .map(|&t| {
                    let kraus = evolution.kraus(space, AtomLevel::GROUND, t)?.alternating_phase();
                    let k1 = max_abs(&(kraus.k1() - analytic.k1(t)));
                    let k2 = max_abs(&(kraus.k2() - analytic.k2(t)));
                    let vacuum = empty_a
                        .iter()
                        .map(|&s| max_abs(&kraus.k2().column(s)))
                        .fold(0.0, f64::max);
                    Ok([i as f64, t, k1, k2, kraus.completeness_residual(), vacuum])
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "draw",
        "t",
        "k1_residual",
        "k2_residual",
        "completeness_residual",
        "vacuum_a_residual",
    ]);
    let mut max = [0.0f64; 4];
    for row in per_draw.into_iter().flatten() {
        for (m, v) in max.iter_mut().zip(&row[2..]) {
            *m = m.max(*v);
        }
        table.push(row.to_vec());
    }
    let mut s = Summary::default();
    s.insert("draws", draws.len() as f64);
    s.insert("max_k1_residual", max[0]);
    s.insert("max_k2_residual", max[1]);
    s.insert("max_completeness_residual", max[2]);
    s.insert("max_vacuum_a_residual", max[3]);
    Ok((table, s))
}
