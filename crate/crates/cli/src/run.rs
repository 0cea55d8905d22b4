//! Runs a scenario: expands the sweep, executes points and replicas on a
//! worker pool, then writes the CSV files and the manifest.

use crate::error::{CliError, CliResult};
use crate::scenario::{Phase, ScenarioConfig, ScenarioMode, SweepPoint, DSMC_COLUMNS, SIDEBAND_COLUMNS};
use crate::table::{Cell, Table};
use quasi2d_core::analysis::{kinetic_invariant, TimeSeries};
use quasi2d_core::collision::oracles::{
    analytic_t_therm_classical, analytic_t_therm_quasi2d, classical_collision_rate, classical_plane_relaxation_rate,
    collision_rate_2d, de_z_dt, delta_e_z, quantized_relaxation_rate, quasi2d_regime, suppression_factor,
    thermal_sigma_v, thermal_velocity,
};
use quasi2d_core::collision::{relaxation_column, simulate, CollisionStats, Mode, ThermalizationResult};
use quasi2d_core::physics::{lamb_dicke, raman_rabi_frequency, thermal_state};
use quasi2d_core::sideband::{
    build_rate_matrix, cooling_rate, detuned_excited_population, evolve, resonant_excited_population,
    stationary_limit, PopulationVector, RateModelConfig,
};
use quasi2d_core::trap::two_step_final_temperature;
use quasi2d_core::{Constants, TrapConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

pub const VERSION: &str = concat!("quasi2d ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Worker threads; `None` uses one per core.
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub params: BTreeMap<String, Value>,
    pub files: Vec<String>,
    /// Scalars computed for this point outside the tables.
    pub derived: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub mode: ScenarioMode,
    pub config_hash: String,
    pub version: String,
    pub seeds: Vec<u64>,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// Every file written by the run, relative to the output directory.
    pub outputs: Vec<String>,
    pub points: Vec<PointRecord>,
    /// Non-fatal problems, e.g. a relaxation too weak to fit.
    pub warnings: Vec<String>,
    pub config: Value,
}

impl RunManifest {
    pub fn point(&self, index: usize) -> Option<&PointRecord> {
        self.points.get(index)
    }
}

fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// A file waiting to be written, so a failed run leaves nothing behind.
struct Pending {
    name: String,
    table: Table,
    meta: Vec<(String, String)>,
}

struct Ctx<'a> {
    cfg: &'a ScenarioConfig,
    hash: String,
    c: Constants,
}

impl Ctx<'_> {
    fn meta(&self, point: &SweepPoint, seed: &str) -> Vec<(String, String)> {
        let mut m = vec![
            ("scenario".to_string(), self.cfg.name.clone()),
            ("mode".to_string(), self.cfg.mode.as_str().to_string()),
            ("config_hash".to_string(), self.hash.clone()),
            ("seed".to_string(), seed.to_string()),
        ];
        if !point.params.is_empty() {
            let p: Vec<String> = point.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            m.push(("point".to_string(), format!("{} {}", point.index, p.join(" "))));
        }
        m
    }
}

pub fn run(cfg: &ScenarioConfig, opts: &RunOptions) -> CliResult<RunManifest> {
    cfg.validate()?;
    let started = unix_now();
    let ctx = Ctx {
        cfg,
        hash: cfg.config_hash(),
        c: Constants::cesium(),
    };
    let points = cfg.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::validation("workers", e.to_string()))?;
    let (mut records, pending, warnings) = pool.install(|| match cfg.mode {
        ScenarioMode::Classical3d | ScenarioMode::QuantizedAxial => run_dsmc(&ctx, &points),
        ScenarioMode::SidebandRateModel => run_sideband(&ctx, &points),
        ScenarioMode::AnalyticOnly => run_analytic(&ctx, &points),
    })?;

    std::fs::create_dir_all(&opts.out_dir).map_err(|e| CliError::io(&opts.out_dir, e))?;
    let mut outputs = Vec::new();
    for p in &pending {
        p.table.write(&opts.out_dir.join(&p.name), &p.meta)?;
        outputs.push(p.name.clone());
    }
    outputs.push("manifest.json".to_string());
    records.sort_by_key(|r| r.index);
    let manifest = RunManifest {
        scenario: cfg.name.clone(),
        mode: cfg.mode,
        config_hash: ctx.hash.clone(),
        version: VERSION.to_string(),
        seeds: cfg.seeds(),
        started_unix: started,
        finished_unix: unix_now(),
        outputs,
        points: records,
        warnings,
        config: cfg.to_value(),
    };
    write_manifest(&opts.out_dir, &manifest)?;
    Ok(manifest)
}

fn write_manifest(dir: &Path, m: &RunManifest) -> CliResult<()> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(m).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))
}

fn params_map(p: &SweepPoint) -> BTreeMap<String, Value> {
    p.params.iter().cloned().collect()
}

/// Summary columns that identify the sweep point.
fn point_columns(points: &[SweepPoint]) -> Vec<(String, String)> {
    let mut cols = vec![("point".to_string(), "1".to_string())];
    if let Some(first) = points.first() {
        cols.extend(first.params.iter().map(|(k, _)| (k.clone(), "as configured".to_string())));
    }
    cols
}

fn point_cells(p: &SweepPoint) -> Vec<Cell> {
    let mut row = vec![Cell::I(p.index as u64)];
    row.extend(p.params.iter().map(|(_, v)| Cell::from_json(v)));
    row
}

fn selected<'a>(cfg: &ScenarioConfig, all: &'a [&'a str]) -> Vec<&'a str> {
    if cfg.outputs.is_empty() {
        all.to_vec()
    } else {
        all.iter().copied().filter(|c| cfg.outputs.iter().any(|o| o == c)).collect()
    }
}

fn series_table(ts: &TimeSeries, names: &[&str], suffix: &str) -> Table {
    let mut cols = vec![("t".to_string(), "s".to_string())];
    let picked: Vec<_> = names
        .iter()
        .filter_map(|n| ts.columns().iter().find(|c| c.name == *n))
        .collect();
    cols.extend(picked.iter().map(|c| (format!("{}{suffix}", c.name), c.unit.clone())));
    let mut table = Table::new(cols);
    for (i, t) in ts.t().iter().enumerate() {
        let mut row = vec![Cell::F(*t)];
        row.extend(picked.iter().map(|c| Cell::F(c.values[i])));
        table.push(row);
    }
    table
}

/// Replica output kept after the gas state is dropped.
struct ReplicaRun {
    series: TimeSeries,
    t0: f64,
    n_bar: f64,
    n_bar_2d: f64,
    v_rms: f64,
    weight: f64,
    dt: f64,
    predicted_tau: f64,
    collision_rate: f64,
    stats: CollisionStats,
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.collect();
    v.iter().sum::<f64>() / v.len() as f64
}

fn run_dsmc(ctx: &Ctx, points: &[SweepPoint]) -> CliResult<(Vec<PointRecord>, Vec<Pending>, Vec<String>)> {
    let c = &ctx.c;
    let seeds = ctx.cfg.seeds();
    let jobs: Vec<(usize, u64)> = points
        .iter()
        .flat_map(|p| seeds.iter().map(move |s| (p.index, *s)))
        .collect();
    let runs: Vec<CliResult<ReplicaRun>> = jobs
        .par_iter()
        .map(|&(pi, seed)| {
            let pc = &points[pi].config;
            let tc = pc.thermalization(&pc.trap.build(c))?;
            let r = simulate(&tc, c, seed)?;
            Ok(ReplicaRun {
                series: r.series,
                t0: r.t0,
                n_bar: r.n_bar,
                n_bar_2d: r.n_bar_2d,
                v_rms: r.v_rms,
                weight: r.weight,
                dt: r.dt,
                predicted_tau: r.predicted_tau,
                collision_rate: r.collision_rate,
                stats: r.stats,
            })
        })
        .collect();
    let runs: Vec<ReplicaRun> = runs.into_iter().collect::<CliResult<_>>()?;

    let mode = ctx.cfg.dsmc_mode().expect("dsmc mode");
    let column = relaxation_column(mode);
    let names = selected(ctx.cfg, &DSMC_COLUMNS);
    let mut summary_cols = point_columns(points);
    for (n, u) in [
        ("replicas", "1"),
        ("t0", "K"),
        ("n_bar", "m^-3"),
        ("n_bar_2d", "m^-2"),
        ("v_rms", "m/s"),
        ("weight", "1"),
        ("dt", "s"),
        ("collision_rate", "s^-1"),
        ("predicted_tau", "s"),
        ("t_therm", "s"),
        ("t_therm_sigma", "s"),
        ("observable", "m^2"),
        ("observable_oracle", "m^2"),
        ("replica_observable_mean", "m^2"),
        ("replica_observable_se", "m^2"),
        ("fits_failed", "1"),
        ("kinetic_drift", "1"),
        ("x", "1"),
        ("rate_2d_norm", "1"),
        ("rate_2d_norm_quantized_oracle", "1"),
        ("rate_2d_norm_classical_oracle", "1"),
        ("collisions", "1"),
        ("above_threshold_fraction", "1"),
        ("above_threshold_se", "1"),
        ("above_threshold_analytic", "1"),
    ] {
        summary_cols.push((n.to_string(), u.to_string()));
    }
    let mut summary = Table::new(summary_cols);
    let mut pending = Vec::new();
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    let nrep = seeds.len();
    for p in points {
        let reps = &runs[p.index * nrep..(p.index + 1) * nrep];
        let mut files = Vec::new();
        let mut replica_obs = Vec::new();
        for (r, seed) in reps.iter().zip(&seeds) {
            let name = format!("point{:03}_replica{:03}.csv", p.index, seed - ctx.cfg.seed);
            pending.push(Pending {
                name: name.clone(),
                table: series_table(&r.series, &names, ""),
                meta: ctx.meta(p, &seed.to_string()),
            });
            files.push(name);
            if let Ok(fit) = ThermalizationResult::from_series(&r.series, column, r.t0, r.n_bar, r.v_rms) {
                replica_obs.push(fit.observable);
            }
        }
        let all: Vec<TimeSeries> = reps.iter().map(|r| r.series.clone()).collect();
        let (avg, se) = TimeSeries::mean_of(&all)?;
        let mut agg = series_table(&avg, &names, "_mean");
        let se_table = series_table(&se, &names, "_se");
        for (col, rows) in se_table.columns.iter().skip(1).enumerate() {
            agg.columns.push(rows.clone());
            for (row, se_row) in agg.rows.iter_mut().zip(&se_table.rows) {
                row.push(se_row[col + 1].clone());
            }
        }
        let name = format!("point{:03}_aggregate.csv", p.index);
        let seed_range = format!("{}..={}", seeds[0], seeds[nrep - 1]);
        pending.push(Pending {
            name: name.clone(),
            table: agg,
            meta: ctx.meta(p, &seed_range),
        });
        files.push(name);

        let t0 = mean(reps.iter().map(|r| r.t0));
        let n_bar = mean(reps.iter().map(|r| r.n_bar));
        let n_bar_2d = mean(reps.iter().map(|r| r.n_bar_2d));
        let v_rms = thermal_velocity(t0, c);
        let (t_therm, t_sigma, observable) = match ThermalizationResult::from_series(&avg, column, t0, n_bar, v_rms) {
            Ok(f) => (f.t_therm, f.fit.sigma_tau, f.observable),
            Err(e) => {
                warnings.push(format!("point {}: {e}", p.index));
                (f64::NAN, f64::NAN, f64::NAN)
            }
        };
        let oracle = match mode {
            Mode::Classical3d => analytic_t_therm_classical(n_bar, t0, c)?.observable,
            Mode::QuantizedAxial => f64::NAN,
        };
        let (obs_mean, obs_se) = quasi2d_core::analysis::mean_and_stderr(&replica_obs);
        let drift = match mode {
            Mode::Classical3d => kinetic_invariant(&avg)?,
            Mode::QuantizedAxial => f64::NAN,
        };
        let x = c.hbar * p.config.trap.build(c).omega_osc / (c.k_b * t0);
        let gamma_2d = collision_rate_2d(n_bar_2d, c)?;
        let mut total = CollisionStats::default();
        for r in reps {
            total += r.stats;
        }
        let frac = total.above_threshold as f64 / total.collisions.max(1) as f64;
        let frac_se = (frac * (1.0 - frac) / total.collisions.max(1) as f64).sqrt();
        let (above, above_se, above_analytic) = match mode {
            Mode::QuantizedAxial => (frac, frac_se, (-2.0 * x).exp()),
            Mode::Classical3d => (f64::NAN, f64::NAN, f64::NAN),
        };
        let mut row = point_cells(p);
        row.extend([
            Cell::I(nrep as u64),
            t0.into(),
            n_bar.into(),
            n_bar_2d.into(),
            v_rms.into(),
            mean(reps.iter().map(|r| r.weight)).into(),
            reps.iter().map(|r| r.dt).fold(f64::INFINITY, f64::min).into(),
            mean(reps.iter().map(|r| r.collision_rate)).into(),
            mean(reps.iter().map(|r| r.predicted_tau)).into(),
            t_therm.into(),
            t_sigma.into(),
            observable.into(),
            oracle.into(),
            obs_mean.into(),
            obs_se.into(),
            Cell::I((nrep - replica_obs.len()) as u64),
            drift.into(),
            x.into(),
            (1.0 / (t_therm * gamma_2d)).into(),
            quantized_relaxation_rate(x).into(),
            classical_plane_relaxation_rate(x).into(),
            Cell::I(total.collisions),
            above.into(),
            above_se.into(),
            above_analytic.into(),
        ]);
        summary.push(row);
        records.push(PointRecord {
            index: p.index,
            params: params_map(p),
            files,
            // JSON has no NaN
            derived: [
                ("t0", t0),
                ("n_bar", n_bar),
                ("n_bar_2d", n_bar_2d),
                ("t_therm", t_therm),
                ("observable", observable),
                ("observable_oracle", oracle),
                ("kinetic_drift", drift),
                ("x", x),
                ("rate_2d_norm", 1.0 / (t_therm * gamma_2d)),
                ("above_threshold_fraction", above),
                ("above_threshold_analytic", above_analytic),
            ]
                .into_iter()
                .filter(|(_, v)| v.is_finite())
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        });
    }
    let all_seeds = format!("{}..={}", seeds[0], seeds[nrep - 1]);
    pending.push(summary_pending(ctx, summary, &all_seeds));
    Ok((records, pending, warnings))
}

fn summary_pending(ctx: &Ctx, table: Table, seed: &str) -> Pending {
    Pending {
        name: "summary.csv".to_string(),
        table,
        meta: vec![
            ("scenario".to_string(), ctx.cfg.name.clone()),
            ("mode".to_string(), ctx.cfg.mode.as_str().to_string()),
            ("config_hash".to_string(), ctx.hash.clone()),
            ("seed".to_string(), seed.to_string()),
        ],
    }
}

fn population_cells(p: &PopulationVector, omega_osc: f64, c: &Constants) -> Vec<Cell> {
    let reduced = p.reduced_temperature();
    vec![
        p.mean_n().into(),
        p.p3(0).into(),
        p.p3(1).into(),
        p.excited_fraction().into(),
        reduced.into(),
        (reduced * c.hbar * omega_osc / c.k_b).into(),
        (omega_osc / (2.0 * PI)).into(),
    ]
}

/// Follows the rate model through a rescale: the population is carried
/// over unchanged (adiabatic), Omega_R follows the Raman coupling and the
/// Zeeman splitting follows the trap unless it was pinned.
fn rescaled_model(
    ctx: &Ctx,
    cfg: &ScenarioConfig,
    rm: &RateModelConfig,
    old: &TrapConfig,
    new: &TrapConfig,
) -> CliResult<RateModelConfig> {
    let c = &ctx.c;
    let ratio = raman_rabi_frequency(new, c)? / raman_rabi_frequency(old, c)?;
    Ok(RateModelConfig {
        omega_osc: new.omega_osc,
        omega_r: rm.omega_r * ratio,
        zeeman_splitting: if cfg.sideband.zeeman_hz.is_some() {
            rm.zeeman_splitting
        } else {
            new.omega_osc
        },
        eta: lamb_dicke(new, c)?,
        ..*rm
    })
}

struct SidebandPoint {
    trajectory: Option<Table>,
    final_pop: PopulationVector,
    model: RateModelConfig,
    derived: BTreeMap<String, f64>,
}

fn sideband_point(ctx: &Ctx, p: &SweepPoint, columns: &[(String, String)], keep: &[usize]) -> CliResult<SidebandPoint> {
    let c = &ctx.c;
    let cfg = &p.config;
    let mut trap = cfg.trap.build(c);
    let mut model = cfg.rate_model(&trap, c)?;
    let mut derived = BTreeMap::new();
    if cfg.schedule.is_empty() {
        let ss = stationary_limit(&model)?;
        return Ok(SidebandPoint {
            trajectory: None,
            final_pop: ss,
            model,
            derived,
        });
    }
    let start = thermal_state(cfg.t_init[2], trap.omega_osc, c)?;
    let mut pop = PopulationVector::thermal(model.n_max, start.mean_n);
    let mut table = Table::new(columns.to_vec());
    let push = |table: &mut Table, t: f64, phase: usize, pop: &PopulationVector, w: f64| {
        let mut full = vec![Cell::F(t), Cell::I(phase as u64)];
        full.extend(population_cells(pop, w, c));
        let row = keep.iter().map(|&i| full[i].clone()).collect();
        table.push(row);
    };
    push(&mut table, 0.0, 0, &pop, trap.omega_osc);
    let mut t = 0.0;
    let mut first_rescale: Option<(TrapConfig, TrapConfig)> = None;
    for (i, phase) in cfg.schedule.iter().enumerate() {
        match *phase {
            Phase::Cool { duration, samples } => {
                let n = samples.unwrap_or(50);
                let grid: Vec<f64> = (0..=n).map(|k| duration * k as f64 / n as f64).collect();
                let traj = evolve(&build_rate_matrix(&model)?, &pop, &grid)?;
                for pt in &traj[1..] {
                    push(&mut table, t + pt.t, i + 1, &pt.population, trap.omega_osc);
                }
                pop = traj.last().expect("non-empty grid").population.clone();
                t += duration;
                if first_rescale.is_some() && !derived.contains_key("two_step_beta") {
                    derived.insert("two_step_beta".to_string(), pop.reduced_temperature());
                }
            }
            Phase::RescaleAlpha { alpha_deg, duration } => {
                let new = trap.rescale_frequencies(alpha_deg.to_radians())?;
                derived.insert(format!("schedule{i}.vertical_ratio"), new.omega_osc / trap.omega_osc);
                derived.insert(format!("schedule{i}.horizontal_ratio"), new.omega_x / trap.omega_x);
                model = rescaled_model(ctx, cfg, &model, &trap, &new)?;
                first_rescale.get_or_insert((trap, new));
                trap = new;
                t += duration;
                push(&mut table, t, i + 1, &pop, trap.omega_osc);
            }
            Phase::FreeThermalize { .. } => unreachable!("rejected by validation"),
        }
    }
    if let (Some((t1, t2)), Some(beta)) = (first_rescale, derived.get("two_step_beta").copied()) {
        derived.insert("two_step_final_temperature".to_string(), two_step_final_temperature(beta, &t1, &t2));
    }
    Ok(SidebandPoint {
        trajectory: Some(table),
        final_pop: pop,
        model,
        derived,
    })
}

fn run_sideband(ctx: &Ctx, points: &[SweepPoint]) -> CliResult<(Vec<PointRecord>, Vec<Pending>, Vec<String>)> {
    let c = &ctx.c;
    let mut all_cols = vec![("t".to_string(), "s".to_string())];
    let units = ["1", "1", "1", "1", "1", "1", "K", "Hz"];
    all_cols.extend(SIDEBAND_COLUMNS.iter().zip(units).map(|(n, u)| (n.to_string(), u.to_string())));
    let names = selected(ctx.cfg, &SIDEBAND_COLUMNS);
    let keep: Vec<usize> = std::iter::once(0)
        .chain(
            SIDEBAND_COLUMNS
                .iter()
                .enumerate()
                .filter(|(_, n)| names.contains(n))
                .map(|(i, _)| i + 1),
        )
        .collect();
    let columns: Vec<(String, String)> = keep.iter().map(|&i| all_cols[i].clone()).collect();
    let results: Vec<CliResult<SidebandPoint>> =
        points.par_iter().map(|p| sideband_point(ctx, p, &columns, &keep)).collect();

    let mut summary_cols = point_columns(points);
    for (n, u) in [
        ("mean_n", "1"),
        ("p3_0", "1"),
        ("p3_1", "1"),
        ("excited_fraction", "1"),
        ("reduced_temperature", "1"),
        ("omega_osc_hz", "Hz"),
        ("omega_r_hz", "Hz"),
        ("gamma_prime_hz", "Hz"),
        ("detuning_hz", "Hz"),
        ("sigma_minus_fraction", "1"),
        ("p3_1_resonant_closed_form", "1"),
        ("p3_1_detuned_closed_form", "1"),
        ("cooling_rate", "s^-1"),
    ] {
        summary_cols.push((n.to_string(), u.to_string()));
    }
    let mut summary = Table::new(summary_cols);
    let mut pending = Vec::new();
    let mut records = Vec::new();
    let seed = ctx.cfg.seed.to_string();
    for (p, res) in points.iter().zip(results) {
        let sp = res?;
        let m = &sp.model;
        let hz = |w: f64| w / (2.0 * PI);
        let mut row = point_cells(p);
        row.extend(population_cells(&sp.final_pop, m.omega_osc, c).into_iter().enumerate().filter_map(
            |(i, cell)| (i != 5).then_some(cell), // temperature is in the trajectory only
        ));
        row.extend([
            hz(m.omega_r).into(),
            hz(m.gamma_prime).into(),
            hz(m.detuning).into(),
            m.sigma_minus_fraction.into(),
            resonant_excited_population(m.gamma_prime, m.omega_osc).into(),
            detuned_excited_population(m.detuning, m.omega_osc).into(),
            cooling_rate(m).into(),
        ]);
        summary.push(row);
        let mut files = Vec::new();
        if let Some(table) = sp.trajectory {
            let name = format!("point{:03}_trajectory.csv", p.index);
            pending.push(Pending {
                name: name.clone(),
                table,
                meta: ctx.meta(p, &seed),
            });
            files.push(name);
        }
        let mut derived = sp.derived;
        derived.insert("p3_1".to_string(), sp.final_pop.p3(1));
        records.push(PointRecord {
            index: p.index,
            params: params_map(p),
            files,
            derived,
        });
    }
    pending.push(summary_pending(ctx, summary, &seed));
    Ok((records, pending, Vec::new()))
}

fn run_analytic(ctx: &Ctx, points: &[SweepPoint]) -> CliResult<(Vec<PointRecord>, Vec<Pending>, Vec<String>)> {
    let c = &ctx.c;
    let mut cols = point_columns(points);
    for (n, u) in [
        ("temperature", "K"),
        ("x", "1"),
        ("v_rms", "m/s"),
        ("n_bar", "m^-3"),
        ("sigma_v", "m^3/s"),
        ("collision_rate", "s^-1"),
        ("t_therm_classical", "s"),
        ("observable", "m^2"),
        ("n_2d", "m^-2"),
        ("collision_rate_2d", "s^-1"),
        ("suppression_factor", "1"),
        ("t_therm_quasi2d", "s"),
        ("quasi2d_regime", "1"),
        ("de_z_dt", "W"),
        ("delta_e_z", "J"),
        ("rate_2d_norm_quantized", "1"),
        ("rate_2d_norm_classical", "1"),
    ] {
        cols.push((n.to_string(), u.to_string()));
    }
    let mut table = Table::new(cols);
    let mut records = Vec::new();
    for p in points {
        let cfg = &p.config;
        let t = cfg.t_init.iter().sum::<f64>() / 3.0;
        let w = cfg.trap.build(c).omega_osc;
        let x = c.hbar * w / (c.k_b * t);
        let n_bar = cfg.analytic.n_bar();
        let n_2d = cfg.analytic.n_2d();
        let classical = analytic_t_therm_classical(n_bar, t, c)?;
        let mut row = point_cells(p);
        row.extend([
            t.into(),
            x.into(),
            thermal_velocity(t, c).into(),
            n_bar.into(),
            thermal_sigma_v(t, c)?.into(),
            classical_collision_rate(n_bar, t, c)?.into(),
            classical.t_therm.into(),
            classical.observable.into(),
            n_2d.into(),
            collision_rate_2d(n_2d, c)?.into(),
            suppression_factor(t, w, c)?.into(),
            analytic_t_therm_quasi2d(n_2d, t, w, c)?.into(),
            Cell::I(quasi2d_regime(t, w, c) as u64),
            de_z_dt(n_2d, t, w, c)?.into(),
            delta_e_z(t, w, c)?.into(),
            quantized_relaxation_rate(x).into(),
            classical_plane_relaxation_rate(x).into(),
        ]);
        table.push(row);
        records.push(PointRecord {
            index: p.index,
            params: params_map(p),
            files: Vec::new(),
            derived: BTreeMap::from([("observable".to_string(), classical.observable)]),
        });
    }
    let pending = vec![summary_pending(ctx, table, &ctx.cfg.seed.to_string())];
    Ok((records, pending, Vec::new()))
}
