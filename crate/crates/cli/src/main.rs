use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bimnav_core::grid::mapio::{load_map, save_map, TrinaryMap};
use bimnav_core::grid::{BimPrior, LayerStack, OccupancyGrid};
use bimnav_core::harness::render::{render_snapshot, Overlay};
use bimnav_core::harness::{
    run_batch, run_mission_observed, site, summarize_all, write_summary_csv, write_summary_json,
    MissionRecord, ScenarioConfig,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bimnav", version, about = "BIM-prior UGV missions with risk-triggered UAV rescans")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario for one or more seeds.
    Run {
        scenario: PathBuf,
        /// First seed; defaults to the scenario's.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of runs (consecutive seeds); defaults to the scenario's.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Summarise the mission records in a directory.
    Metrics { dir: PathBuf },
    /// Re-run a recorded mission and draw the map at a tick.
    Render {
        record: PathBuf,
        tick: usize,
        /// Scenario file; defaults to the one named in the record.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Output image (.png or .ppm).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rewrite a map sidecar, or draw it when the output is .png/.ppm.
    Mapconvert { input: PathBuf, output: PathBuf },
    /// Write the shipped site map as PGM + YAML.
    Site {
        #[arg(long, default_value = "scenarios/site.yaml")]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Run {
            scenario,
            seed,
            runs,
            out,
        } => run(&scenario, seed, runs, &out),
        Command::Metrics { dir } => metrics(&dir),
        Command::Render {
            record,
            tick,
            scenario,
            out,
        } => render(&record, tick, scenario, out),
        Command::Mapconvert { input, output } => mapconvert(&input, &output),
        Command::Site { out } => {
            save_map(&site::site_map(), &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn run(scenario: &Path, seed: Option<u64>, runs: Option<usize>, out: &Path) -> Result<()> {
    let cfg = ScenarioConfig::load(scenario)
        .with_context(|| format!("loading {}", scenario.display()))?;
    let first = seed.unwrap_or(cfg.seed);
    let seeds: Vec<u64> = (0..runs.unwrap_or(cfg.runs) as u64).map(|k| first + k).collect();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut records = Vec::new();
    let mut failed = false;
    for (seed, result) in seeds.iter().zip(run_batch(&cfg, &seeds)) {
        let mut record = result.with_context(|| format!("seed {seed}"))?;
        record.scenario_file = Some(scenario.display().to_string());
        let stem = format!("{}_seed{seed}", cfg.name);
        record.write_json(out.join(format!("{stem}.json")))?;
        record.write_trace_csv(out.join(format!("{stem}_trace.csv")))?;
        println!(
            "{} seed {seed}: goal={} length={:.1} m time={:.1} s interventions={} dR={} dH={}{}",
            cfg.name,
            record.goal_reached,
            record.path_length,
            record.mission_time,
            record.interventions.len(),
            fmt_pct(record.delta_r_pct),
            fmt_pct(record.delta_h_pct),
            record.cause.as_deref().map(|c| format!(" ({c})")).unwrap_or_default(),
        );
        // A static-prior halt is the designed outcome, not a failure.
        let halted_by_design = record.cause.as_deref().is_some_and(|c| c.starts_with("halted"));
        failed |= !record.goal_reached && !halted_by_design;
        records.push(record);
    }
    let summary = summarize_all(&records)?;
    write_summary_csv(&summary, out.join(format!("{}_summary.csv", cfg.name)))?;
    write_summary_json(&summary, out.join(format!("{}_summary.json", cfg.name)))?;
    if failed {
        bail!("at least one run did not complete");
    }
    Ok(())
}

fn fmt_pct(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.1}%"))
}

fn metrics(dir: &Path) -> Result<()> {
    let mut records = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    entries.sort();
    for path in entries {
        let text = std::fs::read_to_string(&path)?;
        // Summary files sit next to the records; skip anything that is not one.
        if let Ok(r) = MissionRecord::from_json(&text) {
            records.push(r);
        }
    }
    if records.is_empty() {
        bail!("no mission records in {}", dir.display());
    }
    let summary = summarize_all(&records)?;
    write_summary_csv(&summary, dir.join("summary.csv"))?;
    write_summary_json(&summary, dir.join("summary.json"))?;
    println!("scenario,runs,dR%,dH%,min_clr,path,time,goal_rate");
    for s in &summary {
        println!(
            "{},{},{},{},{},{:.1},{:.1},{:.2}",
            s.scenario,
            s.runs,
            fmt_pct(s.delta_r_pct),
            fmt_pct(s.delta_h_pct),
            s.min_clearance.map_or("-".into(), |c| format!("{c:.2}")),
            s.path_length,
            s.mission_time,
            s.goal_rate
        );
    }
    Ok(())
}

fn render(record: &Path, tick: usize, scenario: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let rec = MissionRecord::from_json(&std::fs::read_to_string(record)?)?;
    let scenario = scenario
        .or_else(|| rec.scenario_file.clone().map(PathBuf::from))
        .context("record names no scenario file; pass --scenario")?;
    let cfg = ScenarioConfig::load(&scenario)?;
    let out = out.unwrap_or_else(|| record.with_extension(format!("tick{tick}.png")));
    let mut done = None;
    run_mission_observed(&cfg, rec.seed, |snap| {
        if snap.tick == tick && done.is_none() {
            let overlay = Overlay {
                path: snap.path,
                corridor: Some(snap.corridor),
                roi: snap.roi,
            };
            done = Some(
                LayerStack::compute(snap.grid, snap.prior, cfg.corridor.tau_occ).and_then(|layers| {
                    render_snapshot(&layers, cfg.corridor.free_thresh, &overlay, &out)
                }),
            );
        }
    })?;
    match done {
        Some(r) => {
            r?;
            println!("wrote {}", out.display());
            Ok(())
        }
        None => bail!("mission ended before tick {tick}"),
    }
}

fn mapconvert(input: &Path, output: &Path) -> Result<()> {
    let map: TrinaryMap = load_map(input).with_context(|| format!("loading {}", input.display()))?;
    match output.extension().and_then(|e| e.to_str()) {
        Some("png" | "ppm") => {
            let prior = BimPrior::unfrozen(map.meta, map.occupied_mask(), 0.9)?;
            let grid = OccupancyGrid::init_from_prior(&prior, Default::default())?;
            let layers = LayerStack::compute(&grid, &prior, 0.65)?;
            render_snapshot(&layers, 0.35, &Overlay::default(), output)?;
        }
        _ => save_map(&map, output)?,
    }
    println!("wrote {}", output.display());
    Ok(())
}
