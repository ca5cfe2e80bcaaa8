use std::path::PathBuf;

use bimnav_core::grid::mapio::load_map;
use bimnav_core::harness::{run_mission, site, MissionRecord, Policy, ScenarioConfig};

fn scenarios_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn preset(name: &str) -> ScenarioConfig {
    ScenarioConfig::load(scenarios_dir().join(format!("{name}.toml"))).unwrap()
}

#[test]
fn shipped_site_files_match_the_generator() {
    let shipped = load_map(scenarios_dir().join("site.yaml")).unwrap();
    assert_eq!(shipped, site::site_map());
}

#[test]
fn straight_run_in_an_accurate_world_needs_no_help() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("straight.toml");
    let map = scenarios_dir().join("site.yaml");
    std::fs::write(
        &path,
        format!(
            "name = \"straight\"\npolicy = \"uav_assisted\"\nmap = {:?}\nstart = [20.0, 5.0]\ngoal = [38.0, 5.0]\n",
            map.display().to_string()
        ),
    )
    .unwrap();
    let cfg = ScenarioConfig::load(&path).unwrap();
    let r = run_mission(&cfg, 1).unwrap();
    assert!(r.goal_reached, "{:?}", r.cause);
    assert!(r.interventions.is_empty());
    assert!(r.first_trigger.is_none());
    assert_eq!(r.delta_r_pct, None);
    assert!((r.mission_time - r.ticks as f64 * cfg.ugv.dt).abs() < 1e-9);
}

#[test]
fn mission_time_is_driving_plus_interventions() {
    for name in ["scenario2", "scenario3", "scenario4"] {
        let cfg = preset(name);
        let r = run_mission(&cfg, 2).unwrap();
        assert!(!r.interventions.is_empty(), "{name}");
        let extra = r.mission_time - r.ticks as f64 * cfg.ugv.dt;
        let want: f64 = match cfg.policy {
            Policy::FrontierOnly => {
                r.interventions.iter().map(|iv| iv.scans as f64 * cfg.explore.dwell).sum()
            }
            _ => r.interventions.iter().map(|iv| iv.duration).sum(),
        };
        assert!((extra - want).abs() < 1e-6, "{name}: {extra} vs {want}");
    }
}

#[test]
fn records_survive_json() {
    let r = run_mission(&preset("scenario1"), 3).unwrap();
    let text = r.to_json().unwrap();
    let back = MissionRecord::from_json(&text).unwrap();
    assert_eq!(back.to_json().unwrap(), text);
}
