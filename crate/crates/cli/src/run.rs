//! Scenario dispatch and output files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use dslab_core::config::{LoadedConfig, ScenarioKind, TuneSpec};
use dslab_core::farfield::write_field_map;
use dslab_core::guidance::{write_trajectory_csv, MemberStatus, Trajectory};
use dslab_core::output::RunMeta;
use dslab_core::scenarios::{
    record_cauchy_surface, run_beam_splitter, run_epr, tune_barrier, write_cauchy_record, write_report,
    BeamSplitterParams, BeamSplitterRun, TuneResult,
};
use dslab_core::spacetime::write_complex;

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(f)))
}

fn output_dir(cfg: &LoadedConfig) -> Result<PathBuf> {
    let dir = cfg.config.output_dir.clone();
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn report_file(dir: &Path, name: &str, meta: &RunMeta, report: &impl serde::Serialize) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    write_report(&mut w, meta, report)?;
    w.flush()?;
    Ok(path)
}

fn trajectory_file(dir: &Path, name: &str, meta: &RunMeta, tr: &Trajectory) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    write_trajectory_csv(&mut w, tr, meta)?;
    w.flush()?;
    Ok(path)
}

fn status(s: &MemberStatus) -> String {
    match s {
        MemberStatus::Active => "active".into(),
        MemberStatus::Masked { t } => format!("masked@{t}"),
        MemberStatus::Outside { t } => format!("outside@{t}"),
    }
}

fn beam_splitter_params(cfg: &LoadedConfig) -> Result<&BeamSplitterParams> {
    match &cfg.config.beam_splitter {
        Some(p) => Ok(p),
        None => bail!("config has no [beam_splitter] section"),
    }
}

/// Tunes the barrier and writes `tune.toml`.
pub fn tune(cfg: &LoadedConfig) -> Result<(TuneResult, PathBuf)> {
    let p = beam_splitter_params(cfg)?;
    let spec = cfg.config.tune.unwrap_or(TuneSpec { target: 0.5, tolerance: 0.005 });
    let res = tune_barrier(p, spec.target, spec.tolerance)?;
    let dir = output_dir(cfg)?;
    let path = report_file(&dir, "tune.toml", &cfg.meta(), &res)?;
    Ok((res, path))
}

fn splitter_amplitude(cfg: &LoadedConfig, out: &mut Vec<PathBuf>) -> Result<f64> {
    let p = beam_splitter_params(cfg)?;
    Ok(match cfg.config.tune {
        Some(_) => {
            let (res, path) = tune(cfg)?;
            out.push(path);
            res.amplitude
        }
        None => p.barrier.amplitude,
    })
}

fn write_splitter(dir: &Path, meta: &RunMeta, run: &BeamSplitterRun, out: &mut Vec<PathBuf>) -> Result<()> {
    out.push(report_file(dir, "report.toml", meta, &run.report)?);
    let (path, mut w) = create(dir, "ensemble.csv")?;
    writeln!(w, "{}", meta.header_line())?;
    writeln!(w, "index,x_initial,x_final,status")?;
    let rows = run.initial_positions.iter().zip(&run.final_positions).zip(&run.final_status);
    for (k, ((a, b), st)) in rows.enumerate() {
        writeln!(w, "{k},{a},{b},{}", status(st))?;
    }
    w.flush()?;
    out.push(path);
    let (path, mut w) = create(dir, "psi_final.dslab")?;
    write_complex(&mut w, &run.final_state.psi, &format!("{};part=psi", meta.key_values().replace(',', ";")))?;
    w.flush()?;
    out.push(path);
    if let Some(tr) = &run.selected {
        out.push(trajectory_file(dir, "selected_trajectory.csv", meta, tr)?);
    }
    if let Some(map) = &run.field_map {
        out.extend(write_field_map(dir, "selected", map, meta)?);
    }
    Ok(())
}

/// The beam-splitter run restricted to its field map; the map spec must be present.
pub fn beam_splitter_field_map(cfg: &LoadedConfig) -> Result<Vec<PathBuf>> {
    let p = beam_splitter_params(cfg)?;
    if p.field_map.is_none() {
        bail!("[beam_splitter.field_map] is required for field-map");
    }
    let mut out = Vec::new();
    let amp = splitter_amplitude(cfg, &mut out)?;
    let run = run_beam_splitter(p, amp, cfg.seed())?;
    let dir = output_dir(cfg)?;
    match &run.field_map {
        Some(map) => out.extend(write_field_map(&dir, "selected", map, &cfg.meta())?),
        None => bail!("no member was reflected, so there is no worldline to map"),
    }
    Ok(out)
}

/// Runs the configured scenario and returns the written paths.
pub fn run(cfg: &LoadedConfig) -> Result<Vec<PathBuf>> {
    let meta = cfg.meta();
    let mut out = Vec::new();
    match cfg.config.scenario {
        ScenarioKind::BeamSplitter => {
            let p = beam_splitter_params(cfg)?;
            let amp = splitter_amplitude(cfg, &mut out)?;
            let run = run_beam_splitter(p, amp, cfg.seed())?;
            let dir = output_dir(cfg)?;
            write_splitter(&dir, &meta, &run, &mut out)?;
        }
        ScenarioKind::Epr => {
            let (Some(p), Some(s)) = (&cfg.config.epr, cfg.config.settings) else {
                bail!("epr needs [epr] and [settings]");
            };
            let run = run_epr(p, s, cfg.seed())?;
            let dir = output_dir(cfg)?;
            out.push(report_file(&dir, "report.toml", &meta, &run.report)?);
            let (path, mut w) = create(&dir, "ensemble.csv")?;
            writeln!(w, "{}", meta.header_line())?;
            writeln!(w, "index,z1_initial,z2_initial,z1_a,z2_a,z1_b,z2_b")?;
            for (k, ((q, a), b)) in run.initial.iter().zip(&run.final_a).zip(&run.final_b).enumerate() {
                writeln!(w, "{k},{},{},{},{},{},{}", q[0], q[1], a[0], a[1], b[0], b[1])?;
            }
            w.flush()?;
            out.push(path);
        }
        ScenarioKind::CauchyRecord => {
            let Some(p) = &cfg.config.cauchy else { bail!("cauchy_record needs [cauchy]") };
            let rec = record_cauchy_surface(p)?;
            let dir = output_dir(cfg)?;
            out.push(report_file(&dir, "report.toml", &meta, &rec.report)?);
            out.push(trajectory_file(&dir, "trajectory_a.csv", &meta, &rec.trajectory_a)?);
            out.push(trajectory_file(&dir, "trajectory_b.csv", &meta, &rec.trajectory_b)?);
            out.extend(write_cauchy_record(&dir, &rec, &meta)?);
        }
    }
    Ok(out)
}
