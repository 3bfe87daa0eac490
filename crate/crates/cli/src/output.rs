//! Report emission: the fixed-schema CSV tables and the JSON manifest
//! that makes every run reproducible from (config, seed) alone.

use std::io::Write;
use std::path::{Path, PathBuf};

use lhvsim::scenarios::{CglmpReport, PhiStudyReport, StudyReport, SweepRow};
use serde::Serialize;

/// CSV header shared by the study commands; fixed column order.
pub const REPORT_HEADER: &str =
    "protocol,scenario,d,setup_index,N_ini,N_out,accept_ratio,delta,std_err,seed";

/// Floats are written with 17 significant digits so the CSV round-trips
/// bit-exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_report_csv(path: &Path, reports: &[&StudyReport]) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for report in reports {
        for s in &report.setups {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                report.protocol,
                report.scenario,
                report.d,
                s.setup_index,
                s.n_ini,
                s.n_out,
                fmt_f64(s.accept_ratio),
                fmt_f64(s.delta),
                fmt_f64(0.0),
                report.seed,
            ));
        }
        // aggregate row: setup_index = -1 carries the mean and std_n/sqrt(n)
        out.push_str(&format!(
            "{},{},{},-1,{},{},{},{},{},{}\n",
            report.protocol,
            report.scenario,
            report.d,
            report.setups.iter().map(|s| s.n_ini).sum::<usize>(),
            report.total_n_out(),
            fmt_f64(report.mean_accept_ratio()),
            fmt_f64(report.mean_delta),
            fmt_f64(report.std_err),
            report.seed,
        ));
    }
    std::fs::write(path, out)
}

pub fn write_phi_csv(path: &Path, report: &PhiStudyReport) -> std::io::Result<()> {
    let mut out = String::from(
        "protocol,phi,N_ini,N_out,accept_ratio,delta,p1_sim,p2_sim,p3_sim,p1_q,p2_q,p3_q,seed\n",
    );
    for p in &report.points {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            report.protocol,
            fmt_f64(p.phi),
            p.n_ini,
            p.n_out,
            fmt_f64(p.accept_ratio),
            fmt_f64(p.delta),
            fmt_f64(p.probs[0]),
            fmt_f64(p.probs[1]),
            fmt_f64(p.probs[2]),
            fmt_f64(p.quantum[0]),
            fmt_f64(p.quantum[1]),
            fmt_f64(p.quantum[2]),
            report.seed,
        ));
    }
    std::fs::write(path, out)
}

pub fn write_cglmp_csv(path: &Path, report: &CglmpReport) -> std::io::Result<()> {
    let mut out = String::from("protocol,pair,N_ini,N_out,delta,i3_simulated,i3_quantum,seed\n");
    let pairs = ["A1B1", "A1B2", "A2B1", "A2B2"];
    for (i, pair) in pairs.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},,,{}\n",
            report.protocol, pair, report.n_ini, report.n_out[i], fmt_f64(report.deltas[i]),
            report.seed,
        ));
    }
    out.push_str(&format!(
        "{},all,{},{},{},{},{},{}\n",
        report.protocol,
        report.n_ini * 4,
        report.n_out.iter().sum::<usize>(),
        fmt_f64(report.mean_delta),
        fmt_f64(report.i3_simulated),
        fmt_f64(report.i3_quantum),
        report.seed,
    ));
    std::fs::write(path, out)
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow], d: usize, seed: u64) -> std::io::Result<()> {
    let mut out = String::from("d,cutoff,N_ini,N_out,accept_ratio,delta,std_err,seed\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            d,
            fmt_f64(r.cutoff),
            r.n_ini_total,
            r.n_out_total,
            fmt_f64(r.accept_ratio),
            fmt_f64(r.mean_delta),
            fmt_f64(r.std_err),
            seed,
        ));
    }
    std::fs::write(path, out)
}

/// Every run writes a manifest next to its tables: artifact version, the
/// resolved configuration, the seed, and the emitted files.
#[derive(Serialize)]
pub struct Manifest<C: Serialize> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config: C,
    pub outputs: Vec<String>,
}

pub fn write_manifest<C: Serialize>(dir: &Path, manifest: &Manifest<C>) -> std::io::Result<()> {
    let file = std::fs::File::create(dir.join("manifest.json"))?;
    let mut writer = std::io::BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, manifest)?;
    writer.write_all(b"\n")
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, String> {
    std::fs::create_dir_all(dir)
        .map_err(|e| format!("cannot create output directory {}: {e}", dir.display()))?;
    Ok(dir.to_path_buf())
}
