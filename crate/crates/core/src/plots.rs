//! Gnuplot-ready data and scripts for a run or a sweep directory.
//!
//! A single run yields 17 panels. A sweep directory (one holding
//! `sweep_summary.csv`) overlays every successful point in each panel and adds
//! three resistance panels plotted against the first swept key.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::RunError;
use crate::output::{create_dir, sci, write_text, Table};
use crate::runner::{AXIAL_CSV, PROFILES_CSV, SWEEP_SUMMARY_CSV, TIMESERIES_CSV};

/// Subdirectory receiving the plot files.
pub const PLOT_DIR: &str = "plots";

struct Panel {
    name: &'static str,
    title: &'static str,
    source: &'static str,
    x: (&'static str, &'static str),
    y: (&'static str, &'static str),
    /// Keep only the phase-0 rows of a profile table.
    phase_zero: bool,
}

const fn profile(name: &'static str, title: &'static str, col: &'static str, label: &'static str) -> Panel {
    Panel {
        name,
        title,
        source: PROFILES_CSV,
        x: ("xi", "ξ"),
        y: (col, label),
        phase_zero: true,
    }
}

const fn series(name: &'static str, title: &'static str, col: &'static str, label: &'static str) -> Panel {
    Panel {
        name,
        title,
        source: TIMESERIES_CSV,
        x: ("T", "T"),
        y: (col, label),
        phase_zero: false,
    }
}

const fn axial(name: &'static str, title: &'static str, col: &'static str, label: &'static str) -> Panel {
    Panel {
        name,
        title,
        source: AXIAL_CSV,
        x: ("z", "z"),
        y: (col, label),
        phase_zero: false,
    }
}

const PANELS: [Panel; 17] = [
    profile("velocity_a", "Axial velocity at the throat", "u", "u"),
    profile("velocity_b", "Axial velocity at the throat", "u", "u"),
    profile("velocity_c", "Axial velocity at the throat", "u", "u"),
    profile("microrotation_a", "Microrotation at the throat", "w", "w"),
    profile("microrotation_b", "Microrotation at the throat", "w", "w"),
    profile("microrotation_c", "Microrotation at the throat", "w", "w"),
    profile("temperature", "Temperature at the throat", "theta", "θ"),
    axial("nusselt", "Nusselt number along the segment", "Nu", "Nu"),
    axial(
        "shear_axial",
        "Peak wall shear stress along the segment",
        "tau_w",
        "τ_w",
    ),
    series("shear_time_a", "Wall shear stress at the throat", "tau_w", "τ_w"),
    series("shear_time_b", "Wall shear stress at the throat", "tau_w", "τ_w"),
    series("shear_time_c", "Wall shear stress at the throat", "tau_w", "τ_w"),
    series("flow_rate_a", "Flow rate at the throat", "Q", "Q"),
    series("flow_rate_b", "Flow rate at the throat", "Q", "Q"),
    series("flow_rate_c", "Flow rate at the throat", "Q", "Q"),
    profile("accel_a", "Fluid acceleration at the throat", "F", "F"),
    profile("accel_b", "Fluid acceleration at the throat", "F", "F"),
];

const RESISTANCE_PANELS: [&str; 3] = ["resistance_a", "resistance_b", "resistance_c"];

/// One labelled `(x, y)` series.
struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

fn panel_series(panel: &Panel, dir: &Path, label: String) -> Result<Series, RunError> {
    let table = Table::read(&dir.join(panel.source))?;
    let x = table.column(panel.x.0)?;
    let y = table.column(panel.y.0)?;
    let keep: Vec<bool> = if panel.phase_zero {
        table.column("phase")?.iter().map(|p| *p == 0.0).collect()
    } else {
        vec![true; x.len()]
    };
    let points = x
        .into_iter()
        .zip(y)
        .zip(keep)
        .filter_map(|(xy, k)| k.then_some(xy))
        .collect();
    Ok(Series { label, points })
}

fn write_panel(
    out: &Path,
    name: &str,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<Vec<PathBuf>, RunError> {
    let dat_name = format!("{name}.dat");
    let mut dat = String::new();
    for (k, s) in series.iter().enumerate() {
        if k > 0 {
            dat.push_str("\n\n");
        }
        let _ = writeln!(dat, "# {}", s.label);
        for (x, y) in &s.points {
            let _ = writeln!(dat, "{} {}", sci(*x), sci(*y));
        }
    }
    let mut gp = String::new();
    let _ = writeln!(gp, "set title \"{title}\"");
    let _ = writeln!(gp, "set xlabel \"{x_label}\"");
    let _ = writeln!(gp, "set ylabel \"{y_label}\"");
    let _ = writeln!(gp, "set key outside right");
    let _ = writeln!(gp, "set grid");
    let clauses: Vec<String> = series
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let label = s.label.replace('"', "'");
            format!("'{dat_name}' index {k} using 1:2 with linespoints title \"{label}\"")
        })
        .collect();
    let _ = writeln!(gp, "plot {}", clauses.join(", \\\n     "));
    let dat_path = out.join(&dat_name);
    let gp_path = out.join(format!("{name}.gp"));
    write_text(&dat_path, &dat)?;
    write_text(&gp_path, &gp)?;
    Ok(vec![dat_path, gp_path])
}

/// Writes plot files under `<dir>/plots` and returns the script paths.
pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let summary_path = dir.join(SWEEP_SUMMARY_CSV);
    let out = dir.join(PLOT_DIR);
    if summary_path.exists() {
        let summary = Table::read(&summary_path)?;
        create_dir(&out)?;
        emit_sweep(dir, &out, &summary)
    } else {
        for f in [PROFILES_CSV, TIMESERIES_CSV, AXIAL_CSV] {
            Table::read(&dir.join(f))?;
        }
        create_dir(&out)?;
        let mut scripts = Vec::new();
        for panel in &PANELS {
            let s = panel_series(panel, dir, "run".into())?;
            let files = write_panel(&out, panel.name, panel.title, panel.x.1, panel.y.1, &[s])?;
            scripts.push(files[1].clone());
        }
        Ok(scripts)
    }
}

fn emit_sweep(dir: &Path, out: &Path, summary: &Table) -> Result<Vec<PathBuf>, RunError> {
    let fixed = [
        "point",
        "status",
        "Q_mean",
        "lambda_cycle",
        "tau_peak",
        "Nu_max",
        "u_center",
    ];
    let swept: Vec<String> = summary
        .header
        .iter()
        .filter(|h| !fixed.contains(&h.as_str()))
        .cloned()
        .collect();
    let status = summary.text_column("status")?;
    let points = summary.text_column("point")?;
    let swept_values: Vec<Vec<f64>> = swept.iter().map(|k| summary.column(k)).collect::<Result<_, _>>()?;
    let lambda = summary.column("lambda_cycle")?;
    let ok_rows: Vec<usize> = (0..summary.rows.len()).filter(|&r| status[r] == "ok").collect();
    let label = |r: usize| -> String {
        swept
            .iter()
            .zip(&swept_values)
            .map(|(k, v)| format!("{k}={}", v[r]))
            .collect::<Vec<_>>()
            .join(", ")
    };

    let mut scripts = Vec::new();
    for panel in &PANELS {
        let series = ok_rows
            .iter()
            .map(|&r| panel_series(panel, &dir.join(&points[r]), label(r)))
            .collect::<Result<Vec<_>, _>>()?;
        let files = write_panel(out, panel.name, panel.title, panel.x.1, panel.y.1, &series)?;
        scripts.push(files[1].clone());
    }

    // Resistance against the first swept key, one series per combination
    // of the remaining keys.
    if let Some(first) = swept.first() {
        let mut groups: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for &r in &ok_rows {
            let rest = swept
                .iter()
                .zip(&swept_values)
                .skip(1)
                .map(|(k, v)| format!("{k}={}", v[r]))
                .collect::<Vec<_>>()
                .join(", ");
            groups.entry(rest).or_default().push((swept_values[0][r], lambda[r]));
        }
        let series: Vec<Series> = groups
            .into_iter()
            .map(|(label, points)| Series {
                label: if label.is_empty() { "λ".into() } else { label },
                points,
            })
            .collect();
        for name in RESISTANCE_PANELS {
            let files = write_panel(out, name, "Flow resistance", first, "λ", &series)?;
            scripts.push(files[1].clone());
        }
    }
    Ok(scripts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fake_run(dir: &Path) {
        let mut p = Table::new(&["phase", "t", "xi", "u", "w", "theta", "F"]);
        p.push_numbers(&[0.0, 0.0, 0.0, 1.0, 0.0, 0.5, 0.1]);
        p.push_numbers(&[0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
        p.push_numbers(&[1.5, 0.0, 0.0, 2.0, 0.0, 0.5, 0.1]);
        p.write(&dir.join(PROFILES_CSV)).unwrap();
        let mut t = Table::new(&["T", "t", "Q", "tau_w", "lambda"]);
        t.push_numbers(&[0.0, 0.0, 1.0, 2.0, 3.0]);
        t.write(&dir.join(TIMESERIES_CSV)).unwrap();
        let mut a = Table::new(&["z", "R", "tau_w", "Nu"]);
        a.push_numbers(&[0.0, 1.0, 2.0, 0.7]);
        a.write(&dir.join(AXIAL_CSV)).unwrap();
    }

    #[test]
    fn single_run_gives_seventeen_idempotent_scripts() {
        let dir = tempfile::tempdir().unwrap();
        fake_run(dir.path());
        let first = emit_plots(dir.path()).unwrap();
        assert_eq!(first.len(), 17);
        let snapshot: Vec<Vec<u8>> = first.iter().map(|p| std::fs::read(p).unwrap()).collect();
        let dat = std::fs::read_to_string(dir.path().join(PLOT_DIR).join("velocity_a.dat")).unwrap();
        assert_eq!(dat.lines().count(), 3, "phase-0 rows only:\n{dat}");
        let second = emit_plots(dir.path()).unwrap();
        let again: Vec<Vec<u8>> = second.iter().map(|p| std::fs::read(p).unwrap()).collect();
        assert_eq!(snapshot, again);
    }

    #[test]
    fn missing_column_is_named() {
        let dir = tempfile::tempdir().unwrap();
        fake_run(dir.path());
        let mut a = Table::new(&["z", "R", "tau_w"]);
        a.push_numbers(&[0.0, 1.0, 2.0]);
        a.write(&dir.path().join(AXIAL_CSV)).unwrap();
        match emit_plots(dir.path()) {
            Err(RunError::MissingColumn { column, .. }) => assert_eq!(column, "Nu"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_plots(dir.path()).is_err());
    }

    #[test]
    fn sweep_overlays_points() {
        let dir = tempfile::tempdir().unwrap();
        for k in 0..2 {
            let p = dir.path().join(format!("point_{k:03}"));
            std::fs::create_dir_all(&p).unwrap();
            fake_run(&p);
        }
        let mut s = Table::new(&[
            "point",
            "delta",
            "status",
            "Q_mean",
            "lambda_cycle",
            "tau_peak",
            "Nu_max",
            "u_center",
        ]);
        s.push(
            ["point_000", "1.0e-01", "ok", "1", "28", "3", "0.7", "1"]
                .map(String::from)
                .to_vec(),
        );
        s.push(
            ["point_001", "2.5e-01", "ok", "1", "46", "3", "0.7", "1"]
                .map(String::from)
                .to_vec(),
        );
        s.write(&dir.path().join(SWEEP_SUMMARY_CSV)).unwrap();
        let scripts = emit_plots(dir.path()).unwrap();
        assert_eq!(scripts.len(), 20);
        let gp = std::fs::read_to_string(dir.path().join(PLOT_DIR).join("velocity_a.gp")).unwrap();
        assert!(gp.contains("index 1"));
        assert!(gp.contains("delta=0.25"));
        let lam = std::fs::read_to_string(dir.path().join(PLOT_DIR).join("resistance_a.dat")).unwrap();
        assert!(lam.contains("4.600000000e+01"));
    }
}
