//! Report generation: CSV tables and static SVG line plots derived from a
//! persisted run record.  Tables contain no timestamps, so identical
//! records yield byte-identical tables.

use std::path::Path;

use crate::error::Result;
use crate::plot::{plot_lines, Series};
use crate::sweep::RunRecord;

fn write_modulus_csv(record: &RunRecord, out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("modulus.csv"))?;
    w.write_record([
        "p",
        "n",
        "value",
        "iterations",
        "certificate_low",
        "certificate_high",
        "status",
    ])?;
    for c in &record.cells {
        w.write_record([
            format!("{}", c.p),
            format!("{}", c.n),
            format!("{:.12e}", c.value),
            format!("{}", c.iterations),
            format!("{:.12e}", c.cert_low),
            format!("{:.12e}", c.cert_high),
            c.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_weights_csv(record: &RunRecord, out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("weights.csv"))?;
    w.write_record(["n", "sup", "n_sup", "vol_p", "admissible", "min_length"])?;
    for r in &record.weight_rows {
        w.write_record([
            format!("{}", r.n),
            format!("{:.12e}", r.sup),
            format!("{:.12e}", r.n_sup),
            format!("{:.12e}", r.vol_p),
            format!("{}", r.admissible),
            format!("{:.12e}", r.min_length),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn write_acceptance_csv(record: &RunRecord, out: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(out.join("acceptance.csv"))?;
    w.write_record(["check", "pass"])?;
    for c in &record.checks {
        w.write_record([c.name.clone(), format!("{}", c.pass)])?;
    }
    w.flush()?;
    Ok(())
}

fn modulus_plot(record: &RunRecord, out: &Path) -> Result<()> {
    let mut ps: Vec<f64> = record.cells.iter().map(|c| c.p).collect();
    ps.dedup();
    let series: Vec<Series> = ps
        .iter()
        .map(|&p| {
            let points = record
                .cells
                .iter()
                .filter(|c| c.p == p && c.value.is_finite())
                .map(|c| (f64::from(c.n), c.value))
                .collect();
            Series {
                label: format!("p = {p}"),
                points,
            }
        })
        .collect();
    plot_lines(
        &out.join("modulus_vs_n.svg"),
        "Modulus vs cover scale",
        "n",
        "Mod_p",
        &series,
    )
}

fn weight_plots(record: &RunRecord, out: &Path) -> Result<()> {
    let sup: Vec<(f64, f64)> = record
        .weight_rows
        .iter()
        .map(|r| (f64::from(r.n), r.n_sup))
        .collect();
    plot_lines(
        &out.join("sup_vs_n.svg"),
        "Scaled sup-norm vs cover scale",
        "n",
        "n * sup",
        &[Series {
            label: "n * sup".into(),
            points: sup,
        }],
    )?;
    let vols: Vec<(f64, f64)> = record
        .weight_rows
        .iter()
        .map(|r| (f64::from(r.n), r.vol_p))
        .collect();
    plot_lines(
        &out.join("volume_vs_n.svg"),
        "Weight volume vs cover scale",
        "n",
        "Vol_p",
        &[Series {
            label: "Vol_p".into(),
            points: vols,
        }],
    )
}

fn recursion_plot(record: &RunRecord, out: &Path) -> Result<()> {
    let Some(rec) = &record.recursion else {
        return Ok(());
    };
    let points: Vec<(f64, f64)> = rec
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| (i as f64, v))
        .collect();
    plot_lines(
        &out.join("recursion.svg"),
        "One-circle volume recursion",
        "n",
        "a_n",
        &[Series {
            label: format!("p = {}", rec.p),
            points,
        }],
    )
}

/// Emit all tables and plots for a record into `out`.
pub fn emit_report(record: &RunRecord, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    write_modulus_csv(record, out)?;
    write_weights_csv(record, out)?;
    write_acceptance_csv(record, out)?;
    if !record.cells.is_empty() {
        modulus_plot(record, out)?;
    }
    if !record.weight_rows.is_empty() {
        weight_plots(record, out)?;
    }
    recursion_plot(record, out)?;
    Ok(())
}
