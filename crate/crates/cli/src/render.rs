//! Table and CSV rendering of status and report documents.

use std::io::Write;

use clap::ValueEnum;
use fdes_core::{FdesEngine, FdesState, IndicatorId, Report, TermLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
}

fn num(x: Option<f64>, digits: usize) -> String {
    x.map(|v| format!("{v:.digits$}")).unwrap_or_else(|| "-".into())
}

fn term(t: Option<TermLabel>) -> String {
    t.map(|t| t.code().to_string()).unwrap_or_else(|| "-".into())
}

/// One row per indicator, chain stage and final value.
fn status_rows(engine: &FdesEngine, state: &FdesState, digits: usize) -> Vec<[String; 4]> {
    let var = engine.variable();
    let mut rows = Vec::new();
    for id in IndicatorId::ALL {
        let acc = state.accumulator(id);
        rows.push([
            id.code().to_string(),
            num(acc.current(), digits),
            term(acc.current().map(|x| var.round_to_term(x))),
            acc.update_count().to_string(),
        ]);
    }
    for (k, y) in state.chain().iter().enumerate() {
        rows.push([
            format!("y{}", k + 1),
            num(*y, digits),
            term(y.map(|x| var.round_to_term(x))),
            String::new(),
        ]);
    }
    let fin = engine.final_out(state).ok();
    rows.push([
        "final".into(),
        num(fin.map(|f| f.crisp), digits),
        term(fin.map(|f| f.term)),
        state.record_count().to_string(),
    ]);
    rows
}

pub fn write_status(
    out: &mut dyn Write,
    engine: &FdesEngine,
    student: &str,
    state: &FdesState,
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Table => {
            let last = state.last_update_day().map(|d| d.to_string()).unwrap_or_else(|| "-".into());
            writeln!(out, "student {student}  records {}  last day {last}", state.record_count())?;
            writeln!(out, "{:<8} {:>10} {:<5} {:>7}", "stage", "crisp", "term", "records")?;
            for [a, b, c, d] in status_rows(engine, state, 3) {
                writeln!(out, "{a:<8} {b:>10} {c:<5} {d:>7}")?;
            }
            Ok(())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["stage", "crisp", "term", "records"])?;
            for row in status_rows(engine, state, 6) {
                w.write_record(row.iter().map(|c| if c == "-" { "" } else { c.as_str() }))?;
            }
            w.flush()
        }
    }
}

pub fn write_report(
    out: &mut dyn Write,
    student: &str,
    course: &str,
    report: &Report,
    format: Format,
) -> std::io::Result<()> {
    match format {
        Format::Table => {
            writeln!(out, "End-of-term report: {student} ({course})")?;
            writeln!(out)?;
            for ind in &report.indicators {
                writeln!(
                    out,
                    "{}  {:<58} {:>8} {:<4} ({} records)",
                    ind.id,
                    ind.description,
                    num(ind.value, 3),
                    term(ind.term),
                    ind.records
                )?;
            }
            writeln!(out)?;
            let chain: Vec<String> = report.chain.iter().map(|y| num(*y, 3)).collect();
            writeln!(out, "chain y1..y4: {}", chain.join("  "))?;
            match &report.final_out {
                Some(f) => writeln!(
                    out,
                    "final: {:.3} {} ({})",
                    f.crisp,
                    f.term,
                    f.term.description()
                )?,
                None => writeln!(out, "final: no records")?,
            }
            Ok(())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["indicator", "description", "crisp", "term", "records"])?;
            for ind in &report.indicators {
                w.write_record([
                    ind.id.code().to_string(),
                    ind.description.clone(),
                    ind.value.map(|v| format!("{v:.6}")).unwrap_or_default(),
                    ind.term.map(|t| t.code().to_string()).unwrap_or_default(),
                    ind.records.to_string(),
                ])?;
            }
            let fin = report.final_out.as_ref();
            w.write_record([
                "final".to_string(),
                "combined evaluation".to_string(),
                fin.map(|f| format!("{:.6}", f.crisp)).unwrap_or_default(),
                fin.map(|f| f.term.code().to_string()).unwrap_or_default(),
                report.record_count.to_string(),
            ])?;
            w.flush()
        }
    }
}
