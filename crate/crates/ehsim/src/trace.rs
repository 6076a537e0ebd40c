//! CSV trace files.
//!
//! Values are written in scientific notation with 17 significant digits, so
//! reading a file back reproduces every sample bit for bit.

use std::io::{Read, Write};

use ehsim_core::dynamics::{SimTrace, TraceRecord};
use ehsim_core::teleop::{SessionRecord, SessionTrace};

use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 5] = [
    "t_ms",
    "target_force_N",
    "actual_force_N",
    "voltage_kV",
    "displacement_mm",
];

pub const TELEOP_HEADER: [&str; 8] = [
    "t_ms",
    "target_force_N",
    "actual_force_N",
    "voltage_kV",
    "displacement_mm",
    "slave_force_N",
    "slave_position_mm",
    "latency_ms",
];

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a header row and numeric rows.
pub fn write_table<W: Write, const N: usize>(
    out: W,
    header: &[&str; N],
    rows: impl IntoIterator<Item = [f64; N]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_value(v)))?;
    }
    w.flush().map_err(Error::io("csv output"))?;
    Ok(())
}

pub fn write_trace<W: Write>(out: W, trace: &SimTrace) -> Result<()> {
    write_table(
        out,
        &TRACE_HEADER,
        trace.records.iter().map(|r| {
            [
                r.t,
                r.target_force,
                r.actual_force,
                r.voltage,
                r.displacement,
            ]
        }),
    )
}

/// Master-side columns followed by the slave's force, position and the
/// age of the newest slave report.
pub fn write_session_trace<W: Write>(out: W, trace: &SessionTrace) -> Result<()> {
    write_table(
        out,
        &TELEOP_HEADER,
        trace.records.iter().map(|r| {
            [
                r.t,
                r.target_force,
                r.master_force,
                r.voltage,
                r.master_displacement,
                r.slave_force,
                r.slave_position,
                r.latency,
            ]
        }),
    )
}

pub fn trace_to_bytes(trace: &SimTrace) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_trace(&mut buf, trace)?;
    Ok(buf)
}

pub fn session_to_bytes(trace: &SessionTrace) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_session_trace(&mut buf, trace)?;
    Ok(buf)
}

/// Reads a numeric table whose header must equal `header`.
pub fn read_table<R: Read, const N: usize>(input: R, header: &[&str; N]) -> Result<Vec<[f64; N]>> {
    let mut r = csv::Reader::from_reader(input);
    let got = r.headers()?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Trace(format!(
            "header `{}` does not match `{}`",
            got.iter().collect::<Vec<_>>().join(","),
            header.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let mut row = [0.0; N];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.trim().parse().map_err(|_| {
                Error::Trace(format!("row {}: `{field}` is not a number", i + 1))
            })?;
        }
        rows.push(row);
    }
    Ok(rows)
}

fn sample_period(times: &[f64]) -> f64 {
    match times {
        [a, b, ..] => b - a,
        _ => 1.0,
    }
}

pub fn read_trace<R: Read>(input: R) -> Result<SimTrace> {
    let rows = read_table(input, &TRACE_HEADER)?;
    let times: Vec<f64> = rows.iter().take(2).map(|r| r[0]).collect();
    Ok(SimTrace {
        sample_period: sample_period(&times),
        records: rows
            .iter()
            .map(|r| TraceRecord {
                t: r[0],
                target_force: r[1],
                actual_force: r[2],
                voltage: r[3],
                displacement: r[4],
            })
            .collect(),
    })
}

/// Inverse of [`write_session_trace`]. The stale flag is not stored and
/// reads back as `false`.
pub fn read_session_trace<R: Read>(input: R) -> Result<SessionTrace> {
    let rows = read_table(input, &TELEOP_HEADER)?;
    let times: Vec<f64> = rows.iter().take(2).map(|r| r[0]).collect();
    Ok(SessionTrace {
        sample_period: sample_period(&times),
        records: rows
            .iter()
            .map(|r| SessionRecord {
                t: r[0],
                target_force: r[1],
                master_force: r[2],
                voltage: r[3],
                master_displacement: r[4],
                slave_force: r[5],
                slave_position: r[6],
                latency: r[7],
                stale: false,
            })
            .collect(),
    })
}
