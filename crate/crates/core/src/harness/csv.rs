//! Trace CSV.
//!
//! Columns: `t,y_0..y_{q-1},u_0..u_{m-1},psi_err,x_err,gamma_sq,gram_min_eig,eta`
//! followed, in full-dump mode, by `p_hat_*` and `x_hat_*`. Floats use 17
//! significant digits so that parsing reproduces the `f64` exactly.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

use super::run::TraceRecord;

fn num(out: &mut String, v: f64) {
    let _ = write!(out, ",{v:.16e}");
}

pub fn trace_to_csv(trace: &[TraceRecord]) -> String {
    let Some(first) = trace.first() else {
        return String::new();
    };
    let mut out = String::from("t");
    for i in 0..first.y.len() {
        let _ = write!(out, ",y_{i}");
    }
    for i in 0..first.u.len() {
        let _ = write!(out, ",u_{i}");
    }
    out.push_str(",psi_err,x_err,gamma_sq,gram_min_eig,eta");
    if let Some(p) = &first.p_hat {
        for i in 0..p.len() {
            let _ = write!(out, ",p_hat_{i}");
        }
    }
    if let Some(x) = &first.x_hat {
        for i in 0..x.len() {
            let _ = write!(out, ",x_hat_{i}");
        }
    }
    out.push('\n');

    for r in trace {
        let _ = write!(out, "{}", r.t);
        for v in r.y.iter().chain(&r.u) {
            num(&mut out, *v);
        }
        for v in [r.psi_err, r.x_err, r.gamma_sq, r.gram_min_eig] {
            num(&mut out, v);
        }
        let _ = write!(out, ",{}", u8::from(r.eta));
        for v in r.p_hat.iter().chain(&r.x_hat).flatten() {
            num(&mut out, *v);
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(trace: &[TraceRecord], path: impl AsRef<Path>) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::InsufficientSamples {
            needed: 1,
            available: 0,
        });
    }
    std::fs::write(path, trace_to_csv(trace))?;
    Ok(())
}

fn bad(line: usize, what: impl Into<String>) -> Error {
    Error::config(format!("csv line {line}"), what)
}

/// Parses a trace written by [`trace_to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<TraceRecord>> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad(1, "missing header"))?
        .split(',')
        .collect();
    let count = |prefix: &str| header.iter().filter(|h| h.starts_with(prefix)).count();
    let (q, m, np, nx) = (count("y_"), count("u_"), count("p_hat_"), count("x_hat_"));
    let width = 1 + q + m + 5 + np + nx;
    if header.len() != width || header[0] != "t" {
        return Err(bad(1, "unrecognized header"));
    }

    lines
        .enumerate()
        .map(|(k, line)| {
            let lineno = k + 2;
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != width {
                return Err(bad(
                    lineno,
                    format!("expected {width} cells, found {}", cells.len()),
                ));
            }
            let f = |i: usize| -> Result<f64> {
                cells[i]
                    .parse::<f64>()
                    .map_err(|e| bad(lineno, format!("column {}: {e}", header[i])))
            };
            let fs = |start: usize, len: usize| -> Result<Vec<f64>> {
                (start..start + len).map(f).collect()
            };
            let t = cells[0]
                .parse::<usize>()
                .map_err(|e| bad(lineno, e.to_string()))?;
            let base = 1 + q + m;
            let eta = match cells[base + 4] {
                "0" => false,
                "1" => true,
                other => return Err(bad(lineno, format!("eta must be 0 or 1, found {other}"))),
            };
            let tail = base + 5;
            Ok(TraceRecord {
                t,
                y: fs(1, q)?,
                u: fs(1 + q, m)?,
                psi_err: f(base)?,
                x_err: f(base + 1)?,
                gamma_sq: f(base + 2)?,
                gram_min_eig: f(base + 3)?,
                eta,
                p_hat: if np > 0 { Some(fs(tail, np)?) } else { None },
                x_hat: if nx > 0 {
                    Some(fs(tail + np, nx)?)
                } else {
                    None
                },
            })
        })
        .collect()
}
