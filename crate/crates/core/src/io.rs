//! File formats: signals, sample lists and the CSV outputs of the CLI.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::community::Cover;
use crate::error::{Error, Result};
use crate::graph::{load_graph, Graph, VertexSet};
use crate::pum::Signal;

pub fn read_graph_file(path: &Path) -> Result<Graph> {
    load_graph(BufReader::new(File::open(path)?))
}

fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    reader.lines().enumerate().map(|(i, l)| (i + 1, l))
}

/// Reads `vertex_id,value` rows. A non-numeric first row is taken as a
/// header; every vertex of the graph must appear exactly once.
pub fn read_signal<R: BufRead>(reader: R, n: usize) -> Result<Signal> {
    let mut values: Vec<Option<f64>> = vec![None; n];
    let mut first_row = true;
    for (line_no, line) in content_lines(reader) {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let is_first = std::mem::replace(&mut first_row, false);
        let parse_err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err("expected `vertex_id,value`".into()));
        }
        let (id, value) = match (fields[0].parse::<usize>(), fields[1].parse::<f64>()) {
            (Ok(id), Ok(value)) => (id, value),
            _ if is_first => continue,
            _ => return Err(parse_err(format!("invalid row {trimmed:?}"))),
        };
        if id >= n {
            return Err(Error::OutOfRange { vertex: id, n });
        }
        if !value.is_finite() {
            return Err(parse_err(format!("value {value} is not finite")));
        }
        if values[id].replace(value).is_some() {
            return Err(parse_err(format!("duplicate value for vertex {id}")));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or(Error::MissingSignalValue(v)))
        .collect::<Result<Vec<f64>>>()?;
    Signal::new(values)
}

pub fn read_signal_file(path: &Path, n: usize) -> Result<Signal> {
    read_signal(BufReader::new(File::open(path)?), n)
}

/// Reads one vertex id per line (blank lines and `#` comments skipped).
pub fn read_samples<R: BufRead>(reader: R, n: usize) -> Result<VertexSet> {
    let mut ids = Vec::new();
    for (line_no, line) in content_lines(reader) {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let id: usize = trimmed.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("invalid vertex id {trimmed:?}"),
        })?;
        ids.push(id);
    }
    if ids.is_empty() {
        return Err(Error::EmptySet);
    }
    VertexSet::checked(ids, n)
}

pub fn read_samples_file(path: &Path, n: usize) -> Result<VertexSet> {
    read_samples(BufReader::new(File::open(path)?), n)
}

pub fn write_signal<W: Write>(mut out: W, signal: &Signal) -> Result<()> {
    writeln!(out, "vertex_id,value")?;
    for (v, x) in signal.values().iter().enumerate() {
        writeln!(out, "{v},{x}")?;
    }
    Ok(())
}

pub fn write_samples<W: Write>(mut out: W, samples: &VertexSet) -> Result<()> {
    for v in samples.iter() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

/// Per-vertex plot data: core community, `;`-separated overlap memberships
/// and whether the vertex is an interpolation node.
pub fn write_plot_data<W: Write>(mut out: W, cover: &Cover) -> Result<()> {
    let n = cover.n_vertices;
    let mut core_of = vec![usize::MAX; n];
    let mut overlaps: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in &cover.communities {
        for v in c.core.iter() {
            core_of[v] = c.id;
        }
        for v in c.overlap.iter() {
            overlaps[v].push(c.id);
        }
    }
    writeln!(out, "vertex_id,community,overlap_communities,is_sample")?;
    for v in 0..n {
        let ov: Vec<String> = overlaps[v].iter().map(|c| c.to_string()).collect();
        writeln!(
            out,
            "{v},{},{},{}",
            core_of[v],
            ov.join(";"),
            u8::from(cover.samples.contains(v))
        )?;
    }
    Ok(())
}

/// `vertex_id,truth,approximant,abs_error` rows.
pub fn write_approximation<W: Write>(mut out: W, truth: &Signal, approx: &Signal) -> Result<()> {
    if truth.len() != approx.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: approx.len(),
        });
    }
    writeln!(out, "vertex_id,truth,approximant,abs_error")?;
    for (v, (t, a)) in truth.values().iter().zip(approx.values()).enumerate() {
        writeln!(out, "{v},{t},{a},{}", (t - a).abs())?;
    }
    Ok(())
}
