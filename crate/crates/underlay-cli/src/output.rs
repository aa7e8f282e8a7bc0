//! Output manifests and the tool's CSV dialect.
//!
//! Every file the tool emits starts with `#`-prefixed manifest lines
//! (tool version, subcommand, resolved settings, seed) followed by one
//! header row and plain comma-separated data rows. Floats are written
//! with shortest round-trip formatting, so re-running with the embedded
//! seed reproduces the file byte for byte apart from the timestamp line.

use std::io::{self, BufRead, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};

/// Provenance header embedded in every output file.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub subcommand: &'static str,
    /// Resolved settings echoed as `key: value` pairs, in print order.
    pub entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(subcommand: &'static str) -> Self {
        RunManifest { subcommand, entries: Vec::new() }
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn write_header(&self, w: &mut impl Write) -> io::Result<()> {
        writeln!(w, "# tool: underlay {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# subcommand: {}", self.subcommand)?;
        for (key, value) in &self.entries {
            writeln!(w, "# {key}: {value}")?;
        }
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        writeln!(w, "# timestamp_unix: {stamp}")?;
        Ok(())
    }
}

/// Write one CSV document: manifest, header row, data rows.
pub fn write_csv(
    w: &mut impl Write,
    manifest: &RunManifest,
    header: &[&str],
    rows: &[Vec<String>],
) -> io::Result<()> {
    manifest.write_header(w)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// Parsed CSV document.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvDocument {
    /// Manifest pairs in file order, timestamp included.
    pub manifest: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDocument {
    pub fn manifest_value(&self, key: &str) -> Option<&str> {
        self.manifest.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Column index by header name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// All values of one column parsed as floats.
    pub fn float_column(&self, name: &str) -> Result<Vec<f64>> {
        let index = self
            .column(name)
            .with_context(|| format!("no column named {name}"))?;
        self.rows
            .iter()
            .map(|row| {
                row.get(index)
                    .with_context(|| format!("row too short for column {name}"))?
                    .parse::<f64>()
                    .with_context(|| format!("bad float in column {name}"))
            })
            .collect()
    }
}

/// Parse a document produced by [`write_csv`].
pub fn read_csv(reader: impl BufRead) -> Result<CsvDocument> {
    let mut manifest = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for line in reader.lines() {
        let line = line.context("cannot read output line")?;
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            match comment.trim_start().split_once(": ") {
                Some((key, value)) => manifest.push((key.to_string(), value.to_string())),
                None => manifest.push((comment.trim().to_string(), String::new())),
            }
            continue;
        }
        let fields: Vec<String> = line.split(',').map(str::to_string).collect();
        match &header {
            None => header = Some(fields),
            Some(head) => {
                if fields.len() != head.len() {
                    bail!("row has {} fields, header has {}", fields.len(), head.len());
                }
                rows.push(fields);
            }
        }
    }
    let header = header.context("no header row found")?;
    Ok(CsvDocument { manifest, header, rows })
}

/// Format with six significant digits, `%g` style.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let text = if !(-4..6).contains(&exponent) {
        let s = format!("{x:.5e}");
        // trim trailing zeros in the mantissa
        match s.split_once('e') {
            Some((mantissa, exp)) => {
                format!("{}e{}", mantissa.trim_end_matches('0').trim_end_matches('.'), exp)
            }
            None => s,
        }
    } else {
        let decimals = (5 - exponent).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    text
}
