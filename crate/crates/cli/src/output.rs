//! Rendering of command results as `farkas 1`-style text or TSV.

use std::fmt::Write as _;

use clap::ValueEnum;
use farkas_core::instances::format::format_f64;
use farkas_core::instances::{write_instance, CertificateSection, InstanceFile};
use farkas_core::linalg::Vector;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Instance text followed by a `certificate` section.
    #[default]
    Text,
    /// Header row plus one tab-separated row per record.
    Tsv,
}

/// Exit status, ordered so that combining results takes the maximum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Negative = 1,
    Error = 2,
}

impl Status {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.header.join("\t"));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join("\t"));
        }
        out
    }
}

/// What a command produced: both renderings plus the exit status.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub table: Table,
    pub status: Status,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Tsv => self.table.render(),
        }
    }
}

pub fn num(x: f64) -> String {
    format_f64(x)
}

pub fn nums(v: &Vector<f64>) -> Vec<String> {
    v.iter().map(|&x| num(x)).collect()
}

/// Space-separated for text, comma-separated for a single TSV cell.
pub fn cell(v: &Vector<f64>) -> String {
    nums(v).join(",")
}

pub fn indices(idx: &[usize]) -> Vec<String> {
    idx.iter().map(|i| i.to_string()).collect()
}

/// Instance with a trailing section.
pub fn document(file: &InstanceFile, section: CertificateSection) -> String {
    let mut file = file.clone();
    file.certificate = Some(section);
    write_instance(&file)
}

/// A section on its own, for reports that have no instance.
pub fn section_only(section: &CertificateSection) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "certificate {}", section.kind);
    for (key, values) in &section.fields {
        if values.is_empty() {
            let _ = writeln!(out, "{key}");
        } else {
            let _ = writeln!(out, "{key} {}", values.join(" "));
        }
    }
    out
}
