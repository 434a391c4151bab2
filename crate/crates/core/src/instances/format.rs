//! The `farkas 1` text format.
//!
//! ```text
//! farkas 1            # magic and version
//! 2 3                 # m n
//! 1 0 1               # m rows of A, n entries each
//! 0 1 1
//! 2 3                 # b, m entries
//! certificate membership   # optional section
//! x 0 1 2
//! ```
//!
//! Entries are decimals (as accepted by Rust's `f64` parser, finite only) or
//! exact rationals `p/q`. `#` starts a comment. An optional trailing
//! `certificate <kind>` line opens a section of `key value…` lines.

use std::fmt::{self, Write as _};

use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::cone::ConeInstance;
use crate::linalg::{Matrix, Vector};
use crate::oracle::{self, ExactInstance, ExactMatrix, Rational};
use crate::scalar::Real;

pub const MAGIC: &str = "farkas";
pub const VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("entry cannot be represented: {0}")]
    Value(String),
}

/// One matrix or vector entry as written in the file.
#[derive(Clone, Debug)]
pub enum Entry {
    Decimal(f64),
    Ratio(Rational),
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Entry::Decimal(a), Entry::Decimal(b)) => a.to_bits() == b.to_bits(),
            (Entry::Ratio(a), Entry::Ratio(b)) => a == b,
            _ => false,
        }
    }
}

impl Entry {
    pub fn to_f64(&self) -> f64 {
        match self {
            Entry::Decimal(x) => *x,
            Entry::Ratio(q) => q.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Exact value; decimals convert from their binary `f64` value so the
    /// exact and floating views describe the same instance.
    pub fn to_rational(&self) -> Result<Rational, FormatError> {
        match self {
            Entry::Decimal(x) => {
                oracle::from_f64(*x).map_err(|e| FormatError::Value(e.to_string()))
            }
            Entry::Ratio(q) => Ok(q.clone()),
        }
    }

    fn parse(token: &str) -> Result<Self, String> {
        if token.contains('/') {
            return oracle::parse_rational(token)
                .map(Entry::Ratio)
                .ok_or_else(|| format!("invalid rational '{token}'"));
        }
        match token.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Entry::Decimal(x)),
            Ok(_) => Err(format!("non-finite entry '{token}'")),
            Err(_) => Err(format!("invalid number '{token}'")),
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Entry::Decimal(x) => f.write_str(&format_f64(*x)),
            Entry::Ratio(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

/// Shortest text that parses back to the same bits.
pub fn format_f64(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 24 {
        plain
    } else {
        format!("{x:e}")
    }
}

/// Free-form trailing section: `certificate <kind>` followed by `key values…`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CertificateSection {
    pub kind: String,
    pub fields: Vec<(String, Vec<String>)>,
}

impl CertificateSection {
    pub fn new(kind: impl Into<String>) -> Self {
        Self { kind: kind.into(), fields: Vec::new() }
    }

    pub fn push(&mut self, key: impl Into<String>, values: Vec<String>) {
        self.fields.push((key.into(), values));
    }

    pub fn get(&self, key: &str) -> Option<&[String]> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }
}

/// Parsed contents of a `farkas 1` document.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries of `A`.
    pub a: Vec<Entry>,
    pub b: Vec<Entry>,
    pub certificate: Option<CertificateSection>,
}

impl InstanceFile {
    pub fn from_instance<T: Real>(inst: &ConeInstance<T>) -> Self {
        let dec = |x: &T| Entry::Decimal(x.to_f64_lossy());
        Self {
            rows: inst.rows(),
            cols: inst.cols(),
            a: inst.a().to_row_major().iter().map(dec).collect(),
            b: inst.b().iter().map(dec).collect(),
            certificate: None,
        }
    }

    pub fn from_exact(inst: &ExactInstance) -> Self {
        let (m, n) = (inst.a.rows(), inst.a.cols());
        let mut a = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                a.push(Entry::Ratio(inst.a.get(i, j).clone()));
            }
        }
        Self {
            rows: m,
            cols: n,
            a,
            b: inst.b.iter().cloned().map(Entry::Ratio).collect(),
            certificate: None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.a.iter().chain(&self.b).any(|e| matches!(e, Entry::Ratio(_)))
    }

    /// Whether every entry is an integer (exact corpora).
    pub fn is_integral(&self) -> bool {
        self.a.iter().chain(&self.b).all(|e| match e {
            Entry::Decimal(x) => x.fract() == 0.0,
            Entry::Ratio(q) => q.denom().is_one(),
        })
    }

    pub fn to_instance<T: Real>(&self) -> Result<ConeInstance<T>, FormatError> {
        let conv = |e: &Entry| {
            let v = T::from_f64(e.to_f64()).unwrap_or_else(T::nan);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FormatError::Value(format!("{e} overflows the scalar type")))
            }
        };
        let a: Vec<T> = self.a.iter().map(conv).collect::<Result<_, _>>()?;
        let b: Vec<T> = self.b.iter().map(conv).collect::<Result<_, _>>()?;
        let a = Matrix::from_row_major(self.rows, self.cols, &a)
            .map_err(|e| FormatError::Value(e.to_string()))?;
        let b = Vector::new(b).map_err(|e| FormatError::Value(e.to_string()))?;
        ConeInstance::new(a, b).map_err(|e| FormatError::Value(e.to_string()))
    }

    pub fn to_exact(&self) -> Result<ExactInstance, FormatError> {
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let row = self.a[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(Entry::to_rational)
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(row);
        }
        let b = self.b.iter().map(Entry::to_rational).collect::<Result<Vec<_>, _>>()?;
        let a = ExactMatrix::from_rows(&rows).map_err(|e| FormatError::Value(e.to_string()))?;
        ExactInstance::new(a, b).map_err(|e| FormatError::Value(e.to_string()))
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token { text: &content[s..pos], column: content[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(pos);
        }
    }
    out
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse { line, column, message: message.into() }
}

fn parse_row(
    line: usize,
    tokens: &[Token<'_>],
    expected: usize,
) -> Result<Vec<Entry>, FormatError> {
    if tokens.len() != expected {
        return Err(FormatError::DimensionMismatch { line, expected, found: tokens.len() });
    }
    tokens
        .iter()
        .map(|t| Entry::parse(t.text).map_err(|msg| parse_error(line, t.column, msg)))
        .collect()
}

fn parse_count(line: usize, token: &Token<'_>, what: &str) -> Result<usize, FormatError> {
    match token.text.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(parse_error(line, token.column, format!("{what} must be a positive integer"))),
    }
}

/// Parses a `farkas 1` document.
pub fn read_instance(text: &str) -> Result<InstanceFile, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, tokenize(l)))
        .filter(|(_, t)| !t.is_empty());
    let last_line = text.lines().count();
    let missing = |what: &str| parse_error(last_line + 1, 1, format!("missing {what}"));

    let (ln, header) = lines.next().ok_or_else(|| missing("header"))?;
    if header[0].text != MAGIC {
        return Err(parse_error(ln, header[0].column, format!("expected '{MAGIC}'")));
    }
    match header.get(1) {
        Some(t) if t.text == VERSION => {}
        Some(t) => return Err(parse_error(ln, t.column, format!("unsupported version '{}'", t.text))),
        None => return Err(parse_error(ln, 1, "missing version")),
    }
    if let Some(extra) = header.get(2) {
        return Err(parse_error(ln, extra.column, "unexpected token after version"));
    }

    let (ln, dims) = lines.next().ok_or_else(|| missing("dimensions"))?;
    if dims.len() != 2 {
        return Err(FormatError::DimensionMismatch { line: ln, expected: 2, found: dims.len() });
    }
    let rows = parse_count(ln, &dims[0], "m")?;
    let cols = parse_count(ln, &dims[1], "n")?;

    let mut a = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let (ln, tokens) = lines.next().ok_or_else(|| missing(&format!("row {} of A", i + 1)))?;
        a.extend(parse_row(ln, &tokens, cols)?);
    }
    let (ln, tokens) = lines.next().ok_or_else(|| missing("b row"))?;
    let b = parse_row(ln, &tokens, rows)?;

    let mut certificate = None;
    if let Some((ln, tokens)) = lines.next() {
        if tokens[0].text != "certificate" {
            return Err(parse_error(ln, tokens[0].column, "unexpected content after b"));
        }
        let kind = tokens
            .get(1)
            .ok_or_else(|| parse_error(ln, tokens[0].column, "missing certificate kind"))?;
        let mut section = CertificateSection::new(kind.text);
        for (_, tokens) in lines {
            section.push(tokens[0].text, tokens[1..].iter().map(|t| t.text.to_string()).collect());
        }
        certificate = Some(section);
    }

    Ok(InstanceFile { rows, cols, a, b, certificate })
}

fn join<I: IntoIterator<Item = D>, D: fmt::Display>(items: I) -> String {
    let mut s = String::new();
    for (k, item) in items.into_iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{item}");
    }
    s
}

/// Serializes a document; `read_instance(&write_instance(f)) == f`.
pub fn write_instance(file: &InstanceFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "{} {}", file.rows, file.cols);
    for row in file.a.chunks(file.cols) {
        let _ = writeln!(out, "{}", join(row));
    }
    let _ = writeln!(out, "{}", join(&file.b));
    if let Some(section) = &file.certificate {
        let _ = writeln!(out, "certificate {}", section.kind);
        for (key, values) in &section.fields {
            if values.is_empty() {
                let _ = writeln!(out, "{key}");
            } else {
                let _ = writeln!(out, "{key} {}", join(values));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_identity_instance() {
        let f = read_instance("farkas 1\n2 2\n1 0\n0 1\n1 1\n").unwrap();
        let inst = f.to_instance::<f64>().unwrap();
        assert_eq!(inst.a(), &Matrix::identity(2));
        assert_eq!(inst.b().as_slice(), &[1.0, 1.0]);
        assert!(f.certificate.is_none());
    }

    #[test]
    fn missing_b_row_is_parse_error() {
        let err = read_instance("farkas 1\n2 2\n1 0\n0 1\n").unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 5, .. }), "{err:?}");
    }

    #[test]
    fn rationals_are_preserved() {
        let text = "farkas 1\n1 2\n1/3 2\n-5/10\n";
        let f = read_instance(text).unwrap();
        assert_eq!(f.a[0], Entry::Ratio(oracle::rational(1, 3)));
        assert_eq!(f.b[0], Entry::Ratio(oracle::rational(-1, 2)));
        assert!(f.is_rational());
        let written = write_instance(&f);
        assert_eq!(written, "farkas 1\n1 2\n1/3 2\n-1/2\n");
        assert_eq!(read_instance(&written).unwrap(), f);
        let exact = f.to_exact().unwrap();
        assert_eq!(exact.a.get(0, 0), &oracle::rational(1, 3));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\nfarkas 1 # magic\n\n1 1\n  2   # A\n3\n";
        let f = read_instance(text).unwrap();
        assert_eq!((f.rows, f.cols), (1, 1));
        assert_eq!(f.b, vec![Entry::Decimal(3.0)]);
    }

    #[test]
    fn error_positions() {
        match read_instance("farkas 1\n1 2\n1 x\n0\n") {
            Err(FormatError::Parse { line: 3, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            read_instance("farkas 1\n2 2\n1 0 0\n0 1\n1 1\n"),
            Err(FormatError::DimensionMismatch { line: 3, expected: 2, found: 3 })
        ));
        assert!(matches!(
            read_instance("farkas 2\n1 1\n1\n1\n"),
            Err(FormatError::Parse { line: 1, column: 8, .. })
        ));
        assert!(matches!(read_instance("lp 1\n"), Err(FormatError::Parse { line: 1, column: 1, .. })));
        assert!(matches!(read_instance("farkas 1\n0 1\n"), Err(FormatError::Parse { line: 2, .. })));
        assert!(matches!(read_instance("farkas 1\n1 1\ninf\n1\n"), Err(FormatError::Parse { .. })));
        assert!(matches!(read_instance("farkas 1\n1 1\n1\n1\n7\n"), Err(FormatError::Parse { line: 5, .. })));
        assert!(matches!(read_instance(""), Err(FormatError::Parse { line: 1, .. })));
    }

    #[test]
    fn certificate_section_round_trip() {
        let mut f = read_instance("farkas 1\n1 1\n1\n-1\n").unwrap();
        let mut section = CertificateSection::new("separation");
        section.push("y", vec!["-1".into()]);
        section.push("delta", vec!["1".into()]);
        f.certificate = Some(section);
        let text = write_instance(&f);
        assert!(text.ends_with("certificate separation\ny -1\ndelta 1\n"));
        let back = read_instance(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.certificate.unwrap().get("y"), Some(&["-1".to_string()][..]));
    }

    #[test]
    fn formats_extreme_values() {
        for x in [1e300, -2.5e-300, 0.1, -0.0, 123456789.125, f64::MIN_POSITIVE] {
            let s = format_f64(x);
            assert!(s.len() <= 24, "{s}");
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    proptest! {
        #[test]
        fn decimal_round_trip_is_bit_exact(
            (m, n, entries) in (1usize..4, 1usize..4).prop_flat_map(|(m, n)| {
                (Just(m), Just(n), proptest::collection::vec(
                    prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -10.0f64..10.0],
                    m * n + m,
                ))
            })
        ) {
            let a = Matrix::from_row_major(m, n, &entries[..m * n]).unwrap();
            let b = Vector::new(entries[m * n..].to_vec()).unwrap();
            let inst = ConeInstance::new(a, b).unwrap();
            let file = InstanceFile::from_instance(&inst);
            let back = read_instance(&write_instance(&file)).unwrap();
            prop_assert_eq!(&back, &file);
            let again = back.to_instance::<f64>().unwrap();
            for (x, y) in again.a().to_row_major().iter().zip(inst.a().to_row_major()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }

        #[test]
        fn rational_round_trip(p in proptest::collection::vec((-50i64..50, 1i64..20), 2)) {
            let q: Vec<Rational> = p.iter().map(|&(a, b)| oracle::rational(a, b)).collect();
            let exact = ExactInstance::new(
                ExactMatrix::from_rows(&[vec![q[0].clone()]]).unwrap(),
                vec![q[1].clone()],
            ).unwrap();
            let file = InstanceFile::from_exact(&exact);
            let back = read_instance(&write_instance(&file)).unwrap();
            prop_assert_eq!(back.to_exact().unwrap(), exact);
        }
    }
}
