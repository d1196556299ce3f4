//! Touchstone v1.1 (`.s2p`, `.s4p`) and CSV sweep files.

use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::filterlab::{SweepResult, DB_FLOOR};
use crate::mixedmode::SParams4;
use crate::netcore::{mag_db, phase_deg, SParams2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    GHz,
}

impl FreqUnit {
    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    fn token(self) -> &'static str {
        match self {
            FreqUnit::Hz => "HZ",
            FreqUnit::KHz => "KHZ",
            FreqUnit::MHz => "MHZ",
            FreqUnit::GHz => "GHZ",
        }
    }
}

impl FromStr for FreqUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "HZ" => Ok(FreqUnit::Hz),
            "KHZ" => Ok(FreqUnit::KHz),
            "MHZ" => Ok(FreqUnit::MHz),
            "GHZ" => Ok(FreqUnit::GHz),
            _ => Err(Error::usage(format!("unknown frequency unit '{s}'"))),
        }
    }
}

/// Number pair encoding of each complex entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    /// Real, imaginary.
    Ri,
    /// Linear magnitude, angle in degrees.
    Ma,
    /// dB magnitude, angle in degrees.
    Db,
}

impl DataFormat {
    fn token(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    fn decode(self, a: f64, b: f64) -> Complex64 {
        match self {
            DataFormat::Ri => Complex64::new(a, b),
            DataFormat::Ma => Complex64::from_polar(a, b.to_radians()),
            DataFormat::Db => Complex64::from_polar(10f64.powf(a / 20.0), b.to_radians()),
        }
    }

    fn encode(self, z: Complex64) -> (f64, f64) {
        match self {
            DataFormat::Ri => (z.re, z.im),
            DataFormat::Ma => (z.norm(), phase_deg(z)),
            DataFormat::Db => {
                let db = if z.norm() == 0.0 { -999.0 } else { mag_db(z) };
                (db, phase_deg(z))
            }
        }
    }
}

impl FromStr for DataFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RI" => Ok(DataFormat::Ri),
            "MA" => Ok(DataFormat::Ma),
            "DB" => Ok(DataFormat::Db),
            _ => Err(Error::usage(format!("unknown data format '{s}'"))),
        }
    }
}

/// Contents of the `#` option line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionLine {
    pub unit: FreqUnit,
    pub format: DataFormat,
    pub z_ref: f64,
}

impl Default for OptionLine {
    fn default() -> Self {
        OptionLine {
            unit: FreqUnit::GHz,
            format: DataFormat::Ma,
            z_ref: 50.0,
        }
    }
}

fn parse_option_line(body: &str, line: usize) -> Result<OptionLine> {
    let mut opt = OptionLine::default();
    let mut tokens = body.split_whitespace();
    while let Some(tok) = tokens.next() {
        let up = tok.to_ascii_uppercase();
        match up.as_str() {
            "HZ" | "KHZ" | "MHZ" | "GHZ" => opt.unit = up.parse()?,
            "RI" | "MA" | "DB" => opt.format = up.parse()?,
            "S" => {}
            "Y" | "Z" | "H" | "G" => {
                return Err(Error::parse(
                    line,
                    format!("only S parameters are supported, found '{tok}'"),
                ))
            }
            "R" => {
                let v = tokens
                    .next()
                    .ok_or_else(|| Error::parse(line, "option line: R without a value"))?;
                let z: f64 = v.parse().map_err(|_| {
                    Error::parse(line, format!("option line: invalid resistance '{v}'"))
                })?;
                if !(z.is_finite() && z > 0.0) {
                    return Err(Error::parse(
                        line,
                        "option line: reference resistance must be > 0",
                    ));
                }
                opt.z_ref = z;
            }
            _ => {
                return Err(Error::parse(
                    line,
                    format!("option line: unexpected token '{tok}'"),
                ))
            }
        }
    }
    Ok(opt)
}

/// Parsed network data. Frequencies are in Hz; each matrix is row-major
/// (`S_ij` at `i*ports + j`) regardless of the on-file ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct TouchstoneDocument {
    pub options: OptionLine,
    pub ports: usize,
    pub comments: Vec<String>,
    pub freqs: Vec<f64>,
    pub data: Vec<Vec<Complex64>>,
}

/// On-file position of each row-major matrix entry. Two-port files list
/// S11 S21 S12 S22; everything else is row-major.
fn file_order(ports: usize) -> Vec<usize> {
    if ports == 2 {
        vec![0, 2, 1, 3]
    } else {
        (0..ports * ports).collect()
    }
}

impl TouchstoneDocument {
    pub fn from_two_ports(freqs: &[f64], s: &[SParams2], comments: Vec<String>) -> Result<Self> {
        let first = s.first().ok_or_else(|| Error::usage("no data points"))?;
        if freqs.len() != s.len() {
            return Err(Error::usage("frequency and data lengths differ"));
        }
        Ok(TouchstoneDocument {
            options: OptionLine {
                z_ref: first.z_ref,
                ..OptionLine::default()
            },
            ports: 2,
            comments,
            freqs: freqs.to_vec(),
            data: s.iter().map(|p| vec![p.s11, p.s12, p.s21, p.s22]).collect(),
        })
    }

    pub fn from_four_ports(freqs: &[f64], s: &[SParams4], comments: Vec<String>) -> Result<Self> {
        let first = s.first().ok_or_else(|| Error::usage("no data points"))?;
        if freqs.len() != s.len() {
            return Err(Error::usage("frequency and data lengths differ"));
        }
        Ok(TouchstoneDocument {
            options: OptionLine {
                z_ref: first.z_ref,
                ..OptionLine::default()
            },
            ports: 4,
            comments,
            freqs: freqs.to_vec(),
            data: s
                .iter()
                .map(|p| p.s.iter().flatten().copied().collect())
                .collect(),
        })
    }

    pub fn to_two_ports(&self) -> Result<Vec<SParams2>> {
        if self.ports != 2 {
            return Err(Error::usage(format!(
                "expected a 2-port file, got {} ports",
                self.ports
            )));
        }
        Ok(self
            .data
            .iter()
            .map(|m| SParams2 {
                s11: m[0],
                s12: m[1],
                s21: m[2],
                s22: m[3],
                z_ref: self.options.z_ref,
            })
            .collect())
    }

    pub fn to_four_ports(&self) -> Result<Vec<SParams4>> {
        if self.ports != 4 {
            return Err(Error::usage(format!(
                "expected a 4-port file, got {} ports",
                self.ports
            )));
        }
        Ok(self
            .data
            .iter()
            .map(|m| {
                let mut s = [[Complex64::new(0.0, 0.0); 4]; 4];
                for (k, v) in m.iter().enumerate() {
                    s[k / 4][k % 4] = *v;
                }
                SParams4::new(s, self.options.z_ref)
            })
            .collect())
    }
}

pub fn parse_touchstone(text: &str, ports: usize) -> Result<TouchstoneDocument> {
    if ports != 2 && ports != 4 {
        return Err(Error::usage(format!(
            "only 2- and 4-port files are supported, got {ports}"
        )));
    }
    if text.trim().is_empty() {
        return Err(Error::parse(0, "empty input"));
    }
    let record_len = 1 + 2 * ports * ports;
    let order = file_order(ports);

    let mut options: Option<OptionLine> = None;
    let mut comments = Vec::new();
    let mut freqs: Vec<f64> = Vec::new();
    let mut data: Vec<Vec<Complex64>> = Vec::new();
    let mut pending: Vec<f64> = Vec::with_capacity(record_len);
    let mut pending_line = 0;
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let (content, comment) = match raw.find('!') {
            Some(pos) => (&raw[..pos], Some(raw[pos + 1..].trim())),
            None => (raw, None),
        };
        if let Some(c) = comment {
            comments.push(c.to_string());
        }
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(body) = content.strip_prefix('#') {
            if !pending.is_empty() {
                return Err(Error::parse(line_no, "option line inside a data row"));
            }
            // only the first option line counts
            if options.is_none() {
                options = Some(parse_option_line(body, line_no)?);
            }
            continue;
        }
        if pending.is_empty() {
            pending_line = line_no;
        }
        for tok in content.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("invalid number '{tok}'")))?;
            pending.push(v);
        }
        if pending.len() > record_len || (ports == 2 && pending.len() != record_len) {
            return Err(Error::parse(
                line_no,
                format!(
                    "expected {record_len} values per data row, got {}",
                    pending.len()
                ),
            ));
        }
        if pending.len() == record_len {
            let opts = options.unwrap_or_default();
            let f = pending[0] * opts.unit.scale();
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::parse(
                    pending_line,
                    format!("invalid frequency {}", pending[0]),
                ));
            }
            if let Some(&prev) = freqs.last() {
                if f <= prev {
                    return Err(Error::parse(
                        pending_line,
                        "frequencies must be strictly increasing",
                    ));
                }
            }
            let mut matrix = vec![Complex64::new(0.0, 0.0); ports * ports];
            for (k, &dest) in order.iter().enumerate() {
                matrix[dest] = opts.format.decode(pending[1 + 2 * k], pending[2 + 2 * k]);
            }
            freqs.push(f);
            data.push(matrix);
            pending.clear();
        }
    }
    if !pending.is_empty() {
        return Err(Error::parse(
            pending_line,
            format!(
                "incomplete data row: expected {record_len} values, got {}",
                pending.len()
            ),
        ));
    }
    if freqs.is_empty() {
        return Err(Error::parse(last_line, "no data rows"));
    }
    Ok(TouchstoneDocument {
        options: options.unwrap_or_default(),
        ports,
        comments,
        freqs,
        data,
    })
}

fn num(v: f64) -> String {
    format!("{v:.12e}")
}

/// Serializes with the given format and frequency unit; the reference
/// impedance is kept from the document. Four-port rows wrap one matrix row
/// per line.
pub fn write_touchstone(doc: &TouchstoneDocument, format: DataFormat, unit: FreqUnit) -> String {
    let mut out = String::new();
    for c in &doc.comments {
        let _ = writeln!(out, "! {c}");
    }
    let _ = writeln!(
        out,
        "# {} S {} R {}",
        unit.token(),
        format.token(),
        doc.options.z_ref
    );
    let order = file_order(doc.ports);
    for (f, m) in doc.freqs.iter().zip(&doc.data) {
        let pairs: Vec<String> = order
            .iter()
            .map(|&k| {
                let (a, b) = format.encode(m[k]);
                format!("{} {}", num(a), num(b))
            })
            .collect();
        let per_line = if doc.ports == 2 { 4 } else { doc.ports };
        for (i, chunk) in pairs.chunks(per_line).enumerate() {
            if i == 0 {
                let _ = write!(out, "{}", num(f / unit.scale()));
            } else {
                out.push(' ');
            }
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out
}

/// Mode/entry selector for CSV columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trace {
    Sdd11,
    Sdd12,
    Sdd21,
    Sdd22,
    Scc11,
    Scc12,
    Scc21,
    Scc22,
}

impl Trace {
    const ALL: [(Trace, &'static str); 8] = [
        (Trace::Sdd11, "sdd11"),
        (Trace::Sdd12, "sdd12"),
        (Trace::Sdd21, "sdd21"),
        (Trace::Sdd22, "sdd22"),
        (Trace::Scc11, "scc11"),
        (Trace::Scc12, "scc12"),
        (Trace::Scc21, "scc21"),
        (Trace::Scc22, "scc22"),
    ];

    fn name(self) -> &'static str {
        Trace::ALL
            .iter()
            .find(|(t, _)| *t == self)
            .map(|(_, n)| *n)
            .unwrap_or("")
    }

    fn pick(self, sr: &SweepResult, i: usize) -> Complex64 {
        let (dm, cm) = (&sr.dm[i], &sr.cm[i]);
        match self {
            Trace::Sdd11 => dm.s11,
            Trace::Sdd12 => dm.s12,
            Trace::Sdd21 => dm.s21,
            Trace::Sdd22 => dm.s22,
            Trace::Scc11 => cm.s11,
            Trace::Scc12 => cm.s12,
            Trace::Scc21 => cm.s21,
            Trace::Scc22 => cm.s22,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Db,
    Deg,
    Re,
    Im,
}

impl Quantity {
    fn suffix(self) -> &'static str {
        match self {
            Quantity::Db => "db",
            Quantity::Deg => "deg",
            Quantity::Re => "re",
            Quantity::Im => "im",
        }
    }

    fn of(self, z: Complex64) -> f64 {
        match self {
            Quantity::Db => mag_db(z).max(DB_FLOOR),
            Quantity::Deg => phase_deg(z),
            Quantity::Re => z.re,
            Quantity::Im => z.im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvColumn {
    pub trace: Trace,
    pub quantity: Quantity,
}

impl CsvColumn {
    pub fn new(trace: Trace, quantity: Quantity) -> Self {
        Self { trace, quantity }
    }

    pub fn header(&self) -> String {
        format!("{}_{}", self.trace.name(), self.quantity.suffix())
    }
}

impl FromStr for CsvColumn {
    type Err = Error;

    /// Accepts names such as `sdd21_db` or `scc11_re`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let (trace, qty) = lower
            .split_once('_')
            .ok_or_else(|| Error::usage(format!("invalid column '{s}'")))?;
        let trace = Trace::ALL
            .iter()
            .find(|(_, n)| *n == trace)
            .map(|(t, _)| *t)
            .ok_or_else(|| Error::usage(format!("unknown trace in column '{s}'")))?;
        let quantity = match qty {
            "db" => Quantity::Db,
            "deg" => Quantity::Deg,
            "re" => Quantity::Re,
            "im" => Quantity::Im,
            _ => return Err(Error::usage(format!("unknown quantity in column '{s}'"))),
        };
        Ok(CsvColumn { trace, quantity })
    }
}

/// `freq_hz` plus the requested columns, one row per sweep point.
pub fn write_csv(sweep: &SweepResult, columns: &[CsvColumn]) -> Result<String> {
    if columns.is_empty() {
        return Err(Error::usage("no CSV columns requested"));
    }
    let mut out = String::from("freq_hz");
    for c in columns {
        out.push(',');
        out.push_str(&c.header());
    }
    out.push('\n');
    for (i, f) in sweep.freqs().iter().enumerate() {
        out.push_str(&f.to_string());
        for c in columns {
            out.push(',');
            out.push_str(&c.quantity.of(c.trace.pick(sweep, i)).to_string());
        }
        out.push('\n');
    }
    Ok(out)
}

/// Numeric CSV with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self
            .headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

pub fn read_csv(text: &str) -> Result<CsvTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(Error::parse(1, "missing CSV header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(line, e.to_string()))?;
        if rec.len() != headers.len() {
            return Err(Error::parse(
                line,
                format!("expected {} fields, got {}", headers.len(), rec.len()),
            ));
        }
        let row = rec
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| Error::parse(line, format!("invalid number '{v}'")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(1, "no data rows"));
    }
    Ok(CsvTable { headers, rows })
}

fn complex_column(table: &CsvTable, name: &str) -> Result<Vec<Complex64>> {
    if let (Some(re), Some(im)) = (
        table.column(&format!("{name}_re")),
        table.column(&format!("{name}_im")),
    ) {
        return Ok(re
            .into_iter()
            .zip(im)
            .map(|(a, b)| Complex64::new(a, b))
            .collect());
    }
    if let (Some(db), Some(deg)) = (
        table.column(&format!("{name}_db")),
        table.column(&format!("{name}_deg")),
    ) {
        return Ok(db
            .into_iter()
            .zip(deg)
            .map(|(a, b)| DataFormat::Db.decode(a, b))
            .collect());
    }
    Err(Error::usage(format!(
        "CSV needs {name}_re/{name}_im or {name}_db/{name}_deg columns"
    )))
}

/// Two-port data from a CSV with columns `<prefix>11_*` and `<prefix>21_*`
/// (`prefix` is `s`, `sdd` or `scc`). The network is taken as symmetric
/// and reciprocal: `s22 = s11`, `s12 = s21`.
pub fn sparams_from_csv(
    table: &CsvTable,
    prefix: &str,
    z_ref: f64,
) -> Result<(Vec<f64>, Vec<SParams2>)> {
    let freqs = table
        .column("freq_hz")
        .ok_or_else(|| Error::usage("CSV has no freq_hz column"))?;
    if freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::usage("CSV frequencies must be strictly increasing"));
    }
    let s11 = complex_column(table, &format!("{prefix}11"))?;
    let s21 = complex_column(table, &format!("{prefix}21"))?;
    let s = s11
        .into_iter()
        .zip(s21)
        .map(|(a, b)| SParams2 {
            s11: a,
            s12: b,
            s21: b,
            s22: a,
            z_ref,
        })
        .collect();
    Ok((freqs, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EXAMPLE: &str = "! test data\n# GHz S MA R 50\n1.5 0.1 90 0.9 0 0.9 0 0.1 -90\n";

    #[test]
    fn parse_example_row() {
        let doc = parse_touchstone(EXAMPLE, 2).unwrap();
        assert_eq!(doc.freqs, vec![1.5e9]);
        assert_eq!(doc.comments, vec!["test data".to_string()]);
        let s = doc.to_two_ports().unwrap()[0];
        assert_relative_eq!(s.s11.norm(), 0.1, max_relative = 1e-15);
        assert_relative_eq!(phase_deg(s.s11), 90.0, max_relative = 1e-12);
        assert_relative_eq!(s.s21.re, 0.9, max_relative = 1e-15);
        assert_relative_eq!(phase_deg(s.s22), -90.0, max_relative = 1e-12);
    }

    #[test]
    fn db_format_value() {
        let doc = parse_touchstone("# MHz S DB R 50\n100 -20 0 -20 0 -20 0 -20 0\n", 2).unwrap();
        let s = doc.to_two_ports().unwrap()[0];
        assert_relative_eq!(s.s11.re, 0.1, max_relative = 1e-14);
        assert_eq!(doc.freqs[0], 100e6);
    }

    #[test]
    fn defaults_and_units() {
        let doc = parse_touchstone("1 1 0 0 0 0 0 1 0\n", 2).unwrap();
        assert_eq!(doc.options, OptionLine::default());
        assert_eq!(doc.freqs[0], 1e9);
        let doc = parse_touchstone("# khz ri r 75\n3 1 0 0 0 0 0 1 0\n", 2).unwrap();
        assert_eq!(doc.freqs[0], 3e3);
        assert_eq!(doc.options.z_ref, 75.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_touchstone("! only comments\n\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { ref msg, .. } if msg == "no data rows"));
        let e = parse_touchstone("# GHz S MA R 50\n1 0 0 1 0 1 0 0 0\n1 0 0 1 0 1 0 0 0\n", 2)
            .unwrap_err();
        assert_eq!(
            e,
            Error::parse(3, "frequencies must be strictly increasing")
        );
        let e = parse_touchstone("# GHz S MA R 50\n1 0 0 1 0 1 0 0\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_touchstone("# GHz S XX R 50\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_touchstone("# GHz Z MA R 50\n1 0 0 1 0 1 0 0 0\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_touchstone("# GHz S MA R\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_touchstone("# GHz S MA R 50\n1 0 0 1 x 1 0 0 0\n", 2).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_touchstone(
            "# GHz S MA R 50\n1 0 0 1 0 1 0 0 0\n0.5 0 0 1 0 1 0 0 0\n",
            2,
        )
        .unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = parse_touchstone("# GHz S RI R 50\n1 0 0 0 0 0 0 0 0\n", 4).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e:?}");
        assert!(parse_touchstone("", 2).is_err());
        assert!(parse_touchstone(EXAMPLE, 3).is_err());
    }

    #[test]
    fn unit_change_only_rescales_frequency() {
        let doc = parse_touchstone(EXAMPLE, 2).unwrap();
        let ghz = write_touchstone(&doc, DataFormat::Ma, FreqUnit::GHz);
        let hz = write_touchstone(&doc, DataFormat::Ma, FreqUnit::Hz);
        let ghz_rows: Vec<&str> = ghz.lines().collect();
        let hz_rows: Vec<&str> = hz.lines().collect();
        assert_eq!(ghz_rows[0], hz_rows[0]);
        assert_eq!(ghz_rows[1], "# GHZ S MA R 50");
        assert_eq!(hz_rows[1], "# HZ S MA R 50");
        let tail = |r: &str| r.split_once(' ').unwrap().1.to_string();
        assert_eq!(tail(ghz_rows[2]), tail(hz_rows[2]));
        let back = parse_touchstone(&hz, 2).unwrap();
        assert_relative_eq!(back.freqs[0], 1.5e9, max_relative = 1e-12);
    }

    #[test]
    fn four_port_wrapping() {
        let mut s = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in s.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = Complex64::new(0.1 * i as f64 + 0.01, -0.05 * j as f64);
            }
        }
        let doc =
            TouchstoneDocument::from_four_ports(&[1e9, 2e9], &[SParams4::new(s, 50.0); 2], vec![])
                .unwrap();
        let text = write_touchstone(&doc, DataFormat::Ri, FreqUnit::MHz);
        // option line + 2 points * 4 lines
        assert_eq!(text.lines().count(), 9);
        let back = parse_touchstone(&text, 4).unwrap().to_four_ports().unwrap();
        for p in back {
            assert!(p.max_abs_diff(&SParams4::new(s, 50.0)) < 1e-12);
        }
    }

    #[test]
    fn csv_columns() {
        assert_eq!(
            "sdd21_db".parse::<CsvColumn>().unwrap(),
            CsvColumn::new(Trace::Sdd21, Quantity::Db)
        );
        assert!("sdd31_db".parse::<CsvColumn>().is_err());
        assert!("sdd21_xx".parse::<CsvColumn>().is_err());
        assert!("sdd21".parse::<CsvColumn>().is_err());
    }

    #[test]
    fn csv_read_errors() {
        assert!(matches!(
            read_csv("freq_hz,a\n1,2\n3\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            read_csv("freq_hz,a\n1,b\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(read_csv("freq_hz,a\n").is_err());
    }
}
