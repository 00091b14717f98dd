//! Touchstone v1 (`.s1p` / `.s2p`) reader and writer.
//!
//! Only S-parameters are accepted. Two-port records are ordered
//! `f S11 S21 S12 S22` and may wrap across lines.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use wlpkit_core::network::{FrequencyGrid, SMatrix, TwoPortNetwork, DB_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreqUnit {
    Hz,
    KHz,
    MHz,
    #[default]
    GHz,
}

impl FreqUnit {
    pub const ALL: [FreqUnit; 4] = [FreqUnit::Hz, FreqUnit::KHz, FreqUnit::MHz, FreqUnit::GHz];

    pub fn scale(self) -> f64 {
        match self {
            FreqUnit::Hz => 1.0,
            FreqUnit::KHz => 1e3,
            FreqUnit::MHz => 1e6,
            FreqUnit::GHz => 1e9,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FreqUnit::Hz => "Hz",
            FreqUnit::KHz => "kHz",
            FreqUnit::MHz => "MHz",
            FreqUnit::GHz => "GHz",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataFormat {
    Ri,
    #[default]
    Ma,
    Db,
}

impl DataFormat {
    pub const ALL: [DataFormat; 3] = [DataFormat::Ri, DataFormat::Ma, DataFormat::Db];

    pub fn label(self) -> &'static str {
        match self {
            DataFormat::Ri => "RI",
            DataFormat::Ma => "MA",
            DataFormat::Db => "DB",
        }
    }

    fn decode(self, x: f64, y: f64) -> C64 {
        match self {
            DataFormat::Ri => C64::new(x, y),
            DataFormat::Ma => C64::from_polar(x, y.to_radians()),
            DataFormat::Db => C64::from_polar(10f64.powf(x / 20.0), y.to_radians()),
        }
    }

    fn encode(self, z: C64) -> (f64, f64) {
        match self {
            DataFormat::Ri => (z.re, z.im),
            DataFormat::Ma => (z.norm(), z.arg().to_degrees()),
            DataFormat::Db => {
                let m = z.norm();
                let db = if m > 0.0 { (20.0 * m.log10()).max(DB_FLOOR) } else { DB_FLOOR };
                (db, z.arg().to_degrees())
            }
        }
    }
}

impl std::str::FromStr for DataFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "RI" => Ok(DataFormat::Ri),
            "MA" => Ok(DataFormat::Ma),
            "DB" => Ok(DataFormat::Db),
            _ => Err(format!("unknown data format `{s}`, expected RI, MA or DB")),
        }
    }
}

/// Contents of the `#` option line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub unit: FreqUnit,
    pub format: DataFormat,
    pub reference: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self { unit: FreqUnit::GHz, format: DataFormat::Ma, reference: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TouchstoneError {
    #[error("line {line}: malformed option line: {reason}")]
    MalformedOptionLine { line: usize, reason: String },
    #[error("line {line}: {what} parameters are not supported, only S")]
    UnsupportedParameter { line: usize, what: String },
    #[error("line {line}: Touchstone v2 keyword `{keyword}` is not supported")]
    UnsupportedVersion { line: usize, keyword: String },
    #[error("line {line}: frequency does not ascend")]
    NonAscendingFrequency { line: usize },
    #[error("line {line}: expected {expected} values per record, found {found}")]
    WrongColumnCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: `{token}` is not a number")]
    NonNumericToken { line: usize, token: String },
    #[error("line {line}: frequency must be positive")]
    NonPositiveFrequency { line: usize },
    #[error("file has no data records")]
    Empty,
    #[error("only 1- and 2-port files are supported, not {0}")]
    UnsupportedPorts(usize),
    #[error(transparent)]
    Network(#[from] wlpkit_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnePortNetwork {
    pub grid: FrequencyGrid,
    pub s11: Vec<C64>,
    pub z_ref: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Touchstone {
    OnePort(OnePortNetwork),
    TwoPort(TwoPortNetwork),
}

impl Touchstone {
    pub fn into_two_port(self) -> Option<TwoPortNetwork> {
        match self {
            Touchstone::TwoPort(n) => Some(n),
            Touchstone::OnePort(_) => None,
        }
    }
}

/// Port count implied by an extension such as `s2p`.
pub fn ports_from_extension(path: &std::path::Path) -> Option<usize> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    match ext.as_str() {
        "s1p" => Some(1),
        "s2p" => Some(2),
        _ => None,
    }
}

fn parse_options(body: &str, line: usize) -> Result<Options, TouchstoneError> {
    let mut o = Options::default();
    let mut toks = body.split_whitespace();
    let bad = |reason: String| TouchstoneError::MalformedOptionLine { line, reason };
    while let Some(t) = toks.next() {
        match t.to_ascii_uppercase().as_str() {
            "HZ" => o.unit = FreqUnit::Hz,
            "KHZ" => o.unit = FreqUnit::KHz,
            "MHZ" => o.unit = FreqUnit::MHz,
            "GHZ" => o.unit = FreqUnit::GHz,
            "S" => {}
            "Y" | "Z" | "H" | "G" => {
                return Err(TouchstoneError::UnsupportedParameter { line, what: t.to_string() })
            }
            "RI" => o.format = DataFormat::Ri,
            "MA" => o.format = DataFormat::Ma,
            "DB" => o.format = DataFormat::Db,
            "R" => {
                let v = toks.next().ok_or_else(|| bad("`R` without a value".into()))?;
                let r: f64 = v.parse().map_err(|_| bad(format!("reference `{v}` is not a number")))?;
                if !(r > 0.0 && r.is_finite()) {
                    return Err(bad(format!("reference must be positive, got {r}")));
                }
                o.reference = r;
            }
            _ => return Err(bad(format!("unexpected token `{t}`"))),
        }
    }
    Ok(o)
}

/// Parse a file body. `ports` is 1 or 2, usually from the extension.
pub fn parse(text: &str, ports: usize) -> Result<Touchstone, TouchstoneError> {
    if ports != 1 && ports != 2 {
        return Err(TouchstoneError::UnsupportedPorts(ports));
    }
    let record = 1 + 2 * ports * ports;
    let mut opts: Option<Options> = None;
    let mut pending: Vec<f64> = Vec::with_capacity(record);
    let mut start_line = 0;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('!').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('[') {
            let keyword = content.split(']').next().unwrap_or(content).to_string() + "]";
            return Err(TouchstoneError::UnsupportedVersion { line, keyword });
        }
        if let Some(body) = content.strip_prefix('#') {
            if opts.is_none() {
                if !rows.is_empty() || !pending.is_empty() {
                    return Err(TouchstoneError::MalformedOptionLine {
                        line,
                        reason: "option line after data".into(),
                    });
                }
                opts = Some(parse_options(body, line)?);
            }
            continue;
        }
        if pending.is_empty() {
            start_line = line;
        }
        for tok in content.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| TouchstoneError::NonNumericToken { line, token: tok.to_string() })?;
            pending.push(v);
        }
        if pending.len() > record {
            return Err(TouchstoneError::WrongColumnCount { line, expected: record, found: pending.len() });
        }
        if pending.len() == record {
            rows.push((start_line, std::mem::take(&mut pending)));
        }
    }
    if !pending.is_empty() {
        return Err(TouchstoneError::WrongColumnCount {
            line: start_line,
            expected: record,
            found: pending.len(),
        });
    }
    if rows.is_empty() {
        return Err(TouchstoneError::Empty);
    }

    let o = opts.unwrap_or_default();
    let mut freqs = Vec::with_capacity(rows.len());
    for (line, r) in &rows {
        let f = r[0] * o.unit.scale();
        if !(f > 0.0) {
            return Err(TouchstoneError::NonPositiveFrequency { line: *line });
        }
        if freqs.last().is_some_and(|&p| f <= p) {
            return Err(TouchstoneError::NonAscendingFrequency { line: *line });
        }
        freqs.push(f);
    }
    let grid = FrequencyGrid::new(freqs)?;
    let pair = |r: &[f64], k: usize| o.format.decode(r[1 + 2 * k], r[2 + 2 * k]);
    if ports == 1 {
        let s11 = rows.iter().map(|(_, r)| pair(r, 0)).collect();
        return Ok(Touchstone::OnePort(OnePortNetwork { grid, s11, z_ref: o.reference }));
    }
    let s = rows
        .iter()
        .map(|(_, r)| SMatrix { s11: pair(r, 0), s21: pair(r, 1), s12: pair(r, 2), s22: pair(r, 3) })
        .collect();
    Ok(Touchstone::TwoPort(TwoPortNetwork::new(grid, s, o.reference)?))
}

fn num(x: f64) -> String {
    crate::export::sig(x, 12)
}

fn freq(x: f64) -> String {
    let s = num(x);
    if s.contains(['.', 'e']) {
        s
    } else {
        s + ".0"
    }
}

/// Write a two-port file: one `!` banner, the option line, one record per
/// line.
pub fn write(n: &TwoPortNetwork, opts: Options) -> String {
    let mut out = String::new();
    writeln!(out, "! wlpkit {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(
        out,
        "# {} S {} R {}",
        opts.unit.label(),
        opts.format.label(),
        num(opts.reference)
    )
    .unwrap();
    for (&f, m) in n.grid().points().iter().zip(n.s()) {
        out.push_str(&freq(f / opts.unit.scale()));
        for z in [m.s11, m.s21, m.s12, m.s22] {
            let (a, b) = opts.format.encode(z);
            out.push(' ');
            out.push_str(&num(a));
            out.push(' ');
            out.push_str(&num(b));
        }
        out.push('\n');
    }
    out
}

/// Write a one-port file.
pub fn write_one_port(n: &OnePortNetwork, opts: Options) -> String {
    let mut out = String::new();
    writeln!(out, "! wlpkit {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# {} S {} R {}", opts.unit.label(), opts.format.label(), num(opts.reference)).unwrap();
    for (&f, z) in n.grid.points().iter().zip(&n.s11) {
        let (a, b) = opts.format.encode(*z);
        writeln!(out, "{} {} {}", freq(f / opts.unit.scale()), num(a), num(b)).unwrap();
    }
    out
}

/// Option line of a file without parsing its data.
pub fn read_options(text: &str) -> Result<Options, TouchstoneError> {
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('!').next().unwrap_or("").trim();
        if let Some(body) = content.strip_prefix('#') {
            return parse_options(body, i + 1);
        }
    }
    Ok(Options::default())
}
