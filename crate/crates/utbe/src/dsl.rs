//! The `.tbc` (time-bin circuit) text format.
//!
//! Line-oriented `keyword key=value ...` grammar; one object per line, `#`
//! comments, order-insensitive keys. Angles are radians, always. The
//! serializer emits a canonical form (layer-major coupler order, fixed
//! 9-significant-digit numbers) that re-parses to an identical document.
//!
//! ```text
//! circuit N=4 topology=rect
//! coupler layer=1 slot=0 theta=1.57079633e0 phi=0.00000000e0
//! rotation layer=4 angle=1.57079633e0
//! outphase mode=0 phase=0.00000000e0
//! hardware rep_rate_hz=8.00000000e7 system_loss_db=-5.20000000e0
//! noise theta_jitter=1.00000000e-2 seed=7
//! ```
//!
//! The full grammar ships with the guide (see the book's file-format
//! chapter, which doubles as the EBNF reference).

use std::collections::HashSet;
use std::fmt;

use crate::elements::{CircuitSpec, CouplerParams, GlobalRotation, Topology};
use crate::matrix::{ComplexMatrix, C64};
use crate::photonics::{HardwareConfig, NoiseModel};

/// A parse diagnostic with 1-based line and column.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    MissingHeader,
    DuplicateHeader,
    UnknownKeyword {
        found: String,
    },
    ExpectedKeyValue {
        found: String,
    },
    UnknownKey {
        keyword: &'static str,
        key: String,
    },
    DuplicateKey {
        key: String,
    },
    MissingKey {
        keyword: &'static str,
        key: &'static str,
    },
    InvalidNumber {
        key: String,
        text: String,
    },
    InvalidInteger {
        key: String,
        text: String,
    },
    UnknownTopology {
        text: String,
    },
    OddDimension {
        n: usize,
    },
    DuplicateCoupler {
        layer: usize,
        slot: usize,
    },
    SlotOutOfRange {
        layer: usize,
        slot: usize,
        max: usize,
    },
    LayerOutOfRange {
        layer: usize,
        max: usize,
    },
    RotationOutOfRange {
        position: usize,
        max: usize,
    },
    RotationUnsupported,
    OutPhaseIncomplete {
        expected: usize,
        got: usize,
    },
    MatrixHeader {
        text: String,
    },
    MatrixNotSquare {
        rows: usize,
        cols: usize,
    },
    MatrixEntryOutOfRange {
        i: usize,
        j: usize,
    },
    MatrixDuplicateEntry {
        i: usize,
        j: usize,
    },
    MatrixMissingEntry {
        i: usize,
        j: usize,
    },
    MatrixGrosslyNonUnitary {
        deviation: f64,
    },
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.col)?;
        use ParseErrorKind::*;
        match &self.kind {
            MissingHeader => write!(f, "expected `circuit` header line"),
            DuplicateHeader => write!(f, "duplicate `circuit` header"),
            UnknownKeyword { found } => write!(
                f,
                "unknown keyword `{found}`, expected one of circuit, coupler, rotation, outphase, hardware, noise"
            ),
            ExpectedKeyValue { found } => write!(f, "expected key=value, found `{found}`"),
            UnknownKey { keyword, key } => write!(f, "unknown key `{key}` for `{keyword}`"),
            DuplicateKey { key } => write!(f, "duplicate key `{key}`"),
            MissingKey { keyword, key } => write!(f, "`{keyword}` line is missing `{key}=`"),
            InvalidNumber { key, text } => write!(f, "expected a finite number for `{key}`, found `{text}`"),
            InvalidInteger { key, text } => write!(f, "expected an integer for `{key}`, found `{text}`"),
            UnknownTopology { text } => write!(f, "unknown topology `{text}`, expected rect or galton"),
            OddDimension { n } => write!(f, "N must be even and >= 2, got {n}"),
            DuplicateCoupler { layer, slot } => {
                write!(f, "duplicate coupler at layer {layer}, slot {slot}")
            }
            SlotOutOfRange { layer, slot, max } => {
                write!(f, "slot {slot} out of range for layer {layer} (max {max})")
            }
            LayerOutOfRange { layer, max } => write!(f, "layer {layer} out of range (max {max})"),
            RotationOutOfRange { position, max } => {
                write!(f, "rotation layer {position} out of range (max {max})")
            }
            RotationUnsupported => write!(f, "rotations are not supported on the galton topology"),
            OutPhaseIncomplete { expected, got } => {
                write!(f, "output phase layer incomplete: {got} of {expected} modes set")
            }
            MatrixHeader { text } => {
                write!(f, "expected matrix header `rows,cols`, found `{text}`")
            }
            MatrixNotSquare { rows, cols } => {
                write!(f, "matrix must be square, header says {rows}x{cols}")
            }
            MatrixEntryOutOfRange { i, j } => write!(f, "entry ({i},{j}) outside matrix bounds"),
            MatrixDuplicateEntry { i, j } => write!(f, "duplicate entry ({i},{j})"),
            MatrixMissingEntry { i, j } => write!(f, "missing entry ({i},{j})"),
            MatrixGrosslyNonUnitary { deviation } => {
                write!(f, "matrix deviates from unitarity by {deviation:.3e} (limit 1e-4)")
            }
        }
    }
}

impl std::error::Error for ParseError {}

/// Non-fatal condition reported alongside a successful parse.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseWarning {
    /// The matrix is slightly non-unitary (between 1e-8 and 1e-4 max-norm).
    NearUnitary { deviation: f64 },
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseWarning::NearUnitary { deviation } => {
                write!(
                    f,
                    "matrix deviates from unitarity by {deviation:.3e}; accepted"
                )
            }
        }
    }
}

/// A parsed circuit file: the spec plus optional hardware/noise blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitDocument {
    pub name: Option<String>,
    pub spec: CircuitSpec,
    pub hardware: Option<HardwareConfig>,
    pub noise: Option<NoiseModel>,
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut col = 0usize;
    let mut start = None;
    for (idx, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                tokens.push(Token {
                    text: &line[s..idx],
                    col: c,
                });
            }
        } else if start.is_none() {
            start = Some((idx, col));
        }
    }
    if let Some((s, c)) = start {
        tokens.push(Token {
            text: &line[s..],
            col: c,
        });
    }
    tokens
}

struct KeyValues<'a> {
    keyword: &'static str,
    line: usize,
    pairs: Vec<(&'a str, &'a str, usize, usize)>, // key, value, key col, value col
}

impl<'a> KeyValues<'a> {
    fn parse(
        keyword: &'static str,
        line_no: usize,
        tokens: &[Token<'a>],
        allowed: &[&str],
    ) -> Result<Self, ParseError> {
        let mut pairs = Vec::new();
        let mut seen = HashSet::new();
        for t in tokens {
            let Some(eq) = t.text.find('=') else {
                return Err(ParseError {
                    line: line_no,
                    col: t.col,
                    kind: ParseErrorKind::ExpectedKeyValue {
                        found: t.text.to_string(),
                    },
                });
            };
            let key = &t.text[..eq];
            let value = &t.text[eq + 1..];
            if !allowed.contains(&key) {
                return Err(ParseError {
                    line: line_no,
                    col: t.col,
                    kind: ParseErrorKind::UnknownKey {
                        keyword,
                        key: key.to_string(),
                    },
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(ParseError {
                    line: line_no,
                    col: t.col,
                    kind: ParseErrorKind::DuplicateKey {
                        key: key.to_string(),
                    },
                });
            }
            pairs.push((key, value, t.col, t.col + eq + 1));
        }
        Ok(Self {
            keyword,
            line: line_no,
            pairs,
        })
    }

    fn get(&self, key: &'static str) -> Result<(&'a str, usize), ParseError> {
        self.pairs
            .iter()
            .find(|(k, ..)| *k == key)
            .map(|&(_, v, _, vc)| (v, vc))
            .ok_or(ParseError {
                line: self.line,
                col: 1,
                kind: ParseErrorKind::MissingKey {
                    keyword: self.keyword,
                    key,
                },
            })
    }

    fn get_opt(&self, key: &str) -> Option<(&'a str, usize)> {
        self.pairs
            .iter()
            .find(|(k, ..)| *k == key)
            .map(|&(_, v, _, vc)| (v, vc))
    }

    fn float(&self, key: &'static str) -> Result<f64, ParseError> {
        let (text, col) = self.get(key)?;
        parse_float(text, key, self.line, col)
    }

    fn float_opt(&self, key: &'static str) -> Result<Option<f64>, ParseError> {
        match self.get_opt(key) {
            None => Ok(None),
            Some((text, col)) => parse_float(text, key, self.line, col).map(Some),
        }
    }

    fn integer(&self, key: &'static str) -> Result<usize, ParseError> {
        let (text, col) = self.get(key)?;
        text.parse::<usize>().map_err(|_| ParseError {
            line: self.line,
            col,
            kind: ParseErrorKind::InvalidInteger {
                key: key.to_string(),
                text: text.to_string(),
            },
        })
    }
}

fn parse_float(text: &str, key: &str, line: usize, col: usize) -> Result<f64, ParseError> {
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError {
            line,
            col,
            kind: ParseErrorKind::InvalidNumber {
                key: key.to_string(),
                text: text.to_string(),
            },
        }),
    }
}

/// Parses a `.tbc` document: header, couplers, rotations, output phases and
/// the optional hardware/noise blocks. Structural constraints are checked
/// with the position of the offending line.
pub fn parse_document(text: &str) -> Result<CircuitDocument, ParseError> {
    let mut doc: Option<CircuitDocument> = None;
    let mut out_phases: Vec<(usize, f64)> = Vec::new();
    let mut seen_couplers: HashSet<(usize, usize)> = HashSet::new();
    let mut seen_rotations: HashSet<usize> = HashSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let tokens = tokenize(line);
        if tokens.is_empty() {
            continue;
        }
        let keyword = &tokens[0];
        if doc.is_none() && keyword.text != "circuit" {
            return Err(ParseError {
                line: line_no,
                col: keyword.col,
                kind: ParseErrorKind::MissingHeader,
            });
        }
        match keyword.text {
            "circuit" => {
                if doc.is_some() {
                    return Err(ParseError {
                        line: line_no,
                        col: keyword.col,
                        kind: ParseErrorKind::DuplicateHeader,
                    });
                }
                let kv =
                    KeyValues::parse("circuit", line_no, &tokens[1..], &["N", "topology", "name"])?;
                let n = kv.integer("N")?;
                if n < 2 || n % 2 != 0 {
                    let (_, col) = kv.get("N")?;
                    return Err(ParseError {
                        line: line_no,
                        col,
                        kind: ParseErrorKind::OddDimension { n },
                    });
                }
                let (topo_text, topo_col) = kv.get("topology")?;
                let topology = match topo_text {
                    "rect" => Topology::RectangularMesh,
                    "galton" => Topology::GaltonBoard,
                    other => {
                        return Err(ParseError {
                            line: line_no,
                            col: topo_col,
                            kind: ParseErrorKind::UnknownTopology {
                                text: other.to_string(),
                            },
                        })
                    }
                };
                doc = Some(CircuitDocument {
                    name: kv.get_opt("name").map(|(v, _)| v.to_string()),
                    spec: CircuitSpec::new(n, topology),
                    hardware: None,
                    noise: None,
                });
            }
            "coupler" => {
                let d = doc.as_mut().expect("header checked above");
                let kv = KeyValues::parse(
                    "coupler",
                    line_no,
                    &tokens[1..],
                    &["layer", "slot", "theta", "phi"],
                )?;
                let layer = kv.integer("layer")?;
                let slot = kv.integer("slot")?;
                let theta = kv.float("theta")?;
                let phi = kv.float("phi")?;
                let layers = d.spec.layers();
                if layer >= layers {
                    let (_, col) = kv.get("layer")?;
                    return Err(ParseError {
                        line: line_no,
                        col,
                        kind: ParseErrorKind::LayerOutOfRange {
                            layer,
                            max: layers - 1,
                        },
                    });
                }
                let max = d.spec.slots_in_layer(layer);
                if slot >= max {
                    let (_, col) = kv.get("slot")?;
                    return Err(ParseError {
                        line: line_no,
                        col,
                        kind: ParseErrorKind::SlotOutOfRange {
                            layer,
                            slot,
                            max: max - 1,
                        },
                    });
                }
                if !seen_couplers.insert((layer, slot)) {
                    return Err(ParseError {
                        line: line_no,
                        col: keyword.col,
                        kind: ParseErrorKind::DuplicateCoupler { layer, slot },
                    });
                }
                d.spec
                    .couplers
                    .push(CouplerParams::new(layer, slot, theta, phi));
            }
            "rotation" => {
                let d = doc.as_mut().expect("header checked above");
                let kv = KeyValues::parse("rotation", line_no, &tokens[1..], &["layer", "angle"])?;
                let position = kv.integer("layer")?;
                let angle = kv.float("angle")?;
                if d.spec.topology == Topology::GaltonBoard {
                    return Err(ParseError {
                        line: line_no,
                        col: keyword.col,
                        kind: ParseErrorKind::RotationUnsupported,
                    });
                }
                let max = d.spec.layers();
                if position > max {
                    let (_, col) = kv.get("layer")?;
                    return Err(ParseError {
                        line: line_no,
                        col,
                        kind: ParseErrorKind::RotationOutOfRange { position, max },
                    });
                }
                if !seen_rotations.insert(position) {
                    return Err(ParseError {
                        line: line_no,
                        col: keyword.col,
                        kind: ParseErrorKind::DuplicateKey {
                            key: format!("rotation layer={position}"),
                        },
                    });
                }
                d.spec
                    .global_rotations
                    .push(GlobalRotation { position, angle });
            }
            "outphase" => {
                let d = doc.as_mut().expect("header checked above");
                let kv = KeyValues::parse("outphase", line_no, &tokens[1..], &["mode", "phase"])?;
                let mode = kv.integer("mode")?;
                let phase = kv.float("phase")?;
                if mode >= d.spec.n_logical {
                    let (_, col) = kv.get("mode")?;
                    return Err(ParseError {
                        line: line_no,
                        col,
                        kind: ParseErrorKind::LayerOutOfRange {
                            layer: mode,
                            max: d.spec.n_logical - 1,
                        },
                    });
                }
                if out_phases.iter().any(|&(m, _)| m == mode) {
                    return Err(ParseError {
                        line: line_no,
                        col: keyword.col,
                        kind: ParseErrorKind::DuplicateKey {
                            key: format!("outphase mode={mode}"),
                        },
                    });
                }
                out_phases.push((mode, phase));
            }
            "hardware" => {
                let d = doc.as_mut().expect("header checked above");
                let kv = KeyValues::parse(
                    "hardware",
                    line_no,
                    &tokens[1..],
                    &[
                        "rep_rate_hz",
                        "signal_nm",
                        "control_nm",
                        "bin_ps",
                        "crystal_mm",
                        "poutine_loss_db",
                        "system_loss_db",
                    ],
                )?;
                let mut hw = HardwareConfig::default();
                if let Some(v) = kv.float_opt("rep_rate_hz")? {
                    hw.rep_rate_hz = v;
                }
                if let Some(v) = kv.float_opt("signal_nm")? {
                    hw.signal_wavelength_nm = v;
                }
                if let Some(v) = kv.float_opt("control_nm")? {
                    hw.control_wavelength_nm = v;
                }
                if let Some(v) = kv.float_opt("bin_ps")? {
                    hw.bin_separation_ps = v;
                }
                if let Some(v) = kv.float_opt("crystal_mm")? {
                    hw.crystal_length_mm = v;
                }
                if let Some(v) = kv.float_opt("poutine_loss_db")? {
                    hw.poutine_loss_db = v;
                }
                if let Some(v) = kv.float_opt("system_loss_db")? {
                    hw.system_loss_db = v;
                }
                d.hardware = Some(hw);
            }
            "noise" => {
                let d = doc.as_mut().expect("header checked above");
                let kv = KeyValues::parse(
                    "noise",
                    line_no,
                    &tokens[1..],
                    &[
                        "theta_jitter",
                        "drift_rad_per_hour",
                        "phase_static",
                        "dark_rate_hz",
                        "seed",
                    ],
                )?;
                let mut noise = NoiseModel::noiseless();
                if let Some(v) = kv.float_opt("theta_jitter")? {
                    noise.theta_rel_jitter = v;
                }
                if let Some(v) = kv.float_opt("drift_rad_per_hour")? {
                    noise.phase_drift_rad_per_hour = v;
                }
                if let Some(v) = kv.float_opt("phase_static")? {
                    noise.phase_static_sigma = v;
                }
                if let Some(v) = kv.float_opt("dark_rate_hz")? {
                    noise.dark_rate_hz = v;
                }
                if let Some((text, col)) = kv.get_opt("seed") {
                    noise.seed = text.parse::<u64>().map_err(|_| ParseError {
                        line: line_no,
                        col,
                        kind: ParseErrorKind::InvalidInteger {
                            key: "seed".to_string(),
                            text: text.to_string(),
                        },
                    })?;
                }
                d.noise = Some(noise);
            }
            other => {
                return Err(ParseError {
                    line: line_no,
                    col: keyword.col,
                    kind: ParseErrorKind::UnknownKeyword {
                        found: other.to_string(),
                    },
                });
            }
        }
    }

    let mut doc = doc.ok_or(ParseError {
        line: text.lines().count().max(1),
        col: 1,
        kind: ParseErrorKind::MissingHeader,
    })?;
    if !out_phases.is_empty() {
        if out_phases.len() != doc.spec.n_logical {
            return Err(ParseError {
                line: text.lines().count().max(1),
                col: 1,
                kind: ParseErrorKind::OutPhaseIncomplete {
                    expected: doc.spec.n_logical,
                    got: out_phases.len(),
                },
            });
        }
        out_phases.sort_by_key(|&(m, _)| m);
        doc.spec.output_phases = Some(out_phases.into_iter().map(|(_, p)| p).collect());
    }
    Ok(doc)
}

/// Parses a document and returns just the validated circuit.
pub fn parse_circuit(text: &str) -> Result<CircuitSpec, ParseError> {
    Ok(parse_document(text)?.spec)
}

/// Fixed 9-significant-digit form, stable under re-parsing.
fn fmt9(v: f64) -> String {
    format!("{:.8e}", v)
}

/// Canonical text form: header first, couplers layer-major, rotations by
/// position, then output phases and the optional hardware/noise lines.
pub fn serialize_document(doc: &CircuitDocument) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "circuit N={} topology={}",
        doc.spec.n_logical,
        doc.spec.topology.name()
    ));
    if let Some(name) = &doc.name {
        s.push_str(&format!(" name={name}"));
    }
    s.push('\n');
    for c in doc.spec.sorted_couplers() {
        s.push_str(&format!(
            "coupler layer={} slot={} theta={} phi={}\n",
            c.layer,
            c.slot,
            fmt9(c.theta),
            fmt9(c.phi)
        ));
    }
    let mut rotations = doc.spec.global_rotations.clone();
    rotations.sort_by_key(|r| r.position);
    for r in rotations {
        s.push_str(&format!(
            "rotation layer={} angle={}\n",
            r.position,
            fmt9(r.angle)
        ));
    }
    if let Some(phases) = &doc.spec.output_phases {
        for (mode, phase) in phases.iter().enumerate() {
            s.push_str(&format!("outphase mode={} phase={}\n", mode, fmt9(*phase)));
        }
    }
    if let Some(hw) = &doc.hardware {
        s.push_str(&format!(
            "hardware rep_rate_hz={} signal_nm={} control_nm={} bin_ps={} crystal_mm={} poutine_loss_db={} system_loss_db={}\n",
            fmt9(hw.rep_rate_hz),
            fmt9(hw.signal_wavelength_nm),
            fmt9(hw.control_wavelength_nm),
            fmt9(hw.bin_separation_ps),
            fmt9(hw.crystal_length_mm),
            fmt9(hw.poutine_loss_db),
            fmt9(hw.system_loss_db),
        ));
    }
    if let Some(noise) = &doc.noise {
        s.push_str(&format!(
            "noise theta_jitter={} drift_rad_per_hour={} phase_static={} dark_rate_hz={} seed={}\n",
            fmt9(noise.theta_rel_jitter),
            fmt9(noise.phase_drift_rad_per_hour),
            fmt9(noise.phase_static_sigma),
            fmt9(noise.dark_rate_hz),
            noise.seed,
        ));
    }
    s
}

/// Canonical text form of a bare circuit.
pub fn serialize_circuit(spec: &CircuitSpec) -> String {
    serialize_document(&CircuitDocument {
        name: None,
        spec: spec.clone(),
        hardware: None,
        noise: None,
    })
}

/// Hex SHA-256 of the canonical serialization; reports use it to pin the
/// exact circuit they were produced from.
pub fn spec_hash(spec: &CircuitSpec) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(serialize_circuit(spec).as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads a complex matrix from CSV: a `rows,cols` header line, then one
/// `i,j,re,im` line per entry. Every entry must appear exactly once.
///
/// Returns a warning when the matrix is off unitary by more than 1e-8 in
/// max-norm; errors beyond 1e-4.
pub fn parse_unitary(text: &str) -> Result<(ComplexMatrix, Option<ParseWarning>), ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
    let (header_no, header) = lines.next().ok_or(ParseError {
        line: 1,
        col: 1,
        kind: ParseErrorKind::MatrixHeader {
            text: String::new(),
        },
    })?;
    let dims: Vec<&str> = header.trim().split(',').collect();
    let header_err = || ParseError {
        line: header_no,
        col: 1,
        kind: ParseErrorKind::MatrixHeader {
            text: header.trim().to_string(),
        },
    };
    if dims.len() != 2 {
        return Err(header_err());
    }
    let rows: usize = dims[0].trim().parse().map_err(|_| header_err())?;
    let cols: usize = dims[1].trim().parse().map_err(|_| header_err())?;
    if rows != cols {
        return Err(ParseError {
            line: header_no,
            col: 1,
            kind: ParseErrorKind::MatrixNotSquare { rows, cols },
        });
    }

    let mut m = ComplexMatrix::zeros(rows, cols);
    let mut seen = vec![false; rows * cols];
    for (line_no, line) in lines {
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 4 {
            return Err(ParseError {
                line: line_no,
                col: 1,
                kind: ParseErrorKind::ExpectedKeyValue {
                    found: line.trim().to_string(),
                },
            });
        }
        let i: usize = fields[0].trim().parse().map_err(|_| ParseError {
            line: line_no,
            col: 1,
            kind: ParseErrorKind::InvalidInteger {
                key: "i".into(),
                text: fields[0].trim().into(),
            },
        })?;
        let j: usize = fields[1].trim().parse().map_err(|_| ParseError {
            line: line_no,
            col: 1,
            kind: ParseErrorKind::InvalidInteger {
                key: "j".into(),
                text: fields[1].trim().into(),
            },
        })?;
        let re = parse_float(fields[2].trim(), "re", line_no, 1)?;
        let im = parse_float(fields[3].trim(), "im", line_no, 1)?;
        if i >= rows || j >= cols {
            return Err(ParseError {
                line: line_no,
                col: 1,
                kind: ParseErrorKind::MatrixEntryOutOfRange { i, j },
            });
        }
        if seen[i * cols + j] {
            return Err(ParseError {
                line: line_no,
                col: 1,
                kind: ParseErrorKind::MatrixDuplicateEntry { i, j },
            });
        }
        seen[i * cols + j] = true;
        m[(i, j)] = C64::new(re, im);
    }
    let last_line = text.lines().count().max(1);
    if let Some(k) = seen.iter().position(|&s| !s) {
        return Err(ParseError {
            line: last_line,
            col: 1,
            kind: ParseErrorKind::MatrixMissingEntry {
                i: k / cols,
                j: k % cols,
            },
        });
    }
    let mut warning = None;
    let dev = m.unitarity_deviation();
    if dev > 1e-4 {
        return Err(ParseError {
            line: last_line,
            col: 1,
            kind: ParseErrorKind::MatrixGrosslyNonUnitary { deviation: dev },
        });
    }
    if dev > 1e-8 {
        warning = Some(ParseWarning::NearUnitary { deviation: dev });
    }
    Ok((m, warning))
}

/// Writes a matrix in the CSV format accepted by [`parse_unitary`], one
/// row-major entry per line, at full float precision.
pub fn serialize_unitary(m: &ComplexMatrix) -> String {
    let mut s = format!("{},{}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let z = m[(i, j)];
            s.push_str(&format!("{},{},{:e},{:e}\n", i, j, z.re, z.im));
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{galton_board, hadamard4_recipe};
    use crate::elements::FRAC_PI_2;

    #[test]
    #[allow(clippy::approx_constant)] // fixture text, not a pi/2 constant
    fn minimal_document_parses() {
        let spec =
            parse_circuit("circuit N=4 topology=rect\ncoupler layer=1 slot=0 theta=1.570796 phi=0")
                .unwrap();
        assert_eq!(spec.n_logical, 4);
        assert_eq!(spec.couplers.len(), 1);
        assert!((spec.couplers[0].theta - 1.570796).abs() < 1e-12);
    }

    #[test]
    fn duplicate_coupler_names_position() {
        let text = "circuit N=4 topology=rect\n\
                    coupler layer=0 slot=0 theta=0.1 phi=0\n\
                    coupler layer=0 slot=0 theta=0.2 phi=0";
        let err = parse_circuit(text).unwrap_err();
        assert_eq!(err.line, 3);
        assert!(matches!(
            err.kind,
            ParseErrorKind::DuplicateCoupler { layer: 0, slot: 0 }
        ));
    }

    #[test]
    fn malformed_number_reports_line_and_column() {
        let text = "circuit N=4 topology=rect\ncoupler layer=0 slot=0 theta=abc phi=0";
        let err = parse_circuit(text).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.col > 20, "column should point at the theta token");
        assert!(matches!(err.kind, ParseErrorKind::InvalidNumber { .. }));
    }

    #[test]
    fn serialization_is_canonical_and_idempotent() {
        let spec = hadamard4_recipe();
        let text = serialize_circuit(&spec);
        let reparsed = parse_circuit(&text).unwrap();
        assert_eq!(serialize_circuit(&reparsed), text);
    }

    #[test]
    fn zero_coupler_circuit_serializes_with_explicit_n() {
        let spec = CircuitSpec::new(6, Topology::RectangularMesh);
        let text = serialize_circuit(&spec);
        assert!(text.starts_with("circuit N=6 topology=rect"));
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn galton_depth_three_has_six_coupler_lines() {
        let spec = galton_board(3, FRAC_PI_2 / 2.0).unwrap();
        let text = serialize_circuit(&spec);
        assert_eq!(text.lines().filter(|l| l.starts_with("coupler")).count(), 6);
    }

    #[test]
    fn hardware_and_noise_blocks_round_trip() {
        let text = "circuit N=2 topology=rect\n\
                    hardware system_loss_db=-7.2\n\
                    noise theta_jitter=0.01 seed=42";
        let doc = parse_document(text).unwrap();
        assert_eq!(doc.hardware.unwrap().system_loss_db, -7.2);
        assert_eq!(doc.noise.unwrap().seed, 42);
        let canon = serialize_document(&doc);
        let again = parse_document(&canon).unwrap();
        assert_eq!(serialize_document(&again), canon);
    }

    #[test]
    fn header_required_first() {
        let err = parse_circuit("coupler layer=0 slot=0 theta=0 phi=0").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::MissingHeader));
    }

    #[test]
    fn unitary_csv_round_trip() {
        let m = ComplexMatrix::identity(2);
        let (parsed, warning) = parse_unitary(&serialize_unitary(&m)).unwrap();
        assert!(warning.is_none());
        assert!(parsed.max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn unitary_csv_missing_entry_is_reported() {
        let text = "2,2\n0,0,1,0\n1,1,1,0\n1,0,0,0";
        let err = parse_unitary(text).unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::MatrixMissingEntry { i: 0, j: 1 }
        ));
    }

    #[test]
    fn slightly_perturbed_unitary_warns_but_parses() {
        let mut m = ComplexMatrix::identity(4);
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] += C64::new(if i == j { 1e-6 } else { 5e-7 }, 0.0);
            }
        }
        let (_, warning) = parse_unitary(&serialize_unitary(&m)).unwrap();
        assert!(matches!(warning, Some(ParseWarning::NearUnitary { .. })));
    }

    #[test]
    fn non_square_matrix_is_rejected() {
        let err = parse_unitary("2,3\n").unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::MatrixNotSquare { rows: 2, cols: 3 }
        ));
    }

    #[test]
    fn grossly_non_unitary_is_rejected() {
        let m = ComplexMatrix::from_fn(2, 2, |_, _| C64::new(0.9, 0.0));
        let err = parse_unitary(&serialize_unitary(&m)).unwrap_err();
        assert!(matches!(
            err.kind,
            ParseErrorKind::MatrixGrosslyNonUnitary { .. }
        ));
    }

    #[test]
    fn spec_hash_is_stable_and_sensitive() {
        let a = hadamard4_recipe();
        let mut b = a.clone();
        assert_eq!(spec_hash(&a), spec_hash(&b));
        b.couplers[2].theta += 1e-6;
        assert_ne!(spec_hash(&a), spec_hash(&b));
    }
}
