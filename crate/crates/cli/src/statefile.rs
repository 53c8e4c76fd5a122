//! Plain-text state files.
//!
//! ```text
//! # Bell pair
//! kind: ket
//! dims: [2, 2]
//! data: [0.7071067811865476, 0, 0, 0,
//!        0, 0, 0.7071067811865476, 0]
//! ```
//!
//! Complex numbers are flat `re, im` pairs in row-major order. Brackets may
//! span lines; entries are separated by commas or whitespace. `#` starts a
//! comment. Keys other than `kind`, `dims`, `data`, `weights` and `labels`
//! are kept as metadata.
//!
//! Entry layout by kind:
//!
//! | kind          | dims        | data                                   |
//! |---------------|-------------|----------------------------------------|
//! | `ket`         | `[d]`/`[a,b]` | `d` amplitudes                       |
//! | `density`     | `[d]`/`[a,b]` | `d*d` entries                        |
//! | `ensemble`    | `[d]`       | one ket per weight, back to back       |
//! | `preparation` | `[dS, dE]`  | per branch: `gamma`, `alpha`, `eta`    |

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use mixtura::scenarios::PreparationModel;
use mixtura::{DensityOperator, Ensemble, Ket, Matrix, Tolerance, C64};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Ket,
    Density,
    Ensemble,
    Preparation,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Ket => "ket",
            Kind::Density => "density",
            Kind::Ensemble => "ensemble",
            Kind::Preparation => "preparation",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "ket" => Kind::Ket,
            "density" => Kind::Density,
            "ensemble" => Kind::Ensemble,
            "preparation" => Kind::Preparation,
            _ => return None,
        })
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum StateFileError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{0}")]
    InvariantViolation(#[from] mixtura::Error),
}

impl StateFileError {
    pub fn name(&self) -> &'static str {
        match self {
            StateFileError::Syntax { .. } => "SyntaxError",
            StateFileError::InvariantViolation(_) => "InvariantViolation",
        }
    }
}

type Result<T> = std::result::Result<T, StateFileError>;

fn syntax<T>(pos: Pos, message: impl Into<String>) -> Result<T> {
    Err(StateFileError::Syntax { line: pos.line, col: pos.col, message: message.into() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub kind: Kind,
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
    pub weights: Option<Vec<f64>>,
    pub labels: Option<Vec<String>>,
    pub metadata: BTreeMap<String, String>,
}

/// The typed value a state file describes.
#[derive(Debug, Clone)]
pub enum FileValue {
    Ket(Ket),
    Density(DensityOperator),
    Ensemble(Ensemble),
    Preparation(PreparationModel),
}

/// Parses `text` and checks the described value against its invariants.
pub fn parse_state_file(text: &str, tol: &Tolerance) -> Result<StateFile> {
    let file = StateFile::parse(text)?;
    file.value(tol)?;
    Ok(file)
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

#[derive(Debug)]
struct Token {
    text: String,
    pos: Pos,
}

#[derive(Debug)]
enum RawValue {
    Scalar(String),
    List(Vec<Token>),
}

#[derive(Debug)]
struct Entry {
    value_pos: Pos,
    value: RawValue,
}

fn strip_comment(line: &str) -> &str {
    line.find('#').map_or(line, |i| &line[..i])
}

fn is_key(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

/// Splits list contents into tokens; `base` is the position of `s[0]`.
fn tokenize(s: &str, base: Pos, out: &mut Vec<Token>) {
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        let sep = c == ',' || c.is_whitespace();
        match (sep, start) {
            (true, Some(st)) => {
                out.push(Token { text: s[st..i].to_string(), pos: Pos { line: base.line, col: base.col + st } });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
}

fn read_entries(text: &str) -> Result<Vec<(String, Entry)>> {
    let lines: Vec<&str> = text.lines().collect();
    let mut entries: Vec<(String, Entry)> = Vec::new();
    let mut n = 0;
    while n < lines.len() {
        let line_no = n + 1;
        let line = strip_comment(lines[n]);
        n += 1;
        if line.trim().is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let key_pos = Pos { line: line_no, col: indent + 1 };
        let Some(colon) = line.find(':') else {
            return syntax(key_pos, "expected `key: value`");
        };
        let key = line[..colon].trim();
        if !is_key(key) {
            return syntax(key_pos, format!("invalid key `{key}`"));
        }
        if entries.iter().any(|(k, _)| k == key) {
            return syntax(key_pos, format!("duplicate key `{key}`"));
        }
        let rest = &line[colon + 1..];
        let lead = rest.len() - rest.trim_start().len();
        let value_col = colon + 2 + lead;
        let value_pos = Pos { line: line_no, col: value_col };
        let body = rest.trim();

        let value = if let Some(open) = body.strip_prefix('[') {
            let mut tokens = Vec::new();
            let mut segment = open;
            let mut seg_pos = Pos { line: line_no, col: value_col + 1 };
            loop {
                if let Some(i) = segment.find('[') {
                    return syntax(Pos { line: seg_pos.line, col: seg_pos.col + i }, "nested `[`");
                }
                if let Some(close) = segment.find(']') {
                    tokenize(&segment[..close], seg_pos, &mut tokens);
                    let tail = segment[close + 1..].trim();
                    if !tail.is_empty() {
                        let at = segment[close + 1..].find(tail).unwrap_or(0);
                        return syntax(
                            Pos { line: seg_pos.line, col: seg_pos.col + close + 1 + at },
                            format!("unexpected `{tail}` after `]`"),
                        );
                    }
                    break;
                }
                tokenize(segment, seg_pos, &mut tokens);
                if n >= lines.len() {
                    return syntax(value_pos, "unclosed `[`");
                }
                segment = strip_comment(lines[n]);
                seg_pos = Pos { line: n + 1, col: 1 };
                n += 1;
            }
            RawValue::List(tokens)
        } else {
            if body.contains(']') {
                return syntax(value_pos, "unmatched `]`");
            }
            RawValue::Scalar(body.to_string())
        };
        entries.push((key.to_string(), Entry { value_pos, value }));
    }
    Ok(entries)
}

fn take(entries: &mut Vec<(String, Entry)>, key: &str) -> Option<Entry> {
    let i = entries.iter().position(|(k, _)| k == key)?;
    Some(entries.remove(i).1)
}

fn list(entry: Entry, key: &str) -> Result<(Pos, Vec<Token>)> {
    match entry.value {
        RawValue::List(tokens) => Ok((entry.value_pos, tokens)),
        RawValue::Scalar(_) => syntax(entry.value_pos, format!("`{key}` must be a bracketed list")),
    }
}

fn numbers(tokens: &[Token]) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| match t.text.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => syntax(t.pos, format!("`{}` is not a finite number", t.text)),
        })
        .collect()
}

impl StateFile {
    /// Structural parse: keys, brackets, numbers and entry counts.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = read_entries(text)?;
        let end = Pos { line: text.lines().count().max(1), col: 1 };

        let kind_entry = take(&mut entries, "kind").map_or_else(|| syntax(end, "missing `kind`"), Ok)?;
        let kind = match &kind_entry.value {
            RawValue::Scalar(s) => Kind::parse(s),
            RawValue::List(_) => None,
        };
        let Some(kind) = kind else {
            return syntax(kind_entry.value_pos, "kind must be one of ket, density, ensemble, preparation");
        };

        let dims_entry = take(&mut entries, "dims").map_or_else(|| syntax(end, "missing `dims`"), Ok)?;
        let (dims_pos, dim_tokens) = list(dims_entry, "dims")?;
        let dims = dim_tokens
            .iter()
            .map(|t| match t.text.parse::<usize>() {
                Ok(d) if d > 0 => Ok(d),
                _ => syntax(t.pos, format!("`{}` is not a positive integer", t.text)),
            })
            .collect::<Result<Vec<usize>>>()?;

        let data_entry = take(&mut entries, "data").map_or_else(|| syntax(end, "missing `data`"), Ok)?;
        let (data_pos, data_tokens) = list(data_entry, "data")?;
        let flat = numbers(&data_tokens)?;
        if flat.len() % 2 != 0 {
            return syntax(data_pos, format!("`data` holds {} numbers, not re,im pairs", flat.len()));
        }
        let data: Vec<C64> = flat.chunks(2).map(|p| C64::new(p[0], p[1])).collect();

        let weights = match take(&mut entries, "weights") {
            Some(e) => Some((e.value_pos, numbers(&list(e, "weights")?.1)?)),
            None => None,
        };
        let labels = match take(&mut entries, "labels") {
            Some(e) => Some((e.value_pos, list(e, "labels")?.1.into_iter().map(|t| t.text).collect::<Vec<_>>())),
            None => None,
        };

        let expected = match kind {
            Kind::Ket | Kind::Density => {
                if !(1..=2).contains(&dims.len()) {
                    return syntax(dims_pos, format!("a {kind} takes one or two dims, found {}", dims.len()));
                }
                let d: usize = dims.iter().product();
                if kind == Kind::Ket {
                    d
                } else {
                    d * d
                }
            }
            Kind::Ensemble => {
                if dims.len() != 1 {
                    return syntax(dims_pos, format!("an ensemble takes one dim, found {}", dims.len()));
                }
                let Some((_, w)) = &weights else {
                    return syntax(end, "an ensemble needs `weights`");
                };
                w.len() * dims[0]
            }
            Kind::Preparation => {
                if dims.len() != 2 {
                    return syntax(dims_pos, format!("a preparation takes dims [dS, dE], found {}", dims.len()));
                }
                let stride = 1 + dims[0] + dims[1];
                if data.is_empty() || !data.len().is_multiple_of(stride) {
                    return syntax(
                        data_pos,
                        format!("{} complex entries is not a multiple of 1 + dS + dE = {stride}", data.len()),
                    );
                }
                data.len()
            }
        };
        if data.len() != expected {
            return syntax(data_pos, format!("expected {expected} complex entries, found {}", data.len()));
        }
        if kind != Kind::Ensemble {
            if let Some((pos, _)) = weights {
                return syntax(pos, format!("`weights` only applies to ensembles, not to a {kind}"));
            }
        }
        if let (Some((pos, l)), Some((_, w))) = (&labels, &weights) {
            if l.len() != w.len() {
                return syntax(*pos, format!("{} labels for {} weights", l.len(), w.len()));
            }
        }

        let mut metadata = BTreeMap::new();
        for (key, entry) in entries {
            let value = match entry.value {
                RawValue::Scalar(s) => s,
                RawValue::List(tokens) => {
                    format!("[{}]", tokens.into_iter().map(|t| t.text).collect::<Vec<_>>().join(", "))
                }
            };
            metadata.insert(key, value);
        }

        Ok(StateFile { kind, dims, data, weights: weights.map(|(_, w)| w), labels: labels.map(|(_, l)| l), metadata })
    }

    /// Builds the typed value, applying the tolerance policy.
    pub fn value(&self, tol: &Tolerance) -> std::result::Result<FileValue, StateFileError> {
        let value = match self.kind {
            Kind::Ket => FileValue::Ket(Ket::new(self.data.clone())?),
            Kind::Density => {
                let d: usize = self.dims.iter().product();
                FileValue::Density(DensityOperator::new(Matrix::new(d, d, self.data.clone())?, tol)?)
            }
            Kind::Ensemble => {
                let d = self.dims[0];
                let weights = self.weights.as_deref().unwrap_or_default();
                let entries = weights
                    .iter()
                    .zip(self.data.chunks(d))
                    .map(|(&w, amps)| Ok((w, Ket::new(amps.to_vec())?)))
                    .collect::<std::result::Result<Vec<_>, mixtura::Error>>()?;
                FileValue::Ensemble(Ensemble::new(entries)?)
            }
            Kind::Preparation => {
                let (ds, de) = (self.dims[0], self.dims[1]);
                let entries = self
                    .data
                    .chunks(1 + ds + de)
                    .map(|c| Ok((c[0], Ket::new(c[1..1 + ds].to_vec())?, Ket::new(c[1 + ds..].to_vec())?)))
                    .collect::<std::result::Result<Vec<_>, mixtura::Error>>()?;
                FileValue::Preparation(PreparationModel::new(entries)?)
            }
        };
        Ok(value)
    }

    /// Two-factor split if the file names one.
    pub fn bipartite(&self) -> Option<(usize, usize)> {
        match (self.kind, self.dims.as_slice()) {
            (Kind::Ket | Kind::Density, &[a, b]) => Some((a, b)),
            _ => None,
        }
    }

    pub fn from_ket(ket: &Ket, dims: &[usize]) -> Self {
        Self::plain(Kind::Ket, dims.to_vec(), ket.amps().to_vec())
    }

    pub fn from_density(rho: &DensityOperator, dims: &[usize]) -> Self {
        Self::plain(Kind::Density, dims.to_vec(), rho.matrix().data().to_vec())
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        let mut file = Self::plain(
            Kind::Ensemble,
            vec![e.dim()],
            e.kets().iter().flat_map(|k| k.amps().iter().copied()).collect(),
        );
        file.weights = Some(e.weights().to_vec());
        file
    }

    fn plain(kind: Kind, dims: Vec<usize>, data: Vec<C64>) -> Self {
        Self { kind, dims, data, weights: None, labels: None, metadata: BTreeMap::new() }
    }

    /// Text form that parses back to an identical `StateFile`.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let join = |xs: &mut dyn Iterator<Item = String>| xs.collect::<Vec<_>>().join(", ");
        let _ = writeln!(s, "kind: {}", self.kind);
        let _ = writeln!(s, "dims: [{}]", join(&mut self.dims.iter().map(|d| d.to_string())));
        if let Some(w) = &self.weights {
            let _ = writeln!(s, "weights: [{}]", join(&mut w.iter().map(|x| format!("{x:?}"))));
        }
        if let Some(l) = &self.labels {
            let _ = writeln!(s, "labels: [{}]", l.join(", "));
        }
        // one row, ket or branch per line
        let row = match self.kind {
            Kind::Ket => self.data.len(),
            Kind::Density => self.dims.iter().product(),
            Kind::Ensemble => self.dims[0],
            Kind::Preparation => 1 + self.dims[0] + self.dims[1],
        }
        .max(1);
        s.push_str("data: [\n");
        for chunk in self.data.chunks(row) {
            let _ = writeln!(s, "  {},", join(&mut chunk.iter().map(|z| format!("{:?}, {:?}", z.re, z.im))));
        }
        s.push_str("]\n");
        for (k, v) in &self.metadata {
            let _ = writeln!(s, "{k}: {v}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn syntax_at(text: &str) -> (usize, usize) {
        match StateFile::parse(text) {
            Err(StateFileError::Syntax { line, col, .. }) => (line, col),
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn ket_zero() {
        let f = parse_state_file("kind: ket\ndims: [2]\ndata: [1,0, 0,0]\n", &TOL).unwrap();
        match f.value(&TOL).unwrap() {
            FileValue::Ket(k) => assert_eq!(k, Ket::basis(2, 0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn half_identity() {
        let f = parse_state_file("kind: density\ndims: [2]\ndata: [0.5,0, 0,0,\n 0,0, 0.5,0]", &TOL).unwrap();
        let FileValue::Density(rho) = f.value(&TOL).unwrap() else { panic!() };
        assert_eq!(rho, DensityOperator::maximally_mixed(2));
    }

    #[test]
    fn ensemble_mixes() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let text = format!(
            "kind: ensemble\ndims: [2]\nweights: [0.5, 0.5]\nlabels: [zero, plus]\ndata: [\n 1 0 0 0\n {h} 0 {h} 0\n]\n"
        );
        let f = parse_state_file(&text, &TOL).unwrap();
        let FileValue::Ensemble(e) = f.value(&TOL).unwrap() else { panic!() };
        let rho = mixtura::states::convex_mix(&e);
        let expected = Matrix::new(2, 2, [0.75, 0.25, 0.25, 0.25].iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap();
        assert!(rho.matrix().distance(&expected) < 1e-15);
        assert_eq!(f.labels.as_deref(), Some(&["zero".to_string(), "plus".to_string()][..]));
    }

    #[test]
    fn metadata_and_comments() {
        let f = StateFile::parse("# header\nkind: ket # inline\nname: zero\ndims: [1]\ndata: [1, 0]\n").unwrap();
        assert_eq!(f.metadata.get("name").map(String::as_str), Some("zero"));
        assert_eq!(f.metadata.len(), 1);
    }

    #[test]
    fn positions() {
        assert_eq!(syntax_at("kind: ket\ndims: [2]\ndata: [1, 0, x, 0]"), (3, 14));
        assert_eq!(syntax_at("kind: ket\n  oops\n"), (2, 3));
        assert_eq!(syntax_at("kind: qubit\ndims: [2]\ndata: [1,0,0,0]"), (1, 7));
        assert_eq!(syntax_at("kind: ket\ndims: [2]\ndata: [1, 0,\n 0, 0"), (3, 7));
        assert_eq!(syntax_at("kind: ket\ndims: [2]\ndata: [1, 0, 0, 0] extra"), (3, 20));
        assert_eq!(syntax_at("kind: ket\nkind: ket"), (2, 1));
    }

    #[test]
    fn counts_are_checked() {
        assert!(StateFile::parse("kind: ket\ndims: [3]\ndata: [1,0, 0,0]").is_err());
        assert!(StateFile::parse("kind: density\ndims: [2]\ndata: [1,0, 0,0]").is_err());
        assert!(StateFile::parse("kind: ket\ndims: [2]\ndata: [1,0, 0]").is_err());
        assert!(StateFile::parse("kind: ensemble\ndims: [2]\ndata: [1,0, 0,0]").is_err());
        assert!(StateFile::parse("kind: ket\ndims: [2]\nweights: [1]\ndata: [1,0, 0,0]").is_err());
    }

    #[test]
    fn invariants_are_checked() {
        let err = parse_state_file("kind: ket\ndims: [2]\ndata: [1,0, 0.1,0]", &TOL).unwrap_err();
        assert_eq!(err.name(), "InvariantViolation");
        assert!(matches!(err, StateFileError::InvariantViolation(mixtura::Error::NotNormalized { .. })));
        let err = parse_state_file("kind: density\ndims: [2]\ndata: [0.5,0, 0.6,0, 0.6,0, 0.5,0]", &TOL);
        assert!(matches!(err, Err(StateFileError::InvariantViolation(mixtura::Error::NotPositive { .. }))));
    }

    #[test]
    fn serialize_round_trip() {
        let text = "kind: ensemble\ndims: [2]\nweights: [0.3, 0.7]\nnote: skew\ndata: [1,0, 0,0,\n 0.6,0.0, 0,0.8]\n";
        let f = StateFile::parse(text).unwrap();
        let again = StateFile::parse(&f.serialize()).unwrap();
        assert_eq!(f, again);
    }
}
