//! Class-attribute signatures: the only training data in zero-shot mode.

use std::collections::HashSet;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// K binary attribute signatures, one per class. Row k gives, for each of
/// the M attributes, whether class k is associated with it.
///
/// Immutable after construction; all loaders validate rather than coerce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignatureSet {
    class_names: Vec<String>,
    attribute_names: Vec<String>,
    /// Row-major K x M bits.
    matrix: Vec<u8>,
}

impl SignatureSet {
    pub fn new(
        class_names: Vec<String>,
        attribute_names: Vec<String>,
        rows: Vec<Vec<u8>>,
    ) -> Result<Self> {
        let k = class_names.len();
        let m = attribute_names.len();
        if k < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 classes, got {k}"
            )));
        }
        if m < 1 {
            return Err(Error::Validation("need at least 1 attribute".into()));
        }
        if rows.len() != k {
            return Err(Error::Validation(format!(
                "{} signature rows for {} class names",
                rows.len(),
                k
            )));
        }
        let mut seen_names = HashSet::new();
        for name in &class_names {
            if name.is_empty() {
                return Err(Error::Validation("empty class name".into()));
            }
            if !seen_names.insert(name.as_str()) {
                return Err(Error::Validation(format!("duplicate class name `{name}`")));
            }
        }
        let mut seen_attrs = HashSet::new();
        for name in &attribute_names {
            if name.is_empty() {
                return Err(Error::Validation("empty attribute name".into()));
            }
            if !seen_attrs.insert(name.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate attribute name `{name}`"
                )));
            }
        }
        let mut matrix = Vec::with_capacity(k * m);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Validation(format!(
                    "signature row for `{}` has {} values, expected {}",
                    class_names[i],
                    row.len(),
                    m
                )));
            }
            for &v in row {
                if v > 1 {
                    return Err(Error::Validation(format!(
                        "signature value {v} for `{}` is not 0 or 1",
                        class_names[i]
                    )));
                }
            }
            matrix.extend_from_slice(row);
        }
        // Signatures must be distinguishable.
        let mut seen_rows: HashSet<&[u8]> = HashSet::new();
        for (i, row) in matrix.chunks(m).enumerate() {
            if !seen_rows.insert(row) {
                return Err(Error::Validation(format!(
                    "signature for `{}` duplicates an earlier row; classes must be distinguishable",
                    class_names[i]
                )));
            }
        }
        Ok(SignatureSet {
            class_names,
            attribute_names,
            matrix,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn num_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    #[inline]
    pub fn bit(&self, class: usize, attr: usize) -> u8 {
        self.matrix[class * self.num_attributes() + attr]
    }

    pub fn row(&self, class: usize) -> &[u8] {
        let m = self.num_attributes();
        &self.matrix[class * m..(class + 1) * m]
    }

    /// FNV-1a digest over names and bits; stored in model files so a loaded
    /// model can be checked against the signature set it embeds.
    pub fn digest(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        };
        for name in self.class_names.iter().chain(&self.attribute_names) {
            eat(name.as_bytes());
            eat(&[0xff]);
        }
        eat(&self.matrix);
        format!("{h:016x}")
    }

    /// K distinct random binary signatures with the given positive-bit
    /// density, for the synthetic noise lab.
    pub fn random(k: usize, m: usize, density: f64, rng: &mut impl Rng) -> Result<Self> {
        if !(0.0..=1.0).contains(&density) {
            return Err(Error::Config(format!("bit density {density} not in [0,1]")));
        }
        let mut rows: Vec<Vec<u8>> = Vec::with_capacity(k);
        let mut attempts = 0;
        while rows.len() < k {
            let row: Vec<u8> = (0..m)
                .map(|_| u8::from(rng.random::<f64>() < density))
                .collect();
            if rows.contains(&row) {
                attempts += 1;
                if attempts > 1000 * k {
                    return Err(Error::Growth(format!(
                        "could not draw {k} distinct signatures of {m} bits at density {density}"
                    )));
                }
                continue;
            }
            rows.push(row);
        }
        let class_names = (0..k).map(|i| format!("class_{i}")).collect();
        let attribute_names = (0..m).map(|i| format!("attr_{i}")).collect();
        SignatureSet::new(class_names, attribute_names, rows)
    }
}

/// Loads a signature CSV: header `class,<attr_1>,...,<attr_M>`, one row per
/// class, values `0`/`1`.
pub fn load_signatures(path: impl AsRef<Path>) -> Result<SignatureSet> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_open_error(path, e))?;

    let header = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .clone();
    if header.is_empty() || &header[0] != "class" {
        return Err(Error::Parse(format!(
            "{}: first header column must be `class`, got `{}`",
            path.display(),
            header.get(0).unwrap_or("")
        )));
    }
    let attribute_names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();

    let mut class_names = Vec::new();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if record.len() != attribute_names.len() + 1 {
            return Err(Error::Validation(format!(
                "{}: row {} has {} fields, expected {} (ragged row)",
                path.display(),
                line + 2,
                record.len(),
                attribute_names.len() + 1
            )));
        }
        class_names.push(record[0].to_string());
        let mut row = Vec::with_capacity(attribute_names.len());
        for field in record.iter().skip(1) {
            row.push(parse_bit(field, path, line + 2)?);
        }
        rows.push(row);
    }
    SignatureSet::new(class_names, attribute_names, rows)
}

pub(crate) fn parse_bit(field: &str, path: &Path, line: usize) -> Result<u8> {
    let v: f64 = field.parse().map_err(|_| {
        Error::Parse(format!(
            "{}: row {line}: `{field}` is not a number",
            path.display()
        ))
    })?;
    if v == 0.0 {
        Ok(0)
    } else if v == 1.0 {
        Ok(1)
    } else {
        Err(Error::Validation(format!(
            "{}: row {line}: value {field} is not binary (signatures and labels must be 0 or 1)",
            path.display()
        )))
    }
}

pub(crate) fn csv_open_error(path: &Path, e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        }
    } else {
        Error::Parse(format!("{}: {e}", path.display()))
    }
}
