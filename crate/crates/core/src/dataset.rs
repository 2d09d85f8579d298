//! Instances with attribute classifier scores: validation data (attribute
//! labels, for ROC estimation), few-shot / test data (class labels), and
//! plain score matrices for prediction.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signatures::{csv_open_error, parse_bit, SignatureSet};

/// What a dataset is for; decides which columns the loader requires.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatasetRole {
    /// ROC source: attribute labels required.
    Validation,
    /// Labeled training instances: class column required.
    FewShot,
    /// Evaluation instances: class column required.
    Test,
    /// Prediction input: scores only.
    Scores,
}

/// N instances by M attribute scores in [0,1], with optional binary
/// attribute labels and optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDataset {
    ids: Vec<String>,
    attribute_names: Vec<String>,
    /// Row-major N x M.
    scores: Vec<f64>,
    /// Row-major N x M, present for validation-role data.
    attr_labels: Option<Vec<u8>>,
    /// Class index per instance, present for few-shot / test data.
    class_labels: Option<Vec<usize>>,
}

impl ScoredDataset {
    pub fn new(
        ids: Vec<String>,
        attribute_names: Vec<String>,
        score_rows: Vec<Vec<f64>>,
        label_rows: Option<Vec<Vec<u8>>>,
        class_labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = ids.len();
        let m = attribute_names.len();
        if score_rows.len() != n {
            return Err(Error::Validation(format!(
                "{} score rows for {} ids",
                score_rows.len(),
                n
            )));
        }
        let mut scores = Vec::with_capacity(n * m);
        for (i, row) in score_rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Validation(format!(
                    "score row {i} has {} values, expected {m}",
                    row.len()
                )));
            }
            for &s in row {
                if !(0.0..=1.0).contains(&s) || !s.is_finite() {
                    return Err(Error::Validation(format!(
                        "score {s} in row {i} outside [0,1]"
                    )));
                }
            }
            scores.extend_from_slice(row);
        }
        let attr_labels = match label_rows {
            None => None,
            Some(rows) => {
                if rows.len() != n {
                    return Err(Error::Validation(format!(
                        "{} label rows for {} ids",
                        rows.len(),
                        n
                    )));
                }
                let mut labels = Vec::with_capacity(n * m);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != m {
                        return Err(Error::Validation(format!(
                            "label row {i} has {} values, expected {m}",
                            row.len()
                        )));
                    }
                    for &l in row {
                        if l > 1 {
                            return Err(Error::Validation(format!(
                                "label {l} in row {i} is not 0 or 1"
                            )));
                        }
                    }
                    labels.extend_from_slice(row);
                }
                Some(labels)
            }
        };
        if let Some(classes) = &class_labels {
            if classes.len() != n {
                return Err(Error::Validation(format!(
                    "{} class labels for {} ids",
                    classes.len(),
                    n
                )));
            }
        }
        Ok(ScoredDataset {
            ids,
            attribute_names,
            scores,
            attr_labels,
            class_labels,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn num_attributes(&self) -> usize {
        self.attribute_names.len()
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    #[inline]
    pub fn score(&self, instance: usize, attr: usize) -> f64 {
        self.scores[instance * self.attribute_names.len() + attr]
    }

    pub fn score_row(&self, instance: usize) -> &[f64] {
        let m = self.attribute_names.len();
        &self.scores[instance * m..(instance + 1) * m]
    }

    pub fn has_attr_labels(&self) -> bool {
        self.attr_labels.is_some()
    }

    #[inline]
    pub fn attr_label(&self, instance: usize, attr: usize) -> Option<u8> {
        self.attr_labels
            .as_ref()
            .map(|l| l[instance * self.attribute_names.len() + attr])
    }

    pub fn attr_label_row(&self, instance: usize) -> Option<&[u8]> {
        let m = self.attribute_names.len();
        self.attr_labels
            .as_ref()
            .map(|l| &l[instance * m..(instance + 1) * m])
    }

    pub fn has_class_labels(&self) -> bool {
        self.class_labels.is_some()
    }

    pub fn class_label(&self, instance: usize) -> Option<usize> {
        self.class_labels.as_ref().map(|c| c[instance])
    }

    pub fn class_labels(&self) -> Option<&[usize]> {
        self.class_labels.as_deref()
    }

    /// Checks the role's column requirements; loaders call this, and
    /// in-memory constructions (the noise lab) reuse it before training.
    pub fn require_role(&self, role: DatasetRole) -> Result<()> {
        match role {
            DatasetRole::Validation if !self.has_attr_labels() => Err(Error::Validation(
                "validation data requires attribute labels".into(),
            )),
            DatasetRole::FewShot | DatasetRole::Test if !self.has_class_labels() => {
                Err(Error::Validation(format!(
                    "{role:?} data requires a class column"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Selects a subset of instances (used by cross-validation folds).
    pub fn select(&self, indices: &[usize]) -> ScoredDataset {
        let m = self.attribute_names.len();
        let mut scores = Vec::with_capacity(indices.len() * m);
        let mut labels = self.attr_labels.as_ref().map(|_| Vec::new());
        let mut classes = self.class_labels.as_ref().map(|_| Vec::new());
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            ids.push(self.ids[i].clone());
            scores.extend_from_slice(self.score_row(i));
            if let (Some(out), Some(src)) = (&mut labels, &self.attr_labels) {
                out.extend_from_slice(&src[i * m..(i + 1) * m]);
            }
            if let (Some(out), Some(src)) = (&mut classes, &self.class_labels) {
                out.push(src[i]);
            }
        }
        ScoredDataset {
            ids,
            attribute_names: self.attribute_names.clone(),
            scores,
            attr_labels: labels,
            class_labels: classes,
        }
    }
}

/// Loads a dataset CSV against a signature set.
///
/// Header must be `id,<attr_1>_score,...,<attr_M>_score` followed optionally
/// by `<attr_1>_label,...,<attr_M>_label` and optionally `class`, with
/// attribute names agreeing exactly (same names, same order) with the
/// signature set. Mismatches are reported, never reconciled.
pub fn load_dataset(
    path: impl AsRef<Path>,
    role: DatasetRole,
    signatures: &SignatureSet,
) -> Result<ScoredDataset> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_open_error(path, e))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();

    let m = signatures.num_attributes();
    let attrs = signatures.attribute_names();
    if header.first().map(String::as_str) != Some("id") {
        return Err(Error::Parse(format!(
            "{}: first header column must be `id`",
            path.display()
        )));
    }
    for (j, attr) in attrs.iter().enumerate() {
        let expected = format!("{attr}_score");
        match header.get(1 + j) {
            Some(got) if *got == expected => {}
            got => {
                return Err(Error::Validation(format!(
                    "{}: header column {} is `{}`, expected `{expected}` (attribute names must \
                     match the signature file exactly)",
                    path.display(),
                    j + 2,
                    got.map(String::as_str).unwrap_or("<missing>")
                )))
            }
        }
    }
    // Optional label block, optional trailing class column.
    let mut cursor = 1 + m;
    let has_labels = header.get(cursor).map(String::as_str) == Some(&format!("{}_label", attrs[0]));
    if has_labels {
        for (j, attr) in attrs.iter().enumerate() {
            let expected = format!("{attr}_label");
            if header.get(cursor + j).map(String::as_str) != Some(&expected) {
                return Err(Error::Validation(format!(
                    "{}: expected label column `{expected}` at position {}",
                    path.display(),
                    cursor + j + 1
                )));
            }
        }
        cursor += m;
    }
    let has_class = header.get(cursor).map(String::as_str) == Some("class");
    if has_class {
        cursor += 1;
    }
    if cursor != header.len() {
        return Err(Error::Validation(format!(
            "{}: unexpected header column `{}`",
            path.display(),
            header[cursor]
        )));
    }

    match role {
        DatasetRole::Validation if !has_labels => {
            return Err(Error::Validation(format!(
                "{}: validation data requires `<attr>_label` columns",
                path.display()
            )))
        }
        DatasetRole::FewShot | DatasetRole::Test if !has_class => {
            return Err(Error::Validation(format!(
                "{}: {role:?} data requires a `class` column",
                path.display()
            )))
        }
        _ => {}
    }

    let mut ids = Vec::new();
    let mut score_rows = Vec::new();
    let mut label_rows = has_labels.then(Vec::new);
    let mut class_labels = has_class.then(Vec::new);
    for (line_idx, record) in reader.records().enumerate() {
        let line = line_idx + 2;
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        if record.len() != header.len() {
            return Err(Error::Validation(format!(
                "{}: row {line} has {} fields, expected {} (ragged row)",
                path.display(),
                record.len(),
                header.len()
            )));
        }
        ids.push(record[0].to_string());
        let mut row = Vec::with_capacity(m);
        for j in 0..m {
            let field = &record[1 + j];
            let s: f64 = field.parse().map_err(|_| {
                Error::Parse(format!(
                    "{}: row {line}: score `{field}` is not a number",
                    path.display()
                ))
            })?;
            if !(0.0..=1.0).contains(&s) || !s.is_finite() {
                return Err(Error::Validation(format!(
                    "{}: row {line}: score {field} outside [0,1]",
                    path.display()
                )));
            }
            row.push(s);
        }
        score_rows.push(row);
        if let Some(rows) = &mut label_rows {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                row.push(parse_bit(&record[1 + m + j], path, line)?);
            }
            rows.push(row);
        }
        if let Some(classes) = &mut class_labels {
            let name = &record[record.len() - 1];
            let idx = signatures.class_index(name).ok_or_else(|| {
                Error::Validation(format!(
                    "{}: row {line}: class `{name}` not found in signature set",
                    path.display()
                ))
            })?;
            classes.push(idx);
        }
    }

    let ds = ScoredDataset::new(
        ids,
        attrs.to_vec(),
        score_rows,
        label_rows,
        class_labels,
    )?;
    ds.require_role(role)?;
    Ok(ds)
}
