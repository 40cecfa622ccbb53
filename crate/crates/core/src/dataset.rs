// Copyright 2026 The cba-rs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Categorical datasets: CSV loading, canonical id encoding and row subsets.
//!
//! Every cell is a string. Attribute ids follow the column order of the
//! source file and value ids follow first appearance, which makes all
//! downstream tie-breaks a function of the file contents alone.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{CbaError, Result};

/// Column layout and value dictionaries shared by every subset of a dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    columns: Vec<String>,
    class_column: usize,
    attributes: Vec<String>,
    values: Vec<Vec<String>>,
    classes: Vec<String>,
}

impl Schema {
    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn num_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn class_attribute(&self) -> &str {
        &self.columns[self.class_column]
    }

    /// Header in source order, class column included.
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn class_column_index(&self) -> usize {
        self.class_column
    }

    pub fn values(&self, attribute: u32) -> &[String] {
        &self.values[attribute as usize]
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn attribute_name(&self, attribute: u32) -> &str {
        &self.attributes[attribute as usize]
    }

    pub fn value_name(&self, attribute: u32, value: u32) -> &str {
        &self.values[attribute as usize][value as usize]
    }

    pub fn class_name(&self, class: u32) -> &str {
        &self.classes[class as usize]
    }

    pub fn attribute_id(&self, name: &str) -> Option<u32> {
        self.attributes.iter().position(|a| a == name).map(|i| i as u32)
    }

    pub fn value_id(&self, attribute: u32, value: &str) -> Option<u32> {
        self.values
            .get(attribute as usize)?
            .iter()
            .position(|v| v == value)
            .map(|i| i as u32)
    }

    pub fn class_id(&self, label: &str) -> Option<u32> {
        self.classes.iter().position(|c| c == label).map(|i| i as u32)
    }

    /// Builds a schema from explicit dictionaries. Used when reloading a
    /// serialized model.
    pub fn from_parts(
        columns: Vec<String>,
        class_column: usize,
        values: Vec<Vec<String>>,
        classes: Vec<String>,
    ) -> Result<Self> {
        if class_column >= columns.len() {
            return Err(CbaError::MissingClassColumn(format!("#{class_column}")));
        }
        let attributes: Vec<String> = columns
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != class_column)
            .map(|(_, c)| c.clone())
            .collect();
        if attributes.len() != values.len() {
            return Err(CbaError::SchemaMismatch);
        }
        Ok(Schema {
            columns,
            class_column,
            attributes,
            values,
            classes,
        })
    }
}

/// One encoded row: a value id per attribute plus the class id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Row {
    pub values: Vec<u32>,
    pub class: u32,
}

impl Row {
    #[inline]
    pub fn value(&self, attribute: u32) -> u32 {
        self.values[attribute as usize]
    }
}

/// An immutable table of categorical rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    schema: Arc<Schema>,
    rows: Vec<Row>,
}

impl Dataset {
    /// Builds a dataset from a header and string records.
    ///
    /// `class_column` defaults to the last column. Row numbers in errors
    /// are 1-based and count data rows only.
    pub fn from_records(header: Vec<String>, records: Vec<Vec<String>>, class_column: Option<&str>) -> Result<Self> {
        if header.is_empty() {
            return Err(CbaError::EmptyFile);
        }
        for (i, name) in header.iter().enumerate() {
            if name.is_empty() {
                return Err(CbaError::EmptyCell {
                    row: 0,
                    column: format!("#{}", i + 1),
                });
            }
            if header[..i].contains(name) {
                return Err(CbaError::DuplicateColumn(name.clone()));
            }
        }
        let class_idx = match class_column {
            Some(name) => header
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| CbaError::MissingClassColumn(name.to_string()))?,
            None => header.len() - 1,
        };
        if header.len() < 2 {
            return Err(CbaError::NoAttributes);
        }
        if records.is_empty() {
            return Err(CbaError::NoRows);
        }

        let attr_cols: Vec<usize> = (0..header.len()).filter(|&i| i != class_idx).collect();
        let mut dicts: Vec<Dictionary> = vec![Dictionary::default(); attr_cols.len()];
        let mut classes = Dictionary::default();
        let mut rows = Vec::with_capacity(records.len());

        for (r, record) in records.iter().enumerate() {
            let row_no = r + 1;
            if record.len() != header.len() {
                return Err(CbaError::RaggedRow {
                    row: row_no,
                    expected: header.len(),
                    found: record.len(),
                });
            }
            if let Some(c) = record.iter().position(|cell| cell.is_empty()) {
                return Err(CbaError::EmptyCell {
                    row: row_no,
                    column: header[c].clone(),
                });
            }
            let values = attr_cols
                .iter()
                .zip(dicts.iter_mut())
                .map(|(&c, dict)| dict.intern(&record[c]))
                .collect();
            let class = classes.intern(&record[class_idx]);
            rows.push(Row { values, class });
        }

        let schema = Schema {
            attributes: attr_cols.iter().map(|&c| header[c].clone()).collect(),
            columns: header,
            class_column: class_idx,
            values: dicts.into_iter().map(|d| d.items).collect(),
            classes: classes.items,
        };
        Ok(Dataset {
            schema: Arc::new(schema),
            rows,
        })
    }

    /// Reads comma separated records from any reader. Surrounding
    /// whitespace of every cell is trimmed.
    pub fn from_reader<R: Read>(reader: R, class_column: Option<&str>) -> Result<Self> {
        let (header, records) = read_table(reader, Path::new("<input>"))?;
        Self::from_records(header, records, class_column)
    }

    pub fn load_csv(path: impl AsRef<Path>, class_column: Option<&str>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| CbaError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let (header, records) = read_table(file, path)?;
        Self::from_records(header, records, class_column)
    }

    /// Writes the dataset back in its source column order.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(out);
        writeln!(w, "{}", self.schema.columns.join(","))?;
        for row in &self.rows {
            let mut attr = 0u32;
            let cells: Vec<&str> = (0..self.schema.columns.len())
                .map(|c| {
                    if c == self.schema.class_column {
                        self.schema.class_name(row.class)
                    } else {
                        let v = self.schema.value_name(attr, row.value(attr));
                        attr += 1;
                        v
                    }
                })
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn shared_schema(&self) -> Arc<Schema> {
        Arc::clone(&self.schema)
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Rows at `indices`, in the given order, sharing this schema.
    pub fn subset(&self, indices: &[usize]) -> Result<Dataset> {
        if indices.is_empty() {
            return Err(CbaError::NoRows);
        }
        Ok(Dataset {
            schema: Arc::clone(&self.schema),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        })
    }

    pub fn class_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.schema.num_classes()];
        for row in &self.rows {
            counts[row.class as usize] += 1;
        }
        counts
    }

    /// The most frequent class; ties go to the lexicographically smallest
    /// label.
    pub fn majority_class(&self) -> u32 {
        majority_of(&self.class_counts(), &self.schema)
    }
}

/// Index of the largest count, ties broken by smallest class label.
pub(crate) fn majority_of(counts: &[u64], schema: &Schema) -> u32 {
    let mut best: Option<usize> = None;
    for (c, &count) in counts.iter().enumerate() {
        best = match best {
            None => Some(c),
            Some(b) if count > counts[b] => Some(c),
            Some(b) if count == counts[b] && schema.classes[c] < schema.classes[b] => Some(c),
            keep => keep,
        };
    }
    best.unwrap_or(0) as u32
}

#[derive(Clone, Debug, Default)]
struct Dictionary {
    items: Vec<String>,
    index: HashMap<String, u32>,
}

impl Dictionary {
    fn intern(&mut self, value: &str) -> u32 {
        if let Some(&id) = self.index.get(value) {
            return id;
        }
        let id = self.items.len() as u32;
        self.items.push(value.to_string());
        self.index.insert(value.to_string(), id);
        id
    }
}

/// Raw header and records of a CSV file, without arity checks.
pub fn read_table<R: Read>(reader: R, path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| CbaError::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        records.push(rec.iter().map(str::to_string).collect::<Vec<_>>());
    }
    if records.is_empty() {
        return Err(CbaError::EmptyFile);
    }
    let header = records.remove(0);
    Ok((header, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const TABLE_I: &str = "A,B,C\ne,p,y\ne,p,y\ne,q,y\ng,q,y\ng,q,y\ng,q,n\ng,w,n\ng,w,n\ne,p,n\nf,q,n\n";

    fn load(text: &str) -> Result<Dataset> {
        Dataset::from_reader(text.as_bytes(), None)
    }

    #[test]
    fn loads_worked_example() {
        let d = load(TABLE_I).unwrap();
        assert_eq!(d.n(), 10);
        assert_eq!(d.schema().attributes(), ["A", "B"]);
        assert_eq!(d.schema().class_attribute(), "C");
        assert_eq!(d.schema().classes(), ["y", "n"]);
        assert_eq!(d.schema().values(0), ["e", "g", "f"]);
    }

    #[test]
    fn single_row() {
        let d = load("A,C\nx,c\n").unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.schema().num_attributes(), 1);
    }

    #[test]
    fn ragged_row_is_reported() {
        let err = load("A,B,C\nx,y\n").unwrap_err();
        assert!(matches!(
            err,
            CbaError::RaggedRow {
                row: 1,
                expected: 3,
                found: 2
            }
        ));
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(load("").unwrap_err(), CbaError::EmptyFile));
        assert!(matches!(load("A,C\n").unwrap_err(), CbaError::NoRows));
    }

    #[test]
    fn missing_class_column() {
        let err = Dataset::from_reader(TABLE_I.as_bytes(), Some("Z")).unwrap_err();
        assert!(matches!(err, CbaError::MissingClassColumn(ref c) if c == "Z"));
    }

    #[test]
    fn empty_cell_rejected() {
        let err = load("A,B,C\nx,,y\n").unwrap_err();
        assert!(matches!(err, CbaError::EmptyCell { row: 1, ref column } if column == "B"));
    }

    #[test]
    fn explicit_class_column_in_the_middle() {
        let d = Dataset::from_reader("A,C,B\ne,y,p\ng,n,q\n".as_bytes(), Some("C")).unwrap();
        assert_eq!(d.schema().attributes(), ["A", "B"]);
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "A,C,B\ne,y,p\ng,n,q\n");
    }

    #[test]
    fn majority_tie_is_lexicographic() {
        let d = load(TABLE_I).unwrap();
        assert_eq!(d.schema().class_name(d.majority_class()), "n");
        let d = load("A,C\na,y\nb,y\n").unwrap();
        assert_eq!(d.schema().class_name(d.majority_class()), "y");
        let d = load("A,C\na,y\na,y\na,y\na,y\na,y\na,y\na,n\na,n\na,n\na,n\n").unwrap();
        assert_eq!(d.schema().class_name(d.majority_class()), "y");
    }

    #[test]
    fn csv_round_trip() {
        let d = load(TABLE_I).unwrap();
        let mut out = Vec::new();
        d.write_csv(&mut out).unwrap();
        assert_eq!(load(std::str::from_utf8(&out).unwrap()).unwrap(), d);
    }
}
