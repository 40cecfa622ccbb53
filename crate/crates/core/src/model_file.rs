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

//! Versioned key-value text dump of a classifier and its schema.
//!
//! ```text
//! format: cba-model
//! version: 1
//! provenance: cba-odm1
//! columns: A B C
//! class_column: 2
//! values: e g f
//! values: p q w
//! classes: y n
//! default: 1
//! rule: class=1 rulesup=2 condsup=2 n=10 pass=1 ord=7 items=1:2
//! ```
//!
//! Names are percent-escaped so that they never contain spaces, `:`, `=`
//! or line breaks. Rules refer to attributes, values and classes by id.

use std::sync::Arc;

use crate::classifier::{Classifier, Provenance};
use crate::dataset::Schema;
use crate::error::{CbaError, Result};
use crate::mining::{ClassAssociationRule, Condset, Item};

pub const MODEL_VERSION: u32 = 1;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '%' | ' ' | '\t' | '\n' | '\r' | ':' | '=' | ',' => {
                let mut buf = [0u8; 4];
                for b in ch.encode_utf8(&mut buf).bytes() {
                    out.push_str(&format!("%{b:02X}"));
                }
            }
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str, line: usize) -> Result<String> {
    let bytes = s.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = s
                .get(i + 1..i + 3)
                .ok_or_else(|| format_err(line, "truncated escape"))?;
            out.push(u8::from_str_radix(hex, 16).map_err(|_| format_err(line, "bad escape"))?);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| format_err(line, "invalid UTF-8 in name"))
}

fn format_err(line: usize, message: impl Into<String>) -> CbaError {
    CbaError::ModelFormat {
        line,
        message: message.into(),
    }
}

fn join_names<'a>(names: impl IntoIterator<Item = &'a String>) -> String {
    names.into_iter().map(|n| escape(n)).collect::<Vec<_>>().join(" ")
}

pub fn write_model(classifier: &Classifier) -> String {
    let s = &classifier.schema;
    let mut out = String::new();
    out.push_str("format: cba-model\n");
    out.push_str(&format!("version: {MODEL_VERSION}\n"));
    out.push_str(&format!("provenance: {}\n", classifier.provenance));
    out.push_str(&format!("columns: {}\n", join_names(s.columns())));
    out.push_str(&format!("class_column: {}\n", s.class_column_index()));
    for a in 0..s.num_attributes() as u32 {
        out.push_str(&format!("values: {}\n", join_names(s.values(a))));
    }
    out.push_str(&format!("classes: {}\n", join_names(s.classes())));
    out.push_str(&format!("default: {}\n", classifier.default_class));
    for r in &classifier.rules {
        let items = r
            .condset
            .items()
            .iter()
            .map(|it| format!("{}:{}", it.attribute, it.value))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "rule: class={} rulesup={} condsup={} n={} pass={} ord={} items={}\n",
            r.class, r.rulesup, r.condsup, r.n, r.pass, r.ordinal, items
        ));
    }
    out
}

pub fn read_model(text: &str) -> Result<Classifier> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty());
    let mut next_kv = |expected: &str| -> Result<(usize, String)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| format_err(0, format!("missing `{expected}`")))?;
        match line.split_once(':') {
            Some((k, v)) if k == expected => Ok((no, v.trim().to_string())),
            _ => Err(format_err(no, format!("expected `{expected}:`"))),
        }
    };

    let (no, fmt) = next_kv("format")?;
    if fmt != "cba-model" {
        return Err(format_err(no, "not a cba model file"));
    }
    let (_, version) = next_kv("version")?;
    if version != MODEL_VERSION.to_string() {
        return Err(CbaError::VersionMismatch {
            found: version,
            expected: MODEL_VERSION,
        });
    }
    let (no, prov) = next_kv("provenance")?;
    let provenance: Provenance = prov.parse().map_err(|e: String| format_err(no, e))?;
    let names = |no: usize, v: &str| -> Result<Vec<String>> { v.split_whitespace().map(|t| unescape(t, no)).collect() };
    let (no, cols) = next_kv("columns")?;
    let columns = names(no, &cols)?;
    let (no, cc) = next_kv("class_column")?;
    let class_column: usize = cc.parse().map_err(|_| format_err(no, "bad class column"))?;
    let mut values = Vec::new();
    for _ in 1..columns.len() {
        let (no, v) = next_kv("values")?;
        values.push(names(no, &v)?);
    }
    let (no, cl) = next_kv("classes")?;
    let classes = names(no, &cl)?;
    let schema =
        Schema::from_parts(columns, class_column, values, classes).map_err(|e| format_err(no, e.to_string()))?;
    let (no, d) = next_kv("default")?;
    let default_class: u32 = d.parse().map_err(|_| format_err(no, "bad default class"))?;
    if default_class as usize >= schema.num_classes() {
        return Err(format_err(no, "default class out of range"));
    }

    let mut rules = Vec::new();
    loop {
        match next_kv("rule") {
            Ok((no, body)) => rules.push(parse_rule(no, &body, &schema)?),
            // line 0: end of input
            Err(CbaError::ModelFormat { line: 0, .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(Classifier {
        schema: Arc::new(schema),
        rules,
        default_class,
        provenance,
    })
}

fn parse_rule(no: usize, body: &str, schema: &Schema) -> Result<ClassAssociationRule> {
    let mut fields = std::collections::HashMap::new();
    for tok in body.split_whitespace() {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| format_err(no, "expected key=value"))?;
        fields.insert(k, v);
    }
    let num = |k: &str| -> Result<u64> {
        fields
            .get(k)
            .ok_or_else(|| format_err(no, format!("missing `{k}`")))?
            .parse()
            .map_err(|_| format_err(no, format!("bad `{k}`")))
    };
    let mut items = Vec::new();
    let raw_items = fields.get("items").ok_or_else(|| format_err(no, "missing `items`"))?;
    for pair in raw_items.split(',').filter(|p| !p.is_empty()) {
        let (a, v) = pair.split_once(':').ok_or_else(|| format_err(no, "bad item"))?;
        let a: u32 = a.parse().map_err(|_| format_err(no, "bad item"))?;
        let v: u32 = v.parse().map_err(|_| format_err(no, "bad item"))?;
        if a as usize >= schema.num_attributes() || v as usize >= schema.values(a).len() {
            return Err(format_err(no, "item out of range"));
        }
        items.push(Item::new(a, v));
    }
    let condset = Condset::new(items).ok_or_else(|| format_err(no, "repeated attribute"))?;
    let class = num("class")? as u32;
    if class as usize >= schema.num_classes() {
        return Err(format_err(no, "class out of range"));
    }
    let (rulesup, condsup, n) = (num("rulesup")?, num("condsup")?, num("n")?);
    if condsup == 0 || n == 0 {
        return Err(format_err(no, "zero denominator"));
    }
    Ok(ClassAssociationRule {
        condset,
        class,
        rulesup,
        condsup,
        n,
        pass: num("pass")? as u32,
        ordinal: num("ord")? as u32,
    })
}
