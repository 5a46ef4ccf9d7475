//! UTF-8 `key = value` text blocks used for configuration files and
//! simulation specs. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KvMap {
    entries: BTreeMap<String, String>,
}

impl KvMap {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value, got {line:?}", i + 1))
            })?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(Error::InvalidConfig(format!("line {}: empty key", i + 1)));
            }
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::InvalidConfig(format!("line {}: duplicate key {key:?}", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Reject any key outside `known`.
    pub fn check_known(&self, known: &[&str]) -> Result<()> {
        match self.keys().find(|k| !known.contains(k)) {
            Some(k) => Err(Error::InvalidConfig(format!("unknown key {k:?}"))),
            None => Ok(()),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::InvalidConfig(format!("key {key:?}: cannot parse {v:?}")))
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>> {
        self.raw(key)
            .map(|v| match v.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" | "on" => Ok(true),
                "false" | "no" | "0" | "off" => Ok(false),
                _ => Err(Error::InvalidConfig(format!("key {key:?}: not a boolean: {v:?}"))),
            })
            .transpose()
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.raw(key).map(|v| parse_list(key, v)).transpose()
    }

    /// Row-major matrix written as `a,b;c,d`.
    pub fn get_matrix(&self, key: &str) -> Result<Option<DMatrix<f64>>> {
        self.raw(key).map(|v| parse_matrix(key, v)).transpose()
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

pub fn parse_list<T: FromStr>(key: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::InvalidConfig(format!("key {key:?}: cannot parse element {s:?}")))
        })
        .collect()
}

pub fn parse_matrix(key: &str, text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .map(|r| parse_list::<f64>(key, r))
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidConfig(format!("key {key:?}: malformed matrix")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

pub fn format_list<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn format_matrix(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .map(|i| format_list(&m.row(i).iter().copied().collect::<Vec<_>>()))
        .collect::<Vec<_>>()
        .join(";")
}
