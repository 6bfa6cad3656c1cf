use serde::{Deserialize, Serialize};
use std::fs;
use std::io;
use std::path::Path;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A named table of decimal strings, written as `<name>.csv` or `<name>.json`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: &'static str,
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &'static str, headers: &[&'static str]) -> Table {
        Table {
            name,
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn file_name(&self, format: Format) -> String {
        format!("{}.{}", self.name, format.name())
    }

    fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error())
    }

    fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let obj = self
                    .headers
                    .iter()
                    .zip(r)
                    .map(|(h, v)| (h.to_string(), serde_json::Value::String(v.clone())))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn render(&self, format: Format) -> io::Result<Vec<u8>> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(pretty(&self.to_json())),
        }
    }
}

pub(crate) fn pretty(v: &impl Serialize) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

/// Everything a command produces besides the manifest.
#[derive(Clone, Debug, Default)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
}

impl Artifacts {
    pub fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Writes all tables and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path, format: Format) -> io::Result<Vec<String>> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        for t in &self.tables {
            let name = t.file_name(format);
            fs::write(dir.join(&name), t.render(format)?)?;
            files.push(name);
        }
        let mut summary = self.summary.join("\n");
        summary.push('\n');
        fs::write(dir.join("summary.txt"), summary)?;
        files.push("summary.txt".into());
        Ok(files)
    }
}
