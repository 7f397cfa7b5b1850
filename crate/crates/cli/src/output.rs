//! Deterministic CSV emission: every file starts with the resolved-config
//! comment line, numbers carry 17 significant digits.

use bsasym_core::grid::fmt_g17;
use bsasym_core::{Error, Result};
use std::fs;
use std::path::PathBuf;

pub struct OutputDir {
    dir: PathBuf,
    echo: String,
}

impl OutputDir {
    pub fn new(dir: &str, echo: String) -> Result<Self> {
        let dir = PathBuf::from(dir);
        fs::create_dir_all(&dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir, echo })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes a CSV with the config echo, a header, and formatted rows.
    pub fn write_csv(&self, name: &str, header: &str, rows: &[Vec<CsvValue>]) -> Result<PathBuf> {
        let path = self.path(name);
        let mut text = String::new();
        text.push_str(&self.echo);
        text.push('\n');
        text.push_str(header);
        text.push('\n');
        for row in rows {
            let mut first = true;
            for v in row {
                if !first {
                    text.push(',');
                }
                first = false;
                match v {
                    CsvValue::Num(x) => text.push_str(&fmt_g17(*x)),
                    CsvValue::Int(k) => text.push_str(&k.to_string()),
                    CsvValue::Text(s) => text.push_str(s),
                }
            }
            text.push('\n');
        }
        fs::write(&path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    /// Writes a heightmap dump. The dump format fixes its own header, so no
    /// config echo is prepended here.
    pub fn write_heightmap(
        &self,
        name: &str,
        field: &bsasym_core::grid::Field,
        t: f64,
    ) -> Result<PathBuf> {
        let path = self.path(name);
        let mut buf = Vec::new();
        field
            .write_heightmap(&mut buf, t)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        fs::write(&path, buf)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

pub enum CsvValue {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for CsvValue {
    fn from(x: f64) -> Self {
        CsvValue::Num(x)
    }
}

impl From<usize> for CsvValue {
    fn from(k: usize) -> Self {
        CsvValue::Int(k as i64)
    }
}

impl From<&str> for CsvValue {
    fn from(s: &str) -> Self {
        CsvValue::Text(s.to_string())
    }
}

impl From<String> for CsvValue {
    fn from(s: String) -> Self {
        CsvValue::Text(s)
    }
}
