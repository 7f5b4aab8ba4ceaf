use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{write_field_csv, write_hcl1, ScalarField};

pub const SCHEMA_LINE: &str = "# hcl-schema v1";

/// Collects artifacts of one run; every write goes through here.
pub(crate) struct Sink {
    dir: PathBuf,
    seed: u64,
    command: &'static str,
    pub files: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, seed: u64, command: &'static str) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), seed, command, files: Vec::new() })
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut buf = Vec::new();
        writeln!(buf, "{SCHEMA_LINE}")?;
        writeln!(buf, "# seed={} command={}", self.seed, self.command)?;
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r).map_err(|e| Error::Numeric(format!("csv: {e}")))?;
            }
            w.flush()?;
        }
        self.put(name, &buf)
    }

    pub fn field(&mut self, stem: &str, u: &ScalarField) -> Result<()> {
        let mut bin = Vec::new();
        write_hcl1(u, &mut bin)?;
        self.put(&format!("{stem}.hcl1"), &bin)?;
        let mut body = Vec::new();
        write_field_csv(u, &mut body)?;
        let rest = body.iter().position(|&b| b == b'\n').map_or(&body[..], |i| &body[i + 1..]);
        let mut text = Vec::new();
        writeln!(text, "{SCHEMA_LINE}")?;
        writeln!(text, "# seed={} command={}", self.seed, self.command)?;
        text.extend_from_slice(rest);
        self.put(&format!("{stem}.csv"), &text)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_vec_pretty(value).map_err(|e| Error::Numeric(format!("json: {e}")))?;
        s.push(b'\n');
        self.put(name, &s)
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }
}
