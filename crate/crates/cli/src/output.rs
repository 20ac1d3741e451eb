use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use chebpade::numerics::{to_decimal, BigComplex, BigReal, Precision};
use chebpade::{Error, Result};

use crate::config::RunConfig;

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    status: &'a str,
    config_hash: String,
    precision: u32,
    config: &'a RunConfig,
    /// Parameter values that are choices of this tool rather than data.
    artifact_choices: &'a Value,
    summary: &'a Value,
    files: &'a [FileEntry],
}

/// Collects the files of one command and writes them with a manifest.
pub struct Output<'a> {
    config: &'a RunConfig,
    command: &'a str,
    hash: String,
    files: Vec<FileEntry>,
    pub summary: Value,
    pub artifact_choices: Value,
}

impl<'a> Output<'a> {
    pub fn new(config: &'a RunConfig, command: &'a str) -> Result<Self> {
        fs::create_dir_all(&config.out)
            .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", config.out.display())))?;
        Ok(Output {
            config,
            command,
            hash: config.hash(),
            files: Vec::new(),
            summary: Value::Object(Default::default()),
            artifact_choices: Value::Object(Default::default()),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.config.out.join(name)
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.path(name), bytes)
            .map_err(|e| Error::InvalidInput(format!("cannot write {name}: {e}")))?;
        self.files.push(FileEntry { name: name.into(), bytes: bytes.len(), sha256: hex::encode(Sha256::digest(bytes)) });
        Ok(())
    }

    /// CSV with a provenance comment line, a header and the rows.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut text = format!(
            "# chebpade {} config_hash={} precision={}\n{}\n",
            self.command,
            self.hash,
            self.config.precision,
            header.join(",")
        );
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_bytes(name, text.as_bytes())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut wrapped = serde_json::to_value(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if let Value::Object(map) = &mut wrapped {
            map.insert("config_hash".into(), Value::String(self.hash.clone()));
            map.insert("precision".into(), Value::from(self.config.precision));
        }
        let mut text = serde_json::to_string_pretty(&wrapped).map_err(|e| Error::InvalidInput(e.to_string()))?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn finish(self, status: &str) -> Result<()> {
        let manifest = Manifest {
            command: self.command,
            status,
            config_hash: self.hash.clone(),
            precision: self.config.precision,
            config: self.config,
            artifact_choices: &self.artifact_choices,
            summary: &self.summary,
            files: &self.files,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::InvalidInput(e.to_string()))?;
        text.push('\n');
        fs::write(self.path("manifest.json"), text)
            .map_err(|e| Error::InvalidInput(format!("cannot write manifest.json: {e}")))
    }
}

/// Full-precision decimal string.
pub fn dec(x: &BigReal, prec: Precision) -> String {
    to_decimal(x, prec.digits() as usize)
}

pub fn dec_parts(z: &BigComplex, prec: Precision) -> (String, String) {
    (dec(z.real(), prec), dec(z.imag(), prec))
}

pub fn float(x: f64) -> String {
    format!("{x:e}")
}
