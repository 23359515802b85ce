use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use selfsim::cellmodel::{bundled, parse_cell_spec, CellSpec};
use selfsim::ratfun::ComplexPoint;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("spec {0:?} is neither a readable file nor a bundled spec name")]
    SpecNotFound(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("{what} = {value} exceeds the cap of {cap}")]
    Cap { what: &'static str, value: String, cap: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] selfsim::Error),
}

macro_rules! core_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

core_from!(
    selfsim::cellmodel::CellError,
    selfsim::cellmodel::VertexRefError,
    selfsim::transfer::TransferError,
    selfsim::oracle::OracleError,
    selfsim::dynamics::DynamicsError,
    selfsim::green::GreenError
);

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => e.kind().exit_code(),
            CliError::Cap { .. } => 3,
            _ => 1,
        }
    }
}

pub fn check_cap<T: PartialOrd + ToString>(what: &'static str, value: T, cap: T) -> Result<(), CliError> {
    if value > cap {
        Err(CliError::Cap { what, value: value.to_string(), cap: cap.to_string() })
    } else {
        Ok(())
    }
}

pub struct LoadedSpec {
    pub text: String,
    /// File path, or `bundled:<name>`.
    pub source: String,
    pub sha256: String,
}

impl LoadedSpec {
    pub fn parse(&self) -> Result<CellSpec, CliError> {
        Ok(parse_cell_spec(&self.text)?)
    }
}

pub fn load_spec(arg: &str) -> Result<LoadedSpec, CliError> {
    let path = Path::new(arg);
    let (text, source) = if path.is_file() {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: arg.to_string(), source })?;
        (text, arg.to_string())
    } else {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
        let text = match stem {
            "line2" => bundled::LINE2,
            "sierpinski" => bundled::SIERPINSKI,
            "vicsek" => bundled::VICSEK,
            _ => return Err(CliError::SpecNotFound(arg.to_string())),
        };
        (text.to_string(), format!("bundled:{stem}"))
    };
    let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(LoadedSpec { text, source, sha256 })
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub spec: String,
    pub spec_sha256: String,
    pub seed: u64,
    pub precision_bits: u32,
    pub parameters: Value,
}

impl Provenance {
    fn header(&self, prefix: &str) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{prefix}{} {} {}", self.tool, self.version, self.command);
        let _ = writeln!(s, "{prefix}spec {} sha256 {}", self.spec, self.spec_sha256);
        let _ = writeln!(s, "{prefix}seed {} precision {} bits", self.seed, self.precision_bits);
        let _ = writeln!(s, "{prefix}parameters {}", self.parameters);
        s
    }
}

pub struct Output {
    pub dir: Option<PathBuf>,
    pub json: bool,
    pub provenance: Provenance,
}

impl Output {
    fn emit(&self, file: &str, content: &str) -> Result<(), CliError> {
        match &self.dir {
            None => {
                print!("{content}");
                Ok(())
            }
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
                let path = dir.join(file);
                fs::write(&path, content).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
                log::info!("wrote {}", path.display());
                Ok(())
            }
        }
    }

    /// Writes a report as text (header lines prefixed by `#`) or as JSON.
    pub fn report<T: Serialize>(&self, stem: &str, text: &str, value: &T) -> Result<(), CliError> {
        if self.json {
            let doc = json!({ "provenance": self.provenance, "report": value });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            self.emit(&format!("{stem}.json"), &s)
        } else {
            let mut s = self.provenance.header("# ");
            s.push_str(text);
            if !s.ends_with('\n') {
                s.push('\n');
            }
            self.emit(&format!("{stem}.txt"), &s)
        }
    }

    pub fn csv(&self, stem: &str, rows: &[CsvRow]) -> Result<(), CliError> {
        let mut s = self.provenance.header("# ");
        s.push_str("re,im,depth,kind\n");
        for r in rows {
            let (re, im) = match r.z {
                ComplexPoint::Infinity => ("inf".to_string(), "0".to_string()),
                // + 0.0 turns −0 into 0
                ComplexPoint::Finite(c) => ((c.re + 0.0).to_string(), (c.im + 0.0).to_string()),
            };
            let _ = writeln!(s, "{re},{im},{},{}", r.depth, r.kind);
        }
        self.emit(&format!("{stem}.csv"), &s)
    }
}

pub struct CsvRow {
    pub z: ComplexPoint,
    pub depth: usize,
    pub kind: &'static str,
}
