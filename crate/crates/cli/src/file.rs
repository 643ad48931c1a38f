//! The versioned JSON monodromy file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use lefschetz_core::ledger::LedgerFlags;
use lefschetz_core::surface::{DeclaredDiffeo, SurfaceError};
use lefschetz_core::word::{ProvenanceEntry, WordError};
use lefschetz_core::{CurveExpr, Factorization, Ledger, Surface};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("malformed monodromy file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format_version {0} (this build reads {FORMAT_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerRecord {
    pub n: i64,
    pub sigma: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyFile {
    pub format_version: u32,
    pub genus: usize,
    pub letters: Vec<CurveExpr>,
    pub ledger: LedgerRecord,
    pub flags: LedgerFlags,
    pub provenance: Vec<ProvenanceEntry>,
    /// Maps referenced by letters, so a file can be checked on its own.
    #[serde(default)]
    pub declared_maps: Vec<DeclaredDiffeo<i64>>,
}

impl MonodromyFile {
    pub fn from_word(w: &Factorization, surface: &Surface) -> Self {
        let ledger = w.ledger();
        Self {
            format_version: FORMAT_VERSION,
            genus: w.genus(),
            letters: w.letters().to_vec(),
            ledger: LedgerRecord { n: ledger.n, sigma: ledger.sigma },
            flags: ledger.flags.clone(),
            provenance: w.provenance().to_vec(),
            declared_maps: surface.declared_maps().cloned().collect(),
        }
    }

    pub fn parse(text: &str) -> Result<Self, FileError> {
        let file: Self = serde_json::from_str(text)?;
        if file.format_version != FORMAT_VERSION {
            return Err(FileError::Version(file.format_version));
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("file serializes");
        s.push('\n');
        s
    }

    /// The standard surface with this file's maps declared. Consistency of
    /// the maps is not checked here.
    pub fn surface(&self) -> Result<Surface, FileError> {
        let mut surface = Surface::standard(self.genus)?;
        for d in &self.declared_maps {
            surface.declare(d.clone())?;
        }
        Ok(surface)
    }

    pub fn ledger(&self) -> Ledger {
        Ledger::new(self.genus, self.ledger.n, self.ledger.sigma, self.flags.clone())
    }

    pub fn to_factorization(&self) -> Result<Factorization, FileError> {
        Ok(Factorization::new(self.genus, self.letters.clone(), self.ledger(), self.provenance.clone())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lefschetz_core::pipelines::hyperelliptic_base;

    #[test]
    fn round_trip() {
        let s = Surface::standard(3).unwrap();
        let w = hyperelliptic_base(3).unwrap();
        let f = MonodromyFile::from_word(&w, &s);
        let back = MonodromyFile::parse(&f.to_json()).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_factorization().unwrap(), w);
    }

    #[test]
    fn rejects_unknown_fields_and_versions() {
        let s = Surface::standard(3).unwrap();
        let f = MonodromyFile::from_word(&hyperelliptic_base(3).unwrap(), &s);
        let mut v: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        v["extra"] = serde_json::json!(1);
        assert!(matches!(MonodromyFile::parse(&v.to_string()), Err(FileError::Json(_))));
        let mut v: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        v["format_version"] = serde_json::json!(2);
        assert!(matches!(MonodromyFile::parse(&v.to_string()), Err(FileError::Version(2))));
        let mut v: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        v["letters"][0] = serde_json::json!({"named": "c1", "bogus": 0});
        assert!(MonodromyFile::parse(&v.to_string()).is_err());
    }
}
