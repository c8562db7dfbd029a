//! JSON persistence for the solution bank.

use std::fs;
use std::path::Path;

use cga_core::SolutionBank;

use crate::error::{Error, Result};

pub fn save_bank(bank: &SolutionBank, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(bank)
        .map_err(|e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() })?;
    fs::write(path, json + "\n").map_err(|e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() })
}

pub fn load_bank(path: &Path) -> Result<SolutionBank> {
    let text = fs::read_to_string(path).map_err(|e| Error::IoFailure { path: path.to_path_buf(), reason: e.to_string() })?;
    if text.trim().is_empty() {
        return Err(Error::IoFailure { path: path.to_path_buf(), reason: "empty bank file".into() });
    }
    let schema = |reason: String| Error::SchemaMismatch { path: path.to_path_buf(), reason };
    let bank: SolutionBank = serde_json::from_str(&text).map_err(|e| schema(e.to_string()))?;
    bank.validate().map_err(|e| schema(e.to_string()))?;
    for (i, e) in bank.entries().iter().enumerate() {
        if e.x.iter().any(|v| !(-1e-9..=1.0 + 1e-9).contains(v)) {
            return Err(schema(format!("entry {i} has weights outside [0, 1]")));
        }
    }
    Ok(bank)
}

/// Loads a bank and checks that its dimension is `n`.
pub fn load_bank_for(path: &Path, n: usize) -> Result<SolutionBank> {
    let bank = load_bank(path)?;
    if bank.n != n {
        return Err(Error::SchemaMismatch { path: path.to_path_buf(), reason: format!("bank has n={}, expected {n}", bank.n) });
    }
    Ok(bank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cga_core::{AgentClass, BankEntry};

    fn sample() -> SolutionBank {
        let mut bank = SolutionBank::new(3);
        bank.add(BankEntry::new(vec![0.2, 0.3, 0.5], "A3", AgentClass::Domain, -0.0123).with_param("gamma", 0.5)).unwrap();
        bank.add(BankEntry::new(vec![1.0 / 3.0; 3], "A4", AgentClass::Domain, 0.1)).unwrap();
        bank.nearest(&[0.3, 0.3, 0.4]).unwrap();
        bank
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bank.json");
        let bank = sample();
        save_bank(&bank, &p).unwrap();
        let back = load_bank(&p).unwrap();
        assert_eq!(back.entries(), bank.entries());
        assert_eq!(back.hit_counts(), bank.hit_counts());
        assert_eq!(back.n, 3);
    }

    #[test]
    fn schema_and_io_failures() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bank.json");
        save_bank(&sample(), &p).unwrap();
        assert!(matches!(load_bank_for(&p, 5), Err(Error::SchemaMismatch { .. })));
        let text = fs::read_to_string(&p).unwrap().replacen("\"n\": 3", "\"n\": 4", 1);
        fs::write(&p, text).unwrap();
        assert!(matches!(load_bank(&p), Err(Error::SchemaMismatch { .. })));
        fs::write(&p, "").unwrap();
        assert!(matches!(load_bank(&p), Err(Error::IoFailure { .. })));
        assert!(matches!(load_bank(&dir.path().join("missing.json")), Err(Error::IoFailure { .. })));
    }
}
