use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 20 canonical one-letter amino-acid codes.
pub const AMINO_ACIDS: &str = "ACDEFGHIKLMNPQRSTVWY";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PeptideSequence {
    residues: Vec<char>,
}

impl PeptideSequence {
    pub fn new(s: &str) -> Result<Self> {
        let residues: Vec<char> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| c.to_ascii_uppercase())
            .collect();
        if residues.len() < 2 {
            return Err(Error::input(format!("sequence needs at least 2 residues, got {}", residues.len())));
        }
        if let Some(bad) = residues.iter().find(|c| !AMINO_ACIDS.contains(**c)) {
            return Err(Error::input(format!("unknown residue code {bad:?}")));
        }
        Ok(PeptideSequence { residues })
    }

    /// Reads the single record of a FASTA file.
    pub fn from_fasta(text: &str) -> Result<Self> {
        let mut records = 0;
        let mut body = String::new();
        for line in text.lines() {
            let line = line.trim();
            if line.starts_with('>') {
                records += 1;
                if records > 1 {
                    return Err(Error::input("FASTA input holds more than one record"));
                }
            } else if !line.starts_with(';') {
                body.push_str(line);
            }
        }
        Self::new(&body)
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn residues(&self) -> &[char] {
        &self.residues
    }

    pub fn residue(&self, i: usize) -> char {
        self.residues[i]
    }

    /// First `n` residues.
    pub fn prefix(&self, n: usize) -> Result<Self> {
        if n < 2 || n > self.len() {
            return Err(Error::input(format!("prefix length {n} outside 2..={}", self.len())));
        }
        Ok(PeptideSequence { residues: self.residues[..n].to_vec() })
    }
}

impl fmt::Display for PeptideSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.residues {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl TryFrom<String> for PeptideSequence {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        PeptideSequence::new(&s)
    }
}

impl From<PeptideSequence> for String {
    fn from(s: PeptideSequence) -> String {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        assert_eq!(PeptideSequence::new("hpph").unwrap().to_string(), "HPPH");
        assert!(PeptideSequence::new("H").is_err());
        assert!(PeptideSequence::new("HXB").is_err());
    }

    #[test]
    fn fasta() {
        let s = PeptideSequence::from_fasta(">x test\nLKKKK\nLKKKKL\n").unwrap();
        assert_eq!(s.len(), 11);
        assert!(PeptideSequence::from_fasta(">a\nHH\n>b\nPP\n").is_err());
    }
}
