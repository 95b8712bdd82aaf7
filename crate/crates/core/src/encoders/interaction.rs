use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::sequence::{PeptideSequence, AMINO_ACIDS};
use crate::error::{Error, Result};

const MJ_TABLE: &str = include_str!("../../data/mj1996.txt");

/// Factor applied to the shipped contact table.
pub const MJ_SCALE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    Hp,
    MiyazawaJernigan,
    Custom,
}

/// Symmetric contact energies keyed by residue-code pairs. Missing pairs are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionModel {
    pub kind: InteractionKind,
    alphabet: BTreeSet<char>,
    #[serde(with = "pair_table")]
    table: BTreeMap<(char, char), f64>,
}

fn key(a: char, b: char) -> (char, char) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl InteractionModel {
    /// HP model: only H–H contacts carry energy `eps_hh` (< 0).
    pub fn hp(eps_hh: f64) -> Result<Self> {
        if !(eps_hh < 0.0) {
            return Err(Error::Model(format!("H-H energy must be negative, got {eps_hh}")));
        }
        let mut table = BTreeMap::new();
        table.insert(('H', 'H'), eps_hh);
        Ok(InteractionModel {
            kind: InteractionKind::Hp,
            alphabet: ['H', 'P'].into_iter().collect(),
            table,
        })
    }

    /// The shipped Miyazawa–Jernigan table scaled by [`MJ_SCALE`].
    pub fn miyazawa_jernigan() -> Self {
        let mut m = Self::parse_triangle(MJ_TABLE).expect("shipped table parses");
        for v in m.table.values_mut() {
            *v *= MJ_SCALE;
        }
        m.kind = InteractionKind::MiyazawaJernigan;
        m
    }

    /// Upper-triangular table: a header row of codes, then one row per code starting at the diagonal.
    pub fn parse_triangle(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header: Vec<char> = lines
            .next()
            .ok_or_else(|| Error::input("empty interaction table"))?
            .split_whitespace()
            .map(|t| t.chars().next().unwrap().to_ascii_uppercase())
            .collect();
        let mut table = BTreeMap::new();
        for (row, line) in lines.enumerate() {
            let mut fields = line.split_whitespace();
            let code = fields.next().and_then(|t| t.chars().next()).map(|c| c.to_ascii_uppercase());
            if code != header.get(row).copied() {
                return Err(Error::input(format!("row {} does not match header order", row + 1)));
            }
            let code = code.unwrap();
            for (col, tok) in fields.enumerate() {
                let v: f64 = tok.parse().map_err(|_| Error::input(format!("bad energy {tok:?}")))?;
                let other = *header
                    .get(row + col)
                    .ok_or_else(|| Error::input(format!("row {code} has too many entries")))?;
                table.insert(key(code, other), v);
            }
        }
        Ok(InteractionModel { kind: InteractionKind::Custom, alphabet: header.into_iter().collect(), table })
    }

    /// Custom table from `A B energy` lines.
    pub fn parse_pairs(text: &str) -> Result<Self> {
        let mut table = BTreeMap::new();
        let mut alphabet = BTreeSet::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let parse_code = |s: &str| {
                let mut cs = s.chars();
                match (cs.next(), cs.next()) {
                    (Some(c), None) => Ok(c.to_ascii_uppercase()),
                    _ => Err(Error::input(format!("line {}: bad residue code {s:?}", n + 1))),
                }
            };
            if f.len() != 3 {
                return Err(Error::input(format!("line {}: expected 'A B energy'", n + 1)));
            }
            let (a, b) = (parse_code(f[0])?, parse_code(f[1])?);
            let v: f64 = f[2].parse().map_err(|_| Error::input(format!("line {}: bad energy", n + 1)))?;
            alphabet.insert(a);
            alphabet.insert(b);
            if let Some(old) = table.insert(key(a, b), v) {
                if old != v {
                    return Err(Error::input(format!("conflicting energies for {a}-{b}")));
                }
            }
        }
        if table.is_empty() {
            return Err(Error::input("interaction table is empty"));
        }
        Ok(InteractionModel { kind: InteractionKind::Custom, alphabet, table })
    }

    /// HP when the sequence only uses H and P, otherwise the MJ table.
    pub fn default_for(seq: &PeptideSequence) -> Self {
        if seq.residues().iter().all(|&c| c == 'H' || c == 'P') {
            Self::hp(-1.0).unwrap()
        } else {
            Self::miyazawa_jernigan()
        }
    }

    pub fn energy(&self, a: char, b: char) -> f64 {
        self.table.get(&key(a, b)).copied().unwrap_or(0.0)
    }

    pub fn alphabet(&self) -> &BTreeSet<char> {
        &self.alphabet
    }

    pub fn check_sequence(&self, seq: &PeptideSequence) -> Result<()> {
        match seq.residues().iter().find(|c| !self.alphabet.contains(c)) {
            Some(c) => Err(Error::input(format!("residue {c:?} is not covered by the {:?} interaction model", self.kind))),
            None => Ok(()),
        }
    }

    /// Contact energy between beads `i` and `j` of `seq`.
    pub fn pair(&self, seq: &PeptideSequence, i: usize, j: usize) -> f64 {
        self.energy(seq.residue(i), seq.residue(j))
    }

    /// Turn-based encodings require every used contact energy to be ≤ 0.
    pub fn check_non_positive(&self, seq: &PeptideSequence) -> Result<()> {
        for i in 0..seq.len() {
            for j in i + 1..seq.len() {
                let e = self.pair(seq, i, j);
                if e > 0.0 {
                    return Err(Error::Model(format!(
                        "positive contact energy {e} between beads {} and {}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_canonical_alphabet(&self) -> bool {
        AMINO_ACIDS.chars().all(|c| self.alphabet.contains(&c))
    }
}

mod pair_table {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        a: char,
        b: char,
        energy: f64,
    }

    pub fn serialize<S: Serializer>(t: &BTreeMap<(char, char), f64>, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Entry> = t.iter().map(|(&(a, b), &energy)| Entry { a, b, energy }).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<(char, char), f64>, D::Error> {
        let v = Vec::<Entry>::deserialize(d)?;
        Ok(v.into_iter().map(|e| (super::key(e.a, e.b), e.energy)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mj_table_is_complete_and_symmetric() {
        let mj = InteractionModel::miyazawa_jernigan();
        assert!(mj.is_canonical_alphabet());
        assert_eq!(mj.table.len(), 210);
        assert!((mj.energy('L', 'L') + 0.737).abs() < 1e-12);
        assert_eq!(mj.energy('K', 'L'), mj.energy('L', 'K'));
        assert!(mj.table.values().all(|&v| v < 0.0));
    }

    #[test]
    fn hp_energies() {
        let hp = InteractionModel::hp(-1.0).unwrap();
        assert_eq!(hp.energy('H', 'H'), -1.0);
        assert_eq!(hp.energy('H', 'P'), 0.0);
        assert!(InteractionModel::hp(0.5).is_err());
    }

    #[test]
    fn custom_pairs() {
        let m = InteractionModel::parse_pairs("A G -1.5\nG G 0.25\n").unwrap();
        assert_eq!(m.energy('G', 'A'), -1.5);
        let seq = PeptideSequence::new("AGAG").unwrap();
        m.check_sequence(&seq).unwrap();
        assert!(m.check_non_positive(&seq).is_err());
    }
}
