use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::harmony::{Harmonicity, Source, TokenRecord};

/// One corpus token: its recording, its annotation and its metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    /// Relative paths are taken relative to the manifest's directory.
    pub audio: PathBuf,
    pub textgrid: PathBuf,
    pub token_id: String,
    pub word: String,
    pub harmonic: Harmonicity,
    pub speaker: String,
    pub source: Source,
}

impl ManifestRow {
    pub fn token(&self) -> TokenRecord {
        TokenRecord {
            token_id: self.token_id.clone(),
            word: self.word.clone(),
            harmonic: self.harmonic,
            speaker: self.speaker.clone(),
            source: self.source,
        }
    }
}

/// CSV list of corpus tokens with columns
/// `audio,textgrid,token_id,word,harmonic,speaker,source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusManifest {
    pub rows: Vec<ManifestRow>,
    /// Directory relative paths resolve against.
    pub base_dir: PathBuf,
}

impl CorpusManifest {
    pub fn new(rows: Vec<ManifestRow>, base_dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let mut seen = HashSet::new();
        for (k, r) in rows.iter().enumerate() {
            if r.token_id.is_empty() {
                return Err(CliError::Manifest(format!("row {}: empty token_id", k + 1)));
            }
            if !seen.insert(r.token_id.as_str()) {
                return Err(CliError::Manifest(format!(
                    "row {}: duplicate token_id '{}'",
                    k + 1,
                    r.token_id
                )));
            }
        }
        Ok(Self {
            rows,
            base_dir: base_dir.into(),
        })
    }

    pub fn from_reader(reader: impl std::io::Read, base_dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let rows = rdr
            .deserialize()
            .enumerate()
            .map(|(k, r)| r.map_err(|e| CliError::Manifest(format!("row {}: {e}", k + 1))))
            .collect::<Result<Vec<ManifestRow>, _>>()?;
        Self::new(rows, base_dir)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_reader(file, base)
            .map_err(|e| CliError::Manifest(format!("{}: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
        for r in &self.rows {
            w.serialize(r).map_err(|e| CliError::csv(path, e))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Rows whose audio or TextGrid file does not exist, with the missing path.
    pub fn missing_files(&self) -> Vec<(usize, PathBuf)> {
        let mut out = Vec::new();
        for (k, r) in self.rows.iter().enumerate() {
            for p in [&r.audio, &r.textgrid] {
                let full = self.resolve(p);
                if !full.is_file() {
                    out.push((k, full));
                }
            }
        }
        out
    }

    pub fn tokens(&self) -> Vec<TokenRecord> {
        self.rows.iter().map(ManifestRow::token).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = "audio,textgrid,token_id,word,harmonic,speaker,source\n\
        audio/a.wav,textgrid/a.TextGrid,a,Eti,non-harmonic,s1,training\n\
        /abs/b.wav,textgrid/b.TextGrid,b,oti,harmonic,s1,generated\n";

    #[test]
    fn parses_rows_and_resolves_paths() {
        let m = CorpusManifest::from_reader(TEXT.as_bytes(), "/corpus").unwrap();
        assert_eq!(m.rows.len(), 2);
        assert_eq!(m.rows[0].harmonic, Harmonicity::NonHarmonic);
        assert_eq!(m.rows[1].source, Source::Generated);
        assert_eq!(m.resolve(&m.rows[0].audio), PathBuf::from("/corpus/audio/a.wav"));
        assert_eq!(m.resolve(&m.rows[1].audio), PathBuf::from("/abs/b.wav"));
        assert_eq!(m.missing_files().len(), 4);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let text = TEXT.replace(",b,oti", ",a,oti");
        assert!(matches!(
            CorpusManifest::from_reader(text.as_bytes(), "."),
            Err(CliError::Manifest(m)) if m.contains("duplicate")
        ));
    }

    #[test]
    fn bad_label_rejected() {
        let text = TEXT.replace("non-harmonic", "maybe");
        assert!(CorpusManifest::from_reader(text.as_bytes(), ".").is_err());
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let m = CorpusManifest::from_reader(TEXT.as_bytes(), dir.path()).unwrap();
        let path = dir.path().join("manifest.csv");
        m.write(&path).unwrap();
        assert_eq!(CorpusManifest::load(&path).unwrap(), m);
    }
}
