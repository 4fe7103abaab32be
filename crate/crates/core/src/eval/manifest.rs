//! Corpus manifests.
//!
//! One utterance per line: `wav_path f0_path`, separated by whitespace.
//! Relative paths resolve against the manifest's directory. Blank lines and
//! text after `#` are ignored.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::signal::load_wav;

use super::bench::Utterance;
use super::track::FramePitchTrack;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub wav: PathBuf,
    pub f0: PathBuf,
}

impl ManifestEntry {
    /// Utterance name: the WAV file stem.
    pub fn name(&self) -> String {
        self.wav
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.wav.display().to_string())
    }
}

pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [wav, f0] = parts.as_slice() else {
            return Err(Error::Manifest(format!(
                "line {}: expected 'wav_path f0_path', got '{line}'",
                lineno + 1
            )));
        };
        entries.push(ManifestEntry {
            wav: base.join(wav),
            f0: base.join(f0),
        });
    }
    if entries.is_empty() {
        return Err(Error::Manifest("manifest lists no utterances".into()));
    }
    Ok(entries)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
    parse_manifest(&text, path.parent().unwrap_or(Path::new("")))
}

/// Loads every listed utterance and its reference track.
pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<Utterance>> {
    read_manifest(path)?
        .into_iter()
        .map(|e| {
            let truth = FramePitchTrack::read_reference(&e.f0)
                .map_err(|err| Error::Manifest(format!("{}: {err}", e.f0.display())))?;
            Ok(Utterance {
                name: e.name(),
                audio: load_wav(&e.wav)?,
                truth,
            })
        })
        .collect()
}

/// Writes a manifest whose paths are relative to its own directory when
/// possible.
pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new(""));
    let rel = |p: &Path| p.strip_prefix(base).unwrap_or(p).display().to_string();
    let mut out = String::new();
    for e in entries {
        out.push_str(&format!("{} {}\n", rel(&e.wav), rel(&e.f0)));
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths_resolve_against_base() {
        let e = parse_manifest(
            "# corpus\na.wav a.f0\n\n/abs/b.wav b.f0  # trailing\n",
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[0].wav, PathBuf::from("/data/a.wav"));
        assert_eq!(e[1].wav, PathBuf::from("/abs/b.wav"));
        assert_eq!(e[1].f0, PathBuf::from("/data/b.f0"));
        assert_eq!(e[0].name(), "a");
    }

    #[test]
    fn empty_manifest_is_an_error() {
        assert!(matches!(
            parse_manifest("# nothing\n\n", Path::new(".")),
            Err(Error::Manifest(_))
        ));
    }

    #[test]
    fn malformed_line_is_an_error() {
        assert!(parse_manifest("a.wav\n", Path::new(".")).is_err());
        assert!(parse_manifest("a.wav b c\n", Path::new(".")).is_err());
    }
}
