use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::IoError;
use crate::geometry::{Correspondence, Point2};

/// First line of every match file.
pub const MATCHES_HEADER: &str = "MULTIFIT-MATCHES v1";

const MAGIC: &str = "MULTIFIT-MATCHES";

/// Parses match-file text. `path` is only used in error messages.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_matches(text: &str, path: &Path) -> Result<Vec<Correspondence>, IoError> {
    let err = |line: usize, message: String| IoError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim()).unwrap_or("");
    if header != MATCHES_HEADER {
        if let Some(version) = header.strip_prefix(MAGIC) {
            return Err(IoError::Version {
                path: path.to_path_buf(),
                found: version.trim().to_string(),
            });
        }
        return Err(err(1, format!("expected header `{MATCHES_HEADER}`")));
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err(i + 1, format!("expected 5 fields, found {}", fields.len())));
        }
        let mut v = [0.0; 5];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .map_err(|_| err(i + 1, format!("`{f}` is not a number")))?;
            if !slot.is_finite() {
                return Err(err(i + 1, format!("`{f}` is not finite")));
            }
        }
        out.push(Correspondence::new(
            Point2::new(v[0], v[1]),
            Point2::new(v[2], v[3]),
            v[4],
        ));
    }
    if out.is_empty() {
        return Err(err(1, "no correspondences".into()));
    }
    Ok(out)
}

pub fn load_matches(path: impl AsRef<Path>) -> Result<Vec<Correspondence>, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_matches(&text, path)
}

/// Writes coordinates with the shortest representation that parses back to
/// the same value.
pub fn write_matches(out: &mut impl Write, data: &[Correspondence]) -> std::io::Result<()> {
    let mut s = String::with_capacity(32 * (data.len() + 1));
    s.push_str(MATCHES_HEADER);
    s.push('\n');
    for c in data {
        let _ = writeln!(s, "{:?} {:?} {:?} {:?} {:?}", c.p1.x, c.p1.y, c.p2.x, c.p2.y, c.score);
    }
    out.write_all(s.as_bytes())
}

pub fn save_matches(path: impl AsRef<Path>, data: &[Correspondence]) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_matches(&mut buf, data).map_err(|e| IoError::io(path, e))?;
    fs::write(path, buf).map_err(|e| IoError::io(path, e))
}

/// Parses one non-negative integer label per line; `expected` is the number
/// of correspondences.
pub fn parse_labels(text: &str, path: &Path, expected: usize) -> Result<Vec<usize>, IoError> {
    let mut out = Vec::with_capacity(expected);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(line.parse::<usize>().map_err(|_| IoError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: format!("`{line}` is not a non-negative integer label"),
        })?);
    }
    if out.len() != expected {
        return Err(IoError::Parse {
            path: path.to_path_buf(),
            line: out.len(),
            message: format!("expected {expected} labels, found {}", out.len()),
        });
    }
    Ok(out)
}

pub fn load_labels(path: impl AsRef<Path>, expected: usize) -> Result<Vec<usize>, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_labels(&text, path, expected)
}

pub fn write_labels(out: &mut impl Write, labels: &[usize]) -> std::io::Result<()> {
    let mut s = String::with_capacity(3 * labels.len());
    for l in labels {
        let _ = writeln!(s, "{l}");
    }
    out.write_all(s.as_bytes())
}

pub fn save_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_labels(&mut buf, labels).map_err(|e| IoError::io(path, e))?;
    fs::write(path, buf).map_err(|e| IoError::io(path, e))
}

/// Sidecar label path for a match file: the same path with extension `labels`.
pub fn labels_sidecar(matches: &Path) -> PathBuf {
    matches.with_extension("labels")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> &'static Path {
        Path::new("m.txt")
    }

    #[test]
    fn two_records_in_order() {
        let text = "MULTIFIT-MATCHES v1\n1 2 3 4 0.5\n\n# note\n5 6 7 8 0.25\n";
        let m = parse_matches(text, p()).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].p2, Point2::new(3.0, 4.0));
        assert_eq!(m[1].score, 0.25);
    }

    #[test]
    fn other_version_is_a_version_error() {
        let e = parse_matches("MULTIFIT-MATCHES v2\n1 2 3 4 1\n", p()).unwrap_err();
        assert!(matches!(e, IoError::Version { ref found, .. } if found == "v2"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_matches("MULTIFIT-MATCHES v1\n1 2 3 4 1\n1 2 x 4 1\n", p()).unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 3, .. }), "{e}");
        let e = parse_matches("MULTIFIT-MATCHES v1\n1 2 3 NaN 1\n", p()).unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 2, .. }));
        let e = parse_matches("MULTIFIT-MATCHES v1\n1 2 3\n", p()).unwrap_err();
        assert!(matches!(e, IoError::Parse { line: 2, .. }));
        assert!(parse_matches("hello\n", p()).is_err());
        assert!(parse_matches("MULTIFIT-MATCHES v1\n", p()).is_err());
    }

    #[test]
    fn labels_must_match_count() {
        assert_eq!(parse_labels("0\n1\n2\n", p(), 3).unwrap(), vec![0, 1, 2]);
        assert!(parse_labels("0\n1\n", p(), 3).is_err());
        assert!(matches!(
            parse_labels("0\n-1\n", p(), 2).unwrap_err(),
            IoError::Parse { line: 2, .. }
        ));
    }

    #[test]
    fn sidecar_replaces_extension() {
        assert_eq!(labels_sidecar(Path::new("a/b.matches")), PathBuf::from("a/b.labels"));
    }
}
