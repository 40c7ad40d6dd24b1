//! Line-delimited JSON records: one object per line, blank lines and lines
//! starting with `#` are skipped. Every record keeps its 1-based line number
//! so callers can report positions.

use serde::de::DeserializeOwned;
use serde::Serialize;

/// A record that failed to decode.
#[derive(Debug)]
pub struct LineError {
    pub line: usize,
    pub source: serde_json::Error,
}

pub fn read_records<T: DeserializeOwned>(src: &str) -> Result<Vec<(usize, T)>, LineError> {
    let mut out = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|source| LineError {
            line: idx + 1,
            source,
        })?;
        out.push((idx + 1, record));
    }
    Ok(out)
}

/// Serializes each record on its own line, with a trailing newline.
pub fn write_records<'a, T, I>(records: I) -> String
where
    T: Serialize + 'a,
    I: IntoIterator<Item = &'a T>,
{
    let mut out = String::new();
    for r in records {
        // Serializing plain structs and maps with string keys cannot fail.
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}
