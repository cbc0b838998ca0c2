//! JSON documents with fixed-precision floats and a timestamp-free hash.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use sha2::{Digest, Sha256};

use crate::error::CliResult;

/// Version of every JSON document the CLI writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Pretty printer that writes every float with 17 significant digits.
pub struct SigFormatter<'a>(PrettyFormatter<'a>);

impl Default for SigFormatter<'_> {
    fn default() -> Self {
        SigFormatter(PrettyFormatter::with_indent(b"  "))
    }
}

impl Formatter for SigFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` with [`SigFormatter`].
pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter::default());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(buf)
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    canonical_sha256: Option<String>,
    config: &'a C,
    result: &'a R,
}

/// Renders a versioned document. `canonical_sha256` covers the same document
/// with `generated_at` and the hash itself left out.
pub fn render_document<C: Serialize, R: Serialize>(command: &str, config: &C, result: &R) -> CliResult<Vec<u8>> {
    let mut doc = Document {
        schema_version: SCHEMA_VERSION,
        command,
        generated_at: None,
        canonical_sha256: None,
        config,
        result,
    };
    let canonical = to_json_bytes(&doc)?;
    doc.canonical_sha256 = Some(sha256_hex(&canonical));
    doc.generated_at = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    to_json_bytes(&doc)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes to `path`, or to stdout when it is `None` or `-`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            let mut w = BufWriter::new(File::create(p).map_err(|e| io_context(p, e))?);
            w.write_all(bytes)?;
            w.flush()?;
        }
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

pub(crate) fn io_context(path: &Path, e: io::Error) -> crate::error::CliError {
    crate::error::CliError::Input(format!("{}: {e}", path.display()))
}

/// `{:.16e}`-style text for CSV cells; empty for missing values.
pub fn csv_float(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        let text = String::from_utf8(to_json_bytes(&[0.1, 1.0, -2.5e-300]).unwrap()).unwrap();
        assert!(text.contains("1.0000000000000001e-1"));
        assert!(text.contains("1.0000000000000000e0"));
        assert!(text.contains("-2.5000000000000000e-300"));
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![0.1, 1.0, -2.5e-300]);
    }

    #[test]
    fn hash_ignores_timestamp() {
        let a = render_document("x", &1u32, &[0.5]).unwrap();
        let b = render_document("x", &1u32, &[0.5]).unwrap();
        let hash = |d: &[u8]| serde_json::from_slice::<serde_json::Value>(d).unwrap()["canonical_sha256"].clone();
        assert_eq!(hash(&a), hash(&b));
        let c = render_document("x", &1u32, &[0.25]).unwrap();
        assert_ne!(hash(&a), hash(&c));
    }
}
