//! Canonical JSON serialization: keys sorted, 2-space indent, trailing
//! newline. Writing any value twice yields identical bytes, which keeps
//! scenario files, model files, and manifests byte-stable across reruns.

use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;

/// Serialize to canonical JSON text.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    // Round-tripping through Value sorts object keys (serde_json's map is
    // a BTreeMap by default).
    let v = serde_json::to_value(value).expect("serializable value");
    let mut s = serde_json::to_string_pretty(&v).expect("canonical json");
    s.push('\n');
    s
}

/// Write canonical JSON to a file.
pub fn write_canonical_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    fs::write(path, to_canonical_json(value))
}
