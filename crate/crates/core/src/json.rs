//! Strict decoding and canonical encoding shared by every JSON document type.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub(crate) fn decode<T: DeserializeOwned>(bytes: &[u8]) -> Result<T> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Syntax(format!("document is not UTF-8: {e}")))?;
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

/// Two-space indentation, LF line endings, trailing newline.
pub(crate) fn canonical<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("document types serialize infallibly");
    out.push('\n');
    out
}
