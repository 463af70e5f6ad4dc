//! Line-delimited JSON report records.
//!
//! One record per logical result:
//!
//! ```text
//! {"command":..,"args":{..},"input":..|null,"input_digest":..,"outcome":..,"payload":{..}}
//! ```
//!
//! `input` carries the input file verbatim so a record can be re-run on its
//! own; `input_digest` is the SHA-256 of `input`, or of the serialized `args`
//! when there is no input file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub command: String,
    pub args: BTreeMap<String, Value>,
    pub input: Option<String>,
    pub input_digest: String,
    pub outcome: String,
    pub payload: Value,
}

pub fn sha256_hex(data: &[u8]) -> String {
    format!("{:x}", Sha256::digest(data))
}

impl Record {
    pub fn new(command: &str, args: &BTreeMap<String, Value>, input: Option<&str>, outcome: &str, payload: Value) -> Self {
        let input_digest = match input {
            Some(text) => sha256_hex(text.as_bytes()),
            None => sha256_hex(serde_json::to_string(args).expect("args serialize").as_bytes()),
        };
        Record {
            command: command.to_string(),
            args: args.clone(),
            input: input.map(str::to_string),
            input_digest,
            outcome: outcome.to_string(),
            payload,
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("records serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn line_round_trip() {
        let mut args = BTreeMap::new();
        args.insert("arity".to_string(), Value::from(3));
        let r = Record::new("enum", &args, None, "count", serde_json::json!({"count": 306}));
        let line = r.to_line();
        assert!(line.ends_with('\n') && !line[..line.len() - 1].contains('\n'));
        let back: Record = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
    }
}
