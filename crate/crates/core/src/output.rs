//! Run metadata and plain-text output helpers.

use std::fmt::Write as _;

/// Identity stamped on every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunMeta {
    pub run_id: String,
    pub seed: u64,
    pub config_hash: String,
    pub version: String,
}

impl RunMeta {
    pub fn new(run_id: impl Into<String>, seed: u64, config_hash: impl Into<String>) -> Self {
        Self { run_id: run_id.into(), seed, config_hash: config_hash.into(), version: crate::VERSION.to_string() }
    }

    /// Metadata for ad-hoc output that did not come from a config file.
    pub fn ad_hoc(run_id: impl Into<String>) -> Self {
        Self::new(run_id, 0, "none")
    }

    /// `# run_id=…,seed=…,config_hash=…,version=…`
    pub fn header_line(&self) -> String {
        format!("# {}", self.key_values())
    }

    /// Comma-separated `key=value` pairs, also used as container metadata.
    pub fn key_values(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "run_id={},seed={},config_hash={},version={}", self.run_id, self.seed, self.config_hash, self.version);
        s
    }
}

/// Parses a header line written by [`RunMeta::header_line`].
pub fn parse_header_line(line: &str) -> Option<RunMeta> {
    let body = line.strip_prefix("# ")?;
    let mut run_id = None;
    let mut seed = None;
    let mut hash = None;
    let mut version = None;
    for kv in body.split(',') {
        let (k, v) = kv.split_once('=')?;
        match k {
            "run_id" => run_id = Some(v.to_string()),
            "seed" => seed = v.parse().ok(),
            "config_hash" => hash = Some(v.to_string()),
            "version" => version = Some(v.to_string()),
            _ => {}
        }
    }
    Some(RunMeta { run_id: run_id?, seed: seed?, config_hash: hash?, version: version? })
}
