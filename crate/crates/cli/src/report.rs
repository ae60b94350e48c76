//! Plain-text reports: a fixed header, then `key: value` fields in a stable
//! order. Document-producing commands emit the document with the header as
//! comments so the output parses as a site.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

pub const REPORT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    /// A conclusive negative answer; witnesses are in the fields.
    Fail,
    /// A search stopped at a cap before deciding.
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Exit status for unreadable or invalid input.
pub const INPUT_ERROR: u8 = 3;

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub verdict: Verdict,
    pub fields: Vec<(String, String)>,
    /// A document printed after the header instead of the fields.
    pub document: Option<String>,
}

impl Report {
    pub fn new(command: impl Into<String>, inputs: &[&[u8]]) -> Self {
        Report { command: command.into(), digest: digest(inputs), verdict: Verdict::Pass, fields: Vec::new(), document: None }
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let prefix = if self.document.is_some() { "# " } else { "" };
        let _ = writeln!(s, "{prefix}cdsite-report {REPORT_VERSION}");
        let _ = writeln!(s, "{prefix}tool: cdsite {}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "{prefix}command: {}", self.command);
        let _ = writeln!(s, "{prefix}input: sha256:{}", self.digest);
        let _ = writeln!(s, "{prefix}verdict: {}", self.verdict.as_str());
        for (k, v) in &self.fields {
            let _ = writeln!(s, "{prefix}{k}: {v}");
        }
        if let Some(doc) = &self.document {
            s.push_str(doc);
        }
        s
    }
}

/// One digest over all inputs, each length-prefixed so that boundaries count.
pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update((i.len() as u64).to_le_bytes());
        h.update(i);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
