//! Provenance header embedded in every output. It carries no wall time, so equal manifests
//! go with byte-identical outputs.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

pub const TOOL: &str = concat!("lchpm ", env!("CARGO_PKG_VERSION"));

pub fn digest(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunManifest {
    pub command: String,
    /// `(label, sha256)`
    pub inputs: Vec<(String, String)>,
    pub parameters: Vec<(String, String)>,
    pub tool: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            inputs: Vec::new(),
            parameters: Vec::new(),
            tool: TOOL.to_string(),
        }
    }

    pub fn input(mut self, label: impl Into<String>, bytes: &[u8]) -> Self {
        self.inputs.push((label.into(), digest(bytes)));
        self
    }

    pub fn param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.parameters.push((key.into(), value.to_string()));
        self
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![format!("tool {}", self.tool), format!("command {}", self.command)];
        for (label, d) in &self.inputs {
            out.push(format!("input {label} sha256:{d}"));
        }
        for (k, v) in &self.parameters {
            out.push(format!("param {k}={v}"));
        }
        out
    }

    /// `# `-prefixed lines for text outputs.
    pub fn comment_block(&self) -> String {
        self.lines().iter().map(|l| format!("# {l}\n")).collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("tool".to_string(), self.tool.clone());
        m.insert("command".to_string(), self.command.clone());
        for (label, d) in &self.inputs {
            m.insert(format!("input {label}"), format!("sha256:{d}"));
        }
        for (k, v) in &self.parameters {
            m.insert(format!("param {k}"), v.clone());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_stable() {
        let m = RunManifest::new("barcode").input("two_fiber", b"x").param("rmax", "21");
        assert_eq!(m.comment_block(), m.clone().comment_block());
        assert!(m.comment_block().contains("# param rmax=21\n"));
        assert!(m.lines()[2].starts_with("input two_fiber sha256:2d711642"));
    }
}
