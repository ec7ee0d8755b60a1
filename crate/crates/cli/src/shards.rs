//! Shard files: a header line with the profile hash, then one JSON object
//! per coordinate, `{"i":…, "point":…, "value":…}`, null marking an erasure.

use hlc_core::repair::{Shard, ShardSet};
use hlc_core::{ErasureCode, FieldElement};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub profile_hash: String,
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Line {
    i: usize,
    point: Option<FieldElement>,
    value: Option<FieldElement>,
}

pub fn write(header: &Header, shards: &ShardSet) -> String {
    let mut out = serde_json::to_string(header).expect("header serializes");
    out.push('\n');
    for s in shards.entries() {
        let line = Line {
            i: s.index,
            point: s.point,
            value: s.value,
        };
        out.push_str(&serde_json::to_string(&line).expect("line serializes"));
        out.push('\n');
    }
    out
}

/// Parses a shard file and checks it against the code and its hash.
pub fn read(text: &str, code: &dyn ErasureCode, expected_hash: &str) -> Result<(Header, ShardSet), CliError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Header = lines
        .next()
        .ok_or_else(|| CliError::Usage("shard file is empty".into()))
        .and_then(|l| serde_json::from_str(l).map_err(|e| CliError::Usage(format!("bad shard header: {e}"))))?;
    if header.profile_hash != expected_hash {
        return Err(CliError::Verification(format!(
            "shards were written for profile {}, not {expected_hash}",
            header.profile_hash
        )));
    }
    let entries = lines
        .enumerate()
        .map(|(no, l)| {
            let line: Line =
                serde_json::from_str(l).map_err(|e| CliError::Usage(format!("bad shard line {}: {e}", no + 2)))?;
            Ok(Shard {
                index: line.i,
                point: line.point,
                value: line.value,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let set = ShardSet::from_entries(code, entries).map_err(|e| CliError::Verification(e.to_string()))?;
    Ok((header, set))
}
