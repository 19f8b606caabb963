use std::collections::BTreeMap;
use std::path::Path;

use acadperf_core::credit::{Convention, ConventionMap};
use serde::Deserialize;

use super::read_records;
use crate::error::Result;

#[derive(Debug, Deserialize)]
struct SdsRow {
    sds: String,
    uda: String,
}

/// SDS to UDA lookup; an SDS listed twice must name the same UDA.
pub fn read_sds_map(path: &Path) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    read_records(path, |row: SdsRow| {
        match map.get(&row.sds) {
            Some(uda) if *uda != row.uda => {
                return Err(format!(
                    "SDS {} listed under {} and {}",
                    row.sds, uda, row.uda
                ))
            }
            _ => {}
        }
        map.insert(row.sds, row.uda);
        Ok(())
    })?;
    Ok(map)
}

#[derive(Debug, Deserialize)]
struct ConventionRow {
    sds: String,
    convention: String,
}

/// Explicit per-SDS conventions. With `uda_defaults`, unlisted SDSs fall
/// back to their UDA's customary convention.
pub fn read_conventions(path: &Path, uda_defaults: bool) -> Result<ConventionMap> {
    let mut map = if uda_defaults {
        ConventionMap::default()
    } else {
        ConventionMap::explicit()
    };
    read_records(path, |row: ConventionRow| {
        let c: Convention = row.convention.parse().map_err(|e| format!("{e}"))?;
        map.insert(row.sds, c);
        Ok(())
    })?;
    Ok(map)
}
