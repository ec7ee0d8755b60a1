//! The profile file: everything needed to rebuild a code, plus derived
//! values that the rebuild must reproduce exactly.

use std::sync::Arc;

use hlc_core::analysis::{optimality_check, Condition, Construction};
use hlc_core::coset_tree::{HierarchyProfile, LevelSpec};
use hlc_core::gf::{find_field, make_field, prime_power, FieldDescriptor};
use hlc_core::lrc::{build_code, HierarchicalCode};
use hlc_core::pyramid::{build_pyramid, PyramidCode, PyramidSpec};
use hlc_core::{ErasureCode, Field, FieldConfig, FieldElement};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    AllSymbol,
    Pyramid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileFile {
    pub construction: ConstructionKind,
    pub n: usize,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<LevelSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r2: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta1: Option<usize>,
    pub field: FieldDescriptor,
    /// Exp(c), descending.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<Vec<usize>>,
    /// Column order of the code; null for pyramid codes.
    pub eval_points: Option<Vec<FieldElement>>,
    /// (r_i, δ_i), outermost first.
    pub locality: Vec<(usize, usize)>,
    pub designed_d: usize,
    pub bound_d: i64,
    pub optimal_by: Vec<Condition>,
}

/// A rebuilt code of either family.
pub enum Built {
    AllSymbol(HierarchicalCode),
    Pyramid(PyramidCode),
}

impl Built {
    pub fn code(&self) -> &(dyn ErasureCode + Sync) {
        match self {
            Built::AllSymbol(c) => c,
            Built::Pyramid(c) => c,
        }
    }
}

pub fn field_config() -> Result<FieldConfig, CliError> {
    match std::env::var("HLC_MAX_FIELD") {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(|max_order| FieldConfig { max_order })
            .map_err(|_| CliError::Usage(format!("HLC_MAX_FIELD must be an integer, got {v:?}"))),
        Err(_) => Ok(FieldConfig::default()),
    }
}

/// Smallest field with at least `len` elements.
pub fn pyramid_field(len: usize, config: &FieldConfig) -> Result<Field, CliError> {
    let mut q = len.max(2) as u64;
    while q <= config.max_order {
        if let Some((p, m)) = prime_power(q) {
            return make_field(p, m, config).map_err(|e| CliError::Usage(e.to_string()));
        }
        q += 1;
    }
    Err(CliError::Usage(format!(
        "no field with at least {len} elements within the cap {}",
        config.max_order
    )))
}

pub fn design_all_symbol(profile: &HierarchyProfile, config: &FieldConfig) -> Result<(ProfileFile, Built), CliError> {
    let lengths: Vec<u64> = profile.lengths().iter().map(|&l| l as u64).collect();
    let (p, m) = find_field(&lengths, profile.n() as u64, config).map_err(|e| CliError::Usage(e.to_string()))?;
    let field = make_field(p, m, config).map_err(|e| CliError::Usage(e.to_string()))?;
    all_symbol_from(field, profile)
}

fn all_symbol_from(field: Field, profile: &HierarchyProfile) -> Result<(ProfileFile, Built), CliError> {
    let code = build_code(Arc::new(field), profile).map_err(|e| CliError::Usage(e.to_string()))?;
    let lengths: Vec<usize> = profile.levels().iter().map(|l| l.n_i).collect();
    let report = optimality_check(
        code.len(),
        code.dim(),
        code.locality(),
        code.designed_distance(),
        Construction::AllSymbol { lengths: &lengths },
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let file = ProfileFile {
        construction: ConstructionKind::AllSymbol,
        n: code.len(),
        k: code.dim(),
        levels: Some(profile.levels().to_vec()),
        d: None,
        r1: None,
        r2: None,
        delta1: None,
        field: code.field().descriptor(),
        exp: Some(code.exp().code().to_vec()),
        eval_points: Some(code.eval_points().to_vec()),
        locality: code.locality().levels().to_vec(),
        designed_d: code.designed_distance(),
        bound_d: report.bound,
        optimal_by: report.optimal_by,
    };
    Ok((file, Built::AllSymbol(code)))
}

pub fn design_pyramid(spec: &PyramidSpec, config: &FieldConfig) -> Result<(ProfileFile, Built), CliError> {
    let field = pyramid_field(spec.k() + spec.d() - 1, config)?;
    pyramid_from(field, spec)
}

fn pyramid_from(field: Field, spec: &PyramidSpec) -> Result<(ProfileFile, Built), CliError> {
    let code = build_pyramid(&field, spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = optimality_check(
        code.len(),
        code.dim(),
        code.locality(),
        code.designed_distance(),
        Construction::Pyramid,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let file = ProfileFile {
        construction: ConstructionKind::Pyramid,
        n: code.len(),
        k: code.dim(),
        levels: None,
        d: Some(spec.d()),
        r1: Some(spec.r1()),
        r2: Some(spec.r2()),
        delta1: Some(spec.delta1()),
        field: field.descriptor(),
        exp: None,
        eval_points: None,
        locality: code.locality().levels().to_vec(),
        designed_d: code.designed_distance(),
        bound_d: report.bound,
        optimal_by: report.optimal_by,
    };
    Ok((file, Built::Pyramid(code)))
}

impl ProfileFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("profile serializes");
        s.push('\n');
        s
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("profile serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// Rebuilds the code from the construction inputs and checks that every
    /// recorded derived value comes out the same.
    pub fn rebuild(&self, config: &FieldConfig) -> Result<Built, CliError> {
        let field = Field::from_descriptor(&self.field, config).map_err(|e| CliError::Verification(format!("field: {e}")))?;
        let (again, built) = match self.construction {
            ConstructionKind::AllSymbol => {
                let levels = self
                    .levels
                    .clone()
                    .ok_or_else(|| CliError::Verification("all_symbol profile without levels".into()))?;
                let profile = HierarchyProfile::new(self.n, self.k, levels).map_err(|e| CliError::Verification(e.to_string()))?;
                all_symbol_from(field, &profile).map_err(|e| CliError::Verification(e.to_string()))?
            }
            ConstructionKind::Pyramid => {
                let get = |v: Option<usize>, name: &str| {
                    v.ok_or_else(|| CliError::Verification(format!("pyramid profile without {name}")))
                };
                let spec = PyramidSpec::new(
                    self.k,
                    get(self.d, "d")?,
                    get(self.r1, "r1")?,
                    get(self.r2, "r2")?,
                    get(self.delta1, "delta1")?,
                )
                .map_err(|e| CliError::Verification(e.to_string()))?;
                pyramid_from(field, &spec).map_err(|e| CliError::Verification(e.to_string()))?
            }
        };
        if again != *self {
            return Err(CliError::Verification(format!(
                "profile does not match its rebuild: {}",
                mismatched_fields(self, &again).join(", ")
            )));
        }
        Ok(built)
    }
}

fn mismatched_fields(a: &ProfileFile, b: &ProfileFile) -> Vec<String> {
    let (Ok(serde_json::Value::Object(x)), Ok(serde_json::Value::Object(y))) =
        (serde_json::to_value(a), serde_json::to_value(b))
    else {
        return vec!["<unknown>".into()];
    };
    x.keys()
        .chain(y.keys())
        .filter(|key| x.get(*key) != y.get(*key))
        .map(|key| key.to_string())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// "12:8,4:3"
pub fn parse_all_symbol_levels(s: &str) -> Result<Vec<LevelSpec>, CliError> {
    s.split(',')
        .map(|part| {
            let (n, r) = part
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("level {part:?} is not n_i:r_i")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Usage(format!("{x:?} is not a number")))
            };
            Ok(LevelSpec { n_i: num(n)?, r_i: num(r)? })
        })
        .collect()
}

/// "r1=2,r2=1"
pub fn parse_pyramid_levels(s: &str) -> Result<(usize, usize), CliError> {
    let mut r1 = None;
    let mut r2 = None;
    for part in s.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("{part:?} is not key=value")))?;
        let value = value
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Usage(format!("{value:?} is not a number")))?;
        match key.trim() {
            "r1" => r1 = Some(value),
            "r2" => r2 = Some(value),
            other => return Err(CliError::Usage(format!("unknown pyramid level key {other:?}"))),
        }
    }
    match (r1, r2) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(CliError::Usage("pyramid levels need r1=… and r2=…".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_parsing() {
        assert_eq!(
            parse_all_symbol_levels("12:8,4:3").unwrap(),
            vec![LevelSpec { n_i: 12, r_i: 8 }, LevelSpec { n_i: 4, r_i: 3 }]
        );
        assert!(parse_all_symbol_levels("12-8").is_err());
        assert!(parse_all_symbol_levels("12:x").is_err());
        assert_eq!(parse_pyramid_levels("r1=2,r2=1").unwrap(), (2, 1));
        assert_eq!(parse_pyramid_levels("r2=1, r1=2").unwrap(), (2, 1));
        assert!(parse_pyramid_levels("r1=2").is_err());
        assert!(parse_pyramid_levels("r3=2,r1=1,r2=1").is_err());
    }

    #[test]
    fn pyramid_field_is_smallest_prime_power() {
        let c = FieldConfig::default();
        assert_eq!(pyramid_field(6, &c).unwrap().order(), 7);
        assert_eq!(pyramid_field(8, &c).unwrap().order(), 8);
        assert_eq!(pyramid_field(10, &c).unwrap().order(), 11);
        assert!(pyramid_field(100, &FieldConfig { max_order: 50 }).is_err());
    }

    #[test]
    fn rebuild_detects_tampering() {
        let c = FieldConfig::default();
        let p = HierarchyProfile::new(12, 5, parse_all_symbol_levels("6:4,3:2").unwrap()).unwrap();
        let (file, _) = design_all_symbol(&p, &c).unwrap();
        assert!(file.rebuild(&c).is_ok());
        let mut bad = file.clone();
        bad.exp.as_mut().unwrap()[0] = 7;
        match bad.rebuild(&c) {
            Err(CliError::Verification(msg)) => assert!(msg.contains("exp")),
            _ => panic!("tampered exp accepted"),
        }
        let mut bad = file.clone();
        bad.field.alpha = 6;
        assert!(matches!(bad.rebuild(&c), Err(CliError::Verification(_))));
        let mut bad = file;
        bad.bound_d = 7;
        assert!(matches!(bad.rebuild(&c), Err(CliError::Verification(_))));
    }
}
