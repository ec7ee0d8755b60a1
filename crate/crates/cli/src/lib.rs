//! The `hlc` command line. [`run`] does everything `main` does, writing to
//! the given streams and returning the exit code.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use hlc_core::analysis::{locality_audit, min_distance_oracle, support_accumulation_audit, ENUMERATION_CAP};
use hlc_core::coset_tree::HierarchyProfile;
use hlc_core::lrc::{constructive_generator, encode_monomial, indicator_audit};
use hlc_core::pyramid::PyramidSpec;
use hlc_core::repair::{encode_generic, repair_all, RepairError};
use hlc_core::ErasureCode;
use serde_json::{json, Value};
use thiserror::Error;

pub mod args;
pub mod message;
pub mod profile;
pub mod shards;

use args::{Cli, Command, ConstructionArg, DesignArgs, EncodeArgs, RepairArgs, VerifyArgs};
use profile::{Built, ProfileFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_UNRECOVERABLE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unrecoverable erasures at {0:?}")]
    Unrecoverable(Vec<usize>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Verification(_) => EXIT_VERIFY,
            CliError::Unrecoverable(_) => EXIT_UNRECOVERABLE,
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn Write, value: &Value) {
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json"));
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Design(a) => design(&a, out),
        Command::Encode(a) => encode(&a, out),
        Command::Repair(a) => repair(&a, out),
        Command::Verify(a) => verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            if let CliError::Unrecoverable(stuck) = &e {
                emit(out, &json!({ "error": "unrecoverable", "stuck": stuck }));
            }
            let _ = writeln!(err, "hlc: {e}");
            e.exit_code()
        }
    }
}

fn design(a: &DesignArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let config = profile::field_config()?;
    let (file, _) = match a.construction {
        ConstructionArg::AllSymbol => {
            if a.d.is_some() || a.delta1.is_some() {
                return Err(CliError::Usage("--d and --delta1 apply to pyramid codes only".into()));
            }
            let n = a.n.ok_or_else(|| CliError::Usage("all_symbol needs --n".into()))?;
            let levels = profile::parse_all_symbol_levels(&a.levels)?;
            let p = HierarchyProfile::new(n, a.k, levels).map_err(|e| CliError::Usage(e.to_string()))?;
            profile::design_all_symbol(&p, &config)?
        }
        ConstructionArg::Pyramid => {
            let d = a.d.ok_or_else(|| CliError::Usage("pyramid needs --d".into()))?;
            let delta1 = a.delta1.ok_or_else(|| CliError::Usage("pyramid needs --delta1".into()))?;
            let (r1, r2) = profile::parse_pyramid_levels(&a.levels)?;
            let spec = PyramidSpec::new(a.k, d, r1, r2, delta1).map_err(|e| CliError::Usage(e.to_string()))?;
            let built = profile::design_pyramid(&spec, &config)?;
            if let Some(n) = a.n {
                if n != built.0.n {
                    return Err(CliError::Usage(format!("--n {n} does not match the pyramid length {}", built.0.n)));
                }
            }
            built
        }
    };
    if let Some(path) = &a.out {
        write_file(path, &file.to_json())?;
    }
    let f = &file.field;
    emit(
        out,
        &json!({
            "construction": file.construction,
            "field": format!("GF({}^{})", f.p, f.m),
            "n": file.n,
            "k": file.k,
            "bound_d": file.bound_d,
            "designed_d": file.designed_d,
            "optimal": !file.optimal_by.is_empty(),
            "optimal_by": file.optimal_by,
            "profile_hash": file.hash(),
        }),
    );
    Ok(EXIT_OK)
}

fn load_profile(path: &Path) -> Result<(ProfileFile, Built), CliError> {
    let bytes = read_file(path)?;
    let file: ProfileFile =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let built = file.rebuild(&profile::field_config()?)?;
    Ok((file, built))
}

fn encode(a: &EncodeArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (file, built) = load_profile(&a.profile)?;
    let code = built.code();
    let content = read_file(&a.input)?;
    let message = message::read_message(code.field(), code.dim(), &content)?;
    let shard_set = match &built {
        Built::AllSymbol(c) => encode_monomial(c, &message).map_err(|e| CliError::Usage(e.to_string()))?,
        Built::Pyramid(c) => encode_generic(c, &message),
    };
    let header = shards::Header {
        profile_hash: file.hash(),
        n: file.n,
        k: file.k,
    };
    let text = shards::write(&header, &shard_set);
    match &a.out {
        Some(path) => {
            write_file(path, &text)?;
            emit(out, &json!({ "shards": path, "n": file.n }));
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_OK)
}

fn repair(a: &RepairArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (file, built) = load_profile(&a.profile)?;
    let code = built.code();
    let text = String::from_utf8(read_file(&a.shards)?).map_err(|_| CliError::Usage("shard file is not UTF-8".into()))?;
    let (header, set) = shards::read(&text, code, &file.hash())?;
    let (restored, reports) = match repair_all(code, &set) {
        Ok(r) => r,
        Err(RepairError::Stuck { stuck }) => return Err(CliError::Unrecoverable(stuck)),
        Err(e) => return Err(CliError::Verification(e.to_string())),
    };
    let target = a.out.clone().unwrap_or_else(|| {
        let mut name = a.shards.clone().into_os_string();
        name.push(".restored.jsonl");
        PathBuf::from(name)
    });
    write_file(&target, &shards::write(&header, &restored))?;
    let repairs: Vec<Value> = reports
        .iter()
        .map(|r| json!({ "index": r.index, "level": r.level, "reads": r.reads(), "readers": r.readers }))
        .collect();
    let mut levels: Vec<usize> = reports.iter().map(|r| r.level).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    emit(
        out,
        &json!({
            "repairs": repairs,
            "levels_used": levels,
            "total_reads": reports.iter().map(|r| r.reads()).sum::<usize>(),
            "restored": target,
        }),
    );
    Ok(EXIT_OK)
}

struct Checks {
    list: Vec<Value>,
    violations: Vec<String>,
}

impl Checks {
    fn add(&mut self, name: &str, pass: bool, detail: Value) {
        if !pass {
            self.violations.push(format!("{name}: {detail}"));
        }
        self.list.push(json!({ "name": name, "pass": pass, "detail": detail }));
    }
}

fn verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let bytes = read_file(&a.profile)?;
    let file: ProfileFile =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Usage(format!("{}: {e}", a.profile.display())))?;
    let mut checks = Checks {
        list: Vec::new(),
        violations: Vec::new(),
    };
    let built = match file.rebuild(&profile::field_config()?) {
        Ok(b) => {
            checks.add("profile_rebuild", true, Value::Null);
            b
        }
        Err(CliError::Verification(msg)) => {
            checks.add("profile_rebuild", false, json!(msg));
            emit(out, &report(&file, None, &checks));
            return Ok(EXIT_VERIFY);
        }
        Err(e) => return Err(e),
    };
    let code = built.code();
    let f = code.field();
    let bound = file.bound_d;

    if let Built::AllSymbol(c) = &built {
        let ind = indicator_audit(c.tree());
        checks.add(
            "indicator_polynomials",
            ind.passed(),
            json!({ "nodes": ind.nodes_checked, "points": ind.points_checked, "violations": ind.violations }),
        );
        let same = constructive_generator(c)
            .map(|g| g.row_space_basis(f) == c.generator().row_space_basis(f))
            .unwrap_or(false);
        checks.add("constructive_row_space", same, Value::Null);
    }

    let loc = locality_audit(code, ENUMERATION_CAP).map_err(|e| CliError::Verification(e.to_string()))?;
    checks.add(
        "locality",
        loc.passed(),
        json!({ "groups": loc.groups.len(), "violations": loc.violations, "warnings": loc.warnings }),
    );
    checks.add(
        "designed_within_bound",
        file.designed_d as i64 <= bound,
        json!({ "designed_d": file.designed_d, "bound": bound }),
    );

    let mut oracle_d = None;
    if a.oracle {
        let o = min_distance_oracle(f, code.generator(), ENUMERATION_CAP).map_err(|e| CliError::Usage(e.to_string()))?;
        let ok = file.designed_d <= o.d
            && o.d as i64 <= bound
            && (file.optimal_by.is_empty() || o.d as i64 == bound);
        checks.add(
            "oracle_sandwich",
            ok,
            json!({ "designed_d": file.designed_d, "oracle_d": o.d, "bound": bound }),
        );
        oracle_d = Some(o.d);
    }
    if a.audit {
        let s = support_accumulation_audit(code).map_err(|e| CliError::Verification(e.to_string()))?;
        let floor = oracle_d.unwrap_or(file.designed_d);
        let ok = s.passed() && floor <= s.upper_bound && s.upper_bound as i64 <= bound;
        checks.add(
            "support_accumulation",
            ok,
            json!({
                "support": s.support,
                "closed_support": s.closed_support,
                "lower_bound": s.lower_bound,
                "upper_bound": s.upper_bound,
                "visits": s.visits,
                "violations": s.violations,
            }),
        );
    }

    let code = if checks.violations.is_empty() { EXIT_OK } else { EXIT_VERIFY };
    emit(out, &report(&file, oracle_d, &checks));
    Ok(code)
}

fn report(file: &ProfileFile, oracle_d: Option<usize>, checks: &Checks) -> Value {
    json!({
        "construction": file.construction,
        "n": file.n,
        "k": file.k,
        "bound": file.bound_d,
        "designed_d": file.designed_d,
        "oracle_d": oracle_d,
        "optimal_by": file.optimal_by,
        "checks": checks.list,
        "violations": checks.violations,
        "pass": checks.violations.is_empty(),
    })
}
