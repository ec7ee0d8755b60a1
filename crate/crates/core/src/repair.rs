//! Erasure repair with escalation from the most local group outwards, and
//! global message decoding.

use rayon::prelude::*;
use thiserror::Error;

use crate::code::ErasureCode;
use crate::gf::FieldElement;
use crate::matrix::Echelon;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepairError {
    #[error("shard set has {got} entries, code length is {expected}")]
    Length { got: usize, expected: usize },
    #[error("shard {index} is malformed: {reason}")]
    Shard { index: usize, reason: String },
    #[error("shard {0} is not erased")]
    NotErased(usize),
    #[error("symbol {0} cannot be recovered from the surviving shards")]
    Unrecoverable(usize),
    #[error("erasures {stuck:?} cannot be repaired")]
    Stuck { stuck: Vec<usize> },
    #[error("surviving shards have rank {rank}, need {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("surviving shards are not consistent with any codeword")]
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shard {
    pub index: usize,
    /// Evaluation point; `None` for codes that are not evaluation codes.
    pub point: Option<FieldElement>,
    /// `None` marks an erasure.
    pub value: Option<FieldElement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShardSet {
    entries: Vec<Shard>,
}

impl ShardSet {
    pub fn from_codeword(points: Option<&[FieldElement]>, values: Vec<FieldElement>) -> Self {
        ShardSet {
            entries: values
                .into_iter()
                .enumerate()
                .map(|(index, v)| Shard {
                    index,
                    point: points.map(|p| p[index]),
                    value: Some(v),
                })
                .collect(),
        }
    }

    /// Entries in any order; they are sorted by index and checked against `code`.
    pub fn from_entries<C: ErasureCode + ?Sized>(code: &C, mut entries: Vec<Shard>) -> Result<Self, RepairError> {
        entries.sort_by_key(|s| s.index);
        if entries.len() != code.len() {
            return Err(RepairError::Length {
                got: entries.len(),
                expected: code.len(),
            });
        }
        let points = code.points();
        for (i, s) in entries.iter().enumerate() {
            if s.index != i {
                return Err(RepairError::Shard {
                    index: s.index,
                    reason: "indices must be unique and cover 0..n".into(),
                });
            }
            let expected = points.map(|p| p[i]);
            if s.point != expected {
                return Err(RepairError::Shard {
                    index: i,
                    reason: format!("point {:?} does not match {:?}", s.point, expected),
                });
            }
            if let Some(v) = s.value {
                if !code.field().contains(v) {
                    return Err(RepairError::Shard {
                        index: i,
                        reason: format!("value {v} is not a field element"),
                    });
                }
            }
        }
        Ok(ShardSet { entries })
    }

    pub fn entries(&self) -> &[Shard] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<Option<FieldElement>> {
        self.entries.iter().map(|s| s.value).collect()
    }

    pub fn value(&self, i: usize) -> Option<FieldElement> {
        self.entries[i].value
    }

    pub fn erase(&mut self, i: usize) {
        self.entries[i].value = None;
    }

    pub fn set(&mut self, i: usize, v: FieldElement) {
        self.entries[i].value = Some(v);
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.entries[i].value.is_none()
    }

    pub fn erased(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|s| s.value.is_none())
            .map(|s| s.index)
            .collect()
    }

    /// All values, if nothing is erased.
    pub fn codeword(&self) -> Option<Vec<FieldElement>> {
        self.entries.iter().map(|s| s.value).collect()
    }
}

/// One recovered symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairReport {
    pub index: usize,
    /// h is the most local level, 0 means the whole code.
    pub level: usize,
    pub readers: Vec<usize>,
    pub value: FieldElement,
}

impl RepairReport {
    pub fn reads(&self) -> usize {
        self.readers.len()
    }
}

/// Greedy lowest-index readers: scan `candidates` in ascending order, keep
/// each column that raises the rank, stop as soon as `target` is spanned.
/// Returns the readers and the combination coefficients.
fn span_readers<C: ErasureCode + ?Sized>(
    code: &C,
    candidates: &[usize],
    target: usize,
) -> Option<(Vec<usize>, Vec<FieldElement>)> {
    let f = code.field();
    let g = code.generator();
    let want = g.column(target);
    let mut span = Echelon::new(f);
    if want.iter().all(|x| x.is_zero()) {
        return Some((Vec::new(), Vec::new()));
    }
    let mut readers = Vec::new();
    for &c in candidates {
        if !span.insert(g.column(c)) {
            continue;
        }
        readers.push(c);
        if span.contains(&want) {
            let coeffs = g
                .select_columns(&readers)
                .solve_columns(f, &want)
                .expect("target is in the span of the readers");
            return Some((readers, coeffs));
        }
    }
    None
}

/// Candidate readers at `level` (0 = all columns) for `index`, or `None`
/// when the column belongs to no group at that level.
fn candidates<C: ErasureCode + ?Sized>(code: &C, shards: &ShardSet, level: usize, index: usize) -> Option<Vec<usize>> {
    let pool: Vec<usize> = if level == 0 {
        (0..code.len()).collect()
    } else {
        code.grouping().group_of(level, index)?.to_vec()
    };
    Some(pool.into_iter().filter(|&c| c != index && !shards.is_erased(c)).collect())
}

fn repair_at<C: ErasureCode + ?Sized>(code: &C, shards: &ShardSet, level: usize, index: usize) -> Option<RepairReport> {
    let pool = candidates(code, shards, level, index)?;
    let (readers, coeffs) = span_readers(code, &pool, index)?;
    let f = code.field();
    let value = readers.iter().zip(&coeffs).fold(FieldElement::ZERO, |acc, (&r, &c)| {
        f.add(acc, f.mul(c, shards.value(r).expect("reader survives")))
    });
    Some(RepairReport {
        index,
        level,
        readers,
        value,
    })
}

/// Recovers one erased symbol from the smallest enclosing group that can.
pub fn repair_symbol<C: ErasureCode + ?Sized>(
    code: &C,
    shards: &ShardSet,
    index: usize,
) -> Result<(FieldElement, RepairReport), RepairError> {
    if shards.len() != code.len() {
        return Err(RepairError::Length {
            got: shards.len(),
            expected: code.len(),
        });
    }
    if !shards.is_erased(index) {
        return Err(RepairError::NotErased(index));
    }
    let h = code.grouping().depth();
    (0..=h)
        .rev()
        .find_map(|level| repair_at(code, shards, level, index))
        .map(|r| (r.value, r))
        .ok_or(RepairError::Unrecoverable(index))
}

/// Repairs everything it can, most local level first. Each round tries all
/// erasures at one level against a fixed snapshot, commits what succeeded,
/// and starts again from the most local level.
pub fn repair_all<C: ErasureCode + Sync + ?Sized>(
    code: &C,
    shards: &ShardSet,
) -> Result<(ShardSet, Vec<RepairReport>), RepairError> {
    if shards.len() != code.len() {
        return Err(RepairError::Length {
            got: shards.len(),
            expected: code.len(),
        });
    }
    let h = code.grouping().depth();
    let mut current = shards.clone();
    let mut reports = Vec::new();
    'rounds: loop {
        let erased = current.erased();
        if erased.is_empty() {
            return Ok((current, reports));
        }
        for level in (0..=h).rev() {
            let snapshot = &current;
            let done: Vec<RepairReport> = erased
                .par_iter()
                .filter_map(|&i| repair_at(code, snapshot, level, i))
                .collect();
            if !done.is_empty() {
                for r in &done {
                    current.set(r.index, r.value);
                }
                reports.extend(done);
                continue 'rounds;
            }
        }
        return Err(RepairError::Stuck { stuck: erased });
    }
}

/// Solves `m · G|_S = v|_S` over the surviving columns S.
pub fn decode_message<C: ErasureCode + ?Sized>(code: &C, shards: &ShardSet) -> Result<Vec<FieldElement>, RepairError> {
    if shards.len() != code.len() {
        return Err(RepairError::Length {
            got: shards.len(),
            expected: code.len(),
        });
    }
    let f = code.field();
    let alive: Vec<usize> = (0..code.len()).filter(|&i| !shards.is_erased(i)).collect();
    let sub = code.generator().select_columns(&alive);
    let rank = sub.rank(f);
    if rank < code.dim() {
        return Err(RepairError::RankDeficient { rank, k: code.dim() });
    }
    let v: Vec<FieldElement> = alive.iter().map(|&i| shards.value(i).expect("alive")).collect();
    sub.transpose().solve_columns(f, &v).ok_or(RepairError::Inconsistent)
}

/// Rank of the generator restricted to `columns`.
pub fn restricted_rank<C: ErasureCode + ?Sized>(code: &C, columns: &[usize]) -> usize {
    code.generator().select_columns(columns).rank(code.field())
}

/// The codeword for `message`, as a shard set.
pub fn encode_generic<C: ErasureCode + ?Sized>(code: &C, message: &[FieldElement]) -> ShardSet {
    ShardSet::from_codeword(code.points(), code.generator().left_mul(code.field(), message))
}
