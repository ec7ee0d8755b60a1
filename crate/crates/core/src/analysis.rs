//! Distance bounds, optimality conditions, and checks run against concrete
//! generator matrices: exhaustive minimum distance, per-group locality, and
//! the greedy support accumulation that certifies a distance upper bound.
//!
//! The audits certify properties of one matrix. They do not check proofs.

use std::collections::BTreeSet;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{ErasureCode, LocalityParams};
use crate::gf::{Field, FieldElement};
use crate::matrix::{Echelon, Matrix};

/// Default limit on q^k for exhaustive enumeration.
pub const ENUMERATION_CAP: u64 = 1 << 24;

/// Limit on the number of column subsets the locality audit will rank-check
/// when a group is too large to enumerate.
pub const SUBSET_LIMIT: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("need n > k ≥ 1, got n = {n}, k = {k}")]
    Dimensions { n: usize, k: usize },
    #[error("{q}^{k} messages exceed the enumeration cap {cap}")]
    CapExceeded { q: u32, k: usize, cap: u64 },
    #[error("generator has rank {rank}, expected {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("grouping has {grouping} levels but locality has {locality}")]
    Depth { grouping: usize, locality: usize },
    #[error("accumulation stalled at rank {rank} < {k}: no level-1 group adds rank")]
    Stalled { rank: usize, k: usize },
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

/// `n − k + 1 − Σ_{ℓ<h} (⌈k/r_ℓ⌉ − 1)(δ_ℓ − δ_{ℓ+1}) − (⌈k/r_h⌉ − 1)(δ_h − 1)`
pub fn distance_bound(n: usize, k: usize, params: &LocalityParams) -> Result<i64, AnalysisError> {
    if k == 0 || n <= k {
        return Err(AnalysisError::Dimensions { n, k });
    }
    let lv = params.levels();
    let h = lv.len();
    let mut bound = (n - k + 1) as i64;
    for l in 0..h - 1 {
        bound -= ((ceil_div(k, lv[l].0) - 1) * (lv[l].1 - lv[l + 1].1)) as i64;
    }
    bound -= ((ceil_div(k, lv[h - 1].0) - 1) * (lv[h - 1].1 - 1)) as i64;
    Ok(bound)
}

/// Support size a (k−1)-dimensional subcode is guaranteed to reach:
/// `k − 1 + Σ_{ℓ<h} (⌈k/r_ℓ⌉ − 1)(δ_ℓ − δ_{ℓ+1}) + (⌈k/r_h⌉ − 1)(δ_h − 1)`.
pub fn support_lower_bound(k: usize, params: &LocalityParams) -> usize {
    let lv = params.levels();
    let h = lv.len();
    let mut s = k - 1;
    for l in 0..h - 1 {
        s += (ceil_div(k, lv[l].0) - 1) * (lv[l].1 - lv[l + 1].1);
    }
    s + (ceil_div(k, lv[h - 1].0) - 1) * (lv[h - 1].1 - 1)
}

/// Sufficient conditions for meeting the distance bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// r_h | … | r_1 | k
    #[serde(rename = "Thm2")]
    Divisibility,
    /// d = n_h + δ_h, n/n_i = ⌈k/r_i⌉ for i < h, n/n_h = ⌈k/r_h⌉ + 1
    #[serde(rename = "Thm3")]
    LengthMatching,
    /// h = 2: ⌈(k − (⌈k/r_1⌉ − 1) r_1)/r_2⌉ = ⌈k/r_2⌉ − (⌈k/r_1⌉ − 1)⌈r_1/r_2⌉
    #[serde(rename = "Thm4")]
    CeilingIdentity,
    /// h = 2 pyramid: ⌈k/r_1⌉⌈r_1/r_2⌉ = ⌈k/r_2⌉
    #[serde(rename = "Pyramid")]
    PyramidCeiling,
}

/// One condition with both sides evaluated. For [`Condition::Divisibility`]
/// each `lhs[i]` must divide `rhs[i]`; otherwise the sides must be equal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: Condition,
    pub holds: bool,
    pub lhs: Vec<i64>,
    pub rhs: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimalityReport {
    pub bound: i64,
    pub designed_d: usize,
    pub conditions: Vec<ConditionCheck>,
    /// Some condition holds and the designed distance meets the bound.
    pub optimal: bool,
    pub optimal_by: Vec<Condition>,
}

/// Which family the parameters describe.
#[derive(Debug, Clone, Copy)]
pub enum Construction<'a> {
    /// Coset lengths n_1, …, n_h.
    AllSymbol { lengths: &'a [usize] },
    Pyramid,
}

pub fn optimality_check(
    n: usize,
    k: usize,
    params: &LocalityParams,
    designed_d: usize,
    construction: Construction<'_>,
) -> Result<OptimalityReport, AnalysisError> {
    let bound = distance_bound(n, k, params)?;
    let h = params.h();
    let r: Vec<usize> = (1..=h).map(|l| params.r(l)).collect();
    let mut conditions = Vec::new();

    // r_h | r_{h−1}, …, r_1 | k
    let lhs: Vec<usize> = r.iter().rev().copied().collect();
    let rhs: Vec<usize> = r.iter().rev().skip(1).copied().chain(std::iter::once(k)).collect();
    conditions.push(ConditionCheck {
        condition: Condition::Divisibility,
        holds: lhs.iter().zip(&rhs).all(|(a, b)| b % a == 0),
        lhs: lhs.iter().map(|&x| x as i64).collect(),
        rhs: rhs.iter().map(|&x| x as i64).collect(),
    });

    match construction {
        Construction::AllSymbol { lengths } => {
            let nh = lengths[h - 1];
            let mut lhs = vec![designed_d as i64];
            let mut rhs = vec![(nh + params.delta(h)) as i64];
            let mut holds = designed_d == nh + params.delta(h);
            for (i, &ni) in lengths.iter().enumerate() {
                let want = ceil_div(k, r[i]) + usize::from(i == h - 1);
                holds &= n.is_multiple_of(ni) && n / ni == want;
                lhs.push((n / ni) as i64);
                rhs.push(want as i64);
            }
            conditions.push(ConditionCheck {
                condition: Condition::LengthMatching,
                holds,
                lhs,
                rhs,
            });
            if h == 2 {
                let a = ceil_div(k, r[0]) - 1;
                let left = ceil_div(k - a * r[0], r[1]) as i64;
                let right = ceil_div(k, r[1]) as i64 - (a * ceil_div(r[0], r[1])) as i64;
                conditions.push(ConditionCheck {
                    condition: Condition::CeilingIdentity,
                    holds: left == right,
                    lhs: vec![left],
                    rhs: vec![right],
                });
            }
        }
        Construction::Pyramid => {
            if h == 2 {
                let left = (ceil_div(k, r[0]) * ceil_div(r[0], r[1])) as i64;
                let right = ceil_div(k, r[1]) as i64;
                conditions.push(ConditionCheck {
                    condition: Condition::PyramidCeiling,
                    holds: left == right,
                    lhs: vec![left],
                    rhs: vec![right],
                });
            }
        }
    }

    let meets = designed_d as i64 == bound;
    let optimal_by: Vec<Condition> = if meets {
        conditions.iter().filter(|c| c.holds).map(|c| c.condition).collect()
    } else {
        Vec::new()
    };
    Ok(OptimalityReport {
        bound,
        designed_d,
        optimal: !optimal_by.is_empty(),
        optimal_by,
        conditions,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub d: usize,
    /// Lowest-ordered message attaining `d` (leading nonzero coordinate 1).
    pub witness: Vec<FieldElement>,
    /// Number of messages enumerated: (q^k − 1)/(q − 1).
    pub enumerated: u64,
}

fn check_cap(q: u32, k: usize, cap: u64) -> Result<(), AnalysisError> {
    let total = (q as u128).checked_pow(k as u32);
    match total {
        Some(t) if t <= cap as u128 => Ok(()),
        _ => Err(AnalysisError::CapExceeded { q, k, cap }),
    }
}

/// Exact minimum distance by enumerating every message whose first nonzero
/// coordinate is 1 (scalar multiples have the same weight).
pub fn min_distance_oracle(field: &Field, g: &Matrix, cap: u64) -> Result<OracleResult, AnalysisError> {
    let (k, n) = (g.rows(), g.cols());
    let q = field.order();
    check_cap(q, k, cap)?;
    let rank = g.rank(field);
    if rank < k {
        return Err(AnalysisError::RankDeficient { rank, k });
    }
    let rows = g.row_vecs();
    let q64 = q as u64;

    // Work items: (leading position, block of tails).
    const BLOCK: u64 = 4096;
    let mut items = Vec::new();
    for lead in 0..k {
        let tails = q64.pow((k - lead - 1) as u32);
        let mut start = 0;
        while start < tails {
            items.push((lead, start, (start + BLOCK).min(tails)));
            start += BLOCK;
        }
    }
    let best = items
        .par_iter()
        .map(|&(lead, start, end)| {
            let mut best: Option<(usize, usize, u64)> = None;
            let mut word = vec![FieldElement::ZERO; n];
            for tail in start..end {
                word.copy_from_slice(&rows[lead]);
                let mut t = tail;
                let mut j = lead + 1;
                while t > 0 {
                    let digit = FieldElement::new((t % q64) as u32);
                    if !digit.is_zero() {
                        for (w, &x) in word.iter_mut().zip(&rows[j]) {
                            *w = field.add(*w, field.mul(digit, x));
                        }
                    }
                    t /= q64;
                    j += 1;
                }
                let weight = word.iter().filter(|w| !w.is_zero()).count();
                let key = (weight, lead, tail);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
            best
        })
        .reduce(|| None, |a, b| match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, None) => x,
            (None, y) => y,
        });
    let (d, lead, tail) = best.expect("k ≥ 1 gives at least one message");
    let mut witness = vec![FieldElement::ZERO; k];
    witness[lead] = FieldElement::ONE;
    let mut t = tail;
    for w in witness.iter_mut().skip(lead + 1) {
        *w = FieldElement::new((t % q64) as u32);
        t /= q64;
    }
    let enumerated = (0..k).map(|lead| q64.pow((k - lead - 1) as u32)).sum();
    Ok(OracleResult { d, witness, enumerated })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    /// Every codeword of the punctured code was weighed.
    Enumerated,
    /// Every set of len − δ + 1 columns was shown to have full rank.
    SubsetRank,
    /// Neither was affordable; δ is taken from the construction.
    Designed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAudit {
    pub level: usize,
    pub columns: Vec<usize>,
    pub dim: usize,
    pub r: usize,
    pub delta: usize,
    /// Exact distance, when enumerated.
    pub d_min: Option<usize>,
    /// Verified lower bound on the distance.
    pub d_lower: usize,
    pub method: DistanceMethod,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LocalityReport {
    pub groups: Vec<GroupAudit>,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
}

impl LocalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every group at every level: punctured dimension ≤ r_ℓ and punctured
/// distance ≥ δ_ℓ. Also checks that each column in the code's locality scope
/// lies in a group at every level.
pub fn locality_audit<C: ErasureCode + ?Sized>(code: &C, cap: u64) -> Result<LocalityReport, AnalysisError> {
    let grouping = code.grouping();
    let params = code.locality();
    if grouping.depth() != params.h() {
        return Err(AnalysisError::Depth {
            grouping: grouping.depth(),
            locality: params.h(),
        });
    }
    let f = code.field();
    let mut report = LocalityReport::default();

    for level in 1..=params.h() {
        let (r, delta) = (params.r(level), params.delta(level));
        for col in code.locality_scope() {
            if grouping.group_of(level, col).is_none() {
                report.violations.push(format!("column {col} is in no level-{level} group"));
            }
        }
        for group in grouping.groups(level) {
            let punctured = code.generator().select_columns(group);
            let basis = punctured.row_space_basis(f);
            let dim = basis.rows();
            let (d_min, d_lower, method) = if dim == 0 {
                (None, 0, DistanceMethod::Enumerated)
            } else if let Ok(o) = min_distance_oracle(f, &basis, cap) {
                (Some(o.d), o.d, DistanceMethod::Enumerated)
            } else if delta > group.len() {
                (None, 0, DistanceMethod::SubsetRank)
            } else if binomial(group.len(), delta - 1) <= SUBSET_LIMIT {
                // d ≥ δ iff no codeword vanishes on len − δ + 1 positions
                let full = (0..group.len())
                    .combinations(group.len() - delta + 1)
                    .all(|cols| basis.select_columns(&cols).rank(f) == dim);
                (None, if full { delta } else { 0 }, DistanceMethod::SubsetRank)
            } else {
                report.warnings.push(format!(
                    "level-{level} group starting at column {} is too large to check; assuming δ = {delta}",
                    group[0]
                ));
                (None, delta, DistanceMethod::Designed)
            };
            let mut ok = true;
            if dim > r {
                ok = false;
                report
                    .violations
                    .push(format!("level-{level} group {group:?}: dimension {dim} > r = {r}"));
            }
            if d_lower < delta {
                ok = false;
                report
                    .violations
                    .push(format!("level-{level} group {group:?}: distance below δ = {delta}"));
            }
            report.groups.push(GroupAudit {
                level,
                columns: group.clone(),
                dim,
                r,
                delta,
                d_min,
                d_lower,
                method,
                ok,
            });
        }
    }
    Ok(report)
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuditStep {
    /// A level-h group was added: a = rank gain, s = new columns.
    Local {
        group: Vec<usize>,
        a: usize,
        s: usize,
        ok: bool,
    },
    /// Stepped back up to `level`: the last added support is replaced by
    /// the rest of the enclosing group; a = rank gain over Ψ without the
    /// last support, t = columns added.
    StepUp {
        level: usize,
        group: Vec<usize>,
        a: usize,
        t: usize,
        ok: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportAudit {
    /// |Supp(C_s)| of the (k−1)-dimensional subcode found.
    pub support: usize,
    /// The same set closed under the column span (still rank k − 1).
    pub closed_support: usize,
    /// Guaranteed support from the locality parameters.
    pub lower_bound: usize,
    /// n − closed_support, a distance upper bound for this code.
    pub upper_bound: usize,
    /// Groups selected per level 1..=h.
    pub visits: Vec<usize>,
    pub trace: Vec<AuditStep>,
    pub violations: Vec<String>,
}

impl SupportAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn rank_of<'f>(field: &'f Field, g: &Matrix, cols: impl IntoIterator<Item = usize>) -> Echelon<'f> {
    let mut e = Echelon::new(field);
    for c in cols {
        e.insert(g.column(c));
    }
    e
}

/// Depth-first accumulation of rank-increasing groups: pick a level-1 group
/// that adds rank, descend into it, add level-h groups while they add rank,
/// and when a group is exhausted replace the last added support by the rest
/// of the enclosing group and move up. Groups are scanned in ascending order
/// of their smallest column. Stops at rank k and builds a (k−1)-dimensional
/// subcode from the state before the last step.
pub fn support_accumulation_audit<C: ErasureCode + ?Sized>(code: &C) -> Result<SupportAudit, AnalysisError> {
    let grouping = code.grouping();
    let params = code.locality();
    let h = params.h();
    if grouping.depth() != h {
        return Err(AnalysisError::Depth {
            grouping: grouping.depth(),
            locality: h,
        });
    }
    let f = code.field();
    let g = code.generator();
    let (n, k) = (code.len(), code.dim());
    let rank = g.rank(f);
    if rank < k {
        return Err(AnalysisError::RankDeficient { rank, k });
    }

    let mut psi: BTreeSet<usize> = BTreeSet::new();
    let mut span = Echelon::new(f);
    let mut path: Vec<Option<Vec<usize>>> = vec![None; h + 1];
    let mut level = 1;
    let mut s_last: Vec<usize> = Vec::new();
    let mut visits = vec![0; h];
    let mut trace = Vec::new();
    let mut violations = Vec::new();
    // Ψ before the most recent change, and the columns that change added.
    let mut before_last: BTreeSet<usize> = BTreeSet::new();
    let mut last_added: Vec<usize> = Vec::new();

    while span.rank() < k {
        let parent = path[level - 1].clone();
        let mut groups: Vec<&[usize]> = grouping.children_within(level, parent.as_deref()).collect();
        groups.sort_by_key(|gr| gr[0]);
        let pick = groups.into_iter().find(|gr| {
            let mut trial = span.clone();
            gr.iter().any(|&c| trial.insert(g.column(c)))
        });
        match pick {
            Some(group) => {
                visits[level - 1] += 1;
                path[level] = Some(group.to_vec());
                if level < h {
                    level += 1;
                    continue;
                }
                let new: Vec<usize> = group.iter().copied().filter(|c| !psi.contains(c)).collect();
                let before = span.rank();
                before_last = psi.clone();
                for &c in &new {
                    span.insert(g.column(c));
                    psi.insert(c);
                }
                last_added = new.clone();
                let (a, s) = (span.rank() - before, new.len());
                let ok = s + 1 >= a + params.delta(h);
                if !ok {
                    violations.push(format!("level-{h} group {group:?}: s = {s} < a + δ_h − 1 = {}", a + params.delta(h) - 1));
                }
                trace.push(AuditStep::Local {
                    group: group.to_vec(),
                    a,
                    s,
                    ok,
                });
                s_last = group.to_vec();
            }
            None => {
                level -= 1;
                if level == 0 {
                    return Err(AnalysisError::Stalled { rank: span.rank(), k });
                }
                let m = path[level].clone().expect("visited");
                let reduced: BTreeSet<usize> = psi.iter().copied().filter(|c| !s_last.contains(c)).collect();
                let base = rank_of(f, g, reduced.iter().copied());
                let t_cols: Vec<usize> = m.iter().copied().filter(|c| !reduced.contains(c)).collect();
                let mut grown = base.clone();
                for &c in &t_cols {
                    grown.insert(g.column(c));
                }
                let (a, t) = (grown.rank() - base.rank(), t_cols.len());
                let ok = a == 0 || t + 1 >= a + params.delta(level);
                if !ok {
                    violations.push(format!(
                        "level-{level} group {m:?}: t = {t} < a + δ_{level} − 1 = {}",
                        a + params.delta(level) - 1
                    ));
                }
                trace.push(AuditStep::StepUp {
                    level,
                    group: m,
                    a,
                    t,
                    ok,
                });
                before_last = reduced.clone();
                last_added = t_cols.clone();
                psi = reduced;
                psi.extend(t_cols.iter().copied());
                span = grown;
                s_last = t_cols;
            }
        }
    }

    // C_s: the state before the last step plus columns of the last step
    // taken in order while the rank stays ≤ k − 1.
    let mut cs = rank_of(f, g, before_last.iter().copied());
    let mut support: BTreeSet<usize> = before_last;
    for &c in &last_added {
        let mut trial = cs.clone();
        trial.insert(g.column(c));
        if trial.rank() < k {
            cs = trial;
            support.insert(c);
        }
    }
    let closed: usize = (0..n).filter(|&c| support.contains(&c) || cs.contains(&g.column(c))).count();

    for (l, &v) in visits.iter().enumerate() {
        let need = ceil_div(k, params.r(l + 1));
        if v < need {
            violations.push(format!("visited {v} level-{} groups, need ≥ ⌈k/r⌉ = {need}", l + 1));
        }
    }
    let lower_bound = support_lower_bound(k, params);
    if support.len() < lower_bound {
        violations.push(format!("support {} < guaranteed {lower_bound}", support.len()));
    }
    Ok(SupportAudit {
        support: support.len(),
        closed_support: closed,
        lower_bound,
        upper_bound: n - closed,
        visits,
        trace,
        violations,
    })
}
