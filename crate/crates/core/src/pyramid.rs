//! Two-level pyramid codes with information-symbol locality.
//!
//! Start from a systematic MDS generator `[I_k | Q]`. Rows are cut into
//! middle groups of `r_1` rows (the last one may be short) and each middle
//! group into local groups of `r_2` rows. For a middle group the first
//! `δ_1 − 1` columns of Q are kept; the first of them is split by local group
//! into local parities, the other `δ_1 − 2` stay as middle parities. The
//! remaining `d − δ_1` columns of Q are global parities.

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{ErasureCode, Grouping, LocalityParams};
use crate::gf::{Field, FieldElement};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PyramidError {
    #[error("invalid pyramid parameters: {0}")]
    Spec(String),
    #[error("GF({q}) is too small for an MDS code of length {len}")]
    FieldTooSmall { q: u32, len: usize },
    #[error("base code is not MDS")]
    NotMds,
}

pub const MDS_SAMPLES: usize = 10_000;
pub const MDS_SEED: u64 = 0x006d_6473_5f63_686b;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct PyramidSpec {
    k: usize,
    d: usize,
    r1: usize,
    r2: usize,
    delta1: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    k: usize,
    d: usize,
    r1: usize,
    r2: usize,
    delta1: usize,
}

impl TryFrom<RawSpec> for PyramidSpec {
    type Error = PyramidError;
    fn try_from(r: RawSpec) -> Result<Self, PyramidError> {
        PyramidSpec::new(r.k, r.d, r.r1, r.r2, r.delta1)
    }
}

impl From<PyramidSpec> for RawSpec {
    fn from(s: PyramidSpec) -> Self {
        RawSpec {
            k: s.k,
            d: s.d,
            r1: s.r1,
            r2: s.r2,
            delta1: s.delta1,
        }
    }
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

impl PyramidSpec {
    /// `1 ≤ r_2 ≤ r_1 ≤ k` and `2 ≤ δ_1 ≤ d`; δ_2 is 2.
    pub fn new(k: usize, d: usize, r1: usize, r2: usize, delta1: usize) -> Result<Self, PyramidError> {
        if k == 0 || r2 == 0 {
            return Err(PyramidError::Spec("k and r_2 must be positive".into()));
        }
        if !(r2 <= r1 && r1 <= k) {
            return Err(PyramidError::Spec(format!("need r_2 ≤ r_1 ≤ k, got r_2={r2}, r_1={r1}, k={k}")));
        }
        if !(2 <= delta1 && delta1 <= d) {
            return Err(PyramidError::Spec(format!("need 2 ≤ δ_1 ≤ d, got δ_1={delta1}, d={d}")));
        }
        Ok(PyramidSpec { k, d, r1, r2, delta1 })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r1(&self) -> usize {
        self.r1
    }

    pub fn r2(&self) -> usize {
        self.r2
    }

    pub fn delta1(&self) -> usize {
        self.delta1
    }

    /// (α, β, γ) with k = α r_1 + β r_2 + γ, 0 ≤ β r_2 + γ < r_1, γ < r_2.
    pub fn alpha_beta_gamma(&self) -> (usize, usize, usize) {
        let alpha = self.k / self.r1;
        let rest = self.k % self.r1;
        (alpha, rest / self.r2, rest % self.r2)
    }

    /// (μ, ν) with r_1 = μ r_2 + ν.
    pub fn mu_nu(&self) -> (usize, usize) {
        (self.r1 / self.r2, self.r1 % self.r2)
    }

    /// Row blocks: each middle group as a list of local row ranges.
    fn row_blocks(&self) -> Vec<Vec<std::ops::Range<usize>>> {
        let mut out = Vec::new();
        let mut start = 0;
        while start < self.k {
            let end = (start + self.r1).min(self.k);
            let locals = (start..end)
                .step_by(self.r2)
                .map(|s| s..(s + self.r2).min(end))
                .collect();
            out.push(locals);
            start = end;
        }
        out
    }

    /// Length from the closed form
    /// `k + d − 1 + (⌈k/r_1⌉⌈r_1/r_2⌉ − 1) + (⌈k/r_1⌉ − 1)(δ_1 − 2)`.
    pub fn formula_length(&self) -> usize {
        let a = ceil_div(self.k, self.r1);
        self.k + self.d - 1 + (a * ceil_div(self.r1, self.r2) - 1) + (a - 1) * (self.delta1 - 2)
    }

    /// Length of the assembled generator. Equal to [`Self::formula_length`]
    /// unless the last middle group is short and needs fewer local parities.
    pub fn length(&self) -> usize {
        let blocks = self.row_blocks();
        let locals: usize = blocks.iter().map(Vec::len).sum();
        self.k + locals + blocks.len() * (self.delta1 - 2) + (self.d - self.delta1)
    }
}

/// ⌈k/r_1⌉⌈r_1/r_2⌉ = ⌈k/r_2⌉
pub fn pyramid_optimal(spec: &PyramidSpec) -> bool {
    ceil_div(spec.k, spec.r1) * ceil_div(spec.r1, spec.r2) == ceil_div(spec.k, spec.r2)
}

/// Evaluation points 0, 1, α, α², … for the base code.
fn mds_points(field: &Field, len: usize) -> Vec<FieldElement> {
    std::iter::once(FieldElement::ZERO)
        .chain((0..len.saturating_sub(1)).map(|i| field.alpha_pow(i as i64)))
        .collect()
}

/// `[I_k | Q]`, k × (k + d − 1): row i is the Lagrange basis polynomial of
/// the i-th point, evaluated everywhere.
pub fn systematic_mds(field: &Field, k: usize, d: usize) -> Result<Matrix, PyramidError> {
    if k == 0 || d == 0 {
        return Err(PyramidError::Spec("k and d must be positive".into()));
    }
    let len = k + d - 1;
    if len > field.order() as usize {
        return Err(PyramidError::FieldTooSmall {
            q: field.order(),
            len,
        });
    }
    let x = mds_points(field, len);
    let mut g = Matrix::zeros(k, len);
    for i in 0..k {
        let mut denom = FieldElement::ONE;
        for j in (0..k).filter(|&j| j != i) {
            denom = field.mul(denom, field.sub(x[i], x[j]));
        }
        let denom_inv = field.inv(denom);
        for (c, &xc) in x.iter().enumerate() {
            let v = if c < k {
                if c == i {
                    FieldElement::ONE
                } else {
                    FieldElement::ZERO
                }
            } else {
                let num = (0..k)
                    .filter(|&j| j != i)
                    .fold(FieldElement::ONE, |acc, j| field.mul(acc, field.sub(xc, x[j])));
                field.mul(num, denom_inv)
            };
            g.set(i, c, v);
        }
    }
    Ok(g)
}

/// Every k columns independent. Exhaustive up to 16 columns, otherwise
/// [`MDS_SAMPLES`] random k-subsets drawn from a fixed seed.
pub fn verify_mds(field: &Field, g: &Matrix) -> bool {
    let (k, n) = (g.rows(), g.cols());
    if k > n {
        return false;
    }
    let full = |cols: &[usize]| g.select_columns(cols).rank(field) == k;
    if n <= 16 {
        return (0..n).combinations(k).all(|cols| full(&cols));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(MDS_SEED);
    (0..MDS_SAMPLES).all(|_| {
        let mut cols = sample(&mut rng, n, k).into_vec();
        cols.sort_unstable();
        full(&cols)
    })
}

/// Where each column of the pyramid generator came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnRole {
    Info,
    /// Split first parity column of middle group `group`, local block `local`.
    LocalParity { group: usize, local: usize },
    /// One of the δ_1 − 2 middle parities of `group`.
    MiddleParity { group: usize },
    Global,
}

#[derive(Debug, Clone)]
pub struct PyramidCode {
    field: Field,
    spec: PyramidSpec,
    mds: Matrix,
    generator: Matrix,
    roles: Vec<ColumnRole>,
    grouping: Grouping,
    locality: LocalityParams,
}

pub fn build_pyramid(field: &Field, spec: &PyramidSpec) -> Result<PyramidCode, PyramidError> {
    let (k, d, delta1) = (spec.k, spec.d, spec.delta1);
    let mds = systematic_mds(field, k, d)?;
    if !verify_mds(field, &mds) {
        return Err(PyramidError::NotMds);
    }
    let blocks = spec.row_blocks();
    let mut columns: Vec<Vec<FieldElement>> = Vec::new();
    let mut roles = Vec::new();
    for row in 0..k {
        let mut c = vec![FieldElement::ZERO; k];
        c[row] = FieldElement::ONE;
        columns.push(c);
        roles.push(ColumnRole::Info);
    }
    let mut middle_groups: Vec<Vec<usize>> = Vec::new();
    let mut local_groups: Vec<Vec<usize>> = Vec::new();
    for (g, locals) in blocks.iter().enumerate() {
        let rows = locals[0].start..locals.last().expect("non-empty").end;
        let mut middle: Vec<usize> = rows.clone().collect();
        // the first δ_1 − 1 columns of Q, restricted to these rows
        let restricted = |q: usize, keep: std::ops::Range<usize>| -> Vec<FieldElement> {
            (0..k)
                .map(|r| if keep.contains(&r) { mds.get(r, k + q) } else { FieldElement::ZERO })
                .collect()
        };
        for (l, local) in locals.iter().enumerate() {
            middle.push(columns.len());
            local_groups.push(local.clone().chain(std::iter::once(columns.len())).collect());
            columns.push(restricted(0, local.clone()));
            roles.push(ColumnRole::LocalParity { group: g, local: l });
        }
        for q in 1..delta1 - 1 {
            middle.push(columns.len());
            columns.push(restricted(q, rows.clone()));
            roles.push(ColumnRole::MiddleParity { group: g });
        }
        middle_groups.push(middle);
    }
    for q in delta1 - 1..d - 1 {
        columns.push(mds.column(k + q));
        roles.push(ColumnRole::Global);
    }
    let generator = Matrix::from_rows(columns).transpose();
    let n = generator.cols();
    debug_assert_eq!(n, spec.length());
    let grouping = Grouping::new(n, vec![middle_groups, local_groups]).map_err(|e| PyramidError::Spec(e.to_string()))?;
    let locality = LocalityParams::new(vec![(spec.r1, delta1), (spec.r2, 2)]).map_err(|e| PyramidError::Spec(e.to_string()))?;
    Ok(PyramidCode {
        field: field.clone(),
        spec: *spec,
        mds,
        generator,
        roles,
        grouping,
        locality,
    })
}

impl PyramidCode {
    pub fn spec(&self) -> &PyramidSpec {
        &self.spec
    }

    /// The base `[I_k | Q]`.
    pub fn mds(&self) -> &Matrix {
        &self.mds
    }

    pub fn roles(&self) -> &[ColumnRole] {
        &self.roles
    }

    /// Sums each group's local parities back into one column and restores
    /// the original column order, which gives the base generator again.
    pub fn merge_local_parities(&self) -> Matrix {
        let f = &self.field;
        let k = self.spec.k;
        let mut first: Vec<FieldElement> = vec![FieldElement::ZERO; k];
        let mut cols: Vec<Vec<FieldElement>> = (0..k).map(|c| self.generator.column(c)).collect();
        let mut middle: Vec<Vec<Vec<FieldElement>>> = Vec::new();
        let mut global = Vec::new();
        for (c, role) in self.roles.iter().enumerate() {
            let col = self.generator.column(c);
            match *role {
                ColumnRole::Info => {}
                ColumnRole::LocalParity { .. } => {
                    for (a, b) in first.iter_mut().zip(&col) {
                        *a = f.add(*a, *b);
                    }
                }
                ColumnRole::MiddleParity { group } => {
                    if middle.len() <= group {
                        middle.resize(group + 1, Vec::new());
                    }
                    middle[group].push(col);
                }
                ColumnRole::Global => global.push(col),
            }
        }
        cols.push(first);
        for q in 0..self.spec.delta1 - 2 {
            let mut sum = vec![FieldElement::ZERO; k];
            for g in &middle {
                for (a, b) in sum.iter_mut().zip(&g[q]) {
                    *a = f.add(*a, *b);
                }
            }
            cols.push(sum);
        }
        cols.extend(global);
        Matrix::from_rows(cols).transpose()
    }
}

impl ErasureCode for PyramidCode {
    fn field(&self) -> &Field {
        &self.field
    }

    fn generator(&self) -> &Matrix {
        &self.generator
    }

    fn grouping(&self) -> &Grouping {
        &self.grouping
    }

    fn locality(&self) -> &LocalityParams {
        &self.locality
    }

    fn locality_scope(&self) -> Vec<usize> {
        (0..self.spec.k).collect()
    }

    fn designed_distance(&self) -> usize {
        self.spec.d
    }
}
