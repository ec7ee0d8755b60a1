//! Subgroup chains H_h ⊂ … ⊂ H_1 ⊂ H_0 = GF(q)* and the tree of their cosets.
//!
//! A level-`i` node is indexed by a tuple `t = (t_0, …, t_h)` with
//! `t_0 = 1`, `1 ≤ t_j ≤ μ_j` for `1 ≤ j ≤ i` and `t_j = 0` beyond `i`.
//! Its coset is `γ·H_i` with `γ = Π_{j<i} β_j^{t_{j+1} − 1}`, where
//! `β_0 = α` and `β_j` has order `n_j`. Members are listed as
//! `γ, γβ_i, γβ_i², …`, which fixes column order everywhere downstream.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("invalid hierarchy profile: {0}")]
    Profile(String),
    #[error("divisibility violated: {0}")]
    Divisibility(String),
    #[error("no node at level {level} with index {t:?}")]
    NoSuchNode { level: usize, t: Vec<usize> },
    #[error("{n} points requested but only {available} nonzero field elements exist")]
    TooLong { n: usize, available: usize },
}

/// Length and dimension of the level-`i` codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSpec {
    pub n_i: usize,
    pub r_i: usize,
}

/// `(h; n, k; (n_1, r_1), …, (n_h, r_h))` with level 1 outermost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct HierarchyProfile {
    n: usize,
    k: usize,
    levels: Vec<LevelSpec>,
}

#[derive(Serialize, Deserialize)]
struct RawProfile {
    n: usize,
    k: usize,
    levels: Vec<LevelSpec>,
}

impl TryFrom<RawProfile> for HierarchyProfile {
    type Error = TreeError;
    fn try_from(raw: RawProfile) -> Result<Self, TreeError> {
        HierarchyProfile::new(raw.n, raw.k, raw.levels)
    }
}

impl From<HierarchyProfile> for RawProfile {
    fn from(p: HierarchyProfile) -> Self {
        RawProfile {
            n: p.n,
            k: p.k,
            levels: p.levels,
        }
    }
}

impl HierarchyProfile {
    /// Checks the field-independent rules: `n_h | … | n_1 | n`,
    /// `1 ≤ r_h < n_h`, `r_{i+1} ≤ r_i ≤ μ_{i+1} r_{i+1}` and
    /// `1 ≤ k ≤ (n/n_1)·r_1`.
    pub fn new(n: usize, k: usize, levels: Vec<LevelSpec>) -> Result<Self, TreeError> {
        let bad = |msg: String| Err(TreeError::Profile(msg));
        if levels.is_empty() {
            return bad("at least one level is required".into());
        }
        if k == 0 {
            return bad("dimension k must be positive".into());
        }
        if levels.iter().any(|l| l.n_i == 0 || l.r_i == 0) {
            return bad("level lengths and dimensions must be positive".into());
        }
        if n == 0 || !n.is_multiple_of(levels[0].n_i) {
            return Err(TreeError::Divisibility(format!(
                "n_1 = {} does not divide n = {n}",
                levels[0].n_i
            )));
        }
        for (i, w) in levels.windows(2).enumerate() {
            if w[0].n_i % w[1].n_i != 0 {
                return Err(TreeError::Divisibility(format!(
                    "n_{} = {} does not divide n_{} = {}",
                    i + 2,
                    w[1].n_i,
                    i + 1,
                    w[0].n_i
                )));
            }
            let mu = w[0].n_i / w[1].n_i;
            if w[0].r_i > mu * w[1].r_i {
                return bad(format!(
                    "r_{} = {} exceeds μ_{}·r_{} = {}",
                    i + 1,
                    w[0].r_i,
                    i + 2,
                    i + 2,
                    mu * w[1].r_i
                ));
            }
            if w[0].r_i < w[1].r_i {
                return bad(format!("r_{} = {} is smaller than r_{} = {}", i + 1, w[0].r_i, i + 2, w[1].r_i));
            }
        }
        let last = levels[levels.len() - 1];
        if last.r_i >= last.n_i {
            return bad(format!("innermost r_h = {} must be below n_h = {}", last.r_i, last.n_i));
        }
        let mu_bar = n / levels[0].n_i;
        if k > mu_bar * levels[0].r_i {
            return bad(format!(
                "k = {k} exceeds (n/n_1)·r_1 = {}",
                mu_bar * levels[0].r_i
            ));
        }
        Ok(HierarchyProfile { n, k, levels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of levels h.
    pub fn h(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[LevelSpec] {
        &self.levels
    }

    /// n_i for 1 ≤ i ≤ h.
    pub fn n_at(&self, i: usize) -> usize {
        self.levels[i - 1].n_i
    }

    /// r_i for 1 ≤ i ≤ h.
    pub fn r_at(&self, i: usize) -> usize {
        self.levels[i - 1].r_i
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.n_i).collect()
    }

    /// μ̄_1 = n / n_1, the number of level-1 cosets used.
    pub fn mu_bar1(&self) -> usize {
        self.n / self.levels[0].n_i
    }

    /// μ_i = n_{i−1} / n_i for 2 ≤ i ≤ h (μ_1 depends on the field).
    pub fn mu_at(&self, i: usize) -> usize {
        assert!(i >= 2 && i <= self.h());
        self.n_at(i - 1) / self.n_at(i)
    }

    /// The field-dependent rules: n_1 | q − 1 and μ̄_1 ≤ μ_1.
    pub fn check_field(&self, field: &Field) -> Result<(), TreeError> {
        let group = field.group_order() as usize;
        if !group.is_multiple_of(self.levels[0].n_i) {
            return Err(TreeError::Divisibility(format!(
                "n_1 = {} does not divide q − 1 = {group}",
                self.levels[0].n_i
            )));
        }
        if self.n > group {
            return Err(TreeError::TooLong {
                n: self.n,
                available: group,
            });
        }
        Ok(())
    }
}

/// Index of a node: its level and the zero-padded tuple (t_0, …, t_h).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeIndex {
    pub level: usize,
    pub t: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CosetNode {
    index: NodeIndex,
    gamma: FieldElement,
    members: Vec<FieldElement>,
}

impl CosetNode {
    pub fn index(&self) -> &NodeIndex {
        &self.index
    }

    /// Coset representative γ_(i,t).
    pub fn gamma(&self) -> FieldElement {
        self.gamma
    }

    pub fn members(&self) -> &[FieldElement] {
        &self.members
    }
}

/// JSON export of a node: `{"index":[i,t…], "gamma":int, "members":[int…]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeExport {
    pub index: Vec<usize>,
    pub gamma: u32,
    pub members: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct CosetTree {
    field: Arc<Field>,
    /// n_0 = q − 1, n_1, …, n_h.
    lengths: Vec<usize>,
    /// μ_0 = 1, μ_1, …, μ_h.
    mus: Vec<usize>,
    /// β_0 = α, β_1, …, β_h.
    betas: Vec<FieldElement>,
    /// Number of level-1 branches kept (μ_1 for the full tree).
    branches: usize,
    /// Nodes per level in lexicographic t order.
    levels: Vec<Vec<CosetNode>>,
}

/// Full coset tree for the level lengths `n_1, …, n_h`.
pub fn build_coset_tree(field: Arc<Field>, lengths: &[usize]) -> Result<CosetTree, TreeError> {
    if lengths.is_empty() || lengths.contains(&0) {
        return Err(TreeError::Profile("level lengths must be positive".into()));
    }
    let group = field.group_order() as usize;
    let mut all = vec![group];
    all.extend_from_slice(lengths);
    for w in all.windows(2) {
        if w[0] % w[1] != 0 {
            return Err(TreeError::Divisibility(format!("{} does not divide {}", w[1], w[0])));
        }
    }
    let h = lengths.len();
    let mut mus = vec![1];
    mus.extend(all.windows(2).map(|w| w[0] / w[1]));
    let betas: Vec<FieldElement> = all
        .iter()
        .map(|&n| field.element_of_order(n as u64).expect("divisibility checked above"))
        .collect();

    let coset = |gamma: FieldElement, level: usize| -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(all[level]);
        let mut x = gamma;
        for _ in 0..all[level] {
            out.push(x);
            x = field.mul(x, betas[level]);
        }
        out
    };

    let mut root_t = vec![0; h + 1];
    root_t[0] = 1;
    let root = CosetNode {
        index: NodeIndex { level: 0, t: root_t },
        gamma: FieldElement::ONE,
        members: coset(FieldElement::ONE, 0),
    };
    let mut levels = vec![vec![root]];
    for i in 1..=h {
        let mut next = Vec::with_capacity(levels[i - 1].len() * mus[i]);
        for parent in &levels[i - 1] {
            let mut step = FieldElement::ONE;
            for ti in 1..=mus[i] {
                let gamma = field.mul(parent.gamma, step);
                let mut t = parent.index.t.clone();
                t[i] = ti;
                next.push(CosetNode {
                    index: NodeIndex { level: i, t },
                    gamma,
                    members: coset(gamma, i),
                });
                step = field.mul(step, betas[i - 1]);
            }
        }
        levels.push(next);
    }
    Ok(CosetTree {
        branches: mus[1],
        field,
        lengths: all,
        mus,
        betas,
        levels,
    })
}

impl CosetTree {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_arc(&self) -> Arc<Field> {
        self.field.clone()
    }

    /// Depth h.
    pub fn h(&self) -> usize {
        self.lengths.len() - 1
    }

    /// n_i for 0 ≤ i ≤ h (n_0 = q − 1).
    pub fn n_at(&self, i: usize) -> usize {
        self.lengths[i]
    }

    /// μ_i for 0 ≤ i ≤ h.
    pub fn mu_at(&self, i: usize) -> usize {
        self.mus[i]
    }

    /// β_i for 0 ≤ i ≤ h.
    pub fn beta(&self, i: usize) -> FieldElement {
        self.betas[i]
    }

    /// Level-1 branches present: μ_1 for a full tree, μ̄_1 for a relevant one.
    pub fn branches(&self) -> usize {
        self.branches
    }

    pub fn nodes(&self, level: usize) -> &[CosetNode] {
        &self.levels[level]
    }

    /// Position of a node within its level.
    pub fn position(&self, index: &NodeIndex) -> Result<usize, TreeError> {
        let missing = || TreeError::NoSuchNode {
            level: index.level,
            t: index.t.clone(),
        };
        let h = self.h();
        if index.level > h || index.t.len() != h + 1 || index.t[0] != 1 {
            return Err(missing());
        }
        let mut pos = 0;
        for j in 1..=h {
            let tj = index.t[j];
            if j <= index.level {
                let limit = if j == 1 { self.branches } else { self.mus[j] };
                if tj == 0 || tj > limit {
                    return Err(missing());
                }
                pos = pos * self.mus[j] + (tj - 1);
            } else if tj != 0 {
                return Err(missing());
            }
        }
        Ok(pos)
    }

    pub fn node(&self, index: &NodeIndex) -> Result<&CosetNode, TreeError> {
        Ok(&self.levels[index.level][self.position(index)?])
    }

    /// Convenience: node at `level` with the 1-based path `path = (t_1, …, t_level)`.
    pub fn node_at(&self, level: usize, path: &[usize]) -> Result<&CosetNode, TreeError> {
        let mut t = vec![0; self.h() + 1];
        t[0] = 1;
        t[1..=path.len().min(self.h())].copy_from_slice(&path[..path.len().min(self.h())]);
        self.node(&NodeIndex { level, t })
    }

    /// Position of the parent of the node at (`level`, `pos`).
    pub fn parent_position(&self, level: usize, pos: usize) -> usize {
        assert!(level >= 1);
        if level == 1 {
            0
        } else {
            pos / self.mus[level]
        }
    }

    /// Positions (at `level + 1`) of the children of (`level`, `pos`).
    pub fn child_positions(&self, level: usize, pos: usize) -> std::ops::Range<usize> {
        let count = if level == 0 { self.branches } else { self.mus[level + 1] };
        pos * self.mus[level + 1]..pos * self.mus[level + 1] + count
    }

    /// Positions of the siblings of (`level`, `pos`), excluding itself.
    pub fn sibling_positions(&self, level: usize, pos: usize) -> Vec<usize> {
        let parent = self.parent_position(level, pos);
        self.child_positions(level - 1, parent)
            .filter(|&s| s != pos)
            .collect()
    }

    /// Keeps the first μ̄_1 = n / n_1 level-1 branches.
    pub fn relevant_subtree(&self, n: usize) -> Result<RelevantTree, TreeError> {
        let n1 = self.lengths[1];
        if n == 0 || !n.is_multiple_of(n1) {
            return Err(TreeError::Divisibility(format!("n_1 = {n1} does not divide n = {n}")));
        }
        let keep = n / n1;
        if keep > self.mus[1] {
            return Err(TreeError::TooLong {
                n,
                available: self.lengths[0],
            });
        }
        let mut levels = vec![self.levels[0].clone()];
        let mut width = keep;
        for i in 1..=self.h() {
            levels.push(self.levels[i][..width].to_vec());
            if i < self.h() {
                width *= self.mus[i + 1];
            }
        }
        Ok(RelevantTree(CosetTree {
            field: self.field.clone(),
            lengths: self.lengths.clone(),
            mus: self.mus.clone(),
            betas: self.betas.clone(),
            branches: keep,
            levels,
        }))
    }

    pub fn export(&self) -> Vec<NodeExport> {
        self.levels
            .iter()
            .flatten()
            .map(|node| {
                let mut index = vec![node.index.level];
                index.extend_from_slice(&node.index.t);
                NodeExport {
                    index,
                    gamma: node.gamma.value(),
                    members: node.members.iter().map(|m| m.value()).collect(),
                }
            })
            .collect()
    }
}

/// The coset tree restricted to `t_1 ≤ μ̄_1`; its level-1 cosets make up the
/// evaluation set A.
#[derive(Debug, Clone)]
pub struct RelevantTree(CosetTree);

impl std::ops::Deref for RelevantTree {
    type Target = CosetTree;
    fn deref(&self) -> &CosetTree {
        &self.0
    }
}

impl RelevantTree {
    /// A in code-column order: level-1 cosets in t order, members in coset order.
    pub fn eval_points(&self) -> Vec<FieldElement> {
        self.nodes(1)
            .iter()
            .flat_map(|n| n.members().iter().copied())
            .collect()
    }

    /// For each level 1..=h, the groups of column indices (into
    /// [`RelevantTree::eval_points`]) covered by that level's cosets.
    pub fn column_groups(&self) -> Vec<Vec<Vec<usize>>> {
        let column: HashMap<FieldElement, usize> = self
            .eval_points()
            .into_iter()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        (1..=self.h())
            .map(|level| {
                self.nodes(level)
                    .iter()
                    .map(|node| {
                        let mut g: Vec<usize> = node.members().iter().map(|m| column[m]).collect();
                        g.sort_unstable();
                        g
                    })
                    .collect()
            })
            .collect()
    }
}
