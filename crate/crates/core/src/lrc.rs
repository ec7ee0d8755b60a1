//! All-symbol hierarchical codes from polynomial evaluation on coset trees.
//!
//! The code is `{(c(θ))_{θ ∈ A} : supp(c) ⊆ Exp(c)}` where `Exp(c)` comes out
//! of the truncation recursion
//!
//! ```text
//! Exp(c_h) = {r_h − 1, …, 0}
//! Exp(c_i) = Trunc(⋃_{j < μ_{i+1}} (j·n_{i+1} + Exp(c_{i+1})), r_i)
//! Exp(c)   = Trunc(⋃_{j < μ̄_1}   (j·n_1     + Exp(c_1)),     k)
//! ```
//!
//! and `Trunc(S, r)` keeps the `r` smallest exponents. [`build_code`] uses
//! that monomial description directly. [`constructive_generator`] assembles
//! the same space bottom-up from the per-coset indicator polynomials, zeroing
//! the highest exponents at every level, and serves as a cross-check.

use std::sync::Arc;

use thiserror::Error;

use crate::code::{ErasureCode, Grouping, LocalityParams};
use crate::coset_tree::{build_coset_tree, CosetTree, HierarchyProfile, NodeIndex, RelevantTree, TreeError};
use crate::gf::{find_field, make_field, Field, FieldConfig, FieldElement, GfError};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::repair::ShardSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LrcError {
    #[error(transparent)]
    Field(#[from] GfError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("cannot keep {wanted} exponents out of {available} at level {level}")]
    InsufficientMonomials {
        level: usize,
        wanted: usize,
        available: usize,
    },
    #[error("sibling cosets share γ^n_i = {value} at level {level}")]
    DegenerateSiblings { level: usize, value: u32 },
    #[error("message has {got} symbols, expected {expected}")]
    MessageLength { got: usize, expected: usize },
    #[error("message symbol {value} is not a field element")]
    MessageSymbol { value: u32 },
    #[error("precoding at node {node:?} leaves dimension {got}, expected {expected}")]
    Precoding {
        node: NodeIndex,
        got: usize,
        expected: usize,
    },
    #[error("invalid locality structure: {0}")]
    Locality(String),
}

/// Annihilator of the coset at `index`: X^{n_i} − γ^{n_i}.
pub fn annihilator(tree: &CosetTree, index: &NodeIndex) -> Result<Poly, LrcError> {
    let node = tree.node(index)?;
    let f = tree.field();
    let ni = tree.n_at(index.level);
    Ok(Poly::monomial(FieldElement::ONE, ni).sub(f, &Poly::constant(f.pow(node.gamma(), ni as u64))))
}

/// Indicator of the coset at `index` among its siblings in `tree`:
/// `Π_s (X^{n_i} − γ_s^{n_i}) / (γ_t^{n_i} − γ_s^{n_i})`.
///
/// On a relevant tree the level-1 sibling set is the retained branches only,
/// so the result indicates the coset within the evaluation set.
pub fn indicator_polynomial(tree: &CosetTree, index: &NodeIndex) -> Result<Poly, LrcError> {
    if index.level == 0 {
        return Err(TreeError::NoSuchNode {
            level: 0,
            t: index.t.clone(),
        }
        .into());
    }
    let pos = tree.position(index)?;
    indicator_at(tree, index.level, pos)
}

fn indicator_at(tree: &CosetTree, level: usize, pos: usize) -> Result<Poly, LrcError> {
    let f = tree.field();
    let ni = tree.n_at(level) as u64;
    let own = f.pow(tree.nodes(level)[pos].gamma(), ni);
    // g(Y) with Y = X^{n_i}
    let mut g = Poly::one();
    for s in tree.sibling_positions(level, pos) {
        let other = f.pow(tree.nodes(level)[s].gamma(), ni);
        let denom = f.sub(own, other);
        if denom.is_zero() {
            return Err(LrcError::DegenerateSiblings {
                level,
                value: own.value(),
            });
        }
        let factor = Poly::from_coeffs(vec![f.neg(other), FieldElement::ONE]).scale(f, f.inv(denom));
        g = g.mul(f, &factor);
    }
    Ok(stretch(&g, ni as usize))
}

/// g(Y) ↦ g(X^step)
fn stretch(g: &Poly, step: usize) -> Poly {
    let Some(deg) = g.degree() else {
        return Poly::zero();
    };
    let mut coeffs = vec![FieldElement::ZERO; deg * step + 1];
    for (j, &c) in g.coeffs().iter().enumerate() {
        coeffs[j * step] = c;
    }
    Poly::from_coeffs(coeffs)
}

/// Exponent sets per level, each in descending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpSet {
    /// levels[i - 1] = Exp(c_i)
    levels: Vec<Vec<usize>>,
    code: Vec<usize>,
}

impl ExpSet {
    /// Exp(c_i), 1 ≤ i ≤ h.
    pub fn level(&self, i: usize) -> &[usize] {
        &self.levels[i - 1]
    }

    /// Exp(c).
    pub fn code(&self) -> &[usize] {
        &self.code
    }

    /// Exp(c) in ascending order: the message-to-exponent layout.
    pub fn ascending(&self) -> Vec<usize> {
        self.code.iter().rev().copied().collect()
    }

    pub fn max(&self) -> usize {
        self.code[0]
    }
}

/// Keeps the `r` smallest elements of a descending list.
fn trunc(mut desc: Vec<usize>, r: usize, level: usize) -> Result<Vec<usize>, LrcError> {
    if r > desc.len() {
        return Err(LrcError::InsufficientMonomials {
            level,
            wanted: r,
            available: desc.len(),
        });
    }
    Ok(desc.split_off(desc.len() - r))
}

fn shifted_union(base: &[usize], copies: usize, stride: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (0..copies)
        .flat_map(|j| base.iter().map(move |&e| j * stride + e))
        .collect();
    out.sort_unstable_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

pub fn exponent_sets(profile: &HierarchyProfile) -> Result<ExpSet, LrcError> {
    let h = profile.h();
    let mut levels = vec![Vec::new(); h];
    levels[h - 1] = (0..profile.r_at(h)).rev().collect();
    for i in (1..h).rev() {
        let union = shifted_union(&levels[i], profile.mu_at(i + 1), profile.n_at(i + 1));
        levels[i - 1] = trunc(union, profile.r_at(i), i)?;
    }
    let union = shifted_union(&levels[0], profile.mu_bar1(), profile.n_at(1));
    let code = trunc(union, profile.k(), 0)?;
    Ok(ExpSet { levels, code })
}

/// A realized all-symbol code.
#[derive(Debug, Clone)]
pub struct HierarchicalCode {
    profile: HierarchyProfile,
    field: Arc<Field>,
    tree: RelevantTree,
    exp: ExpSet,
    eval_points: Vec<FieldElement>,
    generator: Matrix,
    designed_distance: usize,
    grouping: Grouping,
    locality: LocalityParams,
}

/// Builds the code over a given field. Generator rows are the monomials
/// `X^e`, `e ∈ Exp(c)` ascending, evaluated over A.
pub fn build_code(field: Arc<Field>, profile: &HierarchyProfile) -> Result<HierarchicalCode, LrcError> {
    profile.check_field(&field)?;
    let exp = exponent_sets(profile)?;
    let tree = build_coset_tree(field.clone(), &profile.lengths())?.relevant_subtree(profile.n())?;
    let eval_points = tree.eval_points();
    let rows = exp
        .ascending()
        .into_iter()
        .map(|e| eval_points.iter().map(|&x| field.pow(x, e as u64)).collect())
        .collect();
    let generator = Matrix::from_rows(rows);
    let designed_distance = profile.n() - exp.max();
    let grouping = Grouping::new(profile.n(), tree.column_groups())
        .map_err(|e| LrcError::Locality(e.to_string()))?;
    let locality = LocalityParams::new(
        (1..=profile.h())
            .map(|i| (profile.r_at(i), profile.n_at(i) - exp.level(i)[0]))
            .collect(),
    )
    .map_err(|e| LrcError::Locality(e.to_string()))?;
    Ok(HierarchicalCode {
        profile: profile.clone(),
        field,
        tree,
        exp,
        eval_points,
        generator,
        designed_distance,
        grouping,
        locality,
    })
}

/// Picks the smallest suitable field and builds the code over it.
pub fn design_code(profile: &HierarchyProfile, config: &FieldConfig) -> Result<HierarchicalCode, LrcError> {
    let lengths: Vec<u64> = profile.lengths().iter().map(|&l| l as u64).collect();
    let (p, m) = find_field(&lengths, profile.n() as u64, config)?;
    build_code(Arc::new(make_field(p, m, config)?), profile)
}

impl HierarchicalCode {
    pub fn profile(&self) -> &HierarchyProfile {
        &self.profile
    }

    pub fn field_arc(&self) -> Arc<Field> {
        self.field.clone()
    }

    pub fn tree(&self) -> &RelevantTree {
        &self.tree
    }

    pub fn exp(&self) -> &ExpSet {
        &self.exp
    }

    pub fn eval_points(&self) -> &[FieldElement] {
        &self.eval_points
    }

    /// c(X) = Σ_j message_j · X^{e_j}, e_j ascending over Exp(c).
    pub fn message_polynomial(&self, message: &[FieldElement]) -> Result<Poly, LrcError> {
        self.check_message(message)?;
        let mut coeffs = vec![FieldElement::ZERO; self.exp.max() + 1];
        for (&e, &m) in self.exp.ascending().iter().zip(message) {
            coeffs[e] = m;
        }
        Ok(Poly::from_coeffs(coeffs))
    }

    fn check_message(&self, message: &[FieldElement]) -> Result<(), LrcError> {
        if message.len() != self.profile.k() {
            return Err(LrcError::MessageLength {
                got: message.len(),
                expected: self.profile.k(),
            });
        }
        if let Some(bad) = message.iter().find(|m| !self.field.contains(**m)) {
            return Err(LrcError::MessageSymbol { value: bad.value() });
        }
        Ok(())
    }
}

impl ErasureCode for HierarchicalCode {
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

    fn points(&self) -> Option<&[FieldElement]> {
        Some(&self.eval_points)
    }

    fn designed_distance(&self) -> usize {
        self.designed_distance
    }
}

/// Evaluates the message polynomial over A.
pub fn encode_monomial(code: &HierarchicalCode, message: &[FieldElement]) -> Result<ShardSet, LrcError> {
    let c = code.message_polynomial(message)?;
    let values = code.eval_points.iter().map(|&x| c.eval(&code.field, x)).collect();
    Ok(ShardSet::from_codeword(Some(&code.eval_points), values))
}

/// Exponents zeroed by precoding at one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecodingStep {
    pub node: NodeIndex,
    /// Exponents present in the unprecoded combination, descending.
    pub support: Vec<usize>,
    /// Exponents forced to zero, descending.
    pub zeroed: Vec<usize>,
}

/// Basis of the code polynomials produced by the indicator-polynomial
/// assembly, with the precoding applied at each node.
#[derive(Debug, Clone)]
pub struct ConstructiveBasis {
    pub polys: Vec<Poly>,
    pub steps: Vec<PrecodingStep>,
}

/// Assembles c(X) from the leaves up: leaf message polynomials of degree
/// `< r_h`, combined through the indicator polynomials of each level, with
/// the highest exponents zeroed so each level-i node keeps dimension `r_i`
/// and the root keeps `k`.
pub fn constructive_basis(code: &HierarchicalCode) -> Result<ConstructiveBasis, LrcError> {
    let f = code.field.as_ref();
    let tree: &CosetTree = &code.tree;
    let h = tree.h();
    let profile = &code.profile;

    // Leaves: u_t(X) = Σ_{e < r_h} u_{t,e} X^e, one basis polynomial per coefficient.
    let leaf_basis: Vec<Poly> = (0..profile.r_at(h))
        .map(|e| Poly::monomial(FieldElement::ONE, e))
        .collect();
    let mut current: Vec<Vec<Poly>> = vec![leaf_basis; tree.nodes(h).len()];
    let mut steps = Vec::new();

    for level in (1..=h).rev() {
        let indicators: Vec<Poly> = (0..tree.nodes(level).len())
            .map(|pos| indicator_at(tree, level, pos))
            .collect::<Result<_, _>>()?;
        let parents = tree.nodes(level - 1).len();
        let target = if level == 1 { profile.k() } else { profile.r_at(level - 1) };
        let mut next = Vec::with_capacity(parents);
        for parent in 0..parents {
            let combined: Vec<Poly> = tree
                .child_positions(level - 1, parent)
                .flat_map(|child| {
                    let e = &indicators[child];
                    current[child].iter().map(move |b| b.mul(f, e))
                })
                .collect();
            let node = tree.nodes(level - 1)[parent].index().clone();
            let (basis, step) = precode(f, &combined, target, node)?;
            steps.push(step);
            next.push(basis);
        }
        current = next;
    }
    Ok(ConstructiveBasis {
        polys: current.pop().expect("root"),
        steps,
    })
}

/// Restricts span(`combined`) to the subspace whose coefficients vanish on
/// the highest `|support| − target` exponents.
fn precode(
    f: &Field,
    combined: &[Poly],
    target: usize,
    node: NodeIndex,
) -> Result<(Vec<Poly>, PrecodingStep), LrcError> {
    let mut support: Vec<usize> = combined.iter().flat_map(Poly::support).collect();
    support.sort_unstable_by(|a, b| b.cmp(a));
    support.dedup();
    if support.len() < target {
        return Err(LrcError::InsufficientMonomials {
            level: node.level,
            wanted: target,
            available: support.len(),
        });
    }
    let zeroed = support[..support.len() - target].to_vec();
    let constraints = Matrix::from_rows(
        zeroed
            .iter()
            .map(|&z| combined.iter().map(|p| p.coeff(z)).collect())
            .collect(),
    );
    let free = if zeroed.is_empty() {
        (0..combined.len())
            .map(|i| {
                let mut v = vec![FieldElement::ZERO; combined.len()];
                v[i] = FieldElement::ONE;
                v
            })
            .collect()
    } else {
        // An empty constraint matrix has no columns; handled above.
        let mut c = constraints;
        if c.cols() == 0 {
            c = Matrix::zeros(zeroed.len(), combined.len());
        }
        c.nullspace(f)
    };
    let basis: Vec<Poly> = free
        .iter()
        .map(|coef| {
            combined
                .iter()
                .zip(coef)
                .fold(Poly::zero(), |acc, (p, &c)| acc.add(f, &p.scale(f, c)))
        })
        .collect();
    let dim = Matrix::from_rows(
        basis
            .iter()
            .map(|p| (0..=support[0]).map(|e| p.coeff(e)).collect())
            .collect(),
    )
    .rank(f);
    if dim != target || basis.len() != target {
        return Err(LrcError::Precoding {
            node,
            got: dim,
            expected: target,
        });
    }
    Ok((
        basis,
        PrecodingStep {
            node,
            support,
            zeroed,
        },
    ))
}

/// Generator whose rows evaluate the constructive basis over A.
pub fn constructive_generator(code: &HierarchicalCode) -> Result<Matrix, LrcError> {
    let basis = constructive_basis(code)?;
    Ok(Matrix::from_rows(
        basis
            .polys
            .iter()
            .map(|p| code.eval_points.iter().map(|&x| p.eval(&code.field, x)).collect())
            .collect(),
    ))
}

/// Encodes `message` as coordinates in the constructive basis.
pub fn encode_constructive(code: &HierarchicalCode, message: &[FieldElement]) -> Result<ShardSet, LrcError> {
    code.check_message(message)?;
    let basis = constructive_basis(code)?;
    let f = code.field.as_ref();
    let c = basis
        .polys
        .iter()
        .zip(message)
        .fold(Poly::zero(), |acc, (p, &m)| acc.add(f, &p.scale(f, m)));
    let values = code.eval_points.iter().map(|&x| c.eval(f, x)).collect();
    Ok(ShardSet::from_codeword(Some(&code.eval_points), values))
}

/// Outcome of the indicator-polynomial property sweep.
#[derive(Debug, Clone, Default)]
pub struct IndicatorReport {
    pub nodes_checked: usize,
    pub points_checked: usize,
    pub violations: Vec<String>,
}

impl IndicatorReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every node of `tree` (levels 1..=h):
/// - the annihilator equals Π_{θ ∈ coset}(X − θ);
/// - E is a polynomial in X^{n_i} of degree (siblings)·n_i;
/// - E is 1 on its coset and 0 on every sibling coset;
/// - the product of the sibling annihilators divides E;
/// - E_s·E_t ≡ 0 and E² ≡ E modulo the parent annihilator (the product of
///   all child annihilators; equal to X^{n_{i−1}} − γ^{n_{i−1}} when no
///   branch was dropped);
/// - Σ_siblings E ≡ 1 modulo the same, and pointwise on the parent's points.
pub fn indicator_audit(tree: &CosetTree) -> IndicatorReport {
    let f = tree.field();
    let mut report = IndicatorReport::default();
    let fail = |report: &mut IndicatorReport, msg: String| report.violations.push(msg);

    for level in 1..=tree.h() {
        let ni = tree.n_at(level);
        let nodes = tree.nodes(level);
        for parent in 0..tree.nodes(level - 1).len() {
            let children: Vec<usize> = tree.child_positions(level - 1, parent).collect();
            let mut indicators = Vec::with_capacity(children.len());
            for &c in &children {
                match indicator_at(tree, level, c) {
                    Ok(e) => indicators.push(e),
                    Err(e) => {
                        fail(&mut report, format!("{:?}: {e}", nodes[c].index()));
                        return report;
                    }
                }
            }
            let annihilators: Vec<Poly> = children
                .iter()
                .map(|&c| annihilator(tree, nodes[c].index()).expect("node exists"))
                .collect();
            let parent_mod = annihilators.iter().fold(Poly::one(), |acc, a| acc.mul(f, a));
            if children.len() == tree.mu_at(level) {
                let pnode = &tree.nodes(level - 1)[parent];
                let n_prev = tree.n_at(level - 1);
                let closed = Poly::monomial(FieldElement::ONE, n_prev)
                    .sub(f, &Poly::constant(f.pow(pnode.gamma(), n_prev as u64)));
                if closed != parent_mod {
                    fail(&mut report, format!("{:?}: child annihilators do not multiply to the parent's", pnode.index()));
                }
            }

            for (a, &c) in children.iter().enumerate() {
                let node = &nodes[c];
                let e = &indicators[a];
                report.nodes_checked += 1;

                if annihilators[a] != Poly::from_roots(f, node.members()) {
                    fail(&mut report, format!("{:?}: annihilator differs from root product", node.index()));
                }

                let expected_deg = (children.len() - 1) * ni;
                let terms = e.support();
                if e.degree() != Some(expected_deg) || terms.iter().any(|t| t % ni != 0) || terms.len() > children.len() {
                    fail(&mut report, format!("{:?}: support {terms:?} is not a degree-{expected_deg} polynomial in X^{ni}", node.index()));
                }

                for (b, &s) in children.iter().enumerate() {
                    let want = if b == a { FieldElement::ONE } else { FieldElement::ZERO };
                    for &theta in nodes[s].members() {
                        report.points_checked += 1;
                        if e.eval(f, theta) != want {
                            fail(&mut report, format!("{:?}: E({theta}) != {want}", node.index()));
                        }
                    }
                }

                let q = annihilators
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| b != a)
                    .fold(Poly::one(), |acc, (_, p)| acc.mul(f, p));
                if !e.rem(f, &q).is_zero() {
                    fail(&mut report, format!("{:?}: sibling annihilators do not divide E", node.index()));
                }

                if e.mul(f, e).rem(f, &parent_mod) != e.rem(f, &parent_mod) {
                    fail(&mut report, format!("{:?}: E² ≢ E", node.index()));
                }
                for (b, other) in indicators.iter().enumerate().skip(a + 1) {
                    if !e.mul(f, other).rem(f, &parent_mod).is_zero() {
                        fail(&mut report, format!("{:?}·{:?}: product not ≡ 0", node.index(), nodes[children[b]].index()));
                    }
                }
            }

            let sum = indicators.iter().fold(Poly::zero(), |acc, e| acc.add(f, e));
            if sum.rem(f, &parent_mod) != Poly::one().rem(f, &parent_mod) {
                fail(&mut report, format!("level {level}, parent {parent}: indicators do not sum to 1"));
            }
            for &c in &children {
                for &theta in nodes[c].members() {
                    let total = indicators
                        .iter()
                        .fold(FieldElement::ZERO, |acc, e| f.add(acc, e.eval(f, theta)));
                    report.points_checked += 1;
                    if total != FieldElement::ONE {
                        fail(&mut report, format!("level {level}: Σ E({theta}) = {total}"));
                    }
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset_tree::LevelSpec;
    use crate::gf::FieldConfig;

    fn field(p: u64, m: u32) -> Arc<Field> {
        Arc::new(make_field(p, m, &FieldConfig::default()).unwrap())
    }

    fn profile(n: usize, k: usize, lv: &[(usize, usize)]) -> HierarchyProfile {
        HierarchyProfile::new(n, k, lv.iter().map(|&(n_i, r_i)| LevelSpec { n_i, r_i }).collect()).unwrap()
    }

    fn e(v: u32) -> FieldElement {
        FieldElement::new(v)
    }

    fn idx(tree: &CosetTree, level: usize, path: &[usize]) -> NodeIndex {
        tree.node_at(level, path).unwrap().index().clone()
    }

    /// Independent Trunc recursion over explicit sets.
    fn exp_oracle(n: usize, k: usize, lv: &[(usize, usize)]) -> Vec<Vec<usize>> {
        use std::collections::BTreeSet;
        let h = lv.len();
        let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); h + 1];
        sets[h] = (0..lv[h - 1].1).collect();
        for i in (0..h).rev() {
            let (stride, copies, keep) = if i == 0 {
                (lv[0].0, n / lv[0].0, k)
            } else {
                (lv[i].0, lv[i - 1].0 / lv[i].0, lv[i - 1].1)
            };
            let all: BTreeSet<usize> = (0..copies).flat_map(|j| sets[i + 1].iter().map(move |x| j * stride + x)).collect();
            sets[i] = all.into_iter().take(keep).collect();
        }
        sets.into_iter().map(|s| s.into_iter().rev().collect()).collect()
    }

    #[test]
    fn exponent_sets_worked_example() {
        let exp = exponent_sets(&profile(24, 14, &[(12, 8), (4, 3)])).unwrap();
        assert_eq!(exp.level(2), &[2, 1, 0]);
        assert_eq!(exp.level(1), &[9, 8, 6, 5, 4, 2, 1, 0]);
        assert_eq!(exp.code(), &[18, 17, 16, 14, 13, 12, 9, 8, 6, 5, 4, 2, 1, 0]);
    }

    #[test]
    fn exponent_sets_match_oracle() {
        let cases: &[(usize, usize, &[(usize, usize)])] = &[
            (12, 5, &[(6, 4), (3, 2)]),
            (16, 5, &[(8, 3), (4, 2), (2, 1)]),
            (24, 14, &[(12, 8), (4, 3)]),
            (24, 16, &[(12, 8), (4, 3)]),
            (12, 6, &[(4, 2)]),
        ];
        for &(n, k, lv) in cases {
            let exp = exponent_sets(&profile(n, k, lv)).unwrap();
            let oracle = exp_oracle(n, k, lv);
            assert_eq!(exp.code(), &oracle[0][..]);
            for i in 1..=lv.len() {
                assert_eq!(exp.level(i), &oracle[i][..]);
            }
        }
        let exp = exponent_sets(&profile(12, 5, &[(6, 4), (3, 2)])).unwrap();
        assert_eq!(exp.level(2), &[1, 0]);
        assert_eq!(exp.level(1), &[4, 3, 1, 0]);
        assert_eq!(exp.code(), &[6, 4, 3, 1, 0]);
        let exp = exponent_sets(&profile(16, 5, &[(8, 3), (4, 2), (2, 1)])).unwrap();
        assert_eq!(exp.code(), &[10, 8, 4, 2, 0]);
    }

    #[test]
    fn untruncated_profile_keeps_full_union() {
        // k = μ̄_1 r_1 and r_1 = μ_2 r_2
        let exp = exponent_sets(&profile(12, 8, &[(6, 4), (3, 2)])).unwrap();
        assert_eq!(exp.code(), &[10, 9, 7, 6, 4, 3, 1, 0]);
    }

    #[test]
    fn annihilator_examples() {
        let t13 = build_coset_tree(field(13, 1), &[6, 3]).unwrap();
        let a = annihilator(&t13, &idx(&t13, 1, &[1])).unwrap();
        assert_eq!(a, Poly::from_coeffs(vec![e(12), e(0), e(0), e(0), e(0), e(0), e(1)]));
        let node = idx(&t13, 2, &[1, 2]);
        let a = annihilator(&t13, &node).unwrap();
        // X^3 − 12
        assert_eq!(a.coeffs(), &[e(1), e(0), e(0), e(1)]);
        assert_eq!(a, Poly::from_roots(t13.field(), &[e(4), e(12), e(10)]));

        let f25 = field(5, 2);
        let t25 = build_coset_tree(f25.clone(), &[12, 4]).unwrap();
        let a = annihilator(&t25, &idx(&t25, 1, &[2])).unwrap();
        let want = Poly::monomial(FieldElement::ONE, 12).sub(&f25, &Poly::constant(f25.alpha_pow(12)));
        assert_eq!(a, want);
        for &theta in t25.node_at(1, &[2]).unwrap().members() {
            assert!(a.eval(&f25, theta).is_zero());
        }
        assert!(annihilator(&t25, &NodeIndex { level: 1, t: vec![1, 3, 0] }).is_err());
    }

    #[test]
    fn indicator_examples() {
        let t13 = build_coset_tree(field(13, 1), &[6, 3]).unwrap();
        let e1 = indicator_polynomial(&t13, &idx(&t13, 1, &[1])).unwrap();
        assert_eq!(e1, Poly::from_coeffs(vec![e(7), e(0), e(0), e(0), e(0), e(0), e(7)]));
        // oracle: evaluate on all of GF(13)*
        for x in 1..13 {
            let want = if [1, 4, 3, 12, 9, 10].contains(&x) { 1 } else { 0 };
            assert_eq!(e1.eval(t13.field(), e(x)), e(want));
        }

        let single = build_coset_tree(field(7, 1), &[6]).unwrap();
        assert_eq!(indicator_polynomial(&single, &idx(&single, 1, &[1])).unwrap(), Poly::one());

        let t25 = build_coset_tree(field(5, 2), &[12, 4]).unwrap();
        let e2 = indicator_polynomial(&t25, &idx(&t25, 2, &[1, 2])).unwrap();
        assert_eq!(e2.degree(), Some(8));
        assert!(e2.support().iter().all(|s| [0, 4, 8].contains(s)));
        assert!(indicator_polynomial(&t25, &idx(&t25, 0, &[])).is_err());
    }

    #[test]
    fn indicator_audit_clean_on_full_trees() {
        for (p, m, lengths) in [(13, 1, vec![6, 3]), (5, 2, vec![12, 4]), (17, 1, vec![8, 4, 2])] {
            let tree = build_coset_tree(field(p, m), &lengths).unwrap();
            let report = indicator_audit(&tree);
            assert!(report.passed(), "{:?}", report.violations);
            assert!(report.nodes_checked > 0);
        }
    }

    #[test]
    fn indicator_audit_on_relevant_tree() {
        let tree = build_coset_tree(field(17, 1), &[4, 2]).unwrap().relevant_subtree(12).unwrap();
        let report = indicator_audit(&tree);
        assert!(report.passed(), "{:?}", report.violations);
    }

    #[test]
    fn build_code_designed_distances() {
        let c25 = build_code(field(5, 2), &profile(24, 14, &[(12, 8), (4, 3)])).unwrap();
        assert_eq!(c25.designed_distance(), 6);
        assert_eq!(c25.generator().rank(&c25.field), 14);
        let c13 = build_code(field(13, 1), &profile(12, 5, &[(6, 4), (3, 2)])).unwrap();
        assert_eq!(c13.designed_distance(), 6);
        let c17 = build_code(field(17, 1), &profile(16, 5, &[(8, 3), (4, 2), (2, 1)])).unwrap();
        assert_eq!(c17.designed_distance(), 6);
        assert_eq!(c17.locality().levels(), &[(3, 4), (2, 2), (1, 2)]);
        assert_eq!(c25.locality().levels(), &[(8, 3), (3, 2)]);
        assert!(matches!(
            build_code(field(7, 1), &profile(12, 5, &[(6, 4), (3, 2)])),
            Err(LrcError::Tree(_))
        ));
    }

    #[test]
    fn design_picks_smallest_field() {
        let code = design_code(&profile(24, 14, &[(12, 8), (4, 3)]), &FieldConfig::default()).unwrap();
        assert_eq!((code.field().p(), code.field().m()), (5, 2));
    }

    #[test]
    fn encode_monomial_examples() {
        let code = build_code(field(13, 1), &profile(12, 5, &[(6, 4), (3, 2)])).unwrap();
        let zero = encode_monomial(&code, &[e(0); 5]).unwrap();
        assert!(zero.values().iter().all(|v| *v == Some(FieldElement::ZERO)));
        let ones = encode_monomial(&code, &[e(1), e(0), e(0), e(0), e(0)]).unwrap();
        assert!(ones.values().iter().all(|v| *v == Some(FieldElement::ONE)));
        let word = encode_monomial(&code, &[e(1), e(0), e(0), e(0), e(1)]).unwrap();
        let f = code.field();
        let mut weight = 0;
        for (shard, &theta) in word.entries().iter().zip(code.eval_points()) {
            let v = shard.value.unwrap();
            assert_eq!(v, f.add(FieldElement::ONE, f.pow(theta, 6)));
            if !v.is_zero() {
                weight += 1;
            }
        }
        assert_eq!(weight, 6);
        // the generator gives the same codeword
        let via_g = code.generator().left_mul(f, &[e(1), e(0), e(0), e(0), e(1)]);
        assert_eq!(word.values(), via_g.into_iter().map(Some).collect::<Vec<_>>());
        assert!(matches!(encode_monomial(&code, &[e(1)]), Err(LrcError::MessageLength { .. })));
        assert!(matches!(
            encode_monomial(&code, &[e(13), e(0), e(0), e(0), e(0)]),
            Err(LrcError::MessageSymbol { .. })
        ));
    }

    #[test]
    fn constructive_matches_monomial_row_space() {
        for (p, m, n, k, lv) in [
            (13u64, 1u32, 12usize, 5usize, vec![(6usize, 4usize), (3, 2)]),
            (5, 2, 24, 14, vec![(12, 8), (4, 3)]),
            (17, 1, 16, 5, vec![(8, 3), (4, 2), (2, 1)]),
            (17, 1, 12, 5, vec![(4, 2), (2, 1)]),
        ] {
            let code = build_code(field(p, m), &profile(n, k, &lv)).unwrap();
            let g = constructive_generator(&code).unwrap();
            let f = code.field();
            assert_eq!(g.rank(f), k);
            assert_eq!(g.row_space_basis(f), code.generator().row_space_basis(f));
        }
    }

    #[test]
    fn constructive_zeroes_expected_exponents() {
        let code = build_code(field(5, 2), &profile(24, 14, &[(12, 8), (4, 3)])).unwrap();
        let basis = constructive_basis(&code).unwrap();
        let level1: Vec<_> = basis.steps.iter().filter(|s| s.node.level == 1).collect();
        assert_eq!(level1.len(), 2);
        for s in level1 {
            assert_eq!(s.zeroed, vec![10]);
            assert_eq!(s.support.len(), 9);
        }
        let root = basis.steps.iter().find(|s| s.node.level == 0).unwrap();
        assert_eq!(root.zeroed, vec![21, 20]);
        assert_eq!(root.support.len(), 16);
        let mut exps: Vec<usize> = basis.polys.iter().flat_map(Poly::support).collect();
        exps.sort_unstable();
        exps.dedup();
        assert_eq!(exps, code.exp().ascending());
    }

    #[test]
    fn encode_constructive_lies_in_code() {
        let code = build_code(field(13, 1), &profile(12, 5, &[(6, 4), (3, 2)])).unwrap();
        let zero = encode_constructive(&code, &[e(0); 5]).unwrap();
        assert!(zero.values().iter().all(|v| *v == Some(FieldElement::ZERO)));
        let f = code.field();
        let word = encode_constructive(&code, &[e(3), e(1), e(4), e(1), e(5)]).unwrap();
        let values: Vec<FieldElement> = word.values().into_iter().map(Option::unwrap).collect();
        let mut rows = code.generator().row_vecs();
        rows.push(values);
        assert_eq!(Matrix::from_rows(rows).rank(f), 5);
        assert!(encode_constructive(&code, &[e(0); 4]).is_err());
    }
}
