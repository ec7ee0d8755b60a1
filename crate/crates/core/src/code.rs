//! What the analysis and repair layers need to know about a concrete code.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Field, FieldElement};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupingError {
    #[error("grouping has no levels")]
    Empty,
    #[error("column {column} is out of range for a length-{n} code")]
    OutOfRange { column: usize, n: usize },
    #[error("column {column} appears in two groups at level {level}")]
    Overlap { level: usize, column: usize },
    #[error("a level-{level} group is not contained in any single level-{parent} group")]
    NotNested { level: usize, parent: usize },
    #[error("invalid locality parameters: {0}")]
    Params(String),
}

/// Nested column groups: `levels[0]` holds the level-1 (outermost) groups,
/// `levels[h-1]` the level-h local groups. Groups are sorted column lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grouping {
    levels: Vec<Vec<Vec<usize>>>,
}

impl Grouping {
    pub fn new(n: usize, mut levels: Vec<Vec<Vec<usize>>>) -> Result<Self, GroupingError> {
        if levels.is_empty() {
            return Err(GroupingError::Empty);
        }
        for (li, groups) in levels.iter_mut().enumerate() {
            let mut seen = vec![false; n];
            for g in groups.iter_mut() {
                g.sort_unstable();
                for &c in g.iter() {
                    if c >= n {
                        return Err(GroupingError::OutOfRange { column: c, n });
                    }
                    if std::mem::replace(&mut seen[c], true) {
                        return Err(GroupingError::Overlap {
                            level: li + 1,
                            column: c,
                        });
                    }
                }
            }
        }
        for li in 1..levels.len() {
            for g in &levels[li] {
                let nested = levels[li - 1]
                    .iter()
                    .any(|p| g.iter().all(|c| p.binary_search(c).is_ok()));
                if !nested {
                    return Err(GroupingError::NotNested {
                        level: li + 1,
                        parent: li,
                    });
                }
            }
        }
        Ok(Grouping { levels })
    }

    /// A single level whose only group is every column.
    pub fn whole(n: usize) -> Self {
        Grouping {
            levels: vec![vec![(0..n).collect()]],
        }
    }

    /// Number of levels h.
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Groups at `level` (1-based).
    pub fn groups(&self, level: usize) -> &[Vec<usize>] {
        &self.levels[level - 1]
    }

    pub fn levels(&self) -> &[Vec<Vec<usize>>] {
        &self.levels
    }

    /// The level-`level` group containing `column`, if any.
    pub fn group_of(&self, level: usize, column: usize) -> Option<&[usize]> {
        self.levels[level - 1]
            .iter()
            .find(|g| g.binary_search(&column).is_ok())
            .map(Vec::as_slice)
    }

    /// Level-`level` groups inside `parent` (or all of them when `parent` is `None`).
    pub fn children_within<'a>(
        &'a self,
        level: usize,
        parent: Option<&'a [usize]>,
    ) -> impl Iterator<Item = &'a [usize]> + 'a {
        self.levels[level - 1]
            .iter()
            .map(Vec::as_slice)
            .filter(move |g| parent.is_none_or(|p| g.iter().all(|c| p.binary_search(c).is_ok())))
    }
}

/// `[(r_1, δ_1), …, (r_h, δ_h)]`, level 1 outermost.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityParams {
    levels: Vec<(usize, usize)>,
}

impl LocalityParams {
    /// Requires `r_1 ≥ … ≥ r_h ≥ 1` and `δ_1 ≥ … ≥ δ_h ≥ 2`.
    pub fn new(levels: Vec<(usize, usize)>) -> Result<Self, GroupingError> {
        if levels.is_empty() {
            return Err(GroupingError::Params("at least one level is required".into()));
        }
        if levels.iter().any(|&(r, d)| r == 0 || d < 2) {
            return Err(GroupingError::Params("need r_i ≥ 1 and δ_i ≥ 2".into()));
        }
        for w in levels.windows(2) {
            if w[0].0 < w[1].0 || w[0].1 < w[1].1 {
                return Err(GroupingError::Params(format!(
                    "{:?} must dominate {:?} componentwise",
                    w[0], w[1]
                )));
            }
        }
        Ok(LocalityParams { levels })
    }

    pub fn h(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[(usize, usize)] {
        &self.levels
    }

    /// r_ℓ, 1-based.
    pub fn r(&self, level: usize) -> usize {
        self.levels[level - 1].0
    }

    /// δ_ℓ, 1-based.
    pub fn delta(&self, level: usize) -> usize {
        self.levels[level - 1].1
    }
}

/// A linear code with a nested locality structure.
pub trait ErasureCode {
    fn field(&self) -> &Field;

    /// k × n generator; codewords are `message · G`.
    fn generator(&self) -> &Matrix;

    fn grouping(&self) -> &Grouping;

    fn locality(&self) -> &LocalityParams;

    /// Evaluation point per column, when the code is an evaluation code.
    fn points(&self) -> Option<&[FieldElement]> {
        None
    }

    /// Columns that are promised local codes at every level.
    fn locality_scope(&self) -> Vec<usize> {
        (0..self.len()).collect()
    }

    /// Lower bound on minimum distance guaranteed by the construction.
    fn designed_distance(&self) -> usize;

    fn len(&self) -> usize {
        self.generator().cols()
    }

    fn dim(&self) -> usize {
        self.generator().rows()
    }

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping_validation() {
        let ok = Grouping::new(6, vec![vec![vec![0, 1, 2], vec![3, 4, 5]], vec![vec![1, 0], vec![2], vec![4, 5]]]).unwrap();
        assert_eq!(ok.group_of(2, 0), Some(&[0usize, 1][..]));
        assert_eq!(ok.group_of(2, 3), None);
        assert_eq!(ok.children_within(2, Some(&[0, 1, 2])).count(), 2);
        assert!(matches!(
            Grouping::new(6, vec![vec![vec![0, 1, 2], vec![2, 3]]]),
            Err(GroupingError::Overlap { .. })
        ));
        assert!(matches!(
            Grouping::new(6, vec![vec![vec![0, 1, 2], vec![3, 4, 5]], vec![vec![2, 3]]]),
            Err(GroupingError::NotNested { .. })
        ));
        assert!(matches!(
            Grouping::new(3, vec![vec![vec![0, 7]]]),
            Err(GroupingError::OutOfRange { .. })
        ));
        assert!(Grouping::new(3, vec![]).is_err());
    }

    #[test]
    fn locality_params_validation() {
        assert!(LocalityParams::new(vec![(8, 3), (3, 2)]).is_ok());
        assert!(LocalityParams::new(vec![(3, 3), (8, 2)]).is_err());
        assert!(LocalityParams::new(vec![(8, 2), (3, 3)]).is_err());
        assert!(LocalityParams::new(vec![(8, 1)]).is_err());
        assert!(LocalityParams::new(vec![]).is_err());
    }
}
