use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Witness;

/// Posets larger than this are rejected before down-set enumeration.
pub const MAX_POSET: usize = 16;

/// A finite partial order on named points, stored as a full relation matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poset {
    names: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Builds the reflexive-transitive closure of `pairs` (each `(i, j)` meaning
    /// `i ≤ j`) and checks antisymmetry.
    pub fn new(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(Error::Malformed(format!("pair ({i}, {j}) out of range for {n} elements")));
            }
            leq[i][j] = true;
        }
        // Warshall closure
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::from_relation(names, leq)
    }

    /// Takes a relation as given and checks reflexivity, antisymmetry and transitivity.
    pub fn from_relation(names: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self> {
        let n = names.len();
        if leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed(format!("relation must be {n}x{n}")));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::NotAPoset(Witness::new([i], format!("{} ≰ {}", names[i], names[i]))));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotAPoset(Witness::new(
                        [i, j],
                        format!("antisymmetry: {} ≤ {} ≤ {}", names[i], names[j], names[i]),
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !leq[i][j] {
                    continue;
                }
                for k in 0..n {
                    if leq[j][k] && !leq[i][k] {
                        return Err(Error::NotAPoset(Witness::new(
                            [i, j, k],
                            format!("transitivity: {} ≤ {} ≤ {}", names[i], names[j], names[k]),
                        )));
                    }
                }
            }
        }
        Ok(Poset { names, leq })
    }

    pub fn empty() -> Self {
        Poset { names: Vec::new(), leq: Vec::new() }
    }

    pub fn antichain(n: usize) -> Self {
        Self::new(default_names(n), &[]).expect("antichain is a poset")
    }

    /// `0 < 1 < … < n-1`.
    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(default_names(n), &pairs).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq[i][j]
    }

    /// Mask of points strictly or non-strictly below `i`.
    pub fn below_mask(&self, i: usize) -> u32 {
        (0..self.len()).filter(|&j| self.leq[j][i]).fold(0, |m, j| m | (1 << j))
    }

    pub fn is_down_closed(&self, mask: u32) -> bool {
        (0..self.len()).all(|i| mask & (1 << i) == 0 || self.below_mask(i) & !mask == 0)
    }

    /// All down-closed subsets as bitmasks, in increasing numeric order.
    pub fn downsets(&self) -> Result<Vec<u32>> {
        let n = self.len();
        if n > MAX_POSET {
            return Err(Error::SizeExceeded(format!("poset has {n} elements, limit is {MAX_POSET}")));
        }
        let below: Vec<u32> = (0..n).map(|i| self.below_mask(i)).collect();
        let limit: u64 = 1 << n;
        Ok((0..limit)
            .map(|m| m as u32)
            .filter(|&m| (0..n).all(|i| m & (1 << i) == 0 || below[i] & !m == 0))
            .collect())
    }

    /// A topological order: every element appears after everything below it.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| ((0..self.len()).filter(|&j| self.leq[j][i]).count(), i));
        order
    }

    /// Pairs `(i, j)` with `i < j` and nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if self.lt(i, j) && !(0..n).any(|k| self.lt(i, k) && self.lt(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Product order on pairs, indexed `i * other.len() + j`.
    pub fn product(&self, other: &Poset) -> Poset {
        let (n, m) = (self.len(), other.len());
        let names = (0..n * m)
            .map(|k| format!("({},{})", self.names[k / m], other.names[k % m]))
            .collect();
        let leq = (0..n * m)
            .map(|a| (0..n * m).map(|b| self.leq[a / m][b / m] && other.leq[a % m][b % m]).collect())
            .collect();
        Poset { names, leq }
    }

    /// The relation as a list of `(i, j)` pairs with `i ≤ j`, `i ≠ j`.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| self.lt(i, j)).collect()
    }
}

fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_and_antisymmetry() {
        let p = Poset::new(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (1, 2)]).unwrap();
        assert!(p.leq(0, 2));
        assert!(!p.leq(2, 0));
        let err = Poset::new(vec!["a".into(), "b".into()], &[(0, 1), (1, 0)]).unwrap_err();
        assert!(matches!(err, Error::NotAPoset(_)));
    }

    #[test]
    fn from_relation_rejects_intransitive() {
        let leq = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        let err = Poset::from_relation(vec!["a".into(), "b".into(), "c".into()], leq).unwrap_err();
        assert!(matches!(err, Error::NotAPoset(_)));
    }

    #[test]
    fn downset_counts() {
        assert_eq!(Poset::empty().downsets().unwrap(), vec![0]);
        assert_eq!(Poset::antichain(2).downsets().unwrap().len(), 4);
        assert_eq!(Poset::chain(3).downsets().unwrap().len(), 4);
        assert!(matches!(Poset::antichain(17).downsets(), Err(Error::SizeExceeded(_))));
    }

    #[test]
    fn covers_of_chain() {
        assert_eq!(Poset::chain(3).covers(), vec![(0, 1), (1, 2)]);
    }
}
