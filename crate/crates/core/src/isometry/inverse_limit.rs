use crate::error::{Error, Result};

/// A tower of finite sets `Y_1, ..., Y_d` (elements are indices) with maps
/// `Y_{i+1} -> Y_i`. Longer maps are composites; maps declared separately
/// with [`InverseSystem::declare`] are checked against the composites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseSystem {
    pub sizes: Vec<usize>,
    /// `maps[i][y]` is the image in level `i` of element `y` of level `i + 1`.
    pub maps: Vec<Vec<usize>>,
    declared: Vec<(usize, usize, Vec<usize>)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InverseLimitSolution {
    /// One element per level.
    pub thread: Vec<usize>,
    /// Number of threads reaching the deepest level.
    pub threads_at_depth: usize,
    /// Smallest image of the deepest level, over all levels: a finite-depth
    /// bound on the size of the limit.
    pub surviving_bound: usize,
    /// `max |Y_i|`, which bounds the limit size.
    pub level_bound: usize,
}

impl InverseSystem {
    pub fn new(sizes: Vec<usize>, maps: Vec<Vec<usize>>) -> Self {
        InverseSystem {
            sizes,
            maps,
            declared: Vec::new(),
        }
    }

    /// Identity maps on `depth` copies of a set of size `n`.
    pub fn constant(n: usize, depth: usize) -> Self {
        InverseSystem::new(
            vec![n; depth],
            vec![(0..n).collect(); depth.saturating_sub(1)],
        )
    }

    pub fn depth(&self) -> usize {
        self.sizes.len()
    }

    /// Declares a direct map from level `j` to level `i` (zero-based, `i <= j`).
    pub fn declare(&mut self, i: usize, j: usize, table: Vec<usize>) {
        self.declared.push((i, j, table));
    }

    /// `f_{i,j}(y)` for zero-based levels `i <= j`.
    pub fn project(&self, i: usize, j: usize, mut y: usize) -> usize {
        for level in (i..j).rev() {
            y = self.maps[level][y];
        }
        y
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::Incompatible("no levels".into()));
        }
        if let Some(i) = self.sizes.iter().position(|&s| s == 0) {
            return Err(Error::Incompatible(format!("level {} is empty", i + 1)));
        }
        if self.maps.len() + 1 != self.sizes.len() {
            return Err(Error::Incompatible(format!(
                "{} levels but {} maps",
                self.sizes.len(),
                self.maps.len()
            )));
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.len() != self.sizes[i + 1] {
                return Err(Error::Incompatible(format!(
                    "map into level {} has the wrong domain",
                    i + 1
                )));
            }
            if let Some(y) = m.iter().position(|&x| x >= self.sizes[i]) {
                return Err(Error::Incompatible(format!(
                    "map into level {} sends {y} out of range",
                    i + 1
                )));
            }
        }
        for (i, j, table) in &self.declared {
            if *i > *j || *j >= self.depth() || table.len() != self.sizes[*j] {
                return Err(Error::Incompatible(format!(
                    "declared map {}->{} is malformed",
                    j + 1,
                    i + 1
                )));
            }
            if let Some(y) = (0..self.sizes[*j]).find(|&y| table[y] != self.project(*i, *j, y)) {
                return Err(Error::Incompatible(format!(
                    "declared map {}->{} disagrees with the composite at {y}",
                    j + 1,
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Pigeonhole construction at finite depth: keep the threads reaching the
/// deepest level, pick the element of the first level hit by the most of
/// them, restrict to those, and continue one level down. Ties go to the
/// smallest index.
pub fn solve_inverse_limit(sys: &InverseSystem) -> Result<InverseLimitSolution> {
    sys.validate()?;
    let d = sys.depth();
    let mut alive: Vec<usize> = (0..sys.sizes[d - 1]).collect();
    let mut thread = Vec::with_capacity(d);
    for level in 0..d {
        let mut counts = vec![0usize; sys.sizes[level]];
        for &y in &alive {
            counts[sys.project(level, d - 1, y)] += 1;
        }
        let best = (0..counts.len())
            .max_by_key(|&x| (counts[x], std::cmp::Reverse(x)))
            .expect("level nonempty");
        alive.retain(|&y| sys.project(level, d - 1, y) == best);
        thread.push(best);
    }
    let images = (0..d).map(|level| {
        let mut seen = vec![false; sys.sizes[level]];
        for y in 0..sys.sizes[d - 1] {
            seen[sys.project(level, d - 1, y)] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    });
    Ok(InverseLimitSolution {
        thread,
        threads_at_depth: sys.sizes[d - 1],
        surviving_bound: images.min().unwrap_or(0),
        level_bound: *sys.sizes.iter().max().expect("levels nonempty"),
    })
}

/// Every compatible tuple in `Y_1 x ... x Y_d`, by exhaustive enumeration of
/// the product. `None` when the product exceeds `limit`.
pub fn brute_force_threads(sys: &InverseSystem, limit: u64) -> Option<Vec<Vec<usize>>> {
    let total = sys
        .sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))?;
    if total > limit {
        return None;
    }
    let d = sys.depth();
    let mut out = Vec::new();
    let mut tuple = vec![0usize; d];
    'outer: loop {
        if (0..d - 1).all(|i| sys.maps[i][tuple[i + 1]] == tuple[i]) {
            out.push(tuple.clone());
        }
        for i in (0..d).rev() {
            tuple[i] += 1;
            if tuple[i] < sys.sizes[i] {
                continue 'outer;
            }
            tuple[i] = 0;
        }
        break;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_singleton_system() {
        let s = solve_inverse_limit(&InverseSystem::constant(1, 5)).unwrap();
        assert_eq!(s.thread, vec![0; 5]);
        assert_eq!(s.level_bound, 1);
    }

    #[test]
    fn two_element_identity_system() {
        let s = solve_inverse_limit(&InverseSystem::constant(2, 4)).unwrap();
        assert!(s.thread == vec![0; 4] || s.thread == vec![1; 4]);
        assert_eq!(s.surviving_bound, 2);
        assert_eq!(s.level_bound, 2);
    }

    #[test]
    fn pigeonhole_prefers_heavier_fibre() {
        // Level 1 = {0, 1}; three of the four deepest elements sit over 1.
        let sys = InverseSystem::new(vec![2, 2, 4], vec![vec![0, 1], vec![0, 1, 1, 1]]);
        let s = solve_inverse_limit(&sys).unwrap();
        assert_eq!(s.thread, vec![1, 1, 1]);
        assert_eq!(brute_force_threads(&sys, 100).unwrap().len(), 4);
    }

    #[test]
    fn malformed_systems_rejected() {
        let bad = InverseSystem::new(vec![2, 2], vec![vec![0, 2]]);
        assert!(matches!(
            solve_inverse_limit(&bad),
            Err(Error::Incompatible(_))
        ));
        let empty = InverseSystem::new(vec![2, 0], vec![vec![]]);
        assert!(matches!(
            solve_inverse_limit(&empty),
            Err(Error::Incompatible(_))
        ));
        let mut declared = InverseSystem::new(vec![2, 2, 2], vec![vec![1, 0], vec![1, 0]]);
        declared.declare(0, 2, vec![1, 0]);
        assert!(matches!(declared.validate(), Err(Error::Incompatible(_))));
        let mut ok = InverseSystem::new(vec![2, 2, 2], vec![vec![1, 0], vec![1, 0]]);
        ok.declare(0, 2, vec![0, 1]);
        ok.validate().unwrap();
    }
}
