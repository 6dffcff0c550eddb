//! Relations and correspondences between two finite spaces.
//!
//! Pairs are kept as a sorted, deduplicated list together with per-side
//! coverage counts, so "can this pair be removed" is an O(1) query.

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

/// Caps on the size of an index grid `n_x × n_y` handed to the enumerator or the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridCap {
    pub max_pairs: usize,
    pub max_side: usize,
}

impl Default for GridCap {
    /// Grids up to 8×8.
    fn default() -> Self {
        GridCap { max_pairs: 64, max_side: 8 }
    }
}

impl GridCap {
    pub fn check(&self, n_x: usize, n_y: usize) -> Result<()> {
        let pairs = n_x.saturating_mul(n_y);
        if n_x == 0 || n_y == 0 {
            return Err(Error::EmptySpace);
        }
        if pairs > self.max_pairs || n_x > self.max_side || n_y > self.max_side {
            return Err(Error::CapExceeded { n_x, n_y, cap: self.max_pairs });
        }
        Ok(())
    }
}

/// A nonempty set of index pairs `(i, j)` with `i < n_x`, `j < n_y`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n_x: usize,
    n_y: usize,
    pairs: Vec<(usize, usize)>,
    cover_x: Vec<u32>,
    cover_y: Vec<u32>,
}

impl Relation {
    pub fn new(n_x: usize, n_y: usize, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyRelation);
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut cover_x = vec![0u32; n_x];
        let mut cover_y = vec![0u32; n_y];
        for &(i, j) in &pairs {
            if i >= n_x || j >= n_y {
                return Err(Error::IndexOutOfRange(i, j));
            }
            cover_x[i] += 1;
            cover_y[j] += 1;
        }
        Ok(Relation { n_x, n_y, pairs, cover_x, cover_y })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.n_x, self.n_y)
    }

    pub fn is_correspondence(&self) -> bool {
        self.cover_x.iter().all(|&c| c > 0) && self.cover_y.iter().all(|&c| c > 0)
    }

    /// Whether `(i, j)` can be dropped while the relation stays a correspondence.
    pub fn is_removable(&self, i: usize, j: usize) -> bool {
        self.cover_x[i] > 1 && self.cover_y[j] > 1
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        self.pairs.binary_search(&pair).is_ok()
    }

    /// Sup over pairs of pairs of `| |xx'| - |yy'| |`.
    pub fn distortion(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
        self.check_spaces(x, y)?;
        Ok(distortion_of_pairs(&self.pairs, x, y, f64::INFINITY))
    }

    /// Like [`distortion`](Self::distortion) but stops as soon as the running
    /// maximum exceeds `ceiling`; the returned value is then some number above
    /// `ceiling`, not necessarily the full distortion.
    pub fn distortion_capped(
        &self,
        x: &FiniteMetricSpace,
        y: &FiniteMetricSpace,
        ceiling: f64,
    ) -> Result<f64> {
        self.check_spaces(x, y)?;
        Ok(distortion_of_pairs(&self.pairs, x, y, ceiling))
    }

    fn check_spaces(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<()> {
        if x.len() != self.n_x || y.len() != self.n_y {
            let &(i, j) = self.pairs.last().expect("nonempty");
            if i >= x.len() || j >= y.len() {
                return Err(Error::IndexOutOfRange(i, j));
            }
            return Err(Error::SizeMismatch(self.n_x * self.n_y, x.len() * y.len()));
        }
        Ok(())
    }
}

pub(crate) fn distortion_of_pairs(
    pairs: &[(usize, usize)],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    ceiling: f64,
) -> f64 {
    let mut best = 0.0f64;
    for (k, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[k + 1..] {
            let v = (x.d(i, i2) - y.d(j, j2)).abs();
            if v > best {
                best = v;
                if best > ceiling {
                    return best;
                }
            }
        }
    }
    best
}

/// A relation whose projections onto both spaces are surjective.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Correspondence(Relation);

impl Correspondence {
    pub fn new(n_x: usize, n_y: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        Self::try_from(Relation::new(n_x, n_y, pairs)?)
    }

    /// Every pair of `X × Y`.
    pub fn full(n_x: usize, n_y: usize) -> Result<Self> {
        let pairs = (0..n_x).flat_map(|i| (0..n_y).map(move |j| (i, j))).collect();
        Self::new(n_x, n_y, pairs)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(n, n, (0..n).map(|i| (i, i)).collect())
    }

    pub fn relation(&self) -> &Relation {
        &self.0
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        self.0.pairs()
    }

    pub fn sizes(&self) -> (usize, usize) {
        self.0.sizes()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn distortion(&self, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
        self.0.distortion(x, y)
    }

    /// No pair can be removed without losing surjectivity.
    pub fn is_minimal(&self) -> bool {
        self.pairs().iter().all(|&(i, j)| !self.0.is_removable(i, j))
    }

    /// The correspondence read in the opposite direction.
    pub fn transpose(&self) -> Correspondence {
        let (n_x, n_y) = self.sizes();
        let pairs = self.pairs().iter().map(|&(i, j)| (j, i)).collect();
        Correspondence::new(n_y, n_x, pairs).expect("transpose of a correspondence")
    }

    /// Cartesian product, indexed to match [`FiniteMetricSpace::l1_product`]:
    /// `(a1, b1) -> a1 * |B1| + b1` and `(a2, b2) -> a2 * |B2| + b2`.
    pub fn product(&self, other: &Correspondence) -> Result<Correspondence> {
        self.product_capped(other, crate::metric::DEFAULT_MAX_POINTS)
    }

    pub fn product_capped(&self, other: &Correspondence, cap: usize) -> Result<Correspondence> {
        let (na1, na2) = self.sizes();
        let (nb1, nb2) = other.sizes();
        let n_x = na1 * nb1;
        let n_y = na2 * nb2;
        if n_x > cap || n_y > cap {
            return Err(Error::SizeOverflow { size: n_x.max(n_y), cap });
        }
        let mut pairs = Vec::with_capacity(self.len() * other.len());
        for &(a1, a2) in self.pairs() {
            for &(b1, b2) in other.pairs() {
                pairs.push((a1 * nb1 + b1, a2 * nb2 + b2));
            }
        }
        Correspondence::new(n_x, n_y, pairs)
    }
}

impl TryFrom<Relation> for Correspondence {
    type Error = Error;

    fn try_from(rel: Relation) -> Result<Self> {
        if let Some(i) = rel.cover_x.iter().position(|&c| c == 0) {
            return Err(Error::NotACorrespondence { side: 'X', index: i });
        }
        if let Some(j) = rel.cover_y.iter().position(|&c| c == 0) {
            return Err(Error::NotACorrespondence { side: 'Y', index: j });
        }
        Ok(Correspondence(rel))
    }
}

/// Hausdorff distance between the index subsets `a` and `b` of `z`.
pub fn hausdorff_distance(a: &[usize], b: &[usize], z: &FiniteMetricSpace) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySubset);
    }
    if let Some(&bad) = a.iter().chain(b).find(|&&i| i >= z.len()) {
        return Err(Error::IndexOutOfRange(bad, bad));
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&i| to.iter().map(|&j| z.d(i, j)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Lazily enumerates the minimal correspondences between an `n_x`-point
/// and an `n_y`-point space.
///
/// A correspondence is minimal iff every pair `(i, j)` has `i` or `j` of
/// degree one. Equivalently, each `i` maps to a nonempty set `S_i`, and
/// whenever `|S_i| > 1` its members are used by no other `i`.
///
/// Order: lexicographic on the sorted pair list. Within one `i` this puts a
/// set before its proper prefixes, e.g. `{0,1} < {0} < {1}`.
pub fn enumerate_minimal_correspondences(
    n_x: usize,
    n_y: usize,
    cap: GridCap,
) -> Result<MinimalCorrespondences> {
    cap.check(n_x, n_y)?;
    Ok(MinimalCorrespondences::new(n_x, n_y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Choice {
    mask: u64,
}

/// Iterator returned by [`enumerate_minimal_correspondences`].
#[derive(Debug)]
pub struct MinimalCorrespondences {
    n_x: usize,
    n_y: usize,
    // per level, the ordered list of admissible sets and the cursor into it
    stack: Vec<(Vec<Choice>, usize)>,
    cover: Vec<u32>,
    exclusive: u64,
    started: bool,
}

impl MinimalCorrespondences {
    fn new(n_x: usize, n_y: usize) -> Self {
        MinimalCorrespondences {
            n_x,
            n_y,
            stack: Vec::with_capacity(n_x),
            cover: vec![0; n_y],
            exclusive: 0,
            started: false,
        }
    }

    fn uncovered(&self) -> u64 {
        (0..self.n_y).filter(|&j| self.cover[j] == 0).fold(0, |m, j| m | (1 << j))
    }

    fn choices(&self, level: usize) -> Vec<Choice> {
        let uncovered = self.uncovered();
        let available: Vec<usize> =
            (0..self.n_y).filter(|&j| self.exclusive & (1 << j) == 0).collect();
        let mut out = Vec::new();
        if level + 1 == self.n_x {
            // last point must cover everything still uncovered
            match uncovered.count_ones() {
                0 => out.extend(available.iter().map(|&j| Choice { mask: 1 << j })),
                _ => out.push(Choice { mask: uncovered }),
            }
            return out;
        }
        let unc: Vec<usize> = (0..self.n_y).filter(|&j| uncovered & (1 << j) != 0).collect();
        for &c in &available {
            if uncovered & (1 << c) != 0 {
                let pos = unc.binary_search(&c).expect("uncovered");
                extend_sets(&unc, pos + 1, 1 << c, &mut out);
            }
            out.push(Choice { mask: 1 << c });
        }
        out
    }

    fn apply(&mut self, choice: Choice, sign: i32) {
        let multi = choice.mask.count_ones() > 1;
        for j in 0..self.n_y {
            if choice.mask & (1 << j) != 0 {
                self.cover[j] = (self.cover[j] as i32 + sign) as u32;
            }
        }
        if multi {
            self.exclusive ^= choice.mask;
        }
    }

    fn current(&self) -> Correspondence {
        let mut pairs = Vec::new();
        for (i, (choices, cursor)) in self.stack.iter().enumerate() {
            let mask = choices[*cursor].mask;
            pairs.extend((0..self.n_y).filter(|&j| mask & (1 << j) != 0).map(|j| (i, j)));
        }
        Correspondence::new(self.n_x, self.n_y, pairs).expect("enumerated a correspondence")
    }

    /// Descends from the current stack depth taking the first admissible
    /// choice at each level; backtracks on dead ends. Returns false when exhausted.
    fn descend(&mut self) -> bool {
        loop {
            if self.stack.len() == self.n_x {
                return true;
            }
            let level = self.stack.len();
            let choices = self.choices(level);
            if choices.is_empty() {
                if !self.advance() {
                    return false;
                }
                continue;
            }
            self.apply(choices[0], 1);
            self.stack.push((choices, 0));
        }
    }

    /// Moves the deepest cursor forward, popping exhausted levels.
    fn advance(&mut self) -> bool {
        while let Some((choices, cursor)) = self.stack.pop() {
            self.apply(choices[cursor], -1);
            if cursor + 1 < choices.len() {
                self.apply(choices[cursor + 1], 1);
                self.stack.push((choices, cursor + 1));
                return true;
            }
        }
        false
    }
}

/// Pushes, in enumeration order, every set `prefix ∪ T` where `T` is a
/// nonempty subset of `unc[from..]`, each one after all its extensions.
fn extend_sets(unc: &[usize], from: usize, prefix: u64, out: &mut Vec<Choice>) {
    for k in from..unc.len() {
        let mask = prefix | (1 << unc[k]);
        extend_sets(unc, k + 1, mask, out);
        out.push(Choice { mask });
    }
}

impl Iterator for MinimalCorrespondences {
    type Item = Correspondence;

    fn next(&mut self) -> Option<Correspondence> {
        let found = if !self.started {
            self.started = true;
            self.descend()
        } else {
            self.advance() && self.descend()
        };
        found.then(|| self.current())
    }
}

/// Parses the text exchange format: `n_x n_y` on the first line, then one `i j` pair per line.
pub fn parse_correspondence(text: &str) -> Result<Correspondence> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty correspondence".into()))?;
    let (n_x, n_y) = parse_pair(header)?;
    let pairs = lines.map(parse_pair).collect::<Result<Vec<_>>>()?;
    Correspondence::new(n_x, n_y, pairs)
}

fn parse_pair(line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>().map_err(|_| Error::Parse(format!("expected an index, got {t:?}")))
    });
    match (it.next(), it.next(), it.next()) {
        (Some(a), Some(b), None) => Ok((a?, b?)),
        _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
    }
}

pub fn format_correspondence(r: &Correspondence) -> String {
    let (n_x, n_y) = r.sizes();
    let mut s = format!("{n_x} {n_y}\n");
    for (i, j) in r.pairs() {
        s.push_str(&format!("{i} {j}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::from_reals;

    #[test]
    fn distortion_examples() {
        let x = from_reals(&[0., 1., 3.]).unwrap();
        let id = Correspondence::identity(3).unwrap();
        assert_eq!(id.distortion(&x, &x).unwrap(), 0.0);

        let i = from_reals(&[0., 1.]).unwrap();
        let p = FiniteMetricSpace::point();
        assert_eq!(Correspondence::full(2, 1).unwrap().distortion(&i, &p).unwrap(), 1.0);

        let y = from_reals(&[0., 3.]).unwrap();
        assert_eq!(Correspondence::identity(2).unwrap().distortion(&i, &y).unwrap(), 2.0);
    }

    #[test]
    fn distortion_index_errors() {
        let rel = Relation::new(3, 1, vec![(2, 0)]).unwrap();
        let x = from_reals(&[0., 1.]).unwrap();
        assert_eq!(
            rel.distortion(&x, &FiniteMetricSpace::point()).unwrap_err(),
            Error::IndexOutOfRange(2, 0)
        );
        assert_eq!(Relation::new(2, 2, vec![(0, 2)]).unwrap_err(), Error::IndexOutOfRange(0, 2));
        assert_eq!(Relation::new(2, 2, vec![]).unwrap_err(), Error::EmptyRelation);
    }

    #[test]
    fn capped_distortion_exits_early() {
        let x = from_reals(&[0., 1., 10.]).unwrap();
        let y = from_reals(&[0., 5., 6.]).unwrap();
        let r = Correspondence::identity(3).unwrap();
        let full = r.distortion(&x, &y).unwrap();
        assert_eq!(full, 8.0);
        let capped = r.relation().distortion_capped(&x, &y, 2.0).unwrap();
        assert!(capped > 2.0 && capped <= full);
    }

    #[test]
    fn correspondence_requires_coverage() {
        let e = Correspondence::new(2, 2, vec![(0, 0), (1, 0)]).unwrap_err();
        assert_eq!(e, Error::NotACorrespondence { side: 'Y', index: 1 });
        let e = Correspondence::new(2, 2, vec![(0, 0), (0, 1)]).unwrap_err();
        assert_eq!(e, Error::NotACorrespondence { side: 'X', index: 1 });
    }

    #[test]
    fn product_examples() {
        let r1 = Correspondence::new(2, 1, vec![(0, 0), (1, 0)]).unwrap();
        let r2 = Correspondence::new(3, 2, vec![(0, 0), (1, 1), (2, 1)]).unwrap();
        let p = r1.product(&r2).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(p.sizes(), (6, 2));

        let a = from_reals(&[0., 1.]).unwrap();
        let b2 = from_reals(&[0., 2.]).unwrap();
        let id = Correspondence::identity(2).unwrap();
        let x = a.l1_product(&a).unwrap();
        let y = a.l1_product(&b2).unwrap();
        assert_eq!(id.distortion(&a, &b2).unwrap(), 1.0);
        assert_eq!(id.product(&id).unwrap().distortion(&x, &y).unwrap(), 1.0);
    }

    #[test]
    fn hausdorff_examples() {
        let z = from_reals(&[0., 2.]).unwrap();
        assert_eq!(hausdorff_distance(&[0, 1], &[1, 0], &z).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&[0], &[0, 1], &z).unwrap(), 2.0);
        let z = from_reals(&[0., 1., 2.]).unwrap();
        assert_eq!(hausdorff_distance(&[0, 1], &[2], &z).unwrap(), 2.0);
        assert_eq!(hausdorff_distance(&[], &[2], &z).unwrap_err(), Error::EmptySubset);
    }

    #[test]
    fn enumeration_small_cases() {
        let all: Vec<_> = enumerate_minimal_correspondences(2, 1, GridCap::default()).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].pairs(), &[(0, 0), (1, 0)]);
        let all: Vec<_> = enumerate_minimal_correspondences(2, 2, GridCap::default()).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].pairs(), &[(0, 0), (1, 1)]);
        assert_eq!(all[1].pairs(), &[(0, 1), (1, 0)]);
        let all: Vec<_> = enumerate_minimal_correspondences(1, 1, GridCap::default()).unwrap().collect();
        assert_eq!(all.len(), 1);
    }

    #[test]
    fn enumeration_is_sorted_and_minimal() {
        let all: Vec<_> = enumerate_minimal_correspondences(3, 3, GridCap::default()).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0].pairs() < w[1].pairs()));
        assert!(all.iter().all(Correspondence::is_minimal));
    }

    #[test]
    fn enumeration_cap() {
        let e = enumerate_minimal_correspondences(9, 2, GridCap::default()).unwrap_err();
        assert!(matches!(e, Error::CapExceeded { .. }));
    }

    #[test]
    fn text_format() {
        let r = Correspondence::new(2, 3, vec![(1, 2), (0, 0), (0, 1)]).unwrap();
        let text = format_correspondence(&r);
        assert_eq!(text, "2 3\n0 0\n0 1\n1 2\n");
        assert_eq!(parse_correspondence(&text).unwrap(), r);
        assert!(parse_correspondence("2 2\n0 0\n").is_err());
        assert!(parse_correspondence("2 x\n").is_err());
    }
}
