//! Exact Gromov–Hausdorff distance between finite spaces, plus the closed
//! forms and bounds that do not need a search.
//!
//! `2·d_GH(X, Y)` is the least distortion of a correspondence, and the least
//! distortion is attained on a minimal correspondence (distortion only grows
//! when pairs are added). The solver runs a depth-first branch and bound over
//! minimal correspondences: X-points are assigned in index order, each to a
//! nonempty set of Y-points, and a set with more than one member claims those
//! Y-points exclusively.
//!
//! Branches are visited in lexicographic order of the sorted pair list, and an
//! incumbent is only replaced by a strictly better correspondence (or, once, by
//! the first search-found correspondence matching the heuristic). The witness
//! is therefore the lexicographically smallest optimal minimal correspondence.

use std::fmt;

use crate::correspondence::{distortion_of_pairs, parse_correspondence, Correspondence, GridCap};
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;

pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub cap: GridCap,
    /// Search nodes (pair insertions) before giving up with a flagged certificate.
    pub node_budget: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { cap: GridCap::default(), node_budget: DEFAULT_NODE_BUDGET }
    }
}

impl SolverOptions {
    pub fn with_budget(node_budget: u64) -> Self {
        SolverOptions { node_budget, ..Default::default() }
    }
}

/// How the value of a certificate is known to be optimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LowerProof {
    /// Every minimal correspondence was either visited or pruned.
    ExhaustedSearch,
    /// The witness meets the `|diam X - diam Y|` lower bound.
    DiameterBound,
    /// Search stopped at the node budget; the value is only an upper bound.
    CallerBudgetExceeded,
}

impl LowerProof {
    pub fn tag(&self) -> &'static str {
        match self {
            LowerProof::ExhaustedSearch => "ExhaustedSearch",
            LowerProof::DiameterBound => "DiameterBound",
            LowerProof::CallerBudgetExceeded => "CallerBudgetExceeded",
        }
    }

    pub fn is_optimal(&self) -> bool {
        !matches!(self, LowerProof::CallerBudgetExceeded)
    }
}

impl std::str::FromStr for LowerProof {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ExhaustedSearch" => Ok(LowerProof::ExhaustedSearch),
            "DiameterBound" => Ok(LowerProof::DiameterBound),
            "CallerBudgetExceeded" => Ok(LowerProof::CallerBudgetExceeded),
            _ => Err(Error::Parse(format!("unknown lower_proof tag {s:?}"))),
        }
    }
}

/// A Gromov–Hausdorff value with its witness correspondence.
#[derive(Debug, Clone, PartialEq)]
pub struct GhCertificate {
    /// Half the witness distortion.
    pub value: f64,
    pub witness: Correspondence,
    pub lower_proof: LowerProof,
    pub nodes_explored: u64,
}

impl GhCertificate {
    /// Text block: `value`, `lower_proof`, `nodes_explored` lines followed by
    /// the witness in correspondence format.
    pub fn to_text(&self) -> String {
        format!(
            "value {}\nlower_proof {}\nnodes_explored {}\n{}",
            crate::io::format_real(self.value),
            self.lower_proof.tag(),
            self.nodes_explored,
            crate::correspondence::format_correspondence(&self.witness)
        )
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let mut field = |key: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing {key}")))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix(' '))
                .map(|v| v.trim().to_string())
                .ok_or_else(|| Error::Parse(format!("expected `{key} ...`, got {line:?}")))
        };
        let value = field("value")?
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("value: {e}")))?;
        let lower_proof = field("lower_proof")?.parse()?;
        let nodes_explored = field("nodes_explored")?
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("nodes_explored: {e}")))?;
        let rest: Vec<&str> = lines.collect();
        let witness = parse_correspondence(&rest.join("\n"))?;
        Ok(GhCertificate { value, witness, lower_proof, nodes_explored })
    }
}

impl fmt::Display for GhCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `|diam X - diam Y| / 2`, a lower bound for `d_GH(X, Y)`.
pub fn gh_lower_diam(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    (x.diameter() - y.diameter()).abs() / 2.0
}

/// `d_GH(t1·X, t2·X) = |t1 - t2|·diam X / 2`, evaluated in closed form.
pub fn gh_scaling_value(x: &FiniteMetricSpace, t1: f64, t2: f64) -> Result<f64> {
    for t in [t1, t2] {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::NegativeScale(t));
        }
    }
    Ok((t1 - t2).abs() * x.diameter() / 2.0)
}

/// Lower bound on a correspondence distortion `c` implied by
/// `c + 2w/(2n+1) + 2n/(2n+1)·diam_Y >= 2n/(2n+1)·t`, clamped at zero.
///
/// Here `n` counts separated blocks, `w` is the distortion of the auxiliary
/// correspondence between the line subset and its companion space, and `t`
/// is the diameter of the two-point factor.
pub fn product_bound_constraint(n: u64, w: f64, t: f64, diam_y: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    for (name, v) in [("w", w), ("t", t), ("diam_Y", diam_y)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidParameter(format!("{name} must be non-negative, got {v}")));
        }
    }
    let two_n = 2.0 * n as f64;
    Ok(((two_n * (t - diam_y) - 2.0 * w) / (two_n + 1.0)).max(0.0))
}

/// Exact `d_GH(X, Y)` with a witness; see the module docs for the search.
pub fn gh_exact(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    opts: &SolverOptions,
) -> Result<GhCertificate> {
    opts.cap.check(x.len(), y.len())?;
    if x.len() > 64 || y.len() > 64 {
        return Err(Error::CapExceeded { n_x: x.len(), n_y: y.len(), cap: opts.cap.max_pairs });
    }
    let mut search = Search::new(x, y, opts.node_budget);
    search.run();
    let (dis, pairs) = search.best;
    let witness = Correspondence::new(x.len(), y.len(), pairs)?;
    let lower_proof = if search.hit_diameter_bound {
        LowerProof::DiameterBound
    } else if search.out_of_budget {
        LowerProof::CallerBudgetExceeded
    } else {
        LowerProof::ExhaustedSearch
    };
    Ok(GhCertificate { value: dis / 2.0, witness, lower_proof, nodes_explored: search.nodes })
}

/// Full correspondence and a greedy nearest assignment padded to coverage;
/// returns the better one (the full one on ties).
fn initial_incumbent(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> (f64, Vec<(usize, usize)>) {
    let (nx, ny) = (x.len(), y.len());
    let full: Vec<_> = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    let full_dis = distortion_of_pairs(&full, x, y, f64::INFINITY);

    let cost = |pairs: &[(usize, usize)], i: usize, j: usize| {
        pairs
            .iter()
            .map(|&(i2, j2)| (x.d(i, i2) - y.d(j, j2)).abs())
            .fold(0.0, f64::max)
    };
    let mut greedy: Vec<(usize, usize)> = Vec::with_capacity(nx.max(ny));
    let mut used = vec![false; ny];
    for i in 0..nx {
        // prefer unused targets so the map is injective while it can be
        let pick = |only_unused: bool| {
            (0..ny)
                .filter(|&j| !only_unused || !used[j])
                .map(|j| (cost(&greedy, i, j), j))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        };
        let (_, j) = pick(true).or_else(|| pick(false)).expect("nonempty Y");
        used[j] = true;
        greedy.push((i, j));
    }
    for j in 0..ny {
        if !used[j] {
            let (_, i) = (0..nx)
                .map(|i| (cost(&greedy, i, j), i))
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .expect("nonempty X");
            greedy.push((i, j));
        }
    }
    greedy.sort_unstable();
    let greedy_dis = distortion_of_pairs(&greedy, x, y, f64::INFINITY);
    if greedy_dis < full_dis {
        (greedy_dis, greedy)
    } else {
        (full_dis, full)
    }
}

struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    nx: usize,
    ny: usize,
    budget: u64,
    nodes: u64,
    /// `|diam X - diam Y|`; no correspondence does better.
    floor: f64,
    best: (f64, Vec<(usize, usize)>),
    found_by_search: bool,
    out_of_budget: bool,
    hit_diameter_bound: bool,
    pairs: Vec<(usize, usize)>,
    cover: Vec<u32>,
    exclusive: u64,
}

impl<'a> Search<'a> {
    fn new(x: &'a FiniteMetricSpace, y: &'a FiniteMetricSpace, budget: u64) -> Self {
        Search {
            x,
            y,
            nx: x.len(),
            ny: y.len(),
            budget,
            nodes: 0,
            floor: (x.diameter() - y.diameter()).abs(),
            best: initial_incumbent(x, y),
            found_by_search: false,
            out_of_budget: false,
            hit_diameter_bound: false,
            pairs: Vec::with_capacity(x.len() * y.len()),
            cover: vec![0; y.len()],
            exclusive: 0,
        }
    }

    fn run(&mut self) {
        self.level(0, 0.0);
    }

    fn done(&self) -> bool {
        self.out_of_budget || self.hit_diameter_bound
    }

    /// True when a branch whose distortion is at least `v` cannot replace the incumbent.
    #[inline]
    fn hopeless(&self, v: f64) -> bool {
        v > self.best.0 || (v == self.best.0 && self.found_by_search)
    }

    /// Distortion after adding `(i, j)` to the current pairs.
    fn with_pair(&self, cur: f64, i: usize, j: usize) -> f64 {
        let mut m = cur;
        for &(i2, j2) in &self.pairs {
            let v = (self.x.d(i, i2) - self.y.d(j, j2)).abs();
            if v > m {
                m = v;
            }
        }
        m
    }

    fn push(&mut self, i: usize, j: usize, cur: f64) -> Option<f64> {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.out_of_budget = true;
            return None;
        }
        let d = self.with_pair(cur, i, j);
        if self.hopeless(d) {
            return None;
        }
        self.pairs.push((i, j));
        Some(d)
    }

    /// Lower bound on the final distortion given points `next..` of X still to place.
    fn lookahead(&self, next: usize, cur: f64) -> f64 {
        let mut bound = cur;
        for i in next..self.nx {
            let cheapest = (0..self.ny)
                .filter(|&j| self.exclusive & (1 << j) == 0)
                .map(|j| self.with_pair(0.0, i, j))
                .fold(f64::INFINITY, f64::min);
            bound = bound.max(cheapest);
        }
        for j in (0..self.ny).filter(|&j| self.cover[j] == 0) {
            let cheapest = (next..self.nx)
                .map(|i| self.with_pair(0.0, i, j))
                .fold(f64::INFINITY, f64::min);
            bound = bound.max(cheapest);
        }
        bound
    }

    fn level(&mut self, i: usize, cur: f64) {
        if self.done() {
            return;
        }
        if i == self.nx {
            if self.cover.iter().all(|&c| c > 0) && !self.hopeless(cur) {
                self.best = (cur, self.pairs.clone());
                self.found_by_search = true;
                if cur <= self.floor {
                    self.hit_diameter_bound = true;
                }
            }
            return;
        }
        if i > 0 && self.hopeless(self.lookahead(i, cur)) {
            return;
        }
        let uncovered: Vec<usize> = (0..self.ny).filter(|&j| self.cover[j] == 0).collect();
        if i + 1 == self.nx && !uncovered.is_empty() {
            // the last point has to take every uncovered Y-point
            if uncovered.len() == 1 {
                self.single(i, uncovered[0], cur);
            } else {
                let mut d = cur;
                let start = self.pairs.len();
                for &j in &uncovered {
                    match self.push(i, j, d) {
                        Some(nd) => d = nd,
                        None => {
                            self.pairs.truncate(start);
                            return;
                        }
                    }
                }
                self.close_multi(i, &uncovered, d);
                self.pairs.truncate(start);
            }
            return;
        }
        for c in 0..self.ny {
            if self.done() {
                return;
            }
            if self.exclusive & (1 << c) != 0 {
                continue;
            }
            if self.cover[c] == 0 && i + 1 < self.nx {
                let Some(d) = self.push(i, c, cur) else { continue };
                let pos = uncovered.binary_search(&c).expect("uncovered");
                let mut members = vec![c];
                self.extend(i, &uncovered, pos + 1, &mut members, d);
                self.pairs.pop();
                self.single_closed(i, c, d);
            } else {
                self.single(i, c, cur);
            }
        }
    }

    /// Tries every multi-element set `members ∪ T`, `T ⊆ uncovered[from..]` nonempty.
    fn extend(&mut self, i: usize, uncovered: &[usize], from: usize, members: &mut Vec<usize>, cur: f64) {
        for k in from..uncovered.len() {
            if self.done() {
                return;
            }
            let j = uncovered[k];
            let Some(d) = self.push(i, j, cur) else { continue };
            members.push(j);
            self.extend(i, uncovered, k + 1, members, d);
            self.close_multi(i, members, d);
            members.pop();
            self.pairs.pop();
        }
    }

    fn close_multi(&mut self, i: usize, members: &[usize], d: f64) {
        let mask = members.iter().fold(0u64, |m, &j| m | (1 << j));
        for &j in members {
            self.cover[j] += 1;
        }
        self.exclusive |= mask;
        self.level(i + 1, d);
        self.exclusive &= !mask;
        for &j in members {
            self.cover[j] -= 1;
        }
    }

    fn single(&mut self, i: usize, j: usize, cur: f64) {
        if let Some(d) = self.push(i, j, cur) {
            self.pairs.pop();
            self.single_closed(i, j, d);
        }
    }

    /// Recurses with `(i, j)` as the whole image of `i`; `d` already includes the pair.
    fn single_closed(&mut self, i: usize, j: usize, d: f64) {
        if self.done() || self.hopeless(d) {
            return;
        }
        self.pairs.push((i, j));
        self.cover[j] += 1;
        self.level(i + 1, d);
        self.cover[j] -= 1;
        self.pairs.pop();
    }
}

/// One entry of [`truncation_lower_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRow {
    pub k: usize,
    pub certificate: GhCertificate,
    /// `d_GH(X, Y)`: pairing `A_k` with itself by the identity and `X`, `Y`
    /// optimally gives a correspondence of the products with at most this value.
    pub upper: f64,
}

/// `d_GH(A_k ×ℓ¹ X, A_k ×ℓ¹ Y)` for `A_k = {0, gap, …, (k-1)·gap}` and each `k`.
///
/// Finite probe of the bound `d_GH(A ×ℓ¹ X, B ×ℓ¹ Y) >= (diam X - diam Y)/2`
/// for unbounded `A`; choose `gap` well above `100·(diam X + diam Y)`.
pub fn truncation_lower_series(
    gap: f64,
    ks: &[usize],
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    opts: &SolverOptions,
) -> Result<Vec<TruncationRow>> {
    let upper = gh_exact(x, y, opts)?.value;
    ks.iter()
        .map(|&k| {
            let a = crate::metric::PointSet1D::arithmetic(k, gap)?.to_space();
            opts.cap.check(a.len() * x.len(), a.len() * y.len())?;
            let ax = a.l1_product(x)?;
            let ay = a.l1_product(y)?;
            let certificate = gh_exact(&ax, &ay, opts)?;
            Ok(TruncationRow { k, certificate, upper })
        })
        .collect()
}
