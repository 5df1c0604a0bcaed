//! Two-way set partitioning, the squaring construction, and the multilevel
//! construction that turns an M-PAM alphabet into the complex symbol-vector
//! constellation used for the non-zero entries of an MBM block.
//!
//! Point sets are kept as expression trees so that each set knows how it was
//! built, which is what the partition rule needs:
//!
//! * a sorted scalar set splits by alternating rank;
//! * a union `A ∪ B` splits into `(A, B)`;
//! * a product `A × B` splits into the diagonal / anti-diagonal cosets
//!   `(A0×B0 ∪ A1×B1, A0×B1 ∪ A1×B0)`.
//!
//! All coordinates are integers and all distances are exact squared
//! Euclidean distances.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};

/// A real point: integer coordinates.
pub type Point = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Shape {
    Scalar(Vec<i64>),
    Product(Box<PartitionNode>, Box<PartitionNode>),
    Union(Box<PartitionNode>, Box<PartitionNode>),
}

/// A structured set of equal-dimension integer vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionNode {
    shape: Shape,
    dim: usize,
    len: usize,
}

/// Result of a two-way partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Split {
    Pair(PartitionNode, PartitionNode),
    /// A one-point set cannot be split further; it is carried forward as is.
    Singleton,
}

/// Squared Euclidean distance between two points.
pub fn sq_dist(a: &[i64], b: &[i64]) -> u64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            (d * d) as u64
        })
        .sum()
}

/// Brute-force minimum squared distance; `None` for fewer than two points.
pub fn min_sq_dist(points: &[Point]) -> Option<u64> {
    let mut best: Option<u64> = None;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = sq_dist(a, b);
            best = Some(best.map_or(d, |x| x.min(d)));
        }
    }
    best
}

impl PartitionNode {
    /// A set of distinct scalars; stored sorted ascending.
    pub fn scalar(values: &[i64]) -> Result<Self> {
        let mut v = values.to_vec();
        v.sort_unstable();
        v.dedup();
        if v.len() != values.len() || v.is_empty() {
            return Err(Error::PointSet("scalar set must be non-empty and distinct".into()));
        }
        Ok(Self {
            len: v.len(),
            shape: Shape::Scalar(v),
            dim: 1,
        })
    }

    /// Cartesian product `a × b`.
    pub fn product(a: PartitionNode, b: PartitionNode) -> Self {
        Self {
            dim: a.dim + b.dim,
            len: a.len * b.len,
            shape: Shape::Product(Box::new(a), Box::new(b)),
        }
    }

    /// `a × a`.
    pub fn squared(a: PartitionNode) -> Self {
        Self::product(a.clone(), a)
    }

    /// Union of two disjoint sets of the same dimension.
    pub fn union(a: PartitionNode, b: PartitionNode) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::PointSet(format!(
                "union of {}- and {}-dimensional sets",
                a.dim, b.dim
            )));
        }
        let left: HashSet<Point> = a.points().into_iter().collect();
        if b.points().iter().any(|p| left.contains(p)) {
            return Err(Error::PointSet("union operands overlap".into()));
        }
        Ok(Self {
            dim: a.dim,
            len: a.len + b.len,
            shape: Shape::Union(Box::new(a), Box::new(b)),
        })
    }

    /// Real dimension of the points.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Level in the squaring tree: log2 of the dimension.
    pub fn depth(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All points, in construction order (products enumerate row-major,
    /// unions list the left operand first).
    pub fn points(&self) -> Vec<Point> {
        match &self.shape {
            Shape::Scalar(v) => v.iter().map(|&x| vec![x]).collect(),
            Shape::Product(a, b) => {
                let pb = b.points();
                let mut out = Vec::with_capacity(self.len);
                for x in a.points() {
                    for y in &pb {
                        let mut p = x.clone();
                        p.extend_from_slice(y);
                        out.push(p);
                    }
                }
                out
            }
            Shape::Union(a, b) => {
                let mut out = a.points();
                out.extend(b.points());
                out
            }
        }
    }

    /// Brute-force minimum squared distance; `None` for a singleton.
    pub fn min_dist(&self) -> Option<u64> {
        min_sq_dist(&self.points())
    }

    /// Two-way partition following the construction rule of this set.
    pub fn partition2(&self) -> Result<Split> {
        if self.len == 1 {
            return Ok(Split::Singleton);
        }
        match &self.shape {
            Shape::Scalar(v) => {
                let even: Vec<i64> = v.iter().step_by(2).copied().collect();
                let odd: Vec<i64> = v.iter().skip(1).step_by(2).copied().collect();
                Ok(Split::Pair(Self::scalar(&even)?, Self::scalar(&odd)?))
            }
            Shape::Union(a, b) => Ok(Split::Pair((**a).clone(), (**b).clone())),
            Shape::Product(a, b) => match (a.partition2()?, b.partition2()?) {
                (Split::Pair(a0, a1), Split::Pair(b0, b1)) => {
                    let diag = Self::union(
                        Self::product(a0.clone(), b0.clone()),
                        Self::product(a1.clone(), b1.clone()),
                    )?;
                    let anti = Self::union(Self::product(a0, b1), Self::product(a1, b0))?;
                    Ok(Split::Pair(diag, anti))
                }
                _ => Err(Error::PointSet(
                    "product factors do not both admit a two-way partition".into(),
                )),
            },
        }
    }
}

/// The M-PAM alphabet `{±1, ±3, ..., ±(M-1)}`.
pub fn base_pam(m: usize) -> Result<PartitionNode> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo("PAM order M"));
    }
    let values: Vec<i64> = (0..m as i64).map(|i| 2 * i - (m as i64 - 1)).collect();
    PartitionNode::scalar(&values)
}

/// `t0² ∪ t1²` for disjoint sets of equal dimension.
pub fn square(t0: &PartitionNode, t1: &PartitionNode) -> Result<PartitionNode> {
    PartitionNode::union(
        PartitionNode::squared(t0.clone()),
        PartitionNode::squared(t1.clone()),
    )
}

/// The distance guaranteed for `t0² ∪ t1²` when `(t0, t1)` partitions
/// `parent`: `min(d(T), 2 d(parent))`, with singleton subsets contributing no
/// intra-subset distance.
pub fn squaring_distance(t0: &PartitionNode, t1: &PartitionNode, parent: &PartitionNode) -> u64 {
    let parent_d = parent.min_dist().expect("parent of a partition has two points");
    [t0.min_dist(), t1.min_dist()]
        .into_iter()
        .flatten()
        .chain(std::iter::once(2 * parent_d))
        .min()
        .unwrap()
}

/// One branch of the multilevel construction.
#[derive(Debug, Clone)]
pub struct Branch {
    pub node: PartitionNode,
    /// Partition choices taken at each stage so far.
    pub label: Vec<u8>,
    /// Index of the parent branch in the previous stage.
    pub parent: Option<usize>,
}

/// All stages of an `L`-stage construction. `stages[0]` holds the PAM seed,
/// `stages[L]` the leaf branches whose union is the constellation.
#[derive(Debug, Clone)]
pub struct MultilevelTree {
    pub pam_order: usize,
    pub stages: Vec<Vec<Branch>>,
}

/// Run `levels` partition-then-square stages from `M`-PAM, keeping each
/// branch separate.
pub fn multilevel_tree(pam_order: usize, levels: usize) -> Result<MultilevelTree> {
    if levels == 0 {
        return Err(Error::Argument("need at least one squaring stage".into()));
    }
    let seed = Branch {
        node: base_pam(pam_order)?,
        label: Vec::new(),
        parent: None,
    };
    let mut stages = vec![vec![seed]];
    for _ in 0..levels {
        let prev = stages.last().unwrap();
        let mut next = Vec::with_capacity(prev.len() * 2);
        for (pi, branch) in prev.iter().enumerate() {
            match branch.node.partition2()? {
                Split::Pair(t0, t1) => {
                    for (bit, t) in [(0u8, t0), (1u8, t1)] {
                        let mut label = branch.label.clone();
                        label.push(bit);
                        next.push(Branch {
                            node: PartitionNode::squared(t),
                            label,
                            parent: Some(pi),
                        });
                    }
                }
                Split::Singleton => {
                    let mut label = branch.label.clone();
                    label.push(0);
                    next.push(Branch {
                        node: PartitionNode::squared(branch.node.clone()),
                        label,
                        parent: Some(pi),
                    });
                }
            }
        }
        if next.iter().any(|b| b.node.is_empty()) {
            return Err(Error::PointSet(format!(
                "M={pam_order} L={levels} leaves an empty branch"
            )));
        }
        stages.push(next);
    }
    Ok(MultilevelTree { pam_order, stages })
}

/// `|A|` from the closed form: `2^(2^L (P-2) + L + 2)` for `P >= 2`, else 2.
pub fn constellation_size_formula(pam_order: usize, levels: usize) -> Result<u128> {
    if pam_order < 2 || !pam_order.is_power_of_two() {
        return Err(Error::NotPowerOfTwo("PAM order M"));
    }
    let p = pam_order.trailing_zeros() as u128;
    if p == 1 {
        return Ok(2);
    }
    let exp = (1u128 << levels) * (p - 2) + levels as u128 + 2;
    if exp >= 128 {
        return Err(Error::Argument(format!("|A| = 2^{exp} overflows")));
    }
    Ok(1u128 << exp)
}

/// The complex constellation produced by the multilevel construction.
#[derive(Debug, Clone)]
pub struct SymbolConstellation {
    vectors: Vec<Vec<Complex<i64>>>,
    real: Vec<Point>,
    pam_order: usize,
    levels: usize,
    min_dist: u64,
    branch_min_dist: Option<u64>,
}

/// Largest constellation we are willing to enumerate.
const MAX_CONSTELLATION: u128 = 1 << 16;

/// Build the `N = 2^(L-1)` dimensional complex constellation from `M`-PAM
/// with `L` squaring stages.
pub fn build_constellation(pam_order: usize, levels: usize) -> Result<SymbolConstellation> {
    let expected = constellation_size_formula(pam_order, levels)?;
    if expected > MAX_CONSTELLATION {
        return Err(Error::Argument(format!(
            "|A| = {expected} is too large to enumerate"
        )));
    }
    let tree = multilevel_tree(pam_order, levels)?;
    let leaves = tree.stages.last().unwrap();
    let real: Vec<Point> = leaves.iter().flat_map(|b| b.node.points()).collect();
    if real.len() as u128 != expected {
        return Err(Error::PointSet(format!(
            "construction produced {} vectors, closed form gives {expected}",
            real.len()
        )));
    }
    let branch_min_dist = leaves.iter().filter_map(|b| b.node.min_dist()).min();
    let min_dist = min_sq_dist(&real).unwrap_or(0);
    let vectors = real.iter().map(|p| complexify(p)).collect();
    Ok(SymbolConstellation {
        vectors,
        real,
        pam_order,
        levels,
        min_dist,
        branch_min_dist,
    })
}

/// Pair consecutive real coordinates into complex entries.
pub fn complexify(real: &[i64]) -> Vec<Complex<i64>> {
    real.chunks(2)
        .map(|c| Complex::new(c[0], *c.get(1).unwrap_or(&0)))
        .collect()
}

/// Number of squaring stages that yields complex dimension `n`: `log2(2n)`.
pub fn levels_for_dimension(n: usize) -> Result<usize> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo("block length N"));
    }
    Ok(n.trailing_zeros() as usize + 1)
}

impl SymbolConstellation {
    pub fn vectors(&self) -> &[Vec<Complex<i64>>] {
        &self.vectors
    }

    pub fn real_vectors(&self) -> &[Point] {
        &self.real
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Complex dimension `N`.
    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn pam_order(&self) -> usize {
        self.pam_order
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Brute-force minimum squared distance over the whole constellation.
    pub fn min_dist(&self) -> u64 {
        self.min_dist
    }

    /// Smallest minimum distance within a single leaf branch.
    pub fn branch_min_dist(&self) -> Option<u64> {
        self.branch_min_dist
    }

    /// Text dump: header line, then one vector per line as `re:im` entries.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# squaring M={} L={} size={} dmin={}\n",
            self.pam_order,
            self.levels,
            self.len(),
            self.min_dist
        );
        for v in &self.vectors {
            let line: Vec<String> = v.iter().map(|c| format!("{}:{}", c.re, c.im)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}
