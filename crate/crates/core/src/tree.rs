//! Balanced binary tree over time blocks, its depth-first traversal and the
//! time ↔ (leaf, offset) correspondence.
//!
//! The tree is implicit: a node is a contiguous leaf range, split at
//! `⌈n/2⌉`. Node ids are pre-order positions, so the left child of `v` is
//! `v + 1` and the right child is `v + 2·|left leaves|`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::{
    direct_summary, leaf_summary, merge, BlockDecomposition, BoundaryError, IntervalSummary,
    Policy,
};
use crate::encoding::encode_summary;
use crate::run::RunRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("cannot build a tree over zero blocks")]
    Empty,
    #[error("step {tau} outside 1..={t}")]
    TimeOutOfRange { tau: u64, t: u64 },
    #[error("leaf {leaf} outside 1..={count}")]
    LeafOutOfRange { leaf: u64, count: u64 },
    #[error("offset {offset} not below block length {len}")]
    OffsetOutOfRange { offset: u64, len: u64 },
    #[error("tree has {tree} leaves but the run decomposes into {run}")]
    ShapeMismatch { tree: u64, run: u64 },
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

/// A node of the implicit tree: pre-order id and its leaf range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub id: u64,
    pub first: u64,
    pub last: u64,
}

impl Node {
    pub fn leaves(&self) -> u64 {
        self.last - self.first + 1
    }

    pub fn is_leaf(&self) -> bool {
        self.first == self.last
    }

    pub fn children(&self) -> Option<(Node, Node)> {
        if self.is_leaf() {
            return None;
        }
        let left_leaves = self.leaves().div_ceil(2);
        let split = self.first + left_leaves;
        Some((
            Node {
                id: self.id + 1,
                first: self.first,
                last: split - 1,
            },
            Node {
                id: self.id + 2 * left_leaves,
                first: split,
                last: self.last,
            },
        ))
    }
}

/// Height of the balanced tree over `n` leaves, by the split rule itself.
pub fn height(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        1 + height(n.div_ceil(2))
    }
}

pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalTree {
    pub blocks: BlockDecomposition,
    pub depth: u32,
    /// Indexed by node id when present.
    pub labels: Option<Vec<IntervalSummary>>,
}

pub fn build_tree(blocks: &BlockDecomposition) -> Result<CausalTree, TreeError> {
    if blocks.count == 0 {
        return Err(TreeError::Empty);
    }
    Ok(CausalTree {
        blocks: *blocks,
        depth: height(blocks.count),
        labels: None,
    })
}

impl CausalTree {
    pub fn leaf_count(&self) -> u64 {
        self.blocks.count
    }

    pub fn node_count(&self) -> u64 {
        2 * self.blocks.count - 1
    }

    pub fn root(&self) -> Node {
        Node {
            id: 0,
            first: 1,
            last: self.blocks.count,
        }
    }

    pub fn interval(&self, v: &Node) -> (u64, u64) {
        let (l, _) = self.blocks.block(v.first).expect("leaf in range");
        let (_, r) = self.blocks.block(v.last).expect("leaf in range");
        (l, r)
    }

    /// All nodes in pre-order.
    pub fn nodes(&self) -> Vec<Node> {
        let mut out = Vec::with_capacity(self.node_count() as usize);
        let mut stack = vec![self.root()];
        while let Some(v) = stack.pop() {
            out.push(v);
            if let Some((l, r)) = v.children() {
                stack.push(r);
                stack.push(l);
            }
        }
        out
    }

    pub fn label(&self, id: u64) -> Option<&IntervalSummary> {
        self.labels.as_ref().map(|l| &l[id as usize])
    }

    pub fn root_label(&self) -> Option<&IntervalSummary> {
        self.label(0)
    }
}

/// Labels every node: leaves from the oracle, internal nodes by merging
/// their children.
pub fn label_tree(
    tree: &CausalTree,
    run: &RunRecord<'_>,
    c_int: u64,
    policy: Policy,
) -> Result<CausalTree, TreeError> {
    let expect = tree.blocks;
    if run.t() != expect.t {
        return Err(TreeError::ShapeMismatch {
            tree: expect.count,
            run: run.t().div_ceil(expect.b),
        });
    }
    let mut labels: Vec<Option<IntervalSummary>> = vec![None; tree.node_count() as usize];
    fn go(
        v: Node,
        tree: &CausalTree,
        run: &RunRecord<'_>,
        c_int: u64,
        policy: Policy,
        labels: &mut [Option<IntervalSummary>],
    ) -> Result<(), TreeError> {
        let s = match v.children() {
            None => leaf_summary(run, &tree.blocks, v.first, c_int, policy)?,
            Some((l, r)) => {
                go(l, tree, run, c_int, policy, labels)?;
                go(r, tree, run, c_int, policy, labels)?;
                let a = labels[l.id as usize].as_ref().expect("labelled");
                let b = labels[r.id as usize].as_ref().expect("labelled");
                merge(a, b)?
            }
        };
        labels[v.id as usize] = Some(s);
        Ok(())
    }
    go(tree.root(), tree, run, c_int, policy, &mut labels)?;
    Ok(CausalTree {
        labels: Some(labels.into_iter().map(|l| l.expect("every node")).collect()),
        ..tree.clone()
    })
}

/// `((σ1 ⊕ σ2) ⊕ σ3) ⊕ …` over all blocks.
pub fn left_deep_fold(
    run: &RunRecord<'_>,
    blocks: &BlockDecomposition,
    c_int: u64,
    policy: Policy,
) -> Result<IntervalSummary, TreeError> {
    if blocks.count == 0 {
        return Err(TreeError::Empty);
    }
    let mut acc = leaf_summary(run, blocks, 1, c_int, policy)?;
    for k in 2..=blocks.count {
        acc = merge(&acc, &leaf_summary(run, blocks, k, c_int, policy)?)?;
    }
    Ok(acc)
}

/// Checks every label against the oracle summary of its interval.
pub fn labels_match_oracle(tree: &CausalTree, run: &RunRecord<'_>) -> Result<bool, TreeError> {
    let Some(labels) = &tree.labels else {
        return Ok(false);
    };
    for v in tree.nodes() {
        let s = &labels[v.id as usize];
        if *s != direct_summary(run, &tree.blocks, v.first, v.last, s.policy)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn time_to_leaf(tau: u64, blocks: &BlockDecomposition) -> Result<(u64, u64), TreeError> {
    if tau == 0 || tau > blocks.t {
        return Err(TreeError::TimeOutOfRange { tau, t: blocks.t });
    }
    let k = tau.div_ceil(blocks.b);
    Ok((k, tau - ((k - 1) * blocks.b + 1)))
}

pub fn leaf_to_time(k: u64, offset: u64, blocks: &BlockDecomposition) -> Result<u64, TreeError> {
    let (l, r) = blocks.block(k).map_err(|_| TreeError::LeafOutOfRange {
        leaf: k,
        count: blocks.count,
    })?;
    let len = r - l + 1;
    if offset >= len {
        return Err(TreeError::OffsetOutOfRange { offset, len });
    }
    Ok(l + offset)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Enter,
    LeafEmit { leaf: u64, offset: u64, tau: u64 },
    Exit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraversalStep {
    pub index: u64,
    pub node: Node,
    pub depth: u32,
    /// Whether `node` is the left child of its parent.
    pub is_left: bool,
    pub phase: Phase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Next {
    Enter,
    Emit(u64),
    Exit,
    Done,
}

/// Pre-order depth-first walk holding only the current node, its depth and
/// the left/right turns from the root as a bit string.
#[derive(Clone, Debug)]
pub struct DfsCursor {
    blocks: BlockDecomposition,
    cur: Node,
    depth: u32,
    path: u64,
    next: Next,
    index: u64,
}

impl DfsCursor {
    pub fn new(tree: &CausalTree) -> Self {
        assert!(tree.depth < 64, "path register holds 63 levels");
        DfsCursor {
            blocks: tree.blocks,
            cur: tree.root(),
            depth: 0,
            path: 0,
            next: Next::Enter,
            index: 0,
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn path_bits(&self) -> u64 {
        self.path
    }

    fn is_left(&self) -> bool {
        self.depth > 0 && self.path & (1 << (self.depth - 1)) == 0
    }

    /// Parent of the current node, recomputed by descending from the root.
    fn parent(&self) -> Node {
        let mut v = Node {
            id: 0,
            first: 1,
            last: self.blocks.count,
        };
        for level in 0..self.depth - 1 {
            let (l, r) = v.children().expect("internal on path");
            v = if self.path & (1 << level) == 0 { l } else { r };
        }
        v
    }
}

impl Iterator for DfsCursor {
    type Item = TraversalStep;

    fn next(&mut self) -> Option<TraversalStep> {
        let phase = match self.next {
            Next::Done => return None,
            Next::Enter => Phase::Enter,
            Next::Exit => Phase::Exit,
            Next::Emit(offset) => {
                let tau = leaf_to_time(self.cur.first, offset, &self.blocks).expect("valid offset");
                Phase::LeafEmit {
                    leaf: self.cur.first,
                    offset,
                    tau,
                }
            }
        };
        let step = TraversalStep {
            index: self.index,
            node: self.cur,
            depth: self.depth,
            is_left: self.is_left(),
            phase,
        };
        self.index += 1;
        self.next = match phase {
            Phase::Enter => match self.cur.children() {
                None => Next::Emit(0),
                Some((l, _)) => {
                    self.path &= !(1 << self.depth);
                    self.depth += 1;
                    self.cur = l;
                    Next::Enter
                }
            },
            Phase::LeafEmit { offset, .. } => {
                let (l, r) = self.blocks.block(self.cur.first).expect("leaf");
                if offset + 1 < r - l + 1 {
                    Next::Emit(offset + 1)
                } else {
                    Next::Exit
                }
            }
            Phase::Exit => {
                if self.depth == 0 {
                    Next::Done
                } else {
                    let was_left = self.is_left();
                    let parent = self.parent();
                    if was_left {
                        let (_, r) = parent.children().expect("internal");
                        self.path |= 1 << (self.depth - 1);
                        self.cur = r;
                        Next::Enter
                    } else {
                        self.depth -= 1;
                        self.path &= !(1 << self.depth);
                        self.cur = parent;
                        Next::Exit
                    }
                }
            }
        };
        Some(step)
    }
}

pub fn dfs_order(tree: &CausalTree) -> Vec<TraversalStep> {
    DfsCursor::new(tree).collect()
}

/// Interval lengths (in steps and in blocks) along one root-to-leaf path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathProfile {
    pub leaf: u64,
    pub steps: Vec<u64>,
    pub blocks: Vec<u64>,
}

impl PathProfile {
    /// Each child covers at most half its parent's blocks, rounded up.
    pub fn decays_geometrically(&self) -> bool {
        self.blocks.windows(2).all(|w| w[1] <= w[0].div_ceil(2))
    }
}

pub fn radial_profile(tree: &CausalTree) -> Vec<PathProfile> {
    let mut out = Vec::with_capacity(tree.leaf_count() as usize);
    let mut stack = vec![(tree.root(), Vec::<Node>::new())];
    while let Some((v, mut path)) = stack.pop() {
        path.push(v);
        match v.children() {
            None => out.push(PathProfile {
                leaf: v.first,
                steps: path
                    .iter()
                    .map(|n| {
                        let (l, r) = tree.interval(n);
                        r - l + 1
                    })
                    .collect(),
                blocks: path.iter().map(Node::leaves).collect(),
            }),
            Some((l, r)) => {
                stack.push((r, path.clone()));
                stack.push((l, path));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: u64,
    #[serde(rename = "L")]
    pub l: u64,
    #[serde(rename = "R")]
    pub r: u64,
    pub children: Option<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub summary_hex: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    #[serde(rename = "T")]
    pub leaves: u64,
    pub b: u64,
    pub depth: u32,
    pub nodes: Vec<NodeJson>,
}

pub fn tree_json(tree: &CausalTree) -> TreeJson {
    TreeJson {
        leaves: tree.leaf_count(),
        b: tree.blocks.b,
        depth: tree.depth,
        nodes: tree
            .nodes()
            .into_iter()
            .map(|v| {
                let (l, r) = tree.interval(&v);
                NodeJson {
                    id: v.id,
                    l,
                    r,
                    children: v.children().map(|(a, b)| [a.id, b.id]),
                    summary_hex: tree.label(v.id).map(|s| hex::encode(encode_summary(s))),
                }
            })
            .collect(),
    }
}
