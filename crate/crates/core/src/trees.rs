//! Complete increasing binary trees and increasing 1-2 trees.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::de::Deserializer;
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{check_size, FamilyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("cannot parse tree {0:?}")]
    Parse(String),
    #[error("tree is not a complete increasing tree on 1..={n}: {reason}")]
    Invalid { n: usize, reason: String },
}

/// A plane binary tree whose nodes are either empty leaves, labelled leaves,
/// or labelled nodes with exactly two children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinTree {
    Empty,
    Node { label: u32, children: Option<Box<(BinTree, BinTree)>> },
}

impl BinTree {
    pub fn leaf(label: u32) -> Self {
        Self::Node { label, children: None }
    }

    pub fn node(label: u32, left: BinTree, right: BinTree) -> Self {
        Self::Node { label, children: Some(Box::new((left, right))) }
    }

    /// Node with two empty children.
    pub fn bare(label: u32) -> Self {
        Self::node(label, Self::Empty, Self::Empty)
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Self::Empty)
    }

    pub fn label(&self) -> Option<u32> {
        match self {
            Self::Empty => None,
            Self::Node { label, .. } => Some(*label),
        }
    }

    pub fn children(&self) -> Option<(&BinTree, &BinTree)> {
        match self {
            Self::Node { children: Some(c), .. } => Some((&c.0, &c.1)),
            _ => None,
        }
    }

    pub fn left(&self) -> Option<&BinTree> {
        self.children().map(|c| c.0)
    }

    pub fn right(&self) -> Option<&BinTree> {
        self.children().map(|c| c.1)
    }

    /// Number of labelled nodes.
    pub fn size(&self) -> usize {
        match self {
            Self::Empty => 0,
            Self::Node { children, .. } => {
                1 + children.as_ref().map_or(0, |c| c.0.size() + c.1.size())
            }
        }
    }

    /// Number of empty leaves.
    pub fn emp(&self) -> usize {
        match self {
            Self::Empty => 1,
            Self::Node { children, .. } => children.as_ref().map_or(0, |c| c.0.emp() + c.1.emp()),
        }
    }

    pub fn labelled_leaves(&self) -> usize {
        match self {
            Self::Empty => 0,
            Self::Node { children: None, .. } => 1,
            Self::Node { children: Some(c), .. } => c.0.labelled_leaves() + c.1.labelled_leaves(),
        }
    }

    pub fn internal_nodes(&self) -> usize {
        match self {
            Self::Node { children: Some(c), .. } => 1 + c.0.internal_nodes() + c.1.internal_nodes(),
            _ => 0,
        }
    }

    /// Labels in preorder.
    pub fn labels(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Some(l) = t.label() {
                out.push(l);
            }
        });
        out
    }

    fn walk<F: FnMut(&BinTree)>(&self, f: &mut F) {
        f(self);
        if let Some((l, r)) = self.children() {
            l.walk(f);
            r.walk(f);
        }
    }

    pub fn find(&self, label: u32) -> Option<&BinTree> {
        match self {
            Self::Empty => None,
            Self::Node { label: l, children } => {
                if *l == label {
                    return Some(self);
                }
                let c = children.as_ref()?;
                c.0.find(label).or_else(|| c.1.find(label))
            }
        }
    }

    pub fn find_mut(&mut self, label: u32) -> Option<&mut BinTree> {
        match self {
            Self::Empty => None,
            Self::Node { label: l, .. } if *l == label => Some(self),
            Self::Node { children, .. } => {
                let c = children.as_mut()?;
                if c.0.find(label).is_some() {
                    c.0.find_mut(label)
                } else {
                    c.1.find_mut(label)
                }
            }
        }
    }

    /// Whether the node carrying `label` has two empty children.
    pub fn has_two_empty_children(&self, label: u32) -> bool {
        self.find(label)
            .and_then(|t| t.children())
            .is_some_and(|(l, r)| l.is_empty() && r.is_empty())
    }

    /// Turns the node carrying `label` into a labelled leaf; fails unless it
    /// had two empty children.
    pub fn drop_empty_children(&mut self, label: u32) -> bool {
        if !self.has_two_empty_children(label) {
            return false;
        }
        if let Some(Self::Node { children, .. }) = self.find_mut(label) {
            *children = None;
        }
        true
    }

    /// Checks completeness (by construction), increasing labels, and that the
    /// labels are exactly `1..=n`.
    pub fn validate(&self, n: usize) -> Result<(), TreeError> {
        let bad = |reason: String| TreeError::Invalid { n, reason };
        fn increasing(t: &BinTree, above: u32) -> bool {
            match t {
                BinTree::Empty => true,
                BinTree::Node { label, children } => {
                    *label > above
                        && children.as_ref().is_none_or(|c| increasing(&c.0, *label) && increasing(&c.1, *label))
                }
            }
        }
        if !increasing(self, 0) {
            return Err(bad("labels do not increase away from the root".into()));
        }
        let mut labels = self.labels();
        labels.sort_unstable();
        if labels != (1..=n as u32).collect::<Vec<_>>() {
            return Err(bad(format!("label set {labels:?}")));
        }
        Ok(())
    }
}

impl fmt::Display for BinTree {
    /// Preorder: `.` for an empty leaf, `k` for a labelled leaf, `k(L,R)`
    /// for a node with children.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => f.write_str("."),
            Self::Node { label, children: None } => write!(f, "{label}"),
            Self::Node { label, children: Some(c) } => write!(f, "{label}({},{})", c.0, c.1),
        }
    }
}

impl FromStr for BinTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        fn parse(b: &[u8], i: &mut usize) -> Option<BinTree> {
            if b.get(*i) == Some(&b'.') {
                *i += 1;
                return Some(BinTree::Empty);
            }
            let start = *i;
            while b.get(*i).is_some_and(u8::is_ascii_digit) {
                *i += 1;
            }
            let label: u32 = std::str::from_utf8(&b[start..*i]).ok()?.parse().ok()?;
            if b.get(*i) != Some(&b'(') {
                return Some(BinTree::leaf(label));
            }
            *i += 1;
            let l = parse(b, i)?;
            (b.get(*i) == Some(&b',')).then_some(())?;
            *i += 1;
            let r = parse(b, i)?;
            (b.get(*i) == Some(&b')')).then_some(())?;
            *i += 1;
            Some(BinTree::node(label, l, r))
        }
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let b = compact.as_bytes();
        let mut i = 0;
        match parse(b, &mut i) {
            Some(t) if i == b.len() => Ok(t),
            _ => Err(TreeError::Parse(s.to_string())),
        }
    }
}

// JSON: null | {"label":k} | {"label":k,"left":..,"right":..}
impl Serialize for BinTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Self::Empty => s.serialize_none(),
            Self::Node { label, children } => {
                let mut m = s.serialize_map(Some(if children.is_some() { 3 } else { 1 }))?;
                m.serialize_entry("label", label)?;
                if let Some(c) = children {
                    m.serialize_entry("left", &c.0)?;
                    m.serialize_entry("right", &c.1)?;
                }
                m.end()
            }
        }
    }
}

fn present<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BinTree>, D::Error> {
    BinTree::deserialize(d).map(Some)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    label: u32,
    #[serde(default, deserialize_with = "present")]
    left: Option<BinTree>,
    #[serde(default, deserialize_with = "present")]
    right: Option<BinTree>,
}

impl<'de> Deserialize<'de> for BinTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Option::<RawNode>::deserialize(d)? {
            None => Ok(Self::Empty),
            Some(RawNode { label, left: None, right: None }) => Ok(Self::leaf(label)),
            Some(RawNode { label, left: Some(l), right: Some(r) }) => Ok(Self::node(label, l, r)),
            Some(_) => Err(serde::de::Error::custom("a node needs both children or neither")),
        }
    }
}

// ---------------------------------------------------------------------------
// generation

fn gen_set(mask: u32, memo: &mut HashMap<u32, Vec<BinTree>>) -> Vec<BinTree> {
    if mask == 0 {
        return vec![BinTree::Empty];
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let root = mask.trailing_zeros();
    let rest = mask & !(1 << root);
    let mut out = Vec::new();
    if rest == 0 {
        out.push(BinTree::leaf(root));
    }
    // every ordered split of the remaining labels, left part ascending
    let mut sub = 0u32;
    loop {
        let lefts = gen_set(sub, memo);
        let rights = gen_set(rest & !sub, memo);
        for l in &lefts {
            for r in &rights {
                out.push(BinTree::node(root, l.clone(), r.clone()));
            }
        }
        if sub == rest {
            break;
        }
        sub = (sub.wrapping_sub(rest)) & rest;
    }
    memo.insert(mask, out.clone());
    out
}

/// Every complete increasing binary tree on `1..=n`, in a fixed order.
pub fn gen_trees(n: usize) -> Result<Vec<BinTree>, TreeError> {
    check_size(n)?;
    let full = ((1u32 << n) - 1) << 1;
    Ok(gen_set(full, &mut HashMap::new()))
}

/// Root, right child, right child, … down to the rightmost leaf.
pub fn rightmost_path(t: &BinTree) -> Vec<&BinTree> {
    let mut out = vec![t];
    let mut cur = t;
    while let Some(r) = cur.right() {
        out.push(r);
        cur = r;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TreeKind {
    /// Rightmost leaf is empty.
    #[serde(rename = "o")]
    Open,
    /// Rightmost leaf is labelled.
    #[serde(rename = "*")]
    Star,
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Open => "o",
            Self::Star => "*",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Classification {
    pub kind: TreeKind,
    /// Deepest labelled node on the rightmost path.
    pub rightmost_label: u32,
    pub emp: usize,
}

/// Panics on the empty tree.
pub fn classify(t: &BinTree) -> Classification {
    let path = rightmost_path(t);
    let last = path.last().expect("path is never empty");
    let kind = if last.is_empty() { TreeKind::Open } else { TreeKind::Star };
    let rightmost_label = path
        .iter()
        .rev()
        .find_map(|v| v.label())
        .expect("nonempty tree");
    Classification { kind, rightmost_label, emp: t.emp() }
}

/// Labels along the rightmost path.
pub fn rightmost_labels(t: &BinTree) -> Vec<u32> {
    rightmost_path(t).iter().filter_map(|v| v.label()).collect()
}

// ---------------------------------------------------------------------------
// increasing 1-2 trees

/// Non-plane increasing tree with at most two children, kept sorted by label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Tree12 {
    pub label: u32,
    pub children: Vec<Tree12>,
}

impl fmt::Display for Tree12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Min-split a sequence of distinct positive values into a 1-2 tree.
/// `None` for the empty sequence.
pub fn tree12_of(a: &[i32]) -> Option<Tree12> {
    let (i, &m) = a.iter().enumerate().min_by_key(|(_, x)| **x)?;
    let mut children: Vec<Tree12> = [&a[..i], &a[i + 1..]].into_iter().filter_map(tree12_of).collect();
    children.sort();
    Some(Tree12 { label: m as u32, children })
}
