//! Maps from cycle-up-down permutations, valley signed permutations and flip
//! classes onto complete increasing binary trees.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{
    self, cud_shape, enumerate, object_index, FamilyError, FamilyId, FamilyObject, FlipClass,
};
use crate::perm::{cycle_form, peak_positions, valley_positions, SignedPerm};
use crate::trees::{classify, BinTree, TreeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BijectionError {
    #[error("{perm} is not in {family}")]
    NotInFamily { family: FamilyId, perm: String },
    #[error("no unique peak after valley at position {valley} of {perm}")]
    MissingPeak { perm: String, valley: usize },
    #[error("entries of {0:?} are not distinct")]
    MalformedSequence(Vec<i32>),
    #[error("cycle {0:?} does not start at its least absolute value or is not up-down")]
    MalformedCycle(Vec<i32>),
    #[error("members of the class of {canon} map to different trees")]
    NotWellDefined { canon: String },
    #[error("{first} and {second} map to the same tree")]
    NotInjective { first: String, second: String },
    #[error("unknown bijection {0:?}")]
    Unknown(String),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Splits at the least entry: `(left, min, right)`.
pub fn double_bracket(a: &[i32]) -> Option<(&[i32], i32, &[i32])> {
    let (i, &m) = a.iter().enumerate().min_by_key(|(_, x)| **x)?;
    Some((&a[..i], m, &a[i + 1..]))
}

/// Replaces the i-th smallest entry by the i-th largest; positions stay put.
pub fn complement(a: &[i32]) -> Vec<i32> {
    let mut sorted = a.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    a.iter()
        .map(|x| sorted[n - 1 - sorted.binary_search(x).expect("entry of a")])
        .collect()
}

fn distinct(a: &[i32]) -> bool {
    let mut s = a.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1])
}

/// Complete increasing tree with unordered children; every leaf is empty.
/// Children are stored labelled-first, then by label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NpTree {
    Node { label: u32, children: Box<[NpTree; 2]> },
    Empty,
}

impl NpTree {
    fn node(label: u32, a: NpTree, b: NpTree) -> Self {
        // derived Ord puts Node before Empty and compares labels first
        let children = if a <= b { [a, b] } else { [b, a] };
        Self::Node { label, children: Box::new(children) }
    }

    pub fn label(&self) -> Option<u32> {
        match self {
            Self::Node { label, .. } => Some(*label),
            Self::Empty => None,
        }
    }

    pub fn children(&self) -> Option<&[NpTree; 2]> {
        match self {
            Self::Node { children, .. } => Some(children),
            Self::Empty => None,
        }
    }
}

impl fmt::Display for NpTree {
    /// Bracketing: `(1(2(3)))`; empty children are omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty => Ok(()),
            Self::Node { label, children } => {
                write!(f, "({label}")?;
                for c in children.iter() {
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn algo1_rec(a: &[i32]) -> NpTree {
    if a.is_empty() {
        return NpTree::Empty;
    }
    let pos = |v: i32| a.iter().position(|&x| x == v).expect("present");
    let (mn, mx) = (*a.iter().min().expect("nonempty"), *a.iter().max().expect("nonempty"));
    let owned;
    let a = if pos(mx) < pos(mn) {
        owned = complement(a);
        &owned[..]
    } else {
        a
    };
    let (l, m, r) = double_bracket(a).expect("nonempty");
    NpTree::node(m as u32, algo1_rec(l), algo1_rec(r))
}

/// Donaghey-style decomposition of a sequence of distinct positive integers
/// into a non-plane complete increasing tree.
pub fn algo1(a: &[i32]) -> Result<NpTree, BijectionError> {
    if !distinct(a) || a.iter().any(|&x| x <= 0) {
        return Err(BijectionError::MalformedSequence(a.to_vec()));
    }
    Ok(algo1_rec(a))
}

fn plane(t: &NpTree, sign: &HashMap<u32, bool>) -> BinTree {
    match t {
        NpTree::Empty => BinTree::Empty,
        NpTree::Node { label, children } => {
            let negative = sign[label];
            let [a, b] = &**children;
            match (a.label(), b.label()) {
                (None, None) if negative => BinTree::leaf(*label),
                (None, None) => BinTree::bare(*label),
                // canonical order puts a lone labelled child first
                (Some(_), None) | (None, Some(_)) => {
                    let child = plane(if a.label().is_some() { a } else { b }, sign);
                    if negative {
                        BinTree::node(*label, BinTree::Empty, child)
                    } else {
                        BinTree::node(*label, child, BinTree::Empty)
                    }
                }
                (Some(_), Some(_)) => {
                    let (small, large) = (plane(a, sign), plane(b, sign));
                    if negative {
                        BinTree::node(*label, large, small)
                    } else {
                        BinTree::node(*label, small, large)
                    }
                }
            }
        }
    }
}

/// One cycle of a signed cycle-up-down permutation to a plane tree whose
/// root is the cycle leader with an empty right child.
pub fn algo2(cycle: &[i32]) -> Result<BinTree, BijectionError> {
    let bad = || BijectionError::MalformedCycle(cycle.to_vec());
    let abs: Vec<i32> = cycle.iter().map(|x| x.abs()).collect();
    if cycle.is_empty() || cycle[0] <= 0 || !distinct(&abs) || abs.iter().any(|&x| x < abs[0]) {
        return Err(bad());
    }
    let up_down = abs.windows(2).enumerate().all(|(i, w)| (w[0] < w[1]) == (i % 2 == 0));
    if !up_down {
        return Err(bad());
    }
    let np = algo1(&abs)?;
    let sign: HashMap<u32, bool> = cycle.iter().map(|&x| (x.unsigned_abs(), x < 0)).collect();
    let t = plane(&np, &sign);
    match t.right() {
        Some(BinTree::Empty) => Ok(t),
        _ => Err(bad()),
    }
}

fn graft_chain(mut trees: Vec<BinTree>) -> BinTree {
    let mut acc = trees.pop().expect("at least one cycle");
    while let Some(t) = trees.pop() {
        acc = match t {
            BinTree::Node { label, children: Some(c) } => BinTree::node(label, c.0, acc),
            _ => unreachable!("cycle trees have an empty right child at the root"),
        };
    }
    acc
}

fn require(f: FamilyId, p: &SignedPerm) -> Result<(), BijectionError> {
    if families::contains(f, p.window()) {
        Ok(())
    } else {
        Err(BijectionError::NotInFamily { family: f, perm: p.to_string() })
    }
}

fn phi_cud(p: &SignedPerm) -> Result<BinTree, BijectionError> {
    let shape = cud_shape(p.window())
        .ok_or_else(|| BijectionError::NotInFamily { family: FamilyId::CudB, perm: p.to_string() })?;
    let cf = cycle_form(p);
    let mut trees = Vec::with_capacity(cf.cycles.len());
    for c in &cf.cycles {
        if c.bracket {
            trees.push(BinTree::leaf(c.leader() as u32));
        } else {
            trees.push(algo2(&c.entries)?);
        }
    }
    debug_assert_eq!(shape.d_type, cf.last().bracket);
    Ok(graft_chain(trees))
}

pub fn phi_cud_b(p: &SignedPerm) -> Result<BinTree, BijectionError> {
    require(FamilyId::CudB, p)?;
    phi_cud(p)
}

pub fn phi_cud_d(p: &SignedPerm) -> Result<BinTree, BijectionError> {
    require(FamilyId::CudD, p)?;
    phi_cud(p)
}

/// Min-split where the part left of the minimum becomes the right subtree.
pub fn algo3(a: &[i32]) -> BinTree {
    match double_bracket(a) {
        None => BinTree::Empty,
        Some((l, m, r)) => BinTree::node(m as u32, algo3(r), algo3(l)),
    }
}

fn phi_vs(p: &SignedPerm) -> Result<BinTree, BijectionError> {
    let w = p.window();
    let abs = p.abs_values();
    let mut t = algo3(&abs);
    if w[0] < 0 && !t.drop_empty_children(abs[0] as u32) {
        return Err(BijectionError::MissingPeak { perm: p.to_string(), valley: 0 });
    }
    let valleys = valley_positions(&abs);
    let peaks = peak_positions(&abs);
    for (i, &v) in valleys.iter().enumerate() {
        if w[v + 1] > 0 {
            continue;
        }
        let upper = valleys.get(i + 1).copied().unwrap_or(usize::MAX);
        let mut between = peaks.iter().filter(|&&q| v < q && q < upper);
        let missing = || BijectionError::MissingPeak { perm: p.to_string(), valley: v };
        let q = *between.next().ok_or_else(missing)?;
        if between.next().is_some() || !t.drop_empty_children(abs[q] as u32) {
            return Err(missing());
        }
    }
    Ok(t)
}

pub fn phi_vs_b(p: &SignedPerm) -> Result<BinTree, BijectionError> {
    require(FamilyId::VsB, p)?;
    phi_vs(p)
}

pub fn phi_vs_d(p: &SignedPerm) -> Result<BinTree, BijectionError> {
    require(FamilyId::VsD, p)?;
    phi_vs(p)
}

/// Tree of a signed word under the four-case min-split (`min ∅ = +∞`).
pub fn tau_flip(w: &[i32]) -> BinTree {
    let Some((i, &pivot)) = w.iter().enumerate().min_by_key(|(_, x)| x.abs()) else {
        return BinTree::Empty;
    };
    let label = pivot.unsigned_abs();
    let (l, r) = (&w[..i], &w[i + 1..]);
    if l.is_empty() && r.is_empty() {
        return if pivot < 0 { BinTree::leaf(label) } else { BinTree::bare(label) };
    }
    let min_abs = |s: &[i32]| s.iter().map(|x| x.abs()).min().unwrap_or(i32::MAX);
    let left_first = (min_abs(l) < min_abs(r)) == (pivot > 0);
    let (tl, tr) = (tau_flip(l), tau_flip(r));
    if left_first {
        BinTree::node(label, tl, tr)
    } else {
        BinTree::node(label, tr, tl)
    }
}

/// The tree of a flip class; every member must give the same tree.
pub fn phi_f(c: &FlipClass) -> Result<BinTree, BijectionError> {
    let t = tau_flip(c.canon.window());
    if c.members.iter().any(|m| tau_flip(m.window()) != t) {
        return Err(BijectionError::NotWellDefined { canon: c.canon.to_string() });
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BijectionId {
    CudB,
    CudD,
    VsB,
    VsD,
    Flip,
}

impl BijectionId {
    pub const ALL: [BijectionId; 5] = [Self::CudB, Self::CudD, Self::VsB, Self::VsD, Self::Flip];

    pub fn tag(self) -> &'static str {
        match self {
            Self::CudB => "cud-b",
            Self::CudD => "cud-d",
            Self::VsB => "vs-b",
            Self::VsD => "vs-d",
            Self::Flip => "flip",
        }
    }

    /// Domain families, in output order.
    pub fn families(self) -> &'static [FamilyId] {
        match self {
            Self::CudB => &[FamilyId::CudB],
            Self::CudD => &[FamilyId::CudD],
            Self::VsB => &[FamilyId::VsB],
            Self::VsD => &[FamilyId::VsD],
            Self::Flip => &[FamilyId::FlB, FamilyId::FlD],
        }
    }

    /// Codomain kinds; `None` means all of `𝒯_n`.
    pub fn kind(self) -> Option<TreeKind> {
        match self {
            Self::CudB | Self::VsB => Some(TreeKind::Open),
            Self::CudD | Self::VsD => Some(TreeKind::Star),
            Self::Flip => None,
        }
    }

    pub fn apply(self, o: &FamilyObject) -> Result<BinTree, BijectionError> {
        let perm = || {
            o.as_perm().ok_or_else(|| BijectionError::Unknown(format!("{} expects a permutation", self.tag())))
        };
        match self {
            Self::CudB => phi_cud_b(perm()?),
            Self::CudD => phi_cud_d(perm()?),
            Self::VsB => phi_vs_b(perm()?),
            Self::VsD => phi_vs_d(perm()?),
            Self::Flip => phi_f(
                o.as_class()
                    .ok_or_else(|| BijectionError::Unknown("flip expects a class".into()))?,
            ),
        }
    }
}

impl fmt::Display for BijectionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BijectionId {
    type Err = BijectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|b| b.tag() == s)
            .ok_or_else(|| BijectionError::Unknown(s.to_string()))
    }
}

/// One source object with its tree and family index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MapPair {
    pub source: FamilyObject,
    pub target: BinTree,
    pub index: usize,
}

/// Applies a map to its whole domain at size `n`.
pub fn map_all(b: BijectionId, n: usize) -> Result<Vec<MapPair>, BijectionError> {
    let mut out = Vec::new();
    for &f in b.families() {
        for o in enumerate(f, n)? {
            let target = b.apply(&o)?;
            let index = object_index(f, &o);
            out.push(MapPair { source: o, target, index });
        }
    }
    Ok(out)
}

/// Inverse as a lookup table built from the forward map.
pub fn inverse_table(b: BijectionId, n: usize) -> Result<HashMap<BinTree, FamilyObject>, BijectionError> {
    let mut table: HashMap<BinTree, FamilyObject> = HashMap::new();
    for pair in map_all(b, n)? {
        if let Some(prev) = table.get(&pair.target) {
            return Err(BijectionError::NotInjective {
                first: prev.window().iter().map(i32::to_string).collect::<Vec<_>>().join(" "),
                second: pair.source.window().iter().map(i32::to_string).collect::<Vec<_>>().join(" "),
            });
        }
        table.insert(pair.target, pair.source);
    }
    Ok(table)
}

/// Whether a tree's kind and rightmost label match what a map promises.
pub fn lands_in(b: BijectionId, t: &BinTree, index: usize, smax_negative: bool) -> bool {
    let c = classify(t);
    let kind_ok = match b.kind() {
        Some(k) => c.kind == k,
        None => c.kind == if smax_negative { TreeKind::Star } else { TreeKind::Open },
    };
    kind_ok && c.rightmost_label as usize == index
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::CycleForm;
    use crate::trees::rightmost_labels;

    fn sp(w: &[i32]) -> SignedPerm {
        SignedPerm::from_window(w).unwrap()
    }

    fn cf(s: &str) -> SignedPerm {
        s.parse::<CycleForm>().unwrap().to_perm().unwrap()
    }

    fn t(s: &str) -> BinTree {
        s.parse().unwrap()
    }

    #[test]
    fn splits_and_complements() {
        assert_eq!(double_bracket(&[1, 3, 2]), Some((&[][..], 1, &[3, 2][..])));
        assert_eq!(double_bracket(&[9, 8]), Some((&[9][..], 8, &[][..])));
        assert_eq!(double_bracket(&[7, 4, 9, 8]), Some((&[7][..], 4, &[9, 8][..])));
        assert_eq!(double_bracket(&[]), None);
        assert_eq!(complement(&[9, 8]), [8, 9]);
        assert_eq!(complement(&[5]), [5]);
        assert_eq!(complement(&[2, 6, 3]), [6, 2, 3]);
    }

    #[test]
    fn bracketings() {
        assert_eq!(algo1(&[1, 3, 2]).unwrap().to_string(), "(1(2(3)))");
        assert_eq!(algo1(&[5, 6]).unwrap().to_string(), "(5(6))");
        assert_eq!(algo1(&[7, 9, 8]).unwrap().to_string(), "(7(8(9)))");
        assert_eq!(algo1(&[1, 9, 2]).unwrap().to_string(), "(1(2(9)))");
        assert_eq!(algo1(&[3, 4]).unwrap().to_string(), "(3(4))");
        assert_eq!(algo1(&[5, 8, 6]).unwrap().to_string(), "(5(6(8)))");
        assert_eq!(algo1(&[2, 6, 3, 7, 4, 9, 8]).unwrap().to_string(), "(2(3(4(7)(8(9)))(6)))");
        assert!(algo1(&[1, 1]).is_err());
    }

    #[test]
    fn cycle_trees() {
        assert_eq!(algo2(&[1, -3, -2]).unwrap(), t("1(2(.,3),.)"));
        assert_eq!(algo2(&[4]).unwrap(), t("4(.,.)"));
        assert_eq!(algo2(&[5, -6]).unwrap(), t("5(6,.)"));
        assert_eq!(algo2(&[7, 9, -8]).unwrap(), t("7(8(.,9(.,.)),.)"));
        let big = algo2(&[2, -6, 3, 7, -4, -9, 8]).unwrap();
        assert_eq!(big.right(), Some(&BinTree::Empty));
        assert_eq!(big.size(), 7);
        assert!(algo2(&[2, 1]).is_err());
        assert!(algo2(&[1, 2, 3]).is_err());
    }

    #[test]
    fn cud_running_examples() {
        let b = phi_cud_b(&cf("(1,-3,-2)(4)(5,-6)(7,9,-8)")).unwrap();
        assert_eq!(b, t("1(2(.,3),4(.,5(6,7(8(.,9(.,.)),.))))"));
        let c = classify(&b);
        assert_eq!((c.kind, c.rightmost_label), (TreeKind::Open, 7));
        assert_eq!(rightmost_labels(&b), [1, 4, 5, 7]);

        let d = phi_cud_d(&cf("(1,-9,-2)(3,4)(5,8,-6)(7,-7)")).unwrap();
        let c = classify(&d);
        assert_eq!((c.kind, c.rightmost_label), (TreeKind::Star, 7));
        assert_eq!(rightmost_labels(&d), [1, 3, 5, 7]);
        d.validate(9).unwrap();

        assert_eq!(phi_cud_b(&cf("(1)")).unwrap(), BinTree::bare(1));
        assert!(phi_cud_b(&cf("(1)(2,-2)")).is_err());
        assert!(phi_cud_d(&cf("(1,2)")).is_err());
    }

    #[test]
    fn valley_tree_examples() {
        let a3 = algo3(&[7, 5, 1, 3, 4, 2, 6]);
        assert_eq!(a3, t("1(2(6(.,.),3(4(.,.),.)),5(.,7(.,.)))"));
        assert_eq!(algo3(&[4]), BinTree::bare(4));

        let s = sp(&[7, 5, -6, 8, 9, 4, 1, -3, 2]);
        let tree = phi_vs_b(&s).unwrap();
        let plain = algo3(&s.abs_values());
        for label in [9, 3] {
            assert!(plain.has_two_empty_children(label));
            assert_eq!(tree.find(label), Some(&BinTree::leaf(label)));
        }
        assert_eq!(tree.emp() + 4, plain.emp());
        let c = classify(&tree);
        assert_eq!((c.kind, c.rightmost_label), (TreeKind::Open, 7));

        let s = sp(&[-7, 5, 8, 6, 3, 4, 1, -9, 2]);
        let tree = phi_vs_d(&s).unwrap();
        for label in [7, 9] {
            assert_eq!(tree.find(label), Some(&BinTree::leaf(label)));
        }
        let c = classify(&tree);
        assert_eq!((c.kind, c.rightmost_label), (TreeKind::Star, 7));
        assert_eq!(phi_vs_b(&sp(&[1])).unwrap(), BinTree::bare(1));
        assert!(phi_vs_b(&sp(&[-1])).is_err());
    }

    #[test]
    fn flip_trees() {
        let cls = families::flip_classes_signed(3).unwrap();
        let c = cls.iter().find(|c| c.members.contains(&sp(&[1, -2, 3]))).unwrap();
        assert_eq!(c.members.len(), 4);
        let tree = phi_f(c).unwrap();
        assert_eq!(tree, t("1(2(.,3(.,.)),.)"));
        let k = classify(&tree);
        assert_eq!((k.kind, k.rightmost_label), (TreeKind::Open, 1));

        let cls = families::flip_classes_signed(4).unwrap();
        let c = cls.iter().find(|c| c.members.contains(&sp(&[-2, -4, 1, -3]))).unwrap();
        let tree = phi_f(c).unwrap();
        let k = classify(&tree);
        assert_eq!((k.kind, k.rightmost_label), (TreeKind::Star, 3));
        assert_eq!(tree, t("1(2(.,4),3)"));

        assert_eq!(tau_flip(&[-1]), BinTree::leaf(1));
    }

    #[test]
    fn inverse_tables_invert() {
        for b in BijectionId::ALL {
            for n in 1..=4 {
                let table = inverse_table(b, n).unwrap();
                for pair in map_all(b, n).unwrap() {
                    assert_eq!(table[&pair.target], pair.source);
                }
            }
        }
    }

    #[test]
    fn ids() {
        for b in BijectionId::ALL {
            assert_eq!(b.tag().parse::<BijectionId>().unwrap(), b);
        }
        assert!("nope".parse::<BijectionId>().is_err());
    }
}
