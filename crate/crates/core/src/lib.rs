//! Exact enumeration, bijections and verification for the refined Arnold
//! families: signed cycle-up-down permutations, valley signed permutations,
//! flip classes of signed permutations, and complete increasing binary trees.

pub mod bijections;
pub mod families;
pub mod harness;
pub mod perm;
pub mod poly;
pub mod trees;
pub mod triangles;

pub use bijections::{BijectionError, BijectionId, NpTree};
pub use harness::{CheckResult, Golden, HarnessError, Status};
pub use families::{FamilyError, FamilyId, FamilyObject, FlipClass, PairingReport, Step};
pub use perm::{CycleForm, PermError, SignedPerm, StatReport};
pub use poly::{LaurentPoly, PolyError};
pub use triangles::{ArnoldRow, TriangleError};
pub use trees::{BinTree, Classification, Tree12, TreeError, TreeKind};
