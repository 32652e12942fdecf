//! Signed permutations, their cycle forms, and the permutation statistics.
//!
//! A signed permutation of `[n]` is stored by its window `σ_1 … σ_n`; the
//! extension to `±[n]` is implicit through `σ(-i) = -σ(i)`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("empty window")]
    Empty,
    #[error("zero entry at position {position}")]
    ZeroEntry { position: usize },
    #[error("absolute value {value} appears more than once")]
    RepeatedAbsValue { value: u32 },
    #[error("absolute value {value} is outside 1..={n}")]
    AbsValueOutOfRange { value: u32, n: usize },
    #[error("cycle form is not of cycle-up-down type: {0}")]
    MalformedCudCycleForm(String),
    #[error("cannot parse cycle notation: {0}")]
    Parse(String),
}

/// A signed permutation in window notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct SignedPerm {
    window: Vec<i32>,
}

impl SignedPerm {
    pub fn from_window(window: &[i32]) -> Result<Self, PermError> {
        if window.is_empty() {
            return Err(PermError::Empty);
        }
        let n = window.len();
        let mut seen = vec![false; n + 1];
        for (i, &x) in window.iter().enumerate() {
            if x == 0 {
                return Err(PermError::ZeroEntry { position: i + 1 });
            }
            let a = x.unsigned_abs();
            if a as usize > n {
                return Err(PermError::AbsValueOutOfRange { value: a, n });
            }
            if seen[a as usize] {
                return Err(PermError::RepeatedAbsValue { value: a });
            }
            seen[a as usize] = true;
        }
        Ok(Self { window: window.to_vec() })
    }

    /// Builds from a window already known to be valid.
    pub(crate) fn from_window_unchecked(window: Vec<i32>) -> Self {
        debug_assert!(Self::from_window(&window).is_ok(), "{window:?}");
        Self { window }
    }

    pub fn identity(n: usize) -> Self {
        Self { window: (1..=n as i32).collect() }
    }

    pub fn n(&self) -> usize {
        self.window.len()
    }

    pub fn window(&self) -> &[i32] {
        &self.window
    }

    /// `σ(i)` for `i ∈ ±[n]`.
    pub fn apply(&self, i: i32) -> i32 {
        let v = self.window[i.unsigned_abs() as usize - 1];
        if i > 0 {
            v
        } else {
            -v
        }
    }

    /// The unsigned permutation `|σ_1| … |σ_n|`.
    pub fn abs_values(&self) -> Vec<i32> {
        self.window.iter().map(|x| x.abs()).collect()
    }

    pub fn is_unsigned(&self) -> bool {
        self.window.iter().all(|&x| x > 0)
    }

    pub fn cycle_form(&self) -> CycleForm {
        cycle_form(self)
    }

    pub fn neg(&self) -> u32 {
        stat_neg(self)
    }

    pub fn spk(&self) -> u32 {
        stat_spk(self)
    }

    pub fn smax(&self) -> i32 {
        stat_smax(&self.window).expect("window is nonempty")
    }
}

impl TryFrom<Vec<i32>> for SignedPerm {
    type Error = PermError;

    fn try_from(window: Vec<i32>) -> Result<Self, Self::Error> {
        Self::from_window(&window)
    }
}

impl From<SignedPerm> for Vec<i32> {
    fn from(p: SignedPerm) -> Self {
        p.window
    }
}

impl fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.window.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// One cycle of a signed permutation.
///
/// A non-bracket cycle stands for itself and its negated mirror; a bracket
/// cycle is a single orbit containing both `a` and `-a` and stores the whole
/// orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cycle {
    pub entries: Vec<i32>,
    pub bracket: bool,
}

impl Cycle {
    pub fn leader(&self) -> i32 {
        self.entries[0]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True for the two-entry bracket cycle `(a, -a)`.
    pub fn is_sign_flip(&self) -> bool {
        self.bracket && self.entries.len() == 2
    }
}

/// Canonical cycle notation: every cycle starts at `+m` where `m` is its least
/// absolute value, and cycles are ordered by `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleForm {
    pub cycles: Vec<Cycle>,
}

impl CycleForm {
    pub fn n(&self) -> usize {
        self.cycles.iter().map(|c| if c.bracket { c.len() / 2 } else { c.len() }).sum()
    }

    pub fn last(&self) -> &Cycle {
        self.cycles.last().expect("cycle form of a nonempty permutation")
    }

    /// Rebuilds the window. Fails if the cycles do not describe a signed
    /// permutation.
    pub fn to_perm(&self) -> Result<SignedPerm, PermError> {
        let n = self.n();
        if n == 0 {
            return Err(PermError::Empty);
        }
        if self.cycles.iter().any(|c| c.entries.is_empty()) {
            return Err(PermError::Parse("empty cycle".into()));
        }
        let raw: Vec<Vec<i32>> = self.cycles.iter().map(|c| c.entries.clone()).collect();
        let p = perm_from_cycles(n, &raw)?;
        if cycle_form(&p) != *self {
            return Err(PermError::Parse(format!("not in canonical form: {self}")));
        }
        Ok(p)
    }
}

impl fmt::Display for CycleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cycles {
            f.write_str("(")?;
            for (j, x) in c.entries.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for CycleForm {
    type Err = PermError;

    /// Parses `(1,-2,4)(3)(5,-5)`; a cycle holding both `a` and `-a` is a
    /// bracket cycle. The result must already be canonical.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut cycles = Vec::new();
        let mut rest = s.as_str();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .and_then(|r| r.split_once(')'))
                .ok_or_else(|| PermError::Parse(s.clone()))?;
            let entries = body
                .0
                .split(',')
                .map(|t| t.parse::<i32>().map_err(|_| PermError::Parse(s.clone())))
                .collect::<Result<Vec<_>, _>>()?;
            let abs: HashSet<i32> = entries.iter().map(|x| x.abs()).collect();
            let bracket = abs.len() < entries.len();
            cycles.push(Cycle { entries, bracket });
            rest = body.1;
        }
        let cf = CycleForm { cycles };
        cf.to_perm()?;
        Ok(cf)
    }
}

/// Builds the permutation described by arbitrary (not necessarily canonical)
/// cycles: every listed cycle maps `c_j ↦ c_{j+1}`, and its mirror is implied.
pub fn perm_from_cycles(n: usize, cycles: &[Vec<i32>]) -> Result<SignedPerm, PermError> {
    let mut window = vec![0i32; n];
    for c in cycles {
        for (j, &x) in c.iter().enumerate() {
            let y = c[(j + 1) % c.len()];
            let (at, val) = if x > 0 { (x, y) } else { (-x, -y) };
            if at == 0 || at as usize > n {
                return Err(PermError::AbsValueOutOfRange { value: at.unsigned_abs(), n });
            }
            let slot = &mut window[at as usize - 1];
            if *slot != 0 && *slot != val {
                return Err(PermError::RepeatedAbsValue { value: at.unsigned_abs() });
            }
            *slot = val;
        }
    }
    SignedPerm::from_window(&window)
}

pub fn cycle_form(p: &SignedPerm) -> CycleForm {
    let n = p.n();
    let mut seen = vec![false; n + 1];
    let mut cycles = Vec::new();
    for m in 1..=n as i32 {
        if seen[m as usize] {
            continue;
        }
        let mut entries = vec![m];
        let mut x = p.apply(m);
        while x != m {
            entries.push(x);
            x = p.apply(x);
        }
        let bracket = entries.contains(&-m);
        for e in &entries {
            seen[e.unsigned_abs() as usize] = true;
        }
        cycles.push(Cycle { entries, bracket });
    }
    CycleForm { cycles }
}

pub fn is_special(c: &CycleForm) -> bool {
    c.cycles.iter().all(|c| !c.bracket)
}

/// Zero-based positions of the valleys: interior local minima, plus the first
/// position when `a_1 < a_2`. Empty for sequences shorter than two.
pub fn valley_positions<T: Ord>(a: &[T]) -> Vec<usize> {
    let n = a.len();
    if n < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    if a[0] < a[1] {
        out.push(0);
    }
    out.extend((1..n - 1).filter(|&i| a[i - 1] > a[i] && a[i] < a[i + 1]));
    out
}

/// Zero-based positions of the peaks: interior local maxima, plus the last
/// position when `a_n > a_{n-1}`.
pub fn peak_positions<T: Ord>(a: &[T]) -> Vec<usize> {
    let n = a.len();
    if n < 2 {
        return Vec::new();
    }
    let mut out: Vec<usize> = (1..n - 1).filter(|&i| a[i - 1] < a[i] && a[i] > a[i + 1]).collect();
    if a[n - 1] > a[n - 2] {
        out.push(n - 1);
    }
    out
}

pub fn left_to_right_minima<T: Ord + Copy>(a: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    for &x in a {
        if out.last().is_none_or(|&m| x < m) {
            out.push(x);
        }
    }
    out
}

pub fn stat_neg(p: &SignedPerm) -> u32 {
    p.window.iter().filter(|&&x| x < 0).count() as u32
}

/// Negative entries reached by an ascent in absolute value, counted cycle by
/// cycle; a final `(k,-k)` cycle counts once.
pub fn stat_npk(c: &CycleForm) -> Result<u32, PermError> {
    let last = c.cycles.len().saturating_sub(1);
    let mut count = 0;
    for (i, cyc) in c.cycles.iter().enumerate() {
        if cyc.bracket {
            if i == last && cyc.is_sign_flip() {
                count += 1;
                continue;
            }
            return Err(PermError::MalformedCudCycleForm(format!("bracket cycle in {c}")));
        }
        if cyc.leader() <= 0 {
            return Err(PermError::MalformedCudCycleForm(format!("non-positive leader in {c}")));
        }
        count += cyc
            .entries
            .windows(2)
            .filter(|w| w[1] < 0 && w[1].abs() >= w[0].abs())
            .count() as u32;
    }
    Ok(count)
}

/// Negative entries that are peaks of `|σ|` padded by zeros on both ends.
pub fn stat_spk(p: &SignedPerm) -> u32 {
    let w = &p.window;
    let n = w.len();
    let abs_at = |i: usize| if i == 0 || i > n { 0 } else { w[i - 1].abs() };
    (1..=n)
        .filter(|&i| w[i - 1] < 0 && abs_at(i - 1) < abs_at(i) && abs_at(i) > abs_at(i + 1))
        .count() as u32
}

/// Signed maximum of a word with pairwise distinct absolute values, found by
/// repeatedly splitting at the entry of least absolute value. `None` for the
/// empty word.
pub fn stat_smax(word: &[i32]) -> Option<i32> {
    let (i, &pivot) = word.iter().enumerate().min_by_key(|(_, x)| x.abs())?;
    let (left, right) = (&word[..i], &word[i + 1..]);
    let min_abs = |s: &[i32]| s.iter().map(|x| x.abs()).min();
    Some(match (left.is_empty(), right.is_empty()) {
        (true, true) => pivot,
        (true, false) if pivot > 0 => pivot,
        (true, false) => stat_smax(right)?,
        (false, true) if pivot > 0 => pivot,
        (false, true) => stat_smax(left)?,
        (false, false) => {
            let left_smaller = min_abs(left) < min_abs(right);
            // positive pivot follows the side with the larger minimum,
            // negative pivot the side with the smaller one
            if left_smaller == (pivot < 0) {
                stat_smax(left)?
            } else {
                stat_smax(right)?
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatReport {
    pub neg: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub npk: Option<u32>,
    pub spk: u32,
    pub smax: i32,
    pub valleys: usize,
    pub peaks: usize,
    pub ltr_min: usize,
}

impl StatReport {
    /// `npk` is filled in only when the cycle form is of cycle-up-down type.
    pub fn of(p: &SignedPerm) -> Self {
        let abs = p.abs_values();
        Self {
            neg: stat_neg(p),
            npk: stat_npk(&cycle_form(p)).ok(),
            spk: stat_spk(p),
            smax: p.smax(),
            valleys: valley_positions(&abs).len(),
            peaks: peak_positions(&abs).len(),
            ltr_min: left_to_right_minima(&abs).len(),
        }
    }
}
