//! Entringer triangle, Arnold's double triangle, the Arnold–Hoffman polynomial
//! triangle, and Hoffman's derivative polynomials.
//!
//! Hoffman's `P_n`, `Q_n` are defined by `dⁿ/dxⁿ tan x = P_n(tan x)` and
//! `dⁿ/dxⁿ sec x = Q_n(tan x) sec x`. With `u = tan x`, `u' = 1 + u²` and
//! `sec' = u · sec`, so the chain rule gives
//!
//! ```text
//! P_{n+1} = (1 + t²) P_n'          P_1 = 1 + t²
//! Q_{n+1} = (1 + t²) Q_n' + t Q_n   Q_1 = t
//! ```

use serde::Serialize;
use thiserror::Error;

use crate::poly::{LaurentPoly, PolyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("n_max must be at least 1")]
    EmptyRange,
    #[error("64-bit overflow while computing row {row}")]
    Overflow { row: usize },
    #[error("row {row}, k={k}: negative exponent survived the recurrence")]
    NegativeExponent { row: usize, k: i64 },
}

/// One row of a double triangle: `neg[j]` is the value at `k = -(n-j)`,
/// `pos[j]` the value at `k = j+1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArnoldRow<T> {
    pub n: usize,
    pub neg: Vec<T>,
    pub pos: Vec<T>,
}

impl<T> ArnoldRow<T> {
    /// Value at signed index `k`, `1 ≤ |k| ≤ n`.
    pub fn get(&self, k: i64) -> Option<&T> {
        let n = self.n as i64;
        match k {
            1.. if k <= n => self.pos.get(k as usize - 1),
            ..=-1 if -k <= n => self.neg.get((n + k) as usize),
            _ => None,
        }
    }

    /// `(k, value)` pairs from `k = -n` to `k = n`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, &T)> + '_ {
        let n = self.n as i64;
        let neg = self.neg.iter().enumerate().map(move |(j, v)| (j as i64 - n, v));
        let pos = self.pos.iter().enumerate().map(|(j, v)| (j as i64 + 1, v));
        neg.chain(pos)
    }
}

/// `E_{n,k}` rows, `rows[n-1][k-1]`.
pub fn entringer(n_max: usize) -> Result<Vec<Vec<u64>>, TriangleError> {
    if n_max == 0 {
        return Err(TriangleError::EmptyRange);
    }
    let mut rows: Vec<Vec<u64>> = vec![vec![1]];
    for n in 2..=n_max {
        let prev = &rows[n - 2];
        let mut row = vec![0u64; n];
        for k in 2..=n {
            row[k - 1] = row[k - 2]
                .checked_add(prev[n - k])
                .ok_or(TriangleError::Overflow { row: n })?;
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Shared boustrophedon driver. `down` is applied to `v_{n-1,k}` on the way
/// down the negative side, `bridge` turns `v_{n,-1}` into `v_{n,1}`, and `up`
/// is applied to `v_{n-1,-k+1}` on the positive side.
fn boustrophedon<T, A, D, B, U>(
    n_max: usize,
    first: ArnoldRow<T>,
    zero: T,
    add: A,
    down: D,
    bridge: B,
    up: U,
) -> Result<Vec<ArnoldRow<T>>, TriangleError>
where
    T: Clone,
    A: Fn(&T, &T) -> Option<T>,
    D: Fn(&T) -> Option<T>,
    B: Fn(&T) -> Option<T>,
    U: Fn(&T) -> Option<T>,
{
    if n_max == 0 {
        return Err(TriangleError::EmptyRange);
    }
    let mut rows = vec![first];
    for n in 2..=n_max {
        let of = || TriangleError::Overflow { row: n };
        let prev = &rows[n - 2];
        let mut neg = vec![zero.clone(); n];
        // neg[j] holds k = -(n-j); neg[0] = v_{n,-n} = 0
        for k in (1..n).rev() {
            let j = n - k;
            let term = down(prev.get(k as i64).expect("k < n")).ok_or_else(of)?;
            neg[j] = add(&neg[j - 1], &term).ok_or_else(of)?;
        }
        let mut pos = Vec::with_capacity(n);
        pos.push(bridge(&neg[n - 1]).ok_or_else(of)?);
        for k in 2..=n {
            let term = up(prev.get(-(k as i64) + 1).expect("k-1 < n")).ok_or_else(of)?;
            let v = add(&pos[k - 2], &term).ok_or_else(of)?;
            pos.push(v);
        }
        rows.push(ArnoldRow { n, neg, pos });
    }
    Ok(rows)
}

pub fn arnold_numbers(n_max: usize) -> Result<Vec<ArnoldRow<u64>>, TriangleError> {
    boustrophedon(
        n_max,
        ArnoldRow { n: 1, neg: vec![1], pos: vec![1] },
        0u64,
        |a, b| a.checked_add(*b),
        |v| Some(*v),
        |v| Some(*v),
        |v| Some(*v),
    )
}

pub fn arnold_hoffman(n_max: usize) -> Result<Vec<ArnoldRow<LaurentPoly>>, TriangleError> {
    let rows = boustrophedon(
        n_max,
        ArnoldRow { n: 1, neg: vec![LaurentPoly::one()], pos: vec![LaurentPoly::monomial(1, 2)] },
        LaurentPoly::zero(),
        |a, b| a.checked_add(b).ok(),
        |v| Some(v.shift(-1)),
        |v| Some(v.shift(2)),
        |v| Some(v.shift(1)),
    )?;
    for row in &rows {
        for (k, v) in row.entries() {
            if !v.has_nonnegative_exponents() {
                return Err(TriangleError::NegativeExponent { row: row.n, k });
            }
        }
    }
    Ok(rows)
}

/// `(P_n, Q_n)` for `n = 1..=n_max`.
pub fn hoffman_pq(n_max: usize) -> Result<Vec<(LaurentPoly, LaurentPoly)>, TriangleError> {
    if n_max == 0 {
        return Err(TriangleError::EmptyRange);
    }
    let one_plus_t2 = LaurentPoly::from_terms([(0, 1), (2, 1)]).expect("small");
    let mut out = vec![(one_plus_t2.clone(), LaurentPoly::monomial(1, 1))];
    for n in 2..=n_max {
        let of = |_: PolyError| TriangleError::Overflow { row: n };
        let (p, q) = out.last().expect("seeded");
        let p_next = one_plus_t2.checked_mul(&p.derivative().map_err(of)?).map_err(of)?;
        let q_next = one_plus_t2
            .checked_mul(&q.derivative().map_err(of)?)
            .and_then(|x| x.checked_add(&q.shift(1)))
            .map_err(of)?;
        out.push((p_next, q_next));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoffmanRowCheck {
    pub n: usize,
    pub t_q: LaurentPoly,
    pub pos_sum: LaurentPoly,
    pub p_minus_t_q: LaurentPoly,
    pub neg_sum: LaurentPoly,
    pub pass: bool,
}

/// Checks `t·Q_n = Σ_{k>0} V_{n,k}` and `P_n − t·Q_n = Σ_{k>0} V_{n,-k}`.
pub fn check_hoffman_identities(n_max: usize) -> Result<Vec<HoffmanRowCheck>, TriangleError> {
    let rows = arnold_hoffman(n_max)?;
    let pq = hoffman_pq(n_max)?;
    rows.iter()
        .zip(&pq)
        .map(|(row, (p, q))| {
            let of = |_: PolyError| TriangleError::Overflow { row: row.n };
            let sum = |vs: &[LaurentPoly]| {
                vs.iter().try_fold(LaurentPoly::zero(), |acc, v| acc.checked_add(v))
            };
            let t_q = q.shift(1);
            let pos_sum = sum(&row.pos).map_err(of)?;
            let neg_sum = sum(&row.neg).map_err(of)?;
            let p_minus_t_q = p.checked_sub(&t_q).map_err(of)?;
            let pass = t_q == pos_sum && p_minus_t_q == neg_sum;
            Ok(HoffmanRowCheck { n: row.n, t_q, pos_sum, p_minus_t_q, neg_sum, pass })
        })
        .collect()
}
