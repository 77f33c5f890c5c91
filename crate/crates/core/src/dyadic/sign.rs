//! Sign matrices ε_{ij}^n = r_i on Δ_n^j and the two column selections used by the
//! multiplicator counterexample.
//!
//! Interval Δ_n^j carries the sign pattern (ε_{1j}, ..., ε_{nj}); with b_i = (1 − ε_{ij})/2
//! the index is j = 1 + Σ_i b_i 2^{n−i}, i.e. the binary digits of (j − 1)2^{−n}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest n for which the full 2^n-column matrix is materialized.
pub const MAX_MATERIALIZED: u32 = 16;
/// Largest n whose interval indices fit in a u64.
pub const MAX_INDEXED: u32 = 63;

/// A set of 1-based interval indices of level `n`, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSet {
    pub n: u32,
    pub indices: Vec<u64>,
}

impl ColumnSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn patterns(&self) -> Vec<Vec<i8>> {
        self.indices
            .iter()
            .map(|&j| column_pattern(self.n, j))
            .collect()
    }

    /// The integer Gram matrix εᵀε of the selected columns restricted to rows 1..n.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let bits: Vec<u64> = self.indices.iter().map(|j| j - 1).collect();
        let n = self.n as i64;
        bits.iter()
            .map(|a| {
                bits.iter()
                    .map(|b| n - 2 * i64::from((a ^ b).count_ones()))
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignMatrix {
    pub n: u32,
    /// `rows[i][j]` is ε_{i+1, j+1}.
    pub rows: Vec<Vec<i8>>,
    pub selection: Option<ColumnSet>,
}

impl SignMatrix {
    /// ε_{ij} with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.rows[i - 1][j - 1]
    }

    pub fn column(&self, j: usize) -> Vec<i8> {
        self.rows.iter().map(|r| r[j - 1]).collect()
    }

    pub fn with_selection(mut self, selection: ColumnSet) -> Result<Self> {
        if selection.n != self.n {
            return Err(Error::InvalidInput(format!(
                "column set of level {} does not fit a level-{} matrix",
                selection.n, self.n
            )));
        }
        self.selection = Some(selection);
        Ok(self)
    }
}

pub fn sign_matrix(n: u32) -> Result<SignMatrix> {
    if n > MAX_MATERIALIZED {
        return Err(Error::TooLarge {
            what: "sign matrix",
            n: u64::from(n),
            limit: u64::from(MAX_MATERIALIZED),
        });
    }
    let cols = 1u64 << n;
    let rows = (1..=n)
        .map(|i| {
            (0..cols)
                .map(|c| if (c >> (n - i)) & 1 == 0 { 1 } else { -1 })
                .collect()
        })
        .collect();
    Ok(SignMatrix {
        n,
        rows,
        selection: None,
    })
}

/// Signs (ε_{1j}, ..., ε_{nj}) of the 1-based interval `j` of level n.
pub fn column_pattern(n: u32, j: u64) -> Vec<i8> {
    let c = j - 1;
    (1..=n)
        .map(|i| if (c >> (n - i)) & 1 == 0 { 1 } else { -1 })
        .collect()
}

/// Inverse of [`column_pattern`].
pub fn pattern_index(signs: &[i8]) -> u64 {
    let n = signs.len();
    1 + signs
        .iter()
        .enumerate()
        .filter(|(_, &s)| s < 0)
        .map(|(i, _)| 1u64 << (n - 1 - i))
        .sum::<u64>()
}

fn check_indexed(n: u32) -> Result<()> {
    if n > MAX_INDEXED {
        return Err(Error::TooLarge {
            what: "column selection",
            n: u64::from(n),
            limit: u64::from(MAX_INDEXED),
        });
    }
    Ok(())
}

/// n intervals of level n whose sign patterns are the columns of the Sylvester–Hadamard
/// matrix H_n[i][c] = (−1)^{popcount(i & c)}, so that εᵀε = nI on the selection.
pub fn hadamard_select(n: u32) -> Result<ColumnSet> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(u64::from(n)));
    }
    check_indexed(n)?;
    let mut indices: Vec<u64> = (0..u64::from(n))
        .map(|c| {
            let signs: Vec<i8> = (0..u64::from(n))
                .map(|r| if (r & c).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect();
            pattern_index(&signs)
        })
        .collect();
    indices.sort_unstable();
    Ok(ColumnSet { n, indices })
}

/// The n intervals of level n whose sign pattern has exactly one −1.
pub fn single_negative_select(n: u32) -> Result<ColumnSet> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "single-negative selection needs n >= 2, got {n}"
        )));
    }
    check_indexed(n)?;
    let mut indices: Vec<u64> = (1..=n).map(|i| 1 + (1u64 << (n - i))).collect();
    indices.sort_unstable();
    Ok(ColumnSet { n, indices })
}
