//! The finite search space: admissible closed-loop controllability index
//! tuples and the row configurations of the feedback rows.

use std::fmt;

/// Nondecreasing tuple of closed-loop controllability indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CiTuple(pub Vec<usize>);

impl CiTuple {
    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }
}

impl fmt::Display for CiTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Strictly increasing 0-based chain indices whose end rows become the
/// feedback rows `M(s)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowConfig {
    pub blocks: Vec<usize>,
}

impl RowConfig {
    /// 1-based state positions `sigma_1 + ... + sigma_j` of the chosen rows.
    pub fn s_positions(&self, sigma: &[usize]) -> Vec<usize> {
        self.blocks
            .iter()
            .map(|&j| sigma[..=j].iter().sum())
            .collect()
    }

    /// Chains not in the configuration.
    pub fn complement(&self, l: usize) -> Vec<usize> {
        (0..l).filter(|j| !self.blocks.contains(j)).collect()
    }

    pub fn display(&self, sigma: &[usize]) -> String {
        let parts: Vec<String> = self
            .s_positions(sigma)
            .iter()
            .map(ToString::to_string)
            .collect();
        format!("({})", parts.join(","))
    }
}

/// Largest 1-based `k` with `sigma_k <= d`.
fn k_of(sigma: &[usize], d: usize) -> Option<usize> {
    sigma.iter().rposition(|&s| s <= d).map(|i| i + 1)
}

/// Single-dimension admissibility: `sigma_k <= d <= sigma_1 + ... + sigma_k`
/// with `k` the largest index such that `sigma_k <= d`.
pub fn is_admissible_dimension(sigma: &[usize], d: usize) -> bool {
    match k_of(sigma, d) {
        None => false,
        Some(k) => d <= sigma[..k].iter().sum(),
    }
}

/// All nondecreasing `m`-tuples whose prefix sums satisfy
/// `sum_{j<=i} st_j <= sum_{j<=k_i} sigma_j`, in lexicographic order.
pub fn enumerate_tuples(sigma: &[usize], m: usize) -> Vec<CiTuple> {
    let mut out = Vec::new();
    let Some(&first) = sigma.first() else {
        return out;
    };
    if m == 0 || m > sigma.len() {
        return out;
    }
    let n: usize = sigma.iter().sum();
    let mut current = Vec::with_capacity(m);
    extend_tuples(sigma, m, n, first, 0, &mut current, &mut out);
    out
}

fn extend_tuples(
    sigma: &[usize],
    m: usize,
    n: usize,
    min: usize,
    prefix: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<CiTuple>,
) {
    if current.len() == m {
        out.push(CiTuple(current.clone()));
        return;
    }
    let remaining = m - current.len();
    let mut d = min;
    while prefix + d * remaining <= n {
        if let Some(k) = k_of(sigma, d) {
            if prefix + d <= sigma[..k].iter().sum() {
                current.push(d);
                extend_tuples(sigma, m, n, d, prefix + d, current, out);
                current.pop();
            }
        }
        d += 1;
    }
}

/// All `C(l, l - m)` configurations in lexicographic order.
pub fn enumerate_row_configs(l: usize, m: usize) -> Vec<RowConfig> {
    let size = l.saturating_sub(m);
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(size);
    combinations(l, size, 0, &mut current, &mut out);
    out
}

fn combinations(
    l: usize,
    size: usize,
    from: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<RowConfig>,
) {
    if current.len() == size {
        out.push(RowConfig {
            blocks: current.clone(),
        });
        return;
    }
    for j in from..l {
        if l - j < size - current.len() {
            break;
        }
        current.push(j);
        combinations(l, size, j + 1, current, out);
        current.pop();
    }
}

/// Maximum number of configurations the search visits.
pub fn search_bound(sigma: &[usize], m: usize) -> usize {
    enumerate_tuples(sigma, m).len() * enumerate_row_configs(sigma.len(), m).len()
}
