//! Integer ground truth: divisor counts, their partial sums, and the
//! part-count statistics of partitions into distinct parts.

use crate::error::{Error, Result};

/// Divisor counts `d(1), ..., d(n_max)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    counts: Vec<u32>,
}

impl DivisorTable {
    pub fn n_max(&self) -> usize {
        self.counts.len()
    }

    /// `d(k)` for `1 <= k <= n_max`.
    pub fn get(&self, k: usize) -> u32 {
        assert!(k >= 1 && k <= self.counts.len(), "divisor index {k} out of range");
        self.counts[k - 1]
    }

    /// Counts in index order, `as_slice()[k - 1] == d(k)`.
    pub fn as_slice(&self) -> &[u32] {
        &self.counts
    }
}

/// Multiples sieve: every `k` increments each of its multiples.
pub fn divisor_sieve(n_max: usize) -> Result<DivisorTable> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if n_max > u32::MAX as usize {
        return Err(Error::Overflow("divisor table size"));
    }
    let mut counts = vec![0u32; n_max];
    for k in 1..=n_max {
        for m in (k..=n_max).step_by(k) {
            counts[m - 1] += 1;
        }
    }
    Ok(DivisorTable { counts })
}

/// `out[n - 1] = d(1) + ... + d(n)`.
pub fn divisor_partial_sums(table: &DivisorTable) -> Result<Vec<u64>> {
    let mut acc = 0u64;
    table
        .counts
        .iter()
        .map(|&d| {
            acc = acc.checked_add(d as u64).ok_or(Error::Overflow("divisor partial sum"))?;
            Ok(acc)
        })
        .collect()
}

/// Total part counts over partitions of `k` into distinct parts, split by the
/// parity of the number of parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionStats {
    /// `s_odd[k]`, index 0 unused and zero.
    pub s_odd: Vec<u64>,
    /// `s_even[k]`, index 0 unused and zero.
    pub s_even: Vec<u64>,
}

impl PartitionStats {
    pub fn n_max(&self) -> usize {
        self.s_odd.len() - 1
    }

    /// `s_odd[k] - s_even[k]` for `k = 0..=n_max`.
    pub fn differences(&self) -> Vec<i128> {
        self.s_odd
            .iter()
            .zip(&self.s_even)
            .map(|(&o, &e)| o as i128 - e as i128)
            .collect()
    }
}

/// Largest order accepted by [`distinct_partition_stats_enumerated`].
pub const ENUMERATION_CAP: usize = 80;

/// Part-count statistics by a knapsack-style dynamic program over parts.
///
/// State `[sum][parity]` holds the number of partitions and the total number
/// of parts among them; adding part `p` moves a partition to
/// `[sum + p][!parity]` and adds one part to each moved partition.
pub fn distinct_partition_stats(n_max: usize) -> Result<PartitionStats> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    // count[s][par], parts[s][par]; par 0 = even number of parts
    let mut count = vec![[0u64; 2]; n_max + 1];
    let mut parts = vec![[0u64; 2]; n_max + 1];
    count[0][0] = 1;
    let overflow = || Error::Overflow("distinct partition statistics");
    for p in 1..=n_max {
        for s in (p..=n_max).rev() {
            for par in 0..2 {
                let c = count[s - p][par];
                if c == 0 {
                    continue;
                }
                let moved_parts = parts[s - p][par].checked_add(c).ok_or_else(overflow)?;
                let to = 1 - par;
                count[s][to] = count[s][to].checked_add(c).ok_or_else(overflow)?;
                parts[s][to] = parts[s][to].checked_add(moved_parts).ok_or_else(overflow)?;
            }
        }
    }
    let mut s_odd = vec![0u64; n_max + 1];
    let mut s_even = vec![0u64; n_max + 1];
    for k in 1..=n_max {
        s_odd[k] = parts[k][1];
        s_even[k] = parts[k][0];
    }
    Ok(PartitionStats { s_odd, s_even })
}

/// The same statistics by listing every partition into distinct parts.
/// Exponential; limited to `n_max <= ENUMERATION_CAP`.
pub fn distinct_partition_stats_enumerated(n_max: usize) -> Result<PartitionStats> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if n_max > ENUMERATION_CAP {
        return Err(Error::InvalidArgument(format!(
            "enumeration is limited to n_max <= {ENUMERATION_CAP}"
        )));
    }
    let mut s_odd = vec![0u64; n_max + 1];
    let mut s_even = vec![0u64; n_max + 1];
    for k in 1..=n_max {
        let (mut odd, mut even) = (0u64, 0u64);
        let mut stack = Vec::new();
        enumerate_distinct(k, k, &mut stack, &mut |parts: &[usize]| {
            if parts.len() % 2 == 1 {
                odd += parts.len() as u64;
            } else {
                even += parts.len() as u64;
            }
        });
        s_odd[k] = odd;
        s_even[k] = even;
    }
    Ok(PartitionStats { s_odd, s_even })
}

/// Visits partitions of `rest` into distinct parts, each part `<= max_part`,
/// in decreasing order.
fn enumerate_distinct(
    rest: usize,
    max_part: usize,
    stack: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if rest == 0 {
        visit(stack);
        return;
    }
    for part in (1..=max_part.min(rest)).rev() {
        // the remaining parts are distinct and below `part`
        if part * (part + 1) / 2 < rest {
            break;
        }
        stack.push(part);
        enumerate_distinct(rest - part, part - 1, stack, visit);
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(k: usize) -> u32 {
        (1..=k).filter(|d| k % d == 0).count() as u32
    }

    fn is_prime(n: usize) -> bool {
        n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn sieve_small_values() {
        assert_eq!(divisor_sieve(1).unwrap().as_slice(), &[1]);
        let t = divisor_sieve(100).unwrap();
        assert_eq!(t.get(12), 6);
        assert_eq!(t.get(100), trial_division(100));
        assert_eq!(t.get(100), 9);
    }

    #[test]
    fn sieve_rejects_zero() {
        assert!(matches!(divisor_sieve(0), Err(Error::InvalidArgument(_))));
        assert!(distinct_partition_stats(0).is_err());
    }

    #[test]
    fn sieve_invariants() {
        let t = divisor_sieve(2000).unwrap();
        assert_eq!(t.get(1), 1);
        for k in 2..=2000 {
            let d = t.get(k);
            assert!(d >= 2);
            assert!(d as usize <= k);
            if is_prime(k) {
                assert_eq!(d, 2);
            }
            let r = (k as f64).sqrt().round() as usize;
            assert_eq!(d % 2 == 1, r * r == k, "parity of d({k})");
        }
        for k in 1..=300 {
            assert_eq!(t.get(k), trial_division(k));
        }
    }

    #[test]
    fn partial_sums_match_floor_sums() {
        let t = divisor_sieve(500).unwrap();
        let sums = divisor_partial_sums(&t).unwrap();
        assert_eq!(sums[0], 1);
        assert_eq!(sums[2], 5);
        for n in 1..=500u64 {
            let floor_sum: u64 = (1..=n).map(|k| n / k).sum();
            assert_eq!(sums[n as usize - 1], floor_sum);
        }
    }

    #[test]
    fn partition_stats_examples() {
        let s = distinct_partition_stats(6).unwrap();
        assert_eq!((s.s_odd[1], s.s_even[1]), (1, 0));
        assert_eq!(s.s_even[2], 0);
        assert_eq!((s.s_odd[3], s.s_even[3]), (1, 2));
        assert_eq!((s.s_odd[6], s.s_even[6]), (4, 4));
    }

    #[test]
    fn dynamic_program_agrees_with_enumeration() {
        let dp = distinct_partition_stats(40).unwrap();
        let en = distinct_partition_stats_enumerated(40).unwrap();
        assert_eq!(dp, en);
        assert!(dp.s_odd[1..].iter().all(|&v| v >= 1));
    }

    #[test]
    fn enumeration_is_capped() {
        assert!(distinct_partition_stats_enumerated(ENUMERATION_CAP + 1).is_err());
        assert!(distinct_partition_stats(200).is_ok());
    }
}
