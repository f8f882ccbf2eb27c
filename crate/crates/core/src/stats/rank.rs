/// Ascending ranks `1..=n`; tied values share the mean of their positions.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && values[order[j]] == values[order[i]] {
            j += 1;
        }
        // positions i+1 ..= j
        let r = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = r;
        }
        i = j;
    }
    ranks
}

/// `Σ (t³ − t)` over groups of tied values.
pub fn tie_correction_sum(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    tie_group_sizes(&sorted)
        .into_iter()
        .map(|t| {
            let t = t as f64;
            t * t * t - t
        })
        .sum()
}

/// Sizes of runs of equal values in an already-sorted slice.
pub(crate) fn tie_group_sizes(sorted: &[f64]) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        sizes.push(j - i);
        i = j;
    }
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_mid_ranks() {
        assert_eq!(mid_ranks(&[10.0, 20.0, 20.0, 30.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(mid_ranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(mid_ranks(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
        assert_eq!(mid_ranks(&[1.0, 2.0, 3.0, 4.0]), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(mid_ranks(&[]).is_empty());
    }

    #[test]
    fn tie_sums() {
        assert_eq!(tie_correction_sum(&[1.0, 2.0, 3.0]), 0.0);
        // one pair (6) and one triple (24)
        assert_eq!(tie_correction_sum(&[4.0, 1.0, 4.0, 2.0, 2.0, 2.0]), 30.0);
    }
}
