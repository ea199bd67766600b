/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `Σ_{k=0}^{k_max} C(n, k)`.
pub fn subset_count(n: usize, k_max: usize) -> u128 {
    (0..=k_max.min(n)).map(|k| binomial(n, k)).sum()
}

/// All subsets of `0..n` with at most `k_max` elements, by size and then in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct Subsets {
    n: usize,
    k_max: usize,
    current: Option<Vec<usize>>,
}

impl Subsets {
    pub fn new(n: usize, k_max: usize) -> Self {
        Subsets {
            n,
            k_max: k_max.min(n),
            current: Some(Vec::new()),
        }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        // Advance to the next k-combination, or to the first (k+1)-combination.
        let mut i = k;
        loop {
            if i == 0 {
                self.current = if k < self.k_max {
                    Some((0..k + 1).collect())
                } else {
                    None
                };
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}
