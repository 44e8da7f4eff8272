//! Small numeric helpers shared across modules.

/// Hölder conjugate with the endpoint conventions `1' = ∞`, `∞' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `1/p` with `1/∞ = 0`.
pub fn recip(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

pub fn binomial(m: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Median of a nonempty sample (mean of the middle pair for even sizes).
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Indices of the largest values, ties broken by ascending index; zeros never selected.
pub fn top_cells(values: &[f64], cells: &[usize], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = cells.iter().copied().filter(|&c| values[c] > 0.0).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugates() {
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert!((conjugate(4.0) - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(recip(f64::INFINITY), 0.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(5, 5), 1.0);
        assert_eq!(factorial(4), 24.0);
        assert_eq!(factorial(0), 1.0);
    }

    #[test]
    fn medians_and_tops() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let v = [0.0, 5.0, 5.0, 1.0, 7.0];
        assert_eq!(top_cells(&v, &[0, 1, 2, 3, 4], 2), vec![4, 1]);
        assert_eq!(top_cells(&v, &[0, 3], 5), vec![3]);
    }
}
