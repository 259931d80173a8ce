//! Small statistics helpers, generic over the float type.

use num_traits::Float;

pub fn mean<S: Float>(xs: &[S]) -> S {
    if xs.is_empty() {
        return S::zero();
    }
    xs.iter().fold(S::zero(), |acc, &x| acc + x) / S::from(xs.len()).unwrap()
}

/// Median; the mean of the two middle values for even lengths.
pub fn median<S: Float>(xs: &[S]) -> S {
    if xs.is_empty() {
        return S::zero();
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        (v[mid - 1] + v[mid]) / S::from(2).unwrap()
    }
}

/// Median of the means of consecutive groups of `group_size` samples.
pub fn median_of_means<S: Float>(xs: &[S], group_size: usize) -> S {
    let means: Vec<S> = xs.chunks(group_size.max(1)).map(mean).collect();
    median(&means)
}

/// Linear-interpolated quantile, `q` in `[0, 1]`.
pub fn quantile<S: Float>(xs: &[S], q: S) -> S {
    if xs.is_empty() {
        return S::zero();
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let pos = q.max(S::zero()).min(S::one()) * S::from(v.len() - 1).unwrap();
    let lo = pos.floor().to_usize().unwrap();
    let hi = pos.ceil().to_usize().unwrap();
    let frac = pos - S::from(lo).unwrap();
    v[lo] + (v[hi] - v[lo]) * frac
}

/// Average ranks (1-based), ties sharing the mean rank.
fn ranks<S: Float>(xs: &[S]) -> Vec<S> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).expect("no NaN"));
    let mut out = vec![S::zero(); xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = S::from(i + j + 2).unwrap() / S::from(2).unwrap();
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman<S: Float>(xs: &[S], ys: &[S]) -> S {
    assert_eq!(xs.len(), ys.len());
    let (rx, ry) = (ranks(xs), ranks(ys));
    let (mx, my) = (mean(&rx), mean(&ry));
    let mut num = S::zero();
    let mut dx = S::zero();
    let mut dy = S::zero();
    for (&a, &b) in rx.iter().zip(&ry) {
        num = num + (a - mx) * (b - my);
        dx = dx + (a - mx) * (a - mx);
        dy = dy + (b - my) * (b - my);
    }
    if dx == S::zero() || dy == S::zero() {
        return S::zero();
    }
    num / (dx * dy).sqrt()
}

/// Total-variation distance between empirical counts and the uniform law on
/// `support` outcomes. Outcomes missing from `counts` count as zero.
pub fn tv_from_uniform<S: Float>(counts: &[u64], support: usize) -> S {
    let total: u64 = counts.iter().sum();
    if total == 0 || support == 0 {
        return S::one();
    }
    let u = S::one() / S::from(support).unwrap();
    let t = S::from(total).unwrap();
    let seen: S = counts
        .iter()
        .map(|&c| (S::from(c).unwrap() / t - u).abs())
        .fold(S::zero(), |a, b| a + b);
    let unseen = S::from(support.saturating_sub(counts.len())).unwrap() * u;
    (seen + unseen) / S::from(2).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        assert_eq!(mean(&[1.0, 2.0, 6.0]), 3.0);
        assert_eq!(median(&[5.0f32, 1.0, 3.0]), 3.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median_of_means(&[1.0, 1.0, 10.0, 10.0, 3.0, 3.0], 2), 3.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5), 3.0);
        assert_eq!(quantile(&[1.0, 2.0], 0.5), 1.5);
    }

    #[test]
    fn spearman_signs() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman(&x, &[10.0, 20.0, 25.0, 40.0, 50.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
        assert_eq!(spearman(&x, &[1.0; 5]), 0.0);
    }

    #[test]
    fn tv() {
        assert_eq!(tv_from_uniform::<f64>(&[25, 25, 25, 25], 4), 0.0);
        assert!((tv_from_uniform::<f64>(&[50, 50], 4) - 0.5).abs() < 1e-12);
    }
}
