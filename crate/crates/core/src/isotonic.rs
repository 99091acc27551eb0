//! Pool-adjacent-violators projection onto non-increasing sequences.

/// Euclidean projection of `y` onto `{x : x_0 ≥ x_1 ≥ … }`.
pub fn project_nonincreasing(y: &[f64]) -> Vec<f64> {
    // blocks of (mean, count), merged while a later block exceeds an earlier one
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(y.len());
    for &v in y {
        let mut mean = v;
        let mut count = 1usize;
        while let Some(&(m, c)) = blocks.last() {
            if m >= mean {
                break;
            }
            blocks.pop();
            mean = (m * c as f64 + mean * count as f64) / (c + count) as f64;
            count += c;
        }
        blocks.push((mean, count));
    }
    let mut out = Vec::with_capacity(y.len());
    for (m, c) in blocks {
        out.extend(std::iter::repeat(m).take(c));
    }
    out
}
