//! Order-fixed compensated summation.

/// Neumaier-compensated sum, accumulated in iteration order.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

/// Two-pass mean: compensated first pass, then one residual correction.
///
/// A sequence of identical values returns that value exactly.
pub(crate) fn corrected_mean<I>(values: I) -> f64
where
    I: Iterator<Item = f64> + Clone,
{
    let n = values.clone().count();
    debug_assert!(n > 0);
    let n = n as f64;
    let first = compensated_sum(values.clone()) / n;
    let residual = compensated_sum(values.map(|x| x - first)) / n;
    first + residual
}
