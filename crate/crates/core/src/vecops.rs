//! Small dense-vector helpers shared by the solvers.
//!
//! Reductions use Neumaier compensated summation and a fixed left-to-right
//! order, so they are bit-reproducible regardless of thread count.

/// Compensated sum in index order.
pub fn sum(xs: &[f64]) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for &x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

pub fn sum_iter(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_iter(a.iter().zip(b).map(|(x, y)| x * y))
}

pub fn l1_norm(xs: &[f64]) -> f64 {
    sum_iter(xs.iter().map(|x| x.abs()))
}

pub fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_iter(a.iter().zip(b).map(|(x, y)| (x - y).abs()))
}

pub fn linf_dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn linf_norm(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Scales `xs` so that its entries sum to one. No-op on a zero-sum vector.
pub fn normalize_sum(xs: &mut [f64]) {
    let s = sum(xs);
    if s != 0.0 {
        let inv = 1.0 / s;
        xs.iter_mut().for_each(|x| *x *= inv);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum(&xs), 2.0);
    }

    #[test]
    fn distances() {
        let a = [1.0, -2.0, 3.0];
        let b = [0.5, -2.0, 4.0];
        assert_eq!(l1_dist(&a, &b), 1.5);
        assert_eq!(linf_dist(&a, &b), 1.0);
        assert_eq!(l1_norm(&a), 6.0);
        assert_eq!(linf_norm(&a), 3.0);
        assert_eq!(dot(&a, &b), 0.5 + 4.0 + 12.0);
    }

    #[test]
    fn normalize() {
        let mut v = [1.0, 3.0];
        normalize_sum(&mut v);
        assert_eq!(v, [0.25, 0.75]);
        let mut z = [0.0, 0.0];
        normalize_sum(&mut z);
        assert_eq!(z, [0.0, 0.0]);
    }
}
