//! Euclidean projection onto a box intersected with one hyperplane (or just the box).

use alloc::vec;
use alloc::vec::Vec;

/// The set `{x : lo <= x <= hi, normal'x = rhs}`; without a normal, the box alone.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxHyperplane {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub normal: Option<Vec<f64>>,
    pub rhs: f64,
}

impl BoxHyperplane {
    /// `{x : sum(x) = 1, 0 <= x <= 1}`.
    pub fn simplex(n: usize) -> Self {
        Self { lo: vec![0.0; n], hi: vec![1.0; n], normal: Some(vec![1.0; n]), rhs: 1.0 }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn project(&self, v: &mut [f64]) {
        let Some(a) = &self.normal else {
            for (i, x) in v.iter_mut().enumerate() {
                *x = x.clamp(self.lo[i], self.hi[i]);
            }
            return;
        };
        // x(theta)_i = clamp(v_i - theta a_i): a'x(theta) is non-increasing in theta.
        let at = |theta: f64, i: usize| (v[i] - theta * a[i]).clamp(self.lo[i], self.hi[i]);
        let level = |theta: f64| (0..v.len()).map(|i| a[i] * at(theta, i)).sum::<f64>();

        let (mut left, mut right) = (-1.0f64, 1.0f64);
        let mut guard = 0;
        while level(left) < self.rhs && guard < 1100 {
            left *= 2.0;
            guard += 1;
        }
        guard = 0;
        while level(right) > self.rhs && guard < 1100 {
            right *= 2.0;
            guard += 1;
        }
        for _ in 0..200 {
            let mid = 0.5 * (left + right);
            if mid <= left || mid >= right {
                break;
            }
            if level(mid) > self.rhs {
                left = mid;
            } else {
                right = mid;
            }
        }
        let theta = 0.5 * (left + right);
        let mut x: Vec<f64> = (0..v.len()).map(|i| at(theta, i)).collect();

        // Solve exactly for theta on the free set identified by bisection.
        let free: Vec<bool> =
            (0..v.len()).map(|i| a[i] != 0.0 && x[i] > self.lo[i] && x[i] < self.hi[i]).collect();
        let (mut num, mut den) = (-self.rhs, 0.0);
        for i in 0..v.len() {
            if free[i] {
                num += a[i] * v[i];
                den += a[i] * a[i];
            } else {
                num += a[i] * x[i];
            }
        }
        if den > 0.0 {
            let exact = num / den;
            let candidate: Vec<f64> =
                (0..v.len()).map(|i| if free[i] { v[i] - exact * a[i] } else { x[i] }).collect();
            let tol = 1e-12;
            if (0..v.len()).all(|i| candidate[i] >= self.lo[i] - tol && candidate[i] <= self.hi[i] + tol) {
                x = candidate;
                for i in 0..v.len() {
                    x[i] = x[i].clamp(self.lo[i], self.hi[i]);
                }
            }
        }
        v.copy_from_slice(&x);
    }
}

/// Closest point to `v` with `sum(w) = 1` and `0 <= w <= 1`.
pub fn project_simplex_box(v: &[f64]) -> Vec<f64> {
    let mut w = v.to_vec();
    BoxHyperplane::simplex(v.len()).project(&mut w);
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn grid_projection_2d(v: [f64; 2]) -> [f64; 2] {
        let mut best = (f64::INFINITY, [0.0, 0.0]);
        for k in 0..=10_000 {
            let w0 = k as f64 * 1e-4;
            let w = [w0, 1.0 - w0];
            let d = (w[0] - v[0]).powi(2) + (w[1] - v[1]).powi(2);
            if d < best.0 {
                best = (d, w);
            }
        }
        best.1
    }

    #[test]
    fn examples() {
        let on = [0.2, 0.3, 0.5];
        let p = project_simplex_box(&on);
        for i in 0..3 {
            assert_abs_diff_eq!(p[i], on[i], epsilon = 1e-15);
        }
        assert_eq!(project_simplex_box(&[10.0, 0.0]), vec![1.0, 0.0]);
        let p = project_simplex_box(&[0.8, 0.4]);
        let g = grid_projection_2d([0.8, 0.4]);
        assert_abs_diff_eq!(p[0], 0.7, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(p[0], g[0], epsilon = 1e-4);
        assert_eq!(project_simplex_box(&[-3.0]), vec![1.0]);
    }

    #[test]
    fn weighted_hyperplane_with_open_box() {
        let set = BoxHyperplane {
            lo: vec![0.0; 3],
            hi: vec![f64::INFINITY; 3],
            normal: Some(vec![0.1, 0.2, 0.4]),
            rhs: 1.0,
        };
        let mut v = vec![5.0, -1.0, 2.0];
        set.project(&mut v);
        let level: f64 = v.iter().zip([0.1, 0.2, 0.4]).map(|(x, a)| x * a).sum();
        assert_abs_diff_eq!(level, 1.0, epsilon = 1e-12);
        assert!(v.iter().all(|&x| x >= 0.0));
    }

    proptest! {
        #[test]
        fn projection_is_feasible_and_idempotent(v in proptest::collection::vec(-5.0f64..5.0, 1..12)) {
            let p = project_simplex_box(&v);
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
            let pp = project_simplex_box(&p);
            for (a, b) in p.iter().zip(&pp) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }

        #[test]
        fn projection_satisfies_variational_inequality(
            v in proptest::collection::vec(-2.0f64..2.0, 2..8),
            seed in 0u64..1000,
        ) {
            use rand::SeedableRng;
            let p = project_simplex_box(&v);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..20 {
                let y = crate::solvers::uniform_simplex(&mut rng, v.len());
                let ip: f64 = (0..v.len()).map(|i| (v[i] - p[i]) * (y[i] - p[i])).sum();
                prop_assert!(ip <= 1e-10);
            }
        }
    }
}
