// Copyright 2026 The Farsight Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Spherical Bessel functions of the first kind.
//!
//! Orders 0..=2 use closed forms. Higher orders are filled by upward
//! recurrence when the argument exceeds the highest order requested (the
//! recurrence is stable there) and by Miller's downward recurrence,
//! renormalized against the closed forms, otherwise. Small arguments use the
//! power series, which avoids the cancellation in the closed forms near zero.

/// Below this argument the power series is used for every order.
const SERIES_CUTOFF: f64 = 1.0;

/// Extra orders above the requested maximum where downward recurrence starts.
const MILLER_HEADROOM: usize = 60;

/// Values `j_0(z) ..= j_{n_max}(z)`.
pub fn spherical_jn_all(n_max: usize, z: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    fill_jn(&mut out, z);
    out
}

/// Single order `j_n(z)`.
pub fn spherical_jn(n: usize, z: f64) -> f64 {
    spherical_jn_all(n, z)[n]
}

/// Values and first derivatives `j_n'(z)` for orders `0..=n_max`.
///
/// Derivatives use `j_n' = (n j_{n-1} - (n+1) j_{n+1}) / (2n+1)`, which has
/// no `1/z` factor and is exact at the origin.
pub fn spherical_jn_with_derivs(n_max: usize, z: f64) -> (Vec<f64>, Vec<f64>) {
    let mut vals = vec![0.0; n_max + 2];
    fill_jn(&mut vals, z);
    let mut derivs = vec![0.0; n_max + 1];
    derivs[0] = -vals[1];
    for n in 1..=n_max {
        let nf = n as f64;
        derivs[n] = (nf * vals[n - 1] - (nf + 1.0) * vals[n + 1]) / (2.0 * nf + 1.0);
    }
    vals.truncate(n_max + 1);
    (vals, derivs)
}

fn fill_jn(out: &mut [f64], z: f64) {
    debug_assert!(!out.is_empty());
    if z.is_nan() {
        out.iter_mut().for_each(|v| *v = f64::NAN);
        return;
    }
    if z < 0.0 {
        // j_n(-z) = (-1)^n j_n(z)
        fill_jn(out, -z);
        for (n, v) in out.iter_mut().enumerate() {
            if n % 2 == 1 {
                *v = -*v;
            }
        }
        return;
    }
    let n_max = out.len() - 1;
    if z == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = 1.0;
        return;
    }
    if z < SERIES_CUTOFF {
        for (n, v) in out.iter_mut().enumerate() {
            *v = series(n, z);
        }
        return;
    }

    let (s, c) = z.sin_cos();
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    out[0] = j0;
    if n_max >= 1 {
        out[1] = j1;
    }
    if n_max >= 2 {
        out[2] = (3.0 / (z * z) - 1.0) * s / z - 3.0 * c / (z * z);
    }
    if n_max <= 2 {
        return;
    }

    if z > n_max as f64 {
        for n in 2..n_max {
            out[n + 1] = (2 * n + 1) as f64 / z * out[n] - out[n - 1];
        }
    } else {
        miller(out, z, j0, j1);
    }
}

/// `j_n(z) = z^n / (2n+1)!! * sum_k (-z^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))`
fn series(n: usize, z: f64) -> f64 {
    let mut lead = 1.0;
    for i in 1..=n {
        lead *= z / (2 * i + 1) as f64;
        if lead == 0.0 {
            return 0.0;
        }
    }
    let x = -0.5 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= x / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

fn miller(out: &mut [f64], z: f64, j0: f64, j1: f64) {
    let n_max = out.len() - 1;
    let start = n_max + MILLER_HEADROOM + z.ceil() as usize;
    out.iter_mut().for_each(|v| *v = 0.0);
    let mut above = 0.0;
    let mut current = 1e-250;
    for n in (1..=start).rev() {
        // j_{n-1} = (2n+1)/z j_n - j_{n+1}
        let below = (2 * n + 1) as f64 / z * current - above;
        if n <= n_max {
            out[n] = current;
        }
        above = current;
        current = below;
        if current.abs() > 1e250 {
            above *= 1e-250;
            current *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    out[0] = current;
    let scale = if j0.abs() >= j1.abs() { j0 / out[0] } else { j1 / out[1] };
    out.iter_mut().for_each(|v| *v *= scale);
    out[0] = j0;
    out[1] = j1;
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// `j_n(z) = 1/2 * int_{-1}^{1} cos(z t - n pi/2) P_n(t) dt`, evaluated with
    /// a composite Gauss-Legendre rule.
    fn integral_oracle(n: usize, z: f64) -> f64 {
        let (nodes, weights) = crate::optics::quadrature::gauss_legendre(60);
        let pieces = 128;
        let h = 2.0 / pieces as f64;
        let mut total = 0.0;
        for i in 0..pieces {
            let mid = -1.0 + (i as f64 + 0.5) * h;
            total += nodes
                .iter()
                .zip(&weights)
                .map(|(&t, &w)| {
                    let x = mid + 0.5 * h * t;
                    w * (z * x - n as f64 * PI / 2.0).cos() * legendre(n, x)
                })
                .sum::<f64>()
                * 0.5
                * h;
        }
        0.5 * total
    }

    fn legendre(n: usize, t: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, t);
        if n == 0 {
            return p0;
        }
        for k in 1..n {
            let p2 = ((2 * k + 1) as f64 * t * p1 - k as f64 * p0) / (k + 1) as f64;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    #[test]
    fn low_orders_at_origin() {
        let v = spherical_jn_all(4, 0.0);
        assert_eq!(v, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        let (_, d) = spherical_jn_with_derivs(3, 0.0);
        assert_eq!(d[0], 0.0);
        assert!((d[1] - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(d[2], 0.0);
    }

    #[test]
    fn j1_at_half_pi() {
        assert!((spherical_jn(1, PI / 2.0) - 4.0 / (PI * PI)).abs() < 1e-15);
        assert!((spherical_jn(0, PI / 2.0) - 2.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn matches_integral_representation() {
        for &z in &[1e-3, 0.3, 0.99, 1.0, 1.7, 3.0, 9.5, 25.0, 60.0, 400.0] {
            let all = spherical_jn_all(45, z);
            for n in 0..=45 {
                let expect = integral_oracle(n, z);
                let tol = 1e-13 * (1.0 + expect.abs().max(all[n].abs()));
                assert!(
                    (all[n] - expect).abs() <= tol.max(1e-15 * expect.abs()),
                    "n={n} z={z}: {} vs {}",
                    all[n],
                    expect
                );
            }
        }
    }

    #[test]
    fn relative_accuracy_in_decaying_regime() {
        // deep in the z << n regime the oracle loses relative accuracy, so
        // compare against the series, which is exact there
        for &z in &[1.2, 2.5] {
            let all = spherical_jn_all(40, z);
            for n in [10, 20, 30, 40] {
                let expect = series(n, z);
                assert!(((all[n] - expect) / expect).abs() < 1e-12, "n={n} z={z}");
            }
        }
    }

    #[test]
    fn sum_rule() {
        // sum_n (2n+1) j_n(z)^2 = 1
        for &z in &[0.0, 0.4, 2.0, 7.3, 30.0] {
            let all = spherical_jn_all(120, z);
            let s: f64 = all.iter().enumerate().map(|(n, j)| (2 * n + 1) as f64 * j * j).sum();
            assert!((s - 1.0).abs() < 1e-13, "z={z}: {s}");
        }
    }

    #[test]
    fn negative_argument_parity() {
        let a = spherical_jn_all(6, 2.3);
        let b = spherical_jn_all(6, -2.3);
        for n in 0..=6 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(b[n], sign * a[n]);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for &z in &[0.05, 0.7, 1.0, 3.3, 12.0] {
            let (_, d) = spherical_jn_with_derivs(20, z);
            let h = 1e-5;
            let up = spherical_jn_all(20, z + h);
            let dn = spherical_jn_all(20, z - h);
            for n in 0..=20 {
                let fd = (up[n] - dn[n]) / (2.0 * h);
                assert!((fd - d[n]).abs() < 1e-8 * (1.0 + d[n].abs()), "n={n} z={z}");
            }
        }
    }
}
