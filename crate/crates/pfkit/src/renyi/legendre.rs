//! Legendre polynomials and their clipped variants.

use std::sync::OnceLock;

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};

/// Highest index whose clipped coefficients are cached.
pub const CACHED_INDEX: usize = 64;

/// P_n(x) by the three-term recurrence.
pub fn legendre_poly(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, x);
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + 1.0) * x * cur - m * prev) / (m + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Exact coefficients of P_0..=P_n, lowest degree first.
pub fn exact_coefficients(n: usize) -> Vec<Vec<BigRational>> {
    let zero = BigRational::zero();
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    let mut table: Vec<Vec<BigRational>> = vec![vec![int(1)]];
    if n >= 1 {
        table.push(vec![zero.clone(), int(1)]);
    }
    for m in 1..n {
        let (a, b) = (&table[m], &table[m - 1]);
        let mut next = vec![zero.clone(); m + 2];
        for (j, c) in a.iter().enumerate() {
            next[j + 1] += c * int(2 * m + 1);
        }
        for (j, c) in b.iter().enumerate() {
            next[j] -= c * int(m);
        }
        let denom = int(m + 1);
        for c in next.iter_mut() {
            *c /= denom.clone();
        }
        table.push(next);
    }
    table.truncate(n + 1);
    table
}

fn clip(coeffs: &[BigRational]) -> Vec<f64> {
    coeffs.iter().map(|c| if c.is_negative() { 0.0 } else { c.to_f64().unwrap_or(f64::INFINITY) }).collect()
}

fn cached() -> &'static [Vec<f64>] {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| exact_coefficients(CACHED_INDEX).iter().map(|c| clip(c)).collect())
}

/// Q̄_n(x): P_n with its negative coefficients dropped, for x ≥ 1.
pub fn clipped_legendre(n: usize, x: f64) -> f64 {
    let owned;
    let coeffs: &[f64] = if n <= CACHED_INDEX {
        &cached()[n]
    } else {
        owned = clip(&exact_coefficients(n)[n]);
        &owned
    };
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(legendre_poly(0, 7.3), 1.0);
        assert_eq!(legendre_poly(2, 1.0), 1.0);
        assert!((legendre_poly(3, 2.0) - 17.0).abs() < 1e-12);
        assert_eq!(clipped_legendre(1, 5.0), 5.0);
        assert_eq!(clipped_legendre(2, 2.0), 6.0);
        assert_eq!(clipped_legendre(3, 1.0), 2.5);
    }

    #[test]
    fn exact_matches_closed_forms() {
        let t = exact_coefficients(4);
        let r = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        // P_4 = (35x^4 - 30x^2 + 3)/8
        assert_eq!(t[4], vec![r(3, 8), r(0, 1), r(-30, 8), r(0, 1), r(35, 8)]);
    }

    #[test]
    fn bounded_on_unit_interval() {
        for n in 0..=12 {
            for i in 0..=1000 {
                let x = -1.0 + 2.0 * i as f64 / 1000.0;
                assert!(legendre_poly(n, x).abs() <= 1.0 + 1e-12, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn clipped_dominates() {
        for n in 0..=20 {
            for i in 0..=200 {
                let x = i as f64 * 0.05;
                let p = legendre_poly(n, x);
                assert!(clipped_legendre(n, x) >= p - 1e-9 * p.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn float_evaluation_agrees_with_exact_polynomial() {
        let t = exact_coefficients(30);
        for n in [5, 17, 30] {
            let x = 1.7;
            let exact: f64 = t[n].iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64().unwrap());
            let rec = legendre_poly(n, x);
            assert!((exact - rec).abs() <= 1e-10 * rec.abs());
        }
    }

    #[test]
    fn uncached_index() {
        let x = 1.01;
        let v = clipped_legendre(70, x);
        assert!(v.is_finite() && v >= legendre_poly(70, x));
    }
}
