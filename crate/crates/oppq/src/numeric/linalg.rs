use super::EnergyPolynomial;
use crate::{Error, Result};
use rug::Float;

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det(m: &[Vec<Float>]) -> Float {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix required");
    let bits = m[0][0].prec();
    let mut a: Vec<Vec<Float>> = m.to_vec();
    let mut d = Float::with_val(bits, 1);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].cmp_abs(&a[j][k]).unwrap_or(std::cmp::Ordering::Equal))
            .expect("non-empty");
        if a[p][k].is_zero() {
            return Float::new(bits);
        }
        if p != k {
            a.swap(p, k);
            d = -d;
        }
        d *= &a[k][k];
        for i in k + 1..n {
            let f = Float::with_val(bits, &a[i][k] / &a[k][k]);
            for j in k..n {
                let t = Float::with_val(bits, &f * &a[k][j]);
                a[i][j] -= t;
            }
        }
    }
    d
}

/// A null vector of a (numerically) singular square matrix, normalized so
/// that its largest component is one. Full pivoting; the last pivot is taken
/// as the vanishing one.
pub fn null_vector(m: &[Vec<Float>]) -> Result<Vec<Float>> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("square matrix required".into()));
    }
    let bits = m[0][0].prec();
    let mut a: Vec<Vec<Float>> = m.to_vec();
    let mut cols: Vec<usize> = (0..n).collect();
    for k in 0..n - 1 {
        let mut best = (k, k);
        for i in k..n {
            for j in k..n {
                if a[i][j].cmp_abs(&a[best.0][best.1]) == Some(std::cmp::Ordering::Greater) {
                    best = (i, j);
                }
            }
        }
        a.swap(k, best.0);
        for row in a.iter_mut() {
            row.swap(k, best.1);
        }
        cols.swap(k, best.1);
        if a[k][k].is_zero() {
            break;
        }
        for i in k + 1..n {
            let f = Float::with_val(bits, &a[i][k] / &a[k][k]);
            for j in k..n {
                let t = Float::with_val(bits, &f * &a[k][j]);
                a[i][j] -= t;
            }
        }
    }
    // back substitution with the last permuted unknown set to one
    let mut y = vec![Float::new(bits); n];
    y[n - 1] = Float::with_val(bits, 1);
    for k in (0..n - 1).rev() {
        if a[k][k].is_zero() {
            y[k] = Float::new(bits);
            continue;
        }
        let mut s = Float::new(bits);
        for j in k + 1..n {
            s += Float::with_val(bits, &a[k][j] * &y[j]);
        }
        y[k] = -s / &a[k][k];
    }
    let mut x = vec![Float::new(bits); n];
    for (k, &c) in cols.iter().enumerate() {
        x[c] = y[k].clone();
    }
    let big = x
        .iter()
        .max_by(|p, q| p.cmp_abs(q).unwrap_or(std::cmp::Ordering::Equal))
        .cloned()
        .expect("non-empty");
    for v in x.iter_mut() {
        *v /= &big;
    }
    Ok(x)
}

/// Determinant of a square matrix of polynomials by row expansion with
/// memoization over column subsets (cost n·2^n products).
pub fn poly_det(m: &[Vec<EnergyPolynomial>]) -> EnergyPolynomial {
    let n = m.len();
    assert!(n > 0 && n <= 16 && m.iter().all(|r| r.len() == n), "square matrix required");
    let prec = m[0][0].prec();
    let mut f: Vec<Option<EnergyPolynomial>> = vec![None; 1 << n];
    f[0] = Some(EnergyPolynomial::one(prec));
    for mask in 1usize..(1 << n) {
        let k = mask.count_ones() as usize;
        let row = &m[k - 1];
        let mut acc = EnergyPolynomial::zero(prec);
        for c in 0..n {
            if mask & (1 << c) == 0 {
                continue;
            }
            let rest = f[mask & !(1 << c)].as_ref().expect("filled in order");
            if row[c].is_zero() || rest.is_zero() {
                continue;
            }
            let term = &row[c] * rest;
            let greater = (mask >> (c + 1)).count_ones();
            acc = if greater % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        f[mask] = Some(acc);
    }
    f[(1 << n) - 1].take().expect("full mask")
}
