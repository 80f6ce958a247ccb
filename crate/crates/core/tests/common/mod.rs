//! Brute-force reference implementations the integration tests check the
//! library against.
//!
//! Everything here is deliberately independent of the crate under test:
//! plain `Vec` arithmetic and a hand-rolled cyclic Jacobi eigensolver
//! instead of the linear-algebra backend. Slow, but short enough to audit
//! line by line.

#![allow(dead_code)] // each integration-test binary uses a different subset
#![allow(clippy::needless_range_loop)] // index loops keep the math auditable

/// Min-max normalize columnwise, measure distance from the all-ones ideal,
/// convert to relational coefficients, and normalize the per-column mean
/// coefficients to weights. Returns `(coefficients, weights)`.
pub fn grey_oracle(rows: &[Vec<f64>], threshold: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let m = rows.len();
    let k = rows[0].len();
    let mut y = vec![vec![0.0f64; k]; m];
    for j in 0..k {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in rows {
            lo = lo.min(row[j]);
            hi = hi.max(row[j]);
        }
        assert!(hi > lo, "oracle input must not have constant columns");
        for i in 0..m {
            y[i][j] = (rows[i][j] - lo) / (hi - lo);
        }
    }
    let mut delta = vec![vec![0.0f64; k]; m];
    let mut dmin = f64::INFINITY;
    let mut dmax = f64::NEG_INFINITY;
    for i in 0..m {
        for j in 0..k {
            delta[i][j] = (1.0 - y[i][j]).abs();
            dmin = dmin.min(delta[i][j]);
            dmax = dmax.max(delta[i][j]);
        }
    }
    let mut coeff = vec![vec![0.0f64; k]; m];
    for i in 0..m {
        for j in 0..k {
            coeff[i][j] = if dmax == 0.0 {
                1.0
            } else {
                (dmin + threshold * dmax) / (delta[i][j] + threshold * dmax)
            };
        }
    }
    let mut degrees = vec![0.0f64; k];
    for j in 0..k {
        degrees[j] = (0..m).map(|i| coeff[i][j]).sum::<f64>() / m as f64;
    }
    let total: f64 = degrees.iter().sum();
    let weights = degrees.iter().map(|d| d / total).collect();
    (coeff, weights)
}

/// Eigendecomposition of a symmetric matrix: `values[i]` pairs with the
/// `i`-th column of `vectors`.
pub struct JacobiEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi rotations until the off-diagonal mass vanishes. Panics if
/// the decomposition fails to reconstruct the input, so a broken oracle can
/// never silently agree with a broken library.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> JacobiEigen {
    let n = a.len();
    for row in a {
        assert_eq!(row.len(), n, "oracle needs a square matrix");
    }
    let mut b: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0f64; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frobenius: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    for _sweep in 0..200 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| b[p][q] * b[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-14 * frobenius {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if b[p][q] == 0.0 {
                    continue;
                }
                let theta = (b[q][q] - b[p][p]) / (2.0 * b[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let bip = b[i][p];
                    let biq = b[i][q];
                    b[i][p] = c * bip - s * biq;
                    b[i][q] = s * bip + c * biq;
                }
                for i in 0..n {
                    let bpi = b[p][i];
                    let bqi = b[q][i];
                    b[p][i] = c * bpi - s * bqi;
                    b[q][i] = s * bpi + c * bqi;
                }
                for row in v.iter_mut() {
                    let vip = row[p];
                    let viq = row[q];
                    row[p] = c * vip - s * viq;
                    row[q] = s * vip + c * viq;
                }
            }
        }
    }
    let values: Vec<f64> = (0..n).map(|i| b[i][i]).collect();
    // Self-check: V diag(values) Vᵀ must give the input back.
    for i in 0..n {
        for j in 0..n {
            let rebuilt: f64 = (0..n).map(|r| v[i][r] * values[r] * v[j][r]).sum();
            assert!(
                (rebuilt - a[i][j]).abs() <= 1e-9 * (1.0 + frobenius),
                "oracle eigendecomposition failed to reconstruct ({i},{j}): \
                 {rebuilt} vs {}",
                a[i][j]
            );
        }
    }
    JacobiEigen {
        values,
        vectors: v,
    }
}

/// Reference class model: column statistics plus the pseudo-inverted
/// correlation matrix of the standardized rows.
pub struct BruteModel {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub cinv: Vec<Vec<f64>>,
    pub rank: usize,
    /// Largest over smallest retained eigenvalue: conditioning of the part
    /// of the spectrum that actually gets inverted.
    pub retained_condition: f64,
}

/// Fit the reference model with the truncated-spectrum pseudo-inverse
/// (eigenvalues at or below `1e-10 · λmax` are dropped).
pub fn brute_fit(rows: &[Vec<f64>]) -> BruteModel {
    let n = rows.len();
    let k = rows[0].len();
    assert!(n >= 2, "oracle needs at least two rows");
    let mut means = vec![0.0f64; k];
    for row in rows {
        for j in 0..k {
            means[j] += row[j];
        }
    }
    for m in means.iter_mut() {
        *m /= n as f64;
    }
    let mut stds = vec![0.0f64; k];
    for j in 0..k {
        let ss: f64 = rows.iter().map(|r| (r[j] - means[j]).powi(2)).sum();
        stds[j] = (ss / (n as f64 - 1.0)).sqrt();
        assert!(stds[j] > 0.0, "oracle input must not have constant columns");
    }
    let z: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| (0..k).map(|j| (r[j] - means[j]) / stds[j]).collect())
        .collect();
    let mut corr = vec![vec![0.0f64; k]; k];
    for a in 0..k {
        for b in a..k {
            let dot: f64 = z.iter().map(|row| row[a] * row[b]).sum();
            corr[a][b] = dot / (n as f64 - 1.0);
            corr[b][a] = corr[a][b];
        }
    }
    let eig = jacobi_eigen(&corr);
    let lmax = eig.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cutoff = 1e-10 * lmax;
    let rank = eig.values.iter().filter(|&&l| l > cutoff).count();
    let smallest_retained = eig
        .values
        .iter()
        .copied()
        .filter(|&l| l > cutoff)
        .fold(f64::INFINITY, f64::min);
    let retained_condition = lmax / smallest_retained;
    let mut cinv = vec![vec![0.0f64; k]; k];
    for a in 0..k {
        for b in 0..k {
            cinv[a][b] = (0..k)
                .map(|r| {
                    let inv = if eig.values[r] > cutoff {
                        1.0 / eig.values[r]
                    } else {
                        0.0
                    };
                    eig.vectors[a][r] * inv * eig.vectors[b][r]
                })
                .sum();
        }
    }
    BruteModel {
        means,
        stds,
        cinv,
        rank,
        retained_condition,
    }
}

/// Reference distance of one observation under a reference model.
pub fn brute_md(model: &BruteModel, x: &[f64]) -> f64 {
    let k = model.means.len();
    assert_eq!(x.len(), k);
    let z: Vec<f64> = (0..k)
        .map(|j| (x[j] - model.means[j]) / model.stds[j])
        .collect();
    let mut q = 0.0;
    for a in 0..k {
        for b in 0..k {
            q += z[a] * model.cinv[a][b] * z[b];
        }
    }
    (q.max(0.0) / k as f64).sqrt()
}

/// Deterministic floats in `[0, 1)` for seeded test instances (64-bit LCG,
/// top 53 bits). Independent of the library's generator on purpose.
pub struct TinyRng(pub u64);

impl TinyRng {
    pub fn next_f64(&mut self) -> f64 {
        // Constants from Knuth's MMIX generator.
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Matrix with entries in [0, 1) and no constant columns.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> Vec<Vec<f64>> {
        loop {
            let m: Vec<Vec<f64>> = (0..rows)
                .map(|_| (0..cols).map(|_| self.next_f64()).collect())
                .collect();
            let constant = (0..cols).any(|j| (1..rows).all(|i| m[i][j] == m[0][j]));
            if !constant {
                return m;
            }
        }
    }
}
