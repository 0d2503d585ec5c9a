//! Minimal dense linear algebra for the tiny matrices (n ≤ 4) the body
//! machinery needs: determinant, inverse, transpose application, and a
//! Jacobi eigensolver for symmetric matrices.

use crate::error::{Error, Result};

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("matrix rows must be square".into()));
        }
        Ok(Mat { n, a: rows.iter().flatten().copied().collect() })
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.a[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.a[i * d.len() + i] = x;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.at(i, j) * x[j]).sum())
            .collect()
    }

    /// `Aᵗ x` without forming the transpose.
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.at(i, j) * x[i]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.at(i, k);
                for j in 0..n {
                    out.a[i * n + j] += aik * other.at(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.at(i, j));
            }
        }
        out
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat { n: self.n, a: self.a.iter().map(|x| c * x).collect() }
    }

    /// LU determinant with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        let mut a = self.a.clone();
        let mut det = 1.0;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            if a[piv * n + col] == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                det = -det;
            }
            det *= a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / a[col * n + col];
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<Mat> {
        let n = self.n;
        let mut a = self.a.clone();
        let mut inv = Mat::identity(n).a;
        for col in 0..n {
            let mut piv = col;
            for r in col + 1..n {
                if a[r * n + col].abs() > a[piv * n + col].abs() {
                    piv = r;
                }
            }
            let p = a[piv * n + col];
            if p.abs() < 1e-300 {
                return Err(Error::Conditioning("singular matrix".into()));
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    inv.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv[col * n + j] /= d;
            }
            for r in 0..n {
                if r != col {
                    let f = a[r * n + col];
                    for j in 0..n {
                        a[r * n + j] -= f * a[col * n + j];
                        inv[r * n + j] -= f * inv[col * n + j];
                    }
                }
            }
        }
        Ok(Mat { n, a: inv })
    }

    /// Cyclic Jacobi eigendecomposition of a symmetric matrix.
    /// Returns (eigenvalues, eigenvector matrix V with columns = vectors).
    pub fn sym_eigen(&self) -> (Vec<f64>, Mat) {
        let n = self.n;
        let mut a = self.clone();
        let mut v = Mat::identity(n);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    off += a.at(i, j) * a.at(i, j);
                }
            }
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a.at(p, q);
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = 0.5 * (a.at(q, q) - a.at(p, p)) / apq;
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.at(k, p);
                        let akq = a.at(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.at(p, k);
                        let aqk = a.at(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.at(k, p);
                        let vkq = v.at(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let eig = (0..n).map(|i| a.at(i, i)).collect();
        (eig, v)
    }

    /// Symmetric inverse square root `M^{-1/2}` of a positive matrix.
    pub fn sym_inv_sqrt(&self) -> Result<Mat> {
        let (eig, v) = self.sym_eigen();
        let max = eig.iter().cloned().fold(0.0f64, f64::max);
        if eig.iter().any(|&e| e <= 1e-13 * max) {
            return Err(Error::Conditioning(format!("near-singular covariance: {eig:?}")));
        }
        let d = Mat::diag(&eig.iter().map(|e| 1.0 / e.sqrt()).collect::<Vec<_>>());
        Ok(v.matmul(&d).matmul(&v.transpose()))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    a.iter().map(|x| x / n).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale_vec(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

/// 2-D cross product (scalar).
pub fn cross2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let m = Mat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((m.det() - 5.0).abs() < 1e-14);
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((id.at(i, j) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn eigen_of_symmetric() {
        let m = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]])
            .unwrap();
        let (mut eig, v) = m.sym_eigen();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eig[0] - 1.0).abs() < 1e-12);
        assert!((eig[1] - 3.0).abs() < 1e-12);
        assert!((eig[2] - 5.0).abs() < 1e-12);
        // V diagonalizes: Vᵗ M V diagonal
        let d = v.transpose().matmul(&m).matmul(&v);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d.at(i, j).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn inv_sqrt_whitens() {
        let m = Mat::from_rows(&[vec![4.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let w = m.sym_inv_sqrt().unwrap();
        let white = w.matmul(&m).matmul(&w.transpose());
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((white.at(i, j) - expect).abs() < 1e-12);
            }
        }
    }
}
