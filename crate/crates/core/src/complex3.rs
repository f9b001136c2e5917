//! Points and vectors of C³.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

pub type C64 = num_complex::Complex64;

/// A vector of C³ in double precision.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Complex3(pub [C64; 3]);

impl Complex3 {
    pub const ZERO: Complex3 = Complex3([C64::new(0.0, 0.0); 3]);

    pub fn new(x: C64, y: C64, z: C64) -> Self {
        Complex3([x, y, z])
    }

    /// Builds a vector from three real coordinates.
    pub fn real(x: f64, y: f64, z: f64) -> Self {
        Complex3([C64::new(x, 0.0), C64::new(y, 0.0), C64::new(z, 0.0)])
    }

    /// Like [`Complex3::new`] but rejects NaN and infinite components.
    pub fn try_new(x: C64, y: C64, z: C64) -> Option<Self> {
        let p = Complex3([x, y, z]);
        p.is_finite().then_some(p)
    }

    pub fn x(&self) -> C64 {
        self.0[0]
    }

    pub fn y(&self) -> C64 {
        self.0[1]
    }

    pub fn z(&self) -> C64 {
        self.0[2]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        Complex3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Complex3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }

    pub fn conj(&self) -> Self {
        Complex3([self.0[0].conj(), self.0[1].conj(), self.0[2].conj()])
    }

    /// Returns `self / ‖self‖`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self.scale_real(1.0 / n))
    }

    /// Index of the coordinate of largest modulus; ties go to the last index.
    pub fn max_modulus_index(&self) -> usize {
        let mut best = 2;
        for k in [1, 0] {
            if self.0[k].norm_sqr() > self.0[best].norm_sqr() {
                best = k;
            }
        }
        best
    }

    /// Euclidean norm of the component of `self` orthogonal to `p` (hermitian).
    pub fn orthogonal_residual(&self, p: &Complex3) -> f64 {
        let pn = p.norm_sqr();
        if pn == 0.0 {
            return self.norm();
        }
        let c = hermitian_dot(self, p) / pn;
        (*self - p.scale(c)).norm()
    }
}

/// Standard hermitian product `a · b = Σ a_k conj(b_k)`.
pub fn hermitian_dot(a: &Complex3, b: &Complex3) -> C64 {
    a.0[0] * b.0[0].conj() + a.0[1] * b.0[1].conj() + a.0[2] * b.0[2].conj()
}

impl Index<usize> for Complex3 {
    type Output = C64;
    fn index(&self, k: usize) -> &C64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for Complex3 {
    fn index_mut(&mut self, k: usize) -> &mut C64 {
        &mut self.0[k]
    }
}

impl Add for Complex3 {
    type Output = Complex3;
    fn add(self, o: Complex3) -> Complex3 {
        Complex3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Complex3 {
    type Output = Complex3;
    fn sub(self, o: Complex3) -> Complex3 {
        Complex3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Neg for Complex3 {
    type Output = Complex3;
    fn neg(self) -> Complex3 {
        Complex3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl Mul<C64> for Complex3 {
    type Output = Complex3;
    fn mul(self, s: C64) -> Complex3 {
        self.scale(s)
    }
}

/// 3×3 complex matrix acting on [`Complex3`], stored row-major.
pub type Mat3 = [[C64; 3]; 3];

pub fn mat_vec(m: &Mat3, p: &Complex3) -> Complex3 {
    let mut out = Complex3::ZERO;
    for (i, row) in m.iter().enumerate() {
        out.0[i] = row[0] * p.0[0] + row[1] * p.0[1] + row[2] * p.0[2];
    }
    out
}

pub fn mat_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn mat_adjoint(a: &Mat3) -> Mat3 {
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn mat_identity() -> Mat3 {
    let mut out = [[C64::new(0.0, 0.0); 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    out
}
