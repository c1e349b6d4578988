//! Complex scalars, 2-vectors and 2x2 matrices, plus the seeded Gaussian
//! sampler every random quantity in the simulator is drawn from.
//!
//! Noise variances are always the total complex variance `E|n|^2`; the real
//! and imaginary parts each carry half of it.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type Cplx = Complex64;

/// Below this `|det|` the unregularized Gram matrix is treated as singular.
pub const SINGULAR_DET: f64 = 1e-12;

pub const ZERO: Cplx = Cplx::new(0.0, 0.0);
pub const ONE: Cplx = Cplx::new(1.0, 0.0);

/// Column vector with one entry per relay antenna.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec2 {
    pub e1: Cplx,
    pub e2: Cplx,
}

impl CVec2 {
    pub const ZERO: CVec2 = CVec2 { e1: ZERO, e2: ZERO };

    pub const fn new(e1: Cplx, e2: Cplx) -> Self {
        CVec2 { e1, e2 }
    }

    pub fn from_real(e1: f64, e2: f64) -> Self {
        CVec2::new(Cplx::new(e1, 0.0), Cplx::new(e2, 0.0))
    }

    /// Entry by zero-based antenna index.
    pub fn get(&self, i: usize) -> Cplx {
        match i {
            0 => self.e1,
            1 => self.e2,
            _ => panic!("CVec2 index {i} out of range"),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.e1.norm_sqr() + self.e2.norm_sqr()
    }

    /// Unconjugated row-times-column product `a^T b`.
    ///
    /// A reciprocal downlink row is the transpose of the uplink column, so
    /// this is the product that shows up in every terminal equation.
    pub fn dot(&self, other: &CVec2) -> Cplx {
        self.e1 * other.e1 + self.e2 * other.e2
    }

    /// Hermitian inner product `a^H b`.
    pub fn hdot(&self, other: &CVec2) -> Cplx {
        self.e1.conj() * other.e1 + self.e2.conj() * other.e2
    }

    pub fn scale(&self, k: Cplx) -> CVec2 {
        CVec2::new(self.e1 * k, self.e2 * k)
    }

    pub fn scale_real(&self, k: f64) -> CVec2 {
        CVec2::new(self.e1 * k, self.e2 * k)
    }

    pub fn conj(&self) -> CVec2 {
        CVec2::new(self.e1.conj(), self.e2.conj())
    }

    pub fn is_finite(&self) -> bool {
        self.e1.is_finite() && self.e2.is_finite()
    }
}

impl Add for CVec2 {
    type Output = CVec2;
    fn add(self, rhs: CVec2) -> CVec2 {
        CVec2::new(self.e1 + rhs.e1, self.e2 + rhs.e2)
    }
}

impl Sub for CVec2 {
    type Output = CVec2;
    fn sub(self, rhs: CVec2) -> CVec2 {
        CVec2::new(self.e1 - rhs.e1, self.e2 - rhs.e2)
    }
}

impl Neg for CVec2 {
    type Output = CVec2;
    fn neg(self) -> CVec2 {
        CVec2::new(-self.e1, -self.e2)
    }
}

/// Row-major 2x2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2 {
    pub rows: [[Cplx; 2]; 2],
}

impl CMat2 {
    pub const IDENTITY: CMat2 = CMat2 {
        rows: [[ONE, ZERO], [ZERO, ONE]],
    };

    pub const fn new(a: Cplx, b: Cplx, c: Cplx, d: Cplx) -> Self {
        CMat2 {
            rows: [[a, b], [c, d]],
        }
    }

    /// `[c1 c2]`, e.g. `H = [h_AB h_CB]`.
    pub fn from_columns(c1: CVec2, c2: CVec2) -> Self {
        CMat2::new(c1.e1, c2.e1, c1.e2, c2.e2)
    }

    pub fn column(&self, j: usize) -> CVec2 {
        CVec2::new(self.rows[0][j], self.rows[1][j])
    }

    pub fn conj_transpose(&self) -> CMat2 {
        let [[a, b], [c, d]] = self.rows;
        CMat2::new(a.conj(), c.conj(), b.conj(), d.conj())
    }

    pub fn det(&self) -> Cplx {
        let [[a, b], [c, d]] = self.rows;
        a * d - b * c
    }

    pub fn mul_vec(&self, v: &CVec2) -> CVec2 {
        let [[a, b], [c, d]] = self.rows;
        CVec2::new(a * v.e1 + b * v.e2, c * v.e1 + d * v.e2)
    }

    pub fn add_diag(&self, k: f64) -> CMat2 {
        let mut out = *self;
        out.rows[0][0] += k;
        out.rows[1][1] += k;
        out
    }

    /// Adjugate over determinant.
    pub fn inverse(&self) -> Result<CMat2> {
        let det = self.det();
        if det.norm() <= SINGULAR_DET || !det.is_finite() {
            return Err(Error::SingularMatrix { det: det.norm() });
        }
        let [[a, b], [c, d]] = self.rows;
        let inv = det.inv();
        Ok(CMat2::new(d * inv, -b * inv, -c * inv, a * inv))
    }

    pub fn approx_eq(&self, other: &CMat2, tol: f64) -> bool {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .all(|(x, y)| (x - y).norm() <= tol)
    }
}

impl Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, rhs: CMat2) -> CMat2 {
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.rows[i][0] * rhs.rows[0][j] + self.rows[i][1] * rhs.rows[1][j];
            }
        }
        CMat2 { rows: out }
    }
}

impl Add for CMat2 {
    type Output = CMat2;
    fn add(self, rhs: CMat2) -> CMat2 {
        let [[a, b], [c, d]] = self.rows;
        let [[e, f], [g, h]] = rhs.rows;
        CMat2::new(a + e, b + f, c + g, d + h)
    }
}

/// Regularized least-squares solve `(H^H H + reg I)^{-1} H^H y`.
///
/// With `reg = 0` this is zero forcing and fails when `|det(H^H H)|` is at or
/// below [`SINGULAR_DET`]. Any `reg > 0` keeps the Gram matrix positive
/// definite.
pub fn mat2_mmse_solve(h: &CMat2, y: &CVec2, reg: f64) -> Result<CVec2> {
    if !reg.is_finite() || reg < 0.0 {
        return Err(Error::arg(format!("regularizer must be finite and >= 0, got {reg}")));
    }
    let hh = h.conj_transpose();
    let gram = (hh * *h).add_diag(reg);
    let x = gram.inverse()?.mul_vec(&hh.mul_vec(y));
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::SingularMatrix { det: gram.det().norm() })
    }
}

/// Counter-based random stream: a ChaCha8 generator keyed by `seed` and
/// positioned on stream `stream_id`.
///
/// Two streams built from the same pair emit the same sequence no matter
/// which thread or in what order they are created.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Circularly-symmetric complex Gaussian with total variance `variance`.
    pub fn cgauss(&mut self, variance: f64) -> Result<Cplx> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(Error::arg(format!("variance must be finite and >= 0, got {variance}")));
        }
        if variance == 0.0 {
            return Ok(ZERO);
        }
        let s = (variance / 2.0).sqrt();
        let re = self.standard_normal();
        let im = self.standard_normal();
        Ok(Cplx::new(re * s, im * s))
    }

    /// Two independent `cgauss` draws.
    pub fn cgauss_vec(&mut self, variance: f64) -> Result<CVec2> {
        Ok(CVec2::new(self.cgauss(variance)?, self.cgauss(variance)?))
    }
}

pub fn cgauss(rng: &mut RngStream, variance: f64) -> Result<Cplx> {
    rng.cgauss(variance)
}
