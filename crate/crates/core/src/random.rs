//! Seedable sampling of Haar unitaries, Weyl-Heisenberg operators and test
//! states.
//!
//! Every sampler takes an explicit [`RngStream`]. A stream is a ChaCha20
//! generator keyed by a 64-bit master seed and positioned on a 64-bit stream
//! id, so parallel trials each own an independent, reproducible stream.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::linalg::{tensor_product, ComplexMatrix, DensityMatrix, Unitary, C64};
use crate::{Error, Result};

/// Deterministic random stream identified by `(master_seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    /// Stream `index` inside a named domain. Domains keep, say, trial
    /// streams and measurement-setting streams of one experiment apart.
    pub fn in_domain(master_seed: u64, domain: u16, index: u64) -> Self {
        assert!(index < 1 << 48, "stream index out of range");
        Self::new(master_seed, (u64::from(domain) << 48) | index)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Complex Gaussian with `E|z|^2 = 1`.
    fn complex_normal(&mut self) -> C64 {
        C64::new(self.normal(), self.normal()) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Uniform index in `0..n`.
    pub fn index_below(&mut self, n: usize) -> usize {
        use rand::Rng;
        self.rng.random_range(0..n)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `d x d` matrix of i.i.d. standard complex Gaussians (real and imaginary
/// parts each `N(0, 1/2)`).
pub fn ginibre_matrix(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| rng.complex_normal())
}

/// Haar-distributed unitary: `Q diag(r_ii / |r_ii|)` from the QR
/// decomposition of a Ginibre matrix.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> Result<Unitary> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be positive"));
    }
    loop {
        let z = ginibre_matrix(d, rng).to_nalgebra();
        let qr = z.qr();
        let r = qr.r();
        let diag: Vec<f64> = (0..d).map(|i| r[(i, i)].norm()).collect();
        if diag.iter().any(|&x| x < 1e-300) {
            continue;
        }
        let mut q: DMatrix<C64> = qr.q();
        for (j, mut col) in q.column_iter_mut().enumerate() {
            col *= r[(j, j)] / diag[j];
        }
        return Unitary::new(ComplexMatrix::from_nalgebra(&q));
    }
}

/// The `d^2` operators `X^a Z^b`, ordered by `a * d + b`, with
/// `X|k> = |k+1 mod d>` and `Z|k> = w^k |k>`, `w = exp(2 pi i / d)`.
pub fn weyl_heisenberg_operators(d: usize) -> Result<Vec<Unitary>> {
    if d < 2 {
        return Err(Error::invalid("d", "Weyl-Heisenberg operators need d >= 2"));
    }
    let phase = |k: usize| C64::from_polar(1.0, 2.0 * PI * (k % d) as f64 / d as f64);
    let mut ops = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            // (X^a Z^b)|k> = w^{bk} |k + a>.
            let m = ComplexMatrix::from_fn(d, d, |row, k| {
                if row == (k + a) % d {
                    phase(b * k)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            ops.push(Unitary::new(m)?);
        }
    }
    Ok(ops)
}

/// `|psi><psi|` with `|psi>` the first column of a Haar unitary.
pub fn random_pure_state(d: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
    let u = haar_unitary(d, rng)?;
    let ket: Vec<C64> = (0..d).map(|i| u.matrix()[(i, 0)]).collect();
    DensityMatrix::from_ket(&ket)
}

/// Tensor product of two independent random pure states.
pub fn random_product_pure_state(d_a: usize, d_b: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
    let a = random_pure_state(d_a, rng)?;
    let b = random_pure_state(d_b, rng)?;
    Ok(a.tensor(&b))
}

/// One term `p * rho_A (x) rho_B` of a separable decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableTerm {
    pub weight: f64,
    pub a: DensityMatrix,
    pub b: DensityMatrix,
}

/// A separable state together with an explicit decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableState {
    pub terms: Vec<SeparableTerm>,
}

impl SeparableState {
    /// Validates that the terms are nonempty, share local dimensions, have
    /// nonnegative weights, and that the weights sum to 1 within `1e-12`.
    pub fn new(terms: Vec<SeparableTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::invalid("terms", "decomposition is empty"))?;
        let dims = (first.a.dim(), first.b.dim());
        if terms.iter().any(|t| (t.a.dim(), t.b.dim()) != dims) {
            return Err(Error::invalid("terms", "terms disagree on local dimensions"));
        }
        if terms.iter().any(|t| t.weight.is_nan() || t.weight < 0.0) {
            return Err(Error::invalid("weights", "weights must be nonnegative"));
        }
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("weights", format!("weights sum to {total}, not 1")));
        }
        Ok(Self { terms })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.terms[0].a.dim(), self.terms[0].b.dim())
    }

    /// `sum_i p_i rho_{A,i} (x) rho_{B,i}`.
    pub fn state(&self) -> DensityMatrix {
        let (da, db) = self.dims();
        let mut acc = ComplexMatrix::zeros(da * db, da * db);
        for t in &self.terms {
            acc.add_scaled(&tensor_product(t.a.matrix(), t.b.matrix()), t.weight);
        }
        DensityMatrix::new(acc).expect("convex mixture of product states is a state")
    }
}

/// Mixture of `k_terms` random product pure states with weights drawn
/// uniformly from the probability simplex.
pub fn random_separable_decomposition(
    d_a: usize,
    d_b: usize,
    k_terms: usize,
    rng: &mut RngStream,
) -> Result<SeparableState> {
    if k_terms == 0 {
        return Err(Error::invalid("k_terms", "need at least one term"));
    }
    // Normalized Exp(1) samples are Dirichlet(1, ..., 1).
    let raw: Vec<f64> = (0..k_terms).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut terms = Vec::with_capacity(k_terms);
    for w in raw {
        terms.push(SeparableTerm {
            weight: w / total,
            a: random_pure_state(d_a, rng)?,
            b: random_pure_state(d_b, rng)?,
        });
    }
    SeparableState::new(terms)
}

pub fn random_separable_state(d_a: usize, d_b: usize, k_terms: usize, rng: &mut RngStream) -> Result<DensityMatrix> {
    Ok(random_separable_decomposition(d_a, d_b, k_terms, rng)?.state())
}
