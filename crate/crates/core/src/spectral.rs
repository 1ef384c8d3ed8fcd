//! Sine-basis diagonalisation of the Dirichlet Laplacian on `Λ_N`.
//!
//! `-Δ_N` is separable: along each axis the 1-D Dirichlet operator on
//! `n = 2N+1` points has eigenvectors `√(2/(n+1)) sin(π k j/(n+1))` and
//! eigenvalues `1 - cos(π k/(n+1))`. The d-dimensional eigenvalue is the
//! mean of the per-axis ones. The orthonormal type-I sine transform is its
//! own inverse, so solve/sample kernels are transform, scale, transform.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::lattice::{BoxGeometry, ScalarField};
use crate::rng::{self, Purpose};
use crate::scalar::Real;

/// Side length from which the FFT route replaces the dense sine matrix.
const FFT_THRESHOLD: usize = 48;

enum Kernel<T: Real> {
    Dense(Vec<T>),
    Fft(Arc<dyn Fft<T>>),
}

/// Orthonormal 1-D type-I discrete sine transform of length `n`.
pub struct SineTransform<T: Real> {
    n: usize,
    kernel: Kernel<T>,
}

impl<T: Real> SineTransform<T> {
    pub fn new(n: usize) -> Self {
        let kernel = if n < FFT_THRESHOLD {
            let scale = (2.0 / (n + 1) as f64).sqrt();
            let mut m = Vec::with_capacity(n * n);
            for k in 1..=n {
                for j in 1..=n {
                    let arg = std::f64::consts::PI * (k * j) as f64 / (n + 1) as f64;
                    m.push(T::of(scale * arg.sin()));
                }
            }
            Kernel::Dense(m)
        } else {
            let mut planner = FftPlanner::new();
            Kernel::Fft(planner.plan_fft_forward(2 * (n + 1)))
        };
        SineTransform { n, kernel }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn workspace(&self) -> Workspace<T> {
        match &self.kernel {
            Kernel::Dense(_) => Workspace {
                line: vec![T::zero(); self.n],
                out: vec![T::zero(); self.n],
                buf: Vec::new(),
                scratch: Vec::new(),
            },
            Kernel::Fft(fft) => Workspace {
                line: vec![T::zero(); self.n],
                out: vec![T::zero(); self.n],
                buf: vec![Complex::new(T::zero(), T::zero()); 2 * (self.n + 1)],
                scratch: vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()],
            },
        }
    }

    /// Transforms `ws.line` into `ws.out`.
    fn run(&self, ws: &mut Workspace<T>) {
        let n = self.n;
        match &self.kernel {
            Kernel::Dense(m) => {
                for (k, o) in ws.out.iter_mut().enumerate() {
                    let row = &m[k * n..(k + 1) * n];
                    *o = row.iter().zip(&ws.line).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
                }
            }
            Kernel::Fft(fft) => {
                let zero = Complex::new(T::zero(), T::zero());
                ws.buf[0] = zero;
                ws.buf[n + 1] = zero;
                for j in 0..n {
                    ws.buf[j + 1] = Complex::new(ws.line[j], T::zero());
                    ws.buf[2 * n + 1 - j] = Complex::new(-ws.line[j], T::zero());
                }
                fft.process_with_scratch(&mut ws.buf, &mut ws.scratch);
                // Y_k = -2i Σ_j x_j sin(π j k/(n+1))
                let scale = T::of(-0.5 * (2.0 / (n + 1) as f64).sqrt());
                for k in 0..n {
                    ws.out[k] = ws.buf[k + 1].im * scale;
                }
            }
        }
    }

    /// In-place transform of a contiguous line.
    pub fn apply(&self, data: &mut [T]) {
        assert_eq!(data.len(), self.n);
        let mut ws = self.workspace();
        ws.line.copy_from_slice(data);
        self.run(&mut ws);
        data.copy_from_slice(&ws.out);
    }
}

struct Workspace<T> {
    line: Vec<T>,
    out: Vec<T>,
    buf: Vec<Complex<T>>,
    scratch: Vec<Complex<T>>,
}

/// Eigen-decomposition of `-Δ_N` for one box.
pub struct SpectralPlan<T: Real> {
    geometry: BoxGeometry,
    axis_eigenvalues: Vec<f64>,
    eigenvalues: Vec<T>,
    transform: SineTransform<T>,
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(geometry: BoxGeometry) -> Self {
        let n = geometry.side();
        let d = geometry.dim();
        let axis_eigenvalues: Vec<f64> = (1..=n)
            .map(|k| 1.0 - (std::f64::consts::PI * k as f64 / (n + 1) as f64).cos())
            .collect();
        let mut kidx = vec![0i64; d];
        let eigenvalues = (0..geometry.volume())
            .map(|i| {
                geometry.write_site(i, &mut kidx);
                let r = geometry.radius() as i64;
                let s: f64 = kidx.iter().map(|&c| axis_eigenvalues[(c + r) as usize]).sum();
                T::of(s / d as f64)
            })
            .collect();
        SpectralPlan {
            geometry,
            axis_eigenvalues,
            eigenvalues,
            transform: SineTransform::new(n),
        }
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    /// Eigenvalues `ν_k` in the same row-major order as field values, with
    /// mode index `k_i ∈ 1..=2N+1` stored at axis position `k_i - 1`.
    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// `ν_k` for a mode multi-index with entries in `1..=2N+1`.
    pub fn eigenvalue(&self, mode: &[usize]) -> f64 {
        mode.iter().map(|&k| self.axis_eigenvalues[k - 1]).sum::<f64>() / self.geometry.dim() as f64
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.axis_eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.axis_eigenvalues.last().unwrap()
    }

    /// `ψ_k(x)`, the orthonormal eigenvector for mode `k` at site `x`.
    pub fn eigenvector(&self, mode: &[usize], site: &[i64]) -> f64 {
        let n1 = (self.geometry.side() + 1) as f64;
        let r = self.geometry.radius() as i64;
        mode.iter()
            .zip(site)
            .map(|(&k, &x)| (2.0 / n1).sqrt() * (std::f64::consts::PI * k as f64 * (x + r + 1) as f64 / n1).sin())
            .product()
    }

    /// Applies the separable sine transform along every axis.
    pub fn transform_in_place(&self, data: &mut [T]) {
        let side = self.geometry.side();
        let vol = self.geometry.volume();
        assert_eq!(data.len(), vol);
        let mut ws = self.transform.workspace();
        let mut stride = 1usize;
        for _ in 0..self.geometry.dim() {
            let block = stride * side;
            for outer in (0..vol).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for j in 0..side {
                        ws.line[j] = data[base + j * stride];
                    }
                    self.transform.run(&mut ws);
                    for j in 0..side {
                        data[base + j * stride] = ws.out[j];
                    }
                }
            }
            stride = block;
        }
    }

    pub fn forward(&self, f: &ScalarField<T>) -> Result<Vec<T>> {
        self.geometry.same_as(f.geometry())?;
        let mut c = f.values().to_vec();
        self.transform_in_place(&mut c);
        Ok(c)
    }

    pub fn inverse(&self, mut coefficients: Vec<T>) -> ScalarField<T> {
        self.transform_in_place(&mut coefficients);
        ScalarField::from_raw(self.geometry, coefficients)
    }

    /// Applies the spectral multiplier `g(ν_k)`.
    pub fn apply_multiplier(&self, f: &ScalarField<T>, g: impl Fn(T) -> T) -> Result<ScalarField<T>> {
        let mut c = self.forward(f)?;
        for (v, &nu) in c.iter_mut().zip(&self.eigenvalues) {
            *v = *v * g(nu);
        }
        Ok(self.inverse(c))
    }

    /// `Δ_N f` by the direct nearest-neighbour stencil.
    pub fn apply_laplacian(&self, f: &ScalarField<T>) -> Result<ScalarField<T>> {
        self.geometry.same_as(f.geometry())?;
        let g = &self.geometry;
        let side = g.side();
        let inv2d = T::of(1.0 / (2 * g.dim()) as f64);
        let v = f.values();
        let out = (0..g.volume())
            .map(|i| {
                let mut acc = T::zero();
                let mut stride = 1usize;
                for _ in 0..g.dim() {
                    let c = (i / stride) % side;
                    if c > 0 {
                        acc = acc + v[i - stride];
                    }
                    if c + 1 < side {
                        acc = acc + v[i + stride];
                    }
                    stride *= side;
                }
                acc * inv2d - v[i]
            })
            .collect();
        Ok(ScalarField::from_raw(*g, out))
    }

    pub fn apply_neg_laplacian(&self, f: &ScalarField<T>) -> Result<ScalarField<T>> {
        Ok(self.apply_laplacian(f)?.map(|x| -x))
    }

    /// `u` with `(-Δ_N) u = rhs`.
    pub fn solve_poisson(&self, rhs: &ScalarField<T>) -> Result<ScalarField<T>> {
        self.apply_multiplier(rhs, |nu| T::one() / nu)
    }

    /// `(-Δ_N)^{-2} rhs`, the membrane covariance applied to `rhs`.
    pub fn solve_bilaplacian(&self, rhs: &ScalarField<T>) -> Result<ScalarField<T>> {
        self.apply_multiplier(rhs, |nu| T::one() / (nu * nu))
    }

    /// `⟨f, (-Δ_N) f⟩ = Σ_k ν_k f̂_k²`.
    pub fn energy(&self, f: &ScalarField<T>) -> Result<f64> {
        let c = self.forward(f)?;
        Ok(c.iter()
            .zip(&self.eigenvalues)
            .map(|(a, nu)| nu.to_f64_lossy() * a.to_f64_lossy().powi(2))
            .sum())
    }

    /// Exact GFF draw from i.i.d. standard normal mode amplitudes.
    pub fn sample_gff_with<R: Rng + ?Sized>(&self, rng: &mut R) -> ScalarField<T> {
        let c: Vec<T> = self
            .eigenvalues
            .iter()
            .map(|&nu| {
                let xi: f64 = rng.sample(StandardNormal);
                T::of(xi) / nu.sqrt()
            })
            .collect();
        self.inverse(c)
    }

    /// Exact GFF draw; a deterministic function of `(plan, seed)`.
    pub fn sample_gff(&self, seed: u64) -> ScalarField<T> {
        self.sample_gff_with(&mut rng::stream(seed, Purpose::Field, 0))
    }

    /// Draws `φ + h` with `φ ~ GFF` and returns it with the Cameron–Martin
    /// log weight `-½⟨h,(-Δ_N)h⟩ - ⟨φ,(-Δ_N)h⟩`.
    pub fn sample_gff_shifted(&self, shift: &ScalarField<T>, seed: u64) -> Result<(ScalarField<T>, f64)> {
        let tilt = ShiftTilt::new(self, shift)?;
        let phi = self.sample_gff(seed);
        Ok(tilt.shift(phi))
    }
}

/// Precomputed `(-Δ_N) h` and `⟨h,(-Δ_N)h⟩` for repeated shifted draws.
pub struct ShiftTilt<T: Real> {
    shift: ScalarField<T>,
    lap_shift: ScalarField<T>,
    half_energy: f64,
}

impl<T: Real> ShiftTilt<T> {
    pub fn new(plan: &SpectralPlan<T>, shift: &ScalarField<T>) -> Result<Self> {
        let lap_shift = plan.apply_neg_laplacian(shift)?;
        let half_energy = 0.5 * shift.dot(&lap_shift)?;
        Ok(ShiftTilt {
            shift: shift.clone(),
            lap_shift,
            half_energy,
        })
    }

    pub fn shift_field(&self) -> &ScalarField<T> {
        &self.shift
    }

    /// Shifts an unshifted GFF draw and returns its log importance weight.
    pub fn shift(&self, phi: ScalarField<T>) -> (ScalarField<T>, f64) {
        let cross: f64 = phi
            .values()
            .iter()
            .zip(self.lap_shift.values())
            .map(|(a, b)| a.to_f64_lossy() * b.to_f64_lossy())
            .sum();
        let log_w = -self.half_energy - cross;
        let moved = phi.add(&self.shift).expect("geometry checked at construction");
        (moved, log_w)
    }
}
