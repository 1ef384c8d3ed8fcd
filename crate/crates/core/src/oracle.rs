//! Independent reference computations used to cross-check the fast paths.
//!
//! `dense` builds `Δ_N` entry by entry from its definition and inverts it
//! with a Cholesky factorisation. `lattice` evaluates the infinite-volume
//! Green function from the continuous-time walk representation
//! `G(0,x) = ∫_0^∞ Π_i e^{-t/d} I_{x_i}(t/d) dt` with modified Bessel
//! functions, independent of any finite box.

pub mod dense {
    use nalgebra::DMatrix;

    use crate::lattice::BoxGeometry;

    /// `Δ_N` as a dense matrix: `1/(2d)` between in-box neighbours, `-1` on the diagonal.
    pub fn laplacian(g: &BoxGeometry) -> DMatrix<f64> {
        let v = g.volume();
        let d = g.dim();
        let mut m = DMatrix::zeros(v, v);
        let sites: Vec<Vec<i64>> = g.sites().collect();
        for i in 0..v {
            for j in 0..v {
                let l1: i64 = sites[i].iter().zip(&sites[j]).map(|(a, b)| (a - b).abs()).sum();
                m[(i, j)] = match l1 {
                    0 => -1.0,
                    1 => 1.0 / (2 * d) as f64,
                    _ => 0.0,
                };
            }
        }
        m
    }

    /// `(-Δ_N)^{-1}`.
    pub fn green_matrix(g: &BoxGeometry) -> DMatrix<f64> {
        let a = -laplacian(g);
        a.cholesky().expect("-Δ_N is positive definite").inverse()
    }

    /// `(-Δ_N)^{-2}`.
    pub fn bilaplacian_matrix(g: &BoxGeometry) -> DMatrix<f64> {
        let gm = green_matrix(g);
        &gm * &gm
    }
}

pub mod lattice {
    use std::f64::consts::PI;

    /// Above this argument the large-`s` asymptotic series is used.
    const ASYMPTOTIC_FROM: f64 = 2000.0;

    /// `e^{-s} I_m(s)` for `s ≥ 0`.
    pub fn scaled_bessel_i(m: u32, s: f64) -> f64 {
        if s == 0.0 {
            return if m == 0 { 1.0 } else { 0.0 };
        }
        let mf = m as f64;
        if s > ASYMPTOTIC_FROM.max(mf * mf) {
            let mu = 4.0 * mf * mf;
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..200 {
                let odd = (2 * k - 1) as f64;
                let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * s);
                if next.abs() > term.abs() {
                    break;
                }
                term = next;
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            return sum / (2.0 * PI * s).sqrt();
        }
        // power series, summed in log space around its largest term
        let ls = (s / 2.0).ln();
        let mut logs = Vec::new();
        let mut lt = mf * ls - (1..=m).map(|j| (j as f64).ln()).sum::<f64>() - s;
        let mut best = lt;
        let mut k = 0u64;
        loop {
            logs.push(lt);
            best = best.max(lt);
            let kf = k as f64;
            lt += 2.0 * ls - (kf + 1.0).ln() - (kf + 1.0 + mf).ln();
            k += 1;
            if kf > s / 2.0 && lt < best - 45.0 {
                break;
            }
        }
        logs.iter().map(|l| (l - best).exp()).sum::<f64>() * best.exp()
    }

    fn tail_coefficient(d: usize, site: &[i64]) -> f64 {
        // Π_i e^{-s}I_{m_i}(s) ≈ (2πs)^{-d/2} (1 - Σ_i (4m_i² - 1)/(8s))
        site.iter().map(|&m| (4.0 * (m * m) as f64 - 1.0) / 8.0).sum::<f64>() * d as f64
    }

    fn integrate(d: usize, site: &[i64], power: i32) -> f64 {
        let big_t = 1e7 * d as f64;
        let h = 0.02;
        let (u_lo, u_hi) = (-40.0f64, big_t.ln());
        let steps = ((u_hi - u_lo) / h).ceil() as usize;
        let h = (u_hi - u_lo) / steps as f64;
        let mut sum = 0.0;
        for i in 0..=steps {
            let u = u_lo + i as f64 * h;
            let t = u.exp();
            let s = t / d as f64;
            let p: f64 = site
                .iter()
                .map(|&m| scaled_bessel_i(m.unsigned_abs() as u32, s))
                .product();
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            sum += w * h * t.powi(power + 1) * p;
        }
        // analytic tail beyond big_t
        let half = d as f64 / 2.0;
        let amp = (d as f64 / (2.0 * PI)).powf(half);
        let c = tail_coefficient(d, site);
        let q = half - power as f64;
        let tail = amp * (big_t.powf(1.0 - q) / (q - 1.0) - c * big_t.powf(-q) / q);
        sum + tail
    }

    /// `G(0, x)` on `Z^d`, `d ≥ 3`.
    pub fn green(d: usize, site: &[i64]) -> f64 {
        assert!(d >= 3 && site.len() == d);
        integrate(d, site, 0)
    }

    /// `Σ_x G(0,x)² = (-Δ)^{-2}(0,0)` on `Z^d`, `d ≥ 5`.
    pub fn bilaplacian_origin(d: usize) -> f64 {
        assert!(d >= 5);
        integrate(d, &vec![0; d], 1)
    }
}
