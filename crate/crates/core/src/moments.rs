//! Expectation values, uncertainty-relation residuals, photon statistics
//! and the Husimi distribution, all computed by direct Fock-space sums so
//! that closed-form moment formulas stay available as independent checks.
//!
//! Observable pairs:
//! * quadratures X₁ = (a†+a)/2, X₂ = i(a†−a)/2 with commutator observable
//!   C = ½·1;
//! * SU(1,1) generators K₁ = (a†²+a²)/4, K₂ = (a†²−a²)/(4i) with C = K₀ =
//!   ½N + ¼ (the sign convention keeps ⟨C⟩ positive; only ⟨C⟩² enters the
//!   bounds).
//!
//! Residual conventions: `robertson_residual = ΔA²ΔB² − ¼(⟨C⟩² + 4σ²)` and
//! `heisenberg_residual = ΔA²ΔB² − ¼⟨C⟩²`; both are ≥ 0 up to rounding for
//! physical states, and vanish on the corresponding intelligent states.

use crate::solver::FockVector;
use crate::C64;
use thiserror::Error;

const TAIL_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("state not converged at its truncation (tail mass {tail:.3e})")]
    NotConverged { tail: f64 },
    #[error("mean photon number is zero; Mandel Q undefined")]
    ZeroMean,
}

type Result<T> = std::result::Result<T, MomentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservablePair {
    Quadrature,
    Su11,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub pair: ObservablePair,
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub covar: f64,
    pub mean_c: f64,
    pub robertson_residual: f64,
    pub heisenberg_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntelligenceKind {
    Ordinary,
    Generalized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntelligenceCheck {
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonStats {
    pub mean_n: f64,
    pub var_n: f64,
    pub mandel_q: f64,
}

struct LadderMoments {
    a1: C64,     // ⟨a⟩
    a2: C64,     // ⟨a²⟩
    a4: C64,     // ⟨a⁴⟩
    n1: f64,     // ⟨N⟩
    n2: f64,     // ⟨N²⟩
    k_diag: f64, // ⟨a†²a² + a²a†²⟩ / 2
}

fn ladder_moments(psi: &FockVector) -> Result<LadderMoments> {
    if psi.tail_mass > TAIL_GUARD {
        return Err(MomentError::NotConverged { tail: psi.tail_mass });
    }
    let c = &psi.coeffs;
    let dim = c.len();
    let mut m = LadderMoments {
        a1: C64::new(0.0, 0.0),
        a2: C64::new(0.0, 0.0),
        a4: C64::new(0.0, 0.0),
        n1: 0.0,
        n2: 0.0,
        k_diag: 0.0,
    };
    for n in 0..dim {
        let nf = n as f64;
        let p = c[n].norm_sqr();
        m.n1 += nf * p;
        m.n2 += nf * nf * p;
        // ½⟨a†²a² + a²a†²⟩ term by term: a†²a² |n⟩ has weight n(n−1) and
        // a²a†² |n⟩ has (n+1)(n+2)
        m.k_diag += 0.5 * (nf * (nf - 1.0) + (nf + 1.0) * (nf + 2.0)) * p;
        if n + 1 < dim {
            m.a1 += c[n].conj() * (nf + 1.0).sqrt() * c[n + 1];
        }
        if n + 2 < dim {
            m.a2 += c[n].conj() * ((nf + 1.0) * (nf + 2.0)).sqrt() * c[n + 2];
        }
        if n + 4 < dim {
            let w = ((nf + 1.0) * (nf + 2.0) * (nf + 3.0) * (nf + 4.0)).sqrt();
            m.a4 += c[n].conj() * w * c[n + 4];
        }
    }
    Ok(m)
}

/// Means, variances, covariance and uncertainty residuals of (X₁, X₂).
pub fn quadrature_report(psi: &FockVector) -> Result<MomentReport> {
    let m = ladder_moments(psi)?;
    let mean_a = m.a1.re;
    let mean_b = m.a1.im;
    // ⟨X₁²⟩ = ¼(2Re⟨a²⟩ + 2⟨N⟩ + 1), ⟨X₂²⟩ with the sign of Re⟨a²⟩ flipped
    let x1_sq = 0.25 * (2.0 * m.a2.re + 2.0 * m.n1 + 1.0);
    let x2_sq = 0.25 * (-2.0 * m.a2.re + 2.0 * m.n1 + 1.0);
    let var_a = x1_sq - mean_a * mean_a;
    let var_b = x2_sq - mean_b * mean_b;
    // ½⟨{X₁,X₂}⟩ = ½ Im⟨a²⟩
    let covar = 0.5 * m.a2.im - mean_a * mean_b;
    let mean_c = 0.5;
    Ok(finish_report(ObservablePair::Quadrature, mean_a, mean_b, var_a, var_b, covar, mean_c))
}

/// Means, variances, covariance and uncertainty residuals of (K₁, K₂).
pub fn su11_report(psi: &FockVector) -> Result<MomentReport> {
    let m = ladder_moments(psi)?;
    let mean_a = 0.5 * m.a2.re;
    let mean_b = -0.5 * m.a2.im;
    // ⟨K₁²⟩ = (2Re⟨a⁴⟩ + ⟨a†²a²+a²a†²⟩)/16, ⟨K₂²⟩ flips the sign of Re⟨a⁴⟩
    let k1_sq = (2.0 * m.a4.re + 2.0 * m.k_diag) / 16.0;
    let k2_sq = (-2.0 * m.a4.re + 2.0 * m.k_diag) / 16.0;
    let var_a = k1_sq - mean_a * mean_a;
    let var_b = k2_sq - mean_b * mean_b;
    // ½⟨{K₁,K₂}⟩ = −Im⟨a⁴⟩/8
    let covar = -m.a4.im / 8.0 - mean_a * mean_b;
    let mean_c = 0.5 * m.n1 + 0.25;
    Ok(finish_report(ObservablePair::Su11, mean_a, mean_b, var_a, var_b, covar, mean_c))
}

fn finish_report(
    pair: ObservablePair,
    mean_a: f64,
    mean_b: f64,
    var_a: f64,
    var_b: f64,
    covar: f64,
    mean_c: f64,
) -> MomentReport {
    let product = var_a * var_b;
    MomentReport {
        pair,
        mean_a,
        mean_b,
        var_a,
        var_b,
        covar,
        mean_c,
        robertson_residual: product - 0.25 * (mean_c * mean_c + 4.0 * covar * covar),
        heisenberg_residual: product - 0.25 * mean_c * mean_c,
    }
}

/// Decide whether a report describes an ordinary (Heisenberg-saturating)
/// or generalized (Robertson-saturating) intelligent state.
pub fn intelligence_check(report: &MomentReport, kind: IntelligenceKind) -> IntelligenceCheck {
    let tolerance = 1e-8 * (1.0 + report.var_a * report.var_b);
    let residual = match kind {
        IntelligenceKind::Ordinary => report.heisenberg_residual.abs().max(report.covar.abs()),
        IntelligenceKind::Generalized => report.robertson_residual.abs(),
    };
    IntelligenceCheck { pass: residual <= tolerance, residual, tolerance }
}

/// ⟨N⟩, Var N and the Mandel Q parameter.
pub fn photon_stats(psi: &FockVector) -> Result<PhotonStats> {
    let m = ladder_moments(psi)?;
    let var_n = m.n2 - m.n1 * m.n1;
    if m.n1 == 0.0 {
        return Err(MomentError::ZeroMean);
    }
    Ok(PhotonStats { mean_n: m.n1, var_n, mandel_q: (var_n - m.n1) / m.n1 })
}

/// Rectangular grid in the complex α plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HusimiGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl HusimiGrid {
    /// Square grid covering |α| ≤ extent.
    pub fn centered(extent: f64, points_per_axis: usize) -> Self {
        HusimiGrid {
            re_min: -extent,
            re_max: extent,
            im_min: -extent,
            im_max: extent,
            nx: points_per_axis,
            ny: points_per_axis,
        }
    }

    pub fn point(&self, ix: usize, iy: usize) -> C64 {
        let dx = (self.re_max - self.re_min) / (self.nx - 1) as f64;
        let dy = (self.im_max - self.im_min) / (self.ny - 1) as f64;
        C64::new(self.re_min + ix as f64 * dx, self.im_min + iy as f64 * dy)
    }

    pub fn cell_area(&self) -> f64 {
        let dx = (self.re_max - self.re_min) / (self.nx - 1) as f64;
        let dy = (self.im_max - self.im_min) / (self.ny - 1) as f64;
        dx * dy
    }
}

/// Husimi distribution sampled on a grid, row-major over (iy, ix).
#[derive(Debug, Clone)]
pub struct HusimiField {
    pub grid: HusimiGrid,
    pub values: Vec<f64>,
}

impl HusimiField {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// Riemann sum of the field over the grid; ≈ 1 when the grid covers the
    /// state.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_area()
    }
}

/// Q(α) = e^{−|α|²} |f(ᾱ)|² / π where f is the Bargmann function of ψ.
/// Each grid point is an independent pure evaluation.
pub fn husimi_q(psi: &FockVector, grid: &HusimiGrid) -> HusimiField {
    let mut values = vec![0.0; grid.nx * grid.ny];
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let alpha = grid.point(ix, iy);
            let f = psi.bargmann_value(alpha.conj());
            values[iy * grid.nx + ix] =
                (-alpha.norm_sqr()).exp() * f.norm_sqr() / std::f64::consts::PI;
        }
    }
    HusimiField { grid: *grid, values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{self, SqueezeParam};

    const ZERO: C64 = C64::new(0.0, 0.0);
    const ONE: C64 = C64::new(1.0, 0.0);

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fock_basis(n: usize, dim: usize) -> FockVector {
        let mut v = vec![ZERO; dim];
        v[n] = ONE;
        FockVector::from_raw(v)
    }

    #[test]
    fn vacuum_and_glauber_quadratures() {
        let vac = fock_basis(0, 32);
        let r = quadrature_report(&vac).unwrap();
        assert!((r.var_a - 0.25).abs() < 1e-14);
        assert!((r.var_b - 0.25).abs() < 1e-14);
        let g = zoo::glauber(c(0.9, -0.5)).unwrap();
        let r = quadrature_report(&g.fock).unwrap();
        assert!((r.var_a - 0.25).abs() < 1e-11);
        assert!((r.var_b - 0.25).abs() < 1e-11);
        assert!((r.var_a * r.var_b - 0.0625).abs() < 1e-11);
        assert!((r.mean_a - 0.9).abs() < 1e-11);
        assert!((r.mean_b + 0.5).abs() < 1e-11);
    }

    #[test]
    fn squeezed_vacuum_is_ordinary_quadrature_is() {
        for theta in [0.0, std::f64::consts::PI] {
            let b = zoo::displaced_squeezed(
                SqueezeParam::new(0.5, theta).unwrap(),
                c(0.4, 0.7),
            )
            .unwrap();
            let r = quadrature_report(&b.fock).unwrap();
            assert!(
                r.heisenberg_residual.abs() < 1e-10,
                "θ = {theta}: residual {}",
                r.heisenberg_residual
            );
            let chk = intelligence_check(&r, IntelligenceKind::Ordinary);
            assert!(chk.pass);
        }
    }

    #[test]
    fn fock_state_fails_ordinary_intelligence() {
        let one = fock_basis(1, 32);
        let r = quadrature_report(&one).unwrap();
        // ΔX₁ΔX₂ = 3/4 for |1⟩
        assert!((r.var_a * r.var_b - 0.5625).abs() < 1e-12);
        let chk = intelligence_check(&r, IntelligenceKind::Ordinary);
        assert!(!chk.pass);
    }

    #[test]
    fn vacuum_su11_moments() {
        let vac = fock_basis(0, 32);
        let r = su11_report(&vac).unwrap();
        assert!((r.mean_c - 0.25).abs() < 1e-14);
        assert!((r.var_a - 0.125).abs() < 1e-14);
        assert!((r.var_b - 0.125).abs() < 1e-14);
    }

    #[test]
    fn even_cat_su11_variances() {
        // ΔK₁² = ΔK₂² = ½⟨K₀⟩ = ¼tanh|υ|² + ⅛ at υ = 1
        let b = zoo::even_cat(ONE).unwrap();
        let r = su11_report(&b.fock).unwrap();
        let want = 0.25 * 1.0f64.tanh() + 0.125;
        assert!((r.var_a - want).abs() < 1e-10, "ΔK₁² = {}", r.var_a);
        assert!((r.var_b - want).abs() < 1e-10);
        assert!((r.var_a - 0.5 * r.mean_c).abs() < 1e-10);
        assert!((r.var_a - 0.315_398_5).abs() < 1e-6);
        let chk = intelligence_check(&r, IntelligenceKind::Ordinary);
        assert!(chk.pass, "residual {}", chk.residual);
    }

    #[test]
    fn cat_variance_formula_over_parameter_grid() {
        // ΔK₁² = ΔK₂² = (|υ|²/4)·(1+τ²−2τe^{−2|υ|²}cosφ)/(1+τ²+2τe^{−2|υ|²}cosφ) + ⅛
        for &(ups, tau, phi) in &[
            (c(0.7, 0.0), 1.0, 0.0),
            (c(1.0, 0.8), 0.5, 1.2),
            (c(2.0, 0.0), 2.0, 2.5),
            (c(0.4, -1.1), 1.5, 4.0),
        ] {
            let b = zoo::cat(ups, tau, phi).unwrap();
            let r = su11_report(&b.fock).unwrap();
            let e = (-2.0 * ups.norm_sqr()).exp();
            let frac = (1.0 + tau * tau - 2.0 * tau * e * phi.cos())
                / (1.0 + tau * tau + 2.0 * tau * e * phi.cos());
            let want = 0.25 * ups.norm_sqr() * frac + 0.125;
            assert!(
                (r.var_a - want).abs() < 1e-10 && (r.var_b - want).abs() < 1e-10,
                "υ={ups}, τ={tau}, φ={phi}: got {} / {}, want {want}",
                r.var_a,
                r.var_b
            );
        }
    }

    #[test]
    fn su11_intelligent_state_moment_relations() {
        // ΔK₁² = ⟨K₀⟩/(2Reη), ΔK₂² = |η|²⟨K₀⟩/(2Reη), σ₁₂ = Imη·⟨K₀⟩/(2Reη)
        for &(eta, lam) in &[
            (c(2.0, 0.0), c(0.3, 0.1)),
            (c(1.4, 0.8), c(0.2, -0.3)),
            (c(0.6, -0.5), c(0.15, 0.25)),
        ] {
            let b = zoo::su11_is(lam, eta, (ONE, ZERO)).unwrap();
            let r = su11_report(&b.fock).unwrap();
            let base = r.mean_c / (2.0 * eta.re);
            assert!((r.var_a - base).abs() < 1e-8 * base.max(1.0), "η={eta}");
            assert!((r.var_b - eta.norm_sqr() * base).abs() < 1e-8 * (eta.norm_sqr() * base).max(1.0));
            assert!((r.covar - eta.im * base).abs() < 1e-8 * base.max(1.0));
            // complex η: generalized intelligence holds, ordinary fails
            let gen = intelligence_check(&r, IntelligenceKind::Generalized);
            assert!(gen.pass, "η={eta}: generalized residual {}", gen.residual);
            if eta.im != 0.0 {
                let ord = intelligence_check(&r, IntelligenceKind::Ordinary);
                assert!(!ord.pass);
            }
        }
    }

    #[test]
    fn photon_statistics_of_named_states() {
        let g = zoo::glauber(c(1.1, 0.2)).unwrap();
        let p = photon_stats(&g.fock).unwrap();
        assert!(p.mandel_q.abs() < 1e-9, "Poissonian expected, Q = {}", p.mandel_q);
        let f = fock_basis(4, 32);
        let p = photon_stats(&f).unwrap();
        assert!((p.mandel_q + 1.0).abs() < 1e-12);
        let o = zoo::odd_cat(ONE).unwrap();
        let p = photon_stats(&o.fock).unwrap();
        assert!(p.mandel_q < 0.0, "odd cat is sub-Poissonian, Q = {}", p.mandel_q);
        assert!(photon_stats(&fock_basis(0, 16)).is_err());
    }

    #[test]
    fn husimi_known_fields() {
        let vac = fock_basis(0, 32);
        let grid = HusimiGrid::centered(4.5, 101);
        let q = husimi_q(&vac, &grid);
        // Q(α) = e^{−|α|²}/π
        let a = grid.point(30, 40);
        let want = (-a.norm_sqr()).exp() / std::f64::consts::PI;
        assert!((q.value(30, 40) - want).abs() < 1e-12);
        assert!((q.integral() - 1.0).abs() < 1e-3);

        let ups = c(0.9, -0.4);
        let g = zoo::glauber(ups).unwrap();
        let grid = HusimiGrid::centered(5.5, 121);
        let q = husimi_q(&g.fock, &grid);
        let a = grid.point(44, 61);
        let want = (-(a - ups).norm_sqr()).exp() / std::f64::consts::PI;
        assert!((q.value(44, 61) - want).abs() < 1e-10);
        assert!((q.integral() - 1.0).abs() < 1e-3);

        // even cat: symmetric two-lobed field
        let e = zoo::even_cat(c(1.5, 0.0)).unwrap();
        let grid = HusimiGrid::centered(6.0, 121);
        let q = husimi_q(&e.fock, &grid);
        for (ix, iy) in [(20, 60), (35, 44), (80, 90)] {
            let mirrored = q.value(grid.nx - 1 - ix, grid.ny - 1 - iy);
            assert!((q.value(ix, iy) - mirrored).abs() < 1e-12);
        }
        assert!((q.integral() - 1.0).abs() < 1e-3);
    }
}
