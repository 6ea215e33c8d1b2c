//! Named constructors for the state families: each returns the algebra
//! element and eigenvalue the state satisfies, the closed-form solution, and
//! a converged truncated Fock vector, so every identity can be tested from
//! either side.
//!
//! Conventions: ξ = s·e^{iθ} is the squeeze parameter, ζ = tanh s·e^{iθ} its
//! disk coordinate, D(z) = exp(z a† − z̄ a), S(ξ) = exp(½ξa†² − ½ξ̄a²).
//! The global phase of every bundle is fixed by making the first nonzero
//! Fock coefficient real positive.

use crate::oracle::OracleError;
use crate::solver::{
    self, AlgebraSpec, AnalyticState, DeltaBranch, FockVector, SolverError,
};
use crate::C64;
use thiserror::Error;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("degenerate superposition: normalization denominator vanishes")]
    DegenerateNorm,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("state did not converge below tail {tail:.3e} within dim {max_dim}")]
    NotConverged { max_dim: usize, tail: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

type Result<T> = std::result::Result<T, ZooError>;

/// Squeezing ξ = s·e^{iθ} with s ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParam {
    pub s: f64,
    pub theta: f64,
}

impl SqueezeParam {
    pub fn new(s: f64, theta: f64) -> Result<Self> {
        if !(s.is_finite() && theta.is_finite()) || s < 0.0 {
            return Err(ZooError::InvalidParam("squeeze magnitude must be finite and ≥ 0".into()));
        }
        Ok(SqueezeParam { s, theta })
    }

    pub fn xi(&self) -> C64 {
        C64::from_polar(self.s, self.theta)
    }

    /// Disk coordinate ζ = tanh s · e^{iθ}, always |ζ| < 1.
    pub fn zeta(&self) -> C64 {
        C64::from_polar(self.s.tanh(), self.theta)
    }

    pub fn phase(&self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }
}

/// Coherent superposition weights: |υ⟩ + τe^{iφ}|−υ⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatParam {
    pub upsilon: C64,
    pub tau: f64,
    pub varphi: f64,
}

impl CatParam {
    pub fn new(upsilon: C64, tau: f64, varphi: f64) -> Result<Self> {
        if !upsilon.is_finite() || !tau.is_finite() || !varphi.is_finite() || tau < 0.0 {
            return Err(ZooError::InvalidParam("cat weights must be finite, τ ≥ 0".into()));
        }
        Ok(CatParam { upsilon, tau, varphi })
    }

    /// 1 + τ² + 2τe^{−2|υ|²}cos φ, the squared inverse normalization.
    pub fn norm_denominator(&self) -> f64 {
        1.0 + self.tau * self.tau
            + 2.0 * self.tau * (-2.0 * self.upsilon.norm_sqr()).exp() * self.varphi.cos()
    }

    pub fn normalization(&self) -> Result<f64> {
        let d = self.norm_denominator();
        if d <= 1e-12 {
            return Err(ZooError::DegenerateNorm);
        }
        Ok(1.0 / d.sqrt())
    }

    fn ratio(&self) -> C64 {
        self.tau * C64::from_polar(1.0, self.varphi)
    }
}

/// SU(1,1) intelligent-state parameters (ηK₁ − iK₂ eigenvalue problem).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ISParam {
    pub eta: C64,
    pub lambda: C64,
}

impl ISParam {
    pub fn new(eta: C64, lambda: C64) -> Result<Self> {
        if !eta.is_finite() || !lambda.is_finite() {
            return Err(ZooError::InvalidParam("η and λ must be finite".into()));
        }
        if eta.re <= 0.0 {
            return Err(ZooError::InvalidParam(
                "Re η must be positive for a normalizable intelligent state".into(),
            ));
        }
        Ok(ISParam { eta, lambda })
    }

    /// Ω with Ω² = (1−η)/(1+η); |Ω| < 1 exactly when Re η > 0.
    pub fn omega(&self) -> C64 {
        ((ONE - self.eta) / (ONE + self.eta)).sqrt()
    }
}

/// A displacement z composed after a squeeze ξ, with the derived quantities
/// used by the superposition formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacedSqueezedFrame {
    pub xi: SqueezeParam,
    pub z: C64,
}

impl DisplacedSqueezedFrame {
    pub fn new(xi: SqueezeParam, z: C64) -> Result<Self> {
        if !z.is_finite() {
            return Err(ZooError::InvalidParam("displacement must be finite".into()));
        }
        Ok(DisplacedSqueezedFrame { xi, z })
    }

    /// ρ = z − ζz̄.
    pub fn rho(&self) -> C64 {
        self.z - self.xi.zeta() * self.z.conj()
    }

    /// u = ρ·cosh s = (z − ζz̄)/√(1−|ζ|²).
    pub fn u(&self) -> C64 {
        self.rho() * self.xi.s.cosh()
    }

    /// κ = i√(2ζ)·cosh s = i√(sinh 2s · e^{iθ}).
    pub fn kappa(&self) -> C64 {
        C64::new(0.0, 1.0) * (2.0 * self.xi.zeta()).sqrt() * self.xi.s.cosh()
    }

    /// y = υz̄/cosh s = ū·υ + ζ̄·u·υ.
    pub fn y(&self, upsilon: C64) -> C64 {
        upsilon * self.z.conj() / self.xi.s.cosh()
    }

    /// The displacement seen from inside the squeezed frame:
    /// u = cosh s·υ − sinh s e^{iθ}·ῡ.
    pub fn u_ss(xi: &SqueezeParam, upsilon: C64) -> C64 {
        xi.s.cosh() * upsilon - xi.s.sinh() * xi.phase() * upsilon.conj()
    }
}

/// Parameters of one state family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec {
    Glauber { upsilon: C64 },
    DisplacedFock { n: usize, upsilon: C64 },
    DisplacedSqueezed { xi: SqueezeParam, upsilon: C64 },
    Dsfs { n: usize, xi: SqueezeParam, upsilon: C64 },
    Cat { cat: CatParam },
    CatSdz { cat: CatParam, frame: DisplacedSqueezedFrame },
    Su11 { is: ISParam, mix: (C64, C64) },
    Su11Squeezed { is: ISParam, xi: SqueezeParam, mix: (C64, C64) },
    Su11Displaced { is: ISParam, z: C64, mix: (C64, C64) },
    Su11DisplacedSqueezed { is: ISParam, xi: SqueezeParam, z: C64, mix: (C64, C64) },
    RawAes { spec: AlgebraSpec, mix: (C64, C64) },
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Glauber { .. } => "glauber",
            FamilySpec::DisplacedFock { .. } => "displaced-fock",
            FamilySpec::DisplacedSqueezed { .. } => "displaced-squeezed",
            FamilySpec::Dsfs { .. } => "dsfs",
            FamilySpec::Cat { .. } => "cat",
            FamilySpec::CatSdz { .. } => "cat-sdz",
            FamilySpec::Su11 { .. } => "su11-is",
            FamilySpec::Su11Squeezed { .. } => "su11-is-squeezed",
            FamilySpec::Su11Displaced { .. } => "su11-is-displaced",
            FamilySpec::Su11DisplacedSqueezed { .. } => "su11-is-displaced-squeezed",
            FamilySpec::RawAes { .. } => "raw-aes",
        }
    }
}

/// Truncation policy for building Fock vectors.
#[derive(Debug, Clone, Copy)]
pub struct BuildConfig {
    pub max_dim: usize,
    pub tail_threshold: f64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { max_dim: 512, tail_threshold: 1e-14 }
    }
}

/// A state in all three representations.
#[derive(Debug, Clone)]
pub struct StateBundle {
    pub family: FamilySpec,
    pub spec: AlgebraSpec,
    pub state: AnalyticState,
    pub fock: FockVector,
    /// For quadrature intelligent states: (η, λ) of the equivalent
    /// (ηX₁ + iX₂)|ψ⟩ = λ|ψ⟩ form.
    pub quad_is_form: Option<(C64, C64)>,
}

/// Phase-free fidelity |⟨a|b⟩| of two normalized vectors.
pub fn fidelity(a: &FockVector, b: &FockVector) -> f64 {
    a.overlap(b).norm()
}

pub fn glauber(upsilon: C64) -> Result<StateBundle> {
    build(FamilySpec::Glauber { upsilon }, &BuildConfig::default())
}

pub fn displaced_fock(n: usize, upsilon: C64) -> Result<StateBundle> {
    build(FamilySpec::DisplacedFock { n, upsilon }, &BuildConfig::default())
}

pub fn displaced_squeezed(xi: SqueezeParam, upsilon: C64) -> Result<StateBundle> {
    build(FamilySpec::DisplacedSqueezed { xi, upsilon }, &BuildConfig::default())
}

pub fn dsfs(n: usize, xi: SqueezeParam, upsilon: C64) -> Result<StateBundle> {
    build(FamilySpec::Dsfs { n, xi, upsilon }, &BuildConfig::default())
}

pub fn cat(upsilon: C64, tau: f64, varphi: f64) -> Result<StateBundle> {
    build(FamilySpec::Cat { cat: CatParam::new(upsilon, tau, varphi)? }, &BuildConfig::default())
}

pub fn even_cat(upsilon: C64) -> Result<StateBundle> {
    cat(upsilon, 1.0, 0.0)
}

pub fn odd_cat(upsilon: C64) -> Result<StateBundle> {
    cat(upsilon, 1.0, std::f64::consts::PI)
}

pub fn yurke_stoler(upsilon: C64) -> Result<StateBundle> {
    cat(upsilon, 1.0, std::f64::consts::FRAC_PI_2)
}

pub fn cat_sdz(
    upsilon: C64,
    tau: f64,
    varphi: f64,
    xi: SqueezeParam,
    z: C64,
) -> Result<StateBundle> {
    let cat = CatParam::new(upsilon, tau, varphi)?;
    let frame = DisplacedSqueezedFrame::new(xi, z)?;
    build(FamilySpec::CatSdz { cat, frame }, &BuildConfig::default())
}

pub fn su11_is(lambda: C64, eta: C64, mix: (C64, C64)) -> Result<StateBundle> {
    build(FamilySpec::Su11 { is: ISParam::new(eta, lambda)?, mix }, &BuildConfig::default())
}

pub fn su11_is_squeezed(
    lambda: C64,
    eta: C64,
    xi: SqueezeParam,
    mix: (C64, C64),
) -> Result<StateBundle> {
    build(
        FamilySpec::Su11Squeezed { is: ISParam::new(eta, lambda)?, xi, mix },
        &BuildConfig::default(),
    )
}

pub fn su11_is_displaced(lambda: C64, eta: C64, z: C64, mix: (C64, C64)) -> Result<StateBundle> {
    build(
        FamilySpec::Su11Displaced { is: ISParam::new(eta, lambda)?, z, mix },
        &BuildConfig::default(),
    )
}

pub fn su11_is_displaced_squeezed(
    lambda: C64,
    eta: C64,
    xi: SqueezeParam,
    z: C64,
    mix: (C64, C64),
) -> Result<StateBundle> {
    build(
        FamilySpec::Su11DisplacedSqueezed { is: ISParam::new(eta, lambda)?, xi, z, mix },
        &BuildConfig::default(),
    )
}

pub fn raw_aes(spec: AlgebraSpec, mix: (C64, C64)) -> Result<StateBundle> {
    build(FamilySpec::RawAes { spec, mix }, &BuildConfig::default())
}

/// Map a family onto its algebra element, eigenvalue and solution mixture.
fn family_map(family: &FamilySpec) -> Result<(AlgebraSpec, (C64, C64), Option<(C64, C64)>)> {
    match *family {
        FamilySpec::Glauber { upsilon } => {
            let spec = AlgebraSpec::new([ZERO, ZERO, ZERO, ONE, ZERO], upsilon)?;
            Ok((spec, (ONE, ZERO), None))
        }
        FamilySpec::DisplacedFock { n, upsilon } => {
            let spec = AlgebraSpec::new(
                [ONE, ZERO, ZERO, -upsilon.conj(), -upsilon],
                C64::new(n as f64 - upsilon.norm_sqr(), 0.0),
            )?;
            Ok((spec, (ONE, ZERO), None))
        }
        FamilySpec::DisplacedSqueezed { xi, upsilon } => {
            let zeta = xi.zeta();
            let lambda = upsilon - zeta * upsilon.conj();
            let spec = AlgebraSpec::new([ZERO, ZERO, ZERO, ONE, -zeta], lambda)?;
            // the same state solves ((1−ζ)/(1+ζ)·X₁ + iX₂)ψ = λ/(1+ζ)·ψ
            let quad = ((ONE - zeta) / (ONE + zeta), lambda / (ONE + zeta));
            Ok((spec, (ONE, ZERO), Some(quad)))
        }
        FamilySpec::Dsfs { n, xi, upsilon } => {
            let (s, eith) = (xi.s, xi.phase());
            let c2 = (2.0 * s).cosh();
            let s2 = (2.0 * s).sinh();
            let b1 = C64::new(c2, 0.0);
            let b2 = -0.5 * s2 * eith.conj();
            let b3 = -0.5 * s2 * eith;
            let b4 = upsilon * s2 * eith.conj() - upsilon.conj() * c2;
            let b5 = upsilon.conj() * s2 * eith - upsilon * c2;
            let lambda = C64::new(n as f64 - s.sinh() * s.sinh(), 0.0)
                + s2 * (eith * upsilon.conj() * upsilon.conj()).re
                - upsilon.norm_sqr() * c2;
            let spec = AlgebraSpec::new([b1, b2, b3, b4, b5], lambda)?;
            let mix = if n % 2 == 0 { (ONE, ZERO) } else { (ZERO, ONE) };
            Ok((spec, mix, None))
        }
        FamilySpec::Cat { cat } => {
            cat.normalization()?;
            let ups = cat.upsilon;
            let spec = AlgebraSpec::new([ZERO, ONE, ZERO, ZERO, ZERO], ups * ups)?;
            let mix = exponential_mix(&spec, ups, ONE, cat.ratio())?;
            Ok((spec, mix, None))
        }
        FamilySpec::CatSdz { cat, frame } => {
            cat.normalization()?;
            let zeta = frame.xi.zeta();
            let rho = frame.rho();
            let ups = cat.upsilon;
            let lambda = ups * ups * (1.0 - zeta.norm_sqr()) + zeta - rho * rho;
            let spec = AlgebraSpec::new(
                [-2.0 * zeta, ONE, zeta * zeta, -2.0 * rho, 2.0 * zeta * rho],
                lambda,
            )?;
            // The component attached to e^{(ρ−q)α} picks up the factor
            // e^{2y} relative to the bare superposition weight when the
            // displacement and the amplitude overlap (y = υz̄/cosh s).
            let y = frame.y(ups);
            let q = ups / frame.xi.s.cosh();
            let mix = exponential_mix(&spec, rho + q, ONE, cat.ratio() * (2.0 * y).exp())?;
            Ok((spec, mix, None))
        }
        FamilySpec::Su11 { is, mix } => {
            let spec = AlgebraSpec::new(
                [ZERO, (is.eta + ONE) / 4.0, (is.eta - ONE) / 4.0, ZERO, ZERO],
                is.lambda,
            )?;
            if (is.eta - ONE).norm() <= 1e-12 * (1.0 + is.eta.norm()) {
                // η = 1 degenerates to the a² eigenvalue problem; translate
                // the sector mixture into exponential weights.
                let r = (2.0 * is.lambda).sqrt();
                let exp_mix = ((mix.0 + mix.1) / 2.0, (mix.0 - mix.1) / 2.0);
                let mix = exponential_mix(&spec, r, exp_mix.0, exp_mix.1)?;
                return Ok((spec, mix, None));
            }
            Ok((spec, mix, None))
        }
        FamilySpec::Su11Squeezed { is, xi, mix } => {
            let (b, l) = su11_transformed_element(&is, &xi, ZERO)?;
            Ok((AlgebraSpec::new(b, l)?, mix, None))
        }
        FamilySpec::Su11Displaced { is, z, mix } => {
            let eta = is.eta;
            reject_eta_one(&is)?;
            let b = [
                ZERO,
                eta + ONE,
                eta - ONE,
                -2.0 * z * (eta + ONE),
                -2.0 * z.conj() * (eta - ONE),
            ];
            let l = 4.0 * is.lambda
                - z * z * (eta + ONE)
                - z.conj() * z.conj() * (eta - ONE);
            Ok((AlgebraSpec::new(b, l)?, mix, None))
        }
        FamilySpec::Su11DisplacedSqueezed { is, xi, z, mix } => {
            let (b, l) = su11_transformed_element(&is, &xi, z)?;
            Ok((AlgebraSpec::new(b, l)?, mix, None))
        }
        FamilySpec::RawAes { spec, mix } => Ok((spec, mix, None)),
    }
}

fn reject_eta_one(is: &ISParam) -> Result<()> {
    if (is.eta - ONE).norm() <= 1e-9 * (1.0 + is.eta.norm()) {
        return Err(ZooError::InvalidParam(
            "η = 1 displaced/squeezed intelligent states are coherent superpositions; \
             build them through the cat-sdz family"
                .into(),
        ));
    }
    Ok(())
}

/// Element and eigenvalue for S(ξ), then D(z), applied to an SU(1,1)
/// intelligent state.
fn su11_transformed_element(
    is: &ISParam,
    xi: &SqueezeParam,
    z: C64,
) -> Result<([C64; 5], C64)> {
    if xi.s > 0.0 || z.norm() > 0.0 {
        reject_eta_one(is)?;
    }
    let eta = is.eta;
    let zeta = xi.zeta();
    let ep = eta + ONE;
    let em = eta - ONE;
    let b1 = -2.0 * (zeta * ep + zeta.conj() * em);
    let b2 = ep + zeta.conj() * zeta.conj() * em;
    let b3 = zeta * zeta * ep + em;
    let rho = z - zeta * z.conj();
    let b4 = -2.0 * rho * ep + 2.0 * zeta.conj() * rho.conj() * em;
    let b5 = 2.0 * zeta * rho * ep - 2.0 * rho.conj() * em;
    let l = 4.0 * (1.0 - zeta.norm_sqr()) * is.lambda
        + (zeta - rho * rho) * ep
        + (zeta.conj() - rho.conj() * rho.conj()) * em;
    Ok(([b1, b2, b3, b4, b5], l))
}

/// Translate weights attached to e^{ω₊α}, e^{ω₋α} with ω₊ = reference root
/// into the solver's root ordering.
fn exponential_mix(
    spec: &AlgebraSpec,
    reference_plus: C64,
    c_plus: C64,
    c_minus: C64,
) -> Result<(C64, C64)> {
    let params = solver::derive_params(spec)?;
    let (op, om) = params
        .omega
        .ok_or_else(|| ZooError::InvalidParam("expected a constant-coefficient element".into()))?;
    if params.double_root {
        // amplitude degenerated; the superposition collapses onto a single
        // exponential
        return Ok((c_plus + c_minus, ZERO));
    }
    if (op - reference_plus).norm() <= (om - reference_plus).norm() {
        Ok((c_plus, c_minus))
    } else {
        Ok((c_minus, c_plus))
    }
}

/// Build a bundle, growing the truncation until the tail converges.
pub fn build(family: FamilySpec, cfg: &BuildConfig) -> Result<StateBundle> {
    build_with_branch(family, cfg, DeltaBranch::Auto)
}

/// Same as [`build`], with the Δ-branch of the Kummer-form solution pinned.
pub fn build_with_branch(
    family: FamilySpec,
    cfg: &BuildConfig,
    branch: DeltaBranch,
) -> Result<StateBundle> {
    let (spec, mix, quad_is_form) = family_map(&family)?;
    let (mut state, mut fock) =
        solver::solve_full(&spec, mix, branch, cfg.max_dim, cfg.tail_threshold).map_err(|e| {
            match e {
                SolverError::TruncationNotConverged { dim, tail } => {
                    ZooError::NotConverged { max_dim: dim, tail }
                }
                other => ZooError::Solver(other),
            }
        })?;

    // global-phase convention: first nonzero coefficient real positive
    if let Some(first) = fock.coeffs.iter().find(|c| c.norm_sqr() > 1e-20) {
        let phase = first / first.norm();
        let rot = phase.conj();
        for c in &mut fock.coeffs {
            *c *= rot;
        }
        state.norm *= rot;
    }

    Ok(StateBundle { family, spec, state, fock, quad_is_form })
}

// ---------------------------------------------------------------------------
// Closed-form coefficient formulas, used as independent oracles in tests
// ---------------------------------------------------------------------------

/// Fock coefficients √n!·[αⁿ] exp(½ζα² + Bα), by the stable scaled
/// recurrence g_{n+1} = (B·gₙ + ζ√n·g_{n−1})/√(n+1).
pub fn gaussian_exponential_coefficients(zeta: C64, b: C64, dim: usize) -> Vec<C64> {
    let mut g = vec![ZERO; dim];
    g[0] = ONE;
    if dim > 1 {
        g[1] = b;
    }
    for n in 1..dim.saturating_sub(1) {
        g[n + 1] = (b * g[n] + zeta * (n as f64).sqrt() * g[n - 1]) / ((n + 1) as f64).sqrt();
    }
    g
}

/// Fock coefficients of P(α)·exp(½ζα² + Bα) for a polynomial P given in
/// ascending powers.
pub fn poly_times_gaussian_coefficients(
    zeta: C64,
    b: C64,
    poly: &[C64],
    dim: usize,
) -> Vec<C64> {
    let g = gaussian_exponential_coefficients(zeta, b, dim);
    let mut out = vec![ZERO; dim];
    for (m, o) in out.iter_mut().enumerate() {
        let mut falling = 1.0f64; // m(m−1)…(m−k+1)
        for (k, &p) in poly.iter().enumerate() {
            if k > m {
                break;
            }
            if k > 0 {
                falling *= (m - k + 1) as f64;
            }
            *o += p * g[m - k] * falling.sqrt();
        }
    }
    out
}

/// Normalization factor of D(υ)S(ξ)|0⟩ in the Bargmann form
/// Λ = Λ₀·exp(½ζα² + (υ−ζῡ)α):
/// Λ₀ = (1−|ζ|²)^{1/4}·exp(−½|u|² − ½ζ̄u²) with u = cosh s·υ − sinh s e^{iθ}ῡ.
pub fn displaced_squeezed_norm_factor(xi: &SqueezeParam, upsilon: C64) -> C64 {
    let zeta = xi.zeta();
    let u = DisplacedSqueezedFrame::u_ss(xi, upsilon);
    (1.0 - zeta.norm_sqr()).powf(0.25)
        * (-0.5 * u.norm_sqr() - 0.5 * zeta.conj() * u * u).exp()
}

/// Normalization factor of D(υ)S(ξ)|n⟩ in the Bargmann form
/// Λ = Λ₀·exp(½ζα² + (υ−ζῡ)α)·H_n((α−ῡ)/√(sinh 2s·e^{−iθ})):
/// Λ₀ = (ζ̄/2)^{n/2}/√(n!·cosh s)·exp(−½|u|² − ½ζ̄u²).
pub fn dsfs_norm_factor(n: usize, xi: &SqueezeParam, upsilon: C64) -> C64 {
    let zeta = xi.zeta();
    let u = DisplacedSqueezedFrame::u_ss(xi, upsilon);
    let mut fact = 1.0f64;
    for k in 1..=n {
        fact *= k as f64;
    }
    (zeta.conj() / 2.0).powc(C64::new(n as f64 / 2.0, 0.0))
        / (fact * xi.s.cosh()).sqrt()
        * (-0.5 * u.norm_sqr() - 0.5 * zeta.conj() * u * u).exp()
}

/// Full closed-form Fock coefficients of D(υ)S(ξ)|n⟩, normalization factor
/// included; their ℓ₂ norm tests that factor.
pub fn dsfs_closed_form_coefficients(
    n: usize,
    xi: &SqueezeParam,
    upsilon: C64,
    dim: usize,
) -> Vec<C64> {
    let zeta = xi.zeta();
    let kappa = ((2.0 * xi.s).sinh() * xi.phase().conj()).sqrt();
    // H_n((α−ῡ)/κ) expanded in powers of α
    let h = crate::complexfn::hermite_poly_coeffs(n);
    let mut poly = vec![ZERO; n + 1];
    let shift = -upsilon.conj();
    for (j, &hj) in h.iter().enumerate() {
        // hj · ((α + shift)/κ)^j
        let scale = kappa.powi(-(j as i32));
        let mut binom = 1.0f64;
        let mut shift_pow = ONE;
        for k in (0..=j).rev() {
            // term α^k · shift^{j−k} · C(j,k)
            poly[k] += hj * scale * binom * shift_pow;
            if k > 0 {
                binom *= k as f64 / ((j - k + 1) as f64);
                shift_pow *= shift;
            }
        }
    }
    let b = upsilon - zeta * upsilon.conj();
    let lam0 = dsfs_norm_factor(n, xi, upsilon);
    poly_times_gaussian_coefficients(zeta, b, &poly, dim)
        .into_iter()
        .map(|c| lam0 * c)
        .collect()
}

/// Exact Fock coefficients of D(z)S(ξ)(|υ⟩ + τe^{iφ}|−υ⟩)·N, derived by
/// commuting the displacement through the squeeze per superposition
/// component. Their ℓ₂ norm is 1 up to truncation.
pub fn cat_sdz_closed_form_coefficients(
    cat: &CatParam,
    frame: &DisplacedSqueezedFrame,
    dim: usize,
) -> Result<Vec<C64>> {
    let norm = cat.normalization()?;
    let xi = frame.xi;
    let zeta = xi.zeta();
    let ups = cat.upsilon;
    let rho = frame.rho();
    let u = frame.u();
    let q = ups / xi.s.cosh();
    // v is the frame displacement equivalent to displacing by υ before the
    // squeeze: S(ξ)D(υ) = D(v)S(ξ)
    let v = xi.s.cosh() * ups + xi.s.sinh() * xi.phase() * ups.conj();
    let im_zv = (frame.z * v.conj()).im;
    let quarter = (1.0 - zeta.norm_sqr()).powf(0.25);
    let amp = |sign: f64| -> C64 {
        let uw = u + sign * ups;
        quarter
            * C64::from_polar(1.0, sign * im_zv)
            * (-0.5 * uw.norm_sqr() - 0.5 * zeta.conj() * uw * uw).exp()
    };
    let c_plus = norm * amp(1.0);
    let c_minus = norm * cat.tau * C64::from_polar(1.0, cat.varphi) * amp(-1.0);
    let g_plus = gaussian_exponential_coefficients(zeta, rho + q, dim);
    let g_minus = gaussian_exponential_coefficients(zeta, rho - q, dim);
    Ok((0..dim).map(|m| c_plus * g_plus[m] + c_minus * g_minus[m]).collect())
}

/// Normalization constant C₊ of the Hermite-expansion form of the displaced
/// and squeezed superposition whose component weights are paired as
/// (C₊, τe^{iφ}C₊):
///
/// C₊⁻² = exp{|u|²+|υ|²+Re[ζ̄(u²+υ²)]}/√(1−|ζ|²) ·
///        [e^{2Re y} + τ²e^{−2Re y} + 2τe^{−2|υ|²}cos(φ−2Im y)].
pub fn cat_sdz_cplus_norm(cat: &CatParam, frame: &DisplacedSqueezedFrame) -> f64 {
    let zeta = frame.xi.zeta();
    let u = frame.u();
    let ups = cat.upsilon;
    let y = frame.y(ups);
    let p = u.norm_sqr() + ups.norm_sqr() + (zeta.conj() * (u * u + ups * ups)).re;
    let bracket = (2.0 * y.re).exp()
        + cat.tau * cat.tau * (-2.0 * y.re).exp()
        + 2.0 * cat.tau * (-2.0 * ups.norm_sqr()).exp() * (cat.varphi - 2.0 * y.im).cos();
    let inv_sq = p.exp() / (1.0 - zeta.norm_sqr()).sqrt() * bracket;
    1.0 / inv_sq.sqrt()
}

/// Fock coefficients of the (C₊, τe^{iφ}C₊)-paired Hermite expansion with
/// C₊ from [`cat_sdz_cplus_norm`]; unit ℓ₂ norm checks that constant.
pub fn cat_sdz_paired_expansion(
    cat: &CatParam,
    frame: &DisplacedSqueezedFrame,
    dim: usize,
) -> Vec<C64> {
    let zeta = frame.xi.zeta();
    let rho = frame.rho();
    let q = cat.upsilon / frame.xi.s.cosh();
    let cp = C64::new(cat_sdz_cplus_norm(cat, frame), 0.0);
    let ratio = cat.tau * C64::from_polar(1.0, cat.varphi);
    let g_plus = gaussian_exponential_coefficients(zeta, rho + q, dim);
    let g_minus = gaussian_exponential_coefficients(zeta, rho - q, dim);
    (0..dim).map(|m| cp * (g_plus[m] + ratio * g_minus[m])).collect()
}
