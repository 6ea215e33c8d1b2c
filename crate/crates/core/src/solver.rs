//! Classification and closed-form solution of the two-photon eigenvalue
//! problem
//!
//! ```text
//! (β₁N + β₂a² + β₃a†² + β₄a + β₅a†) |ψ⟩ = λ |ψ⟩
//! ```
//!
//! in the Bargmann picture, where the element acts as
//! `β₂Λ'' + (β₁α + β₄)Λ' + (β₃α² + β₅α − λ)Λ = 0`. The case analysis follows
//! the discriminant Δ² = β₁² − 4β₂β₃ and the shifted driving term
//! σ = β₄(Δ−β₁)/(2β₂) + β₅:
//!
//! * `GeneralKummer`    — β₂ ≠ 0, Δ ≠ 0: Gaussian × confluent hypergeometric;
//! * `DegenerateBessel` — β₂ ≠ 0, Δ = 0, σ ≠ 0: Gaussian × Airy-type kernel;
//! * `ConstantCoeff`    — β₂ ≠ 0, Δ = 0, σ = 0: Gaussian × exponentials;
//! * `FirstOrderSqueezeLike` / `Oscillator` — β₂ = 0, β₁ ≠ 0: polynomial ×
//!   Gaussian, integer exponent required;
//! * `Heisenberg`       — β₁ = β₂ = β₃ = 0, β₄ ≠ 0: pure Gaussian.
//!
//! Besides the closed forms, [`fock_coefficients`] extracts truncated Fock
//! coefficients. The five-term recurrence coupling the cₙ (the rows of the
//! truncated matrix of the element) admits solutions whose growth rates are
//! exponentially separated, so running it forward from (c₀, c₁) amplifies
//! seed rounding catastrophically for β₂ ≠ 0. We instead solve the same
//! banded system as a whole: a pivoted banded LU plus two-vector inverse
//! iteration yields the near-null subspace, and the analytic solution
//! evaluated at two probe points selects the member matching the requested
//! even/odd mixture. The result satisfies the recurrence rows to roundoff
//! and is stable at any truncation dimension.

use crate::complexfn::{self, Parity, SpecialFnError};
use crate::C64;
use thiserror::Error;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Relative threshold deciding β = 0 and Δ = 0 during classification.
const CLASSIFY_TOL: f64 = 1e-12;
/// Tolerance for snapping first-order exponents and Kummer parameters to
/// integers.
const INT_SNAP_TOL: f64 = 1e-8;
/// Default tail-mass threshold below which a truncation is "converged".
pub const DEFAULT_TAIL_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid algebra element: {0}")]
    InvalidSpec(&'static str),
    #[error("the element has no eigenstate (pure creation operator)")]
    NoEigenstate,
    #[error("no normalizable eigenstate: {0}")]
    NonNormalizable(&'static str),
    #[error("first-order exponent p = {re}{im:+}i does not round to a nonnegative integer")]
    NonIntegerExponent { re: f64, im: f64 },
    #[error("truncation at dim {dim} not converged (tail mass {tail:.3e})")]
    TruncationNotConverged { dim: usize, tail: f64 },
    #[error(transparent)]
    Special(#[from] SpecialFnError),
}

type Result<T> = std::result::Result<T, SolverError>;

/// A complex element of the two-photon algebra together with its eigenvalue:
/// `beta = [β₁, β₂, β₃, β₄, β₅]` multiplying `[N, a², a†², a, a†]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraSpec {
    pub beta: [C64; 5],
    pub lambda: C64,
}

impl AlgebraSpec {
    pub fn new(beta: [C64; 5], lambda: C64) -> Result<Self> {
        let all = beta.iter().chain(std::iter::once(&lambda));
        for z in all {
            if !z.is_finite() {
                return Err(SolverError::InvalidSpec("non-finite coefficient"));
            }
        }
        if beta.iter().all(|b| b.norm() == 0.0) {
            return Err(SolverError::InvalidSpec("all five coefficients vanish"));
        }
        Ok(Self { beta, lambda })
    }

    /// Largest |βᵢ|; the reference scale for zero tests.
    pub fn beta_scale(&self) -> f64 {
        self.beta.iter().map(|b| b.norm()).fold(0.0, f64::max)
    }

    fn b(&self, i: usize) -> C64 {
        self.beta[i - 1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    GeneralKummer,
    DegenerateBessel,
    ConstantCoeff,
    FirstOrderSqueezeLike,
    Oscillator,
    Heisenberg,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseTag::GeneralKummer => "general-kummer",
            CaseTag::DegenerateBessel => "degenerate-bessel",
            CaseTag::ConstantCoeff => "constant-coeff",
            CaseTag::FirstOrderSqueezeLike => "first-order",
            CaseTag::Oscillator => "oscillator",
            CaseTag::Heisenberg => "heisenberg",
        };
        f.write_str(s)
    }
}

/// Which square root of Δ² to use for the Kummer-form solution. Both
/// describe the same ray (they are related by Kummer's transformation);
/// `Auto` applies the normalizability-driven preference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeltaBranch {
    #[default]
    Auto,
    Principal,
    Negated,
}

/// Parameters derived from an [`AlgebraSpec`]; which fields are meaningful
/// depends on the case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// Selected branch of √(β₁² − 4β₂β₃); zero in the degenerate cases.
    pub delta: C64,
    pub sigma: C64,
    /// Center of the hypergeometric argument (μ_Δ), or of the Airy kernel
    /// (μ₀) in the degenerate case.
    pub mu: C64,
    /// Kummer parameter of the even solution.
    pub d: C64,
    /// Exponential rates of the constant-coefficient case.
    pub omega: Option<(C64, C64)>,
    /// The constant-coefficient discriminant collapsed to a double root.
    pub double_root: bool,
    /// Raw first-order exponent before integer snapping.
    pub p: Option<C64>,
    /// Snapped exponent, present when `p` rounds to a nonnegative integer.
    pub p_int: Option<u64>,
}

impl DerivedParams {
    fn empty() -> Self {
        DerivedParams {
            delta: ZERO,
            sigma: ZERO,
            mu: ZERO,
            d: ZERO,
            omega: None,
            double_root: false,
            p: None,
            p_int: None,
        }
    }
}

/// A classified closed-form eigenstate Λ(λ,β;α).
///
/// `mix = (c_even, c_odd)` weighs the two independent solutions in the
/// second-order cases (it is ignored by the single-solution cases, which
/// store `(1, 0)`). `norm` is the overall factor that makes the truncated
/// Fock expansion of [`AnalyticState::evaluate`] a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticState {
    pub spec: AlgebraSpec,
    pub case: CaseTag,
    pub params: DerivedParams,
    pub mix: (C64, C64),
    pub norm: C64,
}

/// Truncated Fock-space coefficient vector `{cₙ}` with truncation metadata.
///
/// `coeffs` is normalized to unit ℓ₂ norm; `norm` records the ℓ₂ norm the
/// vector had before normalization, and `tail_mass` is Σ|cₙ|² over the last
/// 16 slots of the normalized vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub coeffs: Vec<C64>,
    pub dim: usize,
    pub tail_mass: f64,
    pub norm: f64,
}

impl FockVector {
    /// Wrap and normalize a raw coefficient vector.
    pub fn from_raw(mut coeffs: Vec<C64>) -> Self {
        let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for c in &mut coeffs {
                *c /= norm;
            }
        }
        let dim = coeffs.len();
        let tail_mass = tail_mass_of(&coeffs);
        FockVector { coeffs, dim, tail_mass, norm }
    }

    /// Bargmann-space value Σ cₙ αⁿ/√n! of this vector.
    pub fn bargmann_value(&self, alpha: C64) -> C64 {
        bargmann_sum(&self.coeffs, alpha)
    }

    /// Inner product ⟨self|other⟩ over the common dimension.
    pub fn overlap(&self, other: &FockVector) -> C64 {
        let m = self.coeffs.len().min(other.coeffs.len());
        (0..m).map(|i| self.coeffs[i].conj() * other.coeffs[i]).sum()
    }
}

pub(crate) fn tail_mass_of(coeffs: &[C64]) -> f64 {
    let n = coeffs.len();
    let start = n.saturating_sub(16);
    coeffs[start..].iter().map(|c| c.norm_sqr()).sum()
}

pub(crate) fn bargmann_sum(coeffs: &[C64], alpha: C64) -> C64 {
    // Σ cₙ αⁿ/√n!, with the power/factorial ratio carried iteratively.
    let mut term = ONE;
    let mut sum = ZERO;
    for (n, c) in coeffs.iter().enumerate() {
        sum += *c * term;
        term = term * alpha / ((n + 1) as f64).sqrt();
    }
    sum
}

fn is_nonpos_int(z: C64) -> Option<i64> {
    let r = z.re.round();
    if z.im.abs() <= INT_SNAP_TOL && (z.re - r).abs() <= INT_SNAP_TOL && r <= 0.0 {
        Some(r as i64)
    } else {
        None
    }
}

fn is_nonneg_int(z: C64) -> Option<u64> {
    let r = z.re.round();
    if z.im.abs() <= INT_SNAP_TOL && (z.re - r).abs() <= INT_SNAP_TOL && r >= -0.0 {
        Some(r as u64)
    } else {
        None
    }
}

/// Decide the solution case of a spec.
///
/// Zero tests use `1e-12` relative to max|βᵢ|; near-degenerate specs fall
/// through to `GeneralKummer`, whose solution remains valid there.
pub fn classify(spec: &AlgebraSpec) -> Result<CaseTag> {
    let scale = spec.beta_scale();
    let tol = CLASSIFY_TOL * scale;
    let zero = |z: C64| z.norm() <= tol;
    let (b1, b2, b3, b4, b5) = (spec.b(1), spec.b(2), spec.b(3), spec.b(4), spec.b(5));

    if !zero(b2) {
        let delta2 = b1 * b1 - 4.0 * b2 * b3;
        if delta2.norm().sqrt() > tol {
            return Ok(CaseTag::GeneralKummer);
        }
        // σ at Δ = 0
        let sigma0 = -b1 * b4 / (2.0 * b2) + b5;
        if !zero(sigma0) {
            return Ok(CaseTag::DegenerateBessel);
        }
        return Ok(CaseTag::ConstantCoeff);
    }
    if !zero(b1) {
        if zero(b3) {
            return Ok(CaseTag::Oscillator);
        }
        return Ok(CaseTag::FirstOrderSqueezeLike);
    }
    if !zero(b3) {
        // β₂ = β₁ = 0, β₃ ≠ 0: the formal solution carries a cubic exponent
        // exp(−β₃α³/(3β₄)) and is never square-integrable against the
        // Gaussian measure.
        return Err(SolverError::NonNormalizable(
            "quadratic creation term without matching annihilation part",
        ));
    }
    if !zero(b4) {
        return Ok(CaseTag::Heisenberg);
    }
    if !zero(b5) {
        return Err(SolverError::NoEigenstate);
    }
    Err(SolverError::InvalidSpec("all coefficients below zero threshold"))
}

/// Per-component normalizability of a Kummer-form solution.
///
/// A component `₁F₁(a|c|w)` under the Gaussian prefactors has the two
/// asymptotic Gaussian rates `z_a = (Δ−β₁)/(2β₂)` (algebraic sector) and
/// `z_b = −(Δ+β₁)/(2β₂)` (the e^w sector). A nonpositive-integer `a` kills
/// the e^w sector (polynomial solution); a nonpositive-integer `c − a`
/// kills the algebraic sector; otherwise both rates must lie in the unit
/// disk. The verdict is branch-independent.
fn kummer_component_ok(a: C64, c: f64, z_a: C64, z_b: C64) -> bool {
    if is_nonpos_int(a).is_some() {
        z_a.norm() < 1.0
    } else if is_nonpos_int(C64::new(c, 0.0) - a).is_some() {
        z_b.norm() < 1.0
    } else {
        z_a.norm() < 1.0 && z_b.norm() < 1.0
    }
}

struct KummerBranch {
    delta: C64,
    sigma: C64,
    mu: C64,
    d: C64,
    z_a: C64,
    z_b: C64,
}

fn kummer_branch(spec: &AlgebraSpec, delta: C64) -> KummerBranch {
    let (b1, b2, b4, b5) = (spec.b(1), spec.b(2), spec.b(4), spec.b(5));
    let delta2 = delta * delta;
    let sigma = b4 * (delta - b1) / (2.0 * b2) + b5;
    let mu = (2.0 * b2 * b5 - b1 * b4) / delta2;
    let d = (b2 * sigma * sigma / delta2 - b4 * sigma / delta + (delta - b1) / 2.0 - spec.lambda)
        / (2.0 * delta);
    let z_a = (delta - b1) / (2.0 * b2);
    let z_b = -(delta + b1) / (2.0 * b2);
    KummerBranch { delta, sigma, mu, d, z_a, z_b }
}

fn derive_general_kummer(
    spec: &AlgebraSpec,
    branch: DeltaBranch,
) -> Result<(DerivedParams, [bool; 2])> {
    let (b1, b2, b3) = (spec.b(1), spec.b(2), spec.b(3));
    let delta_p = (b1 * b1 - 4.0 * b2 * b3).sqrt();
    let principal = kummer_branch(spec, delta_p);
    let negated = kummer_branch(spec, -delta_p);

    // Normalizability per parity component; identical on either branch.
    let even_ok = kummer_component_ok(principal.d, 0.5, principal.z_a, principal.z_b);
    let odd_ok = kummer_component_ok(principal.d + 0.5, 1.5, principal.z_a, principal.z_b);
    if !even_ok && !odd_ok {
        return Err(SolverError::NonNormalizable(
            "both Gaussian sectors grow outside the unit disk",
        ));
    }

    let chosen = match branch {
        DeltaBranch::Principal => principal,
        DeltaBranch::Negated => negated,
        DeltaBranch::Auto => {
            // A branch on which a normalizable sector terminates (d or d+½
            // a nonpositive integer with |z_a| < 1) gives an exact finite
            // sum and is numerically far ahead of its Kummer twin, so it
            // wins outright. Otherwise prefer the branch whose e^w sector
            // is normalizable; a normalizable polynomial sector on one
            // branch always surfaces as |z_b| < 1 on the other, so this
            // chain covers every admissible spec.
            let is_poly = |b: &KummerBranch| {
                b.z_a.norm() < 1.0
                    && (is_nonpos_int(b.d).is_some() || is_nonpos_int(b.d + 0.5).is_some())
            };
            let pb = principal.z_b.norm();
            let nb = negated.z_b.norm();
            if is_poly(&principal) {
                principal
            } else if is_poly(&negated) {
                negated
            } else if pb < 1.0 && pb <= nb {
                principal
            } else if nb < 1.0 {
                negated
            } else if pb < 1.0 {
                principal
            } else if principal.z_a.norm() < 1.0 {
                principal
            } else {
                negated
            }
        }
    };
    let params = DerivedParams {
        delta: chosen.delta,
        sigma: chosen.sigma,
        mu: chosen.mu,
        d: chosen.d,
        ..DerivedParams::empty()
    };
    Ok((params, [even_ok, odd_ok]))
}

/// Derive the case-specific parameters and run the normalizability gate.
pub fn derive_params(spec: &AlgebraSpec) -> Result<DerivedParams> {
    derive_params_with_branch(spec, DeltaBranch::Auto).map(|(_, p, _)| p)
}

fn derive_params_with_branch(
    spec: &AlgebraSpec,
    branch: DeltaBranch,
) -> Result<(CaseTag, DerivedParams, [bool; 2])> {
    let case = classify(spec)?;
    let (b1, b2, b3, b4, b5) = (spec.b(1), spec.b(2), spec.b(3), spec.b(4), spec.b(5));
    match case {
        CaseTag::GeneralKummer => {
            let (params, comp_ok) = derive_general_kummer(spec, branch)?;
            Ok((case, params, comp_ok))
        }
        CaseTag::DegenerateBessel => {
            if b1.norm() >= 2.0 * b2.norm() {
                return Err(SolverError::NonNormalizable("|β₁/β₂| ≥ 2 in the degenerate case"));
            }
            let sigma = -b1 * b4 / (2.0 * b2) + b5;
            let mu = (4.0 * b2 * spec.lambda + 2.0 * b1 * b2 + b4 * b4) / (4.0 * b2 * sigma);
            let params =
                DerivedParams { sigma, mu, ..DerivedParams::empty() };
            Ok((case, params, [true, true]))
        }
        CaseTag::ConstantCoeff => {
            if b1.norm() >= 2.0 * b2.norm() {
                return Err(SolverError::NonNormalizable(
                    "|β₁/β₂| ≥ 2 in the constant-coefficient case",
                ));
            }
            // Characteristic roots of β₂ω² + β₄ω − (β₁/2 + λ) = 0. The
            // discriminant is β₄² + 2β₁β₂ + 4β₂λ, re-derived from the
            // transformed equation and verified by substitution.
            let disc = (b4 * b4 + 2.0 * b1 * b2 + 4.0 * b2 * spec.lambda).sqrt();
            let omega_p = (-b4 + disc) / (2.0 * b2);
            let omega_m = (-b4 - disc) / (2.0 * b2);
            let double = (omega_p - omega_m).norm() <= 1e-9 * (1.0 + omega_p.norm() + omega_m.norm());
            let params = DerivedParams {
                omega: Some((omega_p, omega_m)),
                double_root: double,
                ..DerivedParams::empty()
            };
            Ok((case, params, [true, true]))
        }
        CaseTag::FirstOrderSqueezeLike | CaseTag::Oscillator => {
            if b3.norm() >= b1.norm() {
                return Err(SolverError::NonNormalizable("|β₃/β₁| ≥ 1 in the first-order case"));
            }
            let p = (b1 * b1 * spec.lambda - b4 * (b3 * b4 - b1 * b5)) / (b1 * b1 * b1);
            let p_int = is_nonneg_int(p);
            let params = DerivedParams { p: Some(p), p_int, ..DerivedParams::empty() };
            Ok((case, params, [true, true]))
        }
        CaseTag::Heisenberg => {
            if b5.norm() >= b4.norm() {
                return Err(SolverError::NonNormalizable("|β₅/β₄| ≥ 1 in the Gaussian case"));
            }
            Ok((case, DerivedParams::empty(), [true, true]))
        }
    }
}

/// Closed-form value of the (unnormalized) solution.
fn eval_raw(
    spec: &AlgebraSpec,
    case: CaseTag,
    params: &DerivedParams,
    mix: (C64, C64),
    alpha: C64,
) -> Result<C64> {
    let (b1, b2, b3, b4, b5) = (spec.b(1), spec.b(2), spec.b(3), spec.b(4), spec.b(5));
    match case {
        CaseTag::GeneralKummer => {
            let delta = params.delta;
            let w = -delta / (2.0 * b2) * (alpha - params.mu) * (alpha - params.mu);
            let gauss = ((delta - b1) / (4.0 * b2) * alpha * alpha).exp();
            let drive = (-params.sigma * alpha / delta).exp();
            let mut val = ZERO;
            if mix.0.norm() > 0.0 {
                val += mix.0 * complexfn::kummer_1f1(params.d, C64::new(0.5, 0.0), w)?;
            }
            if mix.1.norm() > 0.0 {
                let pref = (-delta / (2.0 * b2)).sqrt() * (alpha - params.mu);
                val += mix.1
                    * pref
                    * complexfn::kummer_1f1(params.d + 0.5, C64::new(1.5, 0.0), w)?;
            }
            Ok(gauss * drive * val)
        }
        CaseTag::DegenerateBessel => {
            let c = (params.sigma / b2).sqrt();
            let x = alpha - params.mu;
            let gauss = (-b1 / (4.0 * b2) * alpha * alpha).exp();
            let drive = (-b4 / (2.0 * b2) * alpha).exp();
            let mut val = ZERO;
            if mix.0.norm() > 0.0 {
                val += mix.0 * complexfn::degenerate_kernel(c, x, Parity::Even)?;
            }
            if mix.1.norm() > 0.0 {
                val += mix.1 * complexfn::degenerate_kernel(c, x, Parity::Odd)?;
            }
            Ok(gauss * drive * val)
        }
        CaseTag::ConstantCoeff => {
            let (op, om) = params.omega.expect("constant-coefficient params carry omega");
            let gauss = (-b1 / (4.0 * b2) * alpha * alpha).exp();
            let val = if params.double_root {
                (mix.0 + mix.1 * alpha) * (op * alpha).exp()
            } else {
                mix.0 * (op * alpha).exp() + mix.1 * (om * alpha).exp()
            };
            Ok(gauss * val)
        }
        CaseTag::FirstOrderSqueezeLike | CaseTag::Oscillator => {
            let p = params.p_int.expect("solve() snaps the exponent before evaluation");
            let base = alpha + b4 / b1;
            let mut pw = ONE;
            for _ in 0..p {
                pw *= base;
            }
            let expo = (-b3 / (2.0 * b1) * alpha * alpha
                + (b3 * b4 - b1 * b5) / (b1 * b1) * alpha)
                .exp();
            Ok(pw * expo)
        }
        CaseTag::Heisenberg => {
            Ok((-b5 / (2.0 * b4) * alpha * alpha + spec.lambda / b4 * alpha).exp())
        }
    }
}

impl AnalyticState {
    /// Λ(λ,β;α) including the normalization factor.
    pub fn evaluate(&self, alpha: C64) -> Result<C64> {
        Ok(self.norm * eval_raw(&self.spec, self.case, &self.params, self.mix, alpha)?)
    }

    /// The value of the solution with `norm` factored out.
    pub fn evaluate_unnormalized(&self, alpha: C64) -> Result<C64> {
        eval_raw(&self.spec, self.case, &self.params, self.mix, alpha)
    }
}

/// Solve for the eigenstate with the default branch preference.
pub fn solve(spec: &AlgebraSpec, mix: (C64, C64)) -> Result<AnalyticState> {
    solve_with_branch(spec, mix, DeltaBranch::Auto)
}

/// Solve with an explicit Δ-branch choice (the two branches describe the
/// same ray; exposing the choice lets callers verify exactly that).
pub fn solve_with_branch(
    spec: &AlgebraSpec,
    mix: (C64, C64),
    branch: DeltaBranch,
) -> Result<AnalyticState> {
    let (state, _) = solve_full(spec, mix, branch, 512, DEFAULT_TAIL_THRESHOLD)?;
    Ok(state)
}

/// Power-series/Fock coefficients of the eigenstate at fixed truncation.
///
/// The returned vector satisfies the coefficient recurrence
/// `β₂√((n+1)(n+2))·c_{n+2} + β₄√(n+1)·c_{n+1} + (β₁n−λ)·c_n
///  + β₅√n·c_{n−1} + β₃√(n(n−1))·c_{n−2} = 0`
/// on all interior rows, is seeded by the analytic solution's behavior near
/// α = 0, and is normalized. Callers should retry with a larger `dim` when
/// `TruncationNotConverged` is returned.
pub fn fock_coefficients(spec: &AlgebraSpec, mix: (C64, C64), dim: usize) -> Result<FockVector> {
    assert!(dim >= 8, "Fock truncation below the supported minimum");
    let (case, params, comp_ok) = derive_params_with_branch(spec, DeltaBranch::Auto)?;
    let (mix, params) = validate_mix(spec, case, params, mix, comp_ok)?;
    let (fock, resid) = fock_at_dim(spec, case, &params, mix, dim)?;
    if fock.tail_mass <= DEFAULT_TAIL_THRESHOLD && resid <= 1e-8 {
        return Ok(fock);
    }
    if resid > 1e-8 {
        // The requested dimension overshoots what f64 conditioning allows
        // for this state. Extract at a smaller dimension; once the tail is
        // far below threshold the zero-padded vector still satisfies the
        // recurrence rows at the seam.
        let mut d = dim * 3 / 4;
        while d >= 32 {
            if let Ok((small, r)) = fock_at_dim(spec, case, &params, mix, d) {
                if r <= 1e-8 && small.tail_mass <= 1e-20 {
                    let mut coeffs = small.coeffs;
                    coeffs.resize(dim, ZERO);
                    return Ok(FockVector {
                        dim,
                        tail_mass: 0.0,
                        norm: small.norm,
                        coeffs,
                    });
                }
            }
            d = d * 3 / 4;
        }
    }
    Err(SolverError::TruncationNotConverged { dim, tail: fock.tail_mass })
}

/// Solve and extract Fock coefficients in one pass, growing the truncation
/// until the tail converges or `max_dim` is reached.
pub(crate) fn solve_full(
    spec: &AlgebraSpec,
    mix: (C64, C64),
    branch: DeltaBranch,
    max_dim: usize,
    tail_threshold: f64,
) -> Result<(AnalyticState, FockVector)> {
    let (case, params, comp_ok) = derive_params_with_branch(spec, branch)?;
    let (mix, params) = validate_mix(spec, case, params, mix, comp_ok)?;

    // The tail mass decays geometrically with the dimension, so ~25% steps
    // always land inside the window where the tail is below threshold but
    // the truncated matrix is still well enough conditioned to extract the
    // null pair. Very large dimensions for strongly concentrated states
    // would push the smallest singular values below what f64 can resolve.
    let ladder = [
        48usize, 64, 80, 96, 120, 144, 176, 216, 256, 320, 384, 448, 512,
    ];
    let mut last_tail = f64::INFINITY;
    for &dim in ladder.iter().filter(|&&d| d <= max_dim.max(48)) {
        let (fock, resid) = fock_at_dim(spec, case, &params, mix, dim)?;
        if resid <= 1e-8 {
            last_tail = last_tail.min(fock.tail_mass);
            if fock.tail_mass <= tail_threshold {
                let norm = C64::new(1.0 / fock.norm, 0.0);
                let state = AnalyticState { spec: *spec, case, params, mix, norm };
                return Ok((state, fock));
            }
        }
        if dim >= max_dim {
            break;
        }
    }
    Err(SolverError::TruncationNotConverged { dim: max_dim, tail: last_tail })
}

/// Check the requested mixture against the case and per-component gates,
/// and snap first-order exponents.
fn validate_mix(
    _spec: &AlgebraSpec,
    case: CaseTag,
    params: DerivedParams,
    mix: (C64, C64),
    comp_ok: [bool; 2],
) -> Result<((C64, C64), DerivedParams)> {
    if mix.0.norm() == 0.0 && mix.1.norm() == 0.0 {
        return Err(SolverError::InvalidSpec("mixture weights are both zero"));
    }
    match case {
        CaseTag::GeneralKummer => {
            if mix.0.norm() > 0.0 && !comp_ok[0] {
                return Err(SolverError::NonNormalizable("even-sector solution is not normalizable"));
            }
            if mix.1.norm() > 0.0 && !comp_ok[1] {
                return Err(SolverError::NonNormalizable("odd-sector solution is not normalizable"));
            }
            Ok((mix, params))
        }
        CaseTag::FirstOrderSqueezeLike | CaseTag::Oscillator => {
            if params.p_int.is_none() {
                let p = params.p.unwrap();
                return Err(SolverError::NonIntegerExponent { re: p.re, im: p.im });
            }
            Ok(((ONE, ZERO), params))
        }
        CaseTag::Heisenberg => Ok(((ONE, ZERO), params)),
        _ => Ok((mix, params)),
    }
}

// ---------------------------------------------------------------------------
// Banded extraction of the Fock coefficients
// ---------------------------------------------------------------------------

const KL: usize = 2;
const KU: usize = 2;
const LDAB: usize = 2 * KL + KU + 1;

/// Banded LU with partial pivoting for the pentadiagonal matrix of the
/// coefficient recurrence. Storage and elimination follow the classic
/// band-factorization layout: entry (i, j) lives at `ab[j·LDAB + i − j + KL+KU]`.
struct BandedLu {
    n: usize,
    ab: Vec<C64>,
    piv: Vec<usize>,
}

impl BandedLu {
    fn index(i: usize, j: usize) -> usize {
        j * LDAB + (i + KL + KU - j)
    }

    /// Factor the truncated matrix of (element − λ). An exactly zero pivot
    /// is replaced by a tiny value, which is what inverse iteration wants.
    fn factor(spec: &AlgebraSpec, n: usize) -> BandedLu {
        let mut ab = vec![ZERO; LDAB * n];
        let (b1, b2, b3, b4, b5) = (spec.b(1), spec.b(2), spec.b(3), spec.b(4), spec.b(5));
        let mut scale = 0.0f64;
        for m in 0..n {
            let mf = m as f64;
            let mut put = |i: i64, v: C64| {
                if i >= 0 && (i as usize) < n {
                    ab[Self::index(m, i as usize)] = v;
                    scale = scale.max(v.norm());
                }
            };
            // row m of the recurrence: columns m−2 … m+2
            put(m as i64 - 2, b3 * (mf * (mf - 1.0)).sqrt());
            put(m as i64 - 1, b5 * mf.sqrt());
            put(m as i64, b1 * mf - spec.lambda);
            put(m as i64 + 1, b4 * (mf + 1.0).sqrt());
            put(m as i64 + 2, b2 * ((mf + 1.0) * (mf + 2.0)).sqrt());
        }
        let tiny = (1.0 + scale) * 1e-100;

        let mut piv = vec![0usize; n];
        let mut ju = 0usize;
        for j in 0..n {
            let km = KL.min(n - 1 - j);
            // partial pivot over rows j..=j+km of column j
            let mut t_best = 0usize;
            let mut v_best = ab[Self::index(j, j)].norm_sqr();
            for t in 1..=km {
                let v = ab[Self::index(j + t, j)].norm_sqr();
                if v > v_best {
                    v_best = v;
                    t_best = t;
                }
            }
            piv[j] = j + t_best;
            ju = ju.max((j + t_best + KU).min(n - 1));
            if t_best != 0 {
                for c in j..=ju {
                    let a = Self::index(j, c);
                    let b = Self::index(j + t_best, c);
                    ab.swap(a, b);
                }
            }
            if ab[Self::index(j, j)].norm() == 0.0 {
                ab[Self::index(j, j)] = C64::new(tiny, 0.0);
            }
            let pivot = ab[Self::index(j, j)];
            for i in j + 1..=j + km {
                let m = ab[Self::index(i, j)] / pivot;
                ab[Self::index(i, j)] = m;
                for c in j + 1..=ju {
                    let sub = m * ab[Self::index(j, c)];
                    ab[Self::index(i, c)] -= sub;
                }
            }
        }
        BandedLu { n, ab, piv }
    }

    fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for j in 0..n {
            b.swap(j, self.piv[j]);
            let km = KL.min(n - 1 - j);
            let bj = b[j];
            for i in j + 1..=j + km {
                b[i] -= self.ab[Self::index(i, j)] * bj;
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[Self::index(j, j)];
            let bj = b[j];
            let lo = j.saturating_sub(KL + KU);
            for i in lo..j {
                b[i] -= self.ab[Self::index(i, j)] * bj;
            }
        }
    }

    /// Solve Aᴴ x = b on the same factorization: Uᴴ forward, then Lᴴ with
    /// the row interchanges replayed in reverse.
    fn solve_conj_transpose_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for j in 0..n {
            let lo = j.saturating_sub(KL + KU);
            let mut acc = b[j];
            for i in lo..j {
                acc -= self.ab[Self::index(i, j)].conj() * b[i];
            }
            b[j] = acc / self.ab[Self::index(j, j)].conj();
        }
        for j in (0..n.saturating_sub(1)).rev() {
            let km = KL.min(n - 1 - j);
            let mut acc = b[j];
            for i in j + 1..=j + km {
                acc -= self.ab[Self::index(i, j)].conj() * b[i];
            }
            b[j] = acc;
            b.swap(j, self.piv[j]);
        }
    }
}

/// Deterministic quasi-random starting vector (SplitMix64).
fn seeded_vector(n: usize, seed: u64) -> Vec<C64> {
    let mut s = seed;
    let mut next = move || {
        s = s.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = s;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    };
    let unit = |x: u64| (x >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    (0..n).map(|_| C64::new(unit(next()), unit(next()))).collect()
}

fn normalize(v: &mut [C64]) -> f64 {
    // pre-scale so the squared sum cannot overflow
    let peak = v.iter().map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max);
    if peak > 1e150 {
        for c in v.iter_mut() {
            *c /= peak;
        }
    }
    let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if nrm > 0.0 {
        for c in v.iter_mut() {
            *c /= nrm;
        }
    }
    if peak > 1e150 {
        nrm * peak
    } else {
        nrm
    }
}

fn orthogonalize(v: &mut [C64], against: &[C64]) {
    let proj: C64 = against.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    for (a, b) in against.iter().zip(v.iter_mut()) {
        *b -= proj * a;
    }
}

/// Two orthonormal vectors spanning the near-null subspace of the factored
/// matrix: blocked power iteration on (AᴴA)⁻¹, which converges to the
/// smallest right singular vectors even though A is far from normal.
///
/// The second vector is re-orthogonalized against the first around every
/// half-solve. Doing it only afterwards would difference two nearly
/// parallel amplified vectors and lose the subdominant direction entirely
/// once the two smallest singular values are separated by more than ~1e8.
fn near_null_pair(lu: &BandedLu) -> (Vec<C64>, Vec<C64>) {
    let n = lu.n;
    let mut u = seeded_vector(n, 0x243F_6A88_85A3_08D3);
    let mut v = seeded_vector(n, 0x1319_8A2E_0370_7344);
    normalize(&mut u);
    normalize(&mut v);
    for _ in 0..3 {
        lu.solve_conj_transpose_in_place(&mut u);
        normalize(&mut u);
        lu.solve_in_place(&mut u);
        normalize(&mut u);

        orthogonalize(&mut v, &u);
        normalize(&mut v);
        lu.solve_conj_transpose_in_place(&mut v);
        orthogonalize(&mut v, &u);
        normalize(&mut v);
        lu.solve_in_place(&mut v);
        orthogonalize(&mut v, &u);
        normalize(&mut v);
    }
    (u, v)
}

/// ℓ₂ residual of the recurrence rows 0..n−5 (rows touching the truncation
/// edge are excluded), relative to 1 + |λ|.
pub(crate) fn interior_residual(spec: &AlgebraSpec, coeffs: &[C64]) -> f64 {
    let n = coeffs.len();
    if n < 6 {
        return f64::INFINITY;
    }
    let (b1, b2, b3, b4, b5) = (spec.b(1), spec.b(2), spec.b(3), spec.b(4), spec.b(5));
    let get = |i: i64| -> C64 {
        if i >= 0 && (i as usize) < n {
            coeffs[i as usize]
        } else {
            ZERO
        }
    };
    let mut acc = 0.0f64;
    for m in 0..n - 4 {
        let mf = m as f64;
        let row = b3 * (mf * (mf - 1.0)).sqrt() * get(m as i64 - 2)
            + b5 * mf.sqrt() * get(m as i64 - 1)
            + (b1 * mf - spec.lambda) * get(m as i64)
            + b4 * (mf + 1.0).sqrt() * get(m as i64 + 1)
            + b2 * ((mf + 1.0) * (mf + 2.0)).sqrt() * get(m as i64 + 2);
        acc += row.norm_sqr();
    }
    acc.sqrt() / (1.0 + spec.lambda.norm())
}

const PROBE_POINTS: [C64; 4] = [
    C64::new(0.413, 0.291),
    C64::new(-0.537, 0.411),
    C64::new(0.291, -0.473),
    C64::new(-0.353, -0.519),
];

fn fock_at_dim(
    spec: &AlgebraSpec,
    case: CaseTag,
    params: &DerivedParams,
    mix: (C64, C64),
    dim: usize,
) -> Result<(FockVector, f64)> {
    let lu = BandedLu::factor(spec, dim);
    let (u, v) = near_null_pair(&lu);

    // Pick the two probe points where the analytic solution is largest and
    // match the null-space combination to it; this fixes both the mixture
    // and the overall complex scale.
    let mut probes: Vec<(C64, C64)> = Vec::with_capacity(4);
    for &p in PROBE_POINTS.iter() {
        let val = eval_raw(spec, case, params, mix, p)?;
        probes.push((p, val));
    }
    probes.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()));
    let (p1, f1) = probes[0];
    let (p2, f2) = probes[1];
    if f1.norm() < 1e-280 {
        return Err(SolverError::InvalidSpec("analytic solution vanishes at all probe points"));
    }

    let u1 = bargmann_sum(&u, p1);
    let u2 = bargmann_sum(&u, p2);
    let v1 = bargmann_sum(&v, p1);
    let v2 = bargmann_sum(&v, p2);
    let det = u1 * v2 - v1 * u2;
    let scale = (u1.norm() + v1.norm()) * (u2.norm() + v2.norm());
    let (x, y) = if det.norm() > 1e-10 * scale.max(1e-280) {
        ((f1 * v2 - v1 * f2) / det, (u1 * f2 - f1 * u2) / det)
    } else {
        // effectively one-dimensional null space
        (f1 / u1, ZERO)
    };

    let mut w: Vec<C64> = u
        .iter()
        .zip(v.iter())
        .map(|(a, b)| x * *a + y * *b)
        .collect();
    let nu = normalize(&mut w);
    if nu == 0.0 || !nu.is_finite() {
        return Err(SolverError::InvalidSpec("null-space extraction degenerated"));
    }
    let tail = tail_mass_of(&w);
    let resid = interior_residual(spec, &w);
    if std::env::var_os("AES_TRACE_SOLVER").is_some() {
        eprintln!(
            "fock_at_dim: dim={dim} tail={tail:.3e} resid={resid:.3e} |x|={:.3e} |y|={:.3e} |det|={:.3e}",
            x.norm(),
            y.norm(),
            det.norm()
        );
    }
    let fock = FockVector { dim, tail_mass: tail, norm: nu, coeffs: w };
    Ok((fock, resid))
}

/// Diagnostic: the best near-null vector of the truncated element at the
/// given dimension, with no normalizability gate and no analytic matching.
/// For specs with no normalizable eigenstate the returned tail mass fails
/// to decay as the dimension grows.
pub fn truncated_null_vector(spec: &AlgebraSpec, dim: usize) -> (Vec<C64>, f64) {
    let lu = BandedLu::factor(spec, dim);
    let (u, _) = near_null_pair(&lu);
    let tail = tail_mass_of(&u);
    (u, tail)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spec(beta: [C64; 5], lambda: C64) -> AlgebraSpec {
        AlgebraSpec::new(beta, lambda).unwrap()
    }

    fn glauber_spec(upsilon: C64) -> AlgebraSpec {
        spec([ZERO, ZERO, ZERO, ONE, ZERO], upsilon)
    }

    fn dsfs_spec(n: usize, s: f64, theta: f64, upsilon: C64) -> AlgebraSpec {
        let eith = C64::new(0.0, theta).exp();
        let b1 = C64::new((2.0 * s).cosh(), 0.0);
        let b2 = -0.5 * (2.0 * s).sinh() * eith.conj();
        let b3 = -0.5 * (2.0 * s).sinh() * eith;
        let b4 = upsilon * (2.0 * s).sinh() * eith.conj() - upsilon.conj() * (2.0 * s).cosh();
        let b5 = upsilon.conj() * (2.0 * s).sinh() * eith - upsilon * (2.0 * s).cosh();
        let lambda = C64::new(n as f64 - s.sinh() * s.sinh(), 0.0)
            + (2.0 * s).sinh() * (eith * upsilon.conj() * upsilon.conj()).re
            - upsilon.norm_sqr() * (2.0 * s).cosh();
        spec([b1, b2, b3, b4, b5], lambda)
    }

    #[test]
    fn classify_named_cases() {
        // pure annihilation: Gaussian case
        assert_eq!(classify(&glauber_spec(c(1.0, 0.0))).unwrap(), CaseTag::Heisenberg);
        // squeezed-Fock-like element: Δ² = 1
        let s = 0.4;
        let sp = dsfs_spec(1, s, 0.3, c(0.2, 0.1));
        assert_eq!(classify(&sp).unwrap(), CaseTag::GeneralKummer);
        let d2 = sp.b(1) * sp.b(1) - 4.0 * sp.b(2) * sp.b(3);
        assert!((d2 - ONE).norm() < 1e-12);
        // squeezed/displaced superposition element: Δ = σ = 0
        let zeta = c(0.3, 0.2);
        let rho = c(0.4, -0.1);
        let sp = spec(
            [-2.0 * zeta, ONE, zeta * zeta, -2.0 * rho, 2.0 * zeta * rho],
            c(0.7, 0.0),
        );
        assert_eq!(classify(&sp).unwrap(), CaseTag::ConstantCoeff);
        // number operator: oscillator case
        let sp = spec([ONE, ZERO, ZERO, ZERO, ZERO], c(2.0, 0.0));
        assert_eq!(classify(&sp).unwrap(), CaseTag::Oscillator);
        // pure creation has no eigenstate
        let bad = spec([ZERO, ZERO, ZERO, ZERO, ONE], c(1.0, 0.0));
        assert!(matches!(classify(&bad), Err(SolverError::NoEigenstate)));
    }

    #[test]
    fn derive_params_dsfs_shape() {
        // squeezing of a Fock state: μ_Δ = ῡ, d ∈ {−n/2, (n+1)/2}
        let n = 2;
        let upsilon = c(0.7, 0.2);
        let sp = dsfs_spec(n, 0.5, 0.3, upsilon);
        let (_, params, comp) = derive_params_with_branch(&sp, DeltaBranch::Principal).unwrap();
        assert!((params.mu - upsilon.conj()).norm() < 1e-10);
        let d_plus = if params.delta.re > 0.0 {
            params.d
        } else {
            C64::new(0.5, 0.0) - params.d
        };
        assert!((d_plus - c(-(n as f64) / 2.0, 0.0)).norm() < 1e-9);
        // even n: even sector normalizable, odd sector not
        assert!(comp[0] && !comp[1]);
    }

    #[test]
    fn derive_params_su11_shape() {
        // β = (0, (η+1)/4, (η−1)/4, 0, 0): Δ² = (1−η²)/4, σ = μ = 0,
        // d = 1/4 − λ/(2Δ)
        let eta = c(2.0, 0.5);
        let lambda = c(0.3, -0.2);
        let sp = spec(
            [ZERO, (eta + ONE) / 4.0, (eta - ONE) / 4.0, ZERO, ZERO],
            lambda,
        );
        let params = derive_params(&sp).unwrap();
        let d2 = (ONE - eta * eta) / 4.0;
        assert!((params.delta * params.delta - d2).norm() < 1e-12);
        assert!(params.sigma.norm() < 1e-12);
        assert!(params.mu.norm() < 1e-12);
        let expect_d = 0.25 * ONE - lambda / (2.0 * params.delta);
        assert!((params.d - expect_d).norm() < 1e-10);
    }

    #[test]
    fn constant_coeff_roots_satisfy_transformed_equation() {
        // substitute e^{ωα} into β₂T'' + β₄T' − (β₁/2 + λ)T = 0
        let zeta = c(0.25, 0.4);
        let rho = c(0.3, -0.2);
        let ups = c(0.9, 0.3);
        let lambda = ups * ups * (1.0 - zeta.norm_sqr()) + zeta - rho * rho;
        let sp = spec(
            [-2.0 * zeta, ONE, zeta * zeta, -2.0 * rho, 2.0 * zeta * rho],
            lambda,
        );
        let params = derive_params(&sp).unwrap();
        let (op, om) = params.omega.unwrap();
        for w in [op, om] {
            let resid = sp.b(2) * w * w + sp.b(4) * w - (sp.b(1) / 2.0 + sp.lambda);
            assert!(resid.norm() < 1e-12, "root {w} residual {resid}");
        }
        // and they are ρ ± υ·√(1−|ζ|²) up to ordering
        let q = ups * (1.0 - zeta.norm_sqr()).sqrt();
        let match1 = (op - (rho + q)).norm() < 1e-10 && (om - (rho - q)).norm() < 1e-10;
        let match2 = (op - (rho - q)).norm() < 1e-10 && (om - (rho + q)).norm() < 1e-10;
        assert!(match1 || match2);
    }

    #[test]
    fn heisenberg_solution_is_displaced_squeezed_gaussian() {
        let zeta = c(0.3, 0.5);
        let ups = c(0.8, -0.3);
        let lambda = ups - zeta * ups.conj();
        let sp = spec([ZERO, ZERO, ZERO, ONE, -zeta], lambda);
        let st = solve(&sp, (ONE, ZERO)).unwrap();
        assert_eq!(st.case, CaseTag::Heisenberg);
        for &a in &[c(0.3, 0.2), c(-1.0, 0.7)] {
            let val = st.evaluate_unnormalized(a).unwrap();
            let expect = (0.5 * zeta * a * a + lambda * a).exp();
            assert!((val - expect).norm() < 1e-12 * expect.norm());
        }
    }

    #[test]
    fn oscillator_solution_is_displaced_fock() {
        let n = 3usize;
        let ups = c(0.5, 0.4);
        let sp = spec(
            [ONE, ZERO, ZERO, -ups.conj(), -ups],
            c(n as f64 - ups.norm_sqr(), 0.0),
        );
        let st = solve(&sp, (ONE, ZERO)).unwrap();
        assert_eq!(st.case, CaseTag::Oscillator);
        assert_eq!(st.params.p_int, Some(n as u64));
        for &a in &[c(1.1, -0.2), c(-0.4, 0.8)] {
            let val = st.evaluate_unnormalized(a).unwrap();
            let mut expect = (ups * a).exp();
            for _ in 0..n {
                expect *= a - ups.conj();
            }
            assert!((val - expect).norm() < 1e-12 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn non_integer_exponent_rejected() {
        let sp = spec([ONE, ZERO, ZERO, ZERO, ZERO], c(1.5, 0.0));
        assert!(matches!(
            solve(&sp, (ONE, ZERO)),
            Err(SolverError::NonIntegerExponent { .. })
        ));
    }

    #[test]
    fn glauber_state_roundtrip() {
        let ups = c(1.0, 0.0);
        let sp = glauber_spec(ups);
        let st = solve(&sp, (ONE, ZERO)).unwrap();
        // evaluate() must be e^{−|υ|²/2} e^{υα}
        for &a in &[ZERO, c(0.7, 0.1), c(-0.5, 1.2)] {
            let val = st.evaluate(a).unwrap();
            let expect = (-0.5 * ups.norm_sqr()).exp() * (ups * a).exp();
            assert!((val - expect).norm() < 1e-10);
        }
        // Fock coefficients e^{−1/2}/√n!
        let fock = fock_coefficients(&sp, (ONE, ZERO), 64).unwrap();
        let mut expect = (-0.5f64).exp();
        for n in 0..20 {
            assert!(
                (fock.coeffs[n] - c(expect, 0.0)).norm() < 1e-12,
                "n = {n}"
            );
            expect /= ((n + 1) as f64).sqrt();
        }
        // value at 0 is c₀
        let v0 = st.evaluate(ZERO).unwrap();
        assert!((v0 - fock.coeffs[0]).norm() < 1e-12);
    }

    #[test]
    fn squeezed_vacuum_coefficient_ratio() {
        let zeta = c(0.5, 0.0);
        let sp = spec([ZERO, ZERO, ZERO, ONE, -zeta], ZERO);
        let fock = fock_coefficients(&sp, (ONE, ZERO), 64).unwrap();
        // c_{n+2}/c_n = ζ√(n+1)/√(n+2)
        for n in (0..24).step_by(2) {
            let got = fock.coeffs[n + 2] / fock.coeffs[n];
            let expect = zeta * ((n + 1) as f64).sqrt() / ((n + 2) as f64).sqrt();
            assert!((got - expect).norm() < 1e-12, "n = {n}");
        }
        for n in (1..24).step_by(2) {
            assert!(fock.coeffs[n].norm() < 1e-14);
        }
    }

    #[test]
    fn parity_sectors_decouple_without_one_photon_terms() {
        // β₄ = β₅ = 0: even mixture has no odd coefficients and vice versa
        let eta = c(1.7, 0.4);
        let sp = spec(
            [ZERO, (eta + ONE) / 4.0, (eta - ONE) / 4.0, ZERO, ZERO],
            c(0.4, 0.1),
        );
        let even = fock_coefficients(&sp, (ONE, ZERO), 96).unwrap();
        for n in (1..96).step_by(2) {
            assert!(even.coeffs[n].norm() < 1e-11, "even solution leaked odd term at {n}");
        }
        let odd = fock_coefficients(&sp, (ZERO, ONE), 96).unwrap();
        for n in (0..96).step_by(2) {
            assert!(odd.coeffs[n].norm() < 1e-11, "odd solution leaked even term at {n}");
        }
    }

    #[test]
    fn series_matches_closed_form_on_disk() {
        let sp = dsfs_spec(2, 0.5, 0.3, c(0.7, 0.2));
        let (st, fock) = solve_full(&sp, (ONE, ZERO), DeltaBranch::Auto, 512, 1e-14).unwrap();
        for &a in &[c(1.0, 0.5), c(-0.8, 0.3), c(0.2, -1.1), c(1.9, 0.0)] {
            let direct = st.evaluate(a).unwrap();
            let series = fock.bargmann_value(a);
            assert!(
                (direct - series).norm() < 1e-9 * series.norm().max(1.0),
                "mismatch at α = {a}: {direct} vs {series}"
            );
        }
    }

    #[test]
    fn kummer_branches_agree_as_rays() {
        let sp = dsfs_spec(2, 0.5, 0.3, c(0.7, 0.2));
        let (_, f_pos) = solve_full(&sp, (ONE, ZERO), DeltaBranch::Principal, 512, 1e-14).unwrap();
        let (_, f_neg) = solve_full(&sp, (ONE, ZERO), DeltaBranch::Negated, 512, 1e-14).unwrap();
        let fidelity = f_pos.overlap(&f_neg).norm();
        assert!(fidelity >= 1.0 - 1e-9, "fidelity {fidelity}");
    }

    #[test]
    fn ode_residual_of_solutions() {
        // finite-difference residual of the eigenvalue ODE with Richardson
        // extrapolation at scattered points
        let specs: Vec<(AlgebraSpec, (C64, C64))> = vec![
            (glauber_spec(c(0.9, -0.4)), (ONE, ZERO)),
            (dsfs_spec(1, 0.4, 1.0, c(0.3, 0.3)), (ZERO, ONE)),
            (
                spec(
                    [ZERO, c(0.75, 0.0), c(0.25, 0.0), ZERO, ZERO],
                    c(0.37, 0.21),
                ),
                (ONE, ONE),
            ),
        ];
        for (sp, mix) in specs {
            let st = solve(&sp, mix).unwrap();
            let pts = [c(0.5, 0.4), c(-1.2, 0.3), c(2.0, -0.7), c(0.1, 1.4)];
            for &a in &pts {
                let r = ode_residual(&st, a);
                assert!(r < 1e-7, "case {:?} at {a}: residual {r}", st.case);
            }
        }
    }

    pub(crate) fn ode_residual(st: &AnalyticState, a: C64) -> f64 {
        // Step size balances series evaluation noise (amplified by h⁻²)
        // against the h⁴ Richardson remainder.
        let f = |x: C64| st.evaluate(x).unwrap();
        let h = 1e-2;
        let d2 = |hh: f64| {
            (f(a + c(hh, 0.0)) - 2.0 * f(a) + f(a - c(hh, 0.0))) / (hh * hh)
        };
        let lpp = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
        let d1 = |hh: f64| (f(a + c(hh, 0.0)) - f(a - c(hh, 0.0))) / (2.0 * hh);
        let lp = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
        let (b1, b2, b3, b4, b5) = (
            st.spec.b(1),
            st.spec.b(2),
            st.spec.b(3),
            st.spec.b(4),
            st.spec.b(5),
        );
        let t1 = b2 * lpp;
        let t2 = (b1 * a + b4) * lp;
        let t3 = (b3 * a * a + b5 * a - st.spec.lambda) * f(a);
        let resid = (t1 + t2 + t3).norm();
        let scale = t1.norm().max(t2.norm()).max(t3.norm()).max(1e-30);
        resid / scale
    }

    #[test]
    fn rejected_specs_have_non_decaying_truncated_null_vector() {
        // |β₅/β₄| > 1: no normalizable eigenstate; the truncated null vector
        // is tail-dominated at every dimension.
        let sp = spec([ZERO, ZERO, ZERO, ONE, c(1.5, 0.0)], c(0.3, 0.0));
        assert!(matches!(
            solve(&sp, (ONE, ZERO)),
            Err(SolverError::NonNormalizable(_))
        ));
        for dim in [64, 128] {
            let (_, tail) = truncated_null_vector(&sp, dim);
            assert!(tail > 1e-3, "tail {tail} unexpectedly small at dim {dim}");
        }
    }

    #[test]
    fn truncation_error_reported() {
        // A dim far too small for the state must be reported, not silently
        // accepted.
        let sp = dsfs_spec(6, 0.7, 0.2, c(1.5, 0.5));
        assert!(matches!(
            fock_coefficients(&sp, (ONE, ZERO), 12),
            Err(SolverError::TruncationNotConverged { .. })
        ));
    }
}
