//! Complex-argument special functions used by the closed-form eigenstate
//! solutions: Kummer's confluent hypergeometric function ₁F₁, Hermite
//! polynomials, parabolic cylinder functions D_ν, and the entire Bessel/Airy
//! kernel of the degenerate case.
//!
//! All routines work in `f64` precision on moderate arguments (|x| ≲ 50);
//! they are series-based with explicit convergence checks rather than
//! asymptotic expansions. Error budgets are stated per function.

use crate::C64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    /// ₁F₁(d|c|x) has a pole: c is a nonpositive integer and the series does
    /// not terminate first.
    #[error("1F1 pole at c = {re}{im:+}i (nonpositive integer)")]
    PoleAtC { re: f64, im: f64 },
    /// A series failed to meet its error budget within the term cap.
    #[error("series for {0} did not converge")]
    NoConvergence(&'static str),
    /// Hermite recurrence left the representable range.
    #[error("overflow in Hermite recurrence")]
    Overflow,
    /// Both reciprocal gamma factors of the parabolic cylinder assembly vanish.
    #[error("parabolic cylinder function: both gamma factors at poles")]
    GammaPole,
}

type Result<T> = std::result::Result<T, SpecialFnError>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for complex argument (Lanczos, reflection for Re z < 1/2).
///
/// Relative accuracy ~1e-13 away from poles.
pub fn gamma(z: C64) -> C64 {
    if z.re < 0.5 {
        let pi = std::f64::consts::PI;
        // Γ(z)Γ(1−z) = π / sin(πz)
        C64::new(pi, 0.0) / ((pi * z).sin() * gamma(ONE - z))
    } else {
        let z = z - ONE;
        let mut x = C64::new(LANCZOS[0], 0.0);
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            x += C64::new(c, 0.0) / (z + C64::new(i as f64, 0.0));
        }
        let t = z + C64::new(7.5, 0.0);
        let sqrt_two_pi = (2.0 * std::f64::consts::PI).sqrt();
        sqrt_two_pi * t.powc(z + C64::new(0.5, 0.0)) * (-t).exp() * x
    }
}

/// 1/Γ(z), finite everywhere (zero at the poles of Γ).
pub fn recip_gamma(z: C64) -> C64 {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return ZERO;
    }
    if z.re < 0.5 {
        let pi = std::f64::consts::PI;
        (pi * z).sin() * gamma(ONE - z) / pi
    } else {
        ONE / gamma(z)
    }
}

fn is_nonpositive_integer(z: C64, tol: f64) -> Option<i64> {
    let r = z.re.round();
    if z.im.abs() <= tol && (z.re - r).abs() <= tol && r <= 0.0 {
        Some(r as i64)
    } else {
        None
    }
}

/// Raw Taylor series for ₁F₁(d|c|x) with compensated summation.
///
/// No argument transformations are applied; exposed for use as an
/// independent cross-check of [`kummer_1f1`].
pub fn kummer_series(d: C64, c: C64, x: C64) -> Result<C64> {
    // Polynomial case: the series terminates at k = -d.
    let poly_terms = is_nonpositive_integer(d, 1e-13).map(|m| (-m) as usize);
    if let Some(cm) = is_nonpositive_integer(c, 1e-13) {
        let ok = poly_terms.map(|m| m <= (-cm) as usize).unwrap_or(false);
        if !ok {
            return Err(SpecialFnError::PoleAtC { re: c.re, im: c.im });
        }
    }

    let mut sum = ONE;
    let mut comp = ZERO; // Kahan compensation
    let mut term = ONE;
    let max_terms = poly_terms.unwrap_or(1200);
    let mut small_streak = 0;
    for k in 0..max_terms {
        let kf = k as f64;
        term = term * (d + kf) / (c + kf) * x / (kf + 1.0);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if poly_terms.is_none() {
            if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
                small_streak += 1;
                if small_streak >= 3 {
                    return Ok(sum);
                }
            } else {
                small_streak = 0;
            }
        }
        if !sum.is_finite() {
            return Err(SpecialFnError::NoConvergence("1F1"));
        }
    }
    if poly_terms.is_some() {
        Ok(sum)
    } else {
        Err(SpecialFnError::NoConvergence("1F1"))
    }
}

/// Kummer confluent hypergeometric function ₁F₁(d|c|x).
///
/// Polynomial cases (d a nonpositive integer) are summed exactly. Otherwise
/// the transformation ₁F₁(d|c|x) = eˣ ₁F₁(c−d|c|−x) is applied for
/// Re x < 0, which minimizes the cancellation in the alternating series.
/// The relative error is ε·e^{|x|−|Re x|} in the worst case, i.e. ≤ 1e−11
/// whenever |Im x| ≲ 12; along the real axis the budget extends to |x| ≤ 50.
pub fn kummer_1f1(d: C64, c: C64, x: C64) -> Result<C64> {
    if x.re < 0.0 && is_nonpositive_integer(d, 1e-13).is_none() {
        Ok(x.exp() * kummer_series(c - d, c, -x)?)
    } else {
        kummer_series(d, c, x)
    }
}

/// Both sides of the Kummer transformation, each evaluated by direct series:
/// `(₁F₁(d|c|x), eˣ·₁F₁(c−d|c|−x))`.
///
/// The two components agree to ≤ 1e−10 relative on valid arguments, which
/// makes the pair usable as a runtime self-test.
pub fn kummer_transform_pair(d: C64, c: C64, x: C64) -> Result<(C64, C64)> {
    let lhs = kummer_series(d, c, x)?;
    let rhs = x.exp() * kummer_series(c - d, c, -x)?;
    Ok((lhs, rhs))
}

/// Hermite polynomial H_n(t) by the three-term recurrence
/// H_{n+1} = 2t·H_n − 2n·H_{n−1}.
pub fn hermite(n: usize, t: C64) -> Result<C64> {
    assert!(n <= 10_000, "hermite: order out of supported range");
    let mut hm = ONE; // H_0
    if n == 0 {
        return Ok(hm);
    }
    let mut h = 2.0 * t; // H_1
    for k in 1..n {
        let next = 2.0 * t * h - 2.0 * (k as f64) * hm;
        hm = h;
        h = next;
        if !h.is_finite() {
            return Err(SpecialFnError::Overflow);
        }
    }
    Ok(h)
}

/// Coefficients of H_n as a polynomial in t (ascending powers).
pub(crate) fn hermite_poly_coeffs(n: usize) -> Vec<f64> {
    let mut hm = vec![1.0]; // H_0
    if n == 0 {
        return hm;
    }
    let mut h = vec![0.0, 2.0]; // H_1
    for k in 1..n {
        let mut next = vec![0.0; k + 2];
        for (j, &c) in h.iter().enumerate() {
            next[j + 1] += 2.0 * c;
        }
        for (j, &c) in hm.iter().enumerate() {
            next[j] -= 2.0 * (k as f64) * c;
        }
        hm = h;
        h = next;
    }
    h
}

/// Parabolic cylinder function D_ν(x), assembled from the two Kummer pieces
///
/// D_ν(x) = √π 2^{ν/2} e^{−x²/4} [ ₁F₁(−ν/2 | 1/2 | x²/2) / Γ((1−ν)/2)
///          − √2 x ₁F₁((1−ν)/2 | 3/2 | x²/2) / Γ(−ν/2) ].
pub fn parabolic_cylinder_d(nu: C64, x: C64) -> Result<C64> {
    let half = C64::new(0.5, 0.0);
    let g1 = recip_gamma((ONE - nu) * half);
    let g2 = recip_gamma(-nu * half);
    if g1.norm() == 0.0 && g2.norm() == 0.0 {
        return Err(SpecialFnError::GammaPole);
    }
    let w = x * x * half;
    let mut even = ZERO;
    if g1.norm() > 0.0 {
        even = g1 * kummer_1f1(-nu * half, half, w)?;
    }
    let mut odd = ZERO;
    if g2.norm() > 0.0 {
        odd = g2 * kummer_1f1((ONE - nu) * half, C64::new(1.5, 0.0), w)?;
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let pref = sqrt_pi * (nu * half * std::f64::consts::LN_2).exp() * (-x * x / 4.0).exp();
    Ok(pref * (even - std::f64::consts::SQRT_2 * x * odd))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Entire kernel of the degenerate (Δ = 0) eigenvalue case: the solutions of
/// K'' + c²·x·K = 0, i.e. √x·J_{±1/3}((2c/3)·x^{3/2}) summed as a single
/// power series in x so that no branch of x^{3/2} is ever taken.
///
/// `Odd` is the √x·J_{1/3} combination (lowest power x¹), `Even` its
/// J_{−1/3} companion (lowest power x⁰). The constant prefactor (c/3)^{±1/3}
/// uses the principal branch of the given c.
pub fn degenerate_kernel(c: C64, x: C64, parity: Parity) -> Result<C64> {
    let (a, c_exp, x_pow) = match parity {
        Parity::Even => (2.0 / 3.0, -1.0 / 3.0, ONE),
        Parity::Odd => (4.0 / 3.0, 1.0 / 3.0, x),
    };
    let w = c * c * x * x * x / 9.0;
    // Σ_k (−w)^k / (k! Γ(k+a)), Γ by upward recurrence from Γ(a).
    let mut term = ONE / gamma(C64::new(a, 0.0));
    let mut sum = term;
    let mut streak = 0;
    let mut converged = false;
    for k in 0..700 {
        let kf = k as f64;
        term = term * (-w) / ((kf + 1.0) * (kf + a));
        sum += term;
        if term.norm() <= 1e-17 * sum.norm().max(1e-300) {
            streak += 1;
            if streak >= 3 {
                converged = true;
                break;
            }
        } else {
            streak = 0;
        }
    }
    if !converged {
        return Err(SpecialFnError::NoConvergence("degenerate kernel"));
    }
    let pref = (c / 3.0).powc(C64::new(c_exp, 0.0));
    Ok(pref * x_pow * sum)
}

/// Ai(−x) through the degenerate kernels at c = 1.
pub fn airy_ai_neg(x: C64) -> Result<C64> {
    let e = degenerate_kernel(ONE, x, Parity::Even)?;
    let o = degenerate_kernel(ONE, x, Parity::Odd)?;
    Ok((e + o) / 3.0)
}

/// Bi(−x) through the degenerate kernels at c = 1.
pub fn airy_bi_neg(x: C64) -> Result<C64> {
    let e = degenerate_kernel(ONE, x, Parity::Even)?;
    let o = degenerate_kernel(ONE, x, Parity::Odd)?;
    Ok((e - o) / 3.0f64.sqrt())
}
