//! Brute-force verification in the truncated Fock space: dense matrices for
//! algebra elements, commutator checks, eigen-residuals, and displacement /
//! squeeze operators as matrix exponentials.
//!
//! Everything here is deliberately independent of the closed-form solver:
//! operators are assembled from the √n ladder structure and exponentiated
//! numerically, so agreement between the two routes is a real check.

use crate::linalg;
use crate::solver::{AlgebraSpec, FockVector};
use crate::C64;
use ndarray::Array2;
use thiserror::Error;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Tail mass above which a vector is too close to the truncation edge for
/// residuals or operator applications to be meaningful.
const TAIL_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("state not converged at its truncation (tail mass {tail:.3e})")]
    NotConverged { tail: f64 },
    #[error("operator pushed the state into the truncation edge (tail mass {tail:.3e})")]
    TruncationNotConverged { tail: f64 },
}

type Result<T> = std::result::Result<T, OracleError>;

/// Dense matrix of an operator on span{|0⟩ … |N−1⟩}.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub mat: Array2<C64>,
    pub dim: usize,
    pub label: String,
}

impl OperatorMatrix {
    fn new(mat: Array2<C64>, label: impl Into<String>) -> Self {
        let dim = mat.nrows();
        OperatorMatrix { mat, dim, label: label.into() }
    }
}

/// Nonnegative residual measured on the rows unaffected by truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub interior_dim: usize,
}

pub fn annihilation(dim: usize) -> OperatorMatrix {
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix::new(m, "a")
}

pub fn creation(dim: usize) -> OperatorMatrix {
    let mut m = Array2::zeros((dim, dim));
    for n in 1..dim {
        m[(n, n - 1)] = C64::new((n as f64).sqrt(), 0.0);
    }
    OperatorMatrix::new(m, "a†")
}

pub fn number(dim: usize) -> OperatorMatrix {
    let mut m = Array2::zeros((dim, dim));
    for n in 0..dim {
        m[(n, n)] = C64::new(n as f64, 0.0);
    }
    OperatorMatrix::new(m, "N")
}

pub fn identity(dim: usize) -> OperatorMatrix {
    OperatorMatrix::new(Array2::eye(dim), "1")
}

/// K₋ = a²/2 of the two-photon SU(1,1) realization.
pub fn k_minus(dim: usize) -> OperatorMatrix {
    let a = annihilation(dim).mat;
    OperatorMatrix::new(a.dot(&a).mapv(|x| 0.5 * x), "K₋")
}

pub fn k_plus(dim: usize) -> OperatorMatrix {
    let ad = creation(dim).mat;
    OperatorMatrix::new(ad.dot(&ad).mapv(|x| 0.5 * x), "K₊")
}

pub fn k_zero(dim: usize) -> OperatorMatrix {
    let mut m = number(dim).mat;
    for n in 0..dim {
        m[(n, n)] = 0.5 * m[(n, n)] + C64::new(0.25, 0.0);
    }
    OperatorMatrix::new(m, "K₀")
}

pub fn k_one(dim: usize) -> OperatorMatrix {
    let m = (&k_plus(dim).mat + &k_minus(dim).mat).mapv(|x| 0.5 * x);
    OperatorMatrix::new(m, "K₁")
}

pub fn k_two(dim: usize) -> OperatorMatrix {
    let m = (&k_plus(dim).mat - &k_minus(dim).mat).mapv(|x| x / C64::new(0.0, 2.0));
    OperatorMatrix::new(m, "K₂")
}

/// Matrix of β₁N + β₂a² + β₃a†² + β₄a + β₅a† on the truncated space.
pub fn build_element(spec: &AlgebraSpec, dim: usize) -> OperatorMatrix {
    let mut m = Array2::zeros((dim, dim));
    let b = &spec.beta;
    for n in 0..dim {
        let nf = n as f64;
        m[(n, n)] += b[0] * nf;
        if n + 2 < dim {
            m[(n, n + 2)] += b[1] * ((nf + 1.0) * (nf + 2.0)).sqrt();
            m[(n + 2, n)] += b[2] * ((nf + 1.0) * (nf + 2.0)).sqrt();
        }
        if n + 1 < dim {
            m[(n, n + 1)] += b[3] * (nf + 1.0).sqrt();
            m[(n + 1, n)] += b[4] * (nf + 1.0).sqrt();
        }
    }
    OperatorMatrix::new(m, "β·K")
}

/// One commutator identity [A,B] = rhs, measured on the interior block.
#[derive(Debug, Clone)]
pub struct CommutatorCheck {
    pub name: String,
    pub deviation: f64,
    pub scale: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct CommutatorReport {
    pub dim: usize,
    pub checks: Vec<CommutatorCheck>,
    pub all_pass: bool,
}

fn interior_max_abs(m: &Array2<C64>, edge: usize) -> f64 {
    let n = m.nrows().saturating_sub(edge);
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// Check all commutation relations of the two-photon algebra and of its
/// SU(1,1) subalgebra on the interior block (rows/cols < N−4).
pub fn commutator_check(dim: usize) -> CommutatorReport {
    assert!(dim >= 16, "commutator check needs some interior to look at");
    let a = annihilation(dim).mat;
    let ad = creation(dim).mat;
    let nn = number(dim).mat;
    let id = identity(dim).mat;
    let a2 = a.dot(&a);
    let ad2 = ad.dot(&ad);
    let km = k_minus(dim).mat;
    let kp = k_plus(dim).mat;
    let k0 = k_zero(dim).mat;
    let k1 = k_one(dim).mat;
    let k2 = k_two(dim).mat;
    let i = C64::new(0.0, 1.0);

    let rel: Vec<(&str, &Array2<C64>, &Array2<C64>, Array2<C64>)> = vec![
        ("[a²,a†²] = 4N+2", &a2, &ad2, nn.mapv(|x| 4.0 * x) + id.mapv(|x| 2.0 * x)),
        ("[a,a†] = 1", &a, &ad, id.clone()),
        ("[a†²,a] = −2a†", &ad2, &a, ad.mapv(|x| -2.0 * x)),
        ("[a²,a†] = 2a", &a2, &ad, a.mapv(|x| 2.0 * x)),
        ("[N,a†²] = 2a†²", &nn, &ad2, ad2.mapv(|x| 2.0 * x)),
        ("[N,a²] = −2a²", &nn, &a2, a2.mapv(|x| -2.0 * x)),
        ("[N,a†] = a†", &nn, &ad, ad.clone()),
        ("[N,a] = −a", &nn, &a, a.mapv(|x| -x)),
        ("[K₋,K₊] = 2K₀", &km, &kp, k0.mapv(|x| 2.0 * x)),
        ("[K₀,K₊] = K₊", &k0, &kp, kp.clone()),
        ("[K₀,K₋] = −K₋", &k0, &km, km.mapv(|x| -x)),
        ("[K₁,K₂] = −iK₀", &k1, &k2, k0.mapv(|x| -i * x)),
    ];

    let mut checks = Vec::with_capacity(rel.len());
    for (name, lhs_a, lhs_b, rhs) in rel {
        let ab = lhs_a.dot(lhs_b);
        let ba = lhs_b.dot(lhs_a);
        let comm = &ab - &ba;
        let dev = interior_max_abs(&(&comm - &rhs), 4);
        let scale = interior_max_abs(&ab, 4).max(interior_max_abs(&ba, 4)).max(1.0);
        let pass = dev <= 1e-12 * scale;
        checks.push(CommutatorCheck { name: name.to_string(), deviation: dev, scale, pass });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    CommutatorReport { dim, checks, all_pass }
}

/// ‖(M − λ)ψ‖ restricted to the rows a†² truncation cannot reach,
/// divided by (1 + |λ|).
pub fn eigen_residual(spec: &AlgebraSpec, psi: &FockVector) -> Result<Residual> {
    if psi.tail_mass > TAIL_GUARD {
        return Err(OracleError::NotConverged { tail: psi.tail_mass });
    }
    let dim = psi.coeffs.len();
    let m = build_element(spec, dim).mat;
    let interior = dim - 4;
    let mut acc = 0.0f64;
    for r in 0..interior {
        let mut row = ZERO;
        let lo = r.saturating_sub(2);
        let hi = (r + 2).min(dim - 1);
        for c in lo..=hi {
            row += m[(r, c)] * psi.coeffs[c];
        }
        row -= spec.lambda * psi.coeffs[r];
        acc += row.norm_sqr();
    }
    Ok(Residual { value: acc.sqrt() / (1.0 + spec.lambda.norm()), interior_dim: interior })
}

/// exp(A) by scaling-and-squaring with the degree-13 Padé approximant.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    const THETA_13: f64 = 5.371_920_351_148_152;
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    let norm = linalg::one_norm(a);
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|x| x / 2f64.powi(s));
    let id: Array2<C64> = Array2::eye(n);
    let a2 = scaled.dot(&scaled);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let u_inner = a6.mapv(|x| x * B[13]) + a4.mapv(|x| x * B[11]) + a2.mapv(|x| x * B[9]);
    let u_poly = a6.dot(&u_inner)
        + a6.mapv(|x| x * B[7])
        + a4.mapv(|x| x * B[5])
        + a2.mapv(|x| x * B[3])
        + id.mapv(|x| x * B[1]);
    let u = scaled.dot(&u_poly);
    let v_inner = a6.mapv(|x| x * B[12]) + a4.mapv(|x| x * B[10]) + a2.mapv(|x| x * B[8]);
    let v = a6.dot(&v_inner)
        + a6.mapv(|x| x * B[6])
        + a4.mapv(|x| x * B[4])
        + a2.mapv(|x| x * B[2])
        + id.mapv(|x| x * B[0]);
    let lhs = &v - &u;
    let rhs = &v + &u;
    let fac = linalg::lu_factor(&lhs).expect("Padé denominator is nonsingular");
    let mut f = fac.solve_matrix(&rhs);
    for _ in 0..s {
        f = f.dot(&f);
    }
    f
}

fn apply_matrix(m: &Array2<C64>, psi: &FockVector) -> Result<FockVector> {
    if psi.tail_mass > TAIL_GUARD {
        return Err(OracleError::NotConverged { tail: psi.tail_mass });
    }
    let dim = psi.coeffs.len();
    let mut out = vec![ZERO; dim];
    for r in 0..dim {
        let mut acc = ZERO;
        for c in 0..dim {
            acc += m[(r, c)] * psi.coeffs[c];
        }
        out[r] = acc;
    }
    let result = FockVector::from_raw(out);
    if result.tail_mass > TAIL_GUARD {
        return Err(OracleError::TruncationNotConverged { tail: result.tail_mass });
    }
    Ok(result)
}

/// D(z)ψ = exp(z a† − z̄ a) ψ.
pub fn apply_displacement(z: C64, psi: &FockVector) -> Result<FockVector> {
    let dim = psi.coeffs.len();
    let a = annihilation(dim).mat;
    let ad = creation(dim).mat;
    let gen = ad.mapv(|x| z * x) - a.mapv(|x| z.conj() * x);
    apply_matrix(&expm(&gen), psi)
}

/// S(ξ)ψ = exp(½ξ a†² − ½ξ̄ a²) ψ.
pub fn apply_squeeze(xi: C64, psi: &FockVector) -> Result<FockVector> {
    let dim = psi.coeffs.len();
    let a = annihilation(dim).mat;
    let ad = creation(dim).mat;
    let a2 = a.dot(&a);
    let ad2 = ad.dot(&ad);
    let gen = ad2.mapv(|x| 0.5 * xi * x) - a2.mapv(|x| 0.5 * xi.conj() * x);
    apply_matrix(&expm(&gen), psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn coherent_vector(upsilon: C64, dim: usize) -> FockVector {
        let mut coeffs = Vec::with_capacity(dim);
        let mut term = C64::new((-0.5 * upsilon.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            coeffs.push(term);
            term = term * upsilon / ((n + 1) as f64).sqrt();
        }
        FockVector::from_raw(coeffs)
    }

    fn fock_basis_vector(n: usize, dim: usize) -> FockVector {
        let mut coeffs = vec![C64::new(0.0, 0.0); dim];
        coeffs[n] = C64::new(1.0, 0.0);
        FockVector::from_raw(coeffs)
    }

    #[test]
    fn ladder_band_structure() {
        let dim = 12;
        let a = build_element(
            &AlgebraSpec::new(
                [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
                c(0.0, 0.0),
            )
            .unwrap(),
            dim,
        );
        for n in 0..dim - 1 {
            assert_eq!(a.mat[(n, n + 1)], c(((n + 1) as f64).sqrt(), 0.0));
        }
        let nop = build_element(
            &AlgebraSpec::new(
                [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
                c(0.0, 0.0),
            )
            .unwrap(),
            dim,
        );
        for n in 0..dim {
            assert_eq!(nop.mat[(n, n)], c(n as f64, 0.0));
        }
        // K₋ band: ½√((n+1)(n+2)) on the second superdiagonal
        let km = k_minus(dim);
        for n in 0..dim - 2 {
            let expect = 0.5 * (((n + 1) * (n + 2)) as f64).sqrt();
            assert!((km.mat[(n, n + 2)] - c(expect, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn commutators_hold_at_machine_precision() {
        for dim in [32, 64] {
            let report = commutator_check(dim);
            for chk in &report.checks {
                assert!(
                    chk.pass,
                    "dim {dim}: {} deviates by {:.3e} (scale {:.3e})",
                    chk.name, chk.deviation, chk.scale
                );
            }
        }
    }

    #[test]
    fn vacuum_is_annihilated() {
        let spec = AlgebraSpec::new(
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            c(0.0, 0.0),
        )
        .unwrap();
        let vac = fock_basis_vector(0, 32);
        let r = eigen_residual(&spec, &vac).unwrap();
        assert!(r.value < 1e-15);
        assert_eq!(r.interior_dim, 28);
    }

    #[test]
    fn coherent_state_eigen_residual() {
        let ups = c(1.0, 0.0);
        let spec = AlgebraSpec::new(
            [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            ups,
        )
        .unwrap();
        let psi = coherent_vector(ups, 64);
        let r = eigen_residual(&spec, &psi).unwrap();
        assert!(r.value < 1e-10, "residual {}", r.value);
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let z = c(0.7, -0.4);
        let vac = fock_basis_vector(0, 64);
        let disp = apply_displacement(z, &vac).unwrap();
        let expect = coherent_vector(z, 64);
        for n in 0..40 {
            assert!(
                (disp.coeffs[n] - expect.coeffs[n]).norm() < 1e-12,
                "coefficient {n} off"
            );
        }
        // unitarity
        assert!((disp.norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_squeeze_is_identity() {
        let psi = coherent_vector(c(0.8, 0.3), 64);
        let same = apply_squeeze(c(0.0, 0.0), &psi).unwrap();
        for n in 0..64 {
            assert!((same.coeffs[n] - psi.coeffs[n]).norm() < 1e-13);
        }
    }

    #[test]
    fn squeeze_inverse_composes_to_identity() {
        let xi = c(0.4 * (0.9f64).cos(), 0.4 * (0.9f64).sin());
        let psi = coherent_vector(c(0.5, 0.2), 96);
        let there = apply_squeeze(xi, &psi).unwrap();
        let back = apply_squeeze(-xi, &there).unwrap();
        let fid = psi.overlap(&back).norm();
        assert!(fid >= 1.0 - 1e-9, "fidelity {fid}");
        assert!((there.norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn expm_of_diagonal_matches_scalar_exp() {
        let mut m = Array2::zeros((8, 8));
        for k in 0..8 {
            m[(k, k)] = c(0.1 * k as f64, -0.2 * k as f64);
        }
        let e = expm(&m);
        for k in 0..8 {
            assert!((e[(k, k)] - m[(k, k)].exp()).norm() < 1e-13);
        }
    }

    #[test]
    fn unconverged_tail_rejected() {
        // a state parked on the truncation edge
        let psi = fock_basis_vector(31, 32);
        let spec = AlgebraSpec::new(
            [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            c(31.0, 0.0),
        )
        .unwrap();
        assert!(matches!(
            eigen_residual(&spec, &psi),
            Err(OracleError::NotConverged { .. })
        ));
    }
}
