//! Basis-independent two-qubit algebra.
//!
//! A two-qubit operator is parametrized by its Fano coefficients: a trace
//! coefficient `a`, two polarization vectors `bplus`/`bminus`, and a 3x3
//! correlation matrix `c`. Physical states are the normalized case
//! (`a = 1`) with a positive semidefinite matrix; production spin density
//! matrices arrive unnormalized with `a > 0` and divide through on demand.
//!
//! The entanglement toolbox operates either on the assembled 4x4 matrix
//! (Wootters concurrence, positive-partial-transpose test) or directly on
//! the correlation matrix (CHSH maximum, scalar markers, witness).

use crate::error::Error;
use crate::tol::Tolerances;
use crate::Result;
use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex;
use rand::Rng;

pub type C64 = Complex<f64>;
pub type M4 = Matrix4<C64>;

/// Fano coefficients of a two-qubit operator.
///
/// `a` is one quarter of the trace: the normalized form has `a = 1`,
/// an unnormalized production matrix has `a > 0`. Entries of `bplus`,
/// `bminus`, and `c` scale together with `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FanoState {
    pub a: f64,
    pub bplus: Vector3<f64>,
    pub bminus: Vector3<f64>,
    pub c: Matrix3<f64>,
}

impl FanoState {
    pub fn new(a: f64, bplus: Vector3<f64>, bminus: Vector3<f64>, c: Matrix3<f64>) -> Self {
        FanoState { a, bplus, bminus, c }
    }

    /// Unpolarized operator: only the correlation matrix is nonzero.
    pub fn unpolarized(a: f64, c: Matrix3<f64>) -> Self {
        FanoState::new(a, Vector3::zeros(), Vector3::zeros(), c)
    }

    /// Divide through by `a`, producing the unit-trace form.
    pub fn normalized(&self) -> Result<FanoState> {
        if !(self.a > 0.0) {
            return Err(Error::DegenerateNormalization { a: self.a });
        }
        Ok(FanoState::new(
            1.0,
            self.bplus / self.a,
            self.bminus / self.a,
            self.c / self.a,
        ))
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite()
            && self.bplus.iter().all(|v| v.is_finite())
            && self.bminus.iter().all(|v| v.is_finite())
            && self.c.iter().all(|v| v.is_finite())
    }
}

/// A 4x4 complex matrix tagged with the spin basis its indices refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix4 {
    entries: M4,
    basis: String,
}

impl DensityMatrix4 {
    /// Wrap an externally produced matrix, enforcing hermiticity.
    pub fn from_matrix(entries: M4, basis: &str, tol: &Tolerances) -> Result<Self> {
        let adj = entries.adjoint();
        for i in 0..4 {
            for j in 0..4 {
                let dev = (entries[(i, j)] - adj[(i, j)]).norm();
                if dev > tol.algebra {
                    return Err(Error::Domain {
                        name: "hermiticity deviation",
                        value: dev,
                    });
                }
            }
        }
        Ok(DensityMatrix4 {
            entries,
            basis: basis.to_owned(),
        })
    }

    pub fn entries(&self) -> &M4 {
        &self.entries
    }

    pub fn basis(&self) -> &str {
        &self.basis
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Err if any eigenvalue sits below `-tol.physicality`.
    pub fn check_physical(&self, tol: &Tolerances) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < -tol.physicality {
            return Err(Error::NonPhysicalState {
                eigenvalue: min,
                tolerance: tol.physicality,
            });
        }
        Ok(())
    }
}

/// Pauli matrices in the conventional basis.
pub fn pauli() -> [Matrix2<C64>; 3] {
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    [
        Matrix2::new(zero, one, one, zero),
        Matrix2::new(zero, -i, i, zero),
        Matrix2::new(one, zero, zero, -one),
    ]
}

/// Assemble the 4x4 matrix
/// `(a I + sum_i b+_i s_i x I + sum_i b-_i I x s_i + sum_ij c_ij s_i x s_j) / 4`
/// whose trace equals `a`. Physicality is not checked here.
pub fn assemble_density(f: &FanoState, basis: &str) -> DensityMatrix4 {
    let s = pauli();
    let id2 = Matrix2::<C64>::identity();
    let mut m = Matrix4::<C64>::identity() * C64::new(f.a, 0.0);
    for i in 0..3 {
        let bp = C64::new(f.bplus[i], 0.0);
        let bm = C64::new(f.bminus[i], 0.0);
        m += s[i].kronecker(&id2) * bp;
        m += id2.kronecker(&s[i]) * bm;
        for j in 0..3 {
            let cij = C64::new(f.c[(i, j)], 0.0);
            m += s[i].kronecker(&s[j]) * cij;
        }
    }
    DensityMatrix4 {
        entries: m * C64::new(0.25, 0.0),
        basis: basis.to_owned(),
    }
}

/// Invert [`assemble_density`]: recover Fano coefficients by tracing
/// against the Pauli basis. Imaginary parts (zero for Hermitian input up
/// to rounding) are discarded.
pub fn extract_fano(rho: &DensityMatrix4) -> FanoState {
    let s = pauli();
    let id2 = Matrix2::<C64>::identity();
    let m = rho.entries();
    let a = m.trace().re;
    let mut bplus = Vector3::zeros();
    let mut bminus = Vector3::zeros();
    let mut c = Matrix3::zeros();
    for i in 0..3 {
        bplus[i] = (m * s[i].kronecker(&id2)).trace().re;
        bminus[i] = (m * id2.kronecker(&s[i])).trace().re;
        for j in 0..3 {
            c[(i, j)] = (m * s[i].kronecker(&s[j])).trace().re;
        }
    }
    FanoState::new(a, bplus, bminus, c)
}

/// Eigenvalues of a Hermitian 4x4 matrix, ascending.
fn hermitian_eigenvalues(m: &M4) -> [f64; 4] {
    let eig = m.symmetric_eigen();
    let mut v = [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ];
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

/// Hermitian square root by spectral decomposition. Eigenvalues in
/// `[-clamp_tol, 0)` are treated as zero; anything lower is an error.
pub fn hermitian_sqrt(m: &M4, clamp_tol: f64) -> Result<M4> {
    let eig = m.symmetric_eigen();
    let mut d = Matrix4::<C64>::zeros();
    for k in 0..4 {
        let lam = eig.eigenvalues[k];
        if lam < -clamp_tol {
            return Err(Error::NonPhysicalState {
                eigenvalue: lam,
                tolerance: clamp_tol,
            });
        }
        d[(k, k)] = C64::new(lam.max(0.0).sqrt(), 0.0);
    }
    let q = eig.eigenvectors;
    Ok(q * d * q.adjoint())
}

/// Spin-flipped matrix `(s2 x s2) conj(m) (s2 x s2)`.
fn spin_flip(m: &M4) -> M4 {
    let s2 = pauli()[1];
    let yy = s2.kronecker(&s2);
    yy * m.conjugate() * yy
}

/// Wootters concurrence of a physical two-qubit state.
///
/// The four characteristic values are obtained as square roots of the
/// eigenvalues of the Hermitian product `sqrt(rho) rho~ sqrt(rho)`,
/// which shares its spectrum with `rho rho~`; the unit tests pin the
/// equivalence against the literal nested-square-root definition.
pub fn concurrence_with(rho: &DensityMatrix4, tol: &Tolerances) -> Result<f64> {
    rho.check_physical(tol)?;
    let root = hermitian_sqrt(rho.entries(), tol.physicality)?;
    let herm = root * spin_flip(rho.entries()) * root;
    let mut lam: Vec<f64> = hermitian_eigenvalues(&herm)
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .collect();
    lam.sort_by(|a, b| b.total_cmp(a));
    Ok((lam[0] - lam[1] - lam[2] - lam[3]).max(0.0))
}

/// [`concurrence_with`] at default tolerances.
pub fn concurrence(rho: &DensityMatrix4) -> Result<f64> {
    concurrence_with(rho, &Tolerances::default())
}

/// Concurrence of an unpolarized state with diagonal correlations
/// `(c1, c2, c3)`, where the third axis is the symmetry axis.
///
/// Closed form valid on either sign of `c3`; the physicality bounds
/// `+-c3 + |c1 -+ c2| <= 1` are enforced first.
pub fn concurrence_tstate(c_diag: Vector3<f64>) -> Result<f64> {
    let (c1, c2, c3) = (c_diag[0], c_diag[1], c_diag[2]);
    // nonnegativity of the four Bell-basis weights, grouped in +-c3 pairs
    let slack = (c3 + (c1 + c2).abs() - 1.0).max(-c3 + (c1 - c2).abs() - 1.0);
    if slack > 1e-9 {
        return Err(Error::PhysicalityViolation { excess: slack });
    }
    let value = if c3 <= 0.0 {
        -c3 + (c1 + c2).abs() - 1.0
    } else {
        c3 + (c1 - c2).abs() - 1.0
    };
    Ok(0.5 * value.max(0.0))
}

/// Concurrence of an unpolarized state with an arbitrary symmetric
/// correlation matrix, to machine precision.
///
/// A symmetric `C` diagonalizes as `O D O^T` with `O` in SO(3) (negate
/// `O` if needed), which is a local rotation on both spins, so the state
/// shares its concurrence with the Bell-diagonal state of `D`. Avoids
/// the noise floor of the general eigensolver route near rank-deficient
/// states.
pub fn concurrence_unpolarized(c: &Matrix3<f64>) -> Result<f64> {
    let eig = c.symmetric_eigen();
    concurrence_tstate(eig.eigenvalues)
}

/// Transpose the second qubit: each 2x2 block of the 4x4 matrix is
/// transposed in place.
pub fn partial_transpose(m: &M4) -> M4 {
    let mut out = *m;
    for bi in [0usize, 2] {
        for bj in [0usize, 2] {
            let tmp = out[(bi, bj + 1)];
            out[(bi, bj + 1)] = out[(bi + 1, bj)];
            out[(bi + 1, bj)] = tmp;
        }
    }
    out
}

/// Positive-partial-transpose test. Returns the minimum eigenvalue of
/// the partially transposed matrix and the entanglement verdict
/// (negative beyond tolerance), which is exact for two qubits.
pub fn peres_horodecki_with(rho: &DensityMatrix4, tol: &Tolerances) -> Result<(f64, bool)> {
    rho.check_physical(tol)?;
    let pt = partial_transpose(rho.entries());
    let min = hermitian_eigenvalues(&pt)[0];
    Ok((min, min < -tol.physicality))
}

/// [`peres_horodecki_with`] at default tolerances.
pub fn peres_horodecki(rho: &DensityMatrix4) -> Result<(f64, bool)> {
    peres_horodecki_with(rho, &Tolerances::default())
}

/// Entanglement marker `(-c33 + |c11 + c22| - 1) / 2` for a correlation
/// matrix whose third index is the out-of-plane (or z) axis. Positive
/// values certify entanglement for any state.
pub fn delta_marker(c: &Matrix3<f64>) -> f64 {
    0.5 * (-c[(2, 2)] + (c[(0, 0)] + c[(1, 1)]).abs() - 1.0)
}

/// Marker for axially symmetric diagonal correlations
/// `diag(c_perp, c_perp, c_z)`: positive iff the state is entangled
/// within this family.
pub fn axial_delta(c_perp: f64, c_z: f64) -> f64 {
    0.5 * (-c_z + 2.0 * c_perp.abs() - 1.0)
}

/// Maximum CHSH combination `2 sqrt(m1 + m2)` from the two largest
/// eigenvalues of `C^T C`.
pub fn chsh_value(c: &Matrix3<f64>) -> f64 {
    let gram = c.transpose() * c;
    let eig = gram.symmetric_eigen();
    let mut v = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    v.sort_by(|a, b| b.total_cmp(a));
    2.0 * (v[0].max(0.0) + v[1].max(0.0)).sqrt()
}

/// Brute-force CHSH maximizer used as an oracle for [`chsh_value`].
///
/// For fixed measurement axes the optimum over the remaining pair reduces
/// to `2 sqrt(|C e1|^2 + |C e2|^2)` over orthonormal `(e1, e2)`; random
/// frames plus greedy refinement land within 1e-4 of the true maximum.
pub fn chsh_brute_force<R: Rng>(c: &Matrix3<f64>, starts: usize, refine: usize, rng: &mut R) -> f64 {
    let value = |e1: &Vector3<f64>, e2: &Vector3<f64>| -> f64 {
        let v1 = c * e1;
        let v2 = c * e2;
        2.0 * (v1.norm_squared() + v2.norm_squared()).sqrt()
    };
    let mut best = 0.0f64;
    let mut best_frame = (Vector3::x(), Vector3::y());
    for _ in 0..starts {
        let (e1, e2) = random_frame(rng);
        let v = value(&e1, &e2);
        if v > best {
            best = v;
            best_frame = (e1, e2);
        }
    }
    let mut step = 0.3f64;
    let (mut e1, mut e2) = best_frame;
    for _ in 0..refine {
        let p1 = perturb(&e1, step, rng);
        let mut p2 = (e2 - p1 * e2.dot(&p1)).normalize();
        p2 = perturb(&p2, step, rng);
        p2 = (p2 - p1 * p2.dot(&p1)).normalize();
        let v = value(&p1, &p2);
        if v > best {
            best = v;
            e1 = p1;
            e2 = p2;
        } else {
            step *= 0.97;
        }
    }
    best
}

fn random_frame<R: Rng>(rng: &mut R) -> (Vector3<f64>, Vector3<f64>) {
    let e1 = random_unit(rng);
    loop {
        let raw = random_unit(rng);
        let proj = raw - e1 * raw.dot(&e1);
        if proj.norm() > 1e-6 {
            return (e1, proj.normalize());
        }
    }
}

fn random_unit<R: Rng>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        );
        let n = v.norm();
        if n > 1e-6 && n <= 1.0 {
            return v / n;
        }
    }
}

fn perturb<R: Rng>(v: &Vector3<f64>, step: f64, rng: &mut R) -> Vector3<f64> {
    (v + random_unit(rng) * step).normalize()
}

/// Trace-based observable `D = tr(C) / 3` and witness `W = D + 1/3`;
/// `W < 0` certifies entanglement.
pub fn witness_d(c: &Matrix3<f64>) -> (f64, f64) {
    let d = c.trace() / 3.0;
    (d, d + 1.0 / 3.0)
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix4, sigma: &DensityMatrix4, tol: &Tolerances) -> Result<f64> {
    let root = hermitian_sqrt(rho.entries(), tol.physicality)?;
    let inner = root * sigma.entries() * root;
    let sum: f64 = hermitian_eigenvalues(&inner)
        .iter()
        .map(|&x| x.max(0.0).sqrt())
        .sum();
    Ok(sum * sum)
}

/// Random physical state: a convex mixture of `rank` random pure states.
/// Used by property tests and validation scans.
pub fn random_mixed_state<R: Rng>(rng: &mut R, rank: usize) -> DensityMatrix4 {
    let rank = rank.clamp(1, 4);
    let mut m = Matrix4::<C64>::zeros();
    let mut weights = Vec::with_capacity(rank);
    for _ in 0..rank {
        weights.push(-(rng.random::<f64>().max(1e-12)).ln());
    }
    let wsum: f64 = weights.iter().sum();
    for w in &weights {
        let mut psi = [C64::new(0.0, 0.0); 4];
        let mut norm2 = 0.0;
        for slot in psi.iter_mut() {
            let re = gaussian(rng);
            let im = gaussian(rng);
            *slot = C64::new(re, im);
            norm2 += re * re + im * im;
        }
        let scale = (w / wsum / norm2).sqrt();
        for (i, pi) in psi.iter().enumerate() {
            for (j, pj) in psi.iter().enumerate() {
                m[(i, j)] += pi * pj.conj() * scale * scale;
            }
        }
    }
    DensityMatrix4 {
        entries: m,
        basis: "random".to_owned(),
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; one draw per call keeps the stream layout simple
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn singlet() -> DensityMatrix4 {
        assemble_density(
            &FanoState::unpolarized(1.0, -Matrix3::identity()),
            "any",
        )
    }

    #[test]
    fn identity_case_assembles_to_maximally_mixed() {
        let rho = assemble_density(&FanoState::unpolarized(1.0, Matrix3::zeros()), "any");
        let want = Matrix4::<C64>::identity() * C64::new(0.25, 0.0);
        assert!((rho.entries() - want).norm() < 1e-15);
    }

    #[test]
    fn singlet_matrix_entries() {
        let rho = singlet();
        let m = rho.entries();
        for (i, j, want) in [
            (0usize, 0usize, 0.0),
            (1, 1, 0.5),
            (2, 2, 0.5),
            (3, 3, 0.0),
            (1, 2, -0.5),
            (2, 1, -0.5),
            (0, 3, 0.0),
            (3, 0, 0.0),
        ] {
            assert_abs_diff_eq!(m[(i, j)].re, want, epsilon = 1e-15);
            assert_abs_diff_eq!(m[(i, j)].im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn triplet_matrix_is_middle_block_projector() {
        let c = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        let rho = assemble_density(&FanoState::unpolarized(1.0, c), "any");
        let m = rho.entries();
        assert_abs_diff_eq!(m[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 2)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(2, 2)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 0)].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(3, 3)].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn fano_round_trip_is_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..500 {
            let f = FanoState::new(
                1.0,
                Vector3::from_fn(|_, _| rng.random::<f64>() * 2.0 - 1.0),
                Vector3::from_fn(|_, _| rng.random::<f64>() * 2.0 - 1.0),
                Matrix3::from_fn(|_, _| rng.random::<f64>() * 2.0 - 1.0),
            );
            let back = extract_fano(&assemble_density(&f, "any"));
            assert_abs_diff_eq!(back.a, 1.0, epsilon = 1e-12);
            assert!((back.bplus - f.bplus).norm() < 1e-12);
            assert!((back.bminus - f.bminus).norm() < 1e-12);
            assert!((back.c - f.c).norm() < 1e-12);
        }
    }

    #[test]
    fn concurrence_of_singlet_is_one() {
        assert_abs_diff_eq!(concurrence(&singlet()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_of_product_state_is_zero() {
        let f = FanoState::new(
            1.0,
            Vector3::z(),
            Vector3::z(),
            Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0)),
        );
        let rho = assemble_density(&f, "any");
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_rejects_unphysical_matrix() {
        let c = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 1.0));
        let rho = assemble_density(&FanoState::unpolarized(1.0, c), "any");
        assert!(matches!(
            concurrence(&rho),
            Err(Error::NonPhysicalState { .. })
        ));
    }

    #[test]
    fn tstate_closed_form_examples() {
        assert_abs_diff_eq!(
            concurrence_tstate(Vector3::new(-1.0, -1.0, -1.0)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            concurrence_tstate(Vector3::new(1.0, 1.0, -1.0)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            concurrence_tstate(Vector3::new(0.3, 0.3, -0.2)).unwrap(),
            0.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn tstate_rejects_unphysical_diagonal() {
        assert!(matches!(
            concurrence_tstate(Vector3::new(0.9, -0.9, 0.0)),
            Err(Error::PhysicalityViolation { .. })
        ));
    }

    #[test]
    fn tstate_agrees_with_wootters_route() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 200 {
            let d = Vector3::from_fn(|_, _| rng.random::<f64>() * 2.0 - 1.0);
            let Ok(closed) = concurrence_tstate(d) else {
                continue;
            };
            let rho = assemble_density(
                &FanoState::unpolarized(1.0, Matrix3::from_diagonal(&d)),
                "any",
            );
            let woot = concurrence(&rho).unwrap();
            assert_abs_diff_eq!(closed, woot, epsilon = 1e-12);
            checked += 1;
        }
    }

    /// Literal nested-square-root characteristic values, used to pin the
    /// production implementation.
    fn wootters_literal(rho: &DensityMatrix4) -> f64 {
        let tol = Tolerances::default();
        let root = hermitian_sqrt(rho.entries(), tol.physicality).unwrap();
        let inner = root * spin_flip(rho.entries()) * root;
        let outer = hermitian_sqrt(&inner, 1e-8).unwrap();
        let mut lam: Vec<f64> = hermitian_eigenvalues(&outer).to_vec();
        lam.sort_by(|a, b| b.total_cmp(a));
        (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0)
    }

    #[test]
    fn production_concurrence_matches_literal_definition() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        for k in 0..300 {
            let rho = random_mixed_state(&mut rng, 1 + k % 4);
            let a = concurrence(&rho).unwrap();
            let b = wootters_literal(&rho);
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn partial_transpose_spectrum_of_singlet() {
        let (min, entangled) = peres_horodecki(&singlet()).unwrap();
        assert_abs_diff_eq!(min, -0.5, epsilon = 1e-12);
        assert!(entangled);
        // partial transpose flips the sign of the middle correlation axis,
        // giving Bell weights {1/2, 1/2, -1/2, 1/2}
        let pt = partial_transpose(singlet().entries());
        let eig = hermitian_eigenvalues(&pt);
        for (got, want) in eig.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn maximally_mixed_is_separable() {
        let rho = assemble_density(&FanoState::unpolarized(1.0, Matrix3::zeros()), "any");
        let (min, entangled) = peres_horodecki(&rho).unwrap();
        assert_abs_diff_eq!(min, 0.25, epsilon = 1e-12);
        assert!(!entangled);
    }

    #[test]
    fn rank_one_projector_correlation_is_separable() {
        // perfectly correlated along an axis but a classical mixture
        let p = Vector3::new(0.6, 0.0, 0.8);
        let c = p * p.transpose();
        let rho = assemble_density(&FanoState::unpolarized(1.0, c), "any");
        let (_, entangled) = peres_horodecki(&rho).unwrap();
        assert!(!entangled);
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn delta_marker_examples() {
        assert_abs_diff_eq!(delta_marker(&(-Matrix3::identity())), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(delta_marker(&Matrix3::zeros()), -0.5, epsilon = 1e-15);
        let triplet = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0));
        assert_abs_diff_eq!(delta_marker(&triplet), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn axial_delta_examples() {
        assert_abs_diff_eq!(axial_delta(-1.0, -1.0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(axial_delta(0.0, 0.0), -0.5, epsilon = 1e-15);
        // boundary: -c_z + 2|c_perp| = 1
        let c_perp = -1.0 / 2.0f64.sqrt();
        let c_z = 2.0f64.sqrt() - 1.0;
        assert_abs_diff_eq!(axial_delta(c_perp, c_z), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn axial_boundary_is_separability_boundary() {
        // exactly on the axial boundary the partial transpose touches zero
        let c_perp = -0.4f64;
        let c_z = 2.0 * c_perp.abs() - 1.0;
        let c = Matrix3::from_diagonal(&Vector3::new(c_perp, c_perp, c_z));
        let rho = assemble_density(&FanoState::unpolarized(1.0, c), "any");
        let (min, _) = peres_horodecki(&rho).unwrap();
        assert_abs_diff_eq!(min, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn chsh_examples() {
        assert_abs_diff_eq!(
            chsh_value(&(-Matrix3::identity())),
            2.0 * 2.0f64.sqrt(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(chsh_value(&Matrix3::zeros()), 0.0, epsilon = 1e-15);
        let c = Matrix3::from_diagonal(&Vector3::new(1.0, 0.6, -0.6));
        assert_abs_diff_eq!(chsh_value(&c), 2.0 * 1.36f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn chsh_matches_brute_force_on_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for _ in 0..25 {
            let c = Matrix3::from_fn(|_, _| rng.random::<f64>() * 2.0 - 1.0) * 0.5;
            let exact = chsh_value(&c);
            let brute = chsh_brute_force(&c, 2000, 4000, &mut rng);
            assert!(brute <= exact + 1e-9);
            assert_abs_diff_eq!(exact, brute, epsilon = 1e-3);
        }
    }

    #[test]
    fn witness_examples() {
        let (d, w) = witness_d(&(-Matrix3::identity()));
        assert_abs_diff_eq!(d, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w, -2.0 / 3.0, epsilon = 1e-15);
        let (d, w) = witness_d(&Matrix3::zeros());
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w, 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn random_mixed_states_are_physical_unit_trace() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for k in 0..200 {
            let rho = random_mixed_state(&mut rng, 1 + k % 4);
            assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
            assert!(rho.min_eigenvalue() > -1e-12);
        }
    }

    #[test]
    fn ppt_iff_zero_concurrence_on_random_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for k in 0..500 {
            let rho = random_mixed_state(&mut rng, 1 + k % 4);
            let conc = concurrence(&rho).unwrap();
            let (_, entangled) = peres_horodecki(&rho).unwrap();
            assert_eq!(entangled, conc > 1e-9, "conc = {conc}");
        }
    }

    #[test]
    fn chsh_violation_implies_entanglement_and_respects_bound() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let ceiling = 2.0 * 2.0f64.sqrt() + 1e-9;
        for k in 0..500 {
            let rho = random_mixed_state(&mut rng, 1 + k % 4);
            let f = extract_fano(&rho);
            let b = chsh_value(&f.c);
            assert!(b <= ceiling, "chsh = {b}");
            if b > 2.0 {
                let (_, entangled) = peres_horodecki(&rho).unwrap();
                assert!(entangled);
            }
        }
    }

    #[test]
    fn negative_witness_implies_entanglement() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for k in 0..500 {
            let rho = random_mixed_state(&mut rng, 1 + k % 4);
            let f = extract_fano(&rho);
            let (_, w) = witness_d(&f.c);
            if w < -1e-12 {
                assert!(concurrence(&rho).unwrap() > 0.0);
            }
        }
    }

    #[test]
    fn threshold_family_concurrence_closed_form() {
        // diag(p, p, z) with p < 0, z <= 0: concurrence = max(-1 - 3D, 0) / 2
        let mut rng = ChaCha12Rng::seed_from_u64(37);
        for _ in 0..200 {
            let z = -rng.random::<f64>();
            let p = -(rng.random::<f64>()) * (1.0 + z) / 2.0;
            let c = Matrix3::from_diagonal(&Vector3::new(p, p, z));
            let rho = assemble_density(&FanoState::unpolarized(1.0, c), "any");
            let conc = concurrence(&rho).unwrap();
            let d = c.trace() / 3.0;
            assert_abs_diff_eq!(conc, (-1.0 - 3.0 * d).max(0.0) / 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn symmetric_correlation_route_matches_general_route() {
        // rotated T-states: the closed form is exact, the general route
        // carries the eigensolver noise floor near rank deficiency
        let mut rng = ChaCha12Rng::seed_from_u64(43);
        for _ in 0..200 {
            let z: f64 = 1.0 - 2.0 * rng.random::<f64>();
            let p1 = (1.0 - z.abs()) * (1.0 - 2.0 * rng.random::<f64>());
            // |p1| + |p2| + |z| <= 1 keeps every Bell weight nonnegative
            let p2 = (1.0 - z.abs() - p1.abs()) * (1.0 - 2.0 * rng.random::<f64>());
            let rot = random_rotation(&mut rng);
            let c = rot * Matrix3::from_diagonal(&Vector3::new(p1, p2, z)) * rot.transpose();
            let closed = concurrence_unpolarized(&c).unwrap();
            let general =
                concurrence(&assemble_density(&FanoState::unpolarized(1.0, c), "any")).unwrap();
            assert_abs_diff_eq!(closed, general, epsilon = 5e-8);
            let direct = concurrence_tstate(Vector3::new(p1, p2, z)).unwrap();
            assert_abs_diff_eq!(closed, direct, epsilon = 1e-12);
        }
    }

    fn random_rotation<R: Rng>(rng: &mut R) -> Matrix3<f64> {
        // uniform via normalized quaternion
        let q: [f64; 4] = std::array::from_fn(|_| gaussian(rng));
        let n = (q.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    #[test]
    fn concurrence_invariant_under_local_rotations() {
        // full-rank states keep the characteristic values away from zero,
        // where their square roots lose half the working precision
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        for _ in 0..100 {
            let raw = random_mixed_state(&mut rng, 4);
            let uniform = Matrix4::<C64>::identity() * C64::new(0.25, 0.0);
            let blended = raw.entries() * C64::new(1.0 - 1e-4, 0.0) + uniform * C64::new(1e-4, 0.0);
            let rho = DensityMatrix4::from_matrix(blended, "random", &Tolerances::default())
                .unwrap();
            let f = extract_fano(&rho);
            let o1 = random_rotation(&mut rng);
            let o2 = random_rotation(&mut rng);
            let rotated = FanoState::new(
                f.a,
                o1.transpose() * f.bplus,
                o2.transpose() * f.bminus,
                o1.transpose() * f.c * o2,
            );
            let rho_rot = assemble_density(&rotated, "any");
            let c0 = concurrence(&rho).unwrap();
            let c1 = concurrence_with(&rho_rot, &Tolerances::default().with_physicality(1e-9))
                .unwrap();
            assert_abs_diff_eq!(c0, c1, epsilon = 1e-9);
        }
    }

    #[test]
    fn hermiticity_gate_on_external_matrices() {
        let mut m = Matrix4::<C64>::identity() * C64::new(0.25, 0.0);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix4::from_matrix(m, "any", &Tolerances::default()).is_err());
        m[(1, 0)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix4::from_matrix(m, "any", &Tolerances::default()).is_ok());
    }

    #[test]
    fn fidelity_sanity() {
        let tol = Tolerances::default();
        let s = singlet();
        assert_abs_diff_eq!(fidelity(&s, &s, &tol).unwrap(), 1.0, epsilon = 1e-10);
        let mixed = assemble_density(&FanoState::unpolarized(1.0, Matrix3::zeros()), "any");
        assert_abs_diff_eq!(fidelity(&s, &mixed, &tol).unwrap(), 0.25, epsilon = 1e-10);
        let triplet = assemble_density(
            &FanoState::unpolarized(1.0, Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, -1.0))),
            "any",
        );
        assert_abs_diff_eq!(fidelity(&s, &triplet, &tol).unwrap(), 0.0, epsilon = 1e-10);
    }
}
