//! Qubit measurements on two-qubit states and the chained measurement family.
//!
//! Setting `j` of the chained family measures in the basis
//! `{cos(θ/2)|0⟩ + sin(θ/2)|1⟩, sin(θ/2)|0⟩ − cos(θ/2)|1⟩}` with `θ = πj/(2N)`.
//! Alice owns the even labels `0, 2, …, 2N−2` and Bob the odd labels
//! `1, 3, …, 2N−1`. Outcome index 0 is `+1`, index 1 is `−1`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::table::{Axis, ConditionalTable};

/// Hermiticity, trace and PSD checks on states use this tolerance.
pub const STATE_TOLERANCE: f64 = 1e-10;
/// Completeness and idempotence checks on measurement effects.
pub const EFFECT_TOLERANCE: f64 = 1e-12;
/// Born probabilities in `[-CLAMP, 0)` are rounding noise and become zero.
pub const NEGATIVE_CLAMP: f64 = 1e-14;

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// `|ket⟩⟨ket|`.
    pub fn projector(ket: &[Complex<T>]) -> Self {
        let d = ket.len();
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = ket[i] * ket[j].conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn scale(&self, factor: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut m = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.max_abs_diff(&self.adjoint()) <= tol
    }

    pub fn has_unit_trace(&self, tol: T) -> bool {
        let t = self.trace();
        (t.re - T::one()).abs() <= tol && t.im.abs() <= tol
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// The `n×n` Hermitian `H = S + iK` is embedded as the real symmetric
    /// `[[S, −K], [K, S]]`, whose spectrum is that of `H` with every
    /// eigenvalue doubled; cyclic Jacobi rotations diagonalize it.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<T>> {
        if !self.is_square() {
            return Err(Error::invalid("eigenvalues need a square matrix"));
        }
        let n = self.rows;
        let d = 2 * n;
        let mut a = vec![T::zero(); d * d];
        for i in 0..n {
            for j in 0..n {
                let z = self[(i, j)];
                a[i * d + j] = z.re;
                a[(i + n) * d + (j + n)] = z.re;
                a[i * d + (j + n)] = -z.im;
                a[(i + n) * d + j] = z.im;
            }
        }
        jacobi_eigenvalues(&mut a, d);
        let mut eig: Vec<T> = (0..d).map(|i| a[i * d + i]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        Ok(eig.chunks(2).map(|pair| (pair[0] + pair[1]) / T::lit(2.0)).collect())
    }

    /// Hermitian with smallest eigenvalue at least `−tol`.
    pub fn is_positive_semidefinite(&self, tol: T) -> bool {
        self.is_hermitian(tol)
            && self
                .hermitian_eigenvalues()
                .map(|e| e.first().is_none_or(|&min| min >= -tol))
                .unwrap_or(false)
    }
}

fn jacobi_eigenvalues<T: Scalar>(a: &mut [T], d: usize) {
    let off = |a: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    s += a[i * d + j] * a[i * d + j];
                }
            }
        }
        s
    };
    let scale: T = a.iter().map(|x| *x * *x).sum::<T>().max(T::min_positive_value());
    for _sweep in 0..100 {
        if off(a) <= scale * T::epsilon() * T::epsilon() {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.entries[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.entries[r * self.cols + c]
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.cols, rhs.rows);
        let mut m = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    m[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

/// Two-outcome projective measurement on a qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectiveQubitMeasurement<T> {
    pub angle: T,
    pub effect_plus: ComplexMatrix<T>,
    pub effect_minus: ComplexMatrix<T>,
}

impl<T: Scalar> ProjectiveQubitMeasurement<T> {
    pub fn effect(&self, outcome_index: usize) -> &ComplexMatrix<T> {
        if outcome_index == 0 {
            &self.effect_plus
        } else {
            &self.effect_minus
        }
    }

    /// Worst entrywise violation of completeness, idempotence and hermiticity.
    pub fn defect(&self) -> T {
        let id = ComplexMatrix::identity(2);
        let completeness = (&self.effect_plus + &self.effect_minus).max_abs_diff(&id);
        [&self.effect_plus, &self.effect_minus]
            .into_iter()
            .map(|e| {
                (e * e)
                    .max_abs_diff(e)
                    .max(e.max_abs_diff(&e.adjoint()))
            })
            .fold(completeness, T::max)
    }
}

/// Measurement in the basis `{|θ₊⟩, |θ₋⟩}` for polar angle `theta`.
pub fn measurement_from_angle<T: Scalar>(theta: T) -> Result<ProjectiveQubitMeasurement<T>> {
    if !theta.is_finite() {
        return Err(Error::invalid("measurement angle must be finite"));
    }
    let half = theta / T::lit(2.0);
    let (s, c) = half.sin_cos();
    let re = |x: T| Complex::new(x, T::zero());
    Ok(ProjectiveQubitMeasurement {
        angle: theta,
        effect_plus: ComplexMatrix::projector(&[re(c), re(s)]),
        effect_minus: ComplexMatrix::projector(&[re(s), re(-c)]),
    })
}

/// A measurement tagged with its setting label.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledMeasurement<T> {
    pub label: i64,
    pub measurement: ProjectiveQubitMeasurement<T>,
}

/// The `2N` chained settings split between Alice (even) and Bob (odd).
#[derive(Clone, Debug, PartialEq)]
pub struct ChainedMeasurementFamily<T> {
    n: usize,
    alice: Vec<LabeledMeasurement<T>>,
    bob: Vec<LabeledMeasurement<T>>,
}

impl<T: Scalar> ChainedMeasurementFamily<T> {
    /// Arbitrary labelled measurements, e.g. to probe equal-angle settings.
    pub fn from_measurements(
        alice: Vec<LabeledMeasurement<T>>,
        bob: Vec<LabeledMeasurement<T>>,
    ) -> Result<Self> {
        if alice.is_empty() || bob.is_empty() {
            return Err(Error::invalid("each party needs at least one setting"));
        }
        Ok(Self {
            n: alice.len().max(bob.len()),
            alice,
            bob,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alice(&self) -> &[LabeledMeasurement<T>] {
        &self.alice
    }

    pub fn bob(&self) -> &[LabeledMeasurement<T>] {
        &self.bob
    }

    pub fn alice_labels(&self) -> Vec<i64> {
        self.alice.iter().map(|m| m.label).collect()
    }

    pub fn bob_labels(&self) -> Vec<i64> {
        self.bob.iter().map(|m| m.label).collect()
    }

    /// Measurement for `label` on either side.
    pub fn get(&self, label: i64) -> Option<&ProjectiveQubitMeasurement<T>> {
        self.alice
            .iter()
            .chain(&self.bob)
            .find(|m| m.label == label)
            .map(|m| &m.measurement)
    }
}

/// `θʲ = πj/(2N)` for one setting label.
pub fn chained_angle<T: Scalar>(n: usize, label: usize) -> T {
    T::PI() * T::lit(label as f64) / T::lit((2 * n) as f64)
}

pub fn chained_family<T: Scalar>(n: usize) -> Result<ChainedMeasurementFamily<T>> {
    if n == 0 {
        return Err(Error::invalid("chain length N must be at least 1"));
    }
    let build = |j: usize| -> Result<LabeledMeasurement<T>> {
        Ok(LabeledMeasurement {
            label: j as i64,
            measurement: measurement_from_angle(chained_angle::<T>(n, j))?,
        })
    };
    let alice = (0..n).map(|k| build(2 * k)).collect::<Result<_>>()?;
    let bob = (0..n).map(|k| build(2 * k + 1)).collect::<Result<_>>()?;
    Ok(ChainedMeasurementFamily { n, alice, bob })
}

/// Two-qubit density operator with the visibility it was mixed at.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState<T> {
    density: ComplexMatrix<T>,
    visibility: T,
}

impl<T: Scalar> TwoQubitState<T> {
    pub fn new(density: ComplexMatrix<T>, visibility: T) -> Result<Self> {
        if density.rows() != 4 || density.cols() != 4 {
            return Err(Error::invalid("two-qubit density must be 4x4"));
        }
        let tol = T::tol(STATE_TOLERANCE);
        if !density.is_hermitian(tol) {
            return Err(Error::invalid("density is not Hermitian"));
        }
        if !density.has_unit_trace(tol) {
            return Err(Error::invalid("density does not have unit trace"));
        }
        if !density.is_positive_semidefinite(tol) {
            return Err(Error::invalid("density is not positive semidefinite"));
        }
        Ok(Self {
            density,
            visibility,
        })
    }

    pub fn density(&self) -> &ComplexMatrix<T> {
        &self.density
    }

    pub fn visibility(&self) -> T {
        self.visibility
    }
}

/// `v·|φ⁺⟩⟨φ⁺| + (1−v)·I/4` with `|φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn entangled_state<T: Scalar>(visibility: T) -> Result<TwoQubitState<T>> {
    if !(visibility >= T::zero() && visibility <= T::one()) {
        return Err(Error::invalid(format!(
            "visibility {visibility} outside [0, 1]"
        )));
    }
    let amp = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());
    let phi_plus = ComplexMatrix::projector(&[amp, zero, zero, amp]);
    let mixed = ComplexMatrix::identity(4).scale(T::lit(0.25));
    let density = &phi_plus.scale(visibility) + &mixed.scale(T::one() - visibility);
    TwoQubitState::new(density, visibility)
}

/// Born-rule table `P(x, y | a, b) = tr[(E_x^a ⊗ F_y^b) ρ]`.
pub fn born_table<T: Scalar>(
    state: &TwoQubitState<T>,
    family: &ChainedMeasurementFamily<T>,
) -> Result<ConditionalTable<T>> {
    let clamp = T::tol(NEGATIVE_CLAMP);
    let rho = state.density();
    let joint: Vec<Vec<ComplexMatrix<T>>> = family
        .alice()
        .iter()
        .map(|ma| {
            family
                .bob()
                .iter()
                .flat_map(|mb| {
                    (0..2).flat_map(move |x| {
                        (0..2).map(move |y| ma.measurement.effect(x).kron(mb.measurement.effect(y)))
                    })
                })
                .collect()
        })
        .collect();
    let mut probs = Vec::with_capacity(family.alice().len() * family.bob().len() * 4);
    let mut bad = None;
    for per_a in &joint {
        for op in per_a {
            let p = op.trace_product(rho).re;
            if p < -clamp {
                bad = Some(p);
            }
            probs.push(if p < T::zero() { T::zero() } else { p });
        }
    }
    if let Some(p) = bad {
        return Err(Error::Solver(format!("Born rule produced probability {p}")));
    }
    ConditionalTable::new(
        vec![
            Axis::new("A", family.alice_labels()),
            Axis::new("B", family.bob_labels()),
        ],
        vec![Axis::binary("X"), Axis::binary("Y")],
        probs,
    )
}

/// Closed form of `I_N` for the chained family on the visibility-`v` state:
/// `2N·[v·sin²(π/(4N)) + (1−v)/2]`.
pub fn i_n_analytic<T: Scalar>(n: usize, visibility: T) -> Result<T> {
    if n == 0 {
        return Err(Error::invalid("chain length N must be at least 1"));
    }
    if !(visibility >= T::zero() && visibility <= T::one()) {
        return Err(Error::invalid(format!(
            "visibility {visibility} outside [0, 1]"
        )));
    }
    let nn = T::lit(n as f64);
    let s = (T::PI() / (T::lit(4.0) * nn)).sin();
    let half = T::lit(0.5);
    Ok(T::lit(2.0) * nn * (visibility * s * s + (T::one() - visibility) * half))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn real(m: &ComplexMatrix<f64>) -> Vec<f64> {
        m.entries().iter().map(|z| z.re).collect()
    }

    #[test]
    fn family_angles() {
        let f1 = chained_family::<f64>(1).unwrap();
        assert_eq!(f1.alice()[0].measurement.angle, 0.0);
        assert_eq!(f1.bob()[0].measurement.angle, PI / 2.0);
        let f2 = chained_family::<f64>(2).unwrap();
        assert_eq!(f2.alice_labels(), vec![0, 2]);
        assert_eq!(f2.bob_labels(), vec![1, 3]);
        assert_eq!(f2.get(2).unwrap().angle, PI / 2.0);
        assert_eq!(f2.get(1).unwrap().angle, PI / 4.0);
        assert_eq!(f2.get(3).unwrap().angle, 3.0 * PI / 4.0);
        let f4 = chained_family::<f64>(4).unwrap();
        assert_eq!(f4.get(7).unwrap().angle, 7.0 * PI / 8.0);
        assert!(chained_family::<f64>(0).is_err());
    }

    #[test]
    fn measurement_examples() {
        let m0 = measurement_from_angle(0.0f64).unwrap();
        assert_eq!(real(&m0.effect_plus), vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(real(&m0.effect_minus), vec![0.0, 0.0, 0.0, 1.0]);
        let mpi = measurement_from_angle(PI).unwrap();
        for (a, b) in real(&mpi.effect_plus).iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let mh = measurement_from_angle(PI / 2.0).unwrap();
        for a in real(&mh.effect_plus) {
            assert_abs_diff_eq!(a, 0.5, epsilon = 1e-15);
        }
        assert!(measurement_from_angle(f64::NAN).is_err());
        assert!(measurement_from_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn state_examples() {
        let pure = entangled_state(1.0f64).unwrap();
        let rho = pure.density();
        assert_abs_diff_eq!((rho * rho).max_abs_diff(rho), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rho[(0, 3)].re, 0.5, epsilon = 1e-15);
        let mixed = entangled_state(0.0f64).unwrap();
        assert_abs_diff_eq!(
            mixed.density().max_abs_diff(&ComplexMatrix::identity(4).scale(0.25)),
            0.0
        );
        let half = entangled_state(0.5f64).unwrap();
        let d = half.density();
        let diag: Vec<f64> = (0..4).map(|i| d[(i, i)].re).collect();
        for (a, b) in diag.iter().zip([0.375, 0.125, 0.125, 0.375]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(d[(0, 3)].re, 0.25, epsilon = 1e-15);
        assert!(entangled_state(1.5f64).is_err());
        assert!(entangled_state(-0.1f64).is_err());
        assert!(entangled_state(f64::NAN).is_err());
    }

    #[test]
    fn rejects_invalid_density() {
        let mut m = ComplexMatrix::<f64>::zeros(4, 4);
        m[(0, 0)] = Complex::new(1.5, 0.0);
        m[(1, 1)] = Complex::new(-0.5, 0.0);
        assert!(TwoQubitState::new(m, 1.0).is_err());
        let mut h = ComplexMatrix::<f64>::identity(4).scale(0.25);
        h[(0, 1)] = Complex::new(0.0, 0.1);
        assert!(TwoQubitState::new(h, 1.0).is_err());
    }

    #[test]
    fn eigenvalues_of_hermitian() {
        let mut h = ComplexMatrix::<f64>::zeros(2, 2);
        h[(0, 1)] = Complex::new(0.0, -1.0);
        h[(1, 0)] = Complex::new(0.0, 1.0);
        let e = h.hermitian_eigenvalues().unwrap();
        assert_abs_diff_eq!(e[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 1.0, epsilon = 1e-12);
        assert!(!h.is_positive_semidefinite(1e-10));
    }

    #[test]
    fn born_equal_angles_perfectly_correlated() {
        let m = measurement_from_angle(0.0f64).unwrap();
        let fam = ChainedMeasurementFamily::from_measurements(
            vec![LabeledMeasurement { label: 0, measurement: m.clone() }],
            vec![LabeledMeasurement { label: 1, measurement: m }],
        )
        .unwrap();
        let t = born_table(&entangled_state(1.0).unwrap(), &fam).unwrap();
        let s = t.slice(0);
        assert_abs_diff_eq!(s[0] + s[3], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn born_chsh_cell() {
        let t = born_table(
            &entangled_state(1.0f64).unwrap(),
            &chained_family(2).unwrap(),
        )
        .unwrap();
        let s = t.slice(t.input_flat(&[0, 0]));
        // Born-rule oracle: P(x≠y) = sin²(Δθ/2) with Δθ = π/4.
        assert_abs_diff_eq!(s[1] + s[2], 0.146_446_609_406_726_24, epsilon = 1e-12);
    }

    #[test]
    fn born_maximally_mixed_is_uniform() {
        let t = born_table(
            &entangled_state(0.0f64).unwrap(),
            &chained_family(3).unwrap(),
        )
        .unwrap();
        for p in t.probabilities() {
            assert_abs_diff_eq!(*p, 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn analytic_values() {
        assert_abs_diff_eq!(i_n_analytic(2, 1.0f64).unwrap(), 2.0 - 2f64.sqrt(), epsilon = 1e-12);
        // 16·(0.98·sin²(π/32) + 0.01), evaluated independently.
        assert_abs_diff_eq!(i_n_analytic(8, 0.98f64).unwrap(), 0.310_643_4, epsilon = 1e-7);
        for n in 1..10 {
            assert_abs_diff_eq!(i_n_analytic(n, 0.0f64).unwrap(), n as f64, epsilon = 1e-12);
        }
        assert!(i_n_analytic(0, 0.5f64).is_err());
        assert!(i_n_analytic(3, 1.01f64).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let t = born_table(
            &entangled_state(1.0f32).unwrap(),
            &chained_family::<f32>(2).unwrap(),
        )
        .unwrap();
        let s = t.slice(0);
        assert!((s[1] + s[2] - 0.146_446_6).abs() < 1e-5);
    }
}
