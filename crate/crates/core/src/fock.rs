//! Bosonic Fock space for a fixed number of particles over a handful of modes.
//!
//! A linear-optical network acts on mode operators through an `m × m` unitary `U`. On the
//! `N`-boson space of dimension `C(N + m - 1, N)` it acts through the lift `Φ(U)`, whose entries
//! are permanents of submatrices of `U`:
//!
//! ```text
//! Φ(U)[out, in] = Per(U[out, in]) / sqrt(Π_j out_j! · Π_i in_i!)
//! ```
//!
//! where `U[out, in]` repeats row `j` of `U` `out_j` times and column `i` `in_i` times.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// Max-entry tolerance on `U†U - I` accepted when constructing a [`ModeUnitary`].
pub const UNITARITY_TOL: f64 = 1e-10;

/// Below this size the permanent is summed over permutations directly.
const RYSER_THRESHOLD: usize = 5;

/// Occupation numbers, one entry per mode.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState(Vec<usize>);

impl FockState {
    pub fn new(occupations: impl Into<Vec<usize>>) -> Self {
        FockState(occupations.into())
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn particles(&self) -> usize {
        self.0.iter().sum()
    }

    /// Mode index of every boson, modes repeated by occupation: `(2,0,1)` gives `[0, 0, 2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(mode, &n)| std::iter::repeat_n(mode, n))
            .collect()
    }

    /// `Π_j n_j!`
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `C(N + m - 1, N)`, the number of ways to put `N` bosons in `m` modes.
pub fn basis_dimension(modes: usize, particles: usize) -> usize {
    if modes == 0 {
        return usize::from(particles == 0);
    }
    // C(N + m - 1, m - 1), built incrementally so every intermediate is an integer.
    let k = modes - 1;
    (1..=k).fold(1usize, |acc, i| acc * (particles + i) / i)
}

/// All occupation vectors of `particles` bosons over `modes` modes, in reverse-lexicographic
/// order: `(2,0), (1,1), (0,2)`.
pub fn enumerate_basis(modes: usize, particles: usize) -> Result<Vec<FockState>> {
    if modes == 0 {
        return if particles == 0 {
            Ok(vec![FockState::new(Vec::new())])
        } else {
            Err(Error::NoModes { particles })
        };
    }
    let mut out = Vec::with_capacity(basis_dimension(modes, particles));
    let mut current = vec![0; modes];
    fill(&mut current, 0, particles, &mut out);
    Ok(out)
}

fn fill(current: &mut [usize], mode: usize, remaining: usize, out: &mut Vec<FockState>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(FockState::new(current.to_vec()));
        return;
    }
    for n in (0..=remaining).rev() {
        current[mode] = n;
        fill(current, mode + 1, remaining - n, out);
    }
    current[mode] = 0;
}

/// Enumerated basis together with its reverse index.
#[derive(Clone, Debug)]
pub struct FockBasis {
    modes: usize,
    particles: usize,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl FockBasis {
    pub fn new(modes: usize, particles: usize) -> Result<Self> {
        let states = enumerate_basis(modes, particles)?;
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(FockBasis {
            modes,
            particles,
            states,
            index,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> Option<&FockState> {
        self.states.get(index)
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Column vector `|state⟩` in this basis.
    pub fn ket(&self, state: &FockState) -> Result<nalgebra::DVector<C64>> {
        let i = self.index_of(state).ok_or_else(|| {
            Error::Config(format!(
                "{state} is not in the {}-mode, {}-particle basis",
                self.modes, self.particles
            ))
        })?;
        let mut v = nalgebra::DVector::zeros(self.dim());
        v[i] = C64::new(1.0, 0.0);
        Ok(v)
    }
}

/// Permanent `Σ_σ Π_i A[i, σ(i)]` of a square complex matrix. The empty matrix has permanent 1.
///
/// Small matrices are expanded directly; from 5×5 upward Ryser's inclusion-exclusion formula is
/// used, stepping through column subsets in Gray-code order.
pub fn permanent(a: &CMatrix) -> Result<C64> {
    check_square(a)?;
    if a.nrows() < RYSER_THRESHOLD {
        Ok(permanent_expand(a))
    } else {
        Ok(ryser_gray(a))
    }
}

/// Ryser's formula at any size. Exposed so it can be checked against the expansion on small inputs.
pub fn permanent_ryser(a: &CMatrix) -> Result<C64> {
    check_square(a)?;
    Ok(ryser_gray(a))
}

fn check_square(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

fn permanent_expand(a: &CMatrix) -> C64 {
    fn go(a: &CMatrix, row: usize, used: u32) -> C64 {
        if row == a.nrows() {
            return C64::new(1.0, 0.0);
        }
        let mut acc = C64::new(0.0, 0.0);
        for col in 0..a.ncols() {
            if used & (1 << col) == 0 {
                let x = a[(row, col)];
                if x != C64::new(0.0, 0.0) {
                    acc += x * go(a, row + 1, used | (1 << col));
                }
            }
        }
        acc
    }
    go(a, 0, 0)
}

/// `Per(A) = (-1)^n Σ_{S ⊆ cols} (-1)^|S| Π_i Σ_{j ∈ S} A[i, j]`
fn ryser_gray(a: &CMatrix) -> C64 {
    let n = a.nrows();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    assert!(n < 64, "permanent of a {n}x{n} matrix is out of reach");
    let mut row_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut subset: u64 = 0;
    for k in 1u64..(1u64 << n) {
        // Gray code k ^ (k >> 1) differs from its predecessor in bit trailing_zeros(k).
        let col = k.trailing_zeros() as usize;
        subset ^= 1 << col;
        if subset & (1 << col) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += a[(i, col)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(i, col)];
            }
        }
        let prod: C64 = row_sums.iter().product();
        if (n - subset.count_ones() as usize).is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    total
}

/// Beam-splitter reflectivity `r`; transmissivity is `1 - r`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Reflectivity(f64);

impl Reflectivity {
    pub const BALANCED: Reflectivity = Reflectivity(0.5);

    pub fn new(r: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&r) {
            Ok(Reflectivity(r))
        } else {
            Err(Error::Reflectivity(r))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn transmissivity(self) -> f64 {
        1.0 - self.0
    }
}

impl Default for Reflectivity {
    fn default() -> Self {
        Self::BALANCED
    }
}

/// `m × m` unitary acting on mode creation operators, `a†_i → Σ_j U[j, i] a†_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    matrix: CMatrix,
}

impl ModeUnitary {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let residual = unitarity_residual(&matrix);
        if residual > UNITARITY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(ModeUnitary { matrix })
    }

    pub fn identity(modes: usize) -> Self {
        ModeUnitary {
            matrix: CMatrix::identity(modes, modes),
        }
    }

    /// Haar-random unitary: QR of a complex Ginibre matrix with the phases of `R`'s diagonal
    /// folded back into `Q`.
    pub fn random<R: Rng + ?Sized>(modes: usize, rng: &mut R) -> Self {
        let z = CMatrix::from_fn(modes, modes, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            C64::new(re, im) / std::f64::consts::SQRT_2
        });
        let qr = z.qr();
        let mut q = qr.q();
        let r = qr.r();
        for j in 0..modes {
            let d = r[(j, j)];
            let phase = if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            };
            for i in 0..modes {
                q[(i, j)] *= phase;
            }
        }
        ModeUnitary { matrix: q }
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Matrix product `self · other`; apply `other` first.
    pub fn then_after(&self, other: &ModeUnitary) -> Result<ModeUnitary> {
        if self.modes() != other.modes() {
            return Err(Error::Dimension {
                expected: self.modes(),
                got: other.modes(),
            });
        }
        ModeUnitary::new(&self.matrix * &other.matrix)
    }

    pub fn adjoint(&self) -> ModeUnitary {
        ModeUnitary {
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Max-entry `|M†M - I|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let n = m.ncols();
    let g = m.adjoint() * m - CMatrix::identity(n, n);
    g.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Beam splitter on `ports = (i, j)`: identity except the block
/// `[[√t, i√r], [i√r, √t]]` on rows/columns `(i, j)`.
pub fn beam_splitter(r: Reflectivity, ports: (usize, usize), modes: usize) -> Result<ModeUnitary> {
    let (p, q) = ports;
    if p == q || p >= modes || q >= modes {
        return Err(Error::Ports(p, q, modes));
    }
    let t = C64::new(r.transmissivity().sqrt(), 0.0);
    let ir = C64::new(0.0, r.value().sqrt());
    let mut m = CMatrix::identity(modes, modes);
    m[(p, p)] = t;
    m[(q, q)] = t;
    m[(p, q)] = ir;
    m[(q, p)] = ir;
    ModeUnitary::new(m)
}

/// Operator on the `N`-boson Fock space over `m` modes, indexed by [`enumerate_basis`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    matrix: CMatrix,
    modes: usize,
    particles: usize,
}

impl FockOperator {
    pub fn new(matrix: CMatrix, modes: usize, particles: usize) -> Result<Self> {
        check_square(&matrix)?;
        let expected = basis_dimension(modes, particles);
        if matrix.nrows() != expected {
            return Err(Error::Dimension {
                expected,
                got: matrix.nrows(),
            });
        }
        Ok(FockOperator {
            matrix,
            modes,
            particles,
        })
    }

    /// Orthogonal projector onto the span of the given basis states.
    pub fn basis_projector<'a>(
        basis: &FockBasis,
        states: impl IntoIterator<Item = &'a FockState>,
    ) -> Result<Self> {
        let mut m = CMatrix::zeros(basis.dim(), basis.dim());
        for s in states {
            let i = basis
                .index_of(s)
                .ok_or_else(|| Error::Config(format!("{s} is not in the basis")))?;
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        FockOperator::new(m, basis.modes(), basis.particles())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn adjoint(&self) -> FockOperator {
        FockOperator {
            matrix: self.matrix.adjoint(),
            ..*self
        }
    }

    /// `self · other`
    pub fn compose(&self, other: &FockOperator) -> Result<FockOperator> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(FockOperator {
            matrix: &self.matrix * &other.matrix,
            ..*self
        })
    }

    /// `self · other - other · self`
    pub fn commutator(&self, other: &FockOperator) -> Result<CMatrix> {
        let ab = self.compose(other)?;
        let ba = other.compose(self)?;
        Ok(ab.matrix - ba.matrix)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `‖A†A - I‖_max`
    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    /// `‖A² - A‖_F`
    pub fn idempotence_residual(&self) -> f64 {
        (&self.matrix * &self.matrix - &self.matrix).norm()
    }

    /// `‖A† - A‖_F`
    pub fn hermiticity_residual(&self) -> f64 {
        (self.matrix.adjoint() - &self.matrix).norm()
    }

    /// `⟨ψ|A|ψ⟩`
    pub fn expectation(&self, psi: &nalgebra::DVector<C64>) -> C64 {
        psi.dotc(&(&self.matrix * psi))
    }
}

/// The permanent-based lift `Φ(U)` of a mode unitary to the `particles`-boson space.
pub fn lift_unitary(u: &ModeUnitary, particles: usize) -> Result<FockOperator> {
    let basis = FockBasis::new(u.modes(), particles)?;
    let d = basis.dim();
    let mode_lists: Vec<Vec<usize>> = basis.states().iter().map(FockState::mode_list).collect();
    let norms: Vec<f64> = basis
        .states()
        .iter()
        .map(|s| s.factorial_product().sqrt())
        .collect();
    let mut m = CMatrix::zeros(d, d);
    for (col, input) in mode_lists.iter().enumerate() {
        for (row, output) in mode_lists.iter().enumerate() {
            let sub = submatrix(u.matrix(), output, input);
            m[(row, col)] = permanent(&sub)? / (norms[row] * norms[col]);
        }
    }
    FockOperator::new(m, u.modes(), particles)
}

/// Single transition amplitude `⟨out|Φ(U)|in⟩`, from one permanent.
pub fn amplitude(u: &ModeUnitary, input: &FockState, output: &FockState) -> Result<C64> {
    for s in [input, output] {
        if s.modes() != u.modes() {
            return Err(Error::Dimension {
                expected: u.modes(),
                got: s.modes(),
            });
        }
    }
    if input.particles() != output.particles() {
        return Err(Error::ParticleNumber(input.particles(), output.particles()));
    }
    let sub = submatrix(u.matrix(), &output.mode_list(), &input.mode_list());
    let norm = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent(&sub)? / norm)
}

fn submatrix(u: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| u[(rows[i], cols[j])])
}
