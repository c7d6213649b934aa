//! Classical compact Lie algebras as matrix algebras.
//!
//! Every algebra is realized inside `u(N)` and carries a basis that is
//! orthonormal for the negative trace form `(A, B) = -tr(AB)`. With that
//! normalization the identification of `g` with `g*` is the identity on
//! coordinates, so a covector and an algebra element share one coordinate
//! vector.
//!
//! Basis ordering: root-space elements first, Cartan elements last.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{commutator, expm_anti_hermitian, trace_form, CMatrix, C64, I};

pub const MAX_RANK: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// `su(n+1)`
    A,
    /// `so(2n+1)`
    B,
    /// `sp(n)`
    C,
    /// `so(2n)`
    D,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
        }
    }

    fn min_rank(self) -> usize {
        match self {
            Family::D => 2,
            _ => 1,
        }
    }

    /// Size of the defining matrices.
    pub fn matrix_size(self, rank: usize) -> usize {
        match self {
            Family::A => rank + 1,
            Family::B => 2 * rank + 1,
            Family::C | Family::D => 2 * rank,
        }
    }

    pub fn dimension(self, rank: usize) -> usize {
        let n = rank;
        match self {
            Family::A => (n + 1) * (n + 1) - 1,
            Family::B => n * (2 * n + 1),
            Family::C => n * (2 * n + 1),
            Family::D => n * (2 * n - 1),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            other => Err(Error::UnsupportedFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Numerical thresholds used while constructing and checking an algebra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Structure-constant axioms (Jacobi, invariance, commutator agreement).
    pub structure: f64,
    /// Matrix dedup during group closure.
    pub dedup: f64,
    /// Relative singular-value threshold for rank decisions.
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structure: 1e-12,
            dedup: 1e-9,
            rank: 1e-9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieAlgebraSpec {
    pub family: Family,
    pub rank: usize,
    pub tolerances: Tolerances,
}

impl LieAlgebraSpec {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let spec = Self {
            family,
            rank,
            tolerances: Tolerances::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let min = self.family.min_rank();
        if self.rank < min || self.rank > MAX_RANK {
            return Err(Error::RankOutOfRange {
                family: self.family.letter(),
                rank: self.rank,
                min,
                max: MAX_RANK,
            });
        }
        Ok(())
    }

    /// `so(4)` splits as `su(2) + su(2)`.
    pub fn is_simple(&self) -> bool {
        !(self.family == Family::D && self.rank == 2)
    }

    /// Conventional name, e.g. `su(3)` or `so(8)`.
    pub fn name(&self) -> String {
        let n = self.rank;
        match self.family {
            Family::A => format!("su({})", n + 1),
            Family::B => format!("so({})", 2 * n + 1),
            Family::C => format!("sp({})", n),
            Family::D => format!("so({})", 2 * n),
        }
    }
}

/// Coordinates of an element of `g` in the orthonormal basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraElement(pub Vec<f64>);

/// Coordinates of an element of `g*` in the dual basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Covector(pub Vec<f64>);

impl Deref for AlgebraElement {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for Covector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AlgebraElement {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[k] = 1.0;
        Self(v)
    }

    pub fn to_covector(&self) -> Covector {
        Covector(self.0.clone())
    }
}

impl Covector {
    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn to_element(&self) -> AlgebraElement {
        AlgebraElement(self.0.clone())
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.0)
    }
}

/// One factor `exp(time * generator)` of a group element.
pub type WordFactor = (AlgebraElement, f64);

#[derive(Clone, Debug)]
pub struct LieAlgebraData {
    pub spec: LieAlgebraSpec,
    pub dim: usize,
    pub rank: usize,
    pub matrix_size: usize,
    pub basis: Vec<CMatrix>,
    /// Flat `dim^3` array, `c[(i * dim + j) * dim + k]`.
    structure_constants: Vec<f64>,
    /// Gram matrix of the basis under `-tr(AB)`, row-major.
    pub inner_product: Vec<f64>,
    /// Positions of the Cartan generators inside `basis`.
    pub cartan_indices: Vec<usize>,
}

/// Serializable descriptor of an algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub family: Family,
    pub rank: usize,
    pub dim: usize,
    pub structure_constants: Vec<f64>,
    pub inner_product: Vec<f64>,
}

fn unit(n: usize, j: usize, k: usize, z: C64) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(j, k)] = z;
    m
}

fn real(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

fn normalized(m: CMatrix) -> CMatrix {
    let s = trace_form(&m, &m).sqrt();
    m.map(|z| z / s)
}

fn su_basis(n: usize) -> (Vec<CMatrix>, Vec<usize>) {
    let mut basis = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            basis.push(normalized(unit(n, j, k, real(1.0)) - unit(n, k, j, real(1.0))));
            basis.push(normalized(unit(n, j, k, I) + unit(n, k, j, I)));
        }
    }
    let mut cartan = Vec::new();
    // generalized Gell-Mann diagonals: (1, ..., 1, -k, 0, ...) / sqrt(k(k+1))
    for k in 1..n {
        let mut m = CMatrix::zeros(n, n);
        for j in 0..k {
            m[(j, j)] = I;
        }
        m[(k, k)] = I * (-(k as f64));
        cartan.push(basis.len());
        basis.push(normalized(m));
    }
    (basis, cartan)
}

fn so_basis(m: usize) -> (Vec<CMatrix>, Vec<usize>) {
    let pairs = m / 2;
    let is_cartan = |j: usize, k: usize| j % 2 == 0 && k == j + 1 && j / 2 < pairs;
    let mut basis = Vec::new();
    for j in 0..m {
        for k in (j + 1)..m {
            if !is_cartan(j, k) {
                basis.push(normalized(unit(m, j, k, real(1.0)) - unit(m, k, j, real(1.0))));
            }
        }
    }
    let mut cartan = Vec::new();
    for c in 0..pairs {
        let (j, k) = (2 * c, 2 * c + 1);
        cartan.push(basis.len());
        basis.push(normalized(unit(m, j, k, real(1.0)) - unit(m, k, j, real(1.0))));
    }
    (basis, cartan)
}

/// `sp(n)` as `{[[X, Y], [-conj(Y), conj(X)]] : X in u(n), Y complex symmetric}`.
fn sp_basis(n: usize) -> (Vec<CMatrix>, Vec<usize>) {
    let size = 2 * n;
    let block = |x: &CMatrix, y: &CMatrix| {
        let mut a = CMatrix::zeros(size, size);
        a.view_mut((0, 0), (n, n)).copy_from(x);
        a.view_mut((0, n), (n, n)).copy_from(y);
        a.view_mut((n, 0), (n, n)).copy_from(&y.map(|z| -z.conj()));
        a.view_mut((n, n), (n, n)).copy_from(&x.map(|z| z.conj()));
        a
    };
    let zero = CMatrix::zeros(n, n);
    let mut basis = Vec::new();
    for j in 0..n {
        for k in (j + 1)..n {
            let x1 = unit(n, j, k, real(1.0)) - unit(n, k, j, real(1.0));
            let x2 = unit(n, j, k, I) + unit(n, k, j, I);
            let y1 = unit(n, j, k, real(1.0)) + unit(n, k, j, real(1.0));
            let y2 = unit(n, j, k, I) + unit(n, k, j, I);
            basis.push(normalized(block(&x1, &zero)));
            basis.push(normalized(block(&x2, &zero)));
            basis.push(normalized(block(&zero, &y1)));
            basis.push(normalized(block(&zero, &y2)));
        }
    }
    for j in 0..n {
        basis.push(normalized(block(&zero, &unit(n, j, j, real(1.0)))));
        basis.push(normalized(block(&zero, &unit(n, j, j, I))));
    }
    let mut cartan = Vec::new();
    for j in 0..n {
        cartan.push(basis.len());
        basis.push(normalized(block(&unit(n, j, j, I), &zero)));
    }
    (basis, cartan)
}

/// Builds the matrix realization, structure constants and Gram matrix.
pub fn build_algebra(spec: &LieAlgebraSpec) -> Result<LieAlgebraData> {
    spec.validate()?;
    let n = spec.rank;
    let size = spec.family.matrix_size(n);
    let (basis, cartan_indices) = match spec.family {
        Family::A => su_basis(size),
        Family::B | Family::D => so_basis(size),
        Family::C => sp_basis(n),
    };
    let dim = basis.len();
    debug_assert_eq!(dim, spec.family.dimension(n));

    let mut inner_product = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            inner_product[i * dim + j] = trace_form(&basis[i], &basis[j]);
        }
    }

    let mut c = vec![0.0; dim * dim * dim];
    for i in 0..dim {
        for j in (i + 1)..dim {
            let br = commutator(&basis[i], &basis[j]);
            for k in 0..dim {
                let v = trace_form(&br, &basis[k]);
                c[(i * dim + j) * dim + k] = v;
                c[(j * dim + i) * dim + k] = -v;
            }
        }
    }

    Ok(LieAlgebraData {
        spec: *spec,
        dim,
        rank: n,
        matrix_size: size,
        basis,
        structure_constants: c,
        inner_product,
        cartan_indices,
    })
}

impl LieAlgebraData {
    /// `c[i][j][k]` with `[e_i, e_j] = sum_k c[i][j][k] e_k`.
    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure_constants[(i * self.dim + j) * self.dim + k]
    }

    pub fn structure_constants(&self) -> &[f64] {
        &self.structure_constants
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    /// `sum_k x_k e_k`.
    pub fn matrix_of(&self, coords: &[f64]) -> CMatrix {
        let n = self.matrix_size;
        let mut m = CMatrix::zeros(n, n);
        for (x, e) in coords.iter().zip(&self.basis) {
            if *x != 0.0 {
                m += e.map(|z| z * *x);
            }
        }
        m
    }

    /// Orthogonal projection of a matrix onto the basis.
    pub fn coords_of(&self, m: &CMatrix) -> Vec<f64> {
        self.basis.iter().map(|e| trace_form(m, e)).collect()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += x[i] * self.inner_product[i * d + j] * y[j];
            }
        }
        acc
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(AlgebraElement(self.bracket_coords(x, y)))
    }

    pub(crate) fn bracket_coords(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let row = &self.structure_constants[(i * d + j) * d..(i * d + j + 1) * d];
                for k in 0..d {
                    out[k] += w * row[k];
                }
            }
        }
        out
    }

    /// Matrix of `ad_x` acting on coordinates: `(ad_x)[k][j] = sum_i x_i c[i][j][k]`.
    pub fn ad_matrix(&self, x: &[f64]) -> nalgebra::DMatrix<f64> {
        let d = self.dim;
        let mut m = nalgebra::DMatrix::zeros(d, d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                for k in 0..d {
                    m[(k, j)] += x[i] * self.c(i, j, k);
                }
            }
        }
        m
    }

    /// Group element `exp(t1 X1) ... exp(tk Xk)` as a unitary matrix.
    pub fn group_element(&self, word: &[WordFactor]) -> Result<CMatrix> {
        let n = self.matrix_size;
        let mut g = CMatrix::identity(n, n);
        for (x, t) in word {
            check_dim(self.dim, x.len())?;
            let m = self.matrix_of(x).map(|z| z * *t);
            g *= expm_anti_hermitian(&m);
        }
        Ok(g)
    }

    /// `Ad_g^dagger xi = xi o Ad_{g^-1}`, which under the invariant inner
    /// product is conjugation `g M g^-1` of the matrix realization.
    pub fn coadjoint_apply(&self, word: &[WordFactor], xi: &Covector) -> Result<Covector> {
        check_dim(self.dim, xi.len())?;
        if word.is_empty() {
            return Ok(xi.clone());
        }
        let g = self.group_element(word)?;
        let m = self.matrix_of(xi);
        let conj = &g * m * g.adjoint();
        Ok(Covector(self.coords_of(&conj)))
    }

    pub fn descriptor(&self) -> AlgebraDescriptor {
        AlgebraDescriptor {
            family: self.spec.family,
            rank: self.rank,
            dim: self.dim,
            structure_constants: self.structure_constants.clone(),
            inner_product: self.inner_product.clone(),
        }
    }

    /// Max Jacobi residual over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in (i + 1)..d {
                for k in (j + 1)..d {
                    for n in 0..d {
                        let mut s = 0.0;
                        for m in 0..d {
                            s += self.c(i, j, m) * self.c(m, k, n)
                                + self.c(j, k, m) * self.c(m, i, n)
                                + self.c(k, i, m) * self.c(m, j, n);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Max of `|<[e_i,e_j],e_k> + <e_j,[e_i,e_k]>|` over basis triples.
    pub fn invariance_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for m in 0..d {
                        s += self.c(i, j, m) * self.inner_product[m * d + k]
                            + self.inner_product[j * d + m] * self.c(i, k, m);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        worst
    }

    /// Largest deviation of `c[i][j][k] + c[j][i][k]` from zero.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    worst = worst.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Max deviation of the Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.inner_product[i * d + j] - target).abs());
            }
        }
        worst
    }
}
