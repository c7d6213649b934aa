//! Cartan subalgebra, roots, Weyl group, chamber machinery and the outer
//! automorphism group acting on `t*` and on the invariant coordinates.
//!
//! Vectors of `t*` are written in the coordinates dual to the orthonormal
//! Cartan basis, so the inner product on `t*` is the Euclidean one.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{AlgebraElement, Covector, LieAlgebraData, WordFactor};
use crate::error::{check_dim, Error, Result};
use crate::invariants::InvariantSet;
use crate::linalg::{self, dot, expm_anti_hermitian, norm};

const ROOT_TOL: f64 = 1e-9;
pub const WEYL_CLOSURE_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct CartanData {
    /// Orthonormal basis of the diagonal Cartan subalgebra.
    pub t_basis: Vec<AlgebraElement>,
}

impl CartanData {
    pub fn rank(&self) -> usize {
        self.t_basis.len()
    }

    /// Embeds `t*` into `g*` through the inner product.
    pub fn embed(&self, xi_t: &[f64]) -> Covector {
        let dim = self.t_basis[0].len();
        let mut out = vec![0.0; dim];
        for (x, h) in xi_t.iter().zip(&self.t_basis) {
            linalg::axpy(*x, h, &mut out);
        }
        Covector(out)
    }

    /// Orthogonal projection of `g*` onto `t*`.
    pub fn restrict(&self, xi: &[f64]) -> Vec<f64> {
        self.t_basis.iter().map(|h| dot(h, xi)).collect()
    }
}

/// The real two-plane `g ∩ (g_α ⊕ g_{-α})` of a positive root α.
///
/// `u` and `v` are orthonormal and satisfy `[H, u] = α(H) v`, `[H, v] = -α(H) u`
/// for every `H` in `t`, hence `[u, v] = |α| H_α` with `H_α` the unit vector along α.
#[derive(Clone, Debug, Serialize)]
pub struct RootPlane {
    pub root: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RootSystemData {
    pub rank: usize,
    /// All roots (positive ones first, then their negatives).
    pub roots: Vec<Vec<f64>>,
    pub positive_roots: Vec<Vec<f64>>,
    pub simple_roots: Vec<Vec<f64>>,
    pub cartan_matrix: Vec<Vec<i32>>,
    /// Root planes in the same order as `positive_roots`.
    #[serde(skip)]
    pub planes: Vec<RootPlane>,
    /// Index into `planes` for each simple root.
    #[serde(skip)]
    pub simple_planes: Vec<usize>,
}

fn lex_positive(v: &[f64]) -> bool {
    for x in v {
        if x.abs() > ROOT_TOL {
            return *x > 0.0;
        }
    }
    false
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > ROOT_TOL {
            return x.partial_cmp(y).unwrap();
        }
    }
    std::cmp::Ordering::Equal
}

/// Extracts `t`, the roots and the real root planes from the simultaneous
/// eigenspace decomposition of `ad(t)`.
pub fn compute_roots(alg: &LieAlgebraData) -> Result<(CartanData, RootSystemData)> {
    let dim = alg.dim;
    let l = alg.rank;
    let t_basis: Vec<AlgebraElement> = alg
        .cartan_indices
        .iter()
        .map(|&k| AlgebraElement::basis(dim, k))
        .collect();
    let cartan = CartanData { t_basis };

    let ads: Vec<DMatrix<f64>> = cartan.t_basis.iter().map(|h| alg.ad_matrix(h)).collect();
    for (a, h) in cartan.t_basis.iter().enumerate() {
        for h2 in &cartan.t_basis[a + 1..] {
            let br = alg.bracket_coords(h, h2);
            if norm(&br) > alg.spec.tolerances.structure {
                return Err(Error::CartanNotFound("Cartan generators do not commute".into()));
            }
        }
    }
    // centralizer of t = common kernel of ad(h_k)
    let mut stacked = DMatrix::zeros(l * dim, dim);
    for (a, m) in ads.iter().enumerate() {
        stacked.view_mut((a * dim, 0), (dim, dim)).copy_from(m);
    }
    let centralizer = dim - linalg::numerical_rank(&stacked, 1e-9);
    if centralizer != l {
        return Err(Error::CartanNotFound(format!(
            "centralizer has dimension {centralizer}, expected {l}"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let mut last_err = String::new();
    for _attempt in 0..8 {
        let coeffs: Vec<f64> = (0..l).map(|_| rng.random_range(0.5..1.5)).collect();
        match split_root_planes(&ads, &coeffs) {
            Ok(planes) => return Ok((cartan, assemble_roots(l, planes)?)),
            Err(e) => last_err = e,
        }
    }
    Err(Error::DegenerateEigenvalues(last_err))
}

fn split_root_planes(
    ads: &[DMatrix<f64>],
    coeffs: &[f64],
) -> std::result::Result<Vec<RootPlane>, String> {
    let dim = ads[0].nrows();
    let l = ads.len();
    let mut ad_h = DMatrix::zeros(dim, dim);
    for (c, m) in coeffs.iter().zip(ads) {
        ad_h += m * *c;
    }
    // ad(H) is skew; -ad(H)^2 is symmetric with eigenvalues α(H)^2, each twice
    let sq = -(&ad_h * &ad_h);
    let sq = (&sq + sq.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sq);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let scale = vals.last().cloned().unwrap_or(1.0).max(1.0);
    let gap_tol = 1e-7 * scale;
    for &v in &vals[..l] {
        if v.abs() > gap_tol {
            return Err("zero eigenspace has wrong dimension".into());
        }
    }
    if l < dim && vals[l] < gap_tol {
        return Err("zero eigenspace too large".into());
    }
    let rest = &order[l..];
    if rest.len() % 2 != 0 {
        return Err("odd number of root directions".into());
    }
    let mut planes = Vec::new();
    for pair in 0..rest.len() / 2 {
        let (a, b) = (rest[2 * pair], rest[2 * pair + 1]);
        let (va, vb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        if (va - vb).abs() > gap_tol {
            return Err(format!("unpaired eigenvalues {va} / {vb}"));
        }
        if 2 * pair + 2 < rest.len() {
            let next = eig.eigenvalues[rest[2 * pair + 2]];
            if (next - vb).abs() < 1e3 * gap_tol {
                return Err(format!("coincident root values {vb} / {next}"));
            }
        }
        let mut u: Vec<f64> = eig.eigenvectors.column(a).iter().cloned().collect();
        let v0: Vec<f64> = eig.eigenvectors.column(b).iter().cloned().collect();
        // re-derive v from u so that ad(H) u = α(H) v exactly in orientation
        let adu = linalg::mat_vec(&ad_h, &u);
        let w = norm(&adu);
        let mut v = linalg::scaled(&adu, 1.0 / w);
        if dot(&v, &v0).abs() < 0.5 {
            return Err("root plane not invariant".into());
        }
        let mut root: Vec<f64> = ads.iter().map(|m| dot(&v, &linalg::mat_vec(m, &u))).collect();
        // invariance of the plane under every ad(h_k)
        for (m, ak) in ads.iter().zip(&root) {
            let r1 = linalg::sub(&linalg::mat_vec(m, &u), &linalg::scaled(&v, *ak));
            let r2 = linalg::sub(&linalg::mat_vec(m, &v), &linalg::scaled(&u, -*ak));
            if norm(&r1) > 1e-8 || norm(&r2) > 1e-8 {
                return Err("ad(t) does not preserve a root plane".into());
            }
        }
        if !lex_positive(&root) {
            std::mem::swap(&mut u, &mut v);
            root.iter_mut().for_each(|x| *x = -*x);
        }
        planes.push(RootPlane { root, u, v });
    }
    Ok(planes)
}

fn assemble_roots(l: usize, mut planes: Vec<RootPlane>) -> Result<RootSystemData> {
    // deterministic order: decreasing lexicographic
    planes.sort_by(|a, b| lex_cmp(&b.root, &a.root));
    let positive: Vec<Vec<f64>> = planes.iter().map(|p| p.root.clone()).collect();
    let mut roots = positive.clone();
    roots.extend(positive.iter().map(|r| linalg::scaled(r, -1.0)));

    let is_sum = |r: &Vec<f64>| {
        positive.iter().any(|a| {
            let rest = linalg::sub(r, a);
            positive.iter().any(|b| linalg::max_abs_diff(&rest, b) < ROOT_TOL)
        })
    };
    let simple_planes: Vec<usize> = (0..positive.len()).filter(|&k| !is_sum(&positive[k])).collect();
    if simple_planes.len() != l {
        return Err(Error::CartanNotFound(format!(
            "found {} simple roots, expected {l}",
            simple_planes.len()
        )));
    }
    let simple_roots: Vec<Vec<f64>> = simple_planes.iter().map(|&k| positive[k].clone()).collect();
    let mut cartan_matrix = vec![vec![0i32; l]; l];
    for i in 0..l {
        for j in 0..l {
            let v = 2.0 * dot(&simple_roots[i], &simple_roots[j]) / dot(&simple_roots[j], &simple_roots[j]);
            let r = v.round();
            if (v - r).abs() > 1e-8 {
                return Err(Error::CartanNotFound(format!("non-integral Cartan entry {v}")));
            }
            cartan_matrix[i][j] = r as i32;
        }
    }
    Ok(RootSystemData {
        rank: l,
        roots,
        positive_roots: positive,
        simple_roots,
        cartan_matrix,
        planes,
        simple_planes,
    })
}

impl RootSystemData {
    /// Reflection `s_α` as an `l x l` matrix.
    pub fn reflection(&self, alpha: &[f64]) -> DMatrix<f64> {
        let l = self.rank;
        let aa = dot(alpha, alpha);
        DMatrix::from_fn(l, l, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            id - 2.0 * alpha[i] * alpha[j] / aa
        })
    }

    pub fn is_dominant(&self, v: &[f64], tol: f64) -> bool {
        self.simple_roots.iter().all(|a| dot(v, a) >= -tol)
    }

    /// Fundamental weights: `2<ω_i, α_j>/<α_j, α_j> = δ_ij`.
    pub fn fundamental_weights(&self) -> Vec<Vec<f64>> {
        let l = self.rank;
        let a = DMatrix::from_fn(l, l, |j, k| {
            let alpha = &self.simple_roots[j];
            2.0 * alpha[k] / dot(alpha, alpha)
        });
        let inv = a.try_inverse().expect("simple roots form a basis");
        (0..l).map(|i| inv.column(i).iter().cloned().collect()).collect()
    }

    /// True when `m` maps the root set onto itself.
    pub fn permutes_roots(&self, m: &DMatrix<f64>, tol: f64) -> bool {
        self.roots.iter().all(|r| {
            let img = linalg::mat_vec(m, r);
            self.roots.iter().any(|s| linalg::max_abs_diff(&img, s) < tol)
        })
    }
}

#[derive(Clone, Debug)]
pub struct WeylElement {
    pub matrix: DMatrix<f64>,
    /// Simple-reflection indices `(i1, ..., ir)` with `w = s_i1 ... s_ir`.
    pub word: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct WeylGroupData {
    /// Breadth-first closure order; element 0 is the identity.
    pub elements: Vec<WeylElement>,
    pub generators: Vec<DMatrix<f64>>,
}

impl WeylGroupData {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Index of the element equal to `m`, if any.
    pub fn find(&self, m: &DMatrix<f64>, tol: f64) -> Option<usize> {
        self.elements.iter().position(|e| (&e.matrix - m).amax() < tol)
    }
}

fn matrix_key(m: &DMatrix<f64>) -> Vec<i64> {
    m.iter().map(|x| (x * 1e6).round() as i64).collect()
}

/// Closure of the simple reflections.
pub fn weyl_group(rs: &RootSystemData) -> Result<WeylGroupData> {
    weyl_group_bounded(rs, WEYL_CLOSURE_LIMIT)
}

pub fn weyl_group_bounded(rs: &RootSystemData, limit: usize) -> Result<WeylGroupData> {
    let l = rs.rank;
    let generators: Vec<DMatrix<f64>> = rs.simple_roots.iter().map(|a| rs.reflection(a)).collect();
    let mut elements = vec![WeylElement {
        matrix: DMatrix::identity(l, l),
        word: vec![],
    }];
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    seen.insert(matrix_key(&elements[0].matrix), 0);
    let mut head = 0;
    while head < elements.len() {
        for (i, s) in generators.iter().enumerate() {
            let m = s * &elements[head].matrix;
            let key = matrix_key(&m);
            if let Some(&k) = seen.get(&key) {
                debug_assert!((&elements[k].matrix - &m).amax() < 1e-9);
                continue;
            }
            if elements.len() >= limit {
                return Err(Error::ClosureOverflow(limit));
            }
            let mut word = vec![i];
            word.extend_from_slice(&elements[head].word);
            seen.insert(key, elements.len());
            elements.push(WeylElement { matrix: m, word });
        }
        head += 1;
    }
    Ok(WeylGroupData { elements, generators })
}

/// Returns the index of the first Weyl element (closure order) mapping
/// `xi_t` into the closed dominant chamber, together with the image.
pub fn chamber_project(rs: &RootSystemData, weyl: &WeylGroupData, xi_t: &[f64]) -> (usize, Vec<f64>) {
    let tol = 1e-12 * norm(xi_t).max(1.0);
    for (k, w) in weyl.elements.iter().enumerate() {
        let img = linalg::mat_vec(&w.matrix, xi_t);
        if rs.is_dominant(&img, tol) {
            return (k, img);
        }
    }
    // unreachable for a genuine Weyl group; fold by simple reflections instead
    let mut v = xi_t.to_vec();
    loop {
        match rs.simple_roots.iter().find(|a| dot(&v, a) < -tol) {
            Some(a) => v = linalg::mat_vec(&rs.reflection(a), &v),
            None => return (0, v),
        }
    }
}

/// Result of conjugating a covector into the closed chamber.
#[derive(Clone, Debug)]
pub struct ChamberPoint {
    /// Closed-chamber representative in `t*` coordinates.
    pub xi_dom: Vec<f64>,
    /// `Ad_g^dagger(embed(xi_dom)) = xi` for `g` the product of this word.
    pub conjugator: Vec<WordFactor>,
    /// Weyl element used in the last folding step.
    pub weyl_index: usize,
    /// Remaining off-Cartan norm after diagonalization.
    pub off_diagonal: f64,
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// Conjugates `xi` into `t*` by cyclic Jacobi rotations inside the `su(2)`
/// subalgebras of the root planes, then folds the result into the closed
/// chamber with the Weyl element representatives `exp(π/|α| u_α)`.
pub fn to_chamber(
    alg: &LieAlgebraData,
    cartan: &CartanData,
    rs: &RootSystemData,
    weyl: &WeylGroupData,
    xi: &Covector,
) -> Result<ChamberPoint> {
    check_dim(alg.dim, xi.len())?;
    let total = xi.norm();
    let mut coords = xi.0.clone();
    let mut word: Vec<WordFactor> = Vec::new();
    let mut m = alg.matrix_of(&coords);
    let off = |c: &[f64]| -> f64 {
        rs.planes
            .iter()
            .map(|p| dot(c, &p.u).powi(2) + dot(c, &p.v).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let target = 1e-15 * total.max(f64::MIN_POSITIVE);
    let mut converged = total == 0.0;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if converged || off(&coords) <= target {
            converged = true;
            break;
        }
        for p in &rs.planes {
            let a = dot(&coords, &p.u);
            let b = dot(&coords, &p.v);
            let ab = a.hypot(b);
            if ab <= 1e-17 * total {
                continue;
            }
            let alen = norm(&p.root);
            let h_alpha = cartan.embed(&linalg::scaled(&p.root, 1.0 / alen));
            let c = dot(&coords, &h_alpha);
            let s = if c >= 0.0 { 1.0 } else { -1.0 };
            // rotate (a, b, c) onto the ±H_α axis about the axis s (b, -a, 0)
            let phi = ab.atan2(c.abs());
            let (nx, ny) = (s * b / ab, -s * a / ab);
            let mut gen = linalg::scaled(&p.u, nx);
            linalg::axpy(ny, &p.v, &mut gen);
            let t = phi / alen;
            let g = expm_anti_hermitian(&alg.matrix_of(&gen).map(|z| z * t));
            m = &g * &m * g.adjoint();
            coords = alg.coords_of(&m);
            word.push((AlgebraElement(gen), -t));
        }
    }
    let residual = off(&coords);
    if !converged && residual > 1e-12 * total.max(1.0) {
        return Err(Error::EigensolverFailure(format!(
            "Jacobi sweeps stalled with off-diagonal norm {residual:.3e}"
        )));
    }
    let xi_t = cartan.restrict(&coords);
    let (w_index, xi_dom) = chamber_project(rs, weyl, &xi_t);
    for &i in weyl.elements[w_index].word.iter().rev() {
        let plane = &rs.planes[rs.simple_planes[i]];
        let t = PI / norm(&plane.root);
        word.push((AlgebraElement(plane.u.clone()), -t));
    }
    Ok(ChamberPoint {
        xi_dom,
        conjugator: word,
        weyl_index: w_index,
        off_diagonal: residual,
    })
}

/// The matrix `π_ij(ξ) = Σ_k c[i][j][k] ξ_k`.
pub fn poisson_matrix(alg: &LieAlgebraData, xi: &[f64]) -> DMatrix<f64> {
    let d = alg.dim;
    let c = alg.structure_constants();
    DMatrix::from_fn(d, d, |i, j| {
        let row = &c[(i * d + j) * d..(i * d + j + 1) * d];
        dot(row, xi)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Regularity {
    pub regular: bool,
    pub leaf_dimension: usize,
}

/// Regular iff the leaf through `xi` has the maximal dimension `dim - rank`.
pub fn is_regular(alg: &LieAlgebraData, xi: &[f64]) -> Regularity {
    let pi = poisson_matrix(alg, xi);
    let rank = linalg::numerical_rank(&pi, alg.spec.tolerances.rank);
    Regularity {
        regular: rank == alg.dim - alg.rank,
        leaf_dimension: rank,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OuterElement {
    /// Image index of each simple root.
    pub permutation: Vec<usize>,
    #[serde(serialize_with = "serialize_matrix")]
    pub on_t: DMatrix<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub on_invariants: DMatrix<f64>,
    /// Least-squares residual of the induced action on `p'`.
    pub residual: f64,
}

pub(crate) fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().cloned().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

#[derive(Clone, Debug, Serialize)]
pub struct OuterGroupData {
    /// Chamber-preserving representatives, identity first.
    pub elements: Vec<OuterElement>,
}

impl OuterGroupData {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for k in 0..n {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Diagram automorphisms extended linearly to `t*`, with the induced linear
/// action on `p' = (p_2, ..., p_l)` fitted by least squares.
pub fn outer_group(rs: &RootSystemData, inv: &InvariantSet) -> Result<OuterGroupData> {
    let l = rs.rank;
    let simple = DMatrix::from_fn(l, l, |i, j| rs.simple_roots[j][i]);
    let simple_inv = simple.clone().try_inverse().ok_or_else(|| {
        Error::CartanNotFound("simple roots are linearly dependent".into())
    })?;
    let k = l - 1;
    let samples = (8 * k * k).max(24);
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_07e7);
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|_| (0..l).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();

    let mut elements = Vec::new();
    for perm in permutations(l) {
        let preserves = (0..l).all(|i| (0..l).all(|j| rs.cartan_matrix[perm[i]][perm[j]] == rs.cartan_matrix[i][j]));
        if !preserves {
            continue;
        }
        let image = DMatrix::from_fn(l, l, |i, j| rs.simple_roots[perm[j]][i]);
        let mut on_t = image * &simple_inv;
        if perm.iter().enumerate().all(|(i, p)| i == *p) {
            on_t = DMatrix::identity(l, l);
        }
        let ortho = (on_t.transpose() * &on_t - DMatrix::<f64>::identity(l, l)).amax();
        if ortho > 1e-10 {
            return Err(Error::CartanNotFound(format!(
                "diagram automorphism is not orthogonal (defect {ortho:.2e})"
            )));
        }
        let (on_invariants, residual) = if k == 0 {
            (DMatrix::zeros(0, 0), 0.0)
        } else if perm.iter().enumerate().all(|(i, p)| i == *p) {
            (DMatrix::identity(k, k), 0.0)
        } else {
            let p = DMatrix::from_fn(samples, k, |s, c| inv.q_prime(&points[s])[c]);
            let q = DMatrix::from_fn(samples, k, |s, c| {
                inv.q_prime(&linalg::mat_vec(&on_t, &points[s]))[c]
            });
            let mt = linalg::lstsq(&p, &q).ok_or(Error::NonlinearInducedAction { residual: f64::INFINITY })?;
            let resid = (&p * &mt - &q).amax() / q.amax().max(1.0);
            (mt.transpose(), resid)
        };
        if residual > 1e-9 {
            return Err(Error::NonlinearInducedAction { residual });
        }
        elements.push(OuterElement {
            permutation: perm,
            on_t,
            on_invariants,
            residual,
        });
    }
    Ok(OuterGroupData { elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_algebra, Family, LieAlgebraSpec};

    fn setup(f: Family, r: usize) -> (LieAlgebraData, CartanData, RootSystemData, WeylGroupData) {
        let alg = build_algebra(&LieAlgebraSpec::new(f, r).unwrap()).unwrap();
        let (c, rs) = compute_roots(&alg).unwrap();
        let w = weyl_group(&rs).unwrap();
        (alg, c, rs, w)
    }

    #[test]
    fn su3_roots_and_cartan_matrix() {
        let (_, _, rs, w) = setup(Family::A, 2);
        assert_eq!(rs.roots.len(), 6);
        assert_eq!(rs.simple_roots.len(), 2);
        assert_eq!(rs.cartan_matrix, vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(w.order(), 6);
    }

    #[test]
    fn su2_and_so5_counts() {
        let (_, _, rs, w) = setup(Family::A, 1);
        assert_eq!(rs.roots.len(), 2);
        assert_eq!(w.order(), 2);
        let (alg, _, rs, w) = setup(Family::B, 2);
        assert_eq!(rs.roots.len(), alg.dim - alg.rank);
        assert_eq!(rs.roots.len(), 8);
        assert_eq!(w.order(), 8);
    }

    #[test]
    fn root_planes_satisfy_su2_relations() {
        for (f, r) in [(Family::A, 3), (Family::B, 2), (Family::C, 3), (Family::D, 4)] {
            let (alg, cartan, rs, _) = setup(f, r);
            for p in &rs.planes {
                let br = alg.bracket_coords(&p.u, &p.v);
                let a = norm(&p.root);
                let h = cartan.embed(&linalg::scaled(&p.root, 1.0 / a));
                let expect = linalg::scaled(&h, a);
                assert!(linalg::max_abs_diff(&br, &expect) < 1e-12, "{f}{r}");
            }
        }
    }

    #[test]
    fn cartan_entries_are_allowed_values() {
        for (f, r) in [(Family::B, 3), (Family::C, 3), (Family::D, 4), (Family::A, 4)] {
            let (_, _, rs, _) = setup(f, r);
            for (i, row) in rs.cartan_matrix.iter().enumerate() {
                assert_eq!(row[i], 2);
                for v in row {
                    assert!([2, 0, -1, -2, -3].contains(v));
                }
            }
        }
    }

    #[test]
    fn closure_overflow_is_reported() {
        let (_, _, rs, _) = setup(Family::A, 3);
        assert_eq!(weyl_group_bounded(&rs, 10).unwrap_err(), Error::ClosureOverflow(10));
    }

    #[test]
    fn chamber_project_trivial_cases() {
        let (_, _, rs, w) = setup(Family::A, 2);
        let (k, v) = chamber_project(&rs, &w, &[0.0, 0.0]);
        assert_eq!(k, 0);
        assert_eq!(v, vec![0.0, 0.0]);
        let dom = [1.0, 0.1];
        assert!(rs.is_dominant(&dom, 0.0));
        let (k, v) = chamber_project(&rs, &w, &dom);
        assert_eq!(k, 0);
        assert_eq!(v, dom.to_vec());
    }

    #[test]
    fn regularity_examples() {
        let (alg, cartan, _, _) = setup(Family::A, 2);
        let r = is_regular(&alg, &vec![0.0; 8]);
        assert_eq!(r, Regularity { regular: false, leaf_dimension: 0 });
        // A(0) and the wall point A(π/6)
        let reg = is_regular(&alg, &cartan.embed(&[1.0, 0.0]));
        assert_eq!(reg, Regularity { regular: true, leaf_dimension: 6 });
        let th = PI / 6.0;
        let wall = is_regular(&alg, &cartan.embed(&[th.cos(), th.sin()]));
        assert_eq!(wall, Regularity { regular: false, leaf_dimension: 4 });
    }
}
