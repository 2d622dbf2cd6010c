//! Eigenvalues, orthogonal idempotents and primary decompositions.
//!
//! For `m̂` with body characteristic polynomial `∏ (t − λᵢ)^{dᵢ}` and
//! `χ = ∏ (t − λᵢ)^{(s+1)dᵢ}`, the cofactors `gᵢ = χ / (t − λᵢ)^{(s+1)dᵢ}`
//! are coprime; Bezout coefficients with `Σ hᵢgᵢ = 1` give idempotents
//! `êᵢ = (hᵢgᵢ)(m̂)`.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::coeff::{Backend, Coefficient, GaussRational};
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::poly::{self, Poly};
use crate::supermatrix::{SuperMatrix, DEFAULT_TOLERANCE};

#[derive(Clone, Copy, Debug)]
pub struct SpectralOptions {
    /// Clustering radius and zero threshold on the numeric backend.
    pub tol: f64,
    /// Reject non-real body eigenvalues.
    pub require_real: bool,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions { tol: DEFAULT_TOLERANCE, require_real: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    UserSupplied,
    RationalRoots,
    NumericClustered,
}

/// Distinct body eigenvalues with algebraic multiplicities.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenData {
    eigenvalues: Vec<Coefficient>,
    multiplicities: Vec<usize>,
    provenance: Provenance,
}

impl EigenData {
    pub fn new(eigenvalues: Vec<Coefficient>, multiplicities: Vec<usize>, provenance: Provenance) -> Result<Self> {
        if eigenvalues.len() != multiplicities.len() {
            return Err(Error::EigenData("eigenvalue and multiplicity lists differ in length".into()));
        }
        if multiplicities.iter().any(|&d| d == 0) {
            return Err(Error::EigenData("multiplicities must be positive".into()));
        }
        for i in 0..eigenvalues.len() {
            for j in 0..i {
                if (&eigenvalues[i] - &eigenvalues[j]).is_zero() {
                    return Err(Error::EigenData(format!("eigenvalue {} is listed twice", eigenvalues[i])));
                }
            }
        }
        Ok(EigenData { eigenvalues, multiplicities, provenance })
    }

    pub fn eigenvalues(&self) -> &[Coefficient] {
        &self.eigenvalues
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Σ dᵢ
    pub fn rank(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// ∏ (t − λᵢ)^{dᵢ}
    pub fn body_charpoly(&self) -> Poly {
        let backend = self.eigenvalues.iter().fold(Backend::Exact, |b, l| b.join(l.backend()));
        let roots: Vec<(Coefficient, usize)> = self.eigenvalues.iter().cloned().zip(self.multiplicities.iter().copied()).collect();
        Poly::from_roots(&roots, backend)
    }

    pub fn is_real(&self) -> bool {
        self.eigenvalues.iter().all(Coefficient::is_real)
    }
}

/// Bezout coefficients `hᵢ` with `Σ hᵢgᵢ = 1`.
pub fn poly_bezout(gs: &[Poly]) -> Result<Vec<Poly>> {
    poly::bezout(gs)
}

/// Determines the distinct body eigenvalues of `m` with their multiplicities.
///
/// On the exact backend the body characteristic polynomial must split over
/// ℚ (or a hint must be given). On the numeric backend eigenvalues are
/// clustered; see [`cluster_radius`].
pub fn eigen_extract(m: &SuperMatrix, hint: Option<&EigenData>, opts: &SpectralOptions) -> Result<EigenData> {
    let body = m.body();
    let chi = body.charpoly()?;
    if let Some(h) = hint {
        return check_hint(h, &chi, m.backend(), opts);
    }
    match m.backend() {
        Backend::Exact => exact_eigen(&chi, opts),
        Backend::Numeric => numeric_eigen(&body, opts),
    }
}

fn check_hint(h: &EigenData, chi: &Poly, backend: Backend, opts: &SpectralOptions) -> Result<EigenData> {
    if backend == Backend::Exact && h.eigenvalues.iter().any(|l| l.backend() != Backend::Exact) {
        return Err(Error::EigenData("exact matrices need exact eigenvalue hints".into()));
    }
    if h.rank() != chi.degree() {
        return Err(Error::EigenData(format!("multiplicities sum to {}, matrix has rank {}", h.rank(), chi.degree())));
    }
    let diff = &h.body_charpoly().to_backend(backend) - chi;
    let scale = chi.coeffs().iter().map(Coefficient::abs).fold(1.0, f64::max);
    let consistent = match backend {
        Backend::Exact => diff.is_zero(),
        Backend::Numeric => diff.coeffs().iter().all(|c| c.abs() <= opts.tol * scale),
    };
    if !consistent {
        return Err(Error::EigenData(format!("hint does not reproduce the body characteristic polynomial {chi}")));
    }
    if opts.require_real && !h.is_real() {
        return Err(Error::NonRealSpectrum { matrix: 0 });
    }
    Ok(EigenData { provenance: Provenance::UserSupplied, ..h.clone() })
}

fn exact_eigen(chi: &Poly, opts: &SpectralOptions) -> Result<EigenData> {
    if !chi.has_real_coefficients() {
        // Some root is non-real, since a polynomial with only real roots has real coefficients.
        return Err(if opts.require_real { Error::NonRealSpectrum { matrix: 0 } } else { Error::NeedsHint { matrix: 0 } });
    }
    let roots = poly::rational_roots(chi)?;
    let found: usize = roots.iter().map(|(_, d)| d).sum();
    if found < chi.degree() {
        let known: Vec<(Coefficient, usize)> =
            roots.iter().map(|(r, d)| (Coefficient::from_rational(r.clone(), Backend::Exact), *d)).collect();
        let rest = chi.div_exact(&Poly::from_roots(&known, Backend::Exact));
        let distinct = rest.squarefree_part().degree();
        let real = poly::count_distinct_real_roots(&rest)?;
        return Err(if opts.require_real && real < distinct {
            Error::NonRealSpectrum { matrix: 0 }
        } else {
            Error::NeedsHint { matrix: 0 }
        });
    }
    let (eigenvalues, multiplicities) =
        roots.into_iter().map(|(r, d)| (Coefficient::from_rational(r, Backend::Exact), d)).unzip();
    EigenData::new(eigenvalues, multiplicities, Provenance::RationalRoots)
}

/// Radius within which numeric eigenvalues are merged.
///
/// A Jordan block of size `d` splits under perturbation `ε` into a ring of
/// radius about `ε^{1/d}`, so the radius grows with the matrix size.
pub fn cluster_radius(tol: f64, rank: usize, scale: f64) -> f64 {
    if rank <= 1 {
        return tol;
    }
    tol.max(8.0 * (f64::EPSILON * scale.max(1.0)).powf(1.0 / rank as f64))
}

fn numeric_eigen(body: &Mat, opts: &SpectralOptions) -> Result<EigenData> {
    let eigs = body.numeric_eigenvalues()?;
    let radius = cluster_radius(opts.tol, body.rows(), body.max_abs());
    let clusters = cluster(&eigs, radius);
    let mut eigenvalues = Vec::new();
    let mut multiplicities = Vec::new();
    for (mean, d) in clusters {
        let z = if mean.im.abs() <= radius { Complex64::new(mean.re, 0.0) } else { mean };
        if opts.require_real && z.im != 0.0 {
            return Err(Error::NonRealSpectrum { matrix: 0 });
        }
        eigenvalues.push(Coefficient::complex(z.re, z.im));
        multiplicities.push(d);
    }
    EigenData::new(eigenvalues, multiplicities, Provenance::NumericClustered)
}

/// Single-linkage clusters, ordered by the real and then imaginary part of their means.
fn cluster(eigs: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..i {
            if (eigs[i] - eigs[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
    for i in 0..n {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(eigs[i]);
    }
    let mut out: Vec<(Complex64, usize)> = groups
        .into_values()
        .map(|g| (g.iter().sum::<Complex64>() / g.len() as f64, g.len()))
        .collect();
    out.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    out
}

/// Orthogonal idempotents with eigenvalue labels.
#[derive(Clone, Debug)]
pub struct IdempotentSystem {
    labels: Vec<Vec<Coefficient>>,
    idempotents: Vec<SuperMatrix>,
    ranks: Vec<usize>,
}

impl IdempotentSystem {
    /// One label per idempotent: an eigenvalue, or a tuple for a commuting system.
    pub fn labels(&self) -> &[Vec<Coefficient>] {
        &self.labels
    }

    pub fn idempotents(&self) -> &[SuperMatrix] {
        &self.idempotents
    }

    /// Ranks of the free summands `êⱼÊ`.
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn len(&self) -> usize {
        self.idempotents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idempotents.is_empty()
    }

    /// Residual of `Σ ê = I`, `êᵢêⱼ = 0` and `ê² = ê`: `None` when all hold
    /// (exactly, or within `tol` on the numeric backend), else a description.
    pub fn axiom_violation(&self, tol: f64) -> Option<String> {
        let first = self.idempotents.first()?;
        let mut sum = SuperMatrix::zero(first.rank(), first.signature(), first.backend());
        for (i, e) in self.idempotents.iter().enumerate() {
            sum = &sum + e;
            if !(&(e * e) - e).vanishes(tol) {
                return Some(format!("idempotent {} does not square to itself", i + 1));
            }
            for (j, f) in self.idempotents.iter().enumerate() {
                if i != j && !(e * f).vanishes(tol) {
                    return Some(format!("idempotents {} and {} are not orthogonal", i + 1, j + 1));
                }
            }
        }
        let id = SuperMatrix::identity(first.rank(), first.signature(), first.backend());
        if !(&sum - &id).vanishes(tol) {
            return Some("idempotents do not sum to the identity".into());
        }
        None
    }
}

/// Exact stand-in for a numeric label, used for polynomial algebra.
fn exact_label(c: &Coefficient) -> Result<Coefficient> {
    match c {
        Coefficient::Exact(_) => Ok(c.clone()),
        Coefficient::Numeric(z) => {
            let re = BigRational::from_float(z.re);
            let im = BigRational::from_float(z.im);
            match (re, im) {
                (Some(re), Some(im)) => Ok(Coefficient::Exact(GaussRational::new(re, im))),
                _ => Err(Error::EigenData(format!("eigenvalue {c} is not finite"))),
            }
        }
    }
}

/// `ê_i = (hᵢgᵢ)(m̂)` for each eigenvalue of `e`.
pub fn idempotent_system(m: &SuperMatrix, e: &EigenData) -> Result<IdempotentSystem> {
    if e.rank() != m.rank() {
        return Err(Error::EigenData(format!("multiplicities sum to {}, matrix has rank {}", e.rank(), m.rank())));
    }
    if m.backend() == Backend::Exact && e.eigenvalues.iter().any(|l| l.backend() != Backend::Exact) {
        return Err(Error::EigenData("exact matrices need exact eigenvalues".into()));
    }
    let labels: Vec<Vec<Coefficient>> = e.eigenvalues.iter().map(|l| vec![l.clone()]).collect();
    if e.len() == 1 {
        let id = SuperMatrix::identity(m.rank(), m.signature(), m.backend());
        return Ok(IdempotentSystem { labels, idempotents: vec![id], ranks: e.multiplicities.clone() });
    }
    let power = (m.generators() as usize) + 1;
    let exact: Vec<Coefficient> = e.eigenvalues.iter().map(exact_label).collect::<Result<_>>()?;
    let factors: Vec<Poly> =
        exact.iter().zip(&e.multiplicities).map(|(l, d)| Poly::linear(l).pow((power * d) as u32)).collect();
    let chi = factors.iter().fold(Poly::one(Backend::Exact), |acc, f| &acc * f);
    let gs: Vec<Poly> = factors.iter().map(|f| chi.div_exact(f)).collect();
    let hs = poly_bezout(&gs)?;

    // Shared powers m̂^0, …, m̂^{deg χ − 1}.
    let mut powers = vec![SuperMatrix::identity(m.rank(), m.signature(), m.backend())];
    for _ in 1..chi.degree() {
        let next = powers.last().expect("nonempty") * m;
        powers.push(next);
    }
    let mut idempotents = Vec::with_capacity(gs.len());
    for (h, g) in hs.iter().zip(&gs) {
        let p = (h * g).rem(&chi)?.to_backend(m.backend());
        let mut acc = SuperMatrix::zero(m.rank(), m.signature(), m.backend());
        for (k, c) in p.coeffs().iter().enumerate() {
            if !c.is_zero() {
                acc = &acc + &powers[k].scale(c);
            }
        }
        idempotents.push(acc);
    }
    Ok(IdempotentSystem { labels, idempotents, ranks: e.multiplicities.clone() })
}

fn check_family(ms: &[SuperMatrix]) -> Result<&SuperMatrix> {
    let first = ms.first().ok_or_else(|| Error::Precondition("at least one matrix is required".into()))?;
    for (i, m) in ms.iter().enumerate() {
        if m.rank() != first.rank() {
            return Err(Error::Shape(format!("matrix {} has rank {}, expected {}", i + 1, m.rank(), first.rank())));
        }
        if m.signature() != first.signature() || m.backend() != first.backend() {
            return Err(Error::Structure(format!("matrix {} is over a different algebra or backend", i + 1)));
        }
    }
    Ok(first)
}

/// Checks that every pair in `ms` commutes.
pub fn require_commuting(ms: &[SuperMatrix], tol: f64) -> Result<()> {
    for i in 0..ms.len() {
        for j in 0..i {
            if !ms[j].commutes_with(&ms[i], tol)? {
                return Err(Error::Precondition(format!("matrices {} and {} do not commute", j + 1, i + 1)));
            }
        }
    }
    Ok(())
}

/// Nonzero products `ê_{1,j₁}⋯ê_{n,jₙ}` labelled by eigenvalue tuples, in
/// lexicographic order of `(j₁, …, jₙ)`.
pub fn joint_system(ms: &[SuperMatrix], eigen: &[EigenData], opts: &SpectralOptions) -> Result<IdempotentSystem> {
    let first = check_family(ms)?;
    if eigen.len() != ms.len() {
        return Err(Error::Shape(format!("{} eigen data for {} matrices", eigen.len(), ms.len())));
    }
    require_commuting(ms, opts.tol)?;
    let singles: Vec<IdempotentSystem> = ms.iter().zip(eigen).map(|(m, e)| idempotent_system(m, e)).collect::<Result<_>>()?;
    let id = SuperMatrix::identity(first.rank(), first.signature(), first.backend());
    let mut current: Vec<(Vec<Coefficient>, SuperMatrix)> = vec![(Vec::new(), id)];
    for sys in &singles {
        let mut next = Vec::new();
        for (label, e) in &current {
            for (l, f) in sys.labels.iter().zip(&sys.idempotents) {
                let p = e * f;
                // An idempotent with zero body is nilpotent, hence zero.
                if p.body().is_negligible(opts.tol) {
                    continue;
                }
                let mut lab = label.clone();
                lab.extend(l.iter().cloned());
                next.push((lab, p));
            }
        }
        current = next;
    }
    let ranks = current.iter().map(|(_, e)| e.body().rank(opts.tol)).collect();
    let (labels, idempotents) = current.into_iter().unzip();
    Ok(IdempotentSystem { labels, idempotents, ranks })
}

/// A basis adapted to the idempotent system and the conjugated matrices.
#[derive(Clone, Debug)]
pub struct PrimaryDecomposition {
    system: IdempotentSystem,
    basis: SuperMatrix,
    basis_inverse: SuperMatrix,
    offsets: Vec<usize>,
    conjugated: Vec<SuperMatrix>,
}

impl PrimaryDecomposition {
    pub fn system(&self) -> &IdempotentSystem {
        &self.system
    }

    /// `B`, whose columns are `êⱼ(ξ)` for body generalized eigenvectors `ξ`.
    pub fn basis(&self) -> &SuperMatrix {
        &self.basis
    }

    pub fn basis_inverse(&self) -> &SuperMatrix {
        &self.basis_inverse
    }

    /// `B⁻¹ m̂ᵢ B` for each input matrix.
    pub fn conjugated(&self) -> &[SuperMatrix] {
        &self.conjugated
    }

    /// First row/column of each block.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Block `j` of the conjugated matrix `i`.
    pub fn block(&self, i: usize, j: usize) -> SuperMatrix {
        let start = self.offsets[j];
        let idx: Vec<usize> = (start..start + self.system.ranks[j]).collect();
        self.conjugated[i].submatrix(&idx)
    }

    /// Whether the body of every block `j` of every matrix `i` has
    /// characteristic polynomial `(t − λⱼⁱ)^{rⱼ}`.
    pub fn block_spectra_hold(&self, tol: f64) -> Result<bool> {
        for i in 0..self.conjugated.len() {
            for j in 0..self.system.len() {
                let chi = self.block(i, j).body().charpoly()?;
                let lambda = &self.system.labels[j][i];
                let want = Poly::linear(lambda).pow(self.system.ranks[j] as u32);
                let diff = &chi - &want.to_backend(chi.backend().join(want.backend()));
                let ok = match diff.backend() {
                    Backend::Exact => diff.is_zero(),
                    Backend::Numeric => diff.coeffs().iter().all(|c| c.abs() <= tol),
                };
                if !ok {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Builds the adapted basis `B` and checks that `B⁻¹m̂ᵢB` is block diagonal.
pub fn primary_decomposition(system: &IdempotentSystem, ms: &[SuperMatrix], opts: &SpectralOptions) -> Result<PrimaryDecomposition> {
    let first = check_family(ms)?;
    let r = first.rank();
    let mut columns = Vec::with_capacity(r);
    let mut offsets = Vec::with_capacity(system.len());
    let bodies: Vec<Mat> = ms.iter().map(SuperMatrix::body).collect();
    for (j, (label, e)) in system.labels.iter().zip(&system.idempotents).enumerate() {
        if label.len() != ms.len() {
            return Err(Error::Shape(format!("label {} has {} entries for {} matrices", j + 1, label.len(), ms.len())));
        }
        let stacked: Vec<Mat> = bodies.iter().zip(label).map(|(b, l)| b.shift(l).pow(r as u32)).collect();
        let k = Mat::vstack(&stacked)?;
        let scale = stacked.iter().map(Mat::max_abs).fold(1.0, f64::max);
        let xi = k.nullspace(opts.tol * scale);
        if xi.len() != system.ranks[j] {
            return Err(Error::Inconsistent(format!(
                "generalized eigenspace for label {} has dimension {}, expected {}",
                j + 1,
                xi.len(),
                system.ranks[j]
            )));
        }
        offsets.push(columns.len());
        for v in &xi {
            columns.push(e.apply_to_scalars(v));
        }
    }
    if columns.len() != r {
        return Err(Error::Inconsistent(format!("blocks have total rank {}, expected {r}", columns.len())));
    }
    let basis = SuperMatrix::from_columns(columns)?;
    let basis_inverse = basis
        .invert()
        .map_err(|e| Error::Inconsistent(format!("adapted basis is not invertible ({e})")))?;
    let conjugated: Vec<SuperMatrix> = ms.iter().map(|m| &(&basis_inverse * m) * &basis).collect();
    let block_of = |k: usize| offsets.iter().rposition(|&o| o <= k).expect("offset 0 exists");
    for (i, c) in conjugated.iter().enumerate() {
        for a in 0..r {
            for b in 0..r {
                if block_of(a) == block_of(b) {
                    continue;
                }
                let x = c.entry(a, b);
                let vanishes = match x.backend() {
                    Backend::Exact => x.is_zero(),
                    Backend::Numeric => x.is_negligible(opts.tol * c.max_abs().max(1.0)),
                };
                if !vanishes {
                    return Err(Error::Inconsistent(format!(
                        "conjugated matrix {} has a nonzero entry ({}, {}) outside its diagonal blocks",
                        i + 1,
                        a + 1,
                        b + 1
                    )));
                }
            }
        }
    }
    Ok(PrimaryDecomposition { system: system.clone(), basis, basis_inverse, offsets, conjugated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::{AlgebraSignature, GrassmannElement};

    fn sig(s: u32) -> AlgebraSignature {
        AlgebraSignature::new(s).unwrap()
    }

    fn ex(n: i64) -> Coefficient {
        Coefficient::from_int(n, Backend::Exact)
    }

    fn opts() -> SpectralOptions {
        SpectralOptions::default()
    }

    /// [[1, θ¹], [0, 2]] over one generator.
    fn upper_with_theta() -> SuperMatrix {
        let s = sig(1);
        let c = |n| GrassmannElement::scalar(ex(n), s);
        let t = GrassmannElement::generator(1, s, Backend::Exact).unwrap();
        SuperMatrix::from_entries(2, vec![c(1), t, c(0), c(2)]).unwrap()
    }

    #[test]
    fn extraction_examples() {
        let m = SuperMatrix::from_ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]], sig(0));
        let e = eigen_extract(&m, None, &opts()).unwrap();
        assert_eq!(e.eigenvalues(), &[ex(1), ex(2)]);
        assert_eq!(e.multiplicities(), &[2, 1]);
        assert_eq!(e.provenance(), Provenance::RationalRoots);

        let rot = SuperMatrix::from_ints(&[&[0, 1], &[-1, 0]], sig(0));
        assert!(matches!(eigen_extract(&rot, None, &opts()), Err(Error::NonRealSpectrum { .. })));

        let sqrt2 = SuperMatrix::from_ints(&[&[0, 1], &[2, 0]], sig(0));
        assert!(matches!(eigen_extract(&sqrt2, None, &opts()), Err(Error::NeedsHint { .. })));
        assert!(matches!(eigen_extract(&sqrt2.to_numeric(), None, &opts()), Ok(e) if e.len() == 2));
    }

    #[test]
    fn hints_are_checked() {
        let m = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(0));
        let good = EigenData::new(vec![ex(2), ex(1)], vec![1, 1], Provenance::UserSupplied).unwrap();
        assert!(eigen_extract(&m, Some(&good), &opts()).is_ok());
        let bad = EigenData::new(vec![ex(1)], vec![2], Provenance::UserSupplied).unwrap();
        assert!(matches!(eigen_extract(&m, Some(&bad), &opts()), Err(Error::EigenData(_))));
    }

    #[test]
    fn diagonal_idempotents() {
        let m = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(0));
        let e = eigen_extract(&m, None, &opts()).unwrap();
        let sys = idempotent_system(&m, &e).unwrap();
        assert_eq!(sys.idempotents()[0], SuperMatrix::from_ints(&[&[1, 0], &[0, 0]], sig(0)));
        assert_eq!(sys.idempotents()[1], SuperMatrix::from_ints(&[&[0, 0], &[0, 1]], sig(0)));
    }

    #[test]
    fn single_eigenvalue_gives_identity() {
        let s = sig(2);
        let t12 = GrassmannElement::monomial(&[1, 2], ex(1), s).unwrap();
        let m = &SuperMatrix::scalar(&GrassmannElement::scalar(ex(5), s), 2) + &SuperMatrix::scalar(&t12, 2);
        let e = eigen_extract(&m, None, &opts()).unwrap();
        let sys = idempotent_system(&m, &e).unwrap();
        assert_eq!(sys.idempotents(), &[SuperMatrix::identity(2, s, Backend::Exact)]);
    }

    #[test]
    fn upper_triangular_with_odd_entry() {
        let m = upper_with_theta();
        let e = eigen_extract(&m, None, &opts()).unwrap();
        let sys = idempotent_system(&m, &e).unwrap();
        assert_eq!(sys.axiom_violation(0.0), None);
        let s = sig(1);
        let t = GrassmannElement::generator(1, s, Backend::Exact).unwrap();
        let c = |n| GrassmannElement::scalar(ex(n), s);
        let e1 = SuperMatrix::from_entries(2, vec![c(1), -&t, c(0), c(0)]).unwrap();
        assert_eq!(sys.idempotents()[0], e1);

        let pd = primary_decomposition(&sys, &[m.clone()], &opts()).unwrap();
        assert_eq!(pd.basis().body(), Mat::identity(2, Backend::Exact));
        let conj = &pd.conjugated()[0];
        assert!(conj.entry(0, 1).is_zero() && conj.entry(1, 0).is_zero());
        assert_eq!(conj.body(), Mat::from_ints(&[&[1, 0], &[0, 2]]));
        assert!(pd.block_spectra_hold(0.0).unwrap());
    }

    #[test]
    fn joint_labels() {
        let a = SuperMatrix::from_ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 2]], sig(0));
        let b = SuperMatrix::from_ints(&[&[3, 0, 0], &[0, 4, 0], &[0, 0, 4]], sig(0));
        let ms = [a, b];
        let eig: Vec<EigenData> = ms.iter().map(|m| eigen_extract(m, None, &opts()).unwrap()).collect();
        let sys = joint_system(&ms, &eig, &opts()).unwrap();
        let labels: Vec<Vec<Coefficient>> = [[1, 3], [1, 4], [2, 4]].iter().map(|l| l.iter().map(|&x| ex(x)).collect()).collect();
        assert_eq!(sys.labels(), labels.as_slice());
        assert_eq!(sys.ranks(), &[1, 1, 1]);
        let pd = primary_decomposition(&sys, &ms, &opts()).unwrap();
        assert_eq!(pd.offsets(), &[0, 1, 2]);

        let a = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(0));
        let b = SuperMatrix::from_ints(&[&[1, 0], &[0, 1]], sig(0));
        let ms = [a, b];
        let eig: Vec<EigenData> = ms.iter().map(|m| eigen_extract(m, None, &opts()).unwrap()).collect();
        let sys = joint_system(&ms, &eig, &opts()).unwrap();
        assert_eq!(sys.labels(), &[vec![ex(1), ex(1)], vec![ex(2), ex(1)]]);
    }

    #[test]
    fn joint_requires_commuting() {
        let a = SuperMatrix::from_ints(&[&[0, 1], &[0, 0]], sig(0));
        let b = SuperMatrix::from_ints(&[&[0, 0], &[1, 0]], sig(0));
        let ms = [a, b];
        let eig: Vec<EigenData> = ms.iter().map(|m| eigen_extract(m, None, &opts()).unwrap()).collect();
        assert!(matches!(joint_system(&ms, &eig, &opts()), Err(Error::Precondition(_))));
    }

    #[test]
    fn numeric_jordan_block_clusters() {
        let m = SuperMatrix::from_ints(&[&[2, 1, 0], &[0, 2, 1], &[0, 0, 2]], sig(0)).to_numeric();
        let e = eigen_extract(&m, None, &opts()).unwrap();
        assert_eq!(e.multiplicities(), &[3]);
        assert!((e.eigenvalues()[0].re_f64() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn numeric_idempotents_are_near_exact() {
        let m = upper_with_theta().to_numeric();
        let e = eigen_extract(&m, None, &opts()).unwrap();
        let sys = idempotent_system(&m, &e).unwrap();
        assert_eq!(sys.axiom_violation(1e-10), None);
        let pd = primary_decomposition(&sys, &[m], &opts()).unwrap();
        assert!(pd.block_spectra_hold(1e-9).unwrap());
    }
}
