//! Maps from a superpoint `ℝ^{n|s₂}` into a matrix superpoint.
//!
//! An assignment sends the even coordinates `yⁱ` to commuting matrices `m̂ᵢ`
//! and the odd coordinates `ϑˡ` to anticommuting matrices `Θ_l` over
//! `Ĉ_[s₁]`. A smooth super-function `F = Σ_I f_I ϑ^I` then maps to
//!
//! ```text
//! φ(F) = Σ_I f_I(m̂₁, …, m̂ₙ) · Θ^I
//! ```
//!
//! where `f_I(m̂)` is a finite Taylor sum around each joint eigenvalue
//! `q_j`, restricted to the summand cut out by the idempotent `ê_j`.

use std::fmt;
use std::sync::OnceLock;

use serde::Serialize;

use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};
use crate::grassmann::{AlgebraSignature, Monomial};
use crate::jet_eval::{offset_monomials, taylor_sum};
use crate::smoothfn::{SmoothFunction, SuperFunction};
use crate::spectral::{self, EigenData, PrimaryDecomposition, SpectralOptions};
use crate::supermatrix::SuperMatrix;

/// Residual bound for samples involving non-polynomial functions.
pub const NUMERIC_RESIDUAL_BOUND: f64 = 1e-9;

/// Images of the coordinates of `ℝ^{n|s₂}`.
#[derive(Clone, Debug)]
pub struct AssignmentEta {
    s1: u32,
    r: usize,
    ys: Vec<SuperMatrix>,
    thetas: Vec<SuperMatrix>,
    hints: Vec<Option<EigenData>>,
}

impl AssignmentEta {
    /// Checks shapes only; the algebraic conditions are checked by [`validate`].
    pub fn new(ys: Vec<SuperMatrix>, thetas: Vec<SuperMatrix>) -> Result<Self> {
        let Some(first) = ys.first() else {
            return Err(Error::Shape("at least one even coordinate is required".into()));
        };
        let (r, sig, backend) = (first.rank(), first.signature(), first.backend());
        for (name, m) in ys.iter().enumerate().map(|(i, m)| (format!("y{}", i + 1), m)).chain(
            thetas.iter().enumerate().map(|(l, m)| (format!("theta{}", l + 1), m)),
        ) {
            if m.rank() != r {
                return Err(Error::Shape(format!("{name} has rank {}, expected {r}", m.rank())));
            }
            if m.signature() != sig {
                return Err(Error::Structure(format!("{name} is over Ĉ_[{}], expected Ĉ_[{}]", m.generators(), sig.generators())));
            }
            if m.backend() != backend {
                return Err(Error::Structure(format!("{name} is on the {:?} backend", m.backend())));
            }
        }
        let hints = vec![None; ys.len()];
        Ok(AssignmentEta { s1: sig.generators(), r, ys, thetas, hints })
    }

    /// Eigenvalue hint for `m̂ᵢ` (0-based `i`).
    pub fn with_hint(mut self, i: usize, hint: EigenData) -> Result<Self> {
        if i >= self.ys.len() {
            return Err(Error::Shape(format!("hint for y{} but n = {}", i + 1, self.ys.len())));
        }
        self.hints[i] = Some(hint);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.ys.len()
    }

    pub fn s1(&self) -> u32 {
        self.s1
    }

    pub fn s2(&self) -> u32 {
        self.thetas.len() as u32
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn ys(&self) -> &[SuperMatrix] {
        &self.ys
    }

    pub fn thetas(&self) -> &[SuperMatrix] {
        &self.thetas
    }

    pub fn hints(&self) -> &[Option<EigenData>] {
        &self.hints
    }

    pub fn backend(&self) -> Backend {
        self.ys[0].backend()
    }

    pub fn signature(&self) -> AlgebraSignature {
        self.ys[0].signature()
    }
}

/// Which relation of an assignment failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `[m̂ᵢ, m̂ⱼ] ≠ 0` (1-based).
    EvenPair(usize, usize),
    /// `[m̂ᵢ, Θ_l] ≠ 0`.
    EvenOdd(usize, usize),
    /// `Θ_lΘ_k + Θ_kΘ_l ≠ 0`, including `k = l`.
    OddPair(usize, usize),
    /// The body of `m̂ᵢ` has a non-real eigenvalue.
    NonRealSpectrum(usize),
    /// The body of `m̂ᵢ` has real eigenvalues that are not rational; a hint is needed.
    IrrationalSpectrum(usize),
    /// A supplied hint does not match `m̂ᵢ`.
    BadHint(usize, String),
}

impl Violation {
    /// 1 for the commutation relations, 2 for the spectral condition.
    pub fn condition(&self) -> u8 {
        match self {
            Violation::EvenPair(..) | Violation::EvenOdd(..) | Violation::OddPair(..) => 1,
            _ => 2,
        }
    }

    pub fn relation(&self) -> &'static str {
        match self {
            Violation::EvenPair(..) => "y-y commute",
            Violation::EvenOdd(..) => "y-theta commute",
            Violation::OddPair(..) => "theta-theta anticommute",
            Violation::NonRealSpectrum(_) => "real spectrum",
            Violation::IrrationalSpectrum(_) => "rational spectrum",
            Violation::BadHint(..) => "eigenvalue hint",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EvenPair(i, j) => write!(f, "y{i} and y{j} do not commute"),
            Violation::EvenOdd(i, l) => write!(f, "y{i} and theta{l} do not commute"),
            Violation::OddPair(k, l) if k == l => write!(f, "theta{k} does not square to zero"),
            Violation::OddPair(k, l) => write!(f, "theta{k} and theta{l} do not anticommute"),
            Violation::NonRealSpectrum(i) => write!(f, "body of y{i} has a non-real eigenvalue"),
            Violation::IrrationalSpectrum(i) => write!(f, "body of y{i} has irrational eigenvalues; supply a hint"),
            Violation::BadHint(i, why) => write!(f, "hint for y{i} rejected: {why}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidationReport {
    violations: Vec<Violation>,
    eigen: Vec<Option<EigenData>>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    /// Eigen data for each `m̂ᵢ` that passed the spectral check.
    pub fn eigen(&self) -> &[Option<EigenData>] {
        &self.eigen
    }
}

/// Checks commutation relations and real spectra. Exact on the exact
/// backend, within `opts.tol` on the numeric one.
pub fn validate(eta: &AssignmentEta, opts: &SpectralOptions) -> Result<ValidationReport> {
    let mut violations = Vec::new();
    let tol = opts.tol;
    for i in 0..eta.ys.len() {
        for j in i + 1..eta.ys.len() {
            if !eta.ys[i].commutes_with(&eta.ys[j], tol)? {
                violations.push(Violation::EvenPair(i + 1, j + 1));
            }
        }
    }
    for (i, y) in eta.ys.iter().enumerate() {
        for (l, t) in eta.thetas.iter().enumerate() {
            if !y.commutes_with(t, tol)? {
                violations.push(Violation::EvenOdd(i + 1, l + 1));
            }
        }
    }
    for k in 0..eta.thetas.len() {
        for l in k..eta.thetas.len() {
            if !eta.thetas[k].anticommutes_with(&eta.thetas[l], tol)? {
                violations.push(Violation::OddPair(k + 1, l + 1));
            }
        }
    }
    let opts = SpectralOptions { require_real: true, ..*opts };
    let mut eigen = Vec::with_capacity(eta.ys.len());
    for (i, (y, hint)) in eta.ys.iter().zip(&eta.hints).enumerate() {
        match spectral::eigen_extract(y, hint.as_ref(), &opts) {
            Ok(e) => eigen.push(Some(e)),
            Err(err) => {
                eigen.push(None);
                violations.push(match err {
                    Error::NonRealSpectrum { .. } => Violation::NonRealSpectrum(i + 1),
                    Error::NeedsHint { .. } => Violation::IrrationalSpectrum(i + 1),
                    Error::EigenData(why) => Violation::BadHint(i + 1, why),
                    other => return Err(other),
                });
            }
        }
    }
    Ok(ValidationReport { violations, eigen })
}

/// Precomputed data for one joint eigenvalue `q_j`.
#[derive(Clone, Debug)]
struct Block {
    /// `(m̂ᵢ − λ_jⁱ)ê_j` products grouped by degree, level 0 being `ê_j`.
    levels: Vec<Vec<(Vec<u32>, SuperMatrix)>>,
}

impl Block {
    fn to_numeric(&self) -> Block {
        let levels = self
            .levels
            .iter()
            .map(|l| l.iter().map(|(a, m)| (a.clone(), m.to_numeric())).collect())
            .collect();
        Block { levels }
    }
}

/// A built map, ready to evaluate super-functions.
#[derive(Debug)]
pub struct MapHandle {
    eta: AssignmentEta,
    opts: SpectralOptions,
    eigen: Vec<EigenData>,
    decomposition: PrimaryDecomposition,
    nilpotency: Vec<Vec<usize>>,
    blocks: Vec<Block>,
    numeric_blocks: OnceLock<Vec<Block>>,
    numeric_thetas: OnceLock<Vec<SuperMatrix>>,
}

/// Validates `eta` and caches its joint idempotents and primary decomposition.
pub fn build(eta: &AssignmentEta, opts: &SpectralOptions) -> Result<MapHandle> {
    let report = validate(eta, opts)?;
    if !report.passed() {
        let list: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(Error::Precondition(format!("assignment is invalid: {}", list.join("; "))));
    }
    let eigen: Vec<EigenData> = report.eigen.into_iter().map(|e| e.expect("validated")).collect();
    let system = spectral::joint_system(&eta.ys, &eigen, opts)?;
    let decomposition = spectral::primary_decomposition(&system, &eta.ys, opts)?;

    let mut nilpotency = Vec::with_capacity(system.len());
    let mut blocks = Vec::with_capacity(system.len());
    for (label, e) in system.labels().iter().zip(system.idempotents()) {
        let offsets: Vec<SuperMatrix> = eta.ys.iter().zip(label).map(|(m, l)| &m.shift(l) * e).collect();
        let nu: Vec<usize> = offsets.iter().map(|n| nilpotency_index(n, e, opts.tol)).collect();
        let cap = nu.iter().map(|v| v - 1).sum::<usize>() + 1;
        let levels = offset_monomials(e, &offsets, cap, opts.tol);
        nilpotency.push(nu);
        blocks.push(Block { levels });
    }
    Ok(MapHandle {
        eta: eta.clone(),
        opts: *opts,
        eigen,
        decomposition,
        nilpotency,
        blocks,
        numeric_blocks: OnceLock::new(),
        numeric_thetas: OnceLock::new(),
    })
}

/// Smallest `k ≥ 1` with `nᵏ = 0`, where `n` lives in the summand of `e`.
fn nilpotency_index(n: &SuperMatrix, e: &SuperMatrix, tol: f64) -> usize {
    if e.vanishes(tol) {
        return 1;
    }
    let mut k = 1;
    let mut p = n.clone();
    // Bounded by the block's characteristic polynomial; the guard only stops runaway numeric cases.
    let limit = n.rank() * (n.generators() as usize + 1) + 1;
    while !p.vanishes(tol) && k < limit {
        p = &p * n;
        k += 1;
    }
    k
}

impl MapHandle {
    pub fn eta(&self) -> &AssignmentEta {
        &self.eta
    }

    pub fn eigen(&self) -> &[EigenData] {
        &self.eigen
    }

    pub fn decomposition(&self) -> &PrimaryDecomposition {
        &self.decomposition
    }

    /// Joint eigenvalues `q_j`.
    pub fn points(&self) -> &[Vec<Coefficient>] {
        self.decomposition.system().labels()
    }

    /// `ν_jⁱ`, indexed `[j][i]`.
    pub fn nilpotency(&self) -> &[Vec<usize>] {
        &self.nilpotency
    }

    /// Highest degree `N_j` of a nonvanishing offset product at `q_j`.
    pub fn taylor_degree(&self, j: usize) -> usize {
        self.blocks[j].levels.len() - 1
    }

    fn blocks_for(&self, backend: Backend) -> &[Block] {
        if backend == self.eta.backend() {
            &self.blocks
        } else {
            self.numeric_blocks.get_or_init(|| self.blocks.iter().map(Block::to_numeric).collect())
        }
    }

    fn thetas_for(&self, backend: Backend) -> &[SuperMatrix] {
        if backend == self.eta.backend() {
            &self.eta.thetas
        } else {
            self.numeric_thetas.get_or_init(|| self.eta.thetas.iter().map(SuperMatrix::to_numeric).collect())
        }
    }

    /// `f(m̂₁, …, m̂ₙ)` for a smooth function of arity `n`.
    pub fn apply_even(&self, f: &SmoothFunction) -> Result<SuperMatrix> {
        let n = self.eta.n();
        if f.arity() != n {
            return Err(Error::Shape(format!("function of arity {} for n = {n}", f.arity())));
        }
        let backend = self.eta.backend().join(f.backend());
        self.apply_even_on(f, backend)
    }

    fn apply_even_on(&self, f: &SmoothFunction, backend: Backend) -> Result<SuperMatrix> {
        let zero = SuperMatrix::zero(self.eta.r, self.eta.signature(), backend);
        let mut acc = zero.clone();
        for (q, block) in self.points().iter().zip(self.blocks_for(backend)) {
            let order = (block.levels.len() - 1) as u32;
            let jets = f.jets(q, order).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("at q = {}: {msg}", fmt_tuple(q))),
                other => other,
            })?;
            let part = taylor_sum(&zero, &block.levels, |alpha| jets.taylor(alpha).to_backend(backend));
            acc = &acc + &part;
        }
        Ok(acc)
    }

    /// `Θ^I = Θ_{i₁}⋯Θ_{i_k}` with ascending indices.
    fn theta_monomial(&self, m: Monomial, backend: Backend) -> SuperMatrix {
        let thetas = self.thetas_for(backend);
        let mut acc = SuperMatrix::identity(self.eta.r, self.eta.signature(), backend);
        for l in m.indices() {
            acc = &acc * &thetas[(l - 1) as usize];
        }
        acc
    }

    /// `φ(F) = Σ_I f_I(m̂)·Θ^I`.
    ///
    /// Exact when the assignment is exact and every component is a
    /// polynomial; otherwise the whole evaluation runs numerically.
    pub fn apply(&self, f: &SuperFunction) -> Result<SuperMatrix> {
        if f.n() != self.eta.n() || f.s2() != self.eta.s2() {
            return Err(Error::Shape(format!(
                "function on ℝ^{{{}|{}}} for a map from ℝ^{{{}|{}}}",
                f.n(),
                f.s2(),
                self.eta.n(),
                self.eta.s2()
            )));
        }
        let backend = f.components().fold(self.eta.backend(), |b, (_, c)| b.join(c.backend()));
        let mut acc = SuperMatrix::zero(self.eta.r, self.eta.signature(), backend);
        for (m, c) in f.components() {
            let even = self.apply_even_on(c, backend)?;
            let term = if m.0 == 0 { even } else { &even * &self.theta_monomial(*m, backend) };
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Worst additive and multiplicative residuals over `pairs`.
    pub fn verify_homomorphism(&self, pairs: &[(SuperFunction, SuperFunction)]) -> Result<HomomorphismReport> {
        let mut report = HomomorphismReport::default();
        for (f, g) in pairs {
            let exact = self.eta.backend() == Backend::Exact && f.is_polynomial() && g.is_polynomial();
            let (pf, pg) = (self.apply(f)?, self.apply(g)?);
            let sum = &self.apply(&f.add(g)?)? - &(&pf + &pg);
            let prod = &self.apply(&f.mul(g)?)? - &(&pf * &pg);
            let (add, mul) = (sum.max_abs(), prod.max_abs());
            report.samples += 1;
            report.max_additive = report.max_additive.max(add);
            report.max_multiplicative = report.max_multiplicative.max(mul);
            if exact {
                report.exact_samples += 1;
                if !sum.is_zero() || !prod.is_zero() {
                    report.exact_failures += 1;
                }
            } else if add > NUMERIC_RESIDUAL_BOUND || mul > NUMERIC_RESIDUAL_BOUND {
                report.numeric_failures += 1;
            }
        }
        Ok(report)
    }

    pub fn spectral_locus(&self) -> SpectralLocusReport {
        let s1 = self.eta.s1 as usize;
        let r = self.eta.r;
        let ranks = self.decomposition.system().ranks();
        let points: Vec<LocusPoint> = self
            .points()
            .iter()
            .enumerate()
            .map(|(j, q)| LocusPoint {
                q: q.clone(),
                rank: ranks[j],
                nilpotency: self.nilpotency[j].clone(),
                taylor_degree: self.taylor_degree(j),
            })
            .collect();
        let within_block_bound = points.iter().all(|p| p.nilpotency.iter().all(|&v| v <= p.rank * (s1 + 1)));
        let within_caption_bound = points.iter().all(|p| p.nilpotency.iter().all(|&v| v <= (r - 1) * (s1 + 1)));
        SpectralLocusReport { r, s1: self.eta.s1, points, within_block_bound, within_caption_bound }
    }

    pub fn options(&self) -> &SpectralOptions {
        &self.opts
    }
}

fn fmt_tuple(q: &[Coefficient]) -> String {
    let parts: Vec<String> = q.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HomomorphismReport {
    pub samples: usize,
    pub exact_samples: usize,
    pub max_additive: f64,
    pub max_multiplicative: f64,
    /// Polynomial samples on the exact backend with a nonzero residual.
    pub exact_failures: usize,
    /// Other samples with a residual above [`NUMERIC_RESIDUAL_BOUND`].
    pub numeric_failures: usize,
}

impl HomomorphismReport {
    pub fn passed(&self) -> bool {
        self.exact_failures == 0 && self.numeric_failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocusPoint {
    pub q: Vec<Coefficient>,
    pub rank: usize,
    /// `ν_jⁱ` for each coordinate.
    pub nilpotency: Vec<usize>,
    pub taylor_degree: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralLocusReport {
    pub r: usize,
    pub s1: u32,
    pub points: Vec<LocusPoint>,
    /// `ν_jⁱ ≤ r_j(s₁+1)` for all `i, j`.
    pub within_block_bound: bool,
    /// `ν_jⁱ ≤ (r−1)(s₁+1)` for all `i, j`.
    pub within_caption_bound: bool,
}

impl SpectralLocusReport {
    pub fn rank_sum(&self) -> usize {
        self.points.iter().map(|p| p.rank).sum()
    }

    /// `(q_j, r_j)` for each point: the pushforward of the fundamental module.
    pub fn pushforward(&self) -> Vec<(Vec<Coefficient>, usize)> {
        self.points.iter().map(|p| (p.q.clone(), p.rank)).collect()
    }
}

impl fmt::Display for SpectralLocusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.points.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            let nu = if p.nilpotency.len() == 1 {
                p.nilpotency[0].to_string()
            } else {
                let parts: Vec<String> = p.nilpotency.iter().map(ToString::to_string).collect();
                format!("({})", parts.join(", "))
            };
            write!(f, "q={}: rank {}, ν={}", fmt_tuple(&p.q), p.rank, nu)?;
        }
        f.write_str("}")
    }
}

/// Evaluates smooth functions on a commuting family `Λ = (r₁, …, r_l)`.
#[derive(Debug)]
pub struct CInftyHull {
    handle: MapHandle,
}

impl CInftyHull {
    pub fn new(lambda: &[SuperMatrix], opts: &SpectralOptions) -> Result<Self> {
        if lambda.is_empty() {
            return Err(Error::Precondition("the family is empty".into()));
        }
        spectral::require_commuting(lambda, opts.tol)?;
        let eta = AssignmentEta::new(lambda.to_vec(), Vec::new())?;
        let report = validate(&eta, opts)?;
        if let Some(v) = report.violations().first() {
            return Err(match v {
                Violation::NonRealSpectrum(i) => Error::NonRealSpectrum { matrix: *i },
                Violation::IrrationalSpectrum(i) => Error::NeedsHint { matrix: *i },
                other => Error::Precondition(other.to_string()),
            });
        }
        Ok(CInftyHull { handle: build(&eta, opts)? })
    }

    pub fn family(&self) -> &[SuperMatrix] {
        self.handle.eta.ys()
    }

    /// `f(r₁, …, r_l)`.
    pub fn eval(&self, f: &SmoothFunction) -> Result<SuperMatrix> {
        self.handle.apply_even(f)
    }

    pub fn handle(&self) -> &MapHandle {
        &self.handle
    }
}

pub fn cinfty_hull_eval(lambda: &[SuperMatrix], f: &SmoothFunction, opts: &SpectralOptions) -> Result<SuperMatrix> {
    CInftyHull::new(lambda, opts)?.eval(f)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub name: &'static str,
    /// Largest entry of any residual matrix.
    pub residual: f64,
    /// Whether the check was decided exactly.
    pub exact: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub checks: Vec<AxiomCheck>,
}

impl AdmissibilityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Tally {
    residual: f64,
    nonzero: bool,
}

impl Tally {
    fn new() -> Self {
        Tally { residual: 0.0, nonzero: false }
    }

    fn push(&mut self, m: &SuperMatrix) {
        self.residual = self.residual.max(m.max_abs());
        self.nonzero |= !m.is_zero();
    }

    fn finish(self, axiom: u8, name: &'static str, exact: bool) -> AxiomCheck {
        let passed = if exact { !self.nonzero } else { self.residual <= NUMERIC_RESIDUAL_BOUND };
        AxiomCheck { axiom, name, residual: self.residual, exact, passed }
    }
}

/// Sample-based check of the four admissibility conditions on `Λ`:
/// outputs commute with `Λ`, outputs commute with each other, nested
/// evaluation agrees with composition, and projections return `Λ`.
///
/// Composition is tested for each sample `g` against the inner tuples
/// `(f_k, f_{k+1}, …)` taken cyclically from the samples.
pub fn check_admissibility_axioms(
    lambda: &[SuperMatrix],
    samples: &[SmoothFunction],
    opts: &SpectralOptions,
) -> Result<AdmissibilityReport> {
    let hull = CInftyHull::new(lambda, opts)?;
    let l = lambda.len();
    if let Some(f) = samples.iter().find(|f| f.arity() != l) {
        return Err(Error::Shape(format!("sample {f} has arity {}, expected {l}", f.arity())));
    }
    let exact = lambda[0].backend() == Backend::Exact && samples.iter().all(SmoothFunction::is_polynomial);
    let outputs: Vec<SuperMatrix> = samples.iter().map(|f| hull.eval(f)).collect::<Result<_>>()?;

    let mut with_family = Tally::new();
    for out in &outputs {
        for m in lambda {
            with_family.push(&out.commutator(&m.to_backend(out.backend()))?);
        }
    }
    let mut mutual = Tally::new();
    for a in &outputs {
        for b in &outputs {
            mutual.push(&a.commutator(b)?);
        }
    }
    let mut coherence = Tally::new();
    let count = samples.len();
    for g in samples {
        for k in 0..count {
            let idx: Vec<usize> = (0..l).map(|i| (k + i) % count).collect();
            let inner: Vec<SmoothFunction> = idx.iter().map(|&i| samples[i].clone()).collect();
            let direct = hull.eval(&g.compose(&inner)?)?;
            let inner_values: Vec<SuperMatrix> = idx.iter().map(|&i| outputs[i].clone()).collect();
            let nested = CInftyHull::new(&inner_values, opts)?.eval(g)?;
            let b = direct.backend().join(nested.backend());
            coherence.push(&(&direct.to_backend(b) - &nested.to_backend(b)));
        }
    }
    let mut projection = Tally::new();
    for (j, m) in lambda.iter().enumerate() {
        projection.push(&(&hull.eval(&SmoothFunction::projection(j, l))? - m));
    }
    let exact_projection = lambda[0].backend() == Backend::Exact;
    Ok(AdmissibilityReport {
        checks: vec![
            with_family.finish(1, "commutes with family", exact),
            mutual.finish(2, "outputs commute", exact),
            coherence.finish(3, "composition coherence", exact),
            projection.finish(4, "projection normalization", exact_projection),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::GrassmannElement;
    use crate::jet_eval::eval_even;

    fn sig(s: u32) -> AlgebraSignature {
        AlgebraSignature::new(s).unwrap()
    }

    fn ex(n: i64) -> Coefficient {
        Coefficient::from_int(n, Backend::Exact)
    }

    fn opts() -> SpectralOptions {
        SpectralOptions::default()
    }

    fn even(src: &str, n: usize, s2: u32) -> SuperFunction {
        SuperFunction::even(SmoothFunction::parse(src, n).unwrap(), s2)
    }

    /// `3 + θ¹θ²` as a 1×1 matrix over Ĉ_[2].
    fn scalar_three() -> (GrassmannElement, SuperMatrix) {
        let x = &GrassmannElement::scalar(ex(3), sig(2)) + &GrassmannElement::monomial(&[1, 2], ex(1), sig(2)).unwrap();
        let m = SuperMatrix::scalar(&x, 1);
        (x, m)
    }

    #[test]
    fn validation_examples() {
        let diag = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(0));
        let eta = AssignmentEta::new(vec![diag.clone()], vec![]).unwrap();
        assert!(validate(&eta, &opts()).unwrap().passed());

        let eta = AssignmentEta::new(vec![diag.clone()], vec![SuperMatrix::identity(2, sig(0), Backend::Exact)]).unwrap();
        let report = validate(&eta, &opts()).unwrap();
        assert_eq!(report.violations(), &[Violation::OddPair(1, 1)]);

        let rot = SuperMatrix::from_ints(&[&[0, 1], &[-1, 0]], sig(0));
        let eta = AssignmentEta::new(vec![rot], vec![]).unwrap();
        assert_eq!(validate(&eta, &opts()).unwrap().violations(), &[Violation::NonRealSpectrum(1)]);
    }

    #[test]
    fn build_examples() {
        let a = SuperMatrix::from_ints(&[&[1, 0, 0], &[0, 2, 0], &[0, 0, 1]], sig(0));
        let b = SuperMatrix::from_ints(&[&[5, 0, 0], &[0, 5, 0], &[0, 0, 5]], sig(0));
        let h = build(&AssignmentEta::new(vec![a, b], vec![]).unwrap(), &opts()).unwrap();
        assert_eq!(h.points(), &[vec![ex(1), ex(5)], vec![ex(2), ex(5)]]);

        let nil = SuperMatrix::from_ints(&[&[0, 1], &[0, 0]], sig(0));
        let h = build(&AssignmentEta::new(vec![nil], vec![]).unwrap(), &opts()).unwrap();
        assert_eq!(h.points(), &[vec![ex(0)]]);
        assert_eq!(h.nilpotency(), &[vec![2]]);
    }

    #[test]
    fn generators_map_to_assignment() {
        let s = sig(1);
        let t = GrassmannElement::generator(1, s, Backend::Exact).unwrap();
        let zero = GrassmannElement::zero(s, Backend::Exact);
        let y = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], s);
        let theta = SuperMatrix::from_entries(2, vec![t.clone(), zero.clone(), zero, t]).unwrap();
        let eta = AssignmentEta::new(vec![y.clone()], vec![theta.clone()]).unwrap();
        let h = build(&eta, &opts()).unwrap();
        assert_eq!(h.apply(&SuperFunction::y(1, 1, 1)).unwrap(), y);
        assert_eq!(h.apply(&SuperFunction::theta(1, 1, 1).unwrap()).unwrap(), theta);
    }

    #[test]
    fn scalar_square_matches_eval_even() {
        let (x, m) = scalar_three();
        let h = build(&AssignmentEta::new(vec![m], vec![]).unwrap(), &opts()).unwrap();
        let got = h.apply(&even("y1^2", 1, 0)).unwrap();
        let want = eval_even(&SmoothFunction::parse("y1^2", 1).unwrap(), &[x]).unwrap();
        assert_eq!(got, SuperMatrix::scalar(&want, 1));
        assert_eq!(h.spectral_locus().to_string(), "{q=(3): rank 1, ν=2}");
    }

    #[test]
    fn exp_of_nilpotent() {
        let nil = SuperMatrix::from_ints(&[&[0, 1], &[0, 0]], sig(0));
        let h = build(&AssignmentEta::new(vec![nil.clone()], vec![]).unwrap(), &opts()).unwrap();
        let got = h.apply(&even("exp(y1)", 1, 0)).unwrap();
        let want = &SuperMatrix::identity(2, sig(0), Backend::Exact) + &nil;
        assert!((&got - &want.to_numeric()).max_abs() < 1e-12);
        assert_eq!(h.spectral_locus().to_string(), "{q=(0): rank 2, ν=2}");
    }

    #[test]
    fn diagonal_locus() {
        let d = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(0));
        let h = build(&AssignmentEta::new(vec![d], vec![]).unwrap(), &opts()).unwrap();
        let locus = h.spectral_locus();
        assert_eq!(locus.to_string(), "{q=(1): rank 1, ν=1; q=(2): rank 1, ν=1}");
        assert_eq!(locus.rank_sum(), 2);
        assert!(locus.within_block_bound && locus.within_caption_bound);
    }

    #[test]
    fn homomorphism_examples() {
        let s = sig(2);
        let t1 = GrassmannElement::generator(1, s, Backend::Exact).unwrap();
        let t2 = GrassmannElement::generator(2, s, Backend::Exact).unwrap();
        let y = SuperMatrix::from_ints(&[&[2, 1], &[0, 2]], s);
        let eta = AssignmentEta::new(
            vec![y],
            vec![SuperMatrix::scalar(&t1, 2), SuperMatrix::scalar(&t2, 2)],
        )
        .unwrap();
        let h = build(&eta, &opts()).unwrap();
        let th1 = SuperFunction::theta(1, 1, 2).unwrap();
        let th2 = SuperFunction::theta(2, 1, 2).unwrap();
        let y1 = SuperFunction::y(1, 1, 2);
        let report = h.verify_homomorphism(&[(y1.clone(), y1), (th1.clone(), th2.clone())]).unwrap();
        assert!(report.passed());
        assert_eq!(report.max_multiplicative, 0.0);
        let a = h.apply(&th1.mul(&th2).unwrap()).unwrap();
        let b = h.apply(&th2.mul(&th1).unwrap()).unwrap();
        assert_eq!(a, -&b);

        let report = h.verify_homomorphism(&[(even("exp(y1)", 1, 2), even("exp(-y1)", 1, 2))]).unwrap();
        assert!(report.passed(), "{report:?}");
        let prod = h.apply(&even("exp(y1)*exp(-y1)", 1, 2)).unwrap();
        assert!((&prod - &SuperMatrix::identity(2, s, Backend::Numeric)).max_abs() < 1e-12);
    }

    #[test]
    fn applied_values_commute_with_idempotents() {
        let s = sig(1);
        let t = GrassmannElement::generator(1, s, Backend::Exact).unwrap();
        let c = |n| GrassmannElement::scalar(ex(n), s);
        let y = SuperMatrix::from_entries(2, vec![c(1), t, c(0), c(2)]).unwrap();
        let h = build(&AssignmentEta::new(vec![y], vec![]).unwrap(), &opts()).unwrap();
        let v = h.apply(&even("y1^3 - 2*y1", 1, 0)).unwrap();
        for e in h.decomposition().system().idempotents() {
            assert!((&(&v * e) - &(e * &v)).is_zero());
        }
    }

    #[test]
    fn hull_examples() {
        let d = SuperMatrix::from_ints(&[&[1, 0], &[0, 2]], sig(0));
        let e = SuperMatrix::from_ints(&[&[3, 0], &[0, 3]], sig(0));
        let family = [d.clone(), e];
        assert_eq!(cinfty_hull_eval(&family, &SmoothFunction::projection(0, 2), &opts()).unwrap(), d);
        let c = SmoothFunction::constant(ex(7), 2);
        assert_eq!(
            cinfty_hull_eval(&family, &c, &opts()).unwrap(),
            SuperMatrix::identity(2, sig(0), Backend::Exact).scale(&ex(7))
        );

        let samples: Vec<SmoothFunction> = ["y1", "y1^2", "y1^3"].iter().map(|s| SmoothFunction::parse(s, 1).unwrap()).collect();
        let report = check_admissibility_axioms(&[d.clone()], &samples, &opts()).unwrap();
        assert!(report.passed() && report.checks.iter().all(|c| c.exact && c.residual == 0.0), "{report:?}");

        let samples: Vec<SmoothFunction> = ["y1 + y2", "y1*y2"].iter().map(|s| SmoothFunction::parse(s, 2).unwrap()).collect();
        assert!(check_admissibility_axioms(&family, &samples, &opts()).unwrap().passed());

        let a = SuperMatrix::from_ints(&[&[1, 1], &[0, 1]], sig(0));
        let b = SuperMatrix::from_ints(&[&[1, 0], &[1, 1]], sig(0));
        assert!(matches!(check_admissibility_axioms(&[a, b], &samples, &opts()), Err(Error::Precondition(_))));
    }
}
