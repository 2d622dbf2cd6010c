//! JSON encodings of values, the assignment input document and reports.
//!
//! A Grassmann element is a list of terms `{"subset": [1, 2], "re": "3/4", "im": "0"}`
//! with ascending generator indices. A matrix is `{"r", "s", "entries"}` with
//! `entries` given row by row. On input an entry may also be a bare number or
//! numeric string, meaning a scalar.

use serde::{Deserialize, Serialize};

use crate::azumaya::{AssignmentEta, MapHandle, SpectralLocusReport, ValidationReport, Violation};
use crate::coeff::{Backend, Coefficient};
use crate::error::{Error, Result};
use crate::grassmann::{AlgebraSignature, GrassmannElement, Monomial};
use crate::smoothfn::{SmoothFunction, SuperFunction};
use crate::spectral::{EigenData, Provenance};
use crate::supermatrix::SuperMatrix;

fn schema(field: impl Into<String>, message: impl ToString) -> Error {
    Error::Schema { field: field.into(), message: message.to_string() }
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub subset: Vec<u32>,
    pub re: String,
    #[serde(default = "zero_string")]
    pub im: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarJson {
    Int(i64),
    Float(f64),
    Text(String),
}

impl ScalarJson {
    fn text(&self) -> String {
        match self {
            ScalarJson::Int(n) => n.to_string(),
            ScalarJson::Float(x) => format!("{x:?}"),
            ScalarJson::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryJson {
    Terms(Vec<TermJson>),
    Scalar(ScalarJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuperMatrixJson {
    pub r: usize,
    pub s: u32,
    pub entries: Vec<Vec<EntryJson>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoefficientJson {
    Pair {
        re: String,
        #[serde(default = "zero_string")]
        im: String,
    },
    Scalar(ScalarJson),
}

pub fn encode_coefficient(c: &Coefficient) -> CoefficientJson {
    let (re, im) = c.to_strings();
    CoefficientJson::Pair { re, im }
}

pub fn decode_coefficient(c: &CoefficientJson, backend: Backend, field: &str) -> Result<Coefficient> {
    let (re, im) = match c {
        CoefficientJson::Pair { re, im } => (re.clone(), im.clone()),
        CoefficientJson::Scalar(s) => (s.text(), zero_string()),
    };
    Coefficient::parse_pair(&re, &im, backend).map_err(|e| schema(field, e))
}

pub fn encode_grassmann(x: &GrassmannElement) -> Vec<TermJson> {
    x.terms()
        .map(|(m, c)| {
            let (re, im) = c.to_strings();
            TermJson { subset: m.indices(), re, im }
        })
        .collect()
}

pub fn decode_grassmann(terms: &[TermJson], sig: AlgebraSignature, backend: Backend, field: &str) -> Result<GrassmannElement> {
    let mut parsed = Vec::with_capacity(terms.len());
    for (k, t) in terms.iter().enumerate() {
        let here = format!("{field}[{k}]");
        if t.subset.windows(2).any(|w| w[0] >= w[1]) {
            return Err(schema(format!("{here}.subset"), "indices must be strictly ascending"));
        }
        if let Some(&i) = t.subset.iter().find(|&&i| i == 0 || i > sig.generators()) {
            return Err(schema(format!("{here}.subset"), format!("index {i} outside 1..={}", sig.generators())));
        }
        let m = Monomial::from_indices(&t.subset).map_err(|e| schema(format!("{here}.subset"), e))?;
        let c = Coefficient::parse_pair(&t.re, &t.im, backend).map_err(|e| schema(here, e))?;
        parsed.push((m, c));
    }
    GrassmannElement::from_terms(sig, backend, parsed).map_err(|e| schema(field, e))
}

pub fn encode_matrix(m: &SuperMatrix) -> SuperMatrixJson {
    let r = m.rank();
    let entries = (0..r).map(|i| (0..r).map(|j| EntryJson::Terms(encode_grassmann(m.entry(i, j)))).collect()).collect();
    SuperMatrixJson { r, s: m.generators(), entries }
}

pub fn decode_matrix(m: &SuperMatrixJson, backend: Backend, field: &str) -> Result<SuperMatrix> {
    let sig = AlgebraSignature::new(m.s).map_err(|e| schema(format!("{field}.s"), e))?;
    if m.entries.len() != m.r {
        return Err(schema(format!("{field}.entries"), format!("{} rows, expected {}", m.entries.len(), m.r)));
    }
    let mut flat = Vec::with_capacity(m.r * m.r);
    for (i, row) in m.entries.iter().enumerate() {
        if row.len() != m.r {
            return Err(schema(format!("{field}.entries[{i}]"), format!("{} columns, expected {}", row.len(), m.r)));
        }
        for (j, e) in row.iter().enumerate() {
            let here = format!("{field}.entries[{i}][{j}]");
            let x = match e {
                EntryJson::Terms(t) => decode_grassmann(t, sig, backend, &here)?,
                EntryJson::Scalar(s) => {
                    let c = Coefficient::parse_pair(&s.text(), "0", backend).map_err(|err| schema(&here, err))?;
                    GrassmannElement::scalar(c, sig)
                }
            };
            flat.push(x);
        }
    }
    if m.r == 0 {
        return Err(schema(format!("{field}.r"), "rank must be positive"));
    }
    SuperMatrix::from_entries(m.r, flat).map_err(|e| schema(field, e))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenHintJson {
    pub eigenvalues: Vec<CoefficientJson>,
    pub multiplicities: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentJson {
    /// Ascending indices `l` of `ϑ^I`; empty for the even part.
    #[serde(default)]
    pub theta: Vec<u32>,
    pub f: String,
}

/// A super-function: one expression for an even function, or a list of components.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionJson {
    Even(String),
    Components(Vec<ComponentJson>),
}

impl FunctionJson {
    pub fn decode(&self, n: usize, s2: u32, field: &str) -> Result<SuperFunction> {
        match self {
            FunctionJson::Even(src) => {
                let f = SmoothFunction::parse(src, n).map_err(|e| schema(field, e))?;
                Ok(SuperFunction::even(f, s2))
            }
            FunctionJson::Components(cs) => {
                let mut comps = Vec::with_capacity(cs.len());
                for (k, c) in cs.iter().enumerate() {
                    let here = format!("{field}[{k}]");
                    if c.theta.windows(2).any(|w| w[0] >= w[1]) || c.theta.iter().any(|&l| l == 0 || l > s2) {
                        return Err(schema(format!("{here}.theta"), format!("indices must be ascending within 1..={s2}")));
                    }
                    let m = Monomial::from_indices(&c.theta).map_err(|e| schema(format!("{here}.theta"), e))?;
                    let f = SmoothFunction::parse(&c.f, n).map_err(|e| schema(format!("{here}.f"), e))?;
                    comps.push((m, f));
                }
                SuperFunction::from_components(n, s2, comps).map_err(|e| schema(field, e))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplePairJson {
    pub f: FunctionJson,
    pub g: FunctionJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatricesJson {
    pub y: Vec<SuperMatrixJson>,
    #[serde(default)]
    pub theta: Vec<SuperMatrixJson>,
}

/// The assignment input document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFile {
    pub n: usize,
    pub s1: u32,
    #[serde(default)]
    pub s2: u32,
    pub r: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
    pub matrices: MatricesJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_hints: Option<Vec<Option<EigenHintJson>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SamplePairJson>>,
    /// Expression in `y1..yn`, evaluated on the even matrices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull_function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull_samples: Option<Vec<String>>,
}

impl InputFile {
    fn check_matrix(&self, m: &SuperMatrixJson, field: &str) -> Result<()> {
        if m.r != self.r {
            return Err(schema(format!("{field}.r"), format!("{} does not match r = {}", m.r, self.r)));
        }
        if m.s != self.s1 {
            return Err(schema(format!("{field}.s"), format!("{} does not match s1 = {}", m.s, self.s1)));
        }
        Ok(())
    }

    /// The assignment on `backend`, which overrides the document's own field.
    pub fn assignment(&self, backend: Backend) -> Result<AssignmentEta> {
        if self.matrices.y.len() != self.n {
            return Err(schema("matrices.y", format!("{} matrices, expected n = {}", self.matrices.y.len(), self.n)));
        }
        if self.matrices.theta.len() != self.s2 as usize {
            return Err(schema("matrices.theta", format!("{} matrices, expected s2 = {}", self.matrices.theta.len(), self.s2)));
        }
        let decode = |list: &[SuperMatrixJson], name: &str| -> Result<Vec<SuperMatrix>> {
            list.iter()
                .enumerate()
                .map(|(i, m)| {
                    let field = format!("matrices.{name}[{i}]");
                    self.check_matrix(m, &field)?;
                    decode_matrix(m, backend, &field)
                })
                .collect()
        };
        let ys = decode(&self.matrices.y, "y")?;
        let thetas = decode(&self.matrices.theta, "theta")?;
        let mut eta = AssignmentEta::new(ys, thetas).map_err(|e| schema("matrices", e))?;
        if let Some(hints) = &self.eigen_hints {
            if hints.len() != self.n {
                return Err(schema("eigen_hints", format!("{} entries, expected n = {}", hints.len(), self.n)));
            }
            for (i, h) in hints.iter().enumerate() {
                let Some(h) = h else { continue };
                let field = format!("eigen_hints[{i}]");
                let eigenvalues = h
                    .eigenvalues
                    .iter()
                    .enumerate()
                    .map(|(k, c)| decode_coefficient(c, backend, &format!("{field}.eigenvalues[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                let data = EigenData::new(eigenvalues, h.multiplicities.clone(), Provenance::UserSupplied)
                    .map_err(|e| schema(&field, e))?;
                eta = eta.with_hint(i, data)?;
            }
        }
        Ok(eta)
    }

    pub fn super_function(&self) -> Result<Option<SuperFunction>> {
        self.function.as_ref().map(|f| f.decode(self.n, self.s2, "function")).transpose()
    }

    pub fn sample_pairs(&self) -> Result<Option<Vec<(SuperFunction, SuperFunction)>>> {
        let Some(samples) = &self.samples else { return Ok(None) };
        samples
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let f = p.f.decode(self.n, self.s2, &format!("samples[{k}].f"))?;
                let g = p.g.decode(self.n, self.s2, &format!("samples[{k}].g"))?;
                Ok((f, g))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn hull_function(&self) -> Result<Option<SmoothFunction>> {
        self.hull_function
            .as_ref()
            .map(|src| SmoothFunction::parse(src, self.n).map_err(|e| schema("hull_function", e)))
            .transpose()
    }

    pub fn hull_samples(&self) -> Result<Option<Vec<SmoothFunction>>> {
        let Some(list) = &self.hull_samples else { return Ok(None) };
        list.iter()
            .enumerate()
            .map(|(k, src)| SmoothFunction::parse(src, self.n).map_err(|e| schema(format!("hull_samples[{k}]"), e)))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ViolationJson {
    pub condition: u8,
    pub relation: &'static str,
    /// 1-based indices of the offending matrices.
    pub indices: Vec<usize>,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationJson {
    pub passed: bool,
    pub violations: Vec<ViolationJson>,
}

pub fn validation_json(report: &ValidationReport) -> ValidationJson {
    let violations = report
        .violations()
        .iter()
        .map(|v| {
            let indices = match v {
                Violation::EvenPair(a, b) | Violation::EvenOdd(a, b) | Violation::OddPair(a, b) => vec![*a, *b],
                Violation::NonRealSpectrum(i) | Violation::IrrationalSpectrum(i) | Violation::BadHint(i, _) => vec![*i],
            };
            ViolationJson { condition: v.condition(), relation: v.relation(), indices, message: v.to_string() }
        })
        .collect();
    ValidationJson { passed: report.passed(), violations }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenJson {
    pub eigenvalues: Vec<String>,
    pub multiplicities: Vec<usize>,
    pub provenance: Provenance,
}

pub fn eigen_json(e: &EigenData) -> EigenJson {
    EigenJson {
        eigenvalues: e.eigenvalues().iter().map(ToString::to_string).collect(),
        multiplicities: e.multiplicities().to_vec(),
        provenance: e.provenance(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockJson {
    pub label: Vec<String>,
    pub rank: usize,
    pub offset: usize,
    pub idempotent: SuperMatrixJson,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionJson {
    pub eigen: Vec<EigenJson>,
    pub blocks: Vec<BlockJson>,
    pub basis: SuperMatrixJson,
    pub conjugated: Vec<SuperMatrixJson>,
}

pub fn decomposition_json(handle: &MapHandle) -> DecompositionJson {
    let pd = handle.decomposition();
    let sys = pd.system();
    let blocks = sys
        .labels()
        .iter()
        .zip(sys.ranks())
        .zip(pd.offsets())
        .zip(sys.idempotents())
        .map(|(((label, &rank), &offset), e)| BlockJson {
            label: label.iter().map(ToString::to_string).collect(),
            rank,
            offset,
            idempotent: encode_matrix(e),
        })
        .collect();
    DecompositionJson {
        eigen: handle.eigen().iter().map(eigen_json).collect(),
        blocks,
        basis: encode_matrix(pd.basis()),
        conjugated: pd.conjugated().iter().map(encode_matrix).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocusPointJson {
    pub q: Vec<String>,
    pub rank: usize,
    pub nilpotency: Vec<usize>,
    pub taylor_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocusJson {
    pub text: String,
    pub rank_sum: usize,
    pub points: Vec<LocusPointJson>,
    pub within_block_bound: bool,
    pub within_caption_bound: bool,
}

pub fn locus_json(report: &SpectralLocusReport) -> LocusJson {
    LocusJson {
        text: report.to_string(),
        rank_sum: report.rank_sum(),
        points: report
            .points
            .iter()
            .map(|p| LocusPointJson {
                q: p.q.iter().map(ToString::to_string).collect(),
                rank: p.rank,
                nilpotency: p.nilpotency.clone(),
                taylor_degree: p.taylor_degree,
            })
            .collect(),
        within_block_bound: report.within_block_bound,
        within_caption_bound: report.within_caption_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip_matrix(m: &SuperMatrix) {
        let json = serde_json::to_string(&encode_matrix(m)).unwrap();
        let back: SuperMatrixJson = serde_json::from_str(&json).unwrap();
        assert_eq!(&decode_matrix(&back, m.backend(), "m").unwrap(), m);
        assert_eq!(serde_json::to_string(&encode_matrix(&decode_matrix(&back, m.backend(), "m").unwrap())).unwrap(), json);
    }

    #[test]
    fn scalar_shorthand() {
        let j: SuperMatrixJson = serde_json::from_str(r#"{"r": 2, "s": 1, "entries": [[1, "1/2"], [0.25, [{"subset": [1], "re": "3"}]]]}"#).unwrap();
        let m = decode_matrix(&j, Backend::Exact, "m").unwrap();
        assert_eq!(m.entry(0, 1).body(), Coefficient::ratio(1, 2));
        assert_eq!(m.entry(1, 0).body(), Coefficient::ratio(1, 4));
        assert_eq!(m.entry(1, 1).coefficient(Monomial(1)), Coefficient::from_int(3, Backend::Exact));
        roundtrip_matrix(&m);
        roundtrip_matrix(&m.to_numeric());
    }

    #[test]
    fn schema_errors_name_the_field() {
        let j: SuperMatrixJson = serde_json::from_str(r#"{"r": 1, "s": 1, "entries": [[[{"subset": [2], "re": "1"}]]]}"#).unwrap();
        match decode_matrix(&j, Backend::Exact, "matrices.y[0]") {
            Err(Error::Schema { field, .. }) => assert_eq!(field, "matrices.y[0].entries[0][0][0].subset"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn input_document() {
        let doc = r#"{
            "n": 1, "s1": 0, "s2": 0, "r": 2, "backend": "exact",
            "matrices": {"y": [{"r": 2, "s": 0, "entries": [[1, 0], [0, 2]]}]},
            "eigen_hints": [{"eigenvalues": [1, {"re": "2"}], "multiplicities": [1, 1]}],
            "function": "y1^2"
        }"#;
        let input: InputFile = serde_json::from_str(doc).unwrap();
        let eta = input.assignment(Backend::Exact).unwrap();
        assert_eq!(eta.r(), 2);
        assert!(eta.hints()[0].is_some());
        assert!(input.super_function().unwrap().is_some());
        let again: InputFile = serde_json::from_str(&serde_json::to_string(&input).unwrap()).unwrap();
        assert_eq!(again, input);
    }

    proptest! {
        #[test]
        fn grassmann_roundtrip(terms in proptest::collection::vec((0u64..16, -20i64..20, 1i64..6, -3i64..3), 0..8)) {
            let sig = AlgebraSignature::new(4).unwrap();
            let x = GrassmannElement::from_terms(
                sig,
                Backend::Exact,
                terms.iter().map(|&(m, n, d, im)| {
                    let re = num_rational::BigRational::new(n.into(), d.into());
                    let im = num_rational::BigRational::from_integer(im.into());
                    (Monomial(m), Coefficient::Exact(crate::coeff::GaussRational::new(re, im)))
                }),
            ).unwrap();
            let enc = encode_grassmann(&x);
            let json = serde_json::to_string(&enc).unwrap();
            let back: Vec<TermJson> = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(&decode_grassmann(&back, sig, Backend::Exact, "x").unwrap(), &x);
            let y = x.to_numeric();
            let back: Vec<TermJson> = serde_json::from_str(&serde_json::to_string(&encode_grassmann(&y)).unwrap()).unwrap();
            prop_assert_eq!(decode_grassmann(&back, sig, Backend::Numeric, "x").unwrap(), y);
        }
    }
}
