//! Command-line front end. Every command reads JSON and writes JSON; see `toricres --help`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactla::{is_prime, Fp, Scalar, Q, SUPPORTED_PRIMES};
use crate::globres::{
    global_resolution, refine, validate_delta_family, DeltaFamily, DeltaFamilyFile, LiftRule,
};
use crate::grmod::{
    affine_resolution, lcm_lattice_of, minimal_free_resolution, tensor_diagnostic,
    verify_resolution, Entry, EntryFile, GradedModule, GradedResolution, LimitWindow,
    MonomialPresentation, Presentation, ResolutionFile, ScalarRepr, DEFAULT_WINDOW_CAP,
};
use crate::reflexive::{
    arrangement_resolution, canonical_poset, default_margin, global_reflexive_resolution,
    intersection_closure, reflexive_model_export, summarize, verify_model, FiltrationFile,
    Filtrations, LevelSummary, ModelFile,
};
use crate::toricfan::{validate_fan, ConeContext, Fan, DEFAULT_FACE_BOUND};
use crate::zbar::ZVec;

#[derive(Parser, Debug)]
#[command(
    name = "toricres",
    version,
    about = "Exact free resolutions of toric sheaves"
)]
pub struct Cli {
    /// `Q` for the rationals or a supported prime.
    #[arg(long, global = true, default_value = "Q")]
    pub field: String,
    /// Margin past the last threshold for truncated limits and certificates.
    #[arg(long, global = true)]
    pub window: Option<i64>,
    /// Search bound: face functionals for `validate-fan`, degree cap for `tensor-diagnostic`.
    #[arg(long, global = true)]
    pub bound: Option<i64>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The lcm-lattice of a presented module over the polynomial ring, with its anchor table.
    LcmLattice {
        input: PathBuf,
    },
    /// Resolve a module and embed the certificate.
    Resolve {
        #[arg(value_enum)]
        kind: Kind,
        input: PathBuf,
        #[arg(long, value_enum, default_value = "canonical")]
        mode: Mode,
        #[arg(long, value_enum)]
        lift: Option<Lift>,
        /// Expected generator degrees per level, compared after the run.
        #[arg(long)]
        expect: Option<PathBuf>,
        #[arg(long = "match", value_enum, default_value = "perm")]
        match_mode: MatchMode,
    },
    /// Degreewise dimensions of a tensor product of two rank-one modules over a semigroup ring.
    TensorDiagnostic {
        input: PathBuf,
    },
    /// The monomial matrix of a reflexive model of an intersection-closed arrangement.
    ExportModel {
        input: PathBuf,
    },
    /// Re-check a resolution file against the module it claims to resolve.
    Verify {
        input: PathBuf,
        resolution: PathBuf,
    },
    /// Check rays, the zero cone and the declared faces of a fan
    ValidateFan {
        input: PathBuf,
    },
    /// Check the gluing data of a family and report its refinement.
    ValidateFamily {
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Monomial,
    Affine,
    Reflexive,
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Canonical,
    Closed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lift {
    General,
    Explicit,
    Reflexive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatchMode {
    Exact,
    Perm,
}

/// A cone given by its ray generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeInput {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
}

impl ConeInput {
    fn context(&self) -> Result<ConeContext> {
        if self.rays.iter().any(|r| r.len() != self.rank) {
            return Err(Error::InvalidFan(format!(
                "rays must have {} entries",
                self.rank
            )));
        }
        Ok(ConeContext::new(self.rank, self.rays.clone()))
    }
}

/// A module over a semigroup ring, with an optional admissible poset (default: its lcm-lattice).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineInput {
    pub cone: ConeInput,
    pub module: MonomialPresentation,
    #[serde(default)]
    pub poset: Option<Vec<ZVec>>,
}

/// Filtrations keyed by the position of the ray in the cone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflexiveInput {
    pub cone: ConeInput,
    pub filtrations: FiltrationFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalReflexiveInput {
    pub fan: Fan,
    pub filtrations: FiltrationFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GlobalInput {
    Reflexive(GlobalReflexiveInput),
    Family(DeltaFamilyFile),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorInput {
    pub cone: ConeInput,
    pub n1: Vec<i64>,
    pub n2: Vec<i64>,
    /// Generators of the semigroup, in `M`.
    pub semigroup_gens: Vec<Vec<i64>>,
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

/// A resolution over one cone, as written by `resolve monomial|affine|reflexive`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionDoc {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub poset: Vec<ZVec>,
    pub betti: Vec<usize>,
    pub resolution: ResolutionFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorTerm {
    pub divisor: Vec<i64>,
    pub mult: usize,
    /// `O(D)` with `D = -Σ n_ρ D_ρ`, rays numbered from 1.
    pub sheaf: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeCertificate {
    pub cone: usize,
    pub resolution: ResolutionFile,
}

/// A global resolution by sums of line bundles, as written by `resolve global`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlobalDoc {
    pub kind: Kind,
    pub lift: Lift,
    pub poset: Vec<ZVec>,
    pub levels: Vec<Vec<DivisorTerm>>,
    /// Generator degrees in the order used by the differentials.
    pub generators: Vec<Vec<Vec<i64>>>,
    pub differentials: Vec<Vec<EntryFile>>,
    pub cones: Vec<ConeCertificate>,
}

/// `O(-Σ n_ρ D_ρ)`.
pub fn sheaf_label(n: &[i64]) -> String {
    let mut s = String::new();
    for (i, &v) in n.iter().enumerate() {
        let c = -v;
        if c == 0 {
            continue;
        }
        let sign = if c < 0 {
            "-"
        } else if s.is_empty() {
            ""
        } else {
            "+"
        };
        let mag = if c.abs() == 1 {
            String::new()
        } else {
            c.abs().to_string()
        };
        s.push_str(&format!("{sign}{mag}D{}", i + 1));
    }
    if s.is_empty() {
        s.push('0');
    }
    format!("O({s})")
}

fn terms(summary: Vec<Vec<LevelSummary>>) -> Vec<Vec<DivisorTerm>> {
    summary
        .into_iter()
        .map(|l| {
            l.into_iter()
                .map(|t| DivisorTerm {
                    sheaf: sheaf_label(&t.divisor),
                    divisor: t.divisor,
                    mult: t.mult,
                })
                .collect()
        })
        .collect()
}

/// JSON text with a label used in error messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Source {
    pub label: String,
    pub text: String,
}

impl Source {
    pub fn new(label: impl Into<String>, text: impl Into<String>) -> Self {
        Source {
            label: label.into(),
            text: text.into(),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Ok(Source::new(path.display().to_string(), text))
    }

    fn parse<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_str(&self.text).map_err(|e| Error::Parse(format!("{}: {e}", self.label)))
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn entries_to_file<F: Scalar>(d: &[Vec<Entry<F>>]) -> Vec<Vec<EntryFile>> {
    d.iter()
        .map(|l| {
            l.iter()
                .map(|e| EntryFile {
                    row: e.row,
                    col: e.col,
                    coeff: ScalarRepr::from_scalar(&e.coeff),
                    exponent: e.exponent.clone(),
                })
                .collect()
        })
        .collect()
}

fn resolution_doc<F: Scalar>(
    kind: Kind,
    mode: Option<Mode>,
    poset: Vec<ZVec>,
    r: &GradedResolution<F>,
) -> ResolutionDoc {
    ResolutionDoc {
        kind,
        mode,
        poset,
        betti: r.betti(),
        resolution: r.to_file(),
    }
}

fn compare_levels(
    got: &[Vec<Vec<i64>>],
    expected: &[Vec<Vec<i64>>],
    mode: MatchMode,
) -> Result<()> {
    let norm = |l: &[Vec<Vec<i64>>]| -> Vec<Vec<Vec<i64>>> {
        l.iter()
            .map(|v| {
                let mut v = v.clone();
                if mode == MatchMode::Perm {
                    v.sort();
                }
                v
            })
            .collect()
    };
    if norm(got) != norm(expected) {
        return Err(Error::InvalidModule(format!(
            "levels {got:?} differ from the expected {expected:?}"
        )));
    }
    Ok(())
}

/// Composite of two monomial matrices is zero: `d_i ∘ d_{i+1} = 0`.
fn check_complex<F: Scalar>(d: &[Vec<Entry<F>>]) -> Result<()> {
    for (i, pair) in d.windows(2).enumerate() {
        let mut acc: BTreeMap<(usize, usize, Vec<i64>), F> = BTreeMap::new();
        for b in &pair[1] {
            for a in pair[0].iter().filter(|a| a.col == b.row) {
                let exp: Vec<i64> = a
                    .exponent
                    .iter()
                    .zip(&b.exponent)
                    .map(|(x, y)| x + y)
                    .collect();
                let e = acc.entry((a.row, b.col, exp)).or_insert_with(F::zero);
                *e = e.add(&a.coeff.mul(&b.coeff));
            }
        }
        if acc.values().any(|v| !v.is_zero()) {
            return Err(Error::Certificate(format!(
                "differentials {i} and {} do not compose to zero",
                i + 1
            )));
        }
    }
    Ok(())
}

fn global_doc_from_file<F: Scalar>(doc: &GlobalDoc) -> Result<Vec<Vec<Entry<F>>>> {
    doc.differentials
        .iter()
        .map(|l| {
            l.iter()
                .map(|e| {
                    Ok(Entry {
                        row: e.row,
                        col: e.col,
                        coeff: e.coeff.to_scalar()?,
                        exponent: e.exponent.clone(),
                    })
                })
                .collect()
        })
        .collect()
}

/// One engine operation on JSON inputs.
#[derive(Clone, Debug)]
pub enum Op {
    LcmLattice {
        input: Source,
    },
    Resolve {
        kind: Kind,
        input: Source,
        mode: Mode,
        lift: Option<Lift>,
        expect: Option<Source>,
        match_mode: MatchMode,
    },
    TensorDiagnostic {
        input: Source,
    },
    ExportModel {
        input: Source,
    },
    Verify {
        input: Source,
        resolution: Source,
    },
    ValidateFan {
        input: Source,
    },
    ValidateFamily {
        input: Source,
    },
}

/// An operation with its field and search settings.
#[derive(Clone, Debug)]
pub struct Job {
    /// `Q` or a supported prime.
    pub field: String,
    pub window: Option<i64>,
    pub bound: Option<i64>,
    pub op: Op,
}

impl Cli {
    /// Reads the input files named on the command line.
    pub fn job(&self) -> Result<Job> {
        let op = match &self.command {
            Command::LcmLattice { input } => Op::LcmLattice {
                input: Source::read(input)?,
            },
            Command::Resolve {
                kind,
                input,
                mode,
                lift,
                expect,
                match_mode,
            } => Op::Resolve {
                kind: *kind,
                input: Source::read(input)?,
                mode: *mode,
                lift: *lift,
                expect: expect.as_deref().map(Source::read).transpose()?,
                match_mode: *match_mode,
            },
            Command::TensorDiagnostic { input } => Op::TensorDiagnostic {
                input: Source::read(input)?,
            },
            Command::ExportModel { input } => Op::ExportModel {
                input: Source::read(input)?,
            },
            Command::Verify { input, resolution } => Op::Verify {
                input: Source::read(input)?,
                resolution: Source::read(resolution)?,
            },
            Command::ValidateFan { input } => Op::ValidateFan {
                input: Source::read(input)?,
            },
            Command::ValidateFamily { input } => Op::ValidateFamily {
                input: Source::read(input)?,
            },
        };
        Ok(Job {
            field: self.field.clone(),
            window: self.window,
            bound: self.bound,
            op,
        })
    }

    pub fn execute(&self) -> Result<Value> {
        self.job()?.execute()
    }
}

impl Job {
    fn margin_or(&self, default: i64) -> Result<i64> {
        match self.window {
            Some(w) if w <= 0 => Err(Error::InvalidModule("--window must be positive".into())),
            Some(w) => Ok(w),
            None => Ok(default),
        }
    }

    fn run<F: Scalar>(&self) -> Result<Value> {
        match &self.op {
            Op::LcmLattice { input } => {
                let p: MonomialPresentation = input.parse()?;
                let e = Presentation::<F>::from_file(&p)?;
                let (anchors, lattice) = lcm_lattice_of(&e)?;
                let order = lattice.order();
                let n = lattice.elements.len();
                let leq_pairs: Vec<[usize; 2]> = (0..n)
                    .flat_map(|i| (0..n).map(move |j| [i, j]))
                    .filter(|&[i, j]| i != j && order.leq(i, j))
                    .collect();
                Ok(
                    json!({"elements": lattice.elements, "leq_pairs": leq_pairs, "anchors": anchors}),
                )
            }
            Op::Resolve {
                kind,
                input,
                mode,
                lift,
                expect,
                match_mode,
            } => {
                let (value, levels) = self.resolve::<F>(*kind, input, *mode, *lift)?;
                if let Some(src) = expect {
                    let expected: Vec<Vec<Vec<i64>>> = src.parse()?;
                    compare_levels(&levels, &expected, *match_mode)?;
                }
                Ok(value)
            }
            Op::TensorDiagnostic { input } => {
                let t: TensorInput = input.parse()?;
                let ctx = t.cone.context()?;
                let cap = match self.bound {
                    Some(b) if b <= 0 => {
                        return Err(Error::InvalidModule("--bound must be positive".into()))
                    }
                    Some(b) => b as usize,
                    None => DEFAULT_WINDOW_CAP,
                };
                to_value(&tensor_diagnostic(
                    &ctx,
                    &t.n1,
                    &t.n2,
                    &t.semigroup_gens,
                    &t.lo,
                    &t.hi,
                    cap,
                )?)
            }
            Op::ExportModel { input } => {
                let f: ModelFile = input.parse()?;
                let model = reflexive_model_export::<F>(&f)?;
                verify_model::<F>(&f, &model)?;
                to_value(&model)
            }
            Op::Verify { input, resolution } => self.verify::<F>(input, resolution),
            Op::ValidateFan { input } => {
                let fan: Fan = input.parse()?;
                let bound = match self.bound {
                    Some(b) if b <= 0 => {
                        return Err(Error::InvalidFan("--bound must be positive".into()))
                    }
                    Some(b) => b,
                    None => DEFAULT_FACE_BOUND,
                };
                let report = validate_fan(&fan, bound);
                if !report.valid {
                    return Err(Error::InvalidFan(report.errors.join("; ")));
                }
                to_value(&report)
            }
            Op::ValidateFamily { input } => {
                let f: DeltaFamilyFile = input.parse()?;
                let fam = DeltaFamily::<F>::from_file(&f)?;
                let report = validate_delta_family(&fam);
                if !report.valid {
                    return Err(Error::Gluing(report.errors.join("; ")));
                }
                let refinement = refine(&fam, self.margin_or(fam.default_margin())?)?;
                Ok(json!({"report": report, "refinement": refinement}))
            }
        }
    }

    fn resolve<F: Scalar>(
        &self,
        kind: Kind,
        input: &Source,
        mode: Mode,
        lift: Option<Lift>,
    ) -> Result<(Value, Vec<Vec<Vec<i64>>>)> {
        match kind {
            Kind::Monomial => {
                let p: MonomialPresentation = input.parse()?;
                let e = Presentation::<F>::from_file(&p)?;
                let r = minimal_free_resolution(&e)?;
                let doc = resolution_doc(kind, None, r.lattice.elements.clone(), &r.resolution);
                Ok((to_value(&doc)?, r.resolution.levels))
            }
            Kind::Affine => {
                let a: AffineInput = input.parse()?;
                let ctx = a.cone.context()?;
                let e = Presentation::<F>::from_file_on_cone(&a.module, &ctx)?;
                let poset = match a.poset {
                    Some(p) => p,
                    None => lcm_lattice_of(&e)?.1.elements,
                };
                let window = LimitWindow {
                    margin: self.margin_or(LimitWindow::for_cone(&ctx).margin)?,
                };
                let r = affine_resolution(&e, &ctx, &poset, window)?;
                let doc = resolution_doc(kind, None, poset, &r);
                Ok((to_value(&doc)?, r.levels))
            }
            Kind::Reflexive => {
                let a: ReflexiveInput = input.parse()?;
                let ctx = a.cone.context()?;
                let module = Filtrations::<F>::from_file(&a.filtrations)?.on_cone(&ctx)?;
                let margin = self.margin_or(default_margin(&ctx))?;
                let mut arr = canonical_poset(&module, margin)?;
                if mode == Mode::Closed {
                    arr = intersection_closure(&module, &arr)?;
                }
                let r = arrangement_resolution(&module, &arr, margin)?;
                let doc = resolution_doc(kind, Some(mode), arr.elements.clone(), &r);
                Ok((to_value(&doc)?, r.levels))
            }
            Kind::Global => match input.parse::<GlobalInput>()? {
                GlobalInput::Reflexive(g) => {
                    if matches!(lift, Some(Lift::General | Lift::Explicit)) {
                        return Err(Error::Unsupported(
                            "filtration input takes the reflexive lift".into(),
                        ));
                    }
                    let filts = Filtrations::<F>::from_file(&g.filtrations)?;
                    let r = global_reflexive_resolution(&filts, &g.fan, self.window)?;
                    let doc = GlobalDoc {
                        kind,
                        lift: Lift::Reflexive,
                        poset: r.poset.clone(),
                        levels: terms(summarize(&r.levels)),
                        generators: r.levels.clone(),
                        differentials: entries_to_file(&r.differentials),
                        cones: r
                            .cones
                            .iter()
                            .map(|c| ConeCertificate {
                                cone: c.cone,
                                resolution: c.resolution.to_file(),
                            })
                            .collect(),
                    };
                    Ok((to_value(&doc)?, r.levels))
                }
                GlobalInput::Family(f) => {
                    let rule = match lift.unwrap_or(Lift::General) {
                        Lift::General => LiftRule::General,
                        Lift::Explicit => LiftRule::Explicit,
                        Lift::Reflexive => {
                            return Err(Error::Unsupported(
                                "the reflexive lift needs filtration input".into(),
                            ))
                        }
                    };
                    let fam = DeltaFamily::<F>::from_file(&f)?;
                    let report = validate_delta_family(&fam);
                    if !report.valid {
                        return Err(Error::Gluing(report.errors.join("; ")));
                    }
                    let r = global_resolution(&fam, rule, self.window)?;
                    let doc = GlobalDoc {
                        kind,
                        lift: lift.unwrap_or(Lift::General),
                        poset: r.poset.clone(),
                        levels: terms(r.summary()),
                        generators: r.levels.clone(),
                        differentials: entries_to_file(&r.differentials),
                        cones: r
                            .cones
                            .iter()
                            .map(|c| ConeCertificate {
                                cone: c.cone,
                                resolution: c.resolution.to_file(),
                            })
                            .collect(),
                    };
                    Ok((to_value(&doc)?, r.levels))
                }
            },
        }
    }

    fn verify<F: Scalar>(&self, input: &Source, resolution: &Source) -> Result<Value> {
        let raw: Value = resolution.parse()?;
        let kind: Kind = serde_json::from_value(raw.get("kind").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("resolution kind: {e}")))?;
        let parse = |e: serde_json::Error| Error::Parse(format!("{}: {e}", resolution.label));
        if kind == Kind::Global {
            let doc: GlobalDoc = serde_json::from_value(raw).map_err(parse)?;
            check_complex(&global_doc_from_file::<F>(&doc)?)?;
            let mut checked = Vec::new();
            let check = |module: &dyn GradedModule<F>, c: &ConeCertificate| -> Result<()> {
                verify_resolution(module, &GradedResolution::from_file(&c.resolution)?)
            };
            match input.parse::<GlobalInput>()? {
                GlobalInput::Reflexive(g) => {
                    let filts = Filtrations::<F>::from_file(&g.filtrations)?;
                    for c in &doc.cones {
                        check(&filts.on_cone(&g.fan.context(c.cone))?, c)?;
                        checked.push(c.cone);
                    }
                }
                GlobalInput::Family(f) => {
                    let fam = DeltaFamily::<F>::from_file(&f)?;
                    for c in &doc.cones {
                        let m = fam.modules.get(&c.cone).ok_or_else(|| {
                            Error::Certificate(format!("cone {} is not maximal", c.cone))
                        })?;
                        check(m, c)?;
                        checked.push(c.cone);
                    }
                }
            }
            return Ok(json!({"valid": true, "kind": kind, "cones": checked}));
        }
        let doc: ResolutionDoc = serde_json::from_value(raw).map_err(parse)?;
        let res = GradedResolution::<F>::from_file(&doc.resolution)?;
        match kind {
            Kind::Monomial => {
                let p: MonomialPresentation = input.parse()?;
                verify_resolution(&Presentation::<F>::from_file(&p)?, &res)?;
            }
            Kind::Affine => {
                let a: AffineInput = input.parse()?;
                let ctx = a.cone.context()?;
                verify_resolution(
                    &Presentation::<F>::from_file_on_cone(&a.module, &ctx)?,
                    &res,
                )?;
            }
            Kind::Reflexive => {
                let a: ReflexiveInput = input.parse()?;
                let ctx = a.cone.context()?;
                verify_resolution(
                    &Filtrations::<F>::from_file(&a.filtrations)?.on_cone(&ctx)?,
                    &res,
                )?;
            }
            Kind::Global => unreachable!("handled above"),
        }
        Ok(json!({"valid": true, "kind": kind, "betti": res.betti()}))
    }

    /// Runs the operation over the chosen field.
    pub fn execute(&self) -> Result<Value> {
        let Some(p) = parse_field(&self.field)? else {
            return self.run::<Q>();
        };
        macro_rules! primes {
            ($($p:literal),*) => {
                match p {
                    $($p => self.run::<Fp<$p>>(),)*
                    _ => unreachable!("checked by parse_field"),
                }
            };
        }
        primes!(2, 3, 5, 7, 11, 13, 101, 32003, 65521, 2147483647)
    }
}

/// `None` for the rationals, `Some(p)` for a supported prime.
pub fn parse_field(field: &str) -> Result<Option<u64>> {
    let f = field.trim();
    if f.eq_ignore_ascii_case("q") || f == "0" {
        return Ok(None);
    }
    let p: u64 = f
        .parse()
        .map_err(|_| Error::InvalidModule(format!("unknown field {f:?}")))?;
    if !is_prime(p) {
        return Err(Error::InvalidModule(format!("{p} is not prime")));
    }
    if !SUPPORTED_PRIMES.contains(&p) {
        return Err(Error::Unsupported(format!(
            "prime field {p} is not built in (supported: {SUPPORTED_PRIMES:?})"
        )));
    }
    Ok(Some(p))
}

/// Parses arguments, runs, prints the JSON result and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.execute() {
        Ok(v) => {
            let text = serde_json::to_string_pretty(&v).expect("JSON values serialize") + "\n";
            match &cli.output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
