//! Command implementations shared by the binary and the C interface.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::dot::{to_dot, DotOptions};
use crate::dsl::{parse_protocol, render, ParseOptions};
use crate::error::{Error, Result};
use crate::explorer::{image, random_state, run, Policy, TransitionSystem};
use crate::kernel::{Program, ProgramState, Schema, SpecState};
use crate::mapping::{
    check_ideal_possibility, check_ideal_possibility_subset, check_merge_symmetry, infer_schema, read_states,
    Possibility, StateMapping,
};
use crate::protocols::{make_abp, make_alternator, make_cm, make_le, make_pif, LeFixture, ProtocolBundle};
use crate::report::{Report, SimulationReport, Subject};
use crate::specs::{
    check_closed, check_convergence, check_ideal_stabilizing, check_stabilizing, pif, Predicate, Specification, Stats,
    StutterPolicy, Verdict, Witness,
};

pub const BUILTINS: [&str; 5] = ["cm", "la", "pif", "abp", "le"];
pub const DEFAULT_N: usize = 4;

/// Where the protocol comes from. A source together with a built-in name checks
/// the parsed program against that built-in's mapping and specifications.
#[derive(Debug, Clone, Default)]
pub struct Selector {
    pub protocol: Option<String>,
    pub n: Option<usize>,
    pub ids: Option<Vec<i64>>,
    /// Source text and the name it is reported under.
    pub source: Option<(String, String)>,
}

#[derive(Debug, Clone)]
pub enum Loaded {
    Bundle {
        name: String,
        bundle: Box<ProtocolBundle>,
        source: Option<String>,
    },
    Program {
        program: Program,
        source: Option<String>,
    },
    Fixture(LeFixture),
}

impl Loaded {
    pub fn program(&self) -> Option<&Program> {
        match self {
            Loaded::Bundle { bundle, .. } => Some(&bundle.program),
            Loaded::Program { program, .. } => Some(program),
            Loaded::Fixture(_) => None,
        }
    }

    pub fn bundle(&self) -> Option<&ProtocolBundle> {
        match self {
            Loaded::Bundle { bundle, .. } => Some(bundle),
            _ => None,
        }
    }

    fn require_program(&self) -> Result<&Program> {
        self.program().ok_or_else(|| {
            Error::InvalidArgument("leader election has no program; use the impossibility command".into())
        })
    }

    fn require_bundle(&self, what: &str) -> Result<&ProtocolBundle> {
        self.bundle().ok_or_else(|| {
            Error::InvalidArgument(format!("{what} needs a built-in protocol's mapping and specifications"))
        })
    }

    pub fn subject(&self) -> Subject {
        match self {
            Loaded::Fixture(f) => Subject {
                protocol: "le".into(),
                n: f.n,
                universe: f.schema.universe_size().map(|u| u as u64),
                ..Subject::default()
            },
            Loaded::Bundle { name, bundle, source } => Subject {
                mapping: Some(bundle.mapping.describe()),
                source: source.clone(),
                ..program_subject(name, &bundle.program)
            },
            Loaded::Program { program, source } => Subject {
                source: source.clone(),
                ..program_subject(program.name(), program)
            },
        }
    }
}

fn program_subject(name: &str, program: &Program) -> Subject {
    let ids = program.ids();
    let trivial = ids.iter().enumerate().all(|(i, &id)| id == i as i64 + 1);
    Subject {
        protocol: name.to_string(),
        n: program.n(),
        ids: if trivial { Vec::new() } else { ids },
        universe: program.universe_size().and_then(|u| u64::try_from(u).ok()),
        ..Subject::default()
    }
}

/// Builds a built-in protocol. `n` defaults to 4; identifiers apply to the
/// conflict manager only.
pub fn builtin(name: &str, n: Option<usize>, ids: Option<&[i64]>) -> Result<Loaded> {
    let name = name.to_ascii_lowercase();
    if ids.is_some() && name != "cm" {
        return Err(Error::InvalidArgument(format!("`{name}` takes no identifiers")));
    }
    let size = n.unwrap_or(DEFAULT_N);
    let bundle = match name.as_str() {
        "cm" => {
            let ids: Vec<i64> = match ids {
                Some(ids) => {
                    if n.is_some_and(|n| n != ids.len()) {
                        return Err(Error::InvalidArgument(format!(
                            "N = {size} disagrees with {} identifiers",
                            ids.len()
                        )));
                    }
                    ids.to_vec()
                }
                None => (1..=size as i64).collect(),
            };
            make_cm(&ids)?
        }
        "la" => make_alternator(size)?,
        "pif" => make_pif(size)?,
        "abp" => {
            if n.is_some_and(|n| n != 2) {
                return Err(Error::InvalidArgument(
                    "the alternating-bit protocol has exactly 2 processes".into(),
                ));
            }
            make_abp()?
        }
        "le" => return Ok(Loaded::Fixture(make_le(size)?)),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown protocol `{other}` (expected one of {})",
                BUILTINS.join(", ")
            )))
        }
    };
    Ok(Loaded::Bundle {
        name,
        bundle: Box::new(bundle),
        source: None,
    })
}

pub fn load(sel: &Selector) -> Result<Loaded> {
    let Some((text, origin)) = &sel.source else {
        let name = sel
            .protocol
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("select a protocol with --protocol or --file".into()))?;
        return builtin(name, sel.n, sel.ids.as_deref());
    };
    let opts = ParseOptions {
        n: sel.n,
        ids: sel.ids.clone(),
    };
    let program = parse_protocol(text, &opts).map_err(Error::Parse)?.program;
    let Some(name) = &sel.protocol else {
        return Ok(Loaded::Program {
            program,
            source: Some(origin.clone()),
        });
    };
    let ids = program.ids();
    let reference = builtin(name, Some(program.n()), (name == "cm").then_some(&ids[..]))?;
    let Loaded::Bundle { name, bundle, .. } = reference else {
        return Err(Error::InvalidArgument(
            "leader election has no program to compare against".into(),
        ));
    };
    if program.schema() != bundle.program.schema() {
        return Err(Error::Mapping(format!(
            "variables of `{origin}` differ from the built-in `{name}` ({})",
            bundle.program.schema()
        )));
    }
    let mapping = StateMapping::new(&program, bundle.mapping.kind().clone())?;
    Ok(Loaded::Bundle {
        name,
        bundle: Box::new(ProtocolBundle {
            program,
            mapping,
            specs: bundle.specs,
            invariants: bundle.invariants,
        }),
        source: Some(origin.clone()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Check {
    Closed,
    Convergence,
    Stabilizing,
    Ideal,
    PifCoverage,
    MergeSymmetry,
}

impl std::str::FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        <Check as clap::ValueEnum>::from_str(s, true)
            .map_err(|_| Error::InvalidArgument(format!("unknown check `{s}`")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub checks: Vec<Check>,
    pub spec: Option<String>,
    pub predicate: Option<String>,
    pub stutter_policy: Option<StutterPolicy>,
}

/// Resolves a predicate by name (`true` or a bundle invariant) or as a partial
/// state such as `st.1=i st.2=rq`.
pub fn predicate(loaded: &Loaded, name: Option<&str>) -> Result<Predicate> {
    let bundle = loaded.bundle();
    let Some(name) = name else {
        return Ok(bundle
            .and_then(|b| b.invariants.first().cloned())
            .unwrap_or_else(Predicate::always));
    };
    if name == "true" {
        return Ok(Predicate::always());
    }
    if let Some(p) = bundle.and_then(|b| b.invariant(name)) {
        return Ok(p.clone());
    }
    if name.contains('=') {
        return pattern(loaded.require_program()?.schema(), name);
    }
    let mut known = vec!["true".to_string()];
    known.extend(bundle.iter().flat_map(|b| b.invariants.iter().map(|p| p.name.clone())));
    Err(Error::InvalidArgument(format!(
        "unknown predicate `{name}` (expected {} or var=value pairs)",
        known.join(", ")
    )))
}

fn pattern(schema: &Schema, text: &str) -> Result<Predicate> {
    let mut wanted = Vec::new();
    for pair in text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|p| !p.is_empty() && *p != "&&")
    {
        let (label, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("expected `var=value`, found `{pair}`")))?;
        let slot = schema
            .slot_by_label(label)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variable `{label}`")))?;
        let v = schema
            .slot(slot)
            .domain
            .lookup(value)
            .ok_or_else(|| Error::InvalidArgument(format!("value `{value}` is not in the domain of `{label}`")))?;
        wanted.push((slot, v));
    }
    Ok(Predicate::new(text.trim(), move |s: &ProgramState| {
        wanted.iter().all(|&(i, v)| s.values()[i] == v)
    }))
}

fn pick_spec(
    bundle: &ProtocolBundle,
    name: Option<&str>,
    ideal: bool,
    policy: Option<StutterPolicy>,
) -> Result<Specification> {
    let spec = match name {
        Some(n) => bundle.spec(n).ok_or_else(|| {
            let names: Vec<&str> = bundle.specs.iter().map(|s| s.name.as_str()).collect();
            Error::InvalidArgument(format!("unknown specification `{n}` (expected {})", names.join(", ")))
        })?,
        None if ideal => bundle.specs.last().expect("bundles have a specification"),
        None => bundle.primary_spec(),
    };
    let spec = spec.clone();
    Ok(match policy {
        Some(p) => spec.with_stutter_policy(p),
        None => spec,
    })
}

pub fn verify(loaded: &Loaded, opts: &VerifyOptions) -> Result<Report> {
    let program = loaded.require_program()?;
    let ts = TransitionSystem::build(program)?;
    let mut report = Report::new("verify", loaded.subject());
    let checks = if opts.checks.is_empty() {
        vec![if loaded.bundle().is_some() {
            Check::Ideal
        } else {
            Check::Convergence
        }]
    } else {
        opts.checks.clone()
    };
    for check in checks {
        report.push(run_check(loaded, &ts, check, opts)?);
    }
    Ok(report)
}

fn run_check(loaded: &Loaded, ts: &TransitionSystem, check: Check, opts: &VerifyOptions) -> Result<Verdict> {
    let pred = || predicate(loaded, opts.predicate.as_deref());
    Ok(match check {
        Check::Closed => check_closed(ts, &pred()?),
        Check::Convergence => check_convergence(ts, &pred()?),
        Check::Stabilizing => {
            let b = loaded.require_bundle("the stabilizing check")?;
            let spec = pick_spec(b, opts.spec.as_deref(), false, opts.stutter_policy)?;
            check_stabilizing(ts, &b.mapping, &spec, &pred()?)?
        }
        Check::Ideal => {
            let b = loaded.require_bundle("the ideal check")?;
            let spec = pick_spec(b, opts.spec.as_deref(), true, opts.stutter_policy)?;
            check_ideal_stabilizing(ts, &b.mapping, &spec)?
        }
        Check::PifCoverage => {
            pif::decode(ts.program().schema(), ts.state(0).values())?;
            pif::coverage(ts)
        }
        Check::MergeSymmetry => {
            let b = loaded.require_bundle("the merge-symmetry check")?;
            merge_symmetry(ts, &b.mapping)?
        }
    })
}

fn merge_symmetry(ts: &TransitionSystem, mapping: &StateMapping) -> Result<Verdict> {
    let start = Instant::now();
    let m = check_merge_symmetry(mapping, None)?;
    let target = mapping.target();
    let v = match &m.witness {
        None => Verdict::holds("merge-symmetry"),
        Some(w) => Verdict::fails("merge-symmetry", merge_witness(target, w, &m.donors)),
    };
    Ok(v.with_note(format!("mapping {}", mapping.describe()))
        .with_note(format!(
            "image has {} states; its merge closure has {}",
            m.image_size, m.closure_size
        ))
        .with_stats(Stats {
            states: ts.len() as u64,
            edges: ts.edge_count() as u64,
            components: None,
            elapsed_ms: start.elapsed().as_millis() as u64,
        }))
}

fn merge_witness(schema: &Schema, state: &SpecState, donors: &[Option<SpecState>]) -> Witness {
    Witness::Merge {
        state: schema.render(state.values()),
        donors: donors
            .iter()
            .map(|d| d.as_ref().map(|d| schema.render(d.values())))
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct SimulateOptions {
    /// `random`, `all-idle` (every variable at its first value) or a state literal.
    pub from: String,
    pub policy: Policy,
    pub steps: usize,
    pub seed: u64,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        Self {
            from: "random".into(),
            policy: Policy::UniformRandom,
            steps: 20,
            seed: 0,
        }
    }
}

pub fn start_state(program: &Program, from: &str, seed: u64) -> Result<ProgramState> {
    match from.trim() {
        "random" => random_state(program, seed),
        "all-idle" | "initial" => Ok(program.state_from_index(0)),
        literal => program.parse_state(literal),
    }
}

pub fn simulate(loaded: &Loaded, opts: &SimulateOptions) -> Result<Report> {
    let program = loaded.require_program()?;
    let start = start_state(program, &opts.from, opts.seed)?;
    let comp = run(program, &start, opts.steps, opts.seed, opts.policy)?;
    let seq = loaded
        .bundle()
        .map(|b| (b.mapping.target().clone(), image(&comp, &b.mapping)));
    let policy = match opts.policy {
        Policy::UniformRandom => "uniform-random",
        Policy::RoundRobin => "round-robin",
    };
    let mut report = Report::new("simulate", loaded.subject());
    report.simulation = Some(SimulationReport::new(
        program,
        &comp,
        seq.as_ref().map(|(s, q)| (&**s, q)),
        policy,
        opts.seed,
    ));
    Ok(report)
}

/// Input of the impossibility test.
#[derive(Debug, Clone)]
pub enum Fixture<'a> {
    Loaded(&'a Loaded),
    /// Allowed and disallowed state files, as text with a display name each.
    Files {
        allowed: (&'a str, &'a str),
        disallowed: (&'a str, &'a str),
    },
}

fn possibility_verdict(check: &str, schema: &Schema, base: &str, p: &Possibility, elapsed: u64) -> Verdict {
    let v = match &p.witness {
        None => Verdict::holds(check),
        Some(w) => Verdict::fails(check, merge_witness(schema, w, &p.donors)),
    };
    v.with_note(format!(
        "{}: closing {} {base} states gives {}",
        if p.possible { "possible" } else { "impossible" },
        p.base_size,
        p.closure_size
    ))
    .with_stats(Stats {
        states: schema.universe_size().unwrap_or(0) as u64,
        edges: 0,
        components: None,
        elapsed_ms: elapsed,
    })
}

fn spec_sets(spec: &Specification) -> Result<(BTreeSet<SpecState>, BTreeSet<SpecState>)> {
    spec.schema.checked_size(crate::kernel::state_cap())?;
    Ok(spec
        .schema
        .iter_universe()
        .map(SpecState::from_values)
        .partition(|s| spec.allows_state(s)))
}

/// Runs the merge-closure impossibility test. A verdict that holds means ideal
/// stabilization is not ruled out.
pub fn impossibility(fixture: &Fixture<'_>, spec: Option<&str>) -> Result<Report> {
    let start = Instant::now();
    let ms = || start.elapsed().as_millis() as u64;
    match fixture {
        Fixture::Loaded(Loaded::Fixture(le)) => {
            let mut report = Report::new("impossibility", Loaded::Fixture(le.clone()).subject());
            let forced = check_ideal_possibility_subset(&le.schema, &le.forced, &le.allowed, &le.disallowed)?;
            report.push(possibility_verdict(
                "ideal-possibility",
                &le.schema,
                "forced",
                &forced,
                ms(),
            ));
            let all = check_ideal_possibility(&le.schema, &le.allowed, &le.disallowed)?;
            report.push(possibility_verdict(
                "ideal-possibility-allowed",
                &le.schema,
                "allowed",
                &all,
                ms(),
            ));
            Ok(report)
        }
        Fixture::Loaded(loaded) => {
            let b = loaded.require_bundle("the impossibility test")?;
            let spec = pick_spec(b, spec, false, None)?;
            let (allowed, disallowed) = spec_sets(&spec)?;
            let p = check_ideal_possibility(&spec.schema, &allowed, &disallowed)?;
            let mut report = Report::new("impossibility", loaded.subject());
            report.push(
                possibility_verdict("ideal-possibility", &spec.schema, "allowed", &p, ms())
                    .with_note(format!("specification {}", spec.name)),
            );
            Ok(report)
        }
        Fixture::Files { allowed, disallowed } => {
            let schema = infer_schema(&[allowed.0, disallowed.0])?;
            let read = |(text, name): (&str, &str)| {
                read_states(&schema, text).map_err(|e| Error::InvalidArgument(format!("{name}: {e}")))
            };
            let a = read(*allowed)?;
            let d = read(*disallowed)?;
            let p = check_ideal_possibility(&schema, &a, &d)?;
            let subject = Subject {
                protocol: "state-files".into(),
                n: schema.n(),
                universe: schema.universe_size().map(|u| u as u64),
                source: Some(format!("{} | {}", allowed.1, disallowed.1)),
                ..Subject::default()
            };
            let mut report = Report::new("impossibility", subject);
            report.push(possibility_verdict("ideal-possibility", &schema, "allowed", &p, ms()));
            Ok(report)
        }
    }
}

pub fn export_dot(loaded: &Loaded, condensed: bool, predicate_name: Option<&str>) -> Result<String> {
    let ts = TransitionSystem::build(loaded.require_program()?)?;
    let pred = predicate_name.map(|n| predicate(loaded, Some(n))).transpose()?;
    Ok(to_dot(
        &ts,
        &DotOptions {
            condensed,
            highlight: pred.as_ref(),
        },
    ))
}

pub fn render_source(loaded: &Loaded) -> Result<String> {
    Ok(render(loaded.require_program()?))
}
