use std::collections::BTreeMap;
use std::time::Instant;

use ccm_core::coset::{self, Coset};
use ccm_core::dc::{self, FafWitness, QuotientChain};
use ccm_core::exec::Execution;
use ccm_core::mean::{self, MeanVector};
use ccm_core::subgroup::Subgroup;
use ccm_core::witness::{self, AtomSet, WitnessOptions, WitnessSet};
use ccm_core::{coset_ring, verify, Error, GroupHandle};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::{self, rat, Report, Table};
use crate::spec::{self, CayleyView, Params, SpecFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Dc,
    DcStrata,
    DcRf,
    Strata,
    NeumannCheck,
    Witness,
    Folner,
    Defect,
    Smooth,
    Kmu,
    Transversal,
    FafWitness,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub cap: u64,
    pub mode: Execution,
    /// Restricts `verify-all` to these criteria.
    pub only: Vec<u8>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { cap: 10_000, mode: Execution::Parallel, only: Vec::new() }
    }
}

struct Output {
    result: Value,
    table: Option<Table>,
    failures: usize,
}

impl Output {
    fn plain(result: Value) -> Self {
        Output { result, table: None, failures: 0 }
    }

    fn tabular(result: Value, table: Table) -> Self {
        Output { result, table: Some(table), failures: 0 }
    }
}

pub fn run(command: Command, spec: Option<&SpecFile>, opts: &RunOptions) -> CliResult<Report> {
    let start = Instant::now();
    let output = match command {
        Command::VerifyAll => verify_all(opts)?,
        _ => {
            let spec = spec.ok_or_else(|| CliError::schema(format!("`{}` needs --spec", command.name())))?;
            let g = spec::build_group(&spec.group)?;
            let mut out = dispatch(command, &g, &spec.params, opts)?;
            if let Value::Object(m) = &mut out.result {
                m.insert("group".into(), report::group(&g));
            }
            out
        }
    };
    let request = json!({
        "cap": opts.cap,
        "spec": spec.map(|s| serde_json::to_value(s).expect("specs are plain data")),
    });
    Ok(Report {
        command: command.name(),
        request,
        result: output.result,
        table: output.table,
        timing_ms: start.elapsed().as_millis(),
        failures: output.failures,
    })
}

fn dispatch(command: Command, g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    match command {
        Command::Dc => dc_finite(g, opts),
        Command::DcStrata => dc_strata(g, opts),
        Command::DcRf => dc_rf(g, p, opts),
        Command::Strata => strata(g, opts),
        Command::NeumannCheck => neumann(g, p, opts),
        Command::Witness => witness_set(g, p, opts),
        Command::Folner => folner(g, p, opts),
        Command::Defect => defect(g, p, opts),
        Command::Smooth => smooth(g, p, opts),
        Command::Kmu => kmu(g, p, opts),
        Command::Transversal => transversal(g, p, opts),
        Command::FafWitness => faf(g),
        Command::VerifyAll => unreachable!("handled before the group is built"),
    }
}

fn require<'a, T>(field: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    field.as_ref().ok_or_else(|| CliError::schema(format!("missing params.{name}")))
}

fn finite_order(g: &GroupHandle, cap: u64) -> CliResult<u64> {
    let order = g
        .order()
        .ok_or_else(|| Error::UnsupportedForClass(format!("{} is infinite; exact enumeration needs a finite group", g.name())))?;
    if order > cap {
        return Err(Error::QuotientTooLarge { order, cap }.into());
    }
    Ok(order)
}

fn dc_finite(g: &GroupHandle, opts: &RunOptions) -> CliResult<Output> {
    let order = finite_order(g, opts.cap)?;
    let dc = dc::dc_finite(g, opts.mode)?;
    Ok(Output::plain(json!({ "dc": rat(&dc), "order": order })))
}

fn dc_strata(g: &GroupHandle, opts: &RunOptions) -> CliResult<Output> {
    let t = dc::centralizer_strata(g, opts.mode)?;
    let strata: Vec<Value> = t.strata.iter().map(|s| json!({ "index": s.index, "measure": rat(&s.measure) })).collect();
    let mut rows: Vec<Vec<String>> =
        t.strata.iter().map(|s| vec![s.index.to_string(), ccm_core::rational::format(&s.measure)]).collect();
    rows.push(vec!["infinite".into(), ccm_core::rational::format(&t.infinite_measure)]);
    Ok(Output::tabular(
        json!({ "dc": rat(&t.dc()), "strata": strata, "infinite_measure": rat(&t.infinite_measure) }),
        Table { headers: vec!["index", "measure"], rows },
    ))
}

fn strata(g: &GroupHandle, opts: &RunOptions) -> CliResult<Output> {
    let t = dc::centralizer_strata(g, opts.mode)?;
    let ring = |set: &coset_ring::CosetRingElement| {
        let reps: Vec<_> = set.finite_reps().cloned().collect();
        let infinite: Vec<Value> = set
            .infinite_part()
            .iter()
            .map(|c| json!({ "rep": report::element(g, c.rep()), "subgroup": report::subgroup(c.subgroup()) }))
            .collect();
        json!({
            "denominator": report::subgroup(set.denominator()),
            "finite_cosets": report::elements(g, &reps),
            "infinite_cosets": infinite,
        })
    };
    let mut strata = Vec::new();
    let mut rows = Vec::new();
    for s in &t.strata {
        strata.push(json!({ "index": s.index, "measure": rat(&s.measure), "set": ring(&s.set) }));
        rows.push(vec![
            s.index.to_string(),
            ccm_core::rational::format(&s.measure),
            s.set.finite_count().to_string(),
            s.set.infinite_part().len().to_string(),
        ]);
    }
    rows.push(vec![
        "infinite".into(),
        ccm_core::rational::format(&t.infinite_measure),
        t.infinite.finite_count().to_string(),
        t.infinite.infinite_part().len().to_string(),
    ]);
    Ok(Output::tabular(
        json!({
            "dc": rat(&t.dc()),
            "strata": strata,
            "infinite": ring(&t.infinite),
            "infinite_measure": rat(&t.infinite_measure),
        }),
        Table { headers: vec!["index", "measure", "finite_cosets", "infinite_cosets"], rows },
    ))
}

fn dc_rf(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let chain = match (&p.chain, &p.moduli) {
        (Some(members), None) => {
            let subgroups = members.iter().map(|m| spec::build_subgroup(g, m)).collect::<CliResult<Vec<Subgroup>>>()?;
            if p.nested.unwrap_or(true) {
                QuotientChain::nested(subgroups).map_err(|e| match e {
                    Error::InvalidRequest(msg) => CliError::Schema(msg),
                    e => e.into(),
                })?
            } else {
                QuotientChain::family(subgroups)?
            }
        }
        (None, Some(moduli)) => {
            let chain = dc::congruence_family(g, moduli)?;
            if p.nested == Some(true) {
                if let Some(i) = chain.first_unnested_step() {
                    return Err(CliError::Schema(format!(
                        "congruence subgroups for moduli {} and {} are not nested",
                        moduli[i],
                        moduli[i + 1]
                    )));
                }
            }
            chain
        }
        _ => return Err(CliError::schema("dc-rf needs exactly one of params.chain and params.moduli")),
    };
    let report = dc::dc_rf_chain(&chain, opts.cap, opts.mode)?;
    let limit = match dc::dc_strata(g, opts.mode) {
        Ok(x) => Some(x),
        Err(Error::UnsupportedForClass(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut result = serde_json::to_value(&report).expect("chain reports are plain data");
    if let (Some(limit), Value::Object(m)) = (&limit, &mut result) {
        m.insert("strata_dc".into(), rat(limit));
        m.insert("dominates".into(), json!(report.terms.iter().all(|t| t.dc >= *limit)));
    }
    let rows = report
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| vec![i.to_string(), t.order.to_string(), ccm_core::rational::format(&t.dc)])
        .collect();
    Ok(Output::tabular(result, Table { headers: vec!["member", "order", "dc"], rows }))
}

fn neumann(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let cosets = require(&p.cosets, "cosets")?.iter().map(|c| spec::build_coset(g, c)).collect::<CliResult<Vec<Coset>>>()?;
    let r = coset_ring::neumann_check(&cosets, opts.mode)?;
    Ok(Output::plain(json!({ "covers": r.covers, "sum": rat(&r.reciprocal_sum), "cosets": cosets.len() })))
}

fn witness_options(p: &Params, opts: &RunOptions) -> WitnessOptions {
    let d = WitnessOptions::default();
    WitnessOptions { horizon: p.horizon.unwrap_or(d.horizon), mode: opts.mode, ..d }
}

fn witness_output(g: &GroupHandle, w: &WitnessSet, extra: Value) -> Output {
    let mut result = json!({
        "elements": report::elements(g, &w.elements),
        "size": w.elements.len(),
        "certificate": serde_json::to_value(&w.certificate).expect("certificates are plain data"),
    });
    if let (Value::Object(m), Value::Object(e)) = (&mut result, extra) {
        m.extend(e);
    }
    let rows = w.elements.iter().map(|x| vec![g.format_element(x)]).collect();
    Output::tabular(result, Table { headers: vec!["element"], rows })
}

fn witness_set(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let wopts = witness_options(p, opts);
    if let Some(cs) = &p.constraints {
        if p.atoms.is_some() {
            return Err(CliError::schema("give either params.constraints or params.atoms, not both"));
        }
        let constraints = cs.iter().map(|c| spec::build_constraint(g, c)).collect::<CliResult<Vec<_>>>()?;
        let w = witness::build_witness(g, &constraints, wopts)?;
        return Ok(witness_output(g, &w, json!({ "kind": "subgroups" })));
    }
    let atoms = spec::build_atoms(g, require(&p.atoms, "atoms or params.constraints")?)?;
    let n = *require(&p.size, "size")?;
    let w = match &p.shifts {
        Some(shifts) => {
            let shifts = spec::build_elements(g, shifts)?;
            witness::disjoint_translates_witness(g, &atoms, n, &shifts, wopts)?
        }
        None => witness::approximate_mean(g, &atoms, n, wopts)?,
    };
    let quotas: Vec<usize> = witness::quotas(&atoms.iter().map(|a| a.target.clone()).collect::<Vec<_>>(), n);
    Ok(witness_output(g, &w, json!({ "kind": if p.shifts.is_some() { "disjoint" } else { "mean" }, "quotas": quotas })))
}

fn folner(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let k = spec::build_elements(g, require(&p.folner, "folner")?)?;
    let eps = spec::parse_rational(require(&p.tolerance, "tolerance")?)?;
    let wopts = witness_options(p, opts);
    match &p.atoms {
        None => {
            let (s, ratios) = witness::folner_set(g, &k, &eps, wopts)?;
            let result = json!({
                "elements": report::elements(g, &s),
                "size": s.len(),
                "ratios": ratios.iter().map(rat).collect::<Vec<_>>(),
            });
            let rows = s.iter().map(|x| vec![g.format_element(x)]).collect();
            Ok(Output::tabular(result, Table { headers: vec!["element"], rows }))
        }
        Some(atoms) => {
            let sets = atoms
                .iter()
                .map(|a| match spec::build_atom_set(g, a)? {
                    AtomSet::Ring(r) => Ok(r),
                    AtomSet::Finite(_) => Err(CliError::schema("amplified Følner witnesses take coset atoms only")),
                })
                .collect::<CliResult<Vec<_>>>()?;
            let w = witness::folner_amplify(g, &sets, &k, &eps, wopts)?;
            Ok(witness_output(g, &w, json!({ "kind": "amplified" })))
        }
    }
}

fn mean_vector(view: &CayleyView, p: &Params) -> CliResult<MeanVector> {
    match &p.weights {
        None => Ok(MeanVector::uniform(&view.table)?),
        Some(w) => {
            let t = view.table.as_cayley().expect("views are Cayley groups");
            if let Some(l) = w.keys().find(|l| t.find_label(l).is_none()) {
                return Err(spec::unknown_label(l, t.labels()));
            }
            let parsed = w
                .iter()
                .map(|(k, v)| Ok((k.clone(), spec::parse_rational(v)?)))
                .collect::<CliResult<BTreeMap<_, _>>>()?;
            Ok(MeanVector::from_labels(&view.table, &parsed)?)
        }
    }
}

fn finite_view(g: &GroupHandle, opts: &RunOptions) -> CliResult<CayleyView> {
    finite_order(g, opts.cap)?;
    CayleyView::new(g, opts.cap)
}

fn defect(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let view = finite_view(g, opts)?;
    let mu = mean_vector(&view, p)?;
    Ok(Output::plain(json!({
        "left": rat(&mean::defect_left(&mu, opts.mode)),
        "right": rat(&mean::defect_right(&mu, opts.mode)),
    })))
}

fn smooth(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let view = finite_view(g, opts)?;
    let mu = mean_vector(&view, p)?;
    let (nu, r) = mean::smoothing_report(&mu, opts.mode);
    let weights: BTreeMap<String, Value> = nu.to_labels().iter().map(|(k, v)| (k.clone(), rat(v))).collect();
    let failures = usize::from(!r.holds);
    let report = serde_json::to_value(&r).expect("smoothing reports are plain data");
    Ok(Output { result: json!({ "weights": weights, "report": report }), table: None, failures })
}

fn kmu(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let view = finite_view(g, opts)?;
    let mu = mean_vector(&view, p)?;
    let order = view.reps.len() as u64;
    let ns: Vec<u64> = match p.n {
        Some(n) => vec![n],
        None => (1..=order).collect(),
    };
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    let mut failures = 0;
    for n in ns {
        let c = mean::kmu_strata_inequality(&mu, n)?;
        failures += usize::from(!c.holds);
        rows.push(vec![
            n.to_string(),
            ccm_core::rational::format(&c.lhs),
            ccm_core::rational::format(&c.rhs),
            c.holds.to_string(),
        ]);
        checks.push(json!({ "n": n, "lhs": rat(&c.lhs), "rhs": rat(&c.rhs), "holds": c.holds }));
    }
    let result = json!({
        "classes": mean::conjugacy_partition(&view.table)?.count(),
        "k_uniform": rat(&mean::k_uniform(&view.table)?),
        "k_mu": rat(&mean::k_mu(&mu)?),
        "checks": checks,
    });
    Ok(Output { result, table: Some(Table { headers: vec!["n", "lhs", "rhs", "holds"], rows }), failures })
}

fn transversal(g: &GroupHandle, p: &Params, opts: &RunOptions) -> CliResult<Output> {
    let view = finite_view(g, opts)?;
    let h = &view.table;
    let h2 = dc::square(h)?;
    let pair_of = |[a, b]: &[spec::ElementSpec; 2]| -> CliResult<ccm_core::Element> {
        Ok(dc::pair(h, view.index_of(g, a)?, view.index_of(g, b)?))
    };
    let gens = require(&p.pair_subgroup, "pair_subgroup")?.iter().map(pair_of).collect::<CliResult<Vec<_>>>()?;
    let k = Subgroup::generated(&h2, &gens)?;
    let reps = match &p.pair {
        Some(pr) => vec![pair_of(pr)?],
        None => coset::left_transversal(&k)?,
    };
    let show = |x: &ccm_core::Element| {
        let (a, b) = dc::unpair(h, x);
        (report::element(g, &view.reps[a]), report::element(g, &view.reps[b]))
    };
    let mut cosets = Vec::new();
    let mut missing = 0;
    for r in &reps {
        let found = dc::commuting_transversal(h, &k, r)?;
        missing += usize::from(found.is_none());
        let (a, b) = show(r);
        let found = found.map(|f| {
            let (x, y) = show(&f);
            json!([x, y])
        });
        cosets.push(json!({ "rep": [a, b], "commuting_pair": found }));
    }
    Ok(Output::plain(json!({
        "subgroup_order": k.order(),
        "cosets": cosets,
        "all_found": missing == 0,
    })))
}

fn faf(g: &GroupHandle) -> CliResult<Output> {
    let result = match dc::faf_witness(g)? {
        FafWitness::Witness { n0, h0 } => json!({
            "faf": true,
            "n0": { "generators": report::elements(g, &n0.canonical_generators()), "order": n0.order() },
            "h0": report::subgroup(&h0),
        }),
        FafWitness::NotFaf { reason } => json!({ "faf": false, "reason": reason }),
    };
    Ok(Output::plain(result))
}

fn verify_all(opts: &RunOptions) -> CliResult<Output> {
    let ids = if opts.only.is_empty() { verify::criterion_ids() } else { opts.only.clone() };
    let mut outcomes = Vec::new();
    for id in ids {
        outcomes.push(verify::run(id, opts.mode).ok_or_else(|| CliError::schema(format!("no criterion {id}")))?);
    }
    let failures = outcomes.iter().filter(|o| !o.passed).count();
    let rows = outcomes
        .iter()
        .map(|o| {
            vec![
                o.id.to_string(),
                o.title.to_string(),
                if o.passed { "PASS" } else { "FAIL" }.to_string(),
                o.elapsed_ms.to_string(),
                o.budget_ms.to_string(),
                o.detail.clone(),
            ]
        })
        .collect();
    let result = json!({
        "criteria": serde_json::to_value(&outcomes).expect("outcomes are plain data"),
        "passed": failures == 0,
    });
    Ok(Output {
        result,
        table: Some(Table { headers: vec!["criterion", "title", "status", "elapsed_ms", "budget_ms", "detail"], rows }),
        failures,
    })
}
