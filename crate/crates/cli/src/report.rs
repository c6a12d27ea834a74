//! Report sections for each subcommand, built as ordered JSON values.

use resgraph_core::conditions::{check_condition_a, check_condition_c, constructive_monomial_sequence};
use resgraph_core::cycle::{Cycle, Lattice, QCycle};
use resgraph_core::export::{build_export, cycle_map, monomial_map};
use resgraph_core::graph::{Branch, ResolutionGraph};
use resgraph_core::group::{action_table, check_g_homogeneous, discriminant_group};
use resgraph_core::linalg::Rational;
use resgraph_core::nws::{build_nws, check_quasihomogeneous, weight_vector, CoefficientScheme};
use resgraph_core::poly::Monomial;
use resgraph_core::splice::{build_splice, semigroup_check, SpliceDiagram};
use resgraph_core::{Error, Result};
use serde_json::{json, Map, Value};

const CONDITION_B: &str = "Condition B (existence of the required sections) is analytic and is not \
     checked; it holds for rational and minimally elliptic singularities";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
        }
    }
}

/// Everything a subcommand produces for one input.
pub struct Outcome {
    pub status: Status,
    pub sections: Map<String, Value>,
    pub warnings: Vec<String>,
    pub assumptions: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { status: Status::Ok, sections: Map::new(), warnings: Vec::new(), assumptions: Vec::new() }
    }

    fn section(&mut self, name: &str, value: Value) {
        self.sections.insert(name.to_string(), value);
    }

    fn fail_if(&mut self, failed: bool) {
        if failed {
            self.status = Status::Fail;
        }
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub trace: bool,
    pub scheme: CoefficientScheme,
    pub delta: Option<Vec<u64>>,
}

fn rat(q: &Rational) -> Value {
    Value::String(q.to_string())
}

fn qcycle(l: &Lattice, d: &QCycle) -> Value {
    serde_json::to_value(cycle_map(l, d)).expect("cycle serializes")
}

fn int_cycle(l: &Lattice, z: &Cycle) -> Value {
    let g = l.graph();
    Value::Object((0..g.len()).map(|i| (g.id(i).to_string(), json!(z.coeff(i)))).collect())
}

fn ids(g: &ResolutionGraph, v: &[usize]) -> Vec<String> {
    v.iter().map(|&i| g.id(i).to_string()).collect()
}

fn variable_names(l: &Lattice) -> Vec<String> {
    ids(l.graph(), l.ends())
}

/// `x1 = <end>, ...` in canonical end order.
fn variables(l: &Lattice) -> Value {
    Value::Array(
        variable_names(l)
            .into_iter()
            .enumerate()
            .map(|(k, id)| json!({"var": format!("x{}", k + 1), "end": id}))
            .collect(),
    )
}

fn branch(g: &ResolutionGraph, b: &Branch) -> Value {
    json!({"attach": g.id(b.attach), "vertices": ids(g, &b.vertices)})
}

fn var_labels(n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("x{k}")).collect()
}

pub fn validate(g: &ResolutionGraph) -> Outcome {
    let mut out = Outcome::new();
    let report = g.validate();
    let classes = g.classify_vertices();
    out.section(
        "validation",
        json!({
            "ok": report.ok,
            "failures": report.failures.iter().map(|f| f.code()).collect::<Vec<_>>(),
            "vertices": g.len(),
            "edges": g.edges().len(),
            "ends": ids(g, &classes.ends),
            "nodes": ids(g, &classes.nodes),
        }),
    );
    out.fail_if(!report.ok);
    out
}

pub fn invariants(l: &Lattice) -> Result<Outcome> {
    let mut out = Outcome::new();
    let g = l.graph();
    let grp = discriminant_group(l)?;
    let class = l.classify_singularity();
    out.section(
        "determinant",
        json!({"det": l.det().to_string(), "abs": l.det_abs().to_string()}),
    );
    out.section(
        "group",
        json!({
            "order": grp.order().to_string(),
            "invariant_factors": grp.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "generators": grp.generators.iter().zip(&grp.generator_ends).map(|(c, e)| json!({
                "cycle": qcycle(l, c),
                "end": e.map(|k| g.id(k).to_string()),
            })).collect::<Vec<_>>(),
        }),
    );
    out.section("fundamental_cycle", int_cycle(l, &class.fundamental_cycle));
    out.section("arithmetic_genus", rat(&class.genus));
    out.section(
        "classification",
        json!({
            "class": class.class,
            "explanation": class.explanation,
            "external_criteria": true,
        }),
    );
    out.section("canonical_cycle", qcycle(l, &l.canonical_cycle()));
    if !class.minus_one_vertices.is_empty() {
        out.warnings.push(format!(
            "vertices with self-intersection -1 ({}): the graph may not be minimal; no blow-downs were performed",
            ids(g, &class.minus_one_vertices).join(", ")
        ));
    }
    Ok(out)
}

pub fn conditions(l: &Lattice, opts: &Options) -> Result<Outcome> {
    let mut out = Outcome::new();
    let g = l.graph();
    let names = variable_names(l);
    let a = check_condition_a(l)?;
    let c = check_condition_c(l);
    out.section("variables", variables(l));
    let entries: Vec<Value> = a
        .entries
        .iter()
        .map(|e| {
            let mut entry = json!({
                "node": g.id(e.node),
                "branch": branch(g, &e.branch),
                "witness": e.witness.as_ref().map(|w| json!({
                    "monomial": monomial_map(&names, &Monomial(w.exponents.clone())),
                    "degree": w.degree(),
                    "cycle": qcycle(l, &w.cycle),
                })),
            });
            if opts.trace && c.pass {
                let seq = match constructive_monomial_sequence(l, e.node, &e.branch, None) {
                    Ok(s) => json!({"steps": s.trace.iter().map(|d| qcycle(l, d)).collect::<Vec<_>>()}),
                    Err(err) => json!({"error": {"code": err.code(), "message": err.to_string()}}),
                };
                entry["construction"] = seq;
            }
            entry
        })
        .collect();
    let a_status = if a.vacuous { "vacuous" } else if a.pass { "pass" } else { "fail" };
    out.section("condition_a", json!({"status": a_status, "entries": entries}));
    let c_entries: Vec<Value> = c
        .entries
        .iter()
        .map(|e| {
            json!({
                "vertex": g.id(e.vertex),
                "branch": branch(g, &e.branch),
                "product": e.product,
                "ok": e.ok(),
            })
        })
        .collect();
    out.section(
        "condition_c",
        json!({"status": if c.pass { "pass" } else { "fail" }, "star_shaped": c.star_shaped, "entries": c_entries}),
    );
    if opts.trace && !c.pass {
        out.warnings.push("construction traces are only produced when condition C holds".into());
    }
    out.assumptions.push(CONDITION_B.into());
    out.fail_if(!a.pass || !c.pass);
    Ok(out)
}

pub fn nws(l: &Lattice, opts: &Options) -> Result<Outcome> {
    let mut out = Outcome::new();
    let g = l.graph();
    let names = variable_names(l);
    let labels = var_labels(names.len());
    let sys = build_nws(l, opts.scheme)?;
    let delta = opts.delta.clone().unwrap_or_else(|| vec![1; names.len()]);
    out.section("variables", variables(l));
    out.section(
        "coeff_scheme",
        match opts.scheme {
            CoefficientScheme::UnitIndex => json!({"name": "unit-index"}),
            CoefficientScheme::SeededRandom { seed } => json!({"name": "seeded-random", "seed": seed}),
        },
    );
    let mut nodes = Vec::new();
    for ns in &sys.nodes {
        let w = weight_vector(l, ns.node, &delta)?;
        if !w.e_is_integral() {
            out.warnings.push(format!("node {}: multiplier e = {} is not an integer", g.id(ns.node), w.e));
        }
        nodes.push(json!({
            "node": g.id(ns.node),
            "monomials": ns.monomials().iter().map(|m| m.display(&labels).to_string()).collect::<Vec<_>>(),
            "matrix": ns.matrix.to_rows().iter().map(|r| r.iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "forms": ns.forms.iter().map(|f| f.display(&labels).to_string()).collect::<Vec<_>>(),
            "weight": {"delta": w.delta, "w": w.w, "e": rat(&w.e)},
        }));
    }
    if sys.is_empty() {
        out.warnings.push("graph has no nodes; the system is empty".into());
    }
    out.section("nodes", Value::Array(nodes));
    let qh = check_quasihomogeneous(l, &sys);
    out.section("quasihomogeneous", json!(qh.pass));
    out.assumptions.push(CONDITION_B.into());
    out.fail_if(!qh.pass);
    Ok(out)
}

/// Splice input is either a resolution graph or a diagram file.
pub enum SpliceInput {
    Graph(Box<Lattice>),
    Diagram(SpliceDiagram),
}

pub fn splice(input: &SpliceInput) -> Result<Outcome> {
    let mut out = Outcome::new();
    let diagram = match input {
        SpliceInput::Graph(l) => build_splice(l.graph())?,
        SpliceInput::Diagram(d) => d.clone(),
    };
    let value: Value = serde_json::from_str(&diagram.to_json()).expect("diagram serializes");
    out.section("diagram", value);
    if diagram.no_nodes() {
        out.warnings.push("diagram has no nodes; the semigroup condition is vacuous".into());
        out.section("semigroup", json!({"status": "vacuous", "entries": []}));
        return Ok(out);
    }
    let report = semigroup_check(&diagram)?;
    out.section(
        "semigroup",
        json!({"status": if report.pass { "pass" } else { "fail" }, "entries": report.entries}),
    );
    out.fail_if(!report.pass);
    Ok(out)
}

pub fn action(l: &Lattice, opts: &Options) -> Result<Outcome> {
    let mut out = Outcome::new();
    let g = l.graph();
    let grp = discriminant_group(l)?;
    let table = action_table(l, &grp);
    out.section("variables", variables(l));
    out.section(
        "group",
        json!({
            "order": grp.order().to_string(),
            "invariant_factors": grp.invariant_factors.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        }),
    );
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "generator": qcycle(l, &r.generator),
                "order": r.order.to_string(),
                "rotations": r.rotations.iter().map(rat).collect::<Vec<_>>(),
            })
        })
        .collect();
    out.section("action_table", json!({"rows": rows, "faithful": table.faithful}));
    if table.faithful.is_none() {
        out.warnings.push("group too large to check faithfulness by enumeration".into());
    }
    match build_nws(l, opts.scheme) {
        Ok(sys) => {
            let grading = check_g_homogeneous(l, &grp, &sys);
            let forms: Vec<Value> = grading
                .forms
                .iter()
                .map(|f| {
                    json!({
                        "node": g.id(f.node),
                        "form": f.form + 1,
                        "class": f.class.0.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                        "characters": f.characters.iter().map(rat).collect::<Vec<_>>(),
                        "ok": f.ok,
                    })
                })
                .collect();
            out.section("g_homogeneity", json!({"status": if grading.pass { "pass" } else { "fail" }, "forms": forms}));
            out.fail_if(!grading.pass);
        }
        Err(e @ Error::ConditionAFails { .. }) => {
            out.warnings.push(format!("no system to grade: {e}"));
            out.section("g_homogeneity", Value::Null);
        }
        Err(e) => return Err(e),
    }
    out.assumptions.push(CONDITION_B.into());
    Ok(out)
}

pub fn export(l: &Lattice, opts: &Options) -> Result<String> {
    Ok(build_export(l, opts.scheme)?.to_json())
}
