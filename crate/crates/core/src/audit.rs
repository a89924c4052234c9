//! Randomized checks of the pooling theorems.
//!
//! Each suite draws `cases` independent graphs (case `k` uses stream `k` of
//! the seed) and runs its checks. Hard checks are expected to hold for every
//! case; audit checks are claims under test, whose violations are counted
//! and kept as counterexamples.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{serialize_graph, EdgeClass, FuzzyGraph, EPSILON};
use crate::par;
use crate::pooling::{graphs_isomorphic, pool_cycle, pool_pair, pool_sequence, IsoMode, PoolPlan};
use crate::random::{
    case_rng, cycle_with_pendants, random_cfg, random_cycle, random_f_tree, random_graph, random_small_graph, vertex_name,
    weakest_run_cycle,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Commutativity,
    Cycle,
    Cfg,
    StrongDegree,
    FTree,
    FCycle,
    EdgeSetOrder,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Commutativity,
        Suite::Cycle,
        Suite::Cfg,
        Suite::StrongDegree,
        Suite::FTree,
        Suite::FCycle,
        Suite::EdgeSetOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Commutativity => "commutativity",
            Suite::Cycle => "cycle",
            Suite::Cfg => "cfg",
            Suite::StrongDegree => "strong-degree",
            Suite::FTree => "ftree",
            Suite::FCycle => "fcycle",
            Suite::EdgeSetOrder => "edge-set-order",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                format!("unknown suite {s:?}; expected one of {}", names.join(", "))
            })
    }
}

/// A failed check, with the graphs needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct Finding {
    pub case: usize,
    pub hard: bool,
    pub check: &'static str,
    pub message: String,
    pub graphs: Vec<(String, FuzzyGraph)>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Tally {
    checks: usize,
    failures: usize,
}

#[derive(Debug, Default)]
struct CaseOutcome {
    tallies: BTreeMap<(&'static str, bool), Tally>,
    findings: Vec<Finding>,
    counters: BTreeMap<&'static str, usize>,
}

impl CaseOutcome {
    /// Records one check; only the first failure of each check per case is
    /// kept as a finding.
    fn check(
        &mut self,
        case: usize,
        hard: bool,
        check: &'static str,
        ok: bool,
        detail: impl FnOnce() -> (String, Vec<(String, FuzzyGraph)>),
    ) {
        let tally = self.tallies.entry((check, hard)).or_default();
        tally.checks += 1;
        if ok {
            return;
        }
        tally.failures += 1;
        if tally.failures == 1 {
            let (message, graphs) = detail();
            self.findings.push(Finding {
                case,
                hard,
                check,
                message,
                graphs,
            });
        }
    }

    fn count(&mut self, counter: &'static str) {
        *self.counters.entry(counter).or_default() += 1;
    }
}

/// Per-check totals plus the kept counterexamples.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSummary {
    pub check: &'static str,
    pub hard: bool,
    pub checks: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: usize,
    pub summaries: Vec<CheckSummary>,
    pub findings: Vec<Finding>,
    /// Informational counts that are neither hard checks nor audited claims.
    pub counters: BTreeMap<&'static str, usize>,
}

impl SuiteReport {
    pub fn hard_failures(&self) -> usize {
        self.summaries.iter().filter(|s| s.hard).map(|s| s.failures).sum()
    }

    pub fn audit_violations(&self) -> usize {
        self.summaries.iter().filter(|s| !s.hard).map(|s| s.failures).sum()
    }

    pub fn total_checks(&self) -> usize {
        self.summaries.iter().map(|s| s.checks).sum()
    }

    pub fn has_violations(&self) -> bool {
        self.hard_failures() + self.audit_violations() > 0
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(w, "suite: {}", self.suite).unwrap();
        writeln!(w, "seed: {}", self.seed).unwrap();
        writeln!(w, "cases: {}", self.cases).unwrap();
        writeln!(w, "checks: {}", self.total_checks()).unwrap();
        writeln!(w, "hard failures: {}", self.hard_failures()).unwrap();
        writeln!(w, "audit violations: {}", self.audit_violations()).unwrap();
        for s in &self.summaries {
            let kind = if s.hard { "hard" } else { "audit" };
            writeln!(w, "  [{kind}] {}: {} checks, {} failures", s.check, s.checks, s.failures).unwrap();
        }
        for (name, count) in &self.counters {
            writeln!(w, "  [info] {name}: {count}").unwrap();
        }
        for f in &self.findings {
            let kind = if f.hard { "hard" } else { "audit" };
            writeln!(w, "{kind} case {} {}: {}", f.case, f.check, f.message).unwrap();
        }
        out
    }

    fn file_stem(&self, f: &Finding, label: &str) -> String {
        format!("{}-case{}-{}-{}.fg", self.suite, f.case, f.check, label)
    }

    /// Writes each counterexample graph to `dir` (created if needed) and
    /// returns the paths in finding order.
    pub fn write_counterexamples(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        let mut paths = Vec::new();
        if self.findings.is_empty() {
            return Ok(paths);
        }
        std::fs::create_dir_all(dir)?;
        for f in &self.findings {
            for (label, graph) in &f.graphs {
                let path = dir.join(self.file_stem(f, label));
                let body = format!(
                    "# suite {} case {} seed {}\n# {}: {}\n{}",
                    self.suite,
                    f.case,
                    self.seed,
                    f.check,
                    f.message.replace('\n', " "),
                    serialize_graph(graph)
                );
                std::fs::write(&path, body)?;
                paths.push(path);
            }
        }
        Ok(paths)
    }
}

pub fn run_suite(suite: Suite, seed: u64, cases: usize) -> SuiteReport {
    let outcomes = par::map_range(cases, |case| {
        let mut rng = case_rng(seed, case as u64);
        let mut out = CaseOutcome::default();
        match suite {
            Suite::Commutativity => commutativity(&mut rng, case, &mut out),
            Suite::Cycle => cycle(&mut rng, case, &mut out),
            Suite::Cfg => cfg(&mut rng, case, &mut out),
            Suite::StrongDegree => strong_degree(&mut rng, case, &mut out),
            Suite::FTree => f_tree(&mut rng, case, &mut out),
            Suite::FCycle => f_cycle(&mut rng, case, &mut out),
            Suite::EdgeSetOrder => edge_set_order(&mut rng, case, &mut out),
        }
        out
    });
    let mut tallies: BTreeMap<(&'static str, bool), Tally> = BTreeMap::new();
    let mut counters = BTreeMap::new();
    let mut findings = Vec::new();
    for out in outcomes {
        for (key, t) in out.tallies {
            let total = tallies.entry(key).or_default();
            total.checks += t.checks;
            total.failures += t.failures;
        }
        for (name, c) in out.counters {
            *counters.entry(name).or_default() += c;
        }
        findings.extend(out.findings);
    }
    SuiteReport {
        suite,
        seed,
        cases,
        summaries: tallies
            .into_iter()
            .map(|((check, hard), t)| CheckSummary {
                check,
                hard,
                checks: t.checks,
                failures: t.failures,
            })
            .collect(),
        findings,
        counters,
    }
}

fn labelled(pairs: &[(&str, &FuzzyGraph)]) -> Vec<(String, FuzzyGraph)> {
    pairs.iter().map(|(l, g)| (l.to_string(), (*g).clone())).collect()
}

fn iso(a: &FuzzyGraph, b: &FuzzyGraph, mode: IsoMode) -> bool {
    graphs_isomorphic(a, b, mode).expect("audit graphs stay within the exhaustive bound")
}

fn commutativity(rng: &mut impl Rng, case: usize, out: &mut CaseOutcome) {
    let g = random_small_graph(rng, 4, 8);
    let mut ids: Vec<String> = g.vertex_ids().into_iter().map(|v| v.as_str().to_string()).collect();
    for _ in 0..3 {
        ids.shuffle(rng);
        let (p, q, r, s) = (&ids[0], &ids[1], &ids[2], &ids[3]);
        let first = pool_sequence(&g, &PoolPlan::new([(p, q), (r, s)])).expect("valid plan").graph;
        let second = pool_sequence(&g, &PoolPlan::new([(r, s), (p, q)])).expect("valid plan").graph;
        out.check(case, true, "disjoint-pairs-fuzzy-iso", iso(&first, &second, IsoMode::Fuzzy), || {
            (
                format!("pooling ({p},{q}) and ({r},{s}) depends on order"),
                labelled(&[("input", &g), ("pq-first", &first), ("rs-first", &second)]),
            )
        });
    }
}

fn single_sigma(g: &FuzzyGraph) -> f64 {
    assert_eq!(g.vertex_count(), 1);
    g.vertices().next().expect("one vertex").1
}

fn cycle(rng: &mut impl Rng, case: usize, out: &mut CaseOutcome) {
    let len = rng.gen_range(4..=8);
    let c = weakest_run_cycle(rng, len);
    let pooled = pool_cycle(&c.graph, &c.order).expect("generated cycle").graph;
    let (sigma, phi) = (single_sigma(&pooled), c.strength());
    out.check(case, true, "collapse-to-strength", sigma == phi, || {
        (
            format!("pooled membership {sigma} but cycle strength {phi}"),
            labelled(&[("input", &c.graph), ("pooled", &pooled)]),
        )
    });

    // same claim without the weakest-run shape or tight vertex memberships
    let free = random_cycle(rng, len);
    let pooled = pool_cycle(&free.graph, &free.order).expect("generated cycle").graph;
    out.count("unconstrained-cycles");
    if single_sigma(&pooled) == free.strength() {
        out.count("unconstrained-cycles-matching-strength");
    }
}

fn cfg(rng: &mut impl Rng, case: usize, out: &mut CaseOutcome) {
    let n = rng.gen_range(3..=8);
    let g = random_cfg(rng, n);
    let edges: Vec<(String, String, f64)> = g
        .edges()
        .map(|(a, b, m)| (a.as_str().to_string(), b.as_str().to_string(), m))
        .collect();
    for (a, b, _) in &edges {
        let pooled = pool_pair(&g, a, b).expect("edge endpoints").graph;
        out.check(case, true, "edge-pool-stays-complete", pooled.is_complete_fuzzy(), || {
            (
                format!("pooling {a}{b} leaves an incomplete graph"),
                labelled(&[("input", &g), ("pooled", &pooled)]),
            )
        });
    }
    let weakest = edges.iter().map(|e| e.2).fold(f64::INFINITY, f64::min);
    let weak: Vec<&(String, String, f64)> = edges.iter().filter(|e| e.2 == weakest).collect();
    for (i, e1) in weak.iter().enumerate() {
        for e2 in &weak[i + 1..] {
            let shared = [&e1.0, &e1.1].into_iter().any(|v| *v == e2.0 || *v == e2.1);
            if !shared {
                continue;
            }
            let g1 = pool_pair(&g, &e1.0, &e1.1).expect("edge endpoints").graph;
            let g2 = pool_pair(&g, &e2.0, &e2.1).expect("edge endpoints").graph;
            let detail = |what: &str| {
                (
                    format!("{what}: pooling {}{} vs {}{}", e1.0, e1.1, e2.0, e2.1),
                    labelled(&[("input", &g), ("first", &g1), ("second", &g2)]),
                )
            };
            out.check(case, true, "weakest-edges-support-iso", iso(&g1, &g2, IsoMode::Support), || {
                detail("support graphs differ")
            });
            out.check(case, false, "weakest-edges-fuzzy-iso", iso(&g1, &g2, IsoMode::Fuzzy), || {
                detail("memberships differ")
            });
        }
    }
}

fn strong_degree(rng: &mut impl Rng, case: usize, out: &mut CaseOutcome) {
    let g = random_small_graph(rng, 3, 7);
    let before: BTreeMap<String, f64> = g
        .degree_reports()
        .into_iter()
        .map(|r| (r.vertex.as_str().to_string(), r.strong_degree))
        .collect();
    let edges: Vec<(String, String)> = g
        .edges()
        .map(|(a, b, _)| (a.as_str().to_string(), b.as_str().to_string()))
        .collect();
    for (p, q) in &edges {
        let r = pool_pair(&g, p, q).expect("edge endpoints");
        let vc = r.merged.clone().expect("merged vertex");
        for report in r.graph.degree_reports() {
            let v = report.vertex.as_str();
            let after = report.strong_degree;
            if report.vertex == vc {
                for end in [p, q] {
                    let d = before[end.as_str()];
                    out.check(case, false, "pooled-vertex", d >= after - EPSILON, || {
                        (
                            format!("d_s({end}) = {d} before pooling {p}{q}, d_s({v}) = {after} after"),
                            labelled(&[("input", &g), ("pooled", &r.graph)]),
                        )
                    });
                }
            } else {
                let d = before[v];
                out.check(case, false, "surviving-vertex", d >= after - EPSILON, || {
                    (
                        format!("d_s({v}) rose from {d} to {after} after pooling {p}{q}"),
                        labelled(&[("input", &g), ("pooled", &r.graph)]),
                    )
                });
            }
        }
    }
}

fn f_tree(rng: &mut impl Rng, case: usize, out: &mut CaseOutcome) {
    let n = rng.gen_range(3..=7);
    let g = random_f_tree(rng, n);
    for (p, q, class) in g.edge_classes() {
        let pooled = pool_pair(&g, p.as_str(), q.as_str()).expect("edge endpoints").graph;
        let still = pooled.is_f_tree();
        match class {
            EdgeClass::Alpha => out.check(case, false, "alpha-edge-keeps-f-tree", still, || {
                (
                    format!("pooling alpha edge {p}{q} breaks the f-tree"),
                    labelled(&[("input", &g), ("pooled", &pooled)]),
                )
            }),
            EdgeClass::Delta => {
                out.count("delta-edges");
                if !still {
                    out.count("delta-edges-breaking-f-tree");
                }
            }
            EdgeClass::Beta => out.count("beta-edges"),
        }
    }
}

/// True when the positive-membership support has a cycle.
fn support_has_cycle(g: &FuzzyGraph) -> bool {
    let edges = g.edges().filter(|(_, _, m)| *m > 0.0).count();
    edges + g.components().len() > g.vertex_count()
}

fn f_cycle(rng: &mut impl Rng, case: usize, out: &mut CaseOutcome) {
    let len = rng.gen_range(3..=6);
    let pendants = rng.gen_range(0..=2);
    let g = cycle_with_pendants(rng, len, pendants);
    for (p, q, class) in g.edge_classes() {
        if class != EdgeClass::Alpha {
            continue;
        }
        let pooled = pool_pair(&g, p.as_str(), q.as_str()).expect("edge endpoints").graph;
        let cut = g.is_fuzzy_cutvertex(p.as_str()).unwrap() || g.is_fuzzy_cutvertex(q.as_str()).unwrap();
        let detail = |expect: &str| {
            (
                format!("pooling alpha edge {p}{q} should give {expect}"),
                labelled(&[("input", &g), ("pooled", &pooled)]),
            )
        };
        if cut {
            out.check(case, false, "cutvertex-end-gives-cycle", support_has_cycle(&pooled), || {
                detail("a graph with a cycle")
            });
        } else {
            out.check(case, false, "otherwise-gives-f-tree", pooled.is_f_tree(), || detail("an f-tree"));
        }
    }
}

fn edge_set_order(rng: &mut impl Rng, case: usize, out: &mut CaseOutcome) {
    let cycle_len = rng.gen_range(3..=4);
    let path_edges = rng.gen_range(1..=2);
    let n = rng.gen_range(cycle_len + path_edges + 1..=8);
    let density = rng.gen_range(0.2..0.6);
    let mut g = random_graph(rng, n, density);
    let mut order: Vec<String> = (0..n).map(vertex_name).collect();
    order.shuffle(rng);
    let (cyc, rest) = order.split_at(cycle_len);
    let path = &rest[..=path_edges];

    let mut ensure = |g: &mut FuzzyGraph, a: &str, b: &str| {
        if g.mu(a, b).is_none() {
            let bound = g.sigma(a).unwrap().min(g.sigma(b).unwrap());
            *g = g.add_edge(a, b, bound * rng.gen_range(0.5..=1.0)).expect("fresh edge within bound");
        }
    };
    let cycle_plan: Vec<(String, String)> = (0..cycle_len)
        .map(|k| (cyc[k].clone(), cyc[(k + 1) % cycle_len].clone()))
        .collect();
    let path_plan: Vec<(String, String)> = path.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    for (a, b) in cycle_plan.iter().chain(&path_plan) {
        ensure(&mut g, a, b);
    }

    let forward = PoolPlan::new(path_plan.iter().chain(&cycle_plan).cloned());
    let backward = PoolPlan::new(cycle_plan.iter().chain(&path_plan).cloned());
    let g3 = pool_sequence(&g, &forward).expect("valid plan").graph;
    let g4 = pool_sequence(&g, &backward).expect("valid plan").graph;
    let detail = |what: &str| {
        (
            format!("{what}: path edges then cycle vs cycle then path"),
            labelled(&[("input", &g), ("path-first", &g3), ("cycle-first", &g4)]),
        )
    };
    out.check(case, true, "support-iso", iso(&g3, &g4, IsoMode::Support), || {
        detail("support graphs differ")
    });
    out.check(case, false, "fuzzy-iso", iso(&g3, &g4, IsoMode::Fuzzy), || detail("memberships differ"));
}
